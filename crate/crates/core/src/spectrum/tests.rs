use super::*;
use crate::model::GeneralModel;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn delta(a: C64, q: Potential) -> Model {
    Model::Delta(DeltaModel::new(a, q))
}

fn exp_simple(mu: f64) -> Potential {
    Potential::exp_even(c(0.0, 0.5), mu).unwrap()
}

/// Exceptional point of `q = (i/2) e^{-mu|x|}`: `k0 = sqrt3/2 + i(1/2 - mu)`.
fn k0(mu: f64) -> C64 {
    c(3f64.sqrt() / 2.0, 0.5 - mu)
}

#[test]
fn char_value_examples() {
    let m = delta(c(-2.0, 0.0), Potential::Zero);
    let k = SpectralParameter::from_k(I).unwrap();
    assert!(char_value(&m, &k, 1e-10).unwrap().norm() < 1e-15);
    let zero = c(0.0, 0.0);
    let g = Model::General(GeneralModel {
        t: CouplingMatrix::new(zero, c(2.0, 0.0), c(-2.0, 0.0), zero),
        q1: Potential::Zero,
        q2: Potential::Zero,
    });
    for k in [c(0.3, 0.4), c(-2.0, 5.0), c(7.0, 0.01)] {
        let p = SpectralParameter::from_k(k).unwrap();
        assert!(char_value(&g, &p, 1e-10).unwrap().norm() < 1e-14);
    }
}

#[test]
fn char_bounded_below_for_positive_a() {
    let m = delta(c(1.0, 0.0), Potential::Zero);
    let r = SearchRegion::default();
    for j in 0..200 {
        let k = r.halton(j);
        let v = char_value(&m, &SpectralParameter::from_k(k).unwrap(), 1e-10).unwrap();
        assert!(v.norm() >= 1.0);
    }
}

#[test]
fn local_roots_examples() {
    let z = c(0.0, 0.0);
    let t = CouplingMatrix::new(c(-2.0, 0.0), z, z, z);
    let LocalRoots::Roots(r) = local_char_roots(&t) else {
        panic!()
    };
    assert_eq!(r.len(), 1);
    assert!((r[0] + 1.0).norm() < 1e-14);
    assert_eq!(
        local_char_roots(&CouplingMatrix::new(z, z, z, z)),
        LocalRoots::Roots(vec![])
    );
    let t = CouplingMatrix::new(z, c(2.0, 0.0), c(-2.0, 0.0), z);
    assert_eq!(local_char_roots(&t), LocalRoots::WholeDomain);
}

#[test]
fn local_roots_match_free_char() {
    let t = CouplingMatrix::new(c(-1.0, 0.5), c(0.3, 0.0), c(0.0, 1.0), c(-0.7, -0.2));
    let LocalRoots::Roots(r) = local_char_roots(&t) else {
        panic!()
    };
    let m = Model::General(GeneralModel {
        t,
        q1: Potential::Zero,
        q2: Potential::Zero,
    });
    for l in &r {
        let p = k_from_lambda(*l, BoundarySide::None).unwrap();
        assert!(char_value(&m, &p, 1e-10).unwrap().norm() < 1e-12);
    }
}

#[test]
fn delta_well_single_simple_eigenvalue() {
    let m = delta(c(-2.0, 0.0), Potential::Zero);
    let e = find_eigenvalues(&m, &SearchRegion::default(), 1e-10).unwrap();
    assert_eq!(e.len(), 1);
    assert!((e[0].lambda + 1.0).norm() < 1e-10);
    assert_eq!((e[0].geometric_mult, e[0].algebraic_mult), (1, 1));
    assert!(e[0].residual < 1e-10);
    assert_eq!(algebraic_multiplicity(&m, c(-1.0, 0.0), 0.05, 1e-10).unwrap(), 1);
}

#[test]
fn positive_coupling_has_no_eigenvalue() {
    let m = delta(c(1.0, 0.0), Potential::Zero);
    assert!(find_eigenvalues(&m, &SearchRegion::default(), 1e-10)
        .unwrap()
        .is_empty());
}

#[test]
fn general_form_matches_delta_form() {
    let q = Potential::box_odd_sign(c(0.5, 0.5), 1.0).unwrap();
    let d = DeltaModel::new(c(-1.5, 0.4), q);
    let r = SearchRegion::new(-5.0, 5.0, 1e-3, 5.0).unwrap();
    let e1 = find_eigenvalues(&Model::Delta(d.clone()), &r, 1e-10).unwrap();
    let e2 = find_eigenvalues(&Model::General(crate::model::delta_to_general(&d)), &r, 1e-10).unwrap();
    assert!(!e1.is_empty());
    assert_eq!(e1.len(), e2.len());
    for (a, b) in e1.iter().zip(&e2) {
        assert!((a.lambda - b.lambda).norm() < 1e-9);
        assert_eq!(a.algebraic_mult, b.algebraic_mult);
    }
}

#[test]
fn exceptional_point_exp_even() {
    let q = exp_simple(0.25);
    let eps = find_exceptional_points(&q, &SearchRegion::new(-10.0, 10.0, 1e-3, 10.0).unwrap(), 1e-10).unwrap();
    assert_eq!(eps.len(), 2);
    let l0 = k0(0.25) * k0(0.25);
    let a0 = 3.0 * I * k0(0.25) - 0.25;
    let p = eps.iter().find(|e| e.lambda.im > 0.0).unwrap();
    assert!((p.lambda - l0).norm() < 1e-10);
    assert!((p.a - a0).norm() < 1e-10);
    // Closed under conjugation.
    let m = eps.iter().find(|e| e.lambda.im < 0.0).unwrap();
    assert!((m.lambda - l0.conj()).norm() < 1e-10);
    assert!((m.a - a0.conj()).norm() < 1e-10);
}

#[test]
fn no_exceptional_points_outside_mu_range() {
    let r = SearchRegion::new(-10.0, 10.0, 1e-3, 10.0).unwrap();
    assert!(find_exceptional_points(&exp_simple(0.75), &r, 1e-10)
        .unwrap()
        .is_empty());
    assert!(find_exceptional_points(&Potential::Zero, &r, 1e-10).unwrap().is_empty());
}

#[test]
fn exceptional_point_is_double_eigenvalue() {
    let q = exp_simple(0.25);
    let a0 = 3.0 * I * k0(0.25) - 0.25;
    let l0 = k0(0.25) * k0(0.25);
    let m = delta(a0, q.clone());
    let e = find_eigenvalues(&m, &SearchRegion::default(), 1e-10).unwrap();
    let ep = e
        .iter()
        .find(|e| (e.lambda - l0).norm() < 1e-6)
        .expect("eigenvalue at lambda0");
    assert_eq!(ep.geometric_mult, 1);
    assert_eq!(ep.algebraic_mult, 2);
    let idx = multiplicity_index(&m, l0, 0.04, 1e-10).unwrap();
    assert!((idx - 2.0).abs() < 0.01, "{idx}");
    // Conjugate coupling: exceptional at the conjugate point.
    let mc = delta(a0.conj(), q);
    assert_eq!(algebraic_multiplicity(&mc, l0.conj(), 0.04, 1e-10).unwrap(), 2);
}

#[test]
fn rounded_coupling_splits_the_double_eigenvalue() {
    // With the 6-digit coupling the double root splits into two simple ones
    // close to lambda0; the total index around both is still 2.
    let m = delta(c(-1.0, 2.598076), exp_simple(0.25));
    let l0 = k0(0.25) * k0(0.25);
    let e = find_eigenvalues(&m, &SearchRegion::default(), 1e-10).unwrap();
    let near: Vec<_> = e.iter().filter(|e| (e.lambda - l0).norm() < 5e-3).collect();
    assert_eq!(near.iter().map(|e| e.algebraic_mult).sum::<usize>(), 2);
    assert_eq!(algebraic_multiplicity(&m, l0, 0.04, 1e-10).unwrap(), 2);
}

#[test]
fn degenerate_family_detected() {
    let z = c(0.0, 0.0);
    let m = Model::General(GeneralModel {
        t: CouplingMatrix::new(z, c(2.0, 0.0), c(-2.0, 0.0), z),
        q1: Potential::Zero,
        q2: Potential::Zero,
    });
    assert_eq!(
        find_eigenvalues(&m, &SearchRegion::default(), 1e-10),
        Err(Error::DegenerateFamily)
    );
}

#[test]
fn singularity_examples() {
    let r = singularity_scan(&Potential::Zero, &[2.0], 1e-10).unwrap();
    assert!((r[0].a_plus - c(0.0, 4.0)).norm() < 1e-15);
    assert!(r[0].is_singular);
    let q = Potential::box_odd_sign(c(1.0, 0.0), 1.0).unwrap();
    let grid: Vec<f64> = (1..=50).map(|j| 0.2 * j as f64).collect();
    assert!(singularity_scan(&q, &grid, 1e-10)
        .unwrap()
        .iter()
        .all(|r| r.is_singular));
    let q = Potential::exp_even(c(1.0, 0.0), 0.5).unwrap();
    let r = singularity_scan(&q, &[0.75f64.sqrt()], 1e-10).unwrap();
    assert!(!r[0].is_singular);
    assert!((r[0].a_plus - c(-3.0, 0.0)).norm() < 1e-12);
}

#[test]
fn blowup_ratio_growth() {
    let m = DeltaModel::new(c(0.0, 4.0), Potential::Zero);
    let r: Vec<f64> = [1e-2, 1e-3, 1e-4]
        .iter()
        .map(|&e| blowup_ratio(&m, c(4.0, e), 1e-10).unwrap())
        .collect();
    assert!(r[1] >= 5.0 * r[0] && r[2] >= 5.0 * r[1], "{r:?}");
    let m = DeltaModel::new(c(-2.0, 0.0), Potential::Zero);
    for e in [1e-4, 1e-3, 1e-2, 1e-1] {
        assert!(blowup_ratio(&m, c(1.0, e), 1e-10).unwrap() <= 3.0);
    }
    assert!(blowup_ratio(&m, c(0.0, 100.0), 1e-10).unwrap().is_finite());
}

#[test]
fn embedded_box_even() {
    let q = Potential::box_even(0.5, PI).unwrap();
    let e = embedded_eigenvalues(&q, (0.0, 10.0), 1e-10).unwrap();
    assert_eq!(e.len(), 1);
    assert!((e[0].lambda - 1.0).abs() < 1e-10);
    assert!((e[0].a + PI / 2.0).abs() < 1e-8);
    let q = Potential::box_even(0.1, 1.0).unwrap();
    assert!(embedded_eigenvalues(&q, (0.0, 10.0), 1e-10).unwrap().is_empty());
    let q = Potential::box_odd_sign(c(1.0, 0.0), 1.0).unwrap();
    assert!(matches!(
        embedded_eigenvalues(&q, (0.0, 10.0), 1e-10),
        Err(Error::Precondition(_))
    ));
}

#[test]
fn embedded_coupling_closed_form() {
    // a = (Z^2/k^2)(sin(2k rho)/k - 2 rho) at each root of Z(1 - cos k rho) = k^2.
    let (z, rho) = (3.0, 2.0);
    let q = Potential::box_even(z, rho).unwrap();
    let e = embedded_eigenvalues(&q, (0.0, 10.0), 1e-10).unwrap();
    assert!(!e.is_empty());
    for r in e {
        let k = r.k;
        assert!((z * (1.0 - (k * rho).cos()) - k * k).abs() < 1e-10);
        let a = z * z / (k * k) * ((2.0 * k * rho).sin() / k - 2.0 * rho);
        assert!((r.a - a).abs() < 1e-8, "{} vs {}", r.a, a);
    }
}

#[test]
fn embedded_sampled_even() {
    // A symmetric sampled box (steep ramps) reproduces the box root near k = 1.
    let e = 1e-6;
    let pi = PI;
    let q = Potential::sampled(
        vec![-pi - e, -pi, pi, pi + e],
        vec![c(0.0, 0.0), c(0.5, 0.0), c(0.5, 0.0), c(0.0, 0.0)],
    )
    .unwrap();
    let r = embedded_eigenvalues(&q, (0.5, 1.5), 1e-10).unwrap();
    assert_eq!(r.len(), 1);
    assert!((r[0].k - 1.0).abs() < 1e-5);
    let skew = Potential::sampled(vec![-1.0, 0.5], vec![c(1.0, 0.0), c(1.0, 0.0)]).unwrap();
    assert!(matches!(
        embedded_eigenvalues(&skew, (0.5, 1.5), 1e-10),
        Err(Error::ParityUndecidable(_))
    ));
}

#[test]
fn exp_even_positive_eigenvalue() {
    let r = exp_even_embedded(c(1.0, 0.0), 0.5, 1e-10).unwrap().unwrap();
    assert!((r.lambda - 0.75).abs() < 1e-15);
    assert!((r.a + 3.0).abs() < 1e-12);
    assert!(exp_even_embedded(c(0.2, 0.0), 0.5, 1e-10).unwrap().is_none());
    assert!(exp_even_embedded(c(1.0, 0.1), 0.5, 1e-10).is_err());
}

#[test]
fn phase_points_free_case() {
    let r = SearchRegion::default();
    let cases = [
        (c(-1.0, 0.5), PhaseLabel::NonrealEigenvalue),
        (c(-1.0, 0.0), PhaseLabel::RealEigenvalue),
        (c(1.0, 0.5), PhaseLabel::NoEigenvalue),
        (c(0.0, 0.8), PhaseLabel::Singularity),
        (c(0.0, -1.3), PhaseLabel::Singularity),
        (c(0.0, 0.0), PhaseLabel::NoEigenvalue),
    ];
    for (a, label) in cases {
        let p = phase_point(&Potential::Zero, a, &r, 1e-10).unwrap();
        assert_eq!(p.label, label, "a = {a}");
    }
    let p = phase_point(&Potential::Zero, c(0.0, 0.8), &r, 1e-10).unwrap();
    assert!((p.singularity.unwrap() - 0.16).abs() < 1e-10);
}

#[test]
fn index_radius_respects_cut_and_neighbours() {
    let r = index_radius(c(-1.0, 0.0), std::iter::empty());
    assert!((r - 0.05).abs() < 1e-15);
    let r = index_radius(c(1.0, 0.01), std::iter::once(c(1.0, 0.03)));
    assert!((r - 0.005).abs() < 1e-15);
}
