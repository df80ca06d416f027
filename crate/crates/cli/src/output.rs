use crate::Common;
use pointspec::Error;
use serde_json::{json, Map, Value};

#[derive(Debug)]
pub enum Output {
    Json { model: Option<Value>, results: Value },
    Csv(String),
}

impl Output {
    pub fn render(&self, command: &str, common: &Common, elapsed: Option<f64>) -> String {
        match self {
            Output::Csv(s) => s.clone(),
            Output::Json { model, results } => {
                let mut m = Map::new();
                m.insert("command".into(), json!(command));
                m.insert("model".into(), model.clone().unwrap_or(Value::Null));
                m.insert("tolerances".into(), json!({ "tol": common.tol }));
                m.insert("results".into(), results.clone());
                if let Some(t) = elapsed {
                    m.insert("wall_time_s".into(), json!(t));
                }
                let mut s = serde_json::to_string_pretty(&Value::Object(m)).expect("report serializes");
                s.push('\n');
                s
            }
        }
    }
}

pub fn error_json(e: &Error, code: u8) -> String {
    let mut v = json!({
        "error": e.kind(),
        "message": e.to_string(),
        "exit_code": code,
    });
    if let Error::Parse { path, .. } | Error::Validation { path, .. } = e {
        v["path"] = json!(path);
    }
    v.to_string()
}

/// Builds CSV text from a header and rows of already formatted fields.
pub struct Csv {
    text: String,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        Csv {
            text: header.join(",") + "\n",
        }
    }

    pub fn row(&mut self, fields: &[String]) {
        self.text.push_str(&fields.join(","));
        self.text.push('\n');
    }

    pub fn finish(self) -> Output {
        Output::Csv(self.text)
    }
}
