//! Command reports: plain text by default, JSON with `--json`.

use std::collections::BTreeMap;

use serde_json::{json, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Exit {
    Pass = 0,
    Fail = 1,
    Input = 2,
    NotClosed = 3,
}

#[derive(Clone, Debug)]
pub struct Check {
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug)]
pub struct Report {
    pub command: String,
    /// Sorted by check name, so output order never depends on evaluation order.
    pub checks: BTreeMap<String, Check>,
    pub info: BTreeMap<String, Value>,
    pub error: Option<String>,
    pub exit: Option<Exit>,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Report { command: command.into(), checks: BTreeMap::new(), info: BTreeMap::new(), error: None, exit: None }
    }

    pub fn check(&mut self, name: &str, passed: bool, detail: impl Into<String>) {
        self.checks.insert(name.into(), Check { passed, detail: detail.into() });
    }

    pub fn info(&mut self, key: &str, v: impl Into<Value>) {
        self.info.insert(key.into(), v.into());
    }

    pub fn input_error(command: &str, msg: impl Into<String>) -> Self {
        let mut r = Report::new(command);
        r.error = Some(msg.into());
        r.exit = Some(Exit::Input);
        r
    }

    pub fn not_closed(mut self, msg: impl Into<String>) -> Self {
        self.error = Some(msg.into());
        self.exit = Some(Exit::NotClosed);
        self
    }

    pub fn exit_code(&self) -> Exit {
        self.exit.unwrap_or(if self.checks.values().all(|c| c.passed) { Exit::Pass } else { Exit::Fail })
    }

    pub fn to_json(&self) -> Value {
        let checks: BTreeMap<&String, Value> = self.checks.iter().map(|(k, c)| (k, json!({"passed": c.passed, "detail": c.detail}))).collect();
        json!({
            "command": self.command,
            "checks": checks,
            "info": self.info,
            "error": self.error,
            "exit": self.exit_code() as i32,
        })
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        if let Some(e) = &self.error {
            s.push_str(&format!("error: {e}\n"));
        }
        for (k, v) in &self.info {
            let shown = match v {
                Value::String(t) => t.clone(),
                other => other.to_string(),
            };
            s.push_str(&format!("{k}: {shown}\n"));
        }
        for (k, c) in &self.checks {
            let tag = if c.passed { "PASS" } else { "FAIL" };
            if c.detail.is_empty() {
                s.push_str(&format!("{tag} {k}\n"));
            } else {
                s.push_str(&format!("{tag} {k}: {}\n", c.detail));
            }
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_follow_checks() {
        let mut r = Report::new("x");
        assert_eq!(r.exit_code(), Exit::Pass);
        r.check("b", true, "");
        r.check("a", false, "why");
        assert_eq!(r.exit_code(), Exit::Fail);
        assert_eq!(r.to_text(), "FAIL a: why\nPASS b\n");
        assert_eq!(r.clone().not_closed("n").exit_code(), Exit::NotClosed);
        assert_eq!(Report::input_error("x", "bad").exit_code(), Exit::Input);
    }

    #[test]
    fn json_is_key_sorted() {
        let mut r = Report::new("x");
        r.check("z", true, "");
        r.check("a", true, "");
        let s = r.to_json().to_string();
        assert!(s.find("\"a\"").unwrap() < s.find("\"z\"").unwrap());
    }
}
