//! Command reports and their two renderings.
//!
//! The machine-readable form is one JSON object:
//!
//! ```text
//! {
//!   "command": "filters",
//!   "ok": true,
//!   "checks": [{"name": "...", "ok": true, "detail": "..."}],
//!   "data": { ... command specific ... },
//!   "error": {"kind": "reference", "message": "..."}
//! }
//! ```
//!
//! `detail` and `error` are omitted when absent. `data` keys are fixed per
//! command and lists inside it are sorted.

use serde::Serialize;
use serde_json::Value;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    #[default]
    Text,
    #[value(alias = "machine-readable")]
    Json,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub ok: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ErrorInfo {
    pub kind: String,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub command: String,
    pub ok: bool,
    pub checks: Vec<Check>,
    pub data: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<ErrorInfo>,
    #[serde(skip)]
    pub lines: Vec<String>,
    #[serde(skip)]
    exit: Option<i32>,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Report {
            command: command.to_string(),
            ok: true,
            checks: Vec::new(),
            data: Value::Object(Default::default()),
            error: None,
            lines: Vec::new(),
            exit: None,
        }
    }

    pub fn failure(command: &str, kind: &str, message: impl ToString, exit: i32) -> Self {
        let mut r = Report::new(command);
        r.ok = false;
        r.error = Some(ErrorInfo {
            kind: kind.to_string(),
            message: message.to_string(),
        });
        r.exit = Some(exit);
        r
    }

    pub fn check(&mut self, name: impl Into<String>, ok: bool) -> bool {
        self.checks.push(Check {
            name: name.into(),
            ok,
            detail: None,
        });
        self.ok &= ok;
        ok
    }

    /// An empty `detail` is dropped.
    pub fn check_with(&mut self, name: impl Into<String>, ok: bool, detail: impl Into<String>) -> bool {
        let detail: String = detail.into();
        self.checks.push(Check {
            name: name.into(),
            ok,
            detail: (!detail.is_empty()).then_some(detail),
        });
        self.ok &= ok;
        ok
    }

    pub fn line(&mut self, s: impl Into<String>) {
        self.lines.push(s.into());
    }

    pub fn set(&mut self, key: &str, v: impl Serialize) {
        let v = serde_json::to_value(v).expect("plain data serializes");
        self.data
            .as_object_mut()
            .expect("data is an object")
            .insert(key.to_string(), v);
    }

    /// 0 when every check passed, 1 on a failed check, or the code the
    /// failure was built with.
    pub fn exit_code(&self) -> i32 {
        match self.exit {
            Some(c) => c,
            None if self.ok => 0,
            None => 1,
        }
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(self).expect("report serializes");
                s.push('\n');
                s
            }
            Format::Text => self.text(),
        }
    }

    fn text(&self) -> String {
        let mut out = String::new();
        for l in &self.lines {
            out.push_str(l);
            out.push('\n');
        }
        for c in &self.checks {
            let mark = if c.ok { "PASS" } else { "FAIL" };
            match &c.detail {
                Some(d) => out.push_str(&format!("{mark} {}: {d}\n", c.name)),
                None => out.push_str(&format!("{mark} {}\n", c.name)),
            }
        }
        if let Some(e) = &self.error {
            out.push_str(&format!("error ({}): {}\n", e.kind, e.message));
        } else if !self.checks.is_empty() {
            let failed = self.checks.iter().filter(|c| !c.ok).count();
            if failed == 0 {
                out.push_str(&format!("ok: {} checks\n", self.checks.len()));
            } else {
                out.push_str(&format!("FAILED: {failed} of {} checks\n", self.checks.len()));
            }
        }
        out
    }
}
