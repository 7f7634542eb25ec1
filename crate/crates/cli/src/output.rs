use rtdich::CycNum;
use serde_json::{json, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    JsonLines,
}

/// Collects output lines in the selected format. Each record is one text
/// block or one JSON object tagged with the command name.
pub struct Out {
    format: Format,
    command: &'static str,
    buf: String,
}

fn decimal(x: f64) -> String {
    let s = format!("{x:.6}");
    if s == "-0.000000" {
        "0.000000".into()
    } else {
        s
    }
}

/// The integer or fraction when the value is rational, the token otherwise.
pub fn exact(v: &CycNum) -> String {
    match v.to_rational() {
        Some(r) => r.to_string(),
        None => v.to_token(),
    }
}

impl Out {
    pub fn new(format: Format, command: &'static str) -> Self {
        Out {
            format,
            command,
            buf: String::new(),
        }
    }

    pub fn finish(self) -> String {
        self.buf
    }

    fn json(&mut self, mut v: Value) {
        v.as_object_mut()
            .expect("records are objects")
            .insert("command".into(), json!(self.command));
        self.buf.push_str(&v.to_string());
        self.buf.push('\n');
    }

    pub fn line(&mut self, text: impl AsRef<str>) {
        self.buf.push_str(text.as_ref());
        self.buf.push('\n');
    }

    /// A text line, or a JSON record built from the same data.
    pub fn record(&mut self, text: impl AsRef<str>, json: Value) {
        match self.format {
            Format::Text => self.line(text),
            Format::JsonLines => self.json(json),
        }
    }

    /// Exact form first, then a rendering and a labeled decimal approximation.
    pub fn value(&mut self, name: &str, v: &CycNum) {
        let (re, im) = v.approx();
        match self.format {
            Format::Text => {
                let prefix = if name.is_empty() { String::new() } else { format!("{name}: ") };
                self.line(format!("{prefix}{}", exact(v)));
                if v.to_rational().is_none() {
                    self.line(format!("  = {}", v.render()));
                    self.line(format!("  ~ {} + {}i (approximate)", decimal(re), decimal(im)));
                } else {
                    self.line(format!("  ~ {} (approximate)", decimal(re)));
                }
            }
            Format::JsonLines => self.json(json!({
                "name": name,
                "exact": exact(v),
                "token": v.to_token(),
                "render": v.render(),
                "approx": [re, im],
            })),
        }
    }

    /// A whole file in one of the library's text formats.
    pub fn document(&mut self, kind: &str, text: &str) {
        match self.format {
            Format::Text => self.buf.push_str(text),
            Format::JsonLines => self.json(json!({ "kind": kind, "text": text })),
        }
    }

    pub fn report(&mut self, report: &rtdich::validation::ValidationReport) {
        match self.format {
            Format::Text => self.buf.push_str(&report.to_string()),
            Format::JsonLines => {
                for c in &report.checks {
                    self.json(json!({ "check": c.name, "passed": c.passed, "witness": c.witness }));
                }
                for w in &report.warnings {
                    self.json(json!({ "warning": w }));
                }
            }
        }
    }
}
