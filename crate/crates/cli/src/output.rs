//! Formatting and output plumbing shared by the subcommands.

use std::fs::File;
use std::io::{self, BufWriter, IsTerminal, Write};
use std::path::Path;

use anyhow::Context;
use serde_json::Value;

/// 17 significant digits: every `f64` survives a print/parse round trip.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// JSON has no infinities; they are written as the strings `"inf"`/`"-inf"`.
pub fn json_float(x: f64) -> Value {
    if x.is_finite() {
        Value::from(x)
    } else if x.is_nan() {
        Value::from("nan")
    } else if x > 0.0 {
        Value::from("inf")
    } else {
        Value::from("-inf")
    }
}

/// Stderr diagnostics, colored only on a terminal and when `NO_COLOR` is unset.
pub struct Diagnostics {
    color: bool,
}

impl Diagnostics {
    pub fn from_env() -> Self {
        let no_color = std::env::var_os("NO_COLOR").is_some_and(|v| !v.is_empty());
        Self {
            color: !no_color && io::stderr().is_terminal(),
        }
    }

    fn paint(&self, code: &str, text: &str) -> String {
        if self.color {
            format!("\x1b[{code}m{text}\x1b[0m")
        } else {
            text.to_string()
        }
    }

    pub fn warn(&self, msg: &str) {
        eprintln!("{} {msg}", self.paint("33", "warning:"));
    }

    pub fn error(&self, msg: &str) {
        eprintln!("{} {msg}", self.paint("31", "error:"));
    }

    pub fn pass(&self) -> String {
        if self.color && io::stdout().is_terminal() {
            self.paint("32", "PASS")
        } else {
            "PASS".into()
        }
    }

    pub fn fail(&self) -> String {
        if self.color && io::stdout().is_terminal() {
            self.paint("31", "FAIL")
        } else {
            "FAIL".into()
        }
    }
}

/// Line-oriented writer to a file or stdout.
pub struct Sink {
    inner: Box<dyn Write>,
}

impl Sink {
    pub fn open(path: Option<&Path>) -> anyhow::Result<Self> {
        let inner: Box<dyn Write> = match path {
            Some(p) => Box::new(BufWriter::new(
                File::create(p).with_context(|| format!("creating {}", p.display()))?,
            )),
            None => Box::new(BufWriter::new(io::stdout().lock())),
        };
        Ok(Self { inner })
    }

    pub fn line(&mut self, text: &str) -> anyhow::Result<()> {
        writeln!(self.inner, "{text}").context("writing output")
    }

    pub fn finish(mut self) -> anyhow::Result<()> {
        self.inner.flush().context("flushing output")
    }
}
