//! Human and `key=value` output.
//!
//! A machine line is `<kind>` followed by space-separated `key=value`
//! pairs. Values made only of `[A-Za-z0-9._:/+,()-]` are bare; anything
//! else is a double-quoted Rust-escaped string, so lines split without
//! ambiguity.

use std::fmt::Display;
use std::io::{self, Write};

pub struct Line {
    kind: &'static str,
    pairs: Vec<(&'static str, String)>,
}

impl Line {
    pub fn new(kind: &'static str) -> Line {
        Line {
            kind,
            pairs: Vec::new(),
        }
    }

    pub fn kv(mut self, key: &'static str, value: impl Display) -> Line {
        self.pairs.push((key, value.to_string()));
        self
    }

    pub fn render(&self) -> String {
        let mut s = String::from(self.kind);
        for (k, v) in &self.pairs {
            s.push(' ');
            s.push_str(k);
            s.push('=');
            s.push_str(&quote(v));
        }
        s
    }
}

fn bare(c: char) -> bool {
    c.is_ascii_alphanumeric() || "._:/+,()-".contains(c)
}

pub fn quote(v: &str) -> String {
    if !v.is_empty() && v.chars().all(bare) {
        v.to_string()
    } else {
        format!("{v:?}")
    }
}

pub struct Out<'a> {
    w: &'a mut dyn Write,
    pub machine: bool,
}

impl<'a> Out<'a> {
    pub fn new(w: &'a mut dyn Write, machine: bool) -> Out<'a> {
        Out { w, machine }
    }

    /// Emits `line` in machine mode, `human` otherwise.
    pub fn emit(&mut self, line: Line, human: impl FnOnce() -> String) -> io::Result<()> {
        if self.machine {
            writeln!(self.w, "{}", line.render())
        } else {
            writeln!(self.w, "{}", human())
        }
    }

    /// Emits only in machine mode.
    pub fn machine_only(&mut self, line: Line) -> io::Result<()> {
        if self.machine {
            writeln!(self.w, "{}", line.render())?;
        }
        Ok(())
    }
}
