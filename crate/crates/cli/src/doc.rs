//! Ordered key-value documents and their two renderings.
//!
//! Structured output, version 1:
//!
//! ```text
//! gkmkit-structured 1
//! <key>=<value>
//! ...
//! exit=<code>
//! ```
//!
//! Keys are dot-separated lowercase paths (`finding.0.rule`); values are
//! UTF-8 with `\` written as `\\` and newlines as `\n`. Entries appear in a
//! fixed order, so identical inputs give byte-identical documents.

use std::fmt::Display;

pub const STRUCTURED_VERSION: u32 = 1;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Doc {
    entries: Vec<(String, String)>,
}

impl Doc {
    pub fn new() -> Self {
        Doc::default()
    }

    pub fn put(&mut self, key: impl Into<String>, value: impl Display) {
        self.entries.push((key.into(), value.to_string()));
    }

    /// Appends `other` with every key prefixed by `prefix.`.
    pub fn nest(&mut self, prefix: &str, other: Doc) {
        for (k, v) in other.entries {
            self.entries.push((format!("{prefix}.{k}"), v));
        }
    }

    pub fn extend(&mut self, other: Doc) {
        self.entries.extend(other.entries);
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn entries(&self) -> &[(String, String)] {
        &self.entries
    }

    pub fn render_structured(&self) -> String {
        let mut out = format!("gkmkit-structured {STRUCTURED_VERSION}\n");
        for (k, v) in &self.entries {
            out.push_str(k);
            out.push('=');
            out.push_str(&escape(v));
            out.push('\n');
        }
        out
    }

    /// One `key: value` line per entry, values aligned.
    pub fn render_text(&self) -> String {
        let width = self.entries.iter().map(|(k, _)| k.chars().count()).max().unwrap_or(0).min(32);
        let mut out = String::new();
        for (k, v) in &self.entries {
            let pad = width.saturating_sub(k.chars().count());
            out.push_str(k);
            out.push(':');
            out.push_str(&" ".repeat(pad + 1));
            out.push_str(&v.replace('\n', "\n    "));
            out.push('\n');
        }
        out
    }
}

fn escape(v: &str) -> String {
    v.replace('\\', "\\\\").replace('\n', "\\n")
}

/// Parses a structured document back into its entries; the inverse of
/// `render_structured`.
pub fn parse_structured(text: &str) -> Option<Vec<(String, String)>> {
    let mut lines = text.lines();
    if lines.next()? != format!("gkmkit-structured {STRUCTURED_VERSION}") {
        return None;
    }
    lines
        .map(|l| {
            let (k, v) = l.split_once('=')?;
            let mut value = String::new();
            let mut chars = v.chars();
            while let Some(c) = chars.next() {
                if c == '\\' {
                    match chars.next()? {
                        'n' => value.push('\n'),
                        '\\' => value.push('\\'),
                        _ => return None,
                    }
                } else {
                    value.push(c);
                }
            }
            Some((k.to_string(), value))
        })
        .collect()
}
