//! Canonical JSON documents.
//!
//! Canonical form is two-space-indented JSON with object keys in sorted
//! order and a trailing newline.

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::Value;
use thiserror::Error;

use crate::capped::CappedGrope;
use crate::grope::Grope;
use crate::pipeline::SurgeryKernel;

/// A JSON error with its 1-based position in the input.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {message}")]
pub struct JsonError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl From<serde_json::Error> for JsonError {
    fn from(e: serde_json::Error) -> Self {
        let message = e.to_string();
        // serde_json appends " at line L column C"; keep the bare message.
        let message = match message.rfind(" at line ") {
            Some(i) => message[..i].to_string(),
            None => message,
        };
        JsonError {
            line: e.line(),
            column: e.column(),
            message,
        }
    }
}

pub fn to_canonical<T: Serialize + ?Sized>(value: &T) -> String {
    // Going through `Value` sorts the keys of every object.
    let value = serde_json::to_value(value).expect("document types always serialize");
    let mut s = serde_json::to_string_pretty(&value).expect("values always serialize");
    s.push('\n');
    s
}

pub fn from_str<T: DeserializeOwned>(text: &str) -> Result<T, JsonError> {
    Ok(serde_json::from_str(text)?)
}

/// Any of the three document kinds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Document {
    Grope(Grope),
    Capped(CappedGrope),
    Kernel(SurgeryKernel),
}

impl Document {
    /// Detects the kind from the top-level keys: `gropes` marks a kernel,
    /// `caps` a capped grope, anything else a bare grope.
    pub fn parse(text: &str) -> Result<Document, JsonError> {
        let value: Value = serde_json::from_str(text)?;
        let has = |k: &str| value.as_object().is_some_and(|o| o.contains_key(k));
        Ok(if has("gropes") {
            Document::Kernel(from_str(text)?)
        } else if has("caps") {
            Document::Capped(from_str(text)?)
        } else {
            Document::Grope(from_str(text)?)
        })
    }

    pub fn to_canonical(&self) -> String {
        match self {
            Document::Grope(g) => to_canonical(g),
            Document::Capped(c) => to_canonical(c),
            Document::Kernel(k) => to_canonical(k),
        }
    }

    /// The body grope, if the document holds exactly one.
    pub fn grope(&self) -> Option<&Grope> {
        match self {
            Document::Grope(g) => Some(g),
            Document::Capped(c) => Some(&c.body),
            Document::Kernel(_) => None,
        }
    }

    /// The document as a capped grope; a bare grope gets default caps.
    pub fn into_capped(self) -> Option<CappedGrope> {
        match self {
            Document::Grope(g) => Some(CappedGrope::with_default_caps(g)),
            Document::Capped(c) => Some(c),
            Document::Kernel(_) => None,
        }
    }
}
