//! Diagnostic records shared by the classifier and the validators.

use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Severity {
    Error,
    Warning,
    Info,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Severity::Error => "error",
            Severity::Warning => "warning",
            Severity::Info => "info",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Finding {
    pub severity: Severity,
    pub rule_id: String,
    pub element_path: String,
    pub message: String,
}

impl Finding {
    pub fn new(
        severity: Severity,
        rule_id: &str,
        element_path: impl Into<String>,
        message: impl Into<String>,
    ) -> Self {
        Finding {
            severity,
            rule_id: rule_id.to_string(),
            element_path: element_path.into(),
            message: message.into(),
        }
    }

    pub fn error(rule_id: &str, path: impl Into<String>, message: impl Into<String>) -> Self {
        Finding::new(Severity::Error, rule_id, path, message)
    }

    pub fn warning(rule_id: &str, path: impl Into<String>, message: impl Into<String>) -> Self {
        Finding::new(Severity::Warning, rule_id, path, message)
    }

    pub fn info(rule_id: &str, path: impl Into<String>, message: impl Into<String>) -> Self {
        Finding::new(Severity::Info, rule_id, path, message)
    }
}

impl fmt::Display for Finding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} [{}] {}: {}",
            self.severity, self.rule_id, self.element_path, self.message
        )
    }
}

/// Non-fatal notes produced while parsing a document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseWarning {
    pub path: String,
    pub message: String,
}

impl fmt::Display for ParseWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

/// A parsed value together with the warnings collected on the way.
#[derive(Debug, Clone, PartialEq)]
pub struct Parsed<T> {
    pub value: T,
    pub warnings: Vec<ParseWarning>,
}
