//! Pass/fail records produced by validators.

use serde::Serialize;
use serde_json::Value;

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct AxiomCheck {
    pub axiom: String,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
}

#[derive(Clone, Debug, Default, Serialize, PartialEq)]
pub struct Validation {
    pub subject: String,
    pub checks: Vec<AxiomCheck>,
}

impl Validation {
    pub fn new(subject: impl Into<String>) -> Self {
        Validation {
            subject: subject.into(),
            checks: Vec::new(),
        }
    }

    pub fn record(&mut self, axiom: &str, witness: Option<Value>) {
        self.checks.push(AxiomCheck {
            axiom: axiom.to_string(),
            pass: witness.is_none(),
            witness,
        });
    }

    pub fn pass(&mut self, axiom: &str) {
        self.record(axiom, None);
    }

    pub fn merge(&mut self, prefix: &str, other: Validation) {
        for mut c in other.checks {
            c.axiom = format!("{prefix}{}", c.axiom);
            self.checks.push(c);
        }
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &AxiomCheck> {
        self.checks.iter().filter(|c| !c.pass)
    }

    pub fn first_failure(&self, axiom_prefix: &str) -> Option<&AxiomCheck> {
        self.failures().find(|c| c.axiom.starts_with(axiom_prefix))
    }
}
