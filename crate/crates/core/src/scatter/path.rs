use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::sigkit::Label;

/// A sequence of peripheral labels; the empty path is the root.
///
/// Paths order by depth first, then lexicographically by label, which is the
/// breadth-first enumeration order used for every coefficient sum.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Path(Vec<Label>);

impl Path {
    pub fn root() -> Self {
        Path(Vec::new())
    }

    pub fn new(labels: Vec<Label>) -> Self {
        Path(labels)
    }

    pub fn depth(&self) -> usize {
        self.0.len()
    }

    pub fn labels(&self) -> &[Label] {
        &self.0
    }

    pub fn child(&self, label: Label) -> Path {
        let mut labels = self.0.clone();
        labels.push(label);
        Path(labels)
    }

    pub(crate) fn push(&mut self, label: Label) {
        self.0.push(label);
    }

    pub(crate) fn pop(&mut self) {
        self.0.pop();
    }
}

impl Ord for Path {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Path {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "()");
        }
        let parts: Vec<String> = self.0.iter().map(|l| l.to_string()).collect();
        write!(f, "({})", parts.join(" > "))
    }
}
