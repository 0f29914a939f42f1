use serde::{Deserialize, Serialize};

use super::Formula;

/// Insertion-ordered set of formulas; membership is up to renaming of the
/// bound variable.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FormulaSet {
    items: Vec<Formula>,
}

impl FormulaSet {
    pub fn new() -> Self {
        FormulaSet::default()
    }

    /// Adds `f` unless an alpha-equal formula is present. Returns whether it
    /// was added.
    pub fn insert(&mut self, f: Formula) -> bool {
        if self.contains(&f) {
            return false;
        }
        self.items.push(f);
        true
    }

    pub fn contains(&self, f: &Formula) -> bool {
        self.position(f).is_some()
    }

    pub fn position(&self, f: &Formula) -> Option<usize> {
        let key = f.alpha_normal();
        self.items.iter().position(|g| g.alpha_normal() == key)
    }

    pub fn remove(&mut self, f: &Formula) -> Option<Formula> {
        self.position(f).map(|i| self.items.remove(i))
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Formula> {
        self.items.iter()
    }

    pub fn as_slice(&self) -> &[Formula] {
        &self.items
    }

    pub fn get(&self, i: usize) -> Option<&Formula> {
        self.items.get(i)
    }

    /// Same members, ignoring order.
    pub fn same_members(&self, other: &FormulaSet) -> bool {
        self.len() == other.len() && self.iter().all(|f| other.contains(f))
    }
}

impl FromIterator<Formula> for FormulaSet {
    fn from_iter<I: IntoIterator<Item = Formula>>(iter: I) -> Self {
        let mut set = FormulaSet::new();
        for f in iter {
            set.insert(f);
        }
        set
    }
}

impl Extend<Formula> for FormulaSet {
    fn extend<I: IntoIterator<Item = Formula>>(&mut self, iter: I) {
        for f in iter {
            self.insert(f);
        }
    }
}

impl IntoIterator for FormulaSet {
    type Item = Formula;
    type IntoIter = std::vec::IntoIter<Formula>;

    fn into_iter(self) -> Self::IntoIter {
        self.items.into_iter()
    }
}

impl<'a> IntoIterator for &'a FormulaSet {
    type Item = &'a Formula;
    type IntoIter = std::slice::Iter<'a, Formula>;

    fn into_iter(self) -> Self::IntoIter {
        self.items.iter()
    }
}
