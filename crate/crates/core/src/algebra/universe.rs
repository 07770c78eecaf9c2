use std::collections::BTreeSet;
use std::sync::Arc;

use super::AlgebraError;

/// Ordered variable names: parameters first, then fiber variables.
///
/// Exponent vectors of every [`Polynomial`](super::Polynomial) over a universe
/// have length `params.len() + fibers.len()` and follow this order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct VarUniverse {
    params: Vec<String>,
    fibers: Vec<String>,
    exceptional: BTreeSet<String>,
}

fn valid_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_') && name != "i"
}

impl VarUniverse {
    pub fn new<S: Into<String>>(
        params: impl IntoIterator<Item = S>,
        fibers: impl IntoIterator<Item = S>,
    ) -> Result<Arc<Self>, AlgebraError> {
        Self::with_exceptional(params, fibers, std::iter::empty::<String>())
    }

    pub fn with_exceptional<S: Into<String>, E: Into<String>>(
        params: impl IntoIterator<Item = S>,
        fibers: impl IntoIterator<Item = S>,
        exceptional: impl IntoIterator<Item = E>,
    ) -> Result<Arc<Self>, AlgebraError> {
        let params: Vec<String> = params.into_iter().map(Into::into).collect();
        let fibers: Vec<String> = fibers.into_iter().map(Into::into).collect();
        let exceptional: BTreeSet<String> = exceptional.into_iter().map(Into::into).collect();
        let mut seen = BTreeSet::new();
        for name in params.iter().chain(&fibers) {
            if !valid_identifier(name) {
                return Err(AlgebraError::InvalidUniverse(format!("invalid variable name {name:?}")));
            }
            if !seen.insert(name.as_str()) {
                return Err(AlgebraError::InvalidUniverse(format!("duplicate variable name {name:?}")));
            }
        }
        for e in &exceptional {
            if !params.contains(e) {
                return Err(AlgebraError::InvalidUniverse(format!(
                    "exceptional variable {e:?} is not a parameter"
                )));
            }
        }
        Ok(Arc::new(VarUniverse { params, fibers, exceptional }))
    }

    pub fn params(&self) -> &[String] {
        &self.params
    }

    pub fn fibers(&self) -> &[String] {
        &self.fibers
    }

    pub fn exceptional(&self) -> &BTreeSet<String> {
        &self.exceptional
    }

    pub fn len(&self) -> usize {
        self.params.len() + self.fibers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn param_count(&self) -> usize {
        self.params.len()
    }

    pub fn name(&self, idx: usize) -> &str {
        if idx < self.params.len() {
            &self.params[idx]
        } else {
            &self.fibers[idx - self.params.len()]
        }
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.params
            .iter()
            .position(|p| p == name)
            .or_else(|| self.fibers.iter().position(|f| f == name).map(|k| k + self.params.len()))
    }

    pub fn is_param(&self, idx: usize) -> bool {
        idx < self.params.len()
    }

    pub fn is_exceptional(&self, name: &str) -> bool {
        self.exceptional.contains(name)
    }

    /// Same parameters with a different fiber list.
    pub fn with_fibers<S: Into<String>>(&self, fibers: impl IntoIterator<Item = S>) -> Result<Arc<Self>, AlgebraError> {
        Self::with_exceptional(self.params.clone(), fibers.into_iter().map(Into::into).collect::<Vec<String>>(), self.exceptional.clone())
    }

    /// The parameter-only universe underlying this one.
    pub fn params_only(&self) -> Arc<Self> {
        Arc::new(VarUniverse { params: self.params.clone(), fibers: Vec::new(), exceptional: self.exceptional.clone() })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_names() {
        assert!(VarUniverse::new(["x", "x"], []).is_err());
        assert!(VarUniverse::new(["x"], ["x"]).is_err());
        assert!(VarUniverse::new(["i"], []).is_err());
        assert!(VarUniverse::new(["2x"], []).is_err());
        assert!(VarUniverse::with_exceptional(["x"], ["X"], ["X"]).is_err());
    }

    #[test]
    fn indexing() {
        let u = VarUniverse::new(["x", "y"], ["X", "Y"]).unwrap();
        assert_eq!(u.index_of("X"), Some(2));
        assert_eq!(u.name(3), "Y");
        assert!(u.is_param(1) && !u.is_param(2));
    }
}
