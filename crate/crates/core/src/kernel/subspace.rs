use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A non-empty set of attribute dimensions with uniform weights `1/|D|`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Subspace(Vec<usize>);

impl Subspace {
    /// Builds a subspace from dimension indices; duplicates are merged.
    /// Every index must be below `attribute_count`.
    pub fn new(dims: impl IntoIterator<Item = usize>, attribute_count: usize) -> Result<Self> {
        let subspace = Subspace::try_from(dims.into_iter().collect::<Vec<_>>())?;
        if let Some(&last) = subspace.0.last() {
            if last >= attribute_count {
                return Err(Error::Subspace(format!(
                    "dimension {last} out of range for {attribute_count} attributes"
                )));
            }
        }
        Ok(subspace)
    }

    pub fn dims(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    /// Always false; kept for API symmetry with `len`.
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, dim: usize) -> bool {
        self.0.binary_search(&dim).is_ok()
    }

    /// Weight of `dim` in the subspace vector.
    pub fn weight(&self, dim: usize) -> f64 {
        if self.contains(dim) {
            1.0 / self.0.len() as f64
        } else {
            0.0
        }
    }

    pub fn with(&self, dim: usize) -> Subspace {
        let mut dims = self.0.clone();
        if let Err(pos) = dims.binary_search(&dim) {
            dims.insert(pos, dim);
        }
        Subspace(dims)
    }

    /// `None` when removal would leave the subspace empty.
    pub fn without(&self, dim: usize) -> Option<Subspace> {
        let dims: Vec<usize> = self.0.iter().copied().filter(|&d| d != dim).collect();
        (!dims.is_empty()).then_some(Subspace(dims))
    }

    pub fn contains_all(&self, dims: &[usize]) -> bool {
        dims.iter().all(|&d| self.contains(d))
    }

    pub fn is_superset_of(&self, other: &Subspace) -> bool {
        self.contains_all(&other.0)
    }

    pub fn jaccard(&self, other: &Subspace) -> f64 {
        crate::jaccard_sorted(&self.0, &other.0)
    }
}

impl TryFrom<Vec<usize>> for Subspace {
    type Error = Error;

    fn try_from(mut dims: Vec<usize>) -> Result<Self> {
        dims.sort_unstable();
        dims.dedup();
        if dims.is_empty() {
            return Err(Error::Subspace("a subspace needs at least one dimension".into()));
        }
        Ok(Subspace(dims))
    }
}

impl From<Subspace> for Vec<usize> {
    fn from(s: Subspace) -> Self {
        s.0
    }
}

impl fmt::Display for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, d) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{d}")?;
        }
        write!(f, "}}")
    }
}
