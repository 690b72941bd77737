use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AttributeKind {
    Numerical,
    Binary,
    Categorical,
}

/// One attribute dimension.
///
/// Values are stored as `f64` in the graph's attribute matrix: numerical
/// values min-max normalized to `[0, 1]`, binary values as `0.0`/`1.0`, and
/// categorical values as the index of the value in `domain`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dimension {
    pub name: String,
    pub kind: AttributeKind,
    /// Categorical value list. Empty for the other kinds.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub domain: Vec<String>,
    /// Observed `[min, max]` of a numerical dimension before normalization.
    /// Filled by the loader; ignored on input.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub range: Option<[f64; 2]>,
}

impl Dimension {
    pub fn numerical(name: impl Into<String>) -> Self {
        Dimension {
            name: name.into(),
            kind: AttributeKind::Numerical,
            domain: Vec::new(),
            range: None,
        }
    }

    pub fn binary(name: impl Into<String>) -> Self {
        Dimension {
            name: name.into(),
            kind: AttributeKind::Binary,
            domain: Vec::new(),
            range: None,
        }
    }

    pub fn categorical<S: Into<String>>(name: impl Into<String>, domain: impl IntoIterator<Item = S>) -> Self {
        Dimension {
            name: name.into(),
            kind: AttributeKind::Categorical,
            domain: domain.into_iter().map(Into::into).collect(),
            range: None,
        }
    }

    /// Index of a categorical value in the domain.
    pub fn category_index(&self, value: &str) -> Option<usize> {
        self.domain.iter().position(|v| v == value)
    }
}

/// Typed description of the attribute dimensions of a graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttributeSchema {
    /// When set, two binary values that are both `0` count as identical.
    /// The default treats only shared presence (`1`, `1`) as identical.
    #[serde(default)]
    pub binary_absence_similar: bool,
    pub dims: Vec<Dimension>,
}

impl AttributeSchema {
    pub fn new(dims: Vec<Dimension>) -> Result<Self> {
        let schema = AttributeSchema {
            binary_absence_similar: false,
            dims,
        };
        schema.validate()?;
        Ok(schema)
    }

    /// A schema of `r` dimensions of one kind, named `a0..a{r-1}`.
    /// Categorical dimensions get the domain `c0..c{categories-1}`.
    pub fn uniform(kind: AttributeKind, r: usize, categories: usize) -> Result<Self> {
        let dims = (0..r)
            .map(|i| {
                let name = format!("a{i}");
                match kind {
                    AttributeKind::Numerical => Dimension::numerical(name),
                    AttributeKind::Binary => Dimension::binary(name),
                    AttributeKind::Categorical => {
                        Dimension::categorical(name, (0..categories).map(|c| format!("c{c}")))
                    }
                }
            })
            .collect();
        Self::new(dims)
    }

    pub fn with_binary_absence_similar(mut self, yes: bool) -> Self {
        self.binary_absence_similar = yes;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.dims.is_empty() {
            return Err(Error::Schema("at least one dimension is required".into()));
        }
        let mut seen = HashSet::new();
        for dim in &self.dims {
            if dim.name.is_empty() || dim.name.chars().any(|c| c.is_whitespace() || c == ',') {
                return Err(Error::Schema(format!(
                    "dimension name {:?} must be non-empty without whitespace or commas",
                    dim.name
                )));
            }
            if !seen.insert(dim.name.as_str()) {
                return Err(Error::Schema(format!("duplicate dimension name `{}`", dim.name)));
            }
            match dim.kind {
                AttributeKind::Categorical => {
                    if dim.domain.is_empty() {
                        return Err(Error::Schema(format!(
                            "categorical dimension `{}` has an empty domain",
                            dim.name
                        )));
                    }
                    let mut values = HashSet::new();
                    for v in &dim.domain {
                        if v.is_empty() || v.contains(['\t', '\n', '\r']) {
                            return Err(Error::Schema(format!(
                                "categorical dimension `{}` has an empty or tab-containing value",
                                dim.name
                            )));
                        }
                        if !values.insert(v.as_str()) {
                            return Err(Error::Schema(format!(
                                "categorical dimension `{}` repeats value {v:?}",
                                dim.name
                            )));
                        }
                    }
                }
                AttributeKind::Numerical | AttributeKind::Binary => {
                    if !dim.domain.is_empty() {
                        return Err(Error::Schema(format!(
                            "only categorical dimensions take a domain (`{}`)",
                            dim.name
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Attribute count `r`.
    pub fn len(&self) -> usize {
        self.dims.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dims.is_empty()
    }

    pub fn dim(&self, index: usize) -> &Dimension {
        &self.dims[index]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.dims.iter().position(|d| d.name == name)
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let schema: AttributeSchema = toml::from_str(text).map_err(|e| Error::Schema(e.to_string()))?;
        schema.validate()?;
        Ok(schema)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("schema serializes to TOML")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toml_round_trip() {
        let schema = AttributeSchema::new(vec![
            Dimension::numerical("age"),
            Dimension::binary("member"),
            Dimension::categorical("field", ["DB", "AI", "ML"]),
        ])
        .unwrap()
        .with_binary_absence_similar(true);
        let text = schema.to_toml();
        assert_eq!(AttributeSchema::from_toml(&text).unwrap(), schema);
    }

    #[test]
    fn parses_hand_written_schema() {
        let text = r#"
[[dims]]
name = "age"
kind = "numerical"

[[dims]]
name = "field"
kind = "categorical"
domain = ["DB", "AI"]
"#;
        let schema = AttributeSchema::from_toml(text).unwrap();
        assert_eq!(schema.len(), 2);
        assert!(!schema.binary_absence_similar);
        assert_eq!(schema.dim(1).category_index("AI"), Some(1));
    }

    #[test]
    fn rejects_bad_schemas() {
        assert!(AttributeSchema::new(vec![]).is_err());
        assert!(AttributeSchema::new(vec![Dimension::numerical("x"), Dimension::binary("x")]).is_err());
        assert!(AttributeSchema::new(vec![Dimension::categorical("c", Vec::<String>::new())]).is_err());
        assert!(AttributeSchema::from_toml("[[dims]]\nname = \"x\"\nkind = \"ordinal\"\n").is_err());
    }
}
