use std::collections::HashMap;
use std::fmt;

use super::ExprError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum SymbolKind {
    Coordinate,
    Parameter,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Symbol {
    name: String,
    kind: SymbolKind,
}

impl Symbol {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> SymbolKind {
        self.kind
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

/// The ordered set of symbols a family of expressions lives over.
///
/// Coordinates occupy variable slots `0..dim` and parameters follow, so the
/// exponent vector of every polynomial built against this context has
/// `dim + parameter count` entries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VariableContext {
    symbols: Vec<Symbol>,
    dim: usize,
    signature: (usize, usize),
    index: HashMap<String, usize>,
}

impl VariableContext {
    /// Builds a context for signature `(k, k+m)`; `signature` is the pair `(k, m)`.
    pub fn new<S: AsRef<str>>(
        coordinates: &[S],
        parameters: &[S],
        signature: (usize, usize),
    ) -> Result<Self, ExprError> {
        let (k, m) = signature;
        if coordinates.len() != 2 * k + m {
            return Err(ExprError::Context(format!(
                "signature ({k}, {m}) needs {} coordinates, got {}",
                2 * k + m,
                coordinates.len()
            )));
        }
        let mut symbols = Vec::with_capacity(coordinates.len() + parameters.len());
        let mut index = HashMap::new();
        let all = coordinates
            .iter()
            .map(|c| (c.as_ref(), SymbolKind::Coordinate))
            .chain(parameters.iter().map(|p| (p.as_ref(), SymbolKind::Parameter)));
        for (name, kind) in all {
            if !is_identifier(name) {
                return Err(ExprError::Context(format!("'{name}' is not a valid identifier")));
            }
            if index.insert(name.to_string(), symbols.len()).is_some() {
                return Err(ExprError::Context(format!("duplicate symbol '{name}'")));
            }
            symbols.push(Symbol {
                name: name.to_string(),
                kind,
            });
        }
        Ok(VariableContext {
            symbols,
            dim: coordinates.len(),
            signature,
            index,
        })
    }

    /// Number of coordinates, `2k + m`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Total number of variable slots (coordinates then parameters).
    pub fn nvars(&self) -> usize {
        self.symbols.len()
    }

    pub fn signature(&self) -> (usize, usize) {
        self.signature
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn symbol(&self, var: usize) -> &Symbol {
        &self.symbols[var]
    }

    pub fn lookup(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn coordinate_names(&self) -> Vec<&str> {
        self.symbols[..self.dim].iter().map(|s| s.name()).collect()
    }

    pub fn parameter_names(&self) -> Vec<&str> {
        self.symbols[self.dim..].iter().map(|s| s.name()).collect()
    }

    /// Variable slot of a coordinate; errors on parameters and unknown names.
    pub fn coordinate(&self, name: &str) -> Result<usize, ExprError> {
        match self.lookup(name) {
            Some(i) if i < self.dim => Ok(i),
            Some(_) => Err(ExprError::ParameterDerivative(name.to_string())),
            None => Err(ExprError::UnknownIdentifier {
                name: name.to_string(),
                offset: 0,
            }),
        }
    }
}

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}
