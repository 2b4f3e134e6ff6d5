//! Dense coordinate-component tensors over the rational-function field.

mod metric;
pub mod symmetry;

use std::fmt;
use std::sync::Arc;

use num_rational::BigRational;
use thiserror::Error;

use crate::expr::{ExprError, RationalFunction, VariableContext};

pub use metric::{invert_matrix, Metric};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Variance {
    Up,
    Down,
}

impl Variance {
    pub fn flipped(self) -> Self {
        match self {
            Variance::Up => Variance::Down,
            Variance::Down => Variance::Up,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Valence(pub Vec<Variance>);

impl Valence {
    pub fn all_down(rank: usize) -> Self {
        Valence(vec![Variance::Down; rank])
    }

    pub fn all_up(rank: usize) -> Self {
        Valence(vec![Variance::Up; rank])
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn is_all_down(&self) -> bool {
        self.0.iter().all(|v| *v == Variance::Down)
    }
}

impl fmt::Display for Valence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.0 {
            f.write_str(match v {
                Variance::Up => "^",
                Variance::Down => "_",
            })?;
        }
        Ok(())
    }
}

/// Declared index symmetry. Advisory only: storage is always dense, and the
/// audits in `curvature` check the claim component-wise.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SymmetryTag {
    Symmetric,
    /// Pair antisymmetry and pair exchange in the first four slots.
    Riemann,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TensorError {
    #[error("tensors built over different variable contexts")]
    ContextMismatch,
    #[error("slots {0} and {1} have the same variance; raise or lower one first")]
    SameVariance(usize, usize),
    #[error("slot {slot} out of range for rank {rank}")]
    SlotOutOfRange { slot: usize, rank: usize },
    #[error("expected {expected} components, got {got}")]
    ComponentCount { expected: usize, got: usize },
    #[error("metric is singular (determinant is identically zero)")]
    SingularMetric,
    #[error("metric is not symmetric at ({0}, {1})")]
    NotSymmetric(usize, usize),
    #[error("{0}")]
    Shape(String),
    #[error(transparent)]
    Expr(#[from] ExprError),
}

/// Per-index linear maps in sparse form: `rows[a]` lists `(mu, M[a][mu])`.
pub type SparseRows = Vec<Vec<(usize, RationalFunction)>>;

#[derive(Clone, Debug, PartialEq)]
pub struct Tensor {
    ctx: Arc<VariableContext>,
    valence: Valence,
    components: Vec<RationalFunction>,
    symmetry: Option<SymmetryTag>,
}

pub(crate) fn strides(dim: usize, rank: usize) -> Vec<usize> {
    let mut s = vec![1; rank];
    for i in (0..rank.saturating_sub(1)).rev() {
        s[i] = s[i + 1] * dim;
    }
    s
}

/// Multi-index of a flat position, slot 0 most significant.
pub fn unflatten(mut flat: usize, dim: usize, rank: usize) -> Vec<usize> {
    let mut idx = vec![0; rank];
    for slot in (0..rank).rev() {
        idx[slot] = flat % dim;
        flat /= dim;
    }
    idx
}

pub fn flatten(idx: &[usize], dim: usize) -> usize {
    idx.iter().fold(0, |acc, &i| acc * dim + i)
}

impl Tensor {
    pub fn zeros(ctx: Arc<VariableContext>, valence: Valence) -> Self {
        let n = ctx.dim().pow(valence.rank() as u32);
        let nvars = ctx.nvars();
        Tensor {
            ctx,
            valence,
            components: vec![RationalFunction::zero(nvars); n],
            symmetry: None,
        }
    }

    pub fn from_components(
        ctx: Arc<VariableContext>,
        valence: Valence,
        components: Vec<RationalFunction>,
    ) -> Result<Self, TensorError> {
        let expected = ctx.dim().pow(valence.rank() as u32);
        if components.len() != expected {
            return Err(TensorError::ComponentCount {
                expected,
                got: components.len(),
            });
        }
        Ok(Tensor {
            ctx,
            valence,
            components,
            symmetry: None,
        })
    }

    /// Kronecker delta δ^a_b.
    pub fn identity(ctx: Arc<VariableContext>) -> Self {
        let dim = ctx.dim();
        let nvars = ctx.nvars();
        let mut t = Tensor::zeros(ctx, Valence(vec![Variance::Up, Variance::Down]));
        for a in 0..dim {
            t.components[a * dim + a] = RationalFunction::one(nvars);
        }
        t
    }

    pub fn with_symmetry(mut self, tag: SymmetryTag) -> Self {
        self.symmetry = Some(tag);
        self
    }

    pub fn symmetry(&self) -> Option<SymmetryTag> {
        self.symmetry
    }

    pub fn ctx(&self) -> &Arc<VariableContext> {
        &self.ctx
    }

    pub fn valence(&self) -> &Valence {
        &self.valence
    }

    pub fn rank(&self) -> usize {
        self.valence.rank()
    }

    pub fn dim(&self) -> usize {
        self.ctx.dim()
    }

    pub fn components(&self) -> &[RationalFunction] {
        &self.components
    }

    pub fn into_components(self) -> Vec<RationalFunction> {
        self.components
    }

    pub fn get(&self, idx: &[usize]) -> &RationalFunction {
        &self.components[flatten(idx, self.dim())]
    }

    pub fn set(&mut self, idx: &[usize], value: RationalFunction) {
        let f = flatten(idx, self.dim());
        self.components[f] = value;
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(|c| c.is_zero())
    }

    pub fn nonzero_count(&self) -> usize {
        self.components.iter().filter(|c| !c.is_zero()).count()
    }

    fn check_ctx(&self, other: &Tensor) -> Result<(), TensorError> {
        if Arc::ptr_eq(&self.ctx, &other.ctx) || *self.ctx == *other.ctx {
            Ok(())
        } else {
            Err(TensorError::ContextMismatch)
        }
    }

    fn check_slot(&self, slot: usize) -> Result<(), TensorError> {
        if slot < self.rank() {
            Ok(())
        } else {
            Err(TensorError::SlotOutOfRange {
                slot,
                rank: self.rank(),
            })
        }
    }

    pub fn add(&self, other: &Tensor) -> Result<Tensor, TensorError> {
        self.check_ctx(other)?;
        if self.valence != other.valence {
            return Err(TensorError::Shape("valence mismatch in sum".into()));
        }
        Ok(Tensor {
            ctx: self.ctx.clone(),
            valence: self.valence.clone(),
            components: self
                .components
                .iter()
                .zip(&other.components)
                .map(|(a, b)| a + b)
                .collect(),
            symmetry: None,
        })
    }

    pub fn scale(&self, c: &RationalFunction) -> Tensor {
        Tensor {
            ctx: self.ctx.clone(),
            valence: self.valence.clone(),
            components: self.components.iter().map(|x| x * c).collect(),
            symmetry: self.symmetry,
        }
    }

    /// `(T ⊗ S)_{I J} = T_I S_J`, valences concatenated.
    pub fn tensor_product(&self, other: &Tensor) -> Result<Tensor, TensorError> {
        self.check_ctx(other)?;
        let mut valence = self.valence.0.clone();
        valence.extend_from_slice(&other.valence.0);
        let mut components = Vec::with_capacity(self.components.len() * other.components.len());
        let zero = RationalFunction::zero(self.ctx.nvars());
        for a in &self.components {
            if a.is_zero() {
                components.extend(std::iter::repeat_n(zero.clone(), other.components.len()));
                continue;
            }
            components.extend(other.components.iter().map(|b| a * b));
        }
        Ok(Tensor {
            ctx: self.ctx.clone(),
            valence: Valence(valence),
            components,
            symmetry: None,
        })
    }

    /// Sums over a pair of slots of opposite variance.
    pub fn contract(&self, i: usize, j: usize) -> Result<Tensor, TensorError> {
        self.check_slot(i)?;
        self.check_slot(j)?;
        if i == j || self.valence.0[i] == self.valence.0[j] {
            return Err(TensorError::SameVariance(i, j));
        }
        let dim = self.dim();
        let rank = self.rank();
        let (lo, hi) = (i.min(j), i.max(j));
        let valence: Vec<Variance> = self
            .valence
            .0
            .iter()
            .enumerate()
            .filter(|(s, _)| *s != lo && *s != hi)
            .map(|(_, v)| *v)
            .collect();
        let out_rank = rank - 2;
        let n = dim.pow(out_rank as u32);
        let mut components = Vec::with_capacity(n);
        let mut full = vec![0; rank];
        for flat in 0..n {
            let idx = unflatten(flat, dim, out_rank);
            let mut k = 0;
            for (s, slot) in full.iter_mut().enumerate() {
                if s == lo || s == hi {
                    continue;
                }
                *slot = idx[k];
                k += 1;
            }
            let mut acc = RationalFunction::zero(self.ctx.nvars());
            for d in 0..dim {
                full[lo] = d;
                full[hi] = d;
                let c = self.get(&full);
                if !c.is_zero() {
                    acc = &acc + c;
                }
            }
            components.push(acc);
        }
        Ok(Tensor {
            ctx: self.ctx.clone(),
            valence: Valence(valence),
            components,
            symmetry: None,
        })
    }

    /// Applies `rows` to one slot: `T'(.., a, ..) = Σ_mu rows[a][mu] T(.., mu, ..)`.
    pub fn transform_slot(&self, slot: usize, rows: &SparseRows, variance: Variance) -> Tensor {
        let dim = self.dim();
        let rank = self.rank();
        let stride = strides(dim, rank)[slot];
        let nvars = self.ctx.nvars();
        let mut components = Vec::with_capacity(self.components.len());
        for flat in 0..self.components.len() {
            let a = (flat / stride) % dim;
            let base = flat - a * stride;
            let mut acc = RationalFunction::zero(nvars);
            for (mu, coeff) in &rows[a] {
                let c = &self.components[base + mu * stride];
                if !c.is_zero() {
                    acc = &acc + &(coeff * c);
                }
            }
            components.push(acc);
        }
        let mut valence = self.valence.clone();
        valence.0[slot] = variance;
        Tensor {
            ctx: self.ctx.clone(),
            valence,
            components,
            symmetry: self.symmetry,
        }
    }

    /// Flips the variance of one slot with `g` or its inverse.
    pub fn raise_lower(&self, slot: usize, metric: &Metric) -> Result<Tensor, TensorError> {
        self.check_slot(slot)?;
        Ok(match self.valence.0[slot] {
            Variance::Down => self.transform_slot(slot, metric.inverse_rows(), Variance::Up),
            Variance::Up => self.transform_slot(slot, metric.rows(), Variance::Down),
        })
    }

    pub fn raise_all(&self, metric: &Metric) -> Tensor {
        let mut t = self.clone();
        for slot in 0..self.rank() {
            if t.valence.0[slot] == Variance::Down {
                t = t.transform_slot(slot, metric.inverse_rows(), Variance::Up);
            }
        }
        t
    }

    pub fn lower_all(&self, metric: &Metric) -> Tensor {
        let mut t = self.clone();
        for slot in 0..self.rank() {
            if t.valence.0[slot] == Variance::Up {
                t = t.transform_slot(slot, metric.rows(), Variance::Down);
            }
        }
        t
    }

    /// Full metric pairing `⟨T, S⟩ = T_I S^I` over all slots.
    pub fn full_contraction(&self, other: &Tensor, metric: &Metric) -> Result<RationalFunction, TensorError> {
        self.check_ctx(other)?;
        if self.rank() != other.rank() {
            return Err(TensorError::Shape("full contraction needs equal ranks".into()));
        }
        let mut s = other.clone();
        for slot in 0..self.rank() {
            if s.valence.0[slot] == self.valence.0[slot] {
                s = s.raise_lower(slot, metric)?;
            }
        }
        Ok(dot(&self.components, &s.components, self.ctx.nvars()))
    }

    /// Exact values of every component at a point.
    pub fn evaluate(&self, point: &[Option<BigRational>]) -> Result<Vec<BigRational>, ExprError> {
        self.components.iter().map(|c| c.evaluate(point)).collect()
    }
}

pub(crate) fn dot(a: &[RationalFunction], b: &[RationalFunction], nvars: usize) -> RationalFunction {
    let mut acc = RationalFunction::zero(nvars);
    for (x, y) in a.iter().zip(b) {
        if !x.is_zero() && !y.is_zero() {
            acc = &acc + &(x * y);
        }
    }
    acc
}
