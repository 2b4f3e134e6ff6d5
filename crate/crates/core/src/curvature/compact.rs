use std::sync::Arc;

use num_rational::BigRational;

use crate::expr::{ExprError, RationalFunction, VariableContext};
use crate::tensor::symmetry::RiemannIndex;
use crate::tensor::{flatten, unflatten, SparseRows, Tensor, TensorError, Valence, Variance};

/// A tensor of rank `4 + order` whose first four slots carry the curvature
/// symmetries. Only one representative per symmetry orbit of the first four
/// slots is stored; the remaining `order` slots are dense.
#[derive(Clone, Debug, PartialEq)]
pub struct CurvatureTensor {
    ctx: Arc<VariableContext>,
    index: Arc<RiemannIndex>,
    order: usize,
    variance: Variance,
    data: Vec<RationalFunction>,
}

impl CurvatureTensor {
    pub fn zeros(ctx: Arc<VariableContext>, order: usize, variance: Variance) -> Self {
        let index = Arc::new(RiemannIndex::new(ctx.dim()));
        Self::zeros_with(ctx, index, order, variance)
    }

    pub(crate) fn zeros_with(
        ctx: Arc<VariableContext>,
        index: Arc<RiemannIndex>,
        order: usize,
        variance: Variance,
    ) -> Self {
        let n = index.len() * ctx.dim().pow(order as u32);
        let nvars = ctx.nvars();
        CurvatureTensor {
            ctx,
            index,
            order,
            variance,
            data: vec![RationalFunction::zero(nvars); n],
        }
    }

    pub(crate) fn from_data(
        ctx: Arc<VariableContext>,
        index: Arc<RiemannIndex>,
        order: usize,
        variance: Variance,
        data: Vec<RationalFunction>,
    ) -> Self {
        debug_assert_eq!(data.len(), index.len() * ctx.dim().pow(order as u32));
        CurvatureTensor {
            ctx,
            index,
            order,
            variance,
            data,
        }
    }

    pub fn ctx(&self) -> &Arc<VariableContext> {
        &self.ctx
    }

    pub fn index(&self) -> &Arc<RiemannIndex> {
        &self.index
    }

    pub fn dim(&self) -> usize {
        self.ctx.dim()
    }

    /// Number of slots beyond the first four.
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn rank(&self) -> usize {
        4 + self.order
    }

    pub fn variance(&self) -> Variance {
        self.variance
    }

    pub fn tail_len(&self) -> usize {
        self.dim().pow(self.order as u32)
    }

    /// Stored representatives, laid out as `[rep][tail]`.
    pub fn data(&self) -> &[RationalFunction] {
        &self.data
    }

    pub fn rep(&self, r: usize, tail: usize) -> &RationalFunction {
        &self.data[r * self.tail_len() + tail]
    }

    /// Full multi-index of a stored entry.
    pub fn multi_index(&self, flat: usize) -> Vec<usize> {
        let tl = self.tail_len();
        let mut idx = self.index.indices(flat / tl).to_vec();
        idx.extend(unflatten(flat % tl, self.dim(), self.order));
        idx
    }

    /// Component at an arbitrary multi-index of length `4 + order`.
    pub fn get(&self, idx: &[usize]) -> RationalFunction {
        assert_eq!(idx.len(), self.rank());
        match self.index.canonical(idx[0], idx[1], idx[2], idx[3]) {
            None => RationalFunction::zero(self.ctx.nvars()),
            Some((r, sign)) => {
                let v = self.rep(r, flatten(&idx[4..], self.dim()));
                if sign < 0 {
                    -v
                } else {
                    v.clone()
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|c| c.is_zero())
    }

    pub fn nonzero_count(&self) -> usize {
        self.data.iter().filter(|c| !c.is_zero()).count()
    }

    /// Number of scalar entries of the equivalent dense tensor.
    pub fn dense_len(&self) -> usize {
        self.dim().pow(self.rank() as u32)
    }

    /// Stored entries that are not identically zero, with their full multi-indices.
    pub fn nonzero_entries(&self) -> impl Iterator<Item = (Vec<usize>, &RationalFunction)> {
        self.data
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| (self.multi_index(i), c))
    }

    /// Reads the representatives from a dense tensor. The caller is
    /// responsible for the tensor actually having the symmetries.
    pub fn from_tensor(t: &Tensor) -> Result<Self, TensorError> {
        if t.rank() < 4 {
            return Err(TensorError::Shape("curvature tensors have rank at least 4".into()));
        }
        let variance = t.valence().0[0];
        if t.valence().0.iter().any(|v| *v != variance) {
            return Err(TensorError::Shape("mixed valence is not supported here".into()));
        }
        let order = t.rank() - 4;
        let index = Arc::new(RiemannIndex::new(t.dim()));
        let dim = t.dim();
        let tl = dim.pow(order as u32);
        let mut data = Vec::with_capacity(index.len() * tl);
        for r in 0..index.len() {
            let head = index.indices(r);
            for tail in 0..tl {
                let mut idx = head.to_vec();
                idx.extend(unflatten(tail, dim, order));
                data.push(t.get(&idx).clone());
            }
        }
        Ok(CurvatureTensor {
            ctx: t.ctx().clone(),
            index,
            order,
            variance,
            data,
        })
    }

    pub fn to_tensor(&self) -> Tensor {
        let rank = self.rank();
        let dim = self.dim();
        let n = dim.pow(rank as u32);
        let components = (0..n).map(|f| self.get(&unflatten(f, dim, rank))).collect();
        let valence = Valence(vec![self.variance; rank]);
        Tensor::from_components(self.ctx.clone(), valence, components)
            .expect("component count matches")
    }

    /// Applies the same linear map to every slot:
    /// `T'(A, B, ..) = Σ rows[A][a] rows[B][b] .. T(a, b, ..)`.
    ///
    /// With `rows` the frame vectors this yields frame components; with the
    /// inverse metric it raises every index.
    pub fn transform(&self, rows: &SparseRows, variance: Variance) -> Self {
        let nvars = self.ctx.nvars();
        let dim = self.dim();
        let tl = self.tail_len();
        let nreps = self.index.len();
        let mut data = self.data.clone();
        // Tail slots: ordinary slot-wise transform inside each representative block.
        for slot in 0..self.order {
            let stride = dim.pow((self.order - 1 - slot) as u32);
            let mut next = Vec::with_capacity(data.len());
            for flat in 0..data.len() {
                let t = flat % tl;
                let a = (t / stride) % dim;
                let base = flat - a * stride;
                let mut acc = RationalFunction::zero(nvars);
                for (mu, m) in &rows[a] {
                    let c = &data[base + mu * stride];
                    if !c.is_zero() {
                        acc = &acc + &(m * c);
                    }
                }
                next.push(acc);
            }
            data = next;
        }
        // First four slots as a symmetric matrix over index pairs.
        let pairs: Vec<(usize, usize)> = (0..dim)
            .flat_map(|a| (a + 1..dim).map(move |b| (a, b)))
            .collect();
        let np = pairs.len();
        let bivector = bivector_rows(rows, &pairs, nvars);
        let rep_of = |p: usize, q: usize| -> usize {
            let (p, q) = if p <= q { (p, q) } else { (q, p) };
            p * np - p * p.saturating_sub(1) / 2 + (q - p)
        };
        let mut out = vec![RationalFunction::zero(nvars); nreps * tl];
        for t in 0..tl {
            if (0..nreps).all(|r| data[r * tl + t].is_zero()) {
                continue;
            }
            // half[P][q] = Σ_p M[P][p] T[p][q]
            let mut half = vec![RationalFunction::zero(nvars); np * np];
            for (pp, row) in bivector.iter().enumerate() {
                for q in 0..np {
                    let mut acc = RationalFunction::zero(nvars);
                    for (p, m) in row {
                        let c = &data[rep_of(*p, q) * tl + t];
                        if !c.is_zero() {
                            acc = &acc + &(m * c);
                        }
                    }
                    half[pp * np + q] = acc;
                }
            }
            for pp in 0..np {
                for qq in pp..np {
                    let mut acc = RationalFunction::zero(nvars);
                    for (q, m) in &bivector[qq] {
                        let c = &half[pp * np + q];
                        if !c.is_zero() {
                            acc = &acc + &(m * c);
                        }
                    }
                    out[rep_of(pp, qq) * tl + t] = acc;
                }
            }
        }
        CurvatureTensor {
            ctx: self.ctx.clone(),
            index: self.index.clone(),
            order: self.order,
            variance,
            data: out,
        }
    }

    /// `Σ_I T_I S_I` over every component of the dense tensors, where `self`
    /// and `other` have opposite variance this is the full metric contraction.
    pub fn pairing(&self, other: &CurvatureTensor) -> RationalFunction {
        let tl = self.tail_len();
        let mut acc = RationalFunction::zero(self.ctx.nvars());
        for r in 0..self.index.len() {
            let mut block = RationalFunction::zero(self.ctx.nvars());
            for t in 0..tl {
                let (x, y) = (self.rep(r, t), other.rep(r, t));
                if !x.is_zero() && !y.is_zero() {
                    block = &block + &(x * y);
                }
            }
            if !block.is_zero() {
                acc = &acc + &block.scale_int(self.index.multiplicity(r) as i64);
            }
        }
        acc
    }

    pub fn add(&self, other: &CurvatureTensor) -> CurvatureTensor {
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        CurvatureTensor {
            data,
            ..self.clone()
        }
    }

    pub fn scale(&self, c: &RationalFunction) -> CurvatureTensor {
        CurvatureTensor {
            data: self.data.iter().map(|x| x * c).collect(),
            ..self.clone()
        }
    }

    pub fn evaluate(&self, point: &[Option<BigRational>]) -> Result<Vec<BigRational>, ExprError> {
        self.data.iter().map(|c| c.evaluate(point)).collect()
    }

    /// Replaces one stored entry; for fault-injection tests and oracle plumbing.
    pub fn set_rep(&mut self, flat: usize, value: RationalFunction) {
        self.data[flat] = value;
    }
}

/// `M[(A,B)][(a,b)] = rows[A][a] rows[B][b] - rows[A][b] rows[B][a]` over pairs `a < b`.
pub(crate) fn bivector_rows(rows: &SparseRows, pairs: &[(usize, usize)], nvars: usize) -> SparseRows {
    let np = pairs.len();
    let mut pair_pos = std::collections::HashMap::new();
    for (i, p) in pairs.iter().enumerate() {
        pair_pos.insert(*p, i);
    }
    pairs
        .iter()
        .map(|&(aa, bb)| {
            let mut acc = vec![RationalFunction::zero(nvars); np];
            for (a, x) in &rows[aa] {
                for (b, y) in &rows[bb] {
                    if a == b {
                        continue;
                    }
                    let prod = x * y;
                    if a < b {
                        let i = pair_pos[&(*a, *b)];
                        acc[i] = &acc[i] + &prod;
                    } else {
                        let i = pair_pos[&(*b, *a)];
                        acc[i] = &acc[i] - &prod;
                    }
                }
            }
            acc.into_iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .collect()
        })
        .collect()
}
