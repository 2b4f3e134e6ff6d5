//! Index bookkeeping for tensors whose first four slots carry the algebraic
//! symmetries of a curvature tensor: `T_{abcd..} = -T_{bacd..} = -T_{abdc..} = T_{cdab..}`.

/// Canonical representatives of the first four slots.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RiemannIndex {
    dim: usize,
    pairs: Vec<(usize, usize)>,
    /// `(P, Q)` pair-of-pair indices with `P <= Q`.
    reps: Vec<(usize, usize)>,
}

impl RiemannIndex {
    pub fn new(dim: usize) -> Self {
        let mut pairs = Vec::new();
        for a in 0..dim {
            for b in a + 1..dim {
                pairs.push((a, b));
            }
        }
        let np = pairs.len();
        let mut reps = Vec::new();
        for p in 0..np {
            for q in p..np {
                reps.push((p, q));
            }
        }
        RiemannIndex { dim, pairs, reps }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }

    /// `(a, b, c, d)` of the `r`-th representative.
    pub fn indices(&self, r: usize) -> [usize; 4] {
        let (p, q) = self.reps[r];
        let (a, b) = self.pairs[p];
        let (c, d) = self.pairs[q];
        [a, b, c, d]
    }

    fn pair_index(&self, a: usize, b: usize) -> usize {
        // Position of (a, b), a < b, in lexicographic order.
        let n = self.dim;
        a * (2 * n - a - 1) / 2 + (b - a - 1)
    }

    /// Representative number and sign for arbitrary first-four indices;
    /// `None` when the component vanishes by antisymmetry.
    pub fn canonical(&self, a: usize, b: usize, c: usize, d: usize) -> Option<(usize, i8)> {
        if a == b || c == d {
            return None;
        }
        let mut sign = 1i8;
        let (a, b) = if a < b { (a, b) } else { sign = -sign; (b, a) };
        let (c, d) = if c < d { (c, d) } else { sign = -sign; (d, c) };
        let p = self.pair_index(a, b);
        let q = self.pair_index(c, d);
        let (p, q) = if p <= q { (p, q) } else { (q, p) };
        let np = self.pairs.len();
        // Row-major offset in the upper triangle (diagonal included).
        Some((p * np - p * p.saturating_sub(1) / 2 + (q - p), sign))
    }

    /// How many full components a representative stands for (all nonzero
    /// orderings of its index set under the symmetries).
    pub fn multiplicity(&self, r: usize) -> usize {
        let (p, q) = self.reps[r];
        if p == q {
            4
        } else {
            8
        }
    }
}
