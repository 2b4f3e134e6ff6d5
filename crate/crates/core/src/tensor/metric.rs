use std::sync::Arc;

use crate::expr::{RationalFunction, VariableContext};

use super::{SparseRows, Tensor, TensorError, Valence, Variance};

/// A nondegenerate symmetric `(0,2)` tensor together with its inverse.
#[derive(Clone, Debug)]
pub struct Metric {
    g: Tensor,
    inverse: Tensor,
    det: RationalFunction,
    rows: SparseRows,
    inverse_rows: SparseRows,
}

fn sparse_rows(t: &Tensor) -> SparseRows {
    let dim = t.dim();
    (0..dim)
        .map(|a| {
            (0..dim)
                .filter_map(|b| {
                    let c = t.get(&[a, b]);
                    (!c.is_zero()).then(|| (b, c.clone()))
                })
                .collect()
        })
        .collect()
}

impl Metric {
    pub fn new(g: Tensor) -> Result<Self, TensorError> {
        if g.rank() != 2 || !g.valence().is_all_down() {
            return Err(TensorError::Shape("metric must be a (0,2) tensor".into()));
        }
        let dim = g.dim();
        for a in 0..dim {
            for b in a + 1..dim {
                if g.get(&[a, b]) != g.get(&[b, a]) {
                    return Err(TensorError::NotSymmetric(a, b));
                }
            }
        }
        let matrix: Vec<Vec<RationalFunction>> = (0..dim)
            .map(|a| (0..dim).map(|b| g.get(&[a, b]).clone()).collect())
            .collect();
        let (inv, det) = invert_matrix(&matrix, g.ctx().nvars()).ok_or(TensorError::SingularMetric)?;
        let inverse = Tensor::from_components(
            g.ctx().clone(),
            Valence::all_up(2),
            inv.into_iter().flatten().collect(),
        )?;
        let rows = sparse_rows(&g);
        let inverse_rows = sparse_rows(&inverse);
        Ok(Metric {
            g: g.with_symmetry(super::SymmetryTag::Symmetric),
            inverse: inverse.with_symmetry(super::SymmetryTag::Symmetric),
            det,
            rows,
            inverse_rows,
        })
    }

    /// Builds the metric from lower-triangular entries `entries[a][b]`, `b <= a`.
    pub fn from_lower_triangle(
        ctx: Arc<VariableContext>,
        entries: &[Vec<RationalFunction>],
    ) -> Result<Self, TensorError> {
        let dim = ctx.dim();
        if entries.len() != dim || entries.iter().enumerate().any(|(a, r)| r.len() < a + 1) {
            return Err(TensorError::Shape(format!(
                "metric needs {dim} rows with at least row-index + 1 entries"
            )));
        }
        let mut g = Tensor::zeros(ctx, Valence::all_down(2));
        for (a, row) in entries.iter().enumerate() {
            for (b, v) in row.iter().enumerate().take(a + 1) {
                g.set(&[a, b], v.clone());
                g.set(&[b, a], v.clone());
            }
        }
        Metric::new(g)
    }

    pub fn ctx(&self) -> &Arc<VariableContext> {
        self.g.ctx()
    }

    pub fn dim(&self) -> usize {
        self.g.dim()
    }

    pub fn g(&self) -> &Tensor {
        &self.g
    }

    pub fn inverse(&self) -> &Tensor {
        &self.inverse
    }

    pub fn det(&self) -> &RationalFunction {
        &self.det
    }

    pub fn rows(&self) -> &SparseRows {
        &self.rows
    }

    pub fn inverse_rows(&self) -> &SparseRows {
        &self.inverse_rows
    }

    pub fn component(&self, a: usize, b: usize) -> &RationalFunction {
        self.g.get(&[a, b])
    }

    pub fn inverse_component(&self, a: usize, b: usize) -> &RationalFunction {
        self.inverse.get(&[a, b])
    }

    /// `g(x, y)` for vectors given by coordinate components.
    pub fn pair(&self, x: &[RationalFunction], y: &[RationalFunction]) -> RationalFunction {
        let mut acc = RationalFunction::zero(self.ctx().nvars());
        for (a, row) in self.rows.iter().enumerate() {
            if x[a].is_zero() {
                continue;
            }
            for (b, gab) in row {
                if !y[*b].is_zero() {
                    acc = &acc + &(&(&x[a] * gab) * &y[*b]);
                }
            }
        }
        acc
    }

    /// Index-lowered components `g_ab x^b`.
    pub fn lower(&self, x: &[RationalFunction]) -> Vec<RationalFunction> {
        apply_rows(&self.rows, x, self.ctx().nvars())
    }

    /// Index-raised components `g^ab w_b`.
    pub fn raise(&self, w: &[RationalFunction]) -> Vec<RationalFunction> {
        apply_rows(&self.inverse_rows, w, self.ctx().nvars())
    }

    pub fn valence_of_inverse(&self) -> Valence {
        Valence(vec![Variance::Up, Variance::Up])
    }
}

pub(crate) fn apply_rows(rows: &SparseRows, x: &[RationalFunction], nvars: usize) -> Vec<RationalFunction> {
    rows.iter()
        .map(|row| {
            let mut acc = RationalFunction::zero(nvars);
            for (b, m) in row {
                if !x[*b].is_zero() {
                    acc = &acc + &(m * &x[*b]);
                }
            }
            acc
        })
        .collect()
}

fn complexity(f: &RationalFunction) -> usize {
    f.numerator().len() + f.denominator().len()
}

/// Gauss–Jordan inverse and determinant over the rational-function field.
/// Returns `None` for a singular matrix.
pub fn invert_matrix(
    matrix: &[Vec<RationalFunction>],
    nvars: usize,
) -> Option<(Vec<Vec<RationalFunction>>, RationalFunction)> {
    let n = matrix.len();
    let mut a: Vec<Vec<RationalFunction>> = matrix.to_vec();
    let mut inv: Vec<Vec<RationalFunction>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        RationalFunction::one(nvars)
                    } else {
                        RationalFunction::zero(nvars)
                    }
                })
                .collect()
        })
        .collect();
    let mut det = RationalFunction::one(nvars);
    for col in 0..n {
        let pivot = (col..n)
            .filter(|&r| !a[r][col].is_zero())
            .min_by_key(|&r| complexity(&a[r][col]))?;
        if pivot != col {
            a.swap(pivot, col);
            inv.swap(pivot, col);
            det = -&det;
        }
        let p = a[col][col].clone();
        det = &det * &p;
        let pinv = p.recip().expect("pivot is nonzero");
        for j in 0..n {
            if !a[col][j].is_zero() {
                a[col][j] = &a[col][j] * &pinv;
            }
            if !inv[col][j].is_zero() {
                inv[col][j] = &inv[col][j] * &pinv;
            }
        }
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let f = a[r][col].clone();
            for j in 0..n {
                if !a[col][j].is_zero() {
                    let t = &f * &a[col][j];
                    a[r][j] = &a[r][j] - &t;
                }
                if !inv[col][j].is_zero() {
                    let t = &f * &inv[col][j];
                    inv[r][j] = &inv[r][j] - &t;
                }
            }
        }
    }
    Some((inv, det))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_expression;

    fn build(coords: &[&str], sig: (usize, usize), lower: &[&[&str]]) -> Metric {
        let ctx = Arc::new(VariableContext::new(coords, &[], sig).unwrap());
        let entries: Vec<Vec<RationalFunction>> = lower
            .iter()
            .map(|row| row.iter().map(|s| parse_expression(s, &ctx).unwrap()).collect())
            .collect();
        Metric::from_lower_triangle(ctx, &entries).unwrap()
    }

    fn assert_inverse(m: &Metric) {
        let n = m.dim();
        for a in 0..n {
            for c in 0..n {
                let mut acc = RationalFunction::zero(m.ctx().nvars());
                for b in 0..n {
                    acc = &acc + &(m.component(a, b) * m.inverse_component(b, c));
                }
                let want = if a == c { 1 } else { 0 };
                assert_eq!(acc, RationalFunction::from_int(m.ctx().nvars(), want));
            }
        }
    }

    #[test]
    fn diagonal_inverse() {
        let m = build(&["x", "y"], (0, 2), &[&["1"], &["0", "x^2"]]);
        assert_eq!(m.det().to_owned(), parse_expression("x^2", m.ctx()).unwrap());
        assert_eq!(
            *m.inverse_component(1, 1),
            parse_expression("1/x^2", m.ctx()).unwrap()
        );
        assert_inverse(&m);
    }

    #[test]
    fn walker_form_inverse() {
        // 2du(dv + A du + C dU) + 2dU(dV + B dU) with polynomial A, B, C.
        let m = build(
            &["u", "v", "U", "V"],
            (2, 0),
            &[
                &["2*(v^2 + U)"],
                &["1", "0"],
                &["v*U", "0", "2*v^4"],
                &["0", "0", "1", "0"],
            ],
        );
        assert_inverse(&m);
        assert_eq!(*m.det(), RationalFunction::from_int(m.ctx().nvars(), 1));
    }

    #[test]
    fn singular_metric_rejected() {
        let ctx = Arc::new(VariableContext::new(&["x", "y"], &[], (0, 2)).unwrap());
        let one = RationalFunction::one(2);
        let entries = vec![vec![one.clone()], vec![one.clone(), one]];
        assert!(matches!(
            Metric::from_lower_triangle(ctx, &entries),
            Err(TensorError::SingularMetric)
        ));
    }
}
