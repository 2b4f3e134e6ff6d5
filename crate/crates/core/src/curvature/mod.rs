//! Levi-Civita connection, the Riemann tensor and its covariant derivatives,
//! the irreducible parts, and the scalar invariants used as VSI witnesses.
//!
//! Sign convention: `R_{abcd} = g_{ae} R^e_{bcd}` with
//! `R^a_{bcd} = ∂_c Γ^a_{bd} − ∂_d Γ^a_{bc} + Γ^a_{ce} Γ^e_{bd} − Γ^a_{de} Γ^e_{bc}`,
//! so that `∇_c ∇_d X^a − ∇_d ∇_c X^a = R^a_{bcd} X^b`. Derivative slots are
//! appended after the four curvature slots: `T_{abcd;e}` is `∇_e T_{abcd}`.

mod compact;
mod invariants;
mod stack;

use std::sync::Arc;

use thiserror::Error;

use crate::expr::{RationalFunction, VariableContext};
use crate::tensor::symmetry::RiemannIndex;
use crate::tensor::{unflatten, Metric, Tensor, TensorError, Valence, Variance};

pub use compact::CurvatureTensor;
pub use invariants::{
    nilpotency_check, operator_invariants, ricci_operator, bivector_operator, self_norm_invariant,
    Witness, WitnessKind,
};
pub use stack::{build_stack, weyl_split, CurvatureStack, DEFAULT_COMPONENT_CAP};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CurvatureError {
    #[error("component cap exceeded: order {order} needs {needed} scalar entries in total, cap is {cap}")]
    ResourceLimit { order: usize, needed: usize, cap: usize },
    #[error("requested order {requested} exceeds the stack order {built}")]
    OrderOutOfRange { requested: usize, built: usize },
    #[error("{0}")]
    Unsupported(String),
    #[error("internal invariant violated: {0}")]
    InvariantViolation(String),
    #[error(transparent)]
    Tensor(#[from] TensorError),
}

/// Christoffel symbols of the Levi-Civita connection of a metric.
#[derive(Clone, Debug)]
pub struct Connection {
    metric: Metric,
    gamma: Tensor,
    lowered: Tensor,
    /// `terms[e][b]` lists `(a, Γ^a_{eb})` for nonzero symbols.
    terms: Vec<Vec<Vec<(usize, RationalFunction)>>>,
}

impl Connection {
    pub fn metric(&self) -> &Metric {
        &self.metric
    }

    pub fn ctx(&self) -> &Arc<VariableContext> {
        self.metric.ctx()
    }

    pub fn dim(&self) -> usize {
        self.metric.dim()
    }

    /// `Γ^a_{bc}` with valence (Up, Down, Down).
    pub fn gamma(&self) -> &Tensor {
        &self.gamma
    }

    /// `Γ_{a,bc} = g_{ad} Γ^d_{bc}`.
    pub fn lowered(&self) -> &Tensor {
        &self.lowered
    }

    pub fn symbol(&self, a: usize, b: usize, c: usize) -> &RationalFunction {
        self.gamma.get(&[a, b, c])
    }

    pub(crate) fn terms(&self, e: usize, b: usize) -> &[(usize, RationalFunction)] {
        &self.terms[e][b]
    }

    pub fn is_flat_connection(&self) -> bool {
        self.gamma.is_zero()
    }
}

/// `Γ^a_{bc} = ½ g^{ad}(g_{db,c} + g_{dc,b} − g_{bc,d})`.
pub fn christoffel(metric: &Metric) -> Connection {
    let ctx = metric.ctx().clone();
    let dim = metric.dim();
    // dg[c][a*dim + b] = ∂_c g_ab
    let dg: Vec<Vec<RationalFunction>> = (0..dim)
        .map(|c| {
            metric
                .g()
                .components()
                .iter()
                .map(|x| x.derivative(c))
                .collect()
        })
        .collect();
    let half = num_rational::BigRational::new(1.into(), 2.into());
    let mut lowered = Tensor::zeros(ctx.clone(), Valence::all_down(3));
    for d in 0..dim {
        for b in 0..dim {
            for c in b..dim {
                let v = &(&dg[c][d * dim + b] + &dg[b][d * dim + c]) - &dg[d][b * dim + c];
                let v = v.scale(&half);
                lowered.set(&[d, b, c], v.clone());
                lowered.set(&[d, c, b], v);
            }
        }
    }
    let gamma = lowered.transform_slot(0, metric.inverse_rows(), Variance::Up);
    let mut terms = vec![vec![Vec::new(); dim]; dim];
    for (e, row) in terms.iter_mut().enumerate() {
        for (b, list) in row.iter_mut().enumerate() {
            for a in 0..dim {
                let v = gamma.get(&[a, e, b]);
                if !v.is_zero() {
                    list.push((a, v.clone()));
                }
            }
        }
    }
    Connection {
        metric: metric.clone(),
        gamma,
        lowered,
        terms,
    }
}

/// Fully lowered Riemann tensor.
///
/// Uses `R_{abcd} = ½(g_{ad,bc} + g_{bc,ad} − g_{ac,bd} − g_{bd,ac})
/// + Γ^e_{bc} Γ_{e,ad} − Γ^e_{bd} Γ_{e,ac}`, evaluated on orbit
/// representatives only.
pub fn riemann(conn: &Connection) -> CurvatureTensor {
    let ctx = conn.ctx().clone();
    let dim = conn.dim();
    let index = Arc::new(RiemannIndex::new(dim));
    let g = conn.metric().g();
    let second = |a: usize, b: usize, x: usize, y: usize| g.get(&[a, b]).derivative(x).derivative(y);
    let half = num_rational::BigRational::new(1.into(), 2.into());
    let mut data = Vec::with_capacity(index.len());
    for r in 0..index.len() {
        let [a, b, c, d] = index.indices(r);
        let mut v = &(&second(a, d, b, c) + &second(b, c, a, d))
            - &(&second(a, c, b, d) + &second(b, d, a, c));
        v = v.scale(&half);
        for e in 0..dim {
            let (x1, y1) = (conn.symbol(e, b, c), conn.lowered().get(&[e, a, d]));
            if !x1.is_zero() && !y1.is_zero() {
                v = &v + &(x1 * y1);
            }
            let (x2, y2) = (conn.symbol(e, b, d), conn.lowered().get(&[e, a, c]));
            if !x2.is_zero() && !y2.is_zero() {
                v = &v - &(x2 * y2);
            }
        }
        data.push(v);
    }
    CurvatureTensor::from_data(ctx, index, 0, Variance::Down, data)
}

/// `∇T` for a fully lowered tensor; the derivative slot is appended last.
pub fn covariant_derivative(t: &Tensor, conn: &Connection) -> Result<Tensor, CurvatureError> {
    if !t.valence().is_all_down() {
        return Err(CurvatureError::Unsupported(
            "covariant derivative expects a fully lowered tensor".into(),
        ));
    }
    let dim = t.dim();
    let rank = t.rank();
    let mut out = Tensor::zeros(t.ctx().clone(), Valence::all_down(rank + 1));
    for flat in 0..t.components().len() {
        let idx = unflatten(flat, dim, rank);
        for e in 0..dim {
            let mut v = t.components()[flat].derivative(e);
            let mut probe = idx.clone();
            for s in 0..rank {
                for (f, gam) in conn.terms(e, idx[s]) {
                    probe[s] = *f;
                    let c = t.get(&probe);
                    if !c.is_zero() {
                        v = &v - &(gam * c);
                    }
                }
                probe[s] = idx[s];
            }
            let mut full = idx.clone();
            full.push(e);
            out.set(&full, v);
        }
    }
    Ok(out)
}

/// `∇T` for a curvature-symmetric tensor, computed on representatives.
pub fn covariant_derivative_curvature(t: &CurvatureTensor, conn: &Connection) -> CurvatureTensor {
    let ctx = t.ctx().clone();
    let dim = t.dim();
    let order = t.order();
    let tl = t.tail_len();
    let index = t.index().clone();
    let mut data = Vec::with_capacity(index.len() * tl * dim);
    let tail_strides: Vec<usize> = (0..order).map(|s| dim.pow((order - 1 - s) as u32)).collect();
    for r in 0..index.len() {
        let head = index.indices(r);
        for tail in 0..tl {
            let tail_idx = unflatten(tail, dim, order);
            let own = t.rep(r, tail);
            for e in 0..dim {
                let mut v = own.derivative(e);
                for s in 0..4 {
                    for (f, gam) in conn.terms(e, head[s]) {
                        let mut h = head;
                        h[s] = *f;
                        if let Some((rr, sign)) = index.canonical(h[0], h[1], h[2], h[3]) {
                            let c = t.rep(rr, tail);
                            if !c.is_zero() {
                                let prod = gam * c;
                                v = if sign > 0 { &v - &prod } else { &v + &prod };
                            }
                        }
                    }
                }
                for s in 0..order {
                    for (f, gam) in conn.terms(e, tail_idx[s]) {
                        let moved = tail + f * tail_strides[s] - tail_idx[s] * tail_strides[s];
                        let c = t.rep(r, moved);
                        if !c.is_zero() {
                            v = &v - &(gam * c);
                        }
                    }
                }
                data.push(v);
            }
        }
    }
    CurvatureTensor::from_data(ctx, index, order + 1, Variance::Down, data)
}

/// `Ric_{bd} = g^{ac} R_{abcd}`.
pub fn ricci(riem: &CurvatureTensor, metric: &Metric) -> Tensor {
    let dim = metric.dim();
    let nvars = metric.ctx().nvars();
    let mut out = Tensor::zeros(metric.ctx().clone(), Valence::all_down(2));
    for b in 0..dim {
        for d in b..dim {
            let mut acc = RationalFunction::zero(nvars);
            for (a, row) in metric.inverse_rows().iter().enumerate() {
                for (c, ginv) in row {
                    let r = riem.get(&[a, b, *c, d]);
                    if !r.is_zero() {
                        acc = &acc + &(ginv * &r);
                    }
                }
            }
            out.set(&[b, d], acc.clone());
            out.set(&[d, b], acc);
        }
    }
    out.with_symmetry(crate::tensor::SymmetryTag::Symmetric)
}

pub fn scalar_curvature(ric: &Tensor, metric: &Metric) -> RationalFunction {
    let mut acc = RationalFunction::zero(metric.ctx().nvars());
    for (a, row) in metric.inverse_rows().iter().enumerate() {
        for (b, ginv) in row {
            let r = ric.get(&[a, *b]);
            if !r.is_zero() {
                acc = &acc + &(ginv * r);
            }
        }
    }
    acc
}

/// Identity audits for curvature tensors. Each returns the multi-indices
/// that violate the identity (empty when it holds exactly).
pub mod audit {
    use super::*;

    /// `R_{abcd} + R_{acdb} + R_{adbc} = 0` on every tail index.
    pub fn first_bianchi(t: &CurvatureTensor) -> Vec<Vec<usize>> {
        let dim = t.dim();
        let mut bad = Vec::new();
        for tail in 0..t.tail_len() {
            let tail_idx = unflatten(tail, dim, t.order());
            for a in 0..dim {
                for b in 0..dim {
                    for c in b + 1..dim {
                        for d in c + 1..dim {
                            let at = |x: [usize; 4]| {
                                let mut i = x.to_vec();
                                i.extend_from_slice(&tail_idx);
                                t.get(&i)
                            };
                            let s = &(&at([a, b, c, d]) + &at([a, c, d, b])) + &at([a, d, b, c]);
                            if !s.is_zero() {
                                let mut i = vec![a, b, c, d];
                                i.extend_from_slice(&tail_idx);
                                bad.push(i);
                            }
                        }
                    }
                }
            }
        }
        bad
    }

    /// `R_{abcd;e} + R_{abde;c} + R_{abec;d} = 0`.
    pub fn second_bianchi(nabla: &CurvatureTensor) -> Vec<Vec<usize>> {
        assert!(nabla.order() >= 1);
        let dim = nabla.dim();
        let mut bad = Vec::new();
        let extra = nabla.order() - 1;
        for rest in 0..dim.pow(extra as u32) {
            let rest_idx = unflatten(rest, dim, extra);
            for a in 0..dim {
                for b in a + 1..dim {
                    for c in 0..dim {
                        for d in c + 1..dim {
                            for e in d + 1..dim {
                                let at = |x: [usize; 5]| {
                                    let mut i = x.to_vec();
                                    i.extend_from_slice(&rest_idx);
                                    nabla.get(&i)
                                };
                                let s = &(&at([a, b, c, d, e]) + &at([a, b, d, e, c]))
                                    + &at([a, b, e, c, d]);
                                if !s.is_zero() {
                                    bad.push(vec![a, b, c, d, e]);
                                }
                            }
                        }
                    }
                }
            }
        }
        bad
    }

    /// Compares the stored representatives with a dense tensor claimed to
    /// carry the same symmetries.
    pub fn symmetries_of(t: &Tensor) -> Vec<Vec<usize>> {
        let Ok(ct) = CurvatureTensor::from_tensor(t) else {
            return vec![vec![]];
        };
        let dim = t.dim();
        (0..t.components().len())
            .filter_map(|f| {
                let idx = unflatten(f, dim, t.rank());
                (ct.get(&idx) != t.components()[f]).then_some(idx)
            })
            .collect()
    }

    /// `∇g = 0`.
    pub fn metricity(conn: &Connection) -> bool {
        covariant_derivative(conn.metric().g(), conn)
            .map(|t| t.is_zero())
            .unwrap_or(false)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_expression;

    fn metric(coords: &[&str], params: &[&str], sig: (usize, usize), lower: &[&[&str]]) -> Metric {
        let ctx = Arc::new(VariableContext::new(coords, params, sig).unwrap());
        let entries: Vec<Vec<RationalFunction>> = lower
            .iter()
            .map(|row| row.iter().map(|s| parse_expression(s, &ctx).unwrap()).collect())
            .collect();
        Metric::from_lower_triangle(ctx, &entries).unwrap()
    }

    fn rf(m: &Metric, s: &str) -> RationalFunction {
        parse_expression(s, m.ctx()).unwrap()
    }

    /// 2du(dv + A du + C dU) + 2dU(dV + B dU)
    pub(crate) fn walker(a: &str, b: &str, c: &str, params: &[&str]) -> Metric {
        let g00 = format!("2*({a})");
        let g22 = format!("2*({b})");
        metric(
            &["u", "v", "U", "V"],
            params,
            (2, 0),
            &[&[&g00], &["1", "0"], &[c, "0", &g22], &["0", "0", "1", "0"]],
        )
    }

    /// Reference Riemann tensor straight from the defining formula for
    /// `R^a_{bcd}` with dense arrays, then lowered.
    fn riemann_by_definition(conn: &Connection) -> Tensor {
        let dim = conn.dim();
        let ctx = conn.ctx().clone();
        let mut up = Tensor::zeros(
            ctx,
            Valence(vec![Variance::Up, Variance::Down, Variance::Down, Variance::Down]),
        );
        for a in 0..dim {
            for b in 0..dim {
                for c in 0..dim {
                    for d in 0..dim {
                        let mut v = &conn.symbol(a, b, d).derivative(c) - &conn.symbol(a, b, c).derivative(d);
                        for e in 0..dim {
                            v = &v + &(conn.symbol(a, c, e) * conn.symbol(e, b, d));
                            v = &v - &(conn.symbol(a, d, e) * conn.symbol(e, b, c));
                        }
                        up.set(&[a, b, c, d], v);
                    }
                }
            }
        }
        up.raise_lower(0, conn.metric()).unwrap()
    }

    #[test]
    fn flat_neutral_has_zero_connection() {
        let m = walker("0", "0", "0", &[]);
        let conn = christoffel(&m);
        assert!(conn.gamma().is_zero());
        assert!(riemann(&conn).is_zero());
    }

    #[test]
    fn polar_plane() {
        let m = metric(&["x", "y"], &[], (0, 2), &[&["1"], &["0", "x^2"]]);
        let conn = christoffel(&m);
        assert_eq!(*conn.symbol(0, 1, 1), rf(&m, "-x"));
        assert_eq!(*conn.symbol(1, 0, 1), rf(&m, "1/x"));
        assert_eq!(*conn.symbol(1, 1, 0), rf(&m, "1/x"));
        assert!(riemann(&conn).is_zero());
        assert!(audit::metricity(&conn));
    }

    #[test]
    fn round_sphere_sign() {
        // dθ² + sin²θ dφ² is not rational; use the stereographic form instead:
        // 4(dx² + dy²)/(1 + x² + y²)², curvature +1, so R_{xyxy} = g_xx g_yy.
        let m = metric(
            &["x", "y"],
            &[],
            (0, 2),
            &[&["4/(1 + x^2 + y^2)^2"], &["0", "4/(1 + x^2 + y^2)^2"]],
        );
        let riem = riemann(&christoffel(&m));
        let want = m.component(0, 0) * m.component(1, 1);
        assert_eq!(riem.get(&[0, 1, 0, 1]), want);
        let ric = ricci(&riem, &m);
        assert_eq!(scalar_curvature(&ric, &m), RationalFunction::from_int(2, 2));
    }

    #[test]
    fn compact_riemann_matches_definition() {
        for m in [
            walker("V + v^2*U", "a*v^4 + u*V", "v^3 + U", &["a"]),
            metric(
                &["t", "x", "y", "z"],
                &[],
                (1, 2),
                &[&["-1"], &["0", "t^2"], &["0", "x", "1 + y^2"], &["1", "0", "0", "z"]],
            ),
        ] {
            let conn = christoffel(&m);
            let compact = riemann(&conn);
            let dense = riemann_by_definition(&conn);
            assert_eq!(compact.to_tensor().components(), dense.components());
            assert!(audit::symmetries_of(&dense).is_empty());
            assert!(audit::first_bianchi(&compact).is_empty());
            assert!(audit::metricity(&conn));
        }
    }

    #[test]
    fn compact_derivative_matches_dense() {
        let m = walker("V + v^2*U", "a*v^4", "u*v^3", &["a"]);
        let conn = christoffel(&m);
        let r = riemann(&conn);
        let nabla = covariant_derivative_curvature(&r, &conn);
        let dense = covariant_derivative(&r.to_tensor(), &conn).unwrap();
        assert_eq!(nabla.to_tensor().components(), dense.components());
        assert!(audit::second_bianchi(&nabla).is_empty());
        let nabla2 = covariant_derivative_curvature(&nabla, &conn);
        let dense2 = covariant_derivative(&dense, &conn).unwrap();
        assert_eq!(nabla2.to_tensor().components(), dense2.components());
    }

    #[test]
    fn ricci_identity_on_covectors() {
        // With T_{c;ab} = ∇_b ∇_a T_c: T_{c;ab} - T_{c;ba} = R^d_{cab} T_d = T^e R_{ecab}.
        let m = walker("V*v + u", "v^4 + U*V", "v^2*V", &[]);
        let conn = christoffel(&m);
        let riem = riemann(&conn);
        let t = Tensor::from_components(
            m.ctx().clone(),
            Valence::all_down(1),
            ["u*v", "V^2", "1 + U", "v^3"].iter().map(|s| rf(&m, s)).collect(),
        )
        .unwrap();
        let tt = covariant_derivative(&covariant_derivative(&t, &conn).unwrap(), &conn).unwrap();
        let t_up = t.raise_all(&m);
        for c in 0..4 {
            for a in 0..4 {
                for b in 0..4 {
                    let lhs = tt.get(&[c, a, b]) - tt.get(&[c, b, a]);
                    let mut rhs = RationalFunction::zero(m.ctx().nvars());
                    for e in 0..4 {
                        rhs = &rhs + &(t_up.get(&[e]) * &riem.get(&[e, c, a, b]));
                    }
                    assert_eq!(lhs, rhs, "c={c} a={a} b={b}");
                }
            }
        }
    }
}
