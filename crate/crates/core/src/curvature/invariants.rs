use std::fmt;

use serde::{Deserialize, Serialize};

use crate::expr::RationalFunction;

use super::compact::bivector_rows;
use super::{CurvatureError, CurvatureStack};

pub type Matrix = Vec<Vec<RationalFunction>>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WitnessKind {
    /// `∇^j Riem · ∇^j Riem` with all indices contracted.
    SelfNorm { order: usize },
    /// `tr(M^p)` for the Ricci operator `R^a_b`.
    RicciTrace { power: usize },
    /// `tr(M^p)` for the curvature operator on bivectors `R^{ab}_{cd}`.
    BivectorTrace { power: usize },
}

impl WitnessKind {
    /// Number of covariant derivatives the invariant involves.
    pub fn derivative_order(&self) -> usize {
        match self {
            WitnessKind::SelfNorm { order } => *order,
            _ => 0,
        }
    }
}

impl fmt::Display for WitnessKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WitnessKind::SelfNorm { order } => write!(f, "self_norm({order})"),
            WitnessKind::RicciTrace { power } => write!(f, "tr(ricci^{power})"),
            WitnessKind::BivectorTrace { power } => write!(f, "tr(bivector^{power})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Witness {
    pub kind: WitnessKind,
    pub value: RationalFunction,
}

/// `∇^j Riem` contracted with itself over every index.
pub fn self_norm_invariant(stack: &CurvatureStack, j: usize) -> Result<RationalFunction, CurvatureError> {
    let lower = stack.member(j)?;
    let upper = stack.raised(j)?;
    Ok(lower.pairing(upper))
}

/// `R^a_b = g^{ac} Ric_{cb}` as a matrix.
pub fn ricci_operator(stack: &CurvatureStack) -> Matrix {
    let m = stack.metric();
    let dim = m.dim();
    let nvars = stack.ctx().nvars();
    (0..dim)
        .map(|a| {
            (0..dim)
                .map(|b| {
                    let mut acc = RationalFunction::zero(nvars);
                    for (c, gi) in &m.inverse_rows()[a] {
                        let r = stack.ricci().get(&[*c, b]);
                        if !r.is_zero() {
                            acc = &acc + &(gi * r);
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

/// `R^{ab}_{cd}` over index pairs `a < b`, `c < d`, acting on bivectors.
pub fn bivector_operator(stack: &CurvatureStack) -> Matrix {
    let m = stack.metric();
    let dim = m.dim();
    let nvars = stack.ctx().nvars();
    let pairs: Vec<(usize, usize)> = (0..dim)
        .flat_map(|a| (a + 1..dim).map(move |b| (a, b)))
        .collect();
    let np = pairs.len();
    let ginv = bivector_rows(m.inverse_rows(), &pairs, nvars);
    let riem = stack.riemann();
    (0..np)
        .map(|p| {
            (0..np)
                .map(|q| {
                    let (c, d) = pairs[q];
                    let mut acc = RationalFunction::zero(nvars);
                    for (r, gi) in &ginv[p] {
                        let (e, f) = pairs[*r];
                        let v = riem.get(&[e, f, c, d]);
                        if !v.is_zero() {
                            acc = &acc + &(gi * &v);
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

pub(crate) fn mat_mul(a: &Matrix, b: &Matrix) -> Matrix {
    let n = a.len();
    let nvars = a.first().and_then(|r| r.first()).map_or(0, |x| x.nvars());
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let mut acc = RationalFunction::zero(nvars);
                    for k in 0..n {
                        if !a[i][k].is_zero() && !b[k][j].is_zero() {
                            acc = &acc + &(&a[i][k] * &b[k][j]);
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

fn trace(a: &Matrix) -> RationalFunction {
    let nvars = a.first().and_then(|r| r.first()).map_or(0, |x| x.nvars());
    (0..a.len()).fold(RationalFunction::zero(nvars), |acc, i| &acc + &a[i][i])
}

fn power_traces(m: &Matrix, p_max: usize) -> Vec<RationalFunction> {
    let mut out = Vec::with_capacity(p_max);
    if p_max == 0 {
        return out;
    }
    let mut pw = m.clone();
    out.push(trace(&pw));
    for _ in 1..p_max {
        if pw.iter().flatten().all(|x| x.is_zero()) {
            out.push(RationalFunction::zero(trace(&pw).nvars()));
            continue;
        }
        pw = mat_mul(&pw, m);
        out.push(trace(&pw));
    }
    out
}

/// `tr(M^p)`, `p = 1..=p_max`, for the Ricci and bivector curvature operators.
/// With `p_max` at least the side length, all traces vanish iff the operator
/// is nilpotent.
pub fn operator_invariants(stack: &CurvatureStack, p_max: usize) -> Vec<Witness> {
    let mut out = Vec::new();
    for (p, value) in power_traces(&ricci_operator(stack), p_max).into_iter().enumerate() {
        out.push(Witness {
            kind: WitnessKind::RicciTrace { power: p + 1 },
            value,
        });
    }
    for (p, value) in power_traces(&bivector_operator(stack), p_max).into_iter().enumerate() {
        out.push(Witness {
            kind: WitnessKind::BivectorTrace { power: p + 1 },
            value,
        });
    }
    out
}

/// `M^d = 0` exactly.
pub fn nilpotency_check(m: &Matrix, d: usize) -> bool {
    if d == 0 {
        return true;
    }
    let mut pw = m.clone();
    for _ in 1..d {
        if pw.iter().flatten().all(|x| x.is_zero()) {
            return true;
        }
        pw = mat_mul(&pw, m);
    }
    pw.iter().flatten().all(|x| x.is_zero())
}

impl CurvatureStack {
    /// The finite witness family of derivative order at most `j`:
    /// self-norms of `∇^i Riem` for `i ≤ j`, then the operator traces.
    pub fn witnesses(&self, j: usize) -> Result<Vec<Witness>, CurvatureError> {
        let mut out = Vec::new();
        for i in 0..=j {
            out.push(Witness {
                kind: WitnessKind::SelfNorm { order: i },
                value: self_norm_invariant(self, i)?,
            });
        }
        let np = self.metric().dim() * (self.metric().dim() - 1) / 2;
        out.extend(operator_invariants(self, np.max(self.metric().dim())));
        Ok(out)
    }
}
