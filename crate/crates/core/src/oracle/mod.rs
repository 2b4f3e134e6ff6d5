//! Point-wise cross-checks of the symbolic pipeline.
//!
//! Two independent comparisons are made at random rational points:
//!
//! * every scalar witness invariant, evaluated symbolically, against the value
//!   obtained by evaluating the stack components first and contracting them
//!   with exact rationals;
//! * the Riemann components of the stack against a recomputation from the
//!   point values of `g`, `∂g` and `∂∂g` alone, which shares no code with the
//!   symbolic connection and curvature routines.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::catalog::FamilyInstance;
use crate::curvature::{CurvatureError, CurvatureStack, CurvatureTensor, WitnessKind};
use crate::expr::{qadd, qmul, qsub, ExprError, Polynomial};
use crate::tensor::Metric;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error(transparent)]
    Curvature(#[from] CurvatureError),
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error("stack and metric have different variable contexts")]
    ContextMismatch,
    #[error("unknown symbol '{0}' in sample plan")]
    UnknownSymbol(String),
    #[error("empty sample range for '{0}'")]
    EmptyRange(String),
}

type Q = BigRational;

/// Values are drawn as `n / d` with `d ∈ 1..=max_denominator` and `n / d`
/// inside `[min, max]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SampleRange {
    pub min: i64,
    pub max: i64,
    pub max_denominator: i64,
}

impl Default for SampleRange {
    fn default() -> Self {
        SampleRange {
            min: -4,
            max: 4,
            max_denominator: 3,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SamplePlan {
    pub seed: u64,
    pub points: usize,
    pub default_range: SampleRange,
    /// Per-symbol overrides, keyed by coordinate or parameter name.
    pub ranges: BTreeMap<String, SampleRange>,
    /// Redraws allowed per point when a draw lands on a pole.
    pub retry_limit: usize,
}

impl Default for SamplePlan {
    fn default() -> Self {
        SamplePlan {
            seed: 0,
            points: 20,
            default_range: SampleRange::default(),
            ranges: BTreeMap::new(),
            retry_limit: 100,
        }
    }
}

impl SamplePlan {
    pub fn with_seed(seed: u64, points: usize) -> Self {
        SamplePlan {
            seed,
            points,
            ..Default::default()
        }
    }
}

/// Perturbs one evaluated stored entry of `∇^order Riem` before contraction;
/// a correct oracle must then report mismatches.
#[derive(Clone, Debug)]
pub struct Fault {
    pub order: usize,
    pub entry: usize,
    pub delta: Q,
}

#[derive(Clone, Debug, Serialize)]
pub struct Mismatch {
    pub point: usize,
    pub quantity: String,
    pub symbolic: String,
    pub pointwise: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct OracleReport {
    pub instance: String,
    /// Sampled points as symbol → value strings.
    pub points: Vec<BTreeMap<String, String>>,
    pub comparisons: usize,
    pub mismatches: Vec<Mismatch>,
    /// Set when a point could not be drawn away from the poles.
    pub exhausted: Option<String>,
}

impl OracleReport {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty() && self.exhausted.is_none()
    }
}

pub fn cross_check(
    instance: &FamilyInstance,
    stack: &CurvatureStack,
    plan: &SamplePlan,
) -> Result<OracleReport, OracleError> {
    cross_check_metric(&instance.id, &instance.metric, stack, plan, &[])
}

pub fn cross_check_metric(
    id: &str,
    metric: &Metric,
    stack: &CurvatureStack,
    plan: &SamplePlan,
    faults: &[Fault],
) -> Result<OracleReport, OracleError> {
    let ctx = metric.ctx();
    if ctx.nvars() != stack.metric().ctx().nvars() || ctx.dim() != stack.metric().dim() {
        return Err(OracleError::ContextMismatch);
    }
    let ranges = resolve_ranges(metric, plan)?;
    let poles = pole_polynomials(metric, stack);
    let symbolic = stack.witnesses(stack.order())?;
    let derivs = MetricDerivatives::new(metric);

    let mut rng = ChaCha8Rng::seed_from_u64(plan.seed);
    let mut report = OracleReport {
        instance: id.to_string(),
        points: Vec::new(),
        comparisons: 0,
        mismatches: Vec::new(),
        exhausted: None,
    };
    'points: for p in 0..plan.points {
        let mut attempt = 0;
        let point = loop {
            let pt: Vec<Q> = ranges.iter().map(|r| draw(&mut rng, r)).collect();
            let opt: Vec<Option<Q>> = pt.iter().cloned().map(Some).collect();
            if poles.iter().all(|q| q.evaluate(&opt).map_or(false, |v| !v.is_zero())) {
                break pt;
            }
            attempt += 1;
            if attempt > plan.retry_limit {
                report.exhausted = Some(format!(
                    "point {p}: no pole-free draw after {} attempts",
                    plan.retry_limit
                ));
                break 'points;
            }
        };
        let names = ctx.symbols().iter().map(|s| s.name().to_string());
        report
            .points
            .push(names.zip(point.iter().map(|v| v.to_string())).collect());
        let outcome = check_point(&point, stack, &symbolic, &derivs, faults)?;
        report.comparisons += outcome.comparisons;
        report.mismatches.extend(outcome.mismatches.into_iter().map(|(quantity, symbolic, pointwise)| Mismatch {
            point: p,
            quantity,
            symbolic,
            pointwise,
        }));
    }
    Ok(report)
}

/// Value of every witness invariant at one point by both paths: symbolic
/// evaluation first, and stack evaluation followed by exact contraction.
pub fn invariants_at(stack: &CurvatureStack, point: &[Q]) -> Result<Vec<(WitnessKind, Q, Q)>, OracleError> {
    let symbolic = stack.witnesses(stack.order())?;
    let opt: Vec<Option<Q>> = point.iter().cloned().map(Some).collect();
    let numeric = PointStack::new(stack, &opt, &[])?;
    symbolic
        .iter()
        .map(|w| Ok((w.kind, w.value.evaluate(&opt)?, numeric.witness(w.kind))))
        .collect()
}

struct PointOutcome {
    comparisons: usize,
    mismatches: Vec<(String, String, String)>,
}

fn check_point(
    point: &[Q],
    stack: &CurvatureStack,
    symbolic: &[crate::curvature::Witness],
    derivs: &MetricDerivatives,
    faults: &[Fault],
) -> Result<PointOutcome, OracleError> {
    let opt: Vec<Option<Q>> = point.iter().cloned().map(Some).collect();
    let numeric = PointStack::new(stack, &opt, faults)?;
    let mut out = PointOutcome {
        comparisons: 0,
        mismatches: Vec::new(),
    };
    for w in symbolic {
        let s = w.value.evaluate(&opt)?;
        let n = numeric.witness(w.kind);
        out.comparisons += 1;
        if s != n {
            out.mismatches.push((w.kind.to_string(), s.to_string(), n.to_string()));
        }
    }
    let recomputed = derivs.riemann_at(&opt)?;
    let dim = numeric.dim;
    for (flat, value) in recomputed.iter().enumerate() {
        out.comparisons += 1;
        if *value != numeric.dense[0][flat] {
            let idx = crate::tensor::unflatten(flat, dim, 4);
            out.mismatches.push((
                format!("R{idx:?}"),
                numeric.dense[0][flat].to_string(),
                value.to_string(),
            ));
        }
    }
    Ok(out)
}

fn resolve_ranges(metric: &Metric, plan: &SamplePlan) -> Result<Vec<SampleRange>, OracleError> {
    let ctx = metric.ctx();
    for name in plan.ranges.keys() {
        if ctx.lookup(name).is_none() {
            return Err(OracleError::UnknownSymbol(name.clone()));
        }
    }
    ctx.symbols()
        .iter()
        .map(|s| {
            let r = plan.ranges.get(s.name()).unwrap_or(&plan.default_range).clone();
            if r.min > r.max || r.max_denominator < 1 {
                Err(OracleError::EmptyRange(s.name().to_string()))
            } else {
                Ok(r)
            }
        })
        .collect()
}

fn draw(rng: &mut ChaCha8Rng, r: &SampleRange) -> Q {
    let d = rng.gen_range(1..=r.max_denominator);
    let n = rng.gen_range(r.min * d..=r.max * d);
    Q::new(n.into(), d.into())
}

/// Every denominator in the metric, its inverse and the stack, plus the
/// numerator of the determinant.
fn pole_polynomials(metric: &Metric, stack: &CurvatureStack) -> Vec<Polynomial> {
    let mut out = stack.pole_set();
    let mut push = |p: &Polynomial| {
        if !p.is_constant() && !out.contains(p) {
            out.push(p.clone());
        }
    };
    for c in metric.g().components() {
        push(c.denominator());
    }
    push(metric.det().numerator());
    out
}

/// The stack evaluated at one point, expanded to dense arrays, with the
/// inverse metric recomputed from the point value of `g`.
struct PointStack {
    dim: usize,
    g_inv: Vec<Vec<(usize, Q)>>,
    dense: Vec<Vec<Q>>,
}

impl PointStack {
    fn new(stack: &CurvatureStack, point: &[Option<Q>], faults: &[Fault]) -> Result<Self, OracleError> {
        let metric = stack.metric();
        let dim = metric.dim();
        let g: Vec<Vec<Q>> = (0..dim)
            .map(|a| (0..dim).map(|b| metric.component(a, b).evaluate(point)).collect())
            .collect::<Result<_, _>>()?;
        let g_inv = sparse(&invert(&g).ok_or(ExprError::Pole)?);
        let mut dense = Vec::with_capacity(stack.order() + 1);
        for (j, m) in stack.members().iter().enumerate() {
            let mut reps = m.evaluate(point)?;
            for f in faults.iter().filter(|f| f.order == j) {
                if let Some(x) = reps.get_mut(f.entry) {
                    *x = qadd(x, &f.delta);
                }
            }
            dense.push(expand(m, &reps));
        }
        Ok(PointStack { dim, g_inv, dense })
    }

    fn witness(&self, kind: WitnessKind) -> Q {
        match kind {
            WitnessKind::SelfNorm { order } => {
                let t = &self.dense[order];
                let up = raise_slots(t, self.dim, 4 + order, 4 + order, &self.g_inv);
                t.iter().zip(&up).fold(Q::zero(), |acc, (x, y)| {
                    if x.is_zero() || y.is_zero() {
                        acc
                    } else {
                        qadd(&acc, &qmul(x, y))
                    }
                })
            }
            WitnessKind::RicciTrace { power } => trace_power(&self.ricci_operator(), power),
            WitnessKind::BivectorTrace { power } => trace_power(&self.bivector_operator(), power),
        }
    }

    /// `R^a_b = g^{ac} g^{ed} R_{ecdb}`.
    fn ricci_operator(&self) -> Vec<Vec<Q>> {
        let n = self.dim;
        let r = &self.dense[0];
        let at = |a: usize, b: usize, c: usize, d: usize| &r[((a * n + b) * n + c) * n + d];
        let mut ric = vec![vec![Q::zero(); n]; n];
        for (b, row) in ric.iter_mut().enumerate() {
            for (d, x) in row.iter_mut().enumerate() {
                for a in 0..n {
                    for (c, g) in &self.g_inv[a] {
                        *x = qadd(x, &qmul(g, at(a, b, *c, d)));
                    }
                }
            }
        }
        (0..n)
            .map(|a| {
                (0..n)
                    .map(|b| {
                        self.g_inv[a]
                            .iter()
                            .fold(Q::zero(), |acc, (c, g)| qadd(&acc, &qmul(g, &ric[*c][b])))
                    })
                    .collect()
            })
            .collect()
    }

    /// `R^{ab}_{cd}` on pairs `a < b`, `c < d`.
    fn bivector_operator(&self) -> Vec<Vec<Q>> {
        let n = self.dim;
        let up = raise_slots(&self.dense[0], n, 4, 2, &self.g_inv);
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
        pairs
            .iter()
            .map(|&(a, b)| {
                pairs
                    .iter()
                    .map(|&(c, d)| up[((a * n + b) * n + c) * n + d].clone())
                    .collect()
            })
            .collect()
    }
}

/// Dense components of a compactly stored curvature tensor from its
/// evaluated representatives.
fn expand(t: &CurvatureTensor, reps: &[Q]) -> Vec<Q> {
    let n = t.dim();
    let tl = t.tail_len();
    let index = t.index();
    let mut out = vec![Q::zero(); n.pow(4) * tl];
    for head in 0..n.pow(4) {
        let h = crate::tensor::unflatten(head, n, 4);
        if let Some((r, sign)) = index.canonical(h[0], h[1], h[2], h[3]) {
            for tail in 0..tl {
                let v = &reps[r * tl + tail];
                out[head * tl + tail] = if sign < 0 { -v } else { v.clone() };
            }
        }
    }
    out
}

/// Raises the first `count` slots of a dense all-lower array.
fn raise_slots(t: &[Q], dim: usize, rank: usize, count: usize, g_inv: &[Vec<(usize, Q)>]) -> Vec<Q> {
    let mut cur = t.to_vec();
    for s in 0..count {
        let stride = dim.pow((rank - 1 - s) as u32);
        let mut next = vec![Q::zero(); cur.len()];
        for (pos, v) in cur.iter().enumerate() {
            if v.is_zero() {
                continue;
            }
            let b = (pos / stride) % dim;
            let base = pos - b * stride;
            for (a, g) in &g_inv[b] {
                let slot = &mut next[base + a * stride];
                *slot = qadd(slot, &qmul(g, v));
            }
        }
        cur = next;
    }
    cur
}

fn sparse(m: &[Vec<Q>]) -> Vec<Vec<(usize, Q)>> {
    m.iter()
        .map(|row| {
            row.iter()
                .enumerate()
                .filter(|(_, x)| !x.is_zero())
                .map(|(i, x)| (i, x.clone()))
                .collect()
        })
        .collect()
}

fn trace_power(m: &[Vec<Q>], p: usize) -> Q {
    let n = m.len();
    let mut pw = m.to_vec();
    for _ in 1..p {
        pw = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| (0..n).fold(Q::zero(), |acc, k| qadd(&acc, &qmul(&pw[i][k], &m[k][j]))))
                    .collect()
            })
            .collect();
    }
    (0..n).fold(Q::zero(), |acc, i| qadd(&acc, &pw[i][i]))
}

/// Gauss–Jordan inverse over ℚ; `None` when singular.
fn invert(m: &[Vec<Q>]) -> Option<Vec<Vec<Q>>> {
    let n = m.len();
    let mut a: Vec<Vec<Q>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Q::one() } else { Q::zero() }));
            r
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, piv);
        let inv = a[col][col].recip();
        for x in a[col].iter_mut() {
            *x = qmul(x, &inv);
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                let pivot_row = a[col].clone();
                for (x, p) in a[r].iter_mut().zip(&pivot_row) {
                    *x = qsub(x, &qmul(&f, p));
                }
            }
        }
    }
    Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Symbolic first and second partial derivatives of each metric component,
/// taken once and substituted at every point.
struct MetricDerivatives {
    dim: usize,
    g: Vec<crate::expr::RationalFunction>,
    dg: Vec<crate::expr::RationalFunction>,
    ddg: Vec<crate::expr::RationalFunction>,
}

impl MetricDerivatives {
    fn new(metric: &Metric) -> Self {
        let n = metric.dim();
        let mut g = Vec::with_capacity(n * n);
        let mut dg = Vec::with_capacity(n * n * n);
        let mut ddg = Vec::with_capacity(n * n * n * n);
        for a in 0..n {
            for b in 0..n {
                let c = metric.component(a, b);
                g.push(c.clone());
                for x in 0..n {
                    let d = c.derivative(x);
                    for y in 0..n {
                        ddg.push(d.derivative(y));
                    }
                    dg.push(d);
                }
            }
        }
        MetricDerivatives { dim: n, g, dg, ddg }
    }

    /// `R_abcd = ½(g_ad,bc + g_bc,ad − g_ac,bd − g_bd,ac)
    ///          + g_ef (Γ^e_bc Γ^f_ad − Γ^e_bd Γ^f_ac)`.
    fn riemann_at(&self, point: &[Option<Q>]) -> Result<Vec<Q>, OracleError> {
        let n = self.dim;
        let ev = |v: &[crate::expr::RationalFunction]| -> Result<Vec<Q>, ExprError> {
            v.iter().map(|x| x.evaluate(point)).collect()
        };
        let g = ev(&self.g)?;
        let dg = ev(&self.dg)?;
        let ddg = ev(&self.ddg)?;
        let g_at = |a: usize, b: usize| &g[a * n + b];
        let dg_at = |a: usize, b: usize, c: usize| &dg[(a * n + b) * n + c];
        let ddg_at = |a: usize, b: usize, c: usize, d: usize| &ddg[((a * n + b) * n + c) * n + d];
        let gm: Vec<Vec<Q>> = (0..n).map(|a| (0..n).map(|b| g_at(a, b).clone()).collect()).collect();
        let g_inv = invert(&gm).ok_or(ExprError::Pole)?;
        let half = Q::new(BigInt::one(), BigInt::from(2));
        // Γ_{abc} = ½(g_ab,c + g_ac,b − g_bc,a), then Γ^a_bc.
        let mut low = vec![Q::zero(); n * n * n];
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let s = qsub(&qadd(dg_at(a, b, c), dg_at(a, c, b)), dg_at(b, c, a));
                    low[(a * n + b) * n + c] = qmul(&s, &half);
                }
            }
        }
        let mut gamma = vec![Q::zero(); n * n * n];
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    gamma[(a * n + b) * n + c] = (0..n).fold(Q::zero(), |acc, d| {
                        qadd(&acc, &qmul(&g_inv[a][d], &low[(d * n + b) * n + c]))
                    });
                }
            }
        }
        let gam = |a: usize, b: usize, c: usize| &gamma[(a * n + b) * n + c];
        let mut out = Vec::with_capacity(n.pow(4));
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for d in 0..n {
                        let second = qsub(
                            &qadd(ddg_at(a, d, b, c), ddg_at(b, c, a, d)),
                            &qadd(ddg_at(a, c, b, d), ddg_at(b, d, a, c)),
                        );
                        let mut v = qmul(&second, &half);
                        for e in 0..n {
                            for f in 0..n {
                                let gef = g_at(e, f);
                                if gef.is_zero() {
                                    continue;
                                }
                                let q = qsub(
                                    &qmul(gam(e, b, c), gam(f, a, d)),
                                    &qmul(gam(e, b, d), gam(f, a, c)),
                                );
                                v = qadd(&v, &qmul(gef, &q));
                            }
                        }
                        out.push(v);
                    }
                }
            }
        }
        Ok(out)
    }
}
