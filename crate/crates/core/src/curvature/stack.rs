use std::sync::{Arc, OnceLock};

use num_rational::BigRational;

use crate::expr::RationalFunction;
use crate::tensor::{Metric, Tensor, Variance};

use super::compact::bivector_rows;
use super::{
    audit, christoffel, covariant_derivative_curvature, ricci, riemann, scalar_curvature,
    Connection, CurvatureError, CurvatureTensor,
};

pub const DEFAULT_COMPONENT_CAP: usize = 10_000_000;

/// The metric together with `Riem, ∇Riem, …, ∇^K Riem` and the irreducible
/// parts of `Riem`.
#[derive(Debug)]
pub struct CurvatureStack {
    connection: Connection,
    members: Vec<CurvatureTensor>,
    raised: Vec<OnceLock<CurvatureTensor>>,
    ricci: Tensor,
    scalar: RationalFunction,
    traceless_ricci: Tensor,
    weyl: CurvatureTensor,
    weyl_split: Option<(CurvatureTensor, CurvatureTensor)>,
}

/// Builds the stack to order `k`, refusing when the dense entry count of all
/// members would exceed `cap`.
pub fn build_stack(metric: &Metric, k: usize, cap: usize) -> Result<CurvatureStack, CurvatureError> {
    let dim = metric.dim();
    let mut needed = 0usize;
    for j in 0..=k {
        needed = dim
            .checked_pow((4 + j) as u32)
            .and_then(|n| needed.checked_add(n))
            .unwrap_or(usize::MAX);
        if needed > cap {
            return Err(CurvatureError::ResourceLimit {
                order: j,
                needed,
                cap,
            });
        }
    }
    let connection = christoffel(metric);
    let riem = riemann(&connection);
    if !audit::first_bianchi(&riem).is_empty() {
        return Err(CurvatureError::InvariantViolation(
            "first Bianchi identity fails".into(),
        ));
    }
    let mut members = vec![riem];
    for j in 1..=k {
        let next = covariant_derivative_curvature(&members[j - 1], &connection);
        if j == 1 && !audit::second_bianchi(&next).is_empty() {
            return Err(CurvatureError::InvariantViolation(
                "second Bianchi identity fails".into(),
            ));
        }
        members.push(next);
    }
    let ric = ricci(&members[0], metric);
    let scalar = scalar_curvature(&ric, metric);
    let n = BigRational::from_integer((dim as i64).into());
    let traceless_ricci = ric
        .add(&metric.g().scale(&scalar.scale(&n.recip())).scale(&RationalFunction::from_int(
            metric.ctx().nvars(),
            -1,
        )))
        .expect("same shape");
    let weyl = weyl_tensor(&members[0], metric, &ric, &scalar);
    let weyl_split = if dim == 4 && metric.ctx().signature() == (2, 0) {
        split(&weyl, metric).ok()
    } else {
        None
    };
    Ok(CurvatureStack {
        raised: (0..=k).map(|_| OnceLock::new()).collect(),
        connection,
        members,
        ricci: ric,
        scalar,
        traceless_ricci,
        weyl,
        weyl_split,
    })
}

/// `C = R − (g ⊙ Ric)/(n−2) + R (g ⊙ g)/((n−1)(n−2))` with the symmetric
/// products written out in index form.
fn weyl_tensor(riem: &CurvatureTensor, metric: &Metric, ric: &Tensor, scalar: &RationalFunction) -> CurvatureTensor {
    let dim = metric.dim();
    if dim < 3 {
        return CurvatureTensor::zeros_with(metric.ctx().clone(), riem.index().clone(), 0, Variance::Down);
    }
    let c1 = BigRational::new(1.into(), ((dim - 2) as i64).into());
    let c2 = BigRational::new(1.into(), (((dim - 1) * (dim - 2)) as i64).into());
    let rs = scalar.scale(&c2);
    let g = |a: usize, b: usize| metric.component(a, b);
    let r = |a: usize, b: usize| ric.get(&[a, b]);
    let index = riem.index().clone();
    let data = (0..index.len())
        .map(|i| {
            let [a, b, c, d] = index.indices(i);
            let mixed = &(&(&(g(a, c) * r(b, d)) - &(g(a, d) * r(b, c))) - &(g(b, c) * r(a, d)))
                + &(g(b, d) * r(a, c));
            let gg = &(g(a, c) * g(b, d)) - &(g(a, d) * g(b, c));
            &(riem.rep(i, 0) - &mixed.scale(&c1)) + &(&gg * &rs)
        })
        .collect();
    CurvatureTensor::from_data(metric.ctx().clone(), index, 0, Variance::Down, data)
}

fn permutation_sign(p: [usize; 4]) -> i64 {
    let mut sign = 1;
    for i in 0..4 {
        for j in i + 1..4 {
            if p[i] == p[j] {
                return 0;
            }
            if p[i] > p[j] {
                sign = -sign;
            }
        }
    }
    sign
}

/// Square root of `|det g|` as a rational function, when it exists.
fn volume_factor(metric: &Metric) -> Option<RationalFunction> {
    let det = metric.det();
    for d in [det.clone(), -det] {
        if let (Some(n), Some(m)) = (d.numerator().sqrt_exact(), d.denominator().sqrt_exact()) {
            return RationalFunction::new(n, m).ok();
        }
    }
    None
}

/// Hodge dual on the first index pair, `(★T)_{abcd} = ½ ε_{ab}^{ef} T_{efcd}`.
pub(crate) fn hodge_left(t: &CurvatureTensor, metric: &Metric, vol: &RationalFunction) -> Vec<Vec<RationalFunction>> {
    let dim = metric.dim();
    let nvars = metric.ctx().nvars();
    let pairs: Vec<(usize, usize)> = (0..dim)
        .flat_map(|a| (a + 1..dim).map(move |b| (a, b)))
        .collect();
    let np = pairs.len();
    let ginv = bivector_rows(metric.inverse_rows(), &pairs, nvars);
    // eps_up[P][q] = ε_{ab}^{ef} for P = (a,b), q = (e,f)
    let mut eps_up = vec![vec![RationalFunction::zero(nvars); np]; np];
    for (p, &(a, b)) in pairs.iter().enumerate() {
        for q in 0..np {
            let mut acc = RationalFunction::zero(nvars);
            for (r, gi) in &ginv[q] {
                let (e, f) = pairs[*r];
                let s = permutation_sign([a, b, e, f]);
                if s != 0 {
                    acc = &acc + &gi.scale_int(s);
                }
            }
            eps_up[p][q] = &acc * vol;
        }
    }
    let mut out = vec![vec![RationalFunction::zero(nvars); np]; np];
    for p in 0..np {
        for qq in 0..np {
            let mut acc = RationalFunction::zero(nvars);
            for q in 0..np {
                if eps_up[p][q].is_zero() {
                    continue;
                }
                let (e, f) = pairs[q];
                let (c, d) = pairs[qq];
                let v = t.get(&[e, f, c, d]);
                if !v.is_zero() {
                    acc = &acc + &(&eps_up[p][q] * &v);
                }
            }
            out[p][qq] = acc;
        }
    }
    out
}

fn from_pair_matrix(m: &[Vec<RationalFunction>], like: &CurvatureTensor) -> Result<CurvatureTensor, CurvatureError> {
    let dim = like.dim();
    let pairs: Vec<(usize, usize)> = (0..dim)
        .flat_map(|a| (a + 1..dim).map(move |b| (a, b)))
        .collect();
    let pos = |a: usize, b: usize| pairs.iter().position(|&p| p == (a, b)).expect("pair");
    let index = like.index().clone();
    let mut data = Vec::with_capacity(index.len());
    for r in 0..index.len() {
        let [a, b, c, d] = index.indices(r);
        let (p, q) = (pos(a, b), pos(c, d));
        if m[p][q] != m[q][p] {
            return Err(CurvatureError::InvariantViolation(
                "dual lacks pair-exchange symmetry".into(),
            ));
        }
        data.push(m[p][q].clone());
    }
    Ok(CurvatureTensor::from_data(like.ctx().clone(), index, 0, Variance::Down, data))
}

fn split(weyl: &CurvatureTensor, metric: &Metric) -> Result<(CurvatureTensor, CurvatureTensor), CurvatureError> {
    let vol = volume_factor(metric).ok_or_else(|| {
        CurvatureError::Unsupported("sqrt|det g| is not a rational function".into())
    })?;
    let dual = from_pair_matrix(&hodge_left(weyl, metric, &vol), weyl)?;
    let half = RationalFunction::constant(metric.ctx().nvars(), BigRational::new(1.into(), 2.into()));
    let plus = weyl.add(&dual).scale(&half);
    let minus = weyl.add(&dual.scale(&RationalFunction::from_int(metric.ctx().nvars(), -1))).scale(&half);
    Ok((plus, minus))
}

/// Self-dual and anti-self-dual parts `W± = ½(C ± ★C)` of the Weyl tensor.
/// Only defined in dimension 4 with signature (2,2).
pub fn weyl_split(stack: &CurvatureStack) -> Result<(CurvatureTensor, CurvatureTensor), CurvatureError> {
    let metric = stack.metric();
    if metric.dim() != 4 || metric.ctx().signature() != (2, 0) {
        return Err(CurvatureError::Unsupported(
            "the self-dual split needs dimension 4 and signature (2,2)".into(),
        ));
    }
    match &stack.weyl_split {
        Some(p) => Ok(p.clone()),
        None => split(&stack.weyl, metric),
    }
}

impl CurvatureStack {
    pub fn metric(&self) -> &Metric {
        self.connection.metric()
    }

    pub fn connection(&self) -> &Connection {
        &self.connection
    }

    /// Highest derivative order built.
    pub fn order(&self) -> usize {
        self.members.len() - 1
    }

    /// `∇^j Riem`, fully lowered.
    pub fn member(&self, j: usize) -> Result<&CurvatureTensor, CurvatureError> {
        self.members.get(j).ok_or(CurvatureError::OrderOutOfRange {
            requested: j,
            built: self.order(),
        })
    }

    pub fn members(&self) -> &[CurvatureTensor] {
        &self.members
    }

    /// `∇^j Riem` with every index raised; computed on first use.
    pub fn raised(&self, j: usize) -> Result<&CurvatureTensor, CurvatureError> {
        let m = self.member(j)?;
        Ok(self.raised[j].get_or_init(|| m.transform(self.metric().inverse_rows(), Variance::Up)))
    }

    pub fn riemann(&self) -> &CurvatureTensor {
        &self.members[0]
    }

    pub fn ricci(&self) -> &Tensor {
        &self.ricci
    }

    pub fn scalar(&self) -> &RationalFunction {
        &self.scalar
    }

    pub fn traceless_ricci(&self) -> &Tensor {
        &self.traceless_ricci
    }

    pub fn weyl(&self) -> &CurvatureTensor {
        &self.weyl
    }

    pub fn total_components(&self) -> usize {
        self.members.iter().map(|m| m.dense_len()).sum()
    }

    pub fn stored_components(&self) -> usize {
        self.members.iter().map(|m| m.data().len()).sum()
    }

    /// Denominators occurring anywhere in the stack, deduplicated.
    pub fn pole_set(&self) -> Vec<crate::expr::Polynomial> {
        let mut out: Vec<crate::expr::Polynomial> = Vec::new();
        let mut push = |p: &crate::expr::Polynomial| {
            if !p.is_one() && !out.contains(p) {
                out.push(p.clone());
            }
        };
        for c in self.metric().inverse().components() {
            push(c.denominator());
        }
        for m in &self.members {
            for c in m.data() {
                push(c.denominator());
            }
        }
        out
    }

    pub(crate) fn ctx(&self) -> &Arc<crate::expr::VariableContext> {
        self.metric().ctx()
    }
}
