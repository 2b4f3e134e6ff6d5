//! Null frames, frame components, boost weights, and the spin coefficients
//! of the first null direction in four-dimensional neutral signature.

mod boost;
mod spin;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::curvature::CurvatureTensor;
use crate::expr::{RationalFunction, VariableContext};
use crate::tensor::{Metric, SparseRows, Tensor, TensorError, Variance};

pub use boost::{boost_weight_of, bw_decompose, bw_decompose_curvature, BWDecomposition, BoostWeight};
pub use spin::{classify_geometry, spin_coefficients, GeometryFlags, SpinCoefficients4D};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FrameError {
    #[error("bad role label '{0}'")]
    BadRole(String),
    #[error("roles must be l1..l{k}, n1..n{k}, m1..m{m}, each exactly once")]
    RoleSet { k: usize, m: usize },
    #[error("expected {expected} frame fields of {expected} components each")]
    Shape { expected: usize },
    #[error("frame is degenerate")]
    Degenerate,
    #[error("{0}")]
    Unsupported(String),
    #[error(transparent)]
    Tensor(#[from] TensorError),
}

/// Role of one frame vector in the pairing `2(ℓ¹n¹ + … + ℓᵏnᵏ) + δ_ij mⁱmʲ`.
/// Indices are 1-based as in the usual notation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Role {
    L(usize),
    N(usize),
    M(usize),
}

impl Role {
    /// `ℓ^I ↔ n^I`; spacelike roles are fixed.
    pub fn swapped(self) -> Role {
        match self {
            Role::L(i) => Role::N(i),
            Role::N(i) => Role::L(i),
            Role::M(i) => Role::M(i),
        }
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Role::L(i) => write!(f, "l{i}"),
            Role::N(i) => write!(f, "n{i}"),
            Role::M(i) => write!(f, "m{i}"),
        }
    }
}

impl FromStr for Role {
    type Err = FrameError;
    fn from_str(s: &str) -> Result<Self, FrameError> {
        let bad = || FrameError::BadRole(s.to_string());
        let (head, num) = s.split_at(s.find(|c: char| c.is_ascii_digit()).ok_or_else(bad)?);
        let i: usize = num.parse().map_err(|_| bad())?;
        if i == 0 {
            return Err(bad());
        }
        match head {
            "l" => Ok(Role::L(i)),
            "n" => Ok(Role::N(i)),
            "m" => Ok(Role::M(i)),
            _ => Err(bad()),
        }
    }
}

impl Serialize for Role {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Role {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Expected value of `g(e_A, e_B)` for two roles.
pub fn expected_pairing(a: Role, b: Role) -> i64 {
    match (a, b) {
        (Role::L(i), Role::N(j)) | (Role::N(i), Role::L(j)) if i == j => 1,
        (Role::M(i), Role::M(j)) if i == j => 1,
        _ => 0,
    }
}

/// A frame of `2k+m` vector fields with role labels. Frame vectors are
/// stored by their coordinate components `e_A^a`.
#[derive(Clone, Debug, PartialEq)]
pub struct NullFrame {
    ctx: Arc<VariableContext>,
    roles: Vec<Role>,
    vectors: Vec<Vec<RationalFunction>>,
}

fn check_roles(roles: &[Role], k: usize, m: usize) -> Result<(), FrameError> {
    let mut want: Vec<Role> = (1..=k)
        .flat_map(|i| [Role::L(i), Role::N(i)])
        .chain((1..=m).map(Role::M))
        .collect();
    let mut got = roles.to_vec();
    want.sort();
    got.sort();
    if want == got {
        Ok(())
    } else {
        Err(FrameError::RoleSet { k, m })
    }
}

impl NullFrame {
    pub fn from_vectors(
        ctx: Arc<VariableContext>,
        roles: Vec<Role>,
        vectors: Vec<Vec<RationalFunction>>,
    ) -> Result<Self, FrameError> {
        let dim = ctx.dim();
        if roles.len() != dim || vectors.len() != dim || vectors.iter().any(|v| v.len() != dim) {
            return Err(FrameError::Shape { expected: dim });
        }
        let (k, m) = ctx.signature();
        check_roles(&roles, k, m)?;
        Ok(NullFrame {
            ctx,
            roles,
            vectors,
        })
    }

    /// Frame given by the metric-lowered one-forms `e_A♭ = g(e_A, ·)`; the
    /// role of each one-form is the role of the vector it lowers.
    pub fn from_covectors(
        metric: &Metric,
        roles: Vec<Role>,
        covectors: Vec<Vec<RationalFunction>>,
    ) -> Result<Self, FrameError> {
        let dim = metric.dim();
        if covectors.len() != dim || covectors.iter().any(|v| v.len() != dim) {
            return Err(FrameError::Shape { expected: dim });
        }
        let vectors = covectors.iter().map(|w| metric.raise(w)).collect();
        NullFrame::from_vectors(metric.ctx().clone(), roles, vectors)
    }

    pub fn ctx(&self) -> &Arc<VariableContext> {
        &self.ctx
    }

    pub fn dim(&self) -> usize {
        self.ctx.dim()
    }

    /// Number of null pairs.
    pub fn k(&self) -> usize {
        self.ctx.signature().0
    }

    pub fn roles(&self) -> &[Role] {
        &self.roles
    }

    pub fn vectors(&self) -> &[Vec<RationalFunction>] {
        &self.vectors
    }

    pub fn vector(&self, role: Role) -> Option<&[RationalFunction]> {
        self.position(role).map(|i| self.vectors[i].as_slice())
    }

    pub fn position(&self, role: Role) -> Option<usize> {
        self.roles.iter().position(|r| *r == role)
    }

    pub fn covectors(&self, metric: &Metric) -> Vec<Vec<RationalFunction>> {
        self.vectors.iter().map(|v| metric.lower(v)).collect()
    }

    /// `rows[A] = [(a, e_A^a)]`, the map from coordinate to frame components.
    pub fn rows(&self) -> SparseRows {
        self.vectors
            .iter()
            .map(|v| {
                v.iter()
                    .enumerate()
                    .filter(|(_, c)| !c.is_zero())
                    .map(|(a, c)| (a, c.clone()))
                    .collect()
            })
            .collect()
    }

    /// `θ^A_a` with `θ^A(e_B) = δ^A_B`, as rows `[(a, θ^A_a)]`.
    pub fn coframe_rows(&self) -> Result<SparseRows, FrameError> {
        let inv = self.inverse_matrix()?;
        let dim = self.dim();
        Ok((0..dim)
            .map(|aa| {
                (0..dim)
                    .filter(|&a| !inv[a][aa].is_zero())
                    .map(|a| (a, inv[a][aa].clone()))
                    .collect()
            })
            .collect())
    }

    /// `inv[a][A] = θ^A_a`.
    fn inverse_matrix(&self) -> Result<Vec<Vec<RationalFunction>>, FrameError> {
        crate::tensor::invert_matrix(&self.vectors, self.ctx.nvars())
            .map(|(inv, _)| inv)
            .ok_or(FrameError::Degenerate)
    }

    /// Same vectors under new role labels.
    pub fn with_roles(&self, roles: Vec<Role>) -> Result<Self, FrameError> {
        NullFrame::from_vectors(self.ctx.clone(), roles, self.vectors.clone())
    }

    /// Scales every `ℓ^I` by `s_I` and `n^I` by `1/s_I`.
    pub fn boosted(&self, s: &[BigRational]) -> Self {
        let vectors = self
            .roles
            .iter()
            .zip(&self.vectors)
            .map(|(role, v)| {
                let f = match role {
                    Role::L(i) => s[i - 1].clone(),
                    Role::N(i) => s[i - 1].recip(),
                    Role::M(_) => return v.clone(),
                };
                v.iter().map(|c| c.scale(&f)).collect()
            })
            .collect();
        NullFrame {
            ctx: self.ctx.clone(),
            roles: self.roles.clone(),
            vectors,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairingViolation {
    pub first: Role,
    pub second: Role,
    pub expected: i64,
    pub actual: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FrameReport {
    pub violations: Vec<PairingViolation>,
}

impl FrameReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks every pairing `g(e_A, e_B)` exactly.
pub fn validate_frame(frame: &NullFrame, metric: &Metric) -> FrameReport {
    let dim = frame.dim();
    let nvars = metric.ctx().nvars();
    let mut violations = Vec::new();
    if dim != metric.dim() {
        return FrameReport {
            violations: vec![PairingViolation {
                first: frame.roles[0],
                second: frame.roles[0],
                expected: 1,
                actual: "dimension mismatch".into(),
            }],
        };
    }
    for a in 0..dim {
        for b in a..dim {
            let got = metric.pair(&frame.vectors[a], &frame.vectors[b]);
            let want = expected_pairing(frame.roles[a], frame.roles[b]);
            if got != RationalFunction::from_int(nvars, want) {
                violations.push(PairingViolation {
                    first: frame.roles[a],
                    second: frame.roles[b],
                    expected: want,
                    actual: crate::expr::display(&got, metric.ctx()),
                });
            }
        }
    }
    FrameReport { violations }
}

/// Frame components of a tensor: covariant slots are fed the frame vectors
/// `e_A`, contravariant slots the dual coframe `θ^A`. The result is a tensor
/// whose slots are indexed by frame position.
pub fn frame_components(t: &Tensor, frame: &NullFrame) -> Result<Tensor, FrameError> {
    let rows = frame.rows();
    let co_rows = if t.valence().is_all_down() {
        None
    } else {
        Some(frame.coframe_rows()?)
    };
    let mut out = t.clone();
    for slot in 0..t.rank() {
        let v = t.valence().0[slot];
        let r = match v {
            Variance::Down => &rows,
            Variance::Up => co_rows.as_ref().expect("computed for mixed valence"),
        };
        out = out.transform_slot(slot, r, v);
    }
    Ok(out)
}

/// Frame components of a curvature-symmetric tensor.
pub fn frame_components_curvature(t: &CurvatureTensor, frame: &NullFrame) -> CurvatureTensor {
    t.transform(&frame.rows(), Variance::Down)
}

/// Inverse of [`frame_components`] for covariant tensors.
pub fn coordinate_components(frame_tensor: &Tensor, frame: &NullFrame) -> Result<Tensor, FrameError> {
    let inv = frame.inverse_matrix()?;
    let dim = frame.dim();
    // T_a... = Σ θ^A_a T_A...
    let rows: SparseRows = (0..dim)
        .map(|a| {
            (0..dim)
                .filter(|&aa| !inv[a][aa].is_zero())
                .map(|aa| (aa, inv[a][aa].clone()))
                .collect()
        })
        .collect();
    let mut out = frame_tensor.clone();
    for slot in 0..frame_tensor.rank() {
        out = out.transform_slot(slot, &rows, Variance::Down);
    }
    Ok(out)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::expr::parse_expression;

    pub(crate) fn walker_metric(a: &str, b: &str, c: &str, params: &[&str]) -> Metric {
        let ctx = Arc::new(VariableContext::new(&["u", "v", "U", "V"], params, (2, 0)).unwrap());
        let p = |s: &str| parse_expression(s, &ctx).unwrap();
        let z = || RationalFunction::zero(ctx.nvars());
        let o = || RationalFunction::one(ctx.nvars());
        let entries = vec![
            vec![p(&format!("2*({a})"))],
            vec![o(), z()],
            vec![p(c), z(), p(&format!("2*({b})"))],
            vec![z(), z(), o(), z()],
        ];
        Metric::from_lower_triangle(ctx.clone(), &entries).unwrap()
    }

    /// Null frame of the Walker form: `ℓ¹ = ∂_v`, `n¹ = ∂_u − A∂_v`, `ℓ² = ∂_V`,
    /// `n² = ∂_U − C∂_v − B∂_V`, in that order.
    pub(crate) fn walker_frame(m: &Metric, a: &str, b: &str, c: &str) -> NullFrame {
        let ctx = m.ctx();
        let p = |s: &str| parse_expression(s, ctx).unwrap();
        let vectors = vec![
            vec![p("0"), p("1"), p("0"), p("0")],
            vec![p("1"), -p(a), p("0"), p("0")],
            vec![p("0"), p("0"), p("0"), p("1")],
            vec![p("0"), -p(c), p("1"), -p(b)],
        ];
        let roles = ["l1", "n1", "l2", "n2"].iter().map(|s| s.parse().unwrap()).collect();
        NullFrame::from_vectors(ctx.clone(), roles, vectors).unwrap()
    }

    #[test]
    fn covector_frame_matches_vector_frame() {
        let m = walker_metric("V*v", "v^4", "u", &[]);
        let f = walker_frame(&m, "V*v", "v^4", "u");
        let p = |s: &str| parse_expression(s, m.ctx()).unwrap();
        let co = vec![
            vec![p("1"), p("0"), p("0"), p("0")],
            vec![p("V*v"), p("1"), p("u"), p("0")],
            vec![p("0"), p("0"), p("1"), p("0")],
            vec![p("0"), p("0"), p("v^4"), p("1")],
        ];
        let roles = ["l1", "n1", "l2", "n2"].iter().map(|s| s.parse().unwrap()).collect();
        let g = NullFrame::from_covectors(&m, roles, co).unwrap();
        assert!(validate_frame(&g, &m).is_valid());
        for r in f.roles() {
            assert_eq!(f.vector(*r), g.vector(*r));
        }
    }

    #[test]
    fn walker_riemann_table() {
        let (a, b, c) = (
            "v^2*V + u*V^2 + v*V^2*U + v^3",
            "v^3*V + V^2*v^2 + u*V^3 + U*v",
            "v^2*V^2 + u*v^3 + V^3*U + v*V",
        );
        let m = walker_metric(a, b, c, &[]);
        let f = walker_frame(&m, a, b, c);
        let r = frame_components_curvature(&crate::curvature::riemann(&crate::curvature::christoffel(&m)), &f);
        let p = |s: &str| parse_expression(s, m.ctx()).unwrap();
        let d = |e: &str, x: &str, y: &str| {
            let (i, j) = (m.ctx().lookup(x).unwrap(), m.ctx().lookup(y).unwrap());
            p(e).derivative(i).derivative(j)
        };
        let half = |x: RationalFunction| x.scale(&BigRational::new(1.into(), 2.into()));
        let table = [
            ([1, 4, 1, 4], -d(b, "v", "v")),
            ([1, 2, 1, 4], -half(d(c, "v", "v"))),
            ([1, 4, 3, 4], -d(b, "v", "V")),
            ([1, 2, 1, 2], -d(a, "v", "v")),
            ([1, 2, 3, 4], -half(d(c, "v", "V"))),
            ([3, 4, 3, 4], -d(b, "V", "V")),
            ([1, 2, 2, 3], d(a, "v", "V")),
            ([2, 3, 3, 4], half(d(c, "V", "V"))),
            ([2, 3, 2, 3], -d(a, "V", "V")),
        ];
        for (idx, want) in table {
            let zero_based: Vec<usize> = idx.iter().map(|i| i - 1).collect();
            assert_eq!(r.get(&zero_based), want, "R{idx:?}");
        }
        for b in boost::from_frame_curvature(&r, &f).support() {
            assert!(b.0[0] + b.0[1] <= 0, "weight {b}");
        }
    }

    #[test]
    fn roles_parse_and_print() {
        for s in ["l1", "n2", "m3"] {
            assert_eq!(s.parse::<Role>().unwrap().to_string(), s);
        }
        assert!("x1".parse::<Role>().is_err());
        assert!("l0".parse::<Role>().is_err());
        assert!("l".parse::<Role>().is_err());
    }

    #[test]
    fn flat_coordinate_frame_is_valid() {
        let m = walker_metric("0", "0", "0", &[]);
        let nv = m.ctx().nvars();
        let unit = |i: usize| {
            (0..4)
                .map(|j| RationalFunction::from_int(nv, (i == j) as i64))
                .collect::<Vec<_>>()
        };
        // ∂_v, ∂_u, ∂_V, ∂_U as ℓ¹, n¹, ℓ², n²
        let roles = ["l1", "n1", "l2", "n2"].iter().map(|s| s.parse().unwrap()).collect();
        let f = NullFrame::from_vectors(m.ctx().clone(), roles, vec![unit(1), unit(0), unit(3), unit(2)]).unwrap();
        assert!(validate_frame(&f, &m).is_valid());
    }

    #[test]
    fn walker_frame_is_valid_and_corruption_is_caught() {
        let m = walker_metric("V*v + u^2", "a*v^4 + U", "v^3*V", &["a"]);
        let f = walker_frame(&m, "V*v + u^2", "a*v^4 + U", "v^3*V");
        assert!(validate_frame(&f, &m).is_valid());
        // ℓ¹ = ∂_v in these coordinates.
        assert_eq!(f.vector(Role::L(1)).unwrap()[1], RationalFunction::one(m.ctx().nvars()));
        let mut bad = f.vectors().to_vec();
        let li = f.position(Role::L(1)).unwrap();
        bad[li][0] = RationalFunction::one(m.ctx().nvars());
        let broken = NullFrame::from_vectors(m.ctx().clone(), f.roles().to_vec(), bad).unwrap();
        let report = validate_frame(&broken, &m);
        assert!(report
            .violations
            .iter()
            .any(|v| v.first == Role::L(1) && v.second == Role::L(1)));
    }

    #[test]
    fn metric_frame_components_are_the_pairing() {
        let m = walker_metric("V", "v^4", "0", &[]);
        let f = walker_frame(&m, "V", "v^4", "0");
        let comps = frame_components(m.g(), &f).unwrap();
        for a in 0..4 {
            for b in 0..4 {
                let want = expected_pairing(f.roles()[a], f.roles()[b]);
                assert_eq!(*comps.get(&[a, b]), RationalFunction::from_int(m.ctx().nvars(), want));
            }
        }
        assert_eq!(coordinate_components(&comps, &f).unwrap().components(), m.g().components());
    }

    #[test]
    fn role_set_is_checked() {
        let m = walker_metric("0", "0", "0", &[]);
        let f = walker_frame(&m, "0", "0", "0");
        let roles = ["l1", "l1", "l2", "n2"].iter().map(|s| s.parse().unwrap()).collect();
        assert!(matches!(f.with_roles(roles), Err(FrameError::RoleSet { .. })));
    }
}
