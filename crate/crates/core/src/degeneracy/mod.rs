//! Boost-weight degeneracy: the B-conditions and the S_i / N properties in a
//! fixed frame, separating directions for their lattice-transformed versions,
//! and the VSI verdict over a curvature stack.

mod direction;
mod product;

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::curvature::{
    build_stack, operator_invariants, self_norm_invariant, CurvatureError, CurvatureStack, Witness, WitnessKind,
    DEFAULT_COMPONENT_CAP,
};
use crate::expr::RationalFunction;
use crate::frame::{bw_decompose_curvature, validate_frame, BWDecomposition, BoostWeight, FrameError, NullFrame};
use crate::tensor::Metric;

pub use crate::curvature::nilpotency_check;
pub use direction::{
    enumerate_direction, find_separating_direction, fourier_motzkin_direction, NoDirection, SeparatingDirection,
    Strictness,
};
pub use product::{tensor_product_property_check, ProductReport};

#[derive(Debug, Error)]
pub enum DegeneracyError {
    #[error("support set mixes k = {expected} with a weight of length {found}")]
    WeightLength { expected: usize, found: usize },
    #[error("frame is not a null frame for this metric: {0}")]
    InvalidFrame(String),
    #[error("internal invariant violated: {0}")]
    InvariantViolation(String),
    #[error(transparent)]
    Curvature(#[from] CurvatureError),
    #[error(transparent)]
    Frame(#[from] FrameError),
}

/// The set of boost weights that occur, all with the same `k`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SupportSet {
    k: usize,
    weights: BTreeSet<BoostWeight>,
}

impl SupportSet {
    pub fn new(k: usize) -> Self {
        SupportSet {
            k,
            weights: BTreeSet::new(),
        }
    }

    pub fn from_weights(k: usize, weights: impl IntoIterator<Item = BoostWeight>) -> Result<Self, DegeneracyError> {
        let mut s = SupportSet::new(k);
        for b in weights {
            s.insert(b)?;
        }
        Ok(s)
    }

    pub fn of_decomposition(dec: &BWDecomposition) -> Self {
        SupportSet {
            k: dec.k(),
            weights: dec.support().into_iter().collect(),
        }
    }

    pub fn insert(&mut self, b: BoostWeight) -> Result<(), DegeneracyError> {
        if b.k() != self.k {
            return Err(DegeneracyError::WeightLength {
                expected: self.k,
                found: b.k(),
            });
        }
        self.weights.insert(b);
        Ok(())
    }

    pub fn union(&self, other: &SupportSet) -> SupportSet {
        SupportSet {
            k: self.k,
            weights: self.weights.union(&other.weights).cloned().collect(),
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn contains_zero(&self) -> bool {
        self.weights.iter().any(|b| b.is_zero())
    }

    pub fn iter(&self) -> impl Iterator<Item = &BoostWeight> {
        self.weights.iter()
    }

    /// Image under an integer matrix acting on column vectors, `b ↦ M b`.
    pub fn transformed(&self, m: &[Vec<i32>]) -> SupportSet {
        SupportSet {
            k: m.len(),
            weights: self
                .weights
                .iter()
                .map(|b| BoostWeight(m.iter().map(|row| row.iter().zip(&b.0).map(|(x, y)| x * y).sum()).collect()))
                .collect(),
        }
    }
}

/// Literal evaluation of B1)..Bk) and the N-property on a support set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BConditions {
    /// `b[i]` is condition B(i+1).
    pub b: Vec<bool>,
    pub n: bool,
}

impl BConditions {
    /// Largest `i` with B1..Bi all holding (the S_i-property in this frame).
    pub fn s_index(&self) -> usize {
        self.b.iter().take_while(|&&x| x).count()
    }

    pub fn has_s(&self, i: usize) -> bool {
        self.s_index() >= i
    }
}

pub fn check_support(s: &SupportSet) -> BConditions {
    let k = s.k();
    let b: Vec<bool> = (0..k)
        .map(|i| !s.iter().any(|w| w.0[..i].iter().all(|&x| x == 0) && w.0[i] > 0))
        .collect();
    let n = b.iter().all(|&x| x) && !s.contains_zero();
    BConditions { b, n }
}

#[allow(non_snake_case)]
pub fn check_B_conditions(dec: &BWDecomposition) -> BConditions {
    check_support(&SupportSet::of_decomposition(dec))
}

/// Status of the VSI question at one derivative order.
#[derive(Clone, Debug, PartialEq)]
pub enum OrderStatus {
    CertifiedVSI,
    RefutedAtOrder { witness: WitnessKind, value: RationalFunction },
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OrderVerdict {
    pub order: usize,
    pub status: OrderStatus,
    /// Boost weights of `∇^order Riem` alone.
    pub support: SupportSet,
}

impl OrderVerdict {
    /// `CertifiedVSI_3`, `RefutedAtOrder_4`, `Inconclusive_2`.
    pub fn label(&self) -> String {
        let head = match self.status {
            OrderStatus::CertifiedVSI => "CertifiedVSI",
            OrderStatus::RefutedAtOrder { .. } => "RefutedAtOrder",
            OrderStatus::Inconclusive => "Inconclusive",
        };
        format!("{head}_{}", self.order)
    }
}

pub const CONVENTION_NOTE: &str = "boost weight b_I = #(l^I) - #(n^I) over covariant frame slots; \
certification needs one strict lambda with b.lambda < 0 on the joint support of orders 0..j in the supplied frame";

pub const INCONCLUSIVE_NOTE: &str = "Inconclusive means no strict direction exists in this frame and the finite \
witness family vanished; another frame or invariant might still decide the order";

#[derive(Clone, Debug, PartialEq)]
pub struct VSIVerdict {
    pub orders: Vec<OrderVerdict>,
    /// Strict direction for the joint support up to the highest certified order.
    pub direction: Option<SeparatingDirection>,
    /// Reason a strict direction fails at the first uncertified order.
    pub failure: Option<NoDirection>,
}

impl VSIVerdict {
    pub fn highest_certified(&self) -> Option<usize> {
        self.orders
            .iter()
            .take_while(|o| o.status == OrderStatus::CertifiedVSI)
            .last()
            .map(|o| o.order)
    }

    pub fn first_refuted(&self) -> Option<&OrderVerdict> {
        self.orders
            .iter()
            .find(|o| matches!(o.status, OrderStatus::RefutedAtOrder { .. }))
    }

    /// Highest certified order and first refuted order, e.g.
    /// `CertifiedVSI_3, RefutedAtOrder_4`.
    pub fn summary(&self) -> String {
        let mut parts = Vec::new();
        if let Some(j) = self.highest_certified() {
            parts.push(format!("CertifiedVSI_{j}"));
        }
        match self.first_refuted() {
            Some(o) => parts.push(o.label()),
            None => {
                if let Some(o) = self.orders.iter().find(|o| o.status == OrderStatus::Inconclusive) {
                    parts.push(o.label());
                }
            }
        }
        parts.join(", ")
    }
}

impl fmt::Display for VSIVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.summary())
    }
}

#[derive(Clone, Copy, Debug)]
pub struct VerdictOptions {
    /// Also evaluate the witnesses at certified orders and fail with an
    /// invariant violation if any is nonzero.
    pub audit: bool,
}

impl Default for VerdictOptions {
    fn default() -> Self {
        VerdictOptions { audit: true }
    }
}

/// Per-order supports of the stack members in the given frame.
pub fn stack_supports(stack: &CurvatureStack, frame: &NullFrame) -> Vec<SupportSet> {
    stack
        .members()
        .iter()
        .map(|m| SupportSet::of_decomposition(&bw_decompose_curvature(m, frame)))
        .collect()
}

pub fn vsi_verdict(metric: &Metric, frame: &NullFrame, k: usize) -> Result<VSIVerdict, DegeneracyError> {
    let stack = build_stack(metric, k, DEFAULT_COMPONENT_CAP)?;
    vsi_verdict_for_stack(&stack, frame, VerdictOptions::default())
}

pub fn vsi_verdict_for_stack(
    stack: &CurvatureStack,
    frame: &NullFrame,
    opts: VerdictOptions,
) -> Result<VSIVerdict, DegeneracyError> {
    let report = validate_frame(frame, stack.metric());
    if !report.is_valid() {
        let first = &report.violations[0];
        return Err(DegeneracyError::InvalidFrame(format!(
            "g({}, {}) should be {}",
            first.first, first.second, first.expected
        )));
    }
    let supports = stack_supports(stack, frame);
    let mut joint = SupportSet::new(frame.k());
    let mut direction = None;
    let mut failure = None;
    let mut orders = Vec::new();
    let mut operator_witnesses: Option<Vec<Witness>> = None;
    let mut nonzero: Option<Witness> = None;
    for (j, support) in supports.into_iter().enumerate() {
        joint = joint.union(&support);
        let certified = failure.is_none()
            && match find_separating_direction(&joint, true) {
                Ok(d) => {
                    direction = Some(d);
                    true
                }
                Err(e) => {
                    failure = Some(e);
                    false
                }
            };
        let needs_witnesses = !certified || opts.audit;
        if needs_witnesses && nonzero.is_none() {
            let ops = operator_witnesses.get_or_insert_with(|| {
                let dim = stack.metric().dim();
                operator_invariants(stack, (dim * (dim - 1) / 2).max(dim))
            });
            let norm = Witness {
                kind: WitnessKind::SelfNorm { order: j },
                value: self_norm_invariant(stack, j)?,
            };
            nonzero = std::iter::once(&norm).chain(ops.iter()).find(|w| !w.value.is_zero()).cloned();
        }
        let status = match (&nonzero, certified) {
            (Some(w), true) => {
                return Err(DegeneracyError::InvariantViolation(format!(
                    "order {j} is certified by a strict direction but {} is nonzero",
                    w.kind
                )))
            }
            (None, true) => OrderStatus::CertifiedVSI,
            (Some(w), false) => OrderStatus::RefutedAtOrder {
                witness: w.kind,
                value: w.value.clone(),
            },
            (None, false) => OrderStatus::Inconclusive,
        };
        orders.push(OrderVerdict { order: j, status, support });
    }
    Ok(VSIVerdict {
        orders,
        direction,
        failure,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frame::tests::{walker_frame, walker_metric};
    use proptest::prelude::*;

    fn set(k: usize, ws: &[&[i32]]) -> SupportSet {
        SupportSet::from_weights(k, ws.iter().map(|w| BoostWeight(w.to_vec()))).unwrap()
    }

    #[test]
    fn b_conditions_on_small_sets() {
        let c = check_support(&SupportSet::new(3));
        assert_eq!(c.b, vec![true; 3]);
        assert!(c.n);
        let c = check_support(&set(2, &[&[0, 0]]));
        assert_eq!(c.b, vec![true, true]);
        assert!(!c.n);
        let c = check_support(&set(2, &[&[0, 1], &[-3, 5]]));
        assert_eq!(c.b, vec![true, false]);
        assert_eq!(c.s_index(), 1);
        let c = check_support(&set(2, &[&[1, -5]]));
        assert_eq!(c.s_index(), 0);
    }

    #[test]
    fn mixed_lengths_rejected() {
        let mut s = SupportSet::new(2);
        assert!(s.insert(BoostWeight(vec![1, 2, 3])).is_err());
    }

    #[test]
    fn walker_riemann_under_first_conditions() {
        let (a, b, c) = ("v*U + u*V + U^2", "V*v^2 + v^3*u", "v^3 + u*V + U");
        let m = walker_metric(a, b, c, &[]);
        let f = walker_frame(&m, a, b, c);
        let r = crate::curvature::riemann(&crate::curvature::christoffel(&m));
        let dec = bw_decompose_curvature(&r, &f);
        let s = SupportSet::of_decomposition(&dec);
        // Beyond the weights on the line b₁ + b₂ = 0 only b₁ + b₂ < 0 occurs.
        let on_line: Vec<&BoostWeight> = s.iter().filter(|b| b.0[0] + b.0[1] == 0).collect();
        assert_eq!(on_line, vec![&BoostWeight(vec![1, -1]), &BoostWeight(vec![2, -2])]);
        assert!(s.iter().all(|b| b.0[0] + b.0[1] <= 0));
        assert_eq!(check_B_conditions(&dec).s_index(), 0);
        let d = find_separating_direction(&s, true).unwrap();
        assert_eq!(d.strictness, Strictness::Strict);
        // Exchanging every ℓ^I with n^I negates the weights; B1 still fails
        // because of the weights with b₁ + b₂ < 0.
        let swapped = f.with_roles(f.roles().iter().map(|r| r.swapped()).collect()).unwrap();
        assert!(!check_B_conditions(&bw_decompose_curvature(&r, &swapped)).n);
    }

    #[test]
    fn flat_is_certified_at_every_order() {
        let m = walker_metric("0", "0", "0", &[]);
        let f = walker_frame(&m, "0", "0", "0");
        let v = vsi_verdict(&m, &f, 4).unwrap();
        assert_eq!(v.highest_certified(), Some(4));
        assert!(v.orders.iter().all(|o| o.support.is_empty()));
        assert_eq!(v.summary(), "CertifiedVSI_4");
    }

    #[test]
    fn third_order_example() {
        let m = walker_metric("V", "a*v^4", "0", &["a"]);
        let f = walker_frame(&m, "V", "a*v^4", "0");
        let v = vsi_verdict(&m, &f, 4).unwrap();
        assert_eq!(v.summary(), "CertifiedVSI_3, RefutedAtOrder_4");
        let refuted = v.first_refuted().unwrap();
        match &refuted.status {
            OrderStatus::RefutedAtOrder { witness, value } => {
                assert_eq!(*witness, WitnessKind::SelfNorm { order: 4 });
                let want = crate::expr::parse_expression("331776*a^2", m.ctx()).unwrap();
                assert_eq!(*value, want);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn first_order_example() {
        let (a, b, c) = ("V", "a*V*v^2", "b*v^3");
        let m = walker_metric(a, b, c, &["a", "b"]);
        let f = walker_frame(&m, a, b, c);
        let v = vsi_verdict(&m, &f, 2).unwrap();
        assert_eq!(v.summary(), "CertifiedVSI_1, RefutedAtOrder_2");
    }

    #[test]
    fn non_vsi_metric_is_refuted_at_zero() {
        let (a, b, c) = ("v^2", "0", "0");
        let m = walker_metric(a, b, c, &[]);
        let f = walker_frame(&m, a, b, c);
        let v = vsi_verdict(&m, &f, 1).unwrap();
        assert_eq!(v.orders[0].label(), "RefutedAtOrder_0");
    }

    fn unimodular(k: usize) -> impl Strategy<Value = Vec<Vec<i32>>> {
        prop::collection::vec((0..k, 0..k, -2i32..=2, any::<bool>()), 0..8).prop_map(move |ops| {
            let mut m: Vec<Vec<i32>> = (0..k).map(|i| (0..k).map(|j| i32::from(i == j)).collect()).collect();
            for (i, j, c, swap) in ops {
                if i == j {
                    continue;
                }
                if swap {
                    m.swap(i, j);
                } else {
                    for col in 0..k {
                        m[i][col] += c * m[j][col];
                    }
                }
            }
            m
        })
    }

    /// `λ' = M^{-T} λ` from the adjugate; `det M = ±1`.
    fn inverse_transpose_apply(m: &[Vec<i32>], lambda: &[i64]) -> Vec<i64> {
        // Solve Mᵀ x = λ by Gaussian elimination over the rationals.
        let k = m.len();
        let mut a: Vec<Vec<num_rational::BigRational>> = (0..k)
            .map(|i| {
                let mut row: Vec<_> = (0..k)
                    .map(|j| num_rational::BigRational::from_integer(m[j][i].into()))
                    .collect();
                row.push(num_rational::BigRational::from_integer(lambda[i].into()));
                row
            })
            .collect();
        for col in 0..k {
            let p = (col..k).find(|&r| a[r][col] != num_rational::BigRational::from_integer(0.into())).unwrap();
            a.swap(p, col);
            let pv = a[col][col].clone();
            for x in a[col].iter_mut() {
                *x = &*x / &pv;
            }
            for r in 0..k {
                if r != col {
                    let f = a[r][col].clone();
                    let pivot_row = a[col].clone();
                    for (x, y) in a[r].iter_mut().zip(&pivot_row) {
                        *x = &*x - &(&f * y);
                    }
                }
            }
        }
        a.iter().map(|row| num_traits::ToPrimitive::to_i64(&row[k].to_integer()).unwrap()).collect()
    }

    fn support(k: usize) -> impl Strategy<Value = SupportSet> {
        prop::collection::vec(prop::collection::vec(-2i32..=2, k), 0..6).prop_map(move |ws| {
            SupportSet::from_weights(k, ws.into_iter().map(BoostWeight)).unwrap()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(50))]

        #[test]
        fn strict_existence_is_lattice_invariant(
            (s, m) in (2usize..=4).prop_flat_map(|k| (support(k), unimodular(k)))
        ) {
            let before = find_separating_direction(&s, true);
            let image = s.transformed(&m);
            let after = find_separating_direction(&image, true);
            prop_assert_eq!(before.is_ok(), after.is_ok());
            if let Ok(d) = before {
                let moved = inverse_transpose_apply(&m, &d.lambda);
                prop_assert_eq!(SeparatingDirection::classify(&moved, &image), Some(Strictness::Strict));
            }
        }
    }
}
