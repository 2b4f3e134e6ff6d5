use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::curvature::CurvatureTensor;
use crate::expr::RationalFunction;
use crate::tensor::{unflatten, Tensor, Variance};

use super::{frame_components, frame_components_curvature, FrameError, NullFrame, Role};

/// Integer weight vector `b ∈ ℤᵏ`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BoostWeight(pub Vec<i32>);

impl BoostWeight {
    pub fn zero(k: usize) -> Self {
        BoostWeight(vec![0; k])
    }

    pub fn k(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }

    pub fn add(&self, other: &BoostWeight) -> BoostWeight {
        BoostWeight(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }
}

impl fmt::Display for BoostWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{x}")?;
        }
        f.write_str(")")
    }
}

/// Weight of the frame component `T(e_{A_1}, e_{A_2}, …)`: every slot holding
/// `ℓ^I` adds one to `b_I`, every slot holding `n^I` subtracts one.
pub fn boost_weight_of(multi_index: &[usize], frame: &NullFrame) -> BoostWeight {
    weight_with_variance(multi_index, None, frame)
}

/// As [`boost_weight_of`], with contravariant slots counted through the dual
/// coframe (the one-form dual to `ℓ^I` counts like `n^I`).
pub(crate) fn weight_with_variance(
    multi_index: &[usize],
    variance: Option<&[Variance]>,
    frame: &NullFrame,
) -> BoostWeight {
    let mut b = vec![0i32; frame.k()];
    for (slot, &a) in multi_index.iter().enumerate() {
        let up = variance.is_some_and(|v| v[slot] == Variance::Up);
        match frame.roles()[a] {
            Role::L(i) => b[i - 1] += if up { -1 } else { 1 },
            Role::N(i) => b[i - 1] -= if up { -1 } else { 1 },
            Role::M(_) => {}
        }
    }
    BoostWeight(b)
}

/// Frame components grouped by boost weight; identically zero components
/// are not stored. For curvature-symmetric input only one component per
/// symmetry orbit is kept (all members of an orbit share the weight).
#[derive(Clone, Debug, PartialEq)]
pub struct BWDecomposition {
    k: usize,
    rank: usize,
    orbit_representatives: bool,
    parts: BTreeMap<BoostWeight, Vec<(Vec<usize>, RationalFunction)>>,
}

impl BWDecomposition {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn orbit_representatives(&self) -> bool {
        self.orbit_representatives
    }

    pub fn support(&self) -> Vec<BoostWeight> {
        self.parts.keys().cloned().collect()
    }

    pub fn part(&self, b: &BoostWeight) -> &[(Vec<usize>, RationalFunction)] {
        self.parts.get(b).map_or(&[], |v| v.as_slice())
    }

    pub fn parts(&self) -> &BTreeMap<BoostWeight, Vec<(Vec<usize>, RationalFunction)>> {
        &self.parts
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn component_count(&self) -> usize {
        self.parts.values().map(|v| v.len()).sum()
    }

    /// Component counts per weight.
    pub fn counts(&self) -> Vec<(BoostWeight, usize)> {
        self.parts.iter().map(|(b, v)| (b.clone(), v.len())).collect()
    }

    /// Dense frame-component array rebuilt from the stored parts. Only
    /// available for decompositions of dense tensors.
    pub fn reassemble(&self, like: &Tensor) -> Option<Tensor> {
        if self.orbit_representatives {
            return None;
        }
        let mut out = Tensor::zeros(like.ctx().clone(), like.valence().clone());
        for entries in self.parts.values() {
            for (idx, v) in entries {
                out.set(idx, v.clone());
            }
        }
        Some(out)
    }
}

/// Boost-weight decomposition of any tensor; covariant slots use the frame
/// vectors and contravariant slots the dual coframe.
pub fn bw_decompose(t: &Tensor, frame: &NullFrame) -> Result<BWDecomposition, FrameError> {
    let comps = frame_components(t, frame)?;
    let dim = frame.dim();
    let rank = t.rank();
    let variance = t.valence().0.clone();
    let mut parts: BTreeMap<BoostWeight, Vec<(Vec<usize>, RationalFunction)>> = BTreeMap::new();
    for (flat, c) in comps.components().iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let idx = unflatten(flat, dim, rank);
        let b = weight_with_variance(&idx, Some(&variance), frame);
        parts.entry(b).or_default().push((idx, c.clone()));
    }
    Ok(BWDecomposition {
        k: frame.k(),
        rank,
        orbit_representatives: false,
        parts,
    })
}

/// Decomposition of a curvature-symmetric covariant tensor, one entry per orbit.
pub fn bw_decompose_curvature(t: &CurvatureTensor, frame: &NullFrame) -> BWDecomposition {
    let comps = frame_components_curvature(t, frame);
    from_frame_curvature(&comps, frame)
}

/// Groups already-computed frame components of a curvature tensor.
pub(crate) fn from_frame_curvature(comps: &CurvatureTensor, frame: &NullFrame) -> BWDecomposition {
    let mut parts: BTreeMap<BoostWeight, Vec<(Vec<usize>, RationalFunction)>> = BTreeMap::new();
    for (idx, c) in comps.nonzero_entries() {
        let b = boost_weight_of(&idx, frame);
        parts.entry(b).or_default().push((idx, c.clone()));
    }
    BWDecomposition {
        k: frame.k(),
        rank: comps.rank(),
        orbit_representatives: true,
        parts,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curvature::{christoffel, riemann};
    use crate::frame::tests::{walker_frame, walker_metric};
    use num_rational::BigRational;

    #[test]
    fn metric_has_weight_zero_only() {
        let m = walker_metric("V*v", "v^4", "u*v", &[]);
        let f = walker_frame(&m, "V*v", "v^4", "u*v");
        let d = bw_decompose(m.g(), &f).unwrap();
        assert_eq!(d.support(), vec![BoostWeight::zero(2)]);
        assert_eq!(
            d.reassemble(m.g()).unwrap().components(),
            crate::frame::frame_components(m.g(), &f).unwrap().components()
        );
        let inv = m.inverse().clone();
        assert_eq!(bw_decompose(&inv, &f).unwrap().support(), vec![BoostWeight::zero(2)]);
    }

    #[test]
    fn counting_rule_examples() {
        let m = walker_metric("0", "0", "0", &[]);
        let f = walker_frame(&m, "0", "0", "0");
        let pos = |r: &str| f.position(r.parse().unwrap()).unwrap();
        // Frame order ℓ¹, n¹, ℓ², n²: the component 1414 is T(ℓ¹, n², ℓ¹, n²).
        assert_eq!(boost_weight_of(&[0, 3, 0, 3], &f), BoostWeight(vec![2, -2]));
        // ℓ^I n^J with I ≠ J plus a pair that carries no weight.
        assert_eq!(
            boost_weight_of(&[pos("l1"), pos("n2")], &f),
            BoostWeight(vec![1, -1])
        );
        assert_eq!(boost_weight_of(&[pos("l1"), pos("n1")], &f), BoostWeight::zero(2));
    }

    #[test]
    fn zero_tensor_has_empty_support() {
        let m = walker_metric("0", "0", "0", &[]);
        let f = walker_frame(&m, "0", "0", "0");
        let r = riemann(&christoffel(&m));
        assert!(bw_decompose_curvature(&r, &f).is_empty());
    }

    #[test]
    fn boost_equivariance() {
        let m = walker_metric("V*v + u", "v^4*U", "v^3", &[]);
        let f = walker_frame(&m, "V*v + u", "v^4*U", "v^3");
        let r = riemann(&christoffel(&m));
        let s = [BigRational::new(2.into(), 3.into()), BigRational::new(5.into(), 1.into())];
        let d0 = bw_decompose_curvature(&r, &f);
        let d1 = bw_decompose_curvature(&r, &f.boosted(&s));
        assert_eq!(d0.support(), d1.support());
        for (b, entries) in d0.parts() {
            let mut factor = BigRational::from_integer(1.into());
            for (i, bi) in b.0.iter().enumerate() {
                let p = s[i].pow(*bi);
                factor *= p;
            }
            for ((i0, c0), (i1, c1)) in entries.iter().zip(d1.part(b)) {
                assert_eq!(i0, i1);
                assert_eq!(c0.scale(&factor), *c1);
            }
        }
    }
}
