use serde::Serialize;

use crate::frame::{bw_decompose, NullFrame};
use crate::tensor::{Metric, Tensor, TensorError};

use super::{check_B_conditions, BConditions, DegeneracyError};

/// B-conditions of `T`, `S`, `T ⊗ S` and one contraction of the product,
/// with the guarantees of the tensor-product rules checked against them.
#[derive(Clone, Debug, Serialize)]
pub struct ProductReport {
    pub t: BConditions,
    pub s: BConditions,
    pub product: BConditions,
    /// `T ⊗ S` with the first slot of `T` contracted against the first slot
    /// of `S`; absent when either factor is a scalar.
    pub contraction: Option<BConditions>,
    pub violations: Vec<String>,
}

impl ProductReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

fn tensor_err(e: TensorError) -> DegeneracyError {
    DegeneracyError::Frame(e.into())
}

pub fn tensor_product_property_check(
    t: &Tensor,
    s: &Tensor,
    frame: &NullFrame,
    metric: &Metric,
) -> Result<ProductReport, DegeneracyError> {
    let ct = check_B_conditions(&bw_decompose(t, frame)?);
    let cs = check_B_conditions(&bw_decompose(s, frame)?);
    let p = t.tensor_product(s).map_err(tensor_err)?;
    let cp = check_B_conditions(&bw_decompose(&p, frame)?);
    let contraction = if t.rank() > 0 && s.rank() > 0 {
        let raised = p.raise_lower(0, metric).map_err(tensor_err)?;
        let c = if raised.valence().0[0] != raised.valence().0[t.rank()] {
            raised.contract(0, t.rank()).map_err(tensor_err)?
        } else {
            raised.raise_lower(t.rank(), metric).map_err(tensor_err)?.contract(0, t.rank()).map_err(tensor_err)?
        };
        Some(check_B_conditions(&bw_decompose(&c, frame)?))
    } else {
        None
    };

    let k = frame.k();
    let mut violations = Vec::new();
    let i = ct.s_index().min(cs.s_index());
    if cp.s_index() < i {
        violations.push(format!("product has S_{} but both factors have S_{i}", cp.s_index()));
    }
    if cs.n {
        if cp.s_index() < ct.s_index() {
            violations.push(format!(
                "S has N and T has S_{} but the product only has S_{}",
                ct.s_index(),
                cp.s_index()
            ));
        }
        if ct.s_index() == k && !cp.n {
            violations.push("T has S_k and S has N but the product lacks N".into());
        }
    }
    if ct.n && cs.n {
        if !cp.n {
            violations.push("both factors have N but the product lacks N".into());
        }
        if contraction.as_ref().is_some_and(|c| !c.n) {
            violations.push("both factors have N but a contraction lacks N".into());
        }
    }
    Ok(ProductReport {
        t: ct,
        s: cs,
        product: cp,
        contraction,
        violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frame::tests::{walker_frame, walker_metric};
    use crate::tensor::Valence;

    #[test]
    fn metric_squared_keeps_zero_weight() {
        let m = walker_metric("V*v", "v^3", "U", &[]);
        let f = walker_frame(&m, "V*v", "v^3", "U");
        let r = tensor_product_property_check(m.g(), m.g(), &f, &m).unwrap();
        assert!(r.holds());
        assert_eq!(r.product.s_index(), 2);
        assert!(!r.product.n);
    }

    #[test]
    fn null_covectors_have_n() {
        let m = walker_metric("0", "0", "0", &[]);
        let f = walker_frame(&m, "0", "0", "0");
        // g(ℓ¹, ·) is nonzero only on n¹, so it has weight (-1, 0).
        let l1 = f.vector("l1".parse().unwrap()).unwrap().to_vec();
        let w = Tensor::from_components(m.ctx().clone(), Valence::all_down(1), m.lower(&l1)).unwrap();
        let r = tensor_product_property_check(&w, &w, &f, &m).unwrap();
        assert!(r.t.n && r.product.n);
        assert!(r.contraction.as_ref().unwrap().n);
        assert!(r.holds());
    }
}
