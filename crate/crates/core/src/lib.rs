//! Exact symbolic curvature engine for pseudo-Riemannian metrics of signature
//! `(k, k+m)`: curvature tensors and their covariant derivatives, boost-weight
//! decompositions in null frames, polynomial curvature invariants, and
//! decision procedures for vanishing-scalar-invariant (VSI) degeneracy.

pub mod catalog;
pub mod curvature;
pub mod degeneracy;
pub mod expr;
pub mod frame;
pub mod io;
pub mod oracle;
pub mod tensor;
