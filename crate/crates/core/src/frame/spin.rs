use serde::Serialize;

use crate::curvature::{covariant_derivative, Connection};
use crate::expr::{display, RationalFunction};
use crate::tensor::{Tensor, Valence};

use super::{frame_components, FrameError, NullFrame, Role};

/// Projections of `∇ℓ` for `(ℓ, n, m, m̃) = (ℓ¹, n¹, ℓ², −n²)`:
///
/// ```text
/// ℓ^b ∇_b ℓ^a = (ε+ε̃) ℓ^a + κ̃ m^a + κ m̃^a
/// m̃^b ∇_b ℓ^a = (α+β̃) ℓ^a + σ̃ m^a + ρ m̃^a
/// m^b ∇_b ℓ^a = (α̃+β) ℓ^a + ρ̃ m^a + σ m̃^a
/// n^b ∇_b ℓ^a = (γ+γ̃) ℓ^a + τ̃ m^a + τ m̃^a
/// ```
#[derive(Clone, Debug, PartialEq)]
pub struct SpinCoefficients4D {
    pub kappa: RationalFunction,
    pub kappa_t: RationalFunction,
    pub rho: RationalFunction,
    pub rho_t: RationalFunction,
    pub sigma: RationalFunction,
    pub sigma_t: RationalFunction,
    pub tau: RationalFunction,
    pub tau_t: RationalFunction,
    pub eps_sum: RationalFunction,
    pub alpha_beta_t: RationalFunction,
    pub alpha_t_beta: RationalFunction,
    pub gamma_sum: RationalFunction,
}

impl SpinCoefficients4D {
    /// Name and value of all twelve quantities, in a fixed order.
    pub fn named(&self) -> Vec<(&'static str, &RationalFunction)> {
        vec![
            ("kappa", &self.kappa),
            ("kappa~", &self.kappa_t),
            ("rho", &self.rho),
            ("rho~", &self.rho_t),
            ("sigma", &self.sigma),
            ("sigma~", &self.sigma_t),
            ("tau", &self.tau),
            ("tau~", &self.tau_t),
            ("epsilon+epsilon~", &self.eps_sum),
            ("alpha+beta~", &self.alpha_beta_t),
            ("alpha~+beta", &self.alpha_t_beta),
            ("gamma+gamma~", &self.gamma_sum),
        ]
    }

    pub fn all_zero(&self) -> bool {
        self.named().iter().all(|(_, v)| v.is_zero())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct GeometryFlags {
    pub walker_plane: bool,
    pub kundt: bool,
    pub recurrent: bool,
    pub covariantly_constant: bool,
}

fn require_neutral_4d(frame: &NullFrame) -> Result<(), FrameError> {
    if frame.dim() != 4 || frame.ctx().signature() != (2, 0) {
        return Err(FrameError::Unsupported(
            "spin coefficients need dimension 4 and signature (2,2)".into(),
        ));
    }
    Ok(())
}

/// Frame components `L(A, B) = e_A^a e_B^b ∇_b ℓ_a` of the covariant
/// derivative of the lowered first null vector.
fn nabla_ell(frame: &NullFrame, conn: &Connection) -> Result<Tensor, FrameError> {
    let metric = conn.metric();
    let ell = frame.vector(Role::L(1)).expect("role set checked");
    let lowered = Tensor::from_components(frame.ctx().clone(), Valence::all_down(1), metric.lower(ell))?;
    let d = covariant_derivative(&lowered, conn).map_err(|e| FrameError::Unsupported(e.to_string()))?;
    frame_components(&d, frame)
}

pub fn spin_coefficients(frame: &NullFrame, conn: &Connection) -> Result<SpinCoefficients4D, FrameError> {
    require_neutral_4d(frame)?;
    let l = nabla_ell(frame, conn)?;
    let p = |r: &str| frame.position(r.parse().expect("literal role")).expect("role set checked");
    let (l1, n1, l2, n2) = (p("l1"), p("n1"), p("l2"), p("n2"));
    let at = |a: usize, b: usize| l.get(&[a, b]).clone();
    // For V = X^b ∇_b ℓ: ℓ-part g(V, n), m-part −g(V, m̃) = g(V, n²), m̃-part −g(V, m) = −g(V, ℓ²).
    let coeffs = SpinCoefficients4D {
        eps_sum: at(n1, l1),
        kappa_t: at(n2, l1),
        kappa: -at(l2, l1),
        alpha_beta_t: -at(n1, n2),
        sigma_t: -at(n2, n2),
        rho: at(l2, n2),
        alpha_t_beta: at(n1, l2),
        rho_t: at(n2, l2),
        sigma: -at(l2, l2),
        gamma_sum: at(n1, n1),
        tau_t: at(n2, n1),
        tau: -at(l2, n1),
    };
    check_reconstruction(frame, conn, &coeffs)?;
    Ok(coeffs)
}

/// Recomputes `X^b ∇_b ℓ^a` directly in coordinates and compares with the
/// expansion given by the extracted coefficients.
fn check_reconstruction(frame: &NullFrame, conn: &Connection, s: &SpinCoefficients4D) -> Result<(), FrameError> {
    let dim = 4;
    let nvars = frame.ctx().nvars();
    let vec_of = |r: &str| frame.vector(r.parse().expect("literal role")).expect("role set").to_vec();
    let ell = vec_of("l1");
    let n = vec_of("n1");
    let m = vec_of("l2");
    let mt: Vec<RationalFunction> = vec_of("n2").iter().map(|c| -c).collect();
    // ∇_b ℓ^a = ∂_b ℓ^a + Γ^a_{bc} ℓ^c
    let grad = |x: &[RationalFunction]| -> Vec<RationalFunction> {
        (0..dim)
            .map(|a| {
                let mut acc = RationalFunction::zero(nvars);
                for b in 0..dim {
                    if x[b].is_zero() {
                        continue;
                    }
                    let mut d = ell[a].derivative(b);
                    for c in 0..dim {
                        let g = conn.symbol(a, b, c);
                        if !g.is_zero() && !ell[c].is_zero() {
                            d = &d + &(g * &ell[c]);
                        }
                    }
                    acc = &acc + &(&x[b] * &d);
                }
                acc
            })
            .collect()
    };
    let combo = |c0: &RationalFunction, c1: &RationalFunction, c2: &RationalFunction| -> Vec<RationalFunction> {
        (0..dim)
            .map(|a| &(&(c0 * &ell[a]) + &(c1 * &m[a])) + &(c2 * &mt[a]))
            .collect()
    };
    let checks = [
        (&ell, combo(&s.eps_sum, &s.kappa_t, &s.kappa)),
        (&mt, combo(&s.alpha_beta_t, &s.sigma_t, &s.rho)),
        (&m, combo(&s.alpha_t_beta, &s.rho_t, &s.sigma)),
        (&n, combo(&s.gamma_sum, &s.tau_t, &s.tau)),
    ];
    for (x, want) in checks {
        let got = grad(x);
        if got != want {
            let diff: Vec<String> = got
                .iter()
                .zip(&want)
                .map(|(a, b)| display(&(a - b), frame.ctx()))
                .collect();
            return Err(FrameError::Unsupported(format!(
                "frame derivative has a component outside span(ℓ, m, m̃): {diff:?}"
            )));
        }
    }
    Ok(())
}

/// Geometric flags from the spin coefficients and `∇ℓ`.
///
/// `recurrent` means `∇_b ℓ_a = ℓ_a k_b` for some `k`, checked as the
/// vanishing of `∇ℓ(X, ·)` for every frame vector `X` orthogonal to `ℓ`.
pub fn classify_geometry(frame: &NullFrame, conn: &Connection) -> Result<(GeometryFlags, SpinCoefficients4D), FrameError> {
    let s = spin_coefficients(frame, conn)?;
    let l = nabla_ell(frame, conn)?;
    let n1 = frame.position(Role::N(1)).expect("role set");
    let recurrent = (0..4)
        .filter(|&a| a != n1)
        .all(|a| (0..4).all(|b| l.get(&[a, b]).is_zero()));
    let flags = GeometryFlags {
        walker_plane: [&s.kappa, &s.rho, &s.sigma, &s.tau].iter().all(|x| x.is_zero()),
        kundt: [&s.kappa_t, &s.kappa, &s.rho_t, &s.rho, &s.sigma_t, &s.sigma]
            .iter()
            .all(|x| x.is_zero()),
        recurrent,
        covariantly_constant: l.is_zero(),
    };
    Ok((flags, s))
}
