//! Multivariate polynomial GCD over the rationals.
//!
//! Content/primitive-part recursion on one variable at a time, with a
//! primitive pseudo-remainder sequence for the univariate step. The fast
//! paths (constants, monomials, equal inputs) cover almost every call the
//! curvature pipeline makes.

use num_rational::BigRational;

use super::poly::{Exponents, Polynomial};

/// Monic greatest common divisor. `gcd(0, 0) = 0`.
pub fn gcd(a: &Polynomial, b: &Polynomial) -> Polynomial {
    let nvars = a.nvars().max(b.nvars());
    if a.is_zero() {
        return b.monic();
    }
    if b.is_zero() {
        return a.monic();
    }
    if a.is_constant() || b.is_constant() {
        return Polynomial::one(nvars);
    }
    if a.is_monomial() {
        return monomial_gcd(a, b);
    }
    if b.is_monomial() {
        return monomial_gcd(b, a);
    }
    if a == b {
        return a.monic();
    }
    let va = a.variables();
    let vb = b.variables();
    // A variable present in only one argument only enters through its content.
    for var in 0..nvars {
        if va[var] && !vb[var] {
            return gcd(&content_in(a, var), b);
        }
        if vb[var] && !va[var] {
            return gcd(a, &content_in(b, var));
        }
    }
    let var = (0..nvars)
        .filter(|&v| va[v])
        .min_by_key(|&v| a.degree_in(v).max(b.degree_in(v)))
        .expect("non-constant polynomial has a variable");

    let ca = content_in(a, var);
    let cb = content_in(b, var);
    let pa = divide_coefficients(a, var, &ca);
    let pb = divide_coefficients(b, var, &cb);
    let c = gcd(&ca, &cb);
    let g = primitive_prs(&pa, &pb, var);
    (&c * &g).monic()
}

/// Monomial `m` against arbitrary `p`: the largest monomial dividing both.
fn monomial_gcd(m: &Polynomial, p: &Polynomial) -> Polynomial {
    let mut exps: Exponents = m.terms()[0].0.clone();
    for (e, _) in p.terms() {
        for (x, &y) in exps.iter_mut().zip(e.iter()) {
            *x = (*x).min(y);
        }
        if exps.iter().all(|&x| x == 0) {
            break;
        }
    }
    Polynomial::monomial(exps, BigRational::from_integer(1.into()))
}

/// GCD of the coefficients of `p` viewed as a polynomial in `var`.
pub fn content_in(p: &Polynomial, var: usize) -> Polynomial {
    let mut coeffs = p.coefficients_in(var).into_iter().filter(|c| !c.is_zero());
    let Some(first) = coeffs.next() else {
        return Polynomial::zero(p.nvars());
    };
    let mut g = first.monic();
    for c in coeffs {
        if g.is_one() {
            break;
        }
        g = gcd(&g, &c);
    }
    g
}

fn divide_coefficients(p: &Polynomial, var: usize, content: &Polynomial) -> Polynomial {
    if content.is_one() {
        return p.clone();
    }
    let coeffs: Vec<Polynomial> = p
        .coefficients_in(var)
        .iter()
        .map(|c| c.div_exact(content).expect("content divides every coefficient"))
        .collect();
    Polynomial::from_coefficients_in(p.nvars(), var, &coeffs)
}

fn primitive_part(p: &Polynomial, var: usize) -> Polynomial {
    let c = content_in(p, var);
    divide_coefficients(p, var, &c).monic()
}

/// GCD of two polynomials primitive in `var`.
fn primitive_prs(a: &Polynomial, b: &Polynomial, var: usize) -> Polynomial {
    let (mut r0, mut r1) = if a.degree_in(var) >= b.degree_in(var) {
        (a.clone(), b.clone())
    } else {
        (b.clone(), a.clone())
    };
    loop {
        if r1.degree_in(var) == 0 {
            // r1 is free of var and primitive, hence a unit.
            return Polynomial::one(a.nvars());
        }
        let r = pseudo_remainder(&r0, &r1, var);
        if r.is_zero() {
            return primitive_part(&r1, var);
        }
        r0 = r1;
        r1 = primitive_part(&r, var);
    }
}

/// `lc(b)^e * a mod b` in `var`, with the power left implicit.
fn pseudo_remainder(a: &Polynomial, b: &Polynomial, var: usize) -> Polynomial {
    let nvars = a.nvars();
    let bc = b.coefficients_in(var);
    let db = bc.len() - 1;
    let lcb = &bc[db];
    let mut rc = a.coefficients_in(var);
    while rc.len() > db && !rc.is_empty() {
        let dr = rc.len() - 1;
        let lr = rc[dr].clone();
        let shift = dr - db;
        for c in rc.iter_mut() {
            *c = &*c * lcb;
        }
        for (i, bcoef) in bc.iter().enumerate() {
            let t = &lr * bcoef;
            rc[i + shift] = &rc[i + shift] - &t;
        }
        while matches!(rc.last(), Some(c) if c.is_zero()) {
            rc.pop();
        }
    }
    Polynomial::from_coefficients_in(nvars, var, &rc)
}
