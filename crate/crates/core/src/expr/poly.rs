use std::cmp::Ordering;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use smallvec::SmallVec;

use super::ExprError;

pub type Exponents = SmallVec<[u16; 8]>;

/// Sparse multivariate polynomial with rational coefficients.
///
/// Terms are kept sorted in strictly decreasing lexicographic order of their
/// exponent vectors and no stored coefficient is zero, so structural equality
/// is mathematical equality.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Polynomial {
    nvars: usize,
    terms: Vec<(Exponents, BigRational)>,
}

// Coefficients are almost always small; doing the arithmetic in machine
// words avoids the bignum gcd that `Ratio` runs on every operation.
#[inline]
fn small(a: &BigRational) -> Option<(i64, i64)> {
    Some((a.numer().to_i64()?, a.denom().to_i64()?))
}

fn from_i128(n: i128, d: i128) -> BigRational {
    let g = gcd_u128(n.unsigned_abs(), d.unsigned_abs()) as i128;
    let (n, d) = if g == 1 { (n, d) } else { (n / g, d / g) };
    let (n, d) = if d < 0 { (-n, -d) } else { (n, d) };
    BigRational::new_raw(BigInt::from(n), BigInt::from(d))
}

fn gcd_u128(mut a: u128, mut b: u128) -> u128 {
    if a == 0 {
        return b;
    }
    if b == 0 {
        return a;
    }
    let shift = (a | b).trailing_zeros();
    a >>= a.trailing_zeros();
    loop {
        b >>= b.trailing_zeros();
        if a > b {
            std::mem::swap(&mut a, &mut b);
        }
        b -= a;
        if b == 0 {
            return a << shift;
        }
    }
}

#[inline]
pub(crate) fn qmul(a: &BigRational, b: &BigRational) -> BigRational {
    match (small(a), small(b)) {
        (Some((an, ad)), Some((bn, bd))) => {
            if ad == 1 && bd == 1 {
                BigRational::from_integer(BigInt::from(an as i128 * bn as i128))
            } else {
                from_i128(an as i128 * bn as i128, ad as i128 * bd as i128)
            }
        }
        _ => a * b,
    }
}

#[inline]
pub(crate) fn qadd(a: &BigRational, b: &BigRational) -> BigRational {
    match (small(a), small(b)) {
        (Some((an, ad)), Some((bn, bd))) => {
            if ad == bd {
                from_i128(an as i128 + bn as i128, ad as i128)
            } else {
                from_i128(an as i128 * bd as i128 + bn as i128 * ad as i128, ad as i128 * bd as i128)
            }
        }
        _ => a + b,
    }
}

#[inline]
pub(crate) fn qsub(a: &BigRational, b: &BigRational) -> BigRational {
    match (small(a), small(b)) {
        (Some((an, ad)), Some((bn, bd))) => {
            if ad == bd {
                from_i128(an as i128 - bn as i128, ad as i128)
            } else {
                from_i128(an as i128 * bd as i128 - bn as i128 * ad as i128, ad as i128 * bd as i128)
            }
        }
        _ => a - b,
    }
}

fn zero_exps(nvars: usize) -> Exponents {
    SmallVec::from_elem(0, nvars)
}

impl Polynomial {
    pub fn zero(nvars: usize) -> Self {
        Polynomial {
            nvars,
            terms: Vec::new(),
        }
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, BigRational::one())
    }

    pub fn constant(nvars: usize, c: BigRational) -> Self {
        if c.is_zero() {
            return Self::zero(nvars);
        }
        Polynomial {
            nvars,
            terms: vec![(zero_exps(nvars), c)],
        }
    }

    pub fn from_int(nvars: usize, c: i64) -> Self {
        Self::constant(nvars, BigRational::from_integer(BigInt::from(c)))
    }

    pub fn var(nvars: usize, var: usize) -> Self {
        let mut e = zero_exps(nvars);
        e[var] = 1;
        Polynomial {
            nvars,
            terms: vec![(e, BigRational::one())],
        }
    }

    pub fn monomial(exps: Exponents, c: BigRational) -> Self {
        let nvars = exps.len();
        if c.is_zero() {
            return Self::zero(nvars);
        }
        Polynomial {
            nvars,
            terms: vec![(exps, c)],
        }
    }

    /// Builds a polynomial from unsorted terms, combining duplicates.
    pub fn from_terms(nvars: usize, mut terms: Vec<(Exponents, BigRational)>) -> Self {
        terms.sort_unstable_by(|a, b| b.0.cmp(&a.0));
        let mut out: Vec<(Exponents, BigRational)> = Vec::with_capacity(terms.len());
        for (e, c) in terms {
            match out.last_mut() {
                Some((le, lc)) if *le == e => *lc = qadd(lc, &c),
                _ => {
                    if let Some((_, lc)) = out.last() {
                        if lc.is_zero() {
                            out.pop();
                        }
                    }
                    out.push((e, c));
                }
            }
        }
        if let Some((_, lc)) = out.last() {
            if lc.is_zero() {
                out.pop();
            }
        }
        Polynomial { nvars, terms: out }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> &[(Exponents, BigRational)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0.iter().all(|&e| e == 0) && self.terms[0].1.is_one()
    }

    /// The value if the polynomial is constant (zero included).
    pub fn constant_value(&self) -> Option<BigRational> {
        match self.terms.as_slice() {
            [] => Some(BigRational::zero()),
            [(e, c)] if e.iter().all(|&x| x == 0) => Some(c.clone()),
            _ => None,
        }
    }

    pub fn is_constant(&self) -> bool {
        self.constant_value().is_some()
    }

    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    pub fn leading(&self) -> Option<&(Exponents, BigRational)> {
        self.terms.first()
    }

    pub fn leading_coefficient(&self) -> BigRational {
        self.terms
            .first()
            .map(|t| t.1.clone())
            .unwrap_or_else(BigRational::zero)
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        Polynomial {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, x)| (e.clone(), qmul(x, c))).collect(),
        }
    }

    /// Divides by the leading coefficient. Zero stays zero.
    pub fn monic(&self) -> Self {
        match self.terms.first() {
            None => self.clone(),
            Some((_, lc)) if lc.is_one() => self.clone(),
            Some((_, lc)) => self.scale(&lc.recip()),
        }
    }

    pub fn degree_in(&self, var: usize) -> u16 {
        self.terms.iter().map(|(e, _)| e[var]).max().unwrap_or(0)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms
            .iter()
            .map(|(e, _)| e.iter().map(|&x| x as u32).sum())
            .max()
            .unwrap_or(0)
    }

    pub fn uses_var(&self, var: usize) -> bool {
        self.terms.iter().any(|(e, _)| e[var] > 0)
    }

    /// Flags of the variables that actually occur.
    pub fn variables(&self) -> Vec<bool> {
        let mut used = vec![false; self.nvars];
        for (e, _) in &self.terms {
            for (u, &x) in used.iter_mut().zip(e.iter()) {
                *u |= x > 0;
            }
        }
        used
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut result = Self::one(self.nvars);
        let mut base = self.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                result = &result * &base;
            }
            n >>= 1;
            if n > 0 {
                base = &base * &base;
            }
        }
        result
    }

    pub fn derivative(&self, var: usize) -> Self {
        let mut terms = Vec::with_capacity(self.terms.len());
        for (e, c) in &self.terms {
            let d = e[var];
            if d == 0 {
                continue;
            }
            let mut ne = e.clone();
            ne[var] -= 1;
            terms.push((ne, c * BigRational::from_integer(BigInt::from(d))));
        }
        // Lowering one exponent in the same slot keeps lex order.
        Polynomial {
            nvars: self.nvars,
            terms,
        }
    }

    /// Full evaluation; every occurring variable must be assigned.
    pub fn evaluate(&self, point: &[Option<BigRational>]) -> Result<BigRational, usize> {
        // Everything is scaled to the common denominator L·Π d_i^{deg_i} so the
        // sum runs over integers and only the result is reduced.
        let mut deg = vec![0u16; self.nvars];
        let mut lcm = BigInt::one();
        for (e, c) in &self.terms {
            for (var, &d) in e.iter().enumerate() {
                if d > 0 {
                    point.get(var).and_then(|x| x.as_ref()).ok_or(var)?;
                    deg[var] = deg[var].max(d);
                }
            }
            if !c.denom().is_one() {
                lcm = num_integer::Integer::lcm(&lcm, c.denom());
            }
        }
        let powers = |var: usize, part: &BigInt| -> Vec<BigInt> {
            let mut out = vec![BigInt::one()];
            for _ in 0..deg[var] {
                let next = out.last().unwrap() * part;
                out.push(next);
            }
            out
        };
        let mut num_pows = Vec::with_capacity(self.nvars);
        let mut den_pows = Vec::with_capacity(self.nvars);
        for (var, &d) in deg.iter().enumerate() {
            if d == 0 {
                num_pows.push(Vec::new());
                den_pows.push(Vec::new());
            } else {
                let x = point[var].as_ref().expect("checked above");
                num_pows.push(powers(var, x.numer()));
                den_pows.push(powers(var, x.denom()));
            }
        }
        let mut acc = BigInt::zero();
        for (e, c) in &self.terms {
            let mut t = if c.denom().is_one() {
                c.numer() * &lcm
            } else {
                c.numer() * (&lcm / c.denom())
            };
            for (var, &d) in deg.iter().enumerate() {
                if d == 0 {
                    continue;
                }
                let k = e[var] as usize;
                if k > 0 {
                    t *= &num_pows[var][k];
                }
                if (d as usize) > k {
                    t *= &den_pows[var][d as usize - k];
                }
            }
            acc += t;
        }
        let mut den = lcm;
        for (var, &d) in deg.iter().enumerate() {
            if d > 0 {
                den *= &den_pows[var][d as usize];
            }
        }
        Ok(BigRational::new(acc, den))
    }

    /// Substitutes a value for one variable, leaving the rest symbolic.
    pub fn substitute(&self, var: usize, value: &BigRational) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| {
                let mut ne = e.clone();
                let d = ne[var];
                ne[var] = 0;
                (ne, c * num_traits::pow(value.clone(), d as usize))
            })
            .collect();
        Self::from_terms(self.nvars, terms)
    }

    /// Coefficients with respect to `var`; entry `i` multiplies `var^i`.
    pub fn coefficients_in(&self, var: usize) -> Vec<Polynomial> {
        let deg = self.degree_in(var) as usize;
        let mut buckets: Vec<Vec<(Exponents, BigRational)>> = vec![Vec::new(); deg + 1];
        for (e, c) in &self.terms {
            let d = e[var] as usize;
            let mut ne = e.clone();
            ne[var] = 0;
            buckets[d].push((ne, c.clone()));
        }
        buckets
            .into_iter()
            .map(|t| Self::from_terms(self.nvars, t))
            .collect()
    }

    pub fn from_coefficients_in(nvars: usize, var: usize, coeffs: &[Polynomial]) -> Self {
        let mut terms = Vec::new();
        for (d, p) in coeffs.iter().enumerate() {
            for (e, c) in &p.terms {
                let mut ne = e.clone();
                ne[var] += d as u16;
                terms.push((ne, c.clone()));
            }
        }
        Self::from_terms(nvars, terms)
    }

    /// Multiplies by the monomial `x^exps`.
    pub fn shift(&self, exps: &[u16]) -> Self {
        Polynomial {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| {
                    let ne: Exponents = e.iter().zip(exps).map(|(a, b)| a + b).collect();
                    (ne, c.clone())
                })
                .collect(),
        }
    }

    /// Quotient when `divisor` divides `self` exactly, otherwise `None`.
    pub fn div_exact(&self, divisor: &Polynomial) -> Option<Polynomial> {
        let (lead_e, lead_c) = divisor.terms.first()?;
        if divisor.terms.len() == 1 {
            let inv = lead_c.recip();
            let mut terms = Vec::with_capacity(self.terms.len());
            for (e, c) in &self.terms {
                let mut ne = e.clone();
                for (x, &y) in ne.iter_mut().zip(lead_e.iter()) {
                    if *x < y {
                        return None;
                    }
                    *x -= y;
                }
                terms.push((ne, c * &inv));
            }
            return Some(Polynomial {
                nvars: self.nvars,
                terms,
            });
        }
        let inv = lead_c.recip();
        let mut rem = self.clone();
        let mut quot = Vec::new();
        while let Some((re, rc)) = rem.terms.first() {
            let mut qe = re.clone();
            for (x, &y) in qe.iter_mut().zip(lead_e.iter()) {
                if *x < y {
                    return None;
                }
                *x -= y;
            }
            let qc = rc * &inv;
            let t = Polynomial::monomial(qe.clone(), qc.clone());
            rem = &rem - &(&t * divisor);
            quot.push((qe, qc));
        }
        Some(Polynomial::from_terms(self.nvars, quot))
    }

    pub fn check_nvars(&self, other: &Polynomial) -> Result<(), ExprError> {
        if self.nvars != other.nvars {
            return Err(ExprError::Context(format!(
                "polynomials over {} and {} variables",
                self.nvars, other.nvars
            )));
        }
        Ok(())
    }

    /// Exact square root when the polynomial is a perfect square.
    pub fn sqrt_exact(&self) -> Option<Polynomial> {
        if self.is_zero() {
            return Some(self.clone());
        }
        let (le, lc) = self.terms.first()?;
        if le.iter().any(|&x| x % 2 == 1) {
            return None;
        }
        let root_c = rational_sqrt(lc)?;
        let root_e: Exponents = le.iter().map(|&x| x / 2).collect();
        let mut root = Polynomial::monomial(root_e, root_c);
        let two_lead = root.terms[0].clone();
        let bound: usize = (0..self.nvars)
            .map(|v| self.degree_in(v) as usize / 2 + 1)
            .fold(1usize, |a, b| a.saturating_mul(b));
        for _ in 0..=bound {
            let rem = self - &(&root * &root);
            let Some((re, rc)) = rem.terms.first() else {
                return Some(root);
            };
            let mut qe = re.clone();
            for (x, &y) in qe.iter_mut().zip(two_lead.0.iter()) {
                if *x < y {
                    return None;
                }
                *x -= y;
            }
            let qc = rc / (&two_lead.1 * BigRational::from_integer(BigInt::from(2)));
            if qe >= two_lead.0 {
                return None;
            }
            root = &root + &Polynomial::monomial(qe, qc);
        }
        None
    }
}

pub(crate) fn rational_sqrt(q: &BigRational) -> Option<BigRational> {
    if q.is_negative() {
        return None;
    }
    let n = q.numer().sqrt();
    let d = q.denom().sqrt();
    if &(&n * &n) == q.numer() && &(&d * &d) == q.denom() {
        Some(BigRational::new(n, d))
    } else {
        None
    }
}

fn merge(a: &Polynomial, b: &Polynomial, negate_b: bool) -> Polynomial {
    let mut terms = Vec::with_capacity(a.terms.len() + b.terms.len());
    let mut i = 0;
    let mut j = 0;
    while i < a.terms.len() && j < b.terms.len() {
        match a.terms[i].0.cmp(&b.terms[j].0) {
            Ordering::Greater => {
                terms.push(a.terms[i].clone());
                i += 1;
            }
            Ordering::Less => {
                let (e, c) = &b.terms[j];
                terms.push((e.clone(), if negate_b { -c } else { c.clone() }));
                j += 1;
            }
            Ordering::Equal => {
                let c = if negate_b {
                    qsub(&a.terms[i].1, &b.terms[j].1)
                } else {
                    qadd(&a.terms[i].1, &b.terms[j].1)
                };
                if !c.is_zero() {
                    terms.push((a.terms[i].0.clone(), c));
                }
                i += 1;
                j += 1;
            }
        }
    }
    terms.extend_from_slice(&a.terms[i..]);
    for (e, c) in &b.terms[j..] {
        terms.push((e.clone(), if negate_b { -c } else { c.clone() }));
    }
    Polynomial {
        nvars: a.nvars.max(b.nvars),
        terms,
    }
}

impl<'a> Add<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &'a Polynomial) -> Polynomial {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        merge(self, rhs, false)
    }
}

impl<'a> Sub<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &'a Polynomial) -> Polynomial {
        if rhs.is_zero() {
            return self.clone();
        }
        merge(self, rhs, true)
    }
}

impl<'a> Mul<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &'a Polynomial) -> Polynomial {
        let nvars = self.nvars.max(rhs.nvars);
        if self.is_zero() || rhs.is_zero() {
            return Polynomial::zero(nvars);
        }
        if let Some(c) = rhs.constant_value() {
            return self.scale(&c);
        }
        if let Some(c) = self.constant_value() {
            return rhs.scale(&c);
        }
        if rhs.terms.len() == 1 {
            let (e, c) = &rhs.terms[0];
            // Multiplying by a monomial preserves the order.
            let terms = self
                .terms
                .iter()
                .map(|(x, d)| {
                    let ne: Exponents = x.iter().zip(e.iter()).map(|(a, b)| a + b).collect();
                    (ne, qmul(d, c))
                })
                .collect();
            return Polynomial { nvars, terms };
        }
        if self.terms.len() == 1 {
            return rhs * self;
        }
        let mut terms = Vec::with_capacity(self.terms.len() * rhs.terms.len());
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let ne: Exponents = ea.iter().zip(eb.iter()).map(|(a, b)| a + b).collect();
                terms.push((ne, qmul(ca, cb)));
            }
        }
        Polynomial::from_terms(nvars, terms)
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }
}
