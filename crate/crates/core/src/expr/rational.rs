use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::gcd::gcd;
use super::poly::Polynomial;
use super::ExprError;

/// A quotient of polynomials kept in normal form.
///
/// The numerator and denominator are coprime and the denominator's leading
/// coefficient is one, so two equal functions are structurally equal.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RationalFunction {
    num: Polynomial,
    den: Polynomial,
}

/// Cancels the common factor of `p / q` and makes `q` monic.
pub fn gcd_normalize(p: &Polynomial, q: &Polynomial) -> Result<(Polynomial, Polynomial), ExprError> {
    if q.is_zero() {
        return Err(ExprError::DivisionByZero);
    }
    let nvars = p.nvars().max(q.nvars());
    if p.is_zero() {
        return Ok((Polynomial::zero(nvars), Polynomial::one(nvars)));
    }
    if let Some(c) = q.constant_value() {
        let inv = c.recip();
        return Ok((p.scale(&inv), Polynomial::one(nvars)));
    }
    let g = gcd(p, q);
    let (p, q) = if g.is_one() {
        (p.clone(), q.clone())
    } else {
        (
            p.div_exact(&g).expect("gcd divides numerator"),
            q.div_exact(&g).expect("gcd divides denominator"),
        )
    };
    let lc = q.leading_coefficient();
    if lc.is_one() {
        Ok((p, q))
    } else {
        let inv = lc.recip();
        Ok((p.scale(&inv), q.scale(&inv)))
    }
}

impl RationalFunction {
    pub fn zero(nvars: usize) -> Self {
        RationalFunction {
            num: Polynomial::zero(nvars),
            den: Polynomial::one(nvars),
        }
    }

    pub fn one(nvars: usize) -> Self {
        Self::from_poly(Polynomial::one(nvars))
    }

    pub fn from_int(nvars: usize, n: i64) -> Self {
        Self::from_poly(Polynomial::from_int(nvars, n))
    }

    pub fn constant(nvars: usize, c: BigRational) -> Self {
        Self::from_poly(Polynomial::constant(nvars, c))
    }

    pub fn var(nvars: usize, var: usize) -> Self {
        Self::from_poly(Polynomial::var(nvars, var))
    }

    pub fn from_poly(p: Polynomial) -> Self {
        let den = Polynomial::one(p.nvars());
        RationalFunction { num: p, den }
    }

    pub fn new(num: Polynomial, den: Polynomial) -> Result<Self, ExprError> {
        let (num, den) = gcd_normalize(&num, &den)?;
        Ok(RationalFunction { num, den })
    }

    pub fn numerator(&self) -> &Polynomial {
        &self.num
    }

    pub fn denominator(&self) -> &Polynomial {
        &self.den
    }

    pub fn nvars(&self) -> usize {
        self.num.nvars()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    pub fn constant_value(&self) -> Option<BigRational> {
        if self.den.is_one() {
            self.num.constant_value()
        } else {
            None
        }
    }

    pub fn uses_var(&self, var: usize) -> bool {
        self.num.uses_var(var) || self.den.uses_var(var)
    }

    pub fn variables(&self) -> Vec<bool> {
        let mut a = self.num.variables();
        for (x, y) in a.iter_mut().zip(self.den.variables()) {
            *x |= y;
        }
        a
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars());
        }
        RationalFunction {
            num: self.num.scale(c),
            den: self.den.clone(),
        }
    }

    pub fn scale_int(&self, n: i64) -> Self {
        self.scale(&BigRational::from_integer(BigInt::from(n)))
    }

    pub fn recip(&self) -> Result<Self, ExprError> {
        Self::new(self.den.clone(), self.num.clone())
    }

    pub fn checked_div(&self, rhs: &RationalFunction) -> Result<Self, ExprError> {
        if rhs.is_zero() {
            return Err(ExprError::DivisionByZero);
        }
        Ok(self * &rhs.recip()?)
    }

    pub fn pow(&self, n: u32) -> Self {
        // Powers of coprime polynomials stay coprime.
        RationalFunction {
            num: self.num.pow(n),
            den: self.den.pow(n),
        }
    }

    /// Partial derivative in variable slot `var`, quotient rule.
    pub fn derivative(&self, var: usize) -> Self {
        if self.den.is_one() {
            return Self::from_poly(self.num.derivative(var));
        }
        if !self.den.uses_var(var) {
            return RationalFunction::new(self.num.derivative(var), self.den.clone())
                .expect("denominator is nonzero");
        }
        let num = &(&self.num.derivative(var) * &self.den) - &(&self.num * &self.den.derivative(var));
        let den = &self.den * &self.den;
        RationalFunction::new(num, den).expect("denominator is nonzero")
    }

    /// Exact value at a point. Unassigned occurring variables and poles are errors.
    pub fn evaluate(&self, point: &[Option<BigRational>]) -> Result<BigRational, ExprError> {
        let n = self
            .num
            .evaluate(point)
            .map_err(ExprError::MissingAssignment)?;
        let d = self
            .den
            .evaluate(point)
            .map_err(ExprError::MissingAssignment)?;
        if d.is_zero() {
            return Err(ExprError::Pole);
        }
        Ok(n / d)
    }

    pub fn substitute(&self, var: usize, value: &BigRational) -> Result<Self, ExprError> {
        let num = self.num.substitute(var, value);
        let den = self.den.substitute(var, value);
        if den.is_zero() {
            return Err(ExprError::Pole);
        }
        RationalFunction::new(num, den)
    }
}

impl<'a> Add<&'a RationalFunction> for &'a RationalFunction {
    type Output = RationalFunction;
    fn add(self, rhs: &'a RationalFunction) -> RationalFunction {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        if self.den.is_one() && rhs.den.is_one() {
            return RationalFunction::from_poly(&self.num + &rhs.num);
        }
        if self.den == rhs.den {
            return RationalFunction::new(&self.num + &rhs.num, self.den.clone())
                .expect("denominator is nonzero");
        }
        if rhs.den.is_one() {
            let num = &self.num + &(&rhs.num * &self.den);
            // gcd(a + c b, b) = gcd(a, b) = 1
            return RationalFunction {
                num,
                den: self.den.clone(),
            };
        }
        if self.den.is_one() {
            return rhs + self;
        }
        let g = gcd(&self.den, &rhs.den);
        if g.is_one() {
            let num = &(&self.num * &rhs.den) + &(&rhs.num * &self.den);
            let den = &self.den * &rhs.den;
            return RationalFunction::new(num, den).expect("denominator is nonzero");
        }
        let b1 = self.den.div_exact(&g).expect("gcd divides");
        let d1 = rhs.den.div_exact(&g).expect("gcd divides");
        let num = &(&self.num * &d1) + &(&rhs.num * &b1);
        let den = &(&b1 * &d1) * &g;
        RationalFunction::new(num, den).expect("denominator is nonzero")
    }
}

impl<'a> Sub<&'a RationalFunction> for &'a RationalFunction {
    type Output = RationalFunction;
    fn sub(self, rhs: &'a RationalFunction) -> RationalFunction {
        self + &(-rhs)
    }
}

impl<'a> Mul<&'a RationalFunction> for &'a RationalFunction {
    type Output = RationalFunction;
    fn mul(self, rhs: &'a RationalFunction) -> RationalFunction {
        if self.is_zero() || rhs.is_zero() {
            return RationalFunction::zero(self.nvars().max(rhs.nvars()));
        }
        if self.den.is_one() && rhs.den.is_one() {
            return RationalFunction::from_poly(&self.num * &rhs.num);
        }
        if let Some(c) = rhs.constant_value() {
            return self.scale(&c);
        }
        if let Some(c) = self.constant_value() {
            return rhs.scale(&c);
        }
        // Cross-cancel: with a/b, c/d in normal form only gcd(a,d), gcd(c,b) can be nontrivial.
        let g1 = gcd(&self.num, &rhs.den);
        let g2 = gcd(&rhs.num, &self.den);
        let a = self.num.div_exact(&g1).expect("gcd divides");
        let d = rhs.den.div_exact(&g1).expect("gcd divides");
        let c = rhs.num.div_exact(&g2).expect("gcd divides");
        let b = self.den.div_exact(&g2).expect("gcd divides");
        let num = &a * &c;
        let den = &b * &d;
        let lc = den.leading_coefficient();
        if lc.is_one() {
            RationalFunction { num, den }
        } else {
            let inv = lc.recip();
            RationalFunction {
                num: num.scale(&inv),
                den: den.scale(&inv),
            }
        }
    }
}

impl Neg for &RationalFunction {
    type Output = RationalFunction;
    fn neg(self) -> RationalFunction {
        RationalFunction {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

impl Add for RationalFunction {
    type Output = RationalFunction;
    fn add(self, rhs: RationalFunction) -> RationalFunction {
        &self + &rhs
    }
}

impl Sub for RationalFunction {
    type Output = RationalFunction;
    fn sub(self, rhs: RationalFunction) -> RationalFunction {
        &self - &rhs
    }
}

impl Mul for RationalFunction {
    type Output = RationalFunction;
    fn mul(self, rhs: RationalFunction) -> RationalFunction {
        &self * &rhs
    }
}

impl Neg for RationalFunction {
    type Output = RationalFunction;
    fn neg(self) -> RationalFunction {
        -&self
    }
}
