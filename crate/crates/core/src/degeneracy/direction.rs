use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use super::SupportSet;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Strictness {
    Strict,
    Weak,
}

/// `λ ∈ ℤᵏ` (a primitive representative of a rational direction) with
/// `b·λ < 0` (strict) or `b·λ ≤ 0` (weak) for every weight of a support set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SeparatingDirection {
    pub lambda: Vec<i64>,
    pub strictness: Strictness,
}

impl SeparatingDirection {
    /// Checks the direction against a support set and returns the strongest
    /// strictness it satisfies.
    pub fn classify(lambda: &[i64], s: &SupportSet) -> Option<Strictness> {
        if lambda.iter().all(|&x| x == 0) {
            return None;
        }
        let mut strict = true;
        for b in s.iter() {
            let d: i128 = b.0.iter().zip(lambda).map(|(&x, &y)| x as i128 * y as i128).sum();
            if d > 0 {
                return None;
            }
            strict &= d < 0;
        }
        Some(if strict { Strictness::Strict } else { Strictness::Weak })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum NoDirection {
    /// The zero weight is present, so no strict direction can exist.
    ZeroWeight,
    /// The linear system has no solution.
    Infeasible,
    /// A solution exists but does not fit in 64-bit integers.
    Overflow,
}

impl fmt::Display for NoDirection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NoDirection::ZeroWeight => f.write_str("the zero boost weight occurs, so b·λ < 0 fails for b = 0"),
            NoDirection::Infeasible => f.write_str("no λ satisfies the sign conditions"),
            NoDirection::Overflow => f.write_str("direction exists but exceeds 64-bit integers"),
        }
    }
}

/// Exact search: candidate enumeration for `k ≤ 3`, Fourier–Motzkin otherwise.
pub fn find_separating_direction(s: &SupportSet, strict: bool) -> Result<SeparatingDirection, NoDirection> {
    if s.k() <= 3 {
        enumerate_direction(s, strict)
    } else {
        fourier_motzkin_direction(s, strict)
    }
}

type IVec = Vec<i128>;

fn primitive(v: IVec) -> Option<IVec> {
    let g = v.iter().fold(0i128, |g, &x| g.gcd(&x));
    (g != 0).then(|| v.into_iter().map(|x| x / g).collect())
}

fn cross(a: &[i128], b: &[i128]) -> IVec {
    vec![
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Candidate directions whose weakly separating members generate the cone
/// `{λ : b·λ ≤ 0 ∀b}`: axes, the weights, and normals to subsets of weights
/// (for `k = 3` also normals built from a weight and a lineality direction).
fn candidates(s: &SupportSet) -> Vec<IVec> {
    let k = s.k();
    let ws: Vec<IVec> = s.iter().map(|b| b.0.iter().map(|&x| x as i128).collect()).collect();
    let axes: Vec<IVec> = (0..k)
        .map(|i| (0..k).map(|j| i128::from(i == j)).collect())
        .collect();
    let mut raw: Vec<IVec> = axes.clone();
    raw.extend(ws.iter().cloned());
    match k {
        2 => raw.extend(ws.iter().map(|b| vec![-b[1], b[0]])),
        3 => {
            let mut normals = Vec::new();
            for (i, a) in ws.iter().enumerate() {
                for b in &ws[i + 1..] {
                    normals.push(cross(a, b));
                }
            }
            for b in &ws {
                for n in normals.iter().chain(&axes) {
                    raw.push(cross(b, n));
                }
            }
            raw.extend(normals);
        }
        _ => {}
    }
    let mut signed: Vec<IVec> = raw
        .iter()
        .flat_map(|v| [v.clone(), v.iter().map(|x| -x).collect()])
        .filter_map(primitive)
        .collect();
    // Directions with a positive leading entry first, so ties resolve to them.
    signed.sort_by_key(|v| v.iter().find(|&&x| x != 0).is_some_and(|&x| x < 0));
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for p in signed {
        if seen.insert(p.clone()) {
            out.push(p);
        }
    }
    out
}

fn to_direction(v: &[i128], s: &SupportSet) -> Result<SeparatingDirection, NoDirection> {
    let lambda: Vec<i64> = v
        .iter()
        .map(|&x| i64::try_from(x).map_err(|_| NoDirection::Overflow))
        .collect::<Result<_, _>>()?;
    let strictness = SeparatingDirection::classify(&lambda, s).ok_or(NoDirection::Infeasible)?;
    Ok(SeparatingDirection { lambda, strictness })
}

/// Exhaustive candidate search, intended for `k ≤ 3` (for larger `k` the
/// candidate set is incomplete and only positive answers are reliable).
pub fn enumerate_direction(s: &SupportSet, strict: bool) -> Result<SeparatingDirection, NoDirection> {
    if strict && s.contains_zero() {
        return Err(NoDirection::ZeroWeight);
    }
    let weak: Vec<IVec> = candidates(s)
        .into_iter()
        .filter(|v| s.iter().all(|b| dot(&b.0, v) <= 0))
        .collect();
    if let Some(v) = weak.iter().find(|v| s.iter().all(|b| dot(&b.0, v) < 0)) {
        return to_direction(v, s);
    }
    // The weakly separating candidates generate the cone; their sum lies in
    // its interior whenever the interior is nonempty.
    let sum: IVec = (0..s.k()).map(|i| weak.iter().map(|v| v[i]).sum()).collect();
    if let Some(p) = primitive(sum) {
        if s.iter().all(|b| dot(&b.0, &p) < 0) {
            return to_direction(&p, s);
        }
    }
    if strict {
        return Err(NoDirection::Infeasible);
    }
    weak.first().map_or(Err(NoDirection::Infeasible), |v| to_direction(v, s))
}

fn dot(b: &[i32], v: &[i128]) -> i128 {
    b.iter().zip(v).map(|(&x, &y)| x as i128 * y).sum()
}

/// `a·x ≤ c`
type Constraint = (Vec<BigRational>, BigRational);

fn normalize(mut c: Constraint) -> Constraint {
    if let Some(lead) = c.0.iter().find(|x| !x.is_zero()).map(|x| x.abs()) {
        for x in c.0.iter_mut() {
            *x = &*x / &lead;
        }
        c.1 = &c.1 / &lead;
    }
    c
}

/// Solves `a·x ≤ c` exactly; returns a solution preferring small integers.
fn fm_solve(n: usize, system: Vec<Constraint>) -> Option<Vec<BigRational>> {
    // levels[v] holds the constraints in variables 0..v.
    let mut levels: Vec<Vec<Constraint>> = vec![Vec::new(); n + 1];
    levels[n] = system;
    for v in (0..n).rev() {
        let mut next = BTreeSet::new();
        let (mut pos, mut neg) = (Vec::new(), Vec::new());
        for c in &levels[v + 1] {
            match c.0[v].cmp(&BigRational::zero()) {
                std::cmp::Ordering::Greater => pos.push(c),
                std::cmp::Ordering::Less => neg.push(c),
                std::cmp::Ordering::Equal => {
                    next.insert(normalize(c.clone()));
                }
            }
        }
        for p in &pos {
            for q in &neg {
                let (wp, wq) = (-&q.0[v], p.0[v].clone());
                let a: Vec<BigRational> = (0..n).map(|i| &wp * &p.0[i] + &wq * &q.0[i]).collect();
                let c = &wp * &p.1 + &wq * &q.1;
                next.insert(normalize((a, c)));
            }
        }
        levels[v] = next.into_iter().collect();
    }
    if levels[0].iter().any(|(_, c)| c.is_negative()) {
        return None;
    }
    let mut x = vec![BigRational::zero(); n];
    for v in 0..n {
        let (mut lo, mut hi): (Option<BigRational>, Option<BigRational>) = (None, None);
        for (a, c) in &levels[v + 1] {
            if a[v].is_zero() {
                continue;
            }
            let rest: BigRational = (0..v).map(|i| &a[i] * &x[i]).sum();
            let bound = (c - rest) / &a[v];
            if a[v].is_positive() {
                hi = Some(hi.map_or(bound.clone(), |h| h.min(bound)));
            } else {
                lo = Some(lo.map_or(bound.clone(), |l| l.max(bound)));
            }
        }
        x[v] = pick(lo, hi);
    }
    Some(x)
}

/// The value of smallest magnitude in `[lo, hi]`, an integer when possible.
fn pick(lo: Option<BigRational>, hi: Option<BigRational>) -> BigRational {
    match (lo, hi) {
        (Some(l), h) if l.is_positive() => {
            let c = l.ceil();
            if h.is_none_or(|h| c <= h) { c } else { l }
        }
        (l, Some(h)) if h.is_negative() => {
            let f = h.floor();
            if l.is_none_or(|l| f >= l) { f } else { h }
        }
        _ => BigRational::zero(),
    }
}

fn scale_to_integers(x: &[BigRational]) -> Option<Vec<BigInt>> {
    let den = x.iter().fold(BigInt::one(), |acc, r| acc.lcm(r.denom()));
    let ints: Vec<BigInt> = x.iter().map(|r| (r * BigRational::from_integer(den.clone())).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |g, v| g.gcd(v));
    (!g.is_zero()).then(|| ints.into_iter().map(|v| v / &g).collect())
}

/// Fourier–Motzkin elimination on `b·λ ≤ −1` (strict) or on `b·λ ≤ 0`
/// together with `±λ_i ≥ 1` for each coordinate in turn (weak).
pub fn fourier_motzkin_direction(s: &SupportSet, strict: bool) -> Result<SeparatingDirection, NoDirection> {
    let k = s.k();
    if strict && s.contains_zero() {
        return Err(NoDirection::ZeroWeight);
    }
    if s.is_empty() {
        let mut lambda = vec![0; k];
        lambda[0] = 1;
        return Ok(SeparatingDirection {
            lambda,
            strictness: Strictness::Strict,
        });
    }
    let rows = |rhs: i64| -> Vec<Constraint> {
        s.iter()
            .map(|b| {
                (
                    b.0.iter().map(|&x| BigRational::from_integer(x.into())).collect(),
                    BigRational::from_integer(rhs.into()),
                )
            })
            .collect()
    };
    let finish = |x: Vec<BigRational>| -> Result<SeparatingDirection, NoDirection> {
        let ints = scale_to_integers(&x).ok_or(NoDirection::Infeasible)?;
        let lambda: Vec<i64> = ints
            .iter()
            .map(|v| v.to_i64().ok_or(NoDirection::Overflow))
            .collect::<Result<_, _>>()?;
        let strictness = SeparatingDirection::classify(&lambda, s).ok_or(NoDirection::Infeasible)?;
        Ok(SeparatingDirection { lambda, strictness })
    };
    if let Some(x) = fm_solve(k, rows(-1)) {
        return finish(x);
    }
    if strict {
        return Err(NoDirection::Infeasible);
    }
    for i in 0..k {
        for sign in [-1i64, 1] {
            let mut sys = rows(0);
            let mut a = vec![BigRational::zero(); k];
            a[i] = BigRational::from_integer(sign.into());
            sys.push((a, BigRational::from_integer((-1).into())));
            if let Some(x) = fm_solve(k, sys) {
                return finish(x);
            }
        }
    }
    Err(NoDirection::Infeasible)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frame::BoostWeight;
    use proptest::prelude::*;

    fn set(k: usize, ws: &[&[i32]]) -> SupportSet {
        SupportSet::from_weights(k, ws.iter().map(|w| BoostWeight(w.to_vec()))).unwrap()
    }

    #[test]
    fn documented_examples() {
        let s = set(2, &[&[-1, 1], &[-2, 0]]);
        let d = find_separating_direction(&s, true).unwrap();
        assert_eq!(d.lambda, vec![1, 0]);
        assert_eq!(d.strictness, Strictness::Strict);

        let s = set(2, &[&[1, -1], &[-1, 1]]);
        assert_eq!(find_separating_direction(&s, true), Err(NoDirection::Infeasible));
        let d = find_separating_direction(&s, false).unwrap();
        assert_eq!(d.lambda, vec![1, 1]);
        assert_eq!(d.strictness, Strictness::Weak);

        let s = set(3, &[]);
        assert_eq!(find_separating_direction(&s, true).unwrap().lambda, vec![1, 0, 0]);

        let s = set(2, &[&[0, 0], &[-1, 0]]);
        assert_eq!(find_separating_direction(&s, true), Err(NoDirection::ZeroWeight));
    }

    #[test]
    fn interior_needs_a_sum_of_rays() {
        // Every single candidate touches a boundary; only (1,1)-like sums work.
        let s = set(2, &[&[-1, 0], &[0, -1], &[-1, 1], &[1, -2]]);
        let d = enumerate_direction(&s, true).unwrap();
        assert_eq!(d.strictness, Strictness::Strict);
        let s = set(3, &[&[-1, 0, 0], &[0, -1, 0], &[0, 0, -1]]);
        assert_eq!(enumerate_direction(&s, true).unwrap().lambda, vec![1, 1, 1]);
    }

    #[test]
    fn fourier_motzkin_examples() {
        let s = set(4, &[&[-1, 1, 0, 0], &[0, -1, 1, 0], &[0, 0, -1, 1], &[0, 0, 0, -1]]);
        let d = fourier_motzkin_direction(&s, true).unwrap();
        assert_eq!(d.strictness, Strictness::Strict);
        let s = set(4, &[&[1, 0, 0, 0], &[-1, 0, 0, 0]]);
        assert_eq!(fourier_motzkin_direction(&s, true), Err(NoDirection::Infeasible));
        let d = fourier_motzkin_direction(&s, false).unwrap();
        assert_eq!(d.lambda[0], 0);
    }

    /// Brute force over a box of integer directions; complete for the tiny
    /// supports generated below because some interior point has entries
    /// bounded by sums of 2×2 minors.
    fn boxed(s: &SupportSet, strict: bool, m: i64) -> bool {
        let k = s.k();
        let total = (2 * m + 1).pow(k as u32);
        (0..total).any(|mut n| {
            let lambda: Vec<i64> = (0..k)
                .map(|_| {
                    let x = n % (2 * m + 1) - m;
                    n /= 2 * m + 1;
                    x
                })
                .collect();
            match SeparatingDirection::classify(&lambda, s) {
                Some(Strictness::Strict) => true,
                Some(Strictness::Weak) => !strict,
                None => false,
            }
        })
    }

    fn support(k: usize) -> impl Strategy<Value = SupportSet> {
        prop::collection::vec(prop::collection::vec(-2i32..=2, k), 0..6).prop_map(move |ws| {
            SupportSet::from_weights(k, ws.into_iter().map(BoostWeight)).unwrap()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn enumeration_agrees_with_box_search_k2(s in support(2), strict in any::<bool>()) {
            let found = enumerate_direction(&s, strict);
            prop_assert_eq!(found.is_ok(), boxed(&s, strict, 8), "{:?} {:?}", s, found);
            prop_assert_eq!(found.is_ok(), fourier_motzkin_direction(&s, strict).is_ok());
        }

        #[test]
        fn enumeration_agrees_with_fourier_motzkin_k3(s in support(3), strict in any::<bool>()) {
            let found = enumerate_direction(&s, strict);
            prop_assert_eq!(found.is_ok(), fourier_motzkin_direction(&s, strict).is_ok(), "{:?} {:?} {:?}", s, found, fourier_motzkin_direction(&s, strict));
            if let Ok(d) = found {
                let c = SeparatingDirection::classify(&d.lambda, &s);
                prop_assert!(c.is_some());
                if strict {
                    prop_assert_eq!(c, Some(Strictness::Strict));
                }
            }
        }

        #[test]
        fn box_search_confirms_k3(s in support(3)) {
            if boxed(&s, true, 6) {
                prop_assert!(enumerate_direction(&s, true).is_ok());
            }
        }
    }
}
