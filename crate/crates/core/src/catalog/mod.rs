//! Metric families with adapted null frames and their expected
//! classification: Walker metrics (general form and the three tiers of
//! conditions), the two neutral Kundt VSI classes, and fixed examples.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::degeneracy::{OrderStatus, VSIVerdict};
use crate::expr::{parse_expression, ExprError, RationalFunction, VariableContext};
use crate::frame::{FrameError, NullFrame, Role};
use crate::tensor::{Metric, TensorError};

#[derive(Debug, Error)]
pub enum CatalogError {
    #[error("unknown family '{0}'")]
    UnknownFamily(String),
    #[error("family '{family}' has no function slot '{name}' (allowed: {allowed})")]
    UnknownBinding { family: String, name: String, allowed: String },
    #[error("'{name}' may depend on ({allowed}) but depends on {variable}")]
    Dependence { name: String, allowed: String, variable: String },
    #[error("epsilon must be 0 or 1, got {0}")]
    Epsilon(String),
    #[error("tier must be 1, 2 or 3, got {0}")]
    Tier(usize),
    #[error("tier must be 1, 2 or 3, got '{0}'")]
    TierText(String),
    #[error("binding '{name}': {source}")]
    Expr { name: String, source: ExprError },
    #[error(transparent)]
    Tensor(#[from] TensorError),
    #[error(transparent)]
    Frame(#[from] FrameError),
}

/// What the family's theory says about `vsi_verdict`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExpectedTier {
    /// Certified at every order checked.
    Vsi,
    /// Certified through order `j`, refuted at `j + 1`.
    Exactly(usize),
    /// Certified through order `j`; nothing claimed beyond.
    AtLeast(usize),
    Unspecified,
}

impl ExpectedTier {
    /// Whether a verdict computed to order `k` is consistent with the claim.
    pub fn matches(&self, verdict: &VSIVerdict, k: usize) -> bool {
        let certified = verdict.highest_certified();
        match *self {
            ExpectedTier::Vsi => certified == Some(k),
            ExpectedTier::AtLeast(j) => certified.is_some_and(|c| c >= j.min(k)),
            ExpectedTier::Exactly(j) if k <= j => certified == Some(k),
            ExpectedTier::Exactly(j) => {
                certified == Some(j)
                    && matches!(verdict.orders[j + 1].status, OrderStatus::RefutedAtOrder { .. })
            }
            ExpectedTier::Unspecified => true,
        }
    }
}

impl fmt::Display for ExpectedTier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExpectedTier::Vsi => f.write_str("VSI"),
            ExpectedTier::Exactly(j) => write!(f, "VSI_{j} and not VSI_{}", j + 1),
            ExpectedTier::AtLeast(j) => write!(f, "VSI_{j}"),
            ExpectedTier::Unspecified => f.write_str("unspecified"),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ExpectedFlags {
    pub walker: Option<bool>,
    pub kundt: Option<bool>,
}

#[derive(Clone, Debug)]
pub struct Binding {
    pub name: String,
    pub value: RationalFunction,
}

#[derive(Clone, Debug)]
pub struct FamilyInstance {
    pub id: String,
    pub bindings: Vec<Binding>,
    pub metric: Metric,
    pub frame: NullFrame,
    pub flags: ExpectedFlags,
    pub tier: ExpectedTier,
}

impl FamilyInstance {
    pub fn ctx(&self) -> &Arc<VariableContext> {
        self.metric.ctx()
    }

    pub fn binding(&self, name: &str) -> Option<&RationalFunction> {
        self.bindings.iter().find(|b| b.name == name).map(|b| &b.value)
    }
}

/// A function slot and the coordinates it may depend on.
struct Slot {
    name: &'static str,
    allowed: &'static [&'static str],
}

const UU: &[&str] = &["u", "U"];
const UVU: &[&str] = &["u", "v", "U"];
const UUV: &[&str] = &["u", "U", "V"];
const UTX: &[&str] = &["u", "T", "X"];

fn identifiers(text: &str) -> impl Iterator<Item = &str> {
    text.split(|c: char| !(c.is_ascii_alphanumeric() || c == '_'))
        .filter(|t| t.chars().next().is_some_and(|c| c.is_ascii_alphabetic()))
}

/// Parses the bindings of one family. Identifiers that are not coordinates
/// become parameters; missing slots default to zero.
fn bind(
    family: &str,
    coords: &[&str],
    signature: (usize, usize),
    slots: &[Slot],
    given: &[(&str, &str)],
) -> Result<(Arc<VariableContext>, BTreeMap<&'static str, RationalFunction>), CatalogError> {
    let allowed_names = || slots.iter().map(|s| s.name).collect::<Vec<_>>().join(", ");
    for (name, _) in given {
        if !slots.iter().any(|s| s.name == *name) {
            return Err(CatalogError::UnknownBinding {
                family: family.into(),
                name: name.to_string(),
                allowed: allowed_names(),
            });
        }
    }
    let params: BTreeSet<&str> = given
        .iter()
        .flat_map(|(_, text)| identifiers(text))
        .filter(|id| !coords.contains(id))
        .collect();
    let params: Vec<&str> = params.into_iter().collect();
    let ctx = Arc::new(
        VariableContext::new(coords, &params, signature).map_err(|source| CatalogError::Expr {
            name: "coordinates".into(),
            source,
        })?,
    );
    let mut out = BTreeMap::new();
    for slot in slots {
        let value = match given.iter().rev().find(|(n, _)| *n == slot.name) {
            Some((_, text)) => parse_expression(text, &ctx).map_err(|source| CatalogError::Expr {
                name: slot.name.into(),
                source,
            })?,
            None => RationalFunction::zero(ctx.nvars()),
        };
        for (var, c) in coords.iter().enumerate() {
            if !slot.allowed.contains(c) && !value.derivative(var).is_zero() {
                return Err(CatalogError::Dependence {
                    name: slot.name.into(),
                    allowed: slot.allowed.join(", "),
                    variable: c.to_string(),
                });
            }
        }
        out.insert(slot.name, value);
    }
    Ok((ctx, out))
}

fn var(ctx: &VariableContext, name: &str) -> RationalFunction {
    RationalFunction::var(ctx.nvars(), ctx.lookup(name).expect("coordinate exists"))
}

fn frame(ctx: &Arc<VariableContext>, roles: &[&str], vectors: Vec<Vec<RationalFunction>>) -> Result<NullFrame, FrameError> {
    let roles: Vec<Role> = roles.iter().map(|r| r.parse()).collect::<Result<_, _>>()?;
    NullFrame::from_vectors(ctx.clone(), roles, vectors)
}

/// `2du(dv + A du + C dU) + 2dU(dV + B dU)` with the frame
/// `ℓ¹ = ∂_v, n¹ = ∂_u − A∂_v, ℓ² = ∂_V, n² = ∂_U − C∂_v − B∂_V`.
fn walker_from(
    id: String,
    ctx: Arc<VariableContext>,
    a: RationalFunction,
    b: RationalFunction,
    c: RationalFunction,
    bindings: Vec<Binding>,
    tier: ExpectedTier,
) -> Result<FamilyInstance, CatalogError> {
    let n = ctx.nvars();
    let z = || RationalFunction::zero(n);
    let o = || RationalFunction::one(n);
    let entries = vec![
        vec![a.scale_int(2)],
        vec![o(), z()],
        vec![c.clone(), z(), b.scale_int(2)],
        vec![z(), z(), o(), z()],
    ];
    let metric = Metric::from_lower_triangle(ctx.clone(), &entries)?;
    let frame = frame(
        &ctx,
        &["l1", "n1", "l2", "n2"],
        vec![
            vec![z(), o(), z(), z()],
            vec![o(), -&a, z(), z()],
            vec![z(), z(), z(), o()],
            vec![z(), -&c, o(), -&b],
        ],
    )?;
    Ok(FamilyInstance {
        id,
        bindings,
        metric,
        frame,
        flags: ExpectedFlags {
            walker: Some(true),
            kundt: None,
        },
        tier,
    })
}

const WALKER_COORDS: &[&str] = &["u", "v", "U", "V"];

/// Walker metric with arbitrary `A`, `B`, `C` in `(u, v, U, V)` and parameters.
pub fn walker_general(a: &str, b: &str, c: &str) -> Result<FamilyInstance, CatalogError> {
    const ALL: &[&str] = &["u", "v", "U", "V"];
    let slots = [
        Slot { name: "A", allowed: ALL },
        Slot { name: "B", allowed: ALL },
        Slot { name: "C", allowed: ALL },
    ];
    let (ctx, f) = bind("walker", WALKER_COORDS, (2, 0), &slots, &[("A", a), ("B", b), ("C", c)])?;
    let bindings = binding_list(&f);
    let flat = f.values().all(|v| v.is_zero());
    let tier = if flat { ExpectedTier::Vsi } else { ExpectedTier::Unspecified };
    walker_from("walker".into(), ctx, f["A"].clone(), f["B"].clone(), f["C"].clone(), bindings, tier)
        .map(|mut inst| {
            if flat {
                inst.flags.kundt = Some(true);
            }
            inst
        })
}

fn binding_list(f: &BTreeMap<&'static str, RationalFunction>) -> Vec<Binding> {
    f.iter()
        .map(|(k, v)| Binding {
            name: k.to_string(),
            value: v.clone(),
        })
        .collect()
}

/// The flat neutral metric in Walker coordinates.
pub fn flat4() -> Result<FamilyInstance, CatalogError> {
    let mut inst = walker_general("0", "0", "0")?;
    inst.id = "flat4".into();
    Ok(inst)
}

/// `2du(dv + V du) + 2dU(dV + a v⁴ dU)`: VSI₃ and, for `a ≠ 0`, not VSI₄.
pub fn vsi3_example(a: &str) -> Result<FamilyInstance, CatalogError> {
    let b = format!("({a})*v^4");
    let mut inst = walker_general("V", &b, "0")?;
    inst.id = "vsi3".into();
    inst.tier = if parse_is_zero(a) { ExpectedTier::Vsi } else { ExpectedTier::Exactly(3) };
    Ok(inst)
}

/// `2du(dv + V du + b v³ dU) + 2dU(dV + a V v² dU)`: VSI₁ and, unless
/// `a = b = 0`, not VSI₂.
pub fn vsi1_example(a: &str, b: &str) -> Result<FamilyInstance, CatalogError> {
    let bb = format!("({a})*V*v^2");
    let cc = format!("({b})*v^3");
    let mut inst = walker_general("V", &bb, &cc)?;
    inst.id = "vsi1".into();
    inst.tier = if parse_is_zero(a) && parse_is_zero(b) {
        ExpectedTier::Vsi
    } else {
        ExpectedTier::Exactly(1)
    };
    Ok(inst)
}

fn parse_is_zero(text: &str) -> bool {
    let params: Vec<&str> = identifiers(text).collect::<BTreeSet<_>>().into_iter().collect();
    VariableContext::new::<&str>(&[], &params, (0, 0))
        .ok()
        .and_then(|ctx| parse_expression(text, &ctx).ok())
        .is_some_and(|f| f.is_zero())
}

/// Walker metric satisfying the tier-`tier` functional forms:
///
/// ```text
/// tier 1: A = v A1 + V A2 + A0,  B = V B1 + B0,  C = C1 + V C2 + C0
/// tier 2: tier 1 with B1 = v B11 + B10,  C1 = v² C12 + v C11 + C10
/// tier 3: tier 2 with B0 = v³ B03 + v² B02 + v B01 + B00
/// ```
///
/// `A0, A1, A2, C0, C2` and the tier-2/3 coefficients depend on `(u, U)`;
/// `B0, B1, C1` on `(u, v, U)`.
pub fn walker_cond(tier: usize, given: &[(&str, &str)]) -> Result<FamilyInstance, CatalogError> {
    let mut slots = vec![
        Slot { name: "A0", allowed: UU },
        Slot { name: "A1", allowed: UU },
        Slot { name: "A2", allowed: UU },
        Slot { name: "C0", allowed: UU },
        Slot { name: "C2", allowed: UU },
    ];
    match tier {
        1 => slots.extend([
            Slot { name: "B0", allowed: UVU },
            Slot { name: "B1", allowed: UVU },
            Slot { name: "C1", allowed: UVU },
        ]),
        2 | 3 => {
            slots.extend(["B10", "B11", "C10", "C11", "C12"].map(|name| Slot { name, allowed: UU }));
            if tier == 2 {
                slots.push(Slot { name: "B0", allowed: UVU });
            } else {
                slots.extend(["B00", "B01", "B02", "B03"].map(|name| Slot { name, allowed: UU }));
            }
        }
        t => return Err(CatalogError::Tier(t)),
    }
    let family = format!("walker-cond{tier}");
    let (ctx, f) = bind(&family, WALKER_COORDS, (2, 0), &slots, given)?;
    let v = var(&ctx, "v");
    let vv = var(&ctx, "V");
    let poly_in_v = |names: &[&str]| -> RationalFunction {
        // names[i] multiplies v^i
        let mut acc = RationalFunction::zero(ctx.nvars());
        for (i, n) in names.iter().enumerate() {
            acc = &acc + &(&f[n] * &v.pow(i as u32));
        }
        acc
    };
    let (b1, c1) = if tier == 1 {
        (f["B1"].clone(), f["C1"].clone())
    } else {
        (poly_in_v(&["B10", "B11"]), poly_in_v(&["C10", "C11", "C12"]))
    };
    let b0 = if tier == 3 { poly_in_v(&["B00", "B01", "B02", "B03"]) } else { f["B0"].clone() };
    let a = &(&(&v * &f["A1"]) + &(&vv * &f["A2"])) + &f["A0"];
    let b = &(&vv * &b1) + &b0;
    let c = &(&c1 + &(&vv * &f["C2"])) + &f["C0"];

    let vi = ctx.lookup("v").expect("coordinate");
    let dv = |g: &RationalFunction, n: usize| (0..n).fold(g.clone(), |acc, _| acc.derivative(vi));
    let a2 = &f["A2"];
    let tier_claim = match tier {
        1 => {
            let obstructed = !(a2 * &dv(&b1, 2)).is_zero() || !(a2 * &dv(&c1, 3)).is_zero();
            if obstructed { ExpectedTier::Exactly(1) } else { ExpectedTier::AtLeast(1) }
        }
        2 => {
            if (a2 * &dv(&b0, 4)).is_zero() { ExpectedTier::AtLeast(3) } else { ExpectedTier::Exactly(3) }
        }
        _ => ExpectedTier::Vsi,
    };
    let mut bindings = binding_list(&f);
    bindings.extend([("A", &a), ("B", &b), ("C", &c)].map(|(n, x)| Binding {
        name: n.into(),
        value: x.clone(),
    }));
    walker_from(family, ctx, a, b, c, bindings, tier_claim)
}

/// The two neutral Kundt VSI classes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KundtCase {
    Null,
    SpacelikeTimelike,
}

/// Null case, coordinates `(u, v, U, V)`:
///
/// ```text
/// 2du(dv + H du + (v W1U + W0U) dU + W0V dV) + 2dU dV,   H = v H1 + H0
/// ```
///
/// Spacelike/timelike case, coordinates `(u, v, T, X)`:
///
/// ```text
/// 2du(dv + H du + W0T dT + (v W1 + W0X) dX) − dT² + dX²
/// H = v² W1²/8 + v H1 + H0,   W1 = −2 eps / X,   eps ∈ {0, 1}
/// ```
pub fn kundt_vsi(case: KundtCase, given: &[(&str, &str)]) -> Result<FamilyInstance, CatalogError> {
    match case {
        KundtCase::Null => kundt_null(given),
        KundtCase::SpacelikeTimelike => kundt_spacelike(given),
    }
}

fn kundt_null(given: &[(&str, &str)]) -> Result<FamilyInstance, CatalogError> {
    let slots = [
        Slot { name: "W1U", allowed: UU },
        Slot { name: "W0U", allowed: UUV },
        Slot { name: "W0V", allowed: UUV },
        Slot { name: "H1", allowed: UUV },
        Slot { name: "H0", allowed: UUV },
    ];
    let (ctx, f) = bind("kundt-null", WALKER_COORDS, (2, 0), &slots, given)?;
    let v = var(&ctx, "v");
    let h = &(&v * &f["H1"]) + &f["H0"];
    let wu = &(&v * &f["W1U"]) + &f["W0U"];
    let wv = f["W0V"].clone();
    let mut bindings = binding_list(&f);
    bindings.push(Binding { name: "H".into(), value: h.clone() });
    kundt_from("kundt-null", ctx, h, wu, wv, None, bindings)
}

fn kundt_spacelike(given: &[(&str, &str)]) -> Result<FamilyInstance, CatalogError> {
    let eps_text = given.iter().rev().find(|(n, _)| *n == "eps").map_or("0", |(_, t)| *t);
    let eps: i64 = match eps_text.trim() {
        "0" => 0,
        "1" => 1,
        other => return Err(CatalogError::Epsilon(other.into())),
    };
    let rest: Vec<(&str, &str)> = given.iter().copied().filter(|(n, _)| *n != "eps").collect();
    let slots = [
        Slot { name: "W0T", allowed: UTX },
        Slot { name: "W0X", allowed: UTX },
        Slot { name: "H1", allowed: UTX },
        Slot { name: "H0", allowed: UTX },
    ];
    let coords = ["u", "v", "T", "X"];
    let (ctx, f) = bind("kundt-spacelike", &coords, (2, 0), &slots, &rest)?;
    let n = ctx.nvars();
    let v = var(&ctx, "v");
    let x = var(&ctx, "X");
    let w1 = RationalFunction::from_int(n, -2 * eps).checked_div(&x).expect("X is a nonzero coordinate");
    let h = &(&(&(&v * &v) * &(&w1 * &w1)).scale(&num_rational::BigRational::new(1.into(), 8.into())) + &(&v * &f["H1"])) + &f["H0"];
    let wt = f["W0T"].clone();
    let wx = &(&v * &w1) + &f["W0X"];
    let mut bindings = binding_list(&f);
    bindings.push(Binding { name: "eps".into(), value: RationalFunction::from_int(n, eps) });
    bindings.push(Binding { name: "H".into(), value: h.clone() });
    kundt_from("kundt-spacelike", ctx, h, wt, wx, Some(()), bindings)
}

/// `2du(dv + H du + W_2 dx² + W_3 dx³) + transverse`, where the transverse
/// part is `2dx²dx³` (null case) or `−(dx²)² + (dx³)²` (spacelike/timelike).
fn kundt_from(
    id: &str,
    ctx: Arc<VariableContext>,
    h: RationalFunction,
    w2: RationalFunction,
    w3: RationalFunction,
    lorentzian_transverse: Option<()>,
    bindings: Vec<Binding>,
) -> Result<FamilyInstance, CatalogError> {
    let n = ctx.nvars();
    let z = || RationalFunction::zero(n);
    let o = || RationalFunction::one(n);
    let int = |k: i64| RationalFunction::from_int(n, k);
    let (g22, g32, g33) = match lorentzian_transverse {
        None => (z(), o(), z()),
        Some(()) => (int(-1), z(), o()),
    };
    let entries = vec![
        vec![h.scale_int(2)],
        vec![o(), z()],
        vec![w2.clone(), z(), g22],
        vec![w3.clone(), z(), g32, g33],
    ];
    let metric = Metric::from_lower_triangle(ctx.clone(), &entries)?;
    // e_2 = ∂_2 − W_2 ∂_v, e_3 = ∂_3 − W_3 ∂_v span the transverse space.
    let e2 = vec![z(), -&w2, o(), z()];
    let e3 = vec![z(), -&w3, z(), o()];
    let (l2, n2) = match lorentzian_transverse {
        None => (e3, e2),
        Some(()) => {
            // ½(e_T + e_X) and e_X − e_T are null with unit pairing.
            let half = num_rational::BigRational::new(1.into(), 2.into());
            let plus: Vec<RationalFunction> = e2.iter().zip(&e3).map(|(a, b)| (a + b).scale(&half)).collect();
            let minus: Vec<RationalFunction> = e2.iter().zip(&e3).map(|(a, b)| b - a).collect();
            (plus, minus)
        }
    };
    let frame = frame(
        &ctx,
        &["l1", "n1", "l2", "n2"],
        vec![vec![z(), o(), z(), z()], vec![o(), -&h, z(), z()], l2, n2],
    )?;
    Ok(FamilyInstance {
        id: id.into(),
        bindings,
        metric,
        frame,
        flags: ExpectedFlags {
            walker: None,
            kundt: Some(true),
        },
        tier: ExpectedTier::Vsi,
    })
}

/// `2du(dv + V du) + 2dU(dV + Y dU) + 2dX(dY + v⁷ dX)` in signature (3,3),
/// coordinates `(u, v, U, V, X, Y)`.
pub fn six_d_example() -> Result<FamilyInstance, CatalogError> {
    let coords = ["u", "v", "U", "V", "X", "Y"];
    let ctx = Arc::new(VariableContext::new::<&str>(&coords, &[], (3, 0)).map_err(|source| CatalogError::Expr {
        name: "coordinates".into(),
        source,
    })?);
    let n = ctx.nvars();
    let z = || RationalFunction::zero(n);
    let o = || RationalFunction::one(n);
    let v = var(&ctx, "v");
    let vv = var(&ctx, "V");
    let y = var(&ctx, "Y");
    let v7 = v.pow(7);
    let mut entries: Vec<Vec<RationalFunction>> = (0..6).map(|a| vec![z(); a + 1]).collect();
    entries[0][0] = vv.scale_int(2);
    entries[1][0] = o();
    entries[2][2] = y.scale_int(2);
    entries[3][2] = o();
    entries[4][4] = v7.scale_int(2);
    entries[5][4] = o();
    let metric = Metric::from_lower_triangle(ctx.clone(), &entries)?;
    let basis = |i: usize| (0..6).map(|j| if i == j { o() } else { z() }).collect::<Vec<_>>();
    let with = |i: usize, j: usize, c: &RationalFunction| {
        let mut e = basis(i);
        e[j] = -c;
        e
    };
    let frame = frame(
        &ctx,
        &["l1", "n1", "l2", "n2", "l3", "n3"],
        vec![basis(1), with(0, 1, &vv), basis(3), with(2, 3, &y), basis(5), with(4, 5, &v7)],
    )?;
    Ok(FamilyInstance {
        id: "six-d".into(),
        bindings: Vec::new(),
        metric,
        frame,
        flags: ExpectedFlags::default(),
        tier: ExpectedTier::Vsi,
    })
}

/// Names accepted by [`builtin`].
pub const BUILTIN_NAMES: &[&str] = &[
    "flat4",
    "walker",
    "walker-cond",
    "walker-cond1",
    "walker-cond2",
    "walker-cond3",
    "vsi3",
    "vsi1",
    "kundt-null",
    "kundt-spacelike",
    "six-d",
];

/// Builds a named family from `key=expr` settings.
pub fn builtin(name: &str, sets: &[(String, String)]) -> Result<FamilyInstance, CatalogError> {
    let given: Vec<(&str, &str)> = sets.iter().map(|(k, v)| (k.as_str(), v.as_str())).collect();
    let get = |key: &str, default: &'static str| -> &str {
        given.iter().rev().find(|(k, _)| *k == key).map_or(default, |(_, v)| *v)
    };
    let only = |allowed: &[&str]| -> Result<(), CatalogError> {
        match given.iter().find(|(k, _)| !allowed.contains(k)) {
            Some((k, _)) => Err(CatalogError::UnknownBinding {
                family: name.into(),
                name: k.to_string(),
                allowed: allowed.join(", "),
            }),
            None => Ok(()),
        }
    };
    match name {
        "flat4" => {
            only(&[])?;
            flat4()
        }
        "walker" => {
            only(&["A", "B", "C"])?;
            walker_general(get("A", "0"), get("B", "0"), get("C", "0"))
        }
        "walker-cond" => {
            let text = get("tier", "3");
            let tier = text.trim().parse().map_err(|_| CatalogError::TierText(text.to_string()))?;
            let rest: Vec<(&str, &str)> = given.iter().copied().filter(|(k, _)| *k != "tier").collect();
            walker_cond(tier, &rest)
        }
        "walker-cond1" => walker_cond(1, &given),
        "walker-cond2" => walker_cond(2, &given),
        "walker-cond3" => walker_cond(3, &given),
        "vsi3" => {
            only(&["a"])?;
            vsi3_example(get("a", "a"))
        }
        "vsi1" => {
            only(&["a", "b"])?;
            vsi1_example(get("a", "a"), get("b", "b"))
        }
        "kundt-null" => kundt_vsi(KundtCase::Null, &given),
        "kundt-spacelike" => kundt_vsi(KundtCase::SpacelikeTimelike, &given),
        "six-d" => {
            only(&[])?;
            six_d_example()
        }
        other => Err(CatalogError::UnknownFamily(other.into())),
    }
}

/// Values cycled through the `(u, U)`-dependent slots by [`default_sweep`].
pub const SWEEP_VALUES: &[&str] = &["0", "1", "u", "U", "u*U", "u^2 + U"];

/// A fixed set of instances covering every family.
pub fn default_sweep() -> Result<Vec<FamilyInstance>, CatalogError> {
    let s = SWEEP_VALUES;
    let mut out = vec![flat4()?, vsi3_example("a")?, vsi1_example("a", "b")?, six_d_example()?];
    for i in 0..5 {
        let p = |j: usize| s[(i + j) % s.len()];
        out.push(walker_cond(
            3,
            &[
                ("A0", p(0)),
                ("A1", p(1)),
                ("A2", p(2)),
                ("B00", p(3)),
                ("B01", p(4)),
                ("B02", p(5)),
                ("B03", p(1)),
                ("B10", p(2)),
                ("B11", p(3)),
                ("C0", p(4)),
                ("C2", p(5)),
                ("C10", p(0)),
                ("C11", p(2)),
                ("C12", p(4)),
            ],
        )?);
    }
    for i in 0..3 {
        let p = |j: usize| s[(i + j + 1) % s.len()];
        out.push(kundt_vsi(
            KundtCase::Null,
            &[("W1U", p(0)), ("W0U", p(1)), ("W0V", p(2)), ("H1", p(3)), ("H0", p(4))],
        )?);
    }
    for (i, eps) in ["0", "1", "1"].into_iter().enumerate() {
        let q = |j: usize| match s[(i + j) % s.len()] {
            "U" => "T",
            "u*U" => "u*X",
            "u^2 + U" => "u^2 + T",
            other => other,
        };
        out.push(kundt_vsi(
            KundtCase::SpacelikeTimelike,
            &[("eps", eps), ("W0T", q(0)), ("W0X", q(1)), ("H1", q(2)), ("H0", q(3))],
        )?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curvature::christoffel;
    use crate::frame::{classify_geometry, validate_frame};

    #[test]
    fn builtins_validate() {
        for name in BUILTIN_NAMES {
            let inst = builtin(name, &[]).unwrap();
            assert!(validate_frame(&inst.frame, &inst.metric).is_valid(), "{name}");
        }
    }

    #[test]
    fn sweep_frames_and_flags() {
        for inst in default_sweep().unwrap() {
            assert!(validate_frame(&inst.frame, &inst.metric).is_valid(), "{}", inst.id);
            if inst.metric.dim() != 4 {
                continue;
            }
            let (flags, s) = classify_geometry(&inst.frame, &christoffel(&inst.metric)).unwrap();
            if let Some(w) = inst.flags.walker {
                assert_eq!(flags.walker_plane, w, "{} {:?}", inst.id, s.named());
            }
            if let Some(k) = inst.flags.kundt {
                assert_eq!(flags.kundt, k, "{} {:?}", inst.id, s.named());
            }
        }
    }

    #[test]
    fn dependence_is_enforced() {
        let err = walker_cond(1, &[("A2", "v")]).unwrap_err();
        assert!(matches!(err, CatalogError::Dependence { .. }), "{err}");
        let err = walker_cond(3, &[("B1", "v")]).unwrap_err();
        assert!(matches!(err, CatalogError::UnknownBinding { .. }), "{err}");
        assert!(matches!(
            kundt_vsi(KundtCase::SpacelikeTimelike, &[("eps", "2")]),
            Err(CatalogError::Epsilon(_))
        ));
        assert!(matches!(walker_cond(4, &[]), Err(CatalogError::Tier(4))));
    }

    #[test]
    fn spacelike_quadratic_term() {
        let inst = kundt_vsi(KundtCase::SpacelikeTimelike, &[("eps", "1")]).unwrap();
        let want = parse_expression("v^2/(2*X^2)", inst.ctx()).unwrap();
        assert_eq!(inst.binding("H").unwrap(), &want);
    }

    #[test]
    fn parameters_are_collected() {
        let inst = vsi3_example("a").unwrap();
        assert_eq!(inst.ctx().parameter_names(), vec!["a"]);
        assert_eq!(inst.tier, ExpectedTier::Exactly(3));
        assert_eq!(vsi3_example("0").unwrap().tier, ExpectedTier::Vsi);
    }

    #[test]
    fn tier_claims_follow_obstructions() {
        assert_eq!(walker_cond(1, &[("A2", "1"), ("B1", "v^2")]).unwrap().tier, ExpectedTier::Exactly(1));
        assert_eq!(walker_cond(1, &[("A2", "1"), ("B1", "v")]).unwrap().tier, ExpectedTier::AtLeast(1));
        assert_eq!(walker_cond(2, &[("A2", "u"), ("B0", "v^4")]).unwrap().tier, ExpectedTier::Exactly(3));
        assert_eq!(walker_cond(3, &[]).unwrap().tier, ExpectedTier::Vsi);
    }
}
