//! Long Weierstrass models over Q, coordinate changes and twists.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::arith::{factor, PrimeSet};
use crate::error::{Error, Result};
use crate::localdata::minimal_invariants;

pub type Q = BigRational;

pub(crate) fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub(crate) fn qb(n: &BigInt) -> Q {
    Q::from_integer(n.clone())
}

/// The standard b-, c- and discriminant invariants of a model.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Invariants {
    pub b2: Q,
    pub b4: Q,
    pub b6: Q,
    pub b8: Q,
    pub c4: Q,
    pub c6: Q,
    pub discriminant: Q,
    pub j: Q,
}

/// Evaluates the invariants of `[a1, a2, a3, a4, a6]`; a zero discriminant
/// is an error.
pub fn compute_invariants(a: &[Q; 5]) -> Result<Invariants> {
    let [a1, a2, a3, a4, a6] = a;
    let b2 = a1 * a1 + qi(4) * a2;
    let b4 = qi(2) * a4 + a1 * a3;
    let b6 = a3 * a3 + qi(4) * a6;
    let b8 = a1 * a1 * a6 + qi(4) * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4;
    let c4 = &b2 * &b2 - qi(24) * &b4;
    let c6 = -(&b2 * &b2 * &b2) + qi(36) * &b2 * &b4 - qi(216) * &b6;
    let discriminant =
        -(&b2 * &b2 * &b8) - qi(8) * &b4 * &b4 * &b4 - qi(27) * &b6 * &b6 + qi(9) * &b2 * &b4 * &b6;
    if discriminant.is_zero() {
        return Err(Error::SingularModel);
    }
    let j = &c4 * &c4 * &c4 / &discriminant;
    Ok(Invariants { b2, b4, b6, b8, c4, c6, discriminant, j })
}

/// A nonsingular model `y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6`.
#[derive(Clone, Debug)]
pub struct WeierstrassCurve {
    a: [Q; 5],
    inv: Invariants,
}

impl PartialEq for WeierstrassCurve {
    fn eq(&self, other: &Self) -> bool {
        self.a == other.a
    }
}

impl Eq for WeierstrassCurve {}

impl std::hash::Hash for WeierstrassCurve {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.a.hash(state)
    }
}

impl WeierstrassCurve {
    pub fn new(a: [Q; 5]) -> Result<Self> {
        let inv = compute_invariants(&a)?;
        Ok(WeierstrassCurve { a, inv })
    }

    pub fn from_ints(a: [i64; 5]) -> Result<Self> {
        Self::new(a.map(qi))
    }

    pub fn from_bigints(a: &[BigInt; 5]) -> Result<Self> {
        Self::new([qb(&a[0]), qb(&a[1]), qb(&a[2]), qb(&a[3]), qb(&a[4])])
    }

    /// `y^2 = x^3 + a x + b`.
    pub fn short(a: Q, b: Q) -> Result<Self> {
        Self::new([Q::zero(), Q::zero(), Q::zero(), a, b])
    }

    /// The curve `y^2 = x^3 - 27 c4 x - 54 c6`, whose invariants are
    /// `(6^4 c4, 6^6 c6)`, i.e. the curve with invariants `(c4, c6)` up to
    /// isomorphism.
    pub fn from_c4_c6(c4: &Q, c6: &Q) -> Result<Self> {
        Self::short(-qi(27) * c4, -qi(54) * c6)
    }

    pub fn ainvs(&self) -> &[Q; 5] {
        &self.a
    }

    pub fn a1(&self) -> &Q {
        &self.a[0]
    }
    pub fn a2(&self) -> &Q {
        &self.a[1]
    }
    pub fn a3(&self) -> &Q {
        &self.a[2]
    }
    pub fn a4(&self) -> &Q {
        &self.a[3]
    }
    pub fn a6(&self) -> &Q {
        &self.a[4]
    }

    pub fn invariants(&self) -> &Invariants {
        &self.inv
    }
    pub fn b2(&self) -> &Q {
        &self.inv.b2
    }
    pub fn b4(&self) -> &Q {
        &self.inv.b4
    }
    pub fn b6(&self) -> &Q {
        &self.inv.b6
    }
    pub fn b8(&self) -> &Q {
        &self.inv.b8
    }
    pub fn c4(&self) -> &Q {
        &self.inv.c4
    }
    pub fn c6(&self) -> &Q {
        &self.inv.c6
    }
    pub fn discriminant(&self) -> &Q {
        &self.inv.discriminant
    }
    pub fn j_invariant(&self) -> &Q {
        &self.inv.j
    }

    pub fn is_integral(&self) -> bool {
        self.a.iter().all(|x| x.is_integer())
    }

    pub fn integral_ainvs(&self) -> Option<[BigInt; 5]> {
        if !self.is_integral() {
            return None;
        }
        Some(self.a.clone().map(|x| x.to_integer()))
    }

    pub fn is_short(&self) -> bool {
        self.a[0].is_zero() && self.a[1].is_zero() && self.a[2].is_zero()
    }

    /// Coefficients `(A, B)` of an isomorphic model `y^2 = x^3 + A x + B`.
    pub fn short_coefficients(&self) -> (Q, Q) {
        if self.is_short() {
            return (self.a[3].clone(), self.a[4].clone());
        }
        (-self.c4() / qi(48), -self.c6() / qi(864))
    }

    pub fn to_short(&self) -> WeierstrassCurve {
        let (a, b) = self.short_coefficients();
        WeierstrassCurve::short(a, b).expect("isomorphic model is nonsingular")
    }

    pub fn transform(&self, t: &ModelTransformation) -> Result<WeierstrassCurve> {
        apply_transformation(self, t)
    }

    /// Evaluates the defining polynomial at `(x, y)`; zero iff the point lies
    /// on the curve.
    pub fn evaluate(&self, x: &Q, y: &Q) -> Q {
        let [a1, a2, a3, a4, a6] = &self.a;
        y * y + a1 * x * y + a3 * y - (x * x * x + a2 * x * x + a4 * x + a6)
    }
}

impl fmt::Display for WeierstrassCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.a.iter().map(|x| x.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

pub fn parse_rational(s: &str) -> Result<Q> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not an integer or fraction: {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Q::new(n, d))
        }
        None => Ok(Q::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

impl FromStr for WeierstrassCurve {
    type Err = Error;

    /// Parses `"a1,a2,a3,a4,a6"` (optionally in brackets).
    fn from_str(s: &str) -> Result<Self> {
        let body = s.trim().trim_start_matches('[').trim_end_matches(']');
        let parts: Vec<&str> = body.split(',').collect();
        if parts.len() != 5 {
            return Err(Error::Parse(format!(
                "expected 5 comma-separated a-invariants, found {}",
                parts.len()
            )));
        }
        let mut a: [Q; 5] = Default::default();
        for (slot, p) in a.iter_mut().zip(parts) {
            *slot = parse_rational(p)?;
        }
        WeierstrassCurve::new(a)
    }
}

/// Change of variables `x = u^2 x' + r`, `y = u^3 y' + s u^2 x' + t`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ModelTransformation {
    pub u: Q,
    pub r: Q,
    pub s: Q,
    pub t: Q,
}

impl Default for ModelTransformation {
    fn default() -> Self {
        Self::identity()
    }
}

impl ModelTransformation {
    pub fn new(u: Q, r: Q, s: Q, t: Q) -> Result<Self> {
        if u.is_zero() {
            return Err(Error::ZeroScaling);
        }
        Ok(ModelTransformation { u, r, s, t })
    }

    pub fn identity() -> Self {
        ModelTransformation { u: Q::one(), r: Q::zero(), s: Q::zero(), t: Q::zero() }
    }

    pub fn scaling(u: Q) -> Result<Self> {
        Self::new(u, Q::zero(), Q::zero(), Q::zero())
    }

    pub(crate) fn from_ints(u: &BigInt, r: &BigInt, s: &BigInt, t: &BigInt) -> Self {
        ModelTransformation { u: qb(u), r: qb(r), s: qb(s), t: qb(t) }
    }

    /// The transformation "first `self`, then `next`".
    pub fn then(&self, next: &ModelTransformation) -> ModelTransformation {
        let u1 = &self.u;
        let u1sq = u1 * u1;
        ModelTransformation {
            u: u1 * &next.u,
            r: &self.r + &u1sq * &next.r,
            s: &self.s + u1 * &next.s,
            t: &self.t + &u1sq * u1 * &next.t + &self.s * &u1sq * &next.r,
        }
    }

    pub fn inverse(&self) -> ModelTransformation {
        let u = &self.u;
        let ui = u.recip();
        ModelTransformation {
            u: ui.clone(),
            r: -&self.r * &ui * &ui,
            s: -&self.s * &ui,
            t: (&self.r * &self.s - &self.t) * &ui * &ui * &ui,
        }
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity()
    }
}

pub(crate) fn transform_ainvs(a: &[Q; 5], tr: &ModelTransformation) -> [Q; 5] {
    let [a1, a2, a3, a4, a6] = a;
    let ModelTransformation { u, r, s, t } = tr;
    let u2 = u * u;
    let u3 = &u2 * u;
    let u4 = &u2 * &u2;
    let u6 = &u3 * &u3;
    let n1 = a1 + qi(2) * s;
    let n2 = a2 - s * a1 + qi(3) * r - s * s;
    let n3 = a3 + r * a1 + qi(2) * t;
    let n4 = a4 - s * a3 + qi(2) * r * a2 - (t + r * s) * a1 + qi(3) * r * r - qi(2) * s * t;
    let n6 = a6 + r * a4 + r * r * a2 + r * r * r - t * a3 - t * t - r * t * a1;
    [n1 / u, n2 / u2, n3 / u3, n4 / u4, n6 / u6]
}

pub fn apply_transformation(
    e: &WeierstrassCurve,
    t: &ModelTransformation,
) -> Result<WeierstrassCurve> {
    if t.u.is_zero() {
        return Err(Error::ZeroScaling);
    }
    WeierstrassCurve::new(transform_ainvs(&e.a, t))
}

fn squarefree_check(d: &BigInt) -> Result<()> {
    if d.is_zero() {
        return Err(Error::InvalidTwist("d = 0".into()));
    }
    if d.abs().is_one() {
        return Ok(());
    }
    let f = factor(d)?;
    if f.exponents.values().any(|&e| e > 1) {
        return Err(Error::InvalidTwist(format!("{d} is not squarefree")));
    }
    Ok(())
}

/// `E^d : y^2 = x^3 + d^2 A x + d^3 B` for a short model of `E`.
pub fn quadratic_twist(e: &WeierstrassCurve, d: &BigInt) -> Result<WeierstrassCurve> {
    squarefree_check(d)?;
    let (a, b) = e.short_coefficients();
    let d = qb(d);
    WeierstrassCurve::short(&d * &d * a, &d * &d * &d * b)
}

/// Quartic (`j = 1728`) or sextic (`j = 0`) twist by `d`.
pub fn higher_twist(e: &WeierstrassCurve, d: &BigInt) -> Result<WeierstrassCurve> {
    if d.is_zero() {
        return Err(Error::InvalidTwist("d = 0".into()));
    }
    let (a, b) = e.short_coefficients();
    let d = qb(d);
    if e.j_invariant().is_zero() {
        WeierstrassCurve::short(Q::zero(), d * b)
    } else if *e.j_invariant() == qi(1728) {
        WeierstrassCurve::short(d * a, Q::zero())
    } else {
        Err(Error::InvalidTwist("higher twists need j = 0 or j = 1728".into()))
    }
}

/// Signed S-supported twist parameters with every exponent below `modulus`.
pub(crate) fn twist_parameters(s: &PrimeSet, modulus: u32) -> Vec<BigInt> {
    let mut out = vec![BigInt::one()];
    for p in s.iter() {
        let mut next = Vec::with_capacity(out.len() * modulus as usize);
        for base in &out {
            let mut pe = BigInt::one();
            for _ in 0..modulus {
                next.push(base * &pe);
                pe *= p;
            }
        }
        out = next;
    }
    let neg: Vec<BigInt> = out.iter().map(|d| -d).collect();
    out.extend(neg);
    out
}

/// All twists of `E` by S-supported parameters (quadratic for generic `j`,
/// quartic for `j = 1728`, sextic for `j = 0`), deduplicated up to
/// Q-isomorphism.
pub fn twist_orbit(e: &WeierstrassCurve, s: &PrimeSet) -> Result<Vec<WeierstrassCurve>> {
    let j = e.j_invariant();
    let modulus = if j.is_zero() {
        6
    } else if *j == qi(1728) {
        4
    } else {
        2
    };
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for d in twist_parameters(s, modulus) {
        let twisted = if modulus == 2 { quadratic_twist(e, &d)? } else { higher_twist(e, &d)? };
        if seen.insert(minimal_invariants(&twisted)?) {
            out.push(twisted);
        }
    }
    Ok(out)
}

/// Q-isomorphism test via the invariants of the global minimal models.
pub fn is_q_isomorphic(e1: &WeierstrassCurve, e2: &WeierstrassCurve) -> Result<bool> {
    if e1.j_invariant() != e2.j_invariant() {
        return Ok(false);
    }
    Ok(minimal_invariants(e1)? == minimal_invariants(e2)?)
}

/// Least common multiple of the denominators of the a-invariants.
pub(crate) fn denominator_lcm(a: &[Q; 5]) -> BigInt {
    a.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::factor_over;

    fn curve(s: &str) -> WeierstrassCurve {
        s.parse().unwrap()
    }

    #[test]
    fn invariants_of_family_base_curves() {
        let e = curve("0,0,0,-18,24");
        assert_eq!(*e.discriminant(), qi(124416));
        assert_eq!(*e.j_invariant(), qi(5184));
        assert_eq!(*e.c4(), qi(864));
        assert_eq!(*e.c6(), qi(-20736));
        let lhs = e.c4() * e.c4() * e.c4() - e.c6() * e.c6();
        assert_eq!(lhs, qi(1728) * e.discriminant());

        let e3 = curve("0,0,1,0,-1");
        assert_eq!(*e3.discriminant(), qi(-243));
        assert!(e3.j_invariant().is_zero());
    }

    #[test]
    fn singular_rejected() {
        assert_eq!(WeierstrassCurve::from_ints([0, 0, 0, 0, 0]).unwrap_err(), Error::SingularModel);
        assert!(curve_err("0,0,0,-3,2"));
    }

    fn curve_err(s: &str) -> bool {
        s.parse::<WeierstrassCurve>().is_err()
    }

    #[test]
    fn parse_and_display() {
        let e = curve("[0, 1/2, 0, -3/4, 5]");
        assert_eq!(e.to_string(), "0,1/2,0,-3/4,5");
        assert!(curve_err("0,0,0,1"));
        assert!(curve_err("0,0,0,1,x"));
        assert!(curve_err("0,0,0,1,1/0"));
    }

    #[test]
    fn transformations() {
        let e = curve("1,-1,1,-3,7");
        let id = ModelTransformation::identity();
        assert_eq!(e.transform(&id).unwrap(), e);

        let e1 = curve("0,0,0,0,1");
        let t = ModelTransformation::scaling(qi(2)).unwrap();
        let f = e1.transform(&t).unwrap();
        assert_eq!(*f.discriminant(), e1.discriminant() / qi(4096));
        assert_eq!(f.j_invariant(), e1.j_invariant());

        assert_eq!(ModelTransformation::new(qi(0), qi(1), qi(0), qi(0)), Err(Error::ZeroScaling));

        let t1 = ModelTransformation::new(qi(2), qi(1), qi(-3), Q::new(1.into(), 2.into())).unwrap();
        let t2 = ModelTransformation::new(Q::new(1.into(), 3.into()), qi(5), qi(2), qi(-1)).unwrap();
        let step = e.transform(&t1).unwrap().transform(&t2).unwrap();
        assert_eq!(e.transform(&t1.then(&t2)).unwrap(), step);
        assert_eq!(e.transform(&t1).unwrap().transform(&t1.inverse()).unwrap(), e);
    }

    #[test]
    fn minus_48_is_e3() {
        // x = 4x' + 0? The isomorphism y^2 = x^3 - 48 -> y^2 + y = x^3 - 1 is
        // x = 4x', y = 8y' + 4.
        let e = curve("0,0,0,0,-48");
        let t = ModelTransformation::new(qi(2), qi(0), qi(0), qi(4)).unwrap();
        assert_eq!(e.transform(&t).unwrap(), curve("0,0,1,0,-1"));
    }

    #[test]
    fn quadratic_twists() {
        let e = curve("0,0,0,-18,24");
        assert_eq!(quadratic_twist(&e, &BigInt::one()).unwrap(), e);
        let e5 = quadratic_twist(&e, &BigInt::from(5)).unwrap();
        assert_eq!(e5, curve("0,0,0,-450,3000"));
        let f = factor_over(&e5.discriminant().to_integer(), &PrimeSet::new([2, 3, 5]).unwrap(), false)
            .unwrap();
        assert_eq!((f.exponent(2), f.exponent(3), f.exponent(5)), (9, 5, 6));
        assert!(quadratic_twist(&e, &BigInt::zero()).is_err());
        assert!(quadratic_twist(&e, &BigInt::from(12)).is_err());

        // b = 0: the twist by -1 is the same model.
        let e2 = curve("0,0,0,8,0");
        assert_eq!(quadratic_twist(&e2, &BigInt::from(-1)).unwrap(), e2);
    }

    #[test]
    fn higher_twists_need_special_j() {
        let e = curve("0,0,0,8,0");
        assert_eq!(higher_twist(&e, &BigInt::one()).unwrap(), e);
        assert_eq!(higher_twist(&e, &BigInt::from(4)).unwrap(), curve("0,0,0,32,0"));
        assert!(!is_q_isomorphic(&e, &curve("0,0,0,32,0")).unwrap());
        let m = curve("0,0,0,0,1");
        let t = higher_twist(&m, &BigInt::from(-432)).unwrap();
        assert_eq!(t, curve("0,0,0,0,-432"));
        assert!(t.j_invariant().is_zero());
        assert!(higher_twist(&curve("0,0,0,-18,24"), &BigInt::from(2)).is_err());
    }

    #[test]
    fn isomorphism_examples() {
        assert!(is_q_isomorphic(&curve("0,0,0,0,-48"), &curve("0,0,1,0,-1")).unwrap());
        assert!(is_q_isomorphic(&curve("0,0,0,0,1"), &curve("0,0,0,0,64")).unwrap());
        assert!(!is_q_isomorphic(&curve("0,0,0,0,1"), &curve("0,0,0,0,2")).unwrap());
        let e = curve("1,-1,1,-3,7");
        assert!(is_q_isomorphic(&e, &e).unwrap());
    }

    #[test]
    fn orbit_sizes_for_two_three() {
        let s = PrimeSet::new([2, 3]).unwrap();
        assert_eq!(twist_orbit(&curve("0,0,0,-18,24"), &s).unwrap().len(), 8);
        assert_eq!(twist_orbit(&curve("0,0,0,8,0"), &s).unwrap().len(), 32);
        assert_eq!(twist_orbit(&curve("0,0,0,0,1"), &s).unwrap().len(), 72);
    }
}
