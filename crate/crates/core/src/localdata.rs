//! Tate's algorithm and global minimal models.
//!
//! The local algorithm follows the classical eleven-step description, with
//! the coordinate changes written so that they work uniformly at p = 2 and
//! p = 3. Step numbers in [`LocalData::exit_step`] refer to that description
//! (1: I0, 2: In, 3: II, 4: III, 5: IV, 6: I0*, 7: In*, 8: IV*, 9: III*,
//! 10: II*; step 11 is the non-minimal case and restarts the loop).

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::arith::{exact_root, factor_over, is_prime, sign_of, valuation_nonzero, FactoredInteger, PrimeSet};
use crate::curve::{denominator_lcm, qb, ModelTransformation, WeierstrassCurve, Q};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Kodaira {
    I0,
    In(u32),
    II,
    III,
    IV,
    I0Star,
    InStar(u32),
    IVStar,
    IIIStar,
    IIStar,
}

impl fmt::Display for Kodaira {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Kodaira::I0 => write!(f, "I0"),
            Kodaira::In(n) => write!(f, "I{n}"),
            Kodaira::II => write!(f, "II"),
            Kodaira::III => write!(f, "III"),
            Kodaira::IV => write!(f, "IV"),
            Kodaira::I0Star => write!(f, "I0*"),
            Kodaira::InStar(n) => write!(f, "I{n}*"),
            Kodaira::IVStar => write!(f, "IV*"),
            Kodaira::IIIStar => write!(f, "III*"),
            Kodaira::IIStar => write!(f, "II*"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum ReductionKind {
    Good,
    SplitMultiplicative,
    NonsplitMultiplicative,
    Additive,
}

/// Reduction data of a model at one prime.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalData {
    pub p: BigInt,
    pub kodaira: Kodaira,
    pub conductor_exponent: u32,
    /// `ord_p` of the discriminant of the p-minimal model.
    pub ord_disc: u32,
    pub reduction: ReductionKind,
    /// Takes the input model to a p-minimal integral model.
    pub transformation: ModelTransformation,
    pub exit_step: u8,
    /// How many times step 11 divided the model by p.
    pub non_minimal_steps: u32,
}

#[derive(Clone, Debug)]
struct IntModel {
    a1: BigInt,
    a2: BigInt,
    a3: BigInt,
    a4: BigInt,
    a6: BigInt,
}

impl IntModel {
    fn from_array(a: &[BigInt; 5]) -> Self {
        let [a1, a2, a3, a4, a6] = a.clone();
        IntModel { a1, a2, a3, a4, a6 }
    }

    fn b2(&self) -> BigInt {
        &self.a1 * &self.a1 + 4 * &self.a2
    }
    fn b4(&self) -> BigInt {
        2 * &self.a4 + &self.a1 * &self.a3
    }
    fn b6(&self) -> BigInt {
        &self.a3 * &self.a3 + 4 * &self.a6
    }
    fn b8(&self) -> BigInt {
        let IntModel { a1, a2, a3, a4, a6 } = self;
        a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4
    }
    fn c4(&self) -> BigInt {
        let b2 = self.b2();
        &b2 * &b2 - 24 * self.b4()
    }
    fn c6(&self) -> BigInt {
        let b2 = self.b2();
        -(&b2 * &b2 * &b2) + 36 * &b2 * self.b4() - 216 * self.b6()
    }
    fn disc(&self) -> BigInt {
        let (b2, b4, b6, b8) = (self.b2(), self.b4(), self.b6(), self.b8());
        -(&b2 * &b2 * &b8) - 8 * &b4 * &b4 * &b4 - 27 * &b6 * &b6 + 9 * &b2 * &b4 * &b6
    }

    /// `u = 1` change of coordinates.
    fn shift(&mut self, r: &BigInt, s: &BigInt, t: &BigInt) {
        let IntModel { a1, a2, a3, a4, a6 } = self.clone();
        self.a1 = &a1 + 2 * s;
        self.a2 = &a2 - s * &a1 + 3 * r - s * s;
        self.a3 = &a3 + r * &a1 + 2 * t;
        self.a4 = &a4 - s * &a3 + 2 * r * &a2 - (t + r * s) * &a1 + 3 * r * r - 2 * s * t;
        self.a6 = &a6 + r * &a4 + r * r * &a2 + r * r * r - t * &a3 - t * t - r * t * &a1;
    }

    /// Divide `a_i` by `p^i`.
    fn scale_down(&mut self, p: &BigInt) {
        let p2 = p * p;
        let p3 = &p2 * p;
        self.a1 = &self.a1 / p;
        self.a2 = &self.a2 / &p2;
        self.a3 = &self.a3 / &p3;
        self.a4 = &self.a4 / (&p2 * &p2);
        self.a6 = &self.a6 / (&p3 * &p3);
    }

    fn to_array(&self) -> [BigInt; 5] {
        [self.a1.clone(), self.a2.clone(), self.a3.clone(), self.a4.clone(), self.a6.clone()]
    }
}

fn divides(d: &BigInt, n: &BigInt) -> bool {
    n.is_multiple_of(d)
}

fn modp(n: &BigInt, p: &BigInt) -> BigInt {
    n.mod_floor(p)
}

fn inverse_mod(a: &BigInt, p: &BigInt) -> BigInt {
    let e = a.mod_floor(p).extended_gcd(p);
    debug_assert!(e.gcd.is_one());
    e.x.mod_floor(p)
}

fn is_square_mod(a: &BigInt, p: &BigInt) -> bool {
    let a = a.mod_floor(p);
    if a.is_zero() {
        return true;
    }
    let e = (p - 1u32) / 2u32;
    a.modpow(&e, p).is_one()
}

/// The singular point of the reduction mod p, as integer representatives.
fn singular_point(m: &IntModel, p: &BigInt) -> (BigInt, BigInt) {
    if let Some(small) = p.to_u32().filter(|&q| q <= 3) {
        let q = BigInt::from(small);
        for x in 0..small {
            for y in 0..small {
                let (x, y) = (BigInt::from(x), BigInt::from(y));
                let f = &y * &y + &m.a1 * &x * &y + &m.a3 * &y
                    - (&x * &x * &x + &m.a2 * &x * &x + &m.a4 * &x + &m.a6);
                let fx = &m.a1 * &y - 3 * &x * &x - 2 * &m.a2 * &x - &m.a4;
                let fy = 2 * &y + &m.a1 * &x + &m.a3;
                if divides(&q, &f) && divides(&q, &fx) && divides(&q, &fy) {
                    return (x, y);
                }
            }
        }
        unreachable!("a singular cubic has a rational singular point");
    }
    // For p >= 5 the reduction is isomorphic to X^3 - 27 c4 X - 54 c6 with
    // X = 36 x + 3 b2; its repeated root is -3 c6 / c4, or 0 when p | c4.
    let c4 = modp(&m.c4(), p);
    let big_x = if c4.is_zero() {
        BigInt::zero()
    } else {
        modp(&(-3 * m.c6() * inverse_mod(&c4, p)), p)
    };
    let x0 = modp(&((big_x - 3 * m.b2()) * inverse_mod(&BigInt::from(36), p)), p);
    let y0 = modp(&(-(&m.a1 * &x0 + &m.a3) * inverse_mod(&BigInt::from(2), p)), p);
    (x0, y0)
}

fn check_prime(p: &BigInt) -> Result<()> {
    let ok = match p.to_biguint() {
        Some(u) if u > BigUint::one() => is_prime(&u)?,
        _ => false,
    };
    if ok {
        Ok(())
    } else {
        Err(Error::NotPrime(p.to_string()))
    }
}

/// Runs Tate's algorithm on an integral model at the prime `p`.
pub fn tate_local(e: &WeierstrassCurve, p: &BigInt) -> Result<LocalData> {
    check_prime(p)?;
    let a = e.integral_ainvs().ok_or(Error::NonIntegralModel)?;
    Ok(tate_integral(&a, p).0)
}

pub fn tate_local_u64(e: &WeierstrassCurve, p: u64) -> Result<LocalData> {
    tate_local(e, &BigInt::from(p))
}

/// Tate's algorithm on integer coefficients; also returns the p-minimal model.
pub fn tate_integral(a: &[BigInt; 5], p: &BigInt) -> (LocalData, [BigInt; 5]) {
    let zero = BigInt::zero();
    let one = BigInt::one();
    let p2 = p * p;
    let p3 = &p2 * p;
    let p4 = &p2 * &p2;
    let two = BigInt::from(2);
    let is_two = *p == two;
    let is_three = *p == BigInt::from(3);
    let half = if is_two { zero.clone() } else { (p + 1u32) / 2u32 };

    let mut m = IntModel::from_array(a);
    let mut total = ModelTransformation::identity();
    let mut rounds = 0u32;

    let shift = |m: &mut IntModel, total: &mut ModelTransformation, r: &BigInt, s: &BigInt, t: &BigInt| {
        if r.is_zero() && s.is_zero() && t.is_zero() {
            return;
        }
        m.shift(r, s, t);
        *total = total.then(&ModelTransformation::from_ints(&one, r, s, t));
    };

    loop {
        let disc = m.disc();
        let n = valuation_nonzero(&disc, p);
        let finish = |m: &IntModel, total: ModelTransformation, kodaira, f, red, step| {
            (
                LocalData {
                    p: p.clone(),
                    kodaira,
                    conductor_exponent: f,
                    ord_disc: n,
                    reduction: red,
                    transformation: total,
                    exit_step: step,
                    non_minimal_steps: rounds,
                },
                m.to_array(),
            )
        };
        if n == 0 {
            return finish(&m, total, Kodaira::I0, 0, ReductionKind::Good, 1);
        }

        // Step 2: move the singular point to (0, 0).
        let (x0, y0) = singular_point(&m, p);
        shift(&mut m, &mut total, &x0, &zero, &y0);
        debug_assert!(divides(p, &m.a3) && divides(p, &m.a4) && divides(p, &m.a6));

        let b2 = m.b2();
        if !divides(p, &b2) {
            let split = if is_two { m.a2.is_even() } else { is_square_mod(&b2, p) };
            let red = if split {
                ReductionKind::SplitMultiplicative
            } else {
                ReductionKind::NonsplitMultiplicative
            };
            return finish(&m, total, Kodaira::In(n), 1, red, 2);
        }
        if !divides(&p2, &m.a6) {
            return finish(&m, total, Kodaira::II, n, ReductionKind::Additive, 3);
        }
        if !divides(&p3, &m.b8()) {
            return finish(&m, total, Kodaira::III, n - 1, ReductionKind::Additive, 4);
        }
        if !divides(&p3, &m.b6()) {
            return finish(&m, total, Kodaira::IV, n - 2, ReductionKind::Additive, 5);
        }

        // Step 6: arrange p | a1, a2; p^2 | a3, a4; p^3 | a6.
        let (s, t) = if is_two {
            (m.a2.mod_floor(&two), 2 * (&m.a6 / BigInt::from(4)).mod_floor(&two))
        } else {
            (-&m.a1 * &half, -&m.a3 * &half)
        };
        shift(&mut m, &mut total, &zero, &s, &t);
        debug_assert!(divides(p, &m.a1) && divides(p, &m.a2));
        debug_assert!(divides(&p2, &m.a3) && divides(&p2, &m.a4) && divides(&p3, &m.a6));

        let b = &m.a2 / p;
        let c = &m.a4 / &p2;
        let d = &m.a6 / &p3;
        let w = 27 * &d * &d - &b * &b * &c * &c + 4 * &b * &b * &b * &d - 18 * &b * &c * &d
            + 4 * &c * &c * &c;
        let x = 3 * &c - &b * &b;

        if !divides(p, &w) {
            return finish(&m, total, Kodaira::I0Star, n - 4, ReductionKind::Additive, 6);
        }

        if !divides(p, &x) {
            // Step 7: one simple and one double root; move the double root to 0.
            let r0 = if is_two {
                c.mod_floor(p)
            } else if is_three {
                (&b * &c).mod_floor(p)
            } else {
                let num: BigInt = &b * &c - &d * 9u32;
                (num * inverse_mod(&(&x * 2u32), p)).mod_floor(p)
            };
            let r = p * r0;
            shift(&mut m, &mut total, &r, &zero, &zero);

            let mut ix = 3u32;
            let mut iy = 3u32;
            let mut mx = p2.clone();
            let mut my = p2.clone();
            loop {
                let xa3 = &m.a3 / &my;
                let xa6 = &m.a6 / (&mx * &my);
                let y_distinct = if is_two {
                    xa3.is_odd()
                } else {
                    !divides(p, &(&xa3 * &xa3 + 4 * &xa6))
                };
                if y_distinct {
                    break;
                }
                let t = if is_two {
                    &my * xa6.mod_floor(p)
                } else {
                    &my * (-&xa3 * &half).mod_floor(p)
                };
                shift(&mut m, &mut total, &zero, &zero, &t);
                my *= p;
                iy += 1;

                let xa2 = &m.a2 / p;
                let xa4 = &m.a4 / (p * &mx);
                let xa6 = &m.a6 / (&mx * &my);
                let x_distinct = if is_two {
                    xa4.is_odd()
                } else {
                    !divides(p, &(&xa4 * &xa4 - 4 * &xa2 * &xa6))
                };
                if x_distinct {
                    break;
                }
                let r = if is_two {
                    &mx * (&xa6 * &xa2).mod_floor(p)
                } else {
                    &mx * (-&xa4 * inverse_mod(&(2 * &xa2), p)).mod_floor(p)
                };
                shift(&mut m, &mut total, &r, &zero, &zero);
                mx *= p;
                ix += 1;
            }
            let k = ix + iy - 5;
            return finish(&m, total, Kodaira::InStar(k), n - k - 4, ReductionKind::Additive, 7);
        }

        // Step 8: triple root; move it to 0.
        let r0 = if is_two {
            b.mod_floor(p)
        } else if is_three {
            (-&d).mod_floor(p)
        } else {
            (-&b * inverse_mod(&BigInt::from(3), p)).mod_floor(p)
        };
        let r = p * r0;
        shift(&mut m, &mut total, &r, &zero, &zero);
        debug_assert!(divides(&p2, &m.a2) && divides(&p3, &m.a4) && divides(&p4, &m.a6));

        let x3 = &m.a3 / &p2;
        let x6 = &m.a6 / &p4;
        let distinct = if is_two { x3.is_odd() } else { !divides(p, &(&x3 * &x3 + 4 * &x6)) };
        if distinct {
            return finish(&m, total, Kodaira::IVStar, n - 6, ReductionKind::Additive, 8);
        }

        // Step 9: double root; move it to 0 so that p^3 | a3 and p^5 | a6.
        let t = if is_two { &p2 * x6.mod_floor(p) } else { &p2 * (-&x3 * &half).mod_floor(p) };
        shift(&mut m, &mut total, &zero, &zero, &t);
        if !divides(&p4, &m.a4) {
            return finish(&m, total, Kodaira::IIIStar, n - 7, ReductionKind::Additive, 9);
        }
        if !divides(&(&p3 * &p3), &m.a6) {
            return finish(&m, total, Kodaira::IIStar, n - 8, ReductionKind::Additive, 10);
        }

        // Step 11: the model was not minimal.
        m.scale_down(p);
        total = total.then(&ModelTransformation::from_ints(p, &zero, &zero, &zero));
        rounds += 1;
    }
}

/// Minimal model, conductor and minimal discriminant of a curve over Q.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GlobalReductionData {
    pub minimal_model: WeierstrassCurve,
    pub conductor: FactoredInteger,
    pub min_disc: FactoredInteger,
    /// Local data at every prime of bad reduction, in increasing order.
    pub locals: Vec<LocalData>,
    /// Takes the input model to `minimal_model`.
    pub transformation: ModelTransformation,
}

impl GlobalReductionData {
    pub fn conductor_value(&self) -> BigInt {
        self.conductor.value()
    }

    pub fn local(&self, p: u64) -> Option<&LocalData> {
        let p = BigInt::from(p);
        self.locals.iter().find(|l| l.p == p)
    }

    pub fn bad_primes(&self) -> Vec<BigInt> {
        self.locals.iter().map(|l| l.p.clone()).collect()
    }
}

/// Scales a model to an integral one by `u = 1/lcm(denominators)`.
pub fn integral_scaling(e: &WeierstrassCurve) -> (ModelTransformation, [BigInt; 5]) {
    let l = denominator_lcm(e.ainvs());
    if l.is_one() {
        return (ModelTransformation::identity(), e.integral_ainvs().unwrap());
    }
    let t = ModelTransformation::scaling(Q::new(BigInt::one(), l.clone())).unwrap();
    let mut out: [BigInt; 5] = Default::default();
    for (i, (a, w)) in e.ainvs().iter().zip([1usize, 2, 3, 4, 6]).enumerate() {
        out[i] = (a * qb(&num_traits::pow(l.clone(), w))).to_integer();
    }
    (t, out)
}

/// Reduced normal form: `a1, a3 in {0, 1}`, `a2 in {-1, 0, 1}`.
fn reduce_normal_form(m: &mut IntModel) -> ModelTransformation {
    let two = BigInt::from(2);
    let three = BigInt::from(3);
    let s = -m.a1.div_floor(&two);
    let tmp2 = &m.a2 - &s * &m.a1 - &s * &s;
    let r = -(tmp2 + BigInt::one()).div_floor(&three);
    let tmp3 = &m.a3 + &r * &m.a1;
    let t = -tmp3.div_floor(&two);
    m.shift(&r, &s, &t);
    ModelTransformation::from_ints(&BigInt::one(), &r, &s, &t)
}

/// Global minimal model; `hint` primes are trial-divided first.
pub fn global_minimal_model_with_hint(
    e: &WeierstrassCurve,
    hint: &PrimeSet,
) -> Result<GlobalReductionData> {
    let (mut total, a) = integral_scaling(e);
    let mut m = IntModel::from_array(&a);
    let disc = factor_over(&m.disc(), hint, true)?;
    let mut locals = Vec::new();
    for p in disc.exponents.keys() {
        let (ld, next) = tate_integral(&m.to_array(), p);
        total = total.then(&ld.transformation);
        m = IntModel::from_array(&next);
        if ld.kodaira != Kodaira::I0 {
            locals.push(ld);
        }
    }
    total = total.then(&reduce_normal_form(&mut m));
    let minimal_model = WeierstrassCurve::from_bigints(&m.to_array())?;

    let mut cond = BTreeMap::new();
    let mut mind = BTreeMap::new();
    for l in &locals {
        cond.insert(l.p.clone(), l.conductor_exponent);
        mind.insert(l.p.clone(), l.ord_disc);
    }
    let conductor = FactoredInteger { sign: 1, exponents: cond, cofactor: BigInt::one() };
    let min_disc = FactoredInteger {
        sign: sign_of(&m.disc()),
        exponents: mind,
        cofactor: BigInt::one(),
    };
    debug_assert_eq!(min_disc.value(), m.disc());
    Ok(GlobalReductionData { minimal_model, conductor, min_disc, locals, transformation: total })
}

pub fn global_minimal_model(e: &WeierstrassCurve) -> Result<GlobalReductionData> {
    global_minimal_model_with_hint(e, &PrimeSet::empty())
}

/// `(c4, c6)` of the global minimal model: a complete invariant of the
/// Q-isomorphism class.
pub fn minimal_invariants(e: &WeierstrassCurve) -> Result<(BigInt, BigInt)> {
    let g = global_minimal_model_with_hint(e, &PrimeSet::new([2, 3]).unwrap())?;
    let mm = &g.minimal_model;
    Ok((mm.c4().to_integer(), mm.c6().to_integer()))
}

/// True iff every prime of bad reduction lies in `S`.
pub fn has_good_reduction_outside(e: &WeierstrassCurve, s: &PrimeSet) -> Result<bool> {
    let (_, a) = integral_scaling(e);
    let m = IntModel::from_array(&a);
    let f = factor_over(&m.disc(), s, false)?;
    if f.cofactor.is_one() {
        return Ok(true);
    }
    // Primes outside S can only disappear from the discriminant through a
    // change of model, which changes it by a twelfth power.
    if exact_root(&f.cofactor, 12).is_none() {
        return Ok(false);
    }
    let g = global_minimal_model_with_hint(e, s)?;
    Ok(g.locals.iter().all(|l| s.contains_big(&l.p)))
}
