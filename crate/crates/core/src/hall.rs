//! S-primitivity and abc-derived height bounds for points on Mordell curves.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::arith::{big_ln, valuation_u64, PrimeSet};
use crate::error::{Error, Result};
use crate::mordell::SIntegralPoint;

/// Slack used when comparing real-valued bounds.
pub const SLACK: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct HallParams {
    pub epsilon: f64,
    pub k_epsilon: f64,
    pub s: PrimeSet,
    pub d: BigInt,
}

impl HallParams {
    pub fn new(epsilon: f64, k_epsilon: f64, s: PrimeSet, d: BigInt) -> Result<Self> {
        let p = HallParams { epsilon, k_epsilon, s, d };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon <= 0.1) {
            return Err(Error::InvalidArgument(format!("epsilon must lie in (0, 0.1], got {}", self.epsilon)));
        }
        if !(self.k_epsilon > 0.0 && self.k_epsilon.is_finite()) {
            return Err(Error::InvalidArgument(format!("K_epsilon must be positive, got {}", self.k_epsilon)));
        }
        if self.d.is_zero() {
            return Err(Error::InvalidArgument("D must be nonzero".into()));
        }
        Ok(())
    }

    /// ln(N_S |D|).
    fn ln_ns_d(&self) -> f64 {
        big_ln(self.s.radical()) + big_ln(&self.d.abs())
    }
}

/// False iff some p in S has p^6 | x^3 and p^6 | y^2.
pub fn is_s_primitive(x: &BigInt, y: &BigInt, s: &PrimeSet) -> bool {
    s.iter().all(|p| {
        let vx = if x.is_zero() { u32::MAX } else { valuation_u64(x, p).unwrap_or(0) };
        let vy = if y.is_zero() { u32::MAX } else { valuation_u64(y, p).unwrap_or(0) };
        !(vx >= 2 && vy >= 3)
    })
}

/// ln of the bound K^(1+10e) (N_S D)^(1+12e) on max(|x|^(1/2), |y|^(1/3)).
pub fn ln_hall_bound(params: &HallParams) -> Result<f64> {
    params.validate()?;
    let e = params.epsilon;
    Ok((1.0 + 10.0 * e) * params.k_epsilon.ln() + (1.0 + 12.0 * e) * params.ln_ns_d())
}

/// K^(1+10e) (N_S D)^(1+12e); may be infinite for very large parameters,
/// in which case `ln_hall_bound` remains exact.
pub fn hall_bound(params: &HallParams) -> Result<f64> {
    Ok(ln_hall_bound(params)?.exp())
}

/// 2 ln(hall_bound): at e = 0.1 this is 2(2 ln K + 2.2 ln(N_S D)).
pub fn heuristic_height_bound(params: &HallParams) -> Result<f64> {
    Ok(2.0 * ln_hall_bound(params)?)
}

/// Height proxy of a point x = n/s^2, y = m/s^3: ln max(|n|, s^2, |m|^(2/3)),
/// i.e. twice the log of max(|X|^(1/2), |Y|^(1/3)) after clearing denominators.
pub fn height_proxy(p: &SIntegralPoint) -> f64 {
    let n = p.x.numer();
    let s2 = p.x.denom();
    let m = p.y.numer();
    let mut h = big_ln(s2).max(0.0);
    if !n.is_zero() {
        h = h.max(big_ln(&n.abs()));
    }
    if !m.is_zero() {
        h = h.max(2.0 * big_ln(&m.abs()) / 3.0);
    }
    h
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HeightCheck {
    pub bound: f64,
    pub checked: usize,
    pub max_proxy: f64,
    /// Points whose proxy exceeds the bound; these would falsify the heuristic.
    pub violations: Vec<(String, String, String, f64)>,
}

/// Compares the height proxy of every point against `heuristic_height_bound`.
pub fn check_heights<'a, I>(points: I, params: &HallParams) -> Result<HeightCheck>
where
    I: IntoIterator<Item = (&'a BigInt, &'a SIntegralPoint)>,
{
    let bound = heuristic_height_bound(params)?;
    let mut check = HeightCheck { bound, checked: 0, max_proxy: 0.0, violations: Vec::new() };
    for (a, p) in points {
        let h = height_proxy(p);
        check.checked += 1;
        check.max_proxy = check.max_proxy.max(h);
        if h > bound + SLACK {
            check.violations.push((a.to_string(), p.x.to_string(), p.y.to_string(), h));
        }
    }
    Ok(check)
}

/// Largest k with p^(2k) | x and p^(3k) | y.
pub fn primitive_scaling_exponent(x: &BigInt, y: &BigInt, p: u64) -> u32 {
    let vx = if x.is_zero() { u32::MAX } else { valuation_u64(x, p).unwrap_or(0) };
    let vy = if y.is_zero() { u32::MAX } else { valuation_u64(y, p).unwrap_or(0) };
    (vx / 2).min(vy / 3)
}

/// Divides (x, y) by (p^(2k), p^(3k)) for each p in S until S-primitive.
pub fn make_s_primitive(x: &BigInt, y: &BigInt, s: &PrimeSet) -> (BigInt, BigInt) {
    let (mut x, mut y) = (x.clone(), y.clone());
    if x.is_zero() && y.is_zero() {
        return (x, y);
    }
    for p in s.iter() {
        let k = primitive_scaling_exponent(&x, &y, p);
        if k > 0 && k != u32::MAX {
            let pb = BigInt::from(p);
            x = x.div_floor(&pb.pow(2 * k));
            y = y.div_floor(&pb.pow(3 * k));
        }
    }
    (x, y)
}
