//! Brute-force S-unit equation x + y = 1 and the Frey curve correspondence.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::arith::{is_s_smooth, is_s_unit, PrimeSet};
use crate::curve::{qb, qi, WeierstrassCurve, Q};
use crate::error::{Error, Result};
use crate::localdata::global_minimal_model;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SUnitSolution {
    pub x: Q,
    pub y: Q,
    /// Class under the swap (x, y) -> (y, x).
    pub symmetry_class_id: usize,
    /// Class under the six-element lambda orbit.
    pub orbit_class_id: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SUnitResult {
    pub primes: Vec<u64>,
    pub exponent_bound: u32,
    /// Brute force over a box; completeness is not claimed.
    pub exhaustive: bool,
    pub solutions: Vec<SUnitSolution>,
    pub swap_class_count: usize,
    pub orbit_class_count: usize,
}

/// 30 for |S| <= 3, 15 otherwise.
pub fn default_exponent_bound(s: &PrimeSet) -> u32 {
    if s.len() <= 3 {
        30
    } else {
        15
    }
}

/// The six values {l, 1-l, 1/l, 1/(1-l), l/(l-1), (l-1)/l}, deduplicated.
pub fn lambda_orbit(l: &Q) -> Vec<Q> {
    let one = Q::one();
    let mut out: BTreeSet<Q> = BTreeSet::new();
    if l.is_zero() || *l == one {
        return Vec::new();
    }
    let m = &one - l;
    out.insert(l.clone());
    out.insert(m.clone());
    out.insert(l.recip());
    out.insert(m.recip());
    out.insert(l / (l - &one));
    out.insert((l - &one) / l);
    out.into_iter().collect()
}

fn swap_key(x: &Q, y: &Q) -> (BigInt, BigInt) {
    let kx = (x.numer().clone(), x.denom().clone());
    let ky = (y.numer().clone(), y.denom().clone());
    kx.min(ky)
}

/// Enumerates x = +-prod p^e_p with |e_p| <= bound such that 1 - x is an
/// S-unit, closes the set under the lambda orbit, and groups it into swap
/// classes and orbit classes.
pub fn solve_s_unit_equation(s: &PrimeSet, exponent_bound: u32) -> Result<SUnitResult> {
    if s.is_empty() {
        return Err(Error::InvalidArgument("S must be nonempty".into()));
    }
    if exponent_bound == 0 {
        return Err(Error::InvalidArgument("exponent bound must be at least 1".into()));
    }
    let primes: Vec<u64> = s.iter().collect();
    let b = exponent_bound as i64;
    let range: Vec<i64> = (-b..=b).collect();
    // Powers p^|e| for each prime, indexed by |e|.
    let powers: Vec<Vec<BigInt>> = primes
        .iter()
        .map(|&p| {
            let mut v = vec![BigInt::one()];
            for _ in 0..exponent_bound {
                let next = v.last().unwrap() * p;
                v.push(next);
            }
            v
        })
        .collect();

    let slices: Vec<(bool, i64)> = [false, true].iter().flat_map(|&neg| range.iter().map(move |&e| (neg, e))).collect();
    let found: Vec<Q> = slices
        .into_par_iter()
        .flat_map_iter(|(neg, e0)| {
            let mut out = Vec::new();
            let mut exps = vec![-b; primes.len()];
            exps[0] = e0;
            loop {
                let mut num = BigInt::one();
                let mut den = BigInt::one();
                for (i, &e) in exps.iter().enumerate() {
                    if e >= 0 {
                        num *= &powers[i][e as usize];
                    } else {
                        den *= &powers[i][(-e) as usize];
                    }
                }
                if neg {
                    num = -num;
                }
                let diff = &den - &num;
                if !diff.is_zero() && is_s_smooth(&diff, s) {
                    out.push(Q::new(num, den));
                }
                // Odometer over the remaining exponents.
                let mut i = 1;
                while i < exps.len() {
                    if exps[i] < b {
                        exps[i] += 1;
                        break;
                    }
                    exps[i] = -b;
                    i += 1;
                }
                if i == exps.len() {
                    break;
                }
            }
            out
        })
        .collect();

    let mut all: BTreeSet<Q> = BTreeSet::new();
    for x in &found {
        all.extend(lambda_orbit(x));
    }
    debug_assert!(all.iter().all(|x| is_s_unit(x, s) && is_s_unit(&(Q::one() - x), s)));

    let mut swap_ids: BTreeMap<(BigInt, BigInt), usize> = BTreeMap::new();
    let mut orbit_ids: BTreeMap<Q, usize> = BTreeMap::new();
    let mut solutions = Vec::with_capacity(all.len());
    for x in &all {
        let y = Q::one() - x;
        let next = swap_ids.len();
        let symmetry_class_id = *swap_ids.entry(swap_key(x, &y)).or_insert(next);
        let orbit_key = lambda_orbit(x).into_iter().next().expect("orbit is nonempty");
        let next = orbit_ids.len();
        let orbit_class_id = *orbit_ids.entry(orbit_key).or_insert(next);
        solutions.push(SUnitSolution { x: x.clone(), y, symmetry_class_id, orbit_class_id });
    }
    Ok(SUnitResult {
        primes,
        exponent_bound,
        exhaustive: false,
        swap_class_count: swap_ids.len(),
        orbit_class_count: orbit_ids.len(),
        solutions,
    })
}

/// Integral model of Y^2 = X(X - 1)(X - x): with x = u/v in lowest terms,
/// Y^2 = X(X - v^2)(X - uv).
pub fn frey_curve(x: &Q) -> Result<WeierstrassCurve> {
    if x.is_zero() || x.is_one() {
        return Err(Error::SingularModel);
    }
    let u = x.numer();
    let v = x.denom();
    let r1 = v * v;
    let r2 = u * v;
    let a2 = -(&r1 + &r2);
    let a4 = &r1 * &r2;
    WeierstrassCurve::new([qi(0), qb(&a2), qi(0), qb(&a4), qi(0)])
}

/// Integer root of a monotone cubic on [lo, hi], if any.
fn monotone_root(f: &impl Fn(&BigInt) -> BigInt, lo: BigInt, hi: BigInt, increasing: bool) -> Option<BigInt> {
    if lo > hi {
        return None;
    }
    let (mut lo, mut hi) = (lo, hi);
    while lo <= hi {
        let mid: BigInt = (&lo + &hi).div_floor(&BigInt::from(2));
        let v = f(&mid);
        if v.is_zero() {
            return Some(mid);
        }
        if (v.is_positive()) == increasing {
            hi = mid - 1;
        } else {
            lo = mid + 1;
        }
    }
    None
}

/// Distinct integer roots of z^3 + p z + q.
fn integer_roots_depressed_cubic(p: &BigInt, q: &BigInt) -> Vec<BigInt> {
    let f = |z: &BigInt| z * z * z + p * z + q;
    let bound = BigInt::one() + p.abs().max(q.abs());
    let mut roots = Vec::new();
    if !p.is_negative() {
        roots.extend(monotone_root(&f, -&bound, bound, true));
    } else {
        let t = (-p).div_floor(&BigInt::from(3));
        let fl = t.sqrt();
        let ce = if BigInt::from(3) * &fl * &fl < -p { &fl + 1 } else { fl.clone() };
        roots.extend(monotone_root(&f, -&bound, -&ce, true));
        roots.extend(monotone_root(&f, -&fl, fl.clone(), false));
        roots.extend(monotone_root(&f, ce, bound, true));
    }
    roots.sort();
    roots.dedup();
    roots
}

/// Rational roots of the 2-division polynomial, via the model
/// y^2 = x^3 - 27 c4 x - 54 c6 scaled to integral coefficients.
pub fn two_torsion_roots(e: &WeierstrassCurve) -> Vec<Q> {
    let a = qi(-27) * e.c4();
    let b = qi(-54) * e.c6();
    let l: BigInt = a.denom().lcm(b.denom());
    let lq = qb(&l);
    let p = (&a * &lq * &lq).to_integer();
    let q = (&b * &lq * &lq * &lq).to_integer();
    integer_roots_depressed_cubic(&p, &q).into_iter().map(|z| Q::new(z, l.clone())).collect()
}

/// The lambda orbit of E when it has full rational 2-torsion, else empty.
pub fn lambda_solutions(e: &WeierstrassCurve) -> Vec<Q> {
    let roots = two_torsion_roots(e);
    if roots.len() != 3 {
        return Vec::new();
    }
    let l = (&roots[2] - &roots[0]) / (&roots[1] - &roots[0]);
    lambda_orbit(&l)
}

/// Members of the lambda orbit that solve the S-unit equation.
pub fn recovered_solutions(e: &WeierstrassCurve, s: &PrimeSet) -> Vec<Q> {
    lambda_solutions(e)
        .into_iter()
        .filter(|x| is_s_unit(x, s) && is_s_unit(&(Q::one() - x), s))
        .collect()
}

/// One output line: {x, y, frey_ainvs, frey_conductor}.
pub fn solution_to_json(sol: &SUnitSolution) -> Result<Value> {
    let e = frey_curve(&sol.x)?;
    let g = global_minimal_model(&e)?;
    Ok(json!({
        "x": sol.x.to_string(),
        "y": sol.y.to_string(),
        "frey_ainvs": e.ainvs().iter().map(|a| a.to_string()).collect::<Vec<_>>(),
        "frey_conductor": g.conductor_value().to_string(),
        "symmetry_class_id": sol.symmetry_class_id,
        "orbit_class_id": sol.orbit_class_id,
    }))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SUnitSummary {
    pub primes: Vec<u64>,
    pub exponent_bound: u32,
    pub exhaustive: bool,
    pub solution_count: usize,
    pub swap_class_count: usize,
    pub orbit_class_count: usize,
}

impl SUnitResult {
    pub fn summary(&self) -> SUnitSummary {
        SUnitSummary {
            primes: self.primes.clone(),
            exponent_bound: self.exponent_bound,
            exhaustive: self.exhaustive,
            solution_count: self.solutions.len(),
            swap_class_count: self.swap_class_count,
            orbit_class_count: self.orbit_class_count,
        }
    }
}
