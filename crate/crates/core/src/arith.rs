//! Exact integer and rational helpers specialised to S-smooth arithmetic.
//!
//! Everything here works on arbitrary-precision values. The only general
//! purpose factoring is trial division followed by Pollard–Brent rho, which
//! is plenty for the cofactors that show up in the pipeline (those are almost
//! always 1) and is refused outright above 2^128.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::OnceLock;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Miller–Rabin with the first thirteen prime bases is deterministic below
/// this value.
const MR_BOUND: &str = "3317044064679887385961981";
const MR_BASES: [u32; 13] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41];

const TRIAL_LIMIT: u32 = 10_000;
const RHO_BUDGET: usize = 1 << 20;

fn mr_bound() -> &'static BigUint {
    static B: OnceLock<BigUint> = OnceLock::new();
    B.get_or_init(|| MR_BOUND.parse().unwrap())
}

fn fallback_bound() -> &'static BigUint {
    static B: OnceLock<BigUint> = OnceLock::new();
    B.get_or_init(|| BigUint::one() << 128u32)
}

fn small_primes() -> &'static [u32] {
    static P: OnceLock<Vec<u32>> = OnceLock::new();
    P.get_or_init(|| primes_up_to(TRIAL_LIMIT))
}

/// Sieve of Eratosthenes.
pub fn primes_up_to(n: u32) -> Vec<u32> {
    let n = n as usize;
    if n < 2 {
        return Vec::new();
    }
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u32);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

fn mulmod64(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn powmod64(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod64(r, b, m);
        }
        b = mulmod64(b, b, m);
        e >>= 1;
    }
    r
}

/// Deterministic primality test for machine-size integers.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &MR_BASES {
        let p = p as u64;
        if n == p {
            return true;
        }
        if n.is_multiple_of(p) {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'bases: for &a in &MR_BASES {
        let mut x = powmod64(a as u64, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod64(x, x, n);
            if x == n - 1 {
                continue 'bases;
            }
        }
        return false;
    }
    true
}

/// Deterministic Miller–Rabin. Inputs at or above 3.3e24 are rejected.
pub fn is_prime(n: &BigUint) -> Result<bool> {
    if let Some(small) = n.to_u64() {
        return Ok(is_prime_u64(small));
    }
    if n >= mr_bound() {
        return Err(Error::PrimalityBoundExceeded(n.to_string()));
    }
    for &p in &MR_BASES {
        if (n % p).is_zero() {
            return Ok(false);
        }
    }
    let one = BigUint::one();
    let n_minus_1 = n - &one;
    let s = n_minus_1.trailing_zeros().unwrap_or(0);
    let d = &n_minus_1 >> s;
    'bases: for &a in &MR_BASES {
        let mut x = BigUint::from(a).modpow(&d, n);
        if x == one || x == n_minus_1 {
            continue;
        }
        for _ in 1..s {
            x = (&x * &x) % n;
            if x == n_minus_1 {
                continue 'bases;
            }
        }
        return Ok(false);
    }
    Ok(true)
}

/// A finite set of rational primes, kept sorted and duplicate free.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct PrimeSet {
    primes: Vec<u64>,
    radical: BigInt,
}

impl PrimeSet {
    pub fn new<I: IntoIterator<Item = u64>>(primes: I) -> Result<Self> {
        let mut v: Vec<u64> = primes.into_iter().collect();
        for &p in &v {
            if !is_prime_u64(p) {
                return Err(Error::NotPrime(p.to_string()));
            }
        }
        v.sort_unstable();
        v.dedup();
        let radical = v.iter().fold(BigInt::one(), |acc, &p| acc * p);
        Ok(PrimeSet { primes: v, radical })
    }

    pub fn empty() -> Self {
        PrimeSet { primes: Vec::new(), radical: BigInt::one() }
    }

    /// The set S(n) of the first `n` primes.
    pub fn first(n: usize) -> Self {
        let mut v = Vec::with_capacity(n);
        let mut c = 2u64;
        while v.len() < n {
            if is_prime_u64(c) {
                v.push(c);
            }
            c += 1;
        }
        PrimeSet::new(v).expect("generated primes")
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        self.primes.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    pub fn contains(&self, p: u64) -> bool {
        self.primes.binary_search(&p).is_ok()
    }

    pub fn contains_big(&self, p: &BigInt) -> bool {
        p.to_u64().is_some_and(|p| self.contains(p))
    }

    /// N_S, the product of the members.
    pub fn radical(&self) -> &BigInt {
        &self.radical
    }

    pub fn with(&self, p: u64) -> Result<Self> {
        PrimeSet::new(self.primes.iter().copied().chain(std::iter::once(p)))
    }

    pub fn union(&self, other: &PrimeSet) -> Self {
        PrimeSet::new(self.iter().chain(other.iter())).expect("members already prime")
    }
}

impl fmt::Display for PrimeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, p) in self.primes.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, "}}")
    }
}

/// `ord_p(n)` for a nonzero integer.
pub fn valuation(n: &BigInt, p: &BigInt) -> Result<u32> {
    if n.is_zero() {
        return Err(Error::ValuationOfZero);
    }
    Ok(valuation_nonzero(n, p))
}

pub(crate) fn valuation_nonzero(n: &BigInt, p: &BigInt) -> u32 {
    debug_assert!(!n.is_zero());
    if let (Some(m), Some(q)) = (n.to_i128(), p.to_i128()) {
        let mut m = m;
        let mut v = 0;
        while m % q == 0 {
            m /= q;
            v += 1;
        }
        return v;
    }
    let mut m = n.clone();
    let mut v = 0;
    loop {
        let (q, r) = m.div_rem(p);
        if !r.is_zero() {
            return v;
        }
        m = q;
        v += 1;
    }
}

pub fn valuation_u64(n: &BigInt, p: u64) -> Result<u32> {
    valuation(n, &BigInt::from(p))
}

/// `ord_p(q)` for a nonzero rational; negative when p divides the denominator.
pub fn valuation_rational(q: &BigRational, p: &BigInt) -> Result<i64> {
    if q.is_zero() {
        return Err(Error::ValuationOfZero);
    }
    let num = valuation_nonzero(q.numer(), p) as i64;
    let den = valuation_nonzero(q.denom(), p) as i64;
    Ok(num - den)
}

/// Integer and rational inputs to [`padic_valuation`].
pub trait Valued {
    fn padic_valuation(&self, p: &BigInt) -> Result<i64>;
}

impl Valued for BigInt {
    fn padic_valuation(&self, p: &BigInt) -> Result<i64> {
        valuation(self, p).map(i64::from)
    }
}

impl Valued for BigRational {
    fn padic_valuation(&self, p: &BigInt) -> Result<i64> {
        valuation_rational(self, p)
    }
}

impl Valued for i64 {
    fn padic_valuation(&self, p: &BigInt) -> Result<i64> {
        valuation(&BigInt::from(*self), p).map(i64::from)
    }
}

pub fn padic_valuation<T: Valued + ?Sized>(n: &T, p: u64) -> Result<i64> {
    n.padic_valuation(&BigInt::from(p))
}

/// Sign, prime-power part and unfactored remainder of an integer.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FactoredInteger {
    pub sign: i8,
    pub exponents: BTreeMap<BigInt, u32>,
    pub cofactor: BigInt,
}

impl FactoredInteger {
    pub fn one() -> Self {
        FactoredInteger { sign: 1, exponents: BTreeMap::new(), cofactor: BigInt::one() }
    }

    pub fn is_complete(&self) -> bool {
        self.cofactor.is_one()
    }

    pub fn value(&self) -> BigInt {
        if self.sign == 0 {
            return BigInt::zero();
        }
        let mut v = self.cofactor.clone();
        for (p, &e) in &self.exponents {
            v *= num_traits::pow(p.clone(), e as usize);
        }
        if self.sign < 0 {
            -v
        } else {
            v
        }
    }

    pub fn exponent(&self, p: u64) -> u32 {
        self.exponents.get(&BigInt::from(p)).copied().unwrap_or(0)
    }

    pub fn primes(&self) -> impl Iterator<Item = &BigInt> {
        self.exponents.keys()
    }

    /// `[[p, e], ...]` in increasing order of p.
    pub fn pairs(&self) -> Vec<(BigInt, u32)> {
        self.exponents.iter().map(|(p, e)| (p.clone(), *e)).collect()
    }

    /// Natural logarithm of |value|; only meaningful when fully factored.
    pub fn ln_abs(&self) -> f64 {
        let mut s = 0.0;
        for (p, &e) in &self.exponents {
            s += e as f64 * big_ln(p);
        }
        if !self.cofactor.is_one() {
            s += big_ln(&self.cofactor);
        }
        s
    }

    fn insert(&mut self, p: BigInt, e: u32) {
        if e > 0 {
            *self.exponents.entry(p).or_insert(0) += e;
        }
    }
}

impl fmt::Display for FactoredInteger {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.sign == 0 {
            return write!(f, "0");
        }
        if self.sign < 0 {
            write!(f, "-")?;
        }
        let mut first = true;
        for (p, e) in &self.exponents {
            if !first {
                write!(f, "*")?;
            }
            first = false;
            if *e == 1 {
                write!(f, "{p}")?;
            } else {
                write!(f, "{p}^{e}")?;
            }
        }
        if !self.cofactor.is_one() || first {
            if !first {
                write!(f, "*")?;
            }
            write!(f, "{}", self.cofactor)?;
        }
        Ok(())
    }
}

/// Natural log of a positive big integer without overflowing f64.
pub fn big_ln(n: &BigInt) -> f64 {
    let n = n.abs();
    let bits = n.bits();
    if bits < 1000 {
        return n.to_f64().unwrap_or(f64::INFINITY).ln();
    }
    let shift = bits - 64;
    let top = (&n >> shift).to_f64().unwrap();
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// Strips every prime of `primes` from `n`, returning the exponents found.
fn strip(n: &mut BigInt, primes: impl Iterator<Item = BigInt>, into: &mut FactoredInteger) {
    for p in primes {
        if n.is_one() {
            break;
        }
        let mut e = 0;
        loop {
            let (q, r) = n.div_rem(&p);
            if !r.is_zero() {
                break;
            }
            *n = q;
            e += 1;
        }
        into.insert(p, e);
    }
}

/// Trial-divides `n` by the primes of `S`; with `fallback`, the remaining
/// cofactor is factored completely: trial division by small primes, then
/// Pollard rho, refusing composite cofactors above 2^128 at that stage.
pub fn factor_over(n: &BigInt, s: &PrimeSet, fallback: bool) -> Result<FactoredInteger> {
    if n.is_zero() {
        return Err(Error::ValuationOfZero);
    }
    let mut out = FactoredInteger {
        sign: if n.is_negative() { -1 } else { 1 },
        exponents: BTreeMap::new(),
        cofactor: BigInt::one(),
    };
    let mut m = n.abs();
    strip(&mut m, s.iter().map(BigInt::from), &mut out);
    if fallback && !m.is_one() {
        for (p, e) in factor_positive(m.to_biguint().expect("positive"))? {
            out.insert(BigInt::from(p), e);
        }
        m = BigInt::one();
    }
    out.cofactor = m;
    Ok(out)
}

/// Complete factorization (same fallback limits as [`factor_over`]).
pub fn factor(n: &BigInt) -> Result<FactoredInteger> {
    factor_over(n, &PrimeSet::empty(), true)
}

fn factor_positive(mut n: BigUint) -> Result<BTreeMap<BigUint, u32>> {
    let mut out = BTreeMap::new();
    for &p in small_primes() {
        if n.is_one() {
            return Ok(out);
        }
        let pp = BigUint::from(p);
        if &pp * &pp > n {
            break;
        }
        let mut e = 0;
        while (&n % p).is_zero() {
            n /= p;
            e += 1;
        }
        if e > 0 {
            out.insert(pp, e);
        }
    }
    if n > *fallback_bound() {
        return Err(Error::FactorBoundExceeded(n.to_string()));
    }
    let mut stack = vec![n];
    while let Some(m) = stack.pop() {
        if m.is_one() {
            continue;
        }
        let limit = BigUint::from(TRIAL_LIMIT) * BigUint::from(TRIAL_LIMIT);
        if m < limit || is_prime_guarded(&m)? {
            *out.entry(m).or_insert(0) += 1;
            continue;
        }
        if let Some(r) = perfect_square_root(&m) {
            stack.push(r.clone());
            stack.push(r);
            continue;
        }
        let d = pollard_brent(&m).ok_or_else(|| Error::FactorizationFailed(m.to_string()))?;
        stack.push(&m / &d);
        stack.push(d);
    }
    Ok(out)
}

fn is_prime_guarded(m: &BigUint) -> Result<bool> {
    match is_prime(m) {
        Ok(b) => Ok(b),
        // Above the deterministic range we can only try to split it.
        Err(Error::PrimalityBoundExceeded(_)) => Ok(false),
        Err(e) => Err(e),
    }
}

fn perfect_square_root(m: &BigUint) -> Option<BigUint> {
    let r = m.sqrt();
    (&r * &r == *m).then_some(r)
}

fn pollard_brent(n: &BigUint) -> Option<BigUint> {
    if n.is_even() {
        return Some(BigUint::from(2u32));
    }
    let one = BigUint::one();
    for c in 1u32..20 {
        let c = BigUint::from(c);
        let f = |x: &BigUint| (x * x + &c) % n;
        let mut y = BigUint::from(2u32);
        let mut r = 1usize;
        let mut q = BigUint::one();
        let mut g = BigUint::one();
        let mut x = y.clone();
        let mut ys = y.clone();
        let mut spent = 0usize;
        while g == one {
            x = y.clone();
            for _ in 0..r {
                y = f(&y);
            }
            let mut k = 0;
            while k < r && g == one {
                ys = y.clone();
                let m = (r - k).min(128);
                for _ in 0..m {
                    y = f(&y);
                    let diff = if x > y { &x - &y } else { &y - &x };
                    q = (q * diff) % n;
                }
                g = q.gcd(n);
                k += m;
            }
            r *= 2;
            spent += r;
            if spent > RHO_BUDGET {
                break;
            }
        }
        if g == *n {
            loop {
                ys = f(&ys);
                let diff = if x > ys { &x - &ys } else { &ys - &x };
                g = diff.gcd(n);
                if g != one {
                    break;
                }
            }
        }
        if g != one && g != *n {
            return Some(g);
        }
    }
    None
}

/// Product of the distinct primes dividing `n`.
pub fn radical(n: &BigInt) -> Result<BigInt> {
    let f = factor(n)?;
    Ok(f.exponents.keys().fold(BigInt::one(), |acc, p| acc * p))
}

/// True when every prime factor of `n` lies in `S`.
pub fn is_s_smooth(n: &BigInt, s: &PrimeSet) -> bool {
    if n.is_zero() {
        return false;
    }
    let mut m = n.abs();
    for p in s.iter() {
        if m.is_one() {
            break;
        }
        let p = BigInt::from(p);
        loop {
            let (q, r) = m.div_rem(&p);
            if !r.is_zero() {
                break;
            }
            m = q;
        }
    }
    m.is_one()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SMembership {
    SUnit,
    SInteger,
    Neither,
}

/// Classifies a rational as an S-unit, an S-integer (but not unit), or neither.
pub fn s_membership(q: &BigRational, s: &PrimeSet) -> SMembership {
    if !is_s_smooth(q.denom(), s) {
        return SMembership::Neither;
    }
    if !q.is_zero() && is_s_smooth(q.numer(), s) {
        SMembership::SUnit
    } else {
        SMembership::SInteger
    }
}

pub fn is_s_unit(q: &BigRational, s: &PrimeSet) -> bool {
    s_membership(q, s) == SMembership::SUnit
}

pub fn is_s_integer(q: &BigRational, s: &PrimeSet) -> bool {
    s_membership(q, s) != SMembership::Neither
}

/// Exact integer `k`-th root of `n` if it exists (sign handled for odd k).
pub fn exact_root(n: &BigInt, k: u32) -> Option<BigInt> {
    if n.is_negative() {
        if k.is_multiple_of(2) {
            return None;
        }
        return exact_root(&-n, k).map(|r| -r);
    }
    let r = n.nth_root(k);
    (num_traits::pow(r.clone(), k as usize) == *n).then_some(r)
}

/// Builds `sign * prod p^e` as a big integer.
pub fn s_unit_value(negative: bool, exps: &[(u64, i64)]) -> BigRational {
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for &(p, e) in exps {
        let pe = num_traits::pow(BigInt::from(p), e.unsigned_abs() as usize);
        if e >= 0 {
            num *= pe;
        } else {
            den *= pe;
        }
    }
    if negative {
        num = -num;
    }
    BigRational::new(num, den)
}

pub(crate) fn sign_of(n: &BigInt) -> i8 {
    match n.sign() {
        Sign::Minus => -1,
        Sign::NoSign => 0,
        Sign::Plus => 1,
    }
}
