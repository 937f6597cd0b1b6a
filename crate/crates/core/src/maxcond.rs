//! Curves attaining the maximal conductor M_S when 2 or 3 lies in S.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::PrimeSet;
use crate::curve::{qb, qi, WeierstrassCurve};
use crate::error::{Error, Result};
use crate::localdata::{global_minimal_model, tate_local_u64, Kodaira};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum MaxCondFamily {
    /// y^2 = x^3 - 18x + 24, for 2, 3 in S.
    E23,
    /// y^2 = x^3 + 8x, for 2 in S and 3 not in S.
    E2,
    /// y^2 + y = x^3 - 1, for 3 in S and 2 not in S.
    E3,
}

impl MaxCondFamily {
    pub fn for_primes(s: &PrimeSet) -> Option<Self> {
        match (s.contains(2), s.contains(3)) {
            (true, true) => Some(MaxCondFamily::E23),
            (true, false) => Some(MaxCondFamily::E2),
            (false, true) => Some(MaxCondFamily::E3),
            (false, false) => None,
        }
    }

    pub fn base(self) -> WeierstrassCurve {
        match self {
            MaxCondFamily::E23 => WeierstrassCurve::from_ints([0, 0, 0, -18, 24]),
            MaxCondFamily::E2 => WeierstrassCurve::from_ints([0, 0, 0, 8, 0]),
            MaxCondFamily::E3 => WeierstrassCurve::from_ints([0, 0, 1, 0, -1]),
        }
        .expect("base curves are nonsingular")
    }

    /// Short model of the quadratic twist by `d`: the E3 twist is
    /// y^2 = x^3 - 48 d^3.
    pub fn twist(self, d: &BigInt) -> Result<WeierstrassCurve> {
        check_twist_parameter(d)?;
        let d = qb(d);
        let (a, b) = match self {
            MaxCondFamily::E23 => (qi(-18) * &d * &d, qi(24) * &d * &d * &d),
            MaxCondFamily::E2 => (qi(8) * &d * &d, qi(0)),
            MaxCondFamily::E3 => (qi(0), qi(-48) * &d * &d * &d),
        };
        WeierstrassCurve::short(a, b)
    }

    /// Twist parameter that keeps the conductor at M_S. For E3 a twist by
    /// d = 3 mod 4 is ramified at 2, so -d is used instead.
    pub fn effective_parameter(self, d: &BigInt) -> BigInt {
        if self == MaxCondFamily::E3 && d.mod_floor(&BigInt::from(4)) == BigInt::from(3) {
            -d
        } else {
            d.clone()
        }
    }

    /// Expected (Kodaira type, f_p) at p for a twist by d coprime to 6.
    pub fn expected_local(self, p: u64, d: &BigInt) -> (Kodaira, u32) {
        match (self, p) {
            (MaxCondFamily::E23, 2) => (Kodaira::III, 8),
            (MaxCondFamily::E23, 3) => (Kodaira::II, 5),
            (MaxCondFamily::E2, 2) => (Kodaira::IIIStar, 8),
            (MaxCondFamily::E2, 3) => (Kodaira::I0, 0),
            (MaxCondFamily::E3, 2) => (Kodaira::I0, 0),
            (MaxCondFamily::E3, 3) => (Kodaira::II, 5),
            _ if (d % p).is_zero() => (Kodaira::I0Star, 2),
            _ => (Kodaira::I0, 0),
        }
    }
}

fn check_twist_parameter(d: &BigInt) -> Result<()> {
    let n = d.abs();
    if n.is_one() {
        return Ok(());
    }
    if n.is_even() || (&n % 3u32) == BigInt::from(0) {
        return Err(Error::InvalidTwist(format!("{d} is not coprime to 6")));
    }
    let f = crate::arith::factor(&n)?;
    if f.pairs().iter().any(|(_, e)| *e > 1) {
        return Err(Error::InvalidTwist(format!("{d} is not squarefree")));
    }
    Ok(())
}

/// M_S = prod p^f_p with f_2 = 8, f_3 = 5, f_p = 2 otherwise.
pub fn maximal_conductor(s: &PrimeSet) -> BigInt {
    s.iter().map(|p| BigInt::from(p).pow(crate::assembly::conductor_cap(p))).product()
}

/// Product of the primes of S that are at least 5.
pub fn twist_parameter(s: &PrimeSet) -> BigInt {
    s.iter().filter(|&p| p >= 5).map(BigInt::from).product()
}

/// A curve with conductor M_S; needs 2 or 3 in S.
pub fn maximal_conductor_curve(s: &PrimeSet) -> Result<WeierstrassCurve> {
    let family = MaxCondFamily::for_primes(s).ok_or_else(|| {
        Error::InvalidArgument("the maximal conductor construction needs 2 or 3 in S".into())
    })?;
    let d = twist_parameter(s);
    family.twist(&family.effective_parameter(&d))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PrimeCheck {
    pub p: u64,
    pub expected_kodaira: String,
    pub expected_f: u32,
    pub kodaira: String,
    pub f: u32,
    pub ord_disc: u32,
    pub exit_step: u8,
    pub non_minimal_steps: u32,
    pub trace: String,
    pub pass: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MaxCondStatus {
    Verified,
    Failed,
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MaxCondReport {
    pub primes: Vec<u64>,
    pub status: MaxCondStatus,
    pub family: Option<MaxCondFamily>,
    pub d: Option<String>,
    pub ainvs: Option<Vec<String>>,
    pub expected_conductor: String,
    pub conductor: Option<String>,
    pub checks: Vec<PrimeCheck>,
    pub note: Option<String>,
}

fn step_trace(exit_step: u8, non_minimal_steps: u32) -> String {
    let mut parts: Vec<String> = (0..non_minimal_steps).map(|_| "step 11 (rescale)".to_string()).collect();
    parts.push(format!("exit at step {exit_step}"));
    parts.join(", ")
}

/// Runs Tate's algorithm on `e` at p and compares with the expected data.
pub fn check_prime(e: &WeierstrassCurve, p: u64, expected: (Kodaira, u32)) -> Result<PrimeCheck> {
    let ld = tate_local_u64(e, p)?;
    Ok(PrimeCheck {
        p,
        expected_kodaira: expected.0.to_string(),
        expected_f: expected.1,
        kodaira: ld.kodaira.to_string(),
        f: ld.conductor_exponent,
        ord_disc: ld.ord_disc,
        exit_step: ld.exit_step,
        non_minimal_steps: ld.non_minimal_steps,
        trace: step_trace(ld.exit_step, ld.non_minimal_steps),
        pass: ld.kodaira == expected.0 && ld.conductor_exponent == expected.1,
    })
}

/// Checks of `family` twisted by `d` at 2, 3 and every prime of d.
pub fn verify_family_twist(family: MaxCondFamily, d: &BigInt) -> Result<Vec<PrimeCheck>> {
    let e = family.twist(d)?;
    let mut primes = vec![2u64, 3];
    if !d.abs().is_one() {
        for (p, _) in crate::arith::factor(&d.abs())?.pairs() {
            primes.push(p.try_into().map_err(|_| Error::InvalidTwist(d.to_string()))?);
        }
    }
    primes.par_iter().map(|&p| check_prime(&e, p, family.expected_local(p, d))).collect()
}

/// Builds the maximal-conductor curve for S and checks Kodaira types and
/// conductor exponents at every prime of S and at the absent one of 2, 3.
pub fn verify_maximal_conductor(s: &PrimeSet) -> Result<MaxCondReport> {
    let expected_conductor = maximal_conductor(s).to_string();
    let Some(family) = MaxCondFamily::for_primes(s) else {
        return Ok(MaxCondReport {
            primes: s.primes().to_vec(),
            status: MaxCondStatus::Unknown,
            family: None,
            d: None,
            ainvs: None,
            expected_conductor,
            conductor: None,
            checks: Vec::new(),
            note: Some("S contains neither 2 nor 3; whether M_S is attained is not decided here".into()),
        });
    };
    let d = family.effective_parameter(&twist_parameter(s));
    let e = family.twist(&d)?;
    let mut primes: Vec<u64> = s.iter().collect();
    for extra in [2, 3] {
        if !s.contains(extra) {
            primes.push(extra);
        }
    }
    primes.sort_unstable();
    let checks: Vec<PrimeCheck> =
        primes.par_iter().map(|&p| check_prime(&e, p, family.expected_local(p, &d))).collect::<Result<_>>()?;
    let global = global_minimal_model(&e)?;
    let conductor = global.conductor_value();
    let pass = checks.iter().all(|c| c.pass) && conductor.to_string() == expected_conductor;
    Ok(MaxCondReport {
        primes: s.primes().to_vec(),
        status: if pass { MaxCondStatus::Verified } else { MaxCondStatus::Failed },
        family: Some(family),
        d: Some(d.to_string()),
        ainvs: Some(e.ainvs().iter().map(|a| a.to_string()).collect()),
        expected_conductor,
        conductor: Some(conductor.to_string()),
        checks,
        note: None,
    })
}
