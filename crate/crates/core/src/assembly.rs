//! Database assembly for M(S): reconstruction, deduplication, twist orbits,
//! isogeny clustering by Frobenius traces, and statistics.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::arith::{primes_up_to, FactoredInteger, PrimeSet};
use crate::curve::{parse_rational, twist_orbit, WeierstrassCurve, Q};
use crate::error::{Error, Result};
use crate::localdata::{
    global_minimal_model_with_hint, has_good_reduction_outside, integral_scaling, tate_integral, Kodaira,
};
use crate::mordell::{plan_for, reconstruct_with_window, search_plan, SIntegralPoint, SearchBounds};

/// One Q-isomorphism class of the database.
#[derive(Clone, Debug, PartialEq)]
pub struct CurveRecord {
    pub label: Option<String>,
    /// Global minimal model in reduced form.
    pub curve: WeierstrassCurve,
    pub c4: BigInt,
    pub c6: BigInt,
    pub conductor: FactoredInteger,
    pub min_disc: FactoredInteger,
    pub j: Q,
    pub szpiro: f64,
    pub twist_orbit_id: usize,
    pub isogeny_cluster_id: usize,
    /// `(a, P)` pairs whose reconstruction produced this curve; empty for
    /// curves added by twist closure or ingestion.
    pub provenance: Vec<(BigInt, SIntegralPoint)>,
}

impl CurveRecord {
    pub fn from_curve(e: &WeierstrassCurve, label: Option<String>) -> Result<Self> {
        Self::from_curve_with_hint(e, label, &PrimeSet::new([2, 3]).unwrap())
    }

    pub(crate) fn from_curve_with_hint(e: &WeierstrassCurve, label: Option<String>, hint: &PrimeSet) -> Result<Self> {
        let g = global_minimal_model_with_hint(e, hint)?;
        let curve = g.minimal_model;
        let szpiro = if g.conductor.exponents.is_empty() {
            f64::NAN
        } else {
            g.min_disc.ln_abs() / g.conductor.ln_abs()
        };
        Ok(CurveRecord {
            label,
            c4: curve.c4().to_integer(),
            c6: curve.c6().to_integer(),
            j: curve.j_invariant().clone(),
            curve,
            conductor: g.conductor,
            min_disc: g.min_disc,
            szpiro,
            twist_orbit_id: 0,
            isogeny_cluster_id: 0,
            provenance: Vec::new(),
        })
    }

    pub fn conductor_value(&self) -> BigInt {
        self.conductor.value()
    }

    pub fn log_conductor(&self) -> f64 {
        self.conductor.ln_abs()
    }

    fn sort_key(&self) -> (BigInt, BigInt, BigInt) {
        (self.conductor_value(), self.c4.clone(), self.c6.clone())
    }
}

/// `log|Delta_min| / log N`.
pub fn szpiro_ratio(record: &CurveRecord) -> Result<f64> {
    if record.conductor.exponents.is_empty() {
        return Err(Error::InvalidArgument("Szpiro ratio needs N > 1".into()));
    }
    Ok(record.min_disc.ln_abs() / record.conductor.ln_abs())
}

/// Right-hand side of `#M(S(n)) = 2^(n+1) (#j - 2) + 2 * 4^n + 2 * 6^n`.
pub fn counting_identity(n: u32, j_count: u64) -> Result<BigInt> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("counting identity needs n >= 2, got {n}")));
    }
    if j_count < 2 {
        return Err(Error::InvalidArgument("j count must include j = 0 and j = 1728".into()));
    }
    let pow = |b: u32| num_traits::pow(BigInt::from(b), n as usize);
    Ok(BigInt::from(2) * pow(2) * (j_count - 2) + 2 * pow(4) + 2 * pow(6))
}

/// `a_p = p + 1 - #E(F_p)` by direct counting at a prime of good reduction.
pub fn trace_of_frobenius(e: &WeierstrassCurve, p: u64) -> Result<i64> {
    if p > 100_000 {
        return Err(Error::InvalidArgument(format!("p = {p} is above the point-counting budget 100000")));
    }
    if !crate::arith::is_prime_u64(p) {
        return Err(Error::NotPrime(p.to_string()));
    }
    let (_, a) = integral_scaling(e);
    let pb = BigInt::from(p);
    let (ld, m) = tate_integral(&a, &pb);
    if ld.kodaira != Kodaira::I0 {
        return Err(Error::BadReduction(p.to_string()));
    }
    let red: Vec<u64> = m.iter().map(|c| c.mod_floor_u64(p)).collect();
    let ap = trace_from_reduced(&red, p);
    debug_assert!((ap * ap) as u64 <= 4 * p);
    Ok(ap)
}

trait ModU64 {
    fn mod_floor_u64(&self, p: u64) -> u64;
}

impl ModU64 for BigInt {
    fn mod_floor_u64(&self, p: u64) -> u64 {
        let r = self % BigInt::from(p);
        let r = if r.is_negative() { r + p } else { r };
        r.to_u64().unwrap()
    }
}

/// Trace from a-invariants already reduced mod `p`.
fn trace_from_reduced(a: &[u64], p: u64) -> i64 {
    let (a1, a2, a3, a4, a6) = (a[0], a[1], a[2], a[3], a[4]);
    if p == 2 {
        let mut count = 1i64;
        for x in 0..2u64 {
            for y in 0..2u64 {
                let lhs = y * y + a1 * x * y + a3 * y;
                let rhs = x * x * x + a2 * x * x + a4 * x + a6;
                if (lhs + rhs) % 2 == 0 {
                    count += 1;
                }
            }
        }
        return 3 - count;
    }
    let mut chi = vec![-1i64; p as usize];
    chi[0] = 0;
    for y in 1..p {
        chi[((y * y) % p) as usize] = 1;
    }
    let b2 = (a1 * a1 + 4 * a2) % p;
    let b4 = (2 * a4 + a1 * a3) % p;
    let b6 = (a3 * a3 + 4 * a6) % p;
    let mut sum = 0i64;
    for x in 0..p {
        let v = ((4 * x % p * x % p * x + b2 * x % p * x + 2 * b4 * x + b6) % p) as usize;
        sum += chi[v];
    }
    -sum
}

/// Equivalence classes of possibly isogenous curves: same conductor and same
/// `a_p` for every good `p <= trace_prime_bound`, merged with explicit
/// 3-isogenies `y^2 = x^3 + B ~ y^2 = x^3 - 27B`. Equal traces are necessary
/// for isogeny, so this is a heuristic; ids are numbered by first member in
/// the given order.
pub fn cluster_isogeny_classes(records: &mut [CurveRecord], trace_prime_bound: u32) -> Result<()> {
    let primes = primes_up_to(trace_prime_bound);
    let keys: Vec<(BigInt, Vec<i64>)> = records
        .par_iter()
        .map(|r| {
            let n = r.conductor_value();
            let traces = primes
                .iter()
                .filter(|&&p| !n.is_multiple_of_u64(p as u64))
                .map(|&p| trace_of_frobenius(&r.curve, p as u64))
                .collect::<Result<Vec<i64>>>()?;
            Ok((n, traces))
        })
        .collect::<Result<_>>()?;

    let mut parent: Vec<usize> = (0..records.len()).collect();
    fn find(parent: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while parent[r] != r {
            r = parent[r];
        }
        let mut c = i;
        while parent[c] != r {
            let n = parent[c];
            parent[c] = r;
            c = n;
        }
        r
    }
    fn union(parent: &mut [usize], a: usize, b: usize) {
        let (ra, rb) = (find(parent, a), find(parent, b));
        if ra != rb {
            let (lo, hi) = (ra.min(rb), ra.max(rb));
            parent[hi] = lo;
        }
    }

    let mut first: BTreeMap<&(BigInt, Vec<i64>), usize> = BTreeMap::new();
    for (i, k) in keys.iter().enumerate() {
        match first.get(k) {
            Some(&j) => union(&mut parent, i, j),
            None => {
                first.insert(k, i);
            }
        }
    }

    let by_invariants: BTreeMap<(BigInt, BigInt), usize> =
        records.iter().enumerate().map(|(i, r)| ((r.c4.clone(), r.c6.clone()), i)).collect();
    for (i, r) in records.iter().enumerate() {
        if let Some(partner) = mordell_partner_invariants(&r.curve)? {
            if let Some(&j) = by_invariants.get(&partner) {
                union(&mut parent, i, j);
            }
        }
    }

    let mut ids: BTreeMap<usize, usize> = BTreeMap::new();
    for (i, r) in records.iter_mut().enumerate() {
        let root = find(&mut parent, i);
        let next = ids.len();
        r.isogeny_cluster_id = *ids.entry(root).or_insert(next);
    }
    Ok(())
}

trait DivU64 {
    fn is_multiple_of_u64(&self, p: u64) -> bool;
}

impl DivU64 for BigInt {
    fn is_multiple_of_u64(&self, p: u64) -> bool {
        (self % BigInt::from(p)).is_zero()
    }
}

/// For `j = 0` curves `y^2 = x^3 + B`: minimal invariants of `y^2 = x^3 - 27B`.
fn mordell_partner_invariants(e: &WeierstrassCurve) -> Result<Option<(BigInt, BigInt)>> {
    if !e.j_invariant().is_zero() {
        return Ok(None);
    }
    let (_, b) = e.short_coefficients();
    let partner = WeierstrassCurve::short(Q::zero(), b * Q::from_integer((-27).into()))?;
    let g = global_minimal_model_with_hint(&partner, &PrimeSet::new([2, 3]).unwrap())?;
    let m = g.minimal_model;
    Ok(Some((m.c4().to_integer(), m.c6().to_integer())))
}

/// Attained and missing divisors of `M_S = prod p^f_p` (caps 8 at 2, 5 at 3,
/// 2 elsewhere).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AttainmentReport {
    #[serde(serialize_with = "ser_big_list")]
    pub attained: Vec<BigInt>,
    #[serde(serialize_with = "ser_big_list")]
    pub missing: Vec<BigInt>,
}

fn ser_big_list<S: serde::Serializer>(v: &[BigInt], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|b| b.to_string()))
}

pub fn conductor_cap(p: u64) -> u32 {
    match p {
        2 => 8,
        3 => 5,
        _ => 2,
    }
}

pub fn conductor_attainment_report(records: &[CurveRecord], s: &PrimeSet) -> AttainmentReport {
    let mut divisors = vec![BigInt::one()];
    for p in s.iter() {
        let mut next = Vec::new();
        for d in &divisors {
            let mut pe = BigInt::one();
            for _ in 0..=conductor_cap(p) {
                next.push(d * &pe);
                pe *= p;
            }
        }
        divisors = next;
    }
    divisors.sort();
    let attained_set: BTreeSet<BigInt> = records.iter().map(|r| r.conductor_value()).collect();
    let (attained, missing) = divisors.into_iter().partition(|d| attained_set.contains(d));
    AttainmentReport { attained, missing }
}

/// Counts per bin `[start, start + width)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Histogram {
    pub bin_width: f64,
    pub bins: Vec<(f64, usize)>,
}

impl Histogram {
    pub fn build(values: &[f64], bin_width: f64) -> Histogram {
        let mut counts: BTreeMap<i64, usize> = BTreeMap::new();
        for v in values.iter().filter(|v| v.is_finite()) {
            *counts.entry((v / bin_width).floor() as i64).or_insert(0) += 1;
        }
        let bins = match (counts.keys().next(), counts.keys().last()) {
            (Some(&lo), Some(&hi)) => {
                (lo..=hi).map(|k| (k as f64 * bin_width, counts.get(&k).copied().unwrap_or(0))).collect()
            }
            _ => Vec::new(),
        };
        Histogram { bin_width, bins }
    }

    fn to_csv(&self) -> String {
        let mut out = String::from("bin_start,bin_end,count\n");
        for (start, count) in &self.bins {
            out.push_str(&format!("{:.6},{:.6},{}\n", start, start + self.bin_width, count));
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DatabaseSummary {
    pub primes: Vec<u64>,
    pub curve_count: usize,
    pub j_count: usize,
    /// Curves and j-invariants produced directly by reconstruction, before
    /// twist-orbit closure.
    pub direct_curve_count: usize,
    pub direct_j_count: usize,
    /// Counting identity evaluated on `direct_j_count`; absent when it does
    /// not apply (needs 2, 3 in S).
    #[serde(serialize_with = "ser_opt_big")]
    pub count_identity_expected: Option<BigInt>,
    pub count_identity_holds: Option<bool>,
    pub closure_added: usize,
    /// Published (#M, #j) when S is the set of the first n primes.
    pub reference_counts: Option<(usize, usize)>,
    pub matches_reference: Option<bool>,
    pub exhaustive: bool,
    pub bounds: SearchBounds,
    pub u_window: u32,
    pub trace_prime_bound: u32,
    pub isogeny_clustering: &'static str,
    pub isogeny_cluster_sizes: BTreeMap<usize, usize>,
    pub conductor_attainment: AttainmentReport,
    pub log_conductor_histogram: Histogram,
    pub szpiro_histogram: Histogram,
    pub max_szpiro: f64,
    pub warnings: Vec<String>,
}

const REFERENCE_COUNTS: [(usize, usize); 7] =
    [(0, 0), (24, 5), (752, 83), (7600, 442), (71520, 2140), (592192, 8980), (4576128, 34960)];

/// Known (#M(S), #j(M(S))) for S the set of the first n primes, n <= 6.
pub fn reference_counts(s: &PrimeSet) -> Option<(usize, usize)> {
    let n = s.len();
    let first: Vec<u64> = primes_up_to(20).into_iter().map(u64::from).collect();
    if n < REFERENCE_COUNTS.len() && s.primes() == &first[..n] {
        Some(REFERENCE_COUNTS[n])
    } else {
        None
    }
}

fn ser_opt_big<S: serde::Serializer>(v: &Option<BigInt>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(b) => s.collect_str(b),
        None => s.serialize_none(),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AssemblyConfig {
    pub bounds: SearchBounds,
    pub u_window: u32,
    pub trace_prime_bound: u32,
    pub bin_width: f64,
}

impl Default for AssemblyConfig {
    fn default() -> Self {
        AssemblyConfig {
            bounds: SearchBounds { num_bound: 10_000, denom_exponent_bound: 6 },
            u_window: 2,
            trace_prime_bound: 200,
            bin_width: 0.25,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Database {
    pub records: Vec<CurveRecord>,
    pub summary: DatabaseSummary,
}

/// Runs target enumeration, point search, reconstruction, deduplication and
/// twist-orbit closure, then annotates the records.
pub fn assemble_database(s: &PrimeSet, config: &AssemblyConfig) -> Result<Database> {
    if s.is_empty() {
        return Err(Error::InvalidArgument("S must be nonempty".into()));
    }
    let plan = plan_for(s, config.bounds.denom_exponent_bound);
    let points = search_plan(&plan, &config.bounds);
    let jobs: Vec<(BigInt, SIntegralPoint)> =
        points.iter().flat_map(|(a, ps)| ps.iter().map(move |p| (a.clone(), p.clone()))).collect();
    let produced: Vec<(BigInt, SIntegralPoint, Vec<WeierstrassCurve>)> = jobs
        .into_par_iter()
        .map(|(a, p)| {
            let curves = reconstruct_with_window(&a, &p, &plan.enlarged, config.u_window)?;
            let kept = curves
                .into_iter()
                .map(|c| Ok((has_good_reduction_outside(&c, s)?, c)))
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .filter_map(|(ok, c)| ok.then_some(c))
                .collect();
            Ok((a, p, kept))
        })
        .collect::<Result<_>>()?;

    let mut by_key: BTreeMap<(BigInt, BigInt), (WeierstrassCurve, Provenance)> = BTreeMap::new();
    for (a, p, curves) in produced {
        for c in curves {
            let key = (c.c4().to_integer(), c.c6().to_integer());
            by_key.entry(key).or_insert_with(|| (c, Vec::new())).1.push((a.clone(), p.clone()));
        }
    }
    let direct_curve_count = by_key.len();
    let mut reps: BTreeMap<Q, WeierstrassCurve> = BTreeMap::new();
    for (c, _) in by_key.values() {
        reps.entry(c.j_invariant().clone()).or_insert_with(|| c.clone());
    }
    let direct_j_count = reps.len();

    let closure: Vec<WeierstrassCurve> = reps
        .values()
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|rep| twist_orbit(rep, s))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    let mut closure_added = 0;
    for t in closure {
        if !has_good_reduction_outside(&t, s)? {
            continue;
        }
        let m = global_minimal_model_with_hint(&t, s)?.minimal_model;
        let key = (m.c4().to_integer(), m.c6().to_integer());
        if let std::collections::btree_map::Entry::Vacant(slot) = by_key.entry(key) {
            closure_added += 1;
            slot.insert((m, Vec::new()));
        }
    }

    let mut records: Vec<CurveRecord> = by_key
        .into_values()
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|(c, mut prov)| {
            let mut r = CurveRecord::from_curve_with_hint(&c, None, s)?;
            prov.sort();
            prov.dedup();
            r.provenance = prov;
            Ok(r)
        })
        .collect::<Result<_>>()?;
    annotate(&mut records, config.trace_prime_bound)?;

    let j_count = records.iter().map(|r| &r.j).collect::<BTreeSet<_>>().len();
    let identity_applies = s.contains(2) && s.contains(3) && s.len() >= 2;
    let count_identity_expected =
        if identity_applies { Some(counting_identity(s.len() as u32, direct_j_count as u64)?) } else { None };
    let count_identity_holds = count_identity_expected
        .as_ref()
        .map(|e| *e == BigInt::from(direct_curve_count) && closure_added == 0);
    let reference = reference_counts(s);
    let matches_reference = reference.map(|r| r == (records.len(), j_count));
    let mut warnings = Vec::new();
    if count_identity_holds == Some(false) {
        warnings.push(format!(
            "counting identity fails: expected {} curves from {} j-invariants, reconstruction gave {}",
            count_identity_expected.as_ref().map(|e| e.to_string()).unwrap_or_default(),
            direct_j_count,
            direct_curve_count
        ));
    }
    match (reference, matches_reference) {
        (Some((m, j)), Some(false)) => warnings.push(format!(
            "incomplete: found {} curves and {} j-invariants, known counts are {} and {}",
            records.len(),
            j_count,
            m,
            j
        )),
        (None, _) => warnings.push("no reference counts for this S; completeness is not checked".into()),
        _ => {}
    }

    let summary = DatabaseSummary {
        primes: s.primes().to_vec(),
        curve_count: records.len(),
        j_count,
        direct_curve_count,
        direct_j_count,
        count_identity_expected,
        count_identity_holds,
        closure_added,
        reference_counts: reference,
        matches_reference,
        exhaustive: false,
        bounds: config.bounds.clone(),
        u_window: config.u_window,
        trace_prime_bound: config.trace_prime_bound,
        isogeny_clustering: "heuristic: equal conductor and equal a_p at good primes up to the trace bound",
        isogeny_cluster_sizes: cluster_size_counts(&records),
        conductor_attainment: conductor_attainment_report(&records, s),
        log_conductor_histogram: Histogram::build(
            &records.iter().map(|r| r.log_conductor()).collect::<Vec<_>>(),
            config.bin_width,
        ),
        szpiro_histogram: Histogram::build(&records.iter().map(|r| r.szpiro).collect::<Vec<_>>(), config.bin_width),
        max_szpiro: records.iter().map(|r| r.szpiro).filter(|v| v.is_finite()).fold(0.0, f64::max),
        warnings,
    };
    Ok(Database { records, summary })
}

/// Sorts by `(N, c4, c6)` and assigns twist-orbit and isogeny-cluster ids.
pub fn annotate(records: &mut [CurveRecord], trace_prime_bound: u32) -> Result<()> {
    records.sort_by_key(|r| r.sort_key());
    let mut orbit_ids: BTreeMap<Q, usize> = BTreeMap::new();
    for r in records.iter_mut() {
        let next = orbit_ids.len();
        r.twist_orbit_id = *orbit_ids.entry(r.j.clone()).or_insert(next);
    }
    cluster_isogeny_classes(records, trace_prime_bound)
}

/// Multiset of cluster sizes: size -> number of clusters.
pub fn cluster_size_counts(records: &[CurveRecord]) -> BTreeMap<usize, usize> {
    let mut sizes: BTreeMap<usize, usize> = BTreeMap::new();
    for r in records {
        *sizes.entry(r.isogeny_cluster_id).or_insert(0) += 1;
    }
    let mut out = BTreeMap::new();
    for size in sizes.values() {
        *out.entry(*size).or_insert(0) += 1;
    }
    out
}

fn factored_json(f: &FactoredInteger) -> Value {
    Value::Array(f.pairs().into_iter().map(|(p, e)| json!([p.to_string(), e])).collect())
}

/// One JSON object per record, as written to the database file.
pub fn record_to_json(r: &CurveRecord) -> Value {
    let ainvs: Vec<String> = r.curve.ainvs().iter().map(|a| a.to_string()).collect();
    let mut obj = json!({
        "ainvs": ainvs,
        "conductor": factored_json(&r.conductor),
        "conductor_value": r.conductor_value().to_string(),
        "disc": { "sign": r.min_disc.sign, "factors": factored_json(&r.min_disc) },
        "j": { "num": r.j.numer().to_string(), "den": r.j.denom().to_string() },
        "szpiro": format!("{:.6}", r.szpiro),
        "twist_orbit_id": r.twist_orbit_id,
        "isogeny_cluster_id": r.isogeny_cluster_id,
    });
    if let Some(l) = &r.label {
        obj["label"] = json!(l);
    }
    if !r.provenance.is_empty() {
        obj["provenance"] = Value::Array(
            r.provenance
                .iter()
                .map(|(a, p)| json!({ "a": a.to_string(), "x": p.x.to_string(), "y": p.y.to_string() }))
                .collect(),
        );
    }
    obj
}

pub fn write_database_jsonl<W: Write>(records: &[CurveRecord], mut w: W) -> Result<()> {
    for r in records {
        writeln!(w, "{}", record_to_json(r))?;
    }
    Ok(())
}

type Provenance = Vec<(BigInt, SIntegralPoint)>;

/// Curves read from a file and the malformed lines with their errors.
pub type ParsedCurves = (Vec<LabeledCurve>, Vec<(usize, Error)>);

/// An input curve from a JSON-lines file.
#[derive(Clone, Debug, PartialEq)]
pub struct LabeledCurve {
    pub line: usize,
    pub label: Option<String>,
    pub curve: WeierstrassCurve,
}

/// Parses one input line `{"label": ..., "ainvs": [a1, a2, a3, a4, a6]}`;
/// entries may be JSON integers or integer/fraction strings.
pub fn parse_curve_line(line: &str) -> Result<(Option<String>, WeierstrassCurve)> {
    let v: Value = serde_json::from_str(line).map_err(|e| Error::Parse(e.to_string()))?;
    let label = match v.get("label") {
        None | Some(Value::Null) => None,
        Some(Value::String(s)) => Some(s.clone()),
        Some(other) => Some(other.to_string()),
    };
    let ainvs = v
        .get("ainvs")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Parse("missing \"ainvs\" array".into()))?;
    if ainvs.len() != 5 {
        return Err(Error::Parse(format!("expected 5 a-invariants, found {}", ainvs.len())));
    }
    let mut a: [Q; 5] = Default::default();
    for (slot, item) in a.iter_mut().zip(ainvs) {
        *slot = match item {
            Value::String(s) => parse_rational(s)?,
            Value::Number(n) if n.is_i64() || n.is_u64() => parse_rational(&n.to_string())?,
            other => return Err(Error::Parse(format!("bad a-invariant {other}"))),
        };
    }
    Ok((label, WeierstrassCurve::new(a)?))
}

/// Reads a JSON-lines curve file. In strict mode the first malformed line is
/// an error naming it; otherwise malformed lines are returned separately.
pub fn read_curve_file(path: &Path, strict: bool) -> Result<ParsedCurves> {
    let text = fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let mut curves = Vec::new();
    let mut bad = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let n = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        match parse_curve_line(line) {
            Ok((label, curve)) => curves.push(LabeledCurve { line: n, label, curve }),
            Err(Error::Parse(m)) if strict => return Err(Error::Parse(format!("line {n}: {m}"))),
            Err(e) if strict => return Err(Error::Parse(format!("line {n}: {e}"))),
            Err(e) => bad.push((n, e)),
        }
    }
    Ok((curves, bad))
}

/// Paths written by [`export_statistics`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StatisticsFiles {
    pub table: PathBuf,
    pub log_conductor_histogram: PathBuf,
    pub szpiro_histogram: PathBuf,
}

pub const STATISTICS_HEADER: &str = "log_N,szpiro,N,j";

pub fn statistics_csv(records: &[CurveRecord]) -> Result<String> {
    if records.is_empty() {
        return Err(Error::NoRecords);
    }
    let mut out = String::from(STATISTICS_HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&format!("{:.6},{:.6},{},{}\n", r.log_conductor(), r.szpiro, r.conductor, r.j));
    }
    Ok(out)
}

/// Writes `statistics.csv` plus histogram files into `dir`.
pub fn export_statistics(records: &[CurveRecord], dir: &Path, bin_width: f64) -> Result<StatisticsFiles> {
    let table = statistics_csv(records)?;
    if bin_width.is_nan() || bin_width <= 0.0 {
        return Err(Error::InvalidArgument("bin width must be positive".into()));
    }
    fs::create_dir_all(dir)?;
    let files = StatisticsFiles {
        table: dir.join("statistics.csv"),
        log_conductor_histogram: dir.join("histogram_log_conductor.csv"),
        szpiro_histogram: dir.join("histogram_szpiro.csv"),
    };
    fs::write(&files.table, table)?;
    let logs: Vec<f64> = records.iter().map(|r| r.log_conductor()).collect();
    let sz: Vec<f64> = records.iter().map(|r| r.szpiro).collect();
    fs::write(&files.log_conductor_histogram, Histogram::build(&logs, bin_width).to_csv())?;
    fs::write(&files.szpiro_histogram, Histogram::build(&sz, bin_width).to_csv())?;
    Ok(files)
}
