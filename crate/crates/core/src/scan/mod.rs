//! Batch evaluation over all pairs of knots built from a table.
//!
//! The knot list holds every prime in the table, its mirror unless the table
//! marks it amphicheiral, and optionally every connected sum of those with
//! total crossing number up to a bound. Pairs are unordered and a pair is
//! identified with its mirror pair `(mJ, mK)`; orientations are ignored.

mod emit;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::Arc;
use std::time::Instant;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::knots::{is_unknot_name, KnotExpr, Summand};
use crate::obstruct::{
    candidate_set, report_for, CandidateMatrix, Invariants, KnotInvariants, ObstructError,
    ReportOptions, Status,
};

pub use emit::{emit_report, ReportFormat, CSV_COLUMNS};

pub type PairFilter = Arc<dyn Fn(&KnotExpr, &KnotExpr) -> bool + Send + Sync>;

#[derive(Clone, Default)]
pub struct ScanOptions {
    /// Include connected sums with total crossing number up to this bound.
    pub max_composite_crossings: Option<u32>,
    /// Only use primes with at most this many crossings.
    pub max_crossings: Option<u32>,
    /// Worker threads; 0 lets rayon decide.
    pub jobs: usize,
    pub report: ReportOptions,
    /// Record per-pair wall time in `millis`. Off by default so output is reproducible.
    pub timing: bool,
    pub filter: Option<PairFilter>,
}

#[derive(Debug, Error)]
pub enum ScanError {
    #[error("pair ({j}, {k}): {source}")]
    Pair {
        j: String,
        k: String,
        #[source]
        source: ObstructError,
    },
    #[error("{name}: {source}")]
    Knot {
        name: String,
        #[source]
        source: ObstructError,
    },
    #[error("cannot start worker pool: {0}")]
    Pool(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ScanRow {
    pub pair_key: String,
    pub knot_j: String,
    pub knot_k: String,
    #[serde(with = "crate::serde_bigint")]
    pub det_j: BigInt,
    #[serde(with = "crate::serde_bigint")]
    pub det_k: BigInt,
    pub coprime: bool,
    pub bound_sigma: u32,
    pub bound_s: Option<u32>,
    pub bound_tau: Option<u32>,
    pub bound_fp: u32,
    pub d1_status: Status,
    pub d2_status: Status,
    pub lower: u32,
    pub upper: Option<u32>,
    pub exact: bool,
    pub millis: Option<u64>,
    /// Both knots are prime.
    pub prime_pair: bool,
    /// Both knots are known to be 2-bridge.
    pub both_two_bridge: bool,
}

impl ScanRow {
    pub fn classical_best(&self) -> u32 {
        [Some(self.bound_sigma), self.bound_s, self.bound_tau, Some(self.bound_fp)]
            .into_iter()
            .flatten()
            .max()
            .unwrap_or(0)
    }

    pub fn capped(&self) -> bool {
        self.d1_status == Status::Cap || self.d2_status == Status::Cap
    }

    /// d1 proves `d ≥ 2` while every classical bound is at most 1 and the
    /// pair is not two 2-bridge knots.
    pub fn d1_beats(&self) -> bool {
        self.d1_status == Status::Violated && self.classical_best() <= 1 && !self.both_two_bridge
    }

    pub fn d1_exact(&self) -> bool {
        self.d1_beats() && self.upper.is_some_and(|u| u <= 2)
    }

    /// d2 proves `d ≥ 3` while every classical bound is below 3.
    pub fn d2_beats(&self) -> bool {
        self.d2_status == Status::Violated && self.classical_best() < 3
    }

    pub fn d2_exact(&self) -> bool {
        self.d2_beats() && self.upper.is_some_and(|u| u <= 3)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct BeatCounts {
    pub beats: usize,
    pub exact: usize,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct ScanSummary {
    pub pairs: usize,
    pub prime_pairs: usize,
    pub coprime_pairs: usize,
    pub capped: usize,
    pub exact: usize,
    pub d1_all: BeatCounts,
    pub d1_prime: BeatCounts,
    pub d2_all: BeatCounts,
    pub d2_prime: BeatCounts,
}

impl ScanSummary {
    pub fn from_rows(rows: &[ScanRow]) -> Self {
        let mut s = ScanSummary::default();
        for r in rows {
            s.pairs += 1;
            s.prime_pairs += r.prime_pair as usize;
            s.coprime_pairs += r.coprime as usize;
            s.capped += r.capped() as usize;
            s.exact += r.exact as usize;
            let tally = |c: &mut BeatCounts, beats: bool, exact: bool| {
                c.beats += beats as usize;
                c.exact += exact as usize;
            };
            tally(&mut s.d1_all, r.d1_beats(), r.d1_exact());
            tally(&mut s.d2_all, r.d2_beats(), r.d2_exact());
            if r.prime_pair {
                tally(&mut s.d1_prime, r.d1_beats(), r.d1_exact());
                tally(&mut s.d2_prime, r.d2_beats(), r.d2_exact());
            }
        }
        s
    }
}

#[derive(Debug, Clone)]
pub struct ScanResult {
    pub rows: Vec<ScanRow>,
    pub summary: ScanSummary,
}

/// Knots taking part in a scan, in canonical form, sorted and deduplicated.
pub fn scan_knots(inv: &Invariants<'_>, opts: &ScanOptions) -> Vec<KnotExpr> {
    let table = inv.table();
    let amph = |n: &str| table.is_amphicheiral(n);
    let mut primes: Vec<(Summand, u32)> = Vec::new();
    for r in table.records() {
        if is_unknot_name(&r.name) {
            continue;
        }
        let crossings = r.crossing_number;
        if let (Some(max), Some(c)) = (opts.max_crossings, crossings) {
            if c > max {
                continue;
            }
        }
        let c = crossings.unwrap_or(u32::MAX);
        primes.push((Summand::new(&r.name), c));
        if !amph(&r.name) {
            let mut m = Summand::new(&r.name);
            m.mirrored = true;
            primes.push((m, c));
        }
    }
    primes.sort();

    let mut out: BTreeSet<KnotExpr> = primes
        .iter()
        .map(|(s, _)| {
            KnotExpr::from_summands(vec![s.clone()])
                .expect("nonempty")
                .canonical(amph)
        })
        .collect();

    if let Some(bound) = opts.max_composite_crossings {
        // multisets of at least two summands, indices non-decreasing
        let mut stack: Vec<(Vec<usize>, u32)> = (0..primes.len())
            .filter(|&i| primes[i].1 <= bound)
            .map(|i| (vec![i], primes[i].1))
            .collect();
        while let Some((idx, total)) = stack.pop() {
            if idx.len() >= 2 {
                let summands = idx.iter().map(|&i| primes[i].0.clone()).collect();
                let e = KnotExpr::from_summands(summands).expect("nonempty");
                out.insert(e.canonical(amph));
            }
            let last = *idx.last().unwrap();
            for j in last..primes.len() {
                let t = total.saturating_add(primes[j].1);
                if t <= bound {
                    let mut next = idx.clone();
                    next.push(j);
                    stack.push((next, t));
                }
            }
        }
    }
    out.into_iter().collect()
}

fn pair_key(j: &KnotExpr, k: &KnotExpr) -> String {
    format!("{j}|{k}")
}

/// Pairs of distinct knot indices up to swapping and simultaneous mirroring,
/// each as its representative with the smallest key.
fn pair_representatives(knots: &[KnotExpr], amph: impl Fn(&str) -> bool) -> Vec<(String, usize, usize)> {
    let index: HashMap<&KnotExpr, usize> = knots.iter().enumerate().map(|(i, k)| (k, i)).collect();
    let mirror: Vec<usize> = knots
        .iter()
        .map(|k| index[&k.mirror().canonical(&amph)])
        .collect();
    let mut reps: BTreeMap<String, (usize, usize)> = BTreeMap::new();
    for a in 0..knots.len() {
        for b in a + 1..knots.len() {
            let (ma, mb) = (mirror[a], mirror[b]);
            let best = [(a, b), (b, a), (ma, mb), (mb, ma)]
                .into_iter()
                .map(|(x, y)| (pair_key(&knots[x], &knots[y]), x, y))
                .min()
                .unwrap();
            reps.entry(best.0).or_insert((best.1, best.2));
        }
    }
    reps.into_iter().map(|(k, (a, b))| (k, a, b)).collect()
}

fn row_from(
    key: String,
    j: &KnotInvariants,
    k: &KnotInvariants,
    opts: &ScanOptions,
    candidates: &HashMap<i64, Vec<CandidateMatrix>>,
) -> Result<ScanRow, ScanError> {
    let start = opts.timing.then(Instant::now);
    let lookup = |d: i64| match candidates.get(&d) {
        Some(c) => Ok(c.clone()),
        None => candidate_set(d),
    };
    let r = report_for(j, k, &opts.report, lookup).map_err(|source| ScanError::Pair {
        j: j.expr.to_string(),
        k: k.expr.to_string(),
        source,
    })?;
    Ok(ScanRow {
        pair_key: key,
        knot_j: r.knot_j,
        knot_k: r.knot_k,
        det_j: r.det_j,
        det_k: r.det_k,
        coprime: r.coprime,
        bound_sigma: r.classical.sigma,
        bound_s: r.classical.s,
        bound_tau: r.classical.tau,
        bound_fp: r.classical.fp,
        d1_status: r.d1.status,
        d2_status: r.d2.status,
        lower: r.lower,
        upper: r.upper,
        exact: r.exact,
        millis: start.map(|s| s.elapsed().as_millis() as u64),
        prime_pair: j.is_prime() && k.is_prime(),
        both_two_bridge: j.two_bridge == Some(true) && k.two_bridge == Some(true),
    })
}

/// Evaluates every pair. Row order is by pair key and does not depend on `jobs`.
pub fn scan_pairs(inv: &Invariants<'_>, opts: &ScanOptions) -> Result<ScanResult, ScanError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.jobs)
        .build()
        .map_err(|e| ScanError::Pool(e.to_string()))?;
    pool.install(|| scan_in_pool(inv, opts))
}

fn scan_in_pool(inv: &Invariants<'_>, opts: &ScanOptions) -> Result<ScanResult, ScanError> {
    let table = inv.table();
    let knots = scan_knots(inv, opts);
    let invariants: Vec<KnotInvariants> = knots
        .par_iter()
        .map(|k| {
            inv.of(k).map_err(|source| ScanError::Knot {
                name: k.to_string(),
                source,
            })
        })
        .collect::<Result<_, _>>()?;

    let mut pairs = pair_representatives(&knots, |n| table.is_amphicheiral(n));
    if let Some(f) = &opts.filter {
        pairs.retain(|(_, a, b)| f(&knots[*a], &knots[*b]));
    }

    let dets: BTreeSet<i64> = pairs
        .iter()
        .filter_map(|&(_, a, b)| {
            let (x, y) = (&invariants[a].det, &invariants[b].det);
            x.gcd(y).is_one().then(|| (x * y).to_i64()).flatten()
        })
        .collect();
    let candidates: HashMap<i64, Vec<CandidateMatrix>> = dets
        .into_par_iter()
        .filter_map(|d| candidate_set(d).ok().map(|c| (d, c)))
        .collect();

    let rows: Vec<ScanRow> = pairs
        .into_par_iter()
        .map(|(key, a, b)| row_from(key, &invariants[a], &invariants[b], opts, &candidates))
        .collect::<Result<_, _>>()?;
    let summary = ScanSummary::from_rows(&rows);
    Ok(ScanResult { rows, summary })
}
