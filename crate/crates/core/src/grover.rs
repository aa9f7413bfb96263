//! Idealized quantum-search execution model with oracle-query accounting.
//!
//! No amplitudes are simulated here. A Grover invocation over a domain of
//! `m` items with `k >= 1` marked items is modelled as succeeding with
//! probability one and returning a uniformly random marked item, at a cost
//! of `ceil(pi/4 * sqrt(m/k))` oracle calls. With `k = 0` the run costs
//! `ceil(pi/4 * sqrt(m))` and measures an unmarked index, which the caller's
//! validity check rejects. The amplitude-level justification for this model
//! lives in [`crate::qcircuit`].

use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_4;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Dataset, NhSearch, Params, SearchSpace, SqDist, Thresholds};

/// Oracle calls charged for one Grover run over `m` items, `k` of them marked.
pub fn grover_iterations(m: usize, k: usize) -> u64 {
    let ratio = m as f64 / k.max(1) as f64;
    (FRAC_PI_4 * ratio.sqrt()).ceil() as u64
}

/// Counters for one pipeline phase.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhaseCounts {
    pub oracle_calls: u64,
    pub diffusion_calls: u64,
    /// What an `O(m)` linear scan over the same domains would have cost.
    pub classical_equivalent_calls: u64,
    pub invocations: u64,
}

impl PhaseCounts {
    fn add(&mut self, other: &PhaseCounts) {
        self.oracle_calls += other.oracle_calls;
        self.diffusion_calls += other.diffusion_calls;
        self.classical_equivalent_calls += other.classical_equivalent_calls;
        self.invocations += other.invocations;
    }
}

/// Per-phase query ledger. Totals are always the sum over phases.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct QueryLedger {
    phases: BTreeMap<String, PhaseCounts>,
}

impl QueryLedger {
    pub fn new() -> Self {
        Self::default()
    }

    /// Records one Grover run of `iterations` oracle+diffusion rounds over a
    /// domain of `m` items.
    pub fn charge_grover(&mut self, phase: &str, iterations: u64, m: usize) {
        let c = self.phases.entry(phase.to_owned()).or_default();
        c.oracle_calls += iterations;
        c.diffusion_calls += iterations;
        c.classical_equivalent_calls += m as u64;
        c.invocations += 1;
    }

    /// Records a classical linear scan of `m` predicate evaluations.
    pub fn charge_classical(&mut self, phase: &str, m: usize) {
        let c = self.phases.entry(phase.to_owned()).or_default();
        c.classical_equivalent_calls += m as u64;
        c.invocations += 1;
    }

    pub fn phase(&self, name: &str) -> PhaseCounts {
        self.phases.get(name).copied().unwrap_or_default()
    }

    pub fn phases(&self) -> impl Iterator<Item = (&str, &PhaseCounts)> {
        self.phases.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn totals(&self) -> PhaseCounts {
        let mut t = PhaseCounts::default();
        for c in self.phases.values() {
            t.add(c);
        }
        t
    }

    pub fn merge(&mut self, other: &QueryLedger) {
        for (k, v) in &other.phases {
            self.phases.entry(k.clone()).or_default().add(v);
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("ledger is always serializable")
    }
}

/// Result of a single Grover invocation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GroverOutcome {
    pub found: Option<usize>,
    pub queries_charged: u64,
    pub marked_count_at_call: usize,
}

/// Linear scan with classical accounting, the `O(m)` baseline.
pub fn linear_scan(
    domain: &[usize],
    predicate: impl Fn(usize) -> bool,
    ledger: &mut QueryLedger,
    phase: &str,
) -> Vec<usize> {
    ledger.charge_classical(phase, domain.len());
    domain.iter().copied().filter(|&i| predicate(i)).collect()
}

/// Idealized Grover executor: a seeded measurement RNG plus a ledger.
#[derive(Debug, Clone)]
pub struct GroverModel {
    rng: ChaCha8Rng,
    ledger: QueryLedger,
    phase: String,
}

impl GroverModel {
    pub fn new(seed: u64) -> Self {
        Self::with_stream(seed, 0)
    }

    /// Independent measurement stream, e.g. one per point, so results do
    /// not depend on scheduling.
    pub fn with_stream(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Self {
            rng,
            ledger: QueryLedger::new(),
            phase: "default".to_owned(),
        }
    }

    pub fn set_phase(&mut self, phase: &str) {
        self.phase = phase.to_owned();
    }

    pub fn ledger(&self) -> &QueryLedger {
        &self.ledger
    }

    pub fn into_ledger(self) -> QueryLedger {
        self.ledger
    }

    /// Charges one run over `m` items and picks the measured position in
    /// `marked`, if any.
    fn measure(&mut self, m: usize, marked_count: usize) -> (Option<usize>, u64) {
        let iters = grover_iterations(m, marked_count);
        self.ledger.charge_grover(&self.phase, iters, m);
        let pick = (marked_count > 0).then(|| self.rng.random_range(0..marked_count));
        (pick, iters)
    }

    /// One Grover run over `domain`.
    pub fn find_one(
        &mut self,
        domain: &[usize],
        predicate: impl Fn(usize) -> bool,
    ) -> Result<GroverOutcome> {
        if domain.is_empty() {
            return Err(Error::EmptyDomain);
        }
        let marked: Vec<usize> = domain.iter().copied().filter(|&i| predicate(i)).collect();
        let (pick, iters) = self.measure(domain.len(), marked.len());
        Ok(GroverOutcome {
            found: pick.map(|p| marked[p]),
            queries_charged: iters,
            marked_count_at_call: marked.len(),
        })
    }

    /// Repeats [`find_one`](Self::find_one), removing every found item from
    /// the domain, until a run comes back empty or the domain is exhausted.
    /// Items are returned in the order they were measured.
    ///
    /// The predicate is pure, so it is evaluated once per item up front; the
    /// sequence of charges is the same as re-running the oracle each time.
    pub fn find_all(
        &mut self,
        domain: &[usize],
        predicate: impl Fn(usize) -> bool,
    ) -> Result<Vec<usize>> {
        if domain.is_empty() {
            return Err(Error::EmptyDomain);
        }
        let mut marked: Vec<usize> = domain.iter().copied().filter(|&i| predicate(i)).collect();
        let mut m = domain.len();
        let mut found = Vec::with_capacity(marked.len());
        while m > 0 {
            match self.measure(m, marked.len()).0 {
                Some(pos) => {
                    found.push(marked.swap_remove(pos));
                    m -= 1;
                }
                None => break,
            }
        }
        Ok(found)
    }

    /// Grover-enhanced binary search for the nearest higher of `j` within
    /// `space`.
    ///
    /// Returns the same point as the classical scan, including the
    /// lower-index tie-break.
    pub fn gebs_nearest_higher(
        &mut self,
        ds: &Dataset,
        space: &SearchSpace,
        j: usize,
        params: &Params,
    ) -> Result<Option<(usize, SqDist)>> {
        let thr = params.thresholds()?;
        ds.point(j)?;
        Ok(self.gebs(ds, space.points(), j, &thr, params.nh_search))
    }

    pub(crate) fn gebs(
        &mut self,
        ds: &Dataset,
        domain: &[usize],
        j: usize,
        thr: &Thresholds,
        mode: NhSearch,
    ) -> Option<(usize, SqDist)> {
        if domain.is_empty() {
            return None;
        }
        let pts = ds.points();
        let rho_j = pts[j].density;
        let cap = match mode {
            NhSearch::Capped => Some(thr.d_m_sq),
            NhSearch::Global => None,
        };
        // Items that can ever satisfy the oracle: higher density and within
        // the consideration radius. Window tests below only narrow this set.
        let mut higher: Vec<(SqDist, usize)> = domain
            .iter()
            .filter(|&&i| pts[i].density > rho_j)
            .map(|&i| (ds.sq_dist(i, j), i))
            .filter(|(sq, _)| cap.is_none_or(|c| *sq <= c))
            .collect();

        #[derive(Clone, Copy, PartialEq)]
        enum Last {
            Start,
            Found,
            BranchB,
        }

        let mut m = domain.len();
        let mut best: Option<(SqDist, usize)> = None;
        let mut lower: i64 = 0;
        let mut mid: i64 = 0;
        // `None` upper bound: the initial full interval (cap already applied).
        let mut upper = Upper::Open;
        let mut last = Last::Start;

        loop {
            let lower_sq = SqDist::of_length(lower);
            let collapsed = matches!(upper, Upper::Below(t) if t <= lower);
            let hit = if collapsed {
                // interval narrower than one precision step: nothing to search
                None
            } else {
                let marked: Vec<usize> = higher
                    .iter()
                    .enumerate()
                    .filter(|(_, &(sq, i))| sq >= lower_sq && upper.admits(sq, i))
                    .map(|(pos, _)| pos)
                    .collect();
                self.measure(m, marked.len()).0.map(|p| marked[p])
            };

            match hit {
                Some(pos) => {
                    let (sq, i) = higher.swap_remove(pos);
                    m -= 1;
                    best = Some((sq, i));
                    mid = lower + (isqrt(sq.0) - lower) / 2;
                    upper = Upper::Below(mid);
                    last = Last::Found;
                }
                None => match last {
                    Last::Found => {
                        let (bsq, bi) = best.expect("a candidate exists after a hit");
                        lower = mid;
                        upper = Upper::BeforeKey(bsq, bi);
                        last = Last::BranchB;
                    }
                    Last::Start | Last::BranchB => break,
                },
            }
            if m == 0 {
                break;
            }
        }
        best.map(|(sq, i)| (i, sq))
    }
}

/// Upper edge of the current GEBS window.
#[derive(Debug, Clone, Copy)]
enum Upper {
    Open,
    /// `d < t` for a fixed-point threshold `t`.
    Below(i64),
    /// Lexicographically before the current candidate `(d^2, index)`.
    BeforeKey(SqDist, usize),
}

impl Upper {
    fn admits(&self, sq: SqDist, i: usize) -> bool {
        match *self {
            Upper::Open => true,
            Upper::Below(t) => sq < SqDist::of_length(t),
            Upper::BeforeKey(bsq, bi) => (sq, i) < (bsq, bi),
        }
    }
}

/// Floor square root.
pub(crate) fn isqrt(v: i128) -> i64 {
    let mut r = (v as f64).sqrt() as i128;
    while r * r > v {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= v {
        r += 1;
    }
    r as i64
}
