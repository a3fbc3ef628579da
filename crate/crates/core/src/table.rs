//! Pairwise tallies and head-to-head results.

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

use crate::election::{Candidate, Election, Preference, Voters};
use crate::error::{Error, Result};

/// Result of a head-to-head contest from the row candidate's point of view.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[repr(u8)]
pub enum Outcome {
    Loss = 0,
    Tie = 1,
    Win = 2,
}

impl Outcome {
    pub fn reverse(self) -> Outcome {
        match self {
            Outcome::Loss => Outcome::Win,
            Outcome::Tie => Outcome::Tie,
            Outcome::Win => Outcome::Loss,
        }
    }

    pub(crate) fn from_u8(v: u8) -> Outcome {
        match v {
            0 => Outcome::Loss,
            1 => Outcome::Tie,
            _ => Outcome::Win,
        }
    }
}

/// Result of the unordered contest `{a, b}` when queried as `(a, b)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PairResult {
    WinA,
    WinB,
    Tie,
}

impl From<Outcome> for PairResult {
    fn from(o: Outcome) -> Self {
        match o {
            Outcome::Win => PairResult::WinA,
            Outcome::Loss => PairResult::WinB,
            Outcome::Tie => PairResult::Tie,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tallies {
    Small(Vec<u64>),
    Big(Vec<BigUint>),
    /// Every enforced contest is `d + 1` to `d - 1`, everything else `d` to `d`.
    Realized(u64),
}

/// Full pairwise tallies and results of an election.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OutcomeTable {
    candidates: Vec<Candidate>,
    total: BigUint,
    tallies: Tallies,
    results: Vec<u8>,
}

impl OutcomeTable {
    /// A table carrying only results, as if realized with one canceling
    /// ballot pair per decisive contest.
    pub fn from_results(candidates: Vec<Candidate>, result: impl Fn(usize, usize) -> Outcome) -> Self {
        let n = candidates.len();
        let mut results = vec![Outcome::Tie as u8; n * n];
        let mut decisive = 0u64;
        for a in 0..n {
            for b in a + 1..n {
                let o = result(a, b);
                results[a * n + b] = o as u8;
                results[b * n + a] = o.reverse() as u8;
                if o != Outcome::Tie {
                    decisive += 1;
                }
            }
        }
        OutcomeTable {
            candidates,
            total: BigUint::from(2 * decisive),
            tallies: Tallies::Realized(decisive),
            results,
        }
    }

    /// A table from explicit tallies `N(a, b)` (row-major, diagonal ignored).
    pub(crate) fn from_tallies(candidates: Vec<Candidate>, total: u64, tallies: Vec<u64>) -> Self {
        let n = candidates.len();
        let mut results = vec![Outcome::Tie as u8; n * n];
        for a in 0..n {
            for b in 0..n {
                if a != b {
                    let twice = 2 * tallies[a * n + b] as u128;
                    results[a * n + b] = match twice.cmp(&(total as u128)) {
                        std::cmp::Ordering::Greater => Outcome::Win,
                        std::cmp::Ordering::Equal => Outcome::Tie,
                        std::cmp::Ordering::Less => Outcome::Loss,
                    } as u8;
                }
            }
        }
        OutcomeTable {
            candidates,
            total: BigUint::from(total),
            tallies: Tallies::Small(tallies),
            results,
        }
    }

    pub fn candidates(&self) -> &[Candidate] {
        &self.candidates
    }

    pub fn len(&self) -> usize {
        self.candidates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.candidates.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.candidates.iter().position(|c| c.as_str() == name)
    }

    /// Total ballot multiplicity.
    pub fn total(&self) -> &BigUint {
        &self.total
    }

    /// Voters preferring `a` to `b`.
    pub fn tally(&self, a: usize, b: usize) -> BigUint {
        let n = self.len();
        match &self.tallies {
            Tallies::Small(v) => BigUint::from(v[a * n + b]),
            Tallies::Big(v) => v[a * n + b].clone(),
            Tallies::Realized(d) => match self.outcome(a, b) {
                Outcome::Win => BigUint::from(d + 1),
                Outcome::Tie => BigUint::from(*d),
                Outcome::Loss => BigUint::from(d - 1),
            },
        }
    }

    pub fn outcome(&self, a: usize, b: usize) -> Outcome {
        Outcome::from_u8(self.results[a * self.len() + b])
    }

    pub fn result(&self, a: usize, b: usize) -> PairResult {
        self.outcome(a, b).into()
    }

    pub fn beats(&self, a: usize, b: usize) -> bool {
        self.outcome(a, b) == Outcome::Win
    }

    pub(crate) fn raw_results(&self) -> &[u8] {
        &self.results
    }

    /// The table of the subelection over `keep`, re-indexed by position.
    pub fn restrict(&self, keep: &[usize]) -> OutcomeTable {
        let n = self.len();
        let m = keep.len();
        let mut results = vec![Outcome::Tie as u8; m * m];
        for (i, &a) in keep.iter().enumerate() {
            for (j, &b) in keep.iter().enumerate() {
                results[i * m + j] = self.results[a * n + b];
            }
        }
        let pick = |f: &dyn Fn(usize, usize) -> usize| {
            let mut idx = Vec::with_capacity(m * m);
            for &a in keep {
                for &b in keep {
                    idx.push(f(a, b));
                }
            }
            idx
        };
        let tallies = match &self.tallies {
            Tallies::Small(v) => Tallies::Small(pick(&|a, b| a * n + b).into_iter().map(|i| v[i]).collect()),
            Tallies::Big(v) => Tallies::Big(pick(&|a, b| a * n + b).into_iter().map(|i| v[i].clone()).collect()),
            Tallies::Realized(d) => Tallies::Realized(*d),
        };
        OutcomeTable {
            candidates: keep.iter().map(|&i| self.candidates[i].clone()).collect(),
            total: self.total.clone(),
            tallies,
            results,
        }
    }
}

/// Voters preferring `a` to `b`.
pub fn pairwise_tally(election: &Election, a: &str, b: &str) -> Result<BigUint> {
    let ia = election.index_of(a)?;
    let ib = election.index_of(b)?;
    if ia == ib {
        return Err(Error::SameCandidate);
    }
    Ok(election
        .ballots()
        .filter(|bl| bl.prefers(ia, ib))
        .map(|bl| bl.multiplicity.clone())
        .sum())
}

fn majority(n: usize, total: &BigUint, upper: impl Fn(usize, usize) -> BigUint) -> Vec<u8> {
    let mut results = vec![Outcome::Tie as u8; n * n];
    for a in 0..n {
        for b in a + 1..n {
            let twice = upper(a, b) << 1u32;
            let o = match twice.cmp(total) {
                std::cmp::Ordering::Greater => Outcome::Win,
                std::cmp::Ordering::Equal => Outcome::Tie,
                std::cmp::Ordering::Less => Outcome::Loss,
            };
            results[a * n + b] = o as u8;
            results[b * n + a] = o.reverse() as u8;
        }
    }
    results
}

/// Accumulates `N(a, b)` for `a < b` into the upper triangle of `acc`.
///
/// Orders go through a position array so the inner loop is a branch-free
/// comparison over a contiguous row.
macro_rules! accumulate {
    ($ty:ty, $election:expr, $n:expr, $acc:expr) => {{
        let n = $n;
        let acc: &mut Vec<$ty> = $acc;
        let mut pos: Vec<u32> = vec![0; n];
        for ballot in $election.ballots() {
            let m = ballot.multiplicity.to_u64().expect("checked by caller") as $ty;
            match &ballot.preference {
                Preference::Order(o) => {
                    for (i, &c) in o.iter().enumerate() {
                        pos[c] = i as u32;
                    }
                    for a in 0..n {
                        let pa = pos[a];
                        let row = &mut acc[a * n + a + 1..a * n + n];
                        // Wrapping ops keep the loop vectorized under overflow
                        // checks; the caller bounds the total.
                        for (slot, &pb) in row.iter_mut().zip(&pos[a + 1..]) {
                            *slot = slot.wrapping_add(m & (0 as $ty).wrapping_sub((pa < pb) as $ty));
                        }
                    }
                }
                Preference::Table(t) => {
                    for a in 0..n {
                        for b in a + 1..n {
                            if t.prefers(a, b) {
                                acc[a * n + b] += m;
                            }
                        }
                    }
                }
            }
        }
    }};
}

/// Computes all pairwise tallies and results.
pub fn outcome_table(election: &Election) -> OutcomeTable {
    let n = election.len();
    let candidates = election.candidates().to_vec();
    if let Voters::Realized(r) = &election.voters {
        let mut results = vec![Outcome::Tie as u8; n * n];
        for &(a, b) in &r.edges {
            results[a * n + b] = Outcome::Win as u8;
            results[b * n + a] = Outcome::Loss as u8;
        }
        let d = r.edges.len() as u64;
        return OutcomeTable {
            candidates,
            total: BigUint::from(2 * d),
            tallies: Tallies::Realized(d),
            results,
        };
    }
    let total = election.total_multiplicity();
    if let Some(t) = total.to_u64() {
        let mut acc = vec![0u64; n * n];
        if t <= u32::MAX as u64 {
            let mut small = vec![0u32; n * n];
            accumulate!(u32, election, n, &mut small);
            for (d, s) in acc.iter_mut().zip(small) {
                *d = s as u64;
            }
        } else {
            accumulate!(u64, election, n, &mut acc);
        }
        for a in 0..n {
            for b in a + 1..n {
                acc[b * n + a] = t - acc[a * n + b];
            }
        }
        let results = majority(n, &total, |a, b| BigUint::from(acc[a * n + b]));
        return OutcomeTable {
            candidates,
            total,
            tallies: Tallies::Small(acc),
            results,
        };
    }
    let mut acc = vec![BigUint::zero(); n * n];
    for ballot in election.ballots() {
        for a in 0..n {
            for b in a + 1..n {
                if ballot.prefers(a, b) {
                    acc[a * n + b] += &ballot.multiplicity;
                }
            }
        }
    }
    for a in 0..n {
        for b in a + 1..n {
            acc[b * n + a] = &total - &acc[a * n + b];
        }
    }
    let results = majority(n, &total, |a, b| acc[a * n + b].clone());
    OutcomeTable {
        candidates,
        total,
        tallies: Tallies::Big(acc),
        results,
    }
}
