//! Candidates, ballots and elections.

use std::borrow::Cow;
use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// A candidate identifier: a nonempty token over `[A-Za-z0-9_]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Candidate(String);

impl Candidate {
    pub fn new(name: impl Into<String>) -> Result<Self> {
        let name = name.into();
        if name.is_empty() || !name.bytes().all(|b| b.is_ascii_alphanumeric() || b == b'_') {
            return Err(Error::InvalidCandidate(name));
        }
        Ok(Candidate(name))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Candidate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl AsRef<str> for Candidate {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

/// Index of the unordered pair `{a, b}` (`a < b`) among the `n (n-1) / 2` pairs.
pub(crate) fn pair_index(n: usize, a: usize, b: usize) -> usize {
    debug_assert!(a < b && b < n);
    a * (2 * n - a - 1) / 2 + (b - a - 1)
}

/// An irrational voter's preference table: one entry per unordered pair.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PairTable {
    n: usize,
    bits: Vec<u64>,
}

impl PairTable {
    /// Builds the table from `prefers(a, b)`, queried once per pair with `a < b`.
    pub fn from_fn(n: usize, mut prefers: impl FnMut(usize, usize) -> bool) -> Self {
        let pairs = n * n.saturating_sub(1) / 2;
        let mut bits = vec![0u64; pairs.div_ceil(64)];
        for a in 0..n {
            for b in a + 1..n {
                if prefers(a, b) {
                    let i = pair_index(n, a, b);
                    bits[i / 64] |= 1 << (i % 64);
                }
            }
        }
        PairTable { n, bits }
    }

    /// The table induced by a linear order.
    pub fn from_order(order: &[usize]) -> Self {
        let mut pos = vec![0usize; order.len()];
        for (i, &c) in order.iter().enumerate() {
            pos[c] = i;
        }
        PairTable::from_fn(order.len(), |a, b| pos[a] < pos[b])
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn prefers(&self, a: usize, b: usize) -> bool {
        debug_assert!(a != b);
        if a < b {
            self.bit(pair_index(self.n, a, b))
        } else {
            !self.bit(pair_index(self.n, b, a))
        }
    }

    fn bit(&self, i: usize) -> bool {
        self.bits[i / 64] >> (i % 64) & 1 == 1
    }

    /// Makes `a` preferred to `b`.
    pub fn set(&mut self, a: usize, b: usize) {
        if !self.prefers(a, b) {
            self.flip(a, b);
        }
    }

    /// Toggles the entry for `{a, b}`.
    pub fn flip(&mut self, a: usize, b: usize) {
        let i = pair_index(self.n, a.min(b), a.max(b));
        self.bits[i / 64] ^= 1 << (i % 64);
    }

    /// Every table over `n` candidates, in bit order.
    pub fn all(n: usize) -> impl Iterator<Item = PairTable> {
        let pairs = n * n.saturating_sub(1) / 2;
        assert!(pairs < 64, "too many pairs to enumerate");
        (0u64..1 << pairs).map(move |code| PairTable {
            n,
            bits: if pairs == 0 { vec![] } else { vec![code] },
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BallotKind {
    LinearOrder,
    PreferenceTable,
}

/// How a single voter ranks the candidates.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Preference {
    /// Candidate indices, most preferred first.
    Order(Vec<usize>),
    Table(PairTable),
}

impl Preference {
    pub fn kind(&self) -> BallotKind {
        match self {
            Preference::Order(_) => BallotKind::LinearOrder,
            Preference::Table(_) => BallotKind::PreferenceTable,
        }
    }

    /// Whether `a` is preferred to `b`. For orders this is a linear scan;
    /// bulk tallying goes through [`crate::table`].
    pub fn prefers(&self, a: usize, b: usize) -> bool {
        match self {
            Preference::Order(o) => {
                for &c in o {
                    if c == a {
                        return true;
                    }
                    if c == b {
                        return false;
                    }
                }
                unreachable!("candidates missing from order")
            }
            Preference::Table(t) => t.prefers(a, b),
        }
    }

    /// The same preference over the candidates in `keep`, re-indexed by
    /// position within `keep`.
    pub fn restrict(&self, keep: &[usize], n: usize) -> Preference {
        let mut map = vec![usize::MAX; n];
        for (i, &c) in keep.iter().enumerate() {
            map[c] = i;
        }
        match self {
            Preference::Order(o) => Preference::Order(
                o.iter().filter(|&&c| map[c] != usize::MAX).map(|&c| map[c]).collect(),
            ),
            Preference::Table(t) => {
                Preference::Table(PairTable::from_fn(keep.len(), |a, b| t.prefers(keep[a], keep[b])))
            }
        }
    }

    fn validate(&self, n: usize) -> Result<()> {
        match self {
            Preference::Order(o) => {
                if o.len() != n {
                    return Err(Error::InvalidBallot(format!(
                        "order ranks {} of {n} candidates",
                        o.len()
                    )));
                }
                let mut seen = vec![false; n];
                for &c in o {
                    if c >= n || seen[c] {
                        return Err(Error::InvalidBallot("order is not a permutation".into()));
                    }
                    seen[c] = true;
                }
                Ok(())
            }
            Preference::Table(t) if t.len() != n => Err(Error::InvalidBallot(format!(
                "table covers {} of {n} candidates",
                t.len()
            ))),
            Preference::Table(_) => Ok(()),
        }
    }
}

/// A preference together with the number of voters casting it.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Ballot {
    pub preference: Preference,
    pub multiplicity: BigUint,
}

impl Ballot {
    pub fn order(order: Vec<usize>, multiplicity: impl Into<BigUint>) -> Self {
        Ballot {
            preference: Preference::Order(order),
            multiplicity: multiplicity.into(),
        }
    }

    pub fn table(table: PairTable, multiplicity: impl Into<BigUint>) -> Self {
        Ballot {
            preference: Preference::Table(table),
            multiplicity: multiplicity.into(),
        }
    }

    pub fn kind(&self) -> BallotKind {
        self.preference.kind()
    }

    pub fn prefers(&self, a: usize, b: usize) -> bool {
        self.preference.prefers(a, b)
    }

    pub fn with_multiplicity(&self, multiplicity: impl Into<BigUint>) -> Self {
        Ballot {
            preference: self.preference.clone(),
            multiplicity: multiplicity.into(),
        }
    }

    pub(crate) fn validate(&self, n: usize) -> Result<()> {
        if self.multiplicity.is_zero() {
            return Err(Error::InvalidBallot("multiplicity must be positive".into()));
        }
        self.preference.validate(n)
    }
}

/// Voters of an election that was realized from a head-to-head pattern.
///
/// Each decisive pair `(a, b)` stands for two ballots:
/// `a > b > rest` and `reverse(rest) > a > b`, where `rest` lists the other
/// candidates in index order. The ballots are generated on demand, since
/// the generated elections can have hundreds of thousands of them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Realization {
    /// `(winner, loser)` for every enforced contest.
    pub(crate) edges: Vec<(usize, usize)>,
}

impl Realization {
    pub(crate) fn ballot(&self, n: usize, i: usize) -> Ballot {
        let (a, b) = self.edges[i / 2];
        let rest = (0..n).filter(|&c| c != a && c != b);
        let order: Vec<usize> = if i.is_multiple_of(2) {
            [a, b].into_iter().chain(rest).collect()
        } else {
            let mut v: Vec<usize> = rest.collect();
            v.reverse();
            v.extend([a, b]);
            v
        };
        Ballot::order(order, 1u32)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Voters {
    Explicit(Vec<Ballot>),
    Realized(Arc<Realization>),
}

/// A candidate set together with a multiset of ballots over exactly that set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Election {
    candidates: Vec<Candidate>,
    index: HashMap<String, usize>,
    pub(crate) voters: Voters,
}

impl Election {
    pub fn new(candidates: Vec<Candidate>, ballots: Vec<Ballot>) -> Result<Self> {
        let index = Self::build_index(&candidates)?;
        let n = candidates.len();
        for b in &ballots {
            b.validate(n)?;
        }
        Ok(Election {
            candidates,
            index,
            voters: Voters::Explicit(ballots),
        })
    }

    /// Convenience constructor from names.
    pub fn from_names<S: AsRef<str>>(names: &[S], ballots: Vec<Ballot>) -> Result<Self> {
        let candidates = names
            .iter()
            .map(|n| Candidate::new(n.as_ref()))
            .collect::<Result<Vec<_>>>()?;
        Election::new(candidates, ballots)
    }

    pub(crate) fn realized(candidates: Vec<Candidate>, edges: Vec<(usize, usize)>) -> Result<Self> {
        let index = Self::build_index(&candidates)?;
        Ok(Election {
            candidates,
            index,
            voters: Voters::Realized(Arc::new(Realization { edges })),
        })
    }

    fn build_index(candidates: &[Candidate]) -> Result<HashMap<String, usize>> {
        let mut index = HashMap::with_capacity(candidates.len());
        for (i, c) in candidates.iter().enumerate() {
            if index.insert(c.0.clone(), i).is_some() {
                return Err(Error::DuplicateCandidate(c.0.clone()));
            }
        }
        Ok(index)
    }

    pub fn candidates(&self) -> &[Candidate] {
        &self.candidates
    }

    pub fn candidate(&self, i: usize) -> &Candidate {
        &self.candidates[i]
    }

    pub fn len(&self) -> usize {
        self.candidates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.candidates.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownCandidate(name.to_string()))
    }

    /// Number of ballot lines (not voters).
    pub fn ballot_count(&self) -> usize {
        match &self.voters {
            Voters::Explicit(b) => b.len(),
            Voters::Realized(r) => 2 * r.edges.len(),
        }
    }

    /// Ballot line `i`.
    pub fn ballot(&self, i: usize) -> Cow<'_, Ballot> {
        match &self.voters {
            Voters::Explicit(b) => Cow::Borrowed(&b[i]),
            Voters::Realized(r) => Cow::Owned(r.ballot(self.len(), i)),
        }
    }

    pub fn ballots(&self) -> impl Iterator<Item = Cow<'_, Ballot>> + '_ {
        (0..self.ballot_count()).map(move |i| self.ballot(i))
    }

    /// The stored ballots, unless they are generated on demand.
    pub fn explicit_ballots(&self) -> Option<&[Ballot]> {
        match &self.voters {
            Voters::Explicit(b) => Some(b),
            Voters::Realized(_) => None,
        }
    }

    /// All ballots as owned values.
    pub fn to_ballots(&self) -> Vec<Ballot> {
        self.ballots().map(Cow::into_owned).collect()
    }

    /// The same election with every ballot stored explicitly.
    pub fn to_explicit(&self) -> Election {
        Election {
            candidates: self.candidates.clone(),
            index: self.index.clone(),
            voters: Voters::Explicit(self.to_ballots()),
        }
    }

    pub fn total_multiplicity(&self) -> BigUint {
        match &self.voters {
            Voters::Explicit(b) => b.iter().map(|b| &b.multiplicity).sum(),
            Voters::Realized(r) => BigUint::from(2 * r.edges.len()),
        }
    }

    pub fn all_tables(&self) -> bool {
        self.ballots().all(|b| b.kind() == BallotKind::PreferenceTable)
    }

    /// Same candidates, different ballots.
    pub fn with_ballots(&self, ballots: Vec<Ballot>) -> Result<Election> {
        let n = self.len();
        for b in &ballots {
            b.validate(n)?;
        }
        Ok(Election {
            candidates: self.candidates.clone(),
            index: self.index.clone(),
            voters: Voters::Explicit(ballots),
        })
    }

    /// The subelection over the candidates in `keep` (in the given order).
    pub fn restrict(&self, keep: &[usize]) -> Election {
        let n = self.len();
        let candidates = keep.iter().map(|&i| self.candidates[i].clone()).collect();
        let ballots = self
            .ballots()
            .map(|b| Ballot {
                preference: b.preference.restrict(keep, n),
                multiplicity: b.multiplicity.clone(),
            })
            .collect();
        Election::new(candidates, ballots).expect("restriction of a valid election")
    }

    /// Every ballot split into unit-multiplicity copies.
    ///
    /// Fails with `BudgetExceeded` when the voter count exceeds `max_voters`.
    pub fn unit_expanded(&self, max_voters: usize) -> Result<Election> {
        let total = self.total_multiplicity();
        if total > BigUint::from(max_voters) {
            return Err(Error::BudgetExceeded(format!(
                "{total} voters exceed the limit of {max_voters}"
            )));
        }
        let mut out = Vec::new();
        for b in self.ballots() {
            let m = b.multiplicity.to_usize().expect("bounded above");
            for _ in 0..m {
                out.push(b.with_multiplicity(BigUint::one()));
            }
        }
        self.with_ballots(out)
    }
}
