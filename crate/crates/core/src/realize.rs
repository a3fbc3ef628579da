//! Elections with prescribed head-to-head results and prescribed scores.

use crate::alpha::Alpha;
use crate::election::{Candidate, Election};
use crate::error::{Error, Result};
use crate::score::copeland_scores;
use crate::table::{outcome_table, Outcome, OutcomeTable};

/// A complete win/tie/loss pattern over a candidate set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DesiredOutcomes {
    candidates: Vec<Candidate>,
    results: Vec<Outcome>,
}

impl DesiredOutcomes {
    /// All contests tied.
    pub fn new(candidates: Vec<Candidate>) -> Result<Self> {
        let mut seen = std::collections::HashSet::new();
        for c in &candidates {
            if !seen.insert(c.as_str()) {
                return Err(Error::DuplicateCandidate(c.to_string()));
            }
        }
        let n = candidates.len();
        Ok(DesiredOutcomes {
            candidates,
            results: vec![Outcome::Tie; n * n],
        })
    }

    pub fn from_names<S: AsRef<str>>(names: &[S]) -> Result<Self> {
        let c = names.iter().map(|s| Candidate::new(s.as_ref())).collect::<Result<Vec<_>>>()?;
        DesiredOutcomes::new(c)
    }

    pub fn from_table(table: &OutcomeTable) -> Self {
        let n = table.len();
        let mut d = DesiredOutcomes {
            candidates: table.candidates().to_vec(),
            results: vec![Outcome::Tie; n * n],
        };
        for a in 0..n {
            for b in a + 1..n {
                d.set(a, b, table.outcome(a, b));
            }
        }
        d
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

    /// Sets the result of `a` against `b` (and the reverse).
    pub fn set(&mut self, a: usize, b: usize, o: Outcome) {
        assert_ne!(a, b, "a contest needs two candidates");
        let n = self.len();
        self.results[a * n + b] = o;
        self.results[b * n + a] = o.reverse();
    }

    pub fn beat(&mut self, a: usize, b: usize) {
        self.set(a, b, Outcome::Win);
    }

    pub fn tie(&mut self, a: usize, b: usize) {
        self.set(a, b, Outcome::Tie);
    }

    pub fn get(&self, a: usize, b: usize) -> Outcome {
        self.results[a * self.len() + b]
    }

    /// Scaled scores implied by the pattern.
    pub fn scores(&self, alpha: Alpha) -> Vec<u64> {
        let n = self.len();
        (0..n)
            .map(|a| {
                (0..n)
                    .filter(|&b| b != a)
                    .map(|b| match self.get(a, b) {
                        Outcome::Win => alpha.win_points(),
                        Outcome::Tie => alpha.tie_points(),
                        Outcome::Loss => 0,
                    })
                    .sum()
            })
            .collect()
    }

    /// Appends a candidate tied with everyone; returns its index.
    pub fn push(&mut self, c: Candidate) -> Result<usize> {
        if self.index_of(c.as_str()).is_some() {
            return Err(Error::NameClash(c.to_string()));
        }
        let n = self.len();
        let mut results = vec![Outcome::Tie; (n + 1) * (n + 1)];
        for a in 0..n {
            results[a * (n + 1)..a * (n + 1) + n].copy_from_slice(&self.results[a * n..a * n + n]);
        }
        self.results = results;
        self.candidates.push(c);
        Ok(n)
    }

    /// Appends every candidate of `other`, keeping its internal results and
    /// tying it with the existing candidates. Returns the index offset.
    pub fn append(&mut self, other: &DesiredOutcomes) -> Result<usize> {
        let offset = self.len();
        for c in &other.candidates {
            if self.index_of(c.as_str()).is_some() {
                return Err(Error::NameClash(c.to_string()));
            }
        }
        let n = offset + other.len();
        let mut results = vec![Outcome::Tie; n * n];
        for a in 0..offset {
            results[a * n..a * n + offset].copy_from_slice(&self.results[a * offset..(a + 1) * offset]);
        }
        let m = other.len();
        for a in 0..m {
            let row = (offset + a) * n + offset;
            results[row..row + m].copy_from_slice(&other.results[a * m..(a + 1) * m]);
        }
        self.results = results;
        self.candidates.extend(other.candidates.iter().cloned());
        Ok(offset)
    }

    /// Decisive contests as `(winner, loser)` pairs in pair order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let n = self.len();
        let mut edges = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                match self.get(a, b) {
                    Outcome::Win => edges.push((a, b)),
                    Outcome::Loss => edges.push((b, a)),
                    Outcome::Tie => {}
                }
            }
        }
        edges
    }
}

/// Realizes the pattern with one canceling ballot pair per decisive contest.
///
/// For a decisive pair `(a, b)` the ballots are `a > b > rest` and
/// `reverse(rest) > a > b` with `rest` in index order, so `a` wins by two
/// and every other contest is unaffected.
pub fn realize_outcomes(spec: &DesiredOutcomes) -> Election {
    Election::realized(spec.candidates.clone(), spec.edges()).expect("candidates already validated")
}

fn names(prefix: &str, range: std::ops::Range<usize>) -> Vec<Candidate> {
    range.map(|i| Candidate::new(format!("{prefix}{i}")).expect("valid token")).collect()
}

/// The circulant tournament on `2n + 1` candidates: `i` beats `i+1, …, i+n`.
pub fn pad_outcomes(n: usize, prefix: &str) -> DesiredOutcomes {
    let size = 2 * n + 1;
    let mut d = DesiredOutcomes::new(names(prefix, 0..size)).expect("distinct names");
    for i in 0..size {
        for j in 1..=n {
            d.beat(i, (i + j) % size);
        }
    }
    d
}

/// Every candidate wins exactly `n` contests and loses `n`.
pub fn build_pad(n: usize) -> Election {
    realize_outcomes(&pad_outcomes(n, "t"))
}

/// A base election and the score deficits `k` for a prescribed-score construction.
#[derive(Clone, Debug)]
pub struct ScoredSpec {
    pub base: Election,
    pub k: Vec<usize>,
}

impl ScoredSpec {
    /// Tie count of each base candidate within the base election.
    pub fn ties(&self) -> Vec<usize> {
        let t = outcome_table(&self.base);
        let n = t.len();
        (0..n)
            .map(|a| (0..n).filter(|&b| b != a && t.outcome(a, b) == Outcome::Tie).count())
            .collect()
    }
}

/// Adds `2n²` dummies so that base candidate `i` scores
/// `t (2n² − k_i) + s t_i` and every dummy at most `t (n² + 1)`.
///
/// Candidate `i` loses to `k_i + w_i` dummies (`w_i` its base wins) taken
/// cyclically from the low half of a near-regular dummy tournament, at most
/// two per dummy.
pub fn scored_outcomes(base: &DesiredOutcomes, k: &[usize], dummy_prefix: &str) -> Result<DesiredOutcomes> {
    let n = base.len();
    if k.len() != n {
        return Err(Error::InfeasibleSpec(format!("{} deficits for {n} candidates", k.len())));
    }
    if let Some(i) = (0..n).find(|&i| k[i] > n) {
        return Err(Error::InfeasibleSpec(format!("deficit {} of {} exceeds {n}", k[i], base.candidates[i])));
    }
    let dummies = 2 * n * n;
    let half = n * n;
    let mut out = base.clone();
    let offset = out.append(&DesiredOutcomes::new(names(dummy_prefix, 1..dummies + 1))?)?;
    for i in 0..dummies {
        for j in 1..half {
            out.beat(offset + i, offset + (i + j) % dummies);
        }
        if i < half {
            out.beat(offset + i, offset + i + half);
        }
    }
    let mut next = 0;
    for c in 0..n {
        let wins = (0..n).filter(|&b| b != c && base.get(c, b) == Outcome::Win).count();
        let losses = k[c] + wins;
        for d in 0..dummies {
            out.beat(c, offset + d);
        }
        for _ in 0..losses {
            out.beat(offset + half + next % half, c);
            next += 1;
        }
    }
    Ok(out)
}

/// Realizes [`scored_outcomes`]. The result is checked
/// against the target scores.
pub fn build_scored(spec: &ScoredSpec, alpha: Alpha) -> Result<Election> {
    let base = DesiredOutcomes::from_table(&outcome_table(&spec.base));
    let out = scored_outcomes(&base, &spec.k, "d")?;
    let election = realize_outcomes(&out);
    let n = base.len();
    let scores = copeland_scores(&election, alpha);
    let (t, s) = (alpha.den(), alpha.num());
    let ties = spec.ties();
    for i in 0..n {
        let want = t * (2 * n * n - spec.k[i]) as u64 + s * ties[i] as u64;
        if scores.scaled()[i] != want {
            return Err(Error::InfeasibleSpec(format!(
                "{} scores {} instead of {want}",
                base.candidates[i],
                scores.scaled()[i]
            )));
        }
    }
    let cap = t * (n * n + 1) as u64;
    if let Some(d) = (n..election.len()).find(|&d| scores.scaled()[d] > cap) {
        return Err(Error::InfeasibleSpec(format!("dummy {} exceeds {cap}", election.candidate(d))));
    }
    Ok(election)
}

/// Joins `f` and `h` with a fresh candidate `r`: every `f` beats `r`, `r`
/// beats every `h`, every `h` beats every `f`.
pub fn combine_outcomes(f: &DesiredOutcomes, h: &DesiredOutcomes, r: &str) -> Result<DesiredOutcomes> {
    let mut out = DesiredOutcomes::new(vec![Candidate::new(r)?])?;
    let fo = out.append(f)?;
    let ho = out.append(h)?;
    for i in 0..f.len() {
        out.beat(fo + i, 0);
        for j in 0..h.len() {
            out.beat(ho + j, fo + i);
        }
    }
    for j in 0..h.len() {
        out.beat(0, ho + j);
    }
    Ok(out)
}

/// [`combine_outcomes`] on elections, with the fresh candidate named `r`.
pub fn combine_ghr(f: &Election, h: &Election) -> Result<Election> {
    if h.len() < 2 {
        return Err(Error::InfeasibleSpec("the second election needs two candidates".into()));
    }
    let fo = DesiredOutcomes::from_table(&outcome_table(f));
    let ho = DesiredOutcomes::from_table(&outcome_table(h));
    Ok(realize_outcomes(&combine_outcomes(&fo, &ho, "r")?))
}

/// A tournament whose vertex `i` wins exactly `scores[i]` games, as
/// `(winner, loser)` pairs. Fails unless the sequence satisfies Landau's
/// condition.
pub fn tournament_from_scores(scores: &[usize]) -> Result<Vec<(usize, usize)>> {
    let q = scores.len();
    let mut sorted = scores.to_vec();
    sorted.sort_unstable();
    let mut sum = 0;
    for (i, &s) in sorted.iter().enumerate() {
        sum += s;
        if sum < (i + 1) * i / 2 {
            return Err(Error::InfeasibleSpec(format!("score sequence {scores:?} violates Landau's condition")));
        }
    }
    if sum != q * q.saturating_sub(1) / 2 {
        return Err(Error::InfeasibleSpec(format!("score sequence {scores:?} has the wrong sum")));
    }
    // Start transitive, then reverse a path from a vertex with too many
    // wins to one with too few; inner vertices keep their counts.
    let mut beats = vec![vec![false; q]; q];
    for a in 0..q {
        for b in a + 1..q {
            beats[a][b] = true;
        }
    }
    let mut wins: Vec<usize> = (0..q).map(|a| q - 1 - a).collect();
    while let Some(src) = (0..q).find(|&v| wins[v] > scores[v]) {
        let mut prev = vec![usize::MAX; q];
        prev[src] = src;
        let mut queue = std::collections::VecDeque::from([src]);
        let mut target = None;
        while let Some(v) = queue.pop_front() {
            if wins[v] < scores[v] {
                target = Some(v);
                break;
            }
            for w in 0..q {
                if beats[v][w] && prev[w] == usize::MAX {
                    prev[w] = v;
                    queue.push_back(w);
                }
            }
        }
        let Some(mut v) = target else {
            return Err(Error::InfeasibleSpec(format!("no tournament with scores {scores:?}")));
        };
        wins[v] += 1;
        wins[src] -= 1;
        while v != src {
            let u = prev[v];
            beats[u][v] = false;
            beats[v][u] = true;
            v = u;
        }
    }
    let mut edges = Vec::new();
    for a in 0..q {
        for b in a + 1..q {
            edges.push(if beats[a][b] { (a, b) } else { (b, a) });
        }
    }
    Ok(edges)
}
