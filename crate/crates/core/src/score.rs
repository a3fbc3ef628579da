//! Copeland^α scores and winner sets.

use crate::alpha::Alpha;
use crate::election::{Candidate, Election};
use crate::error::{Error, Result};
use crate::table::{outcome_table, Outcome, OutcomeTable};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum WinnerModel {
    NonUnique,
    Unique,
}

impl WinnerModel {
    /// Narrows a nonunique winner set to the model.
    pub fn apply(self, winners: Vec<usize>) -> Vec<usize> {
        match self {
            WinnerModel::NonUnique => winners,
            WinnerModel::Unique if winners.len() == 1 => winners,
            WinnerModel::Unique => Vec::new(),
        }
    }
}

/// Scores scaled by `t`: `t * wins + s * ties`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScoreVector {
    alpha: Alpha,
    candidates: Vec<Candidate>,
    scaled: Vec<u64>,
}

impl ScoreVector {
    pub fn alpha(&self) -> Alpha {
        self.alpha
    }

    pub fn candidates(&self) -> &[Candidate] {
        &self.candidates
    }

    pub fn scaled(&self) -> &[u64] {
        &self.scaled
    }

    pub fn get(&self, name: &str) -> Option<u64> {
        self.candidates.iter().position(|c| c.as_str() == name).map(|i| self.scaled[i])
    }

    pub fn max(&self) -> Option<u64> {
        self.scaled.iter().copied().max()
    }

    /// Winner indices under `model`, in declaration order.
    pub fn winners(&self, model: WinnerModel) -> Vec<usize> {
        model.apply(argmax(&self.scaled))
    }
}

/// Indices attaining the maximum.
pub fn argmax(scaled: &[u64]) -> Vec<usize> {
    let Some(&best) = scaled.iter().max() else {
        return Vec::new();
    };
    (0..scaled.len()).filter(|&i| scaled[i] == best).collect()
}

pub fn scores_from_table(table: &OutcomeTable, alpha: Alpha) -> ScoreVector {
    let n = table.len();
    let (win, tie) = (alpha.win_points(), alpha.tie_points());
    let raw = table.raw_results();
    let scaled = (0..n)
        .map(|a| {
            raw[a * n..a * n + n]
                .iter()
                .enumerate()
                .filter(|&(b, _)| b != a)
                .map(|(_, &o)| match Outcome::from_u8(o) {
                    Outcome::Win => win,
                    Outcome::Tie => tie,
                    Outcome::Loss => 0,
                })
                .sum()
        })
        .collect();
    ScoreVector {
        alpha,
        candidates: table.candidates().to_vec(),
        scaled,
    }
}

pub fn copeland_scores(election: &Election, alpha: Alpha) -> ScoreVector {
    scores_from_table(&outcome_table(election), alpha)
}

pub fn winners(election: &Election, alpha: Alpha, model: WinnerModel) -> Result<Vec<Candidate>> {
    if election.is_empty() {
        return Err(Error::EmptyCandidateSet);
    }
    let scores = copeland_scores(election, alpha);
    Ok(scores
        .winners(model)
        .into_iter()
        .map(|i| election.candidate(i).clone())
        .collect())
}

/// Points each candidate earns against each other: `t` for a win,
/// `s` for a tie, nothing for a loss.
#[derive(Clone, Debug)]
pub(crate) struct Points {
    n: usize,
    v: Vec<u64>,
}

impl Points {
    pub(crate) fn new(table: &OutcomeTable, alpha: Alpha) -> Self {
        let n = table.len();
        let (win, tie) = (alpha.win_points(), alpha.tie_points());
        let v = table
            .raw_results()
            .iter()
            .enumerate()
            .map(|(i, &o)| {
                if i / n == i % n {
                    return 0;
                }
                match Outcome::from_u8(o) {
                    Outcome::Win => win,
                    Outcome::Tie => tie,
                    Outcome::Loss => 0,
                }
            })
            .collect();
        Points { n, v }
    }

    pub(crate) fn len(&self) -> usize {
        self.n
    }

    #[inline]
    pub(crate) fn get(&self, a: usize, b: usize) -> u64 {
        self.v[a * self.n + b]
    }

    pub(crate) fn row(&self, a: usize) -> &[u64] {
        &self.v[a * self.n..(a + 1) * self.n]
    }

    /// Score of `c` within the subelection over `members`.
    pub(crate) fn score_within(&self, c: usize, members: &[usize]) -> u64 {
        let row = self.row(c);
        members.iter().map(|&d| row[d]).sum()
    }

    pub(crate) fn scores_within(&self, members: &[usize]) -> Vec<u64> {
        members.iter().map(|&c| self.score_within(c, members)).collect()
    }

    /// Nonunique winners of the subelection over `members` (base indices).
    pub(crate) fn winners_within(&self, members: &[usize]) -> Vec<usize> {
        let scores = self.scores_within(members);
        argmax(&scores).into_iter().map(|i| members[i]).collect()
    }
}
