//! Two-stage elections: candidate partitions, runoff partitions and voter partitions.

use num_bigint::BigUint;
use num_traits::Zero;

use crate::alpha::Alpha;
use crate::election::{Candidate, Election};
use crate::error::{Error, Result};
use crate::score::{Points, WinnerModel};
use crate::table::outcome_table;

/// How ties in a subelection are handled.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TieRule {
    /// Every winner moves on.
    Promote,
    /// Only a unique winner moves on.
    Eliminate,
}

impl TieRule {
    pub fn code(self) -> &'static str {
        match self {
            TieRule::Promote => "TP",
            TieRule::Eliminate => "TE",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Split {
    /// Survivors of the first part face the whole second part.
    Candidates { first: Vec<usize>, second: Vec<usize> },
    /// Survivors of both parts meet in the final.
    Runoff { first: Vec<usize>, second: Vec<usize> },
    /// For each ballot line, how many of its voters vote in the first
    /// subelection; the rest vote in the second.
    Voters { first: Vec<BigUint> },
}

pub(crate) fn survivors(points: &Points, members: &[usize], rule: TieRule) -> Vec<usize> {
    let w = points.winners_within(members);
    match rule {
        TieRule::Promote => w,
        TieRule::Eliminate if w.len() == 1 => w,
        TieRule::Eliminate => Vec::new(),
    }
}

/// Candidates reaching the final of a candidate or runoff partition, sorted.
pub(crate) fn candidate_final(points: &Points, first: &[usize], second: &[usize], runoff: bool, rule: TieRule) -> Vec<usize> {
    let mut fin = survivors(points, first, rule);
    if runoff {
        fin.extend(survivors(points, second, rule));
    } else {
        fin.extend_from_slice(second);
    }
    fin.sort_unstable();
    fin
}

pub(crate) fn check_candidate_partition(n: usize, first: &[usize], second: &[usize]) -> Result<()> {
    let mut seen = vec![false; n];
    for &c in first.iter().chain(second) {
        if c >= n {
            return Err(Error::NotAPartition(format!("candidate index {c} out of range")));
        }
        if seen[c] {
            return Err(Error::NotAPartition(format!("candidate index {c} appears twice")));
        }
        seen[c] = true;
    }
    if seen.iter().any(|&s| !s) {
        return Err(Error::NotAPartition("some candidate is in neither part".into()));
    }
    Ok(())
}

/// Splits the ballots of `election` by `first`.
pub(crate) fn split_voters(election: &Election, first: &[BigUint]) -> Result<(Election, Election)> {
    if first.len() != election.ballot_count() {
        return Err(Error::NotAPartition(format!(
            "{} amounts for {} ballot lines",
            first.len(),
            election.ballot_count()
        )));
    }
    let mut a = Vec::new();
    let mut b = Vec::new();
    for (ballot, amount) in election.ballots().zip(first) {
        if amount > &ballot.multiplicity {
            return Err(Error::NotAPartition("amount exceeds multiplicity".into()));
        }
        if !amount.is_zero() {
            a.push(ballot.with_multiplicity(amount.clone()));
        }
        let rest = &ballot.multiplicity - amount;
        if !rest.is_zero() {
            b.push(ballot.with_multiplicity(rest));
        }
    }
    Ok((election.with_ballots(a)?, election.with_ballots(b)?))
}

/// The final round's candidates (sorted indices) and its nonunique winners.
pub fn final_round(election: &Election, split: &Split, rule: TieRule, alpha: Alpha) -> Result<(Vec<usize>, Vec<usize>)> {
    let full = Points::new(&outcome_table(election), alpha);
    let fin = match split {
        Split::Candidates { first, second } | Split::Runoff { first, second } => {
            check_candidate_partition(election.len(), first, second)?;
            candidate_final(&full, first, second, matches!(split, Split::Runoff { .. }), rule)
        }
        Split::Voters { first } => {
            let (a, b) = split_voters(election, first)?;
            let all: Vec<usize> = (0..election.len()).collect();
            let pa = Points::new(&outcome_table(&a), alpha);
            let pb = Points::new(&outcome_table(&b), alpha);
            let mut fin = survivors(&pa, &all, rule);
            fin.extend(survivors(&pb, &all, rule));
            fin.sort_unstable();
            fin.dedup();
            fin
        }
    };
    let winners = full.winners_within(&fin);
    Ok((fin, winners))
}

pub fn evaluate_two_stage(
    election: &Election,
    split: &Split,
    rule: TieRule,
    alpha: Alpha,
    model: WinnerModel,
) -> Result<Vec<Candidate>> {
    let (_, winners) = final_round(election, split, rule, alpha)?;
    Ok(model
        .apply(winners)
        .into_iter()
        .map(|i| election.candidate(i).clone())
        .collect())
}
