//! Control and bribery problems, their instances and certificates.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

use crate::alpha::Alpha;
use crate::election::{Ballot, Election, Preference};
use crate::error::{Error, Result};
use crate::goal::GoalSpec;
use crate::score::{scores_from_table, WinnerModel};
use crate::table::outcome_table;
use crate::two_stage::{final_round, Split, TieRule};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Direction {
    Constructive,
    Destructive,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ControlKind {
    /// Add any number of spoiler candidates.
    AddCandidatesUnlimited,
    AddCandidates,
    DeleteCandidates,
    /// Survivors of the first part face the whole second part.
    PartitionCandidates(TieRule),
    RunoffPartitionCandidates(TieRule),
    AddVoters,
    DeleteVoters,
    PartitionVoters(TieRule),
    /// Rewrite whole ballots of up to `k` voters.
    Bribery,
    /// Flip up to `k` single preference-table entries.
    Microbribery,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Problem {
    pub direction: Direction,
    pub kind: ControlKind,
}

impl Problem {
    pub fn new(direction: Direction, kind: ControlKind) -> Self {
        Problem { direction, kind }
    }

    pub fn needs_spoilers(self) -> bool {
        matches!(self.kind, ControlKind::AddCandidatesUnlimited | ControlKind::AddCandidates)
    }

    pub fn needs_pool(self) -> bool {
        self.kind == ControlKind::AddVoters
    }

    /// Whether the chair's action is limited by `k`.
    pub fn bounded(self) -> bool {
        matches!(
            self.kind,
            ControlKind::AddCandidates
                | ControlKind::DeleteCandidates
                | ControlKind::AddVoters
                | ControlKind::DeleteVoters
                | ControlKind::Bribery
                | ControlKind::Microbribery
        )
    }

    pub fn is_candidate_control(self) -> bool {
        matches!(
            self.kind,
            ControlKind::AddCandidatesUnlimited
                | ControlKind::AddCandidates
                | ControlKind::DeleteCandidates
                | ControlKind::PartitionCandidates(_)
                | ControlKind::RunoffPartitionCandidates(_)
        )
    }

    pub fn is_voter_control(self) -> bool {
        matches!(
            self.kind,
            ControlKind::AddVoters | ControlKind::DeleteVoters | ControlKind::PartitionVoters(_)
        )
    }

    pub fn default_goal(self, model: WinnerModel, p: &str) -> GoalSpec {
        let p = p.to_string();
        match (self.direction, model) {
            (Direction::Constructive, WinnerModel::NonUnique) => GoalSpec::MakeWinner(p),
            (Direction::Constructive, WinnerModel::Unique) => GoalSpec::MakeUniqueWinner(p),
            (Direction::Destructive, WinnerModel::NonUnique) => GoalSpec::PrecludeWinner(p),
            (Direction::Destructive, WinnerModel::Unique) => GoalSpec::PrecludeUniqueWinner(p),
        }
    }
}

impl fmt::Display for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = match self.direction {
            Direction::Constructive => "CC",
            Direction::Destructive => "DC",
        };
        match self.kind {
            ControlKind::AddCandidatesUnlimited => write!(f, "{d}AC_u"),
            ControlKind::AddCandidates => write!(f, "{d}AC"),
            ControlKind::DeleteCandidates => write!(f, "{d}DC"),
            ControlKind::PartitionCandidates(r) => write!(f, "{d}PC-{}", r.code()),
            ControlKind::RunoffPartitionCandidates(r) => write!(f, "{d}RPC-{}", r.code()),
            ControlKind::AddVoters => write!(f, "{d}AV"),
            ControlKind::DeleteVoters => write!(f, "{d}DV"),
            ControlKind::PartitionVoters(r) => write!(f, "{d}PV-{}", r.code()),
            ControlKind::Bribery => match self.direction {
                Direction::Constructive => f.write_str("BRIBERY"),
                Direction::Destructive => f.write_str("DESTRUCTIVE-BRIBERY"),
            },
            ControlKind::Microbribery => match self.direction {
                Direction::Constructive => f.write_str("MICROBRIBERY"),
                Direction::Destructive => f.write_str("DESTRUCTIVE-MICROBRIBERY"),
            },
        }
    }
}

impl FromStr for Problem {
    type Err = Error;

    /// Accepts codes such as `CCAC_u`, `DCDC`, `CCRPC-TE`, `DCPV-TP` and the
    /// bribery names. Run-off voter partition (`RPV`) is read as `PV`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::WrongProblem(s.to_string());
        let up = s.to_ascii_uppercase();
        let (direction, kind) = match up.as_str() {
            "BRIBERY" => return Ok(Problem::new(Direction::Constructive, ControlKind::Bribery)),
            "DESTRUCTIVE-BRIBERY" => return Ok(Problem::new(Direction::Destructive, ControlKind::Bribery)),
            "MICROBRIBERY" => return Ok(Problem::new(Direction::Constructive, ControlKind::Microbribery)),
            "DESTRUCTIVE-MICROBRIBERY" => return Ok(Problem::new(Direction::Destructive, ControlKind::Microbribery)),
            _ if up.len() > 2 => (&up[..2], &up[2..]),
            _ => return Err(bad()),
        };
        let direction = match direction {
            "CC" => Direction::Constructive,
            "DC" => Direction::Destructive,
            _ => return Err(bad()),
        };
        let (action, rule) = match kind.split_once('-') {
            Some((a, "TP")) => (a, Some(TieRule::Promote)),
            Some((a, "TE")) => (a, Some(TieRule::Eliminate)),
            Some(_) => return Err(bad()),
            None => (kind, None),
        };
        let kind = match (action, rule) {
            ("AC_U" | "ACU", None) => ControlKind::AddCandidatesUnlimited,
            ("AC", None) => ControlKind::AddCandidates,
            ("DC", None) => ControlKind::DeleteCandidates,
            ("PC", Some(r)) => ControlKind::PartitionCandidates(r),
            ("RPC", Some(r)) => ControlKind::RunoffPartitionCandidates(r),
            ("AV", None) => ControlKind::AddVoters,
            ("DV", None) => ControlKind::DeleteVoters,
            ("PV" | "RPV", Some(r)) => ControlKind::PartitionVoters(r),
            _ => return Err(bad()),
        };
        Ok(Problem { direction, kind })
    }
}

/// A control or bribery decision problem.
///
/// For candidate addition the election ranges over `C ∪ D` and `spoilers`
/// lists the indices of `D`; for voter addition `voter_pool` holds the
/// unregistered ballots.
#[derive(Clone, Debug)]
pub struct ControlInstance {
    pub problem: Problem,
    pub model: WinnerModel,
    pub alpha: Alpha,
    pub election: Election,
    pub spoilers: Option<Vec<usize>>,
    pub voter_pool: Option<Vec<Ballot>>,
    pub k: Option<usize>,
    pub p: String,
    /// Overrides the default goal of the problem and model.
    pub goal: Option<GoalSpec>,
}

impl ControlInstance {
    pub fn new(problem: Problem, model: WinnerModel, alpha: Alpha, election: Election, p: impl Into<String>) -> Self {
        ControlInstance {
            problem,
            model,
            alpha,
            election,
            spoilers: None,
            voter_pool: None,
            k: None,
            p: p.into(),
            goal: None,
        }
    }

    pub fn with_k(mut self, k: usize) -> Self {
        self.k = Some(k);
        self
    }

    pub fn with_spoilers(mut self, spoilers: Vec<usize>) -> Self {
        self.spoilers = Some(spoilers);
        self
    }

    pub fn with_pool(mut self, pool: Vec<Ballot>) -> Self {
        self.voter_pool = Some(pool);
        self
    }

    pub fn with_goal(mut self, goal: GoalSpec) -> Self {
        self.goal = Some(goal);
        self
    }

    pub fn goal(&self) -> GoalSpec {
        self.goal.clone().unwrap_or_else(|| self.problem.default_goal(self.model, &self.p))
    }

    pub fn p_index(&self) -> Result<usize> {
        self.election.index_of(&self.p)
    }

    /// The budget, or `usize::MAX` for unbounded problems.
    pub fn budget(&self) -> usize {
        self.k.unwrap_or(usize::MAX)
    }

    /// Indices of the registered candidates.
    pub fn registered(&self) -> Vec<usize> {
        let mut spoiler = vec![false; self.election.len()];
        for &d in self.spoilers.iter().flatten() {
            spoiler[d] = true;
        }
        (0..self.election.len()).filter(|&c| !spoiler[c]).collect()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::MalformedInstance(m));
        let p = self.p_index()?;
        if self.problem.needs_spoilers() != self.spoilers.is_some() {
            return bad(format!("{} {} spoiler candidates", self.problem, if self.spoilers.is_some() { "takes no" } else { "needs" }));
        }
        if self.problem.needs_pool() != self.voter_pool.is_some() {
            return bad(format!("{} {} a voter pool", self.problem, if self.voter_pool.is_some() { "takes no" } else { "needs" }));
        }
        if self.problem.bounded() != self.k.is_some() {
            return bad(format!("{} {} a budget k", self.problem, if self.k.is_some() { "takes no" } else { "needs" }));
        }
        if let Some(d) = &self.spoilers {
            let mut seen = vec![false; self.election.len()];
            for &c in d {
                if c >= self.election.len() || seen[c] {
                    return bad("spoiler indices must be distinct candidates".into());
                }
                seen[c] = true;
            }
            if seen[p] {
                return bad(format!("{} cannot be a spoiler", self.p));
            }
        }
        if let Some(pool) = &self.voter_pool {
            for b in pool {
                b.validate(self.election.len())?;
            }
        }
        if self.problem.kind == ControlKind::Microbribery && !self.election.all_tables() {
            return Err(Error::NotIrrational);
        }
        self.goal().compile(self.election.candidates())?;
        Ok(())
    }
}

/// Certificate of a YES answer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Witness {
    AddedCandidates(Vec<usize>),
    DeletedCandidates(Vec<usize>),
    CandidatePartition { first: Vec<usize>, second: Vec<usize> },
    /// Voters taken from each pool line.
    AddedVoters(Vec<BigUint>),
    /// Voters removed from each ballot line.
    DeletedVoters(Vec<BigUint>),
    /// Voters of each ballot line in the first part.
    VoterPartition(Vec<BigUint>),
    /// Unit-voter index (ballot lines expanded in order) and new preference.
    BribedBallots(Vec<(usize, Preference)>),
    /// Unit-voter index and the pair whose entry is flipped.
    Flips(Vec<(usize, usize, usize)>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Decision {
    Yes(Witness),
    No,
}

impl Decision {
    pub fn is_yes(&self) -> bool {
        matches!(self, Decision::Yes(_))
    }

    pub fn witness(&self) -> Option<&Witness> {
        match self {
            Decision::Yes(w) => Some(w),
            Decision::No => None,
        }
    }
}

fn sum(v: &[BigUint]) -> BigUint {
    v.iter().sum()
}

/// Ballots with their multiplicities replaced (zero drops the line).
fn reweighted(ballots: &[Ballot], counts: impl Iterator<Item = BigUint>) -> Vec<Ballot> {
    ballots
        .iter()
        .zip(counts)
        .filter(|(_, c)| !c.is_zero())
        .map(|(b, c)| b.with_multiplicity(c))
        .collect()
}

pub(crate) fn unit_voters(election: &Election, max_voters: usize) -> Result<Vec<Ballot>> {
    Ok(election.unit_expanded(max_voters)?.to_ballots())
}

/// Applies `witness` and evaluates the goal on the resulting election (the
/// final round, for partitions). Returns `Ok(false)` for certificates that
/// break the problem's rules.
pub fn verify_witness(inst: &ControlInstance, witness: &Witness) -> Result<bool> {
    inst.validate()?;
    let e = &inst.election;
    let n = e.len();
    let p = inst.p_index()?;
    let k = inst.budget();
    let kind = inst.problem.kind;
    let mismatch = || Err(Error::MalformedInstance(format!("certificate does not fit {}", inst.problem)));
    let result: Election = match (kind, witness) {
        (ControlKind::AddCandidatesUnlimited | ControlKind::AddCandidates, Witness::AddedCandidates(add)) => {
            let spoilers = inst.spoilers.as_ref().unwrap();
            if add.len() > k || add.iter().any(|d| !spoilers.contains(d)) || has_duplicates(add) {
                return Ok(false);
            }
            let mut keep = inst.registered();
            keep.extend(add);
            keep.sort_unstable();
            e.restrict(&keep)
        }
        (ControlKind::DeleteCandidates, Witness::DeletedCandidates(del)) => {
            if del.len() > k || del.contains(&p) || del.iter().any(|&d| d >= n) || has_duplicates(del) {
                return Ok(false);
            }
            let keep: Vec<usize> = (0..n).filter(|c| !del.contains(c)).collect();
            e.restrict(&keep)
        }
        (
            ControlKind::PartitionCandidates(rule) | ControlKind::RunoffPartitionCandidates(rule),
            Witness::CandidatePartition { first, second },
        ) => {
            let split = if matches!(kind, ControlKind::RunoffPartitionCandidates(_)) {
                Split::Runoff { first: first.clone(), second: second.clone() }
            } else {
                Split::Candidates { first: first.clone(), second: second.clone() }
            };
            match final_round(e, &split, rule, inst.alpha) {
                Ok((fin, _)) => e.restrict(&fin),
                Err(Error::NotAPartition(_)) => return Ok(false),
                Err(err) => return Err(err),
            }
        }
        (ControlKind::AddVoters, Witness::AddedVoters(add)) => {
            let pool = inst.voter_pool.as_ref().unwrap();
            if add.len() != pool.len() || sum(add) > BigUint::from(k) || add.iter().zip(pool).any(|(a, b)| a > &b.multiplicity) {
                return Ok(false);
            }
            let mut ballots = e.to_ballots();
            ballots.extend(reweighted(pool, add.iter().cloned()));
            e.with_ballots(ballots)?
        }
        (ControlKind::DeleteVoters, Witness::DeletedVoters(del)) => {
            let ballots = e.to_ballots();
            if del.len() != ballots.len() || sum(del) > BigUint::from(k) || del.iter().zip(&ballots).any(|(d, b)| d > &b.multiplicity) {
                return Ok(false);
            }
            let left = ballots.iter().zip(del).map(|(b, d)| &b.multiplicity - d);
            e.with_ballots(reweighted(&ballots, left))?
        }
        (ControlKind::PartitionVoters(rule), Witness::VoterPartition(first)) => {
            match final_round(e, &Split::Voters { first: first.clone() }, rule, inst.alpha) {
                Ok((fin, _)) => e.restrict(&fin),
                Err(Error::NotAPartition(_)) => return Ok(false),
                Err(err) => return Err(err),
            }
        }
        (ControlKind::Bribery, Witness::BribedBallots(bribes)) => {
            let total = e.total_multiplicity().to_usize().unwrap_or(usize::MAX);
            let mut voters = unit_voters(e, total)?;
            let mut touched = vec![false; voters.len()];
            if bribes.len() > k {
                return Ok(false);
            }
            for (i, pref) in bribes {
                if *i >= voters.len() || touched[*i] || pref.kind() != voters[*i].kind() {
                    return Ok(false);
                }
                let candidate = Ballot { preference: pref.clone(), multiplicity: BigUint::from(1u32) };
                if candidate.validate(n).is_err() {
                    return Ok(false);
                }
                touched[*i] = true;
                voters[*i] = candidate;
            }
            e.with_ballots(voters)?
        }
        (ControlKind::Microbribery, Witness::Flips(flips)) => {
            let total = e.total_multiplicity().to_usize().unwrap_or(usize::MAX);
            let mut voters = unit_voters(e, total)?;
            if flips.len() > k {
                return Ok(false);
            }
            for &(i, a, b) in flips {
                if i >= voters.len() || a == b || a >= n || b >= n {
                    return Ok(false);
                }
                match &mut voters[i].preference {
                    Preference::Table(t) => t.flip(a, b),
                    Preference::Order(_) => return Ok(false),
                }
            }
            e.with_ballots(voters)?
        }
        _ => return mismatch(),
    };
    let goal = inst.goal().compile(e.candidates())?;
    let table = outcome_table(&result);
    let scores = scores_from_table(&table, inst.alpha);
    let mut by_base = vec![None; n];
    for (i, c) in result.candidates().iter().enumerate() {
        by_base[e.index_of(c.as_str())?] = Some(scores.scaled()[i]);
    }
    Ok(goal.holds(&by_base, inst.alpha, &|| table.clone()))
}

fn has_duplicates(v: &[usize]) -> bool {
    let mut s = v.to_vec();
    s.sort_unstable();
    s.windows(2).any(|w| w[0] == w[1])
}
