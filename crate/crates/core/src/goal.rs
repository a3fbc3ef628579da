//! Target conditions for control and bribery problems.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::alpha::Alpha;
use crate::election::Candidate;
use crate::error::{Error, Result};
use crate::score::scores_from_table;
use crate::table::OutcomeTable;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Relation {
    Less,
    LessEq,
    Equal,
}

impl Relation {
    fn holds(self, a: u64, b: u64) -> bool {
        match self {
            Relation::Less => a < b,
            Relation::LessEq => a <= b,
            Relation::Equal => a == b,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Less => "<",
            Relation::LessEq => "<=",
            Relation::Equal => "=",
        }
    }
}

pub type TableTest = dyn Fn(&OutcomeTable, Alpha) -> bool + Send + Sync;

/// Arbitrary predicate over the resulting outcome table.
#[derive(Clone)]
pub struct TablePredicate(pub Arc<TableTest>);

impl fmt::Debug for TablePredicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("TablePredicate(..)")
    }
}

#[derive(Clone, Debug)]
pub enum GoalSpec {
    MakeWinner(String),
    MakeUniqueWinner(String),
    PrecludeWinner(String),
    PrecludeUniqueWinner(String),
    ScoreOrder(Vec<(String, Relation, String)>),
    ExactScaledScores(Vec<(String, u64)>),
    /// Every candidate of the first group outscores every one of the second.
    GroupDominance(Vec<String>, Vec<String>),
    TablePredicate(TablePredicate),
}

impl GoalSpec {
    pub fn names(&self) -> Vec<&str> {
        match self {
            GoalSpec::MakeWinner(p)
            | GoalSpec::MakeUniqueWinner(p)
            | GoalSpec::PrecludeWinner(p)
            | GoalSpec::PrecludeUniqueWinner(p) => vec![p.as_str()],
            GoalSpec::ScoreOrder(v) => v.iter().flat_map(|(a, _, b)| [a.as_str(), b.as_str()]).collect(),
            GoalSpec::ExactScaledScores(v) => v.iter().map(|(a, _)| a.as_str()).collect(),
            GoalSpec::GroupDominance(a, b) => a.iter().chain(b).map(String::as_str).collect(),
            GoalSpec::TablePredicate(_) => vec![],
        }
    }

    /// Whether removing a candidate can only help this goal hold.
    fn absent_satisfies(&self) -> bool {
        matches!(self, GoalSpec::PrecludeWinner(_) | GoalSpec::PrecludeUniqueWinner(_))
    }

    /// Checks that score-order constraints admit some assignment: no cycle
    /// through a strict relation.
    pub fn validate(&self) -> Result<()> {
        let GoalSpec::ScoreOrder(rels) = self else {
            return Ok(());
        };
        let mut names: Vec<&str> = rels.iter().flat_map(|(a, _, b)| [a.as_str(), b.as_str()]).collect();
        names.sort_unstable();
        names.dedup();
        let id = |s: &str| names.binary_search(&s).unwrap();
        let n = names.len();
        // reach[a][b] = Some(strict) if a <= b (strict if some step is <)
        let mut reach: Vec<Vec<Option<bool>>> = vec![vec![None; n]; n];
        let add = |reach: &mut Vec<Vec<Option<bool>>>, a: usize, b: usize, strict: bool| {
            let cur = reach[a][b];
            reach[a][b] = Some(cur.unwrap_or(false) || strict);
        };
        for (a, rel, b) in rels {
            let (a, b) = (id(a), id(b));
            match rel {
                Relation::Less => add(&mut reach, a, b, true),
                Relation::LessEq => add(&mut reach, a, b, false),
                Relation::Equal => {
                    add(&mut reach, a, b, false);
                    add(&mut reach, b, a, false);
                }
            }
        }
        for k in 0..n {
            for i in 0..n {
                let Some(ik) = reach[i][k] else { continue };
                for j in 0..n {
                    if let Some(kj) = reach[k][j] {
                        add(&mut reach, i, j, ik || kj);
                    }
                }
            }
        }
        for (i, row) in reach.iter().enumerate() {
            if row[i] == Some(true) {
                return Err(Error::InvalidGoal(format!("contradictory strict cycle through {}", names[i])));
            }
        }
        Ok(())
    }

    /// Resolves names against `candidates`.
    pub(crate) fn compile(&self, candidates: &[Candidate]) -> Result<CompiledGoal> {
        self.validate()?;
        let idx = |s: &String| {
            candidates
                .iter()
                .position(|c| c.as_str() == s)
                .ok_or_else(|| Error::UnknownCandidate(s.clone()))
        };
        let kind = match self {
            GoalSpec::MakeWinner(p) => Compiled::Winner(idx(p)?, false, false),
            GoalSpec::MakeUniqueWinner(p) => Compiled::Winner(idx(p)?, true, false),
            GoalSpec::PrecludeWinner(p) => Compiled::Winner(idx(p)?, false, true),
            GoalSpec::PrecludeUniqueWinner(p) => Compiled::Winner(idx(p)?, true, true),
            GoalSpec::ScoreOrder(v) => Compiled::Order(
                v.iter().map(|(a, r, b)| Ok((idx(a)?, *r, idx(b)?))).collect::<Result<_>>()?,
            ),
            GoalSpec::ExactScaledScores(v) => {
                Compiled::Exact(v.iter().map(|(a, s)| Ok((idx(a)?, *s))).collect::<Result<_>>()?)
            }
            GoalSpec::GroupDominance(a, b) => Compiled::Dominance(
                a.iter().map(idx).collect::<Result<_>>()?,
                b.iter().map(idx).collect::<Result<_>>()?,
            ),
            GoalSpec::TablePredicate(f) => Compiled::Predicate(f.clone()),
        };
        Ok(CompiledGoal {
            kind,
            absent: self.absent_satisfies(),
        })
    }
}

impl fmt::Display for GoalSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GoalSpec::MakeWinner(p) => write!(f, "winner:{p}"),
            GoalSpec::MakeUniqueWinner(p) => write!(f, "unique:{p}"),
            GoalSpec::PrecludeWinner(p) => write!(f, "not-winner:{p}"),
            GoalSpec::PrecludeUniqueWinner(p) => write!(f, "not-unique:{p}"),
            GoalSpec::ScoreOrder(v) => {
                let parts: Vec<String> = v.iter().map(|(a, r, b)| format!("{a}{}{b}", r.symbol())).collect();
                write!(f, "order:{}", parts.join(","))
            }
            GoalSpec::ExactScaledScores(v) => {
                let parts: Vec<String> = v.iter().map(|(a, s)| format!("{a}={s}")).collect();
                write!(f, "scores:{}", parts.join(","))
            }
            GoalSpec::GroupDominance(a, b) => write!(f, "dominate:{}>{}", a.join(","), b.join(",")),
            GoalSpec::TablePredicate(_) => f.write_str("predicate"),
        }
    }
}

impl FromStr for GoalSpec {
    type Err = Error;

    /// The text form printed by `Display`; table predicates have none.
    fn from_str(s: &str) -> Result<Self> {
        let bad = |why: &str| Error::InvalidGoal(format!("{s:?}: {why}"));
        let (tag, body) = s.trim().split_once(':').ok_or_else(|| bad("expected kind:arguments"))?;
        let body = body.trim();
        let list = |text: &str| -> Result<Vec<String>> {
            let v: Vec<String> = text.split(',').map(|x| x.trim().to_string()).collect();
            if v.iter().any(String::is_empty) {
                return Err(bad("empty name"));
            }
            Ok(v)
        };
        let name = || -> Result<String> {
            if body.is_empty() || body.contains([',', ' ']) {
                Err(bad("expected one candidate"))
            } else {
                Ok(body.to_string())
            }
        };
        let goal = match tag.trim() {
            "winner" => GoalSpec::MakeWinner(name()?),
            "unique" => GoalSpec::MakeUniqueWinner(name()?),
            "not-winner" => GoalSpec::PrecludeWinner(name()?),
            "not-unique" => GoalSpec::PrecludeUniqueWinner(name()?),
            "order" => GoalSpec::ScoreOrder(
                list(body)?
                    .iter()
                    .map(|item| {
                        for r in [Relation::LessEq, Relation::Less, Relation::Equal] {
                            if let Some((a, b)) = item.split_once(r.symbol()) {
                                let (a, b) = (a.trim(), b.trim());
                                if a.is_empty() || b.is_empty() {
                                    return Err(bad("empty name"));
                                }
                                return Ok((a.to_string(), r, b.to_string()));
                            }
                        }
                        Err(bad("expected a<b, a<=b or a=b"))
                    })
                    .collect::<Result<_>>()?,
            ),
            "scores" => GoalSpec::ExactScaledScores(
                list(body)?
                    .iter()
                    .map(|item| {
                        let (a, v) = item.split_once('=').ok_or_else(|| bad("expected name=score"))?;
                        let v = v.trim().parse().map_err(|_| bad("bad score"))?;
                        Ok((a.trim().to_string(), v))
                    })
                    .collect::<Result<_>>()?,
            ),
            "dominate" => {
                let (a, b) = body.split_once('>').ok_or_else(|| bad("expected a,b>c,d"))?;
                GoalSpec::GroupDominance(list(a)?, list(b)?)
            }
            _ => return Err(bad("unknown kind")),
        };
        goal.validate()?;
        Ok(goal)
    }
}

#[derive(Clone, Debug)]
enum Compiled {
    /// (candidate, unique, preclude)
    Winner(usize, bool, bool),
    Order(Vec<(usize, Relation, usize)>),
    Exact(Vec<(usize, u64)>),
    Dominance(Vec<usize>, Vec<usize>),
    Predicate(TablePredicate),
}

/// A goal bound to candidate indices of a base table.
#[derive(Clone, Debug)]
pub(crate) struct CompiledGoal {
    kind: Compiled,
    absent: bool,
}

impl CompiledGoal {
    /// The distinguished candidate of winner goals.
    pub(crate) fn target(&self) -> Option<(usize, bool, bool)> {
        match self.kind {
            Compiled::Winner(p, unique, preclude) => Some((p, unique, preclude)),
            _ => None,
        }
    }

    pub(crate) fn needs_table(&self) -> bool {
        matches!(self.kind, Compiled::Predicate(_))
    }

    /// Evaluates the goal given the scores of the candidates still present
    /// (`None` marks an absent candidate). `table` yields the outcome table
    /// over the present candidates and is called only by table predicates.
    pub(crate) fn holds(&self, scores: &[Option<u64>], alpha: Alpha, table: &dyn Fn() -> OutcomeTable) -> bool {
        let get = |c: usize| scores[c];
        let all_present = |cs: &[usize]| cs.iter().all(|&c| scores[c].is_some());
        match &self.kind {
            Compiled::Winner(p, unique, preclude) => {
                let Some(sp) = get(*p) else {
                    return self.absent;
                };
                let mut top = true;
                for (c, s) in scores.iter().enumerate() {
                    if let Some(s) = *s {
                        if c != *p && (s > sp || (*unique && s == sp)) {
                            top = false;
                            break;
                        }
                    }
                }
                top != *preclude
            }
            Compiled::Order(rels) => {
                rels.iter().all(|&(a, r, b)| match (get(a), get(b)) {
                    (Some(x), Some(y)) => r.holds(x, y),
                    _ => false,
                })
            }
            Compiled::Exact(v) => v.iter().all(|&(a, s)| get(a) == Some(s)),
            Compiled::Dominance(a, b) => {
                all_present(a)
                    && all_present(b)
                    && a.iter().all(|&x| b.iter().all(|&y| get(x).unwrap() > get(y).unwrap()))
            }
            Compiled::Predicate(f) => (f.0)(&table(), alpha),
        }
    }
}

/// Evaluates `goal` on the scores and winners derived from `table`.
pub fn evaluate_goal(table: &OutcomeTable, alpha: Alpha, goal: &GoalSpec) -> Result<bool> {
    let compiled = goal.compile(table.candidates())?;
    let scores: Vec<Option<u64>> = scores_from_table(table, alpha).scaled().iter().map(|&s| Some(s)).collect();
    Ok(compiled.holds(&scores, alpha, &|| table.clone()))
}
