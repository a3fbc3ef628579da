//! Polynomial-time solvers for the vulnerable destructive cases and
//! fixed-parameter solvers for bounded candidate or voter counts.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive, Zero};

use crate::alpha::Alpha;
use crate::control::{ControlInstance, ControlKind, Decision, Direction, Witness};
use crate::election::{Ballot, Candidate, Election, Preference};
use crate::error::{Error, Result};
use crate::goal::{CompiledGoal, GoalSpec};
use crate::score::{Points, WinnerModel};
use crate::table::{outcome_table, Outcome, OutcomeTable};
use crate::two_stage::{candidate_final, TieRule};

/// Which count the FPT solvers are parameterized by.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BoundKind {
    /// Total candidates, spoilers included.
    Candidates,
    /// Total voter multiplicity, pool included.
    Voters,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BoundParameter {
    pub kind: BoundKind,
    pub j: usize,
}

impl BoundParameter {
    pub fn candidates(j: usize) -> Self {
        BoundParameter { kind: BoundKind::Candidates, j }
    }

    pub fn voters(j: usize) -> Self {
        BoundParameter { kind: BoundKind::Voters, j }
    }
}

impl fmt::Display for BoundParameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.kind {
            BoundKind::Candidates => "BC",
            BoundKind::Voters => "BV",
        };
        write!(f, "{tag}_{}", self.j)
    }
}

impl FromStr for BoundParameter {
    type Err = Error;

    /// `BC_3`, `BV_5` (the underscore is optional).
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::BoundViolated(format!("bad bound {s:?}"));
        let (kind, rest) = if let Some(r) = s.strip_prefix("BC") {
            (BoundKind::Candidates, r)
        } else if let Some(r) = s.strip_prefix("BV") {
            (BoundKind::Voters, r)
        } else {
            return Err(bad());
        };
        let j = rest.strip_prefix('_').unwrap_or(rest).parse().map_err(|_| bad())?;
        if j == 0 {
            return Err(bad());
        }
        Ok(BoundParameter { kind, j })
    }
}

/// The protected candidate and model of a destructive winner goal.
fn preclude_target(inst: &ControlInstance) -> Result<(usize, bool)> {
    let goal = inst.goal().compile(inst.election.candidates())?;
    match goal.target() {
        Some((q, unique, true)) => Ok((q, unique)),
        _ => Err(Error::WrongProblem(format!("{} needs a goal that precludes a winner", inst.problem))),
    }
}

fn wrong(inst: &ControlInstance, solver: &str) -> Error {
    Error::WrongProblem(format!("{solver} does not handle {}", inst.problem))
}

/// Destructive adding and deleting of candidates.
///
/// The score gap between a rival and the protected candidate changes by a
/// fixed amount per added or deleted candidate, so taking the largest
/// positive changes first is optimal for each rival.
pub fn greedy_destructive_candidate(inst: &ControlInstance) -> Result<Decision> {
    inst.validate()?;
    let kind = inst.problem.kind;
    if inst.problem.direction != Direction::Destructive
        || !matches!(kind, ControlKind::AddCandidatesUnlimited | ControlKind::AddCandidates | ControlKind::DeleteCandidates)
    {
        return Err(wrong(inst, "the greedy solver"));
    }
    let (q, unique) = preclude_target(inst)?;
    let pts = Points::new(&outcome_table(&inst.election), inst.alpha);
    let pt = |a: usize, b: usize| pts.get(a, b) as i64;
    let n = inst.election.len();
    let k = inst.budget();
    let p = inst.p_index()?;
    let done = |gap: i64| if unique { gap >= 0 } else { gap > 0 };

    // Takes the best gains until the rival gets ahead.
    let greedy = |mut gap: i64, mut gains: Vec<(i64, usize)>, budget: usize, mut chosen: Vec<usize>| {
        gains.retain(|g| g.0 > 0);
        gains.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
        for (g, x) in gains.into_iter().take(budget) {
            if done(gap) {
                break;
            }
            gap += g;
            chosen.push(x);
        }
        if done(gap) {
            chosen.sort_unstable();
            Some(chosen)
        } else {
            None
        }
    };

    if kind == ControlKind::DeleteCandidates {
        if q != p && k > 0 {
            return Ok(Decision::Yes(Witness::DeletedCandidates(vec![q])));
        }
        let score: Vec<i64> = (0..n).map(|c| pts.row(c).iter().sum::<u64>() as i64).collect();
        for c in (0..n).filter(|&c| c != q) {
            let gains = (0..n).filter(|&x| x != p && x != q && x != c).map(|x| (pt(q, x) - pt(c, x), x)).collect();
            if let Some(del) = greedy(score[c] - score[q], gains, k, vec![]) {
                return Ok(Decision::Yes(Witness::DeletedCandidates(del)));
            }
        }
        return Ok(Decision::No);
    }

    let reg = inst.registered();
    let spoilers = inst.spoilers.clone().unwrap_or_default();
    let mut present = vec![false; n];
    for &c in &reg {
        present[c] = true;
    }
    if !present[q] {
        return Ok(Decision::Yes(Witness::AddedCandidates(vec![])));
    }
    let base = |c: usize| reg.iter().filter(|&&x| x != c).map(|&x| pt(c, x)).sum::<i64>();
    for c in (0..n).filter(|&c| c != q) {
        let (gap, chosen, budget) = if present[c] {
            (base(c) - base(q), vec![], k)
        } else if k > 0 && spoilers.contains(&c) {
            (base(c) - base(q) - pt(q, c), vec![c], k - 1)
        } else {
            continue;
        };
        let gains = spoilers.iter().filter(|&&x| x != c).map(|&x| (pt(c, x) - pt(q, x), x)).collect();
        if let Some(add) = greedy(gap, gains, budget, chosen) {
            return Ok(Decision::Yes(Witness::AddedCandidates(add)));
        }
    }
    Ok(Decision::No)
}

/// Destructive (run-off) partition of candidates.
///
/// The protected candidate `q` is knocked out in its own part exactly when
/// some subset containing it has a rival ahead of it (TP) or level with it
/// (TE), and the best subset for a rival is found greedily. When no such
/// subset exists `q` wins every subset, so the final cannot hurt it either,
/// except that under TP with the unique-winner goal a final may contain a
/// co-winner; for that case the identity partition and the partitions
/// isolating one candidate are checked.
pub fn destructive_partition_candidate(inst: &ControlInstance) -> Result<Decision> {
    inst.validate()?;
    let (rule, runoff) = match inst.problem.kind {
        ControlKind::PartitionCandidates(r) if inst.problem.direction == Direction::Destructive => (r, false),
        ControlKind::RunoffPartitionCandidates(r) if inst.problem.direction == Direction::Destructive => (r, true),
        _ => return Err(wrong(inst, "the partition solver")),
    };
    let (q, unique) = preclude_target(inst)?;
    let pts = Points::new(&outcome_table(&inst.election), inst.alpha);
    let pt = |a: usize, b: usize| pts.get(a, b) as i64;
    let n = inst.election.len();
    let holds = |first: &[usize], second: &[usize]| {
        let fin = candidate_final(&pts, first, second, runoff, rule);
        if !fin.contains(&q) {
            return true;
        }
        let sq = pts.score_within(q, &fin);
        fin.iter().any(|&c| c != q && {
            let sc = pts.score_within(c, &fin);
            sc > sq || (unique && sc == sq)
        })
    };
    let yes = |first: Vec<usize>, second: Vec<usize>| Ok(Decision::Yes(Witness::CandidatePartition { first, second }));
    let all: Vec<usize> = (0..n).collect();
    if holds(&all, &[]) {
        return yes(all, vec![]);
    }
    let knocked_out = |gap: i64| match rule {
        TieRule::Promote => gap > 0,
        TieRule::Eliminate => gap >= 0,
    };
    for c in (0..n).filter(|&c| c != q) {
        let mut gap = pt(c, q) - pt(q, c);
        let mut part = vec![q, c];
        for x in (0..n).filter(|&x| x != q && x != c) {
            let d = pt(c, x) - pt(q, x);
            if d > 0 {
                gap += d;
                part.push(x);
            }
        }
        if knocked_out(gap) {
            part.sort_unstable();
            let rest: Vec<usize> = (0..n).filter(|x| !part.contains(x)).collect();
            if holds(&part, &rest) {
                return yes(part, rest);
            }
        }
    }
    if rule == TieRule::Promote && unique {
        if !runoff && holds(&[], &all) {
            return yes(vec![], all);
        }
        for c in (0..n).filter(|&c| c != q) {
            let rest: Vec<usize> = (0..n).filter(|&x| x != c).collect();
            if holds(&rest, &[c]) {
                return yes(rest, vec![c]);
            }
            if !runoff && holds(&[c], &rest) {
                return yes(vec![c], rest);
            }
        }
    }
    Ok(Decision::No)
}

#[derive(Clone, Copy)]
struct Move {
    flips: u64,
    gain: i64,
    towards_a: bool,
}

/// Flips needed to move the `a`-vs-`b` contest to outcome `o` (for `a`),
/// given `na` voters preferring `a` and `nb` preferring `b`; `None` when
/// unreachable. The second value is the flip direction: `true` moves voters
/// towards `a`.
fn contest_cost(na: &BigUint, nb: &BigUint, o: Outcome) -> Option<(BigUint, bool)> {
    let two = BigUint::from(2u32);
    match o {
        Outcome::Win if na > nb => Some((BigUint::zero(), true)),
        Outcome::Win => {
            let x = (nb - na) / &two + 1u32;
            (x <= *nb).then_some((x, true))
        }
        Outcome::Loss if nb > na => Some((BigUint::zero(), false)),
        Outcome::Loss => {
            let x = (na - nb) / &two + 1u32;
            (x <= *na).then_some((x, false))
        }
        Outcome::Tie => {
            if na >= nb {
                let d = na - nb;
                (&d % &two).is_zero().then(|| (d / &two, false))
            } else {
                let d = nb - na;
                (&d % &two).is_zero().then(|| (d / &two, true))
            }
        }
    }
}

/// Destructive microbribery: precluding `p` by flipping at most `k`
/// preference-table entries.
///
/// For each rival only the contests involving `p` or the rival matter.
/// Every such contest can be driven to each reachable outcome at a known
/// flip cost, changing the scaled score gap by a known amount; a knapsack
/// over gap values finds the cheapest combination.
pub fn destructive_microbribery_dp(election: &Election, alpha: Alpha, p: &str, k: usize, model: WinnerModel) -> Result<Decision> {
    if !election.all_tables() {
        return Err(Error::NotIrrational);
    }
    let n = election.len();
    let pi = election.index_of(p)?;
    let ballots = election.to_ballots();
    let mut tally = vec![BigUint::zero(); n * n];
    for b in &ballots {
        for a in 0..n {
            for c in 0..n {
                if a != c && b.prefers(a, c) {
                    tally[a * n + c] += &b.multiplicity;
                }
            }
        }
    }
    let cap = k as u64 + 1;
    let (t, s) = (alpha.den() as i64, alpha.num() as i64);
    let points = |o: Outcome| match o {
        Outcome::Win => t,
        Outcome::Tie => s,
        Outcome::Loss => 0,
    };
    // A contest (a, b) seen from `a`, with the gap contribution of each outcome.
    struct Item {
        a: usize,
        b: usize,
        options: Vec<Move>,
    }
    let target = if model == WinnerModel::Unique { 0 } else { 1 };
    let outcomes = [Outcome::Win, Outcome::Tie, Outcome::Loss];

    for c in (0..n).filter(|&c| c != pi) {
        let mut items = Vec::new();
        let mut push = |a: usize, b: usize, gain: &dyn Fn(Outcome) -> i64| {
            let options = outcomes
                .iter()
                .filter_map(|&o| {
                    let (cost, towards_a) = contest_cost(&tally[a * n + b], &tally[b * n + a], o)?;
                    let flips = cost.to_u64().unwrap_or(u64::MAX);
                    (flips < cap).then_some(Move { flips, gain: gain(o), towards_a })
                })
                .collect();
            items.push(Item { a, b, options });
        };
        push(c, pi, &|o| points(o) - points(o.reverse()));
        for x in (0..n).filter(|&x| x != pi && x != c) {
            push(c, x, &|o| points(o));
            push(pi, x, &|o| -points(o));
        }
        let lo = -(t * (n as i64 - 1));
        let width = (2 * t * (n as i64 - 1) + 1) as usize;
        let mut dp = vec![u64::MAX; width];
        // Gap 0 before any contest is chosen.
        dp[(-lo) as usize] = 0;
        let mut choice: Vec<Vec<(u8, usize)>> = Vec::with_capacity(items.len());
        for it in &items {
            let mut next = vec![u64::MAX; width];
            let mut pick = vec![(u8::MAX, 0usize); width];
            for (g, &cost) in dp.iter().enumerate() {
                if cost == u64::MAX {
                    continue;
                }
                for (oi, mv) in it.options.iter().enumerate() {
                    let ng = g as i64 + mv.gain;
                    if ng < 0 || ng >= width as i64 {
                        continue;
                    }
                    let nc = cost + mv.flips;
                    if nc < next[ng as usize] {
                        next[ng as usize] = nc;
                        pick[ng as usize] = (oi as u8, g);
                    }
                }
            }
            dp = next;
            choice.push(pick);
        }
        let best = (0..width)
            .filter(|&g| g as i64 + lo >= target && dp[g] <= k as u64)
            .min_by_key(|&g| (dp[g], g));
        let Some(mut g) = best else {
            continue;
        };
        let mut chosen = Vec::new();
        for (it, pick) in items.iter().zip(&choice).rev() {
            let (oi, prev) = pick[g];
            chosen.push((it.a, it.b, it.options[oi as usize]));
            g = prev;
        }
        return Ok(Decision::Yes(Witness::Flips(realize_flips(&ballots, &chosen)?)));
    }
    Ok(Decision::No)
}

/// Concrete entry flips: for each contest, the first voters on the losing
/// side of the intended direction.
fn realize_flips(ballots: &[Ballot], chosen: &[(usize, usize, Move)]) -> Result<Vec<(usize, usize, usize)>> {
    let mut flips = Vec::new();
    for &(a, b, Move { towards_a, flips: count, .. }) in chosen {
        if count == 0 {
            continue;
        }
        // Voters currently preferring the side that loses support.
        let (from, to) = if towards_a { (b, a) } else { (a, b) };
        let mut left = count;
        let mut offset: u128 = 0;
        for bal in ballots {
            if left == 0 {
                break;
            }
            let m = bal.multiplicity.to_u128().ok_or_else(|| Error::BudgetExceeded("voter index overflow".into()))?;
            if bal.prefers(from, to) {
                let take = (left as u128).min(m);
                for j in 0..take {
                    let idx = usize::try_from(offset + j).map_err(|_| Error::BudgetExceeded("voter index overflow".into()))?;
                    flips.push((idx, a.min(b), a.max(b)));
                }
                left -= take as u64;
            }
            offset += m;
        }
    }
    flips.sort_unstable();
    Ok(flips)
}

fn check_bound(inst: &ControlInstance, bound: &BoundParameter) -> Result<()> {
    match bound.kind {
        BoundKind::Candidates => {
            if inst.election.len() > bound.j {
                return Err(Error::BoundViolated(format!("{} candidates exceed {bound}", inst.election.len())));
            }
        }
        BoundKind::Voters => {
            let mut total = inst.election.total_multiplicity();
            for b in inst.voter_pool.iter().flatten() {
                total += &b.multiplicity;
            }
            if total > BigUint::from(bound.j) {
                return Err(Error::BoundViolated(format!("{total} voters exceed {bound}")));
            }
        }
    }
    Ok(())
}

/// Ballot types with their lines and total counts.
struct Types {
    prefs: Vec<Preference>,
    lines: Vec<Vec<usize>>,
    counts: Vec<BigUint>,
}

impl Types {
    fn new(ballots: &[Ballot]) -> Self {
        let mut t = Types { prefs: vec![], lines: vec![], counts: vec![] };
        for (i, b) in ballots.iter().enumerate() {
            match t.prefs.iter().position(|p| *p == b.preference) {
                Some(j) => {
                    t.lines[j].push(i);
                    t.counts[j] += &b.multiplicity;
                }
                None => {
                    t.prefs.push(b.preference.clone());
                    t.lines.push(vec![i]);
                    t.counts.push(b.multiplicity.clone());
                }
            }
        }
        t
    }

    /// Spreads per-type amounts over the type's lines, in line order.
    fn per_line(&self, ballots: &[Ballot], amounts: &[BigUint]) -> Vec<BigUint> {
        let mut out = vec![BigUint::zero(); ballots.len()];
        for (lines, amount) in self.lines.iter().zip(amounts) {
            let mut left = amount.clone();
            for &l in lines {
                let take = (&ballots[l].multiplicity).min(&left).clone();
                left -= &take;
                out[l] = take;
            }
        }
        out
    }
}

/// Signed head-to-head margins `N(a,b) − N(b,a)` for every pair `a < b`.
fn margins(types: &Types, n: usize) -> Vec<BigInt> {
    let mut m = vec![BigInt::zero(); n * (n.saturating_sub(1)) / 2];
    for (pref, count) in types.prefs.iter().zip(&types.counts) {
        let c = BigInt::from(count.clone());
        for (i, (a, b)) in pairs(n).enumerate() {
            if pref.prefers(a, b) {
                m[i] += &c;
            } else {
                m[i] -= &c;
            }
        }
    }
    m
}

fn pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |a| (a + 1..n).map(move |b| (a, b)))
}

/// Outcome of `a` against `b` under the per-pair pattern.
fn pattern_outcome(pattern: &[Outcome], n: usize, a: usize, b: usize) -> Outcome {
    if a < b {
        pattern[pair_slot(n, a, b)]
    } else {
        pattern[pair_slot(n, b, a)].reverse()
    }
}

fn pair_slot(n: usize, a: usize, b: usize) -> usize {
    a * n - a * (a + 1) / 2 + (b - a - 1)
}

fn outcome_of(margin: &BigInt) -> Outcome {
    match margin.sign() {
        num_bigint::Sign::Plus => Outcome::Win,
        num_bigint::Sign::NoSign => Outcome::Tie,
        num_bigint::Sign::Minus => Outcome::Loss,
    }
}

/// Points matrix and goal evaluation over a fixed candidate set.
struct Scorer<'a> {
    n: usize,
    alpha: Alpha,
    candidates: &'a [Candidate],
    goal: CompiledGoal,
}

impl Scorer<'_> {
    fn points(&self, o: Outcome) -> u64 {
        match o {
            Outcome::Win => self.alpha.win_points(),
            Outcome::Tie => self.alpha.tie_points(),
            Outcome::Loss => 0,
        }
    }

    /// Scores of the members of `mask` under the pattern.
    fn scores(&self, pattern: &[Outcome], mask: u64) -> Vec<Option<u64>> {
        (0..self.n)
            .map(|c| {
                (mask >> c & 1 == 1).then(|| {
                    (0..self.n)
                        .filter(|&x| x != c && mask >> x & 1 == 1)
                        .map(|x| self.points(pattern_outcome(pattern, self.n, c, x)))
                        .sum()
                })
            })
            .collect()
    }

    fn table(&self, pattern: &[Outcome], mask: u64) -> OutcomeTable {
        let keep: Vec<usize> = (0..self.n).filter(|&c| mask >> c & 1 == 1).collect();
        let cands = keep.iter().map(|&c| self.candidates[c].clone()).collect();
        OutcomeTable::from_results(cands, |a, b| pattern_outcome(pattern, self.n, keep[a], keep[b]))
    }

    fn holds(&self, pattern: &[Outcome], mask: u64) -> bool {
        self.goal.holds(&self.scores(pattern, mask), self.alpha, &|| self.table(pattern, mask))
    }

    /// Survivors of the members of `mask` as a mask.
    fn survivors(&self, pattern: &[Outcome], mask: u64, rule: TieRule) -> u64 {
        let scores = self.scores(pattern, mask);
        let Some(best) = scores.iter().flatten().max().copied() else {
            return 0;
        };
        let top: u64 = (0..self.n).filter(|&c| scores[c] == Some(best)).fold(0, |m, c| m | 1 << c);
        match rule {
            TieRule::Eliminate if top.count_ones() > 1 => 0,
            _ => top,
        }
    }
}

const MASK_LIMIT: usize = 30;

/// Masks over `0..len` with at most `max` bits, by size then value.
fn masks_by_size(len: usize, max: usize) -> Vec<u64> {
    let mut v: Vec<u64> = (0u64..1 << len).filter(|m| m.count_ones() as usize <= max).collect();
    v.sort_by_key(|&m| (m.count_ones(), m));
    v
}

fn bits(mask: u64, items: &[usize]) -> Vec<usize> {
    items.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &c)| c).collect()
}

/// Candidate control for a bounded number of candidates, under any goal.
pub fn fpt_candidate_control(inst: &ControlInstance, bound: &BoundParameter, goal: &GoalSpec) -> Result<Decision> {
    let inst = inst.clone().with_goal(goal.clone());
    inst.validate()?;
    if !inst.problem.is_candidate_control() {
        return Err(wrong(&inst, "the candidate-bounded solver"));
    }
    if bound.kind != BoundKind::Candidates {
        return Err(Error::BoundViolated(format!("candidate control takes a candidate bound, not {bound}")));
    }
    check_bound(&inst, bound)?;
    let n = inst.election.len();
    if n > MASK_LIMIT {
        return Err(Error::BudgetExceeded(format!("{n} candidates")));
    }
    let types = Types::new(&inst.election.to_ballots());
    let pattern: Vec<Outcome> = margins(&types, n).iter().map(outcome_of).collect();
    let scorer = Scorer {
        n,
        alpha: inst.alpha,
        candidates: inst.election.candidates(),
        goal: goal.compile(inst.election.candidates())?,
    };
    let full: u64 = (1u64 << n) - 1;
    let k = inst.budget();
    let p = inst.p_index()?;
    match inst.problem.kind {
        ControlKind::AddCandidatesUnlimited | ControlKind::AddCandidates => {
            let reg = inst.registered().iter().fold(0u64, |m, &c| m | 1 << c);
            let spoilers = inst.spoilers.clone().unwrap_or_default();
            for m in masks_by_size(spoilers.len(), k) {
                let add = bits(m, &spoilers);
                let mask = add.iter().fold(reg, |m, &c| m | 1 << c);
                if scorer.holds(&pattern, mask) {
                    let mut add = add;
                    add.sort_unstable();
                    return Ok(Decision::Yes(Witness::AddedCandidates(add)));
                }
            }
        }
        ControlKind::DeleteCandidates => {
            let others: Vec<usize> = (0..n).filter(|&c| c != p).collect();
            for m in masks_by_size(others.len(), k) {
                let del = bits(m, &others);
                let mask = del.iter().fold(full, |m, &c| m & !(1 << c));
                if scorer.holds(&pattern, mask) {
                    return Ok(Decision::Yes(Witness::DeletedCandidates(del)));
                }
            }
        }
        ControlKind::PartitionCandidates(rule) | ControlKind::RunoffPartitionCandidates(rule) => {
            let runoff = matches!(inst.problem.kind, ControlKind::RunoffPartitionCandidates(_));
            for second in 0..=full {
                let first = full & !second;
                let mut fin = scorer.survivors(&pattern, first, rule);
                fin |= if runoff { scorer.survivors(&pattern, second, rule) } else { second };
                if scorer.holds(&pattern, fin) {
                    let all: Vec<usize> = (0..n).collect();
                    return Ok(Decision::Yes(Witness::CandidatePartition {
                        first: bits(first, &all),
                        second: bits(second, &all),
                    }));
                }
            }
        }
        _ => unreachable!("checked above"),
    }
    Ok(Decision::No)
}

/// Voter control (adding, deleting, partitioning) for a bounded number of
/// voters or candidates, under any goal.
///
/// With a voter bound every set of unit voters is tried. With a candidate
/// bound, ballots are grouped into types and, for every outcome pattern that
/// satisfies the goal, a depth-first integer search looks for per-type
/// counts producing that pattern.
pub fn fpt_voter_control(inst: &ControlInstance, bound: &BoundParameter, goal: &GoalSpec) -> Result<Decision> {
    let inst = inst.clone().with_goal(goal.clone());
    inst.validate()?;
    if !matches!(
        inst.problem.kind,
        ControlKind::AddVoters | ControlKind::DeleteVoters | ControlKind::PartitionVoters(_)
    ) {
        return Err(wrong(&inst, "the bounded voter-control solver"));
    }
    check_bound(&inst, bound)?;
    let n = inst.election.len();
    if n > MASK_LIMIT {
        return Err(Error::BudgetExceeded(format!("{n} candidates")));
    }
    let scorer = Scorer {
        n,
        alpha: inst.alpha,
        candidates: inst.election.candidates(),
        goal: goal.compile(inst.election.candidates())?,
    };
    match bound.kind {
        BoundKind::Voters => by_units(&inst, &scorer),
        BoundKind::Candidates => by_types(&inst, &scorer),
    }
}

fn by_units(inst: &ControlInstance, scorer: &Scorer) -> Result<Decision> {
    let n = scorer.n;
    let registered = inst.election.to_ballots();
    let adding = inst.problem.kind == ControlKind::AddVoters;
    let lines: &[Ballot] = if adding { inst.voter_pool.as_deref().unwrap_or(&[]) } else { &registered };
    // Unit voters as line indices.
    let mut units = Vec::new();
    for (i, b) in lines.iter().enumerate() {
        let m = b.multiplicity.to_usize().unwrap_or(usize::MAX);
        units.extend(std::iter::repeat_n(i, m));
    }
    if units.len() > MASK_LIMIT {
        return Err(Error::BudgetExceeded(format!("{} unit voters", units.len())));
    }
    let all = full_pattern_margins(&registered, n);
    let unit_margin: Vec<Vec<i64>> = lines
        .iter()
        .map(|b| pairs(n).map(|(a, c)| if b.prefers(a, c) { 1 } else { -1 }).collect())
        .collect();
    let counts = |mask: u64| {
        let mut c = vec![BigUint::zero(); lines.len()];
        for (u, &line) in units.iter().enumerate() {
            if mask >> u & 1 == 1 {
                c[line] += 1u32;
            }
        }
        c
    };
    let sum_units = |mask: u64| {
        let mut m = vec![0i64; all.len()];
        for (u, &line) in units.iter().enumerate() {
            if mask >> u & 1 == 1 {
                for (x, d) in m.iter_mut().zip(&unit_margin[line]) {
                    *x += d;
                }
            }
        }
        m
    };
    let full: u64 = (1u64 << n) - 1;
    match inst.problem.kind {
        ControlKind::AddVoters | ControlKind::DeleteVoters => {
            for mask in masks_by_size(units.len(), inst.budget()) {
                let delta = sum_units(mask);
                let pattern: Vec<Outcome> = all
                    .iter()
                    .zip(&delta)
                    .map(|(m, d)| outcome_of(&if adding { m + d } else { m - d }))
                    .collect();
                if scorer.holds(&pattern, full) {
                    let c = counts(mask);
                    return Ok(Decision::Yes(if adding { Witness::AddedVoters(c) } else { Witness::DeletedVoters(c) }));
                }
            }
        }
        ControlKind::PartitionVoters(rule) => {
            let whole: Vec<Outcome> = all.iter().map(outcome_of).collect();
            for mask in 0u64..1 << units.len() {
                let first = sum_units(mask);
                let p1: Vec<Outcome> = first.iter().map(|&d| outcome_of(&BigInt::from(d))).collect();
                let p2: Vec<Outcome> = all.iter().zip(&first).map(|(m, d)| outcome_of(&(m - d))).collect();
                let fin = scorer.survivors(&p1, full, rule) | scorer.survivors(&p2, full, rule);
                if scorer.holds(&whole, fin) {
                    return Ok(Decision::Yes(Witness::VoterPartition(counts(mask))));
                }
            }
        }
        _ => unreachable!(),
    }
    Ok(Decision::No)
}

fn full_pattern_margins(ballots: &[Ballot], n: usize) -> Vec<BigInt> {
    margins(&Types::new(ballots), n)
}

/// Enumerates all `3^len` outcome patterns in lexicographic order.
fn for_each_pattern(len: usize, f: &mut dyn FnMut(&[Outcome]) -> Result<bool>) -> Result<bool> {
    let mut pat = vec![Outcome::Win; len];
    loop {
        if f(&pat)? {
            return Ok(true);
        }
        let mut i = len;
        loop {
            if i == 0 {
                return Ok(false);
            }
            i -= 1;
            pat[i] = match pat[i] {
                Outcome::Win => Outcome::Tie,
                Outcome::Tie => Outcome::Loss,
                Outcome::Loss => Outcome::Win,
            };
            if pat[i] != Outcome::Win {
                break;
            }
        }
    }
}

const PATTERN_LIMIT: u64 = 1 << 22;
const SEARCH_NODES: u64 = 1 << 26;

/// Interval `[lo, hi]` of margins producing outcome `o` (`None` = unbounded).
fn margin_range(o: Outcome) -> (Option<BigInt>, Option<BigInt>) {
    match o {
        Outcome::Win => (Some(BigInt::one()), None),
        Outcome::Tie => (Some(BigInt::zero()), Some(BigInt::zero())),
        Outcome::Loss => (None, Some(-BigInt::one())),
    }
}

fn intersect(a: (Option<BigInt>, Option<BigInt>), b: (Option<BigInt>, Option<BigInt>)) -> (Option<BigInt>, Option<BigInt>) {
    let lo = match (a.0, b.0) {
        (Some(x), Some(y)) => Some(x.max(y)),
        (x, None) | (None, x) => x,
    };
    let hi = match (a.1, b.1) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) | (None, x) => x,
    };
    (lo, hi)
}

/// Integer search: `0 <= x_i <= upper_i`, optionally `sum x <= cap`, and
/// for every constraint `c`: `lo_c <= offset_c + sum_i sign_ic x_i <= hi_c`.
struct Feasibility<'a> {
    upper: &'a [BigInt],
    /// `sign[i][c]` is +1 or -1.
    sign: &'a [Vec<i8>],
    cap: Option<BigInt>,
    nodes: u64,
}

impl Feasibility<'_> {
    fn solve(&mut self, offset: &[BigInt], bounds: &[(Option<BigInt>, Option<BigInt>)]) -> Result<Option<Vec<BigInt>>> {
        let vars = self.upper.len();
        let cons = offset.len();
        // Remaining positive and negative reach of variables i.. per constraint.
        let mut pos = vec![vec![BigInt::zero(); cons]; vars + 1];
        let mut neg = vec![vec![BigInt::zero(); cons]; vars + 1];
        for i in (0..vars).rev() {
            for c in 0..cons {
                pos[i][c] = pos[i + 1][c].clone();
                neg[i][c] = neg[i + 1][c].clone();
                if self.sign[i][c] > 0 {
                    pos[i][c] += &self.upper[i];
                } else {
                    neg[i][c] += &self.upper[i];
                }
            }
        }
        let mut x = Vec::with_capacity(vars);
        let mut cur = offset.to_vec();
        let found = self.dfs(0, &mut x, &mut cur, &BigInt::zero(), bounds, &pos, &neg)?;
        Ok(found.then_some(x))
    }

    #[allow(clippy::too_many_arguments)]
    fn dfs(
        &mut self,
        i: usize,
        x: &mut Vec<BigInt>,
        cur: &mut Vec<BigInt>,
        used: &BigInt,
        bounds: &[(Option<BigInt>, Option<BigInt>)],
        pos: &[Vec<BigInt>],
        neg: &[Vec<BigInt>],
    ) -> Result<bool> {
        self.nodes += 1;
        if self.nodes > SEARCH_NODES {
            return Err(Error::BudgetExceeded("integer search node limit".into()));
        }
        if i == self.upper.len() {
            return Ok(bounds.iter().zip(cur.iter()).all(|((lo, hi), v)| {
                lo.as_ref().is_none_or(|l| v >= l) && hi.as_ref().is_none_or(|h| v <= h)
            }));
        }
        let mut lo = BigInt::zero();
        let mut hi = self.upper[i].clone();
        if let Some(cap) = &self.cap {
            hi = hi.min(cap - used);
        }
        for (c, (blo, bhi)) in bounds.iter().enumerate() {
            // After x_i, the rest can move the value by [-neg, +pos].
            let s = self.sign[i][c];
            let (rp, rn) = (&pos[i + 1][c], &neg[i + 1][c]);
            // need: blo <= cur + s x + rest, rest ∈ [-rn, rp]
            if let Some(l) = blo {
                let need = l - &cur[c] - rp;
                if s > 0 {
                    lo = lo.max(need);
                } else {
                    hi = hi.min(-need);
                }
            }
            if let Some(h) = bhi {
                let room = h - &cur[c] + rn;
                if s > 0 {
                    hi = hi.min(room);
                } else {
                    lo = lo.max(-room);
                }
            }
        }
        let mut v = lo;
        while v <= hi {
            for c in 0..cur.len() {
                if self.sign[i][c] > 0 {
                    cur[c] += &v;
                } else {
                    cur[c] -= &v;
                }
            }
            x.push(v.clone());
            if self.dfs(i + 1, x, cur, &(used + &v), bounds, pos, neg)? {
                return Ok(true);
            }
            x.pop();
            for c in 0..cur.len() {
                if self.sign[i][c] > 0 {
                    cur[c] -= &v;
                } else {
                    cur[c] += &v;
                }
            }
            v += 1;
        }
        Ok(false)
    }
}

fn by_types(inst: &ControlInstance, scorer: &Scorer) -> Result<Decision> {
    let n = scorer.n;
    let registered = inst.election.to_ballots();
    let reg_types = Types::new(&registered);
    let base = margins(&reg_types, n);
    let npairs = base.len();
    let full: u64 = (1u64 << n) - 1;
    let patterns = 3u64.checked_pow(npairs as u32).unwrap_or(u64::MAX);
    let signs = |t: &Types| -> Vec<Vec<i8>> {
        t.prefs.iter().map(|p| pairs(n).map(|(a, b)| if p.prefers(a, b) { 1 } else { -1 }).collect()).collect()
    };
    let to_big = |v: &[BigInt]| -> Vec<BigUint> { v.iter().map(|x| x.to_biguint().expect("nonnegative")).collect() };
    match inst.problem.kind {
        ControlKind::AddVoters | ControlKind::DeleteVoters => {
            if patterns > PATTERN_LIMIT {
                return Err(Error::BudgetExceeded(format!("{patterns} outcome patterns")));
            }
            let adding = inst.problem.kind == ControlKind::AddVoters;
            let pool: Vec<Ballot> = inst.voter_pool.clone().unwrap_or_default();
            let act_types = if adding { Types::new(&pool) } else { Types::new(&registered) };
            let upper: Vec<BigInt> = act_types.counts.iter().map(|c| BigInt::from(c.clone())).collect();
            let mut sign = signs(&act_types);
            if !adding {
                for row in &mut sign {
                    row.iter_mut().for_each(|s| *s = -*s);
                }
            }
            let mut search = Feasibility { upper: &upper, sign: &sign, cap: Some(BigInt::from(inst.budget())), nodes: 0 };
            let mut found = None;
            for_each_pattern(npairs, &mut |pat| {
                if !scorer.holds(pat, full) {
                    return Ok(false);
                }
                let bounds: Vec<_> = pat.iter().map(|&o| margin_range(o)).collect();
                if let Some(x) = search.solve(&base, &bounds)? {
                    found = Some(x);
                    return Ok(true);
                }
                Ok(false)
            })?;
            Ok(match found {
                None => Decision::No,
                Some(x) => {
                    let lines = if adding { &pool } else { &registered };
                    let per_line = act_types.per_line(lines, &to_big(&x));
                    Decision::Yes(if adding { Witness::AddedVoters(per_line) } else { Witness::DeletedVoters(per_line) })
                }
            })
        }
        ControlKind::PartitionVoters(rule) => {
            if patterns.saturating_mul(patterns) > PATTERN_LIMIT {
                return Err(Error::BudgetExceeded(format!("{patterns}² outcome pattern pairs")));
            }
            let whole: Vec<Outcome> = base.iter().map(outcome_of).collect();
            let upper: Vec<BigInt> = reg_types.counts.iter().map(|c| BigInt::from(c.clone())).collect();
            let sign = signs(&reg_types);
            let mut search = Feasibility { upper: &upper, sign: &sign, cap: None, nodes: 0 };
            let zero = vec![BigInt::zero(); npairs];
            let mut found = None;
            for_each_pattern(npairs, &mut |p1| {
                let w1 = scorer.survivors(p1, full, rule);
                let b1: Vec<_> = p1.iter().map(|&o| margin_range(o)).collect();
                for_each_pattern(npairs, &mut |p2| {
                    let fin = w1 | scorer.survivors(p2, full, rule);
                    if !scorer.holds(&whole, fin) {
                        return Ok(false);
                    }
                    // The second part's margin is base − first margin.
                    let bounds: Vec<_> = b1
                        .iter()
                        .zip(p2)
                        .zip(&base)
                        .map(|((r1, &o2), b)| {
                            let (lo2, hi2) = margin_range(o2);
                            intersect(r1.clone(), (hi2.map(|h| b - h), lo2.map(|l| b - l)))
                        })
                        .collect();
                    if bounds.iter().any(|(lo, hi)| matches!((lo, hi), (Some(l), Some(h)) if l > h)) {
                        return Ok(false);
                    }
                    if let Some(x) = search.solve(&zero, &bounds)? {
                        found = Some(x);
                        return Ok(true);
                    }
                    Ok(false)
                })
            })?;
            Ok(match found {
                None => Decision::No,
                Some(x) => Decision::Yes(Witness::VoterPartition(reg_types.per_line(&registered, &to_big(&x)))),
            })
        }
        _ => unreachable!(),
    }
}
