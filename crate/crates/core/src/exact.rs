//! Exhaustive decision procedures for every control, bribery and
//! microbribery problem.
//!
//! Action spaces are enumerated outright while they fit
//! [`SizeLimits::max_subsets`]. Larger constructive deletion and run-off
//! partition instances with a winner goal go to complete branch-and-bound
//! searches instead, bounded by [`SizeLimits::max_nodes`].

use num_bigint::BigUint;
use num_traits::ToPrimitive;

use crate::alpha::Alpha;
use crate::control::{ControlInstance, ControlKind, Decision, Direction, Problem, Witness};
use crate::election::{Ballot, Election, PairTable, Preference};
use crate::error::{Error, Result};
use crate::goal::CompiledGoal;
use crate::score::{argmax, scores_from_table, Points, WinnerModel};
use crate::table::{outcome_table, OutcomeTable};
use crate::two_stage::{candidate_final, survivors, TieRule};

/// Guards for the exponential searches.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SizeLimits {
    pub max_candidates: usize,
    /// Unit voters, for problems that act on individual voters.
    pub max_voters: usize,
    /// Actions enumerated.
    pub max_subsets: u64,
    /// Nodes visited by the branch-and-bound searches.
    pub max_nodes: u64,
}

impl Default for SizeLimits {
    fn default() -> Self {
        SizeLimits {
            max_candidates: 4096,
            max_voters: 64,
            max_subsets: 1 << 24,
            max_nodes: 1 << 26,
        }
    }
}

/// Above this many actions, winner goals go to branch-and-bound even when
/// enumeration would be allowed.
const ENUMERATION_CUTOFF: u128 = 1 << 16;

fn over(what: impl std::fmt::Display) -> Error {
    Error::BudgetExceeded(what.to_string())
}

/// `sum_{i <= r} C(n, i)`, saturating.
pub(crate) fn binomial_prefix(n: usize, r: usize) -> u128 {
    let mut total: u128 = 0;
    let mut c: u128 = 1;
    for i in 0..=r.min(n) {
        total = total.saturating_add(c);
        c = c.saturating_mul((n - i) as u128) / (i as u128 + 1);
    }
    total
}

/// Calls `f` on every `r`-subset of `0..n` in lexicographic order until it
/// returns true.
pub(crate) fn for_each_combination(n: usize, r: usize, mut f: impl FnMut(&[usize]) -> bool) -> bool {
    if r > n {
        return false;
    }
    let mut idx: Vec<usize> = (0..r).collect();
    loop {
        if f(&idx) {
            return true;
        }
        let mut i = r;
        loop {
            if i == 0 {
                return false;
            }
            i -= 1;
            if idx[i] != i + n - r {
                break;
            }
            if i == 0 {
                return false;
            }
        }
        if idx[i] == i + n - r {
            return false;
        }
        idx[i] += 1;
        for j in i + 1..r {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

pub fn solve_control_exact(inst: &ControlInstance, limits: &SizeLimits) -> Result<Decision> {
    inst.validate()?;
    if inst.election.len() > limits.max_candidates {
        return Err(over(format!("{} candidates exceed {}", inst.election.len(), limits.max_candidates)));
    }
    match inst.problem.kind {
        ControlKind::AddCandidatesUnlimited | ControlKind::AddCandidates => add_candidates(inst, limits),
        ControlKind::DeleteCandidates => delete_candidates(inst, limits),
        ControlKind::PartitionCandidates(rule) => partition_candidates(inst, rule, false, limits),
        ControlKind::RunoffPartitionCandidates(rule) => partition_candidates(inst, rule, true, limits),
        ControlKind::AddVoters | ControlKind::DeleteVoters => voter_subsets(inst, limits),
        ControlKind::PartitionVoters(rule) => partition_voters(inst, rule, limits),
        ControlKind::Bribery => bribery(inst, limits),
        ControlKind::Microbribery => microbribery(inst, limits),
    }
}

#[allow(clippy::too_many_arguments)]
pub fn solve_bribery_exact(
    election: &Election,
    alpha: Alpha,
    p: &str,
    k: usize,
    direction: Direction,
    model: WinnerModel,
    limits: &SizeLimits,
) -> Result<Decision> {
    let inst = ControlInstance::new(Problem::new(direction, ControlKind::Bribery), model, alpha, election.clone(), p).with_k(k);
    solve_control_exact(&inst, limits)
}

#[allow(clippy::too_many_arguments)]
pub fn solve_microbribery_exact(
    election: &Election,
    alpha: Alpha,
    p: &str,
    k: usize,
    direction: Direction,
    model: WinnerModel,
    limits: &SizeLimits,
) -> Result<Decision> {
    let inst =
        ControlInstance::new(Problem::new(direction, ControlKind::Microbribery), model, alpha, election.clone(), p).with_k(k);
    solve_control_exact(&inst, limits)
}

/// Goal evaluation over subsets of a fixed candidate universe.
pub(crate) struct Cands<'a> {
    pub(crate) inst: &'a ControlInstance,
    pub(crate) table: OutcomeTable,
    pub(crate) pts: Points,
    pub(crate) goal: CompiledGoal,
}

impl<'a> Cands<'a> {
    pub(crate) fn new(inst: &'a ControlInstance) -> Result<Self> {
        let table = outcome_table(&inst.election);
        let pts = Points::new(&table, inst.alpha);
        let goal = inst.goal().compile(inst.election.candidates())?;
        Ok(Cands { inst, table, pts, goal })
    }

    pub(crate) fn holds(&self, scores: &[Option<u64>]) -> bool {
        self.goal.holds(scores, self.inst.alpha, &|| {
            let keep: Vec<usize> = (0..scores.len()).filter(|&c| scores[c].is_some()).collect();
            self.table.restrict(&keep)
        })
    }

    pub(crate) fn holds_members(&self, members: &[usize]) -> bool {
        let mut scores = vec![None; self.pts.len()];
        for &c in members {
            scores[c] = Some(self.pts.score_within(c, members));
        }
        self.holds(&scores)
    }

    /// Whether the final round of the partition satisfies the goal.
    pub(crate) fn partition_holds(&self, first: &[usize], second: &[usize], runoff: bool, rule: TieRule) -> bool {
        self.holds_members(&candidate_final(&self.pts, first, second, runoff, rule))
    }

    /// Constructive winner goal: `(target, unique)`.
    pub(crate) fn winner_target(&self) -> Option<(usize, bool)> {
        match self.goal.target() {
            Some((q, unique, false)) if !self.goal.needs_table() => Some((q, unique)),
            _ => None,
        }
    }
}

fn add_candidates(inst: &ControlInstance, limits: &SizeLimits) -> Result<Decision> {
    let ctx = Cands::new(inst)?;
    let n = inst.election.len();
    let reg = inst.registered();
    let spoilers = inst.spoilers.clone().unwrap_or_default();
    let kmax = inst.budget().min(spoilers.len());
    let count = binomial_prefix(spoilers.len(), kmax);
    if count > limits.max_subsets as u128 {
        return Err(over(format!("{count} spoiler subsets")));
    }
    let base: Vec<u64> = (0..n).map(|c| ctx.pts.score_within(c, &reg)).collect();
    let mut scores = vec![None; n];
    for r in 0..=kmax {
        let mut found = None;
        for_each_combination(spoilers.len(), r, |idx| {
            let chosen: Vec<usize> = idx.iter().map(|&i| spoilers[i]).collect();
            scores.iter_mut().for_each(|s| *s = None);
            for &c in reg.iter().chain(&chosen) {
                scores[c] = Some(base[c] + chosen.iter().map(|&d| ctx.pts.get(c, d)).sum::<u64>());
            }
            if ctx.holds(&scores) {
                found = Some(chosen);
                return true;
            }
            false
        });
        if let Some(mut chosen) = found {
            chosen.sort_unstable();
            return Ok(Decision::Yes(Witness::AddedCandidates(chosen)));
        }
    }
    Ok(Decision::No)
}

fn delete_candidates(inst: &ControlInstance, limits: &SizeLimits) -> Result<Decision> {
    let ctx = Cands::new(inst)?;
    let n = inst.election.len();
    let p = inst.p_index()?;
    let deletable: Vec<usize> = (0..n).filter(|&c| c != p).collect();
    let kmax = inst.budget().min(deletable.len());
    let count = binomial_prefix(deletable.len(), kmax);
    let target = ctx.winner_target().filter(|_| count > ENUMERATION_CUTOFF.min(limits.max_subsets as u128));
    if count > limits.max_subsets as u128 || target.is_some() {
        let Some((q, unique)) = target else {
            return Err(over(format!("{count} deletion sets")));
        };
        let mut forbidden = vec![false; n];
        forbidden[p] = true;
        forbidden[q] = true;
        return Ok(match dc_branch(&ctx.pts, q, unique, &forbidden, kmax, limits.max_nodes)? {
            Some(mut del) => {
                del.sort_unstable();
                Decision::Yes(Witness::DeletedCandidates(del))
            }
            None => Decision::No,
        });
    }
    let full: Vec<u64> = (0..n).map(|c| ctx.pts.row(c).iter().sum()).collect();
    let mut scores = vec![None; n];
    for r in 0..=kmax {
        let mut found = None;
        for_each_combination(deletable.len(), r, |idx| {
            let del: Vec<usize> = idx.iter().map(|&i| deletable[i]).collect();
            for c in 0..n {
                scores[c] = Some(full[c] - del.iter().map(|&d| ctx.pts.get(c, d)).sum::<u64>());
            }
            for &d in &del {
                scores[d] = None;
            }
            if ctx.holds(&scores) {
                found = Some(del);
                return true;
            }
            false
        });
        if let Some(del) = found {
            return Ok(Decision::Yes(Witness::DeletedCandidates(del)));
        }
    }
    Ok(Decision::No)
}

/// Branch-and-bound for "make `q` a (unique) winner by deleting at most `k`
/// candidates".
///
/// A candidate outscoring `q` must either be deleted or lose ground through
/// the deletion of some candidate it earns more points against than `q`
/// does; every other deletion only widens its lead. Branching over those
/// options, with earlier siblings excluded, covers every solution.
pub(crate) fn dc_branch(
    pts: &Points,
    q: usize,
    unique: bool,
    forbidden: &[bool],
    k: usize,
    budget: u64,
) -> Result<Option<Vec<usize>>> {
    struct State<'a> {
        pts: &'a Points,
        q: usize,
        allowed: i64,
        k: usize,
        present: Vec<bool>,
        excluded: Vec<bool>,
        score: Vec<i64>,
        deleted: Vec<usize>,
        nodes: u64,
        budget: u64,
    }

    impl State<'_> {
        fn deletable(&self, c: usize) -> bool {
            self.present[c] && !self.excluded[c]
        }

        fn set(&mut self, d: usize, present: bool) {
            let n = self.present.len();
            self.present[d] = present;
            for c in 0..n {
                let v = self.pts.get(c, d) as i64;
                self.score[c] += if present { v } else { -v };
            }
        }

        fn go(&mut self) -> Result<bool> {
            self.nodes += 1;
            if self.nodes > self.budget {
                return Err(over(format!("deletion search exceeded {} nodes", self.budget)));
            }
            let n = self.present.len();
            let sq = self.score[self.q];
            let mut pick: Option<Vec<usize>> = None;
            for v in 0..n {
                if !self.present[v] || v == self.q {
                    continue;
                }
                let excess = self.score[v] - sq - self.allowed;
                if excess <= 0 {
                    continue;
                }
                if self.deleted.len() == self.k {
                    return Ok(false);
                }
                let mut helpers: Vec<(i64, usize)> = (0..n)
                    .filter(|&d| d != v && self.deletable(d))
                    .map(|d| (self.pts.get(v, d) as i64 - self.pts.get(self.q, d) as i64, d))
                    .filter(|&(red, _)| red > 0)
                    .collect();
                helpers.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
                let mut options = Vec::with_capacity(helpers.len() + 1);
                if self.deletable(v) {
                    options.push(v);
                } else {
                    let Some(&(best, _)) = helpers.first() else {
                        return Ok(false);
                    };
                    let need = (excess + best - 1) / best;
                    if self.deleted.len() + need as usize > self.k {
                        return Ok(false);
                    }
                }
                options.extend(helpers.into_iter().map(|(_, d)| d));
                if options.is_empty() {
                    return Ok(false);
                }
                if pick.as_ref().is_none_or(|p| options.len() < p.len()) {
                    pick = Some(options);
                }
            }
            let Some(options) = pick else {
                return Ok(true);
            };
            let mut tried = Vec::new();
            for o in options {
                if self.excluded[o] {
                    continue;
                }
                self.set(o, false);
                self.deleted.push(o);
                if self.go()? {
                    return Ok(true);
                }
                self.deleted.pop();
                self.set(o, true);
                self.excluded[o] = true;
                tried.push(o);
            }
            for o in tried {
                self.excluded[o] = false;
            }
            Ok(false)
        }
    }

    let n = pts.len();
    let mut st = State {
        pts,
        q,
        allowed: if unique { -1 } else { 0 },
        k,
        present: vec![true; n],
        excluded: forbidden.to_vec(),
        score: (0..n).map(|c| pts.row(c).iter().sum::<u64>() as i64).collect(),
        deleted: Vec::new(),
        nodes: 0,
        budget,
    };
    Ok(if st.go()? { Some(st.deleted) } else { None })
}

fn partition_candidates(inst: &ControlInstance, rule: TieRule, runoff: bool, limits: &SizeLimits) -> Result<Decision> {
    let ctx = Cands::new(inst)?;
    let n = inst.election.len();
    let p = inst.p_index()?;
    let others: Vec<usize> = (0..n).filter(|&c| c != p).collect();
    let orientations = if runoff { 1u32 } else { 2 };
    let count = (orientations as u128) << others.len().min(120);
    let target = ctx.winner_target().filter(|_| runoff && count > ENUMERATION_CUTOFF.min(limits.max_subsets as u128));
    if count > limits.max_subsets as u128 || target.is_some() {
        if let (true, Some((q, unique))) = (runoff, ctx.winner_target()) {
            return Ok(match rpc_branch(&ctx.pts, q, unique, rule, limits.max_nodes)? {
                Some((first, second)) => Decision::Yes(Witness::CandidatePartition { first, second }),
                None => Decision::No,
            });
        }
        return Err(over(format!("{count} partitions")));
    }
    for orientation in 0..orientations {
        for mask in 0u64..1 << others.len() {
            let mut first = Vec::new();
            let mut second = Vec::new();
            // Orientation 0 keeps p in the first part, 1 in the second.
            if orientation == 0 { &mut first } else { &mut second }.push(p);
            for (i, &c) in others.iter().enumerate() {
                let flip = mask >> i & 1 == 1;
                if flip == (orientation == 0) { &mut second } else { &mut first }.push(c);
            }
            first.sort_unstable();
            second.sort_unstable();
            if ctx.partition_holds(&first, &second, runoff, rule) {
                return Ok(Decision::Yes(Witness::CandidatePartition { first, second }));
            }
        }
    }
    Ok(Decision::No)
}

const UNASSIGNED: u8 = 0;
const SIDE_S: u8 = 1;
const SIDE_T: u8 = 2;

/// Branch-and-bound for "make `q` a (unique) winner by a run-off partition".
///
/// Candidates are assigned one at a time to `q`'s part `S` or the other
/// part `T`. Bounds maintained per assignment:
/// * for every `c`, the least and greatest possible lead of `c` over `q`
///   inside `S`, which must allow `q` to survive;
/// * for every pair `(c, d)`, the greatest possible lead of `c` over `d`
///   inside `T`, which identifies candidates sure to survive `T`;
/// * a lower bound on the final-round lead of each sure finalist over `q`,
///   with candidates excluded from the final once their own lower bound
///   makes them fatal.
pub(crate) fn rpc_branch(
    pts: &Points,
    q: usize,
    unique: bool,
    rule: TieRule,
    budget: u64,
) -> Result<Option<(Vec<usize>, Vec<usize>)>> {
    let n = pts.len();
    let mut s = Rpc::new(pts, q, unique, rule, budget);
    if n == 1 {
        return Ok(Some((vec![q], vec![])));
    }
    if s.go()? {
        let first: Vec<usize> = (0..n).filter(|&c| s.side[c] == SIDE_S).collect();
        let second: Vec<usize> = (0..n).filter(|&c| s.side[c] == SIDE_T).collect();
        return Ok(Some((first, second)));
    }
    Ok(None)
}

struct Rpc<'a> {
    pts: &'a Points,
    n: usize,
    q: usize,
    tie_elim: bool,
    /// Largest lead over `q` allowed inside `S` and in the final.
    theta_s: i64,
    theta_f: i64,
    order: Vec<usize>,
    side: Vec<u8>,
    /// Lead over `q` accumulated in `S`, and the negative/positive parts of
    /// what the unassigned candidates could still add.
    a_s: Vec<i64>,
    n_s: Vec<i64>,
    p_s: Vec<i64>,
    /// `d_t[c * n + d]`: lead of `c` over `d` accumulated in `T`;
    /// `p_t`: positive part still available from unassigned candidates.
    d_t: Vec<i64>,
    p_t: Vec<i64>,
    nodes: u64,
    budget: u64,
}

impl<'a> Rpc<'a> {
    fn new(pts: &'a Points, q: usize, unique: bool, rule: TieRule, budget: u64) -> Self {
        let n = pts.len();
        let tie_elim = rule == TieRule::Eliminate;
        let mut side = vec![UNASSIGNED; n];
        side[q] = SIDE_S;
        let mut me = Rpc {
            pts,
            n,
            q,
            tie_elim,
            theta_s: if tie_elim { -1 } else { 0 },
            theta_f: if unique { -1 } else { 0 },
            order: Vec::new(),
            side,
            a_s: vec![0; n],
            n_s: vec![0; n],
            p_s: vec![0; n],
            d_t: vec![0; n * n],
            p_t: vec![0; n * n],
            nodes: 0,
            budget,
        };
        for c in 0..n {
            me.a_s[c] = me.delta(c, q);
            for y in 0..n {
                if y == q {
                    continue;
                }
                let d = me.delta(c, y);
                me.n_s[c] += d.min(0);
                me.p_s[c] += d.max(0);
            }
        }
        for c in 0..n {
            for d in 0..n {
                let mut acc = 0;
                for y in 0..n {
                    if y != q {
                        acc += me.diff(c, d, y).max(0);
                    }
                }
                me.p_t[c * n + d] = acc;
            }
        }
        // Candidates beating q first, then those tying it, then the rest;
        // within the first two groups stronger candidates first, within the
        // last weaker ones first.
        let total: Vec<i64> = (0..n).map(|c| pts.row(c).iter().sum::<u64>() as i64).collect();
        let group = |c: usize| {
            let (cq, qc) = (pts.get(c, q), pts.get(q, c));
            if cq > qc {
                0
            } else if cq == qc {
                1
            } else {
                2
            }
        };
        let mut order: Vec<usize> = (0..n).filter(|&c| c != q).collect();
        order.sort_by_key(|&c| {
            let g = group(c);
            (g, if g == 2 { total[c] } else { -total[c] }, c)
        });
        me.order = order;
        me
    }

    #[inline]
    fn delta(&self, c: usize, x: usize) -> i64 {
        self.pts.get(c, x) as i64 - self.pts.get(self.q, x) as i64
    }

    #[inline]
    fn diff(&self, c: usize, d: usize, x: usize) -> i64 {
        self.pts.get(c, x) as i64 - self.pts.get(d, x) as i64
    }

    fn assign(&mut self, u: usize, to: u8, undo: bool) {
        let n = self.n;
        let sign = if undo { -1 } else { 1 };
        for c in 0..n {
            let d = self.delta(c, u);
            self.n_s[c] -= sign * d.min(0);
            self.p_s[c] -= sign * d.max(0);
            if to == SIDE_S {
                self.a_s[c] += sign * d;
            }
        }
        let row_u: Vec<i64> = (0..n).map(|c| self.pts.get(c, u) as i64).collect();
        for c in 0..n {
            let pc = row_u[c];
            let base = c * n;
            for d in 0..n {
                let x = pc - row_u[d];
                self.p_t[base + d] -= sign * x.max(0);
                if to == SIDE_T {
                    self.d_t[base + d] += sign * x;
                }
            }
        }
        self.side[u] = if undo { UNASSIGNED } else { to };
    }

    /// Checks the bounds; on success returns a candidate that must go to `T`, if any.
    fn check(&self) -> std::result::Result<Option<usize>, ()> {
        let n = self.n;
        let q = self.q;
        let side = &self.side;
        for c in 0..n {
            if side[c] == SIDE_S && c != q && self.a_s[c] + self.n_s[c] > self.theta_s {
                return Err(());
            }
        }
        // Sure survivors of T.
        let mut sure = vec![false; n];
        sure[q] = true;
        let mut any_t = false;
        for w in 0..n {
            if side[w] != SIDE_T {
                continue;
            }
            any_t = true;
            let ok = (0..n).all(|c| {
                c == w || side[c] == SIDE_S || {
                    let m = self.d_t[c * n + w] + self.p_t[c * n + w];
                    if self.tie_elim {
                        m < 0
                    } else {
                        m <= 0
                    }
                }
            });
            if ok {
                sure[w] = true;
            }
        }
        // Under TP, a member of S whose lead can no longer drop below zero
        // ties q and survives with it.
        if !self.tie_elim {
            for c in 0..n {
                if side[c] == SIDE_S && c != q && self.a_s[c] + self.n_s[c] >= 0 {
                    sure[c] = true;
                }
            }
        }
        // Candidates that cannot reach the final.
        let mut out = vec![false; n];
        for x in 0..n {
            if x == q || sure[x] {
                continue;
            }
            let out_s = self.tie_elim || self.a_s[x] + self.p_s[x] < 0;
            let out_t = (0..n).any(|d| {
                d != x && side[d] == SIDE_T && {
                    let m = self.d_t[d * n + x] - self.p_t[x * n + d];
                    if self.tie_elim {
                        m >= 0
                    } else {
                        m > 0
                    }
                }
            });
            out[x] = match side[x] {
                SIDE_S => out_s,
                SIDE_T => out_t,
                _ => out_s && out_t,
            };
        }
        if any_t || !self.tie_elim {
            for _round in 0..3 {
                let mut changed = false;
                for x in 0..n {
                    if x == q || out[x] {
                        continue;
                    }
                    let mut lb = 0;
                    for y in 0..n {
                        if out[y] {
                            continue;
                        }
                        let d = self.delta(x, y);
                        lb += if sure[y] || y == x { d } else { d.min(0) };
                    }
                    if lb > self.theta_f {
                        if sure[x] {
                            return Err(());
                        }
                        out[x] = true;
                        changed = true;
                    }
                }
                if !changed {
                    break;
                }
            }
        }
        // Forced moves to T.
        for &u in &self.order {
            if side[u] != UNASSIGNED {
                continue;
            }
            if self.a_s[u] + self.n_s[u] > self.theta_s {
                return Ok(Some(u));
            }
            for c in 0..n {
                if side[c] == SIDE_S && c != q && self.a_s[c] + self.n_s[c] + self.delta(c, u).max(0) > self.theta_s {
                    return Ok(Some(u));
                }
            }
        }
        Ok(None)
    }

    fn leaf(&self) -> bool {
        let first: Vec<usize> = (0..self.n).filter(|&c| self.side[c] == SIDE_S).collect();
        let second: Vec<usize> = (0..self.n).filter(|&c| self.side[c] == SIDE_T).collect();
        let rule = if self.tie_elim { TieRule::Eliminate } else { TieRule::Promote };
        let fin = candidate_final(self.pts, &first, &second, true, rule);
        let Some(pos) = fin.iter().position(|&c| c == self.q) else {
            return false;
        };
        let scores = self.pts.scores_within(&fin);
        let best = argmax(&scores);
        best.contains(&pos) && (self.theta_f == 0 || best.len() == 1)
    }

    fn go(&mut self) -> Result<bool> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(over(format!("partition search exceeded {} nodes", self.budget)));
        }
        let forced = match self.check() {
            Err(()) => return Ok(false),
            Ok(f) => f,
        };
        let u = match forced {
            Some(u) => u,
            None => match self.order.iter().copied().find(|&u| self.side[u] == UNASSIGNED) {
                Some(u) => u,
                None => return Ok(self.leaf()),
            },
        };
        let sides: &[u8] = if forced.is_some() { &[SIDE_T] } else { &[SIDE_S, SIDE_T] };
        for &to in sides {
            self.assign(u, to, false);
            if self.go()? {
                return Ok(true);
            }
            self.assign(u, to, true);
        }
        Ok(false)
    }
}

/// Pairwise preference indicators of one ballot, row-major.
fn prefer_matrix(pref: &Preference, n: usize) -> Vec<u64> {
    let mut m = vec![0u64; n * n];
    match pref {
        Preference::Order(o) => {
            for (i, &a) in o.iter().enumerate() {
                for &b in &o[i + 1..] {
                    m[a * n + b] = 1;
                }
            }
        }
        Preference::Table(t) => {
            for a in 0..n {
                for b in 0..n {
                    if a != b && t.prefers(a, b) {
                        m[a * n + b] = 1;
                    }
                }
            }
        }
    }
    m
}

fn u64_of(v: &BigUint, what: &str) -> Result<u64> {
    v.to_u64().ok_or_else(|| over(format!("{what} too large for exhaustive search")))
}

/// Evaluates goals on elections given by raw tallies over a fixed candidate set.
struct TallyEval<'a> {
    inst: &'a ControlInstance,
    goal: CompiledGoal,
}

impl<'a> TallyEval<'a> {
    fn new(inst: &'a ControlInstance) -> Result<Self> {
        Ok(TallyEval {
            inst,
            goal: inst.goal().compile(inst.election.candidates())?,
        })
    }

    fn table(&self, total: u64, tallies: &[u64]) -> OutcomeTable {
        OutcomeTable::from_tallies(self.inst.election.candidates().to_vec(), total, tallies.to_vec())
    }

    fn holds(&self, total: u64, tallies: &[u64]) -> bool {
        let table = self.table(total, tallies);
        let scores: Vec<Option<u64>> = scores_from_table(&table, self.inst.alpha).scaled().iter().map(|&s| Some(s)).collect();
        self.goal.holds(&scores, self.inst.alpha, &|| table.clone())
    }
}

/// Enumerates vectors `x` with `0 <= x[i] <= caps[i]` and `sum x = total`,
/// in lexicographic order, until `f` returns true.
fn for_each_vector(caps: &[u64], total: u64, f: &mut dyn FnMut(&[u64]) -> Result<bool>) -> Result<bool> {
    fn rec(caps: &[u64], i: usize, left: u64, cur: &mut Vec<u64>, f: &mut dyn FnMut(&[u64]) -> Result<bool>) -> Result<bool> {
        if i == caps.len() {
            return if left == 0 { f(cur) } else { Ok(false) };
        }
        let room: u64 = caps[i + 1..].iter().fold(0u64, |a, &c| a.saturating_add(c));
        let lo = left.saturating_sub(room);
        for x in lo..=caps[i].min(left) {
            cur.push(x);
            let stop = rec(caps, i + 1, left - x, cur, f)?;
            cur.pop();
            if stop {
                return Ok(true);
            }
        }
        Ok(false)
    }
    rec(caps, 0, total, &mut Vec::with_capacity(caps.len()), f)
}

/// Number of vectors bounded by `caps` with sum at most `k`, saturating.
fn count_vectors(caps: &[u64], k: u64) -> u128 {
    let k = k as usize;
    let mut ways = vec![0u128; k + 1];
    ways[0] = 1;
    for &c in caps {
        let mut next = vec![0u128; k + 1];
        for (s, &w) in ways.iter().enumerate() {
            if w == 0 {
                continue;
            }
            for x in 0..=(c as usize).min(k - s) {
                next[s + x] = next[s + x].saturating_add(w);
            }
        }
        ways = next;
    }
    ways.iter().fold(0u128, |a, &w| a.saturating_add(w))
}

fn voter_subsets(inst: &ControlInstance, limits: &SizeLimits) -> Result<Decision> {
    let eval = TallyEval::new(inst)?;
    let n = inst.election.len();
    let k = inst.budget() as u64;
    let registered = inst.election.to_ballots();
    let adding = inst.problem.kind == ControlKind::AddVoters;
    let lines: Vec<Ballot> = if adding { inst.voter_pool.clone().unwrap_or_default() } else { registered.clone() };
    let caps: Vec<u64> = lines
        .iter()
        .map(|b| b.multiplicity.to_u64().unwrap_or(u64::MAX).min(k))
        .collect();
    let count = count_vectors(&caps, k.min(caps.iter().sum::<u64>()));
    if count > limits.max_subsets as u128 {
        return Err(over(format!("{count} voter selections")));
    }
    let mut base = vec![0u64; n * n];
    let mut base_total = 0u64;
    for b in &registered {
        let m = u64_of(&b.multiplicity, "multiplicity")?;
        base_total = base_total.checked_add(m).ok_or_else(|| over("voter count"))?;
        for (t, x) in base.iter_mut().zip(prefer_matrix(&b.preference, n)) {
            *t += m * x;
        }
    }
    let mats: Vec<Vec<u64>> = lines.iter().map(|b| prefer_matrix(&b.preference, n)).collect();
    let kmax = k.min(caps.iter().sum::<u64>());
    let mut found = None;
    let mut tallies = vec![0u64; n * n];
    for size in 0..=kmax {
        let hit = for_each_vector(&caps, size, &mut |x: &[u64]| {
            tallies.copy_from_slice(&base);
            for (i, &c) in x.iter().enumerate() {
                if c == 0 {
                    continue;
                }
                for (t, &m) in tallies.iter_mut().zip(&mats[i]) {
                    if adding {
                        *t += c * m;
                    } else {
                        *t -= c * m;
                    }
                }
            }
            let total = if adding { base_total + size } else { base_total - size };
            if eval.holds(total, &tallies) {
                found = Some(x.to_vec());
                return Ok(true);
            }
            Ok(false)
        })?;
        if hit {
            break;
        }
    }
    Ok(match found {
        Some(x) => {
            let v: Vec<BigUint> = x.into_iter().map(BigUint::from).collect();
            Decision::Yes(if adding { Witness::AddedVoters(v) } else { Witness::DeletedVoters(v) })
        }
        None => Decision::No,
    })
}

/// Ballot lines grouped by identical preference: (preference, line indices, total count).
fn group_lines(ballots: &[Ballot]) -> Result<Vec<(Preference, Vec<usize>, u64)>> {
    let mut groups: Vec<(Preference, Vec<usize>, u64)> = Vec::new();
    for (i, b) in ballots.iter().enumerate() {
        let m = u64_of(&b.multiplicity, "multiplicity")?;
        match groups.iter_mut().find(|g| g.0 == b.preference) {
            Some(g) => {
                g.1.push(i);
                g.2 += m;
            }
            None => groups.push((b.preference.clone(), vec![i], m)),
        }
    }
    Ok(groups)
}

fn check_voters(election: &Election, limits: &SizeLimits) -> Result<u64> {
    let total = election.total_multiplicity();
    match total.to_u64() {
        Some(t) if t <= limits.max_voters as u64 => Ok(t),
        _ => Err(over(format!("{total} voters exceed {}", limits.max_voters))),
    }
}

fn partition_voters(inst: &ControlInstance, rule: TieRule, limits: &SizeLimits) -> Result<Decision> {
    check_voters(&inst.election, limits)?;
    let n = inst.election.len();
    let ballots = inst.election.to_ballots();
    let groups = group_lines(&ballots)?;
    let count = groups.iter().fold(1u128, |a, g| a.saturating_mul(g.2 as u128 + 1));
    if count > limits.max_subsets as u128 {
        return Err(over(format!("{count} voter partitions")));
    }
    let goal = inst.goal().compile(inst.election.candidates())?;
    let mats: Vec<Vec<u64>> = groups.iter().map(|g| prefer_matrix(&g.0, n)).collect();
    let full_table = outcome_table(&inst.election);
    let full = Points::new(&full_table, inst.alpha);
    let total: u64 = groups.iter().map(|g| g.2).sum();
    let mut full_tally = vec![0u64; n * n];
    for (g, m) in groups.iter().zip(&mats) {
        for (t, &x) in full_tally.iter_mut().zip(m) {
            *t += g.2 * x;
        }
    }
    let cands = inst.election.candidates().to_vec();
    let all: Vec<usize> = (0..n).collect();
    let mut amounts = vec![0u64; groups.len()];
    let mut t1 = vec![0u64; n * n];
    loop {
        t1.iter_mut().for_each(|t| *t = 0);
        let mut total1 = 0;
        for (i, &a) in amounts.iter().enumerate() {
            total1 += a;
            if a > 0 {
                for (t, &x) in t1.iter_mut().zip(&mats[i]) {
                    *t += a * x;
                }
            }
        }
        let t2: Vec<u64> = full_tally.iter().zip(&t1).map(|(f, a)| f - a).collect();
        let p1 = Points::new(&OutcomeTable::from_tallies(cands.clone(), total1, t1.clone()), inst.alpha);
        let p2 = Points::new(&OutcomeTable::from_tallies(cands.clone(), total - total1, t2), inst.alpha);
        let mut fin = survivors(&p1, &all, rule);
        fin.extend(survivors(&p2, &all, rule));
        fin.sort_unstable();
        fin.dedup();
        let mut scores = vec![None; n];
        for &c in &fin {
            scores[c] = Some(full.score_within(c, &fin));
        }
        if goal.holds(&scores, inst.alpha, &|| full_table.restrict(&fin)) {
            // Spread each group's amount over its lines in order.
            let mut first = vec![BigUint::from(0u32); ballots.len()];
            for (g, &a) in groups.iter().zip(&amounts) {
                let mut left = a;
                for &line in &g.1 {
                    let m = ballots[line].multiplicity.to_u64().unwrap();
                    let take = m.min(left);
                    first[line] = BigUint::from(take);
                    left -= take;
                }
            }
            return Ok(Decision::Yes(Witness::VoterPartition(first)));
        }
        // next vector
        let mut i = 0;
        loop {
            if i == amounts.len() {
                return Ok(Decision::No);
            }
            if amounts[i] < groups[i].2 {
                amounts[i] += 1;
                break;
            }
            amounts[i] = 0;
            i += 1;
        }
    }
}

/// Every preference of the given kind over `n` candidates.
fn all_preferences(like: &Preference, n: usize, limit: u64) -> Result<Vec<Preference>> {
    match like {
        Preference::Order(_) => {
            let count: u128 = (1..=n as u128).product();
            if count > limit as u128 {
                return Err(over(format!("{count} linear orders")));
            }
            let mut out = Vec::new();
            let mut perm: Vec<usize> = (0..n).collect();
            permutations(&mut perm, 0, &mut out);
            out.sort();
            Ok(out.into_iter().map(Preference::Order).collect())
        }
        Preference::Table(_) => {
            let pairs = n * n.saturating_sub(1) / 2;
            if pairs >= 63 || (1u64 << pairs) > limit {
                return Err(over(format!("2^{pairs} preference tables")));
            }
            Ok(PairTable::all(n).map(Preference::Table).collect())
        }
    }
}

fn permutations(v: &mut Vec<usize>, i: usize, out: &mut Vec<Vec<usize>>) {
    if i == v.len() {
        out.push(v.clone());
        return;
    }
    for j in i..v.len() {
        v.swap(i, j);
        permutations(v, i + 1, out);
        v.swap(i, j);
    }
}

/// Unit-voter indices of each ballot line.
fn unit_offsets(ballots: &[Ballot]) -> Vec<usize> {
    let mut off = Vec::with_capacity(ballots.len());
    let mut acc = 0usize;
    for b in ballots {
        off.push(acc);
        acc += b.multiplicity.to_usize().unwrap();
    }
    off
}

/// The first `count` unit voters of a group of lines.
fn take_units(group: &[usize], ballots: &[Ballot], offsets: &[usize], count: u64) -> Vec<usize> {
    let mut out = Vec::new();
    for &line in group {
        let m = ballots[line].multiplicity.to_usize().unwrap();
        for j in 0..m {
            if out.len() as u64 == count {
                return out;
            }
            out.push(offsets[line] + j);
        }
    }
    out
}

fn bribery(inst: &ControlInstance, limits: &SizeLimits) -> Result<Decision> {
    let total = check_voters(&inst.election, limits)?;
    let eval = TallyEval::new(inst)?;
    let n = inst.election.len();
    let ballots = inst.election.to_ballots();
    let offsets = unit_offsets(&ballots);
    let groups = group_lines(&ballots)?;
    let mats: Vec<Vec<u64>> = groups.iter().map(|g| prefer_matrix(&g.0, n)).collect();
    let mut base = vec![0u64; n * n];
    for (g, m) in groups.iter().zip(&mats) {
        for (t, &x) in base.iter_mut().zip(m) {
            *t += g.2 * x;
        }
    }
    let k = (inst.budget() as u64).min(total);
    let caps: Vec<u64> = groups.iter().map(|g| g.2.min(k)).collect();
    // Replacement universes per ballot kind.
    let orders = if groups.iter().any(|g| matches!(g.0, Preference::Order(_))) {
        all_preferences(&Preference::Order(vec![]), n, limits.max_subsets)?
    } else {
        vec![]
    };
    let tables = if groups.iter().any(|g| matches!(g.0, Preference::Table(_))) {
        all_preferences(&Preference::Table(PairTable::from_fn(0, |_, _| false)), n, limits.max_subsets)?
    } else {
        vec![]
    };
    let order_mats: Vec<Vec<u64>> = orders.iter().map(|p| prefer_matrix(p, n)).collect();
    let table_mats: Vec<Vec<u64>> = tables.iter().map(|p| prefer_matrix(p, n)).collect();
    let mut visited: u64 = 0;
    let mut found: Option<(Vec<u64>, Vec<usize>, Vec<usize>)> = None;

    for size in 0..=k {
        let hit = for_each_vector(&caps, size, &mut |removed: &[u64]| {
            let mut tallies = base.clone();
            let (mut r_order, mut r_table) = (0u64, 0u64);
            for (i, &c) in removed.iter().enumerate() {
                for (t, &m) in tallies.iter_mut().zip(&mats[i]) {
                    *t -= c * m;
                }
                match groups[i].0 {
                    Preference::Order(_) => r_order += c,
                    Preference::Table(_) => r_table += c,
                }
            }
            let mut hit = None;
            let stop = multisets(order_mats.len(), r_order as usize, &mut |om: &[usize]| {
                let mut t1 = tallies.clone();
                for &j in om {
                    for (t, &m) in t1.iter_mut().zip(&order_mats[j]) {
                        *t += m;
                    }
                }
                multisets(table_mats.len(), r_table as usize, &mut |tm: &[usize]| {
                    visited += 1;
                    if visited > limits.max_subsets {
                        return Err(over(format!("bribery search exceeded {} states", limits.max_subsets)));
                    }
                    let mut t2 = t1.clone();
                    for &j in tm {
                        for (t, &m) in t2.iter_mut().zip(&table_mats[j]) {
                            *t += m;
                        }
                    }
                    if eval.holds(total, &t2) {
                        hit = Some((om.to_vec(), tm.to_vec()));
                        return Ok(true);
                    }
                    Ok(false)
                })
            })?;
            if stop {
                let (om, tm) = hit.unwrap();
                found = Some((removed.to_vec(), om, tm));
            }
            Ok(stop)
        })?;
        if hit {
            break;
        }
    }
    let Some((removed, om, tm)) = found else {
        return Ok(Decision::No);
    };
    let mut bribes = Vec::new();
    let (mut oi, mut ti) = (om.into_iter(), tm.into_iter());
    for (g, &c) in groups.iter().zip(&removed) {
        for unit in take_units(&g.1, &ballots, &offsets, c) {
            let pref = match g.0 {
                Preference::Order(_) => orders[oi.next().unwrap()].clone(),
                Preference::Table(_) => tables[ti.next().unwrap()].clone(),
            };
            bribes.push((unit, pref));
        }
    }
    bribes.sort_by_key(|b| b.0);
    Ok(Decision::Yes(Witness::BribedBallots(bribes)))
}

/// Calls `f` on every nondecreasing sequence of length `r` over `0..n`.
fn multisets(n: usize, r: usize, f: &mut dyn FnMut(&[usize]) -> Result<bool>) -> Result<bool> {
    fn rec(n: usize, r: usize, from: usize, cur: &mut Vec<usize>, f: &mut dyn FnMut(&[usize]) -> Result<bool>) -> Result<bool> {
        if cur.len() == r {
            return f(cur);
        }
        for j in from..n {
            cur.push(j);
            let stop = rec(n, r, j, cur, f)?;
            cur.pop();
            if stop {
                return Ok(true);
            }
        }
        Ok(false)
    }
    if r > 0 && n == 0 {
        return Ok(false);
    }
    rec(n, r, 0, &mut Vec::with_capacity(r), f)
}

fn microbribery(inst: &ControlInstance, limits: &SizeLimits) -> Result<Decision> {
    let total = check_voters(&inst.election, limits)?;
    let eval = TallyEval::new(inst)?;
    let n = inst.election.len();
    let ballots = inst.election.to_ballots();
    let offsets = unit_offsets(&ballots);
    let groups = group_lines(&ballots)?;
    let mut base = vec![0u64; n * n];
    for g in &groups {
        for (t, &x) in base.iter_mut().zip(&prefer_matrix(&g.0, n)) {
            *t += g.2 * x;
        }
    }
    // One slot per (group, pair); flipping moves voters across the pair.
    let mut slots: Vec<(usize, usize, usize)> = Vec::new();
    for gi in 0..groups.len() {
        for a in 0..n {
            for b in a + 1..n {
                slots.push((gi, a, b));
            }
        }
    }
    let k = inst.budget() as u64;
    let caps: Vec<u64> = slots.iter().map(|&(g, _, _)| groups[g].2.min(k)).collect();
    let kmax = k.min(caps.iter().sum());
    let count = count_vectors(&caps, kmax);
    if count > limits.max_subsets as u128 {
        return Err(over(format!("{count} flip selections")));
    }
    let mut found = None;
    let mut tallies = vec![0u64; n * n];
    for size in 0..=kmax {
        let hit = for_each_vector(&caps, size, &mut |x: &[u64]| {
            tallies.copy_from_slice(&base);
            for (&(g, a, b), &c) in slots.iter().zip(x) {
                if c == 0 {
                    continue;
                }
                let (w, l) = if groups[g].0.prefers(a, b) { (a, b) } else { (b, a) };
                tallies[w * n + l] -= c;
                tallies[l * n + w] += c;
            }
            if eval.holds(total, &tallies) {
                found = Some(x.to_vec());
                return Ok(true);
            }
            Ok(false)
        })?;
        if hit {
            break;
        }
    }
    let Some(x) = found else {
        return Ok(Decision::No);
    };
    let mut flips = Vec::new();
    for (&(g, a, b), &c) in slots.iter().zip(&x) {
        for unit in take_units(&groups[g].1, &ballots, &offsets, c) {
            flips.push((unit, a, b));
        }
    }
    flips.sort_unstable();
    Ok(Decision::Yes(Witness::Flips(flips)))
}
