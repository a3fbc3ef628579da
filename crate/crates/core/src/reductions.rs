//! Control instances generated from vertex-cover inputs, with a brute-force
//! vertex-cover oracle to check them against.

use std::fmt;

use crate::alpha::Alpha;
use crate::control::{ControlInstance, ControlKind, Decision, Direction, Problem, Witness};
use crate::election::Candidate;
use crate::error::{Error, Result};
use crate::exact::{solve_control_exact, SizeLimits};
use crate::realize::{combine_outcomes, pad_outcomes, realize_outcomes, scored_outcomes, tournament_from_scores, DesiredOutcomes};
use crate::score::{scores_from_table, ScoreVector, WinnerModel};
use crate::table::{outcome_table, Outcome, OutcomeTable};
use crate::two_stage::TieRule;

/// An undirected simple graph on vertices `1..=n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
}

impl Graph {
    /// Edges keep their given order; each is stored as `(min, max)`.
    pub fn new(n: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        let mut seen = std::collections::HashSet::new();
        let mut norm = Vec::with_capacity(edges.len());
        for (u, v) in edges {
            if u == v || u == 0 || v == 0 || u > n || v > n {
                return Err(Error::InvalidGraph(format!("bad edge {u}-{v} on {n} vertices")));
            }
            let e = (u.min(v), u.max(v));
            if !seen.insert(e) {
                return Err(Error::InvalidGraph(format!("duplicate edge {}-{}", e.0, e.1)));
            }
            norm.push(e);
        }
        Ok(Graph { n, edges: norm })
    }

    pub fn empty(n: usize) -> Self {
        Graph { n, edges: Vec::new() }
    }

    pub fn path(n: usize) -> Self {
        Graph { n, edges: (1..n).map(|i| (i, i + 1)).collect() }
    }

    pub fn complete(n: usize) -> Self {
        Graph {
            n,
            edges: (1..=n).flat_map(|u| (u + 1..=n).map(move |v| (u, v))).collect(),
        }
    }

    /// Every labeled graph on `n` vertices.
    pub fn all(n: usize) -> impl Iterator<Item = Graph> {
        let pairs: Vec<(usize, usize)> = (1..=n).flat_map(|u| (u + 1..=n).map(move |v| (u, v))).collect();
        (0u64..1 << pairs.len()).map(move |mask| Graph {
            n,
            edges: pairs.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &e)| e).collect(),
        })
    }

    /// Each edge present independently with probability one half.
    pub fn random(n: usize, rng: &mut impl rand::Rng) -> Self {
        let edges = (1..=n).flat_map(|u| (u + 1..=n).map(move |v| (u, v))).collect::<Vec<_>>();
        Graph {
            n,
            edges: edges.into_iter().filter(|_| rng.random_bool(0.5)).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// The graph plus one edge on two fresh vertices.
    fn with_extra_edge(&self) -> Graph {
        let mut g = self.clone();
        g.edges.push((self.n + 1, self.n + 2));
        g.n += 2;
        g
    }
}

impl fmt::Display for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "graph: {}", self.n)?;
        for (u, v) in &self.edges {
            writeln!(f, "edge: {u} {v}")?;
        }
        Ok(())
    }
}

/// Whether some set of at most `k` vertices touches every edge.
pub fn vc_brute(g: &Graph, k: usize) -> bool {
    assert!(g.n < 64, "vertex-cover search is limited to 63 vertices");
    let covers = |mask: u64| g.edges.iter().all(|&(u, v)| mask >> (u - 1) & 1 == 1 || mask >> (v - 1) & 1 == 1);
    (0u64..1 << g.n).any(|mask| mask.count_ones() as usize <= k && covers(mask))
}

fn cand(name: String) -> Candidate {
    Candidate::new(name).expect("generated names are valid")
}

fn infeasible(what: String) -> Error {
    Error::InfeasibleSpec(what)
}

/// Scaled scores of the members of `keep`, computed from `table`.
fn restricted_scores(table: &OutcomeTable, keep: &[usize], alpha: Alpha) -> ScoreVector {
    scores_from_table(&table.restrict(keep), alpha)
}

/// Adding-unlimited-candidates instance: the registered candidates are `p`,
/// `r`, edge candidates `e1..em`, base padding `x1..` and construction
/// dummies `d1..`; the spoilers are vertex candidates `v1..vn`.
pub fn reduce_vc_to_ccacu(g: &Graph, k: usize, alpha: Alpha, model: WinnerModel) -> Result<ControlInstance> {
    if !alpha.is_interior() {
        return Err(Error::AlphaOutOfRange);
    }
    if g.m() == 0 {
        return Err(Error::EmptyGraph);
    }
    let (n, m) = (g.n(), g.m());
    let k = k.min(n);
    let unique = model == WinnerModel::Unique;
    let l = 2 * n + 2 * m;
    let pads = l - m - 2;

    let mut names = vec![cand("p".into()), cand("r".into())];
    names.extend((1..=m).map(|i| cand(format!("e{i}"))));
    names.extend((1..=pads).map(|i| cand(format!("x{i}"))));
    let mut base = DesiredOutcomes::new(names)?;
    for a in 0..l {
        for b in a + 1..l {
            base.beat(a, b);
        }
    }
    // r and (in the nonunique case) every e_i need ties; the padding
    // candidates absorb them.
    let (p, r, e0, x0) = (0, 1, 2, 2 + m);
    let r_ties = if unique { k + 1 } else { k };
    let mut pad_ties = vec![0usize; pads];
    let mut next = 0;
    let mut tie_with = |who: usize, base: &mut DesiredOutcomes| {
        base.tie(who, x0 + next % pads);
        pad_ties[next % pads] += 1;
        next += 1;
    };
    for _ in 0..r_ties {
        tie_with(r, &mut base);
    }
    if !unique {
        for i in 0..m {
            tie_with(e0 + i, &mut base);
        }
    }
    let mut deficits = vec![0usize; l];
    deficits[p] = 2;
    deficits[r] = if unique { 3 + k } else { 2 + k };
    for i in 0..m {
        deficits[e0 + i] = 2;
    }
    for j in 0..pads {
        deficits[x0 + j] = n + 2 + pad_ties[j];
    }
    let mut full = scored_outcomes(&base, &deficits, "d")?;
    let registered = full.len();
    for v in 1..=n {
        let vi = full.push(cand(format!("v{v}")))?;
        for c in 0..registered {
            if c != p && !(e0..e0 + m).contains(&c) {
                full.beat(c, vi);
            }
        }
        for (j, &(a, b)) in g.edges().iter().enumerate() {
            if a == v || b == v {
                full.beat(vi, e0 + j);
            }
        }
    }
    let election = realize_outcomes(&full);

    // Self-check of the registered election's scores.
    let table = outcome_table(&election);
    let reg: Vec<usize> = (0..registered).collect();
    let scores = restricted_scores(&table, &reg, alpha);
    let sc = scores.scaled();
    let (t, s) = (alpha.den(), alpha.num());
    let top = t * (2 * l * l - 2) as u64;
    let mut want = vec![(p, top)];
    let r_score = if unique {
        t * (2 * l * l - 3 - k) as u64 + s * (k + 1) as u64
    } else {
        t * (2 * l * l - 2 - k) as u64 + s * k as u64
    };
    want.push((r, r_score));
    for i in 0..m {
        want.push((e0 + i, if unique { top } else { top + s }));
    }
    for (c, w) in want {
        if sc[c] != w {
            return Err(infeasible(format!("{} scores {} instead of {w}", election.candidate(c), sc[c])));
        }
    }
    let cap = t * (2 * l * l - n - 2) as u64;
    if let Some(c) = (x0..registered).find(|&c| sc[c] > cap) {
        return Err(infeasible(format!("{} scores {} above {cap}", election.candidate(c), sc[c])));
    }
    for vi in registered..election.len() {
        if table.outcome(p, vi) != Outcome::Tie {
            return Err(infeasible("p must tie every vertex candidate".into()));
        }
    }

    Ok(ControlInstance::new(
        Problem::new(Direction::Constructive, ControlKind::AddCandidatesUnlimited),
        model,
        alpha,
        election,
        "p",
    )
    .with_spoilers((registered..registered + n).collect()))
}

/// Outcome pattern of the deleting-candidates construction, with the
/// indices of `p` and the edge candidates.
fn ccdc_outcomes(g: &Graph, unique: bool) -> Result<DesiredOutcomes> {
    let (n, m) = (g.n(), g.m());
    let l = n + m;
    let mut names = vec![cand("p".into()), cand("r1".into())];
    if unique {
        names.push(cand("r2".into()));
    }
    let rs = if unique { 2 } else { 1 };
    let e0 = 1 + rs;
    let v0 = e0 + m;
    names.extend((1..=m).map(|i| cand(format!("e{i}"))));
    names.extend((1..=n).map(|i| cand(format!("v{i}"))));
    let mut d = DesiredOutcomes::new(names)?;
    let t0 = d.append(&pad_outcomes(l, "t"))?;
    let pad = t0..t0 + 2 * l + 1;
    for r in 1..=rs {
        d.beat(0, r);
        for i in 0..m {
            d.beat(r, e0 + i);
        }
        for tp in pad.clone() {
            d.beat(tp, r);
        }
    }
    for (i, &(a, b)) in g.edges().iter().enumerate() {
        d.beat(e0 + i, v0 + a - 1);
        d.beat(e0 + i, v0 + b - 1);
        for v in 1..=n {
            if v != a && v != b {
                d.beat(v0 + v - 1, e0 + i);
            }
        }
    }
    for v in 0..n {
        d.beat(v0 + v, 0);
        for tp in pad.clone() {
            d.beat(tp, v0 + v);
        }
    }
    for tp in pad {
        d.beat(0, tp);
        for i in 0..m {
            d.beat(e0 + i, tp);
        }
    }
    Ok(d)
}

/// Checks the deleting-candidates score list on `scores`, indexed like
/// [`ccdc_outcomes`] starting at `offset`.
fn check_ccdc_scores(g: &Graph, unique: bool, alpha: Alpha, sc: &[u64], names: &[Candidate]) -> Result<()> {
    let (n, m) = (g.n() as u64, g.m() as u64);
    let l = n + m;
    let (t, s) = (alpha.den(), alpha.num());
    let u = unique as u64;
    let rs = 1 + u as usize;
    let e0 = 1 + rs;
    let v0 = e0 + m as usize;
    let t0 = v0 + n as usize;
    let mut want = vec![(0, s * m + t * (2 * l + 2 + u))];
    for r in 1..=rs {
        want.push((r, t * m + s * (n + u)));
    }
    for i in 0..m as usize {
        want.push((e0 + i, s * m + t * (2 * l + 3)));
    }
    for j in 0..(2 * l + 1) as usize {
        want.push((t0 + j, t * (l + n + 1 + u)));
    }
    for (c, w) in want {
        if sc[c] != w {
            return Err(infeasible(format!("{} scores {} instead of {w}", names[c], sc[c])));
        }
    }
    let cap = t * (1 + m) + s * (n + u);
    if let Some(v) = (v0..t0).find(|&v| sc[v] > cap) {
        return Err(infeasible(format!("{} scores {} above {cap}", names[v], sc[v])));
    }
    Ok(())
}

/// Deleting-candidates instance: `p`, `r1` (and its clone `r2` in the
/// unique-winner model), edge candidates `e1..em`, vertex candidates
/// `v1..vn` and padding `t0..t{2(n+m)}`.
pub fn reduce_vc_to_ccdc(g: &Graph, k: usize, alpha: Alpha, model: WinnerModel) -> Result<ControlInstance> {
    let unique = model == WinnerModel::Unique;
    let d = ccdc_outcomes(g, unique)?;
    let election = realize_outcomes(&d);
    let scores = scores_from_table(&outcome_table(&election), alpha);
    check_ccdc_scores(g, unique, alpha, scores.scaled(), election.candidates())?;
    Ok(ControlInstance::new(
        Problem::new(Direction::Constructive, ControlKind::DeleteCandidates),
        model,
        alpha,
        election,
        "p",
    )
    .with_k(k))
}

/// Within-block win counts of the blocking candidates `h1..hq`, `q = 2k + 3`.
fn blocker_wins(k: usize, rule: TieRule) -> Vec<usize> {
    let q = 2 * k + 3;
    let mut w = match rule {
        // Two leaders at k + 2, two trailers at k, the rest k + 1.
        TieRule::Promote => vec![k + 2, k + 2, k, k],
        // One leader at k + 3, two trailers at k, the rest k + 1.
        TieRule::Eliminate => vec![k + 3, k, k],
    };
    w.resize(q, k + 1);
    w
}

/// Run-off partition instance: the deleting-candidates election joined with
/// a block `h1..hq` through a fresh candidate `r`. A zero budget is first
/// turned into budget one on the graph plus a disjoint edge.
pub fn reduce_vc_to_ccrpc(g: &Graph, k: usize, rule: TieRule, alpha: Alpha, model: WinnerModel) -> Result<ControlInstance> {
    let (g, k) = if k == 0 { (g.with_extra_edge(), 1) } else { (g.clone(), k.min(g.n().max(1))) };
    let unique_base = rule == TieRule::Eliminate || model == WinnerModel::Unique;
    let f = ccdc_outcomes(&g, unique_base)?;
    let wins = blocker_wins(k, rule);
    let q = wins.len();
    let mut h = DesiredOutcomes::new((1..=q).map(|i| cand(format!("h{i}"))).collect())?;
    for (a, b) in tournament_from_scores(&wins)? {
        h.beat(a, b);
    }
    let all = combine_outcomes(&f, &h, "r")?;
    let election = realize_outcomes(&all);

    let table = outcome_table(&election);
    let f_idx: Vec<usize> = (1..=f.len()).collect();
    let f_scores = restricted_scores(&table, &f_idx, alpha);
    check_ccdc_scores(&g, unique_base, alpha, f_scores.scaled(), f.candidates())?;
    let h_idx: Vec<usize> = std::iter::once(0).chain(f.len() + 1..election.len()).collect();
    let h_scores = restricted_scores(&table, &h_idx, alpha);
    let t = alpha.den();
    let sc = h_scores.scaled();
    if sc[0] != t * q as u64 {
        return Err(infeasible(format!("r scores {} instead of {}", sc[0], t * q as u64)));
    }
    for (i, &w) in wins.iter().enumerate() {
        if sc[1 + i] != t * w as u64 {
            return Err(infeasible(format!("h{} scores {} instead of {}", i + 1, sc[1 + i], t * w as u64)));
        }
    }

    Ok(ControlInstance::new(
        Problem::new(Direction::Constructive, ControlKind::RunoffPartitionCandidates(rule)),
        model,
        alpha,
        election,
        "p",
    ))
}

/// Outcome of checking one generated instance against the vertex-cover oracle.
#[derive(Clone, Debug)]
pub struct Report {
    pub problem: Problem,
    pub vertex_cover: bool,
    pub solver: bool,
    pub equal: bool,
    pub witness: Option<Witness>,
    /// Scores of the registered election.
    pub scores: ScoreVector,
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let yn = |b: bool| if b { "YES" } else { "NO" };
        writeln!(f, "problem: {}", self.problem)?;
        writeln!(f, "vertex-cover: {}", yn(self.vertex_cover))?;
        writeln!(f, "solver: {}", yn(self.solver))?;
        writeln!(f, "equal: {}", self.equal)?;
        let t = self.scores.alpha().den();
        for (c, s) in self.scores.candidates().iter().zip(self.scores.scaled()) {
            writeln!(f, "{c}\t{s}/{t}")?;
        }
        Ok(())
    }
}

/// Solves `instance` exactly and compares with the vertex-cover answer.
pub fn verify_reduction(g: &Graph, k: usize, instance: &ControlInstance, limits: &SizeLimits) -> Result<Report> {
    if g.n() >= 63 || (1u128 << g.n()) > limits.max_subsets as u128 {
        return Err(Error::BudgetExceeded(format!("graph on {} vertices", g.n())));
    }
    let vertex_cover = vc_brute(g, k);
    let decision = solve_control_exact(instance, limits)?;
    let reg = instance.registered();
    let scores = restricted_scores(&outcome_table(&instance.election), &reg, instance.alpha);
    let (solver, witness) = match decision {
        Decision::Yes(w) => (true, Some(w)),
        Decision::No => (false, None),
    };
    Ok(Report {
        problem: instance.problem,
        vertex_cover,
        solver,
        equal: vertex_cover == solver,
        witness,
        scores,
    })
}
