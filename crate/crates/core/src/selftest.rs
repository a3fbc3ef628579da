//! Built-in verification suites behind `copeland selftest`.

use std::fmt;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::alpha::Alpha;
use crate::control::{verify_witness, ControlInstance, ControlKind, Decision, Direction, Problem};
use crate::election::{Ballot, Election, PairTable};
use crate::error::Result;
use crate::exact::{solve_control_exact, solve_microbribery_exact, SizeLimits};
use crate::fast::{destructive_microbribery_dp, destructive_partition_candidate, greedy_destructive_candidate};
use crate::format::{parse_election, parse_graph, serialize_election, serialize_graph};
use crate::realize::{build_pad, build_scored, realize_outcomes, DesiredOutcomes, ScoredSpec};
use crate::reductions::{reduce_vc_to_ccacu, reduce_vc_to_ccdc, reduce_vc_to_ccrpc, verify_reduction, Graph};
use crate::score::{copeland_scores, WinnerModel};
use crate::table::{outcome_table, Outcome};
use crate::two_stage::TieRule;

pub type Solver = fn(&ControlInstance) -> Result<Decision>;

/// The fast solvers under test; replaced in mutation tests.
#[derive(Clone, Copy)]
pub struct Hooks {
    pub greedy: Solver,
    pub partition: Solver,
}

impl Default for Hooks {
    fn default() -> Self {
        Hooks {
            greedy: greedy_destructive_candidate,
            partition: destructive_partition_candidate,
        }
    }
}

pub struct Suite {
    pub name: &'static str,
    pub checked: usize,
    pub failure: Option<String>,
}

pub struct SelftestReport {
    pub suites: Vec<Suite>,
}

impl SelftestReport {
    pub fn passed(&self) -> bool {
        self.suites.iter().all(|s| s.failure.is_none())
    }
}

impl fmt::Display for SelftestReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.suites {
            match &s.failure {
                None => writeln!(f, "{}: pass ({} checks)", s.name, s.checked)?,
                Some(why) => writeln!(f, "{}: FAIL ({why})", s.name)?,
            }
        }
        writeln!(f, "{}", if self.passed() { "all suites passed" } else { "some suites failed" })
    }
}

/// Collects check results for one suite, keeping the first failure.
struct Tally {
    checked: usize,
    failure: Option<String>,
}

impl Tally {
    fn new() -> Self {
        Tally { checked: 0, failure: None }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok && self.failure.is_none() {
            self.failure = Some(what());
        }
    }

    fn run(&mut self, r: Result<bool>, what: impl FnOnce() -> String) {
        match r {
            Ok(ok) => self.check(ok, what),
            Err(e) => {
                let w = what();
                self.check(false, || format!("{w}: {e}"));
            }
        }
    }

    fn done(self, name: &'static str) -> Suite {
        Suite { name, checked: self.checked, failure: self.failure }
    }
}

const E_CYC: &str = "candidates: a b c\norder 1: a > b > c\norder 1: b > c > a\norder 1: c > a > b\n";
const THREE_CYCLE: &str = "# p beats d, d beats c, c beats p\ncandidates: p c d\norder 1: p > d > c\norder 1: c > p > d\norder 1: d > c > p\n";
const IRRATIONAL: &str = "candidates: a b c\ntable 3: a>b, b>c, c>a\ntable 2: b>a, a>c, b>c\n";
const PATH3: &str = "graph: 3\nedge: 1 2\nedge: 2 3\n";

fn pattern(n: usize, mut code: usize) -> Election {
    let names: Vec<String> = (0..n).map(|i| format!("c{i}")).collect();
    let mut d = DesiredOutcomes::from_names(&names).expect("valid names");
    for a in 0..n {
        for b in a + 1..n {
            match code % 3 {
                0 => d.beat(a, b),
                1 => d.tie(a, b),
                _ => d.beat(b, a),
            }
            code /= 3;
        }
    }
    realize_outcomes(&d)
}

fn pattern_count(n: usize) -> usize {
    3usize.pow((n * n.saturating_sub(1) / 2) as u32)
}

fn pad_suite() -> Suite {
    let mut t = Tally::new();
    for n in 0..=20 {
        let e = build_pad(n);
        for a in Alpha::grid() {
            let s = copeland_scores(&e, a);
            t.check(s.scaled().iter().all(|&x| x == n as u64 * a.den()), || format!("pad {n} at alpha {a}"));
        }
    }
    t.done("pad")
}

fn construction_suite(rng: &mut ChaCha8Rng) -> Suite {
    let mut t = Tally::new();
    for _ in 0..10 {
        let n = rng.random_range(1..=5);
        let base = pattern(n, rng.random_range(0..pattern_count(n)));
        let k: Vec<usize> = (0..n).map(|_| rng.random_range(0..=n)).collect();
        let spec = ScoredSpec { base, k };
        for a in Alpha::grid() {
            t.run(build_scored(&spec, a).map(|_| true), || format!("construction n={n} k={:?} alpha {a}", spec.k));
        }
    }
    t.done("construction")
}

fn realization_suite() -> Suite {
    let mut t = Tally::new();
    for n in 0..=4 {
        for code in 0..pattern_count(n) {
            let e = pattern(n, code);
            let table = outcome_table(&e);
            let mut c = code;
            let mut ok = true;
            for a in 0..n {
                for b in a + 1..n {
                    let want = [Outcome::Win, Outcome::Tie, Outcome::Loss][c % 3];
                    ok &= table.outcome(a, b) == want;
                    c /= 3;
                }
            }
            t.check(ok, || format!("pattern {code} on {n} candidates"));
        }
    }
    t.done("realization")
}

fn identity_suite(rng: &mut ChaCha8Rng) -> Suite {
    let mut t = Tally::new();
    for _ in 0..200 {
        let n = rng.random_range(1..=6);
        let voters = rng.random_range(0..=7);
        let ballots: Vec<Ballot> = (0..voters)
            .map(|_| {
                let m = rng.random_range(1..=3u32);
                if rng.random_bool(0.5) {
                    Ballot::table(PairTable::from_fn(n, |_, _| rng.random_bool(0.5)), m)
                } else {
                    let mut o: Vec<usize> = (0..n).collect();
                    for i in (1..n).rev() {
                        o.swap(i, rng.random_range(0..=i));
                    }
                    Ballot::order(o, m)
                }
            })
            .collect();
        let names: Vec<String> = (0..n).map(|i| format!("c{i}")).collect();
        let e = Election::from_names(&names, ballots).expect("valid election");
        let table = outcome_table(&e);
        let ties = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).filter(|&(a, b)| table.outcome(a, b) == Outcome::Tie).count() as u64;
        let pairs = (n * n.saturating_sub(1) / 2) as u64;
        for a in Alpha::grid() {
            let sum: u64 = copeland_scores(&e, a).scaled().iter().sum();
            let want = a.den() * (pairs - ties) + 2 * a.num() * ties;
            t.check(sum == want, || format!("score sum on {}", serialize_election(&e)));
        }
        let unit = e.unit_expanded(1 << 10).expect("small election");
        t.check(copeland_scores(&unit, Alpha::HALF) == copeland_scores(&e, Alpha::HALF), || {
            format!("unit expansion of {}", serialize_election(&e))
        });
    }
    t.done("identities")
}

fn equivalence_suite(hooks: &Hooks, rng: &mut ChaCha8Rng) -> Suite {
    let mut t = Tally::new();
    let limits = SizeLimits::default();
    let destructive = |kind| Problem::new(Direction::Destructive, kind);
    for n in 1..=4 {
        for code in 0..pattern_count(n) {
            let e = pattern(n, code);
            for model in [WinnerModel::NonUnique, WinnerModel::Unique] {
                let alpha = Alpha::HALF;
                let base = |kind| ControlInstance::new(destructive(kind), model, alpha, e.clone(), "c0");
                let spoilers: Vec<usize> = (n.div_ceil(2)..n).collect();
                let mut cases: Vec<(ControlInstance, Solver)> = vec![
                    (base(ControlKind::AddCandidatesUnlimited).with_spoilers(spoilers.clone()), hooks.greedy),
                    (base(ControlKind::AddCandidates).with_spoilers(spoilers).with_k(1), hooks.greedy),
                    (base(ControlKind::DeleteCandidates).with_k(1), hooks.greedy),
                ];
                for rule in [TieRule::Promote, TieRule::Eliminate] {
                    cases.push((base(ControlKind::PartitionCandidates(rule)), hooks.partition));
                    cases.push((base(ControlKind::RunoffPartitionCandidates(rule)), hooks.partition));
                }
                for (inst, solver) in cases {
                    let r = (|| {
                        let fast = solver(&inst)?;
                        let exact = solve_control_exact(&inst, &limits)?;
                        let ok = match fast.witness() {
                            Some(w) => verify_witness(&inst, w)?,
                            None => true,
                        };
                        Ok(ok && fast.is_yes() == exact.is_yes())
                    })();
                    t.run(r, || format!("{} {:?} on {}", inst.problem, model, serialize_election(&e.to_explicit())));
                }
            }
        }
    }
    for _ in 0..100 {
        let n = rng.random_range(1..=3);
        let voters = rng.random_range(1..=3);
        let ballots = (0..voters).map(|_| Ballot::table(PairTable::from_fn(n, |_, _| rng.random_bool(0.5)), 1u32)).collect();
        let names: Vec<String> = (0..n).map(|i| format!("c{i}")).collect();
        let e = Election::from_names(&names, ballots).expect("valid election");
        let k = rng.random_range(0..=2);
        let model = if rng.random_bool(0.5) { WinnerModel::Unique } else { WinnerModel::NonUnique };
        let r = (|| {
            let dp = destructive_microbribery_dp(&e, Alpha::HALF, "c0", k, model)?;
            let ex = solve_microbribery_exact(&e, Alpha::HALF, "c0", k, Direction::Destructive, model, &limits)?;
            Ok(dp.is_yes() == ex.is_yes())
        })();
        t.run(r, || format!("microbribery k={k} on {}", serialize_election(&e)));
    }
    t.done("equivalence")
}

fn reduction_suite() -> Suite {
    let mut t = Tally::new();
    let limits = SizeLimits::default();
    for g in [Graph::path(2), Graph::path(3)] {
        for k in 0..=g.n() {
            for model in [WinnerModel::NonUnique, WinnerModel::Unique] {
                let a = Alpha::HALF;
                let instances = [
                    reduce_vc_to_ccacu(&g, k, a, model),
                    reduce_vc_to_ccdc(&g, k, a, model),
                    reduce_vc_to_ccrpc(&g, k, TieRule::Promote, a, model),
                    reduce_vc_to_ccrpc(&g, k, TieRule::Eliminate, a, model),
                ];
                for inst in instances {
                    let r = inst.and_then(|i| verify_reduction(&g, k, &i, &limits)).map(|rep| rep.equal);
                    t.run(r, || format!("graph {} vertices k={k} {model:?}", g.n()));
                }
            }
        }
    }
    t.done("reductions")
}

fn fixture_suite(dir: Option<&Path>) -> Suite {
    let mut t = Tally::new();
    let mut elections: Vec<(String, String)> = vec![
        ("e_cyc".into(), E_CYC.into()),
        ("three_cycle".into(), THREE_CYCLE.into()),
        ("irrational".into(), IRRATIONAL.into()),
    ];
    let mut graphs: Vec<(String, String)> = vec![("path3".into(), PATH3.into())];
    if let Some(dir) = dir {
        let mut paths: Vec<_> = std::fs::read_dir(dir).into_iter().flatten().flatten().map(|e| e.path()).collect();
        paths.sort();
        for p in paths {
            let Ok(text) = std::fs::read_to_string(&p) else { continue };
            let name = p.display().to_string();
            match p.extension().and_then(|e| e.to_str()) {
                Some("cop") => elections.push((name, text)),
                Some("graph") => graphs.push((name, text)),
                _ => {}
            }
        }
    }
    for (name, text) in elections {
        let ok = parse_election(&text).is_ok_and(|e| {
            let s = serialize_election(&e);
            parse_election(&s).is_ok_and(|e2| e2 == e && serialize_election(&e2) == s)
        });
        t.check(ok, || format!("round trip of {name}"));
    }
    for (name, text) in graphs {
        let ok = parse_graph(&text).is_ok_and(|g| parse_graph(&serialize_graph(&g)).is_ok_and(|g2| g2 == g));
        t.check(ok, || format!("round trip of {name}"));
    }
    t.done("fixtures")
}

/// Runs every suite. Files `*.cop` and `*.graph` in `fixtures` are added to
/// the built-in fixtures.
pub fn run(hooks: &Hooks, fixtures: Option<&Path>) -> SelftestReport {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5e1f);
    SelftestReport {
        suites: vec![
            pad_suite(),
            construction_suite(&mut rng),
            realization_suite(),
            identity_suite(&mut rng),
            equivalence_suite(hooks, &mut rng),
            reduction_suite(),
            fixture_suite(fixtures),
        ],
    }
}
