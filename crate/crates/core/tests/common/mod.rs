//! Equivalence grids shared by the solver tests and the acceptance run.
#![allow(dead_code, clippy::needless_range_loop)]

use copeland::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const ALPHAS: [(u64, u64); 4] = [(0, 1), (1, 3), (1, 2), (1, 1)];
pub const MODELS: [WinnerModel; 2] = [WinnerModel::NonUnique, WinnerModel::Unique];
pub const RULES: [TieRule; 2] = [TieRule::Promote, TieRule::Eliminate];

pub fn alpha(a: (u64, u64)) -> Alpha {
    Alpha::new(a.0, a.1).unwrap()
}

#[derive(Default, Debug)]
pub struct Agreement {
    pub total: usize,
    pub agree: usize,
    pub mismatches: Vec<String>,
}

impl Agreement {
    pub fn record(&mut self, what: impl FnOnce() -> String, fast: &Decision, exact: &Decision, witness_ok: bool) {
        self.total += 1;
        if fast.is_yes() == exact.is_yes() && witness_ok {
            self.agree += 1;
        } else if self.mismatches.len() < 5 {
            self.mismatches.push(format!("{} fast={} exact={} witness_ok={witness_ok}", what(), fast.is_yes(), exact.is_yes()));
        }
    }

    pub fn merge(&mut self, other: Agreement) {
        self.total += other.total;
        self.agree += other.agree;
        self.mismatches.extend(other.mismatches.into_iter().take(5));
    }

    pub fn all_agree(&self) -> bool {
        self.total > 0 && self.agree == self.total
    }
}

fn names(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("c{i}")).collect()
}

/// Every outcome pattern on `n` candidates, each realized as an election.
pub fn all_patterns(n: usize) -> impl Iterator<Item = Election> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
    let count = 3usize.pow(pairs.len() as u32);
    (0..count).map(move |mut code| {
        let mut d = DesiredOutcomes::from_names(&names(n)).unwrap();
        for &(a, b) in &pairs {
            match code % 3 {
                0 => d.beat(a, b),
                1 => d.tie(a, b),
                _ => d.beat(b, a),
            }
            code /= 3;
        }
        realize_outcomes(&d)
    })
}

pub fn orders(n: usize) -> Vec<Vec<usize>> {
    fn rec(v: &mut Vec<usize>, i: usize, out: &mut Vec<Vec<usize>>) {
        if i == v.len() {
            out.push(v.clone());
            return;
        }
        for j in i..v.len() {
            v.swap(i, j);
            rec(v, i + 1, out);
            v.swap(i, j);
        }
    }
    let mut out = Vec::new();
    rec(&mut (0..n).collect(), 0, &mut out);
    out
}

pub fn random_ballot(rng: &mut ChaCha8Rng, n: usize, tables: bool, m: u32) -> Ballot {
    if tables {
        Ballot::table(PairTable::from_fn(n, |_, _| rng.random_bool(0.5)), m)
    } else {
        let mut o: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            o.swap(i, rng.random_range(0..=i));
        }
        Ballot::order(o, m)
    }
}

/// Random election with unit voters.
pub fn random_election(rng: &mut ChaCha8Rng, n: usize, voters: usize, tables: bool) -> Election {
    let ballots = (0..voters).map(|_| random_ballot(rng, n, tables, 1)).collect();
    Election::from_names(&names(n), ballots).unwrap()
}

fn destructive(kind: ControlKind) -> Problem {
    Problem::new(Direction::Destructive, kind)
}

/// Destructive candidate addition and deletion instances on `e` with `p = c0`.
fn greedy_instances(e: &Election, a: Alpha, model: WinnerModel, ks: &[usize], registered: usize) -> Vec<ControlInstance> {
    let n = e.len();
    let mut out = Vec::new();
    let base = |kind| ControlInstance::new(destructive(kind), model, a, e.clone(), "c0");
    let spoilers: Vec<usize> = (registered..n).collect();
    out.push(base(ControlKind::AddCandidatesUnlimited).with_spoilers(spoilers.clone()));
    for &k in ks {
        out.push(base(ControlKind::DeleteCandidates).with_k(k));
        out.push(base(ControlKind::AddCandidates).with_spoilers(spoilers.clone()).with_k(k));
    }
    out
}

fn partition_instances(e: &Election, a: Alpha, model: WinnerModel) -> Vec<ControlInstance> {
    RULES
        .iter()
        .flat_map(|&r| [ControlKind::PartitionCandidates(r), ControlKind::RunoffPartitionCandidates(r)])
        .map(|kind| ControlInstance::new(destructive(kind), model, a, e.clone(), "c0"))
        .collect()
}

fn compare(agreement: &mut Agreement, inst: &ControlInstance, fast: &dyn Fn(&ControlInstance) -> Result<Decision>) {
    let limits = SizeLimits::default();
    let f = fast(inst).unwrap();
    let x = solve_control_exact(inst, &limits).unwrap();
    let ok = f.witness().is_none_or(|w| verify_witness(inst, w).unwrap());
    agreement.record(|| format!("{} alpha={} {:?} k={:?} {:?}", inst.problem, inst.alpha, inst.model, inst.k, outcome_table(&inst.election)), &f, &x, ok);
}

/// Exhaustive patterns up to `max_n` candidates plus `random` random
/// elections with up to 7 candidates and 7 unit voters.
pub fn candidate_grid(max_n: usize, random: usize, seed: u64, partition: bool) -> Agreement {
    let mut agreement = Agreement::default();
    let solver: &dyn Fn(&ControlInstance) -> Result<Decision> =
        if partition { &destructive_partition_candidate } else { &greedy_destructive_candidate };
    let build = |e: &Election, a, m, ks: &[usize], reg| {
        if partition {
            partition_instances(e, a, m)
        } else {
            greedy_instances(e, a, m, ks, reg)
        }
    };
    for n in 1..=max_n {
        for e in all_patterns(n) {
            for &a in &ALPHAS {
                for m in MODELS {
                    for inst in build(&e, alpha(a), m, &[1, 2], n.div_ceil(2)) {
                        compare(&mut agreement, &inst, solver);
                    }
                }
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..random {
        let n = rng.random_range(2..=7);
        let (v, tables) = (rng.random_range(1..=7), rng.random_bool(0.3));
        let e = random_election(&mut rng, n, v, tables);
        let a = alpha(ALPHAS[rng.random_range(0..4)]);
        let m = MODELS[rng.random_range(0..2)];
        let k = rng.random_range(0..=3);
        let reg = rng.random_range(1..=n);
        for inst in build(&e, a, m, &[k], reg) {
            compare(&mut agreement, &inst, solver);
        }
    }
    agreement
}

/// Random irrational elections with at most 4 candidates and 4 unit voters.
pub fn microbribery_grid(rounds: usize, seed: u64) -> Agreement {
    let mut agreement = Agreement::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let limits = SizeLimits::default();
    for _ in 0..rounds {
        let n = rng.random_range(1..=4);
        let v = rng.random_range(1..=4);
        let e = random_election(&mut rng, n, v, true);
        for a in [(0, 1), (1, 2), (1, 1)] {
            for m in MODELS {
                for k in 0..=3 {
                    let f = destructive_microbribery_dp(&e, alpha(a), "c0", k, m).unwrap();
                    let x = solve_microbribery_exact(&e, alpha(a), "c0", k, Direction::Destructive, m, &limits).unwrap();
                    let inst = ControlInstance::new(destructive(ControlKind::Microbribery), m, alpha(a), e.clone(), "c0").with_k(k);
                    let ok = f.witness().is_none_or(|w| verify_witness(&inst, w).unwrap());
                    agreement.record(|| format!("micro alpha={a:?} {m:?} k={k} {e:?}"), &f, &x, ok);
                }
            }
        }
    }
    agreement
}

pub fn random_goal(rng: &mut ChaCha8Rng, n: usize) -> GoalSpec {
    let c = |rng: &mut ChaCha8Rng| format!("c{}", rng.random_range(0..n));
    match rng.random_range(0..6) {
        0 => GoalSpec::MakeWinner(c(rng)),
        1 => GoalSpec::MakeUniqueWinner(c(rng)),
        2 => GoalSpec::PrecludeWinner(c(rng)),
        3 => GoalSpec::PrecludeUniqueWinner(c(rng)),
        4 if n >= 2 => GoalSpec::ScoreOrder(vec![("c0".into(), Relation::Less, "c1".into())]),
        _ if n >= 3 => GoalSpec::GroupDominance(vec!["c0".into(), "c1".into()], vec!["c2".into()]),
        _ => GoalSpec::MakeWinner("c0".into()),
    }
}

const CANDIDATE_KINDS: [ControlKind; 7] = [
    ControlKind::AddCandidatesUnlimited,
    ControlKind::AddCandidates,
    ControlKind::DeleteCandidates,
    ControlKind::PartitionCandidates(TieRule::Promote),
    ControlKind::PartitionCandidates(TieRule::Eliminate),
    ControlKind::RunoffPartitionCandidates(TieRule::Promote),
    ControlKind::RunoffPartitionCandidates(TieRule::Eliminate),
];

const VOTER_KINDS: [ControlKind; 4] = [
    ControlKind::AddVoters,
    ControlKind::DeleteVoters,
    ControlKind::PartitionVoters(TieRule::Promote),
    ControlKind::PartitionVoters(TieRule::Eliminate),
];

fn random_instance(rng: &mut ChaCha8Rng, kind: ControlKind, n: usize, voters: usize, pool: usize, tables: bool) -> ControlInstance {
    let e = random_election(rng, n, voters, tables);
    let dir = if rng.random_bool(0.5) { Direction::Constructive } else { Direction::Destructive };
    let problem = Problem::new(dir, kind);
    let mut inst = ControlInstance::new(problem, MODELS[rng.random_range(0..2)], alpha(ALPHAS[rng.random_range(0..4)]), e, "c0");
    if problem.needs_spoilers() {
        let reg = rng.random_range(1..=n);
        inst = inst.with_spoilers((reg..n).collect());
    }
    if problem.needs_pool() {
        inst = inst.with_pool((0..pool).map(|_| random_ballot(rng, n, tables, 1)).collect());
    }
    if problem.bounded() {
        inst = inst.with_k(rng.random_range(0..=3));
    }
    let goal = random_goal(rng, n);
    inst.with_goal(goal)
}

/// Both FPT solvers against the exhaustive solver on random in-bound instances.
pub fn fpt_grid(rounds: usize, seed: u64) -> Agreement {
    let mut agreement = Agreement::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let limits = SizeLimits::default();
    let run = |inst: &ControlInstance, bound: BoundParameter, candidate: bool, agreement: &mut Agreement| {
        let goal = inst.goal.clone().unwrap();
        let f = if candidate { fpt_candidate_control(inst, &bound, &goal) } else { fpt_voter_control(inst, &bound, &goal) }.unwrap();
        let x = solve_control_exact(inst, &limits).unwrap();
        let ok = f.witness().is_none_or(|w| verify_witness(inst, w).unwrap());
        agreement.record(|| format!("{} {bound} {:?} alpha={} {:?} k={:?} {:?}", inst.problem, goal, inst.alpha, inst.model, inst.k, inst.election), &f, &x, ok);
    };
    for _ in 0..rounds {
        // Candidate control within BC_4.
        let kind = CANDIDATE_KINDS[rng.random_range(0..CANDIDATE_KINDS.len())];
        let n = rng.random_range(1..=4);
        let v = rng.random_range(0..=5);
        let tables = rng.random_bool(0.3);
        let inst = random_instance(&mut rng, kind, n, v, 0, tables);
        run(&inst, BoundParameter::candidates(4), true, &mut agreement);

        // Voter control within BC_3 (partition) or BC_4.
        let kind = VOTER_KINDS[rng.random_range(0..VOTER_KINDS.len())];
        let n = if matches!(kind, ControlKind::PartitionVoters(_)) { rng.random_range(1..=3) } else { rng.random_range(1..=4) };
        let (v, pool, tables) = (rng.random_range(0..=5), rng.random_range(0..=3), rng.random_bool(0.3));
        let inst = random_instance(&mut rng, kind, n, v, pool, tables);
        run(&inst, BoundParameter::candidates(n), false, &mut agreement);

        // Voter control within BV_6.
        let kind = VOTER_KINDS[rng.random_range(0..VOTER_KINDS.len())];
        let n = rng.random_range(1..=5);
        let voters = rng.random_range(0..=4);
        let pool = rng.random_range(0..=2);
        let tables = rng.random_bool(0.3);
        let inst = random_instance(&mut rng, kind, n, voters, pool, tables);
        run(&inst, BoundParameter::voters(6), false, &mut agreement);
    }
    agreement
}

/// Random election with up to `max_voters` voters spread over lines with
/// multiplicities, mixing orders and tables.
pub fn mixed_election(rng: &mut ChaCha8Rng, n: usize, max_voters: usize) -> Election {
    let mut left = rng.random_range(0..=max_voters);
    let mut ballots = Vec::new();
    while left > 0 {
        let m = rng.random_range(1..=left.min(3));
        left -= m;
        let tables = rng.random_bool(0.5);
        ballots.push(random_ballot(rng, n, tables, m as u32));
    }
    Election::from_names(&names(n), ballots).unwrap()
}

/// Head-to-head counts straight from the ballots.
fn pair_counts(e: &Election) -> Vec<Vec<num_bigint::BigUint>> {
    let n = e.len();
    let mut c = vec![vec![num_bigint::BigUint::from(0u32); n]; n];
    for b in e.ballots() {
        for a in 0..n {
            for d in 0..n {
                if a != d && b.prefers(a, d) {
                    c[a][d] += &b.multiplicity;
                }
            }
        }
    }
    c
}

/// Election with candidate `c` moved to position `perm[c]`.
pub fn relabel(e: &Election, perm: &[usize]) -> Election {
    let n = e.len();
    let mut inv = vec![0; n];
    for (c, &p) in perm.iter().enumerate() {
        inv[p] = c;
    }
    let names: Vec<String> = (0..n).map(|i| e.candidate(inv[i]).as_str().to_string()).collect();
    let ballots = e
        .ballots()
        .map(|b| {
            let preference = match &b.preference {
                Preference::Order(o) => Preference::Order(o.iter().map(|&c| perm[c]).collect()),
                Preference::Table(t) => Preference::Table(PairTable::from_fn(n, |a, d| t.prefers(inv[a], inv[d]))),
            };
            Ballot { preference, multiplicity: b.multiplicity.clone() }
        })
        .collect();
    Election::from_names(&names, ballots).unwrap()
}

/// The five core identities on one election; `Err` names the first failure.
pub fn check_identities(e: &Election, perm: &[usize]) -> std::result::Result<(), String> {
    let n = e.len();
    let counts = pair_counts(e);
    let grid = Alpha::grid();
    for a in grid {
        let (t, s) = (a.den(), a.num());
        let scores = copeland_scores(e, a);
        // Decomposition into per-contest points.
        let mut decisive = 0u64;
        let mut ties = 0u64;
        for c in 0..n {
            let mut want = 0;
            for d in 0..n {
                if d == c {
                    continue;
                }
                want += match counts[c][d].cmp(&counts[d][c]) {
                    std::cmp::Ordering::Greater => t,
                    std::cmp::Ordering::Equal => s,
                    std::cmp::Ordering::Less => 0,
                };
                if c < d {
                    if counts[c][d] == counts[d][c] {
                        ties += 1;
                    } else {
                        decisive += 1;
                    }
                }
            }
            if scores.scaled()[c] != want {
                return Err(format!("decomposition: {} at alpha {a}", e.candidate(c)));
            }
        }
        if scores.scaled().iter().sum::<u64>() != t * decisive + 2 * s * ties {
            return Err(format!("score sum at alpha {a}"));
        }
        // Neutrality.
        let moved = copeland_scores(&relabel(e, perm), a);
        if (0..n).any(|c| moved.scaled()[perm[c]] != scores.scaled()[c]) {
            return Err(format!("relabeling at alpha {a}"));
        }
        // Succinct expansion.
        if let Ok(unit) = e.unit_expanded(1 << 12) {
            if copeland_scores(&unit, a) != scores {
                return Err(format!("unit expansion at alpha {a}"));
            }
        }
    }
    // Odd electorates have no ties, so alpha does not matter.
    if (e.total_multiplicity() % 2u32) == num_bigint::BigUint::from(1u32) {
        let base = copeland_scores(e, Alpha::ZERO);
        for a in grid {
            let s = copeland_scores(e, a);
            let same = s.scaled().iter().zip(base.scaled()).all(|(x, y)| *x * base.alpha().den() == *y * a.den());
            if !same {
                return Err(format!("odd electorate scores depend on alpha {a}"));
            }
            for m in MODELS {
                if s.winners(m) != base.winners(m) {
                    return Err(format!("odd electorate winners depend on alpha {a}"));
                }
            }
        }
    }
    Ok(())
}

pub fn random_perm(rng: &mut ChaCha8Rng, n: usize) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        p.swap(i, rng.random_range(0..=i));
    }
    p
}

pub fn fixture(name: &str) -> String {
    std::path::PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name).display().to_string()
}

pub fn call(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("copeland").chain(args.iter().copied());
    let code = copeland::cli::run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

/// Runs twice and insists on identical bytes.
pub fn stable(args: &[&str]) -> (i32, String) {
    let (c1, o1, _) = call(args);
    let (c2, o2, _) = call(args);
    assert_eq!((c1, &o1), (c2, &o2), "{args:?}");
    (c1, o1)
}

/// (arguments with fixture names, expected stdout)
pub fn golden() -> Vec<(Vec<String>, &'static str)> {
    let f = fixture;
    let v = |s: &[&str]| s.iter().map(|x| x.to_string()).collect::<Vec<_>>();
    vec![
        (v(&["winners", "--alpha", "1/2", "--election", &f("e_cyc.cop"), "--model", "nonunique"]), "a b c\n"),
        (v(&["winners", "--alpha", "1/2", "--election", &f("e_cyc.cop"), "--model", "unique"]), "\n"),
        (v(&["score", "--alpha", "1/2", "--election", &f("e_cyc.cop")]), "a\t2/2\nb\t2/2\nc\t2/2\n"),
        (v(&["score", "--alpha", "1/3", "--election", &f("irrational.cop")]), "a\t0/3\nb\t3/3\nc\t6/3\n"),
        (
            v(&["solve", "--problem", "DCDC", "--method", "greedy", "--alpha", "1/2", "--election", &f("three_cycle.cop"), "--k", "1", "--p", "p"]),
            "YES\ndelete: d\n",
        ),
        (
            v(&["solve", "--problem", "DCDC", "--method", "exact", "--alpha", "1/2", "--election", &f("three_cycle.cop"), "--k", "0", "--p", "p"]),
            "NO\n",
        ),
        (
            v(&[
                "solve", "--problem", "DCAC", "--method", "greedy", "--alpha", "1/2", "--election", &f("dcac.cop"),
                "--spoiler-candidates", &f("dcac_spoilers.cop"), "--k", "1", "--p", "p", "--model", "unique",
            ]),
            "YES\nadd: d\n",
        ),
        (
            v(&[
                "solve", "--problem", "CCAV", "--method", "fpt", "--alpha", "1/2", "--election", &f("ccav.cop"),
                "--voter-pool", &f("ccav_pool.cop"), "--k", "2", "--goal", "unique:p", "--bound", "BC_2",
            ]),
            "YES\nadd-voters: 1:2\n",
        ),
        (
            v(&[
                "solve", "--problem", "DESTRUCTIVE-MICROBRIBERY", "--method", "dp", "--alpha", "1/2", "--election",
                &f("micro_tie.cop"), "--k", "2", "--p", "p", "--model", "unique",
            ]),
            "YES\nflip: 1 p c\nflip: 2 p c\n",
        ),
        (
            v(&[
                "solve", "--problem", "CCRPC-TE", "--alpha", "1/2", "--election", &f("e_cyc.cop"), "--p", "a", "--model",
                "unique", "--scores",
            ]),
            "YES\nfirst: a\nsecond: b c\na\t2/2\nb\t2/2\nc\t2/2\n",
        ),
        (
            v(&["verify-reduction", "--to", "CCDC", "--graph", &f("edge.graph"), "--k", "1", "--alpha", "1/2"]),
            "",
        ),
    ]
}
