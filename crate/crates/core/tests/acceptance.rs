//! Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::*;
use copeland::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Verdict {
    ok: bool,
    detail: String,
}

fn pass(detail: impl Into<String>) -> Verdict {
    Verdict { ok: true, detail: detail.into() }
}

fn fail(detail: impl Into<String>) -> Verdict {
    Verdict { ok: false, detail: detail.into() }
}

fn within(ok: bool, elapsed: Duration, limit: Duration, detail: String) -> Verdict {
    if !ok {
        fail(detail)
    } else if elapsed > limit {
        fail(format!("{detail}; {elapsed:.2?} over the {limit:?} limit"))
    } else {
        pass(format!("{detail}; {elapsed:.2?}"))
    }
}

fn random_pattern(rng: &mut ChaCha8Rng, n: usize) -> DesiredOutcomes {
    let names: Vec<String> = (0..n).map(|i| format!("c{i}")).collect();
    let mut d = DesiredOutcomes::from_names(&names).unwrap();
    for a in 0..n {
        for b in a + 1..n {
            match rng.random_range(0..3) {
                0 => d.beat(a, b),
                1 => d.tie(a, b),
                _ => d.beat(b, a),
            }
        }
    }
    d
}

fn pad() -> Verdict {
    let start = Instant::now();
    let mut checks = 0;
    for n in 0..=50 {
        let e = build_pad(n);
        for a in Alpha::grid() {
            let s = copeland_scores(&e, a);
            if let Some(c) = (0..e.len()).find(|&c| s.scaled()[c] != n as u64 * a.den()) {
                return fail(format!("n={n} alpha={a}: {} scores {}", e.candidate(c), s.scaled()[c]));
            }
            checks += e.len();
        }
    }
    within(true, start.elapsed(), Duration::from_secs(10), format!("{checks} candidate scores"))
}

fn construction() -> Verdict {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for round in 0..100 {
        let n = rng.random_range(1..=8);
        let base = realize_outcomes(&random_pattern(&mut rng, n));
        let k: Vec<usize> = (0..n).map(|_| rng.random_range(0..=n)).collect();
        let table = outcome_table(&base);
        let ties: Vec<u64> = (0..n).map(|a| (0..n).filter(|&b| b != a && table.outcome(a, b) == Outcome::Tie).count() as u64).collect();
        let spec = ScoredSpec { base, k: k.clone() };
        for a in Alpha::grid() {
            let e = match build_scored(&spec, a) {
                Ok(e) => e,
                Err(err) => return fail(format!("round {round} alpha={a}: {err}")),
            };
            let s = copeland_scores(&e, a);
            let (t, sn) = (a.den(), a.num());
            for i in 0..n {
                let want = t * (2 * n * n - k[i]) as u64 + sn * ties[i];
                if s.scaled()[i] != want {
                    return fail(format!("round {round} alpha={a}: c{i} scores {} not {want}", s.scaled()[i]));
                }
            }
            let cap = t * (n * n + 1) as u64;
            if (n..e.len()).any(|d| s.scaled()[d] > cap) {
                return fail(format!("round {round} alpha={a}: a dummy exceeds {cap}"));
            }
        }
    }
    within(true, start.elapsed(), Duration::from_secs(60), "100 bases x 5 alphas".into())
}

fn graphs() -> Vec<Graph> {
    let mut gs: Vec<Graph> = (0..=4).flat_map(Graph::all).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    gs.extend((0..50).map(|_| Graph::random(5, &mut rng)));
    gs
}

fn registered_scores(inst: &ControlInstance) -> ScoreVector {
    scores_from_table(&outcome_table(&inst.election).restrict(&inst.registered()), inst.alpha)
}

/// Criteria 3 and 4 share the generated instances.
fn reductions() -> (Verdict, Verdict) {
    let start = Instant::now();
    let limits = SizeLimits::default();
    let (mut total, mut agree, mut clauses) = (0usize, 0usize, 0usize);
    let mut first_mismatch = None;
    let mut clause_failure = None;
    let ccacu_alphas = [Alpha::new(1, 3).unwrap(), Alpha::HALF, Alpha::new(2, 3).unwrap()];
    for g in graphs() {
        let (n, m) = (g.n() as u64, g.m() as u64);
        for k in 0..=g.n() {
            let vc = vc_brute(&g, k);
            let mut instances = Vec::new();
            for model in MODELS {
                let u = (model == WinnerModel::Unique) as u64;
                for a in Alpha::grid() {
                    instances.push(reduce_vc_to_ccdc(&g, k, a, model).map(|i| {
                        // p scores m·alpha + 2(n + m) + 2 (+1 in the unique model).
                        let want = a.num() * m + a.den() * (2 * (n + m) + 2 + u);
                        (i, Some(want))
                    }));
                    for rule in RULES {
                        instances.push(reduce_vc_to_ccrpc(&g, k, rule, a, model).map(|i| (i, None)));
                    }
                }
                if m > 0 {
                    let l = 2 * n + 2 * m;
                    for a in ccacu_alphas {
                        // p scores 2l² − 2 among the registered candidates.
                        instances.push(reduce_vc_to_ccacu(&g, k, a, model).map(|i| (i, Some(a.den() * (2 * l * l - 2)))));
                    }
                }
            }
            for generated in instances {
                let (inst, p_score) = match generated {
                    Ok(x) => x,
                    Err(e) => {
                        clause_failure.get_or_insert_with(|| format!("{g:?} k={k}: {e}"));
                        continue;
                    }
                };
                clauses += 1;
                if let Some(want) = p_score {
                    let got = registered_scores(&inst).get("p");
                    if got != Some(want) {
                        clause_failure.get_or_insert_with(|| format!("{} {g:?} k={k}: p scores {got:?} not {want}", inst.problem));
                    }
                }
                total += 1;
                let yes = solve_control_exact(&inst, &limits).map(|d| d.is_yes());
                if yes.as_ref() == Ok(&vc) {
                    agree += 1;
                } else {
                    first_mismatch.get_or_insert_with(|| format!("{} {g:?} k={k} alpha={} {:?}: {yes:?}", inst.problem, inst.alpha, inst.model));
                }
            }
        }
    }
    let elapsed = start.elapsed();
    let c3 = within(
        first_mismatch.is_none(),
        elapsed,
        Duration::from_secs(15 * 60),
        match &first_mismatch {
            None => format!("{agree}/{total} instances agree with vertex cover"),
            Some(m) => format!("{agree}/{total} agree; first mismatch {m}"),
        },
    );
    let c4 = match clause_failure {
        None => pass(format!("{clauses} generated instances passed their score checks")),
        Some(f) => fail(f),
    };
    (c3, c4)
}

fn fast_solvers() -> Verdict {
    let start = Instant::now();
    let grids = [
        ("greedy", candidate_grid(5, 400, 5, false)),
        ("partition", candidate_grid(5, 400, 6, true)),
        ("microbribery", microbribery_grid(600, 7)),
        ("fpt", fpt_grid(1500, 8)),
    ];
    let mut parts = Vec::new();
    let mut ok = true;
    for (name, a) in &grids {
        ok &= a.all_agree();
        parts.push(format!("{name} {}/{}", a.agree, a.total));
        if let Some(m) = a.mismatches.first() {
            parts.push(format!("first mismatch {m}"));
        }
    }
    within(ok, start.elapsed(), Duration::from_secs(20 * 60), parts.join(", "))
}

fn identities() -> Verdict {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for i in 0..1000 {
        let n = rng.random_range(1..=8);
        let e = mixed_election(&mut rng, n, 9);
        let perm = random_perm(&mut rng, n);
        if let Err(why) = check_identities(&e, &perm) {
            return fail(format!("election {i}: {why}"));
        }
    }
    within(true, start.elapsed(), Duration::from_secs(60), "1000 elections".into())
}

fn realization() -> Verdict {
    let start = Instant::now();
    let round_trips = |d: &DesiredOutcomes| {
        let t = outcome_table(&realize_outcomes(d));
        let n = d.len();
        t.len() == n && (0..n).all(|a| (0..n).all(|b| a == b || t.outcome(a, b) == d.get(a, b)))
    };
    let mut count = 0;
    for n in 0..=4 {
        let names: Vec<String> = (0..n).map(|i| format!("c{i}")).collect();
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
        for code in 0..3usize.pow(pairs.len() as u32) {
            let mut d = DesiredOutcomes::from_names(&names).unwrap();
            let mut c = code;
            for &(a, b) in &pairs {
                match c % 3 {
                    0 => d.beat(a, b),
                    1 => d.tie(a, b),
                    _ => d.beat(b, a),
                }
                c /= 3;
            }
            if !round_trips(&d) {
                return fail(format!("pattern {code} on {n} candidates"));
            }
            count += 1;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for i in 0..500 {
        if !round_trips(&random_pattern(&mut rng, 10)) {
            return fail(format!("random pattern {i} on 10 candidates"));
        }
        count += 1;
    }
    within(true, start.elapsed(), Duration::from_secs(30), format!("{count} patterns"))
}

fn performance() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let names: Vec<String> = (0..500).map(|i| format!("c{i}")).collect();
    let ballots: Vec<Ballot> = (0..10_000)
        .map(|_| {
            let mut o: Vec<usize> = (0..500).collect();
            for i in (1..500).rev() {
                o.swap(i, rng.random_range(0..=i));
            }
            Ballot { preference: Preference::Order(o), multiplicity: rng.random_range(1..1000u32).into() }
        })
        .collect();
    let e = Election::from_names(&names, ballots).unwrap();
    let start = Instant::now();
    let s = copeland_scores(&e, Alpha::HALF);
    let scoring = start.elapsed();
    let mut notes = vec![format!("scoring {scoring:.2?}")];
    let mut ok = s.scaled().len() == 500 && scoring < Duration::from_secs(1);

    let e = realize_outcomes(&random_pattern(&mut rng, 300));
    let inst = ControlInstance::new(Problem::new(Direction::Destructive, ControlKind::DeleteCandidates), WinnerModel::Unique, Alpha::HALF, e, "c0").with_k(20);
    let start = Instant::now();
    let decided = greedy_destructive_candidate(&inst).is_ok();
    let greedy = start.elapsed();
    notes.push(format!("greedy {greedy:.2?}"));
    ok &= decided && greedy < Duration::from_secs(1);

    let triangle = Graph::complete(3);
    let start = Instant::now();
    let generated = reduce_vc_to_ccacu(&triangle, 2, Alpha::HALF, WinnerModel::Unique);
    let generation = start.elapsed();
    let registered = generated.as_ref().map(|i| i.registered().len()).unwrap_or(0);
    notes.push(format!("generator {generation:.2?} ({registered} registered)"));
    ok &= registered == 300 && generation < Duration::from_secs(30);
    if ok {
        pass(notes.join(", "))
    } else {
        fail(notes.join(", "))
    }
}

fn cli() -> Verdict {
    let mut checks = 0;
    for (args, want) in golden() {
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let (c1, o1, _) = call(&args);
        let (c2, o2, _) = call(&args);
        if (c1, &o1) != (c2, &o2) || c1 != 0 || (!want.is_empty() && o1 != want) {
            return fail(format!("{args:?} gave exit {c1}: {o1:?}"));
        }
        checks += 1;
    }
    let cyc = fixture("e_cyc.cop");
    let codes: [(&[&str], i32); 5] = [
        (&["winners", "--alpha", "1/2", "--election", &cyc], 0),
        (&[], 2),
        (&["score", "--alpha", "3/2", "--election", &cyc], 2),
        (&["score", "--alpha", "1/2", "--election", "/nonexistent.cop"], 2),
        (&["solve", "--problem", "DCDC", "--alpha", "1/2", "--election", &cyc, "--p", "a"], 2),
    ];
    for (args, want) in codes {
        if call(args).0 != want {
            return fail(format!("{args:?} did not exit {want}"));
        }
        checks += 1;
    }
    let dir = tempfile::tempdir().unwrap();
    let big = dir.path().join("big.cop");
    std::fs::write(&big, "candidates: a b c\norder 100: a > b > c\n").unwrap();
    if call(&["solve", "--problem", "BRIBERY", "--alpha", "1/2", "--election", &big.display().to_string(), "--k", "2", "--p", "c"]).0 != 3 {
        return fail("budget overrun did not exit 3");
    }
    let mut broken_hooks = copeland::selftest::Hooks::default();
    fn never(_: &ControlInstance) -> copeland::error::Result<Decision> {
        Ok(Decision::No)
    }
    broken_hooks.greedy = never;
    if copeland::cli::run_with_hooks(["copeland", "selftest"], &broken_hooks, &mut Vec::new(), &mut Vec::new()) != 1 {
        return fail("a broken solver did not fail the selftest");
    }
    checks += 2;
    let fixtures = std::path::PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures");
    for entry in std::fs::read_dir(fixtures).unwrap() {
        let path = entry.unwrap().path();
        let text = std::fs::read_to_string(&path).unwrap();
        let ok = match path.extension().and_then(|e| e.to_str()) {
            Some("cop") => parse_election(&text).is_ok_and(|e| {
                let s = serialize_election(&e);
                parse_election(&s).is_ok_and(|back| back == e && serialize_election(&back) == s)
            }),
            Some("graph") => parse_graph(&text).is_ok_and(|g| parse_graph(&serialize_graph(&g)).is_ok_and(|back| back == g)),
            _ => continue,
        };
        if !ok {
            return fail(format!("{} does not round-trip", path.display()));
        }
        checks += 1;
    }
    pass(format!("{checks} checks"))
}

fn main() -> ExitCode {
    let (c3, c4) = reductions();
    let results = [
        ("pad scores", pad()),
        ("prescribed-score construction", construction()),
        ("reduction equivalence", c3),
        ("generator score checks", c4),
        ("fast solvers match exhaustive", fast_solvers()),
        ("core identities", identities()),
        ("realization round trip", realization()),
        ("performance floor", performance()),
        ("cli contract", cli()),
    ];
    let mut all = true;
    for (i, (name, r)) in results.iter().enumerate() {
        all &= r.ok;
        println!("criterion {} {name}: {} ({})", i + 1, if r.ok { "PASS" } else { "FAIL" }, r.detail);
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
