mod common;

use common::*;
use copeland::*;
use num_bigint::BigUint;

fn e_cyc() -> Election {
    Election::from_names(
        &["a", "b", "c"],
        vec![Ballot::order(vec![0, 1, 2], 1u32), Ballot::order(vec![1, 2, 0], 1u32), Ballot::order(vec![2, 0, 1], 1u32)],
    )
    .unwrap()
}

fn outcomes(names: &[&str], beats: &[(usize, usize)], ties: &[(usize, usize)]) -> Election {
    let mut d = DesiredOutcomes::from_names(names).unwrap();
    for &(a, b) in beats {
        d.beat(a, b);
    }
    for &(a, b) in ties {
        d.tie(a, b);
    }
    realize_outcomes(&d)
}

fn destructive(kind: ControlKind) -> Problem {
    Problem::new(Direction::Destructive, kind)
}

fn constructive(kind: ControlKind) -> Problem {
    Problem::new(Direction::Constructive, kind)
}

fn exact(inst: &ControlInstance) -> bool {
    solve_control_exact(inst, &SizeLimits::default()).unwrap().is_yes()
}

#[test]
fn dcdc_on_three_cycle_deletes_the_candidate_p_beats() {
    // p beats d, d beats c, c beats p
    let e = outcomes(&["p", "c", "d"], &[(0, 2), (2, 1), (1, 0)], &[]);
    for a in ALPHAS {
        let inst = ControlInstance::new(destructive(ControlKind::DeleteCandidates), WinnerModel::NonUnique, alpha(a), e.clone(), "p").with_k(1);
        let d = greedy_destructive_candidate(&inst).unwrap();
        assert_eq!(d, Decision::Yes(Witness::DeletedCandidates(vec![2])));
        assert!(verify_witness(&inst, d.witness().unwrap()).unwrap());
        assert!(exact(&inst));
    }
}

#[test]
fn greedy_empty_witness_when_p_already_loses() {
    let e = outcomes(&["p", "c"], &[(1, 0)], &[]);
    let inst = ControlInstance::new(destructive(ControlKind::DeleteCandidates), WinnerModel::NonUnique, Alpha::HALF, e, "p").with_k(0);
    assert_eq!(greedy_destructive_candidate(&inst).unwrap(), Decision::Yes(Witness::DeletedCandidates(vec![])));
}

#[test]
fn dcac_spoiler_breaks_uniqueness() {
    // p beats c; spoiler d beats p and ties c
    let e = outcomes(&["p", "c", "d"], &[(0, 1), (2, 0)], &[(1, 2)]);
    let inst = ControlInstance::new(destructive(ControlKind::AddCandidates), WinnerModel::Unique, Alpha::HALF, e, "p")
        .with_spoilers(vec![2])
        .with_k(1);
    assert_eq!(greedy_destructive_candidate(&inst).unwrap(), Decision::Yes(Witness::AddedCandidates(vec![2])));
    assert!(exact(&inst));
    let none = inst.clone().with_k(0);
    assert_eq!(greedy_destructive_candidate(&none).unwrap(), Decision::No);
    assert!(!exact(&none));
}

#[test]
fn greedy_rejects_other_problems() {
    let inst = ControlInstance::new(constructive(ControlKind::DeleteCandidates), WinnerModel::NonUnique, Alpha::HALF, e_cyc(), "a").with_k(1);
    assert!(matches!(greedy_destructive_candidate(&inst), Err(Error::WrongProblem(_))));
    let inst = ControlInstance::new(destructive(ControlKind::DeleteVoters), WinnerModel::NonUnique, Alpha::HALF, e_cyc(), "a").with_k(1);
    assert!(matches!(greedy_destructive_candidate(&inst), Err(Error::WrongProblem(_))));
    let inst = ControlInstance::new(destructive(ControlKind::DeleteCandidates), WinnerModel::NonUnique, Alpha::HALF, e_cyc(), "a")
        .with_k(1)
        .with_goal(GoalSpec::MakeWinner("a".into()));
    assert!(matches!(greedy_destructive_candidate(&inst), Err(Error::WrongProblem(_))));
}

#[test]
fn partition_identity_when_p_already_loses() {
    let e = outcomes(&["p", "c"], &[(1, 0)], &[]);
    let inst = ControlInstance::new(
        destructive(ControlKind::PartitionCandidates(TieRule::Promote)),
        WinnerModel::NonUnique,
        Alpha::HALF,
        e,
        "p",
    );
    assert_eq!(
        destructive_partition_candidate(&inst).unwrap(),
        Decision::Yes(Witness::CandidatePartition { first: vec![0, 1], second: vec![] })
    );
}

#[test]
fn partition_on_cycle_and_singleton() {
    let inst = ControlInstance::new(
        destructive(ControlKind::RunoffPartitionCandidates(TieRule::Promote)),
        WinnerModel::NonUnique,
        Alpha::HALF,
        e_cyc(),
        "a",
    );
    // Already not a unique loser: every candidate wins, so the identity fails.
    let d = destructive_partition_candidate(&inst).unwrap();
    assert!(d.is_yes());
    assert!(verify_witness(&inst, d.witness().unwrap()).unwrap());
    assert!(exact(&inst));

    let single = Election::from_names(&["a"], vec![]).unwrap();
    for rule in RULES {
        for kind in [ControlKind::PartitionCandidates(rule), ControlKind::RunoffPartitionCandidates(rule)] {
            for m in MODELS {
                let inst = ControlInstance::new(destructive(kind), m, Alpha::HALF, single.clone(), "a");
                assert_eq!(destructive_partition_candidate(&inst).unwrap(), Decision::No);
            }
        }
    }
}

fn unit_tables(n: usize, count: usize) -> Election {
    let names: Vec<String> = (0..n).map(|i| if i == 0 { "p".into() } else { format!("c{i}") }).collect();
    let ballots = (0..count).map(|_| Ballot::table(PairTable::from_order(&(0..n).collect::<Vec<_>>()), 1u32)).collect();
    Election::from_names(&names, ballots).unwrap()
}

#[test]
fn microbribery_examples() {
    let e = unit_tables(2, 3);
    let yes = destructive_microbribery_dp(&e, Alpha::HALF, "p", 2, WinnerModel::NonUnique).unwrap();
    assert!(yes.is_yes());
    let Witness::Flips(f) = yes.witness().unwrap() else { panic!() };
    assert_eq!(f.len(), 2);
    assert_eq!(destructive_microbribery_dp(&e, Alpha::HALF, "p", 1, WinnerModel::NonUnique).unwrap(), Decision::No);

    let even = unit_tables(2, 4);
    let tie = destructive_microbribery_dp(&even, Alpha::HALF, "p", 2, WinnerModel::Unique).unwrap();
    assert!(tie.is_yes());
    let inst = ControlInstance::new(destructive(ControlKind::Microbribery), WinnerModel::Unique, Alpha::HALF, even.clone(), "p").with_k(2);
    assert!(verify_witness(&inst, tie.witness().unwrap()).unwrap());
    assert_eq!(destructive_microbribery_dp(&even, Alpha::HALF, "p", 1, WinnerModel::Unique).unwrap(), Decision::No);

    // k = 0 answers whether p already fails.
    let cyc = Election::from_names(&["a", "b", "c"], vec![Ballot::table(PairTable::from_fn(3, |a, b| (a + 1) % 3 == b), 1u32)]).unwrap();
    assert!(destructive_microbribery_dp(&cyc, Alpha::HALF, "a", 0, WinnerModel::Unique).unwrap().is_yes());
    assert!(!destructive_microbribery_dp(&cyc, Alpha::HALF, "a", 0, WinnerModel::NonUnique).unwrap().is_yes());
}

#[test]
fn microbribery_needs_tables() {
    assert!(matches!(
        destructive_microbribery_dp(&e_cyc(), Alpha::HALF, "a", 1, WinnerModel::Unique),
        Err(Error::NotIrrational)
    ));
}

#[test]
fn ccav_adds_both_pool_voters() {
    let e = Election::from_names(&["p", "q"], vec![Ballot::order(vec![1, 0], 1u32)]).unwrap();
    let inst = ControlInstance::new(constructive(ControlKind::AddVoters), WinnerModel::NonUnique, Alpha::HALF, e, "p")
        .with_pool(vec![Ballot::order(vec![0, 1], 2u32)])
        .with_k(2);
    let goal = GoalSpec::MakeWinner("p".into());
    let d = fpt_voter_control(&inst, &BoundParameter::candidates(2), &goal).unwrap();
    // A tie already makes p a co-winner, so a single added voter suffices.
    assert!(d.is_yes());
    assert!(verify_witness(&inst, d.witness().unwrap()).unwrap());
    let unique = GoalSpec::MakeUniqueWinner("p".into());
    let d = fpt_voter_control(&inst, &BoundParameter::candidates(2), &unique).unwrap();
    assert_eq!(d, Decision::Yes(Witness::AddedVoters(vec![BigUint::from(2u32)])));
}

#[test]
fn dcdv_with_zero_budget_checks_the_goal() {
    let inst = ControlInstance::new(destructive(ControlKind::DeleteVoters), WinnerModel::Unique, Alpha::HALF, e_cyc(), "a").with_k(0);
    let goal = inst.goal();
    assert!(fpt_voter_control(&inst, &BoundParameter::candidates(3), &goal).unwrap().is_yes());
    let nonunique = ControlInstance { model: WinnerModel::NonUnique, ..inst };
    let goal = nonunique.goal();
    assert!(!fpt_voter_control(&nonunique, &BoundParameter::voters(3), &goal).unwrap().is_yes());
}

#[test]
fn ccpv_te_on_cycle_matches_exact() {
    for rule in RULES {
        let goal = GoalSpec::MakeUniqueWinner("a".into());
        let inst = ControlInstance::new(constructive(ControlKind::PartitionVoters(rule)), WinnerModel::Unique, Alpha::HALF, e_cyc(), "a")
            .with_goal(goal.clone());
        let expect = exact(&inst);
        for bound in [BoundParameter::voters(3), BoundParameter::candidates(3)] {
            assert_eq!(fpt_voter_control(&inst, &bound, &goal).unwrap().is_yes(), expect);
        }
    }
}

#[test]
fn fpt_candidate_examples() {
    let e = e_cyc();
    let inst = ControlInstance::new(constructive(ControlKind::DeleteCandidates), WinnerModel::Unique, Alpha::HALF, e.clone(), "a").with_k(1);
    let goal = inst.goal();
    assert_eq!(
        fpt_candidate_control(&inst, &BoundParameter::candidates(3), &goal).unwrap(),
        Decision::Yes(Witness::DeletedCandidates(vec![2]))
    );

    // No spoilers: the answer is whether the goal holds already.
    let inst = ControlInstance::new(constructive(ControlKind::AddCandidatesUnlimited), WinnerModel::NonUnique, Alpha::HALF, e, "a")
        .with_spoilers(vec![]);
    for (goal, holds) in [(GoalSpec::MakeWinner("a".into()), true), (GoalSpec::MakeUniqueWinner("a".into()), false)] {
        assert_eq!(fpt_candidate_control(&inst, &BoundParameter::candidates(3), &goal).unwrap().is_yes(), holds);
    }
}

#[test]
fn bounds_are_enforced() {
    let inst = ControlInstance::new(constructive(ControlKind::DeleteCandidates), WinnerModel::Unique, Alpha::HALF, e_cyc(), "a").with_k(1);
    let goal = inst.goal();
    assert!(matches!(fpt_candidate_control(&inst, &BoundParameter::candidates(2), &goal), Err(Error::BoundViolated(_))));
    assert!(matches!(fpt_candidate_control(&inst, &BoundParameter::voters(9), &goal), Err(Error::BoundViolated(_))));
    let inst = ControlInstance::new(constructive(ControlKind::DeleteVoters), WinnerModel::Unique, Alpha::HALF, e_cyc(), "a").with_k(1);
    assert!(matches!(fpt_voter_control(&inst, &BoundParameter::voters(2), &goal), Err(Error::BoundViolated(_))));
    assert!(matches!(fpt_candidate_control(&inst, &BoundParameter::candidates(3), &goal), Err(Error::WrongProblem(_))));
}

#[test]
fn bound_parameter_text() {
    assert_eq!("BC_3".parse::<BoundParameter>().unwrap(), BoundParameter::candidates(3));
    assert_eq!("BV5".parse::<BoundParameter>().unwrap(), BoundParameter::voters(5));
    assert_eq!(BoundParameter::voters(5).to_string(), "BV_5");
    for bad in ["BC_0", "BX_2", "BC_", "3"] {
        assert!(bad.parse::<BoundParameter>().is_err(), "{bad}");
    }
}

#[test]
fn candidate_bound_handles_succinct_multiplicities() {
    let b: BigUint = BigUint::from(10u32).pow(30);
    // q > p by five voters out of about 2·10^30.
    let e = Election::from_names(&["p", "q"], vec![Ballot::order(vec![1, 0], &b + 5u32), Ballot::order(vec![0, 1], b.clone())]).unwrap();
    let inst = ControlInstance::new(constructive(ControlKind::DeleteVoters), WinnerModel::NonUnique, Alpha::HALF, e, "p");
    let goal = GoalSpec::MakeWinner("p".into());
    let yes = inst.clone().with_k(5);
    let d = fpt_voter_control(&yes, &BoundParameter::candidates(2), &goal).unwrap();
    assert_eq!(d, Decision::Yes(Witness::DeletedVoters(vec![BigUint::from(5u32), BigUint::from(0u32)])));
    assert!(verify_witness(&yes, d.witness().unwrap()).unwrap());
    assert_eq!(fpt_voter_control(&inst.with_k(4), &BoundParameter::candidates(2), &goal).unwrap(), Decision::No);
}

fn report(name: &str, a: &Agreement) {
    assert!(a.all_agree(), "{name}: {}/{} agree; {:#?}", a.agree, a.total, a.mismatches);
}

#[test]
fn greedy_matches_exact_on_small_grid() {
    report("greedy", &candidate_grid(4, 200, 11, false));
}

#[test]
fn partition_matches_exact_on_small_grid() {
    report("partition", &candidate_grid(4, 200, 12, true));
}

#[test]
fn microbribery_dp_matches_exact() {
    report("microbribery", &microbribery_grid(150, 13));
}

#[test]
fn fpt_solvers_match_exact() {
    report("fpt", &fpt_grid(150, 14));
}
