use copeland::*;
use std::time::Instant;

fn yes(inst: &ControlInstance) -> bool {
    solve_control_exact(inst, &SizeLimits::default()).unwrap().is_yes()
}

#[test]
fn vertex_cover_oracle() {
    assert!(vc_brute(&Graph::empty(3), 0));
    assert!(!vc_brute(&Graph::complete(3), 1));
    assert!(vc_brute(&Graph::path(3), 1));
    assert!(vc_brute(&Graph::complete(3), 2));
}

#[test]
fn graph_validation() {
    assert!(Graph::new(2, vec![(1, 1)]).is_err());
    assert!(Graph::new(2, vec![(1, 2), (2, 1)]).is_err());
    assert!(Graph::new(2, vec![(1, 3)]).is_err());
    assert_eq!(Graph::new(3, vec![(2, 1)]).unwrap().edges(), &[(1, 2)]);
}

#[test]
fn ccacu_examples() {
    let inst = reduce_vc_to_ccacu(&Graph::path(3), 1, Alpha::HALF, WinnerModel::NonUnique).unwrap();
    // ℓ = 2·3 + 2·2 = 10: 2ℓ² + ℓ registered candidates.
    assert_eq!(inst.registered().len(), 210);
    assert!(yes(&inst));
    let inst = reduce_vc_to_ccacu(&Graph::complete(3), 1, Alpha::HALF, WinnerModel::NonUnique).unwrap();
    assert!(!yes(&inst));
    assert!(matches!(
        reduce_vc_to_ccacu(&Graph::path(3), 1, Alpha::ZERO, WinnerModel::NonUnique),
        Err(Error::AlphaOutOfRange)
    ));
    assert!(matches!(reduce_vc_to_ccacu(&Graph::empty(3), 1, Alpha::HALF, WinnerModel::NonUnique), Err(Error::EmptyGraph)));
}

#[test]
fn ccacu_registered_scores() {
    let g = Graph::path(3);
    let l = 10u64;
    for alpha in [Alpha::new(1, 3).unwrap(), Alpha::HALF, Alpha::new(2, 3).unwrap()] {
        let (t, s) = (alpha.den(), alpha.num());
        for (model, r, e) in [
            (WinnerModel::NonUnique, t * (2 * l * l - 3) + s, t * (2 * l * l - 2) + s),
            (WinnerModel::Unique, t * (2 * l * l - 4) + 2 * s, t * (2 * l * l - 2)),
        ] {
            let inst = reduce_vc_to_ccacu(&g, 1, alpha, model).unwrap();
            let reg = inst.registered();
            let sub = outcome_table(&inst.election).restrict(&reg);
            let sc = scores_from_table(&sub, alpha);
            assert_eq!(sc.get("p"), Some(t * (2 * l * l - 2)));
            assert_eq!(sc.get("r"), Some(r));
            assert_eq!(sc.get("e1"), Some(e));
            assert_eq!(sc.get("e2"), Some(e));
        }
    }
}

#[test]
fn ccdc_examples() {
    let inst = reduce_vc_to_ccdc(&Graph::path(3), 1, Alpha::HALF, WinnerModel::NonUnique).unwrap();
    assert!(yes(&inst));
    let w = winners(&inst.election, Alpha::HALF, WinnerModel::NonUnique).unwrap();
    let names: Vec<&str> = w.iter().map(|c| c.as_str()).collect();
    assert_eq!(names, ["e1", "e2"]);
    let inst = reduce_vc_to_ccdc(&Graph::complete(3), 1, Alpha::HALF, WinnerModel::NonUnique).unwrap();
    assert!(!yes(&inst));
}

#[test]
fn ccdc_p_score() {
    let g = Graph::path(3);
    for alpha in Alpha::grid() {
        let inst = reduce_vc_to_ccdc(&g, 1, alpha, WinnerModel::NonUnique).unwrap();
        let sc = copeland_scores(&inst.election, alpha);
        let (t, s) = (alpha.den(), alpha.num());
        // m = 2, ℓ = 5
        assert_eq!(sc.get("p"), Some(2 * s + t * 12));
        assert_eq!(sc.get("r1"), Some(2 * t + 3 * s));
    }
}

#[test]
fn ccrpc_examples() {
    let edge = Graph::path(2);
    let inst = reduce_vc_to_ccrpc(&edge, 1, TieRule::Promote, Alpha::HALF, WinnerModel::NonUnique).unwrap();
    assert!(yes(&inst));
    let inst = reduce_vc_to_ccrpc(&Graph::complete(3), 1, TieRule::Eliminate, Alpha::HALF, WinnerModel::NonUnique).unwrap();
    assert!(!yes(&inst));
}

/// Any winning partition has p's part inside the deleting-candidates
/// election and at most k of its candidates moved to the other side.
#[test]
fn ccrpc_winning_partitions_have_the_expected_shape() {
    let g = Graph::path(2);
    let k = 1;
    for rule in [TieRule::Promote, TieRule::Eliminate] {
        let inst = reduce_vc_to_ccrpc(&g, k, rule, Alpha::HALF, WinnerModel::NonUnique).unwrap();
        let e = &inst.election;
        let n = e.len();
        let p = e.index_of("p").unwrap();
        let blockers: Vec<usize> =
            (0..n).filter(|&c| e.candidate(c).as_str() == "r" || e.candidate(c).as_str().starts_with('h')).collect();
        assert!(n <= 24, "instance too large for a full scan: {n}");
        let mut found = 0;
        for mask in 0u32..1 << (n - 1) {
            // p's part is the complement of the mask (p never in the mask).
            let in_second = |c: usize| c != p && mask >> (if c > p { c - 1 } else { c }) & 1 == 1;
            let first: Vec<usize> = (0..n).filter(|&c| !in_second(c)).collect();
            let second: Vec<usize> = (0..n).filter(|&c| in_second(c)).collect();
            let w = Witness::CandidatePartition { first: first.clone(), second: second.clone() };
            if verify_witness(&inst, &w).unwrap() {
                found += 1;
                assert!(blockers.iter().all(|b| second.contains(b)));
                let moved = second.len() - blockers.len();
                assert!(moved <= k, "{moved} moved");
            }
        }
        assert!(found > 0);
    }
}

#[test]
fn generators_are_deterministic() {
    let g = Graph::complete(3);
    let a = reduce_vc_to_ccdc(&g, 1, Alpha::HALF, WinnerModel::Unique).unwrap();
    let b = reduce_vc_to_ccdc(&g, 1, Alpha::HALF, WinnerModel::Unique).unwrap();
    assert_eq!(a.election.to_ballots(), b.election.to_ballots());
    let a = reduce_vc_to_ccrpc(&g, 2, TieRule::Eliminate, Alpha::HALF, WinnerModel::Unique).unwrap();
    let b = reduce_vc_to_ccrpc(&g, 2, TieRule::Eliminate, Alpha::HALF, WinnerModel::Unique).unwrap();
    assert_eq!(a.election.to_ballots(), b.election.to_ballots());
}

#[test]
fn verify_reduction_reports() {
    let g = Graph::path(3);
    let inst = reduce_vc_to_ccdc(&g, 1, Alpha::HALF, WinnerModel::NonUnique).unwrap();
    let r = verify_reduction(&g, 1, &inst, &SizeLimits::default()).unwrap();
    assert!(r.equal && r.solver && r.vertex_cover);
    let k3 = Graph::complete(3);
    let inst = reduce_vc_to_ccdc(&k3, 1, Alpha::HALF, WinnerModel::NonUnique).unwrap();
    let r = verify_reduction(&k3, 1, &inst, &SizeLimits::default()).unwrap();
    assert!(r.equal && !r.solver);
    let big = Graph::empty(40);
    assert!(matches!(verify_reduction(&big, 1, &inst, &SizeLimits::default()), Err(Error::BudgetExceeded(_))));
}

#[test]
fn small_graphs_agree_with_vertex_cover() {
    let start = Instant::now();
    for n in 0..=3 {
        for g in Graph::all(n) {
            for k in 0..=n {
                let vc = vc_brute(&g, k);
                for model in [WinnerModel::NonUnique, WinnerModel::Unique] {
                    for alpha in Alpha::grid() {
                        assert_eq!(yes(&reduce_vc_to_ccdc(&g, k, alpha, model).unwrap()), vc, "CCDC {g:?} k={k} {alpha} {model:?}");
                        for rule in [TieRule::Promote, TieRule::Eliminate] {
                            let inst = reduce_vc_to_ccrpc(&g, k, rule, alpha, model).unwrap();
                            assert_eq!(yes(&inst), vc, "CCRPC-{} {g:?} k={k} {alpha} {model:?}", rule.code());
                        }
                        if alpha.is_interior() && g.m() > 0 {
                            let inst = reduce_vc_to_ccacu(&g, k, alpha, model).unwrap();
                            assert_eq!(yes(&inst), vc, "CCACu {g:?} k={k} {alpha} {model:?}");
                        }
                    }
                }
            }
        }
    }
    eprintln!("small graph sweep: {:?}", start.elapsed());
}
