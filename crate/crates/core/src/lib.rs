//! Copeland^α elections: exact scoring, control and bribery solvers, and
//! generators for hard control instances.

#![allow(clippy::needless_range_loop)]

pub mod alpha;
pub mod cli;
pub mod control;
pub mod election;
pub mod error;
pub mod exact;
pub mod format;
pub mod fast;
pub mod goal;
pub mod realize;
pub mod reductions;
pub mod selftest;
pub mod score;
pub mod table;
pub mod two_stage;

pub use alpha::Alpha;
pub use election::{Ballot, BallotKind, Candidate, Election, PairTable, Preference};
pub use error::{Error, Result};
pub use goal::{evaluate_goal, GoalSpec, Relation, TablePredicate};
pub use score::{copeland_scores, scores_from_table, winners, ScoreVector, WinnerModel};
pub use table::{outcome_table, pairwise_tally, Outcome, OutcomeTable, PairResult};
pub use two_stage::{evaluate_two_stage, final_round, Split, TieRule};
pub use control::{verify_witness, ControlInstance, ControlKind, Decision, Direction, Problem, Witness};
pub use exact::{solve_bribery_exact, solve_control_exact, solve_microbribery_exact, SizeLimits};
pub use realize::{
    build_pad, build_scored, combine_ghr, combine_outcomes, pad_outcomes, realize_outcomes, scored_outcomes,
    tournament_from_scores, DesiredOutcomes, ScoredSpec,
};
pub use reductions::{reduce_vc_to_ccacu, reduce_vc_to_ccdc, reduce_vc_to_ccrpc, vc_brute, verify_reduction, Graph, Report};
pub use fast::{
    destructive_microbribery_dp, destructive_partition_candidate, fpt_candidate_control, fpt_voter_control,
    greedy_destructive_candidate, BoundKind, BoundParameter,
};
pub use format::{parse_election, parse_graph, serialize_election, serialize_graph, ParseError};
