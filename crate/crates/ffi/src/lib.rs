//! C interface to the `copeland` crate.
//!
//! Every function returns a [`CopelandStatus`]. Elections and instances are
//! opaque handles released with their `_free` function. Text results are
//! copied into caller buffers: the required size (including the trailing
//! NUL) is always stored in `needed`, and `COPELAND_BUFFER_TOO_SMALL` is
//! returned when `cap` is smaller. The message of the last failure on the
//! calling thread is available from [`copeland_last_error`].

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};

use copeland::cli::{solve, Method};
use copeland::format::{parse_candidate_list, parse_pool, witness_text};
use copeland::{copeland_scores, parse_election, Alpha, BoundParameter, ControlInstance, Election, Error, GoalSpec, Problem, WinnerModel};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CopelandStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    ParseError = 3,
    InvalidArgument = 4,
    BudgetExceeded = 5,
    WrongProblem = 6,
    BufferTooSmall = 7,
    Panic = 8,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CopelandMethod {
    Exact = 0,
    Greedy = 1,
    Dp = 2,
    Fpt = 3,
}

/// Opaque election handle.
pub struct CopelandElection(Election);

/// Opaque control-instance handle.
pub struct CopelandInstance {
    inst: ControlInstance,
    bound: Option<BoundParameter>,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

type Outcome<T> = Result<T, (CopelandStatus, String)>;

fn status_of(e: &Error) -> CopelandStatus {
    match e {
        Error::BudgetExceeded(_) => CopelandStatus::BudgetExceeded,
        Error::WrongProblem(_) | Error::NotIrrational | Error::BoundViolated(_) => CopelandStatus::WrongProblem,
        _ => CopelandStatus::InvalidArgument,
    }
}

fn lib(e: Error) -> (CopelandStatus, String) {
    (status_of(&e), e.to_string())
}

/// Runs `f`, records any failure message and converts panics.
fn guard(f: impl FnOnce() -> Outcome<()>) -> CopelandStatus {
    let result = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err((CopelandStatus::Panic, "internal panic".into())));
    match result {
        Ok(()) => CopelandStatus::Ok,
        Err((status, msg)) => {
            LAST_ERROR.with(|l| *l.borrow_mut() = msg);
            status
        }
    }
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Outcome<&'a str> {
    if p.is_null() {
        return Err((CopelandStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p).to_str().map_err(|_| (CopelandStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn out<'a, T>(p: *mut T, what: &str) -> Outcome<&'a mut T> {
    p.as_mut().ok_or_else(|| (CopelandStatus::NullPointer, format!("{what} is null")))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Outcome<&'a T> {
    p.as_ref().ok_or_else(|| (CopelandStatus::NullPointer, format!("{what} is null")))
}

unsafe fn copy_out(s: &str, buf: *mut c_char, cap: usize, needed: *mut usize) -> Outcome<()> {
    let bytes = s.as_bytes();
    *out(needed, "needed")? = bytes.len() + 1;
    if buf.is_null() || cap < bytes.len() + 1 {
        return Err((CopelandStatus::BufferTooSmall, format!("{} bytes needed", bytes.len() + 1)));
    }
    std::ptr::copy_nonoverlapping(bytes.as_ptr(), buf as *mut u8, bytes.len());
    *buf.add(bytes.len()) = 0;
    Ok(())
}

fn alpha(num: u64, den: u64) -> Outcome<Alpha> {
    Alpha::new(num, den).map_err(lib)
}

fn model(unique: bool) -> WinnerModel {
    if unique {
        WinnerModel::Unique
    } else {
        WinnerModel::NonUnique
    }
}

/// Copies the message of the last failure on this thread.
#[no_mangle]
pub unsafe extern "C" fn copeland_last_error(buf: *mut c_char, cap: usize, needed: *mut usize) -> CopelandStatus {
    let msg = LAST_ERROR.with(|l| l.borrow().clone());
    guard(|| copy_out(&msg, buf, cap, needed))
}

/// Parses an election in the text file format.
#[no_mangle]
pub unsafe extern "C" fn copeland_election_parse(source: *const c_char, election: *mut *mut CopelandElection) -> CopelandStatus {
    guard(|| {
        let slot = out(election, "election")?;
        let e = parse_election(text(source, "source")?).map_err(|e| (CopelandStatus::ParseError, e.to_string()))?;
        *slot = Box::into_raw(Box::new(CopelandElection(e)));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn copeland_election_free(election: *mut CopelandElection) {
    if !election.is_null() {
        drop(Box::from_raw(election));
    }
}

#[no_mangle]
pub unsafe extern "C" fn copeland_election_candidate_count(election: *const CopelandElection, count: *mut usize) -> CopelandStatus {
    guard(|| {
        *out(count, "count")? = handle(election, "election")?.0.len();
        Ok(())
    })
}

/// Scaled scores (`t·wins + s·ties` for `alpha = s/t` in lowest terms) in
/// declaration order; `len` must be at least the candidate count.
#[no_mangle]
pub unsafe extern "C" fn copeland_election_scores(
    election: *const CopelandElection,
    alpha_num: u64,
    alpha_den: u64,
    scaled: *mut u64,
    len: usize,
) -> CopelandStatus {
    guard(|| {
        let e = &handle(election, "election")?.0;
        let s = copeland_scores(e, alpha(alpha_num, alpha_den)?);
        if scaled.is_null() {
            return Err((CopelandStatus::NullPointer, "scaled is null".into()));
        }
        if len < e.len() {
            return Err((CopelandStatus::BufferTooSmall, format!("{} scores", e.len())));
        }
        std::ptr::copy_nonoverlapping(s.scaled().as_ptr(), scaled, e.len());
        Ok(())
    })
}

/// Winner indices in declaration order; `count` receives how many.
#[no_mangle]
pub unsafe extern "C" fn copeland_election_winners(
    election: *const CopelandElection,
    alpha_num: u64,
    alpha_den: u64,
    unique: bool,
    winners: *mut usize,
    len: usize,
    count: *mut usize,
) -> CopelandStatus {
    guard(|| {
        let e = &handle(election, "election")?.0;
        let w = copeland_scores(e, alpha(alpha_num, alpha_den)?).winners(model(unique));
        *out(count, "count")? = w.len();
        if w.is_empty() {
            return Ok(());
        }
        if winners.is_null() || len < w.len() {
            return Err((CopelandStatus::BufferTooSmall, format!("{} winners", w.len())));
        }
        std::ptr::copy_nonoverlapping(w.as_ptr(), winners, w.len());
        Ok(())
    })
}

/// Creates a control instance over a copy of `election`. `problem` is a
/// code such as `DCDC` or `CCRPC-TE`; `p` names the distinguished candidate.
#[no_mangle]
pub unsafe extern "C" fn copeland_instance_new(
    election: *const CopelandElection,
    problem: *const c_char,
    alpha_num: u64,
    alpha_den: u64,
    unique: bool,
    p: *const c_char,
    instance: *mut *mut CopelandInstance,
) -> CopelandStatus {
    guard(|| {
        let slot = out(instance, "instance")?;
        let e = handle(election, "election")?.0.clone();
        let problem: Problem = text(problem, "problem")?.parse().map_err(lib)?;
        let p = text(p, "p")?;
        let inst = ControlInstance::new(problem, model(unique), alpha(alpha_num, alpha_den)?, e, p);
        *slot = Box::into_raw(Box::new(CopelandInstance { inst, bound: None }));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn copeland_instance_free(instance: *mut CopelandInstance) {
    if !instance.is_null() {
        drop(Box::from_raw(instance));
    }
}

unsafe fn with_instance(instance: *mut CopelandInstance, f: impl FnOnce(&mut CopelandInstance) -> Outcome<()>) -> CopelandStatus {
    guard(|| f(instance.as_mut().ok_or_else(|| (CopelandStatus::NullPointer, "instance is null".into()))?))
}

#[no_mangle]
pub unsafe extern "C" fn copeland_instance_set_k(instance: *mut CopelandInstance, k: usize) -> CopelandStatus {
    with_instance(instance, |i| {
        i.inst.k = Some(k);
        Ok(())
    })
}

/// Marks candidates as spoilers; `names` is a candidates line such as
/// `candidates: d e`.
#[no_mangle]
pub unsafe extern "C" fn copeland_instance_set_spoilers(instance: *mut CopelandInstance, names: *const c_char) -> CopelandStatus {
    with_instance(instance, |i| {
        let list = parse_candidate_list(text(names, "names")?).map_err(|e| (CopelandStatus::ParseError, e.to_string()))?;
        let idx = list.iter().map(|n| i.inst.election.index_of(n)).collect::<Result<Vec<_>, _>>().map_err(lib)?;
        i.inst.spoilers = Some(idx);
        Ok(())
    })
}

/// Sets the unregistered voters from an election text over the same candidates.
#[no_mangle]
pub unsafe extern "C" fn copeland_instance_set_pool(instance: *mut CopelandInstance, pool: *const c_char) -> CopelandStatus {
    with_instance(instance, |i| {
        let ballots = parse_pool(text(pool, "pool")?, &i.inst.election).map_err(|e| (CopelandStatus::ParseError, e.to_string()))?;
        i.inst.voter_pool = Some(ballots);
        Ok(())
    })
}

/// Overrides the goal, e.g. `unique:p` or `order:a<b`.
#[no_mangle]
pub unsafe extern "C" fn copeland_instance_set_goal(instance: *mut CopelandInstance, goal: *const c_char) -> CopelandStatus {
    with_instance(instance, |i| {
        let g: GoalSpec = text(goal, "goal")?.parse().map_err(lib)?;
        i.inst.goal = Some(g);
        Ok(())
    })
}

/// Parameter for the FPT method, e.g. `BC_4`.
#[no_mangle]
pub unsafe extern "C" fn copeland_instance_set_bound(instance: *mut CopelandInstance, bound: *const c_char) -> CopelandStatus {
    with_instance(instance, |i| {
        i.bound = Some(text(bound, "bound")?.parse().map_err(lib)?);
        Ok(())
    })
}

/// Decides the instance. `yes` receives 1 or 0; when `witness` is not null
/// the witness block (empty for NO) is copied into it.
#[no_mangle]
pub unsafe extern "C" fn copeland_instance_solve(
    instance: *const CopelandInstance,
    method: CopelandMethod,
    yes: *mut i32,
    witness: *mut c_char,
    cap: usize,
    needed: *mut usize,
) -> CopelandStatus {
    guard(|| {
        let i = handle(instance, "instance")?;
        let method = match method {
            CopelandMethod::Exact => Method::Exact,
            CopelandMethod::Greedy => Method::Greedy,
            CopelandMethod::Dp => Method::Dp,
            CopelandMethod::Fpt => Method::Fpt,
        };
        let d = solve(&i.inst, method, i.bound).map_err(lib)?;
        *out(yes, "yes")? = d.is_yes() as i32;
        if !witness.is_null() || !needed.is_null() {
            let w = d.witness().map(|w| witness_text(w, i.inst.election.candidates())).unwrap_or_default();
            copy_out(&w, witness, cap, needed)?;
        }
        Ok(())
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn copeland_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}
