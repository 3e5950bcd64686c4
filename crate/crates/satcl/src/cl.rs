//! The continual-learning recursion and its checks.
//!
//! An algorithm is a pair of update rules threaded through a task stream:
//! at each task it first produces the new parameter from the previous
//! parameter, the carried memory, and the task, then updates the memory
//! from the new parameter, the old memory, and the task. [`run`] drives
//! that recursion and records a [`Trace`]: the parameter at each step,
//! the memory footprint, per-step wall time, and the satisfaction bit of
//! every task seen so far. Everything an algorithm is judged on is
//! recomputed from the trace, never cached inside the algorithm.
//!
//! [`IdealizedClAlgorithm`] is the region-fed variant: its step consumes a
//! satisfaction region instead of the raw task. [`lift_to_idealized`]
//! converts an algorithm that factors through regions into that form; the
//! two runs must then agree on every parameter bit-for-bit.

use std::time::Instant;

use crate::algorithms;
use crate::criteria::{evaluate_criterion, Atom, Criterion, EmpiricalTask};
use crate::error::{Error, Result};
use crate::geometry::ConvexRegion;
use crate::rat::{Rat, RatVec};

/// Information carried forward between tasks. The payload is
/// algorithm-defined; `size` is the reported memory metric
/// (constraint or atom count).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Memory {
    /// No information (the initial state of most algorithms).
    Empty,
    /// The running intersection of all satisfaction regions seen.
    Exact { region: ConvexRegion },
    /// A coreset of raw atoms, at most `per_task_cap` kept per task.
    Replay {
        coreset: Vec<Atom>,
        per_task_cap: usize,
    },
    /// A quadratic-penalty anchor; constant size in the task count.
    Reg { anchor: RatVec, lambda: Rat },
}

impl Memory {
    pub fn size(&self) -> usize {
        match self {
            Memory::Empty => 0,
            Memory::Exact { region } => region.constraint_count(),
            Memory::Replay { coreset, .. } => coreset.len(),
            Memory::Reg { .. } => 1,
        }
    }
}

/// The pair threaded through the recursion: parameter, memory, and the
/// number of tasks consumed. Deterministic function of the task prefix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClState {
    pub theta: RatVec,
    pub memory: Memory,
    pub t: usize,
}

impl ClState {
    pub fn initial(theta: RatVec, memory: Memory) -> Self {
        ClState {
            theta,
            memory,
            t: 0,
        }
    }
}

/// Why a step could not produce a parameter.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StepFailure {
    /// The running intersection is provably empty.
    Infeasible,
    /// Feasibility could not be decided within budget (ball regions only).
    Undecided,
}

pub trait ClAlgorithm: Sync {
    fn name(&self) -> String;

    fn init(&self, dim: usize) -> ClState;

    /// One recursion step: the returned state has `t = state.t + 1`, its
    /// `theta` computed before (and independently of) its new memory.
    fn step(
        &self,
        state: &ClState,
        task: &EmpiricalTask,
        criterion: &Criterion,
    ) -> std::result::Result<ClState, StepFailure>;

    /// The region-fed counterpart, if the algorithm consumes tasks only
    /// through their satisfaction regions.
    fn lift(&self) -> Result<Box<dyn IdealizedClAlgorithm>> {
        Err(Error::NotLiftable(format!(
            "{} inspects raw atoms, not just regions",
            self.name()
        )))
    }
}

pub trait IdealizedClAlgorithm: Sync {
    fn init(&self, dim: usize) -> ClState;

    fn step(
        &self,
        state: &ClState,
        region: &ConvexRegion,
    ) -> std::result::Result<ClState, StepFailure>;
}

/// One completed step of a run. `satisfied[i]` is the criterion bit of
/// task `i+1` (so the record at step `t` has exactly `t` bits).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepRecord {
    pub t: usize,
    pub theta: RatVec,
    pub memory_size: usize,
    pub satisfied: Vec<bool>,
    pub wall_time_us: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TraceEnd {
    Completed,
    /// The algorithm reported an empty intersection at step `t`; the
    /// trace is truncated there.
    Infeasible {
        t: usize,
        wall_time_us: u64,
    },
    /// The algorithm could not decide feasibility at step `t`.
    Undecided {
        t: usize,
        wall_time_us: u64,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trace {
    pub algorithm: String,
    pub records: Vec<StepRecord>,
    pub end: TraceEnd,
}

impl Trace {
    pub fn is_complete(&self) -> bool {
        matches!(self.end, TraceEnd::Completed)
    }

    pub fn thetas(&self) -> Vec<RatVec> {
        self.records.iter().map(|r| r.theta.clone()).collect()
    }
}

fn validate_stream(stream: &[EmpiricalTask], c: &Criterion) -> Result<()> {
    if stream.is_empty() {
        return Err(Error::InvalidInput("empty task stream".into()));
    }
    let (dx, dy) = (stream[0].dim_x(), stream[0].dim_y());
    for t in stream {
        if t.dim_x() != dx || t.dim_y() != dy {
            return Err(Error::InvalidInput(
                "task stream has mixed dimensions".into(),
            ));
        }
        // Region-consuming algorithms need every task's region to exist,
        // which caps mean-abs tasks at the sign-pattern limit.
        if c.kind == crate::criteria::CriterionKind::MeanAbs
            && t.n() > crate::criteria::MEAN_ABS_SIGN_CAP
        {
            return Err(Error::TaskTooLarge(format!(
                "task {} has {} atoms; the mean-abs cap is {}",
                t.id(),
                t.n(),
                crate::criteria::MEAN_ABS_SIGN_CAP
            )));
        }
    }
    Ok(())
}

/// Runs the recursion over the stream, evaluating the criterion on every
/// seen task after each step. Tasks are never mutated; the satisfaction
/// bits are recomputed from scratch each step.
pub fn run(alg: &dyn ClAlgorithm, stream: &[EmpiricalTask], c: &Criterion) -> Result<Trace> {
    validate_stream(stream, c)?;
    let dim = c.hypothesis_dim(&stream[0]);
    let mut state = alg.init(dim);
    let mut records = Vec::with_capacity(stream.len());
    let mut end = TraceEnd::Completed;
    for (idx, task) in stream.iter().enumerate() {
        let t = idx + 1;
        let started = Instant::now();
        match alg.step(&state, task, c) {
            Ok(next) => {
                let wall_time_us = started.elapsed().as_micros() as u64;
                debug_assert_eq!(next.t, t);
                let satisfied: Result<Vec<bool>> = stream[..t]
                    .iter()
                    .map(|seen| evaluate_criterion(c, &next.theta, seen))
                    .collect();
                records.push(StepRecord {
                    t,
                    theta: next.theta.clone(),
                    memory_size: next.memory.size(),
                    satisfied: satisfied?,
                    wall_time_us,
                });
                state = next;
            }
            Err(failure) => {
                let wall_time_us = started.elapsed().as_micros() as u64;
                end = match failure {
                    StepFailure::Infeasible => TraceEnd::Infeasible { t, wall_time_us },
                    StepFailure::Undecided => TraceEnd::Undecided { t, wall_time_us },
                };
                break;
            }
        }
    }
    Ok(Trace {
        algorithm: alg.name(),
        records,
        end,
    })
}

/// Runs a region-fed algorithm over precomputed satisfaction regions and
/// returns its parameter sequence.
pub fn run_idealized(
    alg: &dyn IdealizedClAlgorithm,
    regions: &[ConvexRegion],
) -> Result<(Vec<RatVec>, TraceEnd)> {
    if regions.is_empty() {
        return Err(Error::InvalidInput("empty region stream".into()));
    }
    let mut state = alg.init(regions[0].dim());
    let mut thetas = Vec::with_capacity(regions.len());
    for (idx, region) in regions.iter().enumerate() {
        let t = idx + 1;
        match alg.step(&state, region) {
            Ok(next) => {
                thetas.push(next.theta.clone());
                state = next;
            }
            Err(StepFailure::Infeasible) => {
                return Ok((thetas, TraceEnd::Infeasible { t, wall_time_us: 0 }))
            }
            Err(StepFailure::Undecided) => {
                return Ok((thetas, TraceEnd::Undecided { t, wall_time_us: 0 }))
            }
        }
    }
    Ok((thetas, TraceEnd::Completed))
}

/// True iff the trace completed and every satisfaction bit is 1: the
/// executable form of "no task was ever forgotten".
pub fn check_optimality(trace: &Trace) -> bool {
    trace.is_complete() && trace.records.iter().all(|r| r.satisfied.iter().all(|&b| b))
}

/// Steps a fresh state with either member of each task pair and demands
/// identical parameters and identical reconstructed oracle sets. Pairs
/// must be constructed to have equal satisfaction regions (atom
/// duplication, permutation); the check is what makes "depends on the
/// task only through its region" falsifiable.
pub fn check_sat_invariance(
    alg: &dyn ClAlgorithm,
    c: &Criterion,
    task_pairs: &[(EmpiricalTask, EmpiricalTask)],
) -> Result<bool> {
    for (p, q) in task_pairs {
        let dim = c.hypothesis_dim(p);
        let state = alg.init(dim);
        let sp = match alg.step(&state, p, c) {
            Ok(s) => s,
            Err(_) => return Ok(false),
        };
        let sq = match alg.step(&state, q, c) {
            Ok(s) => s,
            Err(_) => return Ok(false),
        };
        if sp.theta != sq.theta {
            return Ok(false);
        }
        let rp = algorithms::reconstruct_oracle_set(&sp, c, dim)?.canonicalized();
        let rq = algorithms::reconstruct_oracle_set(&sq, c, dim)?.canonicalized();
        if rp != rq {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The region-fed counterpart of `alg`, when one exists. The lifted
/// algorithm run on the per-task satisfaction regions must reproduce
/// `alg`'s parameter trace on the raw tasks exactly.
pub fn lift_to_idealized(alg: &dyn ClAlgorithm) -> Result<Box<dyn IdealizedClAlgorithm>> {
    alg.lift()
}
