//! Seeded stream generators, experiment drivers, and CSV emission.
//!
//! Everything here is deterministic under a fixed seed: the generator is
//! ChaCha8 seeded from a 64-bit integer, and every rational it draws is a
//! grid value `k / 1024`, so regenerating a stream is bit-identical and
//! region offsets stay on the `2^-10` grid the cell enumerator's exterior
//! slack is calibrated to.
//!
//! CSV is the output contract. Columns are fixed (see the emitters
//! below); rationals are serialized as `p/q` strings, never floats.
//! Wall-time columns are written as `0` unless explicitly requested,
//! which keeps all default outputs byte-deterministic; the scaling CSV is
//! the one artifact that always carries measured times.

use std::path::Path;
use std::time::Instant;

use num_traits::Signed;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::cl::{run, ClAlgorithm, Trace, TraceEnd};
use crate::criteria::{scalar_atom, Atom, Criterion, CriterionKind, EmpiricalTask};
use crate::equivalence::{
    enumerate_cells_sequential, perfect_memory_check, Arrangement, Cell, Verdict, MAX_REGIONS,
    MAX_TOTAL_CONSTRAINTS,
};
use crate::error::{Error, Result};
use crate::geometry::{ConvexRegion, Halfspace};
use crate::rat::{rat, rat_int, Rat, RatVec};

/// Environment variable that overrides the default seed of the CLI.
pub const SEED_ENV: &str = "SATCL_SEED";

/// Probe budget used when experiments append perfect-memory verdicts.
pub const VERDICT_PROBES: usize = 100;

/// Denominator of the sampling grid: all random rationals are `k / 1024`.
pub const GRID_DENOM: i64 = 1024;

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform draw from the grid points of `[lo, hi]`.
pub fn grid_rat(rng: &mut ChaCha8Rng, lo: i64, hi: i64) -> Rat {
    rat(rng.gen_range(lo * GRID_DENOM..=hi * GRID_DENOM), GRID_DENOM)
}

pub fn grid_vec(rng: &mut ChaCha8Rng, dim: usize, lo: i64, hi: i64) -> RatVec {
    RatVec::new((0..dim).map(|_| grid_rat(rng, lo, hi)).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StreamKind {
    /// A common parameter with residual margin is planted in every task.
    PlantedFeasible,
    /// The fixed two-task instance on which the regularized learner
    /// provably forgets while the intersection stays nonempty.
    AdversarialShift,
    /// Two single-atom tasks whose regions intersect in exactly one point.
    SingletonSat,
    /// Input-free tasks for the mean-squared criterion with controlled
    /// means and variance.
    BallMeans,
}

impl StreamKind {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "planted" => Ok(StreamKind::PlantedFeasible),
            "adversarial" => Ok(StreamKind::AdversarialShift),
            "singleton" => Ok(StreamKind::SingletonSat),
            "ball-means" => Ok(StreamKind::BallMeans),
            other => Err(Error::InvalidSpec(format!(
                "unknown stream kind {other:?}; expected planted, adversarial, singleton, or ball-means"
            ))),
        }
    }

    /// The criterion kind the stream is built for.
    pub fn criterion_kind(self) -> CriterionKind {
        match self {
            StreamKind::BallMeans => CriterionKind::MeanSqEuclid,
            _ => CriterionKind::PerSampleAbs,
        }
    }
}

/// Everything that determines a generated stream. The seed determines it
/// completely.
#[derive(Debug, Clone)]
pub struct StreamSpec {
    pub kind: StreamKind,
    pub seed: u64,
    pub dim: usize,
    pub tasks: usize,
    pub n_per_task: usize,
    pub epsilon: Rat,
    pub margin: Rat,
}

impl StreamSpec {
    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::InvalidSpec("dimension must be at least 1".into()));
        }
        if self.tasks == 0 {
            return Err(Error::InvalidSpec("need at least one task".into()));
        }
        if self.epsilon.is_negative() {
            return Err(Error::InvalidSpec("epsilon must be nonnegative".into()));
        }
        match self.kind {
            StreamKind::PlantedFeasible => {
                if self.n_per_task == 0 {
                    return Err(Error::InvalidSpec("need at least one atom per task".into()));
                }
                if !self.margin.is_positive() {
                    return Err(Error::InvalidSpec("planted margin must be positive".into()));
                }
                if self.margin >= self.epsilon {
                    return Err(Error::InvalidSpec(
                        "margin must be smaller than epsilon".into(),
                    ));
                }
            }
            StreamKind::AdversarialShift => {
                if self.dim != 2 || self.tasks != 2 {
                    return Err(Error::InvalidSpec(
                        "the adversarial instance is two tasks in dimension 2".into(),
                    ));
                }
                if self.epsilon != rat(1, 2) {
                    return Err(Error::InvalidSpec(
                        "the adversarial instance is calibrated for epsilon = 1/2".into(),
                    ));
                }
            }
            StreamKind::SingletonSat => {
                if self.dim != 1 || self.tasks != 2 {
                    return Err(Error::InvalidSpec(
                        "the singleton stream is two tasks in dimension 1".into(),
                    ));
                }
                if !self.epsilon.is_positive() {
                    return Err(Error::InvalidSpec(
                        "the singleton stream needs epsilon > 0".into(),
                    ));
                }
            }
            StreamKind::BallMeans => {
                // Task variance is fixed at 1/64 and the mean offsets span
                // up to d/64 in squared distance; the planted mean stays
                // feasible when eps covers both.
                if self.epsilon <= rat(self.dim as i64 + 1, 64) {
                    return Err(Error::InvalidSpec(format!(
                        "ball-means needs epsilon > {}/64 in dimension {}",
                        self.dim + 1,
                        self.dim
                    )));
                }
            }
        }
        Ok(())
    }
}

fn planted_tasks(spec: &StreamSpec) -> Vec<EmpiricalTask> {
    let mut rng = seeded_rng(spec.seed);
    let theta_star = grid_vec(&mut rng, spec.dim, -2, 2);
    let amplitude = &spec.epsilon - &spec.margin;
    (1..=spec.tasks)
        .map(|id| {
            let atoms = (0..spec.n_per_task)
                .map(|_| {
                    let x = grid_vec(&mut rng, spec.dim, -2, 2);
                    let noise =
                        rat(rng.gen_range(-GRID_DENOM..=GRID_DENOM), GRID_DENOM) * &amplitude;
                    scalar_atom(x.clone(), theta_star.dot(&x) + noise)
                })
                .collect();
            EmpiricalTask::new(id, atoms).expect("planted atoms are well-formed")
        })
        .collect()
}

/// The written-down two-task instance (eps = 1/2 throughout).
///
/// Task 1's region is the thin slab `[-16,16] x [-1/8,1/8]` (atoms
/// x=(1/32,0),y=0 and x=(0,4),y=0). Task 2's is the long tilted band
/// `13.5 <= u + 8v <= 14.5` clipped to `-8 <= u <= 24` (atoms
/// x=(1,8),y=14 and x=(1/32,0),y=1/4). The two overlap ((14, 0)
/// satisfies every constraint with margin), so an optimal learner has
/// somewhere to go, and a full-replay minimax fit lands there too (its
/// worst residual at (14, 1/64) is 7/16 < 1/2).
///
/// The quadratic-penalty learner with lambda = 10 does not: its first
/// step stays at theta_1 = (0,0) (zero hinge loss inside the slab), and
/// at task 2 the active band constraint pulls along (1,8) against the
/// penalty gradient 2*lambda*(theta - 0). The stationary point is
/// (1,8)/(2*lambda) = (1/20, 2/5): v = 2/5 is outside the slab's
/// half-width 1/8, and u + 8v = 13/4 is nowhere near the band. Step 2
/// therefore exits task 1's region and misses task 2's.
fn adversarial_tasks() -> Vec<EmpiricalTask> {
    let t1 = EmpiricalTask::new(
        1,
        vec![
            scalar_atom(RatVec::new(vec![rat(1, 32), rat_int(0)]), rat_int(0)),
            scalar_atom(RatVec::new(vec![rat_int(0), rat_int(4)]), rat_int(0)),
        ],
    )
    .expect("well-formed");
    let t2 = EmpiricalTask::new(
        2,
        vec![
            scalar_atom(RatVec::from_i64(&[1, 8]), rat_int(14)),
            scalar_atom(RatVec::new(vec![rat(1, 32), rat_int(0)]), rat(1, 4)),
        ],
    )
    .expect("well-formed");
    vec![t1, t2]
}

fn singleton_tasks(spec: &StreamSpec) -> Vec<EmpiricalTask> {
    let mut rng = seeded_rng(spec.seed);
    let a = grid_rat(&mut rng, -2, 2);
    // Regions [a-eps, a+eps] and [a+eps, a+3eps] meet exactly at a+eps.
    let t1 = EmpiricalTask::new(1, vec![scalar_atom(RatVec::from_i64(&[1]), a.clone())])
        .expect("well-formed");
    let t2 = EmpiricalTask::new(
        2,
        vec![scalar_atom(
            RatVec::from_i64(&[1]),
            &a + rat_int(2) * &spec.epsilon,
        )],
    )
    .expect("well-formed");
    vec![t1, t2]
}

fn ball_means_tasks(spec: &StreamSpec) -> Vec<EmpiricalTask> {
    let mut rng = seeded_rng(spec.seed);
    let theta_star = grid_vec(&mut rng, spec.dim, -2, 2);
    // Spread vector (1/8, 0, ...): each task is the pair mean +- spread,
    // so the mean is the task mean and the variance is exactly 1/64.
    let mut spread_coords = vec![rat_int(0); spec.dim];
    spread_coords[0] = rat(1, 8);
    let spread = RatVec::new(spread_coords);
    (1..=spec.tasks)
        .map(|id| {
            let offset = RatVec::new(
                (0..spec.dim)
                    .map(|_| rat(rng.gen_range(-128..=128), GRID_DENOM))
                    .collect(),
            );
            let mean = theta_star.add(&offset);
            let atoms = vec![
                Atom::new(RatVec::zeros(0), mean.add(&spread)),
                Atom::new(RatVec::zeros(0), mean.sub(&spread)),
            ];
            EmpiricalTask::new(id, atoms).expect("well-formed")
        })
        .collect()
}

/// Generates the stream described by the spec. Same seed, same bytes.
pub fn generate(spec: &StreamSpec) -> Result<Vec<EmpiricalTask>> {
    spec.validate()?;
    Ok(match spec.kind {
        StreamKind::PlantedFeasible => planted_tasks(spec),
        StreamKind::AdversarialShift => adversarial_tasks(),
        StreamKind::SingletonSat => singleton_tasks(spec),
        StreamKind::BallMeans => ball_means_tasks(spec),
    })
}

/// Membership-only grid oracle: scans the points `k / denom` of
/// `[lo, hi]^dim` and returns the first one inside every region. This is
/// the independent check against the LP path; it never calls the solver.
pub fn grid_scan(regions: &[ConvexRegion], lo: i64, hi: i64, denom: i64) -> Result<Option<RatVec>> {
    if regions.is_empty() {
        return Err(Error::InvalidInput("grid scan needs regions".into()));
    }
    let dim = regions[0].dim();
    let lo_k = lo * denom;
    let hi_k = hi * denom;
    let mut counters = vec![lo_k; dim];
    'outer: loop {
        let point = RatVec::new(counters.iter().map(|&k| rat(k, denom)).collect());
        let mut inside = true;
        for r in regions {
            if !r.contains(&point)? {
                inside = false;
                break;
            }
        }
        if inside {
            return Ok(Some(point));
        }
        for c in counters.iter_mut() {
            if *c < hi_k {
                *c += 1;
                continue 'outer;
            }
            *c = lo_k;
        }
        return Ok(None);
    }
}

/// One row of an experiment: how one algorithm stood after step `t`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResultRow {
    pub algorithm: String,
    pub t: usize,
    /// Number of tasks among 1..=t whose criterion bit is 0.
    pub forgetting_count: usize,
    pub memory_size: usize,
    pub step_time_us: u64,
    pub infeasible: bool,
}

#[derive(Debug)]
pub struct ExperimentResult {
    pub rows: Vec<ResultRow>,
    /// Per-algorithm perfect-memory verdict; `None` when the instance is
    /// outside the enumeration caps or not polytope-shaped.
    pub verdicts: Vec<(String, Option<Verdict>)>,
    pub traces: Vec<Trace>,
}

fn rows_from_trace(trace: &Trace) -> Vec<ResultRow> {
    let mut rows: Vec<ResultRow> = trace
        .records
        .iter()
        .map(|r| ResultRow {
            algorithm: trace.algorithm.clone(),
            t: r.t,
            forgetting_count: r.satisfied.iter().filter(|&&b| !b).count(),
            memory_size: r.memory_size,
            step_time_us: r.wall_time_us,
            infeasible: false,
        })
        .collect();
    match trace.end {
        TraceEnd::Completed => {}
        TraceEnd::Infeasible { t, wall_time_us } | TraceEnd::Undecided { t, wall_time_us } => {
            // No parameter exists at the truncation step; count every
            // task as unsatisfied and flag the row.
            rows.push(ResultRow {
                algorithm: trace.algorithm.clone(),
                t,
                forgetting_count: t,
                memory_size: trace.records.last().map_or(0, |r| r.memory_size),
                step_time_us: wall_time_us,
                infeasible: true,
            });
        }
    }
    rows
}

fn memory_check_applicable(stream: &[EmpiricalTask], c: &Criterion) -> bool {
    let mut total = 0;
    for task in stream {
        match crate::criteria::sat_region(c, task) {
            Ok(region) => {
                if !region.balls().is_empty() {
                    return false;
                }
                total += region.constraint_count();
            }
            Err(_) => return false,
        }
    }
    stream.len() <= MAX_REGIONS && total <= MAX_TOTAL_CONSTRAINTS
}

/// Runs every algorithm on the identical stream. Independent runs execute
/// on the rayon pool under the `parallel` feature; rows are sorted by
/// (algorithm, t) before return, so the output does not depend on
/// scheduling.
pub fn run_experiment_on_stream(
    stream: &[EmpiricalTask],
    algorithms: &[Box<dyn ClAlgorithm>],
    c: &Criterion,
) -> Result<ExperimentResult> {
    if algorithms.is_empty() {
        return Err(Error::InvalidInput("no algorithms selected".into()));
    }
    #[cfg(feature = "parallel")]
    let traces: Result<Vec<Trace>> = algorithms
        .par_iter()
        .map(|alg| run(alg.as_ref(), stream, c))
        .collect();
    #[cfg(not(feature = "parallel"))]
    let traces: Result<Vec<Trace>> = algorithms
        .iter()
        .map(|alg| run(alg.as_ref(), stream, c))
        .collect();
    let mut traces = traces?;
    traces.sort_by(|a, b| a.algorithm.cmp(&b.algorithm));

    let mut rows = Vec::new();
    for trace in &traces {
        rows.extend(rows_from_trace(trace));
    }
    let applicable = memory_check_applicable(stream, c);
    let mut verdicts = Vec::new();
    for alg in algorithms {
        // A failed check (e.g. a merged replay coreset exceeding the
        // mean-abs cap during reconstruction) skips the verdict rather
        // than aborting the experiment.
        let verdict = if applicable {
            perfect_memory_check(alg.as_ref(), stream, c, VERDICT_PROBES).ok()
        } else {
            None
        };
        verdicts.push((alg.name(), verdict));
    }
    verdicts.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(ExperimentResult {
        rows,
        verdicts,
        traces,
    })
}

/// Generates the spec's stream, runs the algorithms, and (optionally)
/// writes the results CSV.
pub fn run_experiment(
    spec: &StreamSpec,
    algorithms: &[Box<dyn ClAlgorithm>],
    c: &Criterion,
    out_path: Option<&Path>,
    include_times: bool,
) -> Result<ExperimentResult> {
    let stream = generate(spec)?;
    let result = run_experiment_on_stream(&stream, algorithms, c)?;
    if let Some(path) = out_path {
        write_text(path, &results_csv(&result, include_times))?;
    }
    Ok(result)
}

/// A random slab arrangement for the scaling run: `q` regions of two
/// parallel halfspaces each, so `q` regions always fit the constraint
/// cap up to `q = 12`.
pub fn scaling_arrangement(q: usize, dim: usize, seed: u64) -> Result<Arrangement> {
    let mut rng = seeded_rng(seed ^ (q as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
    let regions: Vec<ConvexRegion> = (0..q)
        .map(|_| {
            let mut normal = grid_vec(&mut rng, dim, -2, 2);
            while normal.is_zero() {
                normal = grid_vec(&mut rng, dim, -2, 2);
            }
            let anchor = grid_vec(&mut rng, dim, -2, 2);
            let center = normal.dot(&anchor);
            let half_width = rat(rng.gen_range(256..=1024), GRID_DENOM);
            ConvexRegion::from_halfspaces(
                dim,
                vec![
                    Halfspace::new(normal.clone(), &center + &half_width),
                    Halfspace::new(normal.neg(), &half_width - center),
                ],
            )
        })
        .collect();
    Arrangement::new(regions)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScalingRow {
    pub q: usize,
    /// `None` when the caps were exceeded and the row was skipped.
    pub outcome: Option<ScalingMeasurement>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScalingMeasurement {
    pub lp_calls: u64,
    pub cells: usize,
    pub time_us: u64,
}

/// Times sequential cell enumeration on random slab arrangements of
/// growing size. Sequential on purpose: the measurement is the
/// algorithmic cost, not the pool's.
pub fn scaling_experiment(
    q_range: &[usize],
    dim: usize,
    seed: u64,
    out_path: Option<&Path>,
) -> Result<Vec<ScalingRow>> {
    let mut rows = Vec::with_capacity(q_range.len());
    for &q in q_range {
        if q == 0 || q > MAX_REGIONS || 2 * q > MAX_TOTAL_CONSTRAINTS {
            rows.push(ScalingRow { q, outcome: None });
            continue;
        }
        let arr = scaling_arrangement(q, dim, seed)?;
        let started = Instant::now();
        let (cells, stats) = enumerate_cells_sequential(&arr)?;
        let time_us = started.elapsed().as_micros() as u64;
        rows.push(ScalingRow {
            q,
            outcome: Some(ScalingMeasurement {
                lp_calls: stats.lp_calls,
                cells: cells.len(),
                time_us,
            }),
        });
    }
    if let Some(path) = out_path {
        write_text(path, &scaling_csv(&rows))?;
    }
    Ok(rows)
}

// ---------------------------------------------------------------------
// CSV emitters
// ---------------------------------------------------------------------

pub fn results_csv(result: &ExperimentResult, include_times: bool) -> String {
    let mut out =
        String::from("algorithm,t,forgetting_count,memory_size,step_time_us,infeasible\n");
    for row in &result.rows {
        let time = if include_times { row.step_time_us } else { 0 };
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            row.algorithm,
            row.t,
            row.forgetting_count,
            row.memory_size,
            time,
            u8::from(row.infeasible)
        ));
    }
    for (name, verdict) in &result.verdicts {
        match verdict {
            Some(v) => out.push_str(&format!("# verdict,{name},{v}\n")),
            None => out.push_str(&format!("# verdict,{name},skipped\n")),
        }
    }
    out
}

pub fn trace_csv(trace: &Trace, include_times: bool) -> String {
    let mut out = String::from("t,theta,memory_size,satisfied,wall_time_us\n");
    for r in &trace.records {
        let bits: String = r
            .satisfied
            .iter()
            .map(|&b| if b { '1' } else { '0' })
            .collect();
        let time = if include_times { r.wall_time_us } else { 0 };
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            r.t, r.theta, r.memory_size, bits, time
        ));
    }
    out
}

pub fn cells_csv(cells: &[Cell]) -> String {
    let mut out = String::from("sign,witness\n");
    for c in cells {
        out.push_str(&format!("{},{}\n", c.sign, c.witness));
    }
    out
}

pub fn scaling_csv(rows: &[ScalingRow]) -> String {
    let mut out = String::from("q,lp_calls,cells,time_us\n");
    for row in rows {
        match &row.outcome {
            Some(m) => out.push_str(&format!(
                "{},{},{},{}\n",
                row.q, m.lp_calls, m.cells, m.time_us
            )),
            None => out.push_str(&format!("{},skipped,skipped,skipped\n", row.q)),
        }
    }
    out
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// The spec's epsilon as a criterion of the stream's default kind.
pub fn default_criterion(spec: &StreamSpec) -> Criterion {
    Criterion {
        kind: spec.kind.criterion_kind(),
        epsilon: spec.epsilon.clone(),
    }
}
