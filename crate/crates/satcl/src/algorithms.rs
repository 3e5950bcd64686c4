//! Three learners spanning the design space: exact region tracking,
//! replay from a coreset, and quadratic-penalty regularization.
//!
//! - [`ExactCl`] carries the running intersection of all satisfaction
//!   regions and answers with its Chebyshev center. Its memory *is* the
//!   feasible set, which is what makes it optimal and perfectly
//!   reconstructible, and also what makes its memory grow with every
//!   task.
//! - [`ReplayCl`] keeps up to `k` atoms per task (greedy max-residual
//!   selection under the incoming parameter, ties by atom index) and
//!   refits a minimax-residual parameter over the whole coreset. The
//!   refit is an exact LP, so with unbounded `k` and the per-sample
//!   criterion the coreset reconstructs the true feasible set.
//! - [`RegCl`] keeps only the previous parameter as an anchor and
//!   minimizes hinge loss plus `lambda * ||theta - anchor||^2` by
//!   deterministic subgradient descent. Constant memory, no
//!   reconstruction: its oracle set is the single point it sits on.
//!
//! [`reconstruct_oracle_set`] maps each memory to the region it can still
//! vouch for; the perfect-memory checker compares that region against the
//! true intersection.

use num_traits::{One, Signed, Zero};

use crate::cl::{ClAlgorithm, ClState, IdealizedClAlgorithm, Memory, StepFailure};
use crate::criteria::{sat_region, Atom, Criterion, CriterionKind, EmpiricalTask};
use crate::error::{Error, Result};
use crate::geometry::simplex::{solve_min, LpOutcome, Row};
use crate::geometry::{
    ball_feasible, chebyshev_center, default_ball_tol, default_chebyshev_bound, descent,
    lp_feasible, Ball, ConvexRegion, Feasibility,
};
use crate::rat::{rat_int, Rat, RatVec};

/// Iteration budget for ball-region feasibility searches inside the exact
/// learner.
const BALL_FEASIBLE_ITERS: u32 = 2000;

/// Fixed subgradient budget and base step for the regularized learner.
pub const REG_ITERS: u32 = 2000;

/// Shared core of the exact learner: intersect, decide, pick a witness.
fn exact_region_step(
    accumulated: &ConvexRegion,
    incoming: &ConvexRegion,
) -> std::result::Result<(RatVec, ConvexRegion), StepFailure> {
    let next = accumulated
        .intersect(incoming)
        .expect("exact memory and task regions share the hypothesis dimension");
    let theta = if next.balls().is_empty() {
        match lp_feasible(&next).expect("validated region") {
            Feasibility::Empty => return Err(StepFailure::Infeasible),
            Feasibility::Feasible(_) => chebyshev_center(&next, &default_chebyshev_bound())
                .expect("feasible region has a center"),
            Feasibility::Unknown => unreachable!("polytope feasibility is decided"),
        }
    } else {
        match ball_feasible(&next, &default_ball_tol(), BALL_FEASIBLE_ITERS)
            .expect("validated region")
        {
            Feasibility::Empty => return Err(StepFailure::Infeasible),
            Feasibility::Feasible(w) => w,
            Feasibility::Unknown => return Err(StepFailure::Undecided),
        }
    };
    Ok((theta, next))
}

/// Optimal learner: memory is the intersection of every satisfaction
/// region seen; the parameter is its Chebyshev center (ball-bearing
/// regions use the feasibility-search witness instead).
pub struct ExactCl;

impl ClAlgorithm for ExactCl {
    fn name(&self) -> String {
        "exact".into()
    }

    fn init(&self, dim: usize) -> ClState {
        ClState::initial(
            RatVec::zeros(dim),
            Memory::Exact {
                region: ConvexRegion::whole(dim),
            },
        )
    }

    fn step(
        &self,
        state: &ClState,
        task: &EmpiricalTask,
        criterion: &Criterion,
    ) -> std::result::Result<ClState, StepFailure> {
        let Memory::Exact { region } = &state.memory else {
            panic!("exact step needs exact memory");
        };
        let incoming = sat_region(criterion, task).expect("well-formed task");
        let (theta, next) = exact_region_step(region, &incoming)?;
        Ok(ClState {
            theta,
            memory: Memory::Exact { region: next },
            t: state.t + 1,
        })
    }

    fn lift(&self) -> Result<Box<dyn IdealizedClAlgorithm>> {
        Ok(Box::new(ExactIdealized))
    }
}

/// Region-fed form of [`ExactCl`]; consumes satisfaction regions directly.
pub struct ExactIdealized;

impl IdealizedClAlgorithm for ExactIdealized {
    fn init(&self, dim: usize) -> ClState {
        ExactCl.init(dim)
    }

    fn step(
        &self,
        state: &ClState,
        region: &ConvexRegion,
    ) -> std::result::Result<ClState, StepFailure> {
        let Memory::Exact { region: acc } = &state.memory else {
            panic!("exact step needs exact memory");
        };
        let (theta, next) = exact_region_step(acc, region)?;
        Ok(ClState {
            theta,
            memory: Memory::Exact { region: next },
            t: state.t + 1,
        })
    }
}

/// Residual magnitude used for coreset selection: absolute prediction
/// residual for the linear criteria, squared distance for the mean
/// criterion.
fn selection_residual(c: &Criterion, theta: &RatVec, atom: &Atom) -> Rat {
    match c.kind {
        CriterionKind::PerSampleAbs | CriterionKind::MeanAbs => {
            (&atom.y[0] - theta.dot(&atom.x)).abs()
        }
        CriterionKind::MeanSqEuclid => atom.y.dist_sq(theta),
    }
}

/// Exact minimax-residual fit over scalar-output atoms: minimize `s`
/// subject to `|y_i - theta . x_i| <= s`. Rows are canonicalized (sorted,
/// deduplicated) before solving, so the fit is a function of the atom set.
fn minimax_fit(atoms: &[Atom], dim: usize) -> RatVec {
    let n_vars = 2 * dim + 1;
    let mut raw: Vec<(Vec<Rat>, Rat)> = Vec::with_capacity(2 * atoms.len());
    for a in atoms {
        let mut pos = Vec::with_capacity(n_vars);
        for c in a.x.iter() {
            pos.push(c.clone());
        }
        for c in a.x.iter() {
            pos.push(-c);
        }
        pos.push(-Rat::one());
        let mut neg: Vec<Rat> = pos.iter().map(|c| -c).collect();
        neg[2 * dim] = -Rat::one();
        raw.push((pos, a.y[0].clone()));
        raw.push((neg, -&a.y[0]));
    }
    raw.sort();
    raw.dedup();
    let rows: Vec<Row> = raw
        .into_iter()
        .map(|(coeffs, rhs)| Row { coeffs, rhs })
        .collect();
    let mut objective = vec![Rat::zero(); n_vars];
    objective[2 * dim] = Rat::one();
    match solve_min(&rows, &objective) {
        LpOutcome::Optimal { x, .. } => {
            RatVec::new((0..dim).map(|i| &x[i] - &x[dim + i]).collect())
        }
        // s dominates every residual, so the LP is always feasible and
        // bounded below by zero.
        other => unreachable!("minimax fit cannot fail: {other:?}"),
    }
}

/// Mean of the output vectors (minimax has no LP form under the squared
/// criterion; the mean minimizes the mean squared distance exactly).
fn mean_fit(atoms: &[Atom], dim: usize) -> RatVec {
    let mut sum = RatVec::zeros(dim);
    for a in atoms {
        sum = sum.add(&a.y);
    }
    sum.scale(&(Rat::one() / rat_int(atoms.len() as i64)))
}

/// Replay learner with a per-task coreset cap.
pub struct ReplayCl {
    pub per_task_cap: usize,
}

impl ReplayCl {
    pub fn new(per_task_cap: usize) -> Self {
        ReplayCl { per_task_cap }
    }

    /// Keeps every atom of every task.
    pub fn full() -> Self {
        ReplayCl {
            per_task_cap: usize::MAX,
        }
    }
}

impl ClAlgorithm for ReplayCl {
    fn name(&self) -> String {
        if self.per_task_cap == usize::MAX {
            "replay".into()
        } else {
            format!("replay:k={}", self.per_task_cap)
        }
    }

    fn init(&self, dim: usize) -> ClState {
        ClState::initial(
            RatVec::zeros(dim),
            Memory::Replay {
                coreset: Vec::new(),
                per_task_cap: self.per_task_cap,
            },
        )
    }

    fn step(
        &self,
        state: &ClState,
        task: &EmpiricalTask,
        criterion: &Criterion,
    ) -> std::result::Result<ClState, StepFailure> {
        let Memory::Replay { coreset, .. } = &state.memory else {
            panic!("replay step needs replay memory");
        };
        // Greedy max-residual selection under the incoming parameter;
        // residual ties fall back to atom index (stable sort).
        let mut order: Vec<usize> = (0..task.n()).collect();
        let residuals: Vec<Rat> = task
            .atoms()
            .iter()
            .map(|a| selection_residual(criterion, &state.theta, a))
            .collect();
        order.sort_by(|&i, &j| residuals[j].cmp(&residuals[i]));
        let keep = self.per_task_cap.min(task.n());
        let mut selected: Vec<usize> = order[..keep].to_vec();
        selected.sort_unstable();

        let mut candidate = coreset.clone();
        candidate.extend(selected.into_iter().map(|i| task.atoms()[i].clone()));
        let theta = match criterion.kind {
            CriterionKind::PerSampleAbs | CriterionKind::MeanAbs => {
                minimax_fit(&candidate, state.theta.dim())
            }
            CriterionKind::MeanSqEuclid => mean_fit(&candidate, state.theta.dim()),
        };
        Ok(ClState {
            theta,
            memory: Memory::Replay {
                coreset: candidate,
                per_task_cap: self.per_task_cap,
            },
            t: state.t + 1,
        })
    }
}

/// Quadratic-penalty learner: minimizes hinge loss on the current task
/// plus `lambda * ||theta - anchor||^2`, anchored at the previous
/// parameter.
pub struct RegCl {
    pub lambda: Rat,
    pub iters: u32,
    pub eta: Rat,
}

impl RegCl {
    pub fn new(lambda: Rat) -> Self {
        RegCl {
            lambda,
            iters: REG_ITERS,
            eta: Rat::one(),
        }
    }
}

impl ClAlgorithm for RegCl {
    fn name(&self) -> String {
        format!("reg:lambda={}", self.lambda)
    }

    fn init(&self, dim: usize) -> ClState {
        let origin = RatVec::zeros(dim);
        ClState::initial(
            origin.clone(),
            Memory::Reg {
                anchor: origin,
                lambda: self.lambda.clone(),
            },
        )
    }

    fn step(
        &self,
        state: &ClState,
        task: &EmpiricalTask,
        criterion: &Criterion,
    ) -> std::result::Result<ClState, StepFailure> {
        let Memory::Reg { anchor, lambda } = &state.memory else {
            panic!("reg step needs reg memory");
        };
        let two_lambda = rat_int(2) * lambda;
        // Normalized subgradient descent from the anchor. The step
        // schedule is damped by 1 + 2*lambda: the penalty's curvature
        // scales with lambda, and undamped unit steps oscillate without
        // converging once lambda is large.
        let objective = |theta: &RatVec| {
            let (mut value, mut grad) = hinge_loss(criterion, theta, task);
            let delta = theta.sub(anchor);
            value += lambda * delta.norm_sq();
            grad = grad.add(&delta.scale(&two_lambda));
            (value, grad)
        };
        let out = descent::minimize(anchor, &self.eta, &two_lambda, self.iters, false, objective);
        Ok(ClState {
            theta: out.point.clone(),
            memory: Memory::Reg {
                anchor: out.point,
                lambda: lambda.clone(),
            },
            t: state.t + 1,
        })
    }
}

/// Hinge loss of the criterion at `theta` and one subgradient. Kink
/// points contribute a zero subgradient.
fn hinge_loss(c: &Criterion, theta: &RatVec, task: &EmpiricalTask) -> (Rat, RatVec) {
    match c.kind {
        CriterionKind::PerSampleAbs | CriterionKind::MeanAbs => {
            let mut value = Rat::zero();
            let mut grad = RatVec::zeros(theta.dim());
            for a in task.atoms() {
                let res = &a.y[0] - theta.dot(&a.x);
                let excess = res.abs() - &c.epsilon;
                if excess.is_positive() {
                    value += excess;
                    // d/dtheta |y - theta.x| = -sign(res) * x
                    if res.is_positive() {
                        grad = grad.sub(&a.x);
                    } else if res.is_negative() {
                        grad = grad.add(&a.x);
                    }
                }
            }
            (value, grad)
        }
        CriterionKind::MeanSqEuclid => {
            let n = rat_int(task.n() as i64);
            let mean_sq: Rat = task
                .atoms()
                .iter()
                .map(|a| a.y.dist_sq(theta))
                .fold(Rat::zero(), |acc, d| acc + d)
                / &n;
            let excess = mean_sq - &c.epsilon;
            if excess.is_positive() {
                let mut mean_y = RatVec::zeros(theta.dim());
                for a in task.atoms() {
                    mean_y = mean_y.add(&a.y);
                }
                mean_y = mean_y.scale(&(Rat::one() / &n));
                let grad = theta.sub(&mean_y).scale(&rat_int(2));
                (excess, grad)
            } else {
                (Rat::zero(), RatVec::zeros(theta.dim()))
            }
        }
    }
}

/// The region an algorithm state can still vouch for, i.e. its
/// best-effort oracle set:
///
/// - exact memory is the tracked intersection itself;
/// - a replay coreset is replayed as one task and mapped through the
///   criterion;
/// - a regularization anchor can only vouch for the point it sits on
///   (a zero-radius ball), which is exactly why it fails coverage checks
///   whenever more than one equivalence class survives.
pub fn reconstruct_oracle_set(
    state: &ClState,
    criterion: &Criterion,
    dim: usize,
) -> Result<ConvexRegion> {
    match &state.memory {
        Memory::Empty => Ok(ConvexRegion::whole(dim)),
        Memory::Exact { region } => Ok(region.clone()),
        Memory::Replay { coreset, .. } => {
            if coreset.is_empty() {
                return Ok(ConvexRegion::whole(dim));
            }
            let merged = EmpiricalTask::new(0, coreset.clone())?;
            sat_region(criterion, &merged)
        }
        Memory::Reg { .. } => Ok(ConvexRegion::from_constraints(
            dim,
            Vec::new(),
            vec![Ball::new(state.theta.clone(), Rat::zero())],
        )),
    }
}

/// Parses an algorithm selector: `exact`, `replay`, `replay:k=<int>`, or
/// `reg:lambda=<rat>`.
pub fn parse_algorithm(name: &str) -> Result<Box<dyn ClAlgorithm>> {
    let name = name.trim();
    if name == "exact" {
        return Ok(Box::new(ExactCl));
    }
    if name == "replay" {
        return Ok(Box::new(ReplayCl::full()));
    }
    if let Some(arg) = name.strip_prefix("replay:k=") {
        let k: usize = arg
            .parse()
            .map_err(|_| Error::InvalidInput(format!("bad replay cap {arg:?}")))?;
        if k == 0 {
            return Err(Error::InvalidInput("replay cap must be at least 1".into()));
        }
        return Ok(Box::new(ReplayCl::new(k)));
    }
    if let Some(arg) = name.strip_prefix("reg:lambda=") {
        let lambda = crate::rat::parse_rat(arg)?;
        if lambda.is_negative() {
            return Err(Error::InvalidInput("lambda must be nonnegative".into()));
        }
        return Ok(Box::new(RegCl::new(lambda)));
    }
    Err(Error::InvalidInput(format!(
        "unknown algorithm {name:?}; expected exact, replay, replay:k=<int>, or reg:lambda=<rat>"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cl::{run, TraceEnd};
    use crate::criteria::scalar_atom;
    use crate::rat::rat;

    fn c_eps(n: i64, d: i64) -> Criterion {
        Criterion::per_sample_abs(rat(n, d))
    }

    fn task_1d(id: usize, y: Rat) -> EmpiricalTask {
        EmpiricalTask::new(id, vec![scalar_atom(RatVec::from_i64(&[1]), y)]).unwrap()
    }

    #[test]
    fn exact_two_interval_tasks() {
        // Sat regions [0,2] and [1,3]; their intersection is [1,2] with
        // center 3/2, and the memory holds all four halfspaces.
        let c = c_eps(1, 1);
        let stream = vec![task_1d(1, rat_int(1)), task_1d(2, rat_int(2))];
        let trace = run(&ExactCl, &stream, &c).unwrap();
        assert_eq!(trace.records[1].theta, RatVec::new(vec![rat(3, 2)]));
        assert_eq!(trace.records[1].memory_size, 4);
    }

    #[test]
    fn exact_disjoint_tasks_infeasible() {
        let c = c_eps(1, 2);
        let stream = vec![task_1d(1, rat(1, 2)), task_1d(2, rat(5, 2))];
        let trace = run(&ExactCl, &stream, &c).unwrap();
        assert!(matches!(trace.end, TraceEnd::Infeasible { t: 2, .. }));
    }

    #[test]
    fn exact_singleton_intersection() {
        // Atoms (x=1, y=a) and (x=1, y=a+2e) across two tasks pin the
        // intersection to the single point a+e.
        let a = rat(1, 4);
        let eps = rat(1, 2);
        let c = Criterion::per_sample_abs(eps.clone());
        let stream = vec![task_1d(1, a.clone()), task_1d(2, &a + rat_int(2) * &eps)];
        let trace = run(&ExactCl, &stream, &c).unwrap();
        assert!(trace.is_complete());
        assert_eq!(trace.records[1].theta, RatVec::new(vec![&a + &eps]));
        let mut state = ExactCl.init(1);
        for task in &stream {
            state = ExactCl.step(&state, task, &c).unwrap();
        }
        let Memory::Exact { region } = &state.memory else {
            unreachable!()
        };
        let (_, radius) =
            crate::geometry::chebyshev_center_radius(region, &default_chebyshev_bound()).unwrap();
        assert!(radius.is_zero());
    }

    #[test]
    fn replay_first_step_is_exact_minimax() {
        // Single task, atoms y = 0 and y = 1 on x = 1: minimax residual
        // is 1/2 at theta = 1/2.
        let c = c_eps(1, 2);
        let t = EmpiricalTask::new(
            1,
            vec![
                scalar_atom(RatVec::from_i64(&[1]), rat_int(0)),
                scalar_atom(RatVec::from_i64(&[1]), rat_int(1)),
            ],
        )
        .unwrap();
        let state = ReplayCl::full().init(1);
        let next = ReplayCl::full().step(&state, &t, &c).unwrap();
        assert_eq!(next.theta, RatVec::new(vec![rat(1, 2)]));
    }

    #[test]
    fn replay_cap_one_keeps_max_residual_atom() {
        // Under the incoming theta = 0 the residuals are 1 and 2; the
        // cap-1 coreset must store the second atom.
        let c = c_eps(1, 2);
        let t = EmpiricalTask::new(
            1,
            vec![
                scalar_atom(RatVec::from_i64(&[1]), rat_int(1)),
                scalar_atom(RatVec::from_i64(&[1]), rat_int(-2)),
            ],
        )
        .unwrap();
        let alg = ReplayCl::new(1);
        let next = alg.step(&alg.init(1), &t, &c).unwrap();
        let Memory::Replay { coreset, .. } = &next.memory else {
            unreachable!()
        };
        assert_eq!(coreset.len(), 1);
        assert_eq!(coreset[0].y[0], rat_int(-2));
    }

    #[test]
    fn reg_small_lambda_fits_feasible_task() {
        // Anchor far from the task; with a tiny penalty the descent must
        // reach (near-)zero hinge loss on a feasible task.
        let c = c_eps(1, 2);
        let t = EmpiricalTask::new(
            1,
            vec![
                scalar_atom(RatVec::from_i64(&[1, 0]), rat_int(0)),
                scalar_atom(RatVec::from_i64(&[0, 1]), rat_int(0)),
            ],
        )
        .unwrap();
        let alg = RegCl::new(rat(1, 1000));
        let mut state = alg.init(2);
        state.theta = RatVec::from_i64(&[8, 8]);
        state.memory = Memory::Reg {
            anchor: RatVec::from_i64(&[8, 8]),
            lambda: rat(1, 1000),
        };
        let next = alg.step(&state, &t, &c).unwrap();
        let (hinge, _) = hinge_loss(&c, &next.theta, &t);
        assert!(hinge <= rat(1, 10), "hinge left at {hinge}");
    }

    #[test]
    fn reg_huge_lambda_pins_anchor() {
        let c = c_eps(1, 2);
        let t = task_1d(1, rat_int(10));
        let lambda = rat_int(1_000_000);
        let alg = RegCl::new(lambda.clone());
        let anchor = RatVec::from_i64(&[1]);
        let state = ClState::initial(
            anchor.clone(),
            Memory::Reg {
                anchor: anchor.clone(),
                lambda,
            },
        );
        let next = alg.step(&state, &t, &c).unwrap();
        let moved = next.theta.dist_sq(&anchor);
        assert!(moved < rat(1, 10_000), "moved^2 = {moved}");
    }

    #[test]
    fn oracle_sets_by_memory_kind() {
        let c = c_eps(1, 1);
        let stream = vec![task_1d(1, rat_int(1)), task_1d(2, rat_int(2))];

        let mut exact_state = ExactCl.init(1);
        for task in &stream {
            exact_state = ExactCl.step(&exact_state, task, &c).unwrap();
        }
        let exact_set = reconstruct_oracle_set(&exact_state, &c, 1).unwrap();
        assert_eq!(exact_set.halfspaces().len(), 4);

        let replay = ReplayCl::full();
        let mut replay_state = replay.init(1);
        for task in &stream {
            replay_state = replay.step(&replay_state, task, &c).unwrap();
        }
        let replay_set = reconstruct_oracle_set(&replay_state, &c, 1).unwrap();
        // Same point set as the exact region: probe the 1/8 grid on [-1, 4].
        for k in -8..=32 {
            let p = RatVec::new(vec![rat(k, 8)]);
            assert_eq!(
                exact_set.contains(&p).unwrap(),
                replay_set.contains(&p).unwrap(),
                "probe {p}"
            );
        }

        let reg = RegCl::new(rat_int(10));
        let mut reg_state = reg.init(1);
        for task in &stream {
            reg_state = reg.step(&reg_state, task, &c).unwrap();
        }
        let reg_set = reconstruct_oracle_set(&reg_state, &c, 1).unwrap();
        assert_eq!(reg_set.as_point(), Some(&reg_state.theta));
    }

    #[test]
    fn memory_growth_profiles() {
        let c = c_eps(1, 1);
        let stream: Vec<EmpiricalTask> = (0..4).map(|i| task_1d(i, rat(i as i64, 4))).collect();
        let exact = run(&ExactCl, &stream, &c).unwrap();
        let sizes: Vec<usize> = exact.records.iter().map(|r| r.memory_size).collect();
        assert_eq!(sizes, vec![2, 4, 6, 8]);
        let reg = run(&RegCl::new(rat_int(10)), &stream, &c).unwrap();
        assert!(reg.records.iter().all(|r| r.memory_size == 1));
    }

    #[test]
    fn exact_memory_equals_fold_intersection_under_probes() {
        use crate::harness::{generate, grid_vec, seeded_rng, StreamKind, StreamSpec};
        let c = c_eps(1, 2);
        let spec = StreamSpec {
            kind: StreamKind::PlantedFeasible,
            seed: 17,
            dim: 2,
            tasks: 4,
            n_per_task: 2,
            epsilon: rat(1, 2),
            margin: rat(1, 4),
        };
        let stream = generate(&spec).unwrap();
        let mut rng = seeded_rng(0xbeef);
        let mut state = ExactCl.init(2);
        let mut fold = ConvexRegion::whole(2);
        for task in &stream {
            state = ExactCl.step(&state, task, &c).unwrap();
            fold = fold.intersect(&sat_region(&c, task).unwrap()).unwrap();
            let Memory::Exact { region } = &state.memory else {
                unreachable!()
            };
            // the parameter always sits in its own memory
            assert!(region.contains(&state.theta).unwrap());
            // memory and the independent fold agree as point sets
            for _ in 0..100 {
                let p = grid_vec(&mut rng, 2, -4, 4);
                assert_eq!(
                    region.contains(&p).unwrap(),
                    fold.contains(&p).unwrap(),
                    "probe {p}"
                );
            }
        }
    }

    #[test]
    fn full_replay_tracks_exact_on_planted_streams() {
        use crate::harness::{generate, StreamKind, StreamSpec};
        let c = c_eps(1, 2);
        for seed in 0..10u64 {
            let spec = StreamSpec {
                kind: StreamKind::PlantedFeasible,
                seed,
                dim: 2,
                tasks: 5,
                n_per_task: 3,
                epsilon: rat(1, 2),
                margin: rat(1, 4),
            };
            let stream = generate(&spec).unwrap();
            let exact = run(&ExactCl, &stream, &c).unwrap();
            let replay = run(&ReplayCl::full(), &stream, &c).unwrap();
            // whenever the exact learner satisfies everything, so does
            // full replay: its minimax fit over all atoms has residual at
            // most the planted margin slack on every atom
            if crate::cl::check_optimality(&exact) {
                assert!(crate::cl::check_optimality(&replay), "seed {seed}");
            }
        }
    }

    #[test]
    fn reg_exits_first_region_on_adversarial_stream() {
        use crate::harness::{generate, StreamKind, StreamSpec};
        let spec = StreamSpec {
            kind: StreamKind::AdversarialShift,
            seed: 0,
            dim: 2,
            tasks: 2,
            n_per_task: 2,
            epsilon: rat(1, 2),
            margin: rat(1, 4),
        };
        let stream = generate(&spec).unwrap();
        let c = c_eps(1, 2);
        let trace = run(&RegCl::new(rat_int(10)), &stream, &c).unwrap();
        assert!(trace.is_complete());
        // step 1 satisfies the first task; step 2 has left its region
        assert_eq!(trace.records[0].satisfied, vec![true]);
        assert!(!trace.records[1].satisfied[0], "forgot task 1");
        // and the stationary point sits near (1/20, 2/5), well outside
        // the slab half-width 1/8
        let v = trace.records[1].theta[1].clone();
        assert!(v > rat(1, 4), "v = {v}");
    }

    #[test]
    fn parser_round_trips() {
        for name in ["exact", "replay", "replay:k=3", "reg:lambda=10"] {
            assert_eq!(parse_algorithm(name).unwrap().name(), name);
        }
        assert!(parse_algorithm("reg:lambda=1/2").is_ok());
        assert!(parse_algorithm("sgd").is_err());
        assert!(parse_algorithm("replay:k=0").is_err());
    }
}
