//! Empirical tasks, optimality criteria, and their satisfaction regions.
//!
//! A criterion is a binary predicate on (parameter, task). Its
//! satisfaction region is the set of parameters where the predicate holds;
//! for the three kinds implemented here that set is always a conjunction
//! of halfspaces and balls, so it fits [`ConvexRegion`] exactly:
//!
//! - `PerSampleAbs`: every residual `|y_i - theta . x_i| <= eps`; two
//!   halfspaces per atom.
//! - `MeanAbs`: mean absolute residual `<= eps`; one halfspace per sign
//!   pattern over the atoms (the exact H-form of an l1 constraint), which
//!   caps the atom count at [`MEAN_ABS_SIGN_CAP`].
//! - `MeanSqEuclid`: mean squared distance of the outputs to `theta`
//!   `<= eps`; a single ball around the output mean with squared radius
//!   `eps - variance` (empty when `eps` is below the variance).
//!
//! The defining identity (the criterion holds at `theta` iff `theta` is
//! in the region) is exact and is exposed as a test hook through
//! [`region_criterion_consistency`].

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::geometry::{Ball, ConvexRegion, Halfspace};
use crate::rat::{rat_int, Rat, RatVec};

/// One observation: an input block `x` and an output block `y`. Scalar
/// outputs are stored as 1-dimensional vectors; input-free tasks use a
/// 0-dimensional `x`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Atom {
    pub x: RatVec,
    pub y: RatVec,
}

impl Atom {
    pub fn new(x: RatVec, y: RatVec) -> Self {
        Atom { x, y }
    }
}

/// A task as an empirical measure: the uniform distribution over its
/// atoms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmpiricalTask {
    id: usize,
    atoms: Vec<Atom>,
}

impl EmpiricalTask {
    pub fn new(id: usize, atoms: Vec<Atom>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::InvalidInput("task needs at least one atom".into()));
        }
        let (dx, dy) = (atoms[0].x.dim(), atoms[0].y.dim());
        if dy == 0 {
            return Err(Error::InvalidInput(
                "outputs must have dimension >= 1".into(),
            ));
        }
        for a in &atoms {
            if a.x.dim() != dx || a.y.dim() != dy {
                return Err(Error::InvalidInput(
                    "all atoms of a task must share dimensions".into(),
                ));
            }
        }
        Ok(EmpiricalTask { id, atoms })
    }

    pub fn id(&self) -> usize {
        self.id
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn n(&self) -> usize {
        self.atoms.len()
    }

    pub fn dim_x(&self) -> usize {
        self.atoms[0].x.dim()
    }

    pub fn dim_y(&self) -> usize {
        self.atoms[0].y.dim()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CriterionKind {
    PerSampleAbs,
    MeanAbs,
    MeanSqEuclid,
}

/// A criterion kind together with its threshold. `epsilon` is a
/// per-experiment constant; the default is 1/2.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Criterion {
    pub kind: CriterionKind,
    pub epsilon: Rat,
}

impl Criterion {
    pub fn new(kind: CriterionKind, epsilon: Rat) -> Result<Self> {
        if epsilon.is_negative() {
            return Err(Error::InvalidInput("epsilon must be nonnegative".into()));
        }
        Ok(Criterion { kind, epsilon })
    }

    pub fn per_sample_abs(epsilon: Rat) -> Self {
        Criterion {
            kind: CriterionKind::PerSampleAbs,
            epsilon,
        }
    }

    /// The parameter dimension a hypothesis must have for this criterion
    /// on the given task.
    pub fn hypothesis_dim(&self, task: &EmpiricalTask) -> usize {
        match self.kind {
            CriterionKind::PerSampleAbs | CriterionKind::MeanAbs => task.dim_x(),
            CriterionKind::MeanSqEuclid => task.dim_y(),
        }
    }
}

pub fn default_epsilon() -> Rat {
    crate::rat::rat(1, 2)
}

/// A linear predictor `x -> theta . x` (for the residual criteria) or a
/// location estimate (for the mean-squared criterion).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearHypothesis {
    pub theta: RatVec,
}

impl LinearHypothesis {
    pub fn new(theta: RatVec) -> Self {
        LinearHypothesis { theta }
    }

    pub fn predict(&self, x: &RatVec) -> Rat {
        self.theta.dot(x)
    }

    /// `y - theta . x` for a scalar-output atom.
    pub fn residual(&self, atom: &Atom) -> Rat {
        &atom.y[0] - self.predict(&atom.x)
    }
}

/// Largest atom count for which the mean-absolute region is materialized
/// (it needs one halfspace per sign pattern, i.e. `2^n`).
pub const MEAN_ABS_SIGN_CAP: usize = 12;

fn check_residual_dims(c: &Criterion, theta: &RatVec, task: &EmpiricalTask) -> Result<()> {
    let _ = c;
    if task.dim_y() != 1 {
        return Err(Error::InvalidInput(
            "residual criteria need scalar outputs".into(),
        ));
    }
    if theta.dim() != task.dim_x() {
        return Err(Error::InvalidInput(format!(
            "theta dimension {} != input dimension {}",
            theta.dim(),
            task.dim_x()
        )));
    }
    Ok(())
}

/// Evaluates the criterion at `theta`: true means satisfied. Comparisons
/// are exact.
pub fn evaluate_criterion(c: &Criterion, theta: &RatVec, task: &EmpiricalTask) -> Result<bool> {
    match c.kind {
        CriterionKind::PerSampleAbs => {
            check_residual_dims(c, theta, task)?;
            let h = LinearHypothesis::new(theta.clone());
            Ok(task
                .atoms()
                .iter()
                .all(|a| h.residual(a).abs() <= c.epsilon))
        }
        CriterionKind::MeanAbs => {
            check_residual_dims(c, theta, task)?;
            let h = LinearHypothesis::new(theta.clone());
            let total: Rat = task
                .atoms()
                .iter()
                .map(|a| h.residual(a).abs())
                .fold(Rat::zero(), |acc, r| acc + r);
            Ok(total <= &c.epsilon * rat_int(task.n() as i64))
        }
        CriterionKind::MeanSqEuclid => {
            if task.dim_x() != 0 {
                return Err(Error::InvalidInput(
                    "mean-squared criterion needs input-free tasks".into(),
                ));
            }
            if theta.dim() != task.dim_y() {
                return Err(Error::InvalidInput(format!(
                    "theta dimension {} != output dimension {}",
                    theta.dim(),
                    task.dim_y()
                )));
            }
            let total: Rat = task
                .atoms()
                .iter()
                .map(|a| a.y.dist_sq(theta))
                .fold(Rat::zero(), |acc, d| acc + d);
            Ok(total <= &c.epsilon * rat_int(task.n() as i64))
        }
    }
}

/// Adds `normal . theta <= offset`, resolving degenerate zero normals:
/// a zero normal makes the constraint trivially true (dropped) or
/// impossible (the whole region collapses to empty).
fn push_halfspace(halfspaces: &mut Vec<Halfspace>, normal: RatVec, offset: Rat) -> Result<bool> {
    if normal.is_zero() {
        return Ok(!offset.is_negative());
    }
    halfspaces.push(Halfspace::new(normal, offset));
    Ok(true)
}

/// The satisfaction region of the criterion on one task.
///
/// The returned constraint list is canonicalized (sorted, exact duplicates
/// removed), so it is a function of the task's atom *set*: duplicating or
/// permuting atoms cannot change it.
pub fn sat_region(c: &Criterion, task: &EmpiricalTask) -> Result<ConvexRegion> {
    match c.kind {
        CriterionKind::PerSampleAbs => {
            check_residual_dims(c, &RatVec::zeros(task.dim_x()), task)?;
            let d = task.dim_x();
            let mut halfspaces = Vec::with_capacity(2 * task.n());
            for a in task.atoms() {
                let y = &a.y[0];
                // theta . x <= y + eps  and  -theta . x <= eps - y
                if !push_halfspace(&mut halfspaces, a.x.clone(), y + &c.epsilon)? {
                    return Ok(ConvexRegion::empty(d));
                }
                if !push_halfspace(&mut halfspaces, a.x.neg(), &c.epsilon - y)? {
                    return Ok(ConvexRegion::empty(d));
                }
            }
            Ok(ConvexRegion::from_halfspaces(d, halfspaces).canonicalized())
        }
        CriterionKind::MeanAbs => {
            check_residual_dims(c, &RatVec::zeros(task.dim_x()), task)?;
            let n = task.n();
            if n > MEAN_ABS_SIGN_CAP {
                return Err(Error::TaskTooLarge(format!(
                    "mean-abs region needs 2^{n} halfspaces; cap is 2^{MEAN_ABS_SIGN_CAP}"
                )));
            }
            let d = task.dim_x();
            let n_eps = &c.epsilon * rat_int(n as i64);
            let mut halfspaces = Vec::with_capacity(1 << n);
            // One halfspace per sign pattern s in {-1,+1}^n:
            // sum_i s_i (y_i - theta . x_i) <= n eps, i.e.
            // (-sum_i s_i x_i) . theta <= n eps - sum_i s_i y_i.
            for pattern in 0u32..(1 << n) {
                let mut normal = RatVec::zeros(d);
                let mut y_sum = Rat::zero();
                for (i, a) in task.atoms().iter().enumerate() {
                    if pattern & (1 << i) == 0 {
                        normal = normal.sub(&a.x);
                        y_sum += &a.y[0];
                    } else {
                        normal = normal.add(&a.x);
                        y_sum -= &a.y[0];
                    }
                }
                if !push_halfspace(&mut halfspaces, normal, &n_eps - y_sum)? {
                    return Ok(ConvexRegion::empty(d));
                }
            }
            Ok(ConvexRegion::from_halfspaces(d, halfspaces).canonicalized())
        }
        CriterionKind::MeanSqEuclid => {
            if task.dim_x() != 0 {
                return Err(Error::InvalidInput(
                    "mean-squared criterion needs input-free tasks".into(),
                ));
            }
            let d = task.dim_y();
            let n = rat_int(task.n() as i64);
            let mut mean = RatVec::zeros(d);
            for a in task.atoms() {
                mean = mean.add(&a.y);
            }
            let mean = mean.scale(&(Rat::one() / &n));
            let variance: Rat = task
                .atoms()
                .iter()
                .map(|a| a.y.dist_sq(&mean))
                .fold(Rat::zero(), |acc, v| acc + v)
                / &n;
            // Bias-variance: mean sq distance to theta = ||theta - mean||^2
            // + variance, so the region is a ball of squared radius
            // eps - variance around the mean.
            let radius_sq = &c.epsilon - &variance;
            if radius_sq.is_negative() {
                Ok(ConvexRegion::empty(d))
            } else {
                Ok(ConvexRegion::from_constraints(
                    d,
                    Vec::new(),
                    vec![Ball::new(mean, radius_sq)],
                ))
            }
        }
    }
}

/// The defining identity of the satisfaction region, checked pointwise:
/// for every probe, the criterion holds iff the probe is in the region.
pub fn region_criterion_consistency(
    c: &Criterion,
    task: &EmpiricalTask,
    probes: &[RatVec],
) -> Result<bool> {
    let region = sat_region(c, task)?;
    for p in probes {
        if evaluate_criterion(c, p, task)? != region.contains(p)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Convenience: a scalar-output atom from rationals.
pub fn scalar_atom(x: RatVec, y: Rat) -> Atom {
    Atom::new(x, RatVec::new(vec![y]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{chebyshev_center, default_chebyshev_bound, lp_feasible, Feasibility};
    use crate::rat::rat;

    fn half_eps() -> Criterion {
        Criterion::per_sample_abs(rat(1, 2))
    }

    fn task_1d(id: usize, ys: &[Rat]) -> EmpiricalTask {
        let atoms = ys
            .iter()
            .map(|y| scalar_atom(RatVec::from_i64(&[1]), y.clone()))
            .collect();
        EmpiricalTask::new(id, atoms).unwrap()
    }

    #[test]
    fn per_sample_evaluation() {
        let c = half_eps();
        let t = task_1d(1, &[rat_int(1)]);
        assert!(evaluate_criterion(&c, &RatVec::from_i64(&[1]), &t).unwrap());

        // Atoms (x=1, y=1) and (x=1, y=3): the midpoint predictor has both
        // residuals exactly 1, so it satisfies eps = 1 but not eps = 1/2,
        // and theta = 1 fails either way on the second residual (2).
        let t2 = task_1d(2, &[rat_int(1), rat_int(3)]);
        assert!(!evaluate_criterion(&c, &RatVec::from_i64(&[2]), &t2).unwrap());
        let c1 = Criterion::per_sample_abs(rat_int(1));
        assert!(evaluate_criterion(&c1, &RatVec::from_i64(&[2]), &t2).unwrap());
        assert!(!evaluate_criterion(&c1, &RatVec::from_i64(&[1]), &t2).unwrap());
    }

    #[test]
    fn mean_sq_exact_boundary() {
        let c = Criterion::new(CriterionKind::MeanSqEuclid, rat_int(1)).unwrap();
        let atoms = vec![
            Atom::new(RatVec::zeros(0), RatVec::from_i64(&[0, 0])),
            Atom::new(RatVec::zeros(0), RatVec::from_i64(&[2, 0])),
        ];
        let t = EmpiricalTask::new(1, atoms).unwrap();
        // mean squared distance from (1,0) is exactly 1
        assert!(evaluate_criterion(&c, &RatVec::from_i64(&[1, 0]), &t).unwrap());
        assert!(
            !evaluate_criterion(&c, &RatVec::new(vec![rat(101, 100), rat_int(0)]), &t).unwrap()
        );
    }

    #[test]
    fn per_sample_region_single_atom() {
        // One atom (x = (1,0), y = 1), eps = 1/2: exactly the slab
        // 1/2 <= theta_1 <= 3/2, two halfspaces.
        let c = half_eps();
        let t = EmpiricalTask::new(1, vec![scalar_atom(RatVec::from_i64(&[1, 0]), rat_int(1))])
            .unwrap();
        let region = sat_region(&c, &t).unwrap();
        assert_eq!(region.halfspaces().len(), 2);
        assert!(region
            .contains(&RatVec::new(vec![rat(1, 2), rat_int(7)]))
            .unwrap());
        assert!(region
            .contains(&RatVec::new(vec![rat(3, 2), rat_int(-7)]))
            .unwrap());
        assert!(!region
            .contains(&RatVec::new(vec![rat(7, 4), rat_int(0)]))
            .unwrap());
    }

    #[test]
    fn mean_sq_region_zero_radius() {
        // eps equal to the variance leaves a single point: the mean.
        let atoms = vec![
            Atom::new(RatVec::zeros(0), RatVec::from_i64(&[0, 0])),
            Atom::new(RatVec::zeros(0), RatVec::from_i64(&[2, 0])),
        ];
        let t = EmpiricalTask::new(1, atoms).unwrap();
        let c = Criterion::new(CriterionKind::MeanSqEuclid, rat_int(1)).unwrap();
        let region = sat_region(&c, &t).unwrap();
        assert_eq!(region.as_point(), Some(&RatVec::from_i64(&[1, 0])));

        let too_small = Criterion::new(CriterionKind::MeanSqEuclid, rat(1, 2)).unwrap();
        assert!(sat_region(&too_small, &t).unwrap().is_empty_tag());
    }

    #[test]
    fn mean_abs_single_atom_matches_per_sample() {
        let t = task_1d(1, &[rat(3, 4)]);
        let ps = sat_region(&half_eps(), &t).unwrap();
        let ma = sat_region(
            &Criterion::new(CriterionKind::MeanAbs, rat(1, 2)).unwrap(),
            &t,
        )
        .unwrap();
        assert_eq!(ps, ma);
    }

    #[test]
    fn mean_abs_cap_enforced() {
        let ys: Vec<Rat> = (0..13).map(rat_int).collect();
        let t = task_1d(1, &ys);
        let c = Criterion::new(CriterionKind::MeanAbs, rat(1, 2)).unwrap();
        assert!(matches!(sat_region(&c, &t), Err(Error::TaskTooLarge(_))));
    }

    #[test]
    fn consistency_hooks() {
        let c = half_eps();
        let t = EmpiricalTask::new(
            1,
            vec![
                scalar_atom(RatVec::from_i64(&[1, 0]), rat_int(1)),
                scalar_atom(RatVec::from_i64(&[0, 1]), rat(-1, 2)),
            ],
        )
        .unwrap();
        // Chebyshev center of the region satisfies the criterion.
        let region = sat_region(&c, &t).unwrap();
        let center = chebyshev_center(&region, &default_chebyshev_bound()).unwrap();
        assert!(evaluate_criterion(&c, &center, &t).unwrap());
        // A point pushed past every bound by 2 eps fails it.
        let far = RatVec::from_i64(&[4, 4]);
        assert!(!evaluate_criterion(&c, &far, &t).unwrap());
        assert!(region_criterion_consistency(&c, &t, &[center, far]).unwrap());
    }

    #[test]
    fn zero_eps_independent_atoms_pin_theta() {
        // eps = 0 with d independent atoms: the region is a single point,
        // so the inscribed radius is 0.
        let c = Criterion::per_sample_abs(rat_int(0));
        let t = EmpiricalTask::new(
            1,
            vec![
                scalar_atom(RatVec::from_i64(&[1, 0]), rat(1, 4)),
                scalar_atom(RatVec::from_i64(&[0, 1]), rat(3, 4)),
            ],
        )
        .unwrap();
        let region = sat_region(&c, &t).unwrap();
        let (center, radius) =
            crate::geometry::chebyshev_center_radius(&region, &default_chebyshev_bound()).unwrap();
        assert_eq!(center, RatVec::new(vec![rat(1, 4), rat(3, 4)]));
        assert!(radius.is_zero());
    }

    #[test]
    fn duplication_leaves_region_unchanged() {
        let c = half_eps();
        let base = vec![
            scalar_atom(RatVec::from_i64(&[1, 1]), rat(1, 4)),
            scalar_atom(RatVec::from_i64(&[2, -1]), rat(-1, 2)),
        ];
        let mut doubled = base.clone();
        doubled.extend(base.clone());
        let t1 = EmpiricalTask::new(1, base).unwrap();
        let t2 = EmpiricalTask::new(2, doubled).unwrap();
        assert_eq!(sat_region(&c, &t1).unwrap(), sat_region(&c, &t2).unwrap());
    }

    #[test]
    fn mean_abs_inside_scaled_per_sample() {
        // Mean-abs region sits inside the per-sample region at n * eps:
        // a single residual is bounded by the residual sum.
        let eps = rat(1, 2);
        let t = task_1d(1, &[rat_int(0), rat(1, 4), rat(-1, 2)]);
        let ma = sat_region(
            &Criterion::new(CriterionKind::MeanAbs, eps.clone()).unwrap(),
            &t,
        )
        .unwrap();
        let ps_scaled =
            sat_region(&Criterion::per_sample_abs(&eps * rat_int(t.n() as i64)), &t).unwrap();
        for k in -40..=40 {
            let p = RatVec::new(vec![rat(k, 8)]);
            if ma.contains(&p).unwrap() {
                assert!(ps_scaled.contains(&p).unwrap());
            }
        }
    }

    #[test]
    fn degenerate_zero_input_atom() {
        let c = half_eps();
        // |y| <= eps with x = 0 is parameter-free: satisfiable -> whole
        // space, unsatisfiable -> empty.
        let ok = EmpiricalTask::new(1, vec![scalar_atom(RatVec::zeros(2), rat(1, 4))]).unwrap();
        assert!(sat_region(&c, &ok).unwrap().is_whole());
        let bad = EmpiricalTask::new(2, vec![scalar_atom(RatVec::zeros(2), rat_int(3))]).unwrap();
        let region = sat_region(&c, &bad).unwrap();
        assert!(region.is_empty_tag());
        assert_eq!(lp_feasible(&region).unwrap(), Feasibility::Empty);
    }
}
