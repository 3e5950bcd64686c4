//! Exact rational geometry kernel.
//!
//! Regions are conjunctions of closed halfspaces `a.x <= b` and closed
//! balls `||x - c||^2 <= r^2`, all over exact rationals. Membership and
//! polytope feasibility are decided exactly; ball-bearing regions get a
//! search-plus-certificate treatment because exact emptiness of ball
//! intersections would require algebraic numbers.
//!
//! All types are immutable values and every operation is a pure function,
//! so everything here is safe to call from concurrent workers.

pub mod descent;
pub mod simplex;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rat::{pow2_inv, rat_int, sqrt_upper, Rat, RatVec};
use simplex::{solve_min, LpOutcome, Row};

/// Closed halfspace `normal . x <= offset`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Halfspace {
    pub normal: RatVec,
    pub offset: Rat,
}

impl Halfspace {
    pub fn new(normal: RatVec, offset: Rat) -> Self {
        Halfspace { normal, offset }
    }

    pub fn dim(&self) -> usize {
        self.normal.dim()
    }

    /// Signed violation `normal . x - offset`; nonpositive inside.
    pub fn violation(&self, point: &RatVec) -> Rat {
        self.normal.dot(point) - &self.offset
    }

    pub fn satisfies(&self, point: &RatVec) -> bool {
        !self.violation(point).is_positive()
    }
}

/// Closed ball `||x - center||^2 <= radius_sq`. A zero `radius_sq` is a
/// single point; negative squared radii are never stored (a region known
/// to be empty is tagged empty instead).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Ball {
    pub center: RatVec,
    pub radius_sq: Rat,
}

impl Ball {
    pub fn new(center: RatVec, radius_sq: Rat) -> Self {
        Ball { center, radius_sq }
    }

    pub fn dim(&self) -> usize {
        self.center.dim()
    }

    /// Signed violation `||x - c||^2 - r^2`; nonpositive inside.
    pub fn violation(&self, point: &RatVec) -> Rat {
        point.dist_sq(&self.center) - &self.radius_sq
    }

    pub fn satisfies(&self, point: &RatVec) -> bool {
        !self.violation(point).is_positive()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegionTag {
    NonTrivial,
    /// Contains no point; carries no constraints.
    Empty,
    /// All of parameter space; carries no constraints.
    Whole,
}

/// A conjunction of halfspace and ball constraints in a fixed dimension.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConvexRegion {
    dim: usize,
    halfspaces: Vec<Halfspace>,
    balls: Vec<Ball>,
    tag: RegionTag,
}

impl ConvexRegion {
    pub fn whole(dim: usize) -> Self {
        ConvexRegion {
            dim,
            halfspaces: Vec::new(),
            balls: Vec::new(),
            tag: RegionTag::Whole,
        }
    }

    pub fn empty(dim: usize) -> Self {
        ConvexRegion {
            dim,
            halfspaces: Vec::new(),
            balls: Vec::new(),
            tag: RegionTag::Empty,
        }
    }

    pub fn from_halfspaces(dim: usize, halfspaces: Vec<Halfspace>) -> Self {
        Self::from_constraints(dim, halfspaces, Vec::new())
    }

    pub fn from_constraints(dim: usize, halfspaces: Vec<Halfspace>, balls: Vec<Ball>) -> Self {
        if halfspaces.is_empty() && balls.is_empty() {
            return Self::whole(dim);
        }
        ConvexRegion {
            dim,
            halfspaces,
            balls,
            tag: RegionTag::NonTrivial,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn tag(&self) -> RegionTag {
        self.tag
    }

    pub fn halfspaces(&self) -> &[Halfspace] {
        &self.halfspaces
    }

    pub fn balls(&self) -> &[Ball] {
        &self.balls
    }

    pub fn is_empty_tag(&self) -> bool {
        self.tag == RegionTag::Empty
    }

    pub fn is_whole(&self) -> bool {
        self.tag == RegionTag::Whole
    }

    pub fn constraint_count(&self) -> usize {
        self.halfspaces.len() + self.balls.len()
    }

    /// True when the region is a single point: one zero-radius ball and
    /// nothing else.
    pub fn as_point(&self) -> Option<&RatVec> {
        if self.halfspaces.is_empty() && self.balls.len() == 1 && self.balls[0].radius_sq.is_zero()
        {
            Some(&self.balls[0].center)
        } else {
            None
        }
    }

    /// Structural validity: consistent dimensions, no zero normals, no
    /// negative squared radii.
    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::InvalidRegion("dimension must be at least 1".into()));
        }
        for h in &self.halfspaces {
            if h.dim() != self.dim {
                return Err(Error::InvalidRegion(format!(
                    "halfspace dimension {} != region dimension {}",
                    h.dim(),
                    self.dim
                )));
            }
            if h.normal.is_zero() {
                return Err(Error::InvalidRegion("zero normal".into()));
            }
        }
        for b in &self.balls {
            if b.dim() != self.dim {
                return Err(Error::InvalidRegion(format!(
                    "ball dimension {} != region dimension {}",
                    b.dim(),
                    self.dim
                )));
            }
            if b.radius_sq.is_negative() {
                return Err(Error::InvalidRegion("negative squared radius".into()));
            }
        }
        Ok(())
    }

    /// Exact membership test. Both constraint kinds reduce to rational
    /// comparisons.
    pub fn contains(&self, point: &RatVec) -> Result<bool> {
        if point.dim() != self.dim {
            return Err(Error::InvalidRegion(format!(
                "point dimension {} != region dimension {}",
                point.dim(),
                self.dim
            )));
        }
        match self.tag {
            RegionTag::Empty => Ok(false),
            RegionTag::Whole => Ok(true),
            RegionTag::NonTrivial => Ok(self.halfspaces.iter().all(|h| h.satisfies(point))
                && self.balls.iter().all(|b| b.satisfies(point))),
        }
    }

    /// Constraint-list concatenation. Empty absorbs, Whole is the identity.
    pub fn intersect(&self, other: &ConvexRegion) -> Result<ConvexRegion> {
        if self.dim != other.dim {
            return Err(Error::InvalidRegion(format!(
                "cannot intersect regions of dimensions {} and {}",
                self.dim, other.dim
            )));
        }
        if self.is_empty_tag() || other.is_empty_tag() {
            return Ok(ConvexRegion::empty(self.dim));
        }
        let mut halfspaces = self.halfspaces.clone();
        halfspaces.extend(other.halfspaces.iter().cloned());
        let mut balls = self.balls.clone();
        balls.extend(other.balls.iter().cloned());
        Ok(ConvexRegion::from_constraints(self.dim, halfspaces, balls))
    }

    /// Constraints sorted lexicographically and exact duplicates removed.
    /// The point set is unchanged; lists become order-insensitive, which
    /// makes region construction a function of constraint *sets*.
    pub fn canonicalized(&self) -> ConvexRegion {
        match self.tag {
            RegionTag::NonTrivial => {
                let mut halfspaces = self.halfspaces.clone();
                halfspaces.sort();
                halfspaces.dedup();
                let mut balls = self.balls.clone();
                balls.sort();
                balls.dedup();
                ConvexRegion::from_constraints(self.dim, halfspaces, balls)
            }
            _ => self.clone(),
        }
    }
}

/// Answer of a feasibility decision. A `Feasible` witness satisfies every
/// halfspace exactly; ball-bearing regions only ever return witnesses that
/// also satisfy the ball constraints exactly, and `Unknown` can occur only
/// when balls are present.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Feasibility {
    Feasible(RatVec),
    Empty,
    Unknown,
}

/// Builds the LP rows for `halfspaces` over split variables
/// `x = x_pos - x_neg` with `extra` trailing nonnegative columns.
fn halfspace_rows(halfspaces: &[Halfspace], dim: usize, extra: usize) -> Vec<Row> {
    halfspaces
        .iter()
        .map(|h| {
            let mut coeffs = Vec::with_capacity(2 * dim + extra);
            for c in h.normal.iter() {
                coeffs.push(c.clone());
            }
            for c in h.normal.iter() {
                coeffs.push(-c);
            }
            for _ in 0..extra {
                coeffs.push(Rat::zero());
            }
            Row {
                coeffs,
                rhs: h.offset.clone(),
            }
        })
        .collect()
}

fn witness_from_split(x: &[Rat], dim: usize) -> RatVec {
    RatVec::new((0..dim).map(|i| &x[i] - &x[dim + i]).collect())
}

/// Exact emptiness decision for a polytope, with a rational witness on the
/// feasible side. Phase-1 simplex with Bland's rule; the answer is a
/// decision, never an estimate.
pub fn lp_feasible(region: &ConvexRegion) -> Result<Feasibility> {
    region.validate()?;
    if !region.balls.is_empty() {
        return Err(Error::InvalidRegion(
            "lp_feasible requires a polytope (no balls)".into(),
        ));
    }
    match region.tag {
        RegionTag::Empty => return Ok(Feasibility::Empty),
        RegionTag::Whole => return Ok(Feasibility::Feasible(RatVec::zeros(region.dim))),
        RegionTag::NonTrivial => {}
    }
    let d = region.dim;
    let rows = halfspace_rows(&region.halfspaces, d, 0);
    let zero_obj = vec![Rat::zero(); 2 * d];
    match solve_min(&rows, &zero_obj) {
        LpOutcome::Infeasible => Ok(Feasibility::Empty),
        LpOutcome::Optimal { x, .. } => {
            let w = witness_from_split(&x, d);
            debug_assert!(region.contains(&w)?);
            Ok(Feasibility::Feasible(w))
        }
        LpOutcome::Unbounded => unreachable!("zero objective cannot be unbounded"),
    }
}

/// Default bounding half-width for [`chebyshev_center`]: `2^10`.
pub fn default_chebyshev_bound() -> Rat {
    rat_int(1 << 10)
}

/// Center of the largest inscribed ball of the region clipped to the box
/// `[-bound, bound]^d`, together with the inscribed radius.
///
/// The LP maximizes `r` subject to `a_j . x + N_j r <= b_j`, where `N_j`
/// is a rational upper bound on the Euclidean norm of `a_j` computed by
/// [`sqrt_upper`] (Newton iteration rounded up to the `2^-32` grid). Using
/// an upper bound can only shrink the inscribed ball, so the returned
/// center satisfies every original constraint exactly; it sits within
/// about `2^-32` of the true Chebyshev center in well-scaled instances.
/// Ties are resolved by the simplex pivot order, so repeated calls agree
/// bit-for-bit.
pub fn chebyshev_center_radius(region: &ConvexRegion, bound: &Rat) -> Result<(RatVec, Rat)> {
    region.validate()?;
    if !region.balls.is_empty() {
        return Err(Error::InvalidRegion(
            "chebyshev_center requires a polytope (no balls)".into(),
        ));
    }
    if !bound.is_positive() {
        return Err(Error::InvalidInput(
            "chebyshev bound must be positive".into(),
        ));
    }
    if region.is_empty_tag() {
        return Err(Error::InfeasibleRegion);
    }
    let d = region.dim;
    let mut constraints = region.halfspaces.clone();
    for i in 0..d {
        let mut pos = vec![Rat::zero(); d];
        pos[i] = Rat::one();
        constraints.push(Halfspace::new(RatVec::new(pos.clone()), bound.clone()));
        pos[i] = -Rat::one();
        constraints.push(Halfspace::new(RatVec::new(pos), bound.clone()));
    }
    // Variables: x_pos (d), x_neg (d), r.
    let mut rows = halfspace_rows(&constraints, d, 1);
    for (row, h) in rows.iter_mut().zip(constraints.iter()) {
        row.coeffs[2 * d] = sqrt_upper(&h.normal.norm_sq(), 32);
    }
    let mut objective = vec![Rat::zero(); 2 * d + 1];
    objective[2 * d] = -Rat::one();
    match solve_min(&rows, &objective) {
        LpOutcome::Infeasible => Err(Error::InfeasibleRegion),
        LpOutcome::Optimal { x, value } => {
            let center = witness_from_split(&x, d);
            debug_assert!(region.contains(&center)?);
            Ok((center, -value))
        }
        LpOutcome::Unbounded => unreachable!("radius is boxed"),
    }
}

/// [`chebyshev_center_radius`] without the radius.
pub fn chebyshev_center(region: &ConvexRegion, bound: &Rat) -> Result<RatVec> {
    chebyshev_center_radius(region, bound).map(|(c, _)| c)
}

/// Certified lower bound on the max violation of the two-ball system
/// `i, j`, i.e. on `min_x max(viol_i(x), viol_j(x))`. Positive exactly
/// when the balls are disjoint. Derivation: the minimizer lies on the
/// segment between the centers where both violations balance, at distance
/// `u = (D^2 + r_i^2 - r_j^2) / (2D)` from center i; substituting gives
/// `u^2 - r_i^2 = (D^2 + r_i^2 - r_j^2)^2 / (4 D^2) - r_i^2`, rational in
/// the squared center distance `D^2`.
fn ball_pair_bound(bi: &Ball, bj: &Ball) -> Option<Rat> {
    let d2 = bi.center.dist_sq(&bj.center);
    if d2.is_zero() {
        return None; // concentric balls always share the common center
    }
    let num = &d2 + &bi.radius_sq - &bj.radius_sq;
    Some(&num * &num / (rat_int(4) * d2) - &bi.radius_sq)
}

/// Feasibility for regions that may mix balls and halfspaces.
///
/// Minimizes the max signed violation by normalized subgradient descent
/// (deterministic start at the mean of the ball centers, `max_iter`
/// steps). Returns `Feasible` only when the best iterate has exactly
/// nonpositive violation, `Empty` when some ball pair carries a rational
/// disjointness certificate of at least `tol`, and `Unknown` otherwise.
/// Pure polytopes are delegated to [`lp_feasible`], so `Unknown` can only
/// occur when balls are present.
pub fn ball_feasible(region: &ConvexRegion, tol: &Rat, max_iter: u32) -> Result<Feasibility> {
    region.validate()?;
    if !tol.is_positive() {
        return Err(Error::InvalidInput("tolerance must be positive".into()));
    }
    match region.tag {
        RegionTag::Empty => return Ok(Feasibility::Empty),
        RegionTag::Whole => return Ok(Feasibility::Feasible(RatVec::zeros(region.dim))),
        RegionTag::NonTrivial => {}
    }
    if region.balls.is_empty() {
        return lp_feasible(region);
    }
    for (i, bi) in region.balls.iter().enumerate() {
        for bj in region.balls.iter().skip(i + 1) {
            if let Some(bound) = ball_pair_bound(bi, bj) {
                if &bound >= tol {
                    return Ok(Feasibility::Empty);
                }
            }
        }
    }
    // Start at the mean of the ball centers.
    let n = rat_int(region.balls.len() as i64);
    let mut start = RatVec::zeros(region.dim);
    for b in &region.balls {
        start = start.add(&b.center);
    }
    let start = start.scale(&(Rat::one() / n));

    let objective = |x: &RatVec| max_violation(region, x);
    let out = descent::minimize(&start, &Rat::one(), &Rat::zero(), max_iter, true, objective);
    if !out.value.is_positive() {
        debug_assert!(region.contains(&out.point)?);
        Ok(Feasibility::Feasible(out.point))
    } else {
        Ok(Feasibility::Unknown)
    }
}

/// Max signed violation over all constraints and one subgradient of the
/// attaining constraint (ties: first halfspace, then first ball, in list
/// order).
fn max_violation(region: &ConvexRegion, x: &RatVec) -> (Rat, RatVec) {
    let mut best: Option<(Rat, RatVec)> = None;
    for h in &region.halfspaces {
        let v = h.violation(x);
        if best.as_ref().is_none_or(|(bv, _)| v > *bv) {
            best = Some((v, h.normal.clone()));
        }
    }
    for b in &region.balls {
        let v = b.violation(x);
        if best.as_ref().is_none_or(|(bv, _)| v > *bv) {
            let grad = x.sub(&b.center).scale(&rat_int(2));
            best = Some((v, grad));
        }
    }
    best.expect("non-trivial region has at least one constraint")
}

/// Default tolerance for ball feasibility decisions: `2^-20`.
pub fn default_ball_tol() -> Rat {
    pow2_inv(20)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat;

    fn interval(lo: Rat, hi: Rat) -> ConvexRegion {
        ConvexRegion::from_halfspaces(
            1,
            vec![
                Halfspace::new(RatVec::from_i64(&[-1]), -lo),
                Halfspace::new(RatVec::from_i64(&[1]), hi),
            ],
        )
    }

    #[test]
    fn interval_feasibility() {
        match lp_feasible(&interval(rat(1, 2), rat(3, 2))).unwrap() {
            Feasibility::Feasible(w) => {
                assert!(w[0] >= rat(1, 2) && w[0] <= rat(3, 2));
            }
            other => panic!("unexpected {other:?}"),
        }
        assert_eq!(
            lp_feasible(&interval(rat_int(1), rat_int(0))).unwrap(),
            Feasibility::Empty
        );
    }

    #[test]
    fn malformed_regions_rejected() {
        let zero_normal =
            ConvexRegion::from_halfspaces(2, vec![Halfspace::new(RatVec::zeros(2), rat_int(1))]);
        assert!(matches!(
            lp_feasible(&zero_normal),
            Err(Error::InvalidRegion(_))
        ));
        let mismatched = ConvexRegion::from_halfspaces(
            2,
            vec![Halfspace::new(RatVec::from_i64(&[1]), rat_int(1))],
        );
        assert!(matches!(
            lp_feasible(&mismatched),
            Err(Error::InvalidRegion(_))
        ));
        assert!(interval(rat_int(0), rat_int(1))
            .contains(&RatVec::zeros(2))
            .is_err());
    }

    #[test]
    fn intersect_algebra() {
        let a = interval(rat_int(0), rat_int(2));
        let b = interval(rat_int(1), rat_int(3));
        let ab = a.intersect(&b).unwrap();
        match lp_feasible(&ab).unwrap() {
            Feasibility::Feasible(w) => {
                assert!(w[0] >= rat_int(1) && w[0] <= rat_int(2));
            }
            other => panic!("unexpected {other:?}"),
        }
        let whole = ConvexRegion::whole(1);
        assert_eq!(a.intersect(&whole).unwrap(), a);
        let disjoint = a.intersect(&interval(rat_int(5), rat_int(6))).unwrap();
        assert_eq!(lp_feasible(&disjoint).unwrap(), Feasibility::Empty);
        let empty = ConvexRegion::empty(1);
        assert!(a.intersect(&empty).unwrap().is_empty_tag());
    }

    #[test]
    fn chebyshev_interval_and_square() {
        let bound = rat_int(4);
        let (c, r) = chebyshev_center_radius(&interval(rat(1, 2), rat(3, 2)), &bound).unwrap();
        assert_eq!(c, RatVec::new(vec![rat_int(1)]));
        assert_eq!(r, rat(1, 2));

        let square = ConvexRegion::from_halfspaces(
            2,
            vec![
                Halfspace::new(RatVec::from_i64(&[-1, 0]), rat_int(0)),
                Halfspace::new(RatVec::from_i64(&[0, -1]), rat_int(0)),
                Halfspace::new(RatVec::from_i64(&[1, 0]), rat_int(1)),
                Halfspace::new(RatVec::from_i64(&[0, 1]), rat_int(1)),
            ],
        );
        let (c, r) = chebyshev_center_radius(&square, &bound).unwrap();
        assert_eq!(c, RatVec::new(vec![rat(1, 2), rat(1, 2)]));
        assert_eq!(r, rat(1, 2));
    }

    #[test]
    fn chebyshev_triangle_incenter() {
        // {x >= 0, y >= 0, x + y <= 1}: the incenter is at (t, t) with
        // t = 1 - sqrt(2)/2, equidistant from all three edges.
        let triangle = ConvexRegion::from_halfspaces(
            2,
            vec![
                Halfspace::new(RatVec::from_i64(&[-1, 0]), rat_int(0)),
                Halfspace::new(RatVec::from_i64(&[0, -1]), rat_int(0)),
                Halfspace::new(RatVec::from_i64(&[1, 1]), rat_int(1)),
            ],
        );
        let (c, r) = chebyshev_center_radius(&triangle, &rat_int(4)).unwrap();
        // Analytic incenter: t = 1 - sqrt(2)/2, from equal leg distances t
        // and hypotenuse distance (1 - 2t)/sqrt(2). Rational bracket for
        // sqrt(2): 665857^2 = 2 * 470832^2 + 1, so 665857/470832 is an
        // upper bound and 2 * 470832/665857 a lower bound.
        let sqrt2_hi = rat(665_857, 470_832);
        let sqrt2_lo = rat(941_664, 665_857);
        let t_lo = Rat::one() - sqrt2_hi / rat_int(2) - pow2_inv(20);
        let t_hi = Rat::one() - sqrt2_lo / rat_int(2) + pow2_inv(20);
        for i in 0..2 {
            assert!(c[i] > t_lo && c[i] < t_hi, "coordinate {} = {}", i, c[i]);
        }
        assert_eq!(c[0], c[1]);
        // Distances to the two legs are the coordinates themselves; the
        // inscribed radius must match them to within the norm-bound slack.
        assert!((&r - &c[0]).abs() < pow2_inv(20));
        // Hypotenuse distance^2 = (1 - c0 - c1)^2 / 2 must equal r^2 up to
        // the same slack.
        let hyp_gap = Rat::one() - &c[0] - &c[1];
        let diff = (&hyp_gap * &hyp_gap / rat_int(2) - &r * &r).abs();
        assert!(diff < pow2_inv(20), "hypotenuse distance off by {diff}");
    }

    #[test]
    fn chebyshev_deterministic_and_infeasible() {
        let region = interval(rat_int(0), rat_int(2));
        let a = chebyshev_center(&region, &rat_int(4)).unwrap();
        let b = chebyshev_center(&region, &rat_int(4)).unwrap();
        assert_eq!(a, b);
        assert!(matches!(
            chebyshev_center(&interval(rat_int(3), rat_int(1)), &rat_int(4)),
            Err(Error::InfeasibleRegion)
        ));
    }

    #[test]
    fn contains_examples() {
        let ball = ConvexRegion::from_constraints(
            2,
            Vec::new(),
            vec![Ball::new(RatVec::zeros(2), rat_int(1))],
        );
        assert!(ball.contains(&RatVec::zeros(2)).unwrap());
        assert!(!ball.contains(&RatVec::from_i64(&[2, 0])).unwrap());
    }

    #[test]
    fn ball_feasibility_certificates() {
        let mk = |cx: i64, r2: i64| Ball::new(RatVec::from_i64(&[cx, 0]), rat_int(r2));
        // Unit balls three apart: disjoint with a fat certificate.
        let disjoint = ConvexRegion::from_constraints(2, Vec::new(), vec![mk(0, 1), mk(3, 1)]);
        assert_eq!(
            ball_feasible(&disjoint, &default_ball_tol(), 100).unwrap(),
            Feasibility::Empty
        );
        // Coincident unit balls: the shared center is feasible.
        let coincident = ConvexRegion::from_constraints(2, Vec::new(), vec![mk(0, 1), mk(0, 1)]);
        match ball_feasible(&coincident, &default_ball_tol(), 100).unwrap() {
            Feasibility::Feasible(w) => assert!(coincident.contains(&w).unwrap()),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn ball_feasibility_common_point() {
        // Three unit balls whose centers are within distance 1 of (1,1),
        // so (1,1) is a common interior point.
        let balls = vec![
            Ball::new(RatVec::new(vec![rat(3, 2), rat_int(1)]), rat_int(1)),
            Ball::new(RatVec::new(vec![rat(1, 2), rat_int(1)]), rat_int(1)),
            Ball::new(RatVec::new(vec![rat_int(1), rat(3, 2)]), rat_int(1)),
        ];
        let region = ConvexRegion::from_constraints(2, Vec::new(), balls);
        match ball_feasible(&region, &default_ball_tol(), 500).unwrap() {
            Feasibility::Feasible(w) => {
                assert!(region.contains(&w).unwrap());
                // The witness is an exact common point, hence within any
                // tolerance of one.
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn polytope_delegation_never_unknown() {
        let empty_poly = interval(rat_int(2), rat_int(1));
        assert_eq!(
            ball_feasible(&empty_poly, &default_ball_tol(), 10).unwrap(),
            Feasibility::Empty
        );
    }

    #[test]
    fn intersect_associative_commutative_up_to_permutation() {
        let a = interval(rat_int(0), rat_int(2));
        let b = interval(rat_int(1), rat_int(3));
        let c = interval(rat(1, 2), rat(5, 2));
        let left = a.intersect(&b).unwrap().intersect(&c).unwrap();
        let right = a.intersect(&b.intersect(&c).unwrap()).unwrap();
        assert_eq!(left.canonicalized(), right.canonicalized());
        let ab = a.intersect(&b).unwrap();
        let ba = b.intersect(&a).unwrap();
        assert_ne!(ab.halfspaces(), ba.halfspaces()); // genuinely permuted
        assert_eq!(ab.canonicalized(), ba.canonicalized());
    }

    /// The intersection-emptiness decision agrees with a membership-only
    /// grid scan on margin-filtered random instances (d=2, 1/8 grid).
    #[test]
    fn intersection_emptiness_matches_grid_scan() {
        use crate::harness::{grid_scan, grid_vec, seeded_rng};
        let mut rng = seeded_rng(0xfeed);
        let bound = rat(15, 4);
        let mut kept = 0;
        while kept < 100 {
            let mut make = |count: usize| {
                let mut hs = Vec::new();
                for _ in 0..count {
                    let mut normal = grid_vec(&mut rng, 2, -2, 2);
                    while normal.is_zero() {
                        normal = grid_vec(&mut rng, 2, -2, 2);
                    }
                    let anchor = grid_vec(&mut rng, 2, -3, 3);
                    let offset = normal.dot(&anchor) + grid_vec(&mut rng, 1, -1, 1)[0].clone();
                    hs.push(Halfspace::new(normal, offset));
                }
                ConvexRegion::from_halfspaces(2, hs)
            };
            let a = make(3);
            let b = make(3);
            let mut boxed = vec![
                Halfspace::new(RatVec::from_i64(&[1, 0]), bound.clone()),
                Halfspace::new(RatVec::from_i64(&[-1, 0]), bound.clone()),
                Halfspace::new(RatVec::from_i64(&[0, 1]), bound.clone()),
                Halfspace::new(RatVec::from_i64(&[0, -1]), bound.clone()),
            ];
            boxed.extend(a.halfspaces().iter().cloned());
            let a = ConvexRegion::from_halfspaces(2, boxed);
            let joint = a.intersect(&b).unwrap();
            let lp_feasible_joint = match lp_feasible(&joint).unwrap() {
                Feasibility::Empty => false,
                Feasibility::Feasible(_) => {
                    let (_, r) =
                        chebyshev_center_radius(&joint, &default_chebyshev_bound()).unwrap();
                    if r < rat(1, 4) {
                        continue; // sliver; below the grid's resolution
                    }
                    true
                }
                Feasibility::Unknown => unreachable!(),
            };
            kept += 1;
            let grid_found = grid_scan(&[a, b], -4, 4, 8).unwrap().is_some();
            assert_eq!(lp_feasible_joint, grid_found, "instance {kept}");
        }
    }

    /// Independent 1-D oracle: interval arithmetic over the bounds.
    #[test]
    fn one_dimensional_lp_matches_interval_arithmetic() {
        use crate::harness::seeded_rng;
        use rand::Rng;
        let mut rng = seeded_rng(0x1d);
        for case in 0..500 {
            let m = rng.gen_range(1..=6);
            let mut lo: Option<Rat> = None;
            let mut hi: Option<Rat> = None;
            let mut halfspaces = Vec::with_capacity(m);
            for _ in 0..m {
                let sign = if rng.gen_bool(0.5) { 1 } else { -1 };
                let a = rat(sign * rng.gen_range(1i64..=6), rng.gen_range(1..=4));
                let b = rat(rng.gen_range(-24i64..=24), rng.gen_range(1..=4));
                // a x <= b bounds x above (a > 0) or below (a < 0) by b/a
                let bound = &b / &a;
                if a.is_positive() {
                    hi = Some(match hi {
                        Some(h) if h < bound => h,
                        _ => bound,
                    });
                } else {
                    lo = Some(match lo {
                        Some(l) if l > bound => l,
                        _ => bound,
                    });
                }
                halfspaces.push(Halfspace::new(RatVec::new(vec![a]), b));
            }
            let feasible_by_intervals = match (&lo, &hi) {
                (Some(l), Some(h)) => l <= h,
                _ => true,
            };
            let region = ConvexRegion::from_halfspaces(1, halfspaces);
            let decision = lp_feasible(&region).unwrap();
            match decision {
                Feasibility::Feasible(w) => {
                    assert!(feasible_by_intervals, "case {case}");
                    assert!(region.contains(&w).unwrap());
                }
                Feasibility::Empty => assert!(!feasible_by_intervals, "case {case}"),
                Feasibility::Unknown => unreachable!(),
            }
        }
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        fn arb_halfspaces() -> impl Strategy<Value = Vec<Halfspace>> {
            proptest::collection::vec(
                ((-8i64..8, -8i64..8), -16i64..16).prop_filter_map(
                    "nonzero normal",
                    |((a1, a2), b)| {
                        if a1 == 0 && a2 == 0 {
                            None
                        } else {
                            Some(Halfspace::new(
                                RatVec::new(vec![rat(a1, 2), rat(a2, 2)]),
                                rat(b, 2),
                            ))
                        }
                    },
                ),
                1..6,
            )
        }

        proptest! {
            #[test]
            fn feasible_witnesses_are_members(hs in arb_halfspaces()) {
                let region = ConvexRegion::from_halfspaces(2, hs);
                if let Feasibility::Feasible(w) = lp_feasible(&region).unwrap() {
                    prop_assert!(region.contains(&w).unwrap());
                }
            }

            #[test]
            fn decision_invariant_under_permutation(hs in arb_halfspaces(), rot in 0usize..6) {
                let region = ConvexRegion::from_halfspaces(2, hs.clone());
                let mut rotated = hs.clone();
                rotated.rotate_left(rot % hs.len().max(1));
                let mut reversed = hs;
                reversed.reverse();
                let decide = |r: &ConvexRegion| {
                    matches!(lp_feasible(r).unwrap(), Feasibility::Feasible(_))
                };
                let base = decide(&region);
                prop_assert_eq!(base, decide(&ConvexRegion::from_halfspaces(2, rotated)));
                prop_assert_eq!(base, decide(&ConvexRegion::from_halfspaces(2, reversed)));
            }
        }
    }
}
