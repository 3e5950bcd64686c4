//! Normalized subgradient descent with diminishing steps.
//!
//! Shared by ball feasibility search and the quadratic-penalty learner.
//! The loop is fully deterministic and stays in exact rationals: the step
//! direction is the subgradient scaled by a rational upper bound on its
//! norm (so steps never overshoot the nominal length), the schedule is
//! `eta / ((1 + damping) * sqrt(k))`, and every iterate is snapped to the
//! `2^-32` grid so coordinate sizes stay bounded over thousands of steps.
//! Snapping perturbs the search path only; any claim made about the
//! result is re-established by exact evaluation at the returned point.

use num_traits::{One, Signed};

use crate::rat::{sqrt_upper, Rat, RatVec};

const GRID_BITS: u32 = 32;

pub struct DescentOutcome {
    pub point: RatVec,
    pub value: Rat,
}

/// Minimizes `objective` from `start`, keeping the best iterate seen.
///
/// `objective` returns the exact value and one subgradient at a point.
/// When `stop_at_nonpositive` is set the loop exits as soon as the best
/// value reaches zero or below (used for feasibility searches, where a
/// nonpositive value is already a certificate).
pub fn minimize(
    start: &RatVec,
    eta: &Rat,
    damping: &Rat,
    iters: u32,
    stop_at_nonpositive: bool,
    objective: impl Fn(&RatVec) -> (Rat, RatVec),
) -> DescentOutcome {
    let mut current = start.round_to_grid(GRID_BITS);
    let (mut best_value, mut best_point) = {
        let (v, _) = objective(&current);
        (v, current.clone())
    };
    let scale = Rat::one() + damping;
    for k in 1..=iters {
        if stop_at_nonpositive && !best_value.is_positive() {
            break;
        }
        let (value, grad) = objective(&current);
        if value < best_value {
            best_value = value;
            best_point = current.clone();
        }
        if grad.is_zero() {
            break;
        }
        let norm_up = sqrt_upper(&grad.norm_sq(), GRID_BITS);
        let step = eta / (&scale * sqrt_upper(&crate::rat::rat_int(i64::from(k)), GRID_BITS));
        let delta = grad.scale(&(step / norm_up));
        current = current.sub(&delta).round_to_grid(GRID_BITS);
    }
    let (final_value, _) = objective(&current);
    if final_value < best_value {
        best_value = final_value;
        best_point = current;
    }
    DescentOutcome {
        point: best_point,
        value: best_value,
    }
}
