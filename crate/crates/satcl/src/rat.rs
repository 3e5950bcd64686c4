//! Exact rational scalars and rational vectors.
//!
//! `Rat` is an arbitrary-precision rational kept in lowest terms with a
//! positive denominator; all comparisons and arithmetic are exact. The
//! helpers here add what the geometry layer needs on top: grid rounding
//! (to keep iterate sizes bounded in descent loops) and a rational upper
//! bound on square roots (to keep norm bounds exact but tight).

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::fmt;

use crate::error::{Error, Result};

pub type Rat = BigRational;

/// `n/d` as an exact rational. Panics if `d == 0`.
pub fn rat(n: i64, d: i64) -> Rat {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rat {
    BigRational::from_integer(BigInt::from(n))
}

/// `1 / 2^bits`.
pub fn pow2_inv(bits: u32) -> Rat {
    BigRational::new(BigInt::one(), BigInt::one() << bits)
}

/// Parses `"p/q"` or `"p"`. Decimal notation is rejected on purpose: the
/// file formats carry rationals, never floats.
pub fn parse_rat(s: &str) -> Result<Rat> {
    s.trim()
        .parse::<BigRational>()
        .map_err(|e| Error::Parse(format!("bad rational {s:?}: {e}")))
}

/// `"p/q"` (or `"p"` for integers); round-trips through [`parse_rat`].
pub fn format_rat(r: &Rat) -> String {
    r.to_string()
}

/// Smallest multiple of `2^-bits` that is `>= r`.
pub fn round_up_grid(r: &Rat, bits: u32) -> Rat {
    let scale = BigInt::one() << bits;
    let num = r.numer() * &scale;
    BigRational::new(num.div_ceil(r.denom()), scale)
}

/// Nearest multiple of `2^-bits` to `r` (half-up).
pub fn round_nearest_grid(r: &Rat, bits: u32) -> Rat {
    let scale = BigInt::one() << bits;
    let two_num = r.numer() * &scale * BigInt::from(2);
    let two_den = r.denom() * BigInt::from(2);
    BigRational::new((two_num + r.denom()).div_floor(&two_den), scale)
}

/// A rational upper bound on `sqrt(s)`, tight to roughly `2^-bits`.
///
/// Newton iteration from the AM-GM upper bound `(1+s)/2`, rounding every
/// iterate up to the `2^-bits` grid. Upward rounding preserves the upper
/// bound and caps numerator/denominator growth; the iteration is monotone
/// decreasing on the grid, so it terminates at a grid fixpoint.
pub fn sqrt_upper(s: &Rat, bits: u32) -> Rat {
    if s.is_zero() || s.is_negative() {
        return Rat::zero();
    }
    let mut x = round_up_grid(&((Rat::one() + s) / rat_int(2)), bits);
    loop {
        let next = round_up_grid(&((&x + s / &x) / rat_int(2)), bits);
        if next >= x {
            return x;
        }
        x = next;
    }
}

/// A point of parameter space (or a task atom coordinate block): a fixed
/// number of exact rational coordinates.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RatVec(Vec<Rat>);

impl RatVec {
    pub fn new(coords: Vec<Rat>) -> Self {
        RatVec(coords)
    }

    pub fn zeros(dim: usize) -> Self {
        RatVec(vec![Rat::zero(); dim])
    }

    pub fn from_i64(coords: &[i64]) -> Self {
        RatVec(coords.iter().map(|&c| rat_int(c)).collect())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[Rat] {
        &self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Rat> {
        self.0.iter()
    }

    pub fn dot(&self, other: &RatVec) -> Rat {
        debug_assert_eq!(self.dim(), other.dim());
        self.0
            .iter()
            .zip(other.0.iter())
            .fold(Rat::zero(), |acc, (a, b)| acc + a * b)
    }

    pub fn add(&self, other: &RatVec) -> RatVec {
        RatVec(
            self.0
                .iter()
                .zip(other.0.iter())
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    pub fn sub(&self, other: &RatVec) -> RatVec {
        RatVec(
            self.0
                .iter()
                .zip(other.0.iter())
                .map(|(a, b)| a - b)
                .collect(),
        )
    }

    pub fn scale(&self, s: &Rat) -> RatVec {
        RatVec(self.0.iter().map(|a| a * s).collect())
    }

    pub fn neg(&self) -> RatVec {
        RatVec(self.0.iter().map(|a| -a).collect())
    }

    pub fn norm_sq(&self) -> Rat {
        self.dot(self)
    }

    pub fn dist_sq(&self, other: &RatVec) -> Rat {
        self.sub(other).norm_sq()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|c| c.is_zero())
    }

    /// Every coordinate snapped to the nearest multiple of `2^-bits`.
    pub fn round_to_grid(&self, bits: u32) -> RatVec {
        RatVec(self.0.iter().map(|c| round_nearest_grid(c, bits)).collect())
    }
}

impl std::ops::Index<usize> for RatVec {
    type Output = Rat;
    fn index(&self, i: usize) -> &Rat {
        &self.0[i]
    }
}

/// Semicolon-joined coordinates, e.g. `1/2;-3;7/4`. This is the CSV cell
/// encoding for points.
impl fmt::Display for RatVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(format_rat).collect();
        write!(f, "{}", parts.join(";"))
    }
}

impl fmt::Debug for RatVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RatVec({self})")
    }
}

pub fn parse_ratvec(s: &str) -> Result<RatVec> {
    let coords: Result<Vec<Rat>> = s.split(';').map(parse_rat).collect();
    Ok(RatVec::new(coords?))
}
