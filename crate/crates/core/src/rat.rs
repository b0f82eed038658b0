//! Exact rational scalars used by the curve calculus.
//!
//! All analytic DMT results in this crate are piecewise-linear functions with
//! rational breakpoints, so the calculus is done exactly and floats only
//! appear at the export/simulation boundary.

use num_rational::Ratio;
use num_traits::{Signed, ToPrimitive};

/// Exact rational scalar.
pub type Rat = Ratio<i128>;

/// `n/d` as a rational. Panics on `d == 0`.
pub fn rat(n: i64, d: i64) -> Rat {
    Ratio::new(n as i128, d as i128)
}

/// Integer as a rational.
pub fn rint(n: i64) -> Rat {
    Ratio::from_integer(n as i128)
}

/// Largest denominator used when converting floats to rationals.
///
/// Dyadic values with up to 40 fractional bits convert exactly; anything
/// else is rounded to the nearest multiple of 2^-40 (error < 1e-12, below
/// the 1e-9 float comparison tolerance used for curve equality).
const F64_DENOM_BITS: u32 = 40;

/// Convert a finite float to a rational, exactly when dyadic with at most
/// 40 fractional bits, otherwise rounded to the nearest multiple of 2^-40.
pub fn rat_from_f64(x: f64) -> Rat {
    assert!(x.is_finite(), "cannot convert non-finite float to rational");
    let denom: i128 = 1 << F64_DENOM_BITS;
    let scaled = x * denom as f64;
    assert!(
        scaled.abs() < (i128::MAX >> 2) as f64,
        "float too large for rational conversion: {x}"
    );
    Ratio::new(scaled.round() as i128, denom)
}

/// Rational to float (rounds once).
pub fn rat_to_f64(r: Rat) -> f64 {
    r.to_f64()
        .unwrap_or_else(|| r.numer().to_f64().unwrap() / r.denom().to_f64().unwrap())
}

/// True when `|a - b| <= tol` in floating point.
pub fn rat_close(a: Rat, b: Rat, tol: f64) -> bool {
    (a - b).abs() <= rat_from_f64(tol)
}
