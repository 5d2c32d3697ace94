//! Exact rational scalars with a floating-point escape hatch.
//!
//! Catalog eigenmaps carry eigenvalues like `mu = (m-1)/m * lambda` that are
//! non-terminating in binary, and the damping conditions compare strict
//! inequalities that catalog parameters can hit exactly. Eigenvalues are
//! therefore kept as exact rationals and only converted to `f64` at solver
//! boundaries. User-supplied custom eigenmaps may carry plain floats; those
//! are compared with a declared tolerance band instead.

use num_rational::Ratio;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

pub type Rational = Ratio<i128>;

/// Comparison band for inexact scalars. Strict inequalities evaluated in
/// floating point treat differences inside this band as "not satisfied".
pub const FLOAT_BAND: f64 = 1e-12;

/// An eigenvalue-like quantity: exact when it comes from the catalog,
/// approximate when user-supplied.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Scalar {
    Exact { num: i128, den: i128 },
    Approx(f64),
}

impl Scalar {
    pub fn from_int(v: i128) -> Self {
        Scalar::Exact { num: v, den: 1 }
    }

    pub fn from_ratio(r: Rational) -> Self {
        Scalar::Exact {
            num: *r.numer(),
            den: *r.denom(),
        }
    }

    pub fn ratio(num: i128, den: i128) -> Self {
        Self::from_ratio(Rational::new(num, den))
    }

    pub fn as_rational(&self) -> Option<Rational> {
        match *self {
            Scalar::Exact { num, den } => Some(Rational::new(num, den)),
            Scalar::Approx(_) => None,
        }
    }

    pub fn as_f64(&self) -> f64 {
        match *self {
            Scalar::Exact { num, den } => Rational::new(num, den).to_f64().unwrap_or(f64::NAN),
            Scalar::Approx(v) => v,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Scalar::Exact { .. })
    }

    pub fn mul(&self, other: &Scalar) -> Scalar {
        match (self.as_rational(), other.as_rational()) {
            (Some(a), Some(b)) => Scalar::from_ratio(a * b),
            _ => Scalar::Approx(self.as_f64() * other.as_f64()),
        }
    }

    pub fn add(&self, other: &Scalar) -> Scalar {
        match (self.as_rational(), other.as_rational()) {
            (Some(a), Some(b)) => Scalar::from_ratio(a + b),
            _ => Scalar::Approx(self.as_f64() + other.as_f64()),
        }
    }

    pub fn sub(&self, other: &Scalar) -> Scalar {
        match (self.as_rational(), other.as_rational()) {
            (Some(a), Some(b)) => Scalar::from_ratio(a - b),
            _ => Scalar::Approx(self.as_f64() - other.as_f64()),
        }
    }

    pub fn scale_int(&self, k: i128) -> Scalar {
        self.mul(&Scalar::from_int(k))
    }

    pub fn is_nonnegative(&self) -> bool {
        match self.as_rational() {
            Some(r) => !r.is_negative(),
            None => self.as_f64() >= 0.0,
        }
    }

    /// Numerator/denominator of the exact value, or of the dyadic rational
    /// equal to the stored float (every finite f64 is rational; extreme
    /// exponents fall back to a 15-digit decimal approximation).
    pub fn to_num_den(&self) -> (i128, i128) {
        match *self {
            Scalar::Exact { num, den } => (num, den),
            Scalar::Approx(v) => f64_to_num_den(v),
        }
    }
}

fn f64_to_num_den(v: f64) -> (i128, i128) {
    if !v.is_finite() {
        return (0, 1);
    }
    if v == 0.0 {
        return (0, 1);
    }
    let bits = v.to_bits();
    let sign: i128 = if bits >> 63 == 1 { -1 } else { 1 };
    let biased = ((bits >> 52) & 0x7ff) as i64;
    let frac = (bits & 0xf_ffff_ffff_ffff) as i128;
    let (mut mant, mut e) = if biased == 0 {
        (frac, -1074i64)
    } else {
        (frac | (1i128 << 52), biased - 1075)
    };
    while mant != 0 && mant & 1 == 0 {
        mant >>= 1;
        e += 1;
    }
    if e >= 0 {
        if e <= 70 {
            return (sign * (mant << e), 1);
        }
    } else if -e <= 70 {
        return (sign * mant, 1i128 << (-e));
    }
    // exponent out of comfortable range: decimal approximation
    let scaled = (v * 1e15).round();
    if scaled.abs() < 1e30 {
        let r = Rational::new(scaled as i128, 1_000_000_000_000_000);
        (*r.numer(), *r.denom())
    } else {
        (v as i128, 1)
    }
}

/// Strict `a < b` in exact arithmetic when both sides are exact, otherwise
/// in floating point with the declared band (ties inside the band fail).
pub fn strictly_less(a: &Scalar, b: &Scalar) -> bool {
    match (a.as_rational(), b.as_rational()) {
        (Some(ra), Some(rb)) => ra < rb,
        _ => a.as_f64() + FLOAT_BAND < b.as_f64(),
    }
}

/// Strict `sqrt(x) < z` for `x >= 0`. Exact path squares the comparison.
pub fn sqrt_strictly_less(x: &Scalar, z: &Scalar) -> bool {
    match (x.as_rational(), z.as_rational()) {
        (Some(rx), Some(rz)) => {
            debug_assert!(!rx.is_negative());
            if rz <= Rational::zero() {
                false
            } else {
                rx < rz * rz
            }
        }
        _ => x.as_f64().max(0.0).sqrt() + FLOAT_BAND < z.as_f64(),
    }
}

/// Strict `sqrt(x) + sqrt(y) < z` for `x, y >= 0`, squaring twice on the
/// exact path: the inequality holds iff `z > 0`, `u := z^2 - x - y > 0`
/// and `4xy < u^2`.
pub fn sqrt_sum_strictly_less(x: &Scalar, y: &Scalar, z: &Scalar) -> bool {
    match (x.as_rational(), y.as_rational(), z.as_rational()) {
        (Some(rx), Some(ry), Some(rz)) => {
            debug_assert!(!rx.is_negative() && !ry.is_negative());
            if rz <= Rational::zero() {
                return false;
            }
            let u = rz * rz - rx - ry;
            if u <= Rational::zero() {
                return false;
            }
            Rational::from_integer(4) * rx * ry < u * u
        }
        _ => {
            x.as_f64().max(0.0).sqrt() + y.as_f64().max(0.0).sqrt() + FLOAT_BAND < z.as_f64()
        }
    }
}
