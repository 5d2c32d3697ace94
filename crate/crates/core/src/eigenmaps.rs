//! Catalog of Yang-Mills eigenmaps.
//!
//! An eigenmap `h: S^m -> S^n` carries two constants: the energy density
//! `lambda = |dh|^2` and the curvature eigenvalue `mu`, with
//! `|F(h* d_LC)|^2 == 2 lambda mu` pointwise. Three families are built in:
//!
//! * identities `id_m` with `lambda = m`, `mu = m - 1`;
//! * circle powers `z -> z^ell` with `lambda = ell^2`, `mu = 0`;
//! * standard immersions `h_{m,ell}` by degree-`ell` harmonic polynomials,
//!   with `lambda = ell(ell + m - 1)`, `mu = (m-1)/m * lambda` and target
//!   dimension `n = (2 ell + m - 1)(ell + m - 2)! / (ell! (m-1)!) - 1`.
//!
//! A fourth `Custom` family accepts arbitrary `lambda > 0`, `mu >= 0` so the
//! solvers can explore hypothetical building blocks; it is excluded from the
//! exact-relation invariants.

use crate::exact::{Rational, Scalar};
use crate::{Error, Result};
use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};

/// Largest supported `m` and `ell`; factorials stay exact (big integers)
/// inside this range and `n` is range-checked on conversion.
pub const MAX_DIMENSION_PARAM: u32 = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Identity,
    CirclePower,
    StandardImmersion,
    Custom,
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Family::Identity => "identity",
            Family::CirclePower => "circle",
            Family::StandardImmersion => "standard",
            Family::Custom => "custom",
        };
        f.write_str(s)
    }
}

/// A Yang-Mills eigenmap `S^m -> S^n` together with its `(lambda, mu)` data.
///
/// `n = 0` and `ell = 0` mean "not applicable" (only for `Custom`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Eigenmap {
    pub family: Family,
    pub m: u32,
    pub n: u64,
    pub ell: u32,
    pub lambda: Scalar,
    pub mu: Scalar,
}

impl Eigenmap {
    /// `id_m : S^m -> S^m` with `lambda = m`, `mu = m - 1`.
    pub fn identity(m: u32) -> Result<Self> {
        if m == 0 {
            return Err(Error::Eigenmap(
                "identity eigenmap needs m >= 1 (for the m2 = 0 endpoint use a suspension problem)"
                    .into(),
            ));
        }
        check_range(m, 1)?;
        Ok(Eigenmap {
            family: Family::Identity,
            m,
            n: m as u64,
            ell: 1,
            lambda: Scalar::from_int(m as i128),
            mu: Scalar::from_int(m as i128 - 1),
        })
    }

    /// `z -> z^ell : S^1 -> S^1` with `lambda = ell^2`, `mu = 0`.
    /// Stores `|ell|`; solutions depend only on `ell^2`.
    pub fn circle_power(ell: i32) -> Result<Self> {
        if ell == 0 {
            return Err(Error::Eigenmap("circle power needs ell != 0".into()));
        }
        let k = ell.unsigned_abs();
        check_range(1, k)?;
        Ok(Eigenmap {
            family: Family::CirclePower,
            m: 1,
            n: 1,
            ell: k,
            lambda: Scalar::from_int((k as i128) * (k as i128)),
            mu: Scalar::from_int(0),
        })
    }

    /// Standard immersion `h_{m,ell}` by degree-`ell` harmonic polynomials
    /// on `R^{m+1}`, for `m >= 2`, `ell >= 1`.
    pub fn standard_immersion(m: u32, ell: u32) -> Result<Self> {
        if m < 2 {
            return Err(Error::Eigenmap("standard immersion needs m >= 2".into()));
        }
        if ell == 0 {
            return Err(Error::Eigenmap("standard immersion needs ell >= 1".into()));
        }
        check_range(m, ell)?;
        let n = standard_immersion_target_dim(m, ell)?;
        let lambda = Rational::from_integer(ell as i128 * (ell as i128 + m as i128 - 1));
        let mu = Rational::new(m as i128 - 1, m as i128) * lambda;
        Ok(Eigenmap {
            family: Family::StandardImmersion,
            m,
            n,
            ell,
            lambda: Scalar::from_ratio(lambda),
            mu: Scalar::from_ratio(mu),
        })
    }

    /// A hypothetical eigenmap with user-supplied data; `lambda > 0`, `mu >= 0`.
    pub fn custom(m: u32, lambda: Scalar, mu: Scalar) -> Result<Self> {
        if m == 0 {
            return Err(Error::Eigenmap("custom eigenmap needs m >= 1".into()));
        }
        if !(lambda.as_f64() > 0.0) {
            return Err(Error::Eigenmap("custom eigenmap needs lambda > 0".into()));
        }
        if !(mu.as_f64() >= 0.0) {
            return Err(Error::Eigenmap("custom eigenmap needs mu >= 0".into()));
        }
        Ok(Eigenmap {
            family: Family::Custom,
            m,
            n: 0,
            ell: 0,
            lambda,
            mu,
        })
    }

    /// The constant value of `|F(h* d_LC)|^2`, equal to `2 lambda mu`.
    pub fn curvature_norm_constant(&self) -> Scalar {
        Scalar::from_int(2).mul(&self.lambda.mul(&self.mu))
    }

    pub fn lambda_f64(&self) -> f64 {
        self.lambda.as_f64()
    }

    pub fn mu_f64(&self) -> f64 {
        self.mu.as_f64()
    }

    /// Compact `family:m[:ell]` spec string, the CLI grammar.
    pub fn spec_string(&self) -> String {
        match self.family {
            Family::Identity => format!("id:{}", self.m),
            Family::CirclePower => format!("circle:{}", self.ell),
            Family::StandardImmersion => format!("standard:{}:{}", self.m, self.ell),
            Family::Custom => {
                format!("custom:{}:{}:{}", self.m, self.lambda.as_f64(), self.mu.as_f64())
            }
        }
    }
}

fn check_range(m: u32, ell: u32) -> Result<()> {
    if m > MAX_DIMENSION_PARAM || ell > MAX_DIMENSION_PARAM {
        return Err(Error::Eigenmap(format!(
            "(m, ell) = ({m}, {ell}) outside the supported range (both <= {MAX_DIMENSION_PARAM})"
        )));
    }
    Ok(())
}

fn factorial(k: u32) -> BigUint {
    let mut acc = BigUint::one();
    for i in 2..=k as u64 {
        acc *= i;
    }
    acc
}

/// `n = (2 ell + m - 1)(ell + m - 2)! / (ell! (m-1)!) - 1`, computed with
/// exact big-integer factorials; the division is exact.
fn standard_immersion_target_dim(m: u32, ell: u32) -> Result<u64> {
    let num = BigUint::from(2 * ell as u64 + m as u64 - 1) * factorial(ell + m - 2);
    let den = factorial(ell) * factorial(m - 1);
    debug_assert!((&num % &den) == BigUint::ZERO);
    let dim = num / den - BigUint::one();
    dim.to_u64().ok_or(Error::DimensionOverflow { m, ell })
}

/// One bounded catalog row set: identities, circle powers and small
/// standard immersions. Used by the CLI `catalog` command.
pub fn bounded_catalog() -> Vec<Eigenmap> {
    let mut rows = Vec::new();
    for m in 1..=8 {
        rows.push(Eigenmap::identity(m).expect("in range"));
    }
    for ell in 1..=4 {
        rows.push(Eigenmap::circle_power(ell).expect("in range"));
    }
    for m in 2..=5 {
        for ell in 2..=4 {
            rows.push(Eigenmap::standard_immersion(m, ell).expect("in range"));
        }
    }
    rows
}

/// JSON catalog record with exact numerator/denominator fields.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CatalogRecord {
    pub family: Family,
    pub m: u32,
    pub n: u64,
    pub ell: u32,
    pub lambda_num: i128,
    pub lambda_den: i128,
    pub mu_num: i128,
    pub mu_den: i128,
}

impl From<&Eigenmap> for CatalogRecord {
    fn from(e: &Eigenmap) -> Self {
        let (ln, ld) = e.lambda.to_num_den();
        let (mn, md) = e.mu.to_num_den();
        CatalogRecord {
            family: e.family,
            m: e.m,
            n: e.n,
            ell: e.ell,
            lambda_num: ln,
            lambda_den: ld,
            mu_num: mn,
            mu_den: md,
        }
    }
}
