//! Discretized profiles `(alpha, beta)` on a join grid, or a single `alpha`
//! on a suspension grid, with boundary metadata recording the intended
//! endpoint limits.

use crate::grid::{Domain, Grid};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// A pair of profile functions on `(0, pi/2)`. The boundary fields are the
/// intended limits at `t = 0` and `t = pi/2`; for join solutions these are
/// `alpha: (0, 1)`, `beta: (1, 0)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Profile {
    pub grid: Grid,
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    pub boundary_alpha: (f64, f64),
    pub boundary_beta: (f64, f64),
}

impl Profile {
    pub fn new(
        grid: Grid,
        alpha: Vec<f64>,
        beta: Vec<f64>,
        boundary_alpha: (f64, f64),
        boundary_beta: (f64, f64),
    ) -> Result<Self> {
        if grid.domain != Domain::Join {
            return Err(Error::Profile("join profile needs a join-domain grid".into()));
        }
        if alpha.len() != grid.len() || beta.len() != grid.len() {
            return Err(Error::Profile("profile length does not match grid".into()));
        }
        if alpha.iter().chain(beta.iter()).any(|v| !v.is_finite()) {
            return Err(Error::Profile("profile values must be finite".into()));
        }
        Ok(Profile {
            grid,
            alpha,
            beta,
            boundary_alpha,
            boundary_beta,
        })
    }

    /// The exact solution of the identity join: `(alpha, beta) = (sin, cos)`.
    pub fn levi_civita(grid: Grid) -> Self {
        let alpha = (0..grid.len()).map(|i| grid.sin(i)).collect();
        let beta = (0..grid.len()).map(|i| grid.cos(i)).collect();
        Profile {
            grid,
            alpha,
            beta,
            boundary_alpha: (0.0, 1.0),
            boundary_beta: (1.0, 0.0),
        }
    }

    /// Constant profile; boundary metadata records the constants themselves.
    pub fn constant(grid: Grid, a: f64, b: f64) -> Self {
        let n = grid.len();
        Profile {
            grid,
            alpha: vec![a; n],
            beta: vec![b; n],
            boundary_alpha: (a, a),
            boundary_beta: (b, b),
        }
    }

    pub fn from_fns(grid: Grid, fa: impl Fn(f64) -> f64, fb: impl Fn(f64) -> f64) -> Self {
        let alpha = grid.nodes().iter().map(|&t| fa(t)).collect();
        let beta = grid.nodes().iter().map(|&t| fb(t)).collect();
        Profile {
            grid,
            alpha,
            beta,
            boundary_alpha: (0.0, 1.0),
            boundary_beta: (1.0, 0.0),
        }
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    /// Grid-scheme derivatives of both components with respect to `t`.
    pub fn derivatives(&self) -> ProfileDerivatives {
        let (da, dda) = self.grid.derivatives_t(&self.alpha);
        let (db, ddb) = self.grid.derivatives_t(&self.beta);
        ProfileDerivatives {
            alpha_p: da,
            alpha_pp: dda,
            beta_p: db,
            beta_pp: ddb,
        }
    }

    /// CSV rows `t,alpha,beta` with 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,alpha,beta\n");
        for i in 0..self.len() {
            out.push_str(&format!(
                "{:.17e},{:.17e},{:.17e}\n",
                self.grid.nodes()[i],
                self.alpha[i],
                self.beta[i]
            ));
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct ProfileDerivatives {
    pub alpha_p: Vec<f64>,
    pub alpha_pp: Vec<f64>,
    pub beta_p: Vec<f64>,
    pub beta_pp: Vec<f64>,
}

/// A single profile on `(-pi/2, pi/2)` with intended limits `(-1, 1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuspensionProfile {
    pub grid: Grid,
    pub alpha: Vec<f64>,
    pub boundary: (f64, f64),
}

impl SuspensionProfile {
    pub fn new(grid: Grid, alpha: Vec<f64>, boundary: (f64, f64)) -> Result<Self> {
        if grid.domain != Domain::Suspension {
            return Err(Error::Profile(
                "suspension profile needs a suspension-domain grid".into(),
            ));
        }
        if alpha.len() != grid.len() {
            return Err(Error::Profile("profile length does not match grid".into()));
        }
        if alpha.iter().any(|v| !v.is_finite()) {
            return Err(Error::Profile("profile values must be finite".into()));
        }
        Ok(SuspensionProfile {
            grid,
            alpha,
            boundary,
        })
    }

    /// The exact identity-suspension solution `alpha = sin`.
    pub fn sine(grid: Grid) -> Self {
        let alpha = (0..grid.len()).map(|i| grid.sin(i)).collect();
        SuspensionProfile {
            grid,
            alpha,
            boundary: (-1.0, 1.0),
        }
    }

    pub fn constant(grid: Grid, a: f64) -> Self {
        let n = grid.len();
        SuspensionProfile {
            grid,
            alpha: vec![a; n],
            boundary: (a, a),
        }
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    pub fn derivatives(&self) -> (Vec<f64>, Vec<f64>) {
        self.grid.derivatives_t(&self.alpha)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,alpha\n");
        for i in 0..self.len() {
            out.push_str(&format!(
                "{:.17e},{:.17e}\n",
                self.grid.nodes()[i],
                self.alpha[i]
            ));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Scheme;

    #[test]
    fn levi_civita_matches_trig() {
        let g = Grid::uniform_s(Domain::Join, 64, 10.0).unwrap();
        let p = Profile::levi_civita(g);
        for (i, &t) in p.grid.nodes().iter().enumerate() {
            assert!((p.alpha[i] - t.sin()).abs() < 1e-12);
            assert!((p.beta[i] - t.cos()).abs() < 1e-12);
        }
    }

    #[test]
    fn profile_grid_mismatch_rejected() {
        let g = Grid::uniform_t(Domain::Join, 32).unwrap();
        assert!(Profile::new(g.clone(), vec![0.0; 31], vec![0.0; 32], (0.0, 1.0), (1.0, 0.0)).is_err());
        let gs = Grid::uniform_t(Domain::Suspension, 32).unwrap();
        assert!(Profile::new(gs, vec![0.0; 32], vec![0.0; 32], (0.0, 1.0), (1.0, 0.0)).is_err());
    }

    #[test]
    fn profile_serde_roundtrip() {
        let g = Grid::uniform_s(Domain::Join, 32, 8.0).unwrap();
        let p = Profile::levi_civita(g);
        let js = serde_json::to_string(&p).unwrap();
        let q: Profile = serde_json::from_str(&js).unwrap();
        assert_eq!(q.grid.scheme, Scheme::UniformS);
        assert_eq!(p.alpha, q.alpha);
        assert_eq!(p.boundary_beta, q.boundary_beta);
    }
}
