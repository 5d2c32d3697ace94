//! Boundary-value solvers: variational minimization of the discretized
//! energy and shooting in the log-tangent coordinate.

mod minimize;
mod shoot;
mod suspension;

pub use minimize::{minimize_join, minimize_join_beta0_constrained};
pub use shoot::shoot_join;
pub use suspension::solve_suspension;

use crate::functional::{evaluate_j, EnergyBreakdown, JoinProblem};
use crate::grid::{Domain, Grid, Scheme, DEFAULT_S_MAX};
use crate::ode::BoundaryReport;
use crate::profile::Profile;
use crate::Result;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Minimize,
    Shoot,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeedProfile {
    LeviCivita,
    Constant01,
    Constant10,
    Custom,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub scheme: Scheme,
    pub nodes: usize,
    pub s_max: f64,
}

impl GridSpec {
    pub fn build(&self, domain: Domain) -> Result<Grid> {
        match self.scheme {
            Scheme::UniformT => Grid::uniform_t(domain, self.nodes),
            Scheme::UniformS => Grid::uniform_s(domain, self.nodes, self.s_max),
            Scheme::ChebyshevT => Grid::chebyshev_t(domain, self.nodes),
        }
    }
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            scheme: Scheme::UniformS,
            nodes: 2048,
            s_max: DEFAULT_S_MAX,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolveOptions {
    pub method: Method,
    pub grid: GridSpec,
    pub max_iterations: usize,
    pub gradient_tolerance: f64,
    pub residual_tolerance: f64,
    /// Search range for shooting parameters (suspension nodal search).
    pub shooting_box: (f64, f64),
    pub seed_profile: SeedProfile,
    /// Amplitude of the deterministic seed perturbation (0 = exact seed).
    pub seed_perturbation: f64,
    pub rng_seed: u64,
}

impl SolveOptions {
    pub fn minimize() -> Self {
        SolveOptions {
            method: Method::Minimize,
            grid: GridSpec::default(),
            max_iterations: 20_000,
            gradient_tolerance: 1e-10,
            residual_tolerance: 1e-6,
            shooting_box: (1e-4, 16.0),
            seed_profile: SeedProfile::LeviCivita,
            seed_perturbation: 0.0,
            rng_seed: 42,
        }
    }

    /// Shooting profiles satisfy the ODE to integrator accuracy; the grid
    /// residual they are checked against carries the O(h^2) scheme error,
    /// hence the looser default.
    pub fn shoot() -> Self {
        SolveOptions {
            method: Method::Shoot,
            residual_tolerance: 1e-4,
            ..SolveOptions::minimize()
        }
    }

    /// Nodal suspension branches oscillate, which raises the O(h^2) grid
    /// residual floor by the larger fourth derivative.
    pub fn suspension() -> Self {
        SolveOptions {
            residual_tolerance: 1e-3,
            ..SolveOptions::shoot()
        }
    }
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions::minimize()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Classification {
    NonconstantJoin,
    Constant01,
    Constant10,
    Constant00,
    SuspensionNodal(u32),
}

impl std::fmt::Display for Classification {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Classification::NonconstantJoin => write!(f, "nonconstant-join"),
            Classification::Constant01 => write!(f, "constant-(0,1)"),
            Classification::Constant10 => write!(f, "constant-(1,0)"),
            Classification::Constant00 => write!(f, "constant-(0,0)"),
            Classification::SuspensionNodal(k) => write!(f, "suspension-nodal-{k}"),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MethodDetails {
    Minimize {
        gd_iterations: usize,
        newton_iterations: usize,
        final_gradient_sup: f64,
        beta_zero_pinned: bool,
    },
    Shoot {
        newton_iterations: usize,
        mismatch: f64,
        /// (a-, b-, a+, b+): decaying-mode amplitudes at the two ends.
        parameters: [f64; 4],
        s_max: f64,
    },
    SuspensionShoot {
        bisections: usize,
        shooting_parameter: f64,
        alpha_prime_zero: f64,
        boundary_residual: f64,
        s_max: f64,
    },
}

/// Number of nodes at each end excluded from the residual sup-norm.
pub const RESIDUAL_BUFFER: usize = 5;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolveReport {
    pub converged: bool,
    pub j_value: f64,
    /// Sup-norm of the Euler-Lagrange residual over interior nodes, away
    /// from the declared endpoint buffer. Minimization measures the
    /// discrete-system residual, shooting the grid-derivative residual.
    pub el_residual_sup: f64,
    pub residual_buffer: usize,
    pub residual_tolerance: f64,
    pub boundary: Option<BoundaryReport>,
    pub iterations: usize,
    pub classification: Classification,
    pub details: MethodDetails,
    /// Interior value ranges (min, max) of the two components.
    pub range_alpha: (f64, f64),
    pub range_beta: (f64, f64),
    pub messages: Vec<String>,
}

/// Values of `J` at the three constant solutions with values in `[0, 1]`,
/// and the comparisons showing `(0, 0)` is never the minimizer.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConstantSolutions {
    pub j_00: EnergyBreakdown,
    pub j_01: EnergyBreakdown,
    pub j_10: EnergyBreakdown,
    /// `J(0,0) > J(0,1)`, when both are finite.
    pub zero_above_01: Option<bool>,
    /// `J(0,0) > J(1,0)`, when both are finite.
    pub zero_above_10: Option<bool>,
    /// All three energies vanish when both curvature eigenvalues are zero.
    pub degenerate: bool,
}

/// Energies of the constant solutions `(0,0)`, `(0,1)`, `(1,0)` on the
/// given grid, with infinity flags where a tail diverges.
pub fn classify_constant_solutions(p: &JoinProblem, grid: &Grid) -> ConstantSolutions {
    let j = |a: f64, b: f64| evaluate_j(p, &Profile::constant(grid.clone(), a, b));
    let j_00 = j(0.0, 0.0);
    let j_01 = j(0.0, 1.0);
    let j_10 = j(1.0, 0.0);
    let cmp = |x: &EnergyBreakdown, y: &EnergyBreakdown| {
        if y.is_finite() {
            Some(x.total() > y.total())
        } else {
            None
        }
    };
    ConstantSolutions {
        zero_above_01: cmp(&j_00, &j_01),
        zero_above_10: cmp(&j_00, &j_10),
        degenerate: p.mu1 == 0.0 && p.mu2 == 0.0,
        j_00,
        j_01,
        j_10,
    }
}

/// Distinguish a converged iterate that collapsed onto one of the constant
/// solutions from a genuine nonconstant join profile.
pub(crate) fn classify_profile(f: &Profile) -> Classification {
    let close = |vals: &[f64], c: f64| vals.iter().all(|v| (v - c).abs() < 1e-3);
    if close(&f.alpha, 0.0) && close(&f.beta, 1.0) {
        Classification::Constant01
    } else if close(&f.alpha, 1.0) && close(&f.beta, 0.0) {
        Classification::Constant10
    } else if close(&f.alpha, 0.0) && close(&f.beta, 0.0) {
        Classification::Constant00
    } else {
        Classification::NonconstantJoin
    }
}

pub(crate) fn value_range(vals: &[f64]) -> (f64, f64) {
    vals.iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigenmaps::Eigenmap;

    fn id_join(m1: u32, m2: u32) -> JoinProblem {
        JoinProblem::new(Eigenmap::identity(m1).unwrap(), Eigenmap::identity(m2).unwrap()).unwrap()
    }

    #[test]
    fn constant_solutions_id4() {
        let p = id_join(4, 4);
        let g = Grid::uniform_s(Domain::Join, 2048, 12.0).unwrap();
        let c = classify_constant_solutions(&p, &g);
        let expect = 9.0 * std::f64::consts::PI / 4.0;
        assert!((c.j_01.total() - expect).abs() / expect < 1e-7);
        assert!((c.j_10.total() - expect).abs() / expect < 1e-7);
        // J(0,0) = 2 * 9 pi / 4, strictly above both
        assert!((c.j_00.total() - 2.0 * expect).abs() / expect < 1e-7);
        assert_eq!(c.zero_above_01, Some(true));
        assert_eq!(c.zero_above_10, Some(true));
        assert!(!c.degenerate);
    }

    #[test]
    fn constant_solutions_infinite_for_m1_3() {
        let p = id_join(3, 4);
        let g = Grid::uniform_s(Domain::Join, 256, 12.0).unwrap();
        let c = classify_constant_solutions(&p, &g);
        assert!(!c.j_01.is_finite()); // cos^{m1-4} tail diverges
        assert_eq!(c.zero_above_01, None);
        assert!(c.j_10.is_finite());
    }

    #[test]
    fn degenerate_zero_mu_flagged() {
        let c2 = Eigenmap::circle_power(2).unwrap();
        let custom = Eigenmap::custom(
            4,
            crate::exact::Scalar::from_int(4),
            crate::exact::Scalar::from_int(0),
        )
        .unwrap();
        let p = JoinProblem::new(custom, c2).unwrap();
        let g = Grid::uniform_s(Domain::Join, 256, 12.0).unwrap();
        let c = classify_constant_solutions(&p, &g);
        assert!(c.degenerate);
        assert!(c.j_00.total().abs() < 1e-12);
    }
}
