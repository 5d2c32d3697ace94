//! Curvature reconstruction from a profile: the pointwise norm `|F|^2`, its
//! five component amplitudes, connection-difference norms against the
//! Levi-Civita reference, and the energy identity with the reduced
//! functional.
//!
//! Pointwise,
//!
//! ```text
//! |F|^2 = 4 l1 a'^2/cos^2 + 4 l2 b'^2/sin^2 + 2 l1 m1 (a^2-1)^2/cos^4
//!         + 2 l2 m2 (b^2-1)^2/sin^4 + 4 l1 l2 a^2 b^2/(cos^2 sin^2),
//! ```
//!
//! exactly twice the integrand of `J` term by term, so the curvature energy
//! `int |F|^2 cos^{m1} sin^{m2} dt` equals `2 J` up to quadrature error.

use crate::functional::{self, EnergyBreakdown, JoinProblem};
use crate::profile::Profile;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_PI_2;

/// `|F|^2` at an interior `t`, derivatives taken from the profile's grid
/// scheme (the node nearest `t` is used for the derivative stencil).
pub fn pointwise_f_norm(p: &JoinProblem, f: &Profile, t: f64) -> Result<f64> {
    let c = components_at(p, f, t)?;
    Ok(c.norm_squared())
}

/// The five signed curvature amplitudes at `t`, with their weights:
/// squared and weighted they sum to `|F|^2`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct CurvatureComponents {
    /// `(alpha^2 - 1)/cos^2`, weight `2 l1 m1` (F_uv sector)
    pub f_uv: f64,
    /// `(beta^2 - 1)/sin^2`, weight `2 l2 m2` (F_wz sector)
    pub f_wz: f64,
    /// `alpha'/cos`, weight `4 l1` (F_xu sector)
    pub f_xu: f64,
    /// `beta'/sin`, weight `4 l2` (F_xw sector)
    pub f_xw: f64,
    /// `alpha beta/(cos sin)`, weight `4 l1 l2` (F_uw sector)
    pub f_uw: f64,
    pub w_uv: f64,
    pub w_wz: f64,
    pub w_xu: f64,
    pub w_xw: f64,
    pub w_uw: f64,
}

impl CurvatureComponents {
    pub fn norm_squared(&self) -> f64 {
        self.w_uv * self.f_uv * self.f_uv
            + self.w_wz * self.f_wz * self.f_wz
            + self.w_xu * self.f_xu * self.f_xu
            + self.w_xw * self.f_xw * self.f_xw
            + self.w_uw * self.f_uw * self.f_uw
    }
}

/// Index of the grid node nearest to `t`.
fn nearest_node(f: &Profile, t: f64) -> usize {
    let nodes = f.grid.nodes();
    match nodes.binary_search_by(|a| a.partial_cmp(&t).unwrap()) {
        Ok(i) => i,
        Err(i) => {
            if i == 0 {
                0
            } else if i >= nodes.len() {
                nodes.len() - 1
            } else if (nodes[i] - t).abs() < (t - nodes[i - 1]).abs() {
                i
            } else {
                i - 1
            }
        }
    }
}

/// Curvature amplitudes at `t`, interior only.
pub fn components_at(p: &JoinProblem, f: &Profile, t: f64) -> Result<CurvatureComponents> {
    if !(t > 0.0 && t < FRAC_PI_2) {
        return Err(Error::Problem(format!("t = {t} is not interior")));
    }
    let i = nearest_node(f, t);
    let d = f.derivatives();
    Ok(components_at_node(p, f, &d.alpha_p, &d.beta_p, i))
}

pub(crate) fn components_at_node(
    p: &JoinProblem,
    f: &Profile,
    alpha_p: &[f64],
    beta_p: &[f64],
    i: usize,
) -> CurvatureComponents {
    let (sin, cos) = (f.grid.sin(i), f.grid.cos(i));
    let (a, b) = (f.alpha[i], f.beta[i]);
    CurvatureComponents {
        f_uv: (a * a - 1.0) / (cos * cos),
        f_wz: (b * b - 1.0) / (sin * sin),
        f_xu: alpha_p[i] / cos,
        f_xw: beta_p[i] / sin,
        f_uw: a * b / (cos * sin),
        w_uv: 2.0 * p.lambda1 * p.mu1,
        w_wz: 2.0 * p.lambda2 * p.mu2,
        w_xu: 4.0 * p.lambda1,
        w_xw: 4.0 * p.lambda2,
        w_uw: 4.0 * p.lambda1 * p.lambda2,
    }
}

/// The Yang-Mills energy computed from the curvature norm,
/// `int |F|^2 cos^{m1} sin^{m2} dt`, with the same quadrature and tail
/// policy as `evaluate_j`. Contract: equals `2 evaluate_j` up to rounding.
pub fn ym_energy_from_f(p: &JoinProblem, f: &Profile) -> EnergyBreakdown {
    functional::evaluate_weighted(p, f, &functional::fnorm_coeffs(p))
}

/// Norms of the connection difference `omega = D - nabla` against the
/// Levi-Civita reference at `t`:
/// `|omega|^2 = 2 l1 (a - sin)^2/cos^2 + 2 l2 (b - cos)^2/sin^2` and
/// `|nabla omega|^2 = 2 l1^2 a^2 (a-sin)^2/cos^4 + 2 l2^2 b^2 (b-cos)^2/sin^4
///  + 2 l1 (a' - cos)^2/cos^2 + 2 l2 (b' + sin)^2/sin^2`.
pub fn omega_norms(p: &JoinProblem, f: &Profile, t: f64) -> Result<(f64, f64)> {
    if !(t > 0.0 && t < FRAC_PI_2) {
        return Err(Error::Problem(format!("t = {t} is not interior")));
    }
    let i = nearest_node(f, t);
    let d = f.derivatives();
    Ok(omega_norms_at_node(p, f, &d.alpha_p, &d.beta_p, i))
}

pub(crate) fn omega_norms_at_node(
    p: &JoinProblem,
    f: &Profile,
    alpha_p: &[f64],
    beta_p: &[f64],
    i: usize,
) -> (f64, f64) {
    let (sin, cos) = (f.grid.sin(i), f.grid.cos(i));
    let (a, b) = (f.alpha[i], f.beta[i]);
    let da = a - sin;
    let db = b - cos;
    let s2 = sin * sin;
    let c2 = cos * cos;
    let omega2 = 2.0 * p.lambda1 * da * da / c2 + 2.0 * p.lambda2 * db * db / s2;
    let dap = alpha_p[i] - cos;
    let dbp = beta_p[i] + sin;
    let grad2 = 2.0 * p.lambda1 * p.lambda1 * a * a * da * da / (c2 * c2)
        + 2.0 * p.lambda2 * p.lambda2 * b * b * db * db / (s2 * s2)
        + 2.0 * p.lambda1 * dap * dap / c2
        + 2.0 * p.lambda2 * dbp * dbp / s2;
    (omega2, grad2)
}

/// Numerical coercivity audit: the quadrature value of
/// `int (|omega|^4 + |nabla omega|^2) cos^{m1} sin^{m2} dt`, the energy
/// `J`, and the observed constant `lhs / (1 + J)`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct CoercivityAudit {
    pub lhs: f64,
    pub j_value: f64,
    pub observed_constant: f64,
}

pub fn coercivity_audit(p: &JoinProblem, f: &Profile) -> CoercivityAudit {
    let g = &f.grid;
    let w = g.quadrature_weights();
    let d = f.derivatives();
    let m1 = p.m1 as i32;
    let m2 = p.m2 as i32;
    let mut lhs = 0.0;
    for i in 0..g.len() {
        let (o2, g2) = omega_norms_at_node(p, f, &d.alpha_p, &d.beta_p, i);
        lhs += w[i] * (o2 * o2 + g2) * g.cos(i).powi(m1) * g.sin(i).powi(m2);
    }
    let j = functional::evaluate_j(p, f).total();
    CoercivityAudit {
        lhs,
        j_value: j,
        observed_constant: lhs / (1.0 + j),
    }
}

/// `|F|^2` at every grid node with grid-scheme derivatives.
pub fn f_norm_trace(p: &JoinProblem, f: &Profile) -> Vec<f64> {
    let d = f.derivatives();
    (0..f.len())
        .map(|i| components_at_node(p, f, &d.alpha_p, &d.beta_p, i).norm_squared())
        .collect()
}

/// CSV trace `t, f_uv, f_wz, f_xu, f_xw, f_uw, F2` over all grid nodes.
pub fn components_csv(p: &JoinProblem, f: &Profile) -> String {
    let d = f.derivatives();
    let mut out = String::from("t,f_uv,f_wz,f_xu,f_xw,f_uw,f_norm_squared\n");
    for i in 0..f.len() {
        let c = components_at_node(p, f, &d.alpha_p, &d.beta_p, i);
        out.push_str(&format!(
            "{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e}\n",
            f.grid.nodes()[i],
            c.f_uv,
            c.f_wz,
            c.f_xu,
            c.f_xw,
            c.f_uw,
            c.norm_squared()
        ));
    }
    out
}
