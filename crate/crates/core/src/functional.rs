//! The reduced Yang-Mills energy `J`, its discrete gradient, second
//! variation at the constant solution `(0, 1)`, and profile projections.
//!
//! For a join of eigenmaps with data `(m1, lambda1, mu1)`, `(m2, lambda2, mu2)`,
//!
//! ```text
//! J(alpha, beta) = int_0^{pi/2} { 2 l1 a'^2/cos^2 + 2 l2 b'^2/sin^2
//!                  + 2 l1 l2 a^2 b^2/(cos^2 sin^2)
//!                  + l1 m1 (a^2-1)^2/cos^4 + l2 m2 (b^2-1)^2/sin^4 }
//!                  cos^{m1} sin^{m2} dt.
//! ```
//!
//! The integrand is evaluated on `[eps, pi/2 - eps]` by the grid's
//! quadrature; the remaining slivers are covered by analytic tail estimates
//! assuming the leading boundary behavior (`alpha ~ c t^gamma`,
//! `1 - beta ~ c t^rho` near zero, mirrored at `pi/2`), with the tail
//! magnitudes reported separately. A term whose tail diverges (non-integrable
//! exponent with a nonvanishing coefficient) sets the infinity flag instead
//! of returning a large float.

use crate::eigenmaps::Eigenmap;
use crate::grid::{Domain, Grid};
use crate::ode;
use crate::profile::{Profile, SuspensionProfile};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// Coefficient cutoff below which a formally divergent tail is treated as
/// absent (guards pure-roundoff coefficients).
const DIVERGENCE_COEF_CUTOFF: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProblemMode {
    /// `m1, m2 >= 2`; existence governed by the damping conditions D1/D2.
    Main,
    /// `m2 = 1`, `mu2 = 0`, `lambda2 = k^2`: minimize with `beta(0) = 1` pinned.
    ConstrainedBeta,
}

/// A join boundary value problem built from two eigenmaps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JoinProblem {
    pub eig1: Eigenmap,
    pub eig2: Eigenmap,
    pub m1: u32,
    pub m2: u32,
    pub lambda1: f64,
    pub lambda2: f64,
    pub mu1: f64,
    pub mu2: f64,
}

impl JoinProblem {
    pub fn new(eig1: Eigenmap, eig2: Eigenmap) -> Result<Self> {
        if eig1.m < 2 {
            return Err(Error::Problem(
                "first factor needs m1 >= 2 (put the circle factor second)".into(),
            ));
        }
        if eig2.m == 1 && eig2.mu_f64() != 0.0 {
            return Err(Error::Problem("m2 = 1 requires mu2 = 0".into()));
        }
        Ok(JoinProblem {
            m1: eig1.m,
            m2: eig2.m,
            lambda1: eig1.lambda_f64(),
            lambda2: eig2.lambda_f64(),
            mu1: eig1.mu_f64(),
            mu2: eig2.mu_f64(),
            eig1,
            eig2,
        })
    }

    pub fn mode(&self) -> ProblemMode {
        if self.m2 == 1 {
            ProblemMode::ConstrainedBeta
        } else {
            ProblemMode::Main
        }
    }

    /// The problem with the two factors exchanged (acts on solutions by
    /// `t -> pi/2 - t`, `alpha <-> beta`).
    pub fn swapped(&self) -> Self {
        JoinProblem {
            eig1: self.eig2.clone(),
            eig2: self.eig1.clone(),
            m1: self.m2,
            m2: self.m1,
            lambda1: self.lambda2,
            lambda2: self.lambda1,
            mu1: self.mu2,
            mu2: self.mu1,
        }
    }
}

/// The one-eigenmap analog on `S^{m1+1}`, `m2 = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuspensionProblem {
    pub eig: Option<Eigenmap>,
    pub m1: u32,
    pub lambda1: f64,
    pub mu1: f64,
}

impl SuspensionProblem {
    pub fn from_eigenmap(eig: Eigenmap) -> Self {
        SuspensionProblem {
            m1: eig.m,
            lambda1: eig.lambda_f64(),
            mu1: eig.mu_f64(),
            eig: Some(eig),
        }
    }

    pub fn custom(m1: u32, lambda1: f64, mu1: f64) -> Result<Self> {
        if m1 < 2 || !(lambda1 > 0.0) || !(mu1 >= 0.0) {
            return Err(Error::Problem(
                "suspension problem needs m1 >= 2, lambda1 > 0, mu1 >= 0".into(),
            ));
        }
        Ok(SuspensionProblem {
            eig: None,
            m1,
            lambda1,
            mu1,
        })
    }
}

/// An energy value split into the quadrature part and the two analytic
/// endpoint tails. `total()` is `+inf` when a tail diverges.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct EnergyBreakdown {
    pub interior: f64,
    pub tail_lo: f64,
    pub tail_hi: f64,
    pub divergent: bool,
}

impl EnergyBreakdown {
    pub fn total(&self) -> f64 {
        if self.divergent {
            f64::INFINITY
        } else {
            self.interior + self.tail_lo + self.tail_hi
        }
    }

    pub fn is_finite(&self) -> bool {
        !self.divergent
    }
}

/// The five term coefficients of the energy density
/// `c1 a'^2/cos^2 + c2 b'^2/sin^2 + c3 a^2 b^2/(cos^2 sin^2)
///  + c4 (a^2-1)^2/cos^4 + c5 (b^2-1)^2/sin^4`, times `cos^{m1} sin^{m2}`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct TermCoeffs {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub c4: f64,
    pub c5: f64,
}

pub(crate) fn j_coeffs(p: &JoinProblem) -> TermCoeffs {
    TermCoeffs {
        c1: 2.0 * p.lambda1,
        c2: 2.0 * p.lambda2,
        c3: 2.0 * p.lambda1 * p.lambda2,
        c4: p.lambda1 * p.mu1,
        c5: p.lambda2 * p.mu2,
    }
}

/// `|F|^2` carries exactly twice each `J` coefficient.
pub(crate) fn fnorm_coeffs(p: &JoinProblem) -> TermCoeffs {
    let c = j_coeffs(p);
    TermCoeffs {
        c1: 2.0 * c.c1,
        c2: 2.0 * c.c2,
        c3: 2.0 * c.c3,
        c4: 2.0 * c.c4,
        c5: 2.0 * c.c5,
    }
}

#[allow(clippy::too_many_arguments)]
fn integrand_at(
    p: &JoinProblem,
    c: &TermCoeffs,
    sin: f64,
    cos: f64,
    a: f64,
    ap: f64,
    b: f64,
    bp: f64,
) -> f64 {
    let w = cos.powi(p.m1 as i32) * sin.powi(p.m2 as i32);
    let s2 = sin * sin;
    let c2 = cos * cos;
    let t1 = c.c1 * ap * ap / c2;
    let t2 = c.c2 * bp * bp / s2;
    let t3 = c.c3 * a * a * b * b / (c2 * s2);
    let a2m = a * a - 1.0;
    let b2m = b * b - 1.0;
    let t4 = c.c4 * a2m * a2m / (c2 * c2);
    let t5 = c.c5 * b2m * b2m / (s2 * s2);
    (t1 + t2 + t3 + t4 + t5) * w
}

struct TailAcc {
    value: f64,
    divergent: bool,
}

impl TailAcc {
    fn new() -> Self {
        TailAcc {
            value: 0.0,
            divergent: false,
        }
    }

    /// Model the term as `x_eps (t/eps)^{exponent}` near the endpoint:
    /// the sliver integral is `x_eps * eps / (exponent + 1)`.
    fn add(&mut self, x_eps: f64, exponent: f64, eps: f64) {
        if x_eps.abs() <= DIVERGENCE_COEF_CUTOFF {
            return;
        }
        if exponent <= -1.0 {
            self.divergent = true;
            return;
        }
        self.value += x_eps * eps / (exponent + 1.0);
    }
}

/// Tail of the five-term energy over `(0, eps_lo)`.
fn join_tail_lo(p: &JoinProblem, f: &Profile, c: &TermCoeffs) -> TailAcc {
    let g = &f.grid;
    let eps = g.eps_lo();
    let (sin0, cos0) = (g.sin(0), g.cos(0));
    let m1 = p.m1 as i32;
    let m2f = p.m2 as f64;
    let (a0, b0) = (f.boundary_alpha.0, f.boundary_beta.0);
    let da = f.alpha[0] - a0;
    let db = f.beta[0] - b0;
    let gamma = ode::alpha_exponent_at_zero(p.m2, p.lambda2);
    let rho = ode::beta_exponent_at_zero(p.m2, p.mu2);

    let wm2 = sin0.powi(p.m2 as i32); // sin^{m2}
    let wm2m2 = sin0.powi(p.m2 as i32 - 2);
    let wm2m4 = sin0.powi(p.m2 as i32 - 4);

    let mut acc = TailAcc::new();
    // T1: c1 a'^2 cos^{m1-2} sin^{m2}, a' ~ gamma da / eps
    let ap = gamma * da / eps;
    acc.add(c.c1 * ap * ap * cos0.powi(m1 - 2) * wm2, 2.0 * gamma - 2.0 + m2f, eps);
    // T2: c2 b'^2 cos^{m1} sin^{m2-2}
    let bp = rho * db / eps;
    acc.add(c.c2 * bp * bp * cos0.powi(m1) * wm2m2, 2.0 * rho - 4.0 + m2f, eps);
    // T3: c3 a^2 b^2 cos^{m1-2} sin^{m2-2}
    let ea = if a0 == 0.0 { 2.0 * gamma } else { 0.0 };
    let eb = if b0 == 0.0 { 2.0 * rho.max(1.0) } else { 0.0 };
    let a_node = f.alpha[0];
    let b_node = f.beta[0];
    acc.add(
        c.c3 * a_node * a_node * b_node * b_node * cos0.powi(m1 - 2) * wm2m2,
        ea + eb + m2f - 2.0,
        eps,
    );
    // T4: c4 (a^2-1)^2 cos^{m1-4} sin^{m2}
    let e4 = if a0.abs() == 1.0 { 2.0 * gamma } else { 0.0 };
    let a2m = a_node * a_node - 1.0;
    acc.add(c.c4 * a2m * a2m * cos0.powi(m1 - 4) * wm2, e4 + m2f, eps);
    // T5: c5 (b^2-1)^2 cos^{m1} sin^{m2-4}
    let e5 = if b0.abs() == 1.0 { 2.0 * rho } else { 0.0 };
    let b2m = b_node * b_node - 1.0;
    acc.add(c.c5 * b2m * b2m * cos0.powi(m1) * wm2m4, e5 + m2f - 4.0, eps);
    acc
}

/// Tail over `(pi/2 - eps_hi, pi/2)`; roles of the two factors mirror.
fn join_tail_hi(p: &JoinProblem, f: &Profile, c: &TermCoeffs) -> TailAcc {
    let g = &f.grid;
    let n = g.len() - 1;
    let eps = g.eps_hi();
    let (sinn, cosn) = (g.sin(n), g.cos(n));
    let m2 = p.m2 as i32;
    let m1f = p.m1 as f64;
    let (a1, b1) = (f.boundary_alpha.1, f.boundary_beta.1);
    let da = f.alpha[n] - a1;
    let db = f.beta[n] - b1;
    let rho_a = ode::alpha_exponent_at_pihalf(p.m1, p.mu1);
    let gamma_b = ode::beta_exponent_at_pihalf(p.m1, p.lambda1);

    let mut acc = TailAcc::new();
    // T1: c1 a'^2 cos^{m1-2} sin^{m2}, alpha approaches a1 at rate rho_a
    let ap = rho_a * da / eps;
    acc.add(
        c.c1 * ap * ap * cosn.powi(p.m1 as i32 - 2) * sinn.powi(m2),
        2.0 * rho_a - 4.0 + m1f,
        eps,
    );
    // T2: c2 b'^2 cos^{m1} sin^{m2-2}, beta vanishes at rate gamma_b
    let bp = gamma_b * db / eps;
    acc.add(
        c.c2 * bp * bp * cosn.powi(p.m1 as i32) * sinn.powi(m2 - 2),
        2.0 * gamma_b - 2.0 + m1f,
        eps,
    );
    // T3
    let ea = if a1 == 0.0 { 2.0 } else { 0.0 };
    let eb = if b1 == 0.0 { 2.0 * gamma_b } else { 0.0 };
    let a_node = f.alpha[n];
    let b_node = f.beta[n];
    acc.add(
        c.c3 * a_node * a_node * b_node * b_node * cosn.powi(p.m1 as i32 - 2) * sinn.powi(m2 - 2),
        ea + eb + m1f - 2.0,
        eps,
    );
    // T4: divergent when alpha(pi/2) is not a unit value and m1 <= 3
    let e4 = if a1.abs() == 1.0 { 2.0 * rho_a } else { 0.0 };
    let a2m = a_node * a_node - 1.0;
    acc.add(
        c.c4 * a2m * a2m * cosn.powi(p.m1 as i32 - 4) * sinn.powi(m2),
        e4 + m1f - 4.0,
        eps,
    );
    // T5
    let e5 = if b1.abs() == 1.0 { 2.0 } else { 0.0 };
    let b2m = b_node * b_node - 1.0;
    acc.add(
        c.c5 * b2m * b2m * cosn.powi(p.m1 as i32) * sinn.powi(m2 - 4),
        e5 + m1f,
        eps,
    );
    acc
}

/// Quadrature approximation of `J(alpha, beta)` with analytic tails.
pub fn evaluate_j(p: &JoinProblem, f: &Profile) -> EnergyBreakdown {
    evaluate_weighted(p, f, &j_coeffs(p))
}

pub(crate) fn evaluate_weighted(p: &JoinProblem, f: &Profile, c: &TermCoeffs) -> EnergyBreakdown {
    let g = &f.grid;
    let w = g.quadrature_weights();
    let d = f.derivatives();
    let mut interior = 0.0;
    for i in 0..g.len() {
        interior += w[i]
            * integrand_at(
                p,
                c,
                g.sin(i),
                g.cos(i),
                f.alpha[i],
                d.alpha_p[i],
                f.beta[i],
                d.beta_p[i],
            );
    }
    let lo = join_tail_lo(p, f, c);
    let hi = join_tail_hi(p, f, c);
    EnergyBreakdown {
        interior,
        tail_lo: lo.value,
        tail_hi: hi.value,
        divergent: lo.divergent || hi.divergent,
    }
}

/// Reduced energy of a suspension profile:
/// `int { 2 l1 a'^2/cos^2 + l1 m1 (a^2-1)^2/cos^4 } cos^{m1} dt` over
/// `(-pi/2, pi/2)` with tails at both caps.
pub fn evaluate_j_suspension(sp: &SuspensionProblem, f: &SuspensionProfile) -> EnergyBreakdown {
    let c1 = 2.0 * sp.lambda1;
    let c4 = sp.lambda1 * sp.mu1;
    let g = &f.grid;
    let w = g.quadrature_weights();
    let (dal, _) = f.derivatives();
    let m1 = sp.m1 as i32;
    let mut interior = 0.0;
    for i in 0..g.len() {
        let cos = g.cos(i);
        let a = f.alpha[i];
        let ap = dal[i];
        let a2m = a * a - 1.0;
        interior += w[i]
            * (c1 * ap * ap * cos.powi(m1 - 2) + c4 * a2m * a2m * cos.powi(m1 - 4));
    }
    let rho = ode::suspension_exponent(sp.m1, sp.mu1);
    let mut acc = TailAcc::new();
    for (idx, eps, lim) in [
        (0usize, g.eps_lo(), f.boundary.0),
        (g.len() - 1, g.eps_hi(), f.boundary.1),
    ] {
        let cosv = g.cos(idx);
        let da = f.alpha[idx] - lim;
        let ap = rho * da / eps;
        acc.add(c1 * ap * ap * cosv.powi(m1 - 2), 2.0 * rho - 4.0 + sp.m1 as f64, eps);
        let e4 = if lim.abs() == 1.0 { 2.0 * rho } else { 0.0 };
        let a2m = f.alpha[idx] * f.alpha[idx] - 1.0;
        acc.add(c4 * a2m * a2m * cosv.powi(m1 - 4), e4 + sp.m1 as f64 - 4.0, eps);
    }
    EnergyBreakdown {
        interior,
        tail_lo: acc.value / 2.0,
        tail_hi: acc.value / 2.0,
        divergent: acc.divergent,
    }
}

/// Gradient of the discretized `J` (quadrature plus tails) with respect to
/// every nodal value. Boundary limits are metadata and stay fixed.
pub fn discrete_gradient(p: &JoinProblem, f: &Profile) -> (Vec<f64>, Vec<f64>) {
    let c = j_coeffs(p);
    let g = &f.grid;
    let n = g.len();
    let w = g.quadrature_weights();
    let stencils = g.diff_stencils();
    let d = f.derivatives();
    let mut ga = vec![0.0; n];
    let mut gb = vec![0.0; n];

    // chain factors d(native)/dt per node for derivative dependencies
    let dnat: Vec<f64> = (0..n)
        .map(|i| {
            // derivatives_t composes stencil with dnat_dt; recover the factor
            // from the grid rather than re-deriving it here.
            g.native_to_t_factor(i)
        })
        .collect();

    for i in 0..n {
        let (sin, cos) = (g.sin(i), g.cos(i));
        let weight = cos.powi(p.m1 as i32) * sin.powi(p.m2 as i32);
        let s2 = sin * sin;
        let c2 = cos * cos;
        let (a, ap, b, bp) = (f.alpha[i], d.alpha_p[i], f.beta[i], d.beta_p[i]);
        // direct value dependence
        let df_da = (2.0 * c.c3 * a * b * b / (c2 * s2)
            + 4.0 * c.c4 * a * (a * a - 1.0) / (c2 * c2))
            * weight;
        let df_db = (2.0 * c.c3 * a * a * b / (c2 * s2)
            + 4.0 * c.c5 * b * (b * b - 1.0) / (s2 * s2))
            * weight;
        ga[i] += w[i] * df_da;
        gb[i] += w[i] * df_db;
        // derivative dependence spreads over the stencil
        let df_dap = 2.0 * c.c1 * ap / c2 * weight;
        let df_dbp = 2.0 * c.c2 * bp / s2 * weight;
        let st = &stencils[i];
        for j in 0..3 {
            ga[st.start + j] += w[i] * df_dap * st.c1[j] * dnat[i];
            gb[st.start + j] += w[i] * df_dbp * st.c1[j] * dnat[i];
        }
    }

    add_tail_gradients(p, f, &c, &mut ga, &mut gb);
    (ga, gb)
}

fn add_tail_gradients(
    p: &JoinProblem,
    f: &Profile,
    c: &TermCoeffs,
    ga: &mut [f64],
    gb: &mut [f64],
) {
    let g = &f.grid;
    let n = g.len() - 1;
    let m1 = p.m1 as i32;
    let m2 = p.m2 as i32;
    let m1f = p.m1 as f64;
    let m2f = p.m2 as f64;

    // endpoint 0
    {
        let eps = g.eps_lo();
        let (sin0, cos0) = (g.sin(0), g.cos(0));
        let (a0, b0) = (f.boundary_alpha.0, f.boundary_beta.0);
        let gamma = ode::alpha_exponent_at_zero(p.m2, p.lambda2);
        let rho = ode::beta_exponent_at_zero(p.m2, p.mu2);
        let (a, b) = (f.alpha[0], f.beta[0]);
        // T1
        let e1 = 2.0 * gamma - 2.0 + m2f;
        if e1 > -1.0 {
            let k = c.c1 * gamma * gamma / (eps * eps) * cos0.powi(m1 - 2) * sin0.powi(m2) * eps
                / (e1 + 1.0);
            ga[0] += 2.0 * k * (a - a0);
        }
        // T2
        let e2 = 2.0 * rho - 4.0 + m2f;
        if e2 > -1.0 {
            let k = c.c2 * rho * rho / (eps * eps) * cos0.powi(m1) * sin0.powi(m2 - 2) * eps
                / (e2 + 1.0);
            gb[0] += 2.0 * k * (b - b0);
        }
        // T3
        let ea = if a0 == 0.0 { 2.0 * gamma } else { 0.0 };
        let eb = if b0 == 0.0 { 2.0 * rho.max(1.0) } else { 0.0 };
        let e3 = ea + eb + m2f - 2.0;
        if e3 > -1.0 {
            let k = c.c3 * cos0.powi(m1 - 2) * sin0.powi(m2 - 2) * eps / (e3 + 1.0);
            ga[0] += 2.0 * k * a * b * b;
            gb[0] += 2.0 * k * a * a * b;
        }
        // T4
        let e4 = if a0.abs() == 1.0 { 2.0 * gamma } else { 0.0 } + m2f;
        if e4 > -1.0 {
            let k = c.c4 * cos0.powi(m1 - 4) * sin0.powi(m2) * eps / (e4 + 1.0);
            ga[0] += 4.0 * k * a * (a * a - 1.0);
        }
        // T5
        let e5 = if b0.abs() == 1.0 { 2.0 * rho } else { 0.0 } + m2f - 4.0;
        if e5 > -1.0 {
            let k = c.c5 * cos0.powi(m1) * sin0.powi(m2 - 4) * eps / (e5 + 1.0);
            gb[0] += 4.0 * k * b * (b * b - 1.0);
        }
    }

    // endpoint pi/2
    {
        let eps = g.eps_hi();
        let (sinn, cosn) = (g.sin(n), g.cos(n));
        let (a1, b1) = (f.boundary_alpha.1, f.boundary_beta.1);
        let rho_a = ode::alpha_exponent_at_pihalf(p.m1, p.mu1);
        let gamma_b = ode::beta_exponent_at_pihalf(p.m1, p.lambda1);
        let (a, b) = (f.alpha[n], f.beta[n]);
        let e1 = 2.0 * rho_a - 4.0 + m1f;
        if e1 > -1.0 {
            let k = c.c1 * rho_a * rho_a / (eps * eps) * cosn.powi(m1 - 2) * sinn.powi(m2) * eps
                / (e1 + 1.0);
            ga[n] += 2.0 * k * (a - a1);
        }
        let e2 = 2.0 * gamma_b - 2.0 + m1f;
        if e2 > -1.0 {
            let k = c.c2 * gamma_b * gamma_b / (eps * eps) * cosn.powi(m1) * sinn.powi(m2 - 2)
                * eps
                / (e2 + 1.0);
            gb[n] += 2.0 * k * (b - b1);
        }
        let ea = if a1 == 0.0 { 2.0 } else { 0.0 };
        let eb = if b1 == 0.0 { 2.0 * gamma_b } else { 0.0 };
        let e3 = ea + eb + m1f - 2.0;
        if e3 > -1.0 {
            let k = c.c3 * cosn.powi(m1 - 2) * sinn.powi(m2 - 2) * eps / (e3 + 1.0);
            ga[n] += 2.0 * k * a * b * b;
            gb[n] += 2.0 * k * a * a * b;
        }
        let e4 = if a1.abs() == 1.0 { 2.0 * rho_a } else { 0.0 } + m1f - 4.0;
        if e4 > -1.0 {
            let k = c.c4 * cosn.powi(m1 - 4) * sinn.powi(m2) * eps / (e4 + 1.0);
            ga[n] += 4.0 * k * a * (a * a - 1.0);
        }
        let e5 = if b1.abs() == 1.0 { 2.0 } else { 0.0 } + m1f;
        if e5 > -1.0 {
            let k = c.c5 * cosn.powi(m1) * sinn.powi(m2 - 4) * eps / (e5 + 1.0);
            gb[n] += 4.0 * k * b * (b * b - 1.0);
        }
    }
}

/// Second variation of `J` at the constant solution `(0, 1)` in the
/// direction `(phi, psi)`:
/// `int { 4 l1 p'^2/cos^2 + 4 l2 q'^2/sin^2 + 4 l1 l2 p^2/(cos^2 sin^2)
///  - 4 l1 m1 p^2/cos^4 + 8 l2 m2 q^2/sin^4 } cos^{m1} sin^{m2} dt`.
pub fn second_variation_at_0_1(
    p: &JoinProblem,
    grid: &Grid,
    phi: &[f64],
    psi: &[f64],
) -> Result<f64> {
    if p.m1 < 4 {
        return Err(Error::Problem(
            "second variation at (0,1) needs m1 >= 4 (otherwise J(0,1) is infinite)".into(),
        ));
    }
    if phi.len() != grid.len() || psi.len() != grid.len() {
        return Err(Error::Problem("direction length does not match grid".into()));
    }
    let w = grid.quadrature_weights();
    let (dphi, _) = grid.derivatives_t(phi);
    let (dpsi, _) = grid.derivatives_t(psi);
    let m1 = p.m1 as i32;
    let m2 = p.m2 as i32;
    let mut total = 0.0;
    for i in 0..grid.len() {
        let (sin, cos) = (grid.sin(i), grid.cos(i));
        let weight = cos.powi(m1) * sin.powi(m2);
        let s2 = sin * sin;
        let c2 = cos * cos;
        total += w[i]
            * weight
            * (4.0 * p.lambda1 * dphi[i] * dphi[i] / c2
                + 4.0 * p.lambda2 * dpsi[i] * dpsi[i] / s2
                + 4.0 * p.lambda1 * p.lambda2 * phi[i] * phi[i] / (c2 * s2)
                - 4.0 * p.lambda1 * p.mu1 * phi[i] * phi[i] / (c2 * c2)
                + 8.0 * p.lambda2 * p.mu2 * psi[i] * psi[i] / (s2 * s2));
    }
    Ok(total)
}

/// The instability quadratic form of the constant solution `(0, 1)`:
/// `H(phi) = int { phi'^2 + (l2/sin^2 - m1/cos^2) phi^2 } cos^{m1-2} sin^{m2} dt`.
pub fn h_form_value(p: &JoinProblem, grid: &Grid, phi: &[f64]) -> f64 {
    let w = grid.quadrature_weights();
    let (dphi, _) = grid.derivatives_t(phi);
    let m1 = p.m1 as i32;
    let m2 = p.m2 as i32;
    let mut total = 0.0;
    for i in 0..grid.len() {
        let (sin, cos) = (grid.sin(i), grid.cos(i));
        let weight = cos.powi(m1 - 2) * sin.powi(m2);
        let v = p.lambda2 / (sin * sin) - p.mu1 / (cos * cos);
        total += w[i] * weight * (dphi[i] * dphi[i] + v * phi[i] * phi[i]);
    }
    total
}

/// Smallest eigenvalue of `H` relative to the weighted `L^2` form
/// `int phi^2 cos^{m1-2} sin^{m2} dt`, by a P1 finite-element assembly and
/// tridiagonal bisection. Negative iff `(0, 1)` is unstable at this
/// resolution.
pub fn h_form_min_eig(p: &JoinProblem, grid: &Grid) -> Result<f64> {
    if p.m1 < 4 {
        return Err(Error::Problem("h_form_min_eig needs m1 >= 4".into()));
    }
    if grid.len() < 64 {
        return Err(Error::Grid("h_form_min_eig needs at least 64 nodes".into()));
    }
    let n = grid.len();
    let t = grid.nodes();
    let m1 = p.m1 as i32;
    let m2 = p.m2 as i32;
    let weight = |i: usize| grid.cos(i).powi(m1 - 2) * grid.sin(i).powi(m2);
    // stiffness: midpoint weight per cell; potential and mass lumped at nodes
    let mut diag = vec![0.0; n];
    let mut off = vec![0.0; n - 1];
    let mut mass = vec![0.0; n];
    for i in 0..n - 1 {
        let h = t[i + 1] - t[i];
        let tm = 0.5 * (t[i] + t[i + 1]);
        let wm = tm.cos().powi(m1 - 2) * tm.sin().powi(m2);
        let k = wm / h;
        diag[i] += k;
        diag[i + 1] += k;
        off[i] -= k;
    }
    for i in 0..n {
        let cell = match i {
            0 => (t[1] - t[0]) / 2.0 + grid.eps_lo(),
            _ if i == n - 1 => (t[n - 1] - t[n - 2]) / 2.0 + grid.eps_hi(),
            _ => (t[i + 1] - t[i - 1]) / 2.0,
        };
        let sin = grid.sin(i);
        let cos = grid.cos(i);
        let v = p.lambda2 / (sin * sin) - p.mu1 / (cos * cos);
        diag[i] += v * weight(i) * cell;
        mass[i] = weight(i) * cell;
    }
    Ok(crate::numerics::tridiag_smallest_generalized_eig(
        &diag, &off, &mass,
    ))
}

/// Pointwise truncation `f -> |f|` where `|f| <= 1`, `1/|f|` where `|f| > 1`.
/// Applied to both components; the result has values in `[0, 1]`.
pub fn truncate_profile(f: &Profile) -> Profile {
    let mut out = f.clone();
    for v in out.alpha.iter_mut().chain(out.beta.iter_mut()) {
        *v = truncate_value(*v);
    }
    out
}

pub fn truncate_value(v: f64) -> f64 {
    let a = v.abs();
    if a <= 1.0 {
        a
    } else {
        1.0 / a
    }
}

/// Project onto the symmetric class `alpha(pi/2 - t) = beta(t)` for
/// problems with `m1 = m2`:
/// `alpha_new(t) = (alpha(t) + beta(pi/2 - t)) / 2`, `beta_new` mirrored.
pub fn symmetrize_profile(f: &Profile) -> Result<Profile> {
    if f.grid.domain != Domain::Join {
        return Err(Error::Profile("symmetrize needs a join profile".into()));
    }
    if !f.grid.is_symmetric(1e-9) {
        return Err(Error::Profile(
            "symmetrize needs a grid symmetric about pi/4".into(),
        ));
    }
    let n = f.len();
    let mut out = f.clone();
    for i in 0..n {
        let j = n - 1 - i;
        out.alpha[i] = 0.5 * (f.alpha[i] + f.beta[j]);
        out.beta[i] = 0.5 * (f.beta[i] + f.alpha[j]);
    }
    out.boundary_alpha = (
        0.5 * (f.boundary_alpha.0 + f.boundary_beta.1),
        0.5 * (f.boundary_alpha.1 + f.boundary_beta.0),
    );
    out.boundary_beta = (out.boundary_alpha.1, out.boundary_alpha.0);
    Ok(out)
}

/// Discrete Euler-Lagrange residuals recovered from the discrete gradient:
/// `r1_i = -g_alpha_i / (4 l1 W_i cos^{m1-2} sin^{m2})` and the mirrored
/// `r2`, expressed in the grid's native coordinate (the `t`-form density is
/// divided by `(ds/dt)^2` on log-tangent grids, where profile values pinned
/// near 1 are ulp-quantized and would otherwise swamp the residual). At a
/// discrete critical point these vanish identically, so they measure
/// optimality of the discretized problem rather than the O(h^2) truncation
/// error of the scheme.
pub fn discrete_el_residual(p: &JoinProblem, f: &Profile) -> (Vec<f64>, Vec<f64>) {
    let (ga, gb) = discrete_gradient(p, f);
    let (mut r1, mut r2) = residual_from_gradient(p, f, &ga, &gb);
    for i in 0..f.len() {
        let q2 = f.grid.native_to_t_factor(i).powi(2);
        r1[i] /= q2;
        r2[i] /= q2;
    }
    (r1, r2)
}

pub(crate) fn residual_from_gradient(
    p: &JoinProblem,
    f: &Profile,
    ga: &[f64],
    gb: &[f64],
) -> (Vec<f64>, Vec<f64>) {
    let g = &f.grid;
    let w = g.quadrature_weights();
    let m1 = p.m1 as i32;
    let m2 = p.m2 as i32;
    let n = g.len();
    let mut r1 = vec![0.0; n];
    let mut r2 = vec![0.0; n];
    for i in 0..n {
        let (sin, cos) = (g.sin(i), g.cos(i));
        r1[i] = -ga[i] / (4.0 * p.lambda1 * w[i] * cos.powi(m1 - 2) * sin.powi(m2));
        r2[i] = -gb[i] / (4.0 * p.lambda2 * w[i] * cos.powi(m1) * sin.powi(m2 - 2));
    }
    (r1, r2)
}
