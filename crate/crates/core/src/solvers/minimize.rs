//! Variational solver: projected gradient descent on the discretized energy
//! with the truncation map as projection, followed by a Newton polish of
//! the discrete Euler-Lagrange system.
//!
//! Gradient descent with Barzilai-Borwein steps and a monotone line search
//! finds the basin; the banded Newton iteration then drives the discrete
//! gradient to rounding level, so the reported residual measures optimality
//! of the discretized problem rather than the line-search floor. The
//! truncation projection is dropped during the polish: nonconstant
//! minimizers take interior values in `(0, 1)`.

use super::{
    classify_constant_solutions, classify_profile, value_range, Classification, MethodDetails,
    SeedProfile, SolveOptions, SolveReport, RESIDUAL_BUFFER,
};
use crate::functional::{
    evaluate_j, j_coeffs, truncate_value, JoinProblem, ProblemMode, TermCoeffs,
};
use crate::grid::{DiffStencil, Domain, Grid};
use crate::numerics::{BandedMatrix, SplitMix64};
use crate::ode::{self, BoundaryTolerances};
use crate::profile::Profile;
use crate::{Error, Result};

/// Quadratic tail pieces at one endpoint: `tail = K1 da^2 + K2 db^2
/// + K3 a^2 b^2 + K4 (a^2-1)^2 + K5 (b^2-1)^2` in the first/last node
/// values, with the limits subtracted in `da`, `db`.
#[derive(Debug, Clone, Copy, Default)]
struct TailK {
    k1: f64,
    k2: f64,
    k3: f64,
    k4: f64,
    k5: f64,
    a_lim: f64,
    b_lim: f64,
}

impl TailK {
    fn value(&self, a: f64, b: f64) -> f64 {
        let da = a - self.a_lim;
        let db = b - self.b_lim;
        self.k1 * da * da
            + self.k2 * db * db
            + self.k3 * a * a * b * b
            + self.k4 * (a * a - 1.0) * (a * a - 1.0)
            + self.k5 * (b * b - 1.0) * (b * b - 1.0)
    }

    fn grad(&self, a: f64, b: f64) -> (f64, f64) {
        let da = a - self.a_lim;
        let db = b - self.b_lim;
        (
            2.0 * self.k1 * da + 2.0 * self.k3 * a * b * b + 4.0 * self.k4 * a * (a * a - 1.0),
            2.0 * self.k2 * db + 2.0 * self.k3 * a * a * b + 4.0 * self.k5 * b * (b * b - 1.0),
        )
    }

    /// (h_aa, h_bb, h_ab)
    fn hess(&self, a: f64, b: f64) -> (f64, f64, f64) {
        (
            2.0 * self.k1 + 2.0 * self.k3 * b * b + self.k4 * (12.0 * a * a - 4.0),
            2.0 * self.k2 + 2.0 * self.k3 * a * a + self.k5 * (12.0 * b * b - 4.0),
            4.0 * self.k3 * a * b,
        )
    }
}

/// Cached per-grid data for repeated energy/gradient evaluation.
pub(crate) struct JoinWorkspace {
    c: TermCoeffs,
    w: Vec<f64>,
    stencils: Vec<DiffStencil>,
    dnat: Vec<f64>,
    weight: Vec<f64>,
    inv_c2: Vec<f64>,
    inv_s2: Vec<f64>,
    /// `4 l1 W_i cos^{m1-2} sin^{m2}` and the beta mirror: the factors
    /// relating gradient entries to Euler-Lagrange residual densities.
    norm_a: Vec<f64>,
    norm_b: Vec<f64>,
    tail_lo: TailK,
    tail_hi: TailK,
    pub boundary_alpha: (f64, f64),
    pub boundary_beta: (f64, f64),
}

impl JoinWorkspace {
    pub fn new(
        p: &JoinProblem,
        grid: Grid,
        boundary_alpha: (f64, f64),
        boundary_beta: (f64, f64),
    ) -> Self {
        let n = grid.len();
        let c = j_coeffs(p);
        let w = grid.quadrature_weights();
        let stencils = grid.diff_stencils();
        let dnat: Vec<f64> = (0..n).map(|i| grid.native_to_t_factor(i)).collect();
        let mut weight = vec![0.0; n];
        let mut inv_c2 = vec![0.0; n];
        let mut inv_s2 = vec![0.0; n];
        let mut norm_a = vec![0.0; n];
        let mut norm_b = vec![0.0; n];
        for i in 0..n {
            let (sin, cos) = (grid.sin(i), grid.cos(i));
            weight[i] = cos.powi(p.m1 as i32) * sin.powi(p.m2 as i32);
            inv_c2[i] = 1.0 / (cos * cos);
            inv_s2[i] = 1.0 / (sin * sin);
            // gradient-to-residual normalizations, expressed in the grid's
            // native coordinate (extra (d native/dt)^2 on log-tangent grids)
            let q2 = grid.native_to_t_factor(i) * grid.native_to_t_factor(i);
            norm_a[i] =
                4.0 * p.lambda1 * w[i] * cos.powi(p.m1 as i32 - 2) * sin.powi(p.m2 as i32) * q2;
            norm_b[i] =
                4.0 * p.lambda2 * w[i] * cos.powi(p.m1 as i32) * sin.powi(p.m2 as i32 - 2) * q2;
        }
        let tail_lo = Self::tail_lo(p, &grid, &c, boundary_alpha.0, boundary_beta.0);
        let tail_hi = Self::tail_hi(p, &grid, &c, boundary_alpha.1, boundary_beta.1);
        JoinWorkspace {
            c,
            w,
            stencils,
            dnat,
            weight,
            inv_c2,
            inv_s2,
            norm_a,
            norm_b,
            tail_lo,
            tail_hi,
            boundary_alpha,
            boundary_beta,
        }
    }

    fn kfac(coef: f64, eps: f64, exponent: f64) -> f64 {
        if exponent > -1.0 {
            coef * eps / (exponent + 1.0)
        } else {
            0.0
        }
    }

    fn tail_lo(p: &JoinProblem, g: &Grid, c: &TermCoeffs, a0: f64, b0: f64) -> TailK {
        let eps = g.eps_lo();
        let (sin0, cos0) = (g.sin(0), g.cos(0));
        let m1 = p.m1 as i32;
        let m2 = p.m2 as i32;
        let m2f = p.m2 as f64;
        let gamma = ode::alpha_exponent_at_zero(p.m2, p.lambda2);
        let rho = ode::beta_exponent_at_zero(p.m2, p.mu2);
        let ea = if a0 == 0.0 { 2.0 * gamma } else { 0.0 };
        let eb = if b0 == 0.0 { 2.0 * rho.max(1.0) } else { 0.0 };
        TailK {
            k1: Self::kfac(
                c.c1 * gamma * gamma / (eps * eps) * cos0.powi(m1 - 2) * sin0.powi(m2),
                eps,
                2.0 * gamma - 2.0 + m2f,
            ),
            k2: Self::kfac(
                c.c2 * rho * rho / (eps * eps) * cos0.powi(m1) * sin0.powi(m2 - 2),
                eps,
                2.0 * rho - 4.0 + m2f,
            ),
            k3: Self::kfac(
                c.c3 * cos0.powi(m1 - 2) * sin0.powi(m2 - 2),
                eps,
                ea + eb + m2f - 2.0,
            ),
            k4: Self::kfac(
                c.c4 * cos0.powi(m1 - 4) * sin0.powi(m2),
                eps,
                if a0.abs() == 1.0 { 2.0 * gamma } else { 0.0 } + m2f,
            ),
            k5: Self::kfac(
                c.c5 * cos0.powi(m1) * sin0.powi(m2 - 4),
                eps,
                if b0.abs() == 1.0 { 2.0 * rho } else { 0.0 } + m2f - 4.0,
            ),
            a_lim: a0,
            b_lim: b0,
        }
    }

    fn tail_hi(p: &JoinProblem, g: &Grid, c: &TermCoeffs, a1: f64, b1: f64) -> TailK {
        let n = g.len() - 1;
        let eps = g.eps_hi();
        let (sinn, cosn) = (g.sin(n), g.cos(n));
        let m1 = p.m1 as i32;
        let m2 = p.m2 as i32;
        let m1f = p.m1 as f64;
        let rho_a = ode::alpha_exponent_at_pihalf(p.m1, p.mu1);
        let gamma_b = ode::beta_exponent_at_pihalf(p.m1, p.lambda1);
        let ea = if a1 == 0.0 { 2.0 } else { 0.0 };
        let eb = if b1 == 0.0 { 2.0 * gamma_b } else { 0.0 };
        TailK {
            k1: Self::kfac(
                c.c1 * rho_a * rho_a / (eps * eps) * cosn.powi(m1 - 2) * sinn.powi(m2),
                eps,
                2.0 * rho_a - 4.0 + m1f,
            ),
            k2: Self::kfac(
                c.c2 * gamma_b * gamma_b / (eps * eps) * cosn.powi(m1) * sinn.powi(m2 - 2),
                eps,
                2.0 * gamma_b - 2.0 + m1f,
            ),
            k3: Self::kfac(
                c.c3 * cosn.powi(m1 - 2) * sinn.powi(m2 - 2),
                eps,
                ea + eb + m1f - 2.0,
            ),
            k4: Self::kfac(
                c.c4 * cosn.powi(m1 - 4) * sinn.powi(m2),
                eps,
                if a1.abs() == 1.0 { 2.0 * rho_a } else { 0.0 } + m1f - 4.0,
            ),
            k5: Self::kfac(
                c.c5 * cosn.powi(m1) * sinn.powi(m2 - 4),
                eps,
                if b1.abs() == 1.0 { 2.0 } else { 0.0 } + m1f,
            ),
            a_lim: a1,
            b_lim: b1,
        }
    }

    fn derivative(&self, v: &[f64], out: &mut [f64]) {
        for i in 0..v.len() {
            out[i] = self.stencils[i].first(v) * self.dnat[i];
        }
    }

    /// Energy and gradient of the discretized `J` in one pass.
    pub fn j_and_grad(
        &self,
        alpha: &[f64],
        beta: &[f64],
        da: &mut [f64],
        db: &mut [f64],
        ga: &mut [f64],
        gb: &mut [f64],
    ) -> f64 {
        let n = alpha.len();
        self.derivative(alpha, da);
        self.derivative(beta, db);
        ga.fill(0.0);
        gb.fill(0.0);
        let c = &self.c;
        let mut total = 0.0;
        for i in 0..n {
            let (a, b, ap, bp) = (alpha[i], beta[i], da[i], db[i]);
            let ic2 = self.inv_c2[i];
            let is2 = self.inv_s2[i];
            let u = self.weight[i];
            let a2m = a * a - 1.0;
            let b2m = b * b - 1.0;
            total += self.w[i]
                * u
                * (c.c1 * ap * ap * ic2
                    + c.c2 * bp * bp * is2
                    + c.c3 * a * a * b * b * ic2 * is2
                    + c.c4 * a2m * a2m * ic2 * ic2
                    + c.c5 * b2m * b2m * is2 * is2);
            let wu = self.w[i] * u;
            ga[i] += wu * (2.0 * c.c3 * a * b * b * ic2 * is2 + 4.0 * c.c4 * a * a2m * ic2 * ic2);
            gb[i] += wu * (2.0 * c.c3 * a * a * b * ic2 * is2 + 4.0 * c.c5 * b * b2m * is2 * is2);
            let dfdap = wu * 2.0 * c.c1 * ap * ic2 * self.dnat[i];
            let dfdbp = wu * 2.0 * c.c2 * bp * is2 * self.dnat[i];
            let st = &self.stencils[i];
            for j in 0..3 {
                ga[st.start + j] += dfdap * st.c1[j];
                gb[st.start + j] += dfdbp * st.c1[j];
            }
        }
        total += self.tail_lo.value(alpha[0], beta[0]);
        total += self.tail_hi.value(alpha[n - 1], beta[n - 1]);
        let (t_ga, t_gb) = self.tail_lo.grad(alpha[0], beta[0]);
        ga[0] += t_ga;
        gb[0] += t_gb;
        let (t_ga, t_gb) = self.tail_hi.grad(alpha[n - 1], beta[n - 1]);
        ga[n - 1] += t_ga;
        gb[n - 1] += t_gb;
        total
    }

    pub fn j_only(&self, alpha: &[f64], beta: &[f64], da: &mut [f64], db: &mut [f64]) -> f64 {
        let n = alpha.len();
        self.derivative(alpha, da);
        self.derivative(beta, db);
        let c = &self.c;
        let mut total = 0.0;
        for i in 0..n {
            let (a, b, ap, bp) = (alpha[i], beta[i], da[i], db[i]);
            let ic2 = self.inv_c2[i];
            let is2 = self.inv_s2[i];
            let a2m = a * a - 1.0;
            let b2m = b * b - 1.0;
            total += self.w[i]
                * self.weight[i]
                * (c.c1 * ap * ap * ic2
                    + c.c2 * bp * bp * is2
                    + c.c3 * a * a * b * b * ic2 * is2
                    + c.c4 * a2m * a2m * ic2 * ic2
                    + c.c5 * b2m * b2m * is2 * is2);
        }
        total += self.tail_lo.value(alpha[0], beta[0]);
        total += self.tail_hi.value(alpha[n - 1], beta[n - 1]);
        total
    }

    /// Sup of the discrete Euler-Lagrange residual over all nodes, with the
    /// gradient entries converted by the row normalizations.
    fn residual_sup(&self, ga: &[f64], gb: &[f64], pinned: &[usize]) -> f64 {
        let mut sup = 0.0f64;
        let mut arg = 0usize;
        for i in 0..ga.len() {
            let ra = if pinned.contains(&(2 * i)) {
                0.0
            } else {
                ga[i] / self.norm_a[i]
            };
            let rb = if pinned.contains(&(2 * i + 1)) {
                0.0
            } else {
                gb[i] / self.norm_b[i]
            };
            if ra.abs() > sup { sup = ra.abs(); arg = 2 * i; }
            if rb.abs() > sup { sup = rb.abs(); arg = 2 * i + 1; }
        }
        let _ = arg;
        sup
    }

    /// Hessian of the discretized energy, interleaved `(a_0, b_0, a_1, ...)`,
    /// with pinned variables replaced by identity rows.
    fn hessian(&self, alpha: &[f64], beta: &[f64], pinned: &[usize]) -> BandedMatrix {
        let n = alpha.len();
        let c = &self.c;
        let mut h = BandedMatrix::zeros(2 * n, 5, 5);
        for i in 0..n {
            let (a, b) = (alpha[i], beta[i]);
            let ic2 = self.inv_c2[i];
            let is2 = self.inv_s2[i];
            let wu = self.w[i] * self.weight[i];
            let f_aa = wu * (2.0 * c.c3 * b * b * ic2 * is2 + c.c4 * (12.0 * a * a - 4.0) * ic2 * ic2);
            let f_bb = wu * (2.0 * c.c3 * a * a * ic2 * is2 + c.c5 * (12.0 * b * b - 4.0) * is2 * is2);
            let f_ab = wu * 4.0 * c.c3 * a * b * ic2 * is2;
            h.add(2 * i, 2 * i, f_aa);
            h.add(2 * i + 1, 2 * i + 1, f_bb);
            h.add(2 * i, 2 * i + 1, f_ab);
            h.add(2 * i + 1, 2 * i, f_ab);
            let f_apap = wu * 2.0 * c.c1 * ic2 * self.dnat[i] * self.dnat[i];
            let f_bpbp = wu * 2.0 * c.c2 * is2 * self.dnat[i] * self.dnat[i];
            let st = &self.stencils[i];
            for j1 in 0..3 {
                for j2 in 0..3 {
                    let k = st.start + j1;
                    let l = st.start + j2;
                    h.add(2 * k, 2 * l, f_apap * st.c1[j1] * st.c1[j2]);
                    h.add(2 * k + 1, 2 * l + 1, f_bpbp * st.c1[j1] * st.c1[j2]);
                }
            }
        }
        let (haa, hbb, hab) = self.tail_lo.hess(alpha[0], beta[0]);
        h.add(0, 0, haa);
        h.add(1, 1, hbb);
        h.add(0, 1, hab);
        h.add(1, 0, hab);
        let (haa, hbb, hab) = self.tail_hi.hess(alpha[n - 1], beta[n - 1]);
        h.add(2 * n - 2, 2 * n - 2, haa);
        h.add(2 * n - 1, 2 * n - 1, hbb);
        h.add(2 * n - 2, 2 * n - 1, hab);
        h.add(2 * n - 1, 2 * n - 2, hab);
        for &r in pinned {
            h.clear_row_to_identity(r);
        }
        h
    }
}

fn seed_profile(p: &JoinProblem, grid: &Grid, opts: &SolveOptions) -> Profile {
    let mut f = match opts.seed_profile {
        SeedProfile::LeviCivita | SeedProfile::Custom => Profile::levi_civita(grid.clone()),
        SeedProfile::Constant01 => Profile::constant(grid.clone(), 0.0, 1.0),
        SeedProfile::Constant10 => Profile::constant(grid.clone(), 1.0, 0.0),
    };
    f.boundary_alpha = (0.0, 1.0);
    f.boundary_beta = (1.0, 0.0);
    if opts.seed_perturbation != 0.0 {
        let mut rng = SplitMix64::new(opts.rng_seed);
        let (u1, u2, u3, u4) = (
            rng.uniform_symmetric(),
            rng.uniform_symmetric(),
            rng.uniform_symmetric(),
            rng.uniform_symmetric(),
        );
        let amp = opts.seed_perturbation;
        for (i, &t) in grid.nodes().iter().enumerate() {
            let bump1 = (2.0 * t).sin();
            let bump2 = (4.0 * t).sin();
            f.alpha[i] += amp * (u1 * bump1 + u2 * bump2) * t.sin() * t.cos();
            f.beta[i] += amp * (u3 * bump1 + u4 * bump2) * t.sin() * t.cos();
        }
    }
    let _ = p;
    f
}

/// Minimize `J` over profiles with the join boundary values; needs
/// `m1, m2 >= 2` and `mu1, mu2 > 0`.
pub fn minimize_join(p: &JoinProblem, opts: &SolveOptions) -> Result<(Profile, SolveReport)> {
    if p.mode() != ProblemMode::Main {
        return Err(Error::Problem(
            "minimize_join needs m2 >= 2 (use minimize_join_beta0_constrained for m2 = 1)".into(),
        ));
    }
    if !(p.mu1 > 0.0 && p.mu2 > 0.0) {
        return Err(Error::Problem("minimize_join needs mu1, mu2 > 0".into()));
    }
    minimize_common(p, opts, false)
}

/// The `m2 = 1` constrained minimization: `mu2 = 0`, `lambda2 = k^2`, with
/// `beta(0) = 1` enforced as a pinned endpoint value.
pub fn minimize_join_beta0_constrained(
    p: &JoinProblem,
    opts: &SolveOptions,
) -> Result<(Profile, SolveReport)> {
    if p.mode() != ProblemMode::ConstrainedBeta {
        return Err(Error::Problem(
            "constrained solver needs m2 = 1, mu2 = 0".into(),
        ));
    }
    if !(p.mu1 > 0.0) {
        return Err(Error::Problem("constrained solver needs mu1 > 0".into()));
    }
    let k = p.lambda2.sqrt();
    if (k - k.round()).abs() > 1e-9 || k.round() < 1.0 {
        return Err(Error::Problem(
            "constrained solver needs lambda2 = k^2 for a nonzero integer k".into(),
        ));
    }
    minimize_common(p, opts, true)
}

fn minimize_common(
    p: &JoinProblem,
    opts: &SolveOptions,
    pin_beta0: bool,
) -> Result<(Profile, SolveReport)> {
    let grid = opts.grid.build(Domain::Join)?;
    let n = grid.len();
    let mut f = seed_profile(p, &grid, opts);
    if pin_beta0 {
        f.beta[0] = 1.0;
    }
    let seed_energy = evaluate_j(p, &f);
    if !seed_energy.is_finite() {
        return Err(Error::Solver("seed profile has infinite energy".into()));
    }

    let ws = JoinWorkspace::new(p, grid.clone(), f.boundary_alpha, f.boundary_beta);
    let mut alpha = f.alpha.clone();
    let mut beta = f.beta.clone();
    project(&mut alpha, &mut beta, pin_beta0);
    let mut da = vec![0.0; n];
    let mut db = vec![0.0; n];
    let mut ga = vec![0.0; n];
    let mut gb = vec![0.0; n];
    let mut messages = Vec::new();

    // --- projected gradient descent with BB steps and monotone line search
    let mut jval = ws.j_and_grad(&alpha, &beta, &mut da, &mut db, &mut ga, &mut gb);
    if pin_beta0 {
        gb[0] = 0.0;
    }
    let mut step = 1e-3;
    let mut prev_alpha = alpha.clone();
    let mut prev_beta = beta.clone();
    let mut prev_ga = ga.clone();
    let mut prev_gb = gb.clone();
    let mut gd_iterations = 0;
    let gd_target = opts.gradient_tolerance.max(1e-8);
    let mut have_prev = false;

    let gd_cap = opts.max_iterations.min(1500);
    while gd_iterations < gd_cap {
        let sup_g = sup_abs2(&ga, &gb);
        if sup_g <= gd_target {
            break;
        }
        if have_prev {
            // BB1 step from the last accepted move
            let mut ss = 0.0;
            let mut sy = 0.0;
            for i in 0..n {
                let sa = alpha[i] - prev_alpha[i];
                let sb = beta[i] - prev_beta[i];
                ss += sa * sa + sb * sb;
                sy += sa * (ga[i] - prev_ga[i]) + sb * (gb[i] - prev_gb[i]);
            }
            if sy > 1e-300 {
                step = (ss / sy).clamp(1e-12, 1e3);
            }
        }
        prev_alpha.copy_from_slice(&alpha);
        prev_beta.copy_from_slice(&beta);
        prev_ga.copy_from_slice(&ga);
        prev_gb.copy_from_slice(&gb);
        let j_old = jval;
        let mut accepted = false;
        let mut trial_step = step;
        for _ in 0..60 {
            let mut ta: Vec<f64> = (0..n).map(|i| alpha[i] - trial_step * ga[i]).collect();
            let mut tb: Vec<f64> = (0..n).map(|i| beta[i] - trial_step * gb[i]).collect();
            project(&mut ta, &mut tb, pin_beta0);
            let j_new = ws.j_only(&ta, &tb, &mut da, &mut db);
            // Armijo decrease against the projected move
            let mut gdx = 0.0;
            for i in 0..n {
                gdx += ga[i] * (alpha[i] - ta[i]) + gb[i] * (beta[i] - tb[i]);
            }
            if j_new <= j_old - 1e-4 * gdx || (j_new < j_old && gdx >= 0.0) {
                alpha = ta;
                beta = tb;
                jval = j_new;
                accepted = true;
                break;
            }
            trial_step /= 2.0;
        }
        gd_iterations += 1;
        if !accepted {
            // no descent direction at line-search resolution; hand to Newton
            break;
        }
        jval = ws.j_and_grad(&alpha, &beta, &mut da, &mut db, &mut ga, &mut gb);
        if pin_beta0 {
            gb[0] = 0.0;
        }
        have_prev = true;
    }

    // --- Newton polish of the discrete Euler-Lagrange system, iterated in
    // residual units (gradient entries scaled by the row normalizations, so
    // the far-end equations carry the same weight as the center ones)
    let pinned: Vec<usize> = if pin_beta0 { vec![1] } else { vec![] };
    let mut newton_iterations = 0;
    let mut r_sup = ws.residual_sup(&ga, &gb, &pinned);
    let newton_target = (opts.residual_tolerance * 1e-2).min(1e-10);
    for _ in 0..80 {
        if r_sup <= newton_target {
            break;
        }
        let mut h = ws.hessian(&alpha, &beta, &pinned);
        let mut rhs = vec![0.0; 2 * n];
        for i in 0..n {
            rhs[2 * i] = -ga[i] / ws.norm_a[i];
            rhs[2 * i + 1] = -gb[i] / ws.norm_b[i];
            h.scale_row(2 * i, 1.0 / ws.norm_a[i]);
            h.scale_row(2 * i + 1, 1.0 / ws.norm_b[i]);
        }
        for &r in &pinned {
            rhs[r] = 0.0;
            h.clear_row_to_identity(r);
        }
        if !h.solve_in_place(&mut rhs, 1e-300) {
            messages.push("newton: singular Hessian, stopping polish".into());
            break;
        }
        let mut damp = 1.0;
        let mut improved = false;
        for _ in 0..30 {
            let ta: Vec<f64> = (0..n).map(|i| alpha[i] + damp * rhs[2 * i]).collect();
            let tb: Vec<f64> = (0..n).map(|i| beta[i] + damp * rhs[2 * i + 1]).collect();
            let jt = ws.j_and_grad(&ta, &tb, &mut da, &mut db, &mut ga, &mut gb);
            if pin_beta0 {
                gb[0] = 0.0;
            }
            let r_new = ws.residual_sup(&ga, &gb, &pinned);
            if r_new < r_sup || r_new <= newton_target {
                alpha = ta;
                beta = tb;
                jval = jt;
                r_sup = r_new;
                improved = true;
                break;
            }
            damp /= 2.0;
        }
        newton_iterations += 1;
        if !improved {
            // restore gradient at the current iterate before reporting
            jval = ws.j_and_grad(&alpha, &beta, &mut da, &mut db, &mut ga, &mut gb);
            if pin_beta0 {
                gb[0] = 0.0;
            }
            messages.push("newton: no further progress".into());
            break;
        }
    }
    let _ = jval;
    let g_sup = sup_abs2(&ga, &gb);

    // --- final report
    let solved = Profile::new(
        grid.clone(),
        alpha,
        beta,
        ws.boundary_alpha,
        ws.boundary_beta,
    )?;
    let n_nodes = solved.len();
    let mut r1 = vec![0.0; n_nodes];
    let mut r2 = vec![0.0; n_nodes];
    for i in 0..n_nodes {
        r1[i] = -ga[i] / ws.norm_a[i];
        r2[i] = if pin_beta0 && i == 0 { 0.0 } else { -gb[i] / ws.norm_b[i] };
    }
    let residual_sup = buffered_sup(&r1, &r2, RESIDUAL_BUFFER);
    let energy = evaluate_j(p, &solved);
    let classification = classify_profile(&solved);
    let converged = residual_sup <= opts.residual_tolerance && energy.is_finite();

    let constants = classify_constant_solutions(p, &grid);
    if constants.zero_above_01 == Some(false) || constants.zero_above_10 == Some(false) {
        messages.push("warning: J(0,0) not above both finite constant energies".into());
    }
    if classification == Classification::NonconstantJoin {
        let (lo_a, hi_a) = value_range(&solved.alpha);
        let (lo_b, hi_b) = value_range(&solved.beta);
        messages.push(format!(
            "interior ranges: alpha in ({lo_a:.3e}, {:.6}), beta in ({lo_b:.3e}, {:.6})",
            hi_a, hi_b
        ));
    }

    let report = SolveReport {
        converged,
        j_value: energy.total(),
        el_residual_sup: residual_sup,
        residual_buffer: RESIDUAL_BUFFER,
        residual_tolerance: opts.residual_tolerance,
        boundary: Some(ode::boundary_report(p, &solved, BoundaryTolerances::default())),
        iterations: gd_iterations + newton_iterations,
        classification,
        details: MethodDetails::Minimize {
            gd_iterations,
            newton_iterations,
            final_gradient_sup: g_sup,
            beta_zero_pinned: pin_beta0,
        },
        range_alpha: value_range(&solved.alpha),
        range_beta: value_range(&solved.beta),
        messages,
    };
    Ok((solved, report))
}

fn project(alpha: &mut [f64], beta: &mut [f64], pin_beta0: bool) {
    for v in alpha.iter_mut().chain(beta.iter_mut()) {
        *v = truncate_value(*v);
    }
    if pin_beta0 {
        beta[0] = 1.0;
    }
}

fn sup_abs2(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .chain(b.iter())
        .fold(0.0f64, |m, v| m.max(v.abs()))
}

pub(crate) fn buffered_sup(r1: &[f64], r2: &[f64], buffer: usize) -> f64 {
    let n = r1.len();
    if n <= 2 * buffer {
        return f64::INFINITY;
    }
    (buffer..n - buffer)
        .map(|i| r1[i].abs().max(r2[i].abs()))
        .fold(0.0f64, f64::max)
}
