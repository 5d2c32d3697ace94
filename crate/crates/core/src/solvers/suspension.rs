//! Nodal shooting for the suspension equation.
//!
//! In the coordinate `s = artanh(sin t)` the equation becomes
//! `A'' = (m1 - 3) tanh(s) A' + mu1 (A^3 - A)`, shot from `A(0) = 0`,
//! `A'(0) = p > 0` and reflected oddly. Trajectories either cross `|A| = 1`
//! and blow up, or converge to one of the saddles `+-1`; the map
//! `p -> (interior zeros, escape side)` is piecewise constant with bands
//! `up-0 | down-1 | up-2 | ...` in decreasing `p`. The branch with nodal
//! index `k` is the boundary trajectory between the bands with `k` and
//! `k + 1` zeros: it converges to `(-1)^k` after exactly `k` interior sign
//! changes, and `(-1)^k` times its odd reflection solves the boundary value
//! problem. Bisection on the zero count pins the boundary to full floating
//! precision, which keeps the trajectory on the connection well past the
//! output grid.

use super::{value_range, Classification, MethodDetails, SolveOptions, SolveReport, RESIDUAL_BUFFER};
use crate::damping;
use crate::exact::Scalar;
use crate::functional::{evaluate_j_suspension, SuspensionProblem};
use crate::grid::Domain;
use crate::numerics::{integrate_dp54, AdaptiveOptions, IntegrationTrace};
use crate::profile::SuspensionProfile;
use crate::solvers::minimize::buffered_sup;
use crate::{Error, Result};

/// Escape threshold: beyond `|A| = 1 + delta` with outward velocity the
/// trajectory cannot return.
const ESCAPE: f64 = 1.25;
/// Integration horizon for outcome classification.
const S_CLASSIFY: f64 = 60.0;
/// Scan resolution over the shooting box.
const SCAN_POINTS: usize = 240;

fn rhs(m1: u32, mu1: f64) -> impl Fn(f64, &[f64; 2]) -> [f64; 2] {
    let c = m1 as f64 - 3.0;
    move |s: f64, y: &[f64; 2]| [y[1], c * s.tanh() * y[1] + mu1 * (y[0] * y[0] * y[0] - y[0])]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Outcome {
    zeros: u32,
    /// +1 escaped upward, -1 downward, 0 no escape before the horizon
    escape: i8,
}

fn classify(m1: u32, mu1: f64, p: f64) -> Outcome {
    let f = rhs(m1, mu1);
    let mut zeros = 0u32;
    let mut prev_sign = 0i8;
    let opts = AdaptiveOptions {
        rel_tol: 1e-10,
        abs_tol: 1e-14,
        initial_step: 1e-3,
        ..AdaptiveOptions::default()
    };
    let trace = integrate_dp54(&f, 0.0, S_CLASSIFY, [0.0, p], &opts, &mut |_, y| {
        y[0].abs() > ESCAPE
    });
    for step in &trace.steps {
        // a tangential touch of zero is not a crossing
        let sg = if step.y1[0] > 0.0 {
            1i8
        } else if step.y1[0] < 0.0 {
            -1
        } else {
            0
        };
        if sg != 0 {
            if prev_sign != 0 && sg != prev_sign {
                zeros += 1;
            }
            prev_sign = sg;
        }
    }
    let (_, y_end) = trace.end_state();
    let escape = if y_end[0] > ESCAPE {
        1
    } else if y_end[0] < -ESCAPE {
        -1
    } else {
        0
    };
    Outcome { zeros, escape }
}

/// Integrate the bisected boundary trajectory and keep the dense trace.
fn trajectory(m1: u32, mu1: f64, p: f64, s_end: f64) -> IntegrationTrace<2> {
    let f = rhs(m1, mu1);
    let opts = AdaptiveOptions {
        rel_tol: 1e-12,
        abs_tol: 1e-16,
        initial_step: 1e-4,
        ..AdaptiveOptions::default()
    };
    integrate_dp54(&f, 0.0, s_end, [0.0, p], &opts, &mut |_, y| {
        y[0].abs() > ESCAPE
    })
}

/// Find the suspension solution with `nodal_index` interior sign changes on
/// `(0, pi/2)`. Existence is pre-screened by the analytic thresholds
/// (advisory only); absence of a scan bracket returns `BranchNotFound`.
pub fn solve_suspension(
    sp: &SuspensionProblem,
    nodal_index: u32,
    opts: &SolveOptions,
) -> Result<(SuspensionProfile, SolveReport)> {
    if !(sp.mu1 > 0.0) {
        return Err(Error::Problem("suspension shooting needs mu1 > 0".into()));
    }
    let grid = opts.grid.build(Domain::Suspension)?;
    let screen = damping::check_suspension(sp.m1, &Scalar::Approx(sp.mu1))?;
    let mut messages = vec![format!(
        "thresholds: minimizer {} (mu1 - (m1-3) = {:+.4}), countably-many {}",
        screen.satisfied,
        sp.mu1 - (sp.m1 as f64 - 3.0),
        screen.countably_many().unwrap_or(false),
    )];

    // scan the shooting box for the bands around branch `nodal_index`
    let (lo, hi) = opts.shooting_box;
    if !(lo > 0.0 && hi > lo) {
        return Err(Error::Problem("invalid shooting box".into()));
    }
    let k = nodal_index;
    let mut p_hi: Option<f64> = None; // smallest p with zeros <= k
    let mut p_lo: Option<f64> = None; // largest p with zeros >= k+1 below p_hi
    for i in (0..SCAN_POINTS).rev() {
        let p = lo * (hi / lo).powf(i as f64 / (SCAN_POINTS - 1) as f64);
        let out = classify(sp.m1, sp.mu1, p);
        if out.zeros <= k {
            p_hi = Some(p);
        } else if p_hi.is_some() {
            p_lo = Some(p);
            break;
        }
    }
    let (mut a, mut b) = match (p_lo, p_hi) {
        (Some(a), Some(b)) => (a, b),
        _ => {
            return Err(Error::BranchNotFound(format!(
                "no bracket for nodal index {k} in the shooting box [{lo:.3e}, {hi:.3e}]; {}",
                messages[0]
            )))
        }
    };
    // bisect the predicate "zeros <= k" toward the band boundary; the last
    // few digits are left to the matching Newton below
    let mut bisections = 0;
    while (b - a) > 1e-8 * b {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        let out = classify(sp.m1, sp.mu1, mid);
        if out.zeros <= k {
            b = mid;
        } else {
            a = mid;
        }
        bisections += 1;
    }
    let p_bisect = 0.5 * (a + b);
    let target = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
    let s_end = opts.grid.s_max.max(12.0);

    // two-sided matching: the bisected trajectory tracks the connection
    // until the saddle's unstable rate amplifies the remaining parameter
    // error, so match (A, A') at an interior point against the decaying
    // saddle mode A = tau (1 - a e^{g(s - s_end)}).
    let gamma_minus = -crate::ode::suspension_exponent(sp.m1, sp.mu1);
    let probe = trajectory(sp.m1, sp.mu1, p_bisect, s_end);
    let mut s_mid = f64::NAN;
    {
        let mut zeros = 0u32;
        let mut prev_sign = 0i8;
        for step in &probe.steps {
            let sg = if step.y1[0] > 0.0 { 1i8 } else if step.y1[0] < 0.0 { -1 } else { 0 };
            if sg != 0 {
                if prev_sign != 0 && sg != prev_sign {
                    zeros += 1;
                }
                prev_sign = sg;
            }
            if zeros == k && (step.y1[0] - target).abs() < 0.3 {
                s_mid = step.x1;
                break;
            }
        }
    }
    if !s_mid.is_finite() {
        return Err(Error::BranchNotFound(format!(
            "bisection bracketed p = {p_bisect:.12e} but the trajectory never approaches \
             {target} after {k} sign changes; {}",
            messages[0]
        )));
    }
    let s_mid = (s_mid + 1.0).min(s_end - 1.0).max(1.0);

    let left_of = |p: f64| {
        let f = rhs(sp.m1, sp.mu1);
        let o = AdaptiveOptions {
            rel_tol: 1e-12,
            abs_tol: 1e-16,
            initial_step: 1e-4,
            ..AdaptiveOptions::default()
        };
        integrate_dp54(&f, 0.0, s_mid, [0.0, p], &o, &mut |_, _| false)
    };
    // right half integrates the deviation abar = 1 - tau A exactly, so
    // saddle-tail amplitudes far below one ulp of 1.0 stay resolvable
    let c_damp = sp.m1 as f64 - 3.0;
    let mu1 = sp.mu1;
    let right_of = move |amp: f64| {
        let f = move |s: f64, y: &[f64; 2]| {
            [
                y[1],
                c_damp * s.tanh() * y[1] + mu1 * y[0] * (1.0 - y[0]) * (2.0 - y[0]),
            ]
        };
        let o = AdaptiveOptions {
            rel_tol: 1e-12,
            abs_tol: 1e-30,
            initial_step: 1e-4,
            ..AdaptiveOptions::default()
        };
        let y0 = [amp, gamma_minus * amp];
        integrate_dp54(&f, s_end, s_mid, y0, &o, &mut |_, _| false)
    };
    let mismatch = |p: f64, amp: f64| -> [f64; 2] {
        let (_, yl) = left_of(p).end_state();
        let (_, yr) = right_of(amp).end_state();
        // A_right = tau (1 - abar), A'_right = -tau abar'
        [yl[0] - target * (1.0 - yr[0]), yl[1] + target * yr[1]]
    };

    let mut pp = p_bisect;
    let (_, y_mid) = left_of(pp).end_state();
    let mut amp = (1.0 - target * y_mid[0]).abs().max(1e-300)
        * (gamma_minus * (s_end - s_mid)).exp();
    let mut m = mismatch(pp, amp);
    let mut m_norm = m[0].abs().max(m[1].abs());
    let mut newton_ok = false;
    for _ in 0..40 {
        if m_norm <= 1e-12 {
            newton_ok = true;
            break;
        }
        let hp = 1e-7 * pp.abs();
        let ha = 1e-7 * amp.abs();
        let mp = mismatch(pp + hp, amp);
        let ma = mismatch(pp, amp + ha);
        let j00 = (mp[0] - m[0]) / hp;
        let j10 = (mp[1] - m[1]) / hp;
        let j01 = (ma[0] - m[0]) / ha;
        let j11 = (ma[1] - m[1]) / ha;
        let det = j00 * j11 - j01 * j10;
        if det.abs() < 1e-300 {
            break;
        }
        let dp = (-m[0] * j11 + m[1] * j01) / det;
        let da = (-j00 * m[1] + j10 * m[0]) / det;
        let mut damp = 1.0;
        let mut improved = false;
        for _ in 0..30 {
            let pt = pp + damp * dp;
            let at = amp + damp * da;
            let mt = mismatch(pt, at);
            let nt = mt[0].abs().max(mt[1].abs());
            if nt < m_norm {
                pp = pt;
                amp = at;
                m = mt;
                m_norm = nt;
                improved = true;
                break;
            }
            damp /= 2.0;
        }
        if !improved {
            break;
        }
    }
    if m_norm <= 1e-10 {
        newton_ok = true;
    }
    if !newton_ok {
        return Err(Error::BranchNotFound(format!(
            "matching Newton stalled at mismatch {m_norm:.3e} for nodal index {k} \
             (p = {pp:.12e}); {}",
            messages[0]
        )));
    }
    let p_star = pp;
    let boundary_residual = m_norm;

    // verify the left half still makes exactly k sign changes
    let left = left_of(p_star);
    let mut zeros = 0u32;
    let mut prev_sign = 0i8;
    for step in &left.steps {
        let sg = if step.y1[0] > 0.0 { 1i8 } else if step.y1[0] < 0.0 { -1 } else { 0 };
        if sg != 0 {
            if prev_sign != 0 && sg != prev_sign {
                zeros += 1;
            }
            prev_sign = sg;
        }
    }
    if zeros != k {
        return Err(Error::BranchNotFound(format!(
            "matched trajectory has {zeros} interior sign changes, wanted {k}"
        )));
    }
    let right = right_of(amp);

    // build the odd profile alpha(s) = sign(s) (-1)^k T(|s|)
    let n = grid.len();
    let mut alpha = vec![0.0; n];
    for i in 0..n {
        let s = grid.log_coordinate(i);
        let sa = s.abs();
        let value = if sa <= s_mid {
            left.eval(sa)[0]
        } else {
            target * (1.0 - right.eval(sa)[0])
        };
        alpha[i] = s.signum() * target * value;
    }
    let solved = SuspensionProfile::new(grid.clone(), alpha, (-1.0, 1.0))?;

    // grid-derivative residual in the native coordinate, informational
    let res = crate::ode::grid_suspension_residuals(sp.m1, sp.mu1, &solved);
    let residual_sup = buffered_sup(&res, &res, RESIDUAL_BUFFER);
    let energy = evaluate_j_suspension(sp, &solved);
    let alpha_prime_zero = target * p_star;
    let converged = boundary_residual <= 1e-8 && residual_sup <= opts.residual_tolerance;
    messages.push(format!(
        "alpha'(0) = {alpha_prime_zero:.12}, matching mismatch {boundary_residual:.3e}, \
         saddle tail amplitude {amp:.3e} at s = {s_end}"
    ));

    let report = SolveReport {
        converged,
        j_value: energy.total(),
        el_residual_sup: residual_sup,
        residual_buffer: RESIDUAL_BUFFER,
        residual_tolerance: opts.residual_tolerance,
        boundary: None,
        iterations: bisections,
        classification: Classification::SuspensionNodal(k),
        details: MethodDetails::SuspensionShoot {
            bisections,
            shooting_parameter: p_star,
            alpha_prime_zero,
            boundary_residual,
            s_max: s_end,
        },
        range_alpha: value_range(&solved.alpha),
        range_beta: (0.0, 0.0),
        messages,
    };
    Ok((solved, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solvers::GridSpec;

    fn opts(nodes: usize) -> SolveOptions {
        SolveOptions {
            grid: GridSpec {
                nodes,
                ..GridSpec::default()
            },
            // grid-FD residual figure for the 512-node test grids
            residual_tolerance: 1e-2,
            ..SolveOptions::suspension()
        }
    }

    #[test]
    fn identity_m4_nodal_zero_is_sine() {
        let sp = SuspensionProblem::custom(4, 4.0, 3.0).unwrap();
        let (f, rep) = solve_suspension(&sp, 0, &opts(512)).unwrap();
        assert!(rep.converged, "{:?}", rep.messages);
        match rep.details {
            MethodDetails::SuspensionShoot {
                shooting_parameter,
                boundary_residual,
                ..
            } => {
                assert!(
                    (shooting_parameter - 1.0).abs() < 1e-9,
                    "p = {shooting_parameter}"
                );
                assert!(boundary_residual < 1e-8);
            }
            _ => panic!("wrong details"),
        }
        for (i, &t) in f.grid.nodes().iter().enumerate() {
            assert!(
                (f.alpha[i] - t.sin()).abs() < 3e-7,
                "node {i}: {} vs {}",
                f.alpha[i],
                t.sin()
            );
        }
    }

    #[test]
    fn identity_m4_nodal_one_oscillates() {
        let sp = SuspensionProblem::custom(4, 4.0, 3.0).unwrap();
        let (f, rep) = solve_suspension(&sp, 1, &opts(512)).unwrap();
        assert!(rep.converged, "{:?}", rep.messages);
        let p1 = match rep.details {
            MethodDetails::SuspensionShoot {
                shooting_parameter, ..
            } => shooting_parameter,
            _ => unreachable!(),
        };
        assert!(p1 < 1.0 && p1 > 0.0);
        // one interior sign change on (0, pi/2)
        let zeros = f
            .alpha
            .windows(2)
            .zip(f.grid.nodes().windows(2))
            .filter(|(w, ts)| ts[0] > 0.0 && w[0] * w[1] < 0.0)
            .count();
        assert_eq!(zeros, 1, "profile should oscillate once on (0, pi/2)");
        // still hits the boundary values
        assert!((f.alpha[f.len() - 1] - 1.0).abs() < 1e-4);
    }

    #[test]
    fn node_case_reports_branch_not_found() {
        // m1 = 6, mu1 = 2 < (m1-3)^2/4: no oscillation, no branches
        let sp = SuspensionProblem::custom(6, 6.0, 2.0).unwrap();
        match solve_suspension(&sp, 0, &opts(256)) {
            Err(Error::BranchNotFound(_)) => {}
            other => panic!("expected BranchNotFound, got {other:?}"),
        }
    }
}
