//! Shared numerical kernels: a deterministic RNG, a banded LU solver for the
//! Newton polish, a Sturm-sequence bisection for tridiagonal eigenvalues,
//! and an adaptive Dormand-Prince 5(4) integrator with dense output.

/// SplitMix64: tiny deterministic generator, identical across platforms.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    /// Uniform in `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `(-1, 1)`.
    pub fn uniform_symmetric(&mut self) -> f64 {
        2.0 * self.uniform() - 1.0
    }
}

/// General banded matrix with `kl` sub- and `ku` super-diagonals, stored in
/// LAPACK-style band layout with `kl` extra rows for pivot fill-in.
pub struct BandedMatrix {
    n: usize,
    kl: usize,
    ku: usize,
    /// data[row][j] holds A[i][j] at row = kl + ku + i - j.
    data: Vec<f64>,
}

impl BandedMatrix {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        // 2 kl + ku + 1 rows: kl extra for pivot fill-in
        BandedMatrix {
            n,
            kl,
            ku,
            data: vec![0.0; (2 * kl + ku + 1) * n],
        }
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        let r = self.kl + self.ku + i - j;
        r * self.n + j
    }

    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        debug_assert!(j.max(i) - j.min(i) <= self.kl.max(self.ku));
        debug_assert!(i <= j + self.kl && j <= i + self.ku);
        let k = self.idx(i, j);
        self.data[k] += v;
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if i <= j + self.kl && j <= i + self.ku + self.kl {
            self.data[self.idx(i, j)]
        } else {
            0.0
        }
    }

    /// Multiply row `i` by a factor (within the assembly band).
    pub fn scale_row(&mut self, i: usize, factor: f64) {
        let lo = i.saturating_sub(self.kl);
        let hi = (i + self.ku).min(self.n - 1);
        for j in lo..=hi {
            let v = self.get(i, j);
            if v != 0.0 {
                self.set(i, j, v * factor);
            }
        }
    }

    /// Replace row `i` by an identity row (pins variable `i`).
    pub fn clear_row_to_identity(&mut self, i: usize) {
        let lo = i.saturating_sub(self.kl);
        let hi = (i + self.ku).min(self.n - 1);
        for j in lo..=hi {
            self.set(i, j, if i == j { 1.0 } else { 0.0 });
        }
    }

    /// Solve `A x = b` in place by banded Gaussian elimination with partial
    /// pivoting. Returns false when a pivot falls below `tiny`.
    pub fn solve_in_place(&mut self, b: &mut [f64], tiny: f64) -> bool {
        let n = self.n;
        let kl = self.kl;
        let ku = self.ku;
        for k in 0..n {
            // pivot search within the column band
            let last = (k + kl).min(n - 1);
            let mut piv = k;
            let mut pmax = self.get(k, k).abs();
            for i in k + 1..=last {
                let v = self.get(i, k).abs();
                if v > pmax {
                    pmax = v;
                    piv = i;
                }
            }
            if pmax < tiny {
                return false;
            }
            if piv != k {
                // swap rows k and piv across the accessible band
                let jmax = (k + ku + kl).min(n - 1);
                for j in k..=jmax {
                    let a = self.get(k, j);
                    let bkj = self.get(piv, j);
                    self.set(k, j, bkj);
                    self.set(piv, j, a);
                }
                b.swap(k, piv);
            }
            let pivot = self.get(k, k);
            for i in k + 1..=last {
                let m = self.get(i, k) / pivot;
                if m != 0.0 {
                    let jmax = (k + ku + kl).min(n - 1);
                    for j in k..=jmax {
                        let v = self.get(k, j);
                        if v != 0.0 {
                            let cur = self.get(i, j);
                            self.set(i, j, cur - m * v);
                        }
                    }
                    b[i] -= m * b[k];
                }
            }
        }
        // back substitution
        for k in (0..n).rev() {
            let jmax = (k + ku + kl).min(n - 1);
            let mut acc = b[k];
            for j in k + 1..=jmax {
                acc -= self.get(k, j) * b[j];
            }
            b[k] = acc / self.get(k, k);
        }
        true
    }

    fn set(&mut self, i: usize, j: usize, v: f64) {
        let k = self.idx(i, j);
        self.data[k] = v;
    }
}

/// Smallest eigenvalue of the generalized symmetric tridiagonal problem
/// `K x = theta M x` with `M = diag(mass) > 0`, via the standard reduction
/// `B = M^{-1/2} K M^{-1/2}` and Sturm-sequence bisection.
pub fn tridiag_smallest_generalized_eig(diag: &[f64], off: &[f64], mass: &[f64]) -> f64 {
    let n = diag.len();
    assert_eq!(off.len(), n - 1);
    assert_eq!(mass.len(), n);
    let inv_sqrt: Vec<f64> = mass.iter().map(|&m| 1.0 / m.sqrt()).collect();
    let d: Vec<f64> = (0..n).map(|i| diag[i] * inv_sqrt[i] * inv_sqrt[i]).collect();
    let e: Vec<f64> = (0..n - 1)
        .map(|i| off[i] * inv_sqrt[i] * inv_sqrt[i + 1])
        .collect();

    // Gershgorin bounds
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let r = if i == 0 {
            e[0].abs()
        } else if i == n - 1 {
            e[n - 2].abs()
        } else {
            e[i - 1].abs() + e[i].abs()
        };
        lo = lo.min(d[i] - r);
        hi = hi.max(d[i] + r);
    }

    // count of eigenvalues below x by the Sturm sequence (LDL^T pivots)
    let count_below = |x: f64| -> usize {
        let mut count = 0;
        let mut q = d[0] - x;
        if q < 0.0 {
            count += 1;
        }
        for i in 1..n {
            let denom = if q.abs() < 1e-300 { 1e-300f64.copysign(q) } else { q };
            q = d[i] - x - e[i - 1] * e[i - 1] / denom;
            if q < 0.0 {
                count += 1;
            }
        }
        count
    };

    let mut a = lo;
    let mut b = hi;
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if count_below(m) >= 1 {
            b = m;
        } else {
            a = m;
        }
        if (b - a).abs() <= 1e-14 * (1.0 + a.abs().max(b.abs())) {
            break;
        }
    }
    0.5 * (a + b)
}

/// One recorded step of an integration, enough for cubic Hermite evaluation
/// anywhere inside the step.
#[derive(Debug, Clone, Copy)]
pub struct DenseStep<const D: usize> {
    pub x0: f64,
    pub x1: f64,
    pub y0: [f64; D],
    pub y1: [f64; D],
    pub f0: [f64; D],
    pub f1: [f64; D],
}

impl<const D: usize> DenseStep<D> {
    pub fn eval(&self, x: f64) -> [f64; D] {
        let h = self.x1 - self.x0;
        let u = (x - self.x0) / h;
        let u2 = u * u;
        let u3 = u2 * u;
        let h00 = 2.0 * u3 - 3.0 * u2 + 1.0;
        let h10 = u3 - 2.0 * u2 + u;
        let h01 = -2.0 * u3 + 3.0 * u2;
        let h11 = u3 - u2;
        let mut out = [0.0; D];
        for k in 0..D {
            out[k] = h00 * self.y0[k] + h10 * h * self.f0[k] + h01 * self.y1[k] + h11 * h * self.f1[k];
        }
        out
    }
}

/// Trace of an adaptive integration with dense-output records.
pub struct IntegrationTrace<const D: usize> {
    pub steps: Vec<DenseStep<D>>,
}

impl<const D: usize> IntegrationTrace<D> {
    pub fn end_state(&self) -> (f64, [f64; D]) {
        let last = self.steps.last().expect("nonempty trace");
        (last.x1, last.y1)
    }

    /// Evaluate at `x`, which must lie inside the integrated range.
    pub fn eval(&self, x: f64) -> [f64; D] {
        let first = self.steps.first().expect("nonempty trace");
        let forward = self.steps.last().unwrap().x1 >= first.x0;
        let pos = self.steps.partition_point(|s| {
            if forward {
                s.x1 < x
            } else {
                s.x1 > x
            }
        });
        let idx = pos.min(self.steps.len() - 1);
        self.steps[idx].eval(x)
    }
}

/// Dormand-Prince 5(4) coefficients.
const DP_C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const DP_A: [[f64; 6]; 7] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const DP_E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

pub struct AdaptiveOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_steps: usize,
    /// Stop early when this returns true (checked after each accepted step).
    pub initial_step: f64,
}

impl Default for AdaptiveOptions {
    fn default() -> Self {
        AdaptiveOptions {
            rel_tol: 1e-12,
            abs_tol: 1e-14,
            max_steps: 2_000_000,
            initial_step: 1e-3,
        }
    }
}

/// Integrate `y' = f(x, y)` from `x0` to `x1` (either direction), recording
/// dense-output steps. `stop` can terminate the run early; the trace still
/// ends at the last accepted step.
pub fn integrate_dp54<const D: usize>(
    f: &dyn Fn(f64, &[f64; D]) -> [f64; D],
    x0: f64,
    x1: f64,
    y0: [f64; D],
    opts: &AdaptiveOptions,
    stop: &mut dyn FnMut(f64, &[f64; D]) -> bool,
) -> IntegrationTrace<D> {
    let dir = if x1 >= x0 { 1.0 } else { -1.0 };
    let mut h = opts.initial_step.abs().max(1e-12) * dir;
    let mut x = x0;
    let mut y = y0;
    let mut fy = f(x, &y);
    let mut steps = Vec::new();
    let mut k = [[0.0; D]; 7];

    for _ in 0..opts.max_steps {
        if (x1 - x) * dir <= 0.0 {
            break;
        }
        if (x + h - x1) * dir > 0.0 {
            h = x1 - x;
        }
        k[0] = fy;
        for stage in 1..7 {
            let mut ys = y;
            for j in 0..stage {
                let a = DP_A[stage][j];
                if a != 0.0 {
                    for d in 0..D {
                        ys[d] += h * a * k[j][d];
                    }
                }
            }
            k[stage] = f(x + DP_C[stage] * h, &ys);
        }
        // 5th-order solution is the 7th stage combination (FSAL)
        let mut ynew = y;
        for j in 0..6 {
            let a = DP_A[6][j];
            if a != 0.0 {
                for d in 0..D {
                    ynew[d] += h * a * k[j][d];
                }
            }
        }
        let mut err: f64 = 0.0;
        for d in 0..D {
            let mut e = 0.0;
            for j in 0..7 {
                e += DP_E[j] * k[j][d];
            }
            e *= h;
            let sc = opts.abs_tol + opts.rel_tol * y[d].abs().max(ynew[d].abs());
            err = err.max((e / sc).abs());
        }
        if err <= 1.0 {
            let fnew = k[6]; // FSAL: k7 = f(x+h, ynew)
            steps.push(DenseStep {
                x0: x,
                x1: x + h,
                y0: y,
                y1: ynew,
                f0: fy,
                f1: fnew,
            });
            x += h;
            y = ynew;
            fy = fnew;
            if stop(x, &y) {
                break;
            }
        }
        let factor = if err > 0.0 {
            (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
        } else {
            5.0
        };
        h *= factor;
        if h.abs() < 1e-15 {
            break;
        }
    }
    if steps.is_empty() {
        // degenerate zero-length request: record a trivial step
        steps.push(DenseStep {
            x0,
            x1: x0,
            y0,
            y1: y0,
            f0: fy,
            f1: fy,
        });
    }
    IntegrationTrace { steps }
}

/// Solve a small dense linear system by Gaussian elimination with partial
/// pivoting; returns false on (near-)singularity.
pub fn solve_dense(a: &mut [Vec<f64>], b: &mut [f64], tiny: f64) -> bool {
    let n = b.len();
    for k in 0..n {
        let mut piv = k;
        let mut pmax = a[k][k].abs();
        for i in k + 1..n {
            if a[i][k].abs() > pmax {
                pmax = a[i][k].abs();
                piv = i;
            }
        }
        if pmax < tiny {
            return false;
        }
        a.swap(k, piv);
        b.swap(k, piv);
        for i in k + 1..n {
            let m = a[i][k] / a[k][k];
            if m != 0.0 {
                for j in k..n {
                    a[i][j] -= m * a[k][j];
                }
                b[i] -= m * b[k];
            }
        }
    }
    for k in (0..n).rev() {
        let mut acc = b[k];
        for j in k + 1..n {
            acc -= a[k][j] * b[j];
        }
        b[k] = acc / a[k][k];
    }
    true
}
