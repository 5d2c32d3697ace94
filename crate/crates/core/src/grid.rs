//! Discretization grids on `(0, pi/2)` (joins) and `(-pi/2, pi/2)` (suspensions).
//!
//! The default scheme is uniform in the log-tangent coordinate, where the
//! transformed ODE system is asymptotically autonomous: `s = log(tan t)` for
//! joins, `s = artanh(sin t)` for suspensions. Derivatives are second-order
//! three-point stencils in the grid's native coordinate (one-sided at the
//! first and last node) chained back to `t`; quadrature is composite
//! trapezoid in the native coordinate with the Jacobian folded in.

use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_PI_2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    UniformT,
    UniformS,
    ChebyshevT,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Domain {
    /// `(0, pi/2)`, singular weight `cos^{m1} sin^{m2}`.
    Join,
    /// `(-pi/2, pi/2)`, singular weight `cos^{m1}`.
    Suspension,
}

impl Domain {
    pub fn bounds(self) -> (f64, f64) {
        match self {
            Domain::Join => (0.0, FRAC_PI_2),
            Domain::Suspension => (-FRAC_PI_2, FRAC_PI_2),
        }
    }
}

/// Minimum node count accepted by grid constructors.
pub const MIN_NODES: usize = 16;

/// Default half-length of the log-tangent coordinate range.
pub const DEFAULT_S_MAX: f64 = 12.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(from = "GridRepr", into = "GridRepr")]
pub struct Grid {
    pub domain: Domain,
    pub scheme: Scheme,
    nodes_t: Vec<f64>,
    /// Native coordinate values (equals `nodes_t` for T-schemes).
    native: Vec<f64>,
    /// sin(t), cos(t) at nodes, computed in whichever form is stable.
    sin_t: Vec<f64>,
    cos_t: Vec<f64>,
    /// d(native)/dt and d^2(native)/dt^2 at nodes.
    dnat_dt: Vec<f64>,
    d2nat_dt2: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct GridRepr {
    domain: Domain,
    scheme: Scheme,
    nodes: Vec<f64>,
}

impl From<GridRepr> for Grid {
    fn from(r: GridRepr) -> Self {
        Grid::from_nodes(r.domain, r.scheme, r.nodes).expect("stored grid must be valid")
    }
}

impl From<Grid> for GridRepr {
    fn from(g: Grid) -> Self {
        GridRepr {
            domain: g.domain,
            scheme: g.scheme,
            nodes: g.nodes_t,
        }
    }
}

impl Grid {
    /// Uniform in `t`, nodes at `lo + (i+1) h` with `h = (hi-lo)/(n+1)`.
    pub fn uniform_t(domain: Domain, n: usize) -> Result<Self> {
        check_n(n)?;
        let (lo, hi) = domain.bounds();
        let h = (hi - lo) / (n as f64 + 1.0);
        let nodes: Vec<f64> = (0..n).map(|i| lo + (i as f64 + 1.0) * h).collect();
        Self::from_nodes(domain, Scheme::UniformT, nodes)
    }

    /// Uniform in the log-tangent coordinate on `[-s_max, s_max]`.
    pub fn uniform_s(domain: Domain, n: usize, s_max: f64) -> Result<Self> {
        check_n(n)?;
        if !(s_max > 0.0) {
            return Err(Error::Grid("s_max must be positive".into()));
        }
        let mut g = Grid {
            domain,
            scheme: Scheme::UniformS,
            nodes_t: Vec::with_capacity(n),
            native: Vec::with_capacity(n),
            sin_t: Vec::with_capacity(n),
            cos_t: Vec::with_capacity(n),
            dnat_dt: Vec::with_capacity(n),
            d2nat_dt2: Vec::with_capacity(n),
        };
        for i in 0..n {
            let s = -s_max + 2.0 * s_max * i as f64 / (n as f64 - 1.0);
            g.push_s_node(s);
        }
        Ok(g)
    }

    /// Chebyshev (first kind) nodes mapped to the open interval.
    pub fn chebyshev_t(domain: Domain, n: usize) -> Result<Self> {
        check_n(n)?;
        let (lo, hi) = domain.bounds();
        let nodes: Vec<f64> = (0..n)
            .map(|i| {
                let x = -(std::f64::consts::PI * (2.0 * i as f64 + 1.0) / (2.0 * n as f64)).cos();
                lo + (hi - lo) * (x + 1.0) / 2.0
            })
            .collect();
        Self::from_nodes(domain, Scheme::ChebyshevT, nodes)
    }

    /// Rebuild a grid from explicit `t` nodes (deserialization path).
    pub fn from_nodes(domain: Domain, scheme: Scheme, nodes: Vec<f64>) -> Result<Self> {
        check_n(nodes.len())?;
        let (lo, hi) = domain.bounds();
        for w in nodes.windows(2) {
            if !(w[0] < w[1]) {
                return Err(Error::Grid("nodes must be strictly increasing".into()));
            }
        }
        if !(nodes[0] > lo && *nodes.last().unwrap() < hi) {
            return Err(Error::Grid("nodes must lie strictly inside the domain".into()));
        }
        let mut g = Grid {
            domain,
            scheme,
            nodes_t: Vec::with_capacity(nodes.len()),
            native: Vec::with_capacity(nodes.len()),
            sin_t: Vec::with_capacity(nodes.len()),
            cos_t: Vec::with_capacity(nodes.len()),
            dnat_dt: Vec::with_capacity(nodes.len()),
            d2nat_dt2: Vec::with_capacity(nodes.len()),
        };
        match scheme {
            Scheme::UniformS => {
                for &t in &nodes {
                    let s = match domain {
                        Domain::Join => t.tan().ln(),
                        Domain::Suspension => t.sin().atanh(),
                    };
                    // keep the stored node bit-exact
                    g.push_s_node(s);
                    *g.nodes_t.last_mut().unwrap() = t;
                }
            }
            _ => {
                for &t in &nodes {
                    g.nodes_t.push(t);
                    g.native.push(t);
                    g.sin_t.push(t.sin());
                    g.cos_t.push(t.cos());
                    g.dnat_dt.push(1.0);
                    g.d2nat_dt2.push(0.0);
                }
            }
        }
        Ok(g)
    }

    fn push_s_node(&mut self, s: f64) {
        match self.domain {
            Domain::Join => {
                // t = atan(e^s); sin, cos formed without cancellation.
                let t = s.exp().atan();
                let (sin_t, cos_t) = if s >= 0.0 {
                    let r = (-s).exp();
                    let d = (1.0 + r * r).sqrt();
                    (1.0 / d, r / d)
                } else {
                    let r = s.exp();
                    let d = (1.0 + r * r).sqrt();
                    (r / d, 1.0 / d)
                };
                // ds/dt = 1/(sin cos), d2s/dt2 = (sin^2 - cos^2)/(sin cos)^2
                let sc = sin_t * cos_t;
                self.nodes_t.push(t);
                self.native.push(s);
                self.sin_t.push(sin_t);
                self.cos_t.push(cos_t);
                self.dnat_dt.push(1.0 / sc);
                self.d2nat_dt2.push((sin_t * sin_t - cos_t * cos_t) / (sc * sc));
            }
            Domain::Suspension => {
                // t = gd(s): sin t = tanh s, cos t = sech s.
                let sin_t = s.tanh();
                let cos_t = 1.0 / s.cosh();
                let t = sin_t.asin();
                // ds/dt = 1/cos, d2s/dt2 = sin/cos^2
                self.nodes_t.push(t);
                self.native.push(s);
                self.sin_t.push(sin_t);
                self.cos_t.push(cos_t);
                self.dnat_dt.push(1.0 / cos_t);
                self.d2nat_dt2.push(sin_t / (cos_t * cos_t));
            }
        }
    }

    pub fn len(&self) -> usize {
        self.nodes_t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes_t.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes_t
    }

    pub fn native(&self) -> &[f64] {
        &self.native
    }

    pub fn sin(&self, i: usize) -> f64 {
        self.sin_t[i]
    }

    pub fn cos(&self, i: usize) -> f64 {
        self.cos_t[i]
    }

    /// Distance of the first node from the lower domain endpoint.
    /// Computed from the stable trig values where `t` itself would cancel.
    pub fn eps_lo(&self) -> f64 {
        match self.domain {
            Domain::Join => self.sin_t[0].atan2(self.cos_t[0]),
            Domain::Suspension => {
                let t0 = self.nodes_t[0];
                if t0 <= 0.0 {
                    self.cos_t[0].asin()
                } else {
                    FRAC_PI_2 + t0
                }
            }
        }
    }

    /// Distance of the last node from the upper domain endpoint.
    pub fn eps_hi(&self) -> f64 {
        let n = self.len() - 1;
        if self.nodes_t[n] >= 0.0 {
            self.cos_t[n].asin()
        } else {
            FRAC_PI_2 - self.nodes_t[n]
        }
    }

    pub fn epsilon_cut(&self) -> f64 {
        self.eps_lo().min(self.eps_hi())
    }

    /// True when node `n-1-i` mirrors node `i` across the domain midpoint.
    pub fn is_symmetric(&self, tol: f64) -> bool {
        let (lo, hi) = self.domain.bounds();
        let mid2 = lo + hi;
        let n = self.len();
        (0..n / 2 + 1).all(|i| (self.nodes_t[i] + self.nodes_t[n - 1 - i] - mid2).abs() <= tol)
    }

    /// Trapezoid quadrature weights in `t` (native cell sizes times dt/ds).
    pub fn quadrature_weights(&self) -> Vec<f64> {
        let x = &self.native;
        let n = x.len();
        let mut w = vec![0.0; n];
        for i in 0..n {
            let cell = match i {
                0 => (x[1] - x[0]) / 2.0,
                _ if i == n - 1 => (x[n - 1] - x[n - 2]) / 2.0,
                _ => (x[i + 1] - x[i - 1]) / 2.0,
            };
            w[i] = cell / self.dnat_dt[i];
        }
        w
    }

    /// Three-point second-order stencils for d/d(native) and d2/d(native)2.
    /// Row `i` applies coefficients to values at `start, start+1, start+2`.
    pub fn diff_stencils(&self) -> Vec<DiffStencil> {
        let x = &self.native;
        let n = x.len();
        (0..n)
            .map(|i| {
                let start = if i == 0 {
                    0
                } else if i == n - 1 {
                    n - 3
                } else {
                    i - 1
                };
                DiffStencil::three_point(x[start], x[start + 1], x[start + 2], x[i], start)
            })
            .collect()
    }

    /// `d(native)/dt` at node `i`, the chain factor between native-coordinate
    /// stencil derivatives and `t`-derivatives.
    pub fn native_to_t_factor(&self, i: usize) -> f64 {
        self.dnat_dt[i]
    }

    /// The log-tangent coordinate of node `i` (`log tan t` on joins,
    /// `artanh sin t` on suspensions), formed from the stable trig values.
    pub fn log_coordinate(&self, i: usize) -> f64 {
        match self.domain {
            Domain::Join => self.sin_t[i].ln() - self.cos_t[i].ln(),
            Domain::Suspension => (1.0 + self.sin_t[i]).ln() - self.cos_t[i].ln(),
        }
    }

    /// `d^2(native)/dt^2` at node `i`.
    pub fn native_to_t_factor2(&self, i: usize) -> f64 {
        self.d2nat_dt2[i]
    }

    /// First and second derivatives with respect to `t` of nodal values.
    pub fn derivatives_t(&self, values: &[f64]) -> (Vec<f64>, Vec<f64>) {
        assert_eq!(values.len(), self.len());
        let stencils = self.diff_stencils();
        let n = self.len();
        let mut d1 = vec![0.0; n];
        let mut d2 = vec![0.0; n];
        for i in 0..n {
            let st = &stencils[i];
            let fp = st.first(values);
            let fpp = st.second(values);
            // chain rule through the native coordinate
            let a = self.dnat_dt[i];
            let b = self.d2nat_dt2[i];
            d1[i] = fp * a;
            d2[i] = fpp * a * a + fp * b;
        }
        (d1, d2)
    }
}

fn check_n(n: usize) -> Result<()> {
    if n < MIN_NODES {
        return Err(Error::Grid(format!("at least {MIN_NODES} nodes required, got {n}")));
    }
    Ok(())
}

/// One three-point derivative stencil anchored at `start`.
#[derive(Debug, Clone, Copy)]
pub struct DiffStencil {
    pub start: usize,
    pub c1: [f64; 3],
    pub c2: [f64; 3],
}

impl DiffStencil {
    fn three_point(x0: f64, x1: f64, x2: f64, at: f64, start: usize) -> Self {
        let d01 = x0 - x1;
        let d02 = x0 - x2;
        let d12 = x1 - x2;
        let c1 = [
            (2.0 * at - x1 - x2) / (d01 * d02),
            (2.0 * at - x0 - x2) / (-d01 * d12),
            (2.0 * at - x0 - x1) / (d02 * d12),
        ];
        let c2 = [2.0 / (d01 * d02), -2.0 / (d01 * d12), 2.0 / (d02 * d12)];
        DiffStencil { start, c1, c2 }
    }

    pub fn first(&self, v: &[f64]) -> f64 {
        self.c1[0] * v[self.start] + self.c1[1] * v[self.start + 1] + self.c1[2] * v[self.start + 2]
    }

    pub fn second(&self, v: &[f64]) -> f64 {
        self.c2[0] * v[self.start] + self.c2[1] * v[self.start + 1] + self.c2[2] * v[self.start + 2]
    }
}
