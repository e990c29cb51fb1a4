//! The weak geodesic ray of a toric test configuration on a grid.
//!
//! On the moment-polytope side everything is explicit: `phi_t` is the
//! conjugate of `u0 - t g` and `psi_lambda` is the conjugate of `u0`
//! restricted to `{g >= lambda}`.

use num_traits::ToPrimitive;
use rayon::prelude::*;

use crate::config::ToricConfig;
use crate::error::{Error, Result};
use crate::rat::{factorial, to_f64, Rat};

use super::grid::{Axis, PotentialGrid, Role};
use super::legendre::{legendre, Conjugate};
use super::potential::{guillemin, PotentialFn};

/// Nodes with `g >= lambda - LEVEL_TOL` count as lying in the superlevel set.
pub const LEVEL_TOL: f64 = 1e-9;

/// An equilibrium potential, or the identically `-∞` function past the
/// maximal weight.
#[derive(Debug, Clone)]
pub enum Equilibrium {
    Grid(PotentialGrid),
    NegInfinity,
}

impl Equilibrium {
    pub fn grid(&self) -> Option<&PotentialGrid> {
        match self {
            Equilibrium::Grid(g) => Some(g),
            Equilibrium::NegInfinity => None,
        }
    }

    pub fn is_neg_infinity(&self) -> bool {
        matches!(self, Equilibrium::NegInfinity)
    }
}

pub struct GeodesicLab {
    cfg: ToricConfig,
    u0_fn: PotentialFn,
    u0: PotentialGrid,
    g_nodes: Vec<f64>,
    dual: Vec<Axis>,
}

impl std::fmt::Debug for GeodesicLab {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("GeodesicLab").field("axes", &self.u0.axes).field("dual", &self.dual).finish()
    }
}

impl GeodesicLab {
    /// Lab with the Guillemin reference potential, `nodes` samples per axis
    /// on the polytope's bounding box and on `[-window, window]^n`.
    pub fn new(cfg: &ToricConfig, nodes: usize, window: f64) -> Result<Self> {
        Self::with_potential(cfg, guillemin(cfg.polytope()), nodes, window)
    }

    pub fn with_potential(cfg: &ToricConfig, u0_fn: PotentialFn, nodes: usize, window: f64) -> Result<Self> {
        let p = cfg.polytope();
        let n = p.dim();
        if n == 0 || n > 2 {
            return Err(Error::InvalidParameter(format!("grids are implemented in dimensions 1 and 2, not {n}")));
        }
        let (lo, hi) = p.bounding_box();
        let axes = (0..n).map(|d| Axis::new(to_f64(&lo[d]), to_f64(&hi[d]), nodes)).collect::<Result<Vec<_>>>()?;
        let dual = (0..n).map(|_| Axis::new(-window, window, nodes)).collect::<Result<Vec<_>>>()?;
        let u0 = PotentialGrid::from_fn(axes, Role::Symplectic, |x| u0_fn(x));
        let g = cfg.g();
        let g_nodes = u0
            .points()
            .iter()
            .zip(&u0.values)
            .map(|(x, v)| if v.is_finite() { g.eval_f64(x) } else { f64::NAN })
            .collect();
        Ok(GeodesicLab { cfg: cfg.clone(), u0_fn, u0, g_nodes, dual })
    }

    pub fn config(&self) -> &ToricConfig {
        &self.cfg
    }

    pub fn dim(&self) -> usize {
        self.u0.dim()
    }

    pub fn u0(&self) -> &PotentialGrid {
        &self.u0
    }

    pub fn u0_fn(&self) -> &PotentialFn {
        &self.u0_fn
    }

    /// `g` at the primal nodes (`NaN` outside the polytope).
    pub fn g_nodes(&self) -> &[f64] {
        &self.g_nodes
    }

    pub fn dual_axes(&self) -> &[Axis] {
        &self.dual
    }

    pub fn primal_axes(&self) -> &[Axis] {
        &self.u0.axes
    }

    /// Largest primal spacing; used as the time step of forward differences.
    pub fn primal_spacing(&self) -> f64 {
        self.u0.axes.iter().map(Axis::spacing).fold(0.0, f64::max)
    }

    pub fn dual_spacing(&self) -> f64 {
        self.dual.iter().map(Axis::spacing).fold(0.0, f64::max)
    }

    /// `n!`, the total Monge–Ampère mass per unit of polytope volume.
    pub fn mass_factor(&self) -> f64 {
        factorial(self.dim()).to_f64().unwrap_or(f64::INFINITY)
    }

    /// `phi_0 = u0*`.
    pub fn reference(&self) -> Result<Conjugate> {
        legendre(&self.u0, &self.dual)
    }

    /// `phi_t`, the conjugate of `u0 - t g`.
    pub fn ray(&self, t: f64) -> Result<Conjugate> {
        if !(t >= 0.0) {
            return Err(Error::InvalidParameter(format!("ray time must be non-negative, got {t}")));
        }
        let shifted = PotentialGrid {
            values: self.u0.values.iter().zip(&self.g_nodes).map(|(u, g)| if u.is_finite() { u - t * g } else { *u }).collect(),
            ..self.u0.clone()
        };
        legendre(&shifted, &self.dual)
    }

    /// `psi_lambda`, the conjugate of `u0` plus the indicator of `{g >= lambda}`.
    pub fn equilibrium(&self, lambda: f64) -> Result<Equilibrium> {
        let restricted = PotentialGrid {
            values: self
                .u0
                .values
                .iter()
                .zip(&self.g_nodes)
                .map(|(u, g)| if u.is_finite() && *g >= lambda - LEVEL_TOL { *u } else { f64::INFINITY })
                .collect(),
            ..self.u0.clone()
        };
        match legendre(&restricted, &self.dual) {
            Ok(c) => Ok(Equilibrium::Grid(c.grid)),
            Err(Error::EmptyDomain) => Ok(Equilibrium::NegInfinity),
            Err(e) => Err(e),
        }
    }

    /// `max_lambda (psi_lambda + t lambda)` over the given levels.
    pub fn ray_from_equilibria(&self, t: f64, lambdas: &[f64]) -> Result<PotentialGrid> {
        let psis = lambdas.par_iter().map(|&l| self.equilibrium(l).map(|e| (l, e))).collect::<Result<Vec<_>>>()?;
        let mut values = vec![f64::NEG_INFINITY; self.dual.iter().map(|a| a.nodes).product()];
        for (l, e) in &psis {
            if let Some(g) = e.grid() {
                for (v, p) in values.iter_mut().zip(&g.values) {
                    *v = v.max(p + t * l);
                }
            }
        }
        Ok(PotentialGrid { axes: self.dual.clone(), values, role: Role::Kahler })
    }

    /// Forward-difference time derivative of the ray at `t` with step `dt`.
    pub fn velocity(&self, t: f64, dt: f64) -> Result<(Conjugate, Vec<f64>)> {
        let now = self.ray(t)?;
        let next = self.ray(t + dt)?;
        let v = next.grid.values.iter().zip(&now.grid.values).map(|(b, a)| (b - a) / dt).collect();
        Ok((now, v))
    }

    /// Envelope `max_u <u/k, y> - u0(u/k)` over lattice points of `kP` whose
    /// weight is at least `ceil(lambda k)`.
    pub fn bergman_approx(&self, lambda: &Rat, k: u64) -> Result<Equilibrium> {
        let threshold = (lambda * Rat::from_integer(k.into())).ceil().to_integer();
        let threshold = threshold.to_i64().ok_or(Error::Overflow)?;
        let kf = k as f64;
        let mut atoms = Vec::new();
        for u in self.cfg.polytope().lattice_points(k) {
            if self.cfg.weight(&u, k)? >= threshold {
                let x: Vec<f64> = u.iter().map(|&c| c as f64 / kf).collect();
                let val = (self.u0_fn)(&x);
                if val.is_finite() {
                    atoms.push((x, val));
                }
            }
        }
        if atoms.is_empty() {
            return Ok(Equilibrium::NegInfinity);
        }
        let ys = crate::geodesic::grid::tensor_points(&self.dual);
        let values: Vec<f64> = ys
            .par_iter()
            .map(|y| {
                atoms
                    .iter()
                    .map(|(x, v)| x.iter().zip(y).map(|(a, b)| a * b).sum::<f64>() - v)
                    .fold(f64::NEG_INFINITY, f64::max)
            })
            .collect();
        Ok(Equilibrium::Grid(PotentialGrid { axes: self.dual.clone(), values, role: Role::Kahler }))
    }
}
