//! Grid-level verification of the ray: the gradient-map relation, mass
//! identities, energy linearity, maximality and the tangent-vector law.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::polytope::Region;
use crate::rat::{factorial, to_f64, Rat};
use crate::spectra::dh_measure;

use super::grid::{tensor_points, Axis, PotentialGrid};
use super::lab::{Equilibrium, GeodesicLab, LEVEL_TOL};
use super::ma::{ma_mass, ma_masses};

/// `max_y |phi_t(y) - t lambda(y) - psi_{lambda(y)}(y)|` with `lambda(y)` the
/// forward-difference velocity of the ray at `t`.
pub fn gradient_map_residual(lab: &GeodesicLab, t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::InvalidParameter(format!("residual needs t > 0, got {t}")));
    }
    let (phi_t, velocity) = lab.velocity(t, lab.primal_spacing())?;
    let u0 = lab.u0();
    let g = lab.g_nodes();
    let xs = tensor_points(&u0.axes);
    let ys = tensor_points(lab.dual_axes());
    let (xs, ys, g) = (&xs, &ys, g);
    let finite: Vec<usize> = (0..u0.len()).filter(|&i| u0.values[i].is_finite()).collect();
    let constrained: Box<dyn Fn(usize, f64) -> f64 + Sync> = if lab.dim() == 1 {
        // The objective is concave along the line and the superlevel set is an
        // interval, so the constrained maximizer is the clamped free one.
        let free = lab.reference()?.argmax;
        let peak = *finite.iter().max_by(|&&a, &&b| g[a].total_cmp(&g[b])).ok_or(Error::EmptyDomain)?;
        let (first, last) = (finite[0], *finite.last().unwrap_or(&finite[0]));
        let u0v = &u0.values;
        Box::new(move |j: usize, lambda: f64| {
            let cut = lambda - LEVEL_TOL;
            if g[peak] < cut {
                return f64::NEG_INFINITY;
            }
            let a = first + g[first..=peak].partition_point(|&v| v < cut);
            let b = peak + g[peak..=last].partition_point(|&v| v >= cut) - 1;
            let i = free[j].clamp(a, b);
            xs[i][0] * ys[j][0] - u0v[i]
        })
    } else {
        let finite = &finite;
        Box::new(move |j: usize, lambda: f64| {
            finite
                .iter()
                .filter(|&&i| g[i] >= lambda - LEVEL_TOL)
                .map(|&i| xs[i].iter().zip(&ys[j]).map(|(a, b)| a * b).sum::<f64>() - u0.values[i])
                .fold(f64::NEG_INFINITY, f64::max)
        })
    };
    Ok((0..ys.len())
        .into_par_iter()
        .map(|j| {
            let lambda = velocity[j];
            (phi_t.grid.values[j] - t * lambda - constrained(j, lambda)).abs()
        })
        .reduce(|| 0.0, f64::max))
}

/// Discrete mass of `psi_lambda` against `n! vol{g >= lambda}`.
pub fn ma_mass_identity(lab: &GeodesicLab, lambda: &Rat) -> Result<(f64, Rat)> {
    let psi = lab.equilibrium(to_f64(lambda))?;
    let lhs = ma_mass(&psi, lab.primal_axes())?;
    let cfg = lab.config();
    let rhs = match cfg.g().superlevel_region(cfg.polytope(), lambda)? {
        Region::Body(b) => b.volume() * Rat::from_integer(factorial(lab.dim())),
        _ => Rat::from_integer(0.into()),
    };
    Ok((lhs, rhs))
}

/// Energy of the ray sampled along a time grid, with its least-squares line.
#[derive(Debug, Clone)]
pub struct EnergyFit {
    pub times: Vec<f64>,
    /// `∫ phi_dot_t MA(phi_t)` at each time.
    pub rates: Vec<f64>,
    /// Trapezoidal integral of the rates from the first time.
    pub energies: Vec<f64>,
    pub slope: f64,
    pub intercept: f64,
    pub max_residual: f64,
}

pub fn aubin_mabuchi_slope(lab: &GeodesicLab, times: &[f64]) -> Result<EnergyFit> {
    if times.len() < 3 || times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidParameter("energy fit needs at least 3 increasing times".into()));
    }
    let dt = lab.primal_spacing();
    let rates = times
        .par_iter()
        .map(|&t| {
            let (phi, v) = lab.velocity(t, dt)?;
            let m = ma_masses(&phi.grid, lab.primal_axes())?;
            Ok(m.iter().zip(&v).map(|(a, b)| a * b).sum::<f64>())
        })
        .collect::<Result<Vec<f64>>>()?;
    let mut energies = vec![times[0] * rates[0]];
    for i in 1..times.len() {
        energies.push(energies[i - 1] + (times[i] - times[i - 1]) * (rates[i] + rates[i - 1]) / 2.0);
    }
    let n = times.len() as f64;
    let (mt, me) = (times.iter().sum::<f64>() / n, energies.iter().sum::<f64>() / n);
    let sxx: f64 = times.iter().map(|t| (t - mt).powi(2)).sum();
    let sxy: f64 = times.iter().zip(&energies).map(|(t, e)| (t - mt) * (e - me)).sum();
    let slope = sxy / sxx;
    let intercept = me - slope * mt;
    let max_residual = times.iter().zip(&energies).map(|(t, e)| (e - intercept - slope * t).abs()).fold(0.0, f64::max);
    Ok(EnergyFit { times: times.to_vec(), rates, energies, slope, intercept, max_residual })
}

/// Mass of `psi_lambda` carried by nodes where `psi_lambda < phi - eps`, with
/// `eps` ten dual grid spacings.
pub fn maximality_leakage(lab: &GeodesicLab, lambda: f64) -> Result<f64> {
    let psi = match lab.equilibrium(lambda)? {
        Equilibrium::Grid(g) => g,
        Equilibrium::NegInfinity => return Ok(0.0),
    };
    let phi = lab.reference()?.grid;
    let eps = 10.0 * lab.dual_spacing();
    let masses = ma_masses(&psi, lab.primal_axes())?;
    Ok(masses
        .iter()
        .zip(psi.values.iter().zip(&phi.values))
        .filter(|(_, (p, f))| **p < **f - eps)
        .map(|(m, _)| m.abs())
        .sum())
}

/// Sup distance between the survival function of the pushforward of the
/// discrete `MA(phi)` by the discrete velocity at `t = 0`, and the exact
/// Duistermaat–Heckman survival function, over `samples` equally spaced
/// levels and the breakpoints.
pub fn tangent_law_distance(lab: &GeodesicLab, samples: usize) -> Result<f64> {
    let (phi, v) = lab.velocity(0.0, lab.primal_spacing())?;
    let m = ma_masses(&phi.grid, lab.primal_axes())?;
    let dh = dh_measure(lab.config())?;
    let (lo, hi) = (dh.lambda_min().clone(), dh.lambda_max().clone());
    let steps = Rat::from_integer(samples.max(1).into());
    let mut levels: Vec<Rat> = (0..=samples.max(1))
        .map(|i| &lo + (&hi - &lo) * Rat::from_integer(i.into()) / &steps)
        .collect();
    levels.extend(dh.breakpoints.iter().map(|(l, _)| l.clone()));
    Ok(levels
        .iter()
        .map(|l| {
            let lf = to_f64(l);
            let grid: f64 = m.iter().zip(&v).filter(|(_, s)| **s >= lf - 1e-7).map(|(a, _)| a).sum();
            (grid - to_f64(&dh.survival(l))).abs()
        })
        .fold(0.0, f64::max))
}

/// Outcome of comparing the Monge–Ampère masses of two potentials.
#[derive(Debug, Clone, PartialEq)]
pub enum Comparison {
    Holds { mass: f64, other_mass: f64 },
    Violated { mass: f64, other_mass: f64 },
    Inconclusive(String),
}

impl Comparison {
    pub fn holds(&self) -> bool {
        matches!(self, Comparison::Holds { .. })
    }
}

/// For `other <= phi + C`, checks `mass(other) <= mass(phi) + tol`.
pub fn comparison_monotonicity(phi: &Equilibrium, other: &Equilibrium, primal: &[Axis], tol: f64) -> Result<Comparison> {
    let (a, b) = match (phi, other) {
        (_, Equilibrium::NegInfinity) => {
            let mass = ma_mass(phi, primal)?;
            return Ok(Comparison::Holds { mass, other_mass: 0.0 });
        }
        (Equilibrium::NegInfinity, Equilibrium::Grid(_)) => {
            return Ok(Comparison::Inconclusive("reference is identically -∞ while the other is not".into()))
        }
        (Equilibrium::Grid(a), Equilibrium::Grid(b)) => (a, b),
    };
    if a.axes != b.axes {
        return Ok(Comparison::Inconclusive("potentials live on different grids".into()));
    }
    if !bounded_above(a, b) {
        return Ok(Comparison::Inconclusive("the other potential is not bounded by the reference plus a constant".into()));
    }
    let mass = ma_mass(phi, primal)?;
    let other_mass = ma_mass(other, primal)?;
    Ok(if other_mass <= mass + tol {
        Comparison::Holds { mass, other_mass }
    } else {
        Comparison::Violated { mass, other_mass }
    })
}

fn bounded_above(phi: &PotentialGrid, other: &PotentialGrid) -> bool {
    phi.values.iter().zip(&other.values).all(|(a, b)| a.is_finite() && b.is_finite())
}

/// Largest violation of `phi_{t2} <= interpolation of phi_{t1}, phi_{t3}` over
/// consecutive triples of `times` and all nodes.
pub fn ray_convexity_defect(lab: &GeodesicLab, times: &[f64]) -> Result<f64> {
    let rays = times.par_iter().map(|&t| lab.ray(t).map(|c| c.grid.values)).collect::<Result<Vec<_>>>()?;
    let mut worst: f64 = 0.0;
    for i in 0..times.len().saturating_sub(2) {
        let (t1, t2, t3) = (times[i], times[i + 1], times[i + 2]);
        let w = (t2 - t1) / (t3 - t1);
        for j in 0..rays[i].len() {
            let interp = (1.0 - w) * rays[i][j] + w * rays[i + 2][j];
            worst = worst.max(rays[i + 1][j] - interp);
        }
    }
    Ok(worst)
}

/// Largest violations of monotonicity and of concavity of `lambda ->
/// psi_lambda(y)` over an increasing level grid, ignoring levels past the
/// maximal weight.
pub fn equilibrium_family_defects(lab: &GeodesicLab, lambdas: &[f64]) -> Result<(f64, f64)> {
    let psis = lambdas.par_iter().map(|&l| lab.equilibrium(l)).collect::<Result<Vec<_>>>()?;
    let grids: Vec<&PotentialGrid> = psis.iter().map_while(Equilibrium::grid).collect();
    let (mut mono, mut conc): (f64, f64) = (0.0, 0.0);
    for i in 1..grids.len() {
        for (a, b) in grids[i - 1].values.iter().zip(&grids[i].values) {
            mono = mono.max(b - a);
        }
        if i + 1 < grids.len() {
            let (l1, l2, l3) = (lambdas[i - 1], lambdas[i], lambdas[i + 1]);
            let w = (l2 - l1) / (l3 - l1);
            for j in 0..grids[i].len() {
                let interp = (1.0 - w) * grids[i - 1].values[j] + w * grids[i + 1].values[j];
                conc = conc.max(interp - grids[i].values[j]);
            }
        }
    }
    Ok((mono, conc))
}
