//! Discrete Monge–Ampère measures of convex grid functions.

use crate::error::{Error, Result};

use super::grid::{unflatten, Axis, PotentialGrid};
use super::lab::Equilibrium;
use super::legendre::legendre;

fn factorial_f64(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

/// Monge–Ampère mass carried by each node of `phi`, normalized so that the
/// total is `n!` times the area of the gradient image.
///
/// In 1D a node carries the jump of the discrete derivative across it. In 2D
/// the gradient image is sampled at the cell centres of `primal`: each centre
/// `p` is assigned to the node maximizing `<p, y> - phi(y)`, and centres whose
/// maximizer sits on the edge of the grid are dropped since their subgradient
/// cell leaves the window.
pub fn ma_masses(phi: &PotentialGrid, primal: &[Axis]) -> Result<Vec<f64>> {
    match phi.dim() {
        1 => {
            let h = phi.axes[0].spacing();
            let v = &phi.values;
            let mut out = vec![0.0; v.len()];
            for j in 1..v.len().saturating_sub(1) {
                out[j] = ((v[j + 1] - v[j]) - (v[j] - v[j - 1])) / h;
            }
            Ok(out)
        }
        2 => {
            if primal.len() != 2 {
                return Err(Error::DimensionMismatch { expected: 2, found: primal.len() });
            }
            let centres: Vec<Axis> = primal.iter().map(Axis::cell_centres).collect();
            let cell: f64 = centres.iter().map(|a| a.spacing()).product();
            let back = legendre(phi, &centres)?;
            let mut out = vec![0.0; phi.len()];
            for &j in &back.argmax {
                let multi = unflatten(&phi.axes, j);
                let interior = multi.iter().zip(&phi.axes).all(|(&i, a)| i > 0 && i + 1 < a.nodes);
                if interior {
                    out[j] += cell * factorial_f64(2);
                }
            }
            Ok(out)
        }
        d => Err(Error::InvalidParameter(format!("no discrete Monge–Ampère operator in dimension {d}"))),
    }
}

/// Total discrete mass; zero for the `-∞` sentinel.
pub fn ma_mass(e: &Equilibrium, primal: &[Axis]) -> Result<f64> {
    match e {
        Equilibrium::NegInfinity => Ok(0.0),
        Equilibrium::Grid(g) => Ok(ma_masses(g, primal)?.iter().sum()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geodesic::grid::Role;

    #[test]
    fn quadratic_mass_is_image_length() {
        let ax = Axis::new(-1.0, 1.0, 201).unwrap();
        let phi = PotentialGrid::from_fn(vec![ax], Role::Kahler, |y| 1.5 * y[0] * y[0]);
        let total: f64 = ma_masses(&phi, &[]).unwrap().iter().sum();
        // Derivative 3y runs over [-3, 3], minus one half-cell slope at each end.
        assert!((total - (6.0 - 3.0 * ax.spacing())).abs() < 1e-9);
    }

    #[test]
    fn planar_quadratic_mass_counts_the_image() {
        // Gradient of |y|^2/2 on [-2,2]^2 covers the primal box [0,1]^2.
        let dual = vec![Axis::new(-2.0, 2.0, 161).unwrap(); 2];
        let primal = vec![Axis::new(0.0, 1.0, 41).unwrap(); 2];
        let phi = PotentialGrid::from_fn(dual, Role::Kahler, |y| (y[0] * y[0] + y[1] * y[1]) / 2.0);
        let total: f64 = ma_masses(&phi, &primal).unwrap().iter().sum();
        assert!((total - 2.0).abs() < 1e-9, "{total}");
        let shifted = PotentialGrid { values: phi.values.iter().map(|v| v + 5.0).collect(), ..phi.clone() };
        let total2: f64 = ma_masses(&shifted, &primal).unwrap().iter().sum();
        assert!((total - total2).abs() < 1e-12);
    }
}
