//! Reference symplectic potentials on moment polytopes.

use std::sync::Arc;

use crate::polytope::Polytope;
use crate::rat::to_f64;

/// A convex function on the moment polytope, `+∞` outside it.
pub type PotentialFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// Tolerance used when deciding whether a float point lies in a polytope.
pub const DOMAIN_TOL: f64 = 1e-12;

/// `log(1 + e^y)` without overflow.
pub fn softplus(y: f64) -> f64 {
    if y > 0.0 {
        y + (-y).exp().ln_1p()
    } else {
        y.exp().ln_1p()
    }
}

fn xlogx(s: f64) -> f64 {
    if s > 0.0 {
        s * s.ln()
    } else {
        0.0
    }
}

/// Facets as `(primitive normal, offset)` in floating point, so that
/// `offset - <normal, x>` is the lattice distance to the facet.
pub fn lattice_facets(p: &Polytope) -> Vec<(Vec<f64>, f64)> {
    (0..p.halfspaces().len())
        .map(|i| {
            let (n, off) = p.halfspaces()[i].primitive();
            let n = n.iter().map(|c| to_f64(&crate::rat::Rat::from_integer(c.clone()))).collect();
            (n, to_f64(&off))
        })
        .collect()
}

/// The Guillemin potential `sum_i l_i log l_i` of the canonical toric metric,
/// with `l_i` the lattice distances to the facets.
pub fn guillemin(p: &Polytope) -> PotentialFn {
    let facets = lattice_facets(p);
    Arc::new(move |x: &[f64]| {
        let mut total = 0.0;
        for (n, off) in &facets {
            let l = off - n.iter().zip(x).map(|(a, b)| a * b).sum::<f64>();
            if l < -DOMAIN_TOL {
                return f64::INFINITY;
            }
            total += xlogx(l.max(0.0));
        }
        total
    })
}

/// `u(x) + <x, A x>/2 + <b, x>`: a convex perturbation of `u` when `A` is
/// positive semi-definite.
pub fn perturbed(u: PotentialFn, a: Vec<Vec<f64>>, b: Vec<f64>) -> PotentialFn {
    Arc::new(move |x: &[f64]| {
        let base = u(x);
        if !base.is_finite() {
            return base;
        }
        let quad: f64 = a
            .iter()
            .zip(x)
            .map(|(row, xi)| xi * row.iter().zip(x).map(|(r, xj)| r * xj).sum::<f64>())
            .sum();
        base + quad / 2.0 + b.iter().zip(x).map(|(c, xi)| c * xi).sum::<f64>()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::int;

    #[test]
    fn interval_potential_is_the_binary_entropy() {
        let p = Polytope::interval(int(0), int(1)).unwrap();
        let u = guillemin(&p);
        assert!((u(&[0.25]) - (0.25f64 * 0.25f64.ln() + 0.75 * 0.75f64.ln())).abs() < 1e-15);
        assert_eq!(u(&[0.0]), 0.0);
        assert_eq!(u(&[1.5]), f64::INFINITY);
    }

    #[test]
    fn softplus_is_stable() {
        assert!((softplus(0.0) - 2f64.ln()).abs() < 1e-15);
        assert!((softplus(800.0) - 800.0).abs() < 1e-12);
        assert!(softplus(-800.0) >= 0.0);
    }
}
