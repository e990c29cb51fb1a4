//! Exact quasi-polynomial fitting along arithmetic progressions of levels.

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::linalg::{eval_poly, interpolate};
use crate::polytope::Polytope;
use crate::rat::{format_rat, lcm_denominators, Rat};

/// One constituent of a quasi-polynomial: the polynomial agreeing with the
/// sampled function on levels `k ≡ 0 (mod period)`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuasiConstituent {
    /// Coefficients, lowest degree first.
    pub coefficients: Vec<Rat>,
    pub period: u64,
}

impl QuasiConstituent {
    pub fn degree(&self) -> usize {
        self.coefficients.len() - 1
    }

    /// Coefficient of `k^(degree - i)`.
    pub fn leading(&self, i: usize) -> Rat {
        let d = self.degree();
        if i > d {
            Rat::zero()
        } else {
            self.coefficients[d - i].clone()
        }
    }

    pub fn eval(&self, k: u64) -> Rat {
        eval_poly(&self.coefficients, &Rat::from_integer(BigInt::from(k)))
    }
}

/// Fits a polynomial of the given degree to `f` on `k = period, 2·period,
/// …, (degree+1)·period` and checks it at `extra` further multiples.
pub fn fit_progression(
    period: u64,
    degree: usize,
    extra: usize,
    mut f: impl FnMut(u64) -> Result<Rat>,
) -> Result<QuasiConstituent> {
    let mut samples = Vec::with_capacity(degree + 1 + extra);
    for j in 1..=(degree + 1 + extra) as u64 {
        let k = j * period;
        samples.push((k, f(k)?));
    }
    let nodes: Vec<(Rat, Rat)> = samples[..=degree]
        .iter()
        .map(|(k, v)| (Rat::from_integer(BigInt::from(*k)), v.clone()))
        .collect();
    let coefficients = interpolate(&nodes).expect("distinct interpolation nodes");
    let fit = QuasiConstituent { coefficients, period };
    for (k, v) in &samples[degree + 1..] {
        let predicted = fit.eval(*k);
        if &predicted != v {
            return Err(Error::Interpolation {
                k: *k,
                predicted: format_rat(&predicted),
                counted: format_rat(v),
            });
        }
    }
    Ok(fit)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ehrhart {
    pub a0: Rat,
    pub a1: Rat,
    /// Coefficients of `k^(n-2), …, k^0`.
    pub lower_order: Vec<Rat>,
    pub period: u64,
}

/// Smallest `m` with `mP` a lattice polytope.
pub fn vertex_period(p: &Polytope) -> Result<u64> {
    lcm_denominators(p.vertices().iter().flatten())
        .to_u64()
        .ok_or(Error::Overflow)
}

pub fn ehrhart_coefficients(p: &Polytope) -> Result<Ehrhart> {
    let period = vertex_period(p)?;
    let n = p.dim();
    let fit = fit_progression(period, n, 1, |k| {
        Ok(Rat::from_integer(BigInt::from(p.count_lattice_points(k))))
    })?;
    Ok(Ehrhart {
        a0: fit.leading(0),
        a1: fit.leading(1),
        lower_order: (2..=n).map(|i| fit.leading(i)).collect(),
        period,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{int, rat};

    #[test]
    fn unit_interval() {
        let e = ehrhart_coefficients(&Polytope::interval(int(0), int(1)).unwrap()).unwrap();
        assert_eq!((e.a0, e.a1, e.period), (int(1), int(1), 1));
        assert!(e.lower_order.is_empty());
    }

    #[test]
    fn standard_simplex() {
        let e = ehrhart_coefficients(&Polytope::simplex(2, int(1)).unwrap()).unwrap();
        assert_eq!((e.a0, e.a1, e.lower_order), (rat(1, 2), rat(3, 2), vec![int(1)]));
    }

    #[test]
    fn unit_square() {
        let e = ehrhart_coefficients(&Polytope::cube(2, int(1)).unwrap()).unwrap();
        assert_eq!((e.a0, e.a1), (int(1), int(2)));
    }

    #[test]
    fn rational_interval_uses_period() {
        let p = Polytope::interval(int(0), rat(1, 2)).unwrap();
        let e = ehrhart_coefficients(&p).unwrap();
        assert_eq!((e.a0, e.a1, e.period), (rat(1, 2), int(1), 2));
    }

    #[test]
    fn leading_coefficient_is_volume() {
        let p = Polytope::simplex(3, rat(3, 2)).unwrap();
        assert_eq!(ehrhart_coefficients(&p).unwrap().a0, p.volume());
    }

    #[test]
    fn inconsistent_samples_are_reported() {
        let err = fit_progression(1, 1, 1, |k| Ok(int((k * k) as i64))).unwrap_err();
        assert!(matches!(err, Error::Interpolation { k: 3, .. }));
    }
}
