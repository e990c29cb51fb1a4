//! Leading coefficients of `N_k` and `w(k)` and the Donaldson–Futaki data.

use num_bigint::BigInt;

use crate::config::{FiltrationTable, TestConfiguration};
use crate::ehrhart::fit_progression;
use crate::error::Result;
use crate::rat::Rat;

#[derive(Debug, Clone, PartialEq)]
pub struct InvariantSet {
    pub a0: Rat,
    pub a1: Rat,
    pub b0: Rat,
    pub b1: Rat,
    pub f0: Rat,
    pub f1: Rat,
    pub period: u64,
}

impl InvariantSet {
    pub fn from_coefficients(a0: Rat, a1: Rat, b0: Rat, b1: Rat, period: u64) -> Self {
        let f0 = &b0 / &a0;
        let f1 = (&a0 * &b1 - &a1 * &b0) / (&a0 * &a0);
        InvariantSet { a0, a1, b0, b1, f0, f1, period }
    }

    /// `(name, value)` pairs in the canonical output order.
    pub fn named(&self) -> [(&'static str, &Rat); 6] {
        [("a0", &self.a0), ("a1", &self.a1), ("b0", &self.b0), ("b1", &self.b1), ("F0", &self.f0), ("F1", &self.f1)]
    }
}

/// Fits `N_k` (degree `n`) and `w(k)` (degree `n+1`) exactly on
/// `k = m, 2m, …, (n+3)m` for the configuration's period `m`, verifying the
/// samples beyond those used for interpolation.
pub fn fit_invariants(cfg: &TestConfiguration) -> Result<InvariantSet> {
    fit_invariants_with_period(cfg, cfg.period()?)
}

pub fn fit_invariants_with_period(cfg: &TestConfiguration, period: u64) -> Result<InvariantSet> {
    let n = cfg.dim();
    let tables: Vec<FiltrationTable> = (1..=n as u64 + 3)
        .map(|j| cfg.dims_by_weight(j * period))
        .collect::<Result<_>>()?;
    let at = |k: u64| &tables[(k / period - 1) as usize];
    let hilbert = fit_progression(period, n, 2, |k| Ok(Rat::from_integer(BigInt::from(at(k).total_dim()))))?;
    let weight = fit_progression(period, n + 1, 1, |k| Ok(Rat::from_integer(BigInt::from(at(k).total_weight()))))?;
    Ok(InvariantSet::from_coefficients(
        hilbert.leading(0),
        hilbert.leading(1),
        weight.leading(0),
        weight.leading(1),
        period,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{NormalConeConfig, Rounding, ToricConfig};
    use crate::pl::{Affine, PlConcave};
    use crate::polytope::Polytope;
    use crate::rat::{int, rat};

    fn toric(p: Polytope, affines: Vec<Affine>) -> TestConfiguration {
        let g = PlConcave::new(affines, &p).unwrap();
        TestConfiguration::Toric(ToricConfig::new(p, g, Rounding::Ceil).unwrap())
    }

    fn unit() -> Polytope {
        Polytope::interval(int(0), int(1)).unwrap()
    }

    #[test]
    fn product_line() {
        let inv = fit_invariants(&toric(unit(), vec![Affine::new(vec![int(1)], int(0))])).unwrap();
        assert_eq!(
            (inv.a0, inv.a1, inv.b0, inv.b1, inv.f0, inv.f1),
            (int(1), int(1), rat(1, 2), rat(1, 2), rat(1, 2), int(0))
        );
    }

    #[test]
    fn normal_cone_line() {
        let cfg = TestConfiguration::NormalCone(NormalConeConfig::new(unit(), 0, rat(1, 2)).unwrap());
        let inv = fit_invariants(&cfg).unwrap();
        assert_eq!((inv.b0, inv.b1, inv.f1), (rat(-1, 8), rat(-1, 4), rat(-1, 8)));
        // Oracle: w(k) = Σ_j min(j - k/2, 0) = -k²/8 - k/4 for even k.
        for k in (2..40i64).step_by(2) {
            let direct: i64 = (0..=k).map(|j| (j - k / 2).min(0)).sum();
            assert_eq!(Rat::from_integer(direct.into()), rat(-k * k, 8) - rat(k, 4));
        }
    }

    #[test]
    fn trivial_and_tent() {
        let inv = fit_invariants(&toric(unit(), vec![Affine::new(vec![int(0)], int(0))])).unwrap();
        assert_eq!((inv.b0, inv.b1, inv.f1), (int(0), int(0), int(0)));
        let tent = toric(unit(), vec![Affine::new(vec![int(1)], int(0)), Affine::new(vec![int(-1)], int(1))]);
        let inv = fit_invariants(&tent).unwrap();
        assert_eq!((inv.b0, inv.b1, inv.f1, inv.period), (rat(1, 4), int(0), rat(-1, 4), 2));
    }

    #[test]
    fn shift_moves_f0_only() {
        let p = Polytope::simplex(2, int(1)).unwrap();
        let base = vec![Affine::new(vec![int(1), int(0)], int(0)), Affine::new(vec![int(0), int(-1)], rat(1, 2))];
        let shifted: Vec<Affine> = base.iter().map(|a| Affine::new(a.gradient.clone(), &a.constant + rat(1, 3))).collect();
        let a = fit_invariants(&toric(p.clone(), base)).unwrap();
        let b = fit_invariants(&toric(p, shifted)).unwrap();
        assert_eq!(b.f0, &a.f0 + rat(1, 3));
        assert_eq!(a.f1, b.f1);
    }
}
