//! Test configurations and their per-level weight data.

pub mod filtration;
pub mod flag;
pub mod normal_cone;
pub mod toric;

use num_integer::Integer;

use crate::error::{Error, Result};
use crate::rat::Rat;

pub use filtration::FiltrationTable;
pub use flag::{FlagIdealConfig, MonomialIdeal};
pub use normal_cone::{corner_function, seshadri_fixed_point, NormalConeConfig};
pub use toric::{Rounding, ToricConfig};

#[derive(Debug, Clone)]
pub enum TestConfiguration {
    Toric(ToricConfig),
    NormalCone(NormalConeConfig),
    Flag(FlagIdealConfig),
}

impl TestConfiguration {
    /// The toric configuration carrying the limit (Duistermaat–Heckman)
    /// data.
    pub fn toric(&self) -> &ToricConfig {
        match self {
            TestConfiguration::Toric(t) => t,
            TestConfiguration::NormalCone(c) => c.toric(),
            TestConfiguration::Flag(f) => f.toric(),
        }
    }

    pub fn dim(&self) -> usize {
        self.toric().polytope().dim()
    }

    pub fn kind(&self) -> &'static str {
        match self {
            TestConfiguration::Toric(_) => "toric_pl",
            TestConfiguration::NormalCone(_) => "normal_cone",
            TestConfiguration::Flag(_) => "flag_ideal",
        }
    }

    /// Levels that every operation accepts.
    pub fn divisibility(&self) -> u64 {
        match self {
            TestConfiguration::Toric(_) => 1,
            TestConfiguration::NormalCone(c) => c.divisibility(),
            TestConfiguration::Flag(f) => f.period(),
        }
    }

    /// Period of the progression along which `N_k` and `w(k)` are fitted.
    pub fn period(&self) -> Result<u64> {
        let base = self.toric().period()?;
        let div = self.divisibility();
        Ok(base.lcm(&div))
    }

    pub fn check_level(&self, k: u64) -> Result<()> {
        let m = self.divisibility();
        if k == 0 || k % m != 0 {
            return Err(Error::Divisibility { k, period: m });
        }
        Ok(())
    }

    pub fn dims_by_weight(&self, k: u64) -> Result<FiltrationTable> {
        self.check_level(k)?;
        match self {
            TestConfiguration::Toric(t) => t.dims_by_weight(k),
            TestConfiguration::NormalCone(c) => c.dims_by_weight(k),
            TestConfiguration::Flag(f) => f.dims_by_weight(k),
        }
    }

    pub fn hilbert_dim(&self, k: u64) -> Result<u64> {
        Ok(self.dims_by_weight(k)?.total_dim())
    }

    pub fn total_weight(&self, k: u64) -> Result<i128> {
        Ok(self.dims_by_weight(k)?.total_weight())
    }

    /// `(λ₀, λ_c) = (min_P g, max_P g)`.
    pub fn lambda_bounds(&self) -> Result<(Rat, Rat)> {
        self.toric().lambda_bounds()
    }

    /// Linear bound `C` with every weight in `[-Ck, Ck]`.
    pub fn linear_bound(&self) -> Result<Rat> {
        let (lo, hi) = self.lambda_bounds()?;
        Ok(std::cmp::max(num_traits::Signed::abs(&lo), num_traits::Signed::abs(&hi)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pl::{Affine, PlConcave};
    use crate::polytope::Polytope;
    use crate::rat::{int, rat};

    fn product_p1() -> TestConfiguration {
        let p = Polytope::interval(int(0), int(1)).unwrap();
        let g = PlConcave::new(vec![Affine::new(vec![int(1)], int(0))], &p).unwrap();
        TestConfiguration::Toric(ToricConfig::new(p, g, Rounding::Ceil).unwrap())
    }

    #[test]
    fn sums() {
        let cfg = product_p1();
        for k in 1..10u64 {
            assert_eq!(cfg.total_weight(k).unwrap(), (k * (k + 1) / 2) as i128);
            assert_eq!(cfg.hilbert_dim(k).unwrap(), k + 1);
        }
        assert_eq!(cfg.lambda_bounds().unwrap(), (int(0), int(1)));
    }

    #[test]
    fn normal_cone_bounds_and_weight() {
        let nc = NormalConeConfig::new(Polytope::interval(int(0), int(1)).unwrap(), 0, rat(1, 2)).unwrap();
        let cfg = TestConfiguration::NormalCone(nc);
        assert_eq!(cfg.lambda_bounds().unwrap(), (rat(-1, 2), int(0)));
        assert_eq!(cfg.total_weight(4).unwrap(), -3);
        assert!(matches!(cfg.dims_by_weight(7), Err(Error::Divisibility { .. })));
    }
}
