//! Toric test configurations given by a concave piecewise-linear function on
//! the moment polytope.

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::pl::PlConcave;
use crate::polytope::Polytope;
use crate::rat::{lcm_denominators, Rat};

use super::filtration::FiltrationTable;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Rounding {
    #[default]
    Ceil,
    Floor,
}

impl Rounding {
    fn apply(self, num: i128, den: i128) -> i128 {
        match self {
            Rounding::Floor => num.div_euclid(den),
            Rounding::Ceil => -(-num).div_euclid(den),
        }
    }

    /// Largest shortfall of `round(a + b)` below `round(a) + round(b)`.
    pub fn slack(self) -> i64 {
        match self {
            Rounding::Ceil => 1,
            Rounding::Floor => 0,
        }
    }
}

/// `k·g(u/k) = min_i (A_i·u + k·C_i) / D` with integers `A_i`, `C_i`, `D`.
#[derive(Debug, Clone)]
struct WeightKernel {
    pieces: Vec<(Vec<i128>, i128)>,
    den: i128,
}

impl WeightKernel {
    fn new(g: &PlConcave) -> Result<Self> {
        let den = lcm_denominators(g.affines().iter().flat_map(|a| a.gradient.iter().chain([&a.constant])));
        let d = Rat::from_integer(den.clone());
        let int = |r: &Rat| (r * &d).to_integer().to_i128().ok_or(Error::Overflow);
        let pieces = g
            .affines()
            .iter()
            .map(|a| Ok((a.gradient.iter().map(int).collect::<Result<Vec<_>>>()?, int(&a.constant)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(WeightKernel { pieces, den: den.to_i128().ok_or(Error::Overflow)? })
    }

    fn scaled_value(&self, u: &[i64], k: u64) -> i128 {
        self.pieces
            .iter()
            .map(|(a, c)| a.iter().zip(u).map(|(x, y)| x * *y as i128).sum::<i128>() + c * k as i128)
            .min()
            .expect("nonempty")
    }
}

#[derive(Debug, Clone)]
pub struct ToricConfig {
    polytope: Polytope,
    g: PlConcave,
    rounding: Rounding,
    kernel: WeightKernel,
}

impl ToricConfig {
    pub fn new(polytope: Polytope, g: PlConcave, rounding: Rounding) -> Result<Self> {
        if g.dim() != polytope.dim() {
            return Err(Error::DimensionMismatch { expected: polytope.dim(), found: g.dim() });
        }
        let g = PlConcave::new(g.affines().to_vec(), &polytope)?;
        let kernel = WeightKernel::new(&g)?;
        Ok(ToricConfig { polytope, g, rounding, kernel })
    }

    pub fn polytope(&self) -> &Polytope {
        &self.polytope
    }

    pub fn g(&self) -> &PlConcave {
        &self.g
    }

    pub fn rounding(&self) -> Rounding {
        self.rounding
    }

    pub fn with_rounding(&self, rounding: Rounding) -> Self {
        ToricConfig { rounding, ..self.clone() }
    }

    /// `round(k·g(u/k))` for `u ∈ kP`.
    pub fn weight(&self, u: &[i64], k: u64) -> Result<i64> {
        if u.len() != self.polytope.dim() {
            return Err(Error::DimensionMismatch { expected: self.polytope.dim(), found: u.len() });
        }
        if k == 0 {
            return Err(Error::InvalidParameter("level must be positive".into()));
        }
        if !self.polytope.contains_lattice(u, k) {
            return Err(Error::NotInPolytope { point: u.to_vec(), k });
        }
        Ok(self.weight_unchecked(u, k))
    }

    pub(crate) fn weight_unchecked(&self, u: &[i64], k: u64) -> i64 {
        self.rounding.apply(self.kernel.scaled_value(u, k), self.kernel.den) as i64
    }

    pub fn dims_by_weight(&self, k: u64) -> Result<FiltrationTable> {
        if k == 0 {
            return Err(Error::InvalidParameter("level must be positive".into()));
        }
        let pts = self.polytope.lattice_points(k);
        Ok(FiltrationTable::from_weights(k, pts.iter().map(|u| self.weight_unchecked(u, k))))
    }

    /// `(min_P g, max_P g)`.
    pub fn lambda_bounds(&self) -> Result<(Rat, Rat)> {
        self.g.range(&self.polytope)
    }

    /// Smallest `m` such that the graph of `g` over every linearity region
    /// has vertices in `(1/m)·Z^(n+1)`; weight sums are polynomial along
    /// multiples of `m`.
    pub fn period(&self) -> Result<u64> {
        let verts = self.g.cell_vertices(&self.polytope)?;
        let values: Vec<Rat> = verts.iter().map(|v| self.g.eval(v)).collect();
        lcm_denominators(verts.iter().flatten().chain(values.iter()))
            .to_u64()
            .ok_or(Error::Overflow)
    }

    /// Checks `w(u+u', k+k') >= w(u,k) + w(u',k') - slack` on sampled pairs;
    /// all pairs are checked when `samples` covers them.
    pub fn check_multiplicativity(&self, k: u64, k2: u64, samples: usize, seed: u64) -> bool {
        let a = self.polytope.lattice_points(k);
        let b = self.polytope.lattice_points(k2);
        let slack = self.rounding.slack();
        let check = |u: &[i64], v: &[i64]| {
            let s: Vec<i64> = u.iter().zip(v).map(|(x, y)| x + y).collect();
            self.weight_unchecked(&s, k + k2) >= self.weight_unchecked(u, k) + self.weight_unchecked(v, k2) - slack
        };
        if samples >= a.len() * b.len() {
            return a.iter().all(|u| b.iter().all(|v| check(u, v)));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..samples).all(|_| check(&a[rng.gen_range(0..a.len())], &b[rng.gen_range(0..b.len())]))
    }

    /// Whether `g` is a single constant piece, so the ray is a translation.
    pub fn is_constant(&self) -> bool {
        self.g.affines().len() == 1 && self.g.affines()[0].gradient.iter().all(Zero::is_zero)
    }
}

pub(crate) fn big(k: u64) -> Rat {
    Rat::from_integer(BigInt::from(k))
}
