//! Level-k spectral measures and their exact Duistermaat–Heckman limit.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::config::{FiltrationTable, TestConfiguration, ToricConfig};
use crate::error::{Error, Result};
use crate::linalg::{eval_poly, interpolate};
use crate::rat::{factorial, format_rat, pow, to_f64, Rat};

fn ratk(k: u64) -> Rat {
    Rat::from_integer(BigInt::from(k))
}

/// `(n!/k^n) Σ_λ dim V_λ · δ_{λ/k}`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralMeasure {
    pub level: u64,
    pub dim: usize,
    /// `(λ/k, n!·dim V_λ / k^n)`, positions strictly increasing.
    pub atoms: Vec<(Rat, Rat)>,
}

impl SpectralMeasure {
    pub fn from_table(table: &FiltrationTable, dim: usize) -> Self {
        let k = ratk(table.level);
        let scale = Rat::from_integer(factorial(dim)) / pow(&k, dim as u32);
        let atoms = table
            .entries
            .iter()
            .map(|(w, d)| (Rat::from_integer(BigInt::from(*w)) / &k, &scale * ratk(*d)))
            .collect();
        SpectralMeasure { level: table.level, dim, atoms }
    }

    pub fn total_mass(&self) -> Rat {
        self.atoms.iter().map(|a| &a.1).sum()
    }

    /// Mass of `[x, ∞)`.
    pub fn survival(&self, x: &Rat) -> Rat {
        self.atoms.iter().filter(|a| &a.0 >= x).map(|a| &a.1).sum()
    }

    /// Mass of `(x, ∞)`.
    pub fn survival_right(&self, x: &Rat) -> Rat {
        self.atoms.iter().filter(|a| &a.0 > x).map(|a| &a.1).sum()
    }

    pub fn moment(&self, p: u32) -> Rat {
        self.atoms.iter().map(|(x, m)| pow(x, p) * m).sum()
    }
}

pub fn spectral_measure(cfg: &TestConfiguration, k: u64) -> Result<SpectralMeasure> {
    Ok(SpectralMeasure::from_table(&cfg.dims_by_weight(k)?, cfg.dim()))
}

/// One polynomial piece of the survival function, valid on `(lo, hi)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DhPiece {
    pub lo: Rat,
    pub hi: Rat,
    /// Coefficients in `λ`, lowest degree first.
    pub coefficients: Vec<Rat>,
}

/// The pushforward of `n!·Lebesgue` on `P` under `g`, stored through its
/// survival function `V(λ) = n!·vol{g >= λ}`.
#[derive(Debug, Clone, PartialEq)]
pub struct DhMeasure {
    pub dim: usize,
    pub total_mass: Rat,
    /// Sorted critical values of `g` with `V` at each of them.
    pub breakpoints: Vec<(Rat, Rat)>,
    pub pieces: Vec<DhPiece>,
    /// `(position, mass)` where `V` jumps.
    pub atoms: Vec<(Rat, Rat)>,
}

pub fn dh_measure(cfg: &ToricConfig) -> Result<DhMeasure> {
    let p = cfg.polytope();
    let g = cfg.g();
    let n = p.dim();
    let nf = Rat::from_integer(factorial(n));
    let survival = |lambda: &Rat| -> Result<Rat> { Ok(g.superlevel_region(p, lambda)?.volume() * &nf) };
    let mut values: Vec<Rat> = g.cell_vertices(p)?.iter().map(|v| g.eval(v)).collect();
    values.sort();
    values.dedup();
    let breakpoints = values
        .iter()
        .map(|b| Ok((b.clone(), survival(b)?)))
        .collect::<Result<Vec<_>>>()?;
    let mut pieces = Vec::new();
    for w in values.windows(2) {
        let (lo, hi) = (&w[0], &w[1]);
        let step = (hi - lo) / ratk(n as u64 + 3);
        let samples = (1..=n as u64 + 2)
            .map(|j| {
                let x = lo + &step * ratk(j);
                Ok((x.clone(), survival(&x)?))
            })
            .collect::<Result<Vec<_>>>()?;
        let coefficients = interpolate(&samples[..=n]).expect("distinct nodes");
        let (x, v) = &samples[n + 1];
        if &eval_poly(&coefficients, x) != v {
            return Err(Error::Interpolation {
                k: 0,
                predicted: format_rat(&eval_poly(&coefficients, x)),
                counted: format_rat(v),
            });
        }
        pieces.push(DhPiece { lo: lo.clone(), hi: hi.clone(), coefficients });
    }
    let mut atoms = Vec::new();
    for (i, (b, v)) in breakpoints.iter().enumerate() {
        let right = pieces.get(i).map(|pc| eval_poly(&pc.coefficients, b)).unwrap_or_else(Rat::zero);
        let jump = v - right;
        if jump.is_positive() {
            atoms.push((b.clone(), jump));
        }
    }
    Ok(DhMeasure { dim: n, total_mass: p.volume() * nf, breakpoints, pieces, atoms })
}

impl DhMeasure {
    pub fn lambda_min(&self) -> &Rat {
        &self.breakpoints[0].0
    }

    pub fn lambda_max(&self) -> &Rat {
        &self.breakpoints.last().expect("nonempty").0
    }

    /// `V(x)`, the mass of `[x, ∞)`.
    pub fn survival(&self, x: &Rat) -> Rat {
        if x <= self.lambda_min() {
            return self.total_mass.clone();
        }
        if x > self.lambda_max() {
            return Rat::zero();
        }
        if let Some((_, v)) = self.breakpoints.iter().find(|(b, _)| b == x) {
            return v.clone();
        }
        let piece = self.pieces.iter().find(|pc| &pc.lo < x && x < &pc.hi).expect("x inside the support");
        eval_poly(&piece.coefficients, x)
    }

    /// `V(x+)`, the mass of `(x, ∞)`.
    pub fn survival_right(&self, x: &Rat) -> Rat {
        if x < self.lambda_min() {
            return self.total_mass.clone();
        }
        if x >= self.lambda_max() {
            return Rat::zero();
        }
        let piece = self.pieces.iter().find(|pc| &pc.lo <= x && x < &pc.hi).expect("x inside the support");
        eval_poly(&piece.coefficients, x)
    }

    /// `∫ λ^p dμ = -∫ λ^p dV`, atoms included.
    pub fn moment(&self, p: u32) -> Rat {
        let mut total: Rat = self.atoms.iter().map(|(x, m)| pow(x, p) * m).sum();
        for piece in &self.pieces {
            // -V'(λ) λ^p integrated exactly on (lo, hi).
            let mut integrand = vec![Rat::zero(); piece.coefficients.len() + p as usize];
            for (i, c) in piece.coefficients.iter().enumerate().skip(1) {
                integrand[i - 1 + p as usize] -= c * ratk(i as u64);
            }
            let antider: Vec<Rat> = std::iter::once(Rat::zero())
                .chain(integrand.iter().enumerate().map(|(i, c)| c / ratk(i as u64 + 1)))
                .collect();
            total += eval_poly(&antider, &piece.hi) - eval_poly(&antider, &piece.lo);
        }
        total
    }
}

/// Distances between the survival functions of a spectral measure and a
/// DH measure.
#[derive(Debug, Clone, PartialEq)]
pub struct CdfDistance {
    /// `sup_x |S_μ(x) - S_ν(x)|`, exact.
    pub kolmogorov: Rat,
    /// `∫ |S_μ - S_ν| dx`.
    pub l1: f64,
}

pub fn cdf_distance(mu: &SpectralMeasure, nu: &DhMeasure) -> CdfDistance {
    let mut points: Vec<Rat> = mu.atoms.iter().map(|a| a.0.clone()).collect();
    points.extend(nu.breakpoints.iter().map(|b| b.0.clone()));
    points.sort();
    points.dedup();
    let mut sup = (mu.total_mass() - &nu.total_mass).abs();
    for x in &points {
        sup = sup.max((mu.survival(x) - nu.survival(x)).abs());
        sup = sup.max((mu.survival_right(x) - nu.survival_right(x)).abs());
    }
    let mut l1 = 0.0;
    for w in points.windows(2) {
        let level = to_f64(&mu.survival_right(&w[0]));
        let (a, b) = (to_f64(&w[0]), to_f64(&w[1]));
        let diff = |x: f64| level - nu.survival_f64(x);
        l1 += abs_integral(diff, a, b);
    }
    CdfDistance { kolmogorov: sup, l1 }
}

impl DhMeasure {
    fn survival_f64(&self, x: f64) -> f64 {
        if x <= to_f64(self.lambda_min()) {
            return to_f64(&self.total_mass);
        }
        if x > to_f64(self.lambda_max()) {
            return 0.0;
        }
        let piece = self
            .pieces
            .iter()
            .find(|pc| x <= to_f64(&pc.hi))
            .unwrap_or_else(|| self.pieces.last().expect("nonempty"));
        piece.coefficients.iter().rev().fold(0.0, |acc, c| acc * x + to_f64(c))
    }
}

/// `∫_a^b |f|` for a monotone polynomial-valued difference `f`: a Gauss
/// rule on each side of the (bisected) sign change.
fn abs_integral(f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let gauss = |lo: f64, hi: f64| {
        const NODES: [(f64, f64); 3] = [(-0.774_596_669_241_483_4, 5.0 / 9.0), (0.0, 8.0 / 9.0), (0.774_596_669_241_483_4, 5.0 / 9.0)];
        let (m, h) = ((lo + hi) / 2.0, (hi - lo) / 2.0);
        NODES.iter().map(|(t, w)| w * f(m + h * t)).sum::<f64>() * h
    };
    let (fa, fb) = (f(a), f(b));
    if fa * fb >= 0.0 {
        return gauss(a, b).abs();
    }
    let (mut lo, mut hi) = (a, b);
    for _ in 0..100 {
        let mid = (lo + hi) / 2.0;
        if f(mid) * fa > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    gauss(a, lo).abs() + gauss(lo, b).abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{NormalConeConfig, Rounding};
    use crate::pl::{Affine, PlConcave};
    use crate::polytope::Polytope;
    use crate::rat::{int, rat};

    fn on_unit(affines: Vec<Affine>) -> ToricConfig {
        let p = Polytope::interval(int(0), int(1)).unwrap();
        let g = PlConcave::new(affines, &p).unwrap();
        ToricConfig::new(p, g, Rounding::Ceil).unwrap()
    }

    fn product() -> TestConfiguration {
        TestConfiguration::Toric(on_unit(vec![Affine::new(vec![int(1)], int(0))]))
    }

    fn normal_cone() -> TestConfiguration {
        TestConfiguration::NormalCone(
            NormalConeConfig::new(Polytope::interval(int(0), int(1)).unwrap(), 0, rat(1, 2)).unwrap(),
        )
    }

    #[test]
    fn spectral_examples() {
        let mu = spectral_measure(&product(), 2).unwrap();
        assert_eq!(mu.atoms, vec![(int(0), rat(1, 2)), (rat(1, 2), rat(1, 2)), (int(1), rat(1, 2))]);
        assert_eq!(mu.total_mass(), rat(3, 2));
        let mu = spectral_measure(&normal_cone(), 4).unwrap();
        assert_eq!(mu.atoms, vec![(rat(-1, 2), rat(1, 4)), (rat(-1, 4), rat(1, 4)), (int(0), rat(3, 4))]);
        let trivial = TestConfiguration::Toric(on_unit(vec![Affine::new(vec![int(0)], int(0))]));
        assert_eq!(spectral_measure(&trivial, 5).unwrap().atoms, vec![(int(0), rat(6, 5))]);
    }

    #[test]
    fn dh_examples() {
        let dh = dh_measure(product().toric()).unwrap();
        assert_eq!(dh.pieces.len(), 1);
        assert_eq!(dh.pieces[0].coefficients, vec![int(1), int(-1)]);
        assert!(dh.atoms.is_empty());
        let dh = dh_measure(normal_cone().toric()).unwrap();
        assert_eq!(dh.pieces[0].coefficients, vec![rat(1, 2), int(-1)]);
        assert_eq!(dh.atoms, vec![(int(0), rat(1, 2))]);
        assert_eq!(dh.survival(&int(0)), rat(1, 2));
        assert_eq!(dh.survival_right(&int(0)), int(0));
        let dh = dh_measure(&on_unit(vec![Affine::new(vec![int(0)], int(0))])).unwrap();
        assert_eq!(dh.atoms, vec![(int(0), int(1))]);
    }

    #[test]
    fn moments() {
        let dh = dh_measure(product().toric()).unwrap();
        assert_eq!(dh.moment(0), int(1));
        assert_eq!(dh.moment(1), rat(1, 2));
        assert_eq!(dh.moment(2), rat(1, 3));
        let dh = dh_measure(normal_cone().toric()).unwrap();
        assert_eq!(dh.moment(1), rat(-1, 8));
    }

    #[test]
    fn two_dimensional_dh() {
        let p = Polytope::simplex(2, int(1)).unwrap();
        let g = PlConcave::new(vec![Affine::new(vec![int(1), int(0)], int(0))], &p).unwrap();
        let dh = dh_measure(&ToricConfig::new(p, g, Rounding::Ceil).unwrap()).unwrap();
        // V(λ) = 2·(1-λ)²/2.
        assert_eq!(dh.pieces[0].coefficients, vec![int(1), int(-2), int(1)]);
        assert_eq!(dh.moment(1), rat(1, 3));
    }

    #[test]
    fn kolmogorov_distance() {
        let dh = dh_measure(product().toric()).unwrap();
        for k in [4u64, 8, 16, 256] {
            let d = cdf_distance(&spectral_measure(&product(), k).unwrap(), &dh);
            assert_eq!(d.kolmogorov, rat(1, k as i64));
        }
        let dh_nc = dh_measure(normal_cone().toric()).unwrap();
        let mut prev = None;
        for k in [8u64, 16, 32, 64] {
            let d = cdf_distance(&spectral_measure(&normal_cone(), k).unwrap(), &dh_nc);
            if let Some(p) = prev {
                assert!(d.kolmogorov <= p);
            }
            prev = Some(d.kolmogorov);
        }
    }

    #[test]
    fn identical_measures_have_zero_distance() {
        let trivial = on_unit(vec![Affine::new(vec![int(0)], int(0))]);
        let dh = dh_measure(&trivial).unwrap();
        let mu = SpectralMeasure { level: 1, dim: 1, atoms: vec![(int(0), int(1))] };
        let d = cdf_distance(&mu, &dh);
        assert_eq!(d.kolmogorov, int(0));
        assert_eq!(d.l1, 0.0);
    }

    #[test]
    fn l1_distance_product() {
        // Each step contributes a triangle of area 1/(2k^2), plus the excess
        // atom at 0 contributes nothing to the L1 integral over the support.
        let dh = dh_measure(product().toric()).unwrap();
        let k = 10u64;
        let d = cdf_distance(&spectral_measure(&product(), k).unwrap(), &dh);
        assert!((d.l1 - 1.0 / (2.0 * k as f64)).abs() < 1e-12, "{}", d.l1);
    }
}
