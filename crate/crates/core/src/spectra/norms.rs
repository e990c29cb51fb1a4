//! Moments `Q_p`, central moments `N_p` and the norms `‖T‖_p`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::config::{FiltrationTable, TestConfiguration, ToricConfig};
use crate::error::{Error, Result};
use crate::pl::{integrate_pl_power, sup_abs};
use crate::rat::{pow, to_f64, Rat};

use super::invariants::{fit_invariants, InvariantSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Exponent {
    Finite(u32),
    Infinity,
}

impl Exponent {
    /// The conjugate exponent `q` with `1/p + 1/q = 1`, as a float.
    pub fn conjugate(self) -> f64 {
        match self {
            Exponent::Infinity => 1.0,
            Exponent::Finite(1) => f64::INFINITY,
            Exponent::Finite(p) => p as f64 / (p as f64 - 1.0),
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Finite(p) => write!(f, "{p}"),
            Exponent::Infinity => f.write_str("inf"),
        }
    }
}

impl FromStr for Exponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "inf" | "infinity" => Ok(Exponent::Infinity),
            _ => match s.parse::<u32>() {
                Ok(0) => Err(Error::InvalidParameter("p = 0 is not a norm; use hilbert_dim".into())),
                Ok(p) => Ok(Exponent::Finite(p)),
                Err(_) => Err(Error::InvalidParameter(format!("invalid exponent {s:?}"))),
            },
        }
    }
}

/// Exact limit values from integrating over the moment polytope.
#[derive(Debug, Clone, PartialEq)]
pub struct NormReport {
    pub p: Exponent,
    /// `∫_P g^p` (absent for `p = ∞`).
    pub q_p: Option<Rat>,
    /// `∫_P (g - F₀)^p` (absent for `p = ∞`).
    pub n_p: Option<Rat>,
    /// `‖T‖_p^p = ∫_P |g - F₀|^p`, or `‖T‖_∞` itself.
    pub norm_pow: Rat,
    pub norm: f64,
}

/// `F₀` through the integral route `∫_P g / vol(P)`.
pub fn integral_f0(cfg: &ToricConfig) -> Result<Rat> {
    let p = cfg.polytope();
    Ok(integrate_pl_power(cfg.g(), p, 1, &Rat::zero(), false)? / p.volume())
}

pub fn norms(cfg: &TestConfiguration, p: Exponent) -> Result<NormReport> {
    let t = cfg.toric();
    let (poly, g) = (t.polytope(), t.g());
    let f0 = integral_f0(t)?;
    match p {
        Exponent::Infinity => {
            let sup = sup_abs(g, poly, &f0)?;
            Ok(NormReport { p, q_p: None, n_p: None, norm: to_f64(&sup), norm_pow: sup })
        }
        Exponent::Finite(0) => Err(Error::InvalidParameter("p = 0 is not a norm; use hilbert_dim".into())),
        Exponent::Finite(e) => {
            let q = integrate_pl_power(g, poly, e as usize, &Rat::zero(), false)?;
            let n = integrate_pl_power(g, poly, e as usize, &f0, false)?;
            let a = integrate_pl_power(g, poly, e as usize, &f0, true)?;
            Ok(NormReport { p, q_p: Some(q), n_p: Some(n), norm: to_f64(&a).powf(1.0 / e as f64), norm_pow: a })
        }
    }
}

/// Level-`k` Riemann sums of the three moments, with `λ` centred at the
/// level-`k` mean `w(k)/(kN_k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelSums {
    pub level: u64,
    pub q_p: Rat,
    pub n_p: Rat,
    pub norm_pow: Rat,
}

pub fn level_sums(cfg: &TestConfiguration, k: u64, p: u32) -> Result<LevelSums> {
    Ok(level_sums_from_table(&cfg.dims_by_weight(k)?, cfg.dim(), p))
}

/// [`level_sums`] for an already computed weight table.
pub fn level_sums_from_table(table: &FiltrationTable, dim: usize, p: u32) -> LevelSums {
    let k = table.level;
    let kr = Rat::from_integer(BigInt::from(k));
    let scale = pow(&kr, dim as u32);
    let n_k = Rat::from_integer(BigInt::from(table.total_dim()));
    let mean = Rat::from_integer(BigInt::from(table.total_weight())) / (&kr * &n_k);
    let (mut q, mut n, mut a) = (Rat::zero(), Rat::zero(), Rat::zero());
    for (w, d) in &table.entries {
        let x = Rat::from_integer(BigInt::from(*w)) / &kr;
        let d = Rat::from_integer(BigInt::from(*d));
        let c = &x - &mean;
        q += pow(&x, p) * &d;
        n += pow(&c, p) * &d;
        a += pow(&c.abs(), p) * &d;
    }
    LevelSums { level: k, q_p: q / &scale, n_p: n / &scale, norm_pow: a / &scale }
}

/// Checks `N₂ = Q₂ - b₀²/a₀` with `N₂`, `Q₂` from exact integration and
/// `a₀`, `b₀` from the fitted lattice counts.
pub fn check_n2_identity(cfg: &TestConfiguration, inv: &InvariantSet) -> Result<bool> {
    let r = norms(cfg, Exponent::Finite(2))?;
    let (q2, n2) = (r.q_p.expect("finite"), r.n_p.expect("finite"));
    Ok(n2 == q2 - &inv.b0 * &inv.b0 / &inv.a0)
}

/// `-F₁/‖T‖₂` when `‖T‖₂ > 0`.
#[derive(Debug, Clone, PartialEq)]
pub enum StabilityRatio {
    Defined {
        value: f64,
        /// `-F₁·|F₁| / ‖T‖₂²`, the exact signed square of the ratio.
        signed_square: Rat,
    },
    Undefined {
        diagnosis: &'static str,
    },
}

pub const TRIVIAL_RAY_DIAGNOSIS: &str = "geodesic ray is φ + F₀t";

pub fn strong_stability_ratio(cfg: &TestConfiguration) -> Result<StabilityRatio> {
    let inv = fit_invariants(cfg)?;
    stability_ratio_from(&inv, &norms(cfg, Exponent::Finite(2))?)
}

pub fn stability_ratio_from(inv: &InvariantSet, l2: &NormReport) -> Result<StabilityRatio> {
    if l2.norm_pow.is_zero() {
        return Ok(StabilityRatio::Undefined { diagnosis: TRIVIAL_RAY_DIAGNOSIS });
    }
    let signed_square = -&inv.f1 * inv.f1.abs() / &l2.norm_pow;
    Ok(StabilityRatio::Defined { value: -to_f64(&inv.f1) / l2.norm, signed_square })
}
