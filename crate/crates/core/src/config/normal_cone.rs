//! Deformation to the normal cone of a torus-fixed point.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::linalg::det;
use crate::pl::{Affine, PlConcave};
use crate::polytope::Polytope;
use crate::rat::{format_rat, Rat};

use super::filtration::FiltrationTable;
use super::toric::{big, Rounding, ToricConfig};

/// `ℓ_v`, the sum of lattice distances to the facets through vertex `v`.
/// Fails unless the corner is smooth (Delzant).
pub fn corner_function(p: &Polytope, vertex: usize) -> Result<Affine> {
    if vertex >= p.vertices().len() {
        return Err(Error::InvalidParameter(format!(
            "vertex index {vertex} out of range (polytope has {} vertices)",
            p.vertices().len()
        )));
    }
    let facets = p.facets_at(vertex);
    if facets.len() != p.dim() {
        return Err(Error::NotDelzant(vertex));
    }
    let mut gradient = vec![Rat::zero(); p.dim()];
    let mut constant = Rat::zero();
    let mut normals = Vec::new();
    for f in facets {
        let (n, off) = p.halfspaces()[f].primitive();
        let n: Vec<Rat> = n.into_iter().map(Rat::from_integer).collect();
        for (g, c) in gradient.iter_mut().zip(&n) {
            *g -= c;
        }
        constant += off;
        normals.push(n);
    }
    if det(&normals).abs() != Rat::from_integer(BigInt::from(1)) {
        return Err(Error::NotDelzant(vertex));
    }
    Ok(Affine::new(gradient, constant))
}

/// Largest `c` for which cutting the corner at `v` by `ℓ_v >= c` keeps every
/// other vertex: the minimum of `ℓ_v` over the remaining vertices.
pub fn seshadri_fixed_point(p: &Polytope, vertex: usize) -> Result<Rat> {
    let ell = corner_function(p, vertex)?;
    Ok(p
        .vertices()
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != vertex)
        .map(|(_, w)| ell.eval(w))
        .min()
        .expect("a full-dimensional polytope has at least two vertices"))
}

#[derive(Debug, Clone)]
pub struct NormalConeConfig {
    vertex: usize,
    c: Rat,
    seshadri: Rat,
    ell: Affine,
    toric: ToricConfig,
}

impl NormalConeConfig {
    pub fn new(polytope: Polytope, vertex: usize, c: Rat) -> Result<Self> {
        if !c.is_positive() {
            return Err(Error::InvalidParameter("c must be positive".into()));
        }
        let ell = corner_function(&polytope, vertex)?;
        let seshadri = seshadri_fixed_point(&polytope, vertex)?;
        if c >= seshadri {
            return Err(Error::InvalidParameter(format!(
                "c = {} must be below the Seshadri constant {}",
                format_rat(&c),
                format_rat(&seshadri)
            )));
        }
        let dim = polytope.dim();
        let cut = Affine::new(ell.gradient.clone(), &ell.constant - &c);
        let g = PlConcave::new(vec![cut, Affine::new(vec![Rat::zero(); dim], Rat::zero())], &polytope)?;
        let toric = ToricConfig::new(polytope, g, Rounding::Ceil)?;
        Ok(NormalConeConfig { vertex, c, seshadri, ell, toric })
    }

    pub fn vertex(&self) -> usize {
        self.vertex
    }

    pub fn c(&self) -> &Rat {
        &self.c
    }

    pub fn seshadri(&self) -> &Rat {
        &self.seshadri
    }

    pub fn polytope(&self) -> &Polytope {
        self.toric.polytope()
    }

    /// The equivalent toric configuration `g = min(ℓ_v - c, 0)`.
    pub fn toric(&self) -> &ToricConfig {
        &self.toric
    }

    /// Levels must make `ck` integral.
    pub fn divisibility(&self) -> u64 {
        self.c.denom().to_u64().unwrap_or(u64::MAX)
    }

    fn check_level(&self, k: u64) -> Result<()> {
        let m = self.divisibility();
        if k == 0 || k % m != 0 {
            return Err(Error::Divisibility { k, period: m });
        }
        Ok(())
    }

    /// `dim W_{λ,k}` for integer `m = ⌈λk⌉`: sections vanishing to order at
    /// least `m + ck` at the fixed point when `m <= 0`, none otherwise.
    pub fn w_dim(&self, m: i64, k: u64) -> Result<u64> {
        self.check_level(k)?;
        if m > 0 {
            return Ok(0);
        }
        let threshold = Rat::from_integer(BigInt::from(m)) + &self.c * big(k);
        let kr = big(k);
        Ok(self
            .polytope()
            .lattice_points(k)
            .iter()
            .filter(|u| {
                let x: Vec<Rat> = u.iter().map(|&ui| Rat::from_integer(BigInt::from(ui)) / &kr).collect();
                self.ell.eval(&x) * &kr >= threshold
            })
            .count() as u64)
    }

    pub fn w_dim_at(&self, lambda: &Rat, k: u64) -> Result<u64> {
        let m = (lambda * big(k)).ceil().to_integer().to_i64().ok_or(Error::Overflow)?;
        self.w_dim(m, k)
    }

    /// Histogram by successive differences of [`NormalConeConfig::w_dim`].
    pub fn dims_by_weight(&self, k: u64) -> Result<FiltrationTable> {
        self.check_level(k)?;
        let lo = -(&self.c * big(k)).to_integer().to_i64().ok_or(Error::Overflow)? - 1;
        let mut err = None;
        let table = FiltrationTable::from_counting(k, lo, 0, |m| {
            self.w_dim(m, k).unwrap_or_else(|e| {
                err = Some(e);
                0
            })
        });
        match err {
            Some(e) => Err(e),
            None => Ok(table),
        }
    }
}
