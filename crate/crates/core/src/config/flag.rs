//! Flag-ideal test configurations on projective space built from monomial
//! ideals.
//!
//! Sections of `O(dk)` are monomials `x^a` with `|a| = dk`. The central fibre
//! weight of `x^a` at level `k` is minus the least power of `t` for which
//! `t^p x^a` lies in `(J_0 + tJ_1 + … + t^{N-1}J_{N-1} + (t^N))^{ck}`. Ideal
//! products are tested on Newton polyhedra through finitely many support
//! functions.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{dot, kernel_vector, rank, solve};
use crate::pl::{Affine, PlConcave};
use crate::polytope::{subsets, Polytope};
use crate::rat::{format_rat, Rat};

use super::filtration::FiltrationTable;
use super::toric::{big, Rounding, ToricConfig};

/// A monomial ideal kept as its minimal generating exponents.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonomialIdeal {
    generators: Vec<Vec<u32>>,
}

fn divides(g: &[u32], a: &[u32]) -> bool {
    g.iter().zip(a).all(|(x, y)| x <= y)
}

impl MonomialIdeal {
    pub fn new(mut generators: Vec<Vec<u32>>) -> Result<Self> {
        let len = generators
            .first()
            .map(Vec::len)
            .ok_or_else(|| Error::InvalidParameter("a monomial ideal needs at least one generator".into()))?;
        if let Some(g) = generators.iter().find(|g| g.len() != len) {
            return Err(Error::DimensionMismatch { expected: len, found: g.len() });
        }
        generators.sort();
        generators.dedup();
        let minimal: Vec<Vec<u32>> = generators
            .iter()
            .filter(|g| !generators.iter().any(|h| h != *g && divides(h, g)))
            .cloned()
            .collect();
        Ok(MonomialIdeal { generators: minimal })
    }

    pub fn generators(&self) -> &[Vec<u32>] {
        &self.generators
    }

    pub fn contains(&self, a: &[u32]) -> bool {
        self.generators.iter().any(|g| divides(g, a))
    }

    /// Minimal generators of `J^m` by expanding generator products.
    pub fn power_generators(&self, m: u32) -> Vec<Vec<u32>> {
        let mut current: BTreeSet<Vec<u32>> = BTreeSet::new();
        current.insert(vec![0; self.generators[0].len()]);
        for _ in 0..m {
            let mut next = BTreeSet::new();
            for p in &current {
                for g in &self.generators {
                    next.insert(p.iter().zip(g).map(|(x, y)| x + y).collect::<Vec<u32>>());
                }
            }
            current = next;
        }
        current.into_iter().collect()
    }

    /// `min_g <v, g>`, the support function of the Newton polyhedron.
    pub fn support(&self, v: &[Rat]) -> Rat {
        self.generators
            .iter()
            .map(|g| g.iter().zip(v).map(|(&e, c)| c * Rat::from_integer(BigInt::from(e))).sum::<Rat>())
            .min()
            .expect("nonempty")
    }
}

fn primitive_nonnegative(v: Vec<Rat>) -> Option<Vec<Rat>> {
    let v = if v.iter().all(|c| !c.is_positive()) { v.into_iter().map(|c| -c).collect() } else { v };
    if v.iter().any(Signed::is_negative) || v.iter().all(Zero::is_zero) {
        return None;
    }
    let l = v.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let ints: Vec<BigInt> = v.iter().map(|c| (c * Rat::from_integer(l.clone())).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
    Some(ints.into_iter().map(|c| Rat::from_integer(c / &g)).collect())
}

/// Nonnegative normals containing every facet normal of every Minkowski
/// combination `Σ s_l Newt(J_l)`: kernels of `d - 1` edge directions drawn
/// from generator differences and coordinate directions.
fn candidate_normals(ideals: &[MonomialIdeal], ambient: usize) -> Vec<Vec<Rat>> {
    let mut dirs: BTreeSet<Vec<Rat>> = BTreeSet::new();
    for j in 0..ambient {
        let mut e = vec![Rat::zero(); ambient];
        e[j] = Rat::one();
        dirs.insert(e);
    }
    for ideal in ideals {
        let gens = ideal.generators();
        for (i, a) in gens.iter().enumerate() {
            for b in &gens[i + 1..] {
                let d: Vec<Rat> = a.iter().zip(b).map(|(x, y)| Rat::from_integer(BigInt::from(*x as i64 - *y as i64))).collect();
                if let Some(d) = primitive_direction(d) {
                    dirs.insert(d);
                }
            }
        }
    }
    let dirs: Vec<Vec<Rat>> = dirs.into_iter().collect();
    let mut normals = BTreeSet::new();
    for subset in subsets(dirs.len(), ambient - 1) {
        let rows: Vec<Vec<Rat>> = subset.iter().map(|&i| dirs[i].clone()).collect();
        if rank(&rows) != ambient - 1 {
            continue;
        }
        if let Some(v) = kernel_vector(&rows, ambient).and_then(primitive_nonnegative) {
            normals.insert(v);
        }
    }
    normals.into_iter().collect()
}

fn primitive_direction(d: Vec<Rat>) -> Option<Vec<Rat>> {
    let first = d.iter().find(|c| !c.is_zero())?.clone();
    Some(d.into_iter().map(|c| if first.is_negative() { -c } else { c }).collect())
}

#[derive(Debug, Clone)]
pub struct FlagIdealConfig {
    proj_dim: usize,
    degree: u32,
    c: Rat,
    flag: Vec<MonomialIdeal>,
    normals: Vec<Vec<Rat>>,
    /// `supports[l][v]` is `h_{J_l}` at normal `v`.
    supports: Vec<Vec<Rat>>,
    toric: ToricConfig,
}

impl FlagIdealConfig {
    /// `flag[l]` holds the generator exponents of `J_l` in the `n + 1`
    /// homogeneous variables of `ℙ^n`; `L = O(degree)`.
    pub fn new(proj_dim: usize, degree: u32, flag: Vec<Vec<Vec<u32>>>, c: Rat) -> Result<Self> {
        if proj_dim == 0 || degree == 0 {
            return Err(Error::InvalidParameter("projective dimension and degree must be positive".into()));
        }
        if flag.is_empty() {
            return Err(Error::InvalidParameter("the flag needs at least one ideal".into()));
        }
        if !c.is_positive() {
            return Err(Error::InvalidParameter("c must be positive".into()));
        }
        let flag = flag.into_iter().map(MonomialIdeal::new).collect::<Result<Vec<_>>>()?;
        for ideal in &flag {
            if ideal.generators()[0].len() != proj_dim + 1 {
                return Err(Error::DimensionMismatch { expected: proj_dim + 1, found: ideal.generators()[0].len() });
            }
        }
        for (l, pair) in flag.windows(2).enumerate() {
            if let Some(g) = pair[0].generators().iter().find(|g| !pair[1].contains(g)) {
                return Err(Error::InvalidParameter(format!(
                    "flag is not increasing: generator {g:?} of J_{l} is not in J_{}",
                    l + 1
                )));
            }
        }
        let normals = candidate_normals(&flag, proj_dim + 1);
        let supports = flag.iter().map(|j| normals.iter().map(|v| j.support(v)).collect()).collect();
        let polytope = Polytope::simplex(proj_dim, Rat::from_integer(BigInt::from(degree)))?;
        let mut cfg = FlagIdealConfig {
            proj_dim,
            degree,
            c,
            flag,
            normals,
            supports,
            toric: ToricConfig::new(polytope.clone(), PlConcave::constant(proj_dim, Rat::zero()), Rounding::Ceil)?,
        };
        for (l, ideal) in cfg.flag.iter().enumerate() {
            if cfg.oracle_mismatches(l, 2) > 0 {
                return Err(Error::InvalidParameter(format!(
                    "J_{l} = {:?} is not integrally closed in low powers",
                    ideal.generators()
                )));
            }
        }
        let g = cfg.limit_function(&polytope)?;
        cfg.toric = ToricConfig::new(polytope, g, Rounding::Ceil)?;
        Ok(cfg)
    }

    pub fn proj_dim(&self) -> usize {
        self.proj_dim
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn c(&self) -> &Rat {
        &self.c
    }

    pub fn steps(&self) -> usize {
        self.flag.len()
    }

    pub fn flag(&self) -> &[MonomialIdeal] {
        &self.flag
    }

    pub fn normals(&self) -> &[Vec<Rat>] {
        &self.normals
    }

    /// The toric configuration whose limit measures agree with this flag.
    pub fn toric(&self) -> &ToricConfig {
        &self.toric
    }

    /// Levels must make `ck` integral.
    pub fn period(&self) -> u64 {
        self.c.denom().to_u64().unwrap_or(u64::MAX)
    }

    fn check_level(&self, k: u64) -> Result<u64> {
        let m = self.period();
        if k == 0 || k % m != 0 {
            return Err(Error::Divisibility { k, period: m });
        }
        (&self.c * big(k)).to_integer().to_u64().ok_or(Error::Overflow)
    }

    /// Whether `x^a ∈ Π_l Newt(J_l)^{mult[l]}` (integral closure of the
    /// product).
    pub fn newton_contains(&self, mult: &[u64], a: &[u32]) -> bool {
        self.normals.iter().enumerate().all(|(vi, v)| {
            let lhs: Rat = a.iter().zip(v).map(|(&e, c)| c * Rat::from_integer(BigInt::from(e))).sum();
            let rhs: Rat = mult
                .iter()
                .zip(&self.supports)
                .map(|(&m, h)| &h[vi] * Rat::from_integer(BigInt::from(m)))
                .sum();
            lhs >= rhs
        })
    }

    /// Least `t`-power `Σ l·i_l` over `i ∈ Z^{N+1}_{≥0}` with `Σ i = ck` and
    /// `x^a ∈ Π J_l^{i_l}`.
    pub fn min_t_power(&self, a: &[u32], ck: u64) -> u64 {
        let n = self.flag.len();
        let mut best = n as u64 * ck;
        let mut mult = vec![0u64; n];
        self.search(a, ck, 0, 0, 0, &mut mult, &mut best);
        best
    }

    fn search(&self, a: &[u32], ck: u64, l: usize, used: u64, power: u64, mult: &mut Vec<u64>, best: &mut u64) {
        let n = self.flag.len();
        if l == n {
            let total = power + n as u64 * (ck - used);
            if total < *best && self.newton_contains(mult, a) {
                *best = total;
            }
            return;
        }
        // The cheapest completion puts all remaining multiplicity on J_l.
        if power + l as u64 * (ck - used) >= *best {
            return;
        }
        for i in 0..=(ck - used) {
            mult[l] = i;
            self.search(a, ck, l + 1, used + i, power + l as u64 * i, mult, best);
        }
        mult[l] = 0;
    }

    /// Exponent vectors of the degree-`dk` monomials, ordered like the
    /// lattice points of `k·dΔ` they correspond to.
    pub fn monomials(&self, k: u64) -> Vec<Vec<u32>> {
        let total = self.degree as i64 * k as i64;
        self.toric
            .polytope()
            .lattice_points(k)
            .into_iter()
            .map(|u| {
                let mut a = vec![(total - u.iter().sum::<i64>()) as u32];
                a.extend(u.iter().map(|&x| x as u32));
                a
            })
            .collect()
    }

    /// Central fibre weights of all degree-`dk` monomials.
    pub fn weights(&self, k: u64) -> Result<Vec<i64>> {
        let ck = self.check_level(k)?;
        Ok(self.monomials(k).par_iter().map(|a| -(self.min_t_power(a, ck) as i64)).collect())
    }

    pub fn dims_by_weight(&self, k: u64) -> Result<FiltrationTable> {
        Ok(FiltrationTable::from_weights(k, self.weights(k)?))
    }

    /// `dim W_{λ,k}`: monomials `x^a` with `t^m x^a` in the flag power for
    /// `m = -⌈λk⌉`.
    pub fn w_dim(&self, lambda: &Rat, k: u64) -> Result<u64> {
        let ck = self.check_level(k)?;
        let m = -(lambda * big(k)).ceil().to_integer().to_i64().ok_or(Error::Overflow)?;
        if m < 0 {
            return Ok(0);
        }
        if m as u64 >= self.flag.len() as u64 * ck {
            return Ok(self.toric.polytope().count_lattice_points(k));
        }
        Ok(self
            .monomials(k)
            .par_iter()
            .filter(|a| self.min_t_power(a, ck) <= m as u64)
            .count() as u64)
    }

    /// Number of monomials, over degrees `m·min_deg ..= m·max_deg + 2`,
    /// where Newton-region membership of `J_l^m` disagrees with expanding
    /// generator products.
    pub fn oracle_mismatches(&self, l: usize, m: u32) -> usize {
        let ideal = &self.flag[l];
        let degs: Vec<u32> = ideal.generators().iter().map(|g| g.iter().sum()).collect();
        let lo = m * degs.iter().min().unwrap();
        let hi = m * degs.iter().max().unwrap() + 2;
        let gens = ideal.power_generators(m);
        let mut mult = vec![0u64; self.flag.len()];
        mult[l] = m as u64;
        let mut bad = 0;
        for deg in lo..=hi {
            for a in monomials_of_degree(self.proj_dim + 1, deg) {
                let brute = gens.iter().any(|g| divides(g, &a));
                if brute != self.newton_contains(&mult, &a) {
                    bad += 1;
                }
            }
        }
        bad
    }

    /// `g(x) = -min{Σ l s_l : s ≥ 0, Σ s = c, x̂ ∈ Σ s_l Newt(J_l)}` with
    /// `x̂ = (d - Σx, x)`, rewritten by LP duality as the minimum of the
    /// affine functions `-(c z + Σ_v y_v <v, x̂>)` over the vertices
    /// `(z, y)` of `{y ≤ 0, z + Σ_v y_v h_l(v) ≤ l for l ≤ N}` (`h_N = 0`).
    fn limit_function(&self, polytope: &Polytope) -> Result<PlConcave> {
        let nv = self.normals.len();
        let steps = self.flag.len();
        let vars = 1 + nv;
        // Constraint rows as (coefficients, bound) for `row · (z, y) ≤ bound`.
        let mut rows: Vec<(Vec<Rat>, Rat)> = Vec::new();
        for v in 0..nv {
            let mut r = vec![Rat::zero(); vars];
            r[1 + v] = Rat::one();
            rows.push((r, Rat::zero()));
        }
        for l in 0..=steps {
            let mut r = vec![Rat::zero(); vars];
            r[0] = Rat::one();
            if l < steps {
                for v in 0..nv {
                    r[1 + v] = self.supports[l][v].clone();
                }
            }
            rows.push((r, Rat::from_integer(BigInt::from(l))));
        }
        let d = Rat::from_integer(BigInt::from(self.degree));
        let mut affines = Vec::new();
        for subset in subsets(rows.len(), vars) {
            let a: Vec<Vec<Rat>> = subset.iter().map(|&i| rows[i].0.clone()).collect();
            let b: Vec<Rat> = subset.iter().map(|&i| rows[i].1.clone()).collect();
            let Some(p) = solve(&a, &b) else { continue };
            if rows.iter().any(|(r, bound)| &dot(r, &p) > bound) {
                continue;
            }
            let (z, y) = (&p[0], &p[1..]);
            let mut gradient = vec![Rat::zero(); self.proj_dim];
            let mut constant = -(&self.c * z);
            for (yv, v) in y.iter().zip(&self.normals) {
                constant -= yv * &v[0] * &d;
                for j in 0..self.proj_dim {
                    gradient[j] -= yv * (&v[j + 1] - &v[0]);
                }
            }
            affines.push(Affine::new(gradient, constant));
        }
        if affines.is_empty() {
            return Err(Error::InvalidParameter(format!(
                "flag with c = {} has no dual vertices",
                format_rat(&self.c)
            )));
        }
        PlConcave::pruned(affines, polytope)
    }
}

/// All exponent vectors of total degree `deg` in `vars` variables.
pub fn monomials_of_degree(vars: usize, deg: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur = vec![0u32; vars];
    fn rec(i: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if i + 1 == cur.len() {
            cur[i] = left;
            out.push(cur.clone());
            return;
        }
        for e in (0..=left).rev() {
            cur[i] = e;
            rec(i + 1, left - e, cur, out);
        }
    }
    rec(0, deg, &mut cur, &mut out);
    out
}
