//! Concave piecewise-linear functions on polytopes and exact integration of
//! their powers.

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::linalg::dot;
use crate::polytope::{simplex_volume, Halfspace, Polytope, Region};
use crate::rat::{factorial, min_max, Rat};

/// `x -> <gradient, x> + constant`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Affine {
    pub gradient: Vec<Rat>,
    pub constant: Rat,
}

impl Affine {
    pub fn new(gradient: Vec<Rat>, constant: Rat) -> Self {
        Affine { gradient, constant }
    }

    pub fn eval(&self, x: &[Rat]) -> Rat {
        dot(&self.gradient, x) + &self.constant
    }

    pub fn eval_f64(&self, x: &[f64]) -> f64 {
        let g: f64 = self.gradient.iter().zip(x).map(|(a, b)| crate::rat::to_f64(a) * b).sum();
        g + crate::rat::to_f64(&self.constant)
    }

    /// The halfspace `self(x) >= level`.
    pub fn at_least(&self, level: &Rat) -> Halfspace {
        Halfspace::new(self.gradient.iter().map(|c| -c).collect(), &self.constant - level)
    }

    /// The halfspace `self(x) <= level`.
    pub fn at_most(&self, level: &Rat) -> Halfspace {
        Halfspace::new(self.gradient.clone(), level - &self.constant)
    }

    fn minus(&self, other: &Affine) -> Affine {
        Affine::new(
            self.gradient.iter().zip(&other.gradient).map(|(a, b)| a - b).collect(),
            &self.constant - &other.constant,
        )
    }
}

/// `g = min_i affines[i]`, with every piece active on a full-dimensional
/// part of the polytope it was built against.
#[derive(Debug, Clone, PartialEq)]
pub struct PlConcave {
    affines: Vec<Affine>,
}

/// A simplex of a decomposition on which `g` equals a single affine piece.
#[derive(Debug, Clone)]
pub struct Cell {
    pub vertices: Vec<Vec<Rat>>,
    pub piece: usize,
}

#[derive(Debug, Clone)]
pub struct CellDecomposition {
    pub cells: Vec<Cell>,
}

impl PlConcave {
    /// Validates dimensions and irredundancy against `p`.
    pub fn new(affines: Vec<Affine>, p: &Polytope) -> Result<Self> {
        if affines.is_empty() {
            return Err(Error::InvalidPl("at least one affine piece is required".into()));
        }
        for a in &affines {
            if a.gradient.len() != p.dim() {
                return Err(Error::DimensionMismatch { expected: p.dim(), found: a.gradient.len() });
            }
        }
        for (i, a) in affines.iter().enumerate() {
            if affines[..i].contains(a) {
                return Err(Error::InvalidPl(format!("affine piece {i} is a duplicate")));
            }
        }
        let g = PlConcave { affines };
        for i in 0..g.affines.len() {
            if g.piece_region(i, p)?.body().is_none() {
                return Err(Error::InvalidPl(format!(
                    "affine piece {i} never attains the minimum on a full-dimensional part of the polytope"
                )));
            }
        }
        Ok(g)
    }

    /// Keeps only pieces that are active on a full-dimensional region,
    /// removing duplicates; never fails for a nonempty input.
    pub fn pruned(mut affines: Vec<Affine>, p: &Polytope) -> Result<Self> {
        affines.sort();
        affines.dedup();
        let all = PlConcave { affines };
        let mut kept = Vec::new();
        for i in 0..all.affines.len() {
            if all.piece_region(i, p)?.body().is_some() {
                kept.push(all.affines[i].clone());
            }
        }
        PlConcave::new(kept, p)
    }

    pub fn constant(dim: usize, value: Rat) -> Self {
        PlConcave { affines: vec![Affine::new(vec![Rat::zero(); dim], value)] }
    }

    pub fn affines(&self) -> &[Affine] {
        &self.affines
    }

    pub fn dim(&self) -> usize {
        self.affines[0].gradient.len()
    }

    pub fn eval(&self, x: &[Rat]) -> Rat {
        self.affines.iter().map(|a| a.eval(x)).min().expect("nonempty")
    }

    pub fn eval_f64(&self, x: &[f64]) -> f64 {
        self.affines.iter().map(|a| a.eval_f64(x)).fold(f64::INFINITY, f64::min)
    }

    /// `g + κ`.
    pub fn shifted(&self, kappa: &Rat) -> Self {
        PlConcave {
            affines: self
                .affines
                .iter()
                .map(|a| Affine::new(a.gradient.clone(), &a.constant + kappa))
                .collect(),
        }
    }

    /// `x -> r·g((x - τ)/r)`, the function matching `g` on the polytope
    /// `rP + τ`.
    pub fn transported(&self, r: &Rat, tau: &[Rat]) -> Self {
        PlConcave {
            affines: self
                .affines
                .iter()
                .map(|a| Affine::new(a.gradient.clone(), r * &a.constant - dot(&a.gradient, tau)))
                .collect(),
        }
    }

    /// The region of `p` where piece `i` attains the minimum.
    pub fn piece_region(&self, i: usize, p: &Polytope) -> Result<Region> {
        let mut hs = p.halfspaces().to_vec();
        for (j, other) in self.affines.iter().enumerate() {
            if j != i {
                hs.push(self.affines[i].minus(other).at_most(&Rat::zero()));
            }
        }
        Polytope::region(p.dim(), hs)
    }

    /// Full-dimensional linearity regions, one per piece.
    pub fn piece_regions(&self, p: &Polytope) -> Result<Vec<(usize, Polytope)>> {
        let mut out = Vec::new();
        for i in 0..self.affines.len() {
            if let Region::Body(r) = self.piece_region(i, p)? {
                out.push((i, r));
            }
        }
        Ok(out)
    }

    pub fn cells(&self, p: &Polytope) -> Result<CellDecomposition> {
        let mut cells = Vec::new();
        for (piece, r) in self.piece_regions(p)? {
            for vertices in r.simplices() {
                cells.push(Cell { vertices, piece });
            }
        }
        Ok(CellDecomposition { cells })
    }

    /// Vertices of all linearity regions, where every extremum of `g` and
    /// every breakpoint of its distribution lies.
    pub fn cell_vertices(&self, p: &Polytope) -> Result<Vec<Vec<Rat>>> {
        let mut out: Vec<Vec<Rat>> = Vec::new();
        for (_, r) in self.piece_regions(p)? {
            out.extend(r.vertices().iter().cloned());
        }
        out.sort();
        out.dedup();
        Ok(out)
    }

    /// `(min_P g, max_P g)`.
    pub fn range(&self, p: &Polytope) -> Result<(Rat, Rat)> {
        let values: Vec<Rat> = self.cell_vertices(p)?.iter().map(|v| self.eval(v)).collect();
        Ok(min_max(&values).expect("polytope has vertices"))
    }

    /// `{x ∈ P : g(x) >= λ}`.
    pub fn superlevel_region(&self, p: &Polytope, lambda: &Rat) -> Result<Region> {
        let mut hs = p.halfspaces().to_vec();
        hs.extend(self.affines.iter().map(|a| a.at_least(lambda)));
        Polytope::region(p.dim(), hs)
    }
}

/// Complete homogeneous symmetric polynomial `h_p` of the given values.
fn complete_homogeneous(values: &[Rat], p: usize) -> Rat {
    let mut h = vec![Rat::zero(); p + 1];
    h[0] = Rat::one();
    for x in values {
        for j in 1..=p {
            let t = x * &h[j - 1];
            h[j] += t;
        }
    }
    h.swap_remove(p)
}

/// `∫_Δ ℓ^p dx` for an affine `ℓ` with values `values` at the vertices of
/// the simplex `Δ`.
pub fn simplex_power_integral(simplex: &[Vec<Rat>], values: &[Rat], p: usize) -> Rat {
    let n = simplex.len() - 1;
    let weight = Rat::new(factorial(n) * factorial(p), factorial(n + p));
    simplex_volume(simplex) * weight * complete_homogeneous(values, p)
}

fn region_power_integral(r: &Polytope, f: &Affine, p: usize) -> Rat {
    r.simplices()
        .iter()
        .map(|s| {
            let values: Vec<Rat> = s.iter().map(|v| f.eval(v)).collect();
            simplex_power_integral(s, &values, p)
        })
        .sum()
}

/// `∫_P (g - shift)^p dx`, or `∫_P |g - shift|^p dx` when `absolute` is set.
pub fn integrate_pl_power(g: &PlConcave, p: &Polytope, power: usize, shift: &Rat, absolute: bool) -> Result<Rat> {
    let mut total = Rat::zero();
    for (i, r) in g.piece_regions(p)? {
        let f = Affine::new(g.affines[i].gradient.clone(), &g.affines[i].constant - shift);
        if !absolute || power % 2 == 0 {
            total += region_power_integral(&r, &f, power);
            continue;
        }
        for (half, sign) in [(f.at_least(&Rat::zero()), 1), (f.at_most(&Rat::zero()), -1)] {
            let mut hs = r.halfspaces().to_vec();
            hs.push(half);
            if let Region::Body(piece) = Polytope::region(p.dim(), hs)? {
                let v = region_power_integral(&piece, &f, power);
                total += if sign < 0 { -v } else { v };
            }
        }
    }
    Ok(total)
}

/// `max_{cell vertices} |g - shift|`, the sup norm of `g - shift` on `P`.
pub fn sup_abs(g: &PlConcave, p: &Polytope, shift: &Rat) -> Result<Rat> {
    Ok(g
        .cell_vertices(p)?
        .iter()
        .map(|v| (g.eval(v) - shift).abs())
        .max()
        .expect("polytope has vertices"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{int, rat};
    use proptest::prelude::*;

    fn unit() -> Polytope {
        Polytope::interval(int(0), int(1)).unwrap()
    }

    fn linear_x() -> PlConcave {
        PlConcave::new(vec![Affine::new(vec![int(1)], int(0))], &unit()).unwrap()
    }

    fn tent() -> PlConcave {
        PlConcave::new(
            vec![Affine::new(vec![int(1)], int(0)), Affine::new(vec![int(-1)], int(1))],
            &unit(),
        )
        .unwrap()
    }

    fn interval_of(r: Region) -> Option<(Rat, Rat)> {
        r.body().map(|b| (b.vertices()[0][0].clone(), b.vertices()[1][0].clone()))
    }

    #[test]
    fn superlevel_examples() {
        let p = unit();
        assert_eq!(interval_of(linear_x().superlevel_region(&p, &rat(1, 2)).unwrap()), Some((rat(1, 2), int(1))));
        assert!(linear_x().superlevel_region(&p, &int(2)).unwrap().is_empty());
        assert_eq!(interval_of(tent().superlevel_region(&p, &rat(1, 4)).unwrap()), Some((rat(1, 4), rat(3, 4))));
        assert!(matches!(tent().superlevel_region(&p, &rat(1, 2)).unwrap(), Region::Degenerate(_)));
    }

    #[test]
    fn integral_examples() {
        let (g, p) = (linear_x(), unit());
        assert_eq!(integrate_pl_power(&g, &p, 2, &int(0), false).unwrap(), rat(1, 3));
        assert_eq!(integrate_pl_power(&g, &p, 2, &rat(1, 2), false).unwrap(), rat(1, 12));
        assert_eq!(integrate_pl_power(&g, &p, 1, &rat(1, 2), true).unwrap(), rat(1, 4));
        assert_eq!(integrate_pl_power(&g, &p, 1, &rat(1, 2), false).unwrap(), int(0));
    }

    #[test]
    fn riemann_sum_cross_check() {
        let n = 2000;
        let h = 1.0 / n as f64;
        let s: f64 = (0..n).map(|i| ((i as f64 + 0.5) * h - 0.5).powi(2) * h).sum();
        assert!((s - 1.0 / 12.0).abs() < 1e-6);
        let s: f64 = (0..n)
            .map(|i| {
                let x = (i as f64 + 0.5) * h;
                x.min(1.0 - x).powi(3) * h
            })
            .sum();
        let exact = integrate_pl_power(&tent(), &unit(), 3, &int(0), false).unwrap();
        assert!((s - crate::rat::to_f64(&exact)).abs() < 1e-6);
    }

    #[test]
    fn rejects_redundant_and_duplicate_pieces() {
        let p = unit();
        let dup = vec![Affine::new(vec![int(1)], int(0)), Affine::new(vec![int(1)], int(0))];
        assert!(PlConcave::new(dup.clone(), &p).is_err());
        let never = vec![Affine::new(vec![int(1)], int(0)), Affine::new(vec![int(0)], int(5))];
        assert!(PlConcave::new(never.clone(), &p).is_err());
        assert_eq!(PlConcave::pruned(never, &p).unwrap().affines().len(), 1);
        assert_eq!(PlConcave::pruned(dup, &p).unwrap().affines().len(), 1);
        let touching = vec![Affine::new(vec![int(1)], int(0)), Affine::new(vec![int(0)], int(1))];
        assert!(PlConcave::new(touching, &p).is_err());
    }

    #[test]
    fn range_and_sup() {
        let p = unit();
        assert_eq!(tent().range(&p).unwrap(), (int(0), rat(1, 2)));
        assert_eq!(sup_abs(&linear_x(), &p, &rat(1, 2)).unwrap(), rat(1, 2));
    }

    #[test]
    fn two_dimensional_integrals() {
        let p = Polytope::simplex(2, int(1)).unwrap();
        let g = PlConcave::new(vec![Affine::new(vec![int(1), int(0)], int(0))], &p).unwrap();
        // ∫ x1^2 over the standard triangle is 1/12.
        assert_eq!(integrate_pl_power(&g, &p, 2, &int(0), false).unwrap(), rat(1, 12));
        let sq = Polytope::cube(2, int(1)).unwrap();
        let g = PlConcave::new(
            vec![Affine::new(vec![int(1), int(0)], int(0)), Affine::new(vec![int(0), int(1)], int(0))],
            &sq,
        )
        .unwrap();
        // E[min(X, Y)] for independent uniforms is 1/3.
        assert_eq!(integrate_pl_power(&g, &sq, 1, &int(0), false).unwrap(), rat(1, 3));
    }

    fn small_rat() -> impl Strategy<Value = Rat> {
        (-6i64..=6, 1i64..=4).prop_map(|(n, d)| rat(n, d))
    }

    proptest! {
        #[test]
        fn slice_volume_is_monotone(a in small_rat(), b in small_rat(), c in small_rat(), d in small_rat()) {
            let p = Polytope::cube(2, int(1)).unwrap();
            let g = PlConcave::pruned(vec![
                Affine::new(vec![a.clone(), b.clone()], int(0)),
                Affine::new(vec![c.clone(), d.clone()], rat(1, 2)),
            ], &p).unwrap();
            let (lo, hi) = g.range(&p).unwrap();
            let mut prev = p.volume();
            prop_assert_eq!(g.superlevel_region(&p, &lo).unwrap().volume(), p.volume());
            for j in 0..=8 {
                let lambda = &lo + (&hi - &lo) * rat(j, 8);
                let v = g.superlevel_region(&p, &lambda).unwrap().volume();
                prop_assert!(v <= prev);
                prev = v;
            }
            prop_assert_eq!(g.superlevel_region(&p, &(hi + rat(1, 100))).unwrap().volume(), int(0));
        }

        #[test]
        fn integration_is_additive_and_triangulation_free(a in small_rat(), b in small_rat(), c in small_rat(), s in small_rat(), power in 1usize..4) {
            let p = Polytope::cube(2, int(1)).unwrap();
            let g = PlConcave::pruned(vec![
                Affine::new(vec![a.clone(), b.clone()], int(0)),
                Affine::new(vec![c.clone(), int(-1)], int(1)),
            ], &p).unwrap();
            let whole = integrate_pl_power(&g, &p, power, &s, true).unwrap();
            // Split the square into two halves and integrate separately.
            let halves = [
                Halfspace::new(vec![int(1), int(0)], rat(1, 2)),
                Halfspace::new(vec![int(-1), int(0)], rat(-1, 2)),
            ];
            let mut sum = Rat::zero();
            for h in halves {
                let mut hs = p.halfspaces().to_vec();
                hs.push(h);
                let half = Polytope::new(2, hs).unwrap();
                sum += integrate_pl_power(&PlConcave::pruned(g.affines().to_vec(), &half).unwrap(), &half, power, &s, true).unwrap();
            }
            prop_assert_eq!(&whole, &sum);
            // Reflect through the centre: the cone apex changes, so the
            // triangulation does too.
            let one = [int(1), int(1)];
            let reflected = Polytope::new(2, p.halfspaces().iter()
                .map(|h| Halfspace::new(h.normal.iter().map(|x| -x).collect(), &h.offset - dot(&h.normal, &one)))
                .collect()).unwrap();
            let gr = PlConcave::pruned(g.affines().iter()
                .map(|f| Affine::new(f.gradient.iter().map(|x| -x).collect(), &f.constant + dot(&f.gradient, &one)))
                .collect(), &reflected).unwrap();
            prop_assert_eq!(integrate_pl_power(&gr, &reflected, power, &s, true).unwrap(), whole);
        }
    }
}
