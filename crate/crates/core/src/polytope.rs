//! Rational convex polytopes in H-representation.
//!
//! Inputs are tiny (dimension at most four, a handful of facets), so vertex
//! enumeration intersects every `n`-subset of bounding hyperplanes and the
//! triangulation cones recursively from the lexicographically first vertex.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::linalg::{affine_rank, det, dot, kernel_vector, solve};
use crate::rat::{factorial, lcm_denominators, to_f64, Rat};

/// The halfspace `<normal, x> <= offset`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Halfspace {
    pub normal: Vec<Rat>,
    pub offset: Rat,
}

impl Halfspace {
    pub fn new(normal: Vec<Rat>, offset: Rat) -> Self {
        Halfspace { normal, offset }
    }

    /// `offset - <normal, x>`, nonnegative inside.
    pub fn slack(&self, x: &[Rat]) -> Rat {
        &self.offset - dot(&self.normal, x)
    }

    pub fn contains(&self, x: &[Rat]) -> bool {
        !self.slack(x).is_negative()
    }

    /// The same halfspace rescaled so the normal is a primitive integer
    /// vector. The offset stays rational when the facet is not a lattice
    /// hyperplane.
    pub fn primitive(&self) -> (Vec<BigInt>, Rat) {
        let l = lcm_denominators(&self.normal);
        let scaled: Vec<BigInt> = self
            .normal
            .iter()
            .map(|c| (c * Rat::from_integer(l.clone())).to_integer())
            .collect();
        let g = scaled.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
        let g = if g.is_zero() { BigInt::one() } else { g };
        let factor = Rat::new(l, g.clone());
        let normal = scaled.into_iter().map(|c| c / &g).collect();
        (normal, &self.offset * factor)
    }
}

/// Outcome of intersecting halfspaces that are known to cut out a bounded set.
#[derive(Debug, Clone)]
pub enum Region {
    Empty,
    /// Nonempty but of lower dimension; carries the vertices.
    Degenerate(Vec<Vec<Rat>>),
    Body(Polytope),
}

impl Region {
    pub fn volume(&self) -> Rat {
        match self {
            Region::Body(p) => p.volume(),
            _ => Rat::zero(),
        }
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, Region::Empty)
    }

    pub fn body(&self) -> Option<&Polytope> {
        match self {
            Region::Body(p) => Some(p),
            _ => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Polytope {
    dim: usize,
    halfspaces: Vec<Halfspace>,
    vertices: Vec<Vec<Rat>>,
    /// Vertex indices lying on each halfspace's hyperplane.
    facets: Vec<Vec<usize>>,
    /// Halfspaces as `<a, u> <= b` with integer `a`, `b` (scaled by the
    /// common denominator).
    integer_form: Vec<(Vec<i64>, i64)>,
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..k).collect();
    if k > n {
        return out;
    }
    loop {
        out.push(idx.clone());
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if idx[i] != i + n - k {
                break;
            }
            if i == 0 && idx[0] == n - k {
                return out;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

pub(crate) fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    combinations(n, k)
}

fn enumerate_vertices(dim: usize, hs: &[Halfspace]) -> Vec<Vec<Rat>> {
    let mut found = BTreeSet::new();
    for subset in subsets(hs.len(), dim) {
        let a: Vec<Vec<Rat>> = subset.iter().map(|&i| hs[i].normal.clone()).collect();
        let b: Vec<Rat> = subset.iter().map(|&i| hs[i].offset.clone()).collect();
        if let Some(x) = solve(&a, &b) {
            if hs.iter().all(|h| h.contains(&x)) {
                found.insert(x);
            }
        }
    }
    found.into_iter().collect()
}

fn to_i64(b: &BigInt) -> Result<i64> {
    b.to_i64().ok_or(Error::Overflow)
}

impl Polytope {
    /// Builds a bounded, full-dimensional polytope from halfspaces, dropping
    /// redundant ones.
    pub fn new(dim: usize, halfspaces: Vec<Halfspace>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("polytope dimension must be positive".into()));
        }
        for h in &halfspaces {
            if h.normal.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: h.normal.len() });
            }
        }
        let vertices = enumerate_vertices(dim, &halfspaces);
        let bound = vertices
            .iter()
            .flatten()
            .map(|c| c.abs())
            .max()
            .unwrap_or_else(Rat::zero)
            + Rat::one();
        let mut boxed = halfspaces.clone();
        for i in 0..dim {
            for s in [1, -1] {
                let mut normal = vec![Rat::zero(); dim];
                normal[i] = Rat::from_integer(BigInt::from(s));
                boxed.push(Halfspace::new(normal, bound.clone()));
            }
        }
        let boxed_vertices = enumerate_vertices(dim, &boxed);
        if boxed_vertices.is_empty() {
            return Err(Error::EmptyPolytope);
        }
        if boxed_vertices.iter().flatten().any(|c| c.abs() == bound) {
            return Err(Error::Unbounded);
        }
        match Self::region_from(dim, halfspaces, vertices)? {
            Region::Body(p) => Ok(p),
            Region::Empty => Err(Error::EmptyPolytope),
            Region::Degenerate(v) => {
                let refs: Vec<&[Rat]> = v.iter().map(Vec::as_slice).collect();
                Err(Error::LowerDimensional { dim, affine_dim: affine_rank(&refs).unwrap_or(0) })
            }
        }
    }

    /// Intersection of halfspaces already known to be bounded (for instance
    /// because they include the halfspaces of a polytope).
    pub fn region(dim: usize, halfspaces: Vec<Halfspace>) -> Result<Region> {
        let vertices = enumerate_vertices(dim, &halfspaces);
        Self::region_from(dim, halfspaces, vertices)
    }

    fn region_from(dim: usize, halfspaces: Vec<Halfspace>, vertices: Vec<Vec<Rat>>) -> Result<Region> {
        if vertices.is_empty() {
            return Ok(Region::Empty);
        }
        let refs: Vec<&[Rat]> = vertices.iter().map(Vec::as_slice).collect();
        if affine_rank(&refs) != Some(dim) {
            return Ok(Region::Degenerate(vertices));
        }
        let mut kept = Vec::new();
        let mut facets: Vec<Vec<usize>> = Vec::new();
        for h in halfspaces {
            let tight: Vec<usize> = (0..vertices.len()).filter(|&i| h.slack(&vertices[i]).is_zero()).collect();
            let pts: Vec<&[Rat]> = tight.iter().map(|&i| vertices[i].as_slice()).collect();
            if affine_rank(&pts) == Some(dim - 1) && !facets.contains(&tight) {
                facets.push(tight);
                kept.push(h);
            }
        }
        let mut integer_form = Vec::with_capacity(kept.len());
        for h in &kept {
            let l = lcm_denominators(h.normal.iter().chain(std::iter::once(&h.offset)));
            let lr = Rat::from_integer(l);
            let a = h
                .normal
                .iter()
                .map(|c| to_i64(&(c * &lr).to_integer()))
                .collect::<Result<Vec<_>>>()?;
            integer_form.push((a, to_i64(&(&h.offset * &lr).to_integer())?));
        }
        Ok(Region::Body(Polytope { dim, halfspaces: kept, vertices, facets, integer_form }))
    }

    /// Convex hull of a finite point set.
    pub fn from_vertices(points: &[Vec<Rat>]) -> Result<Self> {
        let dim = points.first().map(Vec::len).ok_or(Error::EmptyPolytope)?;
        if let Some(p) = points.iter().find(|p| p.len() != dim) {
            return Err(Error::DimensionMismatch { expected: dim, found: p.len() });
        }
        let mut hs: Vec<Halfspace> = Vec::new();
        for subset in subsets(points.len(), dim) {
            let base = &points[subset[0]];
            let rows: Vec<Vec<Rat>> = subset[1..]
                .iter()
                .map(|&i| points[i].iter().zip(base).map(|(a, b)| a - b).collect())
                .collect();
            let Some(normal) = kernel_vector(&rows, dim) else { continue };
            let offset = dot(&normal, base);
            let sides: Vec<Rat> = points.iter().map(|p| dot(&normal, p) - &offset).collect();
            if sides.iter().all(|s| !s.is_positive()) {
                hs.push(Halfspace::new(normal, offset));
            } else if sides.iter().all(|s| !s.is_negative()) {
                hs.push(Halfspace::new(normal.iter().map(|c| -c).collect(), -offset));
            }
        }
        Polytope::new(dim, hs)
    }

    /// The box `[lo, hi]` in one dimension.
    pub fn interval(lo: Rat, hi: Rat) -> Result<Self> {
        Polytope::new(
            1,
            vec![Halfspace::new(vec![-Rat::one()], -lo), Halfspace::new(vec![Rat::one()], hi)],
        )
    }

    /// `scale` times the standard simplex `{x >= 0, sum x <= 1}`.
    pub fn simplex(dim: usize, scale: Rat) -> Result<Self> {
        let mut hs = Vec::new();
        for i in 0..dim {
            let mut n = vec![Rat::zero(); dim];
            n[i] = -Rat::one();
            hs.push(Halfspace::new(n, Rat::zero()));
        }
        hs.push(Halfspace::new(vec![Rat::one(); dim], scale));
        Polytope::new(dim, hs)
    }

    pub fn cube(dim: usize, side: Rat) -> Result<Self> {
        let mut hs = Vec::new();
        for i in 0..dim {
            let mut n = vec![Rat::zero(); dim];
            n[i] = -Rat::one();
            hs.push(Halfspace::new(n.clone(), Rat::zero()));
            n[i] = Rat::one();
            hs.push(Halfspace::new(n, side.clone()));
        }
        Polytope::new(dim, hs)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn halfspaces(&self) -> &[Halfspace] {
        &self.halfspaces
    }

    /// Vertices in lexicographic order.
    pub fn vertices(&self) -> &[Vec<Rat>] {
        &self.vertices
    }

    /// For each halfspace, the indices of the vertices on its hyperplane.
    pub fn facet_vertices(&self) -> &[Vec<usize>] {
        &self.facets
    }

    /// Halfspaces whose hyperplane passes through vertex `v`.
    pub fn facets_at(&self, v: usize) -> Vec<usize> {
        (0..self.facets.len()).filter(|&i| self.facets[i].contains(&v)).collect()
    }

    pub fn contains(&self, x: &[Rat]) -> bool {
        self.halfspaces.iter().all(|h| h.contains(x))
    }

    /// Membership of the integer point `u` in `k P`.
    pub fn contains_lattice(&self, u: &[i64], k: u64) -> bool {
        let k = k as i128;
        self.integer_form.iter().all(|(a, b)| {
            let lhs: i128 = a.iter().zip(u).map(|(&ai, &ui)| ai as i128 * ui as i128).sum();
            lhs <= k * *b as i128
        })
    }

    fn strictly_inside_lattice(&self, u: &[i64], k: u64) -> bool {
        let k = k as i128;
        self.integer_form.iter().all(|(a, b)| {
            let lhs: i128 = a.iter().zip(u).map(|(&ai, &ui)| ai as i128 * ui as i128).sum();
            lhs < k * *b as i128
        })
    }

    pub fn bounding_box(&self) -> (Vec<Rat>, Vec<Rat>) {
        let mut lo = self.vertices[0].clone();
        let mut hi = self.vertices[0].clone();
        for v in &self.vertices[1..] {
            for i in 0..self.dim {
                if v[i] < lo[i] {
                    lo[i] = v[i].clone();
                }
                if v[i] > hi[i] {
                    hi[i] = v[i].clone();
                }
            }
        }
        (lo, hi)
    }

    /// Lattice points of `kP` in lexicographic order.
    pub fn lattice_points(&self, k: u64) -> Vec<Vec<i64>> {
        let mut out = Vec::new();
        self.scan_box(k, |u| {
            if self.contains_lattice(u, k) {
                out.push(u.to_vec());
            }
        });
        out
    }

    pub fn count_lattice_points(&self, k: u64) -> u64 {
        let mut n = 0;
        self.scan_box(k, |u| {
            if self.contains_lattice(u, k) {
                n += 1;
            }
        });
        n
    }

    pub fn interior_lattice_points(&self, k: u64) -> Vec<Vec<i64>> {
        let mut out = Vec::new();
        self.scan_box(k, |u| {
            if self.strictly_inside_lattice(u, k) {
                out.push(u.to_vec());
            }
        });
        out
    }

    fn scan_box(&self, k: u64, mut visit: impl FnMut(&[i64])) {
        let kr = Rat::from_integer(BigInt::from(k));
        let (lo, hi) = self.bounding_box();
        let lo: Vec<i64> = lo.iter().map(|c| (c * &kr).ceil().to_integer().to_i64().unwrap()).collect();
        let hi: Vec<i64> = hi.iter().map(|c| (c * &kr).floor().to_integer().to_i64().unwrap()).collect();
        if lo.iter().zip(&hi).any(|(l, h)| l > h) {
            return;
        }
        let mut u = lo.clone();
        loop {
            visit(&u);
            let mut i = self.dim;
            loop {
                if i == 0 {
                    return;
                }
                i -= 1;
                if u[i] < hi[i] {
                    u[i] += 1;
                    for j in i + 1..self.dim {
                        u[j] = lo[j];
                    }
                    break;
                }
            }
        }
    }

    /// Simplices (as vertex-index lists) of a triangulation obtained by
    /// coning from the first vertex over the faces not containing it.
    pub fn triangulate(&self) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        self.cone_triangulate((0..self.vertices.len()).collect(), self.dim, &mut out);
        out
    }

    fn cone_triangulate(&self, face: Vec<usize>, d: usize, out: &mut Vec<Vec<usize>>) {
        if face.len() == d + 1 {
            out.push(face);
            return;
        }
        let apex = face[0];
        let mut seen: Vec<Vec<usize>> = Vec::new();
        for facet in &self.facets {
            let sub: Vec<usize> = face.iter().copied().filter(|i| facet.contains(i)).collect();
            if sub.len() < d || sub.contains(&apex) || seen.contains(&sub) {
                continue;
            }
            let pts: Vec<&[Rat]> = sub.iter().map(|&i| self.vertices[i].as_slice()).collect();
            if affine_rank(&pts) != Some(d - 1) {
                continue;
            }
            seen.push(sub.clone());
            let mut inner = Vec::new();
            self.cone_triangulate(sub, d - 1, &mut inner);
            for mut s in inner {
                s.insert(0, apex);
                out.push(s);
            }
        }
    }

    /// Simplices of [`Polytope::triangulate`] as coordinate lists.
    pub fn simplices(&self) -> Vec<Vec<Vec<Rat>>> {
        self.triangulate()
            .into_iter()
            .map(|s| s.into_iter().map(|i| self.vertices[i].clone()).collect())
            .collect()
    }

    pub fn volume(&self) -> Rat {
        self.simplices().iter().map(|s| simplex_volume(s)).sum()
    }

    /// Lattice distance from `x` to facet `i`: the slack measured against the
    /// primitive integral normal.
    pub fn lattice_distance(&self, facet: usize, x: &[Rat]) -> Rat {
        let (n, off) = self.halfspaces[facet].primitive();
        let nr: Vec<Rat> = n.into_iter().map(Rat::from_integer).collect();
        off - dot(&nr, x)
    }

    /// Image under `x -> scale * x + shift` for `scale > 0`.
    pub fn map_affine(&self, scale: &Rat, shift: &[Rat]) -> Result<Self> {
        if !scale.is_positive() {
            return Err(Error::InvalidParameter("scale must be positive".into()));
        }
        let hs = self
            .halfspaces
            .iter()
            .map(|h| Halfspace::new(h.normal.clone(), &h.offset * scale + dot(&h.normal, shift)))
            .collect();
        Polytope::new(self.dim, hs)
    }

    pub fn is_lattice_polytope(&self) -> bool {
        self.vertices.iter().flatten().all(|c| c.is_integer())
    }

    pub fn contains_f64(&self, x: &[f64], tol: f64) -> bool {
        self.halfspaces.iter().all(|h| {
            let s: f64 = to_f64(&h.offset) - h.normal.iter().zip(x).map(|(a, b)| to_f64(a) * b).sum::<f64>();
            s >= -tol
        })
    }
}

pub fn simplex_volume(s: &[Vec<Rat>]) -> Rat {
    let n = s.len() - 1;
    let rows: Vec<Vec<Rat>> = s[1..]
        .iter()
        .map(|v| v.iter().zip(&s[0]).map(|(a, b)| a - b).collect())
        .collect();
    det(&rows).abs() / Rat::from_integer(factorial(n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{int, rat};

    fn brute_count(p: &Polytope, k: u64, radius: i64) -> usize {
        let kr = Rat::from_integer(BigInt::from(k));
        let mut n = 0;
        let dim = p.dim();
        let side = (2 * radius + 1) as usize;
        for idx in 0..side.pow(dim as u32) {
            let mut rest = idx;
            let mut x = Vec::new();
            for _ in 0..dim {
                x.push(Rat::new(BigInt::from((rest % side) as i64 - radius), kr.to_integer()));
                rest /= side;
            }
            if p.contains(&x) {
                n += 1;
            }
        }
        n
    }

    #[test]
    fn unit_interval_points() {
        let p = Polytope::interval(int(0), int(1)).unwrap();
        let pts = p.lattice_points(4);
        assert_eq!(pts, (0..=4).map(|i| vec![i]).collect::<Vec<_>>());
    }

    #[test]
    fn unit_square_points() {
        let p = Polytope::cube(2, int(1)).unwrap();
        assert_eq!(p.lattice_points(2).len(), 9);
    }

    #[test]
    fn simplex_points_match_box_scan() {
        let p = Polytope::simplex(2, int(1)).unwrap();
        assert_eq!(p.lattice_points(3).len(), 10);
        assert_eq!(brute_count(&p, 3, 5), 10);
    }

    #[test]
    fn volumes() {
        assert_eq!(Polytope::interval(int(0), int(1)).unwrap().volume(), int(1));
        assert_eq!(Polytope::simplex(2, int(1)).unwrap().volume(), rat(1, 2));
        assert_eq!(Polytope::cube(2, int(2)).unwrap().volume(), int(4));
        assert_eq!(Polytope::simplex(3, int(1)).unwrap().volume(), rat(1, 6));
        assert_eq!(Polytope::cube(3, int(1)).unwrap().volume(), int(1));
    }

    #[test]
    fn rejects_bad_input() {
        let hs = vec![Halfspace::new(vec![int(1)], int(1))];
        assert!(matches!(Polytope::new(1, hs), Err(Error::Unbounded)));
        let hs = vec![Halfspace::new(vec![int(1)], int(0)), Halfspace::new(vec![int(-1)], int(-1))];
        assert!(matches!(Polytope::new(1, hs), Err(Error::EmptyPolytope)));
        let hs = vec![
            Halfspace::new(vec![int(1), int(0)], int(0)),
            Halfspace::new(vec![int(-1), int(0)], int(0)),
            Halfspace::new(vec![int(0), int(1)], int(1)),
            Halfspace::new(vec![int(0), int(-1)], int(0)),
        ];
        assert!(matches!(Polytope::new(2, hs), Err(Error::LowerDimensional { .. })));
        let hs = vec![Halfspace::new(vec![int(1), int(0)], int(0))];
        assert!(matches!(Polytope::new(1, hs), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn drops_redundant_halfspaces() {
        let mut hs = Polytope::cube(2, int(1)).unwrap().halfspaces().to_vec();
        hs.push(Halfspace::new(vec![int(1), int(1)], int(5)));
        hs.push(hs[0].clone());
        let p = Polytope::new(2, hs).unwrap();
        assert_eq!(p.halfspaces().len(), 4);
        assert!(p.facet_vertices().iter().all(|f| f.len() >= 2));
    }

    #[test]
    fn hull_of_points() {
        let pts = vec![
            vec![int(0), int(0)],
            vec![int(2), int(0)],
            vec![int(0), int(2)],
            vec![rat(1, 2), rat(1, 2)],
        ];
        let p = Polytope::from_vertices(&pts).unwrap();
        assert_eq!(p.vertices().len(), 3);
        assert_eq!(p.volume(), int(2));
    }

    #[test]
    fn triangulation_covers_volume() {
        // Hexagon-like blow-up polytope.
        let pts: Vec<Vec<Rat>> = [(0, -1), (2, -1), (-1, 2), (-1, 0)]
            .iter()
            .map(|&(a, b)| vec![int(a), int(b)])
            .collect();
        let p = Polytope::from_vertices(&pts).unwrap();
        assert_eq!(p.volume(), int(4));
        assert_eq!(p.triangulate().len(), 2);
        let oct = Polytope::from_vertices(&[
            vec![int(1), int(0), int(0)],
            vec![int(-1), int(0), int(0)],
            vec![int(0), int(1), int(0)],
            vec![int(0), int(-1), int(0)],
            vec![int(0), int(0), int(1)],
            vec![int(0), int(0), int(-1)],
        ])
        .unwrap();
        assert_eq!(oct.volume(), rat(4, 3));
    }

    #[test]
    fn primitive_normals() {
        let h = Halfspace::new(vec![rat(2, 3), rat(4, 3)], int(2));
        let (n, off) = h.primitive();
        assert_eq!(n, vec![BigInt::from(1), BigInt::from(2)]);
        assert_eq!(off, int(3));
    }
}
