//! Small dense linear algebra over the rationals.

use num_traits::{One, Zero};

use crate::rat::Rat;

/// Row-reduces `m` in place and returns the pivot columns.
fn row_reduce(m: &mut [Vec<Rat>]) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for v in m[r].iter_mut().skip(c) {
            *v *= &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in c..cols {
                    let d = &f * &m[r][j];
                    m[i][j] -= d;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(rows: &[Vec<Rat>]) -> usize {
    let mut m = rows.to_vec();
    row_reduce(&mut m).len()
}

/// Affine dimension of a point set (-1 is reported as `None` for empty input).
pub fn affine_rank(points: &[&[Rat]]) -> Option<usize> {
    let (first, rest) = points.split_first()?;
    let diffs: Vec<Vec<Rat>> = rest
        .iter()
        .map(|p| p.iter().zip(first.iter()).map(|(a, b)| a - b).collect())
        .collect();
    Some(rank(&diffs))
}

/// Unique solution of the square system `a x = b`, or `None` if singular.
pub fn solve(a: &[Vec<Rat>], b: &[Rat]) -> Option<Vec<Rat>> {
    let n = a.len();
    let mut m: Vec<Vec<Rat>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    let pivots = row_reduce(&mut m);
    if pivots.len() != n || pivots.iter().enumerate().any(|(i, &c)| i != c) {
        return None;
    }
    Some(m.into_iter().map(|mut r| r.pop().unwrap()).collect())
}

/// A nonzero vector spanning the kernel of `rows` when the kernel is
/// one-dimensional.
pub fn kernel_vector(rows: &[Vec<Rat>], cols: usize) -> Option<Vec<Rat>> {
    let mut m = rows.to_vec();
    let pivots = row_reduce(&mut m);
    if pivots.len() + 1 != cols {
        return None;
    }
    let free = (0..cols).find(|c| !pivots.contains(c))?;
    let mut v = vec![Rat::zero(); cols];
    v[free] = Rat::one();
    for (r, &pc) in pivots.iter().enumerate() {
        v[pc] = -m[r][free].clone();
    }
    Some(v)
}

pub fn det(a: &[Vec<Rat>]) -> Rat {
    let n = a.len();
    let mut m = a.to_vec();
    let mut d = Rat::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !m[i][c].is_zero()) else {
            return Rat::zero();
        };
        if p != c {
            m.swap(p, c);
            d = -d;
        }
        let piv = m[c][c].clone();
        d *= &piv;
        for i in c + 1..n {
            if !m[i][c].is_zero() {
                let f = &m[i][c] / &piv;
                for j in c..n {
                    let t = &f * &m[c][j];
                    m[i][j] -= t;
                }
            }
        }
    }
    d
}

pub fn dot(a: &[Rat], b: &[Rat]) -> Rat {
    a.iter().zip(b).fold(Rat::zero(), |acc, (x, y)| acc + x * y)
}

/// Coefficients (lowest degree first) of the polynomial of degree
/// `< points.len()` through the given nodes.
pub fn interpolate(points: &[(Rat, Rat)]) -> Option<Vec<Rat>> {
    let n = points.len();
    let a: Vec<Vec<Rat>> = points
        .iter()
        .map(|(x, _)| {
            let mut row = Vec::with_capacity(n);
            let mut p = Rat::one();
            for _ in 0..n {
                row.push(p.clone());
                p *= x;
            }
            row
        })
        .collect();
    let b: Vec<Rat> = points.iter().map(|(_, y)| y.clone()).collect();
    solve(&a, &b)
}

pub fn eval_poly(coeffs: &[Rat], x: &Rat) -> Rat {
    coeffs.iter().rev().fold(Rat::zero(), |acc, c| acc * x + c)
}
