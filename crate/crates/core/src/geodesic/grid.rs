//! Uniform 1D/2D grids of potential samples.

use crate::error::{Error, Result};

/// `nodes` equally spaced points from `lo` to `hi` inclusive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub lo: f64,
    pub hi: f64,
    pub nodes: usize,
}

impl Axis {
    pub fn new(lo: f64, hi: f64, nodes: usize) -> Result<Self> {
        if nodes < 2 || !(hi > lo) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::InvalidParameter(format!("bad axis [{lo}, {hi}] with {nodes} nodes")));
        }
        Ok(Axis { lo, hi, nodes })
    }

    pub fn spacing(&self) -> f64 {
        (self.hi - self.lo) / (self.nodes - 1) as f64
    }

    pub fn point(&self, i: usize) -> f64 {
        if i + 1 == self.nodes {
            self.hi
        } else {
            self.lo + i as f64 * self.spacing()
        }
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.nodes).map(|i| self.point(i)).collect()
    }

    /// Midpoints of consecutive nodes.
    pub fn cell_centres(&self) -> Axis {
        let h = self.spacing();
        Axis { lo: self.lo + h / 2.0, hi: self.hi - h / 2.0, nodes: self.nodes - 1 }
    }
}

/// Which side of the Legendre duality a grid lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    /// Convex function on the moment polytope (`+∞` outside it).
    Symplectic,
    /// Convex potential on the dual space.
    Kahler,
}

/// Samples on the tensor grid of `axes`, last axis fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialGrid {
    pub axes: Vec<Axis>,
    pub values: Vec<f64>,
    pub role: Role,
}

impl PotentialGrid {
    pub fn from_fn(axes: Vec<Axis>, role: Role, f: impl Fn(&[f64]) -> f64) -> Self {
        let values = tensor_points(&axes).iter().map(|x| f(x)).collect();
        PotentialGrid { axes, values, role }
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn point(&self, idx: usize) -> Vec<f64> {
        unflatten(&self.axes, idx).iter().zip(&self.axes).map(|(&i, a)| a.point(i)).collect()
    }

    pub fn points(&self) -> Vec<Vec<f64>> {
        tensor_points(&self.axes)
    }

    /// Product of the axis spacings.
    pub fn cell_volume(&self) -> f64 {
        self.axes.iter().map(Axis::spacing).product()
    }

    /// Second differences along every axis are `>= -tol` wherever the three
    /// samples are finite.
    pub fn is_discretely_convex(&self, tol: f64) -> bool {
        let strides = strides(&self.axes);
        (0..self.len()).all(|idx| {
            let multi = unflatten(&self.axes, idx);
            self.axes.iter().enumerate().all(|(d, a)| {
                if multi[d] == 0 || multi[d] + 1 == a.nodes {
                    return true;
                }
                let (l, c, r) = (self.values[idx - strides[d]], self.values[idx], self.values[idx + strides[d]]);
                !(l.is_finite() && c.is_finite() && r.is_finite()) || l + r - 2.0 * c >= -tol
            })
        })
    }

    /// `max |self - other|` over nodes where both are finite.
    pub fn sup_distance(&self, other: &PotentialGrid) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .filter(|(a, b)| a.is_finite() && b.is_finite())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

pub(crate) fn strides(axes: &[Axis]) -> Vec<usize> {
    let mut s = vec![1; axes.len()];
    for d in (0..axes.len().saturating_sub(1)).rev() {
        s[d] = s[d + 1] * axes[d + 1].nodes;
    }
    s
}

pub(crate) fn unflatten(axes: &[Axis], mut idx: usize) -> Vec<usize> {
    let mut out = vec![0; axes.len()];
    for d in (0..axes.len()).rev() {
        out[d] = idx % axes[d].nodes;
        idx /= axes[d].nodes;
    }
    out
}

pub(crate) fn tensor_points(axes: &[Axis]) -> Vec<Vec<f64>> {
    let total: usize = axes.iter().map(|a| a.nodes).product();
    (0..total)
        .map(|idx| unflatten(axes, idx).iter().zip(axes).map(|(&i, a)| a.point(i)).collect())
        .collect()
}
