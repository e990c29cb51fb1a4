//! Discrete Legendre–Fenchel transforms in linear time.
//!
//! The 1D transform builds the lower convex hull of the finite samples and
//! marches a pointer over its slopes while the dual points increase. The 2D
//! transform factorizes `f*(y1, y2) = sup_x1 [x1 y1 + sup_x2 (x2 y2 - f)]`.

use rayon::prelude::*;

use crate::error::{Error, Result};

use super::grid::{Axis, PotentialGrid, Role};

/// `out[j] = max_i (xs[i]·ys[j] - f[i])` over finite `f[i]`, with the
/// maximizing `i` in `arg[j]`. `xs` and `ys` must be increasing. Returns
/// `false` when every sample is `+∞`.
pub fn conjugate_1d(xs: &[f64], f: &[f64], ys: &[f64], out: &mut [f64], arg: &mut [usize]) -> bool {
    let mut hull: Vec<usize> = Vec::with_capacity(xs.len());
    for i in (0..xs.len()).filter(|&i| f[i].is_finite()) {
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            // Drop b when it lies on or above the chord from a to i.
            if (f[b] - f[a]) * (xs[i] - xs[b]) >= (f[i] - f[b]) * (xs[b] - xs[a]) {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(i);
    }
    if hull.is_empty() {
        return false;
    }
    let mut k = 0;
    for (j, &y) in ys.iter().enumerate() {
        while k + 1 < hull.len() {
            let (a, b) = (hull[k], hull[k + 1]);
            if y > (f[b] - f[a]) / (xs[b] - xs[a]) {
                k += 1;
            } else {
                break;
            }
        }
        let i = hull[k];
        out[j] = xs[i] * y - f[i];
        arg[j] = i;
    }
    true
}

/// A conjugate grid together with, for each dual node, the flat index of the
/// maximizing primal node.
#[derive(Debug, Clone)]
pub struct Conjugate {
    pub grid: PotentialGrid,
    pub argmax: Vec<usize>,
}

/// The discrete conjugate of `f` sampled on `dual_axes`.
pub fn legendre(f: &PotentialGrid, dual_axes: &[Axis]) -> Result<Conjugate> {
    if dual_axes.len() != f.dim() {
        return Err(Error::DimensionMismatch { expected: f.dim(), found: dual_axes.len() });
    }
    let role = match f.role {
        Role::Symplectic => Role::Kahler,
        Role::Kahler => Role::Symplectic,
    };
    match f.dim() {
        1 => {
            let xs = f.axes[0].points();
            let ys = dual_axes[0].points();
            let mut out = vec![0.0; ys.len()];
            let mut arg = vec![0; ys.len()];
            if !conjugate_1d(&xs, &f.values, &ys, &mut out, &mut arg) {
                return Err(Error::EmptyDomain);
            }
            Ok(Conjugate { grid: PotentialGrid { axes: dual_axes.to_vec(), values: out, role }, argmax: arg })
        }
        2 => legendre_2d(f, dual_axes, role),
        d => Err(Error::InvalidParameter(format!("Legendre transforms are implemented for 1 and 2 dimensions, not {d}"))),
    }
}

fn legendre_2d(f: &PotentialGrid, dual: &[Axis], role: Role) -> Result<Conjugate> {
    let (n1, n2) = (f.axes[0].nodes, f.axes[1].nodes);
    let (m1, m2) = (dual[0].nodes, dual[1].nodes);
    let x1 = f.axes[0].points();
    let x2 = f.axes[1].points();
    let y1 = dual[0].points();
    let y2 = dual[1].points();
    // Rows: inner[i1][j2] = sup_x2 (x2 y2 - f(x1, x2)).
    let rows: Vec<(Vec<f64>, Vec<usize>)> = (0..n1)
        .into_par_iter()
        .map(|i1| {
            let mut out = vec![f64::NEG_INFINITY; m2];
            let mut arg = vec![0; m2];
            conjugate_1d(&x2, &f.values[i1 * n2..(i1 + 1) * n2], &y2, &mut out, &mut arg);
            (out, arg)
        })
        .collect();
    // Columns: sup_x1 (x1 y1 - h(x1)) with h = -inner.
    let cols: Vec<Option<(Vec<f64>, Vec<usize>)>> = (0..m2)
        .into_par_iter()
        .map(|j2| {
            let h: Vec<f64> = rows.iter().map(|(o, _)| -o[j2]).collect();
            let mut out = vec![0.0; m1];
            let mut arg = vec![0; m1];
            conjugate_1d(&x1, &h, &y1, &mut out, &mut arg).then_some((out, arg))
        })
        .collect();
    let mut values = vec![0.0; m1 * m2];
    let mut argmax = vec![0; m1 * m2];
    for (j2, col) in cols.into_iter().enumerate() {
        let (out, arg) = col.ok_or(Error::EmptyDomain)?;
        for j1 in 0..m1 {
            let i1 = arg[j1];
            values[j1 * m2 + j2] = out[j1];
            argmax[j1 * m2 + j2] = i1 * n2 + rows[i1].1[j2];
        }
    }
    Ok(Conjugate { grid: PotentialGrid { axes: dual.to_vec(), values, role }, argmax })
}
