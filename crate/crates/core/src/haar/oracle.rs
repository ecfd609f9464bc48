//! Orthonormal floating-point Haar transform.
//!
//! `s = (a + b) / sqrt(2)`, `d = (a - b) / sqrt(2)`. Same pass order and
//! Mallat layout as the integer transform, but energy preserving, so it serves
//! as a reference for Parseval-style checks. Not used on the codec path.

use std::f64::consts::FRAC_1_SQRT_2;

use super::HaarError;
use crate::grid::Grid;

#[inline]
pub fn normalized_pair(a: f64, b: f64) -> (f64, f64) {
    ((a + b) * FRAC_1_SQRT_2, (a - b) * FRAC_1_SQRT_2)
}

#[inline]
pub fn normalized_unpair(s: f64, d: f64) -> (f64, f64) {
    ((s + d) * FRAC_1_SQRT_2, (s - d) * FRAC_1_SQRT_2)
}

fn step(src: &[f64], dst: &mut [f64]) {
    let half = src.len() / 2;
    for i in 0..half {
        let (s, d) = normalized_pair(src[2 * i], src[2 * i + 1]);
        dst[i] = s;
        dst[half + i] = d;
    }
}

fn unstep(src: &[f64], dst: &mut [f64]) {
    let half = src.len() / 2;
    for i in 0..half {
        let (a, b) = normalized_unpair(src[i], src[half + i]);
        dst[2 * i] = a;
        dst[2 * i + 1] = b;
    }
}

fn apply_window(g: &mut Grid<f64>, w: usize, h: usize, rows: bool, f: fn(&[f64], &mut [f64])) {
    let (outer, inner) = if rows { (h, w) } else { (w, h) };
    let mut line = vec![0.0; inner];
    let mut buf = vec![0.0; inner];
    for o in 0..outer {
        for (i, v) in line.iter_mut().enumerate() {
            *v = if rows { g.get(i, o) } else { g.get(o, i) };
        }
        f(&line, &mut buf);
        for (i, &v) in buf.iter().enumerate() {
            if rows {
                g.set(i, o, v)
            } else {
                g.set(o, i, v)
            }
        }
    }
}

fn check_even(g: &Grid<f64>) -> Result<(), HaarError> {
    let (width, height) = (g.width(), g.height());
    if width == 0 || height == 0 || width % 2 != 0 || height % 2 != 0 {
        return Err(HaarError::OddDimension { width, height });
    }
    Ok(())
}

pub fn forward_1d(v: &[f64]) -> Result<Vec<f64>, HaarError> {
    if !v.len().is_multiple_of(2) {
        return Err(HaarError::OddLength(v.len()));
    }
    let mut out = vec![0.0; v.len()];
    step(v, &mut out);
    Ok(out)
}

/// One orthonormal 2-D level: rows, then columns.
pub fn oracle_forward_normalized(grid: &Grid<f64>) -> Result<Grid<f64>, HaarError> {
    check_even(grid)?;
    let mut g = grid.clone();
    let (w, h) = (g.width(), g.height());
    apply_window(&mut g, w, h, true, step);
    apply_window(&mut g, w, h, false, step);
    Ok(g)
}

pub fn oracle_inverse_normalized(grid: &Grid<f64>) -> Result<Grid<f64>, HaarError> {
    check_even(grid)?;
    let mut g = grid.clone();
    let (w, h) = (g.width(), g.height());
    apply_window(&mut g, w, h, false, unstep);
    apply_window(&mut g, w, h, true, unstep);
    Ok(g)
}

fn check_square(g: &Grid<f64>, levels: usize) -> Result<(), HaarError> {
    let size = g.width();
    if levels == 0 || levels > super::MAX_LEVELS {
        return Err(HaarError::InvalidLevels(levels));
    }
    if size == 0 || size != g.height() || !size.is_multiple_of(1 << levels) {
        return Err(HaarError::IndivisibleSize { size, levels });
    }
    Ok(())
}

/// Multilevel orthonormal transform of a square grid, Mallat layout.
pub fn forward_multilevel(grid: &Grid<f64>, levels: usize) -> Result<Grid<f64>, HaarError> {
    check_square(grid, levels)?;
    let mut g = grid.clone();
    let mut n = g.width();
    for _ in 0..levels {
        apply_window(&mut g, n, n, true, step);
        apply_window(&mut g, n, n, false, step);
        n /= 2;
    }
    Ok(g)
}

pub fn inverse_multilevel(grid: &Grid<f64>, levels: usize) -> Result<Grid<f64>, HaarError> {
    check_square(grid, levels)?;
    let mut g = grid.clone();
    for level in (0..levels).rev() {
        let n = g.width() >> level;
        apply_window(&mut g, n, n, false, unstep);
        apply_window(&mut g, n, n, true, unstep);
    }
    Ok(g)
}

/// The `n`×`n` matrix of the `levels`-deep 1-D orthonormal Haar transform.
///
/// Column `j` is the transform of the unit vector `e_j`, so row `i` is the
/// `i`-th basis vector.
pub fn haar_matrix(n: usize, levels: usize) -> Result<Grid<f64>, HaarError> {
    if levels == 0 || levels > super::MAX_LEVELS {
        return Err(HaarError::InvalidLevels(levels));
    }
    if n == 0 || !n.is_multiple_of(1 << levels) {
        return Err(HaarError::IndivisibleSize { size: n, levels });
    }
    let mut m = Grid::new(n, n);
    let mut buf = vec![0.0; n];
    for j in 0..n {
        let mut v = vec![0.0; n];
        v[j] = 1.0;
        let mut len = n;
        for _ in 0..levels {
            step(&v[..len], &mut buf[..len]);
            v[..len].copy_from_slice(&buf[..len]);
            len /= 2;
        }
        for (i, &x) in v.iter().enumerate() {
            m.set(j, i, x);
        }
    }
    Ok(m)
}

pub fn energy(g: &Grid<f64>) -> f64 {
    g.as_slice().iter().map(|v| v * v).sum()
}
