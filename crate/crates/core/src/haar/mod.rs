//! Integer Haar transform: lifting pair, separable 2-D level, Mallat pyramid.
//!
//! The lifting pair is `s = floor((a + b) / 2)`, `d = a - b`. It keeps the
//! average/difference split of the classic Haar step while staying exactly
//! invertible on integers. A 2-D level runs the 1-D step over every row and
//! then over every column of the result, leaving
//!
//! ```text
//! +----+----+
//! | LL | HL |
//! +----+----+
//! | LH | HH |
//! +----+----+
//! ```
//!
//! and the multilevel transform recurses on the LL quadrant only.
//!
//! For 8-bit input every coefficient lies in `[-510, 510]`.

pub mod oracle;

use std::fmt;

use thiserror::Error;

use crate::grid::Grid;
use crate::pixmap::Block;

pub const DEFAULT_LEVELS: usize = 3;
pub const MAX_LEVELS: usize = 5;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum HaarError {
    #[error("sequence length {0} is not even")]
    OddLength(usize),
    #[error("grid {width}x{height} has an odd or zero dimension")]
    OddDimension { width: usize, height: usize },
    #[error("level count {0} outside 1..={MAX_LEVELS}")]
    InvalidLevels(usize),
    #[error("block size {size} is not divisible by 2^{levels}")]
    IndivisibleSize { size: usize, levels: usize },
    #[error("missing subband {0}")]
    MissingSubband(SubbandId),
    #[error("duplicate subband {0}")]
    DuplicateSubband(SubbandId),
    #[error("subband {0} does not belong to this pyramid")]
    UnexpectedSubband(SubbandId),
    #[error("subband {id} is {width}x{height}, expected {expected}x{expected}")]
    SubbandShape {
        id: SubbandId,
        width: usize,
        height: usize,
        expected: usize,
    },
}

/// Orientation of a subband. The discriminant is the wire code.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SubbandKind {
    LL = 0,
    /// Horizontal detail (row-pass difference).
    HL = 1,
    /// Vertical detail.
    LH = 2,
    HH = 3,
}

impl SubbandKind {
    pub fn code(self) -> u8 {
        self as u8
    }

    pub fn from_code(code: u8) -> Option<Self> {
        Some(match code {
            0 => SubbandKind::LL,
            1 => SubbandKind::HL,
            2 => SubbandKind::LH,
            3 => SubbandKind::HH,
            _ => return None,
        })
    }

    pub fn is_detail(self) -> bool {
        self != SubbandKind::LL
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SubbandId {
    /// 1 is the finest level; the coarsest level also carries LL.
    pub level: u8,
    pub kind: SubbandKind,
}

impl SubbandId {
    pub const fn new(level: u8, kind: SubbandKind) -> Self {
        SubbandId { level, kind }
    }
}

impl fmt::Display for SubbandId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}{}", self.kind, self.level)
    }
}

/// Coarse-to-fine order: `LLn, HLn, LHn, HHn, HL(n-1), ..., HH1`.
pub fn subband_order(levels: usize) -> Vec<SubbandId> {
    let mut order = Vec::with_capacity(3 * levels + 1);
    order.push(SubbandId::new(levels as u8, SubbandKind::LL));
    for level in (1..=levels as u8).rev() {
        for kind in [SubbandKind::HL, SubbandKind::LH, SubbandKind::HH] {
            order.push(SubbandId::new(level, kind));
        }
    }
    order
}

/// Position and side of a subband inside the Mallat layout of a `size` block:
/// `(x, y, side)`.
pub fn subband_rect(size: usize, id: SubbandId) -> (usize, usize, usize) {
    let side = size >> id.level;
    match id.kind {
        SubbandKind::LL => (0, 0, side),
        SubbandKind::HL => (side, 0, side),
        SubbandKind::LH => (0, side, side),
        SubbandKind::HH => (side, side, side),
    }
}

fn check_levels(size: usize, levels: usize) -> Result<(), HaarError> {
    if levels == 0 || levels > MAX_LEVELS {
        return Err(HaarError::InvalidLevels(levels));
    }
    if size == 0 || !size.is_multiple_of(1 << levels) {
        return Err(HaarError::IndivisibleSize { size, levels });
    }
    Ok(())
}

#[inline]
pub fn lift_pair(a: i32, b: i32) -> (i32, i32) {
    ((a + b).div_euclid(2), a - b)
}

#[inline]
pub fn unlift_pair(s: i32, d: i32) -> (i32, i32) {
    let a = s + (d + 1).div_euclid(2);
    (a, a - d)
}

fn lift_into(src: &[i32], dst: &mut [i32]) {
    let half = src.len() / 2;
    for (i, pair) in src.chunks_exact(2).enumerate() {
        let (s, d) = lift_pair(pair[0], pair[1]);
        dst[i] = s;
        dst[half + i] = d;
    }
}

fn unlift_into(src: &[i32], dst: &mut [i32]) {
    let half = src.len() / 2;
    for i in 0..half {
        let (a, b) = unlift_pair(src[i], src[half + i]);
        dst[2 * i] = a;
        dst[2 * i + 1] = b;
    }
}

/// One Haar step: pair averages in the first half, differences in the second.
pub fn forward_1d(v: &[i32]) -> Result<Vec<i32>, HaarError> {
    if !v.len().is_multiple_of(2) {
        return Err(HaarError::OddLength(v.len()));
    }
    let mut out = vec![0; v.len()];
    lift_into(v, &mut out);
    Ok(out)
}

pub fn inverse_1d(v: &[i32]) -> Result<Vec<i32>, HaarError> {
    if !v.len().is_multiple_of(2) {
        return Err(HaarError::OddLength(v.len()));
    }
    let mut out = vec![0; v.len()];
    unlift_into(v, &mut out);
    Ok(out)
}

// In-place passes over the top-left `w`x`h` window of `g`.

fn rows_forward(g: &mut Grid<i32>, w: usize, h: usize) {
    let stride = g.width();
    let mut buf = vec![0; w];
    for y in 0..h {
        let row = &mut g.as_mut_slice()[y * stride..y * stride + w];
        lift_into(row, &mut buf);
        row.copy_from_slice(&buf);
    }
}

fn rows_inverse(g: &mut Grid<i32>, w: usize, h: usize) {
    let stride = g.width();
    let mut buf = vec![0; w];
    for y in 0..h {
        let row = &mut g.as_mut_slice()[y * stride..y * stride + w];
        unlift_into(row, &mut buf);
        row.copy_from_slice(&buf);
    }
}

fn cols_apply(g: &mut Grid<i32>, w: usize, h: usize, step: fn(&[i32], &mut [i32])) {
    let mut col = vec![0; h];
    let mut buf = vec![0; h];
    for x in 0..w {
        for (y, c) in col.iter_mut().enumerate() {
            *c = g.get(x, y);
        }
        step(&col, &mut buf);
        for (y, &v) in buf.iter().enumerate() {
            g.set(x, y, v);
        }
    }
}

fn check_even(g: &Grid<i32>) -> Result<(), HaarError> {
    let (width, height) = (g.width(), g.height());
    if width == 0 || height == 0 || width % 2 != 0 || height % 2 != 0 {
        return Err(HaarError::OddDimension { width, height });
    }
    Ok(())
}

/// Applies the 1-D step to every row.
pub fn row_pass(grid: &Grid<i32>) -> Result<Grid<i32>, HaarError> {
    check_even(grid)?;
    let mut g = grid.clone();
    rows_forward(&mut g, grid.width(), grid.height());
    Ok(g)
}

/// Applies the 1-D step to every column.
pub fn column_pass(grid: &Grid<i32>) -> Result<Grid<i32>, HaarError> {
    check_even(grid)?;
    let mut g = grid.clone();
    cols_apply(&mut g, grid.width(), grid.height(), lift_into);
    Ok(g)
}

/// Row pass then column pass; result is laid out as LL | HL over LH | HH.
pub fn forward_level_2d(grid: &Grid<i32>) -> Result<Grid<i32>, HaarError> {
    column_pass(&row_pass(grid)?)
}

pub fn inverse_level_2d(grid: &Grid<i32>) -> Result<Grid<i32>, HaarError> {
    check_even(grid)?;
    let mut g = grid.clone();
    let (w, h) = (g.width(), g.height());
    cols_apply(&mut g, w, h, unlift_into);
    rows_inverse(&mut g, w, h);
    Ok(g)
}

/// In-place multilevel forward transform of a square grid into Mallat layout.
pub fn forward_mallat(grid: &mut Grid<i32>, levels: usize) -> Result<(), HaarError> {
    assert_eq!(
        grid.width(),
        grid.height(),
        "Mallat layout needs a square grid"
    );
    check_levels(grid.width(), levels)?;
    let mut n = grid.width();
    for _ in 0..levels {
        rows_forward(grid, n, n);
        cols_apply(grid, n, n, lift_into);
        n /= 2;
    }
    Ok(())
}

/// In-place inverse of [`forward_mallat`].
pub fn inverse_mallat(grid: &mut Grid<i32>, levels: usize) -> Result<(), HaarError> {
    assert_eq!(
        grid.width(),
        grid.height(),
        "Mallat layout needs a square grid"
    );
    check_levels(grid.width(), levels)?;
    for level in (0..levels).rev() {
        let n = grid.width() >> level;
        cols_apply(grid, n, n, unlift_into);
        rows_inverse(grid, n, n);
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subband {
    pub id: SubbandId,
    pub coeffs: Grid<i32>,
}

/// All subbands of one block, in coarse-to-fine order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoeffPyramid {
    block_index: usize,
    origin: (usize, usize),
    size: usize,
    levels: usize,
    subbands: Vec<Subband>,
}

impl CoeffPyramid {
    /// Assembles a pyramid from subbands given in any order.
    pub fn from_subbands(
        block_index: usize,
        origin: (usize, usize),
        size: usize,
        levels: usize,
        subbands: Vec<Subband>,
    ) -> Result<Self, HaarError> {
        check_levels(size, levels)?;
        let order = subband_order(levels);
        let mut slots: Vec<Option<Subband>> = vec![None; order.len()];
        for sb in subbands {
            let slot = order
                .iter()
                .position(|&id| id == sb.id)
                .ok_or(HaarError::UnexpectedSubband(sb.id))?;
            let expected = size >> sb.id.level;
            if sb.coeffs.width() != expected || sb.coeffs.height() != expected {
                return Err(HaarError::SubbandShape {
                    id: sb.id,
                    width: sb.coeffs.width(),
                    height: sb.coeffs.height(),
                    expected,
                });
            }
            let id = sb.id;
            if slots[slot].replace(sb).is_some() {
                return Err(HaarError::DuplicateSubband(id));
            }
        }
        let subbands = slots
            .into_iter()
            .zip(&order)
            .map(|(s, &id)| s.ok_or(HaarError::MissingSubband(id)))
            .collect::<Result<_, _>>()?;
        Ok(CoeffPyramid {
            block_index,
            origin,
            size,
            levels,
            subbands,
        })
    }

    /// Splits a Mallat-layout grid into its subbands.
    pub fn from_mallat(
        block_index: usize,
        origin: (usize, usize),
        grid: &Grid<i32>,
        levels: usize,
    ) -> Result<Self, HaarError> {
        let size = grid.width();
        assert_eq!(size, grid.height(), "Mallat layout needs a square grid");
        check_levels(size, levels)?;
        let subbands = subband_order(levels)
            .into_iter()
            .map(|id| {
                let (x, y, side) = subband_rect(size, id);
                Subband {
                    id,
                    coeffs: grid.crop(x, y, side, side),
                }
            })
            .collect();
        Ok(CoeffPyramid {
            block_index,
            origin,
            size,
            levels,
            subbands,
        })
    }

    pub fn to_mallat(&self) -> Grid<i32> {
        let mut g = Grid::new(self.size, self.size);
        for sb in &self.subbands {
            let (x, y, _) = subband_rect(self.size, sb.id);
            g.paste(x, y, &sb.coeffs);
        }
        g
    }

    pub fn block_index(&self) -> usize {
        self.block_index
    }

    pub fn origin(&self) -> (usize, usize) {
        self.origin
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn subbands(&self) -> &[Subband] {
        &self.subbands
    }

    pub fn subband(&self, id: SubbandId) -> Option<&Subband> {
        self.subbands.iter().find(|s| s.id == id)
    }

    /// Applies `f` to every coefficient, keeping the layout.
    pub fn map_coeffs(&self, f: impl Fn(SubbandId, i32) -> i32) -> CoeffPyramid {
        CoeffPyramid {
            subbands: self
                .subbands
                .iter()
                .map(|sb| Subband {
                    id: sb.id,
                    coeffs: sb.coeffs.map(|c| f(sb.id, c)),
                })
                .collect(),
            ..*self
        }
    }

    /// Largest absolute coefficient.
    pub fn max_abs(&self) -> i32 {
        self.subbands
            .iter()
            .flat_map(|s| s.coeffs.as_slice())
            .map(|c| c.abs())
            .max()
            .unwrap_or(0)
    }
}

/// Transforms a block into a `levels`-deep pyramid.
pub fn forward_multilevel(block: &Block, levels: usize) -> Result<CoeffPyramid, HaarError> {
    check_levels(block.size, levels)?;
    let mut g = block.samples.clone();
    forward_mallat(&mut g, levels)?;
    CoeffPyramid::from_mallat(block.index, block.origin, &g, levels)
}

/// Exact inverse of [`forward_multilevel`]. Samples are not clamped.
pub fn inverse_multilevel(p: &CoeffPyramid) -> Block {
    let mut g = p.to_mallat();
    inverse_mallat(&mut g, p.levels).expect("pyramid shape validated at construction");
    Block {
        index: p.block_index,
        origin: p.origin,
        size: p.size,
        samples: g,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn block_of(samples: Grid<i32>) -> Block {
        Block {
            index: 0,
            origin: (0, 0),
            size: samples.width(),
            samples,
        }
    }

    #[test]
    fn lift_pair_examples() {
        assert_eq!(lift_pair(9, 7), (8, 2));
        assert_eq!(unlift_pair(8, 2), (9, 7));
        assert_eq!(lift_pair(3, 5), (4, -2));
        assert_eq!(unlift_pair(4, -2), (3, 5));
        for c in [-7, 0, 1, 200, 255] {
            assert_eq!(lift_pair(c, c), (c, 0));
        }
    }

    #[test]
    fn one_dimensional_examples() {
        assert_eq!(forward_1d(&[9, 7, 3, 5]).unwrap(), vec![8, 4, 2, -2]);
        assert_eq!(inverse_1d(&[8, 4, 2, -2]).unwrap(), vec![9, 7, 3, 5]);
        assert_eq!(forward_1d(&[6, 6, 6, 6]).unwrap(), vec![6, 6, 0, 0]);
        assert_eq!(inverse_1d(&[6, 6, 0, 0]).unwrap(), vec![6, 6, 6, 6]);
        assert_eq!(forward_1d(&[1, 2, 3]), Err(HaarError::OddLength(3)));
        assert_eq!(inverse_1d(&[1]), Err(HaarError::OddLength(1)));
    }

    #[test]
    fn two_by_two_pins_pass_order() {
        // rows: (9,7)->(8,2), (3,5)->(4,-2); columns: (8,4)->(6,4), (2,-2)->(0,4)
        let g = Grid::from_vec(2, 2, vec![9, 7, 3, 5]).unwrap();
        let t = forward_level_2d(&g).unwrap();
        assert_eq!(t.as_slice(), &[6, 0, 4, 4]);
        assert_eq!(inverse_level_2d(&t).unwrap(), g);
    }

    #[test]
    fn constant_grid_has_no_detail() {
        let g = Grid::filled(6, 4, 42);
        let t = forward_level_2d(&g).unwrap();
        for y in 0..4 {
            for x in 0..6 {
                let expect = if x < 3 && y < 2 { 42 } else { 0 };
                assert_eq!(t.get(x, y), expect);
            }
        }
    }

    #[test]
    fn odd_grid_rejected() {
        let g: Grid<i32> = Grid::new(3, 4);
        assert_eq!(
            forward_level_2d(&g),
            Err(HaarError::OddDimension {
                width: 3,
                height: 4
            })
        );
        assert!(inverse_level_2d(&g).is_err());
    }

    #[test]
    fn constant_block_pyramid() {
        let p = forward_multilevel(&block_of(Grid::filled(8, 8, 77)), 3).unwrap();
        assert_eq!(p.subbands().len(), 10);
        assert_eq!(p.subbands()[0].id, SubbandId::new(3, SubbandKind::LL));
        assert_eq!(p.subbands()[0].coeffs.as_slice(), &[77]);
        for sb in &p.subbands()[1..] {
            assert!(sb.coeffs.as_slice().iter().all(|&c| c == 0), "{}", sb.id);
        }
        assert_eq!(inverse_multilevel(&p).samples, Grid::filled(8, 8, 77));
    }

    #[test]
    fn checkerboard_energy_sits_in_hh1() {
        let g = Grid::from_fn(8, 8, |x, y| if (x + y) % 2 == 1 { 255 } else { 0 });
        let p = forward_multilevel(&block_of(g.clone()), 3).unwrap();
        for sb in p.subbands() {
            let expect = match (sb.id.level, sb.id.kind) {
                (1, SubbandKind::HH) => -510,
                (3, SubbandKind::LL) => 127,
                _ => 0,
            };
            assert!(
                sb.coeffs.as_slice().iter().all(|&c| c == expect),
                "{}: {:?}",
                sb.id,
                sb.coeffs
            );
        }
        // LL1 and LL2 are the constant 127 as well
        let mut m = g.clone();
        forward_mallat(&mut m, 1).unwrap();
        assert!(m.crop(0, 0, 4, 4).as_slice().iter().all(|&c| c == 127));
        let mut m = g.clone();
        forward_mallat(&mut m, 2).unwrap();
        assert!(m.crop(0, 0, 2, 2).as_slice().iter().all(|&c| c == 127));
        assert_eq!(inverse_multilevel(&p).samples, g);
    }

    #[test]
    fn zeroed_details_give_dc_block() {
        let p = forward_multilevel(&block_of(Grid::filled(16, 16, 9)), 3).unwrap();
        let dc = p.map_coeffs(|id, c| if id.kind.is_detail() { 0 } else { c });
        assert_eq!(inverse_multilevel(&dc).samples, Grid::filled(16, 16, 9));
    }

    #[test]
    fn level_and_size_validation() {
        let b = block_of(Grid::filled(24, 24, 0));
        assert!(forward_multilevel(&b, 3).is_ok());
        assert_eq!(
            forward_multilevel(&b, 4).unwrap_err(),
            HaarError::IndivisibleSize {
                size: 24,
                levels: 4
            }
        );
        assert_eq!(
            forward_multilevel(&b, 0).unwrap_err(),
            HaarError::InvalidLevels(0)
        );
        assert_eq!(
            forward_multilevel(&b, 6).unwrap_err(),
            HaarError::InvalidLevels(6)
        );
    }

    #[test]
    fn from_subbands_reports_missing() {
        let p = forward_multilevel(&block_of(Grid::filled(8, 8, 1)), 3).unwrap();
        let mut subs = p.subbands().to_vec();
        subs.reverse();
        let again = CoeffPyramid::from_subbands(0, (0, 0), 8, 3, subs.clone()).unwrap();
        assert_eq!(again, p);
        let hl2 = SubbandId::new(2, SubbandKind::HL);
        subs.retain(|s| s.id != hl2);
        assert_eq!(
            CoeffPyramid::from_subbands(0, (0, 0), 8, 3, subs),
            Err(HaarError::MissingSubband(hl2))
        );
    }

    #[test]
    fn order_is_coarse_to_fine() {
        let names: Vec<String> = subband_order(3).iter().map(|s| s.to_string()).collect();
        assert_eq!(
            names,
            ["LL3", "HL3", "LH3", "HH3", "HL2", "LH2", "HH2", "HL1", "LH1", "HH1"]
        );
    }

    #[test]
    fn adversarial_patterns_stay_in_bounds() {
        for pattern in 0..4 {
            let g = Grid::from_fn(64, 64, |x, y| match pattern {
                0 => 0,
                1 => 255,
                2 => 255 * ((x + y) % 2) as i32,
                _ => 255 * ((x / 2 + y) % 2) as i32,
            });
            let p = forward_multilevel(&block_of(g), 3).unwrap();
            assert!(p.max_abs() <= 510);
        }
    }

    proptest! {
        #[test]
        fn lifting_pair_inverts(a in -4096i32..4096, b in -4096i32..4096) {
            let (s, d) = lift_pair(a, b);
            prop_assert_eq!(unlift_pair(s, d), (a, b));
        }

        #[test]
        fn one_d_is_two_sided_inverse(v in proptest::collection::vec(-600i32..600, 0..32)
            .prop_filter("even", |v| v.len() % 2 == 0)) {
            prop_assert_eq!(inverse_1d(&forward_1d(&v).unwrap()).unwrap(), v.clone());
            prop_assert_eq!(forward_1d(&inverse_1d(&v).unwrap()).unwrap(), v);
        }

        #[test]
        fn level_2d_round_trip(w in 1usize..8, h in 1usize..8, seed in any::<u64>()) {
            let mut x = seed;
            let g = Grid::from_fn(2 * w, 2 * h, |_, _| {
                x = x.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                ((x >> 33) % 256) as i32
            });
            prop_assert_eq!(inverse_level_2d(&forward_level_2d(&g).unwrap()).unwrap(), g);
        }

        #[test]
        fn pyramid_round_trip_and_bound(px in proptest::collection::vec(0i32..256, 32 * 32)) {
            let g = Grid::from_vec(32, 32, px).unwrap();
            let p = forward_multilevel(&block_of(g.clone()), 3).unwrap();
            prop_assert!(p.max_abs() <= 510);
            prop_assert_eq!(inverse_multilevel(&p).samples, g);
        }
    }
}
