//! Uniform mid-tread quantization of pyramid coefficients.

use thiserror::Error;

use crate::haar::{CoeffPyramid, SubbandId, SubbandKind};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum QuantError {
    #[error("quantizer steps must be at least 1")]
    ZeroStep,
    #[error("quantizer table needs at least one detail step")]
    NoDetailSteps,
}

/// Quantizer steps: one for the coarsest LL, one per detail level.
///
/// `detail[0]` applies to level 1 (finest). Levels past the end of `detail`
/// reuse its last entry. All-ones is lossless.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QTable {
    ll: u16,
    detail: Vec<u16>,
}

impl Default for QTable {
    fn default() -> Self {
        QTable::lossless(crate::haar::DEFAULT_LEVELS)
    }
}

impl QTable {
    pub fn new(ll: u16, detail: Vec<u16>) -> Result<Self, QuantError> {
        if detail.is_empty() {
            return Err(QuantError::NoDetailSteps);
        }
        if ll == 0 || detail.contains(&0) {
            return Err(QuantError::ZeroStep);
        }
        Ok(QTable { ll, detail })
    }

    pub fn lossless(levels: usize) -> Self {
        QTable {
            ll: 1,
            detail: vec![1; levels.max(1)],
        }
    }

    /// Builds a table from `(q_LL, q_n, ..., q_1)`, coarsest first.
    pub fn from_coarse_to_fine(steps: &[u16]) -> Result<Self, QuantError> {
        match steps.split_first() {
            Some((&ll, rest)) => QTable::new(ll, rest.iter().rev().copied().collect()),
            None => Err(QuantError::NoDetailSteps),
        }
    }

    /// `(q_LL, q_n, ..., q_1)` for an `n`-level pyramid.
    pub fn to_coarse_to_fine(&self, levels: usize) -> Vec<u16> {
        let mut v = vec![self.ll];
        v.extend(
            (1..=levels as u8)
                .rev()
                .map(|l| self.step(SubbandId::new(l, SubbandKind::HL))),
        );
        v
    }

    pub fn ll_step(&self) -> u16 {
        self.ll
    }

    pub fn step(&self, id: SubbandId) -> u16 {
        if id.kind == SubbandKind::LL {
            return self.ll;
        }
        let i = (id.level as usize)
            .saturating_sub(1)
            .min(self.detail.len() - 1);
        self.detail[i]
    }

    pub fn is_lossless(&self) -> bool {
        self.ll == 1 && self.detail.iter().all(|&q| q == 1)
    }
}

/// `sign(c) * floor((|c| + q/2) / q)`, with integer `q/2`.
#[inline]
pub fn quantize_value(c: i32, q: u16) -> i32 {
    let q = q as i32;
    c.signum() * ((c.abs() + q / 2) / q)
}

#[inline]
pub fn dequantize_value(i: i32, q: u16) -> i32 {
    i * q as i32
}

pub fn quantize(p: &CoeffPyramid, t: &QTable) -> CoeffPyramid {
    p.map_coeffs(|id, c| quantize_value(c, t.step(id)))
}

pub fn dequantize(p: &CoeffPyramid, t: &QTable) -> CoeffPyramid {
    p.map_coeffs(|id, i| dequantize_value(i, t.step(id)))
}
