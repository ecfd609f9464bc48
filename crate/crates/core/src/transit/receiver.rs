use std::collections::BTreeMap;

use crate::exec::Exec;
use crate::grid::Grid;
use crate::haar::{inverse_multilevel, subband_order, CoeffPyramid, Subband, SubbandId};
use crate::hamming::{DecodeReport, Severity};
use crate::pixmap::{merge_blocks, Image};
use crate::quant::dequantize;

use super::packet::Packet;
use super::stream::{stage_index, StreamInfo};
use super::TransitError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PacketRecord {
    pub seq: u32,
    pub status: Severity,
}

/// Progressive receiver. Holds at most one coefficient grid per subband.
#[derive(Debug, Clone)]
pub struct Receiver {
    info: StreamInfo,
    blocks: Vec<BTreeMap<SubbandId, Grid<i32>>>,
    records: Vec<PacketRecord>,
    report: DecodeReport,
}

impl Receiver {
    pub fn new(info: StreamInfo) -> Self {
        Receiver {
            blocks: vec![BTreeMap::new(); info.tiling().count()],
            info,
            records: Vec::new(),
            report: DecodeReport::default(),
        }
    }

    pub fn info(&self) -> &StreamInfo {
        &self.info
    }

    /// Stores the subband carried by `p`, replacing any earlier copy.
    pub fn receive(&mut self, p: &Packet, report: &DecodeReport) -> Result<(), TransitError> {
        let h = p.header();
        if h.image_id != self.info.image_id() {
            return Err(TransitError::ImageIdMismatch {
                expected: self.info.image_id(),
                got: h.image_id,
            });
        }
        let id = SubbandId::new(h.level, h.kind);
        if stage_index(self.info.levels(), id).is_none() {
            return Err(TransitError::OutOfLayout("subband not in this pyramid"));
        }
        let block = h.block_index as usize;
        if block >= self.blocks.len() {
            return Err(TransitError::OutOfLayout("block index beyond the tiling"));
        }
        let side = self.info.block_size() >> id.level;
        if p.payload().len() != 2 * side * side {
            return Err(TransitError::OutOfLayout(
                "payload size does not match subband",
            ));
        }
        let coeffs: Vec<i32> = p
            .payload()
            .chunks_exact(2)
            .map(|c| i16::from_be_bytes([c[0], c[1]]) as i32)
            .collect();
        self.blocks[block].insert(id, Grid::from_vec(side, side, coeffs).unwrap());
        self.records.push(PacketRecord {
            seq: h.seq,
            status: report.worst,
        });
        self.report.merge(report);
        Ok(())
    }

    pub fn packets_received(&self) -> usize {
        self.records.len()
    }

    pub fn records(&self) -> &[PacketRecord] {
        &self.records
    }

    /// Accumulated FEC outcome of every packet received so far.
    pub fn report(&self) -> &DecodeReport {
        &self.report
    }

    /// Number of distinct subbands held across all blocks.
    pub fn subbands_held(&self) -> usize {
        self.blocks.iter().map(BTreeMap::len).sum()
    }

    fn block_pyramid(&self, index: usize) -> CoeffPyramid {
        let size = self.info.block_size();
        let held = &self.blocks[index];
        let subbands = subband_order(self.info.levels())
            .into_iter()
            .map(|id| Subband {
                id,
                coeffs: held
                    .get(&id)
                    .cloned()
                    .unwrap_or_else(|| Grid::new(size >> id.level, size >> id.level)),
            })
            .collect();
        CoeffPyramid::from_subbands(
            index,
            self.info.tiling().origin(index),
            size,
            self.info.levels(),
            subbands,
        )
        .expect("receiver only stores subbands of this layout")
    }

    /// Current best image; missing subbands count as all-zero.
    pub fn reconstruct_partial(&self, exec: Exec) -> Image {
        let qtable = self.info.qtable();
        let blocks = exec.map_range(self.blocks.len(), |i| {
            let p = self.block_pyramid(i);
            let p = if qtable.is_lossless() {
                p
            } else {
                dequantize(&p, qtable)
            };
            inverse_multilevel(&p)
        });
        merge_blocks(&blocks, self.info.width(), self.info.height())
            .expect("receiver blocks tile the image")
    }
}
