use crate::exec::Exec;
use crate::haar::{self, subband_order, CoeffPyramid, SubbandId, SubbandKind};
use crate::hamming::{DecodeReport, HammingCode};
use crate::pixmap::Tiling;
use crate::quant::QTable;

use super::packet::{parse_packet, serialize_packet, Packet, PacketHeader, ParsedPacket};
use super::TransitError;

/// Largest payload the 16-bit length field can describe.
pub const MAX_PAYLOAD_BITS: usize = u16::MAX as usize;

/// Everything the receiver needs before the first data packet.
///
/// Sent as a level-0 control packet whose body is, big-endian:
/// width u32, height u32, block_size u16, levels u8, code k u8,
/// code SECDED u8, then `levels + 1` quantizer steps u16, coarsest first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StreamInfo {
    image_id: u16,
    tiling: Tiling,
    levels: usize,
    code: HammingCode,
    qtable: QTable,
}

impl StreamInfo {
    pub fn new(
        image_id: u16,
        width: usize,
        height: usize,
        block_size: usize,
        levels: usize,
        code: HammingCode,
        qtable: QTable,
    ) -> Result<Self, TransitError> {
        let tiling = Tiling::new(width, height, block_size)?;
        if width > u32::MAX as usize || height > u32::MAX as usize {
            return Err(TransitError::BadPreamble("dimensions exceed 32 bits"));
        }
        if block_size > u16::MAX as usize {
            return Err(TransitError::BadPreamble("block size exceeds 16 bits"));
        }
        if levels == 0 || levels > haar::MAX_LEVELS {
            return Err(haar::HaarError::InvalidLevels(levels).into());
        }
        if !block_size.is_multiple_of(1 << levels) {
            return Err(haar::HaarError::IndivisibleSize {
                size: block_size,
                levels,
            }
            .into());
        }
        let largest = 16 * (block_size / 2).pow(2);
        if largest > MAX_PAYLOAD_BITS {
            return Err(TransitError::PayloadTooLarge(largest));
        }
        if tiling.count() > u16::MAX as usize + 1 {
            return Err(TransitError::BadPreamble("more than 65536 blocks"));
        }
        if code.k() > u8::MAX as usize {
            return Err(TransitError::BadPreamble("code k exceeds 255"));
        }
        Ok(StreamInfo {
            image_id,
            tiling,
            levels,
            code,
            qtable,
        })
    }

    pub fn image_id(&self) -> u16 {
        self.image_id
    }

    pub fn tiling(&self) -> Tiling {
        self.tiling
    }

    pub fn width(&self) -> usize {
        self.tiling.width
    }

    pub fn height(&self) -> usize {
        self.tiling.height
    }

    pub fn block_size(&self) -> usize {
        self.tiling.block_size
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn code(&self) -> &HammingCode {
        &self.code
    }

    pub fn qtable(&self) -> &QTable {
        &self.qtable
    }

    pub fn stages(&self) -> usize {
        3 * self.levels + 1
    }

    pub fn expected_packets(&self) -> usize {
        self.stages() * self.tiling.count()
    }

    /// Payload bits of one subband at `level`.
    pub fn subband_payload_bits(&self, level: u8) -> usize {
        16 * (self.block_size() >> level).pow(2)
    }

    /// Sequence number the data packet for (`id`, `block`) must carry.
    pub fn expected_seq(&self, id: SubbandId, block: usize) -> Option<u32> {
        let stage = stage_index(self.levels, id)?;
        Some((stage * self.tiling.count() + block) as u32)
    }

    pub fn to_packet(&self) -> Packet {
        let mut body = Vec::new();
        body.extend_from_slice(&(self.width() as u32).to_be_bytes());
        body.extend_from_slice(&(self.height() as u32).to_be_bytes());
        body.extend_from_slice(&(self.block_size() as u16).to_be_bytes());
        body.push(self.levels as u8);
        body.push(self.code.k() as u8);
        body.push(self.code.is_secded() as u8);
        for q in self.qtable.to_coarse_to_fine(self.levels) {
            body.extend_from_slice(&q.to_be_bytes());
        }
        Packet::new(
            PacketHeader {
                image_id: self.image_id,
                block_index: 0,
                level: 0,
                kind: SubbandKind::LL,
                seq: 0,
            },
            HammingCode::header_12_8(),
            body,
        )
        .expect("preamble fits")
    }

    pub fn from_packet(p: &Packet) -> Result<Self, TransitError> {
        if !p.is_control() {
            return Err(TransitError::BadPreamble(
                "first packet is not a control packet",
            ));
        }
        let b = p.payload();
        if b.len() < 15 {
            return Err(TransitError::BadPreamble("short body"));
        }
        let width = u32::from_be_bytes([b[0], b[1], b[2], b[3]]) as usize;
        let height = u32::from_be_bytes([b[4], b[5], b[6], b[7]]) as usize;
        let block_size = u16::from_be_bytes([b[8], b[9]]) as usize;
        let levels = b[10] as usize;
        let k = b[11] as usize;
        let secded = match b[12] {
            0 => false,
            1 => true,
            _ => return Err(TransitError::BadPreamble("SECDED flag")),
        };
        if b.len() != 13 + 2 * (levels + 1) {
            return Err(TransitError::BadPreamble(
                "body length does not match level count",
            ));
        }
        let steps: Vec<u16> = b[13..]
            .chunks_exact(2)
            .map(|c| u16::from_be_bytes([c[0], c[1]]))
            .collect();
        let qtable = QTable::from_coarse_to_fine(&steps)
            .map_err(|_| TransitError::BadPreamble("quantizer steps"))?;
        let code = HammingCode::new(k, secded)?;
        StreamInfo::new(
            p.header().image_id,
            width,
            height,
            block_size,
            levels,
            code,
            qtable,
        )
    }
}

/// Position of `id` in the coarse-to-fine order.
pub fn stage_index(levels: usize, id: SubbandId) -> Option<usize> {
    if id.level == 0 || id.level as usize > levels {
        return None;
    }
    if id.kind == SubbandKind::LL {
        return (id.level as usize == levels).then_some(0);
    }
    let from_top = levels - id.level as usize;
    Some(1 + 3 * from_top + id.kind as usize - 1)
}

fn subband_payload(p: &CoeffPyramid, id: SubbandId) -> Result<Vec<u8>, TransitError> {
    let sb = p.subband(id).ok_or(haar::HaarError::MissingSubband(id))?;
    let mut out = Vec::with_capacity(sb.coeffs.as_slice().len() * 2);
    for &c in sb.coeffs.as_slice() {
        let v = i16::try_from(c).map_err(|_| TransitError::CoefficientOutOfRange {
            block: p.block_index(),
            subband: id,
            value: c,
        })?;
        out.extend_from_slice(&v.to_be_bytes());
    }
    Ok(out)
}

/// Emits one packet per (subband, block), subband-major and coarse-to-fine.
///
/// `pyramids` must hold blocks `0..n` in order. Sequence numbers start at 0.
pub fn packetize(
    pyramids: &[CoeffPyramid],
    info: &StreamInfo,
    exec: Exec,
) -> Result<Vec<Packet>, TransitError> {
    if pyramids.len() != info.tiling.count() {
        return Err(TransitError::OutOfLayout(
            "pyramid count differs from block count",
        ));
    }
    for (i, p) in pyramids.iter().enumerate() {
        if p.block_index() != i || p.size() != info.block_size() || p.levels() != info.levels {
            return Err(TransitError::OutOfLayout(
                "pyramid does not match the stream layout",
            ));
        }
    }
    let order = subband_order(info.levels);
    let blocks = pyramids.len();
    let results = exec.map_range(order.len() * blocks, |seq| {
        let id = order[seq / blocks];
        let p = &pyramids[seq % blocks];
        let payload = subband_payload(p, id)?;
        Packet::new(
            PacketHeader {
                image_id: info.image_id,
                block_index: p.block_index() as u16,
                level: id.level,
                kind: id.kind,
                seq: seq as u32,
            },
            info.code.clone(),
            payload,
        )
    });
    results.into_iter().collect()
}

/// Preamble followed by `packets`, concatenated.
pub fn serialize_stream(info: &StreamInfo, packets: &[Packet], exec: Exec) -> Vec<u8> {
    let mut out = serialize_packet(&info.to_packet());
    for wire in exec.map(packets, serialize_packet) {
        out.extend_from_slice(&wire);
    }
    out
}

/// Result of reading a (possibly corrupted) stream.
#[derive(Debug, Clone)]
pub struct ParsedStream {
    pub info: StreamInfo,
    pub preamble_report: DecodeReport,
    pub packets: Vec<ParsedPacket>,
    /// Number of times the parser lost framing and had to rescan.
    pub resyncs: usize,
    /// Bytes skipped while rescanning.
    pub skipped_bytes: usize,
}

impl ParsedStream {
    pub fn lost_packets(&self) -> usize {
        let mut seen = vec![false; self.info.expected_packets()];
        for p in &self.packets {
            seen[p.packet.header().seq as usize] = true;
        }
        seen.iter().filter(|&&s| !s).count()
    }
}

fn plausible(info: &StreamInfo, p: &ParsedPacket) -> bool {
    let h = p.packet.header();
    let id = SubbandId::new(h.level, h.kind);
    h.image_id == info.image_id
        && (h.block_index as usize) < info.tiling.count()
        && info.expected_seq(id, h.block_index as usize) == Some(h.seq)
        && p.packet.payload_bits() as usize == info.subband_payload_bits(h.level)
}

/// Parses a preamble and the data packets that follow it.
///
/// A data packet whose header cannot be recovered is dropped; the parser
/// then scans forward byte by byte for the next header that decodes cleanly
/// and is consistent with the preamble (image id, block range, sequence
/// number, payload size).
pub fn parse_stream(bytes: &[u8]) -> Result<ParsedStream, TransitError> {
    let pre = parse_packet(bytes, &HammingCode::header_12_8())?;
    if pre.body_report.uncorrectable > 0 {
        return Err(TransitError::BadPreamble("uncorrectable preamble body"));
    }
    let info = StreamInfo::from_packet(&pre.packet)?;
    let mut packets = Vec::new();
    let mut pos = pre.wire_len;
    let mut resyncs = 0;
    let mut skipped_bytes = 0;
    let mut in_sync = true;
    while pos < bytes.len() {
        match parse_packet(&bytes[pos..], &info.code) {
            Ok(p) if !p.packet.is_control() && plausible(&info, &p) => {
                pos += p.wire_len;
                packets.push(p);
                in_sync = true;
            }
            _ => {
                if in_sync {
                    resyncs += 1;
                    in_sync = false;
                }
                pos += 1;
                skipped_bytes += 1;
            }
        }
    }
    Ok(ParsedStream {
        info,
        preamble_report: pre.report(),
        packets,
        resyncs,
        skipped_bytes,
    })
}
