//! End-to-end pipeline: segment, transform, quantize, packetize, transmit,
//! parse, and reconstruct progressively.

use crate::channel::ChannelModel;
use crate::exec::Exec;
use crate::grid::Grid;
use crate::haar::{self, forward_multilevel, CoeffPyramid};
use crate::hamming::{DecodeReport, HammingCode, Severity};
use crate::pixmap::{clamp_u8, split_blocks, Image, Tiling, DEFAULT_BLOCK_SIZE};
use crate::quant::{quantize, QTable};
use crate::transit::{
    self, packetize, parse_stream, serialize_stream, stage_index, Metrics, Packet, ParsedStream,
    Receiver, StreamInfo,
};
use crate::Error;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodecConfig {
    pub image_id: u16,
    pub block_size: usize,
    pub levels: usize,
    pub qtable: QTable,
    pub code: HammingCode,
}

impl Default for CodecConfig {
    fn default() -> Self {
        CodecConfig {
            image_id: 1,
            block_size: DEFAULT_BLOCK_SIZE,
            levels: haar::DEFAULT_LEVELS,
            qtable: QTable::lossless(haar::DEFAULT_LEVELS),
            code: HammingCode::secded_8_4(),
        }
    }
}

/// Splits `img` into blocks and transforms each one.
pub fn analyze(
    img: &Image,
    block_size: usize,
    levels: usize,
    exec: Exec,
) -> Result<Vec<CoeffPyramid>, Error> {
    let blocks = split_blocks(img, block_size)?;
    Ok(exec.try_map(&blocks, |b| forward_multilevel(b, levels))?)
}

/// Preamble plus data packets, not yet on the wire.
#[derive(Debug, Clone)]
pub struct EncodedStream {
    pub info: StreamInfo,
    pub packets: Vec<Packet>,
}

impl EncodedStream {
    pub fn to_bytes(&self, exec: Exec) -> Vec<u8> {
        serialize_stream(&self.info, &self.packets, exec)
    }

    /// Data bytes before FEC, excluding headers.
    pub fn payload_bytes(&self) -> usize {
        self.packets.iter().map(|p| p.payload().len()).sum()
    }

    /// Data bytes after FEC, excluding headers.
    pub fn coded_payload_bytes(&self) -> usize {
        self.packets.iter().map(Packet::body_wire_bytes).sum()
    }
}

pub fn encode_image(img: &Image, cfg: &CodecConfig, exec: Exec) -> Result<EncodedStream, Error> {
    let info = StreamInfo::new(
        cfg.image_id,
        img.width(),
        img.height(),
        cfg.block_size,
        cfg.levels,
        cfg.code.clone(),
        cfg.qtable.clone(),
    )?;
    let mut pyramids = analyze(img, cfg.block_size, cfg.levels, exec)?;
    if !cfg.qtable.is_lossless() {
        pyramids = exec.map(&pyramids, |p| quantize(p, &cfg.qtable));
    }
    let packets = packetize(&pyramids, &info, exec)?;
    Ok(EncodedStream { info, packets })
}

/// Receiver state after the whole stream, plus one image per stage.
#[derive(Debug, Clone)]
pub struct Progressive {
    pub receiver: Receiver,
    /// `stages[k]` is the reconstruction after stages `0..=k`.
    pub stages: Vec<Image>,
}

impl Progressive {
    pub fn reconstructed(&self) -> &Image {
        self.stages.last().expect("at least one stage")
    }
}

/// Feeds parsed packets stage by stage and snapshots after each stage.
pub fn decode_progressive(parsed: &ParsedStream, exec: Exec) -> Result<Progressive, Error> {
    let info = &parsed.info;
    let mut receiver = Receiver::new(info.clone());
    let mut by_stage: Vec<Vec<&transit::ParsedPacket>> = vec![Vec::new(); info.stages()];
    for p in &parsed.packets {
        let h = p.packet.header();
        let stage = stage_index(info.levels(), haar::SubbandId::new(h.level, h.kind)).ok_or(
            transit::TransitError::OutOfLayout("subband not in this pyramid"),
        )?;
        by_stage[stage].push(p);
    }
    let mut stages = Vec::with_capacity(info.stages());
    for group in by_stage {
        for p in group {
            receiver.receive(&p.packet, &p.report())?;
        }
        stages.push(receiver.reconstruct_partial(exec));
    }
    Ok(Progressive { receiver, stages })
}

/// Parses a stream file and reconstructs it progressively.
pub fn decode_bytes(bytes: &[u8], exec: Exec) -> Result<(ParsedStream, Progressive), Error> {
    let parsed = parse_stream(bytes)?;
    let progressive = decode_progressive(&parsed, exec)?;
    Ok((parsed, progressive))
}

/// Channel and FEC tallies for a parsed stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct LinkSummary {
    pub packets_expected: usize,
    pub packets_received: usize,
    pub packets_lost: usize,
    pub packets_uncorrectable: usize,
    /// Preamble plus every received packet, headers and bodies.
    pub fec: DecodeReport,
    pub resyncs: usize,
    pub skipped_bytes: usize,
}

impl LinkSummary {
    pub fn of(parsed: &ParsedStream) -> Self {
        let mut fec = parsed.preamble_report;
        for p in &parsed.packets {
            fec.merge(&p.report());
        }
        LinkSummary {
            packets_expected: parsed.info.expected_packets(),
            packets_received: parsed.packets.len(),
            packets_lost: parsed.lost_packets(),
            packets_uncorrectable: parsed
                .packets
                .iter()
                .filter(|p| p.status() == Severity::DetectedUncorrectable)
                .count(),
            fec,
            resyncs: parsed.resyncs,
            skipped_bytes: parsed.skipped_bytes,
        }
    }

    /// No lost packets and no detected-uncorrectable words.
    pub fn is_clean(&self) -> bool {
        self.packets_lost == 0 && self.fec.uncorrectable == 0
    }

    pub fn metrics(&self, reference: &Image, candidate: &Image) -> Result<Metrics, Error> {
        Ok(Metrics {
            packets_received: self.packets_received,
            bits_corrected: self.fec.corrected,
            words_uncorrectable: self.fec.uncorrectable,
            ..transit::compute_metrics(reference, candidate)?
        })
    }
}

#[derive(Debug, Clone)]
pub struct Roundtrip {
    pub stages: Vec<Image>,
    pub stage_mse: Vec<f64>,
    pub metrics: Metrics,
    pub link: LinkSummary,
    pub payload_bytes: usize,
    pub coded_payload_bytes: usize,
    pub stream_bytes: usize,
}

impl Roundtrip {
    pub fn reconstructed(&self) -> &Image {
        self.stages.last().expect("at least one stage")
    }
}

/// Encodes `img`, passes the serialized stream through `channel`, decodes it.
pub fn roundtrip(
    img: &Image,
    cfg: &CodecConfig,
    channel: &ChannelModel,
    exec: Exec,
) -> Result<Roundtrip, Error> {
    let encoded = encode_image(img, cfg, exec)?;
    let wire = encoded.to_bytes(exec);
    let received = channel.transmit_bytes(&wire);
    let (parsed, progressive) = decode_bytes(&received, exec)?;
    let link = LinkSummary::of(&parsed);
    let stage_mse = progressive
        .stages
        .iter()
        .map(|s| transit::mse(img, s))
        .collect::<Result<Vec<_>, _>>()?;
    let metrics = link.metrics(img, progressive.reconstructed())?;
    Ok(Roundtrip {
        stages: progressive.stages,
        stage_mse,
        metrics,
        link,
        payload_bytes: encoded.payload_bytes(),
        coded_payload_bytes: encoded.coded_payload_bytes(),
        stream_bytes: wire.len(),
    })
}

/// Display mapping for coefficient snapshots: detail `c` becomes
/// `clamp(floor(c / 2) + 128)`.
pub fn display_detail(c: i32) -> u8 {
    clamp_u8(c.div_euclid(2) + 128)
}

/// The three intermediate views of the forward transform.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Snapshots {
    /// Every block after the first row pass.
    pub row_pass: Image,
    /// Every block after the first row and column passes.
    pub col_pass: Image,
    /// Every block after the full multilevel transform, Mallat layout.
    pub pyramid: Image,
}

/// Renders a block's coefficients: the `raw_w`×`raw_h` corner is shown as is
/// (clamped), the rest through [`display_detail`].
fn render(g: &Grid<i32>, raw_w: usize, raw_h: usize) -> Grid<i32> {
    Grid::from_fn(g.width(), g.height(), |x, y| {
        let c = g.get(x, y);
        if x < raw_w && y < raw_h {
            clamp_u8(c) as i32
        } else {
            display_detail(c) as i32
        }
    })
}

/// Snapshot images laid out on the block-aligned canvas.
pub fn snapshots(
    img: &Image,
    block_size: usize,
    levels: usize,
    exec: Exec,
) -> Result<Snapshots, Error> {
    let tiling = Tiling::new(img.width(), img.height(), block_size)?;
    let blocks = split_blocks(img, block_size)?;
    let views = exec.try_map(&blocks, |b| -> Result<[Grid<i32>; 3], Error> {
        let s = b.size;
        let rows = haar::row_pass(&b.samples)?;
        let cols = haar::column_pass(&rows)?;
        let pyramid = forward_multilevel(b, levels)?.to_mallat();
        let top = s >> levels;
        Ok([
            render(&rows, s / 2, s),
            render(&cols, s / 2, s / 2),
            render(&pyramid, top, top),
        ])
    })?;
    let (w, h) = tiling.padded_dims();
    let mut canvases = [Grid::new(w, h), Grid::new(w, h), Grid::new(w, h)];
    for (b, v) in blocks.iter().zip(&views) {
        for (canvas, view) in canvases.iter_mut().zip(v) {
            canvas.paste(b.origin.0, b.origin.1, view);
        }
    }
    let [row_pass, col_pass, pyramid] = canvases.map(|c| Image::from_grid_clamped(&c));
    Ok(Snapshots {
        row_pass,
        col_pass,
        pyramid,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Image {
        Image::from_fn(72, 40, |x, y| ((x * 3) ^ (y * 5)) as u8)
    }

    #[test]
    fn lossless_noiseless_roundtrip() {
        let img = sample();
        let cfg = CodecConfig {
            block_size: 16,
            ..CodecConfig::default()
        };
        let rt = roundtrip(&img, &cfg, &ChannelModel::noiseless(), Exec::Parallel).unwrap();
        assert_eq!(rt.reconstructed(), &img);
        assert_eq!(rt.metrics.mse, 0.0);
        assert_eq!(rt.stages.len(), 10);
        assert!(rt.link.is_clean());
        assert_eq!(rt.link.packets_received, rt.link.packets_expected);
        // SECDED(8,4) doubles the payload
        assert_eq!(rt.coded_payload_bytes, 2 * rt.payload_bytes);
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let img = sample();
        let cfg = CodecConfig {
            block_size: 8,
            ..CodecConfig::default()
        };
        let ch = ChannelModel::bsc(2e-3, 11).unwrap();
        let a = roundtrip(&img, &cfg, &ch, Exec::Sequential).unwrap();
        let b = roundtrip(&img, &cfg, &ch, Exec::Parallel).unwrap();
        assert_eq!(a.stages, b.stages);
        assert_eq!(a.link, b.link);
        assert_eq!(
            encode_image(&img, &cfg, Exec::Sequential)
                .unwrap()
                .to_bytes(Exec::Sequential),
            encode_image(&img, &cfg, Exec::Parallel)
                .unwrap()
                .to_bytes(Exec::Parallel)
        );
    }

    #[test]
    fn quantized_roundtrip_is_close() {
        let img = Image::from_fn(64, 64, |x, y| (x * 2 + y) as u8);
        let cfg = CodecConfig {
            block_size: 32,
            qtable: QTable::from_coarse_to_fine(&[1, 2, 4, 8]).unwrap(),
            ..CodecConfig::default()
        };
        let rt = roundtrip(&img, &cfg, &ChannelModel::noiseless(), Exec::Parallel).unwrap();
        assert!(rt.metrics.mse > 0.0);
        assert!(rt.metrics.psnr > 30.0, "{}", rt.metrics.psnr);
    }

    #[test]
    fn constant_image_snapshots() {
        let img = Image::filled(16, 16, 60);
        let s = snapshots(&img, 16, 3, Exec::Sequential).unwrap();
        for y in 0..16 {
            for x in 0..16 {
                assert_eq!(s.row_pass.get(x, y), if x < 8 { 60 } else { 128 });
                assert_eq!(s.col_pass.get(x, y), if x < 8 && y < 8 { 60 } else { 128 });
                assert_eq!(s.pyramid.get(x, y), if x < 2 && y < 2 { 60 } else { 128 });
            }
        }
    }

    #[test]
    fn display_mapping() {
        assert_eq!(display_detail(0), 128);
        assert_eq!(display_detail(-510), 0);
        assert_eq!(display_detail(510), 255);
        assert_eq!(display_detail(-1), 127);
        assert_eq!(display_detail(3), 129);
    }
}
