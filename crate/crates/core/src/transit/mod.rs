//! Packet wire format, coarse-to-fine scheduling, and receiver-side reassembly.

mod metrics;
mod packet;
mod receiver;
mod stream;

use thiserror::Error;

use crate::haar::{HaarError, SubbandId};
use crate::hamming::HammingError;
use crate::pixmap::BlockError;

pub use metrics::{compute_metrics, mse, psnr, Metrics};
pub use packet::{
    parse_packet, serialize_packet, Packet, PacketHeader, ParsedPacket, FLAG_SECDED, HEADER_BYTES,
    MAGIC, VERSION, WIRE_HEADER_BYTES,
};
pub use receiver::{PacketRecord, Receiver};
pub use stream::{
    packetize, parse_stream, serialize_stream, stage_index, ParsedStream, StreamInfo,
    MAX_PAYLOAD_BITS,
};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TransitError {
    #[error("truncated input: need {needed} bytes, have {got}")]
    Truncated { needed: usize, got: usize },
    #[error("bad magic")]
    BadMagic,
    #[error("unsupported version {0}")]
    UnsupportedVersion(u8),
    #[error("packet header has an uncorrectable word")]
    HeaderUncorrectable,
    #[error("invalid header: {0}")]
    InvalidHeader(&'static str),
    #[error("packet body code does not match the stream code")]
    CodeMismatch,
    #[error("payload of {0} bits does not fit the 16-bit length field")]
    PayloadTooLarge(usize),
    #[error("coefficient {value} in block {block} {subband} does not fit 16 bits")]
    CoefficientOutOfRange {
        block: usize,
        subband: SubbandId,
        value: i32,
    },
    #[error("packet for image {got}, stream carries image {expected}")]
    ImageIdMismatch { expected: u16, got: u16 },
    #[error("packet does not fit the stream layout: {0}")]
    OutOfLayout(&'static str),
    #[error("invalid stream preamble: {0}")]
    BadPreamble(&'static str),
    #[error("image dimensions differ: {0:?} vs {1:?}")]
    DimensionMismatch((usize, usize), (usize, usize)),
    #[error(transparent)]
    Hamming(#[from] HammingError),
    #[error(transparent)]
    Haar(#[from] HaarError),
    #[error(transparent)]
    Block(#[from] BlockError),
}
