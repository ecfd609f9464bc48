//! Progressive image transmission over a noisy binary channel.
//!
//! An 8-bit grayscale image is cut into square blocks, each block is
//! decomposed by a multilevel integer Haar transform, the subbands are
//! protected with a Hamming code and sent coarse-to-fine as self-delimiting
//! packets. The receiver corrects what the code allows and can rebuild an
//! approximation after every stage, exactly recovering the input once all
//! subbands arrive on a lossless configuration.
//!
//! ```
//! use wavecast::{codec, ChannelModel, Exec, Image};
//!
//! let img = Image::from_fn(32, 32, |x, y| (x * 8 ^ y * 4) as u8);
//! let cfg = codec::CodecConfig { block_size: 16, ..Default::default() };
//! let out = codec::roundtrip(&img, &cfg, &ChannelModel::noiseless(), Exec::default()).unwrap();
//! assert_eq!(out.reconstructed(), &img);
//! ```

pub mod bits;
pub mod channel;
pub mod codec;
pub mod exec;
pub mod grid;
pub mod haar;
pub mod hamming;
pub mod pixmap;
pub mod quant;
pub mod transit;

use thiserror::Error;

pub use channel::{ChannelKind, ChannelModel};
pub use exec::Exec;
pub use grid::Grid;
pub use hamming::{DecodeStatus, HammingCode, Severity};
pub use pixmap::{Block, Image};
pub use quant::QTable;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Pgm(#[from] pixmap::PgmError),
    #[error(transparent)]
    Block(#[from] pixmap::BlockError),
    #[error(transparent)]
    Haar(#[from] haar::HaarError),
    #[error(transparent)]
    Quant(#[from] quant::QuantError),
    #[error(transparent)]
    Hamming(#[from] hamming::HammingError),
    #[error(transparent)]
    Channel(#[from] channel::ChannelError),
    #[error(transparent)]
    Transit(#[from] transit::TransitError),
}
