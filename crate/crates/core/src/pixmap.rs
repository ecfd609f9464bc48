//! 8-bit grayscale images, PGM I/O, and block segmentation.

use thiserror::Error;

use crate::grid::Grid;

/// Every block side must allow three halvings.
pub const BLOCK_ALIGN: usize = 8;

pub const DEFAULT_BLOCK_SIZE: usize = 64;

/// Upper bound on `width * height` accepted by the PGM reader.
pub const MAX_PIXELS: usize = 1 << 30;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PgmError {
    #[error("bad magic: expected P2 or P5")]
    BadMagic,
    #[error("malformed header: {0}")]
    BadHeader(&'static str),
    #[error("unsupported maxval {0} (at most 255)")]
    UnsupportedMaxval(u64),
    #[error("image dimensions {width}x{height} overflow")]
    DimensionOverflow { width: u64, height: u64 },
    #[error("truncated pixel data: expected {expected} samples, got {got}")]
    Truncated { expected: usize, got: usize },
    #[error("sample {value} exceeds maxval {maxval}")]
    SampleOutOfRange { value: u64, maxval: u64 },
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BlockError {
    #[error("block size {0} is not a positive multiple of {BLOCK_ALIGN}")]
    InvalidBlockSize(usize),
    #[error("image dimensions must be positive")]
    EmptyImage,
    #[error("missing block {0}")]
    MissingBlock(usize),
    #[error("block {index} does not belong to a {cols}x{rows} tiling")]
    UnexpectedBlock {
        index: usize,
        cols: usize,
        rows: usize,
    },
    #[error("duplicate block {0}")]
    DuplicateBlock(usize),
    #[error("block {index} has size {got}, expected {expected}")]
    InconsistentBlockSize {
        index: usize,
        expected: usize,
        got: usize,
    },
    #[error("block {0} has an origin that does not match its index")]
    InconsistentOrigin(usize),
}

/// 8-bit grayscale image, row-major, top-to-bottom.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Image {
    width: usize,
    height: usize,
    pixels: Vec<u8>,
}

impl Image {
    /// Returns `None` if a dimension is zero or `pixels` has the wrong length.
    pub fn new(width: usize, height: usize, pixels: Vec<u8>) -> Option<Self> {
        if width == 0 || height == 0 || width.checked_mul(height)? != pixels.len() {
            return None;
        }
        Some(Image {
            width,
            height,
            pixels,
        })
    }

    pub fn filled(width: usize, height: usize, value: u8) -> Self {
        assert!(width > 0 && height > 0);
        Image {
            width,
            height,
            pixels: vec![value; width * height],
        }
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> u8) -> Self {
        assert!(width > 0 && height > 0);
        let mut pixels = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                pixels.push(f(x, y));
            }
        }
        Image {
            width,
            height,
            pixels,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.pixels[y * self.width + x]
    }

    /// Converts a signed grid to an image, clamping every sample to `[0, 255]`.
    pub fn from_grid_clamped(grid: &Grid<i32>) -> Self {
        Image::new(
            grid.width(),
            grid.height(),
            grid.as_slice().iter().map(|&v| clamp_u8(v)).collect(),
        )
        .expect("grid dimensions are positive")
    }

    pub fn to_grid(&self) -> Grid<i32> {
        Grid::from_vec(
            self.width,
            self.height,
            self.pixels.iter().map(|&p| p as i32).collect(),
        )
        .unwrap()
    }
}

#[inline]
pub fn clamp_u8(v: i32) -> u8 {
    v.clamp(0, 255) as u8
}

struct HeaderReader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> HeaderReader<'a> {
    fn skip_space_and_comments(&mut self) {
        while let Some(&b) = self.bytes.get(self.pos) {
            if b == b'#' {
                while let Some(&c) = self.bytes.get(self.pos) {
                    self.pos += 1;
                    if c == b'\n' || c == b'\r' {
                        break;
                    }
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    /// Reads one unsigned decimal token. `None` at end of input.
    fn number(&mut self) -> Result<Option<u64>, PgmError> {
        self.skip_space_and_comments();
        let start = self.pos;
        while self.bytes.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if start == self.pos {
            return match self.bytes.get(self.pos) {
                None => Ok(None),
                Some(_) => Err(PgmError::BadHeader("expected a decimal number")),
            };
        }
        let mut v: u64 = 0;
        for &d in &self.bytes[start..self.pos] {
            v = v
                .checked_mul(10)
                .and_then(|v| v.checked_add((d - b'0') as u64))
                .ok_or(PgmError::BadHeader("number too large"))?;
        }
        Ok(Some(v))
    }

    fn header_number(&mut self) -> Result<u64, PgmError> {
        self.number()?
            .ok_or(PgmError::BadHeader("unexpected end of header"))
    }
}

/// Parses a binary (P5) or ASCII (P2) PGM with maxval at most 255.
///
/// Sample values are kept as stored; images with a maxval below 255 are not
/// rescaled.
pub fn load_pgm(bytes: &[u8]) -> Result<Image, PgmError> {
    let binary = match bytes.get(..2) {
        Some(b"P5") => true,
        Some(b"P2") => false,
        _ => return Err(PgmError::BadMagic),
    };
    let mut rd = HeaderReader { bytes, pos: 2 };
    if !rd
        .bytes
        .get(2)
        .is_some_and(|b| b.is_ascii_whitespace() || *b == b'#')
    {
        return Err(PgmError::BadMagic);
    }
    let width = rd.header_number()?;
    let height = rd.header_number()?;
    let maxval = rd.header_number()?;
    if width == 0 || height == 0 {
        return Err(PgmError::BadHeader("zero dimension"));
    }
    let count = width
        .checked_mul(height)
        .filter(|&c| c <= MAX_PIXELS as u64)
        .ok_or(PgmError::DimensionOverflow { width, height })? as usize;
    if maxval == 0 {
        return Err(PgmError::BadHeader("maxval must be positive"));
    }
    if maxval > 255 {
        return Err(PgmError::UnsupportedMaxval(maxval));
    }

    let pixels = if binary {
        // exactly one whitespace byte separates the header from the raster
        if !rd.bytes.get(rd.pos).is_some_and(u8::is_ascii_whitespace) {
            return Err(PgmError::BadHeader("missing separator before raster"));
        }
        let raster = &bytes[rd.pos + 1..];
        if raster.len() < count {
            return Err(PgmError::Truncated {
                expected: count,
                got: raster.len(),
            });
        }
        let raster = &raster[..count];
        if let Some(&v) = raster.iter().find(|&&v| v as u64 > maxval) {
            return Err(PgmError::SampleOutOfRange {
                value: v as u64,
                maxval,
            });
        }
        raster.to_vec()
    } else {
        let mut px = Vec::with_capacity(count);
        while px.len() < count {
            match rd.number()? {
                Some(v) if v > maxval => {
                    return Err(PgmError::SampleOutOfRange { value: v, maxval })
                }
                Some(v) => px.push(v as u8),
                None => {
                    return Err(PgmError::Truncated {
                        expected: count,
                        got: px.len(),
                    })
                }
            }
        }
        px
    };

    Ok(Image {
        width: width as usize,
        height: height as usize,
        pixels,
    })
}

/// Writes a binary P5 PGM with maxval 255. Output is byte-deterministic.
pub fn save_pgm(img: &Image) -> Vec<u8> {
    let header = format!("P5\n{} {}\n255\n", img.width, img.height);
    let mut out = Vec::with_capacity(header.len() + img.pixels.len());
    out.extend_from_slice(header.as_bytes());
    out.extend_from_slice(&img.pixels);
    out
}

/// Block layout of an image: `cols` × `rows` square tiles of side `block_size`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Tiling {
    pub width: usize,
    pub height: usize,
    pub block_size: usize,
}

impl Tiling {
    pub fn new(width: usize, height: usize, block_size: usize) -> Result<Self, BlockError> {
        if block_size == 0 || !block_size.is_multiple_of(BLOCK_ALIGN) {
            return Err(BlockError::InvalidBlockSize(block_size));
        }
        if width == 0 || height == 0 {
            return Err(BlockError::EmptyImage);
        }
        Ok(Tiling {
            width,
            height,
            block_size,
        })
    }

    pub fn cols(&self) -> usize {
        self.width.div_ceil(self.block_size)
    }

    pub fn rows(&self) -> usize {
        self.height.div_ceil(self.block_size)
    }

    pub fn count(&self) -> usize {
        self.cols() * self.rows()
    }

    /// Pixel offset of block `index` in row-major block order.
    pub fn origin(&self, index: usize) -> (usize, usize) {
        let cols = self.cols();
        (
            (index % cols) * self.block_size,
            (index / cols) * self.block_size,
        )
    }

    /// Dimensions of the block-aligned canvas covering the image.
    pub fn padded_dims(&self) -> (usize, usize) {
        (self.cols() * self.block_size, self.rows() * self.block_size)
    }
}

/// One square tile of an image, as signed samples.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Block {
    pub index: usize,
    pub origin: (usize, usize),
    pub size: usize,
    pub samples: Grid<i32>,
}

/// Tiles `img` into `block_size` squares in row-major order.
///
/// Edge blocks extending past the image replicate its last row and column.
pub fn split_blocks(img: &Image, block_size: usize) -> Result<Vec<Block>, BlockError> {
    let tiling = Tiling::new(img.width, img.height, block_size)?;
    Ok((0..tiling.count())
        .map(|index| {
            let (ox, oy) = tiling.origin(index);
            let samples = Grid::from_fn(block_size, block_size, |x, y| {
                let sx = (ox + x).min(img.width - 1);
                let sy = (oy + y).min(img.height - 1);
                img.get(sx, sy) as i32
            });
            Block {
                index,
                origin: (ox, oy),
                size: block_size,
                samples,
            }
        })
        .collect())
}

/// Reassembles a complete tiling, cropping padding and clamping samples to `[0, 255]`.
pub fn merge_blocks(blocks: &[Block], width: usize, height: usize) -> Result<Image, BlockError> {
    let size = blocks.first().map(|b| b.size).unwrap_or(0);
    let tiling = Tiling::new(width, height, size).map_err(|e| match e {
        BlockError::InvalidBlockSize(_) if blocks.is_empty() => BlockError::MissingBlock(0),
        e => e,
    })?;
    let count = tiling.count();
    let mut slots: Vec<Option<&Block>> = vec![None; count];
    for b in blocks {
        if b.index >= count {
            return Err(BlockError::UnexpectedBlock {
                index: b.index,
                cols: tiling.cols(),
                rows: tiling.rows(),
            });
        }
        if b.size != size || b.samples.width() != size || b.samples.height() != size {
            return Err(BlockError::InconsistentBlockSize {
                index: b.index,
                expected: size,
                got: b.size,
            });
        }
        if b.origin != tiling.origin(b.index) {
            return Err(BlockError::InconsistentOrigin(b.index));
        }
        if slots[b.index].replace(b).is_some() {
            return Err(BlockError::DuplicateBlock(b.index));
        }
    }
    if let Some(missing) = slots.iter().position(Option::is_none) {
        return Err(BlockError::MissingBlock(missing));
    }

    let mut pixels = vec![0u8; width * height];
    for b in slots.into_iter().flatten() {
        let (ox, oy) = b.origin;
        let w = size.min(width - ox);
        let h = size.min(height - oy);
        for y in 0..h {
            let dst = &mut pixels[(oy + y) * width + ox..][..w];
            for (d, &s) in dst.iter_mut().zip(&b.samples.row(y)[..w]) {
                *d = clamp_u8(s);
            }
        }
    }
    Ok(Image {
        width,
        height,
        pixels,
    })
}
