use crate::bits::{bits_to_bytes, bytes_to_bits};
use crate::haar::SubbandKind;
use crate::hamming::{DecodeReport, HammingCode, Severity};

use super::TransitError;

pub const MAGIC: [u8; 2] = [0x57, 0x43];
pub const VERSION: u8 = 1;
/// Header bytes before protection.
pub const HEADER_BYTES: usize = 16;
/// Header bytes on the wire: every header byte becomes a 12-bit codeword.
pub const WIRE_HEADER_BYTES: usize = 24;
pub const FLAG_SECDED: u8 = 0x01;

/// Routing fields of a packet. `level == 0` marks the stream preamble.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PacketHeader {
    pub image_id: u16,
    pub block_index: u16,
    pub level: u8,
    pub kind: SubbandKind,
    pub seq: u32,
}

/// One wire unit: a header plus a payload protected by `code`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Packet {
    header: PacketHeader,
    code: HammingCode,
    payload: Vec<u8>,
}

impl Packet {
    pub fn new(
        header: PacketHeader,
        code: HammingCode,
        payload: Vec<u8>,
    ) -> Result<Self, TransitError> {
        let bits = payload.len() * 8;
        if bits > u16::MAX as usize {
            return Err(TransitError::PayloadTooLarge(bits));
        }
        if header.level == 0 && code != HammingCode::header_12_8() {
            return Err(TransitError::CodeMismatch);
        }
        Ok(Packet {
            header,
            code,
            payload,
        })
    }

    pub fn header(&self) -> &PacketHeader {
        &self.header
    }

    pub fn code(&self) -> &HammingCode {
        &self.code
    }

    /// Data bytes before FEC.
    pub fn payload(&self) -> &[u8] {
        &self.payload
    }

    pub fn payload_bits(&self) -> u16 {
        (self.payload.len() * 8) as u16
    }

    pub fn is_control(&self) -> bool {
        self.header.level == 0
    }

    fn flags(&self) -> u8 {
        if self.code.is_secded() {
            FLAG_SECDED
        } else {
            0
        }
    }

    /// Size of the FEC-coded body on the wire.
    pub fn body_wire_bytes(&self) -> usize {
        body_wire_bytes(&self.code, self.payload_bits() as usize)
    }

    pub fn wire_len(&self) -> usize {
        WIRE_HEADER_BYTES + self.body_wire_bytes()
    }
}

fn body_wire_bytes(code: &HammingCode, payload_bits: usize) -> usize {
    (payload_bits.div_ceil(code.k()) * code.wire_len()).div_ceil(8)
}

fn header_bytes(p: &Packet) -> [u8; HEADER_BYTES] {
    let h = &p.header;
    let mut b = [0u8; HEADER_BYTES];
    b[0..2].copy_from_slice(&MAGIC);
    b[2] = VERSION;
    b[3] = p.flags();
    b[4..6].copy_from_slice(&h.image_id.to_be_bytes());
    b[6..8].copy_from_slice(&h.block_index.to_be_bytes());
    b[8] = h.level;
    b[9] = h.kind.code();
    b[10..14].copy_from_slice(&h.seq.to_be_bytes());
    b[14..16].copy_from_slice(&p.payload_bits().to_be_bytes());
    b
}

/// Wire bytes: 24 protected header bytes, then the coded body padded to a byte.
pub fn serialize_packet(p: &Packet) -> Vec<u8> {
    let header_code = HammingCode::header_12_8();
    let mut bits = header_code.encode_stream(&bytes_to_bits(&header_bytes(p)));
    debug_assert_eq!(bits.len(), WIRE_HEADER_BYTES * 8);
    bits.extend(p.code.encode_stream(&bytes_to_bits(&p.payload)));
    bits_to_bytes(&bits)
}

/// A packet recovered from the wire.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParsedPacket {
    pub packet: Packet,
    pub header_report: DecodeReport,
    pub body_report: DecodeReport,
    /// Bytes consumed from the input.
    pub wire_len: usize,
}

impl ParsedPacket {
    pub fn report(&self) -> DecodeReport {
        let mut r = self.header_report;
        r.merge(&self.body_report);
        r
    }

    pub fn status(&self) -> Severity {
        self.header_report.worst.max(self.body_report.worst)
    }
}

/// Parses one packet from the front of `bytes`.
///
/// Data packets are decoded with `code`; the preamble (level 0) always uses
/// the header code for its body.
pub fn parse_packet(bytes: &[u8], code: &HammingCode) -> Result<ParsedPacket, TransitError> {
    if bytes.len() < WIRE_HEADER_BYTES {
        return Err(TransitError::Truncated {
            needed: WIRE_HEADER_BYTES,
            got: bytes.len(),
        });
    }
    let header_code = HammingCode::header_12_8();
    let (hbits, header_report) = header_code.decode_stream(
        &bytes_to_bits(&bytes[..WIRE_HEADER_BYTES]),
        HEADER_BYTES * 8,
    )?;
    let h = bits_to_bytes(&hbits);
    if h[0..2] != MAGIC {
        return Err(TransitError::BadMagic);
    }
    if h[2] != VERSION {
        return Err(TransitError::UnsupportedVersion(h[2]));
    }
    if header_report.uncorrectable > 0 {
        return Err(TransitError::HeaderUncorrectable);
    }
    let flags = h[3];
    if flags & !FLAG_SECDED != 0 {
        return Err(TransitError::InvalidHeader("unknown flag bits"));
    }
    let kind = SubbandKind::from_code(h[9]).ok_or(TransitError::InvalidHeader("subband kind"))?;
    let header = PacketHeader {
        image_id: u16::from_be_bytes([h[4], h[5]]),
        block_index: u16::from_be_bytes([h[6], h[7]]),
        level: h[8],
        kind,
        seq: u32::from_be_bytes([h[10], h[11], h[12], h[13]]),
    };
    let payload_bits = u16::from_be_bytes([h[14], h[15]]) as usize;
    if !payload_bits.is_multiple_of(8) {
        return Err(TransitError::InvalidHeader(
            "payload is not a whole number of bytes",
        ));
    }

    let body_code = if header.level == 0 {
        if flags != 0 {
            return Err(TransitError::InvalidHeader("preamble flags"));
        }
        header_code
    } else {
        if (flags & FLAG_SECDED != 0) != code.is_secded() {
            return Err(TransitError::CodeMismatch);
        }
        code.clone()
    };

    let body_len = body_wire_bytes(&body_code, payload_bits);
    let wire_len = WIRE_HEADER_BYTES + body_len;
    if bytes.len() < wire_len {
        return Err(TransitError::Truncated {
            needed: wire_len,
            got: bytes.len(),
        });
    }
    let mut body_bits = bytes_to_bits(&bytes[WIRE_HEADER_BYTES..wire_len]);
    body_bits.truncate(payload_bits.div_ceil(body_code.k()) * body_code.wire_len());
    let (data, body_report) = body_code.decode_stream(&body_bits, payload_bits)?;

    Ok(ParsedPacket {
        packet: Packet {
            header,
            code: body_code,
            payload: bits_to_bytes(&data),
        },
        header_report,
        body_report,
        wire_len,
    })
}
