//! MSB-first conversion between bytes and bit sequences.

pub fn bytes_to_bits(bytes: &[u8]) -> Vec<bool> {
    let mut out = Vec::with_capacity(bytes.len() * 8);
    for &b in bytes {
        for i in (0..8).rev() {
            out.push(b >> i & 1 == 1);
        }
    }
    out
}

/// Packs bits MSB-first; a trailing partial byte is zero-padded.
pub fn bits_to_bytes(bits: &[bool]) -> Vec<u8> {
    bits.chunks(8)
        .map(|chunk| {
            chunk
                .iter()
                .enumerate()
                .fold(0u8, |acc, (i, &b)| acc | (b as u8) << (7 - i))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn msb_first() {
        assert_eq!(
            bytes_to_bits(&[0b1010_0001]),
            [true, false, true, false, false, false, false, true]
        );
        assert_eq!(bits_to_bytes(&[true, true, false]), vec![0b1100_0000]);
        assert_eq!(
            bits_to_bytes(&bytes_to_bits(&[0x57, 0x43])),
            vec![0x57, 0x43]
        );
        assert!(bits_to_bytes(&[]).is_empty());
    }
}
