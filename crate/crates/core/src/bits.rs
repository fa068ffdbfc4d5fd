//! Conversions between one-bit-per-byte arrays and MSB-first packed bytes.

use crate::error::{Error, Result};

/// Packs `bits` (values 0/1, length divisible by 8) into bytes, first bit in the MSB.
pub fn pack(bits: &[u8]) -> Result<Vec<u8>> {
    if bits.len() % 8 != 0 {
        return Err(Error::SizeMismatch {
            expected: bits.len().next_multiple_of(8),
            actual: bits.len(),
        });
    }
    Ok(bits
        .chunks_exact(8)
        .map(|c| c.iter().fold(0u8, |acc, &b| (acc << 1) | (b & 1)))
        .collect())
}

/// Expands MSB-first packed bytes into one bit per byte.
pub fn unpack(bytes: &[u8]) -> Vec<u8> {
    let mut out = Vec::with_capacity(bytes.len() * 8);
    for &byte in bytes {
        for i in (0..8).rev() {
            out.push((byte >> i) & 1);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn msb_first() {
        assert_eq!(pack(&[1, 0, 0, 0, 0, 0, 0, 1]).unwrap(), vec![0x81]);
        assert_eq!(unpack(&[0x40]), vec![0, 1, 0, 0, 0, 0, 0, 0]);
        assert!(pack(&[1, 0, 1]).is_err());
    }

    proptest::proptest! {
        #[test]
        fn unpack_then_pack(bytes in proptest::collection::vec(proptest::num::u8::ANY, 0..64)) {
            proptest::prop_assert_eq!(pack(&unpack(&bytes)).unwrap(), bytes);
        }
    }
}
