//! Binary file formats.
//!
//! LLR file, all integers little-endian:
//!
//! ```text
//! offset size
//!      0    4  magic "QLLR"
//!      4    4  N (u32)
//!      8    4  codeword count (u32)
//!     12    1  arithmetic: 0 = f32, 1 = i16
//!     13    1  q_b (0 for f32)
//!     14    2  reserved, zero
//!     16       count · N values (f32 or i16)
//! ```
//!
//! Decode output, per codeword: N/8 bytes of packed hard bits (MSB first), one byte of
//! iteration count and one byte that is 1 when the syndrome was satisfied.
//!
//! Bit streams (information words and codewords) are either packed MSB first or one
//! byte per bit with values 0/1.

use std::io::{Read, Write};

use crate::bits::{pack, unpack};
use crate::decoder::{Arithmetic, DecodeResult, LlrBlock};
use crate::error::{Error, Result};

pub const LLR_MAGIC: &[u8; 4] = b"QLLR";
pub const LLR_HEADER_BYTES: usize = 16;

/// Contents of an LLR file.
#[derive(Debug, Clone, PartialEq)]
pub struct LlrFile {
    pub n: usize,
    pub arithmetic: Arithmetic,
    /// Quantizer bits the integers were produced with; 0 for `f32`.
    pub q_b: u8,
    pub blocks: Vec<LlrBlock>,
}

impl LlrFile {
    pub fn new(n: usize, arithmetic: Arithmetic, q_b: u8) -> Self {
        Self {
            n,
            arithmetic,
            q_b,
            blocks: Vec::new(),
        }
    }

    pub fn write_to<W: Write>(&self, w: &mut W) -> Result<()> {
        let mut header = [0u8; LLR_HEADER_BYTES];
        header[..4].copy_from_slice(LLR_MAGIC);
        header[4..8].copy_from_slice(&u32_of(self.n)?.to_le_bytes());
        header[8..12].copy_from_slice(&u32_of(self.blocks.len())?.to_le_bytes());
        header[12] = match self.arithmetic {
            Arithmetic::Float32 => 0,
            Arithmetic::Fixed16 => 1,
        };
        header[13] = self.q_b;
        w.write_all(&header)?;
        let mut buf = Vec::new();
        for block in &self.blocks {
            if block.len() != self.n {
                return Err(Error::SizeMismatch {
                    expected: self.n,
                    actual: block.len(),
                });
            }
            buf.clear();
            match (block, self.arithmetic) {
                (LlrBlock::Float32(v), Arithmetic::Float32) => {
                    v.iter().for_each(|x| buf.extend_from_slice(&x.to_le_bytes()))
                }
                (LlrBlock::Fixed16(v), Arithmetic::Fixed16) => {
                    v.iter().for_each(|x| buf.extend_from_slice(&x.to_le_bytes()))
                }
                _ => return Err(Error::ArithmeticMismatch),
            }
            w.write_all(&buf)?;
        }
        Ok(())
    }

    pub fn read_from<R: Read>(r: &mut R) -> Result<Self> {
        let mut header = [0u8; LLR_HEADER_BYTES];
        r.read_exact(&mut header)?;
        if &header[..4] != LLR_MAGIC {
            return Err(Error::Parse("not an LLR file (bad magic)".into()));
        }
        let n = u32::from_le_bytes(header[4..8].try_into().unwrap()) as usize;
        let count = u32::from_le_bytes(header[8..12].try_into().unwrap()) as usize;
        let arithmetic = match header[12] {
            0 => Arithmetic::Float32,
            1 => Arithmetic::Fixed16,
            a => return Err(Error::Parse(format!("unknown arithmetic code {a}"))),
        };
        let q_b = header[13];
        let width = match arithmetic {
            Arithmetic::Float32 => 4,
            Arithmetic::Fixed16 => 2,
        };
        let mut blocks = Vec::with_capacity(count.min(1 << 16));
        let mut buf = vec![0u8; n * width];
        for _ in 0..count {
            r.read_exact(&mut buf)?;
            blocks.push(match arithmetic {
                Arithmetic::Float32 => LlrBlock::Float32(
                    buf.chunks_exact(4)
                        .map(|c| f32::from_le_bytes(c.try_into().unwrap()))
                        .collect(),
                ),
                Arithmetic::Fixed16 => LlrBlock::Fixed16(
                    buf.chunks_exact(2)
                        .map(|c| i16::from_le_bytes(c.try_into().unwrap()))
                        .collect(),
                ),
            });
        }
        Ok(Self {
            n,
            arithmetic,
            q_b,
            blocks,
        })
    }
}

fn u32_of(v: usize) -> Result<u32> {
    u32::try_from(v).map_err(|_| Error::InvalidConfig(format!("{v} does not fit the file header")))
}

/// One decoded codeword as stored on disk.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecodeRecord {
    /// N hard bits, one per byte.
    pub hard_bits: Vec<u8>,
    pub iterations: u8,
    pub converged: bool,
}

pub fn write_decode_results<W: Write>(w: &mut W, results: &[DecodeResult]) -> Result<()> {
    for r in results {
        w.write_all(&pack(&r.hard_bits)?)?;
        w.write_all(&[r.iterations.min(255) as u8, r.converged as u8])?;
    }
    Ok(())
}

pub fn read_decode_results<R: Read>(r: &mut R, n: usize) -> Result<Vec<DecodeRecord>> {
    if n % 8 != 0 {
        return Err(Error::SizeMismatch {
            expected: n.next_multiple_of(8),
            actual: n,
        });
    }
    let mut data = Vec::new();
    r.read_to_end(&mut data)?;
    let rec = n / 8 + 2;
    if data.len() % rec != 0 {
        return Err(Error::Parse(format!(
            "decode output of {} bytes is not a whole number of {rec}-byte records",
            data.len()
        )));
    }
    Ok(data
        .chunks_exact(rec)
        .map(|c| DecodeRecord {
            hard_bits: unpack(&c[..n / 8]),
            iterations: c[n / 8],
            converged: c[n / 8 + 1] != 0,
        })
        .collect())
}

/// Splits a bit stream into frames of `bits_per_frame` bit cells.
pub fn read_frames<R: Read>(r: &mut R, bits_per_frame: usize, packed: bool) -> Result<Vec<Vec<u8>>> {
    let mut data = Vec::new();
    r.read_to_end(&mut data)?;
    let bits = if packed {
        if bits_per_frame % 8 != 0 {
            return Err(Error::SizeMismatch {
                expected: bits_per_frame.next_multiple_of(8),
                actual: bits_per_frame,
            });
        }
        unpack(&data)
    } else {
        if let Some(&b) = data.iter().find(|&&b| b > 1) {
            return Err(Error::Parse(format!("bit cell value {b} is not 0 or 1")));
        }
        data
    };
    if bits.len() % bits_per_frame != 0 {
        return Err(Error::SizeMismatch {
            expected: (bits.len() / bits_per_frame + 1) * bits_per_frame,
            actual: bits.len(),
        });
    }
    Ok(bits.chunks_exact(bits_per_frame).map(<[u8]>::to_vec).collect())
}

pub fn write_frames<W: Write>(w: &mut W, frames: &[Vec<u8>], packed: bool) -> Result<()> {
    for f in frames {
        if packed {
            w.write_all(&pack(f)?)?;
        } else {
            w.write_all(f)?;
        }
    }
    Ok(())
}
