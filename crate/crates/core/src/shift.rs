//! Cyclic shifts of Z-bit blocks.
//!
//! A block is either one bit per byte (the array encoder) or `zw` words of `wb` bits
//! (the packed encoder). Bit `j` of a packed block lives in word `j / wb` at position
//! `j % wb` counted from the most significant bit.
//!
//! [`cyclic_shift_packed`] moves bits towards higher indices: output bit `j` is input
//! bit `(j - s) mod Z`.

use std::fmt::Debug;
use std::ops::{BitOr, BitXor, BitXorAssign, Shl, Shr};

/// Unsigned machine word used as the packed storage unit.
pub trait Word:
    Copy
    + Default
    + Eq
    + Debug
    + Send
    + Sync
    + Shl<u32, Output = Self>
    + Shr<u32, Output = Self>
    + BitOr<Output = Self>
    + BitXor<Output = Self>
    + BitXorAssign
    + 'static
{
    const BITS: usize;
    const BYTES: usize = Self::BITS / 8;

    /// Reads one word from `BYTES` big-endian bytes.
    fn from_be_slice(bytes: &[u8]) -> Self;
    fn write_be_slice(self, out: &mut [u8]);
}

macro_rules! impl_word {
    ($t:ty) => {
        impl Word for $t {
            const BITS: usize = <$t>::BITS as usize;

            #[inline]
            fn from_be_slice(bytes: &[u8]) -> Self {
                <$t>::from_be_bytes(bytes.try_into().expect("word-sized slice"))
            }

            #[inline]
            fn write_be_slice(self, out: &mut [u8]) {
                out.copy_from_slice(&self.to_be_bytes());
            }
        }
    };
}

impl_word!(u8);
impl_word!(u16);
impl_word!(u32);
impl_word!(u64);

/// Rotates the packed block `src` by `s` bits into `dst` in a single pass over the words.
///
/// The shift splits into `sw = s / wb` whole words and `sb = s % wb` residual bits. Each
/// destination word `(i + sw) mod zw` joins the low bits of source word `i - 1` with the
/// high bits of source word `i`. With `sb = 0` this degenerates into a word rotation;
/// that case is handled separately because shifting a word by its full width is undefined.
pub fn cyclic_shift_packed<W: Word>(src: &[W], s: usize, dst: &mut [W]) {
    let zw = src.len();
    debug_assert_eq!(dst.len(), zw);
    debug_assert!(s < zw * W::BITS);
    let sw = s / W::BITS;
    let sb = (s % W::BITS) as u32;
    if sb == 0 {
        for (i, &w) in src.iter().enumerate() {
            dst[(i + sw) % zw] = w;
        }
        return;
    }
    let mut prev = src[zw - 1];
    let mut j = sw;
    for &cur in src {
        let hi = prev << (W::BITS as u32 - sb);
        let lo = cur >> sb;
        dst[j] = hi | lo;
        prev = cur;
        j += 1;
        if j == zw {
            j = 0;
        }
    }
}

/// Inverse rotation: output bit `j` is input bit `(j + s) mod Z`.
pub fn cyclic_shift_inverse_packed<W: Word>(src: &[W], s: usize, dst: &mut [W]) {
    let z = src.len() * W::BITS;
    cyclic_shift_packed(src, (z - s % z) % z, dst);
}

/// XORs the rotation of `src` by `s` bits into `acc` (same direction as
/// [`cyclic_shift_packed`]). `tmp` is scratch of the block length.
pub fn xor_shifted_packed<W: Word>(acc: &mut [W], src: &[W], s: usize, tmp: &mut [W]) {
    cyclic_shift_packed(src, s, tmp);
    for (a, &t) in acc.iter_mut().zip(tmp.iter()) {
        *a ^= t;
    }
}

/// One-bit-per-byte rotation with the same direction as [`cyclic_shift_packed`].
pub fn cyclic_shift_array(src: &[u8], s: usize, dst: &mut [u8]) {
    let z = src.len();
    let s = s % z;
    dst[s..].copy_from_slice(&src[..z - s]);
    dst[..s].copy_from_slice(&src[z - s..]);
}

pub fn cyclic_shift_inverse_array(src: &[u8], s: usize, dst: &mut [u8]) {
    let z = src.len();
    cyclic_shift_array(src, (z - s % z) % z, dst);
}

/// `acc[j] ^= src[(j + s) mod Z]`, i.e. adds the circulant `P_s · src` used by the
/// standard's model matrices, without a temporary block.
pub fn xor_circulant_array(acc: &mut [u8], src: &[u8], s: usize) {
    let z = src.len();
    let s = s % z;
    for (a, &b) in acc[..z - s].iter_mut().zip(&src[s..]) {
        *a ^= b;
    }
    for (a, &b) in acc[z - s..].iter_mut().zip(&src[..s]) {
        *a ^= b;
    }
}

/// Loads `zw` words from big-endian bytes.
pub fn words_from_bytes<W: Word>(bytes: &[u8]) -> Vec<W> {
    bytes.chunks_exact(W::BYTES).map(W::from_be_slice).collect()
}

pub fn words_to_bytes<W: Word>(words: &[W], out: &mut [u8]) {
    for (w, chunk) in words.iter().zip(out.chunks_exact_mut(W::BYTES)) {
        w.write_be_slice(chunk);
    }
}
