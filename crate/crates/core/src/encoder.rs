//! Direct systematic encoding from the model matrix, without a generator matrix.
//!
//! With the information word split into `kb` blocks `u_j` of `Z` bits and the parity
//! into `mb` blocks `v_i`:
//!
//! ```text
//! S_i     = Σ_j P(H[i][j]) u_j                       (skipping -1 entries)
//! v_0     = P⁻¹(H[y][kb]) Σ_i S_i
//! v_1     = P(H[0][kb]) v_0 + S_0
//! v_{i+1} = v_i + P(H[i][kb]) v_0 + S_i              for 1 ≤ i < mb - 1
//! ```
//!
//! where `P(e)` is the circulant of the expanded matrix (`(P(e)·x)[r] = x[(r + e) mod Z]`)
//! and all additions are XOR. The `S_i` are computed once and kept for the recursion.
//!
//! Two storage variants exist. [`EncoderVariant::Array`] keeps one bit per byte and works
//! for every code. [`EncoderVariant::Packed`] works on MSB-first packed words and needs
//! `Z` to be a multiple of the word size, which excludes the Wi-Fi codes.

use std::sync::Arc;

use crate::bits;
use crate::codebook::{validate_structure, ModelMatrix};
use crate::error::{Error, Result};
use crate::shift::{self, Word};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EncoderVariant {
    /// One bit per byte.
    Array,
    /// Packed bitmap, MSB first.
    Packed,
}

impl std::str::FromStr for EncoderVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "array" | "universal" => Ok(EncoderVariant::Array),
            "packed" | "bitmap" => Ok(EncoderVariant::Packed),
            other => Err(Error::Parse(format!("unknown encoder variant '{other}'"))),
        }
    }
}

/// Returns `(y, H[y][kb])`: the row and value of the single interior non-negative
/// entry of the `h_b` column.
pub fn find_y(mb: &ModelMatrix) -> Result<(usize, usize)> {
    let rows = mb.mb();
    if rows < 3 {
        return Err(Error::MalformedHb(format!("{rows} block rows, need at least 3")));
    }
    let interior: Vec<usize> = (1..rows - 1).filter(|&i| mb.get(i, mb.kb) >= 0).collect();
    match interior.as_slice() {
        [y] => Ok((*y, mb.get(*y, mb.kb) as usize)),
        [] => Err(Error::MalformedHb("no interior non-negative entry".into())),
        many => Err(Error::MalformedHb(format!(
            "{} interior non-negative entries (rows {many:?})",
            many.len()
        ))),
    }
}

/// Widest word among 64, 32, 16 and 8 bits that divides `z`.
pub fn default_word_bits(z: usize) -> Option<usize> {
    [64, 32, 16, 8].into_iter().find(|wb| z % wb == 0)
}

/// Everything the encoder needs that does not change between codewords.
#[derive(Debug, Clone)]
pub struct EncoderPlan {
    matrix: ModelMatrix,
    y: usize,
    hb_shift: usize,
    variant: EncoderVariant,
    word_bits: usize,
}

impl EncoderPlan {
    pub fn new(matrix: ModelMatrix, variant: EncoderVariant) -> Result<Self> {
        let word_bits = match variant {
            EncoderVariant::Array => 1,
            EncoderVariant::Packed => default_word_bits(matrix.z).ok_or(Error::UnsupportedZ {
                z: matrix.z,
                word_bits: 8,
            })?,
        };
        Self::build(matrix, variant, word_bits)
    }

    /// Packed plan with an explicit word size (8, 16, 32 or 64 bits).
    pub fn packed_with_word_bits(matrix: ModelMatrix, word_bits: usize) -> Result<Self> {
        if ![8, 16, 32, 64].contains(&word_bits) {
            return Err(Error::InvalidConfig(format!("word size {word_bits} not supported")));
        }
        if matrix.z % word_bits != 0 {
            return Err(Error::UnsupportedZ {
                z: matrix.z,
                word_bits,
            });
        }
        Self::build(matrix, EncoderVariant::Packed, word_bits)
    }

    fn build(matrix: ModelMatrix, variant: EncoderVariant, word_bits: usize) -> Result<Self> {
        let report = validate_structure(&matrix);
        if !report.double_diagonal_ok || !report.hb_pair_ok {
            return Err(Error::MalformedHb(report.messages.join("; ")));
        }
        let (y, hb_shift) = find_y(&matrix)?;
        Ok(Self {
            matrix,
            y,
            hb_shift,
            variant,
            word_bits,
        })
    }

    pub fn matrix(&self) -> &ModelMatrix {
        &self.matrix
    }

    pub fn y(&self) -> usize {
        self.y
    }

    pub fn hb_shift(&self) -> usize {
        self.hb_shift
    }

    pub fn variant(&self) -> EncoderVariant {
        self.variant
    }

    /// Packed word size in bits (1 for the array variant).
    pub fn word_bits(&self) -> usize {
        self.word_bits
    }

    pub fn n(&self) -> usize {
        self.matrix.n()
    }

    pub fn k(&self) -> usize {
        self.matrix.k()
    }

    /// Bytes of scratch held by an [`Encoder`] for this plan.
    pub fn scratch_bytes(&self) -> usize {
        let z = self.matrix.z;
        let blocks = self.matrix.mb() + 2;
        match self.variant {
            EncoderVariant::Array => blocks * z,
            EncoderVariant::Packed => blocks * z / 8,
        }
    }
}

/// Array-variant encoding into `out` (length N, one bit per byte).
/// `sums` must hold `mb·Z` cells and `acc` `Z` cells.
fn encode_array_with(plan: &EncoderPlan, info: &[u8], out: &mut [u8], sums: &mut [u8], acc: &mut [u8]) {
    let mb = &plan.matrix;
    let (z, kb, rows) = (mb.z, mb.kb, mb.mb());
    let k = kb * z;

    out[..k].copy_from_slice(info);
    sums.fill(0);
    for i in 0..rows {
        let s_i = &mut sums[i * z..(i + 1) * z];
        for j in 0..kb {
            let e = mb.get(i, j);
            if e >= 0 {
                shift::xor_circulant_array(s_i, &info[j * z..(j + 1) * z], e as usize);
            }
        }
    }

    acc.fill(0);
    for s_i in sums.chunks_exact(z) {
        for (a, &b) in acc.iter_mut().zip(s_i) {
            *a ^= b;
        }
    }
    let (_, parity) = out.split_at_mut(k);
    let (v0, rest) = parity.split_at_mut(z);
    shift::cyclic_shift_array(acc, plan.hb_shift, v0);

    // v_{i+1} lives in rest[i*z..]
    for i in 0..rows - 1 {
        let (done, todo) = rest.split_at_mut(i * z);
        let next = &mut todo[..z];
        next.copy_from_slice(&sums[i * z..(i + 1) * z]);
        if i > 0 {
            let prev = &done[(i - 1) * z..];
            for (a, &b) in next.iter_mut().zip(prev) {
                *a ^= b;
            }
        }
        let e = mb.get(i, kb);
        if e >= 0 {
            shift::xor_circulant_array(next, v0, e as usize);
        }
    }
}

struct PackedScratch<W> {
    info: Vec<W>,
    sums: Vec<W>,
    parity: Vec<W>,
    acc: Vec<W>,
    tmp: Vec<W>,
}

impl<W: Word> PackedScratch<W> {
    fn new(plan: &EncoderPlan) -> Self {
        let mb = &plan.matrix;
        let zw = mb.z / W::BITS;
        Self {
            info: vec![W::default(); mb.kb * zw],
            sums: vec![W::default(); mb.mb() * zw],
            parity: vec![W::default(); mb.mb() * zw],
            acc: vec![W::default(); zw],
            tmp: vec![W::default(); zw],
        }
    }
}

fn xor_into<W: Word>(acc: &mut [W], src: &[W]) {
    for (a, &b) in acc.iter_mut().zip(src) {
        *a ^= b;
    }
}

/// Packed encoding of `info` (K/8 bytes) into `out` (N/8 bytes).
fn encode_packed_with<W: Word>(plan: &EncoderPlan, info: &[u8], out: &mut [u8], s: &mut PackedScratch<W>) {
    let mb = &plan.matrix;
    let (z, kb, rows) = (mb.z, mb.kb, mb.mb());
    let zw = z / W::BITS;
    let k_bytes = kb * z / 8;

    for (w, chunk) in s.info.iter_mut().zip(info.chunks_exact(W::BYTES)) {
        *w = W::from_be_slice(chunk);
    }
    // P(e)·x is a rotation towards lower bit indices, i.e. a packed shift by Z - e.
    let circulant = |e: i16| (z - e as usize) % z;

    s.sums.fill(W::default());
    for i in 0..rows {
        let s_i = &mut s.sums[i * zw..(i + 1) * zw];
        for j in 0..kb {
            let e = mb.get(i, j);
            if e >= 0 {
                shift::xor_shifted_packed(s_i, &s.info[j * zw..(j + 1) * zw], circulant(e), &mut s.tmp);
            }
        }
    }

    s.acc.fill(W::default());
    for s_i in s.sums.chunks_exact(zw) {
        xor_into(&mut s.acc, s_i);
    }
    let (v0, rest) = s.parity.split_at_mut(zw);
    shift::cyclic_shift_packed(&s.acc, plan.hb_shift, v0);

    for i in 0..rows - 1 {
        let (done, todo) = rest.split_at_mut(i * zw);
        let next = &mut todo[..zw];
        next.copy_from_slice(&s.sums[i * zw..(i + 1) * zw]);
        if i > 0 {
            xor_into(next, &done[(i - 1) * zw..]);
        }
        let e = mb.get(i, kb);
        if e >= 0 {
            shift::xor_shifted_packed(next, v0, circulant(e), &mut s.tmp);
        }
    }

    out[..k_bytes].copy_from_slice(&info[..k_bytes]);
    shift::words_to_bytes(&s.parity, &mut out[k_bytes..]);
}

enum Scratch {
    Array { sums: Vec<u8>, acc: Vec<u8> },
    P8(PackedScratch<u8>),
    P16(PackedScratch<u16>),
    P32(PackedScratch<u32>),
    P64(PackedScratch<u64>),
}

/// An encoder instance: a shared plan plus private scratch buffers.
///
/// Plans are immutable and can be shared between threads; each thread should own
/// its own `Encoder`.
pub struct Encoder {
    plan: Arc<EncoderPlan>,
    scratch: Scratch,
}

impl Encoder {
    pub fn new(plan: Arc<EncoderPlan>) -> Self {
        let scratch = match (plan.variant, plan.word_bits) {
            (EncoderVariant::Array, _) => Scratch::Array {
                sums: vec![0; plan.matrix.m()],
                acc: vec![0; plan.matrix.z],
            },
            (EncoderVariant::Packed, 8) => Scratch::P8(PackedScratch::new(&plan)),
            (EncoderVariant::Packed, 16) => Scratch::P16(PackedScratch::new(&plan)),
            (EncoderVariant::Packed, 32) => Scratch::P32(PackedScratch::new(&plan)),
            (EncoderVariant::Packed, _) => Scratch::P64(PackedScratch::new(&plan)),
        };
        Self { plan, scratch }
    }

    pub fn plan(&self) -> &Arc<EncoderPlan> {
        &self.plan
    }

    /// Encodes one word in the plan's native representation: K bit cells in, N bit cells
    /// out for the array variant; K/8 packed bytes in, N/8 packed bytes out for the packed
    /// variant.
    pub fn encode_into(&mut self, info: &[u8], out: &mut [u8]) -> Result<()> {
        let plan = &*self.plan;
        let (k, n) = match plan.variant {
            EncoderVariant::Array => (plan.k(), plan.n()),
            EncoderVariant::Packed => (plan.k() / 8, plan.n() / 8),
        };
        if info.len() != k {
            return Err(Error::SizeMismatch {
                expected: k,
                actual: info.len(),
            });
        }
        if out.len() != n {
            return Err(Error::SizeMismatch {
                expected: n,
                actual: out.len(),
            });
        }
        match &mut self.scratch {
            Scratch::Array { sums, acc } => encode_array_with(plan, info, out, sums, acc),
            Scratch::P8(s) => encode_packed_with(plan, info, out, s),
            Scratch::P16(s) => encode_packed_with(plan, info, out, s),
            Scratch::P32(s) => encode_packed_with(plan, info, out, s),
            Scratch::P64(s) => encode_packed_with(plan, info, out, s),
        }
        Ok(())
    }

    pub fn encode(&mut self, info: &[u8]) -> Result<Vec<u8>> {
        let n = match self.plan.variant {
            EncoderVariant::Array => self.plan.n(),
            EncoderVariant::Packed => self.plan.n() / 8,
        };
        let mut out = vec![0u8; n];
        self.encode_into(info, &mut out)?;
        Ok(out)
    }

    /// Encodes K bit cells into N bit cells whatever the variant.
    pub fn encode_bits(&mut self, info_bits: &[u8]) -> Result<Vec<u8>> {
        match self.plan.variant {
            EncoderVariant::Array => self.encode(info_bits),
            EncoderVariant::Packed => {
                if info_bits.len() != self.plan.k() {
                    return Err(Error::SizeMismatch {
                        expected: self.plan.k(),
                        actual: info_bits.len(),
                    });
                }
                let packed = self.encode(&bits::pack(info_bits)?)?;
                Ok(bits::unpack(&packed))
            }
        }
    }
}

/// One-shot array encoding of K bit cells.
pub fn encode_array(plan: &EncoderPlan, info: &[u8]) -> Result<Vec<u8>> {
    if plan.variant != EncoderVariant::Array {
        return Err(Error::InvalidConfig("plan is not an array plan".into()));
    }
    Encoder::new(Arc::new(plan.clone())).encode(info)
}

/// One-shot packed encoding of K/8 bytes.
pub fn encode_packed(plan: &EncoderPlan, info: &[u8]) -> Result<Vec<u8>> {
    if plan.variant != EncoderVariant::Packed {
        return Err(Error::InvalidConfig("plan is not a packed plan".into()));
    }
    Encoder::new(Arc::new(plan.clone())).encode(info)
}
