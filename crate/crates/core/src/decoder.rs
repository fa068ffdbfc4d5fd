//! Layered single-scan min-sum decoding.
//!
//! Each check row keeps only a compressed message record: the two smallest input
//! magnitudes, the edge of the smallest, the input sign of every edge (one bit each)
//! and the parity of those signs. The message on edge `e` is rebuilt on demand as
//! `min2` if `e` is the arg-min and `min1` otherwise, with the sign product of the
//! other edges.
//!
//! Rows are processed in tiers of `Z` (one block row of the model matrix). Within a
//! tier no two rows share a column, and posteriors are updated as soon as a row is
//! done, so the next tier reads fresh values. One pass over all tiers is a
//! super-iteration; the syndrome is tested after each one.
//!
//! Arithmetic is either `f32` or `i16` with two's-complement wrap-around on additions
//! and subtractions. Quantized inputs use `q_b` magnitude bits, leaving the upper
//! bits of the 16-bit cell as headroom.

use std::fmt::Debug;
use std::mem::size_of;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::sparse::SparseParityCheck;

/// Scalar type carried through the decoder.
pub trait Metric: Copy + Default + PartialOrd + Debug + Send + Sync + 'static {
    const ZERO: Self;
    /// Larger than any magnitude the decoder can produce.
    const MAX: Self;

    fn add(self, other: Self) -> Self;
    fn sub(self, other: Self) -> Self;
    /// Non-negative magnitude.
    fn magnitude(self) -> Self;
    fn negate(self) -> Self;
    /// `-self` if `neg`, else `self`, without branching.
    fn negate_if(self, neg: bool) -> Self;
    fn min(self, other: Self) -> Self;
    fn max(self, other: Self) -> Self;
    fn is_negative(self) -> bool;
    fn is_positive(self) -> bool;
}

impl Metric for f32 {
    const ZERO: Self = 0.0;
    const MAX: Self = f32::INFINITY;

    #[inline(always)]
    fn add(self, other: Self) -> Self {
        self + other
    }
    #[inline(always)]
    fn sub(self, other: Self) -> Self {
        self - other
    }
    #[inline(always)]
    fn magnitude(self) -> Self {
        self.abs()
    }
    #[inline(always)]
    fn negate(self) -> Self {
        -self
    }
    #[inline(always)]
    fn negate_if(self, neg: bool) -> Self {
        f32::from_bits(self.to_bits() ^ ((neg as u32) << 31))
    }
    #[inline(always)]
    fn min(self, other: Self) -> Self {
        f32::min(self, other)
    }
    #[inline(always)]
    fn max(self, other: Self) -> Self {
        f32::max(self, other)
    }
    #[inline(always)]
    fn is_negative(self) -> bool {
        self < 0.0
    }
    #[inline(always)]
    fn is_positive(self) -> bool {
        self > 0.0
    }
}

impl Metric for i16 {
    const ZERO: Self = 0;
    const MAX: Self = i16::MAX;

    #[inline(always)]
    fn add(self, other: Self) -> Self {
        self.wrapping_add(other)
    }
    #[inline(always)]
    fn sub(self, other: Self) -> Self {
        self.wrapping_sub(other)
    }
    // -32768 can only appear after a wrap; its magnitude is clamped to 32767.
    #[inline(always)]
    fn magnitude(self) -> Self {
        self.saturating_abs()
    }
    #[inline(always)]
    fn negate(self) -> Self {
        self.wrapping_neg()
    }
    #[inline(always)]
    fn negate_if(self, neg: bool) -> Self {
        if neg {
            self.wrapping_neg()
        } else {
            self
        }
    }
    #[inline(always)]
    fn min(self, other: Self) -> Self {
        Ord::min(self, other)
    }
    #[inline(always)]
    fn max(self, other: Self) -> Self {
        Ord::max(self, other)
    }
    #[inline(always)]
    fn is_negative(self) -> bool {
        self < 0
    }
    #[inline(always)]
    fn is_positive(self) -> bool {
        self > 0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Arithmetic {
    Float32,
    Fixed16,
}

impl std::str::FromStr for Arithmetic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "float" | "float32" | "f32" => Ok(Arithmetic::Float32),
            "fixed" | "fixed16" | "i16" => Ok(Arithmetic::Fixed16),
            other => Err(Error::Parse(format!("unknown arithmetic '{other}'"))),
        }
    }
}

impl std::fmt::Display for Arithmetic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Arithmetic::Float32 => "float32",
            Arithmetic::Fixed16 => "fixed16",
        })
    }
}

/// Channel LLRs of one codeword, `Z_n⁽⁰⁾`, positive meaning bit 0.
#[derive(Debug, Clone, PartialEq)]
pub enum LlrBlock {
    Float32(Vec<f32>),
    Fixed16(Vec<i16>),
}

impl LlrBlock {
    pub fn len(&self) -> usize {
        match self {
            LlrBlock::Float32(v) => v.len(),
            LlrBlock::Fixed16(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn arithmetic(&self) -> Arithmetic {
        match self {
            LlrBlock::Float32(_) => Arithmetic::Float32,
            LlrBlock::Fixed16(_) => Arithmetic::Fixed16,
        }
    }
}

/// Default LLR magnitude mapped to the top of the quantizer range.
pub const DEFAULT_LLR_CLIP: f32 = 24.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecoderConfig {
    /// Upper bound on super-iterations, 1..=255.
    pub max_iterations: u32,
    pub arithmetic: Arithmetic,
    /// Quantizer magnitude bits for `Fixed16`, 1..=14.
    pub q_b: u32,
    /// Stop as soon as the hard decision satisfies every check.
    pub early_termination: bool,
    /// LLR magnitude that maps to `2^q_b - 1`.
    pub llr_clip: f32,
}

impl Default for DecoderConfig {
    fn default() -> Self {
        Self {
            max_iterations: 10,
            arithmetic: Arithmetic::Float32,
            q_b: 10,
            early_termination: true,
            llr_clip: DEFAULT_LLR_CLIP,
        }
    }
}

impl DecoderConfig {
    pub fn fixed() -> Self {
        Self {
            arithmetic: Arithmetic::Fixed16,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=255).contains(&self.max_iterations) {
            return Err(Error::InvalidConfig(format!(
                "max_iterations {} outside 1..=255",
                self.max_iterations
            )));
        }
        if self.arithmetic == Arithmetic::Fixed16 && !(1..=14).contains(&self.q_b) {
            return Err(Error::InvalidConfig(format!("q_b {} outside 1..=14", self.q_b)));
        }
        if !(self.llr_clip > 0.0 && self.llr_clip.is_finite()) {
            return Err(Error::InvalidConfig("llr_clip must be positive".into()));
        }
        Ok(())
    }

    /// Quantizes real LLRs with this configuration's `q_b` and clip level.
    pub fn quantize(&self, values: &[f32]) -> Vec<i16> {
        quantize_llr(values, self.q_b, self.llr_clip)
    }

    /// Converts real LLRs into the block type this configuration decodes.
    pub fn llr_block(&self, values: Vec<f32>) -> LlrBlock {
        match self.arithmetic {
            Arithmetic::Float32 => LlrBlock::Float32(values),
            Arithmetic::Fixed16 => LlrBlock::Fixed16(self.quantize(&values)),
        }
    }
}

/// Maps real LLRs linearly to `q_b`-bit integers: `round(v · (2^q_b - 1) / clip)`,
/// clamped to `±(2^q_b - 1)`.
pub fn quantize_llr(values: &[f32], q_b: u32, clip: f32) -> Vec<i16> {
    let top = ((1i32 << q_b) - 1) as f32;
    let scale = top / clip;
    values
        .iter()
        .map(|&v| (v * scale).round().clamp(-top, top) as i16)
        .collect()
}

/// Row adjacency in the compact form the decoder walks: 16-bit column indices and
/// row offsets, with rows grouped into tiers of `z`.
#[derive(Debug, Clone)]
pub struct DecoderGraph {
    n: usize,
    k: usize,
    z: usize,
    row_ptr: Vec<u32>,
    cols: Vec<u16>,
    max_row_degree: usize,
}

/// Check rows may not exceed this degree (one sign bit per edge in a `u32`).
pub const MAX_ROW_DEGREE: usize = 32;

impl DecoderGraph {
    pub fn new(h: &SparseParityCheck) -> Result<Self> {
        if h.n() > u16::MAX as usize + 1 {
            return Err(Error::InvalidConfig(format!("N={} too large", h.n())));
        }
        if h.max_row_degree() > MAX_ROW_DEGREE {
            return Err(Error::InvalidConfig(format!(
                "check degree {} exceeds {MAX_ROW_DEGREE}",
                h.max_row_degree()
            )));
        }
        let row_ptr = h.row_ptr().iter().map(|&p| p as u32).collect();
        let cols = (0..h.m())
            .flat_map(|m| h.row(m).iter().map(|&c| c as u16))
            .collect();
        Ok(Self {
            n: h.n(),
            k: h.k(),
            z: h.z(),
            row_ptr,
            cols,
            max_row_degree: h.max_row_degree(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn m(&self) -> usize {
        self.row_ptr.len() - 1
    }

    pub fn z(&self) -> usize {
        self.z
    }

    pub fn tiers(&self) -> usize {
        self.m() / self.z
    }

    pub fn max_row_degree(&self) -> usize {
        self.max_row_degree
    }

    #[inline]
    pub fn row(&self, m: usize) -> &[u16] {
        &self.cols[self.row_ptr[m] as usize..self.row_ptr[m + 1] as usize]
    }

    /// Bytes used by the adjacency arrays.
    pub fn bytes(&self) -> usize {
        self.cols.len() * size_of::<u16>() + self.row_ptr.len() * size_of::<u32>()
    }

    /// True iff every check is satisfied by the sign pattern of `posterior`
    /// (`Z_n > 0` decides bit 0).
    pub fn syndrome_ok_posterior<T: Metric>(&self, posterior: &[T]) -> bool {
        (0..self.m()).all(|m| {
            self.row(m)
                .iter()
                .fold(false, |acc, &c| acc ^ !posterior[c as usize].is_positive())
                == false
        })
    }
}

/// Compressed check-to-variable messages of one row.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CheckNode<T> {
    pub min1: T,
    pub min2: T,
    /// Edge index (position within the row) of `min1`.
    pub argmin: u8,
    /// Parity of the negative inputs.
    pub negative_product: bool,
    /// Bit `e` set when the input on edge `e` was negative.
    pub signs: u32,
}

impl<T: Metric> CheckNode<T> {
    /// Message `L_mn` on edge `e`.
    #[inline(always)]
    pub fn message(&self, e: usize) -> T {
        let mag = if e == self.argmin as usize {
            self.min2
        } else {
            self.min1
        };
        mag.negate_if(self.negative_product ^ ((self.signs >> e) & 1 != 0))
    }
}

/// Working state of one decoder: posteriors plus one [`CheckNode`] per row.
#[derive(Debug, Clone)]
pub struct DecoderState<T> {
    posterior: Vec<T>,
    checks: Vec<CheckNode<T>>,
    row_inputs: Vec<T>,
}

impl<T: Metric> DecoderState<T> {
    pub fn new(graph: &DecoderGraph) -> Self {
        Self {
            posterior: vec![T::ZERO; graph.n()],
            checks: vec![CheckNode::default(); graph.m()],
            row_inputs: vec![T::ZERO; graph.max_row_degree().max(1)],
        }
    }

    /// Clears every stored message and loads the channel LLRs as posteriors.
    pub fn init(&mut self, llr: &[T]) {
        self.posterior.copy_from_slice(llr);
        self.checks.fill(CheckNode {
            min1: T::ZERO,
            min2: T::ZERO,
            argmin: 0,
            negative_product: false,
            signs: 0,
        });
    }

    pub fn posterior(&self) -> &[T] {
        &self.posterior
    }

    pub fn check(&self, m: usize) -> &CheckNode<T> {
        &self.checks[m]
    }

    /// Stored message `L_mn` for edge `e` of row `m`.
    pub fn message(&self, m: usize, e: usize) -> T {
        self.checks[m].message(e)
    }

    /// Hard decision: 0 iff the posterior is strictly positive.
    pub fn hard_decision(&self, out: &mut [u8]) {
        for (o, z) in out.iter_mut().zip(&self.posterior) {
            *o = !z.is_positive() as u8;
        }
    }

    /// Bytes of posteriors, check records and row scratch.
    pub fn bytes(&self) -> usize {
        self.posterior.len() * size_of::<T>()
            + self.checks.len() * size_of::<CheckNode<T>>()
            + self.row_inputs.len() * size_of::<T>()
    }
}

/// One check row: recompute its compressed record from `Z_n - L_mn(old)` and
/// write the new posteriors back.
#[inline]
fn update_row<T: Metric>(cols: &[u16], node: &mut CheckNode<T>, posterior: &mut [T], inputs: &mut [T]) {
    let mut min1 = T::MAX;
    let mut min2 = T::MAX;
    let mut argmin = 0u8;
    let mut signs = 0u32;
    let mut negative_product = false;
    for (e, &c) in cols.iter().enumerate() {
        let zmn = posterior[c as usize].sub(node.message(e));
        inputs[e] = zmn;
        if zmn.is_negative() {
            signs |= 1 << e;
            negative_product = !negative_product;
        }
        let mag = zmn.magnitude();
        // On a tie the earlier edge keeps argmin.
        if mag < min1 {
            min2 = min1;
            min1 = mag;
            argmin = e as u8;
        } else if mag < min2 {
            min2 = mag;
        }
    }
    *node = CheckNode {
        min1,
        min2,
        argmin,
        negative_product,
        signs,
    };
    for (e, (&c, &zmn)) in cols.iter().zip(inputs.iter()).enumerate() {
        posterior[c as usize] = zmn.add(node.message(e));
    }
}

/// Updates every check row of tier `t` (rows `t·Z .. (t+1)·Z`) and their posteriors.
pub fn tier_update<T: Metric>(state: &mut DecoderState<T>, graph: &DecoderGraph, t: usize) {
    let z = graph.z();
    let DecoderState {
        posterior,
        checks,
        row_inputs,
    } = state;
    for m in t * z..(t + 1) * z {
        update_row(graph.row(m), &mut checks[m], posterior, row_inputs);
    }
}

/// Result of decoding one codeword.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecodeResult {
    /// Hard decision for all N bits, one bit per byte.
    pub hard_bits: Vec<u8>,
    pub k: usize,
    /// Super-iterations executed.
    pub iterations: u32,
    /// The hard decision satisfies every check.
    pub converged: bool,
}

impl DecodeResult {
    pub fn info_bits(&self) -> &[u8] {
        &self.hard_bits[..self.k]
    }
}

fn run<T: Metric>(state: &mut DecoderState<T>, graph: &DecoderGraph, llr: &[T], cfg: &DecoderConfig) -> DecodeResult {
    state.init(llr);
    let mut iterations = 0;
    let mut converged = false;
    for _ in 0..cfg.max_iterations {
        for t in 0..graph.tiers() {
            tier_update(state, graph, t);
        }
        iterations += 1;
        if cfg.early_termination {
            converged = graph.syndrome_ok_posterior(&state.posterior);
            if converged {
                break;
            }
        }
    }
    if !cfg.early_termination {
        converged = graph.syndrome_ok_posterior(&state.posterior);
    }
    let mut hard_bits = vec![0u8; graph.n()];
    state.hard_decision(&mut hard_bits);
    DecodeResult {
        hard_bits,
        k: graph.k(),
        iterations,
        converged,
    }
}

#[derive(Debug, Clone)]
enum StateKind {
    Float(DecoderState<f32>),
    Fixed(DecoderState<i16>),
}

/// A reusable decoder bound to one code and configuration. Owns its state; use one
/// per thread.
#[derive(Debug, Clone)]
pub struct Decoder {
    graph: Arc<DecoderGraph>,
    cfg: DecoderConfig,
    state: StateKind,
}

impl Decoder {
    pub fn new(h: &SparseParityCheck, cfg: DecoderConfig) -> Result<Self> {
        Self::with_graph(Arc::new(DecoderGraph::new(h)?), cfg)
    }

    pub fn with_graph(graph: Arc<DecoderGraph>, cfg: DecoderConfig) -> Result<Self> {
        cfg.validate()?;
        let state = match cfg.arithmetic {
            Arithmetic::Float32 => StateKind::Float(DecoderState::new(&graph)),
            Arithmetic::Fixed16 => StateKind::Fixed(DecoderState::new(&graph)),
        };
        Ok(Self { graph, cfg, state })
    }

    pub fn config(&self) -> &DecoderConfig {
        &self.cfg
    }

    pub fn graph(&self) -> &Arc<DecoderGraph> {
        &self.graph
    }

    pub fn decode(&mut self, llr: &LlrBlock) -> Result<DecodeResult> {
        if llr.len() != self.graph.n() {
            return Err(Error::SizeMismatch {
                expected: self.graph.n(),
                actual: llr.len(),
            });
        }
        match (&mut self.state, llr) {
            (StateKind::Float(s), LlrBlock::Float32(v)) => Ok(run(s, &self.graph, v, &self.cfg)),
            (StateKind::Fixed(s), LlrBlock::Fixed16(v)) => Ok(run(s, &self.graph, v, &self.cfg)),
            _ => Err(Error::ArithmeticMismatch),
        }
    }

    /// Memory used while decoding.
    pub fn footprint(&self) -> DecoderFootprint {
        let (state, channel) = match &self.state {
            StateKind::Float(s) => (s.bytes(), self.graph.n() * size_of::<f32>()),
            StateKind::Fixed(s) => (s.bytes(), self.graph.n() * size_of::<i16>()),
        };
        DecoderFootprint {
            state,
            channel_llr: channel,
            adjacency: self.graph.bytes(),
        }
    }
}

/// Decoder working-set breakdown in bytes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DecoderFootprint {
    /// Posteriors, compressed check records and the row scratch.
    pub state: usize,
    /// The input LLR block.
    pub channel_llr: usize,
    /// Row adjacency of `H`.
    pub adjacency: usize,
}

impl DecoderFootprint {
    pub fn total(&self) -> usize {
        self.state + self.channel_llr + self.adjacency
    }
}

/// One-shot decode.
pub fn decode(h: &SparseParityCheck, llr: &LlrBlock, cfg: &DecoderConfig) -> Result<DecodeResult> {
    if llr.arithmetic() != cfg.arithmetic {
        return Err(Error::ArithmeticMismatch);
    }
    Decoder::new(h, *cfg)?.decode(llr)
}

/// True iff every row parity of `hard_bits` is zero.
pub fn syndrome_check(h: &SparseParityCheck, hard_bits: &[u8]) -> Result<bool> {
    if hard_bits.len() != h.n() {
        return Err(Error::SizeMismatch {
            expected: h.n(),
            actual: hard_bits.len(),
        });
    }
    Ok(h.syndrome_ok(hard_bits))
}
