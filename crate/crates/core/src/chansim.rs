//! BPSK over AWGN, Monte-Carlo waterfall simulation and decoder throughput measurement.
//!
//! Every frame draws its information word and noise from its own ChaCha8 stream,
//! keyed by the seed and the Eb/N0 value and selected by the frame index. Frames are
//! processed in fixed batches and the stopping rule is evaluated between batches, so a
//! table depends only on the seed and the code, never on the number of workers.

use std::fmt;
use std::sync::Arc;
use std::thread;
use std::time::Instant;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::codec::Codec;
use crate::decoder::{Arithmetic, Decoder, DecoderConfig, LlrBlock};
use crate::encoder::Encoder;
use crate::error::{Error, Result};
use crate::pool::{chunk_size, decode_block_with, DecoderPool, PoolStyle};

/// Frames simulated between two evaluations of the stopping rule.
pub const BATCH_FRAMES: u64 = 64;

/// Codewords decoded per worker in one benchmark round.
pub const BENCH_CODEWORDS_PER_WORKER: usize = 10;

/// Bit 0 maps to +1, bit 1 to -1.
pub fn bpsk_modulate(bits: &[u8]) -> Vec<f32> {
    bits.iter().map(|&b| if b == 0 { 1.0 } else { -1.0 }).collect()
}

/// Adds zero-mean Gaussian noise of variance `sigma2`.
pub fn awgn<R: RngCore>(symbols: &[f32], sigma2: f64, rng: &mut R) -> Vec<f32> {
    let sigma = sigma2.max(0.0).sqrt();
    symbols
        .iter()
        .map(|&s| {
            let g: f64 = StandardNormal.sample(rng);
            (s as f64 + sigma * g) as f32
        })
        .collect()
}

/// `2y / σ²`
pub fn llr_from_samples(samples: &[f32], sigma2: f64) -> Result<Vec<f32>> {
    if !(sigma2 > 0.0) {
        return Err(Error::DivByZeroSigma);
    }
    let scale = 2.0 / sigma2;
    Ok(samples.iter().map(|&y| (y as f64 * scale) as f32).collect())
}

/// Noise variance for unit-energy BPSK at code rate `rate`:
/// `1 / (2 · R · 10^(Eb/N0 / 10))`.
pub fn ebn0_to_sigma2(ebn0_db: f64, rate: f64) -> f64 {
    1.0 / (2.0 * rate * 10f64.powf(ebn0_db / 10.0))
}

/// Generator for frame `frame` at one Eb/N0 point.
pub fn frame_rng(seed: u64, ebn0_db: f64, frame: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&ebn0_db.to_bits().to_le_bytes());
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(frame);
    rng
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelConfig {
    pub ebn0_db: f64,
    pub rate: f64,
    pub sigma2: f64,
    pub seed: u64,
}

impl ChannelConfig {
    pub fn new(ebn0_db: f64, rate: f64, seed: u64) -> Result<Self> {
        if !(rate > 0.0 && rate <= 1.0) {
            return Err(Error::InvalidConfig(format!("code rate {rate} outside (0, 1]")));
        }
        let sigma2 = ebn0_to_sigma2(ebn0_db, rate);
        if !(sigma2 > 0.0 && sigma2.is_finite()) {
            return Err(Error::DivByZeroSigma);
        }
        Ok(Self {
            ebn0_db,
            rate,
            sigma2,
            seed,
        })
    }
}

/// One simulated transmission.
#[derive(Debug, Clone, PartialEq)]
pub struct NoisyFrame {
    pub info: Vec<u8>,
    pub codeword: Vec<u8>,
    /// Channel LLRs `2y/σ²`.
    pub llr: Vec<f32>,
}

/// Random information word, encoded, modulated and passed through the channel.
pub fn noisy_frame(encoder: &mut Encoder, channel: &ChannelConfig, frame: u64) -> Result<NoisyFrame> {
    let mut rng = frame_rng(channel.seed, channel.ebn0_db, frame);
    let k = encoder.plan().k();
    let mut info = Vec::with_capacity(k + 63);
    while info.len() < k {
        let word = rng.next_u64();
        info.extend((0..64).map(|b| ((word >> (63 - b)) & 1) as u8));
    }
    info.truncate(k);
    let codeword = encoder.encode_bits(&info)?;
    let samples = awgn(&bpsk_modulate(&codeword), channel.sigma2, &mut rng);
    let llr = llr_from_samples(&samples, channel.sigma2)?;
    Ok(NoisyFrame {
        info,
        codeword,
        llr,
    })
}

/// When to stop simulating one Eb/N0 point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StopRule {
    pub min_errors: u64,
    pub max_frames: u64,
}

impl Default for StopRule {
    fn default() -> Self {
        Self {
            min_errors: 10_000,
            max_frames: 1_000_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaterfallOptions {
    pub stop: StopRule,
    pub seed: u64,
    pub workers: usize,
}

impl Default for WaterfallOptions {
    fn default() -> Self {
        Self {
            stop: StopRule::default(),
            seed: 1,
            workers: 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaterfallPoint {
    pub ebn0_db: f64,
    pub frames: u64,
    /// Information bits decoded, `frames · K`.
    pub bits: u64,
    pub bit_errors: u64,
    pub frame_errors: u64,
    /// Super-iterations summed over all frames.
    pub iterations: u64,
}

impl WaterfallPoint {
    fn empty(ebn0_db: f64) -> Self {
        Self {
            ebn0_db,
            frames: 0,
            bits: 0,
            bit_errors: 0,
            frame_errors: 0,
            iterations: 0,
        }
    }

    pub fn ber(&self) -> f64 {
        ratio(self.bit_errors, self.bits)
    }

    pub fn fer(&self) -> f64 {
        ratio(self.frame_errors, self.frames)
    }

    pub fn avg_iterations(&self) -> f64 {
        ratio(self.iterations, self.frames)
    }
}

fn ratio(a: u64, b: u64) -> f64 {
    if b == 0 {
        0.0
    } else {
        a as f64 / b as f64
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct WaterfallTable {
    pub points: Vec<WaterfallPoint>,
}

pub const WATERFALL_CSV_HEADER: &str = "ebn0_db,frames,bits,bit_errors,frame_errors,ber,fer,avg_iters";

impl WaterfallTable {
    pub fn to_csv(&self) -> String {
        self.to_string()
    }

    /// Eb/N0 at which the BER crosses `target`, by linear interpolation of
    /// `log10(BER)` between the first bracketing pair of points.
    pub fn ebn0_at_ber(&self, target: f64) -> Option<f64> {
        self.points.windows(2).find_map(|w| {
            let (a, b) = (&w[0], &w[1]);
            let (ba, bb) = (a.ber(), b.ber());
            if ba >= target && bb <= target && ba > 0.0 && bb > 0.0 && ba != bb {
                let t = (ba.log10() - target.log10()) / (ba.log10() - bb.log10());
                Some(a.ebn0_db + t * (b.ebn0_db - a.ebn0_db))
            } else {
                None
            }
        })
    }
}

impl fmt::Display for WaterfallTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{WATERFALL_CSV_HEADER}")?;
        for p in &self.points {
            writeln!(
                f,
                "{},{},{},{},{},{},{},{}",
                format_g6(p.ebn0_db),
                p.frames,
                p.bits,
                p.bit_errors,
                p.frame_errors,
                format_g6(p.ber()),
                format_g6(p.fer()),
                format_g6(p.avg_iterations())
            )?;
        }
        Ok(())
    }
}

/// Formats like C's `%g`: six significant digits, trailing zeros removed, exponent
/// notation below 1e-4 and from 1e6 on.
pub fn format_g6(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.5e}");
    let (mant, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..6).contains(&exp) {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", strip_zeros(mant), exp.abs())
    } else {
        strip_zeros(&format!("{:.*}", (5 - exp) as usize, x)).to_string()
    }
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Tally {
    bit_errors: u64,
    frame_error: bool,
    iterations: u32,
}

struct FrameWorker {
    encoder: Encoder,
    decoder: Decoder,
    cfg: DecoderConfig,
}

impl FrameWorker {
    fn new(codec: &Codec, cfg: &DecoderConfig) -> Result<Self> {
        Ok(Self {
            encoder: codec.encoder(),
            decoder: codec.decoder(*cfg)?,
            cfg: *cfg,
        })
    }

    fn run(&mut self, channel: &ChannelConfig, frame: u64) -> Result<Tally> {
        let f = noisy_frame(&mut self.encoder, channel, frame)?;
        let res = self.decoder.decode(&self.cfg.llr_block(f.llr))?;
        let bit_errors = res
            .info_bits()
            .iter()
            .zip(&f.info)
            .filter(|(a, b)| a != b)
            .count() as u64;
        Ok(Tally {
            bit_errors,
            frame_error: bit_errors > 0,
            iterations: res.iterations,
        })
    }

    fn run_range(&mut self, channel: &ChannelConfig, frames: std::ops::Range<u64>) -> Result<Vec<Tally>> {
        frames.map(|i| self.run(channel, i)).collect()
    }
}

fn simulate_batch(
    codec: &Codec,
    cfg: &DecoderConfig,
    channel: &ChannelConfig,
    first: u64,
    count: u64,
    workers: usize,
    local: &mut FrameWorker,
) -> Result<Vec<Tally>> {
    if workers <= 1 || count <= 1 {
        return local.run_range(channel, first..first + count);
    }
    let chunk = chunk_size(count as usize, workers) as u64;
    let parts: Vec<Result<Vec<Tally>>> = thread::scope(|s| {
        let handles: Vec<_> = (first..first + count)
            .step_by(chunk as usize)
            .map(|start| {
                let end = (start + chunk).min(first + count);
                s.spawn(move || FrameWorker::new(codec, cfg)?.run_range(channel, start..end))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("simulation worker panicked"))
            .collect()
    });
    let mut out = Vec::with_capacity(count as usize);
    for p in parts {
        out.extend(p?);
    }
    Ok(out)
}

/// Simulates one point per entry of `snrs` (Eb/N0 in dB).
pub fn run_waterfall(
    codec: &Codec,
    cfg: &DecoderConfig,
    snrs: &[f64],
    opts: &WaterfallOptions,
) -> Result<WaterfallTable> {
    cfg.validate()?;
    if opts.stop.min_errors == 0 {
        return Err(Error::InvalidConfig("min_errors must be at least 1".into()));
    }
    if opts.workers == 0 {
        return Err(Error::InvalidConfig("workers must be at least 1".into()));
    }
    let mut local = FrameWorker::new(codec, cfg)?;
    let k = codec.k() as u64;
    let mut table = WaterfallTable::default();
    for &ebn0 in snrs {
        let channel = ChannelConfig::new(ebn0, codec.rate(), opts.seed)?;
        let mut point = WaterfallPoint::empty(ebn0);
        while point.bit_errors < opts.stop.min_errors && point.frames < opts.stop.max_frames {
            let count = BATCH_FRAMES.min(opts.stop.max_frames - point.frames);
            let tallies = simulate_batch(codec, cfg, &channel, point.frames, count, opts.workers, &mut local)?;
            for t in tallies {
                point.frames += 1;
                point.bits += k;
                point.bit_errors += t.bit_errors;
                point.frame_errors += t.frame_error as u64;
                point.iterations += t.iterations as u64;
            }
        }
        table.points.push(point);
    }
    Ok(table)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BenchOptions {
    /// Operating point of the generated test codewords.
    pub ebn0_db: f64,
    pub workers: usize,
    pub pool: PoolStyle,
    /// Timed repetitions of one block of `workers · 10` codewords.
    pub rounds: usize,
    pub seed: u64,
}

impl Default for BenchOptions {
    fn default() -> Self {
        Self {
            ebn0_db: 2.0,
            workers: 1,
            pool: PoolStyle::Simple,
            rounds: 20,
            seed: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThroughputReport {
    pub code: String,
    pub arithmetic: Arithmetic,
    pub workers: usize,
    pub pool: PoolStyle,
    /// Codewords decoded over all rounds.
    pub codewords: u64,
    /// Information bits decoded over all rounds.
    pub info_bits: u64,
    pub seconds: f64,
    pub mbps: f64,
}

pub const BENCH_CSV_HEADER: &str = "code,arithmetic,workers,pool,codewords,info_bits,seconds,mbps";

impl ThroughputReport {
    pub fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{}",
            self.code,
            self.arithmetic,
            self.workers,
            self.pool,
            self.codewords,
            self.info_bits,
            format_g6(self.seconds),
            format_g6(self.mbps)
        )
    }
}

impl fmt::Display for ThroughputReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: {} decoder, {} worker(s), {} pool: {} codewords, {} info bits in {:.3} s = {:.2} Mbit/s",
            self.code,
            self.arithmetic,
            self.workers,
            self.pool,
            self.codewords,
            self.info_bits,
            self.seconds,
            self.mbps
        )
    }
}

/// Decoder throughput with a fixed 10 super-iterations and no early termination.
pub fn run_throughput_bench(codec: &Codec, cfg: &DecoderConfig, opts: &BenchOptions) -> Result<ThroughputReport> {
    if opts.workers == 0 {
        return Err(Error::InvalidConfig("workers must be at least 1".into()));
    }
    let cfg = DecoderConfig {
        max_iterations: 10,
        early_termination: false,
        ..*cfg
    };
    cfg.validate()?;
    let count = opts.workers * BENCH_CODEWORDS_PER_WORKER;
    let channel = ChannelConfig::new(opts.ebn0_db, codec.rate(), opts.seed)?;
    let mut encoder = codec.encoder();
    let llrs: Vec<LlrBlock> = (0..count as u64)
        .map(|i| Ok(cfg.llr_block(noisy_frame(&mut encoder, &channel, i)?.llr)))
        .collect::<Result<_>>()?;

    let seconds = match opts.pool {
        PoolStyle::Simple => {
            let start = Instant::now();
            for _ in 0..opts.rounds {
                decode_block_with(codec.graph(), &llrs, &cfg, opts.workers)?;
            }
            start.elapsed().as_secs_f64()
        }
        PoolStyle::Persistent => {
            let pool = DecoderPool::new(codec.graph().clone(), cfg, opts.workers)?;
            let llrs = Arc::new(llrs);
            let start = Instant::now();
            for _ in 0..opts.rounds {
                pool.decode(llrs.clone())?;
            }
            start.elapsed().as_secs_f64()
        }
    };
    let codewords = (opts.rounds * count) as u64;
    let info_bits = codewords * codec.k() as u64;
    let mbps = if info_bits == 0 || seconds <= 0.0 {
        0.0
    } else {
        info_bits as f64 / seconds / 1e6
    };
    Ok(ThroughputReport {
        code: codec.matrix().code_id().to_string(),
        arithmetic: cfg.arithmetic,
        workers: opts.workers,
        pool: opts.pool,
        codewords,
        info_bits,
        seconds,
        mbps,
    })
}
