//! Command-line front end.
//!
//! Exit status: 0 success, 1 usage or configuration error, 2 I/O or malformed input,
//! 3 unsupported code.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::alist::export_alist;
use crate::chansim::{
    awgn, bpsk_modulate, frame_rng, llr_from_samples, run_throughput_bench, run_waterfall, BenchOptions,
    ChannelConfig, StopRule, WaterfallOptions, BENCH_CSV_HEADER,
};
use crate::codebook::{validate_structure, Rate, Standard};
use crate::codec::Codec;
use crate::decoder::{Arithmetic, DecoderConfig};
use crate::encoder::EncoderVariant;
use crate::error::{Error, Result};
use crate::io::{read_frames, write_decode_results, write_frames, LlrFile};
use crate::pool::{decode_block_with, default_workers, DecoderPool, PoolStyle};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_IO: i32 = 2;
pub const EXIT_UNSUPPORTED: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "qcldpc", version, about = "QC-LDPC codec for the Wi-Fi and WiMAX LDPC codes")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Encode information words into codewords (or channel LLRs).
    Encode(EncodeArgs),
    /// Decode an LLR file into hard bits plus per-codeword records.
    Decode(DecodeArgs),
    /// Monte-Carlo BER/FER waterfall, written as CSV.
    Simulate(SimulateArgs),
    /// Decoder throughput benchmark.
    Bench(BenchArgs),
    /// Print a model matrix, its structure check and the alist export.
    Matrix(MatrixArgs),
}

#[derive(Debug, Args)]
pub struct CodeArgs {
    /// wifi or wimax
    #[arg(long = "std")]
    pub standard: Standard,
    /// Codeword length in bits.
    #[arg(long)]
    pub n: usize,
    /// 1/2, 2/3A, 2/3B, 3/4A, 3/4B or 5/6.
    #[arg(long)]
    pub rate: Rate,
}

#[derive(Debug, Args)]
pub struct DecoderArgs {
    /// float32 or fixed16
    #[arg(long, default_value = "float32")]
    pub arithmetic: Arithmetic,
    /// Maximum super-iterations.
    #[arg(long, default_value_t = 10)]
    pub iters: u32,
    /// Quantizer magnitude bits for fixed16.
    #[arg(long = "q-b", default_value_t = 10)]
    pub q_b: u32,
}

#[derive(Debug, Args)]
pub struct EncodeArgs {
    #[command(flatten)]
    pub code: CodeArgs,
    /// array or packed
    #[arg(long, default_value = "array")]
    pub variant: EncoderVariant,
    /// Read and write packed bits instead of one byte per bit.
    #[arg(long)]
    pub packed: bool,
    /// Information bits; `-` for stdin.
    #[arg(short, long, default_value = "-")]
    pub input: PathBuf,
    /// `-` for stdout.
    #[arg(short, long, default_value = "-")]
    pub output: PathBuf,
    /// Write channel LLRs (BPSK) instead of codewords.
    #[arg(long)]
    pub llr: bool,
    /// With --llr: add AWGN at this Eb/N0 (dB). Without it the LLRs are noiseless ±2.
    #[arg(long, requires = "llr")]
    pub ebn0: Option<f64>,
    /// With --llr: float32 or fixed16.
    #[arg(long, default_value = "float32")]
    pub arithmetic: Arithmetic,
    #[arg(long = "q-b", default_value_t = 10)]
    pub q_b: u32,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct DecodeArgs {
    #[command(flatten)]
    pub code: CodeArgs,
    /// LLR file; `-` for stdin.
    #[arg(short, long, default_value = "-")]
    pub input: PathBuf,
    /// `-` for stdout.
    #[arg(short, long, default_value = "-")]
    pub output: PathBuf,
    #[arg(long, default_value_t = 10)]
    pub iters: u32,
    /// Always run the full number of iterations.
    #[arg(long)]
    pub no_early_stop: bool,
    #[arg(long, env = "QCLDPC_WORKERS")]
    pub workers: Option<usize>,
    /// simple or persistent
    #[arg(long, default_value = "simple")]
    pub pool: PoolStyle,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub code: CodeArgs,
    #[command(flatten)]
    pub decoder: DecoderArgs,
    /// Eb/N0 grid in dB as start:step:stop, or a comma-separated list.
    #[arg(long)]
    pub snr: String,
    #[arg(long, default_value_t = 10_000)]
    pub min_errors: u64,
    #[arg(long, default_value_t = 1_000_000)]
    pub max_frames: u64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, env = "QCLDPC_WORKERS")]
    pub workers: Option<usize>,
    /// CSV destination; `-` for stdout.
    #[arg(short, long, default_value = "-")]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[command(flatten)]
    pub code: CodeArgs,
    #[arg(long, default_value = "float32")]
    pub arithmetic: Arithmetic,
    #[arg(long = "q-b", default_value_t = 10)]
    pub q_b: u32,
    #[arg(long, env = "QCLDPC_WORKERS")]
    pub workers: Option<usize>,
    #[arg(long, default_value = "simple")]
    pub pool: PoolStyle,
    /// Operating point of the test codewords.
    #[arg(long, default_value_t = 2.0)]
    pub ebn0: f64,
    /// Timed blocks of 10 codewords per worker.
    #[arg(long, default_value_t = 20)]
    pub rounds: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct MatrixArgs {
    #[command(flatten)]
    pub code: CodeArgs,
    /// Skip the alist export.
    #[arg(long)]
    pub no_alist: bool,
    /// Also print encoder and decoder buffer sizes.
    #[arg(long)]
    pub sizes: bool,
}

/// Parses `start:step:stop` (inclusive, tolerant of rounding) or `a,b,c`.
pub fn parse_snr_list(s: &str) -> Result<Vec<f64>> {
    let num = |t: &str| -> Result<f64> {
        t.trim()
            .parse()
            .map_err(|_| Error::InvalidConfig(format!("--snr: bad number '{t}'")))
    };
    let parts: Vec<&str> = s.split(':').collect();
    match parts[..] {
        [start, step, stop] => {
            let (start, step, stop) = (num(start)?, num(step)?, num(stop)?);
            if !(step > 0.0) || stop < start {
                return Err(Error::InvalidConfig("--snr: need step > 0 and stop >= start".into()));
            }
            let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
            // Round to suppress accumulated binary noise such as 1.4000000000000001.
            Ok((0..count)
                .map(|i| ((start + i as f64 * step) * 1e9).round() / 1e9)
                .collect())
        }
        [_] if s.trim().is_empty() => Ok(Vec::new()),
        [list] => list.split(',').map(num).collect(),
        _ => Err(Error::InvalidConfig(format!("--snr: cannot parse '{s}'"))),
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::UnsupportedCode(_) | Error::BadZ(_) | Error::UnsupportedZ { .. } => EXIT_UNSUPPORTED,
        Error::Io(_) | Error::Parse(_) | Error::SizeMismatch { .. } | Error::ArithmeticMismatch => EXIT_IO,
        _ => EXIT_USAGE,
    }
}

fn open_input(path: &Path) -> Result<Box<dyn Read>> {
    if path.as_os_str() == "-" {
        Ok(Box::new(io::stdin().lock()))
    } else {
        Ok(Box::new(BufReader::new(File::open(path)?)))
    }
}

fn open_output<'a>(path: &Path, stdout: &'a mut dyn Write) -> Result<Box<dyn Write + 'a>> {
    if path.as_os_str() == "-" {
        Ok(Box::new(stdout))
    } else {
        Ok(Box::new(BufWriter::new(File::create(path)?)))
    }
}

fn decoder_config(arithmetic: Arithmetic, iters: u32, q_b: u32) -> Result<DecoderConfig> {
    let cfg = DecoderConfig {
        arithmetic,
        max_iterations: iters,
        q_b,
        ..DecoderConfig::default()
    };
    cfg.validate()?;
    Ok(cfg)
}

fn workers(flag: Option<usize>) -> Result<usize> {
    match flag {
        Some(0) => Err(Error::InvalidConfig("--workers must be at least 1".into())),
        Some(w) => Ok(w),
        None => Ok(default_workers()),
    }
}

fn codec(code: &CodeArgs, variant: EncoderVariant) -> Result<Codec> {
    Codec::new(code.standard, code.n, code.rate, variant)
}

fn cmd_encode(a: &EncodeArgs, stdout: &mut dyn Write) -> Result<()> {
    let codec = codec(&a.code, a.variant)?;
    let cfg = decoder_config(a.arithmetic, 10, a.q_b)?;
    let frames = read_frames(&mut open_input(&a.input)?, codec.k(), a.packed)?;
    let mut encoder = codec.encoder();
    let codewords: Vec<Vec<u8>> = frames
        .iter()
        .map(|f| encoder.encode_bits(f))
        .collect::<Result<_>>()?;
    let mut out = open_output(&a.output, stdout)?;
    if a.llr {
        let mut file = LlrFile::new(codec.n(), cfg.arithmetic, match cfg.arithmetic {
            Arithmetic::Float32 => 0,
            Arithmetic::Fixed16 => cfg.q_b as u8,
        });
        for (i, cw) in codewords.iter().enumerate() {
            let symbols = bpsk_modulate(cw);
            let llr = match a.ebn0 {
                Some(ebn0) => {
                    let ch = ChannelConfig::new(ebn0, codec.rate(), a.seed)?;
                    let samples = awgn(&symbols, ch.sigma2, &mut frame_rng(a.seed, ebn0, i as u64));
                    llr_from_samples(&samples, ch.sigma2)?
                }
                None => llr_from_samples(&symbols, 1.0)?,
            };
            file.blocks.push(cfg.llr_block(llr));
        }
        file.write_to(&mut out)?;
    } else {
        write_frames(&mut out, &codewords, a.packed)?;
    }
    out.flush()?;
    Ok(())
}

fn cmd_decode(a: &DecodeArgs, stdout: &mut dyn Write) -> Result<()> {
    let codec = codec(&a.code, EncoderVariant::Array)?;
    let file = LlrFile::read_from(&mut open_input(&a.input)?)?;
    if file.n != codec.n() {
        return Err(Error::SizeMismatch {
            expected: codec.n(),
            actual: file.n,
        });
    }
    let q_b = match file.arithmetic {
        Arithmetic::Fixed16 => file.q_b as u32,
        Arithmetic::Float32 => DecoderConfig::default().q_b,
    };
    let mut cfg = decoder_config(file.arithmetic, a.iters, q_b)?;
    cfg.early_termination = !a.no_early_stop;
    let workers = workers(a.workers)?;
    let results = match a.pool {
        PoolStyle::Simple => decode_block_with(codec.graph(), &file.blocks, &cfg, workers)?,
        PoolStyle::Persistent => {
            DecoderPool::new(codec.graph().clone(), cfg, workers)?.decode(std::sync::Arc::new(file.blocks))?
        }
    };
    let mut out = open_output(&a.output, stdout)?;
    write_decode_results(&mut out, &results)?;
    out.flush()?;
    Ok(())
}

fn cmd_simulate(a: &SimulateArgs, stdout: &mut dyn Write) -> Result<()> {
    let codec = codec(&a.code, EncoderVariant::Array)?;
    let cfg = decoder_config(a.decoder.arithmetic, a.decoder.iters, a.decoder.q_b)?;
    let snrs = parse_snr_list(&a.snr)?;
    if a.min_errors == 0 {
        return Err(Error::InvalidConfig("--min-errors must be at least 1".into()));
    }
    let opts = WaterfallOptions {
        stop: StopRule {
            min_errors: a.min_errors,
            max_frames: a.max_frames,
        },
        seed: a.seed,
        workers: workers(a.workers)?,
    };
    let table = run_waterfall(&codec, &cfg, &snrs, &opts)?;
    let mut out = open_output(&a.output, stdout)?;
    out.write_all(table.to_csv().as_bytes())?;
    out.flush()?;
    Ok(())
}

fn cmd_bench(a: &BenchArgs, stdout: &mut dyn Write) -> Result<()> {
    let codec = codec(&a.code, EncoderVariant::Array)?;
    let cfg = decoder_config(a.arithmetic, 10, a.q_b)?;
    let opts = BenchOptions {
        ebn0_db: a.ebn0,
        workers: workers(a.workers)?,
        pool: a.pool,
        rounds: a.rounds,
        seed: a.seed,
    };
    let report = run_throughput_bench(&codec, &cfg, &opts)?;
    writeln!(stdout, "{BENCH_CSV_HEADER}")?;
    writeln!(stdout, "{}", report.csv_line())?;
    writeln!(stdout, "# {report}")?;
    Ok(())
}

fn cmd_matrix(a: &MatrixArgs, stdout: &mut dyn Write) -> Result<()> {
    let codec = codec(&a.code, EncoderVariant::Array)?;
    let mb = codec.matrix();
    writeln!(
        stdout,
        "# {} N={} K={} Z={} ({}x{})",
        mb.standard,
        mb.n(),
        mb.k(),
        mb.z,
        mb.mb(),
        mb.nb
    )?;
    write!(stdout, "{mb}")?;
    writeln!(stdout, "{}", validate_structure(mb))?;
    if a.sizes {
        for arithmetic in [Arithmetic::Float32, Arithmetic::Fixed16] {
            writeln!(stdout, "{}", codec.size_report(arithmetic)?)?;
        }
        if mb.z % 8 == 0 {
            let packed = Codec::from_matrix(mb.clone(), EncoderVariant::Packed)?;
            writeln!(stdout, "{}", packed.size_report(Arithmetic::Fixed16)?)?;
        }
    }
    if !a.no_alist {
        writeln!(stdout, "# alist")?;
        write!(stdout, "{}", export_alist(codec.h()))?;
    }
    Ok(())
}

/// Runs the tool with explicit output streams and returns the exit status.
pub fn run_with<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if code == EXIT_OK {
                write!(stdout, "{rendered}")
            } else {
                write!(stderr, "{rendered}")
            };
            return code;
        }
    };
    let result = match &cli.command {
        Command::Encode(a) => cmd_encode(a, stdout),
        Command::Decode(a) => cmd_decode(a, stdout),
        Command::Simulate(a) => cmd_simulate(a, stdout),
        Command::Bench(a) => cmd_bench(a, stdout),
        Command::Matrix(a) => cmd_matrix(a, stdout),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(stderr, "qcldpc: {e}");
            exit_code(&e)
        }
    }
}

/// Runs the tool on the process streams.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = io::stdout();
    let mut stdout = stdout.lock();
    let code = run_with(args, &mut stdout, &mut io::stderr());
    let _ = stdout.flush();
    code
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_capture(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run_with(std::iter::once("qcldpc").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8_lossy(&out).into(), String::from_utf8_lossy(&err).into())
    }

    #[test]
    fn snr_grids() {
        assert_eq!(parse_snr_list("1.0:0.2:2.0").unwrap(), vec![1.0, 1.2, 1.4, 1.6, 1.8, 2.0]);
        assert_eq!(parse_snr_list("1,2.5").unwrap(), vec![1.0, 2.5]);
        assert_eq!(parse_snr_list("3:1:3").unwrap(), vec![3.0]);
        assert!(parse_snr_list("").unwrap().is_empty());
        assert!(parse_snr_list("2:0:3").is_err());
        assert!(parse_snr_list("1:x:3").is_err());
    }

    #[test]
    fn matrix_command() {
        let (code, out, _) = run_capture(&["matrix", "--std", "wimax", "--n", "576", "--rate", "1/2", "--no-alist"]);
        assert_eq!(code, 0);
        assert!(out.contains("structure: OK"));
    }

    #[test]
    fn exit_codes() {
        assert_eq!(run_capture(&["matrix", "--std", "wifi", "--n", "1000", "--rate", "1/2"]).0, 3);
        assert_eq!(run_capture(&["matrix", "--std", "dvb", "--n", "648", "--rate", "1/2"]).0, 1);
        assert_eq!(run_capture(&["frobnicate"]).0, 1);
        let (code, _, err) = run_capture(&[
            "decode", "--std", "wifi", "--n", "648", "--rate", "1/2", "-i", "/nonexistent/llr.bin",
        ]);
        assert_eq!(code, 2, "{err}");
        let (code, _, err) = run_capture(&[
            "simulate", "--std", "wifi", "--n", "648", "--rate", "1/2", "--snr", "1:1:2", "--iters", "0",
        ]);
        assert_eq!(code, 1);
        assert!(err.contains("max_iterations"), "{err}");
        assert_eq!(
            run_capture(&["encode", "--std", "wifi", "--n", "648", "--rate", "1/2", "--variant", "packed"]).0,
            3
        );
    }
}
