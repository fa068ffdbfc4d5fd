//! Multi-threaded block decoding.
//!
//! A block of W codewords is split into contiguous chunks of `ceil(W / workers)`
//! codewords. Each worker owns a private [`Decoder`]; results are reassembled in input
//! order, so the output never depends on the worker count.
//!
//! Two pool styles are provided. [`decode_block`] spawns scoped threads on every call.
//! [`DecoderPool`] keeps its threads alive and feeds them through channels.

use std::sync::mpsc::{self, Receiver, Sender};
use std::sync::Arc;
use std::thread::{self, JoinHandle};

use crate::decoder::{DecodeResult, Decoder, DecoderConfig, DecoderGraph, LlrBlock};
use crate::error::{Error, Result};
use crate::sparse::SparseParityCheck;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PoolStyle {
    /// Threads spawned per call.
    Simple,
    /// Long-lived threads signalled per block.
    Persistent,
}

impl std::str::FromStr for PoolStyle {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "simple" | "spawn" => Ok(PoolStyle::Simple),
            "persistent" | "mtx" => Ok(PoolStyle::Persistent),
            other => Err(Error::Parse(format!("unknown pool style '{other}'"))),
        }
    }
}

impl std::fmt::Display for PoolStyle {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            PoolStyle::Simple => "simple",
            PoolStyle::Persistent => "persistent",
        })
    }
}

/// Codewords handed to each worker for a block of `count`.
pub fn chunk_size(count: usize, workers: usize) -> usize {
    count.div_ceil(workers.max(1)).max(1)
}

/// Worker count from the environment variable `QCLDPC_WORKERS`, else the number of
/// available CPUs.
pub fn default_workers() -> usize {
    std::env::var("QCLDPC_WORKERS")
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .filter(|&w: &usize| w >= 1)
        .unwrap_or_else(|| thread::available_parallelism().map_or(1, |n| n.get()))
}

fn check_workers(workers: usize) -> Result<()> {
    if workers == 0 {
        return Err(Error::InvalidConfig("workers must be at least 1".into()));
    }
    Ok(())
}

fn decode_chunk(decoder: &mut Decoder, llrs: &[LlrBlock]) -> Result<Vec<DecodeResult>> {
    llrs.iter().map(|l| decoder.decode(l)).collect()
}

/// Decodes `llrs` on `workers` freshly spawned threads.
pub fn decode_block(
    h: &SparseParityCheck,
    llrs: &[LlrBlock],
    cfg: &DecoderConfig,
    workers: usize,
) -> Result<Vec<DecodeResult>> {
    decode_block_with(&Arc::new(DecoderGraph::new(h)?), llrs, cfg, workers)
}

/// [`decode_block`] on a prebuilt graph.
pub fn decode_block_with(
    graph: &Arc<DecoderGraph>,
    llrs: &[LlrBlock],
    cfg: &DecoderConfig,
    workers: usize,
) -> Result<Vec<DecodeResult>> {
    check_workers(workers)?;
    cfg.validate()?;
    if llrs.is_empty() {
        return Ok(Vec::new());
    }
    let chunk = chunk_size(llrs.len(), workers);
    let parts: Vec<Result<Vec<DecodeResult>>> = thread::scope(|s| {
        let handles: Vec<_> = llrs
            .chunks(chunk)
            .map(|part| {
                s.spawn(move || {
                    let mut decoder = Decoder::with_graph(graph.clone(), *cfg)?;
                    decode_chunk(&mut decoder, part)
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("decoder worker panicked"))
            .collect()
    });
    let mut out = Vec::with_capacity(llrs.len());
    for part in parts {
        out.extend(part?);
    }
    Ok(out)
}

struct Job {
    llrs: Arc<Vec<LlrBlock>>,
    start: usize,
    end: usize,
}

type Reply = (usize, Result<Vec<DecodeResult>>);

/// Persistent worker threads, each with its own decoder, reused across blocks.
pub struct DecoderPool {
    senders: Vec<Sender<Job>>,
    replies: Receiver<Reply>,
    handles: Vec<JoinHandle<()>>,
}

impl DecoderPool {
    pub fn new(graph: Arc<DecoderGraph>, cfg: DecoderConfig, workers: usize) -> Result<Self> {
        check_workers(workers)?;
        cfg.validate()?;
        let (reply_tx, replies) = mpsc::channel::<Reply>();
        let mut senders = Vec::with_capacity(workers);
        let mut handles = Vec::with_capacity(workers);
        for id in 0..workers {
            let (tx, rx) = mpsc::channel::<Job>();
            let mut decoder = Decoder::with_graph(graph.clone(), cfg)?;
            let reply_tx = reply_tx.clone();
            handles.push(thread::spawn(move || {
                for job in rx {
                    let out = decode_chunk(&mut decoder, &job.llrs[job.start..job.end]);
                    if reply_tx.send((id, out)).is_err() {
                        break;
                    }
                }
            }));
            senders.push(tx);
        }
        Ok(Self {
            senders,
            replies,
            handles,
        })
    }

    pub fn workers(&self) -> usize {
        self.senders.len()
    }

    /// Decodes a block; results are in input order.
    pub fn decode(&self, llrs: Arc<Vec<LlrBlock>>) -> Result<Vec<DecodeResult>> {
        if llrs.is_empty() {
            return Ok(Vec::new());
        }
        let chunk = chunk_size(llrs.len(), self.workers());
        let mut jobs = 0;
        for (id, start) in (0..llrs.len()).step_by(chunk).enumerate() {
            let job = Job {
                llrs: llrs.clone(),
                start,
                end: (start + chunk).min(llrs.len()),
            };
            self.senders[id]
                .send(job)
                .expect("decoder worker exited early");
            jobs += 1;
        }
        let mut parts: Vec<Option<Result<Vec<DecodeResult>>>> = (0..jobs).map(|_| None).collect();
        for _ in 0..jobs {
            let (id, out) = self.replies.recv().expect("decoder worker exited early");
            parts[id] = Some(out);
        }
        let mut out = Vec::with_capacity(llrs.len());
        for part in parts {
            out.extend(part.expect("every job replied")?);
        }
        Ok(out)
    }
}

impl Drop for DecoderPool {
    fn drop(&mut self) {
        self.senders.clear();
        for h in self.handles.drain(..) {
            let _ = h.join();
        }
    }
}
