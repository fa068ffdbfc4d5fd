//! Quasi-cyclic LDPC codec for the IEEE 802.11 (Wi-Fi 6) and IEEE 802.16 (WiMAX) codes.
//!
//! The crate is organized bottom-up:
//!
//! - [`codebook`]: the standard model matrices, Z-scaling, structure checks and
//!   expansion into a sparse parity-check matrix (plus alist export).
//! - [`shift`] and [`encoder`]: direct systematic encoding from the model matrix,
//!   either one bit per byte or on packed words with word-level cyclic shifts.
//! - [`decoder`]: layered single-scan min-sum decoding in `f32` or wrap-around `i16`.
//! - [`codec`]: a code bundled with its encoder plan and decoder graph.
//! - [`pool`]: order-preserving multi-threaded block decoding.
//! - [`chansim`]: BPSK/AWGN channel, Monte-Carlo waterfall and throughput benchmark.
//! - [`io`]: the binary file formats used by the command-line tool.

pub mod alist;
pub mod bits;
pub mod chansim;
pub mod cli;
pub mod codebook;
pub mod codec;
pub mod decoder;
pub mod encoder;
pub mod error;
pub mod io;
pub mod pool;
pub mod shift;
pub mod sparse;

pub use codebook::{get_model_matrix, CodeId, ModelMatrix, Rate, Standard};
pub use codec::Codec;
pub use decoder::{Arithmetic, DecodeResult, Decoder, DecoderConfig, LlrBlock};
pub use encoder::{Encoder, EncoderPlan, EncoderVariant};
pub use error::{Error, Result};
pub use sparse::SparseParityCheck;
