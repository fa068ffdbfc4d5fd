//! A code ready for use: model matrix, expanded `H`, encoder plan and decoder graph.

use std::fmt;
use std::sync::Arc;

use crate::codebook::{get_model_matrix, ModelMatrix, Rate, Standard};
use crate::decoder::{Arithmetic, Decoder, DecoderConfig, DecoderFootprint, DecoderGraph};
use crate::encoder::{Encoder, EncoderPlan, EncoderVariant};
use crate::error::{Error, Result};
use crate::sparse::{expand, SparseParityCheck};

/// Immutable per-code data shared by every encoder and decoder instance.
#[derive(Debug, Clone)]
pub struct Codec {
    matrix: ModelMatrix,
    h: Arc<SparseParityCheck>,
    plan: Arc<EncoderPlan>,
    graph: Arc<DecoderGraph>,
}

impl Codec {
    pub fn new(standard: Standard, n: usize, rate: Rate, variant: EncoderVariant) -> Result<Self> {
        Self::from_matrix(get_model_matrix(standard, n, rate)?, variant)
    }

    pub fn from_matrix(matrix: ModelMatrix, variant: EncoderVariant) -> Result<Self> {
        let h = expand(&matrix);
        let graph = DecoderGraph::new(&h)?;
        let plan = EncoderPlan::new(matrix.clone(), variant)?;
        Ok(Self {
            matrix,
            h: Arc::new(h),
            plan: Arc::new(plan),
            graph: Arc::new(graph),
        })
    }

    pub fn matrix(&self) -> &ModelMatrix {
        &self.matrix
    }

    pub fn h(&self) -> &Arc<SparseParityCheck> {
        &self.h
    }

    pub fn plan(&self) -> &Arc<EncoderPlan> {
        &self.plan
    }

    pub fn graph(&self) -> &Arc<DecoderGraph> {
        &self.graph
    }

    pub fn n(&self) -> usize {
        self.matrix.n()
    }

    pub fn k(&self) -> usize {
        self.matrix.k()
    }

    /// `K / N`
    pub fn rate(&self) -> f64 {
        self.k() as f64 / self.n() as f64
    }

    pub fn encoder(&self) -> Encoder {
        Encoder::new(self.plan.clone())
    }

    pub fn decoder(&self, cfg: DecoderConfig) -> Result<Decoder> {
        Decoder::with_graph(self.graph.clone(), cfg)
    }

    /// Buffer sizes of one encoder and one decoder for this code.
    pub fn size_report(&self, arithmetic: Arithmetic) -> Result<SizeReport> {
        let cfg = DecoderConfig {
            arithmetic,
            ..DecoderConfig::default()
        };
        Ok(SizeReport {
            code: self.matrix.code_id().to_string(),
            variant: self.plan.variant(),
            arithmetic,
            encoder_scratch: self.plan.scratch_bytes(),
            decoder: self.decoder(cfg)?.footprint(),
        })
    }
}

/// Preset memory configurations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Profile {
    /// Any code; array encoder, `f32` decoder.
    A,
    /// WiMAX codes with byte-aligned Z; packed encoder, `i16` decoder.
    B,
    /// WiMAX N=576 rate 1/2 only; packed encoder, `i16` decoder.
    C,
}

impl Profile {
    pub fn variant(self) -> EncoderVariant {
        match self {
            Profile::A => EncoderVariant::Array,
            Profile::B | Profile::C => EncoderVariant::Packed,
        }
    }

    pub fn arithmetic(self) -> Arithmetic {
        match self {
            Profile::A => Arithmetic::Float32,
            Profile::B | Profile::C => Arithmetic::Fixed16,
        }
    }

    /// Builds the codec if the profile admits the code.
    pub fn codec(self, standard: Standard, n: usize, rate: Rate) -> Result<Codec> {
        let admitted = match self {
            Profile::A => true,
            Profile::B => standard == Standard::Wimax,
            Profile::C => standard == Standard::Wimax && n == 576 && rate == Rate::R12,
        };
        if !admitted {
            return Err(Error::UnsupportedCode(format!(
                "{standard} N={n} R={} is not available in profile {self:?}",
                rate.label(standard)
            )));
        }
        Codec::new(standard, n, rate, self.variant())
    }
}

impl std::str::FromStr for Profile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "A" => Ok(Profile::A),
            "B" => Ok(Profile::B),
            "C" => Ok(Profile::C),
            _ => Err(Error::Parse(format!("unknown profile '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SizeReport {
    pub code: String,
    pub variant: EncoderVariant,
    pub arithmetic: Arithmetic,
    pub encoder_scratch: usize,
    pub decoder: DecoderFootprint,
}

impl SizeReport {
    /// Decoder working set: state, input LLRs and adjacency.
    pub fn decoder_bytes(&self) -> usize {
        self.decoder.total()
    }
}

impl fmt::Display for SizeReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "code              {}", self.code)?;
        writeln!(f, "encoder           {:?}, {} B scratch", self.variant, self.encoder_scratch)?;
        writeln!(f, "decoder           {}", self.arithmetic)?;
        writeln!(f, "  state           {} B", self.decoder.state)?;
        writeln!(f, "  channel LLRs    {} B", self.decoder.channel_llr)?;
        writeln!(f, "  adjacency       {} B", self.decoder.adjacency)?;
        write!(f, "  total           {} B", self.decoder.total())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn profile_admission() {
        assert!(Profile::C.codec(Standard::Wimax, 576, Rate::R12).is_ok());
        assert!(matches!(
            Profile::C.codec(Standard::Wimax, 672, Rate::R12),
            Err(Error::UnsupportedCode(_))
        ));
        assert!(Profile::B.codec(Standard::Wifi, 648, Rate::R12).is_err());
        // Z=28 is not byte aligned.
        assert!(matches!(
            Profile::B.codec(Standard::Wimax, 672, Rate::R12),
            Err(Error::UnsupportedZ { .. })
        ));
        assert!(Profile::A.codec(Standard::Wifi, 1944, Rate::R56).is_ok());
    }

    #[test]
    fn config_c_sizes() {
        let codec = Profile::C.codec(Standard::Wimax, 576, Rate::R12).unwrap();
        let report = codec.size_report(Profile::C.arithmetic()).unwrap();
        // Posteriors and channel LLRs are N 16-bit cells each.
        assert_eq!(report.decoder.channel_llr, 2 * 576);
        assert!(report.decoder_bytes() <= 2 * 10_080, "{report}");
    }
}
