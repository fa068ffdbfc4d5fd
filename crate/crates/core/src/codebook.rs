//! Model matrices of the IEEE 802.11 and IEEE 802.16 QC-LDPC codes.
//!
//! A model matrix `H_bm` is an `mb × nb` grid of circulant shift values: `-1` is an
//! all-zero `Z × Z` block, `0` the identity and `s > 0` the identity rotated by `s`.
//! The Wi-Fi matrices are stored per codeword length. WiMAX stores a single base
//! matrix per rate at `Z = 96` and derives the other 18 sizes with
//! [`scale_model_matrix`].
//!
//! Matrices are kept as text assets (see [`ModelMatrix::parse`]) and compiled in.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Which standard a code comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Standard {
    Wifi,
    Wimax,
}

impl Standard {
    pub fn as_str(self) -> &'static str {
        match self {
            Standard::Wifi => "wifi",
            Standard::Wimax => "wimax",
        }
    }
}

impl fmt::Display for Standard {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Standard {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "wifi" | "wifi6" | "802.11" | "80211" => Ok(Standard::Wifi),
            "wimax" | "802.16" | "80216" => Ok(Standard::Wimax),
            other => Err(Error::Parse(format!("unknown standard '{other}'"))),
        }
    }
}

/// Code rate. Wi-Fi only has one 2/3 and one 3/4 code; they are addressed as the `A` variants.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Rate {
    R12,
    R23A,
    R23B,
    R34A,
    R34B,
    R56,
}

impl Rate {
    pub const ALL: [Rate; 6] = [
        Rate::R12,
        Rate::R23A,
        Rate::R23B,
        Rate::R34A,
        Rate::R34B,
        Rate::R56,
    ];

    /// Number of systematic block columns out of 24.
    pub fn kb(self) -> usize {
        match self {
            Rate::R12 => 12,
            Rate::R23A | Rate::R23B => 16,
            Rate::R34A | Rate::R34B => 18,
            Rate::R56 => 20,
        }
    }

    pub fn value(self) -> f64 {
        self.kb() as f64 / 24.0
    }

    /// Rate label as used in file headers and on the command line.
    pub fn label(self, standard: Standard) -> &'static str {
        match (standard, self) {
            (_, Rate::R12) => "1/2",
            (Standard::Wifi, Rate::R23A) => "2/3",
            (Standard::Wifi, Rate::R34A) => "3/4",
            (_, Rate::R23A) => "2/3A",
            (_, Rate::R23B) => "2/3B",
            (_, Rate::R34A) => "3/4A",
            (_, Rate::R34B) => "3/4B",
            (_, Rate::R56) => "5/6",
        }
    }
}

impl FromStr for Rate {
    type Err = Error;

    /// Accepts "1/2", "2/3", "2/3A", "2/3B", "3/4", "3/4A", "3/4B", "5/6".
    /// A bare "2/3" or "3/4" selects the A variant.
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "1/2" => Ok(Rate::R12),
            "2/3" | "2/3A" => Ok(Rate::R23A),
            "2/3B" => Ok(Rate::R23B),
            "3/4" | "3/4A" => Ok(Rate::R34A),
            "3/4B" => Ok(Rate::R34B),
            "5/6" => Ok(Rate::R56),
            other => Err(Error::Parse(format!("unknown rate '{other}'"))),
        }
    }
}

/// Wi-Fi codeword lengths and their expansion factors.
pub const WIFI_SIZES: [(usize, usize); 3] = [(648, 27), (1296, 54), (1944, 81)];

/// WiMAX base expansion factor; base matrices are defined at this size.
pub const WIMAX_BASE_Z: usize = 96;

/// All 19 WiMAX subblock sizes, 24 to 96 in steps of 4.
pub fn wimax_z_values() -> impl Iterator<Item = usize> {
    (24..=96).step_by(4)
}

/// Identifies one code: standard, codeword length and rate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CodeId {
    pub standard: Standard,
    pub n: usize,
    pub rate: Rate,
}

impl CodeId {
    pub fn new(standard: Standard, n: usize, rate: Rate) -> Self {
        Self { standard, n, rate }
    }

    /// Every supported code: 3 lengths × 4 rates for Wi-Fi, 19 lengths × 6 rates for WiMAX.
    pub fn all() -> Vec<CodeId> {
        let mut out = Vec::new();
        for (n, _) in WIFI_SIZES {
            for rate in [Rate::R12, Rate::R23A, Rate::R34A, Rate::R56] {
                out.push(CodeId::new(Standard::Wifi, n, rate));
            }
        }
        for z in wimax_z_values() {
            for rate in Rate::ALL {
                out.push(CodeId::new(Standard::Wimax, 24 * z, rate));
            }
        }
        out
    }

    pub fn model_matrix(&self) -> Result<ModelMatrix> {
        get_model_matrix(self.standard, self.n, self.rate)
    }
}

impl fmt::Display for CodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} N={} R={}", self.standard, self.n, self.rate.label(self.standard))
    }
}

/// Compressed parity-check matrix of shift values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelMatrix {
    pub standard: Standard,
    pub rate: Rate,
    pub z: usize,
    pub nb: usize,
    pub kb: usize,
    entries: Vec<i16>,
}

impl ModelMatrix {
    /// Builds a matrix from a row-major entry grid. Checks only dimensions and entry range;
    /// use [`validate_structure`] for the encodability checks.
    pub fn new(
        standard: Standard,
        rate: Rate,
        z: usize,
        nb: usize,
        kb: usize,
        entries: Vec<i16>,
    ) -> Result<Self> {
        if z == 0 || nb == 0 || kb >= nb {
            return Err(Error::Parse(format!("bad dimensions z={z} nb={nb} kb={kb}")));
        }
        let mb = nb - kb;
        if entries.len() != mb * nb {
            return Err(Error::SizeMismatch {
                expected: mb * nb,
                actual: entries.len(),
            });
        }
        if let Some(e) = entries.iter().find(|&&e| e < -1 || e as i64 >= z as i64) {
            return Err(Error::Parse(format!("entry {e} outside [-1, {z})")));
        }
        Ok(Self {
            standard,
            rate,
            z,
            nb,
            kb,
            entries,
        })
    }

    pub fn mb(&self) -> usize {
        self.nb - self.kb
    }

    pub fn n(&self) -> usize {
        self.nb * self.z
    }

    pub fn k(&self) -> usize {
        self.kb * self.z
    }

    pub fn m(&self) -> usize {
        self.mb() * self.z
    }

    /// Entry at block row `i`, block column `j`.
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> i16 {
        self.entries[i * self.nb + j]
    }

    pub fn row(&self, i: usize) -> &[i16] {
        &self.entries[i * self.nb..(i + 1) * self.nb]
    }

    pub fn entries(&self) -> &[i16] {
        &self.entries
    }

    pub fn code_id(&self) -> CodeId {
        CodeId::new(self.standard, self.n(), self.rate)
    }

    /// Parses the text grid format: a header line `standard rate z nb kb` followed by
    /// `mb` lines of `nb` integers. Blank lines and lines starting with `#` are ignored.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty model matrix".into()))?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 5 {
            return Err(Error::Parse(format!("bad header '{header}'")));
        }
        let standard: Standard = fields[0].parse()?;
        let rate: Rate = fields[1].parse()?;
        let num = |s: &str| -> Result<usize> {
            s.parse()
                .map_err(|_| Error::Parse(format!("bad header field '{s}'")))
        };
        let (z, nb, kb) = (num(fields[2])?, num(fields[3])?, num(fields[4])?);
        let mut entries = Vec::new();
        let mut rows = 0;
        for line in lines {
            let before = entries.len();
            for tok in line.split_whitespace() {
                entries.push(
                    tok.parse::<i16>()
                        .map_err(|_| Error::Parse(format!("bad entry '{tok}'")))?,
                );
            }
            if entries.len() - before != nb {
                return Err(Error::Parse(format!(
                    "row {rows} has {} entries, expected {nb}",
                    entries.len() - before
                )));
            }
            rows += 1;
        }
        ModelMatrix::new(standard, rate, z, nb, kb, entries)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// Renders the text grid format accepted by [`ModelMatrix::parse`].
    pub fn to_text(&self) -> String {
        let mut out = format!(
            "{} {} {} {} {}\n",
            self.standard,
            self.rate.label(self.standard),
            self.z,
            self.nb,
            self.kb
        );
        for i in 0..self.mb() {
            let row: Vec<String> = self.row(i).iter().map(|e| e.to_string()).collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
        out
    }
}

impl fmt::Display for ModelMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.mb() {
            for (j, e) in self.row(i).iter().enumerate() {
                if j > 0 {
                    f.write_str(" ")?;
                }
                write!(f, "{e:3}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

macro_rules! asset {
    ($name:literal) => {
        include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/data/", $name))
    };
}

fn wifi_asset(n: usize, rate: Rate) -> Option<&'static str> {
    Some(match (n, rate) {
        (648, Rate::R12) => asset!("wifi_648_1-2.txt"),
        (648, Rate::R23A) => asset!("wifi_648_2-3.txt"),
        (648, Rate::R34A) => asset!("wifi_648_3-4.txt"),
        (648, Rate::R56) => asset!("wifi_648_5-6.txt"),
        (1296, Rate::R12) => asset!("wifi_1296_1-2.txt"),
        (1296, Rate::R23A) => asset!("wifi_1296_2-3.txt"),
        (1296, Rate::R34A) => asset!("wifi_1296_3-4.txt"),
        (1296, Rate::R56) => asset!("wifi_1296_5-6.txt"),
        (1944, Rate::R12) => asset!("wifi_1944_1-2.txt"),
        (1944, Rate::R23A) => asset!("wifi_1944_2-3.txt"),
        (1944, Rate::R34A) => asset!("wifi_1944_3-4.txt"),
        (1944, Rate::R56) => asset!("wifi_1944_5-6.txt"),
        _ => return None,
    })
}

fn wimax_asset(rate: Rate) -> &'static str {
    match rate {
        Rate::R12 => asset!("wimax_1-2.txt"),
        Rate::R23A => asset!("wimax_2-3A.txt"),
        Rate::R23B => asset!("wimax_2-3B.txt"),
        Rate::R34A => asset!("wimax_3-4A.txt"),
        Rate::R34B => asset!("wimax_3-4B.txt"),
        Rate::R56 => asset!("wimax_5-6.txt"),
    }
}

/// Unscaled WiMAX base matrix (`Z = 96`) for a rate.
pub fn wimax_base_matrix(rate: Rate) -> ModelMatrix {
    ModelMatrix::parse(wimax_asset(rate)).expect("embedded WiMAX matrix is well formed")
}

/// Looks up the model matrix of a code, scaled to its expansion factor.
pub fn get_model_matrix(standard: Standard, n_bits: usize, rate: Rate) -> Result<ModelMatrix> {
    let unsupported = || {
        Error::UnsupportedCode(format!(
            "{standard} N={n_bits} R={}",
            rate.label(standard)
        ))
    };
    match standard {
        Standard::Wifi => {
            let text = wifi_asset(n_bits, rate).ok_or_else(unsupported)?;
            Ok(ModelMatrix::parse(text).expect("embedded Wi-Fi matrix is well formed"))
        }
        Standard::Wimax => {
            if n_bits % 24 != 0 || !wimax_z_values().any(|z| z * 24 == n_bits) {
                return Err(unsupported());
            }
            scale_model_matrix(&wimax_base_matrix(rate), n_bits / 24)
        }
    }
}

/// Derives a WiMAX model matrix for `z_target` from its `Z = 96` base matrix.
///
/// Positive shifts become `floor(p · z_target / 96)`, except for rate 2/3A which uses
/// `p mod z_target`. Entries `-1` and `0` are unchanged.
pub fn scale_model_matrix(base: &ModelMatrix, z_target: usize) -> Result<ModelMatrix> {
    if !wimax_z_values().any(|z| z == z_target) {
        return Err(Error::BadZ(z_target));
    }
    if base.standard != Standard::Wimax || base.z != WIMAX_BASE_Z {
        return Err(Error::InvalidConfig(format!(
            "scaling needs a WiMAX base matrix at Z={WIMAX_BASE_Z}, got {} Z={}",
            base.standard, base.z
        )));
    }
    let entries = base
        .entries
        .iter()
        .map(|&p| scale_shift(p, base.rate, z_target))
        .collect();
    ModelMatrix::new(base.standard, base.rate, z_target, base.nb, base.kb, entries)
}

/// Scales one base-matrix shift value.
pub fn scale_shift(p: i16, rate: Rate, z_target: usize) -> i16 {
    if p <= 0 {
        return p;
    }
    let p = p as usize;
    let scaled = match rate {
        Rate::R23A => p % z_target,
        _ => p * z_target / WIMAX_BASE_Z,
    };
    scaled as i16
}

/// Outcome of [`validate_structure`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructureReport {
    /// First and last entries of the `h_b` column are equal and non-negative.
    pub hb_pair_ok: bool,
    /// Row of the single interior non-negative `h_b` entry, if there is exactly one.
    pub hb_y_index: Option<usize>,
    /// The columns right of `h_b` form the double-diagonal of zero shifts.
    pub double_diagonal_ok: bool,
    pub messages: Vec<String>,
}

impl StructureReport {
    pub fn is_ok(&self) -> bool {
        self.hb_pair_ok && self.hb_y_index.is_some() && self.double_diagonal_ok
    }
}

impl fmt::Display for StructureReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_ok() {
            return f.write_str("structure: OK");
        }
        f.write_str("structure: FAILED")?;
        for m in &self.messages {
            write!(f, "\n  - {m}")?;
        }
        Ok(())
    }
}

/// Checks the parity-part structure that direct encoding depends on.
pub fn validate_structure(mb: &ModelMatrix) -> StructureReport {
    let rows = mb.mb();
    let kb = mb.kb;
    let mut messages = Vec::new();

    let hb: Vec<i16> = (0..rows).map(|i| mb.get(i, kb)).collect();
    let hb_pair_ok = rows >= 3 && hb[0] >= 0 && hb[0] == hb[rows - 1];
    if !hb_pair_ok {
        messages.push(format!(
            "h_b end values {} and {} are not an equal non-negative pair",
            hb.first().copied().unwrap_or(-1),
            hb.last().copied().unwrap_or(-1)
        ));
    }
    let interior: Vec<usize> = (1..rows.saturating_sub(1)).filter(|&i| hb[i] >= 0).collect();
    let hb_y_index = match interior.as_slice() {
        [y] => Some(*y),
        [] => {
            messages.push("h_b has no interior non-negative entry".into());
            None
        }
        many => {
            messages.push(format!("h_b has {} interior non-negative entries", many.len()));
            None
        }
    };

    let mut double_diagonal_ok = true;
    for i in 0..rows {
        for j in kb + 1..mb.nb {
            let d = j - (kb + 1);
            let expect_zero = d == i || d + 1 == i;
            let e = mb.get(i, j);
            if expect_zero != (e == 0) || (!expect_zero && e != -1) {
                double_diagonal_ok = false;
                messages.push(format!(
                    "entry ({i},{j}) = {e}, expected {}",
                    if expect_zero { 0 } else { -1 }
                ));
            }
        }
    }

    StructureReport {
        hb_pair_ok,
        hb_y_index,
        double_diagonal_ok,
        messages,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// The parity part of the WiMAX rate 3/4B matrix with a single systematic column.
    pub(crate) fn eq7_example() -> ModelMatrix {
        let text = "wimax 3/4B 96 7 1
            5 0 0 -1 -1 -1 -1
            7 -1 0 0 -1 -1 -1
            9 80 -1 0 0 -1 -1
            11 -1 -1 -1 0 0 -1
            13 -1 -1 -1 -1 0 0
            15 0 -1 -1 -1 -1 0";
        ModelMatrix::parse(text).unwrap()
    }

    #[test]
    fn table_sizes() {
        let m = get_model_matrix(Standard::Wifi, 648, Rate::R12).unwrap();
        assert_eq!((m.z, m.kb, m.k()), (27, 12, 324));
        let m = get_model_matrix(Standard::Wifi, 1944, Rate::R34A).unwrap();
        assert_eq!((m.z, m.k()), (81, 1458));
        let m = get_model_matrix(Standard::Wimax, 2304, Rate::R56).unwrap();
        assert_eq!((m.z, m.k(), m.k() / 8), (96, 1920, 240));
    }

    #[test]
    fn unsupported_codes() {
        assert!(matches!(
            get_model_matrix(Standard::Wifi, 1000, Rate::R12),
            Err(Error::UnsupportedCode(_))
        ));
        assert!(matches!(
            get_model_matrix(Standard::Wifi, 648, Rate::R23B),
            Err(Error::UnsupportedCode(_))
        ));
        assert!(matches!(
            get_model_matrix(Standard::Wimax, 600, Rate::R12),
            Err(Error::UnsupportedCode(_))
        ));
    }

    #[test]
    fn table_two_byte_sizes() {
        // K in bytes for every WiMAX length, rate order 1/2, 2/3, 3/4, 5/6.
        for z in wimax_z_values() {
            let n = 24 * z;
            for (rate, num, den) in [(Rate::R12, 1, 2), (Rate::R23A, 2, 3), (Rate::R34B, 3, 4), (Rate::R56, 5, 6)] {
                let m = get_model_matrix(Standard::Wimax, n, rate).unwrap();
                assert_eq!(m.k(), n * num / den);
                assert_eq!(m.k() % 8, 0);
            }
        }
    }

    #[test]
    fn scaling_rules() {
        assert_eq!(scale_shift(0, Rate::R34A, 24), 0);
        assert_eq!(scale_shift(-1, Rate::R34A, 24), -1);
        assert_eq!(scale_shift(80, Rate::R34A, 24), 20);
        assert_eq!(scale_shift(80, Rate::R23A, 24), 8);
        assert_eq!(scale_shift(95, Rate::R12, 28), 27);
        assert!(matches!(
            scale_model_matrix(&wimax_base_matrix(Rate::R12), 30),
            Err(Error::BadZ(30))
        ));
    }

    #[test]
    fn scaling_to_96_is_identity() {
        for rate in Rate::ALL {
            let base = wimax_base_matrix(rate);
            assert_eq!(scale_model_matrix(&base, 96).unwrap(), base);
        }
    }

    #[test]
    fn example_structure() {
        let report = validate_structure(&eq7_example());
        assert!(report.is_ok(), "{report}");
        assert_eq!(report.hb_y_index, Some(2));
        assert!(report.messages.is_empty());
    }

    #[test]
    fn broken_pair_detected() {
        let mut text = eq7_example().to_text();
        text = text.replacen("5 0 0", "5 1 0", 1);
        let m = ModelMatrix::parse(&text).unwrap();
        let report = validate_structure(&m);
        assert!(!report.hb_pair_ok);
        assert!(!report.is_ok());
        assert!(!report.messages.is_empty());
    }

    #[test]
    fn all_embedded_matrices_valid() {
        for id in CodeId::all() {
            let m = id.model_matrix().unwrap();
            assert_eq!(m.n(), id.n);
            assert_eq!(m.nb, 24);
            assert_eq!(m.kb, id.rate.kb());
            let report = validate_structure(&m);
            assert!(report.is_ok(), "{id}: {report}");
        }
    }

    #[test]
    fn text_round_trip() {
        let m = get_model_matrix(Standard::Wimax, 576, Rate::R23B).unwrap();
        assert_eq!(ModelMatrix::parse(&m.to_text()).unwrap(), m);
    }

    #[test]
    fn parse_rejects_out_of_range() {
        let err = ModelMatrix::parse("wifi 1/2 4 2 1\n4 0\n").unwrap_err();
        assert!(matches!(err, Error::Parse(_)));
        let err = ModelMatrix::parse("wifi 1/2 4 2 1\n0 0 0\n").unwrap_err();
        assert!(matches!(err, Error::Parse(_)));
    }

    #[test]
    fn rate_parsing() {
        assert_eq!("2/3".parse::<Rate>().unwrap(), Rate::R23A);
        assert_eq!("3/4b".parse::<Rate>().unwrap(), Rate::R34B);
        assert!("4/5".parse::<Rate>().is_err());
        assert_eq!(Rate::R23A.label(Standard::Wifi), "2/3");
        assert_eq!(Rate::R23A.label(Standard::Wimax), "2/3A");
    }
}
