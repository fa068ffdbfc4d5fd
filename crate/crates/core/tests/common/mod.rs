//! Independent oracles shared by the integration tests.

#![allow(dead_code)]

use qcldpc::SparseParityCheck;
use rand::{Rng, RngCore};

pub fn random_bits<R: RngCore>(rng: &mut R, n: usize) -> Vec<u8> {
    (0..n).map(|_| rng.random::<bool>() as u8).collect()
}

/// Bit `j` of the result is bit `(j - s) mod Z` of the input.
pub fn naive_rotate(bits: &[u8], s: usize) -> Vec<u8> {
    let z = bits.len();
    (0..z).map(|j| bits[(j + z - s % z) % z]).collect()
}

/// Scalar operations for the reference decoder, written separately from the library.
pub trait RefNum: Copy + PartialOrd + std::fmt::Debug {
    const ZERO: Self;
    fn plus(self, o: Self) -> Self;
    fn minus(self, o: Self) -> Self;
    fn mag(self) -> Self;
    fn neg(self) -> Self;
    fn below_zero(self) -> bool;
    fn above_zero(self) -> bool;
}

impl RefNum for f32 {
    const ZERO: Self = 0.0;
    fn plus(self, o: Self) -> Self {
        self + o
    }
    fn minus(self, o: Self) -> Self {
        self - o
    }
    fn mag(self) -> Self {
        self.abs()
    }
    fn neg(self) -> Self {
        -self
    }
    fn below_zero(self) -> bool {
        self < 0.0
    }
    fn above_zero(self) -> bool {
        self > 0.0
    }
}

/// 16-bit two's complement: sums wrap, magnitudes of -32768 clamp to 32767.
impl RefNum for i16 {
    const ZERO: Self = 0;
    fn plus(self, o: Self) -> Self {
        ((self as i32 + o as i32) as u16) as i16
    }
    fn minus(self, o: Self) -> Self {
        ((self as i32 - o as i32) as u16) as i16
    }
    fn mag(self) -> Self {
        (self as i32).abs().min(i16::MAX as i32) as i16
    }
    fn neg(self) -> Self {
        ((-(self as i32)) as u16) as i16
    }
    fn below_zero(self) -> bool {
        self < 0
    }
    fn above_zero(self) -> bool {
        self > 0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RefResult<T> {
    pub hard: Vec<u8>,
    pub iterations: u32,
    pub converged: bool,
    pub posterior: Vec<T>,
}

/// Layered min-sum that stores every check-to-variable message `L_mn` and
/// recomputes each one by brute force over the other edges of its row.
pub fn reference_decode<T: RefNum>(
    h: &SparseParityCheck,
    llr: &[T],
    max_iterations: u32,
    early_termination: bool,
) -> RefResult<T> {
    let z = h.z();
    let mut msgs: Vec<Vec<T>> = (0..h.m()).map(|m| vec![T::ZERO; h.row_degree(m)]).collect();
    let mut post = llr.to_vec();
    let mut hard = vec![0u8; h.n()];
    let mut iterations = 0;
    for _ in 0..max_iterations {
        for tier in 0..h.tiers() {
            for m in tier * z..(tier + 1) * z {
                let cols = h.row(m);
                let inputs: Vec<T> = cols
                    .iter()
                    .zip(&msgs[m])
                    .map(|(&c, &l)| post[c as usize].minus(l))
                    .collect();
                for e in 0..cols.len() {
                    let mut smallest: Option<T> = None;
                    let mut negative = false;
                    for (f, &v) in inputs.iter().enumerate() {
                        if f == e {
                            continue;
                        }
                        let a = v.mag();
                        smallest = Some(match smallest {
                            Some(s) if s <= a => s,
                            _ => a,
                        });
                        negative ^= v.below_zero();
                    }
                    let s = smallest.unwrap_or(T::ZERO);
                    msgs[m][e] = if negative { s.neg() } else { s };
                }
                for (e, &c) in cols.iter().enumerate() {
                    post[c as usize] = inputs[e].plus(msgs[m][e]);
                }
            }
        }
        iterations += 1;
        for (b, v) in hard.iter_mut().zip(&post) {
            *b = (!v.above_zero()) as u8;
        }
        if early_termination && h.syndrome_ok(&hard) {
            break;
        }
    }
    let converged = h.syndrome_ok(&hard);
    RefResult {
        hard,
        iterations,
        converged,
        posterior: post,
    }
}
