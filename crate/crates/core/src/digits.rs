//! Base-q expansions and the digit statistics built on them.
//!
//! All sequences are stored least-significant digit first. The integer 0 has
//! the empty expansion, so its length is 0.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DigitsError {
    #[error("base must be at least 2, got {0}")]
    InvalidBase(u32),
    #[error("digit {digit} out of range for base {base}")]
    DigitOutOfRange { digit: u32, base: u32 },
    #[error("most significant digit must be nonzero")]
    LeadingZero,
    #[error("block must contain at least one nonzero digit")]
    ZeroBlock,
    #[error("block must not be empty")]
    EmptyBlock,
    #[error("cannot parse block {0:?}")]
    Parse(String),
}

pub(crate) fn check_base(q: u32) -> Result<(), DigitsError> {
    if q < 2 {
        Err(DigitsError::InvalidBase(q))
    } else {
        Ok(())
    }
}

/// A base-q expansion, least-significant digit first, without leading zeros.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DigitString {
    base: u32,
    digits: Vec<u32>,
}

impl DigitString {
    pub fn new(base: u32, digits: Vec<u32>) -> Result<Self, DigitsError> {
        check_base(base)?;
        if let Some(&digit) = digits.iter().find(|&&d| d >= base) {
            return Err(DigitsError::DigitOutOfRange { digit, base });
        }
        if digits.last() == Some(&0) {
            return Err(DigitsError::LeadingZero);
        }
        Ok(DigitString { base, digits })
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    /// Digits, least significant first.
    pub fn digits(&self) -> &[u32] {
        &self.digits
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    pub fn value(&self) -> BigUint {
        let q = BigUint::from(self.base);
        self.digits
            .iter()
            .rev()
            .fold(BigUint::zero(), |acc, &d| acc * &q + d)
    }

    /// Digits, most significant first.
    pub fn msb_first(&self) -> impl Iterator<Item = u32> + '_ {
        self.digits.iter().rev().copied()
    }
}

impl fmt::Display for DigitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.digits.is_empty() {
            return write!(f, "ε");
        }
        let sep = if self.base > 10 { "," } else { "" };
        let parts: Vec<String> = self.msb_first().map(|d| d.to_string()).collect();
        write!(f, "{}", parts.join(sep))
    }
}

/// Standard base-q expansion of `n`.
///
/// # Panics
/// Panics if `q < 2`.
pub fn to_digits(n: &BigUint, q: u32) -> DigitString {
    check_base(q).expect("invalid base");
    DigitString {
        base: q,
        digits: raw_digits(n, q),
    }
}

pub(crate) fn raw_digits(n: &BigUint, q: u32) -> Vec<u32> {
    if n.is_zero() {
        return Vec::new();
    }
    if q <= 256 {
        return n.to_radix_le(q).into_iter().map(u32::from).collect();
    }
    let qb = BigUint::from(q);
    let mut out = Vec::new();
    let mut m = n.clone();
    while !m.is_zero() {
        let (quot, rem) = m.div_rem(&qb);
        out.push(rem.to_u32().unwrap());
        m = quot;
    }
    out
}

/// Length of the base-q expansion; 0 for n = 0.
pub fn expansion_len(n: &BigUint, q: u32) -> usize {
    if q == 2 {
        n.bits() as usize
    } else {
        raw_digits(n, q).len()
    }
}

pub(crate) fn bits_le(n: &BigUint) -> Vec<bool> {
    (0..n.bits()).map(|i| n.bit(i)).collect()
}

/// A digit block `ε₁ε₂⋯ε_ℓ`, stored most-significant first, that is not all
/// zeros.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Block {
    base: u32,
    digits: Vec<u32>,
}

impl Block {
    pub fn new(base: u32, digits_msb_first: Vec<u32>) -> Result<Self, DigitsError> {
        check_base(base)?;
        if digits_msb_first.is_empty() {
            return Err(DigitsError::EmptyBlock);
        }
        if let Some(&digit) = digits_msb_first.iter().find(|&&d| d >= base) {
            return Err(DigitsError::DigitOutOfRange { digit, base });
        }
        if digits_msb_first.iter().all(|&d| d == 0) {
            return Err(DigitsError::ZeroBlock);
        }
        Ok(Block {
            base,
            digits: digits_msb_first,
        })
    }

    /// Parses `"0101"` (single-character digits, bases up to 36) or a comma
    /// separated list such as `"0,11,3"`.
    pub fn parse(s: &str, base: u32) -> Result<Self, DigitsError> {
        let bad = || DigitsError::Parse(s.to_string());
        let digits: Vec<u32> = if s.contains(',') {
            s.split(',')
                .map(|t| t.trim().parse::<u32>().map_err(|_| bad()))
                .collect::<Result<_, _>>()?
        } else {
            s.chars()
                .map(|c| c.to_digit(36).ok_or_else(bad))
                .collect::<Result<_, _>>()?
        };
        Block::new(base, digits)
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn digits_msb_first(&self) -> &[u32] {
        &self.digits
    }
}

impl fmt::Display for Block {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sep = if self.base > 10 { "," } else { "" };
        let parts: Vec<String> = self.digits.iter().map(|d| d.to_string()).collect();
        write!(f, "{}", parts.join(sep))
    }
}

/// Number of (overlapping) occurrences of `block` in the base-q expansion of
/// `n`, the expansion being padded with zeros on both sides.
pub fn block_count(n: &BigUint, block: &Block) -> usize {
    let pad = block.len() - 1;
    let mut padded = vec![0u32; pad];
    padded.extend(raw_digits(n, block.base).into_iter().rev());
    padded.extend(std::iter::repeat_n(0, pad));
    padded
        .windows(block.len())
        .filter(|w| *w == block.digits_msb_first())
        .count()
}

/// A binary expansion with digits in {-1, 0, 1}, least-significant first.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct SignedDigitString {
    pub digits: Vec<i8>,
}

impl SignedDigitString {
    pub fn value(&self) -> BigInt {
        self.digits
            .iter()
            .rev()
            .fold(BigInt::zero(), |acc, &d| acc * 2 + d)
    }

    pub fn weight(&self) -> usize {
        self.digits.iter().filter(|&&d| d != 0).count()
    }

    pub fn is_nonadjacent(&self) -> bool {
        self.digits.windows(2).all(|w| w[0] == 0 || w[1] == 0)
    }
}

impl fmt::Display for SignedDigitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.digits.is_empty() {
            return write!(f, "ε");
        }
        for &d in self.digits.iter().rev() {
            match d {
                -1 => write!(f, "ī")?,
                d => write!(f, "{d}")?,
            }
        }
        Ok(())
    }
}

/// Walks the nonadjacent form of `n` from the least significant digit,
/// handing each digit to `emit`.
fn naf_digits(n: &BigUint, mut emit: impl FnMut(i8)) {
    let len = n.bits();
    let mut carry = 0u8;
    let mut i = 0u64;
    while i < len || carry != 0 {
        let value = n.bit(i) as u8 + carry;
        if value == 1 {
            if n.bit(i + 1) {
                emit(-1);
                carry = 1;
            } else {
                emit(1);
                carry = 0;
            }
        } else {
            emit(0);
            carry = value / 2;
        }
        i += 1;
    }
}

/// The nonadjacent form of `n`.
pub fn naf(n: &BigUint) -> SignedDigitString {
    let mut digits = Vec::with_capacity(n.bits() as usize + 1);
    naf_digits(n, |d| digits.push(d));
    SignedDigitString { digits }
}

/// Hamming weight of the nonadjacent form, counted while the form is built.
pub fn h_naf(n: &BigUint) -> u64 {
    let mut weight = 0;
    naf_digits(n, |d| weight += (d != 0) as u64);
    weight
}

/// Hamming weight of the nonadjacent form via
/// `h(2n) = h(n)`, `h(4n+1) = h(n) + 1`, `h(4n-1) = h(n) + 1`, `h(0) = 0`.
pub fn h_naf_recursive(n: &BigUint) -> u64 {
    let mut m = n.clone();
    let mut weight = 0;
    while !m.is_zero() {
        if !m.bit(0) {
            m >>= 1u32;
        } else if !m.bit(1) {
            weight += 1;
            m >>= 2u32;
        } else {
            weight += 1;
            m += 1u32;
            m >>= 2u32;
        }
    }
    weight
}

/// Number of maximal runs of identical digits in the binary expansion (the
/// number of ones in the Gray code); 0 for n = 0.
pub fn gray_runs(n: &BigUint) -> u64 {
    let bits = bits_le(n);
    if bits.is_empty() {
        return 0;
    }
    1 + bits.windows(2).filter(|w| w[0] != w[1]).count() as u64
}

/// `gray_runs(n)`, plus one for odd `n`: the number of blocks `01` and `10` in
/// the zero-padded binary expansion.
pub fn adjusted_gray(n: &BigUint) -> u64 {
    gray_runs(n) + n.bit(0) as u64
}

/// Multiset of lengths of maximal runs of ones in a binary expansion, kept in
/// nondecreasing order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct RunLengthMultiset(Vec<u32>);

impl RunLengthMultiset {
    pub fn from_lengths(mut lengths: Vec<u32>) -> Self {
        lengths.sort_unstable();
        RunLengthMultiset(lengths)
    }

    pub fn lengths(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total(&self) -> u64 {
        self.0.iter().map(|&l| l as u64).sum()
    }

    pub fn multiplicity(&self, length: u32) -> usize {
        self.0.iter().filter(|&&l| l == length).count()
    }
}

pub fn run_lengths(n: &BigUint) -> RunLengthMultiset {
    let mut lengths = Vec::new();
    let mut current = 0u32;
    for bit in bits_le(n) {
        if bit {
            current += 1;
        } else if current > 0 {
            lengths.push(current);
            current = 0;
        }
    }
    if current > 0 {
        lengths.push(current);
    }
    RunLengthMultiset::from_lengths(lengths)
}
