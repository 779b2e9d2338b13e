use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

const WORD_BITS: usize = 64;

/// A finite sequence of Bernoulli outcomes, packed 64 trials per word.
///
/// Storage is 0-based (`get(0)` is the first trial). The switch-run
/// operations in [`crate::switches`] take 1-based window starts so that
/// `m = 1` addresses the first trial.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct BitSequence {
    words: Vec<u64>,
    len: usize,
}

impl BitSequence {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(bits: usize) -> Self {
        Self {
            words: Vec::with_capacity(bits.div_ceil(WORD_BITS)),
            len: 0,
        }
    }

    /// The `len` low bits of `word`, least significant bit first.
    pub fn from_word(word: u64, len: usize) -> Self {
        assert!(len <= WORD_BITS, "a single word holds at most 64 trials");
        let mask = if len == WORD_BITS {
            u64::MAX
        } else {
            (1u64 << len) - 1
        };
        let words = if len == 0 {
            Vec::new()
        } else {
            vec![word & mask]
        };
        Self { words, len }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn push(&mut self, bit: bool) {
        let offset = self.len % WORD_BITS;
        if offset == 0 {
            self.words.push(0);
        }
        if bit {
            *self.words.last_mut().unwrap() |= 1u64 << offset;
        }
        self.len += 1;
    }

    /// Outcome of the trial at 0-based `index`.
    pub fn get(&self, index: usize) -> Option<bool> {
        (index < self.len).then(|| self.words[index / WORD_BITS] >> (index % WORD_BITS) & 1 == 1)
    }

    pub fn iter(&self) -> Bits<'_> {
        Bits {
            seq: self,
            front: 0,
            back: self.len,
        }
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Trials `X_m, ..., X_{m+n-1}` as a new sequence (1-based `m`).
    pub fn window(&self, m: usize, n: usize) -> Result<BitSequence> {
        check_window(m, n, self.len)?;
        Ok(self.iter().skip(m - 1).take(n).collect())
    }

    pub fn reversed(&self) -> BitSequence {
        self.iter().rev().collect()
    }
}

pub(crate) fn check_window(m: usize, n: usize, len: usize) -> Result<()> {
    if m >= 1 && n >= 1 && m - 1 + n <= len {
        Ok(())
    } else {
        Err(Error::Range { m, n, len })
    }
}

impl FromIterator<bool> for BitSequence {
    fn from_iter<I: IntoIterator<Item = bool>>(iter: I) -> Self {
        let iter = iter.into_iter();
        let mut seq = Self::with_capacity(iter.size_hint().0);
        for bit in iter {
            seq.push(bit);
        }
        seq
    }
}

impl Extend<bool> for BitSequence {
    fn extend<I: IntoIterator<Item = bool>>(&mut self, iter: I) {
        for bit in iter {
            self.push(bit);
        }
    }
}

impl FromStr for BitSequence {
    type Err = Error;

    /// Parses a string of ASCII '0' and '1'; anything else is rejected.
    fn from_str(s: &str) -> Result<Self> {
        let mut seq = Self::with_capacity(s.len());
        for (position, found) in s.chars().enumerate() {
            match found {
                '0' => seq.push(false),
                '1' => seq.push(true),
                _ => return Err(Error::InvalidBit { position, found }),
            }
        }
        Ok(seq)
    }
}

impl fmt::Display for BitSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = self.iter().map(|b| if b { '1' } else { '0' }).collect();
        f.write_str(&s)
    }
}

impl fmt::Debug for BitSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.len <= 128 {
            write!(f, "BitSequence({self})")
        } else {
            write!(f, "BitSequence(len={})", self.len)
        }
    }
}

#[derive(Clone)]
pub struct Bits<'a> {
    seq: &'a BitSequence,
    front: usize,
    back: usize,
}

impl Iterator for Bits<'_> {
    type Item = bool;

    fn next(&mut self) -> Option<bool> {
        if self.front == self.back {
            return None;
        }
        let bit = self.seq.get(self.front);
        self.front += 1;
        bit
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.back - self.front;
        (n, Some(n))
    }
}

impl DoubleEndedIterator for Bits<'_> {
    fn next_back(&mut self) -> Option<bool> {
        if self.front == self.back {
            return None;
        }
        self.back -= 1;
        self.seq.get(self.back)
    }
}

impl ExactSizeIterator for Bits<'_> {}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display() {
        let s = "11001011101";
        let seq: BitSequence = s.parse().unwrap();
        assert_eq!(seq.len(), 11);
        assert_eq!(seq.count_ones(), 7);
        assert_eq!(seq.to_string(), s);
    }

    #[test]
    fn parse_rejects_foreign_characters() {
        let err = "0102".parse::<BitSequence>().unwrap_err();
        assert_eq!(
            err,
            Error::InvalidBit {
                position: 3,
                found: '2'
            }
        );
        assert!(" 01".parse::<BitSequence>().is_err());
    }

    #[test]
    fn empty_sequence() {
        let seq: BitSequence = "".parse().unwrap();
        assert!(seq.is_empty());
        assert_eq!(seq.get(0), None);
        assert_eq!(seq.iter().count(), 0);
    }

    #[test]
    fn crosses_word_boundaries() {
        let bits: Vec<bool> = (0..200).map(|i| (i * 7) % 3 == 0).collect();
        let seq: BitSequence = bits.iter().copied().collect();
        assert_eq!(seq.len(), 200);
        assert_eq!(seq.iter().collect::<Vec<_>>(), bits);
        assert_eq!(
            seq.reversed().iter().collect::<Vec<_>>(),
            bits.iter().rev().copied().collect::<Vec<_>>()
        );
    }

    #[test]
    fn from_word_is_lsb_first() {
        assert_eq!(BitSequence::from_word(0b0110, 4).to_string(), "0110");
        assert_eq!(BitSequence::from_word(0b1011, 3).to_string(), "110");
        assert_eq!(BitSequence::from_word(u64::MAX, 64).count_ones(), 64);
    }

    #[test]
    fn window_is_one_based() {
        let seq: BitSequence = "11001011101".parse().unwrap();
        assert_eq!(seq.window(4, 4).unwrap().to_string(), "0101");
        assert_eq!(seq.window(1, 11).unwrap(), seq);
        assert_eq!(
            seq.window(0, 1),
            Err(Error::Range {
                m: 0,
                n: 1,
                len: 11
            })
        );
        assert_eq!(
            seq.window(9, 4),
            Err(Error::Range {
                m: 9,
                n: 4,
                len: 11
            })
        );
        assert_eq!(
            seq.window(1, 0),
            Err(Error::Range {
                m: 1,
                n: 0,
                len: 11
            })
        );
    }
}
