//! Dense bit-set events over a finite outcome space.
//!
//! An `Event` records, for each outcome index `0..len`, whether the outcome
//! belongs to the set. The ambient size is part of the value: combining
//! events from different spaces is a bug and panics. Serialized form is a
//! hex string (`0x…`) where bit `i` of the pattern is outcome `i`.

use serde::{Serialize, Serializer};
use std::fmt;

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Event {
    len: usize,
    words: Vec<u64>,
}

fn word_count(len: usize) -> usize {
    len.div_ceil(64)
}

impl Event {
    pub fn empty(len: usize) -> Self {
        Event { len, words: vec![0; word_count(len)] }
    }

    pub fn full(len: usize) -> Self {
        let mut e = Event { len, words: vec![!0u64; word_count(len)] };
        e.mask_tail();
        e
    }

    pub fn singleton(len: usize, i: usize) -> Self {
        let mut e = Event::empty(len);
        e.insert(i);
        e
    }

    pub fn from_indices(len: usize, indices: &[usize]) -> Self {
        let mut e = Event::empty(len);
        for &i in indices {
            e.insert(i);
        }
        e
    }

    /// Build from a predicate on outcome indices.
    pub fn from_fn(len: usize, mut pred: impl FnMut(usize) -> bool) -> Self {
        let mut e = Event::empty(len);
        for i in 0..len {
            if pred(i) {
                e.insert(i);
            }
        }
        e
    }

    pub(crate) fn from_words(len: usize, mut words: Vec<u64>) -> Self {
        assert_eq!(words.len(), word_count(len));
        let mut e = Event { len, words: std::mem::take(&mut words) };
        e.mask_tail();
        e
    }

    fn mask_tail(&mut self) {
        let tail = self.len % 64;
        if tail != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << tail) - 1;
            }
        }
    }

    /// Size of the ambient outcome space.
    pub fn space_len(&self) -> usize {
        self.len
    }

    pub fn contains(&self, i: usize) -> bool {
        assert!(i < self.len);
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn insert(&mut self, i: usize) {
        assert!(i < self.len);
        self.words[i / 64] |= 1 << (i % 64);
    }

    /// Number of outcomes in the set.
    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn is_full(&self) -> bool {
        self.count() == self.len
    }

    fn zip(&self, other: &Event, f: impl Fn(u64, u64) -> u64) -> Event {
        assert_eq!(self.len, other.len, "events from different spaces");
        let words = self.words.iter().zip(&other.words).map(|(&a, &b)| f(a, b)).collect();
        let mut e = Event { len: self.len, words };
        e.mask_tail();
        e
    }

    pub fn complement(&self) -> Event {
        let mut e = Event { len: self.len, words: self.words.iter().map(|w| !w).collect() };
        e.mask_tail();
        e
    }

    pub fn union(&self, other: &Event) -> Event {
        self.zip(other, |a, b| a | b)
    }

    pub fn intersect(&self, other: &Event) -> Event {
        self.zip(other, |a, b| a & b)
    }

    pub fn minus(&self, other: &Event) -> Event {
        self.zip(other, |a, b| a & !b)
    }

    pub fn sym_diff(&self, other: &Event) -> Event {
        self.zip(other, |a, b| a ^ b)
    }

    pub fn is_subset(&self, other: &Event) -> bool {
        assert_eq!(self.len, other.len, "events from different spaces");
        self.words.iter().zip(&other.words).all(|(&a, &b)| a & !b == 0)
    }

    pub fn is_disjoint(&self, other: &Event) -> bool {
        assert_eq!(self.len, other.len, "events from different spaces");
        self.words.iter().zip(&other.words).all(|(&a, &b)| a & b == 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(move |&i| self.contains(i))
    }

    /// Hex encoding, most significant nibble first, one digit per four
    /// outcomes (`{ω0, ω3}` in a four-point space is `0x9`).
    pub fn to_hex(&self) -> String {
        let digits = self.len.div_ceil(4).max(1);
        let mut s = String::with_capacity(digits + 2);
        s.push_str("0x");
        for d in (0..digits).rev() {
            let word = self.words.get(d / 16).copied().unwrap_or(0);
            let nibble = (word >> (d % 16 * 4)) & 0xf;
            s.push(char::from_digit(nibble as u32, 16).unwrap());
        }
        s
    }

    pub fn from_hex(len: usize, s: &str) -> Result<Event, String> {
        let body = s.strip_prefix("0x").unwrap_or(s);
        let mut e = Event::empty(len);
        for (pos, c) in body.chars().rev().enumerate() {
            let nibble = c.to_digit(16).ok_or_else(|| format!("bad hex digit {c:?}"))? as u64;
            if nibble != 0 {
                let base = pos * 4;
                for b in 0..4 {
                    if nibble >> b & 1 == 1 {
                        if base + b >= len {
                            return Err(format!("hex {s:?} has bits beyond space size {len}"));
                        }
                        e.insert(base + b);
                    }
                }
            }
        }
        Ok(e)
    }
}

impl fmt::Display for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

impl fmt::Debug for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Event[{}]{}", self.len, self.to_hex())
    }
}

impl Serialize for Event {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        ser.serialize_str(&self.to_hex())
    }
}
