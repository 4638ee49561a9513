//! Fixed-length bit masks over edges, vertices or plaquettes.

use std::fmt;

/// A fixed-length bit set backed by 64-bit words.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Mask {
    words: Vec<u64>,
    len: usize,
}

impl Mask {
    pub fn zeros(len: usize) -> Self {
        Mask { words: vec![0; len.div_ceil(64)], len }
    }

    pub fn from_indices(len: usize, indices: impl IntoIterator<Item = usize>) -> Self {
        let mut m = Mask::zeros(len);
        for i in indices {
            m.toggle(i);
        }
        m
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.words[i >> 6] >> (i & 63)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, v: bool) {
        debug_assert!(i < self.len);
        let bit = 1u64 << (i & 63);
        if v {
            self.words[i >> 6] |= bit;
        } else {
            self.words[i >> 6] &= !bit;
        }
    }

    #[inline]
    pub fn toggle(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.words[i >> 6] ^= 1u64 << (i & 63);
    }

    pub fn xor_assign(&mut self, other: &Mask) {
        assert_eq!(self.len, other.len, "mask length mismatch");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn xor(&self, other: &Mask) -> Mask {
        let mut m = self.clone();
        m.xor_assign(other);
        m
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn parity(&self) -> bool {
        self.count_ones() % 2 == 1
    }

    /// Parity of the intersection with `other`.
    pub fn overlap_parity(&self, other: &Mask) -> bool {
        assert_eq!(self.len, other.len, "mask length mismatch");
        let n: u32 = self.words.iter().zip(&other.words).map(|(a, b)| (a & b).count_ones()).sum();
        n % 2 == 1
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let t = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * 64 + t)
            })
        })
    }

    pub fn ones(&self) -> Vec<usize> {
        self.iter_ones().collect()
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        (0..self.len).map(|i| self.get(i) as u8).collect()
    }
}

impl fmt::Debug for Mask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Mask[{}]{:?}", self.len, self.ones())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toggle_and_iterate() {
        let mut m = Mask::zeros(130);
        for i in [0, 63, 64, 129] {
            m.toggle(i);
        }
        assert_eq!(m.ones(), vec![0, 63, 64, 129]);
        assert_eq!(m.count_ones(), 4);
        m.toggle(63);
        assert!(!m.get(63));
        assert!(m.parity());
    }

    #[test]
    fn xor_and_overlap() {
        let a = Mask::from_indices(70, [1, 2, 69]);
        let b = Mask::from_indices(70, [2, 3, 69]);
        assert_eq!(a.xor(&b).ones(), vec![1, 3]);
        assert!(!a.overlap_parity(&b));
        assert!(a.overlap_parity(&Mask::from_indices(70, [69])));
    }
}
