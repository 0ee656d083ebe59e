//! Packed bit vectors plus the word-level block rotations the update kernels
//! are built on.
//!
//! All bits at positions `>= len` are kept zero; every mutating operation
//! preserves that invariant, so derived equality and hashing are exact.

/// A fixed-length bit vector packed into `u64` words.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Bits {
    words: Vec<u64>,
    len: usize,
}

impl std::fmt::Debug for Bits {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Bits[{}; {} set]", self.len, self.count_ones())
    }
}

#[inline]
pub(crate) fn word_count(len: usize) -> usize {
    len.div_ceil(64)
}

impl Bits {
    pub fn zeros(len: usize) -> Self {
        Bits {
            words: vec![0; word_count(len)],
            len,
        }
    }

    pub fn ones(len: usize) -> Self {
        let mut b = Bits {
            words: vec![!0u64; word_count(len)],
            len,
        };
        b.mask_tail();
        b
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        debug_assert!(i < self.len);
        let mask = 1u64 << (i % 64);
        if value {
            self.words[i / 64] |= mask;
        } else {
            self.words[i / 64] &= !mask;
        }
    }

    #[inline]
    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub(crate) fn words_mut(&mut self) -> &mut [u64] {
        &mut self.words
    }

    /// Zero the bits above `len` in the last word.
    pub(crate) fn mask_tail(&mut self) {
        let r = self.len % 64;
        if r != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << r) - 1;
            }
        }
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn none_set(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn all_set(&self) -> bool {
        self.count_ones() == self.len
    }

    pub fn clear(&mut self) {
        self.words.iter_mut().for_each(|w| *w = 0);
    }

    /// Indices of the set bits, ascending.
    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let b = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(wi * 64 + b)
                }
            })
        })
    }

    /// True iff every set bit of `self` is also set in `other`.
    pub fn subset_of(&self, other: &Bits) -> bool {
        debug_assert_eq!(self.len, other.len);
        self.words
            .iter()
            .zip(&other.words)
            .all(|(a, b)| a & !b == 0)
    }

    pub fn union_with(&mut self, other: &Bits) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn intersects(&self, other: &Bits) -> bool {
        self.words.iter().zip(&other.words).any(|(a, b)| a & b != 0)
    }

    pub fn inverted(&self) -> Bits {
        let mut out = Bits {
            words: self.words.iter().map(|w| !w).collect(),
            len: self.len,
        };
        out.mask_tail();
        out
    }

    /// FNV-1a over the words. Cheap, stable across platforms; used as a
    /// first-pass cycle probe, never as proof of equality.
    pub fn fingerprint(&self) -> u64 {
        let mut h = 0xcbf29ce484222325u64;
        for &w in &self.words {
            h ^= w;
            h = h.wrapping_mul(0x100000001b3);
        }
        h
    }
}

/// Read up to 64 bits starting at bit offset `off`; bits past the end of
/// `src` read as zero. `n` must be in `1..=64`.
#[inline]
fn read_bits(src: &[u64], off: usize, n: usize) -> u64 {
    let w = off / 64;
    let b = off % 64;
    let mut v = src.get(w).copied().unwrap_or(0) >> b;
    if b != 0 {
        if let Some(&hi) = src.get(w + 1) {
            v |= hi << (64 - b);
        }
    }
    if n < 64 {
        v &= (1u64 << n) - 1;
    }
    v
}

/// Copy `len` bits from `src` starting at `src_off` into `dst` starting at
/// `dst_off`. The ranges may not overlap within the same buffer.
pub(crate) fn copy_bits(dst: &mut [u64], dst_off: usize, src: &[u64], src_off: usize, len: usize) {
    let mut remaining = len;
    let mut d = dst_off;
    let mut s = src_off;
    while remaining > 0 {
        let dw = d / 64;
        let db = d % 64;
        let take = (64 - db).min(remaining);
        let chunk = read_bits(src, s, take);
        if take == 64 {
            dst[dw] = chunk;
        } else {
            let mask = ((1u64 << take) - 1) << db;
            dst[dw] = (dst[dw] & !mask) | ((chunk << db) & mask);
        }
        remaining -= take;
        d += take;
        s += take;
    }
}

/// For every aligned block of `block` bits, write
/// `dst[base + i] = src[base + (i + shift) mod block]`.
///
/// `src.len()` must be a multiple of `block` and `shift < block`. This is the
/// whole-lattice "value of the neighbor at offset +shift" gather.
pub(crate) fn rotate_blocks_into(dst: &mut Bits, src: &Bits, block: usize, shift: usize) {
    debug_assert_eq!(dst.len, src.len);
    debug_assert!(block > 0 && src.len.is_multiple_of(block));
    debug_assert!(shift < block);
    if shift == 0 {
        dst.words.copy_from_slice(&src.words);
        return;
    }
    let mut base = 0;
    while base < src.len {
        copy_bits(
            &mut dst.words,
            base,
            &src.words,
            base + shift,
            block - shift,
        );
        copy_bits(
            &mut dst.words,
            base + (block - shift),
            &src.words,
            base,
            shift,
        );
        base += block;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn naive_rotate(src: &Bits, block: usize, shift: usize) -> Bits {
        let mut out = Bits::zeros(src.len());
        for base in (0..src.len()).step_by(block) {
            for i in 0..block {
                out.set(base + i, src.get(base + (i + shift) % block));
            }
        }
        out
    }

    #[test]
    fn set_get_roundtrip() {
        let mut b = Bits::zeros(130);
        b.set(0, true);
        b.set(64, true);
        b.set(129, true);
        assert!(b.get(0) && b.get(64) && b.get(129));
        assert!(!b.get(1));
        assert_eq!(b.count_ones(), 3);
        b.set(64, false);
        assert_eq!(b.count_ones(), 2);
    }

    #[test]
    fn ones_masks_tail() {
        let b = Bits::ones(70);
        assert_eq!(b.count_ones(), 70);
        assert!(b.all_set());
        assert_eq!(b.words()[1] >> 6, 0);
    }

    #[test]
    fn inverted_involution() {
        let mut b = Bits::zeros(100);
        for i in (0..100).step_by(7) {
            b.set(i, true);
        }
        assert_eq!(b.inverted().inverted(), b);
        assert_eq!(b.inverted().count_ones(), 100 - b.count_ones());
    }

    #[test]
    fn iter_ones_matches_get() {
        let mut b = Bits::zeros(200);
        let set = [0usize, 3, 63, 64, 65, 127, 128, 199];
        for &i in &set {
            b.set(i, true);
        }
        let got: Vec<usize> = b.iter_ones().collect();
        assert_eq!(got, set);
    }

    proptest! {
        #[test]
        fn rotate_matches_naive(
            seed in any::<u64>(),
            block_exp in 1usize..7,
            nblocks in 1usize..5,
            shift_raw in any::<usize>(),
        ) {
            // Blocks of irregular sizes so word boundaries are crossed.
            let block = (1 << block_exp) + (seed as usize % 5);
            let len = block * nblocks;
            let mut src = Bits::zeros(len);
            let mut s = seed;
            for i in 0..len {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                src.set(i, s >> 63 == 1);
            }
            let shift = shift_raw % block;
            let mut dst = Bits::zeros(len);
            rotate_blocks_into(&mut dst, &src, block, shift);
            prop_assert_eq!(dst, naive_rotate(&src, block, shift));
        }

        #[test]
        fn copy_bits_matches_naive(
            seed in any::<u64>(),
            dst_off in 0usize..130,
            src_off in 0usize..130,
            len in 0usize..120,
        ) {
            let total = 256;
            let mut src = Bits::zeros(total);
            let mut dst = Bits::zeros(total);
            let mut s = seed;
            for i in 0..total {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                src.set(i, s >> 63 == 1);
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                dst.set(i, s >> 63 == 1);
            }
            let mut expect = dst.clone();
            for i in 0..len {
                expect.set(dst_off + i, src.get(src_off + i));
            }
            copy_bits(dst.words_mut(), dst_off, src.words(), src_off, len);
            prop_assert_eq!(dst, expect);
        }
    }
}
