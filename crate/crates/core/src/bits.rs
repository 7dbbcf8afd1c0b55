//! Fixed-capacity bit sets used for extension arithmetic.
//!
//! Extensions, input extensions and correct-output sets are all subsets of a
//! language universe, so they are represented as bit sets indexed by universe
//! position. All set algebra on them reduces to word-wise operations.

/// A set of universe indices, packed into 64-bit words.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BitSet {
    words: Vec<u64>,
    capacity: usize,
}

impl BitSet {
    /// The empty set over a universe of `capacity` indices.
    pub fn empty(capacity: usize) -> Self {
        BitSet {
            words: vec![0; capacity.div_ceil(64)],
            capacity,
        }
    }

    /// The full set `{0, .., capacity-1}`.
    pub fn full(capacity: usize) -> Self {
        let mut set = Self::empty(capacity);
        for i in 0..capacity {
            set.insert(i);
        }
        set
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn insert(&mut self, index: usize) {
        debug_assert!(index < self.capacity);
        self.words[index / 64] |= 1 << (index % 64);
    }

    pub fn remove(&mut self, index: usize) {
        debug_assert!(index < self.capacity);
        self.words[index / 64] &= !(1 << (index % 64));
    }

    pub fn contains(&self, index: usize) -> bool {
        index < self.capacity && self.words[index / 64] & (1 << (index % 64)) != 0
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn and(&self, other: &BitSet) -> BitSet {
        self.zip_with(other, |a, b| a & b)
    }

    pub fn or(&self, other: &BitSet) -> BitSet {
        self.zip_with(other, |a, b| a | b)
    }

    /// Elements of `self` not in `other`.
    pub fn minus(&self, other: &BitSet) -> BitSet {
        self.zip_with(other, |a, b| a & !b)
    }

    /// The complement within the universe.
    pub fn complement(&self) -> BitSet {
        BitSet::full(self.capacity).minus(self)
    }

    pub fn is_subset(&self, other: &BitSet) -> bool {
        debug_assert_eq!(self.capacity, other.capacity);
        self.words
            .iter()
            .zip(&other.words)
            .all(|(a, b)| a & !b == 0)
    }

    pub fn intersects(&self, other: &BitSet) -> bool {
        debug_assert_eq!(self.capacity, other.capacity);
        self.words.iter().zip(&other.words).any(|(a, b)| a & b != 0)
    }

    /// Ascending iterator over member indices.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &word)| {
            let mut w = word;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let bit = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(wi * 64 + bit)
                }
            })
        })
    }

    fn zip_with(&self, other: &BitSet, f: impl Fn(u64, u64) -> u64) -> BitSet {
        debug_assert_eq!(self.capacity, other.capacity);
        BitSet {
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(&a, &b)| f(a, b))
                .collect(),
            capacity: self.capacity,
        }
    }
}

impl FromIterator<usize> for BitSet {
    /// Collects indices into a set sized to hold the largest one.
    fn from_iter<T: IntoIterator<Item = usize>>(iter: T) -> Self {
        let indices: Vec<usize> = iter.into_iter().collect();
        let capacity = indices.iter().map(|&i| i + 1).max().unwrap_or(0);
        let mut set = BitSet::empty(capacity);
        for i in indices {
            set.insert(i);
        }
        set
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn set_algebra() {
        let mut a = BitSet::empty(130);
        let mut b = BitSet::empty(130);
        a.insert(0);
        a.insert(65);
        a.insert(129);
        b.insert(65);
        b.insert(100);
        assert_eq!(a.and(&b).iter().collect::<Vec<_>>(), vec![65]);
        assert_eq!(a.or(&b).len(), 4);
        assert_eq!(a.minus(&b).iter().collect::<Vec<_>>(), vec![0, 129]);
        assert!(!a.is_subset(&b));
        assert!(a.and(&b).is_subset(&b));
        assert!(a.intersects(&b));
        assert_eq!(a.complement().len(), 127);
    }

    #[test]
    fn empty_and_full() {
        assert!(BitSet::empty(7).is_empty());
        assert_eq!(BitSet::full(7).len(), 7);
        assert!(!BitSet::full(7).contains(7));
    }
}
