use alloc::collections::VecDeque;
use alloc::vec::Vec;

use rand::Rng;

/// Bounded FIFO; the oldest item is evicted once `capacity` is reached.
#[derive(Debug, Clone)]
pub struct ReplayBuffer<T> {
    items: VecDeque<T>,
    capacity: usize,
}

impl<T> ReplayBuffer<T> {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity > 0, "replay capacity must be positive");
        Self { items: VecDeque::with_capacity(capacity.min(1 << 16)), capacity }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn push(&mut self, item: T) {
        if self.items.len() == self.capacity {
            self.items.pop_front();
        }
        self.items.push_back(item);
    }

    pub fn get(&self, i: usize) -> Option<&T> {
        self.items.get(i)
    }

    pub fn iter(&self) -> impl Iterator<Item = &T> {
        self.items.iter()
    }

    /// `count` distinct items drawn uniformly, or all of them if fewer are stored.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, count: usize) -> Vec<&T> {
        let count = count.min(self.items.len());
        rand::seq::index::sample(rng, self.items.len(), count).into_iter().map(|i| &self.items[i]).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seeded_rng;

    #[test]
    fn evicts_oldest() {
        let mut b = ReplayBuffer::new(3);
        for i in 0..5 {
            b.push(i);
        }
        assert_eq!(b.len(), 3);
        assert_eq!(b.iter().copied().collect::<Vec<_>>(), [2, 3, 4]);
    }

    #[test]
    fn sampling_is_seeded_and_distinct() {
        let mut b = ReplayBuffer::new(100);
        for i in 0..50 {
            b.push(i);
        }
        let s1: Vec<i32> = b.sample(&mut seeded_rng(4), 10).into_iter().copied().collect();
        let s2: Vec<i32> = b.sample(&mut seeded_rng(4), 10).into_iter().copied().collect();
        assert_eq!(s1, s2);
        let mut d = s1.clone();
        d.sort_unstable();
        d.dedup();
        assert_eq!(d.len(), 10);
        assert_eq!(b.sample(&mut seeded_rng(0), 80).len(), 50);
    }
}
