use std::collections::VecDeque;

/// Monotone priority queue over small integer priorities. Entries with equal
/// priority come out in insertion order.
#[derive(Debug)]
pub struct BucketQueue<T> {
    buckets: Vec<VecDeque<T>>,
    cursor: usize,
    len: usize,
}

impl<T> Default for BucketQueue<T> {
    fn default() -> Self {
        BucketQueue {
            buckets: Vec::new(),
            cursor: 0,
            len: 0,
        }
    }
}

impl<T> BucketQueue<T> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// # Panics
    ///
    /// If `priority` is below the last extracted priority.
    pub fn push(&mut self, priority: usize, item: T) {
        assert!(
            priority >= self.cursor,
            "priority {priority} is below the cursor {}",
            self.cursor
        );
        if priority >= self.buckets.len() {
            self.buckets.resize_with(priority + 1, VecDeque::new);
        }
        self.buckets[priority].push_back(item);
        self.len += 1;
    }

    pub fn pop(&mut self) -> Option<(usize, T)> {
        if self.len == 0 {
            return None;
        }
        while self.buckets[self.cursor].is_empty() {
            self.cursor += 1;
        }
        self.len -= 1;
        let item = self.buckets[self.cursor].pop_front()?;
        Some((self.cursor, item))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fifo_within_bucket() {
        let mut q = BucketQueue::new();
        q.push(2, 'a');
        q.push(0, 'b');
        q.push(2, 'c');
        q.push(0, 'd');
        let order: Vec<_> = std::iter::from_fn(|| q.pop()).collect();
        assert_eq!(order, [(0, 'b'), (0, 'd'), (2, 'a'), (2, 'c')]);
        assert!(q.is_empty());
    }

    #[test]
    #[should_panic]
    fn rejects_priority_below_cursor() {
        let mut q = BucketQueue::new();
        q.push(3, ());
        q.pop();
        q.push(1, ());
    }
}
