//! Sparse multilinear tensors keyed by flat `u32` words, and the small
//! combinatorial iterators used to evaluate them.

use std::collections::HashMap;

use crate::gf2::BitVec;

pub type Key = Vec<u32>;

/// Sparse map from flat keys to output vectors; zero values are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Tensor {
    entries: HashMap<Key, BitVec>,
}

impl Tensor {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, key: &[u32]) -> Option<&BitVec> {
        self.entries.get(key)
    }

    pub fn insert(&mut self, key: Key, v: BitVec) {
        if v.is_zero() {
            self.entries.remove(&key);
        } else {
            self.entries.insert(key, v);
        }
    }

    /// Adds `v` to the entry at `key`.
    pub fn add(&mut self, key: &[u32], v: &BitVec) {
        if v.is_zero() {
            return;
        }
        match self.entries.get_mut(key) {
            Some(e) => {
                e.xor_assign(v);
                if e.is_zero() {
                    self.entries.remove(key);
                }
            }
            None => {
                self.entries.insert(key.to_vec(), v.clone());
            }
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Key, &BitVec)> {
        self.entries.iter()
    }

    /// Entries in key order.
    pub fn sorted(&self) -> Vec<(&Key, &BitVec)> {
        let mut v: Vec<_> = self.entries.iter().collect();
        v.sort_by(|a, b| a.0.cmp(b.0));
        v
    }

    pub fn retain(&mut self, mut f: impl FnMut(&Key, &BitVec) -> bool) {
        self.entries.retain(|k, v| f(k, v));
    }

    pub fn map_keys(&self, mut f: impl FnMut(&[u32]) -> Key) -> Tensor {
        let mut out = Tensor::new();
        for (k, v) in &self.entries {
            out.add(&f(k), v);
        }
        out
    }
}

/// Calls `f` on every tuple `(i_0, ..., i_{n-1})` with `i_t < dims[t]`,
/// in lexicographic order.
pub fn for_each_word(dims: &[usize], mut f: impl FnMut(&[u32])) {
    if dims.contains(&0) {
        return;
    }
    let mut w = vec![0u32; dims.len()];
    loop {
        f(&w);
        let mut t = dims.len();
        loop {
            if t == 0 {
                return;
            }
            t -= 1;
            w[t] += 1;
            if (w[t] as usize) < dims[t] {
                break;
            }
            w[t] = 0;
        }
    }
}

/// Calls `f` on every choice of one set bit from each vector.
pub fn for_each_support(vs: &[&BitVec], mut f: impl FnMut(&[u32])) {
    let supports: Vec<Vec<u32>> = vs.iter().map(|v| v.ones().map(|i| i as u32).collect()).collect();
    let dims: Vec<usize> = supports.iter().map(Vec::len).collect();
    let mut buf = vec![0u32; vs.len()];
    for_each_word(&dims, |idx| {
        for (t, &i) in idx.iter().enumerate() {
            buf[t] = supports[t][i as usize];
        }
        f(&buf);
    });
}

/// Ordered compositions of `n` into positive parts, each at most `max_part`,
/// with at most `max_count` parts.
pub fn compositions(n: usize, max_part: usize, max_count: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(n: usize, max_part: usize, max_count: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if n == 0 {
            out.push(cur.clone());
            return;
        }
        if cur.len() == max_count {
            return;
        }
        for p in 1..=n.min(max_part) {
            cur.push(p);
            rec(n - p, max_part, max_count, cur, out);
            cur.pop();
        }
    }
    rec(n, max_part, max_count, &mut cur, &mut out);
    out
}

pub fn concat(parts: &[&[u32]]) -> Key {
    let mut k = Vec::with_capacity(parts.iter().map(|p| p.len()).sum());
    for p in parts {
        k.extend_from_slice(p);
    }
    k
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn words_enumerate_product() {
        let mut seen = Vec::new();
        for_each_word(&[2, 3], |w| seen.push(w.to_vec()));
        assert_eq!(seen.len(), 6);
        assert_eq!(seen[0], vec![0, 0]);
        assert_eq!(seen[5], vec![1, 2]);
        let mut empty = 0;
        for_each_word(&[], |_| empty += 1);
        assert_eq!(empty, 1);
        let mut none = 0;
        for_each_word(&[2, 0], |_| none += 1);
        assert_eq!(none, 0);
    }

    #[test]
    fn compositions_count() {
        assert_eq!(compositions(4, 4, 4).len(), 8);
        assert_eq!(compositions(4, 2, 4).len(), 5);
        assert_eq!(compositions(4, 4, 2).len(), 4);
        assert_eq!(compositions(0, 3, 3), vec![Vec::<usize>::new()]);
    }

    #[test]
    fn tensor_add_cancels() {
        let mut t = Tensor::new();
        let v = BitVec::from_bits(&[1, 0]);
        t.add(&[1, 2], &v);
        t.add(&[1, 2], &v);
        assert!(t.is_empty());
    }

    #[test]
    fn supports_product() {
        let a = BitVec::from_bits(&[1, 1]);
        let b = BitVec::from_bits(&[0, 1, 1]);
        let mut n = 0;
        for_each_support(&[&a, &b], |_| n += 1);
        assert_eq!(n, 4);
    }
}
