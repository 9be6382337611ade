//! Connected-component labeling on a polar cell grid.
//!
//! Cells are stored ring-major (`index = ring * n_theta + angle`). Two cells
//! are adjacent when they share an edge: the same ring with neighbouring
//! angular index (wrapping at `n_theta`), or the same angular index in
//! consecutive rings.

/// Disjoint sets with path halving and union by size.
#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<u32>,
    size: Vec<u32>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        Self { parent: (0..n as u32).collect(), size: vec![1; n] }
    }

    pub fn find(&mut self, mut i: usize) -> usize {
        while self.parent[i] as usize != i {
            let grand = self.parent[self.parent[i] as usize];
            self.parent[i] = grand;
            i = grand as usize;
        }
        i
    }

    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return false;
        }
        if self.size[a] < self.size[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a as u32;
        self.size[a] += self.size[b];
        true
    }
}

/// Label the `true` cells of `mask` by connectivity.
///
/// Returns one label per cell, `0` for cells outside the mask and `1..=k`
/// otherwise, numbered in order of each component's first cell in the scan.
pub fn label_components(mask: &[bool], n_rings: usize, n_theta: usize) -> (Vec<u32>, usize) {
    assert_eq!(mask.len(), n_rings * n_theta, "mask does not match grid shape");
    let mut uf = UnionFind::new(mask.len());
    for i in 0..n_rings {
        for j in 0..n_theta {
            let k = i * n_theta + j;
            if !mask[k] {
                continue;
            }
            let right = i * n_theta + (j + 1) % n_theta;
            if mask[right] {
                uf.union(k, right);
            }
            if i + 1 < n_rings && mask[k + n_theta] {
                uf.union(k, k + n_theta);
            }
        }
    }
    let mut root_label = vec![0u32; mask.len()];
    let mut labels = vec![0u32; mask.len()];
    let mut count = 0u32;
    for k in 0..mask.len() {
        if !mask[k] {
            continue;
        }
        let root = uf.find(k);
        if root_label[root] == 0 {
            count += 1;
            root_label[root] = count;
        }
        labels[k] = root_label[root];
    }
    (labels, count as usize)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::{HashMap, VecDeque};

    /// Breadth-first flood fill scanning cells in reverse order.
    fn flood_fill(mask: &[bool], n_rings: usize, n_theta: usize) -> Vec<u32> {
        let mut labels = vec![0u32; mask.len()];
        let mut next = 0;
        for start in (0..mask.len()).rev() {
            if !mask[start] || labels[start] != 0 {
                continue;
            }
            next += 1;
            labels[start] = next;
            let mut queue = VecDeque::from([start]);
            while let Some(k) = queue.pop_front() {
                let (i, j) = (k / n_theta, k % n_theta);
                let mut nbrs = vec![i * n_theta + (j + 1) % n_theta, i * n_theta + (j + n_theta - 1) % n_theta];
                if i > 0 {
                    nbrs.push(k - n_theta);
                }
                if i + 1 < n_rings {
                    nbrs.push(k + n_theta);
                }
                for m in nbrs {
                    if mask[m] && labels[m] == 0 {
                        labels[m] = next;
                        queue.push_back(m);
                    }
                }
            }
        }
        labels
    }

    fn same_partition(a: &[u32], b: &[u32]) -> bool {
        let mut ab = HashMap::new();
        let mut ba = HashMap::new();
        a.iter().zip(b).all(|(&x, &y)| {
            (x == 0) == (y == 0) && *ab.entry(x).or_insert(y) == y && *ba.entry(y).or_insert(x) == x
        })
    }

    #[test]
    fn angular_wraparound_joins_ends() {
        let (n_r, n_t) = (2, 8);
        let mut mask = vec![false; n_r * n_t];
        mask[0] = true;
        mask[7] = true;
        let (labels, count) = label_components(&mask, n_r, n_t);
        assert_eq!(count, 1);
        assert_eq!(labels[0], labels[7]);
    }

    #[test]
    fn diagonal_cells_are_separate() {
        let (n_r, n_t) = (2, 8);
        let mut mask = vec![false; n_r * n_t];
        mask[1] = true;
        mask[n_t + 2] = true;
        assert_eq!(label_components(&mask, n_r, n_t).1, 2);
    }

    #[test]
    fn radial_adjacency() {
        let (n_r, n_t) = (3, 4);
        let mut mask = vec![false; n_r * n_t];
        for i in 0..n_r {
            mask[i * n_t + 2] = true;
        }
        let (labels, count) = label_components(&mask, n_r, n_t);
        assert_eq!(count, 1);
        assert!(labels.iter().filter(|&&l| l == 1).count() == 3);
    }

    proptest! {
        #[test]
        fn labels_match_flood_fill(
            n_r in 1usize..12,
            n_t in 3usize..16,
            bits in proptest::collection::vec(any::<bool>(), 192)
        ) {
            let mask: Vec<bool> = bits[..n_r * n_t].to_vec();
            let (labels, count) = label_components(&mask, n_r, n_t);
            let oracle = flood_fill(&mask, n_r, n_t);
            prop_assert!(same_partition(&labels, &oracle));
            prop_assert_eq!(count as u32, oracle.iter().copied().max().unwrap_or(0));
            for (l, m) in labels.iter().zip(&mask) {
                prop_assert_eq!(*l != 0, *m);
            }
        }
    }
}
