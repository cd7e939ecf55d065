//! Union-find and static component labeling.

use std::collections::VecDeque;

use crate::error::{Error, Result};

/// Disjoint-set forest with path halving and union by rank.
#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<usize>,
    rank: Vec<u8>,
    sets: usize,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect(), rank: vec![0; n], sets: n }
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    /// Adds a singleton set and returns its element.
    pub fn push(&mut self) -> usize {
        self.parent.push(self.parent.len());
        self.rank.push(0);
        self.sets += 1;
        self.parent.len() - 1
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns `true` when `a` and `b` were in different sets.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            std::cmp::Ordering::Less => self.parent[ra] = rb,
            std::cmp::Ordering::Greater => self.parent[rb] = ra,
            std::cmp::Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
        self.sets -= 1;
        true
    }

    pub fn connected(&mut self, a: usize, b: usize) -> bool {
        self.find(a) == self.find(b)
    }

    /// Number of disjoint sets.
    pub fn count(&self) -> usize {
        self.sets
    }
}

/// Component labeling of an undirected graph over vertices `0..labels.len()`.
///
/// Labels are dense (`0..count`) and assigned in order of each component's
/// smallest vertex, so two labelings of the same partition compare equal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Labeling {
    pub labels: Vec<usize>,
    pub count: usize,
}

impl Labeling {
    pub fn same(&self, a: usize, b: usize) -> bool {
        self.labels[a] == self.labels[b]
    }

    /// Size of each component, indexed by label.
    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.count];
        for &l in &self.labels {
            sizes[l] += 1;
        }
        sizes
    }
}

fn check_edges(vertices: usize, edges: &[(usize, usize)]) -> Result<()> {
    for &(a, b) in edges {
        if a >= vertices || b >= vertices {
            return Err(Error::MalformedGraph(a, b));
        }
    }
    Ok(())
}

fn canonical(mut raw: impl FnMut(usize) -> usize, vertices: usize) -> Labeling {
    let mut remap = vec![usize::MAX; vertices];
    let mut labels = Vec::with_capacity(vertices);
    let mut count = 0;
    for v in 0..vertices {
        let r = raw(v);
        if remap[r] == usize::MAX {
            remap[r] = count;
            count += 1;
        }
        labels.push(remap[r]);
    }
    Labeling { labels, count }
}

/// Connected components of the graph with `vertices` vertices and the given edges.
pub fn components(vertices: usize, edges: &[(usize, usize)]) -> Result<Labeling> {
    check_edges(vertices, edges)?;
    let mut uf = UnionFind::new(vertices);
    for &(a, b) in edges {
        uf.union(a, b);
    }
    Ok(canonical(|v| uf.find(v), vertices))
}

/// Breadth-first labeling; an independent route to the same partition.
pub fn bfs_components(vertices: usize, edges: &[(usize, usize)]) -> Result<Labeling> {
    check_edges(vertices, edges)?;
    let mut adj = vec![Vec::new(); vertices];
    for &(a, b) in edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    let mut labels = vec![usize::MAX; vertices];
    let mut count = 0;
    let mut queue = VecDeque::new();
    for s in 0..vertices {
        if labels[s] != usize::MAX {
            continue;
        }
        labels[s] = count;
        queue.push_back(s);
        while let Some(v) = queue.pop_front() {
            for &w in &adj[v] {
                if labels[w] == usize::MAX {
                    labels[w] = count;
                    queue.push_back(w);
                }
            }
        }
        count += 1;
    }
    Ok(Labeling { labels, count })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn edgeless_and_path() {
        assert_eq!(components(3, &[]).unwrap().count, 3);
        let l = components(3, &[(0, 1), (1, 2)]).unwrap();
        assert_eq!(l.count, 1);
        assert_eq!(l.labels, vec![0, 0, 0]);
    }

    #[test]
    fn dangling_edge_is_an_error() {
        assert_eq!(components(2, &[(0, 2)]), Err(Error::MalformedGraph(0, 2)));
    }

    #[test]
    fn gnp_matches_repeated_union_find() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let n = 20;
            let mut edges = Vec::new();
            for a in 0..n {
                for b in a + 1..n {
                    if rng.random_bool(0.1) {
                        edges.push((a, b));
                    }
                }
            }
            let l = components(n, &edges).unwrap();
            let mut uf = UnionFind::new(n);
            for &(a, b) in &edges {
                uf.union(a, b);
            }
            assert_eq!(l.count, uf.count());
            for a in 0..n {
                for b in 0..n {
                    assert_eq!(l.same(a, b), uf.connected(a, b));
                }
            }
        }
    }

    proptest! {
        #[test]
        fn agrees_with_bfs(n in 0usize..30, raw in proptest::collection::vec((0usize..30, 0usize..30), 0..60)) {
            let edges: Vec<_> = raw.into_iter().filter(|&(a, b)| a < n && b < n).collect();
            prop_assert_eq!(components(n, &edges).unwrap(), bfs_components(n, &edges).unwrap());
        }

        #[test]
        fn union_decrements_count_only_on_merge(ops in proptest::collection::vec((0usize..15, 0usize..15), 0..40)) {
            let mut uf = UnionFind::new(15);
            for (a, b) in ops {
                let before = uf.count();
                let joined_before = uf.connected(a, b);
                let merged = uf.union(a, b);
                prop_assert_eq!(merged, !joined_before);
                prop_assert_eq!(uf.count(), before - usize::from(merged));
                prop_assert_eq!(uf.find(a), uf.find(b));
                let r = uf.find(a);
                prop_assert_eq!(uf.find(r), r);
            }
        }
    }
}
