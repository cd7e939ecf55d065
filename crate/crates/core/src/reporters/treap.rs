//! Arena treaps keyed by `(y_above, uid)` and augmented with the subtree
//! minimum of `y_below`. Each treap answers three-sided queries
//! `key ∈ [lo, hi] ∧ below < t` in `O(depth · (1 + k))` node visits.

use crate::component::ComponentId;

pub(crate) const NIL: u32 = u32::MAX;

pub(crate) type Key = (i64, u32);

#[derive(Debug, Clone, Copy)]
pub(crate) struct Payload {
    pub comp: ComponentId,
    pub size: u32,
}

#[derive(Debug, Clone)]
struct Node {
    key: Key,
    prio: u32,
    below: i64,
    min_below: i64,
    left: u32,
    right: u32,
    payload: Payload,
}

fn mix(mut z: u64) -> u32 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    (z ^ (z >> 31)) as u32
}

fn successor(k: Key) -> Key {
    if k.1 == u32::MAX {
        (k.0 + 1, 0)
    } else {
        (k.0, k.1 + 1)
    }
}

#[derive(Debug, Default, Clone)]
pub(crate) struct TreapForest {
    nodes: Vec<Node>,
    free: Vec<u32>,
}

impl TreapForest {
    fn alloc(&mut self, key: Key, below: i64, payload: Payload) -> u32 {
        let node = Node {
            key,
            prio: mix(((key.1 as u64) << 32) ^ key.0 as u64),
            below,
            min_below: below,
            left: NIL,
            right: NIL,
            payload,
        };
        match self.free.pop() {
            Some(i) => {
                self.nodes[i as usize] = node;
                i
            }
            None => {
                self.nodes.push(node);
                (self.nodes.len() - 1) as u32
            }
        }
    }

    fn pull(&mut self, t: u32) {
        let (l, r) = (self.nodes[t as usize].left, self.nodes[t as usize].right);
        let mut m = self.nodes[t as usize].below;
        if l != NIL {
            m = m.min(self.nodes[l as usize].min_below);
        }
        if r != NIL {
            m = m.min(self.nodes[r as usize].min_below);
        }
        self.nodes[t as usize].min_below = m;
    }

    /// Splits into (keys < key, keys >= key).
    fn split(&mut self, t: u32, key: Key) -> (u32, u32) {
        if t == NIL {
            return (NIL, NIL);
        }
        if self.nodes[t as usize].key < key {
            let (l, r) = self.split(self.nodes[t as usize].right, key);
            self.nodes[t as usize].right = l;
            self.pull(t);
            (t, r)
        } else {
            let (l, r) = self.split(self.nodes[t as usize].left, key);
            self.nodes[t as usize].left = r;
            self.pull(t);
            (l, t)
        }
    }

    fn merge(&mut self, a: u32, b: u32) -> u32 {
        if a == NIL {
            return b;
        }
        if b == NIL {
            return a;
        }
        if self.nodes[a as usize].prio > self.nodes[b as usize].prio {
            let r = self.merge(self.nodes[a as usize].right, b);
            self.nodes[a as usize].right = r;
            self.pull(a);
            a
        } else {
            let l = self.merge(a, self.nodes[b as usize].left);
            self.nodes[b as usize].left = l;
            self.pull(b);
            b
        }
    }

    pub fn insert(&mut self, root: u32, key: Key, below: i64, payload: Payload) -> u32 {
        let n = self.alloc(key, below, payload);
        let (l, r) = self.split(root, key);
        let l = self.merge(l, n);
        self.merge(l, r)
    }

    /// Builds a treap from entries sorted by strictly increasing key in linear time.
    pub fn build_sorted(&mut self, items: impl IntoIterator<Item = (Key, i64, Payload)>) -> u32 {
        let mut spine: Vec<u32> = Vec::new();
        for (key, below, payload) in items {
            let n = self.alloc(key, below, payload);
            let prio = self.nodes[n as usize].prio;
            let mut last = NIL;
            while let Some(&top) = spine.last() {
                if self.nodes[top as usize].prio >= prio {
                    break;
                }
                last = spine.pop().unwrap();
            }
            debug_assert!(spine.last().is_none_or(|&t| self.nodes[t as usize].key < key));
            self.nodes[n as usize].left = last;
            if let Some(&top) = spine.last() {
                self.nodes[top as usize].right = n;
            }
            spine.push(n);
        }
        let Some(&root) = spine.first() else {
            return NIL;
        };
        self.pull_all(root);
        root
    }

    fn pull_all(&mut self, t: u32) {
        let (l, r) = (self.nodes[t as usize].left, self.nodes[t as usize].right);
        if l != NIL {
            self.pull_all(l);
        }
        if r != NIL {
            self.pull_all(r);
        }
        self.pull(t);
    }

    /// Removes `key`; returns the new root and whether the key was present.
    pub fn remove(&mut self, root: u32, key: Key) -> (u32, bool) {
        let (l, r) = self.split(root, key);
        let (mid, r) = self.split(r, successor(key));
        let found = mid != NIL;
        if found {
            debug_assert_eq!(self.nodes[mid as usize].left, NIL);
            debug_assert_eq!(self.nodes[mid as usize].right, NIL);
            self.free.push(mid);
        }
        (self.merge(l, r), found)
    }

    #[cfg(test)]
    pub fn live_nodes(&self) -> usize {
        self.nodes.len() - self.free.len()
    }
}

/// Lazy three-sided scan over one treap.
#[derive(Debug, Clone)]
pub(crate) struct RangeScan {
    stack: Vec<u32>,
    lo: Key,
    hi: Key,
    threshold: i64,
}

impl RangeScan {
    /// Reports nodes with `lo.0 <= key.0 <= hi_y` and `below < threshold`.
    pub fn new(root: u32, lo_y: i64, hi_y: i64, threshold: i64) -> Self {
        let mut stack = Vec::new();
        if root != NIL && lo_y <= hi_y {
            stack.push(root);
        }
        RangeScan { stack, lo: (lo_y, 0), hi: (hi_y, u32::MAX), threshold }
    }

    pub fn next(&mut self, forest: &TreapForest, work: &mut u64) -> Option<Payload> {
        while let Some(t) = self.stack.pop() {
            *work += 1;
            let n = &forest.nodes[t as usize];
            if n.min_below >= self.threshold {
                continue;
            }
            if n.left != NIL && n.key > self.lo {
                self.stack.push(n.left);
            }
            if n.right != NIL && n.key < self.hi {
                self.stack.push(n.right);
            }
            if self.lo <= n.key && n.key <= self.hi && n.below < self.threshold {
                return Some(n.payload);
            }
        }
        None
    }
}
