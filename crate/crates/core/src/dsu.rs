//! Disjoint-set forests used for connectivity, corner identification, and
//! the orientability parity check.

#[derive(Clone, Debug)]
pub struct DisjointSets {
    parent: Vec<usize>,
    rank: Vec<u8>,
    components: usize,
}

impl DisjointSets {
    pub fn new(len: usize) -> Self {
        Self {
            parent: (0..len).collect(),
            rank: vec![0; len],
            components: len,
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        while self.parent[x] != root {
            let next = self.parent[x];
            self.parent[x] = root;
            x = next;
        }
        root
    }

    /// Returns `true` if `a` and `b` were in different sets.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return false;
        }
        if self.rank[a] < self.rank[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a;
        if self.rank[a] == self.rank[b] {
            self.rank[a] += 1;
        }
        self.components -= 1;
        true
    }

    pub fn components(&self) -> usize {
        self.components
    }
}

/// Union-find where each element carries a parity relative to its root.
///
/// `relate(a, b, p)` records `parity(a) ^ parity(b) == p`; it returns `false`
/// when that contradicts what is already known.
#[derive(Clone, Debug)]
pub struct ParitySets {
    parent: Vec<usize>,
    // parity of the element relative to its parent
    offset: Vec<bool>,
}

impl ParitySets {
    pub fn new(len: usize) -> Self {
        Self {
            parent: (0..len).collect(),
            offset: vec![false; len],
        }
    }

    pub fn find(&mut self, x: usize) -> (usize, bool) {
        if self.parent[x] == x {
            return (x, false);
        }
        let (root, parent_parity) = self.find(self.parent[x]);
        self.offset[x] ^= parent_parity;
        self.parent[x] = root;
        (root, self.offset[x])
    }

    pub fn relate(&mut self, a: usize, b: usize, parity: bool) -> bool {
        let (ra, pa) = self.find(a);
        let (rb, pb) = self.find(b);
        if ra == rb {
            return (pa ^ pb) == parity;
        }
        self.parent[rb] = ra;
        self.offset[rb] = pa ^ pb ^ parity;
        true
    }
}
