/// Growable disjoint-set forest with path halving and union by size.
#[derive(Debug, Clone, Default)]
pub(crate) struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    pub fn push(&mut self) -> usize {
        let id = self.parent.len();
        self.parent.push(id);
        self.size.push(1);
        id
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    /// Resets a single element to a singleton. Only valid when no other
    /// element points at it, which holds when a whole active set is reset.
    pub fn reset(&mut self, x: usize) {
        self.parent[x] = x;
        self.size[x] = 1;
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub fn union(&mut self, a: usize, b: usize) -> usize {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return ra;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        ra
    }

    pub fn same(&mut self, a: usize, b: usize) -> bool {
        self.find(a) == self.find(b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn union_and_grow() {
        let mut uf = UnionFind::new(3);
        uf.union(0, 2);
        assert!(uf.same(0, 2));
        assert!(!uf.same(0, 1));
        let d = uf.push();
        uf.union(d, 1);
        assert!(uf.same(3, 1));
        assert_eq!(uf.len(), 4);
    }
}
