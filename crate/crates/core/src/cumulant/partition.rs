//! Set partitions of `{1, ..., N}` with the refinement order.
//!
//! Partitions are kept in canonical form: blocks sorted by their minimum
//! element, elements sorted within each block, so structural equality is
//! partition equality. The join (least upper bound in refinement order) is
//! computed by union-find over block co-membership.

use crate::error::{Error, Result};

pub const MAX_GROUND_SET: usize = 10;

/// A set partition of `{1, ..., n}` in canonical form.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition {
    n: usize,
    blocks: Vec<Vec<usize>>,
}

impl Partition {
    /// Builds from blocks, canonicalizing. The blocks must be disjoint,
    /// nonempty, and cover `{1, ..., n}`.
    pub fn from_blocks(n: usize, blocks: &[Vec<usize>]) -> Result<Partition> {
        let mut seen = vec![false; n + 1];
        let mut canon: Vec<Vec<usize>> = Vec::with_capacity(blocks.len());
        for b in blocks {
            if b.is_empty() {
                return Err(Error::invalid("partition", "empty block"));
            }
            let mut b = b.clone();
            b.sort_unstable();
            for &e in &b {
                if e == 0 || e > n {
                    return Err(Error::invalid(
                        "partition",
                        format!("element {e} outside 1..={n}"),
                    ));
                }
                if seen[e] {
                    return Err(Error::invalid(
                        "partition",
                        format!("element {e} in two blocks"),
                    ));
                }
                seen[e] = true;
            }
            canon.push(b);
        }
        if seen[1..=n].iter().any(|&s| !s) {
            return Err(Error::invalid("partition", "blocks do not cover the set"));
        }
        canon.sort_by_key(|b| b[0]);
        Ok(Partition { n, blocks: canon })
    }

    /// The all-singletons partition (the lattice minimum).
    pub fn discrete(n: usize) -> Partition {
        Partition {
            n,
            blocks: (1..=n).map(|e| vec![e]).collect(),
        }
    }

    /// The one-block partition (the lattice maximum).
    pub fn full(n: usize) -> Partition {
        Partition {
            n,
            blocks: vec![(1..=n).collect()],
        }
    }

    pub fn ground_size(&self) -> usize {
        self.n
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    /// `#pi`, the number of blocks.
    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_perfect_matching(&self) -> bool {
        self.blocks.iter().all(|b| b.len() == 2)
    }

    pub fn all_blocks_even(&self) -> bool {
        self.blocks.iter().all(|b| b.len() % 2 == 0)
    }

    /// One 4-element block and all other blocks of size 2.
    pub fn is_four_two(&self) -> bool {
        let fours = self.blocks.iter().filter(|b| b.len() == 4).count();
        let twos = self.blocks.iter().filter(|b| b.len() == 2).count();
        fours == 1 && fours + twos == self.blocks.len()
    }

    /// True when every block of `self` lies inside a block of `other`.
    pub fn is_refinement_of(&self, other: &Partition) -> bool {
        if self.n != other.n {
            return false;
        }
        let labels = other.labels();
        self.blocks
            .iter()
            .all(|b| b.iter().all(|&e| labels[e] == labels[b[0]]))
    }

    /// Block label of each element, indexed `1..=n` (entry 0 unused).
    pub(crate) fn labels(&self) -> Vec<usize> {
        let mut labels = vec![0; self.n + 1];
        for (bi, b) in self.blocks.iter().enumerate() {
            for &e in b {
                labels[e] = bi;
            }
        }
        labels
    }

    /// A word (one value per ground-set position) is measurable when it is
    /// constant on every block.
    pub fn is_measurable_word(&self, word: &[usize]) -> bool {
        word.len() == self.n
            && self
                .blocks
                .iter()
                .all(|b| b.iter().all(|&e| word[e - 1] == word[b[0] - 1]))
    }

    /// Least upper bound in the refinement order: connected components of
    /// the union of the two block structures.
    pub fn join(&self, other: &Partition) -> Result<Partition> {
        if self.n != other.n {
            return Err(Error::invalid(
                "partition",
                format!("ground sets differ: {} vs {}", self.n, other.n),
            ));
        }
        let mut uf = UnionFind::new(self.n);
        for part in [self, other] {
            for b in &part.blocks {
                for &e in &b[1..] {
                    uf.union(b[0], e);
                }
            }
        }
        let mut groups: Vec<Vec<usize>> = vec![Vec::new(); self.n + 1];
        for e in 1..=self.n {
            groups[uf.find(e)].push(e);
        }
        let mut blocks: Vec<Vec<usize>> = groups.into_iter().filter(|g| !g.is_empty()).collect();
        blocks.sort_by_key(|b| b[0]);
        Ok(Partition { n: self.n, blocks })
    }
}

impl std::fmt::Display for Partition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{{")?;
        for (i, b) in self.blocks.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{{")?;
            for (j, e) in b.iter().enumerate() {
                if j > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{e}")?;
            }
            write!(f, "}}")?;
        }
        write!(f, "}}")
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..=n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra] = rb;
        }
    }
}

/// All partitions of `{1, ..., n}` in canonical order, generated from
/// restricted growth strings. `1 <= n <= 10`.
pub fn partitions(n: usize) -> Result<PartitionIter> {
    if n == 0 || n > MAX_GROUND_SET {
        return Err(Error::invalid(
            "n",
            format!("{n} not in 1..={MAX_GROUND_SET}"),
        ));
    }
    Ok(PartitionIter {
        n,
        rgs: vec![0; n],
        max: vec![0; n],
        done: false,
    })
}

pub struct PartitionIter {
    n: usize,
    rgs: Vec<usize>,
    max: Vec<usize>, // max[i] = 1 + max(rgs[..i])
    done: bool,
}

impl Iterator for PartitionIter {
    type Item = Partition;

    fn next(&mut self) -> Option<Partition> {
        if self.done {
            return None;
        }
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        for (i, &label) in self.rgs.iter().enumerate() {
            if label == blocks.len() {
                blocks.push(Vec::new());
            }
            blocks[label].push(i + 1);
        }
        let out = Partition { n: self.n, blocks };
        // advance the restricted growth string
        let mut i = self.n;
        loop {
            if i == 1 {
                self.done = true;
                break;
            }
            i -= 1;
            if self.rgs[i] <= self.max[i] {
                self.rgs[i] += 1;
                let m = self.max[i].max(self.rgs[i]);
                for j in (i + 1)..self.n {
                    self.rgs[j] = 0;
                    self.max[j] = m;
                }
                break;
            }
        }
        Some(out)
    }
}

/// Perfect matchings of `{1, ..., n}` (n even), generated directly by
/// pairing the smallest free element with each remaining candidate.
pub fn perfect_matchings(n: usize) -> Result<Vec<Partition>> {
    if n == 0 || n > MAX_GROUND_SET {
        return Err(Error::invalid(
            "n",
            format!("{n} not in 1..={MAX_GROUND_SET}"),
        ));
    }
    if n % 2 != 0 {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    let mut free: Vec<usize> = (1..=n).collect();
    let mut current: Vec<Vec<usize>> = Vec::new();
    fn rec(
        free: &mut Vec<usize>,
        current: &mut Vec<Vec<usize>>,
        out: &mut Vec<Partition>,
        n: usize,
    ) {
        if free.is_empty() {
            out.push(Partition::from_blocks(n, current).unwrap());
            return;
        }
        let a = free[0];
        for idx in 1..free.len() {
            let b = free[idx];
            let mut rest: Vec<usize> = free.clone();
            rest.remove(idx);
            rest.remove(0);
            current.push(vec![a, b]);
            rec(&mut rest, current, out, n);
            current.pop();
        }
    }
    rec(&mut free, &mut current, &mut out, n);
    Ok(out)
}

/// Partitions of `{1, ..., n}` with every block of even size.
pub fn even_partitions(n: usize) -> Result<Vec<Partition>> {
    Ok(partitions(n)?.filter(|p| p.all_blocks_even()).collect())
}

/// Partitions with exactly one 4-element block and (n-4)/2 pair blocks.
pub fn four_two_partitions(n: usize) -> Result<Vec<Partition>> {
    Ok(partitions(n)?.filter(|p| p.is_four_two()).collect())
}

pub fn bell_number(n: usize) -> u64 {
    // Bell triangle; B_n is the last entry of the n-th row
    let mut row = vec![1u64];
    for _ in 1..n {
        let mut next = vec![*row.last().unwrap()];
        for &v in &row {
            next.push(next.last().unwrap() + v);
        }
        row = next;
    }
    *row.last().unwrap()
}
