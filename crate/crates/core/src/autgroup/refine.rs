//! Ordered partitions of a vertex-colored graph and equitable refinement.

use std::collections::VecDeque;

pub(crate) const WORDS: usize = 4;
/// Largest vertex count the dense adjacency supports.
pub const MAX_VERTICES: usize = WORDS * 64;

pub(crate) type Bits = [u64; WORDS];

#[inline]
pub(crate) fn set_bit(bits: &mut Bits, x: usize) {
    bits[x >> 6] |= 1 << (x & 63);
}

#[inline]
pub(crate) fn test_bit(bits: &Bits, x: usize) -> bool {
    bits[x >> 6] >> (x & 63) & 1 == 1
}

#[inline]
fn meet_count(a: &Bits, b: &Bits) -> u32 {
    (a[0] & b[0]).count_ones()
        + (a[1] & b[1]).count_ones()
        + (a[2] & b[2]).count_ones()
        + (a[3] & b[3]).count_ones()
}

/// Dense undirected graph with an initial vertex coloring.
#[derive(Clone, Debug)]
pub struct ColoredGraph {
    pub(crate) adj: Vec<Bits>,
    /// Color of each vertex; cells of the initial partition are ordered by color.
    pub(crate) colors: Vec<u32>,
}

impl ColoredGraph {
    pub fn new(n: usize, colors: Vec<u32>) -> Self {
        assert!(n <= MAX_VERTICES, "graph has {n} vertices, limit is {MAX_VERTICES}");
        assert_eq!(colors.len(), n);
        ColoredGraph {
            adj: vec![[0; WORDS]; n],
            colors,
        }
    }

    pub fn add_edge(&mut self, a: usize, b: usize) {
        set_bit(&mut self.adj[a], b);
        set_bit(&mut self.adj[b], a);
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        test_bit(&self.adj[a], b)
    }

    pub fn len(&self) -> usize {
        self.adj.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adj.is_empty()
    }

    pub fn degree(&self, x: usize) -> u32 {
        self.adj[x].iter().map(|w| w.count_ones()).sum()
    }

    pub fn edge_count(&self) -> usize {
        (0..self.len()).map(|x| self.degree(x) as usize).sum::<usize>() / 2
    }
}

/// Ordered partition: `lab` lists vertices, cells are contiguous ranges.
#[derive(Clone, Debug)]
pub(crate) struct Partition {
    pub lab: Vec<usize>,
    /// `(start, end)` of every cell, in order.
    pub cells: Vec<(usize, usize)>,
}

impl Partition {
    pub fn by_color(g: &ColoredGraph) -> Self {
        let mut lab: Vec<usize> = (0..g.len()).collect();
        lab.sort_by_key(|&x| (g.colors[x], x));
        let mut cells = Vec::new();
        let mut s = 0;
        for e in 1..=lab.len() {
            if e == lab.len() || g.colors[lab[e]] != g.colors[lab[s]] {
                cells.push((s, e));
                s = e;
            }
        }
        Partition { lab, cells }
    }

    pub fn is_discrete(&self) -> bool {
        self.cells.len() == self.lab.len()
    }

    /// First largest non-singleton cell, as an index into `cells`.
    pub fn target_cell(&self) -> Option<usize> {
        let mut best: Option<(usize, usize)> = None;
        for (i, &(s, e)) in self.cells.iter().enumerate() {
            let len = e - s;
            if len > 1 && best.is_none_or(|(_, bl)| len > bl) {
                best = Some((i, len));
            }
        }
        best.map(|(i, _)| i)
    }

    pub fn cell_vertices(&self, idx: usize) -> &[usize] {
        let (s, e) = self.cells[idx];
        &self.lab[s..e]
    }

    /// Splits `x` off the front of cell `idx` and refines.
    pub fn individualize(&mut self, g: &ColoredGraph, idx: usize, x: usize) {
        let (s, e) = self.cells[idx];
        let pos = (s..e).find(|&p| self.lab[p] == x).expect("vertex in cell");
        self.lab.swap(s, pos);
        self.lab[s + 1..e].sort_unstable();
        self.cells[idx] = (s, s + 1);
        self.cells.insert(idx + 1, (s + 1, e));
        self.refine(g, vec![s]);
    }

    /// Refines to the coarsest equitable partition finer than the current
    /// one, using the cells starting at `splitters` as initial splitters.
    pub fn refine(&mut self, g: &ColoredGraph, splitters: Vec<usize>) {
        let n = self.lab.len();
        let mut queued = vec![false; n];
        let mut queue: VecDeque<usize> = VecDeque::new();
        for s in splitters {
            if !queued[s] {
                queued[s] = true;
                queue.push_back(s);
            }
        }
        let mut counts = vec![0u32; n];
        while let Some(ws) = queue.pop_front() {
            queued[ws] = false;
            let Some(wi) = self.cells.iter().position(|&(s, _)| s == ws) else {
                continue;
            };
            let (s0, e0) = self.cells[wi];
            let mut wset: Bits = [0; WORDS];
            for &x in &self.lab[s0..e0] {
                set_bit(&mut wset, x);
            }
            let mut idx = 0;
            while idx < self.cells.len() {
                let (s, e) = self.cells[idx];
                if e - s == 1 {
                    idx += 1;
                    continue;
                }
                let mut uniform = true;
                let first = meet_count(&g.adj[self.lab[s]], &wset);
                for p in s..e {
                    let x = self.lab[p];
                    counts[x] = meet_count(&g.adj[x], &wset);
                    uniform &= counts[x] == first;
                }
                if uniform {
                    idx += 1;
                    continue;
                }
                self.lab[s..e].sort_unstable_by_key(|&x| (counts[x], x));
                let mut pieces = Vec::new();
                let mut ps = s;
                for p in s + 1..=e {
                    if p == e || counts[self.lab[p]] != counts[self.lab[ps]] {
                        pieces.push((ps, p));
                        ps = p;
                    }
                }
                let np = pieces.len();
                self.cells.splice(idx..idx + 1, pieces.iter().copied());
                for &(ps, _) in &pieces {
                    if !queued[ps] {
                        queued[ps] = true;
                        queue.push_back(ps);
                    }
                }
                idx += np;
            }
        }
    }

    /// Label-independent description of the partition: cell sizes followed
    /// by the cell-to-cell neighbor counts of the (equitable) quotient.
    pub fn quotient(&self, g: &ColoredGraph) -> Vec<u32> {
        let m = self.cells.len();
        let mut masks: Vec<Bits> = vec![[0; WORDS]; m];
        for (i, &(s, e)) in self.cells.iter().enumerate() {
            for &x in &self.lab[s..e] {
                set_bit(&mut masks[i], x);
            }
        }
        let mut out = Vec::with_capacity(m + m * m);
        out.extend(self.cells.iter().map(|&(s, e)| (e - s) as u32));
        for &(s, _) in &self.cells {
            let rep = &g.adj[self.lab[s]];
            out.extend(masks.iter().map(|mask| meet_count(rep, mask)));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(n: usize) -> ColoredGraph {
        let mut g = ColoredGraph::new(n, vec![0; n]);
        for i in 0..n - 1 {
            g.add_edge(i, i + 1);
        }
        g
    }

    #[test]
    fn path_refines_by_distance_to_ends() {
        let g = path(5);
        let mut p = Partition::by_color(&g);
        p.refine(&g, vec![0]);
        let cells: Vec<Vec<usize>> = (0..p.cells.len())
            .map(|i| {
                let mut c = p.cell_vertices(i).to_vec();
                c.sort();
                c
            })
            .collect();
        assert_eq!(cells, vec![vec![0, 4], vec![2], vec![1, 3]]);
        assert_eq!(p.target_cell(), Some(0));
        p.individualize(&g, 0, 4);
        assert!(p.is_discrete());
        assert_eq!(p.lab[..2], [4, 0]);
    }

    #[test]
    fn quotient_is_label_independent() {
        let g = path(6);
        let mut relabeled = ColoredGraph::new(6, vec![0; 6]);
        let perm = [3, 5, 0, 1, 4, 2];
        for i in 0..5 {
            relabeled.add_edge(perm[i], perm[i + 1]);
        }
        let mut a = Partition::by_color(&g);
        a.refine(&g, vec![0]);
        let mut b = Partition::by_color(&relabeled);
        b.refine(&relabeled, vec![0]);
        assert_eq!(a.quotient(&g), b.quotient(&relabeled));
    }
}
