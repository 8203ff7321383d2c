//! Individualization-refinement search: automorphism generators along the
//! first path, then the minimum leaf under invariant and orbit pruning.

use std::cmp::Ordering;

use super::perm::{orbit_representatives, Perm, StabChain};
use super::refine::{set_bit, test_bit, Bits, ColoredGraph, Partition, WORDS};

/// Statistics of one search.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub nodes: u64,
    pub leaves: u64,
}

/// Result of a full search on one graph.
#[derive(Clone, Debug)]
pub struct Labeling {
    /// `lab[p]` is the vertex placed at canonical position `p`.
    pub lab: Vec<usize>,
    /// Relabeled adjacency: row `p` lists the canonical positions adjacent to `p`.
    pub graph: Vec<Bits>,
    pub generators: Vec<Perm>,
    pub group_order: u128,
    pub stats: SearchStats,
}

fn fnv(words: &[u32]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &w in words {
        for b in w.to_le_bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x0100_0000_01b3);
        }
    }
    h
}

struct Node {
    part: Partition,
    inv: u64,
}

struct Searcher<'a> {
    g: &'a ColoredGraph,
    stats: SearchStats,
}

impl<'a> Searcher<'a> {
    fn node(&mut self, part: Partition) -> Node {
        self.stats.nodes += 1;
        let inv = fnv(&part.quotient(self.g));
        Node { part, inv }
    }

    fn root(&mut self) -> Node {
        let mut part = Partition::by_color(self.g);
        let starts = part.cells.iter().map(|&(s, _)| s).collect();
        part.refine(self.g, starts);
        self.node(part)
    }

    fn child(&mut self, parent: &Partition, cell: usize, x: usize) -> Node {
        let mut part = parent.clone();
        part.individualize(self.g, cell, x);
        self.node(part)
    }

    fn leaf_graph(&mut self, lab: &[usize]) -> Vec<Bits> {
        self.stats.leaves += 1;
        let n = lab.len();
        let mut pos = vec![0usize; n];
        for (p, &x) in lab.iter().enumerate() {
            pos[x] = p;
        }
        lab.iter()
            .map(|&x| {
                let mut row = [0u64; WORDS];
                for y in 0..n {
                    if test_bit(&self.g.adj[x], y) {
                        set_bit(&mut row, pos[y]);
                    }
                }
                row
            })
            .collect()
    }

    /// Looks below `node` (at `depth`, with individualized `prefix`) for a
    /// leaf whose graph equals `target`; prunes on invariants of `path`.
    fn find_equivalent(
        &mut self,
        node: &Node,
        prefix: &mut Vec<usize>,
        path: &[u64],
        target: &[Bits],
        gens: &[Perm],
    ) -> Option<Vec<usize>> {
        let depth = prefix.len();
        if path.get(depth) != Some(&node.inv) {
            return None;
        }
        if node.part.is_discrete() {
            return (self.leaf_graph(&node.part.lab) == target).then(|| node.part.lab.clone());
        }
        let cell = node.part.target_cell()?;
        let fixing: Vec<Perm> = gens.iter().filter(|g| g.fixes_all(prefix)).cloned().collect();
        let reps = orbit_representatives(self.g.len(), &fixing);
        let mut cands: Vec<usize> = node.part.cell_vertices(cell).to_vec();
        cands.sort_unstable();
        for x in cands {
            if reps[x] != x {
                continue;
            }
            let child = self.child(&node.part, cell, x);
            prefix.push(x);
            let found = self.find_equivalent(&child, prefix, path, target, gens);
            prefix.pop();
            if found.is_some() {
                return found;
            }
        }
        None
    }

    /// Automorphism group from the first path: for every level, bottom-up,
    /// every target-cell vertex outside the known orbit is tested.
    fn automorphisms(&mut self) -> (Vec<Perm>, u128) {
        let n = self.g.len();
        let mut path_nodes = vec![self.root()];
        let mut path_vertices = Vec::new();
        while let Some(cell) = path_nodes.last().unwrap().part.target_cell() {
            let last = path_nodes.last().unwrap();
            let x = last.part.cell_vertices(cell)[0];
            let parent = last.part.clone();
            path_nodes.push(self.child(&parent, cell, x));
            path_vertices.push(x);
        }
        let invs: Vec<u64> = path_nodes.iter().map(|nd| nd.inv).collect();
        let first_lab = path_nodes.last().unwrap().part.lab.clone();
        let first_leaf = self.leaf_graph(&first_lab);

        let mut gens: Vec<Perm> = Vec::new();
        let mut order: u128 = 1;
        for d in (0..path_vertices.len()).rev() {
            let node = &path_nodes[d];
            let cell = node.part.target_cell().expect("non-discrete path node");
            let f = path_vertices[d];
            let mut cands: Vec<usize> = node.part.cell_vertices(cell).to_vec();
            cands.sort_unstable();
            let prefix = &path_vertices[..d];
            // a vertex equivalent to one that failed fails as well
            let mut failed: Vec<usize> = Vec::new();
            for &x in &cands {
                if x == f {
                    continue;
                }
                let fixing: Vec<Perm> =
                    gens.iter().filter(|g| g.fixes_all(prefix)).cloned().collect();
                let reps = orbit_representatives(n, &fixing);
                if reps[x] == reps[f] || failed.iter().any(|&y| reps[y] == reps[x]) {
                    continue;
                }
                let child = self.child(&node.part, cell, x);
                let mut pre = prefix.to_vec();
                pre.push(x);
                if let Some(lab) = self.find_equivalent(&child, &mut pre, &invs, &first_leaf, &gens)
                {
                    let mut img = vec![0usize; n];
                    for (p, &y) in first_lab.iter().enumerate() {
                        img[y] = lab[p];
                    }
                    gens.push(Perm::from_images(img));
                } else {
                    failed.push(x);
                }
            }
            let fixing: Vec<Perm> = gens.iter().filter(|g| g.fixes_all(prefix)).cloned().collect();
            let reps = orbit_representatives(n, &fixing);
            order *= cands.iter().filter(|&&x| reps[x] == reps[f]).count() as u128;
        }
        (gens, order)
    }

    fn canonical(
        &mut self,
        node: Node,
        prefix: &mut Vec<usize>,
        invs: &mut Vec<u64>,
        gens: &[Perm],
        best: &mut Option<(Vec<u64>, Vec<Bits>, Vec<usize>)>,
    ) {
        invs.push(node.inv);
        if let Some((binv, _, _)) = best.as_ref() {
            let m = invs.len().min(binv.len());
            match invs[..m].cmp(&binv[..m]) {
                Ordering::Greater => {
                    invs.pop();
                    return;
                }
                Ordering::Equal if invs.len() > binv.len() => {
                    invs.pop();
                    return;
                }
                _ => {}
            }
        }
        if node.part.is_discrete() {
            let leaf = self.leaf_graph(&node.part.lab);
            let better = match best.as_ref() {
                None => true,
                Some((binv, bleaf, _)) => (&invs[..], &leaf[..]) < (&binv[..], &bleaf[..]),
            };
            if better {
                *best = Some((invs.clone(), leaf, node.part.lab.clone()));
            }
            invs.pop();
            return;
        }
        let cell = node.part.target_cell().expect("non-discrete node");
        let n = self.g.len();
        let reps = if gens.is_empty() {
            (0..n).collect()
        } else {
            let chain = StabChain::new(n, gens, prefix);
            orbit_representatives(n, &chain.stabilizer_gens(prefix.len()))
        };
        let mut cands: Vec<usize> = node.part.cell_vertices(cell).to_vec();
        cands.sort_unstable();
        for x in cands {
            if reps[x] != x {
                continue;
            }
            let child = self.child(&node.part, cell, x);
            prefix.push(x);
            self.canonical(child, prefix, invs, gens, best);
            prefix.pop();
        }
        invs.pop();
    }
}

/// Runs the full search: automorphism generators, group order and the
/// canonical labeling.
pub fn search(g: &ColoredGraph) -> Labeling {
    let mut s = Searcher {
        g,
        stats: SearchStats::default(),
    };
    let (generators, group_order) = s.automorphisms();
    let chain = StabChain::new(g.len(), &generators, &[]);
    assert_eq!(chain.order(), group_order, "orbit product disagrees with Schreier-Sims");
    let root = s.root();
    let mut best = None;
    s.canonical(root, &mut Vec::new(), &mut Vec::new(), &generators, &mut best);
    let (_, graph, lab) = best.expect("search reaches a leaf");
    Labeling {
        lab,
        graph,
        generators,
        group_order,
        stats: s.stats,
    }
}

/// True if `p` maps the colored graph onto itself.
pub fn is_automorphism(g: &ColoredGraph, p: &Perm) -> bool {
    let n = g.len();
    p.degree() == n
        && (0..n).all(|x| g.colors[x] == g.colors[p.image(x)])
        && (0..n).all(|x| {
            (0..n).all(|y| g.has_edge(x, y) == g.has_edge(p.image(x), p.image(y)))
        })
}
