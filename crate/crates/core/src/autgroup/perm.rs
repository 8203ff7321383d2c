//! Permutations and a deterministic Schreier-Sims stabilizer chain.
//!
//! Permutations act on the right: `x^(gh) = (x^g)^h`, and `p.image(x)` is `x^p`.

use std::collections::BTreeMap;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm(Vec<u16>);

impl Perm {
    pub fn identity(n: usize) -> Self {
        Perm((0..n as u16).collect())
    }

    /// `images[x]` is the image of `x`. Panics if `images` is not a bijection.
    pub fn from_images(images: Vec<usize>) -> Self {
        let n = images.len();
        let mut seen = vec![false; n];
        for &y in &images {
            assert!(y < n && !seen[y], "not a permutation");
            seen[y] = true;
        }
        Perm(images.into_iter().map(|y| y as u16).collect())
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    #[inline]
    pub fn image(&self, x: usize) -> usize {
        self.0[x] as usize
    }

    pub fn images(&self) -> Vec<usize> {
        self.0.iter().map(|&y| y as usize).collect()
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(x, &y)| x == y as usize)
    }

    /// `self` then `other`.
    pub fn then(&self, other: &Perm) -> Perm {
        Perm(self.0.iter().map(|&y| other.0[y as usize]).collect())
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0u16; self.0.len()];
        for (x, &y) in self.0.iter().enumerate() {
            inv[y as usize] = x as u16;
        }
        Perm(inv)
    }

    pub fn first_moved(&self) -> Option<usize> {
        self.0.iter().enumerate().position(|(x, &y)| x != y as usize)
    }

    pub fn fixes_all(&self, points: &[usize]) -> bool {
        points.iter().all(|&b| self.image(b) == b)
    }
}

impl std::fmt::Debug for Perm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Perm{:?}", self.0)
    }
}

/// Orbit partition of `0..n` under `gens`, as a representative per point
/// (the smallest point of its orbit).
pub fn orbit_representatives(n: usize, gens: &[Perm]) -> Vec<usize> {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for g in gens {
        for x in 0..n {
            let (a, b) = (find(&mut parent, x), find(&mut parent, g.image(x)));
            if a != b {
                let (lo, hi) = if a < b { (a, b) } else { (b, a) };
                parent[hi] = lo;
            }
        }
    }
    (0..n).map(|x| find(&mut parent, x)).collect()
}

struct Level {
    point: usize,
    gens: Vec<Perm>,
    /// orbit point -> transversal element mapping `point` to it
    transversal: BTreeMap<usize, Perm>,
}

impl Level {
    fn new(point: usize, n: usize) -> Self {
        let mut transversal = BTreeMap::new();
        transversal.insert(point, Perm::identity(n));
        Level {
            point,
            gens: Vec::new(),
            transversal,
        }
    }

    fn rebuild_orbit(&mut self) {
        let n = self.transversal[&self.point].degree();
        let mut transversal = BTreeMap::new();
        transversal.insert(self.point, Perm::identity(n));
        let mut queue = vec![self.point];
        while let Some(beta) = queue.pop() {
            let u = transversal[&beta].clone();
            for g in &self.gens {
                let gamma = g.image(beta);
                if let std::collections::btree_map::Entry::Vacant(e) = transversal.entry(gamma) {
                    e.insert(u.then(g));
                    queue.push(gamma);
                }
            }
        }
        self.transversal = transversal;
    }
}

/// Base and strong generating set of a permutation group.
pub struct StabChain {
    n: usize,
    levels: Vec<Level>,
}

impl StabChain {
    /// Runs Schreier-Sims on `gens`, using `base_prefix` as the start of the base.
    pub fn new(n: usize, gens: &[Perm], base_prefix: &[usize]) -> Self {
        let gens: Vec<Perm> = gens.iter().filter(|g| !g.is_identity()).cloned().collect();
        let mut base: Vec<usize> = base_prefix.to_vec();
        for g in &gens {
            if g.fixes_all(&base) {
                base.push(g.first_moved().expect("non-identity"));
            }
        }
        let mut levels: Vec<Level> = base.iter().map(|&b| Level::new(b, n)).collect();
        for (i, level) in levels.iter_mut().enumerate() {
            level.gens = gens
                .iter()
                .filter(|g| g.fixes_all(&base[..i]))
                .cloned()
                .collect();
            level.rebuild_orbit();
        }
        let mut chain = StabChain { n, levels };
        chain.complete();
        chain
    }

    fn strip(&self, mut g: Perm, from: usize) -> (Perm, usize) {
        for j in from..self.levels.len() {
            let beta = g.image(self.levels[j].point);
            match self.levels[j].transversal.get(&beta) {
                Some(u) => g = g.then(&u.inverse()),
                None => return (g, j),
            }
        }
        let len = self.levels.len();
        (g, len)
    }

    fn complete(&mut self) {
        let mut i = self.levels.len() as isize - 1;
        while i >= 0 {
            let iu = i as usize;
            let mut restart = None;
            'scan: for (beta, u) in self.levels[iu].transversal.clone() {
                for x in self.levels[iu].gens.clone() {
                    let gamma = x.image(beta);
                    let h = u.then(&x).then(&self.levels[iu].transversal[&gamma].inverse());
                    if h.is_identity() {
                        continue;
                    }
                    let (residue, j) = self.strip(h, iu + 1);
                    if j < self.levels.len() || !residue.is_identity() {
                        if j == self.levels.len() {
                            let p = residue.first_moved().expect("non-identity");
                            self.levels.push(Level::new(p, self.n));
                        }
                        for l in iu + 1..=j {
                            self.levels[l].gens.push(residue.clone());
                            self.levels[l].rebuild_orbit();
                        }
                        restart = Some(j);
                        break 'scan;
                    }
                }
            }
            match restart {
                Some(j) => i = j as isize,
                None => i -= 1,
            }
        }
    }

    pub fn base(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.point).collect()
    }

    /// Product of the basic orbit lengths.
    pub fn order(&self) -> u128 {
        self.levels
            .iter()
            .map(|l| l.transversal.len() as u128)
            .product()
    }

    /// Generators of the pointwise stabilizer of the first `depth` base points.
    pub fn stabilizer_gens(&self, depth: usize) -> Vec<Perm> {
        if depth < self.levels.len() {
            self.levels[depth].gens.clone()
        } else {
            Vec::new()
        }
    }

    pub fn strong_generators(&self) -> Vec<Perm> {
        self.levels.first().map(|l| l.gens.clone()).unwrap_or_default()
    }

    /// Membership test by sifting.
    pub fn contains(&self, g: &Perm) -> bool {
        let (residue, j) = self.strip(g.clone(), 0);
        j == self.levels.len() && residue.is_identity()
    }
}
