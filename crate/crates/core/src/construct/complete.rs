//! Depth-first completion of a partial matrix over the 2-space.
//!
//! Each free row keeps a domain of candidate words. Placing a row filters
//! every other domain to candidates meeting it in two points and avoiding
//! full columns; a column whose remaining budget cannot be met by the rows
//! that may still use it (or is overrun by the rows that must) prunes the
//! node.

use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bitrow::BitRow;
use crate::matrix::IncidenceMatrix;
use crate::partial::PartialMatrix;
use crate::twospace::TwoSpace;

/// Which free row is extended next.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RowOrder {
    /// Increasing row index.
    Index,
    /// Smallest remaining domain, ties by row index.
    #[default]
    FailFirst,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchConfig {
    /// Stop after this many search nodes.
    pub node_budget: Option<u64>,
    /// Stop after this many completions.
    pub max_solutions: Option<u64>,
    /// Worker threads; `0` uses the rayon default.
    pub threads: usize,
    pub row_order: RowOrder,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            node_budget: None,
            max_solutions: None,
            threads: 1,
            row_order: RowOrder::FailFirst,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompletionStats {
    pub nodes: u64,
    /// Placements rejected by forward checking or the column bounds.
    pub prunes: u64,
    pub solutions: u64,
    pub elapsed_ms: u64,
    /// False when a budget stopped the search early.
    pub exhaustive: bool,
}

struct Shared {
    nodes: AtomicU64,
    solutions: AtomicU64,
    stop: AtomicBool,
    budget_hit: AtomicBool,
    node_budget: Option<u64>,
    max_solutions: Option<u64>,
}

struct Engine<'a> {
    pm: &'a PartialMatrix,
    order: RowOrder,
    rows: Vec<u128>,
    remaining: Vec<u32>,
    shared: &'a Shared,
    prunes: u64,
    sink: &'a mut dyn FnMut(IncidenceMatrix),
}

type Domains = Vec<(usize, Vec<u128>)>;

/// Column bounds over the free rows.
fn columns_feasible(remaining: &[u32], free: &Domains) -> bool {
    let v = remaining.len();
    let mut may = vec![0u32; v];
    let mut must = vec![0u32; v];
    for (_, dom) in free {
        let (mut o, mut a) = dom.iter().fold((0u128, !0u128), |(o, a), &w| (o | w, a & w));
        while o != 0 {
            may[o.trailing_zeros() as usize] += 1;
            o &= o - 1;
        }
        while a != 0 {
            must[a.trailing_zeros() as usize] += 1;
            a &= a - 1;
        }
    }
    (0..v).all(|c| may[c] >= remaining[c] && must[c] <= remaining[c])
}

fn pick(order: RowOrder, free: &Domains) -> usize {
    match order {
        RowOrder::Index => 0,
        RowOrder::FailFirst => {
            let mut best = 0;
            for (idx, (_, dom)) in free.iter().enumerate() {
                if dom.len() < free[best].1.len() {
                    best = idx;
                }
            }
            best
        }
    }
}

impl Engine<'_> {
    fn full_mask(&self) -> u128 {
        self.remaining
            .iter()
            .enumerate()
            .filter(|(_, &r)| r == 0)
            .fold(0u128, |m, (c, _)| m | 1 << c)
    }

    fn leaf(&mut self) {
        let p = self.pm.params();
        let rows = self
            .rows
            .iter()
            .map(|&w| BitRow::from_word(p.v, w))
            .collect();
        let m = IncidenceMatrix::new(p, rows).expect("square matrix");
        debug_assert!(m.is_biplane());
        if m.verify().is_err() {
            return;
        }
        let n = self.shared.solutions.fetch_add(1, Ordering::Relaxed) + 1;
        if self.shared.max_solutions.is_some_and(|max| n >= max) {
            self.shared.stop.store(true, Ordering::Relaxed);
            self.shared.budget_hit.store(true, Ordering::Relaxed);
        }
        (self.sink)(m);
    }

    /// Places `word` in `row` and filters the other domains.
    fn place(&mut self, row: usize, word: u128, rest: &Domains) -> Option<Domains> {
        self.rows[row] = word;
        let mut w = word;
        while w != 0 {
            self.remaining[w.trailing_zeros() as usize] -= 1;
            w &= w - 1;
        }
        let full = self.full_mask();
        let mut next = Vec::with_capacity(rest.len());
        for (r, dom) in rest {
            let d: Vec<u128> = dom
                .iter()
                .copied()
                .filter(|&c| (c & word).count_ones() == 2 && c & full == 0)
                .collect();
            if d.is_empty() {
                return None;
            }
            next.push((*r, d));
        }
        columns_feasible(&self.remaining, &next).then_some(next)
    }

    fn unplace(&mut self, word: u128) {
        let mut w = word;
        while w != 0 {
            self.remaining[w.trailing_zeros() as usize] += 1;
            w &= w - 1;
        }
    }

    fn dfs(&mut self, free: Domains) {
        if self.shared.stop.load(Ordering::Relaxed) {
            return;
        }
        let n = self.shared.nodes.fetch_add(1, Ordering::Relaxed) + 1;
        if self.shared.node_budget.is_some_and(|b| n > b) {
            self.shared.stop.store(true, Ordering::Relaxed);
            self.shared.budget_hit.store(true, Ordering::Relaxed);
            return;
        }
        if free.is_empty() {
            self.leaf();
            return;
        }
        let idx = pick(self.order, &free);
        let mut rest = free;
        let (row, dom) = rest.remove(idx);
        for word in dom {
            match self.place(row, word, &rest) {
                Some(next) => self.dfs(next),
                None => self.prunes += 1,
            }
            self.unplace(word);
            if self.shared.stop.load(Ordering::Relaxed) {
                return;
            }
        }
    }
}

/// Initial domains: each free row's subset narrowed by its cell
/// constraints, full columns and the rows fixed so far.
pub fn initial_domains(pm: &PartialMatrix, space: &TwoSpace) -> Vec<(usize, Vec<u128>)> {
    let full = pm.exhausted_columns().word();
    pm.free_rows()
        .into_iter()
        .map(|r| {
            let c = pm.constraint(r);
            let dom = space
                .subset(r)
                .iter()
                .filter(|b| c.allows(b))
                .filter(|b| pm.fixed_rows().values().all(|f| f.dot(b) == 2))
                .map(|b| b.word())
                .filter(|w| w & full == 0)
                .collect();
            (r, dom)
        })
        .collect()
}

/// Runs the completion search and hands every completion to a per-task
/// accumulator. With more than one thread the candidates of the first
/// branching row are split into independent tasks; the accumulators come
/// back in candidate order, so the result does not depend on scheduling.
pub fn complete_with<T, I, S>(
    pm: &PartialMatrix,
    space: &TwoSpace,
    config: &SearchConfig,
    init: I,
    sink: S,
) -> (Vec<T>, CompletionStats)
where
    T: Send,
    I: Fn() -> T + Sync,
    S: Fn(&mut T, IncidenceMatrix) + Sync,
{
    let start = Instant::now();
    let shared = Shared {
        nodes: AtomicU64::new(0),
        solutions: AtomicU64::new(0),
        stop: AtomicBool::new(false),
        budget_hit: AtomicBool::new(false),
        node_budget: config.node_budget,
        max_solutions: config.max_solutions,
    };
    let p = pm.params();
    let mut rows = vec![0u128; p.v];
    for (&r, row) in pm.fixed_rows() {
        rows[r] = row.word();
    }
    let remaining = pm.col_remaining().to_vec();
    let domains = initial_domains(pm, space);

    let run_task = |word: Option<(usize, u128, &Domains)>, free: Option<Domains>| {
        let mut acc = init();
        let mut f = |m| sink(&mut acc, m);
        let mut e = Engine {
            pm,
            order: config.row_order,
            rows: rows.clone(),
            remaining: remaining.clone(),
            shared: &shared,
            prunes: 0,
            sink: &mut f,
        };
        match (word, free) {
            (Some((row, w, rest)), _) => match e.place(row, w, rest) {
                Some(next) => e.dfs(next),
                None => e.prunes += 1,
            },
            (None, Some(free)) => e.dfs(free),
            (None, None) => {}
        }
        let pr = e.prunes;
        (acc, pr)
    };

    let feasible =
        domains.iter().all(|(_, d)| !d.is_empty()) && columns_feasible(&remaining, &domains);
    let results = if !feasible {
        Vec::new()
    } else if config.threads == 1 || domains.is_empty() {
        vec![run_task(None, Some(domains))]
    } else {
        shared.nodes.fetch_add(1, Ordering::Relaxed);
        let idx = pick(config.row_order, &domains);
        let mut rest = domains;
        let (row, dom) = rest.remove(idx);
        let run = || {
            dom.par_iter()
                .map(|&w| run_task(Some((row, w, &rest)), None))
                .collect::<Vec<_>>()
        };
        if config.threads == 0 {
            run()
        } else {
            rayon::ThreadPoolBuilder::new()
                .num_threads(config.threads)
                .build()
                .expect("thread pool")
                .install(run)
        }
    };
    let prunes = results.iter().map(|(_, p)| p).sum();
    let accs: Vec<T> = results.into_iter().map(|(a, _)| a).collect();
    let stats = CompletionStats {
        nodes: shared.nodes.load(Ordering::Relaxed),
        prunes,
        solutions: shared.solutions.load(Ordering::Relaxed),
        elapsed_ms: start.elapsed().as_millis() as u64,
        exhaustive: !shared.budget_hit.load(Ordering::Relaxed),
    };
    (accs, stats)
}

/// Collects every completion.
pub fn complete(
    pm: &PartialMatrix,
    space: &TwoSpace,
    config: &SearchConfig,
) -> (Vec<IncidenceMatrix>, CompletionStats) {
    let (accs, stats) = complete_with(pm, space, config, Vec::new, |acc, m| acc.push(m));
    (accs.into_iter().flatten().collect(), stats)
}
