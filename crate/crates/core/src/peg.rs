//! Multi-edge progressive edge-growth (PEG) construction.
//!
//! Edges are grown one at a time. For an edge of type `t` leaving variable
//! node `v`, a breadth-first search over the graph built so far finds the
//! check nodes farthest from `v`; among those that still have a free type-`t`
//! socket the one with the lowest current degree wins, then the lowest rank.
//! Ranks are a seeded permutation of the check indices, which is the only
//! place randomness enters.
//!
//! Order of work:
//! 1. edge types by ascending edge count, skipping degree-one variables and
//!    types without edges there; within a type, variables by ascending
//!    degree in that type, then index;
//! 2. degree-one variables last, each on the lowest-degree free check.
//!
//! The first type is grown on an empty graph and is searched to full depth
//! by default. Later types use a capped search (see [`PegOptions`]): past
//! the cap every unreached check counts as "farthest", which keeps large
//! codes tractable while still ruling out short cycles up to the cap.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

use crate::degree_dist::{DegreeDistribution, Realization};
use crate::matrix::ParityCheckMatrix;
use crate::{Error, Result};

/// Tuning knobs for [`build_matrix_with`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PegOptions {
    /// Maximum number of check levels explored from the current variable
    /// node. A cap of `k` guarantees no new cycle shorter than `2k + 4`
    /// through the edge being placed whenever an unreached check exists.
    pub max_depth: usize,
    /// Depth cap for the first edge type placed; `None` means unlimited.
    pub first_type_depth: Option<usize>,
}

impl Default for PegOptions {
    fn default() -> Self {
        PegOptions {
            max_depth: 2,
            first_type_depth: None,
        }
    }
}

/// SHA-256 of the canonical text form of a distribution.
pub fn distribution_hash(dist: &DegreeDistribution) -> [u8; 32] {
    Sha256::digest(dist.to_text().as_bytes()).into()
}

/// Builds a parity-check matrix with `n` columns from `dist`.
pub fn build_matrix(dist: &DegreeDistribution, n: usize, seed: u64) -> Result<ParityCheckMatrix> {
    build_matrix_with(dist, n, seed, PegOptions::default())
}

pub fn build_matrix_with(
    dist: &DegreeDistribution,
    n: usize,
    seed: u64,
    options: PegOptions,
) -> Result<ParityCheckMatrix> {
    let realization = dist.realize(n)?;
    let rows = Builder::new(&realization, seed, options).run()?;
    let h = ParityCheckMatrix::from_rows(n, rows)?;
    Ok(h.with_provenance(seed, distribution_hash(dist)))
}

struct Builder<'a> {
    real: &'a Realization,
    types: usize,
    options: PegOptions,
    rank: Vec<u32>,
    rank_to_check: Vec<u32>,
    free: Vec<u32>,
    degree: Vec<u32>,
    candidates: Vec<BTreeSet<(u32, u32)>>,
    var_adj: Vec<Vec<u32>>,
    rows: Vec<Vec<(u32, u8)>>,
    check_mark: Vec<u32>,
    var_mark: Vec<u32>,
    stamp: u32,
}

impl<'a> Builder<'a> {
    fn new(real: &'a Realization, seed: u64, options: PegOptions) -> Self {
        let (n, m, types) = (real.n(), real.m(), real.num_edge_types());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut rank_to_check: Vec<u32> = (0..m as u32).collect();
        rank_to_check.shuffle(&mut rng);
        let mut rank = vec![0u32; m];
        for (r, &c) in rank_to_check.iter().enumerate() {
            rank[c as usize] = r as u32;
        }
        let mut free = Vec::with_capacity(m * types);
        let mut candidates = vec![BTreeSet::new(); types];
        for c in 0..m {
            let degrees = real.check_degrees(c);
            free.extend_from_slice(degrees);
            for (t, &d) in degrees.iter().enumerate() {
                if d > 0 {
                    candidates[t].insert((0, rank[c]));
                }
            }
        }
        Builder {
            real,
            types,
            options,
            rank,
            rank_to_check,
            free,
            degree: vec![0; m],
            candidates,
            var_adj: vec![Vec::new(); n],
            rows: vec![Vec::new(); m],
            check_mark: vec![0; m],
            var_mark: vec![0; n],
            stamp: 0,
        }
    }

    fn run(mut self) -> Result<Vec<Vec<(u32, u8)>>> {
        let n = self.real.n();
        let total_degree = |v: usize| self.real.variable_degrees(v).iter().sum::<u32>();

        let multi: Vec<usize> = (0..n).filter(|&v| total_degree(v) > 1).collect();
        let masses: Vec<u64> = (0..self.types)
            .map(|t| multi.iter().map(|&v| self.real.variable_degrees(v)[t] as u64).sum())
            .collect();
        let mut type_order: Vec<usize> = (0..self.types).filter(|&t| masses[t] > 0).collect();
        type_order.sort_by_key(|&t| (masses[t], t));

        for (phase, &t) in type_order.iter().enumerate() {
            let depth = match (phase, self.options.first_type_depth) {
                (0, Some(d)) => d,
                (0, None) => usize::MAX,
                _ => self.options.max_depth,
            };
            let mut order = multi.clone();
            order.sort_by_key(|&v| (self.real.variable_degrees(v)[t], v));
            for &v in &order {
                for _ in 0..self.real.variable_degrees(v)[t] {
                    let c = self.choose_check(v, t, depth)?;
                    self.connect(v, c, t);
                }
            }
        }

        for v in (0..n).filter(|&v| total_degree(v) == 1) {
            let t = self
                .real
                .variable_degrees(v)
                .iter()
                .position(|&d| d == 1)
                .expect("degree-one node has one edge type");
            let c = self.lowest_unmarked(t, false).ok_or_else(|| {
                Error::Construction(format!("no free type-{} socket for variable {v}", t + 1))
            })?;
            self.connect(v, c, t);
        }

        if let Some(c) = (0..self.real.m()).find(|&c| self.free[c * self.types..(c + 1) * self.types].iter().any(|&f| f > 0)) {
            return Err(Error::Construction(format!("check {c} left with free sockets")));
        }
        Ok(self.rows)
    }

    fn connect(&mut self, v: usize, c: usize, t: usize) {
        let old = self.degree[c];
        let base = c * self.types;
        for tt in 0..self.types {
            if self.free[base + tt] > 0 {
                self.candidates[tt].remove(&(old, self.rank[c]));
            }
        }
        self.free[base + t] -= 1;
        self.degree[c] = old + 1;
        for tt in 0..self.types {
            if self.free[base + tt] > 0 {
                self.candidates[tt].insert((old + 1, self.rank[c]));
            }
        }
        self.var_adj[v].push(c as u32);
        self.rows[c].push((v as u32, t as u8));
    }

    /// Lowest (degree, rank) candidate of type `t`, optionally skipping
    /// checks marked by the current search.
    fn lowest_unmarked(&self, t: usize, skip_marked: bool) -> Option<usize> {
        self.candidates[t]
            .iter()
            .map(|&(_, r)| self.rank_to_check[r as usize] as usize)
            .find(|&c| !skip_marked || self.check_mark[c] != self.stamp)
    }

    /// Lowest (degree, rank) check in `level` with a free type-`t` socket.
    fn best_of(&self, level: &[u32], t: usize) -> usize {
        level
            .iter()
            .map(|&c| c as usize)
            .filter(|&c| self.free[c * self.types + t] > 0)
            .min_by_key(|&c| (self.degree[c], self.rank[c]))
            .expect("level holds the last reached candidates")
    }

    fn choose_check(&mut self, v: usize, t: usize, max_depth: usize) -> Result<usize> {
        let total = self.candidates[t].len();
        if total == 0 {
            return Err(Error::Construction(format!(
                "no free type-{} socket left for variable {v}",
                t + 1
            )));
        }
        if self.var_adj[v].is_empty() {
            return Ok(self.lowest_unmarked(t, false).expect("non-empty"));
        }

        self.stamp = self.stamp.wrapping_add(1);
        if self.stamp == 0 {
            self.check_mark.fill(0);
            self.var_mark.fill(0);
            self.stamp = 1;
        }
        let stamp = self.stamp;
        self.var_mark[v] = stamp;
        let mut frontier = self.var_adj[v].clone();
        let mut reached = 0usize;
        for &c in &frontier {
            self.check_mark[c as usize] = stamp;
            if self.free[c as usize * self.types + t] > 0 {
                reached += 1;
            }
        }

        let mut depth = 0;
        loop {
            if reached == total {
                if depth == 0 {
                    return Err(Error::Construction(format!(
                        "variable {v} already touches every check with a free type-{} socket",
                        t + 1
                    )));
                }
                return Ok(self.best_of(&frontier, t));
            }
            if depth == max_depth {
                break;
            }
            let mut next = Vec::new();
            for &c in &frontier {
                for &(w, _) in &self.rows[c as usize] {
                    let w = w as usize;
                    if self.var_mark[w] == stamp {
                        continue;
                    }
                    self.var_mark[w] = stamp;
                    for &c2 in &self.var_adj[w] {
                        let c2u = c2 as usize;
                        if self.check_mark[c2u] != stamp {
                            self.check_mark[c2u] = stamp;
                            next.push(c2);
                            if self.free[c2u * self.types + t] > 0 {
                                reached += 1;
                                if reached == total {
                                    // Every candidate is now reached, so the
                                    // farthest ones are already in `next`.
                                    return Ok(self.best_of(&next, t));
                                }
                            }
                        }
                    }
                }
            }
            if next.is_empty() {
                break;
            }
            frontier = next;
            depth += 1;
        }
        Ok(self
            .lowest_unmarked(t, true)
            .expect("an unreached candidate exists"))
    }
}

/// Shortest-cycle statistics over sampled variable nodes.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GirthReport {
    /// Cycle length → number of sampled nodes whose shortest cycle has it.
    pub histogram: BTreeMap<usize, usize>,
    /// Sampled nodes that lie on no cycle.
    pub acyclic: usize,
    pub sampled: usize,
}

impl GirthReport {
    pub fn min_girth(&self) -> Option<usize> {
        self.histogram.keys().next().copied()
    }
}

/// Measures the shortest cycle through up to `sample` variable nodes of
/// degree ≥ 2, spread evenly over the columns.
pub fn girth_report(h: &ParityCheckMatrix, sample: usize) -> GirthReport {
    let eligible: Vec<usize> = (0..h.n()).filter(|&c| h.col_degree(c) >= 2).collect();
    let mut report = GirthReport::default();
    if eligible.is_empty() || sample == 0 {
        return report;
    }
    let take = sample.min(eligible.len());
    let mut finder = CycleFinder::new(h);
    for k in 0..take {
        let v = eligible[k * eligible.len() / take];
        report.sampled += 1;
        match finder.shortest_through(v) {
            Some(len) => *report.histogram.entry(len).or_default() += 1,
            None => report.acyclic += 1,
        }
    }
    report
}

struct CycleFinder<'a> {
    h: &'a ParityCheckMatrix,
    dist: Vec<u32>,
    branch: Vec<u32>,
    parent: Vec<u32>,
    seen: Vec<u32>,
    stamp: u32,
}

impl<'a> CycleFinder<'a> {
    fn new(h: &'a ParityCheckMatrix) -> Self {
        let size = h.n() + h.m();
        CycleFinder {
            h,
            dist: vec![0; size],
            branch: vec![0; size],
            parent: vec![0; size],
            seen: vec![0; size],
            stamp: 0,
        }
    }

    // Nodes 0..n are variables, n..n+m checks.
    fn neighbours(&self, node: usize) -> Box<dyn Iterator<Item = usize> + '_> {
        let n = self.h.n();
        if node < n {
            Box::new(self.h.col(node).iter().map(move |&r| n + r as usize))
        } else {
            Box::new(self.h.row(node - n).iter().map(|&c| c as usize))
        }
    }

    fn shortest_through(&mut self, v: usize) -> Option<usize> {
        self.stamp += 1;
        let stamp = self.stamp;
        let mut queue = VecDeque::new();
        self.seen[v] = stamp;
        self.dist[v] = 0;
        self.parent[v] = u32::MAX;
        queue.push_back(v);
        let mut best: Option<usize> = None;
        while let Some(a) = queue.pop_front() {
            if let Some(b) = best {
                if 2 * self.dist[a] as usize >= b {
                    break;
                }
            }
            let next: Vec<usize> = self.neighbours(a).collect();
            for b in next {
                if b as u32 == self.parent[a] {
                    continue;
                }
                if self.seen[b] != stamp {
                    self.seen[b] = stamp;
                    self.dist[b] = self.dist[a] + 1;
                    self.parent[b] = a as u32;
                    self.branch[b] = if a == v { b as u32 } else { self.branch[a] };
                    queue.push_back(b);
                } else if b != v && self.branch[b] != self.branch[a] {
                    let len = (self.dist[a] + self.dist[b] + 1) as usize;
                    best = Some(best.map_or(len, |x| x.min(len)));
                }
            }
        }
        best
    }
}
