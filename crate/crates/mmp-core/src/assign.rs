//! Contextuality verdicts and classical indices.
//!
//! A hypergraph is *binary* (noncontextual) when its vertices admit a 0-1
//! assignment with exactly one 1 inside every hyperedge, and *non-binary*
//! (contextual) otherwise. The classical indices measure how far admissible
//! assignments (independent sets of the clique expansion) can reach: the
//! maximal/minimal number of 1s, their multiplicity-weighted sum, and the
//! number of hyperedges containing a 1.

use crate::error::{Error, Result};
use crate::lang::Hypergraph;
use crate::structure::{canonical_form, multiplicities, remove_hyperedge};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

pub const DEFAULT_NODE_BUDGET: u64 = 200_000_000;

/// Fixed-capacity bit set over vertex indices.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BitSet {
    words: Vec<u64>,
    len: usize,
}

impl BitSet {
    pub fn new(len: usize) -> Self {
        BitSet {
            words: vec![0; len.div_ceil(64)],
            len,
        }
    }

    pub fn full(len: usize) -> Self {
        let mut s = Self::new(len);
        for i in 0..len {
            s.insert(i);
        }
        s
    }

    pub fn insert(&mut self, i: usize) {
        self.words[i / 64] |= 1 << (i % 64);
    }

    pub fn remove(&mut self, i: usize) {
        self.words[i / 64] &= !(1 << (i % 64));
    }

    pub fn contains(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn intersects(&self, other: &BitSet) -> bool {
        self.words.iter().zip(&other.words).any(|(a, b)| a & b != 0)
    }

    pub fn intersection_count(&self, other: &BitSet) -> usize {
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    pub fn and_with(&mut self, other: &BitSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= b;
        }
    }

    pub fn subtract(&mut self, other: &BitSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= !b;
        }
    }

    pub fn union_with(&mut self, other: &BitSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let b = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(wi * 64 + b)
                }
            })
        })
    }

    pub fn first(&self) -> Option<usize> {
        self.iter_ones().next()
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter_ones().collect()
    }
}

/// A 0-1 vertex labeling.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Assignment {
    pub bits: Vec<bool>,
}

impl Assignment {
    pub fn from_ones(k: usize, ones: &[usize]) -> Self {
        let mut bits = vec![false; k];
        for &v in ones {
            bits[v] = true;
        }
        Assignment { bits }
    }

    pub fn ones(&self) -> Vec<usize> {
        self.bits
            .iter()
            .enumerate()
            .filter_map(|(v, &b)| b.then_some(v))
            .collect()
    }

    /// No hyperedge contains two 1-vertices.
    pub fn admissible(&self, h: &Hypergraph) -> bool {
        h.edges
            .iter()
            .all(|e| e.iter().filter(|&&v| self.bits[v]).count() <= 1)
    }

    /// Admissible and every hyperedge contains exactly one 1-vertex.
    pub fn exact(&self, h: &Hypergraph) -> bool {
        h.edges
            .iter()
            .all(|e| e.iter().filter(|&&v| self.bits[v]).count() == 1)
    }

    /// Admissible and no 0-vertex can be flipped to 1 admissibly.
    pub fn maximal(&self, h: &Hypergraph) -> bool {
        if !self.admissible(h) {
            return false;
        }
        let adj = adjacency(h);
        (0..h.k()).all(|v| self.bits[v] || adj[v].iter_ones().any(|u| self.bits[u]))
    }
}

/// Verdict of the exact binary/non-binary decision.
#[derive(Clone, Debug, Serialize)]
pub struct BinaryVerdict {
    pub binary: bool,
    pub witness: Option<Assignment>,
}

/// Clique-expansion adjacency as bit sets.
pub(crate) fn adjacency(h: &Hypergraph) -> Vec<BitSet> {
    let mut adj = vec![BitSet::new(h.k()); h.k()];
    for e in &h.edges {
        for i in 0..e.len() {
            for j in i + 1..e.len() {
                adj[e[i]].insert(e[j]);
                adj[e[j]].insert(e[i]);
            }
        }
    }
    adj
}

// ---------------------------------------------------------------------------
// Exact binary decision: complete backtracking with unit propagation.
// ---------------------------------------------------------------------------

enum TrailOp {
    State(usize),
    Unset(usize),
    HasOne(usize),
}

struct BinarySearch<'a> {
    h: &'a Hypergraph,
    vertex_edges: Vec<Vec<usize>>,
    state: Vec<i8>, // -1 unset, 0, 1
    edge_has_one: Vec<bool>,
    edge_unset: Vec<usize>,
    trail: Vec<TrailOp>,
    nodes: u64,
    budget: u64,
    mult: Vec<usize>,
}

impl<'a> BinarySearch<'a> {
    fn new(h: &'a Hypergraph, budget: u64) -> Self {
        let vertex_edges = h.vertex_edges();
        let mult = vertex_edges.iter().map(|e| e.len()).collect();
        BinarySearch {
            vertex_edges,
            state: vec![-1; h.k()],
            edge_has_one: vec![false; h.l()],
            edge_unset: h.edges.iter().map(|e| e.len()).collect(),
            trail: Vec::new(),
            nodes: 0,
            budget,
            h,
            mult,
        }
    }

    /// Assign and propagate; returns false on conflict. Every applied effect
    /// is recorded on the trail individually, so a mid-propagation conflict
    /// still unwinds exactly.
    fn assign(&mut self, v0: usize, val0: i8) -> bool {
        let mut queue = vec![(v0, val0)];
        while let Some((v, val)) = queue.pop() {
            if self.state[v] != -1 {
                if self.state[v] != val {
                    return false;
                }
                continue;
            }
            self.state[v] = val;
            self.trail.push(TrailOp::State(v));
            for idx in 0..self.vertex_edges[v].len() {
                let j = self.vertex_edges[v][idx];
                self.edge_unset[j] -= 1;
                self.trail.push(TrailOp::Unset(j));
                if val == 1 {
                    if self.edge_has_one[j] {
                        return false;
                    }
                    self.edge_has_one[j] = true;
                    self.trail.push(TrailOp::HasOne(j));
                    for &u in &self.h.edges[j] {
                        if self.state[u] == -1 {
                            queue.push((u, 0));
                        }
                    }
                } else if !self.edge_has_one[j] {
                    match self.edge_unset[j] {
                        0 => return false,
                        1 => {
                            if let Some(&u) =
                                self.h.edges[j].iter().find(|&&u| self.state[u] == -1)
                            {
                                queue.push((u, 1));
                            }
                        }
                        _ => {}
                    }
                }
            }
        }
        true
    }

    fn undo_to(&mut self, mark: usize) {
        while self.trail.len() > mark {
            match self.trail.pop().unwrap() {
                TrailOp::State(v) => self.state[v] = -1,
                TrailOp::Unset(j) => self.edge_unset[j] += 1,
                TrailOp::HasOne(j) => self.edge_has_one[j] = false,
            }
        }
    }

    /// Uncovered edge with the fewest open choices; ties toward the edge
    /// whose open vertices sit in the most other contexts, so branching
    /// settles the interwoven core before the single-context padding.
    fn pick_branch_edge(&self) -> Option<usize> {
        (0..self.h.l())
            .filter(|&j| !self.edge_has_one[j])
            .min_by_key(|&j| {
                let weight: usize = self.h.edges[j]
                    .iter()
                    .filter(|&&u| self.state[u] == -1)
                    .map(|&u| self.mult[u])
                    .sum();
                (self.edge_unset[j], usize::MAX - weight)
            })
    }

    fn search(&mut self) -> Result<bool> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(Error::BudgetExceeded(self.budget));
        }
        let Some(j) = self.pick_branch_edge() else {
            return Ok(true);
        };
        let mut candidates: Vec<usize> = self.h.edges[j]
            .iter()
            .copied()
            .filter(|&u| self.state[u] == -1)
            .collect();
        candidates.sort_by_key(|&u| usize::MAX - self.mult[u]);
        for u in candidates {
            let mark = self.trail.len();
            if self.assign(u, 1) {
                if self.search()? {
                    return Ok(true);
                }
            }
            self.undo_to(mark);
        }
        Ok(false)
    }
}

/// Decide binary vs. non-binary by complete backtracking with unit
/// propagation. Exhaustive: a `false` verdict means no exact assignment
/// exists.
pub fn is_binary(h: &Hypergraph) -> Result<BinaryVerdict> {
    is_binary_budgeted(h, DEFAULT_NODE_BUDGET)
}

pub fn is_binary_budgeted(h: &Hypergraph, budget: u64) -> Result<BinaryVerdict> {
    let mut ctx = BinarySearch::new(h, budget);
    let sat = ctx.search()?;
    if sat {
        let bits = ctx.state.iter().map(|&s| s == 1).collect();
        let witness = Assignment { bits };
        debug_assert!(witness.exact(h));
        Ok(BinaryVerdict {
            binary: true,
            witness: Some(witness),
        })
    } else {
        Ok(BinaryVerdict {
            binary: false,
            witness: None,
        })
    }
}

// ---------------------------------------------------------------------------
// Exact classical indices: branch-and-bound over independent sets.
// ---------------------------------------------------------------------------

/// Classical index report: extremal counts over admissible (independent)
/// and maximal-admissible assignments, with one witness per extremum.
#[derive(Clone, Debug, Serialize)]
pub struct IndexReport {
    #[serde(rename = "HI_cM")]
    pub hi_c_max: usize,
    #[serde(rename = "HI_cm")]
    pub hi_c_min: usize,
    #[serde(rename = "HI_mcM")]
    pub hi_mc_max: usize,
    #[serde(rename = "l_cM")]
    pub l_c_max: usize,
    #[serde(rename = "l_cm")]
    pub l_c_min: usize,
    pub exact: bool,
    pub runs_used: u64,
    pub witnesses: Witnesses,
}

/// Sorted 1-vertex lists backing each extremal value.
#[derive(Clone, Debug, Serialize)]
pub struct Witnesses {
    #[serde(rename = "HI_cM")]
    pub hi_c_max: Vec<usize>,
    #[serde(rename = "HI_cm")]
    pub hi_c_min: Vec<usize>,
    #[serde(rename = "HI_mcM")]
    pub hi_mc_max: Vec<usize>,
    #[serde(rename = "l_cM")]
    pub l_c_max: Vec<usize>,
    #[serde(rename = "l_cm")]
    pub l_c_min: Vec<usize>,
}

struct MaxIsSolver<'a> {
    adj: &'a [BitSet],
    weights: Vec<u64>,
    nodes: u64,
    budget: u64,
    best: u64,
    best_set: Vec<usize>,
    /// Stop as soon as `best >= target` (feasibility mode).
    target: Option<u64>,
}

impl<'a> MaxIsSolver<'a> {
    fn new(adj: &'a [BitSet], weights: Vec<u64>, budget: u64) -> Self {
        MaxIsSolver {
            adj,
            weights,
            nodes: 0,
            budget,
            best: 0,
            best_set: Vec::new(),
            target: None,
        }
    }

    /// Greedy clique cover of `p`; the sum of per-clique maximum weights
    /// bounds any independent set inside `p`.
    fn bound(&self, p: &BitSet) -> u64 {
        let mut cliques: Vec<(BitSet, u64)> = Vec::new();
        for v in p.iter_ones() {
            let w = self.weights[v];
            let mut placed = false;
            for (mask, maxw) in cliques.iter_mut() {
                if mask.intersection_count(&self.adj[v]) == mask.count() {
                    mask.insert(v);
                    *maxw = (*maxw).max(w);
                    placed = true;
                    break;
                }
            }
            if !placed {
                let mut mask = BitSet::new(self.adj.len());
                mask.insert(v);
                cliques.push((mask, w));
            }
        }
        cliques.iter().map(|(_, w)| *w).sum()
    }

    fn search(&mut self, p: BitSet, cur: &mut Vec<usize>, cur_w: u64) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(Error::BudgetExceeded(self.budget));
        }
        if let Some(t) = self.target {
            if self.best >= t {
                return Ok(());
            }
        }
        if cur_w > self.best {
            self.best = cur_w;
            self.best_set = cur.clone();
        }
        if p.is_empty() {
            return Ok(());
        }
        if cur_w + self.bound(&p) <= self.best {
            return Ok(());
        }
        // Branch on the candidate with most candidate neighbors.
        let v = p
            .iter_ones()
            .max_by_key(|&v| self.adj[v].intersection_count(&p))
            .unwrap();
        // Include v.
        let mut p_in = p.clone();
        p_in.remove(v);
        p_in.subtract(&self.adj[v]);
        cur.push(v);
        self.search(p_in, cur, cur_w + self.weights[v])?;
        cur.pop();
        // Exclude v.
        let mut p_out = p;
        p_out.remove(v);
        self.search(p_out, cur, cur_w)
    }
}

fn solve_max_is(
    adj: &[BitSet],
    weights: Vec<u64>,
    forced: &[usize],
    budget: u64,
    target: Option<u64>,
) -> Result<(u64, Vec<usize>)> {
    let k = adj.len();
    let mut p = BitSet::full(k);
    let mut cur = Vec::new();
    let mut cur_w = 0;
    for &v in forced {
        p.remove(v);
        p.subtract(&adj[v]);
        cur.push(v);
        cur_w += weights[v];
    }
    let mut solver = MaxIsSolver::new(adj, weights, budget);
    solver.target = target;
    solver.best_set = cur.clone();
    solver.search(p, &mut cur, cur_w)?;
    Ok((solver.best.max(cur_w), solver.best_set))
}

/// Maximize the number of hyperedges containing a chosen vertex, over
/// independent sets.
struct MaxHitSolver<'a> {
    adj: &'a [BitSet],
    vertex_edges: &'a [Vec<usize>],
    l: usize,
    nodes: u64,
    budget: u64,
    best: usize,
    best_set: Vec<usize>,
}

impl<'a> MaxHitSolver<'a> {
    fn new_hits(&self, v: usize, hit: &[bool]) -> usize {
        self.vertex_edges[v].iter().filter(|&&j| !hit[j]).count()
    }

    fn bound(&self, p: &BitSet, hit: &[bool]) -> usize {
        let mut reachable = vec![false; self.l];
        for v in p.iter_ones() {
            for &j in &self.vertex_edges[v] {
                if !hit[j] {
                    reachable[j] = true;
                }
            }
        }
        reachable.iter().filter(|&&b| b).count()
    }

    fn search(
        &mut self,
        p: BitSet,
        hit: &mut Vec<bool>,
        cur_hits: usize,
        cur: &mut Vec<usize>,
    ) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(Error::BudgetExceeded(self.budget));
        }
        if cur_hits > self.best {
            self.best = cur_hits;
            self.best_set = cur.clone();
        }
        if p.is_empty() || cur_hits + self.bound(&p, hit) <= self.best {
            return Ok(());
        }
        let v = p
            .iter_ones()
            .max_by_key(|&v| self.new_hits(v, hit))
            .unwrap();
        // Include v.
        let newly: Vec<usize> = self.vertex_edges[v]
            .iter()
            .copied()
            .filter(|&j| !hit[j])
            .collect();
        for &j in &newly {
            hit[j] = true;
        }
        let mut p_in = p.clone();
        p_in.remove(v);
        p_in.subtract(&self.adj[v]);
        cur.push(v);
        self.search(p_in, hit, cur_hits + newly.len(), cur)?;
        cur.pop();
        for &j in &newly {
            hit[j] = false;
        }
        // Exclude v.
        let mut p_out = p;
        p_out.remove(v);
        self.search(p_out, hit, cur_hits, cur)
    }
}

/// Minimize |S| or the number of hit hyperedges over *maximal* independent
/// sets.
struct MinMaximalSolver<'a> {
    adj: &'a [BitSet],
    vertex_edges: &'a [Vec<usize>],
    by_hits: bool,
    nodes: u64,
    budget: u64,
    best: usize,
    best_set: Vec<usize>,
}

impl<'a> MinMaximalSolver<'a> {
    /// Greedy packing of undominated vertices with disjoint dominator sets;
    /// each packed vertex forces one more member of S.
    fn packing_bound(&self, p: &BitSet, x: &BitSet) -> usize {
        let mut used = BitSet::new(self.adj.len());
        let mut packed = 0;
        let mut undominated: Vec<usize> = p.iter_ones().chain(x.iter_ones()).collect();
        undominated.sort_unstable();
        for u in undominated {
            let mut dom = self.adj[u].clone();
            dom.and_with(p);
            if p.contains(u) {
                dom.insert(u);
            }
            if dom.is_empty() {
                continue;
            }
            if !dom.intersects(&used) {
                packed += 1;
                used.union_with(&dom);
            }
        }
        packed
    }

    fn search(
        &mut self,
        p: BitSet,
        x: BitSet,
        s: &mut Vec<usize>,
        cur_hits: usize,
        hit: &mut Vec<bool>,
    ) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(Error::BudgetExceeded(self.budget));
        }
        let value_now = if self.by_hits { cur_hits } else { s.len() };
        if value_now >= self.best {
            return Ok(());
        }
        if p.is_empty() && x.is_empty() {
            // Maximal: everything is dominated.
            let val = value_now;
            if val < self.best {
                self.best = val;
                self.best_set = s.clone();
            }
            return Ok(());
        }
        if !self.by_hits && s.len() + self.packing_bound(&p, &x) >= self.best {
            return Ok(());
        }
        // Choose the undominated vertex with the fewest dominator candidates.
        let pick = p
            .iter_ones()
            .chain(x.iter_ones())
            .map(|u| {
                let mut cand: Vec<usize> = self.adj[u]
                    .iter_ones()
                    .filter(|&w| p.contains(w))
                    .collect();
                if p.contains(u) {
                    cand.insert(0, u);
                }
                (u, cand)
            })
            .min_by_key(|(_, cand)| cand.len());
        let Some((_, candidates)) = pick else {
            return Ok(());
        };
        if candidates.is_empty() {
            return Ok(()); // dead end: vertex can never be dominated
        }
        let mut p = p;
        let mut x = x;
        for w in candidates {
            // Branch: w joins S.
            let mut p2 = p.clone();
            let mut x2 = x.clone();
            p2.remove(w);
            p2.subtract(&self.adj[w]);
            x2.remove(w);
            x2.subtract(&self.adj[w]);
            let newly: Vec<usize> = self.vertex_edges[w]
                .iter()
                .copied()
                .filter(|&j| !hit[j])
                .collect();
            for &j in &newly {
                hit[j] = true;
            }
            s.push(w);
            self.search(p2, x2, s, cur_hits + newly.len(), hit)?;
            s.pop();
            for &j in &newly {
                hit[j] = false;
            }
            // Continue assuming w is excluded from S.
            p.remove(w);
            x.insert(w);
        }
        Ok(())
    }
}

fn solve_min_maximal(
    h: &Hypergraph,
    adj: &[BitSet],
    vertex_edges: &[Vec<usize>],
    by_hits: bool,
    forced: &[usize],
    budget: u64,
) -> Result<(usize, Vec<usize>)> {
    let mut solver = MinMaximalSolver {
        adj,
        vertex_edges,
        by_hits,
        nodes: 0,
        budget,
        best: usize::MAX,
        best_set: Vec::new(),
    };
    let mut p = BitSet::full(h.k());
    let x = BitSet::new(h.k());
    let mut s = Vec::new();
    let mut hit = vec![false; h.l()];
    let mut hits = 0usize;
    for &v in forced {
        p.remove(v);
        p.subtract(&adj[v]);
        s.push(v);
        for &j in &vertex_edges[v] {
            if !hit[j] {
                hit[j] = true;
                hits += 1;
            }
        }
    }
    solver.search(p, x, &mut s, hits, &mut hit)?;
    if solver.best == usize::MAX {
        return Err(Error::Invalid(
            "no maximal independent set extends the forced prefix".into(),
        ));
    }
    Ok((solver.best, solver.best_set))
}

/// Exact classical indices via branch-and-bound with bitset adjacency.
/// Witness ties are broken toward the lexicographically smallest 1-set.
pub fn classical_indices_exact(h: &Hypergraph) -> Result<IndexReport> {
    classical_indices_exact_budgeted(h, DEFAULT_NODE_BUDGET)
}

pub fn classical_indices_exact_budgeted(h: &Hypergraph, budget: u64) -> Result<IndexReport> {
    let adj = adjacency(h);
    let vertex_edges = h.vertex_edges();
    let k = h.k();
    let unit = vec![1u64; k];
    let mult: Vec<u64> = multiplicities(h).iter().map(|&m| m as u64).collect();

    let (hi_c_max, w1) = solve_max_is(&adj, unit.clone(), &[], budget, None)?;
    let (hi_mc_max, w3) = solve_max_is(&adj, mult.clone(), &[], budget, None)?;

    let solve_lcm = |forced: &[usize]| -> Result<(usize, Vec<usize>)> {
        let mut solver = MaxHitSolver {
            adj: &adj,
            vertex_edges: &vertex_edges,
            l: h.l(),
            nodes: 0,
            budget,
            best: 0,
            best_set: Vec::new(),
        };
        let mut p = BitSet::full(k);
        let mut hit = vec![false; h.l()];
        let mut cur = Vec::new();
        let mut hits = 0;
        for &v in forced {
            p.remove(v);
            p.subtract(&adj[v]);
            cur.push(v);
            for &j in &vertex_edges[v] {
                if !hit[j] {
                    hit[j] = true;
                    hits += 1;
                }
            }
        }
        solver.best_set = cur.clone();
        solver.search(p, &mut hit, hits, &mut cur)?;
        Ok((solver.best.max(hits), solver.best_set))
    };
    let (l_c_max, w4) = solve_lcm(&[])?;

    let (hi_c_min, w2) = solve_min_maximal(h, &adj, &vertex_edges, false, &[], budget)?;
    let (l_c_min, w5) = solve_min_maximal(h, &adj, &vertex_edges, true, &[], budget)?;

    // Lexicographically smallest witnesses via prefix-forcing re-solves.
    let lex_max_is = |weights: &Vec<u64>, opt: u64| -> Result<Vec<usize>> {
        lexify(k, &adj, |forced| {
            let (v, _) = solve_max_is(&adj, weights.clone(), forced, budget, Some(opt))?;
            Ok(v >= opt)
        })
    };
    let wit_hi_c_max = lex_max_is(&unit, hi_c_max).unwrap_or(w1);
    let wit_hi_mc_max = lex_max_is(&mult, hi_mc_max).unwrap_or(w3);
    let mut wit_l_c_max = lexify(k, &adj, |forced| {
        let (v, _) = solve_lcm(forced)?;
        Ok(v >= l_c_max)
    })
    .unwrap_or(w4);
    // Drop vertices that contribute no hyperedge of their own; the hit count
    // must stay at the optimum.
    let hits_of = |set: &[usize]| -> usize {
        let mut hit = vec![false; h.l()];
        for &v in set {
            for &j in &vertex_edges[v] {
                hit[j] = true;
            }
        }
        hit.iter().filter(|&&b| b).count()
    };
    for v in (0..wit_l_c_max.len()).rev() {
        let mut trimmed = wit_l_c_max.clone();
        trimmed.remove(v);
        if hits_of(&trimmed) == l_c_max {
            wit_l_c_max = trimmed;
        }
    }
    let wit_hi_c_min = lexify(k, &adj, |forced| {
        let (v, _) = solve_min_maximal(h, &adj, &vertex_edges, false, forced, budget)?;
        Ok(v <= hi_c_min)
    })
    .unwrap_or(w2);
    let wit_l_c_min = lexify(k, &adj, |forced| {
        let (v, _) = solve_min_maximal(h, &adj, &vertex_edges, true, forced, budget)?;
        Ok(v <= l_c_min)
    })
    .unwrap_or(w5);

    Ok(IndexReport {
        hi_c_max: hi_c_max as usize,
        hi_c_min,
        hi_mc_max: hi_mc_max as usize,
        l_c_max,
        l_c_min,
        exact: true,
        runs_used: 0,
        witnesses: Witnesses {
            hi_c_max: wit_hi_c_max,
            hi_c_min: wit_hi_c_min,
            hi_mc_max: wit_hi_mc_max,
            l_c_max: wit_l_c_max,
            l_c_min: wit_l_c_min,
        },
    })
}

/// Build the lexicographically smallest optimal 1-set: include each vertex
/// in index order iff an optimal completion still exists.
fn lexify(
    k: usize,
    adj: &[BitSet],
    mut still_optimal: impl FnMut(&[usize]) -> Result<bool>,
) -> Result<Vec<usize>> {
    let mut forced: Vec<usize> = Vec::new();
    let mut blocked = BitSet::new(k);
    for v in 0..k {
        if blocked.contains(v) {
            continue;
        }
        forced.push(v);
        if still_optimal(&forced)? {
            blocked.union_with(&adj[v]);
        } else {
            forced.pop();
        }
    }
    Ok(forced)
}

// ---------------------------------------------------------------------------
// Heuristic indices: randomized maximal assignments, program-ONE style.
// ---------------------------------------------------------------------------

fn splitmix(seed: u64, stream: u64) -> u64 {
    let mut z = seed ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

struct RunOutcome {
    ones: usize,
    weighted: usize,
    hits: usize,
    set: Vec<usize>,
}

fn heuristic_run(
    h: &Hypergraph,
    adj: &[BitSet],
    vertex_edges: &[Vec<usize>],
    mult: &[usize],
    seed: u64,
) -> RunOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = h.k();
    let mut free = BitSet::full(k);
    let mut set = Vec::new();
    // Start at a random hyperedge.
    if h.l() > 0 {
        let e = &h.edges[rng.gen_range(0..h.l())];
        let v = e[rng.gen_range(0..e.len())];
        set.push(v);
        free.remove(v);
        free.subtract(&adj[v]);
    }
    // Greedily add random permitted vertices until maximal.
    loop {
        let candidates: Vec<usize> = free.iter_ones().collect();
        if candidates.is_empty() {
            break;
        }
        let v = candidates[rng.gen_range(0..candidates.len())];
        set.push(v);
        free.remove(v);
        free.subtract(&adj[v]);
    }
    let mut hit = vec![false; h.l()];
    for &v in &set {
        for &j in &vertex_edges[v] {
            hit[j] = true;
        }
    }
    set.sort_unstable();
    RunOutcome {
        ones: set.len(),
        weighted: set.iter().map(|&v| mult[v]).sum(),
        hits: hit.iter().filter(|&&b| b).count(),
        set,
    }
}

/// Randomized maximal-assignment sampling: every run builds one maximal
/// admissible assignment; extrema are aggregated over runs. Deterministic
/// for a fixed seed, independent of the parallelism degree.
pub fn classical_indices_heuristic(h: &Hypergraph, runs: u64, seed: u64) -> IndexReport {
    let adj = adjacency(h);
    let vertex_edges = h.vertex_edges();
    let mult = multiplicities(h);

    let outcomes: Vec<RunOutcome> = (0..runs)
        .into_par_iter()
        .map(|r| heuristic_run(h, &adj, &vertex_edges, &mult, splitmix(seed, r)))
        .collect();

    let mut report = IndexReport {
        hi_c_max: 0,
        hi_c_min: usize::MAX,
        hi_mc_max: 0,
        l_c_max: 0,
        l_c_min: usize::MAX,
        exact: false,
        runs_used: runs,
        witnesses: Witnesses {
            hi_c_max: Vec::new(),
            hi_c_min: Vec::new(),
            hi_mc_max: Vec::new(),
            l_c_max: Vec::new(),
            l_c_min: Vec::new(),
        },
    };
    for o in &outcomes {
        if o.ones > report.hi_c_max {
            report.hi_c_max = o.ones;
            report.witnesses.hi_c_max = o.set.clone();
        }
        if o.ones < report.hi_c_min {
            report.hi_c_min = o.ones;
            report.witnesses.hi_c_min = o.set.clone();
        }
        if o.weighted > report.hi_mc_max {
            report.hi_mc_max = o.weighted;
            report.witnesses.hi_mc_max = o.set.clone();
        }
        if o.hits > report.l_c_max {
            report.l_c_max = o.hits;
            report.witnesses.l_c_max = o.set.clone();
        }
        if o.hits < report.l_c_min {
            report.l_c_min = o.hits;
            report.witnesses.l_c_min = o.set.clone();
        }
    }
    if report.hi_c_min == usize::MAX {
        report.hi_c_min = 0;
        report.l_c_min = 0;
    }
    report
}

// ---------------------------------------------------------------------------
// Criticality, parity, critical-set search.
// ---------------------------------------------------------------------------

/// True iff `h` is non-binary and removing any single hyperedge makes it
/// binary.
pub fn is_critical(h: &Hypergraph) -> Result<bool> {
    is_critical_budgeted(h, DEFAULT_NODE_BUDGET)
}

pub fn is_critical_budgeted(h: &Hypergraph, budget: u64) -> Result<bool> {
    if is_binary_budgeted(h, budget)?.binary {
        return Ok(false);
    }
    // Sequential with early exit: one non-binary removal settles it.
    for j in 0..h.l() {
        let reduced = remove_hyperedge(h, j)?;
        if !is_binary_budgeted(&reduced, budget)?.binary {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Whole-set parity witness: an odd number of hyperedges with every vertex
/// multiplicity even makes an exact assignment impossible (the 1s would
/// have to sum to an odd hyperedge count using even contributions).
pub fn has_parity_proof(h: &Hypergraph) -> bool {
    h.l() % 2 == 1 && multiplicities(h).iter().all(|&m| m % 2 == 0)
}

/// Randomized descent: repeatedly remove a random hyperedge while the
/// result stays non-binary; a local minimum is critical by construction.
/// `restarts` descents are run; results are deduplicated by canonical form
/// and sorted by size. Deterministic for a fixed seed.
pub fn find_criticals(h: &Hypergraph, seed: u64, restarts: u32) -> Result<Vec<Hypergraph>> {
    find_criticals_budgeted(h, seed, restarts, DEFAULT_NODE_BUDGET)
}

pub fn find_criticals_budgeted(
    h: &Hypergraph,
    seed: u64,
    restarts: u32,
    budget: u64,
) -> Result<Vec<Hypergraph>> {
    if is_binary_budgeted(h, budget)?.binary {
        return Ok(Vec::new());
    }
    let descents: Vec<Result<Hypergraph>> = (0..restarts)
        .into_par_iter()
        .map(|r| descent(h, splitmix(seed, r as u64), budget))
        .collect();
    let mut found: Vec<(String, Hypergraph)> = Vec::new();
    for d in descents {
        let c = d?;
        let canon = canonical_form(&c)?.0;
        if !found.iter().any(|(sig, _)| *sig == canon) {
            found.push((canon, c));
        }
    }
    found.sort_by(|a, b| (a.1.k(), a.1.l(), &a.0).cmp(&(b.1.k(), b.1.l(), &b.0)));
    Ok(found.into_iter().map(|(_, h)| h).collect())
}

fn descent(h: &Hypergraph, seed: u64, budget: u64) -> Result<Hypergraph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cur = h.clone();
    'outer: loop {
        let mut order: Vec<usize> = (0..cur.l()).collect();
        for i in (1..order.len()).rev() {
            order.swap(i, rng.gen_range(0..=i));
        }
        for j in order {
            let reduced = remove_hyperedge(&cur, j)?;
            if !is_binary_budgeted(&reduced, budget)?.binary {
                cur = reduced;
                continue 'outer;
            }
        }
        // Every single removal is binary: critical.
        return Ok(cur);
    }
}
