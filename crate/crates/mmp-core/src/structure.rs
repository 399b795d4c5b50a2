//! Structural operations on hypergraphs: multiplicities, stripping of
//! single-hyperedge vertices, hyperedge removal, conversion to and from
//! ordinary graphs, and a canonical form for isomorphism checks.

use crate::error::{Error, Result};
use crate::lang::{Hypergraph, VertexLabel};
use std::collections::{BTreeMap, HashSet};

/// Number of hyperedges each vertex belongs to.
pub fn multiplicities(h: &Hypergraph) -> Vec<usize> {
    let mut m = vec![0usize; h.k()];
    for e in &h.edges {
        for &v in e {
            m[v] += 1;
        }
    }
    m
}

/// Histogram multiplicity -> count, descending multiplicity.
pub fn multiplicity_histogram(h: &Hypergraph) -> Vec<(usize, usize)> {
    let mut hist: BTreeMap<usize, usize> = BTreeMap::new();
    for m in multiplicities(h) {
        *hist.entry(m).or_default() += 1;
    }
    hist.into_iter().rev().collect()
}

fn rebuild(h: &Hypergraph, keep_vertex: &[bool], edges: Vec<Vec<usize>>) -> Hypergraph {
    let mut map = vec![usize::MAX; h.k()];
    let mut vertices = Vec::new();
    for (v, &keep) in keep_vertex.iter().enumerate() {
        if keep {
            map[v] = vertices.len();
            vertices.push(h.vertices[v].clone());
        }
    }
    let edges = edges
        .into_iter()
        .map(|e| e.into_iter().map(|v| map[v]).collect())
        .collect();
    Hypergraph {
        n: h.n,
        vertices,
        edges,
    }
}

/// Remove every vertex of multiplicity 1, dropping hyperedges that fall
/// below 2 vertices. One pass by default; `fixpoint` repeats until stable.
pub fn strip_unishared(h: &Hypergraph, fixpoint: bool) -> Result<Hypergraph> {
    let mut cur = h.clone();
    loop {
        let m = multiplicities(&cur);
        if !m.iter().any(|&x| x == 1) {
            return Ok(cur);
        }
        let edges: Vec<Vec<usize>> = cur
            .edges
            .iter()
            .map(|e| e.iter().copied().filter(|&v| m[v] > 1).collect::<Vec<_>>())
            .filter(|e: &Vec<usize>| e.len() >= 2)
            .collect();
        let mut keep = vec![false; cur.k()];
        for e in &edges {
            for &v in e {
                keep[v] = true;
            }
        }
        if edges.is_empty() {
            return Err(Error::Empty);
        }
        cur = rebuild(&cur, &keep, edges);
        if !fixpoint {
            return Ok(cur);
        }
    }
}

/// Remove hyperedge `index`; vertices orphaned by the removal (multiplicity
/// drops to 0) are removed, all other vertices stay.
pub fn remove_hyperedge(h: &Hypergraph, index: usize) -> Result<Hypergraph> {
    if index >= h.l() {
        return Err(Error::EdgeIndex {
            index,
            len: h.l(),
        });
    }
    let edges: Vec<Vec<usize>> = h
        .edges
        .iter()
        .enumerate()
        .filter(|(j, _)| *j != index)
        .map(|(_, e)| e.clone())
        .collect();
    if edges.is_empty() {
        return Err(Error::Empty);
    }
    let mut keep = vec![false; h.k()];
    for e in &edges {
        for &v in e {
            keep[v] = true;
        }
    }
    Ok(rebuild(h, &keep, edges))
}

/// Simple graph: vertex count plus sorted 2-element edges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    pub k: usize,
    pub edges: Vec<(usize, usize)>,
}

impl Graph {
    pub fn adjacency(&self) -> Vec<HashSet<usize>> {
        let mut adj = vec![HashSet::new(); self.k];
        for &(a, b) in &self.edges {
            adj[a].insert(b);
            adj[b].insert(a);
        }
        adj
    }
}

/// Clique expansion: vertices keep their indices, `{u, v}` is a graph edge
/// iff `u` and `v` co-occur in some hyperedge.
pub fn to_graph(h: &Hypergraph) -> Graph {
    let mut set = HashSet::new();
    for e in &h.edges {
        for i in 0..e.len() {
            for j in i + 1..e.len() {
                let (a, b) = (e[i].min(e[j]), e[i].max(e[j]));
                set.insert((a, b));
            }
        }
    }
    let mut edges: Vec<(usize, usize)> = set.into_iter().collect();
    edges.sort_unstable();
    Graph { k: h.k(), edges }
}

/// Inverse direction: hyperedges are the maximal cliques of `g` (at most
/// `n` vertices each; larger cliques are an error). Isolated edges become
/// 2-vertex hyperedges. Cliques are emitted in lexicographic order of their
/// sorted vertex lists.
pub fn from_graph(g: &Graph, n: usize) -> Result<Hypergraph> {
    let adj = g.adjacency();
    let mut cliques: Vec<Vec<usize>> = Vec::new();
    let mut r = Vec::new();
    let p: Vec<usize> = (0..g.k).collect();
    bron_kerbosch(&adj, &mut r, p, Vec::new(), &mut cliques);
    cliques.retain(|c| c.len() >= 2);
    for c in &cliques {
        if c.len() > n {
            return Err(Error::CliqueTooLarge {
                size: c.len(),
                n,
            });
        }
    }
    cliques.sort_unstable();
    Ok(Hypergraph {
        n,
        vertices: (0..g.k).map(VertexLabel::encode).collect(),
        edges: cliques,
    })
}

fn bron_kerbosch(
    adj: &[HashSet<usize>],
    r: &mut Vec<usize>,
    p: Vec<usize>,
    x: Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    if p.is_empty() && x.is_empty() {
        let mut clique = r.clone();
        clique.sort_unstable();
        out.push(clique);
        return;
    }
    // Pivot on the candidate with the most neighbors in P.
    let pivot = p
        .iter()
        .chain(x.iter())
        .copied()
        .max_by_key(|&u| p.iter().filter(|&&v| adj[u].contains(&v)).count())
        .unwrap();
    let branch: Vec<usize> = p.iter().copied().filter(|v| !adj[pivot].contains(v)).collect();
    let mut p = p;
    let mut x = x;
    for v in branch {
        r.push(v);
        let p2 = p.iter().copied().filter(|&u| adj[v].contains(&u)).collect();
        let x2 = x.iter().copied().filter(|&u| adj[v].contains(&u)).collect();
        bron_kerbosch(adj, r, p2, x2, out);
        r.pop();
        p.retain(|&u| u != v);
        x.push(v);
    }
}

/// Canonical serialized form, invariant under vertex relabeling and
/// hyperedge reordering. Two hypergraphs are isomorphic iff their canonical
/// forms agree.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CanonicalForm(pub String);

const DEFAULT_CANON_BUDGET: u64 = 2_000_000;

/// Canonical labeling by iterated color refinement on the bipartite
/// vertex/hyperedge incidence structure plus individualization of the first
/// smallest non-singleton vertex cell.
pub fn canonical_form(h: &Hypergraph) -> Result<CanonicalForm> {
    canonical_form_budgeted(h, DEFAULT_CANON_BUDGET)
}

pub fn canonical_form_budgeted(h: &Hypergraph, budget: u64) -> Result<CanonicalForm> {
    let mut ctx = CanonCtx {
        h,
        budget,
        nodes: 0,
        vertex_edges: h.vertex_edges(),
        best: None,
    };
    let init = vec![0u32; h.k()];
    ctx.search(init)?;
    Ok(CanonicalForm(ctx.best.expect("search always yields a candidate")))
}

pub fn is_isomorphic(a: &Hypergraph, b: &Hypergraph) -> Result<bool> {
    if a.k() != b.k() || a.l() != b.l() {
        return Ok(false);
    }
    Ok(canonical_form(a)? == canonical_form(b)?)
}

struct CanonCtx<'a> {
    h: &'a Hypergraph,
    budget: u64,
    nodes: u64,
    vertex_edges: Vec<Vec<usize>>,
    best: Option<String>,
}

impl CanonCtx<'_> {
    fn search(&mut self, colors: Vec<u32>) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(Error::BudgetExceeded(self.budget));
        }
        let refined = self.refine(colors);
        match self.first_nonsingleton_cell(&refined) {
            None => {
                let s = self.serialize_discrete(&refined);
                if self.best.as_ref().map_or(true, |b| s < *b) {
                    self.best = Some(s);
                }
                Ok(())
            }
            Some(cell) => {
                for v in cell {
                    let mut next = refined.clone();
                    // Individualize v with a fresh color.
                    next[v] = u32::MAX;
                    self.search(next)?;
                }
                Ok(())
            }
        }
    }

    /// Iterated refinement: vertex colors absorb the multiset of incident
    /// edge colors, edge colors absorb size plus the multiset of member
    /// vertex colors, until stable.
    fn refine(&self, mut vcolors: Vec<u32>) -> Vec<u32> {
        let h = self.h;
        let mut ecolors = vec![0u32; h.l()];
        loop {
            let mut esig: Vec<(usize, Vec<u32>, usize)> = Vec::with_capacity(h.l());
            for (j, e) in h.edges.iter().enumerate() {
                let mut member: Vec<u32> = e.iter().map(|&v| vcolors[v]).collect();
                member.sort_unstable();
                esig.push((e.len(), member, j));
            }
            let new_ecolors = rank_signatures(&esig);

            let mut vsig: Vec<(u32, Vec<u32>, usize)> = Vec::with_capacity(h.k());
            for v in 0..h.k() {
                let mut inc: Vec<u32> = self.vertex_edges[v].iter().map(|&j| new_ecolors[j]).collect();
                inc.sort_unstable();
                vsig.push((vcolors[v], inc, v));
            }
            let new_vcolors = rank_signatures(&vsig);

            if new_vcolors == vcolors && new_ecolors == ecolors {
                return vcolors;
            }
            vcolors = new_vcolors;
            ecolors = new_ecolors;
        }
    }

    fn first_nonsingleton_cell(&self, colors: &[u32]) -> Option<Vec<usize>> {
        let mut cells: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
        for (v, &c) in colors.iter().enumerate() {
            cells.entry(c).or_default().push(v);
        }
        cells
            .into_values()
            .filter(|cell| cell.len() > 1)
            .min_by_key(|cell| cell.len())
    }

    /// With all vertex colors distinct, colors define the canonical vertex
    /// order; emit sorted edge lists over canonical indices.
    fn serialize_discrete(&self, colors: &[u32]) -> String {
        let h = self.h;
        let mut order: Vec<usize> = (0..h.k()).collect();
        order.sort_by_key(|&v| colors[v]);
        let mut canon_index = vec![0usize; h.k()];
        for (rank, &v) in order.iter().enumerate() {
            canon_index[v] = rank;
        }
        let mut edges: Vec<Vec<usize>> = h
            .edges
            .iter()
            .map(|e| {
                let mut e2: Vec<usize> = e.iter().map(|&v| canon_index[v]).collect();
                e2.sort_unstable();
                e2
            })
            .collect();
        edges.sort_unstable();
        let mut s = format!("k{};", h.k());
        for e in edges {
            for v in e {
                s.push_str(&format!("{v},"));
            }
            s.push(';');
        }
        s
    }
}

fn rank_signatures<S: Ord + Clone>(sig: &[(S, Vec<u32>, usize)]) -> Vec<u32> {
    let mut sorted: Vec<&(S, Vec<u32>, usize)> = sig.iter().collect();
    sorted.sort_by(|a, b| (&a.0, &a.1).cmp(&(&b.0, &b.1)));
    let mut out = vec![0u32; sig.len()];
    let mut color = 0u32;
    for (i, item) in sorted.iter().enumerate() {
        if i > 0 {
            let prev = sorted[i - 1];
            if (&prev.0, &prev.1) != (&item.0, &item.1) {
                color += 1;
            }
        }
        out[item.2] = color;
    }
    out
}
