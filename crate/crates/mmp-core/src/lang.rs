//! The MMP ASCII hypergraph language.
//!
//! A hypergraph is written as one string: hyperedges are substrings separated
//! by commas, the string ends with a period, and each vertex is one of 90
//! base characters, optionally prefixed by one or more `+` once the base
//! alphabet is exhausted. `12,23,34,45,51.` is the pentagon.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::fmt;

/// The 90 base characters, in index order.
pub const ALPHABET: &[u8; 90] =
    b"123456789ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz!\"#$%&'()*-/:;<=>?@[\\]^_`{|}~";

fn base_rank(c: u8) -> Option<usize> {
    ALPHABET.iter().position(|&b| b == c)
}

/// A vertex label: `p` leading `+` characters followed by one base character,
/// denoting vertex index `p * 90 + rank(base)`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct VertexLabel(pub String);

impl VertexLabel {
    /// Label for vertex index `i`.
    pub fn encode(i: usize) -> Self {
        let mut s = "+".repeat(i / 90);
        s.push(ALPHABET[i % 90] as char);
        VertexLabel(s)
    }

    /// Vertex index for this label.
    pub fn decode(&self) -> Option<usize> {
        let bytes = self.0.as_bytes();
        let prefixes = bytes.iter().take_while(|&&b| b == b'+').count();
        if prefixes + 1 != bytes.len() {
            return None;
        }
        base_rank(bytes[prefixes]).map(|r| prefixes * 90 + r)
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for VertexLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for VertexLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

/// A `k`-`l` hypergraph of declared dimension `n`: `k` labelled vertices and
/// `l` hyperedges given as lists of vertex indices. Vertex order is
/// first-occurrence order of the source string; hyperedge order and the
/// vertex order within each hyperedge are preserved.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hypergraph {
    pub n: usize,
    pub vertices: Vec<VertexLabel>,
    pub edges: Vec<Vec<usize>>,
}

impl Hypergraph {
    /// Build from raw edge lists; labels are generated from indices.
    /// `n` defaults to the maximal hyperedge cardinality (at least 3).
    pub fn from_edges(edges: Vec<Vec<usize>>, n: Option<usize>) -> Self {
        let k = edges.iter().flatten().copied().max().map_or(0, |m| m + 1);
        let max_card = edges.iter().map(|e| e.len()).max().unwrap_or(0);
        Hypergraph {
            n: n.unwrap_or_else(|| max_card.max(3)),
            vertices: (0..k).map(VertexLabel::encode).collect(),
            edges,
        }
    }

    pub fn k(&self) -> usize {
        self.vertices.len()
    }

    pub fn l(&self) -> usize {
        self.edges.len()
    }

    /// "24-24"-style order-size name.
    pub fn kl(&self) -> String {
        format!("{}-{}", self.k(), self.l())
    }

    /// Override declared dimension, keeping everything else.
    pub fn with_n(mut self, n: usize) -> Self {
        self.n = n;
        self
    }

    /// Edges incident to each vertex.
    pub fn vertex_edges(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.k()];
        for (j, e) in self.edges.iter().enumerate() {
            for &v in e {
                out[v].push(j);
            }
        }
        out
    }
}

/// One rule violation found by [`validate`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    /// Stable rule identifier, e.g. `"edge-cardinality"`.
    pub rule: String,
    /// Hyperedge or vertex the violation is anchored to, when applicable.
    pub locus: Option<usize>,
    pub message: String,
}

/// Report produced by [`validate`]; `ok()` iff no violations.
#[derive(Clone, Debug, Serialize)]
pub struct ValidationReport {
    pub strict: bool,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Parse one MMP string. Whitespace (including newlines) between tokens is
/// ignored; the string must end with `.`.
pub fn parse_mmp(text: &str) -> Result<Hypergraph> {
    let parsed = parse_one(text.as_bytes(), 0)?;
    if let Some(pos) = parsed.rest_nonblank {
        return Err(Error::Parse {
            pos,
            msg: "trailing characters after terminating '.'".into(),
        });
    }
    Ok(parsed.hypergraph)
}

struct ParsedOne {
    hypergraph: Hypergraph,
    /// Byte offset just past the terminating '.'.
    end: usize,
    /// First non-whitespace byte after the '.', if any.
    rest_nonblank: Option<usize>,
}

fn parse_one(bytes: &[u8], start: usize) -> Result<ParsedOne> {
    let mut vertices: Vec<VertexLabel> = Vec::new();
    let mut index_of: HashMap<String, usize> = HashMap::new();
    let mut edges: Vec<Vec<usize>> = Vec::new();
    let mut current: Vec<usize> = Vec::new();
    let mut plus_run = 0usize;
    let mut plus_pos = 0usize;
    let mut terminated_at: Option<usize> = None;

    let mut i = start;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        if c == b'+' {
            if plus_run == 0 {
                plus_pos = i;
            }
            plus_run += 1;
            i += 1;
            continue;
        }
        if c == b',' || c == b'.' {
            if plus_run > 0 {
                return Err(Error::Parse {
                    pos: plus_pos,
                    msg: "dangling '+' prefix".into(),
                });
            }
            if current.is_empty() {
                return Err(Error::Parse {
                    pos: i,
                    msg: "empty hyperedge".into(),
                });
            }
            edges.push(std::mem::take(&mut current));
            if c == b'.' {
                terminated_at = Some(i);
                break;
            }
            i += 1;
            continue;
        }
        match base_rank(c) {
            Some(_) => {
                let mut label = "+".repeat(plus_run);
                label.push(c as char);
                plus_run = 0;
                let next = vertices.len();
                let idx = *index_of.entry(label.clone()).or_insert_with(|| {
                    vertices.push(VertexLabel(label));
                    next
                });
                if current.contains(&idx) {
                    return Err(Error::Parse {
                        pos: i,
                        msg: format!("duplicate vertex `{}` within a hyperedge", vertices[idx]),
                    });
                }
                current.push(idx);
                i += 1;
            }
            None => {
                return Err(Error::Parse {
                    pos: i,
                    msg: format!("illegal character `{}`", c as char),
                });
            }
        }
    }

    let dot = terminated_at.ok_or(Error::Parse {
        pos: bytes.len(),
        msg: "unterminated MMP string (missing '.')".into(),
    })?;
    let rest_nonblank = bytes[dot + 1..]
        .iter()
        .position(|b| !b.is_ascii_whitespace())
        .map(|off| dot + 1 + off);

    let max_card = edges.iter().map(|e| e.len()).max().unwrap_or(0);
    Ok(ParsedOne {
        hypergraph: Hypergraph {
            n: max_card.max(3),
            vertices,
            edges,
        },
        end: dot + 1,
        rest_nonblank,
    })
}

/// Parse a multi-hypergraph text: one MMP string per line, `#` lines are
/// comments, and a single string may span lines until its `.`.
pub fn parse_mmp_file(text: &str) -> Result<Vec<Hypergraph>> {
    let mut cleaned = String::new();
    for line in text.lines() {
        if line.trim_start().starts_with('#') {
            continue;
        }
        cleaned.push_str(line);
        cleaned.push('\n');
    }
    let bytes = cleaned.as_bytes();
    let mut out = Vec::new();
    let mut pos = 0usize;
    while bytes[pos..].iter().any(|b| !b.is_ascii_whitespace()) {
        let parsed = parse_one(bytes, pos)?;
        pos = parsed.end;
        out.push(parsed.hypergraph);
    }
    Ok(out)
}

/// Serialize back to the MMP string form. Inverse of [`parse_mmp`] up to
/// whitespace.
pub fn serialize_mmp(h: &Hypergraph) -> String {
    let mut s = String::new();
    for (j, e) in h.edges.iter().enumerate() {
        if j > 0 {
            s.push(',');
        }
        for &v in e {
            s.push_str(h.vertices[v].as_str());
        }
    }
    s.push('.');
    s
}

/// Check the structural conditions of an MMP hypergraph.
///
/// Lenient mode checks that every vertex occurs in some hyperedge, that each
/// hyperedge has between 2 and `n` distinct vertices, and that two hyperedges
/// never share more than `n - 2` vertices. Strict mode additionally rejects
/// duplicate hyperedges, requires each hyperedge of a multi-edge hypergraph
/// to share at least two vertices with the union of the others, and requires
/// connectedness. Master sets and ad-hoc unions may legitimately fail strict
/// mode.
pub fn validate(h: &Hypergraph, strict: bool) -> ValidationReport {
    let mut violations = Vec::new();
    let mut push = |rule: &str, locus: Option<usize>, message: String| {
        violations.push(Violation {
            rule: rule.to_string(),
            locus,
            message,
        });
    };

    if h.n < 3 {
        push("dimension", None, format!("hypergraph-dimension {} < 3", h.n));
    }

    let mut seen = vec![false; h.k()];
    for (j, e) in h.edges.iter().enumerate() {
        let mut sorted = e.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != e.len() {
            push("edge-distinct", Some(j), "repeated vertex within hyperedge".into());
        }
        if e.len() < 2 || e.len() > h.n {
            push(
                "edge-cardinality",
                Some(j),
                format!("hyperedge has {} vertices, allowed 2..={}", e.len(), h.n),
            );
        }
        for &v in e {
            if v >= h.k() {
                push("vertex-range", Some(j), format!("vertex index {v} out of range"));
            } else {
                seen[v] = true;
            }
        }
    }
    for (v, s) in seen.iter().enumerate() {
        if !s {
            push("vertex-covered", Some(v), format!("vertex `{}` lies in no hyperedge", h.vertices[v]));
        }
    }

    // Pairwise intersections at most n - 2.
    let sets: Vec<Vec<usize>> = h
        .edges
        .iter()
        .map(|e| {
            let mut s = e.clone();
            s.sort_unstable();
            s
        })
        .collect();
    for a in 0..sets.len() {
        for b in a + 1..sets.len() {
            let inter = intersection_size(&sets[a], &sets[b]);
            if inter > h.n.saturating_sub(2) {
                push(
                    "edge-intersection",
                    Some(b),
                    format!("hyperedges {a} and {b} share {inter} vertices (max {})", h.n - 2),
                );
            }
            if strict && sets[a] == sets[b] {
                push("edge-duplicate", Some(b), format!("hyperedge {b} duplicates {a}"));
            }
        }
    }

    if strict {
        // Each hyperedge shares >= 2 vertices with the union of all others.
        if h.l() >= 2 {
            for (j, e) in h.edges.iter().enumerate() {
                let mut shared = 0;
                for &v in e {
                    if h.edges
                        .iter()
                        .enumerate()
                        .any(|(j2, e2)| j2 != j && e2.contains(&v))
                    {
                        shared += 1;
                    }
                }
                if shared < 2 {
                    push(
                        "edge-attachment",
                        Some(j),
                        format!("hyperedge {j} shares only {shared} vertex(es) with the rest"),
                    );
                }
            }
        }
        if components_of(h).len() > 1 {
            push("connected", None, "hypergraph is disconnected".into());
        }
    }

    ValidationReport { strict, violations }
}

fn intersection_size(a: &[usize], b: &[usize]) -> usize {
    let (mut i, mut j, mut n) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                n += 1;
                i += 1;
                j += 1;
            }
        }
    }
    n
}

/// Incidence matrix: `k` rows (vertices) by `l` columns (hyperedges),
/// entry 1 iff the vertex lies in the hyperedge.
pub fn export_incidence(h: &Hypergraph) -> Vec<Vec<u8>> {
    let mut m = vec![vec![0u8; h.l()]; h.k()];
    for (j, e) in h.edges.iter().enumerate() {
        for &v in e {
            m[v][j] = 1;
        }
    }
    m
}

/// Incidence matrix as CSV, header row carrying hyperedge indices.
pub fn export_incidence_csv(h: &Hypergraph) -> String {
    let m = export_incidence(h);
    let mut s = String::from("vertex");
    for j in 0..h.l() {
        s.push_str(&format!(",e{j}"));
    }
    s.push('\n');
    for (v, row) in m.iter().enumerate() {
        s.push_str(h.vertices[v].as_str());
        for cell in row {
            s.push_str(&format!(",{cell}"));
        }
        s.push('\n');
    }
    s
}

const DOT_COLORS: &[&str] = &[
    "red", "blue", "darkgreen", "orange", "purple", "brown", "magenta", "cyan4", "gold3",
    "gray40",
];

/// DOT rendering: vertices as nodes, each hyperedge as a colored path
/// through its vertices. Deterministic.
pub fn export_dot(h: &Hypergraph) -> String {
    let mut s = String::from("graph mmp {\n  node [shape=circle];\n");
    for v in &h.vertices {
        s.push_str(&format!("  {:?};\n", v.as_str()));
    }
    for (j, e) in h.edges.iter().enumerate() {
        let color = DOT_COLORS[j % DOT_COLORS.len()];
        for w in e.windows(2) {
            s.push_str(&format!(
                "  {:?} -- {:?} [color={color}];\n",
                h.vertices[w[0]].as_str(),
                h.vertices[w[1]].as_str()
            ));
        }
    }
    s.push_str("}\n");
    s
}

fn components_of(h: &Hypergraph) -> Vec<Vec<usize>> {
    // Union-find over vertices, then group edges by their root.
    let mut parent: Vec<usize> = (0..h.k()).collect();
    fn find(parent: &mut Vec<usize>, x: usize) -> usize {
        if parent[x] != x {
            let r = find(parent, parent[x]);
            parent[x] = r;
        }
        parent[x]
    }
    for e in &h.edges {
        for w in e.windows(2) {
            let (a, b) = (find(&mut parent, w[0]), find(&mut parent, w[1]));
            if a != b {
                parent[a] = b;
            }
        }
    }
    let mut groups: HashMap<usize, Vec<usize>> = HashMap::new();
    for (j, e) in h.edges.iter().enumerate() {
        let root = find(&mut parent, e[0]);
        groups.entry(root).or_default().push(j);
    }
    let mut comps: Vec<Vec<usize>> = groups.into_values().collect();
    comps.sort_by_key(|c| c.iter().copied().min());
    comps
}

/// Split into connected components (vertices shared implies same component).
/// Each component is re-indexed; components are ordered by descending `l`,
/// then descending `k`.
pub fn decompose_components(h: &Hypergraph) -> Vec<Hypergraph> {
    let mut out = Vec::new();
    for comp in components_of(h) {
        let mut map: HashMap<usize, usize> = HashMap::new();
        let mut vertices = Vec::new();
        let mut edges = Vec::new();
        for &j in &comp {
            let mut edge = Vec::new();
            for &v in &h.edges[j] {
                let next = vertices.len();
                let idx = *map.entry(v).or_insert_with(|| {
                    vertices.push(h.vertices[v].clone());
                    next
                });
                edge.push(idx);
            }
            edges.push(edge);
        }
        out.push(Hypergraph {
            n: h.n,
            vertices,
            edges,
        });
    }
    out.sort_by(|a, b| (b.l(), b.k()).cmp(&(a.l(), a.k())));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn label_codec_roundtrip() {
        for i in 0..=10_000 {
            assert_eq!(VertexLabel::encode(i).decode(), Some(i));
        }
        assert_eq!(VertexLabel::encode(0).as_str(), "1");
        assert_eq!(VertexLabel::encode(89).as_str(), "~");
        assert_eq!(VertexLabel::encode(90).as_str(), "+1");
        assert_eq!(VertexLabel::encode(180).as_str(), "++1");
    }

    #[test]
    fn parse_pentagon() {
        let h = parse_mmp("12,23,34,45,51.").unwrap();
        assert_eq!(h.k(), 5);
        assert_eq!(h.l(), 5);
        assert_eq!(h.edges, vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![3, 4], vec![4, 0]]);
        assert_eq!(h.n, 3);
        assert_eq!(serialize_mmp(&h), "12,23,34,45,51.");
    }

    #[test]
    fn parse_single_edge() {
        let h = parse_mmp("123.").unwrap();
        assert_eq!((h.k(), h.l()), (3, 1));
        assert_eq!(h.n, 3);
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(parse_mmp("12,23"), Err(Error::Parse { .. })));
        assert!(matches!(parse_mmp("12,,23."), Err(Error::Parse { .. })));
        assert!(matches!(parse_mmp("1 2,2+."), Err(Error::Parse { .. })));
        assert!(matches!(parse_mmp("11,23."), Err(Error::Parse { .. })));
        assert!(matches!(parse_mmp("12,2\x07."), Err(Error::Parse { .. })));
        // '+' must bind to a base character, not a comma.
        assert!(matches!(parse_mmp("1+,23."), Err(Error::Parse { .. })));
    }

    #[test]
    fn plus_prefix_labels() {
        let h = parse_mmp("1+1,+1+2.").unwrap();
        assert_eq!(h.k(), 3);
        assert_eq!(h.vertices[1].as_str(), "+1");
        assert_eq!(h.vertices[2].as_str(), "+2");
        assert_eq!(serialize_mmp(&h), "1+1,+1+2.");
    }

    #[test]
    fn serialize_91_vertices() {
        // 90 single-char labels, then "+1".
        let edges: Vec<Vec<usize>> = (0..90).map(|i| vec![i, i + 1]).collect();
        let h = Hypergraph::from_edges(edges, None);
        assert_eq!(h.vertices[90].as_str(), "+1");
        let s = serialize_mmp(&h);
        assert_eq!(parse_mmp(&s).unwrap(), h);
    }

    #[test]
    fn whitespace_and_multiline() {
        let h = parse_mmp("12,\n 23,34,\t45,51 .").unwrap();
        assert_eq!(h.l(), 5);
        let list = parse_mmp_file("# comment\n12,23,34,45,51.\n123.\n").unwrap();
        assert_eq!(list.len(), 2);
        let spanning = parse_mmp_file("12,23,\n34,45,51.\n").unwrap();
        assert_eq!(spanning[0].l(), 5);
    }

    #[test]
    fn validate_pentagon_strict() {
        let h = parse_mmp("12,23,34,45,51.").unwrap();
        assert!(validate(&h, true).ok());
    }

    #[test]
    fn validate_disconnected() {
        let h = parse_mmp("12,34.").unwrap();
        let lenient = validate(&h, false);
        assert!(lenient.ok());
        let strict = validate(&h, true);
        assert!(!strict.ok());
        assert!(strict.violations.iter().any(|v| v.rule == "connected"));
    }

    #[test]
    fn validate_intersection_bound() {
        // Two 4-dim hyperedges sharing 3 vertices violate the n-2 bound.
        let h = Hypergraph::from_edges(vec![vec![0, 1, 2, 3], vec![0, 1, 2, 4]], Some(4));
        let rep = validate(&h, false);
        assert!(rep.violations.iter().any(|v| v.rule == "edge-intersection"));
    }

    #[test]
    fn incidence_shapes() {
        let pentagon = parse_mmp("12,23,34,45,51.").unwrap();
        let m = export_incidence(&pentagon);
        assert_eq!(m.len(), 5);
        for j in 0..5 {
            let col: u8 = (0..5).map(|v| m[v][j]).sum();
            assert_eq!(col, 2);
        }
        let single = parse_mmp("123.").unwrap();
        assert_eq!(export_incidence(&single), vec![vec![1], vec![1], vec![1]]);
    }

    #[test]
    fn dot_is_deterministic() {
        let h = parse_mmp("12,23,34,45,51.").unwrap();
        let a = export_dot(&h);
        let b = export_dot(&h);
        assert_eq!(a, b);
        assert_eq!(a.matches("--").count(), 5);
    }

    #[test]
    fn decompose_two_components() {
        let h = parse_mmp("12,34.").unwrap();
        let comps = decompose_components(&h);
        assert_eq!(comps.len(), 2);
        assert!(comps.iter().all(|c| c.k() == 2 && c.l() == 1));
        let pentagon = parse_mmp("12,23,34,45,51.").unwrap();
        assert_eq!(decompose_components(&pentagon).len(), 1);
    }
}
