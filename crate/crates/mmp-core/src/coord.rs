//! Complex vector arithmetic for vertices: coordinatization verification and
//! search, vector enumeration from small component pools, master-set
//! generation, hyperedge filling, and the operator-product identities.
//!
//! Scalars keep an exact representation when they live in the Gaussian
//! (`a + b i`) or Eisenstein (`a + b w`, `w = exp(2 pi i / 3)`) integers, so
//! orthogonality of such vectors is decided exactly; everything else falls
//! back to complex doubles with a relative tolerance.

use crate::error::{Error, Result};
use crate::lang::{Hypergraph, VertexLabel};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::fmt;

pub const DEFAULT_EPS: f64 = 1e-10;

/// Complex double.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct C64 {
    pub re: f64,
    pub im: f64,
}

impl C64 {
    pub const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

    pub fn new(re: f64, im: f64) -> Self {
        C64 { re, im }
    }

    pub fn conj(self) -> Self {
        C64::new(self.re, -self.im)
    }

    pub fn mul(self, o: C64) -> Self {
        C64::new(
            self.re * o.re - self.im * o.im,
            self.re * o.im + self.im * o.re,
        )
    }

    pub fn add(self, o: C64) -> Self {
        C64::new(self.re + o.re, self.im + o.im)
    }

    pub fn sub(self, o: C64) -> Self {
        C64::new(self.re - o.re, self.im - o.im)
    }

    pub fn scale(self, s: f64) -> Self {
        C64::new(self.re * s, self.im * s)
    }

    pub fn div(self, o: C64) -> Self {
        let d = o.re * o.re + o.im * o.im;
        C64::new(
            (self.re * o.re + self.im * o.im) / d,
            (self.im * o.re - self.re * o.im) / d,
        )
    }

    pub fn norm(self) -> f64 {
        self.re.hypot(self.im)
    }

    pub fn norm_sqr(self) -> f64 {
        self.re * self.re + self.im * self.im
    }
}

/// A scalar with exact provenance where possible.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Scalar {
    /// `a + b i`.
    Gauss(i64, i64),
    /// `a + b w` with `w = exp(2 pi i / 3)`.
    Eisenstein(i64, i64),
    Float(C64),
}

impl Scalar {
    pub const ZERO: Scalar = Scalar::Gauss(0, 0);

    pub fn integer(a: i64) -> Self {
        Scalar::Gauss(a, 0)
    }

    pub fn to_c64(self) -> C64 {
        match self {
            Scalar::Gauss(a, b) => C64::new(a as f64, b as f64),
            Scalar::Eisenstein(a, b) => {
                // w = -1/2 + sqrt(3)/2 i
                C64::new(a as f64 - b as f64 / 2.0, b as f64 * 3f64.sqrt() / 2.0)
            }
            Scalar::Float(c) => c,
        }
    }

    pub fn is_zero(self) -> bool {
        match self {
            Scalar::Gauss(a, b) | Scalar::Eisenstein(a, b) => a == 0 && b == 0,
            Scalar::Float(c) => c.re == 0.0 && c.im == 0.0,
        }
    }

    fn conj(self) -> Self {
        match self {
            Scalar::Gauss(a, b) => Scalar::Gauss(a, -b),
            // conj(w) = w^2 = -1 - w
            Scalar::Eisenstein(a, b) => Scalar::Eisenstein(a - b, -b),
            Scalar::Float(c) => Scalar::Float(c.conj()),
        }
    }

    fn mul(self, o: Scalar) -> Option<Scalar> {
        match (self, o) {
            (Scalar::Gauss(a, b), Scalar::Gauss(c, d)) => {
                Some(Scalar::Gauss(a * c - b * d, a * d + b * c))
            }
            // (a + b w)(c + d w) = ac + (ad + bc) w + bd w^2, w^2 = -1 - w
            (Scalar::Eisenstein(a, b), Scalar::Eisenstein(c, d)) => {
                Some(Scalar::Eisenstein(a * c - b * d, a * d + b * c - b * d))
            }
            _ => None,
        }
    }

    fn add(self, o: Scalar) -> Option<Scalar> {
        match (self, o) {
            (Scalar::Gauss(a, b), Scalar::Gauss(c, d)) => Some(Scalar::Gauss(a + c, b + d)),
            (Scalar::Eisenstein(a, b), Scalar::Eisenstein(c, d)) => {
                Some(Scalar::Eisenstein(a + c, b + d))
            }
            _ => None,
        }
    }

    /// Promote plain integers into the other exact ring when mixing.
    fn unify(self, o: Scalar) -> Option<(Scalar, Scalar)> {
        use Scalar::*;
        match (self, o) {
            (Gauss(a, 0), Eisenstein(c, d)) => Some((Eisenstein(a, 0), Eisenstein(c, d))),
            (Eisenstein(a, b), Gauss(c, 0)) => Some((Eisenstein(a, b), Eisenstein(c, 0))),
            (Gauss(..), Gauss(..)) | (Eisenstein(..), Eisenstein(..)) => Some((self, o)),
            _ => None,
        }
    }
}

/// A nonzero complex vector of dimension `n`, kept both in exact form (when
/// available) and as floats.
#[derive(Clone, Debug)]
pub struct CVector {
    pub entries: Vec<Scalar>,
}

impl CVector {
    pub fn new(entries: Vec<Scalar>) -> Self {
        CVector { entries }
    }

    pub fn from_c64(entries: Vec<C64>) -> Self {
        CVector {
            entries: entries.into_iter().map(Scalar::Float).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn to_c64(&self) -> Vec<C64> {
        self.entries.iter().map(|s| s.to_c64()).collect()
    }

    pub fn norm(&self) -> f64 {
        self.to_c64().iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|s| s.is_zero())
    }

    /// Conjugate-linear inner product `<self, other> = sum conj(a_i) b_i`,
    /// exact when both vectors live in a common exact ring.
    pub fn dot(&self, other: &CVector) -> DotResult {
        debug_assert_eq!(self.dim(), other.dim());
        let mut acc = Scalar::Gauss(0, 0);
        let mut exact = true;
        for (a, b) in self.entries.iter().zip(&other.entries) {
            match a.conj().unify(*b).and_then(|(x, y)| x.mul(y)) {
                Some(prod) => match acc.unify(prod).and_then(|(x, y)| x.add(y)) {
                    Some(sum) => acc = sum,
                    None => {
                        exact = false;
                        break;
                    }
                },
                None => {
                    exact = false;
                    break;
                }
            }
        }
        if exact {
            DotResult::Exact(acc)
        } else {
            let mut c = C64::ZERO;
            for (a, b) in self.entries.iter().zip(&other.entries) {
                c = c.add(a.to_c64().conj().mul(b.to_c64()));
            }
            DotResult::Approx(c)
        }
    }

    /// Scale-invariant orthogonality test at relative tolerance `eps`.
    pub fn orthogonal(&self, other: &CVector, eps: f64) -> bool {
        match self.dot(other) {
            DotResult::Exact(s) => s.is_zero(),
            DotResult::Approx(c) => c.norm() <= eps * self.norm() * other.norm(),
        }
    }

    /// Projective canonical form: divide by the first entry of largest
    /// modulus, so that entry becomes exactly 1.
    pub fn canonicalize(&self) -> Vec<C64> {
        let floats = self.to_c64();
        let mut pivot = 0usize;
        let mut best = -1.0f64;
        for (i, c) in floats.iter().enumerate() {
            let m = c.norm();
            if m > best + 1e-12 {
                best = m;
                pivot = i;
            }
        }
        let p = floats[pivot];
        floats.iter().map(|c| c.div(p)).collect()
    }

    /// Projective equivalence within `eps`.
    pub fn same_ray(&self, other: &CVector, eps: f64) -> bool {
        if self.dim() != other.dim() {
            return false;
        }
        let a = self.canonicalize();
        let b = other.canonicalize();
        a.iter()
            .zip(&b)
            .all(|(x, y)| x.sub(*y).norm() <= eps * (1.0 + x.norm().max(y.norm())))
    }
}

pub enum DotResult {
    Exact(Scalar),
    Approx(C64),
}

impl DotResult {
    pub fn to_c64(&self) -> C64 {
        match self {
            DotResult::Exact(s) => s.to_c64(),
            DotResult::Approx(c) => *c,
        }
    }
}

/// A pool of scalar atoms used to build vectors.
#[derive(Clone, Debug)]
pub struct ComponentSet {
    pub atoms: Vec<Scalar>,
    pub eps: f64,
    source: String,
}

impl fmt::Display for ComponentSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.source)
    }
}

impl ComponentSet {
    /// Parse a comma-separated component list. Tokens: integers, decimals,
    /// `i`, `w` (= exp(2 pi i/3)), `w2` (= conj w), `r2`/`r3`/`r5` for square
    /// roots, `tau` for the golden ratio, with optional sign and integer
    /// multiplier prefix, e.g. `0,1,-1,2w,-r2`.
    pub fn parse(text: &str) -> Result<ComponentSet> {
        let mut atoms = Vec::new();
        for raw in text.split(',') {
            let tok = raw.trim();
            if tok.is_empty() {
                continue;
            }
            let atom = parse_atom(tok)
                .ok_or_else(|| Error::Coord(format!("unrecognized component token `{tok}`")))?;
            if !atoms.iter().any(|&a| scalar_close(a, atom)) {
                atoms.push(atom);
            }
        }
        if atoms.is_empty() {
            return Err(Error::Coord("empty component set".into()));
        }
        Ok(ComponentSet {
            atoms,
            eps: DEFAULT_EPS,
            source: text.split(',').map(str::trim).collect::<Vec<_>>().join(","),
        })
    }
}

fn scalar_close(a: Scalar, b: Scalar) -> bool {
    a.to_c64().sub(b.to_c64()).norm() <= 1e-12
}

fn parse_atom(tok: &str) -> Option<Scalar> {
    // Optional sign, optional integer coefficient, then a base symbol.
    let (sign, rest) = match tok.strip_prefix('-') {
        Some(r) => (-1i64, r),
        None => (1i64, tok),
    };
    let digits: String = rest.chars().take_while(|c| c.is_ascii_digit()).collect();
    let symbol = &rest[digits.len()..];
    let coef: i64 = if digits.is_empty() {
        1
    } else {
        digits.parse().ok()?
    };
    let coef = sign * coef;
    match symbol {
        "" => {
            if digits.is_empty() {
                None
            } else if rest.contains('.') {
                None
            } else {
                Some(Scalar::Gauss(coef, 0))
            }
        }
        "i" => Some(Scalar::Gauss(0, coef)),
        "w" => Some(Scalar::Eisenstein(0, coef)),
        "w2" => Some(Scalar::Eisenstein(-coef, -coef)), // w^2 = -1 - w
        "r2" => Some(Scalar::Float(C64::new(coef as f64 * 2f64.sqrt(), 0.0))),
        "r3" => Some(Scalar::Float(C64::new(coef as f64 * 3f64.sqrt(), 0.0))),
        "r5" => Some(Scalar::Float(C64::new(coef as f64 * 5f64.sqrt(), 0.0))),
        "tau" => Some(Scalar::Float(C64::new(
            coef as f64 * (1.0 + 5f64.sqrt()) / 2.0,
            0.0,
        ))),
        _ => {
            // Decimal literal, e.g. "1.5".
            tok.parse::<f64>().ok().map(|v| Scalar::Float(C64::new(v, 0.0)))
        }
    }
}

/// A map vertex index -> vector.
#[derive(Clone, Debug)]
pub struct Coordinatization {
    pub vecs: Vec<CVector>,
    pub eps: f64,
}

impl Coordinatization {
    pub fn new(vecs: Vec<CVector>) -> Self {
        Coordinatization {
            vecs,
            eps: DEFAULT_EPS,
        }
    }

    /// JSON object mapping vertex label to an array of `[re, im]` pairs.
    pub fn to_json(&self, h: &Hypergraph) -> serde_json::Value {
        let mut map = serde_json::Map::new();
        for (v, vec) in self.vecs.iter().enumerate() {
            let entries: Vec<serde_json::Value> = vec
                .to_c64()
                .iter()
                .map(|c| serde_json::json!([c.re, c.im]))
                .collect();
            map.insert(h.vertices[v].as_str().to_string(), entries.into());
        }
        map.into()
    }

    pub fn from_json(h: &Hypergraph, value: &serde_json::Value) -> Result<Coordinatization> {
        let obj = value
            .as_object()
            .ok_or_else(|| Error::Coord("coordinatization JSON must be an object".into()))?;
        let mut vecs = Vec::with_capacity(h.k());
        for label in &h.vertices {
            let arr = obj
                .get(label.as_str())
                .and_then(|v| v.as_array())
                .ok_or_else(|| Error::Coord(format!("missing vector for vertex `{label}`")))?;
            let mut entries = Vec::with_capacity(arr.len());
            for pair in arr {
                let p = pair
                    .as_array()
                    .filter(|p| p.len() == 2)
                    .ok_or_else(|| Error::Coord("vector entries must be [re, im] pairs".into()))?;
                entries.push(C64::new(
                    p[0].as_f64().unwrap_or(f64::NAN),
                    p[1].as_f64().unwrap_or(f64::NAN),
                ));
            }
            vecs.push(CVector::from_c64(entries));
        }
        Ok(Coordinatization::new(vecs))
    }
}

/// Check mutual orthogonality inside every hyperedge; returns all violating
/// pairs `(edge, vertex, vertex)`.
pub fn verify_coordinatization(
    h: &Hypergraph,
    c: &Coordinatization,
) -> (bool, Vec<(usize, usize, usize)>) {
    let mut violations = Vec::new();
    for (j, e) in h.edges.iter().enumerate() {
        for a in 0..e.len() {
            for b in a + 1..e.len() {
                let (u, v) = (e[a], e[b]);
                if !c.vecs[u].orthogonal(&c.vecs[v], c.eps) {
                    violations.push((j, u, v));
                }
            }
        }
    }
    (violations.is_empty(), violations)
}

const ENUM_BUDGET: u64 = 40_000_000;

/// All projectively inequivalent nonzero `n`-tuples over the atom pool, in
/// deterministic enumeration order.
pub fn enumerate_vectors(cs: &ComponentSet, n: usize) -> Result<Vec<CVector>> {
    let m = cs.atoms.len() as u64;
    let total = m.checked_pow(n as u32).ok_or_else(|| {
        Error::TooLarge(format!("{}^{n} tuples", cs.atoms.len()))
    })?;
    if total > ENUM_BUDGET {
        return Err(Error::TooLarge(format!(
            "{}^{n} = {total} tuples exceeds enumeration budget",
            cs.atoms.len()
        )));
    }
    // Enumerate odometer-style, first entry most significant.
    let mut reps: Vec<CVector> = Vec::new();
    let mut keys: HashMap<u64, Vec<usize>> = HashMap::new();
    let mut idx = vec![0usize; n];
    loop {
        let v = CVector::new(idx.iter().map(|&i| cs.atoms[i]).collect());
        if !v.is_zero() {
            let canon = v.canonicalize();
            let key = quantize_key(&canon);
            let bucket = keys.entry(key).or_default();
            let duplicate = bucket.iter().any(|&r| reps[r].same_ray(&v, cs.eps));
            if !duplicate {
                bucket.push(reps.len());
                reps.push(v);
            }
        }
        // Advance.
        let mut pos = n;
        loop {
            if pos == 0 {
                return Ok(reps);
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < cs.atoms.len() {
                break;
            }
            idx[pos] = 0;
        }
    }
}

fn quantize_key(canon: &[C64]) -> u64 {
    // Hash canonical entries rounded to 1e-6; exact collisions fall back to
    // pairwise ray comparison.
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for c in canon {
        for part in [c.re, c.im] {
            let q = (part * 1e6).round() as i64;
            hash ^= q as u64;
            hash = hash.wrapping_mul(0x1000_0000_01b3);
        }
    }
    hash
}

/// Generate the master hypergraph of a component pool: vertices are the
/// enumerated rays that participate in at least one orthogonal `n`-basis,
/// hyperedges are all such bases.
pub fn generate_master(cs: &ComponentSet, n: usize) -> Result<(Hypergraph, Coordinatization)> {
    let rays = enumerate_vectors(cs, n)?;
    let m = rays.len();
    // Orthogonality adjacency.
    let words = m.div_ceil(64);
    let mut adj = vec![vec![0u64; words]; m];
    for a in 0..m {
        for b in a + 1..m {
            if rays[a].orthogonal(&rays[b], cs.eps) {
                adj[a][b / 64] |= 1 << (b % 64);
                adj[b][a / 64] |= 1 << (a % 64);
            }
        }
    }
    // Enumerate n-cliques in ascending index order.
    let mut bases: Vec<Vec<usize>> = Vec::new();
    let mut clique = Vec::with_capacity(n);
    let mut stack_cand: Vec<Vec<usize>> = vec![(0..m).collect()];
    fn extend(
        adj: &[Vec<u64>],
        n: usize,
        clique: &mut Vec<usize>,
        cands: &mut Vec<Vec<usize>>,
        bases: &mut Vec<Vec<usize>>,
    ) {
        if clique.len() == n {
            bases.push(clique.clone());
            return;
        }
        let cand = cands.last().unwrap().clone();
        for (i, &v) in cand.iter().enumerate() {
            // Prune when not enough candidates remain.
            if cand.len() - i < n - clique.len() {
                break;
            }
            let next: Vec<usize> = cand[i + 1..]
                .iter()
                .copied()
                .filter(|&u| adj[v][u / 64] >> (u % 64) & 1 == 1)
                .collect();
            if next.len() + 1 + clique.len() < n {
                continue;
            }
            clique.push(v);
            cands.push(next);
            extend(adj, n, clique, cands, bases);
            cands.pop();
            clique.pop();
        }
    }
    extend(&adj, n, &mut clique, &mut stack_cand, &mut bases);

    // Keep only rays that appear in a basis; re-index in first-appearance
    // order over the sorted basis list.
    let mut map: HashMap<usize, usize> = HashMap::new();
    let mut vecs = Vec::new();
    let mut edges = Vec::new();
    for basis in &bases {
        let mut edge = Vec::with_capacity(n);
        for &r in basis {
            let next = map.len();
            let idx = *map.entry(r).or_insert_with(|| {
                vecs.push(rays[r].clone());
                next
            });
            edge.push(idx);
        }
        edges.push(edge);
    }
    let h = Hypergraph {
        n,
        vertices: (0..vecs.len()).map(VertexLabel::encode).collect(),
        edges,
    };
    Ok((h, Coordinatization::new(vecs)))
}

/// Extend every hyperedge with fresh multiplicity-1 vertices carrying an
/// orthonormal basis of the orthogonal complement of its current span, so
/// each hyperedge holds a full `n`-basis.
pub fn fill(h: &Hypergraph, c: &Coordinatization) -> Result<(Hypergraph, Coordinatization)> {
    let n = h.n;
    let mut vertices = h.vertices.clone();
    let mut vecs = c.vecs.clone();
    let mut edges = Vec::with_capacity(h.l());
    let mut next_fresh = h.k();
    for e in &h.edges {
        let mut edge = e.clone();
        if e.len() < n {
            let span: Vec<Vec<C64>> = e.iter().map(|&v| c.vecs[v].to_c64()).collect();
            let complement = orthogonal_complement(&span, n).ok_or_else(|| {
                Error::Coord("hyperedge vectors are linearly dependent".into())
            })?;
            if complement.len() != n - e.len() {
                return Err(Error::Coord(
                    "hyperedge vectors are linearly dependent".into(),
                ));
            }
            for w in complement {
                let idx = vecs.len();
                vertices.push(VertexLabel::encode(next_fresh));
                next_fresh += 1;
                vecs.push(CVector::from_c64(w));
                edge.push(idx);
            }
        }
        edges.push(edge);
    }
    let filled = Hypergraph {
        n,
        vertices,
        edges,
    };
    Ok((filled, Coordinatization::new(vecs)))
}

/// Orthonormal basis of the orthogonal complement of `span` inside C^n,
/// by Gram-Schmidt over the standard basis projected off the span.
/// Returns `None` when the span vectors are linearly dependent.
fn orthogonal_complement(span: &[Vec<C64>], n: usize) -> Option<Vec<Vec<C64>>> {
    let mut ortho: Vec<Vec<C64>> = Vec::new();
    for v in span {
        let mut w = v.clone();
        project_off(&mut w, &ortho);
        let norm = vec_norm(&w);
        if norm <= 1e-9 * vec_norm(v).max(1.0) {
            return None;
        }
        normalize(&mut w, norm);
        ortho.push(w);
    }
    let span_rank = ortho.len();
    let mut out = Vec::new();
    for i in 0..n {
        if ortho.len() == n {
            break;
        }
        let mut e = vec![C64::ZERO; n];
        e[i] = C64::new(1.0, 0.0);
        project_off(&mut e, &ortho);
        let norm = vec_norm(&e);
        if norm > 1e-9 {
            normalize(&mut e, norm);
            ortho.push(e.clone());
            out.push(e);
        }
    }
    debug_assert_eq!(out.len(), n - span_rank);
    Some(out)
}

fn project_off(v: &mut [C64], basis: &[Vec<C64>]) {
    for b in basis {
        let mut coeff = C64::ZERO;
        for (x, y) in b.iter().zip(v.iter()) {
            coeff = coeff.add(x.conj().mul(*y));
        }
        for (x, y) in b.iter().zip(v.iter_mut()) {
            *y = y.sub(x.mul(coeff));
        }
    }
}

fn vec_norm(v: &[C64]) -> f64 {
    v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

fn normalize(v: &mut [C64], norm: f64) {
    for c in v.iter_mut() {
        *c = c.scale(1.0 / norm);
    }
}

/// Outcome of a coordinatization search.
#[derive(Clone, Debug)]
pub enum VecfindOutcome {
    Found(Coordinatization),
    /// Search space exhausted: no coordinatization over this pool exists.
    ProvedNone,
    /// Budget ran out before the space was exhausted.
    Unknown,
}

/// Backtracking assignment of enumerated rays to vertices so that every
/// hyperedge is mutually orthogonal, distinct vertices get distinct rays,
/// and each deficient hyperedge stays completable by fresh distinct rays.
/// Deterministic for a fixed seed.
pub fn vecfind(
    h: &Hypergraph,
    cs: &ComponentSet,
    budget: u64,
    seed: u64,
) -> Result<VecfindOutcome> {
    let rays = enumerate_vectors(cs, h.n)?;
    let mut order: Vec<usize> = (0..rays.len()).collect();
    if seed != 0 {
        let mut state = seed;
        for i in (1..order.len()).rev() {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            order.swap(i, (state >> 33) as usize % (i + 1));
        }
    }
    let adj = crate::assign::adjacency(h);
    let mut ctx = VecfindCtx {
        h,
        rays: &rays,
        order: &order,
        adj,
        eps: cs.eps,
        assignment: vec![usize::MAX; h.k()],
        nodes: 0,
        budget,
        exhausted: true,
    };
    let found = ctx.search()?;
    match found {
        Some(assignment) => {
            let vecs = assignment.iter().map(|&r| rays[r].clone()).collect();
            let coord = Coordinatization::new(vecs);
            debug_assert!(verify_coordinatization(h, &coord).0);
            Ok(VecfindOutcome::Found(coord))
        }
        None if ctx.exhausted => Ok(VecfindOutcome::ProvedNone),
        None => Ok(VecfindOutcome::Unknown),
    }
}

struct VecfindCtx<'a> {
    h: &'a Hypergraph,
    rays: &'a [CVector],
    order: &'a [usize],
    adj: Vec<crate::assign::BitSet>,
    eps: f64,
    assignment: Vec<usize>,
    nodes: u64,
    budget: u64,
    exhausted: bool,
}

impl VecfindCtx<'_> {
    fn search(&mut self) -> Result<Option<Vec<usize>>> {
        self.nodes += 1;
        if self.nodes > self.budget {
            self.exhausted = false;
            return Ok(None);
        }
        // Most-constrained unassigned vertex: most assigned orthogonality
        // partners, ties toward smaller index.
        let next = (0..self.h.k())
            .filter(|&v| self.assignment[v] == usize::MAX)
            .max_by_key(|&v| {
                (
                    self.adj[v]
                        .iter_ones()
                        .filter(|&u| self.assignment[u] != usize::MAX)
                        .count(),
                    std::cmp::Reverse(v),
                )
            });
        let Some(v) = next else {
            return if self.fills_feasible() {
                Ok(Some(self.assignment.clone()))
            } else {
                Ok(None)
            };
        };
        let partners: Vec<usize> = self.adj[v]
            .iter_ones()
            .filter(|&u| self.assignment[u] != usize::MAX)
            .collect();
        for &r in self.order {
            // Globally distinct rays.
            if self.assignment.iter().any(|&a| a == r) {
                continue;
            }
            if partners
                .iter()
                .all(|&u| self.rays[r].orthogonal(&self.rays[self.assignment[u]], self.eps))
            {
                self.assignment[v] = r;
                if let Some(found) = self.search()? {
                    return Ok(Some(found));
                }
                self.assignment[v] = usize::MAX;
            }
        }
        Ok(None)
    }

    /// Deficient hyperedges must admit fresh completions: a hyperedge whose
    /// complement is one-dimensional forces a unique ray, which must differ
    /// from every assigned ray and from every other forced completion.
    fn fills_feasible(&self) -> bool {
        let n = self.h.n;
        let mut forced: Vec<Vec<C64>> = Vec::new();
        for e in &self.h.edges {
            if e.len() == n {
                continue;
            }
            if e.len() == n - 1 {
                let span: Vec<Vec<C64>> = e
                    .iter()
                    .map(|&v| self.rays[self.assignment[v]].to_c64())
                    .collect();
                let Some(comp) = orthogonal_complement(&span, n) else {
                    return false;
                };
                if comp.len() != 1 {
                    return false;
                }
                forced.push(comp.into_iter().next().unwrap());
            }
            // Complement dimension >= 2 leaves room to avoid any finite set
            // of rays, so no constraint.
        }
        for (i, f) in forced.iter().enumerate() {
            let fv = CVector::from_c64(f.clone());
            for &a in &self.assignment {
                if self.rays[a].same_ray(&fv, self.eps) {
                    return false;
                }
            }
            for g in forced.iter().skip(i + 1) {
                if fv.same_ray(&CVector::from_c64(g.clone()), self.eps) {
                    return false;
                }
            }
        }
        true
    }
}

/// `O_v = 2 v v† / <v,v> - I` multiplied over the hyperedge, in order.
pub fn edge_operator_product(c: &Coordinatization, edge: &[usize], n: usize) -> Vec<Vec<C64>> {
    let mut acc = identity(n);
    for &v in edge {
        let op = reflection_operator(&c.vecs[v], n);
        acc = mat_mul(&acc, &op);
    }
    acc
}

fn reflection_operator(v: &CVector, n: usize) -> Vec<Vec<C64>> {
    let f = v.to_c64();
    let nrm = f.iter().map(|c| c.norm_sqr()).sum::<f64>();
    let mut m = vec![vec![C64::ZERO; n]; n];
    for i in 0..n {
        for j in 0..n {
            let proj = f[i].mul(f[j].conj()).scale(2.0 / nrm);
            m[i][j] = if i == j {
                proj.sub(C64::new(1.0, 0.0))
            } else {
                proj
            };
        }
    }
    m
}

fn identity(n: usize) -> Vec<Vec<C64>> {
    let mut m = vec![vec![C64::ZERO; n]; n];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = C64::new(1.0, 0.0);
    }
    m
}

fn mat_mul(a: &[Vec<C64>], b: &[Vec<C64>]) -> Vec<Vec<C64>> {
    let n = a.len();
    let mut out = vec![vec![C64::ZERO; n]; n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i][k];
            if aik.norm_sqr() == 0.0 {
                continue;
            }
            for j in 0..n {
                out[i][j] = out[i][j].add(aik.mul(b[k][j]));
            }
        }
    }
    out
}

/// Verify that every full hyperedge's operator product equals
/// `(-1)^(n-1) I` within `eps`.
pub fn verify_operator_identity(h: &Hypergraph, c: &Coordinatization, eps: f64) -> Result<bool> {
    let n = h.n;
    let sign = if n % 2 == 0 { -1.0 } else { 1.0 };
    for e in &h.edges {
        if e.len() != n {
            return Err(Error::Coord(format!(
                "hyperedge with {} vertices is not full in dimension {n}",
                e.len()
            )));
        }
        let prod = edge_operator_product(c, e, n);
        for (i, row) in prod.iter().enumerate() {
            for (j, entry) in row.iter().enumerate() {
                let expect = if i == j {
                    C64::new(sign, 0.0)
                } else {
                    C64::ZERO
                };
                if entry.sub(expect).norm() > eps {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Maximum over sign assignments `s in {+-1}^k` of
/// `sigma * sum_e prod_{v in e} s_v`, with `sigma = -1` for even `n` and
/// `+1` for odd. Exhaustive over `2^k`; `k <= 24` required.
pub fn classical_operator_max(h: &Hypergraph) -> Result<(i64, Vec<i8>)> {
    let k = h.k();
    if k > 24 {
        return Err(Error::TooLarge(format!(
            "classical operator maximum is exhaustive over 2^k; k = {k} > 24"
        )));
    }
    let sigma = if h.n % 2 == 0 { -1i64 } else { 1i64 };
    let masks: Vec<u32> = h
        .edges
        .iter()
        .map(|e| e.iter().fold(0u32, |m, &v| m | 1 << v))
        .collect();
    let mut best = i64::MIN;
    let mut best_signs = 0u32;
    for s in 0u32..1 << k {
        // Bit set means the vertex carries -1.
        let mut sum = 0i64;
        for &m in &masks {
            let negs = (s & m).count_ones();
            sum += if negs % 2 == 0 { 1 } else { -1 };
        }
        let val = sigma * sum;
        if val > best {
            best = val;
            best_signs = s;
        }
    }
    let signs = (0..k)
        .map(|v| if best_signs >> v & 1 == 1 { -1i8 } else { 1i8 })
        .collect();
    Ok((best, signs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::parse_mmp;

    fn pentagon_coord() -> (Hypergraph, Coordinatization) {
        // 10-5 pentagon rays built from {0,+-1,2} components, keyed by label.
        let h = parse_mmp("162,273,384,495,5A1.").unwrap();
        let by_label: [(&str, [i64; 3]); 10] = [
            ("1", [0, 0, 1]),
            ("2", [0, 1, 0]),
            ("3", [1, 0, 1]),
            ("4", [1, 1, -1]),
            ("5", [1, -1, 0]),
            ("6", [1, 0, 0]),
            ("7", [1, 0, -1]),
            ("8", [-1, 2, 1]),
            ("9", [1, 1, 2]),
            ("A", [1, 1, 0]),
        ];
        let vecs = h
            .vertices
            .iter()
            .map(|lab| {
                let raw = by_label
                    .iter()
                    .find(|(l, _)| *l == lab.as_str())
                    .map(|(_, r)| r)
                    .unwrap();
                CVector::new(raw.iter().map(|&x| Scalar::integer(x)).collect())
            })
            .collect();
        (h, Coordinatization::new(vecs))
    }

    #[test]
    fn verify_pentagon() {
        let (h, c) = pentagon_coord();
        let (ok, violations) = verify_coordinatization(&h, &c);
        assert!(ok, "violations: {violations:?}");
        // Corrupt vertex 0.
        let mut bad = c.clone();
        bad.vecs[0] = CVector::new(vec![
            Scalar::integer(1),
            Scalar::integer(1),
            Scalar::integer(1),
        ]);
        let (ok, violations) = verify_coordinatization(&h, &bad);
        assert!(!ok);
        assert!(violations.iter().all(|&(_, u, v)| u == 0 || v == 0));
    }

    #[test]
    fn eisenstein_conjugation() {
        // w is orthogonal business: (1, w, w2) . (1, w, w2) with conjugation
        // = 1 + conj(w) w + conj(w2) w2 = 3.
        let w = Scalar::Eisenstein(0, 1);
        let w2 = Scalar::Eisenstein(-1, -1);
        let v = CVector::new(vec![Scalar::integer(1), w, w2]);
        match v.dot(&v) {
            DotResult::Exact(s) => assert_eq!(s.to_c64().re, 3.0),
            _ => panic!("expected exact dot"),
        }
        // (0,1,-1) and (0,1,w) are not orthogonal; (1,1,1) and (1,w,w2) are.
        let a = CVector::new(vec![Scalar::integer(1), Scalar::integer(1), Scalar::integer(1)]);
        let b = CVector::new(vec![Scalar::integer(1), w, w2]);
        assert!(a.orthogonal(&b, DEFAULT_EPS));
    }

    #[test]
    fn enumerate_counts() {
        let zpm1 = ComponentSet::parse("0,1,-1").unwrap();
        assert_eq!(enumerate_vectors(&zpm1, 3).unwrap().len(), 13);
        assert_eq!(enumerate_vectors(&zpm1, 6).unwrap().len(), 364);
        let zp1 = ComponentSet::parse("0,1").unwrap();
        assert_eq!(enumerate_vectors(&zp1, 3).unwrap().len(), 7);
    }

    #[test]
    fn master_0pm1_dim4() {
        // The full 4-dim {0,+-1} master is 40-32; it splits into the 24-24
        // (every multiplicity 4) and a disjoint 16-8 on the weight-3 rays.
        let cs = ComponentSet::parse("0,1,-1").unwrap();
        let (h, c) = generate_master(&cs, 4).unwrap();
        assert_eq!((h.k(), h.l()), (40, 32));
        assert!(verify_coordinatization(&h, &c).0);
        let comps = crate::lang::decompose_components(&h);
        assert_eq!(comps.len(), 2);
        assert_eq!((comps[0].k(), comps[0].l()), (24, 24));
        assert_eq!((comps[1].k(), comps[1].l()), (16, 8));
        let m = crate::structure::multiplicities(&comps[0]);
        assert!(m.iter().all(|&x| x == 4));
    }

    #[test]
    fn fill_and_strip_recover_pentagon() {
        let bare = parse_mmp("12,23,34,45,51.").unwrap();
        let (h10, c10) = pentagon_coord();
        // Vectors of the bare pentagon's labels 1..5, in its vertex order.
        let five = Coordinatization::new(
            bare.vertices
                .iter()
                .map(|lab| {
                    let idx = h10
                        .vertices
                        .iter()
                        .position(|l| l.as_str() == lab.as_str())
                        .unwrap();
                    c10.vecs[idx].clone()
                })
                .collect(),
        );
        let (filled, cf) = fill(&bare, &five).unwrap();
        assert_eq!((filled.k(), filled.l()), (10, 5));
        assert!(verify_coordinatization(&filled, &cf).0);
        let stripped = crate::structure::strip_unishared(&filled, false).unwrap();
        assert_eq!(crate::lang::serialize_mmp(&stripped), "12,23,34,45,51.");
        // Filling a full hypergraph is the identity.
        let (again, _) = fill(&h10, &c10).unwrap();
        assert_eq!(again, h10);
    }

    #[test]
    fn operator_identity_small() {
        // Any orthonormal basis: 3-dim gives +I, 4-dim gives -I.
        for n in [3usize, 4] {
            let mut edges = vec![Vec::new()];
            let mut vecs = Vec::new();
            for i in 0..n {
                edges[0].push(i);
                let mut entries = vec![Scalar::integer(0); n];
                entries[i] = Scalar::integer(1);
                vecs.push(CVector::new(entries));
            }
            let h = Hypergraph::from_edges(edges, Some(n));
            let c = Coordinatization::new(vecs);
            assert!(verify_operator_identity(&h, &c, 1e-9).unwrap());
        }
    }

    #[test]
    fn classical_operator_values() {
        let h18 = parse_mmp("1234,4567,789A,ABCD,DEFG,GHI1,35CE,29BI,68FH.")
            .unwrap()
            .with_n(4);
        assert_eq!(classical_operator_max(&h18).unwrap().0, 7);
        // Binary 10-5 in 3 dimensions reaches l = 5.
        let h10 = parse_mmp("162,273,384,495,5A1.").unwrap();
        assert_eq!(classical_operator_max(&h10).unwrap().0, 5);
    }

    #[test]
    fn vecfind_cases() {
        // The 3-dim triangle of 2-edges has no coordinatization: each edge
        // forces a completion that collides with the third vertex.
        let h33 = parse_mmp("12,23,31.").unwrap();
        let cs = ComponentSet::parse("0,1,-1").unwrap();
        match vecfind(&h33, &cs, 1_000_000, 0).unwrap() {
            VecfindOutcome::ProvedNone => {}
            other => panic!("expected ProvedNone, got {other:?}"),
        }
        // The 18-9 has a {0,+-1} coordinatization.
        let h18 = parse_mmp("1234,4567,789A,ABCD,DEFG,GHI1,35CE,29BI,68FH.")
            .unwrap()
            .with_n(4);
        match vecfind(&h18, &cs, 50_000_000, 0).unwrap() {
            VecfindOutcome::Found(c) => assert!(verify_coordinatization(&h18, &c).0),
            other => panic!("expected Found, got {other:?}"),
        }
        // Pentagon 10-5 from {0,+-1,2}.
        let h10 = parse_mmp("162,273,384,495,5A1.").unwrap();
        let cs2 = ComponentSet::parse("0,1,-1,2").unwrap();
        match vecfind(&h10, &cs2, 50_000_000, 0).unwrap() {
            VecfindOutcome::Found(c) => assert!(verify_coordinatization(&h10, &c).0),
            other => panic!("expected Found, got {other:?}"),
        }
    }
}
