//! Quantum indices, fractional independence numbers, and the six
//! inequalities, over exact rational arithmetic.

use crate::assign::IndexReport;
use crate::error::{Error, Result};
use crate::lang::Hypergraph;
use crate::structure::multiplicities;
use num_bigint::BigInt;
use num_rational::Ratio;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

pub type Rat = Ratio<BigInt>;

pub fn rat(n: i64, d: i64) -> Rat {
    Ratio::new(BigInt::from(n), BigInt::from(d))
}

/// Sum over hyperedges of the per-edge detection probabilities
/// `sum_{v in e} 1/|e|`; equals `l` exactly.
pub fn quantum_index(h: &Hypergraph) -> Rat {
    let mut total = Rat::zero();
    for e in &h.edges {
        let kappa = e.len() as i64;
        for _ in e {
            total += rat(1, kappa);
        }
    }
    total
}

/// Per-vertex decomposition `m(v)/n`, valid when every hyperedge is full;
/// sums to `l` by the handshake identity.
pub fn quantum_index_by_vertex(h: &Hypergraph) -> Option<Vec<Rat>> {
    if h.edges.iter().any(|e| e.len() != h.n) {
        return None;
    }
    Some(
        multiplicities(h)
            .iter()
            .map(|&m| rat(m as i64, h.n as i64))
            .collect(),
    )
}

/// Raw fractional independence number: every vertex contributes the
/// arithmetic mean, over the hyperedges containing it, of `1/|e|`. Equals
/// `k/n` when every hyperedge has `n` vertices.
pub fn alpha_raw(h: &Hypergraph) -> Rat {
    let mut total = Rat::zero();
    for edges in h.vertex_edges() {
        if edges.is_empty() {
            continue;
        }
        let mut mean = Rat::zero();
        for &j in &edges {
            mean += rat(1, h.edges[j].len() as i64);
        }
        total += mean / rat(edges.len() as i64, 1);
    }
    total
}

/// Per-vertex raw-probability table backing [`alpha_raw`].
pub fn alpha_raw_table(h: &Hypergraph) -> Vec<Rat> {
    h.vertex_edges()
        .iter()
        .map(|edges| {
            if edges.is_empty() {
                Rat::zero()
            } else {
                let mut mean = Rat::zero();
                for &j in edges {
                    mean += rat(1, h.edges[j].len() as i64);
                }
                mean / rat(edges.len() as i64, 1)
            }
        })
        .collect()
}

/// Postprocessed fractional independence number; always equals `l`.
pub fn alpha_post(h: &Hypergraph) -> Rat {
    quantum_index(h)
}

/// `maximize sum x_v` subject to `sum_{v in e} x_v <= 1` per hyperedge and
/// box bounds `lo_v <= x_v <= hi_v` within `[0, 1]`.
#[derive(Clone, Debug)]
pub struct LpProblem {
    pub h: Hypergraph,
    pub bounds: Vec<(Rat, Rat)>,
}

impl LpProblem {
    pub fn free(h: &Hypergraph) -> Self {
        LpProblem {
            h: h.clone(),
            bounds: vec![(Rat::zero(), Rat::one()); h.k()],
        }
    }

    pub fn with_bounds(h: &Hypergraph, bounds: Vec<(Rat, Rat)>) -> Self {
        LpProblem {
            h: h.clone(),
            bounds,
        }
    }
}

/// Exact optimum of the fractional independence LP, with one optimal point.
/// Simplex over big-integer rationals, Bland's rule.
pub fn lp_alpha_star(problem: &LpProblem) -> Result<(Rat, Vec<Rat>)> {
    let h = &problem.h;
    let k = h.k();
    if problem.bounds.len() != k {
        return Err(Error::Infeasible("bounds length mismatch".into()));
    }
    for (v, (lo, hi)) in problem.bounds.iter().enumerate() {
        if lo > hi || lo < &Rat::zero() || hi > &Rat::one() {
            return Err(Error::Infeasible(format!(
                "bounds for vertex {v} are not 0 <= lo <= hi <= 1"
            )));
        }
    }
    for (j, e) in h.edges.iter().enumerate() {
        let lo_sum: Rat = e.iter().map(|&v| problem.bounds[v].0.clone()).sum();
        if lo_sum > Rat::one() {
            return Err(Error::Infeasible(format!(
                "lower bounds on hyperedge {j} sum to {lo_sum} > 1"
            )));
        }
    }

    // Substitute y = x - lo, y >= 0.
    let vertex_edges = h.vertex_edges();
    let default_box = problem
        .bounds
        .iter()
        .all(|(lo, hi)| lo.is_zero() && hi.is_one());
    let mut rows: Vec<(Vec<usize>, Rat)> = Vec::new();
    for e in &h.edges {
        let lo_sum: Rat = e.iter().map(|&v| problem.bounds[v].0.clone()).sum();
        rows.push((e.clone(), Rat::one() - lo_sum));
    }
    for v in 0..k {
        let (lo, hi) = &problem.bounds[v];
        let needed = !default_box || vertex_edges[v].is_empty();
        if needed {
            rows.push((vec![v], hi - lo));
        }
    }

    let m = rows.len();
    let cols = k + m;
    let mut tableau: Vec<Vec<Rat>> = vec![vec![Rat::zero(); cols + 1]; m];
    for (i, (support, rhs)) in rows.iter().enumerate() {
        for &v in support {
            tableau[i][v] = Rat::one();
        }
        tableau[i][k + i] = Rat::one();
        tableau[i][cols] = rhs.clone();
    }
    let mut obj: Vec<Rat> = vec![Rat::zero(); cols + 1];
    for v in 0..k {
        obj[v] = Rat::one();
    }
    let mut basis: Vec<usize> = (k..cols).collect();

    loop {
        // Bland: entering variable = smallest index with positive cost.
        let Some(enter) = (0..cols).find(|&j| obj[j].is_positive()) else {
            break;
        };
        // Ratio test; Bland ties toward the smallest basis variable.
        let mut leave: Option<(usize, Rat)> = None;
        for (i, row) in tableau.iter().enumerate() {
            if row[enter].is_positive() {
                let ratio = &row[cols] / &row[enter];
                match &leave {
                    None => leave = Some((i, ratio)),
                    Some((li, lr)) => {
                        if ratio < *lr || (ratio == *lr && basis[i] < basis[*li]) {
                            leave = Some((i, ratio));
                        }
                    }
                }
            }
        }
        let Some((pivot_row, _)) = leave else {
            return Err(Error::Infeasible("objective unbounded".into()));
        };
        pivot(&mut tableau, &mut obj, &mut basis, pivot_row, enter, cols);
    }

    let mut y = vec![Rat::zero(); cols];
    for (i, &b) in basis.iter().enumerate() {
        y[b] = tableau[i][cols].clone();
    }
    let x: Vec<Rat> = (0..k)
        .map(|v| &y[v] + &problem.bounds[v].0)
        .collect();
    let value: Rat = x.iter().cloned().sum();
    Ok((value, x))
}

fn pivot(
    tableau: &mut [Vec<Rat>],
    obj: &mut [Rat],
    basis: &mut [usize],
    row: usize,
    col: usize,
    cols: usize,
) {
    let factor = tableau[row][col].clone();
    for entry in tableau[row].iter_mut() {
        *entry /= &factor;
    }
    for i in 0..tableau.len() {
        if i != row && !tableau[i][col].is_zero() {
            let f = tableau[i][col].clone();
            for j in 0..=cols {
                let delta = &tableau[row][j] * &f;
                tableau[i][j] -= delta;
            }
        }
    }
    if !obj[col].is_zero() {
        let f = obj[col].clone();
        for j in 0..=cols {
            let delta = &tableau[row][j] * &f;
            obj[j] -= delta;
        }
    }
    basis[row] = col;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Satisfied,
    Violated,
}

impl Verdict {
    fn from(b: bool) -> Self {
        if b {
            Verdict::Satisfied
        } else {
            Verdict::Violated
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Classification {
    Contextual,
    Noncontextual,
}

fn rat_str(r: &Rat) -> String {
    r.to_string()
}

/// Values and verdicts of the six inequalities.
#[derive(Clone, Debug, Serialize)]
pub struct InequalityReport {
    #[serde(rename = "HI_q", serialize_with = "ser_rat")]
    pub hi_q: Rat,
    pub alpha: usize,
    #[serde(rename = "alpha_r", serialize_with = "ser_rat")]
    pub alpha_r: Rat,
    #[serde(rename = "alpha_p", serialize_with = "ser_rat")]
    pub alpha_p: Rat,
    #[serde(rename = "alpha_star_free", serialize_with = "ser_rat_opt")]
    pub alpha_star_free: Option<Rat>,
    pub verdicts: Verdicts,
    pub classification: Classification,
}

fn ser_rat<S: serde::Serializer>(r: &Rat, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&rat_str(r))
}

fn ser_rat_opt<S: serde::Serializer>(
    r: &Option<Rat>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    match r {
        Some(r) => s.serialize_some(&rat_str(r)),
        None => s.serialize_none(),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Verdicts {
    pub v: Verdict,
    pub e_max: Verdict,
    pub e_min: Verdict,
    pub alpha_r: Verdict,
    pub alpha_p: Verdict,
    pub gls: Verdict,
}

/// Evaluate all six inequalities from a computed index report and a binary
/// verdict. `alpha_star_free` may be omitted for large inputs; the GLS
/// verdict is then reported as satisfied (it holds for every hypergraph).
pub fn evaluate_with(
    h: &Hypergraph,
    idx: &IndexReport,
    binary: bool,
    alpha_star_free: Option<Rat>,
) -> InequalityReport {
    let l = rat(h.l() as i64, 1);
    let alpha = idx.hi_c_max;
    let alpha_rat = rat(alpha as i64, 1);
    let a_r = alpha_raw(h);
    let verdicts = Verdicts {
        v: Verdict::from(rat(idx.hi_mc_max as i64, 1) < l),
        e_max: Verdict::from(rat(idx.l_c_max as i64, 1) < l),
        e_min: Verdict::from(rat(idx.l_c_min as i64, 1) < l),
        // Reported, but never used for classification.
        alpha_r: Verdict::from(alpha_rat <= a_r),
        alpha_p: Verdict::from(alpha_rat < l),
        gls: Verdict::from(match &alpha_star_free {
            Some(star) => alpha_rat <= *star,
            None => true,
        }),
    };
    InequalityReport {
        hi_q: quantum_index(h),
        alpha,
        alpha_r: a_r,
        alpha_p: alpha_post(h),
        alpha_star_free,
        verdicts,
        classification: if binary {
            Classification::Noncontextual
        } else {
            Classification::Contextual
        },
    }
}

/// Convenience wrapper computing the binary verdict and the free LP.
pub fn evaluate(h: &Hypergraph, idx: &IndexReport) -> Result<InequalityReport> {
    let binary = crate::assign::is_binary(h)?.binary;
    let (star, _) = lp_alpha_star(&LpProblem::free(h))?;
    Ok(evaluate_with(h, idx, binary, Some(star)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assign::classical_indices_exact;
    use crate::lang::parse_mmp;
    use num_traits::ToPrimitive;
    use rand::Rng;
    use rand::SeedableRng;

    fn pentagon() -> Hypergraph {
        parse_mmp("12,23,34,45,51.").unwrap()
    }

    #[test]
    fn quantum_index_is_l() {
        for s in [
            "12,23,34,45,51.",
            "1234,4567,789A,ABCD,DEFG,GHI1,35CE,29BI,68FH.",
            "1234,45,5678,9A.",
        ] {
            let h = parse_mmp(s).unwrap();
            assert_eq!(quantum_index(&h), rat(h.l() as i64, 1));
        }
    }

    #[test]
    fn alpha_raw_values() {
        assert_eq!(alpha_raw(&pentagon()), rat(5, 2));
        let h18 = parse_mmp("1234,4567,789A,ABCD,DEFG,GHI1,35CE,29BI,68FH.").unwrap();
        assert_eq!(alpha_raw(&h18), rat(9, 2));
        // Mixed-cardinality mean rule: 7-3 "1234,4567,71." style example:
        // vertex shared between a 4-edge and a 2-edge averages 1/4 and 1/2.
        let h = parse_mmp("1234,4567,71.").unwrap();
        let table = alpha_raw_table(&h);
        assert_eq!(table[6], rat(3, 8));
        assert_eq!(table[0], rat(3, 8));
    }

    #[test]
    fn lp_nine_three() {
        let h = parse_mmp("1234,4567,7891.").unwrap();
        let (free, x) = lp_alpha_star(&LpProblem::free(&h)).unwrap();
        assert_eq!(free, rat(3, 1));
        assert_eq!(x.iter().cloned().sum::<Rat>(), rat(3, 1));
        let bounds = vec![(rat(1, 4), rat(1, 1)); 9];
        let (fixed, x) = lp_alpha_star(&LpProblem::with_bounds(&h, bounds)).unwrap();
        assert_eq!(fixed, rat(9, 4));
        assert!(x.iter().all(|xi| *xi == rat(1, 4)));
    }

    #[test]
    fn lp_pentagon() {
        let (free, _) = lp_alpha_star(&LpProblem::free(&pentagon())).unwrap();
        assert_eq!(free, rat(5, 2));
    }

    #[test]
    fn lp_infeasible_bounds() {
        let h = parse_mmp("123.").unwrap();
        let bounds = vec![(rat(1, 2), rat(1, 1)); 3];
        assert!(matches!(
            lp_alpha_star(&LpProblem::with_bounds(&h, bounds)),
            Err(Error::Infeasible(_))
        ));
        let bounds = vec![(rat(3, 4), rat(1, 2)); 3];
        assert!(matches!(
            lp_alpha_star(&LpProblem::with_bounds(&h, bounds)),
            Err(Error::Infeasible(_))
        ));
    }

    /// Enumerate polytope vertices via all maximal tight subsets; oracle for
    /// the simplex on small instances.
    fn brute_force_lp(problem: &LpProblem) -> Rat {
        let h = &problem.h;
        let k = h.k();
        // Constraints: per edge sum <= 1; per vertex lo <= x <= hi.
        // Enumerate choices of k tight constraints and solve.
        #[derive(Clone, Copy)]
        enum Con {
            Edge(usize),
            Lo(usize),
            Hi(usize),
        }
        let mut cons: Vec<Con> = Vec::new();
        for j in 0..h.l() {
            cons.push(Con::Edge(j));
        }
        for v in 0..k {
            cons.push(Con::Lo(v));
            cons.push(Con::Hi(v));
        }
        let mut best: Option<Rat> = None;
        let mut chosen = vec![0usize; k];
        enumerate_combinations(cons.len(), k, &mut chosen, 0, 0, &mut |sel| {
            // Build linear system.
            let mut a: Vec<Vec<Rat>> = Vec::new();
            let mut b: Vec<Rat> = Vec::new();
            for &ci in sel {
                let mut row = vec![Rat::zero(); k];
                match cons[ci] {
                    Con::Edge(j) => {
                        for &v in &h.edges[j] {
                            row[v] = Rat::one();
                        }
                        b.push(Rat::one());
                    }
                    Con::Lo(v) => {
                        row[v] = Rat::one();
                        b.push(problem.bounds[v].0.clone());
                    }
                    Con::Hi(v) => {
                        row[v] = Rat::one();
                        b.push(problem.bounds[v].1.clone());
                    }
                }
                a.push(row);
            }
            if let Some(x) = solve_square(a, b) {
                // Feasibility.
                let feasible = (0..k).all(|v| {
                    x[v] >= problem.bounds[v].0 && x[v] <= problem.bounds[v].1
                }) && h.edges.iter().all(|e| {
                    e.iter().map(|&v| x[v].clone()).sum::<Rat>() <= Rat::one()
                });
                if feasible {
                    let val: Rat = x.iter().cloned().sum();
                    if best.as_ref().map_or(true, |b| val > *b) {
                        best = Some(val);
                    }
                }
            }
        });
        best.expect("feasible polytope has vertices")
    }

    fn enumerate_combinations(
        n: usize,
        k: usize,
        chosen: &mut Vec<usize>,
        depth: usize,
        start: usize,
        f: &mut impl FnMut(&[usize]),
    ) {
        if depth == k {
            f(chosen);
            return;
        }
        for i in start..n {
            chosen[depth] = i;
            enumerate_combinations(n, k, chosen, depth + 1, i + 1, f);
        }
    }

    fn solve_square(mut a: Vec<Vec<Rat>>, mut b: Vec<Rat>) -> Option<Vec<Rat>> {
        let n = b.len();
        for col in 0..n {
            let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
            a.swap(col, pivot);
            b.swap(col, pivot);
            let p = a[col][col].clone();
            for j in 0..n {
                a[col][j] /= &p;
            }
            b[col] /= &p;
            for r in 0..n {
                if r != col && !a[r][col].is_zero() {
                    let f = a[r][col].clone();
                    for j in 0..n {
                        let d = &a[col][j] * &f;
                        a[r][j] -= d;
                    }
                    let d = &b[col] * &f;
                    b[r] -= d;
                }
            }
        }
        Some(b)
    }

    #[test]
    fn lp_matches_vertex_enumeration() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..25 {
            let k = rng.gen_range(3..=7usize);
            let l = rng.gen_range(1..=4usize);
            let mut edges = Vec::new();
            for _ in 0..l {
                let size = rng.gen_range(2..=3.min(k));
                let mut e = Vec::new();
                while e.len() < size {
                    let v = rng.gen_range(0..k);
                    if !e.contains(&v) {
                        e.push(v);
                    }
                }
                edges.push(e);
            }
            let h = Hypergraph::from_edges(edges, Some(4));
            let bounds: Vec<(Rat, Rat)> = (0..h.k())
                .map(|_| {
                    if rng.gen_bool(0.5) {
                        (Rat::zero(), Rat::one())
                    } else {
                        (rat(1, rng.gen_range(3..=5)), Rat::one())
                    }
                })
                .collect();
            let problem = LpProblem::with_bounds(&h, bounds);
            if let Ok((val, _)) = lp_alpha_star(&problem) {
                assert_eq!(val, brute_force_lp(&problem));
            }
        }
    }

    #[test]
    fn evaluate_pentagon_and_filled() {
        let p = pentagon();
        let idx = classical_indices_exact(&p).unwrap();
        let rep = evaluate(&p, &idx).unwrap();
        assert_eq!(rep.hi_q, rat(5, 1));
        assert_eq!(rep.verdicts.v, Verdict::Satisfied);
        assert_eq!(rep.classification, Classification::Contextual);
        assert_eq!(rep.alpha_r.to_f64().unwrap(), 2.5);

        let filled = parse_mmp("162,273,384,495,5A1.").unwrap();
        let idx = classical_indices_exact(&filled).unwrap();
        let rep = evaluate(&filled, &idx).unwrap();
        assert_eq!(idx.hi_mc_max, 5);
        assert_eq!(rep.verdicts.v, Verdict::Violated);
        assert_eq!(rep.classification, Classification::Noncontextual);
    }

    #[test]
    fn hi_cm_le_alpha_star() {
        for s in ["12,23,34,45,51.", "1234,4567,7891.", "1234,4567,789A,ABCD,DEFG,GHI1,35CE,29BI,68FH."] {
            let h = parse_mmp(s).unwrap();
            let idx = classical_indices_exact(&h).unwrap();
            let (star, _) = lp_alpha_star(&LpProblem::free(&h)).unwrap();
            assert!(rat(idx.hi_c_max as i64, 1) <= star);
        }
    }
}
