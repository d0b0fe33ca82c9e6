//! Markov spectra, Cheeger constants, expander constants and Følner ratios.
//!
//! The Markov operator of a `k`-regular graph is `A/k`; every spectral
//! quantity in this crate is expressed in that normalization. `lambda` is the
//! largest Markov eigenvalue that is at most `1 - tol_eig`, and `gap = 1 - lambda`.

use std::cmp::Ordering;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Graph, Vertex, VertexSet};

/// Absolute tolerance for classifying an eigenvalue as equal to 1.
pub const TOL_EIG: f64 = 1e-9;
/// Largest graph handled by the dense symmetric eigensolver.
pub const DENSE_LIMIT: usize = 3000;
/// Largest graph for exhaustive partition / subset searches.
pub const EXACT_VERTEX_CAP: usize = 24;
/// Largest number of candidate sets for an exhaustive Følner search.
pub const FOLNER_EXHAUSTIVE_CAP: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EigenMethod {
    Dense,
    Lanczos,
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectralReport {
    pub name: Option<String>,
    pub n: usize,
    pub k: usize,
    /// Descending. Complete for the dense method; the top of the spectrum
    /// (plus `lambda`) for the iterative method.
    pub eigenvalues: Vec<f64>,
    pub lambda: Option<f64>,
    pub gap: Option<f64>,
    pub bipartite: bool,
    pub multiplicity_of_one: usize,
    pub components: usize,
    pub method: EigenMethod,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CutMethod {
    Exact,
    HeuristicUpperBound,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheegerReport {
    pub h: f64,
    pub cut_edges: usize,
    pub smaller_side: usize,
    /// Side of the optimal partition containing vertex 0.
    pub witness_a: VertexSet,
    pub witness_b: VertexSet,
    pub method: CutMethod,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExpanderReport {
    pub c: f64,
    pub witness: VertexSet,
    pub boundary_size: usize,
    pub n: usize,
    pub d: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FolnerMode {
    Auto,
    Exhaustive,
    Greedy,
}

#[derive(Debug, Clone, Serialize)]
pub struct FolnerReport {
    pub ratio: f64,
    pub boundary_size: usize,
    pub witness: VertexSet,
    /// Search actually performed (never `auto`).
    pub mode: FolnerMode,
    pub max_size: usize,
}

fn require_regular(g: &Graph) -> Result<usize> {
    if g.n() == 0 {
        return Err(Error::validation("empty graph"));
    }
    match g.regular_degree() {
        Some(0) => Err(Error::validation(
            "0-regular graph: the Markov operator needs degree k >= 1",
        )),
        Some(k) => Ok(k),
        None => Err(Error::validation(
            "graph is not regular; the regular random walk is undefined",
        )),
    }
}

/// `P = A/k` for a `k`-regular graph.
pub fn markov_matrix(g: &Graph) -> Result<DMatrix<f64>> {
    let k = require_regular(g)?;
    let w = 1.0 / k as f64;
    let mut m = DMatrix::zeros(g.n(), g.n());
    for &(u, v) in g.edges() {
        m[(u, v)] = w;
        m[(v, u)] = w;
    }
    Ok(m)
}

fn apply_markov(g: &Graph, k: usize, x: &[f64], y: &mut [f64]) {
    let w = 1.0 / k as f64;
    for (u, out) in y.iter_mut().enumerate() {
        *out = g.neighbors(u).iter().map(|&v| x[v]).sum::<f64>() * w;
    }
}

fn descending(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(|a, b| b.partial_cmp(a).unwrap_or(Ordering::Equal));
    v
}

/// Ritz pairs from Lanczos with full reorthogonalization, restricted to the
/// orthogonal complement of `deflate` (orthonormal vectors).
/// Returns values in descending order with matching vectors.
pub(crate) fn lanczos_top(
    n: usize,
    apply: impl Fn(&[f64], &mut [f64]),
    deflate: &[Vec<f64>],
    steps: usize,
    seed: u64,
) -> (Vec<f64>, Vec<Vec<f64>>) {
    let project = |x: &mut [f64], basis: &[Vec<f64>]| {
        for b in basis {
            let dot: f64 = x.iter().zip(b).map(|(a, c)| a * c).sum();
            for (xi, bi) in x.iter_mut().zip(b) {
                *xi -= dot * bi;
            }
        }
    };
    let norm = |x: &[f64]| x.iter().map(|a| a * a).sum::<f64>().sqrt();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut q: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    project(&mut q, deflate);
    project(&mut q, deflate);
    let nq = norm(&q);
    if nq < 1e-14 {
        return (Vec::new(), Vec::new());
    }
    q.iter_mut().for_each(|x| *x /= nq);

    let mut basis: Vec<Vec<f64>> = vec![q];
    let mut alphas = Vec::new();
    let mut betas: Vec<f64> = Vec::new();
    let mut w = vec![0.0; n];
    let max_steps = steps.min(n.saturating_sub(deflate.len())).max(1);
    loop {
        let j = basis.len() - 1;
        apply(&basis[j], &mut w);
        let alpha: f64 = w.iter().zip(&basis[j]).map(|(a, b)| a * b).sum();
        alphas.push(alpha);
        // full reorthogonalization, twice for stability
        for _ in 0..2 {
            project(&mut w, deflate);
            project(&mut w, &basis);
        }
        if basis.len() >= max_steps {
            break;
        }
        let beta = norm(&w);
        if beta < 1e-12 {
            break;
        }
        betas.push(beta);
        basis.push(w.iter().map(|x| x / beta).collect());
    }
    let m = alphas.len();
    let mut t = DMatrix::zeros(m, m);
    for i in 0..m {
        t[(i, i)] = alphas[i];
        if i + 1 < m {
            t[(i, i + 1)] = betas[i];
            t[(i + 1, i)] = betas[i];
        }
    }
    let eig = SymmetricEigen::new(t);
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[b]
            .partial_cmp(&eig.eigenvalues[a])
            .unwrap_or(Ordering::Equal)
    });
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = order
        .iter()
        .map(|&i| {
            let mut v = vec![0.0; n];
            for (j, b) in basis.iter().enumerate() {
                let c = eig.eigenvectors[(j, i)];
                for (vi, bi) in v.iter_mut().zip(b) {
                    *vi += c * bi;
                }
            }
            v
        })
        .collect();
    (values, vectors)
}

/// Normalized indicator vectors of the connected components.
fn component_basis(g: &Graph) -> Vec<Vec<f64>> {
    let labels = g.components();
    let count = labels.iter().max().map_or(0, |m| m + 1);
    let mut sizes = vec![0usize; count];
    for &l in &labels {
        sizes[l] += 1;
    }
    (0..count)
        .map(|c| {
            let s = 1.0 / (sizes[c] as f64).sqrt();
            labels.iter().map(|&l| if l == c { s } else { 0.0 }).collect()
        })
        .collect()
}

fn lambda_from(eigs: &[f64]) -> Option<f64> {
    eigs.iter().copied().find(|&e| e <= 1.0 - TOL_EIG)
}

/// Markov spectrum of a regular graph: dense solver up to [`DENSE_LIMIT`]
/// vertices, Lanczos above it.
pub fn spectrum(g: &Graph) -> Result<SpectralReport> {
    let k = require_regular(g)?;
    let n = g.n();
    let components = g.component_count();
    let bipartite = g.bipartition().is_some();
    if n <= DENSE_LIMIT {
        let eigs = descending(markov_matrix(g)?.symmetric_eigenvalues().iter().copied().collect());
        let lambda = lambda_from(&eigs);
        let multiplicity_of_one = eigs.iter().filter(|&&e| e > 1.0 - TOL_EIG).count();
        return Ok(SpectralReport {
            name: g.name().map(str::to_string),
            n,
            k,
            lambda,
            gap: lambda.map(|l| 1.0 - l),
            eigenvalues: eigs,
            bipartite,
            multiplicity_of_one,
            components,
            method: EigenMethod::Dense,
        });
    }
    let apply = |x: &[f64], y: &mut [f64]| apply_markov(g, k, x, y);
    let deflate = component_basis(g);
    let (restricted, _) = lanczos_top(n, apply, &deflate, 300, 0x5eed);
    let lambda = restricted.first().copied();
    let mut eigs = vec![1.0; components];
    eigs.extend(restricted.iter().take(16));
    Ok(SpectralReport {
        name: g.name().map(str::to_string),
        n,
        k,
        lambda,
        gap: lambda.map(|l| 1.0 - l),
        eigenvalues: eigs,
        bipartite,
        multiplicity_of_one: components,
        components,
        method: EigenMethod::Lanczos,
    })
}

/// An eigenvector for `lambda` on a connected regular graph.
pub fn lambda_eigenvector(g: &Graph) -> Result<(f64, Vec<f64>)> {
    let k = require_regular(g)?;
    if !g.is_connected() {
        return Err(Error::validation("graph must be connected"));
    }
    let n = g.n();
    if n < 2 {
        return Err(Error::validation("need at least two vertices"));
    }
    if n <= 400 {
        let eig = SymmetricEigen::new(markov_matrix(g)?);
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| {
            eig.eigenvalues[b]
                .partial_cmp(&eig.eigenvalues[a])
                .unwrap_or(Ordering::Equal)
        });
        let idx = order
            .into_iter()
            .find(|&i| eig.eigenvalues[i] <= 1.0 - TOL_EIG)
            .expect("connected graph with n >= 2 has an eigenvalue below 1");
        let v: DVector<f64> = eig.eigenvectors.column(idx).into_owned();
        return Ok((eig.eigenvalues[idx], v.iter().copied().collect()));
    }
    let apply = |x: &[f64], y: &mut [f64]| apply_markov(g, k, x, y);
    let (vals, vecs) = lanczos_top(n, apply, &component_basis(g), 300, 0x5eed);
    Ok((vals[0], vecs.into_iter().next().unwrap()))
}

/// `a < b` comparing the vertex sets encoded by the masks as sorted lists.
fn lex_less(a: u64, b: u64) -> bool {
    let diff = a ^ b;
    if diff == 0 {
        return false;
    }
    let t = diff.trailing_zeros();
    let above = |m: u64| m >> t >> 1 != 0;
    if a >> t & 1 == 1 {
        // a has t next; b either continues with something larger or ends
        above(b)
    } else {
        !above(a)
    }
}

/// Compares `n1/d1` with `n2/d2` for positive denominators.
fn ratio_cmp(n1: u64, d1: u64, n2: u64, d2: u64) -> Ordering {
    (u128::from(n1) * u128::from(d2)).cmp(&(u128::from(n2) * u128::from(d1)))
}

fn neighbor_masks(g: &Graph) -> Vec<u64> {
    (0..g.n())
        .map(|v| g.neighbors(v).iter().fold(0u64, |m, &w| m | 1 << w))
        .collect()
}

fn check_exact_cap(g: &Graph, what: &str) -> Result<()> {
    if g.n() > EXACT_VERTEX_CAP {
        return Err(Error::resource(format!(
            "exact {what} is limited to n <= {EXACT_VERTEX_CAP} (got {}); use the heuristic",
            g.n()
        )));
    }
    Ok(())
}

/// Exact Cheeger constant `min |E(A,B)| / min(|A|,|B|)` over all bipartitions,
/// by Gray-code enumeration of the `2^(n-1)` partitions with `0 ∈ A`.
pub fn cheeger_exact(g: &Graph) -> Result<CheegerReport> {
    check_exact_cap(g, "Cheeger constant")?;
    let n = g.n();
    if n < 2 {
        return Err(Error::validation("Cheeger constant needs at least two vertices"));
    }
    if !g.is_connected() {
        return Err(Error::validation("Cheeger constant requires a connected graph"));
    }
    let nbr = neighbor_masks(g);
    let full = (1u64 << n) - 1;
    // A starts as {0}; bits 1..n toggle in Gray order.
    let mut a = 1u64;
    let mut cut = g.degree(0) as u64;
    let mut best: Option<(u64, u64, u64)> = None; // (cut, min side, mask)
    let steps = 1u64 << (n - 1);
    for i in 0..steps {
        if i > 0 {
            let bit = i.trailing_zeros() as usize + 1;
            let inside = u64::from((nbr[bit] & a).count_ones());
            let deg = g.degree(bit) as u64;
            if a >> bit & 1 == 1 {
                a &= !(1 << bit);
                cut = cut + 2 * inside - deg;
            } else {
                cut = cut + deg - 2 * inside;
                a |= 1 << bit;
            }
        }
        if a == full {
            continue;
        }
        let size = u64::from(a.count_ones());
        let side = size.min(n as u64 - size);
        let better = match best {
            None => true,
            Some((bc, bs, bm)) => match ratio_cmp(cut, side, bc, bs) {
                Ordering::Less => true,
                Ordering::Equal => lex_less(a, bm),
                Ordering::Greater => false,
            },
        };
        if better {
            best = Some((cut, side, a));
        }
    }
    let (cut, side, mask) = best.expect("n >= 2 has a partition");
    Ok(CheegerReport {
        h: cut as f64 / side as f64,
        cut_edges: cut as usize,
        smaller_side: side as usize,
        witness_a: VertexSet::from_mask(mask, n),
        witness_b: VertexSet::from_mask(full & !mask, n),
        method: CutMethod::Exact,
    })
}

/// Best prefix cut of `order`; ties keep the earliest prefix.
fn sweep(g: &Graph, order: &[Vertex]) -> (usize, usize, usize) {
    let n = g.n();
    let mut inside = vec![false; n];
    let mut cut: i64 = 0;
    let mut best: Option<(u64, u64, usize)> = None;
    for (idx, &v) in order.iter().enumerate().take(n - 1) {
        let internal = g.neighbors(v).iter().filter(|&&w| inside[w]).count() as i64;
        cut += g.degree(v) as i64 - 2 * internal;
        inside[v] = true;
        let size = idx + 1;
        let side = size.min(n - size) as u64;
        let c = cut as u64;
        if best.is_none_or(|(bc, bs, _)| ratio_cmp(c, side, bc, bs) == Ordering::Less) {
            best = Some((c, side, size));
        }
    }
    let (c, s, size) = best.expect("n >= 2");
    (c as usize, s as usize, size)
}

fn partition_report(g: &Graph, a: VertexSet, cut: usize, side: usize, method: CutMethod) -> CheegerReport {
    let (a, b) = if a.contains(0) {
        let b = a.complement(g.n());
        (a, b)
    } else {
        (a.complement(g.n()), a)
    };
    CheegerReport {
        h: cut as f64 / side as f64,
        cut_edges: cut,
        smaller_side: side,
        witness_a: a,
        witness_b: b,
        method,
    }
}

/// Upper bound on the Cheeger constant from a sweep cut over an eigenvector
/// of `lambda`.
pub fn cheeger_heuristic(g: &Graph) -> Result<CheegerReport> {
    let (_, vec) = lambda_eigenvector(g)?;
    let mut order: Vec<Vertex> = (0..g.n()).collect();
    order.sort_by(|&a, &b| vec[a].partial_cmp(&vec[b]).unwrap_or(Ordering::Equal).then(a.cmp(&b)));
    let (cut, side, size) = sweep(g, &order);
    let mut prefix = order[..size].to_vec();
    prefix.sort_unstable();
    let a = VertexSet::from_sorted_unchecked(prefix);
    Ok(partition_report(g, a, cut, side, CutMethod::HeuristicUpperBound))
}

/// Exact expander constant `c = min |∂A| / ((1 - |A|/n)|A|)` over nonempty
/// proper subsets.
pub fn expander_constant(g: &Graph) -> Result<ExpanderReport> {
    check_exact_cap(g, "expander constant")?;
    let n = g.n();
    if n < 2 {
        return Err(Error::validation("expander constant needs at least two vertices"));
    }
    let nbr = neighbor_masks(g);
    // split-table neighbourhood lookup: N(A) = low[A & lo_mask] | high[A >> split]
    let split = n / 2;
    let table = |offset: usize, bits: usize| -> Vec<u64> {
        let mut t = vec![0u64; 1 << bits];
        for m in 1..(1usize << bits) {
            let low = m.trailing_zeros() as usize;
            t[m] = t[m & (m - 1)] | nbr[offset + low];
        }
        t
    };
    let low = table(0, split);
    let high = table(split, n - split);
    let lo_mask = (1u64 << split) - 1;
    let full = (1u64 << n) - 1;
    let mut best: Option<(u64, u64, u64, u64)> = None; // (num, den, mask, |∂A|)
    for a in 1..full {
        let reach = low[(a & lo_mask) as usize] | high[(a >> split) as usize];
        let boundary = u64::from((reach & !a).count_ones());
        let size = u64::from(a.count_ones());
        let num = n as u64 * boundary;
        let den = (n as u64 - size) * size;
        let better = match best {
            None => true,
            Some((bn, bd, bm, _)) => match ratio_cmp(num, den, bn, bd) {
                Ordering::Less => true,
                Ordering::Equal => lex_less(a, bm),
                Ordering::Greater => false,
            },
        };
        if better {
            best = Some((num, den, a, boundary));
        }
    }
    let (num, den, mask, boundary) = best.expect("n >= 2");
    Ok(ExpanderReport {
        c: num as f64 / den as f64,
        witness: VertexSet::from_mask(mask, n),
        boundary_size: boundary as usize,
        n,
        d: g.regular_degree(),
    })
}

fn binomial_prefix_sum(n: usize, max: usize) -> u64 {
    let mut total = 0u64;
    let mut c = 1u64;
    for k in 1..=max {
        c = c.saturating_mul((n - k + 1) as u64) / k as u64;
        total = total.saturating_add(c);
    }
    total
}

/// Smallest vertex-boundary ratio `|∂F|/|F|` over nonempty `F` with
/// `|F| ≤ max_size`.
///
/// `Auto` searches exhaustively when the number of candidate sets is at most
/// [`FOLNER_EXHAUSTIVE_CAP`] and otherwise grows sets greedily from every
/// vertex, always adding the boundary vertex that keeps the new boundary
/// smallest.
pub fn folner_ratio(g: &Graph, max_size: usize, mode: FolnerMode) -> Result<FolnerReport> {
    let n = g.n();
    if max_size < 1 || 2 * max_size > n {
        return Err(Error::validation(format!(
            "max_size must lie in 1..=n/2 (n = {n}, got {max_size})"
        )));
    }
    let candidates = binomial_prefix_sum(n, max_size);
    let mode = match mode {
        FolnerMode::Auto if candidates <= FOLNER_EXHAUSTIVE_CAP => FolnerMode::Exhaustive,
        FolnerMode::Auto => FolnerMode::Greedy,
        FolnerMode::Exhaustive if candidates > FOLNER_EXHAUSTIVE_CAP => {
            return Err(Error::resource(format!(
                "exhaustive Følner search needs {candidates} sets (cap {FOLNER_EXHAUSTIVE_CAP})"
            )))
        }
        m => m,
    };
    let mut best: Option<(usize, usize, Vec<Vertex>)> = None;
    let mut offer = |boundary: usize, set: &[Vertex]| {
        let better = match &best {
            None => true,
            Some((bb, bs, bset)) => {
                match ratio_cmp(boundary as u64, set.len() as u64, *bb as u64, *bs as u64) {
                    Ordering::Less => true,
                    Ordering::Equal => {
                        let mut sorted = set.to_vec();
                        sorted.sort_unstable();
                        sorted < *bset
                    }
                    Ordering::Greater => false,
                }
            }
        };
        if better {
            let mut sorted = set.to_vec();
            sorted.sort_unstable();
            best = Some((boundary, set.len(), sorted));
        }
    };
    match mode {
        FolnerMode::Exhaustive => {
            for size in 1..=max_size {
                let mut combo: Vec<Vertex> = (0..size).collect();
                loop {
                    let set = VertexSet::from_sorted_unchecked(combo.clone());
                    offer(g.boundary(&set).len(), &combo);
                    // next combination in lexicographic order
                    let mut i = size;
                    while i > 0 && combo[i - 1] == n - size + i - 1 {
                        i -= 1;
                    }
                    if i == 0 {
                        break;
                    }
                    combo[i - 1] += 1;
                    for j in i..size {
                        combo[j] = combo[j - 1] + 1;
                    }
                }
            }
        }
        _ => {
            // 0 = outside, 1 = boundary, 2 = inside
            let mut state = vec![0u8; n];
            for start in 0..n {
                state.iter_mut().for_each(|s| *s = 0);
                let mut set = vec![start];
                state[start] = 2;
                let mut boundary: Vec<Vertex> = Vec::new();
                for &w in g.neighbors(start) {
                    state[w] = 1;
                    boundary.push(w);
                }
                offer(boundary.len(), &set);
                while set.len() < max_size && !boundary.is_empty() {
                    let (pos, _) = boundary
                        .iter()
                        .enumerate()
                        .map(|(i, &w)| {
                            let fresh = g.neighbors(w).iter().filter(|&&x| state[x] == 0).count();
                            (i, (fresh, w))
                        })
                        .min_by_key(|&(_, key)| key)
                        .unwrap();
                    let w = boundary.swap_remove(pos);
                    state[w] = 2;
                    set.push(w);
                    for &x in g.neighbors(w) {
                        if state[x] == 0 {
                            state[x] = 1;
                            boundary.push(x);
                        }
                    }
                    offer(boundary.len(), &set);
                }
            }
        }
    }
    let (boundary, size, set) = best.expect("n >= 2 gives a candidate");
    Ok(FolnerReport {
        ratio: boundary as f64 / size as f64,
        boundary_size: boundary,
        witness: VertexSet::from_sorted_unchecked(set),
        mode,
        max_size,
    })
}

/// Discrete Cheeger inequality `d·μ/2 ≤ h ≤ d·√(2μ)` with `μ = gap`.
pub fn cheeger_inequality_holds(d: usize, gap: f64, h: f64, tol: f64) -> bool {
    let d = d as f64;
    d * gap / 2.0 <= h + tol && h <= d * (2.0 * gap).sqrt() + tol
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate, GraphKind};
    use approx::assert_abs_diff_eq;

    fn gen(kind: GraphKind) -> Graph {
        generate(kind).unwrap()
    }

    #[test]
    fn markov_examples() {
        let k2 = gen(GraphKind::Complete(2));
        assert_eq!(markov_matrix(&k2).unwrap(), DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]));
        let c4 = markov_matrix(&gen(GraphKind::Cycle(4))).unwrap();
        assert_eq!(c4[(0, 1)], 0.5);
        assert_eq!(c4[(0, 3)], 0.5);
        assert_eq!(c4[(0, 2)], 0.0);
        let pet = markov_matrix(&gen(GraphKind::Petersen)).unwrap();
        for r in 0..10 {
            assert_abs_diff_eq!(pet.row(r).sum(), 1.0, epsilon = 1e-15);
        }
        assert!(markov_matrix(&gen(GraphKind::Path(3))).is_err());
        assert!(markov_matrix(&Graph::new(1, []).unwrap()).is_err());
    }

    #[test]
    fn spectrum_examples() {
        let k4 = spectrum(&gen(GraphKind::Complete(4))).unwrap();
        let expected = [1.0, -1.0 / 3.0, -1.0 / 3.0, -1.0 / 3.0];
        for (a, b) in k4.eigenvalues.iter().zip(expected) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-12);
        }
        assert_abs_diff_eq!(k4.lambda.unwrap(), -1.0 / 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(k4.gap.unwrap(), 4.0 / 3.0, epsilon = 1e-12);

        let c6 = spectrum(&gen(GraphKind::Cycle(6))).unwrap();
        for (a, b) in c6.eigenvalues.iter().zip([1.0, 0.5, 0.5, -0.5, -0.5, -1.0]) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-12);
        }
        assert!(c6.bipartite);
        assert_abs_diff_eq!(c6.lambda.unwrap(), 0.5, epsilon = 1e-12);

        let pet = spectrum(&gen(GraphKind::Petersen)).unwrap();
        assert_abs_diff_eq!(pet.lambda.unwrap(), 1.0 / 3.0, epsilon = 1e-12);
        assert_eq!(pet.eigenvalues.iter().filter(|e| (**e - 1.0 / 3.0).abs() < 1e-9).count(), 5);
        assert_eq!(pet.eigenvalues.iter().filter(|e| (**e + 2.0 / 3.0).abs() < 1e-9).count(), 4);
        assert!(!pet.bipartite);
    }

    #[test]
    fn disjoint_union_spectrum() {
        let c4 = gen(GraphKind::Cycle(4));
        let s1 = spectrum(&c4).unwrap();
        let s2 = spectrum(&c4.disjoint_union(&c4)).unwrap();
        let mut joined = s1.eigenvalues.clone();
        joined.extend(&s1.eigenvalues);
        let joined = descending(joined);
        for (a, b) in s2.eigenvalues.iter().zip(joined) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-12);
        }
        assert_eq!(s2.multiplicity_of_one, 2);
        assert_eq!(s2.components, 2);
    }

    #[test]
    fn lanczos_matches_dense() {
        let g = gen(GraphKind::Torus(7, 9));
        let dense = spectrum(&g).unwrap();
        let k = 4;
        let apply = |x: &[f64], y: &mut [f64]| apply_markov(&g, k, x, y);
        let (vals, vecs) = lanczos_top(g.n(), apply, &component_basis(&g), 300, 1);
        assert_abs_diff_eq!(vals[0], dense.lambda.unwrap(), epsilon = 1e-9);
        // residual of the Ritz vector
        let mut y = vec![0.0; g.n()];
        apply_markov(&g, k, &vecs[0], &mut y);
        let res: f64 = y.iter().zip(&vecs[0]).map(|(a, b)| (a - vals[0] * b).powi(2)).sum();
        assert!(res.sqrt() < 1e-6);
    }

    #[test]
    fn cheeger_exact_examples() {
        let k4 = cheeger_exact(&gen(GraphKind::Complete(4))).unwrap();
        assert_eq!((k4.cut_edges, k4.smaller_side), (4, 2));
        assert_eq!(k4.witness_a.as_slice(), &[0, 1]);
        let c6 = cheeger_exact(&gen(GraphKind::Cycle(6))).unwrap();
        assert_abs_diff_eq!(c6.h, 2.0 / 3.0);
        assert_eq!(c6.witness_a.as_slice(), &[0, 1, 2]);
        let torus = cheeger_exact(&gen(GraphKind::Torus(4, 4))).unwrap();
        assert_abs_diff_eq!(torus.h, 1.0);
        assert_eq!(torus.smaller_side, 8);
        let k2 = cheeger_exact(&gen(GraphKind::Complete(2))).unwrap();
        assert_eq!((k2.h, k2.witness_a.as_slice(), k2.witness_b.as_slice()), (1.0, &[0][..], &[1][..]));
        assert!(matches!(cheeger_exact(&gen(GraphKind::Cycle(25))), Err(Error::Resource(_))));
    }

    #[test]
    fn heuristic_is_an_upper_bound_with_valid_witness() {
        for kind in [
            GraphKind::Cycle(6),
            GraphKind::Cycle(9),
            GraphKind::Complete(5),
            GraphKind::Petersen,
            GraphKind::Torus(3, 4),
            GraphKind::Torus(4, 4),
            GraphKind::Complete(2),
        ] {
            let g = gen(kind);
            let exact = cheeger_exact(&g).unwrap();
            let heur = cheeger_heuristic(&g).unwrap();
            assert_eq!(heur.method, CutMethod::HeuristicUpperBound);
            assert!(heur.h >= exact.h - 1e-12, "{kind:?}");
            let cut = g.edge_cut(&heur.witness_a, &heur.witness_b).unwrap();
            assert_eq!(cut, heur.cut_edges);
            assert!(heur.witness_a.contains(0));
        }
        let k2 = cheeger_heuristic(&gen(GraphKind::Complete(2))).unwrap();
        assert_eq!((k2.h, k2.witness_a.as_slice()), (1.0, &[0][..]));
    }

    #[test]
    fn expander_constant_examples() {
        for n in 2..8 {
            let r = expander_constant(&gen(GraphKind::Complete(n))).unwrap();
            assert_abs_diff_eq!(r.c, n as f64 / (n as f64 - 1.0), epsilon = 1e-12);
        }
        let g = gen(GraphKind::Cycle(6));
        let r = expander_constant(&g).unwrap();
        let a = r.witness.len() as f64;
        let recomputed = g.boundary(&r.witness).len() as f64 / ((1.0 - a / 6.0) * a);
        assert_abs_diff_eq!(r.c, recomputed, epsilon = 1e-12);
        // brute-force oracle over all 62 subsets
        let mut best = f64::INFINITY;
        for mask in 1u64..63 {
            let s = VertexSet::from_mask(mask, 6);
            let a = s.len() as f64;
            best = best.min(g.boundary(&s).len() as f64 / ((1.0 - a / 6.0) * a));
        }
        assert_abs_diff_eq!(r.c, best, epsilon = 1e-12);
    }

    #[test]
    fn folner_examples() {
        let c6 = folner_ratio(&gen(GraphKind::Cycle(6)), 3, FolnerMode::Auto).unwrap();
        assert_eq!(c6.mode, FolnerMode::Exhaustive);
        assert_abs_diff_eq!(c6.ratio, 2.0 / 3.0);
        assert_eq!(c6.witness.len(), 3);
        let k4 = folner_ratio(&gen(GraphKind::Complete(4)), 2, FolnerMode::Auto).unwrap();
        assert_abs_diff_eq!(k4.ratio, 1.0);
        assert_eq!(k4.witness.as_slice(), &[0, 1]);
        assert!(folner_ratio(&gen(GraphKind::Cycle(6)), 4, FolnerMode::Auto).is_err());
        assert!(folner_ratio(&gen(GraphKind::Cycle(6)), 0, FolnerMode::Auto).is_err());
    }

    #[test]
    fn lex_order_on_masks() {
        // {0,2} < {0,3} < {1}; {0} < {0,1}
        assert!(lex_less(0b101, 0b1001));
        assert!(lex_less(0b1001, 0b10));
        assert!(lex_less(0b1, 0b11));
        assert!(!lex_less(0b11, 0b1));
    }
}
