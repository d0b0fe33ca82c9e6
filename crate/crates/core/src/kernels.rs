//! Conditionally negative definite kernels on finite point sets, invariance
//! under group actions, the orbit boundedness certificate, and generalized
//! roundness of graph metrics.

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, Vertex};
use crate::groups::GroupAction;

/// Relative tolerance for the CND test, scaled by `max|h|`.
pub const CND_TOL: f64 = 1e-8;
/// Upper end of the exponent bisections.
pub const EXPONENT_CAP: f64 = 8.0;
/// Work limit (|Γ|·n²) above which invariance is sampled.
pub const INVARIANCE_EXHAUSTIVE_LIMIT: usize = 10_000_000;

/// Symmetric, zero-diagonal function on a labeled finite point set.
#[derive(Debug, Clone, PartialEq)]
pub struct Kernel {
    labels: Vec<String>,
    values: DMatrix<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KernelData {
    #[serde(default)]
    pub labels: Option<Vec<String>>,
    pub values: Vec<Vec<f64>>,
}

impl Kernel {
    /// Validates exact symmetry and an exactly zero diagonal.
    pub fn new(labels: Vec<String>, values: DMatrix<f64>) -> Result<Self> {
        let n = values.nrows();
        if values.ncols() != n || labels.len() != n {
            return Err(Error::validation("kernel must be square with one label per point"));
        }
        for i in 0..n {
            if values[(i, i)] != 0.0 {
                return Err(Error::validation(format!("h({i},{i}) = {} is not zero", values[(i, i)])));
            }
            for j in 0..i {
                if values[(i, j)] != values[(j, i)] {
                    return Err(Error::validation(format!("kernel not symmetric at ({j},{i})")));
                }
                if !values[(i, j)].is_finite() {
                    return Err(Error::validation(format!("non-finite value at ({j},{i})")));
                }
            }
        }
        Ok(Kernel { labels, values })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::validation("kernel rows must all have length n"));
        }
        let labels = (0..n).map(|i| i.to_string()).collect();
        Kernel::new(labels, DMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }

    pub fn zero(n: usize) -> Self {
        Kernel {
            labels: (0..n).map(|i| i.to_string()).collect(),
            values: DMatrix::zeros(n, n),
        }
    }

    /// `d^p` on a point set with integer distances; `0^p = 0` and `d^0 = 1` for `d > 0`.
    pub fn from_distances(labels: Vec<String>, dist: &[Vec<u32>], p: f64) -> Result<Self> {
        if !(p >= 0.0 && p.is_finite()) {
            return Err(Error::validation("exponent must be finite and >= 0"));
        }
        let n = dist.len();
        let values = DMatrix::from_fn(n, n, |i, j| power(dist[i][j], p));
        Kernel::new(labels, values)
    }

    pub fn n(&self) -> usize {
        self.values.nrows()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[(i, j)]
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Kernel with point `i` relabeled as `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let n = self.n();
        let mut inv = vec![usize::MAX; n];
        for (i, &p) in perm.iter().enumerate() {
            if p >= n || inv[p] != usize::MAX {
                return Err(Error::validation("not a permutation"));
            }
            inv[p] = i;
        }
        if perm.len() != n {
            return Err(Error::validation("permutation length mismatch"));
        }
        let labels = inv.iter().map(|&i| self.labels[i].clone()).collect();
        let values = DMatrix::from_fn(n, n, |a, b| self.values[(inv[a], inv[b])]);
        Ok(Kernel { labels, values })
    }

    /// Quadratic form `Σ c_i c_j h_ij`.
    pub fn form(&self, c: &[f64]) -> f64 {
        let v = DVector::from_column_slice(c);
        v.dot(&(&self.values * &v))
    }

    pub fn to_data(&self) -> KernelData {
        KernelData {
            labels: Some(self.labels.clone()),
            values: self.values.row_iter().map(|r| r.iter().copied().collect()).collect(),
        }
    }

    pub fn from_data(data: KernelData) -> Result<Self> {
        let mut k = Kernel::from_rows(&data.values)?;
        if let Some(labels) = data.labels {
            if labels.len() != k.n() {
                return Err(Error::validation("label count differs from kernel size"));
            }
            k.labels = labels;
        }
        Ok(k)
    }

    /// Whitespace-separated square matrix, one row per line; `#` starts a comment.
    pub fn parse_text(text: &str) -> Result<Self> {
        let mut rows = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let row = line
                .split_whitespace()
                .map(|t| {
                    t.parse::<f64>().map_err(|e| Error::Parse {
                        line: i + 1,
                        msg: format!("'{t}': {e}"),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            rows.push(row);
        }
        Kernel::from_rows(&rows)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for row in self.values.row_iter() {
            let cells: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
            out.push_str(&cells.join(" "));
            out.push('\n');
        }
        out
    }
}

fn power(d: u32, p: f64) -> f64 {
    if d == 0 {
        0.0
    } else if p == 0.0 {
        1.0
    } else {
        (d as f64).powf(p)
    }
}

/// `d^p` for the edge-path metric of a connected graph.
pub fn kernel_from_metric(g: &Graph, p: f64) -> Result<Kernel> {
    let rows = distance_rows(g)?;
    let labels = (0..g.n()).map(|i| i.to_string()).collect();
    Kernel::from_distances(labels, &rows, p)
}

fn distance_rows(g: &Graph) -> Result<Vec<Vec<u32>>> {
    if !g.is_connected() {
        return Err(Error::validation("graph must be connected"));
    }
    let metric = g.bfs_metric();
    Ok((0..g.n())
        .map(|u| (0..g.n()).map(|v| metric.get(u, v).expect("connected")).collect())
        .collect())
}

#[derive(Debug, Clone, Serialize)]
pub struct CndWitness {
    /// Zero-sum coefficients, scaled so `max|c_i| = 1` with the first nonzero entry positive.
    pub coefficients: Vec<f64>,
    pub form_value: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CndVerdict {
    pub is_cnd: bool,
    pub max_centered_eigenvalue: f64,
    pub tolerance: f64,
    pub witness: Option<CndWitness>,
}

/// Decides CND through the spectrum of `J·H·J`, `J = I − 11ᵀ/n`: the form on
/// the zero-sum hyperplane is `≤ 0` exactly when that matrix has no positive
/// eigenvalue. `tol` is relative to `max|h|`.
pub fn is_negative_kernel(k: &Kernel, tol: f64) -> CndVerdict {
    let n = k.n();
    let scale = k.max_abs();
    if n < 2 || scale == 0.0 {
        return CndVerdict {
            is_cnd: true,
            max_centered_eigenvalue: 0.0,
            tolerance: 0.0,
            witness: None,
        };
    }
    let tolerance = tol * scale;
    let j = DMatrix::<f64>::identity(n, n) - DMatrix::from_element(n, n, 1.0 / n as f64);
    let centered = &j * k.values() * &j;
    let centered = (&centered + centered.transpose()) * 0.5;
    let eig = SymmetricEigen::new(centered);
    let (top, &max_eig) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("n >= 2");
    if max_eig <= tolerance {
        return CndVerdict {
            is_cnd: true,
            max_centered_eigenvalue: max_eig,
            tolerance,
            witness: None,
        };
    }
    let v = eig.eigenvectors.column(top);
    let mean = v.sum() / n as f64;
    let mut c: Vec<f64> = v.iter().map(|x| x - mean).collect();
    let peak = c.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let first = c.iter().copied().find(|x| x.abs() > 1e-12 * peak).unwrap_or(1.0);
    let factor = first.signum() / peak;
    for x in &mut c {
        *x *= factor;
        if x.abs() < 1e-15 {
            *x = 0.0;
        }
    }
    // re-centre after rounding so Σc vanishes to machine precision
    let drift = c.iter().sum::<f64>() / n as f64;
    if drift.abs() > 1e-15 {
        c.iter_mut().for_each(|x| *x -= drift);
    }
    let form_value = k.form(&c);
    CndVerdict {
        is_cnd: false,
        max_centered_eigenvalue: max_eig,
        tolerance,
        witness: Some(CndWitness {
            coefficients: c,
            form_value,
        }),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct QuasiTriangleReport {
    pub holds: bool,
    /// Minimum of `2(h(a,c) + h(c,b)) − h(a,b)` over ordered triples.
    pub worst_slack: f64,
    pub worst_triple: Option<(usize, usize, usize)>,
}

/// Checks `h(a,b) ≤ 2(h(a,c) + h(c,b))` over all ordered triples.
pub fn quasi_triangle_check(k: &Kernel) -> QuasiTriangleReport {
    let n = k.n();
    let tol = 1e-12 * k.max_abs().max(1.0);
    let mut worst: Option<(f64, (usize, usize, usize))> = None;
    for a in 0..n {
        for b in 0..n {
            let hab = k.get(a, b);
            for c in 0..n {
                let slack = 2.0 * (k.get(a, c) + k.get(c, b)) - hab;
                if worst.is_none_or(|(w, _)| slack < w) {
                    worst = Some((slack, (a, b, c)));
                }
            }
        }
    }
    match worst {
        None => QuasiTriangleReport {
            holds: true,
            worst_slack: 0.0,
            worst_triple: None,
        },
        Some((s, t)) => QuasiTriangleReport {
            holds: s >= -tol,
            worst_slack: s,
            worst_triple: Some(t),
        },
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct InvarianceViolation {
    pub element: usize,
    pub x: Vertex,
    pub y: Vertex,
    pub difference: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct InvarianceReport {
    pub invariant: bool,
    pub sampled: bool,
    pub checked: usize,
    pub worst: Option<InvarianceViolation>,
}

/// Checks `h(γx, γy) = h(x, y)` within `tol`, exhaustively unless
/// `|Γ|·n²` exceeds the limit, in which case `samples` seeded triples are drawn.
pub fn invariance_check(
    k: &Kernel,
    action: &GroupAction,
    tol: f64,
    samples: usize,
    seed: u64,
) -> Result<InvarianceReport> {
    let n = k.n();
    if action.n != n {
        return Err(Error::validation(format!(
            "action on {} points, kernel on {n}",
            action.n
        )));
    }
    let mut worst: Option<InvarianceViolation> = None;
    let mut consider = |g: usize, x: usize, y: usize| {
        let p = &action.perms[g];
        let diff = (k.get(p[x], p[y]) - k.get(x, y)).abs();
        if diff > tol && worst.as_ref().is_none_or(|w| diff > w.difference) {
            worst = Some(InvarianceViolation {
                element: g,
                x,
                y,
                difference: diff,
            });
        }
    };
    let work = action.order().saturating_mul(n * n);
    let sampled = work > INVARIANCE_EXHAUSTIVE_LIMIT;
    let checked = if sampled {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..samples {
            let g = rng.random_range(0..action.order());
            consider(g, rng.random_range(0..n), rng.random_range(0..n));
        }
        samples
    } else {
        for g in 0..action.order() {
            for x in 0..n {
                for y in x + 1..n {
                    consider(g, x, y);
                }
            }
        }
        action.order() * n * n.saturating_sub(1) / 2
    };
    Ok(InvarianceReport {
        invariant: worst.is_none(),
        sampled,
        checked,
        worst,
    })
}

/// `h_x(γ₁, γ₂) = h(γ₁x, γ₂x)` on the acting group. The word metric on the
/// group is not needed for this kernel.
pub fn restrict_to_orbit(k: &Kernel, action: &GroupAction, x: Vertex) -> Result<Kernel> {
    if action.n != k.n() || x >= k.n() {
        return Err(Error::validation("action and kernel point sets differ or x out of range"));
    }
    let m = action.order();
    let values = DMatrix::from_fn(m, m, |a, b| k.get(action.perms[a][x], action.perms[b][x]));
    Ok(Kernel {
        labels: action.labels.clone(),
        values,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundCertificate {
    pub representatives: Vec<Vertex>,
    /// `max h(γx_i, x_i)` over representatives and group elements.
    pub k: f64,
    /// `max h(x_i, x_j)` over representative pairs.
    pub l: f64,
    pub max_h: f64,
    pub bound: f64,
    pub slack: f64,
    pub holds: bool,
}

/// Checks the orbit bound `max h ≤ 6K + 4L` for a Γ-invariant CND kernel.
/// Both hypotheses are verified first and a failure names the one missing.
pub fn bound_certificate(k: &Kernel, action: &GroupAction, tol: f64) -> Result<BoundCertificate> {
    let cnd = is_negative_kernel(k, CND_TOL);
    if !cnd.is_cnd {
        return Err(Error::validation(format!(
            "precondition failed: kernel is not CND (centered eigenvalue {:.6e})",
            cnd.max_centered_eigenvalue
        )));
    }
    let inv = invariance_check(k, action, tol, 1_000_000, 0)?;
    if !inv.invariant {
        return Err(Error::validation("precondition failed: kernel is not invariant under the action"));
    }
    let orbit = action.orbit_map();
    let mut representatives = Vec::new();
    for (v, &o) in orbit.iter().enumerate() {
        if o == representatives.len() {
            representatives.push(v);
        }
    }
    let mut kk = 0.0f64;
    for &x in &representatives {
        for p in &action.perms {
            kk = kk.max(k.get(p[x], x));
        }
    }
    let mut l = 0.0f64;
    for &a in &representatives {
        for &b in &representatives {
            l = l.max(k.get(a, b));
        }
    }
    let max_h = k.values().iter().fold(f64::NEG_INFINITY, |m, &v| m.max(v)).max(0.0);
    let bound = 6.0 * kk + 4.0 * l;
    Ok(BoundCertificate {
        representatives,
        k: kk,
        l,
        max_h,
        bound,
        slack: bound - max_h,
        holds: max_h <= bound + tol,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ExponentInterval {
    /// `d^lo` is CND.
    pub lo: f64,
    /// `d^hi` is not CND, unless `capped`.
    pub hi: f64,
    /// CND held at the cap.
    pub capped: bool,
    pub probes: usize,
}

/// `sup{p : d^p is CND}` by bisection on `[0, 8]`.
pub fn cnd_sup_exponent(g: &Graph, tol_p: f64) -> Result<ExponentInterval> {
    cnd_sup_on_distances(&distance_rows(g)?, tol_p)
}

pub fn cnd_sup_on_distances(dist: &[Vec<u32>], tol_p: f64) -> Result<ExponentInterval> {
    let labels: Vec<String> = (0..dist.len()).map(|i| i.to_string()).collect();
    let mut probes = 0;
    let mut cnd = |p: f64| -> Result<bool> {
        probes += 1;
        Ok(is_negative_kernel(&Kernel::from_distances(labels.clone(), dist, p)?, CND_TOL).is_cnd)
    };
    if cnd(EXPONENT_CAP)? {
        return Ok(ExponentInterval {
            lo: EXPONENT_CAP,
            hi: EXPONENT_CAP,
            capped: true,
            probes,
        });
    }
    let (mut lo, mut hi) = (0.0, EXPONENT_CAP);
    while hi - lo > tol_p {
        // both ends re-probed: the bisection is only valid while CND is monotone in p
        if !cnd(lo)? || cnd(hi)? {
            return Err(Error::Consistency(format!(
                "CND not monotone in the exponent on [{lo}, {hi}]"
            )));
        }
        let mid = 0.5 * (lo + hi);
        if cnd(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(ExponentInterval {
        lo,
        hi,
        capped: false,
        probes,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RoundnessConfig {
    /// Largest configuration size `n` (2n points).
    pub n_max: usize,
    pub tol_q: f64,
    /// Configurations drawn per `n` in sampled mode.
    pub samples: usize,
    pub seed: u64,
    /// Exhaustive search when `|V|^{2n}` is at most this.
    pub exhaustive_limit: u64,
}

impl Default for RoundnessConfig {
    fn default() -> Self {
        RoundnessConfig {
            n_max: 4,
            tol_q: 1e-4,
            samples: 100_000,
            seed: 0,
            exhaustive_limit: 10_000_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchScope {
    Exhaustive,
    Sampled,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScopeEntry {
    pub n: usize,
    pub scope: SearchScope,
    pub configurations: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct RoundnessConfiguration {
    pub a: Vec<usize>,
    pub b: Vec<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RoundnessWitness {
    pub configuration: RoundnessConfiguration,
    /// Point labels of `a` and `b`.
    pub a_labels: Vec<String>,
    pub b_labels: Vec<String>,
    pub q: f64,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RoundnessEstimate {
    /// Largest probed exponent with no violation found; evidence only.
    pub q_lower: f64,
    /// Smallest probed exponent with a violating configuration; a true upper bound.
    pub q_upper: Option<f64>,
    pub witness: Option<RoundnessWitness>,
    pub scope: Vec<ScopeEntry>,
    pub distinct_signatures: usize,
    /// No violation appeared on a grid of exponents below `q_lower`.
    pub monotone_consistent: bool,
    pub cnd_sup: ExponentInterval,
    /// `|q_upper − cnd_sup.hi| ≤ 4·tol_q`.
    pub agrees_with_cnd: bool,
}

/// Inequality sides for configuration `(a, b)` at exponent `q`.
pub fn roundness_sides(dist: &[Vec<u32>], a: &[usize], b: &[usize], q: f64) -> (f64, f64) {
    let mut lhs = 0.0;
    for i in 0..a.len() {
        for j in i + 1..a.len() {
            lhs += power(dist[a[i]][a[j]], q) + power(dist[b[i]][b[j]], q);
        }
    }
    let rhs = a
        .iter()
        .flat_map(|&x| b.iter().map(move |&y| (x, y)))
        .map(|(x, y)| power(dist[x][y], q))
        .sum();
    (lhs, rhs)
}

/// `δ_d` = (pairs at distance `d` on the left) − (cross pairs at distance `d`),
/// indexed by `d − 1`; the violation at `q` is `Σ δ_d d^q > 0`.
fn signature(dist: &[Vec<u32>], a: &[usize], b: &[usize], diam: usize) -> Vec<i32> {
    let mut s = vec![0i32; diam];
    let mut bump = |d: u32, by: i32| {
        if d > 0 {
            s[d as usize - 1] += by;
        }
    };
    for i in 0..a.len() {
        for j in i + 1..a.len() {
            bump(dist[a[i]][a[j]], 1);
            bump(dist[b[i]][b[j]], 1);
        }
    }
    for &x in a {
        for &y in b {
            bump(dist[x][y], -1);
        }
    }
    s
}

fn violated(sig: &[i32], q: f64) -> bool {
    let mut value = 0.0;
    let mut scale = 0.0;
    for (i, &c) in sig.iter().enumerate() {
        let w = power(i as u32 + 1, q);
        value += c as f64 * w;
        scale += (c as f64).abs() * w;
    }
    value > 1e-9 * scale
}

/// Next multiset of `len` points in `0..m` as a non-decreasing tuple.
fn next_multiset(t: &mut [usize], m: usize) -> bool {
    let len = t.len();
    let mut i = len;
    while i > 0 {
        i -= 1;
        if t[i] + 1 < m {
            let v = t[i] + 1;
            t[i..].iter_mut().for_each(|x| *x = v);
            return true;
        }
    }
    false
}

struct SignatureSet {
    best: HashMap<Vec<i32>, (usize, RoundnessConfiguration)>,
}

impl SignatureSet {
    fn insert(&mut self, sig: Vec<i32>, n: usize, cfg: RoundnessConfiguration) {
        if sig.iter().all(|&c| c == 0) {
            return;
        }
        match self.best.get_mut(&sig) {
            Some(cur) if (n, &cfg) < (cur.0, &cur.1) => *cur = (n, cfg),
            Some(_) => {}
            None => {
                self.best.insert(sig, (n, cfg));
            }
        }
    }

    /// Smallest `(n, configuration)` among signatures violated at `q`.
    fn first_violation(&self, q: f64) -> Option<&(usize, RoundnessConfiguration)> {
        self.best
            .iter()
            .filter(|(s, _)| violated(s, q))
            .map(|(_, w)| w)
            .min()
    }
}

/// Generalized roundness of the metric on `dist` (points labeled by
/// `labels`), searched over configurations with `2 ≤ n ≤ n_max`. Extra
/// configurations in `seeds` are always included.
pub fn roundness_on_distances(
    dist: &[Vec<u32>],
    labels: &[String],
    cfg: &RoundnessConfig,
    seeds: &[RoundnessConfiguration],
) -> Result<RoundnessEstimate> {
    let m = dist.len();
    if m == 0 || cfg.n_max < 2 {
        return Err(Error::validation("need a nonempty point set and n_max >= 2"));
    }
    let diam = dist.iter().flatten().copied().max().unwrap_or(0) as usize;
    let mut set = SignatureSet { best: HashMap::new() };
    let mut scope = Vec::new();
    for n in 2..=cfg.n_max {
        let ordered = (m as f64).powi(2 * n as i32);
        if ordered <= cfg.exhaustive_limit as f64 {
            let mut count = 0u64;
            let mut a = vec![0; n];
            loop {
                let mut b = a.clone();
                loop {
                    count += 1;
                    set.insert(signature(dist, &a, &b, diam), n, RoundnessConfiguration {
                        a: a.clone(),
                        b: b.clone(),
                    });
                    if !next_multiset(&mut b, m) {
                        break;
                    }
                }
                if !next_multiset(&mut a, m) {
                    break;
                }
            }
            scope.push(ScopeEntry {
                n,
                scope: SearchScope::Exhaustive,
                configurations: count,
            });
        } else {
            // one fixed sample per n, reused for every exponent probe
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ (n as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
            for _ in 0..cfg.samples {
                let mut a: Vec<usize> = (0..n).map(|_| rng.random_range(0..m)).collect();
                let mut b: Vec<usize> = (0..n).map(|_| rng.random_range(0..m)).collect();
                a.sort_unstable();
                b.sort_unstable();
                if b < a {
                    std::mem::swap(&mut a, &mut b);
                }
                set.insert(signature(dist, &a, &b, diam), n, RoundnessConfiguration { a, b });
            }
            scope.push(ScopeEntry {
                n,
                scope: SearchScope::Sampled,
                configurations: cfg.samples as u64,
            });
        }
    }
    for s in seeds {
        if s.a.len() != s.b.len() || s.a.len() < 2 || s.a.iter().chain(&s.b).any(|&v| v >= m) {
            return Err(Error::validation("seed configuration does not fit the point set"));
        }
        set.insert(signature(dist, &s.a, &s.b, diam), s.a.len(), s.clone());
    }

    let (q_lower, q_upper) = if set.first_violation(0.0).is_some() {
        (0.0, Some(0.0))
    } else if set.first_violation(EXPONENT_CAP).is_none() {
        (EXPONENT_CAP, None)
    } else {
        let (mut lo, mut hi) = (0.0, EXPONENT_CAP);
        while hi - lo > cfg.tol_q {
            let mid = 0.5 * (lo + hi);
            if set.first_violation(mid).is_some() {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        (lo, Some(hi))
    };
    let monotone_consistent = (0..32).all(|i| set.first_violation(q_lower * i as f64 / 32.0).is_none())
        || q_upper == Some(0.0);
    let witness = q_upper.and_then(|q| {
        let (_, c) = set.first_violation(q)?;
        let (lhs, rhs) = roundness_sides(dist, &c.a, &c.b, q);
        Some(RoundnessWitness {
            a_labels: c.a.iter().map(|&i| labels[i].clone()).collect(),
            b_labels: c.b.iter().map(|&i| labels[i].clone()).collect(),
            configuration: c.clone(),
            q,
            lhs,
            rhs,
        })
    });
    let cnd_sup = cnd_sup_on_distances(dist, cfg.tol_q)?;
    let reference = if cnd_sup.capped { None } else { Some(cnd_sup.hi) };
    let agrees_with_cnd = match (q_upper, reference) {
        (Some(q), Some(p)) => (q - p).abs() <= 4.0 * cfg.tol_q,
        (None, None) => true,
        _ => false,
    };
    Ok(RoundnessEstimate {
        q_lower,
        q_upper,
        witness,
        scope,
        distinct_signatures: set.best.len(),
        monotone_consistent,
        cnd_sup,
        agrees_with_cnd,
    })
}

pub fn roundness_estimate(g: &Graph, cfg: &RoundnessConfig) -> Result<RoundnessEstimate> {
    let dist = distance_rows(g)?;
    let labels: Vec<String> = (0..g.n()).map(|i| i.to_string()).collect();
    roundness_on_distances(&dist, &labels, cfg, &[])
}

#[derive(Debug, Clone, Serialize)]
pub struct BallRoundness {
    pub radius: u32,
    pub size: usize,
    pub estimate: RoundnessEstimate,
}

/// Roundness of the balls `B(center, r)` with the metric of `g` restricted to
/// them. Each ball also receives the previous ball's witness, so sampled
/// searches cannot lose a violation already found in a smaller ball.
pub fn ball_roundness_trend(
    g: &Graph,
    center: Vertex,
    radii: &[u32],
    cfg: &RoundnessConfig,
) -> Result<Vec<BallRoundness>> {
    if center >= g.n() {
        return Err(Error::validation("center out of range"));
    }
    if radii.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::validation("radii must be strictly increasing"));
    }
    let from_center = g.bfs_from(center);
    let mut out: Vec<BallRoundness> = Vec::new();
    let mut carried: Option<Vec<Vertex>> = None;
    for &r in radii {
        let points: Vec<Vertex> = (0..g.n()).filter(|&v| from_center[v].is_some_and(|d| d <= r)).collect();
        let dist: Vec<Vec<u32>> = points
            .iter()
            .map(|&u| {
                let row = g.bfs_from(u);
                points.iter().map(|&v| row[v].expect("same component")).collect()
            })
            .collect();
        let labels: Vec<String> = points.iter().map(|v| v.to_string()).collect();
        let index: HashMap<Vertex, usize> = points.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let seeds: Vec<RoundnessConfiguration> = match (&carried, out.last()) {
            (Some(prev_points), Some(prev)) => prev
                .estimate
                .witness
                .iter()
                .map(|w| {
                    let lift = |xs: &[usize]| {
                        let mut v: Vec<usize> = xs.iter().map(|&i| index[&prev_points[i]]).collect();
                        v.sort_unstable();
                        v
                    };
                    let (a, b) = (lift(&w.configuration.a), lift(&w.configuration.b));
                    if b < a {
                        RoundnessConfiguration { a: b, b: a }
                    } else {
                        RoundnessConfiguration { a, b }
                    }
                })
                .collect(),
            _ => Vec::new(),
        };
        let estimate = roundness_on_distances(&dist, &labels, cfg, &seeds)?;
        out.push(BallRoundness {
            radius: r,
            size: points.len(),
            estimate,
        });
        carried = Some(points);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate, GraphKind};

    fn graph(kind: GraphKind) -> Graph {
        generate(kind).unwrap()
    }

    #[test]
    fn metric_kernels() {
        let c4 = graph(GraphKind::Cycle(4));
        let k = kernel_from_metric(&c4, 2.0).unwrap();
        assert_eq!((k.get(0, 1), k.get(0, 2), k.get(0, 0)), (1.0, 4.0, 0.0));
        let p3 = graph(GraphKind::Path(3));
        let k = kernel_from_metric(&p3, 1.0).unwrap();
        assert_eq!((k.get(0, 1), k.get(0, 2), k.get(1, 2)), (1.0, 2.0, 1.0));
        let k0 = kernel_from_metric(&p3, 0.0).unwrap();
        assert_eq!((k0.get(0, 2), k0.get(1, 1)), (1.0, 0.0));
        let split = Graph::new(3, [(0, 1)]).unwrap();
        assert!(kernel_from_metric(&split, 1.0).is_err());
    }

    #[test]
    fn kernel_validation() {
        assert!(Kernel::from_rows(&[vec![0.0, 1.0], vec![2.0, 0.0]]).is_err());
        assert!(Kernel::from_rows(&[vec![1.0, 1.0], vec![1.0, 0.0]]).is_err());
        let k = Kernel::parse_text("0 1 # a\n1 0\n").unwrap();
        assert_eq!(k.get(0, 1), 1.0);
        assert_eq!(Kernel::parse_text(&k.to_text()).unwrap(), k);
    }

    #[test]
    fn cnd_examples() {
        assert!(is_negative_kernel(&Kernel::zero(5), CND_TOL).is_cnd);
        let c4 = kernel_from_metric(&graph(GraphKind::Cycle(4)), 2.0).unwrap();
        let v = is_negative_kernel(&c4, CND_TOL);
        assert!(!v.is_cnd);
        let w = v.witness.unwrap();
        for (c, e) in w.coefficients.iter().zip([1.0, -1.0, 1.0, -1.0]) {
            approx::assert_abs_diff_eq!(*c, e, epsilon = 1e-12);
        }
        assert!(w.coefficients.iter().sum::<f64>().abs() < 1e-12);
        assert!((w.form_value - 8.0).abs() < 1e-9);
        let line = Kernel::from_rows(&[
            vec![0.0, 1.0, 4.0],
            vec![1.0, 0.0, 1.0],
            vec![4.0, 1.0, 0.0],
        ])
        .unwrap();
        assert!(is_negative_kernel(&line, CND_TOL).is_cnd);
    }

    #[test]
    fn quasi_triangle_examples() {
        let c4 = graph(GraphKind::Cycle(4));
        assert!(quasi_triangle_check(&kernel_from_metric(&c4, 1.0).unwrap()).holds);
        let r = quasi_triangle_check(&Kernel::zero(3));
        assert!(r.holds && r.worst_slack == 0.0);
        // d² on C4: 4 ≤ 2(1 + 1) is tight, the degenerate triples give slack 0 too
        let r = quasi_triangle_check(&kernel_from_metric(&c4, 2.0).unwrap());
        assert!(r.holds);
        assert_eq!(r.worst_slack, 0.0);
        assert_eq!(r.worst_triple, Some((0, 0, 0)));
    }

    #[test]
    fn invariance_examples() {
        let c6 = graph(GraphKind::Cycle(6));
        let rot: Vec<usize> = (0..6).map(|v| (v + 1) % 6).collect();
        let act = GroupAction::generated_by(&c6, &[rot]).unwrap();
        let k = kernel_from_metric(&c6, 1.5).unwrap();
        assert!(invariance_check(&k, &act, 1e-12, 0, 0).unwrap().invariant);
        let mut rows: Vec<Vec<f64>> = k.values().row_iter().map(|r| r.iter().copied().collect()).collect();
        rows[0][1] = 7.0;
        rows[1][0] = 7.0;
        let bad = Kernel::from_rows(&rows).unwrap();
        let r = invariance_check(&bad, &act, 1e-12, 0, 0).unwrap();
        assert!(!r.invariant);
        let w = r.worst.unwrap();
        assert!((w.x, w.y) == (0, 1) || act.perms[w.element][w.x].min(act.perms[w.element][w.y]) == 0);
        assert!(invariance_check(&Kernel::zero(5), &act, 1e-12, 0, 0).is_err());
    }

    #[test]
    fn orbit_restriction() {
        let c6 = graph(GraphKind::Cycle(6));
        let rot: Vec<usize> = (0..6).map(|v| (v + 1) % 6).collect();
        let act = GroupAction::generated_by(&c6, &[rot]).unwrap();
        let k = kernel_from_metric(&c6, 1.0).unwrap();
        let hx = restrict_to_orbit(&k, &act, 0).unwrap();
        assert_eq!(is_negative_kernel(&hx, CND_TOL).is_cnd, is_negative_kernel(&k, CND_TOL).is_cnd);
        let triv = restrict_to_orbit(&k, &GroupAction::trivial(6), 3).unwrap();
        assert_eq!(triv.max_abs(), 0.0);
    }

    #[test]
    fn certificates() {
        let c6 = graph(GraphKind::Cycle(6));
        let rot: Vec<usize> = (0..6).map(|v| (v + 1) % 6).collect();
        let act = GroupAction::generated_by(&c6, &[rot]).unwrap();
        let k = kernel_from_metric(&c6, 1.0).unwrap();
        let c = bound_certificate(&k, &act, 1e-9).unwrap();
        assert_eq!((c.k, c.l, c.bound, c.max_h), (3.0, 0.0, 18.0, 3.0));
        assert!(c.holds);

        let z = bound_certificate(&Kernel::zero(6), &act, 1e-9).unwrap();
        assert_eq!((z.k, z.l, z.bound, z.max_h), (0.0, 0.0, 0.0, 0.0));
        assert!(z.holds);

        let rot2: Vec<usize> = (0..6).map(|v| (v + 2) % 6).collect();
        let act2 = GroupAction::generated_by(&c6, &[rot2]).unwrap();
        let c = bound_certificate(&k, &act2, 1e-9).unwrap();
        assert_eq!(c.representatives, vec![0, 1]);
        assert_eq!((c.k, c.l, c.bound), (2.0, 1.0, 16.0));
        assert!(c.holds);

        let c4 = kernel_from_metric(&graph(GraphKind::Cycle(4)), 2.0).unwrap();
        let err = bound_certificate(&c4, &GroupAction::trivial(4), 1e-9).unwrap_err();
        assert!(err.to_string().contains("not CND"));
    }

    #[test]
    fn cnd_exponents() {
        let p3 = cnd_sup_exponent(&graph(GraphKind::Path(3)), 1e-4).unwrap();
        assert!(p3.lo >= 2.0 - 1e-3);
        let c4 = cnd_sup_exponent(&graph(GraphKind::Cycle(4)), 1e-4).unwrap();
        assert!(c4.hi < 2.0);
        let k2 = cnd_sup_exponent(&graph(GraphKind::Complete(2)), 1e-4).unwrap();
        assert!(k2.capped && k2.lo == EXPONENT_CAP);
    }

    #[test]
    fn roundness_examples() {
        let cfg = RoundnessConfig::default();
        let p3 = roundness_estimate(&graph(GraphKind::Path(3)), &cfg).unwrap();
        let q = p3.q_upper.unwrap();
        assert!((q - 2.0).abs() <= 1e-3);
        let w = p3.witness.unwrap();
        assert_eq!(w.configuration, RoundnessConfiguration { a: vec![0, 2], b: vec![1, 1] });
        assert!(w.lhs > w.rhs);
        assert!(p3.agrees_with_cnd && p3.monotone_consistent);

        let k2 = roundness_estimate(&graph(GraphKind::Complete(2)), &cfg).unwrap();
        assert!(k2.q_upper.is_none());
        assert_eq!(k2.q_lower, EXPONENT_CAP);

        // star K_{1,4}: four leaves against the centre four times
        let star = roundness_estimate(&graph(GraphKind::CompleteBipartite(1, 4)), &cfg).unwrap();
        let expected = (8.0f64 / 3.0).log2();
        assert!((star.q_upper.unwrap() - expected).abs() <= 1e-3);
        assert!(star.agrees_with_cnd);
    }

    #[test]
    fn multiset_enumeration() {
        let mut t = vec![0, 0];
        let mut all = vec![t.clone()];
        while next_multiset(&mut t, 3) {
            all.push(t.clone());
        }
        assert_eq!(all.len(), 6);
        assert_eq!(all.last().unwrap(), &vec![2, 2]);
    }
}
