//! Families of finite graphs: quotient towers, prime-level families, uniform
//! spectral gap and Cheeger verdicts, and Følner sets pushed through covers.

use serde::{Deserialize, Serialize};

use crate::coverings::{quotient_cover_from_reduction, CoveringMap, Degeneracy};
use crate::error::{Error, Result};
use crate::graph::{Graph, Vertex, VertexSet};
use crate::groups::{cayley_graph, sl_group};
use crate::spectra::{
    cheeger_exact, cheeger_heuristic, expander_constant, folner_ratio, spectrum, FolnerMode,
    EXACT_VERTEX_CAP,
};

/// Where a family came from, echoed into reports.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FamilySpec {
    Paths { paths: Vec<String> },
    Tower { tower: TowerSpec },
    Primes { primes: PrimeSpec },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TowerSpec {
    pub dim: usize,
    pub prime: u32,
    pub depth: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeSpec {
    pub dim: usize,
    pub primes: Vec<u32>,
}

#[derive(Debug, Clone)]
pub struct FamilyMember {
    pub graph: Graph,
    /// Cover onto this member from the family's common source graph.
    pub cover: Option<CoveringMap>,
    pub degeneracy: Option<Degeneracy>,
}

/// Cover between consecutive tower levels, `X_{k+1} → X_k`.
#[derive(Debug, Clone, Serialize)]
pub struct TowerLink {
    pub from_level: u32,
    pub to_level: u32,
    pub verified: bool,
    pub fiber_size: Option<usize>,
    pub degeneracy: Degeneracy,
}

#[derive(Debug, Clone)]
pub struct GraphFamily {
    pub members: Vec<FamilyMember>,
    pub links: Vec<TowerLink>,
    pub provenance: String,
    pub notes: Vec<String>,
}

impl GraphFamily {
    /// Members without covers.
    pub fn from_graphs(graphs: Vec<Graph>, provenance: impl Into<String>) -> Self {
        GraphFamily {
            members: graphs
                .into_iter()
                .map(|graph| FamilyMember {
                    graph,
                    cover: None,
                    degeneracy: None,
                })
                .collect(),
            links: Vec::new(),
            provenance: provenance.into(),
            notes: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

fn is_prime(p: u32) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

fn level_graph(dim: usize, modulus: u32, cap: usize) -> Result<Graph> {
    let group = sl_group(dim, modulus, cap)?;
    let (g, _) = cayley_graph(&group)?;
    Ok(g.with_name(format!("Cay(SL{dim}(Z/{modulus}))")))
}

/// `Cay(SL_dim(ℤ/p^k))` for `k = 1..=depth`. The top level covers every
/// member through reduction; consecutive levels are linked by verified covers.
pub fn build_tower(dim: usize, prime: u32, depth: u32, cap: usize) -> Result<GraphFamily> {
    if !is_prime(prime) {
        return Err(Error::validation(format!("{prime} is not prime")));
    }
    if depth == 0 {
        return Err(Error::validation("tower depth must be at least 1"));
    }
    let modulus = |k: u32| {
        prime
            .checked_pow(k)
            .ok_or_else(|| Error::validation(format!("{prime}^{k} overflows")))
    };
    let mut graphs = Vec::new();
    for k in 1..=depth {
        let g = level_graph(dim, modulus(k)?, cap).map_err(|e| match e {
            Error::Resource(msg) => Error::Resource(format!("tower level {k} (modulus {}) infeasible: {msg}", prime.pow(k))),
            other => other,
        })?;
        graphs.push(g);
    }
    let top = modulus(depth)?;
    let mut members = Vec::new();
    let mut top_links = Vec::new();
    for (k, graph) in (1..=depth).zip(graphs) {
        if k == depth {
            let id: Vec<Vertex> = (0..graph.n()).collect();
            let cover = crate::coverings::verify_cover(&graph, &graph, &id);
            members.push(FamilyMember {
                graph,
                cover: Some(cover),
                degeneracy: Some(Degeneracy::default()),
            });
        } else {
            let rc = quotient_cover_from_reduction(dim, top, modulus(k)?, cap)?;
            top_links.push((k, rc.cover.clone(), rc.degeneracy.clone()));
            members.push(FamilyMember {
                graph,
                cover: Some(rc.cover),
                degeneracy: Some(rc.degeneracy),
            });
        }
    }
    let mut links = Vec::new();
    for k in 1..depth {
        let (verified, fiber_size, degeneracy) = if k + 1 == depth {
            let (_, cov, deg) = top_links.iter().find(|(l, _, _)| *l == k).expect("top link");
            (cov.verified, cov.fiber_size(), deg.clone())
        } else {
            let rc = quotient_cover_from_reduction(dim, modulus(k + 1)?, modulus(k)?, cap)?;
            (rc.cover.verified, rc.cover.fiber_size(), rc.degeneracy)
        };
        links.push(TowerLink {
            from_level: k + 1,
            to_level: k,
            verified,
            fiber_size,
            degeneracy,
        });
    }
    Ok(GraphFamily {
        members,
        links,
        provenance: format!("tower dim={dim} prime={prime} depth={depth}"),
        notes: vec![
            "trivial intersection of deck groups is recorded as metadata only; not checkable on finitely many members".into(),
        ],
    })
}

/// `Cay(SL_dim(ℤ/p))` for each listed prime, without covers.
pub fn build_prime_family(dim: usize, primes: &[u32], cap: usize) -> Result<GraphFamily> {
    if primes.is_empty() {
        return Err(Error::validation("need at least one prime"));
    }
    if let Some(&p) = primes.iter().find(|&&p| !is_prime(p)) {
        return Err(Error::validation(format!("{p} is not prime")));
    }
    let graphs = primes
        .iter()
        .map(|&p| level_graph(dim, p, cap))
        .collect::<Result<Vec<_>>>()?;
    let list: Vec<String> = primes.iter().map(u32::to_string).collect();
    let mut fam = GraphFamily::from_graphs(graphs, format!("primes dim={dim} p=[{}]", list.join(",")));
    fam.notes.push("no covering maps between members (absent)".into());
    Ok(fam)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CheegerMode {
    /// Exact up to the vertex cap, interval beyond.
    Auto,
    /// Exact only; members over the cap are a resource error.
    Exact,
    /// Spectral lower bound and sweep-cut upper bound for every member.
    Interval,
    Skip,
}

impl std::str::FromStr for CheegerMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(CheegerMode::Auto),
            "exact" => Ok(CheegerMode::Exact),
            "interval" => Ok(CheegerMode::Interval),
            "skip" => Ok(CheegerMode::Skip),
            other => Err(Error::validation(format!("unknown cheeger mode '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Thresholds {
    pub eps1: f64,
    pub eps2: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds { eps1: 0.05, eps2: 0.05 }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct MemberRow {
    pub name: String,
    pub n: usize,
    pub k: Option<usize>,
    pub lambda: Option<f64>,
    pub gap: Option<f64>,
    pub h_lo: Option<f64>,
    pub h_hi: Option<f64>,
    pub h_exact: bool,
    pub c: Option<f64>,
    pub cover_verified: Option<bool>,
    pub fiber_size: Option<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct FamilyReport {
    pub provenance: String,
    pub thresholds: Thresholds,
    pub cheeger_mode: CheegerMode,
    pub rows: Vec<MemberRow>,
    pub links: Vec<TowerLink>,
    pub inf_h_lo: Option<f64>,
    pub inf_h_hi: Option<f64>,
    pub sup_lambda: Option<f64>,
    pub min_gap: Option<f64>,
    /// `min gap ≥ ε₂`; `None` when some member has no gap.
    pub uniform_gap_verdict: Option<bool>,
    /// `true` if every `h_lo ≥ ε₁`, `false` if some `h_hi < ε₁`, else undecided.
    pub cheeger_verdict: Option<bool>,
    /// Uniform gap and every member covered by a verified map; `None`
    /// without covers or with mixed degrees.
    pub tau_verdict: Option<bool>,
    /// Uniform gap at `ε₂` implies `inf h ≥ k·ε₂/2` on exactly computed rows.
    pub gap_cheeger_coherent: Option<bool>,
    pub notes: Vec<String>,
}

fn min_opt(mut values: impl Iterator<Item = Option<f64>>) -> Option<f64> {
    values.try_fold(f64::INFINITY, |acc, v| Some(acc.min(v?)))
        .filter(|v| v.is_finite())
}

fn analyze_member(member: &FamilyMember, index: usize, mode: CheegerMode) -> Result<MemberRow> {
    let g = &member.graph;
    let name = g.name().map_or_else(|| format!("member{index}"), str::to_string);
    let k = g.regular_degree().filter(|&k| k > 0);
    let spec = match k {
        Some(_) => Some(spectrum(g)?),
        None => None,
    };
    let lambda = spec.as_ref().and_then(|s| s.lambda);
    let gap = spec.as_ref().and_then(|s| s.gap);
    let small = g.n() <= EXACT_VERTEX_CAP && g.n() >= 2;
    let connected = g.is_connected();
    let (h_lo, h_hi, h_exact) = match mode {
        CheegerMode::Skip => (None, None, false),
        _ if !connected => (Some(0.0), Some(0.0), true),
        CheegerMode::Exact | CheegerMode::Auto if small => {
            let h = cheeger_exact(g)?.h;
            (Some(h), Some(h), true)
        }
        CheegerMode::Exact => {
            return Err(Error::resource(format!(
                "exact Cheeger requested for {name} with n = {} > {EXACT_VERTEX_CAP}",
                g.n()
            )))
        }
        _ => {
            let lo = match (k, gap) {
                (Some(k), Some(gap)) => Some(k as f64 * gap / 2.0),
                _ => None,
            };
            let hi = if k.is_some() { Some(cheeger_heuristic(g)?.h) } else { None };
            (lo, hi, false)
        }
    };
    let c = if small { Some(expander_constant(g)?.c) } else { None };
    Ok(MemberRow {
        name,
        n: g.n(),
        k,
        lambda,
        gap,
        h_lo,
        h_hi,
        h_exact,
        c,
        cover_verified: member.cover.as_ref().map(|c| c.verified),
        fiber_size: member.cover.as_ref().and_then(CoveringMap::fiber_size),
    })
}

pub fn analyze_family(fam: &GraphFamily, thresholds: Thresholds, mode: CheegerMode) -> Result<FamilyReport> {
    let rows = fam
        .members
        .iter()
        .enumerate()
        .map(|(i, m)| analyze_member(m, i, mode))
        .collect::<Result<Vec<_>>>()?;
    Ok(report_from_rows(fam, rows, thresholds, mode))
}

fn report_from_rows(fam: &GraphFamily, rows: Vec<MemberRow>, thresholds: Thresholds, mode: CheegerMode) -> FamilyReport {
    let min_gap = min_opt(rows.iter().map(|r| r.gap));
    let sup_lambda = rows
        .iter()
        .map(|r| r.lambda)
        .try_fold(f64::NEG_INFINITY, |acc, v| v.map(|v| acc.max(v)))
        .filter(|v| v.is_finite());
    let inf_h_lo = min_opt(rows.iter().map(|r| r.h_lo));
    let inf_h_hi = min_opt(rows.iter().map(|r| r.h_hi));
    let uniform_gap_verdict = min_gap.map(|g| g >= thresholds.eps2);
    let cheeger_verdict = if rows.iter().any(|r| r.h_hi.is_some_and(|h| h < thresholds.eps1)) {
        Some(false)
    } else if rows.iter().all(|r| r.h_lo.is_some_and(|h| h >= thresholds.eps1)) {
        Some(true)
    } else {
        None
    };
    let first_k = rows.first().and_then(|r| r.k);
    let same_degree = first_k.is_some() && rows.iter().all(|r| r.k == first_k);
    let covered = rows.iter().all(|r| r.cover_verified.is_some());
    let tau_verdict = (same_degree && covered && !rows.is_empty()).then(|| {
        uniform_gap_verdict == Some(true) && rows.iter().all(|r| r.cover_verified == Some(true))
    });
    let gap_cheeger_coherent = match uniform_gap_verdict {
        Some(true) => {
            let exact: Vec<&MemberRow> = rows.iter().filter(|r| r.h_exact).collect();
            (!exact.is_empty()).then(|| {
                exact.iter().all(|r| {
                    let k = r.k.unwrap_or(0) as f64;
                    r.h_lo.is_some_and(|h| h + 1e-9 >= k * thresholds.eps2 / 2.0)
                })
            })
        }
        _ => None,
    };
    let mut notes = fam.notes.clone();
    if !same_degree {
        notes.push("members are not all regular of one degree; tau verdict suppressed".into());
    } else if !covered {
        notes.push("covering maps absent; only the uniform-gap verdict applies".into());
    }
    FamilyReport {
        provenance: fam.provenance.clone(),
        thresholds,
        cheeger_mode: mode,
        rows,
        links: fam.links.clone(),
        inf_h_lo,
        inf_h_hi,
        sup_lambda,
        min_gap,
        uniform_gap_verdict,
        cheeger_verdict,
        tau_verdict,
        gap_cheeger_coherent,
        notes,
    }
}

impl FamilyReport {
    /// One row per member: `name,n,k,lambda,gap,h_lo,h_hi,c,cover_verified`.
    pub fn to_csv(&self) -> String {
        fn cell<T: ToString>(v: Option<T>) -> String {
            v.map(|x| x.to_string()).unwrap_or_default()
        }
        let mut out = String::from("name,n,k,lambda,gap,h_lo,h_hi,c,cover_verified\n");
        for r in &self.rows {
            let fields = [
                format!("\"{}\"", r.name.replace('"', "\"\"")),
                r.n.to_string(),
                cell(r.k),
                cell(r.lambda),
                cell(r.gap),
                cell(r.h_lo),
                cell(r.h_hi),
                cell(r.c),
                cell(r.cover_verified),
            ];
            out.push_str(&fields.join(","));
            out.push('\n');
        }
        out
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct InjectionProbe {
    pub size: usize,
    pub set: VertexSet,
    /// Two vertices of `F` in one fiber, if any.
    pub collision: Option<(Vertex, Vertex)>,
    pub injective: bool,
    pub at_most_half: bool,
    /// `|∂F|/|F|` with the vertex boundary in the covering graph.
    pub vertex_ratio: f64,
    /// `|E(p(F), V∖p(F))|/|p(F)|` in the covered graph.
    pub cut_ratio: f64,
    /// Upper bound on `h` of the covered graph, when `p|F` is injective and `|F| ≤ n/2`.
    pub h_upper_bound: Option<f64>,
}

/// Pushes a candidate set `F` of the covering graph down `cov`.
pub fn probe_set(cov: &CoveringMap, set: &VertexSet) -> Result<InjectionProbe> {
    let src = &cov.source;
    let tgt = &cov.target;
    if set.is_empty() || set.iter().any(|v| v >= src.n()) {
        return Err(Error::validation("candidate set must be nonempty and inside the source"));
    }
    let mut owner = vec![usize::MAX; tgt.n()];
    let mut collision = None;
    for v in set.iter() {
        let t = cov.vmap[v];
        if owner[t] != usize::MAX {
            collision.get_or_insert((owner[t], v));
        } else {
            owner[t] = v;
        }
    }
    let image = VertexSet::new(tgt.n(), set.iter().map(|v| cov.vmap[v]))?;
    let rest = image.complement(tgt.n());
    let cut = tgt.edge_cut(&image, &rest)?;
    let injective = collision.is_none();
    let at_most_half = 2 * set.len() <= tgt.n();
    let vertex_ratio = src.boundary(set).len() as f64 / set.len() as f64;
    let cut_ratio = cut as f64 / image.len() as f64;
    Ok(InjectionProbe {
        size: set.len(),
        set: set.clone(),
        collision,
        injective,
        at_most_half,
        vertex_ratio,
        cut_ratio,
        h_upper_bound: (injective && at_most_half && cov.verified).then_some(cut_ratio),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct MemberProbe {
    pub member: String,
    pub probes: Vec<InjectionProbe>,
}

#[derive(Debug, Clone, Serialize)]
pub struct FolnerProbeReport {
    pub ball_radius: u32,
    pub sizes: Vec<usize>,
    pub members: Vec<MemberProbe>,
    pub notice: Option<String>,
}

/// Følner candidates from the ball of radius `radius` about vertex 0 of the
/// common covering graph, pushed down to each member.
pub fn folner_injection_probe(fam: &GraphFamily, radius: u32, sizes: &[usize]) -> Result<FolnerProbeReport> {
    let Some(source) = fam.members.iter().find_map(|m| m.cover.as_ref().map(|c| &c.source)) else {
        return Ok(FolnerProbeReport {
            ball_radius: radius,
            sizes: sizes.to_vec(),
            members: Vec::new(),
            notice: Some("no covering maps in this family; probe skipped".into()),
        });
    };
    let (ball, inside) = source.ball(0, radius);
    let mut candidates = Vec::new();
    for &s in sizes {
        if s == 0 || 2 * s > ball.n() {
            return Err(Error::validation(format!("size {s} does not fit the ball of {} vertices", ball.n())));
        }
        let w = folner_ratio(&ball, s, FolnerMode::Auto)?.witness;
        candidates.push(VertexSet::new(source.n(), w.iter().map(|i| inside.as_slice()[i]))?);
    }
    let mut members = Vec::new();
    for (i, m) in fam.members.iter().enumerate() {
        let Some(cov) = &m.cover else { continue };
        let probes = candidates.iter().map(|f| probe_set(cov, f)).collect::<Result<Vec<_>>>()?;
        members.push(MemberProbe {
            member: m.graph.name().map_or_else(|| format!("member{i}"), str::to_string),
            probes,
        });
    }
    Ok(FolnerProbeReport {
        ball_radius: radius,
        sizes: sizes.to_vec(),
        members,
        notice: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coverings::verify_cover;
    use crate::graph::{generate, GraphKind};
    use crate::groups::DEFAULT_ORDER_CAP;

    #[test]
    fn towers() {
        let fam = build_tower(2, 3, 2, DEFAULT_ORDER_CAP).unwrap();
        let sizes: Vec<usize> = fam.members.iter().map(|m| m.graph.n()).collect();
        assert_eq!(sizes, vec![24, 648]);
        assert_eq!(fam.links.len(), 1);
        assert!(fam.links[0].verified);
        assert_eq!(fam.links[0].fiber_size, Some(27));
        assert!(fam.members.iter().all(|m| m.cover.as_ref().unwrap().verified));
        let single = build_tower(2, 5, 1, DEFAULT_ORDER_CAP).unwrap();
        assert_eq!(single.len(), 1);
        assert!(single.links.is_empty());
        let err = build_tower(3, 3, 2, 10_000).unwrap_err();
        assert!(matches!(err, Error::Resource(ref m) if m.contains("level 2")), "{err}");
        assert!(build_tower(2, 4, 1, DEFAULT_ORDER_CAP).is_err());
    }

    #[test]
    fn prime_families() {
        let fam = build_prime_family(2, &[3, 5, 7], DEFAULT_ORDER_CAP).unwrap();
        let sizes: Vec<usize> = fam.members.iter().map(|m| m.graph.n()).collect();
        assert_eq!(sizes, vec![24, 120, 336]);
        assert!(fam.members.iter().all(|m| m.cover.is_none()));
        assert_eq!(build_prime_family(2, &[3], DEFAULT_ORDER_CAP).unwrap().len(), 1);
        assert!(build_prime_family(2, &[4], DEFAULT_ORDER_CAP).is_err());
    }

    #[test]
    fn singleton_verdict_is_its_gap() {
        let c6 = generate(GraphKind::Cycle(6)).unwrap();
        let fam = GraphFamily::from_graphs(vec![c6], "single");
        let r = analyze_family(&fam, Thresholds::default(), CheegerMode::Auto).unwrap();
        assert!((r.rows[0].gap.unwrap() - 0.5).abs() < 1e-12);
        assert_eq!(r.uniform_gap_verdict, Some(true));
        assert_eq!(r.tau_verdict, None);
        assert_eq!(r.gap_cheeger_coherent, Some(true));
        let strict = Thresholds { eps1: 0.05, eps2: 0.6 };
        let r = analyze_family(&fam, strict, CheegerMode::Auto).unwrap();
        assert_eq!(r.uniform_gap_verdict, Some(false));
    }

    #[test]
    fn rows_do_not_depend_on_order() {
        let gs: Vec<Graph> = [5, 7, 4]
            .iter()
            .map(|&n| generate(GraphKind::Cycle(n)).unwrap())
            .collect();
        let mut rev = gs.clone();
        rev.reverse();
        let a = analyze_family(&GraphFamily::from_graphs(gs, "a"), Thresholds::default(), CheegerMode::Auto).unwrap();
        let b = analyze_family(&GraphFamily::from_graphs(rev, "b"), Thresholds::default(), CheegerMode::Auto).unwrap();
        assert_eq!(a.uniform_gap_verdict, b.uniform_gap_verdict);
        assert_eq!(a.cheeger_verdict, b.cheeger_verdict);
        assert_eq!(
            serde_json::to_string(&a.rows[0]).unwrap(),
            serde_json::to_string(&b.rows[2]).unwrap()
        );
    }

    #[test]
    fn mixed_degrees_suppress_tau() {
        let fam = GraphFamily::from_graphs(
            vec![generate(GraphKind::Cycle(5)).unwrap(), generate(GraphKind::Complete(4)).unwrap()],
            "mixed",
        );
        let r = analyze_family(&fam, Thresholds::default(), CheegerMode::Auto).unwrap();
        assert_eq!(r.tau_verdict, None);
        assert!(r.to_csv().lines().count() == 3);
    }

    #[test]
    fn injection_probes() {
        let c12 = generate(GraphKind::Cycle(12)).unwrap();
        let c6 = generate(GraphKind::Cycle(6)).unwrap();
        let vmap: Vec<usize> = (0..12).map(|v| v % 6).collect();
        let cov = verify_cover(&c12, &c6, &vmap);
        let arc = |len: usize| VertexSet::new(12, 0..len).unwrap();
        let p = probe_set(&cov, &arc(3)).unwrap();
        assert!(p.injective && p.at_most_half);
        assert!((p.h_upper_bound.unwrap() - 2.0 / 3.0).abs() < 1e-12);
        assert!((cheeger_exact(&c6).unwrap().h - 2.0 / 3.0).abs() < 1e-12);
        let p = probe_set(&cov, &arc(7)).unwrap();
        assert!(!p.injective);
        assert_eq!(p.collision, Some((0, 6)));
        assert_eq!(p.h_upper_bound, None);
        let p = probe_set(&cov, &arc(1)).unwrap();
        assert_eq!(p.h_upper_bound, Some(2.0));
        assert_eq!(p.vertex_ratio, 2.0);
    }

    #[test]
    fn family_probe_without_covers_skips() {
        let fam = GraphFamily::from_graphs(vec![generate(GraphKind::Cycle(6)).unwrap()], "c6");
        let r = folner_injection_probe(&fam, 2, &[1]).unwrap();
        assert!(r.notice.is_some() && r.members.is_empty());
    }

    #[test]
    fn spec_round_trip() {
        let s: FamilySpec = serde_json::from_str(r#"{"tower": {"dim": 2, "prime": 3, "depth": 2}}"#).unwrap();
        assert_eq!(s, FamilySpec::Tower { tower: TowerSpec { dim: 2, prime: 3, depth: 2 } });
        let s: FamilySpec = serde_json::from_str(r#"{"paths": ["a.edges"]}"#).unwrap();
        assert!(matches!(s, FamilySpec::Paths { .. }));
    }
}
