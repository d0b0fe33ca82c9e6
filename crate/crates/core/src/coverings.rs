//! Covering maps between finite graphs, their deck groups, and quotients by
//! group actions.

use std::collections::{BTreeMap, VecDeque};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Graph, Vertex};
use crate::groups::{cayley_graph, reduction_hom, GroupAction, GroupElement};

/// First reason a vertex map fails to be a covering map.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CoverViolation {
    MapLength { expected: usize, got: usize },
    OutOfRange { vertex: Vertex, image: Vertex },
    /// `u ∼ v` but `p(u) ≁ p(v)`.
    EdgeNotPreserved { u: Vertex, v: Vertex },
    /// `deg(u) ≠ deg(p(u))`, so `p` cannot restrict to a bijection `N(u) → N(p(u))`.
    NeighborhoodDegreeMismatch {
        vertex: Vertex,
        source_degree: usize,
        target_degree: usize,
    },
    /// Two neighbours of `vertex` share an image.
    NeighborhoodNotInjective { vertex: Vertex, a: Vertex, b: Vertex },
}

impl std::fmt::Display for CoverViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CoverViolation::MapLength { expected, got } => {
                write!(f, "vertex map has {got} entries, source has {expected} vertices")
            }
            CoverViolation::OutOfRange { vertex, image } => {
                write!(f, "vertex {vertex} maps to {image}, outside the target")
            }
            CoverViolation::EdgeNotPreserved { u, v } => {
                write!(f, "edge ({u}, {v}) is not mapped to an edge")
            }
            CoverViolation::NeighborhoodDegreeMismatch {
                vertex,
                source_degree,
                target_degree,
            } => write!(
                f,
                "neighbourhood of {vertex} not bijective: degree {source_degree} vs {target_degree}"
            ),
            CoverViolation::NeighborhoodNotInjective { vertex, a, b } => write!(
                f,
                "neighbourhood of {vertex} not injective: {a} and {b} share an image"
            ),
        }
    }
}

/// A vertex map `p: source → target` together with the outcome of checking
/// the covering axioms.
#[derive(Debug, Clone)]
pub struct CoveringMap {
    pub source: Graph,
    pub target: Graph,
    pub vmap: Vec<Vertex>,
    pub verified: bool,
    pub violation: Option<CoverViolation>,
    /// Source vertices over each target vertex (empty when the map is not total).
    pub fibers: Vec<Vec<Vertex>>,
}

impl CoveringMap {
    /// Common fiber cardinality, if all fibers have the same size.
    pub fn fiber_size(&self) -> Option<usize> {
        let first = self.fibers.first()?.len();
        self.fibers.iter().all(|f| f.len() == first).then_some(first)
    }

    pub fn summary(&self, deck_order: Option<usize>) -> CoverSummary {
        CoverSummary {
            target: GraphSummary::of(&self.target),
            source: GraphSummary::of(&self.source),
            vmap: self.vmap.clone(),
            verified: self.verified,
            violation: self.violation.clone(),
            fiber_size: self.fiber_size(),
            deck_order,
        }
    }
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct GraphSummary {
    pub name: Option<String>,
    pub n: usize,
    pub m: usize,
}

impl GraphSummary {
    pub fn of(g: &Graph) -> Self {
        GraphSummary {
            name: g.name().map(str::to_string),
            n: g.n(),
            m: g.edge_count(),
        }
    }
}

/// Serialized form of a covering map.
#[derive(Debug, Clone, Serialize)]
pub struct CoverSummary {
    pub target: GraphSummary,
    pub source: GraphSummary,
    pub vmap: Vec<Vertex>,
    pub verified: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub violation: Option<CoverViolation>,
    pub fiber_size: Option<usize>,
    pub deck_order: Option<usize>,
}

fn first_violation(source: &Graph, target: &Graph, vmap: &[Vertex]) -> Option<CoverViolation> {
    if vmap.len() != source.n() {
        return Some(CoverViolation::MapLength {
            expected: source.n(),
            got: vmap.len(),
        });
    }
    if let Some((vertex, &image)) = vmap.iter().enumerate().find(|(_, &t)| t >= target.n()) {
        return Some(CoverViolation::OutOfRange { vertex, image });
    }
    let mut seen = vec![usize::MAX; target.n()];
    for u in 0..source.n() {
        let pu = vmap[u];
        if source.degree(u) != target.degree(pu) {
            return Some(CoverViolation::NeighborhoodDegreeMismatch {
                vertex: u,
                source_degree: source.degree(u),
                target_degree: target.degree(pu),
            });
        }
        for &v in source.neighbors(u) {
            if !target.has_edge(pu, vmap[v]) {
                return Some(CoverViolation::EdgeNotPreserved {
                    u: u.min(v),
                    v: u.max(v),
                });
            }
        }
        // equal degrees plus injectivity give surjectivity onto N(p(u))
        for &v in source.neighbors(u) {
            let slot = &mut seen[vmap[v]];
            if *slot != usize::MAX && *slot != u * source.n() + v {
                let a = *slot % source.n();
                return Some(CoverViolation::NeighborhoodNotInjective { vertex: u, a, b: v });
            }
            *slot = u * source.n() + v;
        }
        for &v in source.neighbors(u) {
            seen[vmap[v]] = usize::MAX;
        }
    }
    None
}

/// Checks adjacency preservation and local bijectivity of `vmap`.
/// Violations are reported in the returned map, never as errors.
pub fn verify_cover(source: &Graph, target: &Graph, vmap: &[Vertex]) -> CoveringMap {
    let violation = first_violation(source, target, vmap);
    let total = vmap.len() == source.n() && vmap.iter().all(|&t| t < target.n());
    let mut fibers = vec![Vec::new(); if total { target.n() } else { 0 }];
    if total {
        for (v, &t) in vmap.iter().enumerate() {
            fibers[t].push(v);
        }
    }
    CoveringMap {
        source: source.clone(),
        target: target.clone(),
        vmap: vmap.to_vec(),
        verified: violation.is_none(),
        violation,
        fibers,
    }
}

/// Automorphisms `α` of the covering graph with `p ∘ α = p`, identity first.
#[derive(Debug, Clone)]
pub struct DeckGroup {
    pub automorphisms: Vec<Vec<Vertex>>,
}

impl DeckGroup {
    pub fn order(&self) -> usize {
        self.automorphisms.len()
    }

    pub fn is_free(&self) -> bool {
        self.automorphisms
            .iter()
            .skip(1)
            .all(|a| a.iter().enumerate().all(|(v, &w)| v != w))
    }

    /// Closed under composition and inverses.
    pub fn is_closed(&self) -> bool {
        let set: std::collections::HashSet<&Vec<Vertex>> = self.automorphisms.iter().collect();
        let closed_mul = self.automorphisms.iter().all(|a| {
            self.automorphisms.iter().all(|b| {
                let ab: Vec<Vertex> = b.iter().map(|&v| a[v]).collect();
                set.contains(&ab)
            })
        });
        let closed_inv = self.automorphisms.iter().all(|a| {
            let mut inv = vec![0; a.len()];
            for (v, &w) in a.iter().enumerate() {
                inv[w] = v;
            }
            set.contains(&inv)
        });
        closed_mul && closed_inv
    }

    pub fn as_action(&self, source: &Graph) -> GroupAction {
        GroupAction {
            n: source.n(),
            labels: (0..self.order()).map(|i| format!("deck{i}")).collect(),
            perms: self.automorphisms.clone(),
        }
    }
}

/// Extends `basepoint ↦ image` along the cover; `None` if the extension is
/// inconsistent or not an automorphism.
fn extend_deck(cov: &CoveringMap, basepoint: Vertex, image: Vertex) -> Option<Vec<Vertex>> {
    let g = &cov.source;
    let n = g.n();
    let mut alpha = vec![usize::MAX; n];
    alpha[basepoint] = image;
    let mut queue = VecDeque::from([basepoint]);
    while let Some(u) = queue.pop_front() {
        let au = alpha[u];
        for &v in g.neighbors(u) {
            // unique neighbour of α(u) lying over p(v)
            let target = cov.vmap[v];
            let w = *g.neighbors(au).iter().find(|&&w| cov.vmap[w] == target)?;
            if alpha[v] == usize::MAX {
                alpha[v] = w;
                queue.push_back(v);
            } else if alpha[v] != w {
                return None;
            }
        }
    }
    let mut hit = vec![false; n];
    for &w in &alpha {
        if w == usize::MAX || std::mem::replace(&mut hit[w], true) {
            return None;
        }
    }
    g.edges()
        .iter()
        .all(|&(u, v)| g.has_edge(alpha[u], alpha[v]))
        .then_some(alpha)
}

/// Enumerates the deck group by the basepoint method: a deck transformation
/// of a connected cover is fixed by the image of one vertex, so each vertex
/// in the basepoint's fiber is tried as an image and extended.
pub fn deck_group(cov: &CoveringMap) -> Result<DeckGroup> {
    if !cov.verified {
        return Err(Error::validation("deck group requires a verified covering map"));
    }
    if !cov.source.is_connected() {
        return Err(Error::validation("deck group requires a connected source"));
    }
    let base = 0;
    let fiber = &cov.fibers[cov.vmap[base]];
    let automorphisms = fiber
        .iter()
        .filter_map(|&t| extend_deck(cov, base, t))
        .collect::<Vec<_>>();
    // the identity extends from base ↦ base, which is the smallest fiber member
    debug_assert!(automorphisms[0].iter().enumerate().all(|(v, &w)| v == w));
    Ok(DeckGroup { automorphisms })
}

/// Quotient of a graph by a group action, with fold diagnostics.
#[derive(Debug, Clone)]
pub struct QuotientResult {
    pub graph: Graph,
    /// Orbit index of each vertex.
    pub projection: Vec<Vertex>,
    pub orbit_sizes: Vec<usize>,
    /// The projection checked as a covering map.
    pub cover: CoveringMap,
    /// Edge orbits with both ends in one vertex orbit.
    pub fold_count: usize,
    /// Edge orbits beyond the first between each pair of vertex orbits.
    pub parallel_count: usize,
}

impl QuotientResult {
    pub fn is_cover(&self) -> bool {
        self.cover.verified
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct QuotientSummary {
    pub n: usize,
    pub m: usize,
    pub projection: Vec<Vertex>,
    pub orbit_sizes: Vec<usize>,
    pub is_cover: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub violation: Option<CoverViolation>,
    pub fold_count: usize,
    pub parallel_count: usize,
}

impl QuotientResult {
    pub fn summary(&self) -> QuotientSummary {
        QuotientSummary {
            n: self.graph.n(),
            m: self.graph.edge_count(),
            projection: self.projection.clone(),
            orbit_sizes: self.orbit_sizes.clone(),
            is_cover: self.is_cover(),
            violation: self.cover.violation.clone(),
            fold_count: self.fold_count,
            parallel_count: self.parallel_count,
        }
    }
}

/// Orbit graph `g / action`; orbits are numbered by smallest member.
pub fn quotient_graph(g: &Graph, action: &GroupAction) -> Result<QuotientResult> {
    action.validate(g)?;
    let projection = action.orbit_map();
    let count = projection.iter().max().map_or(0, |m| m + 1);
    let mut orbit_sizes = vec![0; count];
    for &o in &projection {
        orbit_sizes[o] += 1;
    }
    // one representative per edge orbit
    let index: BTreeMap<(usize, usize), usize> =
        g.edges().iter().enumerate().map(|(i, &e)| (e, i)).collect();
    let mut seen = vec![false; g.edge_count()];
    let mut crossings: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let mut fold_count = 0;
    for (i, &(u, v)) in g.edges().iter().enumerate() {
        if seen[i] {
            continue;
        }
        for p in &action.perms {
            let (x, y) = (p[u], p[v]);
            seen[index[&(x.min(y), x.max(y))]] = true;
        }
        let (a, b) = (projection[u], projection[v]);
        if a == b {
            fold_count += 1;
        } else {
            *crossings.entry((a.min(b), a.max(b))).or_default() += 1;
        }
    }
    let parallel_count = crossings.values().map(|c| c - 1).sum();
    let graph = Graph::new(count, crossings.keys().copied())?;
    let cover = verify_cover(g, &graph, &projection);
    Ok(QuotientResult {
        graph,
        projection,
        orbit_sizes,
        cover,
        fold_count,
        parallel_count,
    })
}

/// True when `map` is a bijection `V(a) → V(b)` carrying edges onto edges.
pub fn is_isomorphism(a: &Graph, b: &Graph, map: &[Vertex]) -> bool {
    if a.n() != b.n() || a.edge_count() != b.edge_count() || map.len() != a.n() {
        return false;
    }
    let mut hit = vec![false; b.n()];
    for &w in map {
        if w >= b.n() || std::mem::replace(&mut hit[w], true) {
            return false;
        }
    }
    a.edges().iter().all(|&(u, v)| b.has_edge(map[u], map[v]))
}

/// Checks that the orbit map of the deck action, composed with `p`, is an
/// isomorphism between `source / Cov(p)` and the target.
pub fn deck_quotient_matches_target(cov: &CoveringMap, deck: &DeckGroup) -> Result<bool> {
    let q = quotient_graph(&cov.source, &deck.as_action(&cov.source))?;
    let mut map = vec![usize::MAX; q.graph.n()];
    for (v, &o) in q.projection.iter().enumerate() {
        let t = cov.vmap[v];
        if map[o] != usize::MAX && map[o] != t {
            return Ok(false);
        }
        map[o] = t;
    }
    Ok(is_isomorphism(&q.graph, &cov.target, &map))
}

/// Generators whose reductions collide or become trivial.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Degeneracy {
    /// Pairs `(i, j)`, `i < j`, of source generators with equal images.
    pub colliding_pairs: Vec<(usize, usize)>,
    /// Source generators reducing to the identity.
    pub trivial_images: Vec<usize>,
}

impl Degeneracy {
    pub fn is_empty(&self) -> bool {
        self.colliding_pairs.is_empty() && self.trivial_images.is_empty()
    }
}

#[derive(Debug, Clone)]
pub struct ReductionCover {
    pub dim: usize,
    pub n: u32,
    pub m: u32,
    pub cover: CoveringMap,
    pub kernel: Vec<usize>,
    pub degeneracy: Degeneracy,
}

/// The map `Cay(SL_dim(ℤ/n)) → Cay(SL_dim(ℤ/m))` induced by entrywise
/// reduction. Generator collapse is reported in `degeneracy`; the cover is
/// still built and its verification result is recorded honestly.
pub fn quotient_cover_from_reduction(dim: usize, n: u32, m: u32, cap: usize) -> Result<ReductionCover> {
    let hom = reduction_hom(dim, n, m, cap)?;
    let gens: Vec<_> = hom
        .source
        .generators()
        .iter()
        .map(|&s| hom.source.element(s).reduce(m))
        .collect();
    let mut degeneracy = Degeneracy::default();
    for (i, gi) in gens.iter().enumerate() {
        if *gi == gi.identity_like() {
            degeneracy.trivial_images.push(i);
        }
        for (j, gj) in gens.iter().enumerate().skip(i + 1) {
            if gi == gj {
                degeneracy.colliding_pairs.push((i, j));
            }
        }
    }
    let (source, _) = cayley_graph(&hom.source)?;
    let (target, _) = cayley_graph(&hom.target)?;
    let source = source.with_name(format!("Cay(SL{dim}(Z/{n}))"));
    let target = target.with_name(format!("Cay(SL{dim}(Z/{m}))"));
    let cover = verify_cover(&source, &target, &hom.map);
    Ok(ReductionCover {
        dim,
        n,
        m,
        cover,
        kernel: hom.kernel,
        degeneracy,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate, GraphKind};
    use crate::groups::{sl_group, subgroup_left_translation, DEFAULT_ORDER_CAP};

    fn cycle(n: usize) -> Graph {
        generate(GraphKind::Cycle(n)).unwrap()
    }

    #[test]
    fn verify_examples() {
        let c6 = cycle(6);
        let c3 = cycle(3);
        let vmap: Vec<usize> = (0..6).map(|v| v % 3).collect();
        let cov = verify_cover(&c6, &c3, &vmap);
        assert!(cov.verified);
        assert_eq!(cov.fiber_size(), Some(2));

        let pet = generate(GraphKind::Petersen).unwrap();
        let id: Vec<usize> = (0..10).collect();
        let cov = verify_cover(&pet, &pet, &id);
        assert!(cov.verified);
        assert_eq!(cov.fiber_size(), Some(1));

        let k1 = Graph::new(1, []).unwrap();
        let cov = verify_cover(&cycle(4), &k1, &[0; 4]);
        assert!(!cov.verified);
        assert!(matches!(
            cov.violation,
            Some(CoverViolation::NeighborhoodDegreeMismatch { vertex: 0, .. })
        ));
    }

    #[test]
    fn violations_are_named() {
        let c6 = cycle(6);
        let c3 = cycle(3);
        assert!(matches!(
            verify_cover(&c6, &c3, &[0, 1, 2]).violation,
            Some(CoverViolation::MapLength { .. })
        ));
        assert!(matches!(
            verify_cover(&c6, &c3, &[0, 1, 2, 0, 1, 7]).violation,
            Some(CoverViolation::OutOfRange { vertex: 5, image: 7 })
        ));
        // C6 → C6 folding 0 and 2 together: neighbours of 1 collide
        let folded = [0, 1, 0, 3, 4, 5];
        let cov = verify_cover(&c6, &c6, &folded);
        assert!(!cov.verified);
        // path-like map breaking an edge
        let broken = [0, 1, 2, 4, 4, 5];
        assert!(!verify_cover(&c6, &c6, &broken).verified);
        let k3 = cycle(3);
        let collide = [0, 1, 1, 2, 0, 2];
        let v = verify_cover(&c6, &k3, &collide).violation.unwrap();
        assert!(matches!(v, CoverViolation::EdgeNotPreserved { .. }), "{v}");
    }

    #[test]
    fn deck_groups() {
        let c6 = cycle(6);
        let c3 = cycle(3);
        let vmap: Vec<usize> = (0..6).map(|v| v % 3).collect();
        let deck = deck_group(&verify_cover(&c6, &c3, &vmap)).unwrap();
        assert_eq!(deck.order(), 2);
        assert_eq!(deck.automorphisms[1], vec![3, 4, 5, 0, 1, 2]);
        assert!(deck.is_free() && deck.is_closed());

        let id: Vec<usize> = (0..6).collect();
        assert_eq!(deck_group(&verify_cover(&c6, &c6, &id)).unwrap().order(), 1);

        let bad = verify_cover(&cycle(4), &Graph::new(1, []).unwrap(), &[0; 4]);
        assert!(deck_group(&bad).is_err());
    }

    #[test]
    fn reduction_cover_9_to_3() {
        let rc = quotient_cover_from_reduction(2, 9, 3, DEFAULT_ORDER_CAP).unwrap();
        assert!(rc.degeneracy.is_empty());
        assert!(rc.cover.verified);
        assert_eq!(rc.cover.fiber_size(), Some(27));
        let deck = deck_group(&rc.cover).unwrap();
        assert_eq!(deck.order(), 27);
        assert!(deck.is_free());
        assert!(deck_quotient_matches_target(&rc.cover, &deck).unwrap());
    }

    #[test]
    fn reduction_cover_4_to_2_is_degenerate() {
        let rc = quotient_cover_from_reduction(2, 4, 2, DEFAULT_ORDER_CAP).unwrap();
        assert_eq!(rc.degeneracy.colliding_pairs, vec![(0, 1), (2, 3)]);
        assert!(!rc.cover.verified);
        assert!(quotient_cover_from_reduction(2, 3, 3, DEFAULT_ORDER_CAP).is_err());
    }

    #[test]
    fn quotients() {
        let c6 = cycle(6);
        let rot3: Vec<usize> = (0..6).map(|v| (v + 3) % 6).collect();
        let act = GroupAction::generated_by(&c6, &[rot3]).unwrap();
        let q = quotient_graph(&c6, &act).unwrap();
        assert_eq!((q.graph.n(), q.graph.edge_count()), (3, 3));
        assert!(q.is_cover());
        assert_eq!((q.fold_count, q.parallel_count), (0, 0));

        let c4 = cycle(4);
        let rot2: Vec<usize> = (0..4).map(|v| (v + 2) % 4).collect();
        let act = GroupAction::generated_by(&c4, &[rot2]).unwrap();
        let q = quotient_graph(&c4, &act).unwrap();
        assert_eq!(q.graph.n(), 2);
        assert_eq!(q.parallel_count, 1);
        assert!(!q.is_cover());
        assert_eq!(verify_cover(&c4, &q.graph, &q.projection).verified, q.is_cover());
    }

    #[test]
    fn kernel_quotient_is_target_cayley_graph() {
        let rc = quotient_cover_from_reduction(2, 9, 3, DEFAULT_ORDER_CAP).unwrap();
        let big = sl_group(2, 9, DEFAULT_ORDER_CAP).unwrap();
        let small = sl_group(2, 3, DEFAULT_ORDER_CAP).unwrap();
        let act = subgroup_left_translation(&big, &rc.cover.source, &rc.kernel).unwrap();
        let q = quotient_graph(&rc.cover.source, &act).unwrap();
        assert!(q.is_cover());
        // label map: orbit -> reduction of any member
        let mut map = vec![0; q.graph.n()];
        for (v, &o) in q.projection.iter().enumerate() {
            map[o] = small.index_of(&big.element(v).reduce(3)).unwrap();
        }
        assert!(is_isomorphism(&q.graph, &rc.cover.target, &map));
    }
}
