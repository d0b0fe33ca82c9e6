//! Vertex replacement of a Cayley graph by copies of `K_{p,q}`, and small-scale
//! automorphism diagnostics.

use std::collections::{BTreeMap, HashSet};
use std::ops::ControlFlow;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Graph, Vertex};
use crate::groups::{orbit_labels, FiniteGroup, GroupAction, GroupElement};

/// Default vertex limit for automorphism backtracking.
pub const DEFAULT_AUT_CAP: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ReplacementPolicy {
    /// `(γ, s_i) ~ (γs_i, s_{p+1})` for `i ≤ p`, `(γ, s_j) ~ (γs_j, s_1)` for `j > p`.
    Literal,
    /// `(γ, s) ~ (γs, s⁻¹)` with classes `P` and `Q = P⁻¹`.
    Matched,
}

impl std::str::FromStr for ReplacementPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "literal" => Ok(ReplacementPolicy::Literal),
            "matched" => Ok(ReplacementPolicy::Matched),
            other => Err(Error::validation(format!("unknown policy '{other}'"))),
        }
    }
}

/// A slot `(γ, i)`: group element index and position `i` in the slot order.
/// Positions `0..p` form class `p`, positions `p..p+q` class `q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Slot {
    pub element: usize,
    pub position: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReplacementResult {
    #[serde(skip)]
    pub graph: Graph,
    pub policy: ReplacementPolicy,
    pub p: usize,
    pub q: usize,
    pub group_order: usize,
    /// Generator index (into the group's generator list) at each slot position.
    pub position_generators: Vec<usize>,
    /// Slots merged into each vertex, sorted.
    pub slot_labels: Vec<Vec<Slot>>,
    pub degree_sequence: Vec<usize>,
    pub regular_flag: bool,
    /// `merge_histogram[k]` = number of vertices formed from exactly `k` slots.
    pub merge_histogram: BTreeMap<usize, usize>,
    /// Copy edges whose endpoints merged into one vertex.
    pub dropped_loops: usize,
    /// Copy edges duplicating an edge already present.
    pub collapsed_parallel: usize,
}

impl ReplacementResult {
    pub fn slot_count(&self) -> usize {
        self.slot_labels.iter().map(Vec::len).sum()
    }

    /// Vertex holding `slot`.
    pub fn vertex_of(&self, slot: Slot) -> Option<Vertex> {
        self.slot_labels.iter().position(|s| s.binary_search(&slot).is_ok())
    }

    /// Vertices containing a slot of the copy `K_{p,q}^{(γ)}`, split by class.
    pub fn copy_vertices(&self, element: usize) -> (Vec<Vertex>, Vec<Vertex>) {
        let mut pc = Vec::new();
        let mut qc = Vec::new();
        for (v, slots) in self.slot_labels.iter().enumerate() {
            for s in slots.iter().filter(|s| s.element == element) {
                let class = if s.position < self.p { &mut pc } else { &mut qc };
                if !class.contains(&v) {
                    class.push(v);
                }
            }
        }
        (pc, qc)
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        // smaller root wins so labels do not depend on merge order
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Slot order for the matched policy: first member of each inverse pair in
/// generator order, then their inverses in the same order.
fn matched_positions<E: GroupElement>(group: &FiniteGroup<E>, p: usize, q: usize) -> Result<Vec<usize>> {
    let gens = group.generators();
    if p != q {
        return Err(Error::validation(format!(
            "matched policy infeasible: Q = P^-1 forces p = q, got p = {p}, q = {q}"
        )));
    }
    let mut first = Vec::new();
    let mut second = Vec::new();
    let mut used = vec![false; gens.len()];
    for k in 0..gens.len() {
        if used[k] {
            continue;
        }
        let inv = group.inv(gens[k]);
        if inv == gens[k] {
            return Err(Error::validation(format!(
                "matched policy infeasible: generator {} is an involution",
                group.element(gens[k]).label()
            )));
        }
        let j = gens
            .iter()
            .position(|&s| s == inv)
            .ok_or_else(|| Error::validation("matched policy infeasible: generating set is not symmetric"))?;
        used[k] = true;
        used[j] = true;
        first.push(k);
        second.push(j);
    }
    first.extend(second);
    Ok(first)
}

/// Replaces every vertex `γ` of `Cay(Γ, S)` by a copy of `K_{p,q}` and merges
/// slots according to `policy`. Loops and parallel edges created by merging
/// are dropped from the graph and counted.
pub fn kpq_replace<E: GroupElement>(
    group: &FiniteGroup<E>,
    p: usize,
    q: usize,
    policy: ReplacementPolicy,
) -> Result<ReplacementResult> {
    let k = group.generator_count();
    if p == 0 || q == 0 || p + q != k {
        return Err(Error::validation(format!(
            "need p, q >= 1 with p + q = |S| = {k}, got p = {p}, q = {q}"
        )));
    }
    let positions: Vec<usize> = match policy {
        ReplacementPolicy::Literal => (0..k).collect(),
        ReplacementPolicy::Matched => matched_positions(group, p, q)?,
    };
    let order = group.order();
    let slot = |g: usize, i: usize| g * k + i;
    let mut uf = UnionFind::new(order * k);
    for g in 0..order {
        for (i, &pos) in positions.iter().enumerate() {
            let h = group.mul_generator(g, pos);
            let partner = match policy {
                ReplacementPolicy::Literal if i < p => p,
                ReplacementPolicy::Literal => 0,
                ReplacementPolicy::Matched if i < p => i + p,
                ReplacementPolicy::Matched => i - p,
            };
            uf.union(slot(g, i), slot(h, partner));
        }
    }

    let mut vertex_of_root = vec![usize::MAX; order * k];
    let mut slot_labels: Vec<Vec<Slot>> = Vec::new();
    let mut vertex = vec![0; order * k];
    for s in 0..order * k {
        let r = uf.find(s);
        if vertex_of_root[r] == usize::MAX {
            vertex_of_root[r] = slot_labels.len();
            slot_labels.push(Vec::new());
        }
        vertex[s] = vertex_of_root[r];
        slot_labels[vertex[s]].push(Slot {
            element: s / k,
            position: s % k,
        });
    }

    let mut dropped_loops = 0;
    let mut collapsed_parallel = 0;
    let mut edges = HashSet::new();
    for g in 0..order {
        for i in 0..p {
            for j in p..k {
                let (a, b) = (vertex[slot(g, i)], vertex[slot(g, j)]);
                if a == b {
                    dropped_loops += 1;
                } else if !edges.insert((a.min(b), a.max(b))) {
                    collapsed_parallel += 1;
                }
            }
        }
    }
    let graph = Graph::new(slot_labels.len(), edges)?;
    let profile = graph.degree_profile();
    let mut merge_histogram = BTreeMap::new();
    for s in &slot_labels {
        *merge_histogram.entry(s.len()).or_insert(0) += 1;
    }
    Ok(ReplacementResult {
        graph,
        policy,
        p,
        q,
        group_order: order,
        position_generators: positions,
        slot_labels,
        degree_sequence: profile.degree_sequence,
        regular_flag: profile.is_regular,
        merge_histogram,
        dropped_loops,
        collapsed_parallel,
    })
}

/// Outcome of letting `Γ` act on the replacement graph by
/// `γ'·(γ, i) = (γ'γ, i)`.
#[derive(Debug, Clone, Serialize)]
pub struct TranslationReport {
    /// Every translation sends merged vertices to merged vertices.
    pub well_defined: bool,
    /// Every translation is a graph automorphism.
    pub by_automorphisms: bool,
    pub free: bool,
    pub orbit_count: Option<usize>,
}

pub fn translation_action<E: GroupElement>(
    group: &FiniteGroup<E>,
    result: &ReplacementResult,
) -> (TranslationReport, Option<GroupAction>) {
    let k = result.p + result.q;
    let mut vertex = vec![0; result.group_order * k];
    for (v, slots) in result.slot_labels.iter().enumerate() {
        for s in slots {
            vertex[s.element * k + s.position] = v;
        }
    }
    let n = result.graph.n();
    let mut perms = Vec::with_capacity(group.order());
    for g in 0..group.order() {
        let mut perm = vec![usize::MAX; n];
        for (v, slots) in result.slot_labels.iter().enumerate() {
            for s in slots {
                let image = vertex[group.mul(g, s.element) * k + s.position];
                if perm[v] != usize::MAX && perm[v] != image {
                    let report = TranslationReport {
                        well_defined: false,
                        by_automorphisms: false,
                        free: false,
                        orbit_count: None,
                    };
                    return (report, None);
                }
                perm[v] = image;
            }
        }
        perms.push(perm);
    }
    let action = GroupAction {
        n,
        labels: group.labels(),
        perms,
    };
    let by_automorphisms = action.validate(&result.graph).is_ok();
    let orbits = action.orbit_map();
    let report = TranslationReport {
        well_defined: true,
        by_automorphisms,
        free: action.is_free(),
        orbit_count: Some(orbits.iter().max().map_or(0, |m| m + 1)),
    };
    (report, by_automorphisms.then_some(action))
}

struct AutSearch<'a> {
    g: &'a Graph,
    order: Vec<Vertex>,
    /// Sorted distance multiset per vertex; unreachable encoded as `u32::MAX`.
    profile: Vec<Vec<u32>>,
    dist: Vec<Vec<u32>>,
    /// Vertices that must map into the same class (setwise stabilizer).
    class: Vec<u8>,
}

impl<'a> AutSearch<'a> {
    fn new(g: &'a Graph, class: Vec<u8>) -> Self {
        let n = g.n();
        let dist: Vec<Vec<u32>> = (0..n)
            .map(|v| g.bfs_from(v).into_iter().map(|d| d.unwrap_or(u32::MAX)).collect())
            .collect();
        let profile = dist
            .iter()
            .map(|row| {
                let mut r = row.clone();
                r.sort_unstable();
                r
            })
            .collect();
        let mut order = Vec::with_capacity(n);
        let mut seen = vec![false; n];
        for s in 0..n {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut i = order.len();
            order.push(s);
            while i < order.len() {
                for &w in g.neighbors(order[i]) {
                    if !std::mem::replace(&mut seen[w], true) {
                        order.push(w);
                    }
                }
                i += 1;
            }
        }
        AutSearch {
            g,
            order,
            profile,
            dist,
            class,
        }
    }

    fn compatible(&self, map: &[Vertex], depth: usize, v: Vertex, w: Vertex) -> bool {
        if self.class[v] != self.class[w] || self.profile[v] != self.profile[w] {
            return false;
        }
        self.order[..depth]
            .iter()
            .all(|&u| self.dist[u][v] == self.dist[map[u]][w])
    }

    fn run<F>(&self, map: &mut Vec<Vertex>, used: &mut Vec<bool>, depth: usize, visit: &mut F) -> ControlFlow<()>
    where
        F: FnMut(&[Vertex]) -> ControlFlow<()>,
    {
        if depth == self.order.len() {
            return visit(map);
        }
        let v = self.order[depth];
        if map[v] != usize::MAX {
            // pre-assigned root
            return self.run(map, used, depth + 1, visit);
        }
        for w in 0..self.g.n() {
            if used[w] || !self.compatible(map, depth, v, w) {
                continue;
            }
            map[v] = w;
            used[w] = true;
            self.run(map, used, depth + 1, visit)?;
            used[w] = false;
            map[v] = usize::MAX;
        }
        ControlFlow::Continue(())
    }

    /// Visits every automorphism, optionally with `pin = (v, w)` forcing `v ↦ w`.
    fn search<F>(&mut self, pin: Option<(Vertex, Vertex)>, mut visit: F)
    where
        F: FnMut(&[Vertex]) -> ControlFlow<()>,
    {
        let n = self.g.n();
        let mut map = vec![usize::MAX; n];
        let mut used = vec![false; n];
        if let Some((v, w)) = pin {
            if self.class[v] != self.class[w] || self.profile[v] != self.profile[w] {
                return;
            }
            // search order starts at the pinned vertex
            let pos = self.order.iter().position(|&x| x == v).expect("vertex in order");
            self.order.remove(pos);
            self.order.insert(0, v);
            map[v] = w;
            used[w] = true;
        }
        let _ = self.run(&mut map, &mut used, 0, &mut visit);
    }
}

fn check_cap(g: &Graph, cap: usize) -> Result<()> {
    if g.n() > cap {
        return Err(Error::resource(format!(
            "automorphism search limited to {cap} vertices, graph has {}",
            g.n()
        )));
    }
    Ok(())
}

/// All automorphisms of `g` as vertex permutations, identity first.
/// Distances are preserved by automorphisms, so matching full distance rows
/// against assigned vertices is both pruning and the adjacency check.
pub fn automorphism_group(g: &Graph, cap: usize) -> Result<Vec<Vec<Vertex>>> {
    check_cap(g, cap)?;
    let mut out = Vec::new();
    AutSearch::new(g, vec![0; g.n()]).search(None, |m| {
        out.push(m.to_vec());
        ControlFlow::Continue(())
    });
    out.sort();
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct TransitivityReport {
    pub vertex_transitive: bool,
    /// Orbits of `Aut(g)`, each sorted, ordered by smallest member.
    pub orbits: Vec<Vec<Vertex>>,
}

/// Orbits of the automorphism group, found by searching for a single
/// automorphism `v ↦ w` per candidate pair rather than listing the group.
pub fn vertex_transitive(g: &Graph, cap: usize) -> Result<TransitivityReport> {
    check_cap(g, cap)?;
    let n = g.n();
    let mut perms: Vec<Vec<Vertex>> = vec![(0..n).collect()];
    let mut label = orbit_labels(n, &perms);
    for v in 0..n {
        if (0..v).any(|u| label[u] == label[v]) {
            continue;
        }
        for w in v + 1..n {
            if label[w] == label[v] {
                continue;
            }
            let mut found = None;
            AutSearch::new(g, vec![0; n]).search(Some((v, w)), |m| {
                found = Some(m.to_vec());
                ControlFlow::Break(())
            });
            if let Some(p) = found {
                perms.push(p);
                label = orbit_labels(n, &perms);
            }
        }
    }
    let count = label.iter().max().map_or(0, |m| m + 1);
    let mut orbits = vec![Vec::new(); count];
    for (v, &l) in label.iter().enumerate() {
        orbits[l].push(v);
    }
    Ok(TransitivityReport {
        vertex_transitive: count <= 1,
        orbits,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ParityEntry {
    pub permutation: Vec<Vertex>,
    pub swaps_classes: bool,
    pub fixes_vertex_in_subgraph: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ParityReport {
    pub stabilizing: Vec<ParityEntry>,
    /// Every automorphism stabilizing the subgraph fixes one of its vertices.
    pub all_fix: bool,
    /// Same, restricted to automorphisms preserving each class.
    pub class_preserving_all_fix: bool,
}

/// For every automorphism mapping `class_p ∪ class_q` onto itself, records
/// whether it fixes a vertex of that set.
pub fn fixed_vertex_parity_check(
    g: &Graph,
    class_p: &[Vertex],
    class_q: &[Vertex],
    cap: usize,
) -> Result<ParityReport> {
    check_cap(g, cap)?;
    let n = g.n();
    let mut class = vec![0u8; n];
    for &v in class_p.iter().chain(class_q) {
        if v >= n {
            return Err(Error::validation(format!("vertex {v} out of range")));
        }
        if class[v] != 0 {
            return Err(Error::validation(format!("vertex {v} listed twice")));
        }
        class[v] = 1;
    }
    if class_p.len().is_multiple_of(2) && class_q.len().is_multiple_of(2) {
        return Err(Error::validation("need at least one class of odd size"));
    }
    let in_p: HashSet<Vertex> = class_p.iter().copied().collect();
    let members: Vec<Vertex> = class_p.iter().chain(class_q).copied().collect();
    let mut stabilizing = Vec::new();
    AutSearch::new(g, class).search(None, |m| {
        let preserves = class_p.iter().all(|v| in_p.contains(&m[*v]));
        stabilizing.push(ParityEntry {
            permutation: m.to_vec(),
            swaps_classes: !preserves,
            fixes_vertex_in_subgraph: members.iter().any(|&v| m[v] == v),
        });
        ControlFlow::Continue(())
    });
    stabilizing.sort_by(|a, b| a.permutation.cmp(&b.permutation));
    let all_fix = stabilizing.iter().all(|e| e.fixes_vertex_in_subgraph);
    let class_preserving_all_fix = stabilizing
        .iter()
        .filter(|e| !e.swaps_classes)
        .all(|e| e.fixes_vertex_in_subgraph);
    Ok(ParityReport {
        stabilizing,
        all_fix,
        class_preserving_all_fix,
    })
}
