//! Enumerated finite groups (matrices over ℤ/nℤ, cyclic groups), their
//! Cayley graphs, reduction homomorphisms, and actions on graph vertices.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt::Debug;
use std::hash::Hash;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Graph, Vertex};

/// Default cap on the number of enumerated group elements.
pub const DEFAULT_ORDER_CAP: usize = 2_000_000;

pub trait GroupElement: Clone + Eq + Hash + Debug {
    /// Identity of the group this element lives in.
    fn identity_like(&self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn inverse(&self) -> Option<Self>;
    /// Compact human-readable form, used in exported label maps.
    fn label(&self) -> String;
}

/// Square matrix (dimension 2 or 3) with entries reduced mod `modulus`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct ModMatrix {
    dim: u8,
    modulus: u32,
    entries: [u32; 9],
}

impl ModMatrix {
    pub fn new(dim: usize, modulus: u32, rows: &[i64]) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return Err(Error::Unsupported(format!("matrix dimension {dim}")));
        }
        if modulus < 2 {
            return Err(Error::validation(format!("modulus must be >= 2, got {modulus}")));
        }
        if rows.len() != dim * dim {
            return Err(Error::validation("entry count does not match dimension"));
        }
        let mut entries = [0u32; 9];
        for (slot, &x) in entries.iter_mut().zip(rows) {
            *slot = x.rem_euclid(i64::from(modulus)) as u32;
        }
        Ok(ModMatrix {
            dim: dim as u8,
            modulus,
            entries,
        })
    }

    pub fn identity(dim: usize, modulus: u32) -> Self {
        let mut entries = [0u32; 9];
        for i in 0..dim {
            entries[i * dim + i] = 1 % modulus;
        }
        ModMatrix {
            dim: dim as u8,
            modulus,
            entries,
        }
    }

    /// `I + value·e_{ij}`.
    pub fn transvection(dim: usize, modulus: u32, i: usize, j: usize, value: i64) -> Self {
        let mut m = Self::identity(dim, modulus);
        m.entries[i * dim + j] = value.rem_euclid(i64::from(modulus)) as u32;
        m
    }

    pub fn dim(&self) -> usize {
        self.dim as usize
    }

    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    pub fn entry(&self, i: usize, j: usize) -> u32 {
        self.entries[i * self.dim() + j]
    }

    pub fn entries(&self) -> &[u32] {
        &self.entries[..self.dim() * self.dim()]
    }

    pub fn det(&self) -> u32 {
        let n = u64::from(self.modulus);
        let e = |i: usize, j: usize| u64::from(self.entry(i, j));
        match self.dim() {
            1 => e(0, 0) as u32,
            2 => ((e(0, 0) * e(1, 1) + n * n - (e(0, 1) * e(1, 0)) % (n * n)) % n) as u32,
            _ => {
                let cof = |a: usize, b: usize, c: usize, d: usize| {
                    (e(a, b) * e(c, d) % n + n - e(a, d) * e(c, b) % n) % n
                };
                let t0 = e(0, 0) * cof(1, 1, 2, 2) % n;
                let t1 = e(0, 1) * cof(1, 0, 2, 2) % n;
                let t2 = e(0, 2) * cof(1, 0, 2, 1) % n;
                ((t0 + n - t1 + t2) % n) as u32
            }
        }
    }

    /// Entrywise reduction to a divisor modulus.
    pub fn reduce(&self, m: u32) -> Self {
        let mut out = *self;
        out.modulus = m;
        for x in out.entries.iter_mut().take(self.dim() * self.dim()) {
            *x %= m;
        }
        out
    }

    fn adjugate(&self) -> Self {
        let d = self.dim();
        let n = i64::from(self.modulus);
        let e = |i: usize, j: usize| i64::from(self.entry(i, j));
        let vals: Vec<i64> = match d {
            1 => vec![1],
            2 => vec![e(1, 1), -e(0, 1), -e(1, 0), e(0, 0)],
            _ => {
                let mut v = vec![0i64; 9];
                for i in 0..3 {
                    for j in 0..3 {
                        // adj(i, j) = cofactor(j, i)
                        let rows: Vec<usize> = (0..3).filter(|&r| r != j).collect();
                        let cols: Vec<usize> = (0..3).filter(|&c| c != i).collect();
                        let minor = e(rows[0], cols[0]) * e(rows[1], cols[1])
                            - e(rows[0], cols[1]) * e(rows[1], cols[0]);
                        let sign = if (i + j) % 2 == 0 { 1 } else { -1 };
                        v[i * 3 + j] = sign * minor;
                    }
                }
                v
            }
        };
        let mut entries = [0u32; 9];
        for (slot, x) in entries.iter_mut().zip(vals) {
            *slot = x.rem_euclid(n) as u32;
        }
        ModMatrix {
            dim: self.dim,
            modulus: self.modulus,
            entries,
        }
    }

    fn scale(&self, c: u32) -> Self {
        let mut out = *self;
        let n = u64::from(self.modulus);
        for x in out.entries.iter_mut().take(self.dim() * self.dim()) {
            *x = (u64::from(*x) * u64::from(c) % n) as u32;
        }
        out
    }
}

fn mod_inverse(a: u32, n: u32) -> Option<u32> {
    let (mut r0, mut r1) = (i64::from(n), i64::from(a % n));
    let (mut t0, mut t1) = (0i64, 1i64);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    (r0 == 1).then(|| t0.rem_euclid(i64::from(n)) as u32)
}

impl GroupElement for ModMatrix {
    fn identity_like(&self) -> Self {
        ModMatrix::identity(self.dim(), self.modulus)
    }

    fn mul(&self, other: &Self) -> Self {
        debug_assert_eq!((self.dim, self.modulus), (other.dim, other.modulus));
        let d = self.dim();
        let n = u64::from(self.modulus);
        let mut entries = [0u32; 9];
        for i in 0..d {
            for j in 0..d {
                let mut acc = 0u64;
                for k in 0..d {
                    acc += u64::from(self.entries[i * d + k]) * u64::from(other.entries[k * d + j]);
                }
                entries[i * d + j] = (acc % n) as u32;
            }
        }
        ModMatrix {
            dim: self.dim,
            modulus: self.modulus,
            entries,
        }
    }

    fn inverse(&self) -> Option<Self> {
        let det_inv = mod_inverse(self.det(), self.modulus)?;
        Some(self.adjugate().scale(det_inv))
    }

    fn label(&self) -> String {
        let body: Vec<String> = self.entries().iter().map(u32::to_string).collect();
        format!("[{}]", body.join(","))
    }
}

/// Element of the additive cyclic group ℤ/nℤ.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Residue {
    pub value: u32,
    pub modulus: u32,
}

impl Residue {
    pub fn new(value: i64, modulus: u32) -> Self {
        Residue {
            value: value.rem_euclid(i64::from(modulus)) as u32,
            modulus,
        }
    }
}

impl GroupElement for Residue {
    fn identity_like(&self) -> Self {
        Residue::new(0, self.modulus)
    }

    fn mul(&self, other: &Self) -> Self {
        Residue::new(i64::from(self.value) + i64::from(other.value), self.modulus)
    }

    fn inverse(&self) -> Option<Self> {
        Some(Residue::new(-i64::from(self.value), self.modulus))
    }

    fn label(&self) -> String {
        self.value.to_string()
    }
}

/// Standard symmetric generators of SL_dim(ℤ/n), before removing
/// collisions that appear for small moduli.
pub fn sl_generators_raw(dim: usize, modulus: u32) -> Result<Vec<ModMatrix>> {
    if modulus < 2 {
        return Err(Error::validation(format!("modulus must be >= 2, got {modulus}")));
    }
    let pairs: &[(usize, usize)] = match dim {
        2 => &[(0, 1), (1, 0)],
        3 => &[(0, 1), (1, 2), (2, 0)],
        _ => return Err(Error::Unsupported(format!("SL generators for dimension {dim}"))),
    };
    Ok(pairs
        .iter()
        .flat_map(|&(i, j)| {
            [
                ModMatrix::transvection(dim, modulus, i, j, 1),
                ModMatrix::transvection(dim, modulus, i, j, -1),
            ]
        })
        .collect())
}

/// Symmetric generating set of SL_dim(ℤ/n) made of elementary transvections.
///
/// Dimension 2 gives `[A, A⁻¹, B, B⁻¹]` with `A` upper and `B` lower
/// unitriangular; dimension 3 gives `e₁₂(±1), e₂₃(±1), e₃₁(±1)`.
/// Duplicates (e.g. `A = A⁻¹` mod 2) are removed, keeping first occurrences.
pub fn sl_generators(dim: usize, modulus: u32) -> Result<Vec<ModMatrix>> {
    Ok(dedup_generators(&sl_generators_raw(dim, modulus)?).0)
}

/// Removes repeated generators and the identity, keeping order. Returns
/// the cleaned list and human-readable warnings for everything dropped.
pub fn dedup_generators<E: GroupElement>(gens: &[E]) -> (Vec<E>, Vec<String>) {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    let mut warnings = Vec::new();
    for (i, g) in gens.iter().enumerate() {
        if *g == g.identity_like() {
            warnings.push(format!("generator {i} ({}) is the identity; dropped", g.label()));
        } else if !seen.insert(g.clone()) {
            let first = gens.iter().position(|x| x == g).unwrap();
            warnings.push(format!(
                "generator {i} ({}) duplicates generator {first}; dropped",
                g.label()
            ));
        } else {
            out.push(g.clone());
        }
    }
    (out, warnings)
}

/// A finite group enumerated by breadth-first closure from its generators.
///
/// Element order is BFS discovery order from the identity with generator-index
/// tie-breaking, so index 0 is always the identity.
#[derive(Debug, Clone)]
pub struct FiniteGroup<E> {
    elements: Vec<E>,
    index: HashMap<E, usize>,
    generators: Vec<usize>,
    /// `right_mul[g * |S| + s]` = index of `g·s`.
    right_mul: Vec<usize>,
    inverse: Vec<usize>,
    warnings: Vec<String>,
    assumed_kazhdan: bool,
}

impl<E: GroupElement> FiniteGroup<E> {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[E] {
        &self.elements
    }

    pub fn element(&self, i: usize) -> &E {
        &self.elements[i]
    }

    pub fn index_of(&self, e: &E) -> Option<usize> {
        self.index.get(e).copied()
    }

    /// Generator indices `s₁ … s_|S|` in order.
    pub fn generators(&self) -> &[usize] {
        &self.generators
    }

    pub fn generator_count(&self) -> usize {
        self.generators.len()
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    /// User-supplied metadata: property (T) is never computed, only carried.
    pub fn assumed_kazhdan(&self) -> bool {
        self.assumed_kazhdan
    }

    pub fn with_assumed_kazhdan(mut self, flag: bool) -> Self {
        self.assumed_kazhdan = flag;
        self
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.index[&self.elements[a].mul(&self.elements[b])]
    }

    /// `g · s_k` via the precomputed table.
    pub fn mul_generator(&self, g: usize, k: usize) -> usize {
        self.right_mul[g * self.generators.len() + k]
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inverse[a]
    }

    pub fn is_symmetric(&self) -> bool {
        let set: HashSet<usize> = self.generators.iter().copied().collect();
        self.generators.iter().all(|&s| set.contains(&self.inverse[s]))
    }

    pub fn labels(&self) -> Vec<String> {
        self.elements.iter().map(GroupElement::label).collect()
    }

    /// Closure check: products and inverses resolve to indices. Exhaustive up
    /// to 10⁴ elements, otherwise `samples` seeded random pairs.
    pub fn check_closure(&self, samples: usize, seed: u64) -> bool {
        let n = self.order();
        let check = |a: usize, b: usize| {
            self.index.contains_key(&self.elements[a].mul(&self.elements[b]))
                && self.mul(self.inverse[a], a) == 0
        };
        if n <= 10_000 {
            return (0..n).all(|a| (0..n).all(|b| check(a, b)));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..samples).all(|_| check(rng.random_range(0..n), rng.random_range(0..n)))
    }
}

/// Enumerates the group generated by `gens` (after deduplication), failing
/// with a resource error once more than `cap` elements are discovered.
pub fn enumerate_group<E: GroupElement>(gens: &[E], cap: usize) -> Result<FiniteGroup<E>> {
    let first = gens
        .first()
        .ok_or_else(|| Error::validation("need at least one generator to fix the group"))?;
    let identity = first.identity_like();
    let (gens, warnings) = dedup_generators(gens);
    for g in &gens {
        if g.inverse().is_none() {
            return Err(Error::validation(format!("generator {} is not invertible", g.label())));
        }
    }
    let k = gens.len();
    let mut elements = vec![identity.clone()];
    let mut index = HashMap::from([(identity, 0usize)]);
    let mut right_mul = Vec::new();
    let mut queue = VecDeque::from([0usize]);
    while let Some(g) = queue.pop_front() {
        for s in &gens {
            let h = elements[g].mul(s);
            let idx = match index.get(&h) {
                Some(&i) => i,
                None => {
                    if elements.len() >= cap {
                        return Err(Error::resource(format!(
                            "group order exceeds cap of {cap} elements"
                        )));
                    }
                    let i = elements.len();
                    elements.push(h.clone());
                    index.insert(h, i);
                    queue.push_back(i);
                    i
                }
            };
            right_mul.push(idx);
        }
    }
    debug_assert_eq!(right_mul.len(), elements.len() * k);
    let inverse = elements
        .iter()
        .map(|e| {
            let inv = e.inverse().expect("products of invertible generators are invertible");
            index[&inv]
        })
        .collect();
    let generators = gens.iter().map(|g| index[g]).collect();
    Ok(FiniteGroup {
        elements,
        index,
        generators,
        right_mul,
        inverse,
        warnings,
        assumed_kazhdan: false,
    })
}

/// SL_dim(ℤ/n) with its standard generators.
pub fn sl_group(dim: usize, modulus: u32, cap: usize) -> Result<FiniteGroup<ModMatrix>> {
    enumerate_group(&sl_generators_raw(dim, modulus)?, cap)
}

/// ℤ/n with generators given as residues (default `{+1, −1}`).
pub fn cyclic_group(n: u32, gens: Option<&[i64]>) -> Result<FiniteGroup<Residue>> {
    if n < 1 {
        return Err(Error::validation("cyclic group needs n >= 1"));
    }
    let default = [1i64, -1];
    let gens: Vec<Residue> = gens
        .unwrap_or(&default)
        .iter()
        .map(|&g| Residue::new(g, n))
        .collect();
    enumerate_group(&gens, DEFAULT_ORDER_CAP)
}

/// Cayley graph with edges `{γ, γs}`; vertex `i` is element `i`.
pub fn cayley_graph<E: GroupElement>(group: &FiniteGroup<E>) -> Result<(Graph, Vec<String>)> {
    if !group.is_symmetric() {
        return Err(Error::validation("generating set is not symmetric"));
    }
    let k = group.generator_count();
    let edges = (0..group.order()).flat_map(|g| (0..k).map(move |s| (g, s)));
    let graph = Graph::new(
        group.order(),
        edges.map(|(g, s)| (g, group.mul_generator(g, s))),
    )?;
    Ok((graph, group.labels()))
}

/// Entrywise reduction SL_dim(ℤ/n) → SL_dim(ℤ/m).
#[derive(Debug, Clone)]
pub struct ReductionHom {
    pub source: FiniteGroup<ModMatrix>,
    pub target: FiniteGroup<ModMatrix>,
    /// Target index of each source element.
    pub map: Vec<usize>,
    /// Source indices reducing to the identity.
    pub kernel: Vec<usize>,
}

pub fn reduction_hom(dim: usize, n: u32, m: u32, cap: usize) -> Result<ReductionHom> {
    if m < 2 || m >= n || !n.is_multiple_of(m) {
        return Err(Error::validation(format!(
            "reduction needs 2 <= m < n with m | n (got n={n}, m={m})"
        )));
    }
    let source = sl_group(dim, n, cap)?;
    let target = sl_group(dim, m, cap)?;
    let map = source
        .elements()
        .iter()
        .map(|e| {
            target
                .index_of(&e.reduce(m))
                .ok_or_else(|| Error::validation("reduced element missing from target"))
        })
        .collect::<Result<Vec<_>>>()?;
    let kernel: Vec<usize> = (0..source.order()).filter(|&i| map[i] == 0).collect();
    let mut hit = vec![false; target.order()];
    for &t in &map {
        hit[t] = true;
    }
    if !hit.iter().all(|&h| h) {
        return Err(Error::validation("reduction is not surjective"));
    }
    Ok(ReductionHom {
        source,
        target,
        map,
        kernel,
    })
}

impl ReductionHom {
    /// Checks `φ(ab) = φ(a)φ(b)`, exhaustively when `|source| ≤ 10⁴`,
    /// otherwise on `samples` seeded pairs.
    pub fn respects_multiplication(&self, samples: usize, seed: u64) -> bool {
        let n = self.source.order();
        let check =
            |a: usize, b: usize| self.map[self.source.mul(a, b)] == self.target.mul(self.map[a], self.map[b]);
        if n <= 10_000 {
            (0..n).all(|a| (0..n).all(|b| check(a, b)))
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..samples).all(|_| check(rng.random_range(0..n), rng.random_range(0..n)))
        }
    }
}

/// A group acting on the vertices of a graph by automorphisms.
///
/// `perms[i][v]` is the image of `v` under element `i`; element 0 acts as
/// the identity. Composition follows `perm(gh) = perm(g) ∘ perm(h)`.
#[derive(Debug, Clone, Serialize)]
pub struct GroupAction {
    pub n: usize,
    pub labels: Vec<String>,
    pub perms: Vec<Vec<Vertex>>,
}

impl GroupAction {
    pub fn order(&self) -> usize {
        self.perms.len()
    }

    pub fn trivial(n: usize) -> Self {
        GroupAction {
            n,
            labels: vec!["e".into()],
            perms: vec![(0..n).collect()],
        }
    }

    /// Closes a set of vertex permutations under composition.
    pub fn generated_by(graph: &Graph, gens: &[Vec<Vertex>]) -> Result<Self> {
        let n = graph.n();
        for p in gens {
            check_permutation(p, n)?;
        }
        let identity: Vec<Vertex> = (0..n).collect();
        let mut seen = HashSet::from([identity.clone()]);
        let mut perms = vec![identity];
        let mut i = 0;
        while i < perms.len() {
            for g in gens {
                let next: Vec<Vertex> = perms[i].iter().map(|&v| g[v]).collect();
                if seen.insert(next.clone()) {
                    if perms.len() >= DEFAULT_ORDER_CAP {
                        return Err(Error::resource("permutation group too large"));
                    }
                    perms.push(next);
                }
            }
            i += 1;
        }
        let labels = (0..perms.len()).map(|i| format!("g{i}")).collect();
        let action = GroupAction { n, labels, perms };
        action.validate(graph)?;
        Ok(action)
    }

    /// Every permutation is a bijection and a graph automorphism.
    pub fn validate(&self, graph: &Graph) -> Result<()> {
        if graph.n() != self.n {
            return Err(Error::validation("action and graph vertex counts differ"));
        }
        for (i, p) in self.perms.iter().enumerate() {
            check_permutation(p, self.n)?;
            if let Some(&(u, v)) = graph.edges().iter().find(|&&(u, v)| !graph.has_edge(p[u], p[v])) {
                return Err(Error::validation(format!(
                    "element {} maps edge ({u}, {v}) to a non-edge",
                    self.labels[i]
                )));
            }
        }
        Ok(())
    }

    /// True when no non-identity permutation fixes a vertex.
    pub fn is_free(&self) -> bool {
        self.perms
            .iter()
            .filter(|p| p.iter().enumerate().any(|(v, &w)| v != w))
            .all(|p| p.iter().enumerate().all(|(v, &w)| v != w))
    }

    pub fn orbit_map(&self) -> Vec<usize> {
        orbit_labels(self.n, &self.perms)
    }
}

fn check_permutation(p: &[Vertex], n: usize) -> Result<()> {
    if p.len() != n {
        return Err(Error::validation("permutation length mismatch"));
    }
    let mut seen = vec![false; n];
    for &v in p {
        if v >= n || std::mem::replace(&mut seen[v], true) {
            return Err(Error::validation("map is not a permutation"));
        }
    }
    Ok(())
}

/// Orbit label per vertex, orbits numbered by their smallest vertex.
pub(crate) fn orbit_labels(n: usize, perms: &[Vec<Vertex>]) -> Vec<usize> {
    let mut label = vec![usize::MAX; n];
    let mut next = 0;
    for v in 0..n {
        if label[v] != usize::MAX {
            continue;
        }
        label[v] = next;
        let mut stack = vec![v];
        while let Some(u) = stack.pop() {
            for p in perms {
                let w = p[u];
                if label[w] == usize::MAX {
                    label[w] = next;
                    stack.push(w);
                }
            }
        }
        next += 1;
    }
    label
}

fn check_matches_cayley<E: GroupElement>(group: &FiniteGroup<E>, cayley: &Graph) -> Result<()> {
    let (expected, _) = cayley_graph(group)?;
    if expected != *cayley {
        return Err(Error::validation("graph is not the Cayley graph of this group"));
    }
    Ok(())
}

/// The group acting on its own Cayley graph by `γ' · γ`.
pub fn left_translation_action<E: GroupElement>(
    group: &FiniteGroup<E>,
    cayley: &Graph,
) -> Result<GroupAction> {
    let all: Vec<usize> = (0..group.order()).collect();
    subgroup_left_translation(group, cayley, &all)
}

/// Left translations by the given elements (expected to form a subgroup,
/// identity first).
pub fn subgroup_left_translation<E: GroupElement>(
    group: &FiniteGroup<E>,
    cayley: &Graph,
    subgroup: &[usize],
) -> Result<GroupAction> {
    check_matches_cayley(group, cayley)?;
    if subgroup.first() != Some(&0) {
        return Err(Error::validation("subgroup list must start with the identity"));
    }
    let perms = subgroup
        .iter()
        .map(|&h| (0..group.order()).map(|x| group.mul(h, x)).collect())
        .collect();
    let labels = subgroup.iter().map(|&h| group.element(h).label()).collect();
    Ok(GroupAction {
        n: group.order(),
        labels,
        perms,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OrbitData {
    /// Smallest vertex of each orbit, ascending.
    pub representatives: Vec<Vertex>,
    pub orbit_of: Vec<usize>,
    pub orbit_sizes: Vec<usize>,
    pub stabilizer_sizes: Vec<usize>,
}

/// Orbit representatives and stabilizer sizes, checking the orbit-stabilizer
/// relation `|orbit|·|stabilizer| = |Γ|` for every vertex.
pub fn orbits_and_stabilizers(action: &GroupAction) -> Result<OrbitData> {
    let orbit_of = action.orbit_map();
    let count = orbit_of.iter().max().map_or(0, |m| m + 1);
    let mut orbit_sizes = vec![0; count];
    let mut representatives = vec![usize::MAX; count];
    for (v, &o) in orbit_of.iter().enumerate() {
        orbit_sizes[o] += 1;
        representatives[o] = representatives[o].min(v);
    }
    let stabilizer_sizes: Vec<usize> = (0..action.n)
        .map(|v| action.perms.iter().filter(|p| p[v] == v).count())
        .collect();
    for v in 0..action.n {
        if orbit_sizes[orbit_of[v]] * stabilizer_sizes[v] != action.order() {
            return Err(Error::validation(format!(
                "orbit-stabilizer relation fails at vertex {v}; the permutations do not form a group action"
            )));
        }
    }
    Ok(OrbitData {
        representatives,
        orbit_of,
        orbit_sizes,
        stabilizer_sizes,
    })
}

/// Parsed form of `sl:<dim>:<modulus>` or `cyclic:<n>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroupSpec {
    Sl { dim: usize, modulus: u32 },
    Cyclic { n: u32 },
}

impl std::str::FromStr for GroupSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let num = |t: &str| {
            t.parse::<u32>()
                .map_err(|_| Error::validation(format!("bad number {t:?} in group spec {s:?}")))
        };
        match parts.as_slice() {
            ["sl", d, m] => Ok(GroupSpec::Sl {
                dim: num(d)? as usize,
                modulus: num(m)?,
            }),
            ["cyclic", n] => Ok(GroupSpec::Cyclic { n: num(n)? }),
            _ => Err(Error::validation(format!(
                "group spec must be sl:<dim>:<modulus> or cyclic:<n>, got {s:?}"
            ))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate, GraphKind};

    #[test]
    fn kazhdan_flag_is_carried_not_computed() {
        let g = sl_group(2, 3, DEFAULT_ORDER_CAP).unwrap();
        assert!(!g.assumed_kazhdan());
        assert!(g.with_assumed_kazhdan(true).assumed_kazhdan());
    }

    #[test]
    fn sl2_generators() {
        let g = sl_generators(2, 3).unwrap();
        assert_eq!(g.len(), 4);
        assert!(g.iter().all(|m| m.det() == 1));
        assert_eq!(sl_generators(2, 2).unwrap().len(), 2);
        let g3 = sl_generators(3, 2).unwrap();
        assert_eq!(g3.len(), 3);
        for m in &g3 {
            assert_eq!(m.mul(m), m.identity_like());
            assert_eq!(m.det(), 1);
        }
        assert!(matches!(sl_generators(4, 3), Err(Error::Unsupported(_))));
    }

    #[test]
    fn matrix_inverse_and_det() {
        let m = ModMatrix::new(3, 7, &[2, 1, 0, 1, 1, 0, 3, 4, 1]).unwrap();
        assert_eq!(m.det(), 1);
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv), m.identity_like());
        let singular = ModMatrix::new(2, 6, &[2, 0, 0, 1]).unwrap();
        assert!(singular.inverse().is_none());
        let gl = ModMatrix::new(2, 5, &[2, 0, 0, 1]).unwrap();
        assert_eq!(gl.mul(&gl.inverse().unwrap()), gl.identity_like());
    }

    #[test]
    fn group_orders() {
        assert_eq!(sl_group(2, 3, DEFAULT_ORDER_CAP).unwrap().order(), 24);
        assert_eq!(sl_group(2, 9, DEFAULT_ORDER_CAP).unwrap().order(), 648);
        assert_eq!(sl_group(3, 2, DEFAULT_ORDER_CAP).unwrap().order(), 168);
        assert_eq!(sl_group(2, 4, DEFAULT_ORDER_CAP).unwrap().order(), 48);
        assert_eq!(sl_group(2, 2, DEFAULT_ORDER_CAP).unwrap().order(), 6);
        let err = sl_group(2, 9, 100).unwrap_err();
        assert!(matches!(err, Error::Resource(_)));
    }

    #[test]
    fn prime_power_order_formula() {
        for p in [2u32, 3] {
            let base = sl_group(2, p, DEFAULT_ORDER_CAP).unwrap().order();
            let sq = sl_group(2, p * p, DEFAULT_ORDER_CAP).unwrap().order();
            assert_eq!(sq, (p as usize).pow(3) * base);
        }
    }

    #[test]
    fn mod2_collapse_is_warned() {
        let g = sl_group(2, 2, DEFAULT_ORDER_CAP).unwrap();
        assert_eq!(g.generator_count(), 2);
        assert_eq!(g.warnings().len(), 2);
    }

    #[test]
    fn closure_and_identity() {
        let g = sl_group(2, 5, DEFAULT_ORDER_CAP).unwrap();
        assert_eq!(g.element(0), &ModMatrix::identity(2, 5));
        assert!(g.check_closure(1000, 0));
        assert!(g.is_symmetric());
    }

    #[test]
    fn cayley_examples() {
        let z6 = cyclic_group(6, None).unwrap();
        let (c, _) = cayley_graph(&z6).unwrap();
        assert_eq!(c.degree_profile().k, Some(2));
        assert_eq!(c.edge_count(), 6);
        assert!(c.is_connected());
        let sl = sl_group(2, 3, DEFAULT_ORDER_CAP).unwrap();
        let (g, labels) = cayley_graph(&sl).unwrap();
        assert_eq!((g.n(), g.regular_degree(), g.is_connected()), (24, Some(4), true));
        assert_eq!(labels[0], "[1,0,0,1]");
        let z2 = cyclic_group(2, Some(&[1])).unwrap();
        let (k2, _) = cayley_graph(&z2).unwrap();
        assert_eq!((k2.n(), k2.edge_count()), (2, 1));
        let z5 = cyclic_group(5, Some(&[1])).unwrap();
        assert!(cayley_graph(&z5).is_err());
    }

    #[test]
    fn reductions() {
        let r = reduction_hom(2, 9, 3, DEFAULT_ORDER_CAP).unwrap();
        assert_eq!(r.kernel.len(), 27);
        assert!(r.respects_multiplication(0, 0));
        let r = reduction_hom(2, 4, 2, DEFAULT_ORDER_CAP).unwrap();
        assert_eq!(r.kernel.len(), 8);
        assert!(r.respects_multiplication(0, 0));
        assert!(reduction_hom(2, 3, 3, DEFAULT_ORDER_CAP).is_err());
        assert!(reduction_hom(2, 9, 2, DEFAULT_ORDER_CAP).is_err());
    }

    #[test]
    fn left_translations() {
        let z6 = cyclic_group(6, None).unwrap();
        let (c6, _) = cayley_graph(&z6).unwrap();
        let act = left_translation_action(&z6, &c6).unwrap();
        act.validate(&c6).unwrap();
        assert_eq!(act.order(), 6);
        assert!(act.is_free());
        // each element is a rotation of C6 in BFS labelling
        for p in &act.perms {
            assert!(c6.edges().iter().all(|&(u, v)| c6.has_edge(p[u], p[v])));
        }
        let orb = orbits_and_stabilizers(&act).unwrap();
        assert_eq!(orb.representatives, vec![0]);
        assert_eq!(orb.stabilizer_sizes, vec![1; 6]);

        let sl = sl_group(2, 3, DEFAULT_ORDER_CAP).unwrap();
        let (g, _) = cayley_graph(&sl).unwrap();
        let act = left_translation_action(&sl, &g).unwrap();
        act.validate(&g).unwrap();
        assert!(act.is_free());
        assert_eq!(orbits_and_stabilizers(&act).unwrap().representatives.len(), 1);
        // homomorphism: perm(gh) = perm(g)∘perm(h)
        for a in 0..sl.order() {
            for b in 0..sl.order() {
                let ab = sl.mul(a, b);
                assert!((0..sl.order()).all(|v| act.perms[ab][v] == act.perms[a][act.perms[b][v]]));
            }
        }
        assert!(left_translation_action(&sl, &c6).is_err());
    }

    #[test]
    fn kernel_subgroup_action() {
        let r = reduction_hom(2, 9, 3, DEFAULT_ORDER_CAP).unwrap();
        let (g, _) = cayley_graph(&r.source).unwrap();
        let act = subgroup_left_translation(&r.source, &g, &r.kernel).unwrap();
        act.validate(&g).unwrap();
        assert!(act.is_free());
        let orb = orbits_and_stabilizers(&act).unwrap();
        assert_eq!(orb.representatives.len(), 24);
        assert!(orb.stabilizer_sizes.iter().all(|&s| s == 1));
    }

    #[test]
    fn trivial_and_generated_actions() {
        let c6 = generate(GraphKind::Cycle(6)).unwrap();
        let orb = orbits_and_stabilizers(&GroupAction::trivial(6)).unwrap();
        assert_eq!(orb.representatives, (0..6).collect::<Vec<_>>());
        let rot3: Vec<usize> = (0..6).map(|v| (v + 3) % 6).collect();
        let act = GroupAction::generated_by(&c6, &[rot3]).unwrap();
        assert_eq!(act.order(), 2);
        let bad: Vec<usize> = vec![1, 0, 2, 3, 4, 5];
        assert!(GroupAction::generated_by(&c6, &[bad]).is_err());
    }

    #[test]
    fn group_spec_parsing() {
        assert_eq!("sl:2:9".parse::<GroupSpec>().unwrap(), GroupSpec::Sl { dim: 2, modulus: 9 });
        assert_eq!("cyclic:6".parse::<GroupSpec>().unwrap(), GroupSpec::Cyclic { n: 6 });
        assert!("sl:2".parse::<GroupSpec>().is_err());
    }
}
