//! Finite simple undirected graphs on dense integer vertices.
//!
//! Vertices are `0..n`. Edges are stored once as `(u, v)` with `u < v`,
//! sorted, and mirrored into sorted adjacency lists. Graphs are immutable
//! once built; the all-pairs distance matrix is computed lazily and cached.

use std::collections::VecDeque;
use std::fmt::Write as _;
use std::sync::OnceLock;

use serde::Serialize;

use crate::error::{Error, Result};

pub type Vertex = usize;

#[derive(Debug, Clone)]
pub struct Graph {
    n: usize,
    edges: Vec<(Vertex, Vertex)>,
    adj: Vec<Vec<Vertex>>,
    name: Option<String>,
    metric: OnceLock<DistanceMatrix>,
}

impl PartialEq for Graph {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.edges == other.edges
    }
}

impl Eq for Graph {}

/// Sorted set of distinct vertices of some graph.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Default)]
#[serde(transparent)]
pub struct VertexSet(Vec<Vertex>);

impl VertexSet {
    /// Builds a set over `0..n`, rejecting out-of-range indices. Duplicates are merged.
    pub fn new(n: usize, vertices: impl IntoIterator<Item = Vertex>) -> Result<Self> {
        let mut v: Vec<Vertex> = vertices.into_iter().collect();
        if let Some(&bad) = v.iter().find(|&&x| x >= n) {
            return Err(Error::validation(format!("vertex {bad} out of range 0..{n}")));
        }
        v.sort_unstable();
        v.dedup();
        Ok(VertexSet(v))
    }

    pub fn empty() -> Self {
        VertexSet(Vec::new())
    }

    pub fn full(n: usize) -> Self {
        VertexSet((0..n).collect())
    }

    pub(crate) fn from_sorted_unchecked(v: Vec<Vertex>) -> Self {
        debug_assert!(v.windows(2).all(|w| w[0] < w[1]));
        VertexSet(v)
    }

    pub(crate) fn from_mask(mask: u64, n: usize) -> Self {
        VertexSet((0..n).filter(|&i| mask >> i & 1 == 1).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    pub fn as_slice(&self) -> &[Vertex] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = Vertex> + '_ {
        self.0.iter().copied()
    }

    /// Complement within `0..n`.
    pub fn complement(&self, n: usize) -> VertexSet {
        let mut inside = vec![false; n];
        for &v in &self.0 {
            inside[v] = true;
        }
        VertexSet((0..n).filter(|&v| !inside[v]).collect())
    }

    pub(crate) fn membership(&self, n: usize) -> Vec<bool> {
        let mut inside = vec![false; n];
        for &v in &self.0 {
            inside[v] = true;
        }
        inside
    }
}

/// Shortest-path lengths; `None` marks vertices in different components.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceMatrix {
    n: usize,
    data: Vec<Option<u32>>,
}

impl DistanceMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, u: Vertex, v: Vertex) -> Option<u32> {
        self.data[u * self.n + v]
    }

    /// Largest finite distance, or `None` if some pair is disconnected.
    pub fn diameter(&self) -> Option<u32> {
        let mut best = 0;
        for d in &self.data {
            best = best.max((*d)?);
        }
        Some(best)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(Option::is_some)
    }
}

impl Graph {
    /// Builds a simple graph, normalizing each pair to `u < v` and removing duplicates.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (Vertex, Vertex)>) -> Result<Self> {
        let mut list = Vec::new();
        for (a, b) in edges {
            if a >= n || b >= n {
                return Err(Error::validation(format!(
                    "edge ({a}, {b}) out of range for {n} vertices"
                )));
            }
            if a == b {
                return Err(Error::validation(format!("loop at vertex {a}")));
            }
            list.push((a.min(b), a.max(b)));
        }
        list.sort_unstable();
        list.dedup();
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in &list {
            adj[u].push(v);
            adj[v].push(u);
        }
        for nbrs in &mut adj {
            nbrs.sort_unstable();
        }
        Ok(Graph {
            n,
            edges: list,
            adj,
            name: None,
            metric: OnceLock::new(),
        })
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(Vertex, Vertex)] {
        &self.edges
    }

    pub fn neighbors(&self, v: Vertex) -> &[Vertex] {
        &self.adj[v]
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.adj[v].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        u < self.n && v < self.n && self.adj[u].binary_search(&v).is_ok()
    }

    pub fn degree_profile(&self) -> DegreeProfile {
        let mut seq: Vec<usize> = self.adj.iter().map(Vec::len).collect();
        seq.sort_unstable();
        let regular = seq.windows(2).all(|w| w[0] == w[1]);
        DegreeProfile {
            is_regular: regular,
            k: if regular { seq.first().copied() } else { None },
            degree_sequence: seq,
        }
    }

    /// Degree when the graph is regular (the empty graph has none).
    pub fn regular_degree(&self) -> Option<usize> {
        if self.n == 0 {
            return None;
        }
        self.degree_profile().k
    }

    /// Vertices outside `a` adjacent to at least one vertex of `a`.
    pub fn boundary(&self, a: &VertexSet) -> VertexSet {
        let inside = a.membership(self.n);
        let mut hit = vec![false; self.n];
        for u in a.iter() {
            for &v in &self.adj[u] {
                if !inside[v] {
                    hit[v] = true;
                }
            }
        }
        VertexSet((0..self.n).filter(|&v| hit[v]).collect())
    }

    /// Number of edges with one endpoint in `a` and the other in `b`.
    pub fn edge_cut(&self, a: &VertexSet, b: &VertexSet) -> Result<usize> {
        let in_a = a.membership(self.n);
        let in_b = b.membership(self.n);
        if let Some(v) = (0..self.n).find(|&v| in_a[v] && in_b[v]) {
            return Err(Error::validation(format!(
                "edge_cut: sets overlap at vertex {v}"
            )));
        }
        Ok(self
            .edges
            .iter()
            .filter(|&&(u, v)| (in_a[u] && in_b[v]) || (in_a[v] && in_b[u]))
            .count())
    }

    /// Single-source BFS distances.
    pub fn bfs_from(&self, source: Vertex) -> Vec<Option<u32>> {
        let mut dist = vec![None; self.n];
        let mut queue = VecDeque::new();
        dist[source] = Some(0);
        queue.push_back(source);
        while let Some(u) = queue.pop_front() {
            let du = dist[u].unwrap();
            for &v in &self.adj[u] {
                if dist[v].is_none() {
                    dist[v] = Some(du + 1);
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    /// All-pairs edge-path metric, computed once and cached.
    pub fn bfs_metric(&self) -> &DistanceMatrix {
        self.metric.get_or_init(|| {
            let mut data = Vec::with_capacity(self.n * self.n);
            for s in 0..self.n {
                data.extend(self.bfs_from(s));
            }
            DistanceMatrix { n: self.n, data }
        })
    }

    /// Component label per vertex, labels assigned in order of smallest member.
    pub fn components(&self) -> Vec<usize> {
        let mut label = vec![usize::MAX; self.n];
        let mut next = 0;
        for s in 0..self.n {
            if label[s] != usize::MAX {
                continue;
            }
            label[s] = next;
            let mut stack = vec![s];
            while let Some(u) = stack.pop() {
                for &v in &self.adj[u] {
                    if label[v] == usize::MAX {
                        label[v] = next;
                        stack.push(v);
                    }
                }
            }
            next += 1;
        }
        label
    }

    pub fn component_count(&self) -> usize {
        self.components().into_iter().max().map_or(0, |m| m + 1)
    }

    pub fn is_connected(&self) -> bool {
        self.n > 0 && self.component_count() == 1
    }

    /// Proper 2-colouring if one exists.
    pub fn bipartition(&self) -> Option<Vec<bool>> {
        let mut color: Vec<Option<bool>> = vec![None; self.n];
        for s in 0..self.n {
            if color[s].is_some() {
                continue;
            }
            color[s] = Some(false);
            let mut queue = VecDeque::from([s]);
            while let Some(u) = queue.pop_front() {
                let cu = color[u].unwrap();
                for &v in &self.adj[u] {
                    match color[v] {
                        None => {
                            color[v] = Some(!cu);
                            queue.push_back(v);
                        }
                        Some(cv) if cv == cu => return None,
                        Some(_) => {}
                    }
                }
            }
        }
        Some(color.into_iter().map(Option::unwrap).collect())
    }

    /// Induced subgraph on `vertices`; vertex `i` of the result is `vertices[i]`.
    pub fn induced_subgraph(&self, vertices: &VertexSet) -> Graph {
        let mut index = vec![usize::MAX; self.n];
        for (i, v) in vertices.iter().enumerate() {
            index[v] = i;
        }
        let edges = self
            .edges
            .iter()
            .filter(|&&(u, v)| index[u] != usize::MAX && index[v] != usize::MAX)
            .map(|&(u, v)| (index[u], index[v]));
        Graph::new(vertices.len(), edges).expect("induced edges are valid")
    }

    /// The radius-`r` ball around `center` as an induced subgraph, with its vertex set.
    pub fn ball(&self, center: Vertex, radius: u32) -> (Graph, VertexSet) {
        let dist = self.bfs_from(center);
        let set = VertexSet(
            (0..self.n)
                .filter(|&v| matches!(dist[v], Some(d) if d <= radius))
                .collect(),
        );
        (self.induced_subgraph(&set), set)
    }

    pub fn disjoint_union(&self, other: &Graph) -> Graph {
        let shift = self.n;
        let edges = self
            .edges
            .iter()
            .copied()
            .chain(other.edges.iter().map(|&(u, v)| (u + shift, v + shift)));
        Graph::new(self.n + other.n, edges).expect("union of valid graphs")
    }

    /// Relabels vertices: vertex `v` becomes `perm[v]`.
    pub fn permuted(&self, perm: &[Vertex]) -> Result<Graph> {
        if perm.len() != self.n {
            return Err(Error::validation("permutation length mismatch"));
        }
        Graph::new(self.n, self.edges.iter().map(|&(u, v)| (perm[u], perm[v])))
    }

    /// Canonical edge-list text encoding.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        if let Some(name) = &self.name {
            let _ = writeln!(out, "# name: {name}");
        }
        let _ = writeln!(out, "{} {}", self.n, self.edges.len());
        for (u, v) in &self.edges {
            let _ = writeln!(out, "{u} {v}");
        }
        out
    }

    /// Parses the edge-list format: a `<n> <m>` header then `m` lines `<u> <v>`.
    /// Lines starting with `#` are comments; `# name: X` sets the graph name.
    pub fn parse_edge_list(text: &str) -> Result<Graph> {
        let mut header: Option<(usize, usize)> = None;
        let mut name = None;
        let mut edges = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(comment) = line.strip_prefix('#') {
                if let Some(n) = comment.trim().strip_prefix("name:") {
                    name = Some(n.trim().to_string());
                }
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 2 {
                return Err(Error::Parse {
                    line: line_no,
                    msg: format!("expected two integers, found {:?}", line),
                });
            }
            let parse = |s: &str| {
                s.parse::<usize>().map_err(|e| Error::Parse {
                    line: line_no,
                    msg: format!("{s:?}: {e}"),
                })
            };
            let (a, b) = (parse(fields[0])?, parse(fields[1])?);
            match header {
                None => header = Some((a, b)),
                Some(_) => edges.push((a, b)),
            }
        }
        let (n, m) = header.ok_or(Error::Parse {
            line: 0,
            msg: "missing header".into(),
        })?;
        if edges.len() != m {
            return Err(Error::Parse {
                line: 0,
                msg: format!("header declares {m} edges, found {}", edges.len()),
            });
        }
        let g = Graph::new(n, edges)?;
        Ok(match name {
            Some(name) => g.with_name(name),
            None => g,
        })
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("graph G {\n");
        for v in 0..self.n {
            let _ = writeln!(out, "  {v};");
        }
        for (u, v) in &self.edges {
            let _ = writeln!(out, "  {u} -- {v};");
        }
        out.push_str("}\n");
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DegreeProfile {
    pub is_regular: bool,
    pub k: Option<usize>,
    pub degree_sequence: Vec<usize>,
}

/// Standard graph families.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphKind {
    Cycle(usize),
    Path(usize),
    Complete(usize),
    CompleteBipartite(usize, usize),
    /// Cartesian product of two cycles.
    Torus(usize, usize),
    /// Radius-`r` ball around a vertex of the `k`-regular tree.
    TreeBall { k: usize, r: usize },
    Petersen,
}

pub fn generate(kind: GraphKind) -> Result<Graph> {
    match kind {
        GraphKind::Cycle(n) => {
            if n < 3 {
                return Err(Error::validation(format!("cycle needs n >= 3, got {n}")));
            }
            Ok(Graph::new(n, (0..n).map(|i| (i, (i + 1) % n)))?.with_name(format!("C{n}")))
        }
        GraphKind::Path(n) => {
            if n < 1 {
                return Err(Error::validation("path needs n >= 1"));
            }
            Ok(Graph::new(n, (1..n).map(|i| (i - 1, i)))?.with_name(format!("P{n}")))
        }
        GraphKind::Complete(n) => {
            if n < 1 {
                return Err(Error::validation("complete graph needs n >= 1"));
            }
            let edges = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)));
            Ok(Graph::new(n, edges)?.with_name(format!("K{n}")))
        }
        GraphKind::CompleteBipartite(p, q) => {
            if p < 1 || q < 1 {
                return Err(Error::validation("complete bipartite needs p, q >= 1"));
            }
            let edges = (0..p).flat_map(|u| (p..p + q).map(move |v| (u, v)));
            Ok(Graph::new(p + q, edges)?.with_name(format!("K{p},{q}")))
        }
        GraphKind::Torus(a, b) => {
            if a < 3 || b < 3 {
                return Err(Error::validation(format!(
                    "torus sides must be >= 3 (got {a} x {b}); smaller sides create multi-edges"
                )));
            }
            let id = |i: usize, j: usize| i * b + j;
            let mut edges = Vec::with_capacity(2 * a * b);
            for i in 0..a {
                for j in 0..b {
                    edges.push((id(i, j), id((i + 1) % a, j)));
                    edges.push((id(i, j), id(i, (j + 1) % b)));
                }
            }
            Ok(Graph::new(a * b, edges)?.with_name(format!("C{a}xC{b}")))
        }
        GraphKind::TreeBall { k, r } => {
            if k < 1 {
                return Err(Error::validation("tree degree must be >= 1"));
            }
            let mut edges = Vec::new();
            let mut frontier = vec![0usize];
            let mut next_id = 1;
            for depth in 0..r {
                let mut next = Vec::new();
                for &u in &frontier {
                    let children = if depth == 0 { k } else { k - 1 };
                    for _ in 0..children {
                        edges.push((u, next_id));
                        next.push(next_id);
                        next_id += 1;
                    }
                }
                frontier = next;
            }
            Ok(Graph::new(next_id, edges)?.with_name(format!("T{k}-ball{r}")))
        }
        GraphKind::Petersen => {
            let mut edges = Vec::new();
            for i in 0..5 {
                edges.push((i, (i + 1) % 5));
                edges.push((i, i + 5));
                edges.push((i + 5, (i + 2) % 5 + 5));
            }
            Ok(Graph::new(10, edges)?.with_name("Petersen"))
        }
    }
}
