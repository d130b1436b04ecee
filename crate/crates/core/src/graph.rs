//! Finite simple connected graphs, with the even-sided two-dimensional
//! torus as the primary instance.
//!
//! Torus vertices carry representative coordinates in `{-n+1, …, n}²`
//! (side `2n`). Two torus vertices are adjacent when they agree in one
//! coordinate and differ by exactly 1 modulo `2n` in the other, so the
//! graph is 4-regular with `(2n)²` vertices and `2(2n)²` edges. Distance
//! queries use the wrapped-coordinate closed form on the torus and
//! breadth-first search on generic graphs; one BFS is kept as the test
//! oracle for the closed form.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use crate::Error;

/// Dense vertex index into adjacency and height vectors.
pub type Vertex = usize;

/// Graph flavour; torus graphs unlock coordinate queries and the `ℓ¹` norm.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GraphKind {
    /// 2D torus with vertex set `{-n+1, …, n}²`.
    Torus { n: u32 },
    /// Simple connected graph given by an explicit edge list.
    Generic,
}

/// An immutable simple connected graph.
///
/// Vertices are `0..vertex_count()`; neighbour lists are sorted and edges
/// are stored once in canonical `(min, max)` form.
#[derive(Clone, Debug)]
pub struct Graph {
    kind: GraphKind,
    adj: Vec<Vec<Vertex>>,
    edges: Vec<(Vertex, Vertex)>,
    /// Representative coordinates, torus only (empty for generic graphs).
    coords: Vec<(i32, i32)>,
}

impl Graph {
    /// Builds the 2D torus of half-side `n` (side `2n`, `(2n)²` vertices).
    ///
    /// # Example
    /// ```
    /// let g = surface_shift_core::Graph::torus(2).unwrap();
    /// assert_eq!(g.vertex_count(), 16);
    /// assert_eq!(g.edges().len(), 32);
    /// ```
    pub fn torus(n: u32) -> Result<Self, Error> {
        if n < 2 {
            return Err(Error::TorusTooSmall { n });
        }
        let side = 2 * n as i64;
        let nv = (side * side) as usize;
        let offset = n as i64 - 1; // coordinate x ↦ storage index x + n − 1
        let index = |x: i64, y: i64| -> usize {
            let sx = (x + offset).rem_euclid(side);
            let sy = (y + offset).rem_euclid(side);
            (sx * side + sy) as usize
        };
        let mut coords = vec![(0i32, 0i32); nv];
        let mut adj = vec![Vec::with_capacity(4); nv];
        let mut edges = Vec::with_capacity(2 * nv);
        for x in (1 - n as i64)..=(n as i64) {
            for y in (1 - n as i64)..=(n as i64) {
                let v = index(x, y);
                coords[v] = (x as i32, y as i32);
                let right = index(x + 1, y);
                let up = index(x, y + 1);
                let left = index(x - 1, y);
                let down = index(x, y - 1);
                adj[v] = vec![right, up, left, down];
                adj[v].sort_unstable();
                edges.push((v.min(right), v.max(right)));
                edges.push((v.min(up), v.max(up)));
            }
        }
        edges.sort_unstable();
        Ok(Graph {
            kind: GraphKind::Torus { n },
            adj,
            edges,
            coords,
        })
    }

    /// Builds a generic simple connected graph from an edge list.
    ///
    /// Rejects self-loops, duplicate edges, out-of-range endpoints, and
    /// disconnected inputs.
    pub fn from_edges(vertex_count: usize, edge_list: &[(Vertex, Vertex)]) -> Result<Self, Error> {
        if vertex_count == 0 {
            return Err(Error::EmptyGraph);
        }
        let mut edges: Vec<(Vertex, Vertex)> = Vec::with_capacity(edge_list.len());
        for &(a, b) in edge_list {
            if a >= vertex_count {
                return Err(Error::VertexOutOfRange { vertex: a, count: vertex_count });
            }
            if b >= vertex_count {
                return Err(Error::VertexOutOfRange { vertex: b, count: vertex_count });
            }
            if a == b {
                return Err(Error::SelfLoop { vertex: a });
            }
            edges.push((a.min(b), a.max(b)));
        }
        edges.sort_unstable();
        if let Some(w) = edges.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateEdge { a: w[0].0, b: w[0].1 });
        }
        let mut adj = vec![Vec::new(); vertex_count];
        for &(a, b) in &edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        let g = Graph {
            kind: GraphKind::Generic,
            adj,
            edges,
            coords: Vec::new(),
        };
        if g.bfs(0).iter().any(|&d| d == usize::MAX) {
            return Err(Error::Disconnected);
        }
        Ok(g)
    }

    pub fn kind(&self) -> GraphKind {
        self.kind
    }

    pub fn torus_n(&self) -> Option<u32> {
        match self.kind {
            GraphKind::Torus { n } => Some(n),
            GraphKind::Generic => None,
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    /// Canonical `(min, max)` edge list, sorted.
    pub fn edges(&self) -> &[(Vertex, Vertex)] {
        &self.edges
    }

    /// Sorted neighbour list of `v`.
    pub fn neighbors(&self, v: Vertex) -> &[Vertex] {
        &self.adj[v]
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.adj[v].len()
    }

    /// True when `{a, b}` is an edge.
    pub fn has_edge(&self, a: Vertex, b: Vertex) -> bool {
        self.adj[a].binary_search(&b).is_ok()
    }

    /// Representative coordinates of `v` (torus only).
    pub fn coords(&self, v: Vertex) -> Option<(i32, i32)> {
        self.coords.get(v).copied().filter(|_| self.torus_n().is_some())
    }

    /// Vertex at torus coordinates `(x, y)`, wrapping modulo the side.
    pub fn vertex_at(&self, x: i64, y: i64) -> Option<Vertex> {
        let n = self.torus_n()? as i64;
        let side = 2 * n;
        let sx = (x + n - 1).rem_euclid(side);
        let sy = (y + n - 1).rem_euclid(side);
        Some((sx * side + sy) as usize)
    }

    /// The pinned vertex: `(0, 0)` on the torus, vertex 0 otherwise.
    pub fn origin(&self) -> Vertex {
        match self.kind {
            GraphKind::Torus { .. } => self.vertex_at(0, 0).expect("torus origin"),
            GraphKind::Generic => 0,
        }
    }

    fn bfs(&self, start: Vertex) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.vertex_count()];
        let mut queue = VecDeque::new();
        dist[start] = 0;
        queue.push_back(start);
        while let Some(v) = queue.pop_front() {
            for &w in &self.adj[v] {
                if dist[w] == usize::MAX {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// Graph distance. Closed form (wrapped per-coordinate distance) on the
    /// torus, BFS on generic graphs.
    pub fn distance(&self, v: Vertex, w: Vertex) -> usize {
        match self.kind {
            GraphKind::Torus { n } => {
                let side = 2 * n as i64;
                let (vx, vy) = self.coords[v];
                let (wx, wy) = self.coords[w];
                let dx = (vx as i64 - wx as i64).rem_euclid(side);
                let dy = (vy as i64 - wy as i64).rem_euclid(side);
                (dx.min(side - dx) + dy.min(side - dy)) as usize
            }
            GraphKind::Generic => self.bfs(v)[w],
        }
    }

    /// Distances from `v` to every vertex.
    pub fn distances_from(&self, v: Vertex) -> Vec<usize> {
        match self.kind {
            GraphKind::Torus { .. } => {
                (0..self.vertex_count()).map(|w| self.distance(v, w)).collect()
            }
            GraphKind::Generic => self.bfs(v),
        }
    }

    /// Maximum pairwise distance. `2n` on the torus.
    pub fn diameter(&self) -> usize {
        match self.kind {
            GraphKind::Torus { n } => 2 * n as usize,
            GraphKind::Generic => (0..self.vertex_count())
                .map(|v| self.bfs(v).into_iter().max().unwrap_or(0))
                .max()
                .unwrap_or(0),
        }
    }

    /// `ℓ¹` norm of the representative coordinates of `v`; torus only.
    ///
    /// # Example
    /// ```
    /// let g = surface_shift_core::Graph::torus(4).unwrap();
    /// let v = g.vertex_at(-3, 2).unwrap();
    /// assert_eq!(g.l1_norm(v).unwrap(), 5);
    /// ```
    pub fn l1_norm(&self, v: Vertex) -> Result<usize, Error> {
        match self.kind {
            GraphKind::Torus { .. } => {
                let (x, y) = self.coords[v];
                Ok(x.unsigned_abs() as usize + y.unsigned_abs() as usize)
            }
            GraphKind::Generic => Err(Error::NotATorus),
        }
    }

    /// Two-colouring with part `false` containing vertex 0, or `None` if
    /// the graph has an odd cycle.
    pub fn bipartition(&self) -> Option<Vec<bool>> {
        let mut color = vec![None; self.vertex_count()];
        let mut queue = VecDeque::new();
        color[0] = Some(false);
        queue.push_back(0);
        while let Some(v) = queue.pop_front() {
            let cv = color[v].unwrap();
            for &w in &self.adj[v] {
                match color[w] {
                    None => {
                        color[w] = Some(!cv);
                        queue.push_back(w);
                    }
                    Some(cw) if cw == cv => return None,
                    Some(_) => {}
                }
            }
        }
        color.into_iter().collect()
    }
}

/// Radii and diameter of the components spanned by an edge subset.
///
/// `r[v]` is the largest full-graph distance from `v` to a vertex in its
/// component (0 for singletons); `big_m` is the largest pairwise full-graph
/// distance within any component.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComponentMetrics {
    pub r: Vec<usize>,
    pub big_m: usize,
}

/// Computes [`ComponentMetrics`] for the subgraph spanned by `edge_subset`.
/// Every listed pair must be an edge of `g`. Distances are measured in the
/// full graph, not within the component.
pub fn component_metrics(g: &Graph, edge_subset: &[(Vertex, Vertex)]) -> Result<ComponentMetrics, Error> {
    let nv = g.vertex_count();
    let mut parent: Vec<usize> = (0..nv).collect();
    fn find(parent: &mut [usize], mut v: usize) -> usize {
        while parent[v] != v {
            parent[v] = parent[parent[v]];
            v = parent[v];
        }
        v
    }
    for &(a, b) in edge_subset {
        if a >= nv {
            return Err(Error::VertexOutOfRange { vertex: a, count: nv });
        }
        if b >= nv {
            return Err(Error::VertexOutOfRange { vertex: b, count: nv });
        }
        if !g.has_edge(a, b) {
            return Err(Error::NotAnEdge { a, b });
        }
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra != rb {
            parent[ra] = rb;
        }
    }
    let mut members: Vec<Vec<Vertex>> = vec![Vec::new(); nv];
    for v in 0..nv {
        let root = find(&mut parent, v);
        members[root].push(v);
    }
    let mut r = vec![0usize; nv];
    let mut big_m = 0usize;
    for group in members.iter().filter(|m| m.len() >= 2) {
        for &v in group {
            let dist = g.distances_from(v);
            let rv = group.iter().map(|&w| dist[w]).max().unwrap_or(0);
            r[v] = rv;
            big_m = big_m.max(rv);
        }
    }
    Ok(ComponentMetrics { r, big_m })
}
