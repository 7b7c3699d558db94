//! Undirected simple graphs, random generators for the experiment classes,
//! and brute-force independent-set oracles.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use delaunator::{triangulate, Point};
use rand::seq::SliceRandom;
use rand::Rng;
use rustworkx_core::petgraph::graph::UnGraph;

use crate::error::{Error, Result};
use crate::seed;

/// Normalized edge `(min, max)`.
pub type Edge = (usize, usize);

/// Largest graph the exhaustive oracles accept.
pub const ORACLE_MAX_VERTICES: usize = 24;

/// Immutable simple undirected graph on vertices `0..n`.
///
/// Edges are stored normalized and sorted, so edge indices are canonical.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<Edge>,
    adjacency: Vec<Vec<usize>>,
    incident: Vec<Vec<usize>>,
}

impl Graph {
    pub fn from_edge_list(n: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameters(
                "graph needs at least one vertex".into(),
            ));
        }
        let mut set = BTreeSet::new();
        for &(i, j) in pairs {
            for v in [i, j] {
                if v >= n {
                    return Err(Error::VertexOutOfRange { index: v, n });
                }
            }
            if i == j {
                return Err(Error::SelfLoop(i));
            }
            set.insert((i.min(j), i.max(j)));
        }
        let edges: Vec<Edge> = set.into_iter().collect();
        let mut adjacency = vec![Vec::new(); n];
        let mut incident = vec![Vec::new(); n];
        for (k, &(i, j)) in edges.iter().enumerate() {
            adjacency[i].push(j);
            adjacency[j].push(i);
            incident[i].push(k);
            incident[j].push(k);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        Ok(Graph {
            n,
            edges,
            adjacency,
            incident,
        })
    }

    pub fn empty(n: usize) -> Result<Self> {
        Self::from_edge_list(n, &[])
    }

    pub fn path(n: usize) -> Result<Self> {
        let pairs: Vec<_> = (1..n).map(|v| (v - 1, v)).collect();
        Self::from_edge_list(n, &pairs)
    }

    pub fn cycle(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidParameters(format!(
                "cycle needs n >= 3, got {n}"
            )));
        }
        let pairs: Vec<_> = (0..n).map(|v| (v, (v + 1) % n)).collect();
        Self::from_edge_list(n, &pairs)
    }

    pub fn complete(n: usize) -> Result<Self> {
        let mut pairs = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                pairs.push((i, j));
            }
        }
        Self::from_edge_list(n, &pairs)
    }

    /// Outer 5-cycle, inner pentagram, five spokes.
    pub fn petersen() -> Self {
        let mut pairs = Vec::new();
        for i in 0..5 {
            pairs.push((i, (i + 1) % 5));
            pairs.push((i, i + 5));
            pairs.push((5 + i, 5 + (i + 2) % 5));
        }
        Self::from_edge_list(10, &pairs).expect("petersen edges are valid")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    /// Indices (into [`Graph::edges`]) of the edges touching `v`.
    pub fn incident_edges(&self, v: usize) -> &[usize] {
        &self.incident[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn max_degree(&self) -> usize {
        (0..self.n).map(|v| self.degree(v)).max().unwrap_or(0)
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        i < self.n && self.adjacency[i].binary_search(&j).is_ok()
    }

    /// Bitmask of each vertex's neighbourhood. Only valid for `n <= 64`.
    pub(crate) fn neighbor_masks(&self) -> Vec<u64> {
        debug_assert!(self.n <= 64);
        self.adjacency
            .iter()
            .map(|adj| adj.iter().fold(0u64, |m, &u| m | (1 << u)))
            .collect()
    }

    /// True when no edge has both endpoints set in `mask` (bit v = vertex v).
    pub fn is_independent_mask(&self, mask: u64) -> bool {
        self.edges
            .iter()
            .all(|&(i, j)| (mask >> i) & 1 == 0 || (mask >> j) & 1 == 0)
    }

    pub fn is_planar(&self) -> bool {
        let mut pg = UnGraph::<(), ()>::with_capacity(self.n, self.edges.len());
        let nodes: Vec<_> = (0..self.n).map(|_| pg.add_node(())).collect();
        for &(i, j) in &self.edges {
            pg.add_edge(nodes[i], nodes[j], ());
        }
        rustworkx_core::planar::is_planar(&pg)
    }

    /// Edges with both endpoints set, the endpoint set `B` and its outer
    /// boundary `N(B) \ B`.
    pub fn violations(&self, a: &VertexAssignment) -> Result<ViolationSet> {
        self.check_len(a)?;
        let edges = self
            .edges
            .iter()
            .copied()
            .filter(|&(i, j)| a.get(i) && a.get(j))
            .collect();
        Ok(ViolationSet::from_edges(self, edges))
    }

    /// Every independent set, sorted lexicographically in vertex order.
    pub fn enumerate_independent_sets(&self) -> Result<Vec<VertexAssignment>> {
        let mut out: Vec<VertexAssignment> = self
            .independent_masks()?
            .into_iter()
            .map(|m| VertexAssignment::from_mask(m, self.n))
            .collect();
        out.sort();
        Ok(out)
    }

    /// `Z(λ) = Σ_{s ∈ IS} λ^{|s|}` by exhaustive enumeration.
    pub fn partition_function(&self, lambda: f64) -> Result<f64> {
        check_lambda(lambda)?;
        let weights = self.is_size_counts()?;
        Ok(weights
            .iter()
            .enumerate()
            .map(|(k, &c)| c as f64 * lambda.powi(k as i32))
            .sum())
    }

    /// Number of independent sets of each size `0..=n`.
    pub fn is_size_counts(&self) -> Result<Vec<u64>> {
        let mut counts = vec![0u64; self.n + 1];
        for m in self.independent_masks()? {
            counts[m.count_ones() as usize] += 1;
        }
        Ok(counts)
    }

    /// Size of a maximum independent set, by exhaustive search.
    pub fn mis_size(&self) -> Result<usize> {
        let counts = self.is_size_counts()?;
        Ok(counts.iter().rposition(|&c| c > 0).unwrap_or(0))
    }

    /// Masks of all independent sets, ascending by mask value.
    pub fn independent_masks(&self) -> Result<Vec<u64>> {
        self.oracle_guard()?;
        let nbr = self.neighbor_masks();
        // Extend sets vertex by vertex; only independent prefixes survive.
        let mut sets = vec![0u64];
        for (v, &nv) in nbr.iter().enumerate().take(self.n) {
            let grown: Vec<u64> = sets
                .iter()
                .filter(|&&m| m & nv == 0)
                .map(|&m| m | (1 << v))
                .collect();
            sets.extend(grown);
        }
        sets.sort_unstable();
        Ok(sets)
    }

    /// Text interchange format: `"n m"` then one `"i j"` line per edge.
    pub fn to_text(&self) -> String {
        let mut s = format!("{} {}\n", self.n, self.edges.len());
        for &(i, j) in &self.edges {
            s.push_str(&format!("{i} {j}\n"));
        }
        s
    }

    pub fn parse_text(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(k, l)| (k + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty());
        let (line, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            message: "missing header".into(),
        })?;
        let head = parse_pair(line, header)?;
        let (n, m) = head;
        let mut pairs = Vec::with_capacity(m);
        for (line, l) in lines {
            pairs.push(parse_pair(line, l)?);
        }
        if pairs.len() != m {
            return Err(Error::Parse {
                line,
                message: format!("header declares {m} edges, found {}", pairs.len()),
            });
        }
        Self::from_edge_list(n, &pairs)
    }

    fn check_len(&self, a: &VertexAssignment) -> Result<()> {
        if a.len() != self.n {
            return Err(Error::LengthMismatch {
                expected: self.n,
                got: a.len(),
            });
        }
        Ok(())
    }

    fn oracle_guard(&self) -> Result<()> {
        if self.n > ORACLE_MAX_VERTICES {
            return Err(Error::SizeGuard {
                what: "vertex count",
                got: self.n,
                limit: ORACLE_MAX_VERTICES,
            });
        }
        Ok(())
    }
}

fn parse_pair(line: usize, text: &str) -> Result<(usize, usize)> {
    let fields: Vec<&str> = text.split_whitespace().collect();
    if fields.len() != 2 {
        return Err(Error::Parse {
            line,
            message: format!("expected two integers, got {text:?}"),
        });
    }
    let parse = |f: &str| {
        f.parse::<usize>().map_err(|e| Error::Parse {
            line,
            message: format!("{f:?}: {e}"),
        })
    };
    Ok((parse(fields[0])?, parse(fields[1])?))
}

pub(crate) fn check_lambda(lambda: f64) -> Result<()> {
    if lambda > 0.0 && lambda.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidLambda(lambda))
    }
}

/// Uniform-ish random `d`-regular graph via configuration-model pairing,
/// restarting from scratch on any self-loop or repeated edge.
pub fn gen_regular(n: usize, d: usize, seed: u64) -> Result<Graph> {
    if n == 0 || d >= n {
        return Err(Error::InvalidParameters(format!(
            "regular graph needs 0 <= d < n, got n={n}, d={d}"
        )));
    }
    if (n * d) % 2 == 1 {
        return Err(Error::InvalidParameters(format!(
            "n*d must be even, got n={n}, d={d}"
        )));
    }
    let mut rng = seed::rng(seed);
    let mut stubs: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat_n(v, d)).collect();
    'attempt: loop {
        stubs.shuffle(&mut rng);
        let mut seen = BTreeSet::new();
        for pair in stubs.chunks_exact(2) {
            let (a, b) = (pair[0], pair[1]);
            if a == b || !seen.insert((a.min(b), a.max(b))) {
                continue 'attempt;
            }
        }
        let pairs: Vec<_> = seen.into_iter().collect();
        return Graph::from_edge_list(n, &pairs);
    }
}

/// Random planar graph with maximum degree at most `d`.
///
/// Points are drawn uniformly in the unit square and Delaunay-triangulated;
/// edges are then visited in a seeded random order and removed whenever an
/// endpoint still exceeds degree `d`. One pass suffices: an edge survives
/// only if both endpoints were within budget when it was visited. The
/// result is a subgraph of a planar triangulation, hence planar. Not
/// exactly uniform over bounded-degree planar graphs.
pub fn gen_bounded_planar(n: usize, d: usize, seed: u64) -> Result<Graph> {
    if n == 0 || d == 0 {
        return Err(Error::InvalidParameters(format!(
            "bounded planar graph needs n >= 1 and d >= 1, got n={n}, d={d}"
        )));
    }
    let mut rng = seed::rng(seed);
    let points: Vec<Point> = (0..n)
        .map(|_| Point {
            x: rng.random::<f64>(),
            y: rng.random::<f64>(),
        })
        .collect();
    let mut candidate = BTreeSet::new();
    if n == 2 {
        candidate.insert((0, 1));
    } else if n > 2 {
        let tri = triangulate(&points);
        if tri.triangles.is_empty() {
            // Degenerate (collinear) input: a path in x order is planar.
            let mut order: Vec<usize> = (0..n).collect();
            order.sort_by(|&a, &b| points[a].x.total_cmp(&points[b].x));
            for w in order.windows(2) {
                candidate.insert((w[0].min(w[1]), w[0].max(w[1])));
            }
        }
        for t in tri.triangles.chunks_exact(3) {
            for (a, b) in [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])] {
                candidate.insert((a.min(b), a.max(b)));
            }
        }
    }
    let mut edges: Vec<Edge> = candidate.into_iter().collect();
    edges.shuffle(&mut rng);
    let mut degree = vec![0usize; n];
    for &(a, b) in &edges {
        degree[a] += 1;
        degree[b] += 1;
    }
    let mut kept = Vec::with_capacity(edges.len());
    let mut dropped = Vec::new();
    for (a, b) in edges {
        if degree[a] > d || degree[b] > d {
            degree[a] -= 1;
            degree[b] -= 1;
            dropped.push((a, b));
        } else {
            kept.push((a, b));
        }
    }
    // The trim pass overshoots; refill while both endpoints have room so
    // the result is maximal among subgraphs of the triangulation.
    for (a, b) in dropped {
        if degree[a] < d && degree[b] < d {
            degree[a] += 1;
            degree[b] += 1;
            kept.push((a, b));
        }
    }
    Graph::from_edge_list(n, &kept)
}

/// Star with centre 0 and leaves `1..=leaves`.
pub fn gen_star(leaves: usize) -> Result<Graph> {
    if leaves == 0 {
        return Err(Error::InvalidParameters(
            "star needs at least one leaf".into(),
        ));
    }
    let pairs: Vec<_> = (1..=leaves).map(|v| (0, v)).collect();
    Graph::from_edge_list(leaves + 1, &pairs)
}

/// Length-`n` bitstring; bit `v` is 1 when vertex `v` is in the set.
///
/// Displays and orders in vertex order (vertex 0 first).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexAssignment {
    bits: Vec<bool>,
}

impl VertexAssignment {
    pub fn new(bits: Vec<bool>) -> Self {
        VertexAssignment { bits }
    }

    pub fn zeros(n: usize) -> Self {
        VertexAssignment {
            bits: vec![false; n],
        }
    }

    /// Bit `v` of `mask` becomes vertex `v`; also the basis-index mapping.
    pub fn from_mask(mask: u64, n: usize) -> Self {
        VertexAssignment {
            bits: (0..n).map(|v| (mask >> v) & 1 == 1).collect(),
        }
    }

    pub fn to_mask(&self) -> u64 {
        self.bits
            .iter()
            .enumerate()
            .fold(0, |m, (v, &b)| if b { m | (1 << v) } else { m })
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn get(&self, v: usize) -> bool {
        self.bits[v]
    }

    pub fn set(&mut self, v: usize, bit: bool) {
        self.bits[v] = bit;
    }

    pub fn weight(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }
}

impl fmt::Display for VertexAssignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for VertexAssignment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::Parse {
                    line: 1,
                    message: format!("invalid bit {other:?}"),
                }),
            })
            .collect::<Result<Vec<_>>>()
            .map(VertexAssignment::new)
    }
}

/// Violating edges together with the endpoint set `B` and the outer
/// boundary `N(B) \ B`; resampling touches exactly `B ∪ N(B)`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ViolationSet {
    pub edges: Vec<Edge>,
    pub endpoints: Vec<usize>,
    pub boundary: Vec<usize>,
}

impl ViolationSet {
    pub fn from_edges(g: &Graph, edges: Vec<Edge>) -> Self {
        let endpoints: BTreeSet<usize> = edges.iter().flat_map(|&(i, j)| [i, j]).collect();
        let boundary: BTreeSet<usize> = endpoints
            .iter()
            .flat_map(|&v| g.neighbors(v).iter().copied())
            .filter(|u| !endpoints.contains(u))
            .collect();
        ViolationSet {
            edges,
            endpoints: endpoints.into_iter().collect(),
            boundary: boundary.into_iter().collect(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// `B ∪ N(B)`, sorted.
    pub fn reset_set(&self) -> Vec<usize> {
        let mut all: Vec<usize> = self
            .endpoints
            .iter()
            .chain(self.boundary.iter())
            .copied()
            .collect();
        all.sort_unstable();
        all
    }
}
