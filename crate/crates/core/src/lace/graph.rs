use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// The pair `{s, t}`, `s < t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Edge {
    pub s: u32,
    pub t: u32,
}

impl Edge {
    pub fn new(s: u32, t: u32) -> Result<Self> {
        if s >= t {
            return Err(Error::InvalidParameter(format!("edge needs s < t, got ({s}, {t})")));
        }
        Ok(Edge { s, t })
    }

    pub fn len(&self) -> u32 {
        self.t - self.s
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// A set of edges on the integer interval `[a, b]`, kept sorted and duplicate-free.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Graph {
    a: u32,
    b: u32,
    edges: Vec<Edge>,
}

impl Graph {
    pub fn new(a: u32, b: u32, mut edges: Vec<Edge>) -> Result<Self> {
        if a >= b {
            return Err(Error::InvalidParameter(format!("interval needs a < b, got [{a}, {b}]")));
        }
        if let Some(e) = edges.iter().find(|e| e.s < a || e.t > b || e.s >= e.t) {
            return Err(Error::InvalidParameter(format!("edge ({}, {}) outside [{a}, {b}]", e.s, e.t)));
        }
        edges.sort_unstable();
        edges.dedup();
        Ok(Graph { a, b, edges })
    }

    /// Builds a graph from `(s, t)` pairs.
    pub fn from_pairs(a: u32, b: u32, pairs: &[(u32, u32)]) -> Result<Self> {
        let edges = pairs.iter().map(|&(s, t)| Edge::new(s, t)).collect::<Result<_>>()?;
        Self::new(a, b, edges)
    }

    pub fn a(&self) -> u32 {
        self.a
    }

    pub fn b(&self) -> u32 {
        self.b
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn contains(&self, e: Edge) -> bool {
        self.edges.binary_search(&e).is_ok()
    }

    pub fn with_edge(&self, e: Edge) -> Self {
        let mut edges = self.edges.clone();
        edges.push(e);
        Graph::new(self.a, self.b, edges).expect("edge already validated")
    }

    pub fn without_edge(&self, e: Edge) -> Self {
        Graph { a: self.a, b: self.b, edges: self.edges.iter().copied().filter(|&x| x != e).collect() }
    }

    /// All graphs' edge universe: every `st` with `a ≤ s < t ≤ b`, lexicographic.
    pub fn all_edges(a: u32, b: u32) -> Vec<Edge> {
        (a..b).flat_map(|s| (s + 1..=b).map(move |t| Edge { s, t })).collect()
    }
}

/// `a` and `b` are endpoints of edges, and every interior integer `c` has an
/// edge with `s < c < t`; together this is coverage of the open interval `(a, b)`.
pub fn is_connected(g: &Graph) -> bool {
    let (a, b) = (g.a, g.b);
    let touches_a = g.edges.iter().any(|e| e.s == a);
    let touches_b = g.edges.iter().any(|e| e.t == b);
    touches_a && touches_b && (a + 1..b).all(|c| g.edges.iter().any(|e| e.s < c && c < e.t))
}

/// The lace selected by the prescription `t₁ = max{t : at ∈ Γ}`, `s₁ = a`,
/// `t_{i+1} = max{t : ∃ s < t_i, st ∈ Γ}`, `s_{i+1} = min{s : s t_{i+1} ∈ Γ}`.
pub fn lace_of(g: &Graph) -> Result<Graph> {
    if !is_connected(g) {
        return Err(Error::Disconnected { a: g.a, b: g.b });
    }
    let mut out = Vec::new();
    let s1 = g.a;
    let t1 = g.edges.iter().filter(|e| e.s == s1).map(|e| e.t).max().expect("connected");
    out.push(Edge { s: s1, t: t1 });
    let mut t = t1;
    while t < g.b {
        let next_t = g.edges.iter().filter(|e| e.s < t).map(|e| e.t).max().expect("connected");
        debug_assert!(next_t > t);
        let next_s = g.edges.iter().filter(|e| e.t == next_t).map(|e| e.s).min().expect("edge exists");
        out.push(Edge { s: next_s, t: next_t });
        t = next_t;
    }
    Graph::new(g.a, g.b, out)
}

/// Edges `st ∉ ℓ` with `lace_of(ℓ ∪ {st}) = ℓ`.
pub fn compatible_edges(lace: &Graph) -> Result<Vec<Edge>> {
    if lace_of(lace)? != *lace {
        return Err(Error::InvalidParameter("graph is not a lace".into()));
    }
    Ok(Graph::all_edges(lace.a, lace.b)
        .into_iter()
        .filter(|&e| !lace.contains(e) && is_compatible(lace, e))
        .collect())
}

/// Whether a single edge leaves the lace of `ℓ ∪ {e}` unchanged.
pub fn is_compatible(lace: &Graph, e: Edge) -> bool {
    lace_of(&lace.with_edge(e)).map(|l| l == *lace).unwrap_or(false)
}

/// Whether `g` is connected and removing any edge disconnects it.
pub fn is_minimally_connected(g: &Graph) -> bool {
    is_connected(g) && g.edges.iter().all(|&e| !is_connected(&g.without_edge(e)))
}
