use serde::{Deserialize, Serialize};

use super::graph::{compatible_edges, is_connected, Edge, Graph};
use crate::exec::Exec;
use crate::{Error, Result};

/// A lace `s₁t₁, …, s_Nt_N` on `[0, n]`, carried together with its
/// interdistances `m₁, …, m_{2N−1}` between the sorted points
/// `s₁ < s₂ < t₁ ≤ s₃ < t₂ ≤ … < t_N`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Lace {
    edges: Vec<Edge>,
    m: Vec<u32>,
}

/// `i̲` for bond `i ∈ 1..=N`: `1̲ = 0`, `i̲ = 2i − 3` otherwise.
pub fn underline(i: usize) -> usize {
    assert!(i >= 1);
    if i == 1 {
        0
    } else {
        2 * i - 3
    }
}

/// `ī` for bond `i ∈ 1..=N`: `2i` for `i < N`, `2N − 1` for `i = N`.
pub fn overline(i: usize, n_bonds: usize) -> usize {
    assert!(i >= 1 && i <= n_bonds);
    if i == n_bonds {
        2 * n_bonds - 1
    } else {
        2 * i
    }
}

/// The bond `β(p)` having point `p ∈ 0..=2N−1` as an endpoint.
pub fn beta(p: usize, n_bonds: usize) -> usize {
    assert!(p < 2 * n_bonds);
    if p == 0 {
        1
    } else if p == 2 * n_bonds - 1 {
        n_bonds
    } else if p % 2 == 1 {
        (p + 3) / 2
    } else {
        p / 2
    }
}

impl Lace {
    /// From interdistances; validates the sign constraints.
    pub fn from_m(m: Vec<u32>) -> Result<Self> {
        if m.is_empty() || m.len() % 2 == 0 {
            return Err(Error::InvalidParameter(format!("m-vector needs odd length, got {}", m.len())));
        }
        let k = m.len();
        let n_bonds = k.div_ceil(2);
        for (idx, &mi) in m.iter().enumerate() {
            let i = idx + 1;
            let needs_positive = i % 2 == 0 || i == 1 || i == k;
            if needs_positive && mi == 0 {
                return Err(Error::InvalidParameter(format!("m_{i} must be positive in {m:?}")));
            }
        }
        let mut points = vec![0u32; k + 1];
        for i in 1..=k {
            points[i] = points[i - 1] + m[i - 1];
        }
        let edges = (1..=n_bonds)
            .map(|i| Edge { s: points[underline(i)], t: points[overline(i, n_bonds)] })
            .collect();
        Ok(Lace { edges, m })
    }

    /// From a lace graph on `[0, n]` (edges in the lace's own order).
    pub fn from_graph(g: &Graph) -> Result<Self> {
        if g.a() != 0 {
            return Err(Error::InvalidParameter("laces are represented on [0, n]".into()));
        }
        let mut edges = g.edges().to_vec();
        edges.sort_by_key(|e| (e.s, e.t));
        let n_bonds = edges.len();
        if n_bonds == 0 {
            return Err(Error::Disconnected { a: g.a(), b: g.b() });
        }
        let mut points = vec![0u32; 2 * n_bonds];
        for (idx, e) in edges.iter().enumerate() {
            points[underline(idx + 1)] = e.s;
            points[overline(idx + 1, n_bonds)] = e.t;
        }
        if points.windows(2).any(|w| w[1] < w[0]) || points[2 * n_bonds - 1] != g.b() {
            return Err(Error::InvalidParameter(format!("{:?} is not a lace on [0, {}]", edges, g.b())));
        }
        let m: Vec<u32> = points.windows(2).map(|w| w[1] - w[0]).collect();
        let lace = Lace::from_m(m)?;
        if lace.edges != edges {
            return Err(Error::InvalidParameter("edge order inconsistent with a lace".into()));
        }
        Ok(lace)
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn m(&self) -> &[u32] {
        &self.m
    }

    pub fn n_bonds(&self) -> usize {
        self.edges.len()
    }

    pub fn length(&self) -> u32 {
        self.m.iter().sum()
    }

    pub fn graph(&self) -> Graph {
        Graph::new(0, self.length(), self.edges.clone()).expect("lace edges lie in [0, n]")
    }

    /// Sorted points `p_0 = 0, …, p_{2N−1} = n`.
    pub fn points(&self) -> Vec<u32> {
        let mut p = vec![0u32; self.m.len() + 1];
        for i in 1..p.len() {
            p[i] = p[i - 1] + self.m[i - 1];
        }
        p
    }
}

/// `ℓ_N⁰ = {(0,2), (1,4), (3,6), …, (2N−3, 2N−1)}` on `[0, 2N−1]`.
pub fn basic_lace(n_bonds: usize) -> Lace {
    assert!(n_bonds >= 1);
    Lace::from_m(vec![1; 2 * n_bonds - 1]).expect("all-ones vector is a lace")
}

/// All laces with `N` bonds on `[0, n]` in lexicographic m-vector order.
pub fn enumerate_laces(n_bonds: usize, n: u32) -> Vec<Lace> {
    if n_bonds == 0 {
        return Vec::new();
    }
    if n_bonds == 1 {
        return if n >= 1 { vec![Lace::from_m(vec![n]).unwrap()] } else { Vec::new() };
    }
    let k = 2 * n_bonds - 1;
    let mins: Vec<u32> = (1..=k).map(|i| u32::from(i % 2 == 0 || i == 1 || i == k)).collect();
    let min_total: u32 = mins.iter().sum();
    if n < min_total {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut current = vec![0u32; k];
    fill(&mins, 0, n, &mut current, &mut out);
    out
}

fn fill(mins: &[u32], idx: usize, remaining: u32, current: &mut Vec<u32>, out: &mut Vec<Lace>) {
    let k = mins.len();
    if idx == k - 1 {
        if remaining >= mins[idx] {
            current[idx] = remaining;
            out.push(Lace::from_m(current.clone()).expect("constraints enforced"));
        }
        return;
    }
    let rest_min: u32 = mins[idx + 1..].iter().sum();
    if remaining < mins[idx] + rest_min {
        return;
    }
    for v in mins[idx]..=remaining - rest_min {
        current[idx] = v;
        fill(mins, idx + 1, remaining - v, current, out);
    }
}

/// All laces on `[0, n]`, every bond count.
pub fn all_laces(n: u32) -> Vec<Lace> {
    // N bonds need n ≥ N + 1 (odd interior distances may vanish), except N = 1.
    (1..=(n as usize).saturating_sub(1).max(1)).flat_map(|nb| enumerate_laces(nb, n)).collect()
}

/// Largest interval length with bitmask-encoded graphs (`C(8, 2) = 28` edges).
pub const MASK_MAX_LEN: u32 = 7;

/// Bit positions of the edges of `[0, n]`, lexicographic in `(s, t)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeIndex {
    n: u32,
    edges: Vec<Edge>,
}

impl EdgeIndex {
    pub fn new(n: u32) -> Result<Self> {
        if n == 0 || n > MASK_MAX_LEN {
            return Err(Error::TooLarge(format!("bitmask graphs need 1 <= n <= {MASK_MAX_LEN}, got {n}")));
        }
        Ok(EdgeIndex { n, edges: Graph::all_edges(0, n) })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn bit(&self, e: Edge) -> u32 {
        let (s, t, n) = (e.s, e.t, self.n);
        debug_assert!(s < t && t <= n);
        // Σ_{s' < s} (n − s') edges precede those starting at s.
        s * n - s * (s.saturating_sub(1)) / 2 + (t - s - 1)
    }

    pub fn mask(&self, edges: &[Edge]) -> u32 {
        edges.iter().fold(0, |m, &e| m | (1 << self.bit(e)))
    }

    pub fn graph(&self, mask: u32) -> Graph {
        let edges = self.edges.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &e)| e).collect();
        Graph::new(0, self.n, edges).expect("edges from the index")
    }
}

/// All connected graphs on `[0, n]` as edge masks, ascending.
#[derive(Debug, Clone)]
pub struct ConnectedGraphs {
    index: EdgeIndex,
    masks: Vec<u32>,
}

/// Exhaustive enumeration is limited to `2^21` graphs.
pub const BRUTE_FORCE_MAX_LEN: u32 = 6;

impl ConnectedGraphs {
    pub fn new(n: u32, exec: Exec) -> Result<Self> {
        if n > BRUTE_FORCE_MAX_LEN {
            return Err(Error::TooLarge(format!("exhaustive graph sums need n <= {BRUTE_FORCE_MAX_LEN}, got {n}")));
        }
        let index = EdgeIndex::new(n)?;
        let total = 1usize << index.edges().len();
        let blocks = exec.map_blocks(total, |range| {
            range.filter(|&m| mask_connected(n, &index, m as u32)).map(|m| m as u32).collect::<Vec<_>>()
        });
        let masks = blocks.concat();
        Ok(ConnectedGraphs { index, masks })
    }

    pub fn index(&self) -> &EdgeIndex {
        &self.index
    }

    pub fn masks(&self) -> &[u32] {
        &self.masks
    }

    pub fn len(&self) -> usize {
        self.masks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masks.is_empty()
    }
}

/// Connectivity on a mask: per-point coverage bits.
fn mask_connected(n: u32, index: &EdgeIndex, mask: u32) -> bool {
    let mut covered = 0u32; // bit c: some edge with s < c < t
    let mut touches_a = false;
    let mut touches_b = false;
    for (i, e) in index.edges().iter().enumerate() {
        if mask >> i & 1 == 1 {
            touches_a |= e.s == 0;
            touches_b |= e.t == n;
            // interior points s+1..t-1
            covered |= ((1u32 << e.t) - 1) & !((1u32 << (e.s + 1)) - 1);
        }
    }
    let interior = ((1u32 << n) - 1) & !1;
    touches_a && touches_b && covered & interior == interior
}

/// A lace with its edge mask and the mask of its compatible edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LaceMasks {
    pub lace: Lace,
    pub n_bonds: usize,
    pub lace_mask: u32,
    pub compatible_mask: u32,
}

/// Every lace on `[0, n]` in bitmask form, for fast per-path evaluation of `J`.
#[derive(Debug, Clone)]
pub struct LaceTable {
    index: EdgeIndex,
    laces: Vec<LaceMasks>,
}

impl LaceTable {
    pub fn new(n: u32) -> Result<Self> {
        let index = EdgeIndex::new(n)?;
        let laces = all_laces(n)
            .into_iter()
            .map(|lace| {
                let compatible = compatible_edges(&lace.graph()).expect("enumerated laces are laces");
                LaceMasks {
                    n_bonds: lace.n_bonds(),
                    lace_mask: index.mask(lace.edges()),
                    compatible_mask: index.mask(&compatible),
                    lace,
                }
            })
            .collect();
        Ok(LaceTable { index, laces })
    }

    pub fn index(&self) -> &EdgeIndex {
        &self.index
    }

    pub fn laces(&self) -> &[LaceMasks] {
        &self.laces
    }

    /// `Σ_ℓ 2^{|C(ℓ)|}`, which equals the number of connected graphs when the
    /// laces with their compatible edges partition them.
    pub fn census(&self) -> u64 {
        self.laces.iter().map(|l| 1u64 << l.compatible_mask.count_ones()).sum()
    }
}

/// Connectivity on explicit graphs, for cross-checking the mask form.
pub fn connected_by_definition(index: &EdgeIndex, mask: u32) -> bool {
    is_connected(&index.graph(mask))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts() {
        assert_eq!(enumerate_laces(2, 3).len(), 1);
        assert_eq!(enumerate_laces(2, 3)[0].m(), &[1, 1, 1]);
        assert_eq!(enumerate_laces(2, 5).len(), 6);
        assert_eq!(enumerate_laces(3, 5).len(), 5);
        assert!(enumerate_laces(3, 3).is_empty());
        assert_eq!(enumerate_laces(3, 4)[0].m(), &[1, 1, 0, 1, 1]);
        assert_eq!(enumerate_laces(1, 4)[0].edges(), &[Edge { s: 0, t: 4 }]);
    }

    #[test]
    fn basic_lace_shape() {
        let l = basic_lace(3);
        let pairs: Vec<(u32, u32)> = l.edges().iter().map(|e| (e.s, e.t)).collect();
        assert_eq!(pairs, vec![(0, 2), (1, 4), (3, 5)]);
        assert_eq!(enumerate_laces(3, 5).iter().filter(|x| x.m() == [1, 1, 1, 1, 1]).count(), 1);
    }

    #[test]
    fn beta_maps_round_trip() {
        for nb in 1..=6 {
            for p in 0..2 * nb {
                let i = beta(p, nb);
                assert!(p == underline(i) || p == overline(i, nb), "N={nb} p={p}");
            }
            for i in 1..=nb {
                assert_eq!(beta(underline(i), nb), i);
                assert_eq!(beta(overline(i, nb), nb), i);
            }
        }
    }

    #[test]
    fn edge_bits_are_lexicographic() {
        let idx = EdgeIndex::new(5).unwrap();
        for (i, &e) in idx.edges().iter().enumerate() {
            assert_eq!(idx.bit(e), i as u32);
        }
    }

    #[test]
    fn mask_connectivity_matches_definition() {
        let idx = EdgeIndex::new(4).unwrap();
        for m in 0..1u32 << idx.edges().len() {
            assert_eq!(mask_connected(4, &idx, m), connected_by_definition(&idx, m));
        }
    }
}
