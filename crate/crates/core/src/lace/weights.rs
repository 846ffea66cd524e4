use serde::{Deserialize, Serialize};

use super::laces::{ConnectedGraphs, EdgeIndex, LaceTable};
use crate::exec::Exec;
use crate::{Error, Result};

/// Points `x₀ = 0, x₁, …, x_n` in `R^d`, stored row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Path {
    dim: usize,
    coords: Vec<f64>,
}

impl Path {
    pub fn new(dim: usize, coords: Vec<f64>) -> Result<Self> {
        if dim == 0 || coords.is_empty() || coords.len() % dim != 0 {
            return Err(Error::InvalidParameter("path coordinates must be a whole number of points".into()));
        }
        if coords[..dim].iter().any(|&c| c != 0.0) {
            return Err(Error::InvalidParameter("paths start at the origin".into()));
        }
        Ok(Path { dim, coords })
    }

    /// Partial sums of `increments` (one row per step), starting from the origin.
    pub fn from_increments(dim: usize, increments: &[f64]) -> Result<Self> {
        if dim == 0 || increments.len() % dim != 0 {
            return Err(Error::InvalidParameter("increments must be a whole number of steps".into()));
        }
        let steps = increments.len() / dim;
        let mut coords = vec![0.0; (steps + 1) * dim];
        for i in 0..steps {
            for c in 0..dim {
                coords[(i + 1) * dim + c] = coords[i * dim + c] + increments[i * dim + c];
            }
        }
        Ok(Path { dim, coords })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of steps `n`.
    pub fn steps(&self) -> usize {
        self.coords.len() / self.dim - 1
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn dist2(&self, i: usize, j: usize) -> f64 {
        self.point(i).iter().zip(self.point(j)).map(|(a, b)| (a - b) * (a - b)).sum()
    }

    /// `|x_n|²`.
    pub fn end_norm2(&self) -> f64 {
        self.dist2(0, self.steps())
    }

    /// `U_{ij} = 1{|x_j − x_i| ≤ ρ}` (closed ball).
    pub fn close(&self, i: usize, j: usize, rho: f64) -> bool {
        self.dist2(i, j) <= rho * rho
    }
}

/// Close pairs of a path as a symmetric boolean table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Contacts {
    n: usize,
    close: Vec<bool>,
}

impl Contacts {
    pub fn new(path: &Path, rho: f64) -> Self {
        let n = path.steps();
        let mut close = vec![false; (n + 1) * (n + 1)];
        for i in 0..=n {
            for j in i + 1..=n {
                let c = path.close(i, j, rho);
                close[i * (n + 1) + j] = c;
                close[j * (n + 1) + i] = c;
            }
        }
        Contacts { n, close }
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.close[i * (self.n + 1) + j]
    }

    /// Number of close pairs inside `[a, b]`.
    pub fn count(&self, a: usize, b: usize) -> u32 {
        let mut c = 0;
        for i in a..=b {
            for j in i + 1..=b {
                c += u32::from(self.get(i, j));
            }
        }
        c
    }

    /// Close pairs inside `[a, b]` as a mask over the edges of `[0, b − a]`.
    pub fn mask(&self, a: usize, b: usize, index: &EdgeIndex) -> u32 {
        debug_assert_eq!(index.n() as usize, b - a);
        index
            .edges()
            .iter()
            .enumerate()
            .filter(|(_, e)| self.get(a + e.s as usize, a + e.t as usize))
            .fold(0, |m, (i, _)| m | 1 << i)
    }
}

fn check_interval(path: &Path, a: usize, b: usize) -> Result<()> {
    if a > b || b > path.steps() {
        return Err(Error::InvalidParameter(format!("[{a}, {b}] not inside a path of {} steps", path.steps())));
    }
    Ok(())
}

/// `K[a, b] = Π_{a ≤ i < j ≤ b} (1 − λ U_{ij})`; `K[a, a] = 1`.
pub fn k_weight(path: &Path, a: usize, b: usize, lambda: f64, rho: f64) -> Result<f64> {
    check_interval(path, a, b)?;
    let contacts = Contacts::new(path, rho);
    Ok((1.0 - lambda).powi(contacts.count(a, b) as i32))
}

/// `K[a, b]` expanded over every graph on `[a, b]`: `Σ_Γ Π_{st ∈ Γ} (−λ U_{st})`.
pub fn k_weight_expanded(path: &Path, a: usize, b: usize, lambda: f64, rho: f64) -> Result<f64> {
    check_interval(path, a, b)?;
    if b == a {
        return Ok(1.0);
    }
    let index = EdgeIndex::new((b - a) as u32)?;
    if index.edges().len() > 21 {
        return Err(Error::TooLarge("expansion over all graphs limited to n <= 6".into()));
    }
    let u = Contacts::new(path, rho).mask(a, b, &index);
    let mut sum = 0.0;
    for g in 0..1u32 << index.edges().len() {
        if g & !u == 0 {
            sum += (-lambda).powi(g.count_ones() as i32);
        }
    }
    Ok(sum)
}

/// `J[0, n]` by summing `Π (−λ U)` over every connected graph (`n ≤ 6`).
pub fn j_weight_bruteforce(path: &Path, n: usize, lambda: f64, rho: f64) -> Result<f64> {
    check_interval(path, 0, n)?;
    let graphs = ConnectedGraphs::new(n as u32, Exec::Sequential)?;
    Ok(j_bruteforce_with(&graphs, &Contacts::new(path, rho), 0, lambda, Exec::Sequential))
}

/// `J[a, a + n]` from a precomputed connected-graph list.
pub fn j_bruteforce_with(graphs: &ConnectedGraphs, contacts: &Contacts, a: usize, lambda: f64, exec: Exec) -> f64 {
    let n = graphs.index().n() as usize;
    let u = contacts.mask(a, a + n, graphs.index());
    let masks = graphs.masks();
    exec.map_blocks(masks.len(), |range| {
        masks[range]
            .iter()
            .filter(|&&g| g & !u == 0)
            .map(|g| (-lambda).powi(g.count_ones() as i32))
            .sum::<f64>()
    })
    .into_iter()
    .sum()
}

/// `J[0, n] = Σ_{N ≤ N_max} (−λ)^N Σ_{ℓ ∈ L^{(N)}} Π_{st ∈ ℓ} U_{st} Π_{s′t′ ∈ C(ℓ)} (1 − λ U_{s′t′})`.
pub fn j_weight_lace(path: &Path, n: usize, lambda: f64, rho: f64, n_bonds_max: usize) -> Result<f64> {
    check_interval(path, 0, n)?;
    let table = LaceTable::new(n as u32)?;
    Ok(j_lace_with(&table, &Contacts::new(path, rho), 0, lambda, n_bonds_max))
}

/// `J[a, a + n]` from a precomputed lace table, laces with at most `n_bonds_max` bonds.
pub fn j_lace_with(table: &LaceTable, contacts: &Contacts, a: usize, lambda: f64, n_bonds_max: usize) -> f64 {
    let n = table.index().n() as usize;
    let u = contacts.mask(a, a + n, table.index());
    lace_sum(table, u, lambda, n_bonds_max)
}

/// The lace sum for a given close-pair mask.
pub fn lace_sum(table: &LaceTable, u: u32, lambda: f64, n_bonds_max: usize) -> f64 {
    table
        .laces()
        .iter()
        .filter(|l| l.n_bonds <= n_bonds_max && l.lace_mask & !u == 0)
        .map(|l| (-lambda).powi(l.n_bonds as i32) * (1.0 - lambda).powi((l.compatible_mask & u).count_ones() as i32))
        .sum()
}

/// Lace tables for `[0, m]`, `m = 1..=n`, reused across many paths.
#[derive(Debug, Clone)]
pub struct JEvaluator {
    tables: Vec<LaceTable>,
}

impl JEvaluator {
    pub fn new(n: usize) -> Result<Self> {
        let tables = (1..=n as u32).map(LaceTable::new).collect::<Result<_>>()?;
        Ok(JEvaluator { tables })
    }

    pub fn n(&self) -> usize {
        self.tables.len()
    }

    /// `J[a, a + m]`, `1 ≤ m ≤ n`.
    pub fn j(&self, contacts: &Contacts, a: usize, m: usize, lambda: f64) -> f64 {
        j_lace_with(&self.tables[m - 1], contacts, a, lambda, usize::MAX)
    }
}

/// `|K[0,n] − K[1,n] − Σ_{m=1}^{n} J[0,m] K[m,n]| / max(1, |K[0,n]|)`.
pub fn check_recursion_identity(path: &Path, n: usize, lambda: f64, rho: f64) -> Result<f64> {
    check_interval(path, 0, n)?;
    if n == 0 {
        return Err(Error::InvalidParameter("recursion identity needs n >= 1".into()));
    }
    let eval = JEvaluator::new(n)?;
    Ok(recursion_residual_with(&eval, &Contacts::new(path, rho), n, lambda))
}

pub fn recursion_residual_with(eval: &JEvaluator, contacts: &Contacts, n: usize, lambda: f64) -> f64 {
    let k = |a: usize, b: usize| (1.0 - lambda).powi(contacts.count(a, b) as i32);
    let k0 = k(0, n);
    let rhs: f64 = k(1, n) + (1..=n).map(|m| eval.j(contacts, 0, m, lambda) * k(m, n)).sum::<f64>();
    (k0 - rhs).abs() / k0.abs().max(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(points: &[f64]) -> Path {
        Path::new(1, points.to_vec()).unwrap()
    }

    #[test]
    fn k_weight_cases() {
        let p = line(&[0.0, 0.1, 0.2, 0.3]);
        assert_eq!(k_weight(&p, 0, 3, 0.0, 1.0).unwrap(), 1.0);
        assert_eq!(k_weight(&p, 0, 3, 1.0, 1.0).unwrap(), 0.0);
        let q = line(&[0.0, 5.0, 10.0, 10.5]);
        assert!((k_weight(&q, 0, 3, 0.3, 1.0).unwrap() - 0.7).abs() < 1e-15);
    }

    #[test]
    fn small_j_by_hand() {
        let lambda = 0.4;
        let p = line(&[0.0, 0.5, 2.0]);
        // U01 = 1, U12 = 0, U02 = 0
        assert_eq!(j_weight_bruteforce(&p, 1, lambda, 1.0).unwrap(), -lambda);
        assert_eq!(j_weight_bruteforce(&p, 2, lambda, 1.0).unwrap(), 0.0);
        let q = line(&[0.0, 0.5, 0.8]);
        let expect = -lambda * (1.0 - lambda) * (1.0 - lambda);
        assert!((j_weight_bruteforce(&q, 2, lambda, 1.0).unwrap() - expect).abs() < 1e-15);
        assert!((j_weight_lace(&q, 2, lambda, 1.0, 8).unwrap() - expect).abs() < 1e-15);
    }

    #[test]
    fn expansion_equals_product() {
        let p = line(&[0.0, 0.4, -0.3, 1.5, 0.9]);
        for &lambda in &[0.3, 1.0] {
            let direct = k_weight(&p, 0, 4, lambda, 1.0).unwrap();
            let expanded = k_weight_expanded(&p, 0, 4, lambda, 1.0).unwrap();
            assert!((direct - expanded).abs() < 1e-12);
        }
    }

    #[test]
    fn recursion_with_zero_coupling() {
        let p = line(&[0.0, 0.4, -0.3]);
        assert_eq!(check_recursion_identity(&p, 2, 0.0, 1.0).unwrap(), 0.0);
    }
}
