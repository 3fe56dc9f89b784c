//! Finite metric spaces, their commutative picture, and the Kantorovich
//! metric on probability measures.
//!
//! A finite metric space `(X, d)` embeds into the representation world
//! through the commutative algebra `C(X) = C^|X|`: the distance functions
//! `d(x, .)` form a generating set `K`, points become representations, and
//! `d_K` between point representations recovers `d` on the nose. On top of
//! that sits the Kantorovich (Wasserstein-1) metric on probability measures,
//! computed two independent ways: a dual linear program over Lipschitz
//! potentials, and a primal transportation simplex used as its oracle.

use std::collections::VecDeque;

use num_complex::Complex64;

use crate::algebra::{diagonal_element, FdAlgebra, GeneratingSet};
use crate::error::{Error, Result};
use crate::linalg::Unitary;
use crate::reps::Representation;
use crate::simplex;

/// Symmetry and triangle defects up to this size are accepted at
/// construction; anything worse is rejected as not a metric.
pub const METRIC_TOLERANCE: f64 = 1e-12;
/// Probability weights must sum to 1 within this.
pub const MASS_TOLERANCE: f64 = 1e-12;
/// Reduced costs below `-MODI_TOLERANCE` trigger a transportation pivot.
const MODI_TOLERANCE: f64 = 1e-11;
/// Marginal perturbation that steers the transportation simplex away from
/// degenerate pivots; the final cost is re-solved on unperturbed marginals.
const MARGINAL_PERTURBATION: f64 = 1e-7;
const MAX_TRANSPORT_PIVOTS: usize = 10_000;

/// A finite metric space: labelled points and a distance matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteMetricSpace {
    points: Vec<String>,
    dist: Vec<f64>,
}

impl FiniteMetricSpace {
    /// Validates that `dist_rows` is a metric: zero diagonal, symmetric and
    /// triangle inequality within `METRIC_TOLERANCE`, positive off-diagonal.
    pub fn new(points: Vec<String>, dist_rows: &[Vec<f64>]) -> Result<Self> {
        let n = points.len();
        if n == 0 {
            return Err(Error::invalid("a metric space needs at least one point"));
        }
        for (i, a) in points.iter().enumerate() {
            if let Some(j) = points[..i].iter().position(|b| b == a) {
                return Err(Error::invalid(format!(
                    "duplicate point label {a:?} at positions {j} and {i}"
                )));
            }
        }
        if dist_rows.len() != n || dist_rows.iter().any(|r| r.len() != n) {
            return Err(Error::invalid(format!(
                "distance matrix must be {n}x{n} to match the point list"
            )));
        }
        let mut dist = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                let d = dist_rows[i][j];
                if !d.is_finite() || d < 0.0 {
                    return Err(Error::invalid(format!(
                        "distance ({i},{j}) = {d} is not a finite nonnegative real"
                    )));
                }
                dist[i * n + j] = d;
            }
        }
        for i in 0..n {
            if dist[i * n + i] != 0.0 {
                return Err(Error::invalid(format!(
                    "distance ({i},{i}) must be exactly zero"
                )));
            }
            for j in 0..n {
                if i != j && dist[i * n + j] == 0.0 {
                    return Err(Error::invalid(format!(
                        "distinct points {i} and {j} are at distance zero"
                    )));
                }
                if (dist[i * n + j] - dist[j * n + i]).abs() > METRIC_TOLERANCE {
                    return Err(Error::invalid(format!(
                        "distance matrix is not symmetric at ({i},{j})"
                    )));
                }
                for k in 0..n {
                    if dist[i * n + j] > dist[i * n + k] + dist[k * n + j] + METRIC_TOLERANCE {
                        return Err(Error::invalid(format!(
                            "triangle inequality fails for points ({i},{j},{k})"
                        )));
                    }
                }
            }
        }
        Ok(FiniteMetricSpace { points, dist })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn points(&self) -> &[String] {
        &self.points
    }

    pub fn label(&self, i: usize) -> &str {
        &self.points[i]
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.points
            .iter()
            .position(|p| p == label)
            .ok_or_else(|| Error::UnknownPoint { label: label.to_string() })
    }

    pub fn dist(&self, i: usize, j: usize) -> f64 {
        let n = self.len();
        assert!(i < n && j < n, "point index out of range");
        self.dist[i * n + j]
    }

    pub fn diameter(&self) -> f64 {
        self.dist.iter().cloned().fold(0.0, f64::max)
    }

    /// The function algebra C(X), one 1-dimensional block per point.
    pub fn algebra(&self) -> FdAlgebra {
        FdAlgebra::commutative(self.len()).expect("point set is nonempty")
    }
}

/// A probability measure on a finite metric space.
#[derive(Debug, Clone, PartialEq)]
pub struct Measure {
    space: FiniteMetricSpace,
    weights: Vec<f64>,
}

impl Measure {
    pub fn new(space: &FiniteMetricSpace, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != space.len() {
            return Err(Error::invalid(format!(
                "expected {} weights, got {}",
                space.len(),
                weights.len()
            )));
        }
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::invalid("weights must be finite and nonnegative"));
        }
        let mass: f64 = weights.iter().sum();
        if (mass - 1.0).abs() > MASS_TOLERANCE {
            return Err(Error::invalid(format!(
                "weights sum to {mass}, not a probability measure"
            )));
        }
        Ok(Measure { space: space.clone(), weights })
    }

    /// The point mass at `label`.
    pub fn dirac(space: &FiniteMetricSpace, label: &str) -> Result<Self> {
        let i = space.index_of(label)?;
        let mut weights = vec![0.0; space.len()];
        weights[i] = 1.0;
        Measure::new(space, weights)
    }

    pub fn space(&self) -> &FiniteMetricSpace {
        &self.space
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

/// The distance functions d(x, .) as a generating set for C(X).
///
/// These |X| functions are Lipschitz-1, [0, diam]-valued, and already attain
/// sup_f |f(x) - f(y)| = d(x, y) at f = d(x, .), so nothing is lost by
/// restricting to them. The returned set carries a generation certificate
/// obtained at word length <= |X|.
pub fn lipschitz_generators(space: &FiniteMetricSpace) -> Result<GeneratingSet> {
    let n = space.len();
    if n < 2 {
        return Err(Error::TooFewPoints { needed: 2, got: n });
    }
    let algebra = space.algebra();
    let mut elements = Vec::with_capacity(n);
    for x in 0..n {
        let row: Vec<Complex64> = (0..n)
            .map(|y| Complex64::new(space.dist(x, y), 0.0))
            .collect();
        elements.push(diagonal_element(&algebra, &row)?);
    }
    let mut set = GeneratingSet::new(algebra, elements)?;
    set.verify(n);
    Ok(set)
}

/// The point evaluation x as a representation of C(X): every f acts as
/// f(x) * I on an ambient space of dimension `ambient_mult`.
pub fn point_rep(
    space: &FiniteMetricSpace,
    label: &str,
    ambient_mult: usize,
) -> Result<Representation> {
    let x = space.index_of(label)?;
    if ambient_mult == 0 {
        return Err(Error::invalid("ambient multiplicity must be positive"));
    }
    let mut multiplicities = vec![0; space.len()];
    multiplicities[x] = ambient_mult;
    Representation::new(space.algebra(), multiplicities, Unitary::identity(ambient_mult))
}

/// Kantorovich distance together with an optimal Lipschitz potential.
#[derive(Debug, Clone)]
pub struct KantorovichResult {
    /// The optimal value of the dual program.
    pub value: f64,
    /// An optimal potential f, feasible for |f(x) - f(y)| <= d(x, y).
    pub potential: Vec<f64>,
}

/// Solves the Kantorovich dual: maximize sum f(x) (mu(x) - nu(x)) over
/// 1-Lipschitz potentials f, as a dense LP with f split into positive parts.
pub fn kantorovich(mu: &Measure, nu: &Measure) -> Result<KantorovichResult> {
    if mu.space != nu.space {
        return Err(Error::SpaceMismatch);
    }
    let n = mu.space.len();
    if n == 1 {
        return Ok(KantorovichResult { value: 0.0, potential: vec![0.0] });
    }

    // Variables p_0..p_{n-1}, q_0..q_{n-1} with f = p - q; both Lipschitz
    // constraints per unordered pair have the nonnegative right side d(x,y),
    // so the slack basis is feasible.
    let mut c = vec![0.0; 2 * n];
    for i in 0..n {
        let w = mu.weights[i] - nu.weights[i];
        c[i] = w;
        c[n + i] = -w;
    }
    let mut rows = Vec::with_capacity(n * (n - 1));
    let mut b = Vec::with_capacity(n * (n - 1));
    for i in 0..n {
        for j in (i + 1)..n {
            let mut row = vec![0.0; 2 * n];
            row[i] = 1.0;
            row[n + i] = -1.0;
            row[j] = -1.0;
            row[n + j] = 1.0;
            let neg: Vec<f64> = row.iter().map(|x| -x).collect();
            rows.push(row);
            rows.push(neg);
            b.push(mu.space.dist(i, j));
            b.push(mu.space.dist(i, j));
        }
    }

    let sol = simplex::maximize(&c, &rows, &b)?;
    let potential: Vec<f64> = (0..n).map(|i| sol.primal[i] - sol.primal[n + i]).collect();
    Ok(KantorovichResult { value: sol.objective.max(0.0), potential })
}

/// Primal transportation cost, solved by a MODI (u-v) transportation
/// simplex that shares no code with the dual LP above.
///
/// Marginals are perturbed by a tiny epsilon to keep pivots nondegenerate;
/// once an optimal basis tree is found, the flows are re-solved exactly on
/// the unperturbed marginals over that tree, so the reported cost carries no
/// trace of the perturbation.
pub fn kantorovich_primal_oracle(mu: &Measure, nu: &Measure) -> Result<f64> {
    if mu.space != nu.space {
        return Err(Error::SpaceMismatch);
    }
    let supply_idx: Vec<usize> = (0..mu.weights.len()).filter(|&i| mu.weights[i] > 0.0).collect();
    let demand_idx: Vec<usize> = (0..nu.weights.len()).filter(|&j| nu.weights[j] > 0.0).collect();
    let m = supply_idx.len();
    let n = demand_idx.len();
    let cost = |i: usize, j: usize| mu.space.dist(supply_idx[i], demand_idx[j]);

    // Perturbed marginals: total extra supply m*eps is matched by extra
    // demand spread as (m*eps/n) per column, keeping the problem balanced.
    let mut supply: Vec<f64> = supply_idx.iter().map(|&i| mu.weights[i] + MARGINAL_PERTURBATION).collect();
    let mut demand: Vec<f64> = demand_idx
        .iter()
        .map(|&j| nu.weights[j] + MARGINAL_PERTURBATION * m as f64 / n as f64)
        .collect();

    // Northwest-corner start: exactly m + n - 1 basic cells.
    let mut basis: Vec<(usize, usize)> = Vec::with_capacity(m + n - 1);
    let mut flow: Vec<f64> = Vec::with_capacity(m + n - 1);
    {
        let (mut i, mut j) = (0, 0);
        loop {
            let t = supply[i].min(demand[j]);
            basis.push((i, j));
            flow.push(t);
            supply[i] -= t;
            demand[j] -= t;
            if i == m - 1 && j == n - 1 {
                break;
            }
            if supply[i] <= demand[j] && i < m - 1 {
                i += 1;
            } else {
                j += 1;
            }
        }
    }

    for _ in 0..MAX_TRANSPORT_PIVOTS {
        // Potentials u, v with u_0 = 0, solved over the basis tree.
        let (u, v) = tree_potentials(m, n, &basis, &cost)?;

        let mut entering: Option<(usize, usize, f64)> = None;
        for i in 0..m {
            for j in 0..n {
                if basis.contains(&(i, j)) {
                    continue;
                }
                let r = cost(i, j) - u[i] - v[j];
                if r < -MODI_TOLERANCE && entering.map_or(true, |(_, _, best)| r < best) {
                    entering = Some((i, j, r));
                }
            }
        }
        let Some((ei, ej, _)) = entering else {
            // Optimal basis: dual feasibility depends only on the tree, so
            // re-solving flows on the unperturbed marginals stays optimal.
            let exact = tree_flows(
                m,
                n,
                &basis,
                &supply_idx.iter().map(|&i| mu.weights[i]).collect::<Vec<_>>(),
                &demand_idx.iter().map(|&j| nu.weights[j]).collect::<Vec<_>>(),
            )?;
            let total: f64 = basis.iter().zip(&exact).map(|(&(i, j), f)| f * cost(i, j)).sum();
            return Ok(total.max(0.0));
        };

        // The basis tree plus the entering cell closes a unique alternating
        // cycle; mass theta moves around it.
        let cycle = alternating_cycle(m, n, &basis, (ei, ej))?;
        let mut theta = f64::INFINITY;
        let mut leave = usize::MAX;
        for (step, &cell) in cycle.iter().enumerate() {
            if step % 2 == 1 {
                let pos = basis.iter().position(|&b| b == cell).expect("cycle uses basis cells");
                if flow[pos] < theta {
                    theta = flow[pos];
                    leave = pos;
                }
            }
        }
        for (step, &cell) in cycle.iter().enumerate() {
            if step == 0 {
                continue;
            }
            let pos = basis.iter().position(|&b| b == cell).expect("cycle uses basis cells");
            if step % 2 == 1 {
                flow[pos] -= theta;
            } else {
                flow[pos] += theta;
            }
        }
        basis[leave] = (ei, ej);
        flow[leave] = theta;
    }

    Err(Error::SolverFailure {
        details: format!("transportation simplex exceeded {MAX_TRANSPORT_PIVOTS} pivots"),
    })
}

/// Dual potentials over a transportation basis tree (u_0 = 0).
fn tree_potentials(
    m: usize,
    n: usize,
    basis: &[(usize, usize)],
    cost: &impl Fn(usize, usize) -> f64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut u = vec![f64::NAN; m];
    let mut v = vec![f64::NAN; n];
    u[0] = 0.0;
    let mut queue = VecDeque::from([0usize]);
    // Nodes 0..m are rows, m..m+n are columns.
    while let Some(node) = queue.pop_front() {
        for &(i, j) in basis {
            if node < m && i == node && v[j].is_nan() {
                v[j] = cost(i, j) - u[i];
                queue.push_back(m + j);
            } else if node >= m && j == node - m && u[i].is_nan() {
                u[i] = cost(i, j) - v[j];
                queue.push_back(i);
            }
        }
    }
    if u.iter().any(|x| x.is_nan()) || v.iter().any(|x| x.is_nan()) {
        return Err(Error::SolverFailure {
            details: "transportation basis does not span all marginals".into(),
        });
    }
    Ok((u, v))
}

/// The unique cycle formed by the basis tree plus `enter`, listed starting
/// at `enter` and alternating row-step / column-step.
fn alternating_cycle(
    m: usize,
    n: usize,
    basis: &[(usize, usize)],
    enter: (usize, usize),
) -> Result<Vec<(usize, usize)>> {
    // Path in the basis tree from the entering cell's column node back to
    // its row node; parents found by BFS over tree edges.
    let nodes = m + n;
    let mut parent = vec![usize::MAX; nodes];
    let mut parent_cell = vec![(usize::MAX, usize::MAX); nodes];
    let start = m + enter.1;
    let goal = enter.0;
    parent[start] = start;
    let mut queue = VecDeque::from([start]);
    while let Some(node) = queue.pop_front() {
        if node == goal {
            break;
        }
        for &(i, j) in basis {
            let (a, b) = (i, m + j);
            let next = if node == a {
                b
            } else if node == b {
                a
            } else {
                continue;
            };
            if parent[next] == usize::MAX {
                parent[next] = node;
                parent_cell[next] = (i, j);
                queue.push_back(next);
            }
        }
    }
    if parent[goal] == usize::MAX {
        return Err(Error::SolverFailure {
            details: "transportation basis is disconnected".into(),
        });
    }
    let mut cells = vec![enter];
    let mut node = goal;
    while node != start {
        cells.push(parent_cell[node]);
        node = parent[node];
    }
    Ok(cells)
}

/// Exact flows on a spanning basis tree for the given marginals, obtained by
/// stripping leaves; flows may be (numerically) zero but the tree determines
/// them uniquely.
fn tree_flows(
    m: usize,
    n: usize,
    basis: &[(usize, usize)],
    supply: &[f64],
    demand: &[f64],
) -> Result<Vec<f64>> {
    let nodes = m + n;
    let mut remaining: Vec<f64> = supply.iter().chain(demand.iter()).cloned().collect();
    let mut degree = vec![0usize; nodes];
    let mut alive = vec![true; basis.len()];
    for &(i, j) in basis {
        degree[i] += 1;
        degree[m + j] += 1;
    }
    let mut flows = vec![0.0; basis.len()];
    let mut queue: VecDeque<usize> = (0..nodes).filter(|&x| degree[x] == 1).collect();
    let mut resolved = 0;
    while let Some(node) = queue.pop_front() {
        let Some(pos) =
            (0..basis.len()).find(|&p| alive[p] && (basis[p].0 == node || m + basis[p].1 == node))
        else {
            continue;
        };
        let (i, j) = basis[pos];
        let f = remaining[node];
        flows[pos] = f;
        let other = if i == node { m + j } else { i };
        remaining[other] -= f;
        remaining[node] = 0.0;
        alive[pos] = false;
        resolved += 1;
        degree[node] -= 1;
        degree[other] -= 1;
        if degree[other] == 1 {
            queue.push_back(other);
        }
    }
    if resolved != basis.len() {
        return Err(Error::SolverFailure {
            details: "transportation basis contains a cycle".into(),
        });
    }
    Ok(flows)
}

/// Pushforward of a measure under a map between point sets; `map[i]` is the
/// target index of source point `i`.
pub fn pushforward(mu: &Measure, map: &[usize], target: &FiniteMetricSpace) -> Result<Measure> {
    if map.len() != mu.space.len() {
        return Err(Error::invalid(format!(
            "map covers {} points but the source has {}",
            map.len(),
            mu.space.len()
        )));
    }
    let mut weights = vec![0.0; target.len()];
    for (i, &j) in map.iter().enumerate() {
        if j >= target.len() {
            return Err(Error::IndexOutOfRange { index: j, dim: target.len() });
        }
        weights[j] += mu.weights[i];
    }
    Measure::new(target, weights)
}
