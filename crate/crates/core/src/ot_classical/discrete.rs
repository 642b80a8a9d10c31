use super::network_simplex::{solve_transport, PivotRule};
use super::plan::{CostMatrix, TransportPlan};
use crate::credal_core::{DiscreteDistribution, IndexMap};
use crate::numeric::compensated_sum;
use crate::{Error, Result};

/// Largest `n·m` accepted by [`brute_force_kantorovich`].
pub const BRUTE_FORCE_MAX_CELLS: usize = 9;

/// Largest source size accepted by [`solve_monge_discrete`].
pub const MONGE_MAX_SOURCE_ATOMS: usize = 8;

/// Default tolerance for `T_# p = q` in the Monge enumeration.
pub const PUSHFORWARD_TOLERANCE: f64 = 1e-9;

/// Optimal plan, optimal value, and the number of simplex pivots taken.
#[derive(Debug, Clone, PartialEq)]
pub struct KantorovichSolution {
    pub plan: TransportPlan,
    pub value: f64,
    pub pivots: usize,
}

/// Exact discrete Kantorovich problem `min Σ c_ij π_ij` over couplings of
/// `p` and `q`.
pub fn solve_kantorovich(
    p: &DiscreteDistribution,
    q: &DiscreteDistribution,
    c: &CostMatrix,
) -> Result<(TransportPlan, f64)> {
    let sol = solve_kantorovich_with(p, q, c, PivotRule::default())?;
    Ok((sol.plan, sol.value))
}

/// [`solve_kantorovich`] with an explicit entering-arc rule.
///
/// Zero-mass atoms are dropped before solving and come back as zero rows or
/// columns of the plan.
pub fn solve_kantorovich_with(
    p: &DiscreteDistribution,
    q: &DiscreteDistribution,
    c: &CostMatrix,
    rule: PivotRule,
) -> Result<KantorovichSolution> {
    c.check_dims(p, q)?;
    let rows: Vec<usize> = (0..p.len()).filter(|&i| p.mass()[i] > 0.0).collect();
    let cols: Vec<usize> = (0..q.len()).filter(|&j| q.mass()[j] > 0.0).collect();
    let supply: Vec<f64> = rows.iter().map(|&i| p.mass()[i]).collect();
    let demand: Vec<f64> = cols.iter().map(|&j| q.mass()[j]).collect();
    let reduced_cost: Vec<f64> = rows
        .iter()
        .flat_map(|&i| cols.iter().map(move |&j| c.get(i, j)))
        .collect();
    let sol = solve_transport(&supply, &demand, &reduced_cost, rule)?;

    let m = q.len();
    let mut matrix = vec![0.0; p.len() * m];
    for (a, &i) in rows.iter().enumerate() {
        for (b, &j) in cols.iter().enumerate() {
            matrix[i * m + j] = sol.flow[a * cols.len() + b];
        }
    }
    let plan = TransportPlan::new(matrix, p.clone(), q.clone()).map_err(|e| {
        Error::Internal(format!("network simplex returned an infeasible plan: {e}"))
    })?;
    Ok(KantorovichSolution {
        plan,
        value: sol.cost,
        pivots: sol.pivots,
    })
}

/// Minimum of the linear cost over every basic feasible solution of the
/// transportation polytope.
///
/// Each choice of `n + m - 1` cells that forms a spanning tree of the
/// bipartite row/column graph determines one basic solution by peeling
/// leaves; the feasible ones are the polytope's vertices, and a linear
/// objective attains its minimum at one of them. Shares no code with the
/// network simplex.
pub fn brute_force_kantorovich(
    p: &DiscreteDistribution,
    q: &DiscreteDistribution,
    c: &CostMatrix,
) -> Result<f64> {
    c.check_dims(p, q)?;
    let (n, m) = (p.len(), q.len());
    if n * m > BRUTE_FORCE_MAX_CELLS {
        return Err(Error::size("brute-force cells n*m", n * m, BRUTE_FORCE_MAX_CELLS));
    }
    let basis_size = n + m - 1;
    let cells = n * m;
    let mut best = f64::INFINITY;
    for subset in 0u32..1 << cells {
        if subset.count_ones() as usize != basis_size {
            continue;
        }
        if let Some(x) = basic_solution(p.mass(), q.mass(), subset, n, m) {
            let value = compensated_sum(x.iter().zip(c.data()).map(|(x, c)| x * c));
            best = best.min(value);
        }
    }
    if best.is_finite() {
        Ok(best)
    } else {
        Err(Error::Internal("no vertex of the transportation polytope found".into()))
    }
}

fn basic_solution(p: &[f64], q: &[f64], subset: u32, n: usize, m: usize) -> Option<Vec<f64>> {
    const TOL: f64 = 1e-12;
    let mut row_left = p.to_vec();
    let mut col_left = q.to_vec();
    let mut open: Vec<(usize, usize)> = (0..n * m)
        .filter(|k| subset >> k & 1 == 1)
        .map(|k| (k / m, k % m))
        .collect();
    let mut x = vec![0.0; n * m];
    while !open.is_empty() {
        let leaf = open.iter().position(|&(i, _)| open.iter().filter(|c| c.0 == i).count() == 1);
        let (k, by_row) = match leaf {
            Some(k) => (k, true),
            None => {
                let k = open
                    .iter()
                    .position(|&(_, j)| open.iter().filter(|c| c.1 == j).count() == 1)?;
                (k, false)
            }
        };
        let (i, j) = open.swap_remove(k);
        let amount = if by_row { row_left[i] } else { col_left[j] };
        x[i * m + j] = amount;
        row_left[i] -= amount;
        col_left[j] -= amount;
    }
    let balanced = row_left.iter().chain(&col_left).all(|r| r.abs() <= TOL);
    let nonnegative = x.iter().all(|&v| v >= -TOL);
    (balanced && nonnegative).then_some(x)
}

/// Cheapest total map `T` with `T_# p = q`, by exhaustive search over maps.
///
/// Returns `None` when no map pushes `p` onto `q` (for instance `p` a Dirac
/// mass and `q` not).
pub fn solve_monge_discrete(
    p: &DiscreteDistribution,
    q: &DiscreteDistribution,
    c: &CostMatrix,
) -> Result<Option<(IndexMap, f64)>> {
    solve_monge_discrete_with_tolerance(p, q, c, PUSHFORWARD_TOLERANCE)
}

pub fn solve_monge_discrete_with_tolerance(
    p: &DiscreteDistribution,
    q: &DiscreteDistribution,
    c: &CostMatrix,
    tol: f64,
) -> Result<Option<(IndexMap, f64)>> {
    c.check_dims(p, q)?;
    let n = p.len();
    if n > MONGE_MAX_SOURCE_ATOMS {
        return Err(Error::size("Monge source atoms", n, MONGE_MAX_SOURCE_ATOMS));
    }
    let mut search = MapSearch {
        p: p.mass(),
        c,
        tol,
        remaining: q.mass().to_vec(),
        current: vec![0; n],
        best: None,
    };
    search.descend(0);
    match search.best {
        None => Ok(None),
        Some((assignment, _)) => {
            let map = IndexMap::new(p.space().clone(), q.space().clone(), assignment)?;
            let value = c.map_cost(p, &map)?;
            Ok(Some((map, value)))
        }
    }
}

struct MapSearch<'a> {
    p: &'a [f64],
    c: &'a CostMatrix,
    tol: f64,
    remaining: Vec<f64>,
    current: Vec<usize>,
    best: Option<(Vec<usize>, f64)>,
}

impl MapSearch<'_> {
    fn descend(&mut self, i: usize) {
        if i == self.p.len() {
            if self.remaining.iter().all(|r| r.abs() <= self.tol) {
                let value = compensated_sum(
                    self.current
                        .iter()
                        .enumerate()
                        .map(|(k, &j)| self.p[k] * self.c.get(k, j)),
                );
                if self.best.as_ref().is_none_or(|(_, b)| value < *b) {
                    self.best = Some((self.current.clone(), value));
                }
            }
            return;
        }
        for j in 0..self.remaining.len() {
            // Remaining target mass only shrinks, so an overdrawn atom can
            // never recover.
            if self.remaining[j] - self.p[i] < -self.tol {
                continue;
            }
            self.remaining[j] -= self.p[i];
            self.current[i] = j;
            self.descend(i + 1);
            self.remaining[j] += self.p[i];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::credal_core::FiniteSpace;

    fn dist(m: &[f64]) -> DiscreteDistribution {
        DiscreteDistribution::new(FiniteSpace::indexed("x", m.len()).unwrap(), m.to_vec()).unwrap()
    }

    fn swap_cost() -> CostMatrix {
        CostMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap()
    }

    #[test]
    fn kantorovich_examples() {
        let d = dist(&[0.0, 1.0]);
        let c = CostMatrix::from_rows(&[vec![5.0, 3.0], vec![2.0, 7.0]]).unwrap();
        assert_eq!(solve_kantorovich(&d, &d, &c).unwrap().1, 7.0);

        let u = dist(&[0.5, 0.5]);
        let (plan, value) = solve_kantorovich(&u, &u, &swap_cost()).unwrap();
        assert_eq!(value, 0.0);
        assert_eq!(plan.matrix(), &[0.5, 0.0, 0.0, 0.5]);

        let q = dist(&[0.25, 0.75]);
        let (_, value) = solve_kantorovich(&u, &q, &swap_cost()).unwrap();
        assert!((value - 0.25).abs() < 1e-15);
    }

    #[test]
    fn kantorovich_dimension_mismatch() {
        let u = dist(&[0.5, 0.5]);
        let w = dist(&[0.2, 0.3, 0.5]);
        assert!(matches!(
            solve_kantorovich(&u, &w, &swap_cost()),
            Err(Error::Input(_))
        ));
    }

    /// The 2x2 polytope is the segment π₀₀ ∈ [max(0, p₀+q₀-1), min(p₀, q₀)].
    fn interval_scan(p0: f64, q0: f64, c: &CostMatrix) -> f64 {
        let lo = (p0 + q0 - 1.0).max(0.0);
        let hi = p0.min(q0);
        let at = |a: f64| {
            let x = [a, p0 - a, q0 - a, 1.0 - p0 - q0 + a];
            x.iter().zip(c.data()).map(|(x, c)| x * c).sum::<f64>()
        };
        let steps = 1000;
        (0..=steps)
            .map(|k| at(lo + (hi - lo) * k as f64 / steps as f64))
            .fold(f64::INFINITY, f64::min)
    }

    #[test]
    fn brute_force_matches_interval_scan_on_two_by_two() {
        let p = dist(&[0.5, 0.5]);
        let q = dist(&[0.25, 0.75]);
        let v = brute_force_kantorovich(&p, &q, &swap_cost()).unwrap();
        assert!((v - 0.25).abs() < 1e-15);
        assert!((v - interval_scan(0.5, 0.25, &swap_cost())).abs() < 1e-12);

        let c = CostMatrix::from_rows(&[vec![0.3, 1.7], vec![0.9, 0.2]]).unwrap();
        let p = dist(&[0.35, 0.65]);
        let q = dist(&[0.6, 0.4]);
        let v = brute_force_kantorovich(&p, &q, &c).unwrap();
        assert!((v - interval_scan(0.35, 0.6, &c)).abs() < 1e-12);
        assert!((v - solve_kantorovich(&p, &q, &c).unwrap().1).abs() < 1e-12);
    }

    #[test]
    fn brute_force_bounded_by_product_coupling() {
        let p = dist(&[0.2, 0.3, 0.5]);
        let q = dist(&[0.6, 0.1, 0.3]);
        let c = CostMatrix::from_fn(3, 3, |i, j| ((i * 5 + j * 3) % 7) as f64).unwrap();
        let v = brute_force_kantorovich(&p, &q, &c).unwrap();
        let product = TransportPlan::product(p.clone(), q.clone()).cost(&c).unwrap();
        assert!(v <= product + 1e-12);
        assert!((v - solve_kantorovich(&p, &q, &c).unwrap().1).abs() < 1e-12);
    }

    #[test]
    fn brute_force_size_cap() {
        let p = dist(&[0.25; 4]);
        let q = dist(&[0.5, 0.5, 0.0]);
        let c = CostMatrix::from_fn(4, 3, |_, _| 1.0).unwrap();
        assert!(matches!(
            brute_force_kantorovich(&p, &q, &c),
            Err(Error::Size { .. })
        ));
    }

    #[test]
    fn monge_examples() {
        let delta = dist(&[1.0, 0.0]);
        let u = dist(&[0.5, 0.5]);
        assert_eq!(solve_monge_discrete(&delta, &u, &swap_cost()).unwrap(), None);

        let (t, v) = solve_monge_discrete(&u, &u, &swap_cost()).unwrap().unwrap();
        assert_eq!(t.assignment(), &[0, 1]);
        assert_eq!(v, 0.0);

        let anti = CostMatrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let (t, v) = solve_monge_discrete(&u, &u, &anti).unwrap().unwrap();
        assert_eq!(t.assignment(), &[1, 0]);
        assert_eq!(v, 0.0);
    }

    #[test]
    fn monge_size_cap() {
        let p = dist(&[1.0 / 9.0; 9]);
        let c = CostMatrix::from_fn(9, 9, |_, _| 1.0).unwrap();
        assert!(matches!(
            solve_monge_discrete(&p, &p, &c),
            Err(Error::Size { .. })
        ));
    }

    #[test]
    fn kantorovich_relaxes_monge() {
        let p = dist(&[0.25, 0.25, 0.5]);
        let q = dist(&[0.5, 0.5]);
        let c = CostMatrix::from_rows(&[vec![1.0, 2.0], vec![0.5, 0.1], vec![3.0, 1.0]]).unwrap();
        let (_, monge) = solve_monge_discrete(&p, &q, &c).unwrap().unwrap();
        let (_, lp) = solve_kantorovich(&p, &q, &c).unwrap();
        assert!(lp <= monge + 1e-12);
    }
}
