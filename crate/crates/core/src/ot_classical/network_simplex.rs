//! Primal network simplex for the balanced transportation problem.
//!
//! The graph has one node per source atom, one per target atom, and an
//! artificial root joined to every node. The initial basis routes all supply
//! through the root over artificial arcs priced at a big-M cost, so it is
//! feasible and strongly feasible (every tree arc carries positive flow when
//! all marginal masses are positive). Leaving arcs are chosen by the
//! strongly-feasible-tree rule, which rules out cycling under any entering
//! rule.
//!
//! Tree bookkeeping is parent pointers, depths and node potentials. After a
//! pivot only the subtree cut off by the leaving arc is re-hung and
//! re-priced.

use crate::numeric::compensated_sum;
use crate::{Error, Result};

/// How the entering arc is picked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PivotRule {
    /// Scan arcs in blocks of about `sqrt(arcs)` and take the most negative
    /// reduced cost of the first block that has one.
    #[default]
    BlockSearch,
    /// Bland's entering rule: the lowest-index arc with negative reduced cost.
    FirstEligible,
}

#[derive(Debug, Clone)]
pub(crate) struct FlowSolution {
    /// Row-major `n × m` flows.
    pub flow: Vec<f64>,
    pub cost: f64,
    pub pivots: usize,
}

const NONE: usize = usize::MAX;

struct Simplex<'a> {
    n: usize,
    m: usize,
    cost: &'a [f64],
    art_cost: f64,
    flow: Vec<f64>,
    in_tree: Vec<bool>,
    parent: Vec<usize>,
    pred: Vec<usize>,
    depth: Vec<usize>,
    pi: Vec<f64>,
    tree_adj: Vec<Vec<usize>>,
    tol: f64,
    next_arc: usize,
    block: usize,
}

impl<'a> Simplex<'a> {
    fn real_arcs(&self) -> usize {
        self.n * self.m
    }

    fn root(&self) -> usize {
        self.n + self.m
    }

    fn source(&self, arc: usize) -> usize {
        let nm = self.real_arcs();
        if arc < nm {
            arc / self.m
        } else {
            let u = arc - nm;
            if u < self.n {
                u
            } else {
                self.root()
            }
        }
    }

    fn target(&self, arc: usize) -> usize {
        let nm = self.real_arcs();
        if arc < nm {
            self.n + arc % self.m
        } else {
            let u = arc - nm;
            if u < self.n {
                self.root()
            } else {
                u
            }
        }
    }

    fn arc_cost(&self, arc: usize) -> f64 {
        let nm = self.real_arcs();
        if arc < nm {
            self.cost[arc]
        } else if arc - nm < self.n {
            0.0
        } else {
            self.art_cost
        }
    }

    fn reduced_cost(&self, arc: usize) -> f64 {
        let i = arc / self.m;
        let j = self.n + arc % self.m;
        self.cost[arc] + self.pi[i] - self.pi[j]
    }

    fn new(supply: &'a [f64], demand: &'a [f64], cost: &'a [f64]) -> Self {
        let n = supply.len();
        let m = demand.len();
        let nodes = n + m + 1;
        let root = n + m;
        let max_cost = cost.iter().copied().fold(0.0_f64, f64::max);
        let art_cost = (max_cost + 1.0) * nodes as f64;
        let arcs = n * m + n + m;
        let mut s = Simplex {
            n,
            m,
            cost,
            art_cost,
            flow: vec![0.0; arcs],
            in_tree: vec![false; arcs],
            parent: vec![NONE; nodes],
            pred: vec![NONE; nodes],
            depth: vec![0; nodes],
            pi: vec![0.0; nodes],
            tree_adj: vec![Vec::new(); nodes],
            tol: 1e-12 * (max_cost + 1.0) * (nodes as f64).sqrt(),
            next_arc: 0,
            block: ((n * m) as f64).sqrt().ceil().max(10.0) as usize,
        };
        for u in 0..n + m {
            let arc = n * m + u;
            s.parent[u] = root;
            s.pred[u] = arc;
            s.depth[u] = 1;
            s.in_tree[arc] = true;
            s.tree_adj[u].push(arc);
            s.tree_adj[root].push(arc);
            if u < n {
                s.flow[arc] = supply[u];
                s.pi[u] = 0.0;
            } else {
                s.flow[arc] = demand[u - n];
                s.pi[u] = art_cost;
            }
        }
        s
    }

    fn find_entering(&mut self, rule: PivotRule) -> Option<usize> {
        let arcs = self.real_arcs();
        match rule {
            PivotRule::FirstEligible => {
                (0..arcs).find(|&a| !self.in_tree[a] && self.reduced_cost(a) < -self.tol)
            }
            PivotRule::BlockSearch => {
                let mut best = NONE;
                let mut best_rc = -self.tol;
                let mut scanned_in_block = 0;
                let mut a = self.next_arc;
                for _ in 0..arcs {
                    if !self.in_tree[a] {
                        let rc = self.reduced_cost(a);
                        if rc < best_rc {
                            best_rc = rc;
                            best = a;
                        }
                    }
                    a += 1;
                    if a == arcs {
                        a = 0;
                    }
                    scanned_in_block += 1;
                    if scanned_in_block == self.block {
                        if best != NONE {
                            self.next_arc = a;
                            return Some(best);
                        }
                        scanned_in_block = 0;
                    }
                }
                if best != NONE {
                    self.next_arc = a;
                    Some(best)
                } else {
                    None
                }
            }
        }
    }

    fn pivot(&mut self, entering: usize) -> Result<()> {
        let first = self.source(entering);
        let second = self.target(entering);

        let (mut u, mut v) = (first, second);
        while u != v {
            if self.depth[u] > self.depth[v] {
                u = self.parent[u];
            } else if self.depth[v] > self.depth[u] {
                v = self.parent[v];
            } else {
                u = self.parent[u];
                v = self.parent[v];
            }
        }
        let join = u;

        // Flow goes join -> ... -> first -> second -> ... -> join. Among
        // blocking arcs take the last one met in that orientation.
        let mut delta = f64::INFINITY;
        let mut u_out = NONE;
        let mut on_first_side = true;
        let mut u = first;
        while u != join {
            let a = self.pred[u];
            if self.source(a) == u {
                let d = self.flow[a];
                if d < delta {
                    delta = d;
                    u_out = u;
                }
            }
            u = self.parent[u];
        }
        let mut u = second;
        while u != join {
            let a = self.pred[u];
            if self.target(a) == u {
                let d = self.flow[a];
                if d <= delta {
                    delta = d;
                    u_out = u;
                    on_first_side = false;
                }
            }
            u = self.parent[u];
        }
        if u_out == NONE {
            return Err(Error::Internal(
                "transport cycle has no blocking arc (unbounded)".into(),
            ));
        }

        if delta > 0.0 {
            self.flow[entering] += delta;
            let mut u = first;
            while u != join {
                let a = self.pred[u];
                if self.source(a) == u {
                    self.flow[a] -= delta;
                } else {
                    self.flow[a] += delta;
                }
                u = self.parent[u];
            }
            let mut u = second;
            while u != join {
                let a = self.pred[u];
                if self.source(a) == u {
                    self.flow[a] += delta;
                } else {
                    self.flow[a] -= delta;
                }
                u = self.parent[u];
            }
        }
        let leaving = self.pred[u_out];
        self.flow[leaving] = 0.0;

        let (u_in, v_in) = if on_first_side {
            (first, second)
        } else {
            (second, first)
        };

        let old_parent = self.parent[u_out];
        self.tree_adj[u_out].retain(|&a| a != leaving);
        self.tree_adj[old_parent].retain(|&a| a != leaving);
        self.in_tree[leaving] = false;
        self.tree_adj[first].push(entering);
        self.tree_adj[second].push(entering);
        self.in_tree[entering] = true;

        self.rehang(u_in, v_in, entering);
        Ok(())
    }

    /// Re-roots the detached subtree containing `u_in` below `v_in`.
    fn rehang(&mut self, u_in: usize, v_in: usize, via: usize) {
        let mut stack = vec![(u_in, v_in, via)];
        while let Some((node, par, arc)) = stack.pop() {
            self.parent[node] = par;
            self.pred[node] = arc;
            self.depth[node] = self.depth[par] + 1;
            let c = self.arc_cost(arc);
            self.pi[node] = if self.source(arc) == node {
                self.pi[par] - c
            } else {
                self.pi[par] + c
            };
            for &a in &self.tree_adj[node] {
                if a == arc {
                    continue;
                }
                let other = if self.source(a) == node {
                    self.target(a)
                } else {
                    self.source(a)
                };
                stack.push((other, node, a));
            }
        }
    }
}

/// Solves `min Σ c_ij x_ij` subject to row sums `supply`, column sums
/// `demand`, `x ≥ 0`. All masses must be strictly positive and the totals
/// equal up to rounding.
pub(crate) fn solve_transport(
    supply: &[f64],
    demand: &[f64],
    cost: &[f64],
    rule: PivotRule,
) -> Result<FlowSolution> {
    let n = supply.len();
    let m = demand.len();
    debug_assert_eq!(cost.len(), n * m);
    debug_assert!(supply.iter().chain(demand).all(|&x| x > 0.0));
    let mut s = Simplex::new(supply, demand, cost);
    let max_pivots = 50 * (n * m) + 10_000;
    let mut pivots = 0;
    while let Some(entering) = s.find_entering(rule) {
        s.pivot(entering)?;
        pivots += 1;
        if pivots > max_pivots {
            return Err(Error::Internal(format!(
                "network simplex exceeded {max_pivots} pivots"
            )));
        }
    }
    let nm = n * m;
    let residual = s.flow[nm..].iter().copied().fold(0.0_f64, f64::max);
    if residual > 1e-9 {
        return Err(Error::Internal(format!(
            "artificial arcs still carry flow {residual}; marginals are infeasible"
        )));
    }
    let flow: Vec<f64> = s.flow[..nm].to_vec();
    let cost_value = compensated_sum(flow.iter().zip(cost).map(|(x, c)| x * c));
    Ok(FlowSolution {
        flow,
        cost: cost_value,
        pivots,
    })
}
