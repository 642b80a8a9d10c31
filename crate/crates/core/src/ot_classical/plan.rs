use crate::credal_core::{DiscreteDistribution, IndexMap};
use crate::numeric::{check_finite, compensated_sum};
use crate::{Error, Result};

/// Tolerance on the marginals of a transport plan.
pub const MARGINAL_TOLERANCE: f64 = 1e-9;

/// A nonnegative `rows × cols` cost matrix, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CostMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl CostMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::input("cost matrix must be nonempty"));
        }
        if data.len() != rows * cols {
            return Err(Error::input(format!(
                "cost matrix {rows}x{cols} needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        check_finite(&data, "cost matrix")?;
        if let Some(k) = data.iter().position(|&c| c < 0.0) {
            return Err(Error::input(format!(
                "negative cost {} at ({}, {})",
                data[k],
                k / cols,
                k % cols
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::input("cost matrix rows have different lengths"));
        }
        Self::new(r, c, rows.concat())
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> f64) -> Result<Self> {
        let data = (0..rows * cols).map(|k| f(k / cols, k % cols)).collect();
        Self::new(rows, cols, data)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn max(&self) -> f64 {
        self.data.iter().copied().fold(0.0, f64::max)
    }

    /// Entry-wise power, used for `d^p` ground costs.
    pub fn powf(&self, exponent: f64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|c| c.powf(exponent)).collect(),
        }
    }

    pub(crate) fn check_dims(&self, p: &DiscreteDistribution, q: &DiscreteDistribution) -> Result<()> {
        if self.rows != p.len() || self.cols != q.len() {
            return Err(Error::input(format!(
                "cost matrix is {}x{} but marginals have {} and {} atoms",
                self.rows,
                self.cols,
                p.len(),
                q.len()
            )));
        }
        Ok(())
    }

    /// `Σ_x p(x) c(x, T(x))`.
    pub fn map_cost(&self, p: &DiscreteDistribution, map: &IndexMap) -> Result<f64> {
        p.ensure_same_space(map.source(), "map cost")?;
        if self.rows != map.source().len() || self.cols != map.target().len() {
            return Err(Error::input("cost matrix does not match the map spaces"));
        }
        Ok(compensated_sum(
            p.mass()
                .iter()
                .enumerate()
                .map(|(i, w)| w * self.get(i, map.apply(i))),
        ))
    }
}

/// A coupling of two discrete distributions.
#[derive(Debug, Clone, PartialEq)]
pub struct TransportPlan {
    matrix: Vec<f64>,
    source: DiscreteDistribution,
    target: DiscreteDistribution,
}

impl TransportPlan {
    /// Checks nonnegativity and both marginals within [`MARGINAL_TOLERANCE`].
    pub fn new(
        matrix: Vec<f64>,
        source: DiscreteDistribution,
        target: DiscreteDistribution,
    ) -> Result<Self> {
        let (n, m) = (source.len(), target.len());
        if matrix.len() != n * m {
            return Err(Error::input(format!(
                "plan needs {} entries for {n}x{m}, got {}",
                n * m,
                matrix.len()
            )));
        }
        check_finite(&matrix, "plan")?;
        if matrix.iter().any(|&x| x < 0.0) {
            return Err(Error::input("plan has a negative entry"));
        }
        let plan = Self {
            matrix,
            source,
            target,
        };
        let rows = plan.row_sums();
        let cols = plan.col_sums();
        for (i, (r, p)) in rows.iter().zip(plan.source.mass()).enumerate() {
            if (r - p).abs() > MARGINAL_TOLERANCE {
                return Err(Error::input(format!(
                    "plan row {i} sums to {r}, source mass is {p}"
                )));
            }
        }
        for (j, (c, q)) in cols.iter().zip(plan.target.mass()).enumerate() {
            if (c - q).abs() > MARGINAL_TOLERANCE {
                return Err(Error::input(format!(
                    "plan column {j} sums to {c}, target mass is {q}"
                )));
            }
        }
        Ok(plan)
    }

    /// The independent coupling `p ⊗ q`.
    pub fn product(source: DiscreteDistribution, target: DiscreteDistribution) -> Self {
        let matrix = source
            .mass()
            .iter()
            .flat_map(|p| target.mass().iter().map(move |q| p * q))
            .collect();
        Self {
            matrix,
            source,
            target,
        }
    }

    /// The deterministic coupling `p(dx) δ_{T(x)}(dy)`; its target marginal
    /// is `T_# p`.
    pub fn deterministic(source: &DiscreteDistribution, map: &IndexMap) -> Result<Self> {
        source.ensure_same_space(map.source(), "deterministic plan")?;
        let m = map.target().len();
        let mut matrix = vec![0.0; source.len() * m];
        for (i, w) in source.mass().iter().enumerate() {
            matrix[i * m + map.apply(i)] = *w;
        }
        let pushed = map.pushforward_mass(source)?;
        let target = DiscreteDistribution::from_weights(map.target().clone(), pushed)?;
        Ok(Self {
            matrix,
            source: source.clone(),
            target,
        })
    }

    pub fn rows(&self) -> usize {
        self.source.len()
    }

    pub fn cols(&self) -> usize {
        self.target.len()
    }

    pub fn matrix(&self) -> &[f64] {
        &self.matrix
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.matrix[i * self.cols() + j]
    }

    pub fn source(&self) -> &DiscreteDistribution {
        &self.source
    }

    pub fn target(&self) -> &DiscreteDistribution {
        &self.target
    }

    pub fn row_sums(&self) -> Vec<f64> {
        let m = self.cols();
        self.matrix
            .chunks(m)
            .map(|row| compensated_sum(row.iter().copied()))
            .collect()
    }

    pub fn col_sums(&self) -> Vec<f64> {
        let m = self.cols();
        (0..m)
            .map(|j| compensated_sum(self.matrix.iter().skip(j).step_by(m).copied()))
            .collect()
    }

    /// `Σ_ij c_ij π_ij`.
    pub fn cost(&self, c: &CostMatrix) -> Result<f64> {
        c.check_dims(&self.source, &self.target)?;
        Ok(compensated_sum(
            self.matrix.iter().zip(c.data()).map(|(x, c)| x * c),
        ))
    }

    /// The map `i ↦ j` when every row has exactly one positive entry.
    pub fn as_map(&self) -> Option<IndexMap> {
        let m = self.cols();
        let mut assignment = Vec::with_capacity(self.rows());
        for (i, row) in self.matrix.chunks(m).enumerate() {
            let mut support = row.iter().enumerate().filter(|(_, &x)| x > 0.0);
            match (support.next(), support.next()) {
                (Some((j, _)), None) => assignment.push(j),
                // A zero-mass source atom can go anywhere.
                (None, _) if self.source.mass()[i] == 0.0 => assignment.push(0),
                _ => return None,
            }
        }
        IndexMap::new(
            self.source.space().clone(),
            self.target.space().clone(),
            assignment,
        )
        .ok()
    }
}
