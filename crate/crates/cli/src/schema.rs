//! JSON input documents, one per subcommand.

use credal_ot::{
    Continuous1d, CostMatrix, DiscreteDistribution, EpsContamination, FiniteSpace,
};
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DistributionDoc {
    pub space: Vec<String>,
    pub mass: Vec<f64>,
}

impl DistributionDoc {
    pub fn to_core(&self) -> CliResult<DiscreteDistribution> {
        let space = FiniteSpace::new(self.space.iter().cloned())?;
        Ok(DiscreteDistribution::new(space, self.mass.clone())?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContaminationDoc {
    pub base: DistributionDoc,
    pub epsilon: f64,
}

impl ContaminationDoc {
    pub fn to_core(&self, epsilon: Option<f64>) -> CliResult<EpsContamination> {
        Ok(EpsContamination::new(
            self.base.to_core()?,
            epsilon.unwrap_or(self.epsilon),
        )?)
    }
}

/// Either a plain distribution or an ε-contamination of one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MeasureDoc {
    Contamination(ContaminationDoc),
    Distribution(DistributionDoc),
}

impl MeasureDoc {
    pub fn base(&self) -> CliResult<DiscreteDistribution> {
        match self {
            MeasureDoc::Contamination(c) => c.base.to_core(),
            MeasureDoc::Distribution(d) => d.to_core(),
        }
    }

    pub fn epsilon(&self) -> Option<f64> {
        match self {
            MeasureDoc::Contamination(c) => Some(c.epsilon),
            MeasureDoc::Distribution(_) => None,
        }
    }
}

/// A dense matrix as `{"rows": n, "cols": m, "data": [[...], ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixDoc {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Vec<f64>>,
}

impl MatrixDoc {
    pub fn flat(&self, what: &str) -> CliResult<Vec<f64>> {
        if self.data.len() != self.rows || self.data.iter().any(|r| r.len() != self.cols) {
            return Err(CliError::input(format!(
                "{what}: data does not have the declared shape {}x{}",
                self.rows, self.cols
            )));
        }
        Ok(self.data.concat())
    }

    pub fn to_cost(&self, what: &str) -> CliResult<CostMatrix> {
        Ok(CostMatrix::new(self.rows, self.cols, self.flat(what)?)?)
    }

    pub fn from_flat(rows: usize, cols: usize, flat: &[f64]) -> Self {
        Self {
            rows,
            cols,
            data: flat.chunks(cols.max(1)).map(<[f64]>::to_vec).collect(),
        }
    }
}

/// Source, target, cost and an optional shared ε.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairDoc {
    pub p: MeasureDoc,
    pub q: MeasureDoc,
    pub cost: MatrixDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
}

/// Contamination levels of the two endpoints. A command line value beats
/// the document's top-level `epsilon`, which beats per-side values; plain
/// distributions default to 0.
pub fn resolve_epsilons(
    flag: Option<f64>,
    top: Option<f64>,
    p: &MeasureDoc,
    q: &MeasureDoc,
) -> (f64, f64) {
    match flag.or(top) {
        Some(e) => (e, e),
        None => (p.epsilon().unwrap_or(0.0), q.epsilon().unwrap_or(0.0)),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EnvelopeDoc {
    #[default]
    Incoherent,
    Coherent,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChoquetMethod {
    #[default]
    Sorted,
    Riemann,
    CoherentBound,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChoquetDoc {
    pub contamination: ContaminationDoc,
    pub values: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub envelope: Option<EnvelopeDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub method: Option<ChoquetMethod>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub step: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", content = "params", rename_all = "lowercase")]
pub enum ContinuousDoc {
    Uniform { low: f64, high: f64 },
    Normal { mean: f64, std: f64 },
    Piecewise { x: Vec<f64>, cdf: Vec<f64> },
}

impl ContinuousDoc {
    pub fn to_core(&self) -> CliResult<Continuous1d> {
        Ok(match self {
            ContinuousDoc::Uniform { low, high } => Continuous1d::uniform(*low, *high)?,
            ContinuousDoc::Normal { mean, std } => Continuous1d::normal(*mean, *std)?,
            ContinuousDoc::Piecewise { x, cdf } => Continuous1d::piecewise(x.clone(), cdf.clone())?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridDoc {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

impl GridDoc {
    pub fn points(&self) -> CliResult<Vec<f64>> {
        if self.points < 2 || !(self.start < self.stop) {
            return Err(CliError::input("grid needs start < stop and at least 2 points"));
        }
        let h = (self.stop - self.start) / (self.points - 1) as f64;
        Ok((0..self.points)
            .map(|i| {
                if i + 1 == self.points {
                    self.stop
                } else {
                    self.start + h * i as f64
                }
            })
            .collect())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Monge1dDoc {
    pub source: ContinuousDoc,
    pub target: ContinuousDoc,
    pub grid: GridDoc,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaussianDoc {
    pub sigma_p: Vec<Vec<f64>>,
    pub sigma_q: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<Vec<Vec<f64>>>,
    pub dim: usize,
}

pub fn square_matrix(rows: &[Vec<f64>], dim: usize, what: &str) -> CliResult<DMatrix<f64>> {
    if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
        return Err(CliError::input(format!("{what} must be {dim}x{dim}")));
    }
    Ok(DMatrix::from_row_iterator(dim, dim, rows.iter().flatten().copied()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConditionRule {
    #[default]
    Geometric,
    Gbc,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConditionDoc {
    /// Joint masses; the marginals are its row and column sums.
    pub plan: MatrixDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    pub source_event: Vec<usize>,
    pub target_event: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rule: Option<ConditionRule>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WassersteinDoc {
    pub p: MeasureDoc,
    pub q: MeasureDoc,
    pub distance: MatrixDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn measure_is_untagged() {
        let d: MeasureDoc = serde_json::from_str(r#"{"space":["a"],"mass":[1.0]}"#).unwrap();
        assert!(matches!(d, MeasureDoc::Distribution(_)));
        let c: MeasureDoc =
            serde_json::from_str(r#"{"base":{"space":["a"],"mass":[1.0]},"epsilon":0.1}"#).unwrap();
        assert_eq!(c.epsilon(), Some(0.1));
        assert!(serde_json::from_str::<MeasureDoc>(r#"{"space":["a"],"mass":[1.0],"x":1}"#).is_err());
    }

    #[test]
    fn epsilon_priority() {
        let c = |e| MeasureDoc::Contamination(ContaminationDoc {
            base: DistributionDoc { space: vec!["a".into()], mass: vec![1.0] },
            epsilon: e,
        });
        let d = MeasureDoc::Distribution(DistributionDoc { space: vec!["a".into()], mass: vec![1.0] });
        assert_eq!(resolve_epsilons(None, None, &c(0.1), &d), (0.1, 0.0));
        assert_eq!(resolve_epsilons(None, Some(0.3), &c(0.1), &c(0.2)), (0.3, 0.3));
        assert_eq!(resolve_epsilons(Some(0.4), Some(0.3), &c(0.1), &c(0.2)), (0.4, 0.4));
    }

    #[test]
    fn continuous_is_adjacently_tagged() {
        let d: ContinuousDoc =
            serde_json::from_str(r#"{"family":"normal","params":{"mean":1.0,"std":2.0}}"#).unwrap();
        assert_eq!(d, ContinuousDoc::Normal { mean: 1.0, std: 2.0 });
    }

    #[test]
    fn matrix_shape_checked() {
        let m = MatrixDoc { rows: 2, cols: 2, data: vec![vec![0.0, 1.0], vec![1.0]] };
        assert!(m.flat("cost").is_err());
        let grid = GridDoc { start: 0.0, stop: 1.0, points: 3 }.points().unwrap();
        assert_eq!(grid, vec![0.0, 0.5, 1.0]);
    }
}
