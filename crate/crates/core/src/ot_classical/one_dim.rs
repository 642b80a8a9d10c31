//! Atomless distributions on the line and the monotone transport map
//! `T = F_Q^{-1} ∘ F_P`.

use statrs::distribution::{Continuous, ContinuousCDF, Normal};

use crate::credal_core::LineDistribution;
use crate::numeric::check_finite;
use crate::{Error, Result};

/// An atomless distribution on ℝ with a closed-form cdf and quantile.
#[derive(Debug, Clone, PartialEq)]
pub enum Continuous1d {
    Uniform { low: f64, high: f64 },
    Normal { mean: f64, std: f64 },
    /// Continuous piecewise-linear cdf through `(x[k], cdf[k])`, with
    /// `cdf[0] = 0` and `cdf[last] = 1`.
    Piecewise { x: Vec<f64>, cdf: Vec<f64> },
}

impl Continuous1d {
    pub fn uniform(low: f64, high: f64) -> Result<Self> {
        let d = Self::Uniform { low, high };
        d.validate()?;
        Ok(d)
    }

    pub fn normal(mean: f64, std: f64) -> Result<Self> {
        let d = Self::Normal { mean, std };
        d.validate()?;
        Ok(d)
    }

    pub fn piecewise(x: Vec<f64>, cdf: Vec<f64>) -> Result<Self> {
        let d = Self::Piecewise { x, cdf };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Uniform { low, high } => {
                check_finite(&[*low, *high], "uniform bounds")?;
                if low >= high {
                    return Err(Error::input(format!("uniform needs low < high, got [{low}, {high}]")));
                }
            }
            Self::Normal { mean, std } => {
                check_finite(&[*mean, *std], "normal parameters")?;
                if *std <= 0.0 {
                    return Err(Error::input(format!("normal std must be positive, got {std}")));
                }
            }
            Self::Piecewise { x, cdf } => {
                check_finite(x, "piecewise knots")?;
                check_finite(cdf, "piecewise cdf")?;
                if x.len() < 2 || x.len() != cdf.len() {
                    return Err(Error::input(
                        "piecewise cdf needs at least two knots and one cdf value per knot",
                    ));
                }
                if x.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(Error::input("piecewise knots must be strictly increasing"));
                }
                if cdf.windows(2).any(|w| w[0] > w[1]) {
                    return Err(Error::input("piecewise cdf must be nondecreasing"));
                }
                if cdf[0] != 0.0 || cdf[cdf.len() - 1] != 1.0 {
                    return Err(Error::input("piecewise cdf must run from 0 to 1"));
                }
            }
        }
        Ok(())
    }

    /// Smallest and largest points of the support, possibly infinite.
    pub fn support(&self) -> (f64, f64) {
        match self {
            Self::Uniform { low, high } => (*low, *high),
            Self::Normal { .. } => (f64::NEG_INFINITY, f64::INFINITY),
            Self::Piecewise { x, .. } => (x[0], x[x.len() - 1]),
        }
    }

    fn standard_normal() -> Normal {
        Normal::new(0.0, 1.0).expect("standard normal")
    }

    pub fn cdf(&self, at: f64) -> f64 {
        match self {
            Self::Uniform { low, high } => ((at - low) / (high - low)).clamp(0.0, 1.0),
            Self::Normal { mean, std } => Self::standard_normal().cdf((at - mean) / std),
            Self::Piecewise { x, cdf } => piecewise_eval(x, cdf, at),
        }
    }

    /// Survival function `1 - F(x)`, computed without cancellation where a
    /// closed form allows.
    pub fn sf(&self, at: f64) -> f64 {
        match self {
            Self::Uniform { low, high } => ((high - at) / (high - low)).clamp(0.0, 1.0),
            Self::Normal { mean, std } => Self::standard_normal().sf((at - mean) / std),
            Self::Piecewise { .. } => 1.0 - self.cdf(at),
        }
    }

    /// `inf{x : F(x) ≥ u}`.
    pub fn quantile(&self, u: f64) -> Result<f64> {
        check_level(u)?;
        Ok(match self {
            Self::Uniform { low, high } => low + u * (high - low),
            Self::Normal { mean, std } => mean + std * std_normal_quantile(u),
            Self::Piecewise { x, cdf } => piecewise_inverse(x, cdf, u),
        })
    }

    /// The quantile at level `1 - s`, taken from the upper tail.
    pub fn upper_quantile(&self, s: f64) -> Result<f64> {
        check_level(s)?;
        Ok(match self {
            Self::Uniform { low, high } => high - s * (high - low),
            Self::Normal { mean, std } => mean - std * std_normal_quantile(s),
            Self::Piecewise { x, cdf } => piecewise_inverse(x, cdf, 1.0 - s),
        })
    }

    /// Discretizes on `k` equal bins of `[low, high]`: atoms at the bin
    /// midpoints, masses the bin probabilities, tail mass folded into the
    /// end bins.
    pub fn discretize(&self, k: usize, low: f64, high: f64) -> Result<LineDistribution> {
        if k == 0 || !(low < high) {
            return Err(Error::input("discretization needs k ≥ 1 bins and low < high"));
        }
        let width = (high - low) / k as f64;
        let edges: Vec<f64> = (0..=k).map(|i| low + width * i as f64).collect();
        let mut mass: Vec<f64> = edges.windows(2).map(|w| self.cdf(w[1]) - self.cdf(w[0])).collect();
        mass[0] += self.cdf(low);
        mass[k - 1] += self.sf(high);
        let total: f64 = mass.iter().sum();
        let mass = mass.into_iter().map(|m| m.max(0.0) / total).collect();
        let positions = edges.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
        LineDistribution::new(positions, mass)
    }
}

/// Standard normal quantile, polished by two Newton steps on the cdf.
fn std_normal_quantile(u: f64) -> f64 {
    if u <= 0.0 || u >= 1.0 {
        return if u <= 0.0 { f64::NEG_INFINITY } else { f64::INFINITY };
    }
    let n = Continuous1d::standard_normal();
    let mut z = n.inverse_cdf(u);
    for _ in 0..2 {
        let density = n.pdf(z);
        if density <= 0.0 {
            break;
        }
        let resid = if z <= 0.0 { n.cdf(z) - u } else { (1.0 - u) - n.sf(z) };
        z -= resid / density;
    }
    z
}

fn check_level(u: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&u) {
        return Err(Error::input(format!("probability level {u} outside [0,1]")));
    }
    Ok(())
}

fn piecewise_eval(x: &[f64], cdf: &[f64], at: f64) -> f64 {
    if at <= x[0] {
        return 0.0;
    }
    if at >= x[x.len() - 1] {
        return 1.0;
    }
    let k = x.partition_point(|&v| v <= at);
    let (x0, x1, c0, c1) = (x[k - 1], x[k], cdf[k - 1], cdf[k]);
    c0 + (c1 - c0) * (at - x0) / (x1 - x0)
}

fn piecewise_inverse(x: &[f64], cdf: &[f64], u: f64) -> f64 {
    // First knot with cdf ≥ u; the answer lies on the segment ending there.
    let k = cdf.partition_point(|&c| c < u);
    if k == 0 {
        return x[0];
    }
    let (x0, x1, c0, c1) = (x[k - 1], x[k], cdf[k - 1], cdf[k]);
    x0 + (x1 - x0) * (u - c0) / (c1 - c0)
}

/// `T(x) = F_Q^{-1}(F_P(x))`, the monotone map pushing `p` onto `q`.
///
/// Uses the upper tail above the median of `p` so that far-tail points
/// keep their accuracy.
pub fn monge_map_1d(p: &Continuous1d, q: &Continuous1d, x: f64) -> Result<f64> {
    let (lo, hi) = p.support();
    if !x.is_finite() || x < lo || x > hi {
        return Err(Error::input(format!(
            "point {x} outside the source support [{lo}, {hi}]"
        )));
    }
    let u = p.cdf(x);
    if u <= 0.5 {
        q.quantile(u)
    } else {
        q.upper_quantile(p.sf(x))
    }
}
