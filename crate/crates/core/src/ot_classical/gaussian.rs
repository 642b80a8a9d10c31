//! Closed-form transport between centred Gaussians.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::{Error, Result};

const SYMMETRY_TOLERANCE: f64 = 1e-10;
const SINGULAR_TOLERANCE: f64 = 1e-12;

/// Source and target covariances plus the invertible matrix `A` of the
/// bilinear cost.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianPair {
    sigma_p: DMatrix<f64>,
    sigma_q: DMatrix<f64>,
    a: DMatrix<f64>,
}

impl GaussianPair {
    pub fn new(sigma_p: DMatrix<f64>, sigma_q: DMatrix<f64>, a: DMatrix<f64>) -> Result<Self> {
        let d = sigma_p.nrows();
        if d == 0 {
            return Err(Error::input("dimension must be at least 1"));
        }
        for (name, m) in [("sigma_p", &sigma_p), ("sigma_q", &sigma_q), ("a", &a)] {
            if m.nrows() != d || m.ncols() != d {
                return Err(Error::input(format!("{name} must be {d}x{d}")));
            }
            if m.iter().any(|v| !v.is_finite()) {
                return Err(Error::input(format!("{name} has a non-finite entry")));
            }
        }
        check_spd(&sigma_p, "sigma_p")?;
        check_spd(&sigma_q, "sigma_q")?;
        let det = a.determinant();
        if det.abs() <= SINGULAR_TOLERANCE {
            return Err(Error::input(format!("a is singular (det = {det})")));
        }
        Ok(Self {
            sigma_p,
            sigma_q,
            a,
        })
    }

    /// `A = I`, the squared-Euclidean case.
    pub fn euclidean(sigma_p: DMatrix<f64>, sigma_q: DMatrix<f64>) -> Result<Self> {
        let d = sigma_p.nrows();
        Self::new(sigma_p, sigma_q, DMatrix::identity(d, d))
    }

    pub fn dim(&self) -> usize {
        self.sigma_p.nrows()
    }

    pub fn sigma_p(&self) -> &DMatrix<f64> {
        &self.sigma_p
    }

    pub fn sigma_q(&self) -> &DMatrix<f64> {
        &self.sigma_q
    }

    pub fn a(&self) -> &DMatrix<f64> {
        &self.a
    }
}

fn check_spd(m: &DMatrix<f64>, name: &str) -> Result<()> {
    if !m.is_square() {
        return Err(Error::input(format!("{name} is not square")));
    }
    let asym = (m - m.transpose()).amax();
    if asym > SYMMETRY_TOLERANCE {
        return Err(Error::input(format!(
            "{name} is not symmetric (max asymmetry {asym:e})"
        )));
    }
    let eig = SymmetricEigen::new(symmetrize(m));
    let min = eig.eigenvalues.min();
    if !(min > 0.0) {
        return Err(Error::input(format!(
            "{name} is not positive definite (min eigenvalue {min:e})"
        )));
    }
    Ok(())
}

fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

fn spectral_power(m: &DMatrix<f64>, power: f64) -> DMatrix<f64> {
    let eig = SymmetricEigen::new(symmetrize(m));
    let scaled = DVector::from_iterator(
        eig.eigenvalues.len(),
        eig.eigenvalues.iter().map(|l| l.max(0.0).powf(power)),
    );
    let v = &eig.eigenvectors;
    symmetrize(&(v * DMatrix::from_diagonal(&scaled) * v.transpose()))
}

/// Symmetric square root of an SPD matrix via its eigendecomposition.
pub fn matrix_sqrt_spd(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    check_spd(m, "matrix")?;
    Ok(spectral_power(m, 0.5))
}

/// Inverse square root of an SPD matrix.
pub fn matrix_inv_sqrt_spd(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    check_spd(m, "matrix")?;
    Ok(spectral_power(m, -0.5))
}

/// Matrix of the linear transport map
/// `T = (Aᵀ)⁻¹ Σ_P^{-1/2} (Σ_P^{1/2} Aᵀ Σ_Q A Σ_P^{1/2})^{1/2} Σ_P^{-1/2}`,
/// which satisfies `T Σ_P Tᵀ = Σ_Q`.
pub fn gaussian_monge_map(g: &GaussianPair) -> Result<DMatrix<f64>> {
    let root_p = matrix_sqrt_spd(&g.sigma_p)?;
    let inv_root_p = matrix_inv_sqrt_spd(&g.sigma_p)?;
    let inner = symmetrize(&(&root_p * g.a.transpose() * &g.sigma_q * &g.a * &root_p));
    let middle = matrix_sqrt_spd(&inner)?;
    let a_t_inv = g
        .a
        .transpose()
        .try_inverse()
        .ok_or_else(|| Error::input("a is not invertible"))?;
    Ok(a_t_inv * (&inv_root_p * middle * &inv_root_p))
}

/// `W₂²(𝒩(0, Σ_P), 𝒩(0, Σ_Q)) = tr Σ_P + tr Σ_Q − 2 tr (Σ_P^{1/2} Σ_Q Σ_P^{1/2})^{1/2}`.
pub fn gaussian_w2_squared(sigma_p: &DMatrix<f64>, sigma_q: &DMatrix<f64>) -> Result<f64> {
    let root_p = matrix_sqrt_spd(sigma_p)?;
    check_spd(sigma_q, "sigma_q")?;
    let cross = matrix_sqrt_spd(&symmetrize(&(&root_p * sigma_q * &root_p)))?;
    Ok((sigma_p.trace() + sigma_q.trace() - 2.0 * cross.trace()).max(0.0))
}

/// Grid discretization of `𝒩(0, Σ)` in two dimensions.
///
/// `per_axis` points per coordinate spread over `±half_width` standard
/// deviations, mass proportional to the density. Returns the points and
/// their masses.
pub fn grid_gaussian_2d(
    sigma: &DMatrix<f64>,
    per_axis: usize,
    half_width: f64,
) -> Result<(Vec<[f64; 2]>, Vec<f64>)> {
    if sigma.nrows() != 2 {
        return Err(Error::input("grid discretization is two-dimensional"));
    }
    if per_axis < 2 {
        return Err(Error::input("grid needs at least two points per axis"));
    }
    check_spd(sigma, "sigma")?;
    let precision = symmetrize(sigma)
        .try_inverse()
        .ok_or_else(|| Error::input("sigma is singular"))?;
    let axis = |k: usize| -> Vec<f64> {
        let s = sigma[(k, k)].sqrt();
        (0..per_axis)
            .map(|i| -half_width * s + 2.0 * half_width * s * i as f64 / (per_axis - 1) as f64)
            .collect()
    };
    let (xs, ys) = (axis(0), axis(1));
    let mut points = Vec::with_capacity(per_axis * per_axis);
    let mut weights = Vec::with_capacity(per_axis * per_axis);
    for &x in &xs {
        for &y in &ys {
            let v = nalgebra::Vector2::new(x, y);
            let q = precision[(0, 0)] * v[0] * v[0]
                + 2.0 * precision[(0, 1)] * v[0] * v[1]
                + precision[(1, 1)] * v[1] * v[1];
            points.push([x, y]);
            weights.push((-0.5 * q).exp());
        }
    }
    let total: f64 = weights.iter().sum();
    Ok((points, weights.into_iter().map(|w| w / total).collect()))
}
