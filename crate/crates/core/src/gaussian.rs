//! Multimode Gaussian states and their symplectic spectra.
//!
//! Quadratures are ordered `q1, p1, q2, p2, ...` and the covariance matrix is
//! normalized so the vacuum has covariance equal to the identity. With
//! `q = a + a†` a coherent state `|α⟩` has mean `(2 Re α, 2 Im α)`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{domain_err, Error, Result};
use crate::scalar::{lit, to_f64, Real};

/// Slack allowed below 1 for a symplectic eigenvalue.
pub const BONA_FIDE_TOL: f64 = 1e-9;

/// Relative tolerance for the symmetry check on construction.
pub const SYMMETRY_TOL: f64 = 1e-12;

/// The block-diagonal symplectic form with 2×2 blocks `[[0, 1], [-1, 0]]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SymplecticForm {
    n_modes: usize,
}

impl SymplecticForm {
    pub fn new(n_modes: usize) -> Self {
        Self { n_modes }
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn matrix<T: Real>(&self) -> DMatrix<T> {
        let dim = 2 * self.n_modes;
        let mut omega = DMatrix::zeros(dim, dim);
        for k in 0..self.n_modes {
            omega[(2 * k, 2 * k + 1)] = T::one();
            omega[(2 * k + 1, 2 * k)] = -T::one();
        }
        omega
    }
}

/// Mean vector and covariance matrix of an `n`-mode bosonic Gaussian state.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianState<T: Real> {
    mean: DVector<T>,
    cov: DMatrix<T>,
}

impl<T: Real> GaussianState<T> {
    /// Builds a state after checking dimensions, symmetry and the uncertainty
    /// principle. The covariance is symmetrized as `(V + Vᵀ)/2`.
    pub fn new(mean: DVector<T>, cov: DMatrix<T>) -> Result<Self> {
        let dim = cov.nrows();
        if dim == 0 || !dim.is_multiple_of(2) || cov.ncols() != dim {
            return Err(Error::InvalidDimension(format!(
                "covariance must be 2n×2n with n ≥ 1, got {}×{}",
                cov.nrows(),
                cov.ncols()
            )));
        }
        if mean.len() != dim {
            return Err(Error::InvalidDimension(format!(
                "mean has length {} but covariance is {dim}×{dim}",
                mean.len()
            )));
        }
        if mean.iter().chain(cov.iter()).any(|x| !x.is_finite()) {
            return Err(Error::InvalidDimension("non-finite entry".into()));
        }
        let scale = cov.amax().max(T::one());
        let asym = (&cov - cov.transpose()).amax();
        if asym > lit::<T>(SYMMETRY_TOL) * scale {
            return Err(Error::NotSymmetric(to_f64(asym)));
        }
        let cov = (&cov + cov.transpose()) * lit::<T>(0.5);
        let state = Self { mean, cov };
        let spectrum = state.symplectic_spectrum()?;
        if let Some(&nu_min) = spectrum.nu.last() {
            if nu_min < T::one() - lit(BONA_FIDE_TOL) {
                return Err(Error::NotBonaFide(to_f64(nu_min)));
            }
        }
        Ok(state)
    }

    /// Internal constructor for covariances already known to be valid.
    pub(crate) fn from_parts_unchecked(mean: DVector<T>, cov: DMatrix<T>) -> Self {
        Self { mean, cov }
    }

    pub fn n_modes(&self) -> usize {
        self.cov.nrows() / 2
    }

    pub fn mean(&self) -> &DVector<T> {
        &self.mean
    }

    pub fn cov(&self) -> &DMatrix<T> {
        &self.cov
    }

    /// Symplectic eigenvalues in nonincreasing order, one per mode.
    pub fn symplectic_eigenvalues(&self) -> Vec<T> {
        // Construction already validated the spectrum; recomputing cannot fail
        // on a state that exists.
        self.symplectic_spectrum().map(|s| s.nu).unwrap_or_default()
    }

    /// True when every symplectic eigenvalue equals 1 within [`BONA_FIDE_TOL`].
    pub fn is_pure(&self) -> bool {
        self.symplectic_eigenvalues()
            .iter()
            .all(|&nu| (nu - T::one()).abs() <= lit(BONA_FIDE_TOL))
    }

    /// Mean photon number of one mode.
    pub fn mean_photons(&self, mode: usize) -> Result<T> {
        let n = self.n_modes();
        if mode >= n {
            return Err(Error::ModeOutOfRange {
                index: mode,
                n_modes: n,
            });
        }
        let (q, p) = (2 * mode, 2 * mode + 1);
        let two = lit::<T>(2.0);
        let value = (self.cov[(q, q)] + self.cov[(p, p)] - two
            + self.mean[q] * self.mean[q]
            + self.mean[p] * self.mean[p])
            / lit(4.0);
        Ok(value.max(T::zero()))
    }

    /// Direct sum `self ⊕ other`, i.e. the state `ρ ⊗ σ`.
    pub fn tensor(&self, other: &Self) -> Self {
        let (da, db) = (self.cov.nrows(), other.cov.nrows());
        let mut cov = DMatrix::zeros(da + db, da + db);
        cov.view_mut((0, 0), (da, da)).copy_from(&self.cov);
        cov.view_mut((da, da), (db, db)).copy_from(&other.cov);
        let mean =
            DVector::from_iterator(da + db, self.mean.iter().chain(other.mean.iter()).copied());
        Self { mean, cov }
    }

    pub(crate) fn symplectic_spectrum(&self) -> Result<SymplecticSpectrum<T>> {
        SymplecticSpectrum::of(&self.cov)
    }
}

/// Spectral data of `K = V^{1/2} Ωᵀ V Ω V^{1/2}`, whose eigenvalues are the
/// squared symplectic eigenvalues of `V`, each with multiplicity two.
///
/// `K` is symmetric, so this route avoids the non-symmetric eigenproblem of
/// `Ω V` while producing the same spectrum. It also yields matrix functions
/// `V^{1/2} h(K) V^{1/2}`, which equal `S diag(f(ν)) Sᵀ` for the Williamson
/// form `V = S diag(ν) Sᵀ` when `h(ν²) = f(ν)/ν`.
#[derive(Debug, Clone)]
pub(crate) struct SymplecticSpectrum<T: Real> {
    sqrt_cov: DMatrix<T>,
    k_vectors: DMatrix<T>,
    /// Per-eigenvector symplectic eigenvalue (length 2n, paired).
    nu_per_vector: Vec<T>,
    /// One value per mode, nonincreasing.
    pub nu: Vec<T>,
}

impl<T: Real> SymplecticSpectrum<T> {
    pub fn of(cov: &DMatrix<T>) -> Result<Self> {
        let dim = cov.nrows();
        let n = dim / 2;
        let eig = SymmetricEigen::new(cov.clone());
        let min_eig = eig.eigenvalues.min();
        if min_eig <= T::zero() {
            return Err(Error::NotBonaFide(to_f64(min_eig)));
        }
        let sqrt_vals = eig.eigenvalues.map(|x| x.sqrt());
        let sqrt_cov =
            &eig.eigenvectors * DMatrix::from_diagonal(&sqrt_vals) * eig.eigenvectors.transpose();

        let omega = SymplecticForm::new(n).matrix::<T>();
        let k = &sqrt_cov * omega.transpose() * cov * &omega * &sqrt_cov;
        let k = (&k + k.transpose()) * lit::<T>(0.5);
        let keig = SymmetricEigen::new(k);

        let one = T::one();
        let snap = lit::<T>(BONA_FIDE_TOL);
        let nu_per_vector: Vec<T> = keig
            .eigenvalues
            .iter()
            .map(|&x| {
                let nu = x.max(T::zero()).sqrt();
                if (nu - one).abs() <= snap {
                    one
                } else {
                    nu
                }
            })
            .collect();

        let mut sorted = nu_per_vector.clone();
        sorted.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
        let nu = sorted
            .chunks(2)
            .map(|pair| (pair[0] + pair[1]) * lit(0.5))
            .collect();

        Ok(Self {
            sqrt_cov,
            k_vectors: keig.eigenvectors,
            nu_per_vector,
            nu,
        })
    }

    /// `S diag(f(ν_k)) Sᵀ` evaluated without forming `S`.
    pub fn reshaped(&self, f: impl Fn(T) -> T) -> DMatrix<T> {
        let h = DVector::from_iterator(
            self.nu_per_vector.len(),
            self.nu_per_vector.iter().map(|&nu| f(nu) / nu),
        );
        let hk = &self.k_vectors * DMatrix::from_diagonal(&h) * self.k_vectors.transpose();
        let m = &self.sqrt_cov * hk * &self.sqrt_cov;
        (&m + m.transpose()) * lit::<T>(0.5)
    }
}

/// The `n`-mode vacuum.
pub fn vacuum<T: Real>(n: usize) -> Result<GaussianState<T>> {
    if n == 0 {
        return Err(Error::InvalidDimension(
            "vacuum needs at least one mode".into(),
        ));
    }
    Ok(GaussianState::from_parts_unchecked(
        DVector::zeros(2 * n),
        DMatrix::identity(2 * n, 2 * n),
    ))
}

/// Single-mode coherent state `|α⟩`.
pub fn coherent<T: Real>(alpha_re: T, alpha_im: T) -> GaussianState<T> {
    let two = lit::<T>(2.0);
    GaussianState::from_parts_unchecked(
        DVector::from_vec(vec![two * alpha_re, two * alpha_im]),
        DMatrix::identity(2, 2),
    )
}

/// Single-mode thermal state with `n_mean` photons, covariance `(2n̄+1) I`.
pub fn thermal<T: Real>(n_mean: T) -> Result<GaussianState<T>> {
    if !(n_mean >= T::zero()) {
        return Err(domain_err("n_mean", to_f64(n_mean), "[0, ∞)"));
    }
    let var = lit::<T>(2.0) * n_mean + T::one();
    Ok(GaussianState::from_parts_unchecked(
        DVector::zeros(2),
        DMatrix::identity(2, 2) * var,
    ))
}

/// Two-mode squeezed vacuum with `n_s` mean photons in each mode.
///
/// Covariance `[[μI, cZ], [cZ, μI]]` with `μ = 2N+1`, `c = 2√(N(N+1))` and
/// `Z = diag(1, -1)`.
pub fn tmsv<T: Real>(n_s: T) -> Result<GaussianState<T>> {
    if !(n_s >= T::zero()) {
        return Err(domain_err("N_S", to_f64(n_s), "[0, ∞)"));
    }
    let mu = lit::<T>(2.0) * n_s + T::one();
    let c = lit::<T>(2.0) * (n_s * (n_s + T::one())).sqrt();
    let mut cov = DMatrix::identity(4, 4) * mu;
    cov[(0, 2)] = c;
    cov[(2, 0)] = c;
    cov[(1, 3)] = -c;
    cov[(3, 1)] = -c;
    Ok(GaussianState::from_parts_unchecked(DVector::zeros(4), cov))
}
