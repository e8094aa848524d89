//! Memory-cell model: conditional one-mode lossy thermal channels and the
//! receiver-side states they produce.

use nalgebra::DMatrix;

use crate::error::{domain_err, Error, Result};
use crate::gaussian::{self, GaussianState};
use crate::scalar::{lit, to_f64, Real};

/// A memory cell: pit reflectivity `r0`, land reflectivity `r1` and bath
/// photons `n_b` per mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MemoryCell<T: Real> {
    r0: T,
    r1: T,
    n_b: T,
}

impl<T: Real> MemoryCell<T> {
    /// Requires `0 ≤ r0 ≤ r1 ≤ 1` and `n_b ≥ 0`.
    pub fn new(r0: T, r1: T, n_b: T) -> Result<Self> {
        check_reflectivity("r0", r0)?;
        check_reflectivity("r1", r1)?;
        if r0 > r1 {
            return Err(domain_err("r0", to_f64(r0), "[0, r1]"));
        }
        check_bath(n_b)?;
        Ok(Self { r0, r1, n_b })
    }

    pub fn r0(&self) -> T {
        self.r0
    }

    pub fn r1(&self) -> T {
        self.r1
    }

    pub fn n_b(&self) -> T {
        self.n_b
    }

    pub fn is_ideal(&self) -> bool {
        self.r1 == T::one()
    }
}

/// A cell with perfect land reflectivity, `r1 = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdealCell<T: Real> {
    r0: T,
    n_b: T,
}

impl<T: Real> IdealCell<T> {
    /// Requires `0 ≤ r0 < 1` and `n_b ≥ 0`.
    pub fn new(r0: T, n_b: T) -> Result<Self> {
        if !(r0 >= T::zero() && r0 < T::one()) {
            return Err(domain_err("r0", to_f64(r0), "[0, 1)"));
        }
        check_bath(n_b)?;
        Ok(Self { r0, n_b })
    }

    pub fn r0(&self) -> T {
        self.r0
    }

    pub fn n_b(&self) -> T {
        self.n_b
    }

    pub fn cell(&self) -> MemoryCell<T> {
        MemoryCell {
            r0: self.r0,
            r1: T::one(),
            n_b: self.n_b,
        }
    }
}

impl<T: Real> TryFrom<MemoryCell<T>> for IdealCell<T> {
    type Error = Error;

    fn try_from(cell: MemoryCell<T>) -> Result<Self> {
        if !cell.is_ideal() {
            return Err(domain_err("r1", to_f64(cell.r1), "{1}"));
        }
        IdealCell::new(cell.r0, cell.n_b)
    }
}

/// Number of signal modes `m` and mean photons per signal mode `n_s`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignalProfile<T: Real> {
    m: u64,
    n_s: T,
}

impl<T: Real> SignalProfile<T> {
    pub fn new(m: u64, n_s: T) -> Result<Self> {
        if m == 0 {
            return Err(domain_err("M", 0.0, "[1, ∞)"));
        }
        if !(n_s > T::zero()) || !n_s.is_finite() {
            return Err(domain_err("N_S", to_f64(n_s), "(0, ∞)"));
        }
        Ok(Self { m, n_s })
    }

    pub fn m(&self) -> u64 {
        self.m
    }

    pub fn n_s(&self) -> T {
        self.n_s
    }
}

fn check_reflectivity<T: Real>(name: &'static str, r: T) -> Result<()> {
    if r >= T::zero() && r <= T::one() {
        Ok(())
    } else {
        Err(domain_err(name, to_f64(r), "[0, 1]"))
    }
}

fn check_bath<T: Real>(n_b: T) -> Result<()> {
    if n_b >= T::zero() && n_b.is_finite() {
        Ok(())
    } else {
        Err(domain_err("N_B", to_f64(n_b), "[0, ∞)"))
    }
}

/// Applies the lossy thermal channel of reflectivity `r` and bath `n_b` to one
/// mode: the mode's mean is scaled by `√r`, its diagonal block becomes
/// `rA + (1−r)(2N_B+1)I` and every cross block involving it is scaled by `√r`.
pub fn apply_lossy_channel<T: Real>(
    state: &GaussianState<T>,
    mode: usize,
    r: T,
    n_b: T,
) -> Result<GaussianState<T>> {
    check_reflectivity("r", r)?;
    check_bath(n_b)?;
    let n = state.n_modes();
    if mode >= n {
        return Err(Error::ModeOutOfRange {
            index: mode,
            n_modes: n,
        });
    }
    let t = r.sqrt();
    let (q, p) = (2 * mode, 2 * mode + 1);

    let mut mean = state.mean().clone();
    mean[q] *= t;
    mean[p] *= t;

    let mut cov: DMatrix<T> = state.cov().clone();
    for idx in [q, p] {
        cov.row_mut(idx).scale_mut(t);
        cov.column_mut(idx).scale_mut(t);
    }
    let noise = (T::one() - r) * (lit::<T>(2.0) * n_b + T::one());
    cov[(q, q)] += noise;
    cov[(p, p)] += noise;

    // The channel is completely positive, so the output is bona fide whenever
    // the input was.
    Ok(GaussianState::from_parts_unchecked(mean, cov))
}

/// The receiver states `θ_u = (R_u ⊗ I)(|ξ⟩⟨ξ|)` for one TMSV copy, signal on
/// mode 0 and idler on mode 1.
pub fn theta_states<T: Real>(
    cell: &MemoryCell<T>,
    n_s: T,
) -> Result<(GaussianState<T>, GaussianState<T>)> {
    if !(n_s > T::zero()) {
        return Err(domain_err("N_S", to_f64(n_s), "(0, ∞)"));
    }
    let input = gaussian::tmsv(n_s)?;
    let theta0 = apply_lossy_channel(&input, 0, cell.r0, cell.n_b)?;
    let theta1 = apply_lossy_channel(&input, 0, cell.r1, cell.n_b)?;
    Ok((theta0, theta1))
}

/// Outputs `R_u(|√N_S⟩⟨√N_S|)` of a single-mode coherent probe.
pub fn coherent_outputs<T: Real>(
    cell: &MemoryCell<T>,
    n_s: T,
) -> Result<(GaussianState<T>, GaussianState<T>)> {
    if !(n_s >= T::zero()) {
        return Err(domain_err("N_S", to_f64(n_s), "[0, ∞)"));
    }
    let probe = gaussian::coherent(n_s.sqrt(), T::zero());
    let out0 = apply_lossy_channel(&probe, 0, cell.r0, cell.n_b)?;
    let out1 = apply_lossy_channel(&probe, 0, cell.r1, cell.n_b)?;
    Ok((out0, out1))
}
