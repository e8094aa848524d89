//! Discrimination bounds for reading a memory cell.
//!
//! The classical side is the fidelity bound `C = (1 − √(1 − F^M))/2`, valid for
//! every transmitter whose P-representation is a probability density. The
//! quantum side is the Chernoff bound `Q = ½ [inf_s Tr(θ0^s θ1^{1−s})]^M` for
//! `M` copies of a two-mode squeezed vacuum. Both are evaluated in log space so
//! that `M` in the hundreds of thousands neither underflows nor loses the
//! distance from ½.

use nalgebra::{DMatrix, DVector};

use crate::channel::{coherent_outputs, theta_states, IdealCell, MemoryCell, SignalProfile};
use crate::error::{domain_err, Error, Result};
use crate::gaussian::{GaussianState, SymplecticSpectrum};
use crate::optimize::golden_section;
use crate::scalar::{lit, to_f64, Real};

/// Interior clip for the Chernoff parameter when a state is not pure.
pub const S_CLIP: f64 = 1e-6;

/// Absolute tolerance on the optimal Chernoff parameter.
pub const S_TOL: f64 = 1e-10;

/// Binary Shannon entropy in bits, with `H(0) = H(1) = 0`.
pub fn binary_entropy<T: Real>(x: T) -> Result<T> {
    if !(x >= T::zero() && x <= T::one()) {
        return Err(domain_err("x", to_f64(x), "[0, 1]"));
    }
    let term = |p: T| {
        if p <= T::zero() {
            T::zero()
        } else {
            -p * p.log2()
        }
    };
    Ok(term(x) + term(T::one() - x))
}

/// `1 − H(½ − b)` for a bias `b ∈ [0, ½]`, accurate when `b` is tiny.
pub fn information_from_bias<T: Real>(bias: T) -> T {
    let u = (lit::<T>(2.0) * bias).max(T::zero()).min(T::one());
    let plus = (T::one() + u) * u.ln_1p();
    let minus = if u >= T::one() {
        T::zero()
    } else {
        (T::one() - u) * (-u).ln_1p()
    };
    ((plus + minus) * lit(0.5) / T::ln_2()).max(T::zero())
}

fn check_single_mode<T: Real>(state: &GaussianState<T>) -> Result<()> {
    if state.n_modes() == 1 {
        Ok(())
    } else {
        Err(Error::InvalidDimension(format!(
            "single-mode state required, got {} modes",
            state.n_modes()
        )))
    }
}

/// Uhlmann fidelity `F = [Tr √(√a b √a)]²` of two single-mode Gaussian states.
///
/// With `Δ = det(V_a + V_b)` and `δ = (det V_a − 1)(det V_b − 1)`,
/// `F = 2 / (√(Δ+δ) − √δ) · exp(−½ dᵀ (V_a + V_b)⁻¹ d)` where `d` is the mean
/// difference.
pub fn gaussian_fidelity_1mode<T: Real>(a: &GaussianState<T>, b: &GaussianState<T>) -> Result<T> {
    check_single_mode(a)?;
    check_single_mode(b)?;
    let sum = a.cov() + b.cov();
    let big_delta = sum.determinant();
    let small_delta =
        ((a.cov().determinant() - T::one()) * (b.cov().determinant() - T::one())).max(T::zero());
    let denom = (big_delta + small_delta).sqrt() - small_delta.sqrt();
    if !(denom > T::zero()) {
        return Err(Error::SingularSum);
    }
    let d = a.mean() - b.mean();
    let chol = sum.cholesky().ok_or(Error::SingularSum)?;
    let quad = d.dot(&chol.solve(&d));
    let f = lit::<T>(2.0) / denom * (-quad * lit(0.5)).exp();
    Ok(f.min(T::one()).max(T::zero()))
}

/// Closed-form fidelity between the coherent-probe outputs of an ideal cell:
/// `γ⁻¹ exp[−γ⁻¹ (1 − √r0)² N_S]` with `γ = 1 + (1 − r0) N_B`.
pub fn fidelity_ideal<T: Real>(cell: &IdealCell<T>, n_s: T) -> T {
    let gamma = T::one() + (T::one() - cell.r0()) * cell.n_b();
    let gap = T::one() - cell.r0().sqrt();
    (-(gap * gap * n_s) / gamma).exp() / gamma
}

/// `Λ_p(x) = [(x+1)^p + (x−1)^p] / [(x+1)^p − (x−1)^p] = coth(p L / 2)` with
/// `L = ln((x+1)/(x−1))`.
fn lambda_p<T: Real>(p: T, x: T) -> Result<T> {
    if x == T::one() {
        return Ok(T::one());
    }
    if p <= T::zero() {
        return Err(domain_err("s", to_f64(p), "(0, 1) for a mixed mode"));
    }
    let l = ((x + T::one()) / (x - T::one())).ln();
    Ok(T::one() / (p * l * lit(0.5)).tanh())
}

/// `G_p(x) = 2^p / [(x+1)^p − (x−1)^p] = 2^p / [(x−1)^p expm1(p L)]`.
fn g_p<T: Real>(p: T, x: T) -> Result<T> {
    if x == T::one() {
        return Ok(T::one());
    }
    if p <= T::zero() {
        return Err(domain_err("s", to_f64(p), "(0, 1) for a mixed mode"));
    }
    let l = ((x + T::one()) / (x - T::one())).ln();
    let two = lit::<T>(2.0);
    Ok(two.powf(p) / ((x - T::one()).powf(p) * (p * l).exp_m1()))
}

/// Precomputed symplectic data for evaluating `Tr(ρ0^s ρ1^{1−s})` at many `s`.
struct OverlapKernel<T: Real> {
    spec0: SymplecticSpectrum<T>,
    spec1: SymplecticSpectrum<T>,
    diff: DVector<T>,
    n_modes: usize,
    pure0: bool,
    pure1: bool,
}

impl<T: Real> OverlapKernel<T> {
    fn new(rho0: &GaussianState<T>, rho1: &GaussianState<T>) -> Result<Self> {
        if rho0.n_modes() != rho1.n_modes() {
            return Err(Error::Mismatch(format!(
                "{} vs {} modes",
                rho0.n_modes(),
                rho1.n_modes()
            )));
        }
        let spec0 = SymplecticSpectrum::of(rho0.cov())?;
        let spec1 = SymplecticSpectrum::of(rho1.cov())?;
        let floor = T::one() - lit(crate::gaussian::BONA_FIDE_TOL);
        for spec in [&spec0, &spec1] {
            if let Some(&nu) = spec.nu.last() {
                if nu < floor {
                    return Err(Error::NotBonaFide(to_f64(nu)));
                }
            }
        }
        let pure0 = spec0.nu.iter().all(|&v| v == T::one());
        let pure1 = spec1.nu.iter().all(|&v| v == T::one());
        Ok(Self {
            spec0,
            spec1,
            diff: rho0.mean() - rho1.mean(),
            n_modes: rho0.n_modes(),
            pure0,
            pure1,
        })
    }

    /// Admissible Chernoff-parameter range: the closed end is kept whenever the
    /// state raised to the vanishing power is pure, where the formula is smooth.
    fn s_range(&self) -> (T, T) {
        let clip = lit::<T>(S_CLIP);
        let lo = if self.pure0 { T::zero() } else { clip };
        let hi = if self.pure1 {
            T::one()
        } else {
            T::one() - clip
        };
        (lo, hi)
    }

    fn eval(&self, s: T) -> Result<T> {
        let t = T::one() - s;
        let mut prefactor = lit::<T>(2.0).powi(self.n_modes as i32);
        for &nu in &self.spec0.nu {
            prefactor *= g_p(s, nu)?;
        }
        for &nu in &self.spec1.nu {
            prefactor *= g_p(t, nu)?;
        }
        // Λ_p(ν) is well defined by the checks inside g_p above.
        let v0 = self
            .spec0
            .reshaped(|nu| lambda_p(s, nu).unwrap_or(T::one()));
        let v1 = self
            .spec1
            .reshaped(|nu| lambda_p(t, nu).unwrap_or(T::one()));
        let sum: DMatrix<T> = v0 + v1;
        let chol = sum.cholesky().ok_or(Error::SingularSum)?;
        let sqrt_det = chol
            .l_dirty()
            .diagonal()
            .iter()
            .fold(T::one(), |acc, &x| acc * x);
        let quad = self.diff.dot(&chol.solve(&self.diff));
        Ok(prefactor / sqrt_det * (-quad * lit(0.5)).exp())
    }
}

/// The Gaussian s-overlap `Tr(ρ0^s ρ1^{1−s})` for `s ∈ (0, 1)`.
pub fn s_overlap_gaussian<T: Real>(
    rho0: &GaussianState<T>,
    rho1: &GaussianState<T>,
    s: T,
) -> Result<T> {
    if !(s > T::zero() && s < T::one()) {
        return Err(domain_err("s", to_f64(s), "(0, 1)"));
    }
    OverlapKernel::new(rho0, rho1)?.eval(s)
}

/// Minimum of the s-overlap over the Chernoff parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChernoffMinimum<T> {
    pub s_opt: T,
    pub overlap: T,
}

/// Minimizes `Tr(ρ0^s ρ1^{1−s})` over `s` by golden-section search.
///
/// The search runs on `[10⁻⁶, 1 − 10⁻⁶]`, extended to the closed endpoint on
/// the side of a pure state (where the overlap is smooth up to the boundary and
/// often attains its infimum there).
pub fn chernoff_minimum<T: Real>(
    rho0: &GaussianState<T>,
    rho1: &GaussianState<T>,
) -> Result<ChernoffMinimum<T>> {
    let kernel = OverlapKernel::new(rho0, rho1)?;
    let (lo, hi) = kernel.s_range();
    let min = golden_section(|s| kernel.eval(s), lo, hi, lit(S_TOL)).map_err(|e| match e {
        Error::Minimizer(msg) => Error::Minimizer(format!(
            "{msg}; symplectic spectra {:?} / {:?}",
            kernel.spec0.nu, kernel.spec1.nu
        )),
        other => other,
    })?;
    Ok(ChernoffMinimum {
        s_opt: min.x,
        overlap: min.value.min(T::one()),
    })
}

/// Evaluates the overlap on `points` interior values of `s`, equally spaced.
pub fn overlap_profile<T: Real>(
    rho0: &GaussianState<T>,
    rho1: &GaussianState<T>,
    points: usize,
) -> Result<Vec<(T, T)>> {
    let kernel = OverlapKernel::new(rho0, rho1)?;
    let denom = crate::scalar::from_usize::<T>(points + 1);
    (1..=points)
        .map(|i| {
            let s = crate::scalar::from_usize::<T>(i) / denom;
            kernel.eval(s).map(|v| (s, v))
        })
        .collect()
}

/// Single-copy quantities of a cell at fixed `N_S`, from which every `M`
/// follows in closed form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellBounds<T> {
    pub fidelity: T,
    pub overlap: T,
    pub s_opt: T,
}

/// Bias `½ − P` and the probability itself, kept together for accuracy.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Biased<T> {
    prob: T,
    bias: T,
    ln_prob: T,
}

impl<T: Real> CellBounds<T> {
    pub fn new(cell: &MemoryCell<T>, n_s: T) -> Result<Self> {
        if cell.r0() == cell.r1() {
            // identical channels, identical outputs
            if !(n_s > T::zero()) {
                return Err(domain_err("N_S", to_f64(n_s), "(0, ∞)"));
            }
            return Ok(Self {
                fidelity: T::one(),
                overlap: T::one(),
                s_opt: lit(0.5),
            });
        }
        let (c0, c1) = coherent_outputs(cell, n_s)?;
        let fidelity = gaussian_fidelity_1mode(&c0, &c1)?;
        let (t0, t1) = theta_states(cell, n_s)?;
        let min = chernoff_minimum(&t0, &t1)?;
        Ok(Self {
            fidelity,
            overlap: min.overlap,
            s_opt: min.s_opt,
        })
    }

    /// Closed forms for an ideal cell, whose Chernoff minimum sits at `s = 1`.
    pub fn ideal(cell: &IdealCell<T>, n_s: T) -> Self {
        Self {
            fidelity: fidelity_ideal(cell, n_s),
            overlap: ideal_overlap(cell, n_s),
            s_opt: T::one(),
        }
    }

    fn classical(&self, m: T) -> Biased<T> {
        let ln_fm = m * self.fidelity.ln();
        let fm = ln_fm.exp();
        let one_minus = (-ln_fm.exp_m1()).max(T::zero());
        let root = one_minus.sqrt();
        let two = lit::<T>(2.0);
        Biased {
            prob: fm / (two * (T::one() + root)),
            bias: root / two,
            ln_prob: ln_fm - two.ln() - root.ln_1p(),
        }
    }

    fn quantum(&self, m: T) -> Biased<T> {
        let ln_om = m * self.overlap.ln();
        let half = lit::<T>(0.5);
        Biased {
            prob: half * ln_om.exp(),
            bias: -half * ln_om.exp_m1(),
            ln_prob: ln_om - lit::<T>(2.0).ln(),
        }
    }

    /// `C(M)` for real `M ≥ 0`.
    pub fn classical_bound(&self, m: T) -> T {
        self.classical(m).prob
    }

    /// `Q(M)` for real `M ≥ 0`.
    pub fn quantum_bound(&self, m: T) -> T {
        self.quantum(m).prob
    }

    /// `ln C(M) − ln Q(M)`; positive exactly when the gain is positive.
    pub fn log_ratio(&self, m: T) -> T {
        self.classical(m).ln_prob - self.quantum(m).ln_prob
    }

    /// `Q(M) − C(M)`.
    pub fn delta(&self, m: T) -> T {
        // difference of biases keeps precision when both are close to ½
        self.classical(m).bias - self.quantum(m).bias
    }

    pub fn gain(&self, m: T) -> T {
        information_from_bias(self.quantum(m).bias) - information_from_bias(self.classical(m).bias)
    }

    pub fn report(&self, m: T) -> GainReport<T> {
        let c = self.classical(m);
        let q = self.quantum(m);
        let j_class = information_from_bias(c.bias);
        let j_quant = information_from_bias(q.bias);
        GainReport {
            f: self.fidelity,
            c: c.prob,
            q: q.prob,
            j_class,
            j_quant,
            g: j_quant - j_class,
            s_opt: self.s_opt,
        }
    }
}

/// All bound values for one parameter point.
///
/// `c` lower-bounds the error of every classical transmitter and `q`
/// upper-bounds the error of the EPR transmitter, so `g = j_quant − j_class`
/// is a lower bound on the true information gain. A negative `g` certifies
/// nothing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GainReport<T> {
    pub f: T,
    pub c: T,
    pub q: T,
    pub j_class: T,
    pub j_quant: T,
    pub g: T,
    pub s_opt: T,
}

fn m_as<T: Real>(profile: &SignalProfile<T>) -> T {
    T::from_u64(profile.m()).expect("signal count representable")
}

/// Classical lower bound `C(M, N_S)`.
pub fn classical_bound<T: Real>(cell: &MemoryCell<T>, profile: &SignalProfile<T>) -> Result<T> {
    let (c0, c1) = coherent_outputs(cell, profile.n_s())?;
    let f = gaussian_fidelity_1mode(&c0, &c1)?;
    let bounds = CellBounds {
        fidelity: f,
        overlap: T::one(),
        s_opt: lit(0.5),
    };
    Ok(bounds.classical_bound(m_as(profile)))
}

/// Quantum Chernoff bound `Q(M, N_S)` and the optimal Chernoff parameter.
pub fn quantum_chernoff_bound<T: Real>(
    cell: &MemoryCell<T>,
    profile: &SignalProfile<T>,
) -> Result<(T, T)> {
    let (t0, t1) = theta_states(cell, profile.n_s())?;
    let min = chernoff_minimum(&t0, &t1)?;
    let bounds = CellBounds {
        fidelity: T::one(),
        overlap: min.overlap,
        s_opt: min.s_opt,
    };
    Ok((bounds.quantum_bound(m_as(profile)), min.s_opt))
}

/// Closed form of `Q` for an ideal memory:
/// `½ {[1 + (1 − √r0) N_S]² + N_B (2N_S + 1)(1 − r0)}^{−M}`.
pub fn quantum_chernoff_bound_ideal<T: Real>(cell: &IdealCell<T>, profile: &SignalProfile<T>) -> T {
    lit::<T>(0.5) * (m_as(profile) * ideal_overlap(cell, profile.n_s()).ln()).exp()
}

/// Single-copy Chernoff overlap of an ideal cell,
/// `{[1 + (1 − √r0) N_S]² + N_B (2N_S + 1)(1 − r0)}^{−1}`.
fn ideal_overlap<T: Real>(cell: &IdealCell<T>, n_s: T) -> T {
    let a = T::one() + (T::one() - cell.r0().sqrt()) * n_s;
    let base = a * a + cell.n_b() * (lit::<T>(2.0) * n_s + T::one()) * (T::one() - cell.r0());
    base.recip()
}

/// Evaluates every bound at one parameter point.
pub fn info_gain<T: Real>(
    cell: &MemoryCell<T>,
    profile: &SignalProfile<T>,
) -> Result<GainReport<T>> {
    Ok(CellBounds::new(cell, profile.n_s())?.report(m_as(profile)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::{coherent, thermal, tmsv, vacuum};
    use approx::assert_relative_eq;

    #[test]
    fn entropy_values() {
        assert_eq!(binary_entropy(0.0f64).unwrap(), 0.0);
        assert_eq!(binary_entropy(1.0f64).unwrap(), 0.0);
        assert_relative_eq!(binary_entropy(0.5f64).unwrap(), 1.0, epsilon = 1e-15);
        // -(1/4)log2(1/4) - (3/4)log2(3/4) = 1/2 + (3/4)(2 - log2 3)
        let h = 0.5 + 0.75 * (2.0 - 3.0f64.log2());
        assert_relative_eq!(binary_entropy(0.25f64).unwrap(), h, epsilon = 1e-15);
        assert_relative_eq!(h, 0.811_278_124_459_132_8, epsilon = 1e-15);
        assert_relative_eq!(
            binary_entropy(0.25f64).unwrap(),
            binary_entropy(0.75f64).unwrap(),
            epsilon = 1e-15
        );
        assert!(binary_entropy(1.5f64).is_err());
        assert!(binary_entropy(-0.1f64).is_err());
    }

    #[test]
    fn information_matches_entropy() {
        for p in [0.0, 1e-9, 0.01, 0.2, 0.44, 0.4999, 0.5] {
            let direct = 1.0 - binary_entropy(p).unwrap();
            assert_relative_eq!(information_from_bias(0.5 - p), direct, epsilon = 1e-13);
        }
    }

    #[test]
    fn fidelity_special_cases() {
        let a = thermal(0.3f64).unwrap();
        assert_relative_eq!(
            gaussian_fidelity_1mode(&a, &a).unwrap(),
            1.0,
            epsilon = 1e-14
        );
        let vac = vacuum::<f64>(1).unwrap();
        assert_relative_eq!(
            gaussian_fidelity_1mode(&vac, &a).unwrap(),
            1.0 / 1.3,
            epsilon = 1e-14
        );
        let c = coherent(0.7f64, -0.2);
        assert_relative_eq!(
            gaussian_fidelity_1mode(&vac, &c).unwrap(),
            (-(0.49f64 + 0.04)).exp(),
            epsilon = 1e-14
        );
        assert!(gaussian_fidelity_1mode(&tmsv(0.1f64).unwrap(), &tmsv(0.1).unwrap()).is_err());
    }

    #[test]
    fn fidelity_ideal_special_case() {
        let cell = IdealCell::new(0.0f64, 0.0).unwrap();
        for n_s in [0.1, 1.0, 3.0] {
            assert_relative_eq!(fidelity_ideal(&cell, n_s), (-n_s).exp(), epsilon = 1e-15);
            let (c0, c1) = coherent_outputs(&cell.cell(), n_s).unwrap();
            assert_relative_eq!(
                gaussian_fidelity_1mode(&c0, &c1).unwrap(),
                (-n_s).exp(),
                epsilon = 1e-14
            );
        }
    }

    #[test]
    fn overlap_identical_and_pure() {
        let cell = MemoryCell::new(0.3f64, 0.8, 0.2).unwrap();
        let (t0, _) = theta_states(&cell, 0.7).unwrap();
        for s in [0.1, 0.5, 0.9] {
            assert_relative_eq!(
                s_overlap_gaussian(&t0, &t0, s).unwrap(),
                1.0,
                epsilon = 1e-12
            );
        }
        let vac = vacuum::<f64>(1).unwrap();
        let c = coherent(0.8f64, 0.0);
        for s in [0.2, 0.5, 0.7] {
            assert_relative_eq!(
                s_overlap_gaussian(&vac, &c, s).unwrap(),
                (-0.64f64).exp(),
                epsilon = 1e-14
            );
        }
        assert!(s_overlap_gaussian(&vac, &c, 0.0).is_err());
        assert!(s_overlap_gaussian(&vac, &c, 1.0).is_err());
        assert!(s_overlap_gaussian(&vac, &tmsv(0.1).unwrap(), 0.5).is_err());
    }

    #[test]
    fn overlap_thermal_pair_closed_form() {
        // Commuting thermal states: Tr(ρ0^s ρ1^{1-s}) = Σ_n p_n^s q_n^{1-s}
        // = (1-x)^s (1-y)^{1-s} / (1 - x^s y^{1-s}) with x = n0/(1+n0).
        let (n0, n1) = (0.4f64, 1.7f64);
        let x = n0 / (1.0 + n0);
        let y = n1 / (1.0 + n1);
        let a = thermal(n0).unwrap();
        let b = thermal(n1).unwrap();
        for s in [0.1, 0.35, 0.5, 0.8] {
            let exact =
                (1.0 - x).powf(s) * (1.0 - y).powf(1.0 - s) / (1.0 - x.powf(s) * y.powf(1.0 - s));
            assert_relative_eq!(
                s_overlap_gaussian(&a, &b, s).unwrap(),
                exact,
                epsilon = 1e-13
            );
        }
    }

    #[test]
    fn equal_reflectivities_give_half() {
        let cell = MemoryCell::new(0.6f64, 0.6, 0.05).unwrap();
        let p = SignalProfile::new(50, 0.4).unwrap();
        let r = info_gain(&cell, &p).unwrap();
        assert_relative_eq!(r.c, 0.5, epsilon = 1e-14);
        assert_relative_eq!(r.q, 0.5, epsilon = 1e-12);
        assert_eq!(r.f, 1.0);
        assert!(r.g.abs() < 1e-20);
    }

    #[test]
    fn ideal_closed_form_special_values() {
        let cell = IdealCell::new(0.0f64, 0.0).unwrap();
        let p = SignalProfile::new(1, 1.0f64).unwrap();
        assert_relative_eq!(
            quantum_chernoff_bound_ideal(&cell, &p),
            0.125,
            epsilon = 1e-15
        );
        let p = SignalProfile::new(3, 0.4f64).unwrap();
        assert_relative_eq!(
            quantum_chernoff_bound_ideal(&cell, &p),
            0.5 * 1.4f64.powi(-6),
            epsilon = 1e-15
        );
        let near = IdealCell::new(1.0 - 1e-12, 0.3f64).unwrap();
        assert_relative_eq!(quantum_chernoff_bound_ideal(&near, &p), 0.5, epsilon = 1e-9);
    }

    #[test]
    fn classical_bound_noiseless_ideal() {
        let cell = MemoryCell::new(0.0f64, 1.0, 0.0).unwrap();
        for (m, n_s) in [(1u64, 0.5f64), (4, 1.0), (30, 1.0)] {
            let p = SignalProfile::new(m, n_s).unwrap();
            let x = (-(m as f64) * n_s).exp();
            let expected = (1.0 - (1.0 - x).sqrt()) / 2.0;
            assert_relative_eq!(
                classical_bound(&cell, &p).unwrap(),
                expected,
                max_relative = 1e-12
            );
        }
        let p = SignalProfile::new(30, 1.0f64).unwrap();
        let c = classical_bound(&cell, &p).unwrap();
        assert_relative_eq!(c, (-30.0f64).exp() / 4.0, max_relative = 1e-12);
    }

    #[test]
    fn last_table_row_components() {
        // r0 = 0.995, r1 = 1, N_B = 0, N_S = 0.01, M = 2e5:
        // F = exp(-(1-√r0)² N_S), C = (1 - √(1 - F^M))/2,
        // Q = ½ (1 + (1-√r0) N_S)^{-2M}.
        let r0 = 0.995f64;
        let gap = 1.0 - r0.sqrt();
        let fm = (-2e5 * gap * gap * 0.01).exp();
        let c_ref = (1.0 - (1.0 - fm).sqrt()) / 2.0;
        let q_ref = 0.5 * (-4e5 * (gap * 0.01).ln_1p()).exp();
        let cell = MemoryCell::new(r0, 1.0, 0.0).unwrap();
        let r = info_gain(&cell, &SignalProfile::new(200_000, 0.01).unwrap()).unwrap();
        assert_relative_eq!(r.c, c_ref, max_relative = 1e-9);
        assert_relative_eq!(r.q, q_ref, max_relative = 1e-7);
        assert!((r.c - 0.444).abs() < 1e-3);
        assert!((r.q - 2.2e-5).abs() < 0.1e-5);
    }
}
