//! Critical signal number: the smallest `M` from which the EPR transmitter
//! provably beats every classical one, and its closed-form asymptotics.

use crate::bounds::CellBounds;
use crate::channel::IdealCell;
use crate::error::{domain_err, Error, Result};
use crate::optimize::golden_section_max;
use crate::scalar::{from_usize, lit, to_f64, Real};

/// A gain counts as positive only when `ln C − ln Q` exceeds this.
///
/// The test is made on the log ratio rather than on `G` itself: at large `M`
/// both informations round to one bit and `G` underflows to zero even though
/// its sign is still well defined.
pub const POSITIVE_TOL: f64 = 1e-12;

/// Largest `M` tried before a threshold is declared unbounded.
pub const M_CAP: u64 = 100_000_000;

/// Upper end of the bath range searched for the worst case.
pub const N_B_CAP: f64 = 100.0;

/// Lower end of the logarithmic part of the bath grid.
pub const N_B_GRID_MIN: f64 = 1e-4;

/// Number of logarithmically spaced bath values (besides `N_B = 0`).
pub const N_B_GRID_POINTS: usize = 25;

/// An integer threshold that may fail to exist below the search cap.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Threshold {
    Finite(u64),
    Unbounded,
}

impl Threshold {
    pub fn finite(self) -> Option<u64> {
        match self {
            Threshold::Finite(m) => Some(m),
            Threshold::Unbounded => None,
        }
    }

    pub fn is_unbounded(self) -> bool {
        self == Threshold::Unbounded
    }
}

impl std::fmt::Display for Threshold {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Threshold::Finite(m) => write!(f, "{m}"),
            Threshold::Unbounded => f.write_str("inf"),
        }
    }
}

/// How a [`CriticalPoint`] was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    ExactSearch,
    AsymptoteR0Near1,
    AsymptoteR0Zero,
}

/// Critical signal number at one `(r0, N_S)`, maximized over the bath.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalPoint<T> {
    pub r0: T,
    pub n_s: T,
    pub m_crit: Threshold,
    /// Bath attaining the maximum. At this bath `G(m_crit) > 0` while
    /// `G(m_crit − 1) ≤ 0`, so it is also the witness for minimality.
    pub n_b_worst: T,
    pub method: Method,
}

/// Knobs for the exact search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchOptions<T> {
    pub m_cap: u64,
    pub n_b_cap: T,
    pub grid_points: usize,
}

impl<T: Real> Default for SearchOptions<T> {
    fn default() -> Self {
        Self {
            m_cap: M_CAP,
            n_b_cap: lit(N_B_CAP),
            grid_points: N_B_GRID_POINTS,
        }
    }
}

fn m_real<T: Real>(m: u64) -> T {
    T::from_u64(m).expect("signal count representable")
}

fn positive<T: Real>(bounds: &CellBounds<T>, m: u64) -> bool {
    bounds.log_ratio(m_real(m)) > lit(POSITIVE_TOL)
}

/// Fails if the recorded `(M, G > 0)` pairs do not switch sign exactly once.
fn check_single_crossing(path: &mut [(u64, bool)]) -> Result<()> {
    path.sort_unstable();
    if let Some(first) = path.iter().position(|&(_, p)| p) {
        if let Some(&(m, _)) = path[first..].iter().find(|&&(_, p)| !p) {
            return Err(Error::NonMonotoneGain(format!(
                "G > 0 at M = {} but G ≤ 0 at M = {m}",
                path[first].0
            )));
        }
    }
    Ok(())
}

/// Smallest integer `M ≥ 1` with positive gain: doubling from `seed` until
/// the gain turns positive, then bisection.
fn integer_threshold<T: Real>(bounds: &CellBounds<T>, seed: u64, m_cap: u64) -> Result<Threshold> {
    let mut path = Vec::new();
    let mut probe = |m: u64| {
        let p = positive(bounds, m);
        path.push((m, p));
        p
    };
    let seed = seed.clamp(1, m_cap.max(1));
    // invariant: G(lo) ≤ 0 (lo = 0 stands for "none"), G(hi) > 0
    let (mut lo, mut hi);
    if probe(seed) {
        lo = 0;
        hi = seed;
    } else {
        lo = seed;
        loop {
            if lo >= m_cap {
                check_single_crossing(&mut path)?;
                return Ok(Threshold::Unbounded);
            }
            let next = lo.saturating_mul(2).min(m_cap);
            if probe(next) {
                hi = next;
                break;
            }
            lo = next;
        }
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if probe(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    check_single_crossing(&mut path)?;
    Ok(Threshold::Finite(hi))
}

fn search_seed<T: Real>(r0: T, n_s: T) -> u64 {
    asymptote_r0_near_1(n_s, T::one() - r0)
        .ok()
        .and_then(|a| a.ceil().to_u64())
        .unwrap_or(1)
        .max(1)
}

/// Smallest `M` with positive gain for an ideal cell at fixed bath, or
/// unbounded if none exists up to [`M_CAP`].
pub fn critical_m_at_noise<T: Real>(cell: &IdealCell<T>, n_s: T) -> Result<Threshold> {
    critical_m_at_noise_capped(cell, n_s, M_CAP)
}

/// As [`critical_m_at_noise`] with an explicit cap.
pub fn critical_m_at_noise_capped<T: Real>(
    cell: &IdealCell<T>,
    n_s: T,
    m_cap: u64,
) -> Result<Threshold> {
    check_energy(n_s)?;
    let bounds = CellBounds::ideal(cell, n_s);
    integer_threshold(&bounds, search_seed(cell.r0(), n_s), m_cap)
}

/// Continuous version of the threshold, used to steer the bath maximization
/// where the integer threshold is flat: the root of `ln C − ln Q` in `M`,
/// located inside `(m − 1, m]`.
fn real_threshold<T: Real>(bounds: &CellBounds<T>, th: Threshold) -> T {
    let m = match th {
        Threshold::Unbounded => return lit(f64::INFINITY),
        Threshold::Finite(1) => return T::one(),
        Threshold::Finite(m) => m,
    };
    let tol = lit::<T>(POSITIVE_TOL);
    let (mut lo, mut hi) = (m_real::<T>(m - 1), m_real::<T>(m));
    for _ in 0..60 {
        let mid = (lo + hi) * lit(0.5);
        if bounds.log_ratio(mid) > tol {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

struct Probe<T> {
    n_b: T,
    threshold: Threshold,
    real: T,
}

/// Critical signal number at reflectivity `r0`, maximized over the bath.
///
/// Every bath on a grid `{0} ∪ [1e-4, n_b_cap]` (log spaced) is tried, plus
/// the near-unit-reflectivity optimum `N_B* = N_S/(1 + 2N_S)`; the best grid
/// cell is then refined by golden section on `ln N_B`. The reported value is
/// the largest integer threshold among all baths probed.
pub fn critical_m<T: Real>(r0: T, n_s: T, opts: &SearchOptions<T>) -> Result<CriticalPoint<T>> {
    check_energy(n_s)?;
    if !(r0 >= T::zero() && r0 < T::one()) {
        return Err(domain_err("r0", to_f64(r0), "[0, 1)"));
    }
    if !(opts.n_b_cap > lit(N_B_GRID_MIN)) {
        return Err(domain_err("N_B cap", to_f64(opts.n_b_cap), "(1e-4, ∞)"));
    }
    let seed = search_seed(r0, n_s);
    let evaluate = |n_b: T| -> Result<Probe<T>> {
        let cell = IdealCell::new(r0, n_b)?;
        let bounds = CellBounds::ideal(&cell, n_s);
        let threshold = integer_threshold(&bounds, seed, opts.m_cap)?;
        Ok(Probe {
            n_b,
            threshold,
            real: real_threshold(&bounds, threshold),
        })
    };

    let mut baths = vec![T::zero()];
    let (lo, hi) = (lit::<T>(N_B_GRID_MIN).ln(), opts.n_b_cap.ln());
    let steps = opts.grid_points.max(2) - 1;
    for i in 0..=steps {
        let x = lo + (hi - lo) * from_usize::<T>(i) / from_usize::<T>(steps);
        baths.push(x.exp());
    }
    let grid_len = baths.len();
    let star = worst_bath_near_1(n_s);
    if star <= opts.n_b_cap {
        baths.push(star);
    }
    let mut probes = baths
        .into_iter()
        .map(evaluate)
        .collect::<Result<Vec<_>>>()?;

    let best = (0..probes.len())
        .max_by(|&a, &b| {
            probes[a]
                .real
                .partial_cmp(&probes[b].real)
                .expect("thresholds are not NaN")
        })
        .expect("grid is nonempty");
    let best_value = probes[best].real;
    if best_value.is_finite() && probes[best].n_b > T::zero() {
        // bracket by the neighbouring positive grid baths
        let target = probes[best].n_b;
        let grid = &probes[1..grid_len];
        let below = grid
            .iter()
            .map(|p| p.n_b)
            .filter(|&b| b < target)
            .fold(target * lit(0.5), |m, b| m.max(b));
        let above = grid
            .iter()
            .map(|p| p.n_b)
            .filter(|&b| b > target)
            .fold(opts.n_b_cap, |m, b| m.min(b));
        let mut extra = Vec::new();
        golden_section_max(
            |x: T| {
                let p = evaluate(x.exp())?;
                let v = p.real;
                extra.push(p);
                // unbounded beats everything; keep the search finite
                Ok(if v.is_finite() {
                    v
                } else {
                    T::max_value().unwrap_or(v)
                })
            },
            below.ln(),
            above.ln(),
            lit(1e-3),
        )?;
        probes.extend(extra);
    }

    let worst = probes
        .iter()
        .max_by(|a, b| {
            a.threshold
                .cmp(&b.threshold)
                .then(a.real.partial_cmp(&b.real).expect("thresholds are not NaN"))
        })
        .expect("grid is nonempty");
    Ok(CriticalPoint {
        r0,
        n_s,
        m_crit: worst.threshold,
        n_b_worst: worst.n_b,
        method: Method::ExactSearch,
    })
}

fn check_energy<T: Real>(n_s: T) -> Result<()> {
    if n_s > T::zero() && n_s.is_finite() {
        Ok(())
    } else {
        Err(domain_err("N_S", to_f64(n_s), "(0, ∞)"))
    }
}

/// Leading behaviour of the critical number as `r0 → 1`:
/// `[4 N_S (2N_S + 1) ε]^{−1}` with `ε = 1 − r0`.
pub fn asymptote_r0_near_1<T: Real>(n_s: T, epsilon: T) -> Result<T> {
    check_energy(n_s)?;
    if !(epsilon > T::zero()) {
        return Err(domain_err("epsilon", to_f64(epsilon), "(0, 1]"));
    }
    let four = lit::<T>(4.0);
    Ok((four * n_s * (lit::<T>(2.0) * n_s + T::one()) * epsilon).recip())
}

/// Bath maximizing [`kappa`], `N_B* = N_S / (1 + 2N_S)`.
pub fn worst_bath_near_1<T: Real>(n_s: T) -> T {
    n_s / (T::one() + lit::<T>(2.0) * n_s)
}

/// Second-order gain for `N_B = 0` and `r0 = 1 − ε`:
/// `M N_S (4 M N_S − 1) ε² / (8 ln 2)`.
pub fn gain_expansion_noiseless<T: Real>(m: T, n_s: T, epsilon: T) -> T {
    let mn = m * n_s;
    mn * (lit::<T>(4.0) * mn - T::one()) * epsilon * epsilon / (lit::<T>(8.0) * lit::<T>(2.0).ln())
}

/// Leading-order `Q − C` for `N_B > 0` and `r0 = 1 − ε`:
/// `½ [√(M N_B ε) − M (N_B + N_S + 2 N_B N_S) ε]`.
pub fn delta_expansion_thermal<T: Real>(m: T, n_s: T, n_b: T, epsilon: T) -> T {
    let s = n_b + n_s + lit::<T>(2.0) * n_b * n_s;
    lit::<T>(0.5) * ((m * n_b * epsilon).sqrt() - m * s * epsilon)
}

/// Zero of [`delta_expansion_thermal`] in `M`:
/// `κ(N_B) = N_B / [(N_B + N_S + 2 N_B N_S)² ε]`.
pub fn kappa<T: Real>(n_s: T, n_b: T, epsilon: T) -> T {
    let s = n_b + n_s + lit::<T>(2.0) * n_b * n_s;
    n_b / (s * s * epsilon)
}

/// Approximate critical number at `r0 = 0`, `N_B = 0`, from `Q = C^∞`:
/// `ln 2 / [2 ln(1 + N_S) − N_S]`. `None` once the denominator is no longer
/// positive. Only meaningful for `N_S ≥ 1`.
pub fn m_tilde<T: Real>(n_s: T) -> Result<Option<T>> {
    if !(n_s >= T::one()) || !n_s.is_finite() {
        return Err(Error::Regime(format!(
            "the r0 = 0 approximation needs N_S ≥ 1, got {}",
            to_f64(n_s)
        )));
    }
    let denom = lit::<T>(2.0) * n_s.ln_1p() - n_s;
    Ok((denom > T::zero()).then(|| lit::<T>(2.0).ln() / denom))
}

/// Energy at which [`m_tilde`] diverges: the positive root of
/// `2 ln(1 + N_S) = N_S`.
pub fn m_tilde_divergence<T: Real>() -> T {
    let f = |x: T| lit::<T>(2.0) * x.ln_1p() - x;
    let (mut lo, mut hi) = (lit::<T>(2.0), lit::<T>(3.0));
    for _ in 0..100 {
        let mid = (lo + hi) * lit(0.5);
        if f(mid) > T::zero() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo + hi) * lit(0.5)
}

/// [`CriticalPoint`] from the near-unit-reflectivity asymptote, at the bath
/// that maximizes it.
pub fn critical_point_near_1<T: Real>(r0: T, n_s: T) -> Result<CriticalPoint<T>> {
    let a = asymptote_r0_near_1(n_s, T::one() - r0)?;
    let m = a
        .ceil()
        .to_u64()
        .map_or(Threshold::Unbounded, |m| Threshold::Finite(m.max(1)));
    Ok(CriticalPoint {
        r0,
        n_s,
        m_crit: m,
        n_b_worst: worst_bath_near_1(n_s),
        method: Method::AsymptoteR0Near1,
    })
}

/// [`CriticalPoint`] at `r0 = 0` from [`m_tilde`], where the worst bath is
/// `N_B = 0`.
pub fn critical_point_r0_zero<T: Real>(n_s: T) -> Result<CriticalPoint<T>> {
    let m = match m_tilde(n_s)? {
        Some(v) => Threshold::Finite(v.ceil().to_u64().unwrap_or(u64::MAX).max(1)),
        None => Threshold::Unbounded,
    };
    Ok(CriticalPoint {
        r0: T::zero(),
        n_s,
        m_crit: m,
        n_b_worst: T::zero(),
        method: Method::AsymptoteR0Zero,
    })
}
