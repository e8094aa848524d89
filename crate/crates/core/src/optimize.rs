//! Bounded scalar minimization.

use crate::error::{Error, Result};
use crate::scalar::{lit, to_f64, Real};

/// Result of a bounded one-dimensional minimization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Minimum<T> {
    pub x: T,
    pub value: T,
    pub evaluations: usize,
}

/// Golden-section search for the minimum of a unimodal `f` on `[lo, hi]`,
/// stopping once the bracket is narrower than `tol`. The tolerance is raised
/// to a few ulps of the bracket when `T` cannot resolve it.
///
/// Both endpoints are evaluated as well, so a minimum sitting on the boundary
/// is returned exactly. A non-finite function value aborts the search.
pub fn golden_section<T: Real>(
    mut f: impl FnMut(T) -> Result<T>,
    lo: T,
    hi: T,
    tol: T,
) -> Result<Minimum<T>> {
    if !(lo <= hi) {
        return Err(Error::Minimizer(format!(
            "empty bracket [{}, {}]",
            to_f64(lo),
            to_f64(hi)
        )));
    }
    let mut evals = 0usize;
    let mut eval = |x: T, evals: &mut usize| -> Result<T> {
        *evals += 1;
        let v = f(x)?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Minimizer(format!(
                "non-finite objective at x = {}",
                to_f64(x)
            )))
        }
    };

    let scale = lo.abs().max(hi.abs()).max(T::one());
    let tol = tol.max(lit::<T>(4.0) * T::default_epsilon() * scale);
    let inv_phi = lit::<T>(0.618_033_988_749_894_9);
    let (mut a, mut b) = (lo, hi);
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let mut f1 = eval(x1, &mut evals)?;
    let mut f2 = eval(x2, &mut evals)?;

    while b - a > tol {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = eval(x1, &mut evals)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = eval(x2, &mut evals)?;
        }
        if evals > 10_000 || !(b - a).is_finite() {
            return Err(Error::Minimizer("iteration limit reached".into()));
        }
    }

    let mut best = if f1 <= f2 {
        Minimum {
            x: x1,
            value: f1,
            evaluations: 0,
        }
    } else {
        Minimum {
            x: x2,
            value: f2,
            evaluations: 0,
        }
    };
    for edge in [lo, hi] {
        let v = eval(edge, &mut evals)?;
        if v < best.value {
            best = Minimum {
                x: edge,
                value: v,
                evaluations: 0,
            };
        }
    }
    best.evaluations = evals;
    Ok(best)
}

/// Maximizes `f` on `[lo, hi]` by minimizing `-f`.
pub fn golden_section_max<T: Real>(
    mut f: impl FnMut(T) -> Result<T>,
    lo: T,
    hi: T,
    tol: T,
) -> Result<Minimum<T>> {
    let m = golden_section(|x| f(x).map(|v| -v), lo, hi, tol)?;
    Ok(Minimum {
        value: -m.value,
        ..m
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn parabola_interior() {
        let m = golden_section(|x: f64| Ok((x - 0.3) * (x - 0.3) + 1.0), 0.0, 1.0, 1e-10).unwrap();
        assert_relative_eq!(m.x, 0.3, epsilon = 1e-7);
        assert_relative_eq!(m.value, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn monotone_hits_boundary_exactly() {
        let m = golden_section(|x: f64| Ok(-x), 0.0, 1.0, 1e-10).unwrap();
        assert_eq!(m.x, 1.0);
        let m = golden_section(|x: f64| Ok(x), 0.25, 1.0, 1e-10).unwrap();
        assert_eq!(m.x, 0.25);
    }

    #[test]
    fn nan_is_reported() {
        let r = golden_section(|_x: f64| Ok(f64::NAN), 0.0, 1.0, 1e-6);
        assert!(matches!(r, Err(Error::Minimizer(_))));
    }

    #[test]
    fn maximize() {
        let m = golden_section_max(|x: f64| Ok(-(x - 2.0).powi(2)), 0.0, 5.0, 1e-9).unwrap();
        assert_relative_eq!(m.x, 2.0, epsilon = 1e-7);
    }
}
