//! Gaussian closed forms against brute-force truncated Fock computations.

use std::collections::HashMap;

use approx::assert_relative_eq;
use num_complex::Complex;
use qreading::bounds::{
    chernoff_minimum, classical_bound, fidelity_ideal, gaussian_fidelity_1mode,
    quantum_chernoff_bound, s_overlap_gaussian,
};
use qreading::channel::apply_lossy_channel;
use qreading::channel::{coherent_outputs, theta_states, IdealCell, MemoryCell, SignalProfile};
use qreading::fock::{
    coherent_fock, coherent_outputs_fock, helstrom_error_fock, lossy_channel_fock, oracle_cutoff,
    s_overlap_fock, theta_states_fock, tmsv_fock, trace_norm_fock, uhlmann_fidelity_fock,
    ChernoffSpectra, FockOperator, OVERLAP_TAIL, TAIL_TOL,
};
use qreading::gaussian::tmsv;

const R0: [f64; 3] = [0.0, 0.3, 0.7];
const R1: [f64; 2] = [0.8, 1.0];
const NB: [f64; 3] = [0.0, 0.01, 0.5];
const NS: [f64; 3] = [0.05, 0.5, 1.5];
const S: [f64; 3] = [0.2, 0.5, 0.8];

fn grid() -> impl Iterator<Item = (MemoryCell<f64>, f64)> {
    R0.into_iter().flat_map(|r0| {
        R1.into_iter().flat_map(move |r1| {
            NB.into_iter().flat_map(move |n_b| {
                NS.into_iter()
                    .map(move |n_s| (MemoryCell::new(r0, r1, n_b).unwrap(), n_s))
            })
        })
    })
}

#[test]
fn s_overlap_agrees_with_fock_on_grid() {
    let mut worst = (0.0f64, String::new());
    for (cell, n_s) in grid() {
        let (g0, g1) = theta_states(&cell, n_s).unwrap();
        let d = oracle_cutoff(n_s, cell.n_b(), OVERLAP_TAIL);
        let (f0, f1) = theta_states_fock(&cell, n_s, d, TAIL_TOL).unwrap();
        let spectra = ChernoffSpectra::new(&f0, &f1).unwrap();
        for s in S {
            let g = s_overlap_gaussian(&g0, &g1, s).unwrap();
            let f = spectra.overlap(s).unwrap();
            let dev = (g - f).abs();
            if dev > worst.0 {
                worst = (dev, format!("{cell:?} N_S={n_s} s={s} d={d}: {g} vs {f}"));
            }
        }
    }
    assert!(
        worst.0 < 1e-6,
        "worst s-overlap deviation {:.3e} at {}",
        worst.0,
        worst.1
    );
}

#[test]
fn fidelity_agrees_with_uhlmann_on_grid() {
    let mut worst = 0.0f64;
    for (cell, n_s) in grid() {
        let (g0, g1) = coherent_outputs(&cell, n_s).unwrap();
        let d = oracle_cutoff(n_s, cell.n_b(), 1e-12);
        let (f0, f1) = coherent_outputs_fock(&cell, n_s, d, TAIL_TOL).unwrap();
        let g = gaussian_fidelity_1mode(&g0, &g1).unwrap();
        let f = uhlmann_fidelity_fock(&f0, &f1).unwrap();
        assert!((g - f).abs() < 1e-7, "{cell:?} N_S={n_s}: {g} vs {f}");
        worst = worst.max((g - f).abs());
    }
    assert!(worst < 1e-8, "worst fidelity deviation {worst:.3e}");
}

#[test]
fn channel_preserves_trace_on_grid() {
    for (cell, n_s) in grid() {
        let d = oracle_cutoff(n_s, cell.n_b(), 1e-10);
        let input = FockOperator::from_pure(&tmsv_fock(n_s, d, TAIL_TOL).unwrap());
        for r in [cell.r0(), cell.r1()] {
            let out = lossy_channel_fock(&input, 0, r, cell.n_b(), d, TAIL_TOL).unwrap();
            assert!(
                (out.trace() - input.trace()).abs() < 1e-9,
                "{cell:?} N_S={n_s} r={r}: {} → {}",
                input.trace(),
                out.trace()
            );
        }
    }
}

#[test]
fn doubling_the_cutoff_changes_nothing() {
    let points = [
        (MemoryCell::new(0.3, 0.8, 0.5).unwrap(), 0.5),
        (MemoryCell::new(0.0, 1.0, 0.01).unwrap(), 1.5),
        (MemoryCell::new(0.7, 1.0, 0.0).unwrap(), 0.05),
    ];
    for (cell, n_s) in points {
        let d = oracle_cutoff(n_s, cell.n_b(), 1e-10);
        let mut out = Vec::new();
        for dd in [d, 2 * d] {
            let (t0, t1) = theta_states_fock(&cell, n_s, dd, TAIL_TOL).unwrap();
            let (c0, c1) = coherent_outputs_fock(&cell, n_s, dd, TAIL_TOL).unwrap();
            out.push([
                s_overlap_fock(&t0, &t1, 0.5).unwrap(),
                uhlmann_fidelity_fock(&c0, &c1).unwrap(),
                helstrom_error_fock(&t0, &t1).unwrap(),
                helstrom_error_fock(&c0, &c1).unwrap(),
                t0.trace(),
            ]);
        }
        for (a, b) in out[0].iter().zip(&out[1]) {
            assert!((a - b).abs() < 1e-7, "{cell:?} N_S={n_s} d={d}: {a} vs {b}");
        }
    }
}

#[test]
fn overlap_at_high_energy_table_point() {
    let cell = MemoryCell::new(0.5, 0.95, 0.01).unwrap();
    let n_s = 3.5;
    let (g0, g1) = theta_states(&cell, n_s).unwrap();
    let d = oracle_cutoff(n_s, cell.n_b(), OVERLAP_TAIL);
    let (f0, f1) = theta_states_fock(&cell, n_s, d, TAIL_TOL).unwrap();
    let g = s_overlap_gaussian(&g0, &g1, 0.5).unwrap();
    let f = s_overlap_fock(&f0, &f1, 0.5).unwrap();
    assert!((g - f).abs() < 1e-7, "{g} vs {f} at d={d}");

    let (c0, c1) = coherent_outputs(&cell, n_s).unwrap();
    let dc = oracle_cutoff(n_s, cell.n_b(), 1e-12);
    let (h0, h1) = coherent_outputs_fock(&cell, n_s, dc, TAIL_TOL).unwrap();
    let g = gaussian_fidelity_1mode(&c0, &c1).unwrap();
    let f = uhlmann_fidelity_fock(&h0, &h1).unwrap();
    assert!((g - f).abs() < 1e-8, "{g} vs {f} at d={dc}");
}

#[test]
fn overlap_at_low_energy_point() {
    let cell = MemoryCell::new(0.5, 0.95, 0.01).unwrap();
    let n_s = 0.5;
    let (g0, g1) = theta_states(&cell, n_s).unwrap();
    let d = oracle_cutoff(n_s, cell.n_b(), OVERLAP_TAIL);
    let (f0, f1) = theta_states_fock(&cell, n_s, d, TAIL_TOL).unwrap();
    let g = s_overlap_gaussian(&g0, &g1, 0.3).unwrap();
    let f = s_overlap_fock(&f0, &f1, 0.3).unwrap();
    assert!((g - f).abs() < 1e-6, "{g} vs {f}");
}

#[test]
fn uhlmann_matches_ideal_closed_form() {
    let ideal = IdealCell::new(0.3, 0.2).unwrap();
    let n_s = 0.4;
    let d = oracle_cutoff(n_s, ideal.n_b(), 1e-12);
    let (f0, f1) = coherent_outputs_fock(&ideal.cell(), n_s, d, TAIL_TOL).unwrap();
    let f = uhlmann_fidelity_fock(&f0, &f1).unwrap();
    assert!((f - fidelity_ideal(&ideal, n_s)).abs() < 1e-7);
}

#[test]
fn pure_state_overlaps_are_s_independent() {
    let d = 40;
    let a = coherent_fock(Complex::new(0.0, 0.0), d, 1e-12).unwrap();
    let b = coherent_fock(Complex::new(0.8, -0.3), d, 1e-12).unwrap();
    let (ra, rb) = (FockOperator::from_pure(&a), FockOperator::from_pure(&b));
    let expect = (-(0.64f64 + 0.09)).exp();
    for s in [0.1, 0.5, 0.9] {
        assert_relative_eq!(
            s_overlap_fock(&ra, &rb, s).unwrap(),
            expect,
            epsilon = 1e-10
        );
    }
    assert_relative_eq!(
        uhlmann_fidelity_fock(&ra, &rb).unwrap(),
        expect,
        epsilon = 1e-10
    );
    assert_relative_eq!(s_overlap_fock(&rb, &rb, 0.4).unwrap(), 1.0, epsilon = 1e-10);
}

#[test]
fn helstrom_sandwich() {
    for (cell, n_s) in grid().step_by(5) {
        let profile = SignalProfile::new(1, n_s).unwrap();
        let d = oracle_cutoff(n_s, cell.n_b(), 1e-10);
        let (c0, c1) = coherent_outputs_fock(&cell, n_s, d, TAIL_TOL).unwrap();
        let (t0, t1) = theta_states_fock(&cell, n_s, d, TAIL_TOL).unwrap();
        let p_class = helstrom_error_fock(&c0, &c1).unwrap();
        let p_quant = helstrom_error_fock(&t0, &t1).unwrap();
        let c = classical_bound(&cell, &profile).unwrap();
        let (q, _) = quantum_chernoff_bound(&cell, &profile).unwrap();
        assert!(c <= p_class + 1e-9, "{cell:?} N_S={n_s}: C={c} > {p_class}");
        assert!(p_quant <= q + 1e-9, "{cell:?} N_S={n_s}: {p_quant} > Q={q}");

        // Helstrom error never exceeds half the minimized Fock overlap.
        let (g0, g1) = theta_states(&cell, n_s).unwrap();
        let s_opt = chernoff_minimum(&g0, &g1)
            .unwrap()
            .s_opt
            .clamp(1e-6, 1.0 - 1e-6);
        let fock_min = s_overlap_fock(&t0, &t1, s_opt).unwrap();
        assert!(p_quant <= 0.5 * fock_min + 1e-9);
    }
}

/// Pure loss in Kraus form, `A_l|n⟩ = √(C(n,l) r^{n−l} (1−r)^l) |n−l⟩`, applied
/// to the signal of a truncated TMSV.
fn pure_loss_kraus(n_s: f64, r: f64, d: usize) -> FockOperator<f64> {
    let lambda = n_s / (1.0 + n_s);
    let c: Vec<f64> = (0..d)
        .map(|n| (1.0 - lambda).sqrt() * lambda.sqrt().powi(n as i32))
        .collect();
    let ln_fact: Vec<f64> = std::iter::once(0.0)
        .chain((1..d).scan(0.0, |acc, k| {
            *acc += (k as f64).ln();
            Some(*acc)
        }))
        .collect();
    let amp = |n: usize, l: usize| -> f64 {
        let ln_binom = ln_fact[n] - ln_fact[l] - ln_fact[n - l];
        let ln_r = if n > l { (n - l) as f64 * r.ln() } else { 0.0 };
        let ln_t = if l > 0 {
            l as f64 * (1.0 - r).ln()
        } else {
            0.0
        };
        (0.5 * (ln_binom + ln_r + ln_t)).exp()
    };
    let mut entries = HashMap::new();
    for l in 0..d {
        for n in l..d {
            for m in l..d {
                let v = c[n] * amp(n, l) * c[m] * amp(m, l);
                *entries
                    .entry(((n - l) * d + n, (m - l) * d + m))
                    .or_insert(0.0) += v;
            }
        }
    }
    FockOperator::from_entries(
        2,
        d,
        entries.into_iter().map(|(k, v)| (k, Complex::new(v, 0.0))),
    )
    .unwrap()
}

#[test]
fn dilation_matches_kraus_form_of_pure_loss() {
    for (n_s, r) in [(1.0, 0.5), (0.3, 0.8), (2.0, 0.1)] {
        let d = 25;
        let rho = FockOperator::from_pure(&tmsv_fock(n_s, d, 1.0).unwrap());
        let out = lossy_channel_fock(&rho, 0, r, 0.0, d, 1e-6).unwrap();
        let kraus = pure_loss_kraus(n_s, r, d);
        let dist = trace_norm_fock(&out, &kraus).unwrap();
        assert!(dist < 1e-8, "N_S={n_s} r={r}: trace norm {dist:.3e}");
    }
}

#[test]
fn lossy_tmsv_matches_gaussian_channel() {
    // tmsv(1) through r = 0.5 without noise.
    let d = oracle_cutoff(1.0, 0.0, 1e-12);
    let rho = FockOperator::from_pure(&tmsv_fock(1.0, d, TAIL_TOL).unwrap());
    let out = lossy_channel_fock(&rho, 0, 0.5, 0.0, d, TAIL_TOL).unwrap();
    let (mean, cov) = out.gaussian_moments();
    let gauss = apply_lossy_channel(&tmsv(1.0).unwrap(), 0, 0.5, 0.0).unwrap();
    assert!(mean.iter().all(|m| m.abs() < 1e-12));
    assert!((cov - gauss.cov()).amax() < 1e-8);
}
