use approx::assert_relative_eq;
use nalgebra::DMatrix;
use proptest::prelude::*;
use qreading::channel::{apply_lossy_channel, coherent_outputs, theta_states, MemoryCell};
use qreading::gaussian::{coherent, thermal, tmsv, vacuum, GaussianState, SymplecticForm};

/// Symplectic eigenvalues by the textbook route: moduli of the eigenvalues of
/// `Ω V`, which come in pairs `±iν`.
fn generic_spectrum(state: &GaussianState<f64>) -> Vec<f64> {
    let omega = SymplecticForm::new(state.n_modes()).matrix::<f64>();
    let m: DMatrix<f64> = omega * state.cov();
    let mut moduli: Vec<f64> = m.complex_eigenvalues().iter().map(|z| z.norm()).collect();
    moduli.sort_by(|a, b| b.partial_cmp(a).unwrap());
    moduli.chunks(2).map(|p| 0.5 * (p[0] + p[1])).collect()
}

fn det_identity_holds(state: &GaussianState<f64>) {
    let nu = state.symplectic_eigenvalues();
    let prod: f64 = nu.iter().map(|x| x * x).product();
    assert_relative_eq!(state.cov().determinant(), prod, max_relative = 1e-9);
}

#[test]
fn symplectic_form_identities() {
    for n in 1..=3 {
        let omega = SymplecticForm::new(n).matrix::<f64>();
        let id = DMatrix::<f64>::identity(2 * n, 2 * n);
        assert_eq!(&omega * &omega, -id);
        assert_eq!(omega.transpose(), -omega);
    }
}

#[test]
fn spectrum_matches_generic_eigenvalues() {
    let cell = MemoryCell::new(0.5, 0.95, 0.01).unwrap();
    let (t0, t1) = theta_states(&cell, 1.0).unwrap();
    for st in [&t0, &t1] {
        let nu = st.symplectic_eigenvalues();
        let generic = generic_spectrum(st);
        assert_eq!(nu.len(), 2);
        for (a, b) in nu.iter().zip(&generic) {
            assert_relative_eq!(*a, *b, max_relative = 1e-10);
        }
        assert!(nu[0] >= nu[1]);
        det_identity_holds(st);
        // ν₁ν₂ = √det V
        assert_relative_eq!(
            nu[0] * nu[1],
            st.cov().determinant().sqrt(),
            max_relative = 1e-9
        );
    }
}

#[test]
fn basic_state_spectra() {
    assert_eq!(
        vacuum::<f64>(2).unwrap().symplectic_eigenvalues(),
        vec![1.0, 1.0]
    );
    assert_relative_eq!(
        thermal(1.0f64).unwrap().symplectic_eigenvalues()[0],
        3.0,
        epsilon = 1e-12
    );
    let c = coherent(1.0f64, 0.0);
    assert_eq!(c.mean().as_slice(), &[2.0, 0.0]);
    assert_eq!(c.cov(), &DMatrix::identity(2, 2));
    assert_eq!(coherent(0.0f64, 0.0), vacuum(1).unwrap());
    assert_relative_eq!(
        coherent(1.0f64, 0.0).mean_photons(0).unwrap(),
        1.0,
        epsilon = 1e-15
    );
    assert_eq!(vacuum::<f64>(1).unwrap().mean_photons(0).unwrap(), 0.0);
    assert!(vacuum::<f64>(0).is_err());
    assert!(tmsv(-0.1f64).is_err());
    assert!(vacuum::<f64>(1).unwrap().mean_photons(1).is_err());
}

#[test]
fn tmsv_is_pure_with_correct_energy() {
    assert_eq!(tmsv(0.0f64).unwrap(), vacuum(2).unwrap());
    for n_s in [0.0f64, 0.01, 0.1, 1.0, 3.5, 10.0] {
        let st = tmsv(n_s).unwrap();
        for nu in st.symplectic_eigenvalues() {
            assert!((nu - 1.0).abs() < 1e-9, "N_S={n_s}: ν={nu}");
        }
        assert!(st.is_pure());
        for k in 0..2 {
            assert_relative_eq!(st.mean_photons(k).unwrap(), n_s, epsilon = 1e-12);
        }
        det_identity_holds(&st);
    }
}

#[test]
fn theta_states_are_bona_fide_on_grid() {
    for r in [0.0, 0.25, 0.5, 0.75, 0.995] {
        for n_b in [0.0, 0.01, 1.0] {
            for n_s in [0.01, 0.1, 1.0, 3.5] {
                let cell = MemoryCell::new(r, 1.0, n_b).unwrap();
                let (t0, t1) = theta_states(&cell, n_s).unwrap();
                for st in [&t0, &t1] {
                    assert!(st
                        .symplectic_eigenvalues()
                        .iter()
                        .all(|&nu| nu >= 1.0 - 1e-9));
                    assert!(st.mean().iter().all(|&m| m == 0.0));
                    det_identity_holds(st);
                }
            }
        }
    }
}

#[test]
fn theta_states_at_the_extremes() {
    let n_s = 0.7;
    let cell = MemoryCell::new(0.0, 1.0, 0.0).unwrap();
    let (t0, t1) = theta_states(&cell, n_s).unwrap();
    assert_eq!(t1, tmsv(n_s).unwrap());
    let mu = 2.0 * n_s + 1.0;
    let expect = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 1.0, mu, mu]));
    assert_relative_eq!(t0.cov().clone(), expect, epsilon = 1e-15);

    let same = MemoryCell::new(0.4, 0.4, 0.2).unwrap();
    let (a, b) = theta_states(&same, n_s).unwrap();
    assert_eq!(a, b);
}

#[test]
fn lossy_channel_block_formulas() {
    for r in [0.0, 0.3, 1.0] {
        let out = apply_lossy_channel(&vacuum(1).unwrap(), 0, r, 0.4).unwrap();
        let v = 1.0 + 2.0 * (1.0 - r) * 0.4;
        assert_relative_eq!(
            out.cov().clone(),
            DMatrix::identity(2, 2) * v,
            epsilon = 1e-15
        );
    }
    let st = tmsv(1.0f64).unwrap();
    assert_eq!(apply_lossy_channel(&st, 1, 1.0, 3.0).unwrap(), st);

    let out = apply_lossy_channel(&st, 0, 0.5, 0.0).unwrap();
    let c = 2.0 * 2.0f64.sqrt() / 2.0f64.sqrt();
    let expect = DMatrix::from_row_slice(
        4,
        4,
        &[
            2.0, 0.0, c, 0.0, //
            0.0, 2.0, 0.0, -c, //
            c, 0.0, 3.0, 0.0, //
            0.0, -c, 0.0, 3.0,
        ],
    );
    assert_relative_eq!(out.cov().clone(), expect, epsilon = 1e-12);

    assert!(apply_lossy_channel(&st, 0, 1.5, 0.0).is_err());
    assert!(apply_lossy_channel(&st, 0, 0.5, -1.0).is_err());
    assert!(apply_lossy_channel(&st, 2, 0.5, 0.0).is_err());
}

#[test]
fn coherent_outputs_moments() {
    let cell = MemoryCell::new(0.25, 0.85, 0.01).unwrap();
    let n_s = 0.1f64;
    let (c0, c1) = coherent_outputs(&cell, n_s).unwrap();
    for (st, r) in [(&c0, 0.25), (&c1, 0.85)] {
        assert_relative_eq!(st.mean()[0], 2.0 * (r * n_s).sqrt(), epsilon = 1e-15);
        assert_eq!(st.mean()[1], 0.0);
        let v = 1.0 + 2.0 * (1.0 - r) * 0.01;
        assert_relative_eq!(
            st.cov().clone(),
            DMatrix::identity(2, 2) * v,
            epsilon = 1e-15
        );
    }
    let noiseless = MemoryCell::new(0.25, 0.85, 0.0).unwrap();
    let (c0, _) = coherent_outputs(&noiseless, n_s).unwrap();
    assert_eq!(c0.cov(), &DMatrix::identity(2, 2));
}

#[test]
fn output_energy_under_pure_loss() {
    let st = tmsv(1.3f64).unwrap();
    for r in [0.0, 0.2, 0.5, 0.9, 1.0] {
        let out = apply_lossy_channel(&st, 0, r, 0.0).unwrap();
        assert_relative_eq!(out.mean_photons(0).unwrap(), r * 1.3, epsilon = 1e-12);
    }
}

#[test]
fn cell_validation() {
    assert!(MemoryCell::new(0.6, 0.5, 0.0).is_err());
    assert!(MemoryCell::new(-0.1, 0.5, 0.0).is_err());
    assert!(MemoryCell::new(0.1, 1.1, 0.0).is_err());
    assert!(MemoryCell::new(0.1, 0.5, -0.01).is_err());
}

fn state_strategy() -> impl Strategy<Value = GaussianState<f64>> {
    (0.0..4.0f64, -2.0..2.0f64, 0.0..1.0f64, 0.0..2.0f64).prop_map(|(n_s, a, r, n_b)| {
        let st = tmsv(n_s).unwrap().tensor(&coherent(a, -0.5 * a));
        apply_lossy_channel(&st, 0, r, n_b).unwrap()
    })
}

proptest! {
    #[test]
    fn composition_of_pure_loss(n_s in 0.0..4.0f64, ra in 0.0..=1.0f64, rb in 0.0..=1.0f64, a in -2.0..2.0f64) {
        let st = tmsv(n_s).unwrap().tensor(&coherent(a, 0.3));
        for mode in [0, 2] {
            let twice = apply_lossy_channel(&apply_lossy_channel(&st, mode, ra, 0.0).unwrap(), mode, rb, 0.0).unwrap();
            let once = apply_lossy_channel(&st, mode, ra * rb, 0.0).unwrap();
            prop_assert!((twice.cov() - once.cov()).amax() < 1e-12);
            prop_assert!((twice.mean() - once.mean()).amax() < 1e-12);
        }
    }

    #[test]
    fn channel_outputs_are_bona_fide(st in state_strategy()) {
        let nu = st.symplectic_eigenvalues();
        prop_assert_eq!(nu.len(), 3);
        prop_assert!(nu.iter().all(|&x| x >= 1.0 - 1e-9));
        let prod: f64 = nu.iter().map(|x| x * x).product();
        prop_assert!((st.cov().determinant() / prod - 1.0).abs() < 1e-9);
        for k in 0..3 {
            prop_assert!(st.mean_photons(k).unwrap() >= 0.0);
        }
    }

    #[test]
    fn spectrum_agrees_with_generic_route(st in state_strategy()) {
        for (a, b) in st.symplectic_eigenvalues().iter().zip(generic_spectrum(&st)) {
            prop_assert!((a - b).abs() < 1e-9 * b);
        }
    }
}

#[test]
fn single_precision_path() {
    let st = tmsv(1.0f32).unwrap();
    for nu in st.symplectic_eigenvalues() {
        assert!((nu - 1.0).abs() < 1e-4);
    }
    let cell = MemoryCell::<f32>::new(0.3, 1.0, 0.1).unwrap();
    let (t0, _) = theta_states(&cell, 0.5f32).unwrap();
    assert!(t0.symplectic_eigenvalues().iter().all(|&x| x >= 1.0 - 1e-4));
}
