//! Agreement of the Gaussian formulas with the truncated Fock-space oracle.

use std::io::Write;
use std::time::{Duration, Instant};

use qreading::bounds::{gaussian_fidelity_1mode, s_overlap_gaussian, CellBounds};
use qreading::channel::{coherent_outputs, theta_states, MemoryCell};
use qreading::fock::{
    coherent_outputs_fock, helstrom_error_fock, oracle_cutoff, theta_states_fock, tmsv_fock,
    uhlmann_fidelity_fock, ChernoffSpectra, OVERLAP_TAIL,
};
use rayon::prelude::*;

use crate::commands::pool;
use crate::config::{GridDensity, SweepConfig};
use crate::error::Result;
use crate::format::real;

pub const S_OVERLAP_TOL: f64 = 1e-6;
pub const FIDELITY_TOL: f64 = 1e-7;
pub const TRACE_TOL: f64 = 1e-9;
pub const SANDWICH_TOL: f64 = 1e-9;

/// Tail used to pick the coherent-probe cutoff.
const FIDELITY_TAIL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyGrid {
    pub r0: Vec<f64>,
    pub r1: Vec<f64>,
    pub n_b: Vec<f64>,
    pub n_s: Vec<f64>,
    pub s: Vec<f64>,
}

impl VerifyGrid {
    pub fn new(density: GridDensity) -> Self {
        match density {
            GridDensity::Default => Self {
                r0: vec![0.0, 0.3, 0.7],
                r1: vec![0.8, 1.0],
                n_b: vec![0.0, 0.01, 0.5],
                n_s: vec![0.05, 0.5, 1.5],
                s: vec![0.2, 0.5, 0.8],
            },
            GridDensity::Fine => Self {
                r0: vec![0.0, 0.15, 0.3, 0.5, 0.7],
                r1: vec![0.8, 0.9, 1.0],
                n_b: vec![0.0, 0.01, 0.1, 0.5],
                n_s: vec![0.05, 0.2, 0.5, 1.0, 1.5],
                s: vec![0.2, 0.35, 0.5, 0.65, 0.8],
            },
        }
    }

    /// The density's grid with any axis replaced by the corresponding sweep
    /// list, if one was given.
    pub fn from_config(cfg: &SweepConfig) -> Self {
        let mut g = Self::new(cfg.grid);
        for (axis, given) in [
            (&mut g.r0, &cfg.r0),
            (&mut g.r1, &cfg.r1),
            (&mut g.n_b, &cfg.n_b),
            (&mut g.n_s, &cfg.n_s),
        ] {
            if !given.is_empty() {
                axis.clone_from(given);
            }
        }
        g
    }

    /// Cells with `r0 ≤ r1`, paired with each signal energy.
    fn points(&self) -> Result<Vec<(MemoryCell<f64>, f64)>> {
        let mut out = Vec::new();
        for &r0 in &self.r0 {
            for &r1 in self.r1.iter().filter(|&&r1| r1 >= r0) {
                for &n_b in &self.n_b {
                    for &n_s in &self.n_s {
                        out.push((MemoryCell::new(r0, r1, n_b)?, n_s));
                    }
                }
            }
        }
        Ok(out)
    }
}

/// Worst case of one check over the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub tolerance: f64,
    pub worst: f64,
    /// Parameter point and the two compared values at the worst case.
    pub witness: String,
}

impl CheckResult {
    fn new(name: &'static str, tolerance: f64) -> Self {
        Self {
            name,
            tolerance,
            worst: 0.0,
            witness: String::from("-"),
        }
    }

    fn absorb(&mut self, deviation: f64, witness: impl FnOnce() -> String) {
        // NaN counts as a failure
        if deviation.is_nan() || deviation > self.worst {
            self.worst = deviation;
            self.witness = witness();
        }
    }

    pub fn passed(&self) -> bool {
        self.worst < self.tolerance
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub checks: Vec<CheckResult>,
    pub points: usize,
    pub elapsed: Duration,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(CheckResult::passed)
    }

    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }
}

fn fresh_checks() -> Vec<CheckResult> {
    vec![
        CheckResult::new("s-overlap", S_OVERLAP_TOL),
        CheckResult::new("fidelity", FIDELITY_TOL),
        CheckResult::new("trace", TRACE_TOL),
        CheckResult::new("helstrom-sandwich", SANDWICH_TOL),
    ]
}

fn label(cell: &MemoryCell<f64>, n_s: f64) -> String {
    format!(
        "r0={} r1={} N_B={} N_S={}",
        real(cell.r0()),
        real(cell.r1()),
        real(cell.n_b()),
        real(n_s)
    )
}

fn check_point(
    cell: &MemoryCell<f64>,
    n_s: f64,
    s_values: &[f64],
    cfg: &SweepConfig,
) -> Result<Vec<CheckResult>> {
    let mut checks = fresh_checks();
    let at = label(cell, n_s);
    let tail_tol = cfg.tail_tol;

    let d = cfg
        .cutoff
        .unwrap_or_else(|| oracle_cutoff(n_s, cell.n_b(), OVERLAP_TAIL));
    let (g0, g1) = theta_states(cell, n_s)?;
    let (f0, f1) = theta_states_fock(cell, n_s, d, tail_tol)?;
    let spectra = ChernoffSpectra::new(&f0, &f1)?;
    for &s in s_values {
        let g = s_overlap_gaussian(&g0, &g1, s)?;
        let f = spectra.overlap(s)?;
        checks[0].absorb((g - f).abs(), || {
            format!(
                "{at} s={} cutoff={d}: gaussian={} fock={}",
                real(s),
                real(g),
                real(f)
            )
        });
    }

    let dc = cfg
        .cutoff
        .unwrap_or_else(|| oracle_cutoff(n_s, cell.n_b(), FIDELITY_TAIL));
    let (c0, c1) = coherent_outputs(cell, n_s)?;
    let (h0, h1) = coherent_outputs_fock(cell, n_s, dc, tail_tol)?;
    let g = gaussian_fidelity_1mode(&c0, &c1)?;
    let f = uhlmann_fidelity_fock(&h0, &h1)?;
    checks[1].absorb((g - f).abs(), || {
        format!("{at} cutoff={dc}: gaussian={} fock={}", real(g), real(f))
    });

    let input = tmsv_fock(n_s, d, tail_tol)?.norm_sqr();
    for (u, theta) in [(0, &f0), (1, &f1)] {
        let out = theta.trace();
        checks[2].absorb((out - input).abs(), || {
            format!(
                "{at} u={u} cutoff={d}: input={} output={}",
                real(input),
                real(out)
            )
        });
    }

    // C ≤ P_class and P_quant ≤ Q for a single copy
    let bounds = CellBounds::new(cell, n_s)?;
    let p_class = helstrom_error_fock(&h0, &h1)?;
    let p_quant = helstrom_error_fock(&f0, &f1)?;
    let c = bounds.classical_bound(1.0);
    let q = bounds.quantum_bound(1.0);
    checks[3].absorb((c - p_class).max(0.0), || {
        format!("{at}: C={} helstrom_class={}", real(c), real(p_class))
    });
    checks[3].absorb((p_quant - q).max(0.0), || {
        format!("{at}: helstrom_quant={} Q={}", real(p_quant), real(q))
    });
    Ok(checks)
}

pub fn run_verify(cfg: &SweepConfig) -> Result<VerifyReport> {
    let start = Instant::now();
    let grid = VerifyGrid::from_config(cfg);
    let points = grid.points()?;
    let per_point = pool(cfg.jobs)?.install(|| {
        points
            .par_iter()
            .map(|(cell, n_s)| check_point(cell, *n_s, &grid.s, cfg))
            .collect::<Result<Vec<_>>>()
    })?;
    let mut checks = fresh_checks();
    // fold in grid order so ties resolve the same way on every run
    for point in per_point {
        for (total, part) in checks.iter_mut().zip(point) {
            total.absorb(part.worst, || part.witness);
        }
    }
    Ok(VerifyReport {
        checks,
        points: points.len(),
        elapsed: start.elapsed(),
    })
}

pub fn print_report(report: &VerifyReport, out: &mut dyn Write) -> Result<()> {
    for c in &report.checks {
        writeln!(
            out,
            "{:<18} worst {:<10.3e} tol {:<8.1e} {}  at {}",
            c.name,
            c.worst,
            c.tolerance,
            if c.passed() { "PASS" } else { "FAIL" },
            c.witness
        )?;
    }
    writeln!(
        out,
        "{} grid points in {:.1} s: {}",
        report.points,
        report.elapsed.as_secs_f64(),
        if report.passed() {
            "all checks pass"
        } else {
            "FAILED"
        }
    )?;
    Ok(())
}

pub fn cmd_verify(cfg: &SweepConfig, stdout: &mut dyn Write) -> Result<bool> {
    let report = run_verify(cfg)?;
    print_report(&report, stdout)?;
    Ok(report.passed())
}
