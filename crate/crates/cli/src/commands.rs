use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use qreading::bounds::CellBounds;
use qreading::channel::{IdealCell, MemoryCell};
use qreading::critical::{critical_m, critical_m_at_noise_capped, m_tilde, SearchOptions};
use qreading::GainReport;
use rayon::prelude::*;
use rayon::ThreadPool;

use crate::config::SweepConfig;
use crate::error::{flag_err, Result};
use crate::format::{real, threshold};

pub const GAIN_HEADER: [&str; 11] = [
    "M", "N_S", "r0", "r1", "N_B", "F", "C", "Q", "J_class", "J_quant", "G",
];
pub const CURVE_HEADER: [&str; 4] = ["N_S", "r0", "M_crit", "N_B_worst"];
pub const ENERGY_HEADER: [&str; 4] = ["N_S", "M_exact", "M_tilde", "ceil_M_tilde"];

/// One row of the reference table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TableRow {
    pub m: u64,
    pub n_s: f64,
    pub r0: f64,
    pub r1: f64,
    pub n_b: f64,
    /// Gain as quoted in the reference table, in bits.
    pub g_ref: f64,
}

#[rustfmt::skip]
pub const TABLE: [TableRow; 6] = [
    TableRow { m: 1, n_s: 3.5, r0: 0.5, r1: 0.95, n_b: 0.01, g_ref: 6.2e-3 },
    TableRow { m: 10, n_s: 1.0, r0: 0.2, r1: 0.8, n_b: 0.01, g_ref: 3.4e-2 },
    TableRow { m: 30, n_s: 1.0, r0: 0.38, r1: 0.85, n_b: 1.0, g_ref: 1.2e-3 },
    TableRow { m: 100, n_s: 0.1, r0: 0.25, r1: 0.85, n_b: 0.01, g_ref: 5.9e-2 },
    TableRow { m: 200, n_s: 0.1, r0: 0.6, r1: 0.95, n_b: 0.01, g_ref: 0.22 },
    TableRow { m: 200_000, n_s: 0.01, r0: 0.995, r1: 1.0, n_b: 0.0, g_ref: 0.99 },
];

/// A gain evaluation together with its inputs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GainPoint {
    pub m: u64,
    pub n_s: f64,
    pub r0: f64,
    pub r1: f64,
    pub n_b: f64,
    pub report: GainReport,
}

impl GainPoint {
    fn record(&self) -> Vec<String> {
        let r = &self.report;
        vec![
            self.m.to_string(),
            real(self.n_s),
            real(self.r0),
            real(self.r1),
            real(self.n_b),
            real(r.f),
            real(r.c),
            real(r.q),
            real(r.j_class),
            real(r.j_quant),
            real(r.g),
        ]
    }
}

/// Critical number at one reflectivity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub n_s: f64,
    pub r0: f64,
    pub m_crit: qreading::critical::Threshold,
    pub n_b_worst: f64,
}

/// Exact and approximate critical number at `r0 = 0`, `N_B = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyPoint {
    pub n_s: f64,
    pub m_exact: qreading::critical::Threshold,
    pub m_tilde: Option<f64>,
}

pub(crate) fn pool(jobs: usize) -> Result<ThreadPool> {
    Ok(rayon::ThreadPoolBuilder::new().num_threads(jobs).build()?)
}

fn cell_for(r0: f64, r1: f64, n_b: f64) -> Result<MemoryCell<f64>> {
    if r0 > r1 {
        return Err(flag_err("r0", format!("{r0} exceeds r1 = {r1}")));
    }
    Ok(MemoryCell::new(r0, r1, n_b)?)
}

fn gain_points(cell: &MemoryCell<f64>, n_s: f64, ms: &[u64]) -> Result<Vec<GainPoint>> {
    let bounds = CellBounds::new(cell, n_s)?;
    Ok(ms
        .iter()
        .map(|&m| GainPoint {
            m,
            n_s,
            r0: cell.r0(),
            r1: cell.r1(),
            n_b: cell.n_b(),
            report: bounds.report(m as f64),
        })
        .collect())
}

/// Evaluates the cartesian product of the parameter lists. Rows are ordered
/// with `N_S` outermost, then `r0`, `r1`, `N_B`, and `M` innermost.
pub fn gain_sweep(cfg: &SweepConfig) -> Result<Vec<GainPoint>> {
    let mut cells = Vec::new();
    for &n_s in &cfg.n_s {
        for &r0 in &cfg.r0 {
            for &r1 in &cfg.r1 {
                for &n_b in &cfg.n_b {
                    cells.push((cell_for(r0, r1, n_b)?, n_s));
                }
            }
        }
    }
    let nested = pool(cfg.jobs)?.install(|| {
        cells
            .par_iter()
            .map(|(cell, n_s)| gain_points(cell, *n_s, &cfg.m))
            .collect::<Result<Vec<_>>>()
    })?;
    Ok(nested.into_iter().flatten().collect())
}

pub fn table_points() -> Result<Vec<GainPoint>> {
    TABLE
        .iter()
        .map(|row| {
            let cell = MemoryCell::new(row.r0, row.r1, row.n_b)?;
            Ok(gain_points(&cell, row.n_s, &[row.m])?.remove(0))
        })
        .collect()
}

pub fn critical_curve(cfg: &SweepConfig) -> Result<Vec<CurvePoint>> {
    let opts = SearchOptions {
        m_cap: cfg.m_cap,
        n_b_cap: cfg.n_b_cap,
        ..SearchOptions::default()
    };
    let grid: Vec<(f64, f64)> = cfg
        .n_s
        .iter()
        .flat_map(|&n_s| cfg.r0.iter().map(move |&r0| (n_s, r0)))
        .collect();
    pool(cfg.jobs)?.install(|| {
        grid.par_iter()
            .map(|&(n_s, r0)| {
                let cp = critical_m(r0, n_s, &opts)?;
                Ok(CurvePoint {
                    n_s,
                    r0,
                    m_crit: cp.m_crit,
                    n_b_worst: cp.n_b_worst,
                })
            })
            .collect()
    })
}

pub fn critical_energy(cfg: &SweepConfig) -> Result<Vec<EnergyPoint>> {
    let vacuum_cell = IdealCell::new(0.0, 0.0)?;
    pool(cfg.jobs)?.install(|| {
        cfg.n_s
            .par_iter()
            .map(|&n_s| {
                Ok(EnergyPoint {
                    n_s,
                    m_exact: critical_m_at_noise_capped(&vacuum_cell, n_s, cfg.m_cap)?,
                    m_tilde: m_tilde(n_s)?,
                })
            })
            .collect()
    })
}

/// Writes CSV with `\n` line endings.
pub fn write_csv<W: Write>(
    out: W,
    header: &[&str],
    rows: impl IntoIterator<Item = Vec<String>>,
) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

fn emit(
    path: Option<&Path>,
    stdout: &mut dyn Write,
    header: &[&str],
    rows: Vec<Vec<String>>,
) -> Result<()> {
    match path {
        Some(p) => write_csv(BufWriter::new(File::create(p)?), header, rows),
        None => write_csv(stdout, header, rows),
    }
}

pub fn gain_rows(points: &[GainPoint]) -> Vec<Vec<String>> {
    points.iter().map(GainPoint::record).collect()
}

pub fn curve_rows(points: &[CurvePoint]) -> Vec<Vec<String>> {
    points
        .iter()
        .map(|p| {
            vec![
                real(p.n_s),
                real(p.r0),
                threshold(p.m_crit),
                real(p.n_b_worst),
            ]
        })
        .collect()
}

pub fn energy_rows(points: &[EnergyPoint]) -> Vec<Vec<String>> {
    points
        .iter()
        .map(|p| {
            vec![
                real(p.n_s),
                threshold(p.m_exact),
                p.m_tilde.map_or_else(|| "inf".into(), real),
                p.m_tilde
                    .map_or_else(|| "inf".into(), |m| (m.ceil() as u64).to_string()),
            ]
        })
        .collect()
}

pub fn cmd_gain(cfg: &SweepConfig, stdout: &mut dyn Write) -> Result<()> {
    let points = gain_sweep(cfg)?;
    if let [p] = points.as_slice() {
        let r = &p.report;
        let fields = [
            ("M", p.m.to_string()),
            ("N_S", real(p.n_s)),
            ("r0", real(p.r0)),
            ("r1", real(p.r1)),
            ("N_B", real(p.n_b)),
            ("F", real(r.f)),
            ("C", real(r.c)),
            ("Q", real(r.q)),
            ("s_opt", real(r.s_opt)),
            ("J_class", real(r.j_class)),
            ("J_quant", real(r.j_quant)),
            ("G", real(r.g)),
        ];
        for (name, value) in fields {
            writeln!(stdout, "{name:<8} {value}")?;
        }
        if let Some(path) = &cfg.out {
            emit(Some(path), stdout, &GAIN_HEADER, gain_rows(&points))?;
        }
        return Ok(());
    }
    emit(cfg.out.as_deref(), stdout, &GAIN_HEADER, gain_rows(&points))
}

pub fn cmd_table(cfg: &SweepConfig, stdout: &mut dyn Write) -> Result<()> {
    emit(
        cfg.out.as_deref(),
        stdout,
        &GAIN_HEADER,
        gain_rows(&table_points()?),
    )
}

pub fn cmd_critical_curve(cfg: &SweepConfig, stdout: &mut dyn Write) -> Result<()> {
    emit(
        cfg.out.as_deref(),
        stdout,
        &CURVE_HEADER,
        curve_rows(&critical_curve(cfg)?),
    )
}

pub fn cmd_critical_energy(cfg: &SweepConfig, stdout: &mut dyn Write) -> Result<()> {
    emit(
        cfg.out.as_deref(),
        stdout,
        &ENERGY_HEADER,
        energy_rows(&critical_energy(cfg)?),
    )
}
