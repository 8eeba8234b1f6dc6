//! Two-mesh convergence-rate estimation.
//!
//! No exact solutions are available for the benchmark problems, so orders
//! of convergence are estimated from the solutions themselves: solve on an
//! `(N, M)` mesh and on the doubled `(2N, 2M)` mesh, interpolate both
//! bilinearly, and take the largest difference over the union of the two
//! node sets (the meshes are not nested: their transition points involve
//! `ln N` and `ln 2N`). The order is the base-2 log of the ratio of
//! consecutive differences, and the parameter-uniform figures take the
//! worst difference over a ladder of diffusion parameters first.

use std::collections::BTreeMap;
use std::time::Instant;

use layertrack_core::problem::ProblemSpec;
use layertrack_core::solver::{solve, DiscreteSolution};
use layertrack_core::{Error, Result};
use rayon::prelude::*;

/// How the number of time steps follows the number of space cells.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MRule {
    /// `M = N`, the ladder used by the benchmark tables.
    EqualsN,
    /// Fixed `M` regardless of `N`.
    Fixed(usize),
}

impl MRule {
    fn steps(self, n: usize) -> usize {
        match self {
            MRule::EqualsN => n,
            MRule::Fixed(m) => m,
        }
    }
}

/// One convergence sweep: a ladder of mesh sizes crossed with a ladder of
/// diffusion parameters `eps = 2^-k`.
#[derive(Clone, Debug)]
pub struct SweepConfig {
    pub n_list: Vec<usize>,
    /// Exponents `k`; the default benchmark set is `0..=26`.
    pub eps_powers: Vec<i32>,
    pub m_rule: MRule,
}

impl SweepConfig {
    pub fn new(n_list: Vec<usize>, eps_powers: Vec<i32>) -> Self {
        SweepConfig { n_list, eps_powers, m_rule: MRule::EqualsN }
    }
}

/// A failed sweep cell; the sweep itself keeps going.
#[derive(Clone, Debug)]
pub struct CellFailure {
    pub eps_power: i32,
    pub n: usize,
    pub message: String,
}

/// Filled sweep: differences `D`, orders `P`, and the parameter-uniform
/// rows, indexed `[eps][n]` in the order of the configuration.
#[derive(Clone, Debug)]
pub struct ConvergenceReport {
    pub example: String,
    pub n_list: Vec<usize>,
    pub eps_powers: Vec<i32>,
    pub diffs: Vec<Vec<Option<f64>>>,
    pub orders: Vec<Vec<Option<f64>>>,
    pub uniform_diffs: Vec<Option<f64>>,
    pub uniform_orders: Vec<Option<f64>>,
    /// Wall-clock seconds per cell (solves are attributed to the first
    /// cell that needs them).
    pub cell_seconds: Vec<Vec<f64>>,
    pub failures: Vec<CellFailure>,
}

/// Largest two-mesh difference for one `(eps, N, M)` cell: solve on the
/// given mesh and the doubled one, compare over the union of node sets.
pub fn two_mesh_difference(p: &ProblemSpec, epsilon: f64, n: usize, m: usize) -> Result<f64> {
    let coarse = solve(p, epsilon, n, m)?;
    let fine = solve(p, epsilon, 2 * n, 2 * m)?;
    Ok(union_difference(&coarse, &fine))
}

/// Estimated order from two consecutive differences.
pub fn order_from_pair(d_coarse: f64, d_fine: f64) -> Result<f64> {
    if !(d_coarse > 0.0 && d_fine > 0.0) {
        return Err(Error::NonPositiveDifference);
    }
    Ok((d_coarse / d_fine).log2())
}

fn union_difference(a: &DiscreteSolution, b: &DiscreteSolution) -> f64 {
    let mut worst = 0.0f64;
    for (own, other) in [(a, b), (b, a)] {
        for j in 0..=own.time().m() {
            let t = own.time().node(j);
            for i in 0..=own.space().n() {
                let x = own.space().node(i);
                let interp = other
                    .eval_transformed(x, t)
                    .expect("union nodes lie inside the domain");
                worst = worst.max((own.value(i, j) - interp).abs());
            }
        }
    }
    worst
}

/// Run the full sweep. Cells of the `(eps, N)` matrix are independent and
/// are solved in parallel over `eps`; per-cell failures are recorded and
/// do not abort the sweep. The filled report does not depend on the
/// number of worker threads.
pub fn epsilon_sweep(p: &ProblemSpec, cfg: &SweepConfig) -> ConvergenceReport {
    assert!(!cfg.n_list.is_empty(), "need at least one mesh size");
    assert!(
        cfg.n_list.windows(2).all(|w| w[0] < w[1]),
        "mesh sizes must be strictly ascending"
    );
    assert!(!cfg.eps_powers.is_empty(), "need at least one diffusion parameter");

    struct Row {
        diffs: Vec<Option<f64>>,
        seconds: Vec<f64>,
        failures: Vec<CellFailure>,
    }

    let rows: Vec<Row> = cfg
        .eps_powers
        .par_iter()
        .map(|&power| {
            let epsilon = 2f64.powi(-power);
            let mut cache: BTreeMap<usize, Result<DiscreteSolution>> = BTreeMap::new();
            let mut diffs = Vec::with_capacity(cfg.n_list.len());
            let mut seconds = Vec::with_capacity(cfg.n_list.len());
            let mut failures = Vec::new();
            for &n in &cfg.n_list {
                let started = Instant::now();
                for key in [n, 2 * n] {
                    cache
                        .entry(key)
                        .or_insert_with(|| solve(p, epsilon, key, cfg.m_rule.steps(key)));
                }
                let cell = match (&cache[&n], &cache[&(2 * n)]) {
                    (Ok(coarse), Ok(fine)) => Ok(union_difference(coarse, fine)),
                    (Err(e), _) | (_, Err(e)) => Err(e.clone()),
                };
                seconds.push(started.elapsed().as_secs_f64());
                match cell {
                    Ok(d) => diffs.push(Some(d)),
                    Err(e) => {
                        diffs.push(None);
                        failures.push(CellFailure {
                            eps_power: power,
                            n,
                            message: e.to_string(),
                        });
                    }
                }
            }
            Row { diffs, seconds, failures }
        })
        .collect();

    let cols = cfg.n_list.len();
    let diffs: Vec<Vec<Option<f64>>> = rows.iter().map(|r| r.diffs.clone()).collect();
    let orders: Vec<Vec<Option<f64>>> =
        diffs.iter().map(|row| orders_of(row)).collect();
    // the parameter-uniform difference is a max over the whole eps ladder,
    // so a column with any failed cell stays unknown
    let uniform_diffs: Vec<Option<f64>> = (0..cols)
        .map(|c| {
            diffs
                .iter()
                .map(|row| row[c])
                .try_fold(0.0f64, |acc, v| v.map(|v| acc.max(v)))
        })
        .collect();
    let uniform_orders = orders_of(&uniform_diffs);

    ConvergenceReport {
        example: p.name().to_string(),
        n_list: cfg.n_list.clone(),
        eps_powers: cfg.eps_powers.clone(),
        diffs,
        orders,
        uniform_diffs,
        uniform_orders,
        cell_seconds: rows.iter().map(|r| r.seconds.clone()).collect(),
        failures: rows.into_iter().flat_map(|r| r.failures).collect(),
    }
}

fn orders_of(diffs: &[Option<f64>]) -> Vec<Option<f64>> {
    (0..diffs.len())
        .map(|i| {
            if i + 1 < diffs.len() {
                match (diffs[i], diffs[i + 1]) {
                    (Some(c), Some(f)) => order_from_pair(c, f).ok(),
                    _ => None,
                }
            } else {
                None
            }
        })
        .collect()
}

/// Output layout for [`render_table`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TableFormat {
    Csv,
    Aligned,
}

/// Render a report: one difference row per diffusion parameter with its
/// order row beneath, parameter-uniform rows last. Differences use
/// 4-significant-digit scientific notation, orders three decimals.
pub fn render_table(report: &ConvergenceReport, format: TableFormat) -> String {
    let headers: Vec<String> = report.n_list.iter().map(|n| format!("N=M={n}")).collect();
    let mut rows: Vec<(String, Vec<String>)> = Vec::new();
    for (e, &power) in report.eps_powers.iter().enumerate() {
        let label = if power == 0 { "2^0".to_string() } else { format!("2^-{power}") };
        rows.push((label.clone(), cells(&report.diffs[e], format_sci4)));
        rows.push((format!("{label}:order"), cells(&report.orders[e], format_order)));
    }
    rows.push(("uniform".to_string(), cells(&report.uniform_diffs, format_sci4)));
    rows.push(("uniform:order".to_string(), cells(&report.uniform_orders, format_order)));

    match format {
        TableFormat::Csv => {
            let mut out = String::new();
            out.push_str(&format!("# example: {}\n", report.example));
            out.push_str("eps");
            for h in &headers {
                out.push(',');
                out.push_str(h);
            }
            out.push('\n');
            for (label, cells) in rows {
                out.push_str(&label);
                for c in cells {
                    out.push(',');
                    out.push_str(&c);
                }
                out.push('\n');
            }
            out
        }
        TableFormat::Aligned => {
            let label_width = rows
                .iter()
                .map(|(l, _)| l.len())
                .chain(std::iter::once("eps".len()))
                .max()
                .unwrap();
            let col_width = 11usize;
            let mut out = String::new();
            out.push_str(&format!("# example: {}\n", report.example));
            out.push_str(&format!("{:<label_width$}", "eps"));
            for h in &headers {
                out.push_str(&format!("  {h:>col_width$}"));
            }
            out.push('\n');
            for (label, cells) in rows {
                out.push_str(&format!("{label:<label_width$}"));
                for c in cells {
                    out.push_str(&format!("  {c:>col_width$}"));
                }
                out.push('\n');
            }
            out
        }
    }
}

fn cells(values: &[Option<f64>], f: impl Fn(f64) -> String) -> Vec<String> {
    values
        .iter()
        .map(|v| match v {
            Some(v) => f(*v),
            None => "n/a".to_string(),
        })
        .collect()
}

/// `4.546E-02`-style formatting with four significant digits.
pub fn format_sci4(x: f64) -> String {
    if x == 0.0 {
        return "0.000E+00".to_string();
    }
    let s = format!("{x:.3E}");
    let (mantissa, exponent) = s.split_once('E').expect("UpperExp always emits E");
    let (sign, digits) = match exponent.strip_prefix('-') {
        Some(rest) => ("-", rest),
        None => ("+", exponent),
    };
    format!("{mantissa}E{sign}{digits:0>2}")
}

fn format_order(p: f64) -> String {
    format!("{p:.3}")
}
