//! CSV export of solutions, layer paths and meshes.
//!
//! All numeric fields use 17 significant digits, which round-trips `f64`
//! exactly: re-exporting parsed output is byte-identical. Metadata rides
//! in `#`-prefixed comment lines.

use std::io::{self, Write};

use layertrack_core::characteristic::CharacteristicCurve;
use layertrack_core::mesh::SpaceMesh;
use layertrack_core::solver::DiscreteSolution;

/// What a solution export contains.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExportMode {
    /// Grid values of the transformed unknown: rows `x, t, y`.
    Transformed,
    /// Reconstructed original unknown on a uniform 201-point grid per
    /// time level: rows `s, t, u`.
    Physical,
}

/// Number of sample points per time level in physical mode. The consumer
/// is a plotting tool and the map differs per time level, so a fixed
/// uniform grid beats exporting mapped mesh nodes.
pub const PHYSICAL_SAMPLES: usize = 201;

/// 17 significant digits; parses back to the identical `f64`.
pub fn format_full(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_solution(
    sol: &DiscreteSolution,
    mode: ExportMode,
    out: &mut dyn Write,
) -> io::Result<()> {
    writeln!(out, "# layertrack solution")?;
    writeln!(out, "# example: {}", sol.problem_name())?;
    writeln!(
        out,
        "# mode: {}",
        match mode {
            ExportMode::Transformed => "transformed",
            ExportMode::Physical => "physical",
        }
    )?;
    writeln!(out, "# epsilon: {}", format_full(sol.epsilon()))?;
    writeln!(out, "# N: {}", sol.space().n())?;
    writeln!(out, "# M: {}", sol.time().m())?;
    writeln!(out, "# layer-end: {}", format_full(sol.curve().end_position()))?;
    writeln!(out, "# delta: {}", format_full(sol.delta()))?;
    match mode {
        ExportMode::Transformed => {
            writeln!(out, "# columns: x,t,y")?;
            for j in 0..=sol.time().m() {
                let t = sol.time().node(j);
                for i in 0..=sol.space().n() {
                    writeln!(
                        out,
                        "{},{},{}",
                        format_full(sol.space().node(i)),
                        format_full(t),
                        format_full(sol.value(i, j))
                    )?;
                }
            }
        }
        ExportMode::Physical => {
            writeln!(out, "# columns: s,t,u")?;
            for j in 0..=sol.time().m() {
                let t = sol.time().node(j);
                for q in 0..PHYSICAL_SAMPLES {
                    let s = q as f64 / (PHYSICAL_SAMPLES - 1) as f64;
                    let u = sol
                        .eval_physical(s, t)
                        .map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e.to_string()))?;
                    writeln!(out, "{},{},{}", format_full(s), format_full(t), format_full(u))?;
                }
            }
        }
    }
    Ok(())
}

/// Rows `t, d(t), d'(t)` at `samples + 1` uniform times.
pub fn write_characteristic(
    curve: &CharacteristicCurve,
    samples: usize,
    out: &mut dyn Write,
) -> io::Result<()> {
    writeln!(out, "# layertrack characteristic")?;
    writeln!(out, "# columns: t,d,dprime")?;
    for k in 0..=samples {
        let t = curve.t_final() * k as f64 / samples as f64;
        let (d, v) = (curve.position(t), curve.velocity(t));
        let (d, v) = match (d, v) {
            (Ok(d), Ok(v)) => (d, v),
            _ => unreachable!("samples lie inside [0, T]"),
        };
        writeln!(out, "{},{},{}", format_full(t), format_full(d), format_full(v))?;
    }
    Ok(())
}

/// Rows `i, x_i` plus the transition widths in the header.
pub fn write_mesh(mesh: &SpaceMesh, out: &mut dyn Write) -> io::Result<()> {
    let trans = mesh.transition();
    writeln!(out, "# layertrack space mesh")?;
    writeln!(out, "# N: {}", mesh.n())?;
    writeln!(out, "# interface: {}", format_full(mesh.interface()))?;
    writeln!(out, "# sigma1: {}", format_full(trans.sigma1))?;
    writeln!(out, "# sigma2: {}", format_full(trans.sigma2))?;
    writeln!(out, "# sigma: {}", format_full(trans.sigma))?;
    writeln!(out, "# columns: i,x")?;
    for (i, x) in mesh.nodes().iter().enumerate() {
        writeln!(out, "{},{}", i, format_full(*x))?;
    }
    Ok(())
}
