//! Deterministic CSV writers.
//!
//! All numeric cells use scientific notation with 9 significant digits and a
//! '.' decimal separator, lines end in '\n', and files are written to a
//! temporary sibling and renamed into place so no output is ever left half
//! written. Identical inputs produce byte-identical files.

use std::io::Write;
use std::path::Path;

use crate::doe::{DoeSummary, DoeTable};
use crate::metrics::MetricsReport;
use crate::viasim::SimResult;
use crate::{Error, Result};

/// Fixed-width scientific formatting: 9 significant digits.
pub fn sci(x: f64) -> String {
    format!("{x:.8e}")
}

fn opt_sci(x: Option<f64>) -> String {
    x.map(sci).unwrap_or_default()
}

fn write_atomic(path: &Path, content: &str) -> Result<()> {
    let io_err = |source: std::io::Error| Error::Io {
        path: path.display().to_string(),
        source,
    };
    let tmp = path.with_extension("tmp");
    let mut file = std::fs::File::create(&tmp).map_err(io_err)?;
    let written = file
        .write_all(content.as_bytes())
        .and_then(|()| file.sync_all());
    if let Err(source) = written {
        drop(file);
        let _ = std::fs::remove_file(&tmp);
        return Err(io_err(source));
    }
    drop(file);
    std::fs::rename(&tmp, path).map_err(io_err)
}

/// `profile.csv`: one row per snapshot and cell.
pub fn write_profile_csv(result: &SimResult, path: &Path) -> Result<()> {
    let geom = &result.geometry;
    let mut out = String::with_capacity(result.snapshots.len() * geom.cells * 48 + 64);
    out.push_str("t_s,depth_um,radius_um,conc_norm\n");
    for snap in &result.snapshots {
        for i in 0..geom.cells {
            out.push_str(&sci(snap.t));
            out.push(',');
            out.push_str(&sci(geom.cell_center(i) * 1e6));
            out.push(',');
            out.push_str(&sci(snap.radii[i] * 1e6));
            out.push(',');
            out.push_str(&sci(snap.conc[i]));
            out.push('\n');
        }
    }
    write_atomic(path, &out)
}

/// `summary.csv`: the terminal metrics of one run.
pub fn write_summary_csv(metrics: &MetricsReport, path: &Path) -> Result<()> {
    let mut out = String::new();
    out.push_str("outcome,fill_time_s,fill_fraction,throwing_power,mean_rate_um_h,bottom_thickness_um\n");
    out.push_str(&format!(
        "{},{},{},{},{},{}\n",
        metrics.outcome,
        opt_sci(metrics.fill_time),
        sci(metrics.fill_fraction),
        opt_sci(metrics.throwing_power),
        sci(metrics.mean_rate_um_h),
        sci(metrics.bottom_thickness_um),
    ));
    write_atomic(path, &out)
}

/// `doe.csv`: one row per factor tuple, already in canonical order.
pub fn write_doe_csv(table: &DoeTable, path: &Path) -> Result<()> {
    let mut out = String::with_capacity(table.rows.len() * 96 + 96);
    out.push_str("waveform,power_w,angle_deg,outcome,fill_time_s,fill_fraction,throwing_power,mean_rate_um_h\n");
    for row in &table.rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            row.waveform,
            sci(row.power),
            sci(row.angle),
            row.outcome.as_str(),
            opt_sci(row.fill_time),
            sci(row.fill_fraction),
            opt_sci(row.throwing_power),
            sci(row.mean_rate_um_h),
        ));
    }
    write_atomic(path, &out)
}

/// DOE `summary.csv`: long-format `scope,metric,value` rows covering the
/// cross-table flags and the per-waveform / per-power aggregates.
pub fn write_doe_summary_csv(summary: &DoeSummary, path: &Path) -> Result<()> {
    let mut out = String::new();
    out.push_str("scope,metric,value\n");
    out.push_str(&format!("table,dc_sufficient,{}\n", summary.dc_sufficient));
    out.push_str(&format!("table,angle_invariant,{}\n", summary.angle_invariant));
    for agg in &summary.per_waveform {
        out.push_str(&format!("waveform:{},fill_rate,{}\n", agg.kind, sci(agg.fill_rate)));
        out.push_str(&format!(
            "waveform:{},mean_throwing_power,{}\n",
            agg.kind,
            opt_sci(agg.mean_throwing_power)
        ));
    }
    for agg in &summary.per_power {
        out.push_str(&format!("power:{},fill_rate,{}\n", agg.power, sci(agg.fill_rate)));
        out.push_str(&format!(
            "power:{},mean_throwing_power,{}\n",
            agg.power,
            opt_sci(agg.mean_throwing_power)
        ));
    }
    write_atomic(path, &out)
}
