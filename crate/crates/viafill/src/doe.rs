//! Full-factorial design-of-experiments runner over
//! waveform × power × angle.
//!
//! Cells are independent simulations and run in parallel; the table is always
//! assembled in the canonical (waveform, power, angle) sort order so the
//! output never depends on scheduling. A numerical failure inside one cell is
//! recorded in that row and never aborts the rest of the table.

use rayon::prelude::*;

use crate::viasim::{run_simulation, Outcome, SimConfig};
use crate::waveform::{Severity, Waveform, WaveformKind};
use crate::{Error, Result};

/// Factor grid plus the shared base configuration.
#[derive(Debug, Clone)]
pub struct DoeFactors {
    pub waveforms: Vec<Waveform>,
    /// Transducer power levels (W).
    pub powers: Vec<f64>,
    /// Radiation angles (degrees).
    pub angles: Vec<f64>,
    /// Template config; waveform, power and angle are overridden per cell.
    pub base: SimConfig,
}

impl DoeFactors {
    pub fn validate(&self) -> Result<()> {
        if self.waveforms.is_empty() || self.powers.is_empty() || self.angles.is_empty() {
            return Err(Error::Config(
                "doe factors must be non-empty in every dimension".into(),
            ));
        }
        for w in &self.waveforms {
            for issue in w.validate() {
                if issue.severity == Severity::Error {
                    return Err(Error::Config(format!("doe waveform {}: {}", w.kind(), issue.message)));
                }
            }
        }
        if let Some(p) = self.powers.iter().find(|&&p| p < 0.0) {
            return Err(Error::Config(format!("doe powers_w must be >= 0, got {p}")));
        }
        if let Some(a) = self.angles.iter().find(|&&a| !(0.0..90.0).contains(&a)) {
            return Err(Error::Config(format!("doe angles_deg must lie in [0, 90), got {a}")));
        }
        let mut probe = self.base.clone();
        probe.waveform = self.waveforms[0];
        probe.validate()
    }
}

/// Outcome column of a DOE row: a simulation outcome or the recorded failure.
#[derive(Debug, Clone, PartialEq)]
pub enum CellOutcome {
    Sim(Outcome),
    Error(String),
}

impl CellOutcome {
    /// CSV token: the outcome name, or `ERROR` for failed cells.
    pub fn as_str(&self) -> &str {
        match self {
            CellOutcome::Sim(outcome) => outcome.as_str(),
            CellOutcome::Error(_) => "ERROR",
        }
    }
}

/// One factor tuple with its terminal metrics.
#[derive(Debug, Clone, PartialEq)]
pub struct DoeRow {
    pub waveform: WaveformKind,
    pub power: f64,
    pub angle: f64,
    pub outcome: CellOutcome,
    pub fill_time: Option<f64>,
    pub fill_fraction: f64,
    pub throwing_power: Option<f64>,
    pub mean_rate_um_h: f64,
}

/// Factorial results in canonical row order.
#[derive(Debug, Clone, PartialEq)]
pub struct DoeTable {
    pub rows: Vec<DoeRow>,
}

/// Runs every (waveform, power, angle) tuple and assembles the table in
/// canonical sort order. Deterministic under any parallel schedule.
pub fn run_full_factorial(factors: &DoeFactors) -> Result<DoeTable> {
    factors.validate()?;

    let mut waveforms = factors.waveforms.clone();
    waveforms.sort_by_key(Waveform::kind);
    let mut powers = factors.powers.clone();
    powers.sort_by(f64::total_cmp);
    let mut angles = factors.angles.clone();
    angles.sort_by(f64::total_cmp);

    let mut cells = Vec::with_capacity(waveforms.len() * powers.len() * angles.len());
    for w in &waveforms {
        for &p in &powers {
            for &a in &angles {
                let mut cfg = factors.base.clone();
                cfg.waveform = *w;
                cfg.field.power = p;
                cfg.field.angle_deg = a;
                cells.push(cfg);
            }
        }
    }

    // par_iter keeps input order on collect, which is already canonical.
    let rows: Vec<DoeRow> = cells
        .par_iter()
        .map(|cfg| match run_simulation(cfg) {
            Ok(result) => DoeRow {
                waveform: cfg.waveform.kind(),
                power: cfg.field.power,
                angle: cfg.field.angle_deg,
                outcome: CellOutcome::Sim(result.outcome),
                fill_time: result.fill_time,
                fill_fraction: result.metrics.fill_fraction,
                throwing_power: result.metrics.throwing_power,
                mean_rate_um_h: result.metrics.mean_rate_um_h,
            },
            Err(err) => DoeRow {
                waveform: cfg.waveform.kind(),
                power: cfg.field.power,
                angle: cfg.field.angle_deg,
                outcome: CellOutcome::Error(err.to_string()),
                fill_time: None,
                fill_fraction: 0.0,
                throwing_power: None,
                mean_rate_um_h: 0.0,
            },
        })
        .collect();

    Ok(DoeTable { rows })
}

/// Per-waveform aggregate over the table.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveformAggregate {
    pub kind: WaveformKind,
    /// FILLED rows over all rows of this waveform.
    pub fill_rate: f64,
    /// Mean throwing power over this waveform's FILLED rows.
    pub mean_throwing_power: Option<f64>,
}

/// Per-power aggregate over the table.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerAggregate {
    pub power: f64,
    pub fill_rate: f64,
    pub mean_throwing_power: Option<f64>,
}

/// Cross-table conclusions.
#[derive(Debug, Clone, PartialEq)]
pub struct DoeSummary {
    pub per_waveform: Vec<WaveformAggregate>,
    pub per_power: Vec<PowerAggregate>,
    /// True when every DC row at or above the lowest positive power filled:
    /// plain DC is enough, no pulse schedule required.
    pub dc_sufficient: bool,
    /// True when no metric varies by more than 1% across angles at otherwise
    /// fixed factors.
    pub angle_invariant: bool,
}

fn filled(row: &DoeRow) -> bool {
    row.outcome == CellOutcome::Sim(Outcome::Filled)
}

fn mean_tp<'a>(rows: impl Iterator<Item = &'a DoeRow>) -> Option<f64> {
    let tps: Vec<f64> = rows
        .filter(|r| filled(r))
        .filter_map(|r| r.throwing_power)
        .collect();
    if tps.is_empty() {
        None
    } else {
        Some(tps.iter().sum::<f64>() / tps.len() as f64)
    }
}

/// At most 1% relative spread, with `None`s only tolerated when unanimous.
fn spread_ok(values: &[Option<f64>]) -> bool {
    let present: Vec<f64> = values.iter().filter_map(|v| *v).collect();
    if present.len() != values.len() && !present.is_empty() {
        return false;
    }
    if present.len() < 2 {
        return true;
    }
    let max = present.iter().cloned().fold(f64::MIN, f64::max);
    let min = present.iter().cloned().fold(f64::MAX, f64::min);
    let scale = max.abs().max(min.abs());
    scale == 0.0 || (max - min) <= 0.01 * scale
}

/// Aggregates the table per waveform and per power and evaluates the
/// DC-sufficiency and angle-invariance flags.
pub fn summarize(table: &DoeTable) -> DoeSummary {
    let mut kinds: Vec<WaveformKind> = table.rows.iter().map(|r| r.waveform).collect();
    kinds.sort();
    kinds.dedup();
    let per_waveform = kinds
        .iter()
        .map(|&kind| {
            let rows: Vec<&DoeRow> = table.rows.iter().filter(|r| r.waveform == kind).collect();
            WaveformAggregate {
                kind,
                fill_rate: rows.iter().filter(|r| filled(r)).count() as f64 / rows.len() as f64,
                mean_throwing_power: mean_tp(rows.iter().copied()),
            }
        })
        .collect();

    let mut powers: Vec<f64> = table.rows.iter().map(|r| r.power).collect();
    powers.sort_by(f64::total_cmp);
    powers.dedup();
    let per_power = powers
        .iter()
        .map(|&power| {
            let rows: Vec<&DoeRow> = table.rows.iter().filter(|r| r.power == power).collect();
            PowerAggregate {
                power,
                fill_rate: rows.iter().filter(|r| filled(r)).count() as f64 / rows.len() as f64,
                mean_throwing_power: mean_tp(rows.iter().copied()),
            }
        })
        .collect();

    let min_positive_power = powers.iter().copied().find(|&p| p > 0.0);
    let dc_sufficient = match min_positive_power {
        Some(p_min) => {
            let qualifying: Vec<&DoeRow> = table
                .rows
                .iter()
                .filter(|r| r.waveform == WaveformKind::Dc && r.power >= p_min)
                .collect();
            !qualifying.is_empty() && qualifying.iter().all(|r| filled(r))
        }
        None => false,
    };

    let mut angle_invariant = true;
    for &kind in &kinds {
        for &power in &powers {
            let group: Vec<&DoeRow> = table
                .rows
                .iter()
                .filter(|r| r.waveform == kind && r.power == power)
                .collect();
            if group.len() < 2 {
                continue;
            }
            let first = group[0].outcome.as_str();
            if group.iter().any(|r| r.outcome.as_str() != first) {
                angle_invariant = false;
                continue;
            }
            let ok = spread_ok(&group.iter().map(|r| Some(r.fill_fraction)).collect::<Vec<_>>())
                && spread_ok(&group.iter().map(|r| Some(r.mean_rate_um_h)).collect::<Vec<_>>())
                && spread_ok(&group.iter().map(|r| r.throwing_power).collect::<Vec<_>>())
                && spread_ok(&group.iter().map(|r| r.fill_time).collect::<Vec<_>>());
            if !ok {
                angle_invariant = false;
            }
        }
    }

    DoeSummary {
        per_waveform,
        per_power,
        dc_sufficient,
        angle_invariant,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hydro::{AngleModel, FlowConditions, MegasonicField, StreamingProfile};
    use crate::physchem::Electrolyte;
    use crate::viasim::ViaGeometry;

    /// Small, fast base config: a 10 µm via plated hard for a fraction of a
    /// second, just enough to exercise every code path.
    fn quick_base() -> SimConfig {
        SimConfig {
            electrolyte: Electrolyte {
                c_bulk: 1200.0,
                diffusivity: 5.0e-10,
                kinematic_viscosity: 1.0e-6,
                charge_number: 2,
                activity_coeff: 1.0,
                temperature: 298.15,
                standard_potential: 0.337,
                molar_mass: 0.06355,
                deposit_density: 8960.0,
                exchange_current: 1.0,
                transfer_coeff: 0.5,
            },
            geometry: ViaGeometry {
                radius: 5.0e-6,
                depth: 2.0e-5,
                cells: 16,
                seed_coverage: 1.0,
            },
            field: MegasonicField {
                frequency: 1.0e6,
                power: 125.0,
                angle_deg: 0.0,
                kappa: 2.0,
                power_ref: 500.0,
                angle_model: AngleModel::None,
                profile: StreamingProfile::Uniform,
            },
            flow: FlowConditions {
                velocity: 0.1,
                distance: 0.01,
            },
            waveform: Waveform::Dc { i_forward: 300.0 },
            t_end: 0.3,
            dr_max_frac: 0.02,
            c_tol: 1.0e-10,
            r_close_frac: 0.01,
            fill_frac_target: 0.98,
            snapshot_count: 4,
        }
    }

    fn quick_factors() -> DoeFactors {
        DoeFactors {
            waveforms: vec![
                Waveform::Dc { i_forward: 300.0 },
                Waveform::Pulsed {
                    i_forward: 300.0,
                    t_forward: 0.01,
                    t_off: 0.01,
                },
                Waveform::ReversePulse {
                    i_forward: 300.0,
                    t_forward: 0.02,
                    i_reverse: 900.0,
                    t_reverse: 0.001,
                },
            ],
            powers: vec![0.0, 125.0, 250.0, 500.0],
            angles: vec![0.0, 15.0, 30.0, 45.0],
            base: quick_base(),
        }
    }

    #[test]
    fn full_factorial_has_one_row_per_tuple() {
        let table = run_full_factorial(&quick_factors()).unwrap();
        assert_eq!(table.rows.len(), 48, "3 x 4 x 4 cells");
        // Canonical order: waveform, then power, then angle.
        for pair in table.rows.windows(2) {
            let a = (&pair[0].waveform, pair[0].power, pair[0].angle);
            let b = (&pair[1].waveform, pair[1].power, pair[1].angle);
            assert!(a < b || (a.0 < b.0), "rows out of order: {a:?} vs {b:?}");
        }
    }

    #[test]
    fn degenerate_factorial_equals_single_run() {
        let base = quick_base();
        let factors = DoeFactors {
            waveforms: vec![base.waveform],
            powers: vec![base.field.power],
            angles: vec![base.field.angle_deg],
            base: base.clone(),
        };
        let table = run_full_factorial(&factors).unwrap();
        assert_eq!(table.rows.len(), 1);
        let single = run_simulation(&base).unwrap();
        let row = &table.rows[0];
        assert_eq!(row.outcome, CellOutcome::Sim(single.outcome));
        assert_eq!(row.fill_fraction, single.metrics.fill_fraction);
        assert_eq!(row.throwing_power, single.metrics.throwing_power);
        assert_eq!(row.mean_rate_um_h, single.metrics.mean_rate_um_h);
    }

    #[test]
    fn input_order_is_irrelevant() {
        let mut factors = quick_factors();
        let table = run_full_factorial(&factors).unwrap();
        factors.angles = vec![45.0, 0.0, 30.0, 15.0];
        factors.powers = vec![500.0, 0.0, 250.0, 125.0];
        let permuted = run_full_factorial(&factors).unwrap();
        assert_eq!(table, permuted, "canonical ordering must hide input order");
    }

    #[test]
    fn tables_are_deterministic_under_parallel_execution() {
        let factors = quick_factors();
        let a = run_full_factorial(&factors).unwrap();
        let b = run_full_factorial(&factors).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn angle_rows_are_identical_without_an_angle_model() {
        let table = run_full_factorial(&quick_factors()).unwrap();
        for chunk in table.rows.chunks(4) {
            // Rows within a chunk differ only in angle.
            for row in &chunk[1..] {
                assert_eq!(row.outcome, chunk[0].outcome);
                assert_eq!(row.fill_fraction, chunk[0].fill_fraction);
                assert_eq!(row.throwing_power, chunk[0].throwing_power);
                assert_eq!(row.mean_rate_um_h, chunk[0].mean_rate_um_h);
                assert_eq!(row.fill_time, chunk[0].fill_time);
            }
        }
        assert!(summarize(&table).angle_invariant);
    }

    #[test]
    fn cell_failures_become_error_rows() {
        let mut factors = quick_factors();
        factors.base.c_tol = 1.0e-300; // no direct solve can reach this
        let table = run_full_factorial(&factors).unwrap();
        assert_eq!(table.rows.len(), 48, "failures must not abort the table");
        // Powered forward segments all fail; only unpowered... the residual
        // tolerance applies to every solve, so every cell reports.
        assert!(
            table.rows.iter().all(|r| matches!(&r.outcome, CellOutcome::Error(msg) if msg.contains("c_tol"))),
            "expected ERROR rows with diagnostics"
        );
        assert_eq!(table.rows[0].outcome.as_str(), "ERROR");
    }

    #[test]
    fn empty_factor_lists_are_rejected() {
        let mut factors = quick_factors();
        factors.powers.clear();
        assert!(run_full_factorial(&factors).is_err());
    }

    fn synthetic_row(
        waveform: WaveformKind,
        power: f64,
        angle: f64,
        outcome: CellOutcome,
        tp: Option<f64>,
    ) -> DoeRow {
        DoeRow {
            waveform,
            power,
            angle,
            outcome,
            fill_time: Some(10.0),
            fill_fraction: 0.99,
            throwing_power: tp,
            mean_rate_um_h: 12.0,
        }
    }

    #[test]
    fn summarize_flags_on_synthetic_tables() {
        use Outcome::*;
        // All FILLED at positive powers: DC sufficient.
        let mut rows = Vec::new();
        for kind in [WaveformKind::Dc, WaveformKind::Pp] {
            for power in [0.0, 125.0, 250.0] {
                let outcome = if power > 0.0 { Filled } else { Voided };
                rows.push(synthetic_row(kind, power, 0.0, CellOutcome::Sim(outcome), Some(5.0)));
            }
        }
        let summary = summarize(&DoeTable { rows: rows.clone() });
        assert!(summary.dc_sufficient);
        assert_eq!(summary.per_waveform.len(), 2);
        assert_eq!(summary.per_power.len(), 3);
        let dc = &summary.per_waveform[0];
        assert_eq!(dc.kind, WaveformKind::Dc);
        assert!((dc.fill_rate - 2.0 / 3.0).abs() < 1e-12);
        assert_eq!(dc.mean_throwing_power, Some(5.0));

        // One underfilled DC row at power kills sufficiency.
        rows[1].outcome = CellOutcome::Sim(Underfilled);
        let summary = summarize(&DoeTable { rows: rows.clone() });
        assert!(!summary.dc_sufficient);

        // All-underfilled table: zero fill rate, not sufficient.
        for row in rows.iter_mut() {
            row.outcome = CellOutcome::Sim(Underfilled);
        }
        let summary = summarize(&DoeTable { rows });
        assert!(!summary.dc_sufficient);
        assert_eq!(summary.per_waveform[0].fill_rate, 0.0);
    }

    #[test]
    fn summarize_detects_angle_variation() {
        use Outcome::*;
        let rows = vec![
            synthetic_row(WaveformKind::Dc, 125.0, 0.0, CellOutcome::Sim(Filled), Some(5.0)),
            synthetic_row(WaveformKind::Dc, 125.0, 45.0, CellOutcome::Sim(Filled), Some(5.2)),
        ];
        let summary = summarize(&DoeTable { rows });
        assert!(!summary.angle_invariant, "4% TP spread across angles");
    }
}
