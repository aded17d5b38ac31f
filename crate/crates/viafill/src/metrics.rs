//! Plating quality criteria: throwing power, fill fraction, deposition rate
//! and the highest aspect ratio a process ladder manages to fill.
//!
//! Throwing power is defined bottom-over-mouth on the sidewall deposit, so a
//! value above 1 means superconformal growth (more metal deep in the via than
//! at its mouth). The bottom-disc deposit is reported separately and never
//! mixed into the ratio.

use crate::viasim::{Outcome, SimResult, SimState, ViaGeometry};

/// Terminal quality metrics of one run. The fields appear verbatim as CSV
/// columns in the summary output.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsReport {
    pub outcome: Outcome,
    /// Time the fill target was reached (s); absent unless FILLED.
    pub fill_time: Option<f64>,
    /// Deposited volume over initial via volume, in [0, 1].
    pub fill_fraction: f64,
    /// Bottom-sidewall over mouth-sidewall deposit thickness; absent while
    /// the mouth is bare.
    pub throwing_power: Option<f64>,
    /// Mouth sidewall thickness over elapsed time (µm/h).
    pub mean_rate_um_h: f64,
    /// Deposit thickness on the via bottom (µm).
    pub bottom_thickness_um: f64,
}

/// Assembles the terminal [`MetricsReport`] for a finished state.
pub fn report(
    geom: &ViaGeometry,
    state: &SimState,
    outcome: Outcome,
    fill_time: Option<f64>,
) -> MetricsReport {
    MetricsReport {
        outcome,
        fill_time,
        fill_fraction: fill_fraction(state, geom),
        throwing_power: throwing_power_of_state(geom, &state.radii),
        mean_rate_um_h: rate_um_h(geom, &state.radii, state.t),
        bottom_thickness_um: state.bottom_thickness * 1e6,
    }
}

fn throwing_power_of_state(geom: &ViaGeometry, radii: &[f64]) -> Option<f64> {
    let mouth = geom.radius - radii[0];
    if mouth <= 0.0 {
        return None;
    }
    let deep = geom.radius - radii[geom.deepest_seeded_cell()];
    Some(deep / mouth)
}

fn rate_um_h(geom: &ViaGeometry, radii: &[f64], elapsed: f64) -> f64 {
    if elapsed <= 0.0 {
        return 0.0;
    }
    (geom.radius - radii[0]) * 1e6 / (elapsed / 3600.0)
}

/// Bottom-sidewall over mouth-sidewall deposit thickness at the end of a run;
/// `None` when the mouth never plated.
pub fn throwing_power(result: &SimResult) -> Option<f64> {
    throwing_power_of_state(&result.geometry, &result.final_state.radii)
}

/// Deposited volume over initial via volume, clamped to [0, 1].
pub fn fill_fraction(state: &SimState, geom: &ViaGeometry) -> f64 {
    let v0 = std::f64::consts::PI * geom.radius * geom.radius * geom.depth;
    (state.deposited_volume(geom) / v0).clamp(0.0, 1.0)
}

/// Mouth sidewall thickness over elapsed run time, in µm/h.
pub fn mean_deposition_rate(result: &SimResult) -> f64 {
    rate_um_h(
        &result.geometry,
        &result.final_state.radii,
        result.final_state.t,
    )
}

/// Result of scanning an aspect-ratio ladder.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LadderReport {
    /// Largest aspect ratio that filled; `None` if nothing did.
    pub max_fillable: Option<f64>,
    /// False when a fill appears above a failure, i.e. the ladder is not
    /// monotone and the result deserves scrutiny.
    pub monotone: bool,
}

/// Largest filled aspect ratio on a ladder of `(aspect_ratio, outcome)`
/// pairs, sorted in ascending ratio order by the caller.
pub fn max_fillable_aspect_ratio(ladder: &[(f64, Outcome)]) -> LadderReport {
    let mut max_fillable = None;
    let mut seen_failure = false;
    let mut monotone = true;
    for &(ratio, outcome) in ladder {
        if outcome == Outcome::Filled {
            if seen_failure {
                monotone = false;
            }
            max_fillable = Some(ratio);
        } else {
            seen_failure = true;
        }
    }
    LadderReport {
        max_fillable,
        monotone,
    }
}
