//! Quasi-steady 1-D simulation of a blind cylindrical via being filled by
//! electrodeposition.
//!
//! The via is discretized into `N` axial cells of open radius `r[i]` (cell 0
//! at the mouth). Each step alternates a quasi-steady concentration solve
//! ([`solve_concentration_profile`]) with a Faraday front advance
//! ([`advance_geometry`]): concentration relaxes orders of magnitude faster
//! than the deposit moves (D/L² is fractions of a second against hours of
//! plating), so the transient diffusion equation never needs to be stepped.
//!
//! Sidewall deposit shrinks the local radius; deposit on the via bottom rises
//! as a flat floor which progressively buries the deepest cells. A cell whose
//! radius falls below the pinch threshold while unfilled open cells remain
//! beneath it seals a void — the run ends [`Outcome::Voided`]. Reaching the
//! configured volume target ends it [`Outcome::Filled`]; running out the
//! clock yields [`Outcome::Underfilled`], or [`Outcome::SeedStarved`] when
//! everything the seed layer can reach has plated and only the unseeded depth
//! remains open.

mod solver;

pub use solver::{
    analytic_profile_oracle, oracle_suite, solve_concentration_profile, OracleCase, SolveError,
    SolveOutput,
};
use solver::{solve_with_scratch, SolveScratch};

use std::f64::consts::PI;

use crate::constants::FARADAY;
use crate::hydro::{FlowConditions, MegasonicField};
use crate::metrics::{self, MetricsReport};
use crate::physchem::{faraday_velocity, wall_rate_constant, Electrolyte};
use crate::waveform::{Severity, Waveform};
use crate::{Error, Result};

/// Hard cap on simulation steps; hitting it is reported as a numerical
/// failure rather than spinning forever.
const MAX_STEPS: u64 = 50_000_000;

/// Blind-via geometry and its discretization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ViaGeometry {
    /// Initial via radius r0 (m).
    pub radius: f64,
    /// Via depth L (m).
    pub depth: f64,
    /// Axial cell count N (>= 16).
    pub cells: usize,
    /// Fraction of the depth carrying a conductive seed layer, measured from
    /// the mouth. Cells beyond it never plate; the bottom disc is seeded only
    /// at full coverage.
    pub seed_coverage: f64,
}

impl ViaGeometry {
    /// Depth over diameter.
    pub fn aspect_ratio(&self) -> f64 {
        self.depth / (2.0 * self.radius)
    }

    /// Axial cell height (m).
    pub fn cell_height(&self) -> f64 {
        self.depth / self.cells as f64
    }

    /// Depth of the center of cell `i` (m).
    pub fn cell_center(&self, i: usize) -> f64 {
        self.depth * (i as f64 + 0.5) / self.cells as f64
    }

    /// Whether the sidewall of cell `i` carries seed.
    pub fn is_seeded(&self, i: usize) -> bool {
        (i as f64 + 0.5) <= self.seed_coverage * self.cells as f64
    }

    /// Index of the deepest seeded sidewall cell.
    pub fn deepest_seeded_cell(&self) -> usize {
        let j = (self.seed_coverage * self.cells as f64 - 0.5).floor();
        (j.max(0.0) as usize).min(self.cells - 1)
    }

    pub fn validate(&self) -> Result<()> {
        if self.radius <= 0.0 {
            return Err(Error::Config(format!("radius_um must be > 0, got {}", self.radius)));
        }
        if self.depth <= 0.0 {
            return Err(Error::Config(format!("depth_um must be > 0, got {}", self.depth)));
        }
        if self.cells < 16 {
            return Err(Error::Config(format!("cells must be >= 16, got {}", self.cells)));
        }
        if !(self.seed_coverage > 0.0 && self.seed_coverage <= 1.0) {
            return Err(Error::Config(format!(
                "seed_coverage must lie in (0, 1], got {}",
                self.seed_coverage
            )));
        }
        Ok(())
    }
}

/// Everything one simulation needs.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub electrolyte: Electrolyte,
    pub geometry: ViaGeometry,
    pub field: MegasonicField,
    pub flow: FlowConditions,
    pub waveform: Waveform,
    /// Wall-clock limit of the simulated process (s).
    pub t_end: f64,
    /// Max front advance per step, as a fraction of the via radius.
    pub dr_max_frac: f64,
    /// Relative residual tolerance of the concentration solve.
    pub c_tol: f64,
    /// A cell whose radius falls below this fraction of r0 counts as closed.
    pub r_close_frac: f64,
    /// Deposited volume fraction that counts as a filled via.
    pub fill_frac_target: f64,
    /// Number of evenly spaced snapshot times (the terminal state is always
    /// recorded in addition).
    pub snapshot_count: usize,
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        self.electrolyte.validate()?;
        self.geometry.validate()?;
        self.field.validate()?;
        self.flow.validate()?;
        for issue in self.waveform.validate() {
            if issue.severity == Severity::Error {
                return Err(Error::Config(issue.message));
            }
        }
        if self.t_end <= 0.0 {
            return Err(Error::Config(format!("t_end_s must be > 0, got {}", self.t_end)));
        }
        if !(self.dr_max_frac > 0.0 && self.dr_max_frac <= 0.05) {
            return Err(Error::Config(format!(
                "dr_max_frac must lie in (0, 0.05], got {}",
                self.dr_max_frac
            )));
        }
        if self.c_tol <= 0.0 {
            return Err(Error::Config(format!("c_tol must be > 0, got {}", self.c_tol)));
        }
        if !(self.r_close_frac > 0.0 && self.r_close_frac < 0.1) {
            return Err(Error::Config(format!(
                "r_close_frac must lie in (0, 0.1), got {}",
                self.r_close_frac
            )));
        }
        if !(self.fill_frac_target > 0.0 && self.fill_frac_target <= 1.0) {
            return Err(Error::Config(format!(
                "fill_frac_target must lie in (0, 1], got {}",
                self.fill_frac_target
            )));
        }
        if self.snapshot_count < 2 {
            return Err(Error::Config(format!(
                "snapshots must be >= 2, got {}",
                self.snapshot_count
            )));
        }
        Ok(())
    }
}

/// Mutable simulation state.
///
/// `radii` tracks the sidewall deposit front: `r0 - radii[i]` is the
/// sidewall deposit thickness of cell `i`. The rising bottom floor is kept
/// separate (`bottom_thickness`, `bottom_disc_volume`); a cell the floor has
/// passed is "buried" — its sidewall radius freezes and its open channel
/// counts as floor deposit — so sidewall and bottom-disc metal never mix in
/// the metrics.
#[derive(Debug, Clone, PartialEq)]
pub struct SimState {
    /// Simulated clock (s).
    pub t: f64,
    /// Sidewall radius per cell (m), index 0 at the mouth; frozen for buried
    /// cells, whose open channel is filled by the floor.
    pub radii: Vec<f64>,
    /// Height of the bottom deposit floor above the original bottom (m).
    pub bottom_thickness: f64,
    /// Normalized concentration per cell from the latest solve.
    pub conc: Vec<f64>,
    /// Net deposited charge (C), negative contributions from dissolution.
    pub charge: f64,
    /// Volume of the bottom floor deposit (m³).
    pub bottom_disc_volume: f64,
    /// Number of fully buried cells at the via bottom.
    pub buried_cells: usize,
    /// Deposit volume requested past a geometric clamp (diagnostic, m³).
    pub clamp_loss_volume: f64,
}

impl SimState {
    /// Fresh state: bare via, bulk concentration everywhere.
    pub fn new(geom: &ViaGeometry) -> Self {
        SimState {
            t: 0.0,
            radii: vec![geom.radius; geom.cells],
            bottom_thickness: 0.0,
            conc: vec![1.0; geom.cells],
            charge: 0.0,
            bottom_disc_volume: 0.0,
            buried_cells: 0,
            clamp_loss_volume: 0.0,
        }
    }

    /// Total deposited volume (m³): sidewall annuli plus the bottom floor.
    pub fn deposited_volume(&self, geom: &ViaGeometry) -> f64 {
        let h = geom.cell_height();
        let r0 = geom.radius;
        let annuli: f64 = self
            .radii
            .iter()
            .map(|&r| PI * (r0 * r0 - r * r) * h)
            .sum();
        annuli + self.bottom_disc_volume
    }

    /// Fraction of cell `i`'s volume occupied by deposit.
    pub fn local_fill_fraction(&self, geom: &ViaGeometry, i: usize) -> f64 {
        let n = geom.cells;
        if i >= n - self.buried_cells {
            return 1.0;
        }
        let rr = self.radii[i] / geom.radius;
        let mut fill = 1.0 - rr * rr;
        if i == n - 1 - self.buried_cells {
            let level = geom.depth * self.buried_cells as f64 / n as f64;
            let partial = (self.bottom_thickness - level).max(0.0) / geom.cell_height();
            fill += rr * rr * partial;
        }
        fill
    }

    /// Height of the floor level below which cells are buried (m).
    fn burial_level(&self, geom: &ViaGeometry, buried: usize) -> f64 {
        geom.depth * buried as f64 / geom.cells as f64
    }

    /// Index of the unburied cell currently facing the floor.
    fn floor_cell(&self, geom: &ViaGeometry) -> Option<usize> {
        if self.buried_cells >= geom.cells {
            None
        } else {
            Some(geom.cells - 1 - self.buried_cells)
        }
    }
}

/// Terminal classification of a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    /// Deposited volume reached the configured target.
    Filled,
    /// Clock ran out with open, reachable volume remaining.
    Underfilled,
    /// A cell pinched shut above unfilled open cells.
    Voided,
    /// Clock ran out and only unseeded depth remains unfilled.
    SeedStarved,
}

impl Outcome {
    pub fn as_str(&self) -> &'static str {
        match self {
            Outcome::Filled => "FILLED",
            Outcome::Underfilled => "UNDERFILLED",
            Outcome::Voided => "VOIDED",
            Outcome::SeedStarved => "SEED_STARVED",
        }
    }
}

impl std::fmt::Display for Outcome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// State excerpt recorded along the run.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub t: f64,
    /// Sidewall radii; see [`Snapshot::open_radius`] for the open channel.
    pub radii: Vec<f64>,
    pub bottom_thickness: f64,
    pub conc: Vec<f64>,
    pub buried_cells: usize,
}

impl Snapshot {
    fn of(state: &SimState) -> Self {
        Snapshot {
            t: state.t,
            radii: state.radii.clone(),
            bottom_thickness: state.bottom_thickness,
            conc: state.conc.clone(),
            buried_cells: state.buried_cells,
        }
    }

    /// Open channel radius of cell `i`: zero once the floor has buried it.
    pub fn open_radius(&self, i: usize) -> f64 {
        if i >= self.radii.len() - self.buried_cells {
            0.0
        } else {
            self.radii[i]
        }
    }
}

/// Everything a finished run reports.
#[derive(Debug, Clone, PartialEq)]
pub struct SimResult {
    pub outcome: Outcome,
    /// Present exactly when `outcome` is [`Outcome::Filled`].
    pub fill_time: Option<f64>,
    pub snapshots: Vec<Snapshot>,
    pub metrics: MetricsReport,
    pub geometry: ViaGeometry,
    /// Terminal state, including the charge ledger.
    pub final_state: SimState,
    /// Worst mouth-flux vs sink mismatch over every solve of the run.
    pub max_balance_rel_err: f64,
}

/// Advances the deposit front by `dt` seconds under the signed kinetic-limit
/// current density `current_now` (A/m²), using the concentrations stored in
/// `state.conc`.
///
/// Forward current deposits on seeded open cells at the local current
/// `i(x) = current_now · c(x)/c_bulk` and raises the bottom floor; negative
/// current strips deposit-bearing surfaces at a concentration-independent
/// rate. Radii clamp to [0, r0]; volume lost to clamping is logged on the
/// state. Charge is accrued from the exact volume change of every front, so
/// the charge ledger and the deposit volume stay consistent to rounding.
pub fn advance_geometry(state: &mut SimState, cfg: &SimConfig, current_now: f64, dt: f64) {
    let geom = &cfg.geometry;
    let n = geom.cells;
    let h = geom.cell_height();
    let r0 = geom.radius;
    // C per m³ of deposit.
    let charge_per_volume = f64::from(cfg.electrolyte.charge_number) * FARADAY
        * cfg.electrolyte.deposit_density
        / cfg.electrolyte.molar_mass;

    if current_now > 0.0 {
        let unburied = n - state.buried_cells;
        for i in 0..unburied {
            if !geom.is_seeded(i) {
                continue;
            }
            let u = state.conc[i];
            let r = state.radii[i];
            if u <= 0.0 || r <= 0.0 {
                continue;
            }
            let dr = faraday_velocity(&cfg.electrolyte, current_now * u) * dt;
            let r_new = if dr >= r {
                state.clamp_loss_volume += PI * (dr - r) * (dr - r) * h;
                0.0
            } else {
                r - dr
            };
            let dv = PI * (r * r - r_new * r_new) * h;
            state.radii[i] = r_new;
            state.charge += dv * charge_per_volume;
        }

        // Floor rise: only if the open channel reaches down to the floor and
        // the floor is metal (seeded bottom or already started deposit).
        let close = cfg.r_close_frac * r0;
        let open = state
            .radii
            .iter()
            .take(unburied)
            .take_while(|&&r| r > close)
            .count();
        let floor_reachable = open == unburied && open > 0;
        let floor_is_metal = state.buried_cells > 0
            || state.bottom_thickness > 0.0
            || geom.seed_coverage >= 1.0;
        if floor_reachable && floor_is_metal {
            let u_floor = state.conc[open - 1];
            if u_floor > 0.0 {
                let rise = faraday_velocity(&cfg.electrolyte, current_now * u_floor) * dt;
                let mut df = rise.min(geom.depth - state.bottom_thickness);
                if rise > df {
                    state.clamp_loss_volume += PI * r0 * r0 * (rise - df);
                }
                while df > 0.0 {
                    let Some(b) = state.floor_cell(geom) else { break };
                    let next_level = state.burial_level(geom, state.buried_cells + 1);
                    let gap = next_level - state.bottom_thickness;
                    if gap <= 0.0 {
                        // Rounding nudged the floor past the edge already.
                        state.buried_cells += 1;
                        continue;
                    }
                    let r_b = state.radii[b];
                    let step = df.min(gap);
                    let dv = PI * r_b * r_b * step;
                    state.bottom_disc_volume += dv;
                    state.charge += dv * charge_per_volume;
                    df -= step;
                    if step >= gap {
                        // The floor crossed the cell's top edge: the cell is
                        // buried, its sidewall radius freezes as-is.
                        state.bottom_thickness = next_level;
                        state.buried_cells += 1;
                    } else {
                        state.bottom_thickness += step;
                    }
                }
            }
        }
    } else if current_now < 0.0 {
        // Dissolution is kinetics-limited: uniform over every deposit-bearing
        // surface, independent of concentration.
        let strip = -faraday_velocity(&cfg.electrolyte, current_now) * dt;
        let unburied = n - state.buried_cells;
        for i in 0..unburied {
            let r = state.radii[i];
            if r >= r0 {
                continue;
            }
            let r_new = (r + strip).min(r0);
            if r + strip > r0 {
                state.clamp_loss_volume += PI * ((r + strip) * (r + strip) - r0 * r0) * h;
            }
            let dv = PI * (r * r - r_new * r_new) * h; // negative
            state.radii[i] = r_new;
            state.charge += dv * charge_per_volume;
        }
        let mut du = strip.min(state.bottom_thickness);
        while du > 0.0 {
            let level = state.burial_level(geom, state.buried_cells);
            if state.bottom_thickness > level {
                let b = state.floor_cell(geom).expect("floor above level 0 has a cell");
                let r_b = state.radii[b];
                let step = du.min(state.bottom_thickness - level);
                let dv = PI * r_b * r_b * step;
                state.bottom_disc_volume -= dv;
                state.charge -= dv * charge_per_volume;
                if step >= state.bottom_thickness - level {
                    state.bottom_thickness = level;
                } else {
                    state.bottom_thickness -= step;
                }
                du -= step;
            } else if state.buried_cells > 0 {
                // Floor is exactly at a burial level: the cell above it is
                // re-exposed with the sidewall it had at burial.
                state.buried_cells -= 1;
            } else {
                break; // floor fully dissolved
            }
        }
    }

    state.t += dt;
}

/// Finds a pinch-off: the shallowest closed cell with at least one open,
/// under-filled cell strictly deeper. Returns the cell index and the current
/// clock.
pub fn check_pinch_off(state: &SimState, cfg: &SimConfig) -> Option<(usize, f64)> {
    let geom = &cfg.geometry;
    let thresh = cfg.r_close_frac * geom.radius;
    let unburied = geom.cells - state.buried_cells;
    let mut open_unfilled_below = false;
    let mut shallowest = None;
    for i in (0..unburied).rev() {
        if state.radii[i] <= thresh {
            if open_unfilled_below {
                shallowest = Some(i);
            }
        } else if state.local_fill_fraction(geom, i) < cfg.fill_frac_target {
            open_unfilled_below = true;
        }
    }
    shallowest.map(|i| (i, state.t))
}

/// Chosen step size plus which boundaries it lands on exactly.
struct StepPlan {
    dt: f64,
    lands_segment: bool,
    lands_snapshot: bool,
    lands_end: bool,
}

/// Runs one simulation to a terminal outcome. Fully deterministic: identical
/// configs produce bitwise-identical results.
pub fn run_simulation(cfg: &SimConfig) -> Result<SimResult> {
    cfg.validate()?;
    let geom = &cfg.geometry;
    let v0 = geom.radius * geom.radius * PI * geom.depth;
    let dr_cap = cfg.dr_max_frac * geom.radius;

    let segments = cfg.waveform.segments();
    let mut seg_idx = 0usize;
    let mut seg_remaining = segments[0].length;

    let snap_times: Vec<f64> = (0..cfg.snapshot_count)
        .map(|j| cfg.t_end * j as f64 / (cfg.snapshot_count - 1) as f64)
        .collect();
    let mut next_snap = 1usize;

    let mut state = SimState::new(geom);
    let mut scratch = SolveScratch::new(cfg);
    let mut snapshots = vec![Snapshot::of(&state)];
    let mut max_balance = 0.0f64;
    let mut steps: u64 = 0;

    let (outcome, fill_time) = loop {
        if state.t >= cfg.t_end {
            break (classify_timeout(&state, cfg), None);
        }
        steps += 1;
        if steps > MAX_STEPS {
            return Err(Error::Numerical(format!(
                "step budget of {MAX_STEPS} exhausted at t = {} s",
                state.t
            )));
        }

        let current_now = segments[seg_idx].current;
        let k_now = if current_now > 0.0 {
            wall_rate_constant(&cfg.electrolyte, current_now)
        } else {
            0.0
        };
        match solve_with_scratch(&state, cfg, k_now, &mut scratch) {
            Ok(stats) => {
                max_balance = max_balance.max(stats.balance_rel_err);
                std::mem::swap(&mut state.conc, &mut scratch.conc);
            }
            Err(SolveError::Pinched) => break (Outcome::Voided, None),
            Err(SolveError::Numerical(msg)) => {
                return Err(Error::Numerical(format!(
                    "at t = {} s (step {steps}): {msg}",
                    state.t
                )));
            }
        }

        // Step size: front-advance bound, ten steps per active segment, and
        // never across a segment, snapshot or end-of-run boundary.
        let v_scale = if current_now > 0.0 {
            let u_max = state
                .conc
                .iter()
                .fold(0.0f64, |acc, &u| acc.max(u));
            faraday_velocity(&cfg.electrolyte, current_now) * u_max
        } else {
            -faraday_velocity(&cfg.electrolyte, current_now)
        };
        let dt_front = if v_scale > 0.0 { dr_cap / v_scale } else { f64::INFINITY };
        let dt_active = if current_now != 0.0 && segments[seg_idx].length.is_finite() {
            segments[seg_idx].length / 10.0
        } else {
            f64::INFINITY
        };
        let to_snap = if next_snap < snap_times.len() {
            snap_times[next_snap] - state.t
        } else {
            f64::INFINITY
        };
        let to_end = cfg.t_end - state.t;
        let mut plan = StepPlan {
            dt: dt_front.min(dt_active),
            lands_segment: false,
            lands_snapshot: false,
            lands_end: false,
        };
        let boundary = seg_remaining.min(to_snap).min(to_end);
        if boundary <= plan.dt {
            plan.dt = boundary;
            plan.lands_segment = seg_remaining == boundary;
            plan.lands_snapshot = to_snap == boundary;
            plan.lands_end = to_end == boundary;
        }

        advance_geometry(&mut state, cfg, current_now, plan.dt);

        if plan.lands_end {
            state.t = cfg.t_end;
        } else if plan.lands_snapshot {
            state.t = snap_times[next_snap];
        }
        if plan.lands_segment {
            seg_idx = (seg_idx + 1) % segments.len();
            seg_remaining = segments[seg_idx].length;
        } else {
            seg_remaining -= plan.dt;
        }
        if plan.lands_snapshot {
            snapshots.push(Snapshot::of(&state));
            next_snap += 1;
        }

        let fill = state.deposited_volume(geom) / v0;
        if fill >= cfg.fill_frac_target {
            break (Outcome::Filled, Some(state.t));
        }
        if check_pinch_off(&state, cfg).is_some() {
            break (Outcome::Voided, None);
        }
    };

    if snapshots.last().map(|s| s.t) != Some(state.t) {
        snapshots.push(Snapshot::of(&state));
    }

    let metrics = metrics::report(geom, &state, outcome, fill_time);
    Ok(SimResult {
        outcome,
        fill_time,
        snapshots,
        metrics,
        geometry: *geom,
        final_state: state,
        max_balance_rel_err: max_balance,
    })
}

/// Distinguishes plain underfill from seed starvation once the clock runs
/// out: seed starvation means every under-filled cell lies wholly below the
/// seeded depth.
fn classify_timeout(state: &SimState, cfg: &SimConfig) -> Outcome {
    let geom = &cfg.geometry;
    let seeded_cells = cfg.geometry.seed_coverage * geom.cells as f64;
    let unburied = geom.cells - state.buried_cells;
    let mut any_unfilled = false;
    let mut all_below_seed = true;
    for i in 0..unburied {
        if state.local_fill_fraction(geom, i) < cfg.fill_frac_target {
            any_unfilled = true;
            // Cell i spans [i, i+1) cell heights; wholly below the seed depth
            // means its top edge is at or past it.
            if (i as f64) < seeded_cells - 1e-9 {
                all_below_seed = false;
            }
        }
    }
    if any_unfilled && all_below_seed {
        Outcome::SeedStarved
    } else {
        Outcome::Underfilled
    }
}
