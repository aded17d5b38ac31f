//! Quasi-steady concentration solve down the open via.
//!
//! On the open cells the normalized concentration u = c/c_bulk obeys
//!
//! ```text
//! d/dx( D_eff(x)·A(x)·du/dx ) = p(x)·k·u(x)
//! ```
//!
//! with channel cross-section `A = pi·r²`, sink perimeter `p = 2·pi·r` on
//! seeded cells, an external-film boundary at the mouth
//! (`D·(1 - u(0))/delta_eff` feeding the first cell) and either a reactive
//! disc (`k·u` over `pi·r²`) or a zero-flux wall at the domain bottom. The
//! finite-volume form is tridiagonal and solved by direct elimination in the
//! deficit variable d = 1 - u, which keeps the mouth-flux/sink balance free
//! of cancellation even for vanishing sink rates. The assembled system is a
//! diagonally dominant M-matrix, so the solution is positive and needs no
//! pivoting.

use std::f64::consts::PI;

use crate::hydro::{effective_delta, streaming_enhancement};
use crate::viasim::{SimConfig, SimState};

/// Result of one concentration solve.
#[derive(Debug, Clone)]
pub struct SolveOutput {
    /// Normalized concentration per cell; zero outside the transport domain.
    pub conc: Vec<f64>,
    /// Length of the open prefix the system was solved on.
    pub open_cells: usize,
    /// Film influx through the mouth (m³/s of normalized concentration).
    pub mouth_influx: f64,
    /// Sum of all wall and bottom-disc sinks (same units as `mouth_influx`).
    pub total_sink: f64,
    /// Relative mouth-flux vs total-sink mismatch.
    pub balance_rel_err: f64,
    /// Relative infinity-norm residual of the linear solve.
    pub residual: f64,
}

/// Failure modes of the concentration solve.
#[derive(Debug, Clone, PartialEq)]
pub enum SolveError {
    /// No open path from the mouth: the caller records a void.
    Pinched,
    /// Singular system or residual above the configured tolerance.
    Numerical(String),
}

impl std::fmt::Display for SolveError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SolveError::Pinched => f.write_str("via is pinched shut at the mouth"),
            SolveError::Numerical(msg) => write!(f, "{msg}"),
        }
    }
}

/// Preallocated buffers plus the per-run constants of the solve. The
/// streaming-enhancement profile depends only on the field and grid, never
/// on the evolving geometry, so it is evaluated once per run.
pub(crate) struct SolveScratch {
    enhance: Vec<f64>,
    enhance_mouth: f64,
    delta_eff: f64,
    pub(crate) conc: Vec<f64>,
    diag: Vec<f64>,
    diag_orig: Vec<f64>,
    rhs: Vec<f64>,
    g: Vec<f64>,
    sink: Vec<f64>,
    deficit: Vec<f64>,
}

/// Solve statistics without the concentration buffer.
#[derive(Debug, Clone, Copy)]
pub(crate) struct SolveStats {
    pub open_cells: usize,
    pub mouth_influx: f64,
    pub total_sink: f64,
    pub balance_rel_err: f64,
    pub residual: f64,
}

impl SolveScratch {
    pub(crate) fn new(cfg: &SimConfig) -> Self {
        let n = cfg.geometry.cells;
        let enhance: Vec<f64> = (0..n)
            .map(|i| {
                // Cell centers always lie strictly inside [0, 1].
                streaming_enhancement(&cfg.field, (i as f64 + 0.5) / n as f64)
                    .expect("cell xi in range")
            })
            .collect();
        SolveScratch {
            enhance,
            enhance_mouth: streaming_enhancement(&cfg.field, 0.0).expect("xi = 0 in range"),
            delta_eff: effective_delta(&cfg.electrolyte, &cfg.field, &cfg.flow),
            conc: vec![0.0; n],
            diag: vec![0.0; n],
            diag_orig: vec![0.0; n],
            rhs: vec![0.0; n],
            g: vec![0.0; n],
            sink: vec![0.0; n],
            deficit: vec![0.0; n],
        }
    }
}

/// Solves the quasi-steady profile for wall rate constant `k_now` (m/s),
/// writing the concentration into `ws.conc`.
pub(crate) fn solve_with_scratch(
    state: &SimState,
    cfg: &SimConfig,
    k_now: f64,
    ws: &mut SolveScratch,
) -> Result<SolveStats, SolveError> {
    let geom = &cfg.geometry;
    let n_total = geom.cells;
    let h = geom.cell_height();
    let close = cfg.r_close_frac * geom.radius;

    // Transport domain: the open prefix reachable from the mouth. Buried
    // cells end it regardless of their (frozen) sidewall radius.
    let unburied = n_total - state.buried_cells;
    let open = state
        .radii
        .iter()
        .take(unburied)
        .take_while(|&&r| r > close)
        .count();
    if open == 0 {
        return Err(SolveError::Pinched);
    }

    for u in ws.conc.iter_mut() {
        *u = 0.0;
    }
    if k_now == 0.0 {
        // No sink anywhere: the pore equilibrates with the bulk.
        for u in ws.conc.iter_mut().take(open) {
            *u = 1.0;
        }
        return Ok(SolveStats {
            open_cells: open,
            mouth_influx: 0.0,
            total_sink: 0.0,
            balance_rel_err: 0.0,
            residual: 0.0,
        });
    }

    let d_bulk = cfg.electrolyte.diffusivity;

    // Mouth conductance: external film in series with the first half-cell.
    let mouth_area = PI * state.radii[0] * state.radii[0];
    let g_mouth = mouth_area
        / (ws.delta_eff / (d_bulk * ws.enhance_mouth) + 0.5 * h / (d_bulk * ws.enhance[0]));

    // Face conductances between cells i and i+1, wall sinks per cell.
    for i in 0..open {
        if i + 1 < open {
            let da_lo = d_bulk * ws.enhance[i] * PI * state.radii[i] * state.radii[i];
            let da_hi =
                d_bulk * ws.enhance[i + 1] * PI * state.radii[i + 1] * state.radii[i + 1];
            ws.g[i] = 0.5 * (da_lo + da_hi) / h;
        }
        ws.sink[i] = if geom.is_seeded(i) {
            k_now * 2.0 * PI * state.radii[i] * h
        } else {
            0.0
        };
    }

    // Bottom closure: a reactive disc wherever the domain ends on metal
    // (seeded via bottom, an already started bottom deposit, or a deposit
    // plug), a zero-flux wall otherwise.
    let bottom_is_metal = if open == n_total && state.buried_cells == 0 {
        geom.seed_coverage >= 1.0 || state.bottom_thickness > 0.0
    } else {
        true
    };
    let disc = if bottom_is_metal {
        k_now * PI * state.radii[open - 1] * state.radii[open - 1]
    } else {
        0.0
    };

    // Deficit form: same matrix as for u, right-hand side = sink column.
    for i in 0..open {
        let mut diag = ws.sink[i];
        let mut rhs = ws.sink[i];
        if i == 0 {
            diag += g_mouth;
        }
        if i > 0 {
            diag += ws.g[i - 1];
        }
        if i + 1 < open {
            diag += ws.g[i];
        } else {
            diag += disc;
            rhs += disc;
        }
        ws.diag[i] = diag;
        ws.diag_orig[i] = diag; // kept for the residual check
        ws.rhs[i] = rhs;
    }

    // Thomas elimination.
    for i in 1..open {
        let pivot = ws.diag[i - 1];
        if !(pivot > 0.0) || !pivot.is_finite() {
            return Err(SolveError::Numerical(format!(
                "singular concentration system: pivot {pivot} at cell {} of {open}",
                i - 1
            )));
        }
        let w = ws.g[i - 1] / pivot;
        ws.diag[i] -= w * ws.g[i - 1];
        ws.rhs[i] += w * ws.rhs[i - 1];
    }
    let last = ws.diag[open - 1];
    if !(last > 0.0) || !last.is_finite() {
        return Err(SolveError::Numerical(format!(
            "singular concentration system: pivot {last} at cell {} of {open}",
            open - 1
        )));
    }
    ws.deficit[open - 1] = ws.rhs[open - 1] / last;
    for i in (0..open - 1).rev() {
        ws.deficit[i] = (ws.rhs[i] + ws.g[i] * ws.deficit[i + 1]) / ws.diag[i];
    }

    // Residual of the original system, relative to its largest source term.
    let mut b_scale = 1e-300f64;
    for i in 0..open {
        let b = ws.sink[i] + if i + 1 == open { disc } else { 0.0 };
        b_scale = b_scale.max(b);
    }
    let mut residual = 0.0f64;
    let mut worst_cell = 0;
    for i in 0..open {
        let mut ax = ws.diag_orig[i] * ws.deficit[i];
        if i > 0 {
            ax -= ws.g[i - 1] * ws.deficit[i - 1];
        }
        if i + 1 < open {
            ax -= ws.g[i] * ws.deficit[i + 1];
        }
        let b = ws.sink[i] + if i + 1 == open { disc } else { 0.0 };
        let r = (ax - b).abs() / b_scale;
        if r > residual {
            residual = r;
            worst_cell = i;
        }
    }
    if residual > cfg.c_tol {
        return Err(SolveError::Numerical(format!(
            "concentration residual {residual:.3e} exceeds c_tol {:.3e} (worst at cell {worst_cell} of {open})",
            cfg.c_tol
        )));
    }

    let mut total_sink = 0.0;
    for i in 0..open {
        ws.conc[i] = (1.0 - ws.deficit[i]).clamp(0.0, 1.0);
        total_sink += ws.sink[i] * ws.conc[i];
    }
    total_sink += disc * ws.conc[open - 1];
    let mouth_influx = g_mouth * ws.deficit[0];
    let balance_rel_err =
        (mouth_influx - total_sink).abs() / mouth_influx.abs().max(total_sink.abs()).max(1e-300);

    Ok(SolveStats {
        open_cells: open,
        mouth_influx,
        total_sink,
        balance_rel_err,
        residual,
    })
}

/// Solves the quasi-steady profile for wall rate constant `k_now` (m/s).
///
/// `k_now` must be >= 0; pass 0 for off/reverse segments, which short-circuits
/// to the bulk-equilibrium profile u = 1 on the open cells.
pub fn solve_concentration_profile(
    state: &SimState,
    cfg: &SimConfig,
    k_now: f64,
) -> Result<SolveOutput, SolveError> {
    let mut ws = SolveScratch::new(cfg);
    let stats = solve_with_scratch(state, cfg, k_now, &mut ws)?;
    Ok(SolveOutput {
        conc: ws.conc,
        open_cells: stats.open_cells,
        mouth_influx: stats.mouth_influx,
        total_sink: stats.total_sink,
        balance_rel_err: stats.balance_rel_err,
        residual: stats.residual,
    })
}

/// Closed-form profile for a constant-radius pore with uniform wall rate,
/// bulk concentration pinned at the mouth plane and a zero-flux bottom:
///
/// ```text
/// u(x) = cosh(m·(L - x)) / cosh(m·L),   m = sqrt(2·k / (D·r))
/// ```
///
/// Evaluated in exponential form so large `m·L` cannot overflow.
pub fn analytic_profile_oracle(radius: f64, depth: f64, diffusivity: f64, k: f64, x: f64) -> f64 {
    let m = (2.0 * k / (diffusivity * radius)).sqrt();
    // cosh(m(L-x))/cosh(mL) = e^{-mx} (1 + e^{-2m(L-x)}) / (1 + e^{-2mL})
    let num = 1.0 + (-2.0 * m * (depth - x)).exp();
    let den = 1.0 + (-2.0 * m * depth).exp();
    (-m * x).exp() * num / den
}

/// One case of the oracle-equivalence suite.
#[derive(Debug, Clone, Copy)]
pub struct OracleCase {
    /// Dimensionless sink strength m·L of the case.
    pub m_l: f64,
    /// Maximum relative error of the numeric profile against the oracle.
    pub max_rel_err: f64,
}

/// Runs the numeric solver against [`analytic_profile_oracle`] on a
/// constant-radius pore (r = 50 um, L = 200 um, enhancement off, film
/// thickness below 1 nm) at m·L in {0.5, 2, 5.66} and reports the worst
/// relative error per case.
pub fn oracle_suite(cells: usize) -> Vec<OracleCase> {
    use crate::hydro::{FlowConditions, MegasonicField};
    use crate::physchem::Electrolyte;
    use crate::viasim::ViaGeometry;
    use crate::waveform::Waveform;

    let radius = 5.0e-5;
    let depth = 2.0e-4;
    let diffusivity = 5.0e-10;
    let elec = Electrolyte {
        c_bulk: 1200.0,
        diffusivity,
        kinematic_viscosity: 1.0e-6,
        charge_number: 2,
        activity_coeff: 1.0,
        temperature: 298.15,
        standard_potential: 0.337,
        molar_mass: 0.06355,
        deposit_density: 8960.0,
        exchange_current: 1.0,
        transfer_coeff: 0.5,
    };
    // 1 THz drive puts the film thickness at 0.56 nm, i.e. the mouth plane is
    // effectively pinned to bulk concentration as the oracle assumes.
    let field = MegasonicField::at(1.0e12, 125.0);
    let cfg = SimConfig {
        electrolyte: elec,
        geometry: ViaGeometry {
            radius,
            depth,
            cells,
            // All sidewall cells seeded, but not the bottom disc: the oracle
            // has no bottom sink.
            seed_coverage: 1.0 - 1e-9,
        },
        field,
        flow: FlowConditions {
            velocity: 0.1,
            distance: 0.01,
        },
        waveform: Waveform::Dc { i_forward: 300.0 },
        t_end: 1.0,
        dr_max_frac: 0.005,
        c_tol: 1.0e-10,
        r_close_frac: 0.01,
        fill_frac_target: 0.98,
        snapshot_count: 200,
    };
    let state = SimState::new(&cfg.geometry);

    [0.5, 2.0, 5.66]
        .iter()
        .map(|&m_l| {
            let m = m_l / depth;
            let k = m * m * diffusivity * radius / 2.0;
            let out = solve_concentration_profile(&state, &cfg, k)
                .expect("oracle configuration must solve");
            let mut max_rel_err = 0.0f64;
            for i in 0..cells {
                let x = cfg.geometry.cell_center(i);
                let exact = analytic_profile_oracle(radius, depth, diffusivity, k, x);
                let rel = (out.conc[i] - exact).abs() / exact;
                max_rel_err = max_rel_err.max(rel);
            }
            OracleCase { m_l, max_rel_err }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hydro::{FlowConditions, MegasonicField};
    use crate::physchem::Electrolyte;
    use crate::viasim::{SimConfig, SimState, ViaGeometry};
    use crate::waveform::Waveform;

    fn test_cfg(cells: usize) -> SimConfig {
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
                radius: 5.0e-5,
                depth: 2.0e-4,
                cells,
                seed_coverage: 1.0 - 1e-9,
            },
            field: MegasonicField::at(1.0e12, 125.0),
            flow: FlowConditions {
                velocity: 0.1,
                distance: 0.01,
            },
            waveform: Waveform::Dc { i_forward: 300.0 },
            t_end: 1.0,
            dr_max_frac: 0.005,
            c_tol: 1.0e-10,
            r_close_frac: 0.01,
            fill_frac_target: 0.98,
            snapshot_count: 200,
        }
    }

    #[test]
    fn oracle_pins_mouth_to_bulk() {
        assert_eq!(analytic_profile_oracle(5e-5, 2e-4, 5e-10, 1e-5, 0.0), 1.0);
        assert_eq!(analytic_profile_oracle(5e-5, 2e-4, 5e-10, 0.0, 1e-4), 1.0);
    }

    #[test]
    fn oracle_bottom_values() {
        // 1/cosh(5.65685...) and 1/cosh(1.78885...)
        let deep = analytic_profile_oracle(5e-5, 2e-4, 5e-10, 1e-5, 2e-4);
        assert!(
            (deep - 0.006986893281981631).abs() / deep < 1e-12,
            "bottom ratio at k=1e-5: {deep}"
        );
        let mild = analytic_profile_oracle(5e-5, 2e-4, 5e-10, 1e-6, 2e-4);
        assert!(
            (mild - 0.325216666687326).abs() / mild < 1e-12,
            "bottom ratio at k=1e-6: {mild}"
        );
    }

    #[test]
    fn oracle_is_stable_for_huge_sink() {
        // m*L around 1.4e3: naive cosh would overflow.
        let v = analytic_profile_oracle(5e-5, 2e-4, 5e-10, 0.625, 1e-4);
        assert!(v.is_finite() && v > 0.0 && v < 1e-300, "tail value: {v}");
    }

    #[test]
    fn zero_rate_returns_bulk_everywhere() {
        let cfg = test_cfg(64);
        let state = SimState::new(&cfg.geometry);
        let out = solve_concentration_profile(&state, &cfg, 0.0).unwrap();
        assert!(out.conc.iter().all(|&u| u == 1.0));
        assert_eq!(out.open_cells, 64);
    }

    #[test]
    fn numeric_profile_matches_oracle_within_half_percent() {
        for case in oracle_suite(200) {
            assert!(
                case.max_rel_err <= 0.005,
                "m·L = {}: max relative error {:.4e}",
                case.m_l,
                case.max_rel_err
            );
        }
    }

    #[test]
    fn numeric_profile_converges_with_grid() {
        let coarse = oracle_suite(200);
        let fine = oracle_suite(400);
        for (c, f) in coarse.iter().zip(&fine) {
            assert!(
                f.max_rel_err < c.max_rel_err,
                "refinement must reduce error at m·L = {}: {} vs {}",
                c.m_l,
                c.max_rel_err,
                f.max_rel_err
            );
        }
    }

    #[test]
    fn solve_conserves_mass() {
        let cfg = test_cfg(200);
        let state = SimState::new(&cfg.geometry);
        for k in [1e-8, 1e-6, 1e-5, 3e-4] {
            let out = solve_concentration_profile(&state, &cfg, k).unwrap();
            // Elimination rounding accumulates roughly as n²·eps; 1e-10 still
            // leaves two orders of margin to the conservation requirement.
            assert!(
                out.balance_rel_err <= 1e-10,
                "mouth flux {} vs sinks {} at k={k}",
                out.mouth_influx,
                out.total_sink
            );
            assert!(out.residual <= cfg.c_tol);
        }
    }

    #[test]
    fn profile_is_bounded_and_monotone() {
        let cfg = test_cfg(128);
        let state = SimState::new(&cfg.geometry);
        let out = solve_concentration_profile(&state, &cfg, 2e-6).unwrap();
        for w in out.conc[..out.open_cells].windows(2) {
            assert!(w[1] <= w[0] + 1e-15, "c must not increase with depth");
        }
        assert!(out.conc.iter().all(|&u| (0.0..=1.0).contains(&u)));
        assert!(out.conc[0] < 1.0, "a finite film always drops the mouth value");
    }

    #[test]
    fn external_film_throttles_the_whole_profile() {
        let mut cfg = test_cfg(128);
        let state = SimState::new(&cfg.geometry);
        let with_field = solve_concentration_profile(&state, &cfg, 1e-6)
            .unwrap()
            .conc[0];
        cfg.field.power = 0.0; // hydrodynamic film, about 50 um thick
        let without = solve_concentration_profile(&state, &cfg, 1e-6)
            .unwrap()
            .conc[0];
        assert!(
            without < with_field,
            "thick film must starve the mouth cell: {without} vs {with_field}"
        );
    }

    #[test]
    fn pinched_mouth_is_signalled() {
        let cfg = test_cfg(64);
        let mut state = SimState::new(&cfg.geometry);
        state.radii[0] = 0.0;
        assert_eq!(
            solve_concentration_profile(&state, &cfg, 1e-6).unwrap_err(),
            SolveError::Pinched
        );
    }

    #[test]
    fn domain_stops_at_first_closed_cell() {
        let cfg = test_cfg(64);
        let mut state = SimState::new(&cfg.geometry);
        state.radii[40] = 0.0;
        let out = solve_concentration_profile(&state, &cfg, 1e-6).unwrap();
        assert_eq!(out.open_cells, 40);
        assert!(out.conc[40..].iter().all(|&u| u == 0.0));
    }

    #[test]
    fn domain_stops_at_the_deposit_floor() {
        let cfg = test_cfg(64);
        let mut state = SimState::new(&cfg.geometry);
        // Floor has swallowed the two deepest cells; their frozen sidewall
        // radii stay wide open but must not extend the domain.
        state.buried_cells = 2;
        state.bottom_thickness = 2.0 * cfg.geometry.cell_height();
        let out = solve_concentration_profile(&state, &cfg, 1e-6).unwrap();
        assert_eq!(out.open_cells, 62);
        assert!(out.conc[62..].iter().all(|&u| u == 0.0));
        // The floor is metal: the last open cell carries a disc sink, so the
        // profile there dips below the no-disc variant.
        let mut no_floor = SimState::new(&cfg.geometry);
        no_floor.radii.copy_from_slice(&state.radii);
        let reference = solve_concentration_profile(&no_floor, &cfg, 1e-6).unwrap();
        assert!(out.conc[61] < reference.conc[61]);
    }

    #[test]
    fn unattainable_tolerance_is_a_numerical_error() {
        let mut cfg = test_cfg(64);
        cfg.c_tol = 0.0;
        let state = SimState::new(&cfg.geometry);
        match solve_concentration_profile(&state, &cfg, 1e-6) {
            Err(SolveError::Numerical(msg)) => {
                assert!(msg.contains("c_tol"), "diagnostics: {msg}")
            }
            other => panic!("expected a numerical error, got {other:?}"),
        }
    }

    #[test]
    fn corrupt_inputs_are_reported_not_propagated() {
        let mut cfg = test_cfg(64);
        cfg.electrolyte.diffusivity = f64::NAN;
        let state = SimState::new(&cfg.geometry);
        match solve_concentration_profile(&state, &cfg, 1e-6) {
            Err(SolveError::Numerical(msg)) => {
                assert!(msg.contains("pivot"), "diagnostics: {msg}")
            }
            other => panic!("expected a numerical error, got {other:?}"),
        }
    }
}
