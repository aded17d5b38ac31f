//! Scratch probe for acceptance scenarios (temporary).

use std::time::Instant;
use viafill::config::RunConfig;
use viafill::viasim::run_simulation;

fn main() {
    let base = RunConfig::default();

    // Criterion 7: DC rows over power at calibrated kappa.
    for p in [0.0, 125.0, 250.0, 500.0] {
        let mut cfg = base.sim_config();
        cfg.field.power = p;
        let r = run_simulation(&cfg).unwrap();
        println!(
            "P={p:<4} DC k=20: outcome={} tp={:.6?} fill={:.4} t={:.0}s mouth_um={:.3}",
            r.outcome,
            r.metrics.throwing_power,
            r.metrics.fill_fraction,
            r.final_state.t,
            (cfg.geometry.radius - r.final_state.radii[0]) * 1e6,
        );
    }

    // Criterion 8: DC 100 A/m² at 125 W, short run (fill < 5%).
    let mut rc = RunConfig::default();
    rc.waveforms.dc_i_forward = 100.0;
    rc.sim.t_end = 250.0;
    let cfg = rc.sim_config();
    let t0 = Instant::now();
    let r = run_simulation(&cfg).unwrap();
    println!(
        "rate probe: rate={:.4} um/h fill={:.4} outcome={} wall={:?}",
        r.metrics.mean_rate_um_h,
        r.metrics.fill_fraction,
        r.outcome,
        t0.elapsed(),
    );

    // Grid convergence on the criterion-4 scenario.
    for cells in [200usize, 400] {
        let mut rc = RunConfig::default();
        rc.field.power = 0.0;
        rc.geometry.cells = cells;
        let r = run_simulation(&rc.sim_config()).unwrap();
        println!(
            "N={cells}: P=0 fill={:.6} outcome={}",
            r.metrics.fill_fraction, r.outcome
        );
    }
    for cells in [200usize, 400] {
        let rc = RunConfig::default(); // 125 W, kappa 20
        let mut cfg = rc.sim_config();
        cfg.geometry.cells = cells;
        let r = run_simulation(&cfg).unwrap();
        println!(
            "N={cells}: P=125 fill={:.6} outcome={}",
            r.metrics.fill_fraction, r.outcome
        );
    }
}
