//! Electrochemical primitives for cathodic metal deposition.
//!
//! The equilibrium electrode potential follows the Nernst equation
//!
//! ```text
//! E = E0 + (R·T)/(z·F) · ln(a_ox / a_red)
//! ```
//!
//! with activities `a = gamma · c`. Transport through a stagnant diffusion
//! layer of thickness delta sustains at most the limiting current density
//!
//! ```text
//! i_lim = z·F·D·c_bulk / delta
//! ```
//!
//! so thinning delta is the direct lever on deposition rate. Deposit growth
//! velocity comes from Faraday's law, `v = i·M/(z·F·rho)`. The kinetics
//! closure used by the via simulator is first order in the local ion
//! concentration: a waveform's kinetic-limit current density `i_k` (defined
//! at bulk concentration) maps to a wall rate constant `k = i_k/(z·F·c_bulk)`
//! and the local current obeys `i(x) = z·F·k·c(x)`.

use crate::constants::{FARADAY, GAS_CONSTANT};
use crate::{Error, Result};

/// Bath composition plus the transport and thermodynamic constants of the
/// depositing ion. All values SI.
#[derive(Debug, Clone, PartialEq)]
pub struct Electrolyte {
    /// Bulk ion concentration (mol/m³).
    pub c_bulk: f64,
    /// Ion diffusivity (m²/s).
    pub diffusivity: f64,
    /// Kinematic viscosity of the bath (m²/s).
    pub kinematic_viscosity: f64,
    /// Charge number of the deposition reaction (electrons per ion).
    pub charge_number: u32,
    /// Activity coefficient gamma (dimensionless).
    pub activity_coeff: f64,
    /// Bath temperature (K).
    pub temperature: f64,
    /// Standard electrode potential E0 (V).
    pub standard_potential: f64,
    /// Molar mass of the deposit (kg/mol).
    pub molar_mass: f64,
    /// Density of the deposit (kg/m³).
    pub deposit_density: f64,
    /// Exchange current density i0 (A/m²).
    pub exchange_current: f64,
    /// Cathodic transfer coefficient alpha (dimensionless, 0 < alpha < 1).
    pub transfer_coeff: f64,
}

impl Electrolyte {
    /// Checks the type invariants, naming the offending quantity.
    pub fn validate(&self) -> Result<()> {
        let checks: [(&str, bool); 10] = [
            ("c_bulk_mol_m3 must be > 0", self.c_bulk > 0.0),
            ("diffusivity_m2_s must be > 0", self.diffusivity > 0.0),
            (
                "kinematic_viscosity_m2_s must be > 0",
                self.kinematic_viscosity > 0.0,
            ),
            ("charge_number must be >= 1", self.charge_number >= 1),
            ("activity_coeff must be > 0", self.activity_coeff > 0.0),
            ("temperature_k must be > 0", self.temperature > 0.0),
            ("molar_mass_kg_mol must be > 0", self.molar_mass > 0.0),
            ("density_kg_m3 must be > 0", self.deposit_density > 0.0),
            ("exchange_current_a_m2 must be >= 0", self.exchange_current >= 0.0),
            (
                "transfer_coeff must lie in (0, 1)",
                self.transfer_coeff > 0.0 && self.transfer_coeff < 1.0,
            ),
        ];
        for (msg, ok) in checks {
            if !ok {
                return Err(Error::Config(msg.to_string()));
            }
        }
        Ok(())
    }

    fn z(&self) -> f64 {
        f64::from(self.charge_number)
    }
}

/// Equilibrium potential `E = E0 + (R·T)/(z·F)·ln(a_ox/a_red)` (V).
///
/// Natural logarithm; both activities must be positive.
pub fn nernst_potential(elec: &Electrolyte, a_ox: f64, a_red: f64) -> Result<f64> {
    if a_ox <= 0.0 {
        return Err(Error::Domain(format!("oxidized activity must be > 0, got {a_ox}")));
    }
    if a_red <= 0.0 {
        return Err(Error::Domain(format!("reduced activity must be > 0, got {a_red}")));
    }
    let rt_zf = GAS_CONSTANT * elec.temperature / (elec.z() * FARADAY);
    Ok(elec.standard_potential + rt_zf * (a_ox / a_red).ln())
}

/// Ionic activity `a = gamma · c` for a concentration in mol/m³.
pub fn ionic_activity(elec: &Electrolyte, concentration: f64) -> Result<f64> {
    if concentration < 0.0 {
        return Err(Error::Domain(format!(
            "concentration must be >= 0, got {concentration}"
        )));
    }
    Ok(elec.activity_coeff * concentration)
}

/// Diffusion-limited current density `i_lim = z·F·D·c_bulk/delta` (A/m²)
/// across a stagnant layer of thickness `delta` (m).
///
/// The corresponding molar flux is `i_lim/(z·F) = D·c_bulk/delta`.
pub fn limiting_current_density(elec: &Electrolyte, delta: f64) -> Result<f64> {
    if delta <= 0.0 {
        return Err(Error::Domain(format!(
            "boundary-layer thickness must be > 0, got {delta}"
        )));
    }
    Ok(elec.z() * FARADAY * elec.diffusivity * elec.c_bulk / delta)
}

/// Faraday growth velocity `v = i·M/(z·F·rho)` (m/s, signed like `i`).
///
/// Negative current density means dissolution (reverse pulse).
pub fn faraday_velocity(elec: &Electrolyte, current_density: f64) -> f64 {
    current_density * elec.molar_mass / (elec.z() * FARADAY * elec.deposit_density)
}

/// First-order wall rate constant `k = i_k/(z·F·c_bulk)` (m/s).
///
/// `i_k` is the kinetic-limit current density at bulk concentration; the
/// local forward current then obeys `i(x) = z·F·k·c(x)`. Callers pass
/// `i_k >= 0`.
pub fn wall_rate_constant(elec: &Electrolyte, i_k: f64) -> f64 {
    i_k / (elec.z() * FARADAY * elec.c_bulk)
}

/// Cathodic Butler-Volmer branch `i_k = i0·exp(-alpha·z·F·eta/(R·T))`,
/// returned as a positive magnitude. `eta` must be <= 0 (cathodic
/// convention); the anodic branch is out of scope.
pub fn butler_volmer_kinetic_current(elec: &Electrolyte, eta: f64) -> Result<f64> {
    if eta > 0.0 {
        return Err(Error::Domain(format!(
            "overpotential must be <= 0 (cathodic convention), got {eta}"
        )));
    }
    let exponent = -elec.transfer_coeff * elec.z() * FARADAY * eta
        / (GAS_CONSTANT * elec.temperature);
    Ok(elec.exchange_current * exponent.exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Copper system used throughout the examples.
    fn copper(c_bulk: f64) -> Electrolyte {
        Electrolyte {
            c_bulk,
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
        }
    }

    #[test]
    fn nernst_equal_activities_is_standard_potential() {
        let elec = copper(1000.0);
        for a in [1e-6, 1e-3, 1.0, 42.0, 1e4] {
            let e = nernst_potential(&elec, a, a).unwrap();
            assert_eq!(e, elec.standard_potential, "ln(1) term must vanish at a = {a}");
        }
    }

    #[test]
    fn nernst_decade_ratio_z2() {
        // (8.314462618 * 298.15) / (2 * 96485.33212) * ln(10)
        let elec = copper(1000.0);
        let e = nernst_potential(&elec, 10.0, 1.0).unwrap();
        let shift = e - elec.standard_potential;
        assert!(
            (shift - 0.029579674842860754).abs() < 1e-12,
            "decade shift at z=2: {shift}"
        );
    }

    #[test]
    fn nernst_decade_ratio_z1_doubles_z2() {
        let mut elec = copper(1000.0);
        elec.charge_number = 1;
        let e1 = nernst_potential(&elec, 10.0, 1.0).unwrap() - elec.standard_potential;
        assert!((e1 - 0.05915934968572151).abs() < 1e-12, "z=1 shift: {e1}");
        elec.charge_number = 2;
        let e2 = nernst_potential(&elec, 10.0, 1.0).unwrap() - elec.standard_potential;
        assert!((e1 - 2.0 * e2).abs() < 1e-15, "1/z scaling: {e1} vs {e2}");
    }

    #[test]
    fn nernst_monotone_in_activities() {
        let elec = copper(1000.0);
        let grid = [0.1, 0.5, 1.0, 3.0, 10.0];
        for w in grid.windows(2) {
            let lo = nernst_potential(&elec, w[0], 1.0).unwrap();
            let hi = nernst_potential(&elec, w[1], 1.0).unwrap();
            assert!(hi > lo, "E must increase with a_ox");
            let lo_red = nernst_potential(&elec, 1.0, w[0]).unwrap();
            let hi_red = nernst_potential(&elec, 1.0, w[1]).unwrap();
            assert!(hi_red < lo_red, "E must decrease with a_red");
        }
    }

    #[test]
    fn nernst_rejects_nonpositive_activity() {
        let elec = copper(1000.0);
        assert!(nernst_potential(&elec, 0.0, 1.0).is_err());
        assert!(nernst_potential(&elec, 1.0, -2.0).is_err());
    }

    #[test]
    fn activity_is_linear() {
        let mut elec = copper(1000.0);
        assert_eq!(ionic_activity(&elec, 1000.0).unwrap(), 1000.0);
        elec.activity_coeff = 0.5;
        assert_eq!(ionic_activity(&elec, 1000.0).unwrap(), 500.0);
        elec.activity_coeff = 0.043;
        let a = ionic_activity(&elec, 1200.0).unwrap();
        assert!((a - 51.6).abs() < 1e-12, "gamma*c: {a}");
        assert!(ionic_activity(&elec, -1.0).is_err());
    }

    #[test]
    fn limiting_current_hydrodynamic_layer() {
        // 2 * 96485.33212 * 5e-10 * 1000 / 5.06e-5
        let elec = copper(1000.0);
        let i = limiting_current_density(&elec, 5.06e-5).unwrap();
        assert!((i - 1906.8247454545456).abs() / i < 1e-12, "i_lim: {i}");
    }

    #[test]
    fn limiting_current_megasonic_layer_is_ninety_fold() {
        let elec = copper(1000.0);
        let slow = limiting_current_density(&elec, 5.06e-5).unwrap();
        let fast = limiting_current_density(&elec, 5.6418e-7).unwrap();
        assert!((fast - 171018.70346343366).abs() / fast < 1e-12, "i_lim: {fast}");
        let gain = fast / slow;
        assert!((gain - 89.68768832642064).abs() < 1e-9, "enhancement: {gain}");
    }

    #[test]
    fn limiting_current_inverse_in_delta() {
        let elec = copper(1000.0);
        for delta in [1e-7, 1e-6, 5e-5, 1e-3] {
            let i1 = limiting_current_density(&elec, delta).unwrap();
            let i2 = limiting_current_density(&elec, 2.0 * delta).unwrap();
            assert_eq!(2.0 * i2, i1, "doubling delta must halve i_lim exactly");
            // i_lim * delta is constant in delta.
            assert!((i1 * delta - i2 * 2.0 * delta).abs() / (i1 * delta) < 1e-15);
        }
        assert!(limiting_current_density(&elec, 0.0).is_err());
        assert!(limiting_current_density(&elec, -1.0).is_err());
    }

    #[test]
    fn faraday_velocity_copper() {
        // 100 * 0.06355 / (2 * 96485.33212 * 8960) = 3.6755e-9 m/s = 13.23 um/h
        let elec = copper(1000.0);
        assert_eq!(faraday_velocity(&elec, 0.0), 0.0);
        let v = faraday_velocity(&elec, 100.0);
        assert!((v - 3.675498530569512e-9).abs() / v < 1e-12, "v: {v}");
        let um_per_h = v * 1e6 * 3600.0;
        assert!((um_per_h - 13.2317947).abs() < 1e-6, "rate: {um_per_h} um/h");
        assert_eq!(faraday_velocity(&elec, -100.0), -v, "sign symmetry");
    }

    #[test]
    fn faraday_velocity_is_linear() {
        let elec = copper(1000.0);
        for (i1, i2) in [(30.0, 70.0), (-50.0, 125.0), (1e-3, 1e3)] {
            let lhs = faraday_velocity(&elec, i1 + i2);
            let rhs = faraday_velocity(&elec, i1) + faraday_velocity(&elec, i2);
            assert!(
                (lhs - rhs).abs() <= 1e-15 * lhs.abs().max(rhs.abs()).max(1e-300),
                "linearity at ({i1}, {i2})"
            );
        }
    }

    #[test]
    fn wall_rate_constant_examples() {
        let elec = copper(1000.0);
        assert_eq!(wall_rate_constant(&elec, 0.0), 0.0);
        let k = wall_rate_constant(&elec, 300.0);
        assert!((k - 1.5546404484926594e-6).abs() / k < 1e-12, "k: {k}");
    }

    #[test]
    fn wall_rate_constant_round_trips() {
        let elec = copper(1200.0);
        for i_k in [1e-3, 1.0, 300.0, 2.4e3] {
            let k = wall_rate_constant(&elec, i_k);
            let back = elec.z() * FARADAY * k * elec.c_bulk;
            assert!((back - i_k).abs() / i_k < 1e-14, "round trip at {i_k}: {back}");
        }
    }

    #[test]
    fn butler_volmer_cathodic_branch() {
        let elec = copper(1000.0);
        assert_eq!(butler_volmer_kinetic_current(&elec, 0.0).unwrap(), 1.0);
        // exp(0.5 * 2 * 96485.33212 * 0.1 / (8.314462618 * 298.15)) = exp(3.892174...)
        let i = butler_volmer_kinetic_current(&elec, -0.1).unwrap();
        assert!((i - 49.01735649429634).abs() / i < 1e-12, "i_k: {i}");
        assert!(butler_volmer_kinetic_current(&elec, 0.01).is_err(), "anodic branch");
    }

    #[test]
    fn butler_volmer_increases_as_eta_decreases() {
        let elec = copper(1000.0);
        let etas = [0.0, -0.01, -0.05, -0.1, -0.3];
        for w in etas.windows(2) {
            let lo = butler_volmer_kinetic_current(&elec, w[0]).unwrap();
            let hi = butler_volmer_kinetic_current(&elec, w[1]).unwrap();
            assert!(hi > lo, "i_k must grow as eta drops: {lo} vs {hi}");
        }
    }

    #[test]
    fn operations_are_pure() {
        let elec = copper(1200.0);
        assert_eq!(
            nernst_potential(&elec, 3.7, 0.2).unwrap(),
            nernst_potential(&elec, 3.7, 0.2).unwrap()
        );
        assert_eq!(
            limiting_current_density(&elec, 5.06e-5).unwrap(),
            limiting_current_density(&elec, 5.06e-5).unwrap()
        );
        assert_eq!(faraday_velocity(&elec, 17.0), faraday_velocity(&elec, 17.0));
        assert_eq!(
            butler_volmer_kinetic_current(&elec, -0.07).unwrap(),
            butler_volmer_kinetic_current(&elec, -0.07).unwrap()
        );
    }

    #[test]
    fn electrolyte_validation_names_the_field() {
        let mut elec = copper(1000.0);
        elec.c_bulk = -1.0;
        let err = elec.validate().unwrap_err().to_string();
        assert!(err.contains("c_bulk_mol_m3"), "message: {err}");
        let mut elec = copper(1000.0);
        elec.transfer_coeff = 1.0;
        assert!(elec.validate().is_err());
        assert!(copper(1200.0).validate().is_ok());
    }
}
