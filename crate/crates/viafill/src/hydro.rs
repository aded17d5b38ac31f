//! Boundary-layer thickness models and the in-via streaming enhancement.
//!
//! Under plain convective flow the Nernst diffusion layer over a flat surface
//! scales with the laminar boundary layer,
//!
//! ```text
//! delta_hydro = 0.16 · sqrt(nu·x / U)
//! ```
//!
//! (the dimensionally consistent reading of the classic `0.16·(nu/(U·x))^1/2`
//! correlation, which as printed is dimensionless). In an acoustic field of
//! angular frequency omega = 2·pi·f the oscillatory viscous layer takes over:
//!
//! ```text
//! delta_acoustic = sqrt(2·nu / omega)
//! ```
//!
//! which follows the 1/sqrt(f) law and is sub-micron for water-like baths
//! anywhere in the 0.5-3 MHz band. Frequencies at or above
//! [`MEGASONIC_THRESHOLD_HZ`] stream without cavitating; below it the
//! acoustic model is not applied at all. Electrical power does not enter
//! either thickness: it only drives the in-via streaming enhancement, whose
//! magnitude scales with the acoustic pressure amplitude, i.e. with sqrt(P).

use crate::physchem::Electrolyte;
use crate::{Error, Result};

/// Acoustic agitation at or above this frequency streams without cavitation;
/// the acoustic boundary-layer model applies only in that regime.
pub const MEGASONIC_THRESHOLD_HZ: f64 = 5.0e5;

/// Free-stream flow over the workpiece, for the hydrodynamic layer model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowConditions {
    /// Free-stream velocity U (m/s).
    pub velocity: f64,
    /// Streamwise distance from the leading edge x (m).
    pub distance: f64,
}

impl FlowConditions {
    pub fn validate(&self) -> Result<()> {
        if self.velocity <= 0.0 {
            return Err(Error::Config(format!(
                "velocity_m_s must be > 0, got {}",
                self.velocity
            )));
        }
        if self.distance <= 0.0 {
            return Err(Error::Config(format!(
                "distance_m must be > 0, got {}",
                self.distance
            )));
        }
        Ok(())
    }
}

/// How the radiation angle feeds into the streaming enhancement.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AngleModel {
    /// Ignore the angle entirely (observed fill quality holds at any angle).
    None,
    /// Scale the effective power by cos(theta).
    Cosine,
}

/// Depth profile of the streaming enhancement inside the via.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StreamingProfile {
    /// Same multiplier over the whole depth.
    Uniform,
    /// Full multiplier at the mouth, decaying linearly to 1 at the bottom.
    LinearDecay,
}

/// Megasonic transducer drive plus the calibration of its in-via effect.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MegasonicField {
    /// Acoustic frequency f (Hz).
    pub frequency: f64,
    /// Electrical power P (W).
    pub power: f64,
    /// Incidence angle theta between transducer and workpiece (degrees).
    pub angle_deg: f64,
    /// Streaming-enhancement coefficient kappa (dimensionless, >= 0).
    pub kappa: f64,
    /// Reference power for the sqrt(P) scaling (W).
    pub power_ref: f64,
    pub angle_model: AngleModel,
    pub profile: StreamingProfile,
}

impl MegasonicField {
    /// Field at frequency `f` and power `p` with the enhancement switched off
    /// (kappa = 0, normal incidence, uniform profile).
    pub fn at(frequency: f64, power: f64) -> Self {
        MegasonicField {
            frequency,
            power,
            angle_deg: 0.0,
            kappa: 0.0,
            power_ref: 500.0,
            angle_model: AngleModel::None,
            profile: StreamingProfile::Uniform,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.frequency <= 0.0 {
            return Err(Error::Config(format!(
                "freq_hz must be > 0, got {}",
                self.frequency
            )));
        }
        if self.power < 0.0 {
            return Err(Error::Config(format!("power_w must be >= 0, got {}", self.power)));
        }
        if !(0.0..90.0).contains(&self.angle_deg) {
            return Err(Error::Config(format!(
                "angle_deg must lie in [0, 90), got {}",
                self.angle_deg
            )));
        }
        if self.kappa < 0.0 {
            return Err(Error::Config(format!("kappa must be >= 0, got {}", self.kappa)));
        }
        if self.power_ref <= 0.0 {
            return Err(Error::Config(format!(
                "power_ref_w must be > 0, got {}",
                self.power_ref
            )));
        }
        Ok(())
    }
}

/// Hydrodynamic diffusion-layer thickness `0.16·sqrt(nu·x/U)` (m).
pub fn hydrodynamic_delta(elec: &Electrolyte, flow: &FlowConditions) -> f64 {
    0.16 * (elec.kinematic_viscosity * flow.distance / flow.velocity).sqrt()
}

/// Acoustic diffusion-layer thickness `sqrt(2·nu/omega)` with
/// `omega = 2·pi·f` (m). Independent of power and angle.
pub fn acoustic_delta(elec: &Electrolyte, field: &MegasonicField) -> f64 {
    (2.0 * elec.kinematic_viscosity / (2.0 * std::f64::consts::PI * field.frequency)).sqrt()
}

/// Boundary-layer thickness actually seen by the workpiece (m): the acoustic
/// value when the field is powered at a megasonic frequency, the hydrodynamic
/// value otherwise.
pub fn effective_delta(
    elec: &Electrolyte,
    field: &MegasonicField,
    flow: &FlowConditions,
) -> f64 {
    if field.power > 0.0 && field.frequency >= MEGASONIC_THRESHOLD_HZ {
        acoustic_delta(elec, field)
    } else {
        hydrodynamic_delta(elec, flow)
    }
}

/// Local transport multiplier (>= 1) from acoustic streaming inside the via
/// at normalized depth `xi` (0 = mouth, 1 = bottom).
///
/// The base multiplier is `1 + kappa·sqrt(P_eff/P_ref)` where `P_eff` is the
/// drive power, reduced by cos(theta) under [`AngleModel::Cosine`]. Returns
/// exactly 1 when the field is unpowered or kappa is zero.
pub fn streaming_enhancement(field: &MegasonicField, xi: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&xi) {
        return Err(Error::Domain(format!(
            "normalized depth must lie in [0, 1], got {xi}"
        )));
    }
    if field.power == 0.0 || field.kappa == 0.0 {
        return Ok(1.0);
    }
    let p_eff = match field.angle_model {
        AngleModel::None => field.power,
        AngleModel::Cosine => field.power * (field.angle_deg * std::f64::consts::PI / 180.0).cos(),
    };
    let base = 1.0 + field.kappa * (p_eff / field.power_ref).sqrt();
    Ok(match field.profile {
        StreamingProfile::Uniform => base,
        StreamingProfile::LinearDecay => 1.0 + (base - 1.0) * (1.0 - xi),
    })
}
