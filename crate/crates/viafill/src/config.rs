//! Line-oriented configuration: `[section]` headers over `key = value`
//! pairs, `#` comments, and units spelled into every physical key name
//! (`depth_um`, `power_w`, `freq_hz`, ...).
//!
//! Missing keys take the documented defaults; unknown keys and sections are
//! hard errors carrying the offending line, so a misspelled parameter can
//! never silently fall back to a default.

use std::path::Path;

use crate::hydro::{AngleModel, FlowConditions, MegasonicField, StreamingProfile};
use crate::physchem::Electrolyte;
use crate::viasim::{SimConfig, ViaGeometry};
use crate::waveform::{Severity, Waveform, WaveformKind};
use crate::{doe::DoeFactors, Error, Result};

/// `[geometry]` section, kept in its config units so a dumped configuration
/// reparses bit-for-bit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeometryParams {
    pub radius_um: f64,
    pub depth_um: f64,
    pub cells: usize,
    pub seed_coverage: f64,
}

impl GeometryParams {
    pub fn to_geometry(&self) -> ViaGeometry {
        ViaGeometry {
            radius: self.radius_um * 1e-6,
            depth: self.depth_um * 1e-6,
            cells: self.cells,
            seed_coverage: self.seed_coverage,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.radius_um <= 0.0 {
            return Err(Error::Config(format!("radius_um must be > 0, got {}", self.radius_um)));
        }
        if self.depth_um <= 0.0 {
            return Err(Error::Config(format!("depth_um must be > 0, got {}", self.depth_um)));
        }
        self.to_geometry().validate()
    }
}

/// PP waveform parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseParams {
    pub i_forward: f64,
    pub t_forward: f64,
    pub t_off: f64,
}

/// RP waveform parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReverseParams {
    pub i_forward: f64,
    pub t_forward: f64,
    pub i_reverse: f64,
    pub t_reverse: f64,
}

/// The three configurable schedules, one per waveform kind.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveformBank {
    pub dc_i_forward: f64,
    pub pp: PulseParams,
    pub rp: ReverseParams,
}

impl WaveformBank {
    pub fn get(&self, kind: WaveformKind) -> Waveform {
        match kind {
            WaveformKind::Dc => Waveform::Dc {
                i_forward: self.dc_i_forward,
            },
            WaveformKind::Pp => Waveform::Pulsed {
                i_forward: self.pp.i_forward,
                t_forward: self.pp.t_forward,
                t_off: self.pp.t_off,
            },
            WaveformKind::Rp => Waveform::ReversePulse {
                i_forward: self.rp.i_forward,
                t_forward: self.rp.t_forward,
                i_reverse: self.rp.i_reverse,
                t_reverse: self.rp.t_reverse,
            },
        }
    }
}

/// `[sim]` section: which waveform to run and the stepper controls.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimParams {
    pub waveform: WaveformKind,
    pub t_end: f64,
    pub dr_max_frac: f64,
    pub c_tol: f64,
    pub r_close_frac: f64,
    pub fill_frac_target: f64,
    pub snapshots: usize,
}

/// `[doe]` section: the factor grid.
#[derive(Debug, Clone, PartialEq)]
pub struct DoeParams {
    pub waveforms: Vec<WaveformKind>,
    pub powers: Vec<f64>,
    pub angles: Vec<f64>,
}

/// A fully resolved configuration tree.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub electrolyte: Electrolyte,
    pub geometry: GeometryParams,
    pub field: MegasonicField,
    pub flow: FlowConditions,
    pub waveforms: WaveformBank,
    pub sim: SimParams,
    pub doe: DoeParams,
}

impl Default for RunConfig {
    /// The documented defaults: an acid copper bath (300 g/l copper sulphate
    /// read as pentahydrate, i.e. 1200 mol/m³), a 50 µm × 200 µm via with
    /// full seed coverage, and a 1 MHz transducer at 125 W with the
    /// calibrated streaming coefficient.
    fn default() -> Self {
        RunConfig {
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
            geometry: GeometryParams {
                radius_um: 50.0,
                depth_um: 200.0,
                cells: 200,
                seed_coverage: 1.0,
            },
            field: MegasonicField {
                frequency: 1.0e6,
                power: 125.0,
                angle_deg: 0.0,
                kappa: CALIBRATED_KAPPA,
                power_ref: 500.0,
                angle_model: AngleModel::None,
                profile: StreamingProfile::Uniform,
            },
            flow: FlowConditions {
                velocity: 0.1,
                distance: 0.01,
            },
            waveforms: WaveformBank {
                dc_i_forward: 300.0,
                pp: PulseParams {
                    i_forward: 300.0,
                    t_forward: 0.010,
                    t_off: 0.010,
                },
                rp: ReverseParams {
                    i_forward: 300.0,
                    t_forward: 0.020,
                    i_reverse: 900.0,
                    t_reverse: 0.001,
                },
            },
            sim: SimParams {
                waveform: WaveformKind::Dc,
                t_end: 20000.0,
                dr_max_frac: 0.005,
                c_tol: 1.0e-10,
                r_close_frac: 0.01,
                fill_frac_target: 0.98,
                snapshots: 200,
            },
            doe: DoeParams {
                waveforms: vec![WaveformKind::Dc, WaveformKind::Pp, WaveformKind::Rp],
                powers: vec![0.0, 125.0, 250.0, 500.0],
                angles: vec![0.0, 15.0, 30.0, 45.0],
            },
        }
    }
}

/// Streaming-enhancement coefficient picked by the calibration sweep (see
/// `config/calibration.cfg`).
pub const CALIBRATED_KAPPA: f64 = 20.0;

impl RunConfig {
    /// Assembles the [`SimConfig`] for the selected `[sim]` waveform.
    pub fn sim_config(&self) -> SimConfig {
        SimConfig {
            electrolyte: self.electrolyte.clone(),
            geometry: self.geometry.to_geometry(),
            field: self.field,
            flow: self.flow,
            waveform: self.waveforms.get(self.sim.waveform),
            t_end: self.sim.t_end,
            dr_max_frac: self.sim.dr_max_frac,
            c_tol: self.sim.c_tol,
            r_close_frac: self.sim.r_close_frac,
            fill_frac_target: self.sim.fill_frac_target,
            snapshot_count: self.sim.snapshots,
        }
    }

    /// Assembles the factor grid for the `doe` command.
    pub fn doe_factors(&self) -> DoeFactors {
        DoeFactors {
            waveforms: self.doe.waveforms.iter().map(|&k| self.waveforms.get(k)).collect(),
            powers: self.doe.powers.clone(),
            angles: self.doe.angles.clone(),
            base: self.sim_config(),
        }
    }

    /// Validates the whole tree, prefixing messages with their section.
    pub fn validate(&self) -> Result<()> {
        fn prefix(section: &'static str) -> impl Fn(Error) -> Error {
            move |err| match err {
                Error::Config(msg) => Error::Config(format!("{section}.{msg}")),
                other => other,
            }
        }
        self.electrolyte.validate().map_err(prefix("electrolyte"))?;
        self.geometry.validate().map_err(prefix("geometry"))?;
        self.field.validate().map_err(prefix("field"))?;
        self.flow.validate().map_err(prefix("flow"))?;
        for kind in [WaveformKind::Dc, WaveformKind::Pp, WaveformKind::Rp] {
            for issue in self.waveforms.get(kind).validate() {
                if issue.severity == Severity::Error {
                    return Err(Error::Config(format!("waveform.{kind}: {}", issue.message)));
                }
            }
        }
        self.sim_config().validate()?;
        if self.doe.waveforms.is_empty() {
            return Err(Error::Config("doe.waveforms must not be empty".into()));
        }
        if self.doe.powers.is_empty() || self.doe.powers.iter().any(|&p| p < 0.0) {
            return Err(Error::Config("doe.powers_w must be a non-empty list of values >= 0".into()));
        }
        if self.doe.angles.is_empty() || self.doe.angles.iter().any(|&a| !(0.0..90.0).contains(&a)) {
            return Err(Error::Config(
                "doe.angles_deg must be a non-empty list of values in [0, 90)".into(),
            ));
        }
        Ok(())
    }

    /// Serializes the effective configuration; `parse_config_str` of the
    /// output reproduces `self` exactly.
    pub fn dump(&self) -> String {
        let list = |values: &[f64]| {
            values
                .iter()
                .map(|v| v.to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        let kinds = |values: &[WaveformKind]| {
            values
                .iter()
                .map(|k| k.as_str().to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        format!(
            "# viafill effective configuration\n\
             [electrolyte]\n\
             c_bulk_mol_m3 = {}\n\
             diffusivity_m2_s = {}\n\
             kinematic_viscosity_m2_s = {}\n\
             charge_number = {}\n\
             activity_coeff = {}\n\
             temperature_k = {}\n\
             standard_potential_v = {}\n\
             molar_mass_kg_mol = {}\n\
             density_kg_m3 = {}\n\
             exchange_current_a_m2 = {}\n\
             transfer_coeff = {}\n\
             \n[geometry]\n\
             radius_um = {}\n\
             depth_um = {}\n\
             cells = {}\n\
             seed_coverage = {}\n\
             \n[field]\n\
             freq_hz = {}\n\
             power_w = {}\n\
             angle_deg = {}\n\
             kappa = {}\n\
             power_ref_w = {}\n\
             angle_model = {}\n\
             profile = {}\n\
             \n[flow]\n\
             velocity_m_s = {}\n\
             distance_m = {}\n\
             \n[waveform.DC]\n\
             i_forward_a_m2 = {}\n\
             \n[waveform.PP]\n\
             i_forward_a_m2 = {}\n\
             t_forward_s = {}\n\
             t_off_s = {}\n\
             \n[waveform.RP]\n\
             i_forward_a_m2 = {}\n\
             t_forward_s = {}\n\
             i_reverse_a_m2 = {}\n\
             t_reverse_s = {}\n\
             \n[sim]\n\
             waveform = {}\n\
             t_end_s = {}\n\
             dr_max_frac = {}\n\
             c_tol = {}\n\
             r_close_frac = {}\n\
             fill_frac_target = {}\n\
             snapshots = {}\n\
             \n[doe]\n\
             waveforms = {}\n\
             powers_w = {}\n\
             angles_deg = {}\n",
            self.electrolyte.c_bulk,
            self.electrolyte.diffusivity,
            self.electrolyte.kinematic_viscosity,
            self.electrolyte.charge_number,
            self.electrolyte.activity_coeff,
            self.electrolyte.temperature,
            self.electrolyte.standard_potential,
            self.electrolyte.molar_mass,
            self.electrolyte.deposit_density,
            self.electrolyte.exchange_current,
            self.electrolyte.transfer_coeff,
            self.geometry.radius_um,
            self.geometry.depth_um,
            self.geometry.cells,
            self.geometry.seed_coverage,
            self.field.frequency,
            self.field.power,
            self.field.angle_deg,
            self.field.kappa,
            self.field.power_ref,
            match self.field.angle_model {
                AngleModel::None => "NONE",
                AngleModel::Cosine => "COSINE",
            },
            match self.field.profile {
                StreamingProfile::Uniform => "UNIFORM",
                StreamingProfile::LinearDecay => "LINEAR_DECAY",
            },
            self.flow.velocity,
            self.flow.distance,
            self.waveforms.dc_i_forward,
            self.waveforms.pp.i_forward,
            self.waveforms.pp.t_forward,
            self.waveforms.pp.t_off,
            self.waveforms.rp.i_forward,
            self.waveforms.rp.t_forward,
            self.waveforms.rp.i_reverse,
            self.waveforms.rp.t_reverse,
            self.sim.waveform,
            self.sim.t_end,
            self.sim.dr_max_frac,
            self.sim.c_tol,
            self.sim.r_close_frac,
            self.sim.fill_frac_target,
            self.sim.snapshots,
            kinds(&self.doe.waveforms),
            list(&self.doe.powers),
            list(&self.doe.angles),
        )
    }
}

fn bad(line: usize, msg: impl std::fmt::Display) -> Error {
    Error::Config(format!("line {line}: {msg}"))
}

fn parse_f64(value: &str, key: &str, line: usize) -> Result<f64> {
    value
        .parse::<f64>()
        .map_err(|_| bad(line, format!("invalid number '{value}' for {key}")))
}

fn parse_usize(value: &str, key: &str, line: usize) -> Result<usize> {
    value
        .parse::<usize>()
        .map_err(|_| bad(line, format!("invalid integer '{value}' for {key}")))
}

fn parse_f64_list(value: &str, key: &str, line: usize) -> Result<Vec<f64>> {
    value
        .split(',')
        .map(|item| parse_f64(item.trim(), key, line))
        .collect()
}

fn parse_kind(value: &str, key: &str, line: usize) -> Result<WaveformKind> {
    WaveformKind::parse(value)
        .ok_or_else(|| bad(line, format!("invalid waveform '{value}' for {key}; use DC, PP or RP")))
}

/// Parses configuration text into a [`RunConfig`], starting from the
/// documented defaults. The result is fully validated.
pub fn parse_config_str(text: &str) -> Result<RunConfig> {
    let mut cfg = RunConfig::default();
    let mut section: Option<String> = None;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if line.starts_with('[') {
            if !line.ends_with(']') {
                return Err(bad(line_no, format!("malformed section header '{line}'")));
            }
            let name = &line[1..line.len() - 1];
            match name {
                "electrolyte" | "geometry" | "field" | "flow" | "waveform.DC"
                | "waveform.PP" | "waveform.RP" | "sim" | "doe" => {
                    section = Some(name.to_string());
                }
                _ => return Err(bad(line_no, format!("unknown section [{name}]"))),
            }
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(bad(line_no, format!("expected 'key = value', got '{line}'")));
        };
        let key = key.trim();
        let value = value.trim();
        let Some(section) = section.as_deref() else {
            return Err(bad(line_no, format!("key '{key}' appears before any [section]")));
        };

        match (section, key) {
            ("electrolyte", "c_bulk_mol_m3") => cfg.electrolyte.c_bulk = parse_f64(value, key, line_no)?,
            ("electrolyte", "diffusivity_m2_s") => cfg.electrolyte.diffusivity = parse_f64(value, key, line_no)?,
            ("electrolyte", "kinematic_viscosity_m2_s") => {
                cfg.electrolyte.kinematic_viscosity = parse_f64(value, key, line_no)?
            }
            ("electrolyte", "charge_number") => {
                cfg.electrolyte.charge_number = value
                    .parse::<u32>()
                    .map_err(|_| bad(line_no, format!("invalid integer '{value}' for {key}")))?
            }
            ("electrolyte", "activity_coeff") => cfg.electrolyte.activity_coeff = parse_f64(value, key, line_no)?,
            ("electrolyte", "temperature_k") => cfg.electrolyte.temperature = parse_f64(value, key, line_no)?,
            ("electrolyte", "standard_potential_v") => {
                cfg.electrolyte.standard_potential = parse_f64(value, key, line_no)?
            }
            ("electrolyte", "molar_mass_kg_mol") => cfg.electrolyte.molar_mass = parse_f64(value, key, line_no)?,
            ("electrolyte", "density_kg_m3") => cfg.electrolyte.deposit_density = parse_f64(value, key, line_no)?,
            ("electrolyte", "exchange_current_a_m2") => {
                cfg.electrolyte.exchange_current = parse_f64(value, key, line_no)?
            }
            ("electrolyte", "transfer_coeff") => cfg.electrolyte.transfer_coeff = parse_f64(value, key, line_no)?,

            ("geometry", "radius_um") => cfg.geometry.radius_um = parse_f64(value, key, line_no)?,
            ("geometry", "depth_um") => cfg.geometry.depth_um = parse_f64(value, key, line_no)?,
            ("geometry", "cells") => cfg.geometry.cells = parse_usize(value, key, line_no)?,
            ("geometry", "seed_coverage") => cfg.geometry.seed_coverage = parse_f64(value, key, line_no)?,

            ("field", "freq_hz") => cfg.field.frequency = parse_f64(value, key, line_no)?,
            ("field", "power_w") => cfg.field.power = parse_f64(value, key, line_no)?,
            ("field", "angle_deg") => cfg.field.angle_deg = parse_f64(value, key, line_no)?,
            ("field", "kappa") => cfg.field.kappa = parse_f64(value, key, line_no)?,
            ("field", "power_ref_w") => cfg.field.power_ref = parse_f64(value, key, line_no)?,
            ("field", "angle_model") => {
                cfg.field.angle_model = match value {
                    "NONE" => AngleModel::None,
                    "COSINE" => AngleModel::Cosine,
                    _ => return Err(bad(line_no, format!("invalid angle_model '{value}'; use NONE or COSINE"))),
                }
            }
            ("field", "profile") => {
                cfg.field.profile = match value {
                    "UNIFORM" => StreamingProfile::Uniform,
                    "LINEAR_DECAY" => StreamingProfile::LinearDecay,
                    _ => {
                        return Err(bad(
                            line_no,
                            format!("invalid profile '{value}'; use UNIFORM or LINEAR_DECAY"),
                        ))
                    }
                }
            }

            ("flow", "velocity_m_s") => cfg.flow.velocity = parse_f64(value, key, line_no)?,
            ("flow", "distance_m") => cfg.flow.distance = parse_f64(value, key, line_no)?,

            ("waveform.DC", "i_forward_a_m2") => cfg.waveforms.dc_i_forward = parse_f64(value, key, line_no)?,

            ("waveform.PP", "i_forward_a_m2") => cfg.waveforms.pp.i_forward = parse_f64(value, key, line_no)?,
            ("waveform.PP", "t_forward_s") => cfg.waveforms.pp.t_forward = parse_f64(value, key, line_no)?,
            ("waveform.PP", "t_off_s") => cfg.waveforms.pp.t_off = parse_f64(value, key, line_no)?,

            ("waveform.RP", "i_forward_a_m2") => cfg.waveforms.rp.i_forward = parse_f64(value, key, line_no)?,
            ("waveform.RP", "t_forward_s") => cfg.waveforms.rp.t_forward = parse_f64(value, key, line_no)?,
            ("waveform.RP", "i_reverse_a_m2") => cfg.waveforms.rp.i_reverse = parse_f64(value, key, line_no)?,
            ("waveform.RP", "t_reverse_s") => cfg.waveforms.rp.t_reverse = parse_f64(value, key, line_no)?,

            ("sim", "waveform") => cfg.sim.waveform = parse_kind(value, key, line_no)?,
            ("sim", "t_end_s") => cfg.sim.t_end = parse_f64(value, key, line_no)?,
            ("sim", "dr_max_frac") => cfg.sim.dr_max_frac = parse_f64(value, key, line_no)?,
            ("sim", "c_tol") => cfg.sim.c_tol = parse_f64(value, key, line_no)?,
            ("sim", "r_close_frac") => cfg.sim.r_close_frac = parse_f64(value, key, line_no)?,
            ("sim", "fill_frac_target") => cfg.sim.fill_frac_target = parse_f64(value, key, line_no)?,
            ("sim", "snapshots") => cfg.sim.snapshots = parse_usize(value, key, line_no)?,

            ("doe", "waveforms") => {
                cfg.doe.waveforms = value
                    .split(',')
                    .map(|item| parse_kind(item.trim(), key, line_no))
                    .collect::<Result<Vec<_>>>()?
            }
            ("doe", "powers_w") => cfg.doe.powers = parse_f64_list(value, key, line_no)?,
            ("doe", "angles_deg") => cfg.doe.angles = parse_f64_list(value, key, line_no)?,

            _ => {
                return Err(bad(
                    line_no,
                    format!("unknown key '{key}' in section [{section}]"),
                ))
            }
        }
    }

    cfg.validate()?;
    Ok(cfg)
}

/// Reads and parses a configuration file.
pub fn parse_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_config_str(&text)
}
