//! Deterministic simulator of copper electrodeposition into blind microvias
//! under megasonic agitation.
//!
//! The library couples three ingredients:
//!
//! * electrochemical primitives (Nernst potential, diffusion-limited current,
//!   Faraday growth) in [`physchem`],
//! * boundary-layer models for hydrodynamic and acoustic agitation in
//!   [`hydro`], where a >= 500 kHz acoustic field collapses the Nernst
//!   diffusion layer to the sub-micron range,
//! * a quasi-steady 1-D reaction-diffusion model of a cylindrical blind via
//!   with a moving deposit front in [`viasim`].
//!
//! On top sit plating-waveform schedules ([`waveform`]), quality metrics such
//! as throwing power ([`metrics`]), and a full-factorial
//! waveform x power x angle experiment runner ([`doe`]). The `viafill` binary
//! exposes all of it behind a line-oriented config file; see [`config`] and
//! [`cli`].
//!
//! ```
//! use viafill::config::RunConfig;
//! use viafill::hydro::acoustic_delta;
//!
//! let cfg = RunConfig::default(); // acid copper bath, 1 MHz at 125 W
//! let delta = acoustic_delta(&cfg.electrolyte, &cfg.field);
//! assert!(delta < 1.0e-6, "megasonic boundary layer is sub-micron: {delta}");
//! ```

pub mod cli;
pub mod config;
pub mod constants;
pub mod doe;
mod error;
pub mod hydro;
pub mod metrics;
pub mod output;
pub mod physchem;
pub mod viasim;
pub mod waveform;

pub use error::{Error, Result};
