//! Fixed physical constants (CODATA 2018). Deliberately not configurable:
//! every unit-bearing input goes through the config layer instead, so a bad
//! value of R or F can never masquerade as a bath parameter.

/// Universal gas constant (J/(mol·K)).
pub const GAS_CONSTANT: f64 = 8.314_462_618;

/// Faraday constant (C/mol).
pub const FARADAY: f64 = 96_485.332_12;
