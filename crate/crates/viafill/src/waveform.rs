//! Plating current schedules: direct current (DC), pulsed current (PP) and
//! reverse-pulsed current (RP).
//!
//! Current densities here are kinetic-limit values, i.e. the current drawn at
//! bulk concentration; the simulator maps the forward value to a wall rate
//! constant via [`crate::physchem::wall_rate_constant`]. Forward segments
//! deposit, the PP off segment idles, and the RP reverse segment dissolves at
//! a concentration-independent rate.

/// Waveform family tag. Ordering is the canonical DOE row order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum WaveformKind {
    Dc,
    Pp,
    Rp,
}

impl WaveformKind {
    /// Exact config / CSV token.
    pub fn as_str(&self) -> &'static str {
        match self {
            WaveformKind::Dc => "DC",
            WaveformKind::Pp => "PP",
            WaveformKind::Rp => "RP",
        }
    }

    pub fn parse(token: &str) -> Option<Self> {
        match token {
            "DC" => Some(WaveformKind::Dc),
            "PP" => Some(WaveformKind::Pp),
            "RP" => Some(WaveformKind::Rp),
            _ => None,
        }
    }
}

impl std::fmt::Display for WaveformKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A periodic current-density schedule (A/m², positive = deposition).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Waveform {
    /// Constant forward current.
    Dc { i_forward: f64 },
    /// Forward segment followed by an off segment.
    Pulsed {
        i_forward: f64,
        t_forward: f64,
        t_off: f64,
    },
    /// Forward segment followed by a dissolution segment of magnitude
    /// `i_reverse`.
    ReversePulse {
        i_forward: f64,
        t_forward: f64,
        i_reverse: f64,
        t_reverse: f64,
    },
}

/// One constant-current piece of a waveform period.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    /// Signed current density during the segment (A/m²).
    pub current: f64,
    /// Segment duration (s); infinite for DC.
    pub length: f64,
}

/// Severity of a [`ValidationIssue`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Severity {
    Error,
    Warning,
}

/// A single finding from [`Waveform::validate`].
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationIssue {
    pub severity: Severity,
    pub message: String,
}

impl Waveform {
    pub fn kind(&self) -> WaveformKind {
        match self {
            Waveform::Dc { .. } => WaveformKind::Dc,
            Waveform::Pulsed { .. } => WaveformKind::Pp,
            Waveform::ReversePulse { .. } => WaveformKind::Rp,
        }
    }

    pub fn i_forward(&self) -> f64 {
        match *self {
            Waveform::Dc { i_forward }
            | Waveform::Pulsed { i_forward, .. }
            | Waveform::ReversePulse { i_forward, .. } => i_forward,
        }
    }

    /// Schedule period (s); infinite for DC.
    pub fn period(&self) -> f64 {
        match *self {
            Waveform::Dc { .. } => f64::INFINITY,
            Waveform::Pulsed {
                t_forward, t_off, ..
            } => t_forward + t_off,
            Waveform::ReversePulse {
                t_forward,
                t_reverse,
                ..
            } => t_forward + t_reverse,
        }
    }

    /// The period split into constant-current segments, in schedule order.
    pub fn segments(&self) -> Vec<Segment> {
        match *self {
            Waveform::Dc { i_forward } => vec![Segment {
                current: i_forward,
                length: f64::INFINITY,
            }],
            Waveform::Pulsed {
                i_forward,
                t_forward,
                t_off,
            } => vec![
                Segment {
                    current: i_forward,
                    length: t_forward,
                },
                Segment {
                    current: 0.0,
                    length: t_off,
                },
            ],
            Waveform::ReversePulse {
                i_forward,
                t_forward,
                i_reverse,
                t_reverse,
            } => vec![
                Segment {
                    current: i_forward,
                    length: t_forward,
                },
                Segment {
                    current: -i_reverse,
                    length: t_reverse,
                },
            ],
        }
    }

    /// Signed current density at time `t` >= 0 (A/m²).
    pub fn instantaneous_current(&self, t: f64) -> f64 {
        match *self {
            Waveform::Dc { i_forward } => i_forward,
            _ => {
                let tau = t.rem_euclid(self.period());
                let mut edge = 0.0;
                for seg in self.segments() {
                    edge += seg.length;
                    if tau < edge {
                        return seg.current;
                    }
                }
                // tau == period can only appear through rounding; that instant
                // belongs to the start of the next cycle.
                self.segments()[0].current
            }
        }
    }

    /// Period-averaged signed current density (A/m²).
    pub fn mean_current(&self) -> f64 {
        match *self {
            Waveform::Dc { i_forward } => i_forward,
            Waveform::Pulsed {
                i_forward,
                t_forward,
                t_off,
            } => i_forward * t_forward / (t_forward + t_off),
            Waveform::ReversePulse {
                i_forward,
                t_forward,
                i_reverse,
                t_reverse,
            } => (i_forward * t_forward - i_reverse * t_reverse) / (t_forward + t_reverse),
        }
    }

    /// Reports every invariant violation (severity [`Severity::Error`]) plus
    /// advisory findings such as a net-dissolving reverse-pulse schedule.
    /// Never panics; an empty list means the waveform is valid.
    pub fn validate(&self) -> Vec<ValidationIssue> {
        let mut issues = Vec::new();
        let mut error = |message: String| {
            issues.push(ValidationIssue {
                severity: Severity::Error,
                message,
            })
        };
        if self.i_forward() <= 0.0 {
            error(format!(
                "{} requires i_forward_a_m2 > 0, got {}",
                self.kind(),
                self.i_forward()
            ));
        }
        match *self {
            Waveform::Dc { .. } => {}
            Waveform::Pulsed {
                t_forward, t_off, ..
            } => {
                if t_forward <= 0.0 {
                    error(format!("PP requires t_forward_s > 0, got {t_forward}"));
                }
                if t_off <= 0.0 {
                    error(format!("PP requires t_off > 0, got {t_off}"));
                }
            }
            Waveform::ReversePulse {
                t_forward,
                i_reverse,
                t_reverse,
                ..
            } => {
                if t_forward <= 0.0 {
                    error(format!("RP requires t_forward_s > 0, got {t_forward}"));
                }
                if t_reverse <= 0.0 {
                    error(format!("RP requires t_reverse_s > 0, got {t_reverse}"));
                }
                if i_reverse <= 0.0 {
                    error(format!("RP requires i_reverse_a_m2 > 0, got {i_reverse}"));
                }
                if issues.is_empty() && self.mean_current() <= 0.0 {
                    issues.push(ValidationIssue {
                        severity: Severity::Warning,
                        message: format!(
                            "net dissolution: mean current {} A/m2 is not positive",
                            self.mean_current()
                        ),
                    });
                }
            }
        }
        issues
    }

    /// True when [`Waveform::validate`] reports no errors (warnings allowed).
    pub fn is_valid(&self) -> bool {
        self.validate()
            .iter()
            .all(|issue| issue.severity != Severity::Error)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pp() -> Waveform {
        Waveform::Pulsed {
            i_forward: 300.0,
            t_forward: 0.010,
            t_off: 0.010,
        }
    }

    fn rp() -> Waveform {
        Waveform::ReversePulse {
            i_forward: 300.0,
            t_forward: 0.020,
            i_reverse: 900.0,
            t_reverse: 0.001,
        }
    }

    #[test]
    fn dc_is_constant() {
        let w = Waveform::Dc { i_forward: 300.0 };
        assert_eq!(w.instantaneous_current(0.0), 300.0);
        assert_eq!(w.instantaneous_current(12345.6), 300.0);
        assert_eq!(w.mean_current(), 300.0);
        assert!(w.period().is_infinite());
    }

    #[test]
    fn pp_off_window() {
        let w = pp();
        assert_eq!(w.instantaneous_current(0.005), 300.0);
        assert_eq!(w.instantaneous_current(0.015), 0.0);
        assert_eq!(w.mean_current(), 150.0, "50% duty halves the mean");
    }

    #[test]
    fn rp_reverse_window() {
        let w = rp();
        assert_eq!(w.instantaneous_current(0.0105), 300.0);
        assert_eq!(w.instantaneous_current(0.0205), -900.0);
        // (300*0.020 - 900*0.001) / 0.021
        let mean = w.mean_current();
        assert!((mean - 242.85714285714286).abs() < 1e-12, "mean: {mean}");
    }

    #[test]
    fn schedules_are_periodic() {
        for w in [pp(), rp()] {
            let period = w.period();
            // Points chosen inside segments, away from boundaries.
            for t in [0.0031, 0.0097, 0.0143, 0.0199, 0.02045] {
                if w.kind() == WaveformKind::Pp && t > 0.02 {
                    continue;
                }
                for cycles in [1.0, 7.0, 1000.0] {
                    assert_eq!(
                        w.instantaneous_current(t),
                        w.instantaneous_current(t + cycles * period),
                        "periodicity at t={t}, {cycles} cycles"
                    );
                }
            }
        }
    }

    #[test]
    fn mean_matches_segment_quadrature() {
        // Midpoint quadrature over each constant segment is exact, and walks
        // instantaneous_current rather than the closed-form mean.
        for w in [Waveform::Dc { i_forward: 300.0 }, pp(), rp()] {
            let period = if w.period().is_finite() { w.period() } else { 1.0 };
            let mut integral = 0.0;
            let mut edge = 0.0;
            for seg in w.segments() {
                let len = if seg.length.is_finite() { seg.length } else { 1.0 };
                let n = 250;
                for j in 0..n {
                    let t = edge + len * (j as f64 + 0.5) / n as f64;
                    integral += w.instantaneous_current(t) * len / n as f64;
                }
                edge += len;
            }
            let mean = w.mean_current();
            assert!(
                (integral / period - mean).abs() <= 1e-12 * mean.abs().max(1.0),
                "{}: integral {} vs mean {mean}",
                w.kind(),
                integral / period
            );
        }
    }

    #[test]
    fn validation_accepts_good_waveforms() {
        assert!(Waveform::Dc { i_forward: 300.0 }.validate().is_empty());
        assert!(pp().validate().is_empty());
        assert!(rp().validate().is_empty());
    }

    #[test]
    fn validation_flags_missing_off_window() {
        let w = Waveform::Pulsed {
            i_forward: 300.0,
            t_forward: 0.010,
            t_off: 0.0,
        };
        let issues = w.validate();
        assert_eq!(issues.len(), 1);
        assert_eq!(issues[0].severity, Severity::Error);
        assert!(issues[0].message.contains("t_off"), "{}", issues[0].message);
        assert!(!w.is_valid());
    }

    #[test]
    fn validation_warns_on_net_dissolution() {
        let w = Waveform::ReversePulse {
            i_forward: 300.0,
            t_forward: 0.001,
            i_reverse: 900.0,
            t_reverse: 0.001,
        };
        let issues = w.validate();
        assert_eq!(issues.len(), 1);
        assert_eq!(issues[0].severity, Severity::Warning, "warning, not error");
        assert!(issues[0].message.contains("net dissolution"));
        assert!(w.is_valid(), "warnings do not invalidate");
    }

    #[test]
    fn kind_tokens_round_trip() {
        for kind in [WaveformKind::Dc, WaveformKind::Pp, WaveformKind::Rp] {
            assert_eq!(WaveformKind::parse(kind.as_str()), Some(kind));
        }
        assert_eq!(WaveformKind::parse("dc"), None, "tokens are case-sensitive");
    }
}
