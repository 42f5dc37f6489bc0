//! Threshold detectors, digitisation and reliability scoring.

use std::ops::Range;

use crate::config::{DetectorKind, GateKind, ScenarioFlags, SimParams};
use crate::error::{Error, Result};
use crate::transmitter::{amplitude, Line, LinePatterns};

fn max_of(values: &[f64]) -> f64 {
    values.iter().copied().fold(0.0, f64::max)
}

/// Half the largest sample inside `window`.
pub fn standard_threshold(y_f: &[f64], window: Range<usize>) -> Result<f64> {
    if window.is_empty() || window.end > y_f.len() {
        return Err(Error::EmptyWindow);
    }
    Ok(max_of(&y_f[window]) / 2.0)
}

/// Initial blind threshold: first-pulse maximum divided by `l_p`.
pub fn blind_initial(first_pulse: &[f64], l_p: usize) -> Result<f64> {
    if l_p < 1 {
        return Err(Error::InvalidArgument("L_p must be at least 1".into()));
    }
    Ok(max_of(first_pulse) / l_p as f64)
}

/// Raises the threshold to half the pulse maximum when it has fallen below
/// that level; otherwise keeps it.
pub fn blind_update(current: f64, pulse_max: f64) -> f64 {
    if pulse_max <= 0.0 {
        return current;
    }
    if current / pulse_max < 0.5 {
        0.5 * pulse_max
    } else {
        current
    }
}

/// Per-pulse blind thresholds over consecutive reading periods of
/// `samples_per_pulse` samples.
pub fn blind_thresholds(y_f: &[f64], samples_per_pulse: usize, l_p: usize) -> Result<Vec<f64>> {
    let mut periods = y_f.chunks(samples_per_pulse);
    let Some(first) = periods.next() else {
        return Ok(Vec::new());
    };
    let mut r = blind_initial(first, l_p)?;
    let mut out = vec![r];
    for period in periods {
        r = blind_update(r, max_of(period));
        out.push(r);
    }
    Ok(out)
}

/// Sample `j` is 1 iff `y_f[j]` reaches the threshold of its pulse.
pub fn digitize(y_f: &[f64], thresholds: &[f64], samples_per_pulse: usize) -> Result<Vec<bool>> {
    let needed = y_f.len().div_ceil(samples_per_pulse);
    if thresholds.len() != needed {
        return Err(Error::LengthMismatch { expected: needed, found: thresholds.len() });
    }
    Ok(y_f
        .iter()
        .enumerate()
        .map(|(j, v)| *v >= thresholds[j / samples_per_pulse])
        .collect())
}

/// Samples by which the output lags the input pulses: the transit delays
/// plus the production delay when enabled.
pub fn expected_shift(p: &SimParams, flags: &ScenarioFlags) -> usize {
    let mut lag = p.tau_in + p.tau_g;
    if flags.production_delay {
        lag += p.t_c;
    }
    p.samples_for(lag)
}

/// Per-pulse truth value of the gate. A line with zero amplitude carries a
/// logical 0 whatever its bit.
pub fn logical_pulses(patterns: &LinePatterns, gate: GateKind, p: &SimParams) -> Vec<bool> {
    let line_bits = |line: Line| -> Vec<bool> {
        let on = amplitude(line, p) > 0.0;
        patterns.get(line).bits.iter().map(|b| *b && on).collect()
    };
    match gate {
        GateKind::And => line_bits(Line::A).iter().zip(line_bits(Line::B)).map(|(a, b)| *a && b).collect(),
        GateKind::On => line_bits(Line::C),
    }
}

/// Ground-truth bit for every sample, aligned with the modelled delays.
pub fn expected_bits(patterns: &LinePatterns, gate: GateKind, p: &SimParams, flags: &ScenarioFlags) -> Vec<bool> {
    let truth = logical_pulses(patterns, gate, p);
    let shift = expected_shift(p, flags);
    (0..p.j_tot)
        .map(|j| j >= shift && truth.get((j - shift) / p.samples_per_pulse).copied().unwrap_or(false))
        .collect()
}

/// Window of the first pulse whose expected output is 1.
pub fn first_one_window(expected: &[bool], p: &SimParams, flags: &ScenarioFlags) -> Option<Range<usize>> {
    let shift = expected_shift(p, flags);
    let start = expected.iter().position(|b| *b)?;
    let k = (start - shift) / p.samples_per_pulse;
    let lo = shift + k * p.samples_per_pulse;
    Some(lo..(lo + p.samples_per_pulse).min(expected.len()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Counts {
    pub tp: usize,
    pub tn: usize,
    pub fp: usize,
    pub fn_: usize,
}

impl Counts {
    pub fn total(&self) -> usize {
        self.tp + self.tn + self.fp + self.fn_
    }

    /// Reliable-logic-computation percentage.
    pub fn rlc(&self) -> f64 {
        if self.total() == 0 {
            return 0.0;
        }
        100.0 * (self.tp + self.tn) as f64 / self.total() as f64
    }
}

pub fn rlc(bits: &[bool], expected: &[bool]) -> Result<Counts> {
    if bits.len() != expected.len() {
        return Err(Error::LengthMismatch { expected: expected.len(), found: bits.len() });
    }
    let mut c = Counts::default();
    for (b, e) in bits.iter().zip(expected) {
        match (b, e) {
            (true, true) => c.tp += 1,
            (false, false) => c.tn += 1,
            (true, false) => c.fp += 1,
            (false, true) => c.fn_ += 1,
        }
    }
    Ok(c)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DetectionReport {
    pub detector: DetectorKind,
    /// One threshold per pulse period, mol/L.
    pub thresholds: Vec<f64>,
    pub bits: Vec<bool>,
    pub expected: Vec<bool>,
    pub counts: Counts,
    pub rlc: f64,
}

impl DetectionReport {
    pub fn new(detector: DetectorKind, thresholds: Vec<f64>, bits: Vec<bool>, expected: Vec<bool>) -> Result<Self> {
        let counts = rlc(&bits, &expected)?;
        Ok(Self { detector, thresholds, bits, expected, rlc: counts.rlc(), counts })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transmitter::PatternSpec;

    #[test]
    fn standard_threshold_cases() {
        assert_eq!(standard_threshold(&[3.0; 10], 2..6).unwrap(), 1.5);
        assert_eq!(standard_threshold(&[1.0, 4.0, 2.0], 0..3).unwrap(), 2.0);
        assert!(matches!(standard_threshold(&[1.0], 0..0), Err(Error::EmptyWindow)));
        assert!(matches!(standard_threshold(&[1.0], 0..2), Err(Error::EmptyWindow)));
    }

    #[test]
    fn blind_initial_cases() {
        assert_eq!(blind_initial(&[0.0, 1e-8, 3e-9], 2).unwrap(), 5e-9);
        assert_eq!(blind_initial(&[0.0, 1e-8], 1).unwrap(), 1e-8);
        assert_eq!(blind_initial(&[0.0; 4], 2).unwrap(), 0.0);
        assert!(blind_initial(&[1.0], 0).is_err());
    }

    #[test]
    fn blind_update_cases() {
        assert_eq!(blind_update(0.6, 1.0), 0.6);
        assert_eq!(blind_update(0.4, 1.0), 0.5);
        assert_eq!(blind_update(0.4, 0.0), 0.4);
        assert_eq!(blind_update(0.5, 1.0), 0.5);
    }

    #[test]
    fn blind_sequence_is_non_decreasing() {
        let y = [1.0, 2.0, 0.5, 0.1, 8.0, 3.0, 0.0, 0.0];
        let r = blind_thresholds(&y, 2, 2).unwrap();
        assert_eq!(r, vec![1.0, 1.0, 4.0, 4.0]);
    }

    #[test]
    fn digitize_cases() {
        assert_eq!(digitize(&[2.0, 3.0], &[1.0], 2).unwrap(), vec![true, true]);
        assert_eq!(digitize(&[0.0, 0.5], &[1.0], 2).unwrap(), vec![false, false]);
        assert_eq!(digitize(&[1.0, 0.9, 1.0, 1.1], &[1.0, 1.05], 2).unwrap(), vec![true, false, false, true]);
        assert!(digitize(&[1.0, 2.0, 3.0], &[1.0], 2).is_err());
    }

    #[test]
    fn scoring() {
        let e = [true, false, true, false];
        assert_eq!(rlc(&e, &e).unwrap().rlc(), 100.0);
        let inv: Vec<bool> = e.iter().map(|b| !b).collect();
        assert_eq!(rlc(&inv, &e).unwrap().rlc(), 0.0);
        let c = rlc(&[true, true, false, false], &e).unwrap();
        assert_eq!(c, Counts { tp: 1, tn: 1, fp: 1, fn_: 1 });
        assert!(rlc(&[true], &e).is_err());
        let c = Counts { tp: 200, tn: 250, fp: 30, fn_: 20 };
        assert_eq!(c.rlc(), 90.0);
    }

    #[test]
    fn truth_tables() {
        let p = SimParams::default();
        let mut pats = LinePatterns::shared(PatternSpec::AllOnes, 10);
        pats.b.bits[0] = false;
        let and = logical_pulses(&pats, GateKind::And, &p);
        assert!(!and[0] && and[1]);
        let on = logical_pulses(&pats, GateKind::On, &p);
        assert!(on.iter().all(|b| *b));
        let silent = SimParams { m_c: 0.0, ..p };
        assert!(logical_pulses(&pats, GateKind::On, &silent).iter().all(|b| !b));
    }

    #[test]
    fn expected_alignment() {
        let p = SimParams::default();
        let flags = ScenarioFlags::new(GateKind::On, DetectorKind::Standard);
        assert_eq!(expected_shift(&p, &flags), 6);
        // (100 + 100 + 720) / 36 = 25.56
        assert_eq!(expected_shift(&p, &flags.with_delay(true)), 26);
        let pats = LinePatterns::shared(PatternSpec::Alternating, 10);
        let e = expected_bits(&pats, GateKind::On, &p, &flags);
        assert_eq!(e.len(), 500);
        assert!(!e[5] && e[6] && e[55] && !e[56]);
        assert_eq!(first_one_window(&e, &p, &flags), Some(6..56));
    }

    #[test]
    fn first_window_absent_without_ones() {
        let p = SimParams::default();
        let flags = ScenarioFlags::new(GateKind::On, DetectorKind::Standard);
        assert_eq!(first_one_window(&[false; 500], &p, &flags), None);
    }
}
