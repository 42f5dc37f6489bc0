//! End-to-end pipeline, Monte Carlo sweeps and CSV reports.

use std::fmt::Write as _;

use rand::Rng;
use rayon::prelude::*;

use crate::channel;
use crate::config::{scenario_label, DetectorKind, GateKind, ScenarioFlags, SimParams};
use crate::detection::{self, DetectionReport};
use crate::electrochem;
use crate::error::{Error, Result};
use crate::gate::{integrate_gate, GateResponse};
use crate::receiver::{received, ReceivedSignal};
use crate::rng::run_rng;
use crate::transmitter::{input_concentration, Line, LinePatterns, PatternSpec};

// ---------------------------------------------------------------------------
// Single run
// ---------------------------------------------------------------------------

/// Every intermediate series of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    pub gate: GateResponse,
    pub received: ReceivedSignal,
    pub expected: Vec<bool>,
}

pub fn simulate_trace<R: Rng + ?Sized>(
    p: &SimParams,
    flags: ScenarioFlags,
    patterns: &LinePatterns,
    rng: &mut R,
) -> Result<Trace> {
    let lines: &[Line] = match flags.gate {
        GateKind::And => &[Line::A, Line::B],
        GateKind::On => &[Line::C],
    };
    let inputs: Vec<_> = lines.iter().map(|l| input_concentration(patterns.get(*l), p)).collect();
    let gate = integrate_gate(&inputs, flags, p, rng)?;
    let received = received(channel::sensor_signal(&gate, p), p);
    if received.y_f.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("received signal"));
    }
    let expected = detection::expected_bits(patterns, flags.gate, p, &flags);
    Ok(Trace { gate, received, expected })
}

/// Standard threshold from the first expected-1 pulse of a trace; infinite
/// when no pulse is expected to carry a 1.
pub fn standard_from_trace(trace: &Trace, p: &SimParams, flags: &ScenarioFlags) -> Result<f64> {
    match detection::first_one_window(&trace.expected, p, flags) {
        Some(w) => detection::standard_threshold(&trace.received.y_f, w),
        None => Ok(f64::INFINITY),
    }
}

/// Standard threshold known a priori: taken from the noise-free run of the
/// same parameters and patterns.
pub fn standard_reference(p: &SimParams, flags: ScenarioFlags, patterns: &LinePatterns) -> Result<f64> {
    let quiet = flags.with_noise(false);
    let trace = simulate_trace(p, quiet, patterns, &mut run_rng(p.seed, 0))?;
    standard_from_trace(&trace, p, &quiet)
}

/// Digitises a trace with the chosen detector. The standard detector uses
/// `standard` when given, otherwise the trace's own first expected-1 pulse.
pub fn detect(
    trace: &Trace,
    detector: DetectorKind,
    p: &SimParams,
    flags: &ScenarioFlags,
    standard: Option<f64>,
) -> Result<DetectionReport> {
    let y_f = &trace.received.y_f;
    let periods = y_f.len().div_ceil(p.samples_per_pulse);
    let thresholds = match detector {
        DetectorKind::Standard => {
            let r = match standard {
                Some(r) => r,
                None => standard_from_trace(trace, p, flags)?,
            };
            vec![r; periods]
        }
        DetectorKind::Blind => detection::blind_thresholds(y_f, p.samples_per_pulse, p.l_p)?,
    };
    let bits = detection::digitize(y_f, &thresholds, p.samples_per_pulse)?;
    DetectionReport::new(detector, thresholds, bits, trace.expected.clone())
}

/// Runs transmitter → gate → channel → receiver → detector once. Noise is
/// drawn from the stream of `run_index`; the standard threshold comes from
/// the noise-free run.
pub fn run_scenario(
    p: &SimParams,
    flags: ScenarioFlags,
    patterns: &LinePatterns,
    run_index: u64,
) -> Result<DetectionReport> {
    let standard = match flags.detector {
        DetectorKind::Standard => Some(standard_reference(p, flags, patterns)?),
        DetectorKind::Blind => None,
    };
    let trace = simulate_trace(p, flags, patterns, &mut run_rng(p.seed, run_index))?;
    detect(&trace, flags.detector, p, &flags, standard)
}

// ---------------------------------------------------------------------------
// Sweeps
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PatternMode {
    /// One seeded random pattern shared by every line.
    Random,
    /// Independent seeded random patterns per line.
    Independent,
    AllOnes,
    Alternating,
}

impl PatternMode {
    pub fn patterns(self, seed: u64, n_pulses: usize) -> LinePatterns {
        match self {
            PatternMode::Random => LinePatterns::shared(PatternSpec::SeededRandom(seed), n_pulses),
            PatternMode::Independent => LinePatterns::independent(seed, n_pulses),
            PatternMode::AllOnes => LinePatterns::shared(PatternSpec::AllOnes, n_pulses),
            PatternMode::Alternating => LinePatterns::shared(PatternSpec::Alternating, n_pulses),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            PatternMode::Random => "random",
            PatternMode::Independent => "independent",
            PatternMode::AllOnes => "ones",
            PatternMode::Alternating => "alternating",
        }
    }
}

impl std::str::FromStr for PatternMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "random" => Ok(PatternMode::Random),
            "independent" => Ok(PatternMode::Independent),
            "ones" | "all-ones" => Ok(PatternMode::AllOnes),
            "alternating" => Ok(PatternMode::Alternating),
            _ => Err(Error::InvalidArgument(format!("unknown pattern `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepKind {
    /// Values are tau_g, s.
    Delay,
    /// Values are m_B (AND) or m_C (ON), mol/L.
    Concentration,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub kind: SweepKind,
    pub gates: Vec<GateKind>,
    pub detectors: Vec<DetectorKind>,
    pub values: Vec<f64>,
    pub repeats: usize,
    pub production_noise: bool,
    pub production_delay: bool,
    pub pattern: PatternMode,
}

impl SweepSpec {
    pub fn new(kind: SweepKind, values: Vec<f64>) -> Self {
        Self {
            kind,
            gates: GateKind::ALL.to_vec(),
            detectors: DetectorKind::ALL.to_vec(),
            values,
            repeats: 10,
            production_noise: true,
            production_delay: false,
            pattern: PatternMode::Random,
        }
    }

    pub fn scenario(&self) -> &'static str {
        scenario_label(self.production_noise, self.production_delay)
    }

    fn validate(&self) -> Result<()> {
        if self.values.is_empty() {
            return Err(Error::InvalidArgument("sweep needs at least one value".into()));
        }
        if let Some(v) = self.values.iter().find(|v| !(**v > 0.0 && v.is_finite())) {
            return Err(Error::InvalidArgument(format!("sweep values must be positive, got {v}")));
        }
        if self.repeats < 1 {
            return Err(Error::InvalidArgument("repeats must be at least 1".into()));
        }
        if self.gates.is_empty() || self.detectors.is_empty() {
            return Err(Error::InvalidArgument("at least one gate and one detector required".into()));
        }
        Ok(())
    }
}

/// τ_g from 100 s to 600 s in 100 s steps.
pub fn default_delays() -> Vec<f64> {
    (1..=6).map(|k| 100.0 * k as f64).collect()
}

/// 1.0 to 3.0 mmol/L in 0.125 mmol/L steps, as mol/L.
pub fn default_concentrations() -> Vec<f64> {
    (0..=16).map(|k| (1000.0 + 125.0 * k as f64) * 1e-6).collect()
}

/// Name of the swept quantity and the parameters at one sweep value.
pub fn sweep_point(p: &SimParams, kind: SweepKind, gate: GateKind, value: f64) -> (&'static str, SimParams) {
    let mut q = p.clone();
    let name = match (kind, gate) {
        (SweepKind::Delay, _) => {
            q.tau_g = value;
            "tau_g"
        }
        (SweepKind::Concentration, GateKind::And) => {
            q.m_b = value;
            "m_B"
        }
        (SweepKind::Concentration, GateKind::On) => {
            q.m_c = value;
            "m_C"
        }
    };
    (name, q)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunRow {
    pub gate: GateKind,
    pub detector: DetectorKind,
    pub scenario: &'static str,
    pub x_name: &'static str,
    pub x_value: f64,
    pub run_index: usize,
    pub rlc: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointSummary {
    pub gate: GateKind,
    pub detector: DetectorKind,
    pub scenario: &'static str,
    pub x_name: &'static str,
    pub x_value: f64,
    pub rlc_mean: f64,
    pub rlc_std: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub spec: SweepSpec,
    pub params: SimParams,
    pub rows: Vec<RunRow>,
    pub points: Vec<PointSummary>,
}

impl RunReport {
    /// Mean RLC per sweep value for one gate and detector, in sweep order.
    pub fn means(&self, gate: GateKind, detector: DetectorKind) -> Vec<(f64, f64)> {
        self.points
            .iter()
            .filter(|s| s.gate == gate && s.detector == detector)
            .map(|s| (s.x_value, s.rlc_mean))
            .collect()
    }
}

/// Sample mean and standard deviation, summed in order.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.windows(2).all(|w| w[0] == w[1]) {
        return (values[0], 0.0);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    (mean, (ss / (n - 1.0)).sqrt())
}

/// Runs a sweep. Each gate's standard threshold is fixed a priori from the
/// noise-free run at `p`, then applied at every sweep value.
pub fn sweep(p: &SimParams, spec: &SweepSpec) -> Result<RunReport> {
    p.validate()?;
    spec.validate()?;
    let patterns = spec.pattern.patterns(p.seed, p.n_pulses);
    let scenario = spec.scenario();
    let flags_for = |gate| {
        ScenarioFlags::new(gate, DetectorKind::Standard)
            .with_noise(spec.production_noise)
            .with_delay(spec.production_delay)
    };

    let references: Vec<f64> = spec
        .gates
        .iter()
        .map(|g| standard_reference(p, flags_for(*g), &patterns))
        .collect::<Result<_>>()?;

    let tasks: Vec<(usize, usize, usize)> = (0..spec.gates.len())
        .flat_map(|g| (0..spec.values.len()).flat_map(move |v| (0..spec.repeats).map(move |r| (g, v, r))))
        .collect();
    // (gate, value, run) -> one RLC per detector, in task order
    let results: Vec<Vec<f64>> = tasks
        .par_iter()
        .map(|&(g, v, r)| {
            let gate = spec.gates[g];
            let (_, q) = sweep_point(p, spec.kind, gate, spec.values[v]);
            q.validate()?;
            let flags = flags_for(gate);
            let trace = simulate_trace(&q, flags, &patterns, &mut run_rng(p.seed, r as u64))?;
            spec.detectors
                .iter()
                .map(|d| detect(&trace, *d, &q, &flags, Some(references[g])).map(|rep| rep.rlc))
                .collect()
        })
        .collect::<Result<_>>()?;

    let mut rows = Vec::new();
    let mut points = Vec::new();
    for (g, gate) in spec.gates.iter().enumerate() {
        for (d, detector) in spec.detectors.iter().enumerate() {
            for (v, value) in spec.values.iter().enumerate() {
                let (x_name, _) = sweep_point(p, spec.kind, *gate, *value);
                let base = (g * spec.values.len() + v) * spec.repeats;
                let rlcs: Vec<f64> = (0..spec.repeats).map(|r| results[base + r][d]).collect();
                for (r, rlc) in rlcs.iter().enumerate() {
                    rows.push(RunRow {
                        gate: *gate,
                        detector: *detector,
                        scenario,
                        x_name,
                        x_value: *value,
                        run_index: r,
                        rlc: *rlc,
                    });
                }
                let (rlc_mean, rlc_std) = mean_std(&rlcs);
                points.push(PointSummary {
                    gate: *gate,
                    detector: *detector,
                    scenario,
                    x_name,
                    x_value: *value,
                    rlc_mean,
                    rlc_std,
                });
            }
        }
    }
    Ok(RunReport { spec: spec.clone(), params: p.clone(), rows, points })
}

pub fn sweep_delay(p: &SimParams, spec: &SweepSpec) -> Result<RunReport> {
    sweep(p, &SweepSpec { kind: SweepKind::Delay, ..spec.clone() })
}

pub fn sweep_concentration(p: &SimParams, spec: &SweepSpec) -> Result<RunReport> {
    sweep(p, &SweepSpec { kind: SweepKind::Concentration, ..spec.clone() })
}

// ---------------------------------------------------------------------------
// Simulate: repeated runs at one operating point
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
pub struct SimulateSpec {
    pub gates: Vec<GateKind>,
    pub detectors: Vec<DetectorKind>,
    pub repeats: usize,
    pub production_noise: bool,
    pub production_delay: bool,
    pub pattern: PatternMode,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulateRow {
    pub gate: GateKind,
    pub detector: DetectorKind,
    pub scenario: &'static str,
    pub run_index: usize,
    pub report: DetectionReport,
}

pub fn simulate(p: &SimParams, spec: &SimulateSpec) -> Result<Vec<SimulateRow>> {
    p.validate()?;
    if spec.repeats < 1 {
        return Err(Error::InvalidArgument("repeats must be at least 1".into()));
    }
    let patterns = spec.pattern.patterns(p.seed, p.n_pulses);
    let scenario = scenario_label(spec.production_noise, spec.production_delay);
    let tasks: Vec<(GateKind, DetectorKind, usize)> = spec
        .gates
        .iter()
        .flat_map(|g| spec.detectors.iter().flat_map(move |d| (0..spec.repeats).map(move |r| (*g, *d, r))))
        .collect();
    tasks
        .par_iter()
        .map(|&(gate, detector, r)| {
            let flags = ScenarioFlags::new(gate, detector)
                .with_noise(spec.production_noise)
                .with_delay(spec.production_delay);
            let report = run_scenario(p, flags, &patterns, r as u64)?;
            Ok(SimulateRow { gate, detector, scenario, run_index: r, report })
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Saturation
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SaturationSpec {
    pub gate: GateKind,
    pub readings: usize,
    pub base_ph: f64,
}

impl Default for SaturationSpec {
    fn default() -> Self {
        Self { gate: GateKind::And, readings: 25, base_ph: 9.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SaturationRow {
    pub detector: DetectorKind,
    /// 1-based.
    pub reading: usize,
    pub ph: f64,
}

/// pH after each reading when every reading adds the detector's threshold
/// concentration. One reading per pulse; every pulse carries a 1 and runs
/// are noise-free.
pub fn run_saturation(p: &SimParams, spec: &SaturationSpec) -> Result<Vec<SaturationRow>> {
    if spec.readings < 1 {
        return Err(Error::InvalidArgument("at least one reading required".into()));
    }
    let q = p.with_pulses(spec.readings);
    q.validate()?;
    let patterns = PatternMode::AllOnes.patterns(q.seed, q.n_pulses);
    let flags = ScenarioFlags::new(spec.gate, DetectorKind::Standard);
    let trace = simulate_trace(&q, flags, &patterns, &mut run_rng(q.seed, 0))?;

    let mut rows = Vec::new();
    for detector in DetectorKind::ALL {
        let report = detect(&trace, detector, &q, &flags, None)?;
        let additions = &report.thresholds[..spec.readings];
        if additions.iter().any(|a| !a.is_finite()) {
            return Err(Error::NonFinite("saturation threshold"));
        }
        let series = electrochem::saturation_series(additions, spec.base_ph)?;
        rows.extend(series.into_iter().enumerate().map(|(k, ph)| SaturationRow { detector, reading: k + 1, ph }));
    }
    Ok(rows)
}

// ---------------------------------------------------------------------------
// CSV and manifest
// ---------------------------------------------------------------------------

pub fn runs_csv(report: &RunReport) -> String {
    let mut out = String::from("gate,detector,scenario,x_name,x_value,run_index,rlc\n");
    for r in &report.rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.gate, r.detector, r.scenario, r.x_name, r.x_value, r.run_index, r.rlc
        );
    }
    out
}

pub fn summary_csv(report: &RunReport) -> String {
    let mut out = String::from("gate,detector,scenario,x_name,x_value,rlc_mean,rlc_std\n");
    for s in &report.points {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            s.gate, s.detector, s.scenario, s.x_name, s.x_value, s.rlc_mean, s.rlc_std
        );
    }
    out
}

pub fn simulate_csv(rows: &[SimulateRow]) -> String {
    let mut out = String::from("gate,detector,scenario,run_index,first_threshold,tp,tn,fp,fn,rlc\n");
    for r in rows {
        let c = r.report.counts;
        let _ = writeln!(
            out,
            "{},{},{},{},{:.6e},{},{},{},{},{}",
            r.gate,
            r.detector,
            r.scenario,
            r.run_index,
            r.report.thresholds.first().copied().unwrap_or(f64::NAN),
            c.tp,
            c.tn,
            c.fp,
            c.fn_,
            r.report.rlc
        );
    }
    out
}

/// Aggregate of simulate rows per gate and detector.
pub fn simulate_summary_csv(rows: &[SimulateRow]) -> String {
    let mut out = String::from("gate,detector,scenario,rlc_mean,rlc_std\n");
    let mut keys: Vec<(GateKind, DetectorKind)> = rows.iter().map(|r| (r.gate, r.detector)).collect();
    keys.dedup();
    for (g, d) in keys {
        let rlcs: Vec<f64> = rows.iter().filter(|r| r.gate == g && r.detector == d).map(|r| r.report.rlc).collect();
        let scenario = rows[0].scenario;
        let (m, s) = mean_std(&rlcs);
        let _ = writeln!(out, "{g},{d},{scenario},{m},{s}");
    }
    out
}

pub fn saturation_csv(rows: &[SaturationRow]) -> String {
    let mut out = String::from("detector,reading,pH\n");
    for r in rows {
        let _ = writeln!(out, "{},{},{:.6}", r.detector, r.reading, r.ph);
    }
    out
}

/// Human-readable record of a run: the command, its settings and every
/// effective parameter in config syntax.
pub fn manifest(command: &str, settings: &[(&str, String)], p: &SimParams) -> String {
    let mut out = format!("# bmcoc {} {command}\n", env!("CARGO_PKG_VERSION"));
    for (k, v) in settings {
        let _ = writeln!(out, "# {k}: {v}");
    }
    out.push_str("\n# effective parameters\n");
    out.push_str(&p.to_config_text());
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn silent_channel_scores_perfectly() {
        let p = SimParams { m_a: 0.0, m_b: 0.0, m_c: 0.0, ..SimParams::default() };
        let pats = PatternMode::AllOnes.patterns(1, 10);
        for gate in GateKind::ALL {
            let rep = run_scenario(&p, ScenarioFlags::new(gate, DetectorKind::Standard), &pats, 0).unwrap();
            assert!(rep.expected.iter().all(|b| !b));
            assert!(rep.bits.iter().all(|b| !b), "{gate}");
            assert_eq!(rep.rlc, 100.0);
        }
    }

    #[test]
    fn blind_detector_flags_a_silent_noise_floor() {
        // a flat floor sits above its own max / L_p, so every sample reads 1
        let p = SimParams { m_a: 0.0, m_b: 0.0, m_c: 0.0, ..SimParams::default() };
        let pats = PatternMode::AllOnes.patterns(1, 10);
        let rep = run_scenario(&p, ScenarioFlags::new(GateKind::On, DetectorKind::Blind), &pats, 0).unwrap();
        assert_eq!(rep.rlc, 0.0);
        let quiet = SimParams { t_abs: 1e-300, ..p };
        let rep = run_scenario(&quiet, ScenarioFlags::new(GateKind::On, DetectorKind::Blind), &pats, 0).unwrap();
        assert!(rep.thresholds.iter().all(|r| *r < 1e-300));
    }

    #[test]
    fn run_is_deterministic() {
        let p = SimParams::default();
        let pats = PatternMode::Random.patterns(p.seed, 10);
        let flags = ScenarioFlags::new(GateKind::And, DetectorKind::Blind).with_noise(true);
        assert_eq!(run_scenario(&p, flags, &pats, 3).unwrap(), run_scenario(&p, flags, &pats, 3).unwrap());
    }

    #[test]
    fn stats() {
        assert_eq!(mean_std(&[5.0]), (5.0, 0.0));
        let (m, s) = mean_std(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m, 2.5);
        assert!((s - 1.290_994_448_735_805_6).abs() < 1e-15);
    }

    #[test]
    fn default_grids() {
        assert_eq!(default_delays(), vec![100.0, 200.0, 300.0, 400.0, 500.0, 600.0]);
        let c = default_concentrations();
        assert_eq!(c.len(), 17);
        assert_eq!(c[0], 1e-3);
        assert_eq!(c[16], 3e-3);
    }

    #[test]
    fn single_point_sweep() {
        let p = SimParams::default();
        let spec = SweepSpec { repeats: 2, ..SweepSpec::new(SweepKind::Delay, vec![300.0]) };
        let rep = sweep(&p, &spec).unwrap();
        assert_eq!(rep.points.len(), 4);
        assert_eq!(rep.rows.len(), 8);
        assert_eq!(rep.means(GateKind::And, DetectorKind::Blind).len(), 1);
    }

    #[test]
    fn noise_free_sweep_has_zero_spread() {
        let p = SimParams::default();
        let spec = SweepSpec {
            repeats: 3,
            production_noise: false,
            ..SweepSpec::new(SweepKind::Concentration, vec![1.5e-3, 2.5e-3])
        };
        let rep = sweep(&p, &spec).unwrap();
        assert!(rep.points.iter().all(|s| s.rlc_std == 0.0));
    }

    #[test]
    fn invalid_sweeps() {
        let p = SimParams::default();
        assert!(sweep(&p, &SweepSpec::new(SweepKind::Delay, vec![])).is_err());
        assert!(sweep(&p, &SweepSpec::new(SweepKind::Delay, vec![-5.0])).is_err());
        let spec = SweepSpec { repeats: 0, ..SweepSpec::new(SweepKind::Delay, vec![100.0]) };
        assert!(sweep(&p, &spec).is_err());
    }

    #[test]
    fn saturation_rows() {
        let rows = run_saturation(&SimParams::default(), &SaturationSpec::default()).unwrap();
        assert_eq!(rows.len(), 50);
        for det in DetectorKind::ALL {
            let s: Vec<f64> = rows.iter().filter(|r| r.detector == det).map(|r| r.ph).collect();
            assert!(s.windows(2).all(|w| w[1] < w[0]), "{det}");
        }
        assert!(saturation_csv(&rows).starts_with("detector,reading,pH\nstandard,1,"));
    }

    #[test]
    fn csv_headers() {
        let p = SimParams::default();
        let spec = SweepSpec { repeats: 1, ..SweepSpec::new(SweepKind::Delay, vec![100.0]) };
        let rep = sweep(&p, &spec).unwrap();
        assert!(runs_csv(&rep).starts_with("gate,detector,scenario,x_name,x_value,run_index,rlc\nAND,standard,YPN+NPD,tau_g,100,0,"));
        assert!(summary_csv(&rep).lines().next().unwrap().ends_with("rlc_mean,rlc_std"));
        let m = manifest("simulate", &[("seed", "1".into())], &p);
        assert!(m.contains("# seed: 1") && m.contains("tau_g = 100"));
    }
}
