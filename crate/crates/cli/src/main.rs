use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use bmcoc_core::harness::{
    self, default_concentrations, default_delays, PatternMode, SaturationSpec, SimulateSpec, SweepKind, SweepSpec,
};
use bmcoc_core::units::{convert_concentration, ConcentrationUnit};
use bmcoc_core::{load_params, DetectorKind, Error, GateKind, SimParams};

/// Batch simulator for bacterial molecular computing on a chip.
#[derive(Debug, Parser)]
#[command(name = "bmcoc", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Repeated runs at one operating point.
    Simulate(Common),
    /// RLC versus the sensor-side propagation delay tau_g.
    SweepDelay {
        #[command(flatten)]
        common: Common,
        /// tau_g values in seconds, comma separated [default: 100,200,...,600]
        #[arg(long, value_delimiter = ',')]
        values: Vec<f64>,
    },
    /// RLC versus the m_B (AND) / m_C (ON) input amplitude.
    SweepConc {
        #[command(flatten)]
        common: Common,
        /// Amplitudes in mmol/L, comma separated [default: 1.0 to 3.0 in 0.125 steps]
        #[arg(long, value_delimiter = ',')]
        values: Vec<f64>,
    },
    /// pH after repeated readings for both detector thresholds.
    Saturation {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 25)]
        readings: usize,
        #[arg(long, default_value_t = 9.0)]
        base_ph: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GateArg {
    And,
    On,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DetectorArg {
    Standard,
    Blind,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Switch {
    On,
    Off,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PatternArg {
    Random,
    Independent,
    Ones,
    Alternating,
}

#[derive(Debug, Args)]
struct Common {
    /// Parameter file of `key = value` lines.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = GateArg::Both)]
    gate: GateArg,
    #[arg(long, value_enum, default_value_t = DetectorArg::Both)]
    detector: DetectorArg,
    #[arg(long, value_enum, default_value_t = Switch::On)]
    production_noise: Switch,
    #[arg(long, value_enum, default_value_t = Switch::Off)]
    production_delay: Switch,
    /// Runs per point [default: 1 for simulate, 10 for sweeps]
    #[arg(long)]
    repeats: Option<usize>,
    /// Master seed; overrides the config file.
    #[arg(long)]
    seed: Option<u64>,
    /// Input bit patterns.
    #[arg(long, value_enum, default_value_t = PatternArg::Random)]
    pattern: PatternArg,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

impl Common {
    fn params(&self) -> Result<SimParams, Error> {
        let text = match &self.config {
            Some(path) => fs::read_to_string(path)
                .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?,
            None => String::new(),
        };
        let mut p = load_params(&text)?;
        if let Some(seed) = self.seed {
            p.seed = seed;
            p.validate()?;
        }
        Ok(p)
    }

    fn gates(&self) -> Vec<GateKind> {
        match self.gate {
            GateArg::And => vec![GateKind::And],
            GateArg::On => vec![GateKind::On],
            GateArg::Both => GateKind::ALL.to_vec(),
        }
    }

    fn detectors(&self) -> Vec<DetectorKind> {
        match self.detector {
            DetectorArg::Standard => vec![DetectorKind::Standard],
            DetectorArg::Blind => vec![DetectorKind::Blind],
            DetectorArg::Both => DetectorKind::ALL.to_vec(),
        }
    }

    fn pattern(&self) -> PatternMode {
        match self.pattern {
            PatternArg::Random => PatternMode::Random,
            PatternArg::Independent => PatternMode::Independent,
            PatternArg::Ones => PatternMode::AllOnes,
            PatternArg::Alternating => PatternMode::Alternating,
        }
    }

    fn settings(&self, command: &str, repeats: usize) -> Vec<(&'static str, String)> {
        vec![
            ("command", command.to_string()),
            ("gate", format!("{:?}", self.gate).to_lowercase()),
            ("detector", format!("{:?}", self.detector).to_lowercase()),
            ("production_noise", (self.production_noise == Switch::On).to_string()),
            ("production_delay", (self.production_delay == Switch::On).to_string()),
            ("repeats", repeats.to_string()),
            ("pattern", self.pattern().as_str().to_string()),
        ]
    }
}

fn write(dir: &Path, name: &str, contents: &str) -> Result<(), Error> {
    fs::create_dir_all(dir)?;
    let path = dir.join(name);
    fs::write(&path, contents)?;
    println!("wrote {}", path.display());
    Ok(())
}

fn run_sweep(common: &Common, kind: SweepKind, values: Vec<f64>, stem: &str) -> Result<(), Error> {
    let p = common.params()?;
    let repeats = common.repeats.unwrap_or(10);
    let spec = SweepSpec {
        kind,
        gates: common.gates(),
        detectors: common.detectors(),
        values: values.clone(),
        repeats,
        production_noise: common.production_noise == Switch::On,
        production_delay: common.production_delay == Switch::On,
        pattern: common.pattern(),
    };
    let report = harness::sweep(&p, &spec)?;
    let mut settings = common.settings(stem, repeats);
    settings.push(("values", values.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")));
    write(&common.out, &format!("{stem}_runs.csv"), &harness::runs_csv(&report))?;
    write(&common.out, &format!("{stem}_summary.csv"), &harness::summary_csv(&report))?;
    write(&common.out, &format!("{stem}_manifest.txt"), &harness::manifest(stem, &settings, &p))?;
    for s in &report.points {
        println!(
            "{:>3} {:<8} {}={:<10} rlc {:6.2} ± {:.2}",
            s.gate.as_str(),
            s.detector.as_str(),
            s.x_name,
            s.x_value,
            s.rlc_mean,
            s.rlc_std
        );
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Simulate(common) => {
            let p = common.params()?;
            let repeats = common.repeats.unwrap_or(1);
            let spec = SimulateSpec {
                gates: common.gates(),
                detectors: common.detectors(),
                repeats,
                production_noise: common.production_noise == Switch::On,
                production_delay: common.production_delay == Switch::On,
                pattern: common.pattern(),
            };
            let rows = harness::simulate(&p, &spec)?;
            let summary = harness::simulate_summary_csv(&rows);
            write(&common.out, "simulate_runs.csv", &harness::simulate_csv(&rows))?;
            write(&common.out, "simulate_summary.csv", &summary)?;
            write(&common.out, "simulate_manifest.txt", &harness::manifest("simulate", &common.settings("simulate", repeats), &p))?;
            print!("{summary}");
            Ok(())
        }
        Command::SweepDelay { common, values } => {
            let values = if values.is_empty() { default_delays() } else { values };
            run_sweep(&common, SweepKind::Delay, values, "sweep_delay")
        }
        Command::SweepConc { common, values } => {
            let values = if values.is_empty() {
                default_concentrations()
            } else {
                values
                    .iter()
                    .map(|v| convert_concentration(*v, ConcentrationUnit::MmolPerL, ConcentrationUnit::MolPerL))
                    .collect()
            };
            run_sweep(&common, SweepKind::Concentration, values, "sweep_conc")
        }
        Command::Saturation { common, readings, base_ph } => {
            let p = common.params()?;
            let gate = match common.gate {
                GateArg::And | GateArg::Both => GateKind::And,
                GateArg::On => GateKind::On,
            };
            let rows = harness::run_saturation(&p, &SaturationSpec { gate, readings, base_ph })?;
            let mut settings = vec![
                ("command", "saturation".to_string()),
                ("gate", gate.as_str().to_string()),
                ("readings", readings.to_string()),
                ("base_ph", base_ph.to_string()),
            ];
            settings.push(("pattern", "ones".to_string()));
            write(&common.out, "saturation.csv", &harness::saturation_csv(&rows))?;
            write(&common.out, "saturation_manifest.txt", &harness::manifest("saturation", &settings, &p))?;
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_config() { 1 } else { 2 })
        }
    }
}
