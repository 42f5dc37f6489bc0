//! Hill-kinetics AND gate and ON-OFF switch.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::config::{GateKind, ScenarioFlags, SimParams};
use crate::error::{Error, Result};
use crate::transmitter::{InputSignal, Line};

pub fn hill(x: f64, k: f64, n: f64) -> Result<f64> {
    if x < 0.0 || x.is_nan() {
        return Err(Error::InvalidArgument(format!("Hill input must be non-negative, got {x}")));
    }
    Ok(hill_unchecked(x, k, n))
}

fn hill_unchecked(x: f64, k: f64, n: f64) -> f64 {
    let xn = x.powf(n);
    if xn.is_infinite() {
        return 1.0;
    }
    xn / (k.powf(n) + xn)
}

/// Drive term of the AND gate.
pub fn and_activation(a: f64, b: f64, p: &SimParams) -> f64 {
    hill_unchecked(a, p.k_a, p.n) * hill_unchecked(b, p.k_b, p.n)
}

/// Drive term of the ON-OFF switch, written as the expanded square.
pub fn on_activation(c: f64, p: &SimParams) -> f64 {
    let cn = c.powf(p.n);
    if cn.is_infinite() {
        return 1.0;
    }
    let kn = p.k_c.powf(p.n);
    cn * cn / (kn * kn + 2.0 * kn * cn + cn * cn)
}

pub fn and_rate(a: f64, b: f64, state: f64, p: &SimParams) -> f64 {
    debug_assert!(a >= 0.0 && b >= 0.0);
    and_activation(a, b, p) - p.gamma * state
}

pub fn on_rate(c: f64, state: f64, p: &SimParams) -> f64 {
    debug_assert!(c >= 0.0);
    on_activation(c, p) - p.gamma * state
}

/// One classical RK4 step of `ds/dt = f(s)`.
pub fn rk4_step(s: f64, h: f64, f: impl Fn(f64) -> f64) -> f64 {
    let k1 = f(s);
    let k2 = f(s + 0.5 * h * k1);
    let k3 = f(s + 0.5 * h * k2);
    let k4 = f(s + h * k3);
    s + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
}

#[derive(Debug, Clone, PartialEq)]
pub struct GateResponse {
    pub gate: GateKind,
    /// Gate output on the simulation grid.
    pub samples: Vec<f64>,
    pub dt: f64,
    pub flags: ScenarioFlags,
}

fn find(inputs: &[InputSignal], line: Line) -> Result<&InputSignal> {
    inputs.iter().find(|s| s.line == line).ok_or(Error::MissingLine(line))
}

/// Integrates the gate selected by `flags.gate` over the input signals.
///
/// Inputs are held constant across each sample interval, which is split into
/// `rk4_substeps` RK4 steps. Production noise, when enabled, is a Gaussian
/// increment of std `sigma·√dt` per sample; states are clamped at zero after
/// every sample. The production delay shifts the whole output right by `t_c`.
pub fn integrate_gate<R: Rng + ?Sized>(
    inputs: &[InputSignal],
    flags: ScenarioFlags,
    p: &SimParams,
    rng: &mut R,
) -> Result<GateResponse> {
    let (first, second, sigma) = match flags.gate {
        GateKind::And => (find(inputs, Line::A)?, Some(find(inputs, Line::B)?), p.sigma_and),
        GateKind::On => (find(inputs, Line::C)?, None, p.sigma_on),
    };
    let len = first.samples.len();
    if let Some(other) = second {
        if other.samples.len() != len {
            return Err(Error::LengthMismatch { expected: len, found: other.samples.len() });
        }
        if other.dt != first.dt {
            return Err(Error::InvalidArgument(format!("input grids differ: dt {} vs {}", first.dt, other.dt)));
        }
    }

    let dt = first.dt;
    let h = dt / p.rk4_substeps as f64;
    let noise_scale = sigma * dt.sqrt();
    let mut samples = vec![0.0; len];
    let mut state = 0.0;
    for (j, out) in samples.iter_mut().enumerate().skip(1) {
        let x = p.hill_scale * first.samples[j - 1];
        let drive = match second {
            Some(b) => and_activation(x, p.hill_scale * b.samples[j - 1], p),
            None => on_activation(x, p),
        };
        for _ in 0..p.rk4_substeps {
            state = rk4_step(state, h, |s| drive - p.gamma * s);
        }
        if flags.production_noise && noise_scale > 0.0 {
            let z: f64 = rng.sample(StandardNormal);
            state += noise_scale * z;
        }
        state = state.max(0.0);
        if !state.is_finite() {
            return Err(Error::NonFinite("gate state"));
        }
        *out = state;
    }

    if flags.production_delay {
        samples = crate::channel::delay(&samples, p.samples_for(p.t_c));
    }
    Ok(GateResponse { gate: flags.gate, samples, dt, flags })
}
