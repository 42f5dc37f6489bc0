//! Logical bit patterns and the molecular pulse trains they produce at the
//! gate population.

use rand::Rng;

use crate::channel::green_unchecked;
use crate::config::SimParams;
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Line {
    A,
    B,
    C,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PatternSpec {
    AllOnes,
    /// 1010…
    Alternating,
    SeededRandom(u64),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitPattern {
    pub line: Line,
    pub bits: Vec<bool>,
}

impl BitPattern {
    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn to_string_bits(&self) -> String {
        self.bits.iter().map(|b| if *b { '1' } else { '0' }).collect()
    }
}

pub fn make_bit_pattern(spec: PatternSpec, line: Line, n_pulses: usize) -> BitPattern {
    let bits = match spec {
        PatternSpec::AllOnes => vec![true; n_pulses],
        PatternSpec::Alternating => (0..n_pulses).map(|k| k % 2 == 0).collect(),
        PatternSpec::SeededRandom(seed) => {
            let mut rng = rng::pattern_rng(seed);
            (0..n_pulses).map(|_| rng.random_bool(0.5)).collect()
        }
    };
    BitPattern { line, bits }
}

/// Bit patterns for the three input lines.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinePatterns {
    pub a: BitPattern,
    pub b: BitPattern,
    pub c: BitPattern,
}

impl LinePatterns {
    /// One pattern drawn once and applied to every line.
    pub fn shared(spec: PatternSpec, n_pulses: usize) -> Self {
        let a = make_bit_pattern(spec, Line::A, n_pulses);
        let b = BitPattern { line: Line::B, bits: a.bits.clone() };
        let c = BitPattern { line: Line::C, bits: a.bits.clone() };
        Self { a, b, c }
    }

    /// Independent random patterns per line, derived from one seed.
    pub fn independent(seed: u64, n_pulses: usize) -> Self {
        let draw = |offset: u64, line| make_bit_pattern(PatternSpec::SeededRandom(seed.wrapping_add(offset)), line, n_pulses);
        Self { a: draw(0, Line::A), b: draw(0x9e37_79b9, Line::B), c: draw(0x7f4a_7c15, Line::C) }
    }

    pub fn get(&self, line: Line) -> &BitPattern {
        match line {
            Line::A => &self.a,
            Line::B => &self.b,
            Line::C => &self.c,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InputSignal {
    pub line: Line,
    /// mol/L on the simulation grid.
    pub samples: Vec<f64>,
    pub dt: f64,
    pub bits: BitPattern,
}

pub fn amplitude(line: Line, p: &SimParams) -> f64 {
    match line {
        Line::A => p.m_a,
        Line::B => p.m_b,
        Line::C => p.m_c,
    }
}

/// Pulse train arriving at the population.
///
/// The train starts `tau_in` after t = 0. Each bit-1 pulse restarts the
/// diffusion clock at its own boundary; bit-0 pulses are exactly zero.
pub fn input_concentration(bits: &BitPattern, p: &SimParams) -> InputSignal {
    let dt = p.dt();
    let m = amplitude(bits.line, p);
    let samples = (0..p.j_tot)
        .map(|j| {
            let since_start = j as f64 * dt - p.tau_in;
            if since_start < 0.0 {
                return 0.0;
            }
            let k = (since_start / p.t_p).floor() as usize;
            if k >= bits.len() || !bits.bits[k] {
                return 0.0;
            }
            let elapsed = since_start - k as f64 * p.t_p;
            m * green_unchecked(p.z1, elapsed + p.tau_in, p.d)
        })
        .collect();
    InputSignal { line: bits.line, samples, dt, bits: bits.clone() }
}
