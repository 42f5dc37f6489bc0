//! pH arithmetic, linear sensor calibrations and sensor saturation.

use crate::config::SimParams;
use crate::error::{Error, Result};

/// Calibrated range of the dissolved-oxygen fit, ppm.
pub const O2_RANGE_PPM: (f64, f64) = (0.5, 8.8);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitKind {
    PhCurrent,
    O2Current,
}

impl FitKind {
    fn name(self) -> &'static str {
        match self {
            FitKind::PhCurrent => "pH-current",
            FitKind::O2Current => "O2-current",
        }
    }
}

/// Straight-line calibration `current = slope·x + intercept`, current in nA.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CalibrationFit {
    pub slope: f64,
    pub intercept: f64,
    pub kind: FitKind,
}

impl CalibrationFit {
    pub fn ph_default() -> Self {
        Self { slope: -0.3219, intercept: 3.1867, kind: FitKind::PhCurrent }
    }

    pub fn ph_from(p: &SimParams) -> Self {
        Self { slope: p.ph_fit_slope, intercept: p.ph_fit_intercept, kind: FitKind::PhCurrent }
    }

    pub fn o2_from(p: &SimParams) -> Self {
        Self { slope: p.o2_fit_slope, intercept: p.o2_fit_intercept, kind: FitKind::O2Current }
    }

    /// Line through two measured `(x, current)` points.
    pub fn through_points(kind: FitKind, (x0, i0): (f64, f64), (x1, i1): (f64, f64)) -> Result<Self> {
        if x0 == x1 || !(x0.is_finite() && x1.is_finite() && i0.is_finite() && i1.is_finite()) {
            return Err(Error::InvalidArgument("two distinct finite calibration points required".into()));
        }
        let slope = (i1 - i0) / (x1 - x0);
        Ok(Self { slope, intercept: i0 - slope * x0, kind })
    }

    /// Ordinary least-squares line through `(x, current)` points.
    pub fn least_squares(kind: FitKind, points: &[(f64, f64)]) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::InvalidArgument("at least two calibration points required".into()));
        }
        let n = points.len() as f64;
        let mean_x = points.iter().map(|p| p.0).sum::<f64>() / n;
        let mean_y = points.iter().map(|p| p.1).sum::<f64>() / n;
        let sxx: f64 = points.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
        let sxy: f64 = points.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
        if sxx.is_nan() || sxx <= 0.0 {
            return Err(Error::InvalidArgument("calibration points need distinct x values".into()));
        }
        let slope = sxy / sxx;
        Ok(Self { slope, intercept: mean_y - slope * mean_x, kind })
    }

    fn expect(&self, kind: FitKind) -> Result<()> {
        if self.kind != kind {
            return Err(Error::WrongFitKind { expected: kind.name(), found: self.kind.name() });
        }
        Ok(())
    }
}

/// pH after adding `added` mol/L of protons to an unbuffered fluid.
pub fn ph_after_addition(base_ph: f64, added: f64) -> Result<f64> {
    if !(base_ph > 0.0 && base_ph < 14.0) {
        return Err(Error::InvalidArgument(format!("base pH must lie in (0, 14), got {base_ph}")));
    }
    if !added.is_finite() || added < 0.0 {
        return Err(Error::InvalidArgument(format!("added concentration must be non-negative, got {added}")));
    }
    Ok(-(10f64.powf(-base_ph) + added).log10())
}

pub fn current_from_ph(ph: f64, fit: &CalibrationFit) -> Result<f64> {
    fit.expect(FitKind::PhCurrent)?;
    Ok(fit.slope * ph + fit.intercept)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct O2Reading {
    /// nA.
    pub current: f64,
    /// Concentration lies outside the calibrated range.
    pub extrapolated: bool,
}

pub fn o2_current(ppm: f64, fit: &CalibrationFit) -> Result<O2Reading> {
    fit.expect(FitKind::O2Current)?;
    let (lo, hi) = O2_RANGE_PPM;
    Ok(O2Reading { current: fit.slope * ppm + fit.intercept, extrapolated: !(lo..=hi).contains(&ppm) })
}

/// pH after each of a sequence of readings, each adding `additions[k]`
/// mol/L to what the previous readings left behind.
pub fn saturation_series(additions: &[f64], base_ph: f64) -> Result<Vec<f64>> {
    let mut ph = base_ph;
    additions
        .iter()
        .map(|a| {
            ph = ph_after_addition(ph, *a)?;
            Ok(ph)
        })
        .collect()
}

/// Saturation curve for a constant per-reading addition.
pub fn saturation_curve(per_reading_addition: f64, n_readings: usize, base_ph: f64) -> Result<Vec<f64>> {
    if n_readings < 1 {
        return Err(Error::InvalidArgument("at least one reading required".into()));
    }
    saturation_series(&vec![per_reading_addition; n_readings], base_ph)
}
