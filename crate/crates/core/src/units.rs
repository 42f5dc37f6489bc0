//! Concentration unit conversions and chamber geometry.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConcentrationUnit {
    MolPerL,
    MmolPerL,
    UmolPerL,
    NmolPerL,
    /// mol/m³, i.e. mmol/L.
    MolPerM3,
}

impl ConcentrationUnit {
    /// Decimal exponent of one unit expressed in mol/L.
    fn exponent(self) -> i32 {
        match self {
            ConcentrationUnit::MolPerL => 0,
            ConcentrationUnit::MmolPerL | ConcentrationUnit::MolPerM3 => -3,
            ConcentrationUnit::UmolPerL => -6,
            ConcentrationUnit::NmolPerL => -9,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            ConcentrationUnit::MolPerL => "mol/L",
            ConcentrationUnit::MmolPerL => "mmol/L",
            ConcentrationUnit::UmolPerL => "umol/L",
            ConcentrationUnit::NmolPerL => "nmol/L",
            ConcentrationUnit::MolPerM3 => "mol/m3",
        }
    }
}

impl fmt::Display for ConcentrationUnit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

impl FromStr for ConcentrationUnit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "mol/L" | "M" => Ok(ConcentrationUnit::MolPerL),
            "mmol/L" | "mM" => Ok(ConcentrationUnit::MmolPerL),
            "umol/L" | "µmol/L" | "μmol/L" | "uM" | "µM" => Ok(ConcentrationUnit::UmolPerL),
            "nmol/L" | "nM" => Ok(ConcentrationUnit::NmolPerL),
            "mol/m3" | "mol/m³" => Ok(ConcentrationUnit::MolPerM3),
            other => Err(Error::UnknownUnit(other.to_string())),
        }
    }
}

/// Rescales `value` between units by a single power of ten.
pub fn convert_concentration(value: f64, from: ConcentrationUnit, to: ConcentrationUnit) -> f64 {
    let shift = from.exponent() - to.exponent();
    // one exactly-representable factor per direction keeps the round trip tight
    if shift >= 0 {
        value * 10f64.powi(shift)
    } else {
        value / 10f64.powi(-shift)
    }
}

/// String-unit convenience wrapper around [`convert_concentration`].
pub fn convert(value: f64, from: &str, to: &str) -> Result<f64> {
    Ok(convert_concentration(value, from.parse()?, to.parse()?))
}

/// Volumes of the cylindrical population chamber and the rectangular sensing
/// chamber, m³.
pub fn chamber_volumes(r_ch: f64, h_ch1: f64, d_ch2: f64, h_ch2: f64, w_ch2: f64) -> Result<(f64, f64)> {
    let dims = [("r_ch", r_ch), ("h_ch1", h_ch1), ("d_ch2", d_ch2), ("h_ch2", h_ch2), ("w_ch2", w_ch2)];
    for (name, value) in dims {
        if !(value > 0.0 && value.is_finite()) {
            return Err(Error::InvalidParam { name, value, reason: "dimension must be positive" });
        }
    }
    Ok((PI * r_ch * r_ch * h_ch1, d_ch2 * h_ch2 * w_ch2))
}
