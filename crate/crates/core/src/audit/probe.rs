//! Empirical left/right ratios for the positive direction of the bilinear estimates.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::norms::{bourgain_norm, BourgainIndex, DispersionSymbol};
use crate::spectral::SpaceTimeField;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Estimate {
    /// `‖uv‖_{X^{k,−a}} ≲ ‖u‖_{X^{k,b}} ‖v‖_{H^b_t H^s_x}` on the line.
    #[serde(rename = "uv-line")]
    UvLine,
    /// `‖u w̄‖_{H^{−a}_t H^s_x} ≲ ‖u‖_{X^{k,b}} ‖w‖_{X^{k,b}}` on the line.
    #[serde(rename = "u2-line")]
    ModulusLine,
    /// Periodic `uv` estimate, modulation `τ + n²`.
    #[serde(rename = "uv-torus")]
    UvTorus,
    /// Periodic `u w̄` estimate, modulation `τ + n²`.
    #[serde(rename = "u2-torus")]
    ModulusTorus,
}

impl Estimate {
    pub const ALL: [Estimate; 4] = [
        Estimate::UvLine,
        Estimate::ModulusLine,
        Estimate::UvTorus,
        Estimate::ModulusTorus,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Estimate::UvLine => "uv-line",
            Estimate::ModulusLine => "u2-line",
            Estimate::UvTorus => "uv-torus",
            Estimate::ModulusTorus => "u2-torus",
        }
    }

    fn dispersion(self) -> DispersionSymbol {
        match self {
            Estimate::UvLine | Estimate::ModulusLine => DispersionSymbol::HalfLaplacian,
            Estimate::UvTorus | Estimate::ModulusTorus => DispersionSymbol::UnitLaplacian,
        }
    }

    fn conjugates(self) -> bool {
        matches!(self, Estimate::ModulusLine | Estimate::ModulusTorus)
    }
}

impl fmt::Display for Estimate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Estimate {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Estimate::ALL
            .into_iter()
            .find(|e| e.id() == s.trim())
            .ok_or_else(|| Error::UnknownEstimate(s.to_string()))
    }
}

/// Indices `(k, s)` with left modulation exponent `−a` and right exponent `b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProbeIndex {
    pub k: f64,
    pub s: f64,
    pub a: f64,
    pub b: f64,
}

/// Left side over the product of right-side norms, all over the window `ψ`.
pub fn inequality_ratio_probe(
    estimate: Estimate,
    idx: ProbeIndex,
    first: &SpaceTimeField,
    second: &SpaceTimeField,
    window: &[f64],
) -> Result<f64> {
    let disp = estimate.dispersion();
    let conj = estimate.conjugates();
    let product = first.zip_map(second, |a, b| {
        if conj {
            a.pointwise_mul(&b.conj())
        } else {
            a.pointwise_mul(b)
        }
    })?;
    // (ψu)(ψv) = ψ² uv
    let squared: Vec<f64> = window.iter().map(|w| w * w).collect();
    let (lhs, rhs1, rhs2) = if conj {
        (
            bourgain_norm(
                &product,
                BourgainIndex::new(idx.s, -idx.a),
                DispersionSymbol::None,
                &squared,
            )?,
            bourgain_norm(first, BourgainIndex::new(idx.k, idx.b), disp, window)?,
            bourgain_norm(second, BourgainIndex::new(idx.k, idx.b), disp, window)?,
        )
    } else {
        (
            bourgain_norm(&product, BourgainIndex::new(idx.k, -idx.a), disp, &squared)?,
            bourgain_norm(first, BourgainIndex::new(idx.k, idx.b), disp, window)?,
            bourgain_norm(
                second,
                BourgainIndex::new(idx.s, idx.b),
                DispersionSymbol::None,
                window,
            )?,
        )
    };
    if lhs == 0.0 {
        return Ok(0.0);
    }
    let rhs = rhs1 * rhs2;
    if rhs == 0.0 {
        return Err(Error::ZeroRhs);
    }
    Ok(lhs / rhs)
}
