//! The nine explicit indicator-support families and their norm parameters.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::norms::DispersionSymbol;
use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Family {
    #[serde(rename = "C-uv-1")]
    CUv1,
    #[serde(rename = "C-uv-2")]
    CUv2,
    #[serde(rename = "C-u2-1")]
    CU21,
    #[serde(rename = "C-u2-2")]
    CU22,
    #[serde(rename = "C-u2-3")]
    CU23,
    #[serde(rename = "P-uv-1")]
    PUv1,
    #[serde(rename = "P-uv-2")]
    PUv2,
    #[serde(rename = "P-u2-1")]
    PU21,
    #[serde(rename = "P-u2-2")]
    PU22,
}

/// How the two factors are combined on the left-hand side.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProductKind {
    /// `f · g`
    Plain,
    /// `f · ḡ`
    Conjugate,
}

impl Family {
    pub const ALL: [Family; 9] = [
        Family::CUv1,
        Family::CUv2,
        Family::CU21,
        Family::CU22,
        Family::CU23,
        Family::PUv1,
        Family::PUv2,
        Family::PU21,
        Family::PU22,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Family::CUv1 => "C-uv-1",
            Family::CUv2 => "C-uv-2",
            Family::CU21 => "C-u2-1",
            Family::CU22 => "C-u2-2",
            Family::CU23 => "C-u2-3",
            Family::PUv1 => "P-uv-1",
            Family::PUv2 => "P-uv-2",
            Family::PU21 => "P-u2-1",
            Family::PU22 => "P-u2-2",
        }
    }

    pub fn is_periodic(self) -> bool {
        matches!(
            self,
            Family::PUv1 | Family::PUv2 | Family::PU21 | Family::PU22
        )
    }

    pub fn product_kind(self) -> ProductKind {
        match self {
            Family::CUv1 | Family::CUv2 | Family::PUv1 | Family::PUv2 => ProductKind::Plain,
            _ => ProductKind::Conjugate,
        }
    }

    /// Index condition whose necessity the family tests.
    pub fn condition_holds(self, k: Rational, s: Rational) -> bool {
        let half = Rational::new(1, 2);
        let zero = Rational::from_integer(0);
        let one = Rational::from_integer(1);
        let two = Rational::from_integer(2);
        match self {
            Family::CUv1 => k <= s + half,
            Family::CUv2 => -k <= s + half,
            Family::CU21 => s <= k + half,
            Family::CU22 => s <= two * k + half,
            Family::CU23 => zero <= two * k + half,
            Family::PUv1 => s >= zero,
            Family::PUv2 => k < s + one,
            Family::PU21 => s <= two * k,
            Family::PU22 => s < k + one,
        }
    }

    pub fn condition_text(self) -> &'static str {
        match self {
            Family::CUv1 => "k <= s + 1/2",
            Family::CUv2 => "-k <= s + 1/2",
            Family::CU21 => "s <= k + 1/2",
            Family::CU22 => "s <= 2k + 1/2",
            Family::CU23 => "0 <= 2k + 1/2",
            Family::PUv1 => "s >= 0",
            Family::PUv2 => "k < s + 1",
            Family::PU21 => "s <= 2k",
            Family::PU22 => "s < k + 1",
        }
    }

    /// Norms of the product and of the two factors, with `epsilon` the `−1/2+` shift.
    pub fn norm_specs(self, k: f64, s: f64, epsilon: f64) -> [NormSpec; 3] {
        let rhs_b = 0.5;
        match self {
            Family::CUv1 | Family::CUv2 => [
                NormSpec::new(k, -0.5, DispersionSymbol::HalfLaplacian),
                NormSpec::new(k, rhs_b, DispersionSymbol::HalfLaplacian),
                NormSpec::new(s, rhs_b, DispersionSymbol::None),
            ],
            Family::CU21 | Family::CU22 | Family::CU23 => [
                NormSpec::new(s, -0.5, DispersionSymbol::None),
                NormSpec::new(k, rhs_b, DispersionSymbol::HalfLaplacian),
                NormSpec::new(k, rhs_b, DispersionSymbol::HalfLaplacian),
            ],
            Family::PUv1 | Family::PUv2 => [
                NormSpec::new(k, -0.5 + epsilon, DispersionSymbol::UnitLaplacian),
                NormSpec::new(k, rhs_b, DispersionSymbol::UnitLaplacian),
                NormSpec::new(s, rhs_b, DispersionSymbol::None),
            ],
            Family::PU21 | Family::PU22 => [
                NormSpec::new(s, -0.5 + epsilon, DispersionSymbol::None),
                NormSpec::new(k, rhs_b, DispersionSymbol::UnitLaplacian),
                NormSpec::new(k, rhs_b, DispersionSymbol::UnitLaplacian),
            ],
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.id().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::UnknownFamily(s.to_string()))
    }
}

/// Weighted norm `⟨ξ⟩^{spatial} ⟨phase⟩^{temporal}` in `L²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormSpec {
    pub spatial: f64,
    pub temporal: f64,
    pub dispersion: DispersionSymbol,
}

impl NormSpec {
    pub fn new(spatial: f64, temporal: f64, dispersion: DispersionSymbol) -> Self {
        Self {
            spatial,
            temporal,
            dispersion,
        }
    }
}

/// `{(ζ, η) : ζ₀ ≤ ζ ≤ ζ₁, |η − c ζ²| ≤ 1}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IndicatorBox {
    pub zeta0: f64,
    pub zeta1: f64,
    pub curvature: f64,
}

impl IndicatorBox {
    pub fn new(zeta0: f64, zeta1: f64, curvature: f64) -> Result<Self> {
        if zeta0.is_nan() || zeta1.is_nan() || zeta1 <= zeta0 {
            return Err(Error::param(
                "zeta_range",
                format!("[{zeta0}, {zeta1}] is empty"),
            ));
        }
        Ok(Self {
            zeta0,
            zeta1,
            curvature,
        })
    }

    pub fn eta_center(&self, zeta: f64) -> f64 {
        self.curvature * zeta * zeta
    }

    pub fn measure(&self) -> f64 {
        2.0 * (self.zeta1 - self.zeta0)
    }

    pub fn contains(&self, zeta: f64, eta: f64) -> bool {
        zeta >= self.zeta0 && zeta <= self.zeta1 && (eta - self.eta_center(zeta)).abs() <= 1.0
    }

    /// Support of the transform of the complex conjugate, `(ζ, η) ↦ (−ζ, −η)`.
    pub fn conjugate(&self) -> Self {
        Self {
            zeta0: -self.zeta1,
            zeta1: -self.zeta0,
            curvature: -self.curvature,
        }
    }
}

/// `{(n, τ) : n = mode, |τ − τ_c| ≤ 1}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModeProfile {
    pub mode: i64,
    pub tau_center: f64,
}

impl ModeProfile {
    /// Profile `χ_{[−1,1]}(τ + n²)` at mode `n`.
    pub fn on_paraboloid(mode: i64) -> Self {
        Self {
            mode,
            tau_center: -((mode * mode) as f64),
        }
    }

    /// Profile `χ_{[−1,1]}(τ)` at mode `n`.
    pub fn flat(mode: i64) -> Self {
        Self {
            mode,
            tau_center: 0.0,
        }
    }

    pub fn conjugate(&self) -> Self {
        Self {
            mode: -self.mode,
            tau_center: -self.tau_center,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Profile {
    Box(IndicatorBox),
    Mode(ModeProfile),
}

/// The pair of factors of a family at a given `N`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Counterexample {
    pub family: Family,
    pub n: u32,
    pub first: Profile,
    pub second: Profile,
}

pub fn build_counterexample(family: Family, n: u32) -> Result<Counterexample> {
    if n < 4 {
        return Err(Error::param("N", format!("must be at least 4, got {n}")));
    }
    let nf = f64::from(n);
    let ni = i64::from(n);
    let thin = 1.0 / nf;
    let curved = -0.5;
    let boxed = |z0: f64, c: f64| IndicatorBox::new(z0, z0 + thin, c).map(Profile::Box);
    let (first, second) = match family {
        Family::CUv1 => (boxed(0.0, curved)?, boxed(nf, 0.0)?),
        Family::CUv2 => (boxed(nf, curved)?, boxed(-nf, 0.0)?),
        Family::CU21 => (boxed(0.0, curved)?, boxed(nf, curved)?),
        Family::CU22 => (boxed(nf, curved)?, boxed(-nf, curved)?),
        Family::CU23 => (boxed(nf, curved)?, boxed(nf, curved)?),
        Family::PUv1 => (
            Profile::Mode(ModeProfile::on_paraboloid(ni)),
            Profile::Mode(ModeProfile::flat(-2 * ni)),
        ),
        Family::PUv2 => (
            Profile::Mode(ModeProfile::flat(0)),
            Profile::Mode(ModeProfile::flat(ni)),
        ),
        Family::PU21 => (
            Profile::Mode(ModeProfile::on_paraboloid(ni)),
            Profile::Mode(ModeProfile::on_paraboloid(-ni - 1)),
        ),
        Family::PU22 => (
            Profile::Mode(ModeProfile::on_paraboloid(0)),
            Profile::Mode(ModeProfile::on_paraboloid(ni)),
        ),
    };
    Ok(Counterexample {
        family,
        n,
        first,
        second,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn c_uv_1_boxes() {
        let ce = build_counterexample(Family::CUv1, 8).unwrap();
        let Profile::Box(a) = ce.first else { panic!() };
        let Profile::Box(b) = ce.second else { panic!() };
        assert_eq!((a.zeta0, a.zeta1, a.curvature), (0.0, 0.125, -0.5));
        assert_eq!((b.zeta0, b.zeta1, b.curvature), (8.0, 8.125, 0.0));
        assert!(a.contains(0.1, -0.005 + 0.99));
        assert!(!a.contains(0.1, 1.0));
    }

    #[test]
    fn p_uv_1_modes() {
        let ce = build_counterexample(Family::PUv1, 16).unwrap();
        assert_eq!(
            ce.first,
            Profile::Mode(ModeProfile {
                mode: 16,
                tau_center: -256.0
            })
        );
        assert_eq!(
            ce.second,
            Profile::Mode(ModeProfile {
                mode: -32,
                tau_center: 0.0
            })
        );
    }

    #[test]
    fn p_u2_1_modes() {
        let ce = build_counterexample(Family::PU21, 16).unwrap();
        let (Profile::Mode(f), Profile::Mode(g)) = (ce.first, ce.second) else {
            panic!()
        };
        assert_eq!((f.mode, g.mode), (16, -17));
    }

    #[test]
    fn c_u2_3_repeats_b1() {
        let a = build_counterexample(Family::CU21, 32).unwrap();
        let b = build_counterexample(Family::CU23, 32).unwrap();
        assert_eq!(a.second, b.second);
    }

    #[test]
    fn ids_round_trip() {
        for f in Family::ALL {
            assert_eq!(f.id().parse::<Family>().unwrap(), f);
        }
        assert!(matches!(
            "C-uv-9".parse::<Family>(),
            Err(Error::UnknownFamily(_))
        ));
        assert!(build_counterexample(Family::CUv1, 3).is_err());
    }

    #[test]
    fn conjugate_reflects() {
        let b = IndicatorBox::new(2.0, 2.5, -0.5).unwrap();
        let c = b.conjugate();
        assert_eq!((c.zeta0, c.zeta1, c.curvature), (-2.5, -2.0, 0.5));
        assert!(b.contains(2.2, -2.42) && c.contains(-2.2, 2.42));
    }

    #[test]
    fn conditions_at_reference_points() {
        let r = |a, b| Rational::new(a, b);
        assert!(!Family::CUv1.condition_holds(r(1, 1), r(0, 1)));
        assert!(!Family::CUv2.condition_holds(r(-1, 1), r(0, 1)));
        assert!(!Family::CU22.condition_holds(r(0, 1), r(1, 1)));
        assert!(!Family::PU21.condition_holds(r(0, 1), r(1, 2)));
        for f in Family::ALL {
            assert!(f.condition_holds(r(0, 1), r(0, 1)), "{f}");
        }
    }
}
