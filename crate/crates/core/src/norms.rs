//! Sobolev and Bourgain-type norms, the I-operator, the modified energy and time windows.
//!
//! The bracket is `⟨x⟩ = 1 + |x|`. Norms use the series normalization of
//! [`crate::spectral`], so `‖e^{inx}‖_{H^s} = ⟨n⟩^s`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::dynamics::SDState;
use crate::error::{Error, Result};
use crate::spectral::{
    space_time_transform, Field, SpaceTimeField, SpaceTimeSpectrum, Spectrum, TimeLattice, C64,
};

/// Default size of the small shifts written `b = 1/2+`, `−1/2+`, `−4/3−`.
pub const DEFAULT_EPSILON: f64 = 0.01;

/// Minimum ratio between the frequency bands in [`strichartz_ratio`].
pub const BAND_SEPARATION: f64 = 8.0;

pub fn bracket(x: f64) -> f64 {
    1.0 + x.abs()
}

/// Exponent pair `(s, b)`: spatial regularity and modulation weight.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BourgainIndex {
    pub spatial: f64,
    pub temporal: f64,
}

impl BourgainIndex {
    pub fn new(spatial: f64, temporal: f64) -> Self {
        Self { spatial, temporal }
    }
}

/// Choice of modulation variable in the space-time weight.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum DispersionSymbol {
    /// `τ + ½ξ²`
    HalfLaplacian,
    /// `τ + ξ²`
    UnitLaplacian,
    /// `τ − ½ξ²`
    ConjugateHalf,
    /// `τ`, giving the mixed norm `H^b_t H^s_x`
    None,
}

impl DispersionSymbol {
    pub fn curvature(self) -> f64 {
        match self {
            Self::HalfLaplacian => 0.5,
            Self::UnitLaplacian => 1.0,
            Self::ConjugateHalf => -0.5,
            Self::None => 0.0,
        }
    }

    pub fn phase(self, xi: f64, tau: f64) -> f64 {
        tau + self.curvature() * xi * xi
    }

    /// The characteristic curve `τ(ξ)` on which the phase vanishes.
    pub fn curve(self, xi: f64) -> f64 {
        -self.curvature() * xi * xi
    }

    pub fn weight(self, xi: f64, tau: f64) -> f64 {
        bracket(self.phase(xi, tau))
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::HalfLaplacian => "half",
            Self::UnitLaplacian => "unit",
            Self::ConjugateHalf => "conjugate-half",
            Self::None => "none",
        }
    }
}

impl fmt::Display for DispersionSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DispersionSymbol {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "half" | "half_laplacian" => Ok(Self::HalfLaplacian),
            "unit" | "unit_laplacian" => Ok(Self::UnitLaplacian),
            "conjugate-half" | "conjugate_half" => Ok(Self::ConjugateHalf),
            "none" => Ok(Self::None),
            other => Err(Error::param(
                "dispersion",
                format!("unknown symbol `{other}`"),
            )),
        }
    }
}

/// Fourier multiplier `m(ξ/N)^α`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IMultiplier {
    pub cutoff: f64,
    pub power: f64,
}

impl IMultiplier {
    pub fn new(cutoff: f64, power: f64) -> Result<Self> {
        if !(cutoff.is_finite() && cutoff >= 1.0) {
            return Err(Error::param(
                "cutoff",
                format!("must be at least 1, got {cutoff}"),
            ));
        }
        if !power.is_finite() {
            return Err(Error::param("power", "must be finite"));
        }
        Ok(Self { cutoff, power })
    }

    /// The operator `I = I_N^{−s}` of the modified energy.
    pub fn for_regularity(cutoff: f64, s: f64) -> Result<Self> {
        Self::new(cutoff, -s)
    }

    /// Profile `m`: 1 on `|ξ| ≤ 1`, `|ξ|^{−1}` on `|ξ| ≥ 2`, log-linear blend between.
    pub fn profile(xi: f64) -> f64 {
        let a = xi.abs();
        if a <= 1.0 {
            1.0
        } else if a >= 2.0 {
            1.0 / a
        } else {
            let w = 0.5 - 0.5 * (PI * (a - 1.0)).cos();
            (-w * a.ln()).exp()
        }
    }

    pub fn symbol(&self, xi: f64) -> f64 {
        if self.power == 0.0 {
            return 1.0;
        }
        Self::profile(xi / self.cutoff).powf(self.power)
    }
}

fn real_symbol(f: impl Fn(f64) -> f64) -> impl Fn(f64) -> C64 {
    move |xi| C64::new(f(xi), 0.0)
}

pub fn sobolev_norm_spectrum(spec: &Spectrum, s: f64) -> f64 {
    spec.iter()
        .map(|(xi, c)| bracket(xi).powf(2.0 * s) * c.norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// `(Σ_ξ ⟨ξ⟩^{2s} |f̂(ξ)|²)^{1/2}`.
pub fn sobolev_norm(f: &Field, s: f64) -> f64 {
    sobolev_norm_spectrum(&f.forward(), s)
}

/// `(Σ ⟨ξ⟩^{2s} ⟨phase⟩^{2b} |F|²)^{1/2}` over an already transformed trajectory.
///
/// Each temporal index is read as the alias of its frequency nearest the
/// characteristic curve of `disp` at that `ξ`.
pub fn bourgain_norm_spectrum(
    st: &SpaceTimeSpectrum,
    idx: BourgainIndex,
    disp: DispersionSymbol,
) -> f64 {
    let grid = *st.grid();
    let mut total = 0.0;
    for m in 0..st.num_times() {
        for (i, c) in st.row(m).iter().enumerate() {
            let a = c.norm_sqr();
            if a == 0.0 {
                continue;
            }
            let xi = grid.wavenumber_at(i);
            let tau = st.frequency_near(m, disp.curve(xi));
            total += bracket(xi).powf(2.0 * idx.spatial)
                * disp.weight(xi, tau).powf(2.0 * idx.temporal)
                * a;
        }
    }
    total.sqrt()
}

pub fn bourgain_norm(
    traj: &SpaceTimeField,
    idx: BourgainIndex,
    disp: DispersionSymbol,
    window: &[f64],
) -> Result<f64> {
    let st = space_time_transform(traj, window)?;
    Ok(bourgain_norm_spectrum(&st, idx, disp))
}

pub fn i_apply_spectrum(spec: &Spectrum, im: &IMultiplier) -> Spectrum {
    spec.apply_multiplier(real_symbol(|xi| im.symbol(xi)))
        .expect("I-multiplier is finite")
}

pub fn i_apply(f: &Field, im: &IMultiplier) -> Field {
    i_apply_spectrum(&f.forward(), im).inverse()
}

/// `E(Iu) = ‖I_N^{−s} u‖²_{L²}`.
pub fn modified_energy(u: &Field, cutoff: f64, s: f64) -> Result<f64> {
    if s > 0.0 {
        log::warn!("modified energy requested with s = {s} > 0");
    }
    let im = IMultiplier::for_regularity(cutoff, s)?;
    Ok(i_apply_spectrum(&u.forward(), &im).energy())
}

/// `2 Im Σ_x (I(uv) − Iu·Iv) · conj(Iu) · Δx`, the time derivative of `Σ_x |Iu|² Δx`.
pub fn energy_derivative(state: &SDState, cutoff: f64, s: f64) -> Result<f64> {
    let im = IMultiplier::for_regularity(cutoff, s)?;
    let u = state.u();
    let v = state.v();
    let iu = i_apply(u, &im);
    let iv = i_apply(v, &im);
    let iuv = i_apply(&u.pointwise_mul(v)?, &im);
    let mut acc = 0.0;
    for ((a, b), c) in iuv.samples().iter().zip(iv.samples()).zip(iu.samples()) {
        acc += ((a - c * b) * c.conj()).im;
    }
    Ok(2.0 * acc * u.grid().spacing())
}

/// `ψ(t/T)`: 1 on `|t| ≤ T`, 0 on `|t| ≥ 2T`, `cos²` blend between.
pub fn window_value(t: f64, half_width: f64) -> f64 {
    let a = t.abs();
    if a <= half_width {
        1.0
    } else if a >= 2.0 * half_width {
        0.0
    } else {
        let c = (0.5 * PI * (a - half_width) / half_width).cos();
        c * c
    }
}

pub fn time_window(half_width: f64, lattice: &TimeLattice) -> Result<Vec<f64>> {
    if !(half_width.is_finite() && half_width > 0.0) {
        return Err(Error::param(
            "T",
            format!("must be positive, got {half_width}"),
        ));
    }
    let tol = 1e-12 * half_width;
    if lattice.start > tol || lattice.end() < 2.0 * half_width - tol {
        return Err(Error::WindowTooShort {
            start: lattice.start,
            end: lattice.end(),
            required: 2.0 * half_width,
        });
    }
    Ok(lattice
        .times()
        .into_iter()
        .map(|t| window_value(t, half_width))
        .collect())
}

/// `D^{1/2}`, the multiplier `|ξ|^{1/2}`.
pub fn half_derivative(f: &Field) -> Field {
    f.forward()
        .apply_multiplier(real_symbol(|xi| xi.abs().sqrt()))
        .expect("finite symbol")
        .inverse()
}

/// Space-time mean of `|h|²` over the `x` grid and the first `K` frames.
fn space_time_l2(traj: &SpaceTimeField) -> f64 {
    let k = traj.lattice().num_steps;
    let m = traj.grid().num_points();
    let total: f64 = traj
        .frames()
        .iter()
        .take(k)
        .map(|f| f.samples().iter().map(|z| z.norm_sqr()).sum::<f64>())
        .sum();
    (total / (k * m) as f64).sqrt()
}

/// `‖D^{1/2}(ψf) · ψg‖_{L²_{xt}} / (‖ψf‖_{X^{0,1/2+ε}} ‖ψg‖_{X^{0,1/2+ε}})`.
///
/// `f` must live at frequencies at least [`BAND_SEPARATION`] times those of `g`.
pub fn strichartz_ratio(
    f: &SpaceTimeField,
    g: &SpaceTimeField,
    window: &[f64],
    epsilon: f64,
) -> Result<f64> {
    if f.lattice() != g.lattice() || f.grid() != g.grid() {
        return Err(Error::GridMismatch);
    }
    let (Some((f_lo, _)), Some((_, g_hi))) = (
        f.frame(0).forward().support_bounds(1e-10),
        g.frame(0).forward().support_bounds(1e-10),
    ) else {
        return Ok(0.0);
    };
    let ratio = if g_hi == 0.0 {
        f64::INFINITY
    } else {
        f_lo / g_hi
    };
    if ratio < BAND_SEPARATION {
        return Err(Error::BandSeparation {
            ratio,
            required: BAND_SEPARATION,
        });
    }
    let weighted = |traj: &SpaceTimeField| {
        let frames = traj
            .frames()
            .iter()
            .zip(window)
            .map(|(fr, &w)| fr.scaled(C64::new(w, 0.0)))
            .collect();
        SpaceTimeField::new(*traj.lattice(), frames)
    };
    if window.len() != f.frames().len() {
        return Err(Error::LengthMismatch {
            expected: f.frames().len(),
            actual: window.len(),
        });
    }
    let wf = weighted(f)?;
    let wg = weighted(g)?;
    let product = wf.zip_map(&wg, |a, b| half_derivative(a).pointwise_mul(b))?;
    let lhs = space_time_l2(&product);
    let idx = BourgainIndex::new(0.0, 0.5 + epsilon);
    let nf = bourgain_norm(f, idx, DispersionSymbol::HalfLaplacian, window)?;
    let ng = bourgain_norm(g, idx, DispersionSymbol::HalfLaplacian, window)?;
    if nf == 0.0 || ng == 0.0 {
        return Err(Error::ZeroRhs);
    }
    Ok(lhs / (nf * ng))
}
