//! Periodic grids, discrete Fourier transforms and space-time transforms.
//!
//! Coefficients use the Fourier-series normalization
//! `f̂(ξ_j) = (1/L) Σ_x f(x) e^{-iξ_j x} Δx`, so a pure mode `e^{iξx}` has unit
//! coefficient and `Σ_x |f|² Δx = L Σ_j |f̂_j|²`. Storage follows FFT order:
//! index `i < M/2` is mode `i`, index `i >= M/2` is mode `i - M`.

use std::cell::RefCell;
use std::f64::consts::TAU;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::Serialize;

use crate::error::{Error, Result};

pub type C64 = Complex64;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn plan(len: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        if inverse {
            p.plan_fft_inverse(len)
        } else {
            p.plan_fft_forward(len)
        }
    })
}

pub(crate) fn fft_in_place(buf: &mut [C64]) {
    plan(buf.len(), false).process(buf);
}

pub(crate) fn ifft_in_place(buf: &mut [C64]) {
    plan(buf.len(), true).process(buf);
}

/// Uniform periodic lattice on `[0, L)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Grid1D {
    num_points: usize,
    length: f64,
}

impl Grid1D {
    pub fn new(num_points: usize, length: f64) -> Result<Self> {
        if num_points < 4 || !num_points.is_multiple_of(2) {
            return Err(Error::InvalidGrid(format!(
                "num_points must be even and at least 4, got {num_points}"
            )));
        }
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "length must be positive and finite, got {length}"
            )));
        }
        Ok(Self { num_points, length })
    }

    /// Grid on the torus `[0, 2π)`, whose wavenumbers are exactly the integers.
    pub fn periodic(num_points: usize) -> Result<Self> {
        Self::new(num_points, TAU)
    }

    pub fn num_points(&self) -> usize {
        self.num_points
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn spacing(&self) -> f64 {
        self.length / self.num_points as f64
    }

    /// Spacing of the wavenumber lattice, `2π / L`.
    pub fn wavenumber_step(&self) -> f64 {
        TAU / self.length
    }

    /// Signed mode index stored at FFT position `i`.
    pub fn mode_index(&self, i: usize) -> i64 {
        let m = self.num_points;
        if i < m / 2 {
            i as i64
        } else {
            i as i64 - m as i64
        }
    }

    /// FFT position of signed mode `j`, if the mode is on the grid.
    pub fn storage_index(&self, mode: i64) -> Option<usize> {
        let half = (self.num_points / 2) as i64;
        if mode < -half || mode >= half {
            return None;
        }
        Some(if mode >= 0 {
            mode as usize
        } else {
            (mode + self.num_points as i64) as usize
        })
    }

    pub fn wavenumber_at(&self, i: usize) -> f64 {
        self.mode_index(i) as f64 * self.wavenumber_step()
    }

    /// Wavenumbers `2πj/L` for `j = -M/2, …, M/2-1`, ascending.
    pub fn wavenumbers(&self) -> Vec<f64> {
        let half = (self.num_points / 2) as i64;
        (-half..half)
            .map(|j| j as f64 * self.wavenumber_step())
            .collect()
    }

    /// Wavenumbers in storage (FFT) order.
    pub fn wavenumbers_fft_order(&self) -> Vec<f64> {
        (0..self.num_points)
            .map(|i| self.wavenumber_at(i))
            .collect()
    }

    /// Magnitude of the Nyquist wavenumber, `πM/L`.
    pub fn max_wavenumber(&self) -> f64 {
        (self.num_points / 2) as f64 * self.wavenumber_step()
    }

    pub fn nyquist_index(&self) -> usize {
        self.num_points / 2
    }

    pub fn points(&self) -> Vec<f64> {
        let h = self.spacing();
        (0..self.num_points).map(|j| j as f64 * h).collect()
    }
}

/// Physical-space samples on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    grid: Grid1D,
    samples: Vec<C64>,
}

impl Field {
    pub fn new(grid: Grid1D, samples: Vec<C64>) -> Result<Self> {
        if samples.len() != grid.num_points() {
            return Err(Error::LengthMismatch {
                expected: grid.num_points(),
                actual: samples.len(),
            });
        }
        Ok(Self { grid, samples })
    }

    pub fn zeros(grid: Grid1D) -> Self {
        Self {
            grid,
            samples: vec![C64::new(0.0, 0.0); grid.num_points()],
        }
    }

    pub fn from_fn(grid: Grid1D, f: impl Fn(f64) -> C64) -> Self {
        let samples = grid.points().into_iter().map(f).collect();
        Self { grid, samples }
    }

    pub fn from_real(grid: Grid1D, values: &[f64]) -> Result<Self> {
        Self::new(grid, values.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn samples(&self) -> &[C64] {
        &self.samples
    }

    pub fn samples_mut(&mut self) -> &mut [C64] {
        &mut self.samples
    }

    pub fn into_samples(self) -> Vec<C64> {
        self.samples
    }

    pub fn forward(&self) -> Spectrum {
        forward_transform(self)
    }

    /// Root-mean-square norm, `(Σ_j |f̂_j|²)^{1/2}`.
    pub fn l2_norm(&self) -> f64 {
        let m = self.samples.len() as f64;
        (self.samples.iter().map(|z| z.norm_sqr()).sum::<f64>() / m).sqrt()
    }

    /// Quadrature norm `(Σ_x |f|² Δx)^{1/2}`; the natural norm on a large box.
    pub fn l2_norm_dx(&self) -> f64 {
        self.l2_norm() * self.grid.length().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.samples.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Field) -> f64 {
        self.samples
            .iter()
            .zip(&other.samples)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Largest imaginary part in absolute value.
    pub fn imag_defect(&self) -> f64 {
        self.samples.iter().map(|z| z.im.abs()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.samples
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn pointwise_mul(&self, other: &Field) -> Result<Field> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        let samples = self
            .samples
            .iter()
            .zip(&other.samples)
            .map(|(a, b)| a * b)
            .collect();
        Ok(Field {
            grid: self.grid,
            samples,
        })
    }

    pub fn conj(&self) -> Field {
        Field {
            grid: self.grid,
            samples: self.samples.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn scaled(&self, factor: C64) -> Field {
        Field {
            grid: self.grid,
            samples: self.samples.iter().map(|z| z * factor).collect(),
        }
    }

    pub fn difference(&self, other: &Field) -> Result<Field> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        let samples = self
            .samples
            .iter()
            .zip(&other.samples)
            .map(|(a, b)| a - b)
            .collect();
        Ok(Field {
            grid: self.grid,
            samples,
        })
    }
}

/// Fourier coefficients of a [`Field`], stored in FFT order.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    grid: Grid1D,
    coeffs: Vec<C64>,
}

impl Spectrum {
    pub fn new(grid: Grid1D, coeffs: Vec<C64>) -> Result<Self> {
        if coeffs.len() != grid.num_points() {
            return Err(Error::LengthMismatch {
                expected: grid.num_points(),
                actual: coeffs.len(),
            });
        }
        Ok(Self { grid, coeffs })
    }

    /// Spectrum with `coefficient(mode) = f(ξ_mode)` for every grid mode.
    pub fn from_fn(grid: Grid1D, f: impl Fn(f64) -> C64) -> Self {
        let coeffs = (0..grid.num_points())
            .map(|i| f(grid.wavenumber_at(i)))
            .collect();
        Self { grid, coeffs }
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [C64] {
        &mut self.coeffs
    }

    pub fn coefficient(&self, mode: i64) -> Option<C64> {
        self.grid.storage_index(mode).map(|i| self.coeffs[i])
    }

    /// `(ξ, f̂(ξ))` pairs in storage order.
    pub fn iter(&self) -> impl Iterator<Item = (f64, C64)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .map(move |(i, &c)| (self.grid.wavenumber_at(i), c))
    }

    /// `(ξ, f̂(ξ))` pairs with ascending wavenumber.
    pub fn ordered(&self) -> Vec<(f64, C64)> {
        let half = self.grid.num_points() / 2;
        let mut out = Vec::with_capacity(self.coeffs.len());
        out.extend((half..self.coeffs.len()).map(|i| (self.grid.wavenumber_at(i), self.coeffs[i])));
        out.extend((0..half).map(|i| (self.grid.wavenumber_at(i), self.coeffs[i])));
        out
    }

    /// `Σ_j |f̂_j|²`.
    pub fn energy(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn inverse(&self) -> Field {
        inverse_transform(self)
    }

    pub fn zero_nyquist(&mut self) {
        let i = self.grid.nyquist_index();
        self.coeffs[i] = C64::new(0.0, 0.0);
    }

    /// Pointwise multiplication by `symbol(ξ)`.
    pub fn apply_multiplier(&self, symbol: impl Fn(f64) -> C64) -> Result<Spectrum> {
        apply_multiplier(self, symbol)
    }

    /// Smallest and largest `|ξ|` among coefficients above `threshold` relative to the peak.
    pub fn support_bounds(&self, threshold: f64) -> Option<(f64, f64)> {
        let peak = self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        if peak == 0.0 {
            return None;
        }
        let cut = threshold * peak;
        self.iter()
            .filter(|(_, c)| c.norm() > cut)
            .map(|(xi, _)| xi.abs())
            .fold(None, |acc, a| match acc {
                None => Some((a, a)),
                Some((lo, hi)) => Some((lo.min(a), hi.max(a))),
            })
    }
}

pub fn forward_transform(field: &Field) -> Spectrum {
    let mut buf = field.samples.clone();
    fft_in_place(&mut buf);
    let scale = 1.0 / buf.len() as f64;
    buf.iter_mut().for_each(|c| *c *= scale);
    Spectrum {
        grid: field.grid,
        coeffs: buf,
    }
}

pub fn inverse_transform(spec: &Spectrum) -> Field {
    let mut buf = spec.coeffs.clone();
    ifft_in_place(&mut buf);
    Field {
        grid: spec.grid,
        samples: buf,
    }
}

pub fn apply_multiplier(spec: &Spectrum, symbol: impl Fn(f64) -> C64) -> Result<Spectrum> {
    let mut coeffs = Vec::with_capacity(spec.coeffs.len());
    for (i, &c) in spec.coeffs.iter().enumerate() {
        let xi = spec.grid.wavenumber_at(i);
        let m = symbol(xi);
        if !(m.re.is_finite() && m.im.is_finite()) {
            return Err(Error::NonFiniteSymbol { wavenumber: xi });
        }
        coeffs.push(c * m);
    }
    Ok(Spectrum {
        grid: spec.grid,
        coeffs,
    })
}

/// Multiplier with an odd symbol (`iξ`, `sign ξ`, …): the unpaired Nyquist mode is dropped.
pub fn apply_odd_multiplier(spec: &Spectrum, symbol: impl Fn(f64) -> C64) -> Result<Spectrum> {
    let mut out = apply_multiplier(spec, symbol)?;
    out.zero_nyquist();
    Ok(out)
}

/// Convenience for real, even symbols applied in physical space.
pub fn filter_field(field: &Field, symbol: impl Fn(f64) -> f64) -> Result<Field> {
    let spec = apply_multiplier(&field.forward(), |xi| C64::new(symbol(xi), 0.0))?;
    Ok(spec.inverse())
}

/// Uniform time lattice `t_j = start + j·step`, `j = 0..=num_steps`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TimeLattice {
    pub start: f64,
    pub step: f64,
    pub num_steps: usize,
}

impl TimeLattice {
    pub fn new(start: f64, step: f64, num_steps: usize) -> Result<Self> {
        if !(step.is_finite() && step > 0.0) {
            return Err(Error::param(
                "time_step",
                format!("must be positive, got {step}"),
            ));
        }
        if num_steps == 0 {
            return Err(Error::param("num_steps", "must be at least 1"));
        }
        Ok(Self {
            start,
            step,
            num_steps,
        })
    }

    pub fn time(&self, j: usize) -> f64 {
        self.start + j as f64 * self.step
    }

    pub fn times(&self) -> Vec<f64> {
        (0..=self.num_steps).map(|j| self.time(j)).collect()
    }

    pub fn end(&self) -> f64 {
        self.time(self.num_steps)
    }

    /// Period `K·dt` of the discrete time transform.
    pub fn period(&self) -> f64 {
        self.num_steps as f64 * self.step
    }

    /// Spacing `2π/(K·dt)` of the temporal frequency lattice.
    pub fn frequency_step(&self) -> f64 {
        TAU / self.period()
    }
}

/// A trajectory sampled on a uniform time lattice.
#[derive(Debug, Clone)]
pub struct SpaceTimeField {
    grid: Grid1D,
    lattice: TimeLattice,
    frames: Vec<Field>,
}

impl SpaceTimeField {
    pub fn new(lattice: TimeLattice, frames: Vec<Field>) -> Result<Self> {
        if frames.len() != lattice.num_steps + 1 {
            return Err(Error::LengthMismatch {
                expected: lattice.num_steps + 1,
                actual: frames.len(),
            });
        }
        let grid = *frames[0].grid();
        if frames.iter().any(|f| *f.grid() != grid) {
            return Err(Error::GridMismatch);
        }
        Ok(Self {
            grid,
            lattice,
            frames,
        })
    }

    pub fn from_fn(lattice: TimeLattice, f: impl Fn(f64) -> Field) -> Result<Self> {
        let frames = lattice.times().into_iter().map(f).collect();
        Self::new(lattice, frames)
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn lattice(&self) -> &TimeLattice {
        &self.lattice
    }

    pub fn frames(&self) -> &[Field] {
        &self.frames
    }

    pub fn frame(&self, j: usize) -> &Field {
        &self.frames[j]
    }

    pub fn last(&self) -> &Field {
        self.frames
            .last()
            .expect("trajectory has at least two frames")
    }

    /// Frame-wise map preserving the lattice.
    pub fn map(&self, f: impl Fn(&Field) -> Field) -> Result<SpaceTimeField> {
        Self::new(self.lattice, self.frames.iter().map(f).collect())
    }

    /// Frame-wise combination of two trajectories on the same lattice.
    pub fn zip_map(
        &self,
        other: &SpaceTimeField,
        f: impl Fn(&Field, &Field) -> Result<Field>,
    ) -> Result<SpaceTimeField> {
        if self.lattice != other.lattice {
            return Err(Error::LengthMismatch {
                expected: self.frames.len(),
                actual: other.frames.len(),
            });
        }
        let frames = self
            .frames
            .iter()
            .zip(&other.frames)
            .map(|(a, b)| f(a, b))
            .collect::<Result<Vec<_>>>()?;
        Self::new(self.lattice, frames)
    }
}

/// Two-dimensional coefficients `F(ξ_i, τ_m)` of a windowed trajectory.
///
/// The time axis is the DFT over the first `K` frames (period `K·dt`), with
/// normalization `1/K`, so `Σ |F|²` is the mean of `|ψ f|²` over the lattice.
#[derive(Debug, Clone)]
pub struct SpaceTimeSpectrum {
    grid: Grid1D,
    lattice: TimeLattice,
    data: Vec<C64>,
}

impl SpaceTimeSpectrum {
    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn lattice(&self) -> &TimeLattice {
        &self.lattice
    }

    pub fn num_times(&self) -> usize {
        self.lattice.num_steps
    }

    /// Coefficient at temporal index `m` and spatial storage index `i`.
    pub fn get(&self, m: usize, i: usize) -> C64 {
        self.data[m * self.grid.num_points() + i]
    }

    /// Row of spatial coefficients at temporal index `m`.
    pub fn row(&self, m: usize) -> &[C64] {
        let n = self.grid.num_points();
        &self.data[m * n..(m + 1) * n]
    }

    /// Signed temporal index for storage index `m`.
    pub fn temporal_index(&self, m: usize) -> i64 {
        let k = self.num_times();
        if m < k.div_ceil(2) {
            m as i64
        } else {
            m as i64 - k as i64
        }
    }

    /// Temporal frequency `2πm/(K·dt)` with `m` in the symmetric range.
    pub fn temporal_frequency(&self, m: usize) -> f64 {
        self.temporal_index(m) as f64 * self.lattice.frequency_step()
    }

    /// The alias of temporal index `m` closest to `center`.
    ///
    /// Frequencies are only defined modulo `2π/dt`; picking the representative
    /// nearest the dispersion curve keeps modulation weights correct for
    /// near-free trajectories even when `|τ|` itself exceeds the Nyquist limit.
    pub fn frequency_near(&self, m: usize, center: f64) -> f64 {
        let k = self.num_times() as f64;
        let dtau = self.lattice.frequency_step();
        let q = center / dtau;
        let shift = ((q - m as f64) / k).round();
        (m as f64 + shift * k) * dtau
    }

    pub fn energy(&self) -> f64 {
        self.data.iter().map(|c| c.norm_sqr()).sum()
    }
}

pub fn space_time_transform(traj: &SpaceTimeField, window: &[f64]) -> Result<SpaceTimeSpectrum> {
    let k = traj.lattice.num_steps;
    if window.len() != k + 1 {
        return Err(Error::LengthMismatch {
            expected: k + 1,
            actual: window.len(),
        });
    }
    let n = traj.grid.num_points();
    let mut data = Vec::with_capacity(k * n);
    for (frame, &w) in traj.frames.iter().take(k).zip(window) {
        let spec = frame.forward();
        data.extend(spec.coeffs.iter().map(|c| c * w));
    }
    let time_fft = plan(k, false);
    let scale = 1.0 / k as f64;
    let mut column = vec![C64::new(0.0, 0.0); k];
    for i in 0..n {
        for (m, slot) in column.iter_mut().enumerate() {
            *slot = data[m * n + i];
        }
        time_fft.process(&mut column);
        for (m, c) in column.iter().enumerate() {
            data[m * n + i] = c * scale;
        }
    }
    Ok(SpaceTimeSpectrum {
        grid: traj.grid,
        lattice: traj.lattice,
        data,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn random_field(grid: Grid1D, seed: u64) -> Field {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let samples = (0..grid.num_points())
            .map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        Field::new(grid, samples).unwrap()
    }

    #[test]
    fn integer_wavenumbers_on_torus() {
        let g = Grid1D::periodic(8).unwrap();
        let w = g.wavenumbers();
        let expected = [-4.0, -3.0, -2.0, -1.0, 0.0, 1.0, 2.0, 3.0];
        for (a, b) in w.iter().zip(expected) {
            assert_relative_eq!(*a, b, epsilon = 1e-14);
        }
    }

    #[test]
    fn half_integer_wavenumbers_on_double_torus() {
        let g = Grid1D::new(8, 4.0 * PI).unwrap();
        let w = g.wavenumbers();
        let expected = [-2.0, -1.5, -1.0, -0.5, 0.0, 0.5, 1.0, 1.5];
        for (a, b) in w.iter().zip(expected) {
            assert_relative_eq!(*a, b, epsilon = 1e-14);
        }
    }

    #[test]
    fn spacing_times_points_is_length() {
        let g = Grid1D::new(1024, 100.0).unwrap();
        assert_relative_eq!(g.spacing(), 0.09765625, epsilon = 1e-15);
        assert_relative_eq!(g.spacing() * 1024.0, 100.0, epsilon = 1e-12);
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(Grid1D::new(7, 1.0).is_err());
        assert!(Grid1D::new(2, 1.0).is_err());
        assert!(Grid1D::new(8, 0.0).is_err());
        assert!(Grid1D::new(8, -1.0).is_err());
    }

    #[test]
    fn constant_is_zero_mode() {
        let g = Grid1D::periodic(16).unwrap();
        let s = Field::from_fn(g, |_| C64::new(1.0, 0.0)).forward();
        for (xi, c) in s.iter() {
            let expect = if xi == 0.0 { 1.0 } else { 0.0 };
            assert!((c - C64::new(expect, 0.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn plane_wave_is_unit_spike() {
        let g = Grid1D::periodic(16).unwrap();
        let s = Field::from_fn(g, |x| C64::from_polar(1.0, 3.0 * x)).forward();
        for j in -8..8 {
            let c = s.coefficient(j).unwrap();
            let expect = if j == 3 { 1.0 } else { 0.0 };
            assert!((c - C64::new(expect, 0.0)).norm() < 1e-14, "mode {j}: {c}");
        }
    }

    #[test]
    fn parseval_against_direct_quadrature() {
        let g = Grid1D::new(128, 7.5).unwrap();
        let f = random_field(g, 11);
        let lhs: f64 = f.samples().iter().map(|z| z.norm_sqr()).sum::<f64>() * g.spacing();
        // direct DFT sum, independent of the FFT path
        let mut rhs = 0.0;
        for xi in g.wavenumbers() {
            let mut c = C64::new(0.0, 0.0);
            for (x, z) in g.points().iter().zip(f.samples()) {
                c += z * C64::from_polar(1.0, -xi * x);
            }
            rhs += (c * g.spacing() / g.length()).norm_sqr();
        }
        assert_relative_eq!(lhs, g.length() * rhs, max_relative = 1e-10);
    }

    #[test]
    fn multiplier_examples() {
        let g = Grid1D::periodic(32).unwrap();
        let f = random_field(g, 3);
        let id = apply_multiplier(&f.forward(), |_| C64::new(1.0, 0.0)).unwrap();
        assert!(id.inverse().max_abs_diff(&f) < 1e-13);

        let t = 0.37;
        let fwd =
            apply_multiplier(&f.forward(), |xi| C64::from_polar(1.0, -xi * xi * t / 2.0)).unwrap();
        let back = apply_multiplier(&fwd, |xi| C64::from_polar(1.0, xi * xi * t / 2.0)).unwrap();
        assert!(back.inverse().max_abs_diff(&f) < 1e-12);

        let spike = Field::from_fn(g, |x| C64::from_polar(1.0, 4.0 * x)).forward();
        let d = apply_multiplier(&spike, |xi| C64::new(xi.abs().sqrt(), 0.0)).unwrap();
        assert!((d.coefficient(4).unwrap() - C64::new(2.0, 0.0)).norm() < 1e-13);
    }

    #[test]
    fn non_finite_symbol_is_rejected() {
        let g = Grid1D::periodic(8).unwrap();
        let s = Field::zeros(g).forward();
        let err = apply_multiplier(&s, |xi| C64::new(1.0 / xi, 0.0)).unwrap_err();
        assert!(matches!(err, Error::NonFiniteSymbol { .. }));
    }

    #[test]
    fn odd_multiplier_drops_nyquist() {
        let g = Grid1D::periodic(8).unwrap();
        let f = Field::from_fn(g, |x| C64::new((4.0 * x).cos(), 0.0));
        let d = apply_odd_multiplier(&f.forward(), |xi| C64::new(0.0, xi)).unwrap();
        assert_eq!(d.coefficient(-4).unwrap(), C64::new(0.0, 0.0));
    }

    #[test]
    fn constant_trajectory_concentrates_at_zero_frequency() {
        let g = Grid1D::periodic(8).unwrap();
        let lat = TimeLattice::new(0.0, 0.1, 16).unwrap();
        let f = random_field(g, 5);
        let traj = SpaceTimeField::from_fn(lat, |_| f.clone()).unwrap();
        let st = space_time_transform(&traj, &[1.0; 17]).unwrap();
        let total = st.energy();
        let at_zero: f64 = st.row(0).iter().map(|c| c.norm_sqr()).sum();
        assert_relative_eq!(at_zero, total, max_relative = 1e-12);
    }

    #[test]
    fn separable_exponential_is_single_spike() {
        let g = Grid1D::periodic(16).unwrap();
        let lat = TimeLattice::new(0.0, 0.05, 40).unwrap();
        let m0 = 3i64;
        let tau0 = m0 as f64 * lat.frequency_step();
        let traj = SpaceTimeField::from_fn(lat, |t| {
            Field::from_fn(g, |x| C64::from_polar(1.0, 2.0 * x + tau0 * t))
        })
        .unwrap();
        let st = space_time_transform(&traj, &vec![1.0; 41]).unwrap();
        let i = g.storage_index(2).unwrap();
        assert!((st.get(m0 as usize, i).norm() - 1.0).abs() < 1e-12);
        assert_relative_eq!(st.temporal_frequency(m0 as usize), tau0, epsilon = 1e-12);
        assert_relative_eq!(st.energy(), 1.0, max_relative = 1e-12);
    }

    #[test]
    fn window_length_must_match() {
        let g = Grid1D::periodic(8).unwrap();
        let lat = TimeLattice::new(0.0, 0.1, 4).unwrap();
        let traj = SpaceTimeField::from_fn(lat, |_| Field::zeros(g)).unwrap();
        assert!(space_time_transform(&traj, &[1.0; 4]).is_err());
    }

    #[test]
    fn windowed_pulse_parseval_2d() {
        let g = Grid1D::new(64, 20.0).unwrap();
        let lat = TimeLattice::new(-1.0, 2.0 / 32.0, 32).unwrap();
        let traj = SpaceTimeField::from_fn(lat, |t| {
            Field::from_fn(g, |x| {
                let y = x - 10.0 - 2.0 * t;
                C64::from_polar((-y * y).exp(), 1.5 * x)
            })
        })
        .unwrap();
        let window: Vec<f64> = lat.times().iter().map(|t| (-(t * t)).exp()).collect();
        let st = space_time_transform(&traj, &window).unwrap();
        // direct double sum over the K periodic frames
        let mut direct = 0.0;
        for (frame, w) in traj.frames().iter().take(32).zip(&window) {
            direct += frame
                .samples()
                .iter()
                .map(|z| (z * w).norm_sqr())
                .sum::<f64>();
        }
        direct /= (32 * 64) as f64;
        assert_relative_eq!(st.energy(), direct, max_relative = 1e-10);
    }

    #[test]
    fn frequency_near_picks_closest_alias() {
        let g = Grid1D::periodic(8).unwrap();
        let lat = TimeLattice::new(0.0, 0.1, 10).unwrap();
        let traj = SpaceTimeField::from_fn(lat, |_| Field::zeros(g)).unwrap();
        let st = space_time_transform(&traj, &[1.0; 11]).unwrap();
        let dtau = lat.frequency_step();
        let f = st.frequency_near(2, -100.0);
        assert!((f - (-100.0)).abs() <= 5.0 * dtau);
        assert_relative_eq!(((f / dtau) - 2.0).rem_euclid(10.0), 0.0, epsilon = 1e-9);
    }

    proptest! {
        #[test]
        fn round_trip_is_identity(seed in 0u64..1000, log_m in 2u32..9) {
            let g = Grid1D::new(1 << log_m, 3.0).unwrap();
            let f = random_field(g, seed);
            let back = f.forward().inverse();
            let scale = f.max_abs().max(1e-300);
            prop_assert!(back.max_abs_diff(&f) / scale < 1e-12);
        }

        #[test]
        fn parseval_random(seed in 0u64..1000) {
            let g = Grid1D::new(256, 13.0).unwrap();
            let f = random_field(g, seed);
            let lhs: f64 = f.samples().iter().map(|z| z.norm_sqr()).sum::<f64>() * g.spacing();
            let rhs = g.length() * f.forward().energy();
            prop_assert!((lhs - rhs).abs() / lhs < 1e-10);
        }

        #[test]
        fn real_fields_are_hermitian(seed in 0u64..1000) {
            let g = Grid1D::new(64, 5.0).unwrap();
            let f = random_field(g, seed);
            let real = Field::from_real(g, &f.samples().iter().map(|z| z.re).collect::<Vec<_>>()).unwrap();
            let s = real.forward();
            for j in 1..32i64 {
                let a = s.coefficient(j).unwrap();
                let b = s.coefficient(-j).unwrap();
                prop_assert!((a - b.conj()).norm() < 1e-12);
            }
            prop_assert!(s.coefficient(-32).unwrap().im.abs() < 1e-12);
        }

        #[test]
        fn sobolev_weights_invert(seed in 0u64..500, s in -2.0f64..2.0) {
            let g = Grid1D::new(128, 9.0).unwrap();
            let f = random_field(g, seed);
            let up = apply_multiplier(&f.forward(), |xi| C64::new((1.0 + xi.abs()).powf(s), 0.0)).unwrap();
            let down = apply_multiplier(&up, |xi| C64::new((1.0 + xi.abs()).powf(-s), 0.0)).unwrap();
            prop_assert!(down.inverse().max_abs_diff(&f) < 1e-12);
        }
    }
}
