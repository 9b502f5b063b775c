//! Experiment drivers: initial data, the local step rule, and the sweep runners.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::audit::{dyadic_ns, scaling_sweep, ScalingReport, SweepOptions};
use crate::config::{DataSpec, ExperimentConfig, NormSource, VInit};
use crate::dynamics::{
    evolve, evolve_observed, free_trajectory, nls_evolve, nonlinear_step, plane_wave_oracle,
    step_count, SDParams, SDState, SplitStepper, Trajectory,
};
use crate::error::{Error, Result};
use crate::fit::{log2_fit, LinearFit};
use crate::norms::{
    bourgain_norm, bracket, energy_derivative, i_apply, modified_energy, sobolev_norm, time_window,
    BourgainIndex, DispersionSymbol, IMultiplier, DEFAULT_EPSILON,
};
use crate::rational::{format_rational, to_f64, Rational};
use crate::spectral::{Field, Grid1D, SpaceTimeField, Spectrum, TimeLattice, C64};

/// Frames recorded when no interval is configured.
const AUTO_FRAMES: usize = 20;

/// `A e^{−(x−c)²/(2w²)} e^{i n k₀ x}` with `k₀ = 2π/L`.
pub fn gaussian(grid: Grid1D, width: f64, amplitude: f64, mode: i64, center: f64) -> Result<Field> {
    if !(width.is_finite() && width > 0.0) {
        return Err(Error::param(
            "width",
            format!("must be positive, got {width}"),
        ));
    }
    let xi = mode as f64 * grid.wavenumber_step();
    Ok(Field::from_fn(grid, |x| {
        let y = (x - center) / width;
        C64::from_polar(amplitude * (-0.5 * y * y).exp(), xi * x)
    }))
}

/// `A e^{i n k₀ x}`.
pub fn plane_wave(grid: Grid1D, amplitude: f64, mode: i64) -> Result<Field> {
    if grid.storage_index(mode).is_none() {
        return Err(Error::param(
            "mode",
            format!("{mode} is not resolved by the grid"),
        ));
    }
    let xi = mode as f64 * grid.wavenumber_step();
    Ok(Field::from_fn(grid, |x| C64::from_polar(amplitude, xi * x)))
}

/// Complex Gaussian coefficients weighted by `⟨ξ⟩^{−s−1/2}` on `|ξ| ≤ bandwidth`,
/// scaled so that `‖u‖_{H^s} = amplitude`.
pub fn random_hs(grid: Grid1D, s: f64, seed: u64, bandwidth: f64, amplitude: f64) -> Result<Field> {
    if !(bandwidth.is_finite() && bandwidth > 0.0 && bandwidth < grid.max_wavenumber()) {
        return Err(Error::param(
            "bandwidth",
            format!(
                "must lie in (0, {}), got {bandwidth}",
                grid.max_wavenumber()
            ),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coeffs = grid
        .wavenumbers_fft_order()
        .into_iter()
        .map(|xi| {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            if xi.abs() <= bandwidth {
                C64::new(re, im) * (std::f64::consts::FRAC_1_SQRT_2 * bracket(xi).powf(-s - 0.5))
            } else {
                C64::new(0.0, 0.0)
            }
        })
        .collect();
    let spec = Spectrum::new(grid, coeffs)?;
    let u = spec.inverse();
    let norm = sobolev_norm(&u, s);
    Ok(u.scaled(C64::new(amplitude / norm, 0.0)))
}

pub fn make_grid(cfg: &ExperimentConfig) -> Result<Grid1D> {
    Grid1D::new(cfg.grid.m, cfg.grid.length)
}

pub fn make_params(cfg: &ExperimentConfig) -> Result<SDParams> {
    SDParams::new(cfg.run.sigma, cfg.run.epsilon, cfg.run.dt)
}

pub fn initial_u(cfg: &ExperimentConfig) -> Result<Field> {
    let grid = make_grid(cfg)?;
    match cfg.data {
        DataSpec::Gaussian {
            width,
            amplitude,
            mode,
            center,
        } => gaussian(
            grid,
            width,
            amplitude,
            mode,
            center.unwrap_or(0.5 * grid.length()),
        ),
        DataSpec::PlaneWave { amplitude, mode } => plane_wave(grid, amplitude, mode),
        DataSpec::RandomHs {
            s,
            bandwidth,
            amplitude,
        } => random_hs(grid, s, cfg.seed, bandwidth, amplitude),
        DataSpec::Zero => Ok(Field::zeros(grid)),
    }
}

fn prepared_v(u: &Field, epsilon: i32) -> Vec<f64> {
    let eps = f64::from(epsilon);
    u.samples().iter().map(|z| eps * z.norm_sqr()).collect()
}

/// Initial state from the data generator and the `v₀` policy.
pub fn initial_state(cfg: &ExperimentConfig) -> Result<SDState> {
    let u = initial_u(cfg)?;
    let v = match cfg.v0 {
        VInit::Prepared => prepared_v(&u, cfg.run.epsilon),
        VInit::Constant(c) => vec![c; u.grid().num_points()],
    };
    SDState::from_real_v(u, &v, 0.0)
}

/// `c_δ (‖I u₀‖ + ‖I v₀‖)^{−4/3−ε}`, capped at 1; norms in `L²(dx)`.
pub fn local_timestep(u0: &Field, v0: &Field, cutoff: f64, s: f64, c_delta: f64) -> Result<f64> {
    if !(c_delta.is_finite() && c_delta > 0.0) {
        return Err(Error::param(
            "c_delta",
            format!("must be positive, got {c_delta}"),
        ));
    }
    if u0.grid() != v0.grid() {
        return Err(Error::GridMismatch);
    }
    let im = IMultiplier::for_regularity(cutoff, s)?;
    let size = i_apply(u0, &im).l2_norm_dx() + i_apply(v0, &im).l2_norm_dx();
    if size == 0.0 {
        return Ok(1.0);
    }
    Ok((c_delta * size.powf(-4.0 / 3.0 - DEFAULT_EPSILON)).min(1.0))
}

/// Threshold `−6ℓ/(5+8ℓ)` of the global argument, exactly.
pub fn gwp_exponent(ell: Rational) -> Result<Rational> {
    let zero = Rational::from_integer(0);
    let half = Rational::new(1, 2);
    if ell <= zero || ell >= half {
        return Err(Error::param(
            "ell",
            format!("must lie in (0, 1/2), got {}", format_rational(&ell)),
        ));
    }
    if ell < Rational::new(1, 8) || ell > Rational::new(1, 4) {
        log::warn!("ell = {} lies outside [1/8, 1/4]", format_rational(&ell));
    }
    Ok(-Rational::from_integer(6) * ell
        / (Rational::from_integer(5) + Rational::from_integer(8) * ell))
}

/// Smallest interval giving at most [`AUTO_FRAMES`] recorded frames.
pub fn record_interval(steps: usize, requested: Option<usize>) -> usize {
    requested.unwrap_or_else(|| {
        (1..=steps)
            .find(|d| steps.is_multiple_of(*d) && steps / d <= AUTO_FRAMES)
            .unwrap_or(steps)
    })
}

/// `‖ |u|² ‖_{L²(dx)}`.
fn modulus_sq_norm(u: &Field) -> f64 {
    let sum: f64 = u.samples().iter().map(|z| z.norm_sqr().powi(2)).sum();
    (sum * u.grid().spacing()).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConservationSample {
    pub step: usize,
    pub time: f64,
    pub mass_drift: f64,
    pub v_imag_defect: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConservationReport {
    pub steps: usize,
    pub max_mass_drift: f64,
    pub max_v_imag_defect: f64,
    /// Distance to the exact solution for plane-wave data.
    pub oracle_error: Option<f64>,
    #[serde(skip)]
    pub samples: Vec<ConservationSample>,
    #[serde(skip)]
    pub trajectory: Trajectory,
}

/// Evolves the configured data, tracking relative mass drift and the imaginary part of `v`.
pub fn run_conservation(cfg: &ExperimentConfig) -> Result<ConservationReport> {
    let state0 = initial_state(cfg)?;
    let params = make_params(cfg)?;
    let steps = step_count(cfg.run.t_final, params.dt)?;
    let every = record_interval(steps, cfg.run.record_every);
    if steps % every != 0 {
        return Err(Error::RecordIntervalMismatch { steps, every });
    }
    let lattice = TimeLattice::new(0.0, params.dt * every as f64, steps / every)?;
    let stepper = SplitStepper::new(*state0.grid(), params);
    let m0 = state0.u().l2_norm();
    let drift = |s: &SDState| {
        let d = (s.u().l2_norm() - m0).abs();
        if m0 > 0.0 {
            d / m0
        } else {
            d
        }
    };
    let mut samples = vec![ConservationSample {
        step: 0,
        time: 0.0,
        mass_drift: 0.0,
        v_imag_defect: state0.v().imag_defect(),
    }];
    let (mut us, mut vs) = (vec![state0.u().clone()], vec![state0.v().clone()]);
    let mut cur = state0.clone();
    cur.check_finite(0)?;
    for n in 1..=steps {
        cur = stepper.step(&cur);
        cur.time = n as f64 * params.dt;
        cur.check_finite(n)?;
        samples.push(ConservationSample {
            step: n,
            time: cur.time,
            mass_drift: drift(&cur),
            v_imag_defect: cur.v().imag_defect(),
        });
        if n % every == 0 {
            us.push(cur.u().clone());
            vs.push(cur.v().clone());
        }
    }
    let oracle_error = match cfg.data {
        DataSpec::PlaneWave { amplitude, mode } => {
            let v0 = state0.v().samples()[0].re;
            let exact = plane_wave_oracle(
                *state0.grid(),
                C64::new(amplitude, 0.0),
                mode,
                v0,
                &params,
                cur.time,
            );
            Some(
                cur.u()
                    .max_abs_diff(exact.u())
                    .max(cur.v().max_abs_diff(exact.v())),
            )
        }
        _ => None,
    };
    let fold = |f: fn(&ConservationSample) -> f64| samples.iter().map(f).fold(0.0, f64::max);
    Ok(ConservationReport {
        steps,
        max_mass_drift: fold(|s| s.mass_drift),
        max_v_imag_defect: fold(|s| s.v_imag_defect),
        oracle_error,
        trajectory: Trajectory {
            u: SpaceTimeField::new(lattice, us)?,
            v: SpaceTimeField::new(lattice, vs)?,
            final_state: cur,
        },
        samples,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AcRow {
    pub n: f64,
    pub energy_initial: f64,
    /// `E(Iu)(δ) − E(Iu)(0)`.
    pub delta_endpoint: f64,
    /// Midpoint quadrature of the energy derivative over the nonlinear substeps.
    pub delta_quadrature: f64,
    pub relative_mismatch: f64,
}

/// Decay `N^{lhs_power} δ^{delta_power}` of a predicted bound.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayForm {
    pub n_power: String,
    pub delta_power: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct AcReport {
    pub ns: Vec<f64>,
    pub delta: f64,
    pub s: f64,
    pub ell: String,
    pub dt: f64,
    pub rows: Vec<AcRow>,
    /// Fit of `log₂|ΔE|` against `log₂ N`; absent if some `ΔE` vanishes.
    pub fit: Option<LinearFit>,
    /// `N^{−2ℓ+} δ^{1/2−2ℓ−}`.
    pub ell_form: DecayForm,
    /// `N^{−1/2+} δ^{1/4−}`.
    pub uniform_form: DecayForm,
}

/// Increment of the modified energy over `[0, δ]` for each cutoff of the sweep.
pub fn run_almost_conservation(cfg: &ExperimentConfig) -> Result<AcReport> {
    let state0 = initial_state(cfg)?;
    let params = make_params(cfg)?;
    let grid = *state0.grid();
    let s = cfg.ac.s;
    let ns = cfg.sweep.n.clone();
    if ns.is_empty() {
        return Err(Error::InvalidSweep("sweep.N is empty".into()));
    }
    for &n in &ns {
        if n > 0.5 * grid.max_wavenumber() {
            return Err(Error::BandwidthExceeded {
                cutoff: n,
                max_wavenumber: grid.max_wavenumber(),
            });
        }
    }
    let nmax = ns.iter().copied().fold(0.0, f64::max);
    let delta = match cfg.ac.delta {
        Some(d) => d,
        None => {
            let d = local_timestep(state0.u(), state0.v(), nmax, s, cfg.ac.c_delta)?;
            (d / params.dt).floor().max(1.0) * params.dt
        }
    };
    let steps = step_count(delta, params.dt)?;
    for &n in &ns {
        IMultiplier::for_regularity(n, s)?;
    }
    let e0 = ns
        .iter()
        .map(|&n| modified_energy(state0.u(), n, s))
        .collect::<Result<Vec<_>>>()?;
    let mut integrals = vec![0.0; ns.len()];
    let mut failure = None;
    let traj = evolve_observed(&state0, &params, delta, steps, |_, mid| {
        let half = nonlinear_step(mid, &params, 0.5 * params.dt);
        for (acc, &n) in integrals.iter_mut().zip(&ns) {
            match energy_derivative(&half, n, s) {
                Ok(d) => *acc += params.dt * d,
                Err(e) => failure = Some(e),
            }
        }
    })?;
    if let Some(e) = failure {
        return Err(e);
    }
    let end = traj.final_state.u();
    let rows = ns
        .iter()
        .zip(&e0)
        .zip(&integrals)
        .map(|((&n, &e), &q)| {
            let endpoint = modified_energy(end, n, s)? - e;
            let quadrature = q / grid.length();
            Ok(AcRow {
                n,
                energy_initial: e,
                delta_endpoint: endpoint,
                delta_quadrature: quadrature,
                relative_mismatch: (endpoint - quadrature).abs() / endpoint.abs(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let magnitudes: Vec<f64> = rows.iter().map(|r| r.delta_endpoint.abs()).collect();
    let fit = if ns.len() >= 2 {
        log2_fit(&ns, &magnitudes, 0).ok()
    } else {
        None
    };
    let ell = cfg.sweep.ell;
    let two = Rational::from_integer(2);
    Ok(AcReport {
        ns,
        delta,
        s,
        ell: format_rational(&ell),
        dt: params.dt,
        rows,
        fit,
        ell_form: DecayForm {
            n_power: format!("{}+", format_rational(&(-two * ell))),
            delta_power: format!("{}-", format_rational(&(Rational::new(1, 2) - two * ell))),
        },
        uniform_form: DecayForm {
            n_power: "-1/2+".into(),
            delta_power: "1/4-".into(),
        },
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SigmaRow {
    pub sigma: f64,
    /// `max_t ‖u_SD(t) − u_NLS(t)‖_{L²(dx)}` over the recorded times.
    pub error: f64,
    /// `error / previous error`.
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SigmaLimitReport {
    pub t_final: f64,
    pub dt: f64,
    pub well_prepared: bool,
    pub rows: Vec<SigmaRow>,
    pub strictly_decreasing: bool,
    /// Fit of `log₂ error` against `log₂ σ`; absent if some error vanishes.
    pub order: Option<LinearFit>,
}

/// Distance between Schrödinger-Debye and cubic NLS solutions along a decreasing `σ` list.
pub fn run_sigma_limit(cfg: &ExperimentConfig) -> Result<SigmaLimitReport> {
    let sigmas = cfg.sweep.sigma.clone();
    if sigmas.is_empty() {
        return Err(Error::InvalidSweep("sweep.sigma is empty".into()));
    }
    if sigmas.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidSweep(
            "sweep.sigma must be strictly decreasing".into(),
        ));
    }
    let dt = cfg.run.dt;
    for &sigma in &sigmas {
        if dt > sigma / 10.0 * (1.0 + 1e-12) {
            return Err(Error::Stiffness { dt, sigma });
        }
    }
    let state0 = initial_state(cfg)?;
    let u0 = state0.u().clone();
    let v0: Vec<f64> = if cfg.ill_prepared {
        state0.v().samples().iter().map(|z| z.re).collect()
    } else {
        prepared_v(&u0, cfg.run.epsilon)
    };
    let steps = step_count(cfg.run.t_final, dt)?;
    let every = record_interval(steps, cfg.run.record_every);
    let nls = nls_evolve(&u0, cfg.run.epsilon, cfg.run.t_final, dt, every)?;
    let errors = sigmas
        .par_iter()
        .map(|&sigma| {
            let params = SDParams::new(sigma, cfg.run.epsilon, dt)?;
            let start = SDState::from_real_v(u0.clone(), &v0, 0.0)?;
            let traj = evolve(&start, &params, cfg.run.t_final, every)?;
            traj.u
                .frames()
                .iter()
                .zip(nls.frames())
                .map(|(a, b)| Ok(a.difference(b)?.l2_norm_dx()))
                .try_fold(0.0f64, |m, e: Result<f64>| Ok(m.max(e?)))
        })
        .collect::<Result<Vec<f64>>>()?;
    let rows: Vec<SigmaRow> = sigmas
        .iter()
        .enumerate()
        .map(|(i, &sigma)| SigmaRow {
            sigma,
            error: errors[i],
            ratio: (i > 0).then(|| errors[i] / errors[i - 1]),
        })
        .collect();
    let strictly_decreasing = errors.windows(2).all(|w| w[1] < w[0]);
    let order = if sigmas.len() >= 2 {
        log2_fit(&sigmas, &errors, 0).ok()
    } else {
        None
    };
    Ok(SigmaLimitReport {
        t_final: cfg.run.t_final,
        dt,
        well_prepared: !cfg.ill_prepared,
        rows,
        strictly_decreasing,
        order,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VBoundSample {
    pub step: usize,
    pub time: f64,
    pub v_norm: f64,
    /// `‖ |u|² ‖` of the state driving the relaxation over the next step.
    pub modulus_sq_norm: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct VBoundReport {
    pub sigma: f64,
    pub t_final: f64,
    pub v0_norm: f64,
    /// `‖u₀‖²`.
    pub u0_mass: f64,
    /// `sup_t ‖ |u(t)|² ‖ / ‖u₀‖²`, zero for zero data.
    pub fitted_c: f64,
    pub sup_v_norm: f64,
    /// `max(‖v₀‖, C ‖u₀‖²)`.
    pub bound: f64,
    pub verdict: String,
    #[serde(skip)]
    pub samples: Vec<VBoundSample>,
}

/// Tracks `‖v(t)‖_{L²(dx)}` against `max(‖v₀‖, C‖u₀‖²)`.
pub fn run_v_bound(cfg: &ExperimentConfig) -> Result<VBoundReport> {
    let state0 = initial_state(cfg)?;
    let params = make_params(cfg)?;
    let steps = step_count(cfg.run.t_final, params.dt)?;
    let mut samples = Vec::with_capacity(steps + 1);
    let traj = evolve_observed(&state0, &params, cfg.run.t_final, steps, |n, mid| {
        samples.push(VBoundSample {
            step: n,
            time: n as f64 * params.dt,
            v_norm: mid.v().l2_norm_dx(),
            modulus_sq_norm: modulus_sq_norm(mid.u()),
        });
    })?;
    let last = &traj.final_state;
    samples.push(VBoundSample {
        step: steps,
        time: last.time,
        v_norm: last.v().l2_norm_dx(),
        modulus_sq_norm: modulus_sq_norm(last.u()),
    });
    let v0_norm = state0.v().l2_norm_dx();
    let u0_mass = state0.u().l2_norm_dx().powi(2);
    let sup_u2 = samples
        .iter()
        .map(|s| s.modulus_sq_norm)
        .fold(0.0, f64::max);
    let fitted_c = if u0_mass > 0.0 { sup_u2 / u0_mass } else { 0.0 };
    let sup_v_norm = samples.iter().map(|s| s.v_norm).fold(0.0, f64::max);
    let bound = v0_norm.max(fitted_c * u0_mass);
    let verdict = if sup_v_norm <= bound * (1.0 + 1e-12) {
        "BOUNDED"
    } else {
        "EXCEEDED"
    };
    Ok(VBoundReport {
        sigma: params.sigma,
        t_final: cfg.run.t_final,
        v0_norm,
        u0_mass,
        fitted_c,
        sup_v_norm,
        bound,
        verdict: verdict.into(),
        samples,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormRow {
    pub kind: String,
    pub s: f64,
    pub b: Option<f64>,
    pub dispersion: Option<DispersionSymbol>,
    pub window: Option<f64>,
    pub value: f64,
}

/// Sobolev norms of `u₀` and windowed Bourgain norms of its trajectory.
///
/// The `free` source samples the free evolution on `[−2T, 2T]`; the `sd`
/// source samples the coupled evolution on `[0, 2T]` with step `run.dt`.
pub fn run_norms(cfg: &ExperimentConfig) -> Result<Vec<NormRow>> {
    let ns = &cfg.norms;
    let u0 = initial_u(cfg)?;
    let t = ns.window;
    let traj = match ns.source {
        NormSource::Free => {
            let lat = TimeLattice::new(-2.0 * t, 4.0 * t / ns.steps as f64, ns.steps)?;
            free_trajectory(&u0, lat)?
        }
        NormSource::Sd => {
            let state0 = initial_state(cfg)?;
            let params = make_params(cfg)?;
            let steps = step_count(2.0 * t, params.dt)?;
            if steps % ns.steps != 0 {
                return Err(Error::RecordIntervalMismatch {
                    steps,
                    every: ns.steps,
                });
            }
            evolve(&state0, &params, 2.0 * t, steps / ns.steps)?.u
        }
    };
    let window = time_window(t, traj.lattice())?;
    let mut rows = Vec::new();
    for &s in &ns.s {
        rows.push(NormRow {
            kind: "sobolev".into(),
            s,
            b: None,
            dispersion: None,
            window: None,
            value: sobolev_norm(&u0, s),
        });
    }
    for &s in &ns.s {
        for &b in &ns.b {
            rows.push(NormRow {
                kind: "bourgain".into(),
                s,
                b: Some(b),
                dispersion: Some(ns.dispersion),
                window: Some(t),
                value: bourgain_norm(&traj, BourgainIndex::new(s, b), ns.dispersion, &window)?,
            });
        }
    }
    Ok(rows)
}

/// Scaling sweep of the configured audit cell over `N = 8, 16, …, nmax`.
pub fn run_audit(cfg: &ExperimentConfig) -> Result<ScalingReport> {
    let opts = SweepOptions {
        epsilon: cfg.eps_exponent,
        ..SweepOptions::default()
    };
    scaling_sweep(
        cfg.audit.family,
        cfg.audit.k,
        cfg.audit.s,
        &dyadic_ns(cfg.audit.nmax),
        &opts,
    )
}

/// `gwp_exponent` of the configured `ℓ` as `(exact, value)`.
pub fn run_gwp_exponent(cfg: &ExperimentConfig) -> Result<(Rational, f64)> {
    let r = gwp_exponent(cfg.sweep.ell)?;
    Ok((r, to_f64(&r)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn cfg(text: &str) -> ExperimentConfig {
        ExperimentConfig::parse(text).unwrap()
    }

    #[test]
    fn local_timestep_examples() {
        let g = Grid1D::new(64, 4.0).unwrap();
        // constants are mode 0, where I is the identity; ‖1/2‖_{L²(dx)} = 1 on L = 4
        let half = Field::from_real(g, &[0.5; 64]).unwrap();
        let d = local_timestep(&half, &half, 8.0, -0.2, 1.0).unwrap();
        assert_relative_eq!(d, 2f64.powf(-4.0 / 3.0 - 0.01), max_relative = 1e-12);
        let big = half.scaled(C64::new(3.0, 0.0));
        assert!(local_timestep(&big, &big, 8.0, -0.2, 1.0).unwrap() < d);
        let tiny = half.scaled(C64::new(1e-3, 0.0));
        assert_eq!(local_timestep(&tiny, &tiny, 8.0, -0.2, 1.0).unwrap(), 1.0);
        let zero = Field::zeros(g);
        assert_eq!(local_timestep(&zero, &zero, 8.0, -0.2, 1.0).unwrap(), 1.0);
        assert!(local_timestep(&half, &half, 8.0, -0.2, 0.0).is_err());
    }

    #[test]
    fn gwp_exponent_examples() {
        assert_eq!(
            gwp_exponent(Rational::new(1, 4)).unwrap(),
            Rational::new(-3, 14)
        );
        assert_eq!(
            gwp_exponent(Rational::new(1, 8)).unwrap(),
            Rational::new(-1, 8)
        );
        for bad in [
            Rational::from_integer(0),
            Rational::new(1, 2),
            Rational::new(-1, 4),
        ] {
            assert!(gwp_exponent(bad).is_err());
        }
    }

    proptest! {
        #[test]
        fn gwp_exponent_decreasing(a in 1i64..1000, b in 1i64..1000) {
            prop_assume!(a != b);
            let la = Rational::new(1, 8) + Rational::new(a, 8008);
            let lb = Rational::new(1, 8) + Rational::new(b, 8008);
            let (ea, eb) = (gwp_exponent(la).unwrap(), gwp_exponent(lb).unwrap());
            prop_assert_eq!(a < b, ea > eb);
        }

        #[test]
        fn random_hs_deterministic(seed in 0u64..1000) {
            let g = Grid1D::new(128, 10.0).unwrap();
            let a = random_hs(g, -0.3, seed, 8.0, 2.0).unwrap();
            let b = random_hs(g, -0.3, seed, 8.0, 2.0).unwrap();
            prop_assert_eq!(a.samples(), b.samples());
            prop_assert!((sobolev_norm(&a, -0.3) - 2.0).abs() < 1e-12);
            let c = random_hs(g, -0.3, seed + 1, 8.0, 2.0).unwrap();
            prop_assert!(a.max_abs_diff(&c) > 0.0);
            let bounds = a.forward().support_bounds(1e-14).unwrap();
            prop_assert!(bounds.1 <= 8.0);
        }
    }

    #[test]
    fn record_interval_caps_frames() {
        assert_eq!(record_interval(1000, None), 50);
        assert_eq!(record_interval(7, None), 1);
        assert_eq!(record_interval(1000, Some(4)), 4);
        assert_eq!(record_interval(23, None), 23);
    }

    #[test]
    fn conservation_gaussian() {
        let r = run_conservation(&cfg(
            "grid.m = 512\ngrid.length = 40\ndata.width = 1\ndata.mode = 3\nrun.tfinal = 1\n",
        ))
        .unwrap();
        assert_eq!(r.steps, 1000);
        assert!(r.max_mass_drift <= 1e-10, "{}", r.max_mass_drift);
        assert_eq!(r.max_v_imag_defect, 0.0);
        assert_eq!(r.samples.len(), 1001);
        assert_eq!(r.trajectory.u.frames().len(), 21);
    }

    #[test]
    fn conservation_plane_wave_matches_oracle() {
        for eps in [1, -1] {
            let r = run_conservation(&cfg(&format!(
                "grid.m = 64\ngrid.length = 6.283185307179586\ndata.kind = plane_wave\n\
                 data.amplitude = 0.8\ndata.mode = 2\ndata.v0 = 0.3\nsd.epsilon = {eps}\nrun.dt = 0.01\n"
            )))
            .unwrap();
            assert!(r.oracle_error.unwrap() <= 1e-10, "{:?}", r.oracle_error);
        }
    }

    #[test]
    fn conservation_reports_blowup() {
        let err = run_conservation(&cfg("data.amplitude = 1e9\nrun.tfinal = 0.01\n")).unwrap_err();
        assert!(matches!(err, Error::Blowup { step: 0, .. }));
    }

    const AC_BASE: &str = "grid.m = 4096\ngrid.length = 20\ndata.width = 0.02\ndata.amplitude = 4\nac.s = -0.2\nrun.dt = 0.001\n";

    #[test]
    fn ac_endpoint_matches_quadrature() {
        let r = run_almost_conservation(&cfg(&format!(
            "{AC_BASE}ac.delta = 0.05\nsweep.N = 8,16,32\n"
        )))
        .unwrap();
        assert_eq!(r.rows.len(), 3);
        for row in &r.rows {
            assert!(row.relative_mismatch < 1e-4, "{row:?}");
            assert!(row.delta_endpoint != 0.0);
        }
        assert_eq!(r.ell_form.n_power, "-1/2+");
        assert_eq!(r.ell_form.delta_power, "0-");
    }

    #[test]
    fn ac_band_limited_data_is_second_order_in_delta() {
        // spectrum inside |ξ| < 4 = min(N)/4: the commutator starts at zero
        let text = "grid.m = 2048\ngrid.length = 80\ndata.width = 3\ndata.amplitude = 0.5\nsweep.N = 16,32\nrun.dt = 0.0005\n";
        let u0 = initial_u(&cfg(text)).unwrap();
        let (_, hi) = u0.forward().support_bounds(1e-12).unwrap();
        assert!(hi < 4.0);
        let dn = |d: &str| {
            run_almost_conservation(&cfg(&format!("{text}ac.delta = {d}\n")))
                .unwrap()
                .rows[0]
                .delta_endpoint
                .abs()
        };
        let (a, b) = (dn("0.02"), dn("0.01"));
        assert!(a < 1e-8, "{a}");
        assert!(b <= 0.5 * a, "{a} {b}");
    }

    #[test]
    fn ac_rejects_cutoff_beyond_bandwidth() {
        let err = run_almost_conservation(&cfg(
            "grid.m = 64\ngrid.length = 20\nsweep.N = 8,16\nac.delta = 0.01\n",
        ))
        .unwrap_err();
        assert!(matches!(err, Error::BandwidthExceeded { .. }));
    }

    #[test]
    fn ac_default_delta_is_multiple_of_dt() {
        let r = run_almost_conservation(&cfg(
            "grid.m = 256\ngrid.length = 20\nsweep.N = 8,16\ndata.amplitude = 3\n",
        ))
        .unwrap();
        assert!(r.delta <= 1.0);
        let k = r.delta / r.dt;
        assert!((k - k.round()).abs() < 1e-9);
    }

    #[test]
    fn sigma_limit_zero_data() {
        let r = run_sigma_limit(&cfg(
            "data.kind = zero\ngrid.m = 64\nrun.dt = 0.001\nrun.tfinal = 0.1\n",
        ))
        .unwrap();
        assert!(r.rows.iter().all(|row| row.error == 0.0));
        assert!(r.order.is_none());
    }

    #[test]
    fn sigma_limit_guards() {
        let e = run_sigma_limit(&cfg("run.dt = 0.01\nrun.tfinal = 0.1\n")).unwrap_err();
        assert!(matches!(e, Error::Stiffness { .. }));
        let e = run_sigma_limit(&cfg("sweep.sigma = 0.1,0.2\n")).unwrap_err();
        assert!(matches!(e, Error::InvalidSweep(_)));
    }

    #[test]
    fn plane_wave_phase_tends_to_nls_phase() {
        // Φ(t) = ρt + σ(v₀−ρ)(1−e^{−t/σ}) → ρt with ρ = ε|A|²
        let g = Grid1D::new(16, std::f64::consts::TAU).unwrap();
        let (a, t) = (0.9, 0.7);
        for eps in [1, -1] {
            let rho = f64::from(eps) * a * a;
            let mut last = f64::INFINITY;
            for sigma in [0.1, 0.01, 0.001] {
                let p = SDParams::new(sigma, eps, 1e-3).unwrap();
                let sd = plane_wave_oracle(g, C64::new(a, 0.0), 0, 0.0, &p, t);
                let nls = C64::from_polar(a, -rho * t);
                let gap = (sd.u().samples()[0] - nls).norm();
                assert!(gap <= a * sigma * rho.abs() * 1.0001, "{gap}");
                assert!(gap < last);
                last = gap;
            }
        }
    }

    #[test]
    fn v_bound_pure_relaxation() {
        let r = run_v_bound(&cfg(
            "data.kind = zero\ndata.v0 = 2\nsd.sigma = 0.5\ngrid.m = 64\nrun.dt = 0.01\n",
        ))
        .unwrap();
        for s in &r.samples {
            let exact = (-s.time / 0.5f64).exp() * 2.0 * 20f64.sqrt();
            assert_relative_eq!(s.v_norm, exact, max_relative = 1e-12);
        }
        assert_eq!(r.verdict, "BOUNDED");
        assert_eq!(r.fitted_c, 0.0);
    }

    #[test]
    fn v_bound_scenarios() {
        let small = run_v_bound(&cfg(
            "grid.m = 512\ngrid.length = 40\ndata.v0 = zero\nrun.dt = 0.005\n",
        ))
        .unwrap();
        assert_eq!(small.verdict, "BOUNDED");
        assert!(small.sup_v_norm <= small.fitted_c * small.u0_mass * (1.0 + 1e-12));
        // v₀ = 0: the norm climbs towards the quasi-equilibrium
        let early: Vec<f64> = small.samples.iter().take(20).map(|s| s.v_norm).collect();
        assert!(early.windows(2).all(|w| w[1] > w[0]));
        let large = run_v_bound(&cfg(
            "grid.m = 512\ngrid.length = 40\ndata.v0 = 5\nrun.dt = 0.005\n",
        ))
        .unwrap();
        assert_eq!(large.verdict, "BOUNDED");
        assert!(large.sup_v_norm <= large.v0_norm * (1.0 + 1e-12));
    }

    #[test]
    fn norms_rows() {
        let rows = run_norms(&cfg(
            "grid.m = 256\ngrid.length = 20\nnorms.s = 0,1\nnorms.b = 0.3,0.51\nnorms.steps = 64\n",
        ))
        .unwrap();
        assert_eq!(rows.len(), 2 + 4);
        assert!(rows.iter().all(|r| r.value > 0.0));
        let sd = run_norms(&cfg(
            "grid.m = 256\ngrid.length = 20\nnorms.source = sd\nnorms.steps = 50\nrun.dt = 0.001\n",
        ))
        .unwrap();
        assert_eq!(sd.len(), 2);
    }

    #[test]
    fn audit_runs_configured_cell() {
        let r = run_audit(&cfg("audit.family = C-u2-2\naudit.s = 1\n")).unwrap();
        assert_eq!(r.verdict.as_str(), "NECESSITY CONFIRMED");
        assert_eq!(r.ns, vec![8, 16, 32, 64, 128]);
    }
}
