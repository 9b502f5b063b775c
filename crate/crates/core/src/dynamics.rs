//! Strang-split integration of the Schrödinger-Debye system and of cubic NLS.
//!
//! Both sub-flows are solved exactly: the free flow is a Fourier multiplier,
//! and along `{i u_t = u v, σ v_t + v = ε|u|²}` the modulus `|u|` is frozen,
//! so `v` relaxes linearly and `u` picks up the integrated phase.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::spectral::{Field, Grid1D, SpaceTimeField, TimeLattice, C64};

/// Modulus above which a run is declared divergent.
pub const BLOWUP_THRESHOLD: f64 = 1e8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SDParams {
    pub sigma: f64,
    pub epsilon: i8,
    pub dt: f64,
}

impl SDParams {
    pub fn new(sigma: f64, epsilon: i32, dt: f64) -> Result<Self> {
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(Error::param(
                "sigma",
                format!("must be positive, got {sigma}"),
            ));
        }
        if epsilon != 1 && epsilon != -1 {
            return Err(Error::param(
                "epsilon",
                format!("must be +1 or -1, got {epsilon}"),
            ));
        }
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::param("dt", format!("must be positive, got {dt}")));
        }
        Ok(Self {
            sigma,
            epsilon: epsilon as i8,
            dt,
        })
    }

    pub fn eps(&self) -> f64 {
        f64::from(self.epsilon)
    }

    pub fn with_dt(&self, dt: f64) -> Result<Self> {
        Self::new(self.sigma, i32::from(self.epsilon), dt)
    }
}

/// Fields `(u, v)` at time `t`; `v` is stored with identically zero imaginary part.
#[derive(Debug, Clone, PartialEq)]
pub struct SDState {
    u: Field,
    v: Field,
    pub time: f64,
}

impl SDState {
    pub fn new(u: Field, v: Field, time: f64) -> Result<Self> {
        if u.grid() != v.grid() {
            return Err(Error::GridMismatch);
        }
        if v.imag_defect() != 0.0 {
            return Err(Error::param("v", "samples must be real"));
        }
        Ok(Self { u, v, time })
    }

    pub fn from_real_v(u: Field, v: &[f64], time: f64) -> Result<Self> {
        let v = Field::from_real(*u.grid(), v)?;
        Self::new(u, v, time)
    }

    pub fn u(&self) -> &Field {
        &self.u
    }

    pub fn v(&self) -> &Field {
        &self.v
    }

    pub fn grid(&self) -> &Grid1D {
        self.u.grid()
    }

    pub fn into_parts(self) -> (Field, Field, f64) {
        (self.u, self.v, self.time)
    }

    /// Rejects non-finite values and moduli above [`BLOWUP_THRESHOLD`].
    pub fn check_finite(&self, step: usize) -> Result<()> {
        let mut peak = 0.0f64;
        for (a, b) in self.u.samples().iter().zip(self.v.samples()) {
            if !(a.re.is_finite() && a.im.is_finite() && b.re.is_finite()) {
                return Err(Error::Blowup {
                    step,
                    time: self.time,
                    reason: "non-finite value".into(),
                });
            }
            peak = peak.max(a.norm());
        }
        if peak > BLOWUP_THRESHOLD {
            return Err(Error::Blowup {
                step,
                time: self.time,
                reason: format!("|u| = {peak:e} exceeds {BLOWUP_THRESHOLD:e}"),
            });
        }
        Ok(())
    }
}

fn free_symbol(xi: f64, dt: f64) -> C64 {
    C64::from_polar(1.0, -0.5 * xi * xi * dt)
}

/// Exact free flow `e^{i t ∂²/2}` over `dt` (negative `dt` runs backwards).
pub fn linear_step(u: &Field, dt: f64) -> Field {
    u.forward()
        .apply_multiplier(|xi| free_symbol(xi, dt))
        .expect("unimodular symbol is finite")
        .inverse()
}

/// Exact flow of `{i u_t = u v, σ v_t + v = ε|u|²}` over `dt`.
pub fn nonlinear_step(state: &SDState, params: &SDParams, dt: f64) -> SDState {
    let decay = (-dt / params.sigma).exp();
    let relax = -(-dt / params.sigma).exp_m1();
    let eps = params.eps();
    let mut u = state.u.clone();
    let mut v = state.v.clone();
    for (a, b) in u.samples_mut().iter_mut().zip(v.samples_mut()) {
        let rho = eps * a.norm_sqr();
        let v0 = b.re;
        let phase = rho * dt + params.sigma * (v0 - rho) * relax;
        *a *= C64::from_polar(1.0, -phase);
        *b = C64::new(rho + (v0 - rho) * decay, 0.0);
    }
    SDState {
        u,
        v,
        time: state.time + dt,
    }
}

/// Second-order composition `L(dt/2) ∘ N(dt) ∘ L(dt/2)`.
pub fn strang_step(state: &SDState, params: &SDParams) -> SDState {
    SplitStepper::new(*state.grid(), *params).step(state)
}

/// Strang stepper with the half-step multiplier precomputed.
#[derive(Debug, Clone)]
pub struct SplitStepper {
    params: SDParams,
    half: Vec<C64>,
}

impl SplitStepper {
    pub fn new(grid: Grid1D, params: SDParams) -> Self {
        let half = grid
            .wavenumbers_fft_order()
            .into_iter()
            .map(|xi| free_symbol(xi, 0.5 * params.dt))
            .collect();
        Self { params, half }
    }

    pub fn params(&self) -> &SDParams {
        &self.params
    }

    fn half_linear(&self, u: &Field) -> Field {
        let mut spec = u.forward();
        for (c, m) in spec.coeffs_mut().iter_mut().zip(&self.half) {
            *c *= m;
        }
        spec.inverse()
    }

    pub fn step(&self, state: &SDState) -> SDState {
        self.step_observed(state, |_| {})
    }

    /// One step; `on_nonlinear` sees the state entering the nonlinear substep.
    pub fn step_observed(
        &self,
        state: &SDState,
        mut on_nonlinear: impl FnMut(&SDState),
    ) -> SDState {
        let mid = SDState {
            u: self.half_linear(&state.u),
            v: state.v.clone(),
            time: state.time,
        };
        on_nonlinear(&mid);
        let mut out = nonlinear_step(&mid, &self.params, self.params.dt);
        out.u = self.half_linear(&out.u);
        out.time = state.time + self.params.dt;
        out
    }
}

/// Recorded `u` and `v` trajectories of a run.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub u: SpaceTimeField,
    pub v: SpaceTimeField,
    pub final_state: SDState,
}

/// Number of steps covering `span`, rejecting horizons that are not multiples of `dt`.
pub fn step_count(span: f64, dt: f64) -> Result<usize> {
    if span.is_nan() || span <= 0.0 {
        return Err(Error::param(
            "t_final",
            format!("must exceed the start time (span {span})"),
        ));
    }
    let ratio = span / dt;
    let n = ratio.round();
    if n < 1.0 || (ratio - n).abs() > 1e-9 * n.max(1.0) {
        return Err(Error::HorizonNotDivisible { span, dt });
    }
    Ok(n as usize)
}

fn record_lattice(start: f64, dt: f64, steps: usize, every: usize) -> Result<TimeLattice> {
    if every == 0 || !steps.is_multiple_of(every) {
        return Err(Error::RecordIntervalMismatch { steps, every });
    }
    TimeLattice::new(start, dt * every as f64, steps / every)
}

pub fn evolve(
    state: &SDState,
    params: &SDParams,
    t_final: f64,
    record_every: usize,
) -> Result<Trajectory> {
    evolve_observed(state, params, t_final, record_every, |_, _| {})
}

/// As [`evolve`], calling `observer(step, state)` on each state entering a nonlinear substep.
pub fn evolve_observed(
    state: &SDState,
    params: &SDParams,
    t_final: f64,
    record_every: usize,
    mut observer: impl FnMut(usize, &SDState),
) -> Result<Trajectory> {
    let steps = step_count(t_final - state.time, params.dt)?;
    let lattice = record_lattice(state.time, params.dt, steps, record_every)?;
    state.check_finite(0)?;
    let stepper = SplitStepper::new(*state.grid(), *params);
    let t0 = state.time;
    let mut us = vec![state.u.clone()];
    let mut vs = vec![state.v.clone()];
    let mut cur = state.clone();
    for n in 1..=steps {
        cur = stepper.step_observed(&cur, |s| observer(n - 1, s));
        cur.time = if n == steps {
            t_final
        } else {
            t0 + n as f64 * params.dt
        };
        cur.check_finite(n)?;
        if n % record_every == 0 {
            us.push(cur.u.clone());
            vs.push(cur.v.clone());
        }
    }
    Ok(Trajectory {
        u: SpaceTimeField::new(lattice, us)?,
        v: SpaceTimeField::new(lattice, vs)?,
        final_state: cur,
    })
}

/// Exact single-mode solution with spatially constant `v0`.
pub fn plane_wave_oracle(
    grid: Grid1D,
    amplitude: C64,
    mode: i64,
    v0: f64,
    params: &SDParams,
    t: f64,
) -> SDState {
    let xi = mode as f64 * grid.wavenumber_step();
    let rho = params.eps() * amplitude.norm_sqr();
    let v = rho + (v0 - rho) * (-t / params.sigma).exp();
    let phi = rho * t - params.sigma * (v0 - rho) * (-t / params.sigma).exp_m1();
    let global = amplitude * C64::from_polar(1.0, -0.5 * xi * xi * t - phi);
    let u = Field::from_fn(grid, |x| global * C64::from_polar(1.0, xi * x));
    let v = Field::from_real(grid, &vec![v; grid.num_points()]).expect("grid-sized");
    SDState { u, v, time: t }
}

/// Strang integrator for `i u_t + ½ u_xx = ε|u|² u`.
pub fn nls_evolve(
    u0: &Field,
    epsilon: i32,
    t_final: f64,
    dt: f64,
    record_every: usize,
) -> Result<SpaceTimeField> {
    if epsilon != 1 && epsilon != -1 {
        return Err(Error::param(
            "epsilon",
            format!("must be +1 or -1, got {epsilon}"),
        ));
    }
    let eps = f64::from(epsilon);
    let steps = step_count(t_final, dt)?;
    let lattice = record_lattice(0.0, dt, steps, record_every)?;
    let half: Vec<C64> = u0
        .grid()
        .wavenumbers_fft_order()
        .into_iter()
        .map(|xi| free_symbol(xi, 0.5 * dt))
        .collect();
    let half_linear = |u: &Field| {
        let mut spec = u.forward();
        for (c, m) in spec.coeffs_mut().iter_mut().zip(&half) {
            *c *= m;
        }
        spec.inverse()
    };
    let mut frames = vec![u0.clone()];
    let mut u = u0.clone();
    for n in 1..=steps {
        u = half_linear(&u);
        for a in u.samples_mut() {
            *a *= C64::from_polar(1.0, -eps * a.norm_sqr() * dt);
        }
        u = half_linear(&u);
        let peak = u.max_abs();
        if !peak.is_finite() || peak > BLOWUP_THRESHOLD {
            return Err(Error::Blowup {
                step: n,
                time: n as f64 * dt,
                reason: format!("|u| = {peak:e}"),
            });
        }
        if n % record_every == 0 {
            frames.push(u.clone());
        }
    }
    SpaceTimeField::new(lattice, frames)
}

/// Exact free evolution of `u0` sampled on `lattice` (times may be negative).
pub fn free_trajectory(u0: &Field, lattice: TimeLattice) -> Result<SpaceTimeField> {
    let spec = u0.forward();
    SpaceTimeField::from_fn(lattice, |t| {
        spec.apply_multiplier(|xi| free_symbol(xi, t))
            .expect("unimodular symbol is finite")
            .inverse()
    })
}
