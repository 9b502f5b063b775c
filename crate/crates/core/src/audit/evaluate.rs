//! Norms of indicator profiles and of their products.
//!
//! A product of two indicators has Fourier transform equal to the convolution
//! of the supports. For two curved boxes the convolution at `(ξ, τ)` is the
//! integral over the admissible `ζ` of the overlap of two unit-radius `η`
//! intervals, `max(0, 2 − |g(ζ) − τ|)` with `g` quadratic; for two modes it is
//! a tent of half-width 2 around the sum of the centres.

use crate::audit::families::{
    Counterexample, IndicatorBox, ModeProfile, NormSpec, ProductKind, Profile,
};
use crate::error::{Error, Result};
use crate::norms::bracket;
use crate::quadrature::{integrate, integrate_with, QuadOptions};

/// Quadrature settings for the audit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuditQuadrature {
    /// Settings across the thin (`1/N`) direction.
    pub thin: QuadOptions,
    /// Settings across the `O(1)` direction.
    pub wide: QuadOptions,
}

impl Default for AuditQuadrature {
    fn default() -> Self {
        Self {
            thin: QuadOptions::default().with_min_nodes(32).with_rel_tol(1e-9),
            wide: QuadOptions::default()
                .with_min_nodes(64)
                .with_rel_tol(1e-11),
        }
    }
}

/// `∫₀^y (1+|r|)^p dr`, extended oddly to `y < 0`.
pub(crate) fn bracket_power_primitive(y: f64, p: f64) -> f64 {
    let a = y.abs();
    let v = if (p + 1.0).abs() < 1e-14 {
        a.ln_1p()
    } else {
        ((1.0 + a).powf(p + 1.0) - 1.0) / (p + 1.0)
    };
    v.copysign(y)
}

/// `∫_{−1}^{1} ⟨r + a⟩^p dr`.
fn unit_window_integral(a: f64, p: f64) -> f64 {
    bracket_power_primitive(a + 1.0, p) - bracket_power_primitive(a - 1.0, p)
}

fn profile_kinks(curv: f64) -> Vec<f64> {
    if curv == 0.0 {
        vec![0.0]
    } else {
        let r = 1.0 / curv.abs().sqrt();
        vec![-r, 0.0, r]
    }
}

fn box_norm(b: &IndicatorBox, spec: &NormSpec, opts: &AuditQuadrature) -> Result<f64> {
    // η = cζ² + r with |r| ≤ 1, so the phase is r + (c + c_disp)ζ²
    let curv = b.curvature + spec.dispersion.curvature();
    let p = 2.0 * spec.temporal;
    let r = integrate(
        |z| bracket(z).powf(2.0 * spec.spatial) * unit_window_integral(curv * z * z, p),
        b.zeta0,
        b.zeta1,
        &profile_kinks(curv),
        &opts.thin,
    )?;
    Ok(r.value.max(0.0).sqrt())
}

fn mode_norm(m: &ModeProfile, spec: &NormSpec, opts: &AuditQuadrature) -> Result<f64> {
    let n = m.mode as f64;
    let a = m.tau_center + spec.dispersion.curvature() * n * n;
    let p = 2.0 * spec.temporal;
    let r = integrate(|r| bracket(r + a).powf(p), -1.0, 1.0, &[-a], &opts.wide)?;
    Ok(bracket(n).powf(spec.spatial) * r.value.sqrt())
}

/// Norm of a single indicator profile.
pub fn factor_norm(profile: &Profile, spec: &NormSpec, opts: &AuditQuadrature) -> Result<f64> {
    match profile {
        Profile::Box(b) => box_norm(b, spec, opts),
        Profile::Mode(m) => mode_norm(m, spec, opts),
    }
}

/// Roots of `A ζ² + B ζ + C = 0`.
fn quadratic_roots(a: f64, b: f64, c: f64) -> [Option<f64>; 2] {
    if a == 0.0 {
        return [if b != 0.0 { Some(-c / b) } else { None }, None];
    }
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return [None, None];
    }
    let q = -0.5 * (b + disc.sqrt().copysign(b));
    if q == 0.0 {
        return [Some(0.0), None];
    }
    [Some(q / a), Some(c / q)]
}

/// Convolution `(χ_A * χ_B)(ξ, τ)` of two boxes.
pub fn convolution_height(a: &IndicatorBox, b: &IndicatorBox, xi: f64, tau: f64) -> f64 {
    let lo = a.zeta0.max(xi - b.zeta1);
    let hi = a.zeta1.min(xi - b.zeta0);
    if hi <= lo {
        return 0.0;
    }
    // g(ζ) = cA ζ² + cB (ξ − ζ)²
    let qa = a.curvature + b.curvature;
    let qb = -2.0 * b.curvature * xi;
    let qc = b.curvature * xi * xi;
    let g = |z: f64| (qa * z + qb) * z + qc;
    let h = |z: f64| (2.0 - (g(z) - tau).abs()).max(0.0);
    let mut cuts = [lo, hi, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0];
    let mut len = 2;
    for d in [-2.0, 0.0, 2.0] {
        for z in quadratic_roots(qa, qb, qc - tau - d).into_iter().flatten() {
            if z > lo && z < hi {
                cuts[len] = z;
                len += 1;
            }
        }
    }
    let cuts = &mut cuts[..len];
    cuts.sort_by(f64::total_cmp);
    // the integrand is a quadratic (or zero) on each piece, where Simpson is exact
    cuts.windows(2)
        .map(|w| (w[1] - w[0]) / 6.0 * (h(w[0]) + 4.0 * h(0.5 * (w[0] + w[1])) + h(w[1])))
        .sum()
}

fn box_product_norm(
    a: &IndicatorBox,
    b: &IndicatorBox,
    spec: &NormSpec,
    opts: &AuditQuadrature,
) -> Result<f64> {
    let qa = a.curvature + b.curvature;
    let g = |xi: f64, z: f64| a.curvature * z * z + b.curvature * (xi - z) * (xi - z);
    let p = 2.0 * spec.temporal;
    let disp = spec.dispersion;
    let inner = |xi: f64| -> Result<f64> {
        let lo = a.zeta0.max(xi - b.zeta1);
        let hi = a.zeta1.min(xi - b.zeta0);
        if hi <= lo {
            return Ok(0.0);
        }
        let mut centers = vec![g(xi, lo), g(xi, hi)];
        if qa != 0.0 {
            let vertex = b.curvature * xi / qa;
            if vertex > lo && vertex < hi {
                centers.push(g(xi, vertex));
            }
        }
        let gmin = centers.iter().copied().fold(f64::INFINITY, f64::min);
        let gmax = centers.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut bps: Vec<f64> = centers
            .iter()
            .flat_map(|c| [c - 2.0, *c, c + 2.0])
            .collect();
        bps.push(disp.curve(xi));
        let r = integrate(
            |tau| {
                let f = convolution_height(a, b, xi, tau);
                disp.weight(xi, tau).powf(p) * f * f
            },
            gmin - 2.0,
            gmax + 2.0,
            &bps,
            &opts.wide,
        )?;
        Ok(bracket(xi).powf(2.0 * spec.spatial) * r.value)
    };
    let x0 = a.zeta0 + b.zeta0;
    let x1 = a.zeta1 + b.zeta1;
    let r = integrate_with(
        inner,
        x0,
        x1,
        &[a.zeta0 + b.zeta1, a.zeta1 + b.zeta0, 0.0],
        &opts.thin,
    )?;
    Ok(r.value.max(0.0).sqrt())
}

fn mode_product_norm(
    f: &ModeProfile,
    g: &ModeProfile,
    spec: &NormSpec,
    opts: &AuditQuadrature,
) -> Result<f64> {
    let n = (f.mode + g.mode) as f64;
    let c = f.tau_center + g.tau_center;
    let a = c + spec.dispersion.curvature() * n * n;
    let p = 2.0 * spec.temporal;
    let r = integrate(
        |r: f64| {
            let tent = 2.0 - r.abs();
            bracket(r + a).powf(p) * tent * tent
        },
        -2.0,
        2.0,
        &[0.0, -a],
        &opts.wide,
    )?;
    Ok(bracket(n).powf(spec.spatial) * r.value.sqrt())
}

/// Norm of the product of two profiles, the second conjugated for [`ProductKind::Conjugate`].
pub fn product_norm(
    first: &Profile,
    second: &Profile,
    kind: ProductKind,
    spec: &NormSpec,
    opts: &AuditQuadrature,
) -> Result<f64> {
    match (first, second) {
        (Profile::Box(a), Profile::Box(b)) => {
            let b = match kind {
                ProductKind::Plain => *b,
                ProductKind::Conjugate => b.conjugate(),
            };
            box_product_norm(a, &b, spec, opts)
        }
        (Profile::Mode(f), Profile::Mode(g)) => {
            let g = match kind {
                ProductKind::Plain => *g,
                ProductKind::Conjugate => g.conjugate(),
            };
            mode_product_norm(f, &g, spec, opts)
        }
        _ => Err(Error::param("profile", "cannot mix boxes and modes")),
    }
}

/// `(LHS, RHS₁, RHS₂)` for a family member under the given norm parameters.
pub fn counterexample_norms(
    ce: &Counterexample,
    specs: &[NormSpec; 3],
    opts: &AuditQuadrature,
) -> Result<[f64; 3]> {
    let lhs = product_norm(
        &ce.first,
        &ce.second,
        ce.family.product_kind(),
        &specs[0],
        opts,
    )?;
    let rhs1 = factor_norm(&ce.first, &specs[1], opts)?;
    let rhs2 = factor_norm(&ce.second, &specs[2], opts)?;
    Ok([lhs, rhs1, rhs2])
}
