//! Flat `key = value` experiment configuration.
//!
//! One entry per line, `#` starts a comment, lists are comma separated.
//! Unknown or repeated keys are errors; every error names the offending key.
//!
//! | key | meaning | default |
//! |-----|---------|---------|
//! | `experiment` | label recorded in the manifest | subcommand name |
//! | `grid.m` | number of grid points | 1024 |
//! | `grid.length` | period `L` | 20 |
//! | `sd.sigma` | relaxation time `σ` | 1 |
//! | `sd.epsilon` | sign `ε` (+1 or −1) | 1 |
//! | `run.dt` | time step | 0.001 |
//! | `run.tfinal` | horizon | 1 |
//! | `run.record_every` | steps between recorded frames | about 20 frames |
//! | `data.kind` | `gaussian`, `plane_wave`, `random_hs` or `zero` | `gaussian` |
//! | `data.width`, `data.amplitude`, `data.mode`, `data.center` | Gaussian / plane-wave parameters | 1, 1, 0, `L/2` |
//! | `data.s`, `data.bandwidth` | random `H^s` parameters | 0, 16 |
//! | `data.v0` | `prepared` (`ε|u₀|²`), `zero`, or a constant | `prepared` |
//! | `sweep.N` | I-operator cutoffs | 8,16,32,64,128 |
//! | `sweep.sigma` | decreasing `σ` list | 0.2,0.1,0.05,0.025 |
//! | `sweep.dt` | step sizes for refinement studies | 0.004,0.002,0.001 |
//! | `sweep.ell` | `ℓ` for the decay forms and `gwp-exponent` | 1/4 |
//! | `ac.s` | regularity `s` of the modified energy | −0.2 |
//! | `ac.delta` | local window `δ` | from the local step rule |
//! | `ac.c_delta` | constant of the local step rule | 0.5 |
//! | `limit.ill_prepared` | keep `data.v0` in the `σ` limit | false |
//! | `eps.exponent` | the `0+` used in `1/2+ε` exponents | 0.01 |
//! | `out.dir` | output directory | `out` |
//! | `seed` | RNG seed | 0 |
//! | `audit.family`, `audit.k`, `audit.s`, `audit.nmax` | audit cell | C-uv-1, 0, 0, 128 |
//! | `norms.s`, `norms.b` | index lists | 0 / 0.51 |
//! | `norms.dispersion` | `half`, `unit`, `conjugate-half`, `none` | `half` |
//! | `norms.window` | window half-width `T` | 0.25 |
//! | `norms.steps` | time samples `K` | 128 |
//! | `norms.source` | `free` or `sd` trajectory | `free` |

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;

use crate::audit::Family;
use crate::error::{Error, Result};
use crate::norms::{DispersionSymbol, DEFAULT_EPSILON};
use crate::rational::{format_rational, parse_rational, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridSpec {
    pub m: usize,
    pub length: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RunSpec {
    pub sigma: f64,
    pub epsilon: i32,
    pub dt: f64,
    pub t_final: f64,
    pub record_every: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DataSpec {
    Gaussian {
        width: f64,
        amplitude: f64,
        mode: i64,
        center: Option<f64>,
    },
    PlaneWave {
        amplitude: f64,
        mode: i64,
    },
    RandomHs {
        s: f64,
        bandwidth: f64,
        amplitude: f64,
    },
    Zero,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum VInit {
    /// `v₀ = ε|u₀|²`.
    Prepared,
    Constant(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepSpec {
    pub n: Vec<f64>,
    pub sigma: Vec<f64>,
    pub dt: Vec<f64>,
    #[serde(serialize_with = "ser_rational")]
    pub ell: Rational,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AcSpec {
    pub s: f64,
    pub delta: Option<f64>,
    pub c_delta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AuditSpec {
    pub family: Family,
    #[serde(serialize_with = "ser_rational")]
    pub k: Rational,
    #[serde(serialize_with = "ser_rational")]
    pub s: Rational,
    pub nmax: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NormSource {
    Free,
    Sd,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormsSpec {
    pub s: Vec<f64>,
    pub b: Vec<f64>,
    pub dispersion: DispersionSymbol,
    pub window: f64,
    pub steps: usize,
    pub source: NormSource,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub experiment: Option<String>,
    pub grid: GridSpec,
    pub run: RunSpec,
    pub data: DataSpec,
    pub v0: VInit,
    pub sweep: SweepSpec,
    pub ac: AcSpec,
    pub ill_prepared: bool,
    pub eps_exponent: f64,
    pub out_dir: PathBuf,
    pub seed: u64,
    pub audit: AuditSpec,
    pub norms: NormsSpec,
}

fn ser_rational<S: serde::Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format_rational(r))
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            experiment: None,
            grid: GridSpec {
                m: 1024,
                length: 20.0,
            },
            run: RunSpec {
                sigma: 1.0,
                epsilon: 1,
                dt: 1e-3,
                t_final: 1.0,
                record_every: None,
            },
            data: DataSpec::Gaussian {
                width: 1.0,
                amplitude: 1.0,
                mode: 0,
                center: None,
            },
            v0: VInit::Prepared,
            sweep: SweepSpec {
                n: vec![8.0, 16.0, 32.0, 64.0, 128.0],
                sigma: vec![0.2, 0.1, 0.05, 0.025],
                dt: vec![4e-3, 2e-3, 1e-3],
                ell: Rational::new(1, 4),
            },
            ac: AcSpec {
                s: -0.2,
                delta: None,
                c_delta: 0.5,
            },
            ill_prepared: false,
            eps_exponent: DEFAULT_EPSILON,
            out_dir: PathBuf::from("out"),
            seed: 0,
            audit: AuditSpec {
                family: Family::CUv1,
                k: Rational::from_integer(0),
                s: Rational::from_integer(0),
                nmax: 128,
            },
            norms: NormsSpec {
                s: vec![0.0],
                b: vec![0.51],
                dispersion: DispersionSymbol::HalfLaplacian,
                window: 0.25,
                steps: 128,
                source: NormSource::Free,
            },
        }
    }
}

fn key_error(key: &str, reason: impl std::fmt::Display) -> Error {
    Error::Config(format!("key `{key}`: {reason}"))
}

/// Raw entries, consumed key by key so leftovers can be reported.
struct Entries(BTreeMap<String, String>);

impl Entries {
    fn parse(text: &str) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(Error::Config(format!(
                    "line {}: expected `key = value`, got `{line}`",
                    lineno + 1
                )));
            };
            let (k, v) = (k.trim(), v.trim());
            if k.is_empty() {
                return Err(Error::Config(format!("line {}: empty key", lineno + 1)));
            }
            if map.insert(k.to_string(), v.to_string()).is_some() {
                return Err(key_error(k, "repeated"));
            }
        }
        Ok(Self(map))
    }

    fn take<T: FromStr>(&mut self, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        match self.0.remove(key) {
            None => Ok(None),
            Some(v) => v
                .parse::<T>()
                .map(Some)
                .map_err(|e| key_error(key, format!("`{v}`: {e}"))),
        }
    }

    fn take_list(&mut self, key: &str) -> Result<Option<Vec<f64>>> {
        let Some(v) = self.0.remove(key) else {
            return Ok(None);
        };
        let items = v
            .split(',')
            .map(|t| t.trim())
            .filter(|t| !t.is_empty())
            .map(|t| {
                t.parse::<f64>()
                    .map_err(|e| key_error(key, format!("`{t}`: {e}")))
            })
            .collect::<Result<Vec<f64>>>()?;
        if items.is_empty() {
            return Err(key_error(key, "list must be non-empty"));
        }
        Ok(Some(items))
    }

    fn take_rational(&mut self, key: &str) -> Result<Option<Rational>> {
        match self.0.remove(key) {
            None => Ok(None),
            Some(v) => parse_rational(&v).map(Some).map_err(|e| key_error(key, e)),
        }
    }

    fn finish(self) -> Result<()> {
        match self.0.into_keys().next() {
            Some(k) => Err(key_error(&k, "unknown key")),
            None => Ok(()),
        }
    }
}

fn positive(key: &str, x: f64) -> Result<f64> {
    if x.is_finite() && x > 0.0 {
        Ok(x)
    } else {
        Err(key_error(key, format!("must be positive, got {x}")))
    }
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut e = Entries::parse(text)?;
        let mut c = Self {
            experiment: e.take("experiment")?,
            ..Self::default()
        };
        if let Some(m) = e.take::<usize>("grid.m")? {
            if m < 4 || m % 2 != 0 {
                return Err(key_error(
                    "grid.m",
                    format!("must be even and at least 4, got {m}"),
                ));
            }
            c.grid.m = m;
        }
        if let Some(l) = e.take("grid.length")? {
            c.grid.length = positive("grid.length", l)?;
        }
        if let Some(x) = e.take("sd.sigma")? {
            c.run.sigma = positive("sd.sigma", x)?;
        }
        if let Some(eps) = e.take::<i32>("sd.epsilon")? {
            if eps != 1 && eps != -1 {
                return Err(key_error(
                    "sd.epsilon",
                    format!("must be 1 or -1, got {eps}"),
                ));
            }
            c.run.epsilon = eps;
        }
        if let Some(x) = e.take("run.dt")? {
            c.run.dt = positive("run.dt", x)?;
        }
        if let Some(x) = e.take("run.tfinal")? {
            c.run.t_final = positive("run.tfinal", x)?;
        }
        if let Some(r) = e.take::<usize>("run.record_every")? {
            if r == 0 {
                return Err(key_error("run.record_every", "must be at least 1"));
            }
            c.run.record_every = Some(r);
        }

        let kind: String = e.take("data.kind")?.unwrap_or_else(|| "gaussian".into());
        let width: Option<f64> = e.take("data.width")?;
        let amplitude: Option<f64> = e.take("data.amplitude")?;
        let mode: Option<i64> = e.take("data.mode")?;
        let center: Option<f64> = e.take("data.center")?;
        let ds: Option<f64> = e.take("data.s")?;
        let bandwidth: Option<f64> = e.take("data.bandwidth")?;
        let amp = amplitude.unwrap_or(1.0);
        if !amp.is_finite() {
            return Err(key_error("data.amplitude", "must be finite"));
        }
        let unused = |present: bool, key: &str| -> Result<()> {
            if present {
                Err(key_error(key, format!("not used by data.kind = {kind}")))
            } else {
                Ok(())
            }
        };
        c.data = match kind.as_str() {
            "gaussian" => {
                unused(ds.is_some(), "data.s")?;
                unused(bandwidth.is_some(), "data.bandwidth")?;
                DataSpec::Gaussian {
                    width: positive("data.width", width.unwrap_or(1.0))?,
                    amplitude: amp,
                    mode: mode.unwrap_or(0),
                    center,
                }
            }
            "plane_wave" => {
                unused(width.is_some(), "data.width")?;
                unused(center.is_some(), "data.center")?;
                unused(ds.is_some(), "data.s")?;
                unused(bandwidth.is_some(), "data.bandwidth")?;
                DataSpec::PlaneWave {
                    amplitude: amp,
                    mode: mode.unwrap_or(0),
                }
            }
            "random_hs" => {
                unused(width.is_some(), "data.width")?;
                unused(center.is_some(), "data.center")?;
                unused(mode.is_some(), "data.mode")?;
                DataSpec::RandomHs {
                    s: ds.unwrap_or(0.0),
                    bandwidth: positive("data.bandwidth", bandwidth.unwrap_or(16.0))?,
                    amplitude: amp,
                }
            }
            "zero" => {
                for (p, k) in [
                    (width.is_some(), "data.width"),
                    (amplitude.is_some(), "data.amplitude"),
                    (mode.is_some(), "data.mode"),
                    (center.is_some(), "data.center"),
                    (ds.is_some(), "data.s"),
                    (bandwidth.is_some(), "data.bandwidth"),
                ] {
                    unused(p, k)?;
                }
                DataSpec::Zero
            }
            other => {
                return Err(key_error(
                    "data.kind",
                    format!("unknown generator `{other}`"),
                ))
            }
        };
        if let Some(v) = e.take::<String>("data.v0")? {
            c.v0 = match v.as_str() {
                "prepared" => VInit::Prepared,
                "zero" => VInit::Constant(0.0),
                num => match num.parse::<f64>() {
                    Ok(x) if x.is_finite() => VInit::Constant(x),
                    _ => {
                        return Err(key_error(
                            "data.v0",
                            format!("expected prepared, zero or a number, got `{v}`"),
                        ))
                    }
                },
            };
        }

        if let Some(n) = e.take_list("sweep.N")? {
            if n.iter().any(|&x| !(x.is_finite() && x >= 1.0)) {
                return Err(key_error("sweep.N", "cutoffs must be at least 1"));
            }
            c.sweep.n = n;
        }
        if let Some(s) = e.take_list("sweep.sigma")? {
            if s.iter().any(|&x| !(x.is_finite() && x > 0.0)) {
                return Err(key_error("sweep.sigma", "values must be positive"));
            }
            c.sweep.sigma = s;
        }
        if let Some(s) = e.take_list("sweep.dt")? {
            if s.iter().any(|&x| !(x.is_finite() && x > 0.0)) {
                return Err(key_error("sweep.dt", "values must be positive"));
            }
            c.sweep.dt = s;
        }
        if let Some(l) = e.take_rational("sweep.ell")? {
            c.sweep.ell = l;
        }
        if let Some(s) = e.take::<f64>("ac.s")? {
            if !s.is_finite() {
                return Err(key_error("ac.s", "must be finite"));
            }
            c.ac.s = s;
        }
        if let Some(x) = e.take("ac.delta")? {
            c.ac.delta = Some(positive("ac.delta", x)?);
        }
        if let Some(x) = e.take("ac.c_delta")? {
            c.ac.c_delta = positive("ac.c_delta", x)?;
        }
        if let Some(b) = e.take("limit.ill_prepared")? {
            c.ill_prepared = b;
        }
        if let Some(x) = e.take("eps.exponent")? {
            c.eps_exponent = positive("eps.exponent", x)?;
        }
        if let Some(p) = e.take::<String>("out.dir")? {
            c.out_dir = PathBuf::from(p);
        }
        if let Some(s) = e.take("seed")? {
            c.seed = s;
        }

        if let Some(f) = e.take::<String>("audit.family")? {
            c.audit.family = f.parse().map_err(|err| key_error("audit.family", err))?;
        }
        if let Some(k) = e.take_rational("audit.k")? {
            c.audit.k = k;
        }
        if let Some(s) = e.take_rational("audit.s")? {
            c.audit.s = s;
        }
        if let Some(n) = e.take::<u32>("audit.nmax")? {
            if n < 64 {
                return Err(key_error(
                    "audit.nmax",
                    "must be at least 64 (four dyadic cutoffs)",
                ));
            }
            c.audit.nmax = n;
        }

        if let Some(s) = e.take_list("norms.s")? {
            c.norms.s = s;
        }
        if let Some(b) = e.take_list("norms.b")? {
            c.norms.b = b;
        }
        if let Some(d) = e.take::<String>("norms.dispersion")? {
            c.norms.dispersion = d
                .parse()
                .map_err(|err| key_error("norms.dispersion", err))?;
        }
        if let Some(t) = e.take("norms.window")? {
            c.norms.window = positive("norms.window", t)?;
        }
        if let Some(k) = e.take::<usize>("norms.steps")? {
            if k < 2 {
                return Err(key_error("norms.steps", "must be at least 2"));
            }
            c.norms.steps = k;
        }
        if let Some(src) = e.take::<String>("norms.source")? {
            c.norms.source = match src.as_str() {
                "free" => NormSource::Free,
                "sd" => NormSource::Sd,
                other => {
                    return Err(key_error(
                        "norms.source",
                        format!("expected free or sd, got `{other}`"),
                    ))
                }
            };
        }
        e.finish()?;
        Ok(c)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read config `{}`: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Every key with its effective value, in canonical text form.
    pub fn resolved(&self) -> BTreeMap<String, String> {
        let list = |v: &[f64]| {
            v.iter()
                .map(|x| format!("{x}"))
                .collect::<Vec<_>>()
                .join(",")
        };
        let mut m = BTreeMap::new();
        let mut put = |k: &str, v: String| {
            m.insert(k.to_string(), v);
        };
        put("experiment", self.experiment.clone().unwrap_or_default());
        put("grid.m", self.grid.m.to_string());
        put("grid.length", format!("{}", self.grid.length));
        put("sd.sigma", format!("{}", self.run.sigma));
        put("sd.epsilon", self.run.epsilon.to_string());
        put("run.dt", format!("{}", self.run.dt));
        put("run.tfinal", format!("{}", self.run.t_final));
        put(
            "run.record_every",
            self.run
                .record_every
                .map(|r| r.to_string())
                .unwrap_or_else(|| "auto".into()),
        );
        match self.data {
            DataSpec::Gaussian {
                width,
                amplitude,
                mode,
                center,
            } => {
                put("data.kind", "gaussian".into());
                put("data.width", format!("{width}"));
                put("data.amplitude", format!("{amplitude}"));
                put("data.mode", mode.to_string());
                put(
                    "data.center",
                    format!("{}", center.unwrap_or(0.5 * self.grid.length)),
                );
            }
            DataSpec::PlaneWave { amplitude, mode } => {
                put("data.kind", "plane_wave".into());
                put("data.amplitude", format!("{amplitude}"));
                put("data.mode", mode.to_string());
            }
            DataSpec::RandomHs {
                s,
                bandwidth,
                amplitude,
            } => {
                put("data.kind", "random_hs".into());
                put("data.s", format!("{s}"));
                put("data.bandwidth", format!("{bandwidth}"));
                put("data.amplitude", format!("{amplitude}"));
            }
            DataSpec::Zero => put("data.kind", "zero".into()),
        }
        put(
            "data.v0",
            match self.v0 {
                VInit::Prepared => "prepared".into(),
                VInit::Constant(x) => format!("{x}"),
            },
        );
        put("sweep.N", list(&self.sweep.n));
        put("sweep.sigma", list(&self.sweep.sigma));
        put("sweep.dt", list(&self.sweep.dt));
        put("sweep.ell", format_rational(&self.sweep.ell));
        put("ac.s", format!("{}", self.ac.s));
        put(
            "ac.delta",
            self.ac
                .delta
                .map(|d| format!("{d}"))
                .unwrap_or_else(|| "auto".into()),
        );
        put("ac.c_delta", format!("{}", self.ac.c_delta));
        put("limit.ill_prepared", self.ill_prepared.to_string());
        put("eps.exponent", format!("{}", self.eps_exponent));
        put("out.dir", self.out_dir.display().to_string());
        put("seed", self.seed.to_string());
        put("audit.family", self.audit.family.id().to_string());
        put("audit.k", format_rational(&self.audit.k));
        put("audit.s", format_rational(&self.audit.s));
        put("audit.nmax", self.audit.nmax.to_string());
        put("norms.s", list(&self.norms.s));
        put("norms.b", list(&self.norms.b));
        put("norms.dispersion", self.norms.dispersion.name().to_string());
        put("norms.window", format!("{}", self.norms.window));
        put("norms.steps", self.norms.steps.to_string());
        put(
            "norms.source",
            match self.norms.source {
                NormSource::Free => "free".into(),
                NormSource::Sd => "sd".into(),
            },
        );
        m
    }

    /// `key = value` lines of [`Self::resolved`]; parses back to an equal config.
    pub fn canonical_text(&self) -> String {
        self.resolved()
            .into_iter()
            .filter(|(k, v)| !(v == "auto" || (k == "experiment" && v.is_empty())))
            .map(|(k, v)| format!("{k} = {v}\n"))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_text_gives_defaults() {
        assert_eq!(
            ExperimentConfig::parse("# nothing\n\n").unwrap(),
            ExperimentConfig::default()
        );
    }

    #[test]
    fn parses_documented_keys() {
        let c = ExperimentConfig::parse(
            "grid.m = 256\ngrid.length = 6.283185307179586\nsd.sigma = 0.5 # comment\n\
             sd.epsilon = -1\nrun.dt = 0.01\nrun.tfinal = 2\ndata.kind = plane_wave\n\
             data.amplitude = 0.7\ndata.mode = 3\ndata.v0 = 0.25\nsweep.N = 8, 16,32,64\n\
             sweep.ell = 1/8\nseed = 42\naudit.family = P-u2-1\naudit.s = 1/2\n",
        )
        .unwrap();
        assert_eq!(c.grid.m, 256);
        assert_eq!(c.run.epsilon, -1);
        assert_eq!(
            c.data,
            DataSpec::PlaneWave {
                amplitude: 0.7,
                mode: 3
            }
        );
        assert_eq!(c.v0, VInit::Constant(0.25));
        assert_eq!(c.sweep.n, vec![8.0, 16.0, 32.0, 64.0]);
        assert_eq!(c.sweep.ell, Rational::new(1, 8));
        assert_eq!(c.seed, 42);
        assert_eq!(c.audit.family, Family::PU21);
        assert_eq!(c.audit.s, Rational::new(1, 2));
    }

    fn err_text(text: &str) -> String {
        match ExperimentConfig::parse(text) {
            Err(Error::Config(m)) => m,
            other => panic!("expected config error, got {other:?}"),
        }
    }

    #[test]
    fn errors_name_the_key() {
        assert!(err_text("grid.m = abc").contains("grid.m"));
        assert!(err_text("grid.m = 7").contains("grid.m"));
        assert!(err_text("sd.sigma = -1").contains("sd.sigma"));
        assert!(err_text("sd.epsilon = 2").contains("sd.epsilon"));
        assert!(err_text("grid.lenght = 3").contains("grid.lenght"));
        assert!(err_text("seed = 1\nseed = 2").contains("seed"));
        assert!(err_text("sweep.N = ").contains("sweep.N"));
        assert!(err_text("data.kind = box").contains("data.kind"));
        assert!(err_text("data.s = 1").contains("data.s"));
        assert!(err_text("audit.family = X-1").contains("audit.family"));
        assert!(err_text("just words").contains("line 1"));
    }

    #[test]
    fn canonical_text_round_trips() {
        let c = ExperimentConfig::parse(
            "data.kind = random_hs\ndata.s = -0.3\ndata.bandwidth = 12\nac.delta = 0.1\nrun.record_every = 5\n",
        )
        .unwrap();
        let again = ExperimentConfig::parse(&c.canonical_text()).unwrap();
        assert_eq!(again.resolved(), c.resolved());
        let d = ExperimentConfig::default();
        assert_eq!(
            ExperimentConfig::parse(&d.canonical_text())
                .unwrap()
                .resolved(),
            d.resolved()
        );
    }
}
