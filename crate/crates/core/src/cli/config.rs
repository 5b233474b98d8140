//! Plain-text experiment configuration: `key = value` lines, `#` comments,
//! unknown keys rejected, all defaults recorded into the output manifest.
//!
//! The full key list is documented in docs/config-format.md.

use crate::error::{Error, Result};
use crate::moduli::ElasticModuli;
use crate::output::Json;
use crate::spectrum::BoundaryCondition;
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Domain {
    Interval { length: f64 },
    Disk { radius: f64 },
    Square { side: f64 },
}

impl Domain {
    pub fn label(&self) -> String {
        match self {
            Domain::Interval { length } => format!("interval:{length}"),
            Domain::Disk { radius } => format!("disk:{radius}"),
            Domain::Square { side } => format!("square:{side}"),
        }
    }

    pub fn dimension(&self) -> u32 {
        match self {
            Domain::Interval { .. } => 1,
            _ => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Exact,
    Dispersion,
    Fem,
    Both,
}

impl Method {
    pub fn label(&self) -> &'static str {
        match self {
            Method::Exact => "exact",
            Method::Dispersion => "dispersion",
            Method::Fem => "fem",
            Method::Both => "both",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TGrid {
    Auto,
    Explicit { t_min: f64, t_max: f64, per_decade: u32 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LambdaWindow {
    Auto,
    Explicit { lo: f64, hi: f64 },
}

/// Resolved experiment configuration; every field has a recorded default.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub moduli: ElasticModuli,
    pub domain: Domain,
    pub bc: BoundaryCondition,
    pub method: Method,
    pub lambda_max: f64,
    pub count: u64,
    pub fem_h: f64,
    pub fem_order: u32,
    pub fem_count: usize,
    /// Optional mesh file to solve on instead of generating one.
    pub fem_mesh_in: Option<String>,
    /// Optional path to emit the generated mesh in the text format.
    pub fem_mesh_out: Option<String>,
    pub t_grid: TGrid,
    pub lambda_window: LambdaWindow,
    pub sigma_h: f64,
    pub output_dir: String,
    // kernel subcommand inputs
    pub kernel_diffusivity: f64,
    pub kernel_geometry: String,
    pub kernel_times: Vec<f64>,
    pub kernel_samples: usize,
    pub kernel_window: f64,
    // symbol subcommand inputs
    pub symbol_metric: String,
    pub symbol_x: Vec<f64>,
    pub symbol_xi: Vec<f64>,
    pub symbol_tau: (f64, f64),
    pub symbol_scales: Vec<f64>,
    /// Canonical resolved key = value text (defaults included), the hash
    /// input.
    canonical: String,
}

fn parse_f64(key: &str, v: &str) -> Result<f64> {
    v.trim()
        .parse()
        .map_err(|_| Error::Config(format!("key `{key}`: cannot parse `{v}` as a number")))
}

fn parse_f64_list(key: &str, v: &str) -> Result<Vec<f64>> {
    v.split(',').map(|s| parse_f64(key, s)).collect()
}

impl ExperimentConfig {
    pub fn from_text(text: &str) -> Result<Self> {
        let mut map: BTreeMap<String, String> = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("line {}: expected `key = value`", lineno + 1))
            })?;
            let key = key.trim().to_string();
            if map.insert(key.clone(), value.trim().to_string()).is_some() {
                return Err(Error::Config(format!("duplicate key `{key}`")));
            }
        }
        Self::from_map(map)
    }

    fn from_map(mut map: BTreeMap<String, String>) -> Result<Self> {
        let mut take = |k: &str| map.remove(k);

        let mu = take("mu").map(|v| parse_f64("mu", &v)).transpose()?.unwrap_or(1.0);
        let lambda = take("lambda")
            .map(|v| parse_f64("lambda", &v))
            .transpose()?
            .unwrap_or(0.0);
        let moduli = ElasticModuli::new(mu, lambda).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("invalid moduli: {msg}")),
            other => other,
        })?;

        let domain = match take("domain") {
            None => Domain::Disk { radius: 1.0 },
            Some(v) => {
                let (kind, size) = v
                    .split_once(':')
                    .ok_or_else(|| Error::Config(format!("domain `{v}`: expected kind:size")))?;
                let size = parse_f64("domain", size)?;
                if !(size > 0.0) {
                    return Err(Error::Config(format!("domain size must be positive: {size}")));
                }
                match kind {
                    "interval" => Domain::Interval { length: size },
                    "disk" => Domain::Disk { radius: size },
                    "square" => Domain::Square { side: size },
                    _ => {
                        return Err(Error::Config(format!(
                            "unknown domain `{kind}` (expected interval|disk|square)"
                        )))
                    }
                }
            }
        };

        let bc = match take("bc") {
            None => BoundaryCondition::Dirichlet,
            Some(v) => BoundaryCondition::parse(&v)?,
        };

        let method = match take("method").as_deref() {
            None => match domain {
                Domain::Interval { .. } => Method::Exact,
                Domain::Disk { .. } => Method::Dispersion,
                Domain::Square { .. } => Method::Fem,
            },
            Some("exact") => Method::Exact,
            Some("dispersion") => Method::Dispersion,
            Some("fem") => Method::Fem,
            Some("both") => Method::Both,
            Some(v) => {
                return Err(Error::Config(format!(
                    "unknown method `{v}` (expected exact|dispersion|fem|both)"
                )))
            }
        };

        let lambda_max = take("lambda_max")
            .map(|v| parse_f64("lambda_max", &v))
            .transpose()?
            .unwrap_or(400.0);
        let count = match take("count") {
            None => 1000,
            Some(v) => v
                .trim()
                .parse()
                .map_err(|_| Error::Config(format!("count: cannot parse `{v}`")))?,
        };
        let fem_h = take("fem_h").map(|v| parse_f64("fem_h", &v)).transpose()?.unwrap_or(0.1);
        let fem_order = match take("fem_order") {
            None => 2,
            Some(v) => match v.trim() {
                "1" => 1,
                "2" => 2,
                _ => return Err(Error::Config(format!("fem_order must be 1 or 2, got `{v}`"))),
            },
        };
        let fem_count = match take("fem_count") {
            None => 40,
            Some(v) => v
                .trim()
                .parse()
                .map_err(|_| Error::Config(format!("fem_count: cannot parse `{v}`")))?,
        };
        let fem_mesh_in = take("fem_mesh_in");
        let fem_mesh_out = take("fem_mesh_out");

        let t_grid = match take("t_grid") {
            None => TGrid::Auto,
            Some(v) if v == "auto" => TGrid::Auto,
            Some(v) => {
                let parts: Vec<&str> = v.split(',').collect();
                if parts.len() != 3 {
                    return Err(Error::Config(format!(
                        "t_grid `{v}`: expected auto or t_min,t_max,per_decade"
                    )));
                }
                TGrid::Explicit {
                    t_min: parse_f64("t_grid", parts[0])?,
                    t_max: parse_f64("t_grid", parts[1])?,
                    per_decade: parts[2].trim().parse().map_err(|_| {
                        Error::Config(format!("t_grid per_decade: `{}`", parts[2]))
                    })?,
                }
            }
        };

        let lambda_window = match take("lambda_window") {
            None => LambdaWindow::Auto,
            Some(v) if v == "auto" => LambdaWindow::Auto,
            Some(v) => {
                let parts: Vec<&str> = v.split(',').collect();
                if parts.len() != 2 {
                    return Err(Error::Config(format!(
                        "lambda_window `{v}`: expected auto or lo,hi"
                    )));
                }
                LambdaWindow::Explicit {
                    lo: parse_f64("lambda_window", parts[0])?,
                    hi: parse_f64("lambda_window", parts[1])?,
                }
            }
        };

        let sigma_h = match take("sigma_h").as_deref() {
            None | Some("+1") | Some("1") => 1.0,
            Some("-1") => -1.0,
            Some(v) => return Err(Error::Config(format!("sigma_h must be +1 or -1, got `{v}`"))),
        };

        let output_dir = take("output_dir").unwrap_or_else(|| "out".to_string());

        let kernel_diffusivity = take("kernel_diffusivity")
            .map(|v| parse_f64("kernel_diffusivity", &v))
            .transpose()?
            .unwrap_or(1.0);
        let kernel_geometry = take("kernel_geometry").unwrap_or_else(|| {
            "interval:3.141592653589793:dirichlet:dirichlet".to_string()
        });
        let kernel_times = match take("kernel_times") {
            None => vec![0.05, 0.25, 1.0],
            Some(v) => parse_f64_list("kernel_times", &v)?,
        };
        let kernel_samples = match take("kernel_samples") {
            None => 21,
            Some(v) => v
                .trim()
                .parse()
                .map_err(|_| Error::Config(format!("kernel_samples: `{v}`")))?,
        };
        let kernel_window = take("kernel_window")
            .map(|v| parse_f64("kernel_window", &v))
            .transpose()?
            .unwrap_or(1.0);

        let symbol_metric = take("symbol_metric").unwrap_or_else(|| "synthetic:0.1".to_string());
        let symbol_x = match take("symbol_x") {
            None => vec![0.3, -0.2],
            Some(v) => parse_f64_list("symbol_x", &v)?,
        };
        let symbol_xi = match take("symbol_xi") {
            None => vec![1.0, 0.5],
            Some(v) => parse_f64_list("symbol_xi", &v)?,
        };
        let symbol_tau = match take("symbol_tau") {
            None => (-2.0, 1.0),
            Some(v) => {
                let parts = parse_f64_list("symbol_tau", &v)?;
                if parts.len() != 2 {
                    return Err(Error::Config(
                        "symbol_tau: expected re,im".to_string(),
                    ));
                }
                (parts[0], parts[1])
            }
        };
        let symbol_scales = match take("symbol_scales") {
            None => vec![2.0, 1.0 / 3.0],
            Some(v) => parse_f64_list("symbol_scales", &v)?,
        };

        if let Some(unknown) = map.keys().next() {
            return Err(Error::Config(format!("unknown key `{unknown}`")));
        }

        let mut cfg = ExperimentConfig {
            moduli,
            domain,
            bc,
            method,
            lambda_max,
            count,
            fem_h,
            fem_order,
            fem_count,
            fem_mesh_in,
            fem_mesh_out,
            t_grid,
            lambda_window,
            sigma_h,
            output_dir,
            kernel_diffusivity,
            kernel_geometry,
            kernel_times,
            kernel_samples,
            kernel_window,
            symbol_metric,
            symbol_x,
            symbol_xi,
            symbol_tau,
            symbol_scales,
            canonical: String::new(),
        };
        cfg.canonical = cfg.render_canonical();
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<()> {
        if !(self.lambda_max > 0.0) {
            return Err(Error::Config(format!(
                "lambda_max must satisfy lambda_max > 0, got {}",
                self.lambda_max
            )));
        }
        if !(self.fem_h > 0.0) {
            return Err(Error::Config(format!(
                "fem_h must be positive, got {}",
                self.fem_h
            )));
        }
        if self.count == 0 || self.fem_count == 0 {
            return Err(Error::Config("counts must be positive".into()));
        }
        match (self.domain, self.method) {
            (Domain::Interval { .. }, Method::Exact) => {}
            (Domain::Interval { .. }, m) => {
                return Err(Error::Config(format!(
                    "interval domain supports method exact, not {}",
                    m.label()
                )))
            }
            (Domain::Square { .. }, Method::Fem) => {}
            (Domain::Square { .. }, m) => {
                return Err(Error::Config(format!(
                    "square domain supports method fem, not {}",
                    m.label()
                )))
            }
            (Domain::Disk { .. }, _) => {}
        }
        Ok(())
    }

    /// Canonical resolved text: one sorted `key = value` line per field,
    /// defaults included. This is what gets hashed and archived.
    fn render_canonical(&self) -> String {
        let mut pairs: Vec<(String, String)> = vec![
            ("mu".into(), crate::output::fmt_float(self.moduli.mu())),
            ("lambda".into(), crate::output::fmt_float(self.moduli.lambda())),
            ("domain".into(), self.domain.label()),
            ("bc".into(), self.bc.label().to_string()),
            ("method".into(), self.method.label().to_string()),
            ("lambda_max".into(), crate::output::fmt_float(self.lambda_max)),
            ("count".into(), self.count.to_string()),
            ("fem_h".into(), crate::output::fmt_float(self.fem_h)),
            ("fem_order".into(), self.fem_order.to_string()),
            ("fem_count".into(), self.fem_count.to_string()),
            (
                "fem_mesh_in".into(),
                self.fem_mesh_in.clone().unwrap_or_else(|| "none".into()),
            ),
            (
                "fem_mesh_out".into(),
                self.fem_mesh_out.clone().unwrap_or_else(|| "none".into()),
            ),
            (
                "t_grid".into(),
                match self.t_grid {
                    TGrid::Auto => "auto".into(),
                    TGrid::Explicit { t_min, t_max, per_decade } => format!(
                        "{},{},{per_decade}",
                        crate::output::fmt_float(t_min),
                        crate::output::fmt_float(t_max)
                    ),
                },
            ),
            (
                "lambda_window".into(),
                match self.lambda_window {
                    LambdaWindow::Auto => "auto".into(),
                    LambdaWindow::Explicit { lo, hi } => format!(
                        "{},{}",
                        crate::output::fmt_float(lo),
                        crate::output::fmt_float(hi)
                    ),
                },
            ),
            ("sigma_h".into(), if self.sigma_h > 0.0 { "+1".into() } else { "-1".into() }),
            // output_dir is deliberately excluded: the hash identifies the
            // experiment, not where its artifacts land.
            (
                "kernel_diffusivity".into(),
                crate::output::fmt_float(self.kernel_diffusivity),
            ),
            ("kernel_geometry".into(), self.kernel_geometry.clone()),
            (
                "kernel_times".into(),
                self.kernel_times
                    .iter()
                    .map(|v| crate::output::fmt_float(*v))
                    .collect::<Vec<_>>()
                    .join(","),
            ),
            ("kernel_samples".into(), self.kernel_samples.to_string()),
            ("kernel_window".into(), crate::output::fmt_float(self.kernel_window)),
            ("symbol_metric".into(), self.symbol_metric.clone()),
            (
                "symbol_x".into(),
                self.symbol_x
                    .iter()
                    .map(|v| crate::output::fmt_float(*v))
                    .collect::<Vec<_>>()
                    .join(","),
            ),
            (
                "symbol_xi".into(),
                self.symbol_xi
                    .iter()
                    .map(|v| crate::output::fmt_float(*v))
                    .collect::<Vec<_>>()
                    .join(","),
            ),
            (
                "symbol_tau".into(),
                format!(
                    "{},{}",
                    crate::output::fmt_float(self.symbol_tau.0),
                    crate::output::fmt_float(self.symbol_tau.1)
                ),
            ),
            (
                "symbol_scales".into(),
                self.symbol_scales
                    .iter()
                    .map(|v| crate::output::fmt_float(*v))
                    .collect::<Vec<_>>()
                    .join(","),
            ),
        ];
        pairs.sort();
        pairs
            .into_iter()
            .map(|(k, v)| format!("{k} = {v}\n"))
            .collect()
    }

    pub fn canonical_text(&self) -> &str {
        &self.canonical
    }

    /// Replace the moduli (used by the scalar-limit rerun) and refresh the
    /// canonical text so derived artifacts hash the actual inputs.
    pub fn set_moduli(&mut self, moduli: ElasticModuli) {
        self.moduli = moduli;
        self.canonical = self.render_canonical();
    }

    /// Hex SHA-256 of the canonical resolved config (first 16 chars).
    pub fn hash(&self) -> String {
        let mut hasher = Sha256::new();
        hasher.update(self.canonical.as_bytes());
        let digest = hasher.finalize();
        digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }

    /// Convention block recorded in every artifact: the mean-curvature sign
    /// switch and the pinned Fourier sign d/dx <-> +i xi.
    pub fn conventions(&self) -> Json {
        let mut j = Json::object();
        j.push("sigma_h", Json::Float(self.sigma_h));
        j.push("fourier_sign", Json::Str("+i".into()));
        j.push("float_format", Json::Str("%.12e".into()));
        j
    }

    /// Comment prefix lines (config hash + conventions) for CSV artifacts.
    pub fn csv_preamble(&self) -> String {
        format!(
            "# config_hash={}\n# sigma_h={} fourier_sign=+i float_format=%.12e\n",
            self.hash(),
            if self.sigma_h > 0.0 { "+1" } else { "-1" }
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_and_roundtrip_hash() {
        let a = ExperimentConfig::from_text("").unwrap();
        let b = ExperimentConfig::from_text("mu = 1.0\n# comment\n").unwrap();
        assert_eq!(a.hash(), b.hash(), "defaults must hash identically");
        assert_eq!(a.method, Method::Dispersion);
        assert_eq!(a.bc, BoundaryCondition::Dirichlet);
    }

    #[test]
    fn unknown_key_rejected() {
        let r = ExperimentConfig::from_text("muu = 1.0\n");
        assert!(matches!(r, Err(Error::Config(msg)) if msg.contains("muu")));
    }

    #[test]
    fn invalid_moduli_names_constraint() {
        let r = ExperimentConfig::from_text("mu = -1\n");
        match r {
            Err(Error::Config(msg)) => assert!(msg.contains("mu > 0"), "{msg}"),
            other => panic!("expected config error, got {other:?}"),
        }
    }

    #[test]
    fn domain_method_compatibility() {
        assert!(ExperimentConfig::from_text("domain = interval:3.14\nmethod = fem\n").is_err());
        assert!(ExperimentConfig::from_text("domain = square:1\nmethod = dispersion\n").is_err());
        assert!(
            ExperimentConfig::from_text("domain = disk:1\nmethod = both\n").is_ok()
        );
    }

    #[test]
    fn explicit_grids() {
        let c = ExperimentConfig::from_text(
            "t_grid = 1e-3,1e-1,24\nlambda_window = 10,100\nsigma_h = -1\n",
        )
        .unwrap();
        assert_eq!(
            c.t_grid,
            TGrid::Explicit {
                t_min: 1e-3,
                t_max: 1e-1,
                per_decade: 24
            }
        );
        assert_eq!(c.sigma_h, -1.0);
    }
}
