//! Subcommand implementations: each consumes a resolved configuration and
//! writes deterministic artifacts (pinned float format, ordered keys) into
//! the output directory.

use super::config::{Domain, ExperimentConfig, LambdaWindow, Method, TGrid};
use crate::asymptotics::{
    comparison_report, counting_coefficients, default_t_grid, fit_counting_coefficients,
    fit_heat_coefficients_for, heat_coefficients, mckean_singer_reference, partition_function,
    tauberian_forward, CoefficientKind, CoefficientSet, ComparisonReport, CountingFit,
    GeometryData, HeatTraceSeries,
};
use crate::error::{Error, Result};
use crate::exact::{
    certify_elastic_table, elastic_disk_spectrum, scalar_disk_spectrum,
    scalar_interval_spectrum, weyl_certificate, WeylCertificate,
};
use crate::fem::{elastic_fem_spectrum, ElementOrder, FemDomain};
use crate::kernels::{free_kernel, Geometry1D, HeatKernel1D};
use crate::moduli::ElasticModuli;
use crate::output::{fmt_float, Json};
use crate::spectrum::{BoundaryCondition, SpectrumTable};
use crate::symbol::{q4_terms, MetricField, SymbolContext};
use num_complex::Complex64;
use std::fs;
use std::path::{Path, PathBuf};

fn write_artifact(cfg: &ExperimentConfig, name: &str, content: &str) -> Result<PathBuf> {
    let dir = Path::new(&cfg.output_dir);
    fs::create_dir_all(dir)?;
    let path = dir.join(name);
    fs::write(&path, content)?;
    Ok(path)
}

fn write_manifest(cfg: &ExperimentConfig, command: &str, artifacts: &[PathBuf]) -> Result<()> {
    let mut j = Json::object();
    j.push("command", Json::Str(command.to_string()));
    j.push("config_hash", Json::Str(cfg.hash()));
    j.push("conventions", cfg.conventions());
    j.push(
        "resolved_config",
        Json::Array(
            cfg.canonical_text()
                .lines()
                .map(|l| Json::Str(l.to_string()))
                .collect(),
        ),
    );
    j.push(
        "artifacts",
        Json::Array(
            artifacts
                .iter()
                .map(|p| Json::Str(p.file_name().unwrap().to_string_lossy().into_owned()))
                .collect(),
        ),
    );
    write_artifact(cfg, &format!("manifest_{command}.json"), &j.render())?;
    Ok(())
}

fn fem_domain(domain: Domain) -> Result<FemDomain> {
    match domain {
        Domain::Disk { radius } => Ok(FemDomain::Disk { radius }),
        Domain::Square { side } => Ok(FemDomain::Square { side }),
        Domain::Interval { .. } => Err(Error::Config(
            "the finite-element path needs a 2D domain".into(),
        )),
    }
}

fn element_order(cfg: &ExperimentConfig) -> ElementOrder {
    if cfg.fem_order == 1 {
        ElementOrder::Linear
    } else {
        ElementOrder::Quadratic
    }
}

/// The scan-certified table for the configured (domain, method).
fn compute_table(cfg: &ExperimentConfig, method: Method) -> Result<SpectrumTable> {
    match (cfg.domain, method) {
        (Domain::Interval { length }, Method::Exact) => {
            scalar_interval_spectrum(length, cfg.bc, cfg.count)
        }
        (Domain::Disk { radius }, Method::Exact) => {
            scalar_disk_spectrum(radius, cfg.bc, cfg.lambda_max)
        }
        (Domain::Disk { radius }, Method::Dispersion) => {
            elastic_disk_spectrum(&cfg.moduli, radius, cfg.bc, cfg.lambda_max)
        }
        (domain, Method::Fem) => {
            if let Some(path) = &cfg.fem_mesh_in {
                // Ingest a mesh file and solve on it directly; without a
                // refinement companion the certification edge is the last
                // returned eigenvalue.
                let text = fs::read_to_string(path).map_err(|e| {
                    Error::Config(format!("cannot read mesh file {path}: {e}"))
                })?;
                let mesh = crate::fem::Mesh::from_text(&text)?;
                let problem = crate::fem::assemble(&cfg.moduli, &mesh, cfg.bc)?;
                let count = cfg.fem_count.min(problem.dof_map.len());
                return crate::fem::solve_eigen(&problem, count);
            }
            let mesh = fem_domain(domain)?.mesh(cfg.fem_h, element_order(cfg))?;
            if let Some(path) = &cfg.fem_mesh_out {
                fs::write(path, mesh.to_text())?;
            }
            let spec = elastic_fem_spectrum(
                &cfg.moduli,
                fem_domain(domain)?,
                cfg.bc,
                cfg.fem_h,
                element_order(cfg),
                cfg.fem_count,
            )?;
            Ok(spec.table)
        }
        (d, m) => Err(Error::Config(format!(
            "method {} is not available on domain {}",
            m.label(),
            d.label()
        ))),
    }
}

fn cert_json(cert: &WeylCertificate) -> Json {
    let mut j = Json::object();
    j.push("lambda_edge", Json::Float(cert.lambda_edge));
    j.push("count", Json::Int(cert.count as i64));
    j.push("one_term_prediction", Json::Float(cert.one_term));
    j.push("two_term_prediction", Json::Float(cert.two_term));
    j.push("band", Json::Float(cert.band));
    j.push("one_term_deviation", Json::Float(cert.one_term_deviation));
    j.push("passed", Json::Bool(cert.passed));
    j
}

fn certification_record(cfg: &ExperimentConfig, table: &SpectrumTable) -> Result<Json> {
    match (cfg.domain, table.source()) {
        (Domain::Disk { radius }, crate::spectrum::SpectrumSource::Dispersion) => {
            Ok(cert_json(&certify_elastic_table(&cfg.moduli, radius, table)?))
        }
        (Domain::Disk { radius }, crate::spectrum::SpectrumSource::Exact) => {
            let area = std::f64::consts::PI * radius * radius;
            let lead = area / (4.0 * std::f64::consts::PI);
            let second = radius / 2.0;
            Ok(cert_json(&weyl_certificate(table, 2, lead, second)))
        }
        _ => {
            // Exact interval tables are complete by construction; FEM tables
            // carry a refinement-based edge instead.
            let mut j = Json::object();
            j.push("lambda_edge", Json::Float(table.max_reliable()));
            j.push("count", Json::Int(table.total_multiplicity() as i64));
            j.push("passed", Json::Bool(true));
            Ok(j)
        }
    }
}

pub fn run_spectrum(cfg: &ExperimentConfig) -> Result<Vec<PathBuf>> {
    let mut artifacts = Vec::new();
    let methods: Vec<Method> = match cfg.method {
        Method::Both => vec![Method::Dispersion, Method::Fem],
        m => vec![m],
    };
    let mut tables = Vec::new();
    for m in &methods {
        let table = compute_table(cfg, *m)?;
        let csv = format!("{}{}", cfg.csv_preamble(), table.to_csv());
        artifacts.push(write_artifact(
            cfg,
            &format!("spectrum_{}.csv", m.label()),
            &csv,
        )?);
        artifacts.push(write_artifact(
            cfg,
            &format!("spectrum_{}.json", m.label()),
            &table.to_json_summary(),
        )?);
        let cert = certification_record(cfg, &table)?;
        let mut rec = Json::object();
        rec.push("config_hash", Json::Str(cfg.hash()));
        rec.push("conventions", cfg.conventions());
        rec.push("method", Json::Str(m.label().to_string()));
        rec.push("certificate", cert);
        artifacts.push(write_artifact(
            cfg,
            &format!("certification_{}.json", m.label()),
            &rec.render(),
        )?);
        tables.push(table);
    }
    if tables.len() == 2 {
        // Per-index relative difference between the two routes, over the
        // overlap both tables certify.
        let a = tables[0].flattened();
        let b = tables[1].flattened();
        let edge = tables[0].max_reliable().min(tables[1].max_reliable());
        let mut out = cfg.csv_preamble();
        out.push_str("index,dispersion,fem,rel_diff\n");
        for k in 0..a.len().min(b.len()) {
            if a[k] > edge || b[k] > edge {
                break;
            }
            let denom = a[k].abs().max(1e-300);
            let rel = if a[k] == 0.0 && b[k] == 0.0 {
                0.0
            } else {
                (a[k] - b[k]).abs() / denom
            };
            out.push_str(&format!(
                "{k},{},{},{}\n",
                fmt_float(a[k]),
                fmt_float(b[k]),
                fmt_float(rel)
            ));
        }
        artifacts.push(write_artifact(cfg, "spectrum_cross_difference.csv", &out)?);
    }
    write_manifest(cfg, "spectrum", &artifacts)?;
    Ok(artifacts)
}

fn parse_kernel_geometry(spec: &str) -> Result<Geometry1D> {
    let parts: Vec<&str> = spec.split(':').collect();
    match parts.as_slice() {
        ["line"] => Ok(Geometry1D::Line),
        ["halfline", bc] => Ok(Geometry1D::HalfLine(BoundaryCondition::parse(bc)?)),
        ["interval", len, left, right] => Ok(Geometry1D::Interval {
            length: len
                .parse()
                .map_err(|_| Error::Config(format!("bad interval length `{len}`")))?,
            left: BoundaryCondition::parse(left)?,
            right: BoundaryCondition::parse(right)?,
        }),
        _ => Err(Error::Config(format!(
            "kernel_geometry `{spec}`: expected line | halfline:<bc> | interval:<L>:<bc>:<bc>"
        ))),
    }
}

pub fn run_kernel(cfg: &ExperimentConfig) -> Result<Vec<PathBuf>> {
    let geometry = parse_kernel_geometry(&cfg.kernel_geometry)?;
    let kernel = HeatKernel1D::new(cfg.kernel_diffusivity, geometry)?;
    let span = match geometry {
        Geometry1D::Interval { length, .. } => length,
        _ => cfg.kernel_window,
    };
    let n = cfg.kernel_samples.max(2);
    let mut values = cfg.csv_preamble();
    values.push_str("t,x,y,value\n");
    for &t in &cfg.kernel_times {
        for i in 0..n {
            let x = span * i as f64 / (n - 1) as f64;
            for j in 0..n {
                let y = span * j as f64 / (n - 1) as f64;
                let v = match geometry {
                    Geometry1D::Line => free_kernel(cfg.kernel_diffusivity, t, x, y),
                    _ => kernel.evaluate(t, x, y)?,
                };
                values.push_str(&format!(
                    "{},{},{},{}\n",
                    fmt_float(t),
                    fmt_float(x),
                    fmt_float(y),
                    fmt_float(v)
                ));
            }
        }
    }
    let mut artifacts = vec![write_artifact(cfg, "kernel_values.csv", &values)?];

    let mut trace = cfg.csv_preamble();
    match geometry {
        Geometry1D::Interval { .. } => {
            trace.push_str("t,trace\n");
            for &t in &cfg.kernel_times {
                trace.push_str(&format!("{},{}\n", fmt_float(t), fmt_float(kernel.trace(t)?)));
            }
        }
        Geometry1D::HalfLine(_) => {
            trace.push_str("t,window_trace,boundary_defect\n");
            for &t in &cfg.kernel_times {
                let w = kernel.window_trace(t, cfg.kernel_window)?;
                let bulk = cfg.kernel_window
                    / (4.0 * std::f64::consts::PI * cfg.kernel_diffusivity * t).sqrt();
                trace.push_str(&format!(
                    "{},{},{}\n",
                    fmt_float(t),
                    fmt_float(w),
                    fmt_float(w - bulk)
                ));
            }
        }
        Geometry1D::Line => {
            trace.push_str("t,diagonal_value\n");
            for &t in &cfg.kernel_times {
                trace.push_str(&format!(
                    "{},{}\n",
                    fmt_float(t),
                    fmt_float(free_kernel(cfg.kernel_diffusivity, t, 0.0, 0.0))
                ));
            }
        }
    }
    artifacts.push(write_artifact(cfg, "kernel_trace.csv", &trace)?);
    write_manifest(cfg, "kernel", &artifacts)?;
    Ok(artifacts)
}

fn parse_metric(cfg: &ExperimentConfig, dim: usize) -> Result<MetricField> {
    let parts: Vec<&str> = cfg.symbol_metric.split(':').collect();
    match parts.as_slice() {
        ["flat"] => Ok(MetricField::flat(dim)),
        ["synthetic", eps] => Ok(MetricField::synthetic(
            dim,
            eps.parse()
                .map_err(|_| Error::Config(format!("bad synthetic epsilon `{eps}`")))?,
        )),
        _ => Err(Error::Config(format!(
            "symbol_metric `{}`: expected flat | synthetic:<eps>",
            cfg.symbol_metric
        ))),
    }
}

pub fn run_symbol(cfg: &ExperimentConfig) -> Result<Vec<PathBuf>> {
    let dim = cfg.symbol_x.len();
    if cfg.symbol_xi.len() != dim {
        return Err(Error::Config(
            "symbol_x and symbol_xi must have matching dimension".into(),
        ));
    }
    let metric = parse_metric(cfg, dim)?;
    let ctx = SymbolContext::new(cfg.moduli, metric);
    let tau = Complex64::new(cfg.symbol_tau.0, cfg.symbol_tau.1);
    let x = &cfg.symbol_x;
    let xi = &cfg.symbol_xi;

    let mut j = Json::object();
    j.push("config_hash", Json::Str(cfg.hash()));
    j.push("conventions", cfg.conventions());
    let mut inputs = Json::object();
    inputs.push("metric", Json::Str(cfg.symbol_metric.clone()));
    inputs.push("x", Json::floats(x));
    inputs.push("xi", Json::floats(xi));
    inputs.push("tau_re", Json::Float(tau.re));
    inputs.push("tau_im", Json::Float(tau.im));
    inputs.push("mu", Json::Float(cfg.moduli.mu()));
    inputs.push("lambda", Json::Float(cfg.moduli.lambda()));
    j.push("inputs", inputs);

    // Term-by-term q_{-4} enumeration (the audited admissible index set).
    let terms = q4_terms(dim);
    j.push(
        "q4_terms",
        Json::Array(
            terms
                .iter()
                .map(|t| {
                    let mut o = Json::object();
                    o.push("j", Json::Int(t.j as i64));
                    o.push("k", Json::Int(t.k as i64));
                    o.push(
                        "alpha",
                        Json::Array(t.alpha.iter().map(|&a| Json::Int(a as i64)).collect()),
                    );
                    o.push("term", Json::Str(t.description.clone()));
                    o
                })
                .collect(),
        ),
    );

    // Parity residuals.
    let xi_neg: Vec<f64> = xi.iter().map(|v| -v).collect();
    let q3p = ctx.q_minus_3(x, xi, tau)?;
    let q3m = ctx.q_minus_3(x, &xi_neg, tau)?;
    let q4p = ctx.q_minus_4(x, xi, tau)?;
    let q4m = ctx.q_minus_4(x, &xi_neg, tau)?;
    let mut parity = Json::object();
    parity.push(
        "q3_trace_odd_residual",
        Json::Float((q3p.trace() + q3m.trace()).norm()),
    );
    parity.push(
        "q4_trace_even_residual",
        Json::Float((q4p.trace() - q4m.trace()).norm()),
    );
    j.push("parity_residuals", parity);

    // Homogeneity residuals across the configured scale sweep.
    let mut homog = Vec::new();
    for (sym, name) in [
        (ctx.resolvent_symbol(), "q_minus_2"),
        (ctx.q3_symbol(), "q_minus_3"),
        (ctx.q4_symbol(), "q_minus_4"),
    ] {
        for &s in &cfg.symbol_scales {
            let r = sym.homogeneity_residual(x, xi, tau, s)?;
            let mut o = Json::object();
            o.push("symbol", Json::Str(name.to_string()));
            o.push("order", Json::Int(sym.order as i64));
            o.push("scale", Json::Float(s));
            o.push("residual", Json::Float(r));
            homog.push(o);
        }
    }
    j.push("homogeneity_residuals", Json::Array(homog));

    // The resolvent trace with its pole decomposition, for reference.
    let q2 = ctx.resolvent_principal(x, xi, tau)?;
    let mut q2j = Json::object();
    q2j.push("trace_re", Json::Float(q2.trace().re));
    q2j.push("trace_im", Json::Float(q2.trace().im));
    j.push("resolvent_principal", q2j);

    let artifacts = vec![write_artifact(cfg, "symbol_report.json", &j.render())?];
    write_manifest(cfg, "symbol", &artifacts)?;
    Ok(artifacts)
}

fn coefficient_json(label: &str, c: &CoefficientSet) -> Json {
    let mut j = Json::object();
    j.push("label", Json::Str(label.to_string()));
    j.push("kind", Json::Str(c.kind.label().to_string()));
    j.push("bc", Json::Str(c.bc.label().to_string()));
    j.push("a0", Json::Float(c.a0));
    j.push("a1", Json::Float(c.a1));
    j.push("a2", Json::Float(c.a2));
    match c.uncertainty {
        Some(u) => j.push("uncertainty", Json::floats(&u)),
        None => j.push("uncertainty", Json::Null),
    };
    j
}

fn coefficients_csv_row(label: &str, c: &CoefficientSet) -> String {
    let u = c.uncertainty.unwrap_or([0.0; 3]);
    format!(
        "{label},{},{},{},{},{},{},{},{}\n",
        c.kind.label(),
        c.bc.label(),
        fmt_float(c.a0),
        fmt_float(c.a1),
        fmt_float(c.a2),
        fmt_float(u[0]),
        fmt_float(u[1]),
        fmt_float(u[2])
    )
}

fn comparisons_csv_rows(block: &str, rep: &ComparisonReport) -> String {
    let mut out = String::new();
    for r in &rep.rows {
        out.push_str(&format!(
            "{block},{},{},{},{},{},{},{}\n",
            r.name,
            fmt_float(r.theoretical),
            fmt_float(r.fitted),
            fmt_float(r.abs_discrepancy),
            fmt_float(r.rel_discrepancy),
            match r.uncertainty {
                Some(u) => fmt_float(u),
                None => "".to_string(),
            },
            r.verdict.label()
        ));
    }
    out
}

/// Geometry data for the configured domain with the configured sigma_H.
fn geometry_for(cfg: &ExperimentConfig) -> Result<GeometryData> {
    let g = match cfg.domain {
        Domain::Interval { length } => GeometryData::interval(length),
        Domain::Disk { radius } => GeometryData::disk(radius),
        Domain::Square { side } => GeometryData::square(side),
    };
    g.with_sigma_h(cfg.sigma_h)
}

/// Theoretical heat/counting sets for the pipeline. For the scalar disk the
/// reference constants are the scalar ones; elsewhere the two-speed
/// evaluators apply.
fn theoretical_sets(
    cfg: &ExperimentConfig,
    method: Method,
) -> Result<(CoefficientSet, CoefficientSet)> {
    let geom = geometry_for(cfg)?;
    if cfg.domain.dimension() == 1 && (cfg.moduli.p_speed_sq() - 1.0).abs() > 1e-12 {
        return Err(Error::Config(
            "interval experiments are scalar: choose moduli with 2*mu + lambda = 1".into(),
        ));
    }
    if matches!(cfg.domain, Domain::Disk { .. }) && method == Method::Exact {
        // Scalar disk: reference constants per unit component.
        let ((a0, a1_mag, a2), _) = mckean_singer_reference(&geom)?;
        let sign = match cfg.bc {
            BoundaryCondition::Dirichlet => 1.0,
            BoundaryCondition::Neumann => -1.0,
        };
        let heat = CoefficientSet {
            a0,
            a1: sign * a1_mag,
            a2,
            bc: cfg.bc,
            kind: CoefficientKind::TheoreticalHeat,
            uncertainty: None,
        };
        let counting = CoefficientSet {
            a0: heat.a0 / crate::special::gamma_half(4)?,
            a1: heat.a1 / crate::special::gamma_half(3)?,
            a2: 0.0,
            bc: cfg.bc,
            kind: CoefficientKind::TheoreticalCounting,
            uncertainty: None,
        };
        Ok((heat, counting))
    } else {
        Ok((
            heat_coefficients(&cfg.moduli, &geom, cfg.bc)?,
            counting_coefficients(&cfg.moduli, &geom, cfg.bc)?,
        ))
    }
}

fn build_series(
    cfg: &ExperimentConfig,
    table: &SpectrumTable,
    n: u32,
    heat_th: &CoefficientSet,
) -> Result<HeatTraceSeries> {
    let grid = match cfg.t_grid {
        TGrid::Auto => default_t_grid(table, n, heat_th.a0.abs(), heat_th.a1)?,
        TGrid::Explicit { t_min, t_max, per_decade } => {
            if !(t_min > 0.0 && t_max > t_min) {
                return Err(Error::Config("empty or invalid t grid".into()));
            }
            let decades = (t_max / t_min).log10();
            let n_pts = (decades * per_decade as f64).ceil() as usize + 1;
            let ratio = (t_max / t_min).powf(1.0 / (n_pts - 1) as f64);
            (0..n_pts).map(|i| t_min * ratio.powi(i as i32)).collect()
        }
    };
    partition_function(table, &grid, n)
}

fn counting_window(cfg: &ExperimentConfig, table: &SpectrumTable, n: u32) -> Result<(f64, f64)> {
    match cfg.lambda_window {
        LambdaWindow::Explicit { lo, hi } => Ok((lo, hi)),
        LambdaWindow::Auto => {
            let hi = table.max_reliable() * 0.90;
            let ratio = if n == 1 { 1.0e4 } else { 16.0 };
            let lo_floor = table
                .entries()
                .iter()
                .find(|e| e.eigenvalue > 0.0)
                .map(|e| e.eigenvalue)
                .unwrap_or(1.0);
            Ok(((hi / ratio).max(lo_floor * 2.0), hi))
        }
    }
}

struct VerifyBlock {
    table: SpectrumTable,
    heat_th: CoefficientSet,
    counting_th: CoefficientSet,
    heat_fit: CoefficientSet,
    counting_fit: CountingFit,
    heat_rep: ComparisonReport,
    counting_rep: ComparisonReport,
    series: HeatTraceSeries,
    tauberian: HeatTraceSeries,
    lambda_window: (f64, f64),
}

fn verify_block(
    cfg: &ExperimentConfig,
    method: Method,
    moduli_override: Option<ElasticModuli>,
) -> Result<VerifyBlock> {
    let mut local = cfg.clone();
    if let Some(m) = moduli_override {
        local.set_moduli(m);
    }
    let n = local.domain.dimension();
    let table = compute_table(&local, method)?;
    let (heat_th, counting_th) = theoretical_sets(&local, method)?;
    let series = build_series(&local, &table, n, &heat_th)?;
    let num_terms = if n == 1 { 2 } else { 3 };
    let heat_fit = fit_heat_coefficients_for(&series, &table, num_terms)?;
    let window = counting_window(&local, &table, n)?;
    let counting_fit = fit_counting_coefficients(&table, n, window)?;
    let heat_rep = comparison_report(&heat_th, &heat_fit, num_terms)?;
    // Verdicts judge the raw counting fit: the Cesaro-smoothed variant is a
    // lower-variance display estimate but carries a small systematic bias
    // that its least-squares covariance does not represent.
    let counting_rep = comparison_report(&counting_th, &counting_fit.raw, 2)?;
    let tauberian = tauberian_forward(&counting_fit.smoothed, n, &series.t)?;
    Ok(VerifyBlock {
        table,
        heat_th,
        counting_th,
        heat_fit,
        counting_fit,
        heat_rep,
        counting_rep,
        series,
        tauberian,
        lambda_window: window,
    })
}

fn block_json(cfg: &ExperimentConfig, b: &VerifyBlock) -> Result<Json> {
    let mut j = Json::object();
    j.push("theoretical_heat", coefficient_json("theoretical_heat", &b.heat_th));
    // Both sigma_H variants of a2 are part of the bundle schema.
    let geom_plus = geometry_for(cfg)?.with_sigma_h(1.0)?;
    let geom_minus = geometry_for(cfg)?.with_sigma_h(-1.0)?;
    let a2_plus = heat_coefficients(&cfg.moduli, &geom_plus, cfg.bc)?.a2;
    let a2_minus = heat_coefficients(&cfg.moduli, &geom_minus, cfg.bc)?.a2;
    let mut variants = Json::object();
    variants.push("sigma_h_plus", Json::Float(a2_plus));
    variants.push("sigma_h_minus", Json::Float(a2_minus));
    j.push("a2_sigma_h_variants", variants);
    j.push(
        "theoretical_counting",
        coefficient_json("theoretical_counting", &b.counting_th),
    );
    j.push("fitted_heat", coefficient_json("fitted_heat", &b.heat_fit));
    j.push(
        "fitted_counting_raw",
        coefficient_json("fitted_counting_raw", &b.counting_fit.raw),
    );
    j.push(
        "fitted_counting_smoothed",
        coefficient_json("fitted_counting_smoothed", &b.counting_fit.smoothed),
    );
    let mut grid = Json::object();
    grid.push("t_min", Json::Float(*b.series.t.first().unwrap()));
    grid.push("t_max", Json::Float(*b.series.t.last().unwrap()));
    grid.push("points", Json::Int(b.series.t.len() as i64));
    grid.push("lambda_window_lo", Json::Float(b.lambda_window.0));
    grid.push("lambda_window_hi", Json::Float(b.lambda_window.1));
    j.push("grids", grid);
    j.push("heat_comparison", b.heat_rep.to_json());
    j.push("counting_comparison", b.counting_rep.to_json());
    Ok(j)
}

pub fn run_verify(cfg: &ExperimentConfig) -> Result<Vec<PathBuf>> {
    let method = match cfg.method {
        Method::Both => Method::Dispersion,
        m => m,
    };
    let main = verify_block(cfg, method, None)?;
    let n = cfg.domain.dimension();

    let mut bundle = Json::object();
    bundle.push("config_hash", Json::Str(cfg.hash()));
    bundle.push("conventions", cfg.conventions());
    let mut inputs = Json::object();
    inputs.push("mu", Json::Float(cfg.moduli.mu()));
    inputs.push("lambda", Json::Float(cfg.moduli.lambda()));
    inputs.push("domain", Json::Str(cfg.domain.label()));
    inputs.push("bc", Json::Str(cfg.bc.label().to_string()));
    inputs.push("method", Json::Str(method.label().to_string()));
    inputs.push("n_dim", Json::Int(n as i64));
    let geom = geometry_for(cfg)?;
    let mut gj = Json::object();
    gj.push("vol_omega", Json::Float(geom.vol_omega));
    gj.push("vol_boundary", Json::Float(geom.vol_boundary));
    gj.push("integral_r", Json::Float(geom.integral_r));
    gj.push("integral_h", Json::Float(geom.integral_h));
    inputs.push("geometry", gj);
    inputs.push("corner_caveat", Json::Bool(geom.corner_caveat));
    bundle.push("inputs", inputs);
    bundle.push("main", block_json(cfg, &main)?);

    // Scalar-limit chain for the elastic disk: rerun at lambda = -mu and
    // compare against the decoupled theoretical values. Clamped only: at
    // lambda = -mu the traction-free energy form annihilates every
    // holomorphic displacement field, so that problem degenerates and the
    // decoupled comparison is meaningless.
    let scalar_limit = if matches!(cfg.domain, Domain::Disk { .. })
        && method == Method::Dispersion
        && cfg.bc == BoundaryCondition::Dirichlet
        && !cfg.moduli.is_scalar_limit()
    {
        let m = ElasticModuli::new(cfg.moduli.mu(), -cfg.moduli.mu())?;
        let block = verify_block(cfg, method, Some(m))?;
        Some(block)
    } else {
        None
    };
    if let Some(b) = &scalar_limit {
        let mut sl = Json::object();
        sl.push("lambda", Json::Float(-cfg.moduli.mu()));
        sl.push("block", block_json(cfg, b)?);
        bundle.push("scalar_limit", sl);
    }

    let mut artifacts = vec![write_artifact(cfg, "verify_bundle.json", &bundle.render())?];

    // CSV artifacts.
    let mut heat_csv = cfg.csv_preamble();
    heat_csv.push_str(&format!("# n_dim={n}\n"));
    heat_csv.push_str("t,z,tail_bound,usable\n");
    for k in 0..main.series.t.len() {
        heat_csv.push_str(&format!(
            "{},{},{},{}\n",
            fmt_float(main.series.t[k]),
            fmt_float(main.series.z[k]),
            fmt_float(main.series.tail_bound[k]),
            if main.series.usable[k] { 1 } else { 0 }
        ));
    }
    artifacts.push(write_artifact(cfg, "heat_series.csv", &heat_csv)?);

    let table = &main.table;
    let mut counting_csv = cfg.csv_preamble();
    counting_csv.push_str(&format!("# n_dim={n}\n"));
    counting_csv.push_str("lambda,count,count_smoothed\n");
    let (lo, hi) = main.lambda_window;
    let pts = 200usize;
    let flat = table.flattened();
    let count_leq = |x: f64| -> f64 { flat.partition_point(|&v| v <= x) as f64 };
    for i in 0..pts {
        let l = lo * (hi / lo).powf(i as f64 / (pts - 1) as f64);
        let half_w = (l / 8.0).min(table.max_reliable() - l).min(l);
        let k = 32;
        let mut acc = 0.0;
        for jj in 0..k {
            let s = (l - half_w) + 2.0 * half_w * (jj as f64 + 0.5) / k as f64;
            acc += count_leq(s);
        }
        counting_csv.push_str(&format!(
            "{},{},{}\n",
            fmt_float(l),
            fmt_float(count_leq(l)),
            fmt_float(acc / k as f64)
        ));
    }
    artifacts.push(write_artifact(cfg, "counting.csv", &counting_csv)?);

    let mut coeff_csv = cfg.csv_preamble();
    coeff_csv.push_str(&format!("# n_dim={n}\n"));
    coeff_csv.push_str("label,kind,bc,a0,a1,a2,u0,u1,u2\n");
    coeff_csv.push_str(&coefficients_csv_row("theoretical_heat", &main.heat_th));
    coeff_csv.push_str(&coefficients_csv_row("theoretical_counting", &main.counting_th));
    coeff_csv.push_str(&coefficients_csv_row("fitted_heat", &main.heat_fit));
    coeff_csv.push_str(&coefficients_csv_row("fitted_counting_raw", &main.counting_fit.raw));
    coeff_csv.push_str(&coefficients_csv_row(
        "fitted_counting_smoothed",
        &main.counting_fit.smoothed,
    ));
    if let Some(b) = &scalar_limit {
        coeff_csv.push_str(&coefficients_csv_row("scalar_limit_theoretical_heat", &b.heat_th));
        coeff_csv.push_str(&coefficients_csv_row("scalar_limit_fitted_heat", &b.heat_fit));
    }
    artifacts.push(write_artifact(cfg, "coefficients.csv", &coeff_csv)?);

    let mut comp_csv = cfg.csv_preamble();
    comp_csv.push_str("block,coefficient,theoretical,fitted,abs_discrepancy,rel_discrepancy,uncertainty,verdict\n");
    comp_csv.push_str(&comparisons_csv_rows("heat", &main.heat_rep));
    comp_csv.push_str(&comparisons_csv_rows("counting", &main.counting_rep));
    if let Some(b) = &scalar_limit {
        comp_csv.push_str(&comparisons_csv_rows("scalar_limit_heat", &b.heat_rep));
        comp_csv.push_str(&comparisons_csv_rows("scalar_limit_counting", &b.counting_rep));
    }
    artifacts.push(write_artifact(cfg, "comparisons.csv", &comp_csv)?);

    let mut taub_csv = cfg.csv_preamble();
    taub_csv.push_str("t,z_counting_model,z_table\n");
    for k in 0..main.tauberian.t.len() {
        taub_csv.push_str(&format!(
            "{},{},{}\n",
            fmt_float(main.tauberian.t[k]),
            fmt_float(main.tauberian.z[k]),
            fmt_float(main.series.z[k])
        ));
    }
    artifacts.push(write_artifact(cfg, "tauberian.csv", &taub_csv)?);

    write_manifest(cfg, "verify", &artifacts)?;
    Ok(artifacts)
}

/// Read a CSV artifact back, returning (comment preamble, header, rows).
fn read_csv(path: &Path) -> Result<(Vec<String>, String, Vec<Vec<String>>)> {
    let text = fs::read_to_string(path)
        .map_err(|_| Error::Config(format!("missing input `{}`; run verify first", path.display())))?;
    let mut comments = Vec::new();
    let mut header = String::new();
    let mut rows = Vec::new();
    for line in text.lines() {
        if line.starts_with('#') {
            comments.push(line.to_string());
        } else if header.is_empty() {
            header = line.to_string();
        } else if !line.trim().is_empty() {
            rows.push(line.split(',').map(|s| s.to_string()).collect());
        }
    }
    Ok((comments, header, rows))
}

fn parse_comment_n_dim(comments: &[String]) -> Result<u32> {
    for c in comments {
        if let Some(v) = c.trim().strip_prefix("# n_dim=") {
            return v
                .parse()
                .map_err(|_| Error::Config(format!("bad n_dim comment `{c}`")));
        }
    }
    Err(Error::Config("artifact lacks the n_dim comment".into()))
}

fn coefficients_from_csv(
    rows: &[Vec<String>],
    label: &str,
) -> Result<(f64, f64, f64)> {
    for r in rows {
        if r[0] == label {
            let p = |s: &str| -> Result<f64> {
                s.parse()
                    .map_err(|_| Error::Config(format!("bad float `{s}` in coefficients.csv")))
            };
            return Ok((p(&r[3])?, p(&r[4])?, p(&r[5])?));
        }
    }
    Err(Error::Config(format!(
        "coefficients.csv has no `{label}` row"
    )))
}

pub fn run_plotdata(cfg: &ExperimentConfig) -> Result<Vec<PathBuf>> {
    let dir = Path::new(&cfg.output_dir);
    let (hc, _, heat_rows) = read_csv(&dir.join("heat_series.csv"))?;
    let n = parse_comment_n_dim(&hc)?;
    let (_, _, coeff_rows) = read_csv(&dir.join("coefficients.csv"))?;
    let (f0, f1, f2) = coefficients_from_csv(&coeff_rows, "fitted_heat")?;
    let (t0, t1, t2) = coefficients_from_csv(&coeff_rows, "theoretical_heat")?;

    let mut plot_heat = cfg.csv_preamble();
    plot_heat.push_str("t,scaled_z,fitted_overlay,theoretical_overlay\n");
    for r in &heat_rows {
        let t: f64 = r[0].parse().map_err(|_| Error::Config("bad t".into()))?;
        let z: f64 = r[1].parse().map_err(|_| Error::Config("bad z".into()))?;
        let y = t.powf(n as f64 / 2.0) * z;
        let fit = f0 + f1 * t.sqrt() + f2 * t;
        let th = t0 + t1 * t.sqrt() + t2 * t;
        plot_heat.push_str(&format!(
            "{},{},{},{}\n",
            fmt_float(t),
            fmt_float(y),
            fmt_float(fit),
            fmt_float(th)
        ));
    }
    let mut artifacts = vec![write_artifact(cfg, "plot_heat.csv", &plot_heat)?];

    let (cc, _, count_rows) = read_csv(&dir.join("counting.csv"))?;
    if count_rows.is_empty() {
        return Err(Error::Config("counting.csv has an empty window".into()));
    }
    let n2 = parse_comment_n_dim(&cc)?;
    // The remainder scaling uses the raw fitted leading term: any bias eps
    // in the leading coefficient drifts the remainder by eps Lambda^{n/2},
    // and the raw least-squares estimate is unbiased while the smoothed one
    // carries a small systematic.
    let (cf0, _, _) = coefficients_from_csv(&coeff_rows, "fitted_counting_raw")?;
    let (_, cf1, _) = coefficients_from_csv(&coeff_rows, "fitted_counting_smoothed")?;
    let (_ct0, ct1, _) = coefficients_from_csv(&coeff_rows, "theoretical_counting")?;
    let mut plot_counting = cfg.csv_preamble();
    plot_counting.push_str(
        "lambda,remainder,remainder_smoothed,fitted_second,theoretical_second\n",
    );
    for r in &count_rows {
        let l: f64 = r[0].parse().map_err(|_| Error::Config("bad lambda".into()))?;
        let nn: f64 = r[1].parse().map_err(|_| Error::Config("bad count".into()))?;
        let ns: f64 = r[2].parse().map_err(|_| Error::Config("bad smoothed".into()))?;
        let lead = cf0 * l.powf(n2 as f64 / 2.0);
        let scale = l.powf((n2 as f64 - 1.0) / 2.0);
        plot_counting.push_str(&format!(
            "{},{},{},{},{}\n",
            fmt_float(l),
            fmt_float((nn - lead) / scale),
            fmt_float((ns - lead) / scale),
            fmt_float(cf1),
            fmt_float(ct1)
        ));
    }
    artifacts.push(write_artifact(cfg, "plot_counting.csv", &plot_counting)?);
    write_manifest(cfg, "plotdata", &artifacts)?;
    Ok(artifacts)
}

pub fn run_report(cfg: &ExperimentConfig) -> Result<String> {
    let dir = Path::new(&cfg.output_dir);
    let (_, _, coeff_rows) = read_csv(&dir.join("coefficients.csv"))?;
    let (comments, _, comp_rows) = read_csv(&dir.join("comparisons.csv"))?;
    let mut out = String::new();
    out.push_str("experiment report\n");
    for c in &comments {
        out.push_str(c);
        out.push('\n');
    }
    out.push_str("\ncoefficients:\n");
    out.push_str(&format!(
        "  {:<28} {:>10} {:>20} {:>20} {:>20}\n",
        "label", "bc", "a0", "a1", "a2"
    ));
    for r in &coeff_rows {
        out.push_str(&format!(
            "  {:<28} {:>10} {:>20} {:>20} {:>20}\n",
            r[0], r[2], r[3], r[4], r[5]
        ));
    }
    out.push_str("\ncomparisons (theory vs fit, 3-sigma verdicts):\n");
    out.push_str(&format!(
        "  {:<22} {:>4} {:>20} {:>20} {:>14} {:>14}\n",
        "block", "coef", "theoretical", "fitted", "rel_disc", "verdict"
    ));
    for r in &comp_rows {
        out.push_str(&format!(
            "  {:<22} {:>4} {:>20} {:>20} {:>14} {:>14}\n",
            r[0], r[1], r[2], r[3], r[5], r[7]
        ));
    }
    Ok(out)
}
