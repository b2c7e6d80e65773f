use std::collections::BTreeMap;
use std::io::Write;

use serde::Serialize;
use serde_json::{json, Value};

use nccause_core::common_cause::{commutator_norms, grid_spacing, residual_closed_form, search_common_causes};
use nccause_core::geometry::{past_region, region_a, region_b, region_c, supported_in, PastKind, RegionGeom};
use nccause_core::oracle::rep_element;
use nccause_core::scenario::{ch_closed_form, chsh_closed_form};
use nccause_core::verify;
use nccause_core::{AlgebraElement, Scenario};

use crate::config::{Cli, Command, Format, RunConfig, Suite};
use crate::CliError;

const SWEEP_POINTS: usize = 101;
const SEARCH_GRID: usize = 40;
const PROP1_GRID: usize = 20;

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Correlations(c) => correlations(&c.resolve(false)?),
        Command::Bell(c) => bell(&c.resolve(false)?),
        Command::SweepLambda(c) => sweep_lambda(&c.resolve(false)?),
        Command::Verify { which, common } => verify_suite(which, &common.resolve(false)?),
        Command::Search { a3b3_nonzero, common } => search(&common.resolve(a3b3_nonzero)?),
    }
}

fn emit(cfg: &RunConfig, bytes: &[u8]) -> Result<(), CliError> {
    match &cfg.out {
        Some(path) => std::fs::write(path, bytes).map_err(|e| CliError::Config(format!("{}: {e}", path.display()))),
        None => std::io::stdout().write_all(bytes).map_err(|e| CliError::Config(e.to_string())),
    }
}

fn emit_json(cfg: &RunConfig, value: &impl Serialize) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).expect("serializable report");
    text.push('\n');
    emit(cfg, text.as_bytes())
}

/// Seventeen significant digits.
fn num(x: f64) -> String {
    format!("{:.16e}", x + 0.0)
}

fn emit_csv(cfg: &RunConfig, header: &[&str], rows: &[Vec<String>]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let to_err = |e: csv::Error| CliError::Config(e.to_string());
    w.write_record(header).map_err(to_err)?;
    for r in rows {
        w.write_record(r).map_err(to_err)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Config(e.to_string()))?;
    emit(cfg, &bytes)
}

fn reject_csv(cfg: &RunConfig, command: &str) -> Result<(), CliError> {
    if cfg.format == Some(Format::Csv) {
        return Err(CliError::Config(format!("{command} has no CSV output")));
    }
    Ok(())
}

#[derive(Serialize)]
struct Compared {
    value: f64,
    closed_form: f64,
    abs_diff: f64,
}

impl Compared {
    fn new(value: f64, closed_form: f64) -> Self {
        Compared { value: value + 0.0, closed_form: closed_form + 0.0, abs_diff: (value - closed_form).abs() }
    }
}

fn correlations(cfg: &RunConfig) -> Result<(), CliError> {
    let s = Scenario::new(cfg.spec)?;
    let w = &cfg.window;
    let rho = rep_element(s.state().density(), w)?;
    let dim = w.dim() as f64;
    let phi = |x: &AlgebraElement| -> Result<f64, CliError> { Ok((&rho * rep_element(x, w)?).trace().re / dim) };
    let mut rows = Vec::new();
    for m in 0..2 {
        for n in 0..2 {
            let (a, b) = (s.event_a(m), s.event_b(n));
            let dense = phi(&(a * b))? - phi(a)? * phi(b)?;
            rows.push((m + 1, n + 1, Compared::new(dense, s.correlation_closed_form(m, n))));
        }
    }
    if cfg.format == Some(Format::Csv) {
        let body: Vec<Vec<String>> =
            rows.iter().map(|(m, n, c)| vec![m.to_string(), n.to_string(), num(c.value), num(c.closed_form), num(c.abs_diff)]).collect();
        return emit_csv(cfg, &["m", "n", "correlation", "closed_form", "abs_diff"], &body);
    }
    let table: Vec<Value> = rows
        .iter()
        .map(|(m, n, c)| json!({"m": m, "n": n, "correlation": c.value, "closed_form": c.closed_form, "abs_diff": c.abs_diff}))
        .collect();
    emit_json(cfg, &json!({"scenario": cfg.spec, "window": [w.lo, w.hi], "correlations": table}))
}

fn bell_record(s: &Scenario) -> Value {
    let ch = Compared::new(s.ch_value(), ch_closed_form(s.spec()));
    let chsh = Compared::new(s.chsh_value(), chsh_closed_form(s.spec()));
    let ch_violated = ch.value < -1.0;
    let chsh_violated = chsh.value.abs() > 2.0;
    json!({
        "lambda": s.spec().lambda(),
        "ch": ch,
        "chsh": chsh,
        "ch_violated": ch_violated,
        "chsh_violated": chsh_violated,
        "violated": ch_violated || chsh_violated,
    })
}

fn bell(cfg: &RunConfig) -> Result<(), CliError> {
    reject_csv(cfg, "bell")?;
    let s = Scenario::new(cfg.spec)?;
    emit_json(cfg, &bell_record(&s))
}

fn sweep_lambda(cfg: &RunConfig) -> Result<(), CliError> {
    let points = cfg.grid.unwrap_or(SWEEP_POINTS);
    if points < 2 {
        return Err(CliError::Config(format!("sweep needs at least 2 points, got {points}")));
    }
    let mut records = Vec::new();
    for k in 0..points {
        let lambda = k as f64 / (points - 1) as f64;
        records.push(bell_record(&Scenario::new(cfg.spec.with_lambda(lambda)?)?));
    }
    if cfg.format == Some(Format::Json) {
        return emit_json(cfg, &json!({"scenario": cfg.spec, "sweep": records}));
    }
    let f = |v: &Value| num(v.as_f64().expect("numeric field"));
    let rows: Vec<Vec<String>> = records
        .iter()
        .map(|r| {
            vec![
                f(&r["lambda"]),
                f(&r["ch"]["value"]),
                f(&r["ch"]["closed_form"]),
                f(&r["ch"]["abs_diff"]),
                f(&r["chsh"]["value"]),
                f(&r["chsh"]["closed_form"]),
                f(&r["chsh"]["abs_diff"]),
                r["ch_violated"].to_string(),
                r["chsh_violated"].to_string(),
            ]
        })
        .collect();
    emit_csv(
        cfg,
        &["lambda", "ch", "ch_closed_form", "ch_abs_diff", "chsh", "chsh_closed_form", "chsh_abs_diff", "ch_violated", "chsh_violated"],
        &rows,
    )
}

fn verify_suite(which: Suite, cfg: &RunConfig) -> Result<(), CliError> {
    reject_csv(cfg, "verify")?;
    let report = match which {
        Suite::Prop1 => verify::verify_prop1(&Scenario::new(cfg.spec)?, cfg.grid.unwrap_or(PROP1_GRID), cfg.tol)?,
        Suite::Prop2 => verify::verify_prop2(&Scenario::new(cfg.spec)?, cfg.tol)?,
        Suite::Dynamics => verify::verify_dynamics(cfg.tol)?,
        Suite::Oracle => verify::verify_oracle(cfg.tol)?,
        Suite::Dimensions => verify::verify_dimensions(cfg.tol)?,
        Suite::PrimitiveCausality => verify::verify_primitive_causality(cfg.spec.dynamics, cfg.tol)?,
    };
    emit_json(cfg, &report)?;
    if report.pass {
        Ok(())
    } else {
        Err(CliError::Verification)
    }
}

#[derive(Serialize)]
struct HitRecord {
    c_index: usize,
    c_tilde_index: usize,
    c: [f64; 3],
    c_tilde: [f64; 3],
    max_residual: f64,
    /// `max_{m,n} |closed form| / 4`; only for `theta2 = 0`, `eta2 = 1`.
    closed_form_max_residual: Option<f64>,
    commutator_norms: BTreeMap<String, f64>,
    localized_in_oc: bool,
}

fn search(cfg: &RunConfig) -> Result<(), CliError> {
    let grid = cfg.grid.unwrap_or(SEARCH_GRID);
    let s = Scenario::new(cfg.spec)?;
    let hits = search_common_causes(&s, grid, cfg.tol)?;
    let special = cfg.spec.dynamics.theta2() == 0.0 && cfg.spec.dynamics.eta2() == 1;
    let oc = RegionGeom::Cone(region_c());
    let mut records = Vec::with_capacity(hits.len());
    for h in &hits {
        let (c, ct) = (h.candidate.c, h.candidate.c_tilde);
        let closed_form_max_residual = special.then(|| {
            let mut worst: f64 = 0.0;
            for a in &cfg.spec.a {
                for b in &cfg.spec.b {
                    worst = worst.max(residual_closed_form(a, b, &c, &ct, cfg.spec.lambda()).abs() / 4.0);
                }
            }
            worst
        });
        let proj = h.candidate.projection();
        records.push(HitRecord {
            c_index: h.c_index,
            c_tilde_index: h.c_tilde_index,
            c: c.components(),
            c_tilde: ct.components(),
            max_residual: h.max_residual,
            closed_form_max_residual,
            commutator_norms: commutator_norms(&proj, &s)?,
            localized_in_oc: supported_in(&proj, 0, &oc)? && supported_in(&h.candidate.complement().projection(), 0, &oc)?,
        });
    }
    let oc_in_cpast = past_region(PastKind::Common, &region_a(), &region_b()).contains_double_cone(&region_c());
    if cfg.format == Some(Format::Csv) {
        let rows: Vec<Vec<String>> = records
            .iter()
            .map(|r| {
                let mut row = vec![r.c_index.to_string(), r.c_tilde_index.to_string()];
                row.extend(r.c.iter().chain(&r.c_tilde).map(|x| num(*x)));
                row.push(num(r.max_residual));
                row.push(r.closed_form_max_residual.map(num).unwrap_or_default());
                row.push(num(r.commutator_norms.values().cloned().fold(0.0, f64::max)));
                row.push(r.localized_in_oc.to_string());
                row
            })
            .collect();
        return emit_csv(
            cfg,
            &[
                "c_index",
                "c_tilde_index",
                "c1",
                "c2",
                "c3",
                "ct1",
                "ct2",
                "ct3",
                "max_residual",
                "closed_form_max_residual",
                "max_commutator_norm",
                "localized_in_oc",
            ],
            &rows,
        );
    }
    emit_json(
        cfg,
        &json!({
            "scenario": cfg.spec,
            "grid": grid,
            "pairs": grid * grid,
            "grid_spacing": grid_spacing(grid),
            "tol": cfg.tol,
            "oc_in_common_past": oc_in_cpast,
            "count": records.len(),
            "hits": records,
        }),
    )
}
