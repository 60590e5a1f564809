use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::{anyhow, Context, Result};
use serde_json::{Map, Value};

use semiquat::config::{OutputFormat, RunConfig};
use semiquat::curvekit::{frenet_apparatus, CurveSpec};
use semiquat::involute::{involute_distance, make_involute, InvolutePair};
use semiquat::spatial3::{associated_curve, associated_involute_curve, check_tangent_pairing_on};
use semiquat::verify::run_verify;
use semiquat::MetricContext;

use crate::table::{quat_cells, quat_columns, Cell, Table};

fn render(table: &Table, format: OutputFormat) -> String {
    match format {
        OutputFormat::Csv => table.to_csv(),
        OutputFormat::Json => pretty(&table.to_json()),
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn emit(text: &str, path: Option<&Path>) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn at(s: f64) -> impl FnOnce() -> String {
    move || format!("sample s = {s}")
}

pub fn frenet(cfg: &RunConfig) -> Result<()> {
    let ctx = cfg.ctx();
    let curve = cfg.build_curve()?;
    let mut cols = vec!["s".to_string()];
    for p in ["T", "N", "B", "E"] {
        cols.extend(quat_columns(p));
    }
    cols.extend(["kappa", "k", "third", "eps_T", "eps_N", "eps_t", "eps_n", "eps_b"].map(String::from));
    let mut table = Table::new(cols);
    for s in cfg.grid.points() {
        let a = frenet_apparatus(&curve, s, &ctx).with_context(at(s))?;
        let mut row = vec![Cell::Num(s)];
        for v in a.frame() {
            row.extend(quat_cells(v));
        }
        row.extend([a.kappa, a.k, a.third].map(Cell::Num));
        row.extend(a.signs.values().map(|e| Cell::Int(e as i64)));
        table.push(row);
    }
    emit(&render(&table, cfg.output.format_or(OutputFormat::Csv)), cfg.output.path.as_deref())
}

pub fn involute(cfg: &RunConfig) -> Result<()> {
    let ctx = cfg.ctx();
    let curve = cfg.build_curve()?;
    let pair = make_involute(&curve, cfg.c, &ctx);
    let mut cols = vec!["s".to_string()];
    cols.extend(quat_columns("phi"));
    cols.extend(["speed", "distance", "distance_residual", "tangency", "singular"].map(String::from));
    cols.extend(quat_columns("Tphi"));
    cols.extend(quat_columns("Nphi"));
    cols.push("kappa_phi".into());
    let mut table = Table::new(cols);
    for s in cfg.grid.points() {
        let phi = pair.involute.position(s).with_context(at(s))?;
        let dist = involute_distance(&pair, s, &ctx).with_context(at(s))?;
        let mut row = vec![Cell::Num(s)];
        row.extend(quat_cells(phi));
        row.push(pair.signed_speed(s, &ctx).map_or(Cell::Empty, Cell::Num));
        row.push(Cell::Num(dist));
        row.push(Cell::Num((dist - (cfg.c - s).abs()).abs()));
        if pair.is_regular(s, &ctx) {
            let tx = curve.derivatives(s, 1).with_context(at(s))?[0];
            let tn = pair.local_tangent_normal(s, &ctx).with_context(at(s))?;
            row.push(Cell::Num(ctx.h(tn.tangent, tx)));
            row.push(Cell::Bool(false));
            row.extend(quat_cells(tn.tangent));
            row.extend(quat_cells(tn.normal));
            row.push(Cell::Num(tn.kappa));
        } else {
            row.push(Cell::Empty);
            row.push(Cell::Bool(true));
            row.extend(std::iter::repeat(Cell::Empty).take(9));
        }
        table.push(row);
    }
    emit(&render(&table, cfg.output.format_or(OutputFormat::Csv)), cfg.output.path.as_deref())
}

/// Writes the report and returns whether every check passed.
pub fn verify(cfg: &RunConfig) -> Result<bool> {
    let report = run_verify(cfg);
    let text = match cfg.output.format_or(OutputFormat::Json) {
        OutputFormat::Json => pretty(&serde_json::to_value(&report)?),
        OutputFormat::Csv => {
            let mut t = Table::new(["check", "residual", "tolerance", "pass"]);
            for (name, c) in &report.checks {
                t.push(vec![Cell::Text(name.clone()), Cell::Num(c.residual), Cell::Num(c.tolerance), Cell::Bool(c.pass)]);
            }
            t.to_csv()
        }
    };
    emit(&text, cfg.output.path.as_deref())?;
    Ok(report.passed())
}

fn projected(curve: &CurveSpec, grid: &[f64], keep: &[usize], names: &[String]) -> Result<Table> {
    let mut cols = vec!["s".to_string()];
    cols.extend(keep.iter().map(|&i| names[i].clone()));
    let mut t = Table::new(cols);
    for &s in grid {
        let p = curve.position(s).with_context(at(s))?.to_array();
        let mut row = vec![Cell::Num(s)];
        row.extend(keep.iter().map(|&i| Cell::Num(p[i])));
        t.push(row);
    }
    Ok(t)
}

struct Projection {
    xi: CurveSpec,
    pair: InvolutePair,
    alpha: CurveSpec,
    beta: CurveSpec,
}

fn projection_curves(cfg: &RunConfig, ctx: &MetricContext) -> Result<Projection> {
    let xi = cfg.build_curve()?;
    let pair = make_involute(&xi, cfg.c, ctx);
    let alpha = associated_curve(&xi, cfg.anchor_s, cfg.alpha_anchor(), ctx).context("associated curve of the curve")?;
    let beta = associated_involute_curve(&pair, cfg.anchor_s, cfg.beta_anchor(), ctx)
        .context("associated curve of the involute")?;
    Ok(Projection { xi, pair, alpha, beta })
}

/// One table per curve: ξ and φ without component `drop_axis`, α and β
/// as they are. With `--out` the tables go to `<out>/<name>.<ext>`.
pub fn project(cfg: &RunConfig, drop_axis: usize) -> Result<()> {
    if !(1..=4).contains(&drop_axis) {
        return Err(anyhow!("drop axis must be 1-4, got {drop_axis}"));
    }
    let ctx = cfg.ctx();
    let grid = cfg.grid.points();
    let p = projection_curves(cfg, &ctx)?;
    let keep4: Vec<usize> = (0..4).filter(|&i| i != drop_axis - 1).collect();
    let q = quat_columns("q");
    let a = quat_columns("a");
    let tables = [
        ("xi", projected(&p.xi, &grid, &keep4, &q)?),
        ("phi", projected(&p.pair.involute, &grid, &keep4, &q)?),
        ("alpha", projected(&p.alpha, &grid, &[0, 1, 2], &a)?),
        ("beta", projected(&p.beta, &grid, &[0, 1, 2], &a)?),
    ];
    let fmt = cfg.output.format_or(OutputFormat::Csv);
    match &cfg.output.path {
        Some(dir) => {
            fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            let ext = match fmt {
                OutputFormat::Csv => "csv",
                OutputFormat::Json => "json",
            };
            for (name, t) in &tables {
                emit(&render(t, fmt), Some(&dir.join(format!("{name}.{ext}"))))?;
            }
            Ok(())
        }
        None => {
            let text = match fmt {
                OutputFormat::Csv => tables.iter().map(|(n, t)| format!("# {n}\n{}", t.to_csv())).collect::<Vec<_>>().join("\n"),
                OutputFormat::Json => {
                    let obj: Map<String, Value> = tables.iter().map(|(n, t)| (n.to_string(), t.to_json())).collect();
                    pretty(&Value::Object(obj))
                }
            };
            emit(&text, None)
        }
    }
}

/// The hyperbolic example on the grid: curvatures, involute, associated
/// curves and the t, t* pairing.
pub fn example(cfg: &RunConfig) -> Result<()> {
    let ctx = cfg.ctx();
    let grid = cfg.grid.points();
    let p = projection_curves(cfg, &ctx)?;
    let rep = check_tangent_pairing_on(&p.pair, &grid, &ctx, cfg.tolerances.orthogonality)?;
    let mut cols: Vec<String> = ["s", "kappa", "k", "third"].map(String::from).to_vec();
    cols.extend(quat_columns("phi"));
    cols.extend(["alpha1", "alpha2", "alpha3", "beta1", "beta2", "beta3"].map(String::from));
    cols.extend(["h_t_tstar", "product_scalar", "g_tstar_n"].map(String::from));
    let mut table = Table::new(cols);
    for s in grid {
        let a = frenet_apparatus(&p.xi, s, &ctx).with_context(at(s))?;
        let mut row = vec![Cell::Num(s), Cell::Num(a.kappa), Cell::Num(a.k), Cell::Num(a.third)];
        row.extend(quat_cells(p.pair.involute.position(s)?));
        row.extend(p.alpha.position(s)?.xyz().map(Cell::Num));
        row.extend(p.beta.position(s)?.xyz().map(Cell::Num));
        match rep.samples.iter().find(|x| x.s == s) {
            Some(x) => row.extend([x.h_t_tstar, x.product_scalar, x.g_tstar_n].map(Cell::Num)),
            None => row.extend([Cell::Empty, Cell::Empty, Cell::Empty]),
        }
        table.push(row);
    }
    emit(&render(&table, cfg.output.format_or(OutputFormat::Csv)), cfg.output.path.as_deref())
}
