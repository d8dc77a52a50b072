//! Command-line front end.
//!
//! Exit codes: 0 when every enabled check passes, 1 when a check fails (reports
//! are still written), 2 for usage and configuration errors.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use crate::diagnostics::{evolve, inequality_suite, RunReport};
use crate::error::{Error, Result};
use crate::geometry::{calibrate_sign_convention, christoffel_jet, verify_null_structure, SpaceformChart};
use crate::pde::Case;
use crate::solver::{manufactured_residual, Evolution, RunConfig};

#[derive(Debug, Parser)]
#[command(name = "tgwave", version, about = "Wave / Klein-Gordon perturbations of geodesic wave maps")]
pub struct Cli {
    #[command(subcommand)]
    pub verb: Verb,
    /// Run configuration (JSON, or TOML with a .toml extension).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,
    /// Override a config field; the value is read as JSON, else as a string.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    pub set: Vec<String>,
    /// Concurrent runs for `converge` and `sweep`.
    #[arg(long, global = true, default_value_t = 1)]
    pub jobs: usize,
}

#[derive(Debug, Subcommand)]
pub enum Verb {
    /// Curvature identities of spaceform Fermi charts.
    VerifyGeometry {
        /// Chart labels such as H3 or S2; defaults to H2 S2 H3 S3.
        #[arg(long = "chart")]
        charts: Vec<String>,
        #[arg(long, default_value_t = 1e-4)]
        tol: f64,
    },
    /// One evolution with slice diagnostics.
    Run,
    /// Self-convergence in dr and the manufactured-solution residual.
    Converge {
        /// Number of resolutions, each halving dr.
        #[arg(long, default_value_t = 3)]
        levels: usize,
    },
    /// Grid of runs over epsilon, case and dr.
    Sweep {
        #[arg(long, value_delimiter = ',')]
        epsilon: Vec<f64>,
        #[arg(long, value_delimiter = ',')]
        case: Vec<String>,
        #[arg(long, value_delimiter = ',')]
        dr: Vec<f64>,
    },
    /// Hardy, Morrey and Gagliardo-Nirenberg ratios over a test family.
    CheckInequalities {
        #[arg(long, value_delimiter = ',', default_value = "2,5,10")]
        taus: Vec<f64>,
        #[arg(long, default_value_t = 2.05)]
        hardy_bound: f64,
        #[arg(long, default_value_t = 10.0)]
        spread_bound: f64,
    },
}

/// Parses `argv` (including the program name) and runs the verb.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(&cli) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            eprintln!("tgwave: {e}");
            match e {
                Error::BlowUp { .. } | Error::UndefinedRatio(_) => 1,
                _ => 2,
            }
        }
    }
}

pub fn dispatch(cli: &Cli) -> Result<bool> {
    let config = load_config(cli.config.as_deref(), &cli.set)?;
    std::fs::create_dir_all(&cli.out)
        .map_err(|e| Error::Config(format!("cannot create output directory {}: {e}", cli.out.display())))?;
    match &cli.verb {
        Verb::VerifyGeometry { charts, tol } => verify_geometry(&config, charts, *tol, &cli.out),
        Verb::Run => run_one(&config, &cli.out),
        Verb::Converge { levels } => converge(&config, *levels, cli.jobs, &cli.out),
        Verb::Sweep { epsilon, case, dr } => sweep(&config, epsilon, case, dr, cli.jobs, &cli.out),
        Verb::CheckInequalities { taus, hardy_bound, spread_bound } => {
            check_inequalities(&config, taus, *hardy_bound, *spread_bound, &cli.out)
        }
    }
}

/// Defaults, then the file, then `KEY=VALUE` overrides.
pub fn load_config(path: Option<&Path>, sets: &[String]) -> Result<RunConfig> {
    let mut v = serde_json::to_value(RunConfig::default()).expect("default config serializes");
    if let Some(path) = path {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
        let is_toml = path.extension().is_some_and(|x| x == "toml");
        let file = RunConfig::parse(&text, is_toml)?;
        let Value::Object(map) = file else {
            return Err(Error::Config(format!("config {} must be a table of fields", path.display())));
        };
        for (k, x) in map {
            v[k] = x;
        }
    }
    for s in sets {
        let (k, x) = s
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("override `{s}` must have the form KEY=VALUE")))?;
        let x = serde_json::from_str(x).unwrap_or_else(|_| Value::String(x.to_string()));
        v[k.trim()] = x;
    }
    let c = RunConfig::from_value(v)?;
    c.validate()?;
    Ok(c)
}

fn write(out: &Path, name: &str, text: &str) -> Result<()> {
    std::fs::write(out.join(name), text).map_err(|e| Error::Io(format!("{}: {e}", out.join(name).display())))
}

fn write_json<T: Serialize>(out: &Path, name: &str, value: &T) -> Result<()> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| Error::Io(e.to_string()))?;
    s.push('\n');
    write(out, name, &s)
}

/// Shortest round-trip form; tiny values stay in exponent notation.
fn num(x: f64) -> String {
    format!("{x:?}")
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

fn parse_chart(label: &str) -> Result<SpaceformChart> {
    let bad = || Error::Config(format!("chart `{label}` must look like H3, S2 or R3"));
    let mut chars = label.chars();
    let sign = match chars.next().ok_or_else(bad)? {
        'H' | 'h' => -1,
        'S' | 's' => 1,
        'R' | 'r' | 'E' | 'e' => 0,
        _ => return Err(bad()),
    };
    let n: usize = chars.as_str().parse().map_err(|_| bad())?;
    SpaceformChart::new(sign, n, 1.0).map_err(|e| Error::Config(e.to_string()))
}

fn verify_geometry(config: &RunConfig, charts: &[String], tol: f64, out: &Path) -> Result<bool> {
    let labels: Vec<String> =
        if charts.is_empty() { ["H2", "S2", "H3", "S3"].map(String::from).to_vec() } else { charts.to_vec() };
    let mut reports = Vec::new();
    for l in &labels {
        let chart = parse_chart(l)?;
        let jet = christoffel_jet(&chart, config.jet_step)?;
        reports.push(verify_null_structure(&jet, tol));
    }
    let pass = reports.iter().all(|r| r.pass);
    let doc = json!({
        "config_hash": config.hash(),
        "step": config.jet_step,
        "tol": tol,
        "sign_convention": calibrate_sign_convention(),
        "reports": reports,
        "pass": pass,
    });
    write_json(out, "geometry.json", &doc)?;
    for r in &reports {
        println!("{} pass={} christoffder2={:.3e} weaknull={:.3e}", r.chart, r.pass, r.christoffder2_residual, r.weaknull_residual);
    }
    Ok(pass)
}

/// `slices.csv`: one row per completed slice.
pub fn slices_csv(rep: &RunReport) -> String {
    let mut s = String::from(
        "tau,E_wave,E_kg,E_total,E0,E1,E2,sup_kg_w32,sup_lu_w12,pointwise_kg,pointwise_lu,\
quad_m0,quad_m1,quad_m2,cubic_m0,cubic_m1,cubic_m2,source_integral,identity_residual,config_hash\n",
    );
    for sl in &rep.slices {
        let e = &sl.energy;
        let kg = e.e_kg.iter().map(|x| x * x).sum::<f64>().sqrt();
        let p = sl.pointwise;
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            num(e.tau),
            num(e.e_wave),
            num(kg),
            num(e.e_total),
            num(e.frak_e[0]),
            num(e.frak_e[1]),
            num(e.frak_e[2]),
            num(e.sup_kg_w32),
            num(e.sup_lu_w12),
            opt(p.map(|p| p[0])),
            opt(p.map(|p| p[1])),
            opt(sl.quad[0]),
            opt(sl.quad[1]),
            opt(sl.quad[2]),
            opt(sl.cubic[0]),
            opt(sl.cubic[1]),
            opt(sl.cubic[2]),
            num(sl.source_integral),
            opt(sl.identity_residual),
            rep.config_hash
        );
    }
    s
}

/// `norms.csv`: long format `(tau, norm_id, value)`.
pub fn norms_csv(rep: &RunReport) -> String {
    let mut s = String::from("tau,norm_id,value,config_hash\n");
    for sl in &rep.slices {
        let e = &sl.energy;
        let mut row = |id: &str, v: f64| {
            let _ = writeln!(s, "{},{id},{},{}", num(e.tau), num(v), rep.config_hash);
        };
        row("E_wave", e.e_wave);
        for (i, k) in e.e_kg.iter().enumerate() {
            row(&format!("E_kg_{}", i + 2), *k);
        }
        row("E0", e.frak_e[0]);
        row("E1", e.frak_e[1]);
        row("E2", e.frak_e[2]);
        row("sup_kg_w32", e.sup_kg_w32);
        row("sup_lu_w12", e.sup_lu_w12);
    }
    s
}

/// `series.csv`: constant-`t` sup norms.
pub fn series_csv(ev: &Evolution, hash: &str) -> String {
    let mut s = String::from("t,sup_kg,sup_dt_kg,sup_l_wave,sup_wave,config_hash\n");
    for p in &ev.series {
        let _ = writeln!(s, "{},{},{},{},{},{hash}", num(p.t), num(p.sup_kg), num(p.sup_dt_kg), num(p.sup_l_wave), num(p.sup_wave));
    }
    s
}

/// `checkpoint.csv`: columns `t, r, u1..un, v1..vn`.
pub fn checkpoint_csv(ev: &Evolution, hash: &str) -> String {
    let n = ev.coeffs.n;
    let mut s = String::from("t,r");
    for e in 1..=n {
        let _ = write!(s, ",u{e}");
    }
    for e in 1..=n {
        let _ = write!(s, ",v{e}");
    }
    s.push_str(",config_hash\n");
    for st in &ev.checkpoints {
        for j in 0..st.points() {
            let _ = write!(s, "{},{}", num(st.t), num(j as f64 * st.dr));
            for e in 0..n {
                let _ = write!(s, ",{}", num(st.u[e][j]));
            }
            for e in 0..n {
                let _ = write!(s, ",{}", num(st.v[e][j]));
            }
            let _ = writeln!(s, ",{hash}");
        }
    }
    s
}

fn run_one(config: &RunConfig, out: &Path) -> Result<bool> {
    let (ev, rep) = evolve(config)?;
    write_json(out, "run.json", &rep)?;
    write(out, "slices.csv", &slices_csv(&rep))?;
    write(out, "norms.csv", &norms_csv(&rep))?;
    write(out, "series.csv", &series_csv(&ev, &rep.config_hash))?;
    if !ev.checkpoints.is_empty() {
        write(out, "checkpoint.csv", &checkpoint_csv(&ev, &rep.config_hash))?;
    }
    if let Some(t) = rep.blowup {
        println!("blowup@t={t}");
    }
    println!(
        "slices={} bootstrap={} max_identity_residual={}",
        rep.slices.len(),
        rep.bootstrap.pass,
        opt(rep.max_identity_residual)
    );
    Ok(rep.passed())
}

/// Runs `configs` on up to `jobs` threads; results keep the input order.
pub fn run_many(configs: &[RunConfig], jobs: usize) -> Vec<Result<RunReport>> {
    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<Option<Result<RunReport>>>> = Mutex::new(vec![None; configs.len()]);
    std::thread::scope(|s| {
        for _ in 0..jobs.max(1).min(configs.len().max(1)) {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                if i >= configs.len() {
                    break;
                }
                let r = evolve(&configs[i]).map(|(_, rep)| rep);
                results.lock().expect("result lock")[i] = Some(r);
            });
        }
    });
    results.into_inner().expect("result lock").into_iter().map(|r| r.expect("every run finished")).collect()
}

fn converge(config: &RunConfig, levels: usize, jobs: usize, out: &Path) -> Result<bool> {
    if levels < 3 {
        return Err(Error::Config(format!("converge needs at least 3 levels, got {levels}")));
    }
    let configs: Vec<RunConfig> =
        (0..levels).map(|k| RunConfig { dr: config.dr / 2f64.powi(k as i32), ..config.clone() }).collect();
    let reports = run_many(&configs, jobs).into_iter().collect::<Result<Vec<_>>>()?;
    let study = convergence_study(&reports, config.t_start);
    let coeffs = config.coefficients()?;
    let mms: Vec<(f64, f64)> =
        configs.iter().map(|c| (c.dr, manufactured_residual(&coeffs, c.dr, 2.5))).collect();
    let mms_orders: Vec<f64> = mms.windows(2).map(|w| (w[0].1 / w[1].1).log2()).collect();
    let mms_pass = mms_orders.iter().all(|o| (o - 2.0).abs() <= 0.3);
    let pass = study.pass && mms_pass;
    let doc = json!({
        "config_hash": config.hash(),
        "dr": configs.iter().map(|c| c.dr).collect::<Vec<_>>(),
        "energy_orders": study,
        "manufactured": {"residuals": mms, "orders": mms_orders, "pass": mms_pass},
        "max_identity_residual": reports.iter().map(|r| r.max_identity_residual).collect::<Vec<_>>(),
        "pass": pass,
    });
    write_json(out, "converge.json", &doc)?;
    println!("energy order min={:.3} max={:.3} manufactured orders={mms_orders:?}", study.min_order, study.max_order);
    Ok(pass)
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceStudy {
    pub tau: Vec<f64>,
    /// `orders[k][i]`: observed order of `E_k` at `tau[i]` from the three finest levels.
    pub orders: [Vec<f64>; 3],
    pub min_order: f64,
    pub max_order: f64,
    pub pass: bool,
}

/// Self-convergence orders `log2(|E_h - E_{h/2}| / |E_{h/2} - E_{h/4}|)` of the
/// slice energies on evolved slices `tau > t_start`; differences below `1e-12`
/// of the energy are skipped.
pub fn convergence_study(reports: &[RunReport], t_start: f64) -> ConvergenceStudy {
    let k = reports.len();
    let (a, b, c) = (&reports[k - 3], &reports[k - 2], &reports[k - 1]);
    let mut tau = Vec::new();
    let mut orders: [Vec<f64>; 3] = Default::default();
    for (i, &t) in a.tau.iter().enumerate() {
        if t <= t_start {
            continue;
        }
        let (Some(j), Some(l)) = (b.tau.iter().position(|&x| x == t), c.tau.iter().position(|&x| x == t)) else {
            continue;
        };
        tau.push(t);
        for (q, series) in [(&a.e0, &b.e0, &c.e0), (&a.e1, &b.e1, &c.e1), (&a.e2, &b.e2, &c.e2)].iter().enumerate() {
            let d1 = (series.0[i] - series.1[j]).abs();
            let d2 = (series.1[j] - series.2[l]).abs();
            let o = if d2 <= 1e-12 * series.2[l].abs() || d2 == 0.0 { f64::NAN } else { (d1 / d2).log2() };
            orders[q].push(o);
        }
    }
    let all: Vec<f64> = orders.iter().flatten().copied().filter(|o| o.is_finite()).collect();
    let min_order = all.iter().copied().fold(f64::INFINITY, f64::min);
    let max_order = all.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let pass = !all.is_empty() && all.iter().all(|o| (o - 2.0).abs() <= 0.3);
    ConvergenceStudy { tau, orders, min_order, max_order, pass }
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub case: Case,
    pub epsilon: f64,
    pub dr: f64,
    pub status: String,
    pub bootstrap_pass: Option<bool>,
    pub kg_exponent: Option<f64>,
    pub dt_kg_exponent: Option<f64>,
    pub l_wave_slope: Option<f64>,
    pub e0_growth: Option<f64>,
    pub max_quad_ratio: Option<f64>,
    pub max_cubic_ratio: Option<f64>,
    pub max_identity_residual: Option<f64>,
    pub config_hash: String,
}

impl SweepRow {
    pub fn ok(&self) -> bool {
        self.status == "ok" && self.bootstrap_pass == Some(true)
    }
}

/// Runs the grid and returns rows sorted by `(case, epsilon, dr)`.
pub fn sweep_rows(base: &RunConfig, epsilon: &[f64], cases: &[Case], dr: &[f64], jobs: usize) -> Vec<SweepRow> {
    let mut configs = Vec::new();
    for &case in cases {
        for &e in epsilon {
            for &d in dr {
                configs.push(RunConfig { case, epsilon: e, dr: d, ..base.clone() });
            }
        }
    }
    configs.sort_by(|a, b| {
        (a.case.name(), a.epsilon, a.dr).partial_cmp(&(b.case.name(), b.epsilon, b.dr)).expect("finite keys")
    });
    let reports = run_many(&configs, jobs);
    configs
        .iter()
        .zip(reports)
        .map(|(c, r)| {
            let mut row = SweepRow {
                case: c.case,
                epsilon: c.epsilon,
                dr: c.dr,
                status: "ok".into(),
                bootstrap_pass: None,
                kg_exponent: None,
                dt_kg_exponent: None,
                l_wave_slope: None,
                e0_growth: None,
                max_quad_ratio: None,
                max_cubic_ratio: None,
                max_identity_residual: None,
                config_hash: c.hash(),
            };
            match r {
                Err(e) => row.status = format!("error: {e}"),
                Ok(rep) => {
                    if let Some(t) = rep.blowup {
                        row.status = format!("blowup@t={t}");
                    } else if !rep.missing_slices.is_empty() {
                        row.status = "incomplete".into();
                    }
                    let maxr = |f: &dyn Fn(&crate::diagnostics::SliceReport) -> [Option<f64>; 3]| {
                        rep.slices.iter().flat_map(f).flatten().reduce(f64::max)
                    };
                    row.bootstrap_pass = Some(rep.bootstrap.pass);
                    row.kg_exponent = rep.decay_fits.kg_sup.as_ref().map(|f| f.exponent);
                    row.dt_kg_exponent = rep.decay_fits.dt_kg_sup.as_ref().map(|f| f.exponent);
                    row.l_wave_slope = rep.decay_fits.l_wave_scaled.as_ref().map(|f| f.exponent);
                    row.e0_growth = rep.e0_growth;
                    row.max_quad_ratio = maxr(&|s| s.quad);
                    row.max_cubic_ratio = maxr(&|s| s.cubic);
                    row.max_identity_residual = rep.max_identity_residual;
                }
            }
            row
        })
        .collect()
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut s = String::from(
        "case,epsilon,dr,status,bootstrap_pass,kg_exponent,dt_kg_exponent,l_wave_slope,e0_growth,\
max_quad_ratio,max_cubic_ratio,max_identity_residual,config_hash\n",
    );
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            r.case.name(),
            num(r.epsilon),
            num(r.dr),
            r.status.replace(',', ";"),
            r.bootstrap_pass.map(|b| b.to_string()).unwrap_or_default(),
            opt(r.kg_exponent),
            opt(r.dt_kg_exponent),
            opt(r.l_wave_slope),
            opt(r.e0_growth),
            opt(r.max_quad_ratio),
            opt(r.max_cubic_ratio),
            opt(r.max_identity_residual),
            r.config_hash
        );
    }
    s
}

fn sweep(config: &RunConfig, epsilon: &[f64], case: &[String], dr: &[f64], jobs: usize, out: &Path) -> Result<bool> {
    let eps = if epsilon.is_empty() { vec![config.epsilon] } else { epsilon.to_vec() };
    let drs = if dr.is_empty() { vec![config.dr] } else { dr.to_vec() };
    let cases = if case.is_empty() {
        vec![config.case]
    } else {
        case.iter().map(|c| Case::parse(c).map_err(|e| Error::Config(e.to_string()))).collect::<Result<Vec<_>>>()?
    };
    if let Some(x) = eps.iter().chain(&drs).find(|x| !x.is_finite()) {
        return Err(Error::Config(format!("sweep values must be finite, got {x}")));
    }
    for &d in &drs {
        RunConfig { dr: d, ..config.clone() }.validate()?;
    }
    let rows = sweep_rows(config, &eps, &cases, &drs, jobs);
    let largest: Vec<Value> = cases
        .iter()
        .map(|c| {
            let best = rows.iter().filter(|r| r.case == *c && r.ok()).map(|r| r.epsilon).reduce(f64::max);
            json!({"case": c, "largest_passing_epsilon": best})
        })
        .collect();
    write(out, "sweep.csv", &sweep_csv(&rows))?;
    write_json(out, "sweep.json", &json!({"config_hash": config.hash(), "rows": rows, "summary": largest}))?;
    for r in &rows {
        println!("{} eps={} dr={} {}", r.case.name(), r.epsilon, r.dr, r.status);
    }
    Ok(rows.iter().all(SweepRow::ok))
}

fn check_inequalities(config: &RunConfig, taus: &[f64], hardy: f64, spread: f64, out: &Path) -> Result<bool> {
    let rep = inequality_suite(taus, hardy, spread)?;
    write_json(out, "inequalities.json", &json!({"config_hash": config.hash(), "report": rep}))?;
    for r in &rep.rows {
        println!("tau={} {} r={} min={:.4} max={:.4} pass={}", r.tau, r.kind, opt(r.r_exp), r.min, r.max, r.pass);
    }
    Ok(rep.pass)
}
