use std::collections::HashMap;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_rational::BigRational;
use rayon::prelude::*;

use conical::bandwidth_cosmo::{cosmo_cl, cosmo_cl_terms, cosmo_i, envelope_slope, CosmoParams};
use conical::coefficients::{build_table, rtilde_coeff, table_for};
use conical::identities::{
    addition_theorem_check, check_connection_pq, check_connection_raise, pp_product_integral, IdentityReport,
    AdditionGeometry,
};
use conical::sinc_contour::{
    borwein_exact, parse_rational, rational_to_f64, sampling_sum, sinc_product_quadrature, SamplingPlan, SincProduct,
};
use conical::{
    p_direct, p_elementary, p_eval, p_sinc_series, q_asymptotic, q_direct, q_elementary, q_eval, q_poles,
    q_sinc_series, Branch, Complex64, ConicalPoint, Error, QuadSettings,
};

#[derive(Parser, Debug)]
#[command(name = "conical", version, about = "Conical functions, their identities and band-limited sums")]
struct Cli {
    #[command(flatten)]
    global: GlobalOpts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct GlobalOpts {
    /// Output format; defaults to json for single evaluations and csv for tables.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Worker threads for sweeps (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// key=value file with default settings (rel_tol, abs_tol, epsilon_shift,
    /// max_subdivisions, periodic_points, threads, format).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    rel_tol: Option<f64>,
    #[arg(long, global = true)]
    abs_tol: Option<f64>,
    /// Imaginary shift used by the Q integrals.
    #[arg(long, global = true)]
    epsilon: Option<f64>,
    #[arg(long, global = true)]
    max_subdivisions: Option<usize>,
}

#[derive(Copy, Clone, Debug, PartialEq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate P^{-1/2-K}_{-1/2+i tau}(chi).
    EvalP(EvalArgs),
    /// Evaluate Q^{-1/2-K}_{-1/2±i tau}(chi).
    EvalQ(EvalQArgs),
    /// Poles of the Q series in tau and their residues.
    Poles(TableArgs),
    /// Coefficient table n, R, Rtilde.
    Coeffs(TableArgs),
    /// Run the identity battery.
    Check(CheckArgs),
    /// Normalized integral of a product of sinc functions, exactly.
    Borwein(BorweinArgs),
    /// Sampling sum of a sinc product against its integral.
    Sample(SampleArgs),
    /// Sampled cosmological sums.
    Cosmo(CosmoArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, ValueEnum)]
enum PMethod {
    Auto,
    Series,
    Direct,
    Elementary,
}

#[derive(Copy, Clone, Debug, PartialEq, ValueEnum)]
enum QMethod {
    Auto,
    Series,
    Direct,
    Elementary,
    Asymptotic,
}

#[derive(Copy, Clone, Debug, PartialEq, ValueEnum)]
enum BranchArg {
    Plus,
    Minus,
}

#[derive(Args, Debug)]
struct PointArgs {
    #[arg(long = "K", allow_negative_numbers = true)]
    k: f64,
    /// Real part of tau; exclusive with --tau-range.
    #[arg(long, allow_negative_numbers = true, conflicts_with = "tau_range")]
    tau: Option<f64>,
    #[arg(long, allow_negative_numbers = true, default_value_t = 0.0)]
    tau_im: f64,
    /// Sweep a:b:n over n evenly spaced real parts of tau.
    #[arg(long, allow_hyphen_values = true)]
    tau_range: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    chi: f64,
}

#[derive(Args, Debug)]
struct EvalArgs {
    #[command(flatten)]
    point: PointArgs,
    #[arg(long, value_enum, default_value = "auto")]
    method: PMethod,
}

#[derive(Args, Debug)]
struct EvalQArgs {
    #[command(flatten)]
    point: PointArgs,
    #[arg(long, value_enum, default_value = "plus")]
    branch: BranchArg,
    #[arg(long, value_enum, default_value = "auto")]
    method: QMethod,
}

#[derive(Args, Debug)]
struct TableArgs {
    #[arg(long = "K", allow_negative_numbers = true)]
    k: f64,
    #[arg(long, allow_negative_numbers = true)]
    chi: f64,
    #[arg(long, default_value_t = 10)]
    n_max: usize,
}

#[derive(Args, Debug)]
struct CheckArgs {
    /// Restrict the connection checks to one point (needs --tau and --chi too).
    #[arg(long = "K", allow_negative_numbers = true, requires_all = ["tau", "chi"])]
    k: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    tau: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    chi: Option<f64>,
}

#[derive(Args, Debug)]
struct BorweinArgs {
    /// Comma-separated positive rationals, e.g. 1,1/3,1/5.
    #[arg(long, value_delimiter = ',', required = true)]
    freqs: Vec<String>,
    /// Exact rational arithmetic (otherwise floating quadrature).
    #[arg(long)]
    exact: bool,
}

#[derive(Args, Debug)]
struct SampleArgs {
    #[arg(long, value_delimiter = ',', required = true)]
    freqs: Vec<String>,
    /// Ascending polynomial weight coefficients.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    poly: Option<Vec<f64>>,
    /// Sampling bandwidth; the spacing is pi/chi0. Defaults to the product bandwidth.
    #[arg(long)]
    chi0: Option<f64>,
    #[arg(long)]
    ncut: Option<usize>,
}

#[derive(Copy, Clone, Debug, PartialEq, ValueEnum)]
enum CosmoSumKind {
    Cl,
    I,
}

#[derive(Args, Debug)]
struct CosmoArgs {
    #[arg(long, value_enum, default_value = "cl")]
    sum: CosmoSumKind,
    #[arg(long, default_value_t = 2)]
    ell: usize,
    #[arg(long = "K", allow_negative_numbers = true, default_value_t = 2.0)]
    k: f64,
    #[arg(long = "N", allow_negative_numbers = true)]
    n: f64,
    #[arg(long = "A", allow_negative_numbers = true, default_value_t = 1.0)]
    a: f64,
    #[arg(long, default_value_t = 0.0)]
    beta: f64,
    #[arg(long, allow_negative_numbers = true)]
    rho0: f64,
    #[arg(long = "rhoL", allow_negative_numbers = true)]
    rho_l: f64,
    #[arg(long, default_value_t = 200)]
    ncut: usize,
    /// Print the C_l terms even when the remainder bound is too large.
    #[arg(long)]
    allow_tail: bool,
}

// ---- output ----------------------------------------------------------------

enum Cell {
    Num(f64),
    Int(i64),
    Str(String),
    Bool(bool),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(x) => num(*x),
            Cell::Int(i) => i.to_string(),
            Cell::Str(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
        }
    }

    fn json(&self) -> String {
        match self {
            Cell::Num(x) if x.is_finite() => num(*x),
            Cell::Num(_) => "null".into(),
            Cell::Int(i) => i.to_string(),
            Cell::Str(s) => serde_json::to_string(s).unwrap(),
            Cell::Bool(b) => b.to_string(),
        }
    }
}

/// 17 significant digits: enough to round-trip any f64.
fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

struct Table {
    columns: Vec<&'static str>,
    rows: Vec<Vec<Cell>>,
}

impl Table {
    fn new(columns: &[&'static str]) -> Self {
        Table { columns: columns.to_vec(), rows: Vec::new() }
    }

    fn write(&self, format: Format, out: &mut impl Write) -> std::io::Result<()> {
        match format {
            Format::Csv => {
                let mut w = csv::Writer::from_writer(out);
                w.write_record(&self.columns)?;
                for row in &self.rows {
                    w.write_record(row.iter().map(Cell::csv))?;
                }
                w.flush()
            }
            Format::Json => {
                writeln!(out, "[")?;
                for (i, row) in self.rows.iter().enumerate() {
                    let fields: Vec<String> = self
                        .columns
                        .iter()
                        .zip(row)
                        .map(|(c, v)| format!("{}: {}", serde_json::to_string(c).unwrap(), v.json()))
                        .collect();
                    let sep = if i + 1 < self.rows.len() { "," } else { "" };
                    writeln!(out, "  {{{}}}{sep}", fields.join(", "))?;
                }
                writeln!(out, "]")
            }
        }
    }
}

// ---- configuration -----------------------------------------------------------

struct RunConfig {
    format: Option<Format>,
    threads: Option<usize>,
    settings: QuadSettings,
}

enum Failure {
    Usage(String),
    Compute(Error),
    Identity(Vec<String>),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Compute(e)
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn parse_config_file(path: &PathBuf) -> Result<HashMap<String, String>, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
    let mut map = HashMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| usage(format!("{}:{}: expected key=value", path.display(), i + 1)))?;
        map.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(map)
}

fn parse_value<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, Failure> {
    v.parse().map_err(|_| usage(format!("config: bad value for {key}: {v:?}")))
}

fn build_config(g: &GlobalOpts) -> Result<RunConfig, Failure> {
    let mut settings = QuadSettings::default();
    let mut format = None;
    let mut threads = None;
    if let Some(path) = &g.config {
        for (k, v) in parse_config_file(path)? {
            match k.as_str() {
                "rel_tol" => settings.rel_tol = parse_value(&k, &v)?,
                "abs_tol" => settings.abs_tol = parse_value(&k, &v)?,
                "epsilon_shift" => settings.epsilon_shift = parse_value(&k, &v)?,
                "max_subdivisions" => settings.max_subdivisions = parse_value(&k, &v)?,
                "periodic_points" => settings.periodic_points = parse_value(&k, &v)?,
                "threads" => threads = Some(parse_value(&k, &v)?),
                "format" => {
                    format = Some(Format::from_str(&v, true).map_err(|_| usage(format!("config: bad format {v:?}")))?)
                }
                _ => return Err(usage(format!("config: unknown key {k:?}"))),
            }
        }
    }
    if let Some(x) = g.rel_tol {
        settings.rel_tol = x;
    }
    if let Some(x) = g.abs_tol {
        settings.abs_tol = x;
    }
    if let Some(x) = g.epsilon {
        settings.epsilon_shift = x;
    }
    if let Some(x) = g.max_subdivisions {
        settings.max_subdivisions = x;
    }
    settings.validate().map_err(|e| usage(e.to_string()))?;
    let threads = g.threads.or(threads);
    if threads == Some(0) {
        return Err(usage("--threads must be at least 1"));
    }
    Ok(RunConfig { format: g.format.or(format), threads, settings })
}

fn finite(name: &str, x: f64) -> Result<f64, Failure> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(usage(format!("--{name} must be finite")))
    }
}

fn positive(name: &str, x: f64) -> Result<f64, Failure> {
    if x > 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(usage(format!("--{name} must be positive")))
    }
}

fn parse_range(s: &str) -> Result<Vec<f64>, Failure> {
    let bad = || usage(format!("--tau-range expects a:b:n, got {s:?}"));
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(bad());
    }
    let a: f64 = parts[0].trim().parse().map_err(|_| bad())?;
    let b: f64 = parts[1].trim().parse().map_err(|_| bad())?;
    let n: usize = parts[2].trim().parse().map_err(|_| bad())?;
    if n == 0 || !a.is_finite() || !b.is_finite() {
        return Err(bad());
    }
    if n == 1 {
        return Ok(vec![a]);
    }
    Ok((0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect())
}

fn taus(p: &PointArgs) -> Result<Vec<Complex64>, Failure> {
    finite("K", p.k)?;
    positive("chi", p.chi)?;
    finite("tau-im", p.tau_im)?;
    let re = match (&p.tau_range, p.tau) {
        (Some(r), _) => parse_range(r)?,
        (None, Some(t)) => vec![finite("tau", t)?],
        (None, None) => return Err(usage("one of --tau or --tau-range is required")),
    };
    Ok(re.into_iter().map(|t| Complex64::new(t, p.tau_im)).collect())
}

fn parse_freqs(list: &[String]) -> Result<Vec<BigRational>, Failure> {
    list.iter()
        .map(|s| {
            let r = parse_rational(s).map_err(|e| usage(e.to_string()))?;
            if r <= BigRational::from_integer(BigInt::from(0)) {
                return Err(usage(format!("frequency {s} must be positive")));
            }
            Ok(r)
        })
        .collect()
}

// ---- commands ----------------------------------------------------------------

fn sweep(
    cfg: &RunConfig,
    p: &PointArgs,
    f: impl Fn(&ConicalPoint) -> conical::Result<Complex64> + Sync,
) -> Result<Table, Failure> {
    let points = taus(p)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads.unwrap_or(0))
        .build()
        .map_err(|e| usage(e.to_string()))?;
    let k = p.k;
    let chi = p.chi;
    let values: Vec<conical::Result<Complex64>> =
        pool.install(|| points.par_iter().map(|&tau| f(&ConicalPoint::new(k, tau, chi)?)).collect());
    let mut t = Table::new(&["K", "tau_re", "tau_im", "chi", "value_re", "value_im"]);
    for (tau, v) in points.iter().zip(values) {
        let v = v?;
        t.rows.push(vec![
            Cell::Num(k),
            Cell::Num(tau.re),
            Cell::Num(tau.im),
            Cell::Num(chi),
            Cell::Num(v.re),
            Cell::Num(v.im),
        ]);
    }
    Ok(t)
}

fn eval_p(cfg: &RunConfig, a: &EvalArgs) -> Result<Table, Failure> {
    let s = cfg.settings;
    sweep(cfg, &a.point, |pt| match a.method {
        PMethod::Auto => p_eval(pt, &s),
        PMethod::Series => table_for(pt.k, pt.chi, pt.tau, &s).and_then(|t| p_sinc_series(pt, &t)),
        PMethod::Direct => p_direct(pt, &s),
        PMethod::Elementary => p_elementary(pt),
    })
}

fn eval_q(cfg: &RunConfig, a: &EvalQArgs) -> Result<Table, Failure> {
    let s = cfg.settings;
    let branch = match a.branch {
        BranchArg::Plus => Branch::Plus,
        BranchArg::Minus => Branch::Minus,
    };
    sweep(cfg, &a.point, |pt| {
        // the single-branch methods take Q_{-1/2-i tau} as Q_{-1/2+i(-tau)}
        let pt = match branch {
            Branch::Plus => *pt,
            Branch::Minus => pt.with_tau(-pt.tau),
        };
        match a.method {
            QMethod::Auto => q_eval(&pt, Branch::Plus, &s),
            QMethod::Series => table_for(pt.k, pt.chi, pt.tau, &s).and_then(|t| q_sinc_series(&pt, &t)),
            QMethod::Direct => q_direct(&pt, &s),
            QMethod::Elementary => q_elementary(&pt, Branch::Plus),
            QMethod::Asymptotic => q_asymptotic(&pt),
        }
    })
}

fn poles(cfg: &RunConfig, a: &TableArgs) -> Result<Table, Failure> {
    finite("K", a.k)?;
    positive("chi", a.chi)?;
    let table = build_table(a.k, a.chi, a.n_max, &cfg.settings)?;
    let list = q_poles(a.k, a.chi, a.n_max, &table)?;
    let mut t = Table::new(&[
        "n",
        "location_re",
        "location_im",
        "residue_re",
        "residue_im",
        "offset_residue_re",
        "offset_residue_im",
        "significant",
    ]);
    for p in list {
        t.rows.push(vec![
            Cell::Int(p.n as i64),
            Cell::Num(p.location.re),
            Cell::Num(p.location.im),
            Cell::Num(p.residue.re),
            Cell::Num(p.residue.im),
            Cell::Num(p.offset_residue.re),
            Cell::Num(p.offset_residue.im),
            Cell::Bool(p.significant),
        ]);
    }
    Ok(t)
}

fn coeffs(cfg: &RunConfig, a: &TableArgs) -> Result<Table, Failure> {
    finite("K", a.k)?;
    positive("chi", a.chi)?;
    let table = build_table(a.k, a.chi, a.n_max, &cfg.settings)?;
    let s = cfg.settings;
    let tilde: Vec<conical::Result<Complex64>> =
        (0..=a.n_max).into_par_iter().map(|n| rtilde_coeff(a.k, n, a.chi, &s)).collect();
    let mut t = Table::new(&["n", "R", "Rtilde_re", "Rtilde_im"]);
    for (n, rt) in tilde.into_iter().enumerate() {
        let rt = rt?;
        t.rows.push(vec![Cell::Int(n as i64), Cell::Num(table.get(n as i64)), Cell::Num(rt.re), Cell::Num(rt.im)]);
    }
    Ok(t)
}

fn default_battery(a: &CheckArgs, s: &QuadSettings) -> conical::Result<Vec<IdentityReport>> {
    let mut out = Vec::new();
    let points: Vec<(f64, f64, f64)> = match (a.k, a.tau, a.chi) {
        (Some(k), Some(tau), Some(chi)) => vec![(k, tau, chi)],
        _ => vec![(0.0, 1.0, 1.0), (1.0, 2.0, 0.7), (0.3, 1.5, 1.2), (2.0, 0.8, 2.5)],
    };
    for &(k, tau, chi) in &points {
        out.extend(check_connection_pq(k, tau, chi, s)?);
        match check_connection_raise(k, tau, chi, s) {
            Ok(r) => out.extend(r),
            Err(Error::HalfIntegerOrder(_)) => {}
            Err(e) => return Err(e),
        }
    }
    if a.k.is_none() {
        out.push(pp_product_integral(0.0, 0.0, 1.0, 0.0, 0.0, None, s)?);
        let geom = AdditionGeometry::new(0.7, 0.5, 0.9)?;
        out.push(addition_theorem_check(&geom, 2.0, 40, s)?.report);
    }
    Ok(out)
}

fn check(cfg: &RunConfig, a: &CheckArgs) -> Result<Table, Failure> {
    if let (Some(k), Some(tau), Some(chi)) = (a.k, a.tau, a.chi) {
        finite("K", k)?;
        finite("tau", tau)?;
        positive("chi", chi)?;
    }
    let reports = default_battery(a, &cfg.settings)?;
    let mut t = Table::new(&[
        "name", "lhs_re", "lhs_im", "rhs_re", "rhs_im", "abs_gap", "rel_gap", "scale", "tolerance", "passed",
    ]);
    for r in &reports {
        t.rows.push(vec![
            Cell::Str(r.name.clone()),
            Cell::Num(r.lhs.re),
            Cell::Num(r.lhs.im),
            Cell::Num(r.rhs.re),
            Cell::Num(r.rhs.im),
            Cell::Num(r.abs_gap),
            Cell::Num(r.rel_gap),
            Cell::Num(r.scale),
            Cell::Num(r.tolerance),
            Cell::Bool(r.passed),
        ]);
    }
    Ok(t)
}

fn borwein(cfg: &RunConfig, a: &BorweinArgs) -> Result<Table, Failure> {
    let freqs = parse_freqs(&a.freqs)?;
    let mut t = Table::new(&["ratio", "ratio_decimal", "drop", "drop_decimal"]);
    if a.exact {
        let ratio = borwein_exact(&freqs)?;
        let drop = BigRational::from_integer(BigInt::from(1)) - &ratio;
        t.rows.push(vec![
            Cell::Str(ratio.to_string()),
            Cell::Num(rational_to_f64(&ratio)),
            Cell::Str(drop.to_string()),
            Cell::Num(rational_to_f64(&drop)),
        ]);
    } else {
        let f: Vec<f64> = freqs.iter().map(rational_to_f64).collect();
        let prod = SincProduct::new(f.clone(), None)?;
        // the integral of prod sin(f_n tau)/(f_n tau) relative to pi/f_0
        let scale: f64 = f.iter().product::<f64>() / f[0];
        let ratio = sinc_product_quadrature(&prod, &cfg.settings)? / (std::f64::consts::PI * scale);
        t.rows.push(vec![Cell::Num(ratio), Cell::Num(ratio), Cell::Num(1.0 - ratio), Cell::Num(1.0 - ratio)]);
    }
    Ok(t)
}

fn sample(cfg: &RunConfig, a: &SampleArgs) -> Result<Table, Failure> {
    let f: Vec<f64> = parse_freqs(&a.freqs)?.iter().map(rational_to_f64).collect();
    if let Some(p) = &a.poly {
        if p.iter().any(|c| !c.is_finite()) {
            return Err(usage("--poly coefficients must be finite"));
        }
    }
    let chi0 = match a.chi0 {
        Some(c) => positive("chi0", c)?,
        None => f.iter().sum(),
    };
    let prod = SincProduct::new(f.clone(), a.poly.clone())?;
    let plan = match a.ncut {
        Some(n) => SamplingPlan::new(chi0, n)?,
        None => SamplingPlan::with_default_cut(chi0, &prod, cfg.settings.abs_tol.max(1e-14))?,
    };
    let sum = sampling_sum(&f, a.poly.as_deref(), &plan)?;
    let integral = sinc_product_quadrature(&prod, &cfg.settings)?;
    let mut t = Table::new(&["chi0", "delta_tau", "n_cut", "sum", "tail", "integral"]);
    t.rows.push(vec![
        Cell::Num(plan.chi0),
        Cell::Num(plan.delta_tau),
        Cell::Int(sum.n_cut as i64),
        Cell::Num(sum.value),
        Cell::Num(sum.tail),
        Cell::Num(integral),
    ]);
    Ok(t)
}

fn cosmo(cfg: &RunConfig, a: &CosmoArgs) -> Result<Table, Failure> {
    for (name, x) in [("K", a.k), ("N", a.n), ("A", a.a), ("beta", a.beta), ("rho0", a.rho0), ("rhoL", a.rho_l)] {
        finite(name, x)?;
    }
    let params = CosmoParams::new(a.rho0, a.rho_l, a.a, a.n, a.beta, a.ell, a.k).map_err(|e| usage(e.to_string()))?;
    let s = &cfg.settings;
    let (terms, total, tail) = match a.sum {
        CosmoSumKind::I => {
            let r = cosmo_i(&params, s)?;
            (r.terms, r.value, r.tail_estimate)
        }
        CosmoSumKind::Cl if a.allow_tail => {
            let terms = cosmo_cl_terms(&params, a.ncut, s)?;
            let total: f64 = terms.iter().rev().sum();
            let env = terms[terms.len().saturating_sub(8)..].iter().fold(0.0f64, |m, t| m.max(t.abs()));
            (terms, total, env * a.ncut as f64)
        }
        CosmoSumKind::Cl => {
            let r = cosmo_cl(&params, a.ncut, s)?;
            (r.terms, r.value, r.tail_estimate)
        }
    };
    let slope = envelope_slope(&terms);
    let mut t = Table::new(&["n", "term"]);
    for (n, x) in terms.iter().enumerate() {
        t.rows.push(vec![Cell::Int(n as i64), Cell::Num(*x)]);
    }
    t.rows.push(vec![Cell::Str("total".into()), Cell::Num(total)]);
    t.rows.push(vec![Cell::Str("tail_estimate".into()), Cell::Num(tail)]);
    t.rows.push(vec![Cell::Str("tail_slope".into()), Cell::Num(slope.unwrap_or(f64::NAN))]);
    Ok(t)
}

fn run(cli: Cli) -> Result<(), Failure> {
    let cfg = build_config(&cli.global)?;
    if let Some(n) = cfg.threads {
        // a second call only fails if a pool already exists, which cannot happen here
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let (table, default_format) = match &cli.command {
        Command::EvalP(a) => (eval_p(&cfg, a)?, Format::Json),
        Command::EvalQ(a) => (eval_q(&cfg, a)?, Format::Json),
        Command::Poles(a) => (poles(&cfg, a)?, Format::Csv),
        Command::Coeffs(a) => (coeffs(&cfg, a)?, Format::Csv),
        Command::Check(a) => (check(&cfg, a)?, Format::Json),
        Command::Borwein(a) => (borwein(&cfg, a)?, Format::Json),
        Command::Sample(a) => (sample(&cfg, a)?, Format::Json),
        Command::Cosmo(a) => (cosmo(&cfg, a)?, Format::Csv),
    };
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    table
        .write(cfg.format.unwrap_or(default_format), &mut out)
        .map_err(|e| Failure::Compute(Error::InvalidArgument(format!("write failed: {e}"))))?;
    if let Command::Check(_) = cli.command {
        let failed: Vec<String> = table
            .rows
            .iter()
            .filter(|r| matches!(r.last(), Some(Cell::Bool(false))))
            .map(|r| r[0].csv())
            .collect();
        if !failed.is_empty() {
            return Err(Failure::Identity(failed));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(m)) => {
            eprintln!("usage error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Compute(e)) => {
            eprintln!("error={}: {e}", e.name());
            ExitCode::from(1)
        }
        Err(Failure::Identity(names)) => {
            eprintln!("error=IdentityFailed: {}", names.join(", "));
            ExitCode::from(1)
        }
    }
}
