//! Command-line front end.
//!
//! Every command computes its full output in memory first; files are then
//! written atomically, so a failing run leaves no partial artifacts.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rhw_core::black::implied_vol_from_quote;
use rhw_core::calib::{quote_swaption, CalibrationConfig, CalibrationResult, Scheme};
use rhw_core::hw::{self, zcb_option};
use rhw_core::mixture::{density_distance, EulerGrid, LocalVolField, MixtureDensity, MIN_DISTANCE_SAMPLES};
use rhw_core::randomized::{rswaption, rzcb, rzcb_option};
use rhw_core::{
    quadrature_pairs, HwParams, OptionSide, Randomization, RandomizedSpec, Randomizer, SwapRateQuote, SwaptionSide,
    SwaptionSpec, YieldCurve,
};
use serde::Serialize;

use crate::driver;
use crate::io::{self, input_error, num, InputError, RandomizerConfig};

const SUBCOMMANDS: [&str; 8] = [
    "quadrature",
    "price-zcb",
    "price-swaption",
    "surface",
    "density",
    "simulate",
    "convergence",
    "calibrate",
];

#[derive(Debug, Parser)]
#[command(
    name = "rhw",
    version,
    about = "Randomized Hull-White pricing, calibration and verification",
    args_override_self = true,
    allow_negative_numbers = true
)]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// JSON object whose keys are long flag names (`_` or `-`); flags on the
    /// command line take precedence.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Curve CSV (`tenor_years,zero_rate_cont_comp` or `tenor_years,discount_factor`).
    #[arg(long, global = true, value_name = "FILE")]
    pub curve: Option<PathBuf>,
    /// Flat continuously compounded rate, used when no curve file is given.
    #[arg(long, global = true, default_value_t = 0.03)]
    pub flat_rate: f64,
    /// Randomizer JSON, inline or as a path.
    #[arg(long, global = true, value_name = "JSON|FILE")]
    pub randomizer: Option<String>,
    /// Overrides the randomizer's `N`.
    #[arg(long, global = true)]
    pub nodes: Option<usize>,
    /// Overrides the randomizer's `M` (bivariate inner size).
    #[arg(long, global = true)]
    pub inner_nodes: Option<usize>,
    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,
    /// Black shift used for implied volatilities.
    #[arg(long, global = true, default_value_t = 0.0)]
    pub shift: f64,
    /// Output file; without it the table goes to stdout and the summary to stderr.
    #[arg(long, short, global = true, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

/// Plain Hull-White parameters, an alternative to `--randomizer`.
#[derive(Debug, Args, Clone, Copy)]
pub struct PlainHw {
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub eta: Option<f64>,
}

#[derive(Debug, Args, Clone)]
pub struct SwaptionArgs {
    #[arg(long)]
    pub expiry: f64,
    #[arg(long)]
    pub tenor: f64,
    /// Fixed-leg payments per year.
    #[arg(long, default_value_t = 1)]
    pub frequency: u32,
    /// Defaults to the at-the-money forward swap rate.
    #[arg(long)]
    pub strike: Option<f64>,
    #[arg(long, value_enum, default_value_t = Side::Payer)]
    pub side: Side,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Side {
    Payer,
    Receiver,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BondSide {
    Call,
    Put,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SchemeArg {
    FixedMean,
    FullyFree,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Gauss quadrature pairs of a randomizer.
    #[command(args_override_self = true, allow_negative_numbers = true)]
    Quadrature {
        #[arg(long)]
        dist: String,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        params: Vec<f64>,
        #[arg(long = "n")]
        n: usize,
    },
    /// Zero-coupon bond, or a European option on one when `--expiry` is set.
    #[command(args_override_self = true, allow_negative_numbers = true)]
    PriceZcb {
        #[arg(long)]
        maturity: f64,
        #[arg(long)]
        expiry: Option<f64>,
        #[arg(long)]
        strike: Option<f64>,
        #[arg(long, value_enum, default_value_t = BondSide::Call)]
        side: BondSide,
        #[command(flatten)]
        hw: PlainHw,
    },
    /// European swaption price and its shifted-Black implied volatility.
    #[command(args_override_self = true, allow_negative_numbers = true)]
    PriceSwaption {
        #[command(flatten)]
        swaption: SwaptionArgs,
        #[command(flatten)]
        hw: PlainHw,
    },
    /// Implied-volatility surface on ATM-relative strikes (out-of-the-money side).
    #[command(args_override_self = true, allow_negative_numbers = true)]
    Surface {
        #[arg(long, value_delimiter = ',', required = true)]
        expiries: Vec<f64>,
        #[arg(long, value_delimiter = ',', required = true)]
        tenors: Vec<f64>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_value = "-0.01,-0.005,0,0.005,0.01")]
        offsets: Vec<f64>,
        #[arg(long, default_value_t = 1)]
        frequency: u32,
        #[command(flatten)]
        hw: PlainHw,
    },
    /// Normal-mixture density of the short rate at time `t`.
    #[command(args_override_self = true, allow_negative_numbers = true)]
    Density {
        #[arg(long)]
        t: f64,
        /// Defaults to the mixture mean minus six standard deviations.
        #[arg(long)]
        y_min: Option<f64>,
        #[arg(long)]
        y_max: Option<f64>,
        #[arg(long, default_value_t = 201)]
        points: usize,
    },
    /// Euler simulation of the local-volatility SDE with a KS verdict
    /// against the mixture marginal at every observation time.
    #[command(args_override_self = true, allow_negative_numbers = true)]
    Simulate {
        #[arg(long, value_delimiter = ',', required = true)]
        times: Vec<f64>,
        #[arg(long, default_value_t = 200_000)]
        paths: usize,
        #[arg(long, default_value_t = 500)]
        steps_per_year: usize,
        #[arg(long, default_value_t = 10_000)]
        chunk_size: usize,
        /// Verdict JSON file; the verdict is always printed as the summary.
        #[arg(long)]
        verdict: Option<PathBuf>,
    },
    /// Swaption price against the quadrature size.
    #[command(args_override_self = true, allow_negative_numbers = true)]
    Convergence {
        #[command(flatten)]
        swaption: SwaptionArgs,
        /// The largest entry is the reference.
        #[arg(long, value_delimiter = ',', default_value = "1,2,3,5,8,10,20")]
        n_list: Vec<usize>,
    },
    /// Per-expiry calibration of `eta` and `lambda ~ N(mean, sigma^2)` to a quotes CSV.
    #[command(args_override_self = true, allow_negative_numbers = true)]
    Calibrate {
        /// CSV `expiry,tenor,strike,market_iv,shift`.
        #[arg(long)]
        quotes: PathBuf,
        #[arg(long, value_enum, default_value_t = SchemeArg::FixedMean)]
        scheme: SchemeArg,
        /// Fixed randomizer mean for `fixed-mean`.
        #[arg(long, default_value_t = 0.1)]
        mean: f64,
        #[arg(long, default_value_t = 5)]
        search_nodes: usize,
        #[arg(long, default_value_t = 20)]
        final_nodes: usize,
        #[arg(long, default_value_t = 1)]
        frequency: u32,
    },
}

/// Result of a command before anything is written.
#[derive(Debug, Default)]
pub struct Output {
    pub body: Vec<u8>,
    pub summary: String,
    pub extra: Vec<(PathBuf, Vec<u8>)>,
}

/// Removes `--config FILE` and splices the file's flags in right after the
/// subcommand, ahead of the user's own flags, so the latter win.
pub fn expand_config(args: Vec<OsString>) -> Result<Vec<OsString>> {
    let mut rest = Vec::with_capacity(args.len());
    let mut config = None;
    let mut it = args.into_iter();
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        if s == "--config" {
            let path = it.next().ok_or_else(|| input_error("--config needs a file"))?;
            config = Some(PathBuf::from(path));
        } else if let Some(p) = s.strip_prefix("--config=") {
            config = Some(PathBuf::from(p));
        } else {
            rest.push(a);
        }
    }
    let Some(path) = config else { return Ok(rest) };
    let text = std::fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
    let extra = io::config_to_args(&text, &path.display().to_string())?;
    let at = rest
        .iter()
        .position(|a| SUBCOMMANDS.contains(&a.to_string_lossy().as_ref()))
        .map_or(rest.len(), |i| i + 1);
    rest.splice(at..at, extra.into_iter().map(OsString::from));
    Ok(rest)
}

fn curve(common: &Common) -> Result<YieldCurve> {
    match &common.curve {
        Some(p) => io::read_curve(p),
        None => YieldCurve::flat(common.flat_rate).context("--flat-rate"),
    }
}

fn randomized_spec(common: &Common) -> Result<RandomizedSpec> {
    let raw = common
        .randomizer
        .as_deref()
        .ok_or_else(|| input_error("missing --randomizer"))?;
    let mut cfg = RandomizerConfig::load(raw)?;
    if let Some(n) = common.nodes {
        cfg.n = n;
    }
    if let Some(m) = common.inner_nodes {
        cfg.m = Some(m);
    }
    cfg.to_spec()
}

enum Model {
    Plain(HwParams),
    Randomized(RandomizedSpec),
}

fn model(common: &Common, hw: &PlainHw) -> Result<Model> {
    match (hw.lambda, hw.eta, &common.randomizer) {
        (Some(l), Some(e), None) => Ok(Model::Plain(HwParams::new(l, e).context("plain Hull-White parameters")?)),
        (None, None, Some(_)) => Ok(Model::Randomized(randomized_spec(common)?)),
        (None, None, None) => Err(input_error("give --randomizer or both --lambda and --eta")),
        (_, _, Some(_)) => Err(input_error("--lambda/--eta and --randomizer are mutually exclusive")),
        _ => Err(input_error("plain Hull-White mode needs both --lambda and --eta")),
    }
}

fn swaption(c: &YieldCurve, a: &SwaptionArgs) -> Result<(SwaptionSpec, SwapRateQuote)> {
    let side = match a.side {
        Side::Payer => SwaptionSide::Payer,
        Side::Receiver => SwaptionSide::Receiver,
    };
    let probe = SwaptionSpec::regular(a.expiry, a.tenor, a.frequency, 0.0, side).context("swaption")?;
    let rate = SwapRateQuote::from_curve(c, &probe)?;
    Ok((probe.with_strike(a.strike.unwrap_or(rate.forward)), rate))
}

fn price_swaption(c: &YieldCurve, m: &Model, s: &SwaptionSpec) -> Result<f64> {
    Ok(match m {
        Model::Plain(p) => hw::swaption_hw(c, p, s)?,
        Model::Randomized(spec) => rswaption(c, spec, s)?,
    })
}

fn side_name(s: SwaptionSide) -> &'static str {
    match s {
        SwaptionSide::Payer => "payer",
        SwaptionSide::Receiver => "receiver",
    }
}

fn csv_table(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(&r).expect("in-memory write");
    }
    w.into_inner().expect("in-memory write")
}

#[derive(Serialize)]
struct TimeVerdict {
    t: f64,
    ks: f64,
    l1: f64,
    ks_critical: f64,
    pass: bool,
}

#[derive(Serialize)]
struct Verdict {
    ks: f64,
    l1: f64,
    pass: bool,
    paths: usize,
    seed: u64,
    times: Vec<TimeVerdict>,
}

#[derive(Serialize)]
struct ExpiryFit {
    expiry: f64,
    eta: f64,
    lambda_mean: f64,
    lambda_sigma: f64,
    rmse_vol_points: f64,
    final_nodes: usize,
    search_rmse_vol_points: f64,
    evaluations: usize,
    iterations: usize,
    converged: bool,
    residuals_vol_points: Vec<f64>,
}

impl From<&CalibrationResult> for ExpiryFit {
    fn from(r: &CalibrationResult) -> Self {
        ExpiryFit {
            expiry: r.expiry,
            eta: r.params.eta,
            lambda_mean: r.params.lambda_mean,
            lambda_sigma: r.params.lambda_sigma,
            rmse_vol_points: r.objective,
            final_nodes: r.final_nodes,
            search_rmse_vol_points: r.search_objective,
            evaluations: r.evaluations,
            iterations: r.iterations,
            converged: r.converged,
            residuals_vol_points: r.residuals.clone(),
        }
    }
}

#[derive(Serialize)]
struct CalibrationReport {
    scheme: &'static str,
    fixed_lambda_mean: Option<f64>,
    search_nodes: usize,
    expiries: Vec<ExpiryFit>,
}

/// Runs a parsed command.
pub fn run(cli: &Cli) -> Result<Output> {
    let common = &cli.common;
    match &cli.command {
        Command::Quadrature { dist, params, n } => {
            let r = Randomizer::from_name(dist, params).context("--dist/--params")?;
            let rule = quadrature_pairs(&r, *n)?;
            let body = csv_table(&["weight", "node"], rule.iter().map(|(w, x)| vec![num(w), num(x)]));
            Ok(Output {
                body,
                summary: format!("quadrature: {} pairs for {} {:?}", rule.len(), r.name(), params),
                extra: vec![],
            })
        }
        Command::PriceZcb {
            maturity,
            expiry,
            strike,
            side,
            hw: plain,
        } => {
            let c = curve(common)?;
            let m = model(common, plain)?;
            match expiry {
                None => {
                    let price = match &m {
                        Model::Plain(p) => hw::zcb_price(&c, p, 0.0, *maturity, hw::initial_short_rate(&c)?)?,
                        Model::Randomized(spec) => rzcb(&c, spec, *maturity)?,
                    };
                    Ok(Output {
                        body: csv_table(&["maturity", "price"], [vec![num(*maturity), num(price)]]),
                        summary: format!("price-zcb: P(0, {maturity}) = {}", num(price)),
                        extra: vec![],
                    })
                }
                Some(t) => {
                    let k = strike.ok_or_else(|| input_error("bond option needs --strike"))?;
                    let (os, name) = match side {
                        BondSide::Call => (OptionSide::Call, "call"),
                        BondSide::Put => (OptionSide::Put, "put"),
                    };
                    let price = match &m {
                        Model::Plain(p) => zcb_option(&c, p, *t, *maturity, k, os)?,
                        Model::Randomized(spec) => rzcb_option(&c, spec, *t, *maturity, k, os)?,
                    };
                    Ok(Output {
                        body: csv_table(
                            &["expiry", "maturity", "strike", "side", "price"],
                            [vec![num(*t), num(*maturity), num(k), name.to_owned(), num(price)]],
                        ),
                        summary: format!("price-zcb: {name} on P({t}, {maturity}) at {k} = {}", num(price)),
                        extra: vec![],
                    })
                }
            }
        }
        Command::PriceSwaption { swaption: a, hw: plain } => {
            let c = curve(common)?;
            let m = model(common, plain)?;
            let (s, rate) = swaption(&c, a)?;
            let price = price_swaption(&c, &m, &s)?;
            let iv = implied_vol_from_quote(price, &rate, s.strike(), s.side(), common.shift)
                .map(num)
                .unwrap_or_default();
            Ok(Output {
                body: csv_table(
                    &["expiry", "tenor", "strike", "side", "price", "implied_vol"],
                    [vec![
                        num(a.expiry),
                        num(a.tenor),
                        num(s.strike()),
                        side_name(s.side()).to_owned(),
                        num(price),
                        iv.clone(),
                    ]],
                ),
                summary: format!("price-swaption: {} = {} (implied vol {})", side_name(s.side()), num(price), if iv.is_empty() { "n/a" } else { &iv }),
                extra: vec![],
            })
        }
        Command::Surface {
            expiries,
            tenors,
            offsets,
            frequency,
            hw: plain,
        } => {
            let c = curve(common)?;
            let m = model(common, plain)?;
            let mut rows = Vec::new();
            for &t in expiries {
                for &tenor in tenors {
                    let probe = SwaptionSpec::regular(t, tenor, *frequency, 0.0, SwaptionSide::Payer).context("swaption")?;
                    let atm = SwapRateQuote::from_curve(&c, &probe)?.forward;
                    for &o in offsets {
                        let q = rhw_core::calib::Quote {
                            expiry: t,
                            tenor,
                            strike: atm + o,
                            market_iv: 1.0,
                            shift: common.shift,
                        };
                        let (s, rate) = quote_swaption(&c, &q, *frequency)?;
                        let price = price_swaption(&c, &m, &s)?;
                        let iv = implied_vol_from_quote(price, &rate, q.strike, s.side(), common.shift)
                            .with_context(|| format!("implied vol at expiry {t}, tenor {tenor}, strike {}", q.strike))?;
                        rows.push(vec![num(t), num(tenor), num(q.strike), num(iv)]);
                    }
                }
            }
            let n = rows.len();
            Ok(Output {
                body: csv_table(&["expiry", "tenor", "strike", "model_iv"], rows),
                summary: format!("surface: {n} points"),
                extra: vec![],
            })
        }
        Command::Density { t, y_min, y_max, points } => {
            let c = curve(common)?;
            let spec = randomized_spec(common)?;
            let mix = MixtureDensity::from_spec(&c, &spec, *t)?;
            let sd = mix.variance().sqrt();
            let lo = y_min.unwrap_or(mix.mean() - 6.0 * sd);
            let hi = y_max.unwrap_or(mix.mean() + 6.0 * sd);
            if !(*points >= 2 && hi > lo) {
                return Err(input_error("density grid needs --points >= 2 and y-max > y-min"));
            }
            let rows = (0..*points).map(|i| {
                let y = lo + (hi - lo) * i as f64 / (*points - 1) as f64;
                vec![num(y), num(mix.pdf(y))]
            });
            Ok(Output {
                body: csv_table(&["y", "pdf"], rows),
                summary: format!("density: {points} points on [{}, {}] at t = {t}", num(lo), num(hi)),
                extra: vec![],
            })
        }
        Command::Simulate {
            times,
            paths,
            steps_per_year,
            chunk_size,
            verdict,
        } => {
            if *paths < MIN_DISTANCE_SAMPLES {
                return Err(input_error(format!("the verdict needs at least {MIN_DISTANCE_SAMPLES} paths")));
            }
            let c = curve(common)?;
            let spec = randomized_spec(common)?;
            let field = LocalVolField::from_spec(&spec)?;
            let grid = EulerGrid::new(times, *steps_per_year)?;
            let mixtures: Vec<MixtureDensity> = times
                .iter()
                .map(|&t| MixtureDensity::from_spec(&c, &spec, t))
                .collect::<rhw_core::Result<_>>()?;
            let samples = driver::simulate(&field, &c, &grid, *paths, *chunk_size, common.seed)?;
            let mut per_time = Vec::new();
            for ((&t, xs), mix) in times.iter().zip(&samples).zip(&mixtures) {
                let d = density_distance(xs, mix)?;
                per_time.push(TimeVerdict {
                    t,
                    ks: d.ks,
                    l1: d.l1,
                    ks_critical: d.ks_critical,
                    pass: d.passes(),
                });
            }
            let last = per_time.last().expect("at least one observation time");
            let v = Verdict {
                ks: last.ks,
                l1: last.l1,
                pass: per_time.iter().all(|p| p.pass),
                paths: *paths,
                seed: common.seed,
                times: per_time,
            };
            let mut header = vec!["path".to_owned()];
            header.extend(times.iter().map(|t| format!("r({t})")));
            let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
            let rows = (0..*paths).map(|i| {
                let mut row = vec![i.to_string()];
                row.extend(samples.iter().map(|s| num(s[i])));
                row
            });
            let body = csv_table(&header_refs, rows);
            let summary = serde_json::to_string(&v)?;
            let extra = verdict
                .iter()
                .map(|p| (p.clone(), serde_json::to_vec_pretty(&v).expect("serializable")))
                .collect();
            Ok(Output { body, summary, extra })
        }
        Command::Convergence { swaption: a, n_list } => {
            if n_list.is_empty() {
                return Err(input_error("--n-list is empty"));
            }
            let c = curve(common)?;
            let base = randomized_spec(common)?;
            let (s, _) = swaption(&c, a)?;
            let at = |n: usize| -> Result<f64> {
                let spec = match base.randomization {
                    Randomization::Both(b) => RandomizedSpec::bivariate(b, n, n),
                    _ => base.with_nodes(n),
                };
                rswaption(&c, &spec, &s).with_context(|| format!("N = {n}"))
            };
            let reference_n = *n_list.iter().max().expect("non-empty");
            let reference = at(reference_n)?;
            let mut rows = Vec::new();
            for &n in n_list {
                let v = at(n)?;
                rows.push(vec![n.to_string(), num(v), num((v - reference).abs())]);
            }
            Ok(Output {
                body: csv_table(&["N", "price", "abs_error"], rows),
                summary: format!("convergence: reference N = {reference_n}, price {}", num(reference)),
                extra: vec![],
            })
        }
        Command::Calibrate {
            quotes,
            scheme,
            mean,
            search_nodes,
            final_nodes,
            frequency,
        } => {
            let c = curve(common)?;
            let qs = io::read_quotes(quotes)?;
            let config = CalibrationConfig {
                scheme: match scheme {
                    SchemeArg::FixedMean => Scheme::FixedMean { mean: *mean },
                    SchemeArg::FullyFree => Scheme::FullyFree,
                },
                search_nodes: *search_nodes,
                final_nodes: *final_nodes,
                frequency: *frequency,
                ..CalibrationConfig::default()
            };
            let results = driver::calibrate(&c, &qs, &config)?;
            let worst = results.iter().map(|r| r.objective).fold(0.0, f64::max);
            let report = CalibrationReport {
                scheme: match scheme {
                    SchemeArg::FixedMean => "fixed-mean",
                    SchemeArg::FullyFree => "fully-free",
                },
                fixed_lambda_mean: matches!(scheme, SchemeArg::FixedMean).then_some(*mean),
                search_nodes: *search_nodes,
                expiries: results.iter().map(ExpiryFit::from).collect(),
            };
            let mut body = serde_json::to_vec_pretty(&report)?;
            body.push(b'\n');
            Ok(Output {
                body,
                summary: format!("calibrate: {} expiries, worst RMSE {} vol points", results.len(), num(worst)),
                extra: vec![],
            })
        }
    }
}

/// Machine-readable failure kind: the core error variant name, `input`,
/// `io`, `usage` or `runtime`.
pub fn error_kind(e: &anyhow::Error) -> &'static str {
    for cause in e.chain() {
        if let Some(core) = cause.downcast_ref::<rhw_core::Error>() {
            return core.kind();
        }
        if cause.downcast_ref::<InputError>().is_some() {
            return "input";
        }
        if cause.downcast_ref::<std::io::Error>().is_some() {
            return "io";
        }
    }
    "runtime"
}

fn report_error(kind: &str, message: &str) {
    let line = serde_json::json!({ "error": kind, "message": message });
    let _ = writeln!(std::io::stderr(), "{line}");
}

fn emit(cli: &Cli, out: Output) -> Result<()> {
    match &cli.common.out {
        Some(p) => io::write_atomic(p, &out.body)?,
        None => std::io::stdout().write_all(&out.body)?,
    }
    for (p, bytes) in &out.extra {
        io::write_atomic(p, bytes)?;
    }
    if cli.common.out.is_some() {
        println!("{}", out.summary);
    } else {
        eprintln!("{}", out.summary);
    }
    Ok(())
}

/// Full front end: config expansion, parsing, execution and output. Returns
/// the process exit code.
pub fn main_with(args: Vec<OsString>) -> i32 {
    let args = match expand_config(args) {
        Ok(a) => a,
        Err(e) => {
            report_error(error_kind(&e), &format!("{e:#}"));
            return 2;
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return 0;
            }
            report_error("usage", e.to_string().trim_end());
            return 2;
        }
    };
    match run(&cli).and_then(|out| emit(&cli, out)) {
        Ok(()) => 0,
        Err(e) => {
            report_error(error_kind(&e), &format!("{e:#}"));
            1
        }
    }
}
