//! File formats: curve and quote CSVs, randomizer JSON, number formatting
//! and atomic output.

use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use rhw_core::calib::{Quote, QuoteSet};
use rhw_core::{BivariateNormal, HwParams, Randomization, RandomizedSpec, Randomizer, YieldCurve};
use serde::{Deserialize, Serialize};

/// Input that failed to parse or validate; reported with kind `input`.
#[derive(Debug)]
pub struct InputError(pub String);

impl std::fmt::Display for InputError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for InputError {}

pub fn input_error(msg: impl Into<String>) -> anyhow::Error {
    anyhow::Error::new(InputError(msg.into()))
}

/// Fixed 15-significant-digit rendering used by every numeric CSV field.
pub fn num(v: f64) -> String {
    format!("{v:.14e}")
}

/// Writes `bytes` to `path` through a temporary file in the same directory
/// and a rename, so readers never see a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).with_context(|| format!("creating temporary file in {}", dir.display()))?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| anyhow!(e.error)).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

/// Curve CSV with header `tenor_years,zero_rate_cont_comp` or
/// `tenor_years,discount_factor`; the header picks the interpretation.
pub fn parse_curve(text: &str, source: &str) -> Result<YieldCurve> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let headers = rdr.headers().map_err(|e| input_error(format!("{source}: {e}")))?.clone();
    let cols: Vec<&str> = headers.iter().collect();
    let zero = match cols.as_slice() {
        ["tenor_years", "zero_rate_cont_comp"] => true,
        ["tenor_years", "discount_factor"] => false,
        _ => {
            return Err(input_error(format!(
                "{source}: line 1: header must be `tenor_years,zero_rate_cont_comp` or `tenor_years,discount_factor`, got `{}`",
                cols.join(",")
            )))
        }
    };
    let mut pillars = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| input_error(format!("{source}: {e}")))?;
        let line = rec.position().map_or(0, |p| p.line());
        let field = |i: usize| -> Result<f64> {
            let raw = rec.get(i).unwrap_or("");
            raw.parse::<f64>()
                .map_err(|_| input_error(format!("{source}: line {line}, field `{}`: not a number: `{raw}`", cols[i])))
        };
        pillars.push((field(0)?, field(1)?));
    }
    if pillars.is_empty() {
        return Err(input_error(format!("{source}: no pillars")));
    }
    let curve = if zero {
        YieldCurve::from_zero_rates(&pillars)
    } else {
        YieldCurve::from_discount_factors(&pillars)
    };
    curve.with_context(|| format!("{source}: curve rejected"))
}

pub fn read_curve(path: &Path) -> Result<YieldCurve> {
    parse_curve(&read_text(path)?, &path.display().to_string())
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct QuoteRow {
    expiry: f64,
    tenor: f64,
    strike: f64,
    market_iv: f64,
    shift: f64,
}

/// Quotes CSV with header `expiry,tenor,strike,market_iv,shift`.
pub fn parse_quotes(text: &str, source: &str) -> Result<QuoteSet> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let expected = ["expiry", "tenor", "strike", "market_iv", "shift"];
    let headers = rdr.headers().map_err(|e| input_error(format!("{source}: {e}")))?.clone();
    if headers.iter().collect::<Vec<_>>() != expected {
        return Err(input_error(format!(
            "{source}: line 1: header must be `{}`",
            expected.join(",")
        )));
    }
    let mut quotes = Vec::new();
    for row in rdr.deserialize::<QuoteRow>() {
        let row = row.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            let field = match e.kind() {
                csv::ErrorKind::Deserialize { err, .. } => err.field().and_then(|i| expected.get(i as usize)).copied(),
                _ => None,
            };
            match field {
                Some(f) => input_error(format!("{source}: line {line}, field `{f}`: {e}")),
                None => input_error(format!("{source}: line {line}: {e}")),
            }
        })?;
        quotes.push(Quote {
            expiry: row.expiry,
            tenor: row.tenor,
            strike: row.strike,
            market_iv: row.market_iv,
            shift: row.shift,
        });
    }
    QuoteSet::new(quotes).with_context(|| format!("{source}: quote set rejected"))
}

pub fn read_quotes(path: &Path) -> Result<QuoteSet> {
    parse_quotes(&read_text(path)?, &path.display().to_string())
}

pub fn quotes_csv(quotes: &[Quote]) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["expiry", "tenor", "strike", "market_iv", "shift"]).expect("in-memory write");
    for q in quotes {
        w.write_record([num(q.expiry), num(q.tenor), num(q.strike), num(q.market_iv), num(q.shift)])
            .expect("in-memory write");
    }
    w.into_inner().expect("in-memory write")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Target {
    Eta,
    Lambda,
    Both,
}

/// Randomizer specification, e.g.
/// `{"target":"lambda","dist":"normal","params":[0.1,0.45],"eta":0.0091,"N":5}`
/// or `{"target":"both","mu_eta":0.008,"sigma_eta":0.002,"mu_lambda":0.5,"sigma_lambda":0.05,"rho":0.5,"N":5,"M":5}`.
///
/// `eta` (target `lambda`) and `lambda` (target `eta`) give the fixed
/// Hull-White coordinate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomizerConfig {
    pub target: Target,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dist: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu_eta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma_eta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu_lambda: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma_lambda: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho: Option<f64>,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "M", default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
}

impl RandomizerConfig {
    /// Inline JSON (starting with `{`) or a path to a JSON file.
    pub fn load(arg: &str) -> Result<Self> {
        let (text, source) = if arg.trim_start().starts_with('{') {
            (arg.to_owned(), "--randomizer".to_owned())
        } else {
            (read_text(Path::new(arg))?, arg.to_owned())
        };
        serde_json::from_str(&text).map_err(|e| input_error(format!("{source}: {e}")))
    }

    pub fn to_spec(&self) -> Result<RandomizedSpec> {
        let need = |v: Option<f64>, name: &str| v.ok_or_else(|| input_error(format!("randomizer: missing field `{name}`")));
        let family = || -> Result<Randomizer> {
            let dist = self.dist.as_deref().ok_or_else(|| input_error("randomizer: missing field `dist`"))?;
            let params = self.params.as_deref().ok_or_else(|| input_error("randomizer: missing field `params`"))?;
            Randomizer::from_name(dist, params).context("randomizer")
        };
        let spec = match self.target {
            Target::Lambda => RandomizedSpec::new(
                Randomization::Lambda {
                    eta: need(self.eta, "eta")?,
                    randomizer: family()?,
                },
                self.n,
            ),
            Target::Eta => RandomizedSpec::new(
                Randomization::Eta {
                    lambda: need(self.lambda, "lambda")?,
                    randomizer: family()?,
                },
                self.n,
            ),
            Target::Both => {
                let b = BivariateNormal::new(
                    need(self.mu_eta, "mu_eta")?,
                    need(self.sigma_eta, "sigma_eta")?,
                    need(self.mu_lambda, "mu_lambda")?,
                    need(self.sigma_lambda, "sigma_lambda")?,
                    need(self.rho, "rho")?,
                )
                .context("randomizer")?;
                RandomizedSpec::bivariate(b, self.n, self.m.unwrap_or(self.n))
            }
        };
        if let Randomization::Lambda { eta, .. } = spec.randomization {
            HwParams::new(0.0, eta).context("randomizer")?;
        }
        if let Randomization::Eta { lambda, .. } = spec.randomization {
            HwParams::new(lambda, 0.0).context("randomizer")?;
        }
        // surfaces quadrature problems before any output is produced
        spec.realizations().context("randomizer")?;
        Ok(spec)
    }
}

/// Splits a `--config` JSON object into `--key=value` arguments. Arrays are
/// comma-joined, objects passed as compact JSON, `true` becomes a bare flag
/// and `false` is dropped. Underscores in keys map to dashes.
pub fn config_to_args(text: &str, source: &str) -> Result<Vec<String>> {
    let value: serde_json::Value = serde_json::from_str(text).map_err(|e| input_error(format!("{source}: {e}")))?;
    let obj = value
        .as_object()
        .ok_or_else(|| input_error(format!("{source}: top level must be a JSON object")))?;
    let mut out = Vec::new();
    for (key, v) in obj {
        let flag = format!("--{}", key.replace('_', "-"));
        let scalar = |v: &serde_json::Value| -> Result<String> {
            match v {
                serde_json::Value::String(s) => Ok(s.clone()),
                serde_json::Value::Number(n) => Ok(n.to_string()),
                _ => bail!(input_error(format!("{source}: key `{key}`: arrays may only hold numbers or strings"))),
            }
        };
        match v {
            serde_json::Value::Bool(true) => out.push(flag),
            serde_json::Value::Bool(false) | serde_json::Value::Null => {}
            serde_json::Value::Array(items) => {
                let parts: Result<Vec<String>> = items.iter().map(scalar).collect();
                out.push(format!("{flag}={}", parts?.join(",")));
            }
            serde_json::Value::Object(_) => out.push(format!("{flag}={v}")),
            other => out.push(format!("{flag}={}", scalar(other)?)),
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rhw_core::DiscountCurve;

    #[test]
    fn fifteen_significant_digits() {
        assert_eq!(num(0.5), "5.00000000000000e-1");
        assert_eq!(num(-1234.5678), "-1.23456780000000e3");
        assert_eq!(num(0.0031862), "3.18620000000000e-3");
    }

    #[test]
    fn curve_header_decides_interpretation() {
        let z = parse_curve("tenor_years,zero_rate_cont_comp\n1,0.03\n2,0.03\n", "z").unwrap();
        let d = parse_curve(
            &format!("tenor_years,discount_factor\n1,{}\n2,{}\n", (-0.03f64).exp(), (-0.06f64).exp()),
            "d",
        )
        .unwrap();
        for t in [0.5, 1.0, 1.7] {
            assert!((z.discount(t).unwrap() - d.discount(t).unwrap()).abs() < 1e-15);
        }
        let err = parse_curve("tenor,rate\n1,0.03\n", "bad").unwrap_err().to_string();
        assert!(err.contains("line 1"), "{err}");
        let err = parse_curve("tenor_years,discount_factor\n1,0.97\n2,abc\n", "bad").unwrap_err().to_string();
        assert!(err.contains("line 3") && err.contains("discount_factor"), "{err}");
    }

    #[test]
    fn quotes_round_trip() {
        let text = "expiry,tenor,strike,market_iv,shift\n1,1,0.03,0.2,0.01\n1,1,0.035,0.21,0.01\n";
        let q = parse_quotes(text, "q").unwrap();
        assert_eq!(q.quotes().len(), 2);
        let again = parse_quotes(std::str::from_utf8(&quotes_csv(q.quotes())).unwrap(), "q2").unwrap();
        assert_eq!(q, again);
        assert!(parse_quotes("expiry,tenor,strike,market_iv,shift\n", "empty").is_err());
        let err = parse_quotes("expiry,tenor,strike,market_iv,shift\n1,1,x,0.2,0\n", "bad").unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
    }

    #[test]
    fn randomizer_json() {
        let cfg = RandomizerConfig::load(r#"{"target":"lambda","dist":"normal","params":[0.1,0.45],"eta":0.0091,"N":5}"#).unwrap();
        let spec = cfg.to_spec().unwrap();
        assert_eq!(spec.nodes, 5);
        assert!(matches!(spec.randomization, Randomization::Lambda { eta, .. } if eta == 0.0091));
        let both = RandomizerConfig::load(
            r#"{"target":"both","mu_eta":0.008,"sigma_eta":0.002,"mu_lambda":0.5,"sigma_lambda":0.05,"rho":0.5,"N":3,"M":4}"#,
        )
        .unwrap()
        .to_spec()
        .unwrap();
        assert_eq!((both.nodes, both.inner_nodes), (3, 4));
        let missing = RandomizerConfig::load(r#"{"target":"lambda","dist":"normal","params":[0.1,0.45],"N":5}"#)
            .unwrap()
            .to_spec()
            .unwrap_err();
        assert!(missing.to_string().contains("eta"));
        let typo = RandomizerConfig::load(r#"{"target":"lambda","distr":"normal","N":5}"#).unwrap_err();
        assert!(typo.to_string().contains("line 1"), "{typo}");
    }

    #[test]
    fn config_keys_become_flags() {
        let args = config_to_args(
            r#"{"expiry":5,"n_list":[1,2,3],"randomizer":{"target":"eta"},"flat_rate":0.03,"x":true,"y":false}"#,
            "c",
        )
        .unwrap();
        let mut expected = vec![
            "--expiry=5",
            "--n-list=1,2,3",
            r#"--randomizer={"target":"eta"}"#,
            "--flat-rate=0.03",
            "--x",
        ];
        let mut got: Vec<&str> = args.iter().map(String::as_str).collect();
        expected.sort_unstable();
        got.sort_unstable();
        assert_eq!(got, expected);
        assert!(config_to_args("[1]", "c").is_err());
    }

    #[test]
    fn atomic_write_replaces_file() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("out.csv");
        write_atomic(&p, b"a\n").unwrap();
        write_atomic(&p, b"b\n").unwrap();
        assert_eq!(fs::read(&p).unwrap(), b"b\n");
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
