//! Flat `key = value` experiment configuration files with `#` comments.

use anyhow::{anyhow, bail, Context, Result};
use gausslab::distexp::ExperimentConfig;
use gausslab::expsums::WeightFunction;
use gausslab::numtheory::TorusSet;
use std::collections::BTreeMap;

/// Which experiment the config drives.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    Short,
    Long,
    Horocycle,
}

/// Parsed experiment file: the library config plus CLI-level knobs.
#[derive(Debug, Clone)]
pub struct FileConfig {
    pub kind: ExperimentKind,
    pub experiment: ExperimentConfig,
    pub bins: usize,
    pub figure: bool,
    /// Long kind: series truncation for the reference law.
    pub g_series_terms: u64,
    /// Horocycle kind: height, or q^{-exponent} when given as exponent.
    pub y: f64,
    /// Raw text, echoed into the manifest.
    pub raw: String,
}

pub fn parse_weight(spec: &str) -> Result<WeightFunction> {
    let parts: Vec<&str> = spec.split(':').collect();
    match parts.as_slice() {
        ["indicator", lo, hi] => {
            WeightFunction::indicator(lo.parse()?, hi.parse()?).map_err(|e| anyhow!(e))
        }
        ["hermite", nu] => WeightFunction::hermite(nu.parse()?).map_err(|e| anyhow!(e)),
        ["zero"] => Ok(WeightFunction::zero()),
        _ => bail!("unknown weight {spec:?}; expected indicator:lo:hi, hermite:nu or zero"),
    }
}

pub fn parse(raw: &str) -> Result<FileConfig> {
    let mut keys: BTreeMap<String, String> = BTreeMap::new();
    for (lineno, line) in raw.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .with_context(|| format!("line {}: expected key = value", lineno + 1))?;
        keys.insert(key.trim().to_string(), value.trim().to_string());
    }
    let get = |key: &str| keys.get(key).cloned();
    let parse_as = |key: &str, default: Option<&str>| -> Result<String> {
        get(key)
            .or_else(|| default.map(str::to_string))
            .ok_or_else(|| anyhow!("missing required key {key}"))
    };

    let kind = match parse_as("kind", Some("short"))?.as_str() {
        "short" => ExperimentKind::Short,
        "long" => ExperimentKind::Long,
        "horocycle" => ExperimentKind::Horocycle,
        other => bail!("unknown kind {other:?}"),
    };
    let q: u64 = parse_as("q", None)?.parse().context("q")?;
    let a: u64 = parse_as("a", Some("1"))?.parse().context("a")?;

    let mut experiment = ExperimentConfig::theorem1(a, q);
    if let Some(alpha) = get("alpha") {
        experiment.n_alpha = alpha.parse().context("alpha")?;
    }
    if let Some(coeff) = get("coeff") {
        experiment.n_coeff = coeff.parse().context("coeff")?;
    }
    if let Some(n) = get("n") {
        experiment.n_fixed = Some(n.parse().context("n")?);
    }
    if let Some(d) = get("d") {
        experiment.d = d.parse::<TorusSet>().map_err(|e| anyhow!(e))?;
    }
    if let Some(w) = get("weight") {
        experiment.weight = parse_weight(&w)?;
    }
    if let Some(r) = get("reference_samples") {
        experiment.reference_samples = r.parse().context("reference_samples")?;
    }
    if let Some(s) = get("seed") {
        experiment.seed = s.parse().context("seed")?;
    }

    let bins: usize = parse_as("bins", Some(if kind == ExperimentKind::Horocycle {
        "20"
    } else {
        "60"
    }))?
    .parse()
    .context("bins")?;
    let figure = parse_as("figure", Some("false"))?.parse().context("figure")?;
    let g_series_terms: u64 = parse_as("g_series_terms", Some("2500"))?
        .parse()
        .context("g_series_terms")?;
    let y = if let Some(y) = get("y") {
        y.parse().context("y")?
    } else {
        let expo: f64 = parse_as("y_exponent", Some("1.75"))?
            .parse()
            .context("y_exponent")?;
        (q as f64).powf(-expo)
    };

    let known = [
        "kind", "q", "a", "alpha", "coeff", "n", "d", "weight", "reference_samples", "seed",
        "bins", "figure", "g_series_terms", "y", "y_exponent",
    ];
    for key in keys.keys() {
        if !known.contains(&key.as_str()) {
            bail!("unknown key {key:?}");
        }
    }

    Ok(FileConfig {
        kind,
        experiment,
        bins,
        figure,
        g_series_terms,
        y,
        raw: raw.to_string(),
    })
}
