//! File emission for experiment runs: CSV data, JSON report, hash manifest
//! and the optional SVG overlay figure.

use crate::config::{ExperimentKind, FileConfig};
use anyhow::{Context, Result};
use gausslab::distexp::{
    horocycle_experiment, ks_distance, long_sum_experiment, mean_square_check,
    reference_theta_sample, short_gauss_experiment, sign_joint_test, tail_exponent,
    EmpiricalDistribution, Histogram, Projection,
};
use gausslab::metaplectic::{reduce_to_fundamental_domain, sign_class, HalfPlanePoint};
use gausslab::numtheory::coprime_residues;
use gausslab::ExecPolicy;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

/// Default radii for the tail fit of the reference law; trimmed from the
/// top until the deepest radius keeps enough exceedances.
const TAIL_GRID: [f64; 5] = [2.0, 2.5, 3.15, 4.0, 5.0];

struct OutputSet {
    dir: PathBuf,
    files: Vec<String>,
}

impl OutputSet {
    fn new(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir)
            .with_context(|| format!("creating output directory {}", dir.display()))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            files: Vec::new(),
        })
    }

    fn write(&mut self, name: &str, contents: &str) -> Result<()> {
        fs::write(self.dir.join(name), contents)
            .with_context(|| format!("writing {name}"))?;
        self.files.push(name.to_string());
        Ok(())
    }

    /// Hash every emitted file back from disk and write the manifest.
    fn finish(mut self, cfg: &FileConfig, started: Instant) -> Result<()> {
        let mut entries = Vec::new();
        for name in &self.files {
            let bytes = fs::read(self.dir.join(name))?;
            let mut hasher = Sha256::new();
            hasher.update(&bytes);
            entries.push(json!({
                "file": name,
                "bytes": bytes.len(),
                "sha256": format!("{:x}", hasher.finalize()),
            }));
        }
        let manifest = json!({
            "tool": "gausslab",
            "version": env!("CARGO_PKG_VERSION"),
            "seed": cfg.experiment.seed,
            "wall_clock_seconds": started.elapsed().as_secs_f64(),
            "config_echo": cfg.raw,
            "outputs": entries,
        });
        self.write("manifest.json", &format!("{:#}\n", manifest))?;
        Ok(())
    }
}

fn csv_f64(v: f64) -> String {
    // shortest representation that round-trips the exact double
    format!("{v}")
}

fn samples_csv(ps: &[u64], dist: &EmpiricalDistribution) -> String {
    let labels = dist.labels();
    let mut out = String::from("p,class,re,im\n");
    for (i, (p, z)) in ps.iter().zip(dist.samples()).enumerate() {
        let class = labels.map(|l| l[i].to_string()).unwrap_or_default();
        out.push_str(&format!("{p},{class},{},{}\n", csv_f64(z.re), csv_f64(z.im)));
    }
    out
}

fn reference_csv(dist: &EmpiricalDistribution) -> String {
    let mut out = String::from("re,im\n");
    for z in dist.samples() {
        out.push_str(&format!("{},{}\n", csv_f64(z.re), csv_f64(z.im)));
    }
    out
}

fn histogram_csv(h: &Histogram) -> String {
    let mut out = String::from("bin_left,bin_right,mass\n");
    for (k, mass) in h.mass.iter().enumerate() {
        out.push_str(&format!(
            "{},{},{}\n",
            csv_f64(h.edges[k]),
            csv_f64(h.edges[k + 1]),
            csv_f64(*mass)
        ));
    }
    out
}

fn ks_json(a: &EmpiricalDistribution, b: &EmpiricalDistribution) -> Result<Value> {
    Ok(json!({
        "re": ks_distance(a, b, Projection::Re).map_err(anyhow::Error::from)?,
        "im": ks_distance(a, b, Projection::Im).map_err(anyhow::Error::from)?,
        "mod": ks_distance(a, b, Projection::Modulus).map_err(anyhow::Error::from)?,
    }))
}

fn tail_json(reference: &EmpiricalDistribution) -> Value {
    let mut last_err = None;
    for len in (3..=TAIL_GRID.len()).rev() {
        let grid = &TAIL_GRID[..len];
        match tail_exponent(reference, grid) {
            Ok(fit) => {
                return json!({
                    "grid": grid,
                    "slope": fit.slope,
                    "intercept": fit.intercept,
                    "rms_residual": fit.rms_residual,
                    "exceedances_at_top": fit.exceedances_at_top,
                })
            }
            Err(e) => last_err = Some(e),
        }
    }
    json!({ "skipped": last_err.expect("at least one attempt").to_string() })
}

fn sign_json(dist: &EmpiricalDistribution) -> Value {
    match sign_joint_test(dist) {
        Ok(rep) => json!({
            "class_counts": rep.class_counts.iter()
                .map(|(s, n)| (s.to_string(), *n))
                .collect::<std::collections::BTreeMap<_, _>>(),
            "max_count_deviation": rep.max_count_deviation,
            "max_pairwise_ks": {
                "re": rep.max_pairwise_re,
                "im": rep.max_pairwise_im,
                "mod": rep.max_pairwise_mod,
            },
            "class_means": rep.class_means.iter()
                .map(|(s, m)| json!({"class": s.to_string(), "re": m.re, "im": m.im}))
                .collect::<Vec<_>>(),
            "pairwise": rep.pairwise.iter().map(|p| json!({
                "a": p.class_a.to_string(),
                "b": p.class_b.to_string(),
                "re": p.ks_re, "im": p.ks_im, "mod": p.ks_mod,
            })).collect::<Vec<_>>(),
        }),
        Err(e) => json!({ "skipped": e.to_string() }),
    }
}

pub fn run(cfg: &FileConfig, out_dir: &Path, exec: ExecPolicy) -> Result<()> {
    let started = Instant::now();
    let mut outputs = OutputSet::new(out_dir)?;
    match cfg.kind {
        ExperimentKind::Short => run_short(cfg, &mut outputs, exec)?,
        ExperimentKind::Long => run_long(cfg, &mut outputs, exec)?,
        ExperimentKind::Horocycle => run_horocycle(cfg, &mut outputs, exec)?,
    }
    outputs.finish(cfg, started)
}

fn run_short(cfg: &FileConfig, outputs: &mut OutputSet, exec: ExecPolicy) -> Result<()> {
    let mut experiment = cfg.experiment.clone();
    experiment.exec = exec;
    let warnings = experiment.validate().map_err(anyhow::Error::from)?;
    let dist = short_gauss_experiment(&experiment).map_err(anyhow::Error::from)?;
    let ps = coprime_residues(experiment.q, &experiment.d);
    let reference = reference_theta_sample(
        &experiment.weight,
        experiment.n(),
        experiment.reference_samples,
        experiment.seed,
        exec,
    )
    .map_err(anyhow::Error::from)?;

    outputs.write("samples.csv", &samples_csv(&ps, &dist))?;
    outputs.write("reference.csv", &reference_csv(&reference))?;
    let mut hists = Vec::new();
    for proj in Projection::all() {
        let h = dist.histogram(proj, cfg.bins).map_err(anyhow::Error::from)?;
        outputs.write(&format!("histogram_{}.csv", proj.label()), &histogram_csv(&h))?;
        hists.push(h);
    }

    let msq = mean_square_check(&experiment).map_err(anyhow::Error::from)?;
    let report = json!({
        "kind": "short",
        "q": experiment.q,
        "a": experiment.a,
        "n": experiment.n(),
        "seed": experiment.seed,
        "sample_count": dist.len(),
        "reference_samples": reference.len(),
        "warnings": warnings,
        "ks": ks_json(&dist, &reference)?,
        "second_moment": dist.second_moment().map_err(anyhow::Error::from)?,
        "mean_square": {
            "m": msq.m,
            "m_over_n": msq.m_over_n,
            "prime_exact": msq.prime_exact,
            "prime_relative_deviation": msq.prime_relative_deviation,
            "bound_ratio": msq.bound_ratio,
        },
        "sign_classes": sign_json(&dist),
        "tail": tail_json(&reference),
    });
    outputs.write("report.json", &format!("{:#}\n", report))?;

    if cfg.figure {
        let fig = figure_svg(&dist, &reference, cfg.bins)?;
        outputs.write("figure.svg", &fig)?;
    }
    Ok(())
}

fn run_long(cfg: &FileConfig, outputs: &mut OutputSet, exec: ExecPolicy) -> Result<()> {
    let e = &cfg.experiment;
    let rep = long_sum_experiment(
        e.q,
        e.n_coeff,
        e.reference_samples,
        e.seed,
        cfg.g_series_terms,
        exec,
    )
    .map_err(anyhow::Error::from)?;
    let ps = coprime_residues(e.q, &gausslab::numtheory::TorusSet::full());
    outputs.write("samples.csv", &samples_csv(&ps, &rep.samples))?;
    outputs.write("reference.csv", &reference_csv(&rep.reference))?;
    for proj in Projection::all() {
        let h = rep
            .samples
            .histogram(proj, cfg.bins)
            .map_err(anyhow::Error::from)?;
        outputs.write(&format!("histogram_{}.csv", proj.label()), &histogram_csv(&h))?;
    }
    let report = json!({
        "kind": "long",
        "q": rep.q,
        "n": rep.n,
        "scale": e.n_coeff,
        "seed": e.seed,
        "sample_count": rep.samples.len(),
        "reference_samples": rep.reference.len(),
        "g_series_terms": cfg.g_series_terms,
        "epsilon_q": rep.epsilon_q.to_string(),
        "floor_correction": rep.floor_correction,
        "max_chain_residual": rep.max_chain_residual,
        "max_sign_defect": rep.max_sign_defect,
        "ks": {"re": rep.ks_re, "im": rep.ks_im},
        "sign_classes": sign_json(&rep.samples),
    });
    outputs.write("report.json", &format!("{:#}\n", report))?;
    if cfg.figure {
        let fig = figure_svg(&rep.samples, &rep.reference, cfg.bins)?;
        outputs.write("figure.svg", &fig)?;
    }
    Ok(())
}

fn run_horocycle(cfg: &FileConfig, outputs: &mut OutputSet, exec: ExecPolicy) -> Result<()> {
    let e = &cfg.experiment;
    let rep = horocycle_experiment(e.q, cfg.y, cfg.bins, exec).map_err(anyhow::Error::from)?;
    // reduced points, labeled by sign class
    let ps = coprime_residues(e.q, &gausslab::numtheory::TorusSet::full());
    let mut out = String::from("p,class,re,im\n");
    for &p in &ps {
        let z = HalfPlanePoint::new(p as f64 / e.q as f64, cfg.y).map_err(anyhow::Error::from)?;
        let (zr, _) = reduce_to_fundamental_domain(&z).map_err(anyhow::Error::from)?;
        let (_, class) = sign_class(p as i64, e.q).map_err(anyhow::Error::from)?;
        out.push_str(&format!(
            "{p},{class},{},{}\n",
            csv_f64(zr.x),
            csv_f64(zr.y)
        ));
    }
    outputs.write("samples.csv", &out)?;
    let report = json!({
        "kind": "horocycle",
        "q": rep.q,
        "y": rep.y,
        "bins": rep.bins,
        "point_count": rep.point_count,
        "total_variation": rep.total_variation,
        "bin_masses": rep.bin_masses,
        "expected_masses": rep.expected_masses,
        "warnings": rep.warnings,
    });
    outputs.write("report.json", &format!("{:#}\n", report))?;
    Ok(())
}

// ---------------------------------------------------------------------------
// SVG overlay figure
// ---------------------------------------------------------------------------

/// Two panels (Re and Im): empirical histogram bars with the reference
/// density curve on top.
fn figure_svg(
    emp: &EmpiricalDistribution,
    reference: &EmpiricalDistribution,
    bins: usize,
) -> Result<String> {
    let mut svg = String::from(
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="900" height="360" viewBox="0 0 900 360">
<rect width="900" height="360" fill="white"/>
"#,
    );
    for (panel, proj) in [Projection::Re, Projection::Im].into_iter().enumerate() {
        let x0 = 30.0 + panel as f64 * 440.0;
        let (y0, w, h) = (310.0, 400.0, 280.0);
        let e_hist = emp.histogram(proj, bins).map_err(anyhow::Error::from)?;
        let r_hist = reference
            .histogram(proj, bins.max(80))
            .map_err(anyhow::Error::from)?;
        let lo = e_hist.edges[0].min(r_hist.edges[0]);
        let hi = e_hist.edges[bins].max(*r_hist.edges.last().unwrap());
        let density =
            |hst: &Histogram, k: usize| hst.mass[k] / (hst.edges[k + 1] - hst.edges[k]);
        let peak = (0..bins)
            .map(|k| density(&e_hist, k))
            .chain((0..r_hist.mass.len()).map(|k| density(&r_hist, k)))
            .fold(0.0f64, f64::max)
            .max(1e-12);
        let sx = |v: f64| x0 + (v - lo) / (hi - lo) * w;
        let sy = |d: f64| y0 - (d / peak) * h;
        // histogram bars
        for k in 0..bins {
            let d = density(&e_hist, k);
            if d == 0.0 {
                continue;
            }
            svg.push_str(&format!(
                r##"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="#9ecae1" stroke="none"/>
"##,
                sx(e_hist.edges[k]),
                sy(d),
                (sx(e_hist.edges[k + 1]) - sx(e_hist.edges[k])).max(0.5),
                y0 - sy(d),
            ));
        }
        // reference density polyline
        let points: Vec<String> = (0..r_hist.mass.len())
            .map(|k| {
                let mid = 0.5 * (r_hist.edges[k] + r_hist.edges[k + 1]);
                format!("{:.2},{:.2}", sx(mid), sy(density(&r_hist, k)))
            })
            .collect();
        svg.push_str(&format!(
            r##"<polyline points="{}" fill="none" stroke="#d62728" stroke-width="1.5"/>
"##,
            points.join(" ")
        ));
        // axis line and label
        svg.push_str(&format!(
            r#"<line x1="{x0}" y1="{y0}" x2="{:.2}" y2="{y0}" stroke="black" stroke-width="1"/>
<text x="{:.2}" y="335" font-size="13" text-anchor="middle" font-family="sans-serif">{}</text>
"#,
            x0 + w,
            x0 + w / 2.0,
            proj.label()
        ));
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}
