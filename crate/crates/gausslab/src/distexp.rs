//! Statistical experiment drivers: empirical value distributions of
//! normalised short Gauss sums, reference theta-sum sampling, two-sample
//! Kolmogorov-Smirnov distances, tail-exponent fits, sign-class joint tests,
//! horocycle equidistribution checks and the long-sum comparison.
//!
//! Sample generation is embarrassingly parallel over residues p (or over
//! random sample points); results are merged in a fixed order, so identical
//! configurations produce bit-identical reports at any thread count.

use crate::exec::{map_indexed, map_slice, ExecPolicy};
use crate::expsums::{
    classical_gauss_sum_direct_with, g_phi_coefficients, g_phi_value,
    incomplete_gauss_sum_with, long_gauss_sum_with, mean_square, mean_square_prime_exact,
    PeriodicWeight, RootTable, WeightFunction,
};
use crate::metaplectic::{reduce_to_fundamental_domain, sign_class, HalfPlanePoint};
use crate::numtheory::{coprime_residues, epsilon, is_prime, SignFactor, TorusSet};
use crate::theta::{big_theta, HermiteExpansion};
use crate::util::{CompensatedReal, CounterRng};
use crate::{Complex, Error, Result};

/// One-dimensional projections the distribution statistics run on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Projection {
    Re,
    Im,
    Modulus,
}

impl Projection {
    pub fn apply(self, z: Complex) -> f64 {
        match self {
            Projection::Re => z.re,
            Projection::Im => z.im,
            Projection::Modulus => z.norm(),
        }
    }

    pub fn all() -> [Projection; 3] {
        [Projection::Re, Projection::Im, Projection::Modulus]
    }

    pub fn label(self) -> &'static str {
        match self {
            Projection::Re => "re",
            Projection::Im => "im",
            Projection::Modulus => "mod",
        }
    }
}

/// Weighted complex samples, optionally carrying a sign-class label per
/// sample; the numerical realisation of the limiting value distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalDistribution {
    samples: Vec<Complex>,
    labels: Option<Vec<SignFactor>>,
}

/// Equal-width histogram of a projection; `edges` has one more entry than
/// `mass` and the masses sum to one.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub mass: Vec<f64>,
}

impl EmpiricalDistribution {
    pub fn from_samples(samples: Vec<Complex>) -> Self {
        Self {
            samples,
            labels: None,
        }
    }

    pub fn from_labeled(samples: Vec<Complex>, labels: Vec<SignFactor>) -> Result<Self> {
        if samples.len() != labels.len() {
            return Err(Error::InvalidConfig(
                "labels must match samples one to one".into(),
            ));
        }
        Ok(Self {
            samples,
            labels: Some(labels),
        })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn samples(&self) -> &[Complex] {
        &self.samples
    }

    pub fn labels(&self) -> Option<&[SignFactor]> {
        self.labels.as_deref()
    }

    fn ensure_nonempty(&self) -> Result<()> {
        if self.samples.is_empty() {
            Err(Error::EmptySamples)
        } else {
            Ok(())
        }
    }

    /// Mean of |z|^2 over the samples.
    pub fn second_moment(&self) -> Result<f64> {
        self.ensure_nonempty()?;
        let mut acc = CompensatedReal::new();
        for z in &self.samples {
            acc.add(z.norm_sqr());
        }
        Ok(acc.value() / self.samples.len() as f64)
    }

    pub fn projected(&self, proj: Projection) -> Vec<f64> {
        self.samples.iter().map(|&z| proj.apply(z)).collect()
    }

    /// Empirical probability of |z| > r.
    pub fn tail_probability(&self, r: f64) -> Result<f64> {
        self.ensure_nonempty()?;
        let count = self.samples.iter().filter(|z| z.norm() > r).count();
        Ok(count as f64 / self.samples.len() as f64)
    }

    pub fn histogram(&self, proj: Projection, bins: usize) -> Result<Histogram> {
        self.ensure_nonempty()?;
        if bins == 0 {
            return Err(Error::InvalidConfig("histogram needs >= 1 bin".into()));
        }
        let values = self.projected(proj);
        let (mut lo, mut hi) = values
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                (lo.min(v), hi.max(v))
            });
        if lo == hi {
            lo -= 0.5;
            hi += 0.5;
        }
        let width = (hi - lo) / bins as f64;
        let mut counts = vec![0usize; bins];
        for v in values {
            let idx = (((v - lo) / width) as usize).min(bins - 1);
            counts[idx] += 1;
        }
        let total = self.samples.len() as f64;
        Ok(Histogram {
            edges: (0..=bins).map(|k| lo + k as f64 * width).collect(),
            mass: counts.iter().map(|&c| c as f64 / total).collect(),
        })
    }

    /// Distinct labels in first-appearance order.
    pub fn classes(&self) -> Result<Vec<SignFactor>> {
        let labels = self.labels().ok_or(Error::MissingLabels)?;
        let mut seen = Vec::new();
        for &l in labels {
            if !seen.contains(&l) {
                seen.push(l);
            }
        }
        Ok(seen)
    }

    /// The sub-distribution carrying a given label.
    pub fn restrict_to_class(&self, class: SignFactor) -> Result<EmpiricalDistribution> {
        let labels = self.labels().ok_or(Error::MissingLabels)?;
        let samples = self
            .samples
            .iter()
            .zip(labels)
            .filter(|(_, &l)| l == class)
            .map(|(&z, _)| z)
            .collect();
        Ok(EmpiricalDistribution::from_samples(samples))
    }
}

/// Two-sample Kolmogorov-Smirnov statistic on the chosen projection.
pub fn ks_distance(
    a: &EmpiricalDistribution,
    b: &EmpiricalDistribution,
    proj: Projection,
) -> Result<f64> {
    a.ensure_nonempty()?;
    b.ensure_nonempty()?;
    let mut xs = a.projected(proj);
    let mut ys = b.projected(proj);
    xs.sort_unstable_by(|p, q| p.partial_cmp(q).expect("finite samples"));
    ys.sort_unstable_by(|p, q| p.partial_cmp(q).expect("finite samples"));
    let (n, m) = (xs.len() as f64, ys.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d: f64 = 0.0;
    while i < xs.len() && j < ys.len() {
        let v = xs[i].min(ys[j]);
        while i < xs.len() && xs[i] <= v {
            i += 1;
        }
        while j < ys.len() && ys[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / n - j as f64 / m).abs());
    }
    Ok(d)
}

/// Least-squares fit of log P(|z| > R) against log R.
#[derive(Debug, Clone, Copy)]
pub struct TailFit {
    pub slope: f64,
    pub intercept: f64,
    pub rms_residual: f64,
    /// Number of exceedances at the largest grid radius.
    pub exceedances_at_top: usize,
}

pub fn tail_exponent(dist: &EmpiricalDistribution, r_grid: &[f64]) -> Result<TailFit> {
    if dist.len() < 10_000 {
        return Err(Error::InsufficientSamples {
            needed: 10_000,
            got: dist.len(),
        });
    }
    if r_grid.len() < 2 {
        return Err(Error::InvalidConfig("tail grid needs >= 2 radii".into()));
    }
    let n = dist.len() as f64;
    let mut moduli: Vec<f64> = dist.samples.iter().map(|z| z.norm()).collect();
    moduli.sort_unstable_by(|a, b| a.partial_cmp(b).expect("finite"));
    let mut points = Vec::with_capacity(r_grid.len());
    let mut top_exceedances = 0usize;
    for &r in r_grid {
        let exceed = moduli.len() - moduli.partition_point(|&v| v <= r);
        top_exceedances = exceed;
        if exceed == 0 {
            return Err(Error::InsufficientTailMass {
                exceedances: 0,
                r,
            });
        }
        points.push((r.ln(), (exceed as f64 / n).ln()));
    }
    if top_exceedances < 100 {
        return Err(Error::InsufficientTailMass {
            exceedances: top_exceedances,
            r: *r_grid.last().expect("nonempty grid"),
        });
    }
    let k = points.len() as f64;
    let sx: f64 = points.iter().map(|p| p.0).sum();
    let sy: f64 = points.iter().map(|p| p.1).sum();
    let sxx: f64 = points.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = points.iter().map(|p| p.0 * p.1).sum();
    let slope = (k * sxy - sx * sy) / (k * sxx - sx * sx);
    let intercept = (sy - slope * sx) / k;
    let rms = (points
        .iter()
        .map(|&(x, y)| (y - slope * x - intercept).powi(2))
        .sum::<f64>()
        / k)
        .sqrt();
    Ok(TailFit {
        slope,
        intercept,
        rms_residual: rms,
        exceedances_at_top: top_exceedances,
    })
}

/// Configuration of a short-sum value-distribution experiment: the modulus
/// q = a q', the truncation rule N = floor(c q^alpha), the torus window D,
/// the cutoff weight, and the reference-sampling parameters.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub a: u64,
    pub q: u64,
    pub n_coeff: f64,
    pub n_alpha: f64,
    /// Pin N directly instead of the floor(c q^alpha) rule.
    pub n_fixed: Option<u64>,
    pub d: TorusSet,
    pub weight: WeightFunction,
    pub reference_samples: usize,
    pub seed: u64,
    pub exec: ExecPolicy,
}

impl ExperimentConfig {
    /// The subsequence protocol with its usual defaults: full torus, unit
    /// indicator weight, N = floor(q^{7/8} / sqrt 7).
    pub fn theorem1(a: u64, q: u64) -> Self {
        Self {
            a,
            q,
            n_coeff: 1.0 / 7f64.sqrt(),
            n_alpha: 7.0 / 8.0,
            n_fixed: None,
            d: TorusSet::full(),
            weight: WeightFunction::unit_indicator(),
            reference_samples: 100_000,
            seed: 7,
            exec: ExecPolicy::default(),
        }
    }

    /// N from the rule floor(c q^alpha) (or the pinned value), at least 1.
    pub fn n(&self) -> u64 {
        self.n_fixed
            .unwrap_or_else(|| (self.n_coeff * (self.q as f64).powf(self.n_alpha)).floor() as u64)
            .max(1)
    }

    /// Hard errors for malformed configs; returns the regime warnings
    /// (conditions of the limit theorem that the config deliberately leaves).
    pub fn validate(&self) -> Result<Vec<String>> {
        if self.a == 0 || self.q == 0 || self.q % self.a != 0 {
            return Err(Error::InvalidConfig(format!(
                "need a | q with a, q >= 1; got a = {}, q = {}",
                self.a, self.q
            )));
        }
        if !(self.n_coeff > 0.0) || !(self.n_alpha > 0.0) {
            return Err(Error::InvalidConfig(
                "N rule needs positive coefficient and exponent".into(),
            ));
        }
        let mut warnings = Vec::new();
        if !is_prime(self.q / self.a) {
            warnings.push(format!(
                "q/a = {} is not prime: outside the q = a q' subsequence",
                self.q / self.a
            ));
        }
        if self.n_alpha * 4.0 / 3.0 <= 1.0 {
            warnings.push(
                "N^{4/3}/q does not grow: outside the range of validity of our theorem"
                    .to_string(),
            );
        }
        if self.n_alpha >= 1.0 {
            warnings.push("N/q does not vanish: not in the short-sum regime".to_string());
        }
        Ok(warnings)
    }
}

/// One normalised sample g_f(p, q, N)/sqrt(N) per residue p in Zq^x ∩ qD,
/// labeled by its sign class.
pub fn short_gauss_experiment(cfg: &ExperimentConfig) -> Result<EmpiricalDistribution> {
    cfg.validate()?;
    let ps = coprime_residues(cfg.q, &cfg.d);
    if ps.is_empty() {
        return Err(Error::EmptyResidueRange);
    }
    let table = RootTable::new(cfg.q);
    let n = cfg.n();
    let scale = 1.0 / (n as f64).sqrt();
    let samples = map_slice(cfg.exec, &ps, |&p| {
        incomplete_gauss_sum_with(&table, &cfg.weight, p as i64, n)
            .map(|s| s.value * scale)
    });
    let samples: Vec<Complex> = samples.into_iter().collect::<Result<_>>()?;
    let labels = ps
        .iter()
        .map(|&p| sign_class(p as i64, cfg.q).map(|(_, s)| s))
        .collect::<Result<Vec<_>>>()?;
    EmpiricalDistribution::from_labeled(samples, labels)
}

/// Reference law: S_f(x, N)/sqrt(N) at `count` uniform random x in [0, 1).
pub fn reference_theta_sample(
    f: &WeightFunction,
    n: u64,
    count: usize,
    seed: u64,
    exec: ExecPolicy,
) -> Result<EmpiricalDistribution> {
    if count == 0 {
        return Err(Error::EmptySamples);
    }
    let rng = CounterRng::new(seed).stream(1);
    let scale = 1.0 / (n as f64).sqrt();
    let samples = map_indexed(exec, count, |i| {
        let x = rng.f64_at(i as u64);
        crate::expsums::theta_sum(f, x, n).value * scale
    });
    Ok(EmpiricalDistribution::from_samples(samples))
}

/// The same reference law drawn through the theta-series route
/// Theta_f(x + i/N^2, 0) for an expansion weight.
pub fn reference_big_theta_sample(
    expansion: &HermiteExpansion,
    n: u64,
    count: usize,
    seed: u64,
    exec: ExecPolicy,
) -> Result<EmpiricalDistribution> {
    if count == 0 {
        return Err(Error::EmptySamples);
    }
    let rng = CounterRng::new(seed).stream(1);
    let y = 1.0 / (n as f64 * n as f64);
    let samples = map_indexed(exec, count, |i| {
        let x = rng.f64_at(i as u64);
        let point = crate::metaplectic::MetaplecticPoint::new(
            HalfPlanePoint::new(x, y).expect("y > 0"),
            0.0,
        );
        big_theta(expansion, &point, None)
    });
    let samples: Vec<Complex> = samples.into_iter().collect::<Result<_>>()?;
    Ok(EmpiricalDistribution::from_samples(samples))
}

/// Per-pair conditional Kolmogorov-Smirnov distances between sign classes.
#[derive(Debug, Clone)]
pub struct ClassPairKs {
    pub class_a: SignFactor,
    pub class_b: SignFactor,
    pub ks_re: f64,
    pub ks_im: f64,
    pub ks_mod: f64,
}

/// Joint sign/value report: class-count uniformity against the
/// equal-probability law and conditional distribution agreement.
///
/// Conjugation p -> q - p pairs classes exactly, so at finite q the Re/Im
/// conditional laws split by the order-(N/q)^{1/2} mean drift of the
/// second-order equidistribution term; the modulus projection is blind to
/// that drift and measures the leading-order class independence.
#[derive(Debug, Clone)]
pub struct SignJointReport {
    pub class_counts: Vec<(SignFactor, usize)>,
    /// max over classes of |count - n/k| / (n/k).
    pub max_count_deviation: f64,
    pub pairwise: Vec<ClassPairKs>,
    pub max_pairwise_re: f64,
    pub max_pairwise_im: f64,
    pub max_pairwise_mod: f64,
    /// Per-class sample means; their Im spread realises the (N/q)^{1/2}
    /// drift (reported, not asserted).
    pub class_means: Vec<(SignFactor, Complex)>,
}

pub fn sign_joint_test(dist: &EmpiricalDistribution) -> Result<SignJointReport> {
    dist.ensure_nonempty()?;
    let classes = dist.classes()?;
    let mut parts = Vec::with_capacity(classes.len());
    for &class in &classes {
        let part = dist.restrict_to_class(class)?;
        if part.len() < 30 {
            return Err(Error::InsufficientSamples {
                needed: 30,
                got: part.len(),
            });
        }
        parts.push((class, part));
    }
    let expected = dist.len() as f64 / classes.len() as f64;
    let class_counts: Vec<(SignFactor, usize)> =
        parts.iter().map(|(c, p)| (*c, p.len())).collect();
    let max_count_deviation = class_counts
        .iter()
        .map(|(_, n)| (*n as f64 - expected).abs() / expected)
        .fold(0.0f64, f64::max);
    let class_means = parts
        .iter()
        .map(|(c, p)| {
            let sum: Complex = p.samples().iter().sum();
            (*c, sum / p.len() as f64)
        })
        .collect();
    let mut pairwise = Vec::new();
    let (mut max_re, mut max_im, mut max_mod) = (0.0f64, 0.0f64, 0.0f64);
    for i in 0..parts.len() {
        for j in (i + 1)..parts.len() {
            let ks_re = ks_distance(&parts[i].1, &parts[j].1, Projection::Re)?;
            let ks_im = ks_distance(&parts[i].1, &parts[j].1, Projection::Im)?;
            let ks_mod = ks_distance(&parts[i].1, &parts[j].1, Projection::Modulus)?;
            max_re = max_re.max(ks_re);
            max_im = max_im.max(ks_im);
            max_mod = max_mod.max(ks_mod);
            pairwise.push(ClassPairKs {
                class_a: parts[i].0,
                class_b: parts[j].0,
                ks_re,
                ks_im,
                ks_mod,
            });
        }
    }
    Ok(SignJointReport {
        class_counts,
        max_count_deviation,
        pairwise,
        max_pairwise_re: max_re,
        max_pairwise_im: max_im,
        max_pairwise_mod: max_mod,
        class_means,
    })
}

// ---------------------------------------------------------------------------
// Horocycle equidistribution
// ---------------------------------------------------------------------------

/// Hyperbolic mass of the fundamental domain below height `cap`, from the
/// antiderivative of (1 - 2 sqrt(1 - y^2)) / y^2:
/// F(y) = -1/y + 2 sqrt(1 - y^2)/y + 2 asin(y).
fn cumulative_domain_mass(cap: f64) -> f64 {
    let base = 3f64.sqrt() / 2.0;
    if cap <= base {
        return 0.0;
    }
    let antideriv = |y: f64| {
        let root = (1.0 - y * y).max(0.0).sqrt();
        -1.0 / y + 2.0 * root / y + 2.0 * y.min(1.0).asin()
    };
    let below_one = antideriv(cap.min(1.0)) - antideriv(base);
    if cap <= 1.0 {
        below_one
    } else {
        below_one + (1.0 - 1.0 / cap)
    }
}

/// Total hyperbolic mass of the fundamental domain: pi/3.
pub fn fundamental_domain_mass() -> f64 {
    cumulative_domain_mass(1.0) + 1.0
}

fn mass_quantile(target: f64) -> f64 {
    let base = 3f64.sqrt() / 2.0;
    let (mut lo, mut hi) = (base, 1.0);
    while cumulative_domain_mass(hi) < target {
        hi *= 2.0;
    }
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if cumulative_domain_mass(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Cusp cap above which the partition keeps a single wide band.
const BAND_CAP: f64 = 6.0;
/// Top of the merged corner band at the bottom of the domain.
const CORNER_TOP: f64 = 1.5;

/// Height edges of the horocycle partition: one merged band over the corner
/// region [sqrt(3)/2, 1.5], equal-hyperbolic-mass bands up to the cusp cap,
/// and one wide band [cap, infinity).
///
/// The corner and the far cusp are exactly where a horocycle of finite
/// period deviates first (points cluster at the corner and cannot reach
/// above height q^2 y), so bounded-mass cells there keep the statistic
/// focused on the leading-order equidistribution.
fn band_edges(bands: usize) -> Vec<f64> {
    assert!(bands >= 3);
    let base = 3f64.sqrt() / 2.0;
    let lo_mass = cumulative_domain_mass(CORNER_TOP);
    let hi_mass = cumulative_domain_mass(BAND_CAP);
    let middle = bands - 2;
    let mut edges = Vec::with_capacity(bands + 1);
    edges.push(base);
    edges.push(CORNER_TOP);
    for k in 1..middle {
        edges.push(mass_quantile(
            lo_mass + (hi_mass - lo_mass) * k as f64 / middle as f64,
        ));
    }
    edges.push(BAND_CAP);
    edges.push(f64::INFINITY);
    edges
}

/// Reduced-point equidistribution report for the rational horocycle points
/// p/q + iy against the normalised hyperbolic measure.
#[derive(Debug, Clone)]
pub struct HorocycleReport {
    pub q: u64,
    pub y: f64,
    pub point_count: usize,
    pub bins: usize,
    /// Empirical mass per cell (height bands split at x = 0), sums to one.
    pub bin_masses: Vec<f64>,
    /// Expected mass per cell under the normalised hyperbolic measure.
    pub expected_masses: Vec<f64>,
    /// Total-variation discrepancy (1/2) sum |empirical - expected|.
    pub total_variation: f64,
    pub warnings: Vec<String>,
}

pub fn horocycle_experiment(
    q: u64,
    y: f64,
    bins: usize,
    exec: ExecPolicy,
) -> Result<HorocycleReport> {
    if bins < 6 || bins % 2 != 0 {
        return Err(Error::InvalidConfig(
            "bin count must be even and >= 6 (bands are split at x = 0)".into(),
        ));
    }
    if !(y > 0.0) {
        return Err(Error::NotInUpperHalfPlane { y });
    }
    let mut warnings = Vec::new();
    if !is_prime(q) {
        warnings.push(format!("q = {q} is not prime"));
    }
    let q2y = (q as f64) * (q as f64) * y;
    if q2y < 20.0 {
        warnings.push(format!("q^2 y = {q2y:.3} is not large; convergence degrades"));
    }
    let q32y = (q as f64).powf(1.5) * y;
    if q32y > 0.3 {
        warnings.push(format!(
            "q^(3/2) y = {q32y:.3} is not small; the error regime is violated"
        ));
    }
    let ps = coprime_residues(q, &TorusSet::full());
    if ps.is_empty() {
        return Err(Error::EmptyResidueRange);
    }
    let bands = bins / 2;
    let edges = band_edges(bands);
    let total_mass = fundamental_domain_mass();
    let reduced = map_slice(exec, &ps, |&p| {
        let z = HalfPlanePoint::new(p as f64 / q as f64, y).expect("y > 0");
        reduce_to_fundamental_domain(&z).map(|(zr, _)| zr)
    });
    let mut counts = vec![0usize; bins];
    for z in reduced {
        let z = z?;
        let band = edges
            .partition_point(|&e| e <= z.y)
            .saturating_sub(1)
            .min(bands - 1);
        let cell = 2 * band + usize::from(z.x >= 0.0);
        counts[cell] += 1;
    }
    let total = ps.len() as f64;
    let bin_masses: Vec<f64> = counts.iter().map(|&c| c as f64 / total).collect();
    // the measure is x-symmetric, so each half-cell expects half its band
    let expected_masses: Vec<f64> = (0..bins)
        .map(|cell| {
            let band = cell / 2;
            let hi = if edges[band + 1].is_infinite() {
                total_mass
            } else {
                cumulative_domain_mass(edges[band + 1])
            };
            0.5 * (hi - cumulative_domain_mass(edges[band])) / total_mass
        })
        .collect();
    let total_variation = 0.5
        * bin_masses
            .iter()
            .zip(&expected_masses)
            .map(|(a, b)| (a - b).abs())
            .sum::<f64>();
    Ok(HorocycleReport {
        q,
        y,
        point_count: ps.len(),
        bins,
        bin_masses,
        expected_masses,
        total_variation,
        warnings,
    })
}

// ---------------------------------------------------------------------------
// Mean square
// ---------------------------------------------------------------------------

/// Mean-square comparison: the measured M_f(q, N)/N against the exact
/// prime-case formula and the variance-bound shape ||f||_2^2 / |D|.
#[derive(Debug, Clone)]
pub struct MeanSquareReport {
    pub q: u64,
    pub n: u64,
    pub m: f64,
    pub m_over_n: f64,
    /// N(q-N)/(q-1), present when q is prime, 2N < q and f is the unit
    /// indicator.
    pub prime_exact: Option<f64>,
    pub prime_relative_deviation: Option<f64>,
    /// (M/N) / (||f||_2^2 / |D|): the constant the limsup bound caps.
    pub bound_ratio: f64,
}

pub fn mean_square_check(cfg: &ExperimentConfig) -> Result<MeanSquareReport> {
    cfg.validate()?;
    let n = cfg.n();
    let m = mean_square(&cfg.weight, cfg.q, n, &cfg.d)?;
    let m_over_n = m / n as f64;
    let is_unit_indicator =
        matches!(cfg.weight, WeightFunction::Indicator { lo, hi } if lo == 0.0 && hi == 1.0);
    let prime_exact = (is_prime(cfg.q) && 2 * n < cfg.q && is_unit_indicator)
        .then(|| mean_square_prime_exact(cfg.q, n));
    let prime_relative_deviation = prime_exact.map(|e| (m - e).abs() / e);
    let bound_ratio = m_over_n / (cfg.weight.l2_norm_sq() / cfg.d.measure());
    Ok(MeanSquareReport {
        q: cfg.q,
        n,
        m,
        m_over_n,
        prime_exact,
        prime_relative_deviation,
        bound_ratio,
    })
}

// ---------------------------------------------------------------------------
// Long-sum comparison
// ---------------------------------------------------------------------------

/// Long-sum experiment report: the factorised identity residual and the
/// distributional match against c^{-1/2} Y G_phi at uniform x.
#[derive(Debug, Clone)]
pub struct LongSumReport {
    pub q: u64,
    pub n: u64,
    pub epsilon_q: SignFactor,
    /// sqrt(c q / N): the floor-rounding scale between sqrt(c q) and
    /// sqrt(N), reported rather than absorbed.
    pub floor_correction: f64,
    /// max over p of the relative residual of the factorised identity.
    pub max_chain_residual: f64,
    /// Largest deviation of g_1(p,q)/(eps_q sqrt q) from ±1.
    pub max_sign_defect: f64,
    pub ks_re: f64,
    pub ks_im: f64,
    pub samples: EmpiricalDistribution,
    pub reference: EmpiricalDistribution,
}

/// Compare g_f(p, q, N)/sqrt(N), N = floor(c q), against the factorisation
/// through the complete Gauss sum and the periodic-weight sum, and against
/// reference samples of c^{-1/2} Y G_phi(x) with x uniform in [-1/2, 1/2].
pub fn long_sum_experiment(
    q: u64,
    coeff: f64,
    reference_samples: usize,
    seed: u64,
    g_series_terms: u64,
    exec: ExecPolicy,
) -> Result<LongSumReport> {
    if q % 2 == 0 {
        return Err(Error::BadModulus {
            q,
            requirement: "odd q",
        });
    }
    if !(coeff > 0.0 && coeff <= 1.0) {
        return Err(Error::InvalidConfig(format!(
            "long-sum scale {coeff} outside (0, 1]"
        )));
    }
    if reference_samples == 0 {
        return Err(Error::EmptySamples);
    }
    let n = ((coeff * q as f64).floor() as u64).max(1);
    let eps_q = epsilon(q as i64)?;
    let table = RootTable::new(q);
    let weight = WeightFunction::unit_indicator();
    let phi = PeriodicWeight::indicator(coeff)?;
    let ps = coprime_residues(q, &TorusSet::full());
    let inv_sqrt_c = coeff.sqrt().recip();
    let floor_correction = (coeff * q as f64 / n as f64).sqrt();
    let sqrt_q = (q as f64).sqrt();
    let sqrt_n = (n as f64).sqrt();
    let eps_c = eps_q.as_complex();

    struct PerResidue {
        sample: Complex,
        residual: f64,
        sign_defect: f64,
        label: SignFactor,
    }

    let rows = map_slice(exec, &ps, |&p| -> Result<PerResidue> {
        let lhs = incomplete_gauss_sum_with(&table, &weight, p as i64, n)?.value / sqrt_n;
        let g1 = classical_gauss_sum_direct_with(&table, p as i64)?.value;
        let g_phi = long_gauss_sum_with(&table, &phi, p as i64)?.value;
        let factor_sign = g1 / (eps_c * sqrt_q);
        let factor_ratio = g_phi / g1;
        let rhs = inv_sqrt_c * factor_sign * factor_ratio * eps_c * floor_correction;
        let residual = (lhs - rhs).norm() / lhs.norm().max(1e-12);
        let sign_defect = (factor_sign.norm() - 1.0).abs().max(factor_sign.im.abs());
        let label = sign_class(p as i64, q)?.1;
        Ok(PerResidue {
            sample: lhs,
            residual,
            sign_defect,
            label,
        })
    });
    let rows: Vec<PerResidue> = rows.into_iter().collect::<Result<_>>()?;
    let max_chain_residual = rows.iter().map(|r| r.residual).fold(0.0f64, f64::max);
    let max_sign_defect = rows.iter().map(|r| r.sign_defect).fold(0.0f64, f64::max);
    let samples = EmpiricalDistribution::from_labeled(
        rows.iter().map(|r| r.sample).collect(),
        rows.iter().map(|r| r.label).collect(),
    )?;

    let coeffs = g_phi_coefficients(&phi, g_series_terms);
    let rng = CounterRng::new(seed);
    let xs_rng = rng.stream(2);
    let sign_rng = rng.stream(3);
    let reference = map_indexed(exec, reference_samples, |i| {
        let x = xs_rng.f64_at(i as u64) - 0.5;
        let y_sign = sign_rng.sign_at(i as u64);
        inv_sqrt_c * y_sign * g_phi_value(&coeffs, x)
    });
    let reference = EmpiricalDistribution::from_samples(reference);
    let ks_re = ks_distance(&samples, &reference, Projection::Re)?;
    let ks_im = ks_distance(&samples, &reference, Projection::Im)?;
    Ok(LongSumReport {
        q,
        n,
        epsilon_q: eps_q,
        floor_correction,
        max_chain_residual,
        max_sign_defect,
        ks_re,
        ks_im,
        samples,
        reference,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    #[test]
    fn ks_distance_trivial_cases() {
        let a = EmpiricalDistribution::from_samples(vec![c(0.0, 0.0), c(1.0, 0.0), c(2.0, 0.0)]);
        assert_eq!(ks_distance(&a, &a, Projection::Re).unwrap(), 0.0);
        let b = EmpiricalDistribution::from_samples(vec![c(5.0, 0.0), c(6.0, 0.0)]);
        assert_eq!(ks_distance(&a, &b, Projection::Re).unwrap(), 1.0);
        let empty = EmpiricalDistribution::from_samples(vec![]);
        assert!(ks_distance(&a, &empty, Projection::Re).is_err());
    }

    #[test]
    fn ks_distance_handles_ties() {
        let a = EmpiricalDistribution::from_samples(
            [1.0, 1.0, 4.0, 4.0].iter().map(|&v| c(v, 0.0)).collect(),
        );
        let b = EmpiricalDistribution::from_samples(
            [1.0, 1.0, 1.0, 4.0].iter().map(|&v| c(v, 0.0)).collect(),
        );
        assert!((ks_distance(&a, &b, Projection::Re).unwrap() - 0.25).abs() < 1e-12);
    }

    #[test]
    fn ks_null_scale_two_reference_draws() {
        let f = WeightFunction::unit_indicator();
        let a = reference_theta_sample(&f, 50, 30_000, 1, ExecPolicy::default()).unwrap();
        let b = reference_theta_sample(&f, 50, 30_000, 2, ExecPolicy::default()).unwrap();
        for proj in Projection::all() {
            let d = ks_distance(&a, &b, proj).unwrap();
            assert!(d < 0.012, "{}: {d}", proj.label());
        }
    }

    #[test]
    fn histogram_mass_sums_to_one() {
        let rng = CounterRng::new(3);
        let samples: Vec<Complex> = (0..5000u64)
            .map(|i| c(rng.f64_at(2 * i) * 4.0 - 2.0, rng.f64_at(2 * i + 1)))
            .collect();
        let dist = EmpiricalDistribution::from_samples(samples);
        for proj in Projection::all() {
            let h = dist.histogram(proj, 37).unwrap();
            let total: f64 = h.mass.iter().sum();
            assert!((total - 1.0).abs() < 1e-12);
            assert_eq!(h.edges.len(), h.mass.len() + 1);
        }
    }

    #[test]
    fn tail_exponent_synthetic_power_law() {
        // P(|z| > R) = R^{-4} exactly via inverse-CDF sampling.
        let rng = CounterRng::new(17);
        let n = 400_000u64;
        let samples: Vec<Complex> = (0..n)
            .map(|i| {
                let u = (rng.f64_at(i)).max(1e-12);
                let r = u.powf(-0.25);
                let angle = std::f64::consts::TAU * rng.f64_at(n + i);
                c(r * angle.cos(), r * angle.sin())
            })
            .collect();
        let dist = EmpiricalDistribution::from_samples(samples);
        let grid = [1.5, 2.0, 2.8, 4.0, 5.5];
        let fit = tail_exponent(&dist, &grid).unwrap();
        assert!(
            (fit.slope + 4.0).abs() < 0.2,
            "slope {} not near -4",
            fit.slope
        );
        assert!(fit.exceedances_at_top >= 100);
    }

    #[test]
    fn tail_exponent_gaussian_is_flagged_steep() {
        // Box-Muller modulus: tails collapse much faster than any power law.
        let rng = CounterRng::new(23);
        let samples: Vec<Complex> = (0..200_000u64)
            .map(|i| {
                let u1 = rng.f64_at(2 * i).max(1e-15);
                let u2 = rng.f64_at(2 * i + 1);
                let r = (-2.0 * u1.ln()).sqrt();
                let t = std::f64::consts::TAU * u2;
                c(r * t.cos(), r * t.sin())
            })
            .collect();
        let dist = EmpiricalDistribution::from_samples(samples);
        let fit = tail_exponent(&dist, &[2.0, 2.5, 3.0, 3.5]).unwrap();
        assert!(fit.slope < -5.0, "gaussian slope {} should dive", fit.slope);
        // insufficient tail mass at absurd radii is an error, not a fit
        assert!(matches!(
            tail_exponent(&dist, &[1.0, 40.0]),
            Err(Error::InsufficientTailMass { .. })
        ));
    }

    #[test]
    fn tail_exponent_needs_enough_samples() {
        let dist = EmpiricalDistribution::from_samples(vec![c(1.0, 0.0); 100]);
        assert!(matches!(
            tail_exponent(&dist, &[0.5, 0.8]),
            Err(Error::InsufficientSamples { .. })
        ));
    }

    #[test]
    fn short_experiment_small_modulus() {
        let mut cfg = ExperimentConfig::theorem1(1, 5);
        cfg.n_coeff = 2.0 / 5f64.powf(7.0 / 8.0); // force N = 2
        let dist = short_gauss_experiment(&cfg).unwrap();
        assert_eq!(dist.len(), 4);
        let expected: Vec<f64> = (1..=4)
            .map(|p| 2.0 * (std::f64::consts::TAU * p as f64 / 5.0).cos() / 2f64.sqrt())
            .collect();
        for (z, e) in dist.samples().iter().zip(expected) {
            assert!((z - c(e, 0.0)).norm() < 1e-12);
        }
        // zero weight gives all-zero samples
        let mut zcfg = cfg.clone();
        zcfg.weight = WeightFunction::zero();
        let dist = short_gauss_experiment(&zcfg).unwrap();
        assert!(dist.samples().iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn experiment_is_deterministic_and_policy_independent() {
        let mut cfg = ExperimentConfig::theorem1(1, 101);
        cfg.reference_samples = 500;
        cfg.exec = ExecPolicy::Sequential;
        let a = short_gauss_experiment(&cfg).unwrap();
        cfg.exec = ExecPolicy::Parallel;
        let b = short_gauss_experiment(&cfg).unwrap();
        assert_eq!(a.len(), b.len());
        for (x, y) in a.samples().iter().zip(b.samples()) {
            assert_eq!(x.re.to_bits(), y.re.to_bits());
            assert_eq!(x.im.to_bits(), y.im.to_bits());
        }
        let ra = reference_theta_sample(
            &cfg.weight,
            cfg.n(),
            512,
            cfg.seed,
            ExecPolicy::Sequential,
        )
        .unwrap();
        let rb =
            reference_theta_sample(&cfg.weight, cfg.n(), 512, cfg.seed, ExecPolicy::Parallel)
                .unwrap();
        for (x, y) in ra.samples().iter().zip(rb.samples()) {
            assert_eq!(x.re.to_bits(), y.re.to_bits());
            assert_eq!(x.im.to_bits(), y.im.to_bits());
        }
    }

    #[test]
    fn partition_property_of_class_restriction() {
        let cfg = ExperimentConfig::theorem1(1, 101);
        let dist = short_gauss_experiment(&cfg).unwrap();
        let classes = dist.classes().unwrap();
        let mut reassembled = 0usize;
        let mut seen: Vec<Complex> = Vec::new();
        for class in classes {
            let part = dist.restrict_to_class(class).unwrap();
            reassembled += part.len();
            seen.extend_from_slice(part.samples());
        }
        assert_eq!(reassembled, dist.len());
        // same multiset: sort by (re, im) and compare
        let key = |z: &Complex| (z.re, z.im);
        let mut all: Vec<Complex> = dist.samples().to_vec();
        all.sort_by(|a, b| key(a).partial_cmp(&key(b)).unwrap());
        seen.sort_by(|a, b| key(a).partial_cmp(&key(b)).unwrap());
        for (x, y) in all.iter().zip(&seen) {
            assert_eq!(x.re.to_bits(), y.re.to_bits());
            assert_eq!(x.im.to_bits(), y.im.to_bits());
        }
    }

    #[test]
    fn experiment_second_moment_matches_mean_square_path() {
        let cfg = ExperimentConfig::theorem1(1, 101);
        let dist = short_gauss_experiment(&cfg).unwrap();
        let report = mean_square_check(&cfg).unwrap();
        let emp = dist.second_moment().unwrap();
        assert!(
            (emp - report.m_over_n).abs() < 1e-9,
            "{emp} vs {}",
            report.m_over_n
        );
        // and the prime-case exact formula is active here
        let exact = report.prime_exact.unwrap();
        assert!((report.m - exact).abs() / exact < 1e-10);
    }

    #[test]
    fn reference_second_moment_near_weight_norm() {
        let f = WeightFunction::unit_indicator();
        let dist = reference_theta_sample(&f, 101, 40_000, 11, ExecPolicy::default()).unwrap();
        let m2 = dist.second_moment().unwrap();
        assert!((m2 - 1.0).abs() < 0.02, "second moment {m2}");
    }

    #[test]
    fn reference_routes_agree_for_gaussian_weight() {
        let f = WeightFunction::hermite(0).unwrap();
        let expansion = HermiteExpansion::delta(0).unwrap();
        let n = 64;
        let a = reference_theta_sample(&f, n, 20_000, 5, ExecPolicy::default()).unwrap();
        let b = reference_big_theta_sample(&expansion, n, 20_000, 6, ExecPolicy::default())
            .unwrap();
        for proj in [Projection::Re, Projection::Im] {
            let d = ks_distance(&a, &b, proj).unwrap();
            assert!(d < 0.015, "{}: {d}", proj.label());
        }
    }

    #[test]
    fn sign_joint_small_odd_prime() {
        let cfg = ExperimentConfig::theorem1(1, 401);
        let dist = short_gauss_experiment(&cfg).unwrap();
        let report = sign_joint_test(&dist).unwrap();
        assert_eq!(report.class_counts.len(), 2);
        // residues and nonresidues are exactly equinumerous mod an odd prime
        assert_eq!(report.class_counts[0].1, report.class_counts[1].1);
        assert!(report.max_count_deviation < 1e-12);
        assert_eq!(report.pairwise.len(), 1);
    }

    #[test]
    fn sign_joint_rejects_missing_or_thin_labels() {
        let unlabeled = EmpiricalDistribution::from_samples(vec![c(1.0, 0.0); 100]);
        assert!(matches!(
            sign_joint_test(&unlabeled),
            Err(Error::MissingLabels)
        ));
        let labels = vec![SignFactor::One; 10];
        let thin =
            EmpiricalDistribution::from_labeled(vec![c(1.0, 0.0); 10], labels).unwrap();
        assert!(matches!(
            sign_joint_test(&thin),
            Err(Error::InsufficientSamples { .. })
        ));
    }

    #[test]
    fn fundamental_domain_mass_is_pi_over_three() {
        // Simpson oracle, independent of the closed-form antiderivative:
        // integrate the width over y < 1 and add the 1/y^2 tail above 1.
        let domain_width = |y: f64| {
            if y >= 1.0 {
                1.0
            } else {
                1.0 - 2.0 * (1.0 - y * y).max(0.0).sqrt()
            }
        };
        let f = |y: f64| domain_width(y) / (y * y);
        let base = 3f64.sqrt() / 2.0;
        let n = 40_000;
        let h = (1.0 - base) / n as f64;
        let mut s = f(base) + f(1.0);
        for k in 1..n {
            s += f(base + k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 };
        }
        let oracle = s * h / 3.0 + 1.0;
        assert!((oracle - std::f64::consts::PI / 3.0).abs() < 1e-6);
        assert!((fundamental_domain_mass() - std::f64::consts::PI / 3.0).abs() < 1e-9);
    }

    #[test]
    fn band_edges_structure() {
        let edges = band_edges(10);
        assert_eq!(edges.len(), 11);
        assert!((edges[1] - 1.5).abs() < 1e-12);
        assert!((edges[9] - 6.0).abs() < 1e-12);
        assert!(edges[10].is_infinite());
        // middle bands carry equal hyperbolic mass
        let lo = cumulative_domain_mass(1.5);
        let hi = cumulative_domain_mass(6.0);
        for k in 1..9 {
            let mass = cumulative_domain_mass(edges[k + 1]) - cumulative_domain_mass(edges[k]);
            assert!(
                (mass - (hi - lo) / 8.0).abs() < 1e-9,
                "band {k}: {mass} vs {}",
                (hi - lo) / 8.0
            );
        }
        assert!(edges.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn horocycle_experiment_small() {
        let report = horocycle_experiment(1009, 1009f64.powf(-1.75), 20, ExecPolicy::default())
            .unwrap();
        assert_eq!(report.point_count, 1008);
        let total: f64 = report.bin_masses.iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
        let expected_total: f64 = report.expected_masses.iter().sum();
        assert!((expected_total - 1.0).abs() < 1e-9);
        assert!(report.total_variation <= 1.0);
        assert!(horocycle_experiment(7, 1e-3, 5, ExecPolicy::default()).is_err());
        assert!(horocycle_experiment(7, 1e-3, 4, ExecPolicy::default()).is_err());
    }

    #[test]
    fn long_sum_small_modulus_chain() {
        let report =
            long_sum_experiment(29, 1.0 / 7f64.sqrt(), 2000, 3, 256, ExecPolicy::default())
                .unwrap();
        assert_eq!(report.n, 10);
        assert_eq!(report.epsilon_q, SignFactor::One); // 29 ≡ 1 mod 4
        assert!(
            report.max_chain_residual < 1e-9,
            "residual {}",
            report.max_chain_residual
        );
        assert!(report.max_sign_defect < 1e-9);
        assert!(long_sum_experiment(28, 0.3, 100, 1, 64, ExecPolicy::default()).is_err());
    }
}
