//! Hermite functions, Hermite expansions of weight functions, theta series
//! on the upper half-plane and the half-integral-weight automorphy factor.

use crate::expsums::WeightFunction;
use crate::metaplectic::{HalfPlanePoint, MetaplecticPoint, RealMatrix2};
use crate::numtheory::{epsilon, jacobi_symbol};
use crate::util::{frac_mul, unit_phase, CompensatedSum};
use crate::{Complex, Error, Result};

/// Hermite orders above this overflow the polynomial recurrence for the
/// argument ranges we care about.
pub const MAX_HERMITE_ORDER: u32 = 300;

/// Physicists' Hermite polynomial H_nu(t) by the three-term recurrence.
pub fn hermite_polynomial(nu: u32, t: f64) -> Result<f64> {
    if nu > MAX_HERMITE_ORDER {
        return Err(Error::HermiteOrderTooLarge(nu));
    }
    let mut p0 = 1.0;
    if nu == 0 {
        return Ok(p0);
    }
    let mut p1 = 2.0 * t;
    for k in 1..nu {
        let p2 = 2.0 * t * p1 - 2.0 * k as f64 * p0;
        p0 = p1;
        p1 = p2;
    }
    Ok(p1)
}

/// Normalised Hermite functions h_0(t), ..., h_nu_max(t) in one pass.
///
/// The recurrence runs directly on the normalised functions
/// h_{n+1} = sqrt(2/(n+1)) u h_n - sqrt(n/(n+1)) h_{n-1}, u = 2 sqrt(pi) t,
/// which stays bounded where the raw polynomial recurrence would overflow.
pub fn hermite_values(nu_max: u32, t: f64) -> Result<Vec<f64>> {
    if nu_max > MAX_HERMITE_ORDER {
        return Err(Error::HermiteOrderTooLarge(nu_max));
    }
    let mut values = Vec::with_capacity(nu_max as usize + 1);
    let gauss = (-2.0 * std::f64::consts::PI * t * t).exp();
    let h0 = std::f64::consts::SQRT_2 * gauss;
    values.push(h0);
    if nu_max == 0 {
        return Ok(values);
    }
    let u = 2.0 * std::f64::consts::PI.sqrt() * t;
    let mut prev = h0;
    let mut cur = std::f64::consts::SQRT_2 * u * h0;
    values.push(cur);
    for n in 1..nu_max {
        let nf = n as f64;
        let next = (2.0 / (nf + 1.0)).sqrt() * u * cur - (nf / (nf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
        values.push(cur);
    }
    Ok(values)
}

/// h_nu(t) = (2^{nu-1} nu!)^{-1/2} H_nu(2 sqrt(pi) t) exp(-2 pi t^2).
pub fn hermite_function(nu: u32, t: f64) -> Result<f64> {
    Ok(hermite_values(nu, t)?[nu as usize])
}

/// Truncated Hermite expansion of a weight function: coefficients
/// fhat(0..=nu_max) against the orthonormal h_nu basis.
#[derive(Debug, Clone, PartialEq)]
pub struct HermiteExpansion {
    coeffs: Vec<f64>,
}

impl HermiteExpansion {
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidConfig("expansion needs >= 1 coefficient".into()));
        }
        if coeffs.len() as u32 > MAX_HERMITE_ORDER + 1 {
            return Err(Error::HermiteOrderTooLarge(coeffs.len() as u32 - 1));
        }
        Ok(Self { coeffs })
    }

    /// The expansion of h_nu itself: a single unit coefficient.
    pub fn delta(nu: u32) -> Result<Self> {
        if nu > MAX_HERMITE_ORDER {
            return Err(Error::HermiteOrderTooLarge(nu));
        }
        let mut coeffs = vec![0.0; nu as usize + 1];
        coeffs[nu as usize] = 1.0;
        Ok(Self { coeffs })
    }

    pub fn nu_max(&self) -> u32 {
        self.coeffs.len() as u32 - 1
    }

    pub fn coeff(&self, nu: u32) -> f64 {
        self.coeffs.get(nu as usize).copied().unwrap_or(0.0)
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// sum fhat(nu)^2, bounded by ||f||_2^2 (Bessel).
    pub fn l2_norm_sq(&self) -> f64 {
        self.coeffs.iter().map(|c| c * c).sum()
    }
}

/// Hermite coefficients fhat(nu) = (f, h_nu) by panel quadrature over the
/// support, with panels split at the support endpoints and doubled until the
/// whole coefficient vector stabilises.
pub fn hermite_coefficients(f: &WeightFunction, nu_max: u32) -> Result<HermiteExpansion> {
    if nu_max > MAX_HERMITE_ORDER {
        return Err(Error::HermiteOrderTooLarge(nu_max));
    }
    let (lo, hi) = f.support();
    if lo >= hi {
        return HermiteExpansion::new(vec![0.0; nu_max as usize + 1]);
    }
    let mut panels = 8usize;
    let mut prev = coefficients_with_panels(f, nu_max, lo, hi, panels)?;
    for _ in 0..8 {
        panels *= 2;
        let next = coefficients_with_panels(f, nu_max, lo, hi, panels)?;
        let worst = prev
            .iter()
            .zip(&next)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        if worst < 1e-11 {
            return HermiteExpansion::new(next);
        }
        prev = next;
    }
    Err(Error::QuadratureNotConverged("hermite coefficients"))
}

fn coefficients_with_panels(
    f: &WeightFunction,
    nu_max: u32,
    lo: f64,
    hi: f64,
    panels: usize,
) -> Result<Vec<f64>> {
    let (nodes, weights) = crate::quadrature::gauss_legendre(16);
    let mut acc = vec![crate::util::CompensatedReal::new(); nu_max as usize + 1];
    let h = (hi - lo) / panels as f64;
    for k in 0..panels {
        let a = lo + k as f64 * h;
        let mid = a + 0.5 * h;
        for (x, w) in nodes.iter().zip(&weights) {
            let t = mid + 0.5 * h * x;
            let ft = f.eval(t);
            if ft == 0.0 {
                continue;
            }
            let hv = hermite_values(nu_max, t)?;
            for (slot, hval) in acc.iter_mut().zip(&hv) {
                slot.add(0.5 * h * w * ft * hval);
            }
        }
    }
    Ok(acc.iter().map(|c| c.value()).collect())
}

/// Series length needed for machine-precision Gaussian tails at order nu
/// and height y: ceil(8 sqrt(2 nu + 1) / sqrt(y)) + 8.
pub fn required_terms(nu: u32, y: f64) -> u64 {
    let width = (2.0 * nu as f64 + 1.0).sqrt();
    (8.0 * width / y.sqrt()).ceil() as u64 + 8
}

/// theta_nu(z) = y^{1/4} sum_n h_nu(n sqrt(y)) e(n^2 x), truncated at n_max.
pub fn theta_nu(z: &HalfPlanePoint, nu: u32, n_max: u64) -> Result<Complex> {
    let needed = required_terms(nu, z.y);
    if n_max < needed {
        return Err(Error::TruncationTooSmall {
            needed,
            got: n_max,
        });
    }
    let sqrt_y = z.y.sqrt();
    let mut acc = CompensatedSum::new();
    for n in -(n_max as i64)..=(n_max as i64) {
        let h = hermite_function(nu, n as f64 * sqrt_y)?;
        if h == 0.0 {
            continue;
        }
        let phase = unit_phase(frac_mul(z.x, n * n));
        acc.add(h * phase);
    }
    Ok(z.y.powf(0.25) * acc.value())
}

/// theta_nu with the truncation chosen automatically.
pub fn theta_nu_auto(z: &HalfPlanePoint, nu: u32) -> Result<Complex> {
    theta_nu(z, nu, required_terms(nu, z.y))
}

/// Automorphy factor j_g(z) = eps_d^{-1} (c/d) ((cz+d)/|cz+d|)^{1/2} for
/// g in Gamma_0(4), principal square-root branch.
pub fn automorphy_factor(g: &RealMatrix2, z: &HalfPlanePoint) -> Result<Complex> {
    let (a, b, c, d) = g
        .to_integers()
        .ok_or(Error::NotInGroup { group: "Gamma_0(4)" })?;
    if a * d - b * c != 1 || c.rem_euclid(4) != 0 {
        return Err(Error::NotInGroup { group: "Gamma_0(4)" });
    }
    let eps_inv = epsilon(d)?.conj().as_complex();
    let symbol = jacobi_symbol(c, d)?.as_complex();
    let w = Complex::new(c as f64 * z.x + d as f64, c as f64 * z.y);
    let half_arg = 0.5 * w.arg();
    Ok(eps_inv * symbol * Complex::new(half_arg.cos(), half_arg.sin()))
}

/// Theta series weighted by a Hermite expansion on the cover coordinates
/// (z, phi):
///
/// Theta_f(z, phi) = y^{1/4} sum_h f_phi(h sqrt(y)) e(x h^2),
/// f_phi(t) = sum_nu fhat(nu) exp(-i (2 nu + 1) phi / 2) h_nu(t).
pub fn big_theta(
    expansion: &HermiteExpansion,
    point: &MetaplecticPoint,
    n_max: Option<u64>,
) -> Result<Complex> {
    let z = &point.z;
    let needed = required_terms(expansion.nu_max(), z.y);
    let n_max = match n_max {
        Some(n) if n < needed => {
            return Err(Error::TruncationTooSmall {
                needed,
                got: n,
            })
        }
        Some(n) => n,
        None => needed,
    };
    let nu_max = expansion.nu_max();
    let rotations: Vec<Complex> = (0..=nu_max)
        .map(|nu| {
            let angle = -0.5 * (2.0 * nu as f64 + 1.0) * point.phi;
            Complex::new(angle.cos(), angle.sin())
        })
        .collect();
    let weighted: Vec<Complex> = expansion
        .coeffs()
        .iter()
        .zip(&rotations)
        .map(|(c, r)| c * r)
        .collect();
    let sqrt_y = z.y.sqrt();
    let mut acc = CompensatedSum::new();
    for n in -(n_max as i64)..=(n_max as i64) {
        let hv = hermite_values(nu_max, n as f64 * sqrt_y)?;
        let mut f_phi = CompensatedSum::new();
        for (wc, h) in weighted.iter().zip(&hv) {
            f_phi.add(wc * h);
        }
        let f_phi = f_phi.value();
        if f_phi.norm_sqr() == 0.0 {
            continue;
        }
        acc.add(f_phi * unit_phase(frac_mul(z.x, n * n)));
    }
    Ok(z.y.powf(0.25) * acc.value())
}
