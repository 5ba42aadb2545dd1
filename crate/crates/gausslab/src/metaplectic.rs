//! The upper half-plane action, Iwasawa coordinates, the universal cover of
//! SL(2,R) with its group law, explicit lifts of rational horocycle points,
//! and reduction to the standard fundamental domain.

use crate::numtheory::{epsilon, gcd, jacobi_symbol, mod_inverse, SignFactor};
use crate::{Complex, Error, Result};

const TAU: f64 = std::f64::consts::TAU;

/// A point x + iy in the upper half-plane, y > 0 strictly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalfPlanePoint {
    pub x: f64,
    pub y: f64,
}

impl HalfPlanePoint {
    pub fn new(x: f64, y: f64) -> Result<Self> {
        if !(y > 0.0) || !y.is_finite() || !x.is_finite() {
            return Err(Error::NotInUpperHalfPlane { y });
        }
        Ok(Self { x, y })
    }

    pub fn as_complex(&self) -> Complex {
        Complex::new(self.x, self.y)
    }
}

/// A real 2x2 matrix with determinant one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RealMatrix2 {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl RealMatrix2 {
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        let det = a * d - b * c;
        if (det - 1.0).abs() > 1e-12 {
            return Err(Error::NotUnimodular { det });
        }
        Ok(Self { a, b, c, d })
    }

    /// Integer matrix; panics unless the determinant is exactly one.
    pub fn from_integers(a: i64, b: i64, c: i64, d: i64) -> Self {
        assert_eq!(a * d - b * c, 1, "integer matrix must have det 1");
        Self {
            a: a as f64,
            b: b as f64,
            c: c as f64,
            d: d as f64,
        }
    }

    pub fn identity() -> Self {
        Self::from_integers(1, 0, 0, 1)
    }

    pub fn det(&self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    pub fn mul(&self, rhs: &RealMatrix2) -> RealMatrix2 {
        RealMatrix2 {
            a: self.a * rhs.a + self.b * rhs.c,
            b: self.a * rhs.b + self.b * rhs.d,
            c: self.c * rhs.a + self.d * rhs.c,
            d: self.c * rhs.b + self.d * rhs.d,
        }
    }

    pub fn inverse(&self) -> RealMatrix2 {
        RealMatrix2 {
            a: self.d,
            b: -self.b,
            c: -self.c,
            d: self.a,
        }
    }

    /// Entries as integers, when they are integers to within 1e-9.
    pub fn to_integers(&self) -> Option<(i64, i64, i64, i64)> {
        let round = |v: f64| {
            let r = v.round();
            ((v - r).abs() < 1e-9).then_some(r as i64)
        };
        Some((round(self.a)?, round(self.b)?, round(self.c)?, round(self.d)?))
    }
}

/// Fractional linear action z -> (az+b)/(cz+d).
pub fn moebius(g: &RealMatrix2, z: &HalfPlanePoint) -> Result<HalfPlanePoint> {
    if (g.det() - 1.0).abs() > 1e-12 {
        return Err(Error::NotUnimodular { det: g.det() });
    }
    let den = Complex::new(g.c * z.x + g.d, g.c * z.y);
    let norm = den.norm_sqr();
    let num = Complex::new(g.a * z.x + g.b, g.a * z.y);
    let x = (num * den.conj()).re / norm;
    let y = z.y / norm;
    HalfPlanePoint::new(x, y)
}

/// Iwasawa coordinates: g = n(x) a(y) k(phi) with
/// n(x) = [1 x; 0 1], a(y) = [sqrt y 0; 0 1/sqrt y],
/// k(phi) = [cos phi sin phi; -sin phi cos phi], phi in [0, 2 pi).
pub fn iwasawa_decompose(g: &RealMatrix2) -> Result<(f64, f64, f64)> {
    if (g.det() - 1.0).abs() > 1e-12 {
        return Err(Error::NotUnimodular { det: g.det() });
    }
    let norm = g.c * g.c + g.d * g.d;
    let y = 1.0 / norm;
    let x = (g.a * g.c + g.b * g.d) / norm;
    let phi = (-g.c).atan2(g.d).rem_euclid(TAU);
    Ok((x, y, phi))
}

pub fn iwasawa_compose(x: f64, y: f64, phi: f64) -> Result<RealMatrix2> {
    if !(y > 0.0) {
        return Err(Error::NotInUpperHalfPlane { y });
    }
    let (s, c) = phi.sin_cos();
    let sy = y.sqrt();
    Ok(RealMatrix2 {
        a: sy * c - x / sy * s,
        b: sy * s + x / sy * c,
        c: -s / sy,
        d: c / sy,
    })
}

/// A point (z, phi) of the universal cover in horocycle coordinates;
/// phi is an unbounded real whose class mod 4 pi carries the arithmetic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetaplecticPoint {
    pub z: HalfPlanePoint,
    pub phi: f64,
}

impl MetaplecticPoint {
    pub fn new(z: HalfPlanePoint, phi: f64) -> Self {
        Self { z, phi }
    }
}

/// An element [g, beta_g] of the universal cover: the matrix together with
/// the value beta_g(i) selecting the sheet, where
/// exp(i beta_g(z)) = (cz + d)/|cz + d|.
///
/// For fixed real (c, d) != (0, 0) the image of H under z -> cz + d stays in
/// an open half-plane, so the principal argument is already continuous on H
/// and the continuation is the principal argument plus a constant 2 pi k.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetaplecticElement {
    g: RealMatrix2,
    beta_at_i: f64,
}

impl MetaplecticElement {
    pub fn new(g: RealMatrix2, beta_at_i: f64) -> Result<Self> {
        if (g.det() - 1.0).abs() > 1e-12 {
            return Err(Error::NotUnimodular { det: g.det() });
        }
        let principal = (g.c).atan2(g.d);
        let dev = (beta_at_i - principal).rem_euclid(TAU);
        let dev = dev.min(TAU - dev);
        if dev > 1e-10 {
            return Err(Error::InvalidConfig(format!(
                "beta_at_i = {beta_at_i} is not a lift of arg(ci + d) = {principal}"
            )));
        }
        Ok(Self { g, beta_at_i })
    }

    fn new_unchecked(g: RealMatrix2, beta_at_i: f64) -> Self {
        debug_assert!(Self::new(g, beta_at_i).is_ok());
        Self { g, beta_at_i }
    }

    pub fn identity() -> Self {
        Self {
            g: RealMatrix2::identity(),
            beta_at_i: 0.0,
        }
    }

    pub fn matrix(&self) -> &RealMatrix2 {
        &self.g
    }

    pub fn beta_at_i(&self) -> f64 {
        self.beta_at_i
    }

    /// beta_g at an arbitrary point of H: principal argument of cz + d plus
    /// the sheet offset pinned at i.
    pub fn beta_at(&self, z: &HalfPlanePoint) -> f64 {
        let principal_i = (self.g.c).atan2(self.g.d);
        let k = ((self.beta_at_i - principal_i) / TAU).round();
        (self.g.c * z.y).atan2(self.g.c * z.x + self.g.d) + TAU * k
    }

    /// Left action on cover points: (z, phi) -> (gz, phi + beta_g(z)).
    pub fn apply(&self, p: &MetaplecticPoint) -> MetaplecticPoint {
        let z = moebius(&self.g, &p.z).expect("unimodular by construction");
        MetaplecticPoint::new(z, p.phi + self.beta_at(&p.z))
    }

    /// Group law: (g, beta)(g', beta') = (g g', beta(g' .) + beta'(.)).
    pub fn multiply(&self, rhs: &MetaplecticElement) -> MetaplecticElement {
        let g = self.g.mul(&rhs.g);
        let gi = moebius(&rhs.g, &HalfPlanePoint::new(0.0, 1.0).unwrap())
            .expect("unimodular");
        let beta = self.beta_at(&gi) + rhs.beta_at_i;
        MetaplecticElement::new_unchecked(g, beta)
    }

    /// Inverse element: beta'(z) = -beta_g(g^{-1} z).
    pub fn inverse(&self) -> MetaplecticElement {
        let g_inv = self.g.inverse();
        let gi = moebius(&g_inv, &HalfPlanePoint::new(0.0, 1.0).unwrap()).expect("unimodular");
        MetaplecticElement::new_unchecked(g_inv, -self.beta_at(&gi))
    }

    /// The unique element mapping (i, 0) to the given cover point:
    /// matrix n(x) a(y) k(-phi) with beta_at_i pinned to phi exactly.
    pub fn from_point(p: &MetaplecticPoint) -> MetaplecticElement {
        let g = iwasawa_compose(p.z.x, p.z.y, (-p.phi).rem_euclid(TAU)).expect("y > 0");
        MetaplecticElement::new_unchecked(g, p.phi)
    }

    /// The cover point this element maps (i, 0) to: (g i, beta_g(i)).
    pub fn to_point(&self) -> MetaplecticPoint {
        let z = moebius(&self.g, &HalfPlanePoint::new(0.0, 1.0).unwrap()).expect("unimodular");
        MetaplecticPoint::new(z, self.beta_at_i)
    }
}

/// The fixed element [ (0, -1/2; 2, 0), arg ] with beta(i) = arg(2i) = pi/2.
pub fn gamma0_tilde() -> MetaplecticElement {
    let g = RealMatrix2::new(0.0, -0.5, 2.0, 0.0).expect("det 1");
    MetaplecticElement::new_unchecked(g, std::f64::consts::FRAC_PI_2)
}

/// The translation element [ (1, x; 0, 1), 0 ].
pub fn n_minus(x: f64) -> MetaplecticElement {
    let g = RealMatrix2::new(1.0, x, 0.0, 1.0).expect("det 1");
    MetaplecticElement::new_unchecked(g, 0.0)
}

/// Which congruence case of the rational lift applies, by q mod 4.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LiftCase {
    /// q ≡ 0 mod 4
    I,
    /// q odd
    II,
    /// q ≡ 2 mod 4
    III,
}

/// Explicit lift of the rational horocycle point (p/q + iy, 0) into the
/// cusp coordinates of the cover.
#[derive(Debug, Clone)]
pub struct RationalLift {
    /// Congruence case by q mod 4.
    pub case: LiftCase,
    /// The cusp-side point (x_t + i y_t, phi_pq): for case I the point is
    /// directly equivalent mod the discrete theta group; for cases II/III it
    /// sits behind an extra gamma0 shift (and a trailing half translation in
    /// case III).
    pub target: MetaplecticPoint,
    /// The class angle, a representative of phi_{p,q} mod 4 pi.
    pub phi_pq: f64,
    /// The explicit discrete-group element from the construction; integer
    /// entries, congruent to the identity mod 4 in the usual sense.
    pub witness: MetaplecticElement,
    p: u64,
    q: u64,
    y: f64,
}

/// Residual errors of a verified lift.
#[derive(Debug, Clone, Copy)]
pub struct LiftCheck {
    /// Distance of the composite z from the expected point, after removing
    /// the integer translation (y compared relative to its magnitude when
    /// large).
    pub z_error: f64,
    /// Distance of the composite phi from the nearest exact multiple of
    /// 4 pi away from the expected class angle.
    pub phi_error: f64,
}

fn class_angle(s: SignFactor) -> f64 {
    // phi with e^{i phi / 2} = s * e^{-i pi/4}
    match s {
        SignFactor::One => -std::f64::consts::FRAC_PI_2,
        SignFactor::I => std::f64::consts::FRAC_PI_2,
        SignFactor::MinusOne => 1.5 * std::f64::consts::PI,
        SignFactor::MinusI => -1.5 * std::f64::consts::PI,
        SignFactor::Zero => unreachable!("coprime inputs give unimodular signs"),
    }
}

/// Sheet-pinned discrete element over an integer matrix in Gamma_1(4):
/// e^{i beta(z)/2} = (c/d) e^{i arg(cz+d)/2}.
fn theta_group_element(a: i64, b: i64, c: i64, d: i64) -> Result<MetaplecticElement> {
    if a * d - b * c != 1 || c.rem_euclid(4) != 0 || a.rem_euclid(4) != 1 || d.rem_euclid(4) != 1 {
        return Err(Error::NotInGroup { group: "Gamma_1(4)" });
    }
    let g = RealMatrix2::from_integers(a, b, c, d);
    let principal = (c as f64).atan2(d as f64);
    let beta = match jacobi_symbol(c, d)? {
        SignFactor::One => principal,
        SignFactor::MinusOne => principal + TAU,
        _ => unreachable!("(c/d) is ±1 for coprime c, d"),
    };
    MetaplecticElement::new(g, beta)
}

/// Case-I witness: bottom row (±q, ∓p), top row completed with the smallest
/// |b| solution of the determinant equation.
fn case_i_witness(p: u64, q: u64) -> Result<MetaplecticElement> {
    let pbar = mod_inverse(p as i64, q)? as i64;
    let (p, q) = (p as i64, q as i64);
    if p.rem_euclid(4) == 3 {
        // c = q, d = -p; a p ≡ -1 mod q
        let a0 = (-pbar).rem_euclid(q);
        let (a, b) = [a0 - q, a0, a0 + q]
            .into_iter()
            .map(|a| (a, (-(a * p) - 1) / q))
            .filter(|&(a, b)| a * (-p) - b * q == 1)
            .min_by_key(|&(_, b)| (b.abs(), b))
            .expect("solvable since gcd(p, q) = 1");
        theta_group_element(a, b, q, -p)
    } else {
        // p ≡ 1 mod 4: c = -q, d = p; a p ≡ 1 mod q
        let a0 = pbar.rem_euclid(q);
        let (a, b) = [a0 - q, a0, a0 + q]
            .into_iter()
            .map(|a| (a, (1 - a * p) / q))
            .filter(|&(a, b)| a * p + b * q == 1)
            .min_by_key(|&(_, b)| (b.abs(), b))
            .expect("solvable since gcd(p, q) = 1");
        theta_group_element(a, b, -q, p)
    }
}

/// Case-II witness for odd q: bottom row (±4p', ±q) with p' ≡ -(4p)^{-1}.
fn case_ii_witness(p_prime: i64, q: u64) -> Result<MetaplecticElement> {
    let q = q as i64;
    if p_prime == 0 {
        // only q = 1 reaches this; the witness degenerates to the identity
        return theta_group_element(1, 0, 0, 1);
    }
    if q.rem_euclid(4) == 1 {
        // c = 4p', d = q; a q - 4 p' b = 1
        let c = 4 * p_prime;
        let a0 = mod_inverse(q, c as u64)? as i64;
        let (a, b) = [a0 - c, a0, a0 + c]
            .into_iter()
            .map(|a| (a, (a * q - 1) / c))
            .filter(|&(a, b)| a * q - b * c == 1)
            .min_by_key(|&(_, b)| (b.abs(), b))
            .expect("solvable since gcd(4p', q) = 1");
        theta_group_element(a, b, c, q)
    } else {
        // q ≡ 3 mod 4: c = -4p', d = -q; -a q + 4 p' b = 1
        let c = -4 * p_prime;
        let m = (4 * p_prime) as u64;
        let a0 = (-(mod_inverse(q, m)? as i64)).rem_euclid(m as i64);
        let (a, b) = [a0 - m as i64, a0, a0 + m as i64]
            .into_iter()
            .map(|a| (a, (1 + a * q) / (4 * p_prime)))
            .filter(|&(a, b)| a * (-q) - b * c == 1)
            .min_by_key(|&(_, b)| (b.abs(), b))
            .expect("solvable since gcd(4p', q) = 1");
        theta_group_element(a, b, c, -q)
    }
}

/// Lift the rational point (p/q + iy, 0) to cusp coordinates, returning the
/// target point, the class angle phi_{p,q}, the explicit witness element and
/// the congruence case.
pub fn lift_rational(p: i64, q: u64, y: f64) -> Result<RationalLift> {
    if gcd(p, q as i64) != 1 {
        return Err(Error::NotCoprime { p, q });
    }
    if !(y > 0.0) {
        return Err(Error::NotInUpperHalfPlane { y });
    }
    let p_red = p.rem_euclid(q as i64) as u64;
    match q % 4 {
        0 => {
            let pbar = mod_inverse(p_red as i64, q)?;
            let x_t = (q - pbar) % q;
            let y_t = 1.0 / (q as f64 * q as f64 * y);
            let s = epsilon(p_red as i64)? * jacobi_symbol(q as i64, p_red as i64)?;
            let phi_pq = class_angle(s);
            let witness = case_i_witness(p_red, q)?;
            Ok(RationalLift {
                case: LiftCase::I,
                target: MetaplecticPoint::new(
                    HalfPlanePoint::new(x_t as f64 / q as f64, y_t)?,
                    phi_pq,
                ),
                phi_pq,
                witness,
                p: p_red,
                q,
                y,
            })
        }
        2 => {
            // reduce to the odd modulus q/2 via p0 = (2p - q)/4
            let q0 = q / 2;
            let two_p = 2 * p_red as i64;
            if (two_p - q as i64).rem_euclid(4) != 0 {
                return Err(Error::InvalidConfig(format!(
                    "case III requires 4 | (2p - q); p = {p_red}, q = {q}"
                )));
            }
            let p0 = (two_p - q as i64) / 4;
            let p0_red = p0.rem_euclid(q0 as i64) as u64;
            let inv = mod_inverse(4 * p0_red as i64, q0)? as i64;
            let p_prime = (-inv).rem_euclid(q0 as i64);
            let y_t = 1.0 / (4.0 * (q0 as f64).powi(2) * y); // = 1/(q^2 y)
            let s = epsilon(q0 as i64)?.conj() * jacobi_symbol(2 * p_red as i64, q0 as i64)?;
            debug_assert_eq!(
                s,
                epsilon(q0 as i64)?.conj() * jacobi_symbol(p0, q0 as i64)?,
                "(p0/q0) = (2p/q0)"
            );
            let phi_pq = class_angle(s);
            let witness = case_ii_witness(p_prime, q0)?;
            Ok(RationalLift {
                case: LiftCase::III,
                target: MetaplecticPoint::new(
                    HalfPlanePoint::new(p_prime as f64 / q0 as f64, y_t)?,
                    phi_pq,
                ),
                phi_pq,
                witness,
                p: p_red,
                q,
                y,
            })
        }
        _ => {
            let inv = mod_inverse(4 * p_red as i64, q)? as i64;
            let p_prime = (-inv).rem_euclid(q as i64);
            let y_t = 1.0 / (4.0 * (q as f64).powi(2) * y);
            let s = epsilon(q as i64)?.conj() * jacobi_symbol(p_red as i64, q as i64)?;
            let phi_pq = class_angle(s);
            let witness = case_ii_witness(p_prime, q)?;
            Ok(RationalLift {
                case: LiftCase::II,
                target: MetaplecticPoint::new(
                    HalfPlanePoint::new(p_prime as f64 / q as f64, y_t)?,
                    phi_pq,
                ),
                phi_pq,
                witness,
                p: p_red,
                q,
                y,
            })
        }
    }
}

impl RationalLift {
    /// Verify the construction by composing the witness with the case's
    /// fixed elements and comparing against the horocycle point.
    ///
    /// Case I checks   W (p/q + iy, 0)          = (target, phi_pq) mod n(Z), 4 pi;
    /// case II checks  W g0 (target)            = (p/q + iy, 0)    mod n(Z), 4 pi;
    /// case III checks n(1/2) W g0 (target)     = (p/q + iy, 0)    mod n(Z), 4 pi
    /// (the trailing half translation of the lemma lands on the left once
    /// the lift is unwound from the odd modulus q/2).
    pub fn verify(&self) -> Result<LiftCheck> {
        let start = MetaplecticPoint::new(
            HalfPlanePoint::new(self.p as f64 / self.q as f64, self.y)?,
            0.0,
        );
        let (got, expect) = match self.case {
            LiftCase::I => (self.witness.apply(&start), self.target),
            LiftCase::II => {
                let composite = self.witness.multiply(&gamma0_tilde());
                (composite.apply(&self.target), start)
            }
            LiftCase::III => {
                let composite = n_minus(0.5)
                    .multiply(&self.witness)
                    .multiply(&gamma0_tilde());
                (composite.apply(&self.target), start)
            }
        };
        let dx = got.z.x - expect.z.x;
        let x_err = (dx - dx.round()).abs();
        let y_err = (got.z.y - expect.z.y).abs() / expect.z.y.max(1.0);
        let dphi = got.phi - expect.phi;
        let wraps = 2.0 * TAU;
        let phi_err = (dphi - wraps * (dphi / wraps).round()).abs();
        Ok(LiftCheck {
            z_error: x_err.max(y_err),
            phi_error: phi_err,
        })
    }
}

/// The class angle phi_{p,q} mod 4 pi together with the matching Gauss-sum
/// sign: eps_p^{-1} (q/p) for q ≡ 0 mod 4, (p/q) for odd q, and
/// (2p / (q/2)) for q ≡ 2 mod 4.
pub fn sign_class(p: i64, q: u64) -> Result<(f64, SignFactor)> {
    if gcd(p, q as i64) != 1 {
        return Err(Error::NotCoprime { p, q });
    }
    let p_red = p.rem_euclid(q as i64);
    match q % 4 {
        0 => {
            let symbol = jacobi_symbol(q as i64, p_red)?;
            let phi = class_angle(epsilon(p_red)? * symbol);
            Ok((phi, epsilon(p_red)?.conj() * symbol))
        }
        2 => {
            let q0 = (q / 2) as i64;
            let symbol = jacobi_symbol(2 * p_red, q0)?;
            let phi = class_angle(epsilon(q0)?.conj() * symbol);
            Ok((phi, symbol))
        }
        _ => {
            let symbol = jacobi_symbol(p_red, q as i64)?;
            let phi = class_angle(epsilon(q as i64)?.conj() * symbol);
            Ok((phi, symbol))
        }
    }
}

/// Reduce z to the standard fundamental domain |Re| <= 1/2, |z| >= 1 of the
/// modular group; returns the reduced point and the integer word with
/// word . z = z*.
pub fn reduce_to_fundamental_domain(
    z: &HalfPlanePoint,
) -> Result<(HalfPlanePoint, RealMatrix2)> {
    let (mut x, mut y) = (z.x, z.y);
    let (mut wa, mut wb, mut wc, mut wd) = (1i64, 0i64, 0i64, 1i64);
    for _ in 0..100_000 {
        let n = x.round();
        if n != 0.0 {
            x -= n;
            let ni = n as i64;
            // T^{-n} on the left
            wa -= ni * wc;
            wb -= ni * wd;
        }
        let norm = x * x + y * y;
        if norm < 1.0 - 1e-15 {
            // S: z -> -1/z
            x = -x / norm;
            y /= norm;
            let (na, nb) = (-wc, -wd);
            let (nc, nd) = (wa, wb);
            (wa, wb, wc, wd) = (na, nb, nc, nd);
        } else {
            let word = RealMatrix2::from_integers(wa, wb, wc, wd);
            return Ok((HalfPlanePoint::new(x, y)?, word));
        }
    }
    Err(Error::ReductionDiverged)
}
