//! Invariant suites behind `gausslab verify` and the acceptance tests.
//!
//! Each suite sweeps a stated parameter range, records the worst deviation
//! it saw, and reports one pass/fail line per check.

use crate::exec::{map_slice, ExecPolicy};
use crate::expsums::{
    classical_gauss_sum_closed, classical_gauss_sum_direct_with, kloosterman_with,
    restricted_character_sum_with, salie_with, twisted_kloosterman_with, weil_bound, RootTable,
    UnitGroup,
};
use crate::metaplectic::{lift_rational, moebius, reduce_to_fundamental_domain, HalfPlanePoint};
use crate::numtheory::{coprime_residues, gcd, SignFactor, TorusSet};
use crate::theta::{automorphy_factor, hermite_function, theta_nu_auto};
use crate::util::CounterRng;
use crate::{Error, Result};

/// Outcome of one named check within a suite.
#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl CheckResult {
    fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }
}

/// The suites `verify` knows about.
pub const SUITES: [&str; 7] = [
    "gauss-closed-form",
    "weil-bounds",
    "hermite",
    "theta-transform",
    "lifts",
    "reduction",
    "all",
];

/// Run one suite by name ("all" runs everything).
pub fn run_suite(name: &str, exec: ExecPolicy) -> Result<Vec<CheckResult>> {
    match name {
        "gauss-closed-form" => Ok(gauss_closed_form(500, exec)),
        "weil-bounds" => Ok(weil_bounds(400, 20, exec)),
        "hermite" => Ok(hermite_orthonormality(10)),
        "theta-transform" => Ok(theta_transformation(50, 20)),
        "lifts" => Ok(lifts(200, &[1e-2, 1e-4], exec)),
        "reduction" => Ok(reduction(2000)),
        "all" => {
            let mut out = Vec::new();
            for suite in SUITES.iter().filter(|s| **s != "all") {
                out.extend(run_suite(suite, exec)?);
            }
            Ok(out)
        }
        other => Err(Error::InvalidConfig(format!(
            "unknown suite {other:?}; expected one of {SUITES:?}"
        ))),
    }
}

/// Closed form vs direct summation for every q <= max_q and every unit p,
/// absolute tolerance 1e-9 sqrt(q).
pub fn gauss_closed_form(max_q: u64, exec: ExecPolicy) -> Vec<CheckResult> {
    let qs: Vec<u64> = (1..=max_q).collect();
    let worst = map_slice(exec, &qs, |&q| {
        let table = RootTable::new(q);
        let mut worst = 0.0f64;
        for p in coprime_residues(q, &TorusSet::full()) {
            let direct = classical_gauss_sum_direct_with(&table, p as i64)
                .expect("coprime")
                .value;
            let closed = classical_gauss_sum_closed(p as i64, q).expect("coprime").value;
            let err = (direct - closed).norm() / (q as f64).sqrt();
            worst = worst.max(err);
        }
        worst
    })
    .into_iter()
    .fold(0.0f64, f64::max);
    vec![CheckResult::new(
        format!("gauss closed form, q <= {max_q}, all p"),
        worst < 1e-9,
        format!("worst |direct - closed| / sqrt(q) = {worst:.3e} (tolerance 1e-9)"),
    )]
}

/// Weil-type bounds for the complete and restricted sums over q <= max_q,
/// |m|, |n| <= range, with the parity conditions of each sum.
///
/// The sweep precomputes units, inverses, character values and sign classes
/// once per modulus and accumulates every sum in a single pass over the unit
/// group per (m, n); one (m, n) per modulus is cross-checked against the
/// plain kernel functions.
pub fn weil_bounds(max_q: u64, range: i64, exec: ExecPolicy) -> Vec<CheckResult> {
    let qs: Vec<u64> = (1..=max_q).collect();
    // per q: worst ratio for (kloosterman, twisted, salie, restricted4, restricted2)
    let ratios = map_slice(exec, &qs, |&q| {
        let table = RootTable::new(q);
        let units = UnitGroup::new(q);
        let qi = q as i64;
        let four_classes = q % 4 == 0;
        let two_classes = q % 2 == 1 && q >= 3;
        // per-unit data hoisted out of the (m, n) loop
        let per_unit: Vec<(u64, u64, crate::Complex, usize)> = units
            .iter()
            .map(|(p, pbar)| {
                let (chi, class) = if four_classes {
                    let s = crate::expsums::sign_character(p, q).expect("q ≡ 0 mod 4");
                    (s.as_complex(), s.power_of_i().expect("unit class") as usize)
                } else if two_classes {
                    let s = crate::expsums::sign_character(p, q).expect("odd q");
                    let class = usize::from(s == SignFactor::MinusOne);
                    (s.as_complex(), class)
                } else {
                    (crate::Complex::new(0.0, 0.0), 0)
                };
                (p, pbar, chi, class)
            })
            .collect();
        let mut worst = [0.0f64; 5];
        for m in -range..=range {
            for n in -range..=range {
                let bound = weil_bound(m, n, q);
                let mut k = crate::util::CompensatedSum::new();
                let mut tw = crate::util::CompensatedSum::new();
                let mut classes = [crate::util::CompensatedSum::new(); 4];
                for &(p, pbar, chi, class) in &per_unit {
                    let t = (m * (p as i64) + n * (pbar as i64)).rem_euclid(qi);
                    let root = table.root(t as u64);
                    k.add(root);
                    if four_classes || two_classes {
                        tw.add(chi * root);
                        classes[class].add(root);
                    }
                }
                worst[0] = worst[0].max(k.value().norm() / bound);
                if four_classes {
                    worst[1] = worst[1].max(tw.value().norm() / bound);
                    for acc in &classes {
                        worst[3] = worst[3].max(acc.value().norm() / (7.0 * bound));
                    }
                }
                if two_classes {
                    worst[2] = worst[2].max(tw.value().norm() / bound);
                    for acc in &classes[..2] {
                        worst[4] = worst[4].max(acc.value().norm() / (2.0 * bound));
                    }
                }
                if (m, n) == (1, 1) {
                    // cross-check the fast pass against the kernel functions
                    let kv = kloosterman_with(&table, &units, m, n).value;
                    assert!((kv - k.value()).norm() < 1e-9, "kloosterman sweep q={q}");
                    if four_classes {
                        let tv = twisted_kloosterman_with(&table, &units, m, n)
                            .expect("q ≡ 0 mod 4")
                            .value;
                        assert!((tv - tw.value()).norm() < 1e-9, "twisted sweep q={q}");
                        let rv = restricted_character_sum_with(
                            &table,
                            &units,
                            m,
                            n,
                            SignFactor::I,
                        )
                        .expect("valid class")
                        .value;
                        assert!((rv - classes[1].value()).norm() < 1e-9, "class sweep q={q}");
                    }
                    if two_classes {
                        let sv = salie_with(&table, &units, m, n).expect("odd q").value;
                        assert!((sv - tw.value()).norm() < 1e-9, "salie sweep q={q}");
                    }
                }
            }
        }
        worst
    });
    let mut worst = [0.0f64; 5];
    for r in ratios {
        for (w, v) in worst.iter_mut().zip(r) {
            *w = w.max(v);
        }
    }
    let tol = 1.0 + 1e-9;
    let names = [
        "kloosterman |K| <= gcd^{1/2} q^{1/2} tau(q)",
        "twisted kloosterman bound (q ≡ 0 mod 4)",
        "salie bound (odd q)",
        "restricted class sums <= 7x bound (q ≡ 0 mod 4)",
        "restricted class sums <= 2x bound (odd q)",
    ];
    names
        .iter()
        .zip(worst)
        .map(|(name, w)| {
            CheckResult::new(
                format!("{name}, q <= {max_q}, |m|,|n| <= {range}"),
                w < tol,
                format!("worst |sum| / bound = {w:.6}"),
            )
        })
        .collect()
}

/// Orthonormality of the Hermite functions to 1e-8 for nu, mu <= nu_max.
pub fn hermite_orthonormality(nu_max: u32) -> Vec<CheckResult> {
    // 16-point Gauss-Legendre panels over [-9, 9]; the integrand is a
    // polynomial times a Gaussian, far within panel accuracy.
    let mut worst = 0.0f64;
    for nu in 0..=nu_max {
        for mu in 0..=nu_max {
            let integral = crate::quadrature::integrate_panels(
                &|t| {
                    hermite_function(nu, t).expect("order in range")
                        * hermite_function(mu, t).expect("order in range")
                },
                -9.0,
                9.0,
                72,
                16,
            );
            let expect = if nu == mu { 1.0 } else { 0.0 };
            worst = worst.max((integral - expect).abs());
        }
    }
    vec![CheckResult::new(
        format!("hermite orthonormality, nu, mu <= {nu_max}"),
        worst < 1e-8,
        format!("worst |(h_nu, h_mu) - delta| = {worst:.3e} (tolerance 1e-8)"),
    )]
}

/// The weight-(2nu+1)/2 transformation law on random group elements with
/// c ≡ 0 mod 4: theta_nu(gz) = j_g(z)^{2nu+1} theta_nu(z), relative 1e-8.
pub fn theta_transformation(elements: usize, points: usize) -> Vec<CheckResult> {
    let rng = CounterRng::new(0x7e7a);
    let zs: Vec<HalfPlanePoint> = (0..points)
        .map(|i| {
            HalfPlanePoint::new(
                rng.f64_at(50_000 + i as u64) - 0.5,
                0.1 + 1.9 * rng.f64_at(60_000 + i as u64),
            )
            .expect("y > 0")
        })
        .collect();
    let mut worst = 0.0f64;
    let mut drawn = 0usize;
    let mut attempt = 0u64;
    while drawn < elements {
        let c = 4 * ((rng.u64_at(2 * attempt) % 21) as i64 - 10);
        let d = 2 * ((rng.u64_at(2 * attempt + 1) % 40) as i64 - 20) + 1;
        attempt += 1;
        if gcd(c, d) != 1 {
            continue;
        }
        let Some((a, b)) = complete_det_one(c, d) else {
            continue;
        };
        let g = crate::metaplectic::RealMatrix2::from_integers(a, b, c, d);
        drawn += 1;
        for z in zs.iter().take(4) {
            let gz = moebius(&g, z).expect("det 1");
            let j = automorphy_factor(&g, z).expect("Gamma_0(4)");
            for nu in 0..=6u32 {
                let lhs = theta_nu_auto(&gz, nu).expect("truncation ok");
                let rhs = j.powu(2 * nu + 1) * theta_nu_auto(z, nu).expect("truncation ok");
                let scale = lhs.norm().max(rhs.norm()).max(1e-6);
                worst = worst.max((lhs - rhs).norm() / scale);
            }
        }
    }
    vec![CheckResult::new(
        format!("theta transformation property, {elements} elements, nu <= 6"),
        worst < 1e-8,
        format!("worst relative deviation = {worst:.3e} (tolerance 1e-8)"),
    )]
}

fn complete_det_one(c: i64, d: i64) -> Option<(i64, i64)> {
    if c == 0 {
        return (d == 1 || d == -1).then_some((d.signum(), 0));
    }
    // a d - b c = 1 with a = d^{-1} mod c shifted near zero
    let a0 = crate::numtheory::mod_inverse(d, c.unsigned_abs()).ok()? as i64;
    for a in [a0 - c.abs(), a0, a0 + c.abs()] {
        let num = a * d - 1;
        if num % c == 0 {
            return Some((a, num / c));
        }
    }
    None
}

/// Witness verification of the explicit lifts for all q <= max_q, all unit
/// residues and the given heights: z error < 1e-10, phi an exact multiple
/// of 4 pi away from the class angle.
pub fn lifts(max_q: u64, heights: &[f64], exec: ExecPolicy) -> Vec<CheckResult> {
    let qs: Vec<u64> = (1..=max_q).collect();
    let worst = map_slice(exec, &qs, |&q| {
        let mut worst = (0.0f64, 0.0f64);
        for p in coprime_residues(q, &TorusSet::full()) {
            for &y in heights {
                let lift = lift_rational(p as i64, q, y).expect("coprime");
                let check = lift.verify().expect("verifiable");
                worst.0 = worst.0.max(check.z_error);
                worst.1 = worst.1.max(check.phi_error);
            }
        }
        worst
    })
    .into_iter()
    .fold((0.0f64, 0.0f64), |acc, w| (acc.0.max(w.0), acc.1.max(w.1)));
    vec![
        CheckResult::new(
            format!("lift witnesses reproduce the horocycle point, q <= {max_q}"),
            worst.0 < 1e-10,
            format!("worst z error = {:.3e} (tolerance 1e-10)", worst.0),
        ),
        CheckResult::new(
            format!("lift angles match the class formula mod 4 pi, q <= {max_q}"),
            worst.1 < 1e-10,
            format!("worst phi deviation = {:.3e} (tolerance 1e-10)", worst.1),
        ),
    ]
}

/// Fundamental-domain reduction on a random batch: both domain inequalities,
/// integer det-1 words, and word . z = z*.
pub fn reduction(count: usize) -> Vec<CheckResult> {
    let rng = CounterRng::new(0xF00D);
    let mut worst_ineq = 0.0f64;
    let mut worst_word = 0.0f64;
    let mut all_integer = true;
    for i in 0..count as u64 {
        let z = HalfPlanePoint::new(
            20.0 * rng.f64_at(2 * i) - 10.0,
            10f64.powf(-5.0 * rng.f64_at(2 * i + 1)),
        )
        .expect("y > 0");
        let (zr, word) = reduce_to_fundamental_domain(&z).expect("terminates");
        worst_ineq = worst_ineq
            .max(zr.x.abs() - 0.5)
            .max(1.0 - (zr.x * zr.x + zr.y * zr.y));
        match word.to_integers() {
            Some((a, b, c, d)) => all_integer &= a * d - b * c == 1,
            None => all_integer = false,
        }
        let moved = moebius(&word, &z).expect("det 1");
        worst_word = worst_word
            .max((moved.x - zr.x).abs())
            .max((moved.y - zr.y).abs() / zr.y);
    }
    vec![
        CheckResult::new(
            format!("reduced points satisfy both domain inequalities ({count} samples)"),
            worst_ineq < 1e-9,
            format!("worst inequality slack = {worst_ineq:.3e}"),
        ),
        CheckResult::new(
            "reduction words are integer, det 1, and map z to z*",
            all_integer && worst_word < 1e-8,
            format!("integer words: {all_integer}, worst |word.z - z*| = {worst_word:.3e}"),
        ),
    ]
}
