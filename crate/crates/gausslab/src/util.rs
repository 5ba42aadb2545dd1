//! Small numeric utilities shared by the sum kernels and experiment drivers.

use crate::Complex;

/// Compensated (Neumaier) accumulator for complex sums.
///
/// Summation order stays ascending everywhere in this crate, so results are
/// reproducible across runs and thread counts.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    re: f64,
    re_c: f64,
    im: f64,
    im_c: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, z: Complex) {
        self.re_c += neumaier_step(&mut self.re, z.re);
        self.im_c += neumaier_step(&mut self.im, z.im);
    }

    #[inline]
    pub fn value(&self) -> Complex {
        Complex::new(self.re + self.re_c, self.im + self.im_c)
    }
}

#[inline]
fn neumaier_step(sum: &mut f64, x: f64) -> f64 {
    let t = *sum + x;
    let c = if sum.abs() >= x.abs() {
        (*sum - t) + x
    } else {
        (x - t) + *sum
    };
    *sum = t;
    c
}

/// Compensated accumulator for real sums.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedReal {
    sum: f64,
    c: f64,
}

impl CompensatedReal {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        self.c += neumaier_step(&mut self.sum, x);
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.c
    }
}

/// Fractional part of `x * m` for integer `m`, accurate to a few ulps even
/// when the product is large.
///
/// The fma recovers the rounding error of the product exactly (the true
/// product is `p + e`), so no phase precision is lost to cancellation.
#[inline]
pub fn frac_mul(x: f64, m: i64) -> f64 {
    let mf = m as f64;
    let p = x * mf;
    let e = x.mul_add(mf, -p);
    p.fract() + e
}

/// e(t) = exp(2 pi i t) for t given in turns.
#[inline]
pub fn unit_phase(t: f64) -> Complex {
    let (s, c) = (std::f64::consts::TAU * t).sin_cos();
    Complex::new(c, s)
}

/// Counter-based 64-bit generator (splitmix64 output function).
///
/// Stateless: the n-th draw of a stream depends only on `(seed, n)`, which
/// keeps parallel sample generation deterministic and cheap to partition.
#[derive(Debug, Clone, Copy)]
pub struct CounterRng {
    seed: u64,
}

impl CounterRng {
    pub fn new(seed: u64) -> Self {
        Self { seed }
    }

    /// Derive an independent stream, e.g. one per sampled variable.
    pub fn stream(&self, tag: u64) -> Self {
        Self {
            seed: mix(self.seed ^ mix(tag)),
        }
    }

    #[inline]
    pub fn u64_at(&self, index: u64) -> u64 {
        mix(self
            .seed
            .wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15)))
    }

    /// Uniform draw in [0, 1).
    #[inline]
    pub fn f64_at(&self, index: u64) -> f64 {
        (self.u64_at(index) >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Fair sign draw in {-1.0, +1.0}.
    #[inline]
    pub fn sign_at(&self, index: u64) -> f64 {
        if self.u64_at(index) & 1 == 0 {
            1.0
        } else {
            -1.0
        }
    }
}

#[inline]
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensated_sum_recovers_cancellation() {
        let mut s = CompensatedReal::new();
        s.add(1e16);
        s.add(1.0);
        s.add(-1e16);
        assert_eq!(s.value(), 1.0);
    }

    #[test]
    fn frac_mul_matches_exact_rational() {
        // frac(x*m) for the rounded x = fl(3/7) stays within m * ulp(3/7) of
        // a multiple of 1/7: the only error left is the input rounding.
        let x = 3.0 / 7.0;
        for m in [7i64, 700, 70_000, 7_000_000] {
            let f = frac_mul(x, m).rem_euclid(1.0);
            let nearest = f.min(1.0 - f);
            assert!(nearest <= m as f64 * 6e-17, "m={m} frac={f}");
        }
        // Large m where the naive product loses bits.
        let x: f64 = 0.437_218_940_002_113_9;
        let m = 81_004_001i64;
        let exact = {
            // Reconstruct with integer arithmetic on the binary expansion.
            let bits = x.to_bits();
            let mantissa = (bits & ((1u64 << 52) - 1)) | (1u64 << 52);
            let exp = ((bits >> 52) & 0x7FF) as i64 - 1075;
            // value = mantissa * 2^exp; frac(value * m) via u128 arithmetic
            let prod = mantissa as u128 * m as u128;
            // multiply by 2^exp and take fractional part: exp < 0 here
            let shift = (-exp) as u32;
            let frac_bits = prod & ((1u128 << shift) - 1);
            frac_bits as f64 / (1u128 << shift) as f64
        };
        let got = frac_mul(x, m).rem_euclid(1.0);
        assert!((got - exact).abs() < 1e-12, "got {got} exact {exact}");
    }

    #[test]
    fn counter_rng_is_deterministic_and_uniformish() {
        let rng = CounterRng::new(42);
        assert_eq!(rng.u64_at(17), CounterRng::new(42).u64_at(17));
        let n = 20_000;
        let mean: f64 = (0..n).map(|i| rng.f64_at(i)).sum::<f64>() / n as f64;
        assert!((mean - 0.5).abs() < 0.01, "mean {mean}");
        let signs: f64 = (0..n).map(|i| rng.sign_at(i)).sum();
        assert!(signs.abs() < 4.0 * (n as f64).sqrt());
    }
}
