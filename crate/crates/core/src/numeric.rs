//! Numeric primitives shared by the simulation kernels: a branch-free
//! logarithm that auto-vectorizes inside the DP sweeps, the scale-constant
//! table for the KPZ rescalings, and the floating-point slack used by the
//! "exact" pathwise checks.

/// Scale constants used by the rescaled processes. Centralized so the
/// normalizations cannot drift apart between modules.
pub mod consts {
    /// 2^{3/2}, the normalizer of the increment process denominator.
    pub const POW2_3_2: f64 = 2.828_427_124_746_190_3;
    /// 2^{4/3}, the normalizer of the height process denominator.
    pub const POW2_4_3: f64 = 2.519_842_099_789_746_3;
    /// 2^{2/3}, the spatial dilation relating height and increment grids.
    pub const POW2_2_3: f64 = 1.587_401_051_968_199_5;
    /// 2^{1/6}, the amplitude relating height and increment processes.
    pub const POW2_1_6: f64 = 1.122_462_048_309_373;

    /// n^{1/3} via `cbrt`, exact at perfect cubes (e.g. n = 1000 -> 10.0).
    #[inline]
    pub fn cbrt_n(n: u64) -> f64 {
        (n as f64).cbrt()
    }

    /// n^{2/3} as the square of `cbrt`, exact at perfect cubes.
    #[inline]
    pub fn n_2_3(n: u64) -> f64 {
        let c = cbrt_n(n);
        c * c
    }
}

/// Floating-point slack for pathwise identities evaluated on DP outputs.
///
/// A passage time to anti-diagonal `m` accumulates ~2m additions of
/// magnitude up to `magnitude`, so the worst-case rounding of any linear
/// combination of a few such values is bounded by a small multiple of
/// `2m * eps * magnitude`. The lemma and sandwich checks treat violations
/// below this slack as exact equalities.
#[inline]
pub fn dp_roundoff(m: u64, magnitude: f64) -> f64 {
    let bound = 16.0 * (2 * m) as f64 * f64::EPSILON * magnitude.abs().max(1.0);
    bound.max(1e-12)
}

/// Absolute tolerance for DP-vs-oracle equivalence on desk-scale boxes.
pub const ORACLE_ABS_TOL: f64 = 1e-9;

const SQRT_2: f64 = std::f64::consts::SQRT_2;
const LN_2: f64 = std::f64::consts::LN_2;

/// Natural logarithm, branch-free and inlineable so LLVM vectorizes the
/// weight-generation loops; every call site computes bit-identical values
/// (plain IEEE mul/div/fma, no libm). Accurate to a few ulp for normal
/// positive inputs (callers clamp away zeros and subnormals).
///
/// Decomposes `u = m * 2^e` with `m` in `[sqrt(1/2), sqrt(2))` and evaluates
/// `ln m = 2 atanh(s)` for `s = (m-1)/(m+1)`, `|s| <= sqrt(2)-1`. The atanh
/// series through `s^13` is Estrin-scheduled to keep the dependency chain
/// short.
#[inline(always)]
pub fn fast_ln(u: f64) -> f64 {
    let bits = u.to_bits();
    let e_raw = ((bits >> 52) & 0x7ff) as i64 - 1023;
    let m_raw = f64::from_bits((bits & 0x000f_ffff_ffff_ffff) | 0x3ff0_0000_0000_0000);
    let shift = m_raw > SQRT_2;
    let m = if shift { 0.5 * m_raw } else { m_raw };
    let e = (e_raw + shift as i64) as f64;

    let s = (m - 1.0) / (m + 1.0);
    let w = s * s;
    let w2 = w * w;
    let w4 = w2 * w2;
    let q01 = w.mul_add(1.0 / 3.0, 1.0);
    let q23 = w.mul_add(1.0 / 7.0, 1.0 / 5.0);
    let q45 = w.mul_add(1.0 / 11.0, 1.0 / 9.0);
    let q456 = w2.mul_add(1.0 / 13.0, q45);
    let p = w4.mul_add(q456, w2.mul_add(q23, q01));
    (2.0 * s).mul_add(p, e * LN_2)
}

/// `-ln(u)` through [`fast_ln`]; the inverse-CDF map from uniform to Exp(1).
#[inline(always)]
pub fn neg_ln(u: f64) -> f64 {
    -fast_ln(u)
}

/// Wilson score interval for a binomial proportion at ~95% coverage.
pub fn wilson_interval(successes: u64, trials: u64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let z = 1.959_963_984_540_054_f64;
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = p + z2 / (2.0 * n);
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    // Widen to the point estimate: rounding must not push p outside.
    (
        ((centre - half) / denom).max(0.0).min(p),
        ((centre + half) / denom).min(1.0).max(p),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fast_ln_matches_std_ln() {
        // Log-uniform sweep across the full Exp(1) relevant range.
        let mut worst = 0.0_f64;
        let mut u = 1e-300_f64;
        while u < 1.0 {
            for k in 1..100 {
                let x = u * (1.0 + k as f64 / 100.0);
                if x >= 1.0 {
                    break;
                }
                let rel = (fast_ln(x) - x.ln()).abs() / x.ln().abs().max(1e-300);
                worst = worst.max(rel);
            }
            u *= 10.0;
        }
        assert!(worst < 1e-9, "worst relative error {worst}");
    }

    #[test]
    fn fast_ln_near_one() {
        for k in 1..1000 {
            let x = 1.0 - k as f64 * 1e-6;
            let rel = (fast_ln(x) - x.ln()).abs() / x.ln().abs();
            assert!(rel < 1e-9, "x={x} rel={rel}");
        }
    }

    #[test]
    fn cbrt_exact_at_cubes() {
        assert_eq!(consts::cbrt_n(1000), 10.0);
        assert_eq!(consts::n_2_3(1000), 100.0);
        assert_eq!(consts::cbrt_n(8), 2.0);
    }

    #[test]
    fn wilson_contains_point_estimate() {
        for (s, n) in [(0u64, 50u64), (50, 50), (7, 50), (499, 1000)] {
            let (lo, hi) = wilson_interval(s, n);
            let p = s as f64 / n as f64;
            assert!(lo <= p && p <= hi);
        }
    }
}
