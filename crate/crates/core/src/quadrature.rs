//! Adaptive Gauss-Kronrod quadrature.
//!
//! A 21-point Kronrod extension of the 10-point Gauss rule is applied on
//! each panel; the panel with the largest error estimate is bisected until
//! the summed estimate meets the tolerance. Panel selection and summation
//! follow a fixed order, so a given integrand and tolerance always produce
//! the same subdivision and the same bits.

#![allow(clippy::excessive_precision)]

use crate::error::{CavityError, Result};

const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_208_067_476_833,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

// Gauss weights for the nodes XGK[1], XGK[3], ..., XGK[9].
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// Tolerances and limits for [`integrate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Maximum number of bisections before giving up.
    pub max_subdivisions: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 0.0,
            max_subdivisions: 2000,
        }
    }
}

/// Value and error estimate of a converged integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub abs_error: f64,
    pub evaluations: usize,
    pub subdivisions: usize,
}

impl QuadResult {
    pub fn rel_error(&self) -> f64 {
        if self.value == 0.0 {
            if self.abs_error == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            self.abs_error / self.value.abs()
        }
    }
}

/// One application of the 21-point Kronrod rule on `[a, b]`.
pub fn gauss_kronrod_21<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);

    let f_center = f(center);
    let mut res_kronrod = f_center * WGK[10];
    let mut res_gauss = 0.0;
    let mut res_abs = res_kronrod.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];

    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        res_kronrod += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_gauss += WG[j / 2] * (f1 + f2);
        }
    }

    let mean = 0.5 * res_kronrod;
    let mut res_asc = WGK[10] * (f_center - mean).abs();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }

    let value = res_kronrod * half;
    let res_abs = res_abs * half.abs();
    let res_asc = res_asc * half.abs();
    let mut err = ((res_kronrod - res_gauss) * half).abs();

    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    (value, err)
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
}

/// Integrates `f` over `[a, b]`, with optional interior breakpoints that seed
/// the initial panels.
pub fn integrate<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    breakpoints: &[f64],
    opts: &QuadOptions,
) -> Result<QuadResult> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(CavityError::Domain(format!(
            "integration bounds must be finite, got [{a}, {b}]"
        )));
    }
    if a == b {
        return Ok(QuadResult {
            value: 0.0,
            abs_error: 0.0,
            evaluations: 0,
            subdivisions: 0,
        });
    }

    let (lo, hi) = (a.min(b), a.max(b));
    let mut edges = Vec::with_capacity(breakpoints.len() + 2);
    edges.push(a);
    edges.extend(breakpoints.iter().copied().filter(|&x| x > lo && x < hi));
    edges.push(b);

    let mut panels: Vec<Panel> = Vec::with_capacity(64);
    let mut evaluations = 0;
    for w in edges.windows(2) {
        let (value, err) = gauss_kronrod_21(&mut f, w[0], w[1]);
        evaluations += 21;
        panels.push(Panel {
            a: w[0],
            b: w[1],
            value,
            err,
        });
    }

    let mut subdivisions = 0;
    loop {
        let (total, total_err) = totals(&panels);
        let target = opts.abs_tol.max(opts.rel_tol * total.abs());
        if total_err <= target {
            return Ok(QuadResult {
                value: total,
                abs_error: total_err,
                evaluations,
                subdivisions,
            });
        }
        if subdivisions >= opts.max_subdivisions {
            return Err(CavityError::Convergence {
                what: format!("adaptive quadrature on [{a:e}, {b:e}]"),
                partial: total,
                rel_error: if total == 0.0 {
                    f64::INFINITY
                } else {
                    total_err / total.abs()
                },
            });
        }

        // First panel with the largest error; ties resolve to the lowest index.
        let (worst_idx, worst) =
            panels
                .iter()
                .copied()
                .enumerate()
                .fold((0, panels[0]), |best, (i, p)| {
                    if p.err > best.1.err {
                        (i, p)
                    } else {
                        best
                    }
                });
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a.min(worst.b) || mid >= worst.a.max(worst.b) || worst.err == 0.0 {
            // Remaining error sits in panels at machine resolution.
            return Ok(QuadResult {
                value: total,
                abs_error: total_err,
                evaluations,
                subdivisions,
            });
        }
        let (v1, e1) = gauss_kronrod_21(&mut f, worst.a, mid);
        let (v2, e2) = gauss_kronrod_21(&mut f, mid, worst.b);
        evaluations += 42;
        subdivisions += 1;
        panels[worst_idx] = Panel {
            a: worst.a,
            b: mid,
            value: v1,
            err: e1,
        };
        panels.push(Panel {
            a: mid,
            b: worst.b,
            value: v2,
            err: e2,
        });
    }
}

fn totals(panels: &[Panel]) -> (f64, f64) {
    panels
        .iter()
        .fold((0.0, 0.0), |(v, e), p| (v + p.value, e + p.err))
}

/// Integrates `f` over `[lower, ∞)` through the map `x = lower + scale·t/(1−t)`.
///
/// `scale` should be the characteristic width of the integrand; `t` breakpoints
/// may be supplied in the mapped variable.
pub fn integrate_semi_infinite<F: FnMut(f64) -> f64>(
    mut f: F,
    lower: f64,
    scale: f64,
    opts: &QuadOptions,
) -> Result<QuadResult> {
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(CavityError::Domain(format!(
            "semi-infinite map scale must be positive, got {scale}"
        )));
    }
    let mapped = |t: f64| {
        let one_minus = 1.0 - t;
        if one_minus <= 0.0 {
            return 0.0;
        }
        let x = lower + scale * t / one_minus;
        let v = f(x);
        if v == 0.0 {
            0.0
        } else {
            v * scale / (one_minus * one_minus)
        }
    };
    integrate(mapped, 0.0, 1.0, &[], opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn polynomial_is_exact() {
        let r = integrate(
            |x| x.powi(5) - 2.0 * x,
            0.0,
            2.0,
            &[],
            &QuadOptions::default(),
        )
        .unwrap();
        assert!((r.value - (64.0 / 6.0 - 4.0)).abs() < 1e-13);
        assert_eq!(r.subdivisions, 0);
    }

    #[test]
    fn endpoint_log_singularity() {
        // ∫₀¹ ln x dx = −1
        let r = integrate(|x| x.ln(), 0.0, 1.0, &[], &QuadOptions::default()).unwrap();
        assert!((r.value + 1.0).abs() < 1e-10, "{}", r.value);
    }

    #[test]
    fn semi_infinite_gaussian() {
        let r =
            integrate_semi_infinite(|x| (-x * x).exp(), 0.0, 1.0, &QuadOptions::default()).unwrap();
        assert!((r.value - PI.sqrt() / 2.0).abs() < 1e-12);
    }

    #[test]
    fn non_convergence_reports_partial_value() {
        let opts = QuadOptions {
            rel_tol: 1e-14,
            abs_tol: 0.0,
            max_subdivisions: 3,
        };
        let err = integrate(|x| (1.0 / x).sin(), 1e-6, 1.0, &[], &opts).unwrap_err();
        match err {
            CavityError::Convergence { partial, .. } => assert!(partial.is_finite()),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn deterministic_bits() {
        let opts = QuadOptions::default();
        let f = |x: f64| (x * 7.0).sin().abs() * (-x).exp();
        let a = integrate(f, 0.0, 10.0, &[1.0, 3.0], &opts).unwrap();
        let b = integrate(f, 0.0, 10.0, &[1.0, 3.0], &opts).unwrap();
        assert_eq!(a.value.to_bits(), b.value.to_bits());
    }
}
