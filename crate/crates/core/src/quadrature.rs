//! Adaptive Gauss-Kronrod (10/21) quadrature for complex-valued integrands.

use num_complex::Complex64;

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

const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

/// Outcome of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: Complex64,
    /// Sum of the per-panel `|K21 − G10|` estimates.
    pub error: f64,
    /// False when some panel hit the depth limit above its tolerance share.
    pub converged: bool,
}

impl QuadResult {
    pub const ZERO: QuadResult = QuadResult {
        value: Complex64::new(0.0, 0.0),
        error: 0.0,
        converged: true,
    };

    pub fn combine(self, other: QuadResult) -> QuadResult {
        QuadResult {
            value: self.value + other.value,
            error: self.error + other.error,
            converged: self.converged && other.converged,
        }
    }
}

/// One 21-point Kronrod panel on `[a, b]`; returns the Kronrod value and `|K − G|`.
pub fn gk21<F>(f: &F, a: f64, b: f64) -> (Complex64, f64)
where
    F: Fn(f64) -> Complex64,
{
    let centre = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(centre);
    let mut kron = fc * WGK[10];
    let mut gauss = Complex64::new(0.0, 0.0);
    for j in 0..10 {
        let dx = half * XGK[j];
        let pair = f(centre - dx) + f(centre + dx);
        kron += pair * WGK[j];
        // Gauss nodes sit at the odd Kronrod abscissae.
        if j % 2 == 1 {
            gauss += pair * WG[j / 2];
        }
    }
    let kron = kron * half;
    let gauss = gauss * half;
    (kron, (kron - gauss).norm())
}

/// Adaptive bisection on `[a, b]` until each panel's error estimate is below
/// its length-proportional share of `abs_tol`, or `max_depth` bisections.
pub fn integrate<F>(f: &F, a: f64, b: f64, abs_tol: f64, max_depth: u32) -> QuadResult
where
    F: Fn(f64) -> Complex64,
{
    if a == b {
        return QuadResult::ZERO;
    }
    let total_len = (b - a).abs();
    let mut out = QuadResult::ZERO;
    let mut stack = vec![(a, b, 0_u32)];
    while let Some((lo, hi, depth)) = stack.pop() {
        let (value, error) = gk21(f, lo, hi);
        let share = abs_tol * (hi - lo).abs() / total_len;
        if error <= share || depth >= max_depth {
            out = out.combine(QuadResult {
                value,
                error,
                converged: error <= share,
            });
        } else {
            let mid = 0.5 * (lo + hi);
            stack.push((mid, hi, depth + 1));
            stack.push((lo, mid, depth + 1));
        }
    }
    out
}

/// Integrates over consecutive panels `[p_k, p_{k+1}]`, giving each panel the
/// tolerance share proportional to its length.
pub fn integrate_panels<F>(f: &F, breaks: &[f64], abs_tol: f64, max_depth: u32) -> QuadResult
where
    F: Fn(f64) -> Complex64,
{
    if breaks.len() < 2 {
        return QuadResult::ZERO;
    }
    let total = (breaks[breaks.len() - 1] - breaks[0]).abs();
    if total == 0.0 {
        return QuadResult::ZERO;
    }
    breaks
        .windows(2)
        .map(|w| integrate(f, w[0], w[1], abs_tol * (w[1] - w[0]).abs() / total, max_depth))
        .fold(QuadResult::ZERO, QuadResult::combine)
}
