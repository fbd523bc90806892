use crate::scalar::Scalar;

/// Rates are clamped into `[PROBIT_CLAMP, 1 - PROBIT_CLAMP]` before the
/// transform so that 0 and 1 map to finite plot coordinates.
pub const PROBIT_CLAMP: f64 = 1e-6;

// Acklam's rational approximation; relative error below 1.2e-9.
const A: [f64; 6] = [
    -3.969_683_028_665_376e1,
    2.209_460_984_245_205e2,
    -2.759_285_104_469_687e2,
    1.383_577_518_672_69e2,
    -3.066_479_806_614_716e1,
    2.506_628_277_459_239,
];
const B: [f64; 5] = [
    -5.447_609_879_822_406e1,
    1.615_858_368_580_409e2,
    -1.556_989_798_598_866e2,
    6.680_131_188_771_972e1,
    -1.328_068_155_288_572e1,
];
const C: [f64; 6] = [
    -7.784_894_002_430_293e-3,
    -3.223_964_580_411_365e-1,
    -2.400_758_277_161_838,
    -2.549_732_539_343_734,
    4.374_664_141_464_968,
    2.938_163_982_698_783,
];
const D: [f64; 4] = [
    7.784_695_709_041_462e-3,
    3.224_671_290_700_398e-1,
    2.445_134_137_142_996,
    3.754_408_661_907_416,
];
const P_LOW: f64 = 0.02425;

fn horner(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().fold(0.0, |acc, &c| acc * x + c)
}

fn tail(p: f64) -> f64 {
    let q = (-2.0 * p.ln()).sqrt();
    horner(&C, q) / (horner(&D, q) * q + 1.0)
}

fn probit_f64(p: f64) -> f64 {
    if p.is_nan() {
        return p;
    }
    let p = p.clamp(PROBIT_CLAMP, 1.0 - PROBIT_CLAMP);
    if p < P_LOW {
        tail(p)
    } else if p > 1.0 - P_LOW {
        -tail(1.0 - p)
    } else {
        let q = p - 0.5;
        let r = q * q;
        horner(&A, r) * q / (horner(&B, r) * r + 1.0)
    }
}

/// Inverse of the standard normal CDF, after clamping `p` into
/// `[PROBIT_CLAMP, 1 - PROBIT_CLAMP]`. NaN in, NaN out.
///
/// Evaluated in `f64` whatever the scalar type; the rational approximation
/// loses too much to cancellation in single precision.
pub fn probit<T: Scalar>(p: T) -> T {
    T::lit(probit_f64(p.to_f64_lossy()))
}
