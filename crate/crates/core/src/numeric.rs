//! Small numerical kernels: bracketed root finding, golden-section search,
//! adaptive Gauss-Kronrod quadrature and a few helpers.

use crate::error::{Error, Result};

/// `sin(x)/x` with the removable singularity filled in.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// Bracketed root of `f` on `[lo, hi]`: false-position (secant) steps,
/// falling back to bisection whenever a step fails to halve the bracket.
///
/// Stops when the bracket is narrower than `xtol` or `|f| <= ftol`.
/// Returns `Ok(None)` when `f` has the same sign at both ends.
pub fn bracketed_root<F>(mut f: F, lo: f64, hi: f64, xtol: f64, ftol: f64) -> Result<Option<f64>>
where
    F: FnMut(f64) -> Result<f64>,
{
    let (mut a, mut b) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let mut fa = f(a)?;
    let mut fb = f(b)?;
    if fa == 0.0 {
        return Ok(Some(a));
    }
    if fb == 0.0 {
        return Ok(Some(b));
    }
    if fa.signum() == fb.signum() {
        return Ok(None);
    }
    for _ in 0..200 {
        if b - a <= xtol {
            break;
        }
        let width = b - a;
        let secant = b - fb * (b - a) / (fb - fa);
        let x = if secant > a && secant < b {
            secant
        } else {
            0.5 * (a + b)
        };
        let fx = f(x)?;
        if fx.abs() <= ftol {
            return Ok(Some(x));
        }
        if fx.signum() == fa.signum() {
            a = x;
            fa = fx;
        } else {
            b = x;
            fb = fx;
        }
        // secant step stalled on one end: bisect once to guarantee halving
        if b - a > 0.5 * width {
            let m = 0.5 * (a + b);
            let fm = f(m)?;
            if fm.abs() <= ftol {
                return Ok(Some(m));
            }
            if fm.signum() == fa.signum() {
                a = m;
                fa = fm;
            } else {
                b = m;
                fb = fm;
            }
        }
    }
    // return the end with the smaller residual, or the midpoint when equal
    Ok(Some(if fa.abs() < fb.abs() {
        a
    } else if fb.abs() < fa.abs() {
        b
    } else {
        0.5 * (a + b)
    }))
}

/// Golden-section minimisation on `[lo, hi]`. Returns `(x_min, f_min)`.
///
/// Fails with `NoInteriorMinimum` when the minimum sits on the bracket edge.
pub fn golden_section_min<F>(mut f: F, lo: f64, hi: f64, xtol: f64) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo.min(hi), lo.max(hi));
    let fa0 = f(a)?;
    let fb0 = f(b)?;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    while (b - a) > xtol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d)?;
        }
    }
    let (x, fx) = if fc < fd { (c, fc) } else { (d, fd) };
    let edge = 2.0 * xtol;
    if x - lo.min(hi) <= edge || lo.max(hi) - x <= edge || fx >= fa0 || fx >= fb0 {
        return Err(Error::NoInteriorMinimum {
            lo: lo.min(hi),
            hi: lo.max(hi),
        });
    }
    Ok((x, fx))
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        kronrod += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    (kronrod * h, ((kronrod - gauss) * h).abs())
}

/// Adaptive 15-point Gauss-Kronrod quadrature of `f` over `[a, b]`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> f64 {
    fn recurse<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        b: f64,
        whole: (f64, f64),
        abs_tol: f64,
        rel_tol: f64,
        depth: u32,
    ) -> f64 {
        let (val, err) = whole;
        if err <= abs_tol.max(rel_tol * val.abs()) || depth == 0 {
            return val;
        }
        let m = 0.5 * (a + b);
        let left = gk15(f, a, m);
        let right = gk15(f, m, b);
        recurse(f, a, m, left, 0.5 * abs_tol, rel_tol, depth - 1)
            + recurse(f, m, b, right, 0.5 * abs_tol, rel_tol, depth - 1)
    }
    let whole = gk15(&f, a, b);
    recurse(&f, a, b, whole, abs_tol, rel_tol, 40)
}

/// Least-squares line through `(x, y)`: returns `(slope, intercept, r_squared)`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let syy: f64 = y.iter().map(|b| (b - my) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    (slope, intercept, r2)
}

/// Fixed 9-significant-digit scientific notation used for every CSV number.
pub fn fmt_sci(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        format!("{x:.8e}")
    }
}
