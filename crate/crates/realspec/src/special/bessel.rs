//! Modified Bessel functions of the second kind: K0, K1, integer and
//! half-integer orders, plus I0 for series cross-checks.
//!
//! Small arguments use the ascending series; x >= 2 uses Chebyshev fits of
//! sqrt(x) e^x K_n(x) in 1/x, accurate to full double precision.

use crate::error::Error;
use crate::Result;

const EULER_GAMMA: f64 = 0.5772156649015328606;

// Chebyshev tables for g(s) = sqrt(x) e^x K_n(x), s = 1/x.
// MID: s in [1/8, 1/2] (x in [2, 8]); FAR: s in [0, 1/8] (x >= 8).
const K0E_MID: [f64; 27] = [
    2.423560520966720586,
    -0.02235652605699819052,
    0.0007734181154693858235,
    -0.00004281006688886099464,
    3.081700173862974744e-6,
    -2.639367222009664974e-7,
    2.563713036403469206e-8,
    -2.742705549900201264e-9,
    3.169429658097499592e-10,
    -3.902353286962184142e-11,
    5.068040698188575402e-12,
    -6.889574741007870680e-13,
    9.744978497825917691e-14,
    -1.427332841884548505e-14,
    2.156412571021463039e-15,
    -3.349654255149562760e-16,
    5.335260216952911100e-17,
    -8.693669980890725289e-18,
    1.446404347862073985e-18,
    -2.452889825493382818e-19,
    4.233754525900557224e-20,
    -7.427946510034461244e-21,
    1.323150447457827063e-21,
    -2.390583043025926375e-22,
    4.376618477233929963e-23,
    -8.102996834052835813e-24,
    1.466513707161769934e-24,
];
const K0E_FAR: [f64; 19] = [
    2.487981301736924078,
    -0.009174852691025695311,
    0.0001444550931775005821,
    -4.013614175435709729e-6,
    1.567831810852310673e-7,
    -7.770110438521737710e-9,
    4.611182576179717883e-10,
    -3.158592997860565771e-11,
    2.435018039365041127e-12,
    -2.074331387398347868e-13,
    1.925787280589915515e-14,
    -1.927554805838871988e-15,
    2.062198029193216504e-16,
    -2.341685117321935500e-17,
    2.805902795921430416e-18,
    -3.530506768211658192e-19,
    4.645243525490971644e-20,
    -6.365418913862898634e-21,
    8.865537708800520337e-22,
];
const K1E_MID: [f64; 27] = [
    2.774431340697388297,
    0.07571989953199367817,
    -0.001441051556475406123,
    0.00006650116955125747939,
    -4.369984709520140766e-6,
    3.540277499763052680e-7,
    -3.311163779293292021e-8,
    3.445977581901053453e-9,
    -3.898932347475427105e-10,
    4.720819750465835640e-11,
    -6.047835662875356235e-12,
    8.128494874865874789e-13,
    -1.138694574714789143e-13,
    1.654035840846228233e-14,
    -2.480902567706884822e-15,
    3.829237890702409682e-16,
    -6.064734104001241181e-17,
    9.832425623264830867e-18,
    -1.628416873828288819e-18,
    2.750153649667971742e-19,
    -4.728966646036479514e-20,
    8.268149985016313061e-21,
    -1.468140424729610766e-21,
    2.644759445811095000e-22,
    -4.828788019069829483e-23,
    8.917623275419182726e-24,
    -1.610377661585121926e-24,
];
const K1E_FAR: [f64; 19] = [
    2.563793083437390010,
    0.02832887813049720936,
    -0.0002475370673905250345,
    5.771972451607248820e-6,
    -2.068939219536548303e-7,
    9.739983441381804180e-9,
    -5.585336140380624985e-10,
    3.732996634046185240e-11,
    -2.825051961023225445e-12,
    2.372019002484144142e-13,
    -2.176677387991752325e-14,
    2.157914161615943660e-15,
    -2.290196930713403601e-16,
    2.582885729550733024e-17,
    -3.076752625645591151e-18,
    3.851486803620341028e-19,
    -5.044739586997586513e-20,
    6.885247604796735016e-21,
    -9.556535592215683564e-22,
];

/// Clenshaw evaluation of a Chebyshev series on [lo, hi] (c[0] halved).
fn cheb(c: &[f64], lo: f64, hi: f64, s: f64) -> f64 {
    let t = (2.0 * s - (lo + hi)) / (hi - lo);
    let t2 = 2.0 * t;
    let (mut b1, mut b2) = (0.0f64, 0.0f64);
    for &ck in c.iter().skip(1).rev() {
        let b0 = t2 * b1 - b2 + ck;
        b2 = b1;
        b1 = b0;
    }
    t * b1 - b2 + 0.5 * c[0]
}

/// I0 by ascending series (all terms positive).
pub fn bessel_i0(x: f64) -> f64 {
    let q = 0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k = 1.0f64;
    while term > 1e-19 * sum {
        term *= q / (k * k);
        sum += term;
        k += 1.0;
    }
    sum
}

fn k0_series(x: f64) -> f64 {
    // K0 = -(ln(x/2) + gamma) I0(x) + sum_{k>=1} (x^2/4)^k / (k!)^2 * H_k
    let q = 0.25 * x * x;
    let mut term = 1.0;
    let mut hk = 0.0;
    let mut sum = 0.0;
    let mut k = 1.0f64;
    loop {
        term *= q / (k * k);
        hk += 1.0 / k;
        let add = term * hk;
        sum += add;
        if add < 1e-19 * (1.0 + sum) {
            break;
        }
        k += 1.0;
    }
    -(0.5 * x).ln() * bessel_i0(x) - EULER_GAMMA * bessel_i0(x) + sum
}

fn k1_series(x: f64) -> f64 {
    // K1 = (ln(x/2)+gamma) I1 + 1/x - (x/4) sum (x^2/4)^k (H_k + H_{k+1}) / (k!(k+1)!)
    let q = 0.25 * x * x;
    // I1
    let mut term = 0.5 * x;
    let mut i1 = term;
    let mut k = 1.0f64;
    while term > 1e-19 * i1 {
        term *= q / (k * (k + 1.0));
        i1 += term;
        k += 1.0;
    }
    // correction sum
    let mut t = 1.0; // q^k / (k!(k+1)!) at k=0 is 1/1
    let mut hk = 0.0;
    let mut hk1 = 1.0;
    let mut sum = t * (hk + hk1);
    k = 1.0;
    loop {
        t *= q / (k * (k + 1.0));
        hk += 1.0 / k;
        hk1 += 1.0 / (k + 1.0);
        let add = t * (hk + hk1);
        sum += add;
        if add < 1e-19 * (1.0 + sum.abs()) {
            break;
        }
        k += 1.0;
    }
    ((0.5 * x).ln() + EULER_GAMMA) * i1 + 1.0 / x - 0.25 * x * sum
}

/// K0(x) for x > 0, relative accuracy ~1e-15.
pub fn bessel_k0(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::Domain(format!("bessel_k0 requires x > 0, got {x}")));
    }
    Ok(k0_unchecked(x))
}

pub(crate) fn k0_unchecked(x: f64) -> f64 {
    if x < 2.0 {
        k0_series(x)
    } else if x < 705.0 {
        k0_scaled_unchecked(x) * (-x).exp()
    } else {
        0.0
    }
}

/// e^x K0(x), stable at any positive x.
pub(crate) fn k0_scaled_unchecked(x: f64) -> f64 {
    if x < 2.0 {
        k0_series(x) * x.exp()
    } else if x <= 8.0 {
        cheb(&K0E_MID, 0.125, 0.5, 1.0 / x) / x.sqrt()
    } else {
        cheb(&K0E_FAR, 0.0, 0.125, 1.0 / x) / x.sqrt()
    }
}

/// e^x K0(x) with the domain check.
pub fn bessel_k0_scaled(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::Domain(format!("bessel_k0_scaled requires x > 0, got {x}")));
    }
    Ok(k0_scaled_unchecked(x))
}

/// K1(x) for x > 0.
pub fn bessel_k1(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::Domain(format!("bessel_k1 requires x > 0, got {x}")));
    }
    Ok(if x < 2.0 {
        k1_series(x)
    } else if x <= 8.0 {
        cheb(&K1E_MID, 0.125, 0.5, 1.0 / x) * (-x).exp() / x.sqrt()
    } else if x < 705.0 {
        cheb(&K1E_FAR, 0.0, 0.125, 1.0 / x) * (-x).exp() / x.sqrt()
    } else {
        0.0
    })
}

/// K of nonnegative integer order via the upward recurrence
/// K_{n+1}(x) = K_{n-1}(x) + (2n/x) K_n(x).
pub fn bessel_k_int(n: u32, x: f64) -> Result<f64> {
    let k0 = bessel_k0(x)?;
    if n == 0 {
        return Ok(k0);
    }
    let mut prev = k0;
    let mut cur = bessel_k1(x)?;
    for m in 1..n {
        let next = prev + (2.0 * m as f64 / x) * cur;
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

/// K of half-integer order (n + 1/2): elementary closed forms.
pub fn bessel_k_half(n: u32, x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::Domain(format!("bessel_k_half requires x > 0, got {x}")));
    }
    let base = (std::f64::consts::PI / (2.0 * x)).sqrt() * (-x).exp();
    // K_{1/2} = base; K_{3/2} = base (1 + 1/x); recurrence upward
    let mut prev = base;
    if n == 0 {
        return Ok(prev);
    }
    let mut cur = base * (1.0 + 1.0 / x);
    for m in 1..n {
        let order = m as f64 + 0.5;
        let next = prev + (2.0 * order / x) * cur;
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

/// K of order nu/2 for integer nu >= 0 (the orders this crate needs).
pub fn bessel_k_nu_half(nu: u32, x: f64) -> Result<f64> {
    if nu % 2 == 0 {
        bessel_k_int(nu / 2, x)
    } else {
        bessel_k_half(nu / 2, x)
    }
}
