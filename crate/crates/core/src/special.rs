//! Special functions used by the one-dimensional laws.

use core::f64::consts::{PI, SQRT_2};

const FRAC_1_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

pub fn norm_pdf(z: f64) -> f64 {
    FRAC_1_SQRT_2PI * libm::exp(-0.5 * z * z)
}

pub fn norm_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z / SQRT_2)
}

/// Upper tail `P(Z > z)`.
pub fn norm_sf(z: f64) -> f64 {
    0.5 * libm::erfc(z / SQRT_2)
}

/// `P(a < Z <= b)` for a standard normal, evaluated on the tail that avoids
/// cancellation.
pub fn norm_mass(a: f64, b: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let m = if a >= 0.0 {
        norm_sf(a) - norm_sf(b)
    } else if b <= 0.0 {
        norm_cdf(b) - norm_cdf(a)
    } else {
        1.0 - norm_cdf(a) - norm_sf(b)
    };
    m.max(0.0)
}

/// Regularized incomplete beta `I_x(a, b)`, with `y = 1 - x` supplied by the
/// caller so that neither tail loses digits.
pub fn beta_inc(a: f64, b: f64, x: f64, y: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if y <= 0.0 {
        return 1.0;
    }
    let ln_front = libm::lgamma(a + b) - libm::lgamma(a) - libm::lgamma(b)
        + a * libm::log(x)
        + b * libm::log(y);
    let front = libm::exp(ln_front);
    if x < (a + 1.0) / (a + b + 2.0) {
        front * beta_cf(a, b, x, y) / a
    } else {
        1.0 - front * beta_cf(b, a, y, x) / b
    }
}

// Continued fraction for the incomplete beta function (modified Lentz).
fn beta_cf(a: f64, b: f64, x: f64, _y: f64) -> f64 {
    const TINY: f64 = 1e-300;
    const EPS: f64 = 1e-16;
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..1000 {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < EPS {
            break;
        }
    }
    h
}

/// Normalizing constant of the standard Student-t density with `nu` degrees
/// of freedom.
pub fn t_norm_const(nu: f64) -> f64 {
    libm::exp(libm::lgamma(0.5 * (nu + 1.0)) - libm::lgamma(0.5 * nu)) / libm::sqrt(nu * PI)
}

pub fn t_pdf(t: f64, nu: f64) -> f64 {
    t_norm_const(nu) * libm::pow(1.0 + t * t / nu, -0.5 * (nu + 1.0))
}

/// Upper tail `P(T > t)` of the standard Student-t.
pub fn t_sf(t: f64, nu: f64) -> f64 {
    if t.is_infinite() {
        return if t > 0.0 { 0.0 } else { 1.0 };
    }
    let tt = t * t;
    let x = nu / (nu + tt);
    let y = tt / (nu + tt);
    let half_tail = 0.5 * beta_inc(0.5 * nu, 0.5, x, y);
    if t >= 0.0 {
        half_tail
    } else {
        1.0 - half_tail
    }
}

pub fn t_cdf(t: f64, nu: f64) -> f64 {
    t_sf(-t, nu)
}

/// `P(a < T <= b)` for the standard Student-t.
pub fn t_mass(a: f64, b: f64, nu: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let m = if a >= 0.0 {
        t_sf(a, nu) - t_sf(b, nu)
    } else if b <= 0.0 {
        t_sf(-b, nu) - t_sf(-a, nu)
    } else {
        1.0 - t_sf(-a, nu) - t_sf(b, nu)
    };
    m.max(0.0)
}

/// Antiderivative-based partial first moment: `int_a^b t f(t) dt` for the
/// standard Student-t density `f`, which has the closed form
/// `H(a) - H(b)` with `H(t) = c nu / (nu - 1) (1 + t^2/nu)^(-(nu-1)/2)`.
pub fn t_partial_mean(a: f64, b: f64, nu: f64) -> f64 {
    let h = |t: f64| {
        if t.is_infinite() {
            0.0
        } else {
            t_norm_const(nu) * nu / (nu - 1.0) * libm::pow(1.0 + t * t / nu, -0.5 * (nu - 1.0))
        }
    };
    h(a) - h(b)
}
