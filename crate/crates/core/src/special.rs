//! Log-gamma based helpers.

#[inline]
pub fn ln_gamma(x: f64) -> f64 {
    libm::lgamma(x)
}

#[inline]
pub fn ln_beta(a: f64, b: f64) -> f64 {
    ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)
}

#[inline]
pub fn ln_binomial(n: u64, k: u64) -> f64 {
    ln_gamma(n as f64 + 1.0) - ln_gamma(k as f64 + 1.0) - ln_gamma((n - k) as f64 + 1.0)
}

/// Exact-in-f64 binomial coefficient by the multiplicative formula.
pub fn binomial(n: u64, k: u64) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut c = 1.0;
    for i in 0..k {
        c = c * (n - i) as f64 / (i + 1) as f64;
    }
    c.round().max(c)
}

/// `log(1 - y)` given both `y` and `1 - y`, picking the better-conditioned form.
#[inline]
pub fn ln_one_minus(y: f64, one_minus_y: f64) -> f64 {
    if y < 0.5 {
        (-y).ln_1p()
    } else {
        one_minus_y.ln()
    }
}
