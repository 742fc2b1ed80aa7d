//! Discrete sampling primitives.

use rand::Rng;
use rand_distr::{Binomial, Distribution};

/// Index drawn with probabilities `p` (assumed to sum to one).
#[inline]
pub fn categorical<R: Rng + ?Sized>(p: &[f64], rng: &mut R) -> usize {
    let mut u: f64 = rng.random();
    let mut last = 0;
    for (i, &pi) in p.iter().enumerate() {
        if pi <= 0.0 {
            continue;
        }
        if u < pi {
            return i;
        }
        u -= pi;
        last = i;
    }
    last
}

#[inline]
pub fn binomial<R: Rng + ?Sized>(n: u64, p: f64, rng: &mut R) -> u64 {
    if n == 0 || p <= 0.0 {
        return 0;
    }
    if p >= 1.0 {
        return n;
    }
    Binomial::new(n, p).expect("valid binomial").sample(rng)
}

/// Adds a Multinomial(n, p) draw to `out` by sequential conditional binomials.
pub fn multinomial_into<R: Rng + ?Sized>(n: u64, p: &[f64], rng: &mut R, out: &mut [u64]) {
    let mut left = n;
    let mut mass = 1.0;
    let last = p.iter().rposition(|&v| v > 0.0).unwrap_or(0);
    for (i, &pi) in p.iter().enumerate() {
        if left == 0 {
            break;
        }
        if i == last {
            out[i] += left;
            break;
        }
        if pi <= 0.0 {
            continue;
        }
        let c = binomial(left, (pi / mass).min(1.0), rng);
        out[i] += c;
        left -= c;
        mass -= pi;
        if mass <= 0.0 {
            out[last] += left;
            break;
        }
    }
}
