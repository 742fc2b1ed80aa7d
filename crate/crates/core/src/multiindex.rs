//! Compositions of an integer and multinomial weights.

use crate::scalar::Scalar;

/// All `z` in N^parts with `|z| = total`, in reverse lexicographic order.
pub fn compositions(parts: usize, total: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur = vec![0u32; parts];
    fn rec(i: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if i + 1 == cur.len() {
            cur[i] = left;
            out.push(cur.clone());
            return;
        }
        for v in (0..=left).rev() {
            cur[i] = v;
            rec(i + 1, left - v, cur, out);
        }
    }
    if parts > 0 {
        rec(0, total, &mut cur, &mut out);
    }
    out
}

/// Number of compositions, `C(total + parts - 1, parts - 1)`.
pub fn composition_count(parts: usize, total: u32) -> f64 {
    crate::special::binomial(total as u64 + parts as u64 - 1, parts as u64 - 1)
}

/// `|z|! / prod z_i!`.
pub fn multinomial_coefficient<T: Scalar>(z: &[u32]) -> T {
    let mut acc = T::one();
    let mut n = 0u32;
    for &zi in z {
        for j in 1..=zi {
            n += 1;
            acc = acc * T::from_count(n as usize) / T::from_count(j as usize);
        }
    }
    acc
}

/// `prod x_i^{z_i}`.
#[inline]
pub fn monomial<T: Scalar>(z: &[u32], x: &[T]) -> T {
    z.iter()
        .zip(x)
        .fold(T::one(), |acc, (&zi, &xi)| acc * xi.powi(zi as i32))
}

/// Multinomial probability of counts `z` under frequencies `x`.
pub fn multinomial_pmf<T: Scalar>(z: &[u32], x: &[T]) -> T {
    multinomial_coefficient::<T>(z) * monomial(z, x)
}
