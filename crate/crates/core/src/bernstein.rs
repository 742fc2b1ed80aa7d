//! Polynomial maps of the simplex and their Bernstein coefficient tables.
//!
//! A degree-`n` table stores, for every multi-index `z` with `|z| = n`, a row
//! `(α^1_z, ..., α^K_z)`, so that `g_i(x) = Σ_z α^i_z B_z(x)` with
//! `B_z(x) = n!/(z_1!...z_K!) x^z`. The map sends the simplex into itself iff
//! one can choose such a table with rows that are probability vectors.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::multiindex::{compositions, monomial, multinomial_coefficient};
use crate::scalar::Scalar;

/// `coef * x^exps`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Term<T> {
    pub coef: T,
    pub exps: Vec<u32>,
}

/// `g = (g_1, ..., g_K)` in the monomial basis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolynomialMap<T> {
    pub k: usize,
    pub components: Vec<Vec<Term<T>>>,
}

impl<T: Scalar> PolynomialMap<T> {
    pub fn new(k: usize, components: Vec<Vec<Term<T>>>) -> Result<Self> {
        let map = Self { k, components };
        map.validate()?;
        Ok(map)
    }

    fn validate(&self) -> Result<()> {
        if self.k < 2 {
            return Err(Error::InvalidParameter(format!(
                "K = {} must be >= 2",
                self.k
            )));
        }
        if self.components.len() != self.k {
            return Err(Error::DimensionMismatch {
                expected: self.k,
                got: self.components.len(),
            });
        }
        for term in self.components.iter().flatten() {
            if term.exps.len() != self.k {
                return Err(Error::DimensionMismatch {
                    expected: self.k,
                    got: term.exps.len(),
                });
            }
            if !term.coef.is_finite() {
                return Err(Error::InvalidParameter(
                    "non-finite polynomial coefficient".into(),
                ));
            }
        }
        Ok(())
    }

    pub fn identity(k: usize) -> Self {
        let components = (0..k)
            .map(|i| {
                let mut exps = vec![0; k];
                exps[i] = 1;
                vec![Term {
                    coef: T::one(),
                    exps,
                }]
            })
            .collect();
        Self { k, components }
    }

    /// `g_i = (x_1 + ... + x_i)^{m} - (x_1 + ... + x_{i-1})^{m}`: the winner of
    /// `m` i.i.d. draws is the largest label.
    pub fn transitive(k: usize, m: u32) -> Self {
        let mut components = Vec::with_capacity(k);
        for i in 0..k {
            let mut terms = Vec::new();
            // S_i^m - S_{i-1}^m keeps exactly the terms of S_i^m involving x_i
            for z in compositions(i + 1, m).into_iter().filter(|z| z[i] > 0) {
                let coef = multinomial_coefficient(&z);
                let mut exps = z;
                exps.resize(k, 0);
                terms.push(Term { coef, exps });
            }
            components.push(terms);
        }
        Self { k, components }
    }

    /// Largest total degree over all terms.
    pub fn degree(&self) -> u32 {
        self.components
            .iter()
            .flatten()
            .filter(|t| t.coef != T::zero())
            .map(|t| t.exps.iter().sum())
            .max()
            .unwrap_or(0)
    }

    pub fn eval(&self, x: &[T]) -> Vec<T> {
        self.components
            .iter()
            .map(|terms| {
                terms
                    .iter()
                    .fold(T::zero(), |acc, t| acc + t.coef * monomial(&t.exps, x))
            })
            .collect()
    }
}

/// Bernstein coefficients of a polynomial map of the simplex.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(
    try_from = "BernsteinRepr<T>",
    into = "BernsteinRepr<T>",
    bound = "T: Scalar"
)]
pub struct BernsteinTable<T> {
    k: usize,
    degree: u32,
    indices: Vec<Vec<u32>>,
    /// Row-major: `rows[r * k + i] = α^i_{indices[r]}`.
    rows: Vec<T>,
    lookup: HashMap<Vec<u32>, usize>,
}

/// Serialized form: `{k, degree, rows: [[multi_index, coefficient_row], ...]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BernsteinRepr<T> {
    pub k: usize,
    pub degree: u32,
    pub rows: Vec<(Vec<u32>, Vec<T>)>,
}

impl<T: Scalar> TryFrom<BernsteinRepr<T>> for BernsteinTable<T> {
    type Error = Error;

    fn try_from(r: BernsteinRepr<T>) -> Result<Self> {
        BernsteinTable::from_rows(r.k, r.degree, r.rows)
    }
}

impl<T: Scalar> From<BernsteinTable<T>> for BernsteinRepr<T> {
    fn from(t: BernsteinTable<T>) -> Self {
        let rows = t
            .indices
            .iter()
            .enumerate()
            .map(|(r, z)| (z.clone(), t.row(r).to_vec()))
            .collect();
        BernsteinRepr {
            k: t.k,
            degree: t.degree,
            rows,
        }
    }
}

fn check_tol<T: Scalar>() -> T {
    T::simplex_tol() * T::lit(1000.0)
}

impl<T: Scalar> BernsteinTable<T> {
    /// Builds a table from explicit rows; every multi-index of total `degree`
    /// must appear exactly once and every row must be a probability vector.
    pub fn from_rows(k: usize, degree: u32, rows: Vec<(Vec<u32>, Vec<T>)>) -> Result<Self> {
        if k < 2 {
            return Err(Error::InvalidParameter(format!("K = {k} must be >= 2")));
        }
        let indices = compositions(k, degree);
        let lookup: HashMap<Vec<u32>, usize> = indices
            .iter()
            .cloned()
            .enumerate()
            .map(|(r, z)| (z, r))
            .collect();
        let mut data = vec![T::nan(); indices.len() * k];
        let mut seen = vec![false; indices.len()];
        for (z, row) in rows {
            let r = *lookup.get(&z).ok_or_else(|| {
                Error::InvalidParameter(format!(
                    "multi-index {z:?} is not of length {k} and total {degree}"
                ))
            })?;
            if seen[r] {
                return Err(Error::InvalidParameter(format!(
                    "multi-index {z:?} given twice"
                )));
            }
            if row.len() != k {
                return Err(Error::DimensionMismatch {
                    expected: k,
                    got: row.len(),
                });
            }
            seen[r] = true;
            data[r * k..(r + 1) * k].copy_from_slice(&row);
        }
        if let Some(r) = seen.iter().position(|s| !s) {
            return Err(Error::InvalidParameter(format!(
                "missing Bernstein row for multi-index {:?}",
                indices[r]
            )));
        }
        let mut table = Self {
            k,
            degree,
            indices,
            rows: data,
            lookup,
        };
        table.check_and_snap()?;
        Ok(table)
    }

    /// Converts a monomial-basis map on the face `|x| = 1`, at the smallest degree
    /// fitting all components (at least `min_degree`).
    pub fn from_polynomial(g: &PolynomialMap<T>, min_degree: u32) -> Result<Self> {
        g.validate()?;
        let n = g.degree().max(min_degree);
        let k = g.k;
        let indices = compositions(k, n);
        let lookup: HashMap<Vec<u32>, usize> = indices
            .iter()
            .cloned()
            .enumerate()
            .map(|(r, z)| (z, r))
            .collect();
        let mut rows = vec![T::zero(); indices.len() * k];
        for (i, terms) in g.components.iter().enumerate() {
            for term in terms {
                let m = &term.exps;
                let rest = n - m.iter().sum::<u32>();
                // x^m (x_1 + ... + x_K)^rest = Σ_w multinom(rest; w) x^{m + w}
                for w in compositions(k, rest) {
                    let z: Vec<u32> = m.iter().zip(&w).map(|(a, b)| a + b).collect();
                    let r = lookup[&z];
                    let weight =
                        multinomial_coefficient::<T>(&w) / multinomial_coefficient::<T>(&z);
                    rows[r * k + i] += term.coef * weight;
                }
            }
        }
        let mut table = Self {
            k,
            degree: n,
            indices,
            rows,
            lookup,
        };
        table.check_and_snap()?;
        Ok(table)
    }

    fn check_and_snap(&mut self) -> Result<()> {
        let tol = check_tol::<T>();
        for (r, z) in self.indices.iter().enumerate() {
            let row = &mut self.rows[r * self.k..(r + 1) * self.k];
            let mut sum = T::zero();
            for (i, v) in row.iter_mut().enumerate() {
                if !(v.is_finite() && *v >= -tol && *v <= T::one() + tol) {
                    return Err(Error::BernsteinOutOfRange {
                        component: i,
                        multi_index: z.clone(),
                        value: v.to_f64().unwrap_or(f64::NAN),
                    });
                }
                *v = v.max(T::zero()).min(T::one());
                sum += *v;
            }
            if (sum - T::one()).abs() > tol {
                return Err(Error::BernsteinRowSum {
                    multi_index: z.clone(),
                    sum: sum.to_f64().unwrap_or(f64::NAN),
                });
            }
            for v in row.iter_mut() {
                *v /= sum;
            }
        }
        Ok(())
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn multi_indices(&self) -> &[Vec<u32>] {
        &self.indices
    }

    #[inline]
    pub fn row(&self, r: usize) -> &[T] {
        &self.rows[r * self.k..(r + 1) * self.k]
    }

    /// `(α^1_z, ..., α^K_z)`.
    pub fn coefficients(&self, z: &[u32]) -> Option<&[T]> {
        self.lookup.get(z).map(|&r| self.row(r))
    }

    /// `g(x) = Σ_z α_z B_z(x)`.
    pub fn eval(&self, x: &[T]) -> Vec<T> {
        let mut out = vec![T::zero(); self.k];
        self.eval_into(x, &mut out);
        out
    }

    pub fn eval_into(&self, x: &[T], out: &mut [T]) {
        out.iter_mut().for_each(|v| *v = T::zero());
        for (r, z) in self.indices.iter().enumerate() {
            let b = multinomial_coefficient::<T>(z) * monomial(z, x);
            if b == T::zero() {
                continue;
            }
            for (o, &a) in out.iter_mut().zip(self.row(r)) {
                *o += a * b;
            }
        }
    }

    /// The same map written at degree `degree + 1`.
    pub fn elevate(&self) -> Self {
        let k = self.k;
        let n = self.degree + 1;
        let indices = compositions(k, n);
        let lookup: HashMap<Vec<u32>, usize> = indices
            .iter()
            .cloned()
            .enumerate()
            .map(|(r, z)| (z, r))
            .collect();
        let mut rows = vec![T::zero(); indices.len() * k];
        for (r, z) in indices.iter().enumerate() {
            let mut lower = z.clone();
            for j in 0..k {
                if z[j] == 0 {
                    continue;
                }
                lower[j] -= 1;
                let w = T::from_count(z[j] as usize) / T::from_count(n as usize);
                let src = self
                    .coefficients(&lower)
                    .expect("lower multi-index present");
                for i in 0..k {
                    rows[r * k + i] += w * src[i];
                }
                lower[j] += 1;
            }
        }
        Self {
            k,
            degree: n,
            indices,
            rows,
            lookup,
        }
    }

    /// Elevates until the degree is at least `degree`.
    pub fn elevate_to(&self, degree: u32) -> Self {
        let mut t = self.clone();
        while t.degree < degree {
            t = t.elevate();
        }
        t
    }

    /// `α^i_z = 0` whenever `z_i = 0`: the offspring never carries an absent type.
    pub fn is_mutation_free(&self) -> bool {
        self.indices.iter().enumerate().all(|(r, z)| {
            self.row(r)
                .iter()
                .zip(z)
                .all(|(&a, &zi)| zi > 0 || a <= T::simplex_tol())
        })
    }

    /// Converts the coefficients to another scalar type.
    pub fn cast<U: Scalar>(&self) -> BernsteinTable<U> {
        BernsteinTable {
            k: self.k,
            degree: self.degree,
            indices: self.indices.clone(),
            rows: self
                .rows
                .iter()
                .map(|v| U::from_f64(v.to_f64().unwrap()).unwrap())
                .collect(),
            lookup: self.lookup.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn random_simplex(weights: &[f64]) -> Vec<f64> {
        let s: f64 = weights.iter().sum();
        weights.iter().map(|w| w / s).collect()
    }

    #[test]
    fn transitive_pairwise_table() {
        let g = PolynomialMap::<f64>::transitive(2, 2);
        let t = BernsteinTable::from_polynomial(&g, 0).unwrap();
        assert_eq!(t.degree(), 2);
        assert_eq!(t.coefficients(&[0, 2]).unwrap(), &[0.0, 1.0]);
        assert_eq!(t.coefficients(&[1, 1]).unwrap(), &[0.0, 1.0]);
        assert_eq!(t.coefficients(&[2, 0]).unwrap(), &[1.0, 0.0]);
        assert!(t.is_mutation_free());
    }

    #[test]
    fn identity_is_neutral() {
        let g = PolynomialMap::<f64>::identity(3);
        let t1 = BernsteinTable::from_polynomial(&g, 0).unwrap();
        assert_eq!(t1.degree(), 1);
        assert_eq!(t1.coefficients(&[0, 1, 0]).unwrap(), &[0.0, 1.0, 0.0]);
        let t2 = BernsteinTable::from_polynomial(&g, 2).unwrap();
        // the elevated identity colours like a uniformly chosen parent
        assert_eq!(t2.coefficients(&[1, 0, 1]).unwrap(), &[0.5, 0.0, 0.5]);
        assert_eq!(t2, t1.elevate());
    }

    #[test]
    fn rejects_out_of_range_with_multi_index() {
        // g_1 = 1.2 x_1 - 0.2 x_1^2 ... not a self-map: coefficient 1.2 somewhere
        let g = PolynomialMap::new(
            2,
            vec![
                vec![Term {
                    coef: 1.2,
                    exps: vec![1, 0],
                }],
                vec![
                    Term {
                        coef: -0.2,
                        exps: vec![1, 0],
                    },
                    Term {
                        coef: 1.0,
                        exps: vec![0, 1],
                    },
                ],
            ],
        )
        .unwrap();
        match BernsteinTable::from_polynomial(&g, 0).unwrap_err() {
            Error::BernsteinOutOfRange {
                component,
                multi_index,
                value,
            } => {
                assert_eq!(component, 0);
                assert_eq!(multi_index, vec![1, 0]);
                assert!((value - 1.2).abs() < 1e-12);
            }
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn row_sum_checked() {
        let rows = vec![(vec![1, 0], vec![0.5, 0.4]), (vec![0, 1], vec![0.0, 1.0])];
        assert!(matches!(
            BernsteinTable::from_rows(2, 1, rows),
            Err(Error::BernsteinRowSum { .. })
        ));
    }

    #[test]
    fn serde_round_trip() {
        let t =
            BernsteinTable::from_polynomial(&PolynomialMap::<f64>::transitive(3, 2), 0).unwrap();
        let s = serde_json::to_string(&t).unwrap();
        let back: BernsteinTable<f64> = serde_json::from_str(&s).unwrap();
        assert_eq!(back, t);
        let bad = r#"{"k":2,"degree":1,"rows":[[[1,0],[1.2,-0.2]],[[0,1],[0,1]]]}"#;
        assert!(serde_json::from_str::<BernsteinTable<f64>>(bad).is_err());
    }

    #[test]
    fn f32_tables() {
        let t =
            BernsteinTable::from_polynomial(&PolynomialMap::<f32>::transitive(3, 3), 0).unwrap();
        let x = [0.2f32, 0.3, 0.5];
        let direct = PolynomialMap::<f32>::transitive(3, 3).eval(&x);
        for (a, b) in t.eval(&x).iter().zip(&direct) {
            assert!((a - b).abs() < 1e-5);
        }
    }

    proptest! {
        #[test]
        fn round_trip_matches_direct_evaluation(
            w in proptest::collection::vec(0.001f64..1.0, 3),
            m in 1u32..5,
        ) {
            let x = random_simplex(&w);
            let g = PolynomialMap::<f64>::transitive(3, m);
            let t = BernsteinTable::from_polynomial(&g, 0).unwrap();
            let e = t.elevate();
            for ((a, b), c) in t.eval(&x).iter().zip(g.eval(&x)).zip(e.eval(&x)) {
                prop_assert!((a - b).abs() < 1e-10);
                prop_assert!((a - c).abs() < 1e-10);
            }
        }
    }
}
