use std::collections::HashMap;

use lwf_core::{ColouringRule, DiscreteModel, OffspringLaw, RngStream, RuleKind};

/// Offspring-type law for size-2 samples, by direct enumeration of ordered pairs.
fn pair_law(x: &[f64], winner: impl Fn(usize, usize) -> Vec<f64>) -> Vec<f64> {
    let k = x.len();
    let mut p = vec![0.0; k];
    for a in 0..k {
        for b in 0..k {
            for (i, w) in winner(a, b).into_iter().enumerate() {
                p[i] += x[a] * x[b] * w;
            }
        }
    }
    p
}

fn compositions(n: u64, k: usize) -> Vec<Vec<u64>> {
    if k == 1 {
        return vec![vec![n]];
    }
    let mut out = Vec::new();
    for first in 0..=n {
        for mut rest in compositions(n - first, k - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

fn multinomial_pmf(c: &[u64], p: &[f64]) -> f64 {
    let n: u64 = c.iter().sum();
    let fact = |m: u64| (1..=m).map(|v| v as f64).product::<f64>();
    let mut v = fact(n);
    for (&ci, &pi) in c.iter().zip(p) {
        v *= pi.powi(ci as i32) / fact(ci);
    }
    v
}

fn check_tv(
    rule: ColouringRule,
    counts: &[u64],
    winner: impl Fn(usize, usize) -> Vec<f64>,
    seed: u64,
) {
    let n: u64 = counts.iter().sum();
    let k = counts.len();
    let m = DiscreteModel::new(n, OffspringLaw::two_point(1.0, 2).unwrap(), rule, 1.0).unwrap();
    let x: Vec<f64> = counts.iter().map(|&c| c as f64 / n as f64).collect();
    let p = pair_law(&x, winner);
    let draws = 1_000_000;
    let mut rng = RngStream::new(seed, 0);
    let mut hist: HashMap<Vec<u64>, usize> = HashMap::new();
    for _ in 0..draws {
        *hist
            .entry(m.step_ordinary(counts, &mut rng).unwrap())
            .or_default() += 1;
    }
    let mut tv = 0.0;
    for c in compositions(n, k) {
        let emp = hist.get(&c).copied().unwrap_or(0) as f64 / draws as f64;
        tv += (emp - multinomial_pmf(&c, &p)).abs();
    }
    tv *= 0.5;
    assert!(tv < 0.01, "TV = {tv} for counts {counts:?}");
}

#[test]
fn transitive_pairs_match_brute_force() {
    let rule = ColouringRule::new(3, RuleKind::Transitive).unwrap();
    let winner = |a: usize, b: usize| {
        let mut v = vec![0.0; 3];
        v[a.max(b)] = 1.0;
        v
    };
    for (s, counts) in [[1u64, 2, 3], [4, 1, 1], [2, 2, 0]].iter().enumerate() {
        check_tv(rule.clone(), counts, winner, s as u64);
    }
}

#[test]
fn rps_pairs_match_brute_force() {
    let winner = |a: usize, b: usize| {
        let mut v = vec![0.0; 3];
        // 1 beats 0, 2 beats 1, 0 beats 2
        let w = if a == b || (a + 2) % 3 == b { a } else { b };
        v[w] = 1.0;
        v
    };
    check_tv(ColouringRule::rps(), &[2, 2, 1], winner, 7);
    check_tv(ColouringRule::rps(), &[1, 1, 3], winner, 8);
}

#[test]
fn neutral_pairs_match_brute_force() {
    let rule = ColouringRule::new(2, RuleKind::Neutral).unwrap();
    let winner = |a: usize, b: usize| {
        let mut v = vec![0.0; 2];
        v[a] += 0.5;
        v[b] += 0.5;
        v
    };
    check_tv(rule, &[1, 4], winner, 9);
}

#[test]
fn two_type_transitive_pairs_match_brute_force() {
    let rule = ColouringRule::new(2, RuleKind::Transitive).unwrap();
    let winner = |a: usize, b: usize| {
        let mut v = vec![0.0; 2];
        v[a.max(b)] = 1.0;
        v
    };
    for (s, counts) in [[1u64, 5], [3, 3], [2, 1]].iter().enumerate() {
        check_tv(rule.clone(), counts, winner, 20 + s as u64);
    }
}
