use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use super::ExperimentError;

/// Largest per-sample size for which the exact distribution is used.
pub const EXACT_LIMIT: usize = 8;

fn non_empty(xs: &[f64], ys: &[f64]) -> Result<(), ExperimentError> {
    if xs.is_empty() || ys.is_empty() {
        Err(ExperimentError::EmptySample)
    } else {
        Ok(())
    }
}

/// Probability that a value drawn from `xs` beats one from `ys`, ties
/// counting half.
pub fn vargha_delaney_a12(xs: &[f64], ys: &[f64]) -> Result<f64, ExperimentError> {
    non_empty(xs, ys)?;
    let mut wins = 0.0;
    for x in xs {
        for y in ys {
            if x > y {
                wins += 1.0;
            } else if x == y {
                wins += 0.5;
            }
        }
    }
    Ok(wins / (xs.len() * ys.len()) as f64)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MannWhitney {
    pub u_x: f64,
    pub u_y: f64,
    /// Two-sided.
    pub p: f64,
    pub exact: bool,
}

/// Average ranks (1-based) of the pooled sample, `xs` first.
fn pooled_ranks(xs: &[f64], ys: &[f64]) -> Vec<f64> {
    let pooled: Vec<f64> = xs.iter().chain(ys).copied().collect();
    let mut order: Vec<usize> = (0..pooled.len()).collect();
    order.sort_by(|&a, &b| pooled[a].total_cmp(&pooled[b]));
    let mut ranks = vec![0.0; pooled.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i + 1;
        while j < order.len() && pooled[order[j]] == pooled[order[i]] {
            j += 1;
        }
        // positions i..j share the mean of ranks i+1..=j
        let avg = (i + j + 1) as f64 / 2.0;
        for &k in &order[i..j] {
            ranks[k] = avg;
        }
        i = j;
    }
    ranks
}

pub fn mann_whitney_u(xs: &[f64], ys: &[f64]) -> Result<MannWhitney, ExperimentError> {
    non_empty(xs, ys)?;
    let (n, m) = (xs.len(), ys.len());
    let ranks = pooled_ranks(xs, ys);
    let rank_sum: f64 = ranks[..n].iter().sum();
    let u_x = rank_sum - (n * (n + 1)) as f64 / 2.0;
    let u_y = (n * m) as f64 - u_x;
    let exact = n <= EXACT_LIMIT && m <= EXACT_LIMIT;
    let p = if exact { exact_p(&ranks, n, u_x) } else { normal_p(&ranks, n, m, u_x) };
    Ok(MannWhitney { u_x, u_y, p, exact })
}

/// Counts, over every way of labelling `n` of the pooled ranks as the
/// first sample, how many give a U at least as far from the mean as the
/// observed one. Ranks are doubled so ties stay integral.
fn exact_p(ranks: &[f64], n: usize, u_x: f64) -> f64 {
    let doubled: Vec<usize> = ranks.iter().map(|r| (r * 2.0).round() as usize).collect();
    // ways[k][s]: subsets of size k with doubled rank sum s
    let mut ways: Vec<BTreeMap<usize, f64>> = vec![BTreeMap::new(); n + 1];
    ways[0].insert(0, 1.0);
    for &r in &doubled {
        for k in (0..n).rev() {
            let lower: Vec<(usize, f64)> = ways[k].iter().map(|(&s, &c)| (s, c)).collect();
            for (s, c) in lower {
                *ways[k + 1].entry(s + r).or_insert(0.0) += c;
            }
        }
    }
    let m = ranks.len() - n;
    let mean = (n * m) as f64 / 2.0;
    let offset = (n * (n + 1)) as f64 / 2.0;
    let observed = (u_x - mean).abs();
    let mut total = 0.0;
    let mut extreme = 0.0;
    for (&s, &c) in &ways[n] {
        let u = s as f64 / 2.0 - offset;
        total += c;
        if (u - mean).abs() >= observed - 1e-9 {
            extreme += c;
        }
    }
    (extreme / total).min(1.0)
}

fn normal_p(ranks: &[f64], n: usize, m: usize, u_x: f64) -> f64 {
    let big_n = (n + m) as f64;
    let mut sorted = ranks.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut ties = 0.0;
    let mut i = 0;
    while i < sorted.len() {
        let j = sorted[i..].iter().take_while(|&&r| r == sorted[i]).count();
        let t = j as f64;
        ties += t * t * t - t;
        i += j;
    }
    let nm = (n * m) as f64;
    let variance = nm / 12.0 * ((big_n + 1.0) - ties / (big_n * (big_n - 1.0)));
    if variance <= 0.0 {
        return 1.0;
    }
    let z = ((u_x - nm / 2.0).abs() - 0.5).max(0.0) / variance.sqrt();
    let normal = Normal::standard();
    (2.0 * (1.0 - normal.cdf(z))).min(1.0)
}
