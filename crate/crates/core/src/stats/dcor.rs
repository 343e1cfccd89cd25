//! Distance-correlation permutation test on ranks.
//!
//! Both coordinates are replaced by their ranks, so the statistic only
//! depends on the ordering of each sample. With ranks the distance
//! covariance reduces to `Σ_{i,j} |i-j| |π_i-π_j|` for a permutation `π`,
//! computed in `O(n log n)` with Fenwick trees.

use rand::seq::SliceRandom;
use rayon::prelude::*;

use super::{StatReport, TestKind};
use crate::error::{Error, Result};
use crate::samplers::RngStream;

pub const DCOR_MIN_N: usize = 200;
pub const DCOR_MAX_N: usize = 10_000;
pub const MIN_PERMUTATIONS: usize = 199;

#[derive(Clone, Copy, Default)]
struct Cell {
    count: i64,
    sum_i: i64,
    sum_p: i64,
    sum_ip: i64,
}

impl std::ops::AddAssign for Cell {
    fn add_assign(&mut self, o: Self) {
        self.count += o.count;
        self.sum_i += o.sum_i;
        self.sum_p += o.sum_p;
        self.sum_ip += o.sum_ip;
    }
}

struct Fenwick {
    tree: Vec<Cell>,
}

impl Fenwick {
    fn new(n: usize) -> Self {
        Self {
            tree: vec![Cell::default(); n + 1],
        }
    }

    fn add(&mut self, pos: usize, c: Cell) {
        let mut k = pos + 1;
        while k < self.tree.len() {
            self.tree[k] += c;
            k += k & k.wrapping_neg();
        }
    }

    /// Sum over positions `< pos`.
    fn prefix(&self, pos: usize) -> Cell {
        let mut k = pos;
        let mut acc = Cell::default();
        while k > 0 {
            acc += self.tree[k];
            k -= k & k.wrapping_neg();
        }
        acc
    }
}

/// `Σ_{i,j} |i - j| |π_i - π_j|` for a permutation of `0..n`.
fn cross_sum(perm: &[u32]) -> i128 {
    let n = perm.len();
    let mut fw = Fenwick::new(n);
    let mut all = Cell::default();
    let mut total: i128 = 0;
    for (j, &pj) in perm.iter().enumerate() {
        let (j, p) = (j as i64, i64::from(pj));
        let below = fw.prefix(pj as usize);
        let above = Cell {
            count: all.count - below.count,
            sum_i: all.sum_i - below.sum_i,
            sum_p: all.sum_p - below.sum_p,
            sum_ip: all.sum_ip - below.sum_ip,
        };
        // Σ_{i<j, π_i<π_j} (j-i)(π_j-π_i)
        let lo = below.count as i128 * (j * p) as i128 - (j as i128) * below.sum_p as i128
            - (p as i128) * below.sum_i as i128
            + below.sum_ip as i128;
        // Σ_{i<j, π_i>π_j} (j-i)(π_i-π_j)
        let hi = (j as i128) * above.sum_p as i128 - above.count as i128 * (j * p) as i128
            - above.sum_ip as i128
            + (p as i128) * above.sum_i as i128;
        total += lo + hi;
        let c = Cell {
            count: 1,
            sum_i: j,
            sum_p: p,
            sum_ip: j * p,
        };
        fw.add(pj as usize, c);
        all += c;
    }
    2 * total
}

/// Row sum `Σ_j |r - j|` of the rank distance matrix.
fn rank_row_sum(r: u32, n: usize) -> f64 {
    let r = f64::from(r);
    let n = n as f64;
    0.5 * r * (r + 1.0) + 0.5 * (n - 1.0 - r) * (n - r)
}

/// V-statistic distance covariance of `(i, π_i)`, `i = 0..n`.
pub fn rank_dcov_v(perm: &[u32]) -> f64 {
    let n = perm.len();
    let nf = n as f64;
    let s = cross_sum(perm) as f64;
    let mid: f64 = perm
        .iter()
        .enumerate()
        .map(|(i, &p)| rank_row_sum(i as u32, n) * rank_row_sum(p, n))
        .sum();
    let grand = nf * (nf * nf - 1.0) / 3.0;
    s / (nf * nf) - 2.0 * mid / (nf * nf * nf) + grand * grand / (nf * nf * nf * nf)
}

fn rank_dcor(perm: &[u32], dvar: f64) -> f64 {
    (rank_dcov_v(perm) / dvar).max(0.0).sqrt()
}

/// Ordinal ranks `0..n`, ties broken by position.
fn ranks(x: &[f64]) -> Vec<u32> {
    let mut idx: Vec<usize> = (0..x.len()).collect();
    idx.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
    let mut r = vec![0u32; x.len()];
    for (k, &i) in idx.iter().enumerate() {
        r[i] = k as u32;
    }
    r
}

/// Permutation test of independence between paired samples, using the
/// distance correlation of their ranks. `p = (1 + #{perm ≥ obs}) / (1 + P)`.
/// Each permutation draws from its own stream, so the p-value does not
/// depend on the number of worker threads.
pub fn independence_test(
    x: &[f64],
    y: &[f64],
    permutations: usize,
    level: f64,
    seed: u64,
) -> Result<StatReport> {
    let n = x.len();
    if y.len() != n {
        return Err(Error::InvalidParameter(format!(
            "paired samples differ in length: {} vs {}",
            n,
            y.len()
        )));
    }
    if !(DCOR_MIN_N..=DCOR_MAX_N).contains(&n) {
        return Err(Error::SampleSize {
            got: n,
            min: DCOR_MIN_N,
            max: DCOR_MAX_N,
        });
    }
    if permutations < MIN_PERMUTATIONS {
        return Err(Error::InvalidParameter(format!(
            "need at least {MIN_PERMUTATIONS} permutations, got {permutations}"
        )));
    }
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::InvalidParameter(format!("level must lie in (0, 1), got {level}")));
    }
    if x.iter().chain(y).any(|v| v.is_nan()) {
        return Err(Error::InvalidParameter("sample contains NaN".into()));
    }
    let rx = ranks(x);
    let ry = ranks(y);
    // Order by the rank of x so that x's rank equals the position.
    let mut perm = vec![0u32; n];
    for i in 0..n {
        perm[rx[i] as usize] = ry[i];
    }
    let identity: Vec<u32> = (0..n as u32).collect();
    let dvar = rank_dcov_v(&identity);
    let observed = rank_dcor(&perm, dvar);
    let exceed: usize = (0..permutations)
        .into_par_iter()
        .map(|k| {
            let mut rng = RngStream::for_task(seed, "dcor-permutation", k as u64);
            let mut p = perm.clone();
            p.shuffle(&mut rng);
            usize::from(rank_dcor(&p, dvar) >= observed * (1.0 - 1e-12))
        })
        .sum();
    let p_value = (1 + exceed) as f64 / (1 + permutations) as f64;
    let mut r = StatReport::new(TestKind::DistCorrPerm, observed, level, n);
    r.p_value = Some(p_value);
    r.passed = p_value > level;
    r.seed = seed;
    Ok(r.with_note(format!("{permutations} permutations")))
}

/// Plain `O(n²)` V-statistic distance correlation of raw values.
pub fn distance_correlation(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len();
    assert_eq!(n, y.len(), "paired samples must have equal length");
    let centered = |v: &[f64]| -> Vec<f64> {
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                a[i * n + j] = (v[i] - v[j]).abs();
            }
        }
        let row: Vec<f64> = (0..n).map(|i| a[i * n..(i + 1) * n].iter().sum::<f64>() / n as f64).collect();
        let grand = row.iter().sum::<f64>() / n as f64;
        for i in 0..n {
            for j in 0..n {
                a[i * n + j] += grand - row[i] - row[j];
            }
        }
        a
    };
    let a = centered(x);
    let b = centered(y);
    let nn = (n * n) as f64;
    let dcov: f64 = a.iter().zip(&b).map(|(u, v)| u * v).sum::<f64>() / nn;
    let vx: f64 = a.iter().map(|u| u * u).sum::<f64>() / nn;
    let vy: f64 = b.iter().map(|v| v * v).sum::<f64>() / nn;
    if vx <= 0.0 || vy <= 0.0 {
        return 0.0;
    }
    (dcov / (vx * vy).sqrt()).max(0.0).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn fast_rank_dcor_matches_naive() {
        let mut rng = RngStream::new(1, 0);
        for &n in &[5usize, 37, 300] {
            let x: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
            let y: Vec<f64> = x.iter().map(|v| v * v + 0.3 * rng.random::<f64>()).collect();
            let rx = ranks(&x);
            let ry = ranks(&y);
            let mut perm = vec![0u32; n];
            for i in 0..n {
                perm[rx[i] as usize] = ry[i];
            }
            let identity: Vec<u32> = (0..n as u32).collect();
            let fast = rank_dcor(&perm, rank_dcov_v(&identity));
            let fx: Vec<f64> = rx.iter().map(|&r| f64::from(r)).collect();
            let fy: Vec<f64> = ry.iter().map(|&r| f64::from(r)).collect();
            let naive = distance_correlation(&fx, &fy);
            assert!((fast - naive).abs() < 1e-10, "n={n}: {fast} vs {naive}");
        }
    }

    #[test]
    fn perfect_dependence_fails() {
        let mut rng = RngStream::new(2, 0);
        let x: Vec<f64> = (0..500).map(|_| rng.random::<f64>()).collect();
        let r = independence_test(&x, &x, 199, 0.01, 7).unwrap();
        assert_eq!(r.p_value, Some(1.0 / 200.0));
        assert!(!r.passed);
    }

    #[test]
    fn range_checks() {
        let x = vec![0.0; 100];
        assert!(matches!(
            independence_test(&x, &x, 199, 0.01, 1),
            Err(Error::SampleSize { got: 100, .. })
        ));
        let x: Vec<f64> = (0..300).map(f64::from).collect();
        assert!(independence_test(&x, &x, 100, 0.01, 1).is_err());
        assert!(independence_test(&x, &x[..299], 199, 0.01, 1).is_err());
    }
}
