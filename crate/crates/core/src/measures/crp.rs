//! Two-parameter Chinese restaurant process.

use rand::Rng;

use crate::error::{invalid, Result};

/// Block sizes of an exchangeable partition of `n` customers.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct PartitionState {
    pub n: usize,
    pub block_sizes: Vec<usize>,
}

impl PartitionState {
    /// Number of blocks `K_n`.
    pub fn k(&self) -> usize {
        self.block_sizes.len()
    }
}

/// Sequential (α, θ) seating of `n` customers. After `m` customers in `K`
/// blocks, a new block opens with probability `(θ + Kα)/(θ + m)` and a block
/// of size `c` is joined with probability `(c - α)/(θ + m)`.
///
/// An existing block is chosen by picking a uniform earlier customer and
/// accepting its block with probability `(c - α)/c`.
pub fn crp_partition<R: Rng + ?Sized>(
    rng: &mut R,
    alpha: f64,
    theta: f64,
    n: usize,
) -> Result<PartitionState> {
    if !(0.0..1.0).contains(&alpha) {
        return invalid(format!("alpha must lie in [0, 1), got {alpha}"));
    }
    if !(theta > -alpha && theta.is_finite()) {
        return invalid(format!("theta must exceed -alpha = {}, got {theta}", -alpha));
    }
    if n == 0 {
        return invalid("a partition needs n >= 1");
    }
    let mut sizes: Vec<usize> = vec![1];
    let mut seat: Vec<u32> = Vec::with_capacity(n);
    seat.push(0);
    for m in 1..n {
        let k = sizes.len() as f64;
        let mf = m as f64;
        let u: f64 = rng.random::<f64>() * (theta + mf);
        let block = if u < theta + k * alpha {
            sizes.push(0);
            sizes.len() - 1
        } else {
            loop {
                let b = seat[rng.random_range(0..m)] as usize;
                let c = sizes[b] as f64;
                if alpha == 0.0 || rng.random::<f64>() * c < c - alpha {
                    break b;
                }
            }
        };
        sizes[block] += 1;
        seat.push(block as u32);
    }
    Ok(PartitionState {
        n,
        block_sizes: sizes,
    })
}

/// `K_n / n^α`.
pub fn diversity_estimate(part: &PartitionState, alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return invalid(format!("alpha must lie in (0, 1), got {alpha}"));
    }
    Ok(part.k() as f64 / (part.n as f64).powf(alpha))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::samplers::RngStream;

    #[test]
    fn arithmetic_and_single_customer() {
        let p = PartitionState {
            n: 100,
            block_sizes: vec![10; 10],
        };
        assert!((diversity_estimate(&p, 0.5).unwrap() - 1.0).abs() < 1e-15);
        let mut rng = RngStream::new(1, 0);
        let p = crp_partition(&mut rng, 0.3, 1.0, 1).unwrap();
        assert_eq!(p.k(), 1);
    }

    #[test]
    fn sizes_sum_to_n() {
        let mut rng = RngStream::new(2, 0);
        let p = crp_partition(&mut rng, 0.5, 0.0, 5000).unwrap();
        assert_eq!(p.block_sizes.iter().sum::<usize>(), 5000);
        assert!(p.block_sizes.iter().all(|&c| c > 0));
    }

    #[test]
    fn harmonic_block_count() {
        let mut rng = RngStream::new(3, 0);
        let n = 200;
        let reps = 4000;
        let expect: f64 = (0..n).map(|m| 1.0 / (1.0 + m as f64)).sum();
        let ks: Vec<f64> = (0..reps)
            .map(|_| crp_partition(&mut rng, 0.0, 1.0, n).unwrap().k() as f64)
            .collect();
        let mean = ks.iter().sum::<f64>() / reps as f64;
        let var = ks.iter().map(|k| (k - mean).powi(2)).sum::<f64>() / (reps - 1) as f64;
        assert!((mean - expect).abs() < 4.0 * (var / reps as f64).sqrt());
    }
}
