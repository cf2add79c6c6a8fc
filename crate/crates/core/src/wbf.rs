//! Conventional weighted bit-flipping (WBF).
//!
//! Each check `j` gets a reliability weight `w_j = min_{i in M(j)} |r_i|`.
//! The flipping metric of bit `i` is `E_i = sum_{j in N(i)} (2 s_j - 1) w_j`
//! and the candidates are the bits attaining the maximum metric. The
//! single-bit variant flips one candidate chosen uniformly at random, the
//! multi-bit variant flips all of them.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sparse::SparseParityCheck;

fn check_len(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::LengthMismatch { expected, got })
    }
}

/// Row weights from received magnitudes. Rows without entries get weight 0.
pub fn compute_weights(h: &SparseParityCheck, magnitudes: &[f64]) -> Result<Vec<f64>> {
    check_len(h.n_cols(), magnitudes.len())?;
    Ok(h.rows()
        .map(|row| {
            row.iter()
                .map(|&i| magnitudes[i])
                .reduce(f64::min)
                .unwrap_or(0.0)
        })
        .collect())
}

pub fn syndrome(h: &SparseParityCheck, y: &[u8]) -> Result<Vec<u8>> {
    check_len(h.n_cols(), y.len())?;
    Ok(h.rows()
        .map(|row| row.iter().fold(0u8, |acc, &i| acc ^ y[i]))
        .collect())
}

#[inline]
fn metric_of(h: &SparseParityCheck, s: &[u8], w: &[f64], i: usize) -> f64 {
    // Summation order is fixed by N(i) so incremental and batch evaluations
    // produce identical values.
    h.col(i).iter().fold(0.0, |acc, &j| {
        acc + if s[j] == 1 { w[j] } else { -w[j] }
    })
}

/// Flipping metric `E_i` for every column.
pub fn flip_metric(h: &SparseParityCheck, s: &[u8], w: &[f64]) -> Result<Vec<f64>> {
    check_len(h.n_rows(), s.len())?;
    check_len(h.n_rows(), w.len())?;
    Ok((0..h.n_cols()).map(|i| metric_of(h, s, w, i)).collect())
}

/// Indices attaining the maximum of `e` under exact equality.
pub fn flip_candidates(e: &[f64]) -> Vec<usize> {
    let mut out = Vec::new();
    argmax_set(e, &mut out);
    out
}

fn argmax_set(e: &[f64], out: &mut Vec<usize>) {
    out.clear();
    let mut best = f64::NEG_INFINITY;
    for (i, &v) in e.iter().enumerate() {
        if v > best {
            best = v;
            out.clear();
            out.push(i);
        } else if v == best {
            out.push(i);
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FlipMode {
    /// Flip one uniformly chosen member of the candidate set.
    Single,
    /// Flip every member of the candidate set.
    Multi,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WbfParams {
    pub max_iterations: usize,
    pub mode: FlipMode,
    /// Only the first `stopping_rows` syndrome bits decide convergence.
    pub stopping_rows: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecodeOutcome {
    pub decision: Vec<u8>,
    /// Number of flipping iterations performed.
    pub iterations: usize,
    /// The checked syndrome prefix of `decision` is zero.
    pub converged: bool,
}

/// Runs WBF from `initial` using weights derived from the soft values `soft`.
///
/// Each iteration evaluates the stopping rule first, so a decode that starts
/// on a valid word reports zero iterations, and `max_iterations == 0` returns
/// `initial` unchanged.
pub fn decode_wbf<R: Rng + ?Sized>(
    h: &SparseParityCheck,
    soft: &[f64],
    initial: &[u8],
    params: WbfParams,
    rng: &mut R,
) -> Result<DecodeOutcome> {
    check_len(h.n_cols(), soft.len())?;
    check_len(h.n_cols(), initial.len())?;
    if params.stopping_rows > h.n_rows() {
        return Err(Error::InvalidParameter(format!(
            "stopping prefix {} exceeds {} rows",
            params.stopping_rows,
            h.n_rows()
        )));
    }
    let magnitudes: Vec<f64> = soft.iter().map(|r| r.abs()).collect();
    let w = compute_weights(h, &magnitudes)?;

    let mut y = initial.to_vec();
    let mut s = syndrome(h, &y)?;
    let stop = params.stopping_rows;
    let mut unsatisfied = s[..stop].iter().filter(|&&b| b == 1).count();
    let mut e = flip_metric(h, &s, &w)?;
    let mut candidates = Vec::new();

    let mut iterations = 0;
    loop {
        if unsatisfied == 0 {
            return Ok(DecodeOutcome {
                decision: y,
                iterations,
                converged: true,
            });
        }
        if iterations == params.max_iterations {
            return Ok(DecodeOutcome {
                decision: y,
                iterations,
                converged: false,
            });
        }
        argmax_set(&e, &mut candidates);
        if params.mode == FlipMode::Single {
            let pick = rng.gen_range(0..candidates.len() as u64) as usize;
            let chosen = candidates[pick];
            candidates.clear();
            candidates.push(chosen);
        }
        for &i in &candidates {
            y[i] ^= 1;
            for &j in h.col(i) {
                s[j] ^= 1;
                if j < stop {
                    if s[j] == 1 {
                        unsatisfied += 1;
                    } else {
                        unsatisfied -= 1;
                    }
                }
            }
        }
        for &i in &candidates {
            for &j in h.col(i) {
                for &k in h.row(j) {
                    e[k] = metric_of(h, &s, &w, k);
                }
            }
        }
        iterations += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stream::FrameStreams;

    fn toy() -> SparseParityCheck {
        SparseParityCheck::from_rows(4, vec![vec![0, 1, 2], vec![1, 2, 3]]).unwrap()
    }

    #[test]
    fn weights_are_row_minima() {
        let h = SparseParityCheck::from_rows(3, vec![vec![0, 1, 2]]).unwrap();
        assert_eq!(compute_weights(&h, &[0.9, 0.2, 0.8]).unwrap(), vec![0.2]);
        let h = toy();
        assert_eq!(compute_weights(&h, &[0.5; 4]).unwrap(), vec![0.5, 0.5]);
        let single = SparseParityCheck::from_rows(3, vec![vec![1], vec![]]).unwrap();
        assert_eq!(compute_weights(&single, &[0.1, 0.7, 0.3]).unwrap(), vec![0.7, 0.0]);
        assert!(compute_weights(&h, &[0.1]).is_err());
    }

    #[test]
    fn toy_syndrome() {
        let h = toy();
        assert_eq!(syndrome(&h, &[0, 1, 0, 0]).unwrap(), vec![1, 1]);
        assert_eq!(syndrome(&h, &[0; 4]).unwrap(), vec![0, 0]);
        assert!(syndrome(&h, &[0; 3]).is_err());
    }

    #[test]
    fn toy_metric_and_candidates() {
        let h = toy();
        let w = compute_weights(&h, &[0.9, 0.2, 0.8, 0.7]).unwrap();
        assert_eq!(w, vec![0.2, 0.2]);
        let e = flip_metric(&h, &[1, 1], &w).unwrap();
        assert_eq!(e, vec![0.2, 0.4, 0.4, 0.2]);
        assert_eq!(flip_candidates(&e), vec![1, 2]);
        let e0 = flip_metric(&h, &[0, 0], &w).unwrap();
        assert_eq!(e0, vec![-0.2, -0.4, -0.4, -0.2]);
        assert!(flip_metric(&h, &[0], &w).is_err());
    }

    #[test]
    fn candidate_sets() {
        assert_eq!(flip_candidates(&[0.1, -1.0, 0.0, 2.5]), vec![3]);
        assert_eq!(flip_candidates(&[1.5; 4]), vec![0, 1, 2, 3]);
    }

    #[test]
    fn toy_sbf_converges_in_one_flip() {
        let h = toy();
        let soft = [0.9, -0.2, 0.8, 0.7];
        let params = WbfParams {
            max_iterations: 10,
            mode: FlipMode::Single,
            stopping_rows: 2,
        };
        for seed in 0..20 {
            let mut rng = FrameStreams::derive(seed, 0).decoder;
            let out = decode_wbf(&h, &soft, &[0, 1, 0, 0], params, &mut rng).unwrap();
            assert!(out.converged);
            assert_eq!(out.iterations, 1);
            assert!(out.decision == [0, 0, 0, 0] || out.decision == [0, 1, 1, 0]);
        }
    }

    #[test]
    fn valid_start_takes_no_iterations() {
        let h = toy();
        let params = WbfParams {
            max_iterations: 5,
            mode: FlipMode::Multi,
            stopping_rows: 2,
        };
        let mut rng = FrameStreams::derive(0, 0).decoder;
        let out = decode_wbf(&h, &[1.0; 4], &[0; 4], params, &mut rng).unwrap();
        assert_eq!(out, DecodeOutcome { decision: vec![0; 4], iterations: 0, converged: true });
    }

    #[test]
    fn zero_cap_returns_initial() {
        let h = toy();
        let params = WbfParams {
            max_iterations: 0,
            mode: FlipMode::Single,
            stopping_rows: 2,
        };
        let mut rng = FrameStreams::derive(0, 0).decoder;
        let out = decode_wbf(&h, &[0.9, -0.2, 0.8, 0.7], &[0, 1, 0, 0], params, &mut rng).unwrap();
        assert!(!out.converged);
        assert_eq!(out.iterations, 0);
        assert_eq!(out.decision, vec![0, 1, 0, 0]);
    }

    #[test]
    fn multi_flip_flips_whole_tie_set() {
        let h = toy();
        let params = WbfParams {
            max_iterations: 1,
            mode: FlipMode::Multi,
            stopping_rows: 2,
        };
        let mut rng = FrameStreams::derive(0, 0).decoder;
        let out = decode_wbf(&h, &[0.9, -0.2, 0.8, 0.7], &[0, 1, 0, 0], params, &mut rng).unwrap();
        // F = {1, 2}: both flip, leaving y = (0, 0, 1, 0) with s = (1, 1).
        assert_eq!(out.decision, vec![0, 0, 1, 0]);
        assert!(!out.converged);
    }

    #[test]
    fn stopping_prefix_limits_checked_rows() {
        let h = toy();
        let params = WbfParams {
            max_iterations: 3,
            mode: FlipMode::Single,
            stopping_rows: 1,
        };
        let mut rng = FrameStreams::derive(0, 0).decoder;
        // Only row 1 is violated; a prefix of one row is already satisfied.
        let out = decode_wbf(&h, &[1.0; 4], &[0, 0, 0, 1], params, &mut rng).unwrap();
        assert!(out.converged);
        assert_eq!(out.iterations, 0);
        let bad = WbfParams { stopping_rows: 3, ..params };
        assert!(decode_wbf(&h, &[1.0; 4], &[0; 4], bad, &mut rng).is_err());
    }
}
