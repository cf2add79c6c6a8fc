//! BPSK over AWGN with the all-zero codeword.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Noise standard deviation for a given `E_b/N_0` (dB) and code rate:
/// `sigma^2 = 1 / (2 R 10^(EbN0/10))`.
pub fn ebno_to_sigma(ebno_db: f64, rate: f64) -> Result<f64> {
    check_rate(rate)?;
    Ok((1.0 / (2.0 * rate * 10f64.powf(ebno_db / 10.0))).sqrt())
}

/// Inverse of [`ebno_to_sigma`].
pub fn sigma_to_ebno(sigma: f64, rate: f64) -> Result<f64> {
    check_rate(rate)?;
    if sigma.is_nan() || sigma <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "sigma must be positive, got {sigma}"
        )));
    }
    Ok(10.0 * (1.0 / (2.0 * rate * sigma * sigma)).log10())
}

fn check_rate(rate: f64) -> Result<()> {
    if rate > 0.0 && rate < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "code rate must lie in (0, 1), got {rate}"
        )))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChannelParams {
    pub ebno_db: f64,
    pub rate: f64,
    pub sigma: f64,
}

impl ChannelParams {
    pub fn new(ebno_db: f64, rate: f64) -> Result<Self> {
        Ok(ChannelParams {
            ebno_db,
            rate,
            sigma: ebno_to_sigma(ebno_db, rate)?,
        })
    }
}

/// Soft channel outputs and their hard decisions.
#[derive(Clone, Debug, PartialEq)]
pub struct ReceivedVector {
    soft: Vec<f64>,
    hard: Vec<u8>,
}

impl ReceivedVector {
    pub fn from_soft(soft: Vec<f64>) -> Self {
        let hard = hard_decision(&soft);
        ReceivedVector { soft, hard }
    }

    pub fn soft(&self) -> &[f64] {
        &self.soft
    }

    pub fn hard(&self) -> &[u8] {
        &self.hard
    }

    pub fn len(&self) -> usize {
        self.soft.len()
    }

    pub fn is_empty(&self) -> bool {
        self.soft.is_empty()
    }
}

/// `v_i = 0` when `r_i > 0`, otherwise `1` (zero maps to 1).
pub fn hard_decision(soft: &[f64]) -> Vec<u8> {
    soft.iter().map(|&r| u8::from(r.is_nan() || r <= 0.0)).collect()
}

/// Transmits `n` zeros as `+1` symbols and adds `sigma`-scaled Gaussian noise
/// drawn from `rng`.
pub fn transmit_all_zero<R: Rng + ?Sized>(n: usize, sigma: f64, rng: &mut R) -> ReceivedVector {
    let soft = (0..n)
        .map(|_| {
            let g: f64 = rng.sample(StandardNormal);
            1.0 + sigma * g
        })
        .collect();
    ReceivedVector::from_soft(soft)
}
