//! Monte-Carlo error-rate simulation.
//!
//! Frame `k` of every operating point draws its noise and its tie-breaking
//! from [`FrameStreams::derive`]`(seed, k)`. Frames are decoded in parallel in
//! fixed-order chunks and merged sequentially, and a point stops at the exact
//! frame that reaches the frame-error budget, so results do not depend on the
//! number of workers.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{transmit_all_zero, ChannelParams, ReceivedVector};
use crate::error::{Error, Result};
use crate::protograph::ScCodeParams;
use crate::sparse::SparseParityCheck;
use crate::stream::FrameStreams;
use crate::wbf::{decode_wbf, FlipMode, WbfParams};
use crate::window::{CouplingLayout, WindowedDecoder, WindowedVariant};

pub const DEFAULT_WINDOWED_ITERATIONS: usize = 200;
pub const DEFAULT_FULL_BLOCK_ITERATIONS: usize = 2000;

/// Decoder under test.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Variant {
    /// Single-bit WBF over the full matrix.
    Fbd,
    Windowed(WindowedVariant),
}

impl Variant {
    pub const ALL: [Variant; 5] = [
        Variant::Windowed(WindowedVariant::Rbwd),
        Variant::Windowed(WindowedVariant::SbfPmr),
        Variant::Windowed(WindowedVariant::MbfPmr),
        Variant::Windowed(WindowedVariant::SbfWbf),
        Variant::Fbd,
    ];

    pub const RBWD: Variant = Variant::Windowed(WindowedVariant::Rbwd);
    pub const SBF_PMR: Variant = Variant::Windowed(WindowedVariant::SbfPmr);
    pub const MBF_PMR: Variant = Variant::Windowed(WindowedVariant::MbfPmr);
    pub const SBF_WBF: Variant = Variant::Windowed(WindowedVariant::SbfWbf);

    pub fn name(self) -> &'static str {
        match self {
            Variant::Fbd => "fbd",
            Variant::Windowed(w) => w.name(),
        }
    }

    pub fn default_iterations(self) -> usize {
        match self {
            Variant::Fbd => DEFAULT_FULL_BLOCK_ITERATIONS,
            Variant::Windowed(_) => DEFAULT_WINDOWED_ITERATIONS,
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.eq_ignore_ascii_case("fbd") {
            Ok(Variant::Fbd)
        } else {
            s.parse().map(Variant::Windowed)
        }
    }
}

impl TryFrom<String> for Variant {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Variant> for String {
    fn from(v: Variant) -> String {
        v.name().to_string()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecoderConfig {
    pub variant: Variant,
    /// Window size `W` in block-columns; ignored by full-block decoding.
    pub window: usize,
    /// Iteration cap; defaults to 200 for windowed decoders and 2000 for FBD.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_iterations: Option<usize>,
    /// Iteration cap used for FBD when it runs alongside windowed variants.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fbd_max_iterations: Option<usize>,
}

impl DecoderConfig {
    pub fn iterations_for(&self, variant: Variant) -> usize {
        match variant {
            Variant::Fbd => self
                .fbd_max_iterations
                .or(if self.variant == Variant::Fbd { self.max_iterations } else { None })
                .unwrap_or(DEFAULT_FULL_BLOCK_ITERATIONS),
            Variant::Windowed(_) => self.max_iterations.unwrap_or(DEFAULT_WINDOWED_ITERATIONS),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub ebno_db: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StopConfig {
    #[serde(default = "default_max_frames")]
    pub max_frames: u64,
    #[serde(default = "default_max_frame_errors")]
    pub max_frame_errors: u64,
    /// Optional wall-clock budget per point. Results are only reproducible
    /// when this limit is not the one that ends a point.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_seconds: Option<f64>,
}

fn default_max_frames() -> u64 {
    10_000_000
}

fn default_max_frame_errors() -> u64 {
    100
}

impl Default for StopConfig {
    fn default() -> Self {
        StopConfig {
            max_frames: default_max_frames(),
            max_frame_errors: default_max_frame_errors(),
            max_seconds: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    pub code: ScCodeParams,
    pub decoder: DecoderConfig,
    pub sweep: SweepConfig,
    #[serde(default)]
    pub stopping: StopConfig,
    /// Master seed of the per-frame streams.
    #[serde(default)]
    pub seed: u64,
    /// Worker threads; 0 uses all available cores.
    #[serde(default)]
    pub workers: usize,
    #[serde(default = "default_out")]
    pub out: PathBuf,
}

fn default_out() -> PathBuf {
    PathBuf::from("results")
}

impl SimConfig {
    /// Reads a TOML configuration, or JSON when the extension is `.json`
    /// (which accepts the sidecar written next to results).
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let is_json = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"));
        if is_json {
            let value: serde_json::Value = serde_json::from_str(&text)
                .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
            // A results sidecar nests the configuration under "config".
            let value = match value.get("config") {
                Some(inner) => inner.clone(),
                None => value,
            };
            serde_json::from_value(value)
                .map_err(|e| Error::Config(format!("{}: {e}", path.display())))
        } else {
            toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
        }
    }

    /// Checks the configuration for `variants` before any frame is run.
    pub fn validate(&self, variants: &[Variant]) -> Result<()> {
        let c = &self.code;
        if c.j == 0 || c.c == 0 || c.l == 0 || c.m == 0 {
            return Err(Error::Config("code parameters J, c, L and M must be positive".into()));
        }
        if self.sweep.ebno_db.is_empty() {
            return Err(Error::Config("sweep.ebno_db is empty".into()));
        }
        if let Some(x) = self.sweep.ebno_db.iter().find(|x| !x.is_finite()) {
            return Err(Error::Config(format!("sweep point {x} is not finite")));
        }
        if self.stopping.max_frames == 0 || self.stopping.max_frame_errors == 0 {
            return Err(Error::Config("stopping limits must be positive".into()));
        }
        if variants.is_empty() {
            return Err(Error::Config("no decoder variant selected".into()));
        }
        for &v in variants {
            if self.decoder.iterations_for(v) == 0 {
                return Err(Error::Config(format!("{v}: max_iterations must be at least 1")));
            }
            if matches!(v, Variant::Windowed(_)) && self.decoder.window <= c.memory() {
                return Err(Error::Config(format!(
                    "{v}: window size W = {} must exceed m_s = {}",
                    self.decoder.window,
                    c.memory()
                )));
            }
        }
        Ok(())
    }
}

/// Complete/incomplete error counters of one window position.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PositionCounts {
    pub complete_errors: u64,
    pub complete_bits: u64,
    pub incomplete_errors: u64,
    pub incomplete_bits: u64,
}

impl PositionCounts {
    pub fn complete_ber(&self) -> f64 {
        self.complete_errors as f64 / self.complete_bits as f64
    }

    pub fn incomplete_ber(&self) -> f64 {
        self.incomplete_errors as f64 / self.incomplete_bits as f64
    }

    fn merge(&mut self, other: &PositionCounts) {
        self.complete_errors += other.complete_errors;
        self.complete_bits += other.complete_bits;
        self.incomplete_errors += other.incomplete_errors;
        self.incomplete_bits += other.incomplete_bits;
    }
}

/// Outcome of one decoded frame.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrameResult {
    pub bit_errors: u64,
    /// Per-window iteration counts `I_t` (a single entry for FBD).
    pub iterations: Vec<usize>,
    pub positions: Vec<PositionCounts>,
}

/// Accumulated statistics of one (variant, E_b/N_0) point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointStats {
    pub variant: Variant,
    pub ebno_db: f64,
    pub sigma: f64,
    pub n: usize,
    pub frames: u64,
    pub bit_errors: u64,
    pub frame_errors: u64,
    /// Sum over frames of `I_t` for each window position.
    pub iteration_totals: Vec<u64>,
    /// Per window position; empty for full-block decoding.
    pub positions: Vec<PositionCounts>,
}

impl PointStats {
    fn empty(variant: Variant, ebno_db: f64, sigma: f64, n: usize, slots: usize, positions: usize) -> Self {
        PointStats {
            variant,
            ebno_db,
            sigma,
            n,
            frames: 0,
            bit_errors: 0,
            frame_errors: 0,
            iteration_totals: vec![0; slots],
            positions: vec![PositionCounts::default(); positions],
        }
    }

    pub fn ber(&self) -> f64 {
        self.bit_errors as f64 / (self.frames as f64 * self.n as f64)
    }

    pub fn fer(&self) -> f64 {
        self.frame_errors as f64 / self.frames as f64
    }

    /// Average number of updates per position: the frame-averaged `I_t`
    /// summed over positions and divided by `L`. Full-block decoding has a
    /// single position, so this is its mean iteration count.
    pub fn i_avg(&self) -> f64 {
        let means: Vec<f64> = self
            .iteration_totals
            .iter()
            .map(|&total| total as f64 / self.frames as f64)
            .collect();
        i_avg(&means).unwrap_or(f64::NAN)
    }

    pub fn absorb(&mut self, frame: &FrameResult) {
        self.frames += 1;
        self.bit_errors += frame.bit_errors;
        self.frame_errors += u64::from(frame.bit_errors > 0);
        for (acc, &it) in self.iteration_totals.iter_mut().zip(&frame.iterations) {
            *acc += it as u64;
        }
        for (acc, p) in self.positions.iter_mut().zip(&frame.positions) {
            acc.merge(p);
        }
    }
}

/// Mean of per-position iteration counts, `(sum_t I_t) / L`.
pub fn i_avg(per_position: &[f64]) -> Result<f64> {
    if per_position.is_empty() {
        return Err(Error::InvalidParameter("no window positions".into()));
    }
    Ok(per_position.iter().sum::<f64>() / per_position.len() as f64)
}

/// A code together with the decoders needed for a configuration.
#[derive(Debug)]
pub struct Simulator {
    config: SimConfig,
    h: SparseParityCheck,
    windowed: Option<WindowedDecoder>,
    pool: rayon::ThreadPool,
}

impl Simulator {
    pub fn new(config: SimConfig) -> Result<Self> {
        let variants = [config.decoder.variant];
        config.validate(&variants)?;
        let h = config.code.build()?;
        Self::with_matrix(config, h)
    }

    /// Uses an already built matrix, e.g. one read from an alist file with
    /// provenance restored.
    pub fn with_matrix(config: SimConfig, h: SparseParityCheck) -> Result<Self> {
        let layout = CouplingLayout::of(&h)?;
        let windowed = if config.decoder.window > layout.memory {
            Some(WindowedDecoder::new(&h, layout, config.decoder.window)?)
        } else {
            None
        };
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(config.workers)
            .build()
            .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
        Ok(Simulator {
            config,
            h,
            windowed,
            pool,
        })
    }

    pub fn config(&self) -> &SimConfig {
        &self.config
    }

    pub fn matrix(&self) -> &SparseParityCheck {
        &self.h
    }

    pub fn windowed(&self) -> Option<&WindowedDecoder> {
        self.windowed.as_ref()
    }

    pub fn rate(&self) -> f64 {
        self.h.design_rate()
    }

    fn windowed_decoder(&self, variant: Variant) -> Result<&WindowedDecoder> {
        self.windowed.as_ref().ok_or_else(|| {
            Error::Config(format!(
                "{variant}: window size W = {} must exceed m_s",
                self.config.decoder.window
            ))
        })
    }

    /// Decodes one received frame and counts errors against the all-zero word.
    pub fn decode_frame(
        &self,
        variant: Variant,
        received: &ReceivedVector,
        rng: &mut crate::stream::Stream,
    ) -> Result<FrameResult> {
        let max_iterations = self.config.decoder.iterations_for(variant);
        match variant {
            Variant::Fbd => {
                let params = WbfParams {
                    max_iterations,
                    mode: FlipMode::Single,
                    stopping_rows: self.h.n_rows(),
                };
                let out = decode_wbf(&self.h, received.soft(), received.hard(), params, rng)?;
                Ok(FrameResult {
                    bit_errors: count_ones(&out.decision),
                    iterations: vec![out.iterations],
                    positions: Vec::new(),
                })
            }
            Variant::Windowed(w) => {
                let dec = self.windowed_decoder(variant)?;
                let mut positions = vec![PositionCounts::default(); dec.layout().termination];
                let out = dec.decode_observed(received, w, max_iterations, rng, |report| {
                    let p = &mut positions[report.slot.geometry.t - 1];
                    for (k, &bit) in report.decision.iter().enumerate() {
                        if report.slot.is_complete(k) {
                            p.complete_bits += 1;
                            p.complete_errors += u64::from(bit);
                        } else {
                            p.incomplete_bits += 1;
                            p.incomplete_errors += u64::from(bit);
                        }
                    }
                })?;
                debug_assert_eq!(out.committed, self.h.n_cols());
                Ok(FrameResult {
                    bit_errors: count_ones(&out.decision),
                    iterations: out.iterations,
                    positions,
                })
            }
        }
    }

    /// Runs frame `index` at noise level `sigma`.
    pub fn run_frame(&self, variant: Variant, sigma: f64, index: u64) -> Result<FrameResult> {
        let mut streams = FrameStreams::derive(self.config.seed, index);
        let rx = transmit_all_zero(self.h.n_cols(), sigma, &mut streams.channel);
        self.decode_frame(variant, &rx, &mut streams.decoder)
    }

    /// Simulates one operating point until a stopping condition is met.
    pub fn run_point(&self, variant: Variant, ebno_db: f64) -> Result<PointStats> {
        let params = ChannelParams::new(ebno_db, self.rate())?;
        self.run_point_sigma(variant, ebno_db, params.sigma)
    }

    /// Like [`run_point`](Self::run_point) with an explicit noise level.
    pub fn run_point_sigma(&self, variant: Variant, ebno_db: f64, sigma: f64) -> Result<PointStats> {
        let (slots, positions) = match variant {
            Variant::Fbd => (1, 0),
            Variant::Windowed(_) => {
                self.windowed_decoder(variant)?;
                let l = self.config.code.l;
                (l, l)
            }
        };
        let mut stats = PointStats::empty(variant, ebno_db, sigma, self.h.n_cols(), slots, positions);
        let stop = &self.config.stopping;
        let chunk = (self.pool.current_num_threads() as u64 * 8).max(8);
        let started = Instant::now();
        let budget = stop.max_seconds.map(Duration::from_secs_f64);

        let mut next = 0u64;
        while stats.frames < stop.max_frames && stats.frame_errors < stop.max_frame_errors {
            if budget.is_some_and(|b| started.elapsed() >= b) {
                break;
            }
            let end = (next + chunk).min(stop.max_frames);
            let results: Vec<Result<FrameResult>> = self.pool.install(|| {
                (next..end)
                    .into_par_iter()
                    .map(|k| self.run_frame(variant, sigma, k))
                    .collect()
            });
            for r in results {
                stats.absorb(&r?);
                if stats.frame_errors >= stop.max_frame_errors {
                    break;
                }
            }
            next = end;
        }
        Ok(stats)
    }

    /// Runs every sweep point for each variant in turn.
    pub fn sweep(&self, variants: &[Variant]) -> Result<Vec<PointStats>> {
        self.config.validate(variants)?;
        let mut all = Vec::new();
        for &v in variants {
            for &ebno in &self.config.sweep.ebno_db {
                all.push(self.run_point(v, ebno)?);
            }
        }
        Ok(all)
    }
}

fn count_ones(bits: &[u8]) -> u64 {
    bits.iter().map(|&b| u64::from(b)).sum()
}
