//! Sliding-window decoding of terminated SC-LDPC codes.
//!
//! Window `t` (1-based) covers block-rows `t-1 .. t-1+W` and block-columns
//! `t-1 .. t-1+W`, clipped to the matrix. Successive windows shift by one
//! block (`M r` rows, `M c` columns). A window-local bit is *complete* when
//! every check it participates in lies inside the window's row range and
//! *incomplete* otherwise.
//!
//! The reliability-based scheme combines two rules:
//!
//! * partial message reservation: only decisions of complete bits are handed
//!   to the next window, incomplete bits fall back to their channel hard
//!   decisions;
//! * partial syndrome check: a window stops as soon as its first
//!   `(W - m_s) M r` rows, which only involve complete bits, are satisfied.

use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::channel::ReceivedVector;
use crate::error::{Error, Result};
use crate::sparse::SparseParityCheck;
use crate::wbf::{decode_wbf, DecodeOutcome, FlipMode, WbfParams};

/// Block structure of a terminated coupled matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CouplingLayout {
    /// Termination length `L`.
    pub termination: usize,
    /// Syndrome former memory `m_s`.
    pub memory: usize,
    /// Rows per block-row, `M r`.
    pub block_rows: usize,
    /// Columns per block-column, `M c`.
    pub block_cols: usize,
}

impl CouplingLayout {
    /// Layout recorded by [`crate::protograph::lift`].
    pub fn of(h: &SparseParityCheck) -> Result<Self> {
        let p = h.provenance().ok_or_else(|| {
            Error::InvalidParameter("matrix carries no coupling provenance".into())
        })?;
        let layout = CouplingLayout {
            termination: p.termination,
            memory: p.memory,
            block_rows: p.base_rows * h.lifting_size(),
            block_cols: p.base_cols * h.lifting_size(),
        };
        layout.check(h)?;
        Ok(layout)
    }

    /// Checks that the layout tiles `h` exactly.
    pub fn check(&self, h: &SparseParityCheck) -> Result<()> {
        if self.n_rows() != h.n_rows() || self.n_cols() != h.n_cols() {
            return Err(Error::InvalidParameter(format!(
                "layout implies a {}x{} matrix, got {}x{}",
                self.n_rows(),
                self.n_cols(),
                h.n_rows(),
                h.n_cols()
            )));
        }
        Ok(())
    }

    pub fn n_rows(&self) -> usize {
        (self.termination + self.memory) * self.block_rows
    }

    pub fn n_cols(&self) -> usize {
        self.termination * self.block_cols
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WindowGeometry {
    /// Time index, `1..=L`.
    pub t: usize,
    /// Window size `W` in blocks.
    pub size: usize,
    pub rows: Range<usize>,
    pub cols: Range<usize>,
}

impl WindowGeometry {
    pub fn width(&self) -> usize {
        self.cols.len()
    }

    pub fn height(&self) -> usize {
        self.rows.len()
    }
}

pub fn window_geometry(layout: &CouplingLayout, size: usize, t: usize) -> Result<WindowGeometry> {
    if size <= layout.memory {
        return Err(Error::WindowTooSmall {
            window: size,
            memory: layout.memory,
        });
    }
    if t == 0 || t > layout.termination {
        return Err(Error::InvalidParameter(format!(
            "time index {t} outside 1..={}",
            layout.termination
        )));
    }
    let row_start = (t - 1) * layout.block_rows;
    let col_start = (t - 1) * layout.block_cols;
    Ok(WindowGeometry {
        t,
        size,
        rows: row_start..(row_start + size * layout.block_rows).min(layout.n_rows()),
        cols: col_start..(col_start + size * layout.block_cols).min(layout.n_cols()),
    })
}

/// Window-local indices of complete and incomplete bits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VnClassification {
    pub complete: Vec<usize>,
    pub incomplete: Vec<usize>,
}

impl VnClassification {
    pub fn width(&self) -> usize {
        self.complete.len() + self.incomplete.len()
    }

    pub fn is_complete_mask(&self) -> Vec<bool> {
        let mut mask = vec![false; self.width()];
        for &k in &self.complete {
            mask[k] = true;
        }
        mask
    }
}

pub fn classify_vns(h: &SparseParityCheck, geom: &WindowGeometry) -> VnClassification {
    let mut complete = Vec::new();
    let mut incomplete = Vec::new();
    for (k, i) in geom.cols.clone().enumerate() {
        let rows = h.col(i);
        let inside = match (rows.first(), rows.last()) {
            (Some(lo), Some(hi)) => *lo >= geom.rows.start && *hi < geom.rows.end,
            _ => true,
        };
        if inside {
            complete.push(k);
        } else {
            incomplete.push(k);
        }
    }
    VnClassification {
        complete,
        incomplete,
    }
}

/// Number of leading window rows checked by the partial syndrome check,
/// `(W - m_s) M r`.
pub fn psc_prefix(size: usize, memory: usize, lifting: usize, base_rows: usize) -> Result<usize> {
    if size <= memory {
        return Err(Error::WindowTooSmall {
            window: size,
            memory,
        });
    }
    Ok((size - memory) * lifting * base_rows)
}

/// Reserved messages for the next window: decoded bits on complete
/// positions, channel hard decisions on incomplete ones.
pub fn pmr(z: &[u8], v: &[u8], cls: &VnClassification) -> Result<Vec<u8>> {
    if z.len() != v.len() {
        return Err(Error::LengthMismatch {
            expected: z.len(),
            got: v.len(),
        });
    }
    if cls.width() != z.len() {
        return Err(Error::LengthMismatch {
            expected: cls.width(),
            got: z.len(),
        });
    }
    let mut u = v.to_vec();
    for &k in &cls.complete {
        u[k] = z[k];
    }
    Ok(u)
}

/// Initial decision vector of a window.
///
/// The first window starts from the hard decisions. Later windows take the
/// reserved vector of the previous window shifted left by `shift` (one
/// block-column) and fill the newly entered positions with hard decisions.
pub fn init_window(
    t: usize,
    reserved: Option<&[u8]>,
    hard: &[u8],
    shift: usize,
) -> Result<Vec<u8>> {
    if t <= 1 {
        return Ok(hard.to_vec());
    }
    let prev = reserved.ok_or_else(|| {
        Error::InvalidParameter(format!("window {t} needs the reserved vector of window {}", t - 1))
    })?;
    let carried = prev.len().saturating_sub(shift).min(hard.len());
    let mut y = Vec::with_capacity(hard.len());
    y.extend_from_slice(&prev[shift..shift + carried]);
    y.extend_from_slice(&hard[carried..]);
    Ok(y)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum WindowedVariant {
    /// Partial message reservation, partial syndrome check, single-bit flipping.
    Rbwd,
    /// Partial message reservation, all window rows checked, single-bit flipping.
    SbfPmr,
    /// Partial message reservation, all window rows checked, multi-bit flipping.
    MbfPmr,
    /// Plain windowed single-bit WBF: every window decision is carried over
    /// and all window rows are checked.
    SbfWbf,
}

impl WindowedVariant {
    pub const ALL: [WindowedVariant; 4] = [
        WindowedVariant::Rbwd,
        WindowedVariant::SbfPmr,
        WindowedVariant::MbfPmr,
        WindowedVariant::SbfWbf,
    ];

    pub fn flip_mode(self) -> FlipMode {
        match self {
            WindowedVariant::MbfPmr => FlipMode::Multi,
            _ => FlipMode::Single,
        }
    }

    pub fn uses_pmr(self) -> bool {
        !matches!(self, WindowedVariant::SbfWbf)
    }

    pub fn uses_psc(self) -> bool {
        matches!(self, WindowedVariant::Rbwd)
    }

    pub fn name(self) -> &'static str {
        match self {
            WindowedVariant::Rbwd => "rbwd",
            WindowedVariant::SbfPmr => "sbf-pmr",
            WindowedVariant::MbfPmr => "mbf-pmr",
            WindowedVariant::SbfWbf => "sbf-wbf",
        }
    }
}

impl fmt::Display for WindowedVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for WindowedVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        WindowedVariant::ALL
            .into_iter()
            .find(|v| v.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Config(format!("unknown windowed decoder variant '{s}'")))
    }
}

/// Precomputed data of one window position.
#[derive(Clone, Debug)]
pub struct WindowSlot {
    pub geometry: WindowGeometry,
    /// `H` restricted to the window's rows and columns.
    pub local: SparseParityCheck,
    pub classes: VnClassification,
    complete_mask: Vec<bool>,
    /// Rows checked by the partial syndrome check.
    pub psc_rows: usize,
    /// The window contains every remaining row and column of the matrix.
    pub terminal: bool,
}

impl WindowSlot {
    pub fn is_complete(&self, k: usize) -> bool {
        self.complete_mask[k]
    }

    /// Stopping prefix used by `variant` in this window.
    pub fn stopping_rows(&self, variant: WindowedVariant) -> usize {
        if variant.uses_psc() {
            self.psc_rows
        } else {
            self.local.n_rows()
        }
    }
}

/// What an observer sees after each window has been decoded.
#[derive(Debug)]
pub struct WindowReport<'a> {
    pub slot: &'a WindowSlot,
    /// Window decision `z_t`.
    pub decision: &'a [u8],
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WindowedOutcome {
    /// Committed decision for the whole codeword.
    pub decision: Vec<u8>,
    /// Iterations `I_t` for `t = 1..=L`; windows after the terminal one are 0.
    pub iterations: Vec<usize>,
    /// Number of windows actually decoded.
    pub windows_run: usize,
    /// Bits committed in total; always equals the code length.
    pub committed: usize,
}

/// Sliding-window decoder over a fixed matrix and window size.
///
/// Windows advance until one of them contains all remaining rows and
/// columns; that terminal window commits everything it holds. Every earlier
/// window commits its first block-column (the target symbols).
#[derive(Clone, Debug)]
pub struct WindowedDecoder {
    layout: CouplingLayout,
    size: usize,
    slots: Vec<WindowSlot>,
}

impl WindowedDecoder {
    pub fn new(h: &SparseParityCheck, layout: CouplingLayout, size: usize) -> Result<Self> {
        layout.check(h)?;
        let mut slots = Vec::new();
        for t in 1..=layout.termination {
            let geometry = window_geometry(&layout, size, t)?;
            let classes = classify_vns(h, &geometry);
            let local = h.submatrix(geometry.rows.clone(), geometry.cols.clone());
            let psc_rows = if classes.incomplete.is_empty() {
                local.n_rows()
            } else {
                (psc_prefix(size, layout.memory, 1, layout.block_rows)?).min(local.n_rows())
            };
            let terminal = geometry.rows.end == layout.n_rows() && geometry.cols.end == layout.n_cols();
            slots.push(WindowSlot {
                complete_mask: classes.is_complete_mask(),
                geometry,
                local,
                classes,
                psc_rows,
                terminal,
            });
            if terminal {
                break;
            }
        }
        Ok(WindowedDecoder {
            layout,
            size,
            slots,
        })
    }

    pub fn layout(&self) -> &CouplingLayout {
        &self.layout
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// Window positions that are decoded, in order.
    pub fn slots(&self) -> &[WindowSlot] {
        &self.slots
    }

    /// Decodes window `slot` from `initial` with the soft values of the whole codeword.
    pub fn decode_window<R: Rng + ?Sized>(
        &self,
        slot: &WindowSlot,
        soft: &[f64],
        initial: &[u8],
        variant: WindowedVariant,
        max_iterations: usize,
        rng: &mut R,
    ) -> Result<DecodeOutcome> {
        let params = WbfParams {
            max_iterations,
            mode: variant.flip_mode(),
            stopping_rows: slot.stopping_rows(variant),
        };
        decode_wbf(&slot.local, &soft[slot.geometry.cols.clone()], initial, params, rng)
    }

    pub fn decode<R: Rng + ?Sized>(
        &self,
        received: &ReceivedVector,
        variant: WindowedVariant,
        max_iterations: usize,
        rng: &mut R,
    ) -> Result<WindowedOutcome> {
        self.decode_observed(received, variant, max_iterations, rng, |_| {})
    }

    /// Like [`decode`](Self::decode), calling `observe` after every window.
    pub fn decode_observed<R, F>(
        &self,
        received: &ReceivedVector,
        variant: WindowedVariant,
        max_iterations: usize,
        rng: &mut R,
        mut observe: F,
    ) -> Result<WindowedOutcome>
    where
        R: Rng + ?Sized,
        F: FnMut(WindowReport<'_>),
    {
        let n = self.layout.n_cols();
        if received.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                got: received.len(),
            });
        }
        let soft = received.soft();
        let hard = received.hard();
        let shift = self.layout.block_cols;

        let mut decision = vec![0u8; n];
        let mut iterations = vec![0usize; self.layout.termination];
        let mut reserved: Option<Vec<u8>> = None;
        let mut committed = 0;

        for slot in &self.slots {
            let geom = &slot.geometry;
            let v = &hard[geom.cols.clone()];
            let y0 = init_window(geom.t, reserved.as_deref(), v, shift)?;
            let out = self.decode_window(slot, soft, &y0, variant, max_iterations, rng)?;
            iterations[geom.t - 1] = out.iterations;
            observe(WindowReport {
                slot,
                decision: &out.decision,
                iterations: out.iterations,
                converged: out.converged,
            });

            let commit = if slot.terminal { geom.width() } else { shift.min(geom.width()) };
            decision[geom.cols.start..geom.cols.start + commit]
                .copy_from_slice(&out.decision[..commit]);
            committed += commit;

            reserved = Some(if variant.uses_pmr() {
                pmr(&out.decision, v, &slot.classes)?
            } else {
                out.decision
            });
        }

        Ok(WindowedOutcome {
            decision,
            iterations,
            windows_run: self.slots.len(),
            committed,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::transmit_all_zero;
    use crate::protograph::ScCodeParams;
    use crate::stream::FrameStreams;

    fn code(j: u32, c: usize, l: usize, m: usize) -> SparseParityCheck {
        ScCodeParams {
            j,
            c,
            l,
            m,
            seed: 1,
            avoid_four_cycles: false,
        }
        .build()
        .unwrap()
    }

    #[test]
    fn layout_from_provenance() {
        let h = code(3, 2, 10, 8);
        let layout = CouplingLayout::of(&h).unwrap();
        assert_eq!(
            layout,
            CouplingLayout {
                termination: 10,
                memory: 2,
                block_rows: 8,
                block_cols: 16
            }
        );
        let plain = SparseParityCheck::from_rows(2, vec![vec![0, 1]]).unwrap();
        assert!(CouplingLayout::of(&plain).is_err());
    }

    #[test]
    fn geometry_of_three_block_window() {
        // m_s = 1, c = 3, M = 4: rows [M, 4M), cols [Mc, 4Mc) at t = 2.
        let layout = CouplingLayout {
            termination: 20,
            memory: 1,
            block_rows: 4,
            block_cols: 12,
        };
        let g = window_geometry(&layout, 3, 2).unwrap();
        assert_eq!(g.rows, 4..16);
        assert_eq!(g.cols, 12..48);
        let g1 = window_geometry(&layout, 3, 1).unwrap();
        assert_eq!((g1.rows.start, g1.cols.start), (0, 0));
        let last = window_geometry(&layout, 3, 20).unwrap();
        assert_eq!(last.rows, 76..84);
        assert_eq!(last.cols, 228..240);
        assert!(window_geometry(&layout, 1, 2).is_err());
        assert!(window_geometry(&layout, 3, 0).is_err());
        assert!(window_geometry(&layout, 3, 21).is_err());
    }

    #[test]
    fn classification_interior_and_final() {
        let h = code(2, 3, 8, 4);
        let layout = CouplingLayout::of(&h).unwrap();
        let g = window_geometry(&layout, 3, 2).unwrap();
        let cls = classify_vns(&h, &g);
        assert_eq!(cls.complete, (0..24).collect::<Vec<_>>());
        assert_eq!(cls.incomplete, (24..36).collect::<Vec<_>>());

        let last = window_geometry(&layout, 3, 8).unwrap();
        let cls = classify_vns(&h, &last);
        assert!(cls.incomplete.is_empty());
        assert_eq!(cls.complete.len(), last.width());

        let whole = window_geometry(&layout, 9, 1).unwrap();
        assert!(classify_vns(&h, &whole).incomplete.is_empty());
    }

    #[test]
    fn psc_prefix_values() {
        assert_eq!(psc_prefix(3, 1, 5, 1).unwrap(), 10);
        assert_eq!(psc_prefix(14, 6, 97, 1).unwrap(), 776);
        assert_eq!(psc_prefix(7, 6, 97, 1).unwrap(), 97);
        assert!(psc_prefix(6, 6, 97, 1).is_err());
    }

    #[test]
    fn pmr_branches() {
        let all = VnClassification {
            complete: vec![0, 1, 2],
            incomplete: vec![],
        };
        let none = VnClassification {
            complete: vec![],
            incomplete: vec![0, 1, 2],
        };
        let mixed = VnClassification {
            complete: vec![0, 1],
            incomplete: vec![2],
        };
        let z = [1, 0, 1];
        let v = [0, 1, 0];
        assert_eq!(pmr(&z, &v, &all).unwrap(), z);
        assert_eq!(pmr(&z, &v, &none).unwrap(), v);
        assert_eq!(pmr(&[1, 0, 1], &[0, 0, 0], &mixed).unwrap(), vec![1, 0, 0]);
        assert!(pmr(&z, &v[..2], &all).is_err());
    }

    #[test]
    fn init_shifts_reserved_vector() {
        // W = 3, Mc = 2: y[0..4) = u[2..6), y[4..6) = v[4..6).
        let u = [9, 9, 1, 2, 3, 4];
        let v = [0, 0, 0, 0, 7, 8];
        assert_eq!(init_window(1, None, &v, 2).unwrap(), v);
        assert_eq!(init_window(2, Some(&u), &v, 2).unwrap(), vec![1, 2, 3, 4, 7, 8]);
        // Truncated window: only two columns remain.
        assert_eq!(init_window(3, Some(&u), &[5, 6], 2).unwrap(), vec![1, 2]);
        assert!(init_window(2, None, &v, 2).is_err());
    }

    #[test]
    fn terminal_window_ends_the_schedule() {
        let h = code(3, 2, 10, 4);
        let layout = CouplingLayout::of(&h).unwrap();
        let dec = WindowedDecoder::new(&h, layout, 4).unwrap();
        // Rows reach m = 12 blocks at t = 9.
        assert_eq!(dec.slots().len(), 9);
        assert!(dec.slots().last().unwrap().terminal);
        assert!(dec.slots()[..8].iter().all(|s| !s.terminal));
        let whole = WindowedDecoder::new(&h, layout, 12).unwrap();
        assert_eq!(whole.slots().len(), 1);
        assert_eq!(whole.slots()[0].psc_rows, h.n_rows());
    }

    #[test]
    fn noiseless_decodes_to_zero_without_iterations() {
        let h = code(3, 2, 10, 4);
        let layout = CouplingLayout::of(&h).unwrap();
        let dec = WindowedDecoder::new(&h, layout, 4).unwrap();
        let mut s = FrameStreams::derive(0, 0);
        let rx = transmit_all_zero(h.n_cols(), 0.0, &mut s.channel);
        for variant in WindowedVariant::ALL {
            let out = dec.decode(&rx, variant, 50, &mut s.decoder).unwrap();
            assert!(out.decision.iter().all(|&b| b == 0));
            assert_eq!(out.iterations.iter().sum::<usize>(), 0);
            assert_eq!(out.committed, h.n_cols());
        }
    }

    #[test]
    fn variant_names_round_trip() {
        for v in WindowedVariant::ALL {
            assert_eq!(v.name().parse::<WindowedVariant>().unwrap(), v);
        }
        assert!("spa".parse::<WindowedVariant>().is_err());
    }
}
