//! Protograph-based construction of terminated spatially-coupled LDPC codes.
//!
//! The pipeline is `Protograph` → [`edge_spread_full`] → [`couple`] → [`lift`].
//! Only full edge spreading of a single-row `(J, cJ)`-regular protograph is
//! supported, which always yields a 0/1 coupled base matrix.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sparse::{Provenance, SparseParityCheck};

/// Small integer base matrix; entries are edge multiplicities.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Protograph {
    rows: usize,
    cols: usize,
    entries: Vec<u32>,
}

impl Protograph {
    /// `entries` is row-major and must hold `rows * cols` values.
    pub fn new(rows: usize, cols: usize, entries: Vec<u32>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Protograph("dimensions must be positive".into()));
        }
        if entries.len() != rows * cols {
            return Err(Error::LengthMismatch {
                expected: rows * cols,
                got: entries.len(),
            });
        }
        Ok(Protograph {
            rows,
            cols,
            entries,
        })
    }

    /// The `1 × c` base matrix `[J J ... J]` of a `(J, cJ)`-regular code.
    pub fn regular(column_weight: u32, cols: usize) -> Result<Self> {
        if column_weight == 0 {
            return Err(Error::Protograph("column weight must be positive".into()));
        }
        Protograph::new(1, cols, vec![column_weight; cols])
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> u32 {
        self.entries[row * self.cols + col]
    }

    pub fn entries(&self) -> &[u32] {
        &self.entries
    }

    pub fn row_sums(&self) -> Vec<u32> {
        self.entries.chunks(self.cols).map(|r| r.iter().sum()).collect()
    }

    pub fn column_sums(&self) -> Vec<u32> {
        (0..self.cols)
            .map(|c| (0..self.rows).map(|r| self.get(r, c)).sum())
            .collect()
    }
}

/// Descendants `B_0, ..., B_{m_s}` of a protograph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeSpreading {
    descendants: Vec<Protograph>,
}

impl EdgeSpreading {
    pub fn descendants(&self) -> &[Protograph] {
        &self.descendants
    }

    /// Syndrome former memory `m_s`.
    pub fn memory(&self) -> usize {
        self.descendants.len() - 1
    }

    pub fn rows(&self) -> usize {
        self.descendants[0].rows
    }

    pub fn cols(&self) -> usize {
        self.descendants[0].cols
    }

    /// Element-wise sum of the descendants.
    pub fn sum(&self) -> Protograph {
        let first = &self.descendants[0];
        let mut entries = vec![0u32; first.entries.len()];
        for d in &self.descendants {
            for (acc, &e) in entries.iter_mut().zip(&d.entries) {
                *acc += e;
            }
        }
        Protograph {
            rows: first.rows,
            cols: first.cols,
            entries,
        }
    }
}

/// Full edge spreading: `m_s + 1` all-ones descendants of a `1 × c` base
/// whose entries all equal `m_s + 1`.
pub fn edge_spread_full(proto: &Protograph, memory: usize) -> Result<EdgeSpreading> {
    if proto.rows != 1 {
        return Err(Error::Protograph(format!(
            "full edge spreading is defined for single-row protographs, got {} rows",
            proto.rows
        )));
    }
    let expected = memory as u32 + 1;
    if let Some(&found) = proto.entries.iter().find(|&&e| e != expected) {
        return Err(Error::NotFullySpreadable { expected, found });
    }
    let ones = Protograph::new(1, proto.cols, vec![1; proto.cols])?;
    Ok(EdgeSpreading {
        descendants: vec![ones; memory + 1],
    })
}

/// Banded coupled base matrix of a terminated SC code.
///
/// Block `(i, t)` (block-row `i`, block-column `t`) holds `B_{i-t}` when
/// `0 <= i - t <= m_s` and zeros otherwise.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoupledBase {
    block_rows: usize,
    block_cols: usize,
    memory: usize,
    termination: usize,
    n_rows: usize,
    n_cols: usize,
    entries: Vec<u32>,
}

impl CoupledBase {
    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn get(&self, row: usize, col: usize) -> u32 {
        self.entries[row * self.n_cols + col]
    }

    pub fn memory(&self) -> usize {
        self.memory
    }

    pub fn termination(&self) -> usize {
        self.termination
    }

    /// Shape `(r, c)` of each descendant block.
    pub fn block_shape(&self) -> (usize, usize) {
        (self.block_rows, self.block_cols)
    }

    pub fn row_sums(&self) -> Vec<u32> {
        self.entries
            .chunks(self.n_cols)
            .map(|r| r.iter().sum())
            .collect()
    }

    pub fn column_sums(&self) -> Vec<u32> {
        (0..self.n_cols)
            .map(|c| (0..self.n_rows).map(|r| self.get(r, c)).sum())
            .collect()
    }

    pub fn ones(&self) -> usize {
        self.entries.iter().map(|&e| e as usize).sum()
    }
}

/// Assembles the coupled base matrix for termination length `L`.
pub fn couple(spread: &EdgeSpreading, termination: usize) -> Result<CoupledBase> {
    if termination == 0 {
        return Err(Error::InvalidParameter(
            "termination length L must be at least 1".into(),
        ));
    }
    let (r, c) = (spread.rows(), spread.cols());
    let memory = spread.memory();
    let n_rows = (termination + memory) * r;
    let n_cols = termination * c;
    let mut entries = vec![0u32; n_rows * n_cols];
    for t in 0..termination {
        for (k, block) in spread.descendants.iter().enumerate() {
            let i = t + k;
            for br in 0..r {
                for bc in 0..c {
                    entries[(i * r + br) * n_cols + t * c + bc] = block.get(br, bc);
                }
            }
        }
    }
    Ok(CoupledBase {
        block_rows: r,
        block_cols: c,
        memory,
        termination,
        n_rows,
        n_cols,
        entries,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LiftOptions {
    /// Redraw a circulant shift when it closes a length-4 cycle with
    /// previously assigned shifts.
    pub avoid_four_cycles: bool,
    /// Redraws per entry before the last draw is accepted as is.
    pub max_attempts: u32,
}

impl Default for LiftOptions {
    fn default() -> Self {
        LiftOptions {
            avoid_four_cycles: false,
            max_attempts: 64,
        }
    }
}

/// Replaces each 1-entry of `base` by an `M × M` circulant permutation
/// matrix with a shift drawn from a ChaCha8 stream seeded with `seed`.
pub fn lift(base: &CoupledBase, lifting: usize, seed: u64) -> Result<SparseParityCheck> {
    lift_with(base, lifting, seed, LiftOptions::default())
}

pub fn lift_with(
    base: &CoupledBase,
    lifting: usize,
    seed: u64,
    opts: LiftOptions,
) -> Result<SparseParityCheck> {
    if lifting == 0 {
        return Err(Error::InvalidParameter(
            "lifting size M must be at least 1".into(),
        ));
    }
    if let Some(&e) = base.entries.iter().find(|&&e| e > 1) {
        return Err(Error::MultiEdge(e));
    }

    let shifts = draw_shifts(base, lifting, seed, opts);

    let m = lifting;
    let mut rows: Vec<Vec<usize>> = vec![Vec::new(); base.n_rows * m];
    for a in 0..base.n_rows {
        for b in 0..base.n_cols {
            if let Some(s) = shifts[a * base.n_cols + b] {
                // Row x of the block has its one at column (x + s) mod M.
                for x in 0..m {
                    rows[a * m + x].push(b * m + (x + s) % m);
                }
            }
        }
    }
    let provenance = Provenance {
        termination: base.termination,
        memory: base.memory,
        base_rows: base.block_rows,
        base_cols: base.block_cols,
        seed,
    };
    Ok(SparseParityCheck::from_rows(base.n_cols * m, rows)?.with_lifting(m, Some(provenance)))
}

fn draw_shifts(
    base: &CoupledBase,
    lifting: usize,
    seed: u64,
    opts: LiftOptions,
) -> Vec<Option<usize>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (nr, nc) = (base.n_rows, base.n_cols);
    let mut shifts: Vec<Option<usize>> = vec![None; nr * nc];
    let m = lifting as u64;
    for a in 0..nr {
        for b in 0..nc {
            if base.get(a, b) == 0 {
                continue;
            }
            let mut s = rng.gen_range(0..m) as usize;
            if opts.avoid_four_cycles && lifting > 1 {
                let mut attempt = 1;
                while attempt < opts.max_attempts && closes_four_cycle(&shifts, nc, lifting, a, b, s)
                {
                    s = rng.gen_range(0..m) as usize;
                    attempt += 1;
                }
            }
            shifts[a * nc + b] = Some(s);
        }
    }
    shifts
}

/// A 4-cycle through block rows `a, a2` and block columns `b, b2` exists iff
/// `s(a,b) - s(a,b2) + s(a2,b2) - s(a2,b) = 0 (mod M)`.
fn closes_four_cycle(
    shifts: &[Option<usize>],
    nc: usize,
    lifting: usize,
    a: usize,
    b: usize,
    s: usize,
) -> bool {
    let at = |r: usize, c: usize| shifts[r * nc + c];
    for a2 in 0..a {
        let Some(s_a2_b) = at(a2, b) else { continue };
        for b2 in 0..nc {
            if b2 == b {
                continue;
            }
            if let (Some(s_a_b2), Some(s_a2_b2)) = (at(a, b2), at(a2, b2)) {
                let sum = (s + lifting - s_a_b2 + s_a2_b2 + lifting - s_a2_b) % lifting;
                if sum == 0 {
                    return true;
                }
            }
        }
    }
    false
}

/// Parameters of a terminated SC-LDPC code built from a `(J, cJ)`-regular
/// single-row protograph with full edge spreading (`m_s = J - 1`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScCodeParams {
    /// Column weight `J` of the protograph.
    #[serde(rename = "J")]
    pub j: u32,
    /// Number of protograph columns `c`.
    pub c: usize,
    /// Termination length `L`.
    #[serde(rename = "L")]
    pub l: usize,
    /// Lifting size `M`.
    #[serde(rename = "M")]
    pub m: usize,
    pub seed: u64,
    #[serde(default)]
    pub avoid_four_cycles: bool,
}

impl ScCodeParams {
    pub fn memory(&self) -> usize {
        self.j.saturating_sub(1) as usize
    }

    pub fn build(&self) -> Result<SparseParityCheck> {
        let proto = Protograph::regular(self.j, self.c)?;
        let spread = edge_spread_full(&proto, self.memory())?;
        let base = couple(&spread, self.l)?;
        let opts = LiftOptions {
            avoid_four_cycles: self.avoid_four_cycles,
            ..LiftOptions::default()
        };
        lift_with(&base, self.m, self.seed, opts)
    }
}
