use std::iter::{FusedIterator, Peekable};

use rand_chacha::ChaCha8Rng;
use rand_core::RngCore;
use serde::{Deserialize, Serialize};

use super::psi::PsiTable;
use crate::error::{param, Result};
use crate::rng::{bernoulli_threshold, rng_from_seed};

/// Streams refuse limits above `2^63`.
pub const MAX_LIMIT: u64 = 1 << 63;

/// Everything that defines one realization of the random sequence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeqParams {
    /// Block length `lambda`.
    pub lambda: u64,
    /// Selection probability `p`.
    pub p: f64,
    pub seed: u64,
    /// Largest value a stream may emit.
    pub limit: u64,
}

impl SeqParams {
    pub fn new(lambda: u64, p: f64, seed: u64, limit: u64) -> Self {
        Self {
            lambda,
            p,
            seed,
            limit,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.lambda == 0 {
            return param("lambda must be at least 1");
        }
        if !(0.0..=1.0).contains(&self.p) {
            return param(format!("p must lie in [0, 1], got {}", self.p));
        }
        if self.limit > MAX_LIMIT {
            return param(format!("limit {} exceeds 2^63", self.limit));
        }
        Ok(())
    }
}

/// The i.i.d. Bernoulli(p) selection variables `xi_1, xi_2, ...`.
///
/// One 64-bit draw per block index, consumed in increasing index order;
/// `xi_k = 1` iff the draw is below `floor(p * 2^64)`.
#[derive(Debug, Clone)]
pub struct SelectionStream {
    rng: ChaCha8Rng,
    threshold: u128,
    next_index: u128,
}

impl SelectionStream {
    pub fn new(p: f64, seed: u64) -> Self {
        Self {
            rng: rng_from_seed(seed),
            threshold: bernoulli_threshold(p),
            next_index: 1,
        }
    }

    pub fn from_params(params: &SeqParams) -> Self {
        Self::new(params.p, params.seed)
    }

    /// Index `k` of the variable the next call to [`next_xi`](Self::next_xi)
    /// returns.
    pub fn cursor(&self) -> u128 {
        self.next_index
    }

    #[inline]
    pub fn next_xi(&mut self) -> bool {
        self.next_index += 1;
        (self.rng.next_u64() as u128) < self.threshold
    }
}

impl Iterator for SelectionStream {
    type Item = bool;

    fn next(&mut self) -> Option<bool> {
        Some(self.next_xi())
    }
}

/// `(m_k)`: the union of all selected `S_k`, in increasing order.
///
/// Walks the construction row by row: at level `r`, row `nu` consists of the
/// `r` interlaced blocks `Psi(r-1) + nu*r + 1 ..= Psi(r-1) + (nu+1)*r`, which
/// together cover `lambda*r` consecutive integers. Offset `t` of a row belongs
/// to the block with `rho = ((t - 1) mod r) + 1`.
#[derive(Debug, Clone)]
pub struct MStream {
    selection: SelectionStream,
    table: PsiTable,
    lambda: u128,
    limit: u128,
    r: u32,
    nu: u128,
    row_base: u128,
    row_len: u128,
    // bit rho-1 is set when block rho of the current row is selected
    mask: u32,
    offset: u128,
    residue: u32,
    done: bool,
}

pub fn generate_m(params: &SeqParams, table: &PsiTable) -> Result<MStream> {
    params.validate()?;
    MStream::new(params, params.limit, table)
}

impl MStream {
    fn new(params: &SeqParams, limit: u64, table: &PsiTable) -> Result<Self> {
        let lambda = params.lambda as u128;
        let capacity = table.max_index().checked_mul(lambda);
        if capacity.is_none_or(|c| (limit as u128) > c) {
            return param(format!(
                "limit {limit} exceeds the table capacity lambda*Psi({})",
                table.max_r()
            ));
        }
        let mut stream = Self {
            selection: SelectionStream::from_params(params),
            table: table.clone(),
            lambda,
            limit: limit as u128,
            r: 1,
            nu: 0,
            row_base: 0,
            row_len: lambda,
            mask: 0,
            offset: 1,
            residue: 0,
            done: false,
        };
        stream.draw_row();
        Ok(stream)
    }

    /// Number of selection variables drawn so far.
    pub fn blocks_drawn(&self) -> u128 {
        self.selection.cursor() - 1
    }

    fn draw_row(&mut self) {
        self.mask = 0;
        for rho in 0..self.r {
            if self.selection.next_xi() {
                self.mask |= 1 << rho;
            }
        }
        self.offset = 1;
        self.residue = 0;
    }

    fn advance_row(&mut self) {
        self.row_base += self.row_len;
        if self.row_base >= self.limit {
            self.done = true;
            return;
        }
        self.nu += 1;
        if self.nu == self.table.psi(self.r) {
            self.r += 1;
            self.nu = 0;
            if self.r > self.table.max_r() {
                self.done = true;
                return;
            }
            self.row_len = self.lambda * self.r as u128;
        }
        self.draw_row();
    }
}

impl Iterator for MStream {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        loop {
            if self.done {
                return None;
            }
            if self.mask == 0 || self.offset > self.row_len {
                self.advance_row();
                continue;
            }
            let value = self.row_base + self.offset;
            if value > self.limit {
                self.done = true;
                return None;
            }
            let selected = (self.mask >> self.residue) & 1 == 1;
            self.offset += 1;
            self.residue += 1;
            if self.residue == self.r {
                self.residue = 0;
            }
            if selected {
                return Some(value as u64);
            }
        }
    }
}

impl FusedIterator for MStream {}

/// `(n_k)`: every odd number together with every `2*m_k`, in increasing
/// order. Gaps are always 1 or 2.
#[derive(Debug, Clone)]
pub struct NStream {
    evens: Peekable<MStream>,
    next_odd: u64,
    limit: u64,
}

pub fn generate_n(params: &SeqParams, table: &PsiTable) -> Result<NStream> {
    params.validate()?;
    Ok(NStream {
        evens: MStream::new(params, params.limit / 2, table)?.peekable(),
        next_odd: 1,
        limit: params.limit,
    })
}

impl Iterator for NStream {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        let even = self.evens.peek().map(|&m| 2 * m);
        let value = match even {
            Some(e) if e < self.next_odd => {
                self.evens.next();
                e
            }
            _ => {
                let odd = self.next_odd;
                if odd > self.limit {
                    return None;
                }
                self.next_odd += 2;
                odd
            }
        };
        Some(value)
    }
}

impl FusedIterator for NStream {}
