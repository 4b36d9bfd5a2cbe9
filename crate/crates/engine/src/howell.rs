//! Canonical row bases (Howell form) for submodules of (Z/p^N)^w.
//!
//! Z/p^N is a chain ring: plain row echelon does not give a canonical
//! membership test because a span element can have a leading zero pattern no
//! echelon row has. The Howell form fixes this by adding annihilator-closure
//! rows (p^(N-e) times each pivot row), after which every span element whose
//! leading coordinates vanish lies in the span of the later rows. That
//! property is what makes `reduce` a canonical form and makes the augmented
//! kernel construction below complete.

use std::fmt;

/// Arithmetic in Z/p^N with the modulus cached. The modulus must stay below
/// 2^62 so products fit in u128.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct ChainRing {
    pub prime: u64,
    pub precision: u32,
    pub modulus: u64,
}

impl ChainRing {
    pub fn new(prime: u64, precision: u32) -> Self {
        assert!(precision >= 1, "precision must be at least 1");
        let mut m: u128 = 1;
        for _ in 0..precision {
            m = m.checked_mul(prime as u128).expect("modulus overflow");
            assert!(m < (1 << 62), "modulus {}^{} out of range", prime, precision);
        }
        ChainRing { prime, precision, modulus: m as u64 }
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a as u128 + b as u128;
        (s % self.modulus as u128) as u64
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        let s = a as u128 + (self.modulus - b) as u128;
        (s % self.modulus as u128) as u64
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        (self.modulus - a) % self.modulus
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        (a as u128 * b as u128 % self.modulus as u128) as u64
    }

    pub fn reduce_i128(&self, v: i128) -> u64 {
        v.rem_euclid(self.modulus as i128) as u64
    }

    /// Valuation of a residue; `precision` for zero.
    pub fn val(&self, x: u64) -> u32 {
        if x == 0 {
            return self.precision;
        }
        let mut v = 0;
        let mut r = x;
        while r % self.prime == 0 {
            r /= self.prime;
            v += 1;
        }
        v
    }

    /// p^e as a residue (e <= precision).
    pub fn pow_p(&self, e: u32) -> u64 {
        if e >= self.precision {
            return 0;
        }
        let mut m = 1u64;
        for _ in 0..e {
            m *= self.prime;
        }
        m
    }

    /// Inverse of a unit residue.
    pub fn inv_unit(&self, x: u64) -> u64 {
        let (mut old_r, mut r) = (x as i128, self.modulus as i128);
        let (mut old_s, mut s) = (1i128, 0i128);
        while r != 0 {
            let q = old_r / r;
            (old_r, r) = (r, old_r - q * r);
            (old_s, s) = (s, old_s - q * s);
        }
        assert_eq!(old_r, 1, "{x} is not a unit mod {}", self.modulus);
        old_s.rem_euclid(self.modulus as i128) as u64
    }
}

/// A canonical (Howell-form) basis of a submodule of (Z/p^N)^width.
///
/// Rows are pairwise pivot-distinct with strictly increasing pivot columns,
/// each pivot entry is p^e for some e, entries above a pivot are reduced into
/// [0, p^e), and the row set is closed under annihilator spans. Two equal
/// submodules produce identical bases.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HowellBasis {
    ring: ChainRing,
    width: usize,
    rows: Vec<Vec<u64>>,
    pivots: Vec<usize>,
}

impl HowellBasis {
    /// Build the canonical basis of the row span of `rows`.
    pub fn from_rows(ring: ChainRing, width: usize, rows: Vec<Vec<u64>>) -> Self {
        let mut work: Vec<Vec<u64>> = rows
            .into_iter()
            .inspect(|r| assert_eq!(r.len(), width, "row width mismatch"))
            .filter(|r| r.iter().any(|&x| x != 0))
            .collect();
        let mut out_rows: Vec<Vec<u64>> = Vec::new();
        let mut pivots: Vec<usize> = Vec::new();

        for col in 0..width {
            // Pick the row with minimal valuation at this column.
            let mut best: Option<(usize, u32)> = None;
            for (i, row) in work.iter().enumerate() {
                if row[col] != 0 {
                    let v = ring.val(row[col]);
                    if best.map_or(true, |(_, bv)| v < bv) {
                        best = Some((i, v));
                    }
                }
            }
            let Some((idx, e)) = best else { continue };
            let mut pivot_row = work.swap_remove(idx);
            // Normalize the pivot to p^e.
            let unit = pivot_row[col] / ring.pow_p(e).max(1);
            debug_assert!(ring.pow_p(e) != 0);
            let unit_inv = ring.inv_unit(unit);
            for x in pivot_row.iter_mut() {
                *x = ring.mul(*x, unit_inv);
            }
            debug_assert_eq!(pivot_row[col], ring.pow_p(e));
            // Eliminate the column everywhere else; every other entry has
            // valuation >= e by minimality, so the division is exact.
            let pe = ring.pow_p(e);
            for row in work.iter_mut() {
                if row[col] != 0 {
                    let q = row[col] / pe;
                    for (x, &pv) in row.iter_mut().zip(pivot_row.iter()) {
                        *x = ring.sub(*x, ring.mul(q, pv));
                    }
                    debug_assert_eq!(row[col], 0);
                }
            }
            work.retain(|r| r.iter().any(|&x| x != 0));
            // Annihilator closure: p^(N-e) times the pivot row still lies in
            // the span and has a later leading column.
            if e > 0 {
                let ann = ring.pow_p(ring.precision - e);
                let ann_row: Vec<u64> = pivot_row.iter().map(|&x| ring.mul(ann, x)).collect();
                if ann_row.iter().any(|&x| x != 0) {
                    work.push(ann_row);
                }
            }
            out_rows.push(pivot_row);
            pivots.push(col);
        }

        // Back-reduce entries above each pivot into [0, p^e).
        for i in 0..out_rows.len() {
            let col = pivots[i];
            let pe = ring.pow_p(ring.val(out_rows[i][col]));
            for j in 0..i {
                let q = out_rows[j][col] / pe;
                if q != 0 {
                    for c in 0..width {
                        let sub = ring.mul(q, out_rows[i][c]);
                        out_rows[j][c] = ring.sub(out_rows[j][c], sub);
                    }
                }
            }
        }

        HowellBasis { ring, width, rows: out_rows, pivots }
    }

    pub fn ring(&self) -> ChainRing {
        self.ring
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn rows(&self) -> &[Vec<u64>] {
        &self.rows
    }

    pub fn row_count(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Canonical representative of `v` modulo the span: at each pivot column
    /// the entry is brought into [0, p^e). Two vectors reduce to the same
    /// output iff they differ by a span element.
    pub fn reduce(&self, v: &[u64]) -> Vec<u64> {
        assert_eq!(v.len(), self.width);
        let mut v = v.to_vec();
        for (row, &col) in self.rows.iter().zip(self.pivots.iter()) {
            let pe = self.ring.pow_p(self.ring.val(row[col]));
            let q = v[col] / pe;
            if q != 0 {
                for c in 0..self.width {
                    v[c] = self.ring.sub(v[c], self.ring.mul(q, row[c]));
                }
            }
        }
        v
    }

    pub fn contains(&self, v: &[u64]) -> bool {
        self.reduce(v).iter().all(|&x| x == 0)
    }

    /// Basis of the span extended by extra rows.
    pub fn extended(&self, extra: Vec<Vec<u64>>) -> HowellBasis {
        let mut rows = self.rows.clone();
        rows.extend(extra);
        HowellBasis::from_rows(self.ring, self.width, rows)
    }
}

impl fmt::Display for HowellBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in &self.rows {
            writeln!(f, "{row:?}")?;
        }
        Ok(())
    }
}

/// Generators of the kernel { v : v * A lies in span(s_rows) }, where v runs
/// over (Z/p^N)^d, row i of `a_rows` is the image of the i-th unit vector
/// (width `target_width`), and `s_rows` spans the submodule to quotient by.
///
/// Construction: Howell-reduce the stacked matrix [s | 0; A | I] and read off
/// the right blocks of all rows whose left block vanished. Soundness is
/// linear bookkeeping; completeness is the Howell span property applied to
/// the left block.
pub fn kernel_mod(
    ring: ChainRing,
    target_width: usize,
    a_rows: &[Vec<u64>],
    s_rows: &[Vec<u64>],
) -> Vec<Vec<u64>> {
    let d = a_rows.len();
    let width = target_width + d;
    let mut stacked: Vec<Vec<u64>> = Vec::with_capacity(d + s_rows.len());
    for s in s_rows {
        assert_eq!(s.len(), target_width);
        let mut row = s.clone();
        row.resize(width, 0);
        stacked.push(row);
    }
    for (i, a) in a_rows.iter().enumerate() {
        assert_eq!(a.len(), target_width);
        let mut row = a.clone();
        row.resize(width, 0);
        row[target_width + i] = 1;
        stacked.push(row);
    }
    let basis = HowellBasis::from_rows(ring, width, stacked);
    basis
        .rows()
        .iter()
        .filter(|row| row[..target_width].iter().all(|&x| x == 0))
        .map(|row| row[target_width..].to_vec())
        .filter(|tail| tail.iter().any(|&x| x != 0))
        .collect()
}

/// Canonicalize a family of tagged rows: Howell-reduce the (row, tag) pairs
/// treating the row block as leading columns, and return the reduced pairs
/// whose row block is nonzero, in pivot order. Every returned pair is an
/// exact linear combination of the inputs, so any linear relation between
/// row and tag (e.g. row = tag * fixed matrix) is preserved.
pub fn canonical_tagged_rows(
    ring: ChainRing,
    row_width: usize,
    pairs: Vec<(Vec<u64>, Vec<u64>)>,
) -> Vec<(Vec<u64>, Vec<u64>)> {
    if pairs.is_empty() {
        return Vec::new();
    }
    let tag_width = pairs[0].1.len();
    let stacked: Vec<Vec<u64>> = pairs
        .into_iter()
        .map(|(row, tag)| {
            assert_eq!(row.len(), row_width);
            assert_eq!(tag.len(), tag_width);
            let mut r = row;
            r.extend(tag);
            r
        })
        .collect();
    let basis = HowellBasis::from_rows(ring, row_width + tag_width, stacked);
    basis
        .rows()
        .iter()
        .filter(|row| row[..row_width].iter().any(|&x| x != 0))
        .map(|row| (row[..row_width].to_vec(), row[row_width..].to_vec()))
        .collect()
}
