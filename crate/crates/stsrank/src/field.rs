//! Exact linear algebra over small prime fields, construction of the
//! parity-check matrices of the codes `C_{n,t}`, and verification of the
//! equidistant structure of their dual codes.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default cap on the number of dual codewords enumerated by
/// [`verify_dual_structure`]: `p^m` words with `p^m <= 2^24`.
pub const DEFAULT_DUAL_WORD_CAP: u64 = 1 << 24;

/// A dense matrix over GF(p) for a small prime p.
///
/// The codes of Steiner triple systems are only interesting over GF(2) and
/// GF(3); other small primes are admitted so that full-rank behaviour can be
/// checked, but the code constructors below are restricted to p = 2, 3.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawMatrix", into = "RawMatrix")]
pub struct FieldMatrix {
    p: u8,
    rows: usize,
    cols: usize,
    data: Vec<Vec<u8>>,
}

#[derive(Serialize, Deserialize)]
struct RawMatrix {
    p: u8,
    rows: usize,
    cols: usize,
    data: Vec<Vec<u8>>,
}

impl TryFrom<RawMatrix> for FieldMatrix {
    type Error = Error;
    fn try_from(raw: RawMatrix) -> Result<Self> {
        let m = FieldMatrix::new(raw.p, raw.data)?;
        if m.rows != raw.rows || m.cols != raw.cols {
            return Err(Error::LengthMismatch(format!(
                "declared shape {}x{} does not match data {}x{}",
                raw.rows, raw.cols, m.rows, m.cols
            )));
        }
        Ok(m)
    }
}

impl From<FieldMatrix> for RawMatrix {
    fn from(m: FieldMatrix) -> Self {
        RawMatrix { p: m.p, rows: m.rows, cols: m.cols, data: m.data }
    }
}

fn is_prime(p: u8) -> bool {
    p >= 2 && (2..p).all(|d| p % d != 0)
}

impl FieldMatrix {
    pub fn new(p: u8, data: Vec<Vec<u8>>) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::InvalidParameters(format!("p = {p} is not prime")));
        }
        let rows = data.len();
        if rows == 0 {
            return Err(Error::InvalidParameters("matrix needs at least one row".into()));
        }
        let cols = data[0].len();
        if cols == 0 {
            return Err(Error::InvalidParameters("matrix needs at least one column".into()));
        }
        for row in &data {
            if row.len() != cols {
                return Err(Error::LengthMismatch("ragged rows".into()));
            }
            if row.iter().any(|&e| e >= p) {
                return Err(Error::InvalidParameters(format!("entry not reduced mod {p}")));
            }
        }
        Ok(FieldMatrix { p, rows, cols, data })
    }

    pub fn p(&self) -> u8 {
        self.p
    }
    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }
    pub fn entry(&self, i: usize, j: usize) -> u8 {
        self.data[i][j]
    }
    pub fn row(&self, i: usize) -> &[u8] {
        &self.data[i]
    }
    pub fn column(&self, j: usize) -> Vec<u8> {
        self.data.iter().map(|r| r[j]).collect()
    }
}

/// Rank over GF(p) by exact Gaussian elimination.
///
/// GF(2) rows are packed into machine words; other primes use byte entries
/// with modular pivoting.
pub fn matrix_rank(m: &FieldMatrix) -> usize {
    if m.p == 2 {
        rank_gf2(m)
    } else {
        rank_gfp(m)
    }
}

fn rank_gf2(m: &FieldMatrix) -> usize {
    let words = m.cols.div_ceil(64);
    let mut rows: Vec<Vec<u64>> = m
        .data
        .iter()
        .map(|r| {
            let mut w = vec![0u64; words];
            for (j, &e) in r.iter().enumerate() {
                if e != 0 {
                    w[j / 64] |= 1 << (j % 64);
                }
            }
            w
        })
        .collect();
    let mut rank = 0;
    for col in 0..m.cols {
        let (wi, bit) = (col / 64, 1u64 << (col % 64));
        let Some(pivot) = (rank..rows.len()).find(|&i| rows[i][wi] & bit != 0) else {
            continue;
        };
        rows.swap(rank, pivot);
        let (head, tail) = rows.split_at_mut(rank + 1);
        let prow = &head[rank];
        for r in tail.iter_mut() {
            if r[wi] & bit != 0 {
                for (a, b) in r.iter_mut().zip(prow) {
                    *a ^= b;
                }
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rank
}

fn inv_mod(a: u8, p: u8) -> u8 {
    // p is tiny; scan.
    (1..p).find(|&x| (a as u16 * x as u16) % p as u16 == 1).unwrap()
}

fn rank_gfp(m: &FieldMatrix) -> usize {
    let p = m.p as u16;
    let mut rows = m.data.clone();
    let mut rank = 0;
    for col in 0..m.cols {
        let Some(pivot) = (rank..rows.len()).find(|&i| rows[i][col] != 0) else {
            continue;
        };
        rows.swap(rank, pivot);
        let inv = inv_mod(rows[rank][col], m.p) as u16;
        for e in rows[rank].iter_mut() {
            *e = ((*e as u16 * inv) % p) as u8;
        }
        let (head, tail) = rows.split_at_mut(rank + 1);
        let prow = &head[rank];
        for r in tail.iter_mut() {
            let f = r[col] as u16;
            if f != 0 {
                for (a, &b) in r.iter_mut().zip(prow) {
                    *a = ((*a as u16 + (p - f % p) * b as u16) % p) as u8;
                }
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rank
}

/// Parameters (p, n, t) of the code `C_{n,t}` together with the derived
/// length and group sizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CodeSpec {
    p: u8,
    n: u32,
    t: u32,
}

impl CodeSpec {
    pub fn new(p: u8, n: u32, t: u32) -> Result<Self> {
        if p != 2 && p != 3 {
            return Err(Error::InvalidParameters(format!("field must be 2 or 3, got {p}")));
        }
        if n < 2 || t < 1 || t > n - 1 {
            return Err(Error::InvalidParameters(format!(
                "need n >= 2 and 1 <= t <= n-1, got n={n}, t={t}"
            )));
        }
        Ok(CodeSpec { p, n, t })
    }

    pub fn p(&self) -> u8 {
        self.p
    }
    pub fn n(&self) -> u32 {
        self.n
    }
    pub fn t(&self) -> u32 {
        self.t
    }

    /// Point count: 2^n - 1 (binary) or 3^n (ternary).
    pub fn length(&self) -> usize {
        match self.p {
            2 => (1usize << self.n) - 1,
            _ => 3usize.pow(self.n),
        }
    }

    /// Group-size parameter T: 2^t - 1 (binary) or 3^t (ternary).
    pub fn group_param(&self) -> usize {
        match self.p {
            2 => (1usize << self.t) - 1,
            _ => 3usize.pow(self.t),
        }
    }

    /// Group count M: 2^{n-t} - 1 (binary) or 3^{n-t} (ternary).
    pub fn group_count(&self) -> usize {
        match self.p {
            2 => (1usize << (self.n - self.t)) - 1,
            _ => 3usize.pow(self.n - self.t),
        }
    }

    /// Size of each column group: T + 1 (binary) or T (ternary).
    pub fn group_size(&self) -> usize {
        match self.p {
            2 => self.group_param() + 1,
            _ => self.group_param(),
        }
    }

    /// Number of all-zero columns: T (binary) or 0 (ternary).
    pub fn zero_column_count(&self) -> usize {
        match self.p {
            2 => self.group_param(),
            _ => 0,
        }
    }

    /// Rank of the parity-check matrix: n - t (binary) or n - t + 1 (ternary).
    pub fn parity_rank(&self) -> usize {
        match self.p {
            2 => (self.n - self.t) as usize,
            _ => (self.n - self.t + 1) as usize,
        }
    }

    /// Maximal p-rank of an STS contained in the code:
    /// 2^n - 1 - n + t resp. 3^n - 1 - n + t.
    pub fn rank_bound(&self) -> usize {
        let base = match self.p {
            2 => self.length(),
            _ => self.length() - 1,
        };
        base - self.n as usize + self.t as usize
    }
}

/// Build the parity-check matrix `H_{n,t}` with lexicographically ordered
/// columns (row 0 is the most significant digit).
///
/// Binary: an (n-t) x (2^n - 1) matrix whose columns are 2^t - 1 zero
/// columns followed by 2^t copies of each nonzero vector of GF(2)^{n-t}.
/// Ternary: an (n-t+1) x 3^n matrix with all-1 first row and 3^t copies of
/// each vector of GF(3)^{n-t} below it.
pub fn build_parity_check(spec: &CodeSpec) -> FieldMatrix {
    let d = (spec.n - spec.t) as usize;
    let v = spec.length();
    match spec.p {
        2 => {
            let copies = 1usize << spec.t;
            let mut data = vec![Vec::with_capacity(v); d];
            // val 0 appears copies-1 times, every nonzero val copies times
            for val in 0..(1usize << d) {
                let reps = if val == 0 { copies - 1 } else { copies };
                for _ in 0..reps {
                    for (r, row) in data.iter_mut().enumerate() {
                        // row 0 is the most significant bit
                        row.push(((val >> (d - 1 - r)) & 1) as u8);
                    }
                }
            }
            FieldMatrix::new(2, data).expect("valid by construction")
        }
        _ => {
            let copies = 3usize.pow(spec.t);
            let mut data = vec![Vec::with_capacity(v); d + 1];
            for val in 0..3usize.pow(d as u32) {
                for _ in 0..copies {
                    data[0].push(1);
                    let mut rem = val;
                    for r in (1..=d).rev() {
                        data[r].push((rem % 3) as u8);
                        rem /= 3;
                    }
                }
            }
            FieldMatrix::new(3, data).expect("valid by construction")
        }
    }
}

/// Syndrome test: true iff H * x = 0 over GF(p).
pub fn is_codeword(h: &FieldMatrix, x: &[u8]) -> Result<bool> {
    if x.len() != h.cols {
        return Err(Error::LengthMismatch(format!(
            "vector length {} vs {} columns",
            x.len(),
            h.cols
        )));
    }
    let p = h.p as u32;
    Ok(h.data.iter().all(|row| {
        row.iter().zip(x).map(|(&a, &b)| a as u32 * b as u32).sum::<u32>() % p == 0
    }))
}

/// Result of enumerating the full dual code of an STS incidence matrix.
#[derive(Debug, Clone, Serialize)]
pub struct DualStructureReport {
    /// Corank m = v - rank.
    pub corank: usize,
    /// Multiplicity parameter w, with v = w * 2^m - 1 (binary) or
    /// v = w * 3^{m-1} (ternary); 0 if the relation fails.
    pub w: usize,
    /// Map weight -> number of dual codewords of that weight.
    pub dual_weight_histogram: BTreeMap<usize, u64>,
    /// Binary: every nonzero dual weight equals (v+1)/2. Ternary: nonzero
    /// dual words are scalar multiples of the all-1 vector or have weight
    /// 2v/3.
    pub passed: bool,
}

/// Compute the null-space basis of the rows of `m` (vectors x with M x = 0).
pub fn null_space_basis(m: &FieldMatrix) -> Vec<Vec<u8>> {
    let p = m.p as u16;
    let cols = m.cols;
    let mut rows = m.data.clone();
    // reduced row echelon form
    let mut pivot_cols = Vec::new();
    let mut r = 0;
    for col in 0..cols {
        let Some(pi) = (r..rows.len()).find(|&i| rows[i][col] != 0) else { continue };
        rows.swap(r, pi);
        let inv = inv_mod(rows[r][col], m.p) as u16;
        for e in rows[r].iter_mut() {
            *e = ((*e as u16 * inv) % p) as u8;
        }
        for i in 0..rows.len() {
            if i != r && rows[i][col] != 0 {
                let f = rows[i][col] as u16;
                for j in 0..cols {
                    let sub = (f * rows[r][j] as u16) % p;
                    rows[i][j] = ((rows[i][j] as u16 + p - sub) % p) as u8;
                }
            }
        }
        pivot_cols.push(col);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    let pivot_set: std::collections::HashSet<usize> = pivot_cols.iter().copied().collect();
    let free_cols: Vec<usize> = (0..cols).filter(|c| !pivot_set.contains(c)).collect();
    let mut basis = Vec::with_capacity(free_cols.len());
    for &fc in &free_cols {
        let mut v = vec![0u8; cols];
        v[fc] = 1;
        for (ri, &pc) in pivot_cols.iter().enumerate() {
            // pivot value is 1; x[pc] = -rows[ri][fc]
            let e = rows[ri][fc] as u16;
            v[pc] = ((p - e) % p) as u8;
        }
        basis.push(v);
    }
    basis
}

/// Enumerate the full dual code of an STS incidence matrix and check the
/// equidistance structure of its nonzero words.
pub fn verify_dual_structure(a: &FieldMatrix) -> Result<DualStructureReport> {
    verify_dual_structure_with(a, DEFAULT_DUAL_WORD_CAP, 0)
}

/// As [`verify_dual_structure`], with an explicit word cap and worker count
/// (0 = available parallelism). The histogram is independent of `threads`.
pub fn verify_dual_structure_with(
    a: &FieldMatrix,
    word_cap: u64,
    threads: usize,
) -> Result<DualStructureReport> {
    if a.p != 2 && a.p != 3 {
        return Err(Error::Domain("dual structure is defined over GF(2) and GF(3) only".into()));
    }
    let design = crate::designs::TripleSystem::from_incidence(a)?;
    let cert = crate::designs::validate_sts(&design);
    if !cert.is_sts {
        return Err(Error::Domain("matrix is not the incidence matrix of an STS".into()));
    }
    let v = a.cols;
    let rank = matrix_rank(a);
    let m = v - rank;
    let p = a.p as u64;
    let words = p
        .checked_pow(m as u32)
        .filter(|&w| w <= word_cap)
        .ok_or_else(|| Error::ResourceCap(format!("dual space has p^{m} words, cap {word_cap}")))?;

    let basis = null_space_basis(a);
    debug_assert_eq!(basis.len(), m);

    let nthreads = if threads == 0 {
        std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
    } else {
        threads
    }
    .min(words.max(1) as usize);

    let histogram = enumerate_weights(&basis, a.p, words, nthreads.max(1));

    let (w, passed) = match a.p {
        2 => {
            let w = if m < 64 && (v as u64 + 1) % (1u64 << m) == 0 {
                ((v as u64 + 1) >> m) as usize
            } else {
                0
            };
            let target = (v + 1) / 2;
            let ok = w > 0
                && histogram.iter().all(|(&wt, _)| wt == 0 || wt == target);
            (w, ok)
        }
        _ => {
            let pm1 = 3u64.checked_pow(m.saturating_sub(1) as u32).unwrap_or(0);
            let w = if m >= 1 && pm1 > 0 && (v as u64) % pm1 == 0 {
                (v as u64 / pm1) as usize
            } else {
                0
            };
            // scalar multiples of the all-1 vector have weight v
            let target = 2 * v / 3;
            let full_count = histogram.get(&v).copied().unwrap_or(0);
            let ok = w > 0
                && full_count == 2
                && histogram.iter().all(|(&wt, _)| wt == 0 || wt == target || wt == v);
            (w, ok)
        }
    };

    Ok(DualStructureReport { corank: m, w, dual_weight_histogram: histogram, passed })
}

/// Weight histogram over all `words` combinations of the basis vectors,
/// partitioned across `nthreads` workers.
fn enumerate_weights(
    basis: &[Vec<u8>],
    p: u8,
    words: u64,
    nthreads: usize,
) -> BTreeMap<usize, u64> {
    let chunk = words.div_ceil(nthreads as u64).max(1);
    let ranges: Vec<(u64, u64)> =
        (0..nthreads as u64).map(|i| (i * chunk, ((i + 1) * chunk).min(words))).collect();
    let partials: Vec<BTreeMap<usize, u64>> = std::thread::scope(|s| {
        let handles: Vec<_> = ranges
            .iter()
            .filter(|(lo, hi)| lo < hi)
            .map(|&(lo, hi)| s.spawn(move || weight_range(basis, p, lo, hi)))
            .collect();
        handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
    });
    let mut total = BTreeMap::new();
    for part in partials {
        for (wt, c) in part {
            *total.entry(wt).or_insert(0) += c;
        }
    }
    total
}

fn weight_range(basis: &[Vec<u8>], p: u8, lo: u64, hi: u64) -> BTreeMap<usize, u64> {
    let cols = basis.first().map_or(0, |b| b.len());
    let mut hist = BTreeMap::new();
    let mut word = vec![0u8; cols];
    for idx in lo..hi {
        for e in word.iter_mut() {
            *e = 0;
        }
        let mut rem = idx;
        for b in basis {
            let coeff = (rem % p as u64) as u16;
            rem /= p as u64;
            if coeff != 0 {
                for (w, &e) in word.iter_mut().zip(b) {
                    *w = ((*w as u16 + coeff * e as u16) % p as u16) as u8;
                }
            }
        }
        let weight = word.iter().filter(|&&e| e != 0).count();
        *hist.entry(weight).or_insert(0) += 1;
    }
    hist
}
