//! Backtracking enumerators for the building blocks — labeled STS (N_1),
//! 1-factorizations of complete graphs (N_2), transversal designs TD[3;g]
//! alias Latin squares (N_3) — and a provenance-tagged constants catalog for
//! orders too large to enumerate.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use num::BigUint;
use serde::{Deserialize, Serialize};

use crate::designs::TripleSystem;
use crate::error::{Error, Result};

/// Largest v accepted by [`enumerate_all_sts`].
pub const STS_ENUM_CAP: usize = 9;
/// Largest v accepted by [`enumerate_all_sts_long`].
pub const STS_ENUM_LONG_CAP: usize = 13;
/// Largest m accepted by [`enumerate_one_factorizations`].
pub const ONE_FACTORIZATION_CAP: usize = 8;
/// Largest g accepted by [`enumerate_transversal_designs`].
pub const LATIN_SQUARE_CAP: usize = 5;

/// A 1-factorization of K_{2k}: 2k-1 pairwise edge-disjoint perfect
/// matchings whose union is the full edge set.
///
/// Factors are kept in canonical order: the partner of vertex 0 increases
/// with the factor index, so factor i contains the edge {0, i+1}.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OneFactorization {
    pub vertex_count: usize,
    /// Each factor is a list of edges [a, b] with a < b, sorted by a.
    pub factors: Vec<Vec<[usize; 2]>>,
}

impl OneFactorization {
    /// Check the type invariants: disjoint matchings covering K_{2k} with
    /// factors in canonical order.
    pub fn validate(&self) -> Result<()> {
        let m = self.vertex_count;
        if m % 2 != 0 || m == 0 || self.factors.len() != m - 1 {
            return Err(Error::InvalidParameters(format!(
                "expected {} factors on {} vertices",
                m.saturating_sub(1),
                m
            )));
        }
        let mut seen = vec![false; m * m];
        for (i, f) in self.factors.iter().enumerate() {
            if f.len() != m / 2 {
                return Err(Error::StructureViolation(format!("factor {i} is not perfect")));
            }
            let mut matched = vec![false; m];
            for &[a, b] in f {
                if a >= b || b >= m || matched[a] || matched[b] || seen[a * m + b] {
                    return Err(Error::StructureViolation(format!(
                        "factor {i} edge [{a}, {b}] repeats a vertex or edge"
                    )));
                }
                matched[a] = true;
                matched[b] = true;
                seen[a * m + b] = true;
            }
            if f[0] != [0, i + 1] {
                return Err(Error::StructureViolation(format!(
                    "factor {i} must pair vertex 0 with {}",
                    i + 1
                )));
            }
        }
        Ok(())
    }

    /// The factor containing a given edge {a, b}.
    pub fn factor_of_edge(&self, a: usize, b: usize) -> Option<usize> {
        let key = [a.min(b), a.max(b)];
        self.factors.iter().position(|f| f.contains(&key))
    }
}

/// A transversal design TD[3;g] in Latin-square form: cells[r][c] is the
/// symbol in row r, column c.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TransversalDesign {
    pub group_size: usize,
    pub cells: Vec<Vec<usize>>,
}

impl TransversalDesign {
    /// Check that every row and column is a permutation of 0..g.
    pub fn validate(&self) -> Result<()> {
        let g = self.group_size;
        if self.cells.len() != g || self.cells.iter().any(|r| r.len() != g) {
            return Err(Error::InvalidParameters(format!("cells are not {g}x{g}")));
        }
        for r in 0..g {
            let mut row_seen = vec![false; g];
            let mut col_seen = vec![false; g];
            for c in 0..g {
                let s = self.cells[r][c];
                let t = self.cells[c][r];
                if s >= g || row_seen[s] || t >= g || col_seen[t] {
                    return Err(Error::StructureViolation(format!(
                        "row or column {r} is not a permutation"
                    )));
                }
                row_seen[s] = true;
                col_seen[t] = true;
            }
        }
        Ok(())
    }

    /// The g² (row, column, symbol) triples.
    pub fn triples(&self) -> Vec<[usize; 3]> {
        let g = self.group_size;
        let mut out = Vec::with_capacity(g * g);
        for r in 0..g {
            for c in 0..g {
                out.push([r, c, self.cells[r][c]]);
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ConstantKind {
    N1,
    N2,
    N3,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    Enumerated,
    Tabulated { source: String },
}

/// A counting constant with its value and where it came from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CountConstant {
    pub kind: ConstantKind,
    pub order: usize,
    pub value: BigUint,
    pub provenance: Provenance,
}

/// Stream every labeled STS(v) in lex order of sorted block lists.
/// Returns the count N_1(v).
pub fn enumerate_all_sts<F>(v: usize, f: F) -> Result<u64>
where
    F: FnMut(&TripleSystem),
{
    if !(v % 6 == 1 || v % 6 == 3) || v > STS_ENUM_CAP {
        return Err(Error::UnknownConstant(format!(
            "N_1({v}) is outside the enumeration cap; use catalog_count"
        )));
    }
    enumerate_sts_with_prefix(v, &[], f)
}

/// Same stream with the cap raised to v = 13 (about 1.2·10^9 systems).
pub fn enumerate_all_sts_long<F>(v: usize, f: F) -> Result<u64>
where
    F: FnMut(&TripleSystem),
{
    if !(v % 6 == 1 || v % 6 == 3) || v > STS_ENUM_LONG_CAP {
        return Err(Error::UnknownConstant(format!(
            "N_1({v}) is outside the long enumeration cap"
        )));
    }
    enumerate_sts_with_prefix(v, &[], f)
}

/// Stream every labeled STS(v) whose block list starts with the given
/// lex-least blocks (used for prefix-restricted consistency checks).
pub fn enumerate_sts_with_prefix<F>(v: usize, prefix: &[[usize; 3]], mut f: F) -> Result<u64>
where
    F: FnMut(&TripleSystem),
{
    if v == 0 || !(v % 6 == 1 || v % 6 == 3) {
        return Err(Error::InvalidParameters(format!("no STS on {v} points")));
    }
    let block_total = v * (v - 1) / 6;
    let mut covered = vec![false; v * v];
    let mut blocks: Vec<[usize; 3]> = Vec::with_capacity(block_total);
    for b in prefix {
        if !(b[0] < b[1] && b[1] < b[2] && b[2] < v) {
            return Err(Error::InvalidParameters(format!("bad prefix block {b:?}")));
        }
        for (x, y) in [(b[0], b[1]), (b[0], b[2]), (b[1], b[2])] {
            if covered[x * v + y] {
                return Err(Error::InvalidParameters("prefix covers a pair twice".into()));
            }
            covered[x * v + y] = true;
        }
        blocks.push(*b);
    }
    // prefix must itself be the lex-least-pair closure so far
    for i in 1..blocks.len() {
        if blocks[i - 1] >= blocks[i] {
            return Err(Error::InvalidParameters("prefix blocks not sorted".into()));
        }
    }
    let mut count = 0u64;
    sts_backtrack(v, &mut covered, &mut blocks, &mut count, &mut f);
    Ok(count)
}

fn sts_backtrack<F>(
    v: usize,
    covered: &mut [bool],
    blocks: &mut Vec<[usize; 3]>,
    count: &mut u64,
    f: &mut F,
) where
    F: FnMut(&TripleSystem),
{
    // least uncovered pair
    let mut pair = None;
    'scan: for x in 0..v {
        for y in (x + 1)..v {
            if !covered[x * v + y] {
                pair = Some((x, y));
                break 'scan;
            }
        }
    }
    let Some((x, y)) = pair else {
        *count += 1;
        let d = TripleSystem::new(v, blocks.clone()).expect("backtracker emits sorted blocks");
        f(&d);
        return;
    };
    // any uncovered partner z of x satisfies z > y, so the block is [x,y,z]
    for z in (y + 1)..v {
        if covered[x * v + z] || covered[y * v + z] {
            continue;
        }
        covered[x * v + y] = true;
        covered[x * v + z] = true;
        covered[y * v + z] = true;
        blocks.push([x, y, z]);
        sts_backtrack(v, covered, blocks, count, f);
        blocks.pop();
        covered[x * v + y] = false;
        covered[x * v + z] = false;
        covered[y * v + z] = false;
    }
}

/// Stream every 1-factorization of K_m in canonical factor order.
/// Returns the count N_2(m).
pub fn enumerate_one_factorizations<F>(m: usize, mut f: F) -> Result<u64>
where
    F: FnMut(&OneFactorization),
{
    if m == 0 || m % 2 != 0 || m > ONE_FACTORIZATION_CAP {
        return Err(Error::UnknownConstant(format!(
            "N_2({m}) is outside the enumeration cap"
        )));
    }
    let mut used_edge = vec![false; m * m];
    let mut factors: Vec<Vec<[usize; 2]>> = Vec::with_capacity(m - 1);
    let mut count = 0u64;
    fill_factor(m, &mut used_edge, &mut factors, &mut Vec::new(), 0, &mut count, &mut f);
    Ok(count)
}

/// Extend the current (partial) factor, then recurse into the next one.
fn fill_factor<F>(
    m: usize,
    used_edge: &mut [bool],
    factors: &mut Vec<Vec<[usize; 2]>>,
    current: &mut Vec<[usize; 2]>,
    matched: u32,
    count: &mut u64,
    f: &mut F,
) where
    F: FnMut(&OneFactorization),
{
    if current.len() == m / 2 {
        factors.push(current.clone());
        if factors.len() == m - 1 {
            *count += 1;
            f(&OneFactorization { vertex_count: m, factors: factors.clone() });
        } else {
            let mut next = Vec::with_capacity(m / 2);
            fill_factor(m, used_edge, factors, &mut next, 0, count, f);
        }
        factors.pop();
        return;
    }
    // least unmatched vertex in this factor
    let a = (0..m).find(|&x| matched & (1 << x) == 0).unwrap();
    let lo = if a == 0 {
        // canonical order: vertex 0 pairs with its least unused partner,
        // which is exactly factors.len() + 1
        let b = factors.len() + 1;
        if used_edge[b] || matched & (1 << b) != 0 {
            return;
        }
        b
    } else {
        a + 1
    };
    let hi = if a == 0 { lo } else { m - 1 };
    for b in lo..=hi {
        if matched & (1 << b) != 0 || used_edge[a * m + b] {
            continue;
        }
        used_edge[a * m + b] = true;
        current.push([a, b]);
        fill_factor(m, used_edge, factors, current, matched | 1 << a | 1 << b, count, f);
        current.pop();
        used_edge[a * m + b] = false;
    }
}

/// Stream every Latin square of order g in row-major lex order.
/// Returns the count N_3(g).
pub fn enumerate_transversal_designs<F>(g: usize, mut f: F) -> Result<u64>
where
    F: FnMut(&TransversalDesign),
{
    if g == 0 || g > LATIN_SQUARE_CAP {
        return Err(Error::UnknownConstant(format!(
            "N_3({g}) is outside the enumeration cap"
        )));
    }
    let mut cells = vec![vec![0usize; g]; g];
    let mut col_mask = vec![0u32; g];
    let mut count = 0u64;
    latin_backtrack(g, 0, 0, &mut cells, 0, &mut col_mask, &mut count, &mut f);
    Ok(count)
}

#[allow(clippy::too_many_arguments)]
fn latin_backtrack<F>(
    g: usize,
    r: usize,
    c: usize,
    cells: &mut Vec<Vec<usize>>,
    row_mask: u32,
    col_mask: &mut [u32],
    count: &mut u64,
    f: &mut F,
) where
    F: FnMut(&TransversalDesign),
{
    if r == g {
        *count += 1;
        f(&TransversalDesign { group_size: g, cells: cells.clone() });
        return;
    }
    if c == g {
        latin_backtrack(g, r + 1, 0, cells, 0, col_mask, count, f);
        return;
    }
    for s in 0..g {
        let bit = 1u32 << s;
        if row_mask & bit != 0 || col_mask[c] & bit != 0 {
            continue;
        }
        cells[r][c] = s;
        col_mask[c] |= bit;
        latin_backtrack(g, r, c + 1, cells, row_mask | bit, col_mask, count, f);
        col_mask[c] &= !bit;
    }
}

type CountCache = Mutex<HashMap<(ConstantKind, usize), u64>>;

fn count_cache() -> &'static CountCache {
    static CACHE: OnceLock<CountCache> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

#[derive(Deserialize)]
struct CatalogEntry {
    kind: String,
    order: usize,
    value: String,
    source: String,
}

fn catalog_entries() -> &'static Vec<(ConstantKind, usize, BigUint, String)> {
    static ENTRIES: OnceLock<Vec<(ConstantKind, usize, BigUint, String)>> = OnceLock::new();
    ENTRIES.get_or_init(|| {
        let raw: Vec<CatalogEntry> =
            serde_json::from_str(include_str!("data/catalog.json")).expect("catalog parses");
        raw.into_iter()
            .map(|e| {
                let kind = match e.kind.as_str() {
                    "N1" => ConstantKind::N1,
                    "N2" => ConstantKind::N2,
                    _ => ConstantKind::N3,
                };
                let value = e.value.parse::<BigUint>().expect("catalog value is decimal");
                (kind, e.order, value, e.source)
            })
            .collect()
    })
}

/// Look up or enumerate a counting constant, with provenance.
pub fn catalog_count(kind: ConstantKind, order: usize) -> Result<CountConstant> {
    if let Some(&c) = count_cache().lock().unwrap().get(&(kind, order)) {
        return Ok(CountConstant {
            kind,
            order,
            value: BigUint::from(c),
            provenance: Provenance::Enumerated,
        });
    }
    let enumerable = match kind {
        ConstantKind::N1 => (order % 6 == 1 || order % 6 == 3) && order <= STS_ENUM_CAP,
        ConstantKind::N2 => order > 0 && order % 2 == 0 && order <= ONE_FACTORIZATION_CAP,
        ConstantKind::N3 => order > 0 && order <= LATIN_SQUARE_CAP,
    };
    if enumerable {
        let c = match kind {
            ConstantKind::N1 => enumerate_all_sts(order, |_| {})?,
            ConstantKind::N2 => enumerate_one_factorizations(order, |_| {})?,
            ConstantKind::N3 => enumerate_transversal_designs(order, |_| {})?,
        };
        count_cache().lock().unwrap().insert((kind, order), c);
        return Ok(CountConstant {
            kind,
            order,
            value: BigUint::from(c),
            provenance: Provenance::Enumerated,
        });
    }
    for (k, o, v, src) in catalog_entries() {
        if *k == kind && *o == order {
            return Ok(CountConstant {
                kind,
                order,
                value: v.clone(),
                provenance: Provenance::Tabulated { source: src.clone() },
            });
        }
    }
    Err(Error::UnknownConstant(format!(
        "{kind:?}({order}) is neither enumerable within caps nor tabulated"
    )))
}
