//! Composition of STS of bounded rank from recipe data — an interior system
//! plus per-group and per-line component choices — and enumeration of all
//! compositions in deterministic odometer order.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use num::{BigUint, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::components::{
    enumerate_all_sts, enumerate_one_factorizations, enumerate_transversal_designs,
    OneFactorization, TransversalDesign,
};
use crate::counting::{factorial, formula_distinct};
use crate::designs::{validate_sts, TripleSystem};
use crate::error::{Error, Result};
use crate::field::CodeSpec;
use crate::geometry::{column_partition, geometry_of, weight3_design, Geometry, GroupPartition};

/// Stream mode refuses recipe spaces larger than this.
pub const STREAM_RECIPE_CAP: u64 = 10_000_000;

/// Per-group choice in a binary recipe: a 1-factorization of the group plus
/// the bijection from interior points to its factors (`factor_of[i]` is the
/// factor matched to the i-th zero column).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupChoice {
    pub factorization: OneFactorization,
    pub factor_of: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BinaryRecipe {
    /// STS(T) on local points 0..T mapped onto the zero columns.
    pub interior: TripleSystem,
    pub per_group: Vec<GroupChoice>,
    /// One Latin square per geometry line; roles fixed by line order
    /// (lowest point = rows, middle = columns, highest = symbols).
    pub per_line: Vec<TransversalDesign>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TernaryRecipe {
    /// One STS(T) on local points 0..T per group.
    pub per_group: Vec<TripleSystem>,
    pub per_line: Vec<TransversalDesign>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Recipe {
    Binary(BinaryRecipe),
    Ternary(TernaryRecipe),
}

fn ctx(spec: &CodeSpec) -> (GroupPartition, Geometry) {
    (column_partition(spec), geometry_of(spec))
}

/// Build the STS determined by a recipe. The output always passes the STS
/// axioms; malformed recipes are rejected with structure errors.
pub fn compose(recipe: &Recipe, spec: &CodeSpec) -> Result<TripleSystem> {
    let (part, geo) = ctx(spec);
    let t_param = spec.group_param();
    let m = spec.group_count();
    let mut blocks: Vec<[usize; 3]> = Vec::new();
    match (recipe, spec.p()) {
        (Recipe::Binary(r), 2) => {
            if r.interior.v() != t_param {
                return Err(Error::StructureViolation(format!(
                    "interior system has {} points, expected {t_param}",
                    r.interior.v()
                )));
            }
            if !validate_sts(&r.interior).is_sts {
                return Err(Error::StructureViolation("interior system is not an STS".into()));
            }
            if r.per_group.len() != m || r.per_line.len() != geo.lines.len() {
                return Err(Error::StructureViolation(format!(
                    "expected {m} group choices and {} line choices",
                    geo.lines.len()
                )));
            }
            // interior: zero columns are exactly 0..T, so labels carry over
            blocks.extend_from_slice(r.interior.blocks());
            for (i, gc) in r.per_group.iter().enumerate() {
                gc.factorization.validate()?;
                if gc.factorization.vertex_count != t_param + 1 {
                    return Err(Error::StructureViolation(format!(
                        "group {i} factorization is on {} vertices, expected {}",
                        gc.factorization.vertex_count,
                        t_param + 1
                    )));
                }
                if !is_permutation(&gc.factor_of, t_param) {
                    return Err(Error::StructureViolation(format!(
                        "group {i} factor assignment is not a bijection"
                    )));
                }
                let cols = &part.groups[i];
                for (ix, &x) in part.zero_set.iter().enumerate() {
                    for &[a, b] in &gc.factorization.factors[gc.factor_of[ix]] {
                        blocks.push([x, cols[a], cols[b]]);
                    }
                }
            }
            push_line_blocks(&mut blocks, &part, &geo, &r.per_line, spec.group_size())?;
        }
        (Recipe::Ternary(r), 3) => {
            if r.per_group.len() != m || r.per_line.len() != geo.lines.len() {
                return Err(Error::StructureViolation(format!(
                    "expected {m} group systems and {} line choices",
                    geo.lines.len()
                )));
            }
            for (i, sys) in r.per_group.iter().enumerate() {
                if sys.v() != t_param || !validate_sts(sys).is_sts {
                    return Err(Error::StructureViolation(format!(
                        "group {i} does not carry an STS({t_param})"
                    )));
                }
                let cols = &part.groups[i];
                for b in sys.blocks() {
                    blocks.push([cols[b[0]], cols[b[1]], cols[b[2]]]);
                }
            }
            push_line_blocks(&mut blocks, &part, &geo, &r.per_line, spec.group_size())?;
        }
        _ => {
            return Err(Error::StructureViolation(
                "recipe kind does not match the code's field".into(),
            ))
        }
    }
    blocks.sort_unstable();
    let sys = TripleSystem::new(spec.length(), blocks)?;
    let cert = validate_sts(&sys);
    if !cert.is_sts {
        return Err(Error::Internal(format!(
            "composed system is not an STS (pair {:?})",
            cert.failing_pair
        )));
    }
    Ok(sys)
}

fn is_permutation(xs: &[usize], k: usize) -> bool {
    if xs.len() != k {
        return false;
    }
    let mut seen = vec![false; k];
    for &x in xs {
        if x >= k || seen[x] {
            return false;
        }
        seen[x] = true;
    }
    true
}

fn push_line_blocks(
    blocks: &mut Vec<[usize; 3]>,
    part: &GroupPartition,
    geo: &Geometry,
    per_line: &[TransversalDesign],
    g: usize,
) -> Result<()> {
    let group_of_point = part.group_of_point();
    for (li, (line, td)) in geo.lines.iter().zip(per_line).enumerate() {
        td.validate()?;
        if td.group_size != g {
            return Err(Error::StructureViolation(format!(
                "line {li} square has order {}, expected {g}",
                td.group_size
            )));
        }
        let rows = &part.groups[group_of_point[line[0]]];
        let cols = &part.groups[group_of_point[line[1]]];
        let syms = &part.groups[group_of_point[line[2]]];
        for r in 0..g {
            for c in 0..g {
                blocks.push([rows[r], cols[c], syms[td.cells[r][c]]]);
            }
        }
    }
    Ok(())
}

/// Recover the unique recipe producing a given STS contained in the code.
pub fn decompose(sys: &TripleSystem, spec: &CodeSpec) -> Result<Recipe> {
    if !validate_sts(sys).is_sts {
        return Err(Error::Domain("input is not an STS".into()));
    }
    if sys.v() != spec.length() {
        return Err(Error::LengthMismatch(format!(
            "system has {} points, code has length {}",
            sys.v(),
            spec.length()
        )));
    }
    let ambient = weight3_design(spec)?;
    for b in sys.blocks() {
        if ambient.blocks().binary_search(b).is_err() {
            return Err(Error::Containment(format!(
                "block {b:?} is not a weight-3 codeword support"
            )));
        }
    }
    let (part, geo) = ctx(spec);
    let t_param = spec.group_param();
    let g = spec.group_size();
    let of_col = part.group_of_column(spec.length());
    // local index of a column within its group
    let mut local = vec![0usize; spec.length()];
    for grp in &part.groups {
        for (j, &c) in grp.iter().enumerate() {
            local[c] = j;
        }
    }

    let mut interior: Vec<[usize; 3]> = Vec::new();
    // binary: per group, edges of the matching assigned to each zero column
    let mut matchings: Vec<HashMap<usize, Vec<[usize; 2]>>> =
        vec![HashMap::new(); part.groups.len()];
    // ternary: per group block lists
    let mut group_blocks: Vec<Vec<[usize; 3]>> = vec![Vec::new(); part.groups.len()];
    let mut line_cells: Vec<Vec<Vec<Option<usize>>>> =
        vec![vec![vec![None; g]; g]; geo.lines.len()];

    for b in sys.blocks() {
        match (of_col[b[0]], of_col[b[1]], of_col[b[2]]) {
            (None, None, None) => interior.push(*b),
            (None, Some(g1), Some(g2)) if g1 == g2 => {
                matchings[g1]
                    .entry(b[0])
                    .or_default()
                    .push([local[b[1]], local[b[2]]]);
            }
            (Some(g1), Some(g2), Some(g3)) if g1 == g2 && g2 == g3 => {
                group_blocks[g1].push([local[b[0]], local[b[1]], local[b[2]]]);
            }
            (Some(g1), Some(g2), Some(g3)) if g1 != g2 && g2 != g3 && g1 != g3 => {
                let mut pts = [part.group_point[g1], part.group_point[g2], part.group_point[g3]];
                pts.sort_unstable();
                let li = geo.line_index(pts).ok_or_else(|| {
                    Error::StructureViolation(format!("groups of {b:?} are not collinear"))
                })?;
                // match block entries to the line's role order
                let mut by_point: Vec<(usize, usize)> = b
                    .iter()
                    .map(|&x| (part.group_point[of_col[x].unwrap()], local[x]))
                    .collect();
                by_point.sort_unstable();
                let (r, c, s) = (by_point[0].1, by_point[1].1, by_point[2].1);
                if line_cells[li][r][c].is_some() {
                    return Err(Error::StructureViolation(format!(
                        "two transversal blocks share a row/column cell on line {li}"
                    )));
                }
                line_cells[li][r][c] = Some(s);
            }
            _ => {
                return Err(Error::StructureViolation(format!(
                    "block {b:?} does not fit the split block classification"
                )))
            }
        }
    }

    let per_line: Vec<TransversalDesign> = line_cells
        .into_iter()
        .enumerate()
        .map(|(li, cells)| {
            let filled: Option<Vec<Vec<usize>>> =
                cells.into_iter().map(|row| row.into_iter().collect()).collect();
            let cells = filled.ok_or_else(|| {
                Error::StructureViolation(format!("line {li} is missing transversal blocks"))
            })?;
            let td = TransversalDesign { group_size: g, cells };
            td.validate()?;
            Ok(td)
        })
        .collect::<Result<_>>()?;

    match spec.p() {
        2 => {
            let interior_sys = TripleSystem::new(t_param, interior)?;
            if !validate_sts(&interior_sys).is_sts {
                return Err(Error::StructureViolation("interior blocks are not an STS".into()));
            }
            let mut per_group = Vec::with_capacity(part.groups.len());
            for (gi, mut by_zero) in matchings.into_iter().enumerate() {
                let mut factors_by_partner: Vec<Option<Vec<[usize; 2]>>> = vec![None; t_param];
                let mut factor_of = vec![usize::MAX; t_param];
                for (ix, &x) in part.zero_set.iter().enumerate() {
                    let mut edges = by_zero.remove(&x).ok_or_else(|| {
                        Error::StructureViolation(format!(
                            "zero column {x} has no blocks into group {gi}"
                        ))
                    })?;
                    edges.sort_unstable();
                    // canonical slot: the partner of vertex 0 minus one
                    let first = edges[0];
                    if first[0] != 0 {
                        return Err(Error::StructureViolation(format!(
                            "group {gi} matching for zero column {x} misses vertex 0"
                        )));
                    }
                    let slot = first[1] - 1;
                    if factors_by_partner[slot].is_some() {
                        return Err(Error::StructureViolation(format!(
                            "group {gi} has two factors pairing 0 with {}",
                            first[1]
                        )));
                    }
                    factors_by_partner[slot] = Some(edges);
                    factor_of[ix] = slot;
                }
                let factors: Vec<Vec<[usize; 2]>> = factors_by_partner
                    .into_iter()
                    .map(|f| {
                        f.ok_or_else(|| {
                            Error::StructureViolation(format!("group {gi} factorization incomplete"))
                        })
                    })
                    .collect::<Result<_>>()?;
                let f = OneFactorization { vertex_count: t_param + 1, factors };
                f.validate()?;
                per_group.push(GroupChoice { factorization: f, factor_of });
            }
            Ok(Recipe::Binary(BinaryRecipe { interior: interior_sys, per_group, per_line }))
        }
        _ => {
            if !interior.is_empty() {
                return Err(Error::StructureViolation(
                    "ternary systems have no interior blocks".into(),
                ));
            }
            let per_group = group_blocks
                .into_iter()
                .enumerate()
                .map(|(gi, mut bs)| {
                    bs.sort_unstable();
                    let sys = TripleSystem::new(t_param, bs)?;
                    if !validate_sts(&sys).is_sts {
                        return Err(Error::StructureViolation(format!(
                            "group {gi} blocks are not an STS({t_param})"
                        )));
                    }
                    Ok(sys)
                })
                .collect::<Result<_>>()?;
            Ok(Recipe::Ternary(TernaryRecipe { per_group, per_line }))
        }
    }
}

// ---- materialized component lists for indexed access ----

fn sts_list(v: usize) -> Result<&'static Vec<TripleSystem>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, &'static Vec<TripleSystem>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().unwrap();
    if let Some(&l) = guard.get(&v) {
        return Ok(l);
    }
    let mut list = Vec::new();
    enumerate_all_sts(v, |d| list.push(d.clone()))?;
    let leaked: &'static Vec<TripleSystem> = Box::leak(Box::new(list));
    guard.insert(v, leaked);
    Ok(leaked)
}

fn of_list(m: usize) -> Result<&'static Vec<OneFactorization>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, &'static Vec<OneFactorization>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().unwrap();
    if let Some(&l) = guard.get(&m) {
        return Ok(l);
    }
    let mut list = Vec::new();
    enumerate_one_factorizations(m, |f| list.push(f.clone()))?;
    let leaked: &'static Vec<OneFactorization> = Box::leak(Box::new(list));
    guard.insert(m, leaked);
    Ok(leaked)
}

fn ls_list(g: usize) -> Result<&'static Vec<TransversalDesign>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, &'static Vec<TransversalDesign>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().unwrap();
    if let Some(&l) = guard.get(&g) {
        return Ok(l);
    }
    let mut list = Vec::new();
    enumerate_transversal_designs(g, |sq| list.push(sq.clone()))?;
    let leaked: &'static Vec<TransversalDesign> = Box::leak(Box::new(list));
    guard.insert(g, leaked);
    Ok(leaked)
}

/// Lexicographically k-th permutation of 0..deg (factorial number system).
fn unrank_permutation(deg: usize, mut k: u64) -> Vec<usize> {
    let mut avail: Vec<usize> = (0..deg).collect();
    let mut out = Vec::with_capacity(deg);
    for pos in (0..deg).rev() {
        let f: u64 = (1..=pos as u64).product();
        let idx = (k / f) as usize;
        k %= f;
        out.push(avail.remove(idx));
    }
    out
}

/// Mixed-radix digit layout of the recipe odometer, most significant first.
fn radices(spec: &CodeSpec) -> Result<Vec<u64>> {
    let t_param = spec.group_param();
    let m = spec.group_count();
    let lines = m * (m - 1) / 6;
    let mut r = Vec::new();
    match spec.p() {
        2 => {
            r.push(sts_list(t_param)?.len() as u64);
            let n2 = of_list(t_param + 1)?.len() as u64;
            let tf = factorial(t_param)
                .to_u64()
                .ok_or_else(|| Error::ResourceCap("factorial radix overflows u64".into()))?;
            for _ in 0..m {
                r.push(n2);
                r.push(tf);
            }
            let n3 = ls_list(t_param + 1)?.len() as u64;
            r.extend(std::iter::repeat(n3).take(lines));
        }
        _ => {
            let n1 = sts_list(t_param)?.len() as u64;
            r.extend(std::iter::repeat(n1).take(m));
            let n3 = ls_list(t_param)?.len() as u64;
            r.extend(std::iter::repeat(n3).take(lines));
        }
    }
    Ok(r)
}

/// Total number of recipes, equal to the closed-form distinct-system count.
pub fn recipe_count(spec: &CodeSpec) -> Result<BigUint> {
    formula_distinct(spec)
}

/// Decode the recipe at a given odometer index (0-based, lex order:
/// interior, then per-group pairs, then per-line squares; last digit
/// fastest).
pub fn recipe_by_index(spec: &CodeSpec, index: u64) -> Result<Recipe> {
    let rads = radices(spec)?;
    let total: u64 = rads.iter().try_fold(1u64, |acc, &r| acc.checked_mul(r)).ok_or_else(|| {
        Error::ResourceCap("recipe space exceeds u64 indexing".into())
    })?;
    if index >= total {
        return Err(Error::InvalidParameters(format!(
            "recipe index {index} out of range 0..{total}"
        )));
    }
    let mut digits = vec![0u64; rads.len()];
    let mut rem = index;
    for (d, &r) in digits.iter_mut().zip(&rads).rev() {
        *d = rem % r;
        rem /= r;
    }
    let t_param = spec.group_param();
    let m = spec.group_count();
    match spec.p() {
        2 => {
            let interior = sts_list(t_param)?[digits[0] as usize].clone();
            let ofs = of_list(t_param + 1)?;
            let mut per_group = Vec::with_capacity(m);
            for i in 0..m {
                let fz = ofs[digits[1 + 2 * i] as usize].clone();
                let factor_of = unrank_permutation(t_param, digits[2 + 2 * i]);
                per_group.push(GroupChoice { factorization: fz, factor_of });
            }
            let squares = ls_list(t_param + 1)?;
            let per_line = digits[1 + 2 * m..]
                .iter()
                .map(|&d| squares[d as usize].clone())
                .collect();
            Ok(Recipe::Binary(BinaryRecipe { interior, per_group, per_line }))
        }
        _ => {
            let systems = sts_list(t_param)?;
            let per_group = digits[..m].iter().map(|&d| systems[d as usize].clone()).collect();
            let squares = ls_list(t_param)?;
            let per_line = digits[m..].iter().map(|&d| squares[d as usize].clone()).collect();
            Ok(Recipe::Ternary(TernaryRecipe { per_group, per_line }))
        }
    }
}

/// Stream every composition in recipe order. Returns the number emitted.
pub fn stream_compositions<F>(spec: &CodeSpec, f: F) -> Result<u64>
where
    F: FnMut(u64, &TripleSystem),
{
    stream_compositions_from(spec, 0, f)
}

/// Resume the stream at a checkpoint index.
pub fn stream_compositions_from<F>(spec: &CodeSpec, start: u64, mut f: F) -> Result<u64>
where
    F: FnMut(u64, &TripleSystem),
{
    let total_big = recipe_count(spec)?;
    let total = total_big.to_u64().filter(|&t| t <= STREAM_RECIPE_CAP).ok_or_else(|| {
        Error::ResourceCap(format!(
            "{total_big} recipes exceeds the stream cap of {STREAM_RECIPE_CAP}"
        ))
    })?;
    // consistency: the formula count must equal the odometer volume
    let rads = radices(spec)?;
    let volume: u64 = rads.iter().product();
    if volume != total {
        return Err(Error::Internal(format!(
            "odometer volume {volume} disagrees with formula count {total}"
        )));
    }
    let mut emitted = 0;
    for idx in start..total {
        let r = recipe_by_index(spec, idx)?;
        let sys = compose(&r, spec)?;
        f(idx, &sys);
        emitted += 1;
    }
    Ok(emitted)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::designs::sts_rank;
    use crate::enumerator::exact_cover_sts;
    use std::collections::BTreeSet;

    fn spec(p: u8, n: u32, t: u32) -> CodeSpec {
        CodeSpec::new(p, n, t).unwrap()
    }

    fn stream_set(sp: &CodeSpec) -> BTreeSet<Vec<[usize; 3]>> {
        let mut set = BTreeSet::new();
        stream_compositions(sp, |_, s| {
            assert!(set.insert(s.blocks().to_vec()), "recipe collision");
        })
        .unwrap();
        set
    }

    fn oracle_set(sp: &CodeSpec) -> BTreeSet<Vec<[usize; 3]>> {
        let d = weight3_design(sp).unwrap();
        let mut set = BTreeSet::new();
        exact_cover_sts(&d, |s| {
            set.insert(s.blocks().to_vec());
        })
        .unwrap();
        set
    }

    #[test]
    fn stream_equals_oracle_binary_3_1() {
        let sp = spec(2, 3, 1);
        let a = stream_set(&sp);
        assert_eq!(a.len(), 2);
        assert_eq!(a, oracle_set(&sp));
    }

    #[test]
    fn stream_equals_oracle_binary_4_1() {
        let sp = spec(2, 4, 1);
        let a = stream_set(&sp);
        assert_eq!(a.len(), 128);
        assert_eq!(a, oracle_set(&sp));
    }

    #[test]
    fn stream_equals_oracle_binary_3_2() {
        let sp = spec(2, 3, 2);
        let a = stream_set(&sp);
        assert_eq!(a.len(), 6);
        assert_eq!(a, oracle_set(&sp));
    }

    #[test]
    fn stream_equals_oracle_ternary_2_1() {
        let sp = spec(3, 2, 1);
        let a = stream_set(&sp);
        assert_eq!(a.len(), 12);
        assert_eq!(a, oracle_set(&sp));
    }

    #[test]
    fn stream_equals_oracle_binary_4_2() {
        let sp = spec(2, 4, 2);
        let a = stream_set(&sp);
        assert_eq!(a.len(), 124416);
        assert_eq!(a, oracle_set(&sp));
    }

    #[test]
    fn composed_systems_respect_rank_bound() {
        for (p, n, t) in [(2, 3, 1), (2, 4, 1), (2, 3, 2), (3, 2, 1)] {
            let sp = spec(p, n, t);
            stream_compositions(&sp, |_, s| {
                let r = sts_rank(s, p).unwrap();
                assert!(r <= sp.rank_bound(), "rank {r} over bound at p={p} n={n} t={t}");
            })
            .unwrap();
        }
    }

    #[test]
    fn roundtrip_compose_decompose() {
        for (p, n, t) in [(2, 3, 1), (2, 4, 1), (2, 3, 2), (3, 2, 1)] {
            let sp = spec(p, n, t);
            let total = recipe_count(&sp).unwrap().to_u64().unwrap();
            for idx in 0..total {
                let r = recipe_by_index(&sp, idx).unwrap();
                let sys = compose(&r, &sp).unwrap();
                let back = decompose(&sys, &sp).unwrap();
                assert_eq!(back, r, "idx {idx} at p={p} n={n} t={t}");
            }
        }
    }

    #[test]
    fn checkpoint_resume_matches_full_stream() {
        let sp = spec(2, 4, 1);
        let mut full = Vec::new();
        stream_compositions(&sp, |i, s| full.push((i, s.clone()))).unwrap();
        let mut tail = Vec::new();
        stream_compositions_from(&sp, 100, |i, s| tail.push((i, s.clone()))).unwrap();
        assert_eq!(tail.len(), 28);
        assert_eq!(&full[100..], &tail[..]);
    }

    #[test]
    fn stream_cap_enforced() {
        // ternary (3,1) has 12^12 recipes
        assert!(matches!(
            stream_compositions(&spec(3, 3, 1), |_, _| {}),
            Err(Error::ResourceCap(_))
        ));
    }

    #[test]
    fn malformed_recipes_rejected() {
        let sp = spec(2, 3, 1);
        let Recipe::Binary(mut r) = recipe_by_index(&sp, 0).unwrap() else {
            unreachable!()
        };
        r.per_line.clear();
        assert!(matches!(
            compose(&Recipe::Binary(r.clone()), &sp),
            Err(Error::StructureViolation(_))
        ));
        // wrong field kind
        assert!(compose(&Recipe::Binary(recipe_of(&sp)), &spec(3, 2, 1)).is_err());
    }

    fn recipe_of(sp: &CodeSpec) -> BinaryRecipe {
        match recipe_by_index(sp, 0).unwrap() {
            Recipe::Binary(b) => b,
            Recipe::Ternary(_) => unreachable!(),
        }
    }

    #[test]
    fn decompose_rejects_foreign_systems() {
        // an STS(7) not contained in the (3,1) code
        let sp = spec(2, 3, 1);
        let mut found = None;
        crate::components::enumerate_all_sts(7, |d| {
            if found.is_none() && decompose_contains_fails(d, &sp) {
                found = Some(d.clone());
            }
        })
        .unwrap();
        let sys = found.expect("some STS(7) lies outside the code");
        assert!(matches!(decompose(&sys, &sp), Err(Error::Containment(_))));
    }

    fn decompose_contains_fails(d: &TripleSystem, sp: &CodeSpec) -> bool {
        let ambient = weight3_design(sp).unwrap();
        d.blocks().iter().any(|b| ambient.blocks().binary_search(b).is_err())
    }

    #[test]
    fn unrank_permutation_is_lex() {
        let perms: Vec<Vec<usize>> = (0..6).map(|k| unrank_permutation(3, k)).collect();
        assert_eq!(
            perms,
            vec![
                vec![0, 1, 2],
                vec![0, 2, 1],
                vec![1, 0, 2],
                vec![1, 2, 0],
                vec![2, 0, 1],
                vec![2, 1, 0]
            ]
        );
    }
}
