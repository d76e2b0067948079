//! The triple system of weight-3 codewords, the column partition into zero
//! columns and groups, the induced projective/affine geometry, block
//! classification, and the group-divisible structure checks.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use serde::Serialize;

use crate::designs::TripleSystem;
use crate::error::{Error, Result};
use crate::field::{build_parity_check, CodeSpec};

/// Cap on the point count for brute-force triple scans.
pub const WEIGHT3_POINT_CAP: usize = 255;

/// Split of the column indices into the zero-column set V_0 and the groups
/// of identical nonzero columns.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GroupPartition {
    /// All-zero columns (empty in the ternary case).
    pub zero_set: Vec<usize>,
    /// Groups of identical columns, in lexicographic column order.
    pub groups: Vec<Vec<usize>>,
    /// `group_point[i]` is the geometry point index of group i.
    pub group_point: Vec<usize>,
}

impl GroupPartition {
    /// Inverse of `group_point`: geometry point index -> group index.
    pub fn group_of_point(&self) -> Vec<usize> {
        let mut inv = vec![0usize; self.group_point.len()];
        for (g, &pt) in self.group_point.iter().enumerate() {
            inv[pt] = g;
        }
        inv
    }

    /// Map a column index to the group containing it (None for V_0).
    pub fn group_of_column(&self, v: usize) -> Vec<Option<usize>> {
        let mut of = vec![None; v];
        for (g, cols) in self.groups.iter().enumerate() {
            for &c in cols {
                of[c] = Some(g);
            }
        }
        of
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum GeometryKind {
    /// PG(d, 2): points are the nonzero vectors of GF(2)^{d+1}.
    ProjectiveBinary,
    /// AG(d, 3): points are the vectors of GF(3)^d.
    AffineTernary,
}

/// Point and line lists of PG(d,2) or AG(d,3), canonically ordered by lex
/// order of coordinate vectors; lines are sorted 3-sets of point indices,
/// sorted lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Geometry {
    pub kind: GeometryKind,
    pub dim: usize,
    pub points: Vec<Vec<u8>>,
    pub lines: Vec<[usize; 3]>,
}

impl Geometry {
    /// Index of the line through a sorted point triple, if collinear.
    pub fn line_index(&self, triple: [usize; 3]) -> Option<usize> {
        self.lines.binary_search(&triple).ok()
    }
}

/// The point-line design of a geometry as a triple system.
pub fn line_design(geo: &Geometry) -> TripleSystem {
    TripleSystem::new(geo.points.len(), geo.lines.clone()).expect("lines are sorted 3-sets")
}

/// The quotient geometry whose points index the column groups:
/// PG(n-1-t, 2) for binary specs, AG(n-t, 3) for ternary ones.
pub fn geometry_of(spec: &CodeSpec) -> Geometry {
    let d = (spec.n() - spec.t()) as usize;
    match spec.p() {
        2 => {
            // points: nonzero vectors of GF(2)^d, lex order (MSB first)
            let points: Vec<Vec<u8>> = (1..(1usize << d))
                .map(|val| (0..d).map(|r| ((val >> (d - 1 - r)) & 1) as u8).collect())
                .collect();
            let mut lines = Vec::new();
            for a in 1..(1usize << d) {
                for b in (a + 1)..(1usize << d) {
                    let c = a ^ b;
                    if c > b {
                        lines.push([a - 1, b - 1, c - 1]);
                    }
                }
            }
            lines.sort_unstable();
            Geometry { kind: GeometryKind::ProjectiveBinary, dim: d - 1, points, lines }
        }
        _ => {
            let count = 3usize.pow(d as u32);
            let to_vec = |val: usize| -> Vec<u8> {
                let mut v = vec![0u8; d];
                let mut rem = val;
                for r in (0..d).rev() {
                    v[r] = (rem % 3) as u8;
                    rem /= 3;
                }
                v
            };
            let points: Vec<Vec<u8>> = (0..count).map(to_vec).collect();
            let mut lines = Vec::new();
            for a in 0..count {
                for b in (a + 1)..count {
                    // third collinear point: c = -(a+b) componentwise
                    let c_vec: Vec<u8> = points[a]
                        .iter()
                        .zip(&points[b])
                        .map(|(&x, &y)| (6 - x - y) % 3)
                        .collect();
                    let c = c_vec.iter().fold(0usize, |acc, &e| acc * 3 + e as usize);
                    if c > b {
                        lines.push([a, b, c]);
                    }
                }
            }
            lines.sort_unstable();
            Geometry { kind: GeometryKind::AffineTernary, dim: d, points, lines }
        }
    }
}

/// Column partition consistent with the lexicographic column order of
/// [`build_parity_check`].
pub fn column_partition(spec: &CodeSpec) -> GroupPartition {
    let t_param = spec.group_param();
    let m = spec.group_count();
    let gsize = spec.group_size();
    let zeros = spec.zero_column_count();
    let zero_set: Vec<usize> = (0..zeros).collect();
    let mut groups = Vec::with_capacity(m);
    for i in 0..m {
        let start = zeros + i * gsize;
        groups.push((start..start + gsize).collect());
    }
    // binary group i holds copies of the nonzero vector with value i+1,
    // which is geometry point i; ternary group i holds vector value i.
    let group_point = (0..m).collect();
    let _ = t_param;
    GroupPartition { zero_set, groups, group_point }
}

fn weight3_cache() -> &'static Mutex<HashMap<CodeSpec, TripleSystem>> {
    static CACHE: OnceLock<Mutex<HashMap<CodeSpec, TripleSystem>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// The triple system of supports of weight-3 codewords of `C_{n,t}`
/// (ternary: words with nonzero entries 1), by brute-force syndrome scan
/// over all point triples. Cached per spec.
pub fn weight3_design(spec: &CodeSpec) -> Result<TripleSystem> {
    if let Some(d) = weight3_cache().lock().unwrap().get(spec) {
        return Ok(d.clone());
    }
    let v = spec.length();
    if v > WEIGHT3_POINT_CAP {
        return Err(Error::ResourceCap(format!(
            "{v} points exceeds the {WEIGHT3_POINT_CAP}-point triple-scan cap"
        )));
    }
    let h = build_parity_check(spec);
    let p = spec.p() as u16;
    let cols: Vec<Vec<u8>> = (0..v).map(|j| h.column(j)).collect();
    let mut blocks = Vec::new();
    for i in 0..v {
        for j in (i + 1)..v {
            'third: for k in (j + 1)..v {
                for r in 0..h.rows() {
                    if (cols[i][r] as u16 + cols[j][r] as u16 + cols[k][r] as u16) % p != 0 {
                        continue 'third;
                    }
                }
                blocks.push([i, j, k]);
            }
        }
    }
    let d = TripleSystem::new(v, blocks)?;
    weight3_cache().lock().unwrap().insert(*spec, d.clone());
    Ok(d)
}

/// The same triple system, generated constructively from the block
/// classification (interior, mixed/in-group, transversal families) instead
/// of a syndrome scan. Used as an independent cross-check.
pub fn weight3_design_constructive(spec: &CodeSpec) -> Result<TripleSystem> {
    let v = spec.length();
    if v > WEIGHT3_POINT_CAP {
        return Err(Error::ResourceCap(format!(
            "{v} points exceeds the {WEIGHT3_POINT_CAP}-point triple-scan cap"
        )));
    }
    let part = column_partition(spec);
    let geo = geometry_of(spec);
    let group_of = part.group_of_point();
    let mut blocks = Vec::new();
    if spec.p() == 2 {
        // interior: every triple inside V_0
        let z = &part.zero_set;
        for a in 0..z.len() {
            for b in (a + 1)..z.len() {
                for c in (b + 1)..z.len() {
                    blocks.push([z[a], z[b], z[c]]);
                }
            }
        }
        // mixed: one V_0 point with any same-group pair
        for &x in z {
            for g in &part.groups {
                for a in 0..g.len() {
                    for b in (a + 1)..g.len() {
                        let mut blk = [x, g[a], g[b]];
                        blk.sort_unstable();
                        blocks.push(blk);
                    }
                }
            }
        }
    } else {
        // ternary in-group: every triple inside a group
        for g in &part.groups {
            for a in 0..g.len() {
                for b in (a + 1)..g.len() {
                    for c in (b + 1)..g.len() {
                        blocks.push([g[a], g[b], g[c]]);
                    }
                }
            }
        }
    }
    // transversal: one point from each group of a geometry line
    for line in &geo.lines {
        let gs: Vec<&Vec<usize>> = line.iter().map(|&pt| &part.groups[group_of[pt]]).collect();
        for &a in gs[0] {
            for &b in gs[1] {
                for &c in gs[2] {
                    let mut blk = [a, b, c];
                    blk.sort_unstable();
                    blocks.push(blk);
                }
            }
        }
    }
    blocks.sort_unstable();
    TripleSystem::new(v, blocks)
}

/// Classification of a block of the weight-3 design.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BlockClass {
    /// Block contained in V_0 (binary only).
    Interior,
    /// Two points in one group; `zero_point` is the V_0 member (binary) or
    /// absent when all three points share the group (ternary).
    Mixed { group: usize, zero_point: Option<usize> },
    /// One point in each group of the geometry line with this index.
    Transversal { line: usize },
}

/// Classify a block of `weight3_design(spec)`.
pub fn classify_block(spec: &CodeSpec, block: [usize; 3]) -> Result<BlockClass> {
    let d = weight3_design(spec)?;
    if d.blocks().binary_search(&block).is_err() {
        return Err(Error::Domain(format!(
            "{block:?} is not a block of the weight-3 design of this code"
        )));
    }
    let part = column_partition(spec);
    let geo = geometry_of(spec);
    let of_col = part.group_of_column(spec.length());
    let groups: Vec<Option<usize>> = block.iter().map(|&x| of_col[x]).collect();
    match (groups[0], groups[1], groups[2]) {
        (None, None, None) => Ok(BlockClass::Interior),
        (None, Some(g), Some(h)) if g == h => {
            Ok(BlockClass::Mixed { group: g, zero_point: Some(block[0]) })
        }
        (Some(g), Some(h), Some(k)) if g == h && h == k => {
            Ok(BlockClass::Mixed { group: g, zero_point: None })
        }
        (Some(g), Some(h), Some(k)) if g != h && h != k && g != k => {
            let mut pts = [part.group_point[g], part.group_point[h], part.group_point[k]];
            pts.sort_unstable();
            let line = geo
                .line_index(pts)
                .ok_or_else(|| Error::Internal(format!("points {pts:?} are not collinear")))?;
            Ok(BlockClass::Transversal { line })
        }
        _ => Err(Error::Internal(format!("block {block:?} violates the classification"))),
    }
}

/// Pair-coverage census of the weight-3 design against the predicted
/// group-divisible structure.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GddReport {
    pub group_count: usize,
    pub group_size: usize,
    /// Same-group pair coverage by blocks disjoint from V_0:
    /// 0 (binary) or T-2 (ternary).
    pub lambda_same_group: usize,
    /// Cross-group pair coverage: T+1 (binary) or T (ternary).
    pub lambda_cross_group: usize,
    /// Binary only: the (T, 3, T-2) parameters of the complete design on V_0.
    pub interior_design_params: Option<(usize, usize, usize)>,
    /// Binary only: blocks through a same-group pair that meet V_0.
    pub mixed_per_same_pair: Option<usize>,
    pub passed: bool,
}

/// Verify the group-divisible structure of the weight-3 design.
pub fn verify_gdd(spec: &CodeSpec) -> Result<GddReport> {
    let d = weight3_design(spec)?;
    let part = column_partition(spec);
    let v = spec.length();
    let t_param = spec.group_param();
    let of_col = part.group_of_column(v);

    // coverage split by whether the covering block meets V_0
    let mut cover_in_v0 = vec![0usize; v * v];
    let mut cover_disjoint = vec![0usize; v * v];
    for b in d.blocks() {
        let meets_v0 = b.iter().any(|&x| of_col[x].is_none());
        let tally = if meets_v0 { &mut cover_in_v0 } else { &mut cover_disjoint };
        for (x, y) in [(b[0], b[1]), (b[0], b[2]), (b[1], b[2])] {
            tally[x * v + y] += 1;
        }
    }

    let mut passed = true;
    let (expected_same, expected_cross) = match spec.p() {
        2 => (0, t_param + 1),
        _ => (t_param - 2, t_param),
    };
    let mut mixed_per_pair_ok = true;
    for x in 0..v {
        for y in (x + 1)..v {
            let idx = x * v + y;
            match (of_col[x], of_col[y]) {
                (None, None) => {
                    // V_0 pair: complete design coverage T-2, nothing else
                    if cover_in_v0[idx] != t_param.saturating_sub(2) || cover_disjoint[idx] != 0 {
                        passed = false;
                    }
                }
                (None, Some(_)) | (Some(_), None) => {
                    // mixed pair {x, y}: one block {x, y, y'} per partner y'
                    if cover_in_v0[idx] != spec.group_size() - 1 {
                        passed = false;
                    }
                    if cover_disjoint[idx] != 0 {
                        passed = false;
                    }
                }
                (Some(g), Some(h)) if g == h => {
                    if cover_disjoint[idx] != expected_same {
                        passed = false;
                    }
                    if spec.p() == 2 && cover_in_v0[idx] != t_param {
                        mixed_per_pair_ok = false;
                        passed = false;
                    }
                    if spec.p() == 3 && cover_in_v0[idx] != 0 {
                        passed = false;
                    }
                }
                (Some(_), Some(_)) => {
                    if cover_disjoint[idx] != expected_cross || cover_in_v0[idx] != 0 {
                        passed = false;
                    }
                }
            }
        }
    }

    // binary: blocks inside V_0 must form the complete design
    let interior_params = if spec.p() == 2 {
        let interior = d
            .blocks()
            .iter()
            .filter(|b| b.iter().all(|&x| of_col[x].is_none()))
            .count();
        let expect = if t_param >= 3 { t_param * (t_param - 1) * (t_param - 2) / 6 } else { 0 };
        if interior != expect {
            passed = false;
        }
        Some((t_param, 3, t_param.saturating_sub(2)))
    } else {
        None
    };

    Ok(GddReport {
        group_count: spec.group_count(),
        group_size: spec.group_size(),
        lambda_same_group: expected_same,
        lambda_cross_group: expected_cross,
        interior_design_params: interior_params,
        mixed_per_same_pair: if spec.p() == 2 {
            (mixed_per_pair_ok).then_some(t_param)
        } else {
            None
        },
        passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::designs::validate_sts;

    fn spec(p: u8, n: u32, t: u32) -> CodeSpec {
        CodeSpec::new(p, n, t).unwrap()
    }

    #[test]
    fn weight3_block_counts() {
        assert_eq!(weight3_design(&spec(2, 3, 1)).unwrap().blocks().len(), 11);
        assert_eq!(weight3_design(&spec(3, 2, 1)).unwrap().blocks().len(), 30);
        assert_eq!(weight3_design(&spec(2, 4, 1)).unwrap().blocks().len(), 63);
    }

    #[test]
    fn partition_layouts() {
        let p = column_partition(&spec(2, 3, 1));
        assert_eq!(p.zero_set, vec![0]);
        assert_eq!(p.groups, vec![vec![1, 2], vec![3, 4], vec![5, 6]]);

        let p = column_partition(&spec(3, 2, 1));
        assert!(p.zero_set.is_empty());
        assert_eq!(p.groups, vec![vec![0, 1, 2], vec![3, 4, 5], vec![6, 7, 8]]);

        let p = column_partition(&spec(2, 4, 2));
        assert_eq!(p.zero_set.len(), 3);
        assert_eq!(p.groups.len(), 3);
        assert!(p.groups.iter().all(|g| g.len() == 4));
    }

    #[test]
    fn geometry_shapes() {
        let g = geometry_of(&spec(2, 3, 1)); // PG(1,2)
        assert_eq!(g.points.len(), 3);
        assert_eq!(g.lines, vec![[0, 1, 2]]);

        let g = geometry_of(&spec(2, 5, 2)); // PG(2,2)
        assert_eq!(g.points.len(), 7);
        assert_eq!(g.lines.len(), 7);

        let g = geometry_of(&spec(3, 3, 1)); // AG(2,3)
        assert_eq!(g.points.len(), 9);
        assert_eq!(g.lines.len(), 12);
        assert!(validate_sts(&line_design(&g)).is_sts);
    }

    #[test]
    fn geometry_line_closure() {
        let g = geometry_of(&spec(2, 5, 1)); // PG(3,2)
        for line in &g.lines {
            let x: usize = (line[0] + 1) ^ (line[1] + 1);
            assert_eq!(x, line[2] + 1);
        }
        let g = geometry_of(&spec(3, 3, 1));
        for line in &g.lines {
            for (i, j) in [(0, 1), (0, 2), (1, 2)] {
                let sum: Vec<u8> = g.points[line[i]]
                    .iter()
                    .zip(&g.points[line[j]])
                    .map(|(&a, &b)| (a + b) % 3)
                    .collect();
                let third: Vec<u8> = sum.iter().map(|&e| (3 - e) % 3).collect();
                let idx = third.iter().fold(0usize, |acc, &e| acc * 3 + e as usize);
                let other = line[3 - i - j];
                assert_eq!(idx, other);
            }
        }
    }

    #[test]
    fn classify_examples() {
        let s = spec(2, 3, 1);
        assert_eq!(classify_block(&s, [1, 3, 5]).unwrap(), BlockClass::Transversal { line: 0 });
        assert_eq!(
            classify_block(&s, [0, 1, 2]).unwrap(),
            BlockClass::Mixed { group: 0, zero_point: Some(0) }
        );
        let s3 = spec(3, 2, 1);
        assert_eq!(
            classify_block(&s3, [0, 1, 2]).unwrap(),
            BlockClass::Mixed { group: 0, zero_point: None }
        );
        assert!(classify_block(&s, [0, 1, 3]).is_err());
    }

    #[test]
    fn gdd_reports() {
        let r = verify_gdd(&spec(3, 2, 1)).unwrap();
        assert!(r.passed);
        assert_eq!(r.lambda_same_group, 1);
        assert_eq!(r.lambda_cross_group, 3);

        let r = verify_gdd(&spec(2, 4, 2)).unwrap();
        assert!(r.passed);
        assert_eq!(r.interior_design_params, Some((3, 3, 1)));
        assert_eq!(r.mixed_per_same_pair, Some(3));
        assert_eq!(r.lambda_cross_group, 4);

        let r = verify_gdd(&spec(2, 3, 1)).unwrap();
        assert!(r.passed);
        assert_eq!(r.interior_design_params, Some((1, 3, 0)));
        assert_eq!(r.mixed_per_same_pair, Some(1));
        assert_eq!(r.lambda_cross_group, 2);
    }

    #[test]
    fn constructive_design_matches_scan() {
        for (p, n, t) in [(2, 3, 1), (2, 4, 1), (2, 4, 2), (2, 5, 2), (3, 2, 1), (3, 3, 1)] {
            let s = spec(p, n, t);
            assert_eq!(
                weight3_design(&s).unwrap(),
                weight3_design_constructive(&s).unwrap(),
                "p={p} n={n} t={t}"
            );
        }
    }

    #[test]
    fn transversal_blocks_per_line() {
        for (p, n, t) in [(2, 4, 1), (2, 4, 2), (3, 2, 1), (3, 3, 1)] {
            let s = spec(p, n, t);
            let d = weight3_design(&s).unwrap();
            let geo = geometry_of(&s);
            let mut per_line = vec![0usize; geo.lines.len()];
            for b in d.blocks() {
                if let BlockClass::Transversal { line } = classify_block(&s, *b).unwrap() {
                    per_line[line] += 1;
                }
            }
            let expect = s.group_size().pow(3);
            assert!(per_line.iter().all(|&c| c == expect), "p={p} n={n} t={t}");
        }
    }
}
