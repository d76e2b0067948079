//! Isomorphism machinery: canonical forms of small STS, automorphism
//! groups, membership in the code's column group, isomorphism-class
//! partitioning, and the mass-formula balance check.

use std::cmp::Ordering;
use std::collections::HashMap;

use num::BigUint;
use serde::Serialize;

use crate::counting::aut_code_order;
use crate::designs::{sts_rank, validate_sts, TripleSystem};
use crate::error::{Error, Result};
use crate::field::CodeSpec;
use crate::geometry::{column_partition, geometry_of};

/// Default point cap for canonical-form and automorphism search.
pub const CANONICAL_V_CAP: usize = 15;
/// Raised cap for long runs.
pub const CANONICAL_V_LONG_CAP: usize = 27;

/// A permutation of {0, …, v-1}, stored as its image list.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let v = images.len();
        let mut seen = vec![false; v];
        for &x in &images {
            if x >= v || seen[x] {
                return Err(Error::InvalidParameters("image list is not a bijection".into()));
            }
            seen[x] = true;
        }
        Ok(Permutation { images })
    }

    pub fn identity(v: usize) -> Self {
        Permutation { images: (0..v).collect() }
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn image(&self, x: usize) -> usize {
        self.images[x]
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }
}

const UNSET: usize = usize::MAX;

/// P[x][y] = third point of the block through {x, y}; diagonal unset.
fn pair_table(d: &TripleSystem) -> Vec<usize> {
    let v = d.v();
    let mut p = vec![UNSET; v * v];
    for b in d.blocks() {
        let [x, y, z] = *b;
        p[x * v + y] = z;
        p[y * v + x] = z;
        p[x * v + z] = y;
        p[z * v + x] = y;
        p[y * v + z] = x;
        p[z * v + y] = x;
    }
    p
}

/// Canonical representative of the isomorphism class of D: the relabeling
/// with the lexicographically least sorted block list. Two STS are
/// isomorphic iff their canonical forms are equal.
pub fn canonical_form(d: &TripleSystem) -> Result<TripleSystem> {
    canonical_form_with_cap(d, CANONICAL_V_CAP)
}

pub fn canonical_form_with_cap(d: &TripleSystem, cap: usize) -> Result<TripleSystem> {
    if d.v() > cap {
        return Err(Error::ResourceCap(format!(
            "{} points exceeds the canonical-form cap {cap}",
            d.v()
        )));
    }
    if !validate_sts(d).is_sts {
        return Err(Error::Domain("canonical form requires an STS".into()));
    }
    if d.blocks().is_empty() {
        return Ok(d.clone());
    }
    let v = d.v();
    let p = pair_table(d);
    let mut search = CanonSearch {
        p: &p,
        v,
        lab: vec![UNSET; v],
        inv: vec![UNSET; v],
        seq: Vec::new(),
        best_seq: None,
        best_lab: None,
        best_inv: vec![UNSET; v],
        orbit: (0..v).collect(),
    };
    for first in 0..v {
        // roots in an already-explored point orbit cannot improve the best
        if search.find(first) < first {
            continue;
        }
        search.lab[first] = 0;
        search.inv[0] = first;
        search.walk(0, 1, 1, Ordering::Equal);
        search.lab[first] = UNSET;
        search.inv[0] = UNSET;
    }
    let lab = search.best_lab.expect("search visits at least one labeling");
    d.relabel(&lab)
}

struct CanonSearch<'a> {
    p: &'a [usize],
    v: usize,
    /// old point -> new label
    lab: Vec<usize>,
    /// new label -> old point
    inv: Vec<usize>,
    /// P-table cell values emitted so far, row-major over new labels
    seq: Vec<usize>,
    best_seq: Option<Vec<usize>>,
    best_lab: Option<Vec<usize>>,
    best_inv: Vec<usize>,
    /// union-find of point orbits under the automorphisms found so far
    orbit: Vec<usize>,
}

impl CanonSearch<'_> {
    /// Emit the pair-table cells (a, b), a < b, in lex order of (a, b)
    /// starting from the given cell, with `k` labels assigned so far.
    ///
    /// Lex cell order matches lex comparison of sorted block lists: the
    /// first differing cell between two labelings is always the pair of the
    /// two smallest points of the first differing block. A fresh third
    /// point is forced to take the next free label (the least possible cell
    /// value); when the cell's own column label is unassigned the search
    /// branches over every unlabeled point.
    ///
    /// `cmp` tracks the relation of `seq` to the best sequence; it may go
    /// stale when a descendant replaces the best, so it is used only to
    /// switch off pruning and `complete` re-compares in full.
    fn walk(&mut self, mut a: usize, mut b: usize, mut k: usize, mut cmp: Ordering) {
        let mut trail: Vec<usize> = Vec::new();
        let start = self.seq.len();
        loop {
            if a >= self.v - 1 {
                self.complete();
                break;
            }
            if k == self.v {
                // labeling fully determined: compare the remaining cells
                // without any more state tracking
                self.finish_fixed(a, b);
                break;
            }
            if b >= k {
                // column label b is unassigned: branch
                for cand in 0..self.v {
                    if self.lab[cand] != UNSET {
                        continue;
                    }
                    self.lab[cand] = b;
                    self.inv[b] = cand;
                    self.walk(a, b, k + 1, cmp);
                    self.lab[cand] = UNSET;
                    self.inv[b] = UNSET;
                }
                break;
            }
            let third = self.p[self.inv[a] * self.v + self.inv[b]];
            let val = if self.lab[third] == UNSET {
                self.lab[third] = k;
                self.inv[k] = third;
                trail.push(third);
                k += 1;
                k - 1
            } else {
                self.lab[third]
            };
            if cmp == Ordering::Equal {
                if let Some(best) = &self.best_seq {
                    match val.cmp(&best[self.seq.len()]) {
                        Ordering::Greater => break,
                        Ordering::Less => cmp = Ordering::Less,
                        Ordering::Equal => {}
                    }
                }
            }
            self.seq.push(val);
            b += 1;
            if b == self.v {
                a += 1;
                b = a + 1;
            }
        }
        for pt in trail.into_iter().rev() {
            self.inv[self.lab[pt]] = UNSET;
            self.lab[pt] = UNSET;
        }
        self.seq.truncate(start);
    }

    /// Straight-line comparison of a fully assigned labeling against the
    /// best, starting at cell (a, b).
    fn finish_fixed(&mut self, a: usize, b: usize) {
        if let Some(best) = &self.best_seq {
            let mut pos = self.seq.len();
            let mut aa = a;
            let mut bb = b;
            let mut strictly_less = false;
            while aa < self.v - 1 {
                let val = self.lab[self.p[self.inv[aa] * self.v + self.inv[bb]]];
                match val.cmp(&best[pos]) {
                    Ordering::Greater => return,
                    Ordering::Less => {
                        strictly_less = true;
                        break;
                    }
                    Ordering::Equal => {}
                }
                pos += 1;
                bb += 1;
                if bb == self.v {
                    aa += 1;
                    bb = aa + 1;
                }
            }
            if !strictly_less {
                // equal all the way: this labeling and the best one differ
                // by an automorphism — record its point orbits for pruning
                let best_inv = self.best_inv.clone();
                for x in 0..self.v {
                    self.union(x, best_inv[self.lab[x]]);
                }
                return;
            }
        }
        let mut seq = Vec::with_capacity(self.v * (self.v - 1) / 2);
        for aa in 0..self.v - 1 {
            for bb in aa + 1..self.v {
                seq.push(self.lab[self.p[self.inv[aa] * self.v + self.inv[bb]]]);
            }
        }
        self.best_seq = Some(seq);
        self.best_lab = Some(self.lab.clone());
        self.best_inv = self.inv.clone();
    }

    fn complete(&mut self) {
        let better = match &self.best_seq {
            None => true,
            Some(best) => self.seq < *best,
        };
        if better {
            self.best_seq = Some(self.seq.clone());
            self.best_lab = Some(self.lab.clone());
            self.best_inv = self.inv.clone();
        }
    }

    /// Union-find over points, keeping the least point as representative.
    fn find(&mut self, x: usize) -> usize {
        if self.orbit[x] != x {
            let root = self.find(self.orbit[x]);
            self.orbit[x] = root;
        }
        self.orbit[x]
    }

    fn union(&mut self, x: usize, y: usize) {
        let rx = self.find(x);
        let ry = self.find(y);
        if rx < ry {
            self.orbit[ry] = rx;
        } else if ry < rx {
            self.orbit[rx] = ry;
        }
    }
}

/// Full automorphism group of an STS.
#[derive(Debug, Clone, Serialize)]
pub struct AutGroup {
    pub order: BigUint,
    /// Every element, not a minimal generating set.
    pub generators: Vec<Permutation>,
}

/// Compute Aut(D) by constraint backtracking on the pair table.
pub fn automorphism_group(d: &TripleSystem) -> Result<AutGroup> {
    automorphism_group_with_cap(d, CANONICAL_V_CAP)
}

pub fn automorphism_group_with_cap(d: &TripleSystem, cap: usize) -> Result<AutGroup> {
    if d.v() > cap {
        return Err(Error::ResourceCap(format!(
            "{} points exceeds the automorphism cap {cap}",
            d.v()
        )));
    }
    if !validate_sts(d).is_sts {
        return Err(Error::Domain("automorphism group requires an STS".into()));
    }
    let v = d.v();
    let p = pair_table(d);
    let mut elements = Vec::new();
    let mut m = vec![UNSET; v];
    let mut used = vec![false; v];
    aut_backtrack(&p, v, 0, &mut m, &mut used, &mut elements);
    Ok(AutGroup { order: BigUint::from(elements.len()), generators: elements })
}

fn aut_backtrack(
    p: &[usize],
    v: usize,
    i: usize,
    m: &mut Vec<usize>,
    used: &mut Vec<bool>,
    out: &mut Vec<Permutation>,
) {
    // skip points whose image was forced by propagation
    let Some(i) = (i..v).find(|&j| m[j] == UNSET) else {
        out.push(Permutation { images: m.clone() });
        return;
    };
    for img in 0..v {
        if used[img] {
            continue;
        }
        // propagate: for each assigned j, the third point of {j, i} must map
        // to the third point of {m[j], img}
        let mut forced: Vec<usize> = Vec::new();
        m[i] = img;
        used[img] = true;
        let mut ok = true;
        let mut queue = vec![i];
        'prop: while let Some(x) = queue.pop() {
            for j in 0..v {
                if j == x || m[j] == UNSET {
                    continue;
                }
                let third = p[j * v + x];
                if third == UNSET {
                    continue;
                }
                let image_third = p[m[j] * v + m[x]];
                if m[third] == UNSET {
                    if image_third == UNSET || used[image_third] {
                        ok = false;
                        break 'prop;
                    }
                    m[third] = image_third;
                    used[image_third] = true;
                    forced.push(third);
                    queue.push(third);
                } else if m[third] != image_third {
                    ok = false;
                    break 'prop;
                }
            }
        }
        if ok {
            aut_backtrack(p, v, i + 1, m, used, out);
        }
        for f in forced.into_iter().rev() {
            used[m[f]] = false;
            m[f] = UNSET;
        }
        used[img] = false;
        m[i] = UNSET;
    }
}

/// Does a point permutation lie in the code's column group: fix the zero
/// columns setwise, permute groups among themselves, and induce a
/// collineation of the quotient geometry?
pub fn code_aut_membership(g: &Permutation, spec: &CodeSpec) -> Result<bool> {
    if g.degree() != spec.length() {
        return Err(Error::LengthMismatch(format!(
            "permutation degree {} does not match code length {}",
            g.degree(),
            spec.length()
        )));
    }
    let part = column_partition(spec);
    let of_col = part.group_of_column(spec.length());
    // zero columns fixed setwise
    for &z in &part.zero_set {
        if of_col[g.image(z)].is_some() {
            return Ok(false);
        }
    }
    // each group maps into a single group
    let mut point_image = vec![UNSET; part.groups.len()];
    for (gi, cols) in part.groups.iter().enumerate() {
        let mut target = None;
        for &c in cols {
            match of_col[g.image(c)] {
                Some(tg) if target.is_none() || target == Some(tg) => target = Some(tg),
                _ => return Ok(false),
            }
        }
        point_image[part.group_point[gi]] = part.group_point[target.unwrap()];
    }
    // induced map must be a bijection preserving all lines
    let geo = geometry_of(spec);
    let mut seen = vec![false; point_image.len()];
    for &im in &point_image {
        if im == UNSET || seen[im] {
            return Ok(false);
        }
        seen[im] = true;
    }
    for line in &geo.lines {
        let mut img = [point_image[line[0]], point_image[line[1]], point_image[line[2]]];
        img.sort_unstable();
        if geo.line_index(img).is_none() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// One isomorphism class of the input stream.
#[derive(Debug, Clone, Serialize)]
pub struct IsoClass {
    pub canonical: TripleSystem,
    /// First member encountered, in its original labeling.
    pub representative: TripleSystem,
    pub multiplicity: u64,
    pub aut_order: u64,
    /// |Aut(representative) ∩ code column group|
    pub stabilizer_order: u64,
    /// p-rank of the class (rank is an isomorphism invariant)
    pub rank: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct IsoClassReport {
    pub classes: Vec<IsoClass>,
    pub total_distinct: u64,
    /// Σ |Aut C| / stabilizer over classes equals the distinct count
    /// (checked only when the input is a full code enumeration).
    pub mass_balance: Option<bool>,
}

/// Partition systems into isomorphism classes and, when `full_enumeration`,
/// check the mass formula Σ |Aut C|/|Aut S ∩ Aut C| = total.
pub fn iso_classes<I>(systems: I, spec: &CodeSpec, full_enumeration: bool) -> Result<IsoClassReport>
where
    I: IntoIterator<Item = TripleSystem>,
{
    iso_classes_with_cap(systems, spec, full_enumeration, CANONICAL_V_CAP)
}

/// As [`iso_classes`], with an explicit canonical-form point cap.
pub fn iso_classes_with_cap<I>(
    systems: I,
    spec: &CodeSpec,
    full_enumeration: bool,
    v_cap: usize,
) -> Result<IsoClassReport>
where
    I: IntoIterator<Item = TripleSystem>,
{
    let ambient = crate::geometry::weight3_design(spec)?;
    let systems: Vec<TripleSystem> = systems.into_iter().collect();
    for sys in &systems {
        for b in sys.blocks() {
            if ambient.blocks().binary_search(b).is_err() {
                return Err(Error::Containment(format!(
                    "block {b:?} is outside the code's weight-3 design"
                )));
            }
        }
    }
    let total = systems.len() as u64;
    // canonical forms are independent; fan them out across threads and
    // merge back in input order so the class order stays deterministic
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get()).min(systems.len().max(1));
    let canons: Vec<Result<TripleSystem>> = std::thread::scope(|scope| {
        let mut handles = Vec::new();
        for chunk in systems.chunks(systems.len().div_ceil(workers).max(1)) {
            handles.push(scope.spawn(move || {
                chunk
                    .iter()
                    .map(|d| canonical_form_with_cap(d, v_cap))
                    .collect::<Vec<_>>()
            }));
        }
        handles.into_iter().flat_map(|h| h.join().expect("worker panicked")).collect()
    });
    let mut order: Vec<TripleSystem> = Vec::new(); // canonical forms in first-seen order
    let mut by_canon: HashMap<TripleSystem, (TripleSystem, u64)> = HashMap::new();
    for (sys, canon) in systems.into_iter().zip(canons) {
        let canon = canon?;
        match by_canon.get_mut(&canon) {
            Some((_, mult)) => *mult += 1,
            None => {
                order.push(canon.clone());
                by_canon.insert(canon, (sys, 1));
            }
        }
    }
    let aut_c = aut_code_order(spec);
    let mut classes = Vec::with_capacity(order.len());
    let mut mass = BigUint::from(0u8);
    for canon in order {
        let (rep, mult) = by_canon.remove(&canon).expect("keyed by canonical form");
        let aut = automorphism_group_with_cap(&rep, v_cap)?;
        let mut stab = 0u64;
        for g in &aut.generators {
            if code_aut_membership(g, spec)? {
                stab += 1;
            }
        }
        if stab == 0 {
            return Err(Error::Internal("stabilizer lost the identity".into()));
        }
        let (orbit, rem) = num::Integer::div_rem(&aut_c, &BigUint::from(stab));
        if rem != BigUint::from(0u8) {
            return Err(Error::Internal(
                "stabilizer order does not divide the code group order".into(),
            ));
        }
        mass += orbit;
        let rank = sts_rank(&rep, spec.p())?;
        classes.push(IsoClass {
            canonical: canon,
            representative: rep,
            multiplicity: mult,
            aut_order: aut.generators.len() as u64,
            stabilizer_order: stab,
            rank,
        });
    }
    let mass_balance = full_enumeration.then(|| mass == BigUint::from(total));
    Ok(IsoClassReport { classes, total_distinct: total, mass_balance })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::composer::stream_compositions;
    use crate::geometry::{geometry_of, line_design};

    fn spec(p: u8, n: u32, t: u32) -> CodeSpec {
        CodeSpec::new(p, n, t).unwrap()
    }

    fn fano() -> TripleSystem {
        line_design(&geometry_of(&spec(2, 4, 1)))
    }

    fn ag23() -> TripleSystem {
        line_design(&geometry_of(&spec(3, 3, 1)))
    }

    #[test]
    fn aut_orders_of_classical_planes() {
        assert_eq!(automorphism_group(&fano()).unwrap().order, BigUint::from(168u32));
        assert_eq!(automorphism_group(&ag23()).unwrap().order, BigUint::from(432u32));
        let sts3 = TripleSystem::new(3, vec![[0, 1, 2]]).unwrap();
        assert_eq!(automorphism_group(&sts3).unwrap().order, BigUint::from(6u8));
    }

    #[test]
    fn canonical_form_identifies_isomorphic_systems() {
        let mut forms = std::collections::HashSet::new();
        stream_compositions(&spec(2, 3, 1), |_, s| {
            forms.insert(canonical_form(s).unwrap());
        })
        .unwrap();
        assert_eq!(forms.len(), 1);

        forms.clear();
        stream_compositions(&spec(3, 2, 1), |_, s| {
            forms.insert(canonical_form(s).unwrap());
        })
        .unwrap();
        assert_eq!(forms.len(), 1);
    }

    #[test]
    fn canonical_form_is_relabel_invariant_and_idempotent() {
        let f = fano();
        let c = canonical_form(&f).unwrap();
        assert_eq!(canonical_form(&c).unwrap(), c);
        // a few structured relabelings
        let perms: Vec<Vec<usize>> = vec![
            (0..7).rev().collect(),
            vec![3, 5, 1, 6, 0, 2, 4],
            vec![1, 2, 3, 4, 5, 6, 0],
        ];
        for p in perms {
            let r = f.relabel(&p).unwrap();
            assert_eq!(canonical_form(&r).unwrap(), c);
        }
    }

    #[test]
    fn orbit_stabilizer_cross_check() {
        // N_1(7)·|Aut| = 7!, N_1(9)·|Aut| = 9!
        assert_eq!(30u64 * 168, 5040);
        let mut count9 = 0u64;
        crate::components::enumerate_all_sts(9, |_| count9 += 1).unwrap();
        assert_eq!(count9 * 432, 362880);
    }

    #[test]
    fn membership_examples() {
        let sp = spec(2, 3, 1);
        assert!(code_aut_membership(&Permutation::identity(7), &sp).unwrap());
        // swap the two columns of group 0 (columns 1 and 2)
        let swap_in_group = Permutation::new(vec![0, 2, 1, 3, 4, 5, 6]).unwrap();
        assert!(code_aut_membership(&swap_in_group, &sp).unwrap());
        // swap a zero column with a group column
        let swap_across = Permutation::new(vec![1, 0, 2, 3, 4, 5, 6]).unwrap();
        assert!(!code_aut_membership(&swap_across, &sp).unwrap());
        // degree mismatch
        assert!(code_aut_membership(&Permutation::identity(6), &sp).is_err());
    }

    #[test]
    fn brute_force_stabilizer_matches_aut_code_order_binary() {
        // all 5040 permutations of 7 points preserving the weight-3 design
        let sp = spec(2, 3, 1);
        let d = crate::geometry::weight3_design(&sp).unwrap();
        let mut order = 0u64;
        let mut member_count = 0u64;
        permute_all(7, &mut |imgs| {
            let g = Permutation::new(imgs.to_vec()).unwrap();
            let preserves = d.relabel(g.images()).unwrap() == d;
            let member = code_aut_membership(&g, &sp).unwrap();
            assert_eq!(preserves, member);
            if preserves {
                order += 1;
            }
            if member {
                member_count += 1;
            }
        });
        assert_eq!(order, 48);
        assert_eq!(BigUint::from(order), aut_code_order(&sp));
        assert_eq!(member_count, order);
    }

    fn permute_all(v: usize, f: &mut impl FnMut(&[usize])) {
        let mut imgs: Vec<usize> = (0..v).collect();
        heap_permute(v, &mut imgs, f);
    }

    fn heap_permute(k: usize, imgs: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
        if k == 1 {
            f(imgs);
            return;
        }
        for i in 0..k {
            heap_permute(k - 1, imgs, f);
            if k % 2 == 0 {
                imgs.swap(i, k - 1);
            } else {
                imgs.swap(0, k - 1);
            }
        }
    }

    #[test]
    fn iso_classes_binary_3_1() {
        let sp = spec(2, 3, 1);
        let mut systems = Vec::new();
        stream_compositions(&sp, |_, s| systems.push(s.clone())).unwrap();
        let report = iso_classes(systems, &sp, true).unwrap();
        assert_eq!(report.total_distinct, 2);
        assert_eq!(report.classes.len(), 1);
        let c = &report.classes[0];
        assert_eq!(c.aut_order, 168);
        assert_eq!(c.stabilizer_order, 24);
        assert_eq!(c.rank, 4);
        assert_eq!(report.mass_balance, Some(true));
    }

    #[test]
    fn iso_classes_ternary_2_1() {
        let sp = spec(3, 2, 1);
        let mut systems = Vec::new();
        stream_compositions(&sp, |_, s| systems.push(s.clone())).unwrap();
        let report = iso_classes(systems, &sp, true).unwrap();
        assert_eq!(report.total_distinct, 12);
        assert_eq!(report.classes.len(), 1);
        let c = &report.classes[0];
        assert_eq!(c.aut_order, 432);
        assert_eq!(c.stabilizer_order, 108);
        assert_eq!(c.rank, 6);
        assert_eq!(report.mass_balance, Some(true));
    }

    #[test]
    fn iso_classes_binary_4_1() {
        let sp = spec(2, 4, 1);
        let mut systems = Vec::new();
        stream_compositions(&sp, |_, s| systems.push(s.clone())).unwrap();
        let report = iso_classes(systems, &sp, true).unwrap();
        assert_eq!(report.total_distinct, 128);
        assert_eq!(report.mass_balance, Some(true));
        let min_rank: u64 = report
            .classes
            .iter()
            .filter(|c| c.rank == 11)
            .map(|c| c.multiplicity)
            .sum();
        assert_eq!(min_rank, 16);
        let total: u64 = report.classes.iter().map(|c| c.multiplicity).sum();
        assert_eq!(total, 128);
    }

    #[test]
    fn brute_force_stabilizer_matches_aut_code_order_ternary() {
        // all 362880 permutations of 9 points against the weight-3 design
        let sp = spec(3, 2, 1);
        let d = crate::geometry::weight3_design(&sp).unwrap();
        let mut order = 0u64;
        permute_all(9, &mut |imgs| {
            let g = Permutation::new(imgs.to_vec()).unwrap();
            let preserves = d.relabel(g.images()).unwrap() == d;
            assert_eq!(preserves, code_aut_membership(&g, &sp).unwrap());
            if preserves {
                order += 1;
            }
        });
        assert_eq!(order, 1296);
        assert_eq!(BigUint::from(order), aut_code_order(&sp));
    }

    #[test]
    fn canonical_cap_enforced() {
        let d = TripleSystem::new(19, vec![[0, 1, 2]]).unwrap();
        // not an STS, but the cap triggers first
        assert!(matches!(canonical_form(&d), Err(Error::ResourceCap(_))));
    }
}
