//! Triple-system data model, STS validation, incidence matrices, and the
//! p-rank of a design.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{matrix_rank, FieldMatrix};

/// A triple system: `v` points 0..v-1 and a lex-sorted, duplicate-free list
/// of strictly increasing 3-element blocks.
///
/// Constructors reject unsorted input rather than normalizing, so equality
/// is syntactic.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawDesign", into = "RawDesign")]
pub struct TripleSystem {
    v: usize,
    blocks: Vec<[usize; 3]>,
}

#[derive(Serialize, Deserialize)]
struct RawDesign {
    v: usize,
    blocks: Vec<[usize; 3]>,
}

impl TryFrom<RawDesign> for TripleSystem {
    type Error = Error;
    fn try_from(raw: RawDesign) -> Result<Self> {
        TripleSystem::new(raw.v, raw.blocks)
    }
}

impl From<TripleSystem> for RawDesign {
    fn from(d: TripleSystem) -> Self {
        RawDesign { v: d.v, blocks: d.blocks }
    }
}

impl TripleSystem {
    pub fn new(v: usize, blocks: Vec<[usize; 3]>) -> Result<Self> {
        if v == 0 {
            return Err(Error::InvalidParameters("point count must be positive".into()));
        }
        for b in &blocks {
            if !(b[0] < b[1] && b[1] < b[2]) {
                return Err(Error::InvalidParameters(format!("block {b:?} is not strictly increasing")));
            }
            if b[2] >= v {
                return Err(Error::InvalidParameters(format!("block {b:?} exceeds point range 0..{v}")));
            }
        }
        for w in blocks.windows(2) {
            if w[0] >= w[1] {
                return Err(Error::InvalidParameters(format!(
                    "blocks not sorted strictly ({:?} before {:?})",
                    w[0], w[1]
                )));
            }
        }
        Ok(TripleSystem { v, blocks })
    }

    /// Reconstruct a design from a 0/1 incidence matrix (rows = blocks).
    pub fn from_incidence(a: &FieldMatrix) -> Result<Self> {
        let mut blocks = Vec::with_capacity(a.rows());
        for i in 0..a.rows() {
            let support: Vec<usize> =
                (0..a.cols()).filter(|&j| a.entry(i, j) != 0).collect();
            let [x, y, z] = support[..] else {
                return Err(Error::Domain(format!("row {i} does not have weight 3")));
            };
            blocks.push([x, y, z]);
        }
        blocks.sort_unstable();
        if blocks.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Domain("duplicate blocks in incidence matrix".into()));
        }
        TripleSystem::new(a.cols(), blocks)
    }

    pub fn v(&self) -> usize {
        self.v
    }
    pub fn blocks(&self) -> &[[usize; 3]] {
        &self.blocks
    }

    /// Apply a point permutation (`images[old] = new`) and re-sort.
    pub fn relabel(&self, images: &[usize]) -> Result<Self> {
        if images.len() != self.v {
            return Err(Error::LengthMismatch("permutation degree mismatch".into()));
        }
        let mut blocks: Vec<[usize; 3]> = self
            .blocks
            .iter()
            .map(|b| {
                let mut nb = [images[b[0]], images[b[1]], images[b[2]]];
                nb.sort_unstable();
                nb
            })
            .collect();
        blocks.sort_unstable();
        TripleSystem::new(self.v, blocks)
    }
}

/// Outcome of the STS axiom check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StsCertificate {
    pub is_sts: bool,
    /// A pair not covered exactly once, with its coverage count.
    pub failing_pair: Option<((usize, usize), usize)>,
}

/// Check whether every unordered pair of points lies in exactly one block.
pub fn validate_sts(d: &TripleSystem) -> StsCertificate {
    let v = d.v();
    let mut coverage = vec![0usize; v * v];
    for b in d.blocks() {
        for (x, y) in [(b[0], b[1]), (b[0], b[2]), (b[1], b[2])] {
            coverage[x * v + y] += 1;
        }
    }
    for x in 0..v {
        for y in (x + 1)..v {
            let c = coverage[x * v + y];
            if c != 1 {
                return StsCertificate { is_sts: false, failing_pair: Some(((x, y), c)) };
            }
        }
    }
    StsCertificate { is_sts: true, failing_pair: None }
}

/// Block-by-point incidence matrix over GF(p).
pub fn incidence_matrix(d: &TripleSystem, p: u8) -> Result<FieldMatrix> {
    if d.blocks().is_empty() {
        return Err(Error::Domain("design has no blocks".into()));
    }
    let mut data = vec![vec![0u8; d.v()]; d.blocks().len()];
    for (i, b) in d.blocks().iter().enumerate() {
        for &pt in b {
            data[i][pt] = 1;
        }
    }
    FieldMatrix::new(p, data)
}

/// p-rank of an STS: rank of its incidence matrix over GF(p).
pub fn sts_rank(d: &TripleSystem, p: u8) -> Result<usize> {
    let cert = validate_sts(d);
    if !cert.is_sts {
        return Err(Error::Domain(format!(
            "not an STS: pair {:?} covered {} times",
            cert.failing_pair.map(|f| f.0),
            cert.failing_pair.map_or(0, |f| f.1)
        )));
    }
    if d.blocks().is_empty() {
        // STS(1): empty block list, rank 0
        return Ok(0);
    }
    Ok(matrix_rank(&incidence_matrix(d, p)?))
}
