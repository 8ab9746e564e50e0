//! Block designs: parameters, 2-design checks, the parity constraints a design
//! must satisfy to serve as a stabilizer measurement set, and a small search.

mod search;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::pauli::PauliOperator;

pub use search::{search_2designs, SearchOptions, SearchOutcome};

/// Point sets are bit masks.
pub const MAX_POINTS: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DesignError {
    #[error("point count must be between 1 and {MAX_POINTS}, got {0}")]
    BadPointCount(usize),
    #[error("block {0} is empty")]
    EmptyBlock(usize),
    #[error("block {0} contains points outside the point set")]
    PointOutOfRange(usize),
    #[error("not a 2-design: {0}")]
    NotA2Design(Violation),
    #[error("points must be distinct and in range")]
    BadPointPair,
    #[error("block {0} covers every point, its complement is empty")]
    FullBlock(usize),
    #[error("stabilizer {0} is the identity")]
    IdentityStabilizer(usize),
    #[error("stabilizers act on different qubit counts")]
    MixedSizes,
    #[error("no blocks")]
    NoBlocks,
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// First condition of the 2-design definition that fails.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Violation {
    /// Blocks have different sizes.
    BlockSize,
    /// Points lie in different numbers of blocks.
    Replication,
    /// Point pairs lie in different numbers of blocks.
    PairCount,
    /// Pair counts are uniform but zero: no pair of points shares a block.
    NoPairCoverage,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Violation::BlockSize => "block sizes differ",
            Violation::Replication => "replication counts differ",
            Violation::PairCount => "pair counts differ",
            Violation::NoPairCoverage => "degenerate: no pair of points shares a block (lambda = 0)",
        })
    }
}

/// A point set `{0..n}` with an ordered list of blocks.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BlockDesign {
    n_points: usize,
    blocks: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DesignParameters {
    pub n: usize,
    pub m: usize,
    pub w: Option<usize>,
    pub rho: Option<usize>,
    pub lambda: Option<usize>,
    pub is_2design: bool,
    pub is_symmetric: bool,
    pub violation: Option<Violation>,
}

impl DesignParameters {
    /// `(n, m, w, rho, lambda)` when all are uniform.
    pub fn tuple(&self) -> Option<(usize, usize, usize, usize, usize)> {
        Some((self.n, self.m, self.w?, self.rho?, self.lambda?))
    }

    /// `m w = n rho` and `lambda (n - 1) = rho (w - 1)`.
    pub fn counting_identities_hold(&self) -> bool {
        match self.tuple() {
            Some((n, m, w, rho, lambda)) => m * w == n * rho && lambda * (n - 1) == rho * (w - 1),
            None => false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QecVerdict {
    /// Block size is even, so every block commutes with both all-X and all-Z logicals.
    pub constraint1_ok: bool,
    /// Every X-copy block commutes with every Z-copy block. `None` when not evaluated.
    pub constraint2_ok: Option<bool>,
}

impl QecVerdict {
    pub fn all_ok(&self) -> bool {
        self.constraint1_ok && self.constraint2_ok.unwrap_or(true)
    }
}

fn full_mask(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

impl BlockDesign {
    /// Blocks are 0-based point masks.
    pub fn new(n_points: usize, blocks: Vec<u64>) -> Result<Self, DesignError> {
        if n_points == 0 || n_points > MAX_POINTS {
            return Err(DesignError::BadPointCount(n_points));
        }
        if blocks.is_empty() {
            return Err(DesignError::NoBlocks);
        }
        for (i, &b) in blocks.iter().enumerate() {
            if b == 0 {
                return Err(DesignError::EmptyBlock(i));
            }
            if b & !full_mask(n_points) != 0 {
                return Err(DesignError::PointOutOfRange(i));
            }
        }
        Ok(Self { n_points, blocks })
    }

    /// Blocks given as lists of 1-based point indices.
    pub fn from_one_based(n_points: usize, blocks: &[&[usize]]) -> Result<Self, DesignError> {
        let masks = blocks
            .iter()
            .enumerate()
            .map(|(i, b)| {
                b.iter().try_fold(0u64, |acc, &pt| {
                    if pt == 0 || pt > n_points {
                        Err(DesignError::PointOutOfRange(i))
                    } else {
                        Ok(acc | 1 << (pt - 1))
                    }
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(n_points, masks)
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn blocks(&self) -> &[u64] {
        &self.blocks
    }

    pub fn m(&self) -> usize {
        self.blocks.len()
    }

    /// Number of blocks containing `point`.
    pub fn replication(&self, point: usize) -> usize {
        self.blocks.iter().filter(|&&b| b >> point & 1 == 1).count()
    }

    /// Number of blocks containing both points.
    pub fn pair_count(&self, j: usize, k: usize) -> usize {
        let pair = 1u64 << j | 1u64 << k;
        self.blocks.iter().filter(|&&b| b & pair == pair).count()
    }

    /// Blocks sorted, for multiset comparison.
    pub fn sorted_blocks(&self) -> Vec<u64> {
        let mut b = self.blocks.clone();
        b.sort_unstable();
        b
    }

    pub fn same_blocks(&self, other: &Self) -> bool {
        self.n_points == other.n_points && self.sorted_blocks() == other.sorted_blocks()
    }

    /// Relabels points: point `j` becomes `perm[j]`.
    pub fn relabeled(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.n_points);
        let blocks = self
            .blocks
            .iter()
            .map(|&b| {
                perm.iter()
                    .enumerate()
                    .filter(|(j, _)| b >> j & 1 == 1)
                    .fold(0u64, |acc, (_, &t)| acc | 1 << t)
            })
            .collect();
        Self {
            n_points: self.n_points,
            blocks,
        }
    }

    /// Z-type operators on the blocks.
    pub fn z_stabilizers(&self) -> Vec<PauliOperator> {
        self.blocks
            .iter()
            .map(|&b| PauliOperator::z_on(self.n_points, b))
            .collect()
    }

    /// X-type operators on the blocks.
    pub fn x_stabilizers(&self) -> Vec<PauliOperator> {
        self.blocks
            .iter()
            .map(|&b| PauliOperator::x_on(self.n_points, b))
            .collect()
    }
}

/// Checks block-size, replication and pair uniformity by direct counting.
pub fn derive_parameters(d: &BlockDesign) -> DesignParameters {
    let n = d.n_points;
    let m = d.m();
    let uniform = |mut it: Box<dyn Iterator<Item = usize> + '_>| -> Option<usize> {
        let first = it.next()?;
        it.all(|v| v == first).then_some(first)
    };
    let w = uniform(Box::new(d.blocks.iter().map(|b| b.count_ones() as usize)));
    let rho = uniform(Box::new((0..n).map(|p| d.replication(p))));
    let lambda = if n < 2 {
        None
    } else {
        uniform(Box::new(
            (0..n)
                .flat_map(|j| ((j + 1)..n).map(move |k| (j, k)))
                .map(|(j, k)| d.pair_count(j, k)),
        ))
    };
    let violation = if w.is_none() {
        Some(Violation::BlockSize)
    } else if rho.is_none() {
        Some(Violation::Replication)
    } else if lambda.is_none() {
        Some(Violation::PairCount)
    } else if lambda == Some(0) {
        Some(Violation::NoPairCoverage)
    } else {
        None
    };
    DesignParameters {
        n,
        m,
        w,
        rho,
        lambda,
        is_2design: violation.is_none(),
        is_symmetric: m == n,
        violation,
    }
}

/// Constraint 1: `w` even. Constraint 2 (two CSS copies): every pairwise block
/// intersection, including a block with itself, has even size. The second is
/// counted directly rather than read off `lambda`.
pub fn check_qec_constraints(d: &BlockDesign, css: bool) -> Result<QecVerdict, DesignError> {
    let params = derive_parameters(d);
    if let Some(v) = params.violation {
        return Err(DesignError::NotA2Design(v));
    }
    let w = params.w.expect("2-design has uniform block size");
    let constraint2_ok = css.then(|| {
        d.blocks
            .iter()
            .enumerate()
            .all(|(i, a)| d.blocks[i..].iter().all(|b| (a & b).count_ones() % 2 == 0))
    });
    Ok(QecVerdict {
        constraint1_ok: w.is_multiple_of(2),
        constraint2_ok,
    })
}

/// Number of blocks containing exactly one of the two points: the Hamming
/// distance between their incidence columns.
pub fn signature_distance(d: &BlockDesign, j: usize, k: usize) -> Result<usize, DesignError> {
    if j == k || j >= d.n_points || k >= d.n_points {
        return Err(DesignError::BadPointPair);
    }
    Ok(d.blocks.iter().filter(|&&b| (b >> j & 1) != (b >> k & 1)).count())
}

/// Hamming distance between the incidence rows of two blocks, `2(w - lambda)`
/// for a symmetric design.
pub fn block_distance(d: &BlockDesign, a: usize, b: usize) -> usize {
    (d.blocks[a] ^ d.blocks[b]).count_ones() as usize
}

/// True when the incidence columns of all points are pairwise distinct.
pub fn columns_distinct(d: &BlockDesign) -> bool {
    let n = d.n_points;
    (0..n).all(|j| ((j + 1)..n).all(|k| signature_distance(d, j, k).is_ok_and(|x| x > 0)))
}

pub fn complement(d: &BlockDesign) -> Result<BlockDesign, DesignError> {
    let full = full_mask(d.n_points);
    let blocks = d
        .blocks
        .iter()
        .enumerate()
        .map(|(i, &b)| {
            if b == full {
                Err(DesignError::FullBlock(i))
            } else {
                Ok(full & !b)
            }
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(BlockDesign {
        n_points: d.n_points,
        blocks,
    })
}

/// Reads each operator's support as a block.
pub fn supports_to_design(stabilizers: &[PauliOperator]) -> Result<BlockDesign, DesignError> {
    let n = stabilizers.first().ok_or(DesignError::NoBlocks)?.n_qubits();
    let mut blocks = Vec::with_capacity(stabilizers.len());
    for (i, s) in stabilizers.iter().enumerate() {
        if s.n_qubits() != n {
            return Err(DesignError::MixedSizes);
        }
        if s.is_identity() {
            return Err(DesignError::IdentityStabilizer(i));
        }
        blocks.push(s.support());
    }
    BlockDesign::new(n, blocks)
}

/// Literal block lists for the designs used throughout.
pub mod builtin {
    use super::BlockDesign;

    /// Order-2 biplane, the symmetric (7, 7, 4, 4, 2) design.
    pub fn biplane2() -> BlockDesign {
        BlockDesign::from_one_based(
            7,
            &[
                &[1, 5, 6, 7],
                &[2, 4, 6, 7],
                &[3, 4, 5, 7],
                &[1, 2, 4, 5],
                &[1, 3, 4, 6],
                &[2, 3, 5, 6],
                &[1, 2, 3, 7],
            ],
        )
        .unwrap()
    }

    /// Fano plane, (7, 7, 3, 3, 1).
    pub fn fano() -> BlockDesign {
        BlockDesign::from_one_based(
            7,
            &[
                &[1, 2, 3],
                &[1, 4, 5],
                &[1, 6, 7],
                &[2, 4, 6],
                &[2, 5, 7],
                &[3, 4, 7],
                &[3, 5, 6],
            ],
        )
        .unwrap()
    }

    /// Order-3 biplane, (11, 11, 5, 5, 2), from the quadratic residues mod 11.
    pub fn biplane3() -> BlockDesign {
        BlockDesign::from_one_based(
            11,
            &[
                &[2, 4, 5, 6, 10],
                &[3, 5, 6, 7, 11],
                &[1, 4, 6, 7, 8],
                &[2, 5, 7, 8, 9],
                &[3, 6, 8, 9, 10],
                &[4, 7, 9, 10, 11],
                &[1, 5, 8, 10, 11],
                &[1, 2, 6, 9, 11],
                &[1, 2, 3, 7, 10],
                &[2, 3, 4, 8, 11],
                &[1, 3, 4, 5, 9],
            ],
        )
        .unwrap()
    }

    /// The three 2-subsets of three points.
    pub fn bitflip() -> BlockDesign {
        BlockDesign::from_one_based(3, &[&[1, 2], &[2, 3], &[1, 3]]).unwrap()
    }

    pub fn by_name(name: &str) -> Option<BlockDesign> {
        match name {
            "biplane2" | "biplane" => Some(biplane2()),
            "biplane3" => Some(biplane3()),
            "fano" => Some(fano()),
            "bitflip" => Some(bitflip()),
            _ => None,
        }
    }

    pub const NAMES: [&str; 4] = ["biplane2", "biplane3", "fano", "bitflip"];
}

impl fmt::Display for BlockDesign {
    /// `n=<points>` then one line of 1-based points per block.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "n={}", self.n_points)?;
        for &b in &self.blocks {
            let pts: Vec<String> = (0..self.n_points)
                .filter(|j| b >> j & 1 == 1)
                .map(|j| (j + 1).to_string())
                .collect();
            writeln!(f, "{}", pts.join(" "))?;
        }
        Ok(())
    }
}

impl FromStr for BlockDesign {
    type Err = DesignError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut n_points = None;
        let mut blocks = Vec::new();
        for (idx, raw) in s.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: String| DesignError::Parse { line: line_no, msg };
            match n_points {
                None => {
                    let value = line
                        .strip_prefix("n=")
                        .ok_or_else(|| err("expected `n=<points>` header".into()))?;
                    let n: usize = value
                        .trim()
                        .parse()
                        .map_err(|_| err(format!("bad point count {value:?}")))?;
                    if n == 0 || n > MAX_POINTS {
                        return Err(err(format!("point count {n} out of range")));
                    }
                    n_points = Some(n);
                }
                Some(n) => {
                    let mut block = 0u64;
                    for tok in line.split_whitespace() {
                        let pt: usize = tok.parse().map_err(|_| err(format!("bad point index {tok:?}")))?;
                        if pt == 0 || pt > n {
                            return Err(err(format!("point {pt} outside 1..={n}")));
                        }
                        if block >> (pt - 1) & 1 == 1 {
                            return Err(err(format!("point {pt} repeated")));
                        }
                        block |= 1 << (pt - 1);
                    }
                    blocks.push(block);
                }
            }
        }
        let n = n_points.ok_or(DesignError::Parse {
            line: 1,
            msg: "missing `n=<points>` header".into(),
        })?;
        if blocks.is_empty() {
            return Err(DesignError::Parse {
                line: s.lines().count().max(1),
                msg: "no blocks".into(),
            });
        }
        BlockDesign::new(n, blocks)
    }
}
