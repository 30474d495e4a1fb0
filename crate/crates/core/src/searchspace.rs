//! Cell-based architecture encoding and the variation operators used to
//! produce offspring.
//!
//! A cell is a 4-node directed acyclic graph with one operation on each of
//! its 6 edges, taken in the canonical order
//! `0→1, 0→2, 1→2, 0→3, 1→3, 2→3`. Five operation kinds exist, so the space
//! holds exactly 5^6 = 15,625 distinct cells. Each cell maps bijectively to
//! an integer index via base-5 positional encoding with edge 0 as the
//! least-significant digit.

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::error::{Error, Result};

/// Number of directed edges in a cell.
pub const NUM_EDGES: usize = 6;
/// Number of operation kinds available per edge.
pub const NUM_OPS: usize = 5;
/// Total number of distinct genotypes, `NUM_OPS ^ NUM_EDGES`.
pub const SPACE_SIZE: usize = 15_625;

/// One of the five edge operations, stored as an opaque code in `0..=4`.
///
/// The conventional labels are 0 = none, 1 = skip-connect, 2 = conv-1x1,
/// 3 = conv-3x3, 4 = pool-3x3, but the engine never interprets them:
/// operation semantics live entirely in the benchmark table.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OpCode(u8);

impl OpCode {
    pub fn new(code: u8) -> Result<Self> {
        if (code as usize) < NUM_OPS {
            Ok(OpCode(code))
        } else {
            Err(Error::InvalidOpCode(code))
        }
    }

    pub fn code(self) -> u8 {
        self.0
    }

    /// Human-readable label, informational only.
    pub fn label(self) -> &'static str {
        match self.0 {
            0 => "none",
            1 => "skip-connect",
            2 => "conv-1x1",
            3 => "conv-3x3",
            _ => "pool-3x3",
        }
    }
}

/// A fixed-length vector of six edge operations identifying one cell.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Genotype {
    edges: [OpCode; NUM_EDGES],
}

/// Integer key of a genotype, in `0..=15624`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ArchIndex(u16);

impl ArchIndex {
    pub fn new(index: usize) -> Result<Self> {
        if index < SPACE_SIZE {
            Ok(ArchIndex(index as u16))
        } else {
            Err(Error::IndexOutOfRange(index))
        }
    }

    pub fn get(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for ArchIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl Genotype {
    pub fn new(edges: [OpCode; NUM_EDGES]) -> Self {
        Genotype { edges }
    }

    /// Build a genotype from raw codes, validating each.
    pub fn from_codes(codes: [u8; NUM_EDGES]) -> Result<Self> {
        let mut edges = [OpCode(0); NUM_EDGES];
        for (slot, code) in edges.iter_mut().zip(codes) {
            *slot = OpCode::new(code)?;
        }
        Ok(Genotype { edges })
    }

    /// Base-5 digit expansion of the index; edge 0 is the least-significant
    /// digit. Inverse of [`Genotype::index`].
    pub fn from_index(index: ArchIndex) -> Self {
        let mut rest = index.get();
        let mut edges = [OpCode(0); NUM_EDGES];
        for slot in edges.iter_mut() {
            *slot = OpCode((rest % NUM_OPS) as u8);
            rest /= NUM_OPS;
        }
        Genotype { edges }
    }

    /// Base-5 evaluation of the edge codes; inverse of [`Genotype::from_index`].
    pub fn index(&self) -> ArchIndex {
        let mut value = 0usize;
        for op in self.edges.iter().rev() {
            value = value * NUM_OPS + op.code() as usize;
        }
        ArchIndex(value as u16)
    }

    pub fn edges(&self) -> &[OpCode; NUM_EDGES] {
        &self.edges
    }
}

/// Textual form: one digit per edge in canonical edge order, so the
/// most-significant digit of the index comes last (`"210000"` is index 7).
impl fmt::Display for Genotype {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for op in &self.edges {
            write!(f, "{}", op.code())?;
        }
        Ok(())
    }
}

impl FromStr for Genotype {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidGenotypeString(s.to_string());
        if s.len() != NUM_EDGES {
            return Err(bad());
        }
        let mut edges = [OpCode(0); NUM_EDGES];
        for (slot, ch) in edges.iter_mut().zip(s.chars()) {
            let digit = ch.to_digit(10).ok_or_else(bad)?;
            *slot = OpCode::new(digit as u8).map_err(|_| bad())?;
        }
        Ok(Genotype { edges })
    }
}

/// Draw a genotype with each edge uniform over the five op codes.
pub fn random_genotype<R: Rng + ?Sized>(rng: &mut R) -> Genotype {
    let mut edges = [OpCode(0); NUM_EDGES];
    for slot in edges.iter_mut() {
        *slot = OpCode(rng.random_range(0..NUM_OPS as u8));
    }
    Genotype { edges }
}

/// Per-edge mutation: each edge is independently resampled with probability
/// `per_edge_rate` to a uniformly chosen *different* op code.
pub fn mutate<R: Rng + ?Sized>(
    genotype: &Genotype,
    per_edge_rate: f64,
    rng: &mut R,
) -> Result<Genotype> {
    if !(0.0..=1.0).contains(&per_edge_rate) {
        return Err(Error::InvalidProbability(per_edge_rate));
    }
    let mut edges = genotype.edges;
    for slot in edges.iter_mut() {
        if rng.random_bool(per_edge_rate) {
            // Sample one of the other four codes.
            let draw = rng.random_range(0..(NUM_OPS - 1) as u8);
            let code = if draw < slot.code() { draw } else { draw + 1 };
            *slot = OpCode(code);
        }
    }
    Ok(Genotype { edges })
}

/// Uniform crossover: each edge position is swapped between the two children
/// with probability 0.5, so the per-position allele multiset is preserved.
pub fn crossover<R: Rng + ?Sized>(
    a: &Genotype,
    b: &Genotype,
    rng: &mut R,
) -> (Genotype, Genotype) {
    let mut child_a = a.edges;
    let mut child_b = b.edges;
    for position in 0..NUM_EDGES {
        if rng.random_bool(0.5) {
            std::mem::swap(&mut child_a[position], &mut child_b[position]);
        }
    }
    (Genotype { edges: child_a }, Genotype { edges: child_b })
}

/// Iterate over all 15,625 genotypes in ascending [`ArchIndex`] order.
pub fn enumerate_all() -> impl Iterator<Item = Genotype> {
    (0..SPACE_SIZE).map(|i| Genotype::from_index(ArchIndex(i as u16)))
}
