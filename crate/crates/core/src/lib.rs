//! Exact combinatorial geometry over small finite fields F_q, q odd.
//!
//! The library builds the objects needed to measure pseudo-randomness of
//! norm-distance structures on F_q^d at desk scale (q^d up to about 2^20):
//!
//! * [`field`]: table-backed arithmetic in F_q for odd prime powers q = p^e,
//!   with the quadratic character, square roots and traces.
//! * [`geometry`]: points, spheres { x : ||x|| = t } with ||x|| = Σ x_i²,
//!   closed-form sphere sizes, small orthogonal groups, rank tests.
//! * [`graph`]: the Cayley graphs G_q(a) on F_q^d with connection set
//!   { ||s|| = a }, their spectra by character sums and by a dense
//!   eigensolver, and the 2q^{(d−1)/2} bound check.
//! * [`mixing`]: expander-mixing statistics (neighborhood variance, edge
//!   discrepancy) and exact counts of colored stars and colored pattern
//!   copies under any edge coloring.
//! * [`scheme`]: the association scheme on square-type lines of F_q^d,
//!   d odd, classified by the norms of sums and differences of unit
//!   representatives.
//! * [`simplex`]: edge-norm vectors of point tuples, congruence testing by
//!   exhaustive isometry search, and exact or sampled censuses of which
//!   edge-norm vectors a point set realizes.
//! * [`rng`]: the SplitMix64 generator and seeded subset sampling that make
//!   every randomized routine reproducible from a 64-bit seed.
//!
//! All counts are exact integers; floating point enters only through
//! spectra, where tolerances are explicit at each comparison site.

pub mod field;
pub mod geometry;
pub mod graph;
pub mod mixing;
pub mod rng;
pub mod scheme;
pub mod simplex;
pub mod spectra;

pub use field::{Field, FieldError};
pub use geometry::{Space, Sphere};
pub use graph::{EuclideanGraph, NormColoring, SpectrumReport};
pub use mixing::{CountReport, PatternGraph, VertexSet};
pub use scheme::{OmegaScheme, SchemeReport};
pub use simplex::{CensusResult, EdgeNormVector};

/// Work caps shared by enumeration and counting routines.
///
/// `enumeration` bounds how many points a routine may scan (space scans,
/// sphere listings, dense adjacency builds). `work` bounds tuple tests in
/// backtracking counts and censuses. Callers hitting a cap get an error
/// naming the cap; nothing silently truncates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Caps {
    pub enumeration: u64,
    pub work: u64,
}

impl Default for Caps {
    fn default() -> Self {
        Caps { enumeration: 1 << 20, work: 1_000_000_000 }
    }
}

impl Caps {
    pub fn with_work(work: u64) -> Self {
        Caps { work, ..Caps::default() }
    }
}

/// An exact count. Serializes as a JSON number while that is lossless for
/// doubles (≤ 2^53) and as a decimal string above that, so nothing reading
/// the reports ever rounds an integer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Count(pub u128);

impl serde::Serialize for Count {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.0 <= (1u128 << 53) {
            s.serialize_u64(self.0 as u64)
        } else {
            s.serialize_str(&self.0.to_string())
        }
    }
}

impl std::fmt::Display for Count {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.0.fmt(f)
    }
}

impl From<u64> for Count {
    fn from(v: u64) -> Self {
        Count(v as u128)
    }
}
