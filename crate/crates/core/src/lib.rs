//! Self-similar groups acting on the binary rooted tree.
//!
//! The crate builds finite automata from kneading data or from external
//! angles of the doubling map, and answers algebraic questions about the
//! groups their states generate: the word problem, nuclei, abelianizations,
//! growth of activity, torsion, self-similar endomorphisms, and finite
//! presentation data.
//!
//! Conventions, fixed once here and relied on everywhere:
//!
//! * The tree is `X*` over `X = {0, 1}`; vertices read left to right from
//!   the root.
//! * Automorphisms act on the right, so in a product `g h` the factor `g`
//!   acts first.
//! * Every tree automorphism decomposes as `g = <<g|_0, g|_1>> s^e`:
//!   sections first, then the swap `s` of the two subtrees when `e = 1`.

pub mod angles;
pub mod automaton;
pub mod bits;
pub mod kneading;
pub mod parser;
pub mod presentation;
pub mod solver;
pub mod word;

mod error;

pub use error::Error;
