//! Exact homological invariants of finitely presented connected graded
//! algebras.
//!
//! Given a presentation of a connected N-graded algebra A over Q or F_p, the
//! pipeline computes, degree by degree under explicit truncation caps:
//!
//! * a truncated two-sided noncommutative Gröbner basis, normal forms, and
//!   Hilbert dimensions (`groebner`);
//! * the minimal graded free resolution of the trivial module and the
//!   Gorenstein signature (d, l) (`resolution`);
//! * the bigraded Ext-algebra with its Yoneda product (`extalgebra`);
//! * the Frobenius pairing of the Ext-algebra and its Nakayama automorphism
//!   (`frobenius`);
//! * lifts of algebra automorphisms to the resolution, the induced
//!   automorphisms of the Ext-algebra, homological determinants, and the
//!   recovered Nakayama automorphism of A itself (`nakayama`);
//! * graded twists of the presentation (`twist`);
//! * a deterministic machine-readable report over the whole pipeline
//!   (`report`).
//!
//! All arithmetic is exact; every comparison in the pipeline is an equality
//! of field elements.

pub mod complexes;
pub mod error;
pub mod extalgebra;
pub mod freealg;
pub mod frobenius;
pub mod groebner;
pub mod linalg;
pub mod nakayama;
pub mod presentation;
pub mod report;
pub mod resolution;
pub mod twist;

pub use error::{Error, Result};
