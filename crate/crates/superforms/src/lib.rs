//! Exact symbolic kernel for the calculus of differential and integral forms
//! on a polynomial superdomain `K^{p|q}`.
//!
//! Everything is computed over exact rationals on one coordinate chart with
//! `p` even coordinates `z_i` and `q` odd coordinates `th_a`. The crate
//! provides the graded polynomial algebra, the Weyl superalgebra of
//! differential operators, superforms and polyvector fields, the Berezinian
//! module with its integral-form differential, the universal de Rham and
//! Spencer complexes with their homotopy operators, the triple-tensor double
//! complex, polynomial coordinate changes, homotopies for the Poincaré
//! lemmas, and an exact spectral-sequence engine for finite double complexes.

pub mod berezin;
pub mod coord;
pub mod coord_change;
pub mod forms;
pub mod grammar;
pub mod linalg;
pub mod poincare;
pub mod polyfields;
pub mod scalar;
pub mod specseq;
pub mod superpoly;
pub mod universal;
pub mod verify;
pub mod virtual_double;
pub mod weyl;

pub use coord::{Dims, Var};
pub use scalar::Scalar;
