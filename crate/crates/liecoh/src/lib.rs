//! Exact computation workbench for the cohomology of complex simple Lie
//! algebras and the associated small-quantum-group bookkeeping.
//!
//! Everything here is exact: arbitrary-precision integers and rationals,
//! prime fields, integer Laurent polynomials. No floating point, no
//! randomized algorithms on the result path.
//!
//! The crate is organized around the pipeline
//!
//! ```text
//! rootdata -> chevalley -> cecohomology -> uct
//!                 linalg ----^
//! weylinv (Weyl invariant restriction, independent of the complex)
//! qarith  (quantum integers and cyclotomic factorization)
//! ```
//!
//! * [`rootdata`]: root systems from Cartan matrices, exponents, generator
//!   degree tables, Coxeter numbers.
//! * [`chevalley`]: integral Chevalley bases with verified structure
//!   constants, and their mod-p reductions.
//! * [`linalg`]: sparse exact matrices; rank, kernel bases, Smith normal form.
//! * [`cecohomology`]: Chevalley-Eilenberg complexes, Betti numbers over Q
//!   and F_p, integral cohomology, invariant subalgebras, primitives, and
//!   exterior-algebra certification.
//! * [`uct`]: universal-coefficient bookkeeping connecting integral and
//!   modular cohomology.
//! * [`weylinv`]: Weyl invariant rings for classical types and G2, and the
//!   restriction patterns induced by removing a node from the Dynkin diagram.
//! * [`qarith`]: quantum integers, cyclotomic polynomials, denominator sets,
//!   bad roots of unity.

pub mod cecohomology;
pub mod chevalley;
pub mod linalg;
pub mod qarith;
pub mod rootdata;
pub mod uct;
pub mod weylinv;
