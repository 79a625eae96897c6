//! Exact computational kernel for presentations of Iwasawa algebras of
//! pro-p Iwahori subgroups of split reductive groups over Q_p.
//!
//! The crate builds, for a chosen Cartan type and prime `p > h + 1`
//! (`h` the Coxeter number):
//!
//! * the root system and a compatible ("additive") ordering of positive
//!   roots obtained from a reduced word for the longest Weyl element;
//! * Chevalley structure and commutator constants, computed and verified
//!   through exact arithmetic in the adjoint representation;
//! * the ordered generator set `U_beta, W_delta, V_alpha` of the
//!   pro-p Iwahori group with its valuations and integer weights;
//! * the defining relations `R1`..`R8` of the Iwasawa algebra as elements
//!   of a truncated noncommutative series ring over `Z/p^K`, together with
//!   their reductions modulo the weight filtration;
//! * a graded rewriting engine that normal-orders words over `F_p` with a
//!   strictly decreasing inversion count, and the graded dimension counts
//!   it is checked against.
//!
//! Everything is exact integer / modular arithmetic; no floating point.

pub mod chevalley;
pub mod error;
pub mod grading;
pub mod ncseries;
pub mod ordering;
pub mod polymat;
pub mod presentation;
pub mod root_system;
pub mod straighten;

pub use chevalley::{ChevalleyBasis, CommutatorTable, GroupRelation};
pub use error::{Error, Result};
pub use grading::{brute_force_count, graded_dim_omega};
pub use ncseries::{Modulus, NCPoly, PadicScalar, SeriesCtx, Word};
pub use ordering::{CompatibleOrder, GenKind, Generator, GeneratorTable, ReducedWord};
pub use presentation::{Presentation, PresentationParams, PrimedRelation, RelId, RelationInstance};
pub use root_system::{CartanType, Root, RootSystem, Series};
pub use straighten::{DimBound, GradedElement, Rewriter, Strategy};

/// Smallest prime exceeding `h + 1`; the admissibility threshold for the
/// construction at Coxeter number `h`.
pub fn minimal_admissible_prime(h: i64) -> u64 {
    let mut candidate = (h + 2).max(2) as u64;
    while !is_prime(candidate) {
        candidate += 1;
    }
    candidate
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Guard shared by presentation and CLI entry points.
pub fn check_prime(p: u64, h: i64) -> Result<()> {
    if !is_prime(p) || (p as i64) <= h + 1 {
        return Err(Error::PrimeTooSmall {
            p,
            h,
            minimum: minimal_admissible_prime(h),
        });
    }
    Ok(())
}
