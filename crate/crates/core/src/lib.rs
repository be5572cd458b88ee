//! Polynomial automorphisms, their formal inverses and the operator
//! algebras attached to them.

pub mod algebra;
pub mod constructions;
pub mod context;
pub mod error;
pub mod field;
pub mod formats;
pub mod identities;
pub mod inverse;
pub mod matrix;
pub mod monomial;
pub mod parse;
pub mod polymap;
pub mod polynomial;
pub mod simplicity;

pub use algebra::{
    algebra_to_map, enumerate_terms, evaluate_term, generic_realization, map_to_algebra, polarize,
    HomogeneousFormVector, MultilinearOp, OperatorAlgebra, TermExpr, TermTree,
};
pub use constructions::{
    blowup_cubic, blowup_inverse, char_p_example, corpus, embed_prime, embed_simple, embedding_steps, reduce_degree,
    reduce_degree_traced, Collision, EmbeddingStep, Fp2, Fp2Elem, Reduction, ReductionRound,
};
pub use context::{Ctx, VarContext};
pub use error::{Error, Result};
pub use field::{Field, Scalar};
pub use formats::{parse_exprs, parse_field, parse_oalg, parse_pmap, parse_scalar, write_oalg, write_pmap};
pub use identities::{
    check_adxx_nilpotence, check_capelli, check_engel, check_yagzhev, element_nilpotence, CapelliReport,
    EngelReport, YagzhevReport,
};
pub use inverse::{
    decide_invertibility, inverse_series, verify_inverse, Certificate, InverseSeries, InvertibilityReport, Verdict,
};
pub use matrix::{PolyMatrix, ScalarMatrix};
pub use monomial::Monomial;
pub use parse::parse_polynomial;
pub use polymap::{AffineMap, PolyMap};
pub use polynomial::Polynomial;
pub use simplicity::{check_simplicity, ideal_closure, Simplicity, SimplicityVerdict};
