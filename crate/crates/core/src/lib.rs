//! Exact and numeric rank computations for small dense tensors: tensor rank,
//! symmetric (Waring) rank, and border rank over prime fields, the rationals,
//! and real/complex floats.
//!
//! The crate is organized around:
//! - [`field`]: tagged scalars over GF(p), Q, f64, and complex f64;
//! - [`tensor`]: dense tensors, symmetric tensors, rank-one terms;
//! - [`multilinear`]: unfoldings, exact/tolerant matrix rank, Kruskal rank
//!   and uniqueness certificates, concision;
//! - [`cubic`]: the constructive decomposition of binary cubics into at most
//!   three symmetric rank-one terms, with its change-of-variables case tree;
//! - [`oracle`]: exhaustive ground-truth rank/symmetric-rank search over
//!   small finite fields, censuses, and theorem sweep harnesses;
//! - [`numeric`]: the 2x2x2 pencil test, border-rank-2 normal forms and
//!   their approximating curves, and best symmetric rank-one approximation;
//! - [`report`]: the per-tensor analysis record and its JSON form;
//! - [`io`]: the tensor file format.

pub mod error;
pub mod field;
pub mod tensor;
pub mod matrix;
pub mod multilinear;
pub mod cubic;
pub mod oracle;
pub mod numeric;
pub mod report;
pub mod io;
pub mod instances;
pub(crate) mod util;

pub use cubic::{apply_substitution, decompose_s3f2, CaseLabel, CaseStep, CaseTrace};
pub use error::{Error, Result};
pub use field::{characteristic, field_elements, ArithOp, FieldTag, Scalar};
pub use multilinear::{
    concise_reduce, k_generic, kruskal_certify, kruskal_rank, lemma6_structure_check,
    matrix_rank, mu_max_srank, rank_a, unfold, unfold_mode, KruskalCertificate, KruskalRank,
    Lemma6Outcome, MuValue, UnfoldedMatrix,
};
pub use numeric::{
    banach_symmetry_check, best_sym_rank1, detect_border_rank2, eps_curve, eval_eps,
    pencil_rank2_test, BanachReport, BorderForm, EpsCurve, PencilVerdict, SymRankOne,
};
pub use oracle::{
    brute_rank, brute_rank_with_witness, brute_srank, brute_srank_with_witness, census,
    theorem_sweep, Budget, CensusReport, SrankResult, SweepMode, SweepReport, TheoremId,
};
pub use report::{analyze, AnalyzeOptions, Method, RankReport, RankValue, SrankValue};
pub use tensor::{
    inner_product, rank_one, reconstruct, sym_power, symmetrize, Decomposition, RankOneTerm,
    SymTensor, Tensor,
};
