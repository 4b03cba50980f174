//! Exact combinatorics of third-order free cumulants.
//!
//! The crate implements the calculus of annular non-crossing permutations
//! and partitioned permutations, exact-rational free-cumulant tables, the
//! cumulants-of-products summation for orders one to three with an
//! independent moment-extraction oracle, the half/double bijection on
//! doubled circles, and the closed forms for products of free circular
//! elements. Everything is exact: identities are checked as equalities of
//! `BigRational` values or of canonical multisets.
//!
//! ```
//! use trifree::{circular, phi, ratio_to_string, GammaShape, GroupedWord};
//!
//! // NC(4) has Catalan(4) = 14 elements
//! let nc4 = trifree::count_snc(&GammaShape::new(&[4]).unwrap(), 12).unwrap();
//! assert_eq!(nc4, 14);
//!
//! // the third-order fluctuation moment of cc* on three circles of two
//! let circ = circular();
//! let c = circ.resolve("c", false).unwrap();
//! let group = vec![c.clone(), c.adjoint()];
//! let word = GroupedWord::new(vec![group.clone(), group.clone(), group]).unwrap();
//! assert_eq!(ratio_to_string(&phi(&circ, &word, 12).unwrap()), "2");
//! ```

mod backtrack;

pub mod annular;
pub mod dist;
pub mod error;
pub mod halfmap;
pub mod models;
pub mod partitioned;
pub mod perm;
pub mod product;

pub use annular::{
    connectivity_pattern, count_snc, enumerate_snc, for_each_snc, is_annular_noncrossing,
    is_noncrossing_wrt, leq, lesssim_r, separates, ConnectivityPattern,
};
pub use dist::{
    kappa_from_moments, kappa_vp, load_spec, phi, phi_stats, ratio_from_str, ratio_to_string, save_spec,
    DeterminingData, Distribution, GroupedWord, KappaExtractor, Ratio, Symbol,
};
pub use error::{Error, Result};
pub use halfmap::{
    double, double_pp, half, half_pp, is_parity_reversing, separated_parity_reversing,
};
pub use models::{
    circular, circular_with, closed_form_beta, closed_form_hh_star_cumulant,
    closed_form_hh_star_moment, closed_form_zeta_power, r_diagonal, seeded_generic, semicircular,
    semicircular_with, BetaTables, Check, StarPattern,
};
pub use partitioned::{
    classify, enumerate_psnc, is_psnc, lift_perm, lift_pp, pp_length, EnumMode, PSClass,
    PartitionedPermutation,
};
pub use perm::{GammaShape, Permutation, SetPartition};
pub use product::{
    product_cumulant, product_cumulant_oracle, product_cumulant_stats, verify_appendix_bijections, AppendixReport,
    Grouping, LemmaReport, SizesVector,
};

/// Default enumeration caps used by the CLI and the verification suites.
pub mod caps {
    /// full S_n scans and brute-mode coarsenings
    pub const BRUTE: u32 = 7;
    /// structural enumeration of S_NC / PS_NC
    pub const STRUCTURAL: u32 = 12;
    /// moment-extraction oracle
    pub const ORACLE: u32 = 8;
    /// paired-letter summations may go further than the structural cap
    pub const PAIRED: u32 = 24;
}
