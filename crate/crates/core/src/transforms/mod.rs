//! Machine-to-machine constructions.

mod blank;
mod combine;
mod crossing;
mod pda;

pub use blank::{to_blank_skipping, to_blank_skipping_recognition};
pub use combine::{
    amplify_alpha, amplify_one_sided, bounded_and, bounded_or, complement_swap, intersect_regular, union_one_sided,
    union_regular,
};
pub use crossing::{annotate_directions, compose_crossing, crossing_matrix, d_delta, qd_index, qd_pair, CrossingMatrix};
pub use pda::{lpa2_to_1ppda, ppda_to_lpa2};
