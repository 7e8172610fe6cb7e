//! Exact arithmetic, wall structures and cubulation checks for the Formanek–Procesi
//! groups `G_n = F_{n+1} ⋊_σ F_n`.

pub mod error;
pub mod group;

pub use error::{FpError, Result};
pub use group::{element_of_word, grid_word, reduce, sigma_apply, Element, Gen, GroupContext, Letter, Word};
pub mod levels;
pub mod subgroup;
pub mod cayley;
pub mod walls;
pub mod cube;
