//! Names, process terms, substitution and renaming policies.

pub mod context;
pub mod name;
pub mod process;
pub mod subst;

pub use context::Context;
pub use name::{fresh_name, Name};
pub use process::{
    all_names, alpha_eq, bound_names, fill_holes, first_ill_formed, free_names, is_successful, ung_sub, well_formed,
    CalculusId, ChannelSubject, Process,
};
pub use subst::{apply_subst, freshen_binders, lift_substitution, RenamingPolicy, Substitution};
