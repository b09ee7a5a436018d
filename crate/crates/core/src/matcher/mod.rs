//! Choosing the template that best suits a user profile.
//!
//! Profiles, auxiliary ontologies and template metadata usually come from
//! different vocabularies; an [`AlignmentSet`] of OWL equivalence links ties
//! them together. Scoring applies a hard markup filter derived from the
//! user's protocol, then adds a weighted aesthetic distance and color
//! penalty. Lower totals are better.

mod auxiliary;
mod closure;
mod profile;
mod score;

pub use auxiliary::{
    is_known_color, term_name, AuxError, AuxOntologies, Hierarchy, AUX_CODIFIED_AS,
    AUX_FORBIDS_COLOR, AUX_NS, KNOWN_COLORS,
};
pub use closure::{equivalence_closure, AlignmentSet, Closure, ClosureError, LinkKind, Role};
pub use profile::{
    extract_profile, profile_subject, ProfileError, UserProfile, PROFILE_HAS_IMPAIRMENT,
    PROFILE_NS, PROFILE_PREFERS_AESTHETIC, PROFILE_USES_PROTOCOL,
};
pub use score::{
    rank, score, select_best, ColorConflict, ColorSlot, MatchError, MatchScore, ScoreWeights,
    TemplateFacets,
};
