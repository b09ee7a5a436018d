//! User profiles.

use std::collections::BTreeSet;

use thiserror::Error;

use super::closure::Closure;
use crate::rdf::{vocab, Graph, Term};

pub const PROFILE_NS: &str = "https://w3id.org/semrender/profile#";
pub const PROFILE_USES_PROTOCOL: &str = "https://w3id.org/semrender/profile#usesProtocol";
pub const PROFILE_PREFERS_AESTHETIC: &str = "https://w3id.org/semrender/profile#prefersAesthetic";
pub const PROFILE_HAS_IMPAIRMENT: &str = "https://w3id.org/semrender/profile#hasImpairment";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProfileError {
    #[error("profile subject {0} does not occur in the profile graph")]
    SubjectAbsent(Term),
}

/// Facets are stored as closure representatives; an absent facet is `None`
/// or an empty set.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct UserProfile {
    pub subject: Option<Term>,
    pub protocol: Option<Term>,
    pub aesthetic: Option<Term>,
    pub impairments: BTreeSet<Term>,
}

impl UserProfile {
    /// No facets at all.
    pub fn empty() -> UserProfile {
        UserProfile::default()
    }

    pub fn is_empty(&self) -> bool {
        self.protocol.is_none() && self.aesthetic.is_none() && self.impairments.is_empty()
    }
}

/// Reads the facets of `subject`. Subjects, predicates and values are all
/// matched through `closure`, so aligned synonyms are recognized.
pub fn extract_profile(g: &Graph, subject: &Term, closure: &Closure) -> Result<UserProfile, ProfileError> {
    let aliases = closure.class_of(subject);
    let facets: Vec<_> = g
        .iter()
        .filter(|t| aliases.contains(t.subject()))
        .collect();
    if facets.is_empty() && !aliases.iter().any(|a| g.mentions(a)) {
        return Err(ProfileError::SubjectAbsent(subject.clone()));
    }
    let values = |facet: &str| -> BTreeSet<Term> {
        let p = vocab::named(facet);
        facets
            .iter()
            .filter(|t| closure.same(t.predicate(), &p))
            .map(|t| closure.canonical(t.object()))
            .collect()
    };
    let single = |facet: &str| {
        let all = values(facet);
        if all.len() > 1 {
            tracing::warn!(facet, count = all.len(), "several values for a single-valued facet; using the smallest");
        }
        all.into_iter().next()
    };
    Ok(UserProfile {
        subject: Some(closure.canonical(subject)),
        protocol: single(PROFILE_USES_PROTOCOL),
        aesthetic: single(PROFILE_PREFERS_AESTHETIC),
        impairments: values(PROFILE_HAS_IMPAIRMENT),
    })
}

/// The profile subject to use for a profile document: the subject named by
/// `fragment` when given and present, else the smallest subject carrying
/// any facet.
pub fn profile_subject(g: &Graph, fragment: Option<&str>, closure: &Closure) -> Option<Term> {
    let facet_preds = [PROFILE_USES_PROTOCOL, PROFILE_PREFERS_AESTHETIC, PROFILE_HAS_IMPAIRMENT]
        .map(vocab::named);
    let carriers: BTreeSet<&Term> = g
        .iter()
        .filter(|t| facet_preds.iter().any(|p| closure.same(t.predicate(), p)))
        .map(|t| t.subject())
        .collect();
    if let Some(fragment) = fragment.filter(|f| !f.is_empty()) {
        let named = g
            .iter()
            .map(|t| t.subject())
            .find(|s| s.as_iri().is_some_and(|iri| iri.rsplit_once('#').is_some_and(|(_, f)| f == fragment)));
        if let Some(s) = named {
            return Some(s.clone());
        }
    }
    carriers.into_iter().next().cloned()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcher::closure::{equivalence_closure, AlignmentSet, LinkKind};
    use crate::rdf::{parse_graph, RdfFormat};

    const PROFILE: &str = "@prefix p: <https://w3id.org/semrender/profile#> .
@prefix a: <http://example.org/a#> .
a:user34 p:usesProtocol a:WAP2 ; p:prefersAesthetic a:simple ; p:hasImpairment a:daltonic .
a:user35 a a:User .
";

    fn a(local: &str) -> Term {
        Term::iri(format!("http://example.org/a#{local}")).unwrap()
    }

    fn z(local: &str) -> Term {
        Term::iri(format!("http://example.org/z#{local}")).unwrap()
    }

    fn graph() -> Graph {
        parse_graph(PROFILE, RdfFormat::Turtle).unwrap()
    }

    #[test]
    fn reads_facets() {
        let p = extract_profile(&graph(), &a("user34"), &Closure::identity()).unwrap();
        assert_eq!(p.protocol, Some(a("WAP2")));
        assert_eq!(p.aesthetic, Some(a("simple")));
        assert_eq!(p.impairments, BTreeSet::from([a("daltonic")]));
    }

    #[test]
    fn facets_through_alignment() {
        let mut set = AlignmentSet::new();
        set.insert(a("WAP2"), z("WAP2.0"), LinkKind::SameAs).unwrap();
        let c = equivalence_closure(&set).unwrap();
        let p = extract_profile(&graph(), &a("user34"), &c).unwrap();
        assert!(c.same(p.protocol.as_ref().unwrap(), &z("WAP2.0")));
    }

    #[test]
    fn no_facets_is_empty_profile() {
        let p = extract_profile(&graph(), &a("user35"), &Closure::identity()).unwrap();
        assert!(p.is_empty());
    }

    #[test]
    fn absent_subject_errors() {
        assert!(matches!(
            extract_profile(&graph(), &a("nobody"), &Closure::identity()),
            Err(ProfileError::SubjectAbsent(_))
        ));
    }

    #[test]
    fn subject_selection() {
        let g = graph();
        let c = Closure::identity();
        assert_eq!(profile_subject(&g, Some("user35"), &c), Some(a("user35")));
        assert_eq!(profile_subject(&g, None, &c), Some(a("user34")));
        assert_eq!(profile_subject(&g, Some("missing"), &c), Some(a("user34")));
        assert_eq!(profile_subject(&Graph::new(), None, &c), None);
    }
}
