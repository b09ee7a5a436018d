//! Minimal RDF data model.
//!
//! A [`Graph`] is a set of [`Triple`]s with two ordered indexes, one keyed by
//! subject/predicate and one by predicate/object, which is all the lookup the
//! rest of the engine needs. Graphs are built once and then shared read-only.

mod parse;
mod prefix;
mod serialize;
pub mod vocab;

use std::collections::BTreeSet;
use std::fmt;

pub use parse::{parse_graph, parse_graph_with_base, parse_sniffed, ParseError};
pub use prefix::{PrefixEntry, PrefixError, PrefixRegistry};
pub use serialize::{serialize_graph, serialize_turtle_with_prefixes};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TermError {
    #[error("not an absolute IRI: {0:?}")]
    InvalidIri(String),
    #[error("invalid blank node label: {0:?}")]
    InvalidBlankLabel(String),
    #[error("invalid language tag: {0:?}")]
    InvalidLanguage(String),
    #[error("triple subject must be an IRI or blank node, got {0}")]
    InvalidSubject(Term),
    #[error("triple predicate must be an IRI, got {0}")]
    InvalidPredicate(Term),
}

/// Serialization formats understood by [`parse_graph`] and [`serialize_graph`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RdfFormat {
    Turtle,
    NTriples,
}

impl std::str::FromStr for RdfFormat {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "turtle" | "ttl" | "text/turtle" => Ok(RdfFormat::Turtle),
            "ntriples" | "n-triples" | "nt" | "application/n-triples" => Ok(RdfFormat::NTriples),
            _ => Err(ParseError::UnsupportedFormat(s.to_owned())),
        }
    }
}

/// A literal value. `datatype` is `None` for plain strings (`xsd:string`)
/// and for language-tagged strings.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    value: String,
    language: Option<String>,
    datatype: Option<String>,
}

impl Literal {
    pub fn value(&self) -> &str {
        &self.value
    }

    pub fn language(&self) -> Option<&str> {
        self.language.as_deref()
    }

    pub fn datatype(&self) -> Option<&str> {
        self.datatype.as_deref()
    }
}

/// An RDF term.
///
/// The derived ordering is the engine's stable total order: IRIs before blank
/// nodes before literals, then codepoint order on the value, then language,
/// then datatype.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Iri(String),
    Blank(String),
    Literal(Literal),
}

impl Term {
    pub fn iri(value: impl Into<String>) -> Result<Term, TermError> {
        let value = value.into();
        if is_absolute_iri(&value) {
            Ok(Term::Iri(value))
        } else {
            Err(TermError::InvalidIri(value))
        }
    }

    pub fn blank(label: impl Into<String>) -> Result<Term, TermError> {
        let label = label.into();
        let valid = !label.is_empty()
            && label
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
            && !label.starts_with('-');
        if valid {
            Ok(Term::Blank(label))
        } else {
            Err(TermError::InvalidBlankLabel(label))
        }
    }

    pub fn literal(value: impl Into<String>) -> Term {
        Term::Literal(Literal {
            value: value.into(),
            language: None,
            datatype: None,
        })
    }

    pub fn lang_literal(
        value: impl Into<String>,
        language: impl Into<String>,
    ) -> Result<Term, TermError> {
        let language = language.into();
        let valid = !language.is_empty()
            && language
                .split('-')
                .all(|part| !part.is_empty() && part.chars().all(|c| c.is_ascii_alphanumeric()));
        if !valid {
            return Err(TermError::InvalidLanguage(language));
        }
        Ok(Term::Literal(Literal {
            value: value.into(),
            language: Some(language.to_ascii_lowercase()),
            datatype: None,
        }))
    }

    pub fn typed_literal(
        value: impl Into<String>,
        datatype: impl Into<String>,
    ) -> Result<Term, TermError> {
        let datatype = datatype.into();
        if !is_absolute_iri(&datatype) {
            return Err(TermError::InvalidIri(datatype));
        }
        if datatype == vocab::XSD_STRING {
            return Ok(Term::literal(value));
        }
        Ok(Term::Literal(Literal {
            value: value.into(),
            language: None,
            datatype: Some(datatype),
        }))
    }

    pub fn is_iri(&self) -> bool {
        matches!(self, Term::Iri(_))
    }

    pub fn is_blank(&self) -> bool {
        matches!(self, Term::Blank(_))
    }

    pub fn is_literal(&self) -> bool {
        matches!(self, Term::Literal(_))
    }

    /// IRI string, blank label or literal lexical form.
    pub fn value(&self) -> &str {
        match self {
            Term::Iri(v) | Term::Blank(v) => v,
            Term::Literal(l) => &l.value,
        }
    }

    pub fn as_iri(&self) -> Option<&str> {
        match self {
            Term::Iri(v) => Some(v),
            _ => None,
        }
    }

    /// The part of an IRI after its last `#` or `/`, or the lexical form for
    /// other terms.
    pub fn local_name(&self) -> &str {
        match self {
            Term::Iri(v) => {
                let cut = v.rfind(['#', '/']).map(|i| i + 1).unwrap_or(0);
                &v[cut..]
            }
            other => other.value(),
        }
    }
}

impl fmt::Display for Term {
    /// N-Triples form.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        serialize::write_term(f, self)
    }
}

pub(crate) fn is_absolute_iri(s: &str) -> bool {
    let Some(colon) = s.find(':') else {
        return false;
    };
    let scheme = &s[..colon];
    let mut chars = scheme.chars();
    let scheme_ok = chars.next().is_some_and(|c| c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || matches!(c, '+' | '-' | '.'));
    scheme_ok
        && !s
            .chars()
            .any(|c| c.is_whitespace() || c.is_control() || matches!(c, '<' | '>' | '"' | '{' | '}' | '|' | '\\' | '^' | '`'))
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Triple {
    subject: Term,
    predicate: Term,
    object: Term,
}

impl Triple {
    pub fn new(subject: Term, predicate: Term, object: Term) -> Result<Triple, TermError> {
        if subject.is_literal() {
            return Err(TermError::InvalidSubject(subject));
        }
        if !predicate.is_iri() {
            return Err(TermError::InvalidPredicate(predicate));
        }
        Ok(Triple {
            subject,
            predicate,
            object,
        })
    }

    pub fn subject(&self) -> &Term {
        &self.subject
    }

    pub fn predicate(&self) -> &Term {
        &self.predicate
    }

    pub fn object(&self) -> &Term {
        &self.object
    }
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {} .", self.subject, self.predicate, self.object)
    }
}

/// Smallest term under the total order; used as a range lower bound.
fn min_term() -> Term {
    Term::Iri(String::new())
}

/// A set of triples with an optional ontology namespace.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Graph {
    spo: BTreeSet<Triple>,
    // (predicate, object, subject) permutation for type and predicate lookups.
    pos: BTreeSet<(Term, Term, Term)>,
    namespace: Option<String>,
}

impl Graph {
    pub fn new() -> Graph {
        Graph::default()
    }

    pub fn namespace(&self) -> Option<&str> {
        self.namespace.as_deref()
    }

    pub fn set_namespace(&mut self, namespace: impl Into<String>) -> Result<(), TermError> {
        let namespace = namespace.into();
        if !is_absolute_iri(&namespace) {
            return Err(TermError::InvalidIri(namespace));
        }
        self.namespace = Some(namespace);
        Ok(())
    }

    /// Returns `false` when the triple was already present.
    pub fn insert(&mut self, triple: Triple) -> bool {
        if self.spo.contains(&triple) {
            return false;
        }
        self.pos.insert((
            triple.predicate.clone(),
            triple.object.clone(),
            triple.subject.clone(),
        ));
        self.spo.insert(triple)
    }

    pub fn extend_from(&mut self, other: &Graph) {
        for t in other.iter() {
            self.insert(t.clone());
        }
    }

    pub fn contains(&self, triple: &Triple) -> bool {
        self.spo.contains(triple)
    }

    pub fn len(&self) -> usize {
        self.spo.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spo.is_empty()
    }

    /// Triples in (subject, predicate, object) order.
    pub fn iter(&self) -> impl Iterator<Item = &Triple> {
        self.spo.iter()
    }

    /// Objects of `⟨subject, predicate, ?⟩`, in term order.
    pub fn values_of(&self, subject: &Term, predicate: &Term) -> Vec<Term> {
        self.objects(subject, predicate).cloned().collect()
    }

    pub fn objects<'a>(
        &'a self,
        subject: &'a Term,
        predicate: &'a Term,
    ) -> impl Iterator<Item = &'a Term> + 'a {
        let start = Triple {
            subject: subject.clone(),
            predicate: predicate.clone(),
            object: min_term(),
        };
        self.spo
            .range(start..)
            .take_while(move |t| &t.subject == subject && &t.predicate == predicate)
            .map(|t| &t.object)
    }

    /// Every triple whose subject is `subject`.
    pub fn triples_about<'a>(&'a self, subject: &'a Term) -> impl Iterator<Item = &'a Triple> + 'a {
        let start = Triple {
            subject: subject.clone(),
            predicate: min_term(),
            object: min_term(),
        };
        self.spo
            .range(start..)
            .take_while(move |t| &t.subject == subject)
    }

    /// Subjects of `⟨?, predicate, object⟩`, in term order.
    pub fn subjects_for(&self, predicate: &Term, object: &Term) -> Vec<Term> {
        let start = (predicate.clone(), object.clone(), min_term());
        self.pos
            .range(start..)
            .take_while(|(p, o, _)| p == predicate && o == object)
            .map(|(_, _, s)| s.clone())
            .collect()
    }

    /// Distinct subjects that have at least one value for `predicate`.
    pub fn subjects_with(&self, predicate: &Term) -> Vec<Term> {
        let start = (predicate.clone(), min_term(), min_term());
        let subjects: BTreeSet<Term> = self
            .pos
            .range(start..)
            .take_while(|(p, _, _)| p == predicate)
            .map(|(_, _, s)| s.clone())
            .collect();
        subjects.into_iter().collect()
    }

    /// All `⟨subject, object⟩` pairs for a predicate.
    pub fn pairs_for<'a>(&'a self, predicate: &'a Term) -> impl Iterator<Item = (&'a Term, &'a Term)> + 'a {
        let start = (predicate.clone(), min_term(), min_term());
        self.pos
            .range(start..)
            .take_while(move |(p, _, _)| p == predicate)
            .map(|(_, o, s)| (s, o))
    }

    /// Subjects `s` with `⟨s, rdf:type, class⟩`.
    pub fn instances_of(&self, class: &Term) -> Vec<Term> {
        self.subjects_for(&vocab::rdf_type(), class)
    }

    pub fn uses_predicate(&self, predicate: &Term) -> bool {
        let start = (predicate.clone(), min_term(), min_term());
        self.pos
            .range(start..)
            .next()
            .is_some_and(|(p, _, _)| p == predicate)
    }

    /// True when the term occurs anywhere in the graph.
    pub fn mentions(&self, term: &Term) -> bool {
        self.triples_about(term).next().is_some()
            || self.uses_predicate(term)
            || self.spo.iter().any(|t| &t.object == term)
    }
}

impl FromIterator<Triple> for Graph {
    fn from_iter<I: IntoIterator<Item = Triple>>(iter: I) -> Self {
        let mut g = Graph::new();
        for t in iter {
            g.insert(t);
        }
        g
    }
}
