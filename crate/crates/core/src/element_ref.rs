//! Dotted ontology-element coordinates: `prefix.local` or
//! `prefix.local.version`, e.g. `foaf.Person` or `foaf.Person.20050603`.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::str::FromStr;

use thiserror::Error;

use crate::rdf::{vocab, Graph, PrefixRegistry, Term};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ElementRefError {
    #[error("element reference {0:?} must have the form prefix.name or prefix.name.version")]
    Malformed(String),
    #[error("element reference {0:?} has an empty segment")]
    EmptySegment(String),
    #[error("unknown prefix {0:?}")]
    UnknownPrefix(String),
    #[error("resolved IRI {0:?} is not absolute")]
    InvalidIri(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum ElementKind {
    Class,
    Property,
    #[default]
    Unknown,
}

/// Identity is (prefix, local, version); `kind` is annotation only.
#[derive(Debug, Clone)]
pub struct ElementRef {
    prefix: String,
    local: String,
    version: Option<String>,
    kind: ElementKind,
}

impl ElementRef {
    pub fn new(
        prefix: impl Into<String>,
        local: impl Into<String>,
        version: Option<String>,
    ) -> Result<ElementRef, ElementRefError> {
        let r = ElementRef {
            prefix: prefix.into(),
            local: local.into(),
            version,
            kind: ElementKind::Unknown,
        };
        let segments = [Some(&r.prefix), Some(&r.local), r.version.as_ref()];
        for s in segments.into_iter().flatten() {
            if s.is_empty() {
                return Err(ElementRefError::EmptySegment(r.to_string()));
            }
            if !valid_segment(s) {
                return Err(ElementRefError::Malformed(r.to_string()));
            }
        }
        Ok(r)
    }

    pub fn prefix(&self) -> &str {
        &self.prefix
    }

    pub fn local(&self) -> &str {
        &self.local
    }

    pub fn version(&self) -> Option<&str> {
        self.version.as_deref()
    }

    pub fn kind(&self) -> ElementKind {
        self.kind
    }

    pub fn with_kind(mut self, kind: ElementKind) -> Self {
        self.kind = kind;
        self
    }

    pub fn without_version(&self) -> ElementRef {
        ElementRef {
            version: None,
            ..self.clone()
        }
    }

    /// Whether a template targeting `target` serves a request for `self`.
    /// A versionless reference matches every version.
    pub fn matches_target(&self, target: &ElementRef) -> bool {
        self.prefix == target.prefix
            && self.local == target.local
            && (self.version.is_none() || self.version == target.version)
    }

    /// Namespace for the prefix (and version) followed by the local name.
    ///
    /// A version missing from the registry's version map falls back to the
    /// unversioned namespace and logs a warning.
    pub fn resolve(&self, reg: &PrefixRegistry) -> Result<Term, ElementRefError> {
        let entry = reg
            .get(&self.prefix)
            .ok_or_else(|| ElementRefError::UnknownPrefix(self.prefix.clone()))?;
        let namespace = match &self.version {
            None => &entry.namespace,
            Some(v) => match entry.versions.get(v) {
                Some(ns) => ns,
                None => {
                    tracing::warn!(
                        element = %self,
                        "version {v} not registered for prefix {}; using unversioned namespace",
                        self.prefix
                    );
                    &entry.namespace
                }
            },
        };
        let iri = format!("{namespace}{}", self.local);
        Term::iri(iri).map_err(|e| match e {
            crate::rdf::TermError::InvalidIri(s) => ElementRefError::InvalidIri(s),
            other => ElementRefError::InvalidIri(other.to_string()),
        })
    }

    /// Reverse of [`resolve`](Self::resolve) for IRIs under a registered
    /// namespace whose local part is a valid segment.
    pub fn compact(iri: &str, reg: &PrefixRegistry) -> Option<ElementRef> {
        let (prefix, version, ns) = reg.split_iri(iri)?;
        ElementRef::new(prefix, &iri[ns.len()..], version.map(str::to_owned)).ok()
    }

    /// Looks the element up in an ontology and records whether it is a class
    /// or a property. Leaves `Unknown` when neither kind of axiom is present.
    pub fn resolve_kind(self, ontology: &Graph, reg: &PrefixRegistry) -> ElementRef {
        let kind = match self.resolve(reg) {
            Ok(term) => kind_in(ontology, &term),
            Err(_) => ElementKind::Unknown,
        };
        self.with_kind(kind)
    }
}

/// Classifies a term using the schema axioms of `g`.
pub fn kind_in(g: &Graph, term: &Term) -> ElementKind {
    let types = g.values_of(term, &vocab::rdf_type());
    let is = |iri: &str| types.iter().any(|t| t.as_iri() == Some(iri));
    if is(vocab::OWL_CLASS) || is(vocab::RDFS_CLASS) {
        return ElementKind::Class;
    }
    if is(vocab::RDF_PROPERTY)
        || is(vocab::OWL_OBJECT_PROPERTY)
        || is(vocab::OWL_DATATYPE_PROPERTY)
        || is(vocab::OWL_ANNOTATION_PROPERTY)
    {
        return ElementKind::Property;
    }
    let has = |iri: &str| g.objects(term, &vocab::named(iri)).next().is_some();
    if has(vocab::RDFS_SUBCLASS_OF) || !g.subjects_for(&vocab::named(vocab::RDFS_DOMAIN), term).is_empty() {
        return ElementKind::Class;
    }
    if has(vocab::RDFS_DOMAIN) || has(vocab::RDFS_RANGE) {
        return ElementKind::Property;
    }
    ElementKind::Unknown
}

fn valid_segment(s: &str) -> bool {
    !s.contains('.')
        && !s
            .chars()
            .any(|c| c.is_whitespace() || c.is_control() || matches!(c, '<' | '>' | '"' | '&' | '\'' | '#' | '/' | '?'))
}

/// Parses the dotted textual form.
pub fn parse_element_ref(text: &str) -> Result<ElementRef, ElementRefError> {
    let parts: Vec<&str> = text.split('.').collect();
    let (prefix, local, version) = match parts.as_slice() {
        [p, l] => (*p, *l, None),
        [p, l, v] => (*p, *l, Some((*v).to_owned())),
        _ => return Err(ElementRefError::Malformed(text.to_owned())),
    };
    if parts.iter().any(|s| s.is_empty()) {
        return Err(ElementRefError::EmptySegment(text.to_owned()));
    }
    ElementRef::new(prefix, local, version).map_err(|_| ElementRefError::Malformed(text.to_owned()))
}

impl FromStr for ElementRef {
    type Err = ElementRefError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_element_ref(s)
    }
}

impl fmt::Display for ElementRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.prefix, self.local)?;
        if let Some(v) = &self.version {
            write!(f, ".{v}")?;
        }
        Ok(())
    }
}

impl ElementRef {
    fn key(&self) -> (&str, &str, Option<&str>) {
        (&self.prefix, &self.local, self.version.as_deref())
    }
}

impl PartialEq for ElementRef {
    fn eq(&self, other: &Self) -> bool {
        self.key() == other.key()
    }
}

impl Eq for ElementRef {}

impl Hash for ElementRef {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.key().hash(state);
    }
}

impl PartialOrd for ElementRef {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ElementRef {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key().cmp(&other.key())
    }
}
