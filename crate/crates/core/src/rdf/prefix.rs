use std::collections::BTreeMap;

use thiserror::Error;

use super::{is_absolute_iri, vocab};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PrefixError {
    #[error("invalid prefix {0:?}: must be nonempty and contain no '.'")]
    InvalidPrefix(String),
    #[error("namespace for prefix {prefix:?} is not an absolute IRI: {namespace:?}")]
    InvalidNamespace { prefix: String, namespace: String },
    #[error("invalid version {0:?}")]
    InvalidVersion(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PrefixEntry {
    pub namespace: String,
    /// version string → namespace IRI for that version.
    pub versions: BTreeMap<String, String>,
}

/// Short prefixes (`foaf`) mapped to namespace IRIs, with optional
/// per-version namespaces.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PrefixRegistry {
    entries: BTreeMap<String, PrefixEntry>,
}

impl PrefixRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    /// `rdf`, `rdfs`, `owl` and `xsd`.
    pub fn with_defaults() -> Self {
        let mut reg = Self::new();
        for (p, ns) in [
            ("rdf", vocab::RDF_NS),
            ("rdfs", vocab::RDFS_NS),
            ("owl", vocab::OWL_NS),
            ("xsd", vocab::XSD_NS),
        ] {
            reg.entries.insert(
                p.to_owned(),
                PrefixEntry {
                    namespace: ns.to_owned(),
                    versions: BTreeMap::new(),
                },
            );
        }
        reg
    }

    pub fn insert(&mut self, prefix: &str, namespace: &str) -> Result<(), PrefixError> {
        check_prefix(prefix, namespace)?;
        self.entries.entry(prefix.to_owned()).or_default().namespace = namespace.to_owned();
        Ok(())
    }

    /// Adds a versioned namespace. The unversioned namespace defaults to the
    /// same IRI when the prefix was not registered before.
    pub fn insert_version(
        &mut self,
        prefix: &str,
        version: &str,
        namespace: &str,
    ) -> Result<(), PrefixError> {
        check_prefix(prefix, namespace)?;
        if version.is_empty() || version.contains('.') || version.contains(char::is_whitespace) {
            return Err(PrefixError::InvalidVersion(version.to_owned()));
        }
        let entry = self.entries.entry(prefix.to_owned()).or_default();
        if entry.namespace.is_empty() {
            entry.namespace = namespace.to_owned();
        }
        entry
            .versions
            .insert(version.to_owned(), namespace.to_owned());
        Ok(())
    }

    pub fn get(&self, prefix: &str) -> Option<&PrefixEntry> {
        self.entries.get(prefix)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &PrefixEntry)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v))
    }

    /// Longest registered namespace (unversioned first, then versioned) that
    /// `iri` starts with, as `(prefix, version, namespace)`.
    pub fn split_iri<'a>(&'a self, iri: &'a str) -> Option<(&'a str, Option<&'a str>, &'a str)> {
        let mut best: Option<(&str, Option<&str>, &str)> = None;
        let mut consider = |prefix: &'a str, version: Option<&'a str>, ns: &'a str| {
            if !ns.is_empty() && iri.starts_with(ns) {
                let better = match best {
                    None => true,
                    // On equal length keep the unversioned form.
                    Some((_, v, b)) => ns.len() > b.len() || (ns.len() == b.len() && v.is_some() && version.is_none()),
                };
                if better {
                    best = Some((prefix, version, ns));
                }
            }
        };
        for (prefix, entry) in &self.entries {
            consider(prefix, None, &entry.namespace);
            for (version, ns) in &entry.versions {
                consider(prefix, Some(version), ns);
            }
        }
        best
    }

    /// Prefix usable in Turtle for this IRI: unversioned namespaces only, and
    /// only when the remainder is a plain local name.
    pub(crate) fn namespace_for_turtle<'a>(&'a self, iri: &str) -> Option<(&'a str, &'a str)> {
        self.entries
            .iter()
            .filter(|(prefix, entry)| {
                is_turtle_prefix(prefix)
                    && !entry.namespace.is_empty()
                    && iri.starts_with(&entry.namespace)
                    && is_turtle_local(&iri[entry.namespace.len()..])
            })
            .max_by_key(|(_, entry)| entry.namespace.len())
            .map(|(p, e)| (p.as_str(), e.namespace.as_str()))
    }
}

fn check_prefix(prefix: &str, namespace: &str) -> Result<(), PrefixError> {
    if prefix.is_empty() || prefix.contains('.') || prefix.contains(char::is_whitespace) {
        return Err(PrefixError::InvalidPrefix(prefix.to_owned()));
    }
    if !is_absolute_iri(namespace) {
        return Err(PrefixError::InvalidNamespace {
            prefix: prefix.to_owned(),
            namespace: namespace.to_owned(),
        });
    }
    Ok(())
}

fn is_turtle_prefix(p: &str) -> bool {
    let mut chars = p.chars();
    chars.next().is_some_and(|c| c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
}

fn is_turtle_local(l: &str) -> bool {
    !l.starts_with('-') && l.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
}
