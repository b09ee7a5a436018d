//! Structural description of an ontology element: what a template author
//! can put in a template for it.

use std::collections::{BTreeSet, VecDeque};
use std::fmt::Write;

use thiserror::Error;

use crate::element_ref::{kind_in, ElementKind, ElementRef, ElementRefError};
use crate::rdf::{vocab, Graph, PrefixRegistry, Term};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DescribeError {
    #[error(transparent)]
    Resolve(#[from] ElementRefError),
    #[error("element {0} does not occur in the ontology")]
    NotInOntology(String),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct PropertyInfo {
    pub iri: Term,
    /// Dotted form when the IRI falls under a registered prefix.
    pub element: Option<ElementRef>,
    pub ranges: Vec<Term>,
    /// Object property: values are individuals that can be linked to.
    pub is_relation: bool,
}

impl PropertyInfo {
    pub fn label(&self) -> String {
        match &self.element {
            Some(e) => e.to_string(),
            None => self.iri.value().to_owned(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ElementDescription {
    pub element: ElementRef,
    pub iri: Term,
    pub kind: ElementKind,
    /// Transitive, excluding the element itself.
    pub superclasses: Vec<Term>,
    /// Properties whose declared domain is the class or one of its
    /// superclasses.
    pub properties: Vec<PropertyInfo>,
    /// Properties with no declared domain at all.
    pub global_properties: Vec<PropertyInfo>,
    /// For property elements.
    pub domains: Vec<Term>,
    pub ranges: Vec<Term>,
}

impl ElementDescription {
    /// Properties that point at individuals, i.e. the ones `OmemoGetLink`
    /// makes sense for.
    pub fn relations(&self) -> impl Iterator<Item = &PropertyInfo> {
        self.properties.iter().filter(|p| p.is_relation)
    }
}

pub fn describe_element(
    ontology: &Graph,
    element: &ElementRef,
    reg: &PrefixRegistry,
) -> Result<ElementDescription, DescribeError> {
    let iri = element.resolve(reg)?;
    if !ontology.mentions(&iri) {
        return Err(DescribeError::NotInOntology(element.to_string()));
    }
    let kind = match element.kind() {
        ElementKind::Unknown => kind_in(ontology, &iri),
        k => k,
    };
    let domain = vocab::named(vocab::RDFS_DOMAIN);
    let range = vocab::named(vocab::RDFS_RANGE);

    let mut desc = ElementDescription {
        element: element.clone().with_kind(kind),
        iri: iri.clone(),
        kind,
        superclasses: Vec::new(),
        properties: Vec::new(),
        global_properties: Vec::new(),
        domains: Vec::new(),
        ranges: Vec::new(),
    };

    match kind {
        ElementKind::Property => {
            desc.domains = ontology.values_of(&iri, &domain);
            desc.ranges = ontology.values_of(&iri, &range);
        }
        _ => {
            let supers = superclasses(ontology, &iri);
            let mut props = BTreeSet::new();
            for class in std::iter::once(&iri).chain(supers.iter()) {
                for p in ontology.subjects_for(&domain, class) {
                    props.insert(p);
                }
            }
            desc.properties = props
                .into_iter()
                .map(|p| property_info(ontology, p, reg))
                .collect();
            desc.superclasses = supers.into_iter().collect();
        }
    }
    desc.global_properties = global_properties(ontology)
        .into_iter()
        .map(|p| property_info(ontology, p, reg))
        .collect();
    Ok(desc)
}

/// Transitive `rdfs:subClassOf` successors, cycle-safe.
pub fn superclasses(ontology: &Graph, class: &Term) -> BTreeSet<Term> {
    let sub = vocab::named(vocab::RDFS_SUBCLASS_OF);
    let mut seen = BTreeSet::new();
    let mut queue: VecDeque<Term> = ontology.values_of(class, &sub).into();
    while let Some(next) = queue.pop_front() {
        if next == *class || !seen.insert(next.clone()) {
            continue;
        }
        queue.extend(ontology.values_of(&next, &sub));
    }
    seen
}

fn is_property(ontology: &Graph, term: &Term) -> bool {
    kind_in(ontology, term) == ElementKind::Property
}

fn global_properties(ontology: &Graph) -> BTreeSet<Term> {
    let domain = vocab::named(vocab::RDFS_DOMAIN);
    let rdf_type = vocab::rdf_type();
    let mut out = BTreeSet::new();
    for kind in [
        vocab::RDF_PROPERTY,
        vocab::OWL_OBJECT_PROPERTY,
        vocab::OWL_DATATYPE_PROPERTY,
    ] {
        for p in ontology.subjects_for(&rdf_type, &vocab::named(kind)) {
            if ontology.objects(&p, &domain).next().is_none() {
                out.insert(p);
            }
        }
    }
    for (p, _) in ontology.pairs_for(&vocab::named(vocab::RDFS_RANGE)) {
        if ontology.objects(p, &domain).next().is_none() && is_property(ontology, p) {
            out.insert(p.clone());
        }
    }
    out
}

fn property_info(ontology: &Graph, p: Term, reg: &PrefixRegistry) -> PropertyInfo {
    let ranges = ontology.values_of(&p, &vocab::named(vocab::RDFS_RANGE));
    let typed = |iri: &str| {
        ontology
            .objects(&p, &vocab::rdf_type())
            .any(|t| t.as_iri() == Some(iri))
    };
    let is_relation = typed(vocab::OWL_OBJECT_PROPERTY)
        || (!typed(vocab::OWL_DATATYPE_PROPERTY)
            && ranges.iter().any(|r| {
                r.as_iri().is_some_and(|iri| {
                    !iri.starts_with(vocab::XSD_NS) && iri != vocab::RDFS_LITERAL
                })
            }));
    PropertyInfo {
        element: p.as_iri().and_then(|iri| ElementRef::compact(iri, reg)),
        iri: p,
        ranges,
        is_relation,
    }
}

fn label(t: &Term, reg: &PrefixRegistry) -> String {
    t.as_iri()
        .and_then(|iri| ElementRef::compact(iri, reg))
        .map(|e| e.to_string())
        .unwrap_or_else(|| t.value().to_owned())
}

fn join(terms: &[Term], reg: &PrefixRegistry) -> String {
    if terms.is_empty() {
        return "-".to_owned();
    }
    terms.iter().map(|t| label(t, reg)).collect::<Vec<_>>().join(", ")
}

/// Plain-text listing: one header line, then one line per property.
pub fn render_description(d: &ElementDescription, reg: &PrefixRegistry) -> String {
    let mut out = String::new();
    let kind = match d.kind {
        ElementKind::Class => "class",
        ElementKind::Property => "property",
        ElementKind::Unknown => "element",
    };
    let _ = write!(out, "{kind} {} <{}>", d.element, d.iri.value());
    if !d.superclasses.is_empty() {
        let _ = write!(out, " subClassOf {}", join(&d.superclasses, reg));
    }
    out.push('\n');
    let line = |out: &mut String, p: &PropertyInfo| {
        let role = if p.is_relation { "relation" } else { "property" };
        let _ = writeln!(out, "  {role} {} range {}", p.label(), join(&p.ranges, reg));
    };
    if d.kind == ElementKind::Property {
        let _ = writeln!(out, "  domain {}", join(&d.domains, reg));
        let _ = writeln!(out, "  range {}", join(&d.ranges, reg));
        return out;
    }
    for p in &d.properties {
        line(&mut out, p);
    }
    if !d.global_properties.is_empty() {
        out.push_str("global\n");
        for p in &d.global_properties {
            line(&mut out, p);
        }
    }
    out
}
