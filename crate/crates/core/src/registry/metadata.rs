//! Template features as RDF in the engine's own vocabulary.

use super::features::Template;
use crate::rdf::{vocab, Graph, Term, Triple};

pub const V_NS: &str = "https://w3id.org/semrender/v#";

pub const V_TEMPLATE: &str = "https://w3id.org/semrender/v#Template";
pub const V_PROVIDER: &str = "https://w3id.org/semrender/v#provider";
pub const V_DESIGN: &str = "https://w3id.org/semrender/v#design";
pub const V_TARGETS: &str = "https://w3id.org/semrender/v#targets";
pub const V_KIND: &str = "https://w3id.org/semrender/v#kind";
pub const V_CODE_TYPE: &str = "https://w3id.org/semrender/v#codeType";
pub const V_CODED_IN: &str = "https://w3id.org/semrender/v#codedIn";
pub const V_AESTHETIC: &str = "https://w3id.org/semrender/v#aesthetic";
pub const V_PRIMARY_COLOR: &str = "https://w3id.org/semrender/v#primaryColor";
pub const V_SECONDARY_COLOR: &str = "https://w3id.org/semrender/v#secondaryColor";
pub const V_PREFERRED_WIDTH: &str = "https://w3id.org/semrender/v#preferredWidth";
pub const V_PREFERRED_HEIGHT: &str = "https://w3id.org/semrender/v#preferredHeight";
pub const V_MIN_WIDTH: &str = "https://w3id.org/semrender/v#minWidth";
pub const V_MIN_HEIGHT: &str = "https://w3id.org/semrender/v#minHeight";
pub const V_MAX_WIDTH: &str = "https://w3id.org/semrender/v#maxWidth";
pub const V_MAX_HEIGHT: &str = "https://w3id.org/semrender/v#maxHeight";
pub const V_FONT_RESIZE: &str = "https://w3id.org/semrender/v#fontResize";

/// `v:{provider}.{design}`.
pub fn template_iri(provider: &str, design: &str) -> Term {
    // Identifiers are restricted to [A-Za-z0-9_-].
    vocab::named(&format!("{V_NS}{provider}.{design}"))
}

fn int(n: u32) -> Term {
    Term::typed_literal(n.to_string(), vocab::XSD_INTEGER).expect("xsd:integer is absolute")
}

pub fn template_metadata(t: &Template) -> Graph {
    let s = template_iri(&t.provider, &t.design);
    let f = &t.features;
    let mut pairs: Vec<(&str, Term)> = vec![
        (vocab::RDF_TYPE, vocab::named(V_TEMPLATE)),
        (V_PROVIDER, Term::literal(t.provider.as_str())),
        (V_DESIGN, Term::literal(t.design.as_str())),
        (V_TARGETS, Term::literal(t.target.to_string())),
        (V_KIND, Term::literal(f.kind.as_str())),
        (V_CODED_IN, Term::literal(f.markup_format.as_str())),
        (V_AESTHETIC, Term::literal(f.aesthetic.as_str())),
        (V_PRIMARY_COLOR, Term::literal(f.primary_color.as_str())),
        (V_SECONDARY_COLOR, Term::literal(f.secondary_color.as_str())),
        (V_PREFERRED_WIDTH, int(f.preferred_size.width)),
        (V_PREFERRED_HEIGHT, int(f.preferred_size.height)),
        (V_MIN_WIDTH, int(f.min_size.width)),
        (V_MIN_HEIGHT, int(f.min_size.height)),
        (V_MAX_WIDTH, int(f.max_size.width)),
        (V_MAX_HEIGHT, int(f.max_size.height)),
        (V_FONT_RESIZE, Term::literal(f.font_resize.as_str())),
    ];
    for c in &f.code_types {
        pairs.push((V_CODE_TYPE, Term::literal(c.as_str())));
    }
    pairs
        .into_iter()
        .map(|(p, o)| Triple::new(s.clone(), vocab::named(p), o).expect("valid triple"))
        .collect()
}
