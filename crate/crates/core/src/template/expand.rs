use std::collections::HashMap;
use std::sync::Arc;

use thiserror::Error;

use super::ast::{Macro, Node, TemplateAst};
use crate::element_ref::{kind_in, ElementKind, ElementRef, ElementRefError};
use crate::markup::{encode_query_value, escape, no_data_notice};
use crate::rdf::{vocab, Graph, PrefixRegistry, Term};

/// Deepest nesting of `OmemoConditionalVizFor` expansions.
pub const MAX_DEPTH: usize = 8;

/// Looks up nested templates by `(designerID, designID)`.
pub trait TemplateSource {
    fn lookup(&self, designer: &str, design: &str) -> Option<Arc<TemplateAst>>;
}

/// For rendering without a registry.
pub struct NoTemplates;

impl TemplateSource for NoTemplates {
    fn lookup(&self, _: &str, _: &str) -> Option<Arc<TemplateAst>> {
        None
    }
}

impl TemplateSource for HashMap<(String, String), Arc<TemplateAst>> {
    fn lookup(&self, designer: &str, design: &str) -> Option<Arc<TemplateAst>> {
        self.get(&(designer.to_owned(), design.to_owned())).cloned()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExpandError {
    #[error("template nesting exceeded the maximum depth of {MAX_DEPTH} (reached {depth})")]
    DepthExceeded { depth: usize },
    #[error("nested template {designer}.{design} not found")]
    TemplateNotFound { designer: String, design: String },
    #[error(transparent)]
    Unresolvable(#[from] ElementRefError),
}

/// Everything a render needs besides the focus individual.
#[derive(Clone, Copy)]
pub struct RenderEnv<'a> {
    pub graph: &'a Graph,
    /// Server URL substituted for `OmemoBaseURL`.
    pub base_url: &'a str,
    /// Where `graph` came from, carried into `OmemoGetLink` anchors.
    pub source_url: Option<&'a str>,
    pub templates: &'a dyn TemplateSource,
    pub prefixes: &'a PrefixRegistry,
    /// Schema used to classify elements and find relation ranges.
    pub ontology: Option<&'a Graph>,
}

#[derive(Clone)]
pub struct RenderContext<'a> {
    pub env: RenderEnv<'a>,
    pub focus: Term,
    pub depth: usize,
}

impl<'a> RenderContext<'a> {
    pub fn new(env: RenderEnv<'a>, focus: Term) -> Self {
        RenderContext {
            env,
            focus,
            depth: 0,
        }
    }

    fn nested(&self, focus: Term) -> Self {
        RenderContext {
            env: self.env,
            focus,
            depth: self.depth + 1,
        }
    }
}

/// The channel endpoint under a server base URL.
pub fn endpoint_url(base_url: &str) -> String {
    format!("{}/render", base_url.trim_end_matches('/'))
}

/// How a term is shown in rendered output (before escaping).
pub fn display_value(t: &Term) -> String {
    match t {
        Term::Blank(label) => format!("_:{label}"),
        other => other.value().to_owned(),
    }
}

pub fn expand(ast: &TemplateAst, ctx: &RenderContext<'_>) -> Result<String, ExpandError> {
    if ctx.depth > MAX_DEPTH {
        return Err(ExpandError::DepthExceeded { depth: ctx.depth });
    }
    let env = &ctx.env;
    let mut out = String::new();
    for node in &ast.nodes {
        let m = match node {
            Node::Text(t) => {
                out.push_str(t);
                continue;
            }
            Node::Macro(m) => m,
        };
        match &m.call {
            Macro::GetP { prop } => {
                let p = prop.resolve(env.prefixes)?;
                let values: Vec<String> = env
                    .graph
                    .objects(&ctx.focus, &p)
                    .map(|v| escape(&display_value(v)))
                    .collect();
                out.push_str(&values.join(", "));
            }
            Macro::BaseUrl => out.push_str(env.base_url),
            Macro::ConditionalViz {
                prop,
                designer,
                design,
            } => {
                let p = prop.resolve(env.prefixes)?;
                let values = env.graph.values_of(&ctx.focus, &p);
                if values.is_empty() {
                    continue;
                }
                let nested = env.templates.lookup(designer, design).ok_or_else(|| {
                    ExpandError::TemplateNotFound {
                        designer: designer.clone(),
                        design: design.clone(),
                    }
                })?;
                for v in values {
                    out.push_str(&expand(&nested, &ctx.nested(v))?);
                }
            }
            Macro::GetLink { relation } => {
                let r = relation.resolve(env.prefixes)?;
                let links: Vec<String> = env
                    .graph
                    .objects(&ctx.focus, &r)
                    .map(|v| link(env, &r, v))
                    .collect();
                out.push_str(&links.join(", "));
            }
        }
    }
    Ok(out)
}

fn link(env: &RenderEnv<'_>, relation: &Term, value: &Term) -> String {
    let text = escape(&display_value(value));
    if value.is_literal() {
        return text;
    }
    let Some(target) = link_target(env, relation, value) else {
        return text;
    };
    let mut href = format!(
        "{}?action=renderOutput&amp;object={}",
        endpoint_url(env.base_url),
        encode_query_value(&target.to_string())
    );
    if let Some(source) = env.source_url {
        href.push_str("&amp;source=");
        href.push_str(&encode_query_value(source));
    }
    href.push_str("&amp;focus=");
    href.push_str(&encode_query_value(&display_value(value)));
    format!("<a href=\"{href}\">{text}</a>")
}

/// Element to display a relation's target with: its type in the data, else
/// the relation's declared range.
fn link_target(env: &RenderEnv<'_>, relation: &Term, value: &Term) -> Option<ElementRef> {
    let compact = |t: &Term| t.as_iri().and_then(|iri| ElementRef::compact(iri, env.prefixes));
    env.graph
        .objects(value, &vocab::rdf_type())
        .find_map(compact)
        .or_else(|| {
            env.ontology?
                .objects(relation, &vocab::named(vocab::RDFS_RANGE))
                .find_map(compact)
        })
}

/// Class or property, consulting the element's own annotation, then the
/// ontology, then how the data uses the IRI.
pub fn effective_kind(env: &RenderEnv<'_>, element: &ElementRef, iri: &Term) -> ElementKind {
    if element.kind() != ElementKind::Unknown {
        return element.kind();
    }
    if let Some(ontology) = env.ontology {
        let kind = kind_in(ontology, iri);
        if kind != ElementKind::Unknown {
            return kind;
        }
    }
    if env.graph.uses_predicate(iri) && env.graph.instances_of(iri).is_empty() {
        ElementKind::Property
    } else {
        ElementKind::Class
    }
}

/// Instances of a class element, or subjects carrying a property element.
pub fn element_subjects(env: &RenderEnv<'_>, element: &ElementRef) -> Result<Vec<Term>, ElementRefError> {
    let iri = element.resolve(env.prefixes)?;
    Ok(match effective_kind(env, element, &iri) {
        ElementKind::Property => env.graph.subjects_with(&iri),
        _ => env.graph.instances_of(&iri),
    })
}

/// Expands `ast` once per instance of `element`, in term order.
pub fn render_element(
    env: RenderEnv<'_>,
    element: &ElementRef,
    ast: &TemplateAst,
) -> Result<String, ExpandError> {
    let subjects = element_subjects(&env, element)?;
    render_subjects(env, element, ast, &subjects)
}

pub fn render_subjects(
    env: RenderEnv<'_>,
    element: &ElementRef,
    ast: &TemplateAst,
    subjects: &[Term],
) -> Result<String, ExpandError> {
    if subjects.is_empty() {
        return Ok(no_data_notice(&element.to_string()));
    }
    let mut out = String::new();
    for s in subjects {
        out.push_str(&expand(ast, &RenderContext::new(env, s.clone()))?);
    }
    Ok(out)
}

/// Generic property/value table per instance.
pub fn default_visualization(env: RenderEnv<'_>, element: &ElementRef) -> String {
    let subjects = element_subjects(&env, element).unwrap_or_default();
    default_visualization_of(env, element, &subjects)
}

pub fn default_visualization_of(env: RenderEnv<'_>, element: &ElementRef, subjects: &[Term]) -> String {
    if subjects.is_empty() {
        return no_data_notice(&element.to_string());
    }
    let mut out = String::new();
    for s in subjects {
        out.push_str("<table class=\"semrender-default\">\n<caption>");
        out.push_str(&escape(&display_value(s)));
        out.push_str("</caption>\n");
        for t in env.graph.triples_about(s) {
            out.push_str("<tr><th>");
            out.push_str(&escape(&predicate_label(env.prefixes, t.predicate())));
            out.push_str("</th><td>");
            out.push_str(&escape(&display_value(t.object())));
            out.push_str("</td></tr>\n");
        }
        out.push_str("</table>\n");
    }
    out
}

/// Dotted element form when the predicate is under a registered prefix.
pub fn predicate_label(prefixes: &PrefixRegistry, p: &Term) -> String {
    p.as_iri()
        .and_then(|iri| ElementRef::compact(iri, prefixes))
        .map(|e| e.to_string())
        .unwrap_or_else(|| p.value().to_owned())
}
