//! Input forms for an element and the reverse mapping from submitted fields
//! to triples.

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicU64, Ordering};

use thiserror::Error;

use super::ast::{Macro, Node, TemplateAst};
use super::expand::{endpoint_url, RenderEnv};
use crate::describe::{describe_element, DescribeError};
use crate::element_ref::{parse_element_ref, ElementKind, ElementRef, ElementRefError};
use crate::markup::{escape, MarkupFormat};
use crate::rdf::{vocab, Graph, Term, Triple};

/// Prefix of every form field that carries a property value.
pub const FIELD_PREFIX: &str = "prop:";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormError {
    #[error("{0} is a property; input forms are generated for classes")]
    NotAClass(String),
    #[error("no ontology loaded to describe {0}")]
    NoOntology(String),
    #[error(transparent)]
    Describe(#[from] DescribeError),
    #[error("malformed form field {0:?}; expected prop:prefix.name")]
    MalformedField(String),
    #[error(transparent)]
    Resolve(#[from] ElementRefError),
}

pub fn field_name(prop: &ElementRef) -> String {
    format!("{FIELD_PREFIX}{prop}")
}

fn field_id(prop: &ElementRef) -> String {
    let mut id = String::from("field");
    for part in prop.to_string().split('.') {
        id.push('-');
        id.push_str(part);
    }
    id
}

fn text_input(prop: &ElementRef) -> String {
    format!(
        "<input type=\"text\" id=\"{}\" name=\"{}\"/>",
        escape(&field_id(prop)),
        escape(&field_name(prop))
    )
}

/// A form collecting values for `element`'s properties.
///
/// Without a template, one labelled text field per described property. With
/// an input template, the template body is expanded with each
/// `OmemoGetP` becoming a field of the same name.
pub fn render_input_form(
    env: RenderEnv<'_>,
    element: &ElementRef,
    template: Option<&TemplateAst>,
    format: MarkupFormat,
) -> Result<String, FormError> {
    let ontology = env
        .ontology
        .ok_or_else(|| FormError::NoOntology(element.to_string()))?;
    let description = describe_element(ontology, element, env.prefixes)?;
    if description.kind == ElementKind::Property {
        return Err(FormError::NotAClass(element.to_string()));
    }

    let mut out = format!(
        "<form method=\"post\" action=\"{}\" class=\"semrender-input\">\n\
         <input type=\"hidden\" name=\"action\" value=\"renderInput\"/>\n\
         <input type=\"hidden\" name=\"object\" value=\"{}\"/>\n\
         <input type=\"hidden\" name=\"outputFormat\" value=\"{}\"/>\n",
        escape(&endpoint_url(env.base_url)),
        escape(&element.to_string()),
        format
    );
    match template {
        Some(ast) => {
            for node in &ast.nodes {
                match node {
                    Node::Text(t) => out.push_str(t),
                    Node::Macro(m) => match &m.call {
                        Macro::GetP { prop } => out.push_str(&text_input(prop)),
                        Macro::BaseUrl => out.push_str(env.base_url),
                        // Nothing to show or link to before data exists.
                        Macro::ConditionalViz { .. } | Macro::GetLink { .. } => {}
                    },
                }
            }
            out.push('\n');
        }
        None => {
            for p in &description.properties {
                let Some(prop) = &p.element else { continue };
                out.push_str(&format!(
                    "<p><label for=\"{}\">{}</label> {}</p>\n",
                    escape(&field_id(prop)),
                    escape(&prop.to_string()),
                    text_input(prop)
                ));
            }
        }
    }
    out.push_str("<input type=\"submit\" name=\"submit\" value=\"Submit\"/>\n</form>\n");
    Ok(out)
}

/// `prop:*` names found in a rendered form, in document order.
pub fn form_field_names(form: &str) -> Vec<String> {
    let mut names = Vec::new();
    let marker = "name=\"";
    let mut rest = form;
    while let Some(i) = rest.find(marker) {
        rest = &rest[i + marker.len()..];
        let Some(end) = rest.find('"') else { break };
        let name = &rest[..end];
        if name.starts_with(FIELD_PREFIX) {
            names.push(name.to_owned());
        }
        rest = &rest[end..];
    }
    names
}

static NEXT_SUBMISSION: AtomicU64 = AtomicU64::new(0);

/// One fresh blank-node subject typed as `element`, plus one literal triple
/// per nonempty field.
pub fn form_to_graph(
    fields: &BTreeMap<String, String>,
    element: &ElementRef,
    prefixes: &crate::rdf::PrefixRegistry,
) -> Result<Graph, FormError> {
    let class = element.resolve(prefixes)?;
    let mut props = Vec::with_capacity(fields.len());
    for (key, value) in fields {
        let prop = key
            .strip_prefix(FIELD_PREFIX)
            .and_then(|p| parse_element_ref(p).ok())
            .ok_or_else(|| FormError::MalformedField(key.clone()))?;
        if !value.is_empty() {
            props.push((prop.resolve(prefixes)?, value));
        }
    }
    let n = NEXT_SUBMISSION.fetch_add(1, Ordering::Relaxed);
    let subject = Term::Blank(format!("form{n}"));
    let mut g = Graph::new();
    // Subject is a blank node and predicates are resolved IRIs.
    g.insert(Triple::new(subject.clone(), vocab::rdf_type(), class).expect("valid triple"));
    for (p, value) in props {
        g.insert(Triple::new(subject.clone(), p, Term::literal(value.as_str())).expect("valid triple"));
    }
    Ok(g)
}
