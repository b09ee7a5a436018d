use std::collections::HashMap;

use oxttl::{NTriplesParser, TurtleParser, TurtleSyntaxError};
use thiserror::Error;

use super::{vocab, Graph, RdfFormat, Term, TermError, Triple};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    /// Line and column are 1-based.
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: u64,
        column: u64,
        message: String,
    },
    #[error("unsupported RDF format {0:?}")]
    UnsupportedFormat(String),
    #[error("invalid base IRI {0:?}")]
    InvalidBase(String),
    #[error(transparent)]
    Term(#[from] TermError),
}

impl From<TurtleSyntaxError> for ParseError {
    fn from(e: TurtleSyntaxError) -> Self {
        let start = e.location().start;
        ParseError::Syntax {
            line: start.line + 1,
            column: start.column + 1,
            message: e.message().to_owned(),
        }
    }
}

pub fn parse_graph(text: &str, format: RdfFormat) -> Result<Graph, ParseError> {
    parse_graph_with_base(text, format, None)
}

/// Parses `text`, resolving relative IRIs in Turtle against `base`.
pub fn parse_graph_with_base(
    text: &str,
    format: RdfFormat,
    base: Option<&str>,
) -> Result<Graph, ParseError> {
    let mut loader = Loader::default();
    match format {
        RdfFormat::Turtle => {
            let mut parser = TurtleParser::new();
            if let Some(base) = base {
                parser = parser
                    .with_base_iri(base)
                    .map_err(|_| ParseError::InvalidBase(base.to_owned()))?;
            }
            for triple in parser.for_slice(text) {
                loader.add(triple?)?;
            }
        }
        RdfFormat::NTriples => {
            for triple in NTriplesParser::new().for_slice(text) {
                loader.add(triple?)?;
            }
        }
    }
    Ok(loader.finish())
}

/// Tries Turtle, then N-Triples. Reports the Turtle error when both fail.
pub fn parse_sniffed(text: &str) -> Result<Graph, ParseError> {
    match parse_graph(text, RdfFormat::Turtle) {
        Ok(g) => Ok(g),
        Err(turtle_err) => parse_graph(text, RdfFormat::NTriples).map_err(|_| turtle_err),
    }
}

#[derive(Default)]
struct Loader {
    graph: Graph,
    blanks: HashMap<String, String>,
}

impl Loader {
    fn add(&mut self, t: oxrdf::Triple) -> Result<(), ParseError> {
        let subject = match t.subject {
            oxrdf::NamedOrBlankNode::NamedNode(n) => Term::Iri(n.into_string()),
            oxrdf::NamedOrBlankNode::BlankNode(b) => self.blank(b.as_str()),
        };
        let predicate = Term::Iri(t.predicate.into_string());
        let object = match t.object {
            oxrdf::Term::NamedNode(n) => Term::Iri(n.into_string()),
            oxrdf::Term::BlankNode(b) => self.blank(b.as_str()),
            oxrdf::Term::Literal(l) => convert_literal(&l)?,
        };
        self.graph.insert(Triple::new(subject, predicate, object)?);
        Ok(())
    }

    // Labels are reassigned in order of first appearance so a given document
    // always loads to the same graph.
    fn blank(&mut self, label: &str) -> Term {
        let next = self.blanks.len();
        let assigned = self
            .blanks
            .entry(label.to_owned())
            .or_insert_with(|| format!("b{next}"));
        Term::Blank(assigned.clone())
    }

    fn finish(mut self) -> Graph {
        let ontologies = self
            .graph
            .instances_of(&vocab::named(vocab::OWL_ONTOLOGY));
        if let [Term::Iri(ns)] = ontologies.as_slice() {
            self.graph.namespace = Some(ns.clone());
        }
        self.graph
    }
}

fn convert_literal(l: &oxrdf::Literal) -> Result<Term, TermError> {
    if let Some(lang) = l.language() {
        return Term::lang_literal(l.value(), lang);
    }
    Term::typed_literal(l.value(), l.datatype().as_str())
}
