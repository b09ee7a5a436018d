use std::fmt::{self, Write};

use super::{Graph, PrefixRegistry, RdfFormat, Term, Triple};

/// Serializes a graph. Output is deterministic: statements follow the
/// graph's term order.
pub fn serialize_graph(g: &Graph, format: RdfFormat) -> String {
    match format {
        RdfFormat::NTriples => {
            let mut out = String::new();
            for t in g.iter() {
                // Writing to a String cannot fail.
                let _ = writeln!(out, "{t}");
            }
            out
        }
        RdfFormat::Turtle => turtle(g, None),
    }
}

/// Turtle with `@prefix` lines for every registered prefix used by the graph.
pub fn serialize_turtle_with_prefixes(g: &Graph, prefixes: &PrefixRegistry) -> String {
    turtle(g, Some(prefixes))
}

fn fmt_term<'r>(
    prefixes: Option<&'r PrefixRegistry>,
    t: &Term,
    used: &mut Vec<(&'r str, &'r str)>,
) -> String {
    if let (Some(reg), Term::Iri(iri)) = (prefixes, t) {
        if let Some((prefix, ns)) = reg.namespace_for_turtle(iri) {
            let local = &iri[ns.len()..];
            if !used.iter().any(|(p, _)| *p == prefix) {
                used.push((prefix, ns));
            }
            return format!("{prefix}:{local}");
        }
    }
    t.to_string()
}

fn turtle(g: &Graph, prefixes: Option<&PrefixRegistry>) -> String {
    let mut body = String::new();
    let mut used: Vec<(&str, &str)> = Vec::new();
    let mut current: Option<&Term> = None;
    let mut current_pred: Option<&Term> = None;

    for Triple {
        subject,
        predicate,
        object,
    } in g.iter()
    {
        if current == Some(subject) {
            if current_pred == Some(predicate) {
                body.push_str(" ,\n        ");
            } else {
                body.push_str(" ;\n    ");
                body.push_str(&fmt_term(prefixes, predicate, &mut used));
                body.push(' ');
            }
        } else {
            if current.is_some() {
                body.push_str(" .\n");
            }
            body.push_str(&fmt_term(prefixes, subject, &mut used));
            body.push(' ');
            body.push_str(&fmt_term(prefixes, predicate, &mut used));
            body.push(' ');
        }
        body.push_str(&fmt_term(prefixes, object, &mut used));
        current = Some(subject);
        current_pred = Some(predicate);
    }
    if current.is_some() {
        body.push_str(" .\n");
    }

    if used.is_empty() {
        return body;
    }
    used.sort();
    let mut out = String::new();
    for (prefix, ns) in used {
        let _ = writeln!(out, "@prefix {prefix}: <{ns}> .");
    }
    out.push('\n');
    out.push_str(&body);
    out
}

/// N-Triples rendering of one term.
pub(crate) fn write_term(f: &mut impl Write, t: &Term) -> fmt::Result {
    match t {
        Term::Iri(iri) => write!(f, "<{iri}>"),
        Term::Blank(label) => write!(f, "_:{label}"),
        Term::Literal(l) => {
            f.write_char('"')?;
            for c in l.value().chars() {
                match c {
                    '"' => f.write_str("\\\"")?,
                    '\\' => f.write_str("\\\\")?,
                    '\n' => f.write_str("\\n")?,
                    '\r' => f.write_str("\\r")?,
                    '\t' => f.write_str("\\t")?,
                    c if c.is_control() => write!(f, "\\u{:04X}", c as u32)?,
                    c => f.write_char(c)?,
                }
            }
            f.write_char('"')?;
            if let Some(lang) = l.language() {
                write!(f, "@{lang}")?;
            } else if let Some(dt) = l.datatype() {
                write!(f, "^^<{dt}>")?;
            }
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rdf::{parse_graph, vocab};

    fn sample() -> Graph {
        let doc = r#"
            @prefix foaf: <http://xmlns.com/foaf/0.1/> .
            <http://ex.org/alice> a foaf:Person ;
                foaf:name "Alice \"A\"\n", "Ali"@en ;
                foaf:knows _:x .
            _:x foaf:age 42 .
        "#;
        parse_graph(doc, RdfFormat::Turtle).unwrap()
    }

    #[test]
    fn empty_graph_is_empty_document() {
        assert_eq!(serialize_graph(&Graph::new(), RdfFormat::Turtle), "");
        assert_eq!(serialize_graph(&Graph::new(), RdfFormat::NTriples), "");
    }

    #[test]
    fn one_triple_one_statement() {
        let g = parse_graph("<http://a.org/s> <http://a.org/p> <http://a.org/o> .", RdfFormat::NTriples)
            .unwrap();
        assert_eq!(
            serialize_graph(&g, RdfFormat::NTriples),
            "<http://a.org/s> <http://a.org/p> <http://a.org/o> .\n"
        );
        assert_eq!(serialize_graph(&g, RdfFormat::Turtle).matches(" .\n").count(), 1);
    }

    #[test]
    fn both_formats_reparse() {
        let g = sample();
        for format in [RdfFormat::Turtle, RdfFormat::NTriples] {
            let text = serialize_graph(&g, format);
            assert_eq!(parse_graph(&text, format).unwrap(), g, "{text}");
        }
    }

    #[test]
    fn prefixed_turtle_reparses() {
        let g = sample();
        let mut reg = PrefixRegistry::with_defaults();
        reg.insert("foaf", "http://xmlns.com/foaf/0.1/").unwrap();
        let text = serialize_turtle_with_prefixes(&g, &reg);
        assert!(text.starts_with("@prefix foaf: <http://xmlns.com/foaf/0.1/> .\n"));
        assert!(text.contains("rdf:type foaf:Person"));
        assert_eq!(parse_graph(&text, RdfFormat::Turtle).unwrap(), g);
    }

    #[test]
    fn literal_escaping() {
        let mut s = String::new();
        write_term(&mut s, &Term::literal("a\"b\\c\u{1}")).unwrap();
        assert_eq!(s, r#""a\"b\\c\u0001""#);
        let mut s = String::new();
        write_term(&mut s, &Term::typed_literal("1", vocab::XSD_INTEGER).unwrap()).unwrap();
        assert_eq!(s, "\"1\"^^<http://www.w3.org/2001/XMLSchema#integer>");
    }
}
