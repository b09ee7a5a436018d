//! Template macro language: parsing, expansion against RDF data, the
//! default visualization and input forms.

mod ast;
mod expand;
mod form;

pub use ast::{
    parse_template, Macro, MacroNode, Node, TemplateAst, TemplateParseError,
    TemplateParseErrorKind, BASE_URL, CONDITIONAL_VIZ, GET_LINK, GET_P,
};
pub use expand::{
    default_visualization, default_visualization_of, display_value, effective_kind,
    element_subjects, endpoint_url, expand, predicate_label, render_element, render_subjects,
    ExpandError, NoTemplates, RenderContext, RenderEnv, TemplateSource, MAX_DEPTH,
};
pub use form::{
    field_name, form_field_names, form_to_graph, render_input_form, FormError, FIELD_PREFIX,
};

#[cfg(test)]
mod tests {
    use std::collections::{BTreeMap, HashMap};
    use std::sync::Arc;

    use super::*;
    use crate::element_ref::parse_element_ref;
    use crate::markup::MarkupFormat;
    use crate::rdf::{parse_graph, Graph, PrefixRegistry, RdfFormat, Term};

    const DATA: &str = r#"
        @prefix foaf: <http://xmlns.com/foaf/0.1/> .
        @prefix ex: <http://ex.org/> .
        ex:alice a foaf:Person ; foaf:name "Alice" ; foaf:knows ex:bob .
        ex:bob a foaf:Person ; foaf:name "Bob" ; foaf:knows ex:alice .
    "#;

    fn reg() -> PrefixRegistry {
        let mut reg = PrefixRegistry::with_defaults();
        reg.insert("foaf", "http://xmlns.com/foaf/0.1/").unwrap();
        reg.insert("ex", "http://ex.org/").unwrap();
        reg
    }

    fn graph(doc: &str) -> Graph {
        parse_graph(doc, RdfFormat::Turtle).unwrap()
    }

    fn env<'a>(g: &'a Graph, reg: &'a PrefixRegistry, t: &'a dyn TemplateSource) -> RenderEnv<'a> {
        RenderEnv {
            graph: g,
            base_url: "http://vp.example/",
            source_url: Some("http://data.example/d.ttl"),
            templates: t,
            prefixes: reg,
            ontology: None,
        }
    }

    fn ex(local: &str) -> Term {
        Term::iri(format!("http://ex.org/{local}")).unwrap()
    }

    #[test]
    fn getp_substitutes_value() {
        let g = graph(DATA);
        let reg = reg();
        let ast = parse_template("[{OmemoGetP propName='foaf.name'}]").unwrap();
        let out = expand(&ast, &RenderContext::new(env(&g, &reg, &NoTemplates), ex("alice"))).unwrap();
        assert_eq!(out, "Alice");
    }

    #[test]
    fn getp_missing_is_empty_and_multi_joins() {
        let g = graph(r#"<http://ex.org/a> <http://xmlns.com/foaf/0.1/nick> "z", "a&b" ."#);
        let reg = reg();
        let ast = parse_template("[{OmemoGetP propName='foaf.nick'}]|[{OmemoGetP propName='foaf.mbox'}]|").unwrap();
        let out = expand(&ast, &RenderContext::new(env(&g, &reg, &NoTemplates), ex("a"))).unwrap();
        assert_eq!(out, "a&amp;b, z||");
    }

    #[test]
    fn base_url_verbatim() {
        let g = Graph::new();
        let reg = reg();
        let ast = parse_template("<img src=\"[{OmemoBaseURL}]logo.png\"/>").unwrap();
        let out = expand(&ast, &RenderContext::new(env(&g, &reg, &NoTemplates), ex("a"))).unwrap();
        assert_eq!(out, "<img src=\"http://vp.example/logo.png\"/>");
    }

    #[test]
    fn conditional_viz_without_value_is_empty() {
        let g = graph(DATA);
        let reg = reg();
        let ast = parse_template("[{OmemoConditionalVizFor propName='foaf.mbox' designerID='u' designID='missing'}]").unwrap();
        let out = expand(&ast, &RenderContext::new(env(&g, &reg, &NoTemplates), ex("alice"))).unwrap();
        assert_eq!(out, "");
    }

    #[test]
    fn conditional_viz_missing_template_errors_only_with_value() {
        let g = graph(DATA);
        let reg = reg();
        let ast = parse_template("[{OmemoConditionalVizFor propName='foaf.knows' designerID='u' designID='missing'}]").unwrap();
        let err = expand(&ast, &RenderContext::new(env(&g, &reg, &NoTemplates), ex("alice"))).unwrap_err();
        assert_eq!(
            err,
            ExpandError::TemplateNotFound {
                designer: "u".into(),
                design: "missing".into()
            }
        );
    }

    #[test]
    fn mutual_recursion_hits_depth_limit() {
        let g = graph(DATA);
        let reg = reg();
        let mut templates: HashMap<(String, String), Arc<TemplateAst>> = HashMap::new();
        templates.insert(
            ("u".into(), "a".into()),
            Arc::new(parse_template("A[{OmemoConditionalVizFor propName='foaf.knows' designerID='u' designID='b'}]").unwrap()),
        );
        templates.insert(
            ("u".into(), "b".into()),
            Arc::new(parse_template("B[{OmemoConditionalVizFor propName='foaf.knows' designerID='u' designID='a'}]").unwrap()),
        );
        let top = templates.lookup("u", "a").unwrap();
        let err = expand(&top, &RenderContext::new(env(&g, &reg, &templates), ex("alice"))).unwrap_err();
        assert_eq!(err, ExpandError::DepthExceeded { depth: 9 });
    }

    #[test]
    fn get_link_builds_anchor() {
        let g = graph(DATA);
        let reg = reg();
        let ast = parse_template("[{OmemoGetLink relationName='foaf.knows'}]").unwrap();
        let out = expand(&ast, &RenderContext::new(env(&g, &reg, &NoTemplates), ex("alice"))).unwrap();
        assert_eq!(
            out,
            "<a href=\"http://vp.example/render?action=renderOutput&amp;object=foaf.Person\
             &amp;source=http%3A%2F%2Fdata.example%2Fd.ttl&amp;focus=http%3A%2F%2Fex.org%2Fbob\">http://ex.org/bob</a>"
        );
    }

    #[test]
    fn get_link_without_known_type_is_text() {
        let g = graph("<http://ex.org/a> <http://xmlns.com/foaf/0.1/knows> <http://ex.org/b>, \"lit\" .");
        let reg = reg();
        let ast = parse_template("[{OmemoGetLink relationName='foaf.knows'}]").unwrap();
        let out = expand(&ast, &RenderContext::new(env(&g, &reg, &NoTemplates), ex("a"))).unwrap();
        assert_eq!(out, "http://ex.org/b, lit");
    }

    #[test]
    fn unresolvable_prefix_errors() {
        let g = graph(DATA);
        let reg = reg();
        let ast = parse_template("[{OmemoGetP propName='zz.name'}]").unwrap();
        assert!(matches!(
            expand(&ast, &RenderContext::new(env(&g, &reg, &NoTemplates), ex("alice"))),
            Err(ExpandError::Unresolvable(_))
        ));
    }

    #[test]
    fn render_element_per_instance_and_empty_notice() {
        let g = graph(DATA);
        let reg = reg();
        let ast = parse_template("<b>[{OmemoGetP propName='foaf.name'}]</b>").unwrap();
        let person = parse_element_ref("foaf.Person").unwrap();
        let out = render_element(env(&g, &reg, &NoTemplates), &person, &ast).unwrap();
        assert_eq!(out, "<b>Alice</b><b>Bob</b>");
        let empty = Graph::new();
        let out = render_element(env(&empty, &reg, &NoTemplates), &person, &ast).unwrap();
        assert_eq!(
            out,
            "<div class=\"semrender-notice\">No instances of foaf.Person in the data source.</div>\n"
        );
    }

    #[test]
    fn render_property_element_uses_subjects() {
        let g = graph(r#"<http://ex.org/x> <http://xmlns.com/foaf/0.1/name> "X" ."#);
        let reg = reg();
        let ast = parse_template("[{OmemoGetP propName='foaf.name'}];").unwrap();
        let name = parse_element_ref("foaf.name").unwrap();
        assert_eq!(render_element(env(&g, &reg, &NoTemplates), &name, &ast).unwrap(), "X;");
    }

    #[test]
    fn default_table_rows() {
        let g = graph(r#"<http://ex.org/alice> a <http://xmlns.com/foaf/0.1/Person> ; <http://xmlns.com/foaf/0.1/name> "Alice" ."#);
        let reg = reg();
        let person = parse_element_ref("foaf.Person").unwrap();
        let out = default_visualization(env(&g, &reg, &NoTemplates), &person);
        assert_eq!(
            out,
            "<table class=\"semrender-default\">\n<caption>http://ex.org/alice</caption>\n\
             <tr><th>rdf.type</th><td>http://xmlns.com/foaf/0.1/Person</td></tr>\n\
             <tr><th>foaf.name</th><td>Alice</td></tr>\n</table>\n"
        );
        let empty = Graph::new();
        assert!(default_visualization(env(&empty, &reg, &NoTemplates), &person).contains("semrender-notice"));
    }

    const ONTOLOGY: &str = r#"
        @prefix owl: <http://www.w3.org/2002/07/owl#> .
        @prefix rdfs: <http://www.w3.org/2000/01/rdf-schema#> .
        @prefix foaf: <http://xmlns.com/foaf/0.1/> .
        foaf:Person a owl:Class .
        foaf:Document a owl:Class .
        foaf:name rdfs:domain foaf:Person .
        foaf:mbox rdfs:domain foaf:Person .
    "#;

    #[test]
    fn input_form_fields() {
        let g = Graph::new();
        let o = graph(ONTOLOGY);
        let reg = reg();
        let mut e = env(&g, &reg, &NoTemplates);
        e.ontology = Some(&o);
        let person = parse_element_ref("foaf.Person").unwrap();
        let form = render_input_form(e, &person, None, MarkupFormat::Html).unwrap();
        assert_eq!(form_field_names(&form), vec!["prop:foaf.mbox", "prop:foaf.name"]);
        assert!(form.contains("action=\"http://vp.example/render\""));

        let doc = parse_element_ref("foaf.Document").unwrap();
        let form = render_input_form(e, &doc, None, MarkupFormat::Html).unwrap();
        assert!(form_field_names(&form).is_empty());
        assert_eq!(form.matches("type=\"submit\"").count(), 1);

        let name = parse_element_ref("foaf.name").unwrap();
        assert!(matches!(
            render_input_form(e, &name, None, MarkupFormat::Html),
            Err(FormError::NotAClass(_))
        ));
    }

    #[test]
    fn input_template_turns_getp_into_fields() {
        let g = Graph::new();
        let o = graph(ONTOLOGY);
        let reg = reg();
        let mut e = env(&g, &reg, &NoTemplates);
        e.ontology = Some(&o);
        let person = parse_element_ref("foaf.Person").unwrap();
        let ast = parse_template("<div>Name: [{OmemoGetP propName='foaf.name'}]</div>").unwrap();
        let form = render_input_form(e, &person, Some(&ast), MarkupFormat::Xhtml).unwrap();
        assert!(form.contains("<div>Name: <input type=\"text\" id=\"field-foaf-name\" name=\"prop:foaf.name\"/></div>"));
        assert!(form.contains("value=\"XHTML\""));
        assert_eq!(form_field_names(&form), vec!["prop:foaf.name"]);
    }

    #[test]
    fn form_to_graph_construction() {
        let reg = reg();
        let person = parse_element_ref("foaf.Person").unwrap();
        let mut fields = BTreeMap::new();
        fields.insert("prop:foaf.name".to_owned(), "Ana".to_owned());
        fields.insert("prop:foaf.nick".to_owned(), String::new());
        let g = form_to_graph(&fields, &person, &reg).unwrap();
        assert_eq!(g.len(), 2);
        let subject = g.instances_of(&Term::iri("http://xmlns.com/foaf/0.1/Person").unwrap());
        assert_eq!(subject.len(), 1);
        assert!(subject[0].is_blank());
        assert_eq!(
            g.values_of(&subject[0], &Term::iri("http://xmlns.com/foaf/0.1/name").unwrap()),
            vec![Term::literal("Ana")]
        );

        assert_eq!(form_to_graph(&BTreeMap::new(), &person, &reg).unwrap().len(), 1);

        let mut bad = BTreeMap::new();
        bad.insert("name".to_owned(), "x".to_owned());
        assert_eq!(
            form_to_graph(&bad, &person, &reg),
            Err(FormError::MalformedField("name".into()))
        );
    }

    #[test]
    fn separate_submissions_get_distinct_subjects() {
        let reg = reg();
        let person = parse_element_ref("foaf.Person").unwrap();
        let a = form_to_graph(&BTreeMap::new(), &person, &reg).unwrap();
        let b = form_to_graph(&BTreeMap::new(), &person, &reg).unwrap();
        assert_ne!(a, b);
    }
}
