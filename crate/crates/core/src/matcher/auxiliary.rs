//! Auxiliary ontologies: protocol to markup, aesthetic taxonomy and
//! impairment rules.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use super::closure::Closure;
use crate::markup::MarkupFormat;
use crate::rdf::{vocab, Graph, Term};

pub const AUX_NS: &str = "https://w3id.org/semrender/aux#";
pub const AUX_CODIFIED_AS: &str = "https://w3id.org/semrender/aux#codifiedAs";
pub const AUX_FORBIDS_COLOR: &str = "https://w3id.org/semrender/aux#forbidsColor";

/// CSS named colors, sorted.
pub const KNOWN_COLORS: &[&str] = &[
    "aliceblue", "antiquewhite", "aqua", "aquamarine", "azure", "beige", "bisque", "black",
    "blanchedalmond", "blue", "blueviolet", "brown", "burlywood", "cadetblue", "chartreuse",
    "chocolate", "coral", "cornflowerblue", "cornsilk", "crimson", "cyan", "darkblue",
    "darkcyan", "darkgoldenrod", "darkgray", "darkgreen", "darkgrey", "darkkhaki",
    "darkmagenta", "darkolivegreen", "darkorange", "darkorchid", "darkred", "darksalmon",
    "darkseagreen", "darkslateblue", "darkslategray", "darkslategrey", "darkturquoise",
    "darkviolet", "deeppink", "deepskyblue", "dimgray", "dimgrey", "dodgerblue", "firebrick",
    "floralwhite", "forestgreen", "fuchsia", "gainsboro", "ghostwhite", "gold", "goldenrod",
    "gray", "green", "greenyellow", "grey", "honeydew", "hotpink", "indianred", "indigo",
    "ivory", "khaki", "lavender", "lavenderblush", "lawngreen", "lemonchiffon", "lightblue",
    "lightcoral", "lightcyan", "lightgoldenrodyellow", "lightgray", "lightgreen", "lightgrey",
    "lightpink", "lightsalmon", "lightseagreen", "lightskyblue", "lightslategray",
    "lightslategrey", "lightsteelblue", "lightyellow", "lime", "limegreen", "linen", "magenta",
    "maroon", "mediumaquamarine", "mediumblue", "mediumorchid", "mediumpurple",
    "mediumseagreen", "mediumslateblue", "mediumspringgreen", "mediumturquoise",
    "mediumvioletred", "midnightblue", "mintcream", "mistyrose", "moccasin", "navajowhite",
    "navy", "oldlace", "olive", "olivedrab", "orange", "orangered", "orchid", "palegoldenrod",
    "palegreen", "paleturquoise", "palevioletred", "papayawhip", "peachpuff", "peru", "pink",
    "plum", "powderblue", "purple", "rebeccapurple", "red", "rosybrown", "royalblue",
    "saddlebrown", "salmon", "sandybrown", "seagreen", "seashell", "sienna", "silver",
    "skyblue", "slateblue", "slategray", "slategrey", "snow", "springgreen", "steelblue", "tan",
    "teal", "thistle", "tomato", "turquoise", "violet", "wheat", "white", "whitesmoke",
    "yellow", "yellowgreen",
];

pub fn is_known_color(token: &str) -> bool {
    KNOWN_COLORS.binary_search(&token).is_ok()
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AuxError {
    #[error("taxonomy cycle through {0}")]
    Cycle(Term),
    #[error("{0} has more than one parent; the taxonomy must be a tree")]
    MultipleParents(Term),
    #[error("{protocol} is codified as unknown markup {value:?}")]
    UnknownMarkup { protocol: Term, value: String },
    #[error("{0} is codified as more than one markup format")]
    ConflictingMarkup(Term),
    #[error("{impairment} forbids unknown color {color:?}")]
    UnknownColor { impairment: Term, color: String },
}

/// Literal value or IRI local name.
pub fn term_name(t: &Term) -> &str {
    match t {
        Term::Literal(l) => l.value(),
        Term::Iri(_) => t.local_name(),
        Term::Blank(b) => b,
    }
}

/// A forest of terms linked by `rdfs:subClassOf`, with labels.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Hierarchy {
    parent: BTreeMap<Term, Option<Term>>,
    labels: BTreeMap<Term, Vec<String>>,
}

impl Hierarchy {
    fn from_graph(g: &Graph) -> Result<Hierarchy, AuxError> {
        let mut h = Hierarchy::default();
        for (child, parent) in g.pairs_for(&vocab::named(vocab::RDFS_SUBCLASS_OF)) {
            if child == parent {
                return Err(AuxError::Cycle(child.clone()));
            }
            h.parent.entry(parent.clone()).or_insert(None);
            match h.parent.get(child) {
                Some(Some(existing)) if existing != parent => {
                    return Err(AuxError::MultipleParents(child.clone()));
                }
                Some(Some(_)) => {}
                _ => {
                    h.parent.insert(child.clone(), Some(parent.clone()));
                }
            }
        }
        for node in h.parent.keys() {
            let mut seen = BTreeSet::from([node]);
            let mut cur = node;
            while let Some(Some(p)) = h.parent.get(cur) {
                if !seen.insert(p) {
                    return Err(AuxError::Cycle(node.clone()));
                }
                cur = p;
            }
        }
        let label = vocab::named(vocab::RDFS_LABEL);
        for node in h.parent.keys() {
            let mut names = vec![term_name(node).to_owned()];
            names.extend(g.objects(node, &label).map(|l| term_name(l).to_owned()));
            h.labels.insert(node.clone(), names);
        }
        Ok(h)
    }

    fn add_node(&mut self, t: &Term) {
        if !self.parent.contains_key(t) {
            self.parent.insert(t.clone(), None);
            self.labels.insert(t.clone(), vec![term_name(t).to_owned()]);
        }
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    pub fn nodes(&self) -> impl Iterator<Item = &Term> {
        self.parent.keys()
    }

    /// A node equivalent to `t` under `closure`, or for a literal, a node
    /// whose local name or label equals its value.
    pub fn find(&self, t: &Term, closure: &Closure) -> Option<&Term> {
        if let Some((node, _)) = self.parent.get_key_value(t) {
            return Some(node);
        }
        if t.is_literal() {
            let want = t.value();
            return self.labels.iter().find_map(|(node, names)| {
                names.iter().any(|n| n.eq_ignore_ascii_case(want)).then_some(node)
            });
        }
        self.parent.keys().find(|node| closure.same(node, t))
    }

    /// `node` followed by its ancestors up to its root.
    pub fn ancestors<'a>(&'a self, node: &'a Term) -> Vec<&'a Term> {
        let mut chain = vec![node];
        let mut cur = node;
        while let Some(Some(p)) = self.parent.get(cur) {
            if chain.contains(&p) {
                break;
            }
            chain.push(p);
            cur = p;
        }
        chain
    }

    /// Path length between two nodes. Separate trees are joined under a
    /// virtual root.
    pub fn distance(&self, a: &Term, b: &Term) -> u32 {
        let up_a = self.ancestors(a);
        let up_b = self.ancestors(b);
        for (i, x) in up_a.iter().enumerate() {
            if let Some(j) = up_b.iter().position(|y| y == x) {
                return (i + j) as u32;
            }
        }
        (up_a.len() + up_b.len()) as u32
    }

    /// Longest distance between any two nodes.
    pub fn diameter(&self) -> u32 {
        let nodes: Vec<&Term> = self.parent.keys().collect();
        let mut best = 0;
        for (i, a) in nodes.iter().enumerate() {
            for b in &nodes[i + 1..] {
                best = best.max(self.distance(a, b));
            }
        }
        best
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AuxOntologies {
    protocols: BTreeMap<Term, MarkupFormat>,
    taxonomy: Hierarchy,
    impairments: Hierarchy,
    forbidden: BTreeMap<Term, BTreeSet<String>>,
}

fn markup_of(t: &Term) -> Option<MarkupFormat> {
    term_name(t).parse().ok()
}

impl AuxOntologies {
    /// Builds from the protocol, taxonomy and impairment graphs.
    pub fn from_graphs(
        protocols: &Graph,
        taxonomy: &Graph,
        impairments: &Graph,
    ) -> Result<AuxOntologies, AuxError> {
        let mut aux = AuxOntologies {
            taxonomy: Hierarchy::from_graph(taxonomy)?,
            impairments: Hierarchy::from_graph(impairments)?,
            ..AuxOntologies::default()
        };
        for (p, m) in protocols.pairs_for(&vocab::named(AUX_CODIFIED_AS)) {
            let format = markup_of(m).ok_or_else(|| AuxError::UnknownMarkup {
                protocol: p.clone(),
                value: term_name(m).to_owned(),
            })?;
            if aux.protocols.insert(p.clone(), format).is_some_and(|f| f != format) {
                return Err(AuxError::ConflictingMarkup(p.clone()));
            }
        }
        for (i, c) in impairments.pairs_for(&vocab::named(AUX_FORBIDS_COLOR)) {
            let color = crate::registry::normalize_color(term_name(c));
            if !is_known_color(&color) {
                return Err(AuxError::UnknownColor {
                    impairment: i.clone(),
                    color,
                });
            }
            aux.impairments.add_node(i);
            aux.forbidden.entry(i.clone()).or_default().insert(color);
        }
        Ok(aux)
    }

    pub fn taxonomy(&self) -> &Hierarchy {
        &self.taxonomy
    }

    pub fn impairments(&self) -> &Hierarchy {
        &self.impairments
    }

    pub fn protocols(&self) -> impl Iterator<Item = (&Term, MarkupFormat)> {
        self.protocols.iter().map(|(t, f)| (t, *f))
    }

    /// Markup a protocol is codified as, looked up through `closure`.
    pub fn markup_for(&self, protocol: &Term, closure: &Closure) -> Option<MarkupFormat> {
        if let Some(f) = self.protocols.get(protocol) {
            return Some(*f);
        }
        self.protocols
            .iter()
            .find(|(p, _)| closure.same(p, protocol))
            .map(|(_, f)| *f)
    }

    /// Colors forbidden by an impairment or any of its ancestors, each with
    /// the impairment that states it. `None` when the impairment is unknown.
    pub fn forbidden_colors(
        &self,
        impairment: &Term,
        closure: &Closure,
    ) -> Option<BTreeMap<String, Term>> {
        let node = self.impairments.find(impairment, closure)?;
        let mut out = BTreeMap::new();
        for a in self.impairments.ancestors(node) {
            for c in self.forbidden.get(a).into_iter().flatten() {
                out.entry(c.clone()).or_insert_with(|| a.clone());
            }
        }
        Some(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rdf::{parse_graph, RdfFormat};

    const TAXONOMY: &str = "@prefix rdfs: <http://www.w3.org/2000/01/rdf-schema#> .
@prefix z3: <http://example.org/z3#> .
z3:Sober rdfs:subClassOf z3:Style .
z3:simple rdfs:subClassOf z3:Sober .
z3:minimal rdfs:subClassOf z3:simple .
z3:Ornate rdfs:subClassOf z3:Style .
z3:Classic rdfs:subClassOf z3:Ornate .
z3:baroque rdfs:subClassOf z3:Classic .
";

    fn g(text: &str) -> Graph {
        parse_graph(text, RdfFormat::Turtle).unwrap()
    }

    fn z3(local: &str) -> Term {
        Term::iri(format!("http://example.org/z3#{local}")).unwrap()
    }

    #[test]
    fn colors_sorted() {
        assert!(KNOWN_COLORS.windows(2).all(|w| w[0] < w[1]));
        assert!(is_known_color("red"));
        assert!(!is_known_color("reddish"));
    }

    #[test]
    fn tree_distances() {
        let aux = AuxOntologies::from_graphs(&Graph::new(), &g(TAXONOMY), &Graph::new()).unwrap();
        let t = aux.taxonomy();
        assert_eq!(t.distance(&z3("simple"), &z3("minimal")), 1);
        assert_eq!(t.distance(&z3("minimal"), &z3("simple")), 1);
        assert_eq!(t.distance(&z3("simple"), &z3("baroque")), 5);
        assert_eq!(t.distance(&z3("Style"), &z3("Style")), 0);
        assert_eq!(t.diameter(), 6);
    }

    #[test]
    fn literal_finds_by_local_name() {
        let aux = AuxOntologies::from_graphs(&Graph::new(), &g(TAXONOMY), &Graph::new()).unwrap();
        let found = aux.taxonomy().find(&Term::literal("minimal"), &Closure::identity());
        assert_eq!(found, Some(&z3("minimal")));
        let other = Term::iri("http://example.org/a#minimal").unwrap();
        assert_eq!(aux.taxonomy().find(&other, &Closure::identity()), None);
    }

    #[test]
    fn cycle_rejected() {
        let text = "@prefix rdfs: <http://www.w3.org/2000/01/rdf-schema#> .
<http://e/a> rdfs:subClassOf <http://e/b> . <http://e/b> rdfs:subClassOf <http://e/a> .";
        assert!(matches!(
            AuxOntologies::from_graphs(&Graph::new(), &g(text), &Graph::new()),
            Err(AuxError::Cycle(_))
        ));
    }

    #[test]
    fn two_parents_rejected() {
        let text = "@prefix rdfs: <http://www.w3.org/2000/01/rdf-schema#> .
<http://e/a> rdfs:subClassOf <http://e/b>, <http://e/c> .";
        assert!(matches!(
            AuxOntologies::from_graphs(&Graph::new(), &g(text), &Graph::new()),
            Err(AuxError::MultipleParents(_))
        ));
    }

    #[test]
    fn unknown_color_rejected() {
        let text = "<http://e/i> <https://w3id.org/semrender/aux#forbidsColor> \"reddish\" .";
        assert!(matches!(
            AuxOntologies::from_graphs(&Graph::new(), &Graph::new(), &g(text)),
            Err(AuxError::UnknownColor { .. })
        ));
    }

    #[test]
    fn inherited_forbidden_colors() {
        let text = "@prefix rdfs: <http://www.w3.org/2000/01/rdf-schema#> .
@prefix aux: <https://w3id.org/semrender/aux#> .
<http://e/Protanopia> rdfs:subClassOf <http://e/RedGreen> .
<http://e/RedGreen> aux:forbidsColor \"red\", \"Green\" .
<http://e/Protanopia> aux:forbidsColor \"brown\" .";
        let aux = AuxOntologies::from_graphs(&Graph::new(), &Graph::new(), &g(text)).unwrap();
        let colors = aux
            .forbidden_colors(&Term::iri("http://e/Protanopia").unwrap(), &Closure::identity())
            .unwrap();
        assert_eq!(
            colors.keys().cloned().collect::<Vec<_>>(),
            vec!["brown", "green", "red"]
        );
        assert_eq!(colors["red"], Term::iri("http://e/RedGreen").unwrap());
    }

    #[test]
    fn protocol_markup() {
        let text = "<http://e/WAP2.0> <https://w3id.org/semrender/aux#codifiedAs> \"XHTML\" .
<http://e/Web> <https://w3id.org/semrender/aux#codifiedAs> <http://e/HTML> .";
        let aux = AuxOntologies::from_graphs(&g(text), &Graph::new(), &Graph::new()).unwrap();
        let c = Closure::identity();
        assert_eq!(
            aux.markup_for(&Term::iri("http://e/WAP2.0").unwrap(), &c),
            Some(MarkupFormat::Xhtml)
        );
        assert_eq!(
            aux.markup_for(&Term::iri("http://e/Web").unwrap(), &c),
            Some(MarkupFormat::Html)
        );
        assert_eq!(aux.markup_for(&Term::iri("http://e/Fax").unwrap(), &c), None);
    }
}
