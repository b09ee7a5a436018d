use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use proptest::prelude::*;

use semrender_core::markup::MarkupFormat;
use semrender_core::matcher::{
    equivalence_closure, extract_profile, rank, AlignmentSet, AuxOntologies, Closure, ScoreWeights,
    TemplateFacets, UserProfile,
};
use semrender_core::rdf::{parse_graph, Graph, RdfFormat, Term};

fn fixture_graph(name: &str) -> Graph {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name);
    parse_graph(&fs::read_to_string(path).unwrap(), RdfFormat::Turtle).unwrap()
}

fn setup() -> (AuxOntologies, Closure) {
    let aux = AuxOntologies::from_graphs(
        &fixture_graph("z1.ttl"),
        &fixture_graph("z3.ttl"),
        &fixture_graph("z5.ttl"),
    )
    .unwrap();
    let links = AlignmentSet::from_graph(&fixture_graph("alignments.ttl")).unwrap();
    (aux, equivalence_closure(&links).unwrap())
}

fn iri(s: &str) -> Term {
    Term::iri(s).unwrap()
}

const STYLES: &[&str] = &["minimal", "simple", "Sober", "Style", "Ornate", "Classic", "baroque", "rococo"];
const COLORS: &[&str] = &["red", "green", "blue", "yellow", "white", "black"];
const PROTOCOLS: &[&str] = &["http://example.org/z1#WAP2.0", "http://example.org/z1#DesktopBrowser"];
const TAXONOMY: &[&str] = &[
    "http://example.org/z3#minimal",
    "http://example.org/z3#simple",
    "http://example.org/z3#Sober",
    "http://example.org/z3#Classic",
    "http://example.org/z3#baroque",
];
const IMPAIRMENTS: &[&str] = &[
    "http://example.org/z5#RedGreenColorBlindness",
    "http://example.org/z5#Protanopia",
    "http://example.org/z5#BlueYellowColorBlindness",
    "http://example.org/z5#LowVision",
];

fn facets() -> impl Strategy<Value = TemplateFacets> {
    (
        0..1000u32,
        prop::option::of(prop_oneof![Just(MarkupFormat::Html), Just(MarkupFormat::Xhtml)]),
        prop::option::of(prop::sample::select(STYLES)),
        prop::option::of(prop::sample::select(COLORS)),
        prop::option::of(prop::sample::select(COLORS)),
    )
        .prop_map(|(n, markup, style, primary, secondary)| TemplateFacets {
            id: format!("u{n}.d{n}"),
            subject: iri(&format!("https://w3id.org/semrender/v#u{n}.d{n}")),
            markup,
            aesthetic: style.map(Term::literal),
            primary_color: primary.map(str::to_owned),
            secondary_color: secondary.map(str::to_owned),
        })
}

fn candidates() -> impl Strategy<Value = Vec<TemplateFacets>> {
    prop::collection::btree_map(0..1000u32, facets(), 1..12).prop_map(|m| {
        m.into_iter()
            .map(|(n, mut f)| {
                f.id = format!("u{n}.d{n}");
                f.subject = iri(&format!("https://w3id.org/semrender/v#u{n}.d{n}"));
                f
            })
            .collect()
    })
}

fn profiles() -> impl Strategy<Value = UserProfile> {
    (
        prop::option::of(prop::sample::select(PROTOCOLS)),
        prop::option::of(prop::sample::select(TAXONOMY)),
        prop::sample::subsequence(IMPAIRMENTS, 0..=2),
    )
        .prop_map(|(protocol, aesthetic, impairments)| UserProfile {
            subject: None,
            protocol: protocol.map(iri),
            aesthetic: aesthetic.map(iri),
            impairments: impairments.into_iter().map(iri).collect(),
        })
}

fn order(scores: &[semrender_core::matcher::MatchScore]) -> Vec<String> {
    scores.iter().map(|s| s.template.clone()).collect()
}

proptest! {
    #[test]
    fn scaling_weights_preserves_order(profile in profiles(), cands in candidates(), k in 1u64..20) {
        let (aux, closure) = setup();
        let base = rank(&profile, &cands, &aux, &closure, ScoreWeights::default());
        let scaled = rank(&profile, &cands, &aux, &closure, ScoreWeights::default().scaled(k));
        prop_assert_eq!(order(&base), order(&scaled));
        for (a, b) in base.iter().zip(&scaled) {
            prop_assert_eq!(a.total * k, b.total);
        }
    }

    #[test]
    fn candidate_order_is_irrelevant(profile in profiles(), cands in candidates(), seed in any::<u64>()) {
        let (aux, closure) = setup();
        let mut shuffled = cands.clone();
        let len = shuffled.len();
        for i in 0..len {
            let j = (seed.wrapping_mul(i as u64 + 7) % len as u64) as usize;
            shuffled.swap(i, j);
        }
        let a = rank(&profile, &cands, &aux, &closure, ScoreWeights::default());
        let b = rank(&profile, &shuffled, &aux, &closure, ScoreWeights::default());
        prop_assert_eq!(a, b);
    }

    #[test]
    fn hard_filter_is_sound(profile in profiles(), cands in candidates()) {
        let (aux, closure) = setup();
        let required = profile.protocol.as_ref().and_then(|p| aux.markup_for(p, &closure));
        let scores = rank(&profile, &cands, &aux, &closure, ScoreWeights::default());
        for s in &scores {
            let c = cands.iter().find(|c| c.id == s.template).unwrap();
            if let (Some(req), Some(m)) = (required, c.markup) {
                prop_assert_eq!(s.hard_pass, m == req, "{} {:?}", s.template, s.trace);
            }
        }
        let first_fail = scores.iter().position(|s| !s.hard_pass).unwrap_or(scores.len());
        prop_assert!(scores[first_fail..].iter().all(|s| !s.hard_pass));
    }

    #[test]
    fn empty_profile_scores_zero(cands in candidates()) {
        let (aux, closure) = setup();
        let scores = rank(&UserProfile::empty(), &cands, &aux, &closure, ScoreWeights::default());
        prop_assert!(scores.iter().all(|s| s.hard_pass && s.total == 0));
        let mut ids: Vec<String> = cands.iter().map(|c| c.id.clone()).collect();
        ids.sort();
        prop_assert_eq!(order(&scores), ids);
    }

    #[test]
    fn totals_decompose(profile in profiles(), cands in candidates()) {
        let (aux, closure) = setup();
        for s in rank(&profile, &cands, &aux, &closure, ScoreWeights::default()) {
            prop_assert_eq!(s.total, u64::from(s.aesthetic_distance) + s.color_penalty);
            let conflict_weight: u64 = s.conflicts.iter().map(|c| match c.slot {
                semrender_core::matcher::ColorSlot::Primary => 2,
                semrender_core::matcher::ColorSlot::Secondary => 1,
            }).sum();
            prop_assert_eq!(conflict_weight, s.color_penalty);
        }
    }
}

#[test]
fn aligned_synonyms_give_the_canonical_profile() {
    let (_, closure) = setup();
    let g = fixture_graph("user34.ttl");
    let via_alias = extract_profile(&g, &iri("http://example.org/a#user34"), &closure).unwrap();
    let direct = parse_graph(
        "@prefix p: <https://w3id.org/semrender/profile#> .\n\
         <http://example.org/a#user34> p:usesProtocol <http://example.org/z1#WAP2.0> ;\n\
           p:prefersAesthetic <http://example.org/z3#simple> ;\n\
           p:hasImpairment <http://example.org/z5#RedGreenColorBlindness> .\n",
        RdfFormat::Turtle,
    )
    .unwrap();
    let canonical = extract_profile(&direct, &iri("http://example.org/a#user34"), &closure).unwrap();
    assert_eq!(via_alias, canonical);
    assert!(!via_alias.is_empty());
    let impairments: BTreeSet<Term> = via_alias.impairments.clone();
    assert_eq!(impairments.len(), 1);
}
