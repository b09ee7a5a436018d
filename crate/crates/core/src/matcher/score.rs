//! Scoring templates against a user profile.

use std::collections::BTreeMap;

use thiserror::Error;

use super::auxiliary::{term_name, AuxOntologies};
use super::closure::Closure;
use super::profile::UserProfile;
use crate::markup::MarkupFormat;
use crate::rdf::{vocab, Graph, Term};
use crate::registry::{
    normalize_color, template_iri, Template, V_AESTHETIC, V_CODED_IN, V_DESIGN, V_PRIMARY_COLOR,
    V_PROVIDER, V_SECONDARY_COLOR, V_TEMPLATE,
};

/// What the matcher knows about one candidate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TemplateFacets {
    /// `provider.design`.
    pub id: String,
    pub subject: Term,
    pub markup: Option<MarkupFormat>,
    pub aesthetic: Option<Term>,
    pub primary_color: Option<String>,
    pub secondary_color: Option<String>,
}

impl TemplateFacets {
    pub fn of(t: &Template) -> TemplateFacets {
        let f = &t.features;
        TemplateFacets {
            id: t.full_id(),
            subject: template_iri(&t.provider, &t.design),
            markup: Some(f.markup_format),
            aesthetic: Some(Term::literal(f.aesthetic.as_str())),
            primary_color: Some(normalize_color(&f.primary_color)),
            secondary_color: Some(normalize_color(&f.secondary_color)),
        }
    }

    /// Every `v:Template` subject in a metadata graph, ordered by id.
    pub fn from_metadata(g: &Graph) -> Vec<TemplateFacets> {
        let first = |s: &Term, p: &str| g.objects(s, &vocab::named(p)).next().cloned();
        let mut out: Vec<TemplateFacets> = g
            .instances_of(&vocab::named(V_TEMPLATE))
            .into_iter()
            .map(|s| {
                let id = match (first(&s, V_PROVIDER), first(&s, V_DESIGN)) {
                    (Some(p), Some(d)) => format!("{}.{}", p.value(), d.value()),
                    _ => s.local_name().to_owned(),
                };
                TemplateFacets {
                    id,
                    markup: first(&s, V_CODED_IN).and_then(|m| term_name(&m).parse().ok()),
                    aesthetic: first(&s, V_AESTHETIC),
                    primary_color: first(&s, V_PRIMARY_COLOR).map(|c| normalize_color(term_name(&c))),
                    secondary_color: first(&s, V_SECONDARY_COLOR)
                        .map(|c| normalize_color(term_name(&c))),
                    subject: s,
                }
            })
            .collect();
        out.sort_by(|a, b| a.id.cmp(&b.id));
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScoreWeights {
    pub aesthetic: u64,
    pub primary_color: u64,
    pub secondary_color: u64,
}

impl Default for ScoreWeights {
    fn default() -> Self {
        ScoreWeights {
            aesthetic: 1,
            primary_color: 2,
            secondary_color: 1,
        }
    }
}

impl ScoreWeights {
    pub fn scaled(self, k: u64) -> ScoreWeights {
        ScoreWeights {
            aesthetic: self.aesthetic * k,
            primary_color: self.primary_color * k,
            secondary_color: self.secondary_color * k,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum ColorSlot {
    Primary,
    Secondary,
}

impl ColorSlot {
    pub fn as_str(self) -> &'static str {
        match self {
            ColorSlot::Primary => "primary",
            ColorSlot::Secondary => "secondary",
        }
    }
}

/// A template color that an impairment in the profile forbids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColorConflict {
    pub slot: ColorSlot,
    pub color: String,
    pub impairment: Term,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatchScore {
    pub template: String,
    pub hard_pass: bool,
    pub aesthetic_distance: u32,
    pub color_penalty: u64,
    pub total: u64,
    pub conflicts: Vec<ColorConflict>,
    pub trace: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatchError {
    #[error("no candidate templates")]
    NoCandidates,
    #[error("no candidate satisfies the profile's markup requirement")]
    NoneAdmissible,
}

pub fn score(
    profile: &UserProfile,
    t: &TemplateFacets,
    aux: &AuxOntologies,
    closure: &Closure,
    weights: ScoreWeights,
) -> MatchScore {
    let mut trace = Vec::new();

    let hard_pass = match &profile.protocol {
        None => {
            trace.push("no protocol in profile: markup filter passes".to_owned());
            true
        }
        Some(p) => match aux.markup_for(p, closure) {
            None => {
                trace.push(format!("protocol {p} has no known markup: markup filter passes"));
                true
            }
            Some(required) => {
                let pass = t.markup == Some(required);
                let coded = t.markup.map_or("unknown markup", MarkupFormat::as_str);
                trace.push(format!(
                    "protocol {p} requires {required}; template coded in {coded}: {}",
                    if pass { "passes" } else { "excluded" }
                ));
                pass
            }
        },
    };

    let taxonomy = aux.taxonomy();
    let aesthetic_distance = match &profile.aesthetic {
        None => {
            trace.push("no aesthetic preference: distance 0".to_owned());
            0
        }
        Some(pref) => {
            let want = taxonomy.find(pref, closure);
            let have = t.aesthetic.as_ref().and_then(|a| taxonomy.find(a, closure));
            match (want, have) {
                (Some(w), Some(h)) => {
                    let d = taxonomy.distance(w, h);
                    trace.push(format!("aesthetic {} vs preferred {}: distance {d}", h, w));
                    d
                }
                _ => {
                    let d = taxonomy.diameter();
                    let shown = t.aesthetic.as_ref().map_or("none".to_owned(), |a| a.to_string());
                    trace.push(format!(
                        "aesthetic {shown} or preference {pref} not in taxonomy: distance {d} (diameter)"
                    ));
                    d
                }
            }
        }
    };

    let mut forbidden: BTreeMap<String, Term> = BTreeMap::new();
    for i in &profile.impairments {
        match aux.forbidden_colors(i, closure) {
            Some(colors) => {
                for (c, source) in colors {
                    forbidden.entry(c).or_insert(source);
                }
            }
            None => trace.push(format!("impairment {i} unknown: no color restriction")),
        }
    }
    let mut conflicts = Vec::new();
    let mut color_penalty = 0;
    for (slot, color, weight) in [
        (ColorSlot::Primary, &t.primary_color, weights.primary_color),
        (ColorSlot::Secondary, &t.secondary_color, weights.secondary_color),
    ] {
        let Some(color) = color else { continue };
        if let Some(source) = forbidden.get(color) {
            color_penalty += weight;
            trace.push(format!(
                "conflict: {} color {color} is forbidden by {source}; soft penalty {weight}",
                slot.as_str()
            ));
            conflicts.push(ColorConflict {
                slot,
                color: color.clone(),
                impairment: source.clone(),
            });
        }
    }
    if conflicts.is_empty() && !profile.impairments.is_empty() {
        trace.push("no color conflicts".to_owned());
    }

    let total = weights.aesthetic * u64::from(aesthetic_distance) + color_penalty;
    trace.push(format!(
        "total {total} = {} x {aesthetic_distance} + {color_penalty}",
        weights.aesthetic
    ));
    MatchScore {
        template: t.id.clone(),
        hard_pass,
        aesthetic_distance,
        color_penalty,
        total,
        conflicts,
        trace,
    }
}

/// Every candidate scored; admissible ones first, then by total, then by
/// identifier.
pub fn rank(
    profile: &UserProfile,
    candidates: &[TemplateFacets],
    aux: &AuxOntologies,
    closure: &Closure,
    weights: ScoreWeights,
) -> Vec<MatchScore> {
    let mut scores: Vec<MatchScore> = candidates
        .iter()
        .map(|t| score(profile, t, aux, closure, weights))
        .collect();
    scores.sort_by(|a, b| {
        (!a.hard_pass, a.total, &a.template).cmp(&(!b.hard_pass, b.total, &b.template))
    });
    scores
}

pub fn select_best(
    profile: &UserProfile,
    candidates: &[TemplateFacets],
    aux: &AuxOntologies,
    closure: &Closure,
    weights: ScoreWeights,
) -> Result<MatchScore, MatchError> {
    if candidates.is_empty() {
        return Err(MatchError::NoCandidates);
    }
    rank(profile, candidates, aux, closure, weights)
        .into_iter()
        .next()
        .filter(|s| s.hard_pass)
        .ok_or(MatchError::NoneAdmissible)
}
