//! Alignment links and their equivalence closure.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::rdf::{vocab, Graph, Term};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LinkKind {
    SameAs,
    EquivalentClass,
    EquivalentProperty,
}

impl LinkKind {
    pub fn iri(self) -> &'static str {
        match self {
            LinkKind::SameAs => vocab::OWL_SAME_AS,
            LinkKind::EquivalentClass => vocab::OWL_EQUIVALENT_CLASS,
            LinkKind::EquivalentProperty => vocab::OWL_EQUIVALENT_PROPERTY,
        }
    }

    pub fn from_iri(iri: &str) -> Option<LinkKind> {
        [
            LinkKind::SameAs,
            LinkKind::EquivalentClass,
            LinkKind::EquivalentProperty,
        ]
        .into_iter()
        .find(|k| k.iri() == iri)
    }

    pub fn role(self) -> Role {
        match self {
            LinkKind::SameAs => Role::Individual,
            LinkKind::EquivalentClass => Role::Class,
            LinkKind::EquivalentProperty => Role::Property,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Role {
    Individual,
    Class,
    Property,
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Role::Individual => "individual",
            Role::Class => "class",
            Role::Property => "property",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClosureError {
    #[error("{term} is linked both as {first} and as {second}")]
    RoleConflict { term: Term, first: Role, second: Role },
    #[error("alignment link to a literal: {0}")]
    LiteralEndpoint(Term),
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AlignmentSet {
    links: BTreeSet<(Term, Term, LinkKind)>,
}

impl AlignmentSet {
    pub fn new() -> AlignmentSet {
        AlignmentSet::default()
    }

    pub fn insert(&mut self, a: Term, b: Term, kind: LinkKind) -> Result<(), ClosureError> {
        for t in [&a, &b] {
            if t.is_literal() {
                return Err(ClosureError::LiteralEndpoint(t.clone()));
            }
        }
        self.links.insert((a, b, kind));
        Ok(())
    }

    /// Every `owl:sameAs`, `owl:equivalentClass` and
    /// `owl:equivalentProperty` triple in `g`.
    pub fn from_graph(g: &Graph) -> Result<AlignmentSet, ClosureError> {
        let mut set = AlignmentSet::new();
        for t in g.iter() {
            if let Some(kind) = t.predicate().as_iri().and_then(LinkKind::from_iri) {
                set.insert(t.subject().clone(), t.object().clone(), kind)?;
            }
        }
        Ok(set)
    }

    pub fn len(&self) -> usize {
        self.links.len()
    }

    pub fn is_empty(&self) -> bool {
        self.links.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &(Term, Term, LinkKind)> {
        self.links.iter()
    }
}

/// A partition of terms. Terms never linked are implicit singletons.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Closure {
    // Every linked term to its representative, the smallest member.
    repr: BTreeMap<Term, Term>,
    classes: BTreeMap<Term, BTreeSet<Term>>,
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Smallest partition in which linked terms share a class.
pub fn equivalence_closure(set: &AlignmentSet) -> Result<Closure, ClosureError> {
    let mut index: BTreeMap<&Term, (usize, Role)> = BTreeMap::new();
    for (a, b, kind) in &set.links {
        let role = kind.role();
        for t in [a, b] {
            let next = index.len();
            let (_, seen) = *index.entry(t).or_insert((next, role));
            if seen != role {
                let (first, second) = (seen.min(role), seen.max(role));
                return Err(ClosureError::RoleConflict {
                    term: t.clone(),
                    first,
                    second,
                });
            }
        }
    }
    let mut uf = UnionFind {
        parent: (0..index.len()).collect(),
    };
    for (a, b, _) in &set.links {
        uf.union(index[a].0, index[b].0);
    }
    let mut by_root: BTreeMap<usize, BTreeSet<Term>> = BTreeMap::new();
    for (t, (i, _)) in &index {
        by_root.entry(uf.find(*i)).or_default().insert((*t).clone());
    }
    let mut closure = Closure::default();
    for members in by_root.into_values() {
        let rep = members.first().expect("nonempty class").clone();
        for m in &members {
            closure.repr.insert(m.clone(), rep.clone());
        }
        closure.classes.insert(rep, members);
    }
    Ok(closure)
}

impl Closure {
    /// The partition with every term alone.
    pub fn identity() -> Closure {
        Closure::default()
    }

    /// Representative of `t`'s class: its smallest member.
    pub fn canonical(&self, t: &Term) -> Term {
        self.repr.get(t).unwrap_or(t).clone()
    }

    pub fn same(&self, a: &Term, b: &Term) -> bool {
        a == b || (self.repr.contains_key(a) && self.repr.get(a) == self.repr.get(b))
    }

    pub fn class_of(&self, t: &Term) -> BTreeSet<Term> {
        match self.repr.get(t) {
            Some(rep) => self.classes[rep].clone(),
            None => BTreeSet::from([t.clone()]),
        }
    }

    /// Classes with more than one member, ordered by representative.
    pub fn classes(&self) -> impl Iterator<Item = &BTreeSet<Term>> {
        self.classes.values()
    }
}
