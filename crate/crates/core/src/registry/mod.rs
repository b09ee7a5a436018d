//! Template registry.
//!
//! Templates live in memory as an immutable [`Snapshot`] behind a lock;
//! readers clone the `Arc` and never block writers for long. Writes go
//! through a single writer mutex, persist to disk first, then swap in a new
//! snapshot.
//!
//! On-disk layout, one directory per provider:
//!
//! ```text
//! <storage>/templates/<provider>/<design>.body
//! <storage>/templates/<provider>/<design>.features
//! ```

mod features;
mod metadata;

use std::collections::BTreeMap;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, RwLock};

use thiserror::Error;

pub use features::{
    check_id, normalize_color, CodeType, FeaturesError, FeaturesFile, FontResize, Size, Template,
    TemplateFeatures, TemplateKind,
};
pub use metadata::*;

use crate::element_ref::ElementRef;
use crate::rdf::Graph;
use crate::template::{parse_template, TemplateAst, TemplateParseError, TemplateSource};

#[derive(Debug, Error)]
pub enum RegistryError {
    #[error("template {0} is already registered")]
    Duplicate(String),
    #[error("template {0} not found")]
    NotFound(String),
    #[error("template body does not parse: {0}")]
    Body(#[from] TemplateParseError),
    #[error(transparent)]
    Features(#[from] FeaturesError),
    #[error("storage error at {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("stored template at {path} is invalid: {reason}")]
    Corrupt { path: PathBuf, reason: String },
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> RegistryError + '_ {
    move |source| RegistryError::Io {
        path: path.to_owned(),
        source,
    }
}

#[derive(Debug)]
struct Entry {
    template: Template,
    ast: Arc<TemplateAst>,
}

/// A consistent, immutable view of the registry.
#[derive(Debug, Default)]
pub struct Snapshot {
    // Keyed by (provider, design).
    entries: BTreeMap<(String, String), Entry>,
}

impl Snapshot {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Exact, case-sensitive lookup.
    pub fn get(&self, provider: &str, design: &str) -> Result<&Template, RegistryError> {
        self.entries
            .get(&(provider.to_owned(), design.to_owned()))
            .map(|e| &e.template)
            .ok_or_else(|| RegistryError::NotFound(format!("{provider}.{design}")))
    }

    pub fn ast(&self, provider: &str, design: &str) -> Option<Arc<TemplateAst>> {
        self.entries
            .get(&(provider.to_owned(), design.to_owned()))
            .map(|e| e.ast.clone())
    }

    /// All templates, ordered by full identifier.
    pub fn all(&self) -> Vec<&Template> {
        let mut all: Vec<&Template> = self.entries.values().map(|e| &e.template).collect();
        all.sort_by_key(|t| t.full_id());
        all
    }

    /// Templates of `kind` whose target serves `element`, ordered by full
    /// identifier. A versionless query matches every version.
    pub fn list_for(&self, element: &ElementRef, kind: TemplateKind) -> Vec<&Template> {
        self.all()
            .into_iter()
            .filter(|t| t.features.kind == kind && element.matches_target(&t.target))
            .collect()
    }

    /// One subject per template describing its features.
    pub fn metadata_graph(&self) -> Graph {
        let mut g = Graph::new();
        for e in self.entries.values() {
            g.extend_from(&template_metadata(&e.template));
        }
        g
    }
}

impl TemplateSource for Snapshot {
    fn lookup(&self, designer: &str, design: &str) -> Option<Arc<TemplateAst>> {
        self.ast(designer, design)
    }
}

pub struct Registry {
    dir: Option<PathBuf>,
    current: RwLock<Arc<Snapshot>>,
    writer: Mutex<()>,
}

impl Registry {
    pub fn in_memory() -> Registry {
        Registry {
            dir: None,
            current: RwLock::new(Arc::new(Snapshot::default())),
            writer: Mutex::new(()),
        }
    }

    /// Opens (creating if needed) a storage directory and loads every
    /// template in it.
    pub fn open(dir: impl Into<PathBuf>) -> Result<Registry, RegistryError> {
        let dir = dir.into();
        let templates = dir.join("templates");
        fs::create_dir_all(&templates).map_err(io_err(&templates))?;
        let mut snapshot = Snapshot::default();
        let mut providers: Vec<PathBuf> = fs::read_dir(&templates)
            .map_err(io_err(&templates))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.is_dir())
            .collect();
        providers.sort();
        for provider_dir in providers {
            let mut files: Vec<PathBuf> = fs::read_dir(&provider_dir)
                .map_err(io_err(&provider_dir))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.extension().is_some_and(|x| x == "features"))
                .collect();
            files.sort();
            for features_path in files {
                let entry = load_entry(&features_path)?;
                let key = (entry.template.provider.clone(), entry.template.design.clone());
                snapshot.entries.insert(key, entry);
            }
        }
        Ok(Registry {
            dir: Some(dir),
            current: RwLock::new(Arc::new(snapshot)),
            writer: Mutex::new(()),
        })
    }

    pub fn storage_dir(&self) -> Option<&Path> {
        self.dir.as_deref()
    }

    pub fn snapshot(&self) -> Arc<Snapshot> {
        self.current
            .read()
            .unwrap_or_else(|e| e.into_inner())
            .clone()
    }

    /// Validates, persists and publishes a template. Fails on an existing
    /// identifier unless `overwrite` is set.
    pub fn register(&self, t: Template, overwrite: bool) -> Result<(), RegistryError> {
        check_id(&t.provider)?;
        check_id(&t.design)?;
        t.features.validate()?;
        let ast = Arc::new(parse_template(&t.body)?);

        let _guard = self.writer.lock().unwrap_or_else(|e| e.into_inner());
        let before = self.snapshot();
        let key = (t.provider.clone(), t.design.clone());
        if !overwrite && before.entries.contains_key(&key) {
            return Err(RegistryError::Duplicate(t.full_id()));
        }
        if let Some(dir) = &self.dir {
            persist(dir, &t)?;
        }
        let mut entries: BTreeMap<(String, String), Entry> = before
            .entries
            .iter()
            .map(|(k, e)| {
                (
                    k.clone(),
                    Entry {
                        template: e.template.clone(),
                        ast: e.ast.clone(),
                    },
                )
            })
            .collect();
        entries.insert(key, Entry { template: t, ast });
        *self.current.write().unwrap_or_else(|e| e.into_inner()) = Arc::new(Snapshot { entries });
        Ok(())
    }

    pub fn get(&self, provider: &str, design: &str) -> Result<Template, RegistryError> {
        self.snapshot().get(provider, design).cloned()
    }

    pub fn list_for(&self, element: &ElementRef, kind: TemplateKind) -> Vec<Template> {
        self.snapshot()
            .list_for(element, kind)
            .into_iter()
            .cloned()
            .collect()
    }

    pub fn metadata_graph(&self) -> Graph {
        self.snapshot().metadata_graph()
    }
}

fn paths(dir: &Path, provider: &str, design: &str) -> (PathBuf, PathBuf) {
    let base = dir.join("templates").join(provider);
    (
        base.join(format!("{design}.body")),
        base.join(format!("{design}.features")),
    )
}

fn write_atomic(path: &Path, contents: &[u8]) -> Result<(), RegistryError> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, contents).map_err(io_err(&tmp))?;
    fs::rename(&tmp, path).map_err(io_err(path))
}

fn persist(dir: &Path, t: &Template) -> Result<(), RegistryError> {
    let (body, features) = paths(dir, &t.provider, &t.design);
    if let Some(parent) = body.parent() {
        fs::create_dir_all(parent).map_err(io_err(parent))?;
    }
    write_atomic(&body, t.body.as_bytes())?;
    write_atomic(&features, FeaturesFile::of(t).to_text().as_bytes())
}

fn load_entry(features_path: &Path) -> Result<Entry, RegistryError> {
    let corrupt = |reason: String| RegistryError::Corrupt {
        path: features_path.to_owned(),
        reason,
    };
    let text = fs::read_to_string(features_path).map_err(io_err(features_path))?;
    let file = FeaturesFile::parse(&text).map_err(|e| corrupt(e.to_string()))?;
    let stem = features_path.file_stem().and_then(|s| s.to_str());
    let dir_name = features_path
        .parent()
        .and_then(|p| p.file_name())
        .and_then(|s| s.to_str());
    if stem != Some(file.design.as_str()) || dir_name != Some(file.provider.as_str()) {
        return Err(corrupt(format!(
            "file location does not match identifier {}.{}",
            file.provider, file.design
        )));
    }
    let body_path = features_path.with_extension("body");
    let body = fs::read_to_string(&body_path).map_err(io_err(&body_path))?;
    let ast = parse_template(&body).map_err(|e| corrupt(e.to_string()))?;
    Ok(Entry {
        template: file.into_template(body),
        ast: Arc::new(ast),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::element_ref::parse_element_ref;
    use crate::markup::MarkupFormat;

    pub(crate) fn sample(provider: &str, design: &str, target: &str) -> Template {
        Template {
            provider: provider.into(),
            design: design.into(),
            target: parse_element_ref(target).unwrap(),
            body: "<div>[{OmemoGetP propName='foaf.name'}]</div>".into(),
            features: TemplateFeatures {
                kind: TemplateKind::Output,
                code_types: [CodeType::Html].into_iter().collect(),
                primary_color: "red".into(),
                secondary_color: "yellow".into(),
                aesthetic: "minimal".into(),
                markup_format: MarkupFormat::Xhtml,
                preferred_size: Size { width: 200, height: 100 },
                min_size: Size { width: 100, height: 50 },
                max_size: Size { width: 400, height: 200 },
                font_resize: FontResize::Reflow,
            },
        }
    }

    #[test]
    fn register_then_get() {
        let reg = Registry::in_memory();
        let t = sample("user3", "test", "foaf.Person");
        reg.register(t.clone(), false).unwrap();
        assert_eq!(reg.get("user3", "test").unwrap(), t);
    }

    #[test]
    fn duplicate_rejected_unless_overwrite() {
        let reg = Registry::in_memory();
        reg.register(sample("user3", "test", "foaf.Person"), false).unwrap();
        assert!(matches!(
            reg.register(sample("user3", "test", "foaf.Person"), false),
            Err(RegistryError::Duplicate(id)) if id == "user3.test"
        ));
        let mut changed = sample("user3", "test", "foaf.Person");
        changed.body = "changed".into();
        reg.register(changed, true).unwrap();
        assert_eq!(reg.get("user3", "test").unwrap().body, "changed");
    }

    #[test]
    fn bad_body_rejected() {
        let reg = Registry::in_memory();
        let mut t = sample("user3", "test", "foaf.Person");
        t.body = "[{OmemoGetP}]".into();
        assert!(matches!(reg.register(t, false), Err(RegistryError::Body(_))));
        assert!(reg.snapshot().is_empty());
    }

    #[test]
    fn lookup_is_case_sensitive() {
        let reg = Registry::in_memory();
        reg.register(sample("user3", "test", "foaf.Person"), false).unwrap();
        assert!(matches!(reg.get("User3", "test"), Err(RegistryError::NotFound(_))));
        assert!(matches!(reg.get("user3", "absent"), Err(RegistryError::NotFound(_))));
    }

    #[test]
    fn list_for_filters_by_target_and_kind() {
        let reg = Registry::in_memory();
        reg.register(sample("b", "one", "foaf.Person"), false).unwrap();
        reg.register(sample("a", "two", "foaf.Person.20050603"), false).unwrap();
        reg.register(sample("c", "three", "foaf.Person"), false).unwrap();
        reg.register(sample("d", "doc", "foaf.Document"), false).unwrap();
        let mut input = sample("e", "in", "foaf.Person");
        input.features.kind = TemplateKind::Input;
        reg.register(input, false).unwrap();

        let person = parse_element_ref("foaf.Person").unwrap();
        let ids: Vec<String> = reg
            .list_for(&person, TemplateKind::Output)
            .iter()
            .map(Template::full_id)
            .collect();
        assert_eq!(ids, vec!["a.two", "b.one", "c.three"]);

        let versioned = parse_element_ref("foaf.Person.20050603").unwrap();
        assert_eq!(reg.list_for(&versioned, TemplateKind::Output).len(), 1);
        assert_eq!(reg.list_for(&person, TemplateKind::Input).len(), 1);
        let org = parse_element_ref("foaf.Organization").unwrap();
        assert!(reg.list_for(&org, TemplateKind::Output).is_empty());
    }

    #[test]
    fn snapshots_are_isolated_from_later_writes() {
        let reg = Registry::in_memory();
        let before = reg.snapshot();
        reg.register(sample("user3", "test", "foaf.Person"), false).unwrap();
        assert!(before.is_empty());
        assert_eq!(reg.snapshot().len(), 1);
    }

    #[test]
    fn persists_across_reopen() {
        let dir = tempfile::tempdir().unwrap();
        let t = sample("user3", "test", "foaf.Person");
        {
            let reg = Registry::open(dir.path()).unwrap();
            reg.register(t.clone(), false).unwrap();
        }
        let reg = Registry::open(dir.path()).unwrap();
        assert_eq!(reg.get("user3", "test").unwrap(), t);
        assert!(dir.path().join("templates/user3/test.body").is_file());
        assert!(dir.path().join("templates/user3/test.features").is_file());
    }

    #[test]
    fn misplaced_file_is_corrupt() {
        let dir = tempfile::tempdir().unwrap();
        {
            let reg = Registry::open(dir.path()).unwrap();
            reg.register(sample("user3", "test", "foaf.Person"), false).unwrap();
        }
        let from = dir.path().join("templates/user3");
        fs::rename(from.join("test.features"), from.join("other.features")).unwrap();
        assert!(matches!(
            Registry::open(dir.path()),
            Err(RegistryError::Corrupt { .. })
        ));
    }

    #[test]
    fn metadata_has_matching_facets() {
        let reg = Registry::in_memory();
        reg.register(sample("user3", "design67", "foaf.Person"), false).unwrap();
        let g = reg.metadata_graph();
        let s = template_iri("user3", "design67");
        let lit = |p: &str| g.values_of(&s, &crate::rdf::vocab::named(p));
        assert_eq!(lit(V_CODED_IN), vec![crate::rdf::Term::literal("XHTML")]);
        assert_eq!(lit(V_AESTHETIC), vec![crate::rdf::Term::literal("minimal")]);
        assert_eq!(lit(V_PRIMARY_COLOR), vec![crate::rdf::Term::literal("red")]);
        assert_eq!(lit(V_SECONDARY_COLOR), vec![crate::rdf::Term::literal("yellow")]);
    }

    #[test]
    fn metadata_one_subject_per_template() {
        let reg = Registry::in_memory();
        assert!(reg.metadata_graph().is_empty());
        for i in 0..4 {
            reg.register(sample("p", &format!("d{i}"), "foaf.Person"), false).unwrap();
        }
        let g = reg.metadata_graph();
        let subjects: std::collections::BTreeSet<_> = g.iter().map(|t| t.subject().clone()).collect();
        assert_eq!(subjects.len(), 4);
        let again = Registry::in_memory();
        for i in 0..4 {
            again.register(sample("p", &format!("d{i}"), "foaf.Person"), false).unwrap();
        }
        assert_eq!(again.metadata_graph(), g);
    }
}
