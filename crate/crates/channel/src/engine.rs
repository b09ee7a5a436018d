//! The rendering engine behind the channel: data acquisition, template
//! selection and markup generation.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use thiserror::Error;
use url::Url;

use semrender_core::describe::{describe_element, render_description, DescribeError};
use semrender_core::element_ref::{ElementRef, ElementRefError};
use semrender_core::markup::{document, escape, MarkupFormat};
use semrender_core::matcher::{
    equivalence_closure, extract_profile, profile_subject, rank, AlignmentSet, AuxError,
    AuxOntologies, Closure, ClosureError, MatchScore, ScoreWeights, TemplateFacets, UserProfile,
};
use semrender_core::rdf::{
    parse_sniffed, serialize_turtle_with_prefixes, Graph, ParseError, PrefixError, PrefixRegistry,
    Term,
};
use semrender_core::registry::{Registry, RegistryError, Template, TemplateKind, V_NS};
use semrender_core::template::{
    default_visualization_of, element_subjects, form_to_graph, render_input_form,
    render_subjects, ExpandError, FormError, NoTemplates, RenderEnv,
};

use crate::config::Config;
use crate::fetch::{FetchError, HttpFetcher, SourceFetcher};
use crate::request::{Action, Method, ProviderId, RenderRequest, RequestError};
use crate::submissions::{SubmissionError, SubmissionStore};

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("cannot parse {path}: {source}")]
    Parse { path: PathBuf, source: ParseError },
    #[error("invalid prefix setting: {0}")]
    Prefix(#[from] PrefixError),
    #[error("invalid auxiliary ontology {path}: {source}")]
    Aux { path: PathBuf, source: Box<AuxError> },
    #[error("invalid alignments {path}: {source}")]
    Alignments { path: PathBuf, source: ClosureError },
    #[error(transparent)]
    Registry(#[from] RegistryError),
    #[error(transparent)]
    Submissions(#[from] SubmissionError),
}

/// Why a request could not be served. Each maps to an HTTP status.
#[derive(Debug, Error)]
pub enum HandleError {
    #[error(transparent)]
    Request(#[from] RequestError),
    #[error(transparent)]
    UnknownElement(#[from] ElementRefError),
    #[error(transparent)]
    Fetch(#[from] FetchError),
    #[error("source {url} is not Turtle or N-Triples: {source}")]
    SourceParse { url: String, source: ParseError },
    #[error("request data is not Turtle or N-Triples: {0}")]
    BodyParse(ParseError),
    #[error("profile {url} has conflicting alignment links: {source}")]
    ProfileAlignment { url: String, source: ClosureError },
    #[error("template {0} not found")]
    TemplateNotFound(String),
    #[error("template {id} is an {kind} template")]
    WrongKind { id: String, kind: TemplateKind },
    #[error("template {id} targets {target}, not {object}")]
    WrongTarget {
        id: String,
        target: String,
        object: String,
    },
    #[error(transparent)]
    Expand(#[from] ExpandError),
    #[error(transparent)]
    Form(#[from] FormError),
    #[error(transparent)]
    Describe(#[from] DescribeError),
    #[error(transparent)]
    Submission(#[from] SubmissionError),
    #[error(transparent)]
    Registry(RegistryError),
}

impl HandleError {
    pub fn status(&self) -> u16 {
        use HandleError::*;
        match self {
            Request(_) | UnknownElement(_) | BodyParse(_) | WrongKind { .. }
            | WrongTarget { .. } => 400,
            Fetch(_) | SourceParse { .. } | ProfileAlignment { .. } => 502,
            TemplateNotFound(_) => 404,
            Describe(DescribeError::NotInOntology(_)) => 404,
            Describe(DescribeError::Resolve(_)) => 400,
            Form(FormError::Describe(DescribeError::NotInOntology(_)) | FormError::NoOntology(_)) => {
                404
            }
            Form(_) => 400,
            Registry(RegistryError::Duplicate(_)) => 409,
            Registry(RegistryError::NotFound(_)) => 404,
            Registry(RegistryError::Body(_) | RegistryError::Features(_)) => 400,
            Expand(_) | Submission(_) | Registry(_) => 500,
        }
    }

    pub fn reason(status: u16) -> &'static str {
        match status {
            400 => "Bad Request",
            404 => "Not Found",
            409 => "Conflict",
            415 => "Unsupported Media Type",
            500 => "Internal Server Error",
            502 => "Bad Gateway",
            _ => "Error",
        }
    }
}

/// A finished channel response.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Response {
    pub status: u16,
    pub content_type: &'static str,
    pub body: String,
    /// Notes sent as `Warning` headers.
    pub warnings: Vec<String>,
    /// Where a newly stored submission can be retrieved.
    pub location: Option<String>,
    /// Full identifier of the template used, if any.
    pub template: Option<String>,
}

/// Small diagnostic page for an error status.
pub fn error_page(format: MarkupFormat, status: u16, message: &str) -> String {
    let reason = HandleError::reason(status);
    document(
        format,
        &format!("{status} {reason}"),
        &format!(
            "<div class=\"semrender-error\">\n<h1>{status} {reason}</h1>\n<p>{}</p>\n</div>\n",
            escape(message)
        ),
    )
}

/// Result of matching a profile against the candidates for an element.
#[derive(Debug, Clone)]
pub struct MatchReport {
    pub profile: UserProfile,
    /// Admissible candidates first, best first.
    pub scores: Vec<MatchScore>,
}

impl MatchReport {
    pub fn best(&self) -> Option<&MatchScore> {
        self.scores.first().filter(|s| s.hard_pass)
    }
}

/// Which template renders a request.
#[derive(Debug, Clone, Default)]
pub struct Selection {
    pub template: Option<Template>,
    pub notes: Vec<String>,
}

pub struct EngineBuilder {
    base_url: String,
    prefixes: PrefixRegistry,
    ontology: Graph,
    registry: Option<Registry>,
    aux: AuxOntologies,
    alignments: AlignmentSet,
    weights: ScoreWeights,
    submissions: Option<SubmissionStore>,
    fetcher: Option<Arc<dyn SourceFetcher>>,
}

impl EngineBuilder {
    pub fn prefixes(mut self, prefixes: PrefixRegistry) -> Self {
        self.prefixes = prefixes;
        self
    }

    pub fn ontology(mut self, ontology: Graph) -> Self {
        self.ontology = ontology;
        self
    }

    pub fn registry(mut self, registry: Registry) -> Self {
        self.registry = Some(registry);
        self
    }

    pub fn aux(mut self, aux: AuxOntologies) -> Self {
        self.aux = aux;
        self
    }

    pub fn alignments(mut self, alignments: AlignmentSet) -> Self {
        self.alignments = alignments;
        self
    }

    pub fn weights(mut self, weights: ScoreWeights) -> Self {
        self.weights = weights;
        self
    }

    pub fn submissions(mut self, submissions: SubmissionStore) -> Self {
        self.submissions = Some(submissions);
        self
    }

    pub fn fetcher(mut self, fetcher: Arc<dyn SourceFetcher>) -> Self {
        self.fetcher = Some(fetcher);
        self
    }

    pub fn build(self) -> Result<Engine, ClosureError> {
        let closure = equivalence_closure(&self.alignments)?;
        Ok(Engine {
            base_url: self.base_url,
            prefixes: self.prefixes,
            ontology: self.ontology,
            registry: self.registry.unwrap_or_else(Registry::in_memory),
            aux: self.aux,
            alignments: self.alignments,
            closure,
            weights: self.weights,
            submissions: self.submissions.unwrap_or_else(SubmissionStore::in_memory),
            fetcher: self.fetcher.unwrap_or_else(|| Arc::new(HttpFetcher::new())),
        })
    }
}

pub struct Engine {
    base_url: String,
    prefixes: PrefixRegistry,
    ontology: Graph,
    registry: Registry,
    aux: AuxOntologies,
    alignments: AlignmentSet,
    closure: Closure,
    weights: ScoreWeights,
    submissions: SubmissionStore,
    fetcher: Arc<dyn SourceFetcher>,
}

fn read_graph(path: &Path) -> Result<Graph, EngineError> {
    let text = fs::read_to_string(path).map_err(|source| EngineError::Read {
        path: path.to_owned(),
        source,
    })?;
    parse_sniffed(&text).map_err(|source| EngineError::Parse {
        path: path.to_owned(),
        source,
    })
}

fn read_optional(path: Option<&PathBuf>) -> Result<Graph, EngineError> {
    path.map_or_else(|| Ok(Graph::new()), |p| read_graph(p))
}

/// Default prefixes plus `v`, then configured ones.
fn prefix_registry(config: &Config) -> Result<PrefixRegistry, PrefixError> {
    let mut reg = PrefixRegistry::with_defaults();
    reg.insert("v", V_NS)?;
    for p in &config.prefixes {
        match &p.version {
            None => reg.insert(&p.prefix, &p.namespace)?,
            Some(v) => reg.insert_version(&p.prefix, v, &p.namespace)?,
        }
    }
    Ok(reg)
}

impl Engine {
    pub fn builder(base_url: impl Into<String>) -> EngineBuilder {
        let mut prefixes = PrefixRegistry::with_defaults();
        prefixes.insert("v", V_NS).expect("static namespace");
        EngineBuilder {
            base_url: base_url.into().trim_end_matches('/').to_owned(),
            prefixes,
            ontology: Graph::new(),
            registry: None,
            aux: AuxOntologies::default(),
            alignments: AlignmentSet::new(),
            weights: ScoreWeights::default(),
            submissions: None,
            fetcher: None,
        }
    }

    /// Loads every file named by `config`. Errors name the offending file.
    pub fn from_config(config: &Config) -> Result<Engine, EngineError> {
        let prefixes = prefix_registry(config)?;
        let mut ontology = Graph::new();
        for path in &config.ontologies {
            ontology.extend_from(&read_graph(path)?);
        }
        let protocols = read_optional(config.protocols.as_ref())?;
        let aesthetics = read_optional(config.aesthetics.as_ref())?;
        let impairments = read_optional(config.impairments.as_ref())?;
        let empty = Graph::new();
        for (path, graphs) in [
            (&config.protocols, [&protocols, &empty, &empty]),
            (&config.aesthetics, [&empty, &aesthetics, &empty]),
            (&config.impairments, [&empty, &empty, &impairments]),
        ] {
            if let (Some(path), Err(source)) =
                (path, AuxOntologies::from_graphs(graphs[0], graphs[1], graphs[2]))
            {
                return Err(EngineError::Aux {
                    path: path.clone(),
                    source: Box::new(source),
                });
            }
        }
        let aux = AuxOntologies::from_graphs(&protocols, &aesthetics, &impairments)
            .expect("each graph validated on its own");
        let alignments_graph = read_optional(config.alignments.as_ref())?;
        let alignment_err = |source| EngineError::Alignments {
            path: config.alignments.clone().unwrap_or_default(),
            source,
        };
        let alignments = AlignmentSet::from_graph(&alignments_graph).map_err(alignment_err)?;
        let registry = Registry::open(&config.storage_dir)?;
        let submissions = SubmissionStore::open(config.storage_dir.join("submissions"))?;
        Engine::builder(config.base_url())
            .prefixes(prefixes)
            .ontology(ontology)
            .registry(registry)
            .aux(aux)
            .alignments(alignments)
            .weights(config.weights)
            .submissions(submissions)
            .build()
            .map_err(alignment_err)
    }

    pub fn base_url(&self) -> &str {
        &self.base_url
    }

    pub fn prefixes(&self) -> &PrefixRegistry {
        &self.prefixes
    }

    pub fn ontology(&self) -> &Graph {
        &self.ontology
    }

    pub fn registry(&self) -> &Registry {
        &self.registry
    }

    pub fn aux(&self) -> &AuxOntologies {
        &self.aux
    }

    pub fn closure(&self) -> &Closure {
        &self.closure
    }

    pub fn submissions(&self) -> &SubmissionStore {
        &self.submissions
    }

    pub fn fetcher(&self) -> &dyn SourceFetcher {
        self.fetcher.as_ref()
    }

    /// Serves a validated request, turning failures into diagnostic pages.
    pub async fn handle(&self, req: &RenderRequest) -> Response {
        let format = req.output_format;
        let mut warnings: Vec<String> = req
            .ignored
            .iter()
            .map(|p| format!("ignored unknown parameter {p}"))
            .collect();
        match self.try_handle(req).await {
            Ok(done) => {
                warnings.extend(done.notes);
                Response {
                    status: 200,
                    content_type: format.content_type(),
                    body: done.body,
                    warnings,
                    location: done.location,
                    template: done.template,
                }
            }
            Err(e) => {
                let status = e.status();
                Response {
                    status,
                    content_type: format.content_type(),
                    body: error_page(format, status, &e.to_string()),
                    warnings,
                    location: None,
                    template: None,
                }
            }
        }
    }

    /// Parses and serves raw parameters.
    pub async fn handle_params(
        &self,
        method: Method,
        params: &[(String, String)],
        body: Option<String>,
    ) -> Response {
        match crate::request::parse_request(method, params, body) {
            Ok(req) => self.handle(&req).await,
            Err(e) => {
                // Honour a valid outputFormat even when other parameters fail.
                let format = params
                    .iter()
                    .find(|(k, _)| k == crate::request::OUTPUT_FORMAT)
                    .and_then(|(_, v)| v.parse().ok())
                    .unwrap_or_default();
                Response {
                    status: 400,
                    content_type: MarkupFormat::content_type(format),
                    body: error_page(format, 400, &e.to_string()),
                    warnings: Vec::new(),
                    location: None,
                    template: None,
                }
            }
        }
    }

    async fn try_handle(&self, req: &RenderRequest) -> Result<Done, HandleError> {
        req.object.resolve(&self.prefixes)?;
        let format = req.output_format;
        match req.action {
            Action::RenderInput if req.submission => {
                let g = form_to_graph(&req.fields, &req.object, &self.prefixes)?;
                let subjects = g.instances_of(&req.object.resolve(&self.prefixes)?);
                let id = self.submissions.store(g.clone())?;
                let content = default_visualization_of(self.env(&g, None), &req.object, &subjects);
                Ok(Done {
                    body: document(format, &req.object.to_string(), &content),
                    notes: Vec::new(),
                    location: Some(format!("{}/submissions/{id}", self.base_url)),
                    template: None,
                })
            }
            Action::RenderInput => {
                let profile = self.load_profile(req).await?;
                let selection =
                    self.select_template(&req.object, TemplateKind::Input, req.provider.as_ref(), profile.as_ref())?;
                let ast = match &selection.template {
                    Some(t) => Some(semrender_core::template::parse_template(&t.body).map_err(|e| {
                        HandleError::Registry(RegistryError::Body(e))
                    })?),
                    None => None,
                };
                let empty = Graph::new();
                let form = render_input_form(self.env(&empty, None), &req.object, ast.as_ref(), format)?;
                Ok(Done {
                    body: document(format, &req.object.to_string(), &form),
                    template: selection.template.as_ref().map(Template::full_id),
                    notes: selection.notes,
                    location: None,
                })
            }
            Action::RenderOutput => {
                let (data, source) = match req.method {
                    Method::Get => {
                        let url = req.source.as_ref().ok_or(RequestError::Missing(crate::request::SOURCE))?;
                        (self.fetch_graph(url).await?, Some(url.as_str()))
                    }
                    Method::Post => {
                        let body = req.body.as_deref().ok_or(RequestError::MissingBody)?;
                        (parse_sniffed(body).map_err(HandleError::BodyParse)?, None)
                    }
                };
                let profile = self.load_profile(req).await?;
                let selection = self.select_template(
                    &req.object,
                    TemplateKind::Output,
                    req.provider.as_ref(),
                    profile.as_ref(),
                )?;
                let content = self.render_output(
                    &data,
                    source,
                    &req.object,
                    selection.template.as_ref(),
                    req.focus.as_ref(),
                )?;
                Ok(Done {
                    body: document(format, &req.object.to_string(), &content),
                    template: selection.template.as_ref().map(Template::full_id),
                    notes: selection.notes,
                    location: None,
                })
            }
        }
    }

    fn env<'a>(&'a self, graph: &'a Graph, source: Option<&'a str>) -> RenderEnv<'a> {
        RenderEnv {
            graph,
            base_url: &self.base_url,
            source_url: source,
            templates: &NoTemplates,
            prefixes: &self.prefixes,
            ontology: Some(&self.ontology),
        }
    }

    /// Renders `object` over `data` with `template`, or the default
    /// visualization when there is none. `focus` narrows to one individual.
    pub fn render_output(
        &self,
        data: &Graph,
        source: Option<&str>,
        object: &ElementRef,
        template: Option<&Template>,
        focus: Option<&Term>,
    ) -> Result<String, HandleError> {
        let snapshot = self.registry.snapshot();
        let env = RenderEnv {
            graph: data,
            base_url: &self.base_url,
            source_url: source,
            templates: &*snapshot,
            prefixes: &self.prefixes,
            ontology: Some(&self.ontology),
        };
        let mut subjects = element_subjects(&env, object)?;
        if let Some(f) = focus {
            let present = subjects.contains(f) || data.triples_about(f).next().is_some();
            subjects = if present { vec![f.clone()] } else { Vec::new() };
        }
        match template {
            None => Ok(default_visualization_of(env, object, &subjects)),
            Some(t) => {
                let ast = snapshot
                    .ast(&t.provider, &t.design)
                    .ok_or_else(|| HandleError::TemplateNotFound(t.full_id()))?;
                Ok(render_subjects(env, object, &ast, &subjects)?)
            }
        }
    }

    /// Picks the template for a request: the named provider, else the best
    /// match for the profile, else none (default visualization).
    pub fn select_template(
        &self,
        object: &ElementRef,
        kind: TemplateKind,
        provider: Option<&ProviderId>,
        profile: Option<&(Graph, Option<String>)>,
    ) -> Result<Selection, HandleError> {
        if let Some(id) = provider {
            let t = self
                .registry
                .get(&id.provider, &id.design)
                .map_err(|_| HandleError::TemplateNotFound(id.to_string()))?;
            if t.features.kind != kind {
                return Err(HandleError::WrongKind {
                    id: t.full_id(),
                    kind: t.features.kind,
                });
            }
            if t.target.without_version() != object.without_version() {
                return Err(HandleError::WrongTarget {
                    id: t.full_id(),
                    target: t.target.to_string(),
                    object: object.to_string(),
                });
            }
            return Ok(Selection {
                template: Some(t),
                notes: Vec::new(),
            });
        }
        let Some((graph, fragment)) = profile else {
            return Ok(Selection::default());
        };
        let report = self.match_profile(object, kind, graph, fragment.as_deref())?;
        let Some(best) = report.best() else {
            return Ok(Selection {
                template: None,
                notes: vec!["no admissible template for the profile; default visualization".into()],
            });
        };
        let (provider, design) = best
            .template
            .split_once('.')
            .expect("full identifiers contain a dot");
        let template = self
            .registry
            .get(provider, design)
            .map_err(|_| HandleError::TemplateNotFound(best.template.clone()))?;
        Ok(Selection {
            template: Some(template),
            notes: Vec::new(),
        })
    }

    /// Scores every `kind` template for `object` against a profile graph.
    /// Alignment links inside the profile graph extend the configured ones.
    pub fn match_profile(
        &self,
        object: &ElementRef,
        kind: TemplateKind,
        profile_graph: &Graph,
        fragment: Option<&str>,
    ) -> Result<MatchReport, HandleError> {
        let extra = AlignmentSet::from_graph(profile_graph).map_err(|source| {
            HandleError::ProfileAlignment {
                url: fragment.unwrap_or_default().to_owned(),
                source,
            }
        })?;
        let merged;
        let closure = if extra.is_empty() {
            &self.closure
        } else {
            let mut all = self.alignments.clone();
            for (a, b, k) in extra.iter() {
                all.insert(a.clone(), b.clone(), *k).expect("validated link");
            }
            merged = equivalence_closure(&all).map_err(|source| HandleError::ProfileAlignment {
                url: fragment.unwrap_or_default().to_owned(),
                source,
            })?;
            &merged
        };
        let profile = match profile_subject(profile_graph, fragment, closure) {
            Some(s) => extract_profile(profile_graph, &s, closure).unwrap_or_default(),
            None => UserProfile::empty(),
        };
        let candidates: Vec<TemplateFacets> = self
            .registry
            .list_for(object, kind)
            .iter()
            .map(TemplateFacets::of)
            .collect();
        let scores = rank(&profile, &candidates, &self.aux, closure, self.weights);
        Ok(MatchReport { profile, scores })
    }

    async fn load_profile(&self, req: &RenderRequest) -> Result<Option<(Graph, Option<String>)>, HandleError> {
        if req.provider.is_some() {
            return Ok(None);
        }
        let Some(url) = &req.user_profile else {
            return Ok(None);
        };
        let g = self.fetch_graph(url).await?;
        Ok(Some((g, url.fragment().map(str::to_owned))))
    }

    /// Fetches and parses a remote graph.
    pub async fn fetch_graph(&self, url: &Url) -> Result<Graph, HandleError> {
        let text = self.fetcher.fetch(url).await?;
        parse_sniffed(&text).map_err(|source| HandleError::SourceParse {
            url: url.to_string(),
            source,
        })
    }

    /// Plain-text structural description of an element.
    pub fn describe(&self, object: &ElementRef) -> Result<String, HandleError> {
        let d = describe_element(&self.ontology, object, &self.prefixes)?;
        Ok(render_description(&d, &self.prefixes))
    }

    /// Registry metadata as Turtle.
    pub fn metadata_turtle(&self) -> String {
        serialize_turtle_with_prefixes(&self.registry.metadata_graph(), &self.prefixes)
    }

    pub fn register(&self, template: Template, overwrite: bool) -> Result<(), HandleError> {
        self.registry
            .register(template, overwrite)
            .map_err(HandleError::Registry)
    }
}

struct Done {
    body: String,
    notes: Vec<String>,
    location: Option<String>,
    template: Option<String>,
}
