//! Render request parameters and their validation.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;
use url::Url;

use semrender_core::element_ref::{parse_element_ref, ElementRef};
use semrender_core::markup::MarkupFormat;
use semrender_core::rdf::Term;
use semrender_core::registry::check_id;
use semrender_core::template::FIELD_PREFIX;

pub const ACTION: &str = "action";
pub const OBJECT: &str = "object";
pub const SOURCE: &str = "source";
pub const PROVIDER: &str = "provider";
pub const OUTPUT_FORMAT: &str = "outputFormat";
pub const USER_PROFILE: &str = "userProfile";
/// Extension: render a single individual.
pub const FOCUS: &str = "focus";
/// POST field carrying the semantic data.
pub const DATA: &str = "data";
/// Submit button of generated input forms.
pub const SUBMIT: &str = "submit";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Get,
    Post,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Get => "GET",
            Method::Post => "POST",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Action {
    RenderOutput,
    RenderInput,
}

impl Action {
    pub fn as_str(self) -> &'static str {
        match self {
            Action::RenderOutput => "renderOutput",
            Action::RenderInput => "renderInput",
        }
    }
}

impl FromStr for Action {
    type Err = RequestError;

    fn from_str(s: &str) -> Result<Self, RequestError> {
        match s {
            "renderOutput" => Ok(Action::RenderOutput),
            "renderInput" => Ok(Action::RenderInput),
            other => Err(RequestError::UnknownAction(other.to_owned())),
        }
    }
}

/// `providerID.designID`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ProviderId {
    pub provider: String,
    pub design: String,
}

impl FromStr for ProviderId {
    type Err = RequestError;

    fn from_str(s: &str) -> Result<Self, RequestError> {
        let malformed = || RequestError::MalformedProvider(s.to_owned());
        let (provider, design) = s.split_once('.').ok_or_else(malformed)?;
        if design.contains('.') || check_id(provider).is_err() || check_id(design).is_err() {
            return Err(malformed());
        }
        Ok(ProviderId {
            provider: provider.to_owned(),
            design: design.to_owned(),
        })
    }
}

impl fmt::Display for ProviderId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.provider, self.design)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RequestError {
    #[error("missing required parameter {0}")]
    Missing(&'static str),
    #[error("parameter {0} given more than once")]
    Duplicate(String),
    #[error("unknown action {0:?}; expected renderOutput or renderInput")]
    UnknownAction(String),
    #[error("malformed object {value:?}: {reason}")]
    MalformedObject { value: String, reason: String },
    #[error("malformed provider {0:?}; expected providerID.designID")]
    MalformedProvider(String),
    #[error("unknown outputFormat {0:?}; expected HTML or XHTML")]
    UnknownOutputFormat(String),
    #[error("parameter {param} must be an absolute http(s) URL, got {value:?}")]
    InvalidUrl { param: &'static str, value: String },
    #[error("parameter {0} is only accepted with GET")]
    GetOnly(&'static str),
    #[error("POST renderOutput requires the semantic data in the request body")]
    MissingBody,
    #[error("malformed focus {0:?}; expected an absolute IRI or _:label")]
    MalformedFocus(String),
    #[error("malformed form field {0:?}")]
    MalformedField(String),
}

/// A validated request.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RenderRequest {
    pub method: Method,
    pub action: Action,
    pub object: ElementRef,
    pub source: Option<Url>,
    pub provider: Option<ProviderId>,
    pub output_format: MarkupFormat,
    pub user_profile: Option<Url>,
    pub body: Option<String>,
    pub focus: Option<Term>,
    /// `prop:*` fields of a form submission.
    pub fields: BTreeMap<String, String>,
    /// True for a POST renderInput carrying form fields or the submit button.
    pub submission: bool,
    /// Unknown parameters, ignored.
    pub ignored: Vec<String>,
}

fn http_url(param: &'static str, value: &str) -> Result<Url, RequestError> {
    let invalid = || RequestError::InvalidUrl {
        param,
        value: value.to_owned(),
    };
    let url = Url::parse(value).map_err(|_| invalid())?;
    if !matches!(url.scheme(), "http" | "https") || url.host_str().is_none() {
        return Err(invalid());
    }
    Ok(url)
}

fn parse_focus(value: &str) -> Result<Term, RequestError> {
    let bad = || RequestError::MalformedFocus(value.to_owned());
    match value.strip_prefix("_:") {
        Some(label) => Term::blank(label).map_err(|_| bad()),
        None => Term::iri(value).map_err(|_| bad()),
    }
}

/// Validates request parameters. For POST, `body` is the semantic data
/// (from the `data` field or a raw RDF body).
pub fn parse_request(
    method: Method,
    params: &[(String, String)],
    body: Option<String>,
) -> Result<RenderRequest, RequestError> {
    let mut known: BTreeMap<&str, &str> = BTreeMap::new();
    let mut fields = BTreeMap::new();
    let mut ignored = Vec::new();
    let mut submit = false;
    for (k, v) in params {
        let k = k.as_str();
        match k {
            ACTION | OBJECT | SOURCE | PROVIDER | OUTPUT_FORMAT | USER_PROFILE | FOCUS => {
                if known.insert(k, v).is_some() {
                    return Err(RequestError::Duplicate(k.to_owned()));
                }
            }
            SUBMIT if method == Method::Post => submit = true,
            _ if method == Method::Post && k.starts_with(FIELD_PREFIX) => {
                let prop = &k[FIELD_PREFIX.len()..];
                if parse_element_ref(prop).is_err() {
                    return Err(RequestError::MalformedField(k.to_owned()));
                }
                if fields.insert(k.to_owned(), v.clone()).is_some() {
                    return Err(RequestError::Duplicate(k.to_owned()));
                }
            }
            _ => ignored.push(k.to_owned()),
        }
    }

    let action: Action = known.get(ACTION).ok_or(RequestError::Missing(ACTION))?.parse()?;
    let object_text = *known.get(OBJECT).ok_or(RequestError::Missing(OBJECT))?;
    let object = parse_element_ref(object_text).map_err(|e| RequestError::MalformedObject {
        value: object_text.to_owned(),
        reason: e.to_string(),
    })?;
    let provider = known.get(PROVIDER).map(|p| p.parse()).transpose()?;
    let output_format = match known.get(OUTPUT_FORMAT) {
        None => MarkupFormat::default(),
        Some(f) => f
            .parse()
            .map_err(|_| RequestError::UnknownOutputFormat((*f).to_owned()))?,
    };
    let focus = known.get(FOCUS).map(|f| parse_focus(f)).transpose()?;

    let source = known.get(SOURCE).map(|s| http_url(SOURCE, s)).transpose()?;
    let user_profile = known
        .get(USER_PROFILE)
        .map(|s| http_url(USER_PROFILE, s))
        .transpose()?;
    let body = body.filter(|b| !b.trim().is_empty());
    match method {
        Method::Get => {
            if action == Action::RenderOutput && source.is_none() {
                return Err(RequestError::Missing(SOURCE));
            }
        }
        Method::Post => {
            if source.is_some() {
                return Err(RequestError::GetOnly(SOURCE));
            }
            if user_profile.is_some() {
                return Err(RequestError::GetOnly(USER_PROFILE));
            }
            if action == Action::RenderOutput && body.is_none() {
                return Err(RequestError::MissingBody);
            }
        }
    }
    let submission = method == Method::Post
        && action == Action::RenderInput
        && (submit || !fields.is_empty());
    if action == Action::RenderOutput {
        ignored.extend(fields.keys().cloned());
        fields.clear();
    }

    Ok(RenderRequest {
        method,
        action,
        object,
        source,
        provider,
        output_format,
        user_profile,
        body: if method == Method::Post { body } else { None },
        focus,
        fields,
        submission,
        ignored,
    })
}
