//! Template bodies: raw markup with embedded `[{Name key='value' ...}]`
//! macros.

use std::fmt;

use thiserror::Error;

use crate::element_ref::{parse_element_ref, ElementRef};

pub const GET_P: &str = "OmemoGetP";
pub const BASE_URL: &str = "OmemoBaseURL";
pub const CONDITIONAL_VIZ: &str = "OmemoConditionalVizFor";
pub const GET_LINK: &str = "OmemoGetLink";

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Macro {
    GetP { prop: ElementRef },
    BaseUrl,
    ConditionalViz {
        prop: ElementRef,
        designer: String,
        design: String,
    },
    GetLink { relation: ElementRef },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MacroNode {
    pub call: Macro,
    /// Exact source text of the occurrence, delimiters included.
    pub source: String,
    /// Byte offset of the opening `[{` in the body.
    pub offset: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Node {
    Text(String),
    Macro(MacroNode),
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TemplateAst {
    pub nodes: Vec<Node>,
}

impl TemplateAst {
    /// Re-serializes the body. Equal to the parsed source byte for byte.
    pub fn to_source(&self) -> String {
        self.to_string()
    }

    pub fn macros(&self) -> impl Iterator<Item = &MacroNode> {
        self.nodes.iter().filter_map(|n| match n {
            Node::Macro(m) => Some(m),
            Node::Text(_) => None,
        })
    }

    pub fn has_macros(&self) -> bool {
        self.macros().next().is_some()
    }
}

impl fmt::Display for TemplateAst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for node in &self.nodes {
            match node {
                Node::Text(t) => f.write_str(t)?,
                Node::Macro(m) => f.write_str(&m.source)?,
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("template error at byte {offset}: {kind}")]
pub struct TemplateParseError {
    pub offset: usize,
    pub kind: TemplateParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TemplateParseErrorKind {
    #[error("unknown macro {0:?}")]
    UnknownMacro(String),
    #[error("macro {name} is missing argument {arg}")]
    MissingArgument { name: &'static str, arg: &'static str },
    #[error("macro {name} does not take argument {arg:?}")]
    UnexpectedArgument { name: &'static str, arg: String },
    #[error("argument {0:?} given twice")]
    DuplicateArgument(String),
    #[error("unterminated macro, expected '}}]'")]
    Unterminated,
    #[error("unterminated quoted value")]
    UnterminatedValue,
    #[error("malformed argument list")]
    MalformedArgument,
    #[error("argument {arg:?} is not an element reference: {value:?}")]
    BadElementRef { arg: String, value: String },
    #[error("argument {0:?} must not be empty")]
    EmptyValue(String),
}

/// Splits a body into text and macro nodes.
///
/// A macro occurrence starts with `[{` directly followed by a letter, and the
/// name that follows must end at whitespace or `}]`. Anything else beginning
/// with `[{` (such as a script's `[{a: 1}]`) is left as text.
pub fn parse_template(body: &str) -> Result<TemplateAst, TemplateParseError> {
    let bytes = body.as_bytes();
    let mut nodes = Vec::new();
    let mut text_start = 0;
    let mut i = 0;
    while i + 1 < bytes.len() {
        if bytes[i] == b'[' && bytes[i + 1] == b'{' && is_macro_start(bytes, i + 2) {
            if text_start < i {
                nodes.push(Node::Text(body[text_start..i].to_owned()));
            }
            let (call, end) = parse_macro(body, i)?;
            nodes.push(Node::Macro(MacroNode {
                call,
                source: body[i..end].to_owned(),
                offset: i,
            }));
            i = end;
            text_start = end;
        } else {
            i += 1;
        }
    }
    if text_start < body.len() {
        nodes.push(Node::Text(body[text_start..].to_owned()));
    }
    Ok(TemplateAst { nodes })
}

fn is_name_byte(b: u8) -> bool {
    b.is_ascii_alphanumeric() || b == b'_'
}

fn is_macro_start(bytes: &[u8], at: usize) -> bool {
    if !bytes.get(at).is_some_and(|b| b.is_ascii_alphabetic()) {
        return false;
    }
    let mut j = at;
    while j < bytes.len() && is_name_byte(bytes[j]) {
        j += 1;
    }
    match bytes.get(j) {
        Some(b) if b.is_ascii_whitespace() => true,
        Some(b'}') => bytes.get(j + 1) == Some(&b']'),
        _ => false,
    }
}

/// Parses the macro starting at `start` (pointing at `[{`). Returns the call
/// and the byte offset just past `}]`.
fn parse_macro(body: &str, start: usize) -> Result<(Macro, usize), TemplateParseError> {
    let bytes = body.as_bytes();
    let err = |offset: usize, kind| TemplateParseError { offset, kind };
    let mut i = start + 2;
    let name_start = i;
    while i < bytes.len() && is_name_byte(bytes[i]) {
        i += 1;
    }
    let name = &body[name_start..i];
    let mut args: Vec<(String, String, usize)> = Vec::new();
    loop {
        while i < bytes.len() && bytes[i].is_ascii_whitespace() {
            i += 1;
        }
        if i >= bytes.len() {
            return Err(err(start, TemplateParseErrorKind::Unterminated));
        }
        if bytes[i] == b'}' {
            if bytes.get(i + 1) == Some(&b']') {
                i += 2;
                break;
            }
            return Err(err(i, TemplateParseErrorKind::Unterminated));
        }
        let key_start = i;
        if !(bytes[i].is_ascii_alphabetic() || bytes[i] == b'_') {
            return Err(err(i, TemplateParseErrorKind::MalformedArgument));
        }
        while i < bytes.len() && is_name_byte(bytes[i]) {
            i += 1;
        }
        let key = &body[key_start..i];
        if bytes.get(i) != Some(&b'=') {
            return Err(err(i, TemplateParseErrorKind::MalformedArgument));
        }
        i += 1;
        let quote = match bytes.get(i) {
            Some(q @ (b'\'' | b'"')) => *q,
            _ => return Err(err(i, TemplateParseErrorKind::MalformedArgument)),
        };
        i += 1;
        let value_start = i;
        while i < bytes.len() && bytes[i] != quote {
            i += 1;
        }
        if i >= bytes.len() {
            return Err(err(value_start - 1, TemplateParseErrorKind::UnterminatedValue));
        }
        let value = &body[value_start..i];
        i += 1;
        match bytes.get(i) {
            Some(b) if b.is_ascii_whitespace() || *b == b'}' => {}
            None => return Err(err(start, TemplateParseErrorKind::Unterminated)),
            Some(_) => return Err(err(i, TemplateParseErrorKind::MalformedArgument)),
        }
        if args.iter().any(|(k, _, _)| k == key) {
            return Err(err(key_start, TemplateParseErrorKind::DuplicateArgument(key.to_owned())));
        }
        args.push((key.to_owned(), value.to_owned(), key_start));
    }
    let call = build_macro(name, args, start)?;
    Ok((call, i))
}

fn build_macro(
    name: &str,
    args: Vec<(String, String, usize)>,
    start: usize,
) -> Result<Macro, TemplateParseError> {
    let (name, allowed): (&'static str, &[&'static str]) = match name {
        GET_P => (GET_P, &["propName"]),
        BASE_URL => (BASE_URL, &[]),
        CONDITIONAL_VIZ => (CONDITIONAL_VIZ, &["propName", "designerID", "designID"]),
        GET_LINK => (GET_LINK, &["relationName"]),
        other => {
            return Err(TemplateParseError {
                offset: start,
                kind: TemplateParseErrorKind::UnknownMacro(other.to_owned()),
            })
        }
    };
    if let Some((key, _, at)) = args.iter().find(|(k, _, _)| !allowed.contains(&k.as_str())) {
        return Err(TemplateParseError {
            offset: *at,
            kind: TemplateParseErrorKind::UnexpectedArgument {
                name,
                arg: key.clone(),
            },
        });
    }
    let get = |arg: &'static str| -> Result<(&str, usize), TemplateParseError> {
        let (_, value, at) = args.iter().find(|(k, _, _)| k == arg).ok_or(TemplateParseError {
            offset: start,
            kind: TemplateParseErrorKind::MissingArgument { name, arg },
        })?;
        if value.is_empty() {
            return Err(TemplateParseError {
                offset: *at,
                kind: TemplateParseErrorKind::EmptyValue(arg.to_owned()),
            });
        }
        Ok((value, *at))
    };
    let element = |arg: &'static str| -> Result<ElementRef, TemplateParseError> {
        let (value, at) = get(arg)?;
        parse_element_ref(value).map_err(|_| TemplateParseError {
            offset: at,
            kind: TemplateParseErrorKind::BadElementRef {
                arg: arg.to_owned(),
                value: value.to_owned(),
            },
        })
    };
    Ok(match name {
        GET_P => Macro::GetP {
            prop: element("propName")?,
        },
        BASE_URL => Macro::BaseUrl,
        CONDITIONAL_VIZ => Macro::ConditionalViz {
            prop: element("propName")?,
            designer: get("designerID")?.0.to_owned(),
            design: get("designID")?.0.to_owned(),
        },
        _ => Macro::GetLink {
            relation: element("relationName")?,
        },
    })
}
