//! Template characterization and its key-value text form.

use std::collections::BTreeSet;
use std::fmt::{self, Write};
use std::str::FromStr;

use thiserror::Error;

use crate::element_ref::{parse_element_ref, ElementRef};
use crate::markup::MarkupFormat;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FeaturesError {
    #[error("line {line}: expected `key = value`")]
    Syntax { line: usize },
    #[error("unknown key {0:?}")]
    UnknownKey(String),
    #[error("key {0:?} given twice")]
    DuplicateKey(String),
    #[error("missing key {0:?}")]
    MissingKey(&'static str),
    #[error("invalid value for {key}: {value:?}")]
    InvalidValue { key: &'static str, value: String },
    #[error("sizes must satisfy min <= preferred <= max in both dimensions")]
    SizeOrder,
    #[error("input templates must provide HTML code")]
    InputWithoutHtml,
    #[error("invalid identifier {0:?}: use letters, digits, '_' or '-'")]
    InvalidId(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TemplateKind {
    Input,
    Output,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CodeType {
    Html,
    Css,
    Script,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FontResize {
    Reflow,
    Fixed,
    Scale,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Size {
    pub width: u32,
    pub height: u32,
}

macro_rules! token_enum {
    ($ty:ident { $($variant:ident => $text:literal),+ $(,)? }) => {
        impl $ty {
            pub fn as_str(self) -> &'static str {
                match self { $($ty::$variant => $text),+ }
            }
        }

        impl FromStr for $ty {
            type Err = ();

            fn from_str(s: &str) -> Result<Self, ()> {
                $(if s.eq_ignore_ascii_case($text) { return Ok($ty::$variant); })+
                Err(())
            }
        }

        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }
    };
}

token_enum!(TemplateKind { Input => "input", Output => "output" });
token_enum!(CodeType { Html => "html", Css => "css", Script => "script" });
token_enum!(FontResize { Reflow => "reflow", Fixed => "fixed", Scale => "scale" });

impl fmt::Display for Size {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.width, self.height)
    }
}

impl FromStr for Size {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        let (w, h) = s.split_once('x').ok_or(())?;
        Ok(Size {
            width: w.trim().parse().map_err(|_| ())?,
            height: h.trim().parse().map_err(|_| ())?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TemplateFeatures {
    pub kind: TemplateKind,
    pub code_types: BTreeSet<CodeType>,
    pub primary_color: String,
    pub secondary_color: String,
    pub aesthetic: String,
    pub markup_format: MarkupFormat,
    pub preferred_size: Size,
    pub min_size: Size,
    pub max_size: Size,
    pub font_resize: FontResize,
}

impl TemplateFeatures {
    pub fn validate(&self) -> Result<(), FeaturesError> {
        let le = |a: Size, b: Size| a.width <= b.width && a.height <= b.height;
        if !(le(self.min_size, self.preferred_size) && le(self.preferred_size, self.max_size)) {
            return Err(FeaturesError::SizeOrder);
        }
        if self.kind == TemplateKind::Input && !self.code_types.contains(&CodeType::Html) {
            return Err(FeaturesError::InputWithoutHtml);
        }
        for (key, value) in [
            ("primaryColor", &self.primary_color),
            ("secondaryColor", &self.secondary_color),
        ] {
            if !is_color_token(value) {
                return Err(FeaturesError::InvalidValue {
                    key,
                    value: value.clone(),
                });
            }
        }
        if !is_token(&self.aesthetic) {
            return Err(FeaturesError::InvalidValue {
                key: "aesthetic",
                value: self.aesthetic.clone(),
            });
        }
        Ok(())
    }
}

/// Lowercase color name, e.g. `red` or `dark-blue`.
pub fn normalize_color(s: &str) -> String {
    s.trim().to_ascii_lowercase()
}

fn is_color_token(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_lowercase() || c == '-')
}

fn is_token(s: &str) -> bool {
    !s.is_empty() && !s.chars().any(|c| c.is_whitespace() || c.is_control())
}

/// Provider and design identifiers: nonempty, no dots, safe as file names.
pub fn check_id(id: &str) -> Result<(), FeaturesError> {
    let ok = !id.is_empty()
        && id
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-');
    if ok {
        Ok(())
    } else {
        Err(FeaturesError::InvalidId(id.to_owned()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Template {
    pub provider: String,
    pub design: String,
    pub target: ElementRef,
    pub body: String,
    pub features: TemplateFeatures,
}

impl Template {
    /// `provider.design`.
    pub fn full_id(&self) -> String {
        format!("{}.{}", self.provider, self.design)
    }
}

const KEYS: [&str; 13] = [
    "provider",
    "design",
    "target",
    "kind",
    "codeTypes",
    "primaryColor",
    "secondaryColor",
    "aesthetic",
    "markupFormat",
    "preferredSize",
    "minSize",
    "maxSize",
    "fontResize",
];

/// Header of a features file: who made the template and what it targets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeaturesFile {
    pub provider: String,
    pub design: String,
    pub target: ElementRef,
    pub features: TemplateFeatures,
}

impl FeaturesFile {
    /// Canonical text form, one `key = value` per line in a fixed order.
    pub fn to_text(&self) -> String {
        let f = &self.features;
        let codes: Vec<&str> = f.code_types.iter().map(|c| c.as_str()).collect();
        let values = [
            self.provider.clone(),
            self.design.clone(),
            self.target.to_string(),
            f.kind.to_string(),
            codes.join(", "),
            f.primary_color.clone(),
            f.secondary_color.clone(),
            f.aesthetic.clone(),
            f.markup_format.to_string(),
            f.preferred_size.to_string(),
            f.min_size.to_string(),
            f.max_size.to_string(),
            f.font_resize.to_string(),
        ];
        let mut out = String::new();
        for (k, v) in KEYS.iter().zip(values) {
            let _ = writeln!(out, "{k} = {v}");
        }
        out
    }

    /// Parses `key = value` lines. Blank lines and `#` comments are skipped.
    pub fn parse(text: &str) -> Result<FeaturesFile, FeaturesError> {
        let mut values: [Option<String>; 13] = Default::default();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or(FeaturesError::Syntax { line: n + 1 })?;
            let k = k.trim();
            let idx = KEYS
                .iter()
                .position(|key| *key == k)
                .ok_or_else(|| FeaturesError::UnknownKey(k.to_owned()))?;
            if values[idx].is_some() {
                return Err(FeaturesError::DuplicateKey(k.to_owned()));
            }
            values[idx] = Some(v.trim().to_owned());
        }
        let mut take = |i: usize| values[i].take().ok_or(FeaturesError::MissingKey(KEYS[i]));
        let invalid = |key: &'static str, value: &str| FeaturesError::InvalidValue {
            key,
            value: value.to_owned(),
        };

        let provider = take(0)?;
        check_id(&provider)?;
        let design = take(1)?;
        check_id(&design)?;
        let target_text = take(2)?;
        let target = parse_element_ref(&target_text).map_err(|_| invalid("target", &target_text))?;
        let kind_text = take(3)?;
        let kind = kind_text.parse().map_err(|_| invalid("kind", &kind_text))?;
        let codes_text = take(4)?;
        let mut code_types = BTreeSet::new();
        for part in codes_text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let code = match part.to_ascii_lowercase().as_str() {
                "javascript" | "js" => CodeType::Script,
                other => other.parse().map_err(|_| invalid("codeTypes", part))?,
            };
            code_types.insert(code);
        }
        let primary_color = normalize_color(&take(5)?);
        let secondary_color = normalize_color(&take(6)?);
        let aesthetic = take(7)?;
        let markup_text = take(8)?;
        let markup_format = markup_text
            .parse()
            .map_err(|_| invalid("markupFormat", &markup_text))?;
        let mut size = |i: usize, key: &'static str| -> Result<Size, FeaturesError> {
            let text = take(i)?;
            text.parse().map_err(|_| invalid(key, &text))
        };
        let preferred_size = size(9, "preferredSize")?;
        let min_size = size(10, "minSize")?;
        let max_size = size(11, "maxSize")?;
        let font_text = take(12)?;
        let font_resize = font_text.parse().map_err(|_| invalid("fontResize", &font_text))?;

        let features = TemplateFeatures {
            kind,
            code_types,
            primary_color,
            secondary_color,
            aesthetic,
            markup_format,
            preferred_size,
            min_size,
            max_size,
            font_resize,
        };
        features.validate()?;
        Ok(FeaturesFile {
            provider,
            design,
            target,
            features,
        })
    }

    pub fn into_template(self, body: String) -> Template {
        Template {
            provider: self.provider,
            design: self.design,
            target: self.target,
            body,
            features: self.features,
        }
    }

    pub fn of(t: &Template) -> FeaturesFile {
        FeaturesFile {
            provider: t.provider.clone(),
            design: t.design.clone(),
            target: t.target.clone(),
            features: t.features.clone(),
        }
    }
}
