//! Markup helpers shared by the renderers and the channel.

use std::fmt;
use std::str::FromStr;

use percent_encoding::{utf8_percent_encode, AsciiSet, NON_ALPHANUMERIC};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub enum MarkupFormat {
    #[default]
    Html,
    Xhtml,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown markup format {0:?} (expected HTML or XHTML)")]
pub struct UnknownMarkupFormat(pub String);

impl MarkupFormat {
    pub fn as_str(self) -> &'static str {
        match self {
            MarkupFormat::Html => "HTML",
            MarkupFormat::Xhtml => "XHTML",
        }
    }

    pub fn content_type(self) -> &'static str {
        match self {
            MarkupFormat::Html => "text/html; charset=utf-8",
            MarkupFormat::Xhtml => "application/xhtml+xml; charset=utf-8",
        }
    }
}

impl FromStr for MarkupFormat {
    type Err = UnknownMarkupFormat;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.eq_ignore_ascii_case("HTML") {
            Ok(MarkupFormat::Html)
        } else if s.eq_ignore_ascii_case("XHTML") {
            Ok(MarkupFormat::Xhtml)
        } else {
            Err(UnknownMarkupFormat(s.to_owned()))
        }
    }
}

impl fmt::Display for MarkupFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Escapes text for element content and quoted attribute values.
pub fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&#39;"),
            // Not representable in XML 1.0.
            c if c.is_control() && !matches!(c, '\n' | '\r' | '\t') => out.push('\u{FFFD}'),
            c => out.push(c),
        }
    }
    out
}

const QUERY_VALUE: &AsciiSet = &NON_ALPHANUMERIC.remove(b'-').remove(b'.').remove(b'_').remove(b'~');

/// Percent-encodes a query-string value.
pub fn encode_query_value(s: &str) -> String {
    utf8_percent_encode(s, QUERY_VALUE).to_string()
}

/// Block shown instead of output when an element has no instances.
pub fn no_data_notice(element: &str) -> String {
    format!(
        "<div class=\"semrender-notice\">No instances of {} in the data source.</div>\n",
        escape(element)
    )
}

/// Wraps rendered content in a complete document of the given format.
pub fn document(format: MarkupFormat, title: &str, content: &str) -> String {
    let title = escape(title);
    match format {
        MarkupFormat::Html => format!(
            "<!DOCTYPE html>\n<html>\n<head>\n<meta charset=\"utf-8\"/>\n<title>{title}</title>\n</head>\n<body>\n{content}</body>\n</html>\n"
        ),
        MarkupFormat::Xhtml => format!(
            "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n\
             <!DOCTYPE html PUBLIC \"-//W3C//DTD XHTML 1.1//EN\" \"http://www.w3.org/TR/xhtml11/DTD/xhtml11.dtd\">\n\
             <html xmlns=\"http://www.w3.org/1999/xhtml\">\n<head>\n<title>{title}</title>\n</head>\n<body>\n{content}</body>\n</html>\n"
        ),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn escapes_markup_characters() {
        assert_eq!(escape("AT&T <b>\"q\" 'x'"), "AT&amp;T &lt;b&gt;&quot;q&quot; &#39;x&#39;");
        assert_eq!(escape("a\u{0}b"), "a\u{FFFD}b");
    }

    #[test]
    fn format_tokens() {
        assert_eq!("HTML".parse::<MarkupFormat>().unwrap(), MarkupFormat::Html);
        assert_eq!("xhtml".parse::<MarkupFormat>().unwrap(), MarkupFormat::Xhtml);
        assert!("WML".parse::<MarkupFormat>().is_err());
        assert_eq!(MarkupFormat::default(), MarkupFormat::Html);
    }

    #[test]
    fn query_values_are_encoded() {
        assert_eq!(
            encode_query_value("http://ex.org/a b?c=d&e"),
            "http%3A%2F%2Fex.org%2Fa%20b%3Fc%3Dd%26e"
        );
    }
}
