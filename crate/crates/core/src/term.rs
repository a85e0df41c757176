use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::uri::Uri;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TermError {
    #[error("literal contains a character that cannot be written as XML: U+{0:04X}")]
    UnwritableChar(u32),
    #[error("language-tagged literals cannot carry a datatype")]
    LangWithDatatype,
    #[error("invalid language tag {0:?}")]
    BadLanguage(String),
    #[error("invalid blank node label {0:?}")]
    BadBlankLabel(String),
    #[error("a literal cannot be the subject of a triple")]
    LiteralSubject,
}

/// A literal value. Comparison is exact over lexical form, language and
/// datatype; there is no value-space canonicalization.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Literal {
    lexical: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    language: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    datatype: Option<Uri>,
}

impl Literal {
    pub fn plain(lexical: impl Into<String>) -> Result<Literal, TermError> {
        Literal::new(lexical, None, None)
    }

    pub fn new(
        lexical: impl Into<String>,
        language: Option<String>,
        datatype: Option<Uri>,
    ) -> Result<Literal, TermError> {
        let lexical = lexical.into();
        if let Some(c) = lexical.chars().find(|&c| !is_xml_char(c)) {
            return Err(TermError::UnwritableChar(c as u32));
        }
        if language.is_some() && datatype.is_some() {
            return Err(TermError::LangWithDatatype);
        }
        if let Some(lang) = &language {
            let ok = !lang.is_empty()
                && lang.split('-').all(|part| {
                    !part.is_empty() && part.len() <= 8 && part.chars().all(|c| c.is_ascii_alphanumeric())
                });
            if !ok {
                return Err(TermError::BadLanguage(lang.clone()));
            }
        }
        Ok(Literal {
            lexical,
            language,
            datatype,
        })
    }

    pub fn lexical(&self) -> &str {
        &self.lexical
    }

    pub fn language(&self) -> Option<&str> {
        self.language.as_deref()
    }

    pub fn datatype(&self) -> Option<&Uri> {
        self.datatype.as_ref()
    }

    /// No language and no datatype.
    pub fn is_plain(&self) -> bool {
        self.language.is_none() && self.datatype.is_none()
    }
}

/// XML 1.0 `Char` production.
pub(crate) fn is_xml_char(c: char) -> bool {
    matches!(c, '\t' | '\n' | '\r' | '\u{20}'..='\u{D7FF}' | '\u{E000}'..='\u{FFFD}' | '\u{10000}'..='\u{10FFFF}')
}

/// A document-scoped blank node label.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BlankId(String);

impl BlankId {
    /// Labels must be XML NCNames so they can be written as `rdf:nodeID`.
    pub fn new(label: impl Into<String>) -> Result<BlankId, TermError> {
        let label = label.into();
        let mut chars = label.chars();
        let ok = match chars.next() {
            Some(c) if c.is_alphabetic() || c == '_' => {
                chars.all(|c| c.is_alphanumeric() || matches!(c, '_' | '-' | '.'))
            }
            _ => false,
        };
        if ok {
            Ok(BlankId(label))
        } else {
            Err(TermError::BadBlankLabel(label))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Term {
    Uri { value: Uri },
    Blank { label: BlankId },
    Literal { value: Literal },
}

impl Term {
    pub fn uri(value: Uri) -> Term {
        Term::Uri { value }
    }

    pub fn blank(label: BlankId) -> Term {
        Term::Blank { label }
    }

    pub fn literal(value: Literal) -> Term {
        Term::Literal { value }
    }

    pub fn as_uri(&self) -> Option<&Uri> {
        match self {
            Term::Uri { value } => Some(value),
            _ => None,
        }
    }

    pub fn as_blank(&self) -> Option<&BlankId> {
        match self {
            Term::Blank { label } => Some(label),
            _ => None,
        }
    }

    pub fn as_literal(&self) -> Option<&Literal> {
        match self {
            Term::Literal { value } => Some(value),
            _ => None,
        }
    }

    pub fn is_uri(&self, uri: &Uri) -> bool {
        self.as_uri() == Some(uri)
    }

    /// URIs and blank nodes are graph nodes; literals are leaves.
    pub fn is_node(&self) -> bool {
        !matches!(self, Term::Literal { .. })
    }
}

impl From<Uri> for Term {
    fn from(value: Uri) -> Term {
        Term::Uri { value }
    }
}

impl From<&Uri> for Term {
    fn from(value: &Uri) -> Term {
        Term::Uri {
            value: value.clone(),
        }
    }
}

impl From<Literal> for Term {
    fn from(value: Literal) -> Term {
        Term::Literal { value }
    }
}

impl From<BlankId> for Term {
    fn from(label: BlankId) -> Term {
        Term::Blank { label }
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// N-Triples-like rendering, for diagnostics only.
impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Uri { value } => write!(f, "<{value}>"),
            Term::Blank { label } => write!(f, "_:{}", label.as_str()),
            Term::Literal { value } => {
                write!(f, "{:?}", value.lexical)?;
                if let Some(lang) = &value.language {
                    write!(f, "@{lang}")?;
                }
                if let Some(dt) = &value.datatype {
                    write!(f, "^^<{dt}>")?;
                }
                Ok(())
            }
        }
    }
}

/// One RDF statement. The subject is never a literal.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Triple {
    subject: Term,
    predicate: Uri,
    object: Term,
}

impl Triple {
    pub fn new(subject: impl Into<Term>, predicate: Uri, object: impl Into<Term>) -> Result<Triple, TermError> {
        let subject = subject.into();
        if !subject.is_node() {
            return Err(TermError::LiteralSubject);
        }
        Ok(Triple {
            subject,
            predicate,
            object: object.into(),
        })
    }

    /// Convenience for the common all-URI case, which cannot fail.
    pub fn uris(subject: &Uri, predicate: &Uri, object: &Uri) -> Triple {
        Triple {
            subject: subject.into(),
            predicate: predicate.clone(),
            object: object.into(),
        }
    }

    pub fn subject(&self) -> &Term {
        &self.subject
    }

    pub fn predicate(&self) -> &Uri {
        &self.predicate
    }

    pub fn object(&self) -> &Term {
        &self.object
    }

    pub(crate) fn map_terms(&self, mut f: impl FnMut(&Term) -> Term) -> Triple {
        Triple {
            subject: f(&self.subject),
            predicate: self.predicate.clone(),
            object: f(&self.object),
        }
    }
}

impl fmt::Debug for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} <{}> {} .", self.subject, self.predicate, self.object)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn literal_rules() {
        assert!(Literal::plain("ok\ttext\n").is_ok());
        assert_eq!(Literal::plain("bad\u{1}"), Err(TermError::UnwritableChar(1)));
        let dt = Uri::parse("http://www.w3.org/2001/XMLSchema#date").unwrap();
        assert_eq!(
            Literal::new("x", Some("en".into()), Some(dt.clone())),
            Err(TermError::LangWithDatatype)
        );
        assert!(Literal::new("x", Some("en-GB".into()), None).is_ok());
        assert!(Literal::new("x", Some("en GB".into()), None).is_err());
        // "1" and "01" stay distinct
        assert_ne!(
            Literal::new("1", None, Some(dt.clone())).unwrap(),
            Literal::new("01", None, Some(dt)).unwrap()
        );
    }

    #[test]
    fn blank_labels_are_ncnames() {
        assert!(BlankId::new("b0").is_ok());
        assert!(BlankId::new("_x-1.2").is_ok());
        assert!(BlankId::new("0b").is_err());
        assert!(BlankId::new("a:b").is_err());
        assert!(BlankId::new("").is_err());
    }

    #[test]
    fn literal_subjects_rejected() {
        let p = Uri::parse("http://example.org/p").unwrap();
        let lit = Literal::plain("x").unwrap();
        assert_eq!(Triple::new(lit.clone(), p.clone(), lit).unwrap_err(), TermError::LiteralSubject);
    }
}
