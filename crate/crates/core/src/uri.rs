use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("bad URI {value:?}: {reason}")]
pub struct BadUri {
    pub value: String,
    pub reason: &'static str,
}

/// An absolute URI.
///
/// The scheme and host are lowercased on construction, so equality and
/// ordering are plain string comparisons of the normalized form.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Uri(String);

impl Uri {
    pub fn parse(value: &str) -> Result<Uri, BadUri> {
        let bad = |reason| BadUri {
            value: value.to_owned(),
            reason,
        };
        if value.is_empty() {
            return Err(bad("empty"));
        }
        if let Some(c) = value.chars().find(|&c| !is_uri_char(c)) {
            return Err(if c.is_whitespace() {
                bad("contains whitespace")
            } else {
                bad("contains a character not allowed in URIs")
            });
        }
        let colon = value.find(':').ok_or_else(|| bad("missing scheme"))?;
        let scheme = &value[..colon];
        let mut chars = scheme.chars();
        match chars.next() {
            Some(c) if c.is_ascii_alphabetic() => {}
            _ => return Err(bad("scheme must start with a letter")),
        }
        if !chars.all(|c| c.is_ascii_alphanumeric() || matches!(c, '+' | '-' | '.')) {
            return Err(bad("invalid scheme character"));
        }
        let rest = &value[colon + 1..];
        if rest.is_empty() {
            return Err(bad("nothing after scheme"));
        }

        let mut normalized = scheme.to_ascii_lowercase();
        normalized.push(':');
        if let Some(after) = rest.strip_prefix("//") {
            let end = after.find(['/', '?', '#']).unwrap_or(after.len());
            let authority = &after[..end];
            let (userinfo, hostport) = match authority.rfind('@') {
                Some(at) => (&authority[..=at], &authority[at + 1..]),
                None => ("", authority),
            };
            if hostport.is_empty() && is_http_scheme(scheme) {
                return Err(bad("missing host"));
            }
            let (host, port) = split_port(hostport);
            if !port.is_empty() && !port[1..].chars().all(|c| c.is_ascii_digit()) {
                return Err(bad("invalid port"));
            }
            normalized.push_str("//");
            normalized.push_str(userinfo);
            normalized.push_str(&host.to_ascii_lowercase());
            normalized.push_str(port);
            normalized.push_str(&after[end..]);
        } else {
            if is_http_scheme(scheme) {
                return Err(bad("http URIs need an authority"));
            }
            normalized.push_str(rest);
        }
        Ok(Uri(normalized))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn scheme(&self) -> &str {
        &self.0[..self.0.find(':').unwrap_or(0)]
    }

    /// True for `http` and `https` URIs, which are the only schemes allowed
    /// for aggregations, resource maps, aggregated resources and proxies.
    pub fn is_http(&self) -> bool {
        is_http_scheme(self.scheme())
    }

    /// `host[:port]` for hierarchical URIs.
    pub fn authority(&self) -> Option<&str> {
        let after = self.0[self.scheme().len() + 1..].strip_prefix("//")?;
        let end = after.find(['/', '?', '#']).unwrap_or(after.len());
        let authority = &after[..end];
        Some(match authority.rfind('@') {
            Some(at) => &authority[at + 1..],
            None => authority,
        })
    }

    /// Path, query and fragment of a hierarchical URI (`/` when empty).
    pub fn path_and_query(&self) -> &str {
        let scheme_len = self.scheme().len() + 1;
        match self.0[scheme_len..].strip_prefix("//") {
            Some(after) => {
                let end = after.find(['/', '?', '#']).unwrap_or(after.len());
                let tail = &after[end..];
                if tail.is_empty() {
                    "/"
                } else {
                    tail
                }
            }
            None => &self.0[scheme_len..],
        }
    }

    pub fn without_fragment(&self) -> Uri {
        match self.0.find('#') {
            Some(i) => Uri(self.0[..i].to_owned()),
            None => self.clone(),
        }
    }

    /// Resolves a possibly relative reference against this URI.
    pub fn resolve(&self, reference: &str) -> Result<Uri, BadUri> {
        if let Ok(absolute) = Uri::parse(reference) {
            return Ok(absolute);
        }
        let base = url::Url::parse(&self.0).map_err(|_| BadUri {
            value: self.0.clone(),
            reason: "cannot be used as a base",
        })?;
        let joined = base.join(reference).map_err(|_| BadUri {
            value: reference.to_owned(),
            reason: "cannot be resolved against base",
        })?;
        Uri::parse(joined.as_str())
    }

    /// Appends `suffix` to the URI string, e.g. to mint sibling resources.
    pub fn with_suffix(&self, suffix: &str) -> Result<Uri, BadUri> {
        Uri::parse(&format!("{}{}", self.0, suffix))
    }
}

fn is_http_scheme(scheme: &str) -> bool {
    scheme.eq_ignore_ascii_case("http") || scheme.eq_ignore_ascii_case("https")
}

fn is_uri_char(c: char) -> bool {
    // Unreserved, reserved and '%'; non-ASCII is tolerated (IRIs).
    if c.is_ascii() {
        c.is_ascii_alphanumeric() || "-._~:/?#[]@!$&'()*+,;=%".contains(c)
    } else {
        !c.is_whitespace() && !c.is_control()
    }
}

fn split_port(hostport: &str) -> (&str, &str) {
    // IPv6 literals keep their colons inside brackets.
    let search_from = hostport.rfind(']').unwrap_or(0);
    match hostport[search_from..].rfind(':') {
        Some(i) => hostport.split_at(search_from + i),
        None => (hostport, ""),
    }
}

impl fmt::Display for Uri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Uri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}>", self.0)
    }
}

impl FromStr for Uri {
    type Err = BadUri;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Uri::parse(s)
    }
}

impl AsRef<str> for Uri {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

impl Serialize for Uri {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for Uri {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        Uri::parse(&s).map_err(serde::de::Error::custom)
    }
}
