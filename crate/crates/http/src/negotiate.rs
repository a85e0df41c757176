use ore_core::WireFormat;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NegotiationResult {
    pub chosen: WireFormat,
    /// The Accept range that gave `chosen` its quality, as written by the
    /// client (lowercased, without parameters).
    pub matched_media_type: String,
    pub quality: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("no acceptable representation")]
pub struct NotAcceptable;

#[derive(Debug, Clone, PartialEq)]
struct MediaRange {
    kind: String,
    subtype: String,
    q: f64,
}

impl MediaRange {
    /// 2 for an exact match, 1 for `type/*`, 0 for `*/*`.
    fn specificity(&self, kind: &str, subtype: &str) -> Option<u8> {
        match (self.kind.as_str(), self.subtype.as_str()) {
            ("*", "*") => Some(0),
            (k, "*") if k == kind => Some(1),
            (k, s) if k == kind && s == subtype => Some(2),
            _ => None,
        }
    }

    fn text(&self) -> String {
        format!("{}/{}", self.kind, self.subtype)
    }
}

fn parse_range(item: &str) -> Option<MediaRange> {
    let mut parts = item.split(';');
    let media = parts.next()?.trim();
    let (kind, subtype) = media.split_once('/')?;
    let (kind, subtype) = (kind.trim(), subtype.trim());
    if kind.is_empty() || subtype.is_empty() || (kind == "*" && subtype != "*") {
        return None;
    }
    let mut q = 1.0;
    for param in parts {
        let Some((name, value)) = param.split_once('=') else { continue };
        if name.trim().eq_ignore_ascii_case("q") {
            // an unreadable weight counts as "not acceptable"
            q = value.trim().parse::<f64>().ok().filter(|q| q.is_finite()).unwrap_or(0.0);
        }
    }
    Some(MediaRange {
        kind: kind.to_ascii_lowercase(),
        subtype: subtype.to_ascii_lowercase(),
        q: q.clamp(0.0, 1.0),
    })
}

/// Picks a representation for an Accept header.
///
/// Each format takes the quality of the most specific range that matches its
/// media type. The highest quality wins and ties go to the earlier entry of
/// `preference`. A missing or blank header yields `default_format`.
/// `available` must not be empty.
pub fn negotiate(
    accept: Option<&str>,
    available: &[WireFormat],
    default_format: WireFormat,
    preference: &[WireFormat],
) -> Result<NegotiationResult, NotAcceptable> {
    assert!(!available.is_empty(), "nothing to negotiate over");
    let ranges: Vec<MediaRange> = accept
        .unwrap_or_default()
        .split(',')
        .filter(|item| !item.trim().is_empty())
        .filter_map(parse_range)
        .collect();
    if ranges.is_empty() {
        let chosen = if available.contains(&default_format) {
            default_format
        } else {
            ranked(available, preference)[0]
        };
        return Ok(NegotiationResult {
            chosen,
            matched_media_type: "*/*".to_owned(),
            quality: 1.0,
        });
    }

    let mut best: Option<NegotiationResult> = None;
    for format in ranked(available, preference) {
        let (kind, subtype) = format.media_type().split_once('/').expect("media type has a slash");
        // on equal specificity the earliest range counts
        let matched = ranges
            .iter()
            .rev()
            .filter_map(|r| r.specificity(kind, subtype).map(|s| (s, r)))
            .max_by_key(|(s, _)| *s)
            .map(|(_, r)| r);
        let Some(range) = matched else { continue };
        if range.q <= 0.0 {
            continue;
        }
        if best.as_ref().is_none_or(|b| range.q > b.quality) {
            best = Some(NegotiationResult {
                chosen: format,
                matched_media_type: range.text(),
                quality: range.q,
            });
        }
    }
    best.ok_or(NotAcceptable)
}

/// `available` sorted by `preference`; formats missing from `preference`
/// go last in their natural order.
fn ranked(available: &[WireFormat], preference: &[WireFormat]) -> Vec<WireFormat> {
    let mut out: Vec<WireFormat> = available.to_vec();
    out.sort_by_key(|f| (preference.iter().position(|p| p == f).unwrap_or(usize::MAX), *f));
    out.dedup();
    out
}
