//! The IMSC/TTML subset used for 360° subtitles and sign-language sidecars.
//!
//! A [`CueDocument`] holds styles, regions and timed `tt:p` cues. Cues may
//! carry a speaker location, either as `imac:audioSourceAzimuth/Elevation`
//! (subtitles) or `imac:equirectangularLongitude/Latitude` (signer
//! metadata). The same model backs both document kinds.

mod color;
mod parse;
mod serialize;
mod time;

use serde::Serialize;
use thiserror::Error;

use crate::geometry::{self, Direction, GeometryError};

pub use color::Color;
pub use parse::{parse_ttml, parse_ttml_detailed, parse_ttml_lenient};
pub use serialize::serialize_ttml;
pub use time::{BadTime, MediaTime};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TtmlError {
    #[error("malformed XML: {0}")]
    MalformedXml(String),
    #[error("{path}: not a TTML document ({message})")]
    NotTtml { path: String, message: String },
    #[error("{path}: {attribute}={value:?} out of range")]
    RangeError {
        path: String,
        attribute: String,
        value: String,
    },
    #[error("{path}: invalid {attribute}={value:?}")]
    InvalidAttribute {
        path: String,
        attribute: String,
        value: String,
    },
    #[error("{path}: {source}")]
    BadTime {
        path: String,
        #[source]
        source: BadTime,
    },
    #[error("{path}: missing {attribute}")]
    MissingAttribute { path: String, attribute: String },
    #[error("{path}: begin {begin} is not before end {end}")]
    EmptyInterval {
        path: String,
        begin: MediaTime,
        end: MediaTime,
    },
    #[error("{path}: unresolved reference {id:?}")]
    UnresolvedReference { path: String, id: String },
    #[error("{path}: duplicate xml:id {id:?}")]
    DuplicateId { path: String, id: String },
    #[error("{path}: both audioSource and equirectangular direction attributes present")]
    ConflictingDirection { path: String },
    #[error("unknown cue {0:?}")]
    UnknownCue(String),
    #[error("invariant violation: {0}")]
    InvariantViolation(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Region {
    pub id: String,
    /// Offset of the top-left corner, percent of the root container.
    pub origin: (f64, f64),
    /// Width and height, percent of the root container.
    pub extent: (f64, f64),
}

impl Region {
    /// The region must stay inside the root container region.
    pub fn check(&self) -> Result<(), String> {
        let (x, y) = self.origin;
        let (w, h) = self.extent;
        let all = [x, y, w, h];
        if all.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(format!("region {:?} has negative or non-finite geometry", self.id));
        }
        if x + w > 100.0 || y + h > 100.0 {
            return Err(format!("region {:?} extends the root container", self.id));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum TextAlign {
    Left,
    Center,
    Right,
    Start,
    End,
}

impl TextAlign {
    pub fn parse(s: &str) -> Option<TextAlign> {
        Some(match s {
            "left" => TextAlign::Left,
            "center" => TextAlign::Center,
            "right" => TextAlign::Right,
            "start" => TextAlign::Start,
            "end" => TextAlign::End,
            _ => return None,
        })
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            TextAlign::Left => "left",
            TextAlign::Center => "center",
            TextAlign::Right => "right",
            TextAlign::Start => "start",
            TextAlign::End => "end",
        }
    }
}

/// `imac:type` value marking a speaker color style.
pub const CHARACTER_STYLE_TYPE: &str = "stCharacter";

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Style {
    pub id: String,
    pub text_align: Option<TextAlign>,
    pub color: Option<Color>,
    pub background_color: Option<Color>,
    pub font_size: Option<String>,
    pub imac_type: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Span {
    pub style_refs: Vec<String>,
    /// Whitespace-normalised text; `\n` marks a `tt:br`.
    pub text: String,
}

/// A position given in the equirectangular attribute family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquirectPosition {
    longitude: f64,
    latitude: f64,
}

impl EquirectPosition {
    pub fn new(longitude: f64, latitude: f64) -> Result<Self, GeometryError> {
        // validates the pair
        geometry::longitude_latitude_to_direction(longitude, latitude)?;
        Ok(EquirectPosition {
            longitude: longitude + 0.0,
            latitude: latitude + 0.0,
        })
    }

    pub fn longitude(&self) -> f64 {
        self.longitude
    }

    pub fn latitude(&self) -> f64 {
        self.latitude
    }

    pub fn direction(&self) -> Direction {
        geometry::longitude_latitude_to_direction(self.longitude, self.latitude)
            .expect("validated at construction")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum DirectionSource {
    AudioSource,
    Equirectangular,
}

/// Where the speaker of a cue is, as written in the document.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpeakerLocation {
    AudioSource(Direction),
    Equirectangular(EquirectPosition),
}

impl SpeakerLocation {
    pub fn direction(&self) -> Direction {
        match self {
            SpeakerLocation::AudioSource(d) => *d,
            SpeakerLocation::Equirectangular(p) => p.direction(),
        }
    }

    pub fn source(&self) -> DirectionSource {
        match self {
            SpeakerLocation::AudioSource(_) => DirectionSource::AudioSource,
            SpeakerLocation::Equirectangular(_) => DirectionSource::Equirectangular,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Cue {
    pub id: String,
    pub region_id: Option<String>,
    pub style_refs: Vec<String>,
    pub begin: MediaTime,
    pub end: MediaTime,
    pub spans: Vec<Span>,
    pub location: Option<SpeakerLocation>,
}

impl Cue {
    pub fn direction(&self) -> Option<Direction> {
        self.location.map(|l| l.direction())
    }

    /// True when `t` falls in the half-open interval [begin, end).
    pub fn is_active_at(&self, t: MediaTime) -> bool {
        self.begin <= t && t < self.end
    }

    /// Span texts joined by single spaces.
    pub fn text(&self) -> String {
        let parts: Vec<&str> = self
            .spans
            .iter()
            .map(|s| s.text.as_str())
            .filter(|s| !s.is_empty())
            .collect();
        parts.join(" ")
    }
}

/// A direction attribute that was rejected by a lenient parse.
#[derive(Debug, Clone, PartialEq)]
pub struct RangeViolation {
    pub cue_id: String,
    pub path: String,
    pub attribute: String,
    pub value: String,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct CueDocument {
    pub regions: Vec<Region>,
    pub styles: Vec<Style>,
    /// Ordered by begin time, document order among equal begins.
    pub cues: Vec<Cue>,
    /// Set when `ebuttm:documentContentType` labels the content easy-to-read.
    pub easy_to_read_content_type: bool,
    /// Filled only by [`parse_ttml_lenient`]; the offending attributes are
    /// dropped from the cues.
    pub range_violations: Vec<RangeViolation>,
}

/// Signer activity at one instant, derived from the sidecar metadata.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SignerState {
    pub active: bool,
    pub speaker_name: Option<String>,
    pub color: Option<Color>,
    pub direction: Option<Direction>,
    pub cue_id: Option<String>,
    /// Other segments active at the same instant that lost to the
    /// latest-starting one. Non-empty only for overlapping content.
    pub superseded: Vec<String>,
}

impl CueDocument {
    pub fn style(&self, id: &str) -> Option<&Style> {
        self.styles.iter().find(|s| s.id == id)
    }

    pub fn cue(&self, id: &str) -> Option<&Cue> {
        self.cues.iter().find(|c| c.id == id)
    }

    /// Checks the structural invariants a valid document must satisfy.
    pub fn check(&self) -> Result<(), TtmlError> {
        let invariant = |m: String| Err(TtmlError::InvariantViolation(m));
        if !self.range_violations.is_empty() {
            return invariant("document carries rejected direction attributes".into());
        }
        let mut ids = std::collections::BTreeSet::new();
        for id in self
            .styles
            .iter()
            .map(|s| &s.id)
            .chain(self.regions.iter().map(|r| &r.id))
            .chain(self.cues.iter().map(|c| &c.id))
        {
            if id.is_empty() || !ids.insert(id.as_str()) {
                return invariant(format!("empty or duplicate id {id:?}"));
            }
        }
        for r in &self.regions {
            if let Err(m) = r.check() {
                return invariant(m);
            }
        }
        for w in self.cues.windows(2) {
            if w[1].begin < w[0].begin {
                return invariant("cues are not ordered by begin time".into());
            }
        }
        for c in &self.cues {
            if c.begin >= c.end {
                return invariant(format!("cue {:?} has an empty interval", c.id));
            }
            if let Some(r) = &c.region_id {
                if !self.regions.iter().any(|x| &x.id == r) {
                    return invariant(format!("cue {:?} references unknown region {r:?}", c.id));
                }
            }
            for s in c.style_refs.iter().chain(c.spans.iter().flat_map(|s| &s.style_refs)) {
                if self.style(s).is_none() {
                    return invariant(format!("cue {:?} references unknown style {s:?}", c.id));
                }
            }
        }
        Ok(())
    }

    /// Speaker color of a cue: the first colored style along the span style
    /// chain, then the cue's own styles. `stCharacter` styles win.
    pub fn resolve_color(&self, cue: &Cue) -> Option<Color> {
        let chain: Vec<&Style> = cue
            .spans
            .iter()
            .flat_map(|s| s.style_refs.iter())
            .chain(cue.style_refs.iter())
            .filter_map(|id| self.style(id))
            .collect();
        chain
            .iter()
            .find(|s| s.color.is_some() && s.imac_type.as_deref() == Some(CHARACTER_STYLE_TYPE))
            .or_else(|| chain.iter().find(|s| s.color.is_some()))
            .and_then(|s| s.color)
    }

    /// Pairs of cue ids whose intervals overlap.
    pub fn overlapping_cues(&self) -> Vec<(String, String)> {
        let mut out = Vec::new();
        for (i, a) in self.cues.iter().enumerate() {
            for b in &self.cues[i + 1..] {
                if a.begin < b.end && b.begin < a.end {
                    out.push((a.id.clone(), b.id.clone()));
                }
            }
        }
        out
    }
}

/// Cues with `begin <= t < end`, in document order.
pub fn active_cues(doc: &CueDocument, t: MediaTime) -> Vec<&Cue> {
    doc.cues.iter().filter(|c| c.is_active_at(t)).collect()
}

/// The cue to present at `t` when several are active: latest begin, later
/// position on ties.
pub fn latest_active_cue(doc: &CueDocument, t: MediaTime) -> Option<&Cue> {
    // max_by_key keeps the last maximum, i.e. the later cue on equal begins
    active_cues(doc, t).into_iter().max_by_key(|c| c.begin)
}

/// Interprets `doc` as signer metadata: each cue is one active segment.
pub fn signer_state(doc: &CueDocument, t: MediaTime) -> SignerState {
    let Some(cue) = latest_active_cue(doc, t) else {
        return SignerState::default();
    };
    let superseded = active_cues(doc, t)
        .into_iter()
        .filter(|c| c.id != cue.id)
        .map(|c| c.id.clone())
        .collect();
    SignerState {
        active: true,
        speaker_name: cue.spans.first().map(|s| s.text.clone()),
        color: doc.resolve_color(cue),
        direction: cue.direction(),
        cue_id: Some(cue.id.clone()),
        superseded,
    }
}

/// Returns a copy of `doc` whose cue `cue_id` carries `d` in the
/// audio-source attribute family.
pub fn annotate_direction(doc: &CueDocument, cue_id: &str, d: Direction) -> Result<CueDocument, TtmlError> {
    // re-validate in case the caller built the value through an unchecked path
    let d = Direction::new(d.azimuth(), d.elevation())?;
    let mut out = doc.clone();
    let cue = out
        .cues
        .iter_mut()
        .find(|c| c.id == cue_id)
        .ok_or_else(|| TtmlError::UnknownCue(cue_id.to_string()))?;
    cue.location = Some(SpeakerLocation::AudioSource(d));
    Ok(out)
}

#[cfg(test)]
mod tests;
