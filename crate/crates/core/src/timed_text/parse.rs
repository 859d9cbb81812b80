use std::collections::BTreeSet;

use roxmltree::{Document, Node};

use super::{
    Color, Cue, CueDocument, EquirectPosition, MediaTime, RangeViolation, Region, Span,
    SpeakerLocation, Style, TextAlign, TtmlError,
};
use crate::geometry::{Direction, GeometryError};
use crate::report::{ParseWarning, Parsed};
use crate::xml::{element_path, is_imac_ns, EBUTTM_NS, ITTP_NS, TTML_NS, TTS_NS, XML_NS};

/// Parses a TTML document, rejecting out-of-range direction attributes.
pub fn parse_ttml(xml_text: &str) -> Result<CueDocument, TtmlError> {
    parse_ttml_detailed(xml_text).map(|p| p.value)
}

pub fn parse_ttml_detailed(xml_text: &str) -> Result<Parsed<CueDocument>, TtmlError> {
    Parser::new(true).run(xml_text)
}

/// Like [`parse_ttml_detailed`], but out-of-range direction attributes are
/// dropped and recorded in [`CueDocument::range_violations`] instead of
/// failing the parse. Used by the validator.
pub fn parse_ttml_lenient(xml_text: &str) -> Result<Parsed<CueDocument>, TtmlError> {
    Parser::new(false).run(xml_text)
}

fn is_tt(node: &Node, local: &str) -> bool {
    node.is_element()
        && node.tag_name().name() == local
        && node.tag_name().namespace() == Some(TTML_NS)
}

pub(crate) fn node_path(node: Node) -> String {
    element_path(node, &|n: &Node| {
        n.attribute((XML_NS, "id")).map(|id| ("xml:id".to_string(), id.to_string()))
    })
}

fn refs(value: Option<&str>) -> Vec<String> {
    value
        .map(|v| v.split_whitespace().map(str::to_string).collect())
        .unwrap_or_default()
}

/// Collapses XML whitespace; `\n` characters in the input are `tt:br` marks.
fn normalize_text(raw: &str) -> String {
    raw.split('\n')
        .map(|line| line.split_whitespace().collect::<Vec<_>>().join(" "))
        .collect::<Vec<_>>()
        .join("\n")
        .trim_matches('\n')
        .to_string()
}

fn collect_text(node: Node, out: &mut String) {
    for c in node.children() {
        if c.is_text() {
            // source line breaks are plain whitespace
            out.extend(c.text().unwrap_or("").chars().map(|ch| if ch == '\n' { ' ' } else { ch }));
        } else if is_tt(&c, "br") {
            out.push('\n');
        } else if c.is_element() {
            collect_text(c, out);
        }
    }
}

fn percent_pair(path: &str, attribute: &str, value: &str) -> Result<(f64, f64), TtmlError> {
    let invalid = || TtmlError::InvalidAttribute {
        path: path.to_string(),
        attribute: attribute.to_string(),
        value: value.to_string(),
    };
    let comps: Vec<f64> = value
        .split_whitespace()
        .map(|c| {
            c.strip_suffix('%')
                .and_then(|n| n.parse::<f64>().ok())
                .filter(|n| n.is_finite())
        })
        .collect::<Option<_>>()
        .ok_or_else(invalid)?;
    match comps.as_slice() {
        [a, b] => Ok((*a, *b)),
        _ => Err(invalid()),
    }
}

#[derive(Default)]
struct RawDirection<'a> {
    azimuth: Option<(&'a str, &'a str)>,
    elevation: Option<&'a str>,
    longitude: Option<&'a str>,
    latitude: Option<&'a str>,
}

impl<'a> RawDirection<'a> {
    fn read(node: Node<'a, 'a>, path: &str, warnings: &mut Vec<ParseWarning>) -> Self {
        let mut raw = RawDirection::default();
        let mut alias = None;
        for a in node.attributes() {
            if !a.namespace().is_some_and(is_imac_ns) {
                continue;
            }
            match a.name() {
                "audioSourceAzimuth" => raw.azimuth = Some(("audioSourceAzimuth", a.value())),
                "audioSourceAzimut" => alias = Some(a.value()),
                "audioSourceElevation" => raw.elevation = Some(a.value()),
                "equirectangularLongitude" => raw.longitude = Some(a.value()),
                "equirectangularLatitude" => raw.latitude = Some(a.value()),
                _ => {}
            }
        }
        if let Some(v) = alias {
            let message = if raw.azimuth.is_some() {
                "both imac:audioSourceAzimut and imac:audioSourceAzimuth present; alias ignored"
            } else {
                raw.azimuth = Some(("audioSourceAzimut", v));
                "imac:audioSourceAzimut read as imac:audioSourceAzimuth"
            };
            warnings.push(ParseWarning {
                path: path.to_string(),
                message: message.to_string(),
            });
        }
        raw
    }

    fn is_empty(&self) -> bool {
        self.azimuth.is_none() && self.elevation.is_none() && self.longitude.is_none() && self.latitude.is_none()
    }
}

struct Parser {
    strict: bool,
    warnings: Vec<ParseWarning>,
    violations: Vec<RangeViolation>,
}

impl Parser {
    fn new(strict: bool) -> Self {
        Parser {
            strict,
            warnings: Vec::new(),
            violations: Vec::new(),
        }
    }

    fn warn(&mut self, path: &str, message: impl Into<String>) {
        self.warnings.push(ParseWarning {
            path: path.to_string(),
            message: message.into(),
        });
    }

    fn run(mut self, xml_text: &str) -> Result<Parsed<CueDocument>, TtmlError> {
        let doc = Document::parse(xml_text).map_err(|e| TtmlError::MalformedXml(e.to_string()))?;
        let root = doc.root_element();
        if !is_tt(&root, "tt") {
            return Err(TtmlError::NotTtml {
                path: node_path(root),
                message: format!("root element is {:?}", root.tag_name().name()),
            });
        }
        if root.attribute((ITTP_NS, "aspectRatio")).is_some() {
            self.warn("/tt", "ittp:aspectRatio is present; root container mapping is not adjusted");
        }

        let mut out = CueDocument::default();
        if let Some(head) = root.children().find(|n| is_tt(n, "head")) {
            for style in head.descendants().filter(|n| is_tt(n, "style")) {
                if let Some(s) = self.style(style)? {
                    out.styles.push(s);
                }
            }
            for region in head.descendants().filter(|n| is_tt(n, "region")) {
                if let Some(r) = self.region(region)? {
                    out.regions.push(r);
                }
            }
            out.easy_to_read_content_type = head
                .descendants()
                .filter(|n| n.is_element() && n.tag_name().name() == "documentContentType")
                .filter(|n| n.tag_name().namespace() == Some(EBUTTM_NS))
                .any(|n| is_easy_to_read_label(n.text().unwrap_or("")));
        }

        let mut ids: BTreeSet<String> = BTreeSet::new();
        for id in out.styles.iter().map(|s| &s.id).chain(out.regions.iter().map(|r| &r.id)) {
            if !ids.insert(id.clone()) {
                return Err(TtmlError::DuplicateId {
                    path: "/tt/head".into(),
                    id: id.clone(),
                });
            }
        }

        if let Some(body) = root.children().find(|n| is_tt(n, "body")) {
            let ps: Vec<_> = body.descendants().filter(|n| is_tt(n, "p")).collect();
            for (index, p) in ps.into_iter().enumerate() {
                let cue = self.cue(p, index, &out)?;
                if !ids.insert(cue.id.clone()) {
                    return Err(TtmlError::DuplicateId {
                        path: node_path(p),
                        id: cue.id,
                    });
                }
                out.cues.push(cue);
            }
        }
        // stable: equal begins keep document order
        out.cues.sort_by_key(|c| c.begin);
        out.range_violations = self.violations;
        Ok(Parsed {
            value: out,
            warnings: self.warnings,
        })
    }

    fn style(&mut self, node: Node) -> Result<Option<Style>, TtmlError> {
        let path = node_path(node);
        let Some(id) = node.attribute((XML_NS, "id")) else {
            self.warn(&path, "style without xml:id ignored");
            return Ok(None);
        };
        let invalid = |attribute: &str, value: &str| TtmlError::InvalidAttribute {
            path: path.clone(),
            attribute: attribute.to_string(),
            value: value.to_string(),
        };
        let color = |attribute: &str| -> Result<Option<Color>, TtmlError> {
            node.attribute((TTS_NS, attribute))
                .map(|v| Color::parse(v).ok_or_else(|| invalid(&format!("tts:{attribute}"), v)))
                .transpose()
        };
        let text_align = node
            .attribute((TTS_NS, "textAlign"))
            .map(|v| TextAlign::parse(v).ok_or_else(|| invalid("tts:textAlign", v)))
            .transpose()?;
        let imac_type = node
            .attributes()
            .find(|a| a.namespace().is_some_and(is_imac_ns) && a.name() == "type")
            .map(|a| a.value().to_string());
        Ok(Some(Style {
            id: id.to_string(),
            text_align,
            color: color("color")?,
            background_color: color("backgroundColor")?,
            font_size: node.attribute((TTS_NS, "fontSize")).map(str::to_string),
            imac_type,
        }))
    }

    fn region(&mut self, node: Node) -> Result<Option<Region>, TtmlError> {
        let path = node_path(node);
        let Some(id) = node.attribute((XML_NS, "id")) else {
            self.warn(&path, "region without xml:id ignored");
            return Ok(None);
        };
        let origin = match node.attribute((TTS_NS, "origin")) {
            Some(v) => percent_pair(&path, "tts:origin", v)?,
            None => (0.0, 0.0),
        };
        let extent = match node.attribute((TTS_NS, "extent")) {
            Some(v) => percent_pair(&path, "tts:extent", v)?,
            None => (100.0 - origin.0, 100.0 - origin.1),
        };
        let region = Region {
            id: id.to_string(),
            origin,
            extent,
        };
        if region.check().is_err() {
            return Err(TtmlError::RangeError {
                path,
                attribute: "tts:origin/tts:extent".into(),
                value: format!("{:?} {:?}", origin, extent),
            });
        }
        Ok(Some(region))
    }

    fn time(&self, node: Node, path: &str, attribute: &str) -> Result<MediaTime, TtmlError> {
        let text = node.attribute(attribute).ok_or_else(|| TtmlError::MissingAttribute {
            path: path.to_string(),
            attribute: attribute.to_string(),
        })?;
        MediaTime::parse(text.trim()).map_err(|source| TtmlError::BadTime {
            path: path.to_string(),
            source,
        })
    }

    fn cue(&mut self, p: Node, index: usize, doc: &CueDocument) -> Result<Cue, TtmlError> {
        let path = node_path(p);
        let id = p
            .attribute((XML_NS, "id"))
            .map(str::to_string)
            .unwrap_or_else(|| format!("cue-{}", index + 1));
        let begin = self.time(p, &path, "begin")?;
        let end = self.time(p, &path, "end")?;
        if begin >= end {
            return Err(TtmlError::EmptyInterval { path, begin, end });
        }

        let region_id = p.attribute("region").map(str::to_string);
        if let Some(r) = &region_id {
            if !doc.regions.iter().any(|x| &x.id == r) {
                return Err(TtmlError::UnresolvedReference { path, id: r.clone() });
            }
        }
        let style_refs = refs(p.attribute("style"));

        let mut spans = Vec::new();
        let mut location = self.location(p, &path, &id)?;
        let mut loose = String::new();
        for child in p.children() {
            if child.is_text() {
                loose.push_str(&child.text().unwrap_or("").replace('\n', " "));
            } else if is_tt(&child, "br") {
                loose.push('\n');
            } else if is_tt(&child, "span") {
                let text = normalize_text(&loose);
                if !text.is_empty() {
                    spans.push(Span { style_refs: Vec::new(), text });
                }
                loose.clear();
                let span_path = node_path(child);
                let mut raw = String::new();
                collect_text(child, &mut raw);
                if child.descendants().skip(1).any(|n| is_tt(&n, "span")) {
                    self.warn(&span_path, "nested spans flattened into their outer span");
                }
                spans.push(Span {
                    style_refs: refs(child.attribute("style")),
                    text: normalize_text(&raw),
                });
                if let Some(span_loc) = self.location(child, &span_path, &id)? {
                    if location.is_none() {
                        self.warn(&span_path, "span direction applied to its cue");
                        location = Some(span_loc);
                    } else if location != Some(span_loc) {
                        self.warn(&span_path, "span direction differs from cue direction; ignored");
                    }
                }
            }
        }
        let text = normalize_text(&loose);
        if !text.is_empty() {
            spans.push(Span { style_refs: Vec::new(), text });
        }

        for s in style_refs.iter().chain(spans.iter().flat_map(|s| s.style_refs.iter())) {
            if doc.style(s).is_none() {
                return Err(TtmlError::UnresolvedReference { path, id: s.clone() });
            }
        }

        Ok(Cue {
            id,
            region_id,
            style_refs,
            begin,
            end,
            spans,
            location,
        })
    }

    fn number(&self, path: &str, attribute: &str, value: &str) -> Result<f64, TtmlError> {
        value
            .trim()
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| TtmlError::InvalidAttribute {
                path: path.to_string(),
                attribute: format!("imac:{attribute}"),
                value: value.to_string(),
            })
    }

    /// Handles an out-of-range direction: fatal in strict mode, recorded
    /// and dropped otherwise.
    fn out_of_range(
        &mut self,
        path: &str,
        cue_id: &str,
        attribute: &str,
        value: &str,
    ) -> Result<Option<SpeakerLocation>, TtmlError> {
        if self.strict {
            return Err(TtmlError::RangeError {
                path: path.to_string(),
                attribute: format!("imac:{attribute}"),
                value: value.to_string(),
            });
        }
        self.violations.push(RangeViolation {
            cue_id: cue_id.to_string(),
            path: path.to_string(),
            attribute: format!("imac:{attribute}"),
            value: value.to_string(),
        });
        Ok(None)
    }

    fn location(&mut self, node: Node, path: &str, cue_id: &str) -> Result<Option<SpeakerLocation>, TtmlError> {
        let raw = RawDirection::read(node, path, &mut self.warnings);
        if raw.is_empty() {
            return Ok(None);
        }
        let audio = raw.azimuth.is_some() || raw.elevation.is_some();
        let equirect = raw.longitude.is_some() || raw.latitude.is_some();
        if audio && equirect {
            return Err(TtmlError::ConflictingDirection { path: path.to_string() });
        }
        if audio {
            let Some((az_attr, az_text)) = raw.azimuth else {
                self.warn(path, "imac:audioSourceElevation without azimuth ignored");
                return Ok(None);
            };
            let azimuth = self.number(path, az_attr, az_text)?;
            let elevation = match raw.elevation {
                Some(v) => self.number(path, "audioSourceElevation", v)?,
                None => 0.0,
            };
            return match Direction::new(azimuth, elevation) {
                Ok(d) => Ok(Some(SpeakerLocation::AudioSource(d))),
                Err(GeometryError::ElevationRange(_)) => {
                    self.out_of_range(path, cue_id, "audioSourceElevation", raw.elevation.unwrap_or(""))
                }
                Err(_) => self.out_of_range(path, cue_id, az_attr, az_text),
            };
        }
        let Some(lon_text) = raw.longitude else {
            self.warn(path, "imac:equirectangularLatitude without longitude ignored");
            return Ok(None);
        };
        let longitude = self.number(path, "equirectangularLongitude", lon_text)?;
        let latitude = match raw.latitude {
            Some(v) => self.number(path, "equirectangularLatitude", v)?,
            None => 0.0,
        };
        match EquirectPosition::new(longitude, latitude) {
            Ok(p) => Ok(Some(SpeakerLocation::Equirectangular(p))),
            Err(_) => self.out_of_range(path, cue_id, "equirectangularLatitude", raw.latitude.unwrap_or("")),
        }
    }
}

/// Accepts a bare `easy-to-read` label or a classification-scheme term
/// ending in it.
fn is_easy_to_read_label(text: &str) -> bool {
    let t = text.trim().to_ascii_lowercase();
    t == "easy-to-read" || t.ends_with("#easy-to-read") || t.ends_with(":easy-to-read")
}
