//! The subset of the DASH MPD that carries accessibility signaling.
//!
//! Parsing is lossy: only adaptation sets, representations, their
//! descriptors, the ImAc audio-description variant and preselections are
//! kept. Everything else is dropped and reported as a count in the parse
//! warnings.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use roxmltree::{Document, Node};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::report::{ParseWarning, Parsed};
use crate::xml::{element_path, is_imac_ns, Writer, DASH_NS, IMAC_NS, IMAC_PLACEHOLDER_NS};

pub const ROLE_SCHEME: &str = "urn:mpeg:dash:role:2011";
pub const AUDIO_PURPOSE_SCHEME: &str = "urn:tva:metadata:cs:AudioPurposeCS:2007";
pub const IMAC_ACCESS_SCHEME: &str = "urn:imac:access-identifier:2019";
pub const SIGNER_METADATA_LINK_SCHEME: &str = "urn:imac:signer-metadata-adaptation-set-id:2019";
pub const AMBI_MAP_SCHEME: &str = "urn:mpeg:dash:ambi-map:2018";
pub const AUDIO_CHANNEL_CONFIGURATION_SCHEME: &str =
    "urn:mpeg:dash:23003:3:audio_channel_configuration:2011";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MpdError {
    #[error("malformed XML: {0}")]
    MalformedXml(String),
    #[error("{path}: {message}")]
    SchemaViolation { path: String, message: String },
    #[error("{path}: invariant violated: {message}")]
    InvariantViolation { path: String, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Strength {
    /// Role and Accessibility elements.
    Plain,
    Supplemental,
    Essential,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Descriptor {
    pub scheme_id_uri: String,
    pub value: String,
    pub strength: Strength,
}

impl Descriptor {
    pub fn new(scheme_id_uri: &str, value: &str, strength: Strength) -> Self {
        Descriptor {
            scheme_id_uri: scheme_id_uri.to_string(),
            value: value.to_string(),
            strength,
        }
    }

    pub fn is(&self, scheme: &str, value: &str) -> bool {
        self.scheme_id_uri == scheme && self.value == value
    }

    fn element_name(&self) -> &'static str {
        match self.strength {
            Strength::Plain => "Descriptor",
            Strength::Supplemental => "SupplementalProperty",
            Strength::Essential => "EssentialProperty",
        }
    }
}

macro_rules! vocabulary {
    ($(#[$meta:meta])* $name:ident { $($variant:ident => $text:literal),+ $(,)? }) => {
        $(#[$meta])*
        #[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub enum $name {
            $($variant,)+
            /// A value outside the defined vocabulary, kept for validation.
            Other(String),
        }

        impl $name {
            pub fn parse(text: &str) -> Self {
                match text {
                    $($text => $name::$variant,)+
                    other => $name::Other(other.to_string()),
                }
            }

            pub fn as_str(&self) -> &str {
                match self {
                    $($name::$variant => $text,)+
                    $name::Other(s) => s,
                }
            }

            pub fn is_known(&self) -> bool {
                !matches!(self, $name::Other(_))
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }

        impl Serialize for $name {
            fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                s.serialize_str(self.as_str())
            }
        }

        impl<'de> Deserialize<'de> for $name {
            fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
                let s = String::deserialize(d)?;
                Ok($name::parse(&s))
            }
        }
    };
}

vocabulary!(
    /// Level of the AD part in a broadcast mix.
    AdGain { Low => "low", Medium => "medium", High => "high" }
);
vocabulary!(
    /// Spatial treatment of the AD segments.
    AdMode { Classic => "classic", Static => "static", Dynamic => "dynamic" }
);

/// One pre-mixed AD variant, carried by `imac:AudioDescription`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct AdVariant {
    pub gain: AdGain,
    pub mode: AdMode,
    /// Free-form narrative label; no vocabulary is defined for it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub narrative: Option<String>,
}

impl AdVariant {
    pub fn new(gain: AdGain, mode: AdMode) -> Self {
        AdVariant {
            gain,
            mode,
            narrative: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Representation {
    pub id: String,
    pub bandwidth: Option<u64>,
    pub codecs: Option<String>,
    pub dependency_ids: Vec<String>,
    pub audio_channel_count: Option<u32>,
    pub imac_ad: Option<AdVariant>,
    pub base_url: Option<String>,
    /// Supplemental and essential properties, in document order.
    pub descriptors: Vec<Descriptor>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct AdaptationSet {
    pub id: Option<String>,
    pub lang: Option<String>,
    pub content_type: Option<String>,
    pub mime_type: Option<String>,
    pub roles: Vec<Descriptor>,
    pub accessibility: Vec<Descriptor>,
    pub supplemental_properties: Vec<Descriptor>,
    pub essential_properties: Vec<Descriptor>,
    pub representations: Vec<Representation>,
}

impl AdaptationSet {
    pub fn has_role(&self, scheme: &str, value: &str) -> bool {
        self.roles.iter().any(|d| d.is(scheme, value))
    }

    pub fn has_accessibility(&self, scheme: &str, value: &str) -> bool {
        self.accessibility.iter().any(|d| d.is(scheme, value))
    }

    pub fn properties(&self) -> impl Iterator<Item = &Descriptor> {
        self.essential_properties.iter().chain(self.supplemental_properties.iter())
    }

    /// Location step of the representation at `index`, relative to the set.
    pub fn representation_step(&self, index: usize) -> String {
        let rep = &self.representations[index];
        if !rep.id.is_empty() {
            format!("Representation[@id='{}']", rep.id)
        } else if self.representations.len() == 1 {
            "Representation".to_string()
        } else {
            format!("Representation[{}]", index + 1)
        }
    }

    /// Codecs of the set: any representation codec string.
    pub fn codecs(&self) -> impl Iterator<Item = &str> {
        self.representations.iter().filter_map(|r| r.codecs.as_deref())
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Preselection {
    pub id: Option<String>,
    pub component_ids: Vec<String>,
    pub lang: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct MediaPresentation {
    pub adaptation_sets: Vec<AdaptationSet>,
    pub preselections: Vec<Preselection>,
    /// Namespaces declared on the MPD element besides DASH and ImAc, keyed
    /// by prefix. The ImAc namespace is recognised by URI, whatever its prefix.
    pub declared_namespaces: BTreeMap<String, String>,
}

impl MediaPresentation {
    pub fn adaptation_set(&self, id: &str) -> Option<&AdaptationSet> {
        self.adaptation_sets.iter().find(|a| a.id.as_deref() == Some(id))
    }

    /// Location of the adaptation set at `index`, in the form the serializer
    /// and single-period documents use.
    pub fn adaptation_set_path(&self, index: usize) -> String {
        match self.adaptation_sets.get(index).and_then(|a| a.id.as_deref()) {
            Some(id) => format!("/MPD/Period/AdaptationSet[@id='{id}']"),
            None if self.adaptation_sets.len() == 1 => "/MPD/Period/AdaptationSet".to_string(),
            None => format!("/MPD/Period/AdaptationSet[{}]", index + 1),
        }
    }

    pub fn representation_path(&self, set_index: usize, rep_index: usize) -> String {
        let base = self.adaptation_set_path(set_index);
        format!("{base}/{}", self.adaptation_sets[set_index].representation_step(rep_index))
    }

    /// Checks every type invariant of the model.
    pub fn check(&self) -> Result<(), MpdError> {
        let violation = |path: String, message: String| Err(MpdError::InvariantViolation { path, message });
        let mut ids = BTreeSet::new();
        for (i, set) in self.adaptation_sets.iter().enumerate() {
            let path = self.adaptation_set_path(i);
            if let Some(id) = &set.id {
                if !ids.insert(id.as_str()) {
                    return violation(path, format!("duplicate AdaptationSet id {id:?}"));
                }
            }
            if set.representations.is_empty() {
                return violation(path, "AdaptationSet without Representation".into());
            }
            let groups: [(&[Descriptor], &[Strength]); 4] = [
                (&set.roles, &[Strength::Plain]),
                (&set.accessibility, &[Strength::Plain]),
                (&set.supplemental_properties, &[Strength::Supplemental]),
                (&set.essential_properties, &[Strength::Essential]),
            ];
            for (list, allowed) in groups {
                for d in list {
                    check_descriptor(d, allowed, &path)?;
                }
            }
            for value in [&set.lang, &set.content_type, &set.mime_type, &set.id].into_iter().flatten() {
                check_text(value, &path)?;
            }
            for (j, rep) in set.representations.iter().enumerate() {
                let path = self.representation_path(i, j);
                check_text(&rep.id, &path)?;
                for d in &rep.descriptors {
                    check_descriptor(d, &[Strength::Supplemental, Strength::Essential], &path)?;
                }
                if rep.dependency_ids.iter().any(|d| d.is_empty() || d.contains(char::is_whitespace)) {
                    return violation(path, "dependency ids must be non-empty tokens".into());
                }
                if rep.audio_channel_count == Some(0) {
                    return violation(path, "audio channel count must be at least 1".into());
                }
                if let Some(ad) = &rep.imac_ad {
                    if !ad.gain.is_known() || !ad.mode.is_known() {
                        return violation(path, format!("AD variant {}/{} outside vocabulary", ad.gain, ad.mode));
                    }
                }
                for value in [&rep.codecs, &rep.base_url].into_iter().flatten() {
                    check_text(value, &path)?;
                }
            }
        }
        for p in &self.preselections {
            let unique: BTreeSet<_> = p.component_ids.iter().collect();
            if p.component_ids.is_empty()
                || unique.len() != p.component_ids.len()
                || p.component_ids.iter().any(|c| c.is_empty() || c.contains(char::is_whitespace))
            {
                return violation(
                    "/MPD/Period/Preselection".into(),
                    "preselection components must be unique non-empty tokens".into(),
                );
            }
        }
        for (prefix, uri) in &self.declared_namespaces {
            let reserved = ["", "imac", "xml", "xmlns"].contains(&prefix.as_str());
            let valid_prefix = prefix
                .chars()
                .enumerate()
                .all(|(i, c)| c.is_ascii_alphabetic() || c == '_' || (i > 0 && (c.is_ascii_digit() || c == '-' || c == '.')));
            if reserved || !valid_prefix || uri == DASH_NS || is_imac_ns(uri) || uri.is_empty() {
                return violation("/MPD".into(), format!("namespace declaration {prefix:?} = {uri:?} not allowed"));
            }
        }
        Ok(())
    }
}

fn check_text(value: &str, path: &str) -> Result<(), MpdError> {
    let ok = value.chars().all(|c| {
        matches!(c, '\t' | '\n' | '\r') || (c >= ' ' && c != '\u{FFFE}' && c != '\u{FFFF}')
    });
    if ok {
        Ok(())
    } else {
        Err(MpdError::InvariantViolation {
            path: path.to_string(),
            message: format!("{value:?} contains characters not allowed in XML"),
        })
    }
}

fn check_descriptor(d: &Descriptor, allowed: &[Strength], path: &str) -> Result<(), MpdError> {
    if d.scheme_id_uri.is_empty() {
        return Err(MpdError::InvariantViolation {
            path: path.to_string(),
            message: "descriptor with empty schemeIdUri".into(),
        });
    }
    if !allowed.contains(&d.strength) {
        return Err(MpdError::InvariantViolation {
            path: path.to_string(),
            message: format!("descriptor {} has strength {:?} in the wrong list", d.scheme_id_uri, d.strength),
        });
    }
    check_text(&d.scheme_id_uri, path)?;
    check_text(&d.value, path)
}

// ---- parsing ----------------------------------------------------------------

fn is_dash(node: &Node, name: &str) -> bool {
    node.is_element()
        && node.tag_name().name() == name
        && matches!(node.tag_name().namespace(), None | Some(DASH_NS))
}

fn is_imac(node: &Node, name: &str) -> bool {
    node.is_element() && node.tag_name().name() == name && node.tag_name().namespace().is_some_and(is_imac_ns)
}

fn path_of(node: Node) -> String {
    element_path(node, &|n: &Node| n.attribute("id").map(|id| ("id".to_string(), id.to_string())))
}

pub fn parse_mpd(xml_text: &str) -> Result<MediaPresentation, MpdError> {
    parse_mpd_detailed(xml_text).map(|p| p.value)
}

/// Parses raw bytes; invalid UTF-8 is reported as malformed XML.
pub fn parse_mpd_bytes(bytes: &[u8]) -> Result<MediaPresentation, MpdError> {
    let text = std::str::from_utf8(bytes).map_err(|e| MpdError::MalformedXml(e.to_string()))?;
    parse_mpd(text)
}

pub fn parse_mpd_detailed(xml_text: &str) -> Result<Parsed<MediaPresentation>, MpdError> {
    let doc = Document::parse(xml_text).map_err(|e| MpdError::MalformedXml(e.to_string()))?;
    let mut p = MpdParser::default();
    let value = p.document(doc.root_element())?;
    if p.dropped_elements > 0 || p.dropped_attributes > 0 {
        p.warnings.push(ParseWarning {
            path: "/MPD".into(),
            message: [(p.dropped_elements, "element"), (p.dropped_attributes, "attribute")]
                .iter()
                .filter(|(n, _)| *n > 0)
                .map(|(n, what)| format!("{n} unmodeled {what}{}", if *n == 1 { "" } else { "s" }))
                .collect::<Vec<_>>()
                .join(" and ")
                + " dropped",
        });
    }
    Ok(Parsed {
        value,
        warnings: p.warnings,
    })
}

#[derive(Default)]
struct MpdParser {
    warnings: Vec<ParseWarning>,
    dropped_elements: usize,
    dropped_attributes: usize,
}

fn schema(node: Node, message: impl Into<String>) -> MpdError {
    MpdError::SchemaViolation {
        path: path_of(node),
        message: message.into(),
    }
}

impl MpdParser {
    fn warn(&mut self, node: Node, message: impl Into<String>) {
        self.warnings.push(ParseWarning {
            path: path_of(node),
            message: message.into(),
        });
    }

    fn drop_attributes(&mut self, node: Node, known: &[&str]) {
        self.dropped_attributes += node
            .attributes()
            .filter(|a| a.namespace().is_some() || !known.contains(&a.name()))
            .filter(|a| !a.namespace().is_some_and(is_imac_ns))
            .count();
    }

    fn document(&mut self, root: Node) -> Result<MediaPresentation, MpdError> {
        if !is_dash(&root, "MPD") {
            return Err(schema(root, format!("root element is {:?}, expected MPD", root.tag_name().name())));
        }
        let mut mp = MediaPresentation::default();
        for ns in root.namespaces() {
            let uri = ns.uri();
            match ns.name() {
                Some("xml") | None => {}
                Some(prefix) => {
                    if uri == IMAC_PLACEHOLDER_NS {
                        self.warn(root, format!("placeholder ImAc namespace URI {uri:?} accepted; canonical is {IMAC_NS:?}"));
                    }
                    if prefix == "imac" && !is_imac_ns(uri) {
                        self.warn(root, format!("prefix imac bound to foreign namespace {uri:?}; not kept"));
                    } else if uri != DASH_NS && !is_imac_ns(uri) {
                        mp.declared_namespaces.insert(prefix.to_string(), uri.to_string());
                    }
                }
            }
        }
        self.drop_attributes(root, &[]);

        let mut ids = BTreeSet::new();
        for period in root.children().filter(|n| n.is_element()) {
            if !is_dash(&period, "Period") {
                self.dropped_elements += 1;
                continue;
            }
            self.drop_attributes(period, &[]);
            for child in period.children().filter(|n| n.is_element()) {
                if is_dash(&child, "AdaptationSet") {
                    let set = self.adaptation_set(child)?;
                    if let Some(id) = &set.id {
                        if !ids.insert(id.clone()) {
                            return Err(schema(child, format!("duplicate AdaptationSet id {id:?}")));
                        }
                    }
                    mp.adaptation_sets.push(set);
                } else if is_dash(&child, "Preselection") {
                    mp.preselections.push(self.preselection(child)?);
                } else {
                    self.dropped_elements += 1;
                }
            }
        }
        Ok(mp)
    }

    fn descriptor(&mut self, node: Node, strength: Strength) -> Result<Descriptor, MpdError> {
        let scheme = node.attribute("schemeIdUri").unwrap_or("");
        if scheme.is_empty() {
            return Err(schema(node, "descriptor without schemeIdUri"));
        }
        self.drop_attributes(node, &["schemeIdUri", "value", "id"]);
        Ok(Descriptor::new(scheme, node.attribute("value").unwrap_or(""), strength))
    }

    fn adaptation_set(&mut self, node: Node) -> Result<AdaptationSet, MpdError> {
        let mut set = AdaptationSet {
            id: node.attribute("id").map(str::to_string),
            lang: node.attribute("lang").map(str::to_string),
            content_type: node.attribute("contentType").map(str::to_string),
            mime_type: node.attribute("mimeType").map(str::to_string),
            ..Default::default()
        };
        self.drop_attributes(node, &["id", "lang", "contentType", "mimeType", "codecs"]);
        let set_codecs = node.attribute("codecs");
        let mut set_channels = None;
        let mut rep_mime = None;
        for child in node.children().filter(|n| n.is_element()) {
            if is_dash(&child, "Role") {
                set.roles.push(self.descriptor(child, Strength::Plain)?);
            } else if is_dash(&child, "Accessibility") {
                set.accessibility.push(self.descriptor(child, Strength::Plain)?);
            } else if is_dash(&child, "SupplementalProperty") {
                set.supplemental_properties.push(self.descriptor(child, Strength::Supplemental)?);
            } else if is_dash(&child, "EssentialProperty") {
                set.essential_properties.push(self.descriptor(child, Strength::Essential)?);
            } else if is_dash(&child, "AudioChannelConfiguration") {
                set_channels = self.channel_count(child)?;
            } else if is_dash(&child, "Representation") {
                rep_mime = rep_mime.or(child.attribute("mimeType"));
                set.representations.push(self.representation(child)?);
            } else if is_imac(&child, "AudioDescription") {
                self.warn(child, "imac:AudioDescription is only read on Representation; ignored here");
            } else {
                self.dropped_elements += 1;
            }
        }
        if set.representations.is_empty() {
            return Err(schema(node, "AdaptationSet has no Representation"));
        }
        if set.mime_type.is_none() {
            set.mime_type = rep_mime.map(str::to_string);
        }
        for rep in &mut set.representations {
            if rep.codecs.is_none() {
                rep.codecs = set_codecs.map(str::to_string);
            }
            if rep.audio_channel_count.is_none() {
                rep.audio_channel_count = set_channels;
            }
        }
        Ok(set)
    }

    fn channel_count(&mut self, node: Node) -> Result<Option<u32>, MpdError> {
        let scheme = node.attribute("schemeIdUri").unwrap_or("");
        let value = node.attribute("value").unwrap_or("");
        let numeric = !value.is_empty() && value.bytes().all(|b| b.is_ascii_digit());
        if scheme != AUDIO_CHANNEL_CONFIGURATION_SCHEME && !numeric {
            self.warn(node, format!("channel configuration {scheme:?}={value:?} not interpreted"));
            return Ok(None);
        }
        match value.parse::<u32>() {
            Ok(n) if n >= 1 => Ok(Some(n)),
            _ => Err(schema(node, format!("invalid channel count {value:?}"))),
        }
    }

    fn ad_variant(&mut self, node: Node, gain: Option<&str>, mode: Option<&str>, narrative: Option<&str>) -> Result<Option<AdVariant>, MpdError> {
        match (gain, mode) {
            (None, None) => {
                if narrative.is_some() {
                    self.warn(node, "AD narrative without gain/mode ignored");
                }
                Ok(None)
            }
            (Some(g), Some(m)) => Ok(Some(AdVariant {
                gain: AdGain::parse(g),
                mode: AdMode::parse(m),
                narrative: narrative.map(str::to_string),
            })),
            _ => Err(schema(node, "AD variant needs both gain and mode")),
        }
    }

    fn representation(&mut self, node: Node) -> Result<Representation, MpdError> {
        let imac_attr = |name: &str| {
            node.attributes()
                .find(|a| a.namespace().is_some_and(is_imac_ns) && a.name() == name)
                .map(|a| a.value())
        };
        let bandwidth = node
            .attribute("bandwidth")
            .map(|b| b.trim().parse::<u64>().map_err(|_| schema(node, format!("invalid bandwidth {b:?}"))))
            .transpose()?;
        let mut rep = Representation {
            id: node.attribute("id").unwrap_or("").to_string(),
            bandwidth,
            codecs: node.attribute("codecs").map(str::to_string),
            dependency_ids: node
                .attribute("dependencyId")
                .map(|v| v.split_whitespace().map(str::to_string).collect())
                .unwrap_or_default(),
            ..Default::default()
        };
        if node.attribute("id").is_none() {
            self.warn(node, "Representation without id");
        }
        if node.attribute("dependencyId").is_some_and(|v| v.trim().is_empty()) {
            return Err(schema(node, "empty dependencyId"));
        }
        self.drop_attributes(node, &["id", "bandwidth", "codecs", "dependencyId", "mimeType"]);
        let from_attrs = self.ad_variant(node, imac_attr("gain"), imac_attr("mode"), imac_attr("narrative"))?;
        let mut from_child = None;
        let mut base_url = None;
        for child in node.children().filter(|n| n.is_element()) {
            if is_imac(&child, "AudioDescription") {
                if from_child.is_some() {
                    return Err(schema(child, "more than one imac:AudioDescription"));
                }
                from_child = self.ad_variant(
                    child,
                    child.attribute("gain"),
                    child.attribute("mode"),
                    child.attribute("narrative"),
                )?;
            } else if is_dash(&child, "AudioChannelConfiguration") {
                rep.audio_channel_count = self.channel_count(child)?;
            } else if is_dash(&child, "SupplementalProperty") {
                rep.descriptors.push(self.descriptor(child, Strength::Supplemental)?);
            } else if is_dash(&child, "EssentialProperty") {
                rep.descriptors.push(self.descriptor(child, Strength::Essential)?);
            } else if is_dash(&child, "BaseURL") {
                let text: String = child.children().filter(|c| c.is_text()).filter_map(|c| c.text()).collect();
                base_url = Some(text);
            } else {
                self.dropped_elements += 1;
            }
        }
        rep.base_url = base_url;
        rep.imac_ad = match (from_attrs, from_child) {
            (Some(a), Some(c)) if a != c => {
                return Err(schema(node, "AD variant attributes disagree with imac:AudioDescription"))
            }
            (a, c) => c.or(a),
        };
        Ok(rep)
    }

    fn preselection(&mut self, node: Node) -> Result<Preselection, MpdError> {
        let components: Vec<String> = node
            .attribute("preselectionComponents")
            .unwrap_or("")
            .split_whitespace()
            .map(str::to_string)
            .collect();
        if components.is_empty() {
            return Err(schema(node, "Preselection without components"));
        }
        if components.iter().collect::<BTreeSet<_>>().len() != components.len() {
            return Err(schema(node, "duplicate preselection component"));
        }
        self.drop_attributes(node, &["id", "preselectionComponents", "lang"]);
        Ok(Preselection {
            id: node.attribute("id").map(str::to_string),
            component_ids: components,
            lang: node.attribute("lang").map(str::to_string),
        })
    }
}

// ---- serialization ----------------------------------------------------------

fn descriptor_attrs(d: &Descriptor) -> Vec<(&'static str, String)> {
    vec![("schemeIdUri", d.scheme_id_uri.clone()), ("value", d.value.clone())]
}

/// Writes `mp` as an MPD document with a single Period.
pub fn serialize_mpd(mp: &MediaPresentation) -> Result<String, MpdError> {
    mp.check()?;
    let mut w = Writer::new();
    let xmlns: Vec<(String, String)> = std::iter::once(("xmlns".to_string(), DASH_NS.to_string()))
        .chain(std::iter::once(("xmlns:imac".to_string(), IMAC_NS.to_string())))
        .chain(mp.declared_namespaces.iter().map(|(p, u)| (format!("xmlns:{p}"), u.clone())))
        .collect();
    let mut root: Vec<(&str, String)> = xmlns.iter().map(|(k, v)| (k.as_str(), v.clone())).collect();
    root.push(("type", "static".to_string()));
    w.start("MPD", &root);
    w.start("Period", &[]);
    for set in &mp.adaptation_sets {
        let mut attrs = Vec::new();
        for (name, value) in [
            ("id", &set.id),
            ("lang", &set.lang),
            ("contentType", &set.content_type),
            ("mimeType", &set.mime_type),
        ] {
            if let Some(v) = value {
                attrs.push((name, v.clone()));
            }
        }
        w.start("AdaptationSet", &attrs);
        for d in set.essential_properties.iter().chain(&set.supplemental_properties) {
            w.empty(d.element_name(), &descriptor_attrs(d));
        }
        for d in &set.accessibility {
            w.empty("Accessibility", &descriptor_attrs(d));
        }
        for d in &set.roles {
            w.empty("Role", &descriptor_attrs(d));
        }
        for rep in &set.representations {
            let mut attrs = vec![("id", rep.id.clone())];
            if let Some(b) = rep.bandwidth {
                attrs.push(("bandwidth", b.to_string()));
            }
            if let Some(c) = &rep.codecs {
                attrs.push(("codecs", c.clone()));
            }
            if !rep.dependency_ids.is_empty() {
                attrs.push(("dependencyId", rep.dependency_ids.join(" ")));
            }
            w.start("Representation", &attrs);
            if let Some(ad) = &rep.imac_ad {
                let mut a = vec![("gain", ad.gain.to_string()), ("mode", ad.mode.to_string())];
                if let Some(n) = &ad.narrative {
                    a.push(("narrative", n.clone()));
                }
                w.empty("imac:AudioDescription", &a);
            }
            if let Some(n) = rep.audio_channel_count {
                w.empty(
                    "AudioChannelConfiguration",
                    &[
                        ("schemeIdUri", AUDIO_CHANNEL_CONFIGURATION_SCHEME.to_string()),
                        ("value", n.to_string()),
                    ],
                );
            }
            for d in &rep.descriptors {
                w.empty(d.element_name(), &descriptor_attrs(d));
            }
            if let Some(url) = &rep.base_url {
                w.inline("BaseURL", &[], &crate::xml::escape(url));
            }
            w.end("Representation");
        }
        w.end("AdaptationSet");
    }
    for p in &mp.preselections {
        let mut attrs = Vec::new();
        if let Some(id) = &p.id {
            attrs.push(("id", id.clone()));
        }
        attrs.push(("preselectionComponents", p.component_ids.join(" ")));
        if let Some(l) = &p.lang {
            attrs.push(("lang", l.clone()));
        }
        w.empty("Preselection", &attrs);
    }
    w.end("Period");
    w.end("MPD");
    Ok(w.finish())
}
