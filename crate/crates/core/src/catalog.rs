//! Classification of a presentation into access services, the signaling
//! rule checks, and stream selection from user preferences.
//!
//! Rule ids:
//!
//! | id  | severity | check |
//! |-----|----------|-------|
//! | R1  | error    | sign-language video without a resolvable metadata link |
//! | R2  | error    | sign-metadata set with the wrong mimeType or contentType |
//! | R3  | error    | receiver-mix audio without (resolvable) dependencyId |
//! | R4  | error    | AD gain/mode outside the vocabulary |
//! | R5  | warning  | TVA AudioPurpose value that is not a positive integer |
//! | R6  | error    | ambi-map strength, placement or channel count |
//! | R7  | warning  | easy-to-read on a set that is not a subtitle service |
//! | R8  | error    | sidecar direction attribute out of range |
//! | R9  | warning  | sidecar labeled easy-to-read but the set is not |
//! | R10 | warning  | overlapping signer segments in a sidecar |
//! | R11 | info     | draft sign-language Accessibility descriptor |
//! | R12 | warning  | sidecar keyed by an unknown AdaptationSet id |

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ambisonics::{self, AmbisonicChannelMap};
use crate::mpd::{
    AdGain, AdMode, AdVariant, AdaptationSet, MediaPresentation, AUDIO_PURPOSE_SCHEME, IMAC_ACCESS_SCHEME,
    ROLE_SCHEME, SIGNER_METADATA_LINK_SCHEME,
};
use crate::report::{Finding, Severity};
use crate::sim::{StreamSelection, UserPreferences};
use crate::timed_text::CueDocument;

pub const EASY_TO_READ: &str = "easy-to-read";
pub const AUDIO_SUBTITLES: &str = "audio-subtitles";
pub const AUDIO_DESCRIPTION: &str = "audio-description";
pub const SIGN_ROLE: &str = "sign";
pub const SIGN_METADATA_ROLE: &str = "sign-metadata";
pub const TTML_MIME: &str = "application/ttml+xml";
const CLASSIFY_ID: &str = "classify";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum SubtitleRole {
    Main,
    Alternate,
    Commentary,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SubtitleService {
    pub adaptation_set_id: String,
    pub lang: Option<String>,
    pub role: SubtitleRole,
    pub hard_of_hearing: bool,
    pub easy_to_read: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum AudioKind {
    MainAudio,
    AudioDescription,
    SpokenSubtitles,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Mix {
    BroadcastMix,
    ReceiverMix,
    NotApplicable,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct AdVariantEntry {
    pub representation_id: String,
    #[serde(flatten)]
    pub variant: AdVariant,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct AudioService {
    pub adaptation_set_id: String,
    pub lang: Option<String>,
    pub kind: AudioKind,
    pub mix: Mix,
    pub variants: Vec<AdVariantEntry>,
    pub ambisonic: Option<AmbisonicChannelMap>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SignLanguageService {
    pub video_adaptation_set_id: String,
    pub metadata_adaptation_set_id: String,
    pub sign_lang: String,
    pub metadata_lang: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct AccessServiceCatalog {
    pub subtitles: Vec<SubtitleService>,
    pub audio: Vec<AudioService>,
    pub sign_language: Vec<SignLanguageService>,
    pub warnings: Vec<Finding>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ValidationReport {
    pub findings: Vec<Finding>,
}

impl ValidationReport {
    pub fn has_errors(&self) -> bool {
        self.count(Severity::Error) > 0
    }

    pub fn count(&self, severity: Severity) -> usize {
        self.findings.iter().filter(|f| f.severity == severity).count()
    }

    pub fn rule_ids(&self) -> BTreeSet<&str> {
        self.findings.iter().map(|f| f.rule_id.as_str()).collect()
    }
}

// ---- shared predicates --------------------------------------------------------

fn role_value(set: &AdaptationSet) -> Option<&str> {
    set.roles.iter().find(|d| d.scheme_id_uri == ROLE_SCHEME).map(|d| d.value.as_str())
}

fn is_sign_video(set: &AdaptationSet) -> bool {
    set.has_role(ROLE_SCHEME, SIGN_ROLE)
}

fn is_sign_metadata(set: &AdaptationSet) -> bool {
    set.has_role(IMAC_ACCESS_SCHEME, SIGN_METADATA_ROLE)
}

fn is_subtitle(set: &AdaptationSet) -> bool {
    match set.mime_type.as_deref() {
        Some("application/mp4") => set.codecs().any(|c| c.starts_with("stpp")),
        Some(TTML_MIME) => !is_sign_metadata(set),
        _ => false,
    }
}

fn is_audio(set: &AdaptationSet) -> bool {
    set.mime_type.as_deref() == Some("audio/mp4")
}

fn is_video(set: &AdaptationSet) -> bool {
    set.mime_type.as_deref().is_some_and(|m| m.starts_with("video/")) || set.content_type.as_deref() == Some("video")
}

fn tva_values(set: &AdaptationSet) -> impl Iterator<Item = &str> {
    set.accessibility
        .iter()
        .filter(|d| d.scheme_id_uri == AUDIO_PURPOSE_SCHEME)
        .map(|d| d.value.as_str())
}

fn signer_link(set: &AdaptationSet) -> Option<&str> {
    set.properties()
        .find(|d| d.scheme_id_uri == SIGNER_METADATA_LINK_SCHEME)
        .map(|d| d.value.as_str())
}

// ---- classification -------------------------------------------------------------

/// Assigns each adaptation set to at most one service. Problems become
/// warnings; classification itself never fails.
pub fn classify(mp: &MediaPresentation) -> AccessServiceCatalog {
    let mut cat = AccessServiceCatalog::default();
    let mut claimed: BTreeSet<&str> = BTreeSet::new();

    // Sign-language pairs first, so their metadata sets are not offered as
    // subtitles or reported as unclassified.
    for (i, set) in mp.adaptation_sets.iter().enumerate() {
        if !is_sign_video(set) {
            continue;
        }
        let path = mp.adaptation_set_path(i);
        let Some(video_id) = set.id.as_deref() else {
            cat.warnings.push(Finding::warning(CLASSIFY_ID, path, "sign-language video set without id"));
            continue;
        };
        let Some(meta_id) = signer_link(set) else {
            cat.warnings.push(Finding::warning(CLASSIFY_ID, path, "sign-language video without metadata link"));
            continue;
        };
        let Some(meta) = mp.adaptation_set(meta_id).filter(|m| is_sign_metadata(m)) else {
            cat.warnings.push(Finding::warning(
                CLASSIFY_ID,
                path,
                format!("metadata link {meta_id:?} does not name a sign-metadata set"),
            ));
            continue;
        };
        let Some(sign_lang) = set.lang.clone() else {
            cat.warnings.push(Finding::warning(CLASSIFY_ID, path, "sign-language video without lang"));
            continue;
        };
        claimed.insert(video_id);
        claimed.insert(meta_id);
        cat.sign_language.push(SignLanguageService {
            video_adaptation_set_id: video_id.to_string(),
            metadata_adaptation_set_id: meta_id.to_string(),
            sign_lang,
            metadata_lang: meta.lang.clone(),
        });
    }

    for (i, set) in mp.adaptation_sets.iter().enumerate() {
        let path = mp.adaptation_set_path(i);
        if set.id.as_deref().is_some_and(|id| claimed.contains(id)) {
            continue;
        }
        let recognised = is_subtitle(set) || is_audio(set);
        let Some(id) = set.id.clone() else {
            if recognised {
                cat.warnings.push(Finding::warning(CLASSIFY_ID, path, "access set without id cannot be selected"));
            }
            continue;
        };
        if is_subtitle(set) {
            let role = match role_value(set) {
                Some("alternate") => SubtitleRole::Alternate,
                Some("commentary") => SubtitleRole::Commentary,
                None | Some("main" | "subtitle" | "caption") => SubtitleRole::Main,
                Some(other) => {
                    cat.warnings.push(Finding::warning(
                        CLASSIFY_ID,
                        &path,
                        format!("subtitle role {other:?} treated as main"),
                    ));
                    SubtitleRole::Main
                }
            };
            cat.subtitles.push(SubtitleService {
                adaptation_set_id: id,
                lang: set.lang.clone(),
                role,
                hard_of_hearing: set.has_accessibility(AUDIO_PURPOSE_SCHEME, "2"),
                easy_to_read: set.has_accessibility(IMAC_ACCESS_SCHEME, EASY_TO_READ),
            });
        } else if is_audio(set) {
            cat.audio.push(classify_audio(set, id, &path, &mut cat.warnings));
        } else if is_sign_metadata(set) {
            cat.warnings.push(Finding::warning(
                CLASSIFY_ID,
                path,
                "sign-metadata set not linked from any sign-language video",
            ));
        } else if !is_video(set) || is_sign_video(set) {
            cat.warnings.push(Finding::warning(CLASSIFY_ID, path, "set matches no access service"));
        }
    }
    cat
}

fn classify_audio(set: &AdaptationSet, id: String, path: &str, warnings: &mut Vec<Finding>) -> AudioService {
    let tva: Vec<&str> = tva_values(set).collect();
    let kind = if tva.contains(&"1") {
        if set.has_accessibility(IMAC_ACCESS_SCHEME, AUDIO_SUBTITLES) {
            AudioKind::SpokenSubtitles
        } else {
            AudioKind::AudioDescription
        }
    } else {
        if let Some(v) = tva.first() {
            warnings.push(Finding::warning(
                CLASSIFY_ID,
                path,
                format!("audio purpose {v:?} is not an audio access service; treated as main audio"),
            ));
        }
        AudioKind::MainAudio
    };
    let mix = match (kind, role_value(set)) {
        (AudioKind::MainAudio, _) => Mix::NotApplicable,
        (_, Some("alternate")) => Mix::BroadcastMix,
        (_, Some("commentary")) => Mix::ReceiverMix,
        (_, other) => {
            warnings.push(Finding::warning(
                CLASSIFY_ID,
                path,
                format!("access audio role {other:?} names neither broadcast nor receiver mix"),
            ));
            Mix::NotApplicable
        }
    };
    if mix == Mix::ReceiverMix && set.representations.iter().all(|r| r.dependency_ids.is_empty()) {
        warnings.push(Finding::warning(CLASSIFY_ID, path, "receiver-mix audio without dependencyId"));
    }
    let variants = set
        .representations
        .iter()
        .filter_map(|r| {
            r.imac_ad.clone().map(|variant| AdVariantEntry {
                representation_id: r.id.clone(),
                variant,
            })
        })
        .collect();
    let ambisonic = set
        .properties()
        .find_map(AmbisonicChannelMap::from_descriptor)
        .and_then(Result::ok);
    AudioService {
        adaptation_set_id: id,
        lang: set.lang.clone(),
        kind,
        mix,
        variants,
        ambisonic,
    }
}

// ---- validation ----------------------------------------------------------------

fn is_positive_integer(v: &str) -> bool {
    !v.is_empty() && v.bytes().all(|b| b.is_ascii_digit()) && !v.trim_start_matches('0').is_empty()
}

/// Applies every rule to the presentation and the supplied sidecar
/// documents, keyed by AdaptationSet id. All findings are reported.
pub fn validate(mp: &MediaPresentation, sidecars: &BTreeMap<String, CueDocument>) -> ValidationReport {
    let mut f = Vec::new();
    let rep_ids: BTreeSet<&str> = mp
        .adaptation_sets
        .iter()
        .flat_map(|s| s.representations.iter().map(|r| r.id.as_str()))
        .collect();

    for (i, set) in mp.adaptation_sets.iter().enumerate() {
        let path = mp.adaptation_set_path(i);

        if is_sign_video(set) {
            match signer_link(set) {
                None => f.push(Finding::error("R1", &path, "sign-language video has no signer-metadata link")),
                Some(target) => match mp.adaptation_set(target) {
                    None => f.push(Finding::error(
                        "R1",
                        &path,
                        format!("signer-metadata link {target:?} names no AdaptationSet"),
                    )),
                    Some(m) if !is_sign_metadata(m) => f.push(Finding::error(
                        "R1",
                        &path,
                        format!("signer-metadata link {target:?} names a set without the sign-metadata role"),
                    )),
                    Some(_) => {}
                },
            }
        }

        if is_sign_metadata(set) {
            if set.mime_type.as_deref() != Some(TTML_MIME) {
                f.push(Finding::error(
                    "R2",
                    &path,
                    format!("sign-metadata mimeType is {:?}, expected {TTML_MIME:?}", set.mime_type.as_deref().unwrap_or("")),
                ));
            }
            if let Some(ct) = set.content_type.as_deref().filter(|ct| *ct != "application") {
                f.push(Finding::error("R2", &path, format!("sign-metadata contentType is {ct:?}, expected \"application\"")));
            }
        }

        if is_audio(set) && role_value(set) == Some("commentary") {
            if set.representations.iter().all(|r| r.dependency_ids.is_empty()) {
                f.push(Finding::error("R3", &path, "receiver-mix audio has no representation with dependencyId"));
            }
            for (j, rep) in set.representations.iter().enumerate() {
                for dep in &rep.dependency_ids {
                    if !rep_ids.contains(dep.as_str()) {
                        f.push(Finding::error(
                            "R3",
                            mp.representation_path(i, j),
                            format!("dependencyId {dep:?} names no Representation"),
                        ));
                    }
                }
            }
        }

        for (j, rep) in set.representations.iter().enumerate() {
            if let Some(ad) = &rep.imac_ad {
                if let AdGain::Other(g) = &ad.gain {
                    f.push(Finding::error("R4", mp.representation_path(i, j), format!("AD gain {g:?} is not low, medium or high")));
                }
                if let AdMode::Other(m) = &ad.mode {
                    f.push(Finding::error(
                        "R4",
                        mp.representation_path(i, j),
                        format!("AD mode {m:?} is not classic, static or dynamic"),
                    ));
                }
            }
        }

        for v in tva_values(set) {
            if !is_positive_integer(v) {
                f.push(Finding::warning("R5", &path, format!("AudioPurpose value {v:?} is not a positive integer")));
            }
        }

        if ambisonics::has_channel_map(set) {
            f.extend(ambisonics::validate_map(set, &path));
        }

        let easy = set.has_accessibility(IMAC_ACCESS_SCHEME, EASY_TO_READ);
        if easy && !is_subtitle(set) {
            f.push(Finding::warning("R7", &path, "easy-to-read signaled on a set that is not a subtitle service"));
        }

        if set.has_accessibility(ROLE_SCHEME, SIGN_ROLE) {
            f.push(Finding::info(
                "R11",
                &path,
                "Accessibility with role value \"sign\" is a draft signal; the Role element identifies the service",
            ));
        }

        if let Some(doc) = set.id.as_deref().and_then(|id| sidecars.get(id)) {
            let id = set.id.as_deref().unwrap_or_default();
            for v in &doc.range_violations {
                f.push(Finding::error(
                    "R8",
                    &v.path,
                    format!("sidecar for {id:?}: {}={:?} out of range in cue {:?}", v.attribute, v.value, v.cue_id),
                ));
            }
            if doc.easy_to_read_content_type && !easy {
                f.push(Finding::warning(
                    "R9",
                    &path,
                    "sidecar is labeled easy-to-read but the AdaptationSet does not signal it",
                ));
            }
            if is_sign_metadata(set) {
                for (a, b) in doc.overlapping_cues() {
                    f.push(Finding::warning("R10", &path, format!("signer segments {a:?} and {b:?} overlap")));
                }
            }
        }
    }

    for key in sidecars.keys() {
        if mp.adaptation_set(key).is_none() {
            f.push(Finding::warning("R12", "/MPD", format!("sidecar supplied for unknown AdaptationSet {key:?}")));
        }
    }
    ValidationReport { findings: f }
}

// ---- selection -----------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SelectError {
    #[error("no {service} stream matches {criteria}")]
    NoMatch { service: String, criteria: String },
    #[error("audio description and spoken subtitles cannot both be requested")]
    ConflictingAudioRequest,
}

/// A selection together with the notes produced while making it.
#[derive(Debug, Clone, PartialEq)]
pub struct Selected {
    pub selection: StreamSelection,
    pub warnings: Vec<String>,
}

struct Criteria(Vec<String>);

impl Criteria {
    fn new() -> Self {
        Criteria(Vec::new())
    }

    fn add(&mut self, key: &str, value: Option<impl fmt::Display>) {
        if let Some(v) = value {
            self.0.push(format!("{key}={v}"));
        }
    }
}

impl fmt::Display for Criteria {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            f.write_str("any")
        } else {
            f.write_str(&self.0.join(", "))
        }
    }
}

fn lang_ok(want: &Option<String>, have: &Option<String>) -> bool {
    want.is_none() || want == have
}

/// Picks the lexicographically smallest id among tied candidates.
fn pick<'a, T>(
    service: &str,
    criteria: Criteria,
    mut candidates: Vec<(&'a str, T)>,
    warnings: &mut Vec<String>,
) -> Result<(&'a str, T), SelectError> {
    candidates.sort_by(|a, b| a.0.cmp(b.0));
    if candidates.len() > 1 {
        let ids: Vec<&str> = candidates.iter().map(|c| c.0).collect();
        warnings.push(format!("{service}: {} sets tie ({}); chose {:?}", ids.len(), ids.join(", "), ids[0]));
    }
    candidates.into_iter().next().ok_or_else(|| SelectError::NoMatch {
        service: service.to_string(),
        criteria: criteria.to_string(),
    })
}

/// Resolves the requested services to concrete sets and representations.
pub fn select_streams(cat: &AccessServiceCatalog, mp: &MediaPresentation, prefs: &UserPreferences) -> Result<Selected, SelectError> {
    let mut sel = StreamSelection::default();
    let mut warnings = Vec::new();
    let all_reps = |id: &str| -> Vec<String> {
        mp.adaptation_set(id)
            .map(|s| s.representations.iter().map(|r| r.id.clone()).collect())
            .unwrap_or_default()
    };

    if prefs.audio_description.is_some() && prefs.spoken_subtitles.is_some() {
        return Err(SelectError::ConflictingAudioRequest);
    }

    if let Some(p) = &prefs.subtitle {
        let mut c = Criteria::new();
        c.add("lang", p.lang.as_ref());
        c.add("easyToRead", Some(p.easy_to_read));
        let candidates = cat
            .subtitles
            .iter()
            .filter(|s| lang_ok(&p.lang, &s.lang) && s.easy_to_read == p.easy_to_read)
            .map(|s| (s.adaptation_set_id.as_str(), ()))
            .collect();
        let (id, ()) = pick("subtitle", c, candidates, &mut warnings)?;
        sel.subtitle_as = Some(id.to_string());
        sel.representation_ids.insert(id.to_string(), all_reps(id));
    }

    if let Some(p) = &prefs.audio_description {
        let mut c = Criteria::new();
        c.add("lang", p.lang.as_ref());
        c.add("gain", p.gain.as_ref());
        c.add("mode", p.mode.as_ref());
        let candidates = cat
            .audio
            .iter()
            .filter(|a| a.kind == AudioKind::AudioDescription && lang_ok(&p.lang, &a.lang))
            .filter_map(|a| {
                let reps: Vec<String> = a
                    .variants
                    .iter()
                    .filter(|v| p.gain.as_ref().is_none_or(|g| *g == v.variant.gain))
                    .filter(|v| p.mode.as_ref().is_none_or(|m| *m == v.variant.mode))
                    .map(|v| v.representation_id.clone())
                    .collect();
                let unconstrained = p.gain.is_none() && p.mode.is_none();
                match (reps.is_empty(), unconstrained) {
                    (false, _) => Some((a.adaptation_set_id.as_str(), reps)),
                    (true, true) => Some((a.adaptation_set_id.as_str(), all_reps(&a.adaptation_set_id))),
                    (true, false) => None,
                }
            })
            .collect();
        let (id, reps) = pick("audio description", c, candidates, &mut warnings)?;
        sel.audio_as = Some(id.to_string());
        sel.representation_ids.insert(id.to_string(), reps);
    }

    if let Some(p) = &prefs.spoken_subtitles {
        let mut c = Criteria::new();
        c.add("lang", p.lang.as_ref());
        let candidates = cat
            .audio
            .iter()
            .filter(|a| a.kind == AudioKind::SpokenSubtitles && lang_ok(&p.lang, &a.lang))
            .map(|a| (a.adaptation_set_id.as_str(), ()))
            .collect();
        let (id, ()) = pick("spoken subtitles", c, candidates, &mut warnings)?;
        sel.audio_as = Some(id.to_string());
        sel.representation_ids.insert(id.to_string(), all_reps(id));
    }

    if let Some(p) = &prefs.sign_language {
        let mut c = Criteria::new();
        c.add("signLang", Some(&p.sign_lang));
        let candidates = cat
            .sign_language
            .iter()
            .filter(|s| s.sign_lang == p.sign_lang)
            .map(|s| (s.video_adaptation_set_id.as_str(), s.metadata_adaptation_set_id.as_str()))
            .collect();
        let (video, meta) = pick("sign language", c, candidates, &mut warnings)?;
        sel.sl_video_as = Some(video.to_string());
        sel.sl_metadata_as = Some(meta.to_string());
        sel.representation_ids.insert(video.to_string(), all_reps(video));
        sel.representation_ids.insert(meta.to_string(), all_reps(meta));
    }

    Ok(Selected { selection: sel, warnings })
}
