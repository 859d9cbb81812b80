//! Headless presentation simulator.
//!
//! Given a manifest, sidecar documents, user preferences and a viewport
//! trace, decides at every trace sample what a player shows: the subtitle
//! text and its speaker indicator, and the signer window state.

use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::catalog::{classify, select_streams, SelectError};
use crate::geometry::{indicator_for, wrap_degrees, GeometryError, IndicatorCue, IndicatorStyle, ViewportState};
use crate::mpd::{AdGain, AdMode, MediaPresentation};
use crate::timed_text::{latest_active_cue, signer_state, Color, CueDocument, MediaTime};

fn arrow() -> IndicatorStyle {
    IndicatorStyle::Arrow
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct SubtitlePreference {
    #[serde(default)]
    pub lang: Option<String>,
    #[serde(default)]
    pub easy_to_read: bool,
    #[serde(default = "arrow")]
    pub indicator_style: IndicatorStyle,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct AudioDescriptionPreference {
    #[serde(default)]
    pub lang: Option<String>,
    #[serde(default)]
    pub gain: Option<AdGain>,
    #[serde(default)]
    pub mode: Option<AdMode>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct SpokenSubtitlePreference {
    #[serde(default)]
    pub lang: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct SignLanguagePreference {
    pub sign_lang: String,
    #[serde(default)]
    pub hide_when_inactive: bool,
    /// Style of the indicator pointing at the signed speaker.
    #[serde(default = "arrow")]
    pub indicator_style: IndicatorStyle,
}

/// Which access services the user wants. Absent means off.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct UserPreferences {
    #[serde(default)]
    pub subtitle: Option<SubtitlePreference>,
    #[serde(default)]
    pub audio_description: Option<AudioDescriptionPreference>,
    #[serde(default)]
    pub spoken_subtitles: Option<SpokenSubtitlePreference>,
    #[serde(default)]
    pub sign_language: Option<SignLanguagePreference>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TraceSample {
    pub t: MediaTime,
    pub yaw: f64,
    pub pitch: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ViewportTrace {
    pub hfov: f64,
    pub vfov: f64,
    pub samples: Vec<TraceSample>,
}

impl ViewportTrace {
    /// Viewport states for every sample; yaw is wrapped, everything else
    /// must already be in range.
    pub fn viewports(&self) -> Result<Vec<ViewportState>, SimError> {
        for (i, w) in self.samples.windows(2).enumerate() {
            if w[1].t <= w[0].t {
                return Err(SimError::BadTrace(format!("sample {} at {} does not follow {}", i + 1, w[1].t, w[0].t)));
            }
        }
        self.samples
            .iter()
            .map(|s| {
                let yaw = if s.yaw.is_finite() { wrap_degrees(s.yaw) } else { s.yaw };
                ViewportState::new(yaw, s.pitch, self.hfov, self.vfov).map_err(SimError::Viewport)
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct StreamSelection {
    pub subtitle_as: Option<String>,
    pub audio_as: Option<String>,
    pub sl_video_as: Option<String>,
    pub sl_metadata_as: Option<String>,
    /// Selected representations per selected set.
    pub representation_ids: BTreeMap<String, Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SubtitleDirective {
    pub text: String,
    pub color: Option<Color>,
    pub indicator: Option<IndicatorCue>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SignerDirective {
    pub visible: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub color: Option<Color>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub indicator: Option<IndicatorCue>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RenderDirective {
    pub t: MediaTime,
    pub subtitle: Option<SubtitleDirective>,
    pub signer: Option<SignerDirective>,
    pub selected_streams: StreamSelection,
}

#[derive(Debug, Error)]
pub enum SimError {
    #[error("stream selection failed: {0}")]
    SelectionFailed(#[from] SelectError),
    #[error("no cue document supplied for AdaptationSet {0:?}")]
    MissingDocument(String),
    #[error("invalid trace: {0}")]
    BadTrace(String),
    #[error("invalid viewport: {0}")]
    Viewport(GeometryError),
}

/// Runs the presentation over `trace`, one directive per sample.
pub fn simulate(
    mp: &MediaPresentation,
    docs: &BTreeMap<String, CueDocument>,
    prefs: &UserPreferences,
    trace: &ViewportTrace,
) -> Result<Vec<RenderDirective>, SimError> {
    let selection = select_streams(&classify(mp), mp, prefs)?.selection;
    let doc_for = |id: &Option<String>| -> Result<Option<&CueDocument>, SimError> {
        match id {
            None => Ok(None),
            Some(id) => docs.get(id).map(Some).ok_or_else(|| SimError::MissingDocument(id.clone())),
        }
    };
    let subtitle_doc = doc_for(&selection.subtitle_as)?;
    let signer_doc = doc_for(&selection.sl_metadata_as)?;
    let viewports = trace.viewports()?;

    let mut out = Vec::with_capacity(trace.samples.len());
    for (sample, viewport) in trace.samples.iter().zip(&viewports) {
        let t = sample.t;
        let subtitle = subtitle_doc.zip(prefs.subtitle.as_ref()).and_then(|(doc, p)| {
            latest_active_cue(doc, t).map(|cue| SubtitleDirective {
                text: cue.text(),
                color: doc.resolve_color(cue),
                indicator: cue.direction().map(|d| indicator_for(viewport, d, p.indicator_style)),
            })
        });
        let signer = signer_doc.zip(prefs.sign_language.as_ref()).map(|(doc, p)| {
            let state = signer_state(doc, t);
            if state.active {
                SignerDirective {
                    visible: true,
                    label: state.speaker_name,
                    color: state.color,
                    indicator: state.direction.map(|d| indicator_for(viewport, d, p.indicator_style)),
                }
            } else {
                SignerDirective {
                    visible: !p.hide_when_inactive,
                    label: None,
                    color: None,
                    indicator: None,
                }
            }
        });
        out.push(RenderDirective {
            t,
            subtitle,
            signer,
            selected_streams: selection.clone(),
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
}

#[derive(Debug, Error)]
pub enum WriteError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

const CSV_HEADER: [&str; 14] = [
    "t",
    "subtitle_text",
    "subtitle_color",
    "subtitle_indicator",
    "subtitle_relative_azimuth",
    "signer_visible",
    "signer_label",
    "signer_color",
    "signer_indicator",
    "signer_relative_azimuth",
    "subtitle_as",
    "audio_as",
    "sl_video_as",
    "sl_metadata_as",
];

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

/// Writes the directives as a pretty JSON array or as one CSV row per
/// sample. Absent values are empty CSV cells.
pub fn write_directives(dirs: &[RenderDirective], format: OutputFormat, out: &mut dyn Write) -> Result<(), WriteError> {
    match format {
        OutputFormat::Json => {
            serde_json::to_writer_pretty(&mut *out, dirs)?;
        }
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(&mut *out);
            w.write_record(CSV_HEADER)?;
            for d in dirs {
                let sub = d.subtitle.as_ref();
                let sub_ind = sub.and_then(|s| s.indicator);
                let sig = d.signer.as_ref();
                let sig_ind = sig.and_then(|s| s.indicator);
                let s = &d.selected_streams;
                w.write_record([
                    d.t.to_string(),
                    opt(sub.map(|s| &s.text)),
                    opt(sub.and_then(|s| s.color)),
                    opt(sub_ind.map(|i| i.kind.as_str())),
                    opt(sub_ind.map(|i| i.relative_azimuth)),
                    opt(sig.map(|s| s.visible)),
                    opt(sig.and_then(|s| s.label.as_ref())),
                    opt(sig.and_then(|s| s.color)),
                    opt(sig_ind.map(|i| i.kind.as_str())),
                    opt(sig_ind.map(|i| i.relative_azimuth)),
                    opt(s.subtitle_as.as_ref()),
                    opt(s.audio_as.as_ref()),
                    opt(s.sl_video_as.as_ref()),
                    opt(s.sl_metadata_as.as_ref()),
                ])?;
            }
            w.flush()?;
        }
    }
    Ok(())
}
