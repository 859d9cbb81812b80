use super::{CueDocument, SpeakerLocation, TtmlError};
use crate::xml::{escape, format_number, Writer, EBUTTM_NS, IMAC_NS, TTML_NS, TTS_NS};

const EASY_TO_READ_LABEL: &str = "easy-to-read";

/// Writes `doc` as TTML. The output parses back to an equal document.
pub fn serialize_ttml(doc: &CueDocument) -> Result<String, TtmlError> {
    doc.check()?;
    let mut w = Writer::new();
    let mut root = vec![
        ("xmlns:tt", TTML_NS.to_string()),
        ("xmlns:tts", TTS_NS.to_string()),
        ("xmlns:imac", IMAC_NS.to_string()),
    ];
    if doc.easy_to_read_content_type {
        root.push(("xmlns:ebuttm", EBUTTM_NS.to_string()));
    }
    w.start("tt:tt", &root);

    w.start("tt:head", &[]);
    if doc.easy_to_read_content_type {
        w.start("tt:metadata", &[]);
        w.start("ebuttm:documentMetadata", &[]);
        w.inline("ebuttm:documentContentType", &[], EASY_TO_READ_LABEL);
        w.end("ebuttm:documentMetadata");
        w.end("tt:metadata");
    }
    if !doc.styles.is_empty() {
        w.start("tt:styling", &[]);
        for s in &doc.styles {
            let mut attrs = vec![("xml:id", s.id.clone())];
            if let Some(t) = &s.imac_type {
                attrs.push(("imac:type", t.clone()));
            }
            if let Some(a) = s.text_align {
                attrs.push(("tts:textAlign", a.as_str().to_string()));
            }
            if let Some(f) = &s.font_size {
                attrs.push(("tts:fontSize", f.clone()));
            }
            if let Some(c) = s.color {
                attrs.push(("tts:color", c.to_string()));
            }
            if let Some(c) = s.background_color {
                attrs.push(("tts:backgroundColor", c.to_string()));
            }
            w.empty("tt:style", &attrs);
        }
        w.end("tt:styling");
    }
    if !doc.regions.is_empty() {
        w.start("tt:layout", &[]);
        for r in &doc.regions {
            w.empty(
                "tt:region",
                &[
                    ("xml:id", r.id.clone()),
                    ("tts:origin", format!("{}% {}%", format_number(r.origin.0), format_number(r.origin.1))),
                    ("tts:extent", format!("{}% {}%", format_number(r.extent.0), format_number(r.extent.1))),
                ],
            );
        }
        w.end("tt:layout");
    }
    w.end("tt:head");

    w.start("tt:body", &[]);
    w.start("tt:div", &[]);
    for cue in &doc.cues {
        let mut attrs = vec![("xml:id", cue.id.clone())];
        if let Some(r) = &cue.region_id {
            attrs.push(("region", r.clone()));
        }
        if !cue.style_refs.is_empty() {
            attrs.push(("style", cue.style_refs.join(" ")));
        }
        attrs.push(("begin", cue.begin.to_string()));
        attrs.push(("end", cue.end.to_string()));
        match cue.location {
            Some(SpeakerLocation::AudioSource(d)) => {
                attrs.push(("imac:audioSourceAzimuth", format_number(d.azimuth())));
                attrs.push(("imac:audioSourceElevation", format_number(d.elevation())));
            }
            Some(SpeakerLocation::Equirectangular(p)) => {
                attrs.push(("imac:equirectangularLongitude", format_number(p.longitude())));
                attrs.push(("imac:equirectangularLatitude", format_number(p.latitude())));
            }
            None => {}
        }
        w.start("tt:p", &attrs);
        for span in &cue.spans {
            let content = span
                .text
                .split('\n')
                .map(escape)
                .collect::<Vec<_>>()
                .join("<tt:br/>");
            let attrs = if span.style_refs.is_empty() {
                vec![]
            } else {
                vec![("style", span.style_refs.join(" "))]
            };
            w.inline("tt:span", &attrs, &content);
        }
        w.end("tt:p");
    }
    w.end("tt:div");
    w.end("tt:body");
    w.end("tt:tt");
    Ok(w.finish())
}
