use proptest::prelude::*;

use super::*;

const SUBTITLE: &str = include_str!("../../tests/fixtures/sample_subtitle.ttml");
const SIDECAR: &str = include_str!("../../tests/fixtures/sample_sl_sidecar.ttml");

fn ms(v: u64) -> MediaTime {
    MediaTime::from_millis(v)
}

fn wrap_p(p_attrs: &str) -> String {
    format!(
        r#"<tt xmlns="http://www.w3.org/ns/ttml" xmlns:imac="http://www.imac-project.eu">
  <body><div><p xml:id="c" begin="00:00:01.000" end="00:00:02.000" {p_attrs}>x</p></div></body>
</tt>"#
    )
}

#[test]
fn subtitle_sample_parses() {
    let doc = parse_ttml(SUBTITLE).unwrap();
    assert_eq!(doc.cues.len(), 1);
    let s1 = &doc.cues[0];
    assert_eq!(s1.id, "s1");
    assert_eq!((s1.begin, s1.end), (ms(1000), ms(4000)));
    assert_eq!(s1.direction(), Some(Direction::new(-30.0, 20.0).unwrap()));
    assert_eq!(s1.location.unwrap().source(), DirectionSource::AudioSource);
    assert_eq!(s1.region_id.as_deref(), Some("bottom"));
    assert_eq!(s1.style_refs, vec!["defaultStyle".to_string()]);
    assert_eq!(
        s1.spans,
        vec![Span {
            style_refs: vec!["colorYellow".into()],
            text: "Sample subtitle".into()
        }]
    );
    assert_eq!(doc.resolve_color(s1), Some(Color::rgb(255, 255, 0)));
}

#[test]
fn sidecar_sample_parses() {
    let doc = parse_ttml(SIDECAR).unwrap();
    let p1 = doc.cue("p1").unwrap();
    assert_eq!((p1.begin, p1.end), (ms(4920), ms(44240)));
    match p1.location {
        Some(SpeakerLocation::Equirectangular(p)) => {
            assert_eq!((p.longitude(), p.latitude()), (300.0, 10.0));
        }
        other => panic!("unexpected location {other:?}"),
    }
    assert_eq!(p1.spans[0].text, "Speaker's Name");
    assert_eq!(p1.spans[0].style_refs, vec!["C1".to_string()]);
    let c1 = doc.style("C1").unwrap();
    assert_eq!(c1.color, Some(Color::rgb(255, 255, 0)));
    assert_eq!(c1.imac_type.as_deref(), Some("stCharacter"));
    assert_eq!(c1.background_color, Some(Color { r: 0, g: 0, b: 0, a: 0 }));
    assert_eq!(doc.style("A1").unwrap().text_align, Some(TextAlign::Left));
}

#[test]
fn out_of_range_azimuth_is_rejected() {
    let err = parse_ttml(&wrap_p(r#"imac:audioSourceAzimuth="200""#)).unwrap_err();
    assert!(matches!(err, TtmlError::RangeError { ref attribute, .. } if attribute == "imac:audioSourceAzimuth"));
    let err = parse_ttml(&wrap_p(r#"imac:audioSourceAzimuth="0" imac:audioSourceElevation="-95""#)).unwrap_err();
    assert!(matches!(err, TtmlError::RangeError { ref attribute, .. } if attribute == "imac:audioSourceElevation"));
    let err = parse_ttml(&wrap_p(r#"imac:equirectangularLongitude="0" imac:equirectangularLatitude="91""#)).unwrap_err();
    assert!(matches!(err, TtmlError::RangeError { .. }));
}

#[test]
fn lenient_parse_records_range_violations() {
    let parsed = parse_ttml_lenient(&wrap_p(r#"imac:audioSourceAzimuth="200""#)).unwrap();
    let doc = parsed.value;
    assert_eq!(doc.cues[0].location, None);
    assert_eq!(doc.range_violations.len(), 1);
    assert_eq!(doc.range_violations[0].cue_id, "c");
    assert_eq!(doc.range_violations[0].value, "200");
    assert_eq!(doc.range_violations[0].path, "/tt/body/div/p[@xml:id='c']");
    assert!(matches!(serialize_ttml(&doc), Err(TtmlError::InvariantViolation(_))));
}

#[test]
fn elevation_defaults_to_zero() {
    let doc = parse_ttml(&wrap_p(r#"imac:audioSourceAzimuth="45""#)).unwrap();
    assert_eq!(doc.cues[0].direction(), Some(Direction::new(45.0, 0.0).unwrap()));
}

#[test]
fn misspelled_azimuth_alias_is_accepted_with_warning() {
    let parsed = parse_ttml_detailed(&wrap_p(r#"imac:audioSourceAzimut="-10""#)).unwrap();
    assert_eq!(parsed.value.cues[0].direction(), Some(Direction::new(-10.0, 0.0).unwrap()));
    assert_eq!(parsed.warnings.len(), 1);
    // never emitted
    let out = serialize_ttml(&parsed.value).unwrap();
    assert!(out.contains("imac:audioSourceAzimuth=\"-10\""));
    assert!(!out.contains("audioSourceAzimut="));
}

#[test]
fn imac_prefix_is_matched_by_uri() {
    let text = wrap_p(r#"x:audioSourceAzimuth="12""#).replace(
        "xmlns:imac=\"http://www.imac-project.eu\"",
        "xmlns:x=\"http://www.imac-project.eu\"",
    );
    let doc = parse_ttml(&text).unwrap();
    assert_eq!(doc.cues[0].direction(), Some(Direction::new(12.0, 0.0).unwrap()));
}

#[test]
fn conflicting_families_are_rejected() {
    let err = parse_ttml(&wrap_p(
        r#"imac:audioSourceAzimuth="1" imac:equirectangularLongitude="3""#,
    ))
    .unwrap_err();
    assert!(matches!(err, TtmlError::ConflictingDirection { .. }));
}

#[test]
fn structural_errors() {
    assert!(matches!(parse_ttml("<tt"), Err(TtmlError::MalformedXml(_))));
    assert!(matches!(parse_ttml("<MPD/>"), Err(TtmlError::NotTtml { .. })));
    let bad_time = wrap_p("").replace("00:00:02.000", "2s");
    assert!(matches!(parse_ttml(&bad_time), Err(TtmlError::BadTime { .. })));
    let empty = wrap_p("").replace("00:00:02.000", "00:00:01.000");
    assert!(matches!(parse_ttml(&empty), Err(TtmlError::EmptyInterval { .. })));
    assert!(matches!(
        parse_ttml(&wrap_p(r#"region="nowhere""#)),
        Err(TtmlError::UnresolvedReference { ref id, .. }) if id == "nowhere"
    ));
    assert!(matches!(
        parse_ttml(&wrap_p(r#"imac:audioSourceAzimuth="left""#)),
        Err(TtmlError::InvalidAttribute { .. })
    ));
    let overflow = SUBTITLE.replace("tts:extent=\"80% 15%\"", "tts:extent=\"95% 15%\"");
    assert!(matches!(parse_ttml(&overflow), Err(TtmlError::RangeError { .. })));
    let align = SUBTITLE.replace("tts:textAlign=\"center\"", "tts:textAlign=\"justify\"");
    assert!(matches!(parse_ttml(&align), Err(TtmlError::InvalidAttribute { .. })));
}

#[test]
fn active_cue_examples() {
    let doc = parse_ttml(SUBTITLE).unwrap();
    let ids = |t| active_cues(&doc, ms(t)).iter().map(|c| c.id.clone()).collect::<Vec<_>>();
    assert_eq!(ids(2000), vec!["s1".to_string()]);
    assert!(ids(4000).is_empty());
    assert!(ids(500).is_empty());
    assert_eq!(ids(1000), vec!["s1".to_string()]);
}

#[test]
fn signer_state_examples() {
    let doc = parse_ttml(SIDECAR).unwrap();
    let s = signer_state(&doc, ms(10_000));
    assert!(s.active);
    assert_eq!(s.speaker_name.as_deref(), Some("Speaker's Name"));
    assert_eq!(s.color, Some(Color::rgb(255, 255, 0)));
    let d = s.direction.unwrap();
    assert!((d.azimuth() - 60.0).abs() < 1e-12);
    assert_eq!(d.elevation(), 10.0);
    // converting the azimuth back recovers the written longitude
    let (lon, _) = crate::geometry::direction_to_longitude_latitude(d);
    assert!((lon - 300.0).abs() < 1e-9);
    assert_eq!(s.cue_id.as_deref(), Some("p1"));

    assert_eq!(signer_state(&doc, ms(50_000)), SignerState::default());
    assert_eq!(signer_state(&CueDocument::default(), ms(0)), SignerState::default());
}

#[test]
fn character_style_wins_color_resolution() {
    let text = r##"<tt xmlns="http://www.w3.org/ns/ttml" xmlns:tts="http://www.w3.org/ns/ttml#styling" xmlns:imac="http://www.imac-project.eu">
  <head><styling>
    <style xml:id="plain" tts:color="#FF0000"/>
    <style xml:id="who" imac:type="stCharacter" tts:color="#00FF00"/>
  </styling></head>
  <body><div>
    <p xml:id="a" style="who" begin="00:00:00.000" end="00:00:05.000"><span style="plain">Anna</span></p>
    <p xml:id="b" begin="00:00:02.000" end="00:00:06.000"><span style="plain">Ben</span></p>
  </div></body>
</tt>"##;
    let doc = parse_ttml(text).unwrap();
    assert_eq!(doc.resolve_color(doc.cue("a").unwrap()), Some(Color::rgb(0, 255, 0)));
    assert_eq!(doc.resolve_color(doc.cue("b").unwrap()), Some(Color::rgb(255, 0, 0)));

    // overlapping segments: latest begin wins, the other is reported
    let s = signer_state(&doc, ms(3000));
    assert_eq!(s.cue_id.as_deref(), Some("b"));
    assert_eq!(s.superseded, vec!["a".to_string()]);
    assert_eq!(doc.overlapping_cues(), vec![("a".to_string(), "b".to_string())]);
}

#[test]
fn annotate_examples() {
    let mut doc = parse_ttml(SUBTITLE).unwrap();
    doc.cues[0].location = None;
    let annotated = annotate_direction(&doc, "s1", Direction::new(-30.0, 20.0).unwrap()).unwrap();
    let out = serialize_ttml(&annotated).unwrap();
    assert!(out.contains(r#"imac:audioSourceAzimuth="-30""#));
    assert!(out.contains(r#"imac:audioSourceElevation="20""#));
    assert_eq!(parse_ttml(&out).unwrap(), parse_ttml(SUBTITLE).unwrap());

    let origin = annotate_direction(&doc, "s1", Direction::new(0.0, 0.0).unwrap()).unwrap();
    let out = serialize_ttml(&origin).unwrap();
    assert!(out.contains(r#"imac:audioSourceAzimuth="0""#));
    assert!(out.contains(r#"imac:audioSourceElevation="0""#));

    assert_eq!(
        annotate_direction(&doc, "nope", Direction::new(0.0, 0.0).unwrap()),
        Err(TtmlError::UnknownCue("nope".into()))
    );
}

#[test]
fn sample_documents_round_trip() {
    for text in [SUBTITLE, SIDECAR] {
        let doc = parse_ttml(text).unwrap();
        let again = parse_ttml(&serialize_ttml(&doc).unwrap()).unwrap();
        assert_eq!(again, doc);
    }
}

#[test]
fn empty_document_serializes() {
    let out = serialize_ttml(&CueDocument::default()).unwrap();
    let doc = parse_ttml(&out).unwrap();
    assert_eq!(doc, CueDocument::default());
}

#[test]
fn easy_to_read_label_is_read() {
    let text = r#"<tt:tt xmlns:tt="http://www.w3.org/ns/ttml" xmlns:ebuttm="urn:ebu:tt:metadata">
  <tt:head><tt:metadata><ebuttm:documentMetadata>
    <ebuttm:documentContentType>easy-to-read</ebuttm:documentContentType>
  </ebuttm:documentMetadata></tt:metadata></tt:head>
  <tt:body/>
</tt:tt>"#;
    let doc = parse_ttml(text).unwrap();
    assert!(doc.easy_to_read_content_type);
    assert_eq!(parse_ttml(&serialize_ttml(&doc).unwrap()).unwrap(), doc);
}

#[test]
fn line_breaks_survive() {
    let text = wrap_p("").replace(">x</p>", "><span>one  two<br/>three</span></p>");
    let doc = parse_ttml(&text).unwrap();
    assert_eq!(doc.cues[0].spans[0].text, "one two\nthree");
    assert_eq!(parse_ttml(&serialize_ttml(&doc).unwrap()).unwrap(), doc);
}

// ---- generators -----------------------------------------------------------

fn arb_text() -> impl Strategy<Value = String> {
    let word = "[A-Za-z0-9&<>'\"]{1,8}";
    prop::collection::vec(prop::collection::vec(word, 1..4).prop_map(|w| w.join(" ")), 1..3)
        .prop_map(|lines| lines.join("\n"))
}

fn arb_location() -> impl Strategy<Value = Option<SpeakerLocation>> {
    prop_oneof![
        Just(None),
        (-180i32..=180, -90i32..=90, 0u8..4).prop_map(|(a, e, frac)| {
            let a = a as f64 + if a < 180 { frac as f64 * 0.25 } else { 0.0 };
            Some(SpeakerLocation::AudioSource(Direction::new(a, e as f64).unwrap()))
        }),
        (0u32..3600, -900i32..=900).prop_map(|(lon, lat)| {
            Some(SpeakerLocation::Equirectangular(
                EquirectPosition::new(lon as f64 / 10.0, lat as f64 / 10.0).unwrap(),
            ))
        }),
    ]
}

prop_compose! {
    fn arb_doc()(
        n_styles in 0usize..3,
        colors in prop::collection::vec(prop::option::of((any::<u8>(), any::<u8>(), any::<u8>(), any::<u8>())), 3),
        character in any::<bool>(),
        with_region in any::<bool>(),
        cues in prop::collection::vec(
            (0u64..100_000, 1u64..20_000, arb_location(), prop::collection::vec(arb_text(), 0..3), 0usize..4),
            0..6,
        ),
        etr in any::<bool>(),
    ) -> CueDocument {
        let styles: Vec<Style> = (0..n_styles).map(|i| Style {
            id: format!("st{i}"),
            text_align: [None, Some(TextAlign::Center), Some(TextAlign::End)][i % 3],
            color: colors[i].map(|(r, g, b, a)| Color { r, g, b, a }),
            background_color: None,
            font_size: (i == 1).then(|| "34px".to_string()),
            imac_type: (character && i == 0).then(|| CHARACTER_STYLE_TYPE.to_string()),
        }).collect();
        let regions = if with_region {
            vec![Region { id: "R1".into(), origin: (10.0, 80.0), extent: (80.0, 15.5) }]
        } else {
            vec![]
        };
        let mut cues: Vec<Cue> = cues.into_iter().enumerate().map(|(i, (b, d, location, texts, st))| Cue {
            id: format!("c{i}"),
            region_id: with_region.then(|| "R1".to_string()),
            style_refs: if st < n_styles { vec![format!("st{st}")] } else { vec![] },
            begin: MediaTime::from_millis(b),
            end: MediaTime::from_millis(b + d),
            spans: texts.into_iter().enumerate().map(|(j, text)| Span {
                style_refs: if j < n_styles { vec![format!("st{j}")] } else { vec![] },
                text,
            }).collect(),
            location,
        }).collect();
        cues.sort_by_key(|c| c.begin);
        CueDocument { regions, styles, cues, easy_to_read_content_type: etr, range_violations: vec![] }
    }
}

proptest! {
    #[test]
    fn random_documents_round_trip(doc in arb_doc()) {
        let text = serialize_ttml(&doc).unwrap();
        prop_assert_eq!(parse_ttml(&text).unwrap(), doc);
    }

    #[test]
    fn active_cues_match_brute_force(doc in arb_doc(), t in 0u64..130_000) {
        let t = MediaTime::from_millis(t);
        let got: Vec<&str> = active_cues(&doc, t).iter().map(|c| c.id.as_str()).collect();
        let mut want = Vec::new();
        for c in &doc.cues {
            let inside = c.begin.as_millis() <= t.as_millis() && t.as_millis() < c.end.as_millis();
            if inside {
                want.push(c.id.as_str());
            }
        }
        prop_assert_eq!(got, want);
    }

    #[test]
    fn signer_activity_matches_interval_oracle(doc in arb_doc()) {
        let intervals: Vec<(u64, u64)> =
            doc.cues.iter().map(|c| (c.begin.as_millis(), c.end.as_millis())).collect();
        for t in (0..=130_000u64).step_by(10) {
            let oracle = intervals.iter().any(|(b, e)| *b <= t && t < *e);
            prop_assert_eq!(signer_state(&doc, MediaTime::from_millis(t)).active, oracle);
        }
    }

    #[test]
    fn parser_never_panics(text in ".{0,200}") {
        let _ = parse_ttml(&text);
        let _ = parse_ttml_lenient(&text);
    }
}
