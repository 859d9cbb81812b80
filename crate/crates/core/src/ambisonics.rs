//! The `urn:mpeg:dash:ambi-map:2018` channel-map descriptor and preselection
//! resolution.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::mpd::{AdaptationSet, Descriptor, MediaPresentation, Preselection, Strength, AMBI_MAP_SCHEME};
use crate::report::Finding;

pub const RULE_ID: &str = "R6";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AmbiError {
    #[error("empty channel map")]
    EmptyValue,
    #[error("bad token {0:?} in channel map")]
    BadToken(String),
    #[error("ACN {0} listed twice")]
    DuplicateAcn(u32),
    #[error("mono head-lock mixed with stereo head-lock")]
    MixedHeadLock,
    #[error("stereo head-lock needs both L and R")]
    UnpairedStereo,
    #[error("head-lock channel {0} listed twice")]
    DuplicateHeadLock(ChannelRole),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ChannelRole {
    Acn(u32),
    HeadLockLeft,
    HeadLockRight,
    HeadLockMono,
}

impl ChannelRole {
    pub fn is_head_lock(self) -> bool {
        !matches!(self, ChannelRole::Acn(_))
    }

    fn parse_token(token: &str) -> Result<Self, AmbiError> {
        match token {
            "L" => Ok(ChannelRole::HeadLockLeft),
            "R" => Ok(ChannelRole::HeadLockRight),
            "M" => Ok(ChannelRole::HeadLockMono),
            t if !t.is_empty() && t.bytes().all(|b| b.is_ascii_digit()) => t
                .parse()
                .map(ChannelRole::Acn)
                .map_err(|_| AmbiError::BadToken(t.to_string())),
            t => Err(AmbiError::BadToken(t.to_string())),
        }
    }
}

impl fmt::Display for ChannelRole {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ChannelRole::Acn(n) => write!(f, "{n}"),
            ChannelRole::HeadLockLeft => f.write_str("L"),
            ChannelRole::HeadLockRight => f.write_str("R"),
            ChannelRole::HeadLockMono => f.write_str("M"),
        }
    }
}

impl Serialize for ChannelRole {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ChannelRole {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        ChannelRole::parse_token(&s).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum MapStrength {
    Supplemental,
    Essential,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AmbisonicChannelMap {
    pub entries: Vec<ChannelRole>,
    pub strength: MapStrength,
}

impl AmbisonicChannelMap {
    /// Parses `d` if it is an ambi-map property descriptor. Role and
    /// Accessibility descriptors are never channel maps.
    pub fn from_descriptor(d: &Descriptor) -> Option<Result<Self, AmbiError>> {
        if d.scheme_id_uri != AMBI_MAP_SCHEME {
            return None;
        }
        let strength = match d.strength {
            Strength::Supplemental => MapStrength::Supplemental,
            Strength::Essential => MapStrength::Essential,
            Strength::Plain => return None,
        };
        Some(parse_channel_map(&d.value).map(|entries| AmbisonicChannelMap { entries, strength }))
    }

    pub fn to_value(&self) -> String {
        format_channel_map(&self.entries)
    }
}

/// Splits on commas and whitespace, in any mixture.
pub fn parse_channel_map(value: &str) -> Result<Vec<ChannelRole>, AmbiError> {
    let entries = value
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(ChannelRole::parse_token)
        .collect::<Result<Vec<_>, _>>()?;
    if entries.is_empty() {
        // A lone comma is a bad token rather than an empty value.
        if value.contains(',') {
            return Err(AmbiError::BadToken(value.trim().to_string()));
        }
        return Err(AmbiError::EmptyValue);
    }
    check_entries(&entries)?;
    Ok(entries)
}

fn check_entries(entries: &[ChannelRole]) -> Result<(), AmbiError> {
    let mut acns = BTreeSet::new();
    for e in entries {
        if let ChannelRole::Acn(n) = e {
            if !acns.insert(*n) {
                return Err(AmbiError::DuplicateAcn(*n));
            }
        }
    }
    let count = |r: ChannelRole| entries.iter().filter(|e| **e == r).count();
    let (l, r, m) = (
        count(ChannelRole::HeadLockLeft),
        count(ChannelRole::HeadLockRight),
        count(ChannelRole::HeadLockMono),
    );
    if m > 0 && l + r > 0 {
        return Err(AmbiError::MixedHeadLock);
    }
    if (l > 0) != (r > 0) {
        return Err(AmbiError::UnpairedStereo);
    }
    for (role, n) in [
        (ChannelRole::HeadLockLeft, l),
        (ChannelRole::HeadLockRight, r),
        (ChannelRole::HeadLockMono, m),
    ] {
        if n > 1 {
            return Err(AmbiError::DuplicateHeadLock(role));
        }
    }
    Ok(())
}

pub fn format_channel_map(entries: &[ChannelRole]) -> String {
    entries.iter().map(ChannelRole::to_string).collect::<Vec<_>>().join(" ")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum RequiredStrength {
    SupplementalAllowed,
    EssentialRequired,
}

/// Only a lone omnidirectional channel, a lone mono head-lock or the
/// stereo head-lock pair can be ignored safely by a legacy client.
pub fn required_strength(entries: &[ChannelRole]) -> RequiredStrength {
    use ChannelRole::*;
    let mut sorted = entries.to_vec();
    sorted.sort();
    match sorted.as_slice() {
        [Acn(0)] | [HeadLockMono] | [HeadLockLeft, HeadLockRight] => RequiredStrength::SupplementalAllowed,
        _ => RequiredStrength::EssentialRequired,
    }
}

/// The channel maps carried by a set: its own, then one per representation
/// that carries its own map, paired with the representation index.
fn maps_of(set: &AdaptationSet) -> Vec<(Option<usize>, &Descriptor)> {
    let own = set.properties().filter(|d| d.scheme_id_uri == AMBI_MAP_SCHEME).map(|d| (None, d));
    let reps = set.representations.iter().enumerate().flat_map(|(i, r)| {
        r.descriptors
            .iter()
            .filter(|d| d.scheme_id_uri == AMBI_MAP_SCHEME)
            .map(move |d| (Some(i), d))
    });
    own.chain(reps).collect()
}

pub fn has_channel_map(set: &AdaptationSet) -> bool {
    set.roles.iter().chain(&set.accessibility).any(|d| d.scheme_id_uri == AMBI_MAP_SCHEME) || !maps_of(set).is_empty()
}

/// Strength, placement and channel-count checks for one adaptation set.
/// `set_path` is used as the base of every reported location.
pub fn validate_map(set: &AdaptationSet, set_path: &str) -> Vec<Finding> {
    let mut findings = Vec::new();
    for d in set.roles.iter().chain(&set.accessibility) {
        if d.scheme_id_uri == AMBI_MAP_SCHEME {
            findings.push(Finding::error(
                RULE_ID,
                set_path,
                "ambi-map must be a SupplementalProperty or EssentialProperty, not a Role or Accessibility element",
            ));
        }
    }
    let rep_path = |i: usize| format!("{set_path}/{}", set.representation_step(i));
    let mut set_map: Option<Vec<ChannelRole>> = None;
    let mut rep_maps: Vec<Option<Vec<ChannelRole>>> = vec![None; set.representations.len()];
    let mut seen_at = BTreeSet::new();
    for (level, d) in maps_of(set) {
        let path = level.map_or_else(|| set_path.to_string(), rep_path);
        if !seen_at.insert(level) {
            findings.push(Finding::error(RULE_ID, &path, "more than one ambi-map descriptor"));
            continue;
        }
        let map = match AmbisonicChannelMap::from_descriptor(d) {
            Some(Ok(m)) => m,
            Some(Err(e)) => {
                findings.push(Finding::error(RULE_ID, &path, format!("ambi-map {:?}: {e}", d.value)));
                continue;
            }
            None => continue,
        };
        match (required_strength(&map.entries), map.strength) {
            (RequiredStrength::EssentialRequired, MapStrength::Supplemental) => findings.push(Finding::error(
                RULE_ID,
                &path,
                format!("ambi-map \"{}\" must be an EssentialProperty", map.to_value()),
            )),
            (RequiredStrength::SupplementalAllowed, MapStrength::Essential) => findings.push(Finding::warning(
                RULE_ID,
                &path,
                format!(
                    "ambi-map \"{}\" is playable without Ambisonics support; as an EssentialProperty legacy clients will skip it",
                    map.to_value()
                ),
            )),
            _ => {}
        }
        match level {
            None => set_map = Some(map.entries),
            Some(i) => rep_maps[i] = Some(map.entries),
        }
    }
    for (i, rep) in set.representations.iter().enumerate() {
        let Some(entries) = rep_maps[i].as_ref().or(set_map.as_ref()) else {
            continue;
        };
        if let Some(n) = rep.audio_channel_count {
            if n as usize != entries.len() {
                findings.push(Finding::error(
                    RULE_ID,
                    rep_path(i),
                    format!("ambi-map lists {} channels but the representation has {n}", entries.len()),
                ));
            }
        }
    }
    findings
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum HeadLock {
    None,
    Mono,
    StereoPair,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ResolvedLayout {
    pub acn_indices: BTreeSet<u32>,
    pub head_lock: HeadLock,
    pub source_sets: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lang: Option<String>,
}

impl ResolvedLayout {
    /// Whether all four first-order channels are present.
    pub fn is_full_first_order(&self) -> bool {
        (0..4).all(|n| self.acn_indices.contains(&n))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ResolveError {
    #[error("preselection component {0:?} is not an AdaptationSet id")]
    UnknownComponent(String),
    #[error("AdaptationSet {0:?} carries no ambi-map descriptor")]
    MissingMap(String),
    #[error("AdaptationSet {id:?}: {source}")]
    BadMap { id: String, source: AmbiError },
    #[error("ACN {0} provided by more than one component")]
    DuplicateAcnAcrossComponents(u32),
    #[error("more than one component carries head-locked channels")]
    ConflictingHeadLock,
}

/// The map that describes the set: set level first, else the first
/// representation that carries one.
fn set_map(set: &AdaptationSet) -> Option<Result<AmbisonicChannelMap, AmbiError>> {
    maps_of(set).into_iter().find_map(|(_, d)| AmbisonicChannelMap::from_descriptor(d))
}

/// Combines the channel maps of the preselection components, in order. The
/// language is the preselection's own, else the first component language.
pub fn resolve_preselection(mp: &MediaPresentation, p: &Preselection) -> Result<ResolvedLayout, ResolveError> {
    let mut acn_indices = BTreeSet::new();
    let mut head_lock = HeadLock::None;
    let mut lang = p.lang.clone();
    for id in &p.component_ids {
        let set = mp.adaptation_set(id).ok_or_else(|| ResolveError::UnknownComponent(id.clone()))?;
        let map = set_map(set)
            .ok_or_else(|| ResolveError::MissingMap(id.clone()))?
            .map_err(|source| ResolveError::BadMap { id: id.clone(), source })?;
        for e in &map.entries {
            if let ChannelRole::Acn(n) = e {
                if !acn_indices.insert(*n) {
                    return Err(ResolveError::DuplicateAcnAcrossComponents(*n));
                }
            }
        }
        let this = if map.entries.contains(&ChannelRole::HeadLockMono) {
            HeadLock::Mono
        } else if map.entries.contains(&ChannelRole::HeadLockLeft) {
            HeadLock::StereoPair
        } else {
            HeadLock::None
        };
        if this != HeadLock::None {
            if head_lock != HeadLock::None {
                return Err(ResolveError::ConflictingHeadLock);
            }
            head_lock = this;
        }
        if lang.is_none() {
            lang = set.lang.clone();
        }
    }
    Ok(ResolvedLayout {
        acn_indices,
        head_lock,
        source_sets: p.component_ids.clone(),
        lang,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mpd::parse_mpd;
    use proptest::prelude::*;
    use ChannelRole::*;

    const AMBI0: &str = include_str!("../tests/fixtures/sample_ambi_order0.mpd");
    const AMBI_HL: &str = include_str!("../tests/fixtures/sample_ambi_order1_headlock.mpd");
    const AMBI_COMPAT: &str = include_str!("../tests/fixtures/sample_ambi_order1_compat.mpd");

    #[test]
    fn parses_sample_values() {
        assert_eq!(parse_channel_map("0").unwrap(), vec![Acn(0)]);
        assert_eq!(
            parse_channel_map("L R 0 1 2 3").unwrap(),
            vec![HeadLockLeft, HeadLockRight, Acn(0), Acn(1), Acn(2), Acn(3)]
        );
        assert_eq!(parse_channel_map("M").unwrap(), vec![HeadLockMono]);
        assert_eq!(parse_channel_map("1,2, 3").unwrap(), vec![Acn(1), Acn(2), Acn(3)]);
        assert_eq!(parse_channel_map(" 1 ,\t2,3 ").unwrap(), vec![Acn(1), Acn(2), Acn(3)]);
        assert_eq!(parse_channel_map("24").unwrap(), vec![Acn(24)]);
    }

    #[test]
    fn grammar_errors() {
        assert_eq!(parse_channel_map(""), Err(AmbiError::EmptyValue));
        assert_eq!(parse_channel_map("  "), Err(AmbiError::EmptyValue));
        assert_eq!(parse_channel_map("Q"), Err(AmbiError::BadToken("Q".into())));
        assert_eq!(parse_channel_map("-1"), Err(AmbiError::BadToken("-1".into())));
        assert_eq!(parse_channel_map("l"), Err(AmbiError::BadToken("l".into())));
        assert_eq!(parse_channel_map("0 0"), Err(AmbiError::DuplicateAcn(0)));
        assert_eq!(parse_channel_map("M L R"), Err(AmbiError::MixedHeadLock));
        assert_eq!(parse_channel_map("L 0"), Err(AmbiError::UnpairedStereo));
        assert_eq!(parse_channel_map("L 0 L"), Err(AmbiError::UnpairedStereo));
        assert_eq!(parse_channel_map("L R L"), Err(AmbiError::DuplicateHeadLock(HeadLockLeft)));
        assert_eq!(parse_channel_map("M M"), Err(AmbiError::DuplicateHeadLock(HeadLockMono)));
        assert_eq!(parse_channel_map("99999999999"), Err(AmbiError::BadToken("99999999999".into())));
    }

    #[test]
    fn strength_examples() {
        assert_eq!(required_strength(&[Acn(0)]), RequiredStrength::SupplementalAllowed);
        assert_eq!(required_strength(&[Acn(1), Acn(2), Acn(3)]), RequiredStrength::EssentialRequired);
        assert_eq!(required_strength(&[HeadLockLeft, HeadLockRight]), RequiredStrength::SupplementalAllowed);
        assert_eq!(required_strength(&[HeadLockRight, HeadLockLeft]), RequiredStrength::SupplementalAllowed);
        assert_eq!(required_strength(&[HeadLockMono]), RequiredStrength::SupplementalAllowed);
        assert_eq!(required_strength(&[Acn(0), Acn(1)]), RequiredStrength::EssentialRequired);
    }

    #[test]
    fn sample_sets_validate_clean() {
        for text in [AMBI0, AMBI_HL, AMBI_COMPAT] {
            let mp = parse_mpd(text).unwrap();
            for (i, set) in mp.adaptation_sets.iter().enumerate() {
                assert!(validate_map(set, &mp.adaptation_set_path(i)).is_empty());
            }
        }
    }

    #[test]
    fn strength_flip_detected() {
        let mp = parse_mpd(&AMBI0.replace(
            "<EssentialProperty schemeIdUri=\"urn:mpeg:dash:ambi-map:2018\" value=\"1 2 3\"/>",
            "<SupplementalProperty schemeIdUri=\"urn:mpeg:dash:ambi-map:2018\" value=\"1 2 3\"/>",
        ))
        .unwrap();
        let f = validate_map(&mp.adaptation_sets[1], &mp.adaptation_set_path(1));
        assert_eq!(f.len(), 1);
        assert_eq!(f[0].severity, crate::Severity::Error);
        assert_eq!(f[0].element_path, "/MPD/Period/AdaptationSet[@id='2']");
    }

    #[test]
    fn channel_count_mismatch() {
        let mp = parse_mpd(&AMBI_HL.replace("value=\"6\"", "value=\"4\"")).unwrap();
        let f = validate_map(&mp.adaptation_sets[0], &mp.adaptation_set_path(0));
        assert_eq!(f.len(), 1, "{f:?}");
        assert!(f[0].element_path.ends_with("Representation[@id='a2']"), "{}", f[0].element_path);
    }

    #[test]
    fn preselections_resolve() {
        let mp = parse_mpd(AMBI0).unwrap();
        let r = resolve_preselection(&mp, &mp.preselections[0]).unwrap();
        assert_eq!(r.acn_indices, BTreeSet::from([0, 1, 2, 3]));
        assert_eq!(r.head_lock, HeadLock::None);
        assert_eq!(r.source_sets, vec!["1", "2"]);

        let mp = parse_mpd(AMBI_COMPAT).unwrap();
        for (p, lang) in mp.preselections.iter().zip(["en", "fr"]) {
            let r = resolve_preselection(&mp, p).unwrap();
            assert_eq!(r.acn_indices, BTreeSet::from([0, 1, 2, 3]));
            assert_eq!(r.head_lock, HeadLock::StereoPair);
            assert_eq!(r.lang.as_deref(), Some(lang));
        }
    }

    #[test]
    fn resolve_errors() {
        let mp = parse_mpd(AMBI_COMPAT).unwrap();
        let p = |ids: &[&str]| Preselection {
            id: None,
            component_ids: ids.iter().map(|s| s.to_string()).collect(),
            lang: None,
        };
        assert_eq!(resolve_preselection(&mp, &p(&["9"])), Err(ResolveError::UnknownComponent("9".into())));
        assert_eq!(resolve_preselection(&mp, &p(&["1", "2"])), Err(ResolveError::ConflictingHeadLock));
        assert_eq!(resolve_preselection(&mp, &p(&["3", "3x"])), Err(ResolveError::UnknownComponent("3x".into())));
        let mut dup = mp.clone();
        dup.adaptation_sets[0].supplemental_properties[0].value = "0".into();
        assert_eq!(resolve_preselection(&dup, &p(&["1", "3"])), Err(ResolveError::DuplicateAcnAcrossComponents(0)));
        let mut missing = mp.clone();
        missing.adaptation_sets[0].supplemental_properties.clear();
        assert_eq!(resolve_preselection(&missing, &p(&["1"])), Err(ResolveError::MissingMap("1".into())));
    }

    #[test]
    fn mono_only_preselection() {
        let mut mp = parse_mpd(AMBI_COMPAT).unwrap();
        mp.adaptation_sets[0].supplemental_properties[0].value = "M".into();
        let r = resolve_preselection(
            &mp,
            &Preselection {
                id: None,
                component_ids: vec!["1".into()],
                lang: None,
            },
        )
        .unwrap();
        assert!(r.acn_indices.is_empty());
        assert_eq!(r.head_lock, HeadLock::Mono);
        assert_eq!(r.lang.as_deref(), Some("en"));
    }

    /// Every map of up to four entries drawn from the seven roles, with
    /// repetition; invalid ones are filtered by the parser invariants.
    fn all_small_maps() -> Vec<Vec<ChannelRole>> {
        let alphabet = [Acn(0), Acn(1), Acn(2), Acn(3), HeadLockLeft, HeadLockRight, HeadLockMono];
        let mut out = vec![];
        let mut frontier: Vec<Vec<ChannelRole>> = vec![vec![]];
        for _ in 0..4 {
            let mut next = vec![];
            for prefix in &frontier {
                for a in alphabet {
                    let mut v = prefix.clone();
                    v.push(a);
                    next.push(v);
                }
            }
            out.extend(next.iter().cloned());
            frontier = next;
        }
        out
    }

    #[test]
    fn required_strength_brute_force() {
        let whitelist: Vec<BTreeSet<ChannelRole>> = vec![
            BTreeSet::from([Acn(0)]),
            BTreeSet::from([HeadLockMono]),
            BTreeSet::from([HeadLockLeft, HeadLockRight]),
        ];
        let mut checked = 0;
        for map in all_small_maps() {
            if check_entries(&map).is_err() {
                continue;
            }
            let as_set: BTreeSet<_> = map.iter().copied().collect();
            let expected = if whitelist.contains(&as_set) {
                RequiredStrength::SupplementalAllowed
            } else {
                RequiredStrength::EssentialRequired
            };
            assert_eq!(required_strength(&map), expected, "{map:?}");
            checked += 1;
        }
        assert!(checked > 100);
    }

    fn valid_map() -> impl Strategy<Value = Vec<ChannelRole>> {
        (
            proptest::collection::btree_set(0u32..40, 0..6),
            0u8..3,
            any::<u64>(),
        )
            .prop_filter_map("non-empty", |(acns, hl, seed)| {
                let mut v: Vec<ChannelRole> = acns.into_iter().map(Acn).collect();
                match hl {
                    1 => v.push(HeadLockMono),
                    2 => v.extend([HeadLockLeft, HeadLockRight]),
                    _ => {}
                }
                if v.is_empty() {
                    return None;
                }
                // Deterministic shuffle from the seed.
                let mut s = seed;
                for i in (1..v.len()).rev() {
                    s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                    v.swap(i, (s >> 33) as usize % (i + 1));
                }
                Some(v)
            })
    }

    proptest! {
        #[test]
        fn text_form_round_trips(map in valid_map()) {
            let text = format_channel_map(&map);
            prop_assert_eq!(parse_channel_map(&text).unwrap(), map.clone());
            prop_assert_eq!(parse_channel_map(&text.replace(' ', ",")).unwrap(), map);
        }

        #[test]
        fn strength_depends_on_multiset_only(map in valid_map(), rot in 0usize..8) {
            let mut other = map.clone();
            let k = rot % other.len();
            other.rotate_left(k);
            prop_assert_eq!(required_strength(&map), required_strength(&other));
        }

        #[test]
        fn acn_set_ignores_component_order(swap in any::<bool>()) {
            let mp = parse_mpd(AMBI0).unwrap();
            let mut p = mp.preselections[0].clone();
            if swap { p.component_ids.reverse(); }
            let r = resolve_preselection(&mp, &p).unwrap();
            prop_assert_eq!(r.acn_indices, BTreeSet::from([0, 1, 2, 3]));
            prop_assert_eq!(r.source_sets, p.component_ids);
        }

        #[test]
        fn arbitrary_text_never_panics(s in "[LRM0-9, \\t-]{0,12}") {
            let _ = parse_channel_map(&s);
        }
    }
}
