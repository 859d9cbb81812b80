use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("bad clock time {0:?}, expected hh:mm:ss(.fff)")]
pub struct BadTime(pub String);

/// A media timestamp with millisecond resolution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct MediaTime(u64);

impl MediaTime {
    pub const ZERO: MediaTime = MediaTime(0);

    pub const fn from_millis(ms: u64) -> Self {
        MediaTime(ms)
    }

    pub const fn as_millis(&self) -> u64 {
        self.0
    }

    pub fn as_secs_f64(&self) -> f64 {
        self.0 as f64 / 1000.0
    }

    /// Parses a TTML clock-time expression. Offset and frame based times are
    /// not accepted.
    pub fn parse(text: &str) -> Result<Self, BadTime> {
        let bad = || BadTime(text.to_string());
        let (hms, frac) = match text.split_once('.') {
            Some((hms, frac)) => (hms, Some(frac)),
            None => (text, None),
        };
        let mut parts = hms.split(':');
        let (Some(h), Some(m), Some(s), None) = (parts.next(), parts.next(), parts.next(), parts.next())
        else {
            return Err(bad());
        };
        let digits = |p: &str| !p.is_empty() && p.bytes().all(|b| b.is_ascii_digit());
        if !digits(h) || h.len() < 2 || m.len() != 2 || s.len() != 2 || !digits(m) || !digits(s) {
            return Err(bad());
        }
        let hours: u64 = h.parse().map_err(|_| bad())?;
        let minutes: u64 = m.parse().map_err(|_| bad())?;
        let seconds: u64 = s.parse().map_err(|_| bad())?;
        if minutes >= 60 || seconds >= 60 {
            return Err(bad());
        }
        let millis = match frac {
            None => 0,
            Some(f) if digits(f) && f.len() <= 3 => {
                let padded = format!("{f:0<3}");
                padded.parse::<u64>().map_err(|_| bad())?
            }
            Some(_) => return Err(bad()),
        };
        hours
            .checked_mul(3_600_000)
            .and_then(|v| v.checked_add(minutes * 60_000 + seconds * 1000 + millis))
            .map(MediaTime)
            .ok_or_else(bad)
    }
}

impl fmt::Display for MediaTime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ms = self.0 % 1000;
        let total = self.0 / 1000;
        write!(
            f,
            "{:02}:{:02}:{:02}.{:03}",
            total / 3600,
            (total / 60) % 60,
            total % 60,
            ms
        )
    }
}

impl FromStr for MediaTime {
    type Err = BadTime;
    fn from_str(s: &str) -> Result<Self, BadTime> {
        MediaTime::parse(s)
    }
}

impl Serialize for MediaTime {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for MediaTime {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        MediaTime::parse(&s).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_sample_times() {
        assert_eq!(MediaTime::parse("00:00:04.920").unwrap().as_millis(), 4920);
        assert_eq!(MediaTime::parse("00:00:44.240").unwrap().as_millis(), 44240);
        assert_eq!(MediaTime::parse("01:02:03").unwrap().as_millis(), 3_723_000);
        assert_eq!(MediaTime::parse("00:00:01.5").unwrap().as_millis(), 1500);
        assert_eq!(MediaTime::parse("100:00:00.000").unwrap().as_millis(), 360_000_000);
    }

    #[test]
    fn rejects_other_time_forms() {
        for bad in ["10s", "00:00:01:12", "00:00:01.1234", "0:00:01", "00:60:00", "", "00:00:01.", "-0:00:01"] {
            assert!(MediaTime::parse(bad).is_err(), "{bad}");
        }
    }

    proptest! {
        #[test]
        fn clock_text_round_trips(ms in 0u64..400_000_000) {
            let t = MediaTime::from_millis(ms);
            prop_assert_eq!(MediaTime::parse(&t.to_string()).unwrap(), t);
        }
    }
}
