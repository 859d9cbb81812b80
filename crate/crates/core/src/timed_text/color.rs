use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// An sRGB color with alpha, as written in `tts:color`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Color {
    pub r: u8,
    pub g: u8,
    pub b: u8,
    pub a: u8,
}

const NAMED: &[(&str, [u8; 4])] = &[
    ("transparent", [0, 0, 0, 0]),
    ("black", [0, 0, 0, 255]),
    ("silver", [192, 192, 192, 255]),
    ("gray", [128, 128, 128, 255]),
    ("white", [255, 255, 255, 255]),
    ("maroon", [128, 0, 0, 255]),
    ("red", [255, 0, 0, 255]),
    ("purple", [128, 0, 128, 255]),
    ("fuchsia", [255, 0, 255, 255]),
    ("magenta", [255, 0, 255, 255]),
    ("green", [0, 128, 0, 255]),
    ("lime", [0, 255, 0, 255]),
    ("olive", [128, 128, 0, 255]),
    ("yellow", [255, 255, 0, 255]),
    ("navy", [0, 0, 128, 255]),
    ("blue", [0, 0, 255, 255]),
    ("teal", [0, 128, 128, 255]),
    ("aqua", [0, 255, 255, 255]),
    ("cyan", [0, 255, 255, 255]),
];

impl Color {
    pub const fn rgb(r: u8, g: u8, b: u8) -> Self {
        Color { r, g, b, a: 255 }
    }

    pub fn parse(text: &str) -> Option<Color> {
        let t = text.trim();
        if let Some(hex) = t.strip_prefix('#') {
            if !(hex.len() == 6 || hex.len() == 8) || !hex.bytes().all(|b| b.is_ascii_hexdigit()) {
                return None;
            }
            let byte = |i: usize| u8::from_str_radix(&hex[i..i + 2], 16).ok();
            let a = if hex.len() == 8 { byte(6)? } else { 255 };
            return Some(Color { r: byte(0)?, g: byte(2)?, b: byte(4)?, a });
        }
        if let Some(args) = t.strip_prefix("rgba(").or_else(|| t.strip_prefix("rgb(")) {
            let args = args.strip_suffix(')')?;
            let comps: Vec<u8> = args
                .split(',')
                .map(|c| c.trim().parse::<u8>().ok())
                .collect::<Option<_>>()?;
            let rgba = t.starts_with("rgba(");
            return match (rgba, comps.as_slice()) {
                (false, [r, g, b]) => Some(Color::rgb(*r, *g, *b)),
                (true, [r, g, b, a]) => Some(Color { r: *r, g: *g, b: *b, a: *a }),
                _ => None,
            };
        }
        NAMED
            .iter()
            .find(|(name, _)| t.eq_ignore_ascii_case(name))
            .map(|(_, [r, g, b, a])| Color { r: *r, g: *g, b: *b, a: *a })
    }
}

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{:02X}{:02X}{:02X}", self.r, self.g, self.b)?;
        if self.a != 255 {
            write!(f, "{:02X}", self.a)?;
        }
        Ok(())
    }
}

impl FromStr for Color {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Color::parse(s).ok_or_else(|| format!("bad color {s:?}"))
    }
}

impl Serialize for Color {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Color {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Color::parse(&s).ok_or_else(|| serde::de::Error::custom(format!("bad color {s:?}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_color_forms() {
        assert_eq!(Color::parse("#FFFF00"), Some(Color::rgb(255, 255, 0)));
        assert_eq!(Color::parse("#ffff0080").unwrap().a, 0x80);
        assert_eq!(Color::parse("transparent"), Some(Color { r: 0, g: 0, b: 0, a: 0 }));
        assert_eq!(Color::parse("rgb(1, 2, 3)"), Some(Color::rgb(1, 2, 3)));
        assert_eq!(Color::parse("rgba(1,2,3,4)").unwrap().a, 4);
        assert_eq!(Color::parse("#FFF"), None);
        assert_eq!(Color::parse("rgb(1,2)"), None);
        assert_eq!(Color::parse("chartreuse"), None);
    }

    #[test]
    fn display_is_reparseable() {
        for c in [Color::rgb(255, 255, 0), Color { r: 1, g: 2, b: 3, a: 0 }] {
            assert_eq!(Color::parse(&c.to_string()), Some(c));
        }
        assert_eq!(Color::rgb(255, 255, 0).to_string(), "#FFFF00");
    }
}
