//! Accessibility signaling for 360° DASH streaming.
//!
//! The crate parses, validates and generates the manifest descriptors and
//! timed-text attributes used to deliver subtitles, audio description,
//! spoken subtitles and sign language alongside 360° video, and simulates
//! what a player presents for a scripted viewport trace.

pub mod ambisonics;
pub mod catalog;
pub mod cli;
pub mod geometry;
pub mod mpd;
pub mod report;
pub mod sim;
pub mod timed_text;
pub(crate) mod xml;

pub use report::{Finding, ParseWarning, Parsed, Severity};
