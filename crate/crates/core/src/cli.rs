//! Command-line front end.
//!
//! Exit codes: 0 success, 1 validation errors or no matching stream,
//! 2 usage, I/O or parse failure.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::Serialize;

use crate::ambisonics::{parse_channel_map, resolve_preselection};
use crate::catalog::{classify, validate};
use crate::geometry::Direction;
use crate::mpd::{parse_mpd_detailed, MediaPresentation};
use crate::report::Severity;
use crate::sim::{simulate, write_directives, OutputFormat, SimError, UserPreferences, ViewportTrace};
use crate::timed_text::{annotate_direction, parse_ttml, parse_ttml_lenient, serialize_ttml, CueDocument};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FINDINGS: i32 = 1;
pub const EXIT_FAILURE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "access360", version, about = "Accessibility signaling tools for 360° DASH streaming")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check a manifest and optional sidecar documents against the signaling rules.
    Validate {
        mpd: PathBuf,
        /// Sidecar TTML files as `adaptationSetId=path`, or a bare path
        /// matched against Representation BaseURLs.
        ttml: Vec<String>,
        #[arg(long)]
        json: bool,
    },
    /// List the access services offered by a manifest.
    Catalog {
        mpd: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Inspect ambisonic channel maps.
    Ambi {
        #[command(subcommand)]
        action: AmbiAction,
    },
    /// Add a speaker direction to one cue of a TTML document.
    Annotate {
        ttml: PathBuf,
        #[arg(long)]
        cue: String,
        #[arg(long, allow_hyphen_values = true)]
        azimuth: f64,
        #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
        elevation: f64,
        #[arg(short = 'o', long = "output")]
        output: Option<PathBuf>,
    },
    /// Run the presentation simulator over a viewport trace.
    Simulate {
        #[arg(long)]
        mpd: PathBuf,
        /// Cue documents as `adaptationSetId=path`.
        #[arg(long = "ttml")]
        ttml: Vec<String>,
        #[arg(long)]
        prefs: PathBuf,
        #[arg(long)]
        trace: PathBuf,
        #[arg(short = 'o', long = "output")]
        output: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "json")]
        format: OutputFormat,
    },
}

#[derive(Debug, Subcommand)]
enum AmbiAction {
    /// Parse a descriptor value such as "L R 0 1 2 3".
    Parse {
        #[arg(allow_hyphen_values = true)]
        value: String,
        #[arg(long)]
        json: bool,
    },
    /// Resolve the preselections of a manifest into channel layouts.
    Resolve {
        mpd: PathBuf,
        /// Preselection id, or its 1-based position. All when omitted.
        #[arg(long)]
        preselection: Option<String>,
    },
}

/// A failure that ends the command with a diagnostic and exit code 2.
struct Failure(String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(e.to_string())
    }
}

type Outcome = Result<i32, Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure(format!("{}: {e}", path.display())))
}

fn load_mpd(path: &Path, err: &mut dyn Write) -> Result<MediaPresentation, Failure> {
    let parsed = parse_mpd_detailed(&read(path)?).map_err(|e| Failure(format!("{}: {e}", path.display())))?;
    for w in &parsed.warnings {
        let _ = writeln!(err, "{}: note: {w}", path.display());
    }
    Ok(parsed.value)
}

fn json_line(out: &mut dyn Write, value: &impl Serialize) -> Result<(), Failure> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)?;
    Ok(())
}

fn write_output(path: &Option<PathBuf>, out: &mut dyn Write, bytes: &[u8]) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, bytes).map_err(|e| Failure(format!("{}: {e}", p.display())))?,
        None => out.write_all(bytes)?,
    }
    Ok(())
}

/// Splits `id=path`; a bare path is matched against BaseURL file names.
fn sidecar_key(arg: &str, mp: &MediaPresentation) -> Result<(String, PathBuf), Failure> {
    if let Some((id, path)) = arg.split_once('=') {
        if id.is_empty() {
            return Err(Failure(format!("{arg:?}: empty AdaptationSet id")));
        }
        return Ok((id.to_string(), PathBuf::from(path)));
    }
    let path = PathBuf::from(arg);
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or(arg);
    let owners: Vec<&str> = mp
        .adaptation_sets
        .iter()
        .filter(|s| {
            s.representations.iter().any(|r| {
                r.base_url
                    .as_deref()
                    .is_some_and(|u| u.trim().rsplit('/').next() == Some(name))
            })
        })
        .filter_map(|s| s.id.as_deref())
        .collect();
    match owners.as_slice() {
        [id] => Ok((id.to_string(), path)),
        [] => Err(Failure(format!("{arg}: no Representation BaseURL names this file; use id=path"))),
        _ => Err(Failure(format!("{arg}: several AdaptationSets reference this file; use id=path"))),
    }
}

fn load_sidecars(
    args: &[String],
    mp: &MediaPresentation,
    lenient: bool,
    err: &mut dyn Write,
) -> Result<BTreeMap<String, CueDocument>, Failure> {
    let mut docs = BTreeMap::new();
    for arg in args {
        let (id, path) = sidecar_key(arg, mp)?;
        let text = read(&path)?;
        let doc = if lenient {
            let parsed = parse_ttml_lenient(&text).map_err(|e| Failure(format!("{}: {e}", path.display())))?;
            for w in &parsed.warnings {
                let _ = writeln!(err, "{}: note: {w}", path.display());
            }
            parsed.value
        } else {
            parse_ttml(&text).map_err(|e| Failure(format!("{}: {e}", path.display())))?
        };
        if docs.insert(id.clone(), doc).is_some() {
            return Err(Failure(format!("two sidecars given for {id:?}")));
        }
    }
    Ok(docs)
}

fn cmd_validate(mpd: &Path, ttml: &[String], json: bool, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    let mp = load_mpd(mpd, err)?;
    let docs = load_sidecars(ttml, &mp, true, err)?;
    let report = validate(&mp, &docs);
    if json {
        json_line(out, &report)?;
    } else {
        for f in &report.findings {
            writeln!(out, "{f}")?;
        }
        writeln!(
            out,
            "{} error(s), {} warning(s), {} info",
            report.count(Severity::Error),
            report.count(Severity::Warning),
            report.count(Severity::Info)
        )?;
    }
    Ok(if report.has_errors() { EXIT_FINDINGS } else { EXIT_OK })
}

fn cmd_catalog(mpd: &Path, json: bool, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    let cat = classify(&load_mpd(mpd, err)?);
    if json {
        json_line(out, &cat)?;
        return Ok(EXIT_OK);
    }
    let lang = |l: &Option<String>| l.clone().unwrap_or_else(|| "-".into());
    for s in &cat.subtitles {
        writeln!(
            out,
            "subtitle {} lang={} role={:?} hardOfHearing={} easyToRead={}",
            s.adaptation_set_id,
            lang(&s.lang),
            s.role,
            s.hard_of_hearing,
            s.easy_to_read
        )?;
    }
    for a in &cat.audio {
        writeln!(out, "audio {} lang={} kind={:?} mix={:?}", a.adaptation_set_id, lang(&a.lang), a.kind, a.mix)?;
        for v in &a.variants {
            writeln!(out, "  variant {} gain={} mode={}", v.representation_id, v.variant.gain, v.variant.mode)?;
        }
        if let Some(m) = &a.ambisonic {
            writeln!(out, "  ambi-map \"{}\" ({:?})", m.to_value(), m.strength)?;
        }
    }
    for s in &cat.sign_language {
        writeln!(
            out,
            "sign-language video={} metadata={} signLang={}",
            s.video_adaptation_set_id, s.metadata_adaptation_set_id, s.sign_lang
        )?;
    }
    for w in &cat.warnings {
        writeln!(out, "{w}")?;
    }
    Ok(EXIT_OK)
}

fn cmd_ambi(action: AmbiAction, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    match action {
        AmbiAction::Parse { value, json } => {
            let entries = parse_channel_map(&value)?;
            if json {
                json_line(out, &entries)?;
            } else {
                for (i, e) in entries.iter().enumerate() {
                    let role = match e {
                        crate::ambisonics::ChannelRole::Acn(n) => format!("ACN {n}"),
                        crate::ambisonics::ChannelRole::HeadLockLeft => "head-lock left".into(),
                        crate::ambisonics::ChannelRole::HeadLockRight => "head-lock right".into(),
                        crate::ambisonics::ChannelRole::HeadLockMono => "head-lock mono".into(),
                    };
                    writeln!(out, "channel {}: {role}", i + 1)?;
                }
            }
            Ok(EXIT_OK)
        }
        AmbiAction::Resolve { mpd, preselection } => {
            let mp = load_mpd(&mpd, err)?;
            let chosen: Vec<_> = match &preselection {
                None => mp.preselections.iter().collect(),
                Some(key) => {
                    let by_id = mp.preselections.iter().find(|p| p.id.as_deref() == Some(key.as_str()));
                    let by_pos = key.parse::<usize>().ok().and_then(|n| n.checked_sub(1)).and_then(|i| mp.preselections.get(i));
                    vec![by_id.or(by_pos).ok_or_else(|| Failure(format!("no preselection {key:?}")))?]
                }
            };
            let layouts = chosen
                .into_iter()
                .map(|p| resolve_preselection(&mp, p))
                .collect::<Result<Vec<_>, _>>()?;
            if preselection.is_some() {
                json_line(out, &layouts[0])?;
            } else {
                json_line(out, &layouts)?;
            }
            Ok(EXIT_OK)
        }
    }
}

fn cmd_annotate(
    ttml: &Path,
    cue: &str,
    azimuth: f64,
    elevation: f64,
    output: &Option<PathBuf>,
    out: &mut dyn Write,
) -> Outcome {
    let d = Direction::new(azimuth, elevation)?;
    let doc = parse_ttml(&read(ttml)?).map_err(|e| Failure(format!("{}: {e}", ttml.display())))?;
    let text = serialize_ttml(&annotate_direction(&doc, cue, d)?)?;
    write_output(output, out, text.as_bytes())?;
    Ok(EXIT_OK)
}

#[allow(clippy::too_many_arguments)]
fn cmd_simulate(
    mpd: &Path,
    ttml: &[String],
    prefs: &Path,
    trace: &Path,
    output: &Option<PathBuf>,
    format: OutputFormat,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Outcome {
    let mp = load_mpd(mpd, err)?;
    let docs = load_sidecars(ttml, &mp, false, err)?;
    let prefs: UserPreferences =
        serde_json::from_str(&read(prefs)?).map_err(|e| Failure(format!("{}: {e}", prefs.display())))?;
    let trace: ViewportTrace =
        serde_json::from_str(&read(trace)?).map_err(|e| Failure(format!("{}: {e}", trace.display())))?;
    let dirs = match simulate(&mp, &docs, &prefs, &trace) {
        Ok(d) => d,
        Err(e @ SimError::SelectionFailed(_)) => {
            writeln!(err, "error: {e}")?;
            return Ok(EXIT_FINDINGS);
        }
        Err(e) => return Err(e.into()),
    };
    let mut bytes = Vec::new();
    write_directives(&dirs, format, &mut bytes)?;
    if format == OutputFormat::Json {
        bytes.push(b'\n');
    }
    write_output(output, out, &bytes)?;
    Ok(EXIT_OK)
}

/// Runs one command line and returns its exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_FAILURE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    let outcome = match cli.command {
        Command::Validate { mpd, ttml, json } => cmd_validate(&mpd, &ttml, json, out, err),
        Command::Catalog { mpd, json } => cmd_catalog(&mpd, json, out, err),
        Command::Ambi { action } => cmd_ambi(action, out, err),
        Command::Annotate {
            ttml,
            cue,
            azimuth,
            elevation,
            output,
        } => cmd_annotate(&ttml, &cue, azimuth, elevation, &output, out),
        Command::Simulate {
            mpd,
            ttml,
            prefs,
            trace,
            output,
            format,
        } => cmd_simulate(&mpd, &ttml, &prefs, &trace, &output, format, out, err),
    };
    match outcome {
        Ok(code) => code,
        Err(Failure(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_FAILURE
        }
    }
}
