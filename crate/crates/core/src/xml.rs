//! Namespace constants and a small indenting XML writer.

use std::fmt::Write;

pub const DASH_NS: &str = "urn:mpeg:dash:schema:mpd:2011";
pub const IMAC_NS: &str = "http://www.imac-project.eu";
/// Placeholder URI printed in the published AD sample; accepted on input only.
pub const IMAC_PLACEHOLDER_NS: &str = "namespace:for:imac:audiodescription";
pub const TTML_NS: &str = "http://www.w3.org/ns/ttml";
pub const TTS_NS: &str = "http://www.w3.org/ns/ttml#styling";
pub const ITTP_NS: &str = "http://www.w3.org/ns/ttml/profile/imsc1#parameter";
pub const EBUTTM_NS: &str = "urn:ebu:tt:metadata";
pub const XML_NS: &str = "http://www.w3.org/XML/1998/namespace";

/// XPath-like location of `node`. Steps carry an `[@attr='..']` predicate
/// when `id_attr` yields a value, otherwise a 1-based position when the
/// element has same-named siblings.
pub fn element_path(node: roxmltree::Node, id_attr: &dyn Fn(&roxmltree::Node) -> Option<(String, String)>) -> String {
    let mut parts = Vec::new();
    let mut cur = Some(node);
    while let Some(n) = cur {
        if n.is_element() {
            let name = n.tag_name().name();
            let step = match id_attr(&n) {
                Some((label, id)) => format!("{name}[@{label}='{id}']"),
                None => {
                    let same: Vec<_> = n
                        .parent()
                        .map(|p| {
                            p.children()
                                .filter(|c| c.is_element() && c.tag_name().name() == name)
                                .collect()
                        })
                        .unwrap_or_default();
                    if same.len() > 1 {
                        let idx = same.iter().position(|c| *c == n).unwrap_or(0) + 1;
                        format!("{name}[{idx}]")
                    } else {
                        name.to_string()
                    }
                }
            };
            parts.push(step);
        }
        cur = n.parent();
    }
    parts.reverse();
    format!("/{}", parts.join("/"))
}

pub fn is_imac_ns(uri: &str) -> bool {
    uri == IMAC_NS || uri == IMAC_PLACEHOLDER_NS
}

pub fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            '\n' => out.push_str("&#10;"),
            '\r' => out.push_str("&#13;"),
            '\t' => out.push_str("&#9;"),
            c => out.push(c),
        }
    }
    out
}

/// Formats a number the way the sample documents write angles: integers
/// without a fractional part, never "-0".
pub fn format_number(v: f64) -> String {
    let v = v + 0.0;
    format!("{v}")
}

pub(crate) struct Writer {
    out: String,
    depth: usize,
}

impl Writer {
    pub fn new() -> Self {
        Writer {
            out: String::from("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"),
            depth: 0,
        }
    }

    fn indent(&mut self) {
        for _ in 0..self.depth {
            self.out.push_str("  ");
        }
    }

    fn open_tag(&mut self, name: &str, attrs: &[(&str, String)]) {
        self.indent();
        self.out.push('<');
        self.out.push_str(name);
        for (k, v) in attrs {
            let _ = write!(self.out, " {}=\"{}\"", k, escape(v));
        }
    }

    pub fn start(&mut self, name: &str, attrs: &[(&str, String)]) {
        self.open_tag(name, attrs);
        self.out.push_str(">\n");
        self.depth += 1;
    }

    pub fn end(&mut self, name: &str) {
        self.depth -= 1;
        self.indent();
        let _ = writeln!(self.out, "</{name}>");
    }

    pub fn empty(&mut self, name: &str, attrs: &[(&str, String)]) {
        self.open_tag(name, attrs);
        self.out.push_str("/>\n");
    }

    /// An element whose content is written verbatim on one line.
    pub fn inline(&mut self, name: &str, attrs: &[(&str, String)], raw_content: &str) {
        self.open_tag(name, attrs);
        let _ = writeln!(self.out, ">{raw_content}</{name}>");
    }

    pub fn finish(self) -> String {
        self.out
    }
}
