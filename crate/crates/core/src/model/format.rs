//! Line-oriented text format for detector models.
//!
//! ```text
//! DETMODEL v1
//! # family=CSR L=3
//! dets 2
//! faults 3
//! strips 1
//! strip 0 0
//! strip 1 0
//! fault 0 0
//! fault 1 0 1
//! fault 2 1
//! ```
//!
//! Tokens are whitespace separated and `#` starts a comment. `strips` is
//! optional and defaults to one more than the largest strip index. Every
//! detector needs exactly one `strip` line and every fault exactly one
//! `fault` line (a fault line without detectors is an orphan fault).

use std::fmt::Write as _;

use super::{DetectorModel, ModelError};

pub const HEADER: &str = "DETMODEL v1";

/// Renders `model` with optional `# ...` comment lines after the header.
pub fn write_detmodel(model: &DetectorModel, comments: &[String]) -> String {
    let mut out = String::new();
    out.push_str(HEADER);
    out.push('\n');
    for c in comments {
        let _ = writeln!(out, "# {c}");
    }
    let _ = writeln!(out, "dets {}", model.n_det());
    let _ = writeln!(out, "faults {}", model.n_fault());
    let _ = writeln!(out, "strips {}", model.n_strips());
    for (d, s) in model.strip_of_detector().iter().enumerate() {
        let _ = writeln!(out, "strip {d} {s}");
    }
    for (f, support) in model.fault_supports().iter().enumerate() {
        let _ = write!(out, "fault {f}");
        for d in support {
            let _ = write!(out, " {d}");
        }
        out.push('\n');
    }
    out
}

fn parse_err(line: usize, message: impl Into<String>) -> ModelError {
    ModelError::Parse {
        line,
        message: message.into(),
    }
}

fn number(tok: Option<&str>, line: usize, what: &str) -> Result<usize, ModelError> {
    let tok = tok.ok_or_else(|| parse_err(line, format!("missing {what}")))?;
    tok.parse()
        .map_err(|_| parse_err(line, format!("invalid {what} `{tok}`")))
}

pub fn parse_detmodel(text: &str) -> Result<DetectorModel, ModelError> {
    let mut seen_header = false;
    let mut n_det: Option<usize> = None;
    let mut n_fault: Option<usize> = None;
    let mut n_strips: Option<usize> = None;
    let mut strips: Vec<Option<usize>> = Vec::new();
    let mut supports: Vec<Option<Vec<usize>>> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if !seen_header {
            if content.split_whitespace().collect::<Vec<_>>() != ["DETMODEL", "v1"] {
                return Err(parse_err(line_no, format!("expected `{HEADER}` header")));
            }
            seen_header = true;
            continue;
        }
        let mut toks = content.split_whitespace();
        let keyword = toks.next().unwrap_or_default();
        match keyword {
            "dets" => {
                if n_det.is_some() {
                    return Err(parse_err(line_no, "duplicate `dets` line"));
                }
                let n = number(toks.next(), line_no, "detector count")?;
                n_det = Some(n);
                strips = vec![None; n];
            }
            "faults" => {
                if n_fault.is_some() {
                    return Err(parse_err(line_no, "duplicate `faults` line"));
                }
                let n = number(toks.next(), line_no, "fault count")?;
                n_fault = Some(n);
                supports = vec![None; n];
            }
            "strips" => {
                n_strips = Some(number(toks.next(), line_no, "strip count")?);
            }
            "strip" => {
                let n = n_det.ok_or_else(|| parse_err(line_no, "`strip` before `dets`"))?;
                let d = number(toks.next(), line_no, "detector index")?;
                let s = number(toks.next(), line_no, "strip index")?;
                if d >= n {
                    return Err(parse_err(line_no, format!("detector {d} out of range")));
                }
                if strips[d].replace(s).is_some() {
                    return Err(parse_err(line_no, format!("detector {d} assigned twice")));
                }
            }
            "fault" => {
                let n = n_fault.ok_or_else(|| parse_err(line_no, "`fault` before `faults`"))?;
                let f = number(toks.next(), line_no, "fault index")?;
                if f >= n {
                    return Err(parse_err(line_no, format!("fault {f} out of range")));
                }
                let dets = toks
                    .by_ref()
                    .map(|t| number(Some(t), line_no, "detector index"))
                    .collect::<Result<Vec<_>, _>>()?;
                if supports[f].replace(dets).is_some() {
                    return Err(parse_err(line_no, format!("fault {f} listed twice")));
                }
            }
            other => return Err(parse_err(line_no, format!("unknown keyword `{other}`"))),
        }
        if toks.next().is_some() {
            return Err(parse_err(
                line_no,
                format!("trailing tokens after `{keyword}`"),
            ));
        }
    }

    if !seen_header {
        return Err(parse_err(0, format!("missing `{HEADER}` header")));
    }
    let n_det = n_det.ok_or_else(|| parse_err(0, "missing `dets` line"))?;
    n_fault.ok_or_else(|| parse_err(0, "missing `faults` line"))?;
    let strip_of_detector = strips
        .into_iter()
        .enumerate()
        .map(|(d, s)| s.ok_or_else(|| parse_err(0, format!("detector {d} has no strip"))))
        .collect::<Result<Vec<_>, _>>()?;
    let fault_supports = supports
        .into_iter()
        .enumerate()
        .map(|(f, s)| s.ok_or_else(|| parse_err(0, format!("fault {f} has no `fault` line"))))
        .collect::<Result<Vec<_>, _>>()?;
    let n_strips = n_strips.unwrap_or_else(|| strip_of_detector.iter().max().map_or(0, |m| m + 1));
    DetectorModel::new(n_det, n_strips, fault_supports, strip_of_detector)
}
