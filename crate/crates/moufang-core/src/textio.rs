//! Plain-text file formats.
//!
//! All formats share one lexical convention: lines whose first non-blank
//! character is `#` are comments, blank lines are skipped, trailing
//! whitespace is ignored.
//!
//! * Cayley table: first payload line is the order `n`, followed by `n`
//!   lines of `n` space-separated 0-based indices.
//! * Generator set: first payload line is the degree `n`, followed by one
//!   image row per generator.
//! * Triple system: header `MTS n` or `STS n`, then one block (3 points)
//!   per line, blocks sorted lexicographically.
//! * Arithmetic forms: key-value records, one `form <k>` block per
//!   representative with `phi` / `psi` image rows and central element `c`.

use crate::error::Error;
use crate::loop_table::{validate_quasigroup, LoopTable};
use crate::perm::Perm;
use crate::quasigroup::{TripleKind, TripleSystem};
use crate::Result;
use std::fs;
use std::io::Write;
use std::path::Path;

/// Payload lines of a text file: (1-based line number, trimmed content).
fn payload_lines(text: &str) -> Vec<(usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end()))
        .filter(|(_, l)| {
            let t = l.trim_start();
            !t.is_empty() && !t.starts_with('#')
        })
        .collect()
}

fn parse_row(line: usize, s: &str) -> Result<Vec<u16>> {
    s.split_whitespace()
        .map(|tok| {
            tok.parse::<u16>().map_err(|_| Error::Parse {
                line,
                msg: format!("`{tok}` is not a 0-based index"),
            })
        })
        .collect()
}

/// Parses the Cayley-table text format.
pub fn parse_loop_table(text: &str) -> Result<LoopTable> {
    let lines = payload_lines(text);
    let (first_line, first) = *lines.first().ok_or(Error::Parse {
        line: 1,
        msg: "empty table file".into(),
    })?;
    let n: usize = first.trim().parse().map_err(|_| Error::Parse {
        line: first_line,
        msg: format!("expected order, found `{first}`"),
    })?;
    if lines.len() != n + 1 {
        return Err(Error::Parse {
            line: lines.last().map(|&(l, _)| l).unwrap_or(first_line),
            msg: format!("expected {n} rows, found {}", lines.len() - 1),
        });
    }
    let mut rows = Vec::with_capacity(n);
    for &(lineno, line) in &lines[1..] {
        let row = parse_row(lineno, line)?;
        if row.len() != n {
            return Err(Error::Parse {
                line: lineno,
                msg: format!("expected {n} entries, found {}", row.len()),
            });
        }
        rows.push(row);
    }
    validate_quasigroup(&rows)
}

pub fn read_loop_table(path: &Path) -> Result<LoopTable> {
    parse_loop_table(&fs::read_to_string(path)?)
}

/// Serializes a Cayley table; `comments` become leading `#` lines.
pub fn format_loop_table(t: &LoopTable, comments: &[String]) -> String {
    let n = t.order();
    let mut out = String::new();
    for c in comments {
        out.push_str(&format!("# {c}\n"));
    }
    out.push_str(&format!("{n}\n"));
    for x in 0..n as u16 {
        let row: Vec<String> = (0..n as u16).map(|y| t.add(x, y).to_string()).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

/// Parses the generator-set format into permutations of a common degree.
pub fn parse_generators(text: &str) -> Result<(usize, Vec<Perm>)> {
    let lines = payload_lines(text);
    let (first_line, first) = *lines.first().ok_or(Error::Parse {
        line: 1,
        msg: "empty generator file".into(),
    })?;
    let n: usize = first.trim().parse().map_err(|_| Error::Parse {
        line: first_line,
        msg: format!("expected degree, found `{first}`"),
    })?;
    let mut gens = Vec::new();
    for &(lineno, line) in &lines[1..] {
        let row = parse_row(lineno, line)?;
        if row.len() != n {
            return Err(Error::Parse {
                line: lineno,
                msg: format!("expected {n} images, found {}", row.len()),
            });
        }
        gens.push(Perm::from_images(row).map_err(|e| Error::Parse {
            line: lineno,
            msg: e.to_string(),
        })?);
    }
    Ok((n, gens))
}

pub fn read_generators(path: &Path) -> Result<(usize, Vec<Perm>)> {
    parse_generators(&fs::read_to_string(path)?)
}

pub fn format_generators(degree: usize, gens: &[Perm], comments: &[String]) -> String {
    let mut out = String::new();
    for c in comments {
        out.push_str(&format!("# {c}\n"));
    }
    out.push_str(&format!("{degree}\n"));
    for g in gens {
        let row: Vec<String> = g.images().iter().map(|v| v.to_string()).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

/// Serializes a triple system: header plus lexicographically sorted blocks.
pub fn format_triple_system(ts: &TripleSystem, comments: &[String]) -> String {
    let mut out = String::new();
    for c in comments {
        out.push_str(&format!("# {c}\n"));
    }
    let tag = match ts.kind() {
        TripleKind::Steiner => "STS",
        TripleKind::Mendelsohn => "MTS",
    };
    out.push_str(&format!("{tag} {}\n", ts.points()));
    for b in ts.blocks() {
        out.push_str(&format!("{} {} {}\n", b[0], b[1], b[2]));
    }
    out
}

pub fn parse_triple_system(text: &str) -> Result<TripleSystem> {
    let lines = payload_lines(text);
    let (first_line, first) = *lines.first().ok_or(Error::Parse {
        line: 1,
        msg: "empty triple-system file".into(),
    })?;
    let mut toks = first.split_whitespace();
    let kind = match toks.next() {
        Some("STS") => TripleKind::Steiner,
        Some("MTS") => TripleKind::Mendelsohn,
        other => {
            return Err(Error::Parse {
                line: first_line,
                msg: format!("expected STS or MTS header, found {other:?}"),
            })
        }
    };
    let n: usize = toks
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or(Error::Parse {
            line: first_line,
            msg: "header is missing the point count".into(),
        })?;
    let mut blocks = Vec::with_capacity(lines.len() - 1);
    for &(lineno, line) in &lines[1..] {
        let row = parse_row(lineno, line)?;
        if row.len() != 3 {
            return Err(Error::Parse {
                line: lineno,
                msg: format!("a block has 3 points, found {}", row.len()),
            });
        }
        blocks.push([row[0], row[1], row[2]]);
    }
    TripleSystem::new(kind, n, blocks)
}

pub fn read_triple_system(path: &Path) -> Result<TripleSystem> {
    parse_triple_system(&fs::read_to_string(path)?)
}

/// One dumped arithmetic form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormEntry {
    pub phi: Vec<u16>,
    pub psi: Vec<u16>,
    pub c: u16,
    pub mendelsohn: Option<bool>,
    pub steiner: Option<bool>,
}

/// A dumped classification result: loop id, kind and representative forms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormsDump {
    pub loop_id: String,
    pub kind: String,
    pub entries: Vec<FormEntry>,
}

pub fn format_forms(dump: &FormsDump, comments: &[String]) -> String {
    let mut out = String::new();
    for c in comments {
        out.push_str(&format!("# {c}\n"));
    }
    out.push_str(&format!("loop {}\n", dump.loop_id));
    out.push_str(&format!("kind {}\n", dump.kind));
    out.push_str(&format!("count {}\n", dump.entries.len()));
    for (i, e) in dump.entries.iter().enumerate() {
        out.push_str(&format!("form {i}\n"));
        let images = |v: &[u16]| {
            v.iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(" ")
        };
        out.push_str(&format!("phi {}\n", images(&e.phi)));
        out.push_str(&format!("psi {}\n", images(&e.psi)));
        out.push_str(&format!("c {}\n", e.c));
        if let Some(m) = e.mendelsohn {
            out.push_str(&format!("mendelsohn {m}\n"));
        }
        if let Some(s) = e.steiner {
            out.push_str(&format!("steiner {s}\n"));
        }
    }
    out
}

pub fn parse_forms(text: &str) -> Result<FormsDump> {
    let lines = payload_lines(text);
    let mut loop_id = None;
    let mut kind = None;
    let mut count: Option<usize> = None;
    let mut entries: Vec<FormEntry> = Vec::new();
    for &(lineno, line) in &lines {
        let (key, rest) = match line.trim_start().split_once(' ') {
            Some((k, r)) => (k, r.trim()),
            None => (line.trim(), ""),
        };
        let parse_err = |msg: String| Error::Parse { line: lineno, msg };
        match key {
            "loop" => loop_id = Some(rest.to_string()),
            "kind" => kind = Some(rest.to_string()),
            "count" => {
                count = Some(
                    rest.parse()
                        .map_err(|_| parse_err(format!("bad count `{rest}`")))?,
                )
            }
            "form" => {
                let idx: usize = rest
                    .parse()
                    .map_err(|_| parse_err(format!("bad form index `{rest}`")))?;
                if idx != entries.len() {
                    return Err(parse_err(format!(
                        "form indices must be consecutive, expected {}",
                        entries.len()
                    )));
                }
                entries.push(FormEntry {
                    phi: Vec::new(),
                    psi: Vec::new(),
                    c: 0,
                    mendelsohn: None,
                    steiner: None,
                });
            }
            "phi" | "psi" | "c" | "mendelsohn" | "steiner" => {
                let e = entries
                    .last_mut()
                    .ok_or_else(|| parse_err(format!("`{key}` before any `form`")))?;
                match key {
                    "phi" => e.phi = parse_row(lineno, rest)?,
                    "psi" => e.psi = parse_row(lineno, rest)?,
                    "c" => {
                        e.c = rest
                            .parse()
                            .map_err(|_| parse_err(format!("bad c `{rest}`")))?
                    }
                    "mendelsohn" => {
                        e.mendelsohn = Some(rest.parse().map_err(|_| {
                            parse_err(format!("bad mendelsohn flag `{rest}`"))
                        })?)
                    }
                    "steiner" => {
                        e.steiner = Some(
                            rest.parse()
                                .map_err(|_| parse_err(format!("bad steiner flag `{rest}`")))?,
                        )
                    }
                    _ => unreachable!(),
                }
            }
            other => {
                return Err(parse_err(format!("unknown key `{other}`")));
            }
        }
    }
    let dump = FormsDump {
        loop_id: loop_id.ok_or(Error::Parse {
            line: 1,
            msg: "missing `loop` line".into(),
        })?,
        kind: kind.ok_or(Error::Parse {
            line: 1,
            msg: "missing `kind` line".into(),
        })?,
        entries,
    };
    if let Some(c) = count {
        if c != dump.entries.len() {
            return Err(Error::Parse {
                line: 1,
                msg: format!("count says {c} but {} forms present", dump.entries.len()),
            });
        }
    }
    Ok(dump)
}

pub fn read_forms(path: &Path) -> Result<FormsDump> {
    parse_forms(&fs::read_to_string(path)?)
}

/// Atomically writes `content` to `path` (temp file + rename).
pub fn write_atomic(path: &Path, content: &str) -> Result<()> {
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    fs::create_dir_all(dir)?;
    let tmp = dir.join(format!(
        ".{}.tmp{}",
        path.file_name().and_then(|s| s.to_str()).unwrap_or("out"),
        std::process::id()
    ));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(content.as_bytes())?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::abelian_group;

    #[test]
    fn table_roundtrip_with_comments() {
        let t = abelian_group(&[3, 3]);
        let text = format_loop_table(&t, &["seed 42".into()]);
        let back = parse_loop_table(&text).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn table_parse_reports_line_numbers() {
        let bad = "# header\n3\n0 1 2\n1 2 0\n2 0 x\n";
        match parse_loop_table(bad) {
            Err(Error::Parse { line: 5, .. }) => {}
            other => panic!("unexpected result {other:?}"),
        }
    }

    #[test]
    fn generator_roundtrip() {
        let gens = vec![
            Perm::from_images(vec![1, 2, 0]).unwrap(),
            Perm::from_images(vec![0, 2, 1]).unwrap(),
        ];
        let text = format_generators(3, &gens, &[]);
        let (n, back) = parse_generators(&text).unwrap();
        assert_eq!(n, 3);
        assert_eq!(back, gens);
    }

    #[test]
    fn forms_roundtrip() {
        let dump = FormsDump {
            loop_id: "Z(3)".into(),
            kind: "distributive".into(),
            entries: vec![FormEntry {
                phi: vec![0, 2, 1],
                psi: vec![0, 2, 1],
                c: 0,
                mendelsohn: Some(true),
                steiner: Some(true),
            }],
        };
        let text = format_forms(&dump, &["seed 1".into()]);
        assert_eq!(parse_forms(&text).unwrap(), dump);
    }
}
