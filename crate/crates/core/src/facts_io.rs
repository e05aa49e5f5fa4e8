//! Fact files: one tuple per line, fields separated by a delimiter (TAB by
//! default), with an optional trailing `@PC` field.
//!
//! ```text
//! Athens<TAB>Rome<TAB>@Sea
//! NYC<TAB>Athens<TAB>@!Land
//! Rome<TAB>Paris
//! ```
//!
//! A field may be wrapped in double quotes; the quoted field runs to the first
//! `"` that is followed by the delimiter or the end of the line, and its
//! content is taken verbatim. Only an unquoted final field that starts with
//! `@` is a presence condition. Empty lines are skipped. The empty tuple of a
//! nullary relation is written `()`.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::engine::{Database, EngineError};
use crate::pcbdd::BddManager;
use crate::syntax::{parse_pc, pc_to_bdd, print_pc, ParseError, PcExpr, RelationDecl};

pub const DEFAULT_DELIMITER: char = '\t';

#[derive(Debug, Error)]
pub enum FactsError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{}: missing fact file for input relation `{relation}`", path.display())]
    MissingInput { relation: String, path: PathBuf },
    #[error("{}:{line}: expected {expected} fields for `{relation}`, found {found}", path.display())]
    Arity {
        path: PathBuf,
        relation: String,
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("{}:{line}:{column}: {message}", path.display())]
    Malformed {
        path: PathBuf,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("cannot write value {value:?} of `{relation}` with delimiter {delimiter:?}")]
    Unrepresentable {
        relation: String,
        value: String,
        delimiter: char,
    },
    #[error(transparent)]
    Engine(#[from] EngineError),
}

/// One parsed line of a fact file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactRecord {
    pub values: Vec<String>,
    pub pc: PcExpr,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WriteMode {
    WithPcs,
    Plain,
}

#[derive(Debug, PartialEq, Eq)]
struct Field<'a> {
    text: &'a str,
    quoted: bool,
    /// 1-based character column where the field starts.
    column: usize,
}

fn split_fields(line: &str, delimiter: char) -> Result<Vec<Field<'_>>, (usize, String)> {
    let mut fields = Vec::new();
    let mut rest = line;
    let mut column = 1;
    loop {
        if let Some(body) = rest.strip_prefix('"') {
            let mut end = None;
            for (i, c) in body.char_indices() {
                if c == '"' {
                    let after = &body[i + 1..];
                    if after.is_empty() || after.starts_with(delimiter) {
                        end = Some(i);
                        break;
                    }
                }
            }
            let Some(end) = end else {
                return Err((column, "unterminated quoted field".into()));
            };
            let text = &body[..end];
            fields.push(Field {
                text,
                quoted: true,
                column,
            });
            let after = &body[end + 1..];
            column += text.chars().count() + 2;
            match after.strip_prefix(delimiter) {
                Some(r) => {
                    rest = r;
                    column += 1;
                }
                None => return Ok(fields),
            }
        } else {
            match rest.find(delimiter) {
                Some(i) => {
                    fields.push(Field {
                        text: &rest[..i],
                        quoted: false,
                        column,
                    });
                    column += rest[..i].chars().count() + 1;
                    rest = &rest[i + delimiter.len_utf8()..];
                }
                None => {
                    fields.push(Field {
                        text: rest,
                        quoted: false,
                        column,
                    });
                    return Ok(fields);
                }
            }
        }
    }
}

/// Parses the content of a fact file for `decl`. `path` is only used in
/// error messages.
pub fn parse_facts(
    text: &str,
    decl: &RelationDecl,
    delimiter: char,
    path: &Path,
) -> Result<Vec<FactRecord>, FactsError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        if line.is_empty() {
            continue;
        }
        let malformed = |column: usize, message: String| FactsError::Malformed {
            path: path.to_owned(),
            line: line_no,
            column,
            message,
        };
        let mut fields = split_fields(line, delimiter).map_err(|(c, m)| malformed(c, m))?;

        let pc = match fields.last() {
            Some(f) if !f.quoted && f.text.starts_with('@') => {
                let pc_text = &f.text[1..];
                let pc = parse_pc(pc_text).map_err(|e| match e {
                    ParseError::Syntax {
                        line: 1,
                        column,
                        message,
                    } => malformed(f.column + column, message),
                    other => malformed(f.column + 1, other.to_string()),
                })?;
                fields.pop();
                pc
            }
            _ => PcExpr::True,
        };

        let values: Vec<String> = if decl.arity() == 0
            && fields.len() == 1
            && !fields[0].quoted
            && fields[0].text == "()"
        {
            Vec::new()
        } else {
            fields.iter().map(|f| f.text.to_owned()).collect()
        };
        if values.len() != decl.arity() {
            return Err(FactsError::Arity {
                path: path.to_owned(),
                relation: decl.name.clone(),
                line: line_no,
                expected: decl.arity(),
                found: values.len(),
            });
        }
        out.push(FactRecord { values, pc });
    }
    Ok(out)
}

/// Reads the fact file at `path` for `decl`.
pub fn read_facts(
    path: &Path,
    decl: &RelationDecl,
    delimiter: char,
) -> Result<Vec<FactRecord>, FactsError> {
    let text = fs::read_to_string(path).map_err(|source| {
        if source.kind() == io::ErrorKind::NotFound && decl.input {
            FactsError::MissingInput {
                relation: decl.name.clone(),
                path: path.to_owned(),
            }
        } else {
            FactsError::Io {
                path: path.to_owned(),
                source,
            }
        }
    })?;
    parse_facts(&text, decl, delimiter, path)
}

/// Inserts records into `relation`, compiling their presence conditions.
/// Records whose condition is unsatisfiable exist in no configuration and
/// are skipped. With `ignore_pcs` every record is loaded as `True`.
/// Returns the number of records inserted.
pub fn load_records(
    db: &mut Database,
    relation: &str,
    records: &[FactRecord],
    ignore_pcs: bool,
    mgr: &mut BddManager,
) -> Result<usize, FactsError> {
    let mut loaded = 0;
    for r in records {
        let pc = if ignore_pcs {
            mgr.pc_true()
        } else {
            pc_to_bdd(&r.pc, mgr)
        };
        if !pc.is_sat() {
            continue;
        }
        db.insert_fact(relation, &r.values, pc, mgr)?;
        loaded += 1;
    }
    Ok(loaded)
}

fn needs_quotes(value: &str, delimiter: char) -> bool {
    value.is_empty()
        || value.contains(delimiter)
        || value.starts_with('@')
        || value.starts_with('"')
}

fn push_field(
    out: &mut String,
    relation: &str,
    value: &str,
    delimiter: char,
) -> Result<(), FactsError> {
    let unrepresentable = || FactsError::Unrepresentable {
        relation: relation.to_owned(),
        value: value.to_owned(),
        delimiter,
    };
    if value.contains(['\n', '\r']) {
        return Err(unrepresentable());
    }
    if needs_quotes(value, delimiter) {
        let mut closing = String::from('"');
        closing.push(delimiter);
        if value.contains(&closing) || value.ends_with('"') {
            return Err(unrepresentable());
        }
        out.push('"');
        out.push_str(value);
        out.push('"');
    } else {
        out.push_str(value);
    }
    Ok(())
}

/// Renders `relation` in fact-file format, sorted lexicographically by tuple.
/// In [`WriteMode::WithPcs`] every condition other than `True` is appended
/// as a final `@PC` field.
pub fn format_facts(
    db: &Database,
    relation: &str,
    mode: WriteMode,
    delimiter: char,
    mgr: &BddManager,
) -> Result<String, FactsError> {
    let mut out = String::new();
    for (values, pc) in db.sorted_facts(relation)? {
        if values.is_empty() {
            out.push_str("()");
        }
        for (i, v) in values.iter().enumerate() {
            if i > 0 {
                out.push(delimiter);
            }
            push_field(&mut out, relation, v, delimiter)?;
        }
        if mode == WriteMode::WithPcs && !pc.is_true() {
            out.push(delimiter);
            out.push('@');
            out.push_str(&print_pc(pc, mgr));
        }
        out.push('\n');
    }
    Ok(out)
}

/// Writes `relation` to `path`, creating the parent directory if needed.
/// Returns the number of bytes written.
pub fn write_facts(
    path: &Path,
    db: &Database,
    relation: &str,
    mode: WriteMode,
    delimiter: char,
    mgr: &BddManager,
) -> Result<u64, FactsError> {
    let text = format_facts(db, relation, mode, delimiter, mgr)?;
    let io_err = |source| FactsError::Io {
        path: path.to_owned(),
        source,
    };
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(io_err)?;
    }
    fs::write(path, &text).map_err(io_err)?;
    Ok(text.len() as u64)
}
