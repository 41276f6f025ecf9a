//! The surface spec document: a small TOML file with a `faces` list and a
//! `glue` list.
//!
//! ```toml
//! faces = [
//!     { name = "hep", sides = 7, edge_length = "1" },
//!     { name = "hex", sides = 6, count = 7 },
//! ]
//! glue = [
//!     ["hep", 0, "hex.0", 3],
//!     ["hex.0", 2, "hex.1", 4, "flip"],
//! ]
//! ```
//!
//! `count = k` expands a face entry into `name.0 .. name.{k-1}`. The writer
//! emits one entry per face, faces sorted by name and gluings sorted
//! lexicographically, so equal surfaces serialize to identical bytes.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;
use std::ops::Range;

use num_rational::Rational64;
use serde::Deserialize;
use toml::Spanned;

use super::{FaceId, Length, SlotRef, Surface, SurfaceError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SpecError {
    #[error("{line}:{column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("{line}:{column}: gluing refers to unknown face `{name}`")]
    DanglingReference { name: String, line: usize, column: usize },
    #[error("{line}:{column}: slot {slot} is glued more than once")]
    DuplicateGluing { slot: String, line: usize, column: usize },
    #[error("{line}:{column}: face name `{name}` is declared twice")]
    DuplicateFace { name: String, line: usize, column: usize },
    #[error("{line}:{column}: {source}")]
    Surface { source: SurfaceError, line: usize, column: usize },
}

impl SpecError {
    pub fn code(&self) -> &'static str {
        match self {
            SpecError::Parse { .. } => "ParseError",
            SpecError::DanglingReference { .. } => "DanglingReference",
            SpecError::DuplicateGluing { .. } => "DuplicateGluing",
            SpecError::DuplicateFace { .. } => "DuplicateFace",
            SpecError::Surface { source, .. } => source.code(),
        }
    }

    pub fn position(&self) -> (usize, usize) {
        match self {
            SpecError::Parse { line, column, .. }
            | SpecError::DanglingReference { line, column, .. }
            | SpecError::DuplicateGluing { line, column, .. }
            | SpecError::DuplicateFace { line, column, .. }
            | SpecError::Surface { line, column, .. } => (*line, *column),
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Doc {
    #[serde(default)]
    faces: Vec<Spanned<FaceEntry>>,
    #[serde(default)]
    glue: Vec<Spanned<Vec<Spanned<toml::Value>>>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FaceEntry {
    name: Spanned<String>,
    sides: Spanned<i64>,
    #[serde(default)]
    edge_length: Option<Spanned<toml::Value>>,
    #[serde(default)]
    count: Option<Spanned<i64>>,
}

/// 1-based line and column of a byte offset.
fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let offset = offset.min(text.len());
    let before = &text[..offset];
    let line = before.matches('\n').count() + 1;
    let col = before.rfind('\n').map_or(offset, |p| offset - p - 1) + 1;
    (line, col)
}

struct Ctx<'a> {
    text: &'a str,
}

impl Ctx<'_> {
    fn pos(&self, span: Range<usize>) -> (usize, usize) {
        line_col(self.text, span.start)
    }

    fn parse_err(&self, span: Range<usize>, message: impl Into<String>) -> SpecError {
        let (line, column) = self.pos(span);
        SpecError::Parse { line, column, message: message.into() }
    }

    fn surface_err(&self, span: Range<usize>, source: SurfaceError) -> SpecError {
        let (line, column) = self.pos(span);
        SpecError::Surface { source, line, column }
    }
}

fn parse_length(v: &toml::Value) -> Option<Length> {
    match v {
        toml::Value::Integer(i) => Some(Rational64::from_integer(*i)),
        toml::Value::String(s) => {
            let s = s.trim();
            match s.split_once('/') {
                Some((a, b)) => {
                    let a: i64 = a.trim().parse().ok()?;
                    let b: i64 = b.trim().parse().ok()?;
                    (b != 0).then(|| Rational64::new(a, b))
                }
                None => s.parse::<i64>().ok().map(Rational64::from_integer),
            }
        }
        _ => None,
    }
}

/// Parse a spec document into a surface. Face ids follow declaration order.
pub fn parse_spec(text: &str) -> Result<Surface, SpecError> {
    let ctx = Ctx { text };
    let doc: Doc = toml::from_str(text).map_err(|e| {
        let (line, column) = e.span().map_or((1, 1), |s| line_col(text, s.start));
        SpecError::Parse { line, column, message: e.message().trim().to_string() }
    })?;

    let mut surface = Surface::new();
    let mut by_name: HashMap<String, FaceId> = HashMap::new();
    for entry in &doc.faces {
        let e = entry.get_ref();
        let sides = *e.sides.get_ref();
        if sides < 0 {
            return Err(ctx.parse_err(e.sides.span(), "sides must be a non-negative integer"));
        }
        let length = match &e.edge_length {
            None => Length::from_integer(1),
            Some(v) => parse_length(v.get_ref())
                .ok_or_else(|| ctx.parse_err(v.span(), "edge_length must be a rational like \"1\" or \"3/2\""))?,
        };
        let names: Vec<String> = match &e.count {
            None => vec![e.name.get_ref().clone()],
            Some(c) => {
                let k = *c.get_ref();
                if k < 1 {
                    return Err(ctx.parse_err(c.span(), "count must be at least 1"));
                }
                (0..k).map(|i| format!("{}.{}", e.name.get_ref(), i)).collect()
            }
        };
        for name in names {
            if by_name.contains_key(&name) {
                let (line, column) = ctx.pos(e.name.span());
                return Err(SpecError::DuplicateFace { name, line, column });
            }
            let id = surface
                .add_face_with_label(sides as usize, length, Some(name.clone()))
                .map_err(|err| ctx.surface_err(e.sides.span(), err))?;
            by_name.insert(name, id);
        }
    }

    let mut used: BTreeSet<SlotRef> = BTreeSet::new();
    for row in &doc.glue {
        let items = row.get_ref();
        if !(items.len() == 4 || items.len() == 5) {
            return Err(ctx.parse_err(row.span(), "gluing must be [faceA, slotA, faceB, slotB] with optional \"flip\""));
        }
        let mut slot_at = |k: usize| -> Result<SlotRef, SpecError> {
            let name_v = &items[k];
            let idx_v = &items[k + 1];
            let name = name_v
                .get_ref()
                .as_str()
                .ok_or_else(|| ctx.parse_err(name_v.span(), "face name must be a string"))?;
            let idx = idx_v
                .get_ref()
                .as_integer()
                .filter(|i| *i >= 0)
                .ok_or_else(|| ctx.parse_err(idx_v.span(), "slot index must be a non-negative integer"))?;
            let face = *by_name.get(name).ok_or_else(|| {
                let (line, column) = ctx.pos(name_v.span());
                SpecError::DanglingReference { name: name.to_string(), line, column }
            })?;
            let slot = SlotRef::new(face, idx as usize);
            if slot.index >= surface.face(face).sides {
                return Err(ctx.surface_err(idx_v.span(), SurfaceError::SlotOutOfRange(slot)));
            }
            if !used.insert(slot) {
                let (line, column) = ctx.pos(name_v.span());
                return Err(SpecError::DuplicateGluing { slot: format!("{name}:{idx}"), line, column });
            }
            Ok(slot)
        };
        let a = slot_at(0)?;
        let b = slot_at(2)?;
        let flipped = match items.get(4) {
            None => false,
            Some(v) if v.get_ref().as_str() == Some("flip") => true,
            Some(v) => return Err(ctx.parse_err(v.span(), "fifth gluing field must be \"flip\"")),
        };
        surface.glue(a, b, flipped).map_err(|err| ctx.surface_err(row.span(), err))?;
    }
    Ok(surface)
}

fn length_string(l: Length) -> String {
    if *l.denom() == 1 {
        l.numer().to_string()
    } else {
        format!("{}/{}", l.numer(), l.denom())
    }
}

fn quoted(s: &str) -> String {
    toml::Value::String(s.to_string()).to_string()
}

/// Stable names for every face: labels where present, `fNNNN` otherwise.
pub(crate) fn face_names(s: &Surface) -> Vec<String> {
    let width = s.face_count().saturating_sub(1).to_string().len().max(4);
    let taken: BTreeSet<&str> = s.faces().iter().filter_map(|f| f.label.as_deref()).collect();
    s.faces()
        .iter()
        .map(|f| match &f.label {
            Some(l) => l.clone(),
            None => {
                let mut name = format!("f{:0width$}", f.id.0);
                while taken.contains(name.as_str()) {
                    name.push('_');
                }
                name
            }
        })
        .collect()
}

/// Canonical serialization of a surface.
pub fn write_spec(s: &Surface) -> String {
    let names = face_names(s);
    let mut order: Vec<usize> = (0..s.face_count()).collect();
    order.sort_by(|&a, &b| names[a].cmp(&names[b]));

    let mut out = String::new();
    if order.is_empty() {
        out.push_str("faces = []\n");
    } else {
        out.push_str("faces = [\n");
        for i in order {
            let f = &s.faces()[i];
            let _ = writeln!(
                out,
                "    {{ name = {}, sides = {}, edge_length = \"{}\" }},",
                quoted(&names[i]),
                f.sides,
                length_string(f.edge_length)
            );
        }
        out.push_str("]\n");
    }

    let mut rows: BTreeMap<(String, usize, String, usize, bool), ()> = BTreeMap::new();
    for g in s.gluings() {
        let a = (names[g.a.face.0].clone(), g.a.index);
        let b = (names[g.b.face.0].clone(), g.b.index);
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        rows.insert((lo.0, lo.1, hi.0, hi.1, g.flipped), ());
    }
    if rows.is_empty() {
        out.push_str("glue = []\n");
    } else {
        out.push_str("glue = [\n");
        for (na, ia, nb, ib, flip) in rows.keys() {
            let _ = write!(out, "    [{}, {}, {}, {}", quoted(na), ia, quoted(nb), ib);
            if *flip {
                out.push_str(", \"flip\"");
            }
            out.push_str("],\n");
        }
        out.push_str("]\n");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const TWO_TRIANGLES: &str = r#"
faces = [
    { name = "a", sides = 3 },
    { name = "b", sides = 3, edge_length = "1" },
]
glue = [
    ["a", 0, "b", 0],
]
"#;

    #[test]
    fn two_triangles() {
        let s = parse_spec(TWO_TRIANGLES).unwrap();
        assert_eq!(s.counts(), (4, 5, 2));
    }

    #[test]
    fn count_expands_names() {
        let text = r#"
faces = [{ name = "hex", sides = 6, count = 3 }]
glue = [["hex.0", 0, "hex.2", 3, "flip"]]
"#;
        let s = parse_spec(text).unwrap();
        assert_eq!(s.face_count(), 3);
        assert_eq!(s.faces()[2].label.as_deref(), Some("hex.2"));
        assert!(s.gluings()[0].flipped);
    }

    #[test]
    fn dangling_reference_reports_position() {
        let text = "faces = [{ name = \"a\", sides = 3 }]\nglue = [[\"a\", 0, \"zz\", 1]]\n";
        let err = parse_spec(text).unwrap_err();
        assert_eq!(err.code(), "DanglingReference");
        assert_eq!(err.position(), (2, 18));
    }

    #[test]
    fn duplicate_gluing() {
        let text = r#"
faces = [{ name = "a", sides = 4 }, { name = "b", sides = 4 }]
glue = [["a", 0, "b", 0], ["a", 0, "b", 1]]
"#;
        assert_eq!(parse_spec(text).unwrap_err().code(), "DuplicateGluing");
    }

    #[test]
    fn syntax_error_has_line_and_column() {
        let text = "faces = [\n  { name = \"a\", sides = }\n]\n";
        let err = parse_spec(text).unwrap_err();
        assert_eq!(err.code(), "ParseError");
        assert_eq!(err.position().0, 2);
    }

    #[test]
    fn bad_values() {
        let cases = [
            ("faces = [{ name = \"a\", sides = 2 }]", "SidesTooSmall"),
            ("faces = [{ name = \"a\", sides = 3, edge_length = \"0\" }]", "NonPositiveLength"),
            ("faces = [{ name = \"a\", sides = 3, edge_length = \"x\" }]", "ParseError"),
            ("faces = [{ name = \"a\", sides = 3 }, { name = \"a\", sides = 3 }]", "DuplicateFace"),
            ("faces = [{ name = \"a\", sides = 3 }]\nglue = [[\"a\", 5, \"a\", 1]]", "SlotOutOfRange"),
            ("faces = [{ name = \"a\", sides = 3 }]\nglue = [[\"a\", 0, \"a\", 1, \"twist\"]]", "ParseError"),
            ("faces = [{ name = \"a\", sides = 3 }]\nglue = [[\"a\", 0]]", "ParseError"),
            ("bogus = 1", "ParseError"),
        ];
        for (text, code) in cases {
            assert_eq!(parse_spec(text).unwrap_err().code(), code, "{text}");
        }
    }

    #[test]
    fn canonical_output() {
        let s = parse_spec(TWO_TRIANGLES).unwrap();
        let text = write_spec(&s);
        assert_eq!(
            text,
            "faces = [\n    { name = \"a\", sides = 3, edge_length = \"1\" },\n    { name = \"b\", sides = 3, edge_length = \"1\" },\n]\nglue = [\n    [\"a\", 0, \"b\", 0],\n]\n"
        );
        assert_eq!(write_spec(&parse_spec(&text).unwrap()), text);
    }

    #[test]
    fn empty_document() {
        let s = parse_spec("").unwrap();
        assert_eq!(s.counts(), (0, 0, 0));
        assert_eq!(write_spec(&s), "faces = []\nglue = []\n");
    }

    #[test]
    fn unlabeled_faces_get_padded_names() {
        let mut s = Surface::new();
        s.add_face(4, Length::new(3, 2)).unwrap();
        let text = write_spec(&s);
        assert!(text.contains("name = \"f0000\""));
        assert!(text.contains("edge_length = \"3/2\""));
    }
}
