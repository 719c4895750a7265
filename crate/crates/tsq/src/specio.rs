//! The `.tsq` text format.
//!
//! Line-oriented: `complex <name>`, `vertex <id>`,
//! `edge <label>: <vid> -> <vid>`, `triangle <id> = <w> <w> <w>`,
//! `square <id> = <w> <w> <w> <w>` where a word token is `<label>` or
//! `-<label>`. `#` starts a comment. Parsing validates the full build so
//! every accepted document yields a valid complex; serialization emits a
//! canonical ordering so golden files stay stable.

use crate::complex::{build_complex, Complex, ComplexError, Description, FaceKind};
use std::fmt;
use thiserror::Error;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum SpecioError {
    #[error("{line}:{col}: expected {expected}, found `{found}`")]
    Syntax { line: usize, col: usize, expected: String, found: String },
    #[error("line {line}: {source}")]
    Semantic { line: usize, source: ComplexError },
}

impl SpecioError {
    pub fn line(&self) -> usize {
        match self {
            SpecioError::Syntax { line, .. } | SpecioError::Semantic { line, .. } => *line,
        }
    }
}

struct Cursor<'a> {
    text: &'a str,
    line: usize,
    pos: usize, // byte offset within the line
}

impl<'a> Cursor<'a> {
    fn col(&self) -> usize {
        self.text[..self.pos].chars().count() + 1
    }

    fn rest(&self) -> &'a str {
        &self.text[self.pos..]
    }

    fn skip_ws(&mut self) {
        let rest = self.rest();
        let trimmed = rest.trim_start_matches([' ', '\t']);
        self.pos += rest.len() - trimmed.len();
    }

    fn at_end(&mut self) -> bool {
        self.skip_ws();
        self.rest().is_empty()
    }

    fn error(&self, expected: &str) -> SpecioError {
        let found: String = self.rest().chars().take_while(|c| !c.is_whitespace()).collect();
        let found = if found.is_empty() { "end of line".to_owned() } else { found };
        SpecioError::Syntax { line: self.line, col: self.col(), expected: expected.to_owned(), found }
    }

    fn ident(&mut self, what: &str) -> Result<String, SpecioError> {
        self.skip_ws();
        let rest = self.rest();
        let mut chars = rest.char_indices();
        match chars.next() {
            Some((_, c)) if c.is_ascii_alphabetic() || c == '_' => {}
            _ => return Err(self.error(what)),
        }
        let end = rest
            .char_indices()
            .find(|&(_, c)| !(c.is_ascii_alphanumeric() || c == '_' || c == '\''))
            .map_or(rest.len(), |(i, _)| i);
        let ident = rest[..end].to_owned();
        self.pos += end;
        Ok(ident)
    }

    fn literal(&mut self, lit: &str) -> Result<(), SpecioError> {
        self.skip_ws();
        if self.rest().starts_with(lit) {
            self.pos += lit.len();
            Ok(())
        } else {
            Err(self.error(&format!("`{lit}`")))
        }
    }

    fn word_token(&mut self) -> Result<(String, bool), SpecioError> {
        self.skip_ws();
        let forward = if self.rest().starts_with('-') {
            self.pos += 1;
            false
        } else {
            true
        };
        let label = self.ident("edge label")?;
        Ok((label, forward))
    }

    fn end_of_line(&mut self) -> Result<(), SpecioError> {
        if self.at_end() {
            Ok(())
        } else {
            Err(self.error("end of line"))
        }
    }
}

/// Parse a document into a validated description. The description is
/// checked by actually building the complex; build errors come back as
/// [`SpecioError::Semantic`] with the line of the offending declaration.
pub fn parse(text: &str) -> Result<Description, SpecioError> {
    let mut desc = Description::default();
    let mut saw_header = false;
    // Line of each declaration, for semantic error positions.
    let mut vertex_lines = Vec::new();
    let mut edge_lines = Vec::new();
    let mut face_lines = Vec::new();
    let mut last_line = 0;

    for (lineno, raw) in text.lines().enumerate() {
        let lineno = lineno + 1;
        last_line = lineno;
        let content = raw.strip_suffix('\r').unwrap_or(raw);
        let content = match content.find('#') {
            Some(i) => &content[..i],
            None => content,
        };
        let mut cur = Cursor { text: content, line: lineno, pos: 0 };
        if cur.at_end() {
            continue;
        }
        let keyword = cur.ident("keyword `complex`, `vertex`, `edge`, `triangle` or `square`")?;
        if !saw_header {
            if keyword != "complex" {
                return Err(SpecioError::Syntax {
                    line: lineno,
                    col: 1,
                    expected: "`complex <name>` header".into(),
                    found: keyword,
                });
            }
            desc.name = cur.ident("complex name")?;
            cur.end_of_line()?;
            saw_header = true;
            continue;
        }
        match keyword.as_str() {
            "vertex" => {
                desc.vertices.push(cur.ident("vertex id")?);
                vertex_lines.push(lineno);
                cur.end_of_line()?;
            }
            "edge" => {
                let label = cur.ident("edge label")?;
                cur.literal(":")?;
                let init = cur.ident("vertex id")?;
                cur.literal("->")?;
                let term = cur.ident("vertex id")?;
                cur.end_of_line()?;
                desc.edges.push((label, init, term));
                edge_lines.push(lineno);
            }
            "triangle" | "square" => {
                let kind = if keyword == "triangle" { FaceKind::Triangle } else { FaceKind::Square };
                let _id = cur.ident("face id")?;
                cur.literal("=")?;
                let mut word = Vec::new();
                while !cur.at_end() {
                    word.push(cur.word_token()?);
                }
                desc.faces.push((kind, word));
                face_lines.push(lineno);
            }
            other => {
                return Err(SpecioError::Syntax {
                    line: lineno,
                    col: 1,
                    expected: "`vertex`, `edge`, `triangle` or `square`".into(),
                    found: other.to_owned(),
                });
            }
        }
    }
    if !saw_header {
        return Err(SpecioError::Syntax {
            line: last_line.max(1),
            col: 1,
            expected: "`complex <name>` header".into(),
            found: "end of input".into(),
        });
    }

    build_complex(&desc).map_err(|source| {
        let line = match &source {
            ComplexError::DuplicateVertex(name) => desc
                .vertices
                .iter()
                .enumerate()
                .filter(|(_, v)| *v == name)
                .nth(1)
                .map(|(i, _)| vertex_lines[i]),
            ComplexError::DuplicateLabel(label) => desc
                .edges
                .iter()
                .enumerate()
                .filter(|(_, e)| e.0 == *label)
                .nth(1)
                .map(|(i, _)| edge_lines[i]),
            ComplexError::UnknownVertex(name) => desc
                .edges
                .iter()
                .position(|e| e.1 == *name || e.2 == *name)
                .map(|i| edge_lines[i]),
            ComplexError::UnknownLabel(_) => None,
            ComplexError::BadFaceLength { face, .. } | ComplexError::OpenBoundaryWord { face, .. } => {
                Some(face_lines[*face])
            }
        };
        let line = line.unwrap_or_else(|| match &source {
            ComplexError::UnknownLabel(label) => desc
                .faces
                .iter()
                .position(|(_, w)| w.iter().any(|(l, _)| l == label))
                .map(|i| face_lines[i])
                .unwrap_or(1),
            _ => 1,
        });
        SpecioError::Semantic { line, source }
    })?;
    Ok(desc)
}

/// Parse and build in one step.
pub fn parse_to_complex(text: &str) -> Result<Complex, SpecioError> {
    let desc = parse(text)?;
    Ok(build_complex(&desc).expect("validated by parse"))
}

/// Canonical serialization: vertices sorted, edges sorted by label, faces
/// sorted by kind then by the minimal rotation of their boundary word
/// (triangles first), each face emitted in that minimal rotation.
pub fn serialize(c: &Complex) -> String {
    let mut out = String::new();
    out.push_str(&format!("complex {}\n", c.name()));
    let mut vertices: Vec<&str> = c.vertex_names().collect();
    vertices.sort();
    for v in vertices {
        out.push_str(&format!("vertex {v}\n"));
    }
    let mut edges: Vec<_> = c.edges().to_vec();
    edges.sort_by(|a, b| a.label.cmp(&b.label));
    for e in edges {
        out.push_str(&format!(
            "edge {}: {} -> {}\n",
            e.label,
            c.vertex_name(e.init),
            c.vertex_name(e.term)
        ));
    }
    let mut faces: Vec<(FaceKind, Vec<String>)> =
        c.faces().iter().map(|f| (f.kind, c.canonical_face_word(f))).collect();
    faces.sort();
    let mut t = 0;
    let mut s = 0;
    for (kind, word) in faces {
        let id = match kind {
            FaceKind::Triangle => {
                t += 1;
                format!("T{t}")
            }
            FaceKind::Square => {
                s += 1;
                format!("S{s}")
            }
        };
        out.push_str(&format!("{kind} {id} = {}\n", word.join(" ")));
    }
    out
}

impl fmt::Display for Complex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&serialize(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{catalog, CatalogEntry};

    #[test]
    fn round_trip_catalog() {
        for entry in CatalogEntry::all() {
            let c = catalog(entry);
            let text = serialize(&c);
            let back = parse_to_complex(&text).unwrap();
            assert!(c.structurally_eq(&back), "{entry}");
            // Serialization is a fixed point on canonical documents.
            assert_eq!(text, serialize(&back));
        }
    }

    #[test]
    fn one_triangle_documents() {
        let c = parse_to_complex("complex T\nvertex v\nedge a: v -> v\ntriangle T1 = a a a\n").unwrap();
        assert_eq!(serialize(&c).lines().count(), 4);
        // One triangle over two edge labels: a five-line document.
        let c = parse_to_complex("complex T\nvertex v\nedge a: v -> v\nedge b: v -> v\ntriangle T1 = a b -b\n")
            .unwrap();
        assert_eq!(serialize(&c).lines().count(), 5);
        let text3 = "complex T\nvertex p\nvertex q\nvertex r\n\
                     edge a: p -> q\nedge b: q -> r\nedge c: r -> p\n\
                     triangle T1 = a b c\n";
        assert!(parse_to_complex(text3).is_ok());
    }

    #[test]
    fn empty_document_is_a_syntax_error() {
        match parse("") {
            Err(SpecioError::Syntax { expected, .. }) => assert!(expected.contains("complex")),
            other => panic!("expected header error, got {other:?}"),
        }
        match parse("# only a comment\n") {
            Err(SpecioError::Syntax { .. }) => {}
            other => panic!("expected header error, got {other:?}"),
        }
    }

    #[test]
    fn square_with_three_tokens_is_bad_face_length() {
        let text = "complex B\nvertex v\nedge a: v -> v\nsquare S1 = a a a\n";
        match parse(text) {
            Err(SpecioError::Semantic { line: 4, source: ComplexError::BadFaceLength { .. } }) => {}
            other => panic!("expected BadFaceLength at line 4, got {other:?}"),
        }
    }

    #[test]
    fn undeclared_label_is_reported_with_position() {
        let text = "complex B\nvertex v\nedge a: v -> v\ntriangle T1 = a a a\ntriangle T2 = a b a\n";
        match parse(text) {
            Err(SpecioError::Semantic { line: 5, source: ComplexError::UnknownLabel(l) }) => {
                assert_eq!(l, "b");
            }
            other => panic!("expected UnknownLabel at line 5, got {other:?}"),
        }
    }

    #[test]
    fn syntax_error_positions() {
        let text = "complex B\nvertex v\nedge a v -> v\n";
        match parse(text) {
            Err(SpecioError::Syntax { line: 3, col, expected, .. }) => {
                assert!(col > 1);
                assert!(expected.contains(":"));
            }
            other => panic!("expected syntax error, got {other:?}"),
        }
    }

    #[test]
    fn crlf_and_comments_accepted() {
        let text = "complex T # header\r\n\r\nvertex v\r\nedge a: v -> v # loop\r\ntriangle T1 = a a a\r\n";
        assert!(parse_to_complex(text).is_ok());
    }

    #[test]
    fn x1_from_hand_written_document() {
        let text = "\
complex X1
vertex v
edge e1: v -> v
edge e2: v -> v
edge e3: v -> v
edge f1: v -> v
edge f2: v -> v
edge f3: v -> v
edge g: v -> v
edge h: v -> v
edge i: v -> v
triangle K1L1N1 = e2 e3 e1
triangle L1N1M1 = e3 e2 e1
triangle N2L2K2 = f3 f1 f2
triangle L2M2N2 = f2 f1 f3
triangle ACB = i h g
triangle ACD = i g h
square S1 = e1 g -f1 -g
square S2 = e2 h -f2 -h
square S3 = e3 i -f3 -i
";
        let c = parse_to_complex(text).unwrap();
        assert!(c.structurally_eq(&catalog(CatalogEntry::X1)));
    }
}
