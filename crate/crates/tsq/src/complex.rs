//! Quotient-level triangle-square complexes.
//!
//! A complex stores vertices, labelled unit edges with endpoints, and faces
//! given as directed boundary words. Gluing data in the usual
//! polygon-identification style reduces to label equality here, so all
//! checks operate directly on the quotient.

use std::collections::HashMap;
use std::fmt;
use thiserror::Error;

pub type VertexId = u32;
pub type EdgeId = u32;
pub type FaceId = u32;

/// Which unit polygon a face is.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum FaceKind {
    Triangle,
    Square,
}

impl FaceKind {
    pub fn sides(self) -> usize {
        match self {
            FaceKind::Triangle => 3,
            FaceKind::Square => 4,
        }
    }

    /// Corner angle in units of pi/6.
    pub fn corner_weight(self) -> u32 {
        match self {
            FaceKind::Triangle => 2,
            FaceKind::Square => 3,
        }
    }
}

impl fmt::Display for FaceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FaceKind::Triangle => write!(f, "triangle"),
            FaceKind::Square => write!(f, "square"),
        }
    }
}

/// An edge traversed with (`forward = true`) or against its orientation.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct DirectedEdge {
    pub edge: EdgeId,
    pub forward: bool,
}

impl DirectedEdge {
    pub fn fwd(edge: EdgeId) -> Self {
        DirectedEdge { edge, forward: true }
    }

    pub fn rev(edge: EdgeId) -> Self {
        DirectedEdge { edge, forward: false }
    }

    pub fn reversed(self) -> Self {
        DirectedEdge { edge: self.edge, forward: !self.forward }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Edge {
    pub label: String,
    pub init: VertexId,
    pub term: VertexId,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Face {
    pub kind: FaceKind,
    pub boundary: Vec<DirectedEdge>,
}

/// Raw build input: everything by name, validated by [`build_complex`].
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Description {
    pub name: String,
    pub vertices: Vec<String>,
    /// `(label, initial vertex, terminal vertex)`
    pub edges: Vec<(String, String, String)>,
    /// `(kind, boundary word)` where each token is `(label, forward)`
    pub faces: Vec<(FaceKind, Vec<(String, bool)>)>,
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum ComplexError {
    #[error("duplicate edge label `{0}`")]
    DuplicateLabel(String),
    #[error("duplicate vertex `{0}`")]
    DuplicateVertex(String),
    #[error("unknown edge label `{0}`")]
    UnknownLabel(String),
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("face {face}: {kind} has boundary word of length {len}")]
    BadFaceLength { face: usize, kind: FaceKind, len: usize },
    #[error(
        "face {face}: boundary word is not a closed walk \
         (edge {position} ends at `{at}`, next edge starts at `{expected}`)"
    )]
    OpenBoundaryWord { face: usize, position: usize, at: String, expected: String },
}

#[derive(Clone, Debug)]
pub struct Complex {
    name: String,
    vertices: Vec<String>,
    edges: Vec<Edge>,
    faces: Vec<Face>,
    vertex_by_name: HashMap<String, VertexId>,
    edge_by_label: HashMap<String, EdgeId>,
}

impl Complex {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    pub fn vertex_name(&self, v: VertexId) -> &str {
        &self.vertices[v as usize]
    }

    pub fn vertex_names(&self) -> impl Iterator<Item = &str> {
        self.vertices.iter().map(|s| s.as_str())
    }

    pub fn vertex_id(&self, name: &str) -> Option<VertexId> {
        self.vertex_by_name.get(name).copied()
    }

    pub fn edge(&self, e: EdgeId) -> &Edge {
        &self.edges[e as usize]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge_id(&self, label: &str) -> Option<EdgeId> {
        self.edge_by_label.get(label).copied()
    }

    pub fn face(&self, f: FaceId) -> &Face {
        &self.faces[f as usize]
    }

    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    /// Initial vertex of a directed edge.
    pub fn dir_init(&self, d: DirectedEdge) -> VertexId {
        let e = self.edge(d.edge);
        if d.forward {
            e.init
        } else {
            e.term
        }
    }

    /// Terminal vertex of a directed edge.
    pub fn dir_term(&self, d: DirectedEdge) -> VertexId {
        self.dir_init(d.reversed())
    }

    /// Token for a directed edge, `label` or `-label`.
    pub fn dir_token(&self, d: DirectedEdge) -> String {
        let label = &self.edge(d.edge).label;
        if d.forward {
            label.clone()
        } else {
            format!("-{label}")
        }
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.vertices.len() as i64 - self.edges.len() as i64 + self.faces.len() as i64
    }

    /// The boundary word of `face` rotated to its lexicographically minimal
    /// form; used for canonical serialization and rotation-invariant
    /// face equality.
    pub fn canonical_face_word(&self, face: &Face) -> Vec<String> {
        let tokens: Vec<String> = face.boundary.iter().map(|&d| self.dir_token(d)).collect();
        min_rotation(&tokens)
    }

    /// Face equality up to cyclic rotation of the boundary word.
    pub fn faces_equal(&self, a: &Face, b: &Face) -> bool {
        a.kind == b.kind && self.canonical_face_word(a) == self.canonical_face_word(b)
    }

    /// Structural equality: same name, same vertex set, same labelled edges,
    /// and the same multiset of faces up to rotation of boundary words.
    pub fn structurally_eq(&self, other: &Complex) -> bool {
        if self.name != other.name {
            return false;
        }
        let mut va: Vec<_> = self.vertices.clone();
        let mut vb: Vec<_> = other.vertices.clone();
        va.sort();
        vb.sort();
        if va != vb {
            return false;
        }
        let edge_key = |c: &Complex| {
            let mut v: Vec<(String, String, String)> = c
                .edges
                .iter()
                .map(|e| {
                    (e.label.clone(), c.vertex_name(e.init).to_owned(), c.vertex_name(e.term).to_owned())
                })
                .collect();
            v.sort();
            v
        };
        if edge_key(self) != edge_key(other) {
            return false;
        }
        let face_key = |c: &Complex| {
            let mut v: Vec<(FaceKind, Vec<String>)> =
                c.faces.iter().map(|f| (f.kind, c.canonical_face_word(f))).collect();
            v.sort();
            v
        };
        face_key(self) == face_key(other)
    }

    /// Re-extract the build input; `build_complex` on the result reproduces
    /// a structurally equal complex.
    pub fn description(&self) -> Description {
        Description {
            name: self.name.clone(),
            vertices: self.vertices.clone(),
            edges: self
                .edges
                .iter()
                .map(|e| {
                    (e.label.clone(), self.vertex_name(e.init).to_owned(), self.vertex_name(e.term).to_owned())
                })
                .collect(),
            faces: self
                .faces
                .iter()
                .map(|f| {
                    let word = f
                        .boundary
                        .iter()
                        .map(|&d| (self.edge(d.edge).label.clone(), d.forward))
                        .collect();
                    (f.kind, word)
                })
                .collect(),
        }
    }

    /// Total corner weight (pi/6 units) contributed by all faces at `v`.
    pub fn corner_weight_at(&self, v: VertexId) -> u32 {
        let mut total = 0;
        for f in &self.faces {
            let w = f.kind.corner_weight();
            for i in 0..f.boundary.len() {
                if self.dir_term(f.boundary[i]) == v {
                    total += w;
                }
            }
        }
        total
    }
}

/// Lexicographically minimal rotation of a token sequence.
fn min_rotation(tokens: &[String]) -> Vec<String> {
    let n = tokens.len();
    let mut best = 0;
    for s in 1..n {
        for k in 0..n {
            let a = &tokens[(best + k) % n];
            let b = &tokens[(s + k) % n];
            match b.cmp(a) {
                std::cmp::Ordering::Less => {
                    best = s;
                    break;
                }
                std::cmp::Ordering::Greater => break,
                std::cmp::Ordering::Equal => {}
            }
        }
    }
    (0..n).map(|k| tokens[(best + k) % n].clone()).collect()
}

/// Validate a description and build the complex.
///
/// Checks label uniqueness, that every referenced label and vertex exists,
/// that boundary word lengths match the face kind, and that every boundary
/// word is a closed walk.
pub fn build_complex(desc: &Description) -> Result<Complex, ComplexError> {
    let mut vertex_by_name = HashMap::new();
    for (i, name) in desc.vertices.iter().enumerate() {
        if vertex_by_name.insert(name.clone(), i as VertexId).is_some() {
            return Err(ComplexError::DuplicateVertex(name.clone()));
        }
    }
    let mut edges = Vec::with_capacity(desc.edges.len());
    let mut edge_by_label = HashMap::new();
    for (label, init, term) in &desc.edges {
        let init = *vertex_by_name.get(init).ok_or_else(|| ComplexError::UnknownVertex(init.clone()))?;
        let term = *vertex_by_name.get(term).ok_or_else(|| ComplexError::UnknownVertex(term.clone()))?;
        if edge_by_label.insert(label.clone(), edges.len() as EdgeId).is_some() {
            return Err(ComplexError::DuplicateLabel(label.clone()));
        }
        edges.push(Edge { label: label.clone(), init, term });
    }

    let mut faces = Vec::with_capacity(desc.faces.len());
    for (fi, (kind, word)) in desc.faces.iter().enumerate() {
        if word.len() != kind.sides() {
            return Err(ComplexError::BadFaceLength { face: fi, kind: *kind, len: word.len() });
        }
        let mut boundary = Vec::with_capacity(word.len());
        for (label, forward) in word {
            let edge = *edge_by_label.get(label).ok_or_else(|| ComplexError::UnknownLabel(label.clone()))?;
            boundary.push(DirectedEdge { edge, forward: *forward });
        }
        // Closed walk: terminal vertex of each directed edge equals the
        // initial vertex of the next, cyclically.
        for i in 0..boundary.len() {
            let cur = boundary[i];
            let next = boundary[(i + 1) % boundary.len()];
            let (at, expected) = {
                let e_cur = &edges[cur.edge as usize];
                let e_next = &edges[next.edge as usize];
                let at = if cur.forward { e_cur.term } else { e_cur.init };
                let expected = if next.forward { e_next.init } else { e_next.term };
                (at, expected)
            };
            if at != expected {
                return Err(ComplexError::OpenBoundaryWord {
                    face: fi,
                    position: i,
                    at: desc.vertices[at as usize].clone(),
                    expected: desc.vertices[expected as usize].clone(),
                });
            }
        }
        faces.push(Face { kind: *kind, boundary });
    }

    Ok(Complex { name: desc.name.clone(), vertices: desc.vertices.clone(), edges, faces, vertex_by_name, edge_by_label })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tri_word(w: &[&str]) -> Vec<(String, bool)> {
        w.iter()
            .map(|t| {
                if let Some(rest) = t.strip_prefix('-') {
                    (rest.to_owned(), false)
                } else {
                    (t.to_string(), true)
                }
            })
            .collect()
    }

    #[test]
    fn single_triangle_three_vertices() {
        let desc = Description {
            name: "T".into(),
            vertices: vec!["p".into(), "q".into(), "r".into()],
            edges: vec![
                ("a".into(), "p".into(), "q".into()),
                ("b".into(), "q".into(), "r".into()),
                ("c".into(), "r".into(), "p".into()),
            ],
            faces: vec![(FaceKind::Triangle, tri_word(&["a", "b", "c"]))],
        };
        let c = build_complex(&desc).unwrap();
        assert_eq!(c.vertex_count(), 3);
        assert_eq!(c.euler_characteristic(), 1);
    }

    #[test]
    fn loop_triangle_is_permitted() {
        // A triangle all of whose sides are the same loop edge: faces of a
        // cell may be identified.
        let desc = Description {
            name: "L".into(),
            vertices: vec!["v".into()],
            edges: vec![("a".into(), "v".into(), "v".into())],
            faces: vec![(FaceKind::Triangle, tri_word(&["a", "a", "a"]))],
        };
        let c = build_complex(&desc).unwrap();
        assert_eq!(c.vertex_count(), 1);
        assert_eq!(c.face_count(), 1);
    }

    #[test]
    fn open_walk_is_rejected() {
        let desc = Description {
            name: "bad".into(),
            vertices: vec!["p".into(), "q".into(), "r".into()],
            edges: vec![
                ("a".into(), "p".into(), "q".into()),
                ("b".into(), "q".into(), "r".into()),
                ("c".into(), "p".into(), "r".into()),
            ],
            faces: vec![(FaceKind::Triangle, tri_word(&["a", "b", "c"]))],
        };
        match build_complex(&desc) {
            Err(ComplexError::OpenBoundaryWord { position: 1, .. }) => {}
            other => panic!("expected OpenBoundaryWord, got {other:?}"),
        }
    }

    #[test]
    fn bad_face_length_and_unknown_label() {
        let mut desc = Description {
            name: "bad".into(),
            vertices: vec!["v".into()],
            edges: vec![("a".into(), "v".into(), "v".into())],
            faces: vec![(FaceKind::Square, tri_word(&["a", "a", "a"]))],
        };
        assert!(matches!(build_complex(&desc), Err(ComplexError::BadFaceLength { len: 3, .. })));
        desc.faces = vec![(FaceKind::Triangle, tri_word(&["a", "z", "a"]))];
        assert!(matches!(build_complex(&desc), Err(ComplexError::UnknownLabel(l)) if l == "z"));
        desc.faces.clear();
        desc.edges.push(("a".into(), "v".into(), "v".into()));
        assert!(matches!(build_complex(&desc), Err(ComplexError::DuplicateLabel(_))));
    }

    #[test]
    fn rebuild_is_idempotent_and_rotation_invariant() {
        let desc = Description {
            name: "L".into(),
            vertices: vec!["v".into()],
            edges: vec![
                ("a".into(), "v".into(), "v".into()),
                ("b".into(), "v".into(), "v".into()),
            ],
            faces: vec![(FaceKind::Triangle, tri_word(&["a", "b", "-a"]))],
        };
        let c = build_complex(&desc).unwrap();
        let c2 = build_complex(&c.description()).unwrap();
        assert!(c.structurally_eq(&c2));

        // Rotating a boundary word yields an equal face.
        let rotated = Face {
            kind: FaceKind::Triangle,
            boundary: vec![c.face(0).boundary[1], c.face(0).boundary[2], c.face(0).boundary[0]],
        };
        assert!(c.faces_equal(c.face(0), &rotated));
        let reversed = Face {
            kind: FaceKind::Triangle,
            boundary: vec![c.face(0).boundary[0], c.face(0).boundary[2], c.face(0).boundary[1]],
        };
        assert!(!c.faces_equal(c.face(0), &reversed));
    }
}
