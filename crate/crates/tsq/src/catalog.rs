//! Built-in complexes.
//!
//! All entries are genuine triangle-square complexes: rhombi are pre-split
//! along a diagonal into two unit triangles and the hexagon of `X2` is
//! pre-split into six unit triangles around a fresh center vertex.

use crate::complex::{build_complex, Complex, Description, FaceKind};
use std::fmt;
use std::str::FromStr;

/// Names of the built-in complexes.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum CatalogEntry {
    X1,
    X1Prime,
    X2,
    /// `X2` with each square replaced by a pi/3 rhombus split along one of
    /// its diagonals; bit `i` of the parameter picks the diagonal of the
    /// `i`-th rhombus.
    X2PrimeVariant(u8),
}

impl CatalogEntry {
    pub fn all() -> Vec<CatalogEntry> {
        let mut v = vec![CatalogEntry::X1, CatalogEntry::X1Prime, CatalogEntry::X2];
        for k in 0..8 {
            v.push(CatalogEntry::X2PrimeVariant(k));
        }
        v
    }
}

impl fmt::Display for CatalogEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CatalogEntry::X1 => write!(f, "X1"),
            CatalogEntry::X1Prime => write!(f, "X1p"),
            CatalogEntry::X2 => write!(f, "X2"),
            CatalogEntry::X2PrimeVariant(k) => write!(f, "X2v{k}"),
        }
    }
}

impl FromStr for CatalogEntry {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "X1" => Ok(CatalogEntry::X1),
            "X1p" | "X1'" | "X1prime" | "X1Prime" => Ok(CatalogEntry::X1Prime),
            "X2" => Ok(CatalogEntry::X2),
            _ => {
                if let Some(k) = s.strip_prefix("X2v") {
                    let k: u8 = k.parse().map_err(|_| format!("unknown catalog entry `{s}`"))?;
                    if k < 8 {
                        return Ok(CatalogEntry::X2PrimeVariant(k));
                    }
                }
                Err(format!("unknown catalog entry `{s}`"))
            }
        }
    }
}

fn word(tokens: &[&str]) -> Vec<(String, bool)> {
    tokens
        .iter()
        .map(|t| match t.strip_prefix('-') {
            Some(rest) => (rest.to_owned(), false),
            None => (t.to_string(), true),
        })
        .collect()
}

fn loops(labels: &[&str], at: &str) -> Vec<(String, String, String)> {
    labels.iter().map(|l| (l.to_string(), at.to_owned(), at.to_owned())).collect()
}

/// Build the named complex. The result always satisfies the full
/// validation in [`build_complex`].
pub fn catalog(entry: CatalogEntry) -> Complex {
    let desc = match entry {
        CatalogEntry::X1 => x1(),
        CatalogEntry::X1Prime => x1_prime(),
        CatalogEntry::X2 => x2(),
        CatalogEntry::X2PrimeVariant(k) => x2_prime(k),
    };
    build_complex(&desc).expect("catalog entries are valid by construction")
}

/// One vertex, nine edges, six triangles and three squares. The three
/// rhombi are split along their labelled diagonals `e3`, `f3`, `i`.
fn x1() -> Description {
    use FaceKind::*;
    Description {
        name: "X1".into(),
        vertices: vec!["v".into()],
        edges: loops(&["e1", "e2", "e3", "f1", "f2", "f3", "g", "h", "i"], "v"),
        faces: vec![
            (Triangle, word(&["e2", "e3", "e1"])),
            (Triangle, word(&["e3", "e2", "e1"])),
            (Triangle, word(&["f3", "f1", "f2"])),
            (Triangle, word(&["f2", "f1", "f3"])),
            (Triangle, word(&["i", "h", "g"])),
            (Triangle, word(&["i", "g", "h"])),
            (Square, word(&["e1", "g", "-f1", "-g"])),
            (Square, word(&["e2", "h", "-f2", "-h"])),
            (Square, word(&["e3", "i", "-f3", "-i"])),
        ],
    }
}

/// The all-triangle companion of `X1`: the three squares become pi/3
/// rhombi split along fresh diagonals `d1`, `d2`, `d3`.
fn x1_prime() -> Description {
    use FaceKind::*;
    Description {
        name: "X1p".into(),
        vertices: vec!["v".into()],
        edges: loops(&["e1", "e2", "e3", "f1", "f2", "f3", "g", "h", "i", "d1", "d2", "d3"], "v"),
        faces: vec![
            (Triangle, word(&["e2", "e3", "e1"])),
            (Triangle, word(&["e3", "e2", "e1"])),
            (Triangle, word(&["f3", "f1", "f2"])),
            (Triangle, word(&["f2", "f1", "f3"])),
            (Triangle, word(&["i", "h", "g"])),
            (Triangle, word(&["i", "g", "h"])),
            (Triangle, word(&["e1", "d1", "-g"])),
            (Triangle, word(&["g", "-f1", "-d1"])),
            (Triangle, word(&["e2", "d2", "-h"])),
            (Triangle, word(&["h", "-f2", "-d2"])),
            (Triangle, word(&["e3", "d3", "-i"])),
            (Triangle, word(&["i", "-f3", "-d3"])),
        ],
    }
}

/// Two vertices: `v` (the original one) and `c` (the hexagon center), with
/// radial edges `r1..r6` from `c`. Eight triangles and three squares.
fn x2() -> Description {
    use FaceKind::*;
    let mut edges = loops(&["e1", "e2", "e3", "f1", "f2", "f3"], "v");
    for r in ["r1", "r2", "r3", "r4", "r5", "r6"] {
        edges.push((r.into(), "c".into(), "v".into()));
    }
    Description {
        name: "X2".into(),
        vertices: vec!["v".into(), "c".into()],
        edges,
        faces: vec![
            (Triangle, word(&["r1", "f1", "-r6"])),
            (Triangle, word(&["r6", "f3", "-r5"])),
            (Triangle, word(&["r5", "f2", "-r4"])),
            (Triangle, word(&["r4", "f1", "-r3"])),
            (Triangle, word(&["r3", "f2", "-r2"])),
            (Triangle, word(&["r2", "f3", "-r1"])),
            (Triangle, word(&["e1", "e2", "e3"])),
            (Triangle, word(&["e1", "e3", "e2"])),
            (Square, word(&["e1", "f1", "-e1", "f1"])),
            (Square, word(&["e2", "f2", "-e2", "f2"])),
            (Square, word(&["e3", "f3", "-e3", "f3"])),
        ],
    }
}

/// `X2` with square `i` (boundary `e_i f_i -e_i f_i`, corners P Q R S)
/// replaced by a rhombus split along diagonal QS (bit clear) or PR
/// (bit set); the fresh diagonal is labelled `s_i`.
fn x2_prime(k: u8) -> Description {
    use FaceKind::*;
    let mut desc = x2();
    desc.name = format!("X2v{k}");
    desc.faces.truncate(8); // drop the three squares
    for i in 0..3u8 {
        let e = format!("e{}", i + 1);
        let f = format!("f{}", i + 1);
        let s = format!("s{}", i + 1);
        let me = format!("-e{}", i + 1);
        let ms = format!("-s{}", i + 1);
        desc.edges.push((s.clone(), "v".into(), "v".into()));
        if k & (1 << i) == 0 {
            desc.faces.push((Triangle, word(&[&e, &s, &f])));
            desc.faces.push((Triangle, word(&[&f, &me, &ms])));
        } else {
            desc.faces.push((Triangle, word(&[&e, &f, &ms])));
            desc.faces.push((Triangle, word(&[&s, &me, &f])));
        }
    }
    desc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::FaceKind;

    fn kind_counts(c: &Complex) -> (usize, usize) {
        let t = c.faces().iter().filter(|f| f.kind == FaceKind::Triangle).count();
        (t, c.face_count() - t)
    }

    #[test]
    fn x1_shape() {
        let c = catalog(CatalogEntry::X1);
        assert_eq!(c.vertex_count(), 1);
        assert_eq!(c.edge_count(), 9);
        assert_eq!(kind_counts(&c), (6, 3));
        assert_eq!(c.euler_characteristic(), 1);
    }

    #[test]
    fn x1_prime_shape() {
        let c = catalog(CatalogEntry::X1Prime);
        assert_eq!(c.vertex_count(), 1);
        assert_eq!(c.edge_count(), 12);
        assert_eq!(kind_counts(&c), (12, 0));
        assert_eq!(c.euler_characteristic(), 1);
    }

    #[test]
    fn x2_shape() {
        let c = catalog(CatalogEntry::X2);
        assert_eq!(c.vertex_count(), 2);
        assert_eq!(c.edge_count(), 12);
        assert_eq!(c.face_count(), 11);
        assert_eq!(kind_counts(&c), (8, 3));
        assert_eq!(c.euler_characteristic(), 1);
    }

    #[test]
    fn x2_variants_are_valid_two_vertex_triangle_complexes() {
        for k in 0..8 {
            let c = catalog(CatalogEntry::X2PrimeVariant(k));
            assert_eq!(c.vertex_count(), 2, "variant {k}");
            assert_eq!(c.edge_count(), 15);
            assert_eq!(kind_counts(&c), (14, 0));
            assert_eq!(c.euler_characteristic(), 1);
        }
    }

    #[test]
    fn names_round_trip() {
        for entry in CatalogEntry::all() {
            let name = entry.to_string();
            assert_eq!(name.parse::<CatalogEntry>().unwrap(), entry);
        }
        assert!("X2v8".parse::<CatalogEntry>().is_err());
        assert_eq!("X1'".parse::<CatalogEntry>().unwrap(), CatalogEntry::X1Prime);
    }
}
