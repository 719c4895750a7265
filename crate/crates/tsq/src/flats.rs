//! Exact finite patches of flats.
//!
//! Generated kinds:
//!
//! * `Eisenstein` — the plane tiled by unit triangles;
//! * `FlatF` — the radial flat: the Eisenstein plane cut along the six
//!   rays from the origin, each 60-degree sector translated outward by the
//!   unit vector bisecting it, a unit hexagon filling the central gap and
//!   a semi-infinite strip of unit squares filling each ray gap;
//! * `FlatG` — one unit hexagon per Eisenstein vertex, one unit square per
//!   edge, one unit triangle per face;
//! * `FlatFn(n)` — the same blow-up with every square column subdivided
//!   into `n` squares and every triangle into `n^2` triangles (drawn
//!   pre-rescaling, so coordinates are schematic for `n > 1`).
//!
//! The drawing frame is fixed once and for all: the patch center `o` is
//! the origin and the central hexagon has corners at angles `60j` degrees
//! (so one edge is parallel to the x-axis); the cut rays run at angles
//! `60j - 30`. All coordinates are exact elements of Q[sqrt(3)].

use crate::complex::{build_complex, Complex, Description, FaceId, FaceKind, VertexId};
use crate::qsqrt3::{Pt, QSqrt3};
use num_rational::Rational64;
use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum FlatKind {
    Eisenstein,
    FlatF,
    FlatG,
    FlatFn(u32),
}

impl fmt::Display for FlatKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FlatKind::Eisenstein => write!(f, "eisenstein"),
            FlatKind::FlatF => write!(f, "F"),
            FlatKind::FlatG => write!(f, "G"),
            FlatKind::FlatFn(n) => write!(f, "F{n}"),
        }
    }
}

impl FromStr for FlatKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "eisenstein" | "E" | "plane" => Ok(FlatKind::Eisenstein),
            "F" => Ok(FlatKind::FlatF),
            "G" => Ok(FlatKind::FlatG),
            _ => {
                if let Some(n) = s.strip_prefix('F') {
                    if let Ok(n) = n.parse::<u32>() {
                        return Ok(FlatKind::FlatFn(n));
                    }
                }
                Err(format!("unknown flat kind `{s}` (use eisenstein, F, G or F<n>)"))
            }
        }
    }
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum FlatsError {
    #[error("bad parameter: {0}")]
    BadParameter(String),
}

/// Data attached to each face for the built-in cellular maps.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum FaceMapData {
    /// Eisenstein and flat-F faces: map rules read the drawing coordinates
    /// directly.
    None,
    /// `F_n` faces: the corners of the corresponding cell of the flat `F`
    /// under the fundamental-polygon correspondence, listed parallel to
    /// the face boundary walk, plus the parity class of the owning lattice
    /// vertex (used by the maps into `X2`).
    Fn { f_corners: Vec<Pt>, odd_class: bool },
}

/// A finite patch of a flat together with its exact drawing.
#[derive(Clone, Debug)]
pub struct FlatPatch {
    pub kind: FlatKind,
    pub complex: Complex,
    /// Drawing coordinates per vertex; isometric except for `FlatFn(n)`,
    /// `n > 1`, where they are the schematic pre-rescaling drawing.
    pub coords: Vec<Pt>,
    pub center: VertexId,
    pub radius: u32,
    /// Vertices whose link is incomplete (corner angle sum below 2*pi).
    pub boundary: BTreeSet<VertexId>,
    pub(crate) map_data: Vec<FaceMapData>,
    coord_index: BTreeMap<Pt, VertexId>,
}

impl FlatPatch {
    pub fn vertex_at(&self, p: &Pt) -> Option<VertexId> {
        self.coord_index.get(p).copied()
    }

    pub fn is_interior(&self, v: VertexId) -> bool {
        !self.boundary.contains(&v)
    }
}

struct CandidateFace {
    kind: FaceKind,
    corners: Vec<Pt>,
    map_data: FaceMapData,
}

/// Generate the patch of all cells touching the combinatorial open ball
/// of radius `radius - 1` around the center, so every vertex within
/// 1-skeleton distance `radius - 1` of the center has a complete link and
/// every boundary vertex is at distance at least `radius`.
pub fn gen_flat(kind: FlatKind, radius: u32) -> Result<FlatPatch, FlatsError> {
    if radius < 1 {
        return Err(FlatsError::BadParameter("radius must be at least 1".into()));
    }
    if let FlatKind::FlatFn(n) = kind {
        if n < 1 {
            return Err(FlatsError::BadParameter("subdivision parameter must be at least 1".into()));
        }
    }
    let reach = radius + 3;
    let candidates = match kind {
        FlatKind::Eisenstein => eisenstein_faces(reach),
        FlatKind::FlatF => flat_f_faces(reach),
        FlatKind::FlatG => flat_fn_faces(1, reach),
        FlatKind::FlatFn(n) => flat_fn_faces(n, reach),
    };
    Ok(assemble(kind, radius, candidates))
}

fn within(p: &Pt, reach: u32) -> bool {
    let r = QSqrt3::from_int(reach as i64);
    p.norm2() <= r * r
}

fn all_within(corners: &[Pt], reach: u32) -> bool {
    corners.iter().all(|p| within(p, reach))
}

fn eisenstein_faces(reach: u32) -> Vec<CandidateFace> {
    let u = Pt::hex_corner_dir(0);
    let w = Pt::hex_corner_dir(1);
    let lim = (reach as i64) * 2 + 2;
    let at = |a: i64, b: i64| u.scale(Rational64::from_integer(a)) + w.scale(Rational64::from_integer(b));
    let mut out = Vec::new();
    for a in -lim..=lim {
        for b in -lim..=lim {
            let z = at(a, b);
            let up = vec![z, z + u, z + w];
            if all_within(&up, reach) {
                out.push(CandidateFace { kind: FaceKind::Triangle, corners: up, map_data: FaceMapData::None });
            }
            let down = vec![z + u, z + u + w, z + w];
            if all_within(&down, reach) {
                out.push(CandidateFace { kind: FaceKind::Triangle, corners: down, map_data: FaceMapData::None });
            }
        }
    }
    out
}

fn flat_f_faces(reach: u32) -> Vec<CandidateFace> {
    let mut out = Vec::new();
    let o = Pt::origin();
    let t: Vec<Pt> = (0..6).map(Pt::hex_corner_dir).collect();
    let rho: Vec<Pt> = (0..6).map(Pt::ray_dir).collect();
    let plain = |corners: Vec<Pt>, kind| CandidateFace { kind, corners, map_data: FaceMapData::None };

    // Central hexagon, triangulated from o.
    for j in 0..6 {
        out.push(plain(vec![o, t[j], t[(j + 1) % 6]], FaceKind::Triangle));
    }
    // Square strips along the six rays; strip j attaches to hexagon edge
    // (t[j-1], t[j]).
    for j in 0..6usize {
        let tl = t[(j + 5) % 6];
        let tr = t[j];
        for k in 0..=(reach as i64) {
            let base = rho[j].scale(Rational64::from_integer(k));
            let next = rho[j].scale(Rational64::from_integer(k + 1));
            let corners = vec![base + tl, next + tl, next + tr, base + tr];
            if all_within(&corners, reach) {
                out.push(plain(corners, FaceKind::Square));
            }
        }
    }
    // Sector j: the cone between rays j and j+1, translated by t[j].
    let lim = (reach as i64) * 2 + 2;
    for j in 0..6usize {
        let p = rho[j];
        let q = rho[(j + 1) % 6];
        for a in 0..=lim {
            for b in 0..=lim {
                let base = t[j] + p.scale(Rational64::from_integer(a)) + q.scale(Rational64::from_integer(b));
                let up = vec![base, base + p, base + q];
                if all_within(&up, reach) {
                    out.push(plain(up, FaceKind::Triangle));
                }
                let down = vec![base + p, base + p + q, base + q];
                if all_within(&down, reach) {
                    out.push(plain(down, FaceKind::Triangle));
                }
            }
        }
    }
    out
}

/// Faces of `F_n` (and of `G` for `n = 1`) over the rotated Eisenstein
/// lattice with basis `mu = ray 1`, `nu = ray 2`; hexagon centers sit at
/// `(1 + sqrt(3)) z`. Every face also records the corners of its partner
/// cell in the flat `F` under the fundamental-polygon correspondence:
/// each lattice vertex owns its hexagon, the columns of its three edges
/// in ray directions 0..2 and two triangle blocks, and those correspond
/// to the central hexagon, the first `n` squares of strips 0..2 and the
/// side-`n` apex blocks of sectors 0 and 1 of the flat `F`.
fn flat_fn_faces(n: u32, reach: u32) -> Vec<CandidateFace> {
    let n_i = n as i64;
    let t: Vec<Pt> = (0..6).map(Pt::hex_corner_dir).collect();
    let rho: Vec<Pt> = (0..6).map(Pt::ray_dir).collect();
    let mu = rho[1];
    let nu = rho[2];
    let scale = QSqrt3::new(Rational64::from_integer(1), Rational64::from_integer(1)); // 1 + sqrt(3)
    let lim = (reach as i64) / 2 + 3;
    let mut out = Vec::new();

    for a in -lim..=lim {
        for b in -lim..=lim {
            let z = mu.scale(Rational64::from_integer(a)) + nu.scale(Rational64::from_integer(b));
            let cz = Pt::new(scale * z.x, scale * z.y);
            let odd_class = a.rem_euclid(2) == 1;
            let fd = |f_corners: Vec<Pt>| FaceMapData::Fn { f_corners, odd_class };

            // Hexagon, triangulated from its center.
            for j in 0..6 {
                let corners = vec![cz, cz + t[j], cz + t[(j + 1) % 6]];
                if all_within(&corners, reach) {
                    out.push(CandidateFace {
                        kind: FaceKind::Triangle,
                        corners,
                        map_data: fd(vec![Pt::origin(), t[j], t[(j + 1) % 6]]),
                    });
                }
            }
            // Columns for the three owned edge directions.
            for j in 0..3usize {
                let tl = t[(j + 5) % 6];
                let tr = t[j];
                for m in 0..n_i {
                    let lo = rho[j].scale(Rational64::new(m, n_i));
                    let hi = rho[j].scale(Rational64::new(m + 1, n_i));
                    let corners = vec![cz + tl + lo, cz + tl + hi, cz + tr + hi, cz + tr + lo];
                    if all_within(&corners, reach) {
                        let flo = rho[j].scale(Rational64::from_integer(m));
                        let fhi = rho[j].scale(Rational64::from_integer(m + 1));
                        out.push(CandidateFace {
                            kind: FaceKind::Square,
                            corners,
                            map_data: fd(vec![tl + flo, tl + fhi, tr + fhi, tr + flo]),
                        });
                    }
                }
            }
            // Two owned triangle blocks: the up-face of cell z (partner:
            // sector 1, apex t1, basis rays 1, 2) and the down-face below
            // it (partner: sector 0, apex t0, basis rays 0, 1).
            for (apex, p, q) in [(t[1], mu, nu), (t[0], rho[0], rho[1])] {
                let s_apex = cz + apex;
                for ia in 0..n_i {
                    for ib in 0..(n_i - ia) {
                        let s_base =
                            s_apex + p.scale(Rational64::new(ia, n_i)) + q.scale(Rational64::new(ib, n_i));
                        let f_base = apex
                            + p.scale(Rational64::from_integer(ia))
                            + q.scale(Rational64::from_integer(ib));
                        let sp = p.scale(Rational64::new(1, n_i));
                        let sq = q.scale(Rational64::new(1, n_i));
                        let up = vec![s_base, s_base + sp, s_base + sq];
                        if all_within(&up, reach) {
                            out.push(CandidateFace {
                                kind: FaceKind::Triangle,
                                corners: up,
                                map_data: fd(vec![f_base, f_base + p, f_base + q]),
                            });
                        }
                        if ia + ib < n_i - 1 {
                            let down = vec![s_base + sp, s_base + sp + sq, s_base + sq];
                            if all_within(&down, reach) {
                                out.push(CandidateFace {
                                    kind: FaceKind::Triangle,
                                    corners: down,
                                    map_data: fd(vec![f_base + p, f_base + p + q, f_base + q]),
                                });
                            }
                        }
                    }
                }
            }
        }
    }
    out
}

/// Trim the candidate cells to the requested combinatorial ball and build
/// the final complex with canonical vertex/edge naming.
fn assemble(kind: FlatKind, radius: u32, candidates: Vec<CandidateFace>) -> FlatPatch {
    // Index all candidate vertices.
    let mut all_pts: BTreeSet<Pt> = BTreeSet::new();
    for f in &candidates {
        all_pts.extend(f.corners.iter().copied());
    }
    let pts: Vec<Pt> = all_pts.into_iter().collect();
    let index: HashMap<Pt, usize> = pts.iter().enumerate().map(|(i, p)| (*p, i)).collect();
    let center_idx = *index.get(&Pt::origin()).expect("center is a vertex of every flat kind");

    // 1-skeleton adjacency over all candidates.
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); pts.len()];
    let mut seen_edges = BTreeSet::new();
    for f in &candidates {
        let k = f.corners.len();
        for i in 0..k {
            let a = index[&f.corners[i]];
            let b = index[&f.corners[(i + 1) % k]];
            if seen_edges.insert((a.min(b), a.max(b))) {
                adj[a].push(b);
                adj[b].push(a);
            }
        }
    }

    // BFS distances from the center. The candidate region extends a few
    // cells beyond the requested ball, so distances up to radius + 1 agree
    // with the infinite flat.
    let mut dist = vec![u32::MAX; pts.len()];
    let mut queue = VecDeque::new();
    dist[center_idx] = 0;
    queue.push_back(center_idx);
    while let Some(v) = queue.pop_front() {
        for &w in &adj[v] {
            if dist[w] == u32::MAX {
                dist[w] = dist[v] + 1;
                queue.push_back(w);
            }
        }
    }

    // Keep faces touching the open ball of radius `radius - 1`.
    let kept: Vec<&CandidateFace> = candidates
        .iter()
        .filter(|f| f.corners.iter().any(|p| dist[index[p]] < radius))
        .collect();

    // Canonical naming: vertices and edges sorted by coordinates.
    let mut kept_pts: BTreeSet<Pt> = BTreeSet::new();
    for f in &kept {
        kept_pts.extend(f.corners.iter().copied());
    }
    let coords: Vec<Pt> = kept_pts.into_iter().collect();
    let vid: HashMap<Pt, u32> = coords.iter().enumerate().map(|(i, p)| (*p, i as u32)).collect();
    let mut edge_set: BTreeSet<(Pt, Pt)> = BTreeSet::new();
    for f in &kept {
        let k = f.corners.len();
        for i in 0..k {
            let (a, b) = (f.corners[i], f.corners[(i + 1) % k]);
            edge_set.insert(if a < b { (a, b) } else { (b, a) });
        }
    }
    let edge_ids: BTreeMap<(Pt, Pt), usize> = edge_set.iter().enumerate().map(|(i, e)| (*e, i)).collect();

    let metric = !matches!(kind, FlatKind::FlatFn(n) if n > 1);
    if metric {
        let one = QSqrt3::one();
        for (a, b) in &edge_set {
            assert_eq!((*b - *a).norm2(), one, "non-unit edge in metric flat drawing");
        }
    }

    let desc = Description {
        name: format!("{kind}_r{radius}"),
        vertices: (0..coords.len()).map(|i| format!("v{i}")).collect(),
        edges: edge_ids
            .iter()
            .map(|((a, b), i)| (format!("e{i}"), format!("v{}", vid[a]), format!("v{}", vid[b])))
            .collect(),
        faces: kept
            .iter()
            .map(|f| {
                let k = f.corners.len();
                let word = (0..k)
                    .map(|i| {
                        let (a, b) = (f.corners[i], f.corners[(i + 1) % k]);
                        let forward = a < b;
                        let key = if forward { (a, b) } else { (b, a) };
                        (format!("e{}", edge_ids[&key]), forward)
                    })
                    .collect();
                (f.kind, word)
            })
            .collect(),
    };
    let complex = build_complex(&desc).expect("flat patches are valid by construction");

    // Corner-sum bookkeeping: interior vertices are exactly the flat points.
    let mut weight_at = vec![0u32; coords.len()];
    for f in complex.faces() {
        let w = f.kind.corner_weight();
        for i in 0..f.boundary.len() {
            weight_at[complex.dir_term(f.boundary[i]) as usize] += w;
        }
    }
    let mut boundary = BTreeSet::new();
    for (v, &w) in weight_at.iter().enumerate() {
        assert!(w <= 12, "corner angle sum above 2*pi in a flat patch");
        if w < 12 {
            boundary.insert(v as u32);
        }
    }

    let map_data = kept.iter().map(|f| f.map_data.clone()).collect();
    let coord_index: BTreeMap<Pt, u32> = coords.iter().enumerate().map(|(i, p)| (*p, i as u32)).collect();
    FlatPatch {
        kind,
        complex,
        center: vid[&Pt::origin()],
        coords,
        radius,
        boundary,
        map_data,
        coord_index,
    }
}

/// A maximal edge-connected same-kind group of faces.
#[derive(Clone, Debug)]
pub struct Region {
    pub kind: FaceKind,
    pub faces: BTreeSet<FaceId>,
    pub bounded_in_patch: bool,
}

/// Partition the patch faces into maximal same-kind edge-connected
/// regions. A region is unbounded-in-patch when it touches the patch
/// boundary.
pub fn regions(p: &FlatPatch) -> Vec<Region> {
    let c = &p.complex;
    let nf = c.face_count();
    let mut faces_by_edge: Vec<Vec<u32>> = vec![Vec::new(); c.edge_count()];
    for (fi, f) in c.faces().iter().enumerate() {
        for d in &f.boundary {
            faces_by_edge[d.edge as usize].push(fi as u32);
        }
    }
    let mut parent: Vec<u32> = (0..nf as u32).collect();
    fn find(parent: &mut [u32], x: u32) -> u32 {
        let mut root = x;
        while parent[root as usize] != root {
            root = parent[root as usize];
        }
        let mut cur = x;
        while parent[cur as usize] != root {
            let next = parent[cur as usize];
            parent[cur as usize] = root;
            cur = next;
        }
        root
    }
    for faces in &faces_by_edge {
        for w in faces.windows(2) {
            let (a, b) = (w[0], w[1]);
            if c.face(a).kind == c.face(b).kind {
                let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                parent[ra as usize] = rb;
            }
        }
    }
    let mut groups: BTreeMap<u32, Region> = BTreeMap::new();
    for fi in 0..nf as u32 {
        let root = find(&mut parent, fi);
        let entry = groups.entry(root).or_insert_with(|| Region {
            kind: c.face(fi).kind,
            faces: BTreeSet::new(),
            bounded_in_patch: true,
        });
        entry.faces.insert(fi);
        if c.face(fi).boundary.iter().any(|d| {
            let e = c.edge(d.edge);
            p.boundary.contains(&e.init) || p.boundary.contains(&e.term)
        }) {
            entry.bounded_in_patch = false;
        }
    }
    groups.into_values().collect()
}

/// Interior vertices incident to exactly three triangles and two squares
/// where the two squares share no edge.
pub fn corners(p: &FlatPatch) -> BTreeSet<VertexId> {
    let c = &p.complex;
    let mut incident: Vec<BTreeSet<u32>> = vec![BTreeSet::new(); c.vertex_count()];
    for (fi, f) in c.faces().iter().enumerate() {
        for i in 0..f.boundary.len() {
            incident[c.dir_term(f.boundary[i]) as usize].insert(fi as u32);
        }
    }
    let mut out = BTreeSet::new();
    for v in 0..c.vertex_count() as u32 {
        if p.boundary.contains(&v) {
            continue;
        }
        let (tris, squares): (Vec<u32>, Vec<u32>) =
            incident[v as usize].iter().partition(|&&f| c.face(f).kind == FaceKind::Triangle);
        if tris.len() == 3 && squares.len() == 2 {
            let edges = |f: u32| -> BTreeSet<u32> { c.face(f).boundary.iter().map(|d| d.edge).collect() };
            if edges(squares[0]).is_disjoint(&edges(squares[1])) {
                out.insert(v);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kind_counts(p: &FlatPatch) -> (usize, usize) {
        let t = p.complex.faces().iter().filter(|f| f.kind == FaceKind::Triangle).count();
        (t, p.complex.face_count() - t)
    }

    #[test]
    fn bad_parameters() {
        assert!(gen_flat(FlatKind::FlatF, 0).is_err());
        assert!(gen_flat(FlatKind::FlatFn(0), 3).is_err());
    }

    #[test]
    fn eisenstein_patch_is_flat_and_pure() {
        let p = gen_flat(FlatKind::Eisenstein, 4).unwrap();
        let (t, s) = kind_counts(&p);
        assert!(t > 0);
        assert_eq!(s, 0);
        assert_eq!(regions(&p).len(), 1);
        assert!(corners(&p).is_empty());
        // Interior links are hexagonal: six weight-2 arcs.
        for v in 0..p.complex.vertex_count() as u32 {
            if p.is_interior(v) {
                let g = crate::links::build_link(&p.complex, v);
                assert_eq!(g.arcs.len(), 6);
                assert_eq!(g.total_weight(), 12);
            }
        }
    }

    #[test]
    fn flat_f_radius_3_has_exactly_six_corners() {
        let p = gen_flat(FlatKind::FlatF, 3).unwrap();
        let cs = corners(&p);
        assert_eq!(cs.len(), 6);
        // The corners are exactly the hexagon corners, at distance 1 of o.
        for j in 0..6 {
            let v = p.vertex_at(&Pt::hex_corner_dir(j)).unwrap();
            assert!(cs.contains(&v));
        }
    }

    #[test]
    fn flat_f_radius_5_has_thirteen_regions() {
        let p = gen_flat(FlatKind::FlatF, 5).unwrap();
        let rs = regions(&p);
        assert_eq!(rs.len(), 13);
        let bounded: Vec<&Region> = rs.iter().filter(|r| r.bounded_in_patch).collect();
        assert_eq!(bounded.len(), 1);
        assert_eq!(bounded[0].kind, FaceKind::Triangle);
        assert_eq!(bounded[0].faces.len(), 6);
        let squares = rs.iter().filter(|r| r.kind == FaceKind::Square).count();
        assert_eq!(squares, 6);
        assert_eq!(rs.iter().filter(|r| !r.bounded_in_patch).count(), 12);
    }

    #[test]
    fn flat_f_rotation_symmetry() {
        let p = gen_flat(FlatKind::FlatF, 4).unwrap();
        // The coordinate rotation by 60 degrees maps cells to cells.
        let face_keys: BTreeSet<Vec<Pt>> = p
            .complex
            .faces()
            .iter()
            .map(|f| {
                let mut corners: Vec<Pt> = (0..f.boundary.len())
                    .map(|i| p.coords[p.complex.dir_term(f.boundary[i]) as usize])
                    .collect();
                corners.sort();
                corners
            })
            .collect();
        for key in &face_keys {
            let mut rot: Vec<Pt> = key.iter().map(|q| q.rot60(1)).collect();
            rot.sort();
            assert!(face_keys.contains(&rot), "rotation fails on {key:?}");
        }
    }

    #[test]
    fn boundary_is_far_and_interior_is_flat() {
        for kind in [FlatKind::Eisenstein, FlatKind::FlatF, FlatKind::FlatG, FlatKind::FlatFn(3)] {
            let p = gen_flat(kind, 4).unwrap();
            // BFS check: every boundary vertex is at distance >= radius.
            let c = &p.complex;
            let mut adj = vec![Vec::new(); c.vertex_count()];
            for e in c.edges() {
                adj[e.init as usize].push(e.term);
                adj[e.term as usize].push(e.init);
            }
            let mut dist = vec![u32::MAX; c.vertex_count()];
            let mut q = VecDeque::new();
            dist[p.center as usize] = 0;
            q.push_back(p.center);
            while let Some(v) = q.pop_front() {
                for &w in &adj[v as usize] {
                    if dist[w as usize] == u32::MAX {
                        dist[w as usize] = dist[v as usize] + 1;
                        q.push_back(w);
                    }
                }
            }
            for &b in &p.boundary {
                assert!(dist[b as usize] >= p.radius, "{kind}: boundary at distance {}", dist[b as usize]);
            }
            for v in 0..c.vertex_count() as u32 {
                if p.is_interior(v) {
                    assert_eq!(c.corner_weight_at(v), 12, "{kind}: non-flat interior vertex");
                }
            }
        }
    }

    #[test]
    fn monotone_generation() {
        for kind in [FlatKind::Eisenstein, FlatKind::FlatF, FlatKind::FlatFn(2)] {
            let small = gen_flat(kind, 3).unwrap();
            let large = gen_flat(kind, 4).unwrap();
            let face_key = |p: &FlatPatch, f: &crate::complex::Face| {
                let mut corners: Vec<Pt> = (0..f.boundary.len())
                    .map(|i| p.coords[p.complex.dir_term(f.boundary[i]) as usize])
                    .collect();
                corners.sort();
                corners
            };
            let large_keys: BTreeSet<Vec<Pt>> =
                large.complex.faces().iter().map(|f| face_key(&large, f)).collect();
            for f in small.complex.faces() {
                assert!(large_keys.contains(&face_key(&small, f)), "{kind}: radius 3 not inside radius 4");
            }
        }
    }

    #[test]
    fn fn_patches_have_expected_regions() {
        let p = gen_flat(FlatKind::FlatFn(2), 4).unwrap();
        for r in regions(&p) {
            if r.bounded_in_patch {
                assert!(r.faces.len() <= 6, "interior region with {} faces", r.faces.len());
                match r.kind {
                    FaceKind::Triangle => assert!(r.faces.len() == 6 || r.faces.len() == 4),
                    FaceKind::Square => assert_eq!(r.faces.len(), 2),
                }
            }
        }
        // F_1 = G: every interior hexagon-boundary vertex is a corner.
        let g = gen_flat(FlatKind::FlatFn(1), 4).unwrap();
        let cs = corners(&g);
        for j in 0..6 {
            let v = g.vertex_at(&Pt::hex_corner_dir(j)).unwrap();
            assert!(cs.contains(&v), "hexagon corner {j} is not a corner");
        }
        // Corners of a neighboring hexagon count too, while hexagon centers
        // and block-interior vertices do not.
        let scale = QSqrt3::new(Rational64::from_integer(1), Rational64::from_integer(1));
        let z = Pt::ray_dir(1);
        let neighbor_center = Pt::new(scale * z.x, scale * z.y);
        let shifted = neighbor_center + Pt::hex_corner_dir(3);
        let v = g.vertex_at(&shifted).unwrap();
        if g.is_interior(v) {
            assert!(cs.contains(&v));
        }
        assert!(!cs.contains(&g.vertex_at(&neighbor_center).unwrap()));
    }

    #[test]
    fn fn_interior_links_weigh_twelve() {
        let p = gen_flat(FlatKind::FlatFn(3), 4).unwrap();
        let mut interior = 0;
        for v in 0..p.complex.vertex_count() as u32 {
            if p.is_interior(v) {
                interior += 1;
                assert_eq!(p.complex.corner_weight_at(v), 12);
            }
        }
        assert!(interior > 10);
    }

    #[test]
    fn flat_g_matches_flat_fn_1() {
        let g = gen_flat(FlatKind::FlatG, 3).unwrap();
        let f1 = gen_flat(FlatKind::FlatFn(1), 3).unwrap();
        assert_eq!(g.complex.face_count(), f1.complex.face_count());
        assert_eq!(g.complex.vertex_count(), f1.complex.vertex_count());
    }
}
