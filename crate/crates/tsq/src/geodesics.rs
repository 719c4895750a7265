//! 1-skeleton geodesics, the square/triangle moves, choke points,
//! Gersten-Short geodesics and fellow-traveling measurements.
//!
//! Queries run over a [`Skeleton`]: the 1-skeleton of a complex together
//! with a designated boundary vertex set (empty for closed complexes,
//! the incomplete-link vertices for patches and developed balls). Move
//! classification is a theorem about CAT(0) complexes, so queries are
//! accepted only while everything they touch stays at least two cells
//! away from the boundary.

use crate::complex::{Complex, DirectedEdge, EdgeId, FaceId, FaceKind, VertexId};
use crate::develop::DevelopedBall;
use crate::flats::{gen_flat, FlatKind, FlatPatch};
use crate::qsqrt3::Pt;
use num_rational::Rational64;
use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::sync::Arc;
use thiserror::Error;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum GeodesicError {
    #[error("vertices lie in different components")]
    Disconnected,
    #[error("unclassifiable first-edge set: {0}")]
    UnclassifiableFirstEdgeSet(String),
    #[error("patch too small: {0}")]
    PatchTooSmall(String),
    #[error("no configuration found: {0}")]
    NoConfigurationFound(String),
    #[error("bad parameter: {0}")]
    BadParameter(String),
}

/// A 1-skeleton with face incidence and boundary margins.
pub struct Skeleton {
    pub complex: Arc<Complex>,
    /// Outgoing `(neighbor, edge)` per vertex, sorted by edge id.
    adj: Vec<Vec<(VertexId, EdgeId)>>,
    faces_by_edge: Vec<Vec<FaceId>>,
    /// Distance to the nearest boundary vertex (`u32::MAX` if none).
    pub boundary_depth: Vec<u32>,
}

impl Skeleton {
    pub fn new(complex: Arc<Complex>, boundary: &BTreeSet<VertexId>) -> Self {
        let n = complex.vertex_count();
        let mut adj: Vec<Vec<(VertexId, EdgeId)>> = vec![Vec::new(); n];
        for (ei, e) in complex.edges().iter().enumerate() {
            adj[e.init as usize].push((e.term, ei as EdgeId));
            if e.init != e.term {
                adj[e.term as usize].push((e.init, ei as EdgeId));
            }
        }
        for a in &mut adj {
            a.sort();
        }
        let mut faces_by_edge: Vec<Vec<FaceId>> = vec![Vec::new(); complex.edge_count()];
        for (fi, f) in complex.faces().iter().enumerate() {
            for d in &f.boundary {
                if !faces_by_edge[d.edge as usize].contains(&(fi as FaceId)) {
                    faces_by_edge[d.edge as usize].push(fi as FaceId);
                }
            }
        }
        let mut boundary_depth = vec![u32::MAX; n];
        let mut queue = VecDeque::new();
        for &b in boundary {
            boundary_depth[b as usize] = 0;
            queue.push_back(b);
        }
        while let Some(x) = queue.pop_front() {
            for &(y, _) in &adj[x as usize] {
                if boundary_depth[y as usize] == u32::MAX {
                    boundary_depth[y as usize] = boundary_depth[x as usize] + 1;
                    queue.push_back(y);
                }
            }
        }
        Skeleton { complex, adj, faces_by_edge, boundary_depth }
    }

    pub fn from_patch(p: &FlatPatch) -> Self {
        Skeleton::new(Arc::new(p.complex.clone()), &p.boundary)
    }

    /// Boundary of a ball: the vertices with incomplete links.
    pub fn from_ball(b: &DevelopedBall) -> Self {
        let boundary: BTreeSet<VertexId> =
            (0..b.ball.vertex_count() as VertexId).filter(|v| !b.interior.contains(v)).collect();
        Skeleton::new(b.ball.clone(), &boundary)
    }

    pub fn distances_from(&self, v: VertexId) -> Vec<u32> {
        let mut dist = vec![u32::MAX; self.adj.len()];
        let mut queue = VecDeque::new();
        dist[v as usize] = 0;
        queue.push_back(v);
        while let Some(x) = queue.pop_front() {
            for &(y, _) in &self.adj[x as usize] {
                if dist[y as usize] == u32::MAX {
                    dist[y as usize] = dist[x as usize] + 1;
                    queue.push_back(y);
                }
            }
        }
        dist
    }

    pub fn distance(&self, u: VertexId, v: VertexId) -> Result<u32, GeodesicError> {
        let d = self.distances_from(u)[v as usize];
        if d == u32::MAX {
            Err(GeodesicError::Disconnected)
        } else {
            Ok(d)
        }
    }

    fn margin_ok(&self, v: VertexId) -> bool {
        self.boundary_depth[v as usize] >= 2
    }

    fn face_vertices(&self, f: FaceId) -> Vec<VertexId> {
        let face = self.complex.face(f);
        (0..face.boundary.len()).map(|i| self.complex.dir_term(face.boundary[i])).collect()
    }
}

/// All directed edges lying on at least one geodesic from `from` to `to`.
#[derive(Clone, Debug)]
pub struct GeodesicDag {
    pub from: VertexId,
    pub to: VertexId,
    pub distance: u32,
    /// Directed arcs `(a, b, edge)` with `d(from,a) + 1 + d(b,to) = distance`.
    pub arcs: Vec<(VertexId, VertexId, EdgeId)>,
    pub nodes: BTreeSet<VertexId>,
    out: BTreeMap<VertexId, Vec<(VertexId, EdgeId)>>,
}

impl GeodesicDag {
    pub fn out_arcs(&self, v: VertexId) -> &[(VertexId, EdgeId)] {
        self.out.get(&v).map(Vec::as_slice).unwrap_or(&[])
    }

    /// True when every maximal dag path passes through `w`.
    pub fn all_paths_pass(&self, w: VertexId) -> bool {
        if self.from == w || self.to == w {
            return true;
        }
        if !self.nodes.contains(&w) {
            return false;
        }
        // Reachability from the source with w removed.
        let mut stack = vec![self.from];
        let mut seen = BTreeSet::from([self.from]);
        while let Some(x) = stack.pop() {
            for &(y, _) in self.out_arcs(x) {
                if y == w || !seen.insert(y) {
                    continue;
                }
                if y == self.to {
                    return false;
                }
                stack.push(y);
            }
        }
        true
    }
}

/// Compute the geodesic dag between two vertices; `distance` is the BFS
/// distance and the arcs are exactly the directed edges on geodesics.
pub fn geodesic_dag(sk: &Skeleton, u: VertexId, v: VertexId) -> Result<GeodesicDag, GeodesicError> {
    let du = sk.distances_from(u);
    if du[v as usize] == u32::MAX {
        return Err(GeodesicError::Disconnected);
    }
    let dv = sk.distances_from(v);
    let distance = du[v as usize];
    let mut arcs = Vec::new();
    let mut nodes = BTreeSet::new();
    let mut out: BTreeMap<VertexId, Vec<(VertexId, EdgeId)>> = BTreeMap::new();
    if distance == 0 {
        nodes.insert(u);
        return Ok(GeodesicDag { from: u, to: v, distance, arcs, nodes, out });
    }
    for (a, adj) in sk.adj.iter().enumerate() {
        let a = a as VertexId;
        if du[a as usize] == u32::MAX {
            continue;
        }
        for &(b, e) in adj {
            if du[a as usize] != u32::MAX
                && dv[b as usize] != u32::MAX
                && du[a as usize] + 1 + dv[b as usize] == distance
            {
                arcs.push((a, b, e));
                nodes.insert(a);
                nodes.insert(b);
                out.entry(a).or_default().push((b, e));
            }
        }
    }
    for list in out.values_mut() {
        list.sort_by_key(|&(_, e)| e);
    }
    Ok(GeodesicDag { from: u, to: v, distance, arcs, nodes, out })
}

/// The structure of the first edges of all geodesics from the dag source.
#[derive(Clone, Debug)]
pub enum MoveClassification {
    /// All geodesics start with one edge; `vprime` is its far endpoint.
    UniqueEdge { edge: EdgeId, vprime: VertexId },
    /// Two first edges spanning a square; `vprime` is the opposite corner.
    SquareMove { square: FaceId, edges: (EdgeId, EdgeId), vprime: VertexId },
    /// Two first edges spanning a triangle; a (possibly empty) row of
    /// squares ends in a second triangle whose off-row vertex is `vprime`.
    TriangleRowMove { triangle: FaceId, squares: Vec<FaceId>, triangle_end: FaceId, vprime: VertexId },
}

impl MoveClassification {
    pub fn vprime(&self) -> VertexId {
        match self {
            MoveClassification::UniqueEdge { vprime, .. }
            | MoveClassification::SquareMove { vprime, .. }
            | MoveClassification::TriangleRowMove { vprime, .. } => *vprime,
        }
    }

    /// Vertices of the move region, for margin enforcement.
    pub fn region_vertices(&self, sk: &Skeleton) -> BTreeSet<VertexId> {
        let mut out = BTreeSet::new();
        match self {
            MoveClassification::UniqueEdge { vprime, .. } => {
                out.insert(*vprime);
            }
            MoveClassification::SquareMove { square, .. } => {
                out.extend(sk.face_vertices(*square));
            }
            MoveClassification::TriangleRowMove { triangle, squares, triangle_end, .. } => {
                out.extend(sk.face_vertices(*triangle));
                for s in squares {
                    out.extend(sk.face_vertices(*s));
                }
                out.extend(sk.face_vertices(*triangle_end));
            }
        }
        out
    }
}

/// Classify the first-edge set of a geodesic dag into one of the three
/// moves. Total on interior-safe queries in CAT(0) inputs; anything else
/// is reported as unclassifiable.
pub fn classify_move(sk: &Skeleton, dag: &GeodesicDag) -> Result<MoveClassification, GeodesicError> {
    if dag.distance == 0 {
        return Err(GeodesicError::UnclassifiableFirstEdgeSet("zero-length query".into()));
    }
    let first: Vec<(VertexId, EdgeId)> = dag.out_arcs(dag.from).to_vec();
    match first.len() {
        0 => Err(GeodesicError::UnclassifiableFirstEdgeSet("empty first-edge set".into())),
        1 => Ok(MoveClassification::UniqueEdge { edge: first[0].1, vprime: first[0].0 }),
        2 => {
            let (x1, e1) = first[0];
            let (x2, e2) = first[1];
            if x1 == x2 {
                return Err(GeodesicError::UnclassifiableFirstEdgeSet(
                    "two first edges with equal endpoints".into(),
                ));
            }
            // The unique face containing both first edges.
            let shared: Vec<FaceId> = sk.faces_by_edge[e1 as usize]
                .iter()
                .copied()
                .filter(|f| sk.faces_by_edge[e2 as usize].contains(f))
                .collect();
            let [face] = shared.as_slice() else {
                return Err(GeodesicError::UnclassifiableFirstEdgeSet(format!(
                    "first edges shared by {} faces",
                    shared.len()
                )));
            };
            match sk.complex.face(*face).kind {
                FaceKind::Square => {
                    let corners = sk.face_vertices(*face);
                    let vprime: Vec<VertexId> = corners
                        .iter()
                        .copied()
                        .filter(|&c| c != dag.from && c != x1 && c != x2)
                        .collect();
                    let [vprime] = vprime.as_slice() else {
                        return Err(GeodesicError::UnclassifiableFirstEdgeSet(
                            "degenerate square in first-edge set".into(),
                        ));
                    };
                    Ok(MoveClassification::SquareMove { square: *face, edges: (e1, e2), vprime: *vprime })
                }
                FaceKind::Triangle => walk_square_row(sk, dag.from, *face, x1, x2),
            }
        }
        n => Err(GeodesicError::UnclassifiableFirstEdgeSet(format!("{n} first edges"))),
    }
}

/// Walk the square row opposite `from` in the starting triangle until a
/// closing triangle appears; its off-row vertex is the move target.
fn walk_square_row(
    sk: &Skeleton,
    from: VertexId,
    triangle: FaceId,
    x1: VertexId,
    x2: VertexId,
) -> Result<MoveClassification, GeodesicError> {
    // Edge of the triangle opposite `from`.
    let tri = sk.complex.face(triangle);
    let mut cur_edge: Option<EdgeId> = None;
    for d in &tri.boundary {
        let e = sk.complex.edge(d.edge);
        if (e.init == x1 && e.term == x2) || (e.init == x2 && e.term == x1) {
            cur_edge = Some(d.edge);
        }
    }
    let Some(mut cur_edge) = cur_edge else {
        return Err(GeodesicError::UnclassifiableFirstEdgeSet(
            "first edges span a triangle without the opposite edge".into(),
        ));
    };
    let mut prev: FaceId = triangle;
    let mut squares = Vec::new();
    loop {
        let next: Vec<FaceId> =
            sk.faces_by_edge[cur_edge as usize].iter().copied().filter(|&f| f != prev).collect();
        let [next] = next.as_slice() else {
            return Err(GeodesicError::UnclassifiableFirstEdgeSet(format!(
                "square row leaves the developed region ({} continuations)",
                next.len()
            )));
        };
        let face = sk.complex.face(*next);
        match face.kind {
            FaceKind::Triangle => {
                let (a, b) = {
                    let e = sk.complex.edge(cur_edge);
                    (e.init, e.term)
                };
                let vprime: Vec<VertexId> =
                    sk.face_vertices(*next).into_iter().filter(|&c| c != a && c != b).collect();
                let [vprime] = vprime.as_slice() else {
                    return Err(GeodesicError::UnclassifiableFirstEdgeSet(
                        "degenerate closing triangle".into(),
                    ));
                };
                let _ = from;
                return Ok(MoveClassification::TriangleRowMove {
                    triangle,
                    squares,
                    triangle_end: *next,
                    vprime: *vprime,
                });
            }
            FaceKind::Square => {
                // Exit through the side sharing no vertex with the entry.
                let (a, b) = {
                    let e = sk.complex.edge(cur_edge);
                    (e.init, e.term)
                };
                let mut opposite = None;
                for d in &face.boundary {
                    let e = sk.complex.edge(d.edge);
                    if e.init != a && e.init != b && e.term != a && e.term != b {
                        opposite = Some(d.edge);
                    }
                }
                let Some(opposite) = opposite else {
                    return Err(GeodesicError::UnclassifiableFirstEdgeSet(
                        "square without an opposite side in the row".into(),
                    ));
                };
                squares.push(*next);
                prev = *next;
                cur_edge = opposite;
            }
        }
    }
}

/// A 1-skeleton path stored as directed edges plus the vertex sequence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Path {
    pub edges: Vec<DirectedEdge>,
    pub vertices: Vec<VertexId>,
}

impl Path {
    pub fn single_vertex(v: VertexId) -> Self {
        Path { edges: Vec::new(), vertices: vec![v] }
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// The i-th vertex with terminal padding.
    pub fn vertex_at(&self, i: usize) -> VertexId {
        *self.vertices.get(i).unwrap_or_else(|| self.vertices.last().unwrap())
    }

    pub fn is_valid(&self, c: &Complex) -> bool {
        if self.vertices.len() != self.edges.len() + 1 {
            return false;
        }
        self.edges.iter().enumerate().all(|(i, &d)| {
            c.dir_init(d) == self.vertices[i] && c.dir_term(d) == self.vertices[i + 1]
        })
    }
}

/// The choke points between `u` and `v`: the recursive move targets,
/// starting at `u` and ending at `v`, with strictly decreasing distance
/// to `v`. Enforces the interior-safety margin on everything it touches.
pub fn choke_points(sk: &Skeleton, u: VertexId, v: VertexId) -> Result<Vec<VertexId>, GeodesicError> {
    let dv = sk.distances_from(v);
    if dv[u as usize] == u32::MAX {
        return Err(GeodesicError::Disconnected);
    }
    let check_margin = |verts: &BTreeSet<VertexId>| -> Result<(), GeodesicError> {
        for &x in verts {
            if !sk.margin_ok(x) {
                return Err(GeodesicError::PatchTooSmall(format!(
                    "vertex {} is within two cells of the boundary",
                    sk.complex.vertex_name(x)
                )));
            }
        }
        Ok(())
    };
    let mut chokes = vec![u];
    let mut cur = u;
    while cur != v {
        let dag = geodesic_dag(sk, cur, v)?;
        check_margin(&dag.nodes)?;
        let mv = classify_move(sk, &dag)?;
        check_margin(&mv.region_vertices(sk))?;
        let next = mv.vprime();
        if dv[next as usize] >= dv[cur as usize] {
            return Err(GeodesicError::UnclassifiableFirstEdgeSet(format!(
                "move target does not approach the goal (d {} -> {})",
                dv[cur as usize], dv[next as usize]
            )));
        }
        chokes.push(next);
        cur = next;
    }
    Ok(chokes)
}

/// The canonical Gersten-Short geodesic: concatenation of the
/// lexicographically minimal (by edge identifier) geodesic segments
/// between consecutive choke points.
pub fn gersten_short(sk: &Skeleton, u: VertexId, v: VertexId) -> Result<Path, GeodesicError> {
    let chokes = choke_points(sk, u, v)?;
    let mut path = Path::single_vertex(u);
    for pair in chokes.windows(2) {
        let dag = geodesic_dag(sk, pair[0], pair[1])?;
        let mut cur = pair[0];
        while cur != pair[1] {
            let &(next, e) = dag
                .out_arcs(cur)
                .first()
                .expect("every dag node reaches the sink");
            let edge = sk.complex.edge(e);
            let d = DirectedEdge { edge: e, forward: edge.init == cur };
            path.edges.push(d);
            path.vertices.push(next);
            cur = next;
        }
    }
    debug_assert!(path.is_valid(&sk.complex));
    Ok(path)
}

/// Maximum synchronous distance between two paths, with terminal-vertex
/// padding.
pub fn fellow_travel_distance(sk: &Skeleton, p: &Path, q: &Path) -> Result<u32, GeodesicError> {
    let steps = p.len().max(q.len());
    let mut worst = 0;
    for i in 0..=steps {
        let d = sk.distance(p.vertex_at(i), q.vertex_at(i))?;
        worst = worst.max(d);
    }
    Ok(worst)
}

/// Outcome of the non-fellow-traveling experiment on the radial flat.
#[derive(Clone, Debug)]
pub struct FtpExperiment {
    pub ell: u32,
    pub d_u1_v1: u32,
    pub d_u2_v2: u32,
    /// Minimum distance from the center to the Gersten-Short geodesic
    /// between the near pair.
    pub min_dist_center: u32,
    /// Whether every geodesic between the far pair passes the center.
    pub passes_center: bool,
    /// Fellow-travel distance of the two Gersten-Short geodesics.
    pub ft_distance: u32,
    pub vertices: [String; 4],
}

/// Search a radial-flat patch for the separation configuration: `u1`,
/// `u2` at distance `ell` from the center joined by an edge interior to a
/// square region, and `v1`, `v2` their rotations by 120 degrees with
/// `d(u1,v1) < d(u2,v2)`. Candidates are scanned in coordinate
/// lexicographic order and the first valid one wins.
pub fn flat_ftp_experiment(ell: u32, radius: u32) -> Result<FtpExperiment, GeodesicError> {
    if ell < 3 || ell % 2 == 0 {
        return Err(GeodesicError::BadParameter("separation parameter must be odd and at least 3".into()));
    }
    let patch = gen_flat(FlatKind::FlatF, radius).map_err(|e| GeodesicError::BadParameter(e.to_string()))?;
    let sk = Skeleton::from_patch(&patch);
    let d_center = sk.distances_from(patch.center);

    // Rung ell-1 of each strip has both endpoints at distance ell.
    let m = Rational64::from_integer((ell - 1) as i64);
    let mut candidates = Vec::new();
    for j in 0..6 {
        let base = Pt::ray_dir(j).scale(m);
        let p = base + Pt::hex_corner_dir(j - 1);
        let q = base + Pt::hex_corner_dir(j);
        for (u1, u2) in [(p, q), (q, p)] {
            for rot in [2, -2] {
                let v1 = u2.rot60(rot);
                let v2 = u1.rot60(rot);
                candidates.push((u1, u2, v1, v2));
            }
        }
    }
    candidates.sort();

    for (u1, u2, v1, v2) in candidates {
        let ids = [u1, u2, v1, v2].map(|p| patch.vertex_at(&p));
        let [Some(u1), Some(u2), Some(v1), Some(v2)] = ids else { continue };
        if d_center[u1 as usize] != ell || d_center[u2 as usize] != ell {
            continue;
        }
        // The connecting edge must be interior to a square region.
        let edge = sk.adj[u1 as usize].iter().find(|&&(w, _)| w == u2).map(|&(_, e)| e);
        let Some(edge) = edge else { continue };
        let all_square = sk.faces_by_edge[edge as usize].len() == 2
            && sk.faces_by_edge[edge as usize]
                .iter()
                .all(|&f| sk.complex.face(f).kind == FaceKind::Square);
        if !all_square {
            continue;
        }
        let d11 = sk.distance(u1, v1)?;
        let d22 = sk.distance(u2, v2)?;
        if d11 >= d22 {
            continue;
        }

        let gs1 = gersten_short(&sk, u1, v1)?;
        let gs2 = gersten_short(&sk, u2, v2)?;
        let min_dist_center =
            gs1.vertices.iter().map(|&x| d_center[x as usize]).min().expect("nonempty path");
        let far_dag = geodesic_dag(&sk, u2, v2)?;
        let passes_center = far_dag.all_paths_pass(patch.center);
        let ft_distance = fellow_travel_distance(&sk, &gs1, &gs2)?;
        let name = |v: VertexId| sk.complex.vertex_name(v).to_owned();
        return Ok(FtpExperiment {
            ell,
            d_u1_v1: d11,
            d_u2_v2: d22,
            min_dist_center,
            passes_center,
            ft_distance,
            vertices: [name(u1), name(u2), name(v1), name(v2)],
        });
    }
    Err(GeodesicError::NoConfigurationFound(format!(
        "no separation-{ell} configuration fits in a radius-{radius} patch"
    )))
}
