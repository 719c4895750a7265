//! Development of universal-cover balls and lifts of patch maps.
//!
//! For a locally CAT(0) base (enforced via the Gromov check), the ball is
//! grown by breadth-first link completion: every vertex within distance
//! `radius - 1` of the basepoint lift gets a fresh face copy for each
//! unrealized corner of its base link. Walking a new face copy reuses an
//! existing edge exactly when the vertex already carries a lift of the
//! required edge end, and never identifies cells otherwise; this is the
//! covering-space condition that makes the projection restrict to link
//! isomorphisms. The result is then trimmed to the vertices within
//! distance `radius`.

use crate::cellmaps::{make_map, CellularMap, MapError};
use crate::complex::{build_complex, Complex, Description, DirectedEdge, EdgeId, FaceId, VertexId};
use crate::links::{build_link, check_gromov, end_node, start_node, LinkGraph};
use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap, HashMap, VecDeque};
use std::sync::Arc;
use thiserror::Error;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum DevelopError {
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("cell budget exceeded: {faces} faces (budget {budget})")]
    ResourceLimit { faces: usize, budget: usize },
    #[error("ball too small: {0}")]
    BallTooSmall(String),
    #[error("anchor mismatch: {0}")]
    AnchorMismatch(String),
    #[error("lift inconsistency: {0}")]
    LiftInconsistent(String),
}

#[derive(Clone, Copy, Debug)]
pub struct DevelopOptions {
    /// Hard cap on the number of faces developed before trimming.
    pub max_faces: usize,
}

impl Default for DevelopOptions {
    fn default() -> Self {
        DevelopOptions { max_faces: 1_000_000 }
    }
}

/// A developed ball of the universal cover.
#[derive(Clone, Debug)]
pub struct DevelopedBall {
    pub base: Arc<Complex>,
    pub basepoint: VertexId,
    pub radius: u32,
    pub ball: Arc<Complex>,
    /// Cell-preserving projection onto the base.
    pub projection: CellularMap,
    pub basepoint_lift: VertexId,
    /// Ball vertices whose link is complete.
    pub interior: BTreeSet<VertexId>,
    /// Distance from the basepoint lift, per ball vertex.
    pub dist: Vec<u32>,
}

struct BVert {
    base: VertexId,
    dist: u32,
    /// Ball edge per base-link node, `u32::MAX` when absent.
    ends: Vec<u32>,
    /// Realized base-link arcs.
    matched: Vec<bool>,
    matched_count: usize,
}

struct BEdge {
    base: EdgeId,
    init: u32,
    term: u32,
}

struct BFace {
    base: FaceId,
    /// Walk vertices aligned with the base boundary word: `verts[i]` is
    /// the initial vertex of the lift of boundary position `i`.
    verts: Vec<u32>,
    /// Ball edge per boundary position.
    edges: Vec<u32>,
}

struct Builder<'a> {
    base: &'a Complex,
    links: Vec<LinkGraph>,
    /// Per base vertex: arc index by (face, corner) provenance.
    arc_lookup: Vec<HashMap<(FaceId, u32), usize>>,
    verts: Vec<BVert>,
    edges: Vec<BEdge>,
    faces: Vec<BFace>,
    worklist: BinaryHeap<Reverse<(u32, u32)>>,
}

impl<'a> Builder<'a> {
    fn new_vertex(&mut self, base: VertexId, dist: u32) -> u32 {
        let link = &self.links[base as usize];
        let id = self.verts.len() as u32;
        self.verts.push(BVert {
            base,
            dist,
            ends: vec![u32::MAX; link.nodes.len()],
            matched: vec![false; link.arcs.len()],
            matched_count: 0,
        });
        self.worklist.push(Reverse((dist, id)));
        id
    }

    fn node_idx(&self, ball_v: u32, node: crate::links::LinkNode) -> usize {
        self.links[self.verts[ball_v as usize].base as usize]
            .node_index(node)
            .expect("edge end exists in the base link")
    }

    fn end_at(&self, ball_v: u32, node: crate::links::LinkNode) -> Option<u32> {
        let idx = self.node_idx(ball_v, node);
        let e = self.verts[ball_v as usize].ends[idx];
        (e != u32::MAX).then_some(e)
    }

    /// Create the edge lift of `base_edge` from `init_v` to `term_v`
    /// (projection-orientation preserving) and register both ends.
    fn new_edge(&mut self, base_edge: EdgeId, init_v: u32, term_v: u32) -> u32 {
        let id = self.edges.len() as u32;
        self.edges.push(BEdge { base: base_edge, init: init_v, term: term_v });
        let ni = self.node_idx(
            init_v,
            crate::links::LinkNode { edge: base_edge, end: crate::links::EndKind::Initial },
        );
        let nt = self.node_idx(
            term_v,
            crate::links::LinkNode { edge: base_edge, end: crate::links::EndKind::Terminal },
        );
        debug_assert_eq!(self.verts[init_v as usize].ends[ni], u32::MAX);
        debug_assert_eq!(self.verts[term_v as usize].ends[nt], u32::MAX);
        self.verts[init_v as usize].ends[ni] = id;
        self.verts[term_v as usize].ends[nt] = id;
        self.relax_edge(init_v, term_v);
        id
    }

    fn other_end(&self, edge: u32, v: u32) -> u32 {
        let e = &self.edges[edge as usize];
        if e.init == v {
            e.term
        } else {
            debug_assert_eq!(e.term, v);
            e.init
        }
    }

    /// Distance relaxation with cascade after inserting an edge.
    fn relax_edge(&mut self, a: u32, b: u32) {
        let mut queue = VecDeque::new();
        let (da, db) = (self.verts[a as usize].dist, self.verts[b as usize].dist);
        if db > da + 1 {
            self.verts[b as usize].dist = da + 1;
            self.worklist.push(Reverse((da + 1, b)));
            queue.push_back(b);
        } else if da > db + 1 {
            self.verts[a as usize].dist = db + 1;
            self.worklist.push(Reverse((db + 1, a)));
            queue.push_back(a);
        }
        while let Some(x) = queue.pop_front() {
            let dx = self.verts[x as usize].dist;
            let neighbors: Vec<u32> = self.verts[x as usize]
                .ends
                .iter()
                .filter(|&&e| e != u32::MAX)
                .map(|&e| self.other_end(e, x))
                .collect();
            for y in neighbors {
                if self.verts[y as usize].dist > dx + 1 {
                    self.verts[y as usize].dist = dx + 1;
                    self.worklist.push(Reverse((dx + 1, y)));
                    queue.push_back(y);
                }
            }
        }
    }

    /// Attach a fresh copy of the face behind the given unmatched arc of
    /// the link of `u`.
    ///
    /// Identification is forced through both flanks of the corner: the
    /// boundary lift is consumed forward and backward along existing
    /// edges, and only the remaining gap receives fresh cells. The stop
    /// condition of each chain guarantees the gap endpoints have free
    /// edge-end slots, so fresh cells never collide.
    fn attach_face(&mut self, u: u32, arc_idx: usize) {
        let base_v = self.verts[u as usize].base;
        let arc = self.links[base_v as usize].arcs[arc_idx];
        let face = arc.face;
        let word: Vec<DirectedEdge> = self.base.face(face).boundary.clone();
        let len = word.len();
        let corner = arc.corner as usize;
        // Slot s holds the lift of boundary position (corner + 1 + s),
        // running from slot_vert[s] to slot_vert[s + 1]; both chains start
        // at the corner vertex u = slot_vert[0] = slot_vert[len].
        let pos_of = |s: usize| (corner + 1 + s) % len;
        let mut slot_vert: Vec<Option<u32>> = vec![None; len + 1];
        let mut slot_edge: Vec<Option<u32>> = vec![None; len];
        slot_vert[0] = Some(u);
        slot_vert[len] = Some(u);

        let mut fwd = 0;
        while fwd < len {
            let cur = slot_vert[fwd].unwrap();
            let d = word[pos_of(fwd)];
            debug_assert_eq!(self.verts[cur as usize].base, self.base.dir_init(d));
            match self.end_at(cur, start_node(d)) {
                Some(e) => {
                    slot_edge[fwd] = Some(e);
                    let far = self.other_end(e, cur);
                    fwd += 1;
                    if fwd < len {
                        slot_vert[fwd] = Some(far);
                    } else {
                        assert_eq!(far, u, "development produced an inconsistent face closure");
                    }
                }
                None => break,
            }
        }
        let mut bwd = len;
        while bwd > fwd {
            let cur = slot_vert[bwd].unwrap();
            let d = word[pos_of(bwd - 1)];
            debug_assert_eq!(self.verts[cur as usize].base, self.base.dir_term(d));
            match self.end_at(cur, end_node(d)) {
                Some(e) => {
                    slot_edge[bwd - 1] = Some(e);
                    let far = self.other_end(e, cur);
                    bwd -= 1;
                    if bwd > fwd {
                        slot_vert[bwd] = Some(far);
                    } else {
                        assert_eq!(
                            Some(far),
                            slot_vert[fwd],
                            "development produced an inconsistent face closure"
                        );
                    }
                }
                None => break,
            }
        }
        // Fresh cells fill slots fwd..bwd.
        for s in fwd..bwd {
            let cur = slot_vert[s].unwrap();
            let d = word[pos_of(s)];
            let far = if s + 1 == bwd {
                let far = slot_vert[s + 1].unwrap();
                assert_ne!(cur, far, "development tried to close a face with a loop edge");
                far
            } else {
                let dist = self.verts[cur as usize].dist + 1;
                let far = self.new_vertex(self.base.dir_term(d), dist);
                slot_vert[s + 1] = Some(far);
                far
            };
            let (iv, tv) = if d.forward { (cur, far) } else { (far, cur) };
            slot_edge[s] = Some(self.new_edge(d.edge, iv, tv));
        }

        // Reindex slots to boundary positions.
        let mut pos_edges = vec![u32::MAX; len];
        let mut pos_verts = vec![u32::MAX; len];
        for s in 0..len {
            pos_edges[pos_of(s)] = slot_edge[s].unwrap();
            pos_verts[pos_of(s)] = slot_vert[s].unwrap();
        }

        // Record the face and realize one corner arc at each walk vertex.
        for p in 0..len {
            let at = pos_verts[(p + 1) % len];
            let bv = self.verts[at as usize].base;
            let ai = self.arc_lookup[bv as usize][&(face, p as u32)];
            let vert = &mut self.verts[at as usize];
            assert!(!vert.matched[ai], "development realized one corner twice");
            vert.matched[ai] = true;
            vert.matched_count += 1;
        }
        self.faces.push(BFace { base: face, verts: pos_verts, edges: pos_edges });
    }
}

/// Develop the ball of the universal cover of `base` around `v`.
///
/// Requires a Gromov pass: development below is the universal cover only
/// for locally CAT(0) bases.
pub fn develop(
    base: &Complex,
    v: &str,
    radius: u32,
    opts: &DevelopOptions,
) -> Result<DevelopedBall, DevelopError> {
    let basepoint = base.vertex_id(v).ok_or_else(|| DevelopError::UnknownVertex(v.to_owned()))?;
    if !check_gromov(base).pass {
        return Err(DevelopError::PreconditionFailed(format!(
            "`{}` is not locally CAT(0); its development is not the universal cover",
            base.name()
        )));
    }

    let links: Vec<LinkGraph> =
        (0..base.vertex_count() as VertexId).map(|w| build_link(base, w)).collect();
    let arc_lookup: Vec<HashMap<(FaceId, u32), usize>> = links
        .iter()
        .map(|g| g.arcs.iter().enumerate().map(|(i, a)| ((a.face, a.corner), i)).collect())
        .collect();
    let mut b = Builder {
        base,
        links,
        arc_lookup,
        verts: Vec::new(),
        edges: Vec::new(),
        faces: Vec::new(),
        worklist: BinaryHeap::new(),
    };
    b.new_vertex(basepoint, 0);

    while let Some(Reverse((d, u))) = b.worklist.pop() {
        if d > radius.saturating_sub(1) {
            break;
        }
        let vert = &b.verts[u as usize];
        if vert.dist != d || vert.matched_count == vert.matched.len() {
            continue;
        }
        let arc_count = b.links[vert.base as usize].arcs.len();
        for arc_idx in 0..arc_count {
            if !b.verts[u as usize].matched[arc_idx] {
                b.attach_face(u, arc_idx);
                if b.faces.len() > opts.max_faces {
                    return Err(DevelopError::ResourceLimit {
                        faces: b.faces.len(),
                        budget: opts.max_faces,
                    });
                }
            }
        }
    }

    Ok(finish(base, basepoint, radius, b))
}

/// Trim to the distance-`radius` ball and materialize the complex with
/// cells named by discovery order.
fn finish(base: &Complex, basepoint: VertexId, radius: u32, b: Builder<'_>) -> DevelopedBall {
    // Final distances are exact; recompute once as the source of truth.
    let mut dist = vec![u32::MAX; b.verts.len()];
    let mut queue = VecDeque::new();
    dist[0] = 0;
    queue.push_back(0u32);
    while let Some(x) = queue.pop_front() {
        for &e in b.verts[x as usize].ends.iter().filter(|&&e| e != u32::MAX) {
            let y = b.other_end(e, x);
            if dist[y as usize] == u32::MAX {
                dist[y as usize] = dist[x as usize] + 1;
                queue.push_back(y);
            }
        }
    }
    debug_assert!(b.verts.iter().enumerate().all(|(i, v)| v.dist == dist[i]));

    let mut vkeep: Vec<Option<u32>> = vec![None; b.verts.len()];
    let mut next = 0u32;
    for (i, &d) in dist.iter().enumerate() {
        if d <= radius {
            vkeep[i] = Some(next);
            next += 1;
        }
    }
    let kept_vert_ids: Vec<u32> =
        (0..b.verts.len() as u32).filter(|&i| vkeep[i as usize].is_some()).collect();
    let mut ekeep: Vec<Option<u32>> = vec![None; b.edges.len()];
    let mut kept_edges = Vec::new();
    for (i, e) in b.edges.iter().enumerate() {
        if vkeep[e.init as usize].is_some() && vkeep[e.term as usize].is_some() {
            ekeep[i] = Some(kept_edges.len() as u32);
            kept_edges.push(i as u32);
        }
    }
    let kept_faces: Vec<u32> = (0..b.faces.len() as u32)
        .filter(|&f| b.faces[f as usize].verts.iter().all(|&v| vkeep[v as usize].is_some()))
        .collect();

    let desc = Description {
        name: format!("{}_ball_r{radius}", base.name()),
        vertices: (0..kept_vert_ids.len()).map(|i| format!("v{i}")).collect(),
        edges: kept_edges
            .iter()
            .enumerate()
            .map(|(i, &e)| {
                let edge = &b.edges[e as usize];
                (
                    format!("e{i}"),
                    format!("v{}", vkeep[edge.init as usize].unwrap()),
                    format!("v{}", vkeep[edge.term as usize].unwrap()),
                )
            })
            .collect(),
        faces: kept_faces
            .iter()
            .map(|&f| {
                let face = &b.faces[f as usize];
                let base_face = base.face(face.base);
                let word = (0..face.edges.len())
                    .map(|p| {
                        let e = ekeep[face.edges[p] as usize].expect("face edges survive with the face");
                        (format!("e{e}"), base_face.boundary[p].forward)
                    })
                    .collect();
                (base_face.kind, word)
            })
            .collect(),
    };
    let ball = Arc::new(build_complex(&desc).expect("developed balls are valid complexes"));

    let vertex_map: Vec<VertexId> = kept_vert_ids.iter().map(|&i| b.verts[i as usize].base).collect();
    let edge_map: Vec<DirectedEdge> =
        kept_edges.iter().map(|&e| DirectedEdge::fwd(b.edges[e as usize].base)).collect();
    let projection = make_map(ball.clone(), Arc::new(base.clone()), vertex_map, edge_map)
        .expect("the projection of a developed ball is cellular");

    // Interior: complete links in the trimmed ball.
    let mut corner_count = vec![0usize; ball.vertex_count()];
    for f in ball.faces().iter() {
        for i in 0..f.boundary.len() {
            corner_count[ball.dir_term(f.boundary[i]) as usize] += 1;
        }
    }
    let interior: BTreeSet<VertexId> = (0..ball.vertex_count() as u32)
        .filter(|&u| {
            let bv = projection.vertex_map[u as usize];
            corner_count[u as usize] == b.links[bv as usize].arcs.len()
        })
        .collect();

    let dist: Vec<u32> = kept_vert_ids.iter().map(|&i| dist[i as usize]).collect();
    DevelopedBall {
        base: projection.target.clone(),
        basepoint,
        radius,
        ball,
        projection,
        basepoint_lift: 0,
        interior,
        dist,
    }
}

impl DevelopedBall {
    /// Check that the projection induces a link isomorphism (node- and
    /// arc-bijective) at every interior vertex.
    pub fn interior_links_isomorphic(&self) -> Result<(), String> {
        let report = crate::cellmaps::check_link_injective(&self.projection, Some(&self.interior));
        if !report.pass {
            return Err(format!("link map not injective: {:?}", report.failures.first()));
        }
        for &u in &self.interior {
            let ball_link = build_link(&self.ball, u);
            let base_link = build_link(&self.base, self.projection.vertex_map[u as usize]);
            if ball_link.nodes.len() != base_link.nodes.len()
                || ball_link.arcs.len() != base_link.arcs.len()
            {
                return Err(format!("link of v{u} has wrong size"));
            }
        }
        Ok(())
    }

    /// Check that the 1-skeleton induced on interior vertices and their
    /// neighbors is a simple graph: no loops, no parallel edges.
    pub fn interior_skeleton_is_simple(&self) -> Result<(), String> {
        let mut zone = self.interior.clone();
        for e in self.ball.edges() {
            if self.interior.contains(&e.init) {
                zone.insert(e.term);
            }
            if self.interior.contains(&e.term) {
                zone.insert(e.init);
            }
        }
        let mut seen = BTreeSet::new();
        for e in self.ball.edges() {
            if !(zone.contains(&e.init) && zone.contains(&e.term)) {
                continue;
            }
            if e.init == e.term {
                return Err(format!("loop edge `{}` in the interior zone", e.label));
            }
            let key = (e.init.min(e.term), e.init.max(e.term));
            if !seen.insert(key) {
                return Err(format!("parallel edges between v{} and v{}", key.0, key.1));
            }
        }
        Ok(())
    }

    /// Vertex, edge and face counts per distance shell (cells are counted
    /// at the minimum distance of their vertices).
    pub fn shell_counts(&self) -> Vec<(u32, usize, usize, usize)> {
        let mut out: Vec<(u32, usize, usize, usize)> = (0..=self.radius).map(|r| (r, 0, 0, 0)).collect();
        for &d in &self.dist {
            out[d as usize].1 += 1;
        }
        for e in self.ball.edges() {
            let d = self.dist[e.init as usize].min(self.dist[e.term as usize]);
            out[d as usize].2 += 1;
        }
        for f in self.ball.faces() {
            let d = (0..f.boundary.len())
                .map(|i| self.dist[self.ball.dir_term(f.boundary[i]) as usize])
                .min()
                .unwrap();
            out[d as usize].3 += 1;
        }
        out
    }
}

/// A lift of a patch map into a developed ball.
#[derive(Clone, Debug)]
pub struct LiftedMap {
    pub lift: CellularMap,
}

impl LiftedMap {
    /// `projection . lift = original`, edge by edge and vertex by vertex.
    pub fn commutes_with(&self, original: &CellularMap, ball: &DevelopedBall) -> bool {
        (0..original.source.edge_count()).all(|e| {
            let lifted = self.lift.edge_map[e];
            ball.projection.image_of_dir(lifted) == original.edge_map[e]
        }) && (0..original.source.vertex_count()).all(|v| {
            ball.projection.vertex_map[self.lift.vertex_map[v] as usize] == original.vertex_map[v]
        })
    }
}

/// Lift a map `m: patch -> base` into the universal cover of its target,
/// developing exactly the cover region the lift touches.
///
/// Full balls of these covers grow by an order of magnitude per shell, so
/// materializing a ball large enough for a sizable patch is hopeless;
/// instead the link of every ball vertex the transported lift lands on is
/// completed on demand. Development is forced cell by cell, so the region
/// grown here coincides with the corresponding subcomplex of any
/// sufficiently large ball and the lift (in particular its injectivity)
/// agrees with a lift into such a ball.
pub fn lift_into_cover(
    m: &CellularMap,
    anchor_src: VertexId,
    opts: &DevelopOptions,
) -> Result<(DevelopedBall, LiftedMap), DevelopError> {
    let base = m.target.as_ref();
    if !check_gromov(base).pass {
        return Err(DevelopError::PreconditionFailed(format!(
            "`{}` is not locally CAT(0); its development is not the universal cover",
            base.name()
        )));
    }
    let basepoint = m.vertex_map[anchor_src as usize];
    let links: Vec<LinkGraph> =
        (0..base.vertex_count() as VertexId).map(|w| build_link(base, w)).collect();
    let arc_lookup: Vec<HashMap<(FaceId, u32), usize>> = links
        .iter()
        .map(|g| g.arcs.iter().enumerate().map(|(i, a)| ((a.face, a.corner), i)).collect())
        .collect();
    let mut b = Builder {
        base,
        links,
        arc_lookup,
        verts: Vec::new(),
        edges: Vec::new(),
        faces: Vec::new(),
        worklist: BinaryHeap::new(),
    };
    b.new_vertex(basepoint, 0);

    let mut complete = |b: &mut Builder, u: u32| -> Result<(), DevelopError> {
        let arc_count = b.links[b.verts[u as usize].base as usize].arcs.len();
        for arc_idx in 0..arc_count {
            if !b.verts[u as usize].matched[arc_idx] {
                b.attach_face(u, arc_idx);
                if b.faces.len() > opts.max_faces {
                    return Err(DevelopError::ResourceLimit {
                        faces: b.faces.len(),
                        budget: opts.max_faces,
                    });
                }
            }
        }
        Ok(())
    };

    // Transport the lift across the patch, completing links on demand.
    let src = &m.source;
    let mut lift_v: Vec<Option<u32>> = vec![None; src.vertex_count()];
    lift_v[anchor_src as usize] = Some(0);
    let mut queue = VecDeque::from([anchor_src]);
    let mut out: Vec<Vec<DirectedEdge>> = vec![Vec::new(); src.vertex_count()];
    for ei in 0..src.edge_count() {
        for d in [DirectedEdge::fwd(ei as EdgeId), DirectedEdge::rev(ei as EdgeId)] {
            out[src.dir_init(d) as usize].push(d);
        }
    }
    while let Some(a) = queue.pop_front() {
        let la = lift_v[a as usize].unwrap();
        for &d in &out[a as usize] {
            let img = m.image_of_dir(d);
            let mut found = b.end_at(la, start_node(img));
            if found.is_none() {
                complete(&mut b, la)?;
                found = b.end_at(la, start_node(img));
            }
            let Some(be) = found else {
                return Err(DevelopError::LiftInconsistent(format!(
                    "edge `{}` has no developable end at `{}`",
                    base.edge(img.edge).label,
                    base.vertex_name(b.verts[la as usize].base)
                )));
            };
            let far = b.other_end(be, la);
            match lift_v[src.dir_term(d) as usize] {
                None => {
                    lift_v[src.dir_term(d) as usize] = Some(far);
                    queue.push_back(src.dir_term(d));
                }
                Some(prev) => {
                    if prev != far {
                        return Err(DevelopError::LiftInconsistent(format!(
                            "patch vertex `{}` receives two lifts",
                            src.vertex_name(src.dir_term(d))
                        )));
                    }
                }
            }
        }
    }
    // Complete every lifted vertex so all lifted faces exist.
    for i in 0..lift_v.len() {
        if let Some(la) = lift_v[i] {
            complete(&mut b, la)?;
        }
    }

    let radius = b.verts.iter().map(|v| v.dist).max().unwrap_or(0) + 1;
    let ball = finish(base, basepoint, radius, b);
    let lifted = lift(m, &ball, anchor_src, ball.basepoint_lift)?;
    Ok((ball, lifted))
}

/// Lift a map `m: patch -> base` into a developed ball of the base by
/// breadth-first transport from an anchor. The patch must be connected
/// and simply connected (all generated patches are discs); the lift is
/// then unique.
pub fn lift(
    m: &CellularMap,
    ball: &DevelopedBall,
    anchor_src: VertexId,
    anchor_ball: VertexId,
) -> Result<LiftedMap, DevelopError> {
    if m.target.name() != ball.base.name() {
        return Err(DevelopError::AnchorMismatch("map target differs from the ball base".into()));
    }
    if ball.projection.vertex_map[anchor_ball as usize] != m.vertex_map[anchor_src as usize] {
        return Err(DevelopError::AnchorMismatch(format!(
            "projection of the anchor lift is `{}` but the map sends the anchor to `{}`",
            ball.base.vertex_name(ball.projection.vertex_map[anchor_ball as usize]),
            ball.base.vertex_name(m.vertex_map[anchor_src as usize]),
        )));
    }

    // Edge-end lookup on the ball.
    let mut ends: HashMap<(u32, crate::links::LinkNode), u32> = HashMap::new();
    for (ei, e) in ball.ball.edges().iter().enumerate() {
        let base_edge = ball.projection.edge_map[ei].edge;
        let old = ends.insert(
            (e.init, crate::links::LinkNode { edge: base_edge, end: crate::links::EndKind::Initial }),
            ei as u32,
        );
        debug_assert!(old.is_none());
        let old = ends.insert(
            (e.term, crate::links::LinkNode { edge: base_edge, end: crate::links::EndKind::Terminal }),
            ei as u32,
        );
        debug_assert!(old.is_none());
    }

    let src = &m.source;
    let mut lift_v: Vec<Option<u32>> = vec![None; src.vertex_count()];
    let mut lift_e: Vec<Option<DirectedEdge>> = vec![None; src.edge_count()];
    lift_v[anchor_src as usize] = Some(anchor_ball);
    let mut queue = VecDeque::new();
    queue.push_back(anchor_src);
    // Outgoing directed edges per source vertex.
    let mut out: Vec<Vec<DirectedEdge>> = vec![Vec::new(); src.vertex_count()];
    for ei in 0..src.edge_count() {
        for d in [DirectedEdge::fwd(ei as EdgeId), DirectedEdge::rev(ei as EdgeId)] {
            out[src.dir_init(d) as usize].push(d);
        }
    }
    while let Some(a) = queue.pop_front() {
        let la = lift_v[a as usize].unwrap();
        for &d in &out[a as usize] {
            let img = m.image_of_dir(d);
            let Some(&be) = ends.get(&(la, start_node(img))) else {
                return Err(DevelopError::BallTooSmall(format!(
                    "no lift of `{}` at ball vertex v{la} (patch vertex `{}`)",
                    m.target.edge(img.edge).label,
                    src.vertex_name(a)
                )));
            };
            let ball_dir = DirectedEdge { edge: be, forward: img.forward };
            let target_v = ball.ball.dir_term(ball_dir);
            match lift_v[src.dir_term(d) as usize] {
                None => {
                    lift_v[src.dir_term(d) as usize] = Some(target_v);
                    queue.push_back(src.dir_term(d));
                }
                Some(prev) => {
                    if prev != target_v {
                        return Err(DevelopError::LiftInconsistent(format!(
                            "patch vertex `{}` receives two lifts",
                            src.vertex_name(src.dir_term(d))
                        )));
                    }
                }
            }
            let entry = if d.forward { ball_dir } else { ball_dir.reversed() };
            match lift_e[d.edge as usize] {
                None => lift_e[d.edge as usize] = Some(entry),
                Some(prev) => {
                    if prev != entry {
                        return Err(DevelopError::LiftInconsistent(format!(
                            "patch edge `{}` receives two lifts",
                            src.edge(d.edge).label
                        )));
                    }
                }
            }
        }
    }

    let lift_v: Vec<VertexId> = lift_v
        .into_iter()
        .enumerate()
        .map(|(i, v)| {
            v.ok_or_else(|| {
                DevelopError::LiftInconsistent(format!(
                    "patch vertex `{}` unreached",
                    src.vertex_name(i as u32)
                ))
            })
        })
        .collect::<Result<_, _>>()?;
    let lift_e: Vec<DirectedEdge> = lift_e
        .into_iter()
        .enumerate()
        .map(|(i, e)| {
            e.ok_or_else(|| {
                DevelopError::LiftInconsistent(format!(
                    "patch edge `{}` unreached",
                    src.edge(i as u32).label
                ))
            })
        })
        .collect::<Result<_, _>>()?;

    let lift_map = make_map(src.clone(), ball.ball.clone(), lift_v, lift_e).map_err(|e| match e {
        MapError::NoMatchingTargetFace { face } => {
            DevelopError::BallTooSmall(format!("face {face} of the patch is not developed in the ball"))
        }
        other => DevelopError::LiftInconsistent(other.to_string()),
    })?;
    let lifted = LiftedMap { lift: lift_map };
    if !lifted.commutes_with(m, ball) {
        return Err(DevelopError::LiftInconsistent("projection . lift differs from the map".into()));
    }
    Ok(lifted)
}
