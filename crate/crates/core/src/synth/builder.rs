//! Incremental model construction. The builder deduplicates vertices and
//! edges by quantized geometry, builds closed loops from path segments, and
//! orients every loop automatically so that outer loops run counterclockwise
//! around the outward material normal and inner loops clockwise.

use crate::brep::{
    BrepError, Coedge, Curve, Edge, EdgeId, Face, FaceId, Loop, LoopKind, Model, Surface, Vertex,
    VertexId,
};
use crate::geom::polygon::face_polygons;
use crate::geom::{geometric_normal, point_at};
use crate::math::Vec3;
use std::collections::HashMap;

/// Coordinates closer than this snap to one vertex / edge key.
const QUANT: f64 = 1e-9;

fn q(x: f64) -> i64 {
    (x / QUANT).round() as i64
}

fn qv(p: Vec3) -> [i64; 3] {
    [q(p.x), q(p.y), q(p.z)]
}

/// True when the vector's first nonzero quantized component is positive —
/// the canonical sign choice for arc axes.
fn axis_is_canonical(axis: Vec3) -> bool {
    for c in [q(axis.x), q(axis.y), q(axis.z)] {
        if c > 0 {
            return true;
        }
        if c < 0 {
            return false;
        }
    }
    true
}

#[derive(PartialEq, Eq, Hash)]
enum EdgeKey {
    Line {
        a: VertexId,
        b: VertexId,
    },
    /// Arc in canonical form: axis sign canonicalized, endpoints swapped
    /// along with an axis flip so the point set is preserved.
    Arc {
        start: VertexId,
        end: VertexId,
        center: [i64; 3],
        axis: [i64; 3],
        radius: i64,
    },
}

/// One step of a loop path.
#[derive(Clone, Copy, Debug)]
pub enum PathSeg {
    Line { to: Vec3 },
    Arc { to: Vec3, center: Vec3, axis: Vec3 },
}

impl PathSeg {
    pub fn line(to: Vec3) -> PathSeg {
        PathSeg::Line { to }
    }

    pub fn arc(to: Vec3, center: Vec3, axis: Vec3) -> PathSeg {
        PathSeg::Arc { to, center, axis }
    }
}

pub struct ModelBuilder {
    model: Model,
    vertices: HashMap<[i64; 3], VertexId>,
    /// Canonical edge key -> (edge id, whether storage is flipped relative
    /// to the canonical traversal).
    edges: HashMap<EdgeKey, (EdgeId, bool)>,
    next_vertex: u32,
    next_edge: u32,
    next_face: u32,
}

impl ModelBuilder {
    pub fn new() -> ModelBuilder {
        ModelBuilder {
            model: Model {
                units: "mm".to_string(),
                vertices: Vec::new(),
                edges: Vec::new(),
                faces: Vec::new(),
            },
            vertices: HashMap::new(),
            edges: HashMap::new(),
            next_vertex: 1,
            next_edge: 1,
            next_face: 1,
        }
    }

    /// Wrap an existing model for further edits, reindexing its vertices
    /// and edges so new geometry deduplicates against it.
    pub fn from_model(model: Model) -> ModelBuilder {
        let mut vertices = HashMap::new();
        for v in &model.vertices {
            vertices.insert(qv(v.point), v.id);
        }
        let mut edges = HashMap::new();
        for e in &model.edges {
            let (key, flipped) = match e.curve {
                Curve::Line => (line_key(e.start, e.end), false),
                Curve::Arc { center, axis, radius } => {
                    if axis_is_canonical(axis) {
                        (arc_key(e.start, e.end, center, axis, radius), false)
                    } else {
                        (arc_key(e.end, e.start, center, -axis, radius), true)
                    }
                }
            };
            edges.insert(key, (e.id, flipped));
        }
        let next_vertex = model.vertices.iter().map(|v| v.id.0).max().unwrap_or(0) + 1;
        let next_edge = model.edges.iter().map(|e| e.id.0).max().unwrap_or(0) + 1;
        let next_face = model.faces.iter().map(|f| f.id.0).max().unwrap_or(0) + 1;
        ModelBuilder { model, vertices, edges, next_vertex, next_edge, next_face }
    }

    pub fn model(&self) -> &Model {
        &self.model
    }

    pub fn vertex(&mut self, p: Vec3) -> VertexId {
        if let Some(&id) = self.vertices.get(&qv(p)) {
            return id;
        }
        let id = VertexId(self.next_vertex);
        self.next_vertex += 1;
        self.vertices.insert(qv(p), id);
        self.model.vertices.push(Vertex { id, point: p });
        id
    }

    /// Straight coedge from `a` to `b`, reusing an existing edge when the
    /// same segment was built before.
    pub fn line(&mut self, a: Vec3, b: Vec3) -> Coedge {
        assert!(qv(a) != qv(b), "degenerate line segment at {a:?}");
        let va = self.vertex(a);
        let vb = self.vertex(b);
        let key = line_key(va, vb);
        if let Some(&(id, _)) = self.edges.get(&key) {
            let stored = self.model.edges.iter().find(|e| e.id == id).unwrap();
            return Coedge { edge: id, reversed: stored.start != va };
        }
        let id = EdgeId(self.next_edge);
        self.next_edge += 1;
        self.edges.insert(key, (id, false));
        self.model.edges.push(Edge { id, curve: Curve::Line, start: va, end: vb });
        Coedge { edge: id, reversed: false }
    }

    /// Arc coedge from `a` to `b` sweeping counterclockwise around `axis`
    /// about `center`. Equal endpoints make a full circle. The stored edge
    /// uses the canonical axis sign; the returned coedge compensates.
    pub fn arc(&mut self, a: Vec3, b: Vec3, center: Vec3, axis: Vec3) -> Coedge {
        let axis = axis.normalized().expect("arc axis must be nonzero");
        let radius = (a - center).norm();
        debug_assert!(
            ((b - center).norm() - radius).abs() < 1e-6,
            "arc endpoints must be equidistant from the center"
        );
        let va = self.vertex(a);
        let vb = self.vertex(b);
        let flipped_request = !axis_is_canonical(axis);
        let (ks, ke, caxis) = if flipped_request { (vb, va, -axis) } else { (va, vb, axis) };
        let key = arc_key(ks, ke, center, caxis, radius);
        if let Some(&(id, storage_flipped)) = self.edges.get(&key) {
            return Coedge { edge: id, reversed: flipped_request != storage_flipped };
        }
        let id = EdgeId(self.next_edge);
        self.next_edge += 1;
        self.edges.insert(key, (id, false));
        self.model.edges.push(Edge {
            id,
            curve: Curve::Arc { center, axis: caxis, radius },
            start: ks,
            end: ke,
        });
        Coedge { edge: id, reversed: flipped_request }
    }

    /// Full circle through `start` around `axis`.
    pub fn full_circle(&mut self, start: Vec3, center: Vec3, axis: Vec3) -> Coedge {
        self.arc(start, start, center, axis)
    }

    /// Closed chain of coedges from `start` through each segment back to
    /// `start`.
    pub fn path_loop(&mut self, start: Vec3, segs: &[PathSeg]) -> Vec<Coedge> {
        let mut out = Vec::with_capacity(segs.len());
        let mut cur = start;
        for seg in segs {
            match *seg {
                PathSeg::Line { to } => {
                    out.push(self.line(cur, to));
                    cur = to;
                }
                PathSeg::Arc { to, center, axis } => {
                    out.push(self.arc(cur, to, center, axis));
                    cur = to;
                }
            }
        }
        assert!(qv(cur) == qv(start), "path loop does not close");
        out
    }

    /// Rectangle loop through four corner points.
    pub fn rect_loop(&mut self, corners: [Vec3; 4]) -> Vec<Coedge> {
        self.path_loop(
            corners[0],
            &[
                PathSeg::line(corners[1]),
                PathSeg::line(corners[2]),
                PathSeg::line(corners[3]),
                PathSeg::line(corners[0]),
            ],
        )
    }

    /// Boundary of a full revolution band (a cylinder or cone belt): bottom
    /// circle, seam up, top circle backwards, seam down. The two seam uses
    /// share one edge with opposite orientation.
    pub fn band_loop(
        &mut self,
        bot_start: Vec3,
        top_start: Vec3,
        bot_center: Vec3,
        top_center: Vec3,
        axis: Vec3,
    ) -> Vec<Coedge> {
        let c_bot = self.full_circle(bot_start, bot_center, axis);
        let seam_up = self.line(bot_start, top_start);
        let c_top = self.full_circle(top_start, top_center, -axis);
        let seam_down = self.line(top_start, bot_start);
        vec![c_bot, seam_up, c_top, seam_down]
    }

    fn assert_closed(&self, coedges: &[Coedge]) {
        assert!(!coedges.is_empty(), "loop needs at least one coedge");
        for (i, ce) in coedges.iter().enumerate() {
            let (_, end) = self.model.coedge_endpoints(*ce).expect("edge exists");
            let next = coedges[(i + 1) % coedges.len()];
            let (next_start, _) = self.model.coedge_endpoints(next).expect("edge exists");
            assert!(
                end == next_start,
                "loop breaks between coedge {i} and its successor"
            );
        }
    }

    /// Add a face. Loops may be given in either winding; each is flipped if
    /// needed to meet the orientation convention.
    pub fn face(
        &mut self,
        surface: Surface,
        sense: bool,
        loops: Vec<(LoopKind, Vec<Coedge>)>,
    ) -> FaceId {
        let id = FaceId(self.next_face);
        self.next_face += 1;
        let mut out = Vec::with_capacity(loops.len());
        for (kind, mut coedges) in loops {
            self.assert_closed(&coedges);
            orient_loop(&self.model, &surface, sense, kind, &mut coedges);
            out.push(Loop { kind, coedges });
        }
        self.model.faces.push(Face { id, surface, sense, loops: out, shell: 0 });
        id
    }

    /// Add a loop to an existing face (typically an inner loop cut by a new
    /// feature), with the same automatic orientation as `face`.
    pub fn add_loop(&mut self, face: FaceId, kind: LoopKind, mut coedges: Vec<Coedge>) {
        self.assert_closed(&coedges);
        let f = self
            .model
            .faces
            .iter()
            .find(|f| f.id == face)
            .unwrap_or_else(|| panic!("no {face} to extend"));
        let (surface, sense) = (f.surface, f.sense);
        orient_loop(&self.model, &surface, sense, kind, &mut coedges);
        let f = self.model.faces.iter_mut().find(|f| f.id == face).unwrap();
        f.loops.push(Loop { kind, coedges });
    }

    /// Validate and return the finished model.
    pub fn finish(self) -> Result<Model, BrepError> {
        self.model.ensure_valid()?;
        Ok(self.model)
    }
}

impl Default for ModelBuilder {
    fn default() -> Self {
        ModelBuilder::new()
    }
}

fn line_key(a: VertexId, b: VertexId) -> EdgeKey {
    EdgeKey::Line { a: a.min(b), b: a.max(b) }
}

fn arc_key(start: VertexId, end: VertexId, center: Vec3, axis: Vec3, radius: f64) -> EdgeKey {
    EdgeKey::Arc { start, end, center: qv(center), axis: qv(axis), radius: q(radius) }
}

/// Whether a loop's winding in parameter space matches the orientation
/// convention for its kind on this sensed surface.
fn loop_is_well_oriented(
    model: &Model,
    surface: &Surface,
    sense: bool,
    kind: LoopKind,
    coedges: &[Coedge],
) -> bool {
    let probe = Face {
        id: FaceId(u32::MAX),
        surface: *surface,
        sense,
        loops: vec![Loop { kind, coedges: coedges.to_vec() }],
        shell: 0,
    };
    let fp = face_polygons(model, &probe);
    let poly = &fp.loops[0];
    let area = poly.signed_area();
    let (lo, hi) = poly.bounds();
    let uc = [(lo[0] + hi[0]) * 0.5, (lo[1] + hi[1]) * 0.5];

    // Sign of the parameterization: does +u cross +v point along the sensed
    // normal? Finite differences around the polygon's parameter center.
    let h = 1e-4;
    let tu = (point_at(surface, [uc[0] + h, uc[1]]) - point_at(surface, [uc[0] - h, uc[1]]))
        * (0.5 / h);
    let tv = (point_at(surface, [uc[0], uc[1] + h]) - point_at(surface, [uc[0], uc[1] - h]))
        * (0.5 / h);
    let p = point_at(surface, uc);
    let mut n = geometric_normal(surface, p);
    if !sense {
        n = -n;
    }
    let orient_sign = if tu.cross(tv).dot(n) > 0.0 { 1.0 } else { -1.0 };
    let desired = match kind {
        LoopKind::Outer => orient_sign,
        LoopKind::Inner => -orient_sign,
    };
    area * desired > 0.0
}

/// Flip the loop (reverse the coedge sequence and each traversal flag) if
/// its winding does not match the convention.
pub(crate) fn orient_loop(
    model: &Model,
    surface: &Surface,
    sense: bool,
    kind: LoopKind,
    coedges: &mut Vec<Coedge>,
) {
    if !loop_is_well_oriented(model, surface, sense, kind, coedges) {
        coedges.reverse();
        for ce in coedges.iter_mut() {
            ce.reversed = !ce.reversed;
        }
    }
}
