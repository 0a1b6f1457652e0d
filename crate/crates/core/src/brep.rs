//! Boundary-representation solid model: topology, validation, and JSON I/O.
//!
//! A [`Model`] is a vertex/edge/face soup with explicit loop topology.
//! Curves are lines or circular arcs; surfaces are planes, cylinders, cones,
//! spheres, and tori. Arcs sweep counterclockwise around their axis from the
//! start vertex to the end vertex; a full circle uses the same vertex for
//! both ends. A face's `sense` flag is `true` when the geometric surface
//! normal (plane normal; away from the axis for cylinders and cones; away
//! from the center for spheres; away from the tube circle for tori) is the
//! outward material normal.

use crate::math::Vec3;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::path::Path;
use thiserror::Error;

/// Relative tolerance (times the model bounding-box diagonal) within which
/// edge endpoints must lie on the surfaces of the faces that use them.
pub const ENDPOINT_ON_SURFACE_REL_TOL: f64 = 1e-7;

macro_rules! id_newtype {
    ($name:ident, $label:literal) => {
        #[derive(
            Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
        )]
        #[serde(transparent)]
        pub struct $name(pub u32);

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, concat!($label, " {}"), self.0)
            }
        }
    };
}

id_newtype!(VertexId, "vertex");
id_newtype!(EdgeId, "edge");
id_newtype!(FaceId, "face");

/// Underlying curve of an edge.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Curve {
    Line,
    /// Circular arc sweeping counterclockwise around `axis` (a unit vector)
    /// from the edge's start vertex to its end vertex, centered at `center`.
    Arc { center: Vec3, axis: Vec3, radius: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Vertex {
    pub id: VertexId,
    pub point: Vec3,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub id: EdgeId,
    pub curve: Curve,
    pub start: VertexId,
    pub end: VertexId,
}

/// One directed use of an edge by a loop. `reversed` means the loop walks
/// the edge from its end vertex to its start vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Coedge {
    pub edge: EdgeId,
    pub reversed: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LoopKind {
    Outer,
    Inner,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Loop {
    pub kind: LoopKind,
    pub coedges: Vec<Coedge>,
}

/// Analytic surface geometry. All direction fields are unit vectors.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Surface {
    Plane {
        origin: Vec3,
        normal: Vec3,
    },
    Cylinder {
        axis_origin: Vec3,
        axis_dir: Vec3,
        radius: f64,
    },
    /// Cone with apex `apex`, opening along `axis_dir`; the radius at height
    /// `h` above the apex is `h * tan(half_angle)` with `0 < half_angle < pi/2`.
    Cone {
        apex: Vec3,
        axis_dir: Vec3,
        half_angle: f64,
    },
    Sphere {
        center: Vec3,
        radius: f64,
    },
    Torus {
        center: Vec3,
        axis_dir: Vec3,
        major_radius: f64,
        minor_radius: f64,
    },
}

/// Coarse surface class used by descriptors and templates. `Any` is a
/// template-side wildcard; extracted descriptors never contain it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum FaceType {
    #[serde(rename = "PLAN")]
    Plan,
    #[serde(rename = "CYLI")]
    Cyli,
    #[serde(rename = "CONI")]
    Coni,
    #[serde(rename = "SPHE")]
    Sphe,
    #[serde(rename = "TORO")]
    Toro,
    #[serde(rename = "ANY")]
    Any,
}

impl fmt::Display for FaceType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            FaceType::Plan => "PLAN",
            FaceType::Cyli => "CYLI",
            FaceType::Coni => "CONI",
            FaceType::Sphe => "SPHE",
            FaceType::Toro => "TORO",
            FaceType::Any => "ANY",
        };
        f.write_str(s)
    }
}

/// Whether the material at a shared edge forms an outward (convex) or
/// inward (concave) dihedral.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Convexity {
    #[serde(rename = "CONVEX")]
    Convex,
    #[serde(rename = "CONCAVE")]
    Concave,
}

impl fmt::Display for Convexity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Convexity::Convex => "CONVEX",
            Convexity::Concave => "CONCAVE",
        })
    }
}

impl Surface {
    pub fn face_type(&self) -> FaceType {
        match self {
            Surface::Plane { .. } => FaceType::Plan,
            Surface::Cylinder { .. } => FaceType::Cyli,
            Surface::Cone { .. } => FaceType::Coni,
            Surface::Sphere { .. } => FaceType::Sphe,
            Surface::Torus { .. } => FaceType::Toro,
        }
    }

    /// Axis line for rotational surfaces: a point on the axis plus the unit
    /// direction. Spheres have no axis and return `None`.
    pub fn axis_line(&self) -> Option<(Vec3, Vec3)> {
        match *self {
            Surface::Cylinder { axis_origin, axis_dir, .. } => Some((axis_origin, axis_dir)),
            Surface::Cone { apex, axis_dir, .. } => Some((apex, axis_dir)),
            Surface::Torus { center, axis_dir, .. } => Some((center, axis_dir)),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Face {
    pub id: FaceId,
    pub surface: Surface,
    /// `true` when the geometric surface normal is the outward material normal.
    pub sense: bool,
    pub loops: Vec<Loop>,
    /// Shell tag; faces with equal tags form one closed shell. Recognition
    /// queries (adjacency, interference) stay within a shell.
    #[serde(default, skip_serializing_if = "is_zero")]
    pub shell: u32,
}

fn is_zero(v: &u32) -> bool {
    *v == 0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Model {
    pub units: String,
    pub vertices: Vec<Vertex>,
    pub edges: Vec<Edge>,
    pub faces: Vec<Face>,
}

/// One problem found by [`Model::validate_topology`]. The message names the
/// offending entity id.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic(pub String);

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Error)]
pub enum BrepError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("model schema error: {0}")]
    Schema(String),
    #[error("invalid topology:\n{}", format_diagnostics(.0))]
    Topology(Vec<Diagnostic>),
    #[error("unknown {0}")]
    UnknownFace(FaceId),
}

fn format_diagnostics(ds: &[Diagnostic]) -> String {
    ds.iter()
        .map(|d| format!("  - {}", d.0))
        .collect::<Vec<_>>()
        .join("\n")
}

/// One neighbor of a face across a shared edge. `coedge` is the queried
/// face's own directed use of the edge. A seam edge used twice by one face
/// reports the face itself as the mate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Adjacency {
    pub mate: FaceId,
    pub edge: EdgeId,
    pub coedge: Coedge,
}

/// Index from edges to their uses, built once per model and shared by the
/// topology queries.
pub struct TopologyIndex {
    /// edge id -> list of (face id, loop index, coedge).
    uses: HashMap<EdgeId, Vec<(FaceId, usize, Coedge)>>,
}

impl TopologyIndex {
    pub fn build(model: &Model) -> TopologyIndex {
        let mut uses: HashMap<EdgeId, Vec<(FaceId, usize, Coedge)>> = HashMap::new();
        for face in &model.faces {
            for (li, lp) in face.loops.iter().enumerate() {
                for ce in &lp.coedges {
                    uses.entry(ce.edge).or_default().push((face.id, li, *ce));
                }
            }
        }
        TopologyIndex { uses }
    }

    pub fn edge_uses(&self, edge: EdgeId) -> &[(FaceId, usize, Coedge)] {
        self.uses.get(&edge).map(Vec::as_slice).unwrap_or(&[])
    }
}

impl Model {
    pub fn face(&self, id: FaceId) -> Result<&Face, BrepError> {
        self.faces
            .iter()
            .find(|f| f.id == id)
            .ok_or(BrepError::UnknownFace(id))
    }

    pub fn vertex_point(&self, id: VertexId) -> Option<Vec3> {
        self.vertices.iter().find(|v| v.id == id).map(|v| v.point)
    }

    pub fn edge(&self, id: EdgeId) -> Option<&Edge> {
        self.edges.iter().find(|e| e.id == id)
    }

    /// Endpoints of a coedge in traversal order.
    pub fn coedge_endpoints(&self, ce: Coedge) -> Option<(Vec3, Vec3)> {
        let e = self.edge(ce.edge)?;
        let s = self.vertex_point(e.start)?;
        let t = self.vertex_point(e.end)?;
        Some(if ce.reversed { (t, s) } else { (s, t) })
    }

    /// Axis-aligned bounding box over all vertices and arc sample points.
    pub fn bounding_box(&self) -> Option<(Vec3, Vec3)> {
        let mut lo: Option<Vec3> = None;
        let mut hi: Option<Vec3> = None;
        let mut take = |p: Vec3| {
            lo = Some(lo.map_or(p, |v| v.min_with(p)));
            hi = Some(hi.map_or(p, |v| v.max_with(p)));
        };
        for v in &self.vertices {
            take(v.point);
        }
        for e in &self.edges {
            if let Curve::Arc { center, axis, .. } = e.curve {
                if let (Some(s), Some(t)) =
                    (self.vertex_point(e.start), self.vertex_point(e.end))
                {
                    let sweep = arc_sweep(s, t, center, axis);
                    for k in 1..8 {
                        take(arc_point_at(s, center, axis, sweep * k as f64 / 8.0));
                    }
                }
            }
        }
        match (lo, hi) {
            (Some(a), Some(b)) => Some((a, b)),
            _ => None,
        }
    }

    /// Bounding-box diagonal; the length scale for relative tolerances.
    pub fn bbox_diagonal(&self) -> f64 {
        self.bounding_box()
            .map(|(lo, hi)| (hi - lo).norm())
            .unwrap_or(1.0)
    }

    /// Faces adjacent to `face` across edges of its loops of kind `which`.
    ///
    /// Returns one entry per coedge-to-mate pairing, preserving duplicates
    /// when two faces share several edges; seam edges used twice by the same
    /// face report the face itself. Order follows the face's loop order.
    pub fn adjacent_faces(
        &self,
        face: FaceId,
        which: LoopKind,
        index: &TopologyIndex,
    ) -> Result<Vec<Adjacency>, BrepError> {
        let f = self.face(face)?;
        let mut out = Vec::new();
        for (li, lp) in f.loops.iter().enumerate() {
            if lp.kind != which {
                continue;
            }
            for ce in &lp.coedges {
                for &(mate, mate_li, mate_ce) in index.edge_uses(ce.edge) {
                    if mate == face && mate_li == li && mate_ce == *ce {
                        continue; // this very use
                    }
                    out.push(Adjacency { mate, edge: ce.edge, coedge: *ce });
                }
            }
        }
        Ok(out)
    }

    /// [`Model::validate_topology`] as a `Result`: an error carrying the
    /// full diagnostic list when the model is malformed.
    pub fn ensure_valid(&self) -> Result<(), BrepError> {
        let diags = self.validate_topology();
        if diags.is_empty() {
            Ok(())
        } else {
            Err(BrepError::Topology(diags))
        }
    }

    /// Structural validation. Returns an empty list for a well-formed model.
    ///
    /// Checks: id uniqueness; reference resolution; positive radii and valid
    /// cone/torus parameters; unit axis directions; every edge used by
    /// exactly two coedges of opposite orientation; loops forming closed
    /// vertex chains; exactly one outer loop per face; and every edge
    /// endpoint lying on the surfaces of the faces whose loops use it
    /// (within [`ENDPOINT_ON_SURFACE_REL_TOL`] of the bounding-box diagonal).
    pub fn validate_topology(&self) -> Vec<Diagnostic> {
        let mut out = Vec::new();
        let mut push = |msg: String| out.push(Diagnostic(msg));

        let mut vmap = BTreeMap::new();
        for v in &self.vertices {
            if vmap.insert(v.id, v.point).is_some() {
                push(format!("duplicate {}", v.id));
            }
        }
        let mut emap = BTreeMap::new();
        for e in &self.edges {
            if emap.insert(e.id, e).is_some() {
                push(format!("duplicate {}", e.id));
            }
            for vid in [e.start, e.end] {
                if !vmap.contains_key(&vid) {
                    push(format!("{} references missing {}", e.id, vid));
                }
            }
            if let Curve::Arc { axis, radius, center } = e.curve {
                if radius <= 0.0 {
                    push(format!("{} has non-positive arc radius {radius}", e.id));
                }
                if (axis.norm() - 1.0).abs() > 1e-9 {
                    push(format!("{} arc axis is not unit length", e.id));
                }
                for vid in [e.start, e.end] {
                    if let Some(p) = vmap.get(&vid) {
                        let r = *p - center;
                        if (r.norm() - radius).abs() > radius.max(1.0) * 1e-6 {
                            push(format!("{} endpoint {} is off the arc circle", e.id, vid));
                        }
                        if r.dot(axis).abs() > radius.max(1.0) * 1e-6 {
                            push(format!(
                                "{} endpoint {} is out of the arc plane",
                                e.id, vid
                            ));
                        }
                    }
                }
            }
        }

        let mut fids = BTreeMap::new();
        for f in &self.faces {
            if fids.insert(f.id, ()).is_some() {
                push(format!("duplicate {}", f.id));
            }
            match f.surface {
                Surface::Plane { normal, .. } => {
                    if (normal.norm() - 1.0).abs() > 1e-9 {
                        push(format!("{} plane normal is not unit length", f.id));
                    }
                }
                Surface::Cylinder { axis_dir, radius, .. } => {
                    if radius <= 0.0 {
                        push(format!("{} has non-positive cylinder radius", f.id));
                    }
                    if (axis_dir.norm() - 1.0).abs() > 1e-9 {
                        push(format!("{} cylinder axis is not unit length", f.id));
                    }
                }
                Surface::Cone { axis_dir, half_angle, .. } => {
                    if !(half_angle > 0.0 && half_angle < std::f64::consts::FRAC_PI_2) {
                        push(format!(
                            "{} cone half-angle {half_angle} is outside (0, pi/2)",
                            f.id
                        ));
                    }
                    if (axis_dir.norm() - 1.0).abs() > 1e-9 {
                        push(format!("{} cone axis is not unit length", f.id));
                    }
                }
                Surface::Sphere { radius, .. } => {
                    if radius <= 0.0 {
                        push(format!("{} has non-positive sphere radius", f.id));
                    }
                }
                Surface::Torus { axis_dir, major_radius, minor_radius, .. } => {
                    if minor_radius <= 0.0 || major_radius <= minor_radius {
                        push(format!(
                            "{} torus radii must satisfy 0 < minor < major",
                            f.id
                        ));
                    }
                    if (axis_dir.norm() - 1.0).abs() > 1e-9 {
                        push(format!("{} torus axis is not unit length", f.id));
                    }
                }
            }

            let outer = f.loops.iter().filter(|l| l.kind == LoopKind::Outer).count();
            if outer != 1 {
                push(format!("{} has {outer} outer loops; expected exactly 1", f.id));
            }
            for (li, lp) in f.loops.iter().enumerate() {
                if lp.coedges.is_empty() {
                    push(format!("{} loop {li} is empty", f.id));
                    continue;
                }
                // Closed chain: each coedge ends where the next one starts.
                let mut ok = true;
                let ends: Vec<Option<(VertexId, VertexId)>> = lp
                    .coedges
                    .iter()
                    .map(|ce| {
                        emap.get(&ce.edge).map(|e| {
                            if ce.reversed {
                                (e.end, e.start)
                            } else {
                                (e.start, e.end)
                            }
                        })
                    })
                    .collect();
                for (k, pair) in ends.iter().enumerate() {
                    let Some((_, tail)) = pair else {
                        push(format!(
                            "{} loop {li} references missing {}",
                            f.id, lp.coedges[k].edge
                        ));
                        ok = false;
                        continue;
                    };
                    if let Some((head_next, _)) = ends[(k + 1) % ends.len()] {
                        if *tail != head_next {
                            ok = false;
                        }
                    }
                }
                if !ok {
                    push(format!("{} loop {li} is not a closed vertex chain", f.id));
                }
            }
        }

        // Manifoldness: each edge is used by exactly two coedges of opposite
        // orientation (possibly both from the same face along a seam).
        let index = TopologyIndex::build(self);
        for e in &self.edges {
            let uses = index.edge_uses(e.id);
            if uses.len() != 2 {
                push(format!(
                    "{} is used by {} coedges; expected exactly 2",
                    e.id,
                    uses.len()
                ));
            } else if uses[0].2.reversed == uses[1].2.reversed {
                push(format!("{} is traversed twice in the same direction", e.id));
            }
        }

        // Edge endpoints must lie on the owning faces' surfaces.
        let tol = self.bbox_diagonal().max(f64::MIN_POSITIVE) * ENDPOINT_ON_SURFACE_REL_TOL;
        for f in &self.faces {
            for lp in &f.loops {
                for ce in &lp.coedges {
                    let Some(e) = emap.get(&ce.edge) else { continue };
                    for vid in [e.start, e.end] {
                        if let Some(p) = vmap.get(&vid) {
                            let d = crate::geom::surface_distance(&f.surface, *p);
                            if d > tol {
                                push(format!(
                                    "{} endpoint {} is {d:.3e} off the surface of {}",
                                    e.id, vid, f.id
                                ));
                            }
                        }
                    }
                }
            }
        }

        out
    }
}

/// Sweep angle of an arc from `start` to `end` counterclockwise around
/// `axis`, in `(0, 2*pi]`. Coincident endpoints mean a full circle.
pub fn arc_sweep(start: Vec3, end: Vec3, center: Vec3, axis: Vec3) -> f64 {
    let u = start - center;
    let v = end - center;
    let u = u - axis * u.dot(axis);
    let v = v - axis * v.dot(axis);
    let cross = u.cross(v);
    let ang = f64::atan2(cross.dot(axis), u.dot(v));
    let tau = std::f64::consts::TAU;
    let sweep = if ang > 1e-9 { ang } else { ang + tau };
    if start.approx_eq(end, u.norm().max(1.0) * 1e-9) {
        tau
    } else {
        sweep
    }
}

/// Point on an arc at `angle` counterclockwise from `start` around `axis`.
pub fn arc_point_at(start: Vec3, center: Vec3, axis: Vec3, angle: f64) -> Vec3 {
    center + crate::math::rotate_about_axis(start - center, axis, angle)
}

// ---------------------------------------------------------------------------
// JSON serialization
// ---------------------------------------------------------------------------

pub const MODEL_SCHEMA_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct ModelFile {
    schema_version: u32,
    units: String,
    vertices: Vec<Vertex>,
    edges: Vec<Edge>,
    faces: Vec<Face>,
}

/// Serialize a model to pretty JSON.
pub fn model_to_json(model: &Model) -> String {
    let file = ModelFile {
        schema_version: MODEL_SCHEMA_VERSION,
        units: model.units.clone(),
        vertices: model.vertices.clone(),
        edges: model.edges.clone(),
        faces: model.faces.clone(),
    };
    let mut s = serde_json::to_string_pretty(&file).expect("model serializes");
    s.push('\n');
    s
}

/// Parse a model from JSON and validate it. Ids are preserved from the file.
pub fn model_from_json(text: &str) -> Result<Model, BrepError> {
    let file: ModelFile =
        serde_json::from_str(text).map_err(|e| BrepError::Schema(e.to_string()))?;
    if file.schema_version != MODEL_SCHEMA_VERSION {
        return Err(BrepError::Schema(format!(
            "unsupported schema_version {} (expected {MODEL_SCHEMA_VERSION})",
            file.schema_version
        )));
    }
    let model = Model {
        units: file.units,
        vertices: file.vertices,
        edges: file.edges,
        faces: file.faces,
    };
    let diags = model.validate_topology();
    if !diags.is_empty() {
        return Err(BrepError::Topology(diags));
    }
    Ok(model)
}

pub fn save_model(model: &Model, path: &Path) -> Result<(), BrepError> {
    std::fs::write(path, model_to_json(model))?;
    Ok(())
}

pub fn load_model(path: &Path) -> Result<Model, BrepError> {
    let text = std::fs::read_to_string(path)?;
    model_from_json(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::fixtures;

    #[test]
    fn cuboid_validates_and_is_manifold() {
        let m = fixtures::cuboid_stock(2.0, 2.0, 2.0);
        assert_eq!(m.faces.len(), 6);
        assert_eq!(m.edges.len(), 12);
        assert_eq!(m.vertices.len(), 8);
        let diags = m.validate_topology();
        assert!(diags.is_empty(), "{diags:?}");
    }

    #[test]
    fn cube_face_adjacency_covers_four_neighbors() {
        let m = fixtures::cuboid_stock(2.0, 2.0, 2.0);
        let index = TopologyIndex::build(&m);
        for f in &m.faces {
            let adj = m.adjacent_faces(f.id, LoopKind::Outer, &index).unwrap();
            assert_eq!(adj.len(), 4, "{} expected 4 neighbors", f.id);
            // A cube face never neighbors itself and never repeats a mate.
            let mut mates: Vec<FaceId> = adj.iter().map(|a| a.mate).collect();
            mates.sort();
            mates.dedup();
            assert_eq!(mates.len(), 4);
            assert!(!mates.contains(&f.id));
        }
        let inner = m
            .adjacent_faces(m.faces[0].id, LoopKind::Inner, &index)
            .unwrap();
        assert!(inner.is_empty());
    }

    #[test]
    fn triple_used_edge_is_reported() {
        let mut m = fixtures::cuboid_stock(2.0, 2.0, 2.0);
        // Append a bogus extra coedge on an existing edge.
        let e = m.edges[0].id;
        let f = &mut m.faces[0];
        f.loops[0].coedges.push(Coedge { edge: e, reversed: true });
        let diags = m.validate_topology();
        assert!(
            diags.iter().any(|d| d.0.contains("coedges; expected exactly 2")),
            "{diags:?}"
        );
    }

    #[test]
    fn missing_outer_loop_is_reported() {
        let mut m = fixtures::cuboid_stock(2.0, 2.0, 2.0);
        m.faces[0].loops[0].kind = LoopKind::Inner;
        let diags = m.validate_topology();
        assert!(diags.iter().any(|d| d.0.contains("outer loops")), "{diags:?}");
    }

    #[test]
    fn json_roundtrip_is_exact() {
        let m = fixtures::cuboid_stock(20.0, 20.0, 10.0);
        let text = model_to_json(&m);
        let back = model_from_json(&text).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn bad_schema_version_is_rejected() {
        let m = fixtures::cuboid_stock(2.0, 2.0, 2.0);
        let text = model_to_json(&m).replace("\"schema_version\": 1", "\"schema_version\": 9");
        let err = model_from_json(&text).unwrap_err();
        assert!(matches!(err, BrepError::Schema(_)));
    }

    #[test]
    fn arc_sweep_full_circle_and_quarter() {
        let c = Vec3::ZERO;
        let z = Vec3::new(0.0, 0.0, 1.0);
        let s = Vec3::new(1.0, 0.0, 0.0);
        assert!((arc_sweep(s, s, c, z) - std::f64::consts::TAU).abs() < 1e-12);
        let q = Vec3::new(0.0, 1.0, 0.0);
        assert!((arc_sweep(s, q, c, z) - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
        // Clockwise quarter = three quarters counterclockwise.
        assert!(
            (arc_sweep(q, s, c, z) - 3.0 * std::f64::consts::FRAC_PI_2).abs() < 1e-12
        );
    }
}
