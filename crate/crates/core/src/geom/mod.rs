//! Geometric predicates over a validated model: edge convexity and
//! continuity, base vectors and angle classes, coaxiality, parallel face
//! pairs, face widths, and the interference-ray test.

pub mod polygon;
pub mod surface;

pub use surface::{
    geometric_normal, point_at, project_point, ray_hits, signed_distance, surface_distance,
    uv_of,
};

use crate::brep::{
    Adjacency, Coedge, Convexity, Curve, Edge, EdgeId, Face, FaceId, FaceType, LoopKind, Model,
    Surface, TopologyIndex,
};
use crate::config::ToleranceSettings;
use crate::math::Vec3;
use polygon::{face_polygons, min_area_rect_sides, FacePolygons};
use std::collections::HashMap;

/// Classification of the angle between two base vectors.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AngleClass {
    Parallel,
    Perpendicular,
    Acute,
    Obtuse,
}

/// Classify the angle between two unit vectors. With `fold` the angle is
/// folded to `[0, pi/2]` (direction signs ignored), so OBTUSE never occurs.
pub fn angle_class(v1: Vec3, v2: Vec3, fold: bool, angular_tol: f64) -> AngleClass {
    let theta = v1.angle_to(v2);
    let t = if fold { theta.min(std::f64::consts::PI - theta) } else { theta };
    classify_angle(t, angular_tol)
}

fn classify_angle(theta: f64, tol: f64) -> AngleClass {
    use std::f64::consts::FRAC_PI_2;
    if theta <= tol {
        AngleClass::Parallel
    } else if (theta - FRAC_PI_2).abs() <= tol {
        AngleClass::Perpendicular
    } else if theta < FRAC_PI_2 {
        AngleClass::Acute
    } else {
        AngleClass::Obtuse
    }
}

/// Shared evaluation context: topology index, parameter polygons, and
/// tolerance values resolved against the model's bounding-box diagonal.
pub struct GeomContext<'a> {
    pub model: &'a Model,
    pub index: TopologyIndex,
    pub diag: f64,
    pub angular_tol: f64,
    pub length_tol: f64,
    pub ray_eps: f64,
    pub probe_delta: f64,
    polygons: HashMap<FaceId, FacePolygons>,
}

impl<'a> GeomContext<'a> {
    /// Build the context. The model must already pass topology validation.
    pub fn new(model: &'a Model, tols: &ToleranceSettings) -> GeomContext<'a> {
        let diag = model.bbox_diagonal().max(f64::MIN_POSITIVE);
        let polygons = model
            .faces
            .iter()
            .map(|f| (f.id, face_polygons(model, f)))
            .collect();
        GeomContext {
            model,
            index: TopologyIndex::build(model),
            diag,
            angular_tol: tols.angular_tol,
            length_tol: diag * tols.length_tol_rel,
            ray_eps: diag * tols.ray_epsilon,
            probe_delta: diag * tols.probe_offset_rel,
            polygons,
        }
    }

    pub fn polygons(&self, face: FaceId) -> &FacePolygons {
        &self.polygons[&face]
    }

    fn face(&self, id: FaceId) -> &Face {
        self.model
            .faces
            .iter()
            .find(|f| f.id == id)
            .expect("face id resolved during validation")
    }

    /// Outward material normal of a face at a point on its surface.
    pub fn sensed_normal(&self, face: &Face, p: Vec3) -> Vec3 {
        let n = geometric_normal(&face.surface, p);
        if face.sense {
            n
        } else {
            -n
        }
    }

    /// Signed distance of `p` against the face's outward side: positive
    /// means the void side of the surface.
    pub fn sensed_distance(&self, face: &Face, p: Vec3) -> f64 {
        let d = signed_distance(&face.surface, p);
        if face.sense {
            d
        } else {
            -d
        }
    }

    fn edge(&self, id: EdgeId) -> &Edge {
        self.model.edge(id).expect("edge id resolved during validation")
    }

    fn edge_endpoints(&self, edge: &Edge) -> (Vec3, Vec3) {
        (
            self.model.vertex_point(edge.start).expect("validated"),
            self.model.vertex_point(edge.end).expect("validated"),
        )
    }

    /// Point at the given fraction of an edge's natural (start-to-end) span.
    pub fn edge_point(&self, edge_id: EdgeId, fraction: f64) -> Vec3 {
        let edge = self.edge(edge_id);
        let (s, t) = self.edge_endpoints(edge);
        match edge.curve {
            Curve::Line => s + (t - s) * fraction,
            Curve::Arc { center, axis, .. } => {
                let sweep = crate::brep::arc_sweep(s, t, center, axis);
                crate::brep::arc_point_at(s, center, axis, sweep * fraction)
            }
        }
    }

    /// Direction of travel of a coedge at a point on its edge.
    pub fn coedge_dir_at(&self, ce: Coedge, p: Vec3) -> Vec3 {
        let edge = self.edge(ce.edge);
        let (s, t) = self.edge_endpoints(edge);
        let forward = match edge.curve {
            Curve::Line => (t - s).normalized().expect("edge has length"),
            Curve::Arc { center, axis, .. } => {
                let r = p - center;
                axis.cross(r - axis * r.dot(axis))
                    .normalized()
                    .expect("point off the arc axis")
            }
        };
        if ce.reversed {
            -forward
        } else {
            forward
        }
    }

    /// Convexity of the shared edge between `face` and the adjacent face,
    /// seen from `face`'s coedge. Sharp edges classify by the sign of
    /// d_c . (n_a x n_b); smooth edges (normals parallel within tolerance)
    /// fall back to probing offset points on each face and testing which
    /// side of the material the probe midpoint lies on.
    pub fn convexity(&self, face: FaceId, adj: &Adjacency) -> Convexity {
        let fa = self.face(face);
        let fb = self.face(adj.mate);
        let m = self.edge_point(adj.edge, 0.5);
        let d_c = self.coedge_dir_at(adj.coedge, m);
        let n_a = self.sensed_normal(fa, m);
        let n_b = self.sensed_normal(fb, m);
        let s = d_c.dot(n_a.cross(n_b));
        if s > self.angular_tol {
            Convexity::Convex
        } else if s < -self.angular_tol {
            Convexity::Concave
        } else {
            self.probe_convexity(fa, fb, m, d_c, n_a, n_b)
        }
    }

    fn probe_convexity(
        &self,
        fa: &Face,
        fb: &Face,
        m: Vec3,
        d_c: Vec3,
        n_a: Vec3,
        n_b: Vec3,
    ) -> Convexity {
        let delta = self.probe_delta;
        // Into each face's interior: left of travel when the outward normal
        // is up. The mate traverses the shared edge the opposite way.
        let inward_a = n_a.cross(d_c);
        let inward_b = n_b.cross(-d_c);
        let pa = project_point(&fa.surface, m + inward_a * delta);
        let pb = project_point(&fb.surface, m + inward_b * delta);
        let q = (pa + pb) * 0.5;
        let s = self.sensed_distance(fa, q) + self.sensed_distance(fb, q);
        if s > 0.0 {
            Convexity::Convex
        } else {
            Convexity::Concave
        }
    }

    /// True when the two faces' outward normals agree (within tolerance) at
    /// three samples along the shared edge — tangent continuation rather
    /// than a sharp crease.
    pub fn continuity_higher(&self, face_a: FaceId, face_b: FaceId, edge: EdgeId) -> bool {
        let fa = self.face(face_a);
        let fb = self.face(face_b);
        [0.25, 0.5, 0.75].iter().all(|&f| {
            let p = self.edge_point(edge, f);
            let n_a = self.sensed_normal(fa, p);
            let n_b = self.sensed_normal(fb, p);
            n_a.angle_to(n_b) <= self.angular_tol
        })
    }

    /// Base vector of a face: axis direction for cylinders, cones, and
    /// tori; outward normal for planes; outward normal at the parameter
    /// center for spheres.
    pub fn base_vector(&self, face: &Face) -> Vec3 {
        match face.surface {
            Surface::Plane { normal, .. } => {
                if face.sense {
                    normal
                } else {
                    -normal
                }
            }
            Surface::Cylinder { axis_dir, .. }
            | Surface::Cone { axis_dir, .. }
            | Surface::Torus { axis_dir, .. } => axis_dir,
            Surface::Sphere { .. } => {
                let p = self.loop_center_point(face);
                self.sensed_normal(face, p)
            }
        }
    }

    /// Surface point under the center of the outer loop's parameter bounds.
    pub fn loop_center_point(&self, face: &Face) -> Vec3 {
        let fp = self.polygons(face.id);
        let (lo, hi) = fp.outer().bounds();
        point_at(&face.surface, [(lo[0] + hi[0]) * 0.5, (lo[1] + hi[1]) * 0.5])
    }

    /// Angle classes (folded, unfolded) between the base vectors of two
    /// faces. When exactly one face is planar, the angle is complemented
    /// (axis vs. normal measures the co-angle) in both modes.
    pub fn angle_classes(&self, fa: &Face, fb: &Face) -> (AngleClass, AngleClass) {
        use std::f64::consts::{FRAC_PI_2, PI};
        let v1 = self.base_vector(fa);
        let v2 = self.base_vector(fb);
        let theta = v1.angle_to(v2);
        let folded = theta.min(PI - theta);
        let mixed = (fa.surface.face_type() == FaceType::Plan)
            != (fb.surface.face_type() == FaceType::Plan);
        if mixed {
            let t = FRAC_PI_2 - folded;
            let c = classify_angle(t, self.angular_tol);
            (c, c)
        } else {
            (
                classify_angle(folded, self.angular_tol),
                classify_angle(theta, self.angular_tol),
            )
        }
    }

    /// Both faces rotational with coincident axis lines.
    pub fn coaxial(&self, fa: &Face, fb: &Face) -> bool {
        let (Some((p1, d1)), Some((p2, d2))) =
            (fa.surface.axis_line(), fb.surface.axis_line())
        else {
            return false;
        };
        let theta = d1.angle_to(d2);
        if theta.min(std::f64::consts::PI - theta) > self.angular_tol {
            return false;
        }
        let w = p2 - p1;
        (w - d1 * w.dot(d1)).norm() <= self.length_tol
    }

    /// Minimum perpendicular distance over pairs of the face's outer-loop
    /// planar neighbors whose outward normals are anti-parallel and point
    /// at each other. `None` when no such pair exists.
    pub fn parallel_pair(&self, face: FaceId) -> Option<f64> {
        let adjacencies = self
            .model
            .adjacent_faces(face, LoopKind::Outer, &self.index)
            .expect("validated face");
        let mut mates: Vec<FaceId> = adjacencies
            .iter()
            .map(|a| a.mate)
            .filter(|&m| m != face)
            .collect();
        mates.sort();
        mates.dedup();
        let planes: Vec<(&Face, Vec3, Vec3)> = mates
            .iter()
            .filter_map(|&id| {
                let f = self.face(id);
                match f.surface {
                    Surface::Plane { origin, .. } => {
                        let n = self.sensed_normal(f, origin);
                        Some((f, origin, n))
                    }
                    _ => None,
                }
            })
            .collect();
        let mut best: Option<f64> = None;
        for i in 0..planes.len() {
            for j in (i + 1)..planes.len() {
                let (_, o1, n1) = planes[i];
                let (_, o2, n2) = planes[j];
                if n1.angle_to(n2) < std::f64::consts::PI - self.angular_tol {
                    continue; // not anti-parallel
                }
                let h = (o2 - o1).dot(n1);
                if h <= self.length_tol {
                    continue; // behind or coplanar: not facing
                }
                best = Some(best.map_or(h, |b: f64| b.min(h)));
            }
        }
        best
    }

    /// Characteristic width of a face: radius for cylinders and spheres,
    /// minor radius for tori, slant extent for cones, and the short side of
    /// the minimum-area bounding rectangle of the outer loop for planes.
    pub fn face_width(&self, face: &Face) -> f64 {
        match face.surface {
            Surface::Cylinder { radius, .. } | Surface::Sphere { radius, .. } => radius,
            Surface::Torus { minor_radius, .. } => minor_radius,
            Surface::Cone { half_angle, .. } => {
                let fp = self.polygons(face.id);
                let (mut v_min, mut v_max) = (f64::INFINITY, f64::NEG_INFINITY);
                for lp in &fp.loops {
                    for p in &lp.pts {
                        v_min = v_min.min(p[1]);
                        v_max = v_max.max(p[1]);
                    }
                }
                (v_max - v_min) / half_angle.cos()
            }
            Surface::Plane { .. } => {
                let fp = self.polygons(face.id);
                min_area_rect_sides(&fp.outer().pts).0
            }
        }
    }

    /// Origin and direction of the face's interference ray: the surface
    /// point under the outer loop's parameter center, nudged off the
    /// surface along the outward normal.
    pub fn interference_ray(&self, face: &Face) -> (Vec3, Vec3) {
        let p = self.loop_center_point(face);
        let n = self.sensed_normal(face, p);
        (p + n * self.ray_eps, n)
    }

    /// Whether the face's outward ray strikes any face of the same shell
    /// (including the originating surface on its far side).
    pub fn interference(&self, face: FaceId) -> bool {
        let f = self.face(face);
        let (origin, dir) = self.interference_ray(f);
        let t_max = 4.0 * self.diag;
        for g in &self.model.faces {
            if g.shell != f.shell {
                continue;
            }
            for t in ray_hits(&g.surface, origin, dir, self.ray_eps, t_max) {
                let hit = origin + dir * t;
                if self.polygons(g.id).contains(uv_of(&g.surface, hit)) {
                    return true;
                }
            }
        }
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::fixtures;

    fn ctx_tols() -> ToleranceSettings {
        ToleranceSettings::default()
    }

    #[test]
    fn angle_class_basic_cases() {
        let tol = 1e-6;
        let z = Vec3::new(0.0, 0.0, 1.0);
        let x = Vec3::new(1.0, 0.0, 0.0);
        let xz = Vec3::new(1.0, 0.0, 1.0).normalized().unwrap();
        assert_eq!(angle_class(z, z, true, tol), AngleClass::Parallel);
        assert_eq!(angle_class(x, z, true, tol), AngleClass::Perpendicular);
        assert_eq!(angle_class(xz, z, true, tol), AngleClass::Acute);
        assert_eq!(angle_class(z, -z, true, tol), AngleClass::Parallel);
        assert_eq!(angle_class(z, -z, false, tol), AngleClass::Obtuse);
        assert_eq!(angle_class(-xz, z, false, tol), AngleClass::Obtuse);
    }

    #[test]
    fn cube_edges_are_convex_and_sharp() {
        let m = fixtures::cuboid_stock(20.0, 20.0, 10.0);
        let ctx = GeomContext::new(&m, &ctx_tols());
        for f in &m.faces {
            for adj in m
                .adjacent_faces(f.id, LoopKind::Outer, &ctx.index)
                .unwrap()
            {
                assert_eq!(ctx.convexity(f.id, &adj), Convexity::Convex);
                assert!(!ctx.continuity_higher(f.id, adj.mate, adj.edge));
            }
        }
    }

    #[test]
    fn cube_convexity_is_symmetric() {
        let m = fixtures::cuboid_stock(7.0, 5.0, 3.0);
        let ctx = GeomContext::new(&m, &ctx_tols());
        for f in &m.faces {
            for adj in m
                .adjacent_faces(f.id, LoopKind::Outer, &ctx.index)
                .unwrap()
            {
                let here = ctx.convexity(f.id, &adj);
                // Find the mate's adjacency over the same edge back to us.
                let back = m
                    .adjacent_faces(adj.mate, LoopKind::Outer, &ctx.index)
                    .unwrap()
                    .into_iter()
                    .find(|b| b.edge == adj.edge && b.mate == f.id)
                    .expect("reciprocal adjacency");
                assert_eq!(here, ctx.convexity(adj.mate, &back));
            }
        }
    }

    #[test]
    fn cube_top_face_has_no_interference() {
        let m = fixtures::cuboid_stock(20.0, 20.0, 10.0);
        let ctx = GeomContext::new(&m, &ctx_tols());
        for f in &m.faces {
            assert!(!ctx.interference(f.id), "{} should see open space", f.id);
        }
    }

    #[test]
    fn cube_faces_report_no_parallel_pair() {
        // Outward-facing opposite sides never face each other.
        let m = fixtures::cuboid_stock(20.0, 20.0, 10.0);
        let ctx = GeomContext::new(&m, &ctx_tols());
        for f in &m.faces {
            assert_eq!(ctx.parallel_pair(f.id), None);
        }
    }

    #[test]
    fn cube_face_width_is_short_side() {
        let m = fixtures::cuboid_stock(20.0, 12.0, 10.0);
        let ctx = GeomContext::new(&m, &ctx_tols());
        // Face at z = 0 spans 20 x 12; its width is 12.
        let bottom = m
            .faces
            .iter()
            .find(|f| matches!(f.surface, Surface::Plane { origin, .. } if origin.z == 0.0))
            .unwrap();
        assert!((ctx.face_width(bottom) - 12.0).abs() < 1e-9);
    }

    #[test]
    fn plane_angle_uses_sensed_normals() {
        let m = fixtures::cuboid_stock(4.0, 4.0, 4.0);
        let ctx = GeomContext::new(&m, &ctx_tols());
        let index = &ctx.index;
        let f = &m.faces[0];
        for adj in m.adjacent_faces(f.id, LoopKind::Outer, index).unwrap() {
            let mate = m.face(adj.mate).unwrap();
            let (folded, unfolded) = ctx.angle_classes(f, mate);
            assert_eq!(folded, AngleClass::Perpendicular);
            assert_eq!(unfolded, AngleClass::Perpendicular);
        }
    }
}
