//! Parameter-space loop polygons: sampling face loops into (u, v) polylines,
//! point containment with periodic copies, signed area, and minimum-area
//! bounding rectangles for planar width measurement.

use crate::brep::{Curve, Face, LoopKind, Model};
use crate::geom::surface::{periodic_u, periodic_v, uv_of};
use crate::math::Vec3;

const ARC_SAMPLES_PER_TURN: usize = 64;
const LINE_SAMPLES: usize = 8;

/// A closed polygon in surface parameter space (last point connects back to
/// the first). Periodic coordinates are unwrapped so consecutive points
/// differ by less than half a period.
#[derive(Clone, Debug)]
pub struct UvPolygon {
    pub kind: LoopKind,
    pub pts: Vec<[f64; 2]>,
}

/// All loop polygons of one face plus the periodicity of its parameters.
#[derive(Clone, Debug)]
pub struct FacePolygons {
    pub loops: Vec<UvPolygon>,
    pub periodic_u: bool,
    pub periodic_v: bool,
}

fn unwrap_coord(value: f64, prev: f64) -> f64 {
    let tau = std::f64::consts::TAU;
    value + tau * ((prev - value) / tau).round()
}

/// Sample the 3D points of one coedge in traversal order, excluding the
/// final endpoint (supplied by the next coedge in the chain).
pub fn sample_coedge(model: &Model, edge_id: crate::brep::EdgeId, reversed: bool) -> Vec<Vec3> {
    let edge = model.edge(edge_id).expect("validated edge");
    let s = model.vertex_point(edge.start).expect("validated vertex");
    let t = model.vertex_point(edge.end).expect("validated vertex");
    let mut pts = match edge.curve {
        Curve::Line => {
            let n = LINE_SAMPLES;
            (0..n)
                .map(|i| s + (t - s) * (i as f64 / n as f64))
                .collect::<Vec<_>>()
        }
        Curve::Arc { center, axis, .. } => {
            let sweep = crate::brep::arc_sweep(s, t, center, axis);
            let n = ((sweep / std::f64::consts::TAU * ARC_SAMPLES_PER_TURN as f64).ceil()
                as usize)
                .max(4);
            (0..n)
                .map(|i| {
                    crate::brep::arc_point_at(s, center, axis, sweep * i as f64 / n as f64)
                })
                .collect()
        }
    };
    if reversed {
        // Traversal runs end -> start: reverse, then drop what is now the
        // final point (the edge's start vertex) and prepend the end vertex.
        pts.reverse(); // pts now ends with s's successor ... starts near t
        pts.insert(0, t);
        pts.pop();
    }
    pts
}

/// Build the unwrapped parameter polygons for all loops of a face.
pub fn face_polygons(model: &Model, face: &Face) -> FacePolygons {
    let per_u = periodic_u(&face.surface);
    let per_v = periodic_v(&face.surface);
    let mut loops = Vec::with_capacity(face.loops.len());
    for lp in &face.loops {
        let mut pts: Vec<[f64; 2]> = Vec::new();
        for ce in &lp.coedges {
            for p in sample_coedge(model, ce.edge, ce.reversed) {
                let mut uv = uv_of(&face.surface, p);
                if let Some(prev) = pts.last() {
                    if per_u {
                        uv[0] = unwrap_coord(uv[0], prev[0]);
                    }
                    if per_v {
                        uv[1] = unwrap_coord(uv[1], prev[1]);
                    }
                }
                pts.push(uv);
            }
        }
        loops.push(UvPolygon { kind: lp.kind, pts });
    }
    FacePolygons { loops, periodic_u: per_u, periodic_v: per_v }
}

impl UvPolygon {
    /// Shoelace signed area (positive for counterclockwise in (u, v)).
    pub fn signed_area(&self) -> f64 {
        let n = self.pts.len();
        if n < 3 {
            return 0.0;
        }
        let mut acc = 0.0;
        for i in 0..n {
            let [x0, y0] = self.pts[i];
            let [x1, y1] = self.pts[(i + 1) % n];
            acc += x0 * y1 - x1 * y0;
        }
        0.5 * acc
    }

    /// Axis-aligned bounds: ((u_min, v_min), (u_max, v_max)).
    pub fn bounds(&self) -> ([f64; 2], [f64; 2]) {
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for p in &self.pts {
            for k in 0..2 {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
        (lo, hi)
    }

    fn crossings(&self, q: [f64; 2]) -> u32 {
        // Standard even-odd ray cast toward +u.
        let mut count = 0;
        let n = self.pts.len();
        for i in 0..n {
            let [x0, y0] = self.pts[i];
            let [x1, y1] = self.pts[(i + 1) % n];
            if (y0 > q[1]) != (y1 > q[1]) {
                let x_at = x0 + (q[1] - y0) / (y1 - y0) * (x1 - x0);
                if x_at > q[0] {
                    count += 1;
                }
            }
        }
        count
    }
}

impl FacePolygons {
    /// Even-odd containment over all loops, trying periodic copies of the
    /// query point (shifts of 2*pi in each periodic coordinate).
    pub fn contains(&self, uv: [f64; 2]) -> bool {
        let tau = std::f64::consts::TAU;
        let u_shifts: &[f64] = if self.periodic_u { &[0.0, -tau, tau] } else { &[0.0] };
        let v_shifts: &[f64] = if self.periodic_v { &[0.0, -tau, tau] } else { &[0.0] };
        for &du in u_shifts {
            for &dv in v_shifts {
                let q = [uv[0] + du, uv[1] + dv];
                let total: u32 = self.loops.iter().map(|l| l.crossings(q)).sum();
                if total % 2 == 1 {
                    return true;
                }
            }
        }
        false
    }

    pub fn outer(&self) -> &UvPolygon {
        self.loops
            .iter()
            .find(|l| l.kind == LoopKind::Outer)
            .expect("validated face has an outer loop")
    }
}

/// Convex hull (Andrew's monotone chain), counterclockwise, collinear
/// points dropped, no repeated first point.
pub fn convex_hull(points: &[[f64; 2]]) -> Vec<[f64; 2]> {
    let mut pts: Vec<[f64; 2]> = points.to_vec();
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let cross = |o: [f64; 2], a: [f64; 2], b: [f64; 2]| {
        (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
    };
    let mut lower: Vec<[f64; 2]> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0.0
        {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<[f64; 2]> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0.0
        {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// Sides (short, long) of the minimum-area bounding rectangle of a point
/// set, found by rotating calipers over hull edge directions.
pub fn min_area_rect_sides(points: &[[f64; 2]]) -> (f64, f64) {
    let hull = convex_hull(points);
    if hull.len() < 2 {
        return (0.0, 0.0);
    }
    if hull.len() == 2 {
        let dx = hull[1][0] - hull[0][0];
        let dy = hull[1][1] - hull[0][1];
        return (0.0, (dx * dx + dy * dy).sqrt());
    }
    let mut best: Option<(f64, f64, f64)> = None; // (area, w, l)
    let n = hull.len();
    for i in 0..n {
        let [x0, y0] = hull[i];
        let [x1, y1] = hull[(i + 1) % n];
        let len = ((x1 - x0).powi(2) + (y1 - y0).powi(2)).sqrt();
        if len < 1e-15 {
            continue;
        }
        let ex = (x1 - x0) / len;
        let ey = (y1 - y0) / len;
        let (mut a_min, mut a_max) = (f64::INFINITY, f64::NEG_INFINITY);
        let (mut b_min, mut b_max) = (f64::INFINITY, f64::NEG_INFINITY);
        for &[px, py] in &hull {
            let a = (px - x0) * ex + (py - y0) * ey;
            let b = -(px - x0) * ey + (py - y0) * ex;
            a_min = a_min.min(a);
            a_max = a_max.max(a);
            b_min = b_min.min(b);
            b_max = b_max.max(b);
        }
        let da = a_max - a_min;
        let db = b_max - b_min;
        let area = da * db;
        if best.map_or(true, |(ba, _, _)| area < ba) {
            best = Some((area, da.min(db), da.max(db)));
        }
    }
    let (_, w, l) = best.unwrap();
    (w, l)
}
