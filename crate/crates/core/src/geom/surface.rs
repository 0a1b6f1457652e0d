//! Analytic surface evaluation: normals, distances, projection, a fixed
//! (u, v) parametrization per surface kind, and ray intersection.
//!
//! Parametrizations (used for loop polygons and containment tests):
//! - plane: `u, v` are lengths along a deterministic in-plane frame.
//! - cylinder: `u` = azimuth around the axis (periodic), `v` = height along it.
//! - cone: `u` = azimuth (periodic), `v` = height above the apex.
//! - sphere: `u` = azimuth around +z (periodic), `v` = polar angle from +z.
//! - torus: `u` = azimuth around the main axis, `v` = angle around the tube
//!   circle; both periodic.

use crate::brep::Surface;
use crate::math::Vec3;

/// In-surface frame vectors used by the parametrization. Built
/// deterministically from the surface definition alone.
#[derive(Clone, Copy, Debug)]
struct AxisFrame {
    axis: Vec3,
    ref_dir: Vec3,
    ref_perp: Vec3,
}

fn axis_frame(axis: Vec3) -> AxisFrame {
    let ref_dir = axis.any_perpendicular();
    AxisFrame { axis, ref_dir, ref_perp: axis.cross(ref_dir) }
}

fn frame_of(surface: &Surface) -> AxisFrame {
    match *surface {
        Surface::Plane { normal, .. } => axis_frame(normal),
        Surface::Cylinder { axis_dir, .. } => axis_frame(axis_dir),
        Surface::Cone { axis_dir, .. } => axis_frame(axis_dir),
        Surface::Sphere { .. } => axis_frame(Vec3::new(0.0, 0.0, 1.0)),
        Surface::Torus { axis_dir, .. } => axis_frame(axis_dir),
    }
}

/// Azimuth of `w` (projected off the axis) in `[0, 2*pi)`.
fn azimuth(frame: &AxisFrame, w: Vec3) -> f64 {
    let u = f64::atan2(w.dot(frame.ref_perp), w.dot(frame.ref_dir));
    if u < 0.0 {
        u + std::f64::consts::TAU
    } else {
        u
    }
}

/// Geometric (sense-independent) unit normal at a point on the surface:
/// plane normal; radially away from the axis for cylinders; away from the
/// axis and tilted down the slope for cones; away from the center for
/// spheres; away from the tube-circle center for tori.
pub fn geometric_normal(surface: &Surface, p: Vec3) -> Vec3 {
    match *surface {
        Surface::Plane { normal, .. } => normal,
        Surface::Cylinder { axis_origin, axis_dir, .. } => {
            let w = p - axis_origin;
            (w - axis_dir * w.dot(axis_dir))
                .normalized()
                .unwrap_or_else(|| axis_dir.any_perpendicular())
        }
        Surface::Cone { apex, axis_dir, half_angle } => {
            let w = p - apex;
            let radial = (w - axis_dir * w.dot(axis_dir))
                .normalized()
                .unwrap_or_else(|| axis_dir.any_perpendicular());
            radial * half_angle.cos() - axis_dir * half_angle.sin()
        }
        Surface::Sphere { center, .. } => (p - center)
            .normalized()
            .unwrap_or(Vec3::new(0.0, 0.0, 1.0)),
        Surface::Torus { center, axis_dir, major_radius, .. } => {
            let w = p - center;
            let radial = (w - axis_dir * w.dot(axis_dir))
                .normalized()
                .unwrap_or_else(|| axis_dir.any_perpendicular());
            let tube_center = center + radial * major_radius;
            (p - tube_center)
                .normalized()
                .unwrap_or(radial)
        }
    }
}

/// Signed distance from `p` to the surface, positive on the side the
/// geometric normal points to. Exact for points near the surface.
pub fn signed_distance(surface: &Surface, p: Vec3) -> f64 {
    match *surface {
        Surface::Plane { origin, normal } => (p - origin).dot(normal),
        Surface::Cylinder { axis_origin, axis_dir, radius } => {
            let w = p - axis_origin;
            (w - axis_dir * w.dot(axis_dir)).norm() - radius
        }
        Surface::Cone { apex, axis_dir, half_angle } => {
            let w = p - apex;
            let h = w.dot(axis_dir);
            let rho = (w - axis_dir * h).norm();
            rho * half_angle.cos() - h * half_angle.sin()
        }
        Surface::Sphere { center, radius } => (p - center).norm() - radius,
        Surface::Torus { center, axis_dir, major_radius, minor_radius } => {
            let w = p - center;
            let h = w.dot(axis_dir);
            let rho = (w - axis_dir * h).norm();
            ((rho - major_radius).powi(2) + h * h).sqrt() - minor_radius
        }
    }
}

/// Absolute distance from `p` to the surface (for near-surface points).
pub fn surface_distance(surface: &Surface, p: Vec3) -> f64 {
    signed_distance(surface, p).abs()
}

/// Closest point on the surface to `p`.
pub fn project_point(surface: &Surface, p: Vec3) -> Vec3 {
    match *surface {
        Surface::Plane { origin, normal } => p - normal * (p - origin).dot(normal),
        Surface::Cylinder { axis_origin, axis_dir, radius } => {
            let w = p - axis_origin;
            let h = w.dot(axis_dir);
            let radial = (w - axis_dir * h)
                .normalized()
                .unwrap_or_else(|| axis_dir.any_perpendicular());
            axis_origin + axis_dir * h + radial * radius
        }
        Surface::Cone { apex, axis_dir, half_angle } => {
            let w = p - apex;
            let h = w.dot(axis_dir);
            let rho_vec = w - axis_dir * h;
            let rho = rho_vec.norm();
            let radial = rho_vec
                .normalized()
                .unwrap_or_else(|| axis_dir.any_perpendicular());
            // Closest point on the generator ray (half-plane coordinates).
            let s = (h * half_angle.cos() + rho * half_angle.sin()).max(0.0);
            apex + axis_dir * (s * half_angle.cos()) + radial * (s * half_angle.sin())
        }
        Surface::Sphere { center, radius } => {
            let dir = (p - center)
                .normalized()
                .unwrap_or(Vec3::new(0.0, 0.0, 1.0));
            center + dir * radius
        }
        Surface::Torus { center, axis_dir, major_radius, minor_radius } => {
            let w = p - center;
            let radial = (w - axis_dir * w.dot(axis_dir))
                .normalized()
                .unwrap_or_else(|| axis_dir.any_perpendicular());
            let tube_center = center + radial * major_radius;
            let dir = (p - tube_center).normalized().unwrap_or(radial);
            tube_center + dir * minor_radius
        }
    }
}

/// Whether the `u` parameter is periodic with period 2*pi.
pub fn periodic_u(surface: &Surface) -> bool {
    !matches!(surface, Surface::Plane { .. })
}

/// Whether the `v` parameter is periodic with period 2*pi.
pub fn periodic_v(surface: &Surface) -> bool {
    matches!(surface, Surface::Torus { .. })
}

/// Parameters of a point assumed to lie on the surface. Periodic
/// coordinates are principal values in `[0, 2*pi)`.
pub fn uv_of(surface: &Surface, p: Vec3) -> [f64; 2] {
    let frame = frame_of(surface);
    match *surface {
        Surface::Plane { origin, .. } => {
            let w = p - origin;
            [w.dot(frame.ref_dir), w.dot(frame.ref_perp)]
        }
        Surface::Cylinder { axis_origin, axis_dir, .. } => {
            let w = p - axis_origin;
            let h = w.dot(axis_dir);
            [azimuth(&frame, w - axis_dir * h), h]
        }
        Surface::Cone { apex, axis_dir, .. } => {
            let w = p - apex;
            let h = w.dot(axis_dir);
            [azimuth(&frame, w - axis_dir * h), h]
        }
        Surface::Sphere { center, .. } => {
            let w = p - center;
            let h = w.dot(frame.axis);
            let rho = (w - frame.axis * h).norm();
            [azimuth(&frame, w), f64::atan2(rho, h)]
        }
        Surface::Torus { center, axis_dir, major_radius, .. } => {
            let w = p - center;
            let h = w.dot(axis_dir);
            let w_perp = w - axis_dir * h;
            let u = azimuth(&frame, w_perp);
            let v = f64::atan2(h, w_perp.norm() - major_radius);
            [u, if v < 0.0 { v + std::f64::consts::TAU } else { v }]
        }
    }
}

/// Point on the surface at the given parameters (inverse of [`uv_of`]).
pub fn point_at(surface: &Surface, uv: [f64; 2]) -> Vec3 {
    let frame = frame_of(surface);
    let radial = |u: f64| frame.ref_dir * u.cos() + frame.ref_perp * u.sin();
    match *surface {
        Surface::Plane { origin, .. } => {
            origin + frame.ref_dir * uv[0] + frame.ref_perp * uv[1]
        }
        Surface::Cylinder { axis_origin, axis_dir, radius } => {
            axis_origin + axis_dir * uv[1] + radial(uv[0]) * radius
        }
        Surface::Cone { apex, axis_dir, half_angle } => {
            apex + axis_dir * uv[1] + radial(uv[0]) * (uv[1] * half_angle.tan())
        }
        Surface::Sphere { center, radius } => {
            center
                + (radial(uv[0]) * uv[1].sin() + frame.axis * uv[1].cos()) * radius
        }
        Surface::Torus { center, axis_dir, major_radius, minor_radius } => {
            let r = radial(uv[0]);
            let tube_center = center + r * major_radius;
            tube_center + (r * uv[1].cos() + axis_dir * uv[1].sin()) * minor_radius
        }
    }
}

/// Solve `a t^2 + b t + c = 0`; roots in ascending order.
fn quadratic_roots(a: f64, b: f64, c: f64) -> Vec<f64> {
    if a.abs() < 1e-14 {
        if b.abs() < 1e-14 {
            return Vec::new();
        }
        return vec![-c / b];
    }
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return Vec::new();
    }
    let sq = disc.sqrt();
    // Numerically stable form.
    let q = -0.5 * (b + b.signum() * sq);
    let mut roots = if q == 0.0 {
        vec![0.0, 0.0]
    } else {
        vec![q / a, c / q]
    };
    roots.sort_by(|x, y| x.partial_cmp(y).unwrap());
    roots
}

/// Parameters `t` in `(t_min, t_max]` where `origin + t*dir` meets the
/// surface, ascending. `dir` must be unit length. Torus intersections are
/// found by dense sampling plus bisection of the implicit quartic.
pub fn ray_hits(surface: &Surface, origin: Vec3, dir: Vec3, t_min: f64, t_max: f64) -> Vec<f64> {
    let mut ts = match *surface {
        Surface::Plane { origin: o, normal } => {
            let denom = dir.dot(normal);
            if denom.abs() < 1e-12 {
                Vec::new()
            } else {
                vec![(o - origin).dot(normal) / denom]
            }
        }
        Surface::Cylinder { axis_origin, axis_dir, radius } => {
            let m = origin - axis_origin;
            let d_perp = dir - axis_dir * dir.dot(axis_dir);
            let m_perp = m - axis_dir * m.dot(axis_dir);
            quadratic_roots(
                d_perp.dot(d_perp),
                2.0 * m_perp.dot(d_perp),
                m_perp.dot(m_perp) - radius * radius,
            )
        }
        Surface::Cone { apex, axis_dir, half_angle } => {
            let m = origin - apex;
            let k = half_angle.cos().powi(2);
            let da = dir.dot(axis_dir);
            let ma = m.dot(axis_dir);
            let roots = quadratic_roots(
                da * da - k * dir.dot(dir),
                2.0 * (ma * da - k * m.dot(dir)),
                ma * ma - k * m.dot(m),
            );
            // Keep the physical nappe (height above apex >= 0).
            roots
                .into_iter()
                .filter(|&t| (m + dir * t).dot(axis_dir) >= 0.0)
                .collect()
        }
        Surface::Sphere { center, radius } => {
            let m = origin - center;
            quadratic_roots(
                dir.dot(dir),
                2.0 * m.dot(dir),
                m.dot(m) - radius * radius,
            )
        }
        Surface::Torus { center, axis_dir, major_radius, minor_radius } => {
            let f = |t: f64| {
                let q = origin + dir * t - center;
                let qq = q.dot(q);
                let qa = q.dot(axis_dir);
                let lhs = qq + major_radius * major_radius - minor_radius * minor_radius;
                lhs * lhs - 4.0 * major_radius * major_radius * (qq - qa * qa)
            };
            let n = 2048;
            let step = (t_max - t_min) / n as f64;
            let mut roots = Vec::new();
            let mut prev_t = t_min;
            let mut prev_f = f(prev_t);
            for i in 1..=n {
                let t = t_min + step * i as f64;
                let ft = f(t);
                if prev_f == 0.0 {
                    roots.push(prev_t);
                } else if prev_f * ft < 0.0 {
                    let (mut lo, mut hi) = (prev_t, t);
                    let (mut flo, _) = (prev_f, ft);
                    for _ in 0..60 {
                        let mid = 0.5 * (lo + hi);
                        let fm = f(mid);
                        if flo * fm <= 0.0 {
                            hi = mid;
                        } else {
                            lo = mid;
                            flo = fm;
                        }
                    }
                    roots.push(0.5 * (lo + hi));
                }
                prev_t = t;
                prev_f = ft;
            }
            roots
        }
    };
    ts.retain(|&t| t.is_finite() && t > t_min && t <= t_max);
    ts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    ts
}

#[cfg(test)]
mod tests {
    use super::*;

    const Z: Vec3 = Vec3 { x: 0.0, y: 0.0, z: 1.0 };

    fn cyl() -> Surface {
        Surface::Cylinder { axis_origin: Vec3::ZERO, axis_dir: Z, radius: 2.0 }
    }

    #[test]
    fn cylinder_normal_is_radial() {
        let n = geometric_normal(&cyl(), Vec3::new(2.0, 0.0, 5.0));
        assert!(n.approx_eq(Vec3::new(1.0, 0.0, 0.0), 1e-12));
    }

    #[test]
    fn cone_normal_tilts_down_the_slope() {
        let alpha = std::f64::consts::FRAC_PI_4;
        let cone = Surface::Cone { apex: Vec3::ZERO, axis_dir: Z, half_angle: alpha };
        // At height 1 the radius is tan(45 deg) = 1.
        let p = Vec3::new(1.0, 0.0, 1.0);
        let n = geometric_normal(&cone, p);
        let expect = Vec3::new(alpha.cos(), 0.0, -alpha.sin());
        assert!(n.approx_eq(expect, 1e-12), "{n:?}");
        // The normal is perpendicular to the generator through p.
        assert!(n.dot(p.normalized().unwrap()).abs() < 1e-12);
        assert!(signed_distance(&cone, p).abs() < 1e-12);
    }

    #[test]
    fn signed_distances_have_expected_signs() {
        assert!(signed_distance(&cyl(), Vec3::new(3.0, 0.0, 0.0)) > 0.0);
        assert!(signed_distance(&cyl(), Vec3::new(1.0, 0.0, 0.0)) < 0.0);
        let sph = Surface::Sphere { center: Vec3::ZERO, radius: 1.0 };
        assert!((signed_distance(&sph, Vec3::new(0.0, 0.0, 3.0)) - 2.0).abs() < 1e-12);
        let tor = Surface::Torus {
            center: Vec3::ZERO,
            axis_dir: Z,
            major_radius: 5.0,
            minor_radius: 1.0,
        };
        assert!((signed_distance(&tor, Vec3::new(5.0, 0.0, 0.0)) + 1.0).abs() < 1e-12);
        assert!((signed_distance(&tor, Vec3::new(7.0, 0.0, 0.0)) - 1.0).abs() < 1e-12);
        assert!(signed_distance(&tor, Vec3::new(6.0, 0.0, 0.0)).abs() < 1e-12);
    }

    #[test]
    fn uv_roundtrip_on_each_surface() {
        let surfaces = vec![
            Surface::Plane { origin: Vec3::new(1.0, 2.0, 3.0), normal: Z },
            cyl(),
            Surface::Cone {
                apex: Vec3::new(0.0, 0.0, -1.0),
                axis_dir: Z,
                half_angle: 0.4,
            },
            Surface::Sphere { center: Vec3::new(1.0, 0.0, 0.0), radius: 3.0 },
            Surface::Torus {
                center: Vec3::ZERO,
                axis_dir: Vec3::new(0.0, 1.0, 0.0),
                major_radius: 6.0,
                minor_radius: 2.0,
            },
        ];
        let uvs = [[0.3, 1.7], [2.9, 0.4], [5.5, 2.0]];
        for s in &surfaces {
            for uv in uvs {
                let p = point_at(s, uv);
                assert!(surface_distance(s, p) < 1e-9, "{s:?} {uv:?}");
                let back = uv_of(s, p);
                let q = point_at(s, back);
                assert!(p.approx_eq(q, 1e-9), "{s:?} {uv:?} {back:?}");
            }
        }
    }

    #[test]
    fn projection_lands_on_surface() {
        let surfaces = vec![
            cyl(),
            Surface::Cone { apex: Vec3::ZERO, axis_dir: Z, half_angle: 0.5 },
            Surface::Sphere { center: Vec3::ZERO, radius: 2.0 },
            Surface::Torus {
                center: Vec3::ZERO,
                axis_dir: Z,
                major_radius: 4.0,
                minor_radius: 1.0,
            },
        ];
        let pts = [
            Vec3::new(1.3, 2.2, 0.7),
            Vec3::new(-3.0, 0.4, 2.0),
            Vec3::new(0.2, -5.0, -1.0),
        ];
        for s in &surfaces {
            for p in pts {
                let q = project_point(s, p);
                assert!(surface_distance(s, q) < 1e-9, "{s:?} {p:?} -> {q:?}");
            }
        }
    }

    #[test]
    fn ray_hits_cylinder_both_sides() {
        let hits = ray_hits(
            &cyl(),
            Vec3::new(-5.0, 0.0, 1.0),
            Vec3::new(1.0, 0.0, 0.0),
            1e-9,
            100.0,
        );
        assert_eq!(hits.len(), 2);
        assert!((hits[0] - 3.0).abs() < 1e-9 && (hits[1] - 7.0).abs() < 1e-9);
    }

    #[test]
    fn ray_hits_cone_respects_nappe() {
        let cone = Surface::Cone {
            apex: Vec3::ZERO,
            axis_dir: Z,
            half_angle: std::f64::consts::FRAC_PI_4,
        };
        // Horizontal ray at height 2: cone radius there is 2.
        let hits = ray_hits(
            &cone,
            Vec3::new(-10.0, 0.0, 2.0),
            Vec3::new(1.0, 0.0, 0.0),
            1e-9,
            100.0,
        );
        assert_eq!(hits.len(), 2);
        assert!((hits[0] - 8.0).abs() < 1e-9 && (hits[1] - 12.0).abs() < 1e-9);
        // Same ray below the apex: only the mirror nappe there, so no hits.
        let none = ray_hits(
            &cone,
            Vec3::new(-10.0, 0.0, -2.0),
            Vec3::new(1.0, 0.0, 0.0),
            1e-9,
            100.0,
        );
        assert!(none.is_empty());
    }

    #[test]
    fn ray_hits_torus_four_crossings() {
        // Major 5, minor 1, axis z: a diametral ray in the mid-plane crosses
        // the tube at distances 4 and 6 on both sides: x = -6,-4,4,6.
        let tor = Surface::Torus {
            center: Vec3::ZERO,
            axis_dir: Z,
            major_radius: 5.0,
            minor_radius: 1.0,
        };
        let hits = ray_hits(
            &tor,
            Vec3::new(-10.0, 0.0, 0.0),
            Vec3::new(1.0, 0.0, 0.0),
            1e-9,
            100.0,
        );
        assert_eq!(hits.len(), 4, "{hits:?}");
        for (h, expect) in hits.iter().zip([4.0, 6.0, 14.0, 16.0]) {
            assert!((h - expect).abs() < 1e-6, "{hits:?}");
        }
    }

    #[test]
    fn plane_ray_single_hit() {
        let plane = Surface::Plane { origin: Vec3::new(0.0, 0.0, 4.0), normal: Z };
        let hits = ray_hits(&plane, Vec3::ZERO, Z, 1e-9, 100.0);
        assert_eq!(hits, vec![4.0]);
        let misses = ray_hits(&plane, Vec3::ZERO, Vec3::new(1.0, 0.0, 0.0), 1e-9, 100.0);
        assert!(misses.is_empty());
    }
}
