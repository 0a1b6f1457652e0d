//! Parametric stock shapes and the fixed fixture suite. Every fixture is a
//! watertight analytic model paired with the ground-truth labels it was
//! designed to carry.

use super::builder::{ModelBuilder, PathSeg};
use super::{apply_feature, Placement, SynthError, SynthesizedModel, TruthEntry};
use crate::brep::{FaceId, LoopKind, Model, Surface};
use crate::features::FeatureKind;
use crate::math::Vec3;
use std::collections::BTreeMap;

const X: Vec3 = Vec3 { x: 1.0, y: 0.0, z: 0.0 };
const Y: Vec3 = Vec3 { x: 0.0, y: 1.0, z: 0.0 };
const Z: Vec3 = Vec3 { x: 0.0, y: 0.0, z: 1.0 };

fn v(x: f64, y: f64, z: f64) -> Vec3 {
    Vec3::new(x, y, z)
}

/// Handle to the distinguished face of a cuboid stock block that the
/// fixtures place features on.
struct BlockFaces {
    top: FaceId,
}

/// Axis-aligned block [0,dx] x [0,dy] x [0,dz] with outward-facing planes.
fn cuboid_builder(dx: f64, dy: f64, dz: f64) -> (ModelBuilder, BlockFaces) {
    let mut b = ModelBuilder::new();
    let bottom_loop = b.rect_loop([v(0.0, 0.0, 0.0), v(dx, 0.0, 0.0), v(dx, dy, 0.0), v(0.0, dy, 0.0)]);
    b.face(
        Surface::Plane { origin: v(0.0, 0.0, 0.0), normal: -Z },
        true,
        vec![(LoopKind::Outer, bottom_loop)],
    );
    let front_loop = b.rect_loop([v(0.0, 0.0, 0.0), v(dx, 0.0, 0.0), v(dx, 0.0, dz), v(0.0, 0.0, dz)]);
    b.face(
        Surface::Plane { origin: v(0.0, 0.0, dz), normal: -Y },
        true,
        vec![(LoopKind::Outer, front_loop)],
    );
    let right_loop = b.rect_loop([v(dx, 0.0, 0.0), v(dx, dy, 0.0), v(dx, dy, dz), v(dx, 0.0, dz)]);
    b.face(
        Surface::Plane { origin: v(dx, 0.0, dz), normal: X },
        true,
        vec![(LoopKind::Outer, right_loop)],
    );
    let back_loop = b.rect_loop([v(0.0, dy, 0.0), v(dx, dy, 0.0), v(dx, dy, dz), v(0.0, dy, dz)]);
    b.face(
        Surface::Plane { origin: v(0.0, dy, dz), normal: Y },
        true,
        vec![(LoopKind::Outer, back_loop)],
    );
    let left_loop = b.rect_loop([v(0.0, 0.0, 0.0), v(0.0, dy, 0.0), v(0.0, dy, dz), v(0.0, 0.0, dz)]);
    b.face(
        Surface::Plane { origin: v(0.0, 0.0, dz), normal: -X },
        true,
        vec![(LoopKind::Outer, left_loop)],
    );
    let top_loop = b.rect_loop([v(0.0, 0.0, dz), v(dx, 0.0, dz), v(dx, dy, dz), v(0.0, dy, dz)]);
    let top = b.face(
        Surface::Plane { origin: v(0.0, 0.0, dz), normal: Z },
        true,
        vec![(LoopKind::Outer, top_loop)],
    );
    (b, BlockFaces { top })
}

/// Plain rectangular stock block.
pub fn cuboid_stock(dx: f64, dy: f64, dz: f64) -> Model {
    cuboid_builder(dx, dy, dz).0.finish().expect("stock block is watertight")
}

/// Upright cylinder of revolution: bottom cap, lateral wall, top cap.
fn rotational_builder(radius: f64, height: f64) -> (ModelBuilder, FaceId, FaceId, FaceId) {
    let mut b = ModelBuilder::new();
    let seam_b = v(radius, 0.0, 0.0);
    let seam_t = v(radius, 0.0, height);
    let c_b = v(0.0, 0.0, 0.0);
    let c_t = v(0.0, 0.0, height);
    let bottom_loop = vec![b.full_circle(seam_b, c_b, Z)];
    let bottom = b.face(
        Surface::Plane { origin: c_b, normal: -Z },
        true,
        vec![(LoopKind::Outer, bottom_loop)],
    );
    let band = b.band_loop(seam_b, seam_t, c_b, c_t, Z);
    let wall = b.face(
        Surface::Cylinder { axis_origin: c_b, axis_dir: Z, radius },
        true,
        vec![(LoopKind::Outer, band)],
    );
    let top_loop = vec![b.full_circle(seam_t, c_t, Z)];
    let top = b.face(
        Surface::Plane { origin: c_t, normal: Z },
        true,
        vec![(LoopKind::Outer, top_loop)],
    );
    (b, bottom, wall, top)
}

/// Plain turned stock: a solid cylinder.
pub fn rotational_stock(radius: f64, height: f64) -> Model {
    rotational_builder(radius, height).0.finish().expect("turned stock is watertight")
}

/// One boundary segment of an extruded profile drawn in the xz plane.
#[derive(Clone, Copy)]
enum ProfileSeg {
    Line { to: [f64; 2] },
    /// Circular blend; `ccw` is the traversal direction in the standard
    /// view (x right, z up), which also decides whether material lies
    /// inside the circle.
    Arc { to: [f64; 2], center: [f64; 2], ccw: bool },
}

/// Extrude a closed counterclockwise profile (material inside) along +y.
/// Returns one face per profile segment in order, then the y=0 and y=dy
/// caps.
fn extrude_profile(
    start: [f64; 2],
    segs: &[ProfileSeg],
    dy: f64,
) -> (ModelBuilder, Vec<FaceId>, FaceId, FaceId) {
    let mut b = ModelBuilder::new();
    let at = |q: [f64; 2], yy: f64| v(q[0], yy, q[1]);
    let mut sides = Vec::with_capacity(segs.len());
    let mut front_path: Vec<PathSeg> = Vec::with_capacity(segs.len());
    let mut back_path: Vec<PathSeg> = Vec::with_capacity(segs.len());
    let mut cur = start;
    for seg in segs {
        match *seg {
            ProfileSeg::Line { to } => {
                let (a0, b0) = (at(cur, 0.0), at(to, 0.0));
                let (a1, b1) = (at(cur, dy), at(to, dy));
                let e0 = b.line(a0, b0);
                let up = b.line(b0, b1);
                let e1 = b.line(b1, a1);
                let down = b.line(a1, a0);
                let d = [to[0] - cur[0], to[1] - cur[1]];
                let len = (d[0] * d[0] + d[1] * d[1]).sqrt();
                let normal = v(d[1] / len, 0.0, -d[0] / len);
                sides.push(b.face(
                    Surface::Plane { origin: a0, normal },
                    true,
                    vec![(LoopKind::Outer, vec![e0, up, e1, down])],
                ));
                front_path.push(PathSeg::line(b0));
                back_path.push(PathSeg::line(b1));
                cur = to;
            }
            ProfileSeg::Arc { to, center, ccw } => {
                // Counterclockwise in the xz view is a rotation about -y.
                let axis = if ccw { -Y } else { Y };
                let (a0, b0) = (at(cur, 0.0), at(to, 0.0));
                let (a1, b1) = (at(cur, dy), at(to, dy));
                let (c0, c1) = (at(center, 0.0), at(center, dy));
                let e0 = b.arc(a0, b0, c0, axis);
                let up = b.line(b0, b1);
                let e1 = b.arc(b1, a1, c1, -axis);
                let down = b.line(a1, a0);
                let dx = cur[0] - center[0];
                let dz = cur[1] - center[1];
                let radius = (dx * dx + dz * dz).sqrt();
                sides.push(b.face(
                    Surface::Cylinder { axis_origin: c0, axis_dir: Y, radius },
                    ccw,
                    vec![(LoopKind::Outer, vec![e0, up, e1, down])],
                ));
                front_path.push(PathSeg::arc(b0, c0, axis));
                back_path.push(PathSeg::arc(b1, c1, axis));
                cur = to;
            }
        }
    }
    assert_eq!(cur, start, "profile must close");
    let front_loop = b.path_loop(at(start, 0.0), &front_path);
    let front = b.face(
        Surface::Plane { origin: at(start, 0.0), normal: -Y },
        true,
        vec![(LoopKind::Outer, front_loop)],
    );
    let back_loop = b.path_loop(at(start, dy), &back_path);
    let back = b.face(
        Surface::Plane { origin: at(start, dy), normal: Y },
        true,
        vec![(LoopKind::Outer, back_loop)],
    );
    (b, sides, front, back)
}

fn named(
    name: &str,
    description: &str,
    model: Model,
    truth: Vec<TruthEntry>,
    pinned_misrecognition: bool,
) -> SynthesizedModel {
    SynthesizedModel {
        name: name.to_string(),
        description: description.to_string(),
        model,
        truth,
        pinned_misrecognition,
    }
}

fn check_range(value: f64, lo: f64, hi: f64, what: &str) -> Result<(), SynthError> {
    if value.is_finite() && value > lo && value < hi {
        Ok(())
    } else {
        Err(SynthError::Parameter(format!(
            "{what} must lie strictly between {lo} and {hi}, got {value}"
        )))
    }
}

/// Through hole drilled as one full tube with a parameterization seam.
pub fn hole_one_cylinder(radius: f64) -> Result<SynthesizedModel, SynthError> {
    let (b, faces) = cuboid_builder(20.0, 20.0, 10.0);
    let applied = apply_feature(
        b.finish()?,
        &Placement::ThroughHole { face: faces.top, center: [10.0, 10.0], radius, two_halves: false },
    )?;
    Ok(named(
        "hole_one_cylinder",
        "Block with a vertical through hole whose wall is a single cylindrical face.",
        applied.model,
        applied.entries,
        false,
    ))
}

/// The same through hole with its wall split into two half tubes.
pub fn hole_two_half_cylinders(radius: f64) -> Result<SynthesizedModel, SynthError> {
    let (b, faces) = cuboid_builder(20.0, 20.0, 10.0);
    let applied = apply_feature(
        b.finish()?,
        &Placement::ThroughHole { face: faces.top, center: [10.0, 10.0], radius, two_halves: true },
    )?;
    Ok(named(
        "hole_two_half_cylinders",
        "Block with a vertical through hole whose wall is split into two half cylinders.",
        applied.model,
        applied.entries,
        false,
    ))
}

/// Counterbored hole whose wide bore breaks out of one side wall, splitting
/// the bore wall in two and notching the side and top faces.
pub fn counterbore_breakout() -> Result<SynthesizedModel, SynthError> {
    let (dx, dy, dz): (f64, f64, f64) = (20.0, 20.0, 12.0);
    let (cx, cy): (f64, f64) = (10.0, 16.0);
    let br: f64 = 6.0; // counterbore radius, breaks out of y = dy
    let hr: f64 = 3.0; // through-hole radius
    let z_mid: f64 = 6.0;
    let w = (br * br - (dy - cy) * (dy - cy)).sqrt();

    let mut b = ModelBuilder::new();
    let pa_top = v(cx + w, dy, dz);
    let pb_top = v(cx - w, dy, dz);
    let pa_mid = v(cx + w, dy, z_mid);
    let pb_mid = v(cx - w, dy, z_mid);
    let s_top = v(cx, cy - br, dz);
    let s_mid = v(cx, cy - br, z_mid);
    let c_top = v(cx, cy, dz);
    let c_mid = v(cx, cy, z_mid);
    let c_bot = v(cx, cy, 0.0);
    let q0_mid = v(cx + hr, cy, z_mid);
    let q1_mid = v(cx - hr, cy, z_mid);
    let q0_bot = v(cx + hr, cy, 0.0);
    let q1_bot = v(cx - hr, cy, 0.0);

    // 1: bottom, pierced by the small hole (two half rims).
    let bottom_outer =
        b.rect_loop([v(0.0, 0.0, 0.0), v(dx, 0.0, 0.0), v(dx, dy, 0.0), v(0.0, dy, 0.0)]);
    let r1 = b.arc(q0_bot, q1_bot, c_bot, Z);
    let r2 = b.arc(q1_bot, q0_bot, c_bot, Z);
    b.face(
        Surface::Plane { origin: v(0.0, 0.0, 0.0), normal: -Z },
        true,
        vec![(LoopKind::Outer, bottom_outer), (LoopKind::Inner, vec![r1, r2])],
    );
    // 2-4: intact side walls.
    let front_loop = b.rect_loop([v(0.0, 0.0, 0.0), v(dx, 0.0, 0.0), v(dx, 0.0, dz), v(0.0, 0.0, dz)]);
    b.face(
        Surface::Plane { origin: v(0.0, 0.0, dz), normal: -Y },
        true,
        vec![(LoopKind::Outer, front_loop)],
    );
    let right_loop = b.rect_loop([v(dx, 0.0, 0.0), v(dx, dy, 0.0), v(dx, dy, dz), v(dx, 0.0, dz)]);
    b.face(
        Surface::Plane { origin: v(dx, 0.0, dz), normal: X },
        true,
        vec![(LoopKind::Outer, right_loop)],
    );
    let left_loop = b.rect_loop([v(0.0, 0.0, 0.0), v(0.0, dy, 0.0), v(0.0, dy, dz), v(0.0, 0.0, dz)]);
    b.face(
        Surface::Plane { origin: v(0.0, 0.0, dz), normal: -X },
        true,
        vec![(LoopKind::Outer, left_loop)],
    );
    // 5: breakout side wall with a rectangular notch.
    let side_loop = b.path_loop(
        v(0.0, dy, 0.0),
        &[
            PathSeg::line(v(dx, dy, 0.0)),
            PathSeg::line(v(dx, dy, dz)),
            PathSeg::line(pa_top),
            PathSeg::line(pa_mid),
            PathSeg::line(pb_mid),
            PathSeg::line(pb_top),
            PathSeg::line(v(0.0, dy, dz)),
            PathSeg::line(v(0.0, dy, 0.0)),
        ],
    );
    b.face(
        Surface::Plane { origin: v(0.0, dy, dz), normal: Y },
        true,
        vec![(LoopKind::Outer, side_loop)],
    );
    // 6: top with the bore opening notched into its boundary.
    let top_loop = b.path_loop(
        v(0.0, 0.0, dz),
        &[
            PathSeg::line(v(dx, 0.0, dz)),
            PathSeg::line(v(dx, dy, dz)),
            PathSeg::line(pa_top),
            PathSeg::arc(s_top, c_top, -Z),
            PathSeg::arc(pb_top, c_top, -Z),
            PathSeg::line(v(0.0, dy, dz)),
            PathSeg::line(v(0.0, 0.0, dz)),
        ],
    );
    b.face(
        Surface::Plane { origin: v(0.0, 0.0, dz), normal: Z },
        true,
        vec![(LoopKind::Outer, top_loop)],
    );
    // 7: counterbore seat, an annulus clipped by the breakout chord.
    let seat_outer = b.path_loop(
        pb_mid,
        &[PathSeg::arc(s_mid, c_mid, Z), PathSeg::arc(pa_mid, c_mid, Z), PathSeg::line(pb_mid)],
    );
    let i1 = b.arc(q0_mid, q1_mid, c_mid, Z);
    let i2 = b.arc(q1_mid, q0_mid, c_mid, Z);
    let annulus = b.face(
        Surface::Plane { origin: c_mid, normal: Z },
        true,
        vec![(LoopKind::Outer, seat_outer), (LoopKind::Inner, vec![i1, i2])],
    );
    // 8-9: the two bore wall pieces either side of the breakout.
    let bore_surface = Surface::Cylinder { axis_origin: c_bot, axis_dir: Z, radius: br };
    let a_bot = b.arc(pb_mid, s_mid, c_mid, Z);
    let a_up = b.line(s_mid, s_top);
    let a_top = b.arc(s_top, pb_top, c_top, -Z);
    let a_down = b.line(pb_top, pb_mid);
    let piece_a = b.face(
        bore_surface,
        false,
        vec![(LoopKind::Outer, vec![a_bot, a_up, a_top, a_down])],
    );
    let b_bot = b.arc(s_mid, pa_mid, c_mid, Z);
    let b_up = b.line(pa_mid, pa_top);
    let b_top = b.arc(pa_top, s_top, c_top, -Z);
    let b_down = b.line(s_top, s_mid);
    let piece_b = b.face(
        bore_surface,
        false,
        vec![(LoopKind::Outer, vec![b_bot, b_up, b_top, b_down])],
    );
    // 10-11: small hole wall as two half tubes.
    let tube_surface = Surface::Cylinder { axis_origin: c_bot, axis_dir: Z, radius: hr };
    let ta_bot = b.arc(q0_bot, q1_bot, c_bot, Z);
    let ta_up = b.line(q1_bot, q1_mid);
    let ta_top = b.arc(q1_mid, q0_mid, c_mid, -Z);
    let ta_down = b.line(q0_mid, q0_bot);
    let tube_a = b.face(
        tube_surface,
        false,
        vec![(LoopKind::Outer, vec![ta_bot, ta_up, ta_top, ta_down])],
    );
    let tb_bot = b.arc(q1_bot, q0_bot, c_bot, Z);
    let tb_up = b.line(q0_bot, q0_mid);
    let tb_top = b.arc(q0_mid, q1_mid, c_mid, -Z);
    let tb_down = b.line(q1_mid, q1_bot);
    let tube_b = b.face(
        tube_surface,
        false,
        vec![(LoopKind::Outer, vec![tb_bot, tb_up, tb_top, tb_down])],
    );

    let truth = vec![TruthEntry {
        feature: FeatureKind::CounterboreHole,
        base_face: annulus,
        members: vec![annulus, piece_a, piece_b, tube_a, tube_b],
    }];
    Ok(named(
        "counterbore_breakout",
        "Counterbored hole whose wide bore breaks out of a side wall; the bore wall is split in two and the small hole wall into halves.",
        b.finish()?,
        truth,
        false,
    ))
}

/// Countersunk through hole: conical sink into a smaller through bore.
pub fn countersink_block(
    mouth_radius: f64,
    hole_radius: f64,
    sink_depth: f64,
) -> Result<SynthesizedModel, SynthError> {
    let (b, faces) = cuboid_builder(20.0, 20.0, 10.0);
    let applied = apply_feature(
        b.finish()?,
        &Placement::Countersink {
            face: faces.top,
            center: [10.0, 10.0],
            mouth_radius,
            hole_radius,
            sink_depth,
        },
    )?;
    Ok(named(
        "countersink_block",
        "Block with a countersunk through hole.",
        applied.model,
        applied.entries,
        false,
    ))
}

/// Counterdrilled hole: straight bore, conical transition, through bore.
pub fn counterdrilled_block(
    bore_radius: f64,
    bore_depth: f64,
    cone_depth: f64,
    hole_radius: f64,
) -> Result<SynthesizedModel, SynthError> {
    let (b, faces) = cuboid_builder(20.0, 20.0, 12.0);
    let applied = apply_feature(
        b.finish()?,
        &Placement::Counterdrilled {
            face: faces.top,
            center: [10.0, 10.0],
            bore_radius,
            bore_depth,
            cone_depth,
            hole_radius,
        },
    )?;
    Ok(named(
        "counterdrilled_block",
        "Block with a counterdrilled hole: bore, conical shoulder, then a through bore.",
        applied.model,
        applied.entries,
        false,
    ))
}

/// Plain counterbore in the middle of a block (no breakout).
pub fn counterbore_block(
    bore_radius: f64,
    bore_depth: f64,
    hole_radius: f64,
) -> Result<SynthesizedModel, SynthError> {
    let (b, faces) = cuboid_builder(20.0, 20.0, 12.0);
    let applied = apply_feature(
        b.finish()?,
        &Placement::Counterbore {
            face: faces.top,
            center: [10.0, 10.0],
            bore_radius,
            bore_depth,
            hole_radius,
        },
    )?;
    Ok(named(
        "counterbore_block",
        "Block with a centered counterbored through hole.",
        applied.model,
        applied.entries,
        false,
    ))
}

/// Tapered through hole.
pub fn taper_through(top_radius: f64, bottom_radius: f64) -> Result<SynthesizedModel, SynthError> {
    let (b, faces) = cuboid_builder(20.0, 20.0, 10.0);
    let applied = apply_feature(
        b.finish()?,
        &Placement::TaperHole { face: faces.top, center: [10.0, 10.0], top_radius, bottom_radius },
    )?;
    Ok(named(
        "taper_through",
        "Block with a conical through hole that narrows toward the bottom.",
        applied.model,
        applied.entries,
        false,
    ))
}

/// Blind hole: tube plus a flat floor disc.
pub fn hole_blind(radius: f64, depth: f64) -> Result<SynthesizedModel, SynthError> {
    check_range(depth, 0.0, 10.0, "depth")?;
    let (b, faces) = cuboid_builder(20.0, 20.0, 10.0);
    let applied = apply_feature(
        b.finish()?,
        &Placement::BlindHole { face: faces.top, center: [10.0, 10.0], radius, depth },
    )?;
    Ok(named(
        "hole_blind",
        "Block with a blind hole: cylindrical wall and a flat floor.",
        applied.model,
        applied.entries,
        false,
    ))
}

/// Through hole with a chamfered mouth. Geometrically a shallow countersink,
/// but designed so the conical lip reads as a chamfer.
pub fn hole_chamfered(radius: f64, size: f64) -> Result<SynthesizedModel, SynthError> {
    check_range(size, 0.0, 10.0, "size")?;
    let (b, faces) = cuboid_builder(20.0, 20.0, 10.0);
    let applied = apply_feature(
        b.finish()?,
        &Placement::Countersink {
            face: faces.top,
            center: [10.0, 10.0],
            mouth_radius: radius + size,
            hole_radius: radius,
            sink_depth: size,
        },
    )?;
    let cone = applied.entries[0].base_face;
    let tube = applied.entries[0].members[1];
    let truth = vec![
        TruthEntry { feature: FeatureKind::SimpleHole, base_face: tube, members: vec![tube] },
        TruthEntry { feature: FeatureKind::InnerChamfer, base_face: cone, members: vec![cone] },
    ];
    Ok(named(
        "hole_chamfered",
        "Block with a through hole whose mouth is broken by a narrow 45-degree cone.",
        applied.model,
        truth,
        false,
    ))
}

/// Rectangular slot cut through the part along y.
pub fn slot_through(width: f64, depth: f64) -> Result<SynthesizedModel, SynthError> {
    check_range(width, 0.0, 28.0, "width")?;
    check_range(depth, 0.0, 10.0, "depth")?;
    let x0 = 15.0 - width / 2.0;
    let x1 = 15.0 + width / 2.0;
    let zf = 10.0 - depth;
    let segs = [
        ProfileSeg::Line { to: [30.0, 0.0] },
        ProfileSeg::Line { to: [30.0, 10.0] },
        ProfileSeg::Line { to: [x1, 10.0] },
        ProfileSeg::Line { to: [x1, zf] },
        ProfileSeg::Line { to: [x0, zf] },
        ProfileSeg::Line { to: [x0, 10.0] },
        ProfileSeg::Line { to: [0.0, 10.0] },
        ProfileSeg::Line { to: [0.0, 0.0] },
    ];
    let (b, sides, _, _) = extrude_profile([0.0, 0.0], &segs, 20.0);
    let (wall_hi, floor, wall_lo) = (sides[3], sides[4], sides[5]);
    let truth = vec![TruthEntry {
        feature: FeatureKind::SimpleSlot,
        base_face: floor,
        members: vec![floor, wall_lo, wall_hi],
    }];
    Ok(named(
        "slot_through",
        "Block with a rectangular slot running all the way through along y.",
        b.finish()?,
        truth,
        false,
    ))
}

/// V-shaped groove through the part: two slanted walls, no floor.
pub fn vee_slot(width: f64, depth: f64) -> Result<SynthesizedModel, SynthError> {
    check_range(width, 0.0, 28.0, "width")?;
    check_range(depth, 0.0, 10.0, "depth")?;
    let x0 = 15.0 - width / 2.0;
    let x1 = 15.0 + width / 2.0;
    let za = 10.0 - depth;
    let segs = [
        ProfileSeg::Line { to: [30.0, 0.0] },
        ProfileSeg::Line { to: [30.0, 10.0] },
        ProfileSeg::Line { to: [x1, 10.0] },
        ProfileSeg::Line { to: [15.0, za] },
        ProfileSeg::Line { to: [x0, 10.0] },
        ProfileSeg::Line { to: [0.0, 10.0] },
        ProfileSeg::Line { to: [0.0, 0.0] },
    ];
    let (b, sides, _, _) = extrude_profile([0.0, 0.0], &segs, 20.0);
    let (wall_hi, wall_lo) = (sides[3], sides[4]);
    let truth = vec![
        TruthEntry {
            feature: FeatureKind::FloorlessSlot,
            base_face: wall_hi,
            members: vec![wall_hi, wall_lo],
        },
        TruthEntry {
            feature: FeatureKind::FloorlessSlot,
            base_face: wall_lo,
            members: vec![wall_hi, wall_lo],
        },
    ];
    Ok(named(
        "vee_slot",
        "Block with a V-shaped groove through it; the two slanted walls meet at a valley line.",
        b.finish()?,
        truth,
        false,
    ))
}

/// Closed rectangular pocket sunk into the top face.
pub fn pocket_closed(depth: f64) -> Result<SynthesizedModel, SynthError> {
    check_range(depth, 0.0, 10.0, "depth")?;
    let (b, faces) = cuboid_builder(30.0, 30.0, 10.0);
    let applied = apply_feature(
        b.finish()?,
        &Placement::ClosedPocket { face: faces.top, min: [8.0, 10.0], max: [22.0, 20.0], depth },
    )?;
    Ok(named(
        "pocket_closed",
        "Block with a rectangular pocket fully surrounded by material.",
        applied.model,
        applied.entries,
        false,
    ))
}

/// Rectangular pocket that opens out of the y=0 side: three walls only.
pub fn pocket_opened(depth: f64) -> Result<SynthesizedModel, SynthError> {
    check_range(depth, 0.0, 10.0, "depth")?;
    let zf = 10.0 - depth;
    let mut b = ModelBuilder::new();
    let bottom_loop =
        b.rect_loop([v(0.0, 0.0, 0.0), v(30.0, 0.0, 0.0), v(30.0, 20.0, 0.0), v(0.0, 20.0, 0.0)]);
    b.face(
        Surface::Plane { origin: v(0.0, 0.0, 0.0), normal: -Z },
        true,
        vec![(LoopKind::Outer, bottom_loop)],
    );
    let front_loop = b.path_loop(
        v(0.0, 0.0, 0.0),
        &[
            PathSeg::line(v(30.0, 0.0, 0.0)),
            PathSeg::line(v(30.0, 0.0, 10.0)),
            PathSeg::line(v(21.0, 0.0, 10.0)),
            PathSeg::line(v(21.0, 0.0, zf)),
            PathSeg::line(v(9.0, 0.0, zf)),
            PathSeg::line(v(9.0, 0.0, 10.0)),
            PathSeg::line(v(0.0, 0.0, 10.0)),
            PathSeg::line(v(0.0, 0.0, 0.0)),
        ],
    );
    b.face(
        Surface::Plane { origin: v(0.0, 0.0, 10.0), normal: -Y },
        true,
        vec![(LoopKind::Outer, front_loop)],
    );
    let right_loop =
        b.rect_loop([v(30.0, 0.0, 0.0), v(30.0, 20.0, 0.0), v(30.0, 20.0, 10.0), v(30.0, 0.0, 10.0)]);
    b.face(
        Surface::Plane { origin: v(30.0, 0.0, 10.0), normal: X },
        true,
        vec![(LoopKind::Outer, right_loop)],
    );
    let back_loop =
        b.rect_loop([v(0.0, 20.0, 0.0), v(30.0, 20.0, 0.0), v(30.0, 20.0, 10.0), v(0.0, 20.0, 10.0)]);
    b.face(
        Surface::Plane { origin: v(0.0, 20.0, 10.0), normal: Y },
        true,
        vec![(LoopKind::Outer, back_loop)],
    );
    let left_loop =
        b.rect_loop([v(0.0, 0.0, 0.0), v(0.0, 20.0, 0.0), v(0.0, 20.0, 10.0), v(0.0, 0.0, 10.0)]);
    b.face(
        Surface::Plane { origin: v(0.0, 0.0, 10.0), normal: -X },
        true,
        vec![(LoopKind::Outer, left_loop)],
    );
    let top_loop = b.path_loop(
        v(0.0, 0.0, 10.0),
        &[
            PathSeg::line(v(9.0, 0.0, 10.0)),
            PathSeg::line(v(9.0, 12.0, 10.0)),
            PathSeg::line(v(21.0, 12.0, 10.0)),
            PathSeg::line(v(21.0, 0.0, 10.0)),
            PathSeg::line(v(30.0, 0.0, 10.0)),
            PathSeg::line(v(30.0, 20.0, 10.0)),
            PathSeg::line(v(0.0, 20.0, 10.0)),
            PathSeg::line(v(0.0, 0.0, 10.0)),
        ],
    );
    b.face(
        Surface::Plane { origin: v(0.0, 0.0, 10.0), normal: Z },
        true,
        vec![(LoopKind::Outer, top_loop)],
    );
    let floor_loop =
        b.rect_loop([v(9.0, 0.0, zf), v(21.0, 0.0, zf), v(21.0, 12.0, zf), v(9.0, 12.0, zf)]);
    let floor = b.face(
        Surface::Plane { origin: v(9.0, 0.0, zf), normal: Z },
        true,
        vec![(LoopKind::Outer, floor_loop)],
    );
    let w_lo_loop =
        b.rect_loop([v(9.0, 0.0, zf), v(9.0, 12.0, zf), v(9.0, 12.0, 10.0), v(9.0, 0.0, 10.0)]);
    let wall_lo = b.face(
        Surface::Plane { origin: v(9.0, 0.0, zf), normal: X },
        true,
        vec![(LoopKind::Outer, w_lo_loop)],
    );
    let w_hi_loop =
        b.rect_loop([v(21.0, 0.0, zf), v(21.0, 12.0, zf), v(21.0, 12.0, 10.0), v(21.0, 0.0, 10.0)]);
    let wall_hi = b.face(
        Surface::Plane { origin: v(21.0, 0.0, zf), normal: -X },
        true,
        vec![(LoopKind::Outer, w_hi_loop)],
    );
    let w_back_loop =
        b.rect_loop([v(9.0, 12.0, zf), v(21.0, 12.0, zf), v(21.0, 12.0, 10.0), v(9.0, 12.0, 10.0)]);
    let wall_back = b.face(
        Surface::Plane { origin: v(9.0, 12.0, zf), normal: -Y },
        true,
        vec![(LoopKind::Outer, w_back_loop)],
    );
    let truth = vec![TruthEntry {
        feature: FeatureKind::OpenedPocket,
        base_face: floor,
        members: vec![floor, wall_lo, wall_hi, wall_back],
    }];
    Ok(named(
        "pocket_opened",
        "Block with a rectangular pocket that opens out of one side, leaving three walls.",
        b.finish()?,
        truth,
        false,
    ))
}

/// Four-sided pyramidal pit sunk into the top face, meeting at an apex.
pub fn pit_pyramid() -> Result<SynthesizedModel, SynthError> {
    let mut b = ModelBuilder::new();
    let apex = v(15.0, 10.0, 2.0);
    let r00 = v(13.0, 8.0, 10.0);
    let r10 = v(17.0, 8.0, 10.0);
    let r11 = v(17.0, 12.0, 10.0);
    let r01 = v(13.0, 12.0, 10.0);
    let bottom_loop =
        b.rect_loop([v(0.0, 0.0, 0.0), v(30.0, 0.0, 0.0), v(30.0, 20.0, 0.0), v(0.0, 20.0, 0.0)]);
    b.face(
        Surface::Plane { origin: v(0.0, 0.0, 0.0), normal: -Z },
        true,
        vec![(LoopKind::Outer, bottom_loop)],
    );
    let front_loop =
        b.rect_loop([v(0.0, 0.0, 0.0), v(30.0, 0.0, 0.0), v(30.0, 0.0, 10.0), v(0.0, 0.0, 10.0)]);
    b.face(
        Surface::Plane { origin: v(0.0, 0.0, 10.0), normal: -Y },
        true,
        vec![(LoopKind::Outer, front_loop)],
    );
    let right_loop =
        b.rect_loop([v(30.0, 0.0, 0.0), v(30.0, 20.0, 0.0), v(30.0, 20.0, 10.0), v(30.0, 0.0, 10.0)]);
    b.face(
        Surface::Plane { origin: v(30.0, 0.0, 10.0), normal: X },
        true,
        vec![(LoopKind::Outer, right_loop)],
    );
    let back_loop =
        b.rect_loop([v(0.0, 20.0, 0.0), v(30.0, 20.0, 0.0), v(30.0, 20.0, 10.0), v(0.0, 20.0, 10.0)]);
    b.face(
        Surface::Plane { origin: v(0.0, 20.0, 10.0), normal: Y },
        true,
        vec![(LoopKind::Outer, back_loop)],
    );
    let left_loop =
        b.rect_loop([v(0.0, 0.0, 0.0), v(0.0, 20.0, 0.0), v(0.0, 20.0, 10.0), v(0.0, 0.0, 10.0)]);
    b.face(
        Surface::Plane { origin: v(0.0, 0.0, 10.0), normal: -X },
        true,
        vec![(LoopKind::Outer, left_loop)],
    );
    let top_outer =
        b.rect_loop([v(0.0, 0.0, 10.0), v(30.0, 0.0, 10.0), v(30.0, 20.0, 10.0), v(0.0, 20.0, 10.0)]);
    let top_inner = b.rect_loop([r00, r10, r11, r01]);
    b.face(
        Surface::Plane { origin: v(0.0, 0.0, 10.0), normal: Z },
        true,
        vec![(LoopKind::Outer, top_outer), (LoopKind::Inner, top_inner)],
    );
    let mut wall = |a: Vec3, c: Vec3, normal: Vec3| {
        let lp = b.path_loop(a, &[PathSeg::line(c), PathSeg::line(apex), PathSeg::line(a)]);
        b.face(Surface::Plane { origin: a, normal }, true, vec![(LoopKind::Outer, lp)])
    };
    let n_base = (8.0f64 * 8.0 + 2.0 * 2.0).sqrt();
    let s = wall(r00, r10, v(0.0, 8.0 / n_base, 2.0 / n_base));
    let e = wall(r10, r11, v(-8.0 / n_base, 0.0, 2.0 / n_base));
    let n = wall(r11, r01, v(0.0, -8.0 / n_base, 2.0 / n_base));
    let w_ = wall(r01, r00, v(8.0 / n_base, 0.0, 2.0 / n_base));
    let members = vec![s, e, n, w_];
    let truth = members
        .iter()
        .map(|&f| TruthEntry {
            feature: FeatureKind::FloorlessPocket,
            base_face: f,
            members: members.clone(),
        })
        .collect();
    Ok(named(
        "pit_pyramid",
        "Block with a pyramidal pit: four triangular walls meeting at an apex below the surface.",
        b.finish()?,
        truth,
        false,
    ))
}

/// Closed pocket with a free-standing round island on its floor.
pub fn island_closed(radius: f64, height: f64) -> Result<SynthesizedModel, SynthError> {
    check_range(height, 0.0, 4.0, "height")?;
    let (b, faces) = cuboid_builder(30.0, 30.0, 10.0);
    let pocket = apply_feature(
        b.finish()?,
        &Placement::ClosedPocket { face: faces.top, min: [6.0, 6.0], max: [24.0, 24.0], depth: 4.0 },
    )?;
    let floor = pocket.entries[0].base_face;
    let island = apply_feature(
        pocket.model,
        &Placement::ClosedIsland { face: floor, center: [18.0, 12.0], radius, height },
    )?;
    let mut truth = pocket.entries;
    truth.extend(island.entries.clone());
    Ok(named(
        "island_closed",
        "Closed pocket with a cylindrical island standing free on its floor.",
        island.model,
        truth,
        false,
    ))
}

/// Opened pocket with a half-round island attached to its far wall.
pub fn island_attached(radius: f64) -> Result<SynthesizedModel, SynthError> {
    check_range(radius, 0.0, 5.9, "radius")?;
    let zf = 7.5;
    let zc = 9.5;
    let (px, py) = (21.0, 6.0);
    let mut b = ModelBuilder::new();
    let bottom_loop =
        b.rect_loop([v(0.0, 0.0, 0.0), v(30.0, 0.0, 0.0), v(30.0, 20.0, 0.0), v(0.0, 20.0, 0.0)]);
    b.face(
        Surface::Plane { origin: v(0.0, 0.0, 0.0), normal: -Z },
        true,
        vec![(LoopKind::Outer, bottom_loop)],
    );
    let front_loop = b.path_loop(
        v(0.0, 0.0, 0.0),
        &[
            PathSeg::line(v(30.0, 0.0, 0.0)),
            PathSeg::line(v(30.0, 0.0, 10.0)),
            PathSeg::line(v(21.0, 0.0, 10.0)),
            PathSeg::line(v(21.0, 0.0, zf)),
            PathSeg::line(v(9.0, 0.0, zf)),
            PathSeg::line(v(9.0, 0.0, 10.0)),
            PathSeg::line(v(0.0, 0.0, 10.0)),
            PathSeg::line(v(0.0, 0.0, 0.0)),
        ],
    );
    b.face(
        Surface::Plane { origin: v(0.0, 0.0, 10.0), normal: -Y },
        true,
        vec![(LoopKind::Outer, front_loop)],
    );
    let right_loop =
        b.rect_loop([v(30.0, 0.0, 0.0), v(30.0, 20.0, 0.0), v(30.0, 20.0, 10.0), v(30.0, 0.0, 10.0)]);
    b.face(
        Surface::Plane { origin: v(30.0, 0.0, 10.0), normal: X },
        true,
        vec![(LoopKind::Outer, right_loop)],
    );
    let back_loop =
        b.rect_loop([v(0.0, 20.0, 0.0), v(30.0, 20.0, 0.0), v(30.0, 20.0, 10.0), v(0.0, 20.0, 10.0)]);
    b.face(
        Surface::Plane { origin: v(0.0, 20.0, 10.0), normal: Y },
        true,
        vec![(LoopKind::Outer, back_loop)],
    );
    let left_loop =
        b.rect_loop([v(0.0, 0.0, 0.0), v(0.0, 20.0, 0.0), v(0.0, 20.0, 10.0), v(0.0, 0.0, 10.0)]);
    b.face(
        Surface::Plane { origin: v(0.0, 0.0, 10.0), normal: -X },
        true,
        vec![(LoopKind::Outer, left_loop)],
    );
    let top_loop = b.path_loop(
        v(0.0, 0.0, 10.0),
        &[
            PathSeg::line(v(9.0, 0.0, 10.0)),
            PathSeg::line(v(9.0, 12.0, 10.0)),
            PathSeg::line(v(21.0, 12.0, 10.0)),
            PathSeg::line(v(21.0, 0.0, 10.0)),
            PathSeg::line(v(30.0, 0.0, 10.0)),
            PathSeg::line(v(30.0, 20.0, 10.0)),
            PathSeg::line(v(0.0, 20.0, 10.0)),
            PathSeg::line(v(0.0, 0.0, 10.0)),
        ],
    );
    b.face(
        Surface::Plane { origin: v(0.0, 0.0, 10.0), normal: Z },
        true,
        vec![(LoopKind::Outer, top_loop)],
    );
    // Pocket floor with the island's half-disc bitten out of its wall edge.
    let floor_loop = b.path_loop(
        v(9.0, 0.0, zf),
        &[
            PathSeg::line(v(21.0, 0.0, zf)),
            PathSeg::line(v(21.0, py - radius, zf)),
            PathSeg::arc(v(21.0, py + radius, zf), v(px, py, zf), -Z),
            PathSeg::line(v(21.0, 12.0, zf)),
            PathSeg::line(v(9.0, 12.0, zf)),
            PathSeg::line(v(9.0, 0.0, zf)),
        ],
    );
    let floor = b.face(
        Surface::Plane { origin: v(9.0, 0.0, zf), normal: Z },
        true,
        vec![(LoopKind::Outer, floor_loop)],
    );
    let w_lo_loop =
        b.rect_loop([v(9.0, 0.0, zf), v(9.0, 12.0, zf), v(9.0, 12.0, 10.0), v(9.0, 0.0, 10.0)]);
    let wall_lo = b.face(
        Surface::Plane { origin: v(9.0, 0.0, zf), normal: X },
        true,
        vec![(LoopKind::Outer, w_lo_loop)],
    );
    let w_back_loop =
        b.rect_loop([v(9.0, 12.0, zf), v(21.0, 12.0, zf), v(21.0, 12.0, 10.0), v(9.0, 12.0, 10.0)]);
    let wall_back = b.face(
        Surface::Plane { origin: v(9.0, 12.0, zf), normal: -Y },
        true,
        vec![(LoopKind::Outer, w_back_loop)],
    );
    // Far wall with a notch where the island leans against it.
    let w_hi_loop = b.path_loop(
        v(21.0, 0.0, zf),
        &[
            PathSeg::line(v(21.0, py - radius, zf)),
            PathSeg::line(v(21.0, py - radius, zc)),
            PathSeg::line(v(21.0, py + radius, zc)),
            PathSeg::line(v(21.0, py + radius, zf)),
            PathSeg::line(v(21.0, 12.0, zf)),
            PathSeg::line(v(21.0, 12.0, 10.0)),
            PathSeg::line(v(21.0, 0.0, 10.0)),
            PathSeg::line(v(21.0, 0.0, zf)),
        ],
    );
    let wall_hi = b.face(
        Surface::Plane { origin: v(21.0, 0.0, zf), normal: -X },
        true,
        vec![(LoopKind::Outer, w_hi_loop)],
    );
    // Half-round pillar leaning on the far wall.
    let p_bot = b.arc(v(21.0, py - radius, zf), v(21.0, py + radius, zf), v(px, py, zf), -Z);
    let p_up = b.line(v(21.0, py + radius, zf), v(21.0, py + radius, zc));
    let p_top = b.arc(v(21.0, py + radius, zc), v(21.0, py - radius, zc), v(px, py, zc), Z);
    let p_down = b.line(v(21.0, py - radius, zc), v(21.0, py - radius, zf));
    let pillar = b.face(
        Surface::Cylinder { axis_origin: v(px, py, zf), axis_dir: Z, radius },
        true,
        vec![(LoopKind::Outer, vec![p_bot, p_up, p_top, p_down])],
    );
    let cap_arc = b.arc(v(21.0, py - radius, zc), v(21.0, py + radius, zc), v(px, py, zc), -Z);
    let cap_chord = b.line(v(21.0, py + radius, zc), v(21.0, py - radius, zc));
    let cap = b.face(
        Surface::Plane { origin: v(px, py, zc), normal: Z },
        true,
        vec![(LoopKind::Outer, vec![cap_arc, cap_chord])],
    );
    let truth = vec![
        TruthEntry {
            feature: FeatureKind::OpenedPocket,
            base_face: floor,
            members: vec![floor, wall_lo, wall_back, wall_hi],
        },
        TruthEntry {
            feature: FeatureKind::OpenedIsland,
            base_face: pillar,
            members: vec![pillar, cap],
        },
    ];
    Ok(named(
        "island_attached",
        "Opened pocket with a half-round island attached to its far wall.",
        b.finish()?,
        truth,
        false,
    ))
}

/// Shoulder step softened by a quarter-round inside blend.
pub fn fillet_step(radius: f64) -> Result<SynthesizedModel, SynthError> {
    check_range(radius, 0.0, 5.0, "radius")?;
    let segs = [
        ProfileSeg::Line { to: [30.0, 0.0] },
        ProfileSeg::Line { to: [30.0, 5.0] },
        ProfileSeg::Line { to: [20.0 + radius, 5.0] },
        ProfileSeg::Arc { to: [20.0, 5.0 + radius], center: [20.0 + radius, 5.0 + radius], ccw: false },
        ProfileSeg::Line { to: [20.0, 10.0] },
        ProfileSeg::Line { to: [0.0, 10.0] },
        ProfileSeg::Line { to: [0.0, 0.0] },
    ];
    let (b, sides, _, _) = extrude_profile([0.0, 0.0], &segs, 20.0);
    let blend = sides[3];
    let truth = vec![TruthEntry {
        feature: FeatureKind::InnerFillet,
        base_face: blend,
        members: vec![blend],
    }];
    Ok(named(
        "fillet_step",
        "Stepped block whose inside corner is blended with a quarter-round strip.",
        b.finish()?,
        truth,
        false,
    ))
}

/// Outside edge rounded over with a quarter-round blend.
pub fn fillet_rim(radius: f64) -> Result<SynthesizedModel, SynthError> {
    check_range(radius, 0.0, 9.9, "radius")?;
    let segs = [
        ProfileSeg::Line { to: [20.0, 0.0] },
        ProfileSeg::Line { to: [20.0, 10.0] },
        ProfileSeg::Line { to: [radius, 10.0] },
        ProfileSeg::Arc { to: [0.0, 10.0 - radius], center: [radius, 10.0 - radius], ccw: true },
        ProfileSeg::Line { to: [0.0, 0.0] },
    ];
    let (b, sides, _, _) = extrude_profile([0.0, 0.0], &segs, 20.0);
    let blend = sides[3];
    let truth = vec![TruthEntry {
        feature: FeatureKind::OuterFillet,
        base_face: blend,
        members: vec![blend],
    }];
    Ok(named(
        "fillet_rim",
        "Block whose top outside edge is rounded over along its full length.",
        b.finish()?,
        truth,
        false,
    ))
}

/// Shoulder step with a flat 45-degree relief strip in the inside corner.
pub fn chamfer_step(size: f64) -> Result<SynthesizedModel, SynthError> {
    check_range(size, 0.0, 5.0, "size")?;
    let segs = [
        ProfileSeg::Line { to: [30.0, 0.0] },
        ProfileSeg::Line { to: [30.0, 5.0] },
        ProfileSeg::Line { to: [20.0 + size, 5.0] },
        ProfileSeg::Line { to: [20.0, 5.0 + size] },
        ProfileSeg::Line { to: [20.0, 10.0] },
        ProfileSeg::Line { to: [0.0, 10.0] },
        ProfileSeg::Line { to: [0.0, 0.0] },
    ];
    let (b, sides, _, _) = extrude_profile([0.0, 0.0], &segs, 20.0);
    let bevel = sides[3];
    let truth = vec![TruthEntry {
        feature: FeatureKind::InnerChamfer,
        base_face: bevel,
        members: vec![bevel],
    }];
    Ok(named(
        "chamfer_step",
        "Stepped block whose inside corner carries a narrow 45-degree bevel strip.",
        b.finish()?,
        truth,
        false,
    ))
}

/// Outside edge broken with a flat 45-degree bevel.
pub fn chamfer_rim(size: f64) -> Result<SynthesizedModel, SynthError> {
    check_range(size, 0.0, 9.9, "size")?;
    let segs = [
        ProfileSeg::Line { to: [20.0, 0.0] },
        ProfileSeg::Line { to: [20.0, 10.0] },
        ProfileSeg::Line { to: [size, 10.0] },
        ProfileSeg::Line { to: [0.0, 10.0 - size] },
        ProfileSeg::Line { to: [0.0, 0.0] },
    ];
    let (b, sides, _, _) = extrude_profile([0.0, 0.0], &segs, 20.0);
    let bevel = sides[3];
    let truth = vec![TruthEntry {
        feature: FeatureKind::OuterChamfer,
        base_face: bevel,
        members: vec![bevel],
    }];
    Ok(named(
        "chamfer_rim",
        "Block whose top outside edge is broken by a narrow 45-degree bevel.",
        b.finish()?,
        truth,
        false,
    ))
}

/// Turned hub with a coaxial through bore.
pub fn turned_hub_bore(radius: f64) -> Result<SynthesizedModel, SynthError> {
    let (b, _, _, top) = rotational_builder(10.0, 8.0);
    let applied = apply_feature(
        b.finish()?,
        &Placement::ThroughHole { face: top, center: [0.0, 0.0], radius, two_halves: false },
    )?;
    Ok(named(
        "turned_hub_bore",
        "Cylindrical hub with a coaxial through bore.",
        applied.model,
        applied.entries,
        false,
    ))
}

/// Turned hub with a square closed pocket sunk into its top cap.
pub fn turned_hub_pocket(depth: f64) -> Result<SynthesizedModel, SynthError> {
    check_range(depth, 0.0, 8.0, "depth")?;
    let (b, _, _, top) = rotational_builder(10.0, 8.0);
    let applied = apply_feature(
        b.finish()?,
        &Placement::ClosedPocket { face: top, min: [-4.5, -4.5], max: [4.5, 4.5], depth },
    )?;
    Ok(named(
        "turned_hub_pocket",
        "Cylindrical hub with a square pocket sunk into its top cap.",
        applied.model,
        applied.entries,
        false,
    ))
}

/// One large part combining six features: a through hole, a counterbore,
/// a through slot, a closed pocket, an opened pocket and an inside blend.
pub fn combo_block() -> Result<SynthesizedModel, SynthError> {
    let mut b = ModelBuilder::new();
    let fillet_r = 1.5;
    // Profile in xz, counterclockwise, used by both y caps: the right side
    // steps down at x=54 (with the blend), and a slot runs at x in [24,30].
    let profile = |with_pocket_notch: bool| {
        let mut segs = vec![
            PathSeg::line(v(60.0, 0.0, 0.0)),
            PathSeg::line(v(60.0, 0.0, 6.0)),
            PathSeg::line(v(54.0 + fillet_r, 0.0, 6.0)),
            PathSeg::arc(v(54.0, 0.0, 6.0 + fillet_r), v(54.0 + fillet_r, 0.0, 6.0 + fillet_r), Y),
            PathSeg::line(v(54.0, 0.0, 12.0)),
            PathSeg::line(v(30.0, 0.0, 12.0)),
            PathSeg::line(v(30.0, 0.0, 7.0)),
            PathSeg::line(v(24.0, 0.0, 7.0)),
            PathSeg::line(v(24.0, 0.0, 12.0)),
        ];
        if with_pocket_notch {
            segs.extend([
                PathSeg::line(v(16.0, 0.0, 12.0)),
                PathSeg::line(v(16.0, 0.0, 9.5)),
                PathSeg::line(v(4.0, 0.0, 9.5)),
                PathSeg::line(v(4.0, 0.0, 12.0)),
            ]);
        }
        segs.extend([PathSeg::line(v(0.0, 0.0, 12.0)), PathSeg::line(v(0.0, 0.0, 0.0))]);
        segs
    };
    let shift = |segs: &[PathSeg], dy: f64| -> Vec<PathSeg> {
        segs.iter()
            .map(|s| match *s {
                PathSeg::Line { to } => PathSeg::line(v(to.x, dy, to.z)),
                PathSeg::Arc { to, center, axis } => {
                    PathSeg::arc(v(to.x, dy, to.z), v(center.x, dy, center.z), axis)
                }
            })
            .collect()
    };

    // 1 bottom
    let bottom_loop =
        b.rect_loop([v(0.0, 0.0, 0.0), v(60.0, 0.0, 0.0), v(60.0, 60.0, 0.0), v(0.0, 60.0, 0.0)]);
    b.face(
        Surface::Plane { origin: v(0.0, 0.0, 0.0), normal: -Z },
        true,
        vec![(LoopKind::Outer, bottom_loop)],
    );
    // 2 front (with the opened-pocket notch), 3 back (plain profile)
    let front_segs = profile(true);
    let front_loop = b.path_loop(v(0.0, 0.0, 0.0), &front_segs);
    b.face(
        Surface::Plane { origin: v(0.0, 0.0, 12.0), normal: -Y },
        true,
        vec![(LoopKind::Outer, front_loop)],
    );
    let back_segs = shift(&profile(false), 60.0);
    let back_loop = b.path_loop(v(0.0, 60.0, 0.0), &back_segs);
    b.face(
        Surface::Plane { origin: v(0.0, 60.0, 12.0), normal: Y },
        true,
        vec![(LoopKind::Outer, back_loop)],
    );
    // 4 left, 5 right
    let left_loop =
        b.rect_loop([v(0.0, 0.0, 0.0), v(0.0, 60.0, 0.0), v(0.0, 60.0, 12.0), v(0.0, 0.0, 12.0)]);
    b.face(
        Surface::Plane { origin: v(0.0, 0.0, 12.0), normal: -X },
        true,
        vec![(LoopKind::Outer, left_loop)],
    );
    let right_loop =
        b.rect_loop([v(60.0, 0.0, 0.0), v(60.0, 60.0, 0.0), v(60.0, 60.0, 6.0), v(60.0, 0.0, 6.0)]);
    b.face(
        Surface::Plane { origin: v(60.0, 0.0, 6.0), normal: X },
        true,
        vec![(LoopKind::Outer, right_loop)],
    );
    // 6 step floor, 7 blend strip, 8 step wall
    let sf_loop = b.rect_loop([
        v(54.0 + fillet_r, 0.0, 6.0),
        v(60.0, 0.0, 6.0),
        v(60.0, 60.0, 6.0),
        v(54.0 + fillet_r, 60.0, 6.0),
    ]);
    b.face(
        Surface::Plane { origin: v(54.0 + fillet_r, 0.0, 6.0), normal: Z },
        true,
        vec![(LoopKind::Outer, sf_loop)],
    );
    let f0 = b.arc(
        v(54.0 + fillet_r, 0.0, 6.0),
        v(54.0, 0.0, 6.0 + fillet_r),
        v(54.0 + fillet_r, 0.0, 6.0 + fillet_r),
        Y,
    );
    let f_up = b.line(v(54.0, 0.0, 6.0 + fillet_r), v(54.0, 60.0, 6.0 + fillet_r));
    let f1 = b.arc(
        v(54.0, 60.0, 6.0 + fillet_r),
        v(54.0 + fillet_r, 60.0, 6.0),
        v(54.0 + fillet_r, 60.0, 6.0 + fillet_r),
        -Y,
    );
    let f_down = b.line(v(54.0 + fillet_r, 60.0, 6.0), v(54.0 + fillet_r, 0.0, 6.0));
    let blend = b.face(
        Surface::Cylinder {
            axis_origin: v(54.0 + fillet_r, 0.0, 6.0 + fillet_r),
            axis_dir: Y,
            radius: fillet_r,
        },
        false,
        vec![(LoopKind::Outer, vec![f0, f_up, f1, f_down])],
    );
    let sw_loop = b.rect_loop([
        v(54.0, 0.0, 6.0 + fillet_r),
        v(54.0, 60.0, 6.0 + fillet_r),
        v(54.0, 60.0, 12.0),
        v(54.0, 0.0, 12.0),
    ]);
    b.face(
        Surface::Plane { origin: v(54.0, 0.0, 12.0), normal: X },
        true,
        vec![(LoopKind::Outer, sw_loop)],
    );
    // 9 top piece between slot and step
    let top_b_loop =
        b.rect_loop([v(30.0, 0.0, 12.0), v(54.0, 0.0, 12.0), v(54.0, 60.0, 12.0), v(30.0, 60.0, 12.0)]);
    let top_b = b.face(
        Surface::Plane { origin: v(30.0, 0.0, 12.0), normal: Z },
        true,
        vec![(LoopKind::Outer, top_b_loop)],
    );
    // 10-12 slot: far wall, floor, near wall
    let s30_loop =
        b.rect_loop([v(30.0, 0.0, 7.0), v(30.0, 60.0, 7.0), v(30.0, 60.0, 12.0), v(30.0, 0.0, 12.0)]);
    let slot_wall_hi = b.face(
        Surface::Plane { origin: v(30.0, 0.0, 7.0), normal: -X },
        true,
        vec![(LoopKind::Outer, s30_loop)],
    );
    let sfloor_loop =
        b.rect_loop([v(24.0, 0.0, 7.0), v(30.0, 0.0, 7.0), v(30.0, 60.0, 7.0), v(24.0, 60.0, 7.0)]);
    let slot_floor = b.face(
        Surface::Plane { origin: v(24.0, 0.0, 7.0), normal: Z },
        true,
        vec![(LoopKind::Outer, sfloor_loop)],
    );
    let s24_loop =
        b.rect_loop([v(24.0, 0.0, 7.0), v(24.0, 60.0, 7.0), v(24.0, 60.0, 12.0), v(24.0, 0.0, 12.0)]);
    let slot_wall_lo = b.face(
        Surface::Plane { origin: v(24.0, 0.0, 7.0), normal: X },
        true,
        vec![(LoopKind::Outer, s24_loop)],
    );
    // 13 top piece left of the slot, notched by the opened pocket
    let top_a_loop = b.path_loop(
        v(0.0, 0.0, 12.0),
        &[
            PathSeg::line(v(4.0, 0.0, 12.0)),
            PathSeg::line(v(4.0, 10.0, 12.0)),
            PathSeg::line(v(16.0, 10.0, 12.0)),
            PathSeg::line(v(16.0, 0.0, 12.0)),
            PathSeg::line(v(24.0, 0.0, 12.0)),
            PathSeg::line(v(24.0, 60.0, 12.0)),
            PathSeg::line(v(0.0, 60.0, 12.0)),
            PathSeg::line(v(0.0, 0.0, 12.0)),
        ],
    );
    let top_a = b.face(
        Surface::Plane { origin: v(0.0, 0.0, 12.0), normal: Z },
        true,
        vec![(LoopKind::Outer, top_a_loop)],
    );
    // 14-17 opened pocket: floor and three walls
    let pf_loop =
        b.rect_loop([v(4.0, 0.0, 9.5), v(16.0, 0.0, 9.5), v(16.0, 10.0, 9.5), v(4.0, 10.0, 9.5)]);
    let p_floor = b.face(
        Surface::Plane { origin: v(4.0, 0.0, 9.5), normal: Z },
        true,
        vec![(LoopKind::Outer, pf_loop)],
    );
    let p4_loop =
        b.rect_loop([v(4.0, 0.0, 9.5), v(4.0, 10.0, 9.5), v(4.0, 10.0, 12.0), v(4.0, 0.0, 12.0)]);
    let p_wall_lo = b.face(
        Surface::Plane { origin: v(4.0, 0.0, 9.5), normal: X },
        true,
        vec![(LoopKind::Outer, p4_loop)],
    );
    let p16_loop =
        b.rect_loop([v(16.0, 0.0, 9.5), v(16.0, 10.0, 9.5), v(16.0, 10.0, 12.0), v(16.0, 0.0, 12.0)]);
    let p_wall_hi = b.face(
        Surface::Plane { origin: v(16.0, 0.0, 9.5), normal: -X },
        true,
        vec![(LoopKind::Outer, p16_loop)],
    );
    let p10_loop =
        b.rect_loop([v(4.0, 10.0, 9.5), v(16.0, 10.0, 9.5), v(16.0, 10.0, 12.0), v(4.0, 10.0, 12.0)]);
    let p_wall_back = b.face(
        Surface::Plane { origin: v(4.0, 10.0, 9.5), normal: -Y },
        true,
        vec![(LoopKind::Outer, p10_loop)],
    );

    let base = b.finish()?;
    let hole = apply_feature(
        base,
        &Placement::ThroughHole { face: top_b, center: [42.0, 30.0], radius: 5.0, two_halves: false },
    )?;
    let cb = apply_feature(
        hole.model,
        &Placement::Counterbore {
            face: top_a,
            center: [10.0, 44.0],
            bore_radius: 6.0,
            bore_depth: 6.0,
            hole_radius: 3.0,
        },
    )?;
    let pocket = apply_feature(
        cb.model,
        &Placement::ClosedPocket { face: top_b, min: [34.0, 44.0], max: [48.0, 56.0], depth: 4.0 },
    )?;

    let mut truth = Vec::new();
    truth.extend(hole.entries);
    truth.extend(cb.entries);
    truth.push(TruthEntry {
        feature: FeatureKind::SimpleSlot,
        base_face: slot_floor,
        members: vec![slot_floor, slot_wall_lo, slot_wall_hi],
    });
    truth.extend(pocket.entries);
    truth.push(TruthEntry {
        feature: FeatureKind::OpenedPocket,
        base_face: p_floor,
        members: vec![p_floor, p_wall_lo, p_wall_hi, p_wall_back],
    });
    truth.push(TruthEntry {
        feature: FeatureKind::InnerFillet,
        base_face: blend,
        members: vec![blend],
    });
    truth.sort_by_key(|e| (e.feature, e.base_face));
    Ok(named(
        "combo_block",
        "Large block combining a through hole, a counterbore, a through slot, a closed pocket, an opened pocket and an inside blend.",
        pocket.model,
        truth,
        false,
    ))
}

/// Steep-walled tent-shaped pit. Designed so the walls read as an opened
/// pocket to the recognizer while the ground truth says floorless pocket.
pub fn pit_steep() -> Result<SynthesizedModel, SynthError> {
    let mut b = ModelBuilder::new();
    let r00 = v(5.0, 6.0, 10.0);
    let r10 = v(18.0, 6.0, 10.0);
    let r11 = v(18.0, 14.0, 10.0);
    let r01 = v(5.0, 14.0, 10.0);
    let v0 = v(6.0, 9.0, 6.0);
    let v1 = v(6.0, 11.0, 6.0);
    let bottom_loop =
        b.rect_loop([v(0.0, 0.0, 0.0), v(30.0, 0.0, 0.0), v(30.0, 20.0, 0.0), v(0.0, 20.0, 0.0)]);
    b.face(
        Surface::Plane { origin: v(0.0, 0.0, 0.0), normal: -Z },
        true,
        vec![(LoopKind::Outer, bottom_loop)],
    );
    let front_loop =
        b.rect_loop([v(0.0, 0.0, 0.0), v(30.0, 0.0, 0.0), v(30.0, 0.0, 10.0), v(0.0, 0.0, 10.0)]);
    b.face(
        Surface::Plane { origin: v(0.0, 0.0, 10.0), normal: -Y },
        true,
        vec![(LoopKind::Outer, front_loop)],
    );
    let right_loop =
        b.rect_loop([v(30.0, 0.0, 0.0), v(30.0, 20.0, 0.0), v(30.0, 20.0, 10.0), v(30.0, 0.0, 10.0)]);
    b.face(
        Surface::Plane { origin: v(30.0, 0.0, 10.0), normal: X },
        true,
        vec![(LoopKind::Outer, right_loop)],
    );
    let back_loop =
        b.rect_loop([v(0.0, 20.0, 0.0), v(30.0, 20.0, 0.0), v(30.0, 20.0, 10.0), v(0.0, 20.0, 10.0)]);
    b.face(
        Surface::Plane { origin: v(0.0, 20.0, 10.0), normal: Y },
        true,
        vec![(LoopKind::Outer, back_loop)],
    );
    let left_loop =
        b.rect_loop([v(0.0, 0.0, 0.0), v(0.0, 20.0, 0.0), v(0.0, 20.0, 10.0), v(0.0, 0.0, 10.0)]);
    b.face(
        Surface::Plane { origin: v(0.0, 0.0, 10.0), normal: -X },
        true,
        vec![(LoopKind::Outer, left_loop)],
    );
    let top_outer =
        b.rect_loop([v(0.0, 0.0, 10.0), v(30.0, 0.0, 10.0), v(30.0, 20.0, 10.0), v(0.0, 20.0, 10.0)]);
    let top_inner = b.rect_loop([r00, r10, r11, r01]);
    b.face(
        Surface::Plane { origin: v(0.0, 0.0, 10.0), normal: Z },
        true,
        vec![(LoopKind::Outer, top_outer), (LoopKind::Inner, top_inner)],
    );
    // Steep west wall (76 degrees from horizontal).
    let n17 = (17.0f64).sqrt();
    let steep_loop =
        b.path_loop(r00, &[PathSeg::line(r01), PathSeg::line(v1), PathSeg::line(v0), PathSeg::line(r00)]);
    let steep = b.face(
        Surface::Plane { origin: r00, normal: v(4.0 / n17, 0.0, 1.0 / n17) },
        true,
        vec![(LoopKind::Outer, steep_loop)],
    );
    // Shallow east wall (18.4 degrees from horizontal).
    let n160 = (160.0f64).sqrt();
    let shallow_loop =
        b.path_loop(r10, &[PathSeg::line(r11), PathSeg::line(v1), PathSeg::line(v0), PathSeg::line(r10)]);
    let shallow = b.face(
        Surface::Plane { origin: r10, normal: v(-4.0 / n160, 0.0, 12.0 / n160) },
        true,
        vec![(LoopKind::Outer, shallow_loop)],
    );
    // Triangular end walls.
    let south_loop = b.path_loop(r00, &[PathSeg::line(r10), PathSeg::line(v0), PathSeg::line(r00)]);
    let south = b.face(
        Surface::Plane { origin: r00, normal: v(0.0, 0.8, 0.6) },
        true,
        vec![(LoopKind::Outer, south_loop)],
    );
    let north_loop = b.path_loop(r11, &[PathSeg::line(r01), PathSeg::line(v1), PathSeg::line(r11)]);
    let north = b.face(
        Surface::Plane { origin: r11, normal: v(0.0, -0.8, 0.6) },
        true,
        vec![(LoopKind::Outer, north_loop)],
    );
    let members = vec![steep, shallow, south, north];
    let truth = members
        .iter()
        .map(|&f| TruthEntry {
            feature: FeatureKind::FloorlessPocket,
            base_face: f,
            members: members.clone(),
        })
        .collect();
    Ok(named(
        "pit_steep",
        "Tent-shaped pit with one steep and one shallow wall; every interference ray escapes through the mouth.",
        b.finish()?,
        truth,
        true,
    ))
}

/// A through slot and a closed pocket cut to the same depth, merging into a
/// single plus-shaped floor. The floor carries both design labels.
pub fn slot_pocket_merged() -> Result<SynthesizedModel, SynthError> {
    let mut b = ModelBuilder::new();
    let zf = 15.0;
    let (sx0, sx1) = (17.0, 23.0);
    let (px0, px1, py0, py1) = (8.0, 32.0, 14.0, 26.0);
    // 1 bottom
    let bottom_loop =
        b.rect_loop([v(0.0, 0.0, 0.0), v(40.0, 0.0, 0.0), v(40.0, 40.0, 0.0), v(0.0, 40.0, 0.0)]);
    b.face(
        Surface::Plane { origin: v(0.0, 0.0, 0.0), normal: -Z },
        true,
        vec![(LoopKind::Outer, bottom_loop)],
    );
    // 2 front, 3 back: notched by the slot exits
    let front_loop = b.path_loop(
        v(0.0, 0.0, 0.0),
        &[
            PathSeg::line(v(40.0, 0.0, 0.0)),
            PathSeg::line(v(40.0, 0.0, 20.0)),
            PathSeg::line(v(sx1, 0.0, 20.0)),
            PathSeg::line(v(sx1, 0.0, zf)),
            PathSeg::line(v(sx0, 0.0, zf)),
            PathSeg::line(v(sx0, 0.0, 20.0)),
            PathSeg::line(v(0.0, 0.0, 20.0)),
            PathSeg::line(v(0.0, 0.0, 0.0)),
        ],
    );
    b.face(
        Surface::Plane { origin: v(0.0, 0.0, 20.0), normal: -Y },
        true,
        vec![(LoopKind::Outer, front_loop)],
    );
    let back_loop = b.path_loop(
        v(0.0, 40.0, 0.0),
        &[
            PathSeg::line(v(40.0, 40.0, 0.0)),
            PathSeg::line(v(40.0, 40.0, 20.0)),
            PathSeg::line(v(sx1, 40.0, 20.0)),
            PathSeg::line(v(sx1, 40.0, zf)),
            PathSeg::line(v(sx0, 40.0, zf)),
            PathSeg::line(v(sx0, 40.0, 20.0)),
            PathSeg::line(v(0.0, 40.0, 20.0)),
            PathSeg::line(v(0.0, 40.0, 0.0)),
        ],
    );
    b.face(
        Surface::Plane { origin: v(0.0, 40.0, 20.0), normal: Y },
        true,
        vec![(LoopKind::Outer, back_loop)],
    );
    // 4 left, 5 right
    let left_loop =
        b.rect_loop([v(0.0, 0.0, 0.0), v(0.0, 40.0, 0.0), v(0.0, 40.0, 20.0), v(0.0, 0.0, 20.0)]);
    b.face(
        Surface::Plane { origin: v(0.0, 0.0, 20.0), normal: -X },
        true,
        vec![(LoopKind::Outer, left_loop)],
    );
    let right_loop =
        b.rect_loop([v(40.0, 0.0, 0.0), v(40.0, 40.0, 0.0), v(40.0, 40.0, 20.0), v(40.0, 0.0, 20.0)]);
    b.face(
        Surface::Plane { origin: v(40.0, 0.0, 20.0), normal: X },
        true,
        vec![(LoopKind::Outer, right_loop)],
    );
    // 6-7 the two top pieces either side of the slot, notched by the pocket
    let top_l_loop = b.path_loop(
        v(0.0, 0.0, 20.0),
        &[
            PathSeg::line(v(sx0, 0.0, 20.0)),
            PathSeg::line(v(sx0, py0, 20.0)),
            PathSeg::line(v(px0, py0, 20.0)),
            PathSeg::line(v(px0, py1, 20.0)),
            PathSeg::line(v(sx0, py1, 20.0)),
            PathSeg::line(v(sx0, 40.0, 20.0)),
            PathSeg::line(v(0.0, 40.0, 20.0)),
            PathSeg::line(v(0.0, 0.0, 20.0)),
        ],
    );
    b.face(
        Surface::Plane { origin: v(0.0, 0.0, 20.0), normal: Z },
        true,
        vec![(LoopKind::Outer, top_l_loop)],
    );
    let top_r_loop = b.path_loop(
        v(sx1, 0.0, 20.0),
        &[
            PathSeg::line(v(40.0, 0.0, 20.0)),
            PathSeg::line(v(40.0, 40.0, 20.0)),
            PathSeg::line(v(sx1, 40.0, 20.0)),
            PathSeg::line(v(sx1, py1, 20.0)),
            PathSeg::line(v(px1, py1, 20.0)),
            PathSeg::line(v(px1, py0, 20.0)),
            PathSeg::line(v(sx1, py0, 20.0)),
            PathSeg::line(v(sx1, 0.0, 20.0)),
        ],
    );
    b.face(
        Surface::Plane { origin: v(sx1, 0.0, 20.0), normal: Z },
        true,
        vec![(LoopKind::Outer, top_r_loop)],
    );
    // 8 plus-shaped merged floor
    let floor_loop = b.path_loop(
        v(sx0, 0.0, zf),
        &[
            PathSeg::line(v(sx1, 0.0, zf)),
            PathSeg::line(v(sx1, py0, zf)),
            PathSeg::line(v(px1, py0, zf)),
            PathSeg::line(v(px1, py1, zf)),
            PathSeg::line(v(sx1, py1, zf)),
            PathSeg::line(v(sx1, 40.0, zf)),
            PathSeg::line(v(sx0, 40.0, zf)),
            PathSeg::line(v(sx0, py1, zf)),
            PathSeg::line(v(px0, py1, zf)),
            PathSeg::line(v(px0, py0, zf)),
            PathSeg::line(v(sx0, py0, zf)),
            PathSeg::line(v(sx0, 0.0, zf)),
        ],
    );
    let floor = b.face(
        Surface::Plane { origin: v(sx0, 0.0, zf), normal: Z },
        true,
        vec![(LoopKind::Outer, floor_loop)],
    );
    // 9-18 wall strips
    let mut wall = |a: Vec3, c: Vec3, normal: Vec3| {
        let d = v(c.x, c.y, 20.0);
        let e = v(a.x, a.y, 20.0);
        let lp = b.rect_loop([a, c, d, e]);
        b.face(Surface::Plane { origin: a, normal }, true, vec![(LoopKind::Outer, lp)])
    };
    let s17a = wall(v(sx0, 0.0, zf), v(sx0, py0, zf), X);
    let s17b = wall(v(sx0, py1, zf), v(sx0, 40.0, zf), X);
    let s23a = wall(v(sx1, 0.0, zf), v(sx1, py0, zf), -X);
    let s23b = wall(v(sx1, py1, zf), v(sx1, 40.0, zf), -X);
    let p8 = wall(v(px0, py0, zf), v(px0, py1, zf), X);
    let p32 = wall(v(px1, py0, zf), v(px1, py1, zf), -X);
    let p14a = wall(v(px0, py0, zf), v(sx0, py0, zf), Y);
    let p14b = wall(v(sx1, py0, zf), v(px1, py0, zf), Y);
    let p26a = wall(v(px0, py1, zf), v(sx0, py1, zf), -Y);
    let p26b = wall(v(sx1, py1, zf), v(px1, py1, zf), -Y);
    let truth = vec![
        TruthEntry {
            feature: FeatureKind::SimpleSlot,
            base_face: floor,
            members: vec![floor, s17a, s17b, s23a, s23b],
        },
        TruthEntry {
            feature: FeatureKind::ClosedPocket,
            base_face: floor,
            members: vec![floor, p8, p32, p14a, p14b, p26a, p26b],
        },
    ];
    Ok(named(
        "slot_pocket_merged",
        "A through slot and a closed pocket cut to the same depth merge into one plus-shaped floor that carries both design labels.",
        b.finish()?,
        truth,
        true,
    ))
}

/// Map of per-feature generation parameters with unknown-key detection.
struct Params {
    map: BTreeMap<String, f64>,
}

impl Params {
    fn new(src: &BTreeMap<String, f64>) -> Params {
        Params { map: src.clone() }
    }

    fn take(&mut self, key: &str, default: f64) -> f64 {
        self.map.remove(key).unwrap_or(default)
    }

    fn finish(self) -> Result<(), SynthError> {
        if self.map.is_empty() {
            Ok(())
        } else {
            let keys: Vec<&str> = self.map.keys().map(|s| s.as_str()).collect();
            Err(SynthError::Parameter(format!("unknown parameter(s): {}", keys.join(", "))))
        }
    }
}

/// Build the canonical model for one feature subtype, honoring parameter
/// overrides such as `radius` or `depth`.
pub fn generate_for_feature(
    feature: FeatureKind,
    params: &BTreeMap<String, f64>,
) -> Result<SynthesizedModel, SynthError> {
    let mut p = Params::new(params);
    let out = match feature {
        FeatureKind::SimpleHole => {
            let radius = p.take("radius", 5.0);
            if p.take("two_halves", 0.0) != 0.0 {
                hole_two_half_cylinders(radius)
            } else {
                hole_one_cylinder(radius)
            }
        }
        FeatureKind::CounterboreHole => counterbore_block(
            p.take("bore_radius", 6.0),
            p.take("bore_depth", 6.0),
            p.take("hole_radius", 3.0),
        ),
        FeatureKind::CounterdrilledHole => counterdrilled_block(
            p.take("bore_radius", 5.0),
            p.take("bore_depth", 5.0),
            p.take("cone_depth", 3.0),
            p.take("hole_radius", 2.5),
        ),
        FeatureKind::CountersinkHole => countersink_block(
            p.take("mouth_radius", 5.0),
            p.take("hole_radius", 2.5),
            p.take("sink_depth", 4.0),
        ),
        FeatureKind::TaperHole => {
            taper_through(p.take("top_radius", 5.0), p.take("bottom_radius", 3.0))
        }
        FeatureKind::SimpleSlot => slot_through(p.take("width", 6.0), p.take("depth", 5.0)),
        FeatureKind::FloorlessSlot => vee_slot(p.take("width", 6.0), p.take("depth", 6.0)),
        FeatureKind::ClosedPocket => pocket_closed(p.take("depth", 4.0)),
        FeatureKind::OpenedPocket => pocket_opened(p.take("depth", 2.5)),
        FeatureKind::FloorlessPocket => pit_pyramid(),
        FeatureKind::ClosedIsland => island_closed(p.take("radius", 4.0), p.take("height", 3.0)),
        FeatureKind::OpenedIsland => island_attached(p.take("radius", 4.0)),
        FeatureKind::InnerFillet => fillet_step(p.take("radius", 1.5)),
        FeatureKind::OuterFillet => fillet_rim(p.take("radius", 1.5)),
        FeatureKind::InnerChamfer => chamfer_step(p.take("size", 1.5)),
        FeatureKind::OuterChamfer => chamfer_rim(p.take("size", 1.5)),
    }?;
    p.finish()?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cuboid_counts_and_outwardness() {
        let m = cuboid_stock(20.0, 12.0, 10.0);
        assert_eq!(m.faces.len(), 6);
        assert_eq!(m.edges.len(), 12);
        assert_eq!(m.vertices.len(), 8);
        assert!(m.ensure_valid().is_ok());
    }

    #[test]
    fn rotational_stock_validates() {
        let m = rotational_stock(10.0, 8.0);
        assert_eq!(m.faces.len(), 3);
        assert!(m.ensure_valid().is_ok());
    }

    #[test]
    fn breakout_counterbore_has_eleven_faces() {
        let fx = counterbore_breakout().unwrap();
        assert_eq!(fx.model.faces.len(), 11);
        assert_eq!(fx.truth.len(), 1);
        assert_eq!(fx.truth[0].feature, FeatureKind::CounterboreHole);
        assert_eq!(fx.truth[0].members.len(), 5);
    }

    #[test]
    fn merged_floor_fixture_shape() {
        let fx = slot_pocket_merged().unwrap();
        assert_eq!(fx.model.faces.len(), 18);
        assert_eq!(fx.truth.len(), 2);
        assert_eq!(fx.truth[0].base_face, fx.truth[1].base_face);
        assert!(fx.pinned_misrecognition);
    }

    #[test]
    fn generator_rejects_unknown_parameters() {
        let mut params = BTreeMap::new();
        params.insert("bogus".to_string(), 1.0);
        let err = generate_for_feature(FeatureKind::SimpleHole, &params).unwrap_err();
        assert!(matches!(err, SynthError::Parameter(_)));
        let err = slot_through(35.0, 5.0).unwrap_err();
        assert!(matches!(err, SynthError::Parameter(_)));
    }

    #[test]
    fn every_feature_generates_a_model() {
        for feature in FeatureKind::ALL {
            let fx = generate_for_feature(feature, &BTreeMap::new()).expect("default parameters");
            assert!(fx.model.ensure_valid().is_ok(), "{} fixture invalid", feature);
            assert!(fx.truth.iter().any(|t| t.feature == feature));
        }
    }
}
