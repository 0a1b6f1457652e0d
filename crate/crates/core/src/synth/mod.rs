//! Synthetic part generation: parametric stock shapes, machining-feature
//! surgery on existing models, and a fixed fixture suite with ground-truth
//! labels for evaluating the recognizer.

pub mod builder;
pub mod fixtures;

pub use builder::{ModelBuilder, PathSeg};

use crate::brep::{BrepError, FaceId, LoopKind, Model, Surface};
use crate::features::FeatureKind;
use crate::geom::polygon::face_polygons;
use crate::geom::uv_of;
use crate::math::Vec3;
use serde::{Deserialize, Serialize};
use std::path::Path;
use thiserror::Error;

/// One designed feature instance: the face that anchors the feature and
/// every face the feature owns.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TruthEntry {
    pub feature: FeatureKind,
    pub base_face: FaceId,
    pub members: Vec<FaceId>,
}

/// Ground-truth document stored next to a generated model.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TruthFile {
    pub truth: Vec<TruthEntry>,
}

/// A generated model plus the labels it was built to carry.
#[derive(Clone, Debug)]
pub struct SynthesizedModel {
    pub name: String,
    pub description: String,
    pub model: Model,
    pub truth: Vec<TruthEntry>,
    /// True when the fixture is designed so that recognition is expected to
    /// disagree with the designed truth on at least one face.
    pub pinned_misrecognition: bool,
}

impl SynthesizedModel {
    pub fn truth_file(&self) -> TruthFile {
        TruthFile { truth: self.truth.clone() }
    }
}

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("unknown {0}")]
    UnknownFace(FaceId),
    #[error("unsupported placement: {0}")]
    Placement(String),
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error(transparent)]
    Brep(#[from] BrepError),
}

/// A machining operation that can be carved into an existing model. Every
/// variant targets a planar face whose outward normal points along +z; the
/// richer fixture shapes (slots, open pockets, fillets, chamfers, pits) are
/// only available as whole constructors in [`fixtures`].
#[derive(Clone, Debug)]
pub enum Placement {
    ThroughHole { face: FaceId, center: [f64; 2], radius: f64, two_halves: bool },
    BlindHole { face: FaceId, center: [f64; 2], radius: f64, depth: f64 },
    Counterbore { face: FaceId, center: [f64; 2], bore_radius: f64, bore_depth: f64, hole_radius: f64 },
    Countersink { face: FaceId, center: [f64; 2], mouth_radius: f64, hole_radius: f64, sink_depth: f64 },
    Counterdrilled {
        face: FaceId,
        center: [f64; 2],
        bore_radius: f64,
        bore_depth: f64,
        cone_depth: f64,
        hole_radius: f64,
    },
    TaperHole { face: FaceId, center: [f64; 2], top_radius: f64, bottom_radius: f64 },
    ClosedPocket { face: FaceId, min: [f64; 2], max: [f64; 2], depth: f64 },
    ClosedIsland { face: FaceId, center: [f64; 2], radius: f64, height: f64 },
}

/// Result of a feature application: the edited model and the truth rows the
/// operation added.
#[derive(Clone, Debug)]
pub struct AppliedFeature {
    pub model: Model,
    pub entries: Vec<TruthEntry>,
}

const UP_TOL: f64 = 1e-9;

/// z level of a planar face whose sensed outward normal is +z.
fn up_face_z(model: &Model, id: FaceId) -> Result<f64, SynthError> {
    let face = model.face(id).map_err(|_| SynthError::UnknownFace(id))?;
    match face.surface {
        Surface::Plane { origin, normal } => {
            let sensed = if face.sense { normal } else { -normal };
            if (sensed.x.abs() < UP_TOL) && (sensed.y.abs() < UP_TOL) && sensed.z > 0.0 {
                Ok(origin.z)
            } else {
                Err(SynthError::Placement(format!(
                    "{id} must face straight up to receive a feature"
                )))
            }
        }
        _ => Err(SynthError::Placement(format!("{id} is not planar"))),
    }
}

/// True when the world point projects inside the face's trimmed region.
fn face_contains(model: &Model, id: FaceId, p: Vec3) -> bool {
    let Ok(face) = model.face(id) else {
        return false;
    };
    let fp = face_polygons(model, face);
    fp.contains(uv_of(&face.surface, p))
}

/// Downward-facing planar face pierced by a vertical line through (x, y)
/// below `z_top`; the closest such face. This is the exit side for a
/// through feature.
fn exit_face_below(model: &Model, x: f64, y: f64, z_top: f64) -> Result<(FaceId, f64), SynthError> {
    let mut best: Option<(FaceId, f64)> = None;
    for face in &model.faces {
        if let Surface::Plane { origin, normal } = face.surface {
            let sensed = if face.sense { normal } else { -normal };
            if sensed.x.abs() < UP_TOL && sensed.y.abs() < UP_TOL && sensed.z < 0.0 {
                let z = origin.z;
                if z < z_top - UP_TOL && face_contains(model, face.id, Vec3::new(x, y, z)) {
                    if best.map_or(true, |(_, bz)| z > bz) {
                        best = Some((face.id, z));
                    }
                }
            }
        }
    }
    best.ok_or_else(|| {
        SynthError::Placement(format!(
            "no downward face under ({x}, {y}) to let the feature exit"
        ))
    })
}

fn require_positive(value: f64, what: &str) -> Result<(), SynthError> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(SynthError::Parameter(format!("{what} must be positive, got {value}")))
    }
}

/// Check that a disc around (x, y) lies inside the face's trimmed region.
fn require_disc_inside(model: &Model, id: FaceId, x: f64, y: f64, r: f64, z: f64) -> Result<(), SynthError> {
    let probes = [
        Vec3::new(x, y, z),
        Vec3::new(x + r, y, z),
        Vec3::new(x - r, y, z),
        Vec3::new(x, y + r, z),
        Vec3::new(x, y - r, z),
    ];
    for p in probes {
        if !face_contains(model, id, p) {
            return Err(SynthError::Placement(format!(
                "circle of radius {r} at ({x}, {y}) does not fit inside {id}"
            )));
        }
    }
    Ok(())
}

/// Carve one machining feature into the model.
pub fn apply_feature(model: Model, placement: &Placement) -> Result<AppliedFeature, SynthError> {
    match *placement {
        Placement::ThroughHole { face, center: [x, y], radius, two_halves } => {
            require_positive(radius, "radius")?;
            let z_top = up_face_z(&model, face)?;
            require_disc_inside(&model, face, x, y, radius, z_top)?;
            let (exit, z_bot) = exit_face_below(&model, x, y, z_top)?;
            require_disc_inside(&model, exit, x, y, radius, z_bot)?;
            let mut b = ModelBuilder::from_model(model);
            let tubes = add_tube(&mut b, x, y, radius, z_bot, z_top, two_halves);
            add_rim(&mut b, face, x, y, radius, z_top, two_halves);
            add_rim(&mut b, exit, x, y, radius, z_bot, two_halves);
            let entries = tubes
                .iter()
                .map(|&t| TruthEntry {
                    feature: FeatureKind::SimpleHole,
                    base_face: t,
                    members: tubes.clone(),
                })
                .collect();
            Ok(AppliedFeature { model: b.finish()?, entries })
        }
        Placement::BlindHole { face, center: [x, y], radius, depth } => {
            require_positive(radius, "radius")?;
            require_positive(depth, "depth")?;
            let z_top = up_face_z(&model, face)?;
            require_disc_inside(&model, face, x, y, radius, z_top)?;
            let z_bot = z_top - depth;
            let mut b = ModelBuilder::from_model(model);
            let tube = add_tube(&mut b, x, y, radius, z_bot, z_top, false)[0];
            add_rim(&mut b, face, x, y, radius, z_top, false);
            let seam = Vec3::new(x + radius, y, z_bot);
            let rim = vec![b.full_circle(seam, Vec3::new(x, y, z_bot), Vec3::new(0.0, 0.0, 1.0))];
            let floor = b.face(
                Surface::Plane { origin: Vec3::new(x, y, z_bot), normal: Vec3::new(0.0, 0.0, 1.0) },
                true,
                vec![(LoopKind::Outer, rim)],
            );
            let entries = vec![TruthEntry {
                feature: FeatureKind::SimpleHole,
                base_face: tube,
                members: vec![tube, floor],
            }];
            Ok(AppliedFeature { model: b.finish()?, entries })
        }
        Placement::Counterbore { face, center: [x, y], bore_radius, bore_depth, hole_radius } => {
            require_positive(bore_radius, "bore_radius")?;
            require_positive(bore_depth, "bore_depth")?;
            require_positive(hole_radius, "hole_radius")?;
            if hole_radius >= bore_radius {
                return Err(SynthError::Parameter(
                    "hole_radius must be smaller than bore_radius".into(),
                ));
            }
            let z_top = up_face_z(&model, face)?;
            require_disc_inside(&model, face, x, y, bore_radius, z_top)?;
            let (exit, z_bot) = exit_face_below(&model, x, y, z_top)?;
            require_disc_inside(&model, exit, x, y, hole_radius, z_bot)?;
            let z_mid = z_top - bore_depth;
            if z_mid <= z_bot {
                return Err(SynthError::Parameter("bore_depth reaches the exit face".into()));
            }
            let mut b = ModelBuilder::from_model(model);
            let bore = add_tube(&mut b, x, y, bore_radius, z_mid, z_top, false)[0];
            let tube = add_tube(&mut b, x, y, hole_radius, z_bot, z_mid, false)[0];
            add_rim(&mut b, face, x, y, bore_radius, z_top, false);
            add_rim(&mut b, exit, x, y, hole_radius, z_bot, false);
            let z = Vec3::new(0.0, 0.0, 1.0);
            let c_mid = Vec3::new(x, y, z_mid);
            let outer_rim = vec![b.full_circle(Vec3::new(x + bore_radius, y, z_mid), c_mid, z)];
            let inner_rim = vec![b.full_circle(Vec3::new(x + hole_radius, y, z_mid), c_mid, z)];
            let annulus = b.face(
                Surface::Plane { origin: c_mid, normal: z },
                true,
                vec![(LoopKind::Outer, outer_rim), (LoopKind::Inner, inner_rim)],
            );
            let entries = vec![TruthEntry {
                feature: FeatureKind::CounterboreHole,
                base_face: annulus,
                members: vec![annulus, bore, tube],
            }];
            Ok(AppliedFeature { model: b.finish()?, entries })
        }
        Placement::Countersink { face, center: [x, y], mouth_radius, hole_radius, sink_depth } => {
            require_positive(mouth_radius, "mouth_radius")?;
            require_positive(hole_radius, "hole_radius")?;
            require_positive(sink_depth, "sink_depth")?;
            if hole_radius >= mouth_radius {
                return Err(SynthError::Parameter(
                    "hole_radius must be smaller than mouth_radius".into(),
                ));
            }
            let z_top = up_face_z(&model, face)?;
            require_disc_inside(&model, face, x, y, mouth_radius, z_top)?;
            let (exit, z_bot) = exit_face_below(&model, x, y, z_top)?;
            require_disc_inside(&model, exit, x, y, hole_radius, z_bot)?;
            let z_mid = z_top - sink_depth;
            if z_mid <= z_bot {
                return Err(SynthError::Parameter("sink_depth reaches the exit face".into()));
            }
            let mut b = ModelBuilder::from_model(model);
            let cone = add_cone_band(&mut b, x, y, hole_radius, z_mid, mouth_radius, z_top);
            let tube = add_tube(&mut b, x, y, hole_radius, z_bot, z_mid, false)[0];
            add_rim(&mut b, face, x, y, mouth_radius, z_top, false);
            add_rim(&mut b, exit, x, y, hole_radius, z_bot, false);
            let entries = vec![TruthEntry {
                feature: FeatureKind::CountersinkHole,
                base_face: cone,
                members: vec![cone, tube],
            }];
            Ok(AppliedFeature { model: b.finish()?, entries })
        }
        Placement::Counterdrilled {
            face,
            center: [x, y],
            bore_radius,
            bore_depth,
            cone_depth,
            hole_radius,
        } => {
            require_positive(bore_radius, "bore_radius")?;
            require_positive(bore_depth, "bore_depth")?;
            require_positive(cone_depth, "cone_depth")?;
            require_positive(hole_radius, "hole_radius")?;
            if hole_radius >= bore_radius {
                return Err(SynthError::Parameter(
                    "hole_radius must be smaller than bore_radius".into(),
                ));
            }
            let z_top = up_face_z(&model, face)?;
            require_disc_inside(&model, face, x, y, bore_radius, z_top)?;
            let (exit, z_bot) = exit_face_below(&model, x, y, z_top)?;
            require_disc_inside(&model, exit, x, y, hole_radius, z_bot)?;
            let z1 = z_top - bore_depth;
            let z2 = z1 - cone_depth;
            if z2 <= z_bot {
                return Err(SynthError::Parameter("bore and cone reach the exit face".into()));
            }
            let mut b = ModelBuilder::from_model(model);
            let bore = add_tube(&mut b, x, y, bore_radius, z1, z_top, false)[0];
            let cone = add_cone_band(&mut b, x, y, hole_radius, z2, bore_radius, z1);
            let tube = add_tube(&mut b, x, y, hole_radius, z_bot, z2, false)[0];
            add_rim(&mut b, face, x, y, bore_radius, z_top, false);
            add_rim(&mut b, exit, x, y, hole_radius, z_bot, false);
            let entries = vec![TruthEntry {
                feature: FeatureKind::CounterdrilledHole,
                base_face: cone,
                members: vec![bore, cone, tube],
            }];
            Ok(AppliedFeature { model: b.finish()?, entries })
        }
        Placement::TaperHole { face, center: [x, y], top_radius, bottom_radius } => {
            require_positive(top_radius, "top_radius")?;
            require_positive(bottom_radius, "bottom_radius")?;
            if top_radius <= bottom_radius {
                return Err(SynthError::Parameter(
                    "top_radius must exceed bottom_radius".into(),
                ));
            }
            let z_top = up_face_z(&model, face)?;
            require_disc_inside(&model, face, x, y, top_radius, z_top)?;
            let (exit, z_bot) = exit_face_below(&model, x, y, z_top)?;
            require_disc_inside(&model, exit, x, y, bottom_radius, z_bot)?;
            let mut b = ModelBuilder::from_model(model);
            let cone = add_cone_band(&mut b, x, y, bottom_radius, z_bot, top_radius, z_top);
            add_rim(&mut b, face, x, y, top_radius, z_top, false);
            add_rim(&mut b, exit, x, y, bottom_radius, z_bot, false);
            let entries = vec![TruthEntry {
                feature: FeatureKind::TaperHole,
                base_face: cone,
                members: vec![cone],
            }];
            Ok(AppliedFeature { model: b.finish()?, entries })
        }
        Placement::ClosedPocket { face, min: [x0, y0], max: [x1, y1], depth } => {
            require_positive(depth, "depth")?;
            if x1 <= x0 || y1 <= y0 {
                return Err(SynthError::Parameter("pocket max must exceed min".into()));
            }
            let z_top = up_face_z(&model, face)?;
            for (px, py) in [(x0, y0), (x1, y0), (x1, y1), (x0, y1), ((x0 + x1) / 2.0, (y0 + y1) / 2.0)] {
                if !face_contains(&model, face, Vec3::new(px, py, z_top)) {
                    return Err(SynthError::Placement(format!(
                        "pocket corner ({px}, {py}) is outside {face}"
                    )));
                }
            }
            let z1 = z_top - depth;
            let mut b = ModelBuilder::from_model(model);
            let corners = |z: f64| {
                [
                    Vec3::new(x0, y0, z),
                    Vec3::new(x1, y0, z),
                    Vec3::new(x1, y1, z),
                    Vec3::new(x0, y1, z),
                ]
            };
            let lo = corners(z1);
            let hi = corners(z_top);
            let floor_loop = b.rect_loop(lo);
            let floor = b.face(
                Surface::Plane { origin: Vec3::new(x0, y0, z1), normal: Vec3::new(0.0, 0.0, 1.0) },
                true,
                vec![(LoopKind::Outer, floor_loop)],
            );
            // Walls in order: x = x0, x = x1, y = y0, y = y1.
            let wall_quads = [
                (lo[0], lo[3], hi[3], hi[0], Vec3::new(1.0, 0.0, 0.0)),
                (lo[1], lo[2], hi[2], hi[1], Vec3::new(-1.0, 0.0, 0.0)),
                (lo[0], lo[1], hi[1], hi[0], Vec3::new(0.0, 1.0, 0.0)),
                (lo[3], lo[2], hi[2], hi[3], Vec3::new(0.0, -1.0, 0.0)),
            ];
            let mut walls = Vec::new();
            for (a, c, d, e, normal) in wall_quads {
                let loop_ = b.rect_loop([a, c, d, e]);
                walls.push(b.face(
                    Surface::Plane { origin: a, normal },
                    true,
                    vec![(LoopKind::Outer, loop_)],
                ));
            }
            let rim = b.rect_loop(hi);
            b.add_loop(face, LoopKind::Inner, rim);
            let mut members = vec![floor];
            members.extend(&walls);
            let entries = vec![TruthEntry {
                feature: FeatureKind::ClosedPocket,
                base_face: floor,
                members,
            }];
            Ok(AppliedFeature { model: b.finish()?, entries })
        }
        Placement::ClosedIsland { face, center: [x, y], radius, height } => {
            require_positive(radius, "radius")?;
            require_positive(height, "height")?;
            let z_floor = up_face_z(&model, face)?;
            require_disc_inside(&model, face, x, y, radius, z_floor)?;
            let z_cap = z_floor + height;
            let mut b = ModelBuilder::from_model(model);
            let z = Vec3::new(0.0, 0.0, 1.0);
            let seam_lo = Vec3::new(x + radius, y, z_floor);
            let seam_hi = Vec3::new(x + radius, y, z_cap);
            let c_lo = Vec3::new(x, y, z_floor);
            let c_hi = Vec3::new(x, y, z_cap);
            let band = b.band_loop(seam_lo, seam_hi, c_lo, c_hi, z);
            let pillar = b.face(
                Surface::Cylinder { axis_origin: c_lo, axis_dir: z, radius },
                true,
                vec![(LoopKind::Outer, band)],
            );
            let cap_rim = vec![b.full_circle(seam_hi, c_hi, z)];
            let cap = b.face(
                Surface::Plane { origin: c_hi, normal: z },
                true,
                vec![(LoopKind::Outer, cap_rim)],
            );
            let base_rim = vec![b.full_circle(seam_lo, c_lo, z)];
            b.add_loop(face, LoopKind::Inner, base_rim);
            let entries = vec![TruthEntry {
                feature: FeatureKind::ClosedIsland,
                base_face: pillar,
                members: vec![pillar, cap],
            }];
            Ok(AppliedFeature { model: b.finish()?, entries })
        }
    }
}

/// Vertical hole wall(s) between two z levels: one full tube with a seam,
/// or two half tubes split at azimuth 0 and pi.
fn add_tube(
    b: &mut ModelBuilder,
    x: f64,
    y: f64,
    radius: f64,
    z_bot: f64,
    z_top: f64,
    two_halves: bool,
) -> Vec<FaceId> {
    let z = Vec3::new(0.0, 0.0, 1.0);
    let c_bot = Vec3::new(x, y, z_bot);
    let c_top = Vec3::new(x, y, z_top);
    let surface = Surface::Cylinder { axis_origin: c_bot, axis_dir: z, radius };
    if !two_halves {
        let seam_bot = Vec3::new(x + radius, y, z_bot);
        let seam_top = Vec3::new(x + radius, y, z_top);
        let band = b.band_loop(seam_bot, seam_top, c_bot, c_top, z);
        return vec![b.face(surface, false, vec![(LoopKind::Outer, band)])];
    }
    let p0b = Vec3::new(x + radius, y, z_bot);
    let p1b = Vec3::new(x - radius, y, z_bot);
    let p0t = Vec3::new(x + radius, y, z_top);
    let p1t = Vec3::new(x - radius, y, z_top);
    let half_a = {
        let bot = b.arc(p0b, p1b, c_bot, z);
        let up = b.line(p1b, p1t);
        let top = b.arc(p1t, p0t, c_top, -z);
        let down = b.line(p0t, p0b);
        b.face(surface, false, vec![(LoopKind::Outer, vec![bot, up, top, down])])
    };
    let half_b = {
        let bot = b.arc(p1b, p0b, c_bot, z);
        let up = b.line(p0b, p0t);
        let top = b.arc(p0t, p1t, c_top, -z);
        let down = b.line(p1t, p1b);
        b.face(surface, false, vec![(LoopKind::Outer, vec![bot, up, top, down])])
    };
    vec![half_a, half_b]
}

/// Conical hole wall widening from `r_lo` at `z_lo` to `r_hi` at `z_hi`.
fn add_cone_band(
    b: &mut ModelBuilder,
    x: f64,
    y: f64,
    r_lo: f64,
    z_lo: f64,
    r_hi: f64,
    z_hi: f64,
) -> FaceId {
    let z = Vec3::new(0.0, 0.0, 1.0);
    let tan = (r_hi - r_lo) / (z_hi - z_lo);
    let apex = Vec3::new(x, y, z_lo - r_lo / tan);
    let half_angle = tan.atan();
    let seam_lo = Vec3::new(x + r_lo, y, z_lo);
    let seam_hi = Vec3::new(x + r_hi, y, z_hi);
    let band = b.band_loop(seam_lo, seam_hi, Vec3::new(x, y, z_lo), Vec3::new(x, y, z_hi), z);
    b.face(
        Surface::Cone { apex, axis_dir: z, half_angle },
        false,
        vec![(LoopKind::Outer, band)],
    )
}

/// Circular opening rim added to a planar face as an inner loop, split in
/// two arcs when the wall below is split.
fn add_rim(b: &mut ModelBuilder, face: FaceId, x: f64, y: f64, radius: f64, z: f64, split: bool) {
    let up = Vec3::new(0.0, 0.0, 1.0);
    let c = Vec3::new(x, y, z);
    let rim = if split {
        let p0 = Vec3::new(x + radius, y, z);
        let p1 = Vec3::new(x - radius, y, z);
        vec![b.arc(p0, p1, c, up), b.arc(p1, p0, c, up)]
    } else {
        vec![b.full_circle(Vec3::new(x + radius, y, z), c, up)]
    };
    b.add_loop(face, LoopKind::Inner, rim);
}

/// The fixed fixture suite, in canonical order.
pub fn standard_suite() -> Vec<SynthesizedModel> {
    let built = vec![
        fixtures::hole_one_cylinder(5.0),
        fixtures::hole_two_half_cylinders(5.0),
        fixtures::counterbore_breakout(),
        fixtures::countersink_block(5.0, 2.5, 4.0),
        fixtures::counterdrilled_block(5.0, 5.0, 3.0, 2.5),
        fixtures::taper_through(5.0, 3.0),
        fixtures::slot_through(6.0, 5.0),
        fixtures::vee_slot(6.0, 6.0),
        fixtures::pocket_closed(4.0),
        fixtures::pocket_opened(2.5),
        fixtures::pit_pyramid(),
        fixtures::island_closed(4.0, 3.0),
        fixtures::island_attached(4.0),
        fixtures::fillet_step(1.5),
        fixtures::fillet_rim(1.5),
        fixtures::chamfer_step(1.5),
        fixtures::chamfer_rim(1.5),
        fixtures::turned_hub_bore(4.0),
        fixtures::turned_hub_pocket(3.0),
        fixtures::combo_block(),
        fixtures::pit_steep(),
        fixtures::slot_pocket_merged(),
        fixtures::hole_blind(4.0, 6.0),
        fixtures::hole_chamfered(4.0, 1.5),
    ];
    built
        .into_iter()
        .map(|fx| fx.expect("suite fixtures use known-good parameters"))
        .collect()
}

pub fn save_truth(path: &Path, truth: &TruthFile) -> Result<(), BrepError> {
    let text = serde_json::to_string_pretty(truth)
        .map_err(|e| BrepError::Schema(format!("truth serialization failed: {e}")))?;
    std::fs::write(path, text).map_err(BrepError::Io)
}

pub fn load_truth(path: &Path) -> Result<TruthFile, BrepError> {
    let text = std::fs::read_to_string(path).map_err(BrepError::Io)?;
    serde_json::from_str(&text).map_err(|e| BrepError::Schema(format!("bad truth file: {e}")))
}
