//! Machining-feature recognition for analytic B-rep solids.
//!
//! The crate models watertight solids bounded by planes, cylinders, cones,
//! spheres, and tori; summarizes every face into a 20-item descriptor (face
//! type, curvature, width classes, per-loop adjacency tallies, and auxiliary
//! axis/interference facts); and matches descriptors against range-constrained
//! feature templates (minimum / maximum / equal bounds per item) to label the
//! base faces of 16 machining feature subtypes: holes (simple, counterbore,
//! counterdrilled, countersink, taper), slots (simple, floorless), pockets
//! (closed, opened, floorless), islands (closed, opened), fillets and
//! chamfers (inner, outer).
//!
//! Pipeline overview:
//!
//! * [`brep`] — the solid model, topology queries, validation, JSON I/O.
//! * [`step`] — a minimal STEP (ISO 10303-21) reader/writer for the same
//!   geometry subset.
//! * [`geom`] — predicates feeding extraction: edge convexity, continuity,
//!   base-vector angles, coaxiality, parallel face pairs, widths, and the
//!   interference ray test.
//! * [`descriptor`] — per-face descriptor extraction.
//! * [`template`] / [`similarity`] — the template schema, the built-in
//!   library, and the constraint-satisfaction score.
//! * [`recognize`] — the full pipeline with composite-hole priority and
//!   feature-instance grouping.
//! * [`synth`] — parametric generators for ground-truth-labeled fixtures.
//! * [`eval`] — per-face multi-class confusion matrix and macro metrics.

pub mod brep;
pub mod config;
pub mod descriptor;
pub mod eval;
pub mod features;
pub mod geom;
pub mod math;
pub mod recognize;
pub mod similarity;
pub mod step;
pub mod synth;
pub mod template;
