//! The catalog of machining feature subtypes the recognizer can label.

use serde::{Deserialize, Serialize};
use std::fmt;

/// One of the 16 machining feature subtypes.
///
/// The declaration order is the canonical feature order used for
/// deterministic output: labels on a face, feature instances, and
/// evaluation classes are all sorted by it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureKind {
    SimpleHole,
    CounterboreHole,
    CounterdrilledHole,
    CountersinkHole,
    TaperHole,
    SimpleSlot,
    FloorlessSlot,
    ClosedPocket,
    OpenedPocket,
    FloorlessPocket,
    ClosedIsland,
    OpenedIsland,
    InnerFillet,
    OuterFillet,
    InnerChamfer,
    OuterChamfer,
}

impl FeatureKind {
    pub const ALL: [FeatureKind; 16] = [
        FeatureKind::SimpleHole,
        FeatureKind::CounterboreHole,
        FeatureKind::CounterdrilledHole,
        FeatureKind::CountersinkHole,
        FeatureKind::TaperHole,
        FeatureKind::SimpleSlot,
        FeatureKind::FloorlessSlot,
        FeatureKind::ClosedPocket,
        FeatureKind::OpenedPocket,
        FeatureKind::FloorlessPocket,
        FeatureKind::ClosedIsland,
        FeatureKind::OpenedIsland,
        FeatureKind::InnerFillet,
        FeatureKind::OuterFillet,
        FeatureKind::InnerChamfer,
        FeatureKind::OuterChamfer,
    ];

    /// Snake-case name, identical to the serialized form.
    pub fn name(self) -> &'static str {
        match self {
            FeatureKind::SimpleHole => "simple_hole",
            FeatureKind::CounterboreHole => "counterbore_hole",
            FeatureKind::CounterdrilledHole => "counterdrilled_hole",
            FeatureKind::CountersinkHole => "countersink_hole",
            FeatureKind::TaperHole => "taper_hole",
            FeatureKind::SimpleSlot => "simple_slot",
            FeatureKind::FloorlessSlot => "floorless_slot",
            FeatureKind::ClosedPocket => "closed_pocket",
            FeatureKind::OpenedPocket => "opened_pocket",
            FeatureKind::FloorlessPocket => "floorless_pocket",
            FeatureKind::ClosedIsland => "closed_island",
            FeatureKind::OpenedIsland => "opened_island",
            FeatureKind::InnerFillet => "inner_fillet",
            FeatureKind::OuterFillet => "outer_fillet",
            FeatureKind::InnerChamfer => "inner_chamfer",
            FeatureKind::OuterChamfer => "outer_chamfer",
        }
    }

    pub fn parse(s: &str) -> Option<FeatureKind> {
        FeatureKind::ALL.iter().copied().find(|k| k.name() == s)
    }

    /// Composite holes are multi-face hole features whose recognition takes
    /// priority over the plain hole subtypes on the faces they claim.
    pub fn is_composite_hole(self) -> bool {
        matches!(
            self,
            FeatureKind::CounterboreHole
                | FeatureKind::CounterdrilledHole
                | FeatureKind::CountersinkHole
        )
    }

    /// Plain hole subtypes that a composite hole suppresses on its faces.
    pub fn is_plain_hole(self) -> bool {
        matches!(self, FeatureKind::SimpleHole | FeatureKind::TaperHole)
    }

    /// Fillet and chamfer labels coexist with other feature labels and are
    /// never suppressed.
    pub fn is_fillet_or_chamfer(self) -> bool {
        matches!(
            self,
            FeatureKind::InnerFillet
                | FeatureKind::OuterFillet
                | FeatureKind::InnerChamfer
                | FeatureKind::OuterChamfer
        )
    }
}

impl fmt::Display for FeatureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}
