//! The exhibition world: occupancy grid, areas, artworks and the museum file format.
//!
//! World frame: `x` grows with the grid column, `y` grows with the grid row, and
//! the origin is the outer corner of cell (row 0, col 0). Cell centers sit at
//! `((col + 0.5) * resolution, (row + 0.5) * resolution)`.

use crate::geometry::{is_convex, is_simple_polygon, polygon_contains, Point, Pose};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;
use thiserror::Error;

macro_rules! id_newtype {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        #[serde(transparent)]
        pub struct $name(pub String);

        impl $name {
            pub fn new(id: impl Into<String>) -> Self {
                Self(id.into())
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl From<&str> for $name {
            fn from(s: &str) -> Self {
                Self(s.to_string())
            }
        }

        impl From<String> for $name {
            fn from(s: String) -> Self {
                Self(s)
            }
        }
    };
}

id_newtype!(
    /// Identifier of an exhibition area.
    AreaId
);
id_newtype!(
    /// Identifier of an artwork.
    ArtworkId
);

/// Grid cell address, `(row, col)`.
pub type Cell = (usize, usize);

#[derive(Debug, Clone, PartialEq)]
pub struct OccupancyGrid {
    width: usize,
    height: usize,
    resolution: f64,
    cells: Vec<bool>,
}

impl OccupancyGrid {
    /// Builds a grid, rejecting a cell vector of the wrong length or a
    /// non-positive resolution.
    pub fn new(width: usize, height: usize, resolution: f64, cells: Vec<bool>) -> Result<Self, MuseumError> {
        if cells.len() != width * height {
            return Err(MuseumError::Validation(vec![Violation::new(
                "grid",
                format!("cell array has {} entries, expected {}", cells.len(), width * height),
            )]));
        }
        if !(resolution > 0.0 && resolution.is_finite()) {
            return Err(MuseumError::Validation(vec![Violation::new(
                "grid",
                format!("resolution must be strictly positive, got {resolution}"),
            )]));
        }
        Ok(Self {
            width,
            height,
            resolution,
            cells,
        })
    }

    /// An all-free grid.
    pub fn free(width: usize, height: usize, resolution: f64) -> Self {
        Self::new(width, height, resolution, vec![false; width * height]).expect("valid free grid")
    }

    /// Parses an ASCII picture, one text line per row starting at row 0.
    /// `#` marks an occupied cell, anything else is free.
    pub fn from_ascii(rows: &[&str], resolution: f64) -> Self {
        let height = rows.len();
        let width = rows.first().map_or(0, |r| r.chars().count());
        let mut cells = Vec::with_capacity(width * height);
        for row in rows {
            assert_eq!(row.chars().count(), width, "ragged ascii grid");
            cells.extend(row.chars().map(|c| c == '#'));
        }
        Self::new(width, height, resolution, cells).expect("valid ascii grid")
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn resolution(&self) -> f64 {
        self.resolution
    }

    pub fn in_bounds(&self, (row, col): Cell) -> bool {
        row < self.height && col < self.width
    }

    /// Occupancy of a cell; out-of-bounds cells read as occupied.
    pub fn is_occupied(&self, cell: Cell) -> bool {
        if !self.in_bounds(cell) {
            return true;
        }
        self.cells[cell.0 * self.width + cell.1]
    }

    pub fn is_free(&self, cell: Cell) -> bool {
        !self.is_occupied(cell)
    }

    pub fn set_occupied(&mut self, cell: Cell, occupied: bool) {
        assert!(self.in_bounds(cell), "cell {cell:?} out of bounds");
        self.cells[cell.0 * self.width + cell.1] = occupied;
    }

    pub fn cell_of(&self, p: Point) -> Option<Cell> {
        if !(p.x.is_finite() && p.y.is_finite()) || p.x < 0.0 || p.y < 0.0 {
            return None;
        }
        let col = (p.x / self.resolution).floor() as usize;
        let row = (p.y / self.resolution).floor() as usize;
        self.in_bounds((row, col)).then_some((row, col))
    }

    pub fn cell_center(&self, (row, col): Cell) -> Point {
        Point::new(
            (col as f64 + 0.5) * self.resolution,
            (row as f64 + 0.5) * self.resolution,
        )
    }

    pub fn occupied_cells(&self) -> impl Iterator<Item = Cell> + '_ {
        self.cells
            .iter()
            .enumerate()
            .filter(|(_, &occ)| occ)
            .map(|(i, _)| (i / self.width, i % self.width))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Area {
    pub id: AreaId,
    pub name: String,
    pub waypoint: Pose,
    pub boundary: Vec<Point>,
    pub intro_text: String,
    pub mandatory_rank: Option<u8>,
}

impl Area {
    pub fn contains(&self, p: Point) -> bool {
        polygon_contains(&self.boundary, p)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Artwork {
    pub id: ArtworkId,
    pub title: String,
    pub author: String,
    pub position: Point,
    pub facts: Vec<String>,
    pub trigger_radius: f64,
    pub passing_utterance: String,
}

/// Immutable after load; share it by reference across sessions.
#[derive(Debug, Clone, PartialEq)]
pub struct MuseumMap {
    pub grid: OccupancyGrid,
    pub areas: Vec<Area>,
    pub artworks: Vec<Artwork>,
    pub entrance_area_id: AreaId,
}

/// One broken invariant, tagged with the entity it concerns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub entity: String,
    pub message: String,
}

impl Violation {
    pub fn new(entity: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            entity: entity.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.entity, self.message)
    }
}

#[derive(Debug, Error)]
pub enum MuseumError {
    #[error("malformed museum document: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("museum failed validation with {} violation(s): {}", .0.len(), join_violations(.0))]
    Validation(Vec<Violation>),
    #[error("cannot read museum file: {0}")]
    Io(#[from] std::io::Error),
    #[error("unknown artwork '{0}'")]
    UnknownArtwork(ArtworkId),
    #[error("unknown area '{0}'")]
    UnknownArea(AreaId),
    #[error("artwork '{0}' lies outside every area")]
    Orphan(ArtworkId),
}

fn join_violations(v: &[Violation]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

// ---- file format ----------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridDoc {
    pub width: usize,
    pub height: usize,
    pub resolution_m: f64,
    pub occupied: Vec<[usize; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AreaDoc {
    pub id: AreaId,
    pub name: String,
    pub waypoint: [f64; 3],
    pub boundary: Vec<[f64; 2]>,
    pub intro_text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mandatory_rank: Option<u8>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArtworkDoc {
    pub id: ArtworkId,
    pub title: String,
    pub author: String,
    pub position: [f64; 2],
    pub facts: Vec<String>,
    pub trigger_radius_m: f64,
    pub passing_utterance: String,
}

/// Serialized form of a [`MuseumMap`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MuseumDocument {
    pub grid: GridDoc,
    pub entrance: AreaId,
    pub areas: Vec<AreaDoc>,
    #[serde(default)]
    pub artworks: Vec<ArtworkDoc>,
}

/// Parses and validates a museum description. Every violated invariant is
/// reported, not just the first.
pub fn load_museum(document: &str) -> Result<MuseumMap, MuseumError> {
    let doc: MuseumDocument = serde_json::from_str(document)?;
    MuseumMap::from_document(doc)
}

pub fn load_museum_file(path: impl AsRef<Path>) -> Result<MuseumMap, MuseumError> {
    let text = std::fs::read_to_string(path)?;
    load_museum(&text)
}

impl MuseumMap {
    pub fn from_document(doc: MuseumDocument) -> Result<Self, MuseumError> {
        let mut violations = Vec::new();
        let (w, h) = (doc.grid.width, doc.grid.height);
        let mut cells = vec![false; w * h];
        for &[row, col] in &doc.grid.occupied {
            if row < h && col < w {
                cells[row * w + col] = true;
            } else {
                violations.push(Violation::new(
                    "grid",
                    format!("occupied cell [{row}, {col}] outside {w}x{h} grid"),
                ));
            }
        }
        let grid = match OccupancyGrid::new(w, h, doc.grid.resolution_m, cells) {
            Ok(g) => g,
            Err(MuseumError::Validation(mut v)) => {
                violations.append(&mut v);
                return Err(MuseumError::Validation(violations));
            }
            Err(e) => return Err(e),
        };
        let map = MuseumMap {
            grid,
            areas: doc
                .areas
                .into_iter()
                .map(|a| Area {
                    id: a.id,
                    name: a.name,
                    waypoint: Pose::from(a.waypoint),
                    boundary: a.boundary.into_iter().map(Point::from).collect(),
                    intro_text: a.intro_text,
                    mandatory_rank: a.mandatory_rank,
                })
                .collect(),
            artworks: doc
                .artworks
                .into_iter()
                .map(|a| Artwork {
                    id: a.id,
                    title: a.title,
                    author: a.author,
                    position: Point::from(a.position),
                    facts: a.facts,
                    trigger_radius: a.trigger_radius_m,
                    passing_utterance: a.passing_utterance,
                })
                .collect(),
            entrance_area_id: doc.entrance,
        };
        violations.extend(validate_museum(&map));
        if violations.is_empty() {
            Ok(map)
        } else {
            Err(MuseumError::Validation(violations))
        }
    }

    pub fn to_document(&self) -> MuseumDocument {
        MuseumDocument {
            grid: GridDoc {
                width: self.grid.width,
                height: self.grid.height,
                resolution_m: self.grid.resolution,
                occupied: self.grid.occupied_cells().map(|(r, c)| [r, c]).collect(),
            },
            entrance: self.entrance_area_id.clone(),
            areas: self
                .areas
                .iter()
                .map(|a| AreaDoc {
                    id: a.id.clone(),
                    name: a.name.clone(),
                    waypoint: a.waypoint.into(),
                    boundary: a.boundary.iter().map(|&p| p.into()).collect(),
                    intro_text: a.intro_text.clone(),
                    mandatory_rank: a.mandatory_rank,
                })
                .collect(),
            artworks: self
                .artworks
                .iter()
                .map(|a| ArtworkDoc {
                    id: a.id.clone(),
                    title: a.title.clone(),
                    author: a.author.clone(),
                    position: a.position.into(),
                    facts: a.facts.clone(),
                    trigger_radius_m: a.trigger_radius,
                    passing_utterance: a.passing_utterance.clone(),
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_document()).expect("museum document serializes")
    }

    pub fn area(&self, id: &AreaId) -> Option<&Area> {
        self.areas.iter().find(|a| &a.id == id)
    }

    pub fn require_area(&self, id: &AreaId) -> Result<&Area, MuseumError> {
        self.area(id).ok_or_else(|| MuseumError::UnknownArea(id.clone()))
    }

    pub fn artwork(&self, id: &ArtworkId) -> Option<&Artwork> {
        self.artworks.iter().find(|a| &a.id == id)
    }

    pub fn entrance(&self) -> &Area {
        self.area(&self.entrance_area_id)
            .expect("validated museum has an entrance")
    }

    /// Areas a tour can visit: every area except the entrance, in document order.
    pub fn tour_areas(&self) -> impl Iterator<Item = &Area> {
        self.areas.iter().filter(move |a| a.id != self.entrance_area_id)
    }

    /// The area carrying `mandatory_rank == rank`.
    pub fn mandatory_area(&self, rank: u8) -> Option<&Area> {
        self.areas.iter().find(|a| a.mandatory_rank == Some(rank))
    }

    /// Owner of an artwork: the first area in document order whose closed
    /// boundary contains the artwork position.
    pub fn owner_area(&self, artwork_id: &ArtworkId) -> Result<&Area, MuseumError> {
        let art = self
            .artwork(artwork_id)
            .ok_or_else(|| MuseumError::UnknownArtwork(artwork_id.clone()))?;
        self.area_at(art.position)
            .ok_or_else(|| MuseumError::Orphan(artwork_id.clone()))
    }

    /// First area in document order containing `p`.
    pub fn area_at(&self, p: Point) -> Option<&Area> {
        self.areas.iter().find(|a| a.contains(p))
    }

    /// Artworks owned by `area`, in document order.
    pub fn artworks_in<'a>(&'a self, area: &'a AreaId) -> impl Iterator<Item = &'a Artwork> + 'a {
        self.artworks
            .iter()
            .filter(move |art| self.area_at(art.position).is_some_and(|a| &a.id == area))
    }

    /// Resolves free text such as "the Sails area" or "port-of-genoa" to a tour area.
    pub fn resolve_area_name(&self, text: &str) -> Option<&Area> {
        let wanted = normalize_area_text(text);
        if wanted.is_empty() {
            return None;
        }
        self.areas
            .iter()
            .find(|a| normalize_area_text(a.id.as_str()) == wanted || normalize_area_text(&a.name) == wanted)
    }
}

/// Lowercases, drops punctuation, a leading "the" and a trailing "area".
pub fn normalize_area_text(text: &str) -> String {
    let cleaned: String = text
        .chars()
        .map(|c| {
            if c.is_alphanumeric() {
                c.to_ascii_lowercase()
            } else {
                ' '
            }
        })
        .collect();
    let mut words: Vec<&str> = cleaned.split_whitespace().collect();
    if words.first() == Some(&"the") {
        words.remove(0);
    }
    if words.last() == Some(&"area") {
        words.pop();
    }
    words.join(" ")
}

/// Checks every museum invariant. Returns an empty list iff the map is valid.
pub fn validate_museum(map: &MuseumMap) -> Vec<Violation> {
    let mut out = Vec::new();
    let grid = &map.grid;

    let mut seen = BTreeSet::new();
    for area in &map.areas {
        if !seen.insert(area.id.clone()) {
            out.push(Violation::new(format!("area '{}'", area.id), "duplicate area id"));
        }
    }
    let entrances = map.areas.iter().filter(|a| a.id == map.entrance_area_id).count();
    if entrances == 0 {
        out.push(Violation::new(
            format!("entrance '{}'", map.entrance_area_id),
            "entrance missing: id does not resolve to any area",
        ));
    }

    let mut ranks: BTreeMap<u8, Vec<&AreaId>> = BTreeMap::new();
    for area in &map.areas {
        if let Some(rank) = area.mandatory_rank {
            ranks.entry(rank).or_default().push(&area.id);
        }
    }
    for (rank, ids) in &ranks {
        if !(1..=2).contains(rank) {
            for id in ids {
                out.push(Violation::new(
                    format!("area '{id}'"),
                    format!("mandatory rank {rank} outside {{1, 2}}"),
                ));
            }
        } else if ids.len() > 1 {
            for id in ids {
                out.push(Violation::new(
                    format!("area '{id}'"),
                    format!("duplicate mandatory rank {rank}"),
                ));
            }
        }
    }
    for rank in 1..=2u8 {
        if !ranks.contains_key(&rank) {
            out.push(Violation::new(
                "museum",
                format!("no area carries mandatory rank {rank}"),
            ));
        }
    }
    if let Some(entrance) = map.area(&map.entrance_area_id) {
        if entrance.mandatory_rank.is_some() {
            out.push(Violation::new(
                format!("area '{}'", entrance.id),
                "the entrance cannot be a mandatory tour area",
            ));
        }
    }

    for area in &map.areas {
        let who = format!("area '{}'", area.id);
        if area.boundary.len() < 3 {
            out.push(Violation::new(&who, "boundary needs at least 3 vertices"));
        } else if !is_simple_polygon(&area.boundary) {
            out.push(Violation::new(&who, "boundary is self-intersecting or degenerate"));
        } else if !is_convex(&area.boundary) {
            out.push(Violation::new(&who, "boundary is not convex"));
        } else if !area.contains(area.waypoint.position()) {
            out.push(Violation::new(&who, "waypoint lies outside the area boundary"));
        }
        match grid.cell_of(area.waypoint.position()) {
            None => out.push(Violation::new(&who, "waypoint lies outside the grid")),
            Some(cell) if grid.is_occupied(cell) => {
                out.push(Violation::new(&who, format!("waypoint lies on occupied cell {cell:?}")))
            }
            Some(_) => {}
        }
        if area.name.trim().is_empty() {
            out.push(Violation::new(&who, "empty display name"));
        }
    }

    let mut seen = BTreeSet::new();
    for art in &map.artworks {
        let who = format!("artwork '{}'", art.id);
        if !seen.insert(art.id.clone()) {
            out.push(Violation::new(&who, "duplicate artwork id"));
        }
        if !(art.trigger_radius > 0.0 && art.trigger_radius.is_finite()) {
            out.push(Violation::new(&who, "trigger radius must be strictly positive"));
        }
        if art.facts.is_empty() || art.facts.iter().any(|f| f.trim().is_empty()) {
            out.push(Violation::new(
                &who,
                "facts must be a non-empty list of non-empty entries",
            ));
        }
        if art.passing_utterance.trim().is_empty() {
            out.push(Violation::new(&who, "empty passing utterance"));
        }
        if map.area_at(art.position).is_none() {
            out.push(Violation::new(&who, "position lies outside every area boundary"));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fixture() -> String {
        std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/museum.json")).unwrap()
    }

    fn tiny_doc() -> MuseumDocument {
        // 5x5 grid, 1 m cells, one wall cell at row 2 col 2
        MuseumDocument {
            grid: GridDoc {
                width: 5,
                height: 5,
                resolution_m: 1.0,
                occupied: vec![[2, 2]],
            },
            entrance: AreaId::from("hall"),
            areas: vec![
                AreaDoc {
                    id: "hall".into(),
                    name: "Hall".into(),
                    waypoint: [0.5, 0.5, 0.0],
                    boundary: vec![[0.0, 0.0], [5.0, 0.0], [5.0, 2.0], [0.0, 2.0]],
                    intro_text: "hall".into(),
                    mandatory_rank: None,
                },
                AreaDoc {
                    id: "west".into(),
                    name: "West".into(),
                    waypoint: [1.5, 3.5, 0.0],
                    boundary: vec![[0.0, 2.0], [2.5, 2.0], [2.5, 5.0], [0.0, 5.0]],
                    intro_text: "west".into(),
                    mandatory_rank: Some(1),
                },
                AreaDoc {
                    id: "east".into(),
                    name: "East".into(),
                    waypoint: [3.5, 3.5, 0.0],
                    boundary: vec![[2.5, 2.0], [5.0, 2.0], [5.0, 5.0], [2.5, 5.0]],
                    intro_text: "east".into(),
                    mandatory_rank: Some(2),
                },
            ],
            artworks: vec![ArtworkDoc {
                id: "w1".into(),
                title: "W".into(),
                author: "A".into(),
                position: [0.5, 4.5],
                facts: vec!["fact".into()],
                trigger_radius_m: 1.0,
                passing_utterance: "passing w1".into(),
            }],
        }
    }

    #[test]
    fn fixture_loads_with_seven_tour_areas() {
        let map = load_museum(&fixture()).unwrap();
        let names: Vec<&str> = map.tour_areas().map(|a| a.name.as_str()).collect();
        assert_eq!(
            names,
            [
                "Sails",
                "Ports of Europe",
                "Military Ships",
                "Navigation Instruments",
                "Ocean Liners",
                "Port of Genoa",
                "Emigration"
            ]
        );
        assert_eq!(map.entrance().name, "Entrance");
        assert!(validate_museum(&map).is_empty());
    }

    #[test]
    fn zero_areas_reports_missing_entrance() {
        let mut doc = tiny_doc();
        doc.areas.clear();
        doc.artworks.clear();
        let err = MuseumMap::from_document(doc).unwrap_err();
        let MuseumError::Validation(v) = err else {
            panic!("{err}")
        };
        assert!(v.iter().any(|x| x.message.contains("entrance missing")), "{v:?}");
    }

    #[test]
    fn duplicate_mandatory_rank_is_reported_for_both_areas() {
        let mut doc = tiny_doc();
        doc.areas[2].mandatory_rank = Some(1);
        let MuseumError::Validation(v) = MuseumMap::from_document(doc).unwrap_err() else {
            panic!()
        };
        let dups: Vec<_> = v
            .iter()
            .filter(|x| x.message.contains("duplicate mandatory rank"))
            .collect();
        assert_eq!(dups.len(), 2);
        assert!(v.iter().any(|x| x.message.contains("no area carries mandatory rank 2")));
    }

    #[test]
    fn all_violations_are_collected() {
        let mut doc = tiny_doc();
        doc.areas[1].waypoint = [2.5, 2.5, 0.0]; // occupied cell (2,2), on the boundary edge
        doc.artworks[0].facts.clear();
        doc.artworks[0].trigger_radius_m = 0.0;
        let MuseumError::Validation(v) = MuseumMap::from_document(doc).unwrap_err() else {
            panic!()
        };
        assert_eq!(v.len(), 3, "{v:?}");
    }

    #[test]
    fn waypoint_on_occupied_cell_names_the_area() {
        // hand check on the 5x5 grid: (2.5, 2.5) -> col 2, row 2, which is the wall cell
        let mut map = MuseumMap::from_document(tiny_doc()).unwrap();
        map.areas[2].waypoint = Pose::new(2.7, 2.9, 0.0);
        let v = validate_museum(&map);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].entity, "area 'east'");
        assert!(v[0].message.contains("occupied cell (2, 2)"));
    }

    #[test]
    fn artwork_outside_all_boundaries() {
        let mut map = MuseumMap::from_document(tiny_doc()).unwrap();
        map.grid.set_occupied((4, 4), true);
        map.artworks[0].position = Point::new(6.5, 4.5);
        let v = validate_museum(&map);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].entity, "artwork 'w1'");
    }

    #[test]
    fn owner_area_lookup() {
        let map = load_museum(&fixture()).unwrap();
        assert_eq!(map.owner_area(&"sails-01".into()).unwrap().name, "Sails");
        assert!(matches!(
            map.owner_area(&"nope".into()),
            Err(MuseumError::UnknownArtwork(_))
        ));
    }

    #[test]
    fn shared_vertex_goes_to_earliest_area() {
        // (2.5, 2.0) is a vertex of hall's edge, west's corner and east's corner
        let mut map = MuseumMap::from_document(tiny_doc()).unwrap();
        map.artworks[0].position = Point::new(2.5, 2.0);
        assert_eq!(map.owner_area(&"w1".into()).unwrap().id.as_str(), "hall");
        // with hall gone the tie goes to west, listed before east
        map.areas[0].boundary = vec![
            Point::new(0.0, 0.0),
            Point::new(5.0, 0.0),
            Point::new(5.0, 1.0),
            Point::new(0.0, 1.0),
        ];
        assert_eq!(map.owner_area(&"w1".into()).unwrap().id.as_str(), "west");
    }

    #[test]
    fn every_fixture_artwork_has_one_owner() {
        let map = load_museum(&fixture()).unwrap();
        for art in &map.artworks {
            let owners = map.areas.iter().filter(|a| a.contains(art.position)).count();
            assert_eq!(owners, 1, "{}", art.id);
        }
    }

    #[test]
    fn parse_error_for_malformed_json() {
        assert!(matches!(load_museum("{ not json"), Err(MuseumError::Parse(_))));
        assert!(matches!(load_museum(r#"{"grid": 3}"#), Err(MuseumError::Parse(_))));
    }

    #[test]
    fn area_name_resolution() {
        let map = load_museum(&fixture()).unwrap();
        assert_eq!(map.resolve_area_name("the Sails area?").unwrap().id.as_str(), "sails");
        assert_eq!(
            map.resolve_area_name("port-of-genoa").unwrap().id.as_str(),
            "port-of-genoa"
        );
        assert_eq!(
            map.resolve_area_name("The Military Ships").unwrap().id.as_str(),
            "military-ships"
        );
        assert!(map.resolve_area_name("cafeteria").is_none());
    }
}
