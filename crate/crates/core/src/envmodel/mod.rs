//! The simulated household: occupancy grid, labelled rooms, landmark
//! instances, object kinds and their ground-truth placement distributions.
//!
//! Location tuples are `(landmark category, room label)` pairs and an
//! environment holds at most one landmark per pair, so a tuple always names a
//! single physical place. Tuples and objects are kept in lexicographic order;
//! every index handed out by [`Environment`] refers to that order.

mod config;
mod grid;
mod world;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use config::{EnvironmentConfig, GridConfig, LandmarkConfig, Rect, RoomConfig};
pub use grid::{Cell, GridMap, UNREACHABLE};
pub use world::{episode_rng, observe_at, sample_placements, RngStream, WorldState};

/// Tolerance within which a configured distribution row is silently renormalized.
pub const RENORMALIZE_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum EnvError {
    #[error("failed to read environment: {0}")]
    Io(#[from] std::io::Error),
    #[error("failed to parse environment config: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("cell {0} is occupied or outside the grid")]
    BlockedCell(Cell),
    #[error("no free path from {from} to {to}")]
    NoPath { from: Cell, to: Cell },
    #[error("unknown room label `{0}`")]
    UnknownRoomLabel(String),
    #[error("unknown room id `{0}`")]
    UnknownRoom(String),
    #[error("rooms `{0}` and `{1}` overlap")]
    OverlappingRooms(String, String),
    #[error("duplicate room id `{0}`")]
    DuplicateRoom(String),
    #[error("duplicate landmark tuple {0}")]
    DuplicateTuple(LocationTuple),
    #[error("landmark {tuple} at {cell} is not on a free cell")]
    LandmarkOccupied { tuple: LocationTuple, cell: Cell },
    #[error("landmark {tuple} at {cell} lies outside room `{room}`")]
    LandmarkOutsideRoom {
        tuple: LocationTuple,
        cell: Cell,
        room: String,
    },
    #[error("landmark {0} has no free adjacent cell to stand on")]
    NoApproachCell(LocationTuple),
    #[error("malformed tuple key `{0}`, expected `category/room`")]
    MalformedTuple(String),
    #[error("unknown location tuple {0}")]
    UnknownTuple(String),
    #[error("unknown object `{0}`")]
    UnknownObject(String),
    #[error("duplicate object `{0}`")]
    DuplicateObject(String),
    #[error("environment must define at least one object and one landmark")]
    Empty,
    #[error("distribution for `{object}` is invalid: {reason}")]
    BadDistribution { object: String, reason: String },
    #[error("episode index must be at least 1")]
    ZeroEpisode,
}

/// The four room categories.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RoomLabel {
    #[serde(rename = "bedroom")]
    Bedroom,
    #[serde(rename = "living")]
    LivingRoom,
    #[serde(rename = "bathroom")]
    Bathroom,
    #[serde(rename = "study")]
    StudyRoom,
}

impl RoomLabel {
    pub const COUNT: usize = 4;
    pub const ALL: [RoomLabel; Self::COUNT] = [
        RoomLabel::Bedroom,
        RoomLabel::LivingRoom,
        RoomLabel::Bathroom,
        RoomLabel::StudyRoom,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn as_str(self) -> &'static str {
        match self {
            RoomLabel::Bedroom => "bedroom",
            RoomLabel::LivingRoom => "living",
            RoomLabel::Bathroom => "bathroom",
            RoomLabel::StudyRoom => "study",
        }
    }
}

impl fmt::Display for RoomLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RoomLabel {
    type Err = EnvError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "bedroom" => Ok(RoomLabel::Bedroom),
            "living" => Ok(RoomLabel::LivingRoom),
            "bathroom" => Ok(RoomLabel::Bathroom),
            "study" => Ok(RoomLabel::StudyRoom),
            other => Err(EnvError::UnknownRoomLabel(other.to_string())),
        }
    }
}

/// A `(landmark category, room label)` pair, written `category/room`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LocationTuple {
    pub landmark: String,
    pub room: RoomLabel,
}

impl LocationTuple {
    pub fn new(landmark: impl Into<String>, room: RoomLabel) -> Self {
        Self {
            landmark: landmark.into(),
            room,
        }
    }

    pub fn name(&self) -> String {
        format!("{}/{}", self.landmark, self.room)
    }
}

impl fmt::Display for LocationTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.landmark, self.room)
    }
}

impl FromStr for LocationTuple {
    type Err = EnvError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (landmark, room) = s
            .split_once('/')
            .filter(|(l, _)| !l.is_empty())
            .ok_or_else(|| EnvError::MalformedTuple(s.to_string()))?;
        Ok(Self::new(landmark, room.parse()?))
    }
}

impl Ord for LocationTuple {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.name().cmp(&other.name())
    }
}

impl PartialOrd for LocationTuple {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Serialize for LocationTuple {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.name())
    }
}

impl<'de> Deserialize<'de> for LocationTuple {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Room {
    pub id: String,
    pub label: RoomLabel,
    pub cells: Vec<Cell>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LandmarkInstance {
    pub id: usize,
    pub category: String,
    pub position: Cell,
    /// Index into [`Environment::rooms`].
    pub room: usize,
    /// Free cell next to the landmark where the agent stands to inspect it.
    pub approach: Cell,
}

impl LandmarkInstance {
    pub fn tuple(&self, rooms: &[Room]) -> LocationTuple {
        LocationTuple::new(self.category.clone(), rooms[self.room].label)
    }
}

/// Immutable world description shared by every experiment.
#[derive(Debug, Clone)]
pub struct Environment {
    name: String,
    map: GridMap,
    rooms: Vec<Room>,
    landmarks: Vec<LandmarkInstance>,
    objects: Vec<String>,
    tuples: Vec<LocationTuple>,
    /// Landmark index for each tuple.
    tuple_landmark: Vec<usize>,
    /// Row-major `objects x tuples`.
    truth: Vec<f64>,
    cell_room: Vec<Option<usize>>,
    start: Option<Cell>,
}

impl Environment {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn map(&self) -> &GridMap {
        &self.map
    }

    pub fn rooms(&self) -> &[Room] {
        &self.rooms
    }

    pub fn landmarks(&self) -> &[LandmarkInstance] {
        &self.landmarks
    }

    /// Object kinds in lexicographic order.
    pub fn objects(&self) -> &[String] {
        &self.objects
    }

    /// Location tuples in lexicographic order.
    pub fn tuples(&self) -> &[LocationTuple] {
        &self.tuples
    }

    pub fn start(&self) -> Option<Cell> {
        self.start
    }

    pub fn object_index(&self, name: &str) -> Option<usize> {
        self.objects.binary_search_by(|o| o.as_str().cmp(name)).ok()
    }

    pub fn tuple_index(&self, tuple: &LocationTuple) -> Option<usize> {
        self.tuples.binary_search(tuple).ok()
    }

    pub fn require_object(&self, name: &str) -> Result<usize, EnvError> {
        self.object_index(name)
            .ok_or_else(|| EnvError::UnknownObject(name.to_string()))
    }

    pub fn require_tuple(&self, tuple: &LocationTuple) -> Result<usize, EnvError> {
        self.tuple_index(tuple)
            .ok_or_else(|| EnvError::UnknownTuple(tuple.name()))
    }

    pub fn landmark_of_tuple(&self, tuple: usize) -> &LandmarkInstance {
        &self.landmarks[self.tuple_landmark[tuple]]
    }

    pub fn approach_cell(&self, tuple: usize) -> Cell {
        self.landmark_of_tuple(tuple).approach
    }

    /// Room index (into [`rooms`](Self::rooms)) containing the tuple's landmark.
    pub fn room_of_tuple(&self, tuple: usize) -> usize {
        self.landmark_of_tuple(tuple).room
    }

    pub fn room_at(&self, cell: Cell) -> Option<usize> {
        if !self.map.contains(cell) {
            return None;
        }
        self.cell_room[self.map.index(cell)]
    }

    /// Ground-truth placement distribution of one object over [`tuples`](Self::tuples).
    pub fn truth_row(&self, object: usize) -> &[f64] {
        let n = self.tuples.len();
        &self.truth[object * n..(object + 1) * n]
    }

    /// Tuple indices of an object's `k` most likely true placements, ties
    /// broken by tuple order. Zero-probability tuples are skipped.
    pub fn most_likely_tuples(&self, object: usize, k: usize) -> Vec<usize> {
        let row = self.truth_row(object);
        let mut idx: Vec<usize> = (0..row.len()).filter(|&t| row[t] > 0.0).collect();
        idx.sort_by(|&a, &b| row[b].total_cmp(&row[a]).then(a.cmp(&b)));
        idx.truncate(k);
        idx
    }

    /// Builds the environment from an already parsed config, checking every
    /// structural invariant.
    pub fn from_config(cfg: EnvironmentConfig) -> Result<Self, EnvError> {
        config::build(cfg)
    }

    /// Parses a JSON config document.
    pub fn from_json(text: &str) -> Result<Self, EnvError> {
        let cfg: EnvironmentConfig = serde_json::from_str(text)?;
        Self::from_config(cfg)
    }

    /// Reads and parses a JSON config file.
    pub fn load(path: impl AsRef<std::path::Path>) -> Result<Self, EnvError> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }

    /// The reference 4-room, 9-landmark household shipped with the crate.
    pub fn reference() -> Self {
        Self::from_json(REFERENCE_ENV).expect("shipped reference environment is valid")
    }
}

/// JSON source of the reference household.
pub const REFERENCE_ENV: &str = include_str!("../../data/reference_env.json");

/// Parses a JSON environment document; identical bytes give identical environments.
pub fn load_environment(config: &str) -> Result<Environment, EnvError> {
    Environment::from_json(config)
}
