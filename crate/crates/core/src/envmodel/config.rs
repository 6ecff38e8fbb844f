//! JSON schema for environment documents.
//!
//! ```json
//! {
//!   "name": "flat",
//!   "grid": { "width": 10, "height": 6, "resolution": 0.25,
//!             "occupied": [[4, 0]], "occupied_rects": [[5, 0, 5, 5]] },
//!   "rooms": [{ "id": "bed", "label": "bedroom", "rects": [[0, 0, 4, 5]] }],
//!   "landmarks": [{ "category": "bed", "cell": [1, 1], "room": "bed" }],
//!   "objects": ["teddy"],
//!   "true_distribution": { "teddy": { "bed/bedroom": 1.0 } },
//!   "start": [2, 3]
//! }
//! ```
//!
//! Rectangles are inclusive `[x0, y0, x1, y1]`. Unknown keys are rejected.
//! Tuples missing from an object's distribution have probability zero.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use super::{
    Cell, EnvError, Environment, GridMap, LandmarkInstance, LocationTuple, Room, RoomLabel, RENORMALIZE_TOLERANCE,
};

/// Inclusive cell rectangle `[x0, y0, x1, y1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rect(pub [usize; 4]);

impl Rect {
    fn cells(&self) -> impl Iterator<Item = Cell> {
        let [x0, y0, x1, y1] = self.0;
        (y0.min(y1)..=y0.max(y1)).flat_map(move |y| (x0.min(x1)..=x0.max(x1)).map(move |x| Cell::new(x, y)))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub width: usize,
    pub height: usize,
    pub resolution: f64,
    #[serde(default)]
    pub occupied: Vec<Cell>,
    #[serde(default)]
    pub occupied_rects: Vec<Rect>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RoomConfig {
    pub id: String,
    pub label: RoomLabel,
    pub rects: Vec<Rect>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LandmarkConfig {
    pub category: String,
    pub cell: Cell,
    /// Room id.
    pub room: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnvironmentConfig {
    #[serde(default)]
    pub name: String,
    pub grid: GridConfig,
    pub rooms: Vec<RoomConfig>,
    pub landmarks: Vec<LandmarkConfig>,
    pub objects: Vec<String>,
    pub true_distribution: BTreeMap<String, BTreeMap<String, f64>>,
    #[serde(default)]
    pub start: Option<Cell>,
}

pub(super) fn build(cfg: EnvironmentConfig) -> Result<Environment, EnvError> {
    let mut map = GridMap::new(cfg.grid.width, cfg.grid.height, cfg.grid.resolution)?;
    for &c in &cfg.grid.occupied {
        map.set_occupied(c, true)?;
    }
    for r in &cfg.grid.occupied_rects {
        for c in r.cells() {
            map.set_occupied(c, true)?;
        }
    }

    let mut cell_room: Vec<Option<usize>> = vec![None; map.width() * map.height()];
    let mut rooms = Vec::with_capacity(cfg.rooms.len());
    let mut room_ids: HashMap<&str, usize> = HashMap::new();
    for (ri, rc) in cfg.rooms.iter().enumerate() {
        if room_ids.insert(rc.id.as_str(), ri).is_some() {
            return Err(EnvError::DuplicateRoom(rc.id.clone()));
        }
        let mut cells = BTreeSet::new();
        for r in &rc.rects {
            for c in r.cells() {
                if !map.contains(c) {
                    return Err(EnvError::InvalidGrid(format!(
                        "room `{}` extends outside the grid at {c}",
                        rc.id
                    )));
                }
                let slot = &mut cell_room[map.index(c)];
                match *slot {
                    Some(other) if other != ri => {
                        return Err(EnvError::OverlappingRooms(cfg.rooms[other].id.clone(), rc.id.clone()))
                    }
                    _ => *slot = Some(ri),
                }
                cells.insert(c);
            }
        }
        rooms.push(Room {
            id: rc.id.clone(),
            label: rc.label,
            cells: cells.into_iter().collect(),
        });
    }

    let mut landmarks = Vec::with_capacity(cfg.landmarks.len());
    let mut seen = BTreeSet::new();
    for (id, lc) in cfg.landmarks.iter().enumerate() {
        let room = *room_ids
            .get(lc.room.as_str())
            .ok_or_else(|| EnvError::UnknownRoom(lc.room.clone()))?;
        let tuple = LocationTuple::new(lc.category.clone(), rooms[room].label);
        if lc.category.is_empty() || lc.category.contains('/') {
            return Err(EnvError::MalformedTuple(lc.category.clone()));
        }
        if !seen.insert(tuple.clone()) {
            return Err(EnvError::DuplicateTuple(tuple));
        }
        if !map.is_free(lc.cell) {
            return Err(EnvError::LandmarkOccupied { tuple, cell: lc.cell });
        }
        if cell_room[map.index(lc.cell)] != Some(room) {
            return Err(EnvError::LandmarkOutsideRoom {
                tuple,
                cell: lc.cell,
                room: lc.room.clone(),
            });
        }
        let approach =
            approach_cell(&map, &cell_room, lc.cell, room).ok_or_else(|| EnvError::NoApproachCell(tuple.clone()))?;
        landmarks.push(LandmarkInstance {
            id,
            category: lc.category.clone(),
            position: lc.cell,
            room,
            approach,
        });
    }
    if landmarks.is_empty() || cfg.objects.is_empty() {
        return Err(EnvError::Empty);
    }

    let mut order: Vec<usize> = (0..landmarks.len()).collect();
    order.sort_by_key(|&i| landmarks[i].tuple(&rooms));
    let tuples: Vec<LocationTuple> = order.iter().map(|&i| landmarks[i].tuple(&rooms)).collect();
    let tuple_pos: HashMap<String, usize> = tuples.iter().enumerate().map(|(i, t)| (t.name(), i)).collect();

    let mut objects = cfg.objects.clone();
    objects.sort();
    for w in objects.windows(2) {
        if w[0] == w[1] {
            return Err(EnvError::DuplicateObject(w[0].clone()));
        }
    }
    for name in cfg.true_distribution.keys() {
        if objects.binary_search(name).is_err() {
            return Err(EnvError::UnknownObject(name.clone()));
        }
    }

    let n = tuples.len();
    let mut truth = vec![0.0; objects.len() * n];
    for (oi, name) in objects.iter().enumerate() {
        let row_cfg = cfg
            .true_distribution
            .get(name)
            .ok_or_else(|| EnvError::BadDistribution {
                object: name.clone(),
                reason: "missing".into(),
            })?;
        let row = &mut truth[oi * n..(oi + 1) * n];
        for (key, &p) in row_cfg {
            let tuple: LocationTuple = key.parse()?;
            let ti = *tuple_pos
                .get(&tuple.name())
                .ok_or_else(|| EnvError::UnknownTuple(key.clone()))?;
            if !(p.is_finite() && p >= 0.0) {
                return Err(EnvError::BadDistribution {
                    object: name.clone(),
                    reason: format!("probability {p} at {key}"),
                });
            }
            row[ti] = p;
        }
        normalize_row(row).map_err(|reason| EnvError::BadDistribution {
            object: name.clone(),
            reason,
        })?;
    }

    if let Some(s) = cfg.start {
        if !map.is_free(s) {
            return Err(EnvError::BlockedCell(s));
        }
    }

    Ok(Environment {
        name: cfg.name,
        map,
        rooms,
        tuple_landmark: order,
        landmarks,
        objects,
        tuples,
        truth,
        cell_room,
        start: cfg.start,
    })
}

/// Accepts rows summing to one within [`RENORMALIZE_TOLERANCE`] and rescales
/// them to sum to one exactly (up to rounding).
fn normalize_row(row: &mut [f64]) -> Result<(), String> {
    let sum: f64 = row.iter().sum();
    if (sum - 1.0).abs() > RENORMALIZE_TOLERANCE {
        return Err(format!("row sums to {sum}"));
    }
    row.iter_mut().for_each(|p| *p /= sum);
    Ok(())
}

/// First free neighbour inside the landmark's room, falling back to any free
/// neighbour.
fn approach_cell(map: &GridMap, cell_room: &[Option<usize>], at: Cell, room: usize) -> Option<Cell> {
    let mut fallback = None;
    for n in map.neighbors(at) {
        if cell_room[map.index(n)] == Some(room) {
            return Some(n);
        }
        fallback.get_or_insert(n);
    }
    fallback
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minimal() -> serde_json::Value {
        serde_json::json!({
            "name": "tiny",
            "grid": { "width": 4, "height": 3, "resolution": 0.5 },
            "rooms": [{ "id": "b", "label": "bathroom", "rects": [[0, 0, 3, 2]] }],
            "landmarks": [{ "category": "sink", "cell": [1, 1], "room": "b" }],
            "objects": ["toothbrush"],
            "true_distribution": { "toothbrush": { "sink/bathroom": 1.0 } }
        })
    }

    fn load(v: serde_json::Value) -> Result<Environment, EnvError> {
        Environment::from_json(&v.to_string())
    }

    #[test]
    fn minimal_world_loads() {
        let env = load(minimal()).unwrap();
        assert_eq!(env.tuples().len(), 1);
        assert_eq!(env.truth_row(0), &[1.0]);
        let lm = &env.landmarks()[0];
        assert!(env.map().is_free(lm.approach));
        assert_eq!(lm.approach.manhattan(lm.position), 1);
    }

    #[test]
    fn duplicate_category_in_room_rejected() {
        let mut v = minimal();
        v["landmarks"] = serde_json::json!([
            { "category": "table", "cell": [1, 1], "room": "b" },
            { "category": "table", "cell": [2, 1], "room": "b" }
        ]);
        v["true_distribution"] = serde_json::json!({ "toothbrush": { "table/bathroom": 1.0 } });
        assert!(matches!(load(v), Err(EnvError::DuplicateTuple(_))));
    }

    #[test]
    fn landmark_on_wall_rejected() {
        let mut v = minimal();
        v["grid"]["occupied"] = serde_json::json!([[1, 1]]);
        assert!(matches!(load(v), Err(EnvError::LandmarkOccupied { .. })));
    }

    #[test]
    fn unknown_keys_rejected() {
        let mut v = minimal();
        v["colour"] = serde_json::json!("blue");
        assert!(matches!(load(v), Err(EnvError::Parse(_))));
        let mut v = minimal();
        v["grid"]["depth"] = serde_json::json!(3);
        assert!(matches!(load(v), Err(EnvError::Parse(_))));
    }

    #[test]
    fn near_normalized_rows_are_rescaled() {
        let mut v = minimal();
        v["landmarks"] = serde_json::json!([
            { "category": "sink", "cell": [1, 1], "room": "b" },
            { "category": "shelf", "cell": [2, 1], "room": "b" }
        ]);
        v["true_distribution"] =
            serde_json::json!({ "toothbrush": { "sink/bathroom": 0.5000004, "shelf/bathroom": 0.5 } });
        let env = load(v.clone()).unwrap();
        let s: f64 = env.truth_row(0).iter().sum();
        assert!((s - 1.0).abs() < 1e-12);

        v["true_distribution"] = serde_json::json!({ "toothbrush": { "sink/bathroom": 0.51, "shelf/bathroom": 0.5 } });
        assert!(matches!(load(v), Err(EnvError::BadDistribution { .. })));
    }

    #[test]
    fn unknown_tuple_and_object_rejected() {
        let mut v = minimal();
        v["true_distribution"] = serde_json::json!({ "toothbrush": { "bed/bathroom": 1.0 } });
        assert!(matches!(load(v), Err(EnvError::UnknownTuple(_))));
        let mut v = minimal();
        v["true_distribution"]["cup"] = serde_json::json!({ "sink/bathroom": 1.0 });
        assert!(matches!(load(v), Err(EnvError::UnknownObject(_))));
    }

    #[test]
    fn overlapping_rooms_rejected() {
        let mut v = minimal();
        v["rooms"] = serde_json::json!([
            { "id": "b", "label": "bathroom", "rects": [[0, 0, 2, 2]] },
            { "id": "s", "label": "study", "rects": [[2, 0, 3, 2]] }
        ]);
        assert!(matches!(load(v), Err(EnvError::OverlappingRooms(..))));
    }

    #[test]
    fn identical_bytes_identical_environment() {
        let text = minimal().to_string();
        let a = Environment::from_json(&text).unwrap();
        let b = Environment::from_json(&text).unwrap();
        assert_eq!(a.tuples(), b.tuples());
        assert_eq!(a.map(), b.map());
        assert_eq!(a.truth_row(0), b.truth_row(0));
    }
}
