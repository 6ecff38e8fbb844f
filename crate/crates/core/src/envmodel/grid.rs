//! Occupancy grid and 4-connected shortest paths.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::EnvError;

/// A grid cell, `x` is the column and `y` the row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "(usize, usize)", into = "(usize, usize)")]
pub struct Cell {
    pub x: usize,
    pub y: usize,
}

impl Cell {
    pub const fn new(x: usize, y: usize) -> Self {
        Self { x, y }
    }

    pub fn manhattan(self, other: Cell) -> usize {
        self.x.abs_diff(other.x) + self.y.abs_diff(other.y)
    }
}

impl From<(usize, usize)> for Cell {
    fn from((x, y): (usize, usize)) -> Self {
        Self { x, y }
    }
}

impl From<Cell> for (usize, usize) {
    fn from(c: Cell) -> Self {
        (c.x, c.y)
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// Sentinel for unreachable cells in a [`GridMap::distance_field`].
pub const UNREACHABLE: u32 = u32::MAX;

#[derive(Debug, Clone, PartialEq)]
pub struct GridMap {
    width: usize,
    height: usize,
    resolution: f64,
    occupied: Vec<bool>,
}

impl GridMap {
    /// Builds an all-free grid.
    pub fn new(width: usize, height: usize, resolution: f64) -> Result<Self, EnvError> {
        if width == 0 || height == 0 {
            return Err(EnvError::InvalidGrid(format!(
                "dimensions must be positive, got {width}x{height}"
            )));
        }
        if !(resolution.is_finite() && resolution > 0.0) {
            return Err(EnvError::InvalidGrid(format!(
                "resolution must be positive, got {resolution}"
            )));
        }
        Ok(Self {
            width,
            height,
            resolution,
            occupied: vec![false; width * height],
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// Meters per cell.
    pub fn resolution(&self) -> f64 {
        self.resolution
    }

    pub fn contains(&self, c: Cell) -> bool {
        c.x < self.width && c.y < self.height
    }

    pub fn index(&self, c: Cell) -> usize {
        c.y * self.width + c.x
    }

    pub fn cell_at(&self, index: usize) -> Cell {
        Cell::new(index % self.width, index / self.width)
    }

    pub fn set_occupied(&mut self, c: Cell, occupied: bool) -> Result<(), EnvError> {
        if !self.contains(c) {
            return Err(EnvError::InvalidGrid(format!("cell {c} outside the grid")));
        }
        let i = self.index(c);
        self.occupied[i] = occupied;
        Ok(())
    }

    pub fn is_free(&self, c: Cell) -> bool {
        self.contains(c) && !self.occupied[self.index(c)]
    }

    pub fn free_cells(&self) -> impl Iterator<Item = Cell> + '_ {
        (0..self.width * self.height)
            .filter(|&i| !self.occupied[i])
            .map(|i| self.cell_at(i))
    }

    /// Free 4-neighbours in the fixed order up, right, down, left.
    pub fn neighbors(&self, c: Cell) -> impl Iterator<Item = Cell> + '_ {
        let up = c.y.checked_sub(1).map(|y| Cell::new(c.x, y));
        let right = Some(Cell::new(c.x + 1, c.y));
        let down = Some(Cell::new(c.x, c.y + 1));
        let left = c.x.checked_sub(1).map(|x| Cell::new(x, c.y));
        [up, right, down, left]
            .into_iter()
            .flatten()
            .filter(move |&n| self.is_free(n))
    }

    /// Number of steps on a shortest 4-connected path, found with A* and the
    /// Manhattan heuristic.
    pub fn shortest_path_steps(&self, a: Cell, b: Cell) -> Result<usize, EnvError> {
        for c in [a, b] {
            if !self.is_free(c) {
                return Err(EnvError::BlockedCell(c));
            }
        }
        if a == b {
            return Ok(0);
        }
        let mut g = vec![u32::MAX; self.width * self.height];
        let mut open = BinaryHeap::new();
        g[self.index(a)] = 0;
        open.push(Reverse((a.manhattan(b), 0u32, self.index(a))));
        while let Some(Reverse((_, cost, idx))) = open.pop() {
            if cost > g[idx] {
                continue;
            }
            let cell = self.cell_at(idx);
            if cell == b {
                return Ok(cost as usize);
            }
            for n in self.neighbors(cell) {
                let ni = self.index(n);
                let next = cost + 1;
                if next < g[ni] {
                    g[ni] = next;
                    open.push(Reverse((next as usize + n.manhattan(b), next, ni)));
                }
            }
        }
        Err(EnvError::NoPath { from: a, to: b })
    }

    /// Shortest-path length in meters between two free cells.
    pub fn shortest_path_distance(&self, a: Cell, b: Cell) -> Result<f64, EnvError> {
        self.shortest_path_steps(a, b).map(|s| s as f64 * self.resolution)
    }

    /// Breadth-first step counts from `source` to every cell; occupied or
    /// unreachable cells hold [`UNREACHABLE`].
    pub fn distance_field(&self, source: Cell) -> Vec<u32> {
        let mut dist = vec![UNREACHABLE; self.width * self.height];
        if !self.is_free(source) {
            return dist;
        }
        let mut queue = VecDeque::new();
        dist[self.index(source)] = 0;
        queue.push_back(source);
        while let Some(c) = queue.pop_front() {
            let d = dist[self.index(c)];
            for n in self.neighbors(c) {
                let ni = self.index(n);
                if dist[ni] == UNREACHABLE {
                    dist[ni] = d + 1;
                    queue.push_back(n);
                }
            }
        }
        dist
    }
}
