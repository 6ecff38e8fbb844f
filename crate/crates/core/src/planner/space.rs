use crate::envmodel::{Cell, EnvError, Environment, UNREACHABLE};

use super::Result;

/// An environment plus cached grid distance fields from every tuple's
/// approach cell, so leg lengths are table lookups during search.
#[derive(Debug, Clone)]
pub struct SearchSpace<'a> {
    env: &'a Environment,
    fields: Vec<Vec<u32>>,
}

impl<'a> SearchSpace<'a> {
    pub fn new(env: &'a Environment) -> Self {
        let fields = (0..env.tuples().len())
            .map(|t| env.map().distance_field(env.approach_cell(t)))
            .collect();
        Self { env, fields }
    }

    pub fn env(&self) -> &'a Environment {
        self.env
    }

    pub fn num_tuples(&self) -> usize {
        self.fields.len()
    }

    /// Shortest-path meters from `from` to the approach cell of `tuple`.
    pub fn distance_to(&self, from: Cell, tuple: usize) -> Result<f64> {
        let map = self.env.map();
        let to = self.env.approach_cell(tuple);
        if !map.is_free(from) {
            return Err(EnvError::BlockedCell(from).into());
        }
        match self.fields[tuple][map.index(from)] {
            UNREACHABLE => Err(EnvError::NoPath { from, to }.into()),
            steps => Ok(f64::from(steps) * map.resolution()),
        }
    }

    /// Shortest-path meters between two tuples' approach cells.
    pub fn tuple_distance(&self, a: usize, b: usize) -> Result<f64> {
        self.distance_to(self.env.approach_cell(a), b)
    }

    /// Distances from `from` to every tuple, in tuple order.
    pub fn distances_from(&self, from: Cell) -> Result<Vec<f64>> {
        (0..self.num_tuples()).map(|t| self.distance_to(from, t)).collect()
    }

    /// Meters from `from` to the nearest free cell of room `room`; zero inside it.
    pub fn room_distance(&self, from: Cell, room: usize) -> Result<f64> {
        let map = self.env.map();
        let field = map.distance_field(from);
        self.env.rooms()[room]
            .cells
            .iter()
            .filter(|c| map.is_free(**c))
            .map(|c| field[map.index(*c)])
            .filter(|&s| s != UNREACHABLE)
            .min()
            .map(|s| f64::from(s) * map.resolution())
            .ok_or_else(|| {
                EnvError::NoPath {
                    from,
                    to: self.env.rooms()[room].cells[0],
                }
                .into()
            })
    }
}
