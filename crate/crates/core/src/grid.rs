//! Dense row-major grids used for maps, beliefs and coverage masks.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A rectangular grid stored row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid<T> {
    width: usize,
    height: usize,
    cells: Vec<T>,
}

impl<T> Grid<T> {
    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut cells = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                cells.push(f(x, y));
            }
        }
        Self {
            width,
            height,
            cells,
        }
    }

    pub fn filled(width: usize, height: usize, value: T) -> Self
    where
        T: Clone,
    {
        Self {
            width,
            height,
            cells: vec![value; width * height],
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn contains(&self, x: usize, y: usize) -> bool {
        x < self.width && y < self.height
    }

    pub fn get(&self, x: usize, y: usize) -> Option<&T> {
        if self.contains(x, y) {
            Some(&self.cells[y * self.width + x])
        } else {
            None
        }
    }

    /// Panics when out of bounds; use [`Grid::get`] or [`Grid::checked`] at trust boundaries.
    pub fn at(&self, x: usize, y: usize) -> &T {
        &self.cells[y * self.width + x]
    }

    pub fn at_mut(&mut self, x: usize, y: usize) -> &mut T {
        &mut self.cells[y * self.width + x]
    }

    pub fn checked(&self, x: usize, y: usize) -> Result<&T> {
        self.get(x, y).ok_or(Error::OutOfBounds {
            x,
            y,
            width: self.width,
            height: self.height,
        })
    }

    pub fn set(&mut self, x: usize, y: usize, value: T) {
        self.cells[y * self.width + x] = value;
    }

    pub fn cells(&self) -> &[T] {
        &self.cells
    }

    /// Row-major iteration yielding `((x, y), &cell)`.
    pub fn iter(&self) -> impl Iterator<Item = ((usize, usize), &T)> {
        let w = self.width;
        self.cells
            .iter()
            .enumerate()
            .map(move |(i, c)| ((i % w, i / w), c))
    }
}

/// A packed bit mask over a rectangular grid. Cheap to clone, which matters
/// because belief snapshots carry one per planning rollout.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitGrid {
    width: usize,
    height: usize,
    words: Vec<u64>,
}

impl BitGrid {
    pub fn new(width: usize, height: usize) -> Self {
        let bits = width * height;
        Self {
            width,
            height,
            words: vec![0; bits.div_ceil(64)],
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn contains(&self, x: usize, y: usize) -> bool {
        x < self.width && y < self.height
    }

    pub fn get(&self, x: usize, y: usize) -> bool {
        debug_assert!(self.contains(x, y));
        let bit = y * self.width + x;
        self.words[bit / 64] >> (bit % 64) & 1 == 1
    }

    pub fn set(&mut self, x: usize, y: usize) {
        debug_assert!(self.contains(x, y));
        let bit = y * self.width + x;
        self.words[bit / 64] |= 1 << (bit % 64);
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }
}
