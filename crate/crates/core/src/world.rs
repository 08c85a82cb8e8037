//! Random environment generation, ground-truth storage, and the grid
//! geometry shared by the world and the belief: map-cell/rock-cell mapping
//! and sensor footprints.
//!
//! The map is a coarse grid of location cells tiled by homogeneous regions;
//! a finer rock grid (an integer number of rock cells per map cell) holds
//! individual rocks. The remote sensor sees a rectangle of rock cells
//! projected ahead of the robot; the local sensor reads the robot's own map
//! cell.

use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::dist::Cpt;
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::knowledge::KnowledgeNet;
use crate::observation::{LocalObservation, ObservedRock, Observation, RemoteObservation};
use crate::sensing::{Pose, SensorKind};

/// Everything needed to generate a world deterministically.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorldConfig {
    /// Location-grid dimensions in cells.
    pub l_width: usize,
    pub l_height: usize,
    /// Region tile dimensions; each region gets one homogeneous location class.
    pub region_width: usize,
    pub region_height: usize,
    /// Rock-grid cells per location cell along each axis.
    pub rock_cells_per_l_cell: usize,
    /// Expected rocks per location cell (Poisson rate).
    pub rock_density: f64,
    /// Remote-sensor field of view in rock cells: extent ahead and across.
    pub fov_depth: usize,
    pub fov_width: usize,
    /// Fraction of location cells blocked by obstacles (0 = open terrain).
    #[serde(default)]
    pub obstacle_density: f64,
    /// Optional local-sensor confusion table P(reading | true material);
    /// `None` means the reading equals the true material.
    #[serde(default)]
    pub material_confusion: Option<Cpt>,
    pub seed: u64,
}

impl WorldConfig {
    /// Full-scale configuration: 40x40 map, 25 8x8 regions, 800x800 rock
    /// grid, 50x40 field of view.
    pub fn full_scale(seed: u64) -> Self {
        Self {
            l_width: 40,
            l_height: 40,
            region_width: 8,
            region_height: 8,
            rock_cells_per_l_cell: 20,
            rock_density: 1.0,
            fov_depth: 50,
            fov_width: 40,
            obstacle_density: 0.0,
            material_confusion: None,
            seed,
        }
    }

    /// Desk-scale configuration for fast benchmarking: 10x10 map, 2x2
    /// regions, 200x200 rock grid.
    pub fn desk_scale(seed: u64) -> Self {
        Self {
            l_width: 10,
            l_height: 10,
            region_width: 2,
            region_height: 2,
            rock_cells_per_l_cell: 20,
            rock_density: 1.0,
            fov_depth: 50,
            fov_width: 40,
            obstacle_density: 0.0,
            material_confusion: None,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.l_width == 0 || self.l_height == 0 {
            return Err(Error::InvalidConfig("empty location grid".into()));
        }
        if self.region_width == 0
            || self.region_height == 0
            || self.l_width % self.region_width != 0
            || self.l_height % self.region_height != 0
        {
            return Err(Error::InvalidConfig(format!(
                "region tile {}x{} does not divide the {}x{} location grid",
                self.region_width, self.region_height, self.l_width, self.l_height
            )));
        }
        if self.rock_cells_per_l_cell == 0 {
            return Err(Error::InvalidConfig(
                "rock_cells_per_l_cell must be positive".into(),
            ));
        }
        if self.rock_density < 0.0 {
            return Err(Error::InvalidConfig("negative rock density".into()));
        }
        if !(0.0..=1.0).contains(&self.obstacle_density) {
            return Err(Error::InvalidConfig(
                "obstacle density must lie in [0, 1]".into(),
            ));
        }
        Ok(())
    }

    pub fn geometry(&self) -> GridGeometry {
        GridGeometry {
            l_width: self.l_width,
            l_height: self.l_height,
            ratio: self.rock_cells_per_l_cell,
            fov_depth: self.fov_depth,
            fov_width: self.fov_width,
        }
    }
}

/// Grid-geometry math: dimensions of both grids and the sensor footprints.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridGeometry {
    pub l_width: usize,
    pub l_height: usize,
    /// Rock cells per location cell along each axis.
    pub ratio: usize,
    pub fov_depth: usize,
    pub fov_width: usize,
}

impl GridGeometry {
    pub fn rock_width(&self) -> usize {
        self.l_width * self.ratio
    }

    pub fn rock_height(&self) -> usize {
        self.l_height * self.ratio
    }

    pub fn l_cell_count(&self) -> usize {
        self.l_width * self.l_height
    }

    /// Map cell containing a rock cell.
    pub fn l_cell_of(&self, rock_cell: (usize, usize)) -> (usize, usize) {
        (rock_cell.0 / self.ratio, rock_cell.1 / self.ratio)
    }

    pub fn contains_l(&self, cell: (usize, usize)) -> bool {
        cell.0 < self.l_width && cell.1 < self.l_height
    }

    pub fn contains_rock(&self, cell: (usize, usize)) -> bool {
        cell.0 < self.rock_width() && cell.1 < self.rock_height()
    }

    /// Rock cells of one map cell, in ascending `(x, y)` order.
    pub fn rock_cells_of(&self, l_cell: (usize, usize)) -> Vec<(usize, usize)> {
        let (x0, y0) = (l_cell.0 * self.ratio, l_cell.1 * self.ratio);
        let mut out = Vec::with_capacity(self.ratio * self.ratio);
        for x in x0..x0 + self.ratio {
            for y in y0..y0 + self.ratio {
                out.push((x, y));
            }
        }
        out
    }
}

/// Rock cells covered by firing `sensor` from `pose`, in ascending `(x, y)`
/// order and clipped to the grid.
///
/// The remote footprint is a `fov_depth x fov_width` rectangle anchored at
/// the front edge of the robot's map cell and extending ahead along the
/// heading; a rock cell is included iff its center falls inside the rotated
/// rectangle. The local footprint is the robot's own map cell.
pub fn footprint(pose: &Pose, sensor: SensorKind, geom: &GridGeometry) -> Vec<(usize, usize)> {
    match sensor {
        SensorKind::Local => geom.rock_cells_of((pose.x, pose.y)),
        SensorKind::Remote => {
            let r = geom.ratio as f64;
            let (ux, uy) = pose.heading.unit();
            // Center of the robot's cell in rock-grid coordinates, pushed to
            // the front edge along the heading.
            let cx = (pose.x as f64 + 0.5) * r + ux * (r / 2.0);
            let cy = (pose.y as f64 + 0.5) * r + uy * (r / 2.0);
            let depth = geom.fov_depth as f64;
            let half_width = geom.fov_width as f64 / 2.0;
            // Conservative axis-aligned bounding box of the rotated rectangle.
            let reach = depth + half_width + 1.0;
            let x_lo = ((cx - reach).floor().max(0.0)) as usize;
            let y_lo = ((cy - reach).floor().max(0.0)) as usize;
            let x_hi = ((cx + reach).ceil() as usize).min(geom.rock_width());
            let y_hi = ((cy + reach).ceil() as usize).min(geom.rock_height());
            let mut out = Vec::new();
            for x in x_lo..x_hi {
                for y in y_lo..y_hi {
                    let px = x as f64 + 0.5 - cx;
                    let py = y as f64 + 0.5 - cy;
                    let along = px * ux + py * uy;
                    let across = -px * uy + py * ux;
                    if along >= 0.0 && along <= depth && across.abs() <= half_width {
                        out.push((x, y));
                    }
                }
            }
            out
        }
    }
}

/// A ground-truth rock.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rock {
    pub id: u64,
    /// Rock-grid cell.
    pub cell: (usize, usize),
    pub rock_class: usize,
    /// True feature value per channel.
    pub features: Vec<usize>,
}

/// Ground truth hidden from the planner.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorldState {
    pub config: WorldConfig,
    pub l_truth: Grid<usize>,
    pub b_truth: Grid<usize>,
    pub rocks: Vec<Rock>,
    pub obstacles: Grid<bool>,
}

impl WorldState {
    pub fn geometry(&self) -> GridGeometry {
        self.config.geometry()
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let file = File::create(path)?;
        serde_json::to_writer_pretty(BufWriter::new(file), self)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let file = File::open(path)?;
        let world: Self = serde_json::from_reader(BufReader::new(file))?;
        world.config.validate()?;
        Ok(world)
    }
}

/// Samples a world from the knowledge network: one uniform location class
/// per region, materials from P(B|L), Poisson rock counts per map cell, and
/// rock classes/features from P(R|L) and P(F|R). Fully determined by
/// `config.seed`.
pub fn generate(config: &WorldConfig, net: &KnowledgeNet) -> Result<WorldState> {
    config.validate()?;
    net.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let cards = net.cardinalities;

    // Region location classes, then per-cell labels.
    let regions_x = config.l_width / config.region_width;
    let regions_y = config.l_height / config.region_height;
    let mut region_labels = Grid::filled(regions_x, regions_y, 0usize);
    for ry in 0..regions_y {
        for rx in 0..regions_x {
            region_labels.set(rx, ry, rng.random_range(0..cards.location));
        }
    }
    let l_truth = Grid::from_fn(config.l_width, config.l_height, |x, y| {
        *region_labels.at(x / config.region_width, y / config.region_height)
    });

    let b_truth = Grid::from_fn(config.l_width, config.l_height, |x, y| {
        net.p_b_given_l.sample_child(*l_truth.at(x, y), &mut rng)
    });

    let obstacles = Grid::from_fn(config.l_width, config.l_height, |_, _| {
        config.obstacle_density > 0.0 && rng.random::<f64>() < config.obstacle_density
    });

    // Rocks: Poisson count per map cell, distinct rock cells within it.
    let geom = config.geometry();
    let mut rocks = Vec::new();
    let mut next_id = 1u64;
    let poisson = if config.rock_density > 0.0 {
        Some(Poisson::new(config.rock_density).map_err(|e| {
            Error::InvalidConfig(format!("invalid rock density: {e}"))
        })?)
    } else {
        None
    };
    for ly in 0..config.l_height {
        for lx in 0..config.l_width {
            let count = match &poisson {
                Some(p) => p.sample(&mut rng) as usize,
                None => 0,
            };
            if count == 0 {
                continue;
            }
            let mut cells = geom.rock_cells_of((lx, ly));
            let count = count.min(cells.len());
            // Partial Fisher-Yates: the first `count` entries end up distinct.
            for i in 0..count {
                let j = rng.random_range(i..cells.len());
                cells.swap(i, j);
            }
            let location = *l_truth.at(lx, ly);
            for &cell in &cells[..count] {
                let rock_class = net.p_r_given_l.sample_child(location, &mut rng);
                let features = (0..net.channels())
                    .map(|ch| net.p_f_given_r[ch].sample_child(rock_class, &mut rng))
                    .collect();
                rocks.push(Rock {
                    id: next_id,
                    cell,
                    rock_class,
                    features,
                });
                next_id += 1;
            }
        }
    }

    Ok(WorldState {
        config: config.clone(),
        l_truth,
        b_truth,
        rocks,
        obstacles,
    })
}

/// Fires `sensor` from `pose` against ground truth. Remote readings are
/// drawn from P(Z|F) per channel; local readings pass the true material
/// through the configured confusion table (identity by default).
pub fn true_observe(
    world: &WorldState,
    pose: &Pose,
    sensor: SensorKind,
    net: &KnowledgeNet,
    rng: &mut ChaCha8Rng,
) -> Result<Observation> {
    let geom = world.geometry();
    if !geom.contains_l((pose.x, pose.y)) {
        return Err(Error::OutOfBounds {
            x: pose.x,
            y: pose.y,
            width: geom.l_width,
            height: geom.l_height,
        });
    }
    match sensor {
        SensorKind::Remote => {
            let covered = footprint(pose, SensorKind::Remote, &geom);
            let mut rocks = Vec::new();
            for rock in &world.rocks {
                if covered.binary_search(&rock.cell).is_err() {
                    continue;
                }
                let readings = rock
                    .features
                    .iter()
                    .enumerate()
                    .map(|(ch, &f)| net.p_z_given_f[ch].sample_child(f, rng))
                    .collect();
                rocks.push(ObservedRock {
                    id: Some(rock.id),
                    cell: rock.cell,
                    readings,
                });
            }
            Ok(Observation::Remote(RemoteObservation { covered, rocks }))
        }
        SensorKind::Local => {
            let truth = *world.b_truth.at(pose.x, pose.y);
            let reading = match &world.config.material_confusion {
                Some(confusion) => confusion.sample_child(truth, rng),
                None => truth,
            };
            Ok(Observation::Local(LocalObservation {
                cell: (pose.x, pose.y),
                reading,
            }))
        }
    }
}
