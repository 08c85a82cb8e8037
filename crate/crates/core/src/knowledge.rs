//! The domain-knowledge network: CPTs tying the latent location class to
//! observable quantities, plus the Gaussian spatial coupling between cells.
//!
//! Variable naming used throughout the crate:
//!  - `L` — latent location class of a map cell (the survey target),
//!  - `R` — class of an individual rock,
//!  - `F` — a visual feature channel of a rock (several independent channels),
//!  - `Z` — the remote sensor's reading of one feature channel,
//!  - `B` — the substrate material measured by the local sensor.

use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dist::Cpt;
use crate::error::{Error, Result};

/// Gaussian falloff of evidence influence across neighboring map cells.
///
/// Evidence observed at a cell also updates cells within `radius`, each with
/// weight `exp(-d^2 / (2 sigma^2))` where `d` is the Euclidean cell distance.
/// The weights over the in-grid neighborhood are normalized to sum to 1, so
/// `radius = 0` degenerates to a plain single-cell Bayes update.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpatialCoupling {
    pub sigma: f64,
    pub radius: usize,
}

impl SpatialCoupling {
    pub fn new(sigma: f64, radius: usize) -> Result<Self> {
        if !(sigma > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "coupling sigma must be positive, got {sigma}"
            )));
        }
        Ok(Self { sigma, radius })
    }

    /// Single-parent dependence: evidence touches only its own cell.
    pub fn single_cell() -> Self {
        Self {
            sigma: 1.0,
            radius: 0,
        }
    }

    /// Normalized weights over the in-grid cells within `radius` of `center`,
    /// in deterministic row-major offset order.
    pub fn weights(
        &self,
        center: (usize, usize),
        width: usize,
        height: usize,
    ) -> Vec<((usize, usize), f64)> {
        let r = self.radius as i64;
        let (cx, cy) = (center.0 as i64, center.1 as i64);
        let mut out = Vec::new();
        for dy in -r..=r {
            for dx in -r..=r {
                let d2 = dx * dx + dy * dy;
                if d2 > r * r {
                    continue;
                }
                let (x, y) = (cx + dx, cy + dy);
                if x < 0 || y < 0 || x >= width as i64 || y >= height as i64 {
                    continue;
                }
                let w = (-(d2 as f64) / (2.0 * self.sigma * self.sigma)).exp();
                out.push(((x as usize, y as usize), w));
            }
        }
        let total: f64 = out.iter().map(|&(_, w)| w).sum();
        for (_, w) in &mut out {
            *w /= total;
        }
        out
    }
}

/// Class counts for the five network variables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cardinalities {
    pub location: usize,
    pub rock: usize,
    pub feature: usize,
    pub reading: usize,
    pub material: usize,
}

impl Cardinalities {
    pub fn all_equal(k: usize) -> Self {
        Self {
            location: k,
            rock: k,
            feature: k,
            reading: k,
            material: k,
        }
    }
}

/// The CPT bundle describing how observations relate to the latent location
/// class, together with the spatial coupling. This is the prior knowledge a
/// mission starts with; it never changes during a mission.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnowledgeNet {
    pub cardinalities: Cardinalities,
    /// P(R | L): rock class given location class.
    pub p_r_given_l: Cpt,
    /// P(B | L): local-sensor material given location class.
    pub p_b_given_l: Cpt,
    /// P(F_i | R), one table per feature channel.
    pub p_f_given_r: Vec<Cpt>,
    /// P(Z_i | F_i), the remote sensor model, one table per feature channel.
    pub p_z_given_f: Vec<Cpt>,
    pub coupling: SpatialCoupling,
}

impl KnowledgeNet {
    /// Validates mutual consistency of the CPT dimensions.
    pub fn validate(&self) -> Result<()> {
        let c = &self.cardinalities;
        let check = |name: &str, ok: bool| -> Result<()> {
            if ok {
                Ok(())
            } else {
                Err(Error::DimensionMismatch(format!(
                    "{name} inconsistent with declared cardinalities"
                )))
            }
        };
        check(
            "p_r_given_l",
            self.p_r_given_l.parent_count() == c.location
                && self.p_r_given_l.child_count() == c.rock,
        )?;
        check(
            "p_b_given_l",
            self.p_b_given_l.parent_count() == c.location
                && self.p_b_given_l.child_count() == c.material,
        )?;
        check(
            "feature channels",
            !self.p_f_given_r.is_empty() && self.p_f_given_r.len() == self.p_z_given_f.len(),
        )?;
        for cpt in &self.p_f_given_r {
            check(
                "p_f_given_r",
                cpt.parent_count() == c.rock && cpt.child_count() == c.feature,
            )?;
        }
        for cpt in &self.p_z_given_f {
            check(
                "p_z_given_f",
                cpt.parent_count() == c.feature && cpt.child_count() == c.reading,
            )?;
        }
        SpatialCoupling::new(self.coupling.sigma, self.coupling.radius)?;
        Ok(())
    }

    /// Number of independent feature channels.
    pub fn channels(&self) -> usize {
        self.p_f_given_r.len()
    }

    /// Likelihood over rock classes of a full per-channel reading vector:
    /// `lik(r) = prod_i sum_f P(z_i | f) P(f | r)`.
    pub fn rock_reading_likelihood(&self, readings: &[usize]) -> Result<Vec<f64>> {
        if readings.len() != self.channels() {
            return Err(Error::DimensionMismatch(format!(
                "{} readings for {} feature channels",
                readings.len(),
                self.channels()
            )));
        }
        let mut lik = vec![1.0; self.cardinalities.rock];
        for (i, &z) in readings.iter().enumerate() {
            if z >= self.cardinalities.reading {
                return Err(Error::BadCardinality {
                    found: z,
                    min: self.cardinalities.reading,
                });
            }
            // Likelihood over F of this reading, folded through to R.
            let over_f: Vec<f64> = self.p_z_given_f[i]
                .rows()
                .iter()
                .map(|row| row.prob(z))
                .collect();
            let over_r = self.p_f_given_r[i].parent_likelihood(&over_f)?;
            for (l, o) in lik.iter_mut().zip(over_r) {
                *l *= o;
            }
        }
        Ok(lik)
    }

    /// Likelihood over location classes of a local material reading:
    /// `lik(l) = P(b | l)`.
    pub fn material_reading_likelihood(&self, reading: usize) -> Result<Vec<f64>> {
        if reading >= self.cardinalities.material {
            return Err(Error::BadCardinality {
                found: reading,
                min: self.cardinalities.material,
            });
        }
        Ok(self
            .p_b_given_l
            .rows()
            .iter()
            .map(|row| row.prob(reading))
            .collect())
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let file = File::create(path)?;
        serde_json::to_writer_pretty(BufWriter::new(file), self)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let file = File::open(path)?;
        let net: Self = serde_json::from_reader(BufReader::new(file))?;
        net.validate()?;
        Ok(net)
    }
}

impl Default for KnowledgeNet {
    /// Three classes per variable, three feature channels, diagonal-dominant
    /// 0.7/0.15/0.15 tables, coupling sigma 1.0 with radius 2.
    fn default() -> Self {
        let d = Cpt::diagonal(3, 0.7).expect("static table");
        Self {
            cardinalities: Cardinalities::all_equal(3),
            p_r_given_l: d.clone(),
            p_b_given_l: d.clone(),
            p_f_given_r: vec![d.clone(); 3],
            p_z_given_f: vec![d; 3],
            coupling: SpatialCoupling {
                sigma: 1.0,
                radius: 2,
            },
        }
    }
}
