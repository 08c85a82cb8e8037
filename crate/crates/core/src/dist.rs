//! Discrete probability primitives: normalized categorical distributions and
//! conditional probability tables (CPTs).
//!
//! All belief mass in the crate flows through [`Categorical`], which enforces
//! the normalization invariant at construction so downstream code never has
//! to re-check it.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Probabilities are clamped to this floor before renormalization so that a
/// long sequence of multiplicative updates can never absorb a class into an
/// unrecoverable zero.
pub const PROB_FLOOR: f64 = 1e-12;

/// Tolerated deviation of a distribution's sum from 1.
pub const NORM_TOLERANCE: f64 = 1e-9;

/// Shannon entropy in bits of a raw probability slice, validating the input.
///
/// `0 * log2(0)` is taken as 0. Returns an error when the entries are
/// negative or do not sum to 1 within [`NORM_TOLERANCE`].
pub fn entropy(probs: &[f64]) -> Result<f64> {
    for (index, &value) in probs.iter().enumerate() {
        if value < 0.0 {
            return Err(Error::NegativeProbability { index, value });
        }
    }
    let sum: f64 = probs.iter().sum();
    if (sum - 1.0).abs() > NORM_TOLERANCE {
        return Err(Error::InvalidDistribution { sum });
    }
    Ok(entropy_unchecked(probs))
}

fn entropy_unchecked(probs: &[f64]) -> f64 {
    -probs
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| p * p.log2())
        .sum::<f64>()
}

/// A normalized probability vector over `K >= 2` discrete classes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Categorical {
    probs: Vec<f64>,
}

impl Categorical {
    /// Validates non-negativity, `K >= 2`, and normalization within
    /// [`NORM_TOLERANCE`].
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.len() < 2 {
            return Err(Error::BadCardinality {
                found: probs.len(),
                min: 2,
            });
        }
        entropy(&probs)?;
        Ok(Self { probs })
    }

    /// Builds a distribution from non-negative weights: clamps each entry to
    /// [`PROB_FLOOR`] and normalizes.
    pub fn from_weights(weights: &[f64]) -> Result<Self> {
        if weights.len() < 2 {
            return Err(Error::BadCardinality {
                found: weights.len(),
                min: 2,
            });
        }
        for (index, &value) in weights.iter().enumerate() {
            if !(value >= 0.0) {
                return Err(Error::NegativeProbability { index, value });
            }
        }
        let clamped: Vec<f64> = weights.iter().map(|&w| w.max(PROB_FLOOR)).collect();
        let sum: f64 = clamped.iter().sum();
        Ok(Self {
            probs: clamped.into_iter().map(|w| w / sum).collect(),
        })
    }

    pub fn uniform(k: usize) -> Result<Self> {
        Self::new(vec![1.0 / k.max(1) as f64; k])
    }

    /// A point mass on `index`.
    pub fn delta(k: usize, index: usize) -> Result<Self> {
        if index >= k {
            return Err(Error::BadCardinality { found: index, min: k });
        }
        let mut probs = vec![0.0; k];
        probs[index] = 1.0;
        Self::new(probs)
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, class: usize) -> f64 {
        self.probs[class]
    }

    /// Shannon entropy in bits; in `[0, log2 K]`.
    pub fn entropy_bits(&self) -> f64 {
        entropy_unchecked(&self.probs)
    }

    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (i, &p) in self.probs.iter().enumerate() {
            if p > self.probs[best] {
                best = i;
            }
        }
        best
    }

    /// Bayes update: posterior proportional to `prior * likelihood`.
    pub fn scaled_by(&self, likelihood: &[f64]) -> Result<Self> {
        self.pow_scaled_by(likelihood, 1.0)
    }

    /// Log-linear update: posterior proportional to `prior * likelihood^exponent`.
    ///
    /// `exponent = 1` is plain Bayes; fractional exponents implement the
    /// Gaussian-weighted pooling used for spatial coupling.
    pub fn pow_scaled_by(&self, likelihood: &[f64], exponent: f64) -> Result<Self> {
        if likelihood.len() != self.probs.len() {
            return Err(Error::DimensionMismatch(format!(
                "likelihood has {} entries, distribution has {}",
                likelihood.len(),
                self.probs.len()
            )));
        }
        let weights: Vec<f64> = self
            .probs
            .iter()
            .zip(likelihood)
            .map(|(&p, &l)| p * l.max(0.0).powf(exponent))
            .collect();
        Self::from_weights(&weights)
    }

    /// Inverse-CDF sample.
    pub fn sample(&self, rng: &mut impl Rng) -> usize {
        let u: f64 = rng.random();
        let mut acc = 0.0;
        for (i, &p) in self.probs.iter().enumerate() {
            acc += p;
            if u < acc {
                return i;
            }
        }
        self.probs.len() - 1
    }
}

impl TryFrom<Vec<f64>> for Categorical {
    type Error = Error;

    fn try_from(probs: Vec<f64>) -> Result<Self> {
        Self::new(probs)
    }
}

impl From<Categorical> for Vec<f64> {
    fn from(c: Categorical) -> Self {
        c.probs
    }
}

/// A conditional probability table: one [`Categorical`] over child classes
/// per parent class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct Cpt {
    rows: Vec<Categorical>,
}

impl Cpt {
    pub fn new(rows: Vec<Categorical>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::BadCardinality { found: 0, min: 1 });
        }
        let child = rows[0].len();
        if rows.iter().any(|r| r.len() != child) {
            return Err(Error::DimensionMismatch(
                "CPT rows have differing child cardinalities".into(),
            ));
        }
        Ok(Self { rows })
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        Self::new(rows.into_iter().map(Categorical::new).collect::<Result<_>>()?)
    }

    /// Square table with 1 on the diagonal.
    pub fn identity(k: usize) -> Result<Self> {
        Self::new((0..k).map(|i| Categorical::delta(k, i)).collect::<Result<_>>()?)
    }

    /// Square table with `diag` on the diagonal and the remainder spread
    /// evenly off-diagonal.
    pub fn diagonal(k: usize, diag: f64) -> Result<Self> {
        if k < 2 || !(0.0..=1.0).contains(&diag) {
            return Err(Error::InvalidConfig(format!(
                "diagonal CPT needs k >= 2 and diag in [0,1], got k={k} diag={diag}"
            )));
        }
        let off = (1.0 - diag) / (k - 1) as f64;
        let rows = (0..k)
            .map(|i| {
                Categorical::new((0..k).map(|j| if i == j { diag } else { off }).collect())
            })
            .collect::<Result<_>>()?;
        Self::new(rows)
    }

    /// Table whose rows are all uniform (an uninformative channel).
    pub fn uniform(parents: usize, children: usize) -> Result<Self> {
        Self::new(
            (0..parents)
                .map(|_| Categorical::uniform(children))
                .collect::<Result<_>>()?,
        )
    }

    pub fn parent_count(&self) -> usize {
        self.rows.len()
    }

    pub fn child_count(&self) -> usize {
        self.rows[0].len()
    }

    pub fn row(&self, parent: usize) -> &Categorical {
        &self.rows[parent]
    }

    pub fn rows(&self) -> &[Categorical] {
        &self.rows
    }

    pub fn sample_child(&self, parent: usize, rng: &mut impl Rng) -> usize {
        self.rows[parent].sample(rng)
    }

    /// Folds a likelihood over child classes into a likelihood over parent
    /// classes: `out[p] = sum_c P(c | p) * child_likelihood[c]`.
    pub fn parent_likelihood(&self, child_likelihood: &[f64]) -> Result<Vec<f64>> {
        if child_likelihood.len() != self.child_count() {
            return Err(Error::DimensionMismatch(format!(
                "child likelihood has {} entries, CPT has {} children",
                child_likelihood.len(),
                self.child_count()
            )));
        }
        Ok(self
            .rows
            .iter()
            .map(|row| {
                row.probs()
                    .iter()
                    .zip(child_likelihood)
                    .map(|(&p, &l)| p * l)
                    .sum()
            })
            .collect())
    }

    /// Predictive child distribution under a parent mixture:
    /// `out[c] = sum_p weight[p] * P(c | p)`.
    pub fn mix_rows(&self, parent_weights: &[f64]) -> Result<Vec<f64>> {
        if parent_weights.len() != self.parent_count() {
            return Err(Error::DimensionMismatch(format!(
                "parent weights have {} entries, CPT has {} parents",
                parent_weights.len(),
                self.parent_count()
            )));
        }
        let mut out = vec![0.0; self.child_count()];
        for (row, &w) in self.rows.iter().zip(parent_weights) {
            for (o, &p) in out.iter_mut().zip(row.probs()) {
                *o += w * p;
            }
        }
        Ok(out)
    }
}

impl TryFrom<Vec<Vec<f64>>> for Cpt {
    type Error = Error;

    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        Self::from_rows(rows)
    }
}

impl From<Cpt> for Vec<Vec<f64>> {
    fn from(cpt: Cpt) -> Self {
        cpt.rows.into_iter().map(Vec::from).collect()
    }
}
