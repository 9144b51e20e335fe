//! Problem files: a JSON description of a Whitney collection together with
//! the evaluation grid, seeds and budgets.

use anyhow::{bail, Context};
use lipscale::collection::{LipParams, WhitneyCollection};
use lipscale::element::Element;
use lipscale::scale::Scale;
use lipscale::whitney::ClosedSet;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::Path;

/// One data entry: the element attached to (point index, multi-index).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DataEntry {
    pub point: usize,
    pub j: Vec<usize>,
    pub element: Element,
}

/// Sampling grid: a box with a per-axis subdivision count.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GridSpec {
    /// Per-axis closed intervals [lo, hi].
    pub r#box: Vec<[f64; 2]>,
    #[serde(default = "default_per_axis")]
    pub per_axis: usize,
}

fn default_per_axis() -> usize {
    200
}

fn default_seed() -> u64 {
    42
}

fn default_budget() -> usize {
    2000
}

/// The on-disk problem description.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProblemFile {
    pub n: usize,
    pub k: usize,
    pub rho: f64,
    pub gamma: f64,
    pub delta: f64,
    pub sigma: f64,
    pub scale: Scale,
    /// Points of the closed set.
    pub points: Vec<Vec<f64>>,
    pub data: Vec<DataEntry>,
    pub grid: GridSpec,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_budget")]
    pub budget: usize,
}

impl ProblemFile {
    pub fn load(path: &Path) -> anyhow::Result<ProblemFile> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading problem file {}", path.display()))?;
        let problem: ProblemFile = serde_json::from_str(&text)
            .with_context(|| format!("parsing problem file {}", path.display()))?;
        problem.validate()?;
        Ok(problem)
    }

    pub fn validate(&self) -> anyhow::Result<()> {
        if self.grid.r#box.len() != self.n {
            bail!(
                "grid box has {} axes, expected {}",
                self.grid.r#box.len(),
                self.n
            );
        }
        for [lo, hi] in &self.grid.r#box {
            if !(lo <= hi) {
                bail!("grid box interval [{lo}, {hi}] is empty");
            }
        }
        for p in &self.points {
            if p.len() != self.n {
                bail!("set point {:?} does not have dimension {}", p, self.n);
            }
        }
        Ok(())
    }

    pub fn params(&self) -> LipParams {
        LipParams {
            k: self.k,
            rho: self.rho,
            gamma: self.gamma,
            delta: self.delta,
            sigma: self.sigma,
        }
    }

    /// Builds the validated collection.
    pub fn collection(&self) -> anyhow::Result<WhitneyCollection> {
        let set = ClosedSet::new(self.points.clone()).context("invalid closed set")?;
        let mut data = BTreeMap::new();
        for entry in &self.data {
            if data
                .insert((entry.point, entry.j.clone()), entry.element.clone())
                .is_some()
            {
                bail!(
                    "duplicate data entry for point {}, j {:?}",
                    entry.point,
                    entry.j
                );
            }
        }
        WhitneyCollection::new(self.params(), self.scale.clone(), set, data)
            .context("invalid collection")
    }

    pub fn box_lo(&self) -> Vec<f64> {
        self.grid.r#box.iter().map(|b| b[0]).collect()
    }

    pub fn box_hi(&self) -> Vec<f64> {
        self.grid.r#box.iter().map(|b| b[1]).collect()
    }

    /// Serializes a collection back into a problem file body.
    pub fn from_collection(
        f: &WhitneyCollection,
        grid: GridSpec,
        seed: u64,
        budget: usize,
    ) -> ProblemFile {
        let params = f.params();
        let data = f
            .data()
            .iter()
            .map(|((point, j), element)| DataEntry {
                point: *point,
                j: j.clone(),
                element: element.clone(),
            })
            .collect();
        ProblemFile {
            n: f.dim(),
            k: params.k,
            rho: params.rho,
            gamma: params.gamma,
            delta: params.delta,
            sigma: params.sigma,
            scale: f.scale().clone(),
            points: f.set().points().to_vec(),
            data,
            grid,
            seed,
            budget,
        }
    }
}
