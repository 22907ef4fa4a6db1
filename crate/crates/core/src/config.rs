//! Run configuration shared by the library searches and the CLI.

use crate::cnu::SearchConfig;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// Grid and seed counts of the Bl_ν search, per degree.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default, deny_unknown_fields)]
pub struct GridSizes {
    /// Angles sampled for constant υ before golden-section refinement.
    pub degree0_angles: usize,
    /// Phase angles of the degree-one grid.
    pub degree1_angles: usize,
    /// Points per axis of the degree-one zero grid on the square [−1, 1]².
    pub degree1_disc: usize,
    /// Local refinements started from the best degree-one grid points.
    pub degree1_starts: usize,
    /// Quasi-random seeds for degrees two and higher.
    pub higher_seeds: usize,
    /// Local refinements started from the best seeds.
    pub higher_starts: usize,
}

impl Default for GridSizes {
    fn default() -> Self {
        GridSizes {
            degree0_angles: 1024,
            degree1_angles: 64,
            degree1_disc: 12,
            degree1_starts: 20,
            higher_seeds: 2000,
            higher_starts: 30,
        }
    }
}

/// Everything that controls a run. Identical configurations give identical
/// reports.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default, deny_unknown_fields)]
pub struct RunConfig {
    /// Tolerance on ‖X(υ)‖ − 1 separating "fails" from "holds".
    pub tol: f64,
    /// Half-width of the extremal band around 1; defaults to `tol`.
    pub strict_band: Option<f64>,
    pub grid_sizes: GridSizes,
    /// Seed for the quasi-random shift of the higher-degree seeds.
    pub seed: u64,
    /// Iteration cap of each Nelder–Mead refinement.
    pub max_refinements: usize,
    pub verbose: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            tol: 1e-6,
            strict_band: None,
            grid_sizes: GridSizes::default(),
            seed: 0,
            max_refinements: 2000,
            verbose: false,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return bad(format!("tol must be positive, got {}", self.tol));
        }
        if let Some(b) = self.strict_band {
            if !(b > 0.0 && b.is_finite()) {
                return bad(format!("strictBand must be positive, got {b}"));
            }
        }
        let g = &self.grid_sizes;
        let minima = [
            ("degree0Angles", g.degree0_angles, 64),
            ("degree1Angles", g.degree1_angles, 8),
            ("degree1Disc", g.degree1_disc, 4),
            ("degree1Starts", g.degree1_starts, 1),
            ("higherSeeds", g.higher_seeds, 100),
            ("higherStarts", g.higher_starts, 1),
            ("maxRefinements", self.max_refinements, 50),
        ];
        for (name, v, min) in minima {
            if v < min {
                return bad(format!("{name} = {v} is below the minimum {min}"));
            }
        }
        Ok(())
    }

    pub fn search(&self) -> SearchConfig {
        SearchConfig {
            tol: self.tol,
            strict_band: self.strict_band.unwrap_or(self.tol),
            grid: self.grid_sizes.clone(),
            seed: self.seed,
            max_iter: self.max_refinements,
        }
    }

    /// Doubles every grid and seed count.
    pub fn doubled(&self) -> Self {
        let g = &self.grid_sizes;
        RunConfig {
            grid_sizes: GridSizes {
                degree0_angles: 2 * g.degree0_angles,
                degree1_angles: 2 * g.degree1_angles,
                degree1_disc: 2 * g.degree1_disc,
                degree1_starts: 2 * g.degree1_starts,
                higher_seeds: 2 * g.higher_seeds,
                higher_starts: 2 * g.higher_starts,
            },
            ..self.clone()
        }
    }
}
