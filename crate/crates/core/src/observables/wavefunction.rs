use std::sync::Arc;

use crate::error::Result;
use crate::linalg::C64;
use crate::parallel::Execution;
use crate::types::{FrequencyGrid, InteractionSpec};

use super::evaluate::GridEvaluation;

/// Biphoton amplitude φ(ω′) = B*·D + w∫F*·H, split into its two terms.
#[derive(Debug, Clone)]
pub struct BiphotonWavefunction {
    pub grid: Arc<FrequencyGrid>,
    pub values: Vec<C64>,
    pub parametric_part: Vec<C64>,
    pub langevin_part: Vec<C64>,
}

impl GridEvaluation {
    pub fn wavefunction(&self) -> BiphotonWavefunction {
        BiphotonWavefunction {
            grid: self.grid.clone(),
            values: self.points.iter().map(|p| p.phi()).collect(),
            parametric_part: self.points.iter().map(|p| p.phi_parametric).collect(),
            langevin_part: self.points.iter().map(|p| p.phi_langevin).collect(),
        }
    }
}

pub fn biphoton_wavefunction(spec: &InteractionSpec, grid: &FrequencyGrid) -> Result<BiphotonWavefunction> {
    Ok(GridEvaluation::new(spec, Arc::new(grid.clone()), Execution::default())?.wavefunction())
}
