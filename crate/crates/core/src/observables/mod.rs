//! Measurable quantities built from per-frequency transfer sets.

mod correlation;
mod evaluate;
mod spectrum;
mod wavefunction;

pub use correlation::{
    coincidence_rate, correlation_scale, floor_deviation, fwhm, glauber_g2, parseval_residual, taper_weights, tapered_norm,
    TauGrid, FWHM_REFINEMENT, TAPER_FRACTION,
};
pub use evaluate::{
    auto_grid, evaluate_point, feature_width, GridEvaluation, PointValues, AUTO_GRID_MAX, AUTO_GRID_START,
    EDGE_FRACTION, EDGE_LIMIT, MIN_HALF_WIDTH_FEATURES, SAMPLES_PER_FEATURE,
};
pub use spectrum::{count_rates, spectral_bandwidth, spectral_density, RatePair};
pub use wavefunction::{biphoton_wavefunction, BiphotonWavefunction};

#[cfg(test)]
mod tests;
