use thiserror::Error;

pub type Result<T> = std::result::Result<T, SimError>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("invalid configuration: {}", .0.join("; "))]
    Config(Vec<String>),

    #[error("could not place {requested} small cells {min_distance} m apart in a {area_radius} m disk ({placed} placed after {attempts} attempts)")]
    PackingInfeasible {
        requested: usize,
        placed: usize,
        attempts: usize,
        area_radius: f64,
        min_distance: f64,
    },

    #[error("empty sample set")]
    EmptySamples,

    #[error(transparent)]
    Model(#[from] hetnet_core::Error),
}
