//! Cubical persistent homology of 3D likelihood volumes, distances between
//! persistence diagrams, a differentiable topology-aware loss, and the shape
//! error metrics used to evaluate reconstructions.

pub mod analysis;
pub mod diagram_metrics;
pub mod error;
pub mod filtration;
pub mod par;
pub mod persistence;
pub mod shape_metrics;
pub mod synthetic;
pub mod topo_loss;
pub mod volume;

pub use diagram_metrics::{bottleneck, total_persistence, wasserstein, Matching};
pub use error::{Error, Result};
pub use filtration::{betti_numbers, build_superlevel_filtration, Filtration};
pub use persistence::{compute_persistence, naive_reduce, PersistenceDiagram, PersistenceOptions, PersistencePair};
pub use shape_metrics::{evaluate_pair, MetricsReport};
pub use topo_loss::{topological_loss, topological_loss_gradient, GeometricLoss, LossConfig, LossReport};
pub use volume::{BinaryVolume, Volume};
