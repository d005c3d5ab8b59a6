//! Embedded Lagrangian submanifolds: charts, frame transport, tangent-plane paths and the
//! end-to-end holonomy checks.

pub mod chart;
pub mod path;
pub mod transport;
pub mod verify;

pub use chart::{induced_metric, ChartSpec, LagrangianChart};
pub use path::ParamPath;
pub use transport::{tangent_lagrangian_path, transport_frame, TransportResult};
