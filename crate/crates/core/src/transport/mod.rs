//! Monotone maps, the Hoeffding coupling and transport costs on the line.

mod cost;
mod coupling;
mod map;
mod oracle;

pub use cost::{transport_cost, TransportCost};
pub use coupling::{hoeffding_map, transport_map, HoeffdingCoupling};
pub use map::{triangular, MonotoneMap};
pub use oracle::{transport_cost_oracle, TransportPlan, ORACLE_MAX_ATOMS};
