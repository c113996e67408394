//! Synchronous congested-clique execution with cost accounting.

mod engine;
mod exchange;
mod ledger;
mod model;
mod route;
pub mod sampling;

pub use exchange::{broadcast_all, exchange, width_for, Outbox};
pub use engine::{run_protocol, run_protocol_capped, NodeProgram, DEFAULT_ROUND_CAP};
pub use ledger::{CostLedger, PhaseCost};
pub use model::{id_bits, weight_bits, CostMode, CostModel, Message, MessageKind};
pub use route::{route_all, route_direct};
