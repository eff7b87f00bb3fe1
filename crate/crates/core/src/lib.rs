//! Resolution engine for alarm-driven security games with several mobile
//! defensive resources.
//!
//! The crate covers the whole flow: minimum covering placements
//! ([`mincover`]), covering route generation ([`routes`]), the zero-sum and
//! team games solved once a signal is raised ([`game`], [`oracles`]), and the
//! anytime search over placements ([`pipeline`]). [`io`] holds the instance
//! and result file formats used by the `sigpatrol` binary.

pub mod game;
pub mod io;
pub mod lp;
pub mod mincover;
pub mod model;
pub mod oracles;
pub mod pipeline;
pub mod routes;
