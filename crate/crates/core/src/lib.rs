//! Entanglement routing in first-generation quantum repeater networks
//! whose transport nodes have heterogeneous noise rates.
//!
//! The crate is organised bottom-up:
//!
//! * [`topology`] builds grid and cylindrical transport cores with attached
//!   source and destination tiers, and assigns HQ/LQ noise classes.
//! * [`fidelity`] evaluates the end-to-end fidelity of a linear swapping
//!   path of Werner pairs, in closed form and by explicit swap folding.
//! * [`routing`] allocates node-weighted shortest paths for a shuffled batch
//!   of requests, gating them on a fidelity threshold and consuming the
//!   edges of every allocated path.
//! * [`experiment`] is the seeded Monte Carlo driver for the four studies.
//! * [`cli`] is the batch front end writing CSV tables and run manifests.

pub mod cli;
pub mod error;
pub mod experiment;
pub mod fidelity;
pub mod rng;
pub mod routing;
pub mod stats;
pub mod topology;

pub use error::{Error, Result};
pub use fidelity::{LinkFidelity, PathComposition};
pub use routing::{PathAllocation, RoutingRequest, WeightMapping};
pub use topology::{NetworkGraph, NodeId, NodeKind, NoiseClass, Topology};
