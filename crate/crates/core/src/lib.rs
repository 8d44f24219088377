//! Topology recognition, equilibrium computation and witness construction for
//! the informational Braess paradox in multi-OD routing networks.

pub mod blocks;
pub mod embedding;
pub mod equilibrium;
pub mod fixtures;
pub mod generators;
pub mod graph;
pub mod paradox;
pub mod paths;
pub mod topology;
