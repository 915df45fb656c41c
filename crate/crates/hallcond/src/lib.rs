//! Finite-volume quantum Hall transport on a magnetic torus.

pub mod config;
pub mod error;
pub mod geometry;
pub mod landau;
pub mod manybody;
pub mod operators;
pub mod planewave;
pub mod potential;
pub mod response;
pub mod run;
pub mod special;
pub mod system;
pub mod topology;
