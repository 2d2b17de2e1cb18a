//! Orchestration core for a museum tour-guide robot.

pub mod analytics;
pub mod dialogue;
pub mod engine;
pub mod exec;
pub mod geometry;
pub mod museum;
pub mod nav;
pub mod transcript;
pub mod visitor;
