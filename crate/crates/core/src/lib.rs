//! Test generation for sprite games by evolving NEAT networks that play
//! them, guided by a statement-distance objective with novelty as a
//! tiebreaker.

pub mod vm;
pub mod neat;
pub mod novelty;
pub mod objectives;
pub mod search;
pub mod games;
pub mod experiments;
