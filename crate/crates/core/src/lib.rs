pub mod cardinality;
pub mod cohom;
pub mod error;
pub mod fingroup;
pub mod formulas;
pub mod galmod;
pub mod linalg;
pub mod numfield;
pub mod report;
pub mod scenario;
pub mod selftest;
pub mod snf;
