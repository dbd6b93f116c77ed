pub mod error;
pub mod poly;
pub mod rational;
pub mod report;
pub mod smash;
pub mod sample;
pub mod module;
pub mod localize;
pub mod suite;
