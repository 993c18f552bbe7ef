pub mod cache;
pub mod checks;
pub mod config;
pub mod fixtures;
pub mod report;
pub mod run;
pub mod scan;
