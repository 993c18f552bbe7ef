#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub mod mp;
pub mod nfield;
pub mod ecurve;
pub mod hmf;
pub mod periods;
pub mod cycles;
pub mod lattice;
pub mod ajmap;
pub mod signs;
pub mod bttree;
pub mod gkzscan;
