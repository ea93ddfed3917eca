//! NEB and string evolutions of a discrete path to a stationary state.

mod config;
mod evolve;
mod forces;
mod init;
mod newton;

pub use config::{EvolveConfig, Method, Stepper};
pub use evolve::{evolve, stable_dt, write_trace, EvolveResult, TraceRow};
pub use forces::{neb_force, string_force};
pub use newton::{newton_polish, relax};
pub use init::{make_initial_path, make_initial_path_on, InitialPath};
