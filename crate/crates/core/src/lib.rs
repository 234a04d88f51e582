pub mod error;
pub mod group;
pub mod intlin;
pub mod cohomology;
pub mod numeric;
pub mod projrep;
pub mod kaction;
pub mod limits;
pub mod io;
pub mod cli;
