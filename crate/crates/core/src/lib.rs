pub mod approx;
pub mod cli;
pub mod error;
pub mod frames;
pub mod io;
pub mod linalg;
pub mod measure;
pub mod optimize;
pub mod potentials;
pub mod prob_frames;
pub mod random;
pub mod transport;
