pub mod detector;
pub mod dewatermark;
pub mod error;
pub mod experiments;
pub mod hadamard;
pub mod illumination;
pub mod image;
pub mod metrics;
pub mod recon;
pub mod scenes;
pub mod stego;
pub mod watermark;

pub use error::{FspiError, Result};
pub use image::{ColorImage, Image};
