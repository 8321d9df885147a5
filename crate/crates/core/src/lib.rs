//! Fractal dimension estimation for binary rasters and modelling of how those
//! dimensions evolve over time.
//!
//! The crate is organised bottom-up:
//!
//! * [`raster`] loads grayscale PGM/PNG images, binarizes and crops them.
//! * [`regress`] is the ordinary least-squares line fit shared by the estimators.
//! * [`boxdim`] and [`radialdim`] estimate dimensions by box counting and by
//!   counting occupied pixels in growing disks around a counting center.
//! * [`synth`] renders rasters of known dimension used to check the estimators.
//! * [`trend`] fits short-term difference models and long-term logistic models to
//!   a dimension time series and classifies the stability of the logistic map.
//! * [`population`] and [`curvature`] fit piecewise exponential population models
//!   and compare two regions through ratios of average curvature.

pub mod boxdim;
pub mod curvature;
pub mod error;
pub mod optim;
pub mod population;
pub mod radialdim;
pub mod raster;
pub mod regress;
pub mod synth;
pub mod trend;

pub use error::{Error, Result};
