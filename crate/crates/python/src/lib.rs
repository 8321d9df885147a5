//! Python bindings: rasters, the two dimension estimators, trend fits,
//! stability classification and curvature ratios.
//!
//! Population models cross the boundary as JSON strings in the same format the
//! command-line tool reads and writes.

use fracdyn::boxdim::{self, BoxSchedule};
use fracdyn::curvature;
use fracdyn::population::{self, Period, PiecewiseModel, PopulationSeries};
use fracdyn::radialdim::{self, CenterMode, RadialSchedule};
use fracdyn::raster::{self, Polarity};
use fracdyn::synth;
use fracdyn::trend::{self, DifferenceFitConfig, DimensionSeries, LogisticFitConfig};
use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

create_exception!(pyfracdyn, FracdynError, PyValueError);

fn err(e: fracdyn::Error) -> PyErr {
    FracdynError::new_err(e.to_string())
}

fn json_err(e: serde_json::Error) -> PyErr {
    FracdynError::new_err(format!("invalid JSON: {e}"))
}

#[pyclass(name = "BinaryRaster", module = "pyfracdyn")]
struct PyBinaryRaster {
    inner: raster::BinaryRaster,
}

#[pymethods]
impl PyBinaryRaster {
    /// Builds a raster from rows of truthy values.
    #[new]
    fn new(rows: Vec<Vec<bool>>) -> PyResult<Self> {
        let height = rows.len();
        let width = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != width) {
            return Err(FracdynError::new_err("rows have different lengths"));
        }
        let inner = raster::BinaryRaster::new(width, height, rows.concat()).map_err(err)?;
        Ok(Self { inner })
    }

    /// Loads a PGM or 8-bit grayscale PNG and thresholds it.
    #[staticmethod]
    #[pyo3(signature = (path, threshold, polarity = "light"))]
    fn load(path: &str, threshold: u8, polarity: &str) -> PyResult<Self> {
        let polarity = match polarity {
            "light" => Polarity::LightIsOccupied,
            "dark" => Polarity::DarkIsOccupied,
            other => {
                return Err(FracdynError::new_err(format!(
                    "polarity must be 'light' or 'dark', got {other:?}"
                )))
            }
        };
        let gray = raster::load_gray(path).map_err(err)?;
        Ok(Self {
            inner: raster::binarize(&gray, threshold, polarity),
        })
    }

    #[getter]
    fn width(&self) -> usize {
        self.inner.width()
    }

    #[getter]
    fn height(&self) -> usize {
        self.inner.height()
    }

    fn occupancy_count(&self) -> usize {
        self.inner.occupancy_count()
    }

    fn is_occupied(&self, x: usize, y: usize) -> PyResult<bool> {
        if x >= self.inner.width() || y >= self.inner.height() {
            return Err(FracdynError::new_err(format!("pixel ({x}, {y}) is outside the raster")));
        }
        Ok(self.inner.is_occupied(x, y))
    }

    /// Crops to `w x h` pixels starting at `(x0, y0)`.
    fn crop(&self, x0: usize, y0: usize, w: usize, h: usize) -> PyResult<Self> {
        let inner = raster::crop(&self.inner, raster::Rect::new(x0, y0, w, h)).map_err(err)?;
        Ok(Self { inner })
    }

    /// Writes the raster as a binary PGM with occupied pixels at 255.
    fn save_pgm(&self, path: &str) -> PyResult<()> {
        raster::write_pgm(path, &self.inner.to_gray(), raster::PgmFormat::Raw).map_err(err)
    }

    #[pyo3(signature = (sizes = None))]
    fn box_dimension(&self, sizes: Option<Vec<usize>>) -> PyResult<PyDimensionEstimate> {
        let schedule = match sizes {
            Some(s) => BoxSchedule::new(s),
            None => boxdim::default_schedule(&self.inner),
        }
        .map_err(err)?;
        let est = boxdim::estimate_box_dimension(&self.inner, &schedule).map_err(err)?;
        Ok(PyDimensionEstimate { inner: est })
    }

    #[pyo3(signature = (center = "geometric", radii = None))]
    fn radial_dimension(
        &self,
        center: &str,
        radii: Option<Vec<f64>>,
    ) -> PyResult<PyDimensionEstimate> {
        let mode = match center {
            "geometric" => CenterMode::Geometric,
            "centroid" => CenterMode::MassCentroid,
            other => {
                return Err(FracdynError::new_err(format!(
                    "center must be 'geometric' or 'centroid', got {other:?}"
                )))
            }
        };
        let c = radialdim::counting_center(&self.inner, mode).map_err(err)?;
        let schedule = match radii {
            Some(r) => RadialSchedule::new(&self.inner, c, r),
            None => radialdim::default_radial_schedule(&self.inner, c),
        }
        .map_err(err)?;
        let est = radialdim::estimate_radial_dimension(&self.inner, &schedule).map_err(err)?;
        Ok(PyDimensionEstimate { inner: est })
    }

    fn __repr__(&self) -> String {
        format!(
            "BinaryRaster({}x{}, occupied={})",
            self.inner.width(),
            self.inner.height(),
            self.inner.occupancy_count()
        )
    }
}

#[pyclass(name = "DimensionEstimate", module = "pyfracdyn", frozen)]
struct PyDimensionEstimate {
    inner: boxdim::DimensionEstimate,
}

#[pymethods]
impl PyDimensionEstimate {
    #[getter]
    fn dimension(&self) -> f64 {
        self.inner.dimension
    }

    #[getter]
    fn r_squared(&self) -> f64 {
        self.inner.fit.r_squared
    }

    #[getter]
    fn stderr(&self) -> f64 {
        self.inner.fit.stderr_slope
    }

    /// `(scale, count)` pairs behind the fit.
    #[getter]
    fn counts(&self) -> Vec<(f64, u64)> {
        self.inner.counts.iter().map(|c| (c.scale, c.count)).collect()
    }

    fn __repr__(&self) -> String {
        format!(
            "DimensionEstimate(dimension={:.6}, r_squared={:.6})",
            self.inner.dimension, self.inner.fit.r_squared
        )
    }
}

#[pyfunction]
fn sierpinski_triangle(n: usize) -> PyResult<PyBinaryRaster> {
    Ok(PyBinaryRaster {
        inner: synth::sierpinski_triangle(n).map_err(err)?,
    })
}

#[pyfunction]
fn sierpinski_carpet(depth: u32) -> PyResult<PyBinaryRaster> {
    Ok(PyBinaryRaster {
        inner: synth::sierpinski_carpet(depth).map_err(err)?,
    })
}

#[pyfunction]
fn filled_rect(width: usize, height: usize) -> PyResult<PyBinaryRaster> {
    Ok(PyBinaryRaster {
        inner: synth::filled_rect(width, height).map_err(err)?,
    })
}

#[pyfunction]
fn line(length: usize) -> PyResult<PyBinaryRaster> {
    Ok(PyBinaryRaster {
        inner: synth::line(length).map_err(err)?,
    })
}

#[pyfunction]
fn disk(radius: usize) -> PyResult<PyBinaryRaster> {
    Ok(PyBinaryRaster {
        inner: synth::disk(radius).map_err(err)?,
    })
}

#[pyfunction]
fn random_density(width: usize, height: usize, p: f64, seed: u64) -> PyResult<PyBinaryRaster> {
    Ok(PyBinaryRaster {
        inner: synth::random_density(width, height, p, seed).map_err(err)?,
    })
}

fn series(times: Vec<f64>, values: Vec<f64>) -> PyResult<DimensionSeries> {
    if times.len() != values.len() {
        return Err(FracdynError::new_err("times and values differ in length"));
    }
    DimensionSeries::new(times.into_iter().zip(values).collect()).map_err(err)
}

/// Fits `offset + K / (1 + A e^(-r t))` by least squares.
#[pyfunction]
#[pyo3(signature = (times, values, offset = 1.0, max_iterations = 20_000))]
fn fit_logistic<'py>(
    py: Python<'py>,
    times: Vec<f64>,
    values: Vec<f64>,
    offset: f64,
    max_iterations: usize,
) -> PyResult<Bound<'py, PyDict>> {
    let s = series(times, values)?;
    let fit = trend::fit_logistic(&s, offset, &LogisticFitConfig { max_iterations })
        .map_err(err)?;
    let form = trend::logistic_to_difference(&fit.params).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("K", fit.params.k)?;
    d.set_item("A", fit.params.a)?;
    d.set_item("r", fit.params.r)?;
    d.set_item("offset", fit.params.offset)?;
    d.set_item("rmse", fit.rmse)?;
    d.set_item("converged", fit.converged)?;
    d.set_item("b", form.b)?;
    d.set_item("class", format!("{:?}", trend::classify_stability(form.b)))?;
    Ok(d)
}

/// Fits the linear-plus-growing-oscillation difference model under L1.
#[pyfunction]
#[pyo3(signature = (times, values, seed = 20_220_000, starts = 16, max_iterations = 20_000))]
fn fit_difference<'py>(
    py: Python<'py>,
    times: Vec<f64>,
    values: Vec<f64>,
    seed: u64,
    starts: usize,
    max_iterations: usize,
) -> PyResult<Bound<'py, PyDict>> {
    let s = series(times, values)?;
    let config = DifferenceFitConfig {
        starts,
        max_iterations,
        seed,
    };
    let fit = trend::fit_difference_model(&s, &config).map_err(err)?;
    let p = fit.params;
    let d = PyDict::new(py);
    d.set_item("c1", p.c1)?;
    d.set_item("c2", p.c2)?;
    d.set_item("c3", p.c3)?;
    d.set_item("c4", p.c4)?;
    d.set_item("c5", p.c5)?;
    d.set_item("objective", fit.objective)?;
    Ok(d)
}

/// Stability band name for the logistic map coefficient `b`.
#[pyfunction]
fn classify_stability(b: f64) -> String {
    format!("{:?}", trend::classify_stability(b))
}

#[pyfunction]
fn simulate_difference(b: f64, x0: f64, steps: usize) -> PyResult<Vec<f64>> {
    trend::simulate_difference(b, x0, steps).map_err(err)
}

/// Fits a piecewise model and returns it as JSON. `periods` is a list of
/// `(t_start, t_end, kind)` with kind `"exponential"` or `"linear"`.
#[pyfunction]
fn fit_population(
    years: Vec<f64>,
    population: Vec<f64>,
    periods: Vec<(f64, f64, String)>,
) -> PyResult<String> {
    if years.len() != population.len() {
        return Err(FracdynError::new_err("years and population differ in length"));
    }
    let s = PopulationSeries::new(years.into_iter().zip(population).collect()).map_err(err)?;
    let periods = periods
        .into_iter()
        .map(|(t_start, t_end, kind)| {
            let kind = serde_json::from_value(serde_json::Value::String(kind)).map_err(json_err)?;
            Ok(Period {
                t_start,
                t_end,
                kind,
            })
        })
        .collect::<PyResult<Vec<_>>>()?;
    let model = population::fit_piecewise(&s, &periods).map_err(err)?;
    serde_json::to_string(&model).map_err(json_err)
}

fn parse_model(json: &str) -> PyResult<PiecewiseModel> {
    serde_json::from_str(json).map_err(json_err)
}

/// Curvature ratios keyed by 1-based period index.
#[pyfunction]
fn alpha_ratios(model_json: &str) -> PyResult<Vec<(usize, f64)>> {
    let alphas = curvature::alpha_ratios(&parse_model(model_json)?).map_err(err)?;
    Ok(alphas.into_iter().collect())
}

/// Indices whose ratios are similar within `tolerance`, as `(index, similar)`.
#[pyfunction]
fn compare_similarity(a_json: &str, b_json: &str, tolerance: f64) -> PyResult<Vec<(usize, bool)>> {
    let report =
        curvature::compare_similarity(&parse_model(a_json)?, &parse_model(b_json)?, tolerance)
            .map_err(err)?;
    Ok(report
        .comparisons
        .iter()
        .map(|c| (c.index, c.similar))
        .collect())
}

#[pymodule]
fn pyfracdyn(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("FracdynError", m.py().get_type::<FracdynError>())?;
    m.add_class::<PyBinaryRaster>()?;
    m.add_class::<PyDimensionEstimate>()?;
    m.add_function(wrap_pyfunction!(sierpinski_triangle, m)?)?;
    m.add_function(wrap_pyfunction!(sierpinski_carpet, m)?)?;
    m.add_function(wrap_pyfunction!(filled_rect, m)?)?;
    m.add_function(wrap_pyfunction!(line, m)?)?;
    m.add_function(wrap_pyfunction!(disk, m)?)?;
    m.add_function(wrap_pyfunction!(random_density, m)?)?;
    m.add_function(wrap_pyfunction!(fit_logistic, m)?)?;
    m.add_function(wrap_pyfunction!(fit_difference, m)?)?;
    m.add_function(wrap_pyfunction!(classify_stability, m)?)?;
    m.add_function(wrap_pyfunction!(simulate_difference, m)?)?;
    m.add_function(wrap_pyfunction!(fit_population, m)?)?;
    m.add_function(wrap_pyfunction!(alpha_ratios, m)?)?;
    m.add_function(wrap_pyfunction!(compare_similarity, m)?)?;
    Ok(())
}
