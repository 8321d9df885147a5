use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use fracdyn::boxdim::{default_schedule, estimate_box_dimension, BoxSchedule, DimensionEstimate};
use fracdyn::curvature::{compare_alphas, curvature_report};
use fracdyn::population::{fit_piecewise, PiecewiseModel, PopulationSeries};
use fracdyn::radialdim::{
    counting_center, default_radial_schedule, estimate_radial_dimension, max_valid_radius,
    CenterMode, RadialSchedule,
};
use fracdyn::raster::{BinaryRaster, Rect};
use fracdyn::synth::SynthSpec;
use fracdyn::trend::{
    analyze_orbit, classify_stability, fit_difference_model, fit_logistic, is_monotone,
    logistic_to_difference, simulate_difference, DifferenceFitConfig, DimensionSeries,
    LogisticFitConfig,
};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::io;
use crate::*;

pub fn run(command: &Command, out_dir: &Path) -> Result<Value> {
    let mut config = serde_json::to_value(command)?;
    config["out_dir"] = json!(out_dir);
    let body = match command {
        Command::Binarize(a) => binarize(a, out_dir)?,
        Command::Crop(a) => crop(a, out_dir)?,
        Command::Synth(a) => synth(a, out_dir)?,
        Command::Boxdim(a) => boxdim(a, out_dir)?,
        Command::Radialdim(a) => radialdim(a, out_dir)?,
        Command::Series(a) => series(a, out_dir)?,
        Command::FitDiff(a) => fit_diff(a)?,
        Command::FitLogistic(a) => fit_logistic_cmd(a)?,
        Command::Stability(a) => stability(a)?,
        Command::Orbit(a) => orbit(a, out_dir)?,
        Command::FitPop(a) => fit_pop(a, out_dir)?,
        Command::ComparePop(a) => compare_pop(a)?,
    };
    let mut report = Map::new();
    report.insert("config".into(), config);
    match body {
        Value::Object(fields) => report.extend(fields),
        other => {
            report.insert("result".into(), other);
        }
    }
    Ok(Value::Object(report))
}

fn binarize(a: &BinarizeArgs, out_dir: &Path) -> Result<Value> {
    let gray = io::load_gray(&a.input)?;
    let binary = io::binarize(&gray, &a.threshold)
        .with_context(|| format!("binarizing {}", a.input.display()))?;
    let out = io::output_path(out_dir, &a.output)?;
    io::write_pgm(&out, &binary.to_gray(), a.plain)?;
    Ok(raster_summary(&binary, &out))
}

fn raster_summary(b: &BinaryRaster, out: &Path) -> Value {
    json!({
        "width": b.width(),
        "height": b.height(),
        "occupied": b.occupancy_count(),
        "output": out,
    })
}

pub fn parse_rect(text: &str) -> Result<Rect> {
    let err = || anyhow!("region `{text}` is not of the form WxH+X+Y");
    let (size, offset) = text.split_once('+').ok_or_else(err)?;
    let (w, h) = size.split_once('x').ok_or_else(err)?;
    let (x, y) = offset.split_once('+').ok_or_else(err)?;
    let num = |s: &str| s.trim().parse::<usize>().map_err(|_| err());
    Ok(Rect::new(num(x)?, num(y)?, num(w)?, num(h)?))
}

fn crop(a: &CropArgs, out_dir: &Path) -> Result<Value> {
    let rect = parse_rect(&a.rect)?;
    let gray = io::load_gray(&a.input)?;
    let cut = gray
        .crop(rect)
        .with_context(|| format!("cropping {}", a.input.display()))?;
    let out = io::output_path(out_dir, &a.output)?;
    io::write_pgm(&out, &cut, a.plain)?;
    Ok(json!({
        "width": cut.width(),
        "height": cut.height(),
        "output": out,
    }))
}

fn synth_spec(a: &SynthArgs) -> Result<SynthSpec> {
    fn need<T: Copy>(v: Option<T>, flag: &str, kind: &str) -> Result<T> {
        v.ok_or_else(|| anyhow!("--{flag} is required for --kind {kind}"))
    }
    Ok(match a.kind {
        SynthKind::SierpinskiTriangle => SynthSpec::SierpinskiTriangle {
            n: need(a.n, "n", "sierpinski-triangle")?,
        },
        SynthKind::SierpinskiCarpet => SynthSpec::SierpinskiCarpet {
            depth: need(a.depth, "depth", "sierpinski-carpet")?,
        },
        SynthKind::FilledRect => SynthSpec::FilledRect {
            width: need(a.width, "width", "filled-rect")?,
            height: need(a.height, "height", "filled-rect")?,
        },
        SynthKind::Line => SynthSpec::Line {
            length: need(a.length, "length", "line")?,
        },
        SynthKind::Disk => SynthSpec::Disk {
            radius: need(a.radius, "radius", "disk")?,
        },
        SynthKind::RandomDensity => SynthSpec::RandomDensity {
            width: need(a.width, "width", "random-density")?,
            height: need(a.height, "height", "random-density")?,
            p: need(a.p, "p", "random-density")?,
            seed: a.seed,
        },
    })
}

fn synth(a: &SynthArgs, out_dir: &Path) -> Result<Value> {
    let spec = synth_spec(a)?;
    let raster = spec.render()?;
    let out = io::output_path(out_dir, &a.output)?;
    io::write_pgm(&out, &raster.to_gray(), a.plain)?;
    let mut v = raster_summary(&raster, &out);
    v["spec"] = serde_json::to_value(&spec)?;
    v["known_dimension"] = json!(spec.known_dimension());
    Ok(v)
}

#[derive(Serialize)]
struct CountRow {
    size: f64,
    count: u64,
    ln_size: f64,
    ln_count: f64,
}

fn estimate_json(est: &DimensionEstimate) -> Value {
    json!({
        "dimension": est.dimension,
        "r_squared": est.fit.r_squared,
        "stderr": est.fit.stderr_slope,
        "slope": est.fit.slope,
        "intercept": est.fit.intercept,
        "scales": est.counts.len(),
    })
}

fn write_counts(out_dir: &Path, csv: &Option<std::path::PathBuf>, est: &DimensionEstimate) -> Result<Option<std::path::PathBuf>> {
    let Some(csv) = csv else { return Ok(None) };
    let out = io::output_path(out_dir, csv)?;
    io::write_csv(
        &out,
        est.counts.iter().map(|c| CountRow {
            size: c.scale,
            count: c.count,
            ln_size: c.scale.ln(),
            ln_count: (c.count as f64).ln(),
        }),
    )?;
    Ok(Some(out))
}

fn box_estimate(raster: &BinaryRaster, sizes: &Option<Vec<usize>>) -> Result<DimensionEstimate> {
    let schedule = match sizes {
        Some(s) => BoxSchedule::new(s.clone())?,
        None => default_schedule(raster)?,
    };
    Ok(estimate_box_dimension(raster, &schedule)?)
}

fn center_mode(c: CenterArg) -> CenterMode {
    match c {
        CenterArg::Geometric => CenterMode::Geometric,
        CenterArg::Centroid => CenterMode::MassCentroid,
    }
}

fn radial_schedule(
    raster: &BinaryRaster,
    center: CenterArg,
    radii: &Option<Vec<f64>>,
) -> Result<RadialSchedule> {
    let c = counting_center(raster, center_mode(center))?;
    Ok(match radii {
        Some(r) => RadialSchedule::new(raster, c, r.clone())?,
        None => default_radial_schedule(raster, c)?,
    })
}

fn boxdim(a: &BoxdimArgs, out_dir: &Path) -> Result<Value> {
    let raster = io::load_binary(&a.input, &a.threshold)?;
    let est = box_estimate(&raster, &a.sizes).with_context(|| a.input.display().to_string())?;
    let mut v = estimate_json(&est);
    v["sizes"] = json!(est.counts.iter().map(|c| c.scale).collect::<Vec<_>>());
    v["csv"] = json!(write_counts(out_dir, &a.csv, &est)?);
    Ok(v)
}

fn radialdim(a: &RadialdimArgs, out_dir: &Path) -> Result<Value> {
    let raster = io::load_binary(&a.input, &a.threshold)?;
    let schedule = radial_schedule(&raster, a.center, &a.radii)
        .with_context(|| a.input.display().to_string())?;
    let est = estimate_radial_dimension(&raster, &schedule)
        .with_context(|| a.input.display().to_string())?;
    let mut v = estimate_json(&est);
    v["center"] = json!(schedule.center());
    v["max_valid_radius"] = json!(max_valid_radius(&raster, schedule.center())?);
    v["radii"] = json!(schedule.radii());
    v["csv"] = json!(write_counts(out_dir, &a.csv, &est)?);
    Ok(v)
}

#[derive(Serialize)]
struct SeriesRow {
    t: f64,
    d: f64,
}

fn series(a: &SeriesArgs, out_dir: &Path) -> Result<Value> {
    let rows = io::read_manifest(&a.manifest)?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(jobs) = a.jobs {
        if jobs == 0 {
            bail!("--jobs must be at least 1");
        }
        pool = pool.num_threads(jobs);
    }
    let pool = pool.build()?;
    // An indexed parallel collect keeps manifest order whatever the schedule.
    let estimates: Vec<DimensionEstimate> = pool.install(|| {
        rows.par_iter()
            .map(|row| {
                let raster = io::load_binary(&row.path, &a.threshold)?;
                match a.estimator {
                    Estimator::Box => box_estimate(&raster, &None),
                    Estimator::Radial => {
                        let s = radial_schedule(&raster, a.center, &None)?;
                        Ok(estimate_radial_dimension(&raster, &s)?)
                    }
                }
                .with_context(|| format!("year {} ({})", row.year, row.path.display()))
            })
            .collect::<Result<Vec<_>>>()
    })?;
    let out = io::output_path(out_dir, &a.output)?;
    io::write_csv(
        &out,
        rows.iter().zip(&estimates).map(|(r, e)| SeriesRow {
            t: r.year,
            d: e.dimension,
        }),
    )?;
    let entries: Vec<Value> = rows
        .iter()
        .zip(&estimates)
        .map(|(r, e)| {
            json!({
                "t": r.year,
                "d": e.dimension,
                "r_squared": e.fit.r_squared,
                "path": r.path,
            })
        })
        .collect();
    Ok(json!({ "series": entries, "output": out }))
}

fn load_series(path: &Path) -> Result<DimensionSeries> {
    DimensionSeries::new(io::read_pairs(path)?).with_context(|| path.display().to_string())
}

fn fit_diff(a: &FitDiffArgs) -> Result<Value> {
    let series = load_series(&a.series)?;
    let config = DifferenceFitConfig {
        starts: a.starts,
        max_iterations: a.max_iter,
        seed: a.seed,
    };
    let fit = fit_difference_model(&series, &config)?;
    Ok(json!({
        "params": fit.params,
        "objective": fit.objective,
        "objective_kind": "l1",
        "start_index": fit.start_index,
        "starts_tried": fit.starts_tried,
    }))
}

fn fit_logistic_cmd(a: &FitLogisticArgs) -> Result<Value> {
    let series = load_series(&a.series)?;
    let fit = fit_logistic(
        &series,
        a.offset,
        &LogisticFitConfig {
            max_iterations: a.max_iter,
        },
    )?;
    let form = logistic_to_difference(&fit.params)?;
    let sse: f64 = series
        .samples()
        .iter()
        .map(|&(t, d)| (fit.params.value(t) - d).powi(2))
        .sum();
    Ok(json!({
        "params": fit.params,
        "objective": sse,
        "objective_kind": "sse",
        "rmse": fit.rmse,
        "converged": fit.converged,
        "b": form.b,
        "state_scale": form.state_scale,
        "class": classify_stability(form.b),
    }))
}

fn stability(a: &StabilityArgs) -> Result<Value> {
    let b = match (a.b, a.r) {
        (Some(b), _) => b,
        (None, Some(r)) => r + 1.0,
        (None, None) => bail!("one of --b or --r is required"),
    };
    Ok(json!({ "class": classify_stability(b), "b": b }))
}

#[derive(Serialize)]
struct OrbitRow {
    step: usize,
    x: f64,
}

fn orbit(a: &OrbitArgs, out_dir: &Path) -> Result<Value> {
    let xs = simulate_difference(a.b, a.x0, a.steps)?;
    let csv = match &a.output {
        Some(p) => {
            let out = io::output_path(out_dir, p)?;
            io::write_csv(
                &out,
                xs.iter().enumerate().map(|(step, &x)| OrbitRow { step, x }),
            )?;
            Some(out)
        }
        None => None,
    };
    Ok(json!({
        "b": a.b,
        "class": classify_stability(a.b),
        "behavior": analyze_orbit(&xs, a.tol),
        "monotone": is_monotone(&xs),
        "equilibrium": 1.0 - 1.0 / a.b,
        "final": xs.last(),
        "output": csv,
    }))
}

fn load_population_model(csv: &Path, periods: &Path) -> Result<PiecewiseModel> {
    let series =
        PopulationSeries::new(io::read_pairs(csv)?).with_context(|| csv.display().to_string())?;
    let periods = io::read_periods(periods)?;
    fit_piecewise(&series, &periods).with_context(|| format!("fitting {}", csv.display()))
}

fn fit_pop(a: &FitPopArgs, out_dir: &Path) -> Result<Value> {
    let model = load_population_model(&a.population, &a.periods)?;
    let out = match &a.output {
        Some(p) => {
            let out = io::output_path(out_dir, p)?;
            io::write_json(&out, &model)?;
            Some(out)
        }
        None => None,
    };
    Ok(json!({ "segments": model, "output": out }))
}

fn load_either(path: &Path, periods: &Option<std::path::PathBuf>) -> Result<PiecewiseModel> {
    let is_csv = path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("csv"));
    match (is_csv, periods) {
        (true, Some(p)) => load_population_model(path, p),
        (true, None) => bail!("{} is a population CSV; its periods file is required", path.display()),
        (false, _) => io::read_model(path),
    }
}

fn compare_pop(a: &ComparePopArgs) -> Result<Value> {
    let ma = load_either(&a.a, &a.periods_a)?;
    let mb = load_either(&a.b, &a.periods_b)?;
    let ra = curvature_report(&ma).with_context(|| a.a.display().to_string())?;
    let rb = curvature_report(&mb).with_context(|| a.b.display().to_string())?;
    let similarity = match a.tolerance {
        Some(t) => Some(compare_alphas(&ra.alphas, &rb.alphas, t)?),
        None => None,
    };
    Ok(json!({ "a": ra, "b": rb, "similarity": similarity }))
}
