use std::collections::BTreeSet;
use std::path::Path;

use rayon::prelude::*;
use serde_json::json;

use super::files::{
    format_exponent, in_file, list_group, load_diagram, read_cloud, read_text, resolve_dims, stem,
    Outputs, RunConfig, BARCODE_SUFFIX, DIAGRAM_SUFFIX, LANDSCAPE_SUFFIX,
};
use super::{
    usage, BandArgs, CliError, CloudArgs, DistanceArgs, LandscapeArgs, MeanArgs, MethodArg,
    PersistArgs, PlotArgs, PlotKind, Scale, TestArgs,
};
use crate::distance::{bottleneck_matching, wasserstein_matching};
use crate::error::TdaError;
use crate::frechet::{frechet_mean_with, FrechetOptions};
use crate::inference::{
    confidence_band, diagram_permutation_test, landscape_functional_test, two_sample_t_test,
    BandSettings, Permutations, TestReport,
};
use crate::landscape::{landscape_from_diagram, landscape_integral, PersistenceLandscape};
use crate::metric::{distance_matrix, CsvOptions, DistanceMatrix, PointCloud};
use crate::persistence::{compute_persistence, diagram_to_barcode, Barcode, PersistenceDiagram};
use crate::plot::{barcode_svg, diagram_svg, landscape_svg};
use crate::rips::build_rips;

type Lines = Vec<String>;

fn csv_options(cloud: &CloudArgs) -> CsvOptions {
    CsvOptions {
        delimiter: cloud.delimiter,
        skip_header: cloud.skip_header,
    }
}

fn cloud_config(config: &mut RunConfig, cloud: &CloudArgs, max_scale: f64) {
    config.metric = Some(cloud.metric.to_string());
    config.max_dimension = Some(cloud.max_dim);
    config.max_scale = Some(max_scale);
}

/// AUTO resolves to the largest diameter over all clouds so that every
/// diagram of one run shares a cap; a zero diameter resolves to 1.
fn resolve_scale(scale: Scale, matrices: &[DistanceMatrix]) -> f64 {
    match scale {
        Scale::Fixed(v) => v,
        Scale::Auto => {
            let d = matrices
                .iter()
                .map(DistanceMatrix::diameter)
                .fold(0.0, f64::max);
            if d > 0.0 {
                d
            } else {
                1.0
            }
        }
    }
}

/// Diagram of `dm` reporting dimensions `0..=max_dim`; the filtration is
/// built one dimension higher, limited by the number of points.
fn persistence_of(
    dm: &DistanceMatrix,
    max_dim: usize,
    max_scale: f64,
) -> Result<PersistenceDiagram, TdaError> {
    let top = (max_dim + 1).min(dm.size() - 1);
    let mut diagram = compute_persistence(&build_rips(dm, top, max_scale)?);
    for h in 0..=max_dim {
        diagram = diagram.with_dimension(h);
    }
    Ok(diagram)
}

fn filtration_dimension(cloud: &PointCloud, max_dim: usize) -> usize {
    (max_dim + 1).min(cloud.len() - 1)
}

fn pair_counts(diagram: &PersistenceDiagram) -> String {
    diagram
        .dimensions()
        .iter()
        .map(|&h| {
            let off = diagram.pairs_in(h).filter(|p| p.death > p.birth).count();
            format!(
                "H{h} {} pairs ({off} off-diagonal)",
                diagram.pairs_in(h).count()
            )
        })
        .collect::<Vec<_>>()
        .join(", ")
}

pub fn persist(args: &PersistArgs) -> Result<Lines, CliError> {
    let options = csv_options(&args.cloud);
    let matrices = args
        .inputs
        .par_iter()
        .map(|path| {
            let cloud = read_cloud(path, &options)?;
            distance_matrix(&cloud, &args.cloud.metric).map_err(|e| in_file(path, e))
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let max_scale = resolve_scale(args.cloud.max_scale, &matrices);
    let diagrams = matrices
        .par_iter()
        .zip(&args.inputs)
        .map(|(dm, path)| {
            persistence_of(dm, args.cloud.max_dim, max_scale).map_err(|e| in_file(path, e))
        })
        .collect::<Result<Vec<_>, CliError>>()?;

    let mut outputs = Outputs::new(&args.out.out);
    let mut lines = Vec::new();
    for ((path, diagram), dm) in args.inputs.iter().zip(&diagrams).zip(&matrices) {
        let name = stem(path);
        let written = outputs.add(format!("{name}{DIAGRAM_SUFFIX}"), diagram.to_csv());
        outputs.add(
            format!("{name}{BARCODE_SUFFIX}"),
            diagram_to_barcode(diagram).to_csv(),
        );
        lines.push(format!(
            "{}: {} points, {} -> {}",
            path.display(),
            dm.size(),
            pair_counts(diagram),
            written.display()
        ));
    }
    let mut config = RunConfig::new("persist", &args.inputs, &args.out.out);
    cloud_config(&mut config, &args.cloud, max_scale);
    outputs.commit(&config)?;
    Ok(lines)
}

fn load_all(
    paths: &[impl AsRef<Path> + Sync],
    args: &super::DiagramArgs,
) -> Result<Vec<PersistenceDiagram>, CliError> {
    paths
        .par_iter()
        .map(|p| load_diagram(p.as_ref(), args))
        .collect()
}

fn common_cap(diagrams: &[PersistenceDiagram]) -> Result<f64, CliError> {
    let cap = diagrams[0].max_scale();
    if let Some(other) = diagrams.iter().find(|d| d.max_scale() != cap) {
        return Err(TdaError::CapMismatch(cap, other.max_scale()).into());
    }
    Ok(cap)
}

pub fn landscape(args: &LandscapeArgs) -> Result<Lines, CliError> {
    if args.grid_resolution.is_some_and(|r| r < 2) {
        return Err(usage("--grid-resolution must be at least 2"));
    }
    let diagrams = load_all(&args.inputs, &args.diagram)?;
    let per_input = diagrams
        .par_iter()
        .zip(&args.inputs)
        .map(|(d, path)| {
            let dims = resolve_dims(&args.diagram.dims, &[d])?;
            dims.iter()
                .map(|&h| {
                    let landscape = landscape_from_diagram(d, h).map_err(|e| in_file(path, e))?;
                    let grid = match args.grid_resolution {
                        Some(r) => Some(landscape.to_grid_csv(r)?),
                        None => None,
                    };
                    Ok((h, landscape, grid))
                })
                .collect::<Result<Vec<_>, CliError>>()
        })
        .collect::<Result<Vec<_>, CliError>>()?;

    let mut outputs = Outputs::new(&args.out.out);
    let mut lines = Vec::new();
    let mut dims_seen = BTreeSet::new();
    for (path, results) in args.inputs.iter().zip(per_input) {
        let name = stem(path);
        for (h, landscape, grid) in results {
            dims_seen.insert(h);
            let written = outputs.add(
                format!("{name}.h{h}{LANDSCAPE_SUFFIX}"),
                landscape.to_json() + "\n",
            );
            if let Some(grid) = grid {
                outputs.add(format!("{name}.h{h}.grid.csv"), grid);
            }
            lines.push(format!(
                "{}: H{h} {} levels, integral {} -> {}",
                path.display(),
                landscape.levels().len(),
                landscape_integral(&landscape),
                written.display()
            ));
        }
    }
    let mut config = RunConfig::new("landscape", &args.inputs, &args.out.out);
    config.cap = diagrams.first().map(|d| d.max_scale());
    config.homology_dimensions = dims_seen.into_iter().collect();
    config.grid_resolution = args.grid_resolution;
    outputs.commit(&config)?;
    Ok(lines)
}

pub fn distance(args: &DistanceArgs) -> Result<Lines, CliError> {
    let inputs = [args.first.clone(), args.second.clone()];
    let diagrams = load_all(&inputs, &args.diagram)?;
    let dims = resolve_dims(&args.diagram.dims, &[&diagrams[0], &diagrams[1]])?;
    let mut results = Vec::new();
    let mut lines = Vec::new();
    let label = if args.p.is_infinite() {
        "bottleneck".to_string()
    } else {
        format!("W{}", args.p)
    };
    for &h in &dims {
        let matching = if args.p.is_infinite() {
            bottleneck_matching(&diagrams[0], &diagrams[1], h)?
        } else {
            wasserstein_matching(&diagrams[0], &diagrams[1], h, args.p)?
        };
        lines.push(format!("H{h} {label} = {}", matching.distance()));
        results.push(json!({ "dim": h, "distance": matching.distance(), "matching": matching }));
    }
    let report = json!({ "p": format_exponent(args.p), "results": results });
    let mut outputs = Outputs::new(&args.out.out);
    let written = outputs.add(
        "distance.json".into(),
        serde_json::to_string_pretty(&report).map_err(TdaError::from)? + "\n",
    );
    lines.push(format!("-> {}", written.display()));
    let mut config = RunConfig::new("distance", &inputs, &args.out.out);
    config.cap = Some(diagrams[0].max_scale());
    config.homology_dimensions = dims;
    config.p = Some(format_exponent(args.p));
    outputs.commit(&config)?;
    Ok(lines)
}

pub fn mean(args: &MeanArgs) -> Result<Lines, CliError> {
    if args.max_iterations == 0 {
        return Err(usage("--max-iterations must be positive"));
    }
    let diagrams = load_all(&args.inputs, &args.diagram)?;
    let cap = common_cap(&diagrams)?;
    let refs: Vec<&PersistenceDiagram> = diagrams.iter().collect();
    let dims = resolve_dims(&args.diagram.dims, &refs)?;
    let options = FrechetOptions {
        max_iterations: args.max_iterations,
    };
    let mut outputs = Outputs::new(&args.out.out);
    let mut lines = Vec::new();
    let mut summary = Vec::new();
    for &h in &dims {
        let result = frechet_mean_with(&diagrams, h, options)?;
        let written = outputs.add(format!("mean.h{h}{DIAGRAM_SUFFIX}"), result.mean.to_csv());
        lines.push(format!(
            "H{h}: {} points, variance {}, {} iterations{} -> {}",
            result.mean.pairs_in(h).count(),
            result.variance,
            result.iterations,
            if result.converged {
                ""
            } else {
                " (not converged)"
            },
            written.display()
        ));
        summary.push(json!({
            "dim": h,
            "variance": result.variance,
            "iterations": result.iterations,
            "converged": result.converged,
            "history": result.history,
        }));
    }
    outputs.add(
        "mean.json".into(),
        serde_json::to_string_pretty(&json!({ "sample_size": diagrams.len(), "results": summary }))
            .map_err(TdaError::from)?
            + "\n",
    );
    let mut config = RunConfig::new("mean", &args.inputs, &args.out.out);
    config.cap = Some(cap);
    config.homology_dimensions = dims;
    outputs.commit(&config)?;
    Ok(lines)
}

pub fn band(args: &BandArgs) -> Result<Lines, CliError> {
    if !(args.alpha > 0.0 && args.alpha < 1.0) {
        return Err(usage(format!(
            "--alpha must lie in (0, 1), got {}",
            args.alpha
        )));
    }
    if args.boot == 0 {
        return Err(usage("--boot must be positive"));
    }
    if let Some(&h) = args.dims.iter().find(|&&h| h > args.cloud.max_dim) {
        return Err(usage(format!(
            "--dim {h} exceeds --max-dim {}",
            args.cloud.max_dim
        )));
    }
    let cloud = read_cloud(&args.input, &csv_options(&args.cloud))?;
    let dm = distance_matrix(&cloud, &args.cloud.metric).map_err(|e| in_file(&args.input, e))?;
    let max_scale = resolve_scale(args.cloud.max_scale, std::slice::from_ref(&dm));
    let diagram =
        persistence_of(&dm, args.cloud.max_dim, max_scale).map_err(|e| in_file(&args.input, e))?;
    let settings = BandSettings {
        metric: args.cloud.metric,
        max_dimension: filtration_dimension(&cloud, args.cloud.max_dim),
        max_scale,
    };
    let dims: Vec<usize> = args
        .dims
        .iter()
        .copied()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();

    let mut lines = Vec::new();
    let mut bands = Vec::new();
    for &h in &dims {
        let band = confidence_band(&cloud, h, args.alpha, args.boot, args.seed, &settings)
            .map_err(|e| in_file(&args.input, e))?;
        let features = band.classify(&diagram);
        let noise = features.iter().filter(|f| f.noise).count();
        lines.push(format!(
            "H{h}: c_n {}, {} of {} features within the band",
            band.c_n,
            noise,
            features.len()
        ));
        bands.push(json!({ "band": band, "threshold": band.threshold(), "features": features }));
    }
    let mut outputs = Outputs::new(&args.out.out);
    let name = stem(&args.input);
    outputs.add(format!("{name}{DIAGRAM_SUFFIX}"), diagram.to_csv());
    let written = outputs.add(
        format!("{name}.band.json"),
        serde_json::to_string_pretty(&json!({ "bands": bands })).map_err(TdaError::from)? + "\n",
    );
    lines.push(format!("-> {}", written.display()));
    let mut config = RunConfig::new("band", std::slice::from_ref(&args.input), &args.out.out);
    cloud_config(&mut config, &args.cloud, max_scale);
    config.homology_dimensions = dims;
    config.alpha = Some(args.alpha);
    config.bootstrap_rounds = Some(args.boot);
    config.seed = Some(args.seed);
    outputs.commit(&config)?;
    Ok(lines)
}

/// Landscapes of one group for dimension `h`: the group's landscape files
/// of that dimension if it has any, else landscapes of its diagrams.
fn group_landscapes(
    landscapes: &[PersistenceLandscape],
    diagrams: &[PersistenceDiagram],
    h: usize,
) -> Result<Vec<PersistenceLandscape>, CliError> {
    if !landscapes.is_empty() {
        return Ok(landscapes
            .iter()
            .filter(|l| l.homology_dimension() == h)
            .cloned()
            .collect());
    }
    Ok(diagrams
        .iter()
        .map(|d| landscape_from_diagram(d, h))
        .collect::<Result<Vec<_>, _>>()?)
}

struct Group {
    diagrams: Vec<PersistenceDiagram>,
    landscapes: Vec<PersistenceLandscape>,
}

fn load_group(dir: &Path, args: &TestArgs) -> Result<Group, CliError> {
    let files = list_group(dir)?;
    let use_landscapes = args.method != MethodArg::Diagram && !files.landscapes.is_empty();
    let mut group = Group {
        diagrams: Vec::new(),
        landscapes: Vec::new(),
    };
    if use_landscapes {
        group.landscapes = files
            .landscapes
            .par_iter()
            .map(|p| PersistenceLandscape::from_json(&read_text(p)?).map_err(|e| in_file(p, e)))
            .collect::<Result<_, CliError>>()?;
    } else {
        group.diagrams = load_all(&files.diagrams, &args.diagram)?;
    }
    if group.diagrams.len() + group.landscapes.len() < 2 {
        let wanted = if args.method == MethodArg::Diagram {
            format!("`*{DIAGRAM_SUFFIX}`")
        } else {
            format!("`*{DIAGRAM_SUFFIX}` or `*{LANDSCAPE_SUFFIX}`")
        };
        return Err(TdaError::Empty(format!(
            "{} holds fewer than two {wanted} files",
            dir.display()
        ))
        .into());
    }
    Ok(group)
}

fn test_dims(args: &TestArgs, groups: &[Group; 2]) -> Result<Vec<usize>, CliError> {
    let landscape_dims: BTreeSet<usize> = groups
        .iter()
        .flat_map(|g| g.landscapes.iter().map(|l| l.homology_dimension()))
        .collect();
    if !args.diagram.dims.is_empty() {
        return resolve_dims(&args.diagram.dims, &[]);
    }
    if landscape_dims.len() > 1 {
        return Err(TdaError::invalid(format!(
            "landscapes of mixed homology dimensions {landscape_dims:?}; select one with --dim"
        ))
        .into());
    }
    let diagram_refs: Vec<&PersistenceDiagram> = groups.iter().flat_map(|g| &g.diagrams).collect();
    let mut dims: BTreeSet<usize> = landscape_dims;
    if !diagram_refs.is_empty() {
        dims.extend(resolve_dims(&[], &diagram_refs)?);
    }
    Ok(dims.into_iter().collect())
}

fn run_test(args: &TestArgs, groups: &[Group; 2], h: usize) -> Result<TestReport, CliError> {
    let report = match args.method {
        MethodArg::Diagram => diagram_permutation_test(
            &groups[0].diagrams,
            &groups[1].diagrams,
            h,
            args.p,
            args.perms,
            args.seed,
        )?,
        MethodArg::Landscape | MethodArg::TTest => {
            let l1 = group_landscapes(&groups[0].landscapes, &groups[0].diagrams, h)?;
            let l2 = group_landscapes(&groups[1].landscapes, &groups[1].diagrams, h)?;
            if args.method == MethodArg::Landscape {
                landscape_functional_test(&l1, &l2, args.perms, args.seed)?
            } else {
                let s1: Vec<f64> = l1.iter().map(landscape_integral).collect();
                let s2: Vec<f64> = l2.iter().map(landscape_integral).collect();
                let mut report = two_sample_t_test(&s1, &s2)?;
                report.homology_dimension = Some(h);
                report
            }
        }
    };
    Ok(report)
}

fn method_name(method: MethodArg) -> &'static str {
    match method {
        MethodArg::Diagram => "diagram",
        MethodArg::Landscape => "landscape",
        MethodArg::TTest => "t-test",
    }
}

pub fn test(args: &TestArgs) -> Result<Lines, CliError> {
    if args.method == MethodArg::Diagram && !(args.p >= 1.0 && args.p.is_finite()) {
        return Err(usage(format!(
            "--p must be a finite number >= 1, got {}",
            args.p
        )));
    }
    let groups = [
        load_group(&args.group1, args)?,
        load_group(&args.group2, args)?,
    ];
    let dims = test_dims(args, &groups)?;
    let reports = dims
        .par_iter()
        .map(|&h| run_test(args, &groups, h))
        .collect::<Result<Vec<_>, CliError>>()?;

    let mut outputs = Outputs::new(&args.out.out);
    let mut lines = Vec::new();
    for (h, mut report) in dims.iter().zip(reports) {
        report.tests_run = dims.len();
        let written = outputs.add(format!("test.h{h}.json"), report.to_json() + "\n");
        lines.push(format!("{} -> {}", report.summary(), written.display()));
    }
    let mut config = RunConfig::new(
        "test",
        &[args.group1.clone(), args.group2.clone()],
        &args.out.out,
    );
    config.cap = groups
        .iter()
        .flat_map(|g| g.diagrams.iter().map(|d| d.max_scale()))
        .chain(
            groups
                .iter()
                .flat_map(|g| g.landscapes.iter().map(|l| l.domain_cap())),
        )
        .next();
    config.homology_dimensions = dims;
    config.method = Some(method_name(args.method).into());
    config.seed = Some(args.seed);
    if args.method != MethodArg::TTest {
        config.permutations = Some(match args.perms {
            Permutations::Exhaustive => "exhaustive".into(),
            Permutations::Sampled(n) => n.to_string(),
        });
    }
    if args.method == MethodArg::Diagram {
        config.p = Some(format_exponent(args.p));
    }
    outputs.commit(&config)?;
    Ok(lines)
}

/// Output file name and SVG text.
fn plot_one(path: &Path, kind: PlotKind) -> Result<(String, String), CliError> {
    let name = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    let title = stem(path);
    if name.ends_with(DIAGRAM_SUFFIX) {
        let diagram = load_diagram(
            path,
            &super::DiagramArgs {
                dims: vec![],
                cap: None,
            },
        )?;
        return Ok(match kind {
            PlotKind::Diagram => (
                format!("{title}.diagram.svg"),
                diagram_svg(&diagram, &title),
            ),
            PlotKind::Barcode => (
                format!("{title}.barcode.svg"),
                barcode_svg(&diagram_to_barcode(&diagram), &title),
            ),
        });
    }
    if name.ends_with(BARCODE_SUFFIX) {
        let barcode = Barcode::from_csv(&read_text(path)?).map_err(|e| in_file(path, e))?;
        return Ok((
            format!("{title}.barcode.svg"),
            barcode_svg(&barcode, &title),
        ));
    }
    if name.ends_with(LANDSCAPE_SUFFIX) {
        let landscape =
            PersistenceLandscape::from_json(&read_text(path)?).map_err(|e| in_file(path, e))?;
        return Ok((
            format!("{title}.landscape.svg"),
            landscape_svg(&landscape, &title),
        ));
    }
    Err(TdaError::UnknownSchema(path.display().to_string()).into())
}

pub fn plot(args: &PlotArgs) -> Result<Lines, CliError> {
    let plots = args
        .inputs
        .par_iter()
        .map(|p| plot_one(p, args.kind))
        .collect::<Result<Vec<_>, CliError>>()?;
    let mut outputs = Outputs::new(&args.out.out);
    let mut lines = Vec::new();
    for (path, (name, svg)) in args.inputs.iter().zip(plots) {
        let written = outputs.add(name, svg);
        lines.push(format!("{} -> {}", path.display(), written.display()));
    }
    outputs.commit(&RunConfig::new("plot", &args.inputs, &args.out.out))?;
    Ok(lines)
}
