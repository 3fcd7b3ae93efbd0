//! SVG rendering of the CSV tables written by the other subcommands.

use std::path::Path;

use plotters::prelude::*;

use crate::args::PlotArgs;
use crate::error::{io_error, CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Schema {
    BreitRabi,
    Trace,
    Cpmg,
    Polarize,
    Absorption,
    Cavity,
}

impl Schema {
    const ALL: [(&'static str, Schema); 6] = [
        ("breit-rabi", Schema::BreitRabi),
        ("trace", Schema::Trace),
        ("cpmg", Schema::Cpmg),
        ("polarize", Schema::Polarize),
        ("absorption", Schema::Absorption),
        ("cavity", Schema::Cavity),
    ];

    fn from_name(name: &str) -> CliResult<Option<Schema>> {
        if name == "auto" {
            return Ok(None);
        }
        Self::ALL.iter().find(|(n, _)| *n == name).map(|(_, s)| Some(*s)).ok_or_else(|| {
            let names: Vec<&str> = Self::ALL.iter().map(|(n, _)| *n).collect();
            CliError::Config(format!("unknown plot kind \"{name}\"; known: auto, {}", names.join(", ")))
        })
    }

    pub fn detect(headers: &[String]) -> Option<Schema> {
        let h: Vec<&str> = headers.iter().map(String::as_str).collect();
        match h.as_slice() {
            ["B_T", rest @ ..] if !rest.is_empty() && rest.iter().all(|c| c.ends_with("_Hz")) => {
                Some(Schema::BreitRabi)
            }
            ["x", "y", "stderr"] => Some(Schema::Trace),
            ["N", "T2_s", "T2_sigma_s", "stretch"] => Some(Schema::Cpmg),
            ["t_s", "p_singlet", "p_triplet", "polarization"] => Some(Schema::Polarize),
            ["wavenumber_cm1", "absorbance"] => Some(Schema::Absorption),
            ["omega_Hz", "T", "R"] => Some(Schema::Cavity),
            _ => None,
        }
    }

    fn axes(self) -> (&'static str, &'static str) {
        match self {
            Schema::BreitRabi => ("B (T)", "frequency (Hz)"),
            Schema::Trace => ("x", "signal"),
            Schema::Cpmg => ("log10 N", "log10 T2 (s)"),
            Schema::Polarize => ("t (s)", "population"),
            Schema::Absorption => ("wavenumber (cm^-1)", "absorbance"),
            Schema::Cavity => ("probe detuning from grid centre (GHz)", "power fraction"),
        }
    }

    /// Columns drawn against column 0.
    fn series(self, n_cols: usize) -> Vec<usize> {
        match self {
            Schema::Trace | Schema::Cpmg => vec![1],
            _ => (1..n_cols).collect(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Table {
    pub headers: Vec<String>,
    pub columns: Vec<Vec<f64>>,
}

pub fn read_table(path: &Path) -> CliResult<Table> {
    let mut rdr = csv::Reader::from_path(path).map_err(|e| io_error(path, e))?;
    let bad = |msg: String| CliError::Config(format!("{}: malformed CSV: {msg}", path.display()));
    let headers: Vec<String> = rdr.headers().map_err(|e| bad(e.to_string()))?.iter().map(str::to_string).collect();
    let mut columns = vec![Vec::new(); headers.len()];
    for (row, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| bad(e.to_string()))?;
        for (k, field) in rec.iter().enumerate() {
            let v: f64 = field
                .trim()
                .parse()
                .map_err(|_| bad(format!("row {}, column {}: '{field}' is not a number", row + 2, headers[k])))?;
            columns[k].push(v);
        }
    }
    if columns.first().is_none_or(|c| c.len() < 2) {
        return Err(bad("need a header and at least two data rows".into()));
    }
    Ok(Table { headers, columns })
}

fn transform(schema: Schema, col: usize, v: f64, centre: f64) -> f64 {
    match (schema, col) {
        (Schema::Cpmg, _) => v.log10(),
        (Schema::Cavity, 0) => (v - centre) / 1e9,
        _ => v,
    }
}

struct Series {
    label: String,
    points: Vec<(f64, f64)>,
}

pub fn run(args: &PlotArgs) -> CliResult<()> {
    let forced = Schema::from_name(&args.kind)?;
    let mut files = vec![args.input.as_path()];
    if let Some(o) = &args.overlay {
        files.push(o.as_path());
    }
    let tables = files.iter().map(|p| read_table(p)).collect::<CliResult<Vec<_>>>()?;
    let schema = match forced {
        Some(s) => s,
        None => Schema::detect(&tables[0].headers).ok_or_else(|| {
            CliError::Config(format!(
                "{}: unrecognised CSV header '{}'",
                args.input.display(),
                tables[0].headers.join(",")
            ))
        })?,
    };
    for (t, p) in tables.iter().zip(&files) {
        if Schema::detect(&t.headers) != Some(schema) {
            return Err(CliError::Config(format!(
                "{}: header '{}' does not match the {:?} schema",
                p.display(),
                t.headers.join(","),
                schema
            )));
        }
    }

    let c0 = &tables[0].columns[0];
    let centre = 0.5 * (c0[0] + c0[c0.len() - 1]);
    let mut series = Vec::new();
    for (t, p) in tables.iter().zip(&files) {
        let stem = p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        for col in schema.series(t.headers.len()) {
            let points: Vec<(f64, f64)> = t.columns[0]
                .iter()
                .zip(&t.columns[col])
                .map(|(&x, &y)| (transform(schema, 0, x, centre), transform(schema, col, y, centre)))
                .filter(|(x, y)| x.is_finite() && y.is_finite())
                .collect();
            let label = if files.len() > 1 { format!("{} [{stem}]", t.headers[col]) } else { t.headers[col].clone() };
            series.push(Series { label, points });
        }
    }
    let title = args.title.clone().unwrap_or_else(|| {
        args.input.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
    });
    draw(&args.output, &title, schema, &series).map_err(|e| io_error(&args.output, e))
}

fn bounds(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if hi > lo {
        let pad = 0.03 * (hi - lo);
        (lo - pad, hi + pad)
    } else {
        let d = if lo == 0.0 { 1.0 } else { 0.05 * lo.abs() };
        (lo - d, hi + d)
    }
}

fn draw(out: &Path, title: &str, schema: Schema, series: &[Series]) -> Result<(), Box<dyn std::error::Error>> {
    let xr = bounds(series.iter().flat_map(|s| s.points.iter().map(|p| p.0)));
    let yr = bounds(series.iter().flat_map(|s| s.points.iter().map(|p| p.1)));
    let root = SVGBackend::new(out, (900, 600)).into_drawing_area();
    root.fill(&WHITE)?;
    let mut chart = ChartBuilder::on(&root)
        .caption(title, ("sans-serif", 20))
        .margin(15)
        .x_label_area_size(45)
        .y_label_area_size(90)
        .build_cartesian_2d(xr.0..xr.1, yr.0..yr.1)?;
    let (xd, yd) = schema.axes();
    chart
        .configure_mesh()
        .x_desc(xd)
        .y_desc(yd)
        .x_label_formatter(&|v| format!("{v:.4}"))
        .y_label_formatter(&|v| if v.abs() >= 1e4 { format!("{v:.4e}") } else { format!("{v:.3}") })
        .draw()?;
    for (i, s) in series.iter().enumerate() {
        let color = Palette99::pick(i).to_rgba();
        chart
            .draw_series(LineSeries::new(s.points.iter().copied(), color.stroke_width(2)))?
            .label(s.label.clone())
            .legend(move |(x, y)| PathElement::new(vec![(x, y), (x + 20, y)], color.stroke_width(2)));
    }
    chart
        .configure_series_labels()
        .background_style(WHITE.mix(0.85))
        .border_style(BLACK)
        .draw()?;
    root.present()?;
    Ok(())
}
