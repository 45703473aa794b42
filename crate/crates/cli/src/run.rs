use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use sqldist::edits::{default_edit_set, parse_cost_overrides, EditSet};
use sqldist::grading::{build_report, FeedbackStep, GradingConfig};
use sqldist::search::{search, Problem, SearchObserver, SearchOptions, SearchStatus};
use sqldist::{parse_query, parse_schema, Cost, Query};

use crate::args::{Cli, Format};

pub const FOUND: u8 = 0;
pub const EXCEEDED: u8 = 1;
pub const INPUT_ERROR: u8 = 2;
pub const NOT_EXECUTABLE: u8 = 3;

/// A failure that ends the run, with its exit code.
struct Failure(u8, String);

fn input_error(what: &str, message: impl std::fmt::Display) -> Failure {
    Failure(INPUT_ERROR, format!("{what}: {message}"))
}

fn read(path: &Path, what: &str) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| input_error(&format!("{what} '{}'", path.display()), e))
}

/// Query text and a label naming where it came from.
fn query_source(file: &Option<std::path::PathBuf>, inline: &Option<String>, what: &str) -> Result<Option<(String, String)>, Failure> {
    match (file, inline) {
        (Some(p), _) => Ok(Some((read(p, what)?, format!("{what} '{}'", p.display())))),
        (None, Some(sql)) => Ok(Some((sql.clone(), format!("{what} (inline)")))),
        (None, None) => Ok(None),
    }
}

fn parse_labeled(text: &str, label: &str) -> Result<Query, Failure> {
    parse_query(text).map_err(|e| input_error(label, e))
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub schema: String,
    pub destination: String,
    pub start: Option<String>,
    pub starts_dir: Option<String>,
    pub cost_overrides: BTreeMap<String, Cost>,
    pub max_distance: Option<Cost>,
    pub slack: usize,
    pub max_points: f64,
    pub scale: f64,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct Report {
    pub file: Option<String>,
    pub status: String,
    pub distance: Option<Cost>,
    pub points: f64,
    pub steps: Vec<FeedbackStep>,
    pub visited: usize,
    pub expanded: usize,
    pub wall_time_ms: f64,
    pub error: Option<String>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct Document {
    pub config: ConfigEcho,
    pub reports: Vec<Report>,
}

struct Progress<'a> {
    err: &'a mut dyn Write,
}

impl SearchObserver for Progress<'_> {
    fn on_progress(&mut self, current_distance: Cost, fraction: f64, visited: usize) {
        let _ = write!(
            self.err,
            "\rsearching: {:5.1}% (distance {current_distance}, {visited} visited)",
            fraction * 100.0
        );
        let _ = self.err.flush();
    }
}

pub fn run(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> u8 {
    match try_run(cli, out, err) {
        Ok(code) => code,
        Err(Failure(code, message)) => {
            let _ = writeln!(err, "error: {message}");
            code
        }
    }
}

fn load_edits(cli: &Cli) -> Result<EditSet, Failure> {
    let edits = default_edit_set();
    let Some(path) = &cli.costs else {
        return Ok(edits);
    };
    let label = format!("costs file '{}'", path.display());
    let overrides = parse_cost_overrides(&read(path, "costs file")?).map_err(|e| input_error(&label, e))?;
    edits.configure_costs(&overrides).map_err(|e| input_error(&label, e))
}

fn try_run(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<u8, Failure> {
    let edits = load_edits(cli)?;
    if cli.list_edits {
        let mut text = String::new();
        for e in edits.edits() {
            writeln!(text, "{}\t{}\t{}\t{}", e.name(), e.category().label(), e.cost(), e.description()).unwrap();
        }
        write_out(out, &text)?;
        return Ok(FOUND);
    }
    let grading = GradingConfig::new(cli.max_points, cli.scale).map_err(|e| Failure(INPUT_ERROR, e.to_string()))?;

    let (dest_text, dest_label) = query_source(&cli.destination, &cli.destination_sql, "destination")?
        .ok_or_else(|| Failure(INPUT_ERROR, "a destination is required (--destination or --destination-sql)".into()))?;
    let destination = parse_labeled(&dest_text, &dest_label)?;
    let mut options = SearchOptions::new().edits(edits.clone()).slack(cli.slack);
    if let Some(path) = &cli.schema {
        let label = format!("schema '{}'", path.display());
        options = options.schema(parse_schema(&read(path, "schema")?).map_err(|e| input_error(&label, e))?);
    }
    if let Some(m) = cli.max_distance {
        options = options.max_distance(m);
    }
    let problem = Problem::new(&destination, &options).map_err(|e| Failure(NOT_EXECUTABLE, format!("{dest_label}: {e}")))?;

    let mut config = ConfigEcho {
        schema: problem.schema.to_string(),
        destination: destination.render_inline(),
        start: None,
        starts_dir: cli.starts_dir.as_ref().map(|d| d.display().to_string()),
        cost_overrides: edits.overrides().clone(),
        max_distance: cli.max_distance,
        slack: cli.slack,
        max_points: cli.max_points,
        scale: cli.scale,
    };

    if let Some(dir) = &cli.starts_dir {
        return batch(cli, dir, &problem, &grading, config, out, err);
    }

    let start = match query_source(&cli.start, &cli.start_sql, "start")? {
        Some((text, label)) => parse_labeled(&text, &label)?,
        None => Query::empty(),
    };
    config.start = Some(start.render_inline());
    let problem = Problem { start, ..problem };
    let report = if cli.quiet {
        grade_one(&problem, &grading, &mut ())
    } else {
        let r = grade_one(&problem, &grading, &mut Progress { err: &mut *err });
        let _ = writeln!(err);
        r
    };
    let code = exit_code(&report);
    match cli.format {
        Format::Text => write_out(out, &report_text(&report))?,
        Format::Json => write_json(out, &Document { config, reports: vec![report] })?,
    }
    Ok(code)
}

fn grade_one(problem: &Problem, grading: &GradingConfig, observer: &mut dyn SearchObserver) -> Report {
    let started = Instant::now();
    let result = search(problem, observer);
    let wall_time_ms = started.elapsed().as_secs_f64() * 1000.0;
    let (points, steps) = match build_report(&result, grading) {
        Ok(r) => (r.points, r.steps),
        // No points for a search that did not reach the destination.
        Err(_) => (0.0, Vec::new()),
    };
    Report {
        file: None,
        status: result.status.label().to_owned(),
        distance: result.distance,
        points,
        steps,
        visited: result.visited_count,
        expanded: result.expanded_count,
        wall_time_ms,
        error: None,
    }
}

fn exit_code(report: &Report) -> u8 {
    if report.error.is_some() {
        INPUT_ERROR
    } else if report.status == SearchStatus::Found.label() {
        FOUND
    } else {
        EXCEEDED
    }
}

fn report_text(report: &Report) -> String {
    let mut text = String::new();
    if let Some(e) = &report.error {
        writeln!(text, "error: {e}").unwrap();
        return text;
    }
    match report.distance {
        Some(d) => writeln!(text, "distance: {d}").unwrap(),
        None if report.status == SearchStatus::ExceededMaxDistance.label() => {
            writeln!(text, "distance: exceeds the maximum distance").unwrap()
        }
        None => writeln!(text, "distance: unreachable").unwrap(),
    }
    writeln!(text, "points: {}", report.points).unwrap();
    for s in &report.steps {
        writeln!(text, "{}. {} (cost {}): {}", s.step_index, s.edit_name, s.cost, s.description).unwrap();
        writeln!(text, "   {}", s.resulting_query).unwrap();
    }
    text
}

fn batch(
    cli: &Cli,
    dir: &Path,
    problem: &Problem,
    grading: &GradingConfig,
    config: ConfigEcho,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<u8, Failure> {
    let entries = fs::read_dir(dir).map_err(|e| input_error(&format!("starts directory '{}'", dir.display()), e))?;
    let mut files: Vec<_> = entries
        .filter_map(Result::ok)
        .map(|e| e.path())
        .filter(|p| p.is_file())
        .collect();
    files.sort();

    let reports: Vec<Report> = files
        .par_iter()
        .map(|path| {
            let name = path.file_name().map_or_else(String::new, |n| n.to_string_lossy().into_owned());
            let label = format!("start '{}'", path.display());
            let start = read(path, "start").and_then(|text| parse_labeled(&text, &label));
            let mut report = match start {
                Ok(start) => grade_one(&Problem { start, ..problem.clone() }, grading, &mut ()),
                Err(Failure(_, message)) => Report {
                    file: None,
                    status: "inputError".to_owned(),
                    distance: None,
                    points: 0.0,
                    steps: Vec::new(),
                    visited: 0,
                    expanded: 0,
                    wall_time_ms: 0.0,
                    error: Some(message),
                },
            };
            report.file = Some(name);
            report
        })
        .collect();

    if !cli.quiet {
        let _ = writeln!(err, "graded {} files", reports.len());
    }
    let code = reports.iter().map(exit_code).max().unwrap_or(FOUND);
    match cli.format {
        Format::Text => {
            let mut text = String::new();
            for r in &reports {
                writeln!(text, "== {} ==", r.file.as_deref().unwrap_or("")).unwrap();
                text.push_str(&report_text(r));
                text.push('\n');
            }
            writeln!(text, "file\tstatus\tdistance\tpoints").unwrap();
            for r in &reports {
                let distance = r.distance.map_or_else(|| "-".to_owned(), |d| d.to_string());
                writeln!(text, "{}\t{}\t{}\t{}", r.file.as_deref().unwrap_or(""), r.status, distance, r.points).unwrap();
            }
            write_out(out, &text)?;
        }
        Format::Json => write_json(out, &Document { config, reports })?,
    }
    Ok(code)
}

fn write_out(out: &mut dyn Write, text: &str) -> Result<(), Failure> {
    out.write_all(text.as_bytes())
        .map_err(|e| Failure(INPUT_ERROR, format!("writing output: {e}")))
}

fn write_json(out: &mut dyn Write, doc: &Document) -> Result<(), Failure> {
    let mut text = serde_json::to_string_pretty(doc).expect("reports serialize");
    text.push('\n');
    write_out(out, &text)
}
