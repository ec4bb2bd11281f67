//! The `compute` and `bench` front ends: configuration, execution and output
//! formatting shared by the command-line tool and the tests.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::{Duration, Instant};

use serde::Serialize;
use thiserror::Error;

use crate::bracket::{evaluate, BracketError, Engine, EngineOptions};
use crate::diagram::{build_diagram, DiagramError};
use crate::expected::{expected_jones, DirectionSource, ExpectedError, ExpectedJonesResult, ExpectedOptions, Verdict};
use crate::geometry::{project, Curve3D, Direction, GeometryError};
use crate::io::{read_pdb, read_xyz, IoError};
use crate::laurent::PolyRecord;
use crate::par::Parallelism;
use crate::reidemeister::{Move, DEFAULT_SEQUENCE};

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Io(#[from] IoError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Expected(#[from] ExpectedError),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("cannot write {path}: {source}")]
    Csv { path: PathBuf, source: csv::Error },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputFormat {
    Xyz,
    Pdb,
}

impl InputFormat {
    /// `.pdb` and `.ent` files are PDB, anything else coordinates.
    pub fn guess(path: &Path) -> InputFormat {
        match path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase).as_deref() {
            Some("pdb") | Some("ent") => InputFormat::Pdb,
            _ => InputFormat::Xyz,
        }
    }
}

impl FromStr for InputFormat {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "xyz" => Ok(InputFormat::Xyz),
            "pdb" => Ok(InputFormat::Pdb),
            other => Err(format!("unknown format `{other}` (expected xyz or pdb)")),
        }
    }
}

/// Variable the polynomial is printed in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Variable {
    A,
    #[default]
    T,
}

impl FromStr for Variable {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "A" | "a" => Ok(Variable::A),
            "t" | "T" => Ok(Variable::T),
            other => Err(format!("unknown variable `{other}` (expected A or t)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub input: PathBuf,
    pub format: InputFormat,
    pub chain: Option<char>,
    pub atom_limit: Option<usize>,
    pub closed: bool,
    pub projections: usize,
    pub engine: Engine,
    pub direction: Option<Direction>,
    pub seed: Option<u64>,
    pub variable: Variable,
    pub json: bool,
    pub rm_sequence: Vec<Move>,
    pub max_crossings: usize,
    pub parallelism: Parallelism,
}

impl RunConfig {
    pub fn new(input: impl Into<PathBuf>, format: InputFormat) -> Self {
        RunConfig {
            input: input.into(),
            format,
            chain: None,
            atom_limit: None,
            closed: false,
            projections: 1,
            engine: Engine::Split,
            direction: None,
            seed: None,
            variable: Variable::T,
            json: false,
            rm_sequence: DEFAULT_SEQUENCE.to_vec(),
            max_crossings: crate::bracket::DEFAULT_MAX_CROSSINGS,
            parallelism: Parallelism::default(),
        }
    }

    pub fn validate(&self) -> Result<(), RunError> {
        if self.projections == 0 {
            return Err(RunError::Config("the number of projections must be at least 1".into()));
        }
        if matches!(self.atom_limit, Some(k) if k < 3) {
            return Err(RunError::Config("the atom limit must be at least 3".into()));
        }
        if self.direction.is_some() && self.seed.is_some() {
            return Err(RunError::Config("give either a direction or a seed, not both".into()));
        }
        if self.direction.is_some() && self.projections != 1 {
            return Err(RunError::Config("an explicit direction gives exactly one projection".into()));
        }
        Ok(())
    }

    fn engine_options(&self) -> EngineOptions {
        EngineOptions {
            max_crossings: self.max_crossings,
            parallelism: self.parallelism,
            rm_sequence: self.rm_sequence.clone(),
        }
    }

    fn direction_source(&self) -> DirectionSource {
        match (self.direction, self.seed) {
            (Some(d), _) => DirectionSource::Explicit(d),
            (None, Some(s)) => DirectionSource::Seeded(s),
            (None, None) => DirectionSource::Fibonacci,
        }
    }
}

/// Reads the configured curve.
pub fn load_curve(cfg: &RunConfig) -> Result<Curve3D, RunError> {
    let curve = match cfg.format {
        InputFormat::Pdb => read_pdb(&cfg.input, cfg.chain, cfg.atom_limit)?,
        InputFormat::Xyz => {
            let c = read_xyz(&cfg.input, false)?;
            match cfg.atom_limit {
                Some(k) if k < c.points().len() => Curve3D::open(c.points()[..k].to_vec())?,
                _ => c,
            }
        }
    };
    Ok(if cfg.closed { curve.with_closed(true)? } else { curve })
}

pub struct ComputeReport {
    pub engine: Engine,
    pub variable: Variable,
    pub result: ExpectedJonesResult,
}

#[derive(Serialize)]
struct RejectedRecord {
    direction: [f64; 3],
    reason: String,
}

#[derive(Serialize)]
struct ComputeJson<'a> {
    variable: &'static str,
    polynomial: String,
    poly_t: PolyRecord,
    poly_a: PolyRecord,
    engine: &'static str,
    n_requested: usize,
    n_accepted: usize,
    elapsed_s: f64,
    rejected_reasons: Vec<RejectedRecord>,
    projections: &'a [crate::expected::ProjectionRecord],
}

impl ComputeReport {
    pub fn polynomial_text(&self) -> String {
        match self.variable {
            Variable::A => self.result.poly_a.to_string(),
            Variable::T => self.result.poly_t.to_string(),
        }
    }

    fn crossing_counts(&self) -> Vec<usize> {
        self.result
            .projections
            .iter()
            .filter_map(|p| match p.verdict {
                Verdict::Accepted { crossings, .. } => Some(crossings),
                Verdict::Rejected { .. } => None,
            })
            .collect()
    }

    pub fn to_text(&self) -> String {
        let r = &self.result;
        let var = match self.variable {
            Variable::A => "A",
            Variable::T => "t",
        };
        let mut out = String::new();
        writeln!(out, "V({var}) = {}", self.polynomial_text()).unwrap();
        writeln!(out, "projections: {}/{} accepted", r.n_accepted, r.n_requested).unwrap();
        let counts = self.crossing_counts();
        match counts.as_slice() {
            [c] => writeln!(out, "crossings: {c}").unwrap(),
            _ => {
                let (lo, hi) = (counts.iter().min().unwrap(), counts.iter().max().unwrap());
                writeln!(out, "crossings: {lo}..{hi}").unwrap()
            }
        }
        for (dir, reason) in r.rejected_reasons() {
            writeln!(out, "rejected ({:.6}, {:.6}, {:.6}): {reason}", dir[0], dir[1], dir[2]).unwrap();
        }
        writeln!(out, "engine: {}", self.engine).unwrap();
        writeln!(out, "elapsed: {:.6} s", r.elapsed.as_secs_f64()).unwrap();
        out
    }

    pub fn to_json(&self) -> String {
        let r = &self.result;
        let doc = ComputeJson {
            variable: match self.variable {
                Variable::A => "A",
                Variable::T => "t",
            },
            polynomial: self.polynomial_text(),
            poly_t: (&r.poly_t).into(),
            poly_a: (&r.poly_a).into(),
            engine: self.engine.name(),
            n_requested: r.n_requested,
            n_accepted: r.n_accepted,
            elapsed_s: r.elapsed.as_secs_f64(),
            rejected_reasons: r
                .rejected_reasons()
                .map(|(d, reason)| RejectedRecord { direction: *d, reason: reason.to_string() })
                .collect(),
            projections: &r.projections,
        };
        serde_json::to_string_pretty(&doc).expect("plain data serializes")
    }

    pub fn render(&self, json: bool) -> String {
        if json {
            let mut s = self.to_json();
            s.push('\n');
            s
        } else {
            self.to_text()
        }
    }
}

pub fn run_compute(cfg: &RunConfig) -> Result<ComputeReport, RunError> {
    cfg.validate()?;
    let curve = load_curve(cfg)?;
    compute_curve(&curve, cfg)
}

/// Runs the configured computation on an already loaded curve.
pub fn compute_curve(curve: &Curve3D, cfg: &RunConfig) -> Result<ComputeReport, RunError> {
    cfg.validate()?;
    let opts = ExpectedOptions {
        directions: cfg.direction_source(),
        engine: cfg.engine,
        engine_options: cfg.engine_options(),
        ..Default::default()
    };
    let result = expected_jones(curve, cfg.projections, &opts)?;
    Ok(ComputeReport { engine: cfg.engine, variable: cfg.variable, result })
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub inputs: Vec<PathBuf>,
    /// Prefix lengths; empty means whole curves.
    pub atoms: Vec<usize>,
    pub engines: Vec<Engine>,
    pub reps: usize,
    pub csv: Option<PathBuf>,
    pub chain: Option<char>,
    pub closed: bool,
    pub direction: Direction,
    pub max_crossings: usize,
    pub parallelism: Parallelism,
    pub rm_sequence: Vec<Move>,
}

impl BenchConfig {
    pub fn new(inputs: Vec<PathBuf>, engines: Vec<Engine>) -> Self {
        BenchConfig {
            inputs,
            atoms: Vec::new(),
            engines,
            reps: 5,
            csv: None,
            chain: None,
            closed: false,
            direction: Direction::Z,
            max_crossings: crate::bracket::DEFAULT_MAX_CROSSINGS,
            parallelism: Parallelism::default(),
            rm_sequence: DEFAULT_SEQUENCE.to_vec(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CellOutcome {
    Timed { min: Duration, median: Duration },
    Refused { crossings: usize, cap: usize },
    Failed(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchCell {
    pub structure: String,
    pub engine: Engine,
    /// Crossings of the projected diagram, when it could be built.
    pub crossings: Option<usize>,
    pub reps: usize,
    pub outcome: CellOutcome,
}

#[derive(Serialize)]
struct CsvRow<'a> {
    structure: &'a str,
    engine: &'static str,
    crossings: String,
    reps: usize,
    min_s: String,
    median_s: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchReport {
    pub cells: Vec<BenchCell>,
}

fn median(sorted: &[Duration]) -> Duration {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) / 2
    }
}

impl BenchCell {
    fn columns(&self) -> (String, String) {
        match &self.outcome {
            CellOutcome::Timed { min, median } => (format!("{:.6}", min.as_secs_f64()), format!("{:.6}", median.as_secs_f64())),
            CellOutcome::Refused { .. } => ("refused".into(), "refused".into()),
            CellOutcome::Failed(_) => ("failed".into(), "failed".into()),
        }
    }
}

impl BenchReport {
    pub fn cell(&self, structure: &str, engine: Engine) -> Option<&BenchCell> {
        self.cells.iter().find(|c| c.structure == structure && c.engine == engine)
    }

    /// Aligned table: one row per structure, one median-time column per
    /// engine.
    pub fn to_table(&self) -> String {
        let mut structures: Vec<&str> = Vec::new();
        let mut engines: Vec<Engine> = Vec::new();
        for c in &self.cells {
            if !structures.contains(&c.structure.as_str()) {
                structures.push(&c.structure);
            }
            if !engines.contains(&c.engine) {
                engines.push(c.engine);
            }
        }
        let mut rows = vec![std::iter::once("structure".to_string())
            .chain(std::iter::once("crossings".to_string()))
            .chain(engines.iter().map(|e| format!("{e} median_s")))
            .collect::<Vec<_>>()];
        for s in &structures {
            let crossings = self
                .cells
                .iter()
                .find(|c| c.structure == *s)
                .and_then(|c| c.crossings)
                .map_or("-".to_string(), |n| n.to_string());
            let mut row = vec![s.to_string(), crossings];
            for &e in &engines {
                row.push(match self.cell(s, e).map(|c| &c.outcome) {
                    Some(CellOutcome::Timed { median, .. }) => format!("{:.6}", median.as_secs_f64()),
                    Some(CellOutcome::Refused { crossings, cap }) => format!("refused ({crossings} > {cap})"),
                    Some(CellOutcome::Failed(msg)) => format!("failed: {msg}"),
                    None => "-".into(),
                });
            }
            rows.push(row);
        }
        let widths: Vec<usize> = (0..rows[0].len()).map(|i| rows.iter().map(|r| r[i].len()).max().unwrap()).collect();
        let mut out = String::new();
        for r in rows {
            let line: Vec<String> = r.iter().zip(&widths).map(|(cell, w)| format!("{cell:<w$}")).collect();
            writeln!(out, "{}", line.join("  ").trim_end()).unwrap();
        }
        out
    }

    pub fn to_csv(&self) -> Result<String, csv::Error> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for c in &self.cells {
            let (min_s, median_s) = c.columns();
            w.serialize(CsvRow {
                structure: &c.structure,
                engine: c.engine.name(),
                crossings: c.crossings.map_or(String::new(), |n| n.to_string()),
                reps: c.reps,
                min_s,
                median_s,
            })?;
        }
        let bytes = w.into_inner().map_err(|e| e.into_error())?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

fn structure_name(path: &Path, atoms: Option<usize>) -> String {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("input");
    match atoms {
        Some(k) => format!("{stem}:{k}"),
        None => stem.to_string(),
    }
}

/// Times every (structure, engine) cell. A failing cell is recorded and the
/// remaining cells still run.
pub fn run_bench(cfg: &BenchConfig) -> Result<BenchReport, RunError> {
    if cfg.reps == 0 {
        return Err(RunError::Config("the number of repetitions must be at least 1".into()));
    }
    let atoms: Vec<Option<usize>> = if cfg.atoms.is_empty() { vec![None] } else { cfg.atoms.iter().map(|&k| Some(k)).collect() };
    let opts = EngineOptions {
        max_crossings: cfg.max_crossings,
        parallelism: cfg.parallelism,
        rm_sequence: cfg.rm_sequence.clone(),
    };
    let mut cells = Vec::new();
    for input in &cfg.inputs {
        for &k in &atoms {
            let structure = structure_name(input, k);
            let mut run_cfg = RunConfig::new(input, InputFormat::guess(input));
            run_cfg.chain = cfg.chain;
            run_cfg.atom_limit = k;
            run_cfg.closed = cfg.closed;
            let diagram = load_curve(&run_cfg).map_err(|e| e.to_string()).and_then(|c| {
                build_diagram(&project(&c, &cfg.direction)).map_err(|e: DiagramError| e.to_string())
            });
            for &engine in &cfg.engines {
                let cell = match &diagram {
                    Err(msg) => BenchCell {
                        structure: structure.clone(),
                        engine,
                        crossings: None,
                        reps: 0,
                        outcome: CellOutcome::Failed(msg.clone()),
                    },
                    Ok(d) => time_cell(&structure, engine, d, cfg.reps, &opts),
                };
                cells.push(cell);
            }
        }
    }
    let report = BenchReport { cells };
    if let Some(path) = &cfg.csv {
        let text = report.to_csv().map_err(|source| RunError::Csv { path: path.clone(), source })?;
        std::fs::write(path, text).map_err(|source| IoError::Write { path: path.clone(), source })?;
    }
    Ok(report)
}

fn time_cell(structure: &str, engine: Engine, d: &crate::diagram::Diagram, reps: usize, opts: &EngineOptions) -> BenchCell {
    let crossings = crate::diagram::crossing_count(d);
    let mut times = Vec::with_capacity(reps);
    let mut outcome = None;
    for _ in 0..reps {
        let start = Instant::now();
        let r = evaluate(d, engine, opts);
        let t = start.elapsed();
        match r {
            Ok(ev) => {
                std::hint::black_box(ev);
                times.push(t);
            }
            Err(BracketError::CapExceeded { crossings, cap }) => {
                outcome = Some(CellOutcome::Refused { crossings, cap });
                break;
            }
            Err(e) => {
                outcome = Some(CellOutcome::Failed(e.to_string()));
                break;
            }
        }
    }
    let outcome = outcome.unwrap_or_else(|| {
        times.sort_unstable();
        CellOutcome::Timed { min: times[0], median: median(&times) }
    });
    BenchCell { structure: structure.to_string(), engine, crossings: Some(crossings), reps: times.len(), outcome }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::write_xyz;

    fn trefoil_file(dir: &Path, closed_name: &str) -> PathBuf {
        let pts = crate::fixtures::trefoil_points(40);
        let path = dir.join(closed_name);
        write_xyz(&path, &pts).unwrap();
        path
    }

    #[test]
    fn straight_line_prints_one() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("line.xyz");
        write_xyz(&path, &[[0.0, 0.0, 0.0], [1.0, 0.2, 0.1], [2.0, 0.4, 0.2], [3.0, 0.6, 0.3], [4.0, 0.8, 0.4]]).unwrap();
        let report = run_compute(&RunConfig::new(&path, InputFormat::Xyz)).unwrap();
        assert_eq!(report.polynomial_text(), "1");
        let text = report.to_text();
        assert!(text.starts_with("V(t) = 1\n"), "{text}");
        assert!(text.contains("crossings: 0\n"));
    }

    #[test]
    fn engines_print_the_same_polynomial() {
        let dir = tempfile::tempdir().unwrap();
        let path = trefoil_file(dir.path(), "trefoil.xyz");
        let mut texts = Vec::new();
        for engine in Engine::ALL {
            let mut cfg = RunConfig::new(&path, InputFormat::Xyz);
            cfg.closed = true;
            cfg.engine = engine;
            texts.push(run_compute(&cfg).unwrap().polynomial_text());
        }
        assert!(texts.iter().all(|t| *t == texts[0]), "{texts:?}");
        assert!(texts[0] == "-t^-4 + t^-3 + t^-1" || texts[0] == "t + t^3 - t^4", "{}", texts[0]);
    }

    #[test]
    fn json_keys_are_stable() {
        let dir = tempfile::tempdir().unwrap();
        let path = trefoil_file(dir.path(), "t.xyz");
        let keys = |cfg: &RunConfig| {
            let v: serde_json::Value = serde_json::from_str(&run_compute(cfg).unwrap().to_json()).unwrap();
            v.as_object().unwrap().keys().cloned().collect::<Vec<_>>()
        };
        let mut a = RunConfig::new(&path, InputFormat::Xyz);
        a.json = true;
        let mut b = a.clone();
        b.projections = 7;
        b.variable = Variable::A;
        assert_eq!(keys(&a), keys(&b));
        assert!(keys(&a).contains(&"rejected_reasons".to_string()));
    }

    #[test]
    fn config_checks() {
        let mut cfg = RunConfig::new("x", InputFormat::Xyz);
        cfg.projections = 0;
        assert!(cfg.validate().is_err());
        let mut cfg = RunConfig::new("x", InputFormat::Xyz);
        cfg.direction = Some(Direction::Z);
        cfg.seed = Some(1);
        assert!(cfg.validate().is_err());
        assert_eq!(InputFormat::guess(Path::new("a/2JWS.pdb")), InputFormat::Pdb);
        assert_eq!("t".parse::<Variable>().unwrap(), Variable::T);
    }

    #[test]
    fn bench_single_cell_and_refusal() {
        let dir = tempfile::tempdir().unwrap();
        let path = trefoil_file(dir.path(), "tre.xyz");
        let csv = dir.path().join("out.csv");
        let mut cfg = BenchConfig::new(vec![path.clone()], vec![Engine::Split]);
        cfg.reps = 2;
        cfg.closed = true;
        cfg.csv = Some(csv.clone());
        let report = run_bench(&cfg).unwrap();
        assert_eq!(report.cells.len(), 1);
        assert!(matches!(report.cells[0].outcome, CellOutcome::Timed { .. }));
        let text = std::fs::read_to_string(&csv).unwrap();
        assert_eq!(text.lines().next().unwrap(), "structure,engine,crossings,reps,min_s,median_s");
        assert_eq!(text.lines().count(), 2);

        let mut cfg = BenchConfig::new(vec![path, dir.path().join("missing.xyz")], vec![Engine::Oracle, Engine::Split]);
        cfg.closed = true;
        cfg.max_crossings = 1;
        cfg.reps = 1;
        let report = run_bench(&cfg).unwrap();
        assert_eq!(report.cells.len(), 4);
        assert!(matches!(report.cells[0].outcome, CellOutcome::Refused { cap: 1, .. }));
        assert!(matches!(report.cells[3].outcome, CellOutcome::Failed(_)));
        assert!(report.to_table().contains("refused"));
    }
}
