//! Command-line front end. [`dispatch`] parses an argv, runs one verb and
//! returns the exit code with everything that would go to stdout/stderr.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::counts::{count_path, signed_count, CountError, CountPath, SampledGraph};
use crate::fourier::{self, FourierError, FourierResult, DEFAULT_BUDGET, ZERO_TOL};
use crate::graphs::{automorphism_count, canonical_form, copies_in_complete, enumerate_graphs, parse_graph, profile, GraphError, PatternGraph};
use crate::mc::{build_test, estimate_power, sample_er, sample_sbm, McError, SeededStream, VarianceMode};
use crate::sbm::{construct_example, ExampleFamily, RandomFamily, SbmError, SbmModel};
use crate::scaling::{run_example, FamilyTemplate, ScalingError};
use crate::verify::{self, falsify_search, generate_models, VerifyError, VerifyReport, NONVANISHING_C};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFICATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("bad JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Sbm(#[from] SbmError),
    #[error(transparent)]
    Fourier(#[from] FourierError),
    #[error(transparent)]
    Count(#[from] CountError),
    #[error(transparent)]
    Mc(#[from] McError),
    #[error(transparent)]
    Verify(#[from] VerifyError),
    #[error(transparent)]
    Scaling(#[from] ScalingError),
}

#[derive(Parser, Debug)]
#[command(name = "sbmfourier", version, about = "Fourier coefficients of stochastic block models and signed subgraph counts")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Master seed, printed in every report.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// `|Phi|` at or below this counts as zero.
    #[arg(long, global = true, default_value_t = ZERO_TOL)]
    tol: f64,
    /// Largest edge count in catalogs.
    #[arg(long, global = true, default_value_t = verify::DEFAULT_DMAX)]
    dmax: usize,
    /// Term budget for label sums.
    #[arg(long, global = true, default_value_t = DEFAULT_BUDGET)]
    budget: u128,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Size of the worker pool; output does not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Verb {
    /// Enumerate graphs on at most --dmax edges up to isomorphism.
    Catalog {
        #[arg(long)]
        connected: bool,
        /// Only graphs with exactly --dmax edges.
        #[arg(long)]
        exact: bool,
    },
    /// Fourier coefficient of one graph.
    Phi(PhiArgs),
    /// Same output as `phi`.
    Psi(PhiArgs),
    /// `Phi` and `Psi` of every connected graph up to --dmax edges.
    Table {
        #[arg(long)]
        model: String,
        /// Adds `psi * sqrt(n)`.
        #[arg(long)]
        n: Option<u64>,
    },
    /// Draw a graph from a model (G(n, 1/2) without --model).
    Sample {
        #[arg(long)]
        model: Option<String>,
        #[arg(long)]
        n: usize,
    },
    /// Signed count of H in an edge-list file or a fresh sample.
    Count {
        #[arg(long = "H")]
        h: String,
        #[arg(long)]
        graph: Option<PathBuf>,
        #[arg(long)]
        model: Option<String>,
        #[arg(long)]
        n: Option<usize>,
    },
    /// Type I / II error of the signed-count test.
    Power {
        #[arg(long)]
        model: String,
        #[arg(long = "H")]
        h: String,
        #[arg(long)]
        n: u64,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long, value_enum, default_value_t = VarianceChoice::Auto)]
        variance: VarianceChoice,
        /// Planted samples for a Monte-Carlo variance.
        #[arg(long, default_value_t = 200)]
        variance_trials: usize,
    },
    /// Check one inequality family on random models.
    Verify {
        #[arg(value_enum)]
        theorem: TheoremChoice,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        /// Floor on community probabilities for `nonvanishing`.
        #[arg(long, default_value_t = NONVANISHING_C)]
        c: f64,
    },
    /// Slope fits along the example families.
    Examples {
        #[arg(long, value_enum)]
        family: Option<TemplateChoice>,
        #[arg(long)]
        beta: Option<f64>,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        d: Option<usize>,
        /// Target graphs; repeat the flag for several.
        #[arg(long = "H")]
        h: Vec<String>,
        /// Comma separated grid values.
        #[arg(long, value_delimiter = ',')]
        grid: Vec<u64>,
    },
    /// Worst-ratio search over a random model family.
    Falsify {
        #[arg(value_enum)]
        family: FamilyChoice,
        #[arg(long, default_value_t = verify::PIN_MODELS)]
        models: usize,
        #[arg(long, default_value_t = NONVANISHING_C)]
        c: f64,
    },
}

#[derive(Args, Debug)]
struct PhiArgs {
    #[arg(long)]
    model: String,
    #[arg(long = "H")]
    h: String,
    #[arg(long, value_enum, default_value_t = MethodChoice::Auto)]
    method: MethodChoice,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
#[value(rename_all = "snake_case")]
enum MethodChoice {
    Auto,
    LabelSum,
    Elimination,
    Star,
    Cycle,
    Independence,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
#[value(rename_all = "snake_case")]
enum VarianceChoice {
    Exact,
    Mc,
    Auto,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
#[value(rename_all = "snake_case")]
enum TheoremChoice {
    Diagonal,
    Nonnegative,
    Nonvanishing,
    TwoCommunity,
    OneToOne,
    NormMonotone,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
#[value(rename_all = "snake_case")]
enum FamilyChoice {
    Diagonal,
    Nonnegative,
    Nonvanishing,
    TwoCommunity,
    Arbitrary,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
#[value(rename_all = "snake_case")]
enum TemplateChoice {
    DiagPm1,
    Star1Dominant,
    Star2Dominant,
    LargeStar,
    #[value(name = "quiet_4cycle")]
    Quiet4cycle,
    PlantedColoring,
    OneToOneGap2,
}

/// Exit code plus the text bound for each stream.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Runs one command. `argv[0]` is the program name.
pub fn dispatch<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            return if code == EXIT_OK {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            };
        }
    };
    let result = match cli.common.threads {
        Some(t) => match rayon::ThreadPoolBuilder::new().num_threads(t).build() {
            Ok(pool) => pool.install(|| run(&cli)),
            Err(e) => Err(CliError::Usage(format!("--threads: {e}"))),
        },
        None => run(&cli),
    };
    match result.and_then(|(doc, failed)| {
        let text = doc.render(cli.common.format, cli.common.seed)?;
        let code = if failed { EXIT_VERIFICATION } else { EXIT_OK };
        match &cli.common.out {
            Some(path) => {
                std::fs::File::create(path)
                    .and_then(|mut f| f.write_all(text.as_bytes()))
                    .map_err(|source| CliError::Io { path: path.display().to_string(), source })?;
                Ok(Outcome { code, stdout: String::new(), stderr: String::new() })
            }
            None => Ok(Outcome { code, stdout: text, stderr: String::new() }),
        }
    }) {
        Ok(o) => o,
        Err(e) => Outcome { code: EXIT_USAGE, stdout: String::new(), stderr: format!("error: {e}\n") },
    }
}

// ------------------------------------------------------------------ output

/// One table in two encodings: JSON rows of objects and CSV rows of cells.
struct Doc {
    verb: &'static str,
    /// Extra top-level JSON fields.
    header: Map<String, Value>,
    columns: Vec<&'static str>,
    rows: Vec<Vec<Value>>,
    /// Replaces the `rows` array in JSON when set.
    json_body: Option<Value>,
}

impl Doc {
    fn new(verb: &'static str, columns: Vec<&'static str>) -> Self {
        Doc { verb, header: Map::new(), columns, rows: Vec::new(), json_body: None }
    }

    fn render(&self, format: Format, seed: u64) -> Result<String, CliError> {
        match format {
            Format::Json => {
                let mut top = Map::new();
                top.insert("verb".into(), Value::from(self.verb));
                top.insert("seed".into(), Value::from(seed));
                top.extend(self.header.clone());
                match &self.json_body {
                    Some(Value::Object(body)) => top.extend(body.clone()),
                    Some(other) => {
                        top.insert("result".into(), other.clone());
                    }
                    None => {
                        let rows = self
                            .rows
                            .iter()
                            .map(|r| Value::Object(self.columns.iter().map(|c| c.to_string()).zip(r.iter().cloned()).collect()))
                            .collect();
                        top.insert("rows".into(), Value::Array(rows));
                    }
                }
                let mut buf = Vec::new();
                let mut ser = serde_json::Serializer::with_formatter(&mut buf, Sig17);
                serde::Serialize::serialize(&Value::Object(top), &mut ser)?;
                buf.push(b'\n');
                Ok(String::from_utf8(buf).expect("utf8"))
            }
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(&self.columns)?;
                for r in &self.rows {
                    w.write_record(r.iter().map(csv_cell))?;
                }
                let body = String::from_utf8(w.into_inner().map_err(|e| CliError::Usage(e.to_string()))?).expect("utf8");
                Ok(format!("# {} seed={seed}\n{body}", self.verb))
            }
        }
    }
}

/// JSON floats with 17 significant digits.
struct Sig17;

impl serde_json::ser::Formatter for Sig17 {
    fn write_f64<W: ?Sized + std::io::Write>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()> {
        write!(writer, "{}", sig(value, 17))
    }

    fn write_f32<W: ?Sized + std::io::Write>(&mut self, writer: &mut W, value: f32) -> std::io::Result<()> {
        write!(writer, "{}", sig(value as f64, 17))
    }
}

/// `x` in scientific notation with `digits` significant digits.
pub fn sig(x: f64, digits: usize) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{:.*e}", digits - 1, x)
    }
}

fn csv_cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::Bool(b) => b.to_string(),
        Value::Number(n) if n.is_f64() => sig(n.as_f64().expect("f64"), 12),
        Value::Number(n) => n.to_string(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}

fn big(x: u128) -> Value {
    u64::try_from(x).map_or_else(|_| num(x as f64), Value::from)
}

// ------------------------------------------------------------------ inputs

fn read_arg(raw: &str) -> Result<String, CliError> {
    match raw.strip_prefix('@') {
        Some(path) => std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.into(), source }),
        None => Ok(raw.into()),
    }
}

/// `{"p": .., "Q": ..}` or a named example such as `{"name": "diag_pm1"}`,
/// inline or as `@path`.
pub fn load_model(raw: &str) -> Result<SbmModel, CliError> {
    let v: Value = serde_json::from_str(&read_arg(raw)?)?;
    if v.get("name").is_some() {
        let family: ExampleFamily = serde_json::from_value(v)?;
        return Ok(construct_example(&family)?);
    }
    Ok(serde_json::from_value(v)?)
}

fn graph_arg(raw: &str) -> Result<PatternGraph, CliError> {
    Ok(parse_graph(read_arg(raw)?.trim())?)
}

// -------------------------------------------------------------------- verbs

fn run(cli: &Cli) -> Result<(Doc, bool), CliError> {
    let c = &cli.common;
    let stream = SeededStream::new(c.seed, 0);
    match &cli.verb {
        Verb::Catalog { connected, exact } => Ok((catalog(c.dmax, *connected, *exact)?, false)),
        Verb::Phi(a) => Ok((phi_doc("phi", a, c)?, false)),
        Verb::Psi(a) => Ok((phi_doc("psi", a, c)?, false)),
        Verb::Table { model, n } => Ok((table(&load_model(model)?, *n, c)?, false)),
        Verb::Sample { model, n } => {
            let g = match model {
                Some(m) => sample_sbm(&load_model(m)?, *n, &stream),
                None => sample_er(*n, &stream),
            };
            Ok((sample_doc(&g), false))
        }
        Verb::Count { h, graph, model, n } => {
            let h = graph_arg(h)?;
            let g = match (graph, n) {
                (Some(path), _) => SampledGraph::read_edge_list(path)?,
                (None, Some(n)) => match model {
                    Some(m) => sample_sbm(&load_model(m)?, *n, &stream),
                    None => sample_er(*n, &stream),
                },
                (None, None) => return Err(CliError::Usage("count needs --graph or --n".into())),
            };
            Ok((count_doc(&g, &h)?, false))
        }
        Verb::Power { model, h, n, trials, variance, variance_trials } => {
            let m = load_model(model)?;
            let h = graph_arg(h)?;
            let mode = match variance {
                VarianceChoice::Exact => VarianceMode::Exact,
                VarianceChoice::Mc => VarianceMode::MonteCarlo { trials: *variance_trials },
                VarianceChoice::Auto => VarianceMode::Auto { trials: *variance_trials },
            };
            // variance samples and power trials use disjoint streams
            let spec = build_test(&m, &h, *n, mode, &stream.child(0))?;
            let report = estimate_power(&spec, *trials, &stream.child(1))?;
            let mut doc = Doc::new("power", vec!["n", "H", "phi", "psi", "sep_ratio", "type1", "type2"]);
            doc.rows.push(vec![
                Value::from(*n),
                Value::from(h.name()),
                num(spec.phi),
                num(spec.psi),
                num(spec.separation_ratio),
                num(report.type1_rate),
                num(report.type2_rate),
            ]);
            doc.header.insert("trials".into(), Value::from(*trials));
            doc.header.insert("threshold".into(), num(spec.threshold));
            doc.header.insert("null_sigma".into(), num(spec.null_sigma));
            doc.header.insert("planted_mean".into(), num(spec.planted_mean));
            doc.header.insert("planted_sigma".into(), num(spec.planted_sigma));
            doc.header.insert("variance_exact".into(), Value::from(spec.variance_exact));
            Ok((doc, false))
        }
        Verb::Verify { theorem, trials, c: floor } => {
            let report = match theorem {
                TheoremChoice::Diagonal => verify::check_diagonal(&generate_models(RandomFamily::Diagonal, *trials, &stream)?, c.dmax)?,
                TheoremChoice::Nonnegative => verify::check_nonnegative(&generate_models(RandomFamily::Nonnegative, *trials, &stream)?, c.dmax)?,
                TheoremChoice::Nonvanishing => {
                    verify::check_nonvanishing(&generate_models(RandomFamily::Nonvanishing(*floor), *trials, &stream)?, *floor, c.dmax)?
                }
                TheoremChoice::TwoCommunity => verify::check_two_community(&generate_models(RandomFamily::TwoCommunity, *trials, &stream)?, c.dmax)?,
                TheoremChoice::OneToOne => verify::check_one_to_one(&generate_models(RandomFamily::Arbitrary, *trials, &stream)?)?,
                TheoremChoice::NormMonotone => verify::norm_search(*trials, &stream)?,
            };
            let failed = !report.passed();
            Ok((report_doc("verify", &report)?, failed))
        }
        Verb::Falsify { family, models, c: floor } => {
            let family = match family {
                FamilyChoice::Diagonal => RandomFamily::Diagonal,
                FamilyChoice::Nonnegative => RandomFamily::Nonnegative,
                FamilyChoice::Nonvanishing => RandomFamily::Nonvanishing(*floor),
                FamilyChoice::TwoCommunity => RandomFamily::TwoCommunity,
                FamilyChoice::Arbitrary => RandomFamily::Arbitrary,
            };
            let report = falsify_search(family, c.dmax, *models, &stream)?;
            let failed = !report.passed();
            Ok((report_doc("falsify", &report)?, failed))
        }
        Verb::Examples { family, beta, alpha, d, h, grid } => examples_doc(*family, *beta, *alpha, *d, h, grid),
    }
}

fn catalog(dmax: usize, connected: bool, exact: bool) -> Result<Doc, CliError> {
    let mut graphs = enumerate_graphs(dmax, connected)?;
    if exact {
        graphs.retain(|g| g.edge_count() == dmax);
    }
    let mut doc = Doc::new(
        "catalog",
        vec!["index", "name", "spec", "vertices", "edges", "max_degree", "automorphisms", "canonical", "tree", "bipartite", "two_connected", "all_degrees_even"],
    );
    for (i, g) in graphs.iter().enumerate() {
        let p = profile(g);
        doc.rows.push(vec![
            Value::from(i),
            Value::from(g.name()),
            Value::from(g.to_spec()),
            Value::from(g.vertex_count()),
            Value::from(g.edge_count()),
            Value::from(g.max_degree()),
            Value::from(automorphism_count(g)),
            Value::from(canonical_form(g).hex()),
            Value::from(p.is_tree),
            Value::from(p.is_bipartite),
            Value::from(p.is_2connected),
            Value::from(p.all_degrees_even),
        ]);
    }
    doc.header.insert("count".into(), Value::from(graphs.len()));
    Ok(doc)
}

fn phi_with(m: &SbmModel, h: &PatternGraph, method: MethodChoice, budget: u128) -> Result<FourierResult, CliError> {
    let not_in = |what: &str| CliError::Usage(format!("H = {} is not {what}", h.to_spec()));
    Ok(match method {
        MethodChoice::Auto => fourier::phi_budget(m, h, budget)?,
        MethodChoice::LabelSum => fourier::phi_label_sum(m, h, budget)?,
        MethodChoice::Elimination => fourier::phi_elimination(m, h, budget)?,
        MethodChoice::Star => fourier::phi_star(m, h.as_star().ok_or_else(|| not_in("a star"))?)?,
        MethodChoice::Cycle => fourier::phi_cycle_spectral(m, h.as_cycle().ok_or_else(|| not_in("a cycle"))?)?,
        MethodChoice::Independence => fourier::phi_independence_poly(m, h)?,
    })
}

fn phi_doc(verb: &'static str, a: &PhiArgs, c: &Common) -> Result<Doc, CliError> {
    let m = load_model(&a.model)?;
    let h = graph_arg(&a.h)?;
    let r = phi_with(&m, &h, a.method, c.budget)?;
    let mut doc = Doc::new(verb, vec!["H", "phi", "psi", "method", "terms", "zero"]);
    doc.rows.push(vec![Value::from(h.name()), num(r.phi), num(r.psi), Value::from(r.method.as_str()), big(r.terms_evaluated), Value::from(r.phi.abs() <= c.tol)]);
    doc.json_body = Some(Value::Object(doc.columns.iter().map(|s| s.to_string()).zip(doc.rows[0].iter().cloned()).collect()));
    Ok(doc)
}

fn table(m: &SbmModel, n: Option<u64>, c: &Common) -> Result<Doc, CliError> {
    let graphs = enumerate_graphs(c.dmax, true)?;
    let mut columns = vec!["H", "name", "vertices", "edges", "phi", "psi", "method", "zero"];
    if n.is_some() {
        columns.push("psi_sqrt_n");
    }
    let mut doc = Doc::new("table", columns);
    for h in graphs {
        let r = fourier::phi_budget(m, &h, c.budget)?;
        let mut row = vec![
            Value::from(h.to_spec()),
            Value::from(h.name()),
            Value::from(h.vertex_count()),
            Value::from(h.edge_count()),
            num(r.phi),
            num(r.psi),
            Value::from(r.method.as_str()),
            Value::from(r.phi.abs() <= c.tol),
        ];
        if let Some(n) = n {
            row.push(num(r.psi * (n as f64).sqrt()));
        }
        doc.rows.push(row);
    }
    Ok(doc)
}

fn sample_doc(g: &SampledGraph) -> Doc {
    let mut doc = Doc::new("sample", vec!["u", "v"]);
    let edges = g.edges();
    for &(u, v) in &edges {
        doc.rows.push(vec![Value::from(u), Value::from(v)]);
    }
    let mut body = Map::new();
    body.insert("n".into(), Value::from(g.n()));
    body.insert("edges".into(), Value::Array(edges.iter().map(|&(u, v)| json!([u, v])).collect()));
    if let Some(labels) = g.labels() {
        body.insert("labels".into(), Value::from(labels.to_vec()));
    }
    doc.json_body = Some(Value::Object(body));
    doc
}

fn count_doc(g: &SampledGraph, h: &PatternGraph) -> Result<Doc, CliError> {
    let sc = signed_count(g, h)?;
    let copies = copies_in_complete(h, g.n() as u64)?;
    let path = match count_path(h) {
        CountPath::Star => "star",
        CountPath::Triangle => "triangle_trace",
        CountPath::Cycle4 => "cycle4_trace",
        CountPath::Naive => "naive",
    };
    let mut doc = Doc::new("count", vec!["H", "n", "sc", "copies", "null_sigma", "path"]);
    doc.rows.push(vec![Value::from(h.name()), Value::from(g.n()), Value::from(sc), big(copies), num((copies as f64).sqrt()), Value::from(path)]);
    doc.json_body = Some(Value::Object(doc.columns.iter().map(|s| s.to_string()).zip(doc.rows[0].iter().cloned()).collect()));
    Ok(doc)
}

fn report_doc(verb: &'static str, r: &VerifyReport) -> Result<Doc, CliError> {
    let mut doc = Doc::new(verb, vec!["theorem", "part", "checks", "violations", "skipped", "flagged", "worst_ratio", "constant", "witness_trial", "witness_graph"]);
    for p in &r.parts {
        doc.rows.push(vec![
            Value::from(r.theorem.clone()),
            Value::from(p.inequality.name()),
            Value::from(p.checks),
            Value::from(p.violations),
            Value::from(p.skipped),
            Value::from(p.flagged),
            num(p.worst_ratio),
            p.constant_bound_used.map_or(Value::Null, num),
            p.witness.as_ref().map_or(Value::Null, |w| Value::from(w.trial)),
            p.witness.as_ref().and_then(|w| w.graph).map_or(Value::Null, |g| Value::from(g.name())),
        ]);
    }
    doc.json_body = Some(serde_json::to_value(r)?);
    Ok(doc)
}

/// The fits the exponent check runs when no family is named.
pub fn default_example_runs() -> Vec<(FamilyTemplate, Vec<PatternGraph>)> {
    vec![
        (FamilyTemplate::Star1Dominant { beta: 0.8 }, vec![PatternGraph::star(1)]),
        (FamilyTemplate::Star2Dominant { beta: 0.7 }, vec![PatternGraph::star(2)]),
        (FamilyTemplate::LargeStar { d: 4 }, vec![PatternGraph::star(4)]),
        (FamilyTemplate::PlantedColoring { alpha: 0.7 }, vec![PatternGraph::cycle(3)]),
        (FamilyTemplate::Quiet4Cycle, vec![PatternGraph::cycle(4)]),
    ]
}

fn examples_doc(
    family: Option<TemplateChoice>,
    beta: Option<f64>,
    alpha: Option<f64>,
    d: Option<usize>,
    h: &[String],
    grid: &[u64],
) -> Result<(Doc, bool), CliError> {
    let runs = match family {
        None => default_example_runs(),
        Some(f) => {
            let t = match f {
                TemplateChoice::DiagPm1 => FamilyTemplate::DiagPm1,
                TemplateChoice::Star1Dominant => FamilyTemplate::Star1Dominant { beta: beta.unwrap_or(0.8) },
                TemplateChoice::Star2Dominant => FamilyTemplate::Star2Dominant { beta: beta.unwrap_or(0.7) },
                TemplateChoice::LargeStar => FamilyTemplate::LargeStar { d: d.unwrap_or(4) },
                TemplateChoice::Quiet4cycle => FamilyTemplate::Quiet4Cycle,
                TemplateChoice::PlantedColoring => FamilyTemplate::PlantedColoring { alpha: alpha.unwrap_or(0.7) },
                TemplateChoice::OneToOneGap2 => FamilyTemplate::OneToOneGap2 { alpha: alpha.unwrap_or(0.5) },
            };
            let targets = if h.is_empty() {
                vec![t.designated_dominant().unwrap_or(PatternGraph::cycle(4))]
            } else {
                h.iter().map(|s| graph_arg(s)).collect::<Result<_, _>>()?
            };
            vec![(t, targets)]
        }
    };
    let mut doc = Doc::new("examples", vec!["family", "H", "n", "phi", "psi", "psi_sqrt_n", "fitted_slope", "predicted_slope", "pass"]);
    let mut reports = Vec::new();
    let mut failed = false;
    for (t, targets) in runs {
        let grid = if grid.is_empty() { t.default_grid() } else { grid.to_vec() };
        for r in run_example(&t, &targets, &grid)? {
            failed |= !r.passes;
            for i in 0..r.n_grid.len() {
                doc.rows.push(vec![
                    Value::from(r.family.clone()),
                    Value::from(r.graph.name()),
                    Value::from(r.n_grid[i]),
                    num(r.phi_values[i]),
                    num(r.psi_values[i]),
                    num(r.psi_values[i] * (r.sample_sizes[i] as f64).sqrt()),
                    num(r.fitted_slope),
                    r.predicted_slope.map_or(Value::Null, |p| num(p.slope)),
                    Value::from(r.passes),
                ]);
            }
            reports.push(r);
        }
    }
    doc.json_body = Some(json!({ "reports": serde_json::to_value(&reports)? }));
    Ok((doc, failed))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(args: &[&str]) -> Outcome {
        dispatch(std::iter::once("sbmfourier").chain(args.iter().copied()))
    }

    #[test]
    fn sig_digits() {
        assert_eq!(sig(1.0, 17), "1.0000000000000000e0");
        assert_eq!(sig(-0.25, 12), "-2.50000000000e-1");
        let x = 0.1 + 0.2;
        assert_eq!(sig(x, 17).parse::<f64>().unwrap(), x);
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(run(&["frobnicate"]).code, EXIT_USAGE);
        assert_eq!(run(&["catalog", "--dmax", "three"]).code, EXIT_USAGE);
        assert_eq!(run(&["phi", "--model", "@/no/such/file.json", "--H", "cyc4"]).code, EXIT_USAGE);
        assert_eq!(run(&["phi", "--model", r#"{"p":[0.5,0.4],"Q":[[1,0],[0,1]]}"#, "--H", "cyc4"]).code, EXIT_USAGE);
        assert_eq!(run(&["phi", "--model", r#"{"name":"diag_pm1"}"#, "--H", "cyc4", "--method", "star"]).code, EXIT_USAGE);
        let help = run(&["--help"]);
        assert_eq!(help.code, EXIT_OK);
        assert!(help.stdout.contains("catalog"));
    }

    #[test]
    fn phi_json_shape() {
        let o = run(&["phi", "--model", r#"{"name":"diag_pm1"}"#, "--H", "cyc4"]);
        assert_eq!(o.code, 0, "{}", o.stderr);
        let v: Value = serde_json::from_str(&o.stdout).unwrap();
        assert_eq!(v["phi"].as_f64(), Some(1.0));
        assert_eq!(v["method"], "cycle_spectral");
        assert_eq!(v["seed"], 0);
    }

    #[test]
    fn catalog_rows() {
        let o = run(&["catalog", "--dmax", "3", "--connected", "--exact", "--format", "csv"]);
        assert_eq!(o.code, 0);
        // comment, header, three graphs
        assert_eq!(o.stdout.lines().count(), 5);
        assert!(o.stdout.starts_with("# catalog seed=0\nindex,name,"));
    }
}
