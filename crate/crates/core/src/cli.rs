//! Command-line front end: space descriptions in, reports out.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::beilinson::{
    check_identification, check_tau_rank, excision_iso, fmt_vector, kappa, realize_word, tau_matrix, tau_paths,
    verify_cd, BeilinsonError, CdVerdict, Level, Retained, StaircaseSigns,
};
use crate::exactla::{format_rational, QMatrix};
use crate::grpalg::{algebra_dim, monomial_basis, GroupoidSetup, GrpAlgError, Word};
use crate::homology::{verify_les, verify_triple_les, ChainComplex, HomologyError};
use crate::sset::{standard_model, FiniteSimplicialSet, Model, ResourceGuard, SsetError, DEFAULT_MAX_CELLS};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_GUARD: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("input error: {0}")]
    Input(String),
    #[error("resource guard: {0}")]
    Guard(String),
    #[error("{0}")]
    Internal(String),
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) | CliError::Io { .. } => EXIT_INPUT,
            CliError::Guard(_) => EXIT_GUARD,
            CliError::Internal(_) => EXIT_FAIL,
        }
    }
}

fn is_guard(e: &BeilinsonError) -> bool {
    matches!(
        e,
        BeilinsonError::Sset(SsetError::ResourceGuard { .. })
            | BeilinsonError::Homology(HomologyError::Sset(SsetError::ResourceGuard { .. }))
    )
}

fn is_input(e: &BeilinsonError) -> bool {
    matches!(
        e,
        BeilinsonError::Sset(
            SsetError::NotAVertex(_) | SsetError::MalformedGraph(_) | SsetError::InvalidParameter(_)
        ) | BeilinsonError::GrpAlg(
            GrpAlgError::Parse(_)
                | GrpAlgError::GeneratorOutOfRange { .. }
                | GrpAlgError::Disconnected(_)
                | GrpAlgError::Sset(SsetError::NotAVertex(_))
        ) | BeilinsonError::EndpointMismatch { .. }
    )
}

impl From<BeilinsonError> for CliError {
    fn from(e: BeilinsonError) -> Self {
        if is_guard(&e) {
            CliError::Guard(e.to_string())
        } else if is_input(&e) {
            CliError::Input(e.to_string())
        } else {
            CliError::Internal(e.to_string())
        }
    }
}

impl From<GrpAlgError> for CliError {
    fn from(e: GrpAlgError) -> Self {
        BeilinsonError::from(e).into()
    }
}

#[derive(Debug, Clone, Deserialize, Serialize, PartialEq, Eq)]
pub struct EdgeSpec {
    pub id: String,
    pub from: String,
    pub to: String,
}

/// Contents of a `--space` file.
#[derive(Debug, Clone, Deserialize, Serialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct SpaceSpec {
    pub model: String,
    #[serde(default)]
    pub rank: Option<usize>,
    #[serde(default)]
    pub vertices: Option<Vec<String>>,
    #[serde(default)]
    pub edges: Option<Vec<EdgeSpec>>,
    #[serde(default)]
    pub x: Option<String>,
    #[serde(default)]
    pub y: Option<String>,
}

/// A resolved space: the model, its simplicial set and base point ids.
#[derive(Debug, Clone)]
pub struct Space {
    pub model: Model,
    pub set: FiniteSimplicialSet,
    pub x: usize,
    pub y: usize,
    pub x_label: String,
    pub y_label: String,
}

impl SpaceSpec {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Input(format!("space description: {e}")))
    }

    pub fn resolve(&self) -> Result<Space, CliError> {
        let need_rank = || {
            self.rank
                .ok_or_else(|| CliError::Input(format!("model {:?} needs a rank", self.model)))
        };
        let (model, default_x, default_y) = match self.model.as_str() {
            "wedge" => (Model::Wedge(need_rank()?), "v".to_owned(), "v".to_owned()),
            "wedge_inv" => (Model::WedgeInv(need_rank()?), "v".to_owned(), "v".to_owned()),
            "two_vertex_circle" => (Model::TwoVertexCircle, "x".to_owned(), "y".to_owned()),
            "custom_graph" => {
                let vertices = self
                    .vertices
                    .clone()
                    .ok_or_else(|| CliError::Input("custom_graph needs vertices".into()))?;
                let edges = self
                    .edges
                    .as_ref()
                    .map(|es| {
                        es.iter()
                            .map(|e| (e.id.clone(), e.from.clone(), e.to.clone()))
                            .collect()
                    })
                    .unwrap_or_default();
                let first = vertices.first().cloned().unwrap_or_default();
                (Model::CustomGraph { vertices, edges }, first.clone(), first)
            }
            other => return Err(CliError::Input(format!("unknown model {other:?}"))),
        };
        let set = standard_model(&model).map_err(|e| CliError::Input(e.to_string()))?;
        let x_label = self.x.clone().unwrap_or(default_x);
        let y_label = self.y.clone().unwrap_or(default_y);
        let find = |label: &str| {
            set.find_label(0, label)
                .ok_or_else(|| CliError::Input(format!("unknown base point {label:?}")))
        };
        let (x, y) = (find(&x_label)?, find(&y_label)?);
        Ok(Space {
            model,
            set,
            x,
            y,
            x_label,
            y_label,
        })
    }
}

impl Space {
    pub fn setup(&self) -> Result<GroupoidSetup, CliError> {
        Ok(GroupoidSetup::for_model(&self.set, &self.model, self.x, self.y)?)
    }
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct CheckRecord {
    pub name: String,
    pub parameters: String,
    pub expected: String,
    pub got: String,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct DimRow {
    pub n: usize,
    pub homology: usize,
    pub algebra: usize,
    pub expected_homology: usize,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct MatrixRecord {
    pub name: String,
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<Vec<String>>,
}

impl MatrixRecord {
    pub fn new(name: impl Into<String>, m: &QMatrix) -> Self {
        MatrixRecord {
            name: name.into(),
            rows: m.rows(),
            cols: m.cols(),
            entries: m
                .to_dense()
                .iter()
                .map(|row| row.iter().map(format_rational).collect())
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq, Default)]
pub struct RunReport {
    pub command: String,
    pub parameters: BTreeMap<String, String>,
    pub checks: Vec<CheckRecord>,
    pub dimensions: Vec<DimRow>,
    pub matrices: Vec<MatrixRecord>,
    pub notes: Vec<String>,
    pub timing_ms: u128,
}

impl RunReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass) && self.dimensions.iter().all(|d| d.pass)
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(self).expect("report serializes");
                s.push('\n');
                s
            }
            Format::Tsv => self.render_tsv(),
        }
    }

    fn render_tsv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# command\t{}", self.command);
        for (k, v) in &self.parameters {
            let _ = writeln!(out, "# {k}\t{v}");
        }
        if !self.dimensions.is_empty() {
            out.push_str("n\thomology_dim\talgebra_dim\texpected_homology_dim\tpass\n");
            for d in &self.dimensions {
                let _ = writeln!(
                    out,
                    "{}\t{}\t{}\t{}\t{}",
                    d.n,
                    d.homology,
                    d.algebra,
                    d.expected_homology,
                    pass_word(d.pass)
                );
            }
        }
        if !self.checks.is_empty() {
            out.push_str("check\tparameters\texpected\tgot\tpass\n");
            for c in &self.checks {
                let _ = writeln!(
                    out,
                    "{}\t{}\t{}\t{}\t{}",
                    c.name,
                    c.parameters,
                    c.expected,
                    c.got,
                    pass_word(c.pass)
                );
            }
        }
        for m in &self.matrices {
            let _ = writeln!(out, "# matrix\t{}\t{}x{}", m.name, m.rows, m.cols);
            for row in &m.entries {
                let _ = writeln!(out, "{}", row.join("\t"));
            }
        }
        for note in &self.notes {
            let _ = writeln!(out, "# note\t{note}");
        }
        let _ = writeln!(out, "# timing_ms\t{}", self.timing_ms);
        out
    }
}

fn pass_word(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Tsv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RetainedArg {
    First,
    Last,
}

impl From<RetainedArg> for Retained {
    fn from(r: RetainedArg) -> Self {
        match r {
            RetainedArg::First => Retained::First,
            RetainedArg::Last => Retained::Last,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, ValueEnum)]
pub enum Check {
    Cd,
    Excision,
    TauRank,
    StaircaseBoundary,
    Les,
}

impl Check {
    pub const ALL: [Check; 5] = [
        Check::Cd,
        Check::Excision,
        Check::TauRank,
        Check::StaircaseBoundary,
        Check::Les,
    ];

    fn name(self) -> &'static str {
        match self {
            Check::Cd => "cd",
            Check::Excision => "excision",
            Check::TauRank => "tau-rank",
            Check::StaircaseBoundary => "staircase-boundary",
            Check::Les => "les",
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "relhom", version, about = "Diagonal pairs in powers of simplicial sets and their transition maps")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Clone)]
pub struct Common {
    /// Space description (JSON).
    #[arg(long)]
    pub space: PathBuf,
    /// Level; for `dims`, the largest level.
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    #[arg(long, value_enum, default_value = "first")]
    pub retained: RetainedArg,
    #[arg(long, env = "RELHOM_MAX_CELLS", default_value_t = DEFAULT_MAX_CELLS)]
    pub max_cells: usize,
    /// Write the report here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long, hide = true)]
    pub corrupt_signs: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Dimensions of H_n(X^n, Y^(n)) next to the truncated algebra.
    Dims {
        #[command(flatten)]
        common: Common,
    },
    /// Run verification checks; exit status 1 if any fails.
    Verify {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, value_delimiter = ',')]
        checks: Option<Vec<Check>>,
        #[arg(long)]
        words: Option<String>,
    },
    /// Matrix of τ in the Magnus basis, and classes of given words.
    Tau {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        words: Option<String>,
    },
    /// Matrix of κ_n, its ingredients, and both sides of the square for given words.
    Kappa {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        words: Option<String>,
    },
}

impl Command {
    pub fn common(&self) -> &Common {
        match self {
            Command::Dims { common }
            | Command::Verify { common, .. }
            | Command::Tau { common, .. }
            | Command::Kappa { common, .. } => common,
        }
    }

    fn default_format(&self) -> Format {
        match self {
            Command::Dims { .. } | Command::Verify { .. } => Format::Tsv,
            Command::Tau { .. } | Command::Kappa { .. } => Format::Json,
        }
    }

    pub fn format(&self) -> Format {
        self.common().format.unwrap_or_else(|| self.default_format())
    }
}

/// Words separated by commas, each in `g1 g2^-1` syntax.
pub fn parse_words(text: &str) -> Result<Vec<Word>, CliError> {
    text.split(',')
        .map(|w| w.parse::<Word>().map_err(|e| CliError::Input(e.to_string())))
        .collect()
}

struct Context {
    space: Space,
    setup: GroupoidSetup,
    retained: Retained,
    guard: ResourceGuard,
    signs: StaircaseSigns,
}

impl Context {
    fn new(common: &Common) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(&common.space)
            .map_err(|e| CliError::Input(format!("{}: {e}", common.space.display())))?;
        let space = SpaceSpec::parse(&text)?.resolve()?;
        let setup = space.setup()?;
        Ok(Context {
            setup,
            space,
            retained: common.retained.into(),
            guard: ResourceGuard {
                max_cells: common.max_cells,
            },
            signs: if common.corrupt_signs {
                StaircaseSigns::Corrupted
            } else {
                StaircaseSigns::Standard
            },
        })
    }

    fn level(&self, n: usize) -> Result<Level, CliError> {
        Ok(Level::build(
            &self.space.set,
            self.space.x,
            self.space.y,
            n,
            self.retained,
            &self.guard,
            self.signs,
        )?)
    }

    fn levels(&self, top: usize) -> Result<Vec<Level>, CliError> {
        (0..=top).map(|n| self.level(n)).collect()
    }

    fn parameters(&self, common: &Common) -> BTreeMap<String, String> {
        let mut p = BTreeMap::new();
        p.insert("model".into(), format!("{:?}", self.space.model));
        p.insert("x".into(), self.space.x_label.clone());
        p.insert("y".into(), self.space.y_label.clone());
        p.insert("n".into(), common.n.to_string());
        p.insert("retained".into(), self.retained.to_string());
        p.insert("rank".into(), self.setup.rank().to_string());
        p
    }

    fn words(&self, text: Option<&str>) -> Result<Vec<Word>, CliError> {
        let words = text.map(parse_words).transpose()?.unwrap_or_default();
        for w in &words {
            w.check_rank(self.setup.rank())?;
        }
        Ok(words)
    }
}

/// Runs a command and returns its report with the exit status it implies.
pub fn run(command: &Command) -> Result<(RunReport, i32), CliError> {
    let started = Instant::now();
    let common = command.common();
    let ctx = Context::new(common)?;
    let mut report = RunReport {
        parameters: ctx.parameters(common),
        ..RunReport::default()
    };
    match command {
        Command::Dims { .. } => {
            report.command = "dims".into();
            cmd_dims(&ctx, common.n, &mut report)?;
        }
        Command::Verify { checks, words, .. } => {
            report.command = "verify".into();
            let mut checks = checks.clone().unwrap_or_else(|| Check::ALL.to_vec());
            checks.sort();
            checks.dedup();
            let words = ctx.words(words.as_deref())?;
            report
                .parameters
                .insert("checks".into(), checks.iter().map(|c| c.name()).collect::<Vec<_>>().join(","));
            cmd_verify(&ctx, common.n, &checks, &words, &mut report)?;
        }
        Command::Tau { words, .. } => {
            report.command = "tau".into();
            let words = ctx.words(words.as_deref())?;
            cmd_tau(&ctx, common.n, &words, &mut report)?;
        }
        Command::Kappa { words, .. } => {
            report.command = "kappa".into();
            let words = ctx.words(words.as_deref())?;
            cmd_kappa(&ctx, common.n, &words, &mut report)?;
        }
    }
    report.timing_ms = started.elapsed().as_millis();
    let code = if report.all_pass() { EXIT_OK } else { EXIT_FAIL };
    Ok((report, code))
}

fn cmd_dims(ctx: &Context, n_max: usize, report: &mut RunReport) -> Result<(), CliError> {
    let r = ctx.setup.rank();
    for n in 1..=n_max {
        let level = ctx.level(n)?;
        let algebra = algebra_dim(r, n);
        let expected = if ctx.setup.basepoints_equal() { algebra - 1 } else { algebra };
        report.dimensions.push(DimRow {
            n,
            homology: level.dimension(),
            algebra,
            expected_homology: expected,
            pass: level.dimension() == expected,
        });
    }
    Ok(())
}

fn record(report: &mut RunReport, name: &str, parameters: String, expected: &str, got: String, pass: bool) {
    report.checks.push(CheckRecord {
        name: name.into(),
        parameters,
        expected: expected.into(),
        got,
        pass,
    });
}

/// Turns a failed computation inside a check into a failed record; guard
/// trips and input errors still abort the run.
fn or_fail<T>(
    report: &mut RunReport,
    name: &str,
    parameters: &str,
    expected: &str,
    result: Result<T, BeilinsonError>,
) -> Result<Option<T>, CliError> {
    match result {
        Ok(v) => Ok(Some(v)),
        Err(e) if is_guard(&e) || is_input(&e) => Err(e.into()),
        Err(e) => {
            record(report, name, parameters.into(), expected, format!("error: {e}"), false);
            Ok(None)
        }
    }
}

fn cmd_verify(
    ctx: &Context,
    n: usize,
    checks: &[Check],
    words: &[Word],
    report: &mut RunReport,
) -> Result<(), CliError> {
    let levels = ctx.levels(n)?;
    let base = &ctx.space.set;
    for k in 1..=n {
        let params = format!("n={k}");
        let (prev, cur) = (&levels[k - 1], &levels[k]);
        for &check in checks {
            match check {
                Check::Cd => {
                    let expected = match ctx.retained {
                        Retained::First => "exact",
                        Retained::Last => "exact|up-to-sign",
                    };
                    let result = kappa(prev, cur).and_then(|t| verify_cd(prev, cur, &t, &ctx.setup, words));
                    if let Some(rep) = or_fail(report, "cd", &params, expected, result)? {
                        let pass = match ctx.retained {
                            Retained::First => rep.verdict == CdVerdict::Exact,
                            Retained::Last => rep.verdict != CdVerdict::Mismatch,
                        };
                        let failing = rep.rows.iter().filter(|r| r.verdict == CdVerdict::Mismatch).count();
                        let got = format!("{} ({} rows, {} mismatched)", rep.verdict, rep.rows.len(), failing);
                        record(report, "cd", params.clone(), expected, got, pass);
                    }
                }
                Check::Excision => {
                    let expected = "invertible";
                    let result = check_identification(&prev.family, &cur.family)
                        .and_then(|ok| excision_iso(prev, cur).map(|(g, _)| (ok, g)));
                    if let Some((ok, g)) = or_fail(report, "excision", &params, expected, result)? {
                        let got = format!("{}x{} rank {}, identification {}", g.rows(), g.cols(), g.rank(), ok);
                        record(report, "excision", params.clone(), expected, got, ok);
                    }
                }
                Check::TauRank => {
                    let expected = if ctx.setup.basepoints_equal() {
                        "corank 1, kernel = unit"
                    } else {
                        "invertible"
                    };
                    if let Some(t) = or_fail(report, "tau-rank", &params, expected, tau_matrix(cur, &ctx.setup))? {
                        let res = check_tau_rank(&t, ctx.setup.basepoints_equal());
                        let got = format!(
                            "{}x{} rank {}, unit kernel {}",
                            res.rows, res.cols, res.rank, res.kernel_is_unit
                        );
                        record(report, "tau-rank", params.clone(), expected, got, res.pass);
                    }
                }
                Check::StaircaseBoundary => {
                    let expected = "boundary in Y";
                    let mut tested = 0;
                    let mut bad = Vec::new();
                    for m in monomial_basis(ctx.setup.rank(), 3) {
                        let w = Word::positive(&m);
                        let Some(paths) = realize_word(&ctx.setup, &w, k) else {
                            continue;
                        };
                        for (p, _) in paths {
                            tested += 1;
                            let result = cur.staircase(&p).and_then(|sc| sc.boundary_in_y(&cur.family));
                            match result {
                                Ok(true) => {}
                                Ok(false) => bad.push(p.describe(base)),
                                Err(e) if is_guard(&e) => return Err(e.into()),
                                Err(e) => bad.push(format!("{}: {e}", p.describe(base))),
                            }
                        }
                    }
                    let got = if bad.is_empty() {
                        format!("{tested} paths ok")
                    } else {
                        format!("{} of {tested} fail: {}", bad.len(), bad.join("; "))
                    };
                    record(report, "staircase-boundary", params.clone(), expected, got, bad.is_empty() && tested > 0);
                }
                Check::Les => {
                    let expected = "exact, d^2 = 0";
                    let set = cur.family.set();
                    let result = (|| -> Result<(bool, bool, bool), BeilinsonError> {
                        set.check_simplicial_identities()?;
                        let squares = ChainComplex::new(set, None, None, k + 1)?.squares_to_zero();
                        let pair = verify_les(set, cur.family.y_mask(), 0..=k)?.all_pass();
                        let triple =
                            verify_triple_les(set, cur.family.y_mask(), cur.family.z_mask(), 0..=k)?.all_pass();
                        Ok((squares, pair, triple))
                    })();
                    if let Some((squares, pair, triple)) = or_fail(report, "les", &params, expected, result)? {
                        let got = format!("d^2=0 {squares}, pair {pair}, triple {triple}");
                        record(report, "les", params.clone(), expected, got, squares && pair && triple);
                    }
                }
            }
        }
    }
    Ok(())
}

fn cmd_tau(ctx: &Context, n: usize, words: &[Word], report: &mut RunReport) -> Result<(), CliError> {
    let level = ctx.level(n)?;
    let t = tau_matrix(&level, &ctx.setup)?;
    report.matrices.push(MatrixRecord::new(format!("tau_{n}"), &t));
    let basis: Vec<String> = monomial_basis(ctx.setup.rank(), n)
        .iter()
        .map(|m| crate::grpalg::format_monomial(m))
        .collect();
    report.notes.push(format!("columns: {}", basis.join(" ")));
    report
        .notes
        .push(format!("reference path: {}", ctx.setup.reference_path().describe(&ctx.space.set)));
    for w in words {
        let v = match realize_word(&ctx.setup, w, n) {
            Some(paths) => tau_paths(&level, &paths)?,
            None => t.mul_vec(&crate::grpalg::magnus(w, n).to_vector(ctx.setup.rank())?)
                .map_err(|e| CliError::Internal(e.to_string()))?,
        };
        report.notes.push(format!("tau({w}) = {}", fmt_vector(&v)));
    }
    Ok(())
}

fn cmd_kappa(ctx: &Context, n: usize, words: &[Word], report: &mut RunReport) -> Result<(), CliError> {
    if n == 0 {
        return Err(CliError::Input("kappa needs n >= 1".into()));
    }
    let prev = ctx.level(n - 1)?;
    let cur = ctx.level(n)?;
    let t = kappa(&prev, &cur)?;
    report.matrices.push(MatrixRecord::new(format!("kappa_{n}"), &t.kappa));
    report
        .matrices
        .push(MatrixRecord::new(format!("excision_{}", n - 1), &t.excision));
    report
        .matrices
        .push(MatrixRecord::new(format!("connecting_{n}"), &t.connecting.matrix));
    report.notes.extend(t.trace.iter().cloned());
    if !words.is_empty() {
        let rep = verify_cd(&prev, &cur, &t, &ctx.setup, words)?;
        // word rows follow the basis rows
        for row in &rep.rows[rep.rows.len() - words.len()..] {
            let pass = match ctx.retained {
                Retained::First => row.verdict == CdVerdict::Exact,
                Retained::Last => row.verdict != CdVerdict::Mismatch,
            };
            record(
                report,
                "cd-word",
                format!("n={n} w={}", row.label),
                &fmt_vector(&row.rhs),
                fmt_vector(&row.lhs),
                pass,
            );
        }
    }
    Ok(())
}

/// Parses arguments, runs, writes the report, and returns the exit status.
pub fn main_with_args(args: impl IntoIterator<Item = std::ffi::OsString>) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    let format = cli.command.format();
    let outcome = run(&cli.command).and_then(|(report, code)| {
        let text = report.render(format);
        match &cli.command.common().out {
            Some(path) => std::fs::write(path, text).map_err(|source| CliError::Io {
                path: path.clone(),
                source,
            })?,
            None => print!("{text}"),
        }
        Ok(code)
    });
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("relhom: {e}");
            e.exit_code()
        }
    }
}
