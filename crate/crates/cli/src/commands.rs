//! The six subcommands. Each writes into a run directory and returns an
//! [`Outcome`] whose exit code follows: failures → 1, otherwise uncertified
//! hypotheses → 3, otherwise 0.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use hklab::geometry::{DimensionParams, Exponent, GeometryProfile};
use hklab::graph::io::{read_graph, write_graph};
use hklab::metric::default_intrinsic_metric;
use hklab::semigroup::{BuildOptions, HeatSystem};
use hklab::zoo::GeneratorSpec;
use hklab::{CheckReport, Graph, Metric, Status, Tally};
use hklab_lab::davies::{certify_center, check_gaussian_bound, CenterCertificate};
use hklab_lab::statements;
use hklab_lab::suite::{run_suite, ScenarioContext};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{exit, CliError};
use crate::output::{file_safe, run_dir, stamp_line, write_csv, write_json, VERSION};
use crate::scenario::LoadedScenario;
use crate::svg::{margin_plot, Series};
use crate::times::TimeSpec;

const DEFAULT_BASE: &str = "hklab-runs";

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// Flags shared by the subcommands; each command reads the ones it needs.
#[derive(Clone, Debug, Default)]
pub struct Options {
    pub out: Option<PathBuf>,
    pub times: Option<TimeSpec>,
    pub seed: Option<u64>,
    pub suite: Option<Vec<String>>,
    pub format: Format,
}

#[derive(Clone, Debug)]
pub struct Outcome {
    pub dir: PathBuf,
    pub exit: i32,
    pub summary: RunSummary,
}

/// Common shape of every `summary.json`; `report` aggregates these.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunSummary {
    pub command: String,
    pub version: String,
    pub scenario: String,
    pub seed: u64,
    pub totals: Tally,
    pub groups: BTreeMap<String, Tally>,
    pub failures: Vec<FailureRow>,
    pub uncertified: Vec<String>,
    pub exit_code: i32,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub extra: BTreeMap<String, serde_json::Value>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FailureRow {
    pub group: String,
    pub instance: String,
    pub status: Status,
    pub margin: f64,
    #[serde(default)]
    pub note: String,
}

impl RunSummary {
    fn new(command: &str, scenario: &str, seed: u64) -> Self {
        RunSummary {
            command: command.into(),
            version: VERSION.into(),
            scenario: scenario.into(),
            seed,
            totals: Tally::default(),
            groups: BTreeMap::new(),
            failures: Vec::new(),
            uncertified: Vec::new(),
            exit_code: exit::PASS,
            extra: BTreeMap::new(),
        }
    }

    fn add(&mut self, group: &str, instance: &str, status: Status, margin: f64, note: Option<&str>) {
        self.totals.add(status, margin);
        self.groups.entry(group.to_string()).or_default().add(status, margin);
        match status {
            Status::Fail => self.failures.push(FailureRow {
                group: group.into(),
                instance: instance.into(),
                status,
                margin,
                note: note.unwrap_or_default().into(),
            }),
            Status::Uncertified if !self.uncertified.iter().any(|u| u == group) => self.uncertified.push(group.into()),
            _ => {}
        }
    }

    fn finish(&mut self) -> i32 {
        self.exit_code = if self.totals.fail > 0 {
            exit::FAILURES
        } else if self.totals.uncertified > 0 {
            exit::UNCERTIFIED
        } else {
            exit::PASS
        };
        self.exit_code
    }
}

fn finish(dir: PathBuf, mut summary: RunSummary) -> Result<Outcome, CliError> {
    let code = summary.finish();
    write_json(&dir.join("summary.json"), &summary)?;
    log::info!("{} wrote {} ({} checks, exit {code})", summary.command, dir.display(), summary.totals.total);
    Ok(Outcome { dir, exit: code, summary })
}

fn base_dir(ls: Option<&LoadedScenario>) -> PathBuf {
    ls.and_then(|l| l.scenario.output.as_ref().map(|p| l.resolve_path(p))).unwrap_or_else(|| PathBuf::from(DEFAULT_BASE))
}

fn p_label(p: Exponent<f64>) -> String {
    p.to_string()
}

/// Graph, metric and heat system of a scenario.
struct Loaded {
    ls: LoadedScenario,
    graph: Graph,
    metric: Metric,
    seed: u64,
}

impl Loaded {
    fn new(path: &Path, opts: &Options) -> Result<Self, CliError> {
        let ls = LoadedScenario::read(path)?;
        let graph = ls.load_graph()?;
        let metric = ls.load_metric(&graph)?;
        let seed = opts.seed.unwrap_or(ls.scenario.seed);
        Ok(Loaded { ls, graph, metric, seed })
    }

    fn heat(&self) -> Result<HeatSystem<f64>, CliError> {
        let mut opts = BuildOptions::default();
        if let Some(bytes) = self.ls.cache_bytes() {
            opts.cache_bytes = bytes;
        }
        Ok(HeatSystem::build_with(&self.graph, &opts)?)
    }

    fn certificates(&self) -> Result<Vec<CenterCertificate>, CliError> {
        let centers = self.ls.centers(&self.graph, self.seed)?;
        let (r, big_r) = self.ls.radii()?;
        let params: Vec<DimensionParams<f64>> = centers.iter().map(|&x| self.ls.params_for(&self.graph, x)).collect::<Result<_, _>>()?;
        let budget = self.ls.sobolev_budget(self.seed);
        let targets = self.ls.scenario.targets;
        centers
            .par_iter()
            .zip(params)
            .map(|(&x, p)| {
                certify_center(&self.graph, &self.metric, x, p, r, big_r, targets, &budget)
                    .map_err(|e| CliError::in_statement("sv-certificate", e))
            })
            .collect()
    }
}

#[derive(Serialize)]
struct CertificateRow<'a> {
    center: &'a str,
    r: f64,
    #[serde(rename = "R")]
    big_r: String,
    n: f64,
    d: f64,
    p: String,
    c_s: f64,
    c_s_radius: f64,
    c_d: f64,
    converged: bool,
    sobolev_pass: Option<bool>,
    doubling_pass: Option<bool>,
    violating_radius: Option<f64>,
    status: Status,
}

fn certificate_rows(certs: &[CenterCertificate]) -> Vec<CertificateRow<'_>> {
    certs
        .iter()
        .map(|c| {
            let p = c.data.profile.params();
            CertificateRow {
                center: &c.sv.center,
                r: c.data.r,
                big_r: c.data.big_r.map_or("inf".into(), |v| v.to_string()),
                n: p.n,
                d: p.d,
                p: p_label(p.p),
                c_s: c.sv.c_s,
                c_s_radius: c.sv.c_s_radius,
                c_d: c.sv.c_d,
                converged: c.sv.converged,
                sobolev_pass: c.sv.sobolev_pass,
                doubling_pass: c.sv.doubling_pass,
                violating_radius: c.sv.violating_radius,
                status: if c.sv.passed() { Status::Pass } else { Status::Uncertified },
            }
        })
        .collect()
}

/// `generate`: a generator stanza (bare, or inside a scenario) to a graph file.
pub fn cmd_generate(scenario: Option<&Path>, spec: Option<&Path>, opts: &Options) -> Result<Outcome, CliError> {
    let (mut gen, name, ls) = match (scenario, spec) {
        (Some(path), None) => {
            let ls = LoadedScenario::read(path)?;
            let gen = match &ls.scenario.graph {
                crate::scenario::GraphSource::Generator(g) => g.clone(),
                crate::scenario::GraphSource::File(_) => {
                    return Err(CliError::Config { field: "graph".into(), message: "generate needs a generator stanza, not a file".into() })
                }
            };
            (gen, ls.name(), Some(ls))
        }
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::Config { field: "spec".into(), message: e.to_string() })?;
            let gen: GeneratorSpec =
                serde_json::from_str(&text).map_err(|e| CliError::Config { field: "spec".into(), message: e.to_string() })?;
            (gen, path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default(), None)
        }
        _ => return Err(CliError::Config { field: "generate".into(), message: "pass exactly one of --scenario or --spec".into() }),
    };
    if let Some(seed) = opts.seed {
        gen.seed = seed;
    }
    let g: Graph = gen.generate().map_err(|e| CliError::Config { field: "graph.generator".into(), message: e.to_string() })?;
    let dir = run_dir(opts.out.as_deref(), &base_dir(ls.as_ref()), "generate")?;
    write_graph(&g, &dir.join("graph.json"))?;
    let mut summary = RunSummary::new("generate", &name, gen.seed);
    summary.extra.insert("vertices".into(), g.len().into());
    summary.extra.insert("edges".into(), g.edges().len().into());
    finish(dir, summary)
}

#[derive(Serialize)]
struct ProfileCsvRow {
    #[serde(rename = "R")]
    r: f64,
    volume: f64,
    #[serde(rename = "D_p")]
    d_p: f64,
    #[serde(rename = "M_p")]
    m_p: f64,
    mu: f64,
    theta: f64,
    kappa: u32,
    #[serde(rename = "Gamma")]
    gamma: f64,
}

/// `inspect`: graph facts and radial profiles at the scenario centers (or at
/// the first vertex with `n = 3, d = 1, p = ∞` for a bare graph file).
pub fn cmd_inspect(scenario: Option<&Path>, graph: Option<&Path>, opts: &Options) -> Result<Outcome, CliError> {
    let (ls, g, metric, centers, seed) = match (scenario, graph) {
        (Some(path), None) => {
            let l = Loaded::new(path, opts)?;
            let centers: Vec<(usize, DimensionParams<f64>)> =
                l.ls.centers(&l.graph, l.seed)?
                    .into_iter()
                    .map(|x| l.ls.params_for(&l.graph, x).map(|p| (x, p)))
                    .collect::<Result<_, _>>()?;
            (Some(l.ls), l.graph, l.metric, centers, l.seed)
        }
        (None, Some(path)) => {
            let g: Graph = read_graph(path).map_err(|e| CliError::Config { field: "graph".into(), message: e.to_string() })?;
            let metric = default_intrinsic_metric(&g, 1.0)?;
            let params = DimensionParams::new(3.0, 1.0, Exponent::Infinite)?;
            (None, g, metric, vec![(0, params)], opts.seed.unwrap_or(0))
        }
        _ => return Err(CliError::Config { field: "inspect".into(), message: "pass exactly one of --scenario or --graph".into() }),
    };
    let name = ls.as_ref().map_or_else(|| "graph".to_string(), LoadedScenario::name);
    let dir = run_dir(opts.out.as_deref(), &base_dir(ls.as_ref()), "inspect")?;
    let heat = HeatSystem::build(&g)?;
    let deg = g.weighted_degrees();
    let mut summary = RunSummary::new("inspect", &name, seed);
    summary.extra.insert("vertices".into(), g.len().into());
    summary.extra.insert("edges".into(), g.edges().len().into());
    summary.extra.insert("dirichlet".into(), (0..g.len()).filter(|&x| g.is_dirichlet(x)).count().into());
    summary.extra.insert("jump_size".into(), metric.jump_size().into());
    summary.extra.insert("lambda_bottom".into(), heat.lambda_bottom().into());
    summary.extra.insert("normalizing".into(), g.is_normalizing().into());
    summary.extra.insert("sup_deg".into(), deg.iter().copied().fold(0.0, f64::max).into());
    summary.extra.insert("total_measure".into(), g.total_measure().into());
    let stamp = stamp_line("inspect", &name);
    let mut growth = serde_json::Map::new();
    for (x, params) in centers {
        let prof = GeometryProfile::new(&g, &metric, x, params)?;
        let rows: Vec<ProfileCsvRow> = prof
            .breakpoints()
            .into_iter()
            .filter(|&r| r > 0.0)
            .map(|r| {
                let row = prof.row(r);
                ProfileCsvRow {
                    r: row.r,
                    volume: row.volume,
                    d_p: row.d_p,
                    m_p: row.m_p,
                    mu: row.mu,
                    theta: row.theta,
                    kappa: row.kappa,
                    gamma: row.gamma,
                }
            })
            .collect();
        let stem = format!("profile_{}", file_safe(g.id(x)));
        match opts.format {
            Format::Csv => write_csv(&dir.join(format!("{stem}.csv")), &stamp, &rows)?,
            Format::Json => write_json(&dir.join(format!("{stem}.json")), &rows)?,
        }
        let ecc = prof.eccentricity();
        if let Ok(slope) = prof.volume_growth_exponent(ecc / 10.0, ecc) {
            growth.insert(g.id(x).to_string(), slope.into());
        }
    }
    summary.extra.insert("volume_growth_top_decade".into(), growth.into());
    finish(dir, summary)
}

/// `certify`: Sobolev and doubling estimates at every center.
pub fn cmd_certify(scenario: &Path, opts: &Options) -> Result<Outcome, CliError> {
    let l = Loaded::new(scenario, opts)?;
    let certs = l.certificates()?;
    let name = l.ls.name();
    let dir = run_dir(opts.out.as_deref(), &base_dir(Some(&l.ls)), "certify")?;
    for c in &certs {
        write_json(&dir.join(format!("sv_{}.json", file_safe(&c.sv.center))), &c.sv)?;
    }
    let rows = certificate_rows(&certs);
    match opts.format {
        Format::Csv => write_csv(&dir.join("certificates.csv"), &stamp_line("certify", &name), &rows)?,
        Format::Json => write_json(&dir.join("certificates.json"), &rows)?,
    }
    let mut summary = RunSummary::new("certify", &name, l.seed);
    for row in &rows {
        summary.add("sv-certificate", row.center, row.status, f64::NAN, None);
    }
    finish(dir, summary)
}

#[derive(Serialize)]
struct ReportRow<'a> {
    statement: &'a str,
    instance: &'a str,
    seed: Option<u64>,
    lhs: f64,
    rhs: f64,
    margin: f64,
    log_space: bool,
    tolerance: f64,
    status: Status,
    note: &'a str,
}

fn needs_times(ids: &[String]) -> bool {
    ids.iter().any(|id| id == statements::DAVIES_GAUSSIAN || id == statements::GAUSSIAN_BOUND)
}

/// `verify`: the selected statements of the inequality lab.
pub fn cmd_verify(scenario: &Path, opts: &Options) -> Result<Outcome, CliError> {
    let l = Loaded::new(scenario, opts)?;
    let ids = l.ls.suite(opts.suite.as_deref())?;
    let times = if needs_times(&ids) { l.ls.times(opts.times.as_ref())? } else { Vec::new() };
    let heat = l.heat()?;
    let certs = l.certificates()?;
    let pairs = l.ls.pairs(certs.len())?;
    let name = l.ls.name();
    let ctx = ScenarioContext {
        graph: &l.graph,
        metric: &l.metric,
        heat: &heat,
        params: l.ls.scenario.params.resolve("params")?,
        certificates: &certs,
        pairs,
        times,
        rule: l.ls.scenario.rule.resolve(),
        seed: l.seed,
        budget: l.ls.scenario.random.budget(),
    };
    let mut reports: Vec<CheckReport> = Vec::new();
    for (id, result) in run_suite(&ids, &ctx) {
        match result {
            Ok(r) => reports.extend(r),
            Err(hklab::Error::Uncertified(msg)) => {
                reports.push(CheckReport { status: Status::Uncertified, ..CheckReport::skipped(&id, "scenario", msg) });
            }
            Err(e) => return Err(CliError::in_statement(&id, e)),
        }
    }
    let dir = run_dir(opts.out.as_deref(), &base_dir(Some(&l.ls)), "verify")?;
    let rows: Vec<ReportRow<'_>> = reports
        .iter()
        .map(|r| ReportRow {
            statement: &r.statement,
            instance: &r.instance,
            seed: r.seed,
            lhs: r.lhs,
            rhs: r.rhs,
            margin: r.margin,
            log_space: r.log_space,
            tolerance: r.tolerance,
            status: r.status,
            note: r.note.as_deref().unwrap_or(""),
        })
        .collect();
    match opts.format {
        Format::Csv => write_csv(&dir.join("reports.csv"), &stamp_line("verify", &name), &rows)?,
        Format::Json => write_json(&dir.join("reports.json"), &rows)?,
    }
    let mut summary = RunSummary::new("verify", &name, l.seed);
    for r in &reports {
        summary.add(&r.statement, &r.instance, r.status, r.margin, r.note.as_deref());
    }
    finish(dir, summary)
}

#[derive(Serialize)]
struct BoundRow<'a> {
    x: &'a str,
    y: &'a str,
    t: f64,
    log_lhs: f64,
    log_rhs: f64,
    log_margin: f64,
    pass: Status,
}

#[derive(Serialize)]
struct BoundJson<'a> {
    x: &'a str,
    y: &'a str,
    rho: f64,
    t: f64,
    rule: &'a str,
    lhs: f64,
    log_lhs: f64,
    log_rhs: f64,
    log_margin: f64,
    pass: Status,
    breakdown: &'a hklab::bounds::Breakdown,
}

/// `scan`: exact kernels against the assembled bound on the pair × time grid.
pub fn cmd_scan(scenario: &Path, opts: &Options) -> Result<Outcome, CliError> {
    let l = Loaded::new(scenario, opts)?;
    let times = l.ls.times(opts.times.as_ref())?;
    let heat = l.heat()?;
    let certs = l.certificates()?;
    let pairs = l.ls.pairs(certs.len())?;
    let rule = l.ls.scenario.rule.resolve();
    let name = l.ls.name();
    let (checks, bounds, bound_summary) =
        check_gaussian_bound(&l.graph, &heat, &l.metric, &certs, &pairs, &times, &rule, l.ls.scenario.ln_adjust)
            .map_err(|e| CliError::in_statement(rule.name(), e))?;
    let dir = run_dir(opts.out.as_deref(), &base_dir(Some(&l.ls)), "scan")?;
    let g = &l.graph;
    match opts.format {
        Format::Csv => {
            let rows: Vec<BoundRow<'_>> = bounds
                .iter()
                .zip(&checks)
                .map(|(b, c)| BoundRow {
                    x: g.id(b.x),
                    y: g.id(b.y),
                    t: b.t,
                    log_lhs: b.log_lhs,
                    log_rhs: b.log_rhs,
                    log_margin: b.log_margin,
                    pass: c.status,
                })
                .collect();
            write_csv(&dir.join("bounds.csv"), &stamp_line("scan", &name), &rows)?;
        }
        Format::Json => {
            let rows: Vec<BoundJson<'_>> = bounds
                .iter()
                .zip(&checks)
                .map(|(b, c)| BoundJson {
                    x: g.id(b.x),
                    y: g.id(b.y),
                    rho: b.rho,
                    t: b.t,
                    rule: &b.rule,
                    lhs: b.lhs,
                    log_lhs: b.log_lhs,
                    log_rhs: b.log_rhs,
                    log_margin: b.log_margin,
                    pass: c.status,
                    breakdown: &b.breakdown,
                })
                .collect();
            write_json(&dir.join("bounds.json"), &rows)?;
        }
    }
    let mut series: BTreeMap<(usize, usize), Vec<(f64, f64)>> = BTreeMap::new();
    for b in &bounds {
        series.entry((b.x, b.y)).or_default().push((b.t, b.log_margin));
    }
    let series: Vec<Series> =
        series.into_iter().map(|((x, y), points)| Series { label: format!("{} -> {}", g.id(x), g.id(y)), points }).collect();
    std::fs::write(dir.join("margins.svg"), margin_plot(&format!("{name}: log-margin, rule {}", rule.name()), &series))
        .map_err(|e| CliError::io(dir.join("margins.svg"), e))?;
    let mut summary = RunSummary::new("scan", &name, l.seed);
    for (b, c) in bounds.iter().zip(&checks) {
        summary.add(&format!("{}->{}", g.id(b.x), g.id(b.y)), &format!("t={}", b.t), c.status, b.log_margin, c.note.as_deref());
    }
    // Groups are pairs here; the uncertified list names the statement instead.
    summary.uncertified = checks.iter().filter(|c| c.status == Status::Uncertified).take(1).map(|c| c.statement.clone()).collect();
    summary.extra.insert("rule".into(), rule.name().into());
    summary.extra.insert("bound_summary".into(), serde_json::to_value(&bound_summary)?);
    finish(dir, summary)
}

#[derive(Serialize)]
struct ReportTableRow {
    source: String,
    command: String,
    total: usize,
    pass: usize,
    vacuous_pass: usize,
    fail: usize,
    uncertified: usize,
    skipped: usize,
}

/// `report`: aggregates every `summary.json` below `dir`.
pub fn cmd_report(dir: &Path, opts: &Options) -> Result<(Outcome, String), CliError> {
    if !dir.is_dir() {
        return Err(CliError::Config { field: "dir".into(), message: format!("{} is not a directory", dir.display()) });
    }
    let mut found: Vec<(PathBuf, RunSummary)> = Vec::new();
    for entry in walkdir::WalkDir::new(dir).sort_by_file_name() {
        let entry = entry.map_err(|e| CliError::Config { field: "dir".into(), message: e.to_string() })?;
        if entry.file_name() != "summary.json" {
            continue;
        }
        let text = std::fs::read_to_string(entry.path()).map_err(|e| CliError::io(entry.path(), e))?;
        // Skip unrelated files that happen to share the name.
        if let Ok(s) = serde_json::from_str::<RunSummary>(&text) {
            let rel = entry.path().parent().and_then(|p| p.strip_prefix(dir).ok()).map(Path::to_path_buf).unwrap_or_default();
            found.push((rel, s));
        }
    }
    if found.is_empty() {
        return Err(CliError::Config { field: "dir".into(), message: format!("no run summaries below {}", dir.display()) });
    }
    let mut total = RunSummary::new("report", &dir.display().to_string(), 0);
    let mut table = Vec::new();
    for (rel, s) in &found {
        let source = if rel.as_os_str().is_empty() { ".".to_string() } else { rel.display().to_string() };
        let t = &s.totals;
        table.push(ReportTableRow {
            source: source.clone(),
            command: s.command.clone(),
            total: t.total,
            pass: t.pass,
            vacuous_pass: t.vacuous_pass,
            fail: t.fail,
            uncertified: t.uncertified,
            skipped: t.skipped,
        });
        merge(&mut total.totals, t);
        total.groups.entry(source.clone()).or_default().clone_from(t);
        for f in &s.failures {
            total.failures.push(FailureRow { group: format!("{source}: {}", f.group), ..f.clone() });
        }
        for u in &s.uncertified {
            total.uncertified.push(format!("{source}: {u}"));
        }
    }
    let out = run_dir(opts.out.as_deref(), Path::new(DEFAULT_BASE), "report")?;
    write_csv(&out.join("runs.csv"), &stamp_line("report", &total.scenario), &table)?;
    let text = render_table(&table, &total);
    std::fs::write(out.join("report.txt"), &text).map_err(|e| CliError::io(out.join("report.txt"), e))?;
    Ok((finish(out, total)?, text))
}

fn merge(into: &mut Tally, t: &Tally) {
    into.total += t.total;
    into.pass += t.pass;
    into.vacuous_pass += t.vacuous_pass;
    into.fail += t.fail;
    into.skipped += t.skipped;
    into.uncertified += t.uncertified;
    into.min_margin = match (into.min_margin, t.min_margin) {
        (Some(a), Some(b)) => Some(a.min(b)),
        (a, b) => a.or(b),
    };
}

fn render_table(rows: &[ReportTableRow], total: &RunSummary) -> String {
    use std::fmt::Write;
    let w = rows.iter().map(|r| r.source.len()).max().unwrap_or(6).max(6);
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{:<w$}  {:<9} {:>7} {:>7} {:>9} {:>6} {:>11} {:>7}",
        "run", "command", "total", "pass", "vacuous", "fail", "uncertified", "skipped"
    );
    for r in rows {
        let _ = writeln!(
            s,
            "{:<w$}  {:<9} {:>7} {:>7} {:>9} {:>6} {:>11} {:>7}",
            r.source, r.command, r.total, r.pass, r.vacuous_pass, r.fail, r.uncertified, r.skipped
        );
    }
    let t = &total.totals;
    let _ = writeln!(
        s,
        "{:<w$}  {:<9} {:>7} {:>7} {:>9} {:>6} {:>11} {:>7}",
        "TOTAL", "", t.total, t.pass, t.vacuous_pass, t.fail, t.uncertified, t.skipped
    );
    if !total.failures.is_empty() {
        let _ = writeln!(s, "\nfailures ({}):", total.failures.len());
        let gw = total.failures.iter().map(|f| f.group.len()).max().unwrap_or(5).max(5);
        let _ = writeln!(s, "  {:<gw$}  {:<40} {:>14}", "check", "instance", "margin");
        for f in &total.failures {
            let _ = writeln!(s, "  {:<gw$}  {:<40} {:>14.6e}", f.group, f.instance, f.margin);
        }
    }
    if !total.uncertified.is_empty() {
        let _ = writeln!(s, "\nuncertified: {}", total.uncertified.join(", "));
    }
    s
}
