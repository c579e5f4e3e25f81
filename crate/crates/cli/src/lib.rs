//! Command-line front end for the `orbitbound` library.
//!
//! [`dispatch`] runs one command line and returns the exit code with the
//! rendered report, so the binary and the tests share a single code path.

pub mod config;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use orbitbound::case_audit::{self, AuditReport};
use orbitbound::group_engine::{self, Matrix, PrimeField};
use orbitbound::number_theory::{scan_window, zsigmondy_primes, TableId};
use orbitbound::simple_groups::{self, Family, GroupSpec, Sporadic};
use orbitbound::Error;

use config::{ConfigFile, GROUP_CAP_ENV, VECTOR_CAP_ENV};

/// `verify` closes many random groups, so it uses a smaller default cap.
pub const VERIFY_GROUP_CAP: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Plain,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        <Format as ValueEnum>::from_str(s, true).map_err(|_| format!("unknown format `{s}`"))
    }
}

#[derive(Debug, Parser)]
#[command(name = "orbitbound", version, about = "Zsigmondy tables, simple-group audits and orbit bounds")]
struct Cli {
    /// `key = value` file with defaults for the global options and caps.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write the report here instead of standard output.
    #[arg(long, global = true, value_name = "PATH")]
    output: Option<PathBuf>,
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Stamp reports with the generation time.
    #[arg(long, global = true)]
    timestamps: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Zsigmondy primes and exception-table scans.
    Zsig {
        #[command(subcommand)]
        command: ZsigCommand,
    },
    /// Factored order of a simple group, e.g. `A_1(64)`, `2A_3(3)`, `Alt(6)`, `M24`.
    SimpleOrder { group: String },
    /// Outer automorphism group order and the derived bound.
    OutOrder { group: String },
    /// Certify witness pairs across a parameter grid.
    Audit(AuditArgs),
    /// Orbits of a matrix group read from a generator file.
    Orbits(OrbitsArgs),
    /// Check the orbit bound on a seeded random corpus.
    Verify(VerifyArgs),
}

#[derive(Debug, Subcommand)]
enum ZsigCommand {
    Find {
        a: u64,
        m: u32,
    },
    Scan {
        #[arg(long)]
        table: String,
        #[arg(long, default_value_t = 100)]
        base_max: u64,
        #[arg(long, default_value_t = 30)]
        m_max: u32,
        /// Restrict bases to prime powers.
        #[arg(long)]
        prime_powers: bool,
        /// Write one `table base m` line per exception.
        #[arg(long, value_name = "PATH")]
        golden_out: Option<PathBuf>,
        /// Compare the exceptions against a golden file.
        #[arg(long, value_name = "PATH")]
        check_golden: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
struct AuditArgs {
    /// Families to audit (repeatable or comma separated); all when omitted.
    #[arg(long, value_delimiter = ',')]
    family: Vec<String>,
    #[arg(long, default_value_t = 10)]
    n_max: u32,
    #[arg(long, default_value_t = 512)]
    q_max: u64,
    /// Write the full report here and print only the summary.
    #[arg(long, value_name = "PATH")]
    report: Option<PathBuf>,
    /// Recompute the transcribed factorizations and list mismatches.
    #[arg(long)]
    check_paper: bool,
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Debug, Args)]
struct OrbitsArgs {
    /// JSON file `{p, dim, generators: [[row-major entries]]}`.
    #[arg(long, value_name = "PATH")]
    gens: PathBuf,
    #[arg(long)]
    check_bound: bool,
    #[arg(long)]
    cap: Option<usize>,
    /// Same as `--format json`.
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 50)]
    count: usize,
    #[arg(long, value_delimiter = ',', default_value = "2,3,5,7")]
    p_set: Vec<u64>,
    #[arg(long, default_value_t = 3)]
    dim_max: usize,
    #[arg(long)]
    cap: Option<usize>,
}

#[derive(Debug, Deserialize)]
struct GeneratorFile {
    p: u64,
    dim: usize,
    generators: Vec<Vec<i64>>,
}

/// Result of one command line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

enum Failure {
    Usage(String),
    Math(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::BoundViolated(_) | Error::NoWitnessFound(_) => Failure::Math(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

/// A report in all the shapes it can be printed in.
struct Report {
    value: Value,
    csv: Option<Vec<Vec<String>>>,
    plain: String,
    /// Set when a mathematical assertion failed; the report is still printed.
    violation: Option<String>,
}

impl Report {
    fn new(value: Value, plain: String) -> Self {
        Report {
            value,
            csv: None,
            plain,
            violation: None,
        }
    }

    fn csv(mut self, rows: Vec<Vec<String>>) -> Self {
        self.csv = Some(rows);
        self
    }
}

struct Settings {
    format: Format,
    timestamps: bool,
    config: ConfigFile,
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("reports serialize")
}

fn render_csv(rows: &[Vec<String>]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.write_record(row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory write")).expect("utf-8")
}

fn render(report: &Report, settings: &Settings, command: &str) -> Result<String, Failure> {
    let mut value = report.value.clone();
    if settings.timestamps {
        let secs = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        if let Value::Object(map) = &mut value {
            map.insert("generated_at".into(), json!(secs));
        }
    }
    Ok(match settings.format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&value).expect("json");
            s.push('\n');
            s
        }
        Format::Csv => match &report.csv {
            Some(rows) => render_csv(rows),
            None => {
                return Err(usage(format!(
                    "csv output is not available for `{command}`; use json or plain"
                )))
            }
        },
        Format::Plain => {
            let mut s = report.plain.clone();
            if settings.timestamps {
                let _ = writeln!(s, "generated_at {}", value["generated_at"]);
            }
            s
        }
    })
}

fn parse_group(text: &str) -> Result<GroupSpec, Failure> {
    let t = text.trim();
    if t.eq_ignore_ascii_case("tits") || t == "2F4(2)'" {
        return Ok(GroupSpec::tits());
    }
    if let Ok(s) = Sporadic::from_str(t) {
        return Ok(GroupSpec::sporadic(s));
    }
    case_audit::parse_spec(t).map_err(|e| {
        usage(format!(
            "{e}; expected forms like A_1(64), 2A_3(3), G2(8), 2B2(8), Alt(6), M24 or Tits"
        ))
    })
}

fn zsig_find(a: u64, m: u32) -> Result<Report, Failure> {
    let r = zsigmondy_primes(a, m)?;
    let summary = if r.zsigmondy_primes.is_empty() {
        "no Zsigmondy prime".to_string()
    } else {
        let list: Vec<String> = r
            .zsigmondy_primes
            .iter()
            .map(|z| format!("{}^{}", z.prime, z.multiplicity))
            .collect();
        format!("Zsigmondy primes {}", list.join(" "))
    };
    let mut value = to_value(&r);
    value["summary"] = json!(summary);
    let mut plain = format!("({a}, {m}): {summary}\n");
    for (name, v) in [
        ("feit_large", &r.verdicts.feit_large),
        ("larger_3m1", &r.verdicts.larger_3m1),
        ("cor34", &r.verdicts.cor34),
        ("cor36", &r.verdicts.cor36),
    ] {
        let w = v
            .witness
            .as_ref()
            .map(|w| format!(" via {}", w.value))
            .unwrap_or_default();
        let _ = writeln!(plain, "  {name}: {}{w}", if v.holds { "holds" } else { "fails" });
    }
    let mut rows = vec![vec!["prime".to_string(), "multiplicity".to_string()]];
    rows.extend(
        r.zsigmondy_primes
            .iter()
            .map(|z| vec![z.prime.to_string(), z.multiplicity.to_string()]),
    );
    Ok(Report::new(value, plain).csv(rows))
}

fn zsig_scan(
    table: &str,
    base_max: u64,
    m_max: u32,
    prime_powers: bool,
    golden_out: Option<&Path>,
    check_golden: Option<&Path>,
) -> Result<Report, Failure> {
    let table = TableId::from_str(table).map_err(|e| {
        let ids: Vec<&str> = TableId::ALL.iter().map(|t| t.as_str()).collect();
        usage(format!("{e}; known tables: {}", ids.join(", ")))
    })?;
    if base_max < 2 || m_max < 2 {
        return Err(usage("--base-max and --m-max must be at least 2"));
    }
    let scan = scan_window(table, base_max, m_max, prime_powers);
    let golden = scan.golden_lines();
    if let Some(path) = golden_out {
        std::fs::write(path, &golden)
            .map_err(|e| usage(format!("cannot write {}: {e}", path.display())))?;
    }
    let mut value = to_value(&scan);
    let mut violation = None;
    if !scan.confirmed {
        violation = Some(format!(
            "{table} scan disagrees with the stated list: {} unexpected, {} missing, {} errors",
            scan.unexpected.len(),
            scan.missing.len(),
            scan.errors.len()
        ));
    }
    if let Some(path) = check_golden {
        let expected = std::fs::read_to_string(path)
            .map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
        let matches = expected == golden;
        value["golden"] = json!({ "path": path.display().to_string(), "matches": matches });
        if !matches {
            violation = Some(format!("exceptions differ from golden file {}", path.display()));
        }
    }
    let cells = |cs: &[orbitbound::number_theory::Cell]| {
        cs.iter()
            .map(|c| format!("({},{})", c.base, c.m))
            .collect::<Vec<_>>()
            .join(" ")
    };
    let mut plain = format!(
        "{table} base<={base_max} m<={m_max}: {} exceptions, {}\n",
        scan.exceptions.len(),
        if scan.confirmed { "confirmed" } else { "NOT confirmed" }
    );
    let _ = writeln!(plain, "exceptions: {}", cells(&scan.exceptions));
    if !scan.unexpected.is_empty() {
        let _ = writeln!(plain, "unexpected: {}", cells(&scan.unexpected));
    }
    if !scan.missing.is_empty() {
        let _ = writeln!(plain, "missing: {}", cells(&scan.missing));
    }
    for e in &scan.errors {
        let _ = writeln!(plain, "error ({},{}): {}", e.base, e.m, e.error);
    }
    let unexpected: std::collections::BTreeSet<_> = scan.unexpected.iter().collect();
    let mut rows = vec![vec!["table".into(), "base".into(), "m".into(), "listed".into()]];
    rows.extend(scan.exceptions.iter().map(|c| {
        vec![
            table.to_string(),
            c.base.to_string(),
            c.m.to_string(),
            (!unexpected.contains(c)).to_string(),
        ]
    }));
    let mut report = Report::new(value, plain).csv(rows);
    report.violation = violation;
    Ok(report)
}

fn group_record(group: &str) -> Result<(GroupSpec, simple_groups::GroupFacts, Value), Failure> {
    let spec = parse_group(group)?;
    let facts = simple_groups::out_order(&spec)?;
    let value = json!({
        "group": spec.to_string(),
        "family": spec.family.name(),
        "n": spec.n,
        "p": spec.p,
        "f": spec.f,
        "q": spec.q,
        "simple": spec.is_simple(),
        "order": facts.order.value().to_string(),
        "order_factored": facts.order.to_string(),
        "out_order": facts.out_order,
        "out_abelian": facts.out_abelian,
        "kk_bound": facts.kk_bound,
        "computer_verified": facts.computer_verified,
    });
    Ok((spec, facts, value))
}

fn group_rows(spec: &GroupSpec, facts: &simple_groups::GroupFacts) -> Vec<Vec<String>> {
    vec![
        ["group", "order", "order_factored", "out_order", "out_abelian", "kk_bound"]
            .map(String::from)
            .to_vec(),
        vec![
            spec.to_string(),
            facts.order.value().to_string(),
            facts.order.to_string(),
            facts.out_order.to_string(),
            facts.out_abelian.to_string(),
            facts.kk_bound.to_string(),
        ],
    ]
}

fn simple_order(group: &str) -> Result<Report, Failure> {
    let (spec, facts, value) = group_record(group)?;
    let plain = format!("|{spec}| = {} = {}\n", facts.order.value(), facts.order);
    Ok(Report::new(value, plain).csv(group_rows(&spec, &facts)))
}

fn out_order_cmd(group: &str) -> Result<Report, Failure> {
    let (spec, facts, value) = group_record(group)?;
    let plain = format!(
        "|Out({spec})| = {} ({}), |K/K'| <= {}\n",
        facts.out_order,
        if facts.out_abelian { "abelian" } else { "non-abelian" },
        facts.kk_bound
    );
    Ok(Report::new(value, plain).csv(group_rows(&spec, &facts)))
}

fn audit_plain(r: &AuditReport, discrepancies: Option<&[case_audit::Discrepancy]>) -> String {
    let mut s = format!(
        "audit n<={} q<={}: {} certificates, {} without witnesses, {} errors, {} excluded\n",
        r.window.n_max,
        r.window.q_max,
        r.certificates.len(),
        r.no_witness.len(),
        r.errors.len(),
        r.excluded.len()
    );
    for f in &r.summary {
        let _ = writeln!(
            s,
            "  {:<8} certified {:>5}  invalid {}  no_witness {}  errors {}  excluded {}",
            f.family.name(),
            f.certified,
            f.invalid,
            f.no_witness,
            f.errors,
            f.excluded
        );
    }
    for g in &r.no_witness {
        let _ = writeln!(s, "NoWitnessFound {g}");
    }
    for e in &r.errors {
        let _ = writeln!(s, "error {}: {}", e.group, e.error);
    }
    for c in &r.subcases {
        if c.out_agrees == Some(false) {
            let _ = writeln!(
                s,
                "printed |Out| disagrees: {} {} printed {} computed {}",
                c.case,
                c.group,
                c.printed_out,
                c.computed_out.unwrap_or_default()
            );
        }
    }
    if let Some(ds) = discrepancies {
        let _ = writeln!(s, "factorization discrepancies: {}", ds.len());
        for d in ds {
            let _ = writeln!(
                s,
                "  {} {} printed {} recomputed {}",
                d.case, d.expression, d.printed, d.recomputed
            );
        }
    }
    s
}

fn audit(args: &AuditArgs) -> Result<Report, Failure> {
    let families = args
        .family
        .iter()
        .map(|f| Family::from_str(f.trim()))
        .collect::<Result<Vec<_>, _>>()?;
    let report = case_audit::audit_grid(&families, args.n_max, args.q_max);
    let discrepancies = args.check_paper.then(case_audit::verify_printed_factorizations);
    let mut value = to_value(&report);
    if let Some(ds) = &discrepancies {
        value["printed_check"] = json!({
            "checked": case_audit::printed_factorizations().len(),
            "discrepancies": to_value(ds),
        });
    }
    let plain = audit_plain(&report, discrepancies.as_deref());
    if let Some(path) = &args.report {
        let mut s = serde_json::to_string_pretty(&value).expect("json");
        s.push('\n');
        std::fs::write(path, s)
            .map_err(|e| usage(format!("cannot write {}: {e}", path.display())))?;
        value = json!({
            "report": path.display().to_string(),
            "summary": to_value(&report.summary),
            "no_witness": to_value(&report.no_witness),
            "all_valid": report.all_valid(),
        });
    }
    let mut rows = vec![[
        "group", "out_order", "kk_bound", "witness1", "witness2", "valid", "in_grid",
    ]
    .map(String::from)
    .to_vec()];
    rows.extend(report.certificates.iter().map(|c| {
        vec![
            c.group.clone(),
            c.out_order.to_string(),
            c.kk_bound.to_string(),
            c.witness1.order.to_string(),
            c.witness2.order.to_string(),
            c.valid.to_string(),
            c.in_grid.to_string(),
        ]
    }));
    let mut out = Report::new(value, plain).csv(rows);
    if !report.all_valid() {
        out.violation = Some(format!(
            "{} specs without a witness pair, {} invalid certificates, {} errors",
            report.no_witness.len(),
            report.certificates.iter().filter(|c| !c.valid).count(),
            report.errors.len()
        ));
    }
    Ok(out)
}

fn load_generators(path: &Path, cap: usize) -> Result<group_engine::MatrixGroupInstance, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
    let file: GeneratorFile = serde_json::from_str(&text)
        .map_err(|e| usage(format!("{}: expected {{p, dim, generators}}: {e}", path.display())))?;
    let field = PrimeField::new(file.p)?;
    let gens = file
        .generators
        .iter()
        .map(|g| Matrix::from_entries(field, file.dim, g))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(group_engine::close_group(file.p, file.dim, gens, cap)?)
}

fn orbit_rows(sizes: &[usize]) -> Vec<Vec<String>> {
    let mut counts = std::collections::BTreeMap::new();
    for &s in sizes {
        *counts.entry(s).or_insert(0usize) += 1;
    }
    let mut rows = vec![vec!["size".to_string(), "count".to_string()]];
    rows.extend(counts.into_iter().map(|(s, c)| vec![s.to_string(), c.to_string()]));
    rows
}

fn orbits(args: &OrbitsArgs, settings: &Settings) -> Result<Report, Failure> {
    let group_cap = config::cap(
        args.cap,
        GROUP_CAP_ENV,
        &settings.config,
        "group_cap",
        group_engine::DEFAULT_GROUP_CAP,
    )
    .map_err(usage)?;
    let vector_cap = config::cap(
        None,
        VECTOR_CAP_ENV,
        &settings.config,
        "vector_cap",
        group_engine::DEFAULT_VECTOR_CAP,
    )
    .map_err(usage)?;
    let g = load_generators(&args.gens, group_cap)?;
    let report = group_engine::orbits(&g, vector_cap)?;
    let mut value = json!({ "generators": to_value(&g.generators), "orbits": to_value(&report) });
    let mut plain = format!(
        "|G| = {}, |G'| = {}, |G/G'| = {}, M = {}, admissibility {}\norbit sizes: {:?}\n",
        report.group_order,
        report.derived_order,
        report.abelianization,
        report.max_orbit,
        to_value(&report.admissibility).as_str().unwrap_or_default(),
        report.orbit_sizes
    );
    let rows = orbit_rows(&report.orbit_sizes);
    let mut violation = None;
    if args.check_bound {
        match group_engine::verify_orbit_bound(&g, vector_cap) {
            Ok(v) => {
                value["bound"] = to_value(&v);
                let _ = writeln!(
                    plain,
                    "bound holds: {} <= {} and {} < {}",
                    report.abelianization, report.max_orbit, report.abelianization, v.vector_count
                );
            }
            Err(Error::AdmissibilityRejected) => {
                return Err(usage(
                    "module is not certified completely reducible; the bound check does not apply",
                ))
            }
            Err(e @ Error::BoundViolated(_)) => {
                value["bound"] = json!({ "violated": e.to_string() });
                let _ = writeln!(plain, "{e}");
                violation = Some(e.to_string());
            }
            Err(e) => return Err(e.into()),
        }
    }
    let mut out = Report::new(value, plain).csv(rows);
    out.violation = violation;
    Ok(out)
}

fn verify(args: &VerifyArgs, settings: &Settings) -> Result<Report, Failure> {
    let group_cap = config::cap(args.cap, GROUP_CAP_ENV, &settings.config, "group_cap", VERIFY_GROUP_CAP)
        .map_err(usage)?;
    let vector_cap = config::cap(
        None,
        VECTOR_CAP_ENV,
        &settings.config,
        "vector_cap",
        group_engine::DEFAULT_VECTOR_CAP,
    )
    .map_err(usage)?;
    let corpus = group_engine::random_instances(
        args.seed,
        args.count,
        &args.p_set,
        args.dim_max,
        group_cap,
        vector_cap,
    )?;
    let fixtures = group_engine::fixtures();
    let fixture_groups: Vec<_> = fixtures.iter().map(|f| f.instance.clone()).collect();
    let results = group_engine::verify_all(&corpus.instances, vector_cap);
    let fixture_results = group_engine::verify_all(&fixture_groups, vector_cap);

    let mut failures = Vec::new();
    let mut record = |label: String, g: &group_engine::MatrixGroupInstance, r: &orbitbound::Result<group_engine::BoundVerdict>| match r {
        Ok(v) => json!({
            "label": label,
            "p": g.p,
            "dim": g.dim,
            "generators": to_value(&g.generators),
            "order": g.order,
            "derived_order": v.report.derived_order,
            "abelianization": v.report.abelianization,
            "max_orbit": v.report.max_orbit,
            "vector_count": v.vector_count.to_string(),
            "admissibility": to_value(&v.report.admissibility),
            "within_max_orbit": v.within_max_orbit,
            "below_module_size": v.below_module_size,
            "tight": v.tight,
        }),
        Err(e) => {
            failures.push(format!("{label}: {e}"));
            json!({ "label": label, "p": g.p, "dim": g.dim, "generators": to_value(&g.generators), "error": e.to_string() })
        }
    };
    let instances: Vec<Value> = corpus
        .instances
        .iter()
        .zip(&results)
        .enumerate()
        .map(|(i, (g, r))| record(format!("instance {i}"), g, r))
        .collect();
    let fixture_values: Vec<Value> = fixtures
        .iter()
        .zip(&fixture_results)
        .map(|(f, r)| record(f.name.clone(), &f.instance, r))
        .collect();

    let passed = results.iter().filter(|r| r.is_ok()).count();
    let tight = results.iter().flatten().filter(|v| v.tight).count();
    let value = json!({
        "seed": args.seed,
        "requested": args.count,
        "generated": corpus.instances.len(),
        "attempts": corpus.attempts,
        "skipped_cap": corpus.skipped_cap,
        "skipped_rejected": corpus.skipped_rejected,
        "group_cap": group_cap,
        "passed": passed,
        "tight": tight,
        "instances": instances,
        "fixtures": fixture_values,
        "failures": failures,
    });
    let mut plain = format!(
        "seed {}: {} of {} instances generated ({} attempts, {} over cap, {} rejected), {} pass, {} tight\n",
        args.seed,
        corpus.instances.len(),
        args.count,
        corpus.attempts,
        corpus.skipped_cap,
        corpus.skipped_rejected,
        passed,
        tight
    );
    for (f, r) in fixtures.iter().zip(&fixture_results) {
        match r {
            Ok(v) => {
                let _ = writeln!(
                    plain,
                    "  {}: |G/G'| = {} <= M = {}, < |V| = {}",
                    f.name, v.report.abelianization, v.report.max_orbit, v.vector_count
                );
            }
            Err(e) => {
                let _ = writeln!(plain, "  {}: {e}", f.name);
            }
        }
    }
    for f in &failures {
        let _ = writeln!(plain, "FAIL {f}");
    }
    let mut rows = vec![[
        "index", "p", "dim", "order", "abelianization", "max_orbit", "vector_count", "tight",
    ]
    .map(String::from)
    .to_vec()];
    rows.extend(corpus.instances.iter().zip(&results).enumerate().filter_map(|(i, (g, r))| {
        r.as_ref().ok().map(|v| {
            vec![
                i.to_string(),
                g.p.to_string(),
                g.dim.to_string(),
                g.order.to_string(),
                v.report.abelianization.to_string(),
                v.report.max_orbit.to_string(),
                v.vector_count.to_string(),
                v.tight.to_string(),
            ]
        })
    }));
    let mut out = Report::new(value, plain).csv(rows);
    if !failures.is_empty() {
        out.violation = Some(failures.join("; "));
    } else if corpus.instances.len() < args.count {
        return Err(usage(format!(
            "only {} of {} admissible instances found in {} attempts; raise --cap or change --p-set/--dim-max",
            corpus.instances.len(),
            args.count,
            corpus.attempts
        )));
    }
    Ok(out)
}

fn run_command(cli: &Cli, settings: &Settings) -> Result<Report, Failure> {
    match &cli.command {
        Command::Zsig { command } => match command {
            ZsigCommand::Find { a, m } => zsig_find(*a, *m),
            ZsigCommand::Scan {
                table,
                base_max,
                m_max,
                prime_powers,
                golden_out,
                check_golden,
            } => zsig_scan(
                table,
                *base_max,
                *m_max,
                *prime_powers,
                golden_out.as_deref(),
                check_golden.as_deref(),
            ),
        },
        Command::SimpleOrder { group } => simple_order(group),
        Command::OutOrder { group } => out_order_cmd(group),
        Command::Audit(args) => audit(args),
        Command::Orbits(args) => orbits(args, settings),
        Command::Verify(args) => verify(args, settings),
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Zsig { command: ZsigCommand::Find { .. } } => "zsig find",
        Command::Zsig { command: ZsigCommand::Scan { .. } } => "zsig scan",
        Command::SimpleOrder { .. } => "simple-order",
        Command::OutOrder { .. } => "out-order",
        Command::Audit(_) => "audit",
        Command::Orbits(_) => "orbits",
        Command::Verify(_) => "verify",
    }
}

fn run(cli: Cli) -> Result<(String, Option<String>), Failure> {
    let config = match &cli.config {
        Some(path) => ConfigFile::load(path).map_err(usage)?,
        None => ConfigFile::default(),
    };
    let mut format = match cli.format {
        Some(f) => f,
        None => config.parsed::<Format>("format").map_err(usage)?.unwrap_or(Format::Json),
    };
    if let Command::Orbits(OrbitsArgs { json: true, .. }) = cli.command {
        format = Format::Json;
    }
    let timestamps = cli.timestamps
        || config
            .parsed::<bool>("timestamps")
            .map_err(usage)?
            .unwrap_or(false);
    let output = match &cli.output {
        Some(p) => Some(p.clone()),
        None => config.get("output").map(PathBuf::from),
    };
    let jobs = match &cli.command {
        Command::Audit(AuditArgs { jobs: Some(j), .. }) => Some(*j),
        _ => match cli.jobs {
            Some(j) => Some(j),
            None => config.parsed::<usize>("jobs").map_err(usage)?,
        },
    };
    let settings = Settings {
        format,
        timestamps,
        config,
    };
    let name = command_name(&cli.command);
    let exec = || -> Result<(String, Option<String>), Failure> {
        let report = run_command(&cli, &settings)?;
        let text = render(&report, &settings, name)?;
        Ok((text, report.violation))
    };
    let (text, violation) = match jobs {
        Some(0) => return Err(usage("--jobs must be at least 1")),
        Some(j) => rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build()
            .map_err(|e| usage(format!("cannot start {j} worker threads: {e}")))?
            .install(exec)?,
        None => exec()?,
    };
    match output {
        Some(path) => {
            std::fs::write(&path, &text)
                .map_err(|e| usage(format!("cannot write {}: {e}", path.display())))?;
            Ok((String::new(), violation))
        }
        None => Ok((text, violation)),
    }
}

/// Runs one command line; `argv[0]` is the program name.
pub fn dispatch<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp
                | ErrorKind::DisplayVersion
                | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => Outcome {
                    code: 0,
                    stdout: text,
                    stderr: String::new(),
                },
                _ => Outcome {
                    code: 1,
                    stdout: String::new(),
                    stderr: text,
                },
            };
        }
    };
    match run(cli) {
        Ok((stdout, None)) => Outcome {
            code: 0,
            stdout,
            stderr: String::new(),
        },
        Ok((stdout, Some(v))) => Outcome {
            code: 2,
            stdout,
            stderr: format!("assertion failed: {v}\n"),
        },
        Err(Failure::Usage(m)) => Outcome {
            code: 1,
            stdout: String::new(),
            stderr: format!("error: {m}\n"),
        },
        Err(Failure::Math(m)) => Outcome {
            code: 2,
            stdout: String::new(),
            stderr: format!("assertion failed: {m}\n"),
        },
    }
}
