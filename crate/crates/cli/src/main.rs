use std::fmt;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use isharp::dims::{dim_sharp, BundleClass, DimError, FieldInvariants, FieldLabel, Shape};
use isharp::grading::{
    check_congruences, consistent_sign_assignments, propagate_triangle, shift_table, vw_contradiction, GradedDim,
    KClass, Route,
};
use isharp::knot_db::{self, builtin_db, DbError, KnotRecord};
use isharp::slope::{farey_tree, slopes_in_range, Slope};
use isharp::su2::{classify_interval, survivors, Status, Su2Error};
use isharp::triangle::verify_knot_triangles;

#[derive(Parser)]
#[command(name = "isharp", version, about = "Framed instanton homology dimensions of knot surgeries")]
struct Cli {
    /// Knot database (JSON). Falls back to the built-in records.
    #[arg(long, global = true, env = "ISHARP_DB")]
    db: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    format: Format,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Json,
}

#[derive(Args)]
struct FieldArg {
    /// C, char0, F2, Fp:<p>
    #[arg(long, default_value = "C")]
    field: String,
}

#[derive(Subcommand)]
enum Cmd {
    /// dim I# of one surgery
    #[command(allow_negative_numbers = true)]
    Dim {
        knot: String,
        slope: String,
        #[command(flatten)]
        field: FieldArg,
        /// triv or mu
        #[arg(long, default_value = "triv")]
        bundle: String,
    },
    /// Dimensions for both bundle classes over a range of slopes
    #[command(allow_negative_numbers = true)]
    Table {
        knot: String,
        #[command(flatten)]
        field: FieldArg,
        /// Lowest integer slope (default nu - 5)
        #[arg(long)]
        lo: Option<i64>,
        /// Highest integer slope (default nu + 5)
        #[arg(long)]
        hi: Option<i64>,
        /// Include all slopes with this denominator bound
        #[arg(long, default_value_t = 1)]
        den_max: i64,
    },
    /// Farey decomposition tree of a slope
    #[command(allow_negative_numbers = true)]
    Farey { slope: String },
    /// Exactness of the decorated triangles over all triads near nu
    CheckTriangles {
        knot: String,
        #[command(flatten)]
        field: FieldArg,
        #[arg(long, default_value_t = 10)]
        den_max: i64,
    },
    /// Grading-shift congruences and the V/W contradiction
    CheckGrading {
        /// positive, zero, negative or all
        #[arg(long = "k", default_value = "all")]
        k_class: String,
        /// Exhaustive check over quadruples with entries >= 1 up to this total
        #[arg(long, default_value_t = 12)]
        max_total: u64,
    },
    /// SU(2)-abelian dimension obstruction over an interval of slopes
    Su2 {
        knot: String,
        #[command(flatten)]
        field: FieldArg,
        /// Open interval; default (2, 6), or (2, 8] with --speculative
        #[arg(long, num_args = 2, value_names = ["LO", "HI"])]
        interval: Option<Vec<String>>,
        #[arg(long, default_value_t = 12)]
        den_max: i64,
        /// Extend the default interval to (2, 8]. Relies on announced,
        /// unpublished results; verdicts are the same dimension test.
        #[arg(long)]
        speculative: bool,
    },
    /// Lint a knot database file (or the built-in one)
    DbValidate { path: Option<PathBuf> },
}

fn exit_code(err: &anyhow::Error) -> u8 {
    let dim = err.downcast_ref::<DimError>().or_else(|| match err.downcast_ref::<Su2Error>() {
        Some(Su2Error::Dim(d)) => Some(d),
        _ => None,
    });
    match dim {
        Some(DimError::ShapeRequired(_)) => return 3,
        Some(DimError::UnknownField(_) | DimError::BadCharacteristic(_)) => return 2,
        _ => {}
    }
    match err.downcast_ref::<DbError>() {
        Some(DbError::UnknownKnot(_) | DbError::UnknownField { .. }) => 2,
        _ => 1,
    }
}

/// Command output, written to stdout in one go once the command finishes.
#[derive(Default)]
struct Out(String);

impl Out {
    fn write_fmt(&mut self, args: fmt::Arguments<'_>) {
        fmt::Write::write_fmt(&mut self.0, args).expect("writing to a String cannot fail");
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut out = Out::default();
    let result = run(&mut out, &cli);
    if let Err(err) = std::io::stdout().lock().write_all(out.0.as_bytes()) {
        // a closed pipe (`| head`) is not a failure of the command
        if err.kind() != std::io::ErrorKind::BrokenPipe {
            eprintln!("error: writing output: {err}");
            return ExitCode::from(1);
        }
    }
    match result {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}

fn load_records(db: &Option<PathBuf>) -> Result<Vec<KnotRecord>> {
    match db {
        None => Ok(builtin_db()),
        Some(path) => {
            let loaded = knot_db::load_db(path)?;
            for (name, v) in &loaded.violations {
                eprintln!("warning: {name}: {v}");
            }
            Ok(loaded.records)
        }
    }
}

fn parse_slope(s: &str) -> Result<Slope> {
    s.parse::<Slope>().map_err(|e| anyhow!("bad slope {s:?}: {e}"))
}

fn resolve(cli: &Cli, knot: &str, field: &FieldArg) -> Result<(KnotRecord, FieldInvariants)> {
    let records = load_records(&cli.db)?;
    let label: FieldLabel = field.field.parse()?;
    let rec = knot_db::find(&records, knot)?.clone();
    let inv = rec.invariants_for(label)?;
    Ok((rec, inv))
}

fn print_json(out: &mut Out, v: &Value) {
    writeln!(out, "{}", serde_json::to_string_pretty(v).expect("json values serialize"));
}

fn run(out: &mut Out, cli: &Cli) -> Result<u8> {
    match &cli.cmd {
        Cmd::Dim { knot, slope, field, bundle } => cmd_dim(out, cli, knot, slope, field, bundle),
        Cmd::Table { knot, field, lo, hi, den_max } => cmd_table(out, cli, knot, field, *lo, *hi, *den_max),
        Cmd::Farey { slope } => cmd_farey(out, cli, slope),
        Cmd::CheckTriangles { knot, field, den_max } => cmd_check_triangles(out, cli, knot, field, *den_max),
        Cmd::CheckGrading { k_class, max_total } => cmd_check_grading(out, cli, k_class, *max_total),
        Cmd::Su2 { knot, field, interval, den_max, speculative } => {
            cmd_su2(out, cli, knot, field, interval.as_deref(), *den_max, *speculative)
        }
        Cmd::DbValidate { path } => cmd_db_validate(out, cli, path.as_ref().or(cli.db.as_ref())),
    }
}

fn formula(inv: &FieldInvariants, slope: Slope, bundle: BundleClass, value: u64, exceptional: bool) -> String {
    if slope.is_infinite() {
        return "dim I#(S^3) = 1".into();
    }
    if exceptional {
        let which = if value == inv.r() { "r" } else { "r + 2" };
        return format!(
            "exceptional slope nu = {} ({}-shaped), bundle {bundle}: {which} = {value}",
            inv.nu(),
            inv.shape()
        );
    }
    let (p, q) = slope.as_pair();
    format!("q*r + |p - q*nu| = {q}*{} + |{p} - {q}*{}| = {value}", inv.r(), inv.nu())
}

fn cmd_dim(out: &mut Out, cli: &Cli, knot: &str, slope: &str, field: &FieldArg, bundle: &str) -> Result<u8> {
    let (rec, inv) = resolve(cli, knot, field)?;
    let slope = parse_slope(slope)?;
    let bundle: BundleClass = bundle.parse()?;
    let d = dim_sharp(&inv, slope, bundle)?;
    let f = formula(&inv, slope, bundle, d.value, d.exceptional);
    match cli.format {
        Format::Json => print_json(
            out,
            &json!({
                "knot": rec.name,
                "field": inv.field.to_string(),
                "slope": slope,
                "bundle": bundle.to_string(),
                "value": d.value,
                "exceptional": d.exceptional,
                "formula": f,
            }),
        ),
        Format::Table => {
            writeln!(out, "{}", d.value);
            writeln!(out, "exceptional: {}", d.exceptional);
            writeln!(out, "{f}");
        }
    }
    Ok(0)
}

fn dim_cell(inv: &FieldInvariants, s: Slope, b: BundleClass) -> Result<Option<u64>> {
    match dim_sharp(inv, s, b) {
        Ok(d) => Ok(Some(d.value)),
        Err(DimError::ShapeRequired(_)) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

fn cmd_table(
    out: &mut Out,
    cli: &Cli,
    knot: &str,
    field: &FieldArg,
    lo: Option<i64>,
    hi: Option<i64>,
    den_max: i64,
) -> Result<u8> {
    let (rec, inv) = resolve(cli, knot, field)?;
    let lo = lo.unwrap_or(inv.nu() - 5);
    let hi = hi.unwrap_or(inv.nu() + 5);
    if lo > hi {
        return Err(DimError::EmptyRange(lo, hi).into());
    }
    let mut rows = Vec::new();
    for s in slopes_in_range(lo, hi, den_max) {
        let t = dim_cell(&inv, s, BundleClass::Trivial)?;
        let m = dim_cell(&inv, s, BundleClass::Meridian)?;
        rows.push((s, t, m));
    }
    match cli.format {
        Format::Json => print_json(
            out,
            &json!({
                "knot": rec.name,
                "field": inv.field.to_string(),
                "invariants": {"nu": inv.nu(), "r": inv.r(), "shape": inv.shape()},
                "rows": rows.iter().map(|(s, t, m)| json!({"slope": s, "triv": t, "mu": m})).collect::<Vec<_>>(),
            }),
        ),
        Format::Table => {
            writeln!(out, "{} {inv}", rec.name);
            writeln!(out, "{:>10} {:>8} {:>8}", "slope", "triv", "mu");
            let cell = |x: &Option<u64>| x.map_or("?".to_string(), |v| v.to_string());
            for (s, t, m) in &rows {
                writeln!(out, "{:>10} {:>8} {:>8}", s.to_string(), cell(t), cell(m));
            }
        }
    }
    Ok(0)
}

fn cmd_farey(out: &mut Out, cli: &Cli, slope: &str) -> Result<u8> {
    let slope = parse_slope(slope)?;
    let tree = farey_tree(slope)?;
    match cli.format {
        Format::Json => print_json(
            out,
            &json!({
                "root": tree.root,
                "depth": tree.depth(),
                "leaves": tree.leaves(),
                "splits": tree.splits().map(|s| json!({
                    "r0": s.r0, "r1": s.r1, "r2": s.r2, "r3": s.r3,
                    "top": s.top.to_string(), "bottom": s.bottom.to_string(),
                })).collect::<Vec<_>>(),
            }),
        ),
        Format::Table => write!(out, "{}", tree.render()),
    }
    Ok(0)
}

fn cmd_check_triangles(out: &mut Out, cli: &Cli, knot: &str, field: &FieldArg, den_max: i64) -> Result<u8> {
    let (rec, inv) = resolve(cli, knot, field)?;
    let mut reports = Vec::new();
    for c in inv.completions() {
        reports.push(verify_knot_triangles(&c, den_max)?);
    }
    let failures: usize = reports.iter().map(|r| r.failures.len()).sum();
    match cli.format {
        Format::Json => print_json(
            out,
            &json!({
                "knot": rec.name,
                "shape_completed": inv.shape() == Shape::Unknown,
                "reports": reports,
                "failures": failures,
            }),
        ),
        Format::Table => {
            writeln!(out, "{}", rec.name);
            if inv.shape() == Shape::Unknown {
                writeln!(out, "shape unknown: checking both V and W");
            }
            for r in &reports {
                write!(out, "{}", r.render());
            }
            if reports.len() > 1 {
                writeln!(out, "{failures} failures total");
            }
        }
    }
    Ok(u8::from(failures > 0))
}

fn cmd_check_grading(out: &mut Out, cli: &Cli, k_class: &str, max_total: u64) -> Result<u8> {
    let classes: Vec<KClass> = if k_class == "all" { KClass::ALL.to_vec() } else { vec![k_class.parse()?] };
    let mut problems = 0usize;
    let mut rows = Vec::new();
    for k in classes {
        let cong = check_congruences(k);
        if !cong.all_hold() {
            problems += 1;
        }
        let mut checked = 0u64;
        let mut non_contradictions = Vec::new();
        let mut not_unique = Vec::new();
        for x in quadruples(max_total) {
            checked += 1;
            if !vw_contradiction(k, x)? {
                non_contradictions.push(x.to_string());
            }
            let consistent = consistent_sign_assignments(k, x);
            for st in isharp::grading::MiddleSign::ALL {
                if consistent.iter().filter(|(a, _)| *a == st).count() != 1 {
                    not_unique.push(x.to_string());
                }
            }
        }
        problems += non_contradictions.len() + not_unique.len();
        rows.push((k, cong, checked, non_contradictions, not_unique));
    }
    let i = shift_table(KClass::Positive, Route::Trivial);
    let j = shift_table(KClass::Positive, Route::Meridian);
    let x = GradedDim::new(5, 6, 7, 8);
    let trivial = propagate_triangle(propagate_triangle(x, i.first(), -1)?, i.second(), 1)?;
    let meridian = propagate_triangle(propagate_triangle(x, j.first(), -1)?, j.second(), 1)?;
    match cli.format {
        Format::Json => print_json(
            out,
            &json!({
                "classes": rows.iter().map(|(k, cong, checked, nc, nu)| json!({
                    "k_class": k.to_string(),
                    "trivial": shift_table(*k, Route::Trivial),
                    "meridian": shift_table(*k, Route::Meridian),
                    "congruences": cong,
                    "quadruples_checked": checked,
                    "non_contradictions": nc,
                    "non_unique_sign": nu,
                })).collect::<Vec<_>>(),
                "example": {"input": x, "trivial_route": trivial, "meridian_route": meridian},
                "problems": problems,
            }),
        ),
        Format::Table => {
            for (k, cong, checked, nc, nu) in &rows {
                writeln!(
                    out,
                    "k {k}: i = {} j = {} congruences {}",
                    shift_table(*k, Route::Trivial),
                    shift_table(*k, Route::Meridian),
                    if cong.all_hold() { "hold" } else { "FAIL" }
                );
                writeln!(
                    out,
                    "  {checked} quadruples, {} without contradiction, {} without a unique opposite sign",
                    nc.len(),
                    nu.len()
                );
            }
            writeln!(out, "k>0 from {x}: trivial route {trivial}, meridian route {meridian}");
            writeln!(out, "{problems} problems");
        }
    }
    Ok(u8::from(problems > 0))
}

/// Quadruples with all entries >= 1 and total <= `max_total`.
fn quadruples(max_total: u64) -> Vec<GradedDim> {
    let mut out = Vec::new();
    for a in 1..=max_total {
        for b in 1..=max_total {
            for c in 1..=max_total {
                for d in 1..=max_total {
                    if a + b + c + d <= max_total {
                        out.push(GradedDim::new(a, b, c, d));
                    }
                }
            }
        }
    }
    out
}

fn cmd_su2(
    out: &mut Out,
    cli: &Cli,
    knot: &str,
    field: &FieldArg,
    interval: Option<&[String]>,
    den_max: i64,
    speculative: bool,
) -> Result<u8> {
    let (rec, inv) = resolve(cli, knot, field)?;
    let (lo, hi, closed_hi) = match interval {
        Some([lo, hi]) => (parse_slope(lo)?, parse_slope(hi)?, false),
        Some(_) => return Err(anyhow!("--interval takes two slopes")),
        None if speculative => (Slope::integer(2), Slope::integer(8), true),
        None => (Slope::integer(2), Slope::integer(6), false),
    };
    let mut verdicts = classify_interval(&inv, &rec.alexander, lo, hi, den_max)?;
    if closed_hi {
        verdicts.push((hi, isharp::su2::obstruct_slope(&inv, &rec.alexander, hi)?));
    }
    let surv = survivors(&verdicts);
    match cli.format {
        Format::Json => print_json(
            out,
            &json!({
                "knot": rec.name,
                "field": inv.field.to_string(),
                "interval": [lo, hi],
                "den_max": den_max,
                "speculative": speculative,
                "verdicts": verdicts.iter().map(|(s, v)| json!({
                    "slope": s, "status": v.status, "reason": v.reason, "certificate": v.certificate,
                })).collect::<Vec<_>>(),
                "survivors": surv,
            }),
        ),
        Format::Table => {
            writeln!(out, "{} {inv}", rec.name);
            if speculative {
                writeln!(out, "speculative mode: upper end relies on announced results not yet available");
            }
            let close = if closed_hi { "]" } else { ")" };
            writeln!(out, "interval ({lo}, {hi}{close}, den <= {den_max}");
            writeln!(out, "{:>10}  {:<16} reason", "slope", "status");
            for (s, v) in &verdicts {
                writeln!(out, "{:>10}  {:<16} {}", s.to_string(), v.status.to_string(), v.reason);
            }
            let obstructed = verdicts.iter().filter(|(_, v)| v.status == Status::NotAbelianDim).count();
            let list: Vec<String> = surv.iter().map(|s| s.to_string()).collect();
            writeln!(out, "{obstructed} obstructed, {} survivors: {}", surv.len(), list.join(" "));
        }
    }
    Ok(0)
}

fn cmd_db_validate(out: &mut Out, cli: &Cli, path: Option<&PathBuf>) -> Result<u8> {
    let (source, records, violations) = match path {
        Some(p) => {
            let loaded = knot_db::load_db(p).with_context(|| format!("loading {}", p.display()))?;
            (p.display().to_string(), loaded.records, loaded.violations)
        }
        None => {
            let db = builtin_db();
            let v = knot_db::validate_db(&db);
            ("built-in".to_string(), db, v)
        }
    };
    let advisories: Vec<String> = records.iter().flat_map(knot_db::advisories).collect();
    match cli.format {
        Format::Json => print_json(
            out,
            &json!({
                "source": source,
                "records": records.len(),
                "violations": violations.iter().map(|(k, v)| json!({"knot": k, "violation": v.to_string()})).collect::<Vec<_>>(),
                "advisories": advisories,
            }),
        ),
        Format::Table => {
            writeln!(out, "{source}: {} records", records.len());
            for (k, v) in &violations {
                writeln!(out, "  {k}: {v}");
            }
            for a in &advisories {
                writeln!(out, "  note: {a}");
            }
            writeln!(out, "{} violations", violations.len());
        }
    }
    Ok(u8::from(!violations.is_empty()))
}
