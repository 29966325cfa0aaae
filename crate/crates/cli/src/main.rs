//! Command line front end. Every subcommand drives one exact pipeline from
//! the core crate and prints a deterministic JSON report (keys sorted, no
//! timestamps). Errors exit with a class code: 1 for rejected input, 2 for
//! a tripped cross-check, 3 for an exhausted exact-computation budget.

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use serde::Deserialize;
use serde_json::{json, Value};
use tdlc_core::field::newton::scale_from_charpoly;
use tdlc_core::flat::{flat_factor, FlatOptions};
use tdlc_core::lattice::mat::Mat;
use tdlc_core::lattice::LatticeModel;
use tdlc_core::relprof::{
    completion_fingerprint, integer_mod_two_transfer, lamp_quotient_projection,
    nested_pinned_projection, symmetric_three_transfer, ArithmeticPair, WreathCheck,
};
use tdlc_core::scale::scale_report;
use tdlc_core::shift::{
    conjugation_index_table, shift_invariant_code_scan, AnnihilatorCode, ShiftModel, TailVerdict,
    Window,
};
use tdlc_core::tree::{
    classify, elliptic_product_scales, unipotent_displacement_probe, MotionKind, TreeAuto,
    TreeModel,
};
use tdlc_core::{Error, GroupModel, IndexValue, LocalFieldSpec, Result};

#[derive(Parser)]
#[command(
    name = "tdlc",
    version,
    about = "Exact scale, tidy-subgroup, and completion calculus on three worked group models"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Scale report for a matrix acting on lattices, cross-checked against
    /// the characteristic-polygon route
    Scale(ScaleArgs),
    /// Tidying certificate for a matrix acting on lattices
    Tidy(MatrixArgs),
    /// Flat factoring of a commuting matrix family
    Flat(FlatArgs),
    /// Isometries of the regular tree
    #[command(subcommand)]
    Tree(TreeCmd),
    /// Window codes for the binary shift
    #[command(subcommand)]
    Shift(ShiftCmd),
    /// Relative completions of marked dense subgroup pairs
    #[command(subcommand)]
    Relprof(RelprofCmd),
    /// Run the built-in catalog of worked checks
    Examples,
    /// Run a JSON file of jobs and print one result per job
    Batch(BatchArgs),
}

#[derive(Args)]
struct ScaleArgs {
    /// Field as JSON, e.g. {"field":"Qp","p":3} or {"field":"Fq_t","q":2}
    #[arg(long)]
    field: String,
    /// Square matrix, rows separated by ';', entries by ',', e.g. "3,0;0,1/3"
    #[arg(long)]
    matrix: String,
    /// Highest power checked against the power law
    #[arg(long, default_value_t = 3)]
    powers: u32,
    /// Conjugating matrix (repeatable); the scale must not change under it
    #[arg(long = "conjugator")]
    conjugators: Vec<String>,
}

#[derive(Args)]
struct MatrixArgs {
    #[arg(long)]
    field: String,
    #[arg(long)]
    matrix: String,
}

#[derive(Args)]
struct FlatArgs {
    #[arg(long)]
    field: String,
    /// Generator matrix (repeatable, at least one)
    #[arg(long = "matrix", required = true)]
    matrices: Vec<String>,
}

#[derive(Subcommand)]
enum TreeCmd {
    /// Motion type, translation length, and scale of a 2x2 matrix
    Classify(MatrixArgs),
    /// Displacement of the base stabilizer under the unipotent family
    Probe {
        #[arg(long)]
        field: String,
        #[arg(long, default_value_t = 6)]
        k_max: u64,
    },
    /// Scales of two vertex-fixing isometries and of their translating product
    Product {
        #[arg(long)]
        field: String,
    },
}

#[derive(Subcommand)]
enum ShiftCmd {
    /// Scale of shift^tau plus a lamp translation, both routes
    #[command(allow_negative_numbers = true)]
    Scale {
        #[arg(long, default_value_t = 6)]
        window: i64,
        #[arg(long)]
        tau: i64,
        /// Lamp positions, comma separated
        #[arg(long, value_delimiter = ',')]
        lamps: Vec<i64>,
    },
    /// One-sided index table of the shifted half-line code
    #[command(allow_negative_numbers = true)]
    Conjugation {
        #[arg(long, default_value_t = 6)]
        window: i64,
        #[arg(long)]
        max_shift: Option<i64>,
    },
    /// Shift-invariant codes cut out by small patterns
    Scan {
        #[arg(long, default_value_t = 6)]
        window: i64,
    },
}

#[derive(Subcommand)]
enum RelprofCmd {
    /// Order of the wrapped coset-table shadow of the lamp completion
    #[command(allow_negative_numbers = true)]
    Fingerprint {
        #[arg(long)]
        m: i64,
    },
    /// Compatibility of nested pinned-coset tables at radii m and m+1
    #[command(allow_negative_numbers = true)]
    Nested {
        #[arg(long)]
        m: i64,
    },
    /// Projection of the lamp completion onto its translation quotient
    #[command(allow_negative_numbers = true)]
    LampQuotient {
        #[arg(long)]
        m: i64,
    },
    /// Index of a marked module orbit for the arithmetic pair at p
    Arith {
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 1)]
        k: u32,
        #[arg(long, default_value_t = 4096)]
        budget: usize,
        /// Also count cosets in generator balls up to this radius
        #[arg(long)]
        ball: Option<usize>,
    },
    /// Verify both worked wreath-product transfer maps
    Wreath,
}

#[derive(Args)]
struct BatchArgs {
    /// Path to a JSON array of job objects, each tagged with a "job" key
    #[arg(long)]
    config: std::path::PathBuf,
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                std::process::exit(0);
            }
            eprintln!("{e}");
            std::process::exit(1);
        }
    };
    match run(cli.command) {
        Ok(()) => {}
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(exit_class(&e));
        }
    }
}

fn run(command: Command) -> Result<()> {
    let out = match command {
        Command::Scale(a) => scale_json(&a.field, &a.matrix, a.powers, &a.conjugators)?,
        Command::Tidy(a) => tidy_json(&a.field, &a.matrix)?,
        Command::Flat(a) => flat_json(&a.field, &a.matrices)?,
        Command::Tree(TreeCmd::Classify(a)) => tree_classify_json(&a.field, &a.matrix)?,
        Command::Tree(TreeCmd::Probe { field, k_max }) => tree_probe_json(&field, k_max)?,
        Command::Tree(TreeCmd::Product { field }) => tree_product_json(&field)?,
        Command::Shift(ShiftCmd::Scale { window, tau, lamps }) => {
            shift_scale_json(window, tau, &lamps)?
        }
        Command::Shift(ShiftCmd::Conjugation { window, max_shift }) => {
            shift_conjugation_json(window, max_shift)?
        }
        Command::Shift(ShiftCmd::Scan { window }) => shift_scan_json(window)?,
        Command::Relprof(RelprofCmd::Fingerprint { m }) => fingerprint_json(m)?,
        Command::Relprof(RelprofCmd::Nested { m }) => nested_json(m)?,
        Command::Relprof(RelprofCmd::LampQuotient { m }) => lamp_quotient_json(m)?,
        Command::Relprof(RelprofCmd::Arith { p, k, budget, ball }) => {
            arith_json(p, k, budget, ball)?
        }
        Command::Relprof(RelprofCmd::Wreath) => wreath_json()?,
        Command::Examples => return run_examples(),
        Command::Batch(a) => return run_batch(&a.config),
    };
    println!("{}", serde_json::to_string_pretty(&out).expect("serializable output"));
    Ok(())
}

fn exit_class(e: &Error) -> i32 {
    match e {
        Error::ConfigInvalid(_)
        | Error::ModelMismatch(_)
        | Error::DivisionByZero
        | Error::Unsupported(_)
        | Error::InfiniteIndex(_)
        | Error::NormalFormFailure(_) => 1,
        Error::OracleDisagreement { .. }
        | Error::NotFlat { .. }
        | Error::NotHomomorphism(_)
        | Error::NotTransversal(_)
        | Error::NonIntegralExponent
        | Error::KNotStable => 2,
        Error::PrecisionExhausted { .. }
        | Error::NoStabilization { .. }
        | Error::OrbitNotSaturated { .. }
        | Error::WindowTooSmall { .. }
        | Error::SupportOverflow(_)
        | Error::RefinementBudgetExceeded { .. }
        | Error::KComputationFailed(_)
        | Error::IrrationalWitness { .. } => 3,
    }
}

/// Field description: {"field":"Qp","p":3,"precision":32} or
/// {"field":"Fq_t","q":2,"precision":32}. A missing precision falls back to
/// the TDLC_PRECISION environment variable, then to 32.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct FieldConfig {
    field: String,
    #[serde(default)]
    p: Option<u64>,
    #[serde(default)]
    q: Option<u64>,
    #[serde(default)]
    precision: Option<i64>,
}

impl FieldConfig {
    fn from_str(s: &str) -> Result<FieldConfig> {
        serde_json::from_str(s).map_err(|e| Error::ConfigInvalid(format!("field config: {e}")))
    }

    fn spec(&self) -> Result<LocalFieldSpec> {
        let precision = resolve_precision(self.precision)?;
        match (self.field.as_str(), self.p, self.q) {
            ("Qp", Some(p), None) => LocalFieldSpec::padic(p, precision),
            ("Fq_t", None, Some(q)) => LocalFieldSpec::laurent(q, precision),
            ("Qp", _, _) => Err(Error::ConfigInvalid(
                "field \"Qp\" takes exactly the key \"p\"".into(),
            )),
            ("Fq_t", _, _) => Err(Error::ConfigInvalid(
                "field \"Fq_t\" takes exactly the key \"q\"".into(),
            )),
            (other, _, _) => Err(Error::ConfigInvalid(format!(
                "unknown field kind {other:?}, expected \"Qp\" or \"Fq_t\""
            ))),
        }
    }
}

fn resolve_precision(explicit: Option<i64>) -> Result<i64> {
    if let Some(v) = explicit {
        return Ok(v);
    }
    match std::env::var("TDLC_PRECISION") {
        Ok(s) => s.trim().parse().map_err(|_| {
            Error::ConfigInvalid(format!("TDLC_PRECISION must be an integer, got {s:?}"))
        }),
        Err(_) => Ok(32),
    }
}

fn parse_square_matrix(spec: LocalFieldSpec, s: &str) -> Result<Mat> {
    let rows: Vec<Vec<String>> = s
        .split(';')
        .map(|r| r.split(',').map(|e| e.trim().to_string()).collect())
        .collect();
    let m = Mat::parse(spec, &rows)?;
    if m.rows != m.cols {
        return Err(Error::ConfigInvalid(format!(
            "matrix must be square, got {} rows by {} columns",
            m.rows, m.cols
        )));
    }
    Ok(m)
}

fn scale_json(field: &str, matrix: &str, powers: u32, conjugators: &[String]) -> Result<Value> {
    let spec = FieldConfig::from_str(field)?.spec()?;
    let g = parse_square_matrix(spec, matrix)?;
    let model = LatticeModel::new(spec, g.rows)?;
    let conj: Vec<Mat> = conjugators
        .iter()
        .map(|c| parse_square_matrix(spec, c))
        .collect::<Result<_>>()?;
    let polygon = scale_from_charpoly(&spec, &g.charpoly())?;
    let report = scale_report(&model, &g, powers, &conj, None)?;
    if report.scale != polygon {
        return Err(Error::OracleDisagreement {
            context: "tidy-chain scale against the polygon scale".into(),
            computed: report.scale.to_string(),
            oracle: polygon.to_string(),
        });
    }
    Ok(json!({
        "command": "scale",
        "scale": report.scale.to_string(),
        "scale_inverse": report.scale_inverse.to_string(),
        "polygon_scale": polygon.to_string(),
        "modular_ratio": [report.modular_ratio.0.to_string(), report.modular_ratio.1.to_string()],
        "powers": report.powers.iter().map(|(n, s)| json!([n, s.to_string()])).collect::<Vec<_>>(),
        "power_law_holds": report.power_law_holds,
        "conjugation_invariant": report.conjugation_invariant,
        "uniscalar": report.uniscalar,
        "all_hold": report.all_hold,
    }))
}

fn tidy_json(field: &str, matrix: &str) -> Result<Value> {
    let spec = FieldConfig::from_str(field)?.spec()?;
    let g = parse_square_matrix(spec, matrix)?;
    let model = LatticeModel::new(spec, g.rows)?;
    let cert = model.tidy(&g, &model.base())?;
    Ok(json!({
        "command": "tidy",
        "input_index": cert.input_index.to_string(),
        "minimized_index": cert.minimized_index.to_string(),
        "depth": cert.depth,
        "ta_held": cert.ta_held,
        "tb_held": cert.tb_held,
        "tidy_columns": cert.tidy.render_cols(),
        "plus_columns": cert.plus_part.as_ref().map(|l| l.render_cols()),
        "minus_columns": cert.minus_part.as_ref().map(|l| l.render_cols()),
    }))
}

fn flat_json(field: &str, matrices: &[String]) -> Result<Value> {
    let spec = FieldConfig::from_str(field)?.spec()?;
    let gens: Vec<Mat> = matrices
        .iter()
        .map(|m| parse_square_matrix(spec, m))
        .collect::<Result<_>>()?;
    let dim = gens[0].rows;
    if gens.iter().any(|g| g.rows != dim) {
        return Err(Error::ConfigInvalid(
            "all generators must share one dimension".into(),
        ));
    }
    let model = LatticeModel::new(spec, dim)?;
    let f = flat_factor(&model, &gens, &FlatOptions::default())?;
    Ok(json!({
        "command": "flat",
        "q": f.q,
        "flat_rank": f.flat_rank,
        "sweeps": f.sweeps,
        "words_checked": f.words_checked,
        "uniscalar_flags": f.uniscalar_flags,
        "has_uniscalar_part": f.uniscalar_part.is_some(),
        "factors": f.factors.iter().map(|x| json!({"base": x.base, "rho": x.rho})).collect::<Vec<_>>(),
    }))
}

fn kind_name(kind: MotionKind) -> &'static str {
    match kind {
        MotionKind::Hyperbolic => "hyperbolic",
        MotionKind::Elliptic => "elliptic",
        MotionKind::Inversion => "inversion",
    }
}

fn tree_classify_json(field: &str, matrix: &str) -> Result<Value> {
    let spec = FieldConfig::from_str(field)?.spec()?;
    let g = parse_square_matrix(spec, matrix)?;
    let (kind, ell, vdisp) = classify(spec, &g)?;
    let model = TreeModel::new(spec);
    let scale = model.scale(&TreeAuto::new(spec, g)?)?;
    Ok(json!({
        "command": "tree-classify",
        "kind": kind_name(kind),
        "translation_length": ell,
        "min_displacement": vdisp,
        "scale": scale.to_string(),
    }))
}

fn tree_probe_json(field: &str, k_max: u64) -> Result<Value> {
    let spec = FieldConfig::from_str(field)?.spec()?;
    let steps = unipotent_displacement_probe(spec, k_max)?;
    Ok(json!({
        "command": "tree-probe",
        "steps": steps.iter().map(|s| json!({
            "k": s.k,
            "left": s.displacement.left.to_string(),
            "right": s.displacement.right.to_string(),
            "product": s.displacement.product.to_string(),
            "scale": s.scale.to_string(),
        })).collect::<Vec<_>>(),
    }))
}

fn tree_product_json(field: &str) -> Result<Value> {
    let spec = FieldConfig::from_str(field)?.spec()?;
    let (sx, sy, sxy) = elliptic_product_scales(spec)?;
    Ok(json!({
        "command": "tree-product",
        "scale_x": sx.to_string(),
        "scale_y": sy.to_string(),
        "scale_xy": sxy.to_string(),
    }))
}

fn shift_scale_json(window: i64, tau: i64, lamps: &[i64]) -> Result<Value> {
    let model = ShiftModel::new(Window::new(window)?);
    let elem = model.elem(tau, lamps)?;
    let closed = model.closed_form_scale(&elem);
    let measured = model.scale(&elem)?;
    if measured != closed {
        return Err(Error::OracleDisagreement {
            context: "tidy-chain scale against the closed form".into(),
            computed: measured.to_string(),
            oracle: closed.to_string(),
        });
    }
    Ok(json!({
        "command": "shift-scale",
        "window": window,
        "tau": tau,
        "lamps": lamps,
        "scale": measured.to_string(),
        "closed_form": closed.to_string(),
    }))
}

fn shift_conjugation_json(window: i64, max_shift: Option<i64>) -> Result<Value> {
    let w = Window::new(window)?;
    let table = conjugation_index_table(w, max_shift.unwrap_or(window))?;
    Ok(json!({
        "command": "shift-conjugation",
        "window": window,
        "table": table.iter().map(|(k, fwd, bwd)| json!({
            "shift": k,
            "forward_exponent": fwd,
            "backward_exponent": bwd,
        })).collect::<Vec<_>>(),
    }))
}

fn verdict_name(v: &TailVerdict) -> String {
    match v {
        TailVerdict::CofiniteTail { from } => format!("cofinite-tail(from={from})"),
        TailVerdict::FiniteDimensional { dim } => format!("finite-dimensional(dim={dim})"),
        TailVerdict::Undecided => "undecided".into(),
    }
}

fn shift_scan_json(window: i64) -> Result<Value> {
    let w = Window::new(window)?;
    let entries = shift_invariant_code_scan(w)?;
    Ok(json!({
        "command": "shift-scan",
        "window": window,
        "entries": entries.iter().map(|e| json!({
            "pattern": e.pattern,
            "dim": e.dim,
            "verdict": verdict_name(&e.verdict),
            "gap": [e.gap.0, e.gap.1],
        })).collect::<Vec<_>>(),
    }))
}

fn fingerprint_json(m: i64) -> Result<Value> {
    let fp = completion_fingerprint(m)?;
    Ok(json!({
        "command": "fingerprint",
        "m": m,
        "points": fp.points,
        "order": fp.order,
        "closed_form": fp.closed_form,
    }))
}

fn nested_json(m: i64) -> Result<Value> {
    let n = nested_pinned_projection(m)?;
    Ok(json!({
        "command": "nested",
        "m": m,
        "fine_table": n.fine_table,
        "coarse_table": n.coarse_table,
        "fiber_size": n.fiber_size,
        "equivariant": n.equivariant,
        "kernel_trivial": n.kernel_trivial,
        "coarse_trivial_count": n.coarse_trivial_count,
        "swapped_spurious_count": n.swapped_spurious_count,
    }))
}

fn lamp_quotient_json(m: i64) -> Result<Value> {
    let l = lamp_quotient_projection(m)?;
    Ok(json!({
        "command": "lamp-quotient",
        "m": m,
        "coarse_translation": l.coarse_translation,
        "kernel_is_lamp_part": l.kernel_is_lamp_part,
        "kernel_bit_action": l.kernel_bit_action,
        "fiber_size": l.fiber_size,
    }))
}

fn arith_json(p: u64, k: u32, budget: usize, ball: Option<usize>) -> Result<Value> {
    let pair = ArithmeticPair::new(p, 64)?;
    let (orbit, congruence, sphere) = pair.diagonal_index_routes(k, budget)?;
    let ball_counts = match ball {
        Some(radius) => Some(pair.coset_ball(radius, budget)?),
        None => None,
    };
    Ok(json!({
        "command": "arith",
        "p": p,
        "k": k,
        "orbit_index": orbit.to_string(),
        "congruence_count": congruence,
        "sphere_count": sphere,
        "ball_counts": ball_counts,
    }))
}

fn wreath_value(c: &WreathCheck) -> Value {
    json!({
        "transversal_held": c.transversal_held,
        "homomorphism_held": c.homomorphism_held,
        "cocycle_held": c.cocycle_held,
        "projection_held": c.projection_held,
        "image_order": c.image_order,
        "kernel_index": c.kernel_index,
    })
}

fn wreath_json() -> Result<Value> {
    let integers = integer_mod_two_transfer()?;
    let symmetric = symmetric_three_transfer()?;
    Ok(json!({
        "command": "wreath",
        "integers_mod_two": wreath_value(&integers),
        "symmetric_three": wreath_value(&symmetric),
    }))
}

fn expect_eq<T: PartialEq + std::fmt::Display>(computed: T, oracle: T, what: &str) -> Result<()> {
    if computed == oracle {
        Ok(())
    } else {
        Err(Error::OracleDisagreement {
            context: what.into(),
            computed: computed.to_string(),
            oracle: oracle.to_string(),
        })
    }
}

/// Fixed catalog of worked checks; every line re-derives a frozen value.
fn run_examples() -> Result<()> {
    let mut passed = 0usize;
    let mut ok = |line: String| {
        println!("ok {line}");
        passed += 1;
    };

    let q3 = LocalFieldSpec::padic(3, 32)?;
    let lat3 = LatticeModel::new(q3, 2)?;

    let split = parse_square_matrix(q3, "3,0;0,1/3")?;
    let report = scale_report(&lat3, &split, 3, &[], None)?;
    expect_eq(report.scale.clone(), IndexValue::prime_power(3, 1), "split diagonal scale")?;
    expect_eq(
        format!("{}/{}", report.modular_ratio.0, report.modular_ratio.1),
        "1/1".to_string(),
        "split diagonal modular ratio",
    )?;
    ok(format!(
        "lattice split diagonal over Q_3: scale {}, modular ratio {}/{}",
        report.scale, report.modular_ratio.0, report.modular_ratio.1
    ));

    let shear = parse_square_matrix(q3, "9,1;0,1")?;
    let report = scale_report(&lat3, &shear, 3, &[], None)?;
    expect_eq(report.scale.clone(), IndexValue::one(), "integral shear forward scale")?;
    expect_eq(
        report.scale_inverse.clone(),
        IndexValue::prime_power(3, 2),
        "integral shear backward scale",
    )?;
    ok(format!(
        "lattice shear with determinant 9: scale {} forward, {} backward",
        report.scale, report.scale_inverse
    ));

    let q2 = LocalFieldSpec::padic(2, 64)?;
    let lat2 = LatticeModel::new(q2, 3)?;
    let g1 = parse_square_matrix(q2, "2,0,0;0,1,0;0,0,1/2")?;
    let g2 = parse_square_matrix(q2, "1,0,0;0,2,0;0,0,2")?;
    let f = flat_factor(&lat2, &[g1, g2], &FlatOptions::default())?;
    expect_eq(f.q, 3, "flat family direction count")?;
    expect_eq(f.flat_rank, 2, "flat family rank")?;
    ok(format!(
        "flat family in dimension 3: {} directions of rank {}",
        f.q, f.flat_rank
    ));

    let tree3 = TreeModel::new(q3);
    let trans = parse_square_matrix(q3, "3,0;0,1")?;
    let (kind, ell, _) = classify(q3, &trans)?;
    expect_eq(kind_name(kind).to_string(), "hyperbolic".to_string(), "translation kind")?;
    expect_eq(ell, 1, "translation length")?;
    let s = tree3.scale(&TreeAuto::new(q3, trans)?)?;
    expect_eq(s.clone(), IndexValue::prime_power(3, 1), "translation scale")?;
    ok(format!("tree translation by one level: hyperbolic, scale {s}"));

    let rot = parse_square_matrix(q3, "0,1;-1,0")?;
    let (kind, _, _) = classify(q3, &rot)?;
    expect_eq(kind_name(kind).to_string(), "elliptic".to_string(), "rotation kind")?;
    let s = tree3.scale(&TreeAuto::new(q3, rot)?)?;
    expect_eq(s.clone(), IndexValue::one(), "rotation scale")?;
    ok(format!("tree rotation: elliptic, scale {s}"));

    let swap = parse_square_matrix(q3, "0,1;3,0")?;
    let (kind, _, vdisp) = classify(q3, &swap)?;
    expect_eq(kind_name(kind).to_string(), "inversion".to_string(), "edge swap kind")?;
    expect_eq(vdisp, 1, "edge swap displacement")?;
    let s = tree3.scale(&TreeAuto::new(q3, swap)?)?;
    expect_eq(s.clone(), IndexValue::one(), "edge swap scale")?;
    ok(format!("tree edge swap: inversion, scale {s}"));

    let (sx, sy, sxy) = elliptic_product_scales(q3)?;
    expect_eq(sxy.clone(), IndexValue::prime_power(3, 2), "elliptic product scale")?;
    ok(format!("tree elliptic product: scales {sx}, {sy}, {sxy}"));

    let probe = unipotent_displacement_probe(q3, 3)?;
    let lefts: Vec<String> = probe[1..].iter().map(|s| s.displacement.left.to_string()).collect();
    expect_eq(lefts.join(","), "12,108,972".to_string(), "unipotent displacements")?;
    ok(format!(
        "tree unipotent probe to k=3: one-sided displacements {}, scale 1 throughout",
        lefts.join(", ")
    ));

    let w6 = Window::new(6)?;
    let shift_model = ShiftModel::new(w6);
    let contraction = shift_model.elem(-2, &[0, 3])?;
    let measured = shift_model.scale(&contraction)?;
    expect_eq(measured.clone(), shift_model.closed_form_scale(&contraction), "shift scale routes")?;
    expect_eq(measured.clone(), IndexValue::prime_power(2, 2), "shift contraction scale")?;
    ok(format!("shift contraction by two on window 6: scale {measured} on both routes"));

    let std_code = AnnihilatorCode::right_half(w6);
    let mirror_index = std_code.index_over(&std_code.mirror_conjugate())?;
    expect_eq(mirror_index.clone(), IndexValue::prime_power(2, 6), "mirror conjugate index")?;
    ok(format!("shift mirror conjugate on window 6: index {mirror_index}"));

    for (k, fwd, bwd) in conjugation_index_table(Window::new(4)?, 4)? {
        let want = if k >= 0 { (k as u32, 0) } else { (0, (-k) as u32) };
        expect_eq(format!("{fwd},{bwd}"), format!("{},{}", want.0, want.1), "one-sided conjugation")?;
    }
    ok("shift conjugation table on window 4: one-sided at every shift".to_string());

    let dims: Vec<u32> = shift_invariant_code_scan(w6)?.iter().map(|e| e.dim).collect();
    expect_eq(format!("{dims:?}"), "[0, 1, 2, 2]".to_string(), "invariant code dimensions")?;
    ok(format!("shift invariant-code scan on window 6: dimensions {dims:?}"));

    for (m, order) in [(1i64, 24u64), (2, 160)] {
        let fp = completion_fingerprint(m)?;
        expect_eq(fp.order, order, "fingerprint order")?;
        ok(format!("lamp completion fingerprint m={m}: order {}", fp.order));
    }

    let nested = nested_pinned_projection(2)?;
    if !(nested.equivariant && nested.kernel_trivial && nested.fiber_size == 2) {
        return Err(Error::OracleDisagreement {
            context: "nested pinned projection at m=2".into(),
            computed: format!("{nested:?}"),
            oracle: "equivariant, trivial kernel, fiber 2".into(),
        });
    }
    ok("lamp nested projection m=2: equivariant with trivial kernel, fiber 2".to_string());

    let pair = ArithmeticPair::new(3, 64)?;
    let (orbit, congruence, sphere) = pair.diagonal_index_routes(1, 4096)?;
    expect_eq(orbit.clone(), IndexValue::from_u64(12)?, "diagonal orbit index")?;
    expect_eq(congruence, 12, "diagonal congruence count")?;
    expect_eq(sphere, 12, "diagonal sphere count")?;
    ok(format!("arithmetic diagonal orbit at p=3: index {orbit} on three routes"));

    let integers = integer_mod_two_transfer()?;
    let symmetric = symmetric_three_transfer()?;
    expect_eq(integers.image_order, integers.kernel_index, "integer transfer first-isomorphism route")?;
    expect_eq(symmetric.image_order, symmetric.kernel_index, "symmetric transfer first-isomorphism route")?;
    ok(format!(
        "wreath transfers: image orders {} and {}, matching kernel indices",
        integers.image_order, symmetric.image_order
    ));

    drop(ok);
    println!("all {passed} example checks passed");
    Ok(())
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ScaleJob {
    field: FieldConfig,
    matrix: String,
    #[serde(default = "default_powers")]
    powers: u32,
    #[serde(default)]
    conjugators: Vec<String>,
}

fn default_powers() -> u32 {
    3
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MatrixJob {
    field: FieldConfig,
    matrix: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FlatJob {
    field: FieldConfig,
    matrices: Vec<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FieldJob {
    field: FieldConfig,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ProbeJob {
    field: FieldConfig,
    #[serde(default = "default_k_max")]
    k_max: u64,
}

fn default_k_max() -> u64 {
    6
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ShiftScaleJob {
    #[serde(default = "default_window")]
    window: i64,
    tau: i64,
    #[serde(default)]
    lamps: Vec<i64>,
}

fn default_window() -> i64 {
    6
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ShiftConjugationJob {
    #[serde(default = "default_window")]
    window: i64,
    #[serde(default)]
    max_shift: Option<i64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ShiftScanJob {
    #[serde(default = "default_window")]
    window: i64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RadiusJob {
    m: i64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ArithJob {
    p: u64,
    #[serde(default = "default_k")]
    k: u32,
    #[serde(default = "default_budget")]
    budget: usize,
    #[serde(default)]
    ball: Option<usize>,
}

fn default_k() -> u32 {
    1
}

fn default_budget() -> usize {
    4096
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct EmptyJob {}

fn field_json(config: &FieldConfig) -> String {
    let mut obj = serde_json::Map::new();
    obj.insert("field".into(), Value::String(config.field.clone()));
    if let Some(p) = config.p {
        obj.insert("p".into(), p.into());
    }
    if let Some(q) = config.q {
        obj.insert("q".into(), q.into());
    }
    if let Some(precision) = config.precision {
        obj.insert("precision".into(), precision.into());
    }
    Value::Object(obj).to_string()
}

fn run_job(tag: &str, rest: Value) -> Result<Value> {
    fn decode<T: serde::de::DeserializeOwned>(tag: &str, rest: Value) -> Result<T> {
        serde_json::from_value(rest)
            .map_err(|e| Error::ConfigInvalid(format!("job {tag:?}: {e}")))
    }
    match tag {
        "scale" => {
            let j: ScaleJob = decode(tag, rest)?;
            scale_json(&field_json(&j.field), &j.matrix, j.powers, &j.conjugators)
        }
        "tidy" => {
            let j: MatrixJob = decode(tag, rest)?;
            tidy_json(&field_json(&j.field), &j.matrix)
        }
        "flat" => {
            let j: FlatJob = decode(tag, rest)?;
            flat_json(&field_json(&j.field), &j.matrices)
        }
        "tree-classify" => {
            let j: MatrixJob = decode(tag, rest)?;
            tree_classify_json(&field_json(&j.field), &j.matrix)
        }
        "tree-probe" => {
            let j: ProbeJob = decode(tag, rest)?;
            tree_probe_json(&field_json(&j.field), j.k_max)
        }
        "tree-product" => {
            let j: FieldJob = decode(tag, rest)?;
            tree_product_json(&field_json(&j.field))
        }
        "shift-scale" => {
            let j: ShiftScaleJob = decode(tag, rest)?;
            shift_scale_json(j.window, j.tau, &j.lamps)
        }
        "shift-conjugation" => {
            let j: ShiftConjugationJob = decode(tag, rest)?;
            shift_conjugation_json(j.window, j.max_shift)
        }
        "shift-scan" => {
            let j: ShiftScanJob = decode(tag, rest)?;
            shift_scan_json(j.window)
        }
        "fingerprint" => {
            let j: RadiusJob = decode(tag, rest)?;
            fingerprint_json(j.m)
        }
        "nested" => {
            let j: RadiusJob = decode(tag, rest)?;
            nested_json(j.m)
        }
        "lamp-quotient" => {
            let j: RadiusJob = decode(tag, rest)?;
            lamp_quotient_json(j.m)
        }
        "arith" => {
            let j: ArithJob = decode(tag, rest)?;
            arith_json(j.p, j.k, j.budget, j.ball)
        }
        "wreath" => {
            let _: EmptyJob = decode(tag, rest)?;
            wreath_json()
        }
        other => Err(Error::ConfigInvalid(format!("unknown job kind {other:?}"))),
    }
}

/// Runs every job even after a failure, embedding the error and its exit
/// class in that job's slot; the process exits with the first failure's
/// class so one bad job cannot hide the results of later ones.
fn run_batch(path: &std::path::Path) -> Result<()> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::ConfigInvalid(format!("reading {}: {e}", path.display())))?;
    let jobs: Vec<Value> = serde_json::from_str(&text)
        .map_err(|e| Error::ConfigInvalid(format!("batch config must be a JSON array: {e}")))?;
    let mut results = Vec::with_capacity(jobs.len());
    let mut first_class: Option<i32> = None;
    for (i, job) in jobs.iter().enumerate() {
        let outcome = job
            .as_object()
            .ok_or_else(|| Error::ConfigInvalid(format!("job {i} must be an object")))
            .and_then(|obj| {
                let tag = obj
                    .get("job")
                    .and_then(Value::as_str)
                    .ok_or_else(|| {
                        Error::ConfigInvalid(format!("job {i} needs a string \"job\" key"))
                    })?
                    .to_string();
                let mut rest = obj.clone();
                rest.remove("job");
                run_job(&tag, Value::Object(rest))
            });
        match outcome {
            Ok(v) => results.push(v),
            Err(e) => {
                let class = exit_class(&e);
                first_class.get_or_insert(class);
                results.push(json!({"error": e.to_string(), "exit_class": class}));
            }
        }
    }
    println!("{}", serde_json::to_string_pretty(&results).expect("serializable output"));
    match first_class {
        None => Ok(()),
        Some(class) => std::process::exit(class),
    }
}
