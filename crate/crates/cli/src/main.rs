//! `synd` — command-line front end over the `syndetic` library.
//!
//! Every run prints a single-line JSON report on stdout:
//! `{"command", "descriptor_sha256"?, "params", "budget", "result", "wall_ms"?}`.
//! The report is byte-identical across repeated runs unless `--timing` is
//! given (wall time is the one nondeterministic field, so it is opt-in).
//!
//! Exit codes: 0 = success / verified, 2 = refuted / violation / search
//! failed (a negative mathematical finding, distinguishable from breakage),
//! 1 = usage or resource errors (message on stderr).

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;
use std::time::Instant;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use syndetic::blocks::{decode_blocks, BlockStream, FinitePairs, TailPolicy};
use syndetic::construction::{
    alpha_source, empirical_density, zd_product, ConstructionParams,
};
use syndetic::group::{
    check_witness_group, group_density, finite_index_lift, lift_witness, Group, GroupHom,
    GroupSetDescriptor,
};
use syndetic::uss::{certify_descriptor, uss_profile, Certificate};
use syndetic::witness::{
    check_witness, find_witness, refute_two_syndetic, synthesize_witnesses, TranslateFamily,
};
use syndetic::{Error, Limits, Result, SetDescriptor};

#[derive(Parser)]
#[command(name = "synd", version, about = "Certify and refute complete syndeticity")]
struct Cli {
    /// Cap lazy stream expansion and ball growth at this many steps.
    #[arg(long, global = true)]
    budget: Option<u64>,
    /// Add wall-clock milliseconds to the report (breaks byte determinism).
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Block-encode the nonnegative side of a set (requires 0 to be a member).
    Encode(EncodeArgs),
    /// Expand explicit block pairs into half-open intervals.
    Decode(DecodeArgs),
    /// Materialize a membership window.
    Window(WindowArgs),
    /// Check, search for, or synthesize translate witnesses.
    #[command(subcommand)]
    Witness(WitnessCmd),
    /// Built-in refutations of complete syndeticity.
    #[command(subcommand)]
    Refute(RefuteCmd),
    /// Progression profiles and block-stream certification.
    #[command(subcommand)]
    Uss(UssCmd),
    /// Emit the built-in constructions.
    #[command(subcommand)]
    Construct(ConstructCmd),
    /// Exact member ratio over a centered window.
    Density(DensityArgs),
    /// The d-fold product set inside Z^d.
    Product(ProductArgs),
    /// Build lifted descriptors (preimages and finite-index unions).
    #[command(subcommand)]
    Lift(LiftCmd),
    /// Analyses over group set descriptors.
    #[command(subcommand)]
    Group(GroupCmd),
}

#[derive(Args)]
struct EncodeArgs {
    /// Set descriptor JSON file.
    #[arg(long)]
    desc: PathBuf,
    /// Number of (alpha, beta) pairs to emit.
    #[arg(long)]
    pairs: usize,
}

#[derive(Args)]
struct DecodeArgs {
    /// Comma-separated block lengths.
    #[arg(long)]
    alpha: String,
    /// Comma-separated gap lengths.
    #[arg(long)]
    beta: String,
    #[arg(long, value_enum, default_value_t = TailArg::RepeatLast)]
    tail: TailArg,
    /// Number of blocks to expand (defaults to the alpha length).
    #[arg(long)]
    count: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum TailArg {
    RepeatLast,
    Error,
}

impl From<TailArg> for TailPolicy {
    fn from(t: TailArg) -> TailPolicy {
        match t {
            TailArg::RepeatLast => TailPolicy::RepeatLast,
            TailArg::Error => TailPolicy::Error,
        }
    }
}

#[derive(Args)]
struct WindowArgs {
    #[arg(long)]
    desc: PathBuf,
    #[arg(long, allow_hyphen_values = true)]
    lo: i64,
    #[arg(long, allow_hyphen_values = true)]
    hi: i64,
}

#[derive(Subcommand)]
enum WitnessCmd {
    /// Decide whether a translate family covers all n-subsets of a window.
    Check(WitnessCheckArgs),
    /// Search for a verifying family inside a translate radius.
    Find(WitnessFindArgs),
    /// Derive the interval-witness tower from a certificate.
    Synthesize(SynthesizeArgs),
}

#[derive(Args)]
#[command(group(ArgGroup::new("family").required(true).args(["translates", "radius"])))]
struct WitnessCheckArgs {
    #[arg(long)]
    desc: PathBuf,
    #[arg(long)]
    n: u32,
    /// Explicit comma-separated translates.
    #[arg(long = "F", allow_hyphen_values = true)]
    translates: Option<String>,
    /// Interval family: all translates with |f| <= radius (decimal, any size).
    #[arg(long)]
    radius: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    lo: i64,
    #[arg(long, allow_hyphen_values = true)]
    hi: i64,
}

#[derive(Args)]
struct WitnessFindArgs {
    #[arg(long)]
    desc: PathBuf,
    #[arg(long)]
    n: u32,
    #[arg(long, allow_hyphen_values = true)]
    lo: i64,
    #[arg(long, allow_hyphen_values = true)]
    hi: i64,
    /// Candidate translates are drawn from [-radius, radius].
    #[arg(long)]
    radius: i64,
}

#[derive(Args)]
#[command(group(ArgGroup::new("cert").required(true).args(["k", "b"])))]
struct SynthesizeArgs {
    /// Gap parameter of the triangular-array construction.
    #[arg(long = "K")]
    k: Option<u64>,
    /// Row multiplier of the triangular-array construction.
    #[arg(long = "M", requires = "k")]
    m: Option<u64>,
    /// Constant-certificate gap bound.
    #[arg(long)]
    b: Option<u64>,
    /// Constant-certificate window length.
    #[arg(long = "L", requires = "b")]
    l: Option<u64>,
    /// Synthesize witnesses F_1 .. F_{n-max}.
    #[arg(long, default_value_t = 3)]
    n_max: u32,
    /// Cross-validate the analytic window length up to this D.
    #[arg(long, default_value_t = 6)]
    validate_d: u64,
}

#[derive(Subcommand)]
enum RefuteCmd {
    /// Two-point obstruction for the thick-and-syndetic set at translate radius r.
    #[command(name = "corB")]
    CorB {
        #[arg(long)]
        r: u64,
    },
}

#[derive(Subcommand)]
enum UssCmd {
    /// Longest bounded-gap progression per horizon, both signs.
    Scan(UssScanArgs),
    /// Check the (b, L) window conditions on the block stream of a set.
    Certify(UssCertifyArgs),
}

#[derive(Args)]
struct UssScanArgs {
    #[arg(long)]
    desc: PathBuf,
    /// Maximum allowed gap inside a progression.
    #[arg(long = "D")]
    d: u64,
    /// Comma-separated ascending horizons.
    #[arg(long)]
    horizons: String,
}

#[derive(Args)]
struct UssCertifyArgs {
    #[arg(long)]
    desc: PathBuf,
    /// Block length every window must reach.
    #[arg(long = "D")]
    d: u64,
    /// Window length in stream indices.
    #[arg(long = "L")]
    l: u64,
    /// Gap bound every beta must respect.
    #[arg(long)]
    b: u64,
    /// Number of leading stream pairs to scan.
    #[arg(long)]
    prefix: u64,
}

#[derive(Subcommand)]
enum ConstructCmd {
    /// Triangular-array construction with gap K and row multiplier M.
    Gen42(Gen42Args),
    /// The thick, syndetic, not completely syndetic set.
    #[command(name = "corB")]
    CorB(CorBArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum EmitKind {
    Blocks,
    Window,
}

#[derive(Args)]
struct Gen42Args {
    #[arg(long = "K")]
    k: u64,
    #[arg(long = "M")]
    m: u64,
    #[arg(long, value_enum)]
    emit: EmitKind,
    /// Pairs to emit (blocks mode).
    #[arg(long)]
    count: Option<usize>,
    /// Window half-width (window mode).
    #[arg(long)]
    radius: Option<i64>,
}

#[derive(Args)]
struct CorBArgs {
    #[arg(long, value_enum)]
    emit: EmitKind,
    #[arg(long)]
    radius: Option<i64>,
}

#[derive(Args)]
struct DensityArgs {
    #[arg(long)]
    desc: PathBuf,
    #[arg(long)]
    radius: i64,
}

#[derive(Args)]
struct ProductArgs {
    #[arg(long)]
    desc: PathBuf,
    #[arg(long)]
    d: u32,
    /// Box half-width for the density report.
    #[arg(long)]
    radius: Option<i64>,
    /// Report membership of one point instead (comma-separated coordinates).
    #[arg(long, allow_hyphen_values = true, conflicts_with = "radius")]
    point: Option<String>,
}

#[derive(Subcommand)]
enum LiftCmd {
    /// Preimage of an integer set under a homomorphism G -> Z.
    Preimage(LiftPreimageArgs),
    /// Finite-index union: base placed on kZ and fattened by all residues.
    Index(LiftIndexArgs),
}

#[derive(Args)]
struct LiftPreimageArgs {
    /// z<rank> (e.g. z2) or heisenberg.
    #[arg(long)]
    group: String,
    /// Generator images, e.g. "x=1,y=0" or "1,0".
    #[arg(long, allow_hyphen_values = true)]
    hom: String,
    /// Descriptor file for the inner integer set.
    #[arg(long)]
    inner: PathBuf,
}

#[derive(Args)]
struct LiftIndexArgs {
    #[arg(long)]
    k: u64,
    /// Descriptor file for the base set.
    #[arg(long)]
    desc: PathBuf,
}

#[derive(Subcommand)]
enum GroupCmd {
    /// Exact member ratio over the radius-r ball.
    Density(GroupDensityArgs),
    /// Witness check over the radius-r ball with left translates.
    Check(GroupCheckArgs),
}

#[derive(Args)]
struct GroupDensityArgs {
    /// Group set descriptor JSON file.
    #[arg(long)]
    desc: PathBuf,
    #[arg(long)]
    radius: u32,
}

#[derive(Args)]
#[command(group(ArgGroup::new("family").required(true).args(["translates", "lift"])))]
struct GroupCheckArgs {
    #[arg(long)]
    desc: PathBuf,
    #[arg(long)]
    n: u32,
    /// Explicit translates: semicolon-separated coordinate tuples, e.g. "0,0;1,0".
    #[arg(long = "F", allow_hyphen_values = true)]
    translates: Option<String>,
    /// Integer translates lifted through the descriptor's homomorphism.
    #[arg(long = "lift-F", allow_hyphen_values = true)]
    lift: Option<String>,
    #[arg(long)]
    radius: u32,
}

/// What a handler hands back to the envelope printer.
struct Outcome {
    command: &'static str,
    /// Canonical JSON of the descriptor the run was about, if any.
    descriptor: Option<String>,
    params: Value,
    result: Value,
    exit: u8,
}

#[derive(Serialize)]
struct RunReport<'a> {
    command: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    descriptor_sha256: Option<String>,
    params: &'a Value,
    budget: &'a Limits,
    result: &'a Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    wall_ms: Option<f64>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let _ = e.print();
            println!("{}", json!({ "error": "usage" }));
            return ExitCode::from(1);
        }
    };
    let mut limits = Limits::default();
    if let Some(b) = cli.budget {
        limits.stream_budget = b;
        limits.max_ball = b;
    }
    let started = Instant::now();
    match dispatch(&cli.cmd, &limits) {
        Ok(out) => {
            let report = RunReport {
                command: out.command,
                descriptor_sha256: out.descriptor.as_deref().map(sha256_hex),
                params: &out.params,
                budget: &limits,
                result: &out.result,
                wall_ms: cli.timing.then(|| started.elapsed().as_secs_f64() * 1e3),
            };
            println!("{}", serde_json::to_string(&report).expect("report serialization"));
            ExitCode::from(out.exit)
        }
        Err(e) => {
            eprintln!("error: {e}");
            println!("{}", json!({ "error": e.to_string() }));
            ExitCode::from(1)
        }
    }
}

fn dispatch(cmd: &Cmd, limits: &Limits) -> Result<Outcome> {
    match cmd {
        Cmd::Encode(a) => encode(a, limits),
        Cmd::Decode(a) => decode(a, limits),
        Cmd::Window(a) => window(a, limits),
        Cmd::Witness(WitnessCmd::Check(a)) => witness_check(a, limits),
        Cmd::Witness(WitnessCmd::Find(a)) => witness_find(a, limits),
        Cmd::Witness(WitnessCmd::Synthesize(a)) => witness_synthesize(a),
        Cmd::Refute(RefuteCmd::CorB { r }) => refute_cor_b(*r),
        Cmd::Uss(UssCmd::Scan(a)) => uss_scan(a, limits),
        Cmd::Uss(UssCmd::Certify(a)) => uss_certify(a, limits),
        Cmd::Construct(ConstructCmd::Gen42(a)) => construct_gen42(a, limits),
        Cmd::Construct(ConstructCmd::CorB(a)) => construct_cor_b(a, limits),
        Cmd::Density(a) => density(a, limits),
        Cmd::Product(a) => product(a, limits),
        Cmd::Lift(LiftCmd::Preimage(a)) => lift_preimage(a, limits),
        Cmd::Lift(LiftCmd::Index(a)) => lift_index(a),
        Cmd::Group(GroupCmd::Density(a)) => group_density_cmd(a, limits),
        Cmd::Group(GroupCmd::Check(a)) => group_check(a, limits),
    }
}

fn encode(a: &EncodeArgs, limits: &Limits) -> Result<Outcome> {
    let desc = read_descriptor(&a.desc)?;
    let eval = desc.compile(limits)?;
    let stream = eval.plus_pair_stream()?;
    let (alpha, beta): (Vec<u64>, Vec<u64>) = stream.pairs(a.pairs)?.into_iter().unzip();
    Ok(Outcome {
        command: "encode",
        descriptor: Some(desc.canonical_json()),
        params: json!({ "pairs": a.pairs }),
        result: json!({ "alpha": alpha, "beta": beta }),
        exit: 0,
    })
}

fn decode(a: &DecodeArgs, limits: &Limits) -> Result<Outcome> {
    let alpha = parse_u64_list(&a.alpha)?;
    let beta = parse_u64_list(&a.beta)?;
    let count = a.count.unwrap_or(alpha.len());
    let tail: TailPolicy = a.tail.into();
    let stream =
        BlockStream::with_budget(FinitePairs::new(alpha.clone(), beta.clone(), tail)?, limits.stream_budget);
    let blocks: Vec<(i64, i64)> = decode_blocks(&stream, count)?
        .into_iter()
        .map(|(l, r)| {
            Ok((
                i64::try_from(l).map_err(|_| Error::OutOfRange("block start exceeds i64".into()))?,
                i64::try_from(r).map_err(|_| Error::OutOfRange("block end exceeds i64".into()))?,
            ))
        })
        .collect::<Result<_>>()?;
    let desc = SetDescriptor::Blocks {
        plus: syndetic::StreamSpec { alpha, beta, tail },
        minus: syndetic::MinusSpec::Finite { finite: vec![] },
    };
    Ok(Outcome {
        command: "decode",
        descriptor: Some(desc.canonical_json()),
        params: json!({ "count": count }),
        result: json!({ "blocks": blocks }),
        exit: 0,
    })
}

fn window(a: &WindowArgs, limits: &Limits) -> Result<Outcome> {
    let desc = read_descriptor(&a.desc)?;
    let eval = desc.compile(limits)?;
    let w = eval.window(a.lo, a.hi)?;
    let count = w.count_members();
    Ok(Outcome {
        command: "window",
        descriptor: Some(desc.canonical_json()),
        params: json!({ "lo": a.lo, "hi": a.hi }),
        result: json!({ "window": w, "count": count }),
        exit: 0,
    })
}

fn witness_check(a: &WitnessCheckArgs, limits: &Limits) -> Result<Outcome> {
    let desc = read_descriptor(&a.desc)?;
    let eval = desc.compile(limits)?;
    let (family, fam_echo) = match (&a.translates, &a.radius) {
        (Some(f), None) => {
            let list = parse_i64_list(f)?;
            (TranslateFamily::list(&list)?, json!({ "F": list }))
        }
        (None, Some(r)) => {
            let radius = BigInt::from_str(r)
                .map_err(|e| Error::Invalid(format!("bad radius {r:?}: {e}")))?;
            (TranslateFamily::interval(radius)?, json!({ "radius": r }))
        }
        _ => unreachable!("clap group enforces exactly one"),
    };
    let report = check_witness(&eval, a.n, &family, a.lo, a.hi)?;
    let exit = if report.verified() { 0 } else { 2 };
    Ok(Outcome {
        command: "witness check",
        descriptor: Some(desc.canonical_json()),
        params: json!({ "n": a.n, "lo": a.lo, "hi": a.hi, "family": fam_echo }),
        result: serde_json::to_value(&report).expect("report is plain data"),
        exit,
    })
}

fn witness_find(a: &WitnessFindArgs, limits: &Limits) -> Result<Outcome> {
    let desc = read_descriptor(&a.desc)?;
    let eval = desc.compile(limits)?;
    let out = find_witness(&eval, a.n, a.lo, a.hi, a.radius)?;
    let exit = match &out {
        syndetic::witness::FindOutcome::Found { .. } => 0,
        syndetic::witness::FindOutcome::Failed { .. } => 2,
    };
    Ok(Outcome {
        command: "witness find",
        descriptor: Some(desc.canonical_json()),
        params: json!({ "n": a.n, "lo": a.lo, "hi": a.hi, "radius": a.radius }),
        result: serde_json::to_value(&out).expect("outcome is plain data"),
        exit,
    })
}

fn witness_synthesize(a: &SynthesizeArgs) -> Result<Outcome> {
    let (cert, descriptor, params) = match (a.k, a.b) {
        (Some(k), None) => {
            let m = a.m.ok_or_else(|| Error::Invalid("--K requires --M".into()))?;
            let desc = SetDescriptor::Construction42 { k, m };
            let cert = Certificate::for_construction42(k, m, a.validate_d)?;
            (
                cert,
                Some(desc.canonical_json()),
                json!({ "K": k, "M": m, "validate_d": a.validate_d, "n_max": a.n_max }),
            )
        }
        (None, Some(b)) => {
            let l = a.l.ok_or_else(|| Error::Invalid("--b requires --L".into()))?;
            (
                Certificate::constant(b, l),
                None,
                json!({ "b": b, "L": l, "n_max": a.n_max }),
            )
        }
        _ => unreachable!("clap group enforces exactly one certificate source"),
    };
    let levels = synthesize_witnesses(&cert, a.n_max)?;
    Ok(Outcome {
        command: "witness synthesize",
        descriptor,
        params,
        result: json!({
            "certificate": serde_json::to_value(&cert).expect("certificate is plain data"),
            "levels": serde_json::to_value(&levels).expect("levels are plain data"),
        }),
        exit: 0,
    })
}

fn refute_cor_b(r: u64) -> Result<Outcome> {
    let refutation = refute_two_syndetic(r)?;
    Ok(Outcome {
        command: "refute corB",
        descriptor: Some(SetDescriptor::CorollaryB.canonical_json()),
        params: json!({ "r": r }),
        result: serde_json::to_value(&refutation).expect("refutation is plain data"),
        exit: 2,
    })
}

fn uss_scan(a: &UssScanArgs, limits: &Limits) -> Result<Outcome> {
    let desc = read_descriptor(&a.desc)?;
    let eval = desc.compile(limits)?;
    let horizons = parse_i64_list(&a.horizons)?;
    let profile = uss_profile(&eval, a.d, &horizons)?;
    Ok(Outcome {
        command: "uss scan",
        descriptor: Some(desc.canonical_json()),
        params: json!({ "D": a.d, "horizons": horizons }),
        result: serde_json::to_value(&profile).expect("profile is plain data"),
        exit: 0,
    })
}

fn uss_certify(a: &UssCertifyArgs, limits: &Limits) -> Result<Outcome> {
    let desc = read_descriptor(&a.desc)?;
    let eval = desc.compile(limits)?;
    let cert = Certificate::constant(a.b, a.l);
    let outcome = certify_descriptor(&eval, &cert, a.d, a.prefix, limits)?;
    let exit = if outcome.passed() { 0 } else { 2 };
    Ok(Outcome {
        command: "uss certify",
        descriptor: Some(desc.canonical_json()),
        params: json!({ "D": a.d, "L": a.l, "b": a.b, "prefix": a.prefix }),
        result: serde_json::to_value(&outcome).expect("outcome is plain data"),
        exit,
    })
}

fn construct_gen42(a: &Gen42Args, limits: &Limits) -> Result<Outcome> {
    let desc = SetDescriptor::Construction42 { k: a.k, m: a.m };
    let result = match a.emit {
        EmitKind::Blocks => {
            let count = a
                .count
                .ok_or_else(|| Error::Invalid("--emit blocks requires --count".into()))?;
            let params = ConstructionParams::new(a.k, a.m)?;
            let stream = BlockStream::with_budget(alpha_source(params), limits.stream_budget);
            let (alpha, beta): (Vec<u64>, Vec<u64>) = stream.pairs(count)?.into_iter().unzip();
            json!({ "alpha": alpha, "beta": beta })
        }
        EmitKind::Window => {
            let radius = a
                .radius
                .ok_or_else(|| Error::Invalid("--emit window requires --radius".into()))?;
            let w = desc.compile(limits)?.window(-radius, radius)?;
            let count = w.count_members();
            json!({ "window": w, "count": count })
        }
    };
    Ok(Outcome {
        command: "construct gen42",
        descriptor: Some(desc.canonical_json()),
        params: json!({ "K": a.k, "M": a.m, "count": a.count, "radius": a.radius }),
        result,
        exit: 0,
    })
}

fn construct_cor_b(a: &CorBArgs, limits: &Limits) -> Result<Outcome> {
    let desc = SetDescriptor::CorollaryB;
    let result = match a.emit {
        EmitKind::Blocks => {
            return Err(Error::Invalid("corB only supports --emit window".into()))
        }
        EmitKind::Window => {
            let radius = a
                .radius
                .ok_or_else(|| Error::Invalid("--emit window requires --radius".into()))?;
            let w = desc.compile(limits)?.window(-radius, radius)?;
            let count = w.count_members();
            json!({ "window": w, "count": count })
        }
    };
    Ok(Outcome {
        command: "construct corB",
        descriptor: Some(desc.canonical_json()),
        params: json!({ "radius": a.radius }),
        result,
        exit: 0,
    })
}

fn density(a: &DensityArgs, limits: &Limits) -> Result<Outcome> {
    let desc = read_descriptor(&a.desc)?;
    let eval = desc.compile(limits)?;
    let d = empirical_density(&eval, a.radius)?;
    Ok(Outcome {
        command: "density",
        descriptor: Some(desc.canonical_json()),
        params: json!({ "radius": a.radius }),
        result: json!({ "density": d, "approx": d.to_f64() }),
        exit: 0,
    })
}

fn product(a: &ProductArgs, limits: &Limits) -> Result<Outcome> {
    let desc = read_descriptor(&a.desc)?;
    let prod = zd_product(desc.clone(), a.d)?;
    let eval = prod.compile(limits)?;
    let result = match (&a.point, a.radius) {
        (Some(p), _) => {
            let point = parse_i64_list(p)?;
            let coords: Vec<i128> = point.iter().map(|&c| i128::from(c)).collect();
            let member = eval.member(&coords)?;
            json!({ "point": point, "member": member })
        }
        (None, Some(radius)) => {
            let d = eval.box_density(radius)?;
            json!({ "radius": radius, "box_density": d, "approx": d.to_f64() })
        }
        (None, None) => {
            return Err(Error::Invalid("product needs --radius or --point".into()))
        }
    };
    Ok(Outcome {
        command: "product",
        descriptor: Some(desc.canonical_json()),
        params: json!({ "d": a.d }),
        result,
        exit: 0,
    })
}

fn lift_preimage(a: &LiftPreimageArgs, limits: &Limits) -> Result<Outcome> {
    let group = parse_group(&a.group)?;
    let images = parse_hom_images(&a.hom, group.generator_count())?;
    let inner = read_descriptor(&a.inner)?;
    let gd = GroupSetDescriptor::Preimage { group, images: images.clone(), inner };
    gd.compile(limits)?; // surjectivity and inner validation
    let hom = GroupHom::new(group, images.clone())?;
    let lift_of_one = hom.lift(1)?;
    let canonical = serde_json::to_string(&gd).expect("descriptor serialization");
    Ok(Outcome {
        command: "lift preimage",
        descriptor: Some(canonical.clone()),
        params: json!({ "group": a.group, "images": images }),
        result: json!({
            "descriptor": serde_json::from_str::<Value>(&canonical).expect("round trip"),
            "lift_of_one": lift_of_one,
        }),
        exit: 0,
    })
}

fn lift_index(a: &LiftIndexArgs) -> Result<Outcome> {
    let base = read_descriptor(&a.desc)?;
    let lifted = finite_index_lift(&base, a.k)?;
    let canonical = lifted.canonical_json();
    Ok(Outcome {
        command: "lift index",
        descriptor: Some(canonical.clone()),
        params: json!({ "k": a.k }),
        result: json!({
            "descriptor": serde_json::from_str::<Value>(&canonical).expect("round trip"),
        }),
        exit: 0,
    })
}

fn group_density_cmd(a: &GroupDensityArgs, limits: &Limits) -> Result<Outcome> {
    let gd = read_group_descriptor(&a.desc)?;
    let gv = gd.compile(limits)?;
    let d = group_density(&gv, a.radius, limits)?;
    Ok(Outcome {
        command: "group density",
        descriptor: Some(serde_json::to_string(&gd).expect("descriptor serialization")),
        params: json!({ "radius": a.radius }),
        result: json!({ "density": d, "approx": d.to_f64() }),
        exit: 0,
    })
}

fn group_check(a: &GroupCheckArgs, limits: &Limits) -> Result<Outcome> {
    let gd = read_group_descriptor(&a.desc)?;
    let gv = gd.compile(limits)?;
    let (translates, fam_echo) = match (&a.translates, &a.lift) {
        (Some(f), None) => {
            let elems = parse_elements(f, gd.group().arity())?;
            let echo = json!({ "F": elems });
            (elems, echo)
        }
        (None, Some(ints)) => {
            let fs = parse_i64_list(ints)?;
            let GroupSetDescriptor::Preimage { group, images, .. } = &gd else {
                return Err(Error::Invalid(
                    "--lift-F needs a preimage descriptor with a homomorphism".into(),
                ));
            };
            let hom = GroupHom::new(*group, images.clone())?;
            let lifted = lift_witness(&hom, &fs)?;
            let echo = json!({ "lift_F": fs, "F": lifted });
            (lifted, echo)
        }
        _ => unreachable!("clap group enforces exactly one"),
    };
    let report = check_witness_group(&gv, a.n, &translates, a.radius, limits)?;
    let exit = if report.verified() { 0 } else { 2 };
    Ok(Outcome {
        command: "group check",
        descriptor: Some(serde_json::to_string(&gd).expect("descriptor serialization")),
        params: json!({ "n": a.n, "radius": a.radius, "family": fam_echo }),
        result: serde_json::to_value(&report).expect("report is plain data"),
        exit,
    })
}

fn read_descriptor(path: &Path) -> Result<SetDescriptor> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Invalid(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| Error::Invalid(format!("bad descriptor in {}: {e}", path.display())))
}

fn read_group_descriptor(path: &Path) -> Result<GroupSetDescriptor> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Invalid(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| Error::Invalid(format!("bad group descriptor in {}: {e}", path.display())))
}

fn sha256_hex(s: &str) -> String {
    let digest = Sha256::digest(s.as_bytes());
    let mut hex = String::with_capacity(64);
    for b in digest {
        hex.push_str(&format!("{b:02x}"));
    }
    hex
}

fn parse_i64_list(s: &str) -> Result<Vec<i64>> {
    s.split(',')
        .map(|p| p.trim().parse().map_err(|e| Error::Invalid(format!("bad integer {p:?}: {e}"))))
        .collect()
}

fn parse_u64_list(s: &str) -> Result<Vec<u64>> {
    s.split(',')
        .map(|p| p.trim().parse().map_err(|e| Error::Invalid(format!("bad integer {p:?}: {e}"))))
        .collect()
}

/// "0,0;1,0" -> [[0,0],[1,0]], each tuple checked against the group arity.
fn parse_elements(s: &str, arity: usize) -> Result<Vec<Vec<i64>>> {
    s.split(';')
        .map(|tuple| {
            let coords = parse_i64_list(tuple)?;
            if coords.len() != arity {
                return Err(Error::Invalid(format!(
                    "element {tuple:?} has {} coordinates, expected {arity}",
                    coords.len()
                )));
            }
            Ok(coords)
        })
        .collect()
}

fn parse_group(s: &str) -> Result<Group> {
    if s == "heisenberg" {
        return Ok(Group::Heisenberg);
    }
    if let Some(rest) = s.strip_prefix('z') {
        let rank: usize = if rest.is_empty() {
            1
        } else {
            rest.parse().map_err(|e| Error::Invalid(format!("bad group rank {rest:?}: {e}")))?
        };
        let g = Group::FreeAbelian { rank };
        g.validate()?;
        return Ok(g);
    }
    Err(Error::Invalid(format!("unknown group {s:?} (expected z<rank> or heisenberg)")))
}

/// "x=1,y=0" or "1,0" -> generator images in generator order.
fn parse_hom_images(s: &str, count: usize) -> Result<Vec<i64>> {
    let names = ["x", "y", "z", "w", "v", "u", "t", "s"];
    let mut images = Vec::new();
    for (i, part) in s.split(',').enumerate() {
        let part = part.trim();
        let value = match part.split_once('=') {
            Some((name, v)) => {
                if i >= names.len() || name.trim() != names[i] {
                    return Err(Error::Invalid(format!(
                        "generator {i} must be named {:?}, got {name:?}",
                        names.get(i).copied().unwrap_or("?")
                    )));
                }
                v.trim()
            }
            None => part,
        };
        images.push(
            value
                .parse()
                .map_err(|e| Error::Invalid(format!("bad generator image {value:?}: {e}")))?,
        );
    }
    if images.len() != count {
        return Err(Error::Invalid(format!(
            "homomorphism needs {count} generator images, got {}",
            images.len()
        )));
    }
    Ok(images)
}
