//! `tfm`: command-line front end for toric foliated Mori theory.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};
use tfm_core::cohomology::{kodaira_check_capped, weil_cohomology_capped};
use tfm_core::divisor::{ClassSpace, MAX_SCAN_CELLS};
use tfm_core::fan::build_split_bundle;
use tfm_core::io::{self, format_rat};
use tfm_core::lattice::IntVector;
use tfm_core::moricone::{self, BundleDetection};
use tfm_core::{run_mmp, Error, Fan, FoliatedPair, FoliationSubspace, Int, Rat, TorusDivisor};

#[derive(Parser)]
#[command(name = "tfm", version, about = "Exact toric Mori theory for foliated pairs")]
struct Cli {
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct FanArg {
    /// Fan file: {"dim", "rays", "cones"}.
    #[arg(long)]
    fan: PathBuf,
}

#[derive(Args)]
struct PairArgs {
    #[command(flatten)]
    fan: FanArg,
    /// Pair file: {"subspace": [[..]], "delta": {"i": "p/q"}}.
    #[arg(long)]
    pair: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Check the fan axioms and list every violation.
    Validate(FanArg),
    /// Basic invariants of a fan.
    Info(FanArg),
    /// Small Q-factorialization by pulling triangulations.
    Qfact(FanArg),
    /// Extremal rays of NE(X), with lengths when a pair is given.
    Mori {
        #[command(flatten)]
        fan: FanArg,
        #[arg(long)]
        pair: Option<PathBuf>,
    },
    /// Check the length bound and the bundle dichotomy on every ray.
    ConeCheck(PairArgs),
    /// Projective-bundle structures of the fiber-type extremal contractions.
    Bundle {
        #[command(flatten)]
        fan: FanArg,
        #[arg(long)]
        pair: Option<PathBuf>,
    },
    /// Fujita-type freeness for an ample Cartier divisor A.
    Fujita {
        #[command(flatten)]
        pair: PairArgs,
        /// A as a divisor file.
        #[arg(long)]
        divisor: PathBuf,
    },
    /// h^i(X, O(L)) for a torus-invariant Weil divisor L.
    Cohomology {
        #[command(flatten)]
        fan: FanArg,
        /// L as a divisor file: {"coeffs": [..]}.
        #[arg(long)]
        divisor: PathBuf,
        /// Scan weights with |m_j| <= BOX.
        #[arg(long = "box")]
        scan_box: Option<i64>,
    },
    /// Vanishing of h^i(O(L)), i >= 1, when L - (K_F+Δ) is ample.
    Kodaira {
        #[command(flatten)]
        pair: PairArgs,
        /// L as a divisor file.
        #[arg(long)]
        divisor: PathBuf,
        /// Scan weights with |m_j| <= BOX.
        #[arg(long = "box")]
        scan_box: Option<i64>,
    },
    /// Discrepancy of the divisor over a primitive vector w, or the
    /// log canonical status when w is omitted.
    Discrepancy {
        #[command(flatten)]
        pair: PairArgs,
        /// Comma-separated coordinates, e.g. 1,1.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        w: Option<Vec<i64>>,
    },
    /// Run the MMP for K_F+Δ.
    Mmp {
        #[command(flatten)]
        pair: PairArgs,
        /// Give up after this many steps.
        #[arg(long, default_value_t = 20)]
        max_steps: usize,
    },
    /// Split projective bundle over a base fan from lifting functions.
    BuildBundle {
        /// Base fan file.
        #[command(flatten)]
        fan: FanArg,
        /// One lifting function per bundle summand, as values on the base
        /// rays: "0,1;0,0".
        #[arg(long, allow_hyphen_values = true)]
        h: String,
    },
}

/// A command outcome: the report and whether every assertion held.
struct Report {
    ok: bool,
    json: Value,
    text: String,
}

impl Report {
    fn new(ok: bool, json: Value, text: String) -> Self {
        Report { ok, json, text }
    }
}

enum Failure {
    Usage(String),
    Math(String),
    /// Assertion failed with a partial report.
    Partial(Report),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse { .. }
            | Error::InvalidFan(_)
            | Error::DimensionMismatch { .. }
            | Error::InvalidSubspace(_)
            | Error::NotEffective(_)
            | Error::ZeroVector => Failure::Usage(e.to_string()),
            other => Failure::Math(other.to_string()),
        }
    }
}

type Outcome = Result<Report, Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn load_fan(a: &FanArg) -> Result<Fan, Failure> {
    Ok(io::parse_fan(&read(&a.fan)?)?)
}

fn load_pair(a: &PairArgs) -> Result<FoliatedPair, Failure> {
    let fan = load_fan(&a.fan)?;
    Ok(io::parse_pair(&read(&a.pair)?, &fan)?)
}

fn load_divisor(path: &Path, fan: &Fan) -> Result<TorusDivisor, Failure> {
    Ok(io::parse_divisor(&read(path)?, fan.num_rays())?)
}

fn max_cells() -> Result<u128, Failure> {
    match std::env::var("TFM_MAX_CELLS") {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Failure::Usage(format!("TFM_MAX_CELLS must be a positive integer, got {v:?}"))),
        Err(_) => Ok(MAX_SCAN_CELLS),
    }
}

macro_rules! to_json {
    ($x:expr) => {
        serde_json::to_value($x).expect("reports serialize")
    };
}

fn vec_str<T: std::fmt::Display>(v: &[T]) -> String {
    let parts: Vec<String> = v.iter().map(ToString::to_string).collect();
    format!("({})", parts.join(","))
}

fn validate(a: &FanArg) -> Outcome {
    let fan = load_fan(a)?;
    let rep = fan.validate();
    let violations: Vec<String> = rep.violations.iter().map(ToString::to_string).collect();
    let mut text = if rep.is_valid() {
        "valid fan\n".to_string()
    } else {
        format!("{} violation(s)\n", violations.len())
    };
    for v in &violations {
        let _ = writeln!(text, "  {v}");
    }
    Ok(Report::new(rep.is_valid(), json!({ "valid": rep.is_valid(), "violations": violations }), text))
}

fn info(a: &FanArg) -> Outcome {
    let fan = load_fan(a)?;
    let complete = fan.is_complete();
    let projective = if complete { Some(fan.is_projective()?) } else { None };
    let picard = if complete && fan.is_simplicial() {
        Some(ClassSpace::new(&fan)?.rank())
    } else {
        None
    };
    let j = json!({
        "dim": fan.dim(),
        "rays": fan.num_rays(),
        "cones": fan.cones().len(),
        "valid": fan.validate().is_valid(),
        "complete": complete,
        "simplicial": fan.is_simplicial(),
        "smooth": fan.is_smooth(),
        "projective": projective,
        "picard_rank": picard,
    });
    let mut text = String::new();
    for (k, v) in j.as_object().unwrap() {
        let _ = writeln!(text, "{k}: {v}");
    }
    Ok(Report::new(true, j, text))
}

fn qfact(a: &FanArg) -> Outcome {
    let fan = load_fan(a)?;
    let q = fan.qfactorialize()?;
    let ok = q.margin.as_ref().is_none_or(|m| *m > Rat::from_integer(Int::from(0)));
    let j = json!({
        "fan": io::fan_to_json(&q.fan),
        "cone_map": q.cone_map,
        "certificate": io::divisor_to_json(&q.certificate),
        "margin": q.margin.as_ref().map(format_rat),
    });
    let text = format!(
        "{} cones -> {} simplicial cones; certificate margin {}\n{}\n",
        fan.cones().len(),
        q.fan.cones().len(),
        q.margin.as_ref().map_or("n/a".into(), format_rat),
        io::fan_to_json(&q.fan)
    );
    Ok(Report::new(ok, j, text))
}

fn mori(a: &FanArg, pair: Option<&Path>) -> Outcome {
    let fan = load_fan(a)?;
    let mc = moricone::mori_cone(&fan)?;
    let pair = match pair {
        Some(p) => Some(io::parse_pair(&read(p)?, &fan)?),
        None => None,
    };
    let mut rays = Vec::new();
    let mut text = format!("NE(X): {} extremal ray(s), Picard rank {}\n", mc.rays().len(), mc.space().rank());
    for (k, r) in mc.rays().iter().enumerate() {
        let c = mc.contraction(k)?;
        let walls: Vec<Vec<usize>> = r.walls.iter().map(|&t| mc.classes()[t].wall.rays.clone()).collect();
        let length = match &pair {
            Some(p) => Some(moricone::ray_length(p, &mc, k)?),
            None => None,
        };
        let _ = writeln!(
            text,
            "  ray {} {}: kind {}, walls {:?}{}",
            k,
            vec_str(&r.generator),
            c.kind,
            walls,
            length.as_ref().map_or(String::new(), |l| format!(", length {l}"))
        );
        rays.push(json!({
            "generator": r.generator.iter().map(|x| i64::try_from(x).map(Value::from).unwrap_or_else(|_| x.to_string().into())).collect::<Vec<_>>(),
            "walls": walls,
            "kind": c.kind,
            "length": length.as_ref().map(format_rat),
        }));
    }
    Ok(Report::new(true, json!({ "rank": mc.space().rank(), "rays": rays }), text))
}

fn cone_check(a: &PairArgs) -> Outcome {
    let pair = load_pair(a)?;
    let rep = moricone::check_cone_theorem(&pair)?;
    let mut text = format!("rank r = {}; bound l(R) <= r+1: {}; dichotomy: {}\n", rep.rank, rep.bound_ok, rep.dichotomy_ok);
    for r in &rep.rays {
        let _ = writeln!(text, "  ray {}: length {}, kind {}{}", vec_str(&r.generator), r.length, r.kind, match &r.bundle {
            Some(b) if b.ok() => " (P^r-bundle, F = T_X/Y)".to_string(),
            Some(b) => format!(" (dichotomy fails: {})", b.reason.clone().unwrap_or_default()),
            None => String::new(),
        });
    }
    Ok(Report::new(rep.ok(), to_json!(&rep), text))
}

fn bundle(a: &FanArg, pair: Option<&Path>) -> Outcome {
    let fan = load_fan(a)?;
    let subspace: Option<FoliationSubspace> = match pair {
        Some(p) => Some(io::parse_pair(&read(p)?, &fan)?.subspace().clone()),
        None => None,
    };
    let mc = moricone::mori_cone(&fan)?;
    let mut out = Vec::new();
    let mut text = String::new();
    for (k, r) in mc.rays().iter().enumerate() {
        let c = mc.contraction(k)?;
        if c.kind != moricone::ContractionKind::Fiber {
            continue;
        }
        let entry = match moricone::detect_pr_bundle(&fan, &c)? {
            BundleDetection::Bundle(b) => {
                let tangent = subspace.as_ref().map(|v| moricone::relative_tangent_check(&fan, v, &b));
                let degrees = b.normalized_degrees();
                let _ = writeln!(
                    text,
                    "ray {}: P^{}-bundle over a {}-dimensional base, fiber rays {:?}{}{}",
                    vec_str(&r.generator),
                    b.rank(),
                    b.base.dim(),
                    b.fiber_rays,
                    degrees.as_ref().map_or(String::new(), |d| format!(", degrees {}", vec_str(d))),
                    tangent.map_or(String::new(), |t| format!(", tangent {t:?}"))
                );
                json!({
                    "ray": k,
                    "bundle": true,
                    "rank": b.rank(),
                    "fiber_rays": b.fiber_rays,
                    "base": io::fan_to_json(&b.base),
                    "lift_functions": b.lift_functions,
                    "degrees": degrees.map(|d| d.iter().map(ToString::to_string).collect::<Vec<_>>()),
                    "tangent": tangent,
                })
            }
            BundleDetection::NotBundle(why) => {
                let _ = writeln!(text, "ray {}: not a bundle ({why})", vec_str(&r.generator));
                json!({ "ray": k, "bundle": false, "reason": why })
            }
        };
        out.push(entry);
    }
    if out.is_empty() {
        text.push_str("no fiber-type extremal contraction\n");
    }
    Ok(Report::new(true, json!({ "rays": out }), text))
}

fn fujita(a: &PairArgs, d: &Path) -> Outcome {
    let pair = load_pair(a)?;
    let amp = load_divisor(d, pair.fan())?;
    let rep = moricone::fujita_report(&pair, &amp)?;
    let mut text = format!(
        "K_F+Δ+(r+1)A nef: {} (Cartier: {})\nK_F+rA nef: {}; exceptions verified: {}\n",
        rep.generic_nef, rep.generic_cartier, rep.improved_nef, rep.improved_ok
    );
    for e in &rep.exceptions {
        let _ = writeln!(text, "  exception on ray {}: bundle {}, A·l = {}, verified {}", vec_str(&e.ray), e.bundle, e.a_dot_line, e.verified);
    }
    if let Some(v) = &rep.very_ample {
        let _ = writeln!(text, "K_F+(r+2)A ample: {}; very ampleness checks: {}", v.r_plus_two_ample, v.ok);
    }
    Ok(Report::new(rep.ok(), to_json!(&rep), text))
}

fn cohomology(a: &FanArg, d: &Path, scan_box: Option<i64>) -> Outcome {
    let fan = load_fan(a)?;
    let l = load_divisor(d, &fan)?;
    let rep = weil_cohomology_capped(&fan, &l, scan_box, max_cells()?)?;
    let text = format!("h = {:?} (box {})\n", rep.h, rep.scan_box);
    Ok(Report::new(true, json!({ "h": rep.h, "box": rep.scan_box, "hypothesis": Value::Null }), text))
}

fn kodaira(a: &PairArgs, d: &Path, scan_box: Option<i64>) -> Outcome {
    let pair = load_pair(a)?;
    let l = load_divisor(d, pair.fan())?;
    match kodaira_check_capped(&pair, &l, scan_box, max_cells()?) {
        Ok(rep) => {
            let text = format!(
                "h = {:?} (box {}, stable {}); hypothesis ok, klt perturbation ε = {}; vanishing {}\n",
                rep.h, rep.scan_box, rep.box_stable, rep.hypothesis.epsilon, rep.vanishing
            );
            Ok(Report::new(rep.ok(), to_json!(&rep), text))
        }
        Err(Error::Hypothesis(why)) => Err(Failure::Partial(Report::new(
            false,
            json!({ "h": Value::Null, "box": Value::Null, "hypothesis": { "ample": false, "reason": why } }),
            format!("hypothesis not satisfied: {why}; no vanishing asserted\n"),
        ))),
        Err(e) => Err(e.into()),
    }
}

fn discrepancy(a: &PairArgs, w: Option<&[i64]>) -> Outcome {
    let pair = load_pair(a)?;
    match w {
        Some(w) => {
            let w = IntVector(w.to_vec());
            let x = pair.discrepancy(&w)?;
            let check = pair.discrepancy_via_subdivision(&w)?;
            let ok = check == x.a;
            let text = format!("a(E_w) = {}, ι = {} (subdivision check {})\n", x.a, x.iota, if ok { "agrees" } else { "DISAGREES" });
            Ok(Report::new(ok, json!({ "w": w.0, "a": format_rat(&x.a), "iota": x.iota, "subdivision_agrees": ok }), text))
        }
        None => {
            let status = pair.log_canonical_status();
            let witness = pair.find_discrepancy_witness();
            let lc = status.is_ok();
            let mut text = match &status {
                Ok(()) => "log canonical\n".to_string(),
                Err(e) => format!("not log canonical: {e}\n"),
            };
            if let Some((w, x)) = &witness {
                let _ = writeln!(text, "witness w = {w}: a = {}, ι = {}", x.a, x.iota);
            }
            let j = json!({
                "log_canonical": lc,
                "failure": status.err().map(|e| e.to_string()),
                "witness": witness.map(|(w, x)| json!({ "w": w.0, "a": format_rat(&x.a), "iota": x.iota })),
            });
            Ok(Report::new(lc, j, text))
        }
    }
}

fn mmp(a: &PairArgs, max_steps: usize) -> Outcome {
    let pair = load_pair(a)?;
    let describe = |t: &tfm_core::MmpTrace| {
        let mut text = String::new();
        for (i, s) in t.steps.iter().enumerate() {
            let _ = writeln!(text, "step {}: {:?} on ray {}, length {}, {} rays after", i + 1, s.kind, vec_str(&s.ray), s.length, s.rays_after);
        }
        text
    };
    match run_mmp(&pair, max_steps) {
        Ok(t) => {
            let mut text = describe(&t);
            let _ = writeln!(text, "terminal: {:?}", t.terminal.expect("finished trace"));
            let mut j = to_json!(&t);
            if let Some(last) = &t.last {
                j["final"] = json!({ "fan": io::fan_to_json(last.fan()), "pair": io::pair_to_json(last) });
            }
            Ok(Report::new(true, j, text))
        }
        Err(Error::StepLimit { trace }) => {
            let text = format!("{}no terminal model within {max_steps} steps\n", describe(&trace));
            Err(Failure::Partial(Report::new(false, to_json!(&*trace), text)))
        }
        Err(e) => Err(e.into()),
    }
}

fn build_bundle(a: &FanArg, h: &str) -> Outcome {
    let base = load_fan(a)?;
    let lifts: Vec<Vec<i64>> = h
        .split(';')
        .map(|part| {
            part.split(',')
                .map(|x| x.trim().parse::<i64>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|_| Failure::Usage(format!("--h: bad lifting function {part:?}")))
        })
        .collect::<Result<_, _>>()?;
    let fan = build_split_bundle(&base, &lifts)?;
    let j = io::fan_to_json(&fan);
    Ok(Report::new(true, j.clone(), format!("{j}\n")))
}

fn dispatch(cmd: &Command) -> Outcome {
    match cmd {
        Command::Validate(a) => validate(a),
        Command::Info(a) => info(a),
        Command::Qfact(a) => qfact(a),
        Command::Mori { fan, pair } => mori(fan, pair.as_deref()),
        Command::ConeCheck(a) => cone_check(a),
        Command::Bundle { fan, pair } => bundle(fan, pair.as_deref()),
        Command::Fujita { pair, divisor } => fujita(pair, divisor),
        Command::Cohomology { fan, divisor, scan_box } => cohomology(fan, divisor, *scan_box),
        Command::Kodaira { pair, divisor, scan_box } => kodaira(pair, divisor, *scan_box),
        Command::Discrepancy { pair, w } => discrepancy(pair, w.as_deref()),
        Command::Mmp { pair, max_steps } => mmp(pair, *max_steps),
        Command::BuildBundle { fan, h } => build_bundle(fan, h),
    }
}

fn emit(r: &Report, as_json: bool) {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    // a closed pipe is not an error for a report
    let _ = if as_json {
        writeln!(out, "{}", serde_json::to_string_pretty(&r.json).expect("json"))
    } else {
        write!(out, "{}", r.text)
    };
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(&cli.command) {
        Ok(r) => {
            emit(&r, cli.json);
            ExitCode::from(if r.ok { 0 } else { 1 })
        }
        Err(Failure::Partial(r)) => {
            emit(&r, cli.json);
            ExitCode::from(1)
        }
        Err(Failure::Math(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
    }
}
