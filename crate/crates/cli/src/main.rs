use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Map, Value};

use perindex::covers::{crosscheck_cor214, deck_action_on_cohomology, lambda_cohomology, mapping_torus_family, seifert_presentation};
use perindex::equivariant::{Equivariant, Point};
use perindex::json::{parse, ComplexJson, FamilyJson, LambdaJson, MappingTorusJson, OperatorFamilyJson, SCHEMA};
use perindex::knotcalc::{
    alexander_poly, furuta_ohta_mapping_torus, levine_tristram, mapping_torus_signature, normalize_all, parse_rational,
    singular_fo_mapping_torus, surgery_predict, surgery_signature_delta, thm16_consistency, MappingTorusSpec,
    SeifertMatrix,
};
use perindex::resolvent::{homotopy_resolvent, local_meromorphic_resolvent, residual_check};
use perindex::specflow::{periodic_spectral_flow, DEFAULT_EPS1};
use perindex::verify::{covering_strip, run_suite, Suite};
use perindex::{Error, GaussianRational, Mode, RunConfig};

#[derive(Parser)]
#[command(name = "perindex", version, about = "Spectral sets, equivariant cohomology, index jumps and knot signatures")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol_rank: f64,
    #[arg(long, global = true, default_value_t = 1e-8)]
    tol_root: f64,
    #[arg(long, global = true, default_value = "exact", value_parser = parse_mode)]
    mode: Mode,
    #[arg(long, global = true, default_value_t = 1)]
    parallelism: usize,
}

fn parse_mode(s: &str) -> Result<Mode, String> {
    match s {
        "exact" => Ok(Mode::Exact),
        "float" => Ok(Mode::Float),
        _ => Err(format!("unknown mode {s}; expected exact or float")),
    }
}

#[derive(Subcommand)]
enum Command {
    /// Generic ranks, defect polynomial and spectral points of a family.
    SpectralSet {
        #[arg(long)]
        input: PathBuf,
    },
    /// Equivariant cohomology at a point.
    Hhat {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        z: String,
    },
    /// Signed count of equivariant Euler characteristics over a strip.
    IndexJump {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, num_args = 2, allow_hyphen_values = true, value_names = ["A", "B"])]
        strip: Vec<f64>,
    },
    /// Total equivariant Euler characteristic.
    TildeH {
        #[arg(long)]
        input: PathBuf,
    },
    /// Local Laurent expansion of the resolvent, or a chain homotopy of an
    /// acyclic complex when `--z0` is absent.
    Resolvent {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        z0: Option<String>,
        #[arg(long, default_value_t = 2)]
        order: usize,
    },
    /// Mapping-torus models.
    Cover {
        #[command(subcommand)]
        command: CoverCommand,
    },
    /// Torsion decomposition of a complex over Laurent polynomials.
    AlexanderModule {
        #[arg(long, conflicts_with = "seifert")]
        input: Option<PathBuf>,
        #[arg(long)]
        seifert: Option<PathBuf>,
    },
    /// Knot invariants from a Seifert matrix.
    Knot {
        #[command(subcommand)]
        command: KnotCommand,
    },
    /// Periodic spectral flow of an operator family.
    Specflow {
        #[arg(long)]
        family: PathBuf,
        #[arg(long, default_value_t = DEFAULT_EPS1)]
        eps1: f64,
    },
    /// Seeded verification suite: cor214, resolvent, specflow-jump, knot-identities.
    Verify {
        suite: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 10)]
        count: usize,
    },
}

#[derive(Subcommand)]
enum CoverCommand {
    /// Compare equivariant cohomology with the deck action's eigenspaces.
    Crosscheck {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, num_args = 2, allow_hyphen_values = true, value_names = ["A", "B"])]
        strip: Option<Vec<f64>>,
    },
    /// Induced deck action on cohomology with Jordan data.
    Deck {
        #[arg(long)]
        input: PathBuf,
    },
}

#[derive(Subcommand)]
enum KnotCommand {
    Alexander {
        #[arg(long)]
        seifert: PathBuf,
    },
    Sig {
        #[arg(long)]
        seifert: PathBuf,
        #[arg(long)]
        omega: String,
    },
    MappingTorus {
        #[arg(long)]
        seifert: PathBuf,
        #[arg(long)]
        n: u32,
        #[arg(long)]
        alpha: String,
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        casson: String,
    },
    Surgery {
        #[arg(long, allow_hyphen_values = true)]
        q: i64,
        #[arg(long, allow_hyphen_values = true)]
        lambda_x: String,
        #[arg(long, allow_hyphen_values = true)]
        lambda_x0: String,
        #[arg(long, allow_hyphen_values = true)]
        d0: Option<String>,
    },
    /// Holonomy parameters on the sheets of the n-fold cover.
    Normalize {
        #[arg(long)]
        alpha: String,
        #[arg(long)]
        n: i64,
    },
}

fn read(path: &Path) -> Result<String, Error> {
    std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn load<T: for<'de> serde::Deserialize<'de>>(path: &Path) -> Result<T, Error> {
    parse(&read(path)?)
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("reports serialise")
}

fn point(s: &str) -> Result<Point, Error> {
    Ok(Point::Exact(s.parse::<GaussianRational>()?))
}

fn strip_of(v: &[f64]) -> (f64, f64) {
    (v[0], v[1])
}

fn run(cmd: Command, cfg: &RunConfig) -> Result<Value, Error> {
    cfg.validate()?;
    match cmd {
        Command::SpectralSet { input } => {
            let fam = load::<FamilyJson>(&input)?.build()?;
            let s = perindex::complexes::spectral_set(&fam, cfg.tol_root)?;
            let points: Vec<Value> = s
                .points
                .iter()
                .map(|p| json!({"z": p.label(), "approx": [p.root.approx.re, p.root.approx.im], "mult": p.multiplicity, "orders": p.orders}))
                .collect();
            Ok(json!({
                "delta": s.delta.pretty("z"),
                "delta_coeffs": s.delta,
                "generic_ranks": s.generic_ranks,
                "degree_factors": s.degree_factors.iter().map(|p| p.pretty("z")).collect::<Vec<_>>(),
                "points": points,
            }))
        }
        Command::Hhat { input, z } => {
            let fam = load::<FamilyJson>(&input)?.build()?;
            Ok(to_value(&Equivariant::new(&fam, cfg)?.at(&point(&z)?)?))
        }
        Command::IndexJump { input, strip } => {
            let fam = load::<FamilyJson>(&input)?.build()?;
            let (a, b) = strip_of(&strip);
            Ok(to_value(&Equivariant::new(&fam, cfg)?.index_jump_report(a, b)?))
        }
        Command::TildeH { input } => {
            let fam = load::<FamilyJson>(&input)?.build()?;
            Ok(json!({"tilde_h": Equivariant::new(&fam, cfg)?.tilde_h()?}))
        }
        Command::Resolvent { input, z0, order } => match z0 {
            Some(z0) => {
                let fam = load::<FamilyJson>(&input)?.build()?;
                let z0: GaussianRational = z0.parse()?;
                let res = local_meromorphic_resolvent(&fam, &z0, order, cfg)?;
                let check = residual_check(&fam, &res, 5, cfg)?;
                Ok(json!({"resolvent": res, "residual_check": check}))
            }
            None => {
                let c = load::<ComplexJson>(&input)?.build()?;
                Ok(json!({"homotopy": homotopy_resolvent(&c, cfg.tol_rank)?}))
            }
        },
        Command::Cover { command } => match command {
            CoverCommand::Crosscheck { input, strip } => {
                let model = load::<MappingTorusJson>(&input)?.build()?;
                let strip = match strip {
                    Some(s) => strip_of(&s),
                    None => covering_strip(&mapping_torus_family(&model), cfg)?,
                };
                Ok(to_value(&crosscheck_cor214(&model, strip, cfg)?))
            }
            CoverCommand::Deck { input } => {
                let model = load::<MappingTorusJson>(&input)?.build()?;
                Ok(json!({"degrees": deck_action_on_cohomology(&model, cfg)?}))
            }
        },
        Command::AlexanderModule { input, seifert } => {
            let l = match (input, seifert) {
                (Some(p), None) => load::<LambdaJson>(&p)?.build()?,
                (None, Some(p)) => seifert_presentation(&load::<SeifertMatrix>(&p)?.to_exact()),
                _ => return Err(Error::Parse("pass exactly one of --input or --seifert".into())),
            };
            Ok(to_value(&lambda_cohomology(&l, cfg.tol_root)?))
        }
        Command::Knot { command } => knot(command, cfg),
        Command::Specflow { family, eps1 } => {
            let f = load::<OperatorFamilyJson>(&family)?.build()?;
            Ok(to_value(&periodic_spectral_flow(&f, eps1, cfg.tol_root)?))
        }
        Command::Verify { suite, seed, count } => {
            let suite: Suite = suite.parse()?;
            Ok(to_value(&run_suite(suite, seed, count, cfg)?))
        }
    }
}

fn knot(cmd: KnotCommand, cfg: &RunConfig) -> Result<Value, Error> {
    match cmd {
        KnotCommand::Alexander { seifert } => {
            let p = alexander_poly(&load(&seifert)?);
            Ok(json!({"alexander": p.pretty("t"), "coeffs": p}))
        }
        KnotCommand::Sig { seifert, omega } => {
            let v: SeifertMatrix = load(&seifert)?;
            let x = parse_rational(&omega)?;
            let s = levine_tristram(&v, &x, cfg)?;
            Ok(json!({"omega": x.to_string(), "signature": s.signature, "nullity": s.nullity, "jump_point": s.jump_point}))
        }
        KnotCommand::MappingTorus { seifert, n, alpha, casson } => {
            let spec = MappingTorusSpec::new(n, parse_rational(&alpha)?, parse_rational(&casson)?, load(&seifert)?)?;
            let fo = furuta_ohta_mapping_torus(n, &spec.casson, &spec.seifert, cfg)?;
            Ok(json!({
                "n": n,
                "alpha": spec.alpha.to_string(),
                "signature": mapping_torus_signature(&spec, cfg)?,
                "furuta_ohta": fo.to_string(),
                "singular_fo": singular_fo_mapping_torus(&spec, cfg)?.to_string(),
                "consistency": thm16_consistency(&spec, cfg)?,
            }))
        }
        KnotCommand::Surgery { q, lambda_x, lambda_x0, d0 } => {
            let lx = parse_rational(&lambda_x)?;
            let lx0 = parse_rational(&lambda_x0)?;
            let mut out = Map::new();
            out.insert("predicted".into(), json!(surgery_predict(&lx, &lx0, q).to_string()));
            if let Some(d0) = d0 {
                out.insert("signature_delta".into(), json!(surgery_signature_delta(&lx0, &parse_rational(&d0)?, q).to_string()));
            }
            Ok(Value::Object(out))
        }
        KnotCommand::Normalize { alpha, n } => {
            let all = normalize_all(&parse_rational(&alpha)?, n)?;
            Ok(json!({"normalized": all.iter().map(|a| a.to_string()).collect::<Vec<_>>()}))
        }
    }
}

fn emit(mut v: Value) {
    if let Value::Object(m) = &mut v {
        m.insert("schema".into(), json!(SCHEMA));
    }
    let text = serde_json::to_string_pretty(&v).expect("valid JSON");
    // A closed pipe downstream is not an error of ours.
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    let g = cli.global;
    let cfg = RunConfig { tol_rank: g.tol_rank, tol_root: g.tol_root, mode: g.mode, parallelism: g.parallelism };
    match run(cli.command, &cfg) {
        Ok(v) => {
            emit(v);
            ExitCode::SUCCESS
        }
        Err(e) => {
            emit(json!({"error": {"code": e.code(), "message": e.to_string()}}));
            ExitCode::from(if e.is_input_error() { 1 } else { 2 })
        }
    }
}
