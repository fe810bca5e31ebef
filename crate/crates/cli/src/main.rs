//! cohodyn: exact intersection-theoretic dynamics at the command line.
//!
//! Commands operate on a persistent workspace directory (definition files
//! in TOML/JSON/text). Output is a human-readable report followed, where a
//! verdict is involved, by a single machine-readable JSON line.
//!
//! Exit codes: 0 success, 2 resolution/definition error, 3 capability
//! error (missing data the user must supply), 4 numerical error.

mod workspace;

use clap::{Args, Parser, Subcommand};
use cohodyn_core::cohomology::{
    blowup_points_named, expr::parse_class, positivity_obstruction, product_model, ModelFile,
    Positivity,
};
use cohodyn_core::dynamics::{
    self, applicability_check_series, dynamical_degree, invariant_class_cesaro,
    invariant_class_eigen, siu_pullback, stability_check, ComparisonVerdict, LedgerFile,
    SeriesApplicability, StabilityVerdict,
};
use cohodyn_core::error::CoreError;
use cohodyn_core::green::{
    extracted_invariant_current, green_potential, grid_csv, halton_sphere, lelong_estimate,
    product_invariant_current, GreenParams,
};
use cohodyn_core::maps::{builtin, MapFile};
use cohodyn_core::monomial::{degree_sequence, parse_lift_text};
use cohodyn_core::scalar::{format_rat, parse_rat};
use cohodyn_core::{Rat, RatMatrix, C64};
use serde_json::json;
use std::collections::BTreeMap;
use std::path::PathBuf;
use workspace::Workspace;

#[derive(Parser)]
#[command(
    name = "cohodyn",
    about = "Exact cohomology-level dynamics of dominant meromorphic maps",
    version
)]
struct Cli {
    /// Workspace directory (created if absent)
    #[arg(long, global = true, default_value = "cohodyn_ws")]
    workspace: PathBuf,
    /// Override the certification tolerance (a rational like 1/1000000)
    #[arg(long, global = true)]
    tol: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Manifold models: blowups, products, pairings
    #[command(subcommand)]
    Manifold(ManifoldCmd),
    /// Map models: builtins, pullbacks, duality, stability, degrees
    #[command(subcommand)]
    Map(MapCmd),
    /// Dynamical degrees, invariant classes, Siu ledgers
    #[command(subcommand)]
    Dynamics(DynamicsCmd),
    /// Green potentials, extracted currents, Lelong estimation
    #[command(subcommand)]
    Green(GreenCmd),
}

#[derive(Subcommand)]
enum ManifoldCmd {
    /// Create the blowup of P^dim at generic points
    NewBlowup {
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        points: usize,
        #[arg(long)]
        name: String,
        /// Comma-separated point name suffixes (default 0,1,2,...)
        #[arg(long)]
        point_names: Option<String>,
    },
    /// Create the Künneth product of two stored manifolds
    NewProduct {
        #[arg(long)]
        name: String,
        left: String,
        right: String,
    },
    /// Print bases and pairing tables
    Show { name: String },
    /// Exact intersection number of two class expressions
    Pair {
        name: String,
        #[arg(allow_hyphen_values = true)]
        class_y: String,
        #[arg(allow_hyphen_values = true)]
        class_x: String,
    },
    /// Positivity obstruction of a class expression
    Obstruction {
        name: String,
        #[arg(allow_hyphen_values = true)]
        class: String,
        #[arg(long)]
        p: Option<usize>,
    },
    /// List stored manifolds
    List,
}

#[derive(Subcommand)]
enum MapCmd {
    /// Materialize a built-in map (J_P3, J_X, sigma_P2, power_map(k,d))
    Builtin {
        name: String,
        /// Store under a different name
        #[arg(long = "as")]
        alias: Option<String>,
    },
    /// Load a map definition file (TOML or JSON)
    Load { file: PathBuf },
    /// Load a monomial lift text file (rows of Laurent exponents)
    LoadLift {
        file: PathBuf,
        #[arg(long = "as")]
        alias: String,
    },
    /// Print matrices and declarations
    Show { name: String },
    /// Pull a class expression back through the map
    Pullback {
        name: String,
        #[arg(long)]
        p: usize,
        #[arg(long, allow_hyphen_values = true)]
        class: String,
    },
    /// Push a class expression forward (pairing adjoint)
    Pushforward {
        name: String,
        #[arg(long)]
        p: usize,
        #[arg(long, allow_hyphen_values = true)]
        class: String,
    },
    /// Derive the dual action at a bidegree from the complementary matrix
    Dual {
        name: String,
        #[arg(long)]
        p: usize,
    },
    /// Algebraic-stability check at a bidegree
    Stability {
        name: String,
        #[arg(long)]
        p: usize,
        #[arg(long, default_value_t = 8)]
        steps: usize,
        /// JSON file with iterate matrices [(f^n)^*] as rows of "num/den"
        #[arg(long)]
        iterates: Option<PathBuf>,
    },
    /// Künneth product of two stored self-maps
    Product {
        first: String,
        second: String,
        /// Name for the product map (default "{first}x{second}")
        #[arg(long = "as")]
        alias: Option<String>,
    },
    /// Exact degree sequence of a monomial map (CSV)
    Degrees {
        name: String,
        #[arg(long, default_value_t = 8)]
        steps: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum DynamicsCmd {
    /// Certified dynamical degree at a bidegree
    Degree {
        name: String,
        #[arg(long)]
        p: usize,
        #[arg(long, default_value_t = 8)]
        steps: usize,
        #[arg(long)]
        iterates: Option<PathBuf>,
    },
    /// Exact eigenspace of the pullback at a rational eigenvalue
    Invariant {
        name: String,
        #[arg(long)]
        p: usize,
        #[arg(long, allow_hyphen_values = true)]
        lambda: String,
    },
    /// Exact Cesàro averages (1/N) sum M^j alpha / lambda^j
    Cesaro {
        name: String,
        #[arg(long)]
        p: usize,
        #[arg(long, allow_hyphen_values = true)]
        lambda: String,
        #[arg(long, allow_hyphen_values = true)]
        alpha: String,
        #[arg(long, default_value_t = 10)]
        max_exp: u32,
    },
    /// Pull a Siu ledger back through a map
    SiuPullback {
        name: String,
        #[arg(long)]
        ledger: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare delta_k against delta_{k-1}
    LargeTopdeg {
        name: String,
        #[arg(long, default_value_t = 8)]
        steps: usize,
    },
    /// Series-construction precondition |lambda| > delta_{p-1}
    Applicability {
        name: String,
        #[arg(long)]
        p: usize,
        #[arg(long, allow_hyphen_values = true)]
        lambda: String,
        #[arg(long, default_value_t = 8)]
        steps: usize,
    },
}

#[derive(Args)]
struct GreenCommon {
    /// Orbit iterations
    #[arg(long, default_value_t = 60)]
    iters: usize,
}

#[derive(Subcommand)]
enum GreenCmd {
    /// Evaluate the Green potential at one point
    Potential {
        name: String,
        /// Comma-separated complex components, e.g. 1,2,3 or 1+2i,0,-1i
        #[arg(long, allow_hyphen_values = true)]
        point: String,
        #[command(flatten)]
        common: GreenCommon,
    },
    /// Sample the potential on quasi-uniform sphere points, CSV output
    Grid {
        name: String,
        #[arg(long, default_value_t = 128)]
        samples: usize,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        common: GreenCommon,
    },
    /// Exact hypersurface weights of the extracted invariant current
    Extracted {
        name: String,
        #[arg(long, default_value_t = 12)]
        steps: usize,
    },
    /// Product invariant current of two monomial maps, with verification
    Product {
        first: String,
        second: String,
        #[arg(long, default_value_t = 12)]
        steps: usize,
    },
    /// Lelong-number estimate of the potential at a center point
    Lelong {
        name: String,
        #[arg(long, allow_hyphen_values = true)]
        center: String,
        #[arg(long, default_value_t = 0.01)]
        r1: f64,
        #[arg(long, default_value_t = 0.001)]
        r2: f64,
        #[arg(long, default_value_t = 1024)]
        samples: usize,
        #[command(flatten)]
        common: GreenCommon,
    },
}

fn exit_code(e: &CoreError) -> i32 {
    match e {
        CoreError::Capability(_)
        | CoreError::Incidence(_)
        | CoreError::Spectrum(_)
        | CoreError::ResourceLimit(_) => 3,
        CoreError::Numerical(_) => 4,
        _ => 2,
    }
}

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => {}
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(exit_code(&e));
        }
    }
}

/// Cap step/iteration counts by COHODYN_MAX_STEPS when set.
fn cap_steps(requested: usize) -> usize {
    match std::env::var("COHODYN_MAX_STEPS")
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
    {
        Some(cap) if requested > cap => {
            eprintln!("note: capping steps at COHODYN_MAX_STEPS = {cap}");
            cap
        }
        _ => requested,
    }
}

fn tolerance(cli_tol: &Option<String>) -> Result<Rat, CoreError> {
    match cli_tol {
        Some(s) => {
            let t = parse_rat(s)?;
            if t <= Rat::new(0.into(), 1.into()) {
                return Err(CoreError::DegenerateInput("tolerance must be > 0".into()));
            }
            Ok(t)
        }
        None => Ok(dynamics::default_tolerance()),
    }
}

fn parse_complex(s: &str) -> Result<C64, CoreError> {
    let t = s.trim().replace(' ', "");
    if t.is_empty() {
        return Err(CoreError::Parse("empty complex component".into()));
    }
    let bad = || CoreError::Parse(format!("bad complex literal {s:?}"));
    if let Some(body) = t.strip_suffix('i') {
        // forms: "bi", "a+bi", "a-bi" (sign search skips a leading sign
        // and exponent signs)
        let split_at: Option<usize> = body
            .char_indices()
            .skip(1)
            .filter(|(i, c)| (*c == '+' || *c == '-') && !body[..*i].ends_with(['e', 'E']))
            .map(|(i, _)| i)
            .last();
        return match split_at {
            Some(i) => {
                let re: f64 = body[..i].parse().map_err(|_| bad())?;
                let imag_str = &body[i..];
                let imag: f64 = if imag_str == "+" || imag_str == "-" {
                    format!("{imag_str}1").parse().map_err(|_| bad())?
                } else {
                    imag_str.parse().map_err(|_| bad())?
                };
                Ok(C64::new(re, imag))
            }
            None => {
                let imag: f64 = if body.is_empty() || body == "+" || body == "-" {
                    format!("{body}1").parse().map_err(|_| bad())?
                } else {
                    body.parse().map_err(|_| bad())?
                };
                Ok(C64::new(0.0, imag))
            }
        };
    }
    let re: f64 = t.parse().map_err(|_| bad())?;
    Ok(C64::new(re, 0.0))
}

fn parse_point(s: &str) -> Result<Vec<C64>, CoreError> {
    s.split(',').map(parse_complex).collect()
}

fn print_matrix(m: &RatMatrix) {
    for i in 0..m.rows() {
        let row: Vec<String> = m.row(i).iter().map(format_rat).collect();
        println!("  [{}]", row.join(", "));
    }
}

fn matrix_json(m: &RatMatrix) -> serde_json::Value {
    json!((0..m.rows())
        .map(|i| m.row(i).iter().map(format_rat).collect::<Vec<_>>())
        .collect::<Vec<_>>())
}

fn load_iterates(path: &PathBuf) -> Result<Vec<RatMatrix>, CoreError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CoreError::Parse(format!("reading {}: {e}", path.display())))?;
    let rows: Vec<Vec<Vec<String>>> = serde_json::from_str(&text)
        .map_err(|e| CoreError::Parse(format!("iterate file {}: {e}", path.display())))?;
    rows.iter()
        .map(|m| {
            let parsed: Result<Vec<Vec<Rat>>, CoreError> = m
                .iter()
                .map(|row| row.iter().map(|s| parse_rat(s)).collect())
                .collect();
            RatMatrix::from_rows(parsed?)
        })
        .collect()
}

fn run(cli: Cli) -> Result<(), CoreError> {
    let tol = tolerance(&cli.tol)?;
    let mut ws = Workspace::open(&cli.workspace)?;
    match cli.command {
        Command::Manifold(cmd) => run_manifold(&mut ws, cmd),
        Command::Map(cmd) => run_map(&mut ws, cmd),
        Command::Dynamics(cmd) => run_dynamics(&mut ws, cmd, &tol),
        Command::Green(cmd) => run_green(&mut ws, cmd),
    }
}

fn run_manifold(ws: &mut Workspace, cmd: ManifoldCmd) -> Result<(), CoreError> {
    match cmd {
        ManifoldCmd::NewBlowup {
            dim,
            points,
            name,
            point_names,
        } => {
            let suffixes: Vec<String> = match point_names {
                Some(s) => s.split(',').map(|t| t.trim().to_string()).collect(),
                None => (0..points).map(|i| i.to_string()).collect(),
            };
            if suffixes.len() != points {
                return Err(CoreError::Naming(format!(
                    "{} point names for {points} points",
                    suffixes.len()
                )));
            }
            let model = blowup_points_named(&name, dim, &suffixes)?;
            ws.save_manifold(model.clone())?;
            println!(
                "manifold {name}: blowup of P^{dim} at {points} points, H^(1,1) basis [{}]",
                model.basis(1)?.join(", ")
            );
            Ok(())
        }
        ManifoldCmd::NewProduct { name, left, right } => {
            let a = ws.manifold(&left)?.clone();
            let b = ws.manifold(&right)?.clone();
            let prod = product_model(&a, &b)?;
            // store under the requested name
            let mut file = ModelFile::from_model(&prod);
            file.name = name.clone();
            let renamed = file.into_model()?;
            ws.save_manifold(renamed.clone())?;
            println!(
                "manifold {name}: product of {left} and {right}, dimension {}",
                renamed.dim()
            );
            Ok(())
        }
        ManifoldCmd::Show { name } => {
            let model = ws.manifold(&name)?.clone();
            println!("manifold {name}, dimension {}", model.dim());
            for p in 0..=model.dim() {
                println!("H^({p},{p}) basis: [{}]", model.basis(p)?.join(", "));
            }
            for p in 0..=model.dim() {
                println!("pairing degree {p} x {}:", model.dim() - p);
                print_matrix(model.pairing(p)?);
            }
            Ok(())
        }
        ManifoldCmd::Pair {
            name,
            class_y,
            class_x,
        } => {
            let model = ws.manifold(&name)?;
            let y = parse_class(model, &class_y, None)?;
            let x = parse_class(model, &class_x, None)?;
            println!("{}", format_rat(&y.pair(&x)?));
            Ok(())
        }
        ManifoldCmd::Obstruction { name, class, p } => {
            let model = ws.manifold(&name)?;
            let c = parse_class(model, &class, p)?;
            let verdict = positivity_obstruction(&c)?;
            let word = match verdict {
                Positivity::Obstructed => "OBSTRUCTED",
                Positivity::Unobstructed => "UNOBSTRUCTED",
            };
            println!("{word}: class {} at degree {}", c.display(), c.degree());
            println!(
                "{}",
                json!({"verdict": word, "class": c.display(), "p": c.degree()})
            );
            Ok(())
        }
        ManifoldCmd::List => {
            for name in ws.manifolds.keys() {
                println!("{name}");
            }
            Ok(())
        }
    }
}

fn run_map(ws: &mut Workspace, cmd: MapCmd) -> Result<(), CoreError> {
    match cmd {
        MapCmd::Builtin { name, alias } => {
            let map = builtin(&name)?;
            let map = match alias {
                Some(alias) => {
                    let mut file = MapFile::from_map(&map);
                    file.name = alias;
                    let mut models = BTreeMap::new();
                    models.insert(map.source().name().to_string(), map.source().clone());
                    models.insert(map.target().name().to_string(), map.target().clone());
                    file.into_map(&models)?
                }
                None => map,
            };
            println!(
                "map {}: {} -> {}, pullback degrees {:?}",
                map.name(),
                map.source().name(),
                map.target().name(),
                map.pullback_degrees()
            );
            ws.save_map(map)?;
            Ok(())
        }
        MapCmd::Load { file } => {
            let text = std::fs::read_to_string(&file)
                .map_err(|e| CoreError::Parse(format!("reading {}: {e}", file.display())))?;
            let parsed = if file.extension().and_then(|s| s.to_str()) == Some("json") {
                MapFile::from_json(&text)?
            } else {
                MapFile::from_toml(&text)?
            };
            let map = parsed.into_map(&ws.manifolds)?;
            println!("loaded map {}", map.name());
            ws.save_map(map)?;
            Ok(())
        }
        MapCmd::LoadLift { file, alias } => {
            let text = std::fs::read_to_string(&file)
                .map_err(|e| CoreError::Parse(format!("reading {}: {e}", file.display())))?;
            let lift = parse_lift_text(&text)?;
            println!(
                "monomial {alias}: P^{} map of degree {}",
                lift.dim(),
                lift.degree()
            );
            ws.save_monomial(&alias, lift)?;
            Ok(())
        }
        MapCmd::Show { name } => {
            let map = ws.map(&name)?;
            println!(
                "map {}: {} -> {}{}",
                map.name(),
                map.source().name(),
                map.target().name(),
                if map.is_involution() {
                    " (involution)"
                } else {
                    ""
                }
            );
            if map.is_composed() {
                println!(
                    "note: composed map; matrices at degree p are valid only if declared_stable contains p"
                );
            }
            println!("declared stable degrees: {:?}", map.declared_stable());
            for p in map.pullback_degrees() {
                println!("pullback at degree {p}:");
                print_matrix(map.pullback_matrix(p)?);
            }
            for fact in map.incidence() {
                println!(
                    "incidence: {} -> preimage codim {} components {:?}",
                    fact.variety, fact.preimage_codim, fact.preimage_components
                );
            }
            if let Some(lift) = map.monomial() {
                println!("monomial lift of degree {}", lift.degree());
            }
            Ok(())
        }
        MapCmd::Pullback { name, p, class } => {
            let map = ws.map(&name)?;
            let c = parse_class(map.target(), &class, Some(p))?;
            if c.degree() != p {
                return Err(CoreError::Degree(format!(
                    "class has degree {}, requested --p {p}",
                    c.degree()
                )));
            }
            println!("{}", map.pullback_class(&c)?.display());
            Ok(())
        }
        MapCmd::Pushforward { name, p, class } => {
            let map = ws.map(&name)?;
            let c = parse_class(map.source(), &class, Some(p))?;
            if c.degree() != p {
                return Err(CoreError::Degree(format!(
                    "class has degree {}, requested --p {p}",
                    c.degree()
                )));
            }
            println!("{}", map.pushforward_class(&c)?.display());
            Ok(())
        }
        MapCmd::Dual { name, p } => {
            let map = ws.map(&name)?;
            let m = map.derive_dual_action(p)?;
            println!("dual action at degree {p}:");
            print_matrix(&m);
            println!("{}", json!({"derived_dual": matrix_json(&m), "p": p}));
            Ok(())
        }
        MapCmd::Stability {
            name,
            p,
            steps,
            iterates,
        } => {
            let map = ws.map(&name)?;
            let its = match &iterates {
                Some(path) => Some(load_iterates(path)?),
                None => None,
            };
            let report = stability_check(map, p, cap_steps(steps), its.as_deref())?;
            let (word, detail) = match &report.verdict {
                StabilityVerdict::Stable { checked_steps } => (
                    "STABLE".to_string(),
                    format!("checked {checked_steps} steps"),
                ),
                StabilityVerdict::UnstableAt { step, witness } => {
                    (format!("UNSTABLE-AT {step}"), witness.clone())
                }
                StabilityVerdict::Unknown => (
                    "UNKNOWN".to_string(),
                    "no degree sequence or iterate matrices available".to_string(),
                ),
            };
            println!("stability at p={p}: {word} ({detail})");
            if report.declared {
                println!("model declares p={p} stable");
            }
            let verdict_json = match &report.verdict {
                StabilityVerdict::Stable { checked_steps } => {
                    json!({"verdict": "stable", "checked_steps": checked_steps, "p": p, "declared": report.declared})
                }
                StabilityVerdict::UnstableAt { step, witness } => {
                    json!({"verdict": "unstable", "step": step, "witness": witness, "p": p, "declared": report.declared})
                }
                StabilityVerdict::Unknown => {
                    json!({"verdict": "unknown", "p": p, "declared": report.declared})
                }
            };
            println!("{verdict_json}");
            Ok(())
        }
        MapCmd::Product {
            first,
            second,
            alias,
        } => {
            let f = ws.map(&first)?.clone();
            let g = ws.map(&second)?.clone();
            let prod = cohodyn_core::maps::product_map(&f, &g)?;
            let prod = match alias {
                Some(alias) => {
                    let mut file = MapFile::from_map(&prod);
                    file.name = alias;
                    let mut models = BTreeMap::new();
                    models.insert(prod.source().name().to_string(), prod.source().clone());
                    models.insert(prod.target().name().to_string(), prod.target().clone());
                    file.into_map(&models)?
                }
                None => prod,
            };
            println!(
                "map {}: self-map of {} with pullback degrees {:?}, stable at {:?}",
                prod.name(),
                prod.source().name(),
                prod.pullback_degrees(),
                prod.declared_stable()
            );
            ws.save_map(prod)?;
            Ok(())
        }
        MapCmd::Degrees { name, steps, out } => {
            let lift = ws.monomial_lift(&name)?;
            let seq = degree_sequence(&lift, cap_steps(steps))?;
            let csv = seq.to_csv();
            match out {
                Some(path) => std::fs::write(&path, csv)
                    .map_err(|e| CoreError::Parse(format!("writing {}: {e}", path.display())))?,
                None => print!("{csv}"),
            }
            Ok(())
        }
    }
}

fn run_dynamics(ws: &mut Workspace, cmd: DynamicsCmd, tol: &Rat) -> Result<(), CoreError> {
    match cmd {
        DynamicsCmd::Degree {
            name,
            p,
            steps,
            iterates,
        } => {
            let map = ws.map(&name)?;
            let its = match &iterates {
                Some(path) => Some(load_iterates(path)?),
                None => None,
            };
            let d = dynamical_degree(map, p, cap_steps(steps), its.as_deref(), tol)?;
            println!(
                "delta_{p}({name}) in [{}, {}]{}",
                format_rat(&d.interval.lo),
                format_rat(&d.interval.hi),
                if d.exact { " (exact)" } else { "" }
            );
            println!(
                "{}",
                json!({
                    "p": p,
                    "lo": format_rat(&d.interval.lo),
                    "hi": format_rat(&d.interval.hi),
                    "exact": d.exact,
                    "method": format!("{:?}", d.method),
                })
            );
            Ok(())
        }
        DynamicsCmd::Invariant { name, p, lambda } => {
            let map = ws.map(&name)?;
            let lam = parse_rat(&lambda)?;
            let res = invariant_class_eigen(map, p, &lam)?;
            let dim = res.kernel.len();
            println!(
                "eigenvalue {} at degree {p}: kernel dimension {dim}",
                format_rat(&lam)
            );
            for v in &res.kernel {
                println!("  {}", v.display());
            }
            println!(
                "{}",
                json!({
                    "lambda": format_rat(&lam),
                    "p": p,
                    "kernel_dim": dim,
                    "kernel": res.kernel.iter().map(|v| v.display()).collect::<Vec<_>>(),
                    "theta": res.theta.display(),
                })
            );
            Ok(())
        }
        DynamicsCmd::Cesaro {
            name,
            p,
            lambda,
            alpha,
            max_exp,
        } => {
            let map = ws.map(&name)?;
            let lam = parse_rat(&lambda)?;
            let a = parse_class(map.target(), &alpha, Some(p))?;
            let mut max_exp = max_exp;
            while max_exp > 0 && cap_steps(1usize << max_exp) < (1usize << max_exp) {
                max_exp -= 1;
            }
            let res = invariant_class_cesaro(map, p, &a, &lam, max_exp)?;
            if let Some(w) = &res.warning {
                eprintln!("warning: {w}");
            }
            println!("Cesaro limit candidate: {}", res.theta.display());
            print!("residual history:");
            for r in &res.residual_history {
                print!(" {}", format_rat(r));
            }
            println!();
            let converged = res
                .residual_history
                .last()
                .map(|r| *r == Rat::new(0.into(), 1.into()))
                .unwrap_or(false);
            println!(
                "{}",
                json!({
                    "theta": res.theta.display(),
                    "residuals": res.residual_history.iter().map(format_rat).collect::<Vec<_>>(),
                    "converged": converged,
                })
            );
            Ok(())
        }
        DynamicsCmd::SiuPullback { name, ledger, out } => {
            let map = ws.map(&name)?;
            let text = std::fs::read_to_string(&ledger)
                .map_err(|e| CoreError::Parse(format!("reading {}: {e}", ledger.display())))?;
            let file = LedgerFile::from_json(&text)?;
            let input = file.into_ledger(map.target(), map.varieties())?;
            let result = siu_pullback(map, &input)?;
            println!("residual: {}", result.residual().display());
            for atom in result.atoms() {
                println!(
                    "atom ({})·{}{}",
                    format_rat(&atom.weight),
                    atom.variety.name,
                    if atom.lost_positivity {
                        " [LOST-POSITIVITY]"
                    } else {
                        ""
                    }
                );
            }
            println!("total: {}", result.total().display());
            let out_file = LedgerFile::from_ledger(&result);
            if let Some(path) = out {
                std::fs::write(&path, out_file.to_json()?)
                    .map_err(|e| CoreError::Parse(format!("writing {}: {e}", path.display())))?;
            }
            println!(
                "{}",
                json!({
                    "residual": result.residual().display(),
                    "atoms": result.atoms().iter().map(|a| json!({
                        "weight": format_rat(&a.weight),
                        "variety": a.variety.name,
                        "lost_positivity": a.lost_positivity,
                    })).collect::<Vec<_>>(),
                    "total": result.total().display(),
                })
            );
            Ok(())
        }
        DynamicsCmd::LargeTopdeg { name, steps } => {
            let steps = cap_steps(steps);
            let cmp = if ws.maps.contains_key(&name) {
                dynamics::large_topological_degree(ws.map(&name)?, steps)?
            } else {
                dynamics::large_topological_degree_monomial(&ws.monomial_lift(&name)?, steps)?
            };
            let k_str = format_rat(&cmp.delta_k);
            let (word, rel) = match cmp.verdict {
                ComparisonVerdict::Holds => ("HOLDS", ">"),
                ComparisonVerdict::Fails => ("FAILS", "<="),
                ComparisonVerdict::Indeterminate => ("INDETERMINATE", "?"),
            };
            let km1 = if cmp.delta_km1.is_exact() {
                format_rat(&cmp.delta_km1.lo)
            } else {
                format!(
                    "[{}, {}]",
                    format_rat(&cmp.delta_km1.lo),
                    format_rat(&cmp.delta_km1.hi)
                )
            };
            println!("{word}: delta_k={k_str} {rel} delta_(k-1)={km1}");
            println!(
                "{}",
                json!({
                    "verdict": word,
                    "delta_k": k_str,
                    "delta_km1_lo": format_rat(&cmp.delta_km1.lo),
                    "delta_km1_hi": format_rat(&cmp.delta_km1.hi),
                })
            );
            Ok(())
        }
        DynamicsCmd::Applicability {
            name,
            p,
            lambda,
            steps,
        } => {
            let map = ws.map(&name)?;
            let lam = parse_rat(&lambda)?;
            let res = applicability_check_series(map, p, &lam, cap_steps(steps))?;
            match &res {
                SeriesApplicability::Applicable {
                    lambda_abs,
                    delta_pm1,
                } => {
                    println!(
                        "APPLICABLE: |lambda| = {} > delta_{} <= {}",
                        format_rat(lambda_abs),
                        p - 1,
                        format_rat(&delta_pm1.hi)
                    );
                    println!(
                        "{}",
                        json!({"verdict": "applicable", "lambda_abs": format_rat(lambda_abs), "delta_pm1_hi": format_rat(&delta_pm1.hi)})
                    );
                }
                SeriesApplicability::NotApplicable { reason, .. } => {
                    println!("NOT-APPLICABLE: {reason}");
                    println!("{}", json!({"verdict": "not_applicable", "reason": reason}));
                }
            }
            Ok(())
        }
    }
}

fn run_green(ws: &mut Workspace, cmd: GreenCmd) -> Result<(), CoreError> {
    let params = GreenParams::default();
    match cmd {
        GreenCmd::Potential {
            name,
            point,
            common,
        } => {
            let lift = ws.float_lift(&name)?;
            if !lift.coprime_verified {
                eprintln!(
                    "note: user-supplied lift; common polynomial factors are not checked"
                );
            }
            let z = parse_point(&point)?;
            let eval = green_potential(&lift, &z, cap_steps(common.iters), &params)?;
            println!("G = {:.15e}", eval.value());
            println!(
                "iterations = {}, converged = {}, tail_bound = {:.15e}",
                eval.iterations, eval.converged, eval.tail_bound
            );
            println!(
                "{}",
                json!({
                    "G": eval.value(),
                    "iterations": eval.iterations,
                    "converged": eval.converged,
                    "tail_bound": eval.tail_bound,
                })
            );
            Ok(())
        }
        GreenCmd::Grid {
            name,
            samples,
            out,
            common,
        } => {
            let lift = ws.float_lift(&name)?;
            let n = lift.dim() + 1;
            let dirs = halton_sphere(2 * n, samples);
            let points: Vec<Vec<C64>> = dirs
                .iter()
                .map(|w| (0..n).map(|i| C64::new(w[2 * i], w[2 * i + 1])).collect())
                .collect();
            let csv = grid_csv(&lift, &points, cap_steps(common.iters), &params)?;
            std::fs::write(&out, csv)
                .map_err(|e| CoreError::Parse(format!("writing {}: {e}", out.display())))?;
            println!("wrote {} sample rows to {}", samples, out.display());
            Ok(())
        }
        GreenCmd::Extracted { name, steps } => {
            let lift = ws.monomial_lift(&name)?;
            let t = extracted_invariant_current(&lift, cap_steps(steps))?;
            let tag = if t.exact {
                "exact, periodic ledger".to_string()
            } else {
                format!(
                    "partial sum, tail bound {}",
                    t.tail_bound.as_ref().map(format_rat).unwrap_or_default()
                )
            };
            for (i, w) in t.weights.iter().enumerate() {
                println!("{{x{i}=0}}: {} ({tag})", format_rat(w));
            }
            println!("total mass: {}", format_rat(&t.mass()));
            println!(
                "note: atomic hypersurface part only; a non-atomic residual of the invariant current is not decided here"
            );
            println!(
                "{}",
                json!({
                    "weights": t.weights.iter().map(format_rat).collect::<Vec<_>>(),
                    "exact": t.exact,
                    "tail_bound": t.tail_bound.as_ref().map(format_rat),
                })
            );
            Ok(())
        }
        GreenCmd::Product {
            first,
            second,
            steps,
        } => {
            let steps = cap_steps(steps);
            let f1 = ws.monomial_lift(&first)?;
            let f2 = ws.monomial_lift(&second)?;
            let t1 = extracted_invariant_current(&f1, steps)?;
            let t2 = extracted_invariant_current(&f2, steps)?;
            let prod = product_invariant_current(&f1, &t1, &f2, &t2)?;
            let word = if prod.pass { "PASS" } else { "FAIL" };
            println!(
                "{word}: pullback scales the product current by {} atomwise ({} atoms, codimension 2)",
                format_rat(&prod.scale),
                prod.atom_count()
            );
            println!(
                "{}",
                json!({
                    "verdict": word,
                    "scale": format_rat(&prod.scale),
                    "atoms": prod.atom_count(),
                    "weights": prod.weights.iter().map(|row| row.iter().map(format_rat).collect::<Vec<_>>()).collect::<Vec<_>>(),
                })
            );
            Ok(())
        }
        GreenCmd::Lelong {
            name,
            center,
            r1,
            r2,
            samples,
            common,
        } => {
            let lift = ws.float_lift(&name)?;
            let c = parse_point(&center)?;
            let iters = cap_steps(common.iters);
            let u = |z: &[C64]| {
                green_potential(&lift, z, iters, &params)
                    .ok()
                    .map(|e| e.value())
            };
            let est = lelong_estimate(u, &c, r1, r2, samples)?;
            println!(
                "nu = {:.6} (samples = {}, failures = {})",
                est.value, est.samples, est.failures
            );
            println!(
                "{}",
                json!({
                    "nu": est.value,
                    "samples": est.samples,
                    "failures": est.failures,
                    "max_outer": est.max_outer,
                    "max_inner": est.max_inner,
                })
            );
            Ok(())
        }
    }
}
