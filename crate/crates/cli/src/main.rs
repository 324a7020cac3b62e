//! `knots`: Möbius energies, Gauss-diagram functionals and projection
//! statistics of closed space curves from the command line.
//!
//! Curves travel between commands as JSON (`{"points": [[x,y,z],...], "closed": true}`)
//! on stdin/stdout or in files. Exit status: 0 success, 1 domain error
//! (including a failed `verify`), 2 usage error.

mod output;

use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use knot_energies::diagrams::{
    chord_diagram_of, conway_a2_skein, x_crossing_upper_bound, ChordDiagram, KnotDiagramCode,
};
use knot_energies::energies::{energy, EnergyKind, QuadratureConfig};
use knot_energies::gauss::{self, MCConfig};
use knot_energies::relax::{relax, FlowConfig};
use knot_energies::{projections, verify, KnotCurve, KnotError, Vec3, ZooSpec};

use output::{emit, Format};

const CSV_HELP: &str = "CSV output: one header row then one row per record. Reports have columns \
config,error,method,n,value (config is JSON text); curves x,y,z; crossings i,i_over,j,s,sign,u; \
trajectories energy,rejected,resampled,snapshot,step,step_size; verify detail,id,name,passed.";

#[derive(Parser, Debug)]
#[command(name = "knots", version, about = "Möbius knot energies and Gauss-diagram invariants", after_help = CSV_HELP)]
struct Cli {
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true, env = "KNOT_THREADS")]
    threads: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct CurveInput {
    /// Curve JSON file; stdin when neither this nor --zoo is given.
    #[arg(long, short, conflicts_with = "zoo")]
    input: Option<PathBuf>,
    /// Generate the curve from a zoo spec instead, e.g. `trefoil:n=256`.
    #[arg(long)]
    zoo: Option<String>,
}

impl CurveInput {
    fn load(&self) -> knot_energies::Result<KnotCurve> {
        if let Some(spec) = &self.zoo {
            return ZooSpec::parse(spec)?.sample();
        }
        let mut text = String::new();
        match &self.input {
            Some(p) if p.as_os_str() != "-" => text = fs::read_to_string(p)?,
            _ => {
                io::stdin().read_to_string(&mut text)?;
            }
        }
        KnotCurve::from_json(&text)
    }
}

#[derive(Args, Debug)]
struct Quadrature {
    /// Neighbor offsets treated as the diagonal band.
    #[arg(long, default_value_t = 1)]
    skip: usize,
    /// Skip the half-resolution error estimate.
    #[arg(long)]
    no_richardson: bool,
}

impl Quadrature {
    fn config(&self) -> QuadratureConfig {
        QuadratureConfig {
            diagonal_skip: self.skip,
            richardson: !self.no_richardson,
        }
    }
}

#[derive(Args, Debug)]
struct MonteCarlo {
    #[arg(long, default_value_t = 1_000_000)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Average {
    /// Mean crossing number.
    Cw,
    /// Mean signed crossing number.
    W,
    /// Mean interleaved crossing-pair count over direction pairs.
    Cx,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum DiagramAction {
    Parse,
    Stats,
    A2Skein,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sample a zoo curve, e.g. `circle:r=1,n=256`, `torus2q:q=5`, `twist:k=3`,
    /// `figure-eight`, `perturbed_circle:amp=0.1,mode=5,seed=1`.
    Zoo {
        spec: String,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// One of the Möbius energies.
    Energy {
        #[command(flatten)]
        curve: CurveInput,
        #[arg(long, default_value = "e", value_parser = ["e", "ecos", "esin", "ecosx", "esinx"])]
        which: String,
        #[command(flatten)]
        quad: Quadrature,
    },
    /// Gauss-diagram functional I_D, its unsigned or rotation-averaged version.
    Gauss {
        #[command(flatten)]
        curve: CurveInput,
        /// `w`, `X`, `X3`, or a pairing such as `1-4,2-5,3-6`.
        #[arg(long, short)]
        diagram: String,
        #[arg(long)]
        unsigned: bool,
        /// Average over the cyclic rotations of the endpoint order.
        #[arg(long, conflicts_with = "mc")]
        reduced: bool,
        /// Use Monte Carlo even when the grid applies (always used beyond three chords).
        #[arg(long)]
        mc: bool,
        #[command(flatten)]
        quad: Quadrature,
        #[command(flatten)]
        monte_carlo: MonteCarlo,
    },
    /// ¼I_X − ⅓I_Y + 1/24.
    A2 {
        #[command(flatten)]
        curve: CurveInput,
        #[command(flatten)]
        quad: Quadrature,
        #[command(flatten)]
        monte_carlo: MonteCarlo,
    },
    /// The volume functional I_Y by Monte Carlo.
    Iy {
        #[command(flatten)]
        curve: CurveInput,
        #[command(flatten)]
        monte_carlo: MonteCarlo,
        #[arg(long)]
        spatial_scale: Option<f64>,
        #[arg(long)]
        near_radius: Option<f64>,
        #[arg(long)]
        exclusion: Option<f64>,
    },
    /// The writhe.
    Writhe {
        #[command(flatten)]
        curve: CurveInput,
        #[command(flatten)]
        quad: Quadrature,
    },
    /// Crossings of one plane projection.
    Project {
        #[command(flatten)]
        curve: CurveInput,
        /// Viewing direction `x,y,z`; a random regular one is drawn from --seed otherwise.
        #[arg(long, value_parser = parse_direction, allow_hyphen_values = true)]
        direction: Option<Vec3>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Direction-averaged crossing statistics.
    Average {
        #[arg(value_enum)]
        what: Average,
        #[command(flatten)]
        curve: CurveInput,
        #[arg(long, default_value_t = 2000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Knot diagram codes (`O1+ U2+ ...`) and chord diagrams.
    Diagram {
        #[arg(value_enum)]
        action: DiagramAction,
        #[arg(long, conflicts_with = "chords", required_unless_present = "chords")]
        code: Option<String>,
        /// A chord diagram instead of a code (`parse` and `stats` only).
        #[arg(long)]
        chords: Option<String>,
    },
    /// Gradient descent of an energy; writes the trajectory as JSON lines.
    Relax {
        #[command(flatten)]
        curve: CurveInput,
        #[arg(long, default_value = "e", value_parser = ["e", "ecos", "esin"])]
        energy: String,
        #[arg(long, default_value_t = 500)]
        steps: usize,
        #[arg(long, default_value_t = 0.05)]
        step_size: f64,
        #[arg(long, default_value_t = 10)]
        resample_every: usize,
        #[arg(long, default_value_t = 1e-6)]
        eps: f64,
        /// Stop once the energy reaches this value.
        #[arg(long)]
        target: Option<f64>,
        /// Where to write the trajectory (stdout by default).
        #[arg(long)]
        trajectory: Option<PathBuf>,
        /// Final curve JSON.
        #[arg(long, short)]
        out: Option<PathBuf>,
        /// Directory for snapshot curves `snapshot-<id>.json`.
        #[arg(long)]
        snapshots: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        snapshot_every: usize,
    },
    /// Run the acceptance suite; exits 1 if any criterion fails.
    Verify {
        /// `all`, a criterion number, or its name.
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
}

enum Failure {
    Domain(KnotError),
    Usage(String),
    Verify,
}

impl From<KnotError> for Failure {
    fn from(e: KnotError) -> Self {
        Self::Domain(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Self::Domain(e.into())
    }
}

type Outcome = std::result::Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    match run(cli.command, cli.format) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verify) => ExitCode::from(1),
        Err(Failure::Domain(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn print(value: &Value, format: Format) -> Outcome {
    emit(&mut io::stdout().lock(), value, format)?;
    Ok(())
}

fn report(r: &knot_energies::FunctionalReport, format: Format) -> Outcome {
    print(&serde_json::to_value(r).map_err(KnotError::from)?, format)
}

fn curve_value(c: &KnotCurve, format: Format) -> Value {
    match format {
        Format::Json => serde_json::from_str(&c.to_json()).expect("curve JSON"),
        Format::Csv => c
            .points()
            .iter()
            .map(|p| json!({"x": p.x, "y": p.y, "z": p.z}))
            .collect(),
    }
}

fn parse_direction(text: &str) -> std::result::Result<Vec3, String> {
    let parts: Vec<f64> = text
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("`{p}`: {e}")))
        .collect::<std::result::Result<_, _>>()?;
    match parts[..] {
        [x, y, z] if Vec3::new(x, y, z).norm() > 0.0 => Ok(Vec3::new(x, y, z)),
        [_, _, _] => Err("direction must be a non-zero finite vector".into()),
        _ => Err("expected three comma-separated numbers".into()),
    }
}

fn mc_config(m: &MonteCarlo) -> MCConfig {
    MCConfig::new(m.samples, m.seed)
}

fn run(command: Command, format: Format) -> Outcome {
    match command {
        Command::Zoo { spec, out } => {
            let c = ZooSpec::parse(&spec)?.sample()?;
            match out {
                Some(path) => c.save(path)?,
                None => print(&curve_value(&c, format), format)?,
            }
        }
        Command::Energy { curve, which, quad } => {
            let kind = EnergyKind::parse(&which)?;
            report(&energy(&curve.load()?, kind, &quad.config())?, format)?;
        }
        Command::Gauss {
            curve,
            diagram,
            unsigned,
            reduced,
            mc,
            quad,
            monte_carlo,
        } => {
            let c = curve.load()?;
            let d = ChordDiagram::parse(&diagram)?;
            let signed = !unsigned;
            let r = if reduced {
                gauss::reduced_functional(&c, &d, signed, &quad.config())?
            } else if mc {
                gauss::gauss_functional_mc(&c, &d, signed, &mc_config(&monte_carlo))?
            } else {
                gauss::gauss_functional_auto(&c, &d, signed, &quad.config(), &mc_config(&monte_carlo))?
            };
            report(&r, format)?;
        }
        Command::A2 {
            curve,
            quad,
            monte_carlo,
        } => {
            let c = curve.load()?;
            report(&gauss::conway_a2_geometric(&c, &quad.config(), &mc_config(&monte_carlo))?, format)?;
        }
        Command::Iy {
            curve,
            monte_carlo,
            spatial_scale,
            near_radius,
            exclusion,
        } => {
            let c = curve.load()?;
            let cfg = MCConfig {
                spatial_scale,
                near_radius,
                exclusion,
                ..mc_config(&monte_carlo)
            };
            report(&gauss::i_y(&c, &cfg)?, format)?;
        }
        Command::Writhe { curve, quad } => {
            report(&gauss::writhe(&curve.load()?, &quad.config())?, format)?;
        }
        Command::Project { curve, direction, seed } => {
            let c = curve.load()?;
            let cs = match direction {
                Some(v) => projections::project_crossings(&c, v),
                None => projections::generic_projection(&c, seed)?,
            };
            let value = match format {
                Format::Csv => serde_json::to_value(&cs.crossings).map_err(KnotError::from)?,
                Format::Json => {
                    let code = cs.gauss_code().ok().map(|k| k.to_string());
                    json!({
                        "direction": cs.direction,
                        "regular": cs.regular,
                        "count": cs.count(),
                        "signed_count": cs.signed_count(),
                        "crossings": cs.crossings,
                        "code": code,
                    })
                }
            };
            print(&value, format)?;
        }
        Command::Average {
            what,
            curve,
            samples,
            seed,
        } => {
            let c = curve.load()?;
            let r = match what {
                Average::Cw => projections::average_crossing_number(&c, samples, seed)?,
                Average::W => projections::average_writhe(&c, samples, seed)?,
                Average::Cx => projections::average_x_crossing(&c, samples, seed)?,
            };
            report(&r, format)?;
        }
        Command::Diagram { action, code, chords } => diagram(action, code, chords, format)?,
        Command::Relax {
            curve,
            energy,
            steps,
            step_size,
            resample_every,
            eps,
            target,
            trajectory,
            out,
            snapshots,
            snapshot_every,
        } => {
            let c = curve.load()?;
            let cfg = FlowConfig {
                energy: EnergyKind::parse(&energy)?,
                steps,
                step_size,
                resample_every,
                gradient_eps: eps,
                target,
                snapshot_every,
                ..FlowConfig::default()
            };
            let t = relax(&c, &cfg)?;
            let records = serde_json::to_value(&t.records).map_err(KnotError::from)?;
            let mut text = Vec::new();
            match format {
                Format::Json => text.extend_from_slice(t.to_jsonl().as_bytes()),
                Format::Csv => emit(&mut text, &records, format)?,
            }
            match trajectory {
                Some(path) => fs::write(path, text)?,
                None => io::stdout().lock().write_all(&text)?,
            }
            if let Some(dir) = snapshots {
                fs::create_dir_all(&dir)?;
                for (k, s) in t.snapshots.iter().enumerate() {
                    s.save(dir.join(format!("snapshot-{k}.json")))?;
                }
            }
            if let Some(path) = out {
                t.curve.save(path)?;
            }
            eprintln!(
                "status {:?}: {} accepted steps, E = {}",
                t.status,
                t.accepted_steps(),
                t.final_energy()
            );
        }
        Command::Verify { suite, seed } => {
            let ids: Vec<u8> = if suite.eq_ignore_ascii_case("all") {
                verify::CRITERIA.iter().map(|c| c.0).collect()
            } else {
                let mut ids = Vec::new();
                for key in suite.split(',') {
                    ids.push(
                        verify::find(key).ok_or_else(|| Failure::Usage(format!("unknown criterion `{key}`")))?,
                    );
                }
                ids
            };
            let mut all = true;
            let mut rows = Vec::new();
            for id in ids {
                let o = verify::run(id, seed);
                all &= o.passed;
                if format == Format::Json {
                    eprintln!("{o}");
                }
                rows.push(o);
            }
            print(&serde_json::to_value(&rows).map_err(KnotError::from)?, format)?;
            if !all {
                return Err(Failure::Verify);
            }
        }
    }
    Ok(())
}

fn diagram(action: DiagramAction, code: Option<String>, chords: Option<String>, format: Format) -> Outcome {
    let code = code.map(|c| KnotDiagramCode::parse(&c)).transpose()?;
    let d = match (&code, chords) {
        (Some(k), _) => chord_diagram_of(k),
        (None, Some(text)) => ChordDiagram::parse(&text)?,
        (None, None) => return Err(Failure::Usage("give --code or --chords".into())),
    };
    let value = match action {
        DiagramAction::Parse => {
            let mut v = json!({"chord_diagram": d.to_json(), "canonical": d.canonical()});
            if let Some(k) = &code {
                v["code"] = json!(k.normalized().to_string());
                v["crossings"] = json!(k.crossings());
                v["writhe"] = json!(k.writhe());
            }
            v
        }
        DiagramAction::Stats => json!({
            "pairs": code.as_ref().map_or_else(|| d.intersecting_pairs(), x_crossing_upper_bound),
            "x3": d.count_subdiagrams(&ChordDiagram::x_n(3)),
        }),
        DiagramAction::A2Skein => {
            let k = code.ok_or_else(|| Failure::Usage("a2-skein needs --code".into()))?;
            json!({"a2": conway_a2_skein(&k)?})
        }
    };
    print(&value, format)
}
