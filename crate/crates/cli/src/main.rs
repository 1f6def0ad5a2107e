use clap::{Parser, Subcommand, ValueEnum};
use fiberlift_cli::commands::{self, CmdError, Opts};
use fiberlift_core::field::{FiniteField, RationalField};
use fiberlift_core::Exp;
use std::process::ExitCode;
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum FieldKind {
    #[value(name = "Q")]
    Q,
    #[value(name = "Fp")]
    Fp,
}

#[derive(Parser)]
#[command(
    name = "fiberlift",
    version,
    about = "Series arithmetic, Newton polygons, tropical geometry, and root lifting over k((t^Q))"
)]
struct Cli {
    /// Coefficient field: the rationals or a prime-power field.
    #[arg(long, global = true, value_enum, default_value = "Q")]
    field: FieldKind,

    /// Characteristic; required with --field Fp.
    #[arg(long, global = true)]
    p: Option<u64>,

    /// Extension degree over F_p.
    #[arg(long, global = true, default_value_t = 1)]
    k: usize,

    /// Target t-adic precision for lifting, as an integer or num/den.
    #[arg(long, global = true, default_value = "8")]
    precision: String,

    /// Most series terms a single lifted root may accumulate.
    #[arg(long, global = true, default_value_t = 64)]
    max_terms: usize,

    /// Most lifting iterations per root.
    #[arg(long, global = true, default_value_t = 256)]
    max_iterations: usize,

    /// Seed for every randomized choice; identical runs are byte-identical.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Emit the versioned JSON schema instead of plain text.
    #[arg(long, global = true)]
    json: bool,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Lift a root of a univariate polynomial with prescribed valuation and
    /// residue.
    Lift {
        #[arg(long)]
        poly: String,
        #[arg(long)]
        valuation: String,
        #[arg(long)]
        residue: String,
    },
    /// Enumerate all roots of a univariate polynomial over the field, with
    /// multiplicities and an account of anything unliftable.
    Roots {
        #[arg(long)]
        poly: String,
    },
    /// Tropical membership of a point, with the minimal weight and its
    /// achieving monomials.
    Trop {
        #[arg(long)]
        poly: String,
        /// Comma-separated rational coordinates.
        #[arg(long)]
        point: String,
    },
    /// Initial form of a polynomial at a point.
    Init {
        #[arg(long)]
        poly: String,
        #[arg(long)]
        point: String,
    },
    /// Newton polygon of a univariate polynomial: root valuations,
    /// multiplicities, residual polynomials.
    NewtonPolygon {
        #[arg(long)]
        poly: String,
    },
    /// Vertices and edges of the plane tropical curve of a 2-variable
    /// polynomial.
    TropCurve {
        #[arg(long)]
        poly: String,
    },
    /// Coordinatewise valuation of a point with series coordinates; residues
    /// too with --exploded.
    TropicalizePoint {
        /// Comma-separated series in t.
        #[arg(long)]
        coords: String,
        #[arg(long)]
        exploded: bool,
    },
    /// Lift a tropical point with prescribed residues onto a hypersurface.
    LiftPoint {
        #[arg(long)]
        poly: String,
        #[arg(long)]
        point: String,
        /// Comma-separated field elements, one per coordinate.
        #[arg(long)]
        residues: String,
    },
    /// Sample pairwise-distinct points of a hypersurface fiber over a
    /// tropical point.
    SampleFiber {
        #[arg(long)]
        poly: String,
        #[arg(long)]
        point: String,
        #[arg(long, default_value_t = 1)]
        count: usize,
    },
    /// Verify that tropicalization commutes with a monomial map on a point,
    /// in both the plain and exploded senses. Coordinates are bounded at the
    /// working --precision before the map is applied.
    CheckFunctoriality {
        /// Integer matrix, rows separated by `;`, entries by `,`.
        #[arg(long)]
        matrix: String,
        #[arg(long)]
        coords: String,
    },
}

impl Cmd {
    fn name(&self) -> &'static str {
        match self {
            Cmd::Lift { .. } => "lift",
            Cmd::Roots { .. } => "roots",
            Cmd::Trop { .. } => "trop",
            Cmd::Init { .. } => "init",
            Cmd::NewtonPolygon { .. } => "newton-polygon",
            Cmd::TropCurve { .. } => "trop-curve",
            Cmd::TropicalizePoint { .. } => "tropicalize-point",
            Cmd::LiftPoint { .. } => "lift-point",
            Cmd::SampleFiber { .. } => "sample-fiber",
            Cmd::CheckFunctoriality { .. } => "check-functoriality",
        }
    }
}

fn run<F: fiberlift_core::field::CoeffField>(
    field: &F,
    opts: &Opts,
    cmd: &Cmd,
) -> Result<String, CmdError> {
    match cmd {
        Cmd::Lift {
            poly,
            valuation,
            residue,
        } => commands::cmd_lift(field, opts, poly, valuation, residue),
        Cmd::Roots { poly } => commands::cmd_roots(field, opts, poly),
        Cmd::Trop { poly, point } => commands::cmd_trop(field, opts, poly, point),
        Cmd::Init { poly, point } => commands::cmd_init(field, opts, poly, point),
        Cmd::NewtonPolygon { poly } => commands::cmd_newton_polygon(field, opts, poly),
        Cmd::TropCurve { poly } => commands::cmd_trop_curve(field, opts, poly),
        Cmd::TropicalizePoint { coords, exploded } => {
            commands::cmd_tropicalize_point(field, opts, coords, *exploded)
        }
        Cmd::LiftPoint {
            poly,
            point,
            residues,
        } => commands::cmd_lift_point(field, opts, poly, point, residues),
        Cmd::SampleFiber { poly, point, count } => {
            commands::cmd_sample_fiber(field, opts, poly, point, *count)
        }
        Cmd::CheckFunctoriality { matrix, coords } => {
            commands::cmd_check_functoriality(field, opts, matrix, coords)
        }
    }
}

fn dispatch(cli: &Cli, opts: &Opts) -> Result<String, CmdError> {
    match cli.field {
        FieldKind::Q => {
            if cli.p.is_some() {
                return Err(CmdError::Validation(
                    "--p only applies with --field Fp".to_string(),
                ));
            }
            if cli.k != 1 {
                return Err(CmdError::Validation(
                    "--k only applies with --field Fp".to_string(),
                ));
            }
            run(&RationalField, opts, &cli.cmd)
        }
        FieldKind::Fp => {
            let p = cli.p.ok_or_else(|| {
                CmdError::Validation("--field Fp requires --p".to_string())
            })?;
            let field = FiniteField::new(p, cli.k)
                .map_err(|e| CmdError::Validation(e.to_string()))?;
            run(&field, opts, &cli.cmd)
        }
    }
}

/// Print to stdout, treating a closed pipe as a normal exit rather than a
/// panic, so `fiberlift ... | head` stays quiet.
fn print_out(s: &str) {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    if writeln!(out, "{s}").is_err() {
        std::process::exit(0);
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let precision = match Exp::from_str(&cli.precision) {
        Ok(e) => e,
        Err(e) => {
            eprintln!("error: bad --precision: {e}");
            return ExitCode::from(2);
        }
    };
    let opts = Opts {
        precision,
        max_terms: cli.max_terms,
        max_iterations: cli.max_iterations,
        seed: cli.seed,
        json: cli.json,
    };
    match dispatch(&cli, &opts) {
        Ok(out) => {
            print_out(&out);
            ExitCode::SUCCESS
        }
        Err(err) => {
            let rendered = commands::emit_error(opts.json, cli.cmd.name(), &err);
            if opts.json {
                print_out(&rendered);
            } else {
                eprintln!("{rendered}");
            }
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
