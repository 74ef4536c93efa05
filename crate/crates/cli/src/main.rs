use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::error::ErrorKind;
use clap::{CommandFactory, Parser, Subcommand, ValueEnum};

use helmbem_core::assembly::{assemble, compare_methods, AssemblyOptions, Method, Operator, DEFAULT_LEVELS};
use helmbem_core::geometry::Mesh;
use helmbem_core::io;
use helmbem_core::kernels::KernelContext;
use helmbem_core::oracle::OracleConfig;
use helmbem_core::quadrature::DEFAULT_ORDER;
use helmbem_core::specfun::{cal_i0, cal_i1, gamma0, gamma2, HankelKind};
use helmbem_core::validation;
use helmbem_core::Error;

#[derive(Parser)]
#[command(name = "helmbem", version, about = "Galerkin BEM matrices for the 2D Helmholtz equation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Assemble one operator matrix and write it to a file.
    Assemble(AssembleArgs),
    /// Compare the direct and variational hypersingular matrices.
    Compare(CompareArgs),
    /// Tabulate calI0, calI1, Gamma0 or Gamma2 on a uniform grid.
    Specfun(SpecfunArgs),
    /// Run the built-in consistency checks.
    Selftest {
        /// Include the brute-force oracle comparisons (minutes).
        #[arg(long)]
        full: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum OpArg {
    #[value(name = "S")]
    S,
    #[value(name = "D")]
    D,
    #[value(name = "Dadj")]
    Dadj,
    #[value(name = "N")]
    N,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Direct,
    Variational,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum FnArg {
    #[value(name = "I0")]
    I0,
    #[value(name = "I1")]
    I1,
    #[value(name = "Gamma0")]
    Gamma0,
    #[value(name = "Gamma2")]
    Gamma2,
}

#[derive(clap::Args)]
struct Quadrature {
    /// Hankel function kind.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=2))]
    kind: u8,
    /// Gauss points per direction.
    #[arg(long, default_value_t = DEFAULT_ORDER)]
    nq: usize,
    /// Grading levels toward shared vertices.
    #[arg(long, default_value_t = DEFAULT_LEVELS)]
    levels: usize,
}

impl Quadrature {
    fn options(&self) -> AssemblyOptions {
        AssemblyOptions {
            nq: self.nq,
            levels: self.levels,
        }
    }

    fn kind(&self) -> Result<HankelKind, Error> {
        HankelKind::from_index(self.kind)
    }
}

#[derive(clap::Args)]
struct AssembleArgs {
    #[arg(long)]
    mesh: PathBuf,
    #[arg(long, value_enum)]
    operator: OpArg,
    /// Only for the hypersingular operator N; defaults to direct.
    #[arg(long, value_enum)]
    method: Option<MethodArg>,
    #[arg(long)]
    k: f64,
    #[command(flatten)]
    quad: Quadrature,
    /// Accepted for scripting; assembly is always sequential and reproducible.
    #[arg(long)]
    deterministic: bool,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(clap::Args)]
struct CompareArgs {
    #[arg(long)]
    mesh: PathBuf,
    /// Comma-separated wavenumbers.
    #[arg(long, value_delimiter = ',', required = true, num_args = 1..)]
    k: Vec<f64>,
    #[command(flatten)]
    quad: Quadrature,
    /// Also write the table as CSV.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(clap::Args)]
struct SpecfunArgs {
    #[arg(long = "fn", value_enum)]
    function: FnArg,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=2))]
    kind: u8,
    #[arg(long, default_value_t = 20.0)]
    sigma_max: f64,
    #[arg(long, default_value_t = 201)]
    samples: usize,
    /// Gauss points for Gamma0 and Gamma2.
    #[arg(long, default_value_t = DEFAULT_ORDER)]
    nq: usize,
    #[arg(long)]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Assemble(a) => cmd_assemble(a),
        Command::Compare(a) => cmd_compare(a),
        Command::Specfun(a) => cmd_specfun(a),
        Command::Selftest { full } => cmd_selftest(full),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn usage_error(kind: ErrorKind, msg: &str) -> ! {
    Cli::command().error(kind, msg).exit()
}

fn read_mesh(path: &Path) -> Result<Mesh, Error> {
    let text = fs::read_to_string(path).map_err(|e| Error::Format(format!("{}: {e}", path.display())))?;
    let mesh = Mesh::parse(&text)?;
    if mesh.reoriented() {
        eprintln!("note: {} is clockwise; node order reversed to counterclockwise", path.display());
    }
    Ok(mesh)
}

fn write_file(path: &Path, text: &str) -> Result<(), Error> {
    fs::write(path, text).map_err(|e| Error::Format(format!("{}: {e}", path.display())))
}

/// Relative asymmetry above which a symmetric operator is rejected.
const SYMMETRY_TOL: f64 = 1e-12;

fn cmd_assemble(a: AssembleArgs) -> Result<ExitCode, Error> {
    let op = match a.operator {
        OpArg::S => Operator::S,
        OpArg::D => Operator::D,
        OpArg::Dadj => Operator::Dadj,
        OpArg::N => Operator::N,
    };
    let method = match (op, a.method) {
        (Operator::N, None | Some(MethodArg::Direct)) => Method::Direct,
        (Operator::N, Some(MethodArg::Variational)) => Method::Variational,
        (_, None) => Method::NotApplicable,
        (_, Some(_)) => usage_error(
            ErrorKind::ArgumentConflict,
            "--method only applies to the hypersingular operator N",
        ),
    };
    let mesh = read_mesh(&a.mesh)?;
    let ctx = KernelContext::new(a.k, a.quad.kind()?)?;
    let start = Instant::now();
    let m = assemble(&mesh, op, method, &ctx, a.quad.options())?;
    let elapsed = start.elapsed();
    if matches!(op, Operator::S | Operator::N) {
        let asym = m.max_abs_diff(&m.transpose())? / m.max_abs();
        if asym > SYMMETRY_TOL {
            return Err(Error::Format(format!("{op} matrix asymmetric: relative {asym:e}")));
        }
    }
    let text = match a.format {
        Format::Csv => io::to_csv(&m),
        Format::Json => io::to_json(&m)?,
    };
    write_file(&a.out, &text)?;
    println!(
        "{op} ({method}) {n}x{n}, k = {k}, kind {kind}: max |entry| = {max:.6e}, {t:.3} s",
        n = m.n,
        k = a.k,
        kind = a.quad.kind,
        max = m.max_abs(),
        t = elapsed.as_secs_f64()
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_compare(a: CompareArgs) -> Result<ExitCode, Error> {
    if a.k.is_empty() {
        usage_error(ErrorKind::TooFewValues, "--k needs at least one wavenumber");
    }
    let mesh = read_mesh(&a.mesh)?;
    let kind = a.quad.kind()?;
    let classes = ["coincident", "first-neighbor", "second-neighbor"];
    let mut csv = String::from("k,class,i,j,direct_re,direct_im,variational_re,variational_im,abs_diff\n");
    println!(
        "{:>8}  {:<16} {:>28}  {:>28}  {:>10}",
        "k", "pair", "N direct", "N variational", "|diff|"
    );
    for &k in &a.k {
        let c = compare_methods(&mesh, &KernelContext::new(k, kind)?, a.quad.options())?;
        for (e, class) in c.entries.iter().zip(classes) {
            println!(
                "{:>8}  {:<16} {:>13.6e} {:>+13.6e}i  {:>13.6e} {:>+13.6e}i  {:>10.3e}",
                k,
                class,
                e.direct.re,
                e.direct.im,
                e.variational.re,
                e.variational.im,
                e.abs_diff()
            );
            let _ = writeln!(
                csv,
                "{k},{class},{},{},{:.16e},{:.16e},{:.16e},{:.16e},{:.3e}",
                e.i,
                e.j,
                e.direct.re,
                e.direct.im,
                e.variational.re,
                e.variational.im,
                e.abs_diff()
            );
        }
        println!(
            "{:>8}  max |diff| over all entries {:.3e}, imaginary {:.3e}",
            k, c.max_abs_diff, c.max_imag_diff
        );
    }
    if let Some(out) = a.out {
        write_file(&out, &csv)?;
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_specfun(a: SpecfunArgs) -> Result<ExitCode, Error> {
    if a.samples < 2 {
        usage_error(ErrorKind::ValueValidation, "--samples must be at least 2");
    }
    if !(a.sigma_max > 0.0 && a.sigma_max.is_finite()) {
        usage_error(ErrorKind::ValueValidation, "--sigma-max must be finite and > 0");
    }
    let kind = HankelKind::from_index(a.kind)?;
    let mut csv = String::from("sigma,re,im\n");
    for i in 0..a.samples {
        let s = a.sigma_max * i as f64 / (a.samples - 1) as f64;
        let v = match a.function {
            FnArg::I0 => cal_i0(kind, s)?,
            FnArg::I1 => cal_i1(kind, s)?,
            FnArg::Gamma0 => gamma0(kind, s, a.nq)?,
            FnArg::Gamma2 => gamma2(kind, s, a.nq)?,
        };
        let _ = writeln!(csv, "{s},{:.16e},{:.16e}", v.re, v.im);
    }
    write_file(&a.out, &csv)?;
    Ok(ExitCode::SUCCESS)
}

struct Report {
    failures: usize,
}

impl Report {
    fn check(&mut self, name: &str, measured: f64, tol: f64) {
        let ok = measured <= tol;
        if !ok {
            self.failures += 1;
        }
        println!(
            "{} {name}: {measured:.3e} (tolerance {tol:.0e})",
            if ok { "PASS" } else { "FAIL" }
        );
    }
}

fn cmd_selftest(full: bool) -> Result<ExitCode, Error> {
    let opts = AssemblyOptions::default();
    let mut r = Report { failures: 0 };
    let start = Instant::now();

    let s = validation::specfun_report()?;
    r.check("calI0, calI1 at sigma = 1e-12", s.small_sigma, 1e-10);
    r.check("Hankel recurrence, relative", s.hankel_recurrence, 1e-10);
    r.check("Struve recurrence", s.struve_recurrence, 1e-10);
    r.check("second kind is the conjugate", s.conjugation, 0.0);

    let id = validation::identity_report(opts)?;
    r.check("coincident double layer", id.coincident_double, 0.0);
    r.check("I11 = I22, I12 = I21", id.coincident_symmetry, 0.0);
    r.check("u11 + u12 = k^2 (I11 + I12), relative", id.variational_sum, 1e-13);
    r.check("S and N symmetric, relative", id.operator_symmetry, 1e-12);
    r.check("Dadj = D^T, relative", id.adjointness, 1e-12);

    let (diff, imag) = validation::method_agreement(&validation::hexagon(), &validation::COMPARE_K, HankelKind::First, opts)?;
    r.check("hexagon N direct vs variational", diff, 2e-4);
    r.check("hexagon N imaginary parts", imag, 1e-6);

    let oct = &validation::test_meshes()[2].1;
    let mut scale: f64 = 0.0;
    for s in [0.1, 10.0] {
        scale = scale
            .max(validation::scaling_error(oct, Operator::S, Method::NotApplicable, 2.0, s, 2, opts)?)
            .max(validation::scaling_error(oct, Operator::D, Method::NotApplicable, 2.0, s, 1, opts)?)
            .max(validation::scaling_error(oct, Operator::N, Method::Direct, 2.0, s, 0, opts)?)
            .max(validation::scaling_error(oct, Operator::N, Method::Variational, 2.0, s, 0, opts)?);
    }
    r.check("scaling: S ~ s^2, D ~ s, N ~ 1", scale, 1e-10);
    let det = validation::deterministic(oct, 3.0, opts)?;
    r.check("repeat assembly identical", if det { 0.0 } else { 1.0 }, 0.0);

    if full {
        let cfg = OracleConfig::default();
        let kl = validation::KL_GRID;
        r.check("oracle: coincident single layer", validation::coincident_single_error(&kl, &cfg)?, 1e-8);
        let (direct, var) = validation::coincident_hyper_error(&kl, &cfg)?;
        r.check("oracle: coincident hypersingular, direct", direct, 1e-4);
        r.check("oracle: coincident hypersingular, variational", var, 1e-7);
        let a = validation::adjacent_static_report(&cfg)?;
        r.check("oracle: adjacent static closed form", a.oracle_error, 1e-6);
        r.check("adjacent static closed form, swap", a.swap_error, 1e-13);
        r.check("adjacent static closed form, jump at pi/2", a.continuity_jump, 1e-10);
        let (err, conv) = validation::transformed_double_report(1.0, &cfg)?;
        r.check("oracle: transformed double layer", err, 1e-7);
        r.check("transformed double layer, 20 vs 40 points", conv, 1e-9);
    }
    println!(
        "{} failure(s), {:.1} s",
        r.failures,
        start.elapsed().as_secs_f64()
    );
    Ok(if r.failures == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}
