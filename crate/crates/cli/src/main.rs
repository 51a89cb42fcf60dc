use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use hcft::convolution::{banach_check, convolve, convolve_dist, sobolev_norm};
use hcft::fourier::{inverse_table, paley_wiener_check, transform, transform_dist, ComponentTable, FourierImage, PwConfig};
use hcft::integral::{berezin_integral, dist_pair, pairing, CompactDistribution};
use hcft::io::{self, Document};
use hcft::scalar::GridConfig;
use hcft::spinrep::{dpi, pi};
use hcft::superalgebra::parse_element;
use hcft::superfunction::{product, SuperFunction};
use hcft::verify::{self, Suite, VerifyOptions};
use hcft::Complex64;
use serde_json::json;

/// `println!` that exits quietly when stdout is closed.
macro_rules! out {
    ($($t:tt)*) => {
        if writeln!(std::io::stdout(), $($t)*).is_err() {
            std::process::exit(0);
        }
    };
}

#[derive(Parser)]
#[command(name = "hcft", version, about = "Harmonic analysis on the purely-odd Heisenberg-Clifford supergroup")]
struct Cli {
    /// Suppress warnings and human-readable summaries.
    #[arg(long, global = true)]
    quiet: bool,
    /// Print reports as JSON.
    #[arg(long, global = true)]
    json: bool,
    /// Seed for randomized suites.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct ZetaGrid {
    #[arg(long, allow_hyphen_values = true)]
    zmin: f64,
    #[arg(long, allow_hyphen_values = true)]
    zmax: f64,
    #[arg(long)]
    zsteps: usize,
    /// Sample along the imaginary axis, `ζ = i t`.
    #[arg(long)]
    imag: bool,
}

impl ZetaGrid {
    fn points(&self) -> Result<Vec<f64>, Failure> {
        if self.zsteps == 0 || !self.zmin.is_finite() || !self.zmax.is_finite() || self.zmin > self.zmax {
            return Err(Failure::Usage("need zmin <= zmax and zsteps >= 1".into()));
        }
        if self.zsteps == 1 {
            return Ok(vec![self.zmin]);
        }
        let h = (self.zmax - self.zmin) / (self.zsteps - 1) as f64;
        Ok((0..self.zsteps).map(|k| self.zmin + k as f64 * h).collect())
    }

    fn zetas(&self) -> Result<Vec<Complex64>, Failure> {
        let pts = self.points()?;
        Ok(pts
            .into_iter()
            .map(|t| if self.imag { Complex64::new(0.0, t) } else { Complex64::new(t, 0.0) })
            .collect())
    }
}

#[derive(Subcommand)]
enum Command {
    /// Print dπ_ζ(u), or π_ζ(u; x) with --x, as a JSON matrix.
    Spinrep {
        #[arg(long)]
        n: usize,
        /// `re,im`
        #[arg(long, allow_hyphen_values = true)]
        zeta: String,
        #[arg(long)]
        element: String,
        #[arg(long, allow_hyphen_values = true)]
        x: Option<f64>,
    },
    /// Sample the Fourier transform of a superfunction.
    Transform {
        file: PathBuf,
        #[command(flatten)]
        grid: ZetaGrid,
        /// Emit the component table `A(a_I; ζ)` instead of matrices.
        #[arg(long)]
        components: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Invert a component table onto a grid.
    Inverse {
        table: PathBuf,
        /// `x0,x1,samples`; defaults to HCFT_DEFAULT_GRID or [-16,16) with 2048 samples.
        #[arg(long, allow_hyphen_values = true)]
        grid: Option<String>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Sample the Fourier-Laplace transform of a compactly supported distribution.
    Laplace {
        file: PathBuf,
        #[command(flatten)]
        grid: ZetaGrid,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Paley-Wiener growth estimate for a function or distribution.
    PwCheck {
        file: PathBuf,
        /// Exponential type.
        #[arg(long)]
        a: f64,
        /// Largest decay order tested.
        #[arg(long, default_value_t = 6)]
        max_order: u32,
        /// Drop the `ζ^{-[n]}` prefactor.
        #[arg(long)]
        no_prefactor: bool,
    },
    /// Convolve two superfunctions.
    Convolve {
        f: PathBuf,
        g: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Convolve a distribution with a superfunction.
    DistConvolve {
        u: PathBuf,
        f: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Sobolev norm ‖F‖_{k,p}.
    Norm {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        p: f64,
        file: PathBuf,
    },
    /// Check ‖F*G‖_{n,1} ≤ ‖F‖_{n,1} ‖G‖_{n,1}.
    BanachCheck { f: PathBuf, g: PathBuf },
    /// Run verification suites.
    Verify {
        /// Suite name or `all`.
        #[arg(long, default_value = "all")]
        suite: String,
        /// Largest n for the analytic suites.
        #[arg(long, default_value_t = 4)]
        n: usize,
        /// Cap on closed-form tolerances.
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Pointwise product of two superfunctions.
    Product {
        f: PathBuf,
        g: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Pairing ⟨F, G⟩ or ⟨U, G⟩.
    Pair { f: PathBuf, g: PathBuf },
    /// Berezin integral ∫ F.
    Integral { file: PathBuf },
}

enum Failure {
    Usage(String),
    Check,
}

impl From<hcft::Error> for Failure {
    fn from(e: hcft::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn with_path<T>(path: &Path, r: hcft::Result<T>) -> Result<T, Failure> {
    r.map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn load_function(path: &Path) -> Result<SuperFunction, Failure> {
    with_path(path, io::superfunction_from_json(&read(path)?))
}

fn load_distribution(path: &Path) -> Result<CompactDistribution, Failure> {
    with_path(path, io::distribution_from_json(&read(path)?))
}

fn load_document(path: &Path) -> Result<Document, Failure> {
    with_path(path, io::document_from_json(&read(path)?))
}

fn emit(text: &str, output: Option<&Path>) -> Result<(), Failure> {
    match output {
        Some(p) => fs::write(p, format!("{text}\n")).map_err(|e| Failure::Usage(format!("{}: {e}", p.display()))),
        None => {
            out!("{text}");
            Ok(())
        }
    }
}

fn parse_complex(s: &str) -> Result<Complex64, Failure> {
    let bad = || Failure::Usage(format!("expected re,im but got {s:?}"));
    let (re, im) = s.split_once(',').ok_or_else(bad)?;
    let re: f64 = re.trim().parse().map_err(|_| bad())?;
    let im: f64 = im.trim().parse().map_err(|_| bad())?;
    Ok(Complex64::new(re, im))
}

fn print_scalar(cli: &Cli, label: &str, v: Complex64) {
    if cli.json {
        out!("{}", json!({ label: [v.re, v.im] }));
    } else {
        out!("{label} = {} {:+}i", v.re, v.im);
    }
}

fn sample_matrices(a: &FourierImage, zetas: &[Complex64]) -> String {
    let mats: Vec<_> = zetas.iter().map(|z| a.eval(*z)).collect();
    io::matrices_to_json(a.n(), zetas, &mats)
}

fn run(cli: &Cli) -> Result<(), Failure> {
    match &cli.command {
        Command::Spinrep { n, zeta, element, x } => {
            let zeta = parse_complex(zeta)?;
            let u = parse_element(element, *n)?;
            let m = match x {
                Some(x) => pi(&u, *x, zeta)?,
                None => dpi(&u, zeta)?,
            };
            out!("{}", io::matrix_to_json(&m));
        }
        Command::Transform { file, grid, components, output } => {
            let a = transform(&load_function(file)?)?;
            let text = if *components {
                if grid.imag {
                    return Err(Failure::Usage("--components needs real zeta".into()));
                }
                io::table_to_json(&ComponentTable::sample(&a, &grid.points()?)?)
            } else {
                sample_matrices(&a, &grid.zetas()?)
            };
            emit(&text, output.as_deref())?;
        }
        Command::Inverse { table, grid, output } => {
            let t = with_path(table, io::table_from_json(&read(table)?))?;
            let g = match grid {
                Some(s) => GridConfig::parse(s)?,
                None => GridConfig::from_env()?,
            };
            let inv = inverse_table(&t, &g)?;
            if inv.slow_decay() && !cli.quiet {
                eprintln!(
                    "warning: components have not decayed at the ends of the zeta range (relative tail {:.2e})",
                    inv.tail
                );
            }
            emit(&io::superfunction_to_json(&inv.function), output.as_deref())?;
        }
        Command::Laplace { file, grid, output } => {
            let a = transform_dist(&load_distribution(file)?)?;
            emit(&sample_matrices(&a, &grid.zetas()?), output.as_deref())?;
        }
        Command::PwCheck { file, a, max_order, no_prefactor } => {
            let image = match load_document(file)? {
                Document::Function(f) => transform(&f)?,
                Document::Distribution(u) => transform_dist(&u)?,
            };
            let cfg = PwConfig { orders: (0..=*max_order).collect(), prefactor: !no_prefactor, ..PwConfig::default() };
            let r = paley_wiener_check(&image, *a, &cfg)?;
            if cli.json {
                let entries: Vec<_> = r
                    .entries
                    .iter()
                    .map(|e| {
                        json!({
                            "order": e.order,
                            "monomial": e.monomial.to_string(),
                            "coarse": e.coarse,
                            "fine": e.fine,
                            "pass": e.pass,
                        })
                    })
                    .collect();
                out!("{}", json!({ "a": r.radius, "pass": r.pass, "entries": entries }));
            } else if !cli.quiet {
                out!("{:>5}  {:<12}  {:>11}  {:>11}  result", "order", "monomial", "coarse", "fine");
                for e in &r.entries {
                    out!(
                        "{:>5}  {:<12}  {:>11.4e}  {:>11.4e}  {}",
                        e.order,
                        e.monomial.to_string(),
                        e.coarse,
                        e.fine,
                        if e.pass { "pass" } else { "FAIL" }
                    );
                }
                out!("Paley-Wiener bound of type {}: {}", r.radius, if r.pass { "pass" } else { "FAIL" });
            }
            if !r.pass {
                return Err(Failure::Check);
            }
        }
        Command::Convolve { f, g, output } => {
            let h = convolve(&load_function(f)?, &load_function(g)?)?;
            emit(&io::superfunction_to_json(&h), output.as_deref())?;
        }
        Command::DistConvolve { u, f, output } => {
            let h = convolve_dist(&load_distribution(u)?, &load_function(f)?)?;
            emit(&io::superfunction_to_json(&h), output.as_deref())?;
        }
        Command::Norm { k, p, file } => {
            let s = sobolev_norm(&load_function(file)?, *k, *p)?;
            if cli.json {
                out!("{}", json!({ "k": s.k, "p": s.p, "value": s.value }));
            } else {
                out!("||F||_({},{}) = {}", s.k, s.p, s.value);
            }
        }
        Command::BanachCheck { f, g } => {
            let r = banach_check(&load_function(f)?, &load_function(g)?)?;
            if cli.json {
                out!(
                    "{}",
                    json!({
                        "lhs": r.lhs,
                        "norm_f": r.norm_f,
                        "norm_g": r.norm_g,
                        "rhs": r.rhs(),
                        "slack": r.slack,
                        "pass": r.pass,
                    })
                );
            } else if !cli.quiet {
                out!("||F*G|| = {}", r.lhs);
                out!("||F|| ||G|| = {} * {} = {}", r.norm_f, r.norm_g, r.rhs());
                out!("ratio {:.6}: {}", r.ratio(), if r.pass { "pass" } else { "FAIL" });
            }
            if !r.pass {
                return Err(Failure::Check);
            }
        }
        Command::Verify { suite, n, tol } => {
            let suites = Suite::parse(suite)?;
            if let Some(t) = tol {
                if !(*t > 0.0) {
                    return Err(Failure::Usage(format!("--tol must be positive, got {t}")));
                }
            }
            let opts = VerifyOptions { n_max: *n, tol: *tol, seed: cli.seed };
            let mut all_pass = true;
            let mut reports = Vec::new();
            for s in suites {
                let r = verify::run(s, &opts)?;
                all_pass &= r.pass;
                if !cli.json && !cli.quiet {
                    out!("{}", r.table().trim_end());
                }
                reports.push(r);
            }
            if cli.json {
                out!("{}", serde_json::to_string(&reports).expect("reports serialize"));
            } else if !cli.quiet {
                out!("verify: {}", if all_pass { "pass" } else { "FAIL" });
            }
            if !all_pass {
                return Err(Failure::Check);
            }
        }
        Command::Product { f, g, output } => {
            let h = product(&load_function(f)?, &load_function(g)?)?;
            emit(&io::superfunction_to_json(&h), output.as_deref())?;
        }
        Command::Pair { f, g } => {
            let rhs = load_function(g)?;
            let v = match load_document(f)? {
                Document::Function(lhs) => pairing(&lhs, &rhs)?,
                Document::Distribution(u) => dist_pair(&u, &rhs)?,
            };
            print_scalar(cli, "pairing", v);
        }
        Command::Integral { file } => {
            let v = berezin_integral(&load_function(file)?)?;
            print_scalar(cli, "integral", v);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
