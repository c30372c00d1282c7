//! Command-line front end. Exit codes: 0 ok, 1 numerical failure or failed
//! verification, 2 input error, 3 not admissible, 4 evaluation singularity.

use crate::admissibility::{self, GateOptions};
use crate::boundary::PeriodicPair;
use crate::closedform::{self, ExponentialTriple, FamilyD, Verdict};
use crate::dressing::{self, linspace, DressedSolution, GridPoint};
use crate::error::{Error, Result};
use crate::monodromy::C;
use crate::pipeline::{self, Outcome, PipelineOptions};
use crate::scalar_rh::{PoleData, ScalarOptions};
use crate::spectral;
use crate::verify::{self, VerifyOptions};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

#[derive(Parser, Debug)]
#[command(name = "periodic-nls", version, about = "Half-line defocusing NLS with time-periodic boundary data")]
pub struct Cli {
    /// Worker threads for grid and contour evaluations (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Classify an exponential triple (alpha, omega, c).
    Classify(TripleArgs),
    /// Run the admissibility gates on a pair and print the report.
    Gate {
        #[command(flatten)]
        pair: PairArgs,
        #[command(flatten)]
        gates: GateArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Spectral functions Q^b, P^b, (A^b)^2 at one k or on a real grid.
    Spectral {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long, allow_hyphen_values = true)]
        k_re: Option<f64>,
        #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
        k_im: f64,
        /// Real grid start (used when --k-re is absent).
        #[arg(long, allow_hyphen_values = true, default_value_t = -4.0)]
        s0: f64,
        #[arg(long, allow_hyphen_values = true, default_value_t = 4.0)]
        s1: f64,
        #[arg(long, default_value_t = 81)]
        ns: usize,
        #[arg(long, default_value_t = monodromy_default_tol())]
        tol: f64,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Residues of P^b at the lattice points.
    Poles {
        #[command(flatten)]
        pair: PairArgs,
        #[command(flatten)]
        gates: GateArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Full pipeline; writes the solution descriptor JSON.
    Build {
        #[command(flatten)]
        pair: PairArgs,
        #[command(flatten)]
        gates: GateArgs,
        /// Tolerance for the Q^b samples behind a(k).
        #[arg(long)]
        scalar_tol: Option<f64>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Evaluate the dressed solution of a descriptor on a grid.
    Eval {
        #[arg(long)]
        descriptor: PathBuf,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Evaluate a closed-form solution on a grid.
    EvalClosed {
        #[command(flatten)]
        closed: ClosedArgs,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Verify a descriptor or closed form: PDE residual, boundary, periodicity, decay.
    Verify {
        #[arg(long, conflicts_with = "form")]
        descriptor: Option<PathBuf>,
        #[command(flatten)]
        closed: ClosedArgs,
        /// Boundary pair to compare against (implied for the family-d form).
        #[command(flatten)]
        pair: PairArgs,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long, default_value_t = 1e-3)]
        h: f64,
        #[arg(long, default_value_t = 1e-5)]
        pde_tol: f64,
        #[arg(long, default_value_t = 1e-10)]
        g0_tol: f64,
        #[arg(long, default_value_t = 1e-6)]
        g1_tol: f64,
        #[arg(long, default_value_t = 1e-12)]
        periodicity_tol: f64,
        /// Right end of the decay profile.
        #[arg(long, default_value_t = 20.0)]
        decay_x1: f64,
        #[command(flatten)]
        out: OutArgs,
    },
}

fn monodromy_default_tol() -> f64 {
    crate::monodromy::DEFAULT_TOL
}

#[derive(Args, Debug)]
struct TripleArgs {
    #[arg(long, allow_hyphen_values = true)]
    alpha: f64,
    #[arg(long, allow_hyphen_values = true)]
    omega: f64,
    #[arg(long, allow_hyphen_values = true)]
    c_re: f64,
    #[arg(long, allow_hyphen_values = true)]
    c_im: f64,
}

#[derive(Args, Debug)]
struct PairArgs {
    /// Pair JSON file ({"type":"exponential",...} or {"type":"fourier",...}).
    #[arg(long)]
    pair: Option<PathBuf>,
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    omega: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    c_re: Option<f64>,
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
    c_im: f64,
}

impl PairArgs {
    fn given(&self) -> bool {
        self.pair.is_some() || self.alpha.is_some() || self.omega.is_some() || self.c_re.is_some()
    }

    fn resolve(&self) -> Result<PeriodicPair> {
        if let Some(path) = &self.pair {
            if self.alpha.is_some() || self.omega.is_some() || self.c_re.is_some() {
                return Err(Error::InvalidInput("give either --pair or an inline triple".into()));
            }
            return read_json(path);
        }
        match (self.alpha, self.omega, self.c_re) {
            (Some(a), Some(w), Some(cr)) => PeriodicPair::exponential(a, w, C::new(cr, self.c_im)),
            _ => Err(Error::InvalidInput("need --pair FILE or --alpha, --omega, --c-re [--c-im]".into())),
        }
    }
}

#[derive(Args, Debug)]
struct GateArgs {
    /// Monodromy tolerance for A3 and retained residues.
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    /// Monodromy tolerance for the winding scan and pole screening.
    #[arg(long, default_value_t = 1e-6)]
    scan_tol: f64,
    #[arg(long, default_value_t = 1e-6)]
    a3_margin: f64,
    #[arg(long, default_value_t = 8.0)]
    a3_half_width: f64,
    #[arg(long, default_value_t = 32)]
    n_max: u32,
    #[arg(long, default_value_t = 0.25)]
    radius_factor: f64,
    #[arg(long, default_value_t = 1e-7)]
    residue_tol: f64,
    #[arg(long, default_value_t = 0.01)]
    decay_tol: f64,
}

impl GateArgs {
    fn options(&self) -> GateOptions {
        GateOptions {
            tol: self.tol,
            scan_tol: self.scan_tol,
            a3_margin: self.a3_margin,
            a3_half_width: self.a3_half_width,
            n_max: self.n_max,
            radius_factor: self.radius_factor,
            residue_tol: self.residue_tol,
            decay_tol: self.decay_tol,
            ..GateOptions::default()
        }
    }
}

#[derive(Args, Debug)]
struct GridArgs {
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
    x0: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = 5.0)]
    x1: f64,
    #[arg(long, default_value_t = 51)]
    nx: usize,
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
    t0: f64,
    /// Defaults to two periods.
    #[arg(long, allow_hyphen_values = true)]
    t1: Option<f64>,
    #[arg(long, default_value_t = 41)]
    nt: usize,
}

impl GridArgs {
    fn axes(&self, tau: f64) -> Result<(Vec<f64>, Vec<f64>)> {
        let t1 = self.t1.unwrap_or(self.t0 + 2.0 * tau);
        if self.nx < 2 || self.nt < 2 {
            return Err(Error::InvalidInput("nx and nt must be at least 2".into()));
        }
        if self.x0 < 0.0 || self.t0 < 0.0 {
            return Err(Error::InvalidInput("the grid must lie in the quarter plane x >= 0, t >= 0".into()));
        }
        if !(self.x1 >= self.x0 && t1 >= self.t0) {
            return Err(Error::InvalidInput("grid end points must not precede start points".into()));
        }
        Ok((linspace(self.x0, self.x1, self.nx), linspace(self.t0, t1, self.nt)))
    }
}

#[derive(Clone, Copy, Debug, ValueEnum, PartialEq)]
enum Form {
    /// Single-pole explicit solution, needs --cf-alpha and --cf-omega.
    FamilyD,
    /// Two-pole example with poles i, 2i.
    TwoPole,
}

#[derive(Args, Debug)]
struct ClosedArgs {
    #[arg(long, value_enum)]
    form: Option<Form>,
    #[arg(long, allow_hyphen_values = true)]
    cf_alpha: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    cf_omega: Option<f64>,
}

type Evaluator = Box<dyn Fn(f64, f64) -> Result<C> + Sync>;

impl ClosedArgs {
    /// Evaluator, period and (for family D) the boundary pair.
    fn resolve(&self) -> Result<(Evaluator, f64, Option<PeriodicPair>)> {
        match self.form {
            Some(Form::FamilyD) => {
                let (Some(a), Some(w)) = (self.cf_alpha, self.cf_omega) else {
                    return Err(Error::InvalidInput("family-d needs --cf-alpha and --cf-omega".into()));
                };
                let d = FamilyD::new(a, w)?;
                let pair = PeriodicPair::family_d(a, w)?;
                Ok((Box::new(move |x, t| Ok(d.u(x, t))), pair.tau(), Some(pair)))
            }
            Some(Form::TwoPole) => Ok((Box::new(closedform::u_section5), std::f64::consts::FRAC_PI_2, None)),
            None => Err(Error::InvalidInput("need --form".into())),
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum, PartialEq)]
enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug)]
struct OutArgs {
    #[arg(long, short)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

/// Failure with an exit code; the payload, if any, is still written.
struct Fail {
    code: i32,
    msg: String,
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidInput(_) | Error::CoincidentPoles(..) => 2,
            Error::GateNotPassed(_) | Error::Inconclusive(_) => 3,
            Error::SingularSystem { .. } | Error::SingularPoint { .. } | Error::EvalAtPole(_) => 4,
            _ => 1,
        };
        Fail { code, msg: e.to_string() }
    }
}

impl From<std::io::Error> for Fail {
    fn from(e: std::io::Error) -> Self {
        Fail { code: 2, msg: e.to_string() }
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))
}

fn sink(out: &OutArgs) -> std::io::Result<Box<dyn Write>> {
    Ok(match &out.output {
        Some(p) => Box::new(std::io::BufWriter::new(std::fs::File::create(p)?)),
        None => Box::new(std::io::stdout().lock()),
    })
}

fn emit_json<T: Serialize>(out: &OutArgs, value: &T) -> std::result::Result<(), Fail> {
    let mut w = sink(out)?;
    serde_json::to_writer_pretty(&mut w, value).map_err(|e| Fail { code: 1, msg: e.to_string() })?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct JsonPoint {
    x: f64,
    t: f64,
    re_u: f64,
    im_u: f64,
}

fn emit_grid(out: &OutArgs, pts: &[GridPoint]) -> std::result::Result<(), Fail> {
    match out.format {
        Format::Csv => {
            let mut w = sink(out)?;
            dressing::write_csv(&mut w, pts)?;
            w.flush()?;
            Ok(())
        }
        Format::Json => {
            let v: Vec<JsonPoint> = pts.iter().map(|p| JsonPoint { x: p.x, t: p.t, re_u: p.u.re, im_u: p.u.im }).collect();
            emit_json(out, &v)
        }
    }
}

fn eval_grid(u: &(dyn Fn(f64, f64) -> Result<C> + Sync), xs: &[f64], ts: &[f64]) -> Result<Vec<GridPoint>> {
    use rayon::prelude::*;
    let pts: Vec<(f64, f64)> = xs.iter().flat_map(|&x| ts.iter().map(move |&t| (x, t))).collect();
    pts.par_iter().map(|&(x, t)| Ok(GridPoint { x, t, u: u(x, t)? })).collect()
}

fn execute(cmd: Command) -> std::result::Result<(), Fail> {
    match cmd {
        Command::Classify(t) => {
            let triple = ExponentialTriple::new(t.alpha, t.omega, C::new(t.c_re, t.c_im))?;
            let c = closedform::classify(&triple);
            emit_json(&OutArgs { output: None, format: Format::Json }, &c)?;
            if c.verdict == Verdict::EventuallyAdmissible {
                Ok(())
            } else {
                Err(Fail { code: 3, msg: format!("{:?} is not admissible", c.family) })
            }
        }
        Command::Gate { pair, gates, out } => {
            let pair = pair.resolve()?;
            let rep = admissibility::verdict(&pair, &gates.options())?;
            emit_json(&out, &rep)?;
            if rep.is_admissible() {
                Ok(())
            } else {
                Err(Fail { code: 3, msg: format!("rejected: {:?}", rep.verdict) })
            }
        }
        Command::Spectral { pair, k_re, k_im, s0, s1, ns, tol, out } => {
            let pair = pair.resolve()?;
            match k_re {
                Some(re) => {
                    let s = spectral::sample(&pair, C::new(re, k_im), tol)?;
                    emit_json(&out, &s)
                }
                None => {
                    if ns < 2 {
                        return Err(Error::InvalidInput("--ns must be at least 2".into()).into());
                    }
                    let ks: Vec<C> = linspace(s0, s1, ns).into_iter().map(C::from).collect();
                    let samples = spectral::sample_grid(&pair, &ks, tol)?;
                    match out.format {
                        Format::Json => emit_json(&out, &samples),
                        Format::Csv => {
                            let mut w = sink(&out)?;
                            writeln!(w, "k_re,k_im,re_qb,im_qb,re_pb,im_pb,re_ab2,im_ab2,near_singular")?;
                            for s in &samples {
                                writeln!(
                                    w,
                                    "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{}",
                                    s.k.re, s.k.im, s.qb.re, s.qb.im, s.pb.re, s.pb.im, s.ab2.re, s.ab2.im, s.near_singular
                                )?;
                            }
                            w.flush()?;
                            Ok(())
                        }
                    }
                }
            }
        }
        Command::Poles { pair, gates, out } => {
            let pair = pair.resolve()?;
            let opts = gates.options();
            let scan = admissibility::locate_poles(&pair, opts.n_max, opts.radius_factor, &opts)?;
            emit_json(&out, &scan)
        }
        Command::Build { pair, gates, scalar_tol, out } => {
            let pair = pair.resolve()?;
            let mut opts = PipelineOptions { gates: gates.options(), scalar: None };
            if let Some(tol) = scalar_tol {
                opts.scalar = Some(ScalarOptions { tol, ..ScalarOptions::for_pair(&pair) });
            }
            match pipeline::build(&pair, &opts)? {
                Outcome::Built(b) => emit_json(&out, b.pole_data()),
                Outcome::Rejected(rep) => {
                    emit_json(&OutArgs { output: None, format: Format::Json }, &rep)?;
                    Err(Fail { code: 3, msg: format!("rejected: {:?}", rep.verdict) })
                }
            }
        }
        Command::Eval { descriptor, grid, out } => {
            let pd: PoleData = read_json(&descriptor)?;
            let (xs, ts) = grid.axes(pd.tau())?;
            let sol = DressedSolution::new(pd)?;
            let pts = sol.eval_grid(&xs, &ts)?;
            emit_grid(&out, &pts)
        }
        Command::EvalClosed { closed, grid, out } => {
            let (u, tau, _) = closed.resolve()?;
            let (xs, ts) = grid.axes(tau)?;
            let pts = eval_grid(&*u, &xs, &ts)?;
            emit_grid(&out, &pts)
        }
        Command::Verify { descriptor, closed, pair, grid, h, pde_tol, g0_tol, g1_tol, periodicity_tol, decay_x1, out } => {
            let (u, tau, implied): (Evaluator, f64, Option<PeriodicPair>) = match descriptor {
                Some(path) => {
                    let pd: PoleData = read_json(&path)?;
                    let tau = pd.tau();
                    let sol = DressedSolution::new(pd)?;
                    (Box::new(move |x, t| sol.u(x, t)), tau, None)
                }
                None => closed.resolve()?,
            };
            let pair = if pair.given() { Some(pair.resolve()?) } else { implied };
            let (xs, ts) = grid.axes(tau)?;
            let opts = VerifyOptions { h, pde_tol, g0_tol, g1_tol, periodicity_tol, ..VerifyOptions::default() };
            let decay_xs = linspace(grid.x0, decay_x1.max(grid.x1), 41);
            let rep = verify::verify(&*u, pair.as_ref(), tau, &xs, &ts, &decay_xs, &opts)?;
            emit_json(&out, &rep)?;
            if rep.pass {
                Ok(())
            } else {
                Err(Fail { code: 1, msg: "verification failed".into() })
            }
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let go = move || match execute(cli.command) {
        Ok(()) => 0,
        Err(f) => {
            eprintln!("error: {}", f.msg);
            f.code
        }
    };
    match cli.threads {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(go),
            Err(e) => {
                eprintln!("error: {e}");
                1
            }
        },
        None => go(),
    }
}
