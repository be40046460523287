use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::fmt::Write as _;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gkp_magic::analytic::{
    h_state_magic, mphi_asymptote, mphi_magic, qft_inv_magic, MAX_ANALYTIC_QUBITS,
};
use gkp_magic::bounds::{
    compare_bounds_p1, deterministic_bound, gate_resource_state, probabilistic_bound,
    t_count_bound, ConversionBound, GateRoute, TCountBound, TCountTarget,
};
use gkp_magic::gates::{
    choi_state, cnx, composite_u1_u2, fredkin, named_gate, plus_state_image, toffoli,
};
use gkp_magic::measures::{
    cell_log_negativity, cell_negativity, discrete_wigner_sum_negativity, renyi_half, tilde_magic,
    MAX_NAIVE_QUBITS,
};
use gkp_magic::optimize::{
    most_magic_single_qubit_unitary, most_magic_state, most_magic_two_qubit_unitary, Method,
    OptimizerConfig, OptimumReport,
};
use gkp_magic::state::random_haar_state;
use gkp_magic::{
    gkp_magic, st_norm, Circuit, DensityOperator, EvalPath, GateUnitary, MagicError, MagicReport,
    Measure, PureState,
};

#[derive(Parser)]
#[command(
    name = "gkp-magic",
    version,
    about = "GKP-Magic of qubit states and gates"
)]
struct Cli {
    /// Worker threads for the FWHT and optimizer (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Write CSV to this file instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a measure on a state file or circuit.
    Compute(ComputeArgs),
    /// Print the resource state of a gate in the state text format.
    Gate {
        #[command(subcommand)]
        kind: GateCommand,
    },
    /// Resource-conversion and T-count bounds.
    Bound {
        #[command(subcommand)]
        kind: BoundCommand,
    },
    /// Multi-start search for the most magic state or unitary.
    Optimize {
        #[command(subcommand)]
        kind: OptimizeCommand,
        #[command(flatten)]
        opts: OptimizerArgs,
    },
    /// Regenerate the reference tables and curves as CSV.
    Reproduce {
        #[command(subcommand)]
        kind: ReproduceCommand,
    },
    /// Time the Pauli-sum evaluation on random states.
    Bench(BenchArgs),
}

#[derive(Args)]
#[command(group = clap::ArgGroup::new("input").required(true))]
struct ComputeArgs {
    /// State file (`-` reads stdin).
    #[arg(long, group = "input")]
    state: Option<String>,
    /// Circuit applied to |0...0>, e.g. "H 1; T 1".
    #[arg(long, group = "input")]
    circuit: Option<String>,
    #[arg(long, value_enum, default_value_t = MeasureArg::Gkp)]
    measure: MeasureArg,
    #[arg(long, value_enum, default_value_t = PathArg::Fwht)]
    path: PathArg,
}

#[derive(Clone, Copy, ValueEnum)]
enum MeasureArg {
    Gkp,
    Stnorm,
    Cellneg,
    Celllogneg,
    Renyi,
    Tilde,
    Sumneg,
}

#[derive(Clone, Copy, ValueEnum)]
enum PathArg {
    Naive,
    Fwht,
}

impl From<PathArg> for EvalPath {
    fn from(p: PathArg) -> Self {
        match p {
            PathArg::Naive => EvalPath::Naive,
            PathArg::Fwht => EvalPath::Fwht,
        }
    }
}

#[derive(Args)]
#[command(group = clap::ArgGroup::new("unitary").required(true))]
struct GateSource {
    /// Named gate: toffoli, fredkin, u1, u2, cnx:N, cnz:N, cns:N, mphase:N:PHI, adder:N, ...
    #[arg(long, group = "unitary")]
    gate: Option<String>,
    /// Circuit whose unitary is used.
    #[arg(long, group = "unitary")]
    circuit: Option<String>,
}

impl GateSource {
    fn unitary(&self) -> Result<GateUnitary, MagicError> {
        match (&self.gate, &self.circuit) {
            (Some(name), _) => named_gate(name),
            (None, Some(spec)) => Circuit::parse(spec)?.unitary(),
            (None, None) => unreachable!("clap enforces one source"),
        }
    }
}

#[derive(Subcommand)]
enum GateCommand {
    /// Choi state `(U ⊗ 1)` applied to the maximally entangled state.
    Choi(GateSource),
    /// `U |+>^{⊗n}` for a diagonal gate.
    Plus(GateSource),
}

#[derive(Clone, Copy, ValueEnum)]
enum RouteArg {
    Auto,
    Plus,
    Choi,
}

impl From<RouteArg> for GateRoute {
    fn from(r: RouteArg) -> Self {
        match r {
            RouteArg::Auto => GateRoute::Auto,
            RouteArg::Plus => GateRoute::PlusState,
            RouteArg::Choi => GateRoute::Choi,
        }
    }
}

#[derive(Subcommand)]
enum BoundCommand {
    /// Lower bound on the number of T gates.
    Tcount {
        #[arg(long, conflicts_with_all = ["circuit", "state"])]
        gate: Option<String>,
        /// Circuit whose unitary is bounded.
        #[arg(long, conflicts_with = "state")]
        circuit: Option<String>,
        /// Target state file (`-` reads stdin).
        #[arg(long)]
        state: Option<String>,
        #[arg(long, value_enum, default_value_t = RouteArg::Auto)]
        route: RouteArg,
    },
    /// Copies of the input needed for `m` outputs with certainty.
    Deterministic {
        #[arg(long)]
        magic_in: f64,
        #[arg(long)]
        magic_out: f64,
        #[arg(long, default_value_t = 1)]
        m: u64,
    },
    /// Expected copies for a protocol succeeding with probability `p`.
    Probabilistic {
        #[arg(long)]
        magic_in: f64,
        #[arg(long)]
        magic_out: f64,
        #[arg(long, default_value_t = 1)]
        m: u64,
        #[arg(long)]
        p: f64,
        /// Qubits per input state.
        #[arg(long, default_value_t = 1)]
        r: u64,
        /// Qubits per output state.
        #[arg(long, default_value_t = 1)]
        s: u64,
    },
    /// Deterministic bound against the `p = 1` cell-negativity bound.
    Compare {
        #[arg(long)]
        magic_in: f64,
        #[arg(long)]
        magic_out: f64,
        #[arg(long, default_value_t = 1)]
        m: u64,
        #[arg(long)]
        k: u64,
        #[arg(long, default_value_t = 1)]
        r: u64,
        #[arg(long, default_value_t = 1)]
        s: u64,
    },
}

#[derive(Subcommand)]
enum OptimizeCommand {
    /// Most magic `n`-qubit state.
    State {
        #[arg(long)]
        n: usize,
        /// Also write the best state to this file.
        #[arg(long)]
        save: Option<PathBuf>,
    },
    /// Most magic single-qubit unitary (Choi state).
    Unitary1,
    /// Most magic two-qubit unitary (Choi state).
    Unitary2,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    NelderMead,
    Gradient,
}

#[derive(Args)]
struct OptimizerArgs {
    #[arg(long, default_value_t = 64, global = true)]
    restarts: usize,
    #[arg(long, default_value_t = 2000, global = true)]
    max_iters: u64,
    #[arg(long, default_value_t = 0, global = true)]
    seed: u64,
    #[arg(long, default_value_t = 1e-10, global = true)]
    tolerance: f64,
    #[arg(long, value_enum, default_value_t = MethodArg::NelderMead, global = true)]
    method: MethodArg,
}

impl OptimizerArgs {
    fn config(&self) -> OptimizerConfig {
        OptimizerConfig {
            restarts: self.restarts,
            max_iters: self.max_iters,
            seed: self.seed,
            tolerance: self.tolerance,
            method: match self.method {
                MethodArg::NelderMead => Method::NelderMead,
                MethodArg::Gradient => Method::FiniteDiffGradientAscent,
            },
        }
    }
}

#[derive(Subcommand)]
enum ReproduceCommand {
    /// Diagonal-gate states with T-count bounds.
    Table1,
    /// Choi states of non-diagonal gates with T-count bounds.
    Table2,
    /// Multiply-controlled phase magic against register size.
    Fig1 {
        /// Comma-separated angles in radians.
        #[arg(long, value_delimiter = ',', default_values_t = [PI, FRAC_PI_2, FRAC_PI_4])]
        phis: Vec<f64>,
        #[arg(long, default_value_t = 20)]
        max_n: usize,
    },
    /// Inverse-QFT product-state magic against register size.
    Adder {
        #[arg(long, default_value_t = 20)]
        max_n: usize,
    },
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, value_delimiter = ',', default_values_t = [8usize, 10, 12])]
    n: Vec<usize>,
    #[arg(long, value_enum, default_value_t = PathArg::Fwht)]
    path: PathArg,
    #[arg(long, default_value_t = 3)]
    repeats: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug)]
enum CliError {
    Magic(MagicError),
    Io(String),
    Usage(String),
}

impl From<MagicError> for CliError {
    fn from(e: MagicError) -> Self {
        CliError::Magic(e)
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Magic(e) if e.is_resource_error() => 3,
            _ => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Magic(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
            CliError::Usage(e) => f.write_str(e),
        }
    }
}

type CliResult<T> = Result<T, CliError>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn thread_count(flag: Option<usize>) -> CliResult<Option<usize>> {
    match std::env::var("MAGIC_THREADS") {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(CliError::Usage(format!(
                "MAGIC_THREADS must be a positive integer, got `{v}`"
            ))),
        },
        Err(_) => match flag {
            Some(0) => Err(CliError::Usage("--threads must be positive".into())),
            other => Ok(other),
        },
    }
}

fn run(cli: Cli) -> CliResult<()> {
    if let Some(n) = thread_count(cli.threads)? {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(e.to_string()))?;
    }
    let out = match cli.command {
        Command::Compute(args) => compute(&args)?,
        Command::Gate { kind } => gate(&kind)?,
        Command::Bound { kind } => bound(&kind)?,
        Command::Optimize { kind, opts } => optimize(&kind, &opts)?,
        Command::Reproduce { kind } => reproduce(&kind)?,
        Command::Bench(args) => bench(&args)?,
    };
    match cli.output {
        Some(path) => std::fs::write(path, out)?,
        None => io::stdout().write_all(out.as_bytes())?,
    }
    Ok(())
}

fn read_state(path: &str) -> CliResult<PureState> {
    let text = if path == "-" {
        let mut buf = String::new();
        io::stdin().read_to_string(&mut buf)?;
        buf
    } else {
        std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{path}: {e}")))?
    };
    Ok(PureState::from_text(&text)?)
}

fn header(out: &mut String, what: &str, seed: u64) {
    let _ = writeln!(out, "# gkp-magic {what} seed={seed}");
}

fn compute(args: &ComputeArgs) -> CliResult<String> {
    let psi = match (&args.state, &args.circuit) {
        (Some(path), _) => read_state(path)?,
        (None, Some(spec)) => Circuit::parse(spec)?.run_from_zero()?,
        (None, None) => unreachable!("clap enforces one input"),
    };
    let path = EvalPath::from(args.path);
    let n = psi.n();
    let timed = |measure: Measure, path: EvalPath, f: &dyn Fn() -> Result<f64, MagicError>| {
        let start = Instant::now();
        f().map(|value| MagicReport {
            measure,
            n,
            value,
            path,
            elapsed: start.elapsed().as_secs_f64(),
            diagnostic: None,
        })
    };
    let report = match args.measure {
        MeasureArg::Gkp => gkp_magic(&psi, path)?,
        MeasureArg::Stnorm => timed(Measure::StNorm, path, &|| st_norm(&psi, path))?,
        MeasureArg::Cellneg => timed(Measure::CellNegativity, EvalPath::Fwht, &|| {
            cell_negativity(&psi)
        })?,
        MeasureArg::Celllogneg => timed(Measure::CellLogNegativity, EvalPath::Fwht, &|| {
            cell_log_negativity(&psi)
        })?,
        MeasureArg::Renyi => timed(Measure::RenyiHalf, EvalPath::Naive, &|| renyi_half(&psi))?,
        MeasureArg::Sumneg => timed(Measure::SumNegativity, EvalPath::Naive, &|| {
            discrete_wigner_sum_negativity(&psi)
        })?,
        MeasureArg::Tilde => tilde_magic(&DensityOperator::from(&psi))?,
    };
    let mut out = String::new();
    header(&mut out, "compute", 0);
    let _ = writeln!(out, "{}", MagicReport::CSV_HEADER);
    let _ = writeln!(out, "{}", report.csv_row());
    Ok(out)
}

fn gate(kind: &GateCommand) -> CliResult<String> {
    let state = match kind {
        GateCommand::Choi(src) => choi_state(&src.unitary()?)?,
        GateCommand::Plus(src) => plus_state_image(&src.unitary()?)?,
    };
    Ok(state.to_text())
}

fn tcount_row(out: &mut String, label: &str, t: &TCountBound) {
    let _ = writeln!(
        out,
        "{label},{:.4},{:.4},{:.4},{},{},{}",
        t.target_magic,
        t.unit_magic,
        t.ratio,
        t.m_floor,
        t.reported,
        t.summary()
    );
}

const TCOUNT_HEADER: &str = "target,target_magic,unit_magic,ratio,m_floor,reported,summary";

fn opt<T: std::fmt::Display>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn conversion_csv(b: &ConversionBound) -> String {
    let mut out = String::new();
    header(&mut out, "bound", 0);
    let _ = writeln!(out, "kind,magic_in,magic_out,m,p,r,s,k_min,k_min_int");
    let _ = writeln!(
        out,
        "{:?},{:.4},{:.4},{},{},{},{},{:.4},{}",
        b.kind,
        b.magic_in,
        b.magic_out,
        b.m,
        opt(b.p),
        opt(b.r),
        opt(b.s),
        b.k_min,
        b.k_min_int
    );
    out
}

fn bound(kind: &BoundCommand) -> CliResult<String> {
    match kind {
        BoundCommand::Tcount {
            gate,
            circuit,
            state,
            route,
        } => {
            let (label, t) = match (gate, circuit, state) {
                (Some(name), _, _) => {
                    let u = named_gate(name)?;
                    (
                        name.clone(),
                        t_count_bound(TCountTarget::Gate(&u, (*route).into()))?,
                    )
                }
                (None, Some(spec), _) => {
                    let u = Circuit::parse(spec)?.unitary()?;
                    (
                        "circuit".to_string(),
                        t_count_bound(TCountTarget::Gate(&u, (*route).into()))?,
                    )
                }
                (None, None, Some(path)) => {
                    let psi = read_state(path)?;
                    (
                        "state".to_string(),
                        t_count_bound(TCountTarget::State(&psi))?,
                    )
                }
                (None, None, None) => {
                    return Err(CliError::Usage(
                        "bound tcount needs one of --gate, --circuit or --state".into(),
                    ))
                }
            };
            let mut out = String::new();
            header(&mut out, "bound tcount", 0);
            let _ = writeln!(out, "{TCOUNT_HEADER}");
            tcount_row(&mut out, &label, &t);
            Ok(out)
        }
        BoundCommand::Deterministic {
            magic_in,
            magic_out,
            m,
        } => Ok(conversion_csv(&deterministic_bound(
            *magic_in, *magic_out, *m,
        )?)),
        BoundCommand::Probabilistic {
            magic_in,
            magic_out,
            m,
            p,
            r,
            s,
        } => Ok(conversion_csv(&probabilistic_bound(
            *magic_in, *magic_out, *m, *p, *r, *s,
        )?)),
        BoundCommand::Compare {
            magic_in,
            magic_out,
            m,
            k,
            r,
            s,
        } => {
            let c = compare_bounds_p1(*magic_in, *magic_out, *m, *k, *r, *s)?;
            let mut out = String::new();
            header(&mut out, "bound compare", 0);
            let _ = writeln!(
                out,
                "gkp_ratio,cell_ratio,cell_ratio_at_k,qubits_conserved,gkp_tighter"
            );
            let _ = writeln!(
                out,
                "{:.4},{:.4},{:.4},{},{}",
                c.gkp_ratio, c.cell_ratio, c.cell_ratio_at_k, c.qubits_conserved, c.gkp_tighter
            );
            Ok(out)
        }
    }
}

fn params_field(p: &[f64]) -> String {
    p.iter()
        .map(|x| format!("{x:.6}"))
        .collect::<Vec<_>>()
        .join(";")
}

fn optimum_row(out: &mut String, target: &str, r: &OptimumReport, restarts: usize) {
    let _ = writeln!(
        out,
        "{target},{:.4},{},{},{}",
        r.best_value,
        r.restarts_hitting_best,
        restarts,
        params_field(&r.best_params)
    );
}

fn optimize(kind: &OptimizeCommand, opts: &OptimizerArgs) -> CliResult<String> {
    let cfg = opts.config();
    cfg.validate()?;
    let mut out = String::new();
    header(&mut out, "optimize", cfg.seed);
    let _ = writeln!(
        out,
        "target,best_value,restarts_hitting_best,restarts,params"
    );
    match kind {
        OptimizeCommand::State { n, save } => {
            let r = most_magic_state(*n, &cfg)?;
            optimum_row(&mut out, &format!("state_n{n}"), &r, cfg.restarts);
            if let Some(path) = save {
                std::fs::write(path, r.best_state.to_text())?;
            }
        }
        OptimizeCommand::Unitary1 => {
            let r = most_magic_single_qubit_unitary(&cfg)?;
            optimum_row(&mut out, "unitary_1q", &r.report, cfg.restarts);
            let _ = writeln!(
                out,
                "unitary_1q_alpha_pi4,{:.4},,,0.000000;0.785398;0.785398",
                r.alpha_pi4_value
            );
        }
        OptimizeCommand::Unitary2 => {
            let r = most_magic_two_qubit_unitary(&cfg)?;
            optimum_row(&mut out, "unitary_2q", &r, cfg.restarts);
        }
    }
    Ok(out)
}

fn table1_rows() -> Vec<(&'static str, &'static str)> {
    vec![
        ("T_1", "T 1"),
        ("T_12", "T 1; T 2"),
        ("CS_12", "CS 1 2"),
        ("T_123", "T 1; T 2; T 3"),
        ("CS_12_13", "CS 1 2; CS 1 3"),
        ("T_1CS_23", "T 1; CS 2 3"),
        ("T_1CS_12_13", "T 1; CS 1 2; CS 1 3"),
        ("C^2Z", "CNZ 1 2 3"),
        ("C^3Z", "CNZ 1 2 3 4"),
        ("C^4Z", "CNZ 1 2 3 4 5"),
        ("C^2S", "CNS 1 2 3"),
        ("C^3S", "CNS 1 2 3 4"),
        ("C^4S", "CNS 1 2 3 4 5"),
    ]
}

fn reproduce(kind: &ReproduceCommand) -> CliResult<String> {
    let mut out = String::new();
    match kind {
        ReproduceCommand::Table1 => {
            header(&mut out, "reproduce table1", 0);
            let _ = writeln!(out, "{TCOUNT_HEADER},n");
            for (label, spec) in table1_rows() {
                let psi = Circuit::parse(spec)?.run_from_plus()?;
                let t = t_count_bound(TCountTarget::State(&psi))?;
                let mut row = String::new();
                tcount_row(&mut row, label, &t);
                let _ = writeln!(out, "{},{}", row.trim_end(), psi.n());
            }
        }
        ReproduceCommand::Table2 => {
            header(&mut out, "reproduce table2", 0);
            let _ = writeln!(out, "{TCOUNT_HEADER},n");
            let (u1, u2) = composite_u1_u2();
            let gates = [
                ("Toffoli", toffoli()),
                ("Fredkin", fredkin()),
                ("C^3X", cnx(4)?),
                ("C^4X", cnx(5)?),
                ("C^5X", cnx(6)?),
                ("U_1", u1),
                ("U_2", u2),
            ];
            for (label, u) in gates {
                let (state, _) = gate_resource_state(&u, GateRoute::Choi)?;
                let t = t_count_bound(TCountTarget::State(&state))?;
                let mut row = String::new();
                tcount_row(&mut row, label, &t);
                let _ = writeln!(out, "{},{}", row.trim_end(), state.n());
            }
        }
        ReproduceCommand::Fig1 { phis, max_n } => {
            if *max_n > MAX_ANALYTIC_QUBITS {
                return Err(MagicError::DimensionOverflow {
                    what: "fig1 register",
                    n: *max_n,
                    max: MAX_ANALYTIC_QUBITS,
                }
                .into());
            }
            header(&mut out, "reproduce fig1", 0);
            let _ = writeln!(out, "phi,n,magic,asymptote");
            for &phi in phis {
                let limit = mphi_asymptote(phi).ok();
                for n in 1..=*max_n {
                    let (value, _) = mphi_magic(n, phi)?;
                    let limit = limit.map(|l| format!("{l:.4}")).unwrap_or_default();
                    let _ = writeln!(out, "{phi:.6},{n},{value:.4},{limit}");
                }
            }
        }
        ReproduceCommand::Adder { max_n } => {
            if *max_n > MAX_ANALYTIC_QUBITS {
                return Err(MagicError::DimensionOverflow {
                    what: "adder register",
                    n: *max_n,
                    max: MAX_ANALYTIC_QUBITS,
                }
                .into());
            }
            header(&mut out, "reproduce adder", 0);
            let _ = writeln!(out, "n,magic,upper_bound");
            for n in 1..=*max_n {
                let _ = writeln!(
                    out,
                    "{n},{:.4},{:.4}",
                    qft_inv_magic(n),
                    n as f64 * h_state_magic()
                );
            }
        }
    }
    Ok(out)
}

fn bench(args: &BenchArgs) -> CliResult<String> {
    if args.repeats == 0 {
        return Err(CliError::Usage("--repeats must be at least 1".into()));
    }
    let path = EvalPath::from(args.path);
    let mut out = String::new();
    header(&mut out, "bench", args.seed);
    let _ = writeln!(out, "n,path,sample,elapsed_s,value,median,cross_path_diff");
    for &n in &args.n {
        let psi = random_haar_state(n, args.seed)?;
        let mut samples = Vec::with_capacity(args.repeats);
        for _ in 0..args.repeats {
            samples.push(gkp_magic(&psi, path)?);
        }
        let cross = if n <= MAX_NAIVE_QUBITS.min(8) {
            let other = match path {
                EvalPath::Naive => EvalPath::Fwht,
                _ => EvalPath::Naive,
            };
            let v = gkp_magic(&psi, other)?.value;
            format!("{:.3e}", (v - samples[0].value).abs())
        } else {
            String::new()
        };
        let mut order: Vec<usize> = (0..samples.len()).collect();
        order.sort_by(|&a, &b| samples[a].elapsed.total_cmp(&samples[b].elapsed));
        let median = order[(samples.len() - 1) / 2];
        for (k, s) in samples.iter().enumerate() {
            let _ = writeln!(
                out,
                "{n},{path},{k},{:.6},{:.4},{},{cross}",
                s.elapsed,
                s.value,
                k == median
            );
        }
    }
    Ok(out)
}
