//! The `flipgraph` command line.
//!
//! Exit codes: 0 success, 1 validation or I/O failure, 2 usage error.

use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand, ValueEnum};

use crate::error::Error;
use crate::io::{
    parse_schedule, read_scheme, serialize_schedule, serialize_scheme, serialize_script, trace_csv,
    Manifest,
};
use crate::scheme::{standard_scheme, strassen_scheme, Dims, Scheme};
use crate::search::{
    self, best_of, default_schedule, run_jobs, unconstrained, Checkpoint, PlusPolicy, Search,
    SearchOutcome, SearchParams, SelfCheck, RNG_ALGORITHM,
};
use crate::witness::{brute_force_verify, connectivity_path, BRUTE_FORCE_MAX_BITS};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "flipgraph", version, about = "Search and check matrix multiplication schemes over GF(2)")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run the adaptive flip graph search.
    Search(Box<SearchArgs>),
    /// Check that a scheme file is a valid scheme.
    Verify { file: PathBuf },
    /// Print the rank of a scheme file.
    Rank { file: PathBuf },
    /// Build and self-check a move script from one scheme to another.
    Path {
        from: String,
        to: String,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum PlusArg {
    Off,
    Final,
    All,
}

impl From<PlusArg> for PlusPolicy {
    fn from(p: PlusArg) -> Self {
        match p {
            PlusArg::Off => PlusPolicy::Off,
            PlusArg::Final => PlusPolicy::FinalStage,
            PlusArg::All => PlusPolicy::AllStages,
        }
    }
}

#[derive(clap::Args, Debug)]
pub struct SearchArgs {
    /// Matrix sizes as NxMxP.
    #[arg(long, required_unless_present = "resume")]
    pub dims: Option<String>,
    /// Total iterations per pass [default: 1000000].
    #[arg(long)]
    pub iters: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Non-reducing iterations before a plus transition [default: 5000].
    #[arg(long)]
    pub plus_flag: Option<u64>,
    /// When plus transitions may fire [default: final].
    #[arg(long, value_enum)]
    pub plus: Option<PlusArg>,
    /// `auto` (edge constraints), `none`, or a schedule file [default: auto].
    #[arg(long)]
    pub schedule: Option<String>,
    /// Passes over the schedule [default: 1].
    #[arg(long)]
    pub restarts: Option<u32>,
    /// Attempt a general reduction every G iterations, 0 for never [default: 1000].
    #[arg(long)]
    pub gr_period: Option<u64>,
    /// `standard`, `strassen`, or a scheme file [default: standard].
    #[arg(long)]
    pub init: Option<String>,
    /// Stop once this rank is reached.
    #[arg(long)]
    pub target_rank: Option<usize>,
    /// Trace record spacing [default: 1000].
    #[arg(long)]
    pub trace_stride: Option<u64>,
    /// Best scheme output file.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Trace CSV output file.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    /// Manifest output file [default: <out>.manifest].
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    /// Checkpoint file, rewritten every --checkpoint-every iterations.
    #[arg(long)]
    pub checkpoint: Option<PathBuf>,
    #[arg(long, default_value_t = 100_000)]
    pub checkpoint_every: u64,
    /// Continue from a checkpoint; the run parameters come from it.
    #[arg(long)]
    pub resume: Option<PathBuf>,
    /// Independent runs in parallel, seeds derived from --seed.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
}

#[derive(Debug)]
enum Fail {
    Usage(String),
    Failure(String),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        match e {
            Error::Params(_) | Error::Dims { .. } => Fail::Usage(e.to_string()),
            _ => Fail::Failure(e.to_string()),
        }
    }
}

type CliResult<T> = std::result::Result<T, Fail>;

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let res = match cli.command {
        Command::Search(a) => cmd_search(&a),
        Command::Verify { file } => cmd_verify(&file),
        Command::Rank { file } => cmd_rank(&file),
        Command::Path { from, to, out } => cmd_path(&from, &to, &out),
    };
    match res {
        Ok(()) => EXIT_OK,
        Err(Fail::Usage(m)) => {
            eprintln!("error: {m}");
            EXIT_USAGE
        }
        Err(Fail::Failure(m)) => {
            eprintln!("error: {m}");
            EXIT_FAILURE
        }
    }
}

/// `standard:NxMxP`, `strassen`, or a scheme file.
pub fn load_scheme_arg(arg: &str) -> crate::error::Result<Scheme> {
    if let Some(d) = arg.strip_prefix("standard:") {
        let d: Dims = d.parse()?;
        return standard_scheme(d.n, d.m, d.p);
    }
    if arg == "strassen" {
        return Ok(strassen_scheme());
    }
    read_scheme(Path::new(arg)).map_err(|e| match e {
        Error::Io(io) => Error::Io(std::io::Error::new(io.kind(), format!("{arg}: {io}"))),
        e => e,
    })
}

fn write(path: &Path, text: &str) -> CliResult<()> {
    std::fs::write(path, text).map_err(|e| Fail::Failure(format!("{}: {e}", path.display())))
}

fn unix_now() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

fn plus_name(p: PlusPolicy) -> &'static str {
    match p {
        PlusPolicy::Off => "off",
        PlusPolicy::FinalStage => "final",
        PlusPolicy::AllStages => "all",
    }
}

fn build_params(a: &SearchArgs) -> CliResult<(SearchParams, Scheme, String)> {
    let dims: Dims = a
        .dims
        .as_deref()
        .ok_or_else(|| Fail::Usage("--dims is required".into()))?
        .parse()?;
    let iters = a.iters.unwrap_or(1_000_000);
    let mut p = SearchParams::new(dims, iters);
    p.schedule = match a.schedule.as_deref().unwrap_or("auto") {
        "auto" => default_schedule(dims.n, dims.m, dims.p, iters)?,
        "none" => unconstrained(dims, iters),
        file => {
            if a.iters.is_some() {
                return Err(Fail::Usage("--iters conflicts with a schedule file, which carries its own budgets".into()));
            }
            let text = std::fs::read_to_string(file).map_err(|e| Fail::Failure(format!("{file}: {e}")))?;
            parse_schedule(&text)?
        }
    };
    p.seed = a.seed.unwrap_or(0);
    p.plus_flag = a.plus_flag.unwrap_or(p.plus_flag);
    p.plus_policy = a.plus.map(PlusPolicy::from).unwrap_or(p.plus_policy);
    p.restarts = a.restarts.unwrap_or(1);
    p.general_reduction_period = a.gr_period.unwrap_or(p.general_reduction_period);
    p.trace_stride = a.trace_stride.unwrap_or(p.trace_stride);
    p.target_rank = a.target_rank;
    p.checkpoint_every = if a.checkpoint.is_some() { a.checkpoint_every } else { 0 };
    p.self_check = SelfCheck::Sampled;
    p.validate()?;

    let init_arg = a.init.clone().unwrap_or_else(|| "standard".into());
    let init = if init_arg == "standard" {
        standard_scheme(dims.n, dims.m, dims.p)?
    } else {
        load_scheme_arg(&init_arg)?
    };
    if init.dims() != dims {
        return Err(Fail::Usage(format!(
            "--init scheme is {} but --dims is {dims}",
            init.dims()
        )));
    }
    Ok((p, init, init_arg))
}

fn manifest_for(p: &SearchParams, init: &str, jobs: usize, started: u64) -> Manifest {
    let mut m = Manifest::default();
    m.set("artifact", concat!("flipgraph ", env!("CARGO_PKG_VERSION")));
    m.set("rng", RNG_ALGORITHM);
    m.set("dims", p.dims);
    m.set("seed", p.seed);
    m.set("iterations_per_pass", p.iterations_per_pass());
    m.set(
        "schedule",
        serialize_schedule(&p.schedule).trim_end().replace('\n', "; "),
    );
    m.set("plus_flag", p.plus_flag);
    m.set("plus_policy", plus_name(p.plus_policy));
    m.set("restarts", p.restarts);
    m.set("gr_period", p.general_reduction_period);
    m.set("trace_stride", p.trace_stride);
    m.set("target_rank", p.target_rank.map_or("none".into(), |t| t.to_string()));
    m.set("checkpoint_every", p.checkpoint_every);
    m.set("init", init);
    m.set("jobs", jobs);
    m.set("started_unix", started);
    m
}

fn cmd_search(a: &SearchArgs) -> CliResult<()> {
    let started = unix_now();
    if a.jobs == 0 {
        return Err(Fail::Usage("--jobs must be at least 1".into()));
    }
    let (outcome, params, init_name, seeds) = if let Some(cp_path) = &a.resume {
        let given = [
            a.dims.is_some(),
            a.iters.is_some(),
            a.seed.is_some(),
            a.plus_flag.is_some(),
            a.plus.is_some(),
            a.schedule.is_some(),
            a.restarts.is_some(),
            a.gr_period.is_some(),
            a.init.is_some(),
            a.target_rank.is_some(),
            a.trace_stride.is_some(),
        ];
        if given.iter().any(|&g| g) || a.jobs != 1 {
            return Err(Fail::Usage(
                "--resume takes its parameters from the checkpoint; drop the other search flags".into(),
            ));
        }
        let cp = Checkpoint::read(cp_path)?;
        let params = cp.params().clone();
        let search = Search::resume(cp)?;
        let out = match &a.checkpoint {
            Some(path) => search.run_checkpointed(path)?,
            None => search.run(),
        };
        (out, params, format!("checkpoint {}", cp_path.display()), vec![])
    } else {
        let (params, init, init_name) = build_params(a)?;
        if a.jobs > 1 {
            if a.checkpoint.is_some() {
                return Err(Fail::Usage("--checkpoint needs a single job".into()));
            }
            let outs = run_jobs(&params, &init, a.jobs)?;
            let seeds: Vec<u64> = (0..a.jobs as u64).map(|k| search::job_seed(params.seed, k)).collect();
            let best = best_of(&outs).expect("at least one job").clone();
            (best, params, init_name, seeds)
        } else {
            let search = Search::new(params.clone(), &init)?;
            let out = match &a.checkpoint {
                Some(path) => search.run_checkpointed(path)?,
                None => search.run(),
            };
            (out, params, init_name, vec![])
        }
    };
    report(a, &outcome, &params, &init_name, &seeds, started)
}

fn report(
    a: &SearchArgs,
    out: &SearchOutcome,
    params: &SearchParams,
    init: &str,
    seeds: &[u64],
    started: u64,
) -> CliResult<()> {
    if !out.best.verify() {
        return Err(Fail::Failure("internal error: best scheme does not verify".into()));
    }
    if let Some(path) = &a.out {
        write(path, &serialize_scheme(&out.best))?;
    }
    if let Some(path) = &a.trace {
        write(path, &trace_csv(&out.stats.trace))?;
    }
    let manifest_path = a
        .manifest
        .clone()
        .or_else(|| a.out.as_ref().map(|o| PathBuf::from(format!("{}.manifest", o.display()))));
    if let Some(path) = manifest_path {
        let mut m = manifest_for(params, init, a.jobs, started);
        if !seeds.is_empty() {
            m.set("job_seeds", seeds.iter().map(u64::to_string).collect::<Vec<_>>().join(","));
        }
        m.set("finished_unix", unix_now());
        m.set("initial_rank", out.stats.initial_rank);
        m.set("best_rank", out.best.rank());
        m.set("best_iteration", out.stats.best_iteration);
        m.set("iterations_run", out.stats.iterations);
        m.set("flips", out.stats.flips);
        m.set("pairwise_reductions", out.stats.pairwise_reductions);
        m.set("general_reductions", out.stats.general_reductions);
        m.set("plus_transitions", out.stats.plus_transitions);
        m.set(
            "output",
            a.out.as_ref().map_or("none".into(), |o| o.display().to_string()),
        );
        write(&path, &m.to_text())?;
    }
    println!(
        "dims {} best rank {} (initial {}, reached at iteration {} of {})",
        params.dims,
        out.best.rank(),
        out.stats.initial_rank,
        out.stats.best_iteration,
        out.stats.iterations
    );
    Ok(())
}

fn cmd_verify(file: &Path) -> CliResult<()> {
    let s = read_scheme(file)?;
    let d = s.dims();
    let bits = d.n * d.m + d.m * d.p;
    if bits <= BRUTE_FORCE_MAX_BITS {
        if !brute_force_verify(&s)? {
            return Err(Fail::Failure("brute-force check disagrees: scheme is invalid".into()));
        }
        println!("valid: {} rank {} (tensor check and all 2^{bits} matrix pairs)", d, s.rank());
    } else {
        println!("valid: {} rank {} (tensor check)", d, s.rank());
    }
    Ok(())
}

fn cmd_rank(file: &Path) -> CliResult<()> {
    println!("{}", read_scheme(file)?.rank());
    Ok(())
}

fn cmd_path(from: &str, to: &str, out: &Path) -> CliResult<()> {
    let src = load_scheme_arg(from)?;
    let dst = load_scheme_arg(to)?;
    if src.dims() != dst.dims() {
        return Err(Fail::Usage(format!("{} and {} differ in shape", src.dims(), dst.dims())));
    }
    let script = connectivity_path(&src, &dst)?;
    write(out, &serialize_script(&script))?;
    let text = std::fs::read_to_string(out).map_err(|e| Fail::Failure(e.to_string()))?;
    let again = crate::io::parse_script(&text, &src)?;
    let (end, peak) = again.replay()?;
    if end != dst {
        return Err(Fail::Failure("replayed script does not end at the target".into()));
    }
    println!(
        "path of {} moves from rank {} to rank {} (peak rank {peak}), replay ok",
        again.len(),
        src.rank(),
        dst.rank()
    );
    Ok(())
}
