use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use permprod::bp::{self, BranchingProgram};
use permprod::leakage::{self, AmplifierParams, LeakageFunction};
use permprod::product::{ProductVector, VectorMap};
use permprod::reduce::{self, CandidateMode, SingleAnswer, WitnessKind};
use permprod::transform;
use permprod::verify;
use permprod::Permutation;

const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser)]
#[command(name = "permprod", version, about = "Permutation-product toolkit")]
struct Cli {
    /// Worker threads for parallel sections; results are bit-identical
    /// regardless of the count
    #[arg(long, global = true, value_name = "N")]
    workers: Option<usize>,

    /// Permutation printing style
    #[arg(long, global = true, value_enum, default_value_t = Format::Cycles)]
    format: Format,

    #[command(subcommand)]
    command: Cmd,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Cycles,
    Images,
}

#[derive(Subcommand)]
enum Cmd {
    /// Algebra calculator on explicit permutations
    Perm {
        /// Degree of the ambient group; literals never infer it
        #[arg(long)]
        t: usize,
        /// compose | inverse | power | commutator | conjugate | type | apply
        op: String,
        /// Quoted cycle-notation operands, plus an integer for power/apply
        args: Vec<String>,
    },

    /// Build a rewrite script from one even element to another and
    /// re-check it by application
    Convert {
        #[arg(long)]
        t: usize,
        /// Source element, quoted cycles
        #[arg(long)]
        from: String,
        /// Target element, quoted cycles
        #[arg(long)]
        to: String,
        /// Script file destination (stdout when omitted)
        #[arg(long, short = 'o')]
        out: Option<PathBuf>,
    },

    /// Build an entrywise vector map between product classes, or apply
    /// a saved one to a vector file
    Map {
        /// Degree (build mode)
        #[arg(long)]
        t: Option<usize>,
        /// Source class representative (build mode)
        #[arg(long)]
        alpha: Option<String>,
        /// Target class representative (build mode)
        #[arg(long)]
        beta: Option<String>,
        /// Input vector length the map accepts (build mode)
        #[arg(long)]
        len: Option<usize>,
        /// Map file to apply (switches to apply mode)
        #[arg(long)]
        apply: Option<PathBuf>,
        /// Vector file for apply mode; every vector in it is mapped
        #[arg(long)]
        vector: Option<PathBuf>,
        #[arg(long, short = 'o')]
        out: Option<PathBuf>,
    },

    /// Encode a branching program under an input as a dart permutation
    /// whose cycle structure carries the decision
    CompileBp {
        /// Program file
        #[arg(long)]
        bp: PathBuf,
        /// Input bits, e.g. 1011
        #[arg(long)]
        x: String,
        /// Also run the direct evaluator and require agreement
        #[arg(long)]
        check: bool,
        /// Write the same block to a file as well
        #[arg(long, short = 'o')]
        out: Option<PathBuf>,
    },

    /// Compile a program-input pair into identity-or-not product
    /// instances with a provenance manifest
    ReduceId {
        #[arg(long)]
        bp: PathBuf,
        #[arg(long)]
        x: String,
        #[arg(long, short = 'o')]
        out: Option<PathBuf>,
    },

    /// Decide identity vs a fixed double transposition by streaming
    /// wrapped candidates through a fold decider
    ReduceSingle {
        /// Vector file; '#' lines are ignored
        #[arg(long)]
        vector: PathBuf,
        /// Which vector of the file to decide
        #[arg(long, default_value_t = 0)]
        index: usize,
        /// Candidate budget for the streamed search
        #[arg(long, default_value_t = 200_000)]
        budget: u64,
        /// Enumerate conjugators too instead of deriving them
        #[arg(long)]
        enumerate_gamma3: bool,
    },

    /// Draw uniformly rerandomized vectors whose product stays in a
    /// fixed class
    Sample {
        #[arg(long)]
        t: usize,
        /// Class representative, even, quoted cycles
        #[arg(long)]
        alpha: String,
        /// Vector length (defaults to t)
        #[arg(long)]
        len: Option<usize>,
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, short = 'o')]
        out: Option<PathBuf>,
    },

    /// Total variation distance between a leak's output on a class and
    /// on the identity class, exact or sampled
    Tvd {
        #[arg(long)]
        t: usize,
        #[arg(long)]
        alpha: String,
        /// Leak spec, repeatable: coord:i | fold-indicator |
        /// point-image:p | first-bits:k | planted:gap
        #[arg(long, required = true)]
        leak: Vec<String>,
        /// Enumerate both distributions exactly (small degrees only)
        #[arg(long)]
        exact: bool,
        /// Monte Carlo sample count per distribution
        #[arg(long)]
        n: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Vector length (defaults to t)
        #[arg(long)]
        len: Option<usize>,
        #[arg(long, short = 'o')]
        out: Option<PathBuf>,
    },

    /// Measure the thresholded-count decider's error rate on promise
    /// instances from both classes
    Amplify {
        #[arg(long)]
        t: usize,
        #[arg(long)]
        alpha: String,
        /// One-bit leak spec
        #[arg(long, default_value = "planted:0.3")]
        leak: String,
        /// Rerandomized samples per decision
        #[arg(long, default_value_t = 100)]
        m: u64,
        /// Threshold-width exponent
        #[arg(long, default_value_t = 1)]
        exponent: u32,
        /// Hit rate of the leak on the target class; calibrated from
        /// fresh samples when omitted
        #[arg(long)]
        eps: Option<f64>,
        /// Calibration sample count
        #[arg(long, default_value_t = 20_000)]
        calibration: u64,
        /// Decision trials, alternating between the two classes
        #[arg(long, default_value_t = 200)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Vector length (defaults to t)
        #[arg(long)]
        len: Option<usize>,
        #[arg(long, short = 'o')]
        out: Option<PathBuf>,
    },

    /// Run the cross-module invariant suite
    Verify {
        /// Only checks whose name contains this token
        #[arg(long)]
        only: Option<String>,
        /// List check names and exit
        #[arg(long)]
        list: bool,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            let rendered = e.render().to_string();
            let line = rendered
                .lines()
                .find(|l| !l.trim().is_empty())
                .unwrap_or("error: bad usage");
            eprintln!("{line}");
            return ExitCode::from(1);
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    if let Some(w) = cli.workers {
        if w == 0 {
            bail!("--workers must be positive");
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build_global()
            .map_err(|e| anyhow!("--workers: {e}"))?;
    }
    let format = cli.format;
    match cli.command {
        Cmd::Perm { t, op, args } => run_perm(t, &op, &args, format),
        Cmd::Convert { t, from, to, out } => run_convert(t, &from, &to, out.as_deref()),
        Cmd::Map {
            t,
            alpha,
            beta,
            len,
            apply,
            vector,
            out,
        } => run_map(t, alpha, beta, len, apply, vector, out.as_deref()),
        Cmd::CompileBp { bp, x, check, out } => run_compile_bp(&bp, &x, check, out.as_deref(), format),
        Cmd::ReduceId { bp, x, out } => run_reduce_id(&bp, &x, out.as_deref()),
        Cmd::ReduceSingle {
            vector,
            index,
            budget,
            enumerate_gamma3,
        } => run_reduce_single(&vector, index, budget, enumerate_gamma3, format),
        Cmd::Sample {
            t,
            alpha,
            len,
            count,
            seed,
            out,
        } => run_sample(t, &alpha, len, count, seed, out.as_deref()),
        Cmd::Tvd {
            t,
            alpha,
            leak,
            exact,
            n,
            seed,
            len,
            out,
        } => run_tvd(t, &alpha, &leak, exact, n, seed, len, out.as_deref()),
        Cmd::Amplify {
            t,
            alpha,
            leak,
            m,
            exponent,
            eps,
            calibration,
            trials,
            seed,
            len,
            out,
        } => run_amplify(
            t,
            &alpha,
            &leak,
            m,
            exponent,
            eps,
            calibration,
            trials,
            seed,
            len,
            out.as_deref(),
        ),
        Cmd::Verify { only, list } => run_verify(only.as_deref(), list),
    }
}

fn parse_perm(t: usize, s: &str, what: &str) -> Result<Permutation> {
    Permutation::parse(t, s).with_context(|| format!("bad permutation literal {s:?} for {what}"))
}

fn show(p: &Permutation, f: Format) -> String {
    match f {
        Format::Cycles => p.to_string(),
        Format::Images => p.to_image_string(),
    }
}

fn read_file(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

/// Writes the artifact to `out` with a short confirmation line, or dumps
/// it to stdout when no destination was given.
fn emit(out: Option<&Path>, content: &str, summary: &str) -> Result<()> {
    match out {
        Some(path) => {
            fs::write(path, content).with_context(|| format!("cannot write {}", path.display()))?;
            println!("wrote {} ({summary})", path.display());
        }
        None => print!("{content}"),
    }
    Ok(())
}

/// Vector files hold one or more `vector` blocks; blank lines and '#'
/// comment lines separate them.
fn read_vectors(path: &Path) -> Result<Vec<ProductVector>> {
    let text = read_file(path)?;
    let mut blocks: Vec<String> = Vec::new();
    for line in text.lines() {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        if trimmed.starts_with("vector ") {
            blocks.push(String::new());
        }
        let Some(current) = blocks.last_mut() else {
            bail!("{}: content before the first vector header", path.display());
        };
        current.push_str(line);
        current.push('\n');
    }
    if blocks.is_empty() {
        bail!("{}: no vector blocks found", path.display());
    }
    blocks
        .iter()
        .map(|b| ProductVector::parse(b).map_err(Into::into))
        .collect()
}

fn run_perm(t: usize, op: &str, args: &[String], format: Format) -> Result<ExitCode> {
    let need = |n: usize| -> Result<()> {
        if args.len() != n {
            bail!("'{op}' takes {n} argument(s), got {}", args.len());
        }
        Ok(())
    };
    match op {
        "compose" => {
            if args.is_empty() {
                bail!("'compose' needs at least one permutation");
            }
            let mut acc = parse_perm(t, &args[0], "operand 1")?;
            for (i, s) in args.iter().enumerate().skip(1) {
                let next = parse_perm(t, s, &format!("operand {}", i + 1))?;
                acc = acc.compose(&next)?;
            }
            println!("{}", show(&acc, format));
        }
        "inverse" => {
            need(1)?;
            let p = parse_perm(t, &args[0], "operand 1")?;
            println!("{}", show(&p.inverse(), format));
        }
        "power" => {
            need(2)?;
            let p = parse_perm(t, &args[0], "operand 1")?;
            let k: usize = args[1]
                .parse()
                .map_err(|_| anyhow!("bad exponent {:?} for 'power'", args[1]))?;
            println!("{}", show(&p.power(k), format));
        }
        "commutator" => {
            need(2)?;
            let a = parse_perm(t, &args[0], "operand 1")?;
            let g = parse_perm(t, &args[1], "operand 2")?;
            println!("{}", show(&a.commutator(&g)?, format));
        }
        "conjugate" => {
            need(2)?;
            let a = parse_perm(t, &args[0], "operand 1")?;
            let g = parse_perm(t, &args[1], "operand 2")?;
            println!("{}", show(&a.conjugate(&g)?, format));
        }
        "type" => {
            need(1)?;
            let p = parse_perm(t, &args[0], "operand 1")?;
            let lens: Vec<String> = p
                .decompose()
                .cycle_type()
                .iter()
                .map(|l| l.to_string())
                .collect();
            println!("type {}", lens.join(" "));
            println!("parity {}", p.parity());
            println!("moved {}", p.moved_count());
        }
        "apply" => {
            need(2)?;
            let p = parse_perm(t, &args[0], "operand 1")?;
            let point: usize = args[1]
                .parse()
                .map_err(|_| anyhow!("bad point {:?} for 'apply'", args[1]))?;
            if point == 0 || point > t {
                bail!("point {point} out of range 1..={t}");
            }
            println!("{}", p.apply(point));
        }
        other => bail!(
            "unknown operation '{other}' (expected compose|inverse|power|commutator|conjugate|type|apply)"
        ),
    }
    Ok(ExitCode::SUCCESS)
}

fn run_convert(t: usize, from: &str, to: &str, out: Option<&Path>) -> Result<ExitCode> {
    let a = parse_perm(t, from, "--from")?;
    let b = parse_perm(t, to, "--to")?;
    let script = transform::convert(&a, &b)?;
    // Re-application oracle: the script must replay from source to target.
    if !script.check() || script.apply(&a)? != b {
        eprintln!("contract violation: script does not replay from source to target");
        return Ok(ExitCode::from(2));
    }
    let summary = format!(
        "{} steps, {} commutator steps",
        script.steps().len(),
        script.comm_count()
    );
    emit(out, &script.to_text(), &summary)?;
    Ok(ExitCode::SUCCESS)
}

#[allow(clippy::too_many_arguments)]
fn run_map(
    t: Option<usize>,
    alpha: Option<String>,
    beta: Option<String>,
    len: Option<usize>,
    apply: Option<PathBuf>,
    vector: Option<PathBuf>,
    out: Option<&Path>,
) -> Result<ExitCode> {
    if let Some(map_path) = apply {
        if t.is_some() || alpha.is_some() || beta.is_some() || len.is_some() {
            bail!("--apply conflicts with the build flags --t/--alpha/--beta/--len");
        }
        let Some(vec_path) = vector else {
            bail!("--apply needs --vector <FILE>");
        };
        let map = VectorMap::parse(&read_file(&map_path)?)?;
        let inputs = read_vectors(&vec_path)?;
        let mut text = String::new();
        for x in &inputs {
            text.push_str(&map.apply(x)?.to_text());
            text.push('\n');
        }
        let summary = format!(
            "{} vector(s), output length {}",
            inputs.len(),
            map.output_len()
        );
        emit(out, &text, &summary)?;
        return Ok(ExitCode::SUCCESS);
    }
    let (Some(t), Some(alpha), Some(beta), Some(len)) = (t, alpha, beta, len) else {
        bail!("build mode needs --t, --alpha, --beta and --len (or use --apply)");
    };
    let a = parse_perm(t, &alpha, "--alpha")?;
    let b = parse_perm(t, &beta, "--beta")?;
    let map = VectorMap::build(&a, &b, len)?;
    let summary = format!("input length {}, output length {}", map.input_len(), map.output_len());
    emit(out, &map.to_text(), &summary)?;
    Ok(ExitCode::SUCCESS)
}

fn run_compile_bp(
    bp_path: &Path,
    x: &str,
    check: bool,
    out: Option<&Path>,
    format: Format,
) -> Result<ExitCode> {
    let program = BranchingProgram::parse(&read_file(bp_path)?)?;
    let bits = bp::parse_bits(x).with_context(|| format!("bad input bits {x:?} for --x"))?;
    let inst = bp::encode(&program, &bits)?;
    let cycle_verdict = if inst.accepts() { "ACCEPT" } else { "REJECT" };
    let mut block = String::new();
    block.push_str(&format!("degree {}\n", inst.degree()));
    block.push_str(&format!("start-point {}\n", inst.start_point()));
    block.push_str(&format!("accept-point {}\n", inst.accept_point()));
    block.push_str(&format!("sigma {}\n", show(inst.sigma(), format)));
    block.push_str(&format!("cycle-verdict {cycle_verdict}\n"));
    let mut code = ExitCode::SUCCESS;
    if check {
        let eval_verdict = match program.eval(&bits)? {
            bp::Decision::Accept => "ACCEPT",
            bp::Decision::Reject => "REJECT",
        };
        let agree = eval_verdict == cycle_verdict;
        block.push_str(&format!("eval-verdict {eval_verdict}\n"));
        block.push_str(&format!("agree {agree}\n"));
        if !agree {
            code = ExitCode::from(2);
        }
    }
    print!("{block}");
    if let Some(path) = out {
        fs::write(path, &block).with_context(|| format!("cannot write {}", path.display()))?;
    }
    Ok(code)
}

fn run_reduce_id(bp_path: &Path, x: &str, out: Option<&Path>) -> Result<ExitCode> {
    let program = BranchingProgram::parse(&read_file(bp_path)?)?;
    let bits = bp::parse_bits(x).with_context(|| format!("bad input bits {x:?} for --x"))?;
    let instances = reduce::bp_to_id_instances(&program, &bits)?;
    let hash = leakage::hash64(program.to_text().as_bytes());
    let degree = instances[0].degree();
    let len = instances[0].len();
    let mut text = format!(
        "# permprod {VERSION} bp-hash={hash:016x} x={x} stage=id-instances count={} degree={degree} len={len}\n",
        instances.len()
    );
    for inst in &instances {
        text.push_str(&inst.to_text());
        text.push('\n');
    }
    let summary = format!("{} vector(s), degree {degree}, length {len}", instances.len());
    emit(out, &text, &summary)?;
    Ok(ExitCode::SUCCESS)
}

fn run_reduce_single(
    vec_path: &Path,
    index: usize,
    budget: u64,
    enumerate_gamma3: bool,
    format: Format,
) -> Result<ExitCode> {
    if budget == 0 {
        bail!("--budget must be positive");
    }
    let vectors = read_vectors(vec_path)?;
    if index >= vectors.len() {
        bail!(
            "--index {index} out of range: {} holds {} vector(s)",
            vec_path.display(),
            vectors.len()
        );
    }
    let mut v = vectors[index].clone();
    let t = v.degree();
    // The candidate stream works on length-t vectors; shorter inputs are
    // padded with identities, longer ones folded down pairwise. Neither
    // changes the product.
    if v.len() < t {
        let pad = ProductVector::from_elements(vec![Permutation::identity(t); t - v.len()])?;
        v = v.concat(&pad)?;
        eprintln!("note: padded input from {} to {t} entries", vectors[index].len());
    } else if v.len() > t {
        v = v.compress(t)?;
        eprintln!("note: compressed input from {} to {t} entries", vectors[index].len());
    }
    let v = v.as_input();
    let mode = if enumerate_gamma3 {
        CandidateMode::ExhaustiveGamma3
    } else {
        CandidateMode::Derive
    };
    let decider = reduce::exact_fold_decider(t)?;
    let outcome = reduce::reduce_id_to_single(&v, &decider, budget, mode)?;
    println!(
        "product {}",
        if outcome.nonidentity { "nonidentity" } else { "identity" }
    );
    match &outcome.witness {
        Some((kind, tuple)) => {
            let origin = match kind {
                WitnessKind::Derived => "derived".to_string(),
                WitnessKind::Enumerated(i) => format!("index={i}"),
            };
            println!(
                "witness {origin} g1={} g2={} g3={}",
                show(tuple.gamma1(), format),
                show(tuple.gamma2(), format),
                show(tuple.gamma3(), format)
            );
        }
        None => println!("witness none"),
    }
    println!("examined {}", outcome.examined);
    Ok(ExitCode::SUCCESS)
}

fn run_sample(
    t: usize,
    alpha: &str,
    len: Option<usize>,
    count: usize,
    seed: u64,
    out: Option<&Path>,
) -> Result<ExitCode> {
    if count == 0 {
        bail!("--count must be positive");
    }
    let a = parse_perm(t, alpha, "--alpha")?;
    let len = len.unwrap_or(t);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut text = format!(
        "# permprod {VERSION} seed={seed} alpha={a} t={t} len={len} count={count}\n"
    );
    for _ in 0..count {
        text.push_str(&leakage::sample_class(&a, len, &mut rng)?.to_text());
        text.push('\n');
    }
    emit(out, &text, &format!("{count} vector(s) of length {len}"))?;
    Ok(ExitCode::SUCCESS)
}

#[allow(clippy::too_many_arguments)]
fn run_tvd(
    t: usize,
    alpha: &str,
    leaks: &[String],
    exact: bool,
    n: Option<u64>,
    seed: u64,
    len: Option<usize>,
    out: Option<&Path>,
) -> Result<ExitCode> {
    if exact == n.is_some() {
        bail!("choose exactly one of --exact or --n <samples>");
    }
    let a = parse_perm(t, alpha, "--alpha")?;
    let len = len.unwrap_or(t);
    let mut rows = Vec::new();
    let mut plain = Vec::new();
    for spec in leaks {
        let leak = LeakageFunction::parse(spec, t, &a)
            .with_context(|| format!("bad leak spec {spec:?} for --leak"))?;
        let started = Instant::now();
        let (samples, estimate, radius) = if exact {
            let value = leakage::tvd_exact(&leak, &a)?;
            plain.push(value.to_string());
            ("exact".to_string(), value.to_string(), "0".to_string())
        } else {
            let est = leakage::tvd_monte_carlo(&leak, &a, len, n.unwrap(), seed)?;
            plain.push(format!("{:.6} {:.6}", est.estimate, est.radius));
            (
                est.samples.to_string(),
                format!("{:.6}", est.estimate),
                format!("{:.6}", est.radius),
            )
        };
        let millis = started.elapsed().as_millis();
        rows.push(format!(
            "{spec},{a},{t},{len},{samples},{estimate},{radius},{millis},{seed}"
        ));
    }
    let mut csv = format!("# permprod {VERSION} seed={seed}\n");
    csv.push_str("leak,alpha,t,len,samples,estimate,radius,millis,seed\n");
    for row in &rows {
        csv.push_str(row);
        csv.push('\n');
    }
    match out {
        Some(path) => {
            fs::write(path, &csv).with_context(|| format!("cannot write {}", path.display()))?;
            println!("wrote {} ({} row(s))", path.display(), rows.len());
        }
        // Bare queries print just the values; the full table needs --out.
        None => {
            for line in &plain {
                println!("{line}");
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

#[allow(clippy::too_many_arguments)]
fn run_amplify(
    t: usize,
    alpha: &str,
    leak_spec: &str,
    m: u64,
    exponent: u32,
    eps: Option<f64>,
    calibration: u64,
    trials: u64,
    seed: u64,
    len: Option<usize>,
    out: Option<&Path>,
) -> Result<ExitCode> {
    if trials == 0 {
        bail!("--trials must be positive");
    }
    let a = parse_perm(t, alpha, "--alpha")?;
    let leak = LeakageFunction::parse(leak_spec, t, &a)
        .with_context(|| format!("bad leak spec {leak_spec:?} for --leak"))?;
    if leak.out_bits() != 1 {
        bail!(
            "leak '{leak_spec}' is {} bits wide; the amplifier needs a one-bit leak",
            leak.out_bits()
        );
    }
    let len = len.unwrap_or(t);
    let id = Permutation::identity(t);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let started = Instant::now();
    let eps_alpha = match eps {
        Some(e) => e,
        None => leakage::calibrate_eps_alpha(&leak, &a, len, calibration, &mut rng)?,
    };
    let params = AmplifierParams::new(m, exponent, eps_alpha)?;
    let mut errors_alpha = 0u64;
    let mut errors_id = 0u64;
    for trial in 0..trials {
        let on_alpha = trial % 2 == 0;
        let class = if on_alpha { &a } else { &id };
        let x = leakage::sample_class(class, len, &mut rng)?;
        let answer = leakage::amplifier_decide(&x, &leak, &params, &mut rng)?;
        let correct = answer == if on_alpha { SingleAnswer::Alpha } else { SingleAnswer::Id };
        if !correct {
            if on_alpha {
                errors_alpha += 1;
            } else {
                errors_id += 1;
            }
        }
    }
    let millis = started.elapsed().as_millis();
    let rate = (errors_alpha + errors_id) as f64 / trials as f64;
    let mut csv = format!("# permprod {VERSION} seed={seed}\n");
    csv.push_str("leak,alpha,t,len,m,exponent,eps_alpha,trials,errors_alpha,errors_id,error_rate,millis,seed\n");
    csv.push_str(&format!(
        "{leak_spec},{a},{t},{len},{m},{exponent},{eps_alpha:.6},{trials},{errors_alpha},{errors_id},{rate:.6},{millis},{seed}\n"
    ));
    match out {
        Some(path) => {
            fs::write(path, &csv).with_context(|| format!("cannot write {}", path.display()))?;
            println!(
                "wrote {} (error rate {rate:.4} over {trials} trials)",
                path.display()
            );
        }
        None => print!("{csv}"),
    }
    Ok(ExitCode::SUCCESS)
}

fn run_verify(only: Option<&str>, list: bool) -> Result<ExitCode> {
    if list {
        for name in verify::check_names() {
            println!("{name}");
        }
        return Ok(ExitCode::SUCCESS);
    }
    let outcomes = verify::run_matching(only);
    if outcomes.is_empty() {
        bail!("no check name contains '{}'", only.unwrap_or(""));
    }
    let mut failed = 0;
    for o in &outcomes {
        let tag = if o.passed { "PASS" } else { "FAIL" };
        println!("[{tag}] {:<32} {:>6} ms  {}", o.name, o.millis, o.detail);
        if !o.passed {
            failed += 1;
        }
    }
    println!("{} passed, {failed} failed", outcomes.len() - failed);
    Ok(if failed > 0 {
        ExitCode::from(2)
    } else {
        ExitCode::SUCCESS
    })
}
