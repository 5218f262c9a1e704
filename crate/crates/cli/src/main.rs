//! Command-line front end for SPANSE one-time signatures.

use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use spanse::analysis::{
    brute_force_log2, optimize_attack, pge_ss_exponents, rejection_rate_analytic,
    rejection_rate_montecarlo, size_report, AttackPoint, CodeDims, JsonReport, MonteCarloConfig,
    SearchConfig,
};
use spanse::params::BUILTIN_NAMES;
use spanse::scheme::{sign_counted, ThetaMode};
use spanse::{
    builtin, keygen, verify, DensityPolynomial, ParameterSet, PrivateKey, PublicKey, Signature,
};

#[derive(Parser)]
#[command(name = "spanse", version, about = "One-time code-based signatures")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a one-time key pair
    Keygen {
        #[command(flatten)]
        params: ParamsArg,
        /// Private key output
        #[arg(long)]
        secret: PathBuf,
        /// Public key output
        #[arg(long)]
        public: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Sign a message (a key must sign only once)
    Sign {
        /// Private key file
        #[arg(long)]
        key: PathBuf,
        /// Message file, or `-` for stdin
        #[arg(long)]
        message: PathBuf,
        /// Signature output
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = Mode::Deterministic)]
        mode: Mode,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Verify a signature; exits 1 on rejection
    Verify {
        /// Public key file
        #[arg(long)]
        public: PathBuf,
        /// Message file, or `-` for stdin
        #[arg(long)]
        message: PathBuf,
        #[arg(long)]
        signature: PathBuf,
    },
    /// Security and efficiency estimates
    Analyze {
        #[command(subcommand)]
        kind: Analysis,
    },
    /// Inspect parameter sets
    Params {
        #[command(subcommand)]
        action: ParamsAction,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    /// Theta is derived from the message
    Deterministic,
    /// Theta is fresh randomness
    Randomized,
}

#[derive(Args)]
struct ParamsArg {
    /// Built-in set name or path to a TOML parameter file
    #[arg(long, default_value = "desk")]
    params: String,
}

#[derive(Args)]
struct DimsArgs {
    #[command(flatten)]
    params: ParamsArg,
    /// Override the code length (need not be a multiple of p)
    #[arg(long)]
    n: Option<usize>,
    /// Override the code dimension
    #[arg(long)]
    k: Option<usize>,
    /// Print a JSON report instead of text
    #[arg(long)]
    json: bool,
}

#[derive(Subcommand)]
enum Analysis {
    /// PGE+SS attack cost with the DOOM speed-up
    Attack {
        #[command(flatten)]
        dims: DimsArgs,
        /// Evaluate a single point instead of optimizing
        #[arg(long, requires_all = ["nu", "phi"])]
        b: Option<u32>,
        #[arg(long, requires = "b")]
        nu: Option<f64>,
        #[arg(long, requires = "b")]
        phi: Option<f64>,
    },
    /// Chance that a signing attempt is rejected
    Rejection {
        #[command(flatten)]
        dims: DimsArgs,
        /// d(x) as "d0,d1[,i:di...]"; defaults to the set's own
        #[arg(long)]
        density: Option<String>,
        /// Let d0 absorb whatever the listed terms leave over
        #[arg(long, requires = "density")]
        residual_to_zero: bool,
        /// Also simulate this many signing attempts
        #[arg(long, value_name = "TRIALS")]
        monte_carlo: Option<u64>,
        #[arg(long, requires = "monte_carlo")]
        threads: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Key and signature sizes, signature and codeword counts
    Sizes {
        #[command(flatten)]
        dims: DimsArgs,
    },
}

#[derive(Subcommand)]
enum ParamsAction {
    /// List the built-in sets
    List,
    /// Print one set
    Show {
        #[command(flatten)]
        params: ParamsArg,
        /// Print as a TOML parameter file
        #[arg(long)]
        toml: bool,
    },
}

enum Failure {
    Reject(String),
    Input(String),
    Internal(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Self::Reject(_) => 1,
            Self::Input(_) => 2,
            Self::Internal(_) => 3,
        }
    }
}

type CmdResult = Result<(), Failure>;

fn input<E: std::fmt::Display>(context: impl std::fmt::Display) -> impl FnOnce(E) -> Failure {
    move |e| Failure::Input(format!("{context}: {e}"))
}

fn internal(e: spanse::Error) -> Failure {
    match e {
        spanse::Error::Parse(_)
        | spanse::Error::InvalidParameters(_)
        | spanse::Error::InvalidDensity(_)
        | spanse::Error::InvalidModulus(_)
        | spanse::Error::Domain(_) => Failure::Input(e.to_string()),
        e => Failure::Internal(e.to_string()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Keygen {
            params,
            secret,
            public,
            seed,
        } => cmd_keygen(&params, &secret, &public, seed),
        Command::Sign {
            key,
            message,
            out,
            mode,
            seed,
        } => cmd_sign(&key, &message, &out, mode, seed),
        Command::Verify {
            public,
            message,
            signature,
        } => cmd_verify(&public, &message, &signature),
        Command::Analyze { kind } => cmd_analyze(kind),
        Command::Params { action } => cmd_params(action),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Reject(m) => println!("reject: {m}"),
                Failure::Input(m) | Failure::Internal(m) => eprintln!("error: {m}"),
            }
            ExitCode::from(f.code())
        }
    }
}

fn load_params(arg: &ParamsArg) -> Result<ParameterSet, Failure> {
    if let Some(p) = builtin(&arg.params) {
        return Ok(p);
    }
    let path = Path::new(&arg.params);
    if !path.exists() {
        return Err(Failure::Input(format!(
            "`{}` is neither a built-in set ({}) nor a file",
            arg.params,
            BUILTIN_NAMES.join(", ")
        )));
    }
    let text = fs::read_to_string(path).map_err(input(path.display()))?;
    ParameterSet::from_toml(&text).map_err(input(path.display()))
}

fn rng_from(seed: Option<u64>) -> ChaCha20Rng {
    match seed {
        Some(s) => ChaCha20Rng::seed_from_u64(s),
        None => ChaCha20Rng::from_os_rng(),
    }
}

fn read_file(path: &Path) -> Result<Vec<u8>, Failure> {
    if path == Path::new("-") {
        let mut buf = Vec::new();
        io::stdin().read_to_end(&mut buf).map_err(input("stdin"))?;
        return Ok(buf);
    }
    fs::read(path).map_err(input(path.display()))
}

/// Writes through a temporary file in the same directory, so a failed run
/// never leaves a partial file behind.
fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let io_err = input(path.display());
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(input(dir.display()))?;
    if let Err(e) = tmp.write_all(bytes).and_then(|_| tmp.as_file().sync_all()) {
        return Err(io_err(e));
    }
    tmp.persist(path).map_err(|e| io_err(e.error))?;
    Ok(())
}

fn check_writable(path: &Path) -> Result<(), Failure> {
    match path.parent() {
        Some(d) if !d.as_os_str().is_empty() && !d.is_dir() => Err(Failure::Input(format!(
            "{}: directory does not exist",
            d.display()
        ))),
        _ if path.is_dir() => Err(Failure::Input(format!(
            "{}: is a directory",
            path.display()
        ))),
        _ => Ok(()),
    }
}

fn cmd_keygen(params: &ParamsArg, secret: &Path, public: &Path, seed: Option<u64>) -> CmdResult {
    let params = load_params(params)?;
    check_writable(secret)?;
    check_writable(public)?;
    let mut rng = rng_from(seed);
    let start = Instant::now();
    let (sk, pk) = keygen(&params, &mut rng).map_err(internal)?;
    let elapsed = start.elapsed();
    let sk_bytes = sk.to_bytes();
    let pk_bytes = pk.to_bytes();
    write_atomic(secret, &sk_bytes)?;
    write_atomic(public, &pk_bytes)?;
    let _ = fs::remove_file(used_marker(secret));

    let sizes =
        size_report(&CodeDims::from(&params), params.density.terms().len()).map_err(internal)?;
    println!(
        "public key: {} symbols, {:.0} bytes packed at {} bits, {} bytes on disk",
        sizes.pk_symbols,
        sizes.pk_packed_bytes,
        sizes.symbol_bits,
        pk_bytes.len()
    );
    println!("private key: {} bytes on disk", sk_bytes.len());
    println!("signature: {} bytes on disk", sizes.sig_disk_bytes);
    eprintln!("key generation took {:.2?}", elapsed);
    Ok(())
}

fn used_marker(key: &Path) -> PathBuf {
    let mut name = key.as_os_str().to_owned();
    name.push(".used");
    PathBuf::from(name)
}

fn cmd_sign(key: &Path, message: &Path, out: &Path, mode: Mode, seed: Option<u64>) -> CmdResult {
    let sk = PrivateKey::from_bytes(&read_file(key)?).map_err(input(key.display()))?;
    let msg = read_file(message)?;
    check_writable(out)?;
    let marker = used_marker(key);
    if marker.exists() {
        eprintln!(
            "WARNING: {} has already signed a message. SPANSE keys are one-time: \
             every further signature leaks information about the private key.",
            key.display()
        );
    }
    let mode = match mode {
        Mode::Deterministic => ThetaMode::Deterministic,
        Mode::Randomized => ThetaMode::Randomized,
    };
    let mut rng = rng_from(seed);
    let (sig, attempts) = sign_counted(&sk, &msg, mode, &mut rng).map_err(internal)?;
    write_atomic(out, &sig.to_bytes())?;
    if let Err(e) = fs::write(&marker, b"") {
        eprintln!(
            "warning: could not record key use in {}: {e}",
            marker.display()
        );
    }
    println!("signed after {attempts} attempt(s)");
    Ok(())
}

fn cmd_verify(public: &Path, message: &Path, signature: &Path) -> CmdResult {
    let pk = PublicKey::from_bytes(&read_file(public)?).map_err(input(public.display()))?;
    let msg = read_file(message)?;
    let sig = Signature::from_bytes(&read_file(signature)?).map_err(input(signature.display()))?;
    match verify(&pk, &msg, &sig) {
        Ok(()) => {
            println!("accept");
            Ok(())
        }
        Err(reason) => {
            let detail = reason.to_string();
            Err(Failure::Reject(if detail == reason.name() {
                detail
            } else {
                format!("{} ({detail})", reason.name())
            }))
        }
    }
}

fn dims(args: &DimsArgs) -> Result<(ParameterSet, CodeDims), Failure> {
    let params = load_params(&args.params)?;
    let mut dims = CodeDims::from(&params);
    if let Some(n) = args.n {
        dims.n = n;
    }
    if let Some(k) = args.k {
        dims.k = k;
    }
    if dims.k >= dims.n {
        return Err(Failure::Input(format!(
            "need k < n, got k = {} and n = {}",
            dims.k, dims.n
        )));
    }
    Ok((params, dims))
}

fn print_json(report: &JsonReport) -> CmdResult {
    let text =
        serde_json::to_string_pretty(report).map_err(|e| Failure::Internal(e.to_string()))?;
    println!("{text}");
    Ok(())
}

fn cmd_analyze(kind: Analysis) -> CmdResult {
    match kind {
        Analysis::Attack {
            dims: args,
            b,
            nu,
            phi,
        } => {
            let (_, d) = dims(&args)?;
            let cost = match (b, nu, phi) {
                (Some(b), Some(nu), Some(phi)) => {
                    pge_ss_exponents(AttackPoint { b, nu, phi }, &d).map_err(internal)?
                }
                _ => optimize_attack(&d, &SearchConfig::default()).map_err(internal)?,
            };
            if args.json {
                return print_json(&JsonReport::default().with_attack(&cost));
            }
            let bf = brute_force_log2(&d);
            println!("n = {}, k = {}, q = {}, p = {}", d.n, d.k, d.q, d.p);
            println!(
                "b = {}, nu = {:.6}, phi = {:.6}",
                cost.point.b, cost.point.nu, cost.point.phi
            );
            println!("rho = {:.6e}, chi = {:.6e}", cost.rho, cost.chi);
            println!("log2 iteration cost = {:.3}", cost.iter_cost_log2);
            println!("log2 success probability = {:.3}", cost.success_prob_log2);
            println!("log2 T_SDP = {:.3}", cost.t_sdp_log2);
            println!("log2 T_DOOM = {:.3}", cost.t_doom_log2);
            println!(
                "log2 brute force: zero-free {:.3}, p_BF {:.3}",
                bf.zero_free_log2, bf.p_bf_log2
            );
            Ok(())
        }
        Analysis::Rejection {
            dims: args,
            density,
            residual_to_zero,
            monte_carlo,
            threads,
            seed,
        } => {
            let (params, d) = dims(&args)?;
            let density = match density {
                Some(s) if residual_to_zero => DensityPolynomial::parse_with_residual(&s),
                Some(s) => DensityPolynomial::parse(&s),
                None => Ok(params.density.clone()),
            }
            .map_err(internal)?;
            let analytic = if density.binary_fraction().is_some() {
                Some(rejection_rate_analytic(&d, &density).map_err(internal)?)
            } else if monte_carlo.is_none() {
                return Err(Failure::Input(format!(
                    "d(x) = {density} is not binary; the analytic model needs d0 + d1 x, \
                     pass --monte-carlo"
                )));
            } else {
                None
            };
            let simulated = match monte_carlo {
                Some(trials) => {
                    let mut cfg = MonteCarloConfig::new(
                        trials,
                        seed.unwrap_or_else(|| rand::rng().next_u64()),
                    );
                    cfg.threads = threads;
                    Some(rejection_rate_montecarlo(&d, &density, &cfg).map_err(internal)?)
                }
                None => None,
            };
            if args.json {
                let p_valid = simulated
                    .map(|m| m.p_valid)
                    .or(analytic.map(|a| a.p_valid))
                    .unwrap_or_default();
                return print_json(&JsonReport::default().with_rejection(p_valid));
            }
            println!("d(x) = {density}");
            if let Some(a) = &analytic {
                println!(
                    "analytic: Pr[sigma_i = 0] = {:.4e}, reject = {:.4e}, expected attempts = {:.4}",
                    a.p_zero_entry, a.p_reject, a.expected_attempts
                );
            }
            if let Some(m) = &simulated {
                println!(
                    "monte carlo: {} / {} rejected, reject = {:.4e} +- {:.2e}",
                    m.rejected, m.trials, m.p_reject, m.stderr
                );
                if let Some(a) = &analytic {
                    if m.stderr > 0.0 {
                        println!(
                            "difference: {:.2} standard errors",
                            (m.p_reject - a.p_reject) / m.stderr
                        );
                    }
                }
            }
            Ok(())
        }
        Analysis::Sizes { dims: args } => {
            let (params, d) = dims(&args)?;
            let s = size_report(&d, params.density.terms().len()).map_err(internal)?;
            if args.json {
                return print_json(&JsonReport::default().with_sizes(&s));
            }
            println!(
                "public key: {:.1} symbols of {} bits, {:.1} bytes = {:.1} kB packed",
                s.pk_symbols, s.symbol_bits, s.pk_packed_bytes, s.pk_packed_kib
            );
            match s.pk_disk_bytes {
                Some(b) => println!("public key on disk: {b} bytes"),
                None => println!("public key on disk: n or r not a multiple of p"),
            }
            println!("signature on disk: {} bytes", s.sig_disk_bytes);
            println!("log2 N_s = {:.3}", s.log2_ns);
            println!("log2 N_c = {:.3}", s.log2_nc);
            Ok(())
        }
    }
}

fn cmd_params(action: ParamsAction) -> CmdResult {
    match action {
        ParamsAction::List => {
            for name in BUILTIN_NAMES {
                let p = builtin(name).expect("registered name");
                println!(
                    "{name:<12} q={} p={} n={} k={} w={} w_g={} m_g={}",
                    p.q,
                    p.p,
                    p.n(),
                    p.k(),
                    p.w,
                    p.w_g,
                    p.m_g
                );
            }
            Ok(())
        }
        ParamsAction::Show { params, toml } => {
            let p = load_params(&params)?;
            if toml {
                print!("{}", p.to_toml());
            } else {
                println!("{p}");
            }
            Ok(())
        }
    }
}
