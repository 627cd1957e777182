//! `icpsk`: enumerate index codes, optimize broadcast-vector-to-PSK
//! mappings for a receiver priority order, and verify designs with an
//! AWGN Monte Carlo simulation.
//!
//! Exit codes: 0 success, 2 parse errors, 3 validation errors,
//! 4 decodability errors, 5 scale-guard rejections, 1 anything else.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use icpsk_core::code::{parse_code, parse_codes_file};
use icpsk_core::effective::{effective_set_size, effective_sets, labeled_partition};
use icpsk_core::enumerate::enumerate_codes;
use icpsk_core::gf2::BitVec;
use icpsk_core::optimizer::{find_optimal_pairs, parse_pair, StageRole};
use icpsk_core::psk::{distance_profile, psk_icg, Constellation, min_inter_set_distance};
use icpsk_core::sim::{simulate, DecoderKind, SimConfig};
use icpsk_core::{Error, IndexCode, IndexCodingProblem, PskMapping};

#[derive(Parser)]
#[command(name = "icpsk", version, about = "Index-coded PSK design and simulation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate all valid index codes of a given length.
    EnumerateCodes(EnumerateArgs),
    /// Print a receiver's effective broadcast vector sets and their
    /// wanted-bit partitions.
    EffectiveSets(EffectiveArgs),
    /// Find the optimal (index code, mapping) pairs for the priority
    /// order.
    Optimize(OptimizeArgs),
    /// Per-receiver minimum inter-set distances and coding gains for a
    /// given pair.
    Icg(IcgArgs),
    /// Monte Carlo message-error-rate simulation for a given pair.
    Simulate(SimulateArgs),
}

#[derive(Args)]
struct ProblemArg {
    /// Problem file (JSON; see README for the schema).
    #[arg(long)]
    problem: PathBuf,
    /// Override the receiver priority order (1-based, highest first).
    #[arg(long, value_delimiter = ',')]
    priority: Option<Vec<usize>>,
}

impl ProblemArg {
    fn load(&self) -> Result<IndexCodingProblem> {
        let icp = IndexCodingProblem::load(&self.problem)?;
        match &self.priority {
            None => Ok(icp),
            Some(p) => {
                let zero_based: Vec<usize> = p
                    .iter()
                    .map(|&i| {
                        i.checked_sub(1)
                            .ok_or_else(|| Error::Parse("priority entries are 1-based".into()))
                    })
                    .collect::<icpsk_core::Result<_>>()?;
                Ok(icp.with_priority(zero_based)?)
            }
        }
    }
}

#[derive(Args)]
struct EnumerateArgs {
    #[command(flatten)]
    problem: ProblemArg,
    /// Code length N (broadcast vectors are N bits, sent as 2^N-PSK).
    #[arg(long)]
    n_code_len: usize,
    /// Also list every code as symbolic sums.
    #[arg(long)]
    list: bool,
}

#[derive(Args)]
struct EffectiveArgs {
    #[command(flatten)]
    problem: ProblemArg,
    /// The index code, e.g. "x1+x4+x5, x1+x2+x3+x4+x5, x4+x5".
    #[arg(long)]
    code: String,
    /// Receiver (1-based).
    #[arg(long)]
    receiver: usize,
    /// Print every side-information realization instead of one row per
    /// distinct effective set.
    #[arg(long)]
    all: bool,
}

#[derive(Args)]
struct OptimizeArgs {
    #[command(flatten)]
    problem: ProblemArg,
    /// Enumerate all codes of this length as the candidate set.
    #[arg(long, conflicts_with = "codes")]
    n_code_len: Option<usize>,
    /// Codes file: one code per line as symbolic sums or column
    /// bit-strings.
    #[arg(long)]
    codes: Option<PathBuf>,
    /// Write the machine-readable dump (JSON) here.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Print at most this many survivor pairs (all with --list).
    #[arg(long, default_value_t = 24)]
    max_pairs: usize,
    /// Print every survivor pair.
    #[arg(long)]
    list: bool,
}

#[derive(Args)]
struct IcgArgs {
    #[command(flatten)]
    problem: ProblemArg,
    /// Pair file in pair notation: ({...}, (...)).
    #[arg(long, conflicts_with_all = ["code", "mapping"])]
    pair: Option<PathBuf>,
    /// Code as symbolic sums (with --mapping).
    #[arg(long, requires = "mapping")]
    code: Option<String>,
    /// Mapping as a decimal word list, e.g. "(0,1,2,3,4,5,6,7)".
    #[arg(long, requires = "code")]
    mapping: Option<String>,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    problem: ProblemArg,
    /// Pair file in pair notation: ({...}, (...)).
    #[arg(long)]
    pair: PathBuf,
    /// SNR list: comma-separated dB values or start:step:end.
    #[arg(long)]
    snr: String,
    /// Monte Carlo trials per SNR point.
    #[arg(long, default_value_t = 100_000)]
    trials: u64,
    /// Master seed; identical seeds reproduce identical CSVs.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Decision rule: ml or mindist.
    #[arg(long, default_value = "ml")]
    decoder: String,
    /// CSV output path (stdout when omitted); a .manifest.json sidecar
    /// is written next to it.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(classify(&e))
        }
    }
}

fn classify(e: &anyhow::Error) -> u8 {
    let Some(core) = e.downcast_ref::<Error>() else {
        return 1;
    };
    match core {
        Error::Parse(_) => 2,
        Error::InvalidProblem(_)
        | Error::EmptyWants
        | Error::NotSingleUnicast
        | Error::DimensionMismatch { .. }
        | Error::WidthTooLarge(_)
        | Error::EmptyMatrix { .. }
        | Error::DependentBasis
        | Error::NotFullRank
        | Error::EmptyCodeSet
        | Error::EmptyPairSet
        | Error::BadSignalSets
        | Error::NonPositiveDistance(_) => 3,
        Error::Undecodable { .. } | Error::UndecodableWant { .. } | Error::FullConstellation(_) => 4,
        Error::ScaleGuard(_) => 5,
    }
}

fn run() -> Result<()> {
    match Cli::parse().command {
        Command::EnumerateCodes(a) => cmd_enumerate(a),
        Command::EffectiveSets(a) => cmd_effective_sets(a),
        Command::Optimize(a) => cmd_optimize(a),
        Command::Icg(a) => cmd_icg(a),
        Command::Simulate(a) => cmd_simulate(a),
    }
}

fn cmd_enumerate(args: EnumerateArgs) -> Result<()> {
    let icp = args.problem.load()?;
    let (codes, stats) = enumerate_codes(&icp, args.n_code_len)?;
    println!(
        "candidates={} rankN={} spaces={} codes={}",
        stats.candidates, stats.full_rank, stats.distinct_spaces, stats.total_codes
    );
    println!("codes_per_space={}", stats.codes_per_space);
    if args.list {
        for code in &codes {
            let symbols: Vec<String> = (0..code.len())
                .map(|k| format!("y{}={}", k + 1, code.symbol(k)))
                .collect();
            println!("{}", symbols.join(", "));
        }
    }
    Ok(())
}

fn cmd_effective_sets(args: EffectiveArgs) -> Result<()> {
    let icp = args.problem.load()?;
    let code = parse_code(&args.code, icp.n())?;
    code.check_decodable(&icp)?;
    let i = receiver_index(&icp, args.receiver)?;
    let r = icp.receiver(i);

    let render = |set: &[BitVec]| -> String {
        let mut sorted = set.to_vec();
        sorted.sort_unstable_by_key(|v| v.decimal());
        let mut s = String::from("{");
        for (k, v) in sorted.iter().enumerate() {
            if k > 0 {
                s.push(',');
            }
            let _ = write!(s, "{v}");
        }
        s.push('}');
        s
    };

    println!(
        "# effective broadcast vector sets seen by R{} for code {}",
        args.receiver, code
    );
    println!("a_{} | C_L | C_L0 | C_L1", args.receiver);
    // Realizations in natural binary order; without --all, one row per
    // distinct set at the first realization reaching it.
    let mut seen: Vec<Vec<BitVec>> = Vec::new();
    for a_dec in 0..(1u64 << r.knows().len()) {
        let a = BitVec::from_decimal(a_dec, r.knows().len())?;
        let (c0, c1) = labeled_partition(&code, r, &a)?;
        let mut carrier: Vec<BitVec> = c0.iter().chain(c1.iter()).copied().collect();
        carrier.sort_unstable();
        if !args.all {
            if seen.contains(&carrier) {
                continue;
            }
            seen.push(carrier.clone());
        }
        println!(
            "{a} | {} | {} | {}",
            render(&carrier),
            render(&c0),
            render(&c1)
        );
    }
    let family = effective_sets(&code, &icp, i)?;
    println!(
        "# {} distinct sets of size {}",
        family.len(),
        effective_set_size(&code, r)
    );
    Ok(())
}

fn candidate_codes(icp: &IndexCodingProblem, args: &OptimizeArgs) -> Result<Vec<IndexCode>> {
    match (&args.n_code_len, &args.codes) {
        (Some(n), None) => Ok(enumerate_codes(icp, *n)?.0),
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?;
            Ok(parse_codes_file(&text, icp.n())?)
        }
        _ => bail!("exactly one of --n-code-len or --codes is required"),
    }
}

fn cmd_optimize(args: OptimizeArgs) -> Result<()> {
    let icp = args.problem.load()?;
    let codes = candidate_codes(&icp, &args)?;
    let (pairs, trace) = find_optimal_pairs(&icp, &codes)?;

    println!("receiver | eta | stage | survivors | delta | gain_db");
    for row in &trace.rows {
        let stage = match row.role {
            StageRole::SkippedFullConstellation => "skip",
            StageRole::Seed => "seed",
            StageRole::Filter => "filter",
        };
        let delta = row
            .delta
            .map_or("-".to_string(), |d| format!("{d:.5}"));
        let gain = row
            .gain_db
            .map_or("-".to_string(), |g| format!("{g:.2}"));
        println!(
            "R{} | {} | {} | {} | {} | {}",
            row.receiver + 1,
            row.eta,
            stage,
            row.survivors,
            delta,
            gain
        );
    }
    if trace.arbitrary {
        println!("# every receiver sees the full constellation; any mapping is optimal");
    } else if let Some(seed) = trace.seed_receiver {
        println!(
            "# seeded at R{}: {} codes x {} mappings",
            seed + 1,
            trace.seed_codes,
            trace.mappings_per_code
        );
    }
    println!("# {} optimal pairs", pairs.len());
    let limit = if args.list { pairs.len() } else { args.max_pairs };
    for p in pairs.iter().take(limit) {
        println!("{}", p.render());
    }
    if pairs.len() > limit {
        println!("# ... {} more (use --list)", pairs.len() - limit);
    }

    if let Some(out) = &args.out {
        let dump = dump_json(&icp, &args, &pairs, &trace)?;
        std::fs::write(out, dump).with_context(|| format!("writing {}", out.display()))?;
        println!("# dump written to {}", out.display());
    }
    Ok(())
}

fn dump_json(
    icp: &IndexCodingProblem,
    args: &OptimizeArgs,
    pairs: &[icpsk_core::CandidatePair],
    trace: &icpsk_core::CascadeTrace,
) -> Result<String> {
    let rows: Vec<serde_json::Value> = trace
        .rows
        .iter()
        .map(|r| {
            serde_json::json!({
                "receiver": r.receiver + 1,
                "eta": r.eta,
                "stage": match r.role {
                    StageRole::SkippedFullConstellation => "skip",
                    StageRole::Seed => "seed",
                    StageRole::Filter => "filter",
                },
                "survivors": r.survivors,
                "delta": r.delta,
                "gain_db": r.gain_db,
            })
        })
        .collect();
    let pair_rows: Vec<serde_json::Value> = pairs
        .iter()
        .map(|p| {
            serde_json::json!({
                "code": p.code.to_string(),
                "mapping": p.mapping.to_string(),
                "distances": p.profile.distances,
                "gains_db": p.profile.gains_db,
            })
        })
        .collect();
    let dump = serde_json::json!({
        "manifest": {
            "command": "optimize",
            "version": env!("CARGO_PKG_VERSION"),
            "problem": args.problem.problem.display().to_string(),
            "n_code_len": args.n_code_len,
            "codes_file": args.codes.as_ref().map(|p| p.display().to_string()),
            "priority": icp.priority().iter().map(|&p| p + 1).collect::<Vec<_>>(),
        },
        "trace": rows,
        "arbitrary": trace.arbitrary,
        "pairs": pair_rows,
    });
    Ok(serde_json::to_string_pretty(&dump)?)
}

fn cmd_icg(args: IcgArgs) -> Result<()> {
    let icp = args.problem.load()?;
    let (code, mapping) = load_pair_args(&icp, &args.pair, &args.code, &args.mapping)?;
    code.check_decodable(&icp)?;
    let profile = distance_profile(&icp, &code, &mapping)?;
    let c = Constellation::for_code_len(code.len())?;
    println!("# pair ({code}, {mapping})");
    println!("receiver | eta | d_is_min | gain_db");
    for i in 0..icp.m() {
        let family = effective_sets(&code, &icp, i)?;
        let d = min_inter_set_distance(&c, &family, &mapping)?;
        debug_assert!((d - profile.distances[i]).abs() < 1e-12);
        println!(
            "R{} | {} | {:.5} | {:.2}",
            i + 1,
            effective_set_size(&code, icp.receiver(i)),
            d,
            psk_icg(d, icp.n())?
        );
    }
    Ok(())
}

fn load_pair_args(
    icp: &IndexCodingProblem,
    pair: &Option<PathBuf>,
    code: &Option<String>,
    mapping: &Option<String>,
) -> Result<(IndexCode, PskMapping)> {
    match (pair, code, mapping) {
        (Some(path), None, None) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?;
            Ok(parse_pair(text.trim(), icp.n())?)
        }
        (None, Some(c), Some(m)) => {
            let code = parse_code(c, icp.n())?;
            let mapping = PskMapping::parse(m)?;
            if mapping.width() != code.len() {
                return Err(Error::DimensionMismatch {
                    expected: 1 << code.len(),
                    got: mapping.order(),
                }
                .into());
            }
            Ok((code, mapping))
        }
        _ => bail!("provide either --pair or both --code and --mapping"),
    }
}

fn parse_snr_list(s: &str) -> Result<Vec<f64>> {
    let parse_one = |t: &str| -> Result<f64> {
        t.trim()
            .parse::<f64>()
            .map_err(|e| Error::Parse(format!("bad SNR value {t:?}: {e}")).into())
    };
    if s.contains(':') {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            bail!(Error::Parse("SNR range must be start:step:end".into()));
        }
        let (start, step, end) = (parse_one(parts[0])?, parse_one(parts[1])?, parse_one(parts[2])?);
        if step <= 0.0 || end < start {
            bail!(Error::Parse("SNR range must be increasing".into()));
        }
        let mut out = Vec::new();
        let mut k = 0;
        loop {
            let v = start + step * k as f64;
            if v > end + 1e-9 {
                break;
            }
            out.push(v);
            k += 1;
        }
        Ok(out)
    } else {
        s.split(',').map(parse_one).collect()
    }
}

fn cmd_simulate(args: SimulateArgs) -> Result<()> {
    let icp = args.problem.load()?;
    let text = std::fs::read_to_string(&args.pair)
        .with_context(|| format!("reading {}", args.pair.display()))?;
    let (code, mapping) = parse_pair(text.trim(), icp.n())?;
    let decoder: DecoderKind = args.decoder.parse::<DecoderKind>()?;
    let config = SimConfig {
        snr_db: parse_snr_list(&args.snr)?,
        trials: args.trials,
        seed: args.seed,
        decoder,
    };
    let curve = simulate(&icp, &code, &mapping, &config)?;
    let csv = curve.to_csv();
    match &args.out {
        None => print!("{csv}"),
        Some(out) => {
            std::fs::write(out, &csv).with_context(|| format!("writing {}", out.display()))?;
            let manifest = serde_json::json!({
                "command": "simulate",
                "version": env!("CARGO_PKG_VERSION"),
                "problem": args.problem.problem.display().to_string(),
                "pair_file": args.pair.display().to_string(),
                "pair": format!("({code}, {mapping})"),
                "priority": icp.priority().iter().map(|&p| p + 1).collect::<Vec<_>>(),
                "snr_db": config.snr_db,
                "trials": config.trials,
                "seed": config.seed,
                "decoder": decoder.to_string(),
            });
            let mpath = manifest_path(out);
            std::fs::write(&mpath, serde_json::to_string_pretty(&manifest)?)
                .with_context(|| format!("writing {}", mpath.display()))?;
            println!("# CSV written to {}", out.display());
            println!("# manifest written to {}", mpath.display());
        }
    }
    Ok(())
}

fn manifest_path(csv: &Path) -> PathBuf {
    let mut s = csv.as_os_str().to_owned();
    s.push(".manifest.json");
    PathBuf::from(s)
}

fn receiver_index(icp: &IndexCodingProblem, one_based: usize) -> Result<usize> {
    if one_based == 0 || one_based > icp.m() {
        bail!(Error::Parse(format!(
            "receiver {one_based} outside 1..={}",
            icp.m()
        )));
    }
    Ok(one_based - 1)
}
