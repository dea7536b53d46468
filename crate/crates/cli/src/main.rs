//! `mts` — construct, certify, search, and round-trip doubly stochastic
//! quantum channels and their marginal tracial states.
//!
//! Exit codes, shared across subcommands where meaningful:
//!
//! * `0` — success; for `certify`, the input is extremal; for `roundtrip`,
//!   the residual is below 1e-9.
//! * `1` — valid input, negative outcome (not extremal / residual too big).
//! * `2` — semantically invalid input (bad parameters, not UCPT, not
//!   marginal tracial).
//! * `3` — operational failures (I/O, numerical non-convergence,
//!   conflicting certificates).
//! * `4` — unparseable input files.
//!
//! The environment variable `MTS_TOL` (or `certify --tol`) overrides the
//! relative rank tolerance.

mod dto;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use dto::{
    digest, CertificateDto, CertificateFile, DensityFile, KrausFile, SearchReport, ToleranceDto,
    FORMAT_VERSION,
};
use mts_core::{
    choi, constructions, kraus_from_state, ls_bi_independence, ps_support_test, rank_bound,
    reduce_to_independent, state_rank, validate_marginal, validate_ucpt, KrausSet, MarginalState,
    SplitMix64, Tolerances,
};

#[derive(Parser)]
#[command(
    name = "mts",
    version,
    about = "Marginal tracial states and doubly stochastic quantum channels: construct, certify, search"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    /// Four-operator extremal family on M3 (maximal rank 4)
    N3,
    /// Five-operator extremal family on M4 (maximal rank 5)
    N4,
    /// Rank-n family on M_n, n >= 3
    General,
    /// Diagonal Vandermonde family, a^2 <= n
    Diagonal,
    /// Equal mixture of seeded random unitaries
    Mixture,
    /// Single seeded random unitary
    Unitary,
}

#[derive(Clone, Copy, ValueEnum)]
enum Strategy {
    /// Seeded random diagonal channels with varying operator counts
    Diagonal,
    /// Known extremal families plus diagonal perturbations around them
    Perturbation,
}

#[derive(Subcommand)]
enum Command {
    /// Build a channel family and write it as a Kraus JSON file
    Construct {
        #[arg(value_enum)]
        family: Family,
        /// Matrix size n (general, diagonal, mixture, unitary)
        #[arg(long)]
        n: Option<usize>,
        /// Number of diagonal operators (diagonal family)
        #[arg(long)]
        a: Option<usize>,
        /// Number of unitaries to mix (mixture family)
        #[arg(long)]
        count: Option<usize>,
        /// Seed for the random families
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output path; stdout when omitted
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Validate a Kraus or density file and certify extremality
    Certify {
        input: PathBuf,
        /// Force the support-projection test on (default: on for n <= 5)
        #[arg(long, conflicts_with = "no_ps")]
        ps: bool,
        /// Force the support-projection test off
        #[arg(long)]
        no_ps: bool,
        /// Relative rank tolerance override (also: MTS_TOL)
        #[arg(long)]
        tol: Option<f64>,
        /// Emit the certificate as JSON instead of a table
        #[arg(long)]
        json: bool,
    },
    /// Sample channels, certify each, and report the best extremal rank
    Search {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum)]
        strategy: Strategy,
        /// Rank to look for; reported as reached/unreached
        #[arg(long)]
        target_rank: Option<usize>,
        /// Emit the full report as JSON
        #[arg(long)]
        json: bool,
    },
    /// Map a file through the state/channel correspondence and back
    Roundtrip { input: PathBuf },
    /// Print the rank bound floor(sqrt(2 n^2 - 1))
    Bound { n: usize },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Construct {
            family,
            n,
            a,
            count,
            seed,
            out,
        } => cmd_construct(family, n, a, count, seed, out),
        Command::Certify {
            input,
            ps,
            no_ps,
            tol,
            json,
        } => cmd_certify(&input, ps, no_ps, tol, json),
        Command::Search {
            n,
            trials,
            seed,
            strategy,
            target_rank,
            json,
        } => cmd_search(n, trials, seed, strategy, target_rank, json),
        Command::Roundtrip { input } => cmd_roundtrip(&input),
        Command::Bound { n } => cmd_bound(n),
    };
    ExitCode::from(code)
}

fn resolve_tolerances(flag: Option<f64>) -> Result<Tolerances, String> {
    let mut tol = Tolerances::default();
    if let Ok(text) = std::env::var("MTS_TOL") {
        let parsed: f64 = text
            .parse()
            .map_err(|_| format!("MTS_TOL is not a number: {:?}", text))?;
        tol.rank_rel_tol = parsed;
    }
    if let Some(parsed) = flag {
        tol.rank_rel_tol = parsed;
    }
    tol.validated().map_err(|e| e.to_string())
}

// ---------------------------------------------------------------------------
// construct
// ---------------------------------------------------------------------------

fn cmd_construct(
    family: Family,
    n: Option<usize>,
    a: Option<usize>,
    count: Option<usize>,
    seed: u64,
    out: Option<PathBuf>,
) -> u8 {
    let built: Result<KrausSet, String> = match family {
        Family::N3 => Ok(constructions::construct_n3()),
        Family::N4 => Ok(constructions::construct_n4()),
        Family::General => match n {
            Some(n) => {
                if n < 5 {
                    eprintln!(
                        "note: the rank-{} instance of this family is below the regime it \
                         was designed for; certify it rather than assuming extremality",
                        n
                    );
                }
                constructions::construct_general(n).map_err(|e| e.to_string())
            }
            None => Err("--n is required for the general family".into()),
        },
        Family::Diagonal => match (a, n) {
            (Some(a), Some(n)) => {
                constructions::diagonal_vandermonde(a, n).map_err(|e| e.to_string())
            }
            _ => Err("--a and --n are required for the diagonal family".into()),
        },
        Family::Mixture => match n {
            Some(n) if n >= 1 => {
                let count = count.unwrap_or(2);
                if count < 1 {
                    Err("--count must be at least 1".into())
                } else {
                    let mut rng = SplitMix64::new(seed);
                    let unitaries = (0..count)
                        .map(|_| constructions::random_unitary(n, &mut rng))
                        .collect();
                    let weights = vec![1.0 / count as f64; count];
                    constructions::mixture_of_unitaries(&weights, unitaries)
                        .map_err(|e| e.to_string())
                }
            }
            _ => Err("--n is required for the mixture family".into()),
        },
        Family::Unitary => match n {
            Some(n) if n >= 1 => {
                let mut rng = SplitMix64::new(seed);
                constructions::unitary_channel(constructions::random_unitary(n, &mut rng))
                    .map_err(|e| e.to_string())
            }
            _ => Err("--n is required for the unitary family".into()),
        },
    };

    let ks = match built {
        Ok(ks) => ks,
        Err(message) => {
            eprintln!("error: {}", message);
            return 2;
        }
    };
    let file = KrausFile::from_kraus(&ks);
    let payload = serde_json::to_string_pretty(&file).expect("serializable") + "\n";
    match out {
        Some(path) => {
            if let Err(e) = std::fs::write(&path, payload) {
                eprintln!("error: cannot write {}: {}", path.display(), e);
                return 3;
            }
        }
        None => print!("{}", payload),
    }
    0
}

// ---------------------------------------------------------------------------
// certify
// ---------------------------------------------------------------------------

enum ParsedInput {
    Kraus(KrausFile),
    Density(DensityFile),
}

fn read_input(path: &PathBuf) -> Result<(ParsedInput, String), (u8, String)> {
    let raw = std::fs::read_to_string(path)
        .map_err(|e| (3u8, format!("cannot read {}: {}", path.display(), e)))?;
    let value: serde_json::Value =
        serde_json::from_str(&raw).map_err(|e| (4u8, format!("invalid JSON: {}", e)))?;
    if value.get("operators").is_some() {
        let file: KrausFile =
            serde_json::from_value(value).map_err(|e| (4u8, format!("invalid Kraus file: {}", e)))?;
        let input_digest = digest(&file);
        Ok((ParsedInput::Kraus(file), input_digest))
    } else if value.get("density").is_some() {
        let file: DensityFile = serde_json::from_value(value)
            .map_err(|e| (4u8, format!("invalid density file: {}", e)))?;
        let input_digest = digest(&file);
        Ok((ParsedInput::Density(file), input_digest))
    } else {
        Err((
            4u8,
            "file has neither an \"operators\" nor a \"density\" field".into(),
        ))
    }
}

/// The support-projection test is quartic in n; run it by default only for
/// n <= 5 and let --ps override.
fn ps_enabled(n: usize, force_on: bool, force_off: bool) -> bool {
    if force_off {
        false
    } else if force_on {
        true
    } else {
        n <= 5
    }
}

fn emit_certificate(file: &CertificateFile, json: bool) {
    if json {
        println!("{}", serde_json::to_string(file).expect("serializable"));
        return;
    }
    println!("input digest: {}", file.input_digest);
    if let Some(r) = &file.ucpt_report {
        println!(
            "ucpt:         {} (unital {:.3e}, trace {:.3e}, reduced count {})",
            if r.is_ucpt { "yes" } else { "NO" },
            r.unital_residual,
            r.trace_residual,
            r.kraus_count_reduced
        );
    }
    if let Some(r) = &file.marginal_report {
        println!(
            "marginal:     {} (partial traces {:.3e}/{:.3e}, psd {:.3e}, trace {:.3e})",
            if r.is_marginal_tracial { "yes" } else { "NO" },
            r.pt_first_residual,
            r.pt_second_residual,
            r.psd_defect,
            r.trace_defect
        );
    }
    for (label, cert) in [("LS", &file.ls_certificate), ("PS", &file.ps_certificate)] {
        if let Some(c) = cert {
            println!(
                "{}:           {} (rank {}/{}, stack {}x{})",
                label,
                if c.is_extremal { "extremal" } else { "not extremal" },
                c.achieved_rank,
                c.required_rank,
                c.stacked_rows,
                c.stacked_cols
            );
        }
    }
    if let (Some(rank), Some(bound)) = (file.state_rank, file.rank_bound) {
        println!("state rank:   {} (bound {})", rank, bound);
    }
    println!("verdict:      {}", file.verdict);
}

fn cmd_certify(path: &PathBuf, ps: bool, no_ps: bool, tol_flag: Option<f64>, json: bool) -> u8 {
    let tol = match resolve_tolerances(tol_flag) {
        Ok(t) => t,
        Err(message) => {
            eprintln!("error: {}", message);
            return 2;
        }
    };
    let (input, input_digest) = match read_input(path) {
        Ok(parsed) => parsed,
        Err((code, message)) => {
            eprintln!("error: {}", message);
            return code;
        }
    };

    let mut report = CertificateFile {
        version: FORMAT_VERSION.into(),
        input_digest,
        ucpt_report: None,
        marginal_report: None,
        ls_certificate: None,
        ps_certificate: None,
        state_rank: None,
        rank_bound: None,
        verdict: String::new(),
        tolerances: ToleranceDto::from(&tol),
    };

    // Recover the channel and the state from whichever side was given.
    let (ks, state) = match &input {
        ParsedInput::Kraus(file) => {
            let ks = match file.to_kraus() {
                Ok(ks) => ks,
                Err(message) => {
                    eprintln!("error: {}", message);
                    return 4;
                }
            };
            let ucpt = match validate_ucpt(&ks, &tol) {
                Ok(r) => r,
                Err(e) => {
                    eprintln!("error: {}", e);
                    return 3;
                }
            };
            report.ucpt_report = Some((&ucpt).into());
            report.rank_bound = Some(rank_bound(ks.n()).expect("n >= 1"));
            if !ucpt.is_ucpt {
                report.verdict = "not_ucpt".into();
                emit_certificate(&report, json);
                return 2;
            }
            let state = match MarginalState::from_channel(&ks, &tol) {
                Ok(s) => s,
                Err(e) => {
                    eprintln!("error: {}", e);
                    return 3;
                }
            };
            (ks, state)
        }
        ParsedInput::Density(file) => {
            let state = match file.to_state(&tol) {
                Ok(s) => s,
                Err(message) => {
                    eprintln!("error: {}", message);
                    return 4;
                }
            };
            let marginal = validate_marginal(&state, &tol);
            report.marginal_report = Some((&marginal).into());
            report.rank_bound = Some(rank_bound(state.n()).expect("n >= 1"));
            if !marginal.is_marginal_tracial {
                report.verdict = "not_marginal_tracial".into();
                emit_certificate(&report, json);
                return 2;
            }
            let ks = match kraus_from_state(&state, &tol) {
                Ok(ks) => ks,
                Err(e) => {
                    eprintln!("error: {}", e);
                    return 3;
                }
            };
            let ucpt = match validate_ucpt(&ks, &tol) {
                Ok(r) => r,
                Err(e) => {
                    eprintln!("error: {}", e);
                    return 3;
                }
            };
            report.ucpt_report = Some((&ucpt).into());
            (ks, state)
        }
    };

    if report.marginal_report.is_none() {
        report.marginal_report = Some((&validate_marginal(&state, &tol)).into());
    }
    report.state_rank = Some(state_rank(&state, &tol));

    let reduced = match reduce_to_independent(&ks, &tol) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {}", e);
            return 3;
        }
    };
    let ls = match ls_bi_independence(&reduced, &tol) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {}", e);
            return 3;
        }
    };
    report.ls_certificate = Some((&ls).into());

    let mut conflict = false;
    if ps_enabled(ks.n(), ps, no_ps) {
        let ps_cert = match ps_support_test(&state, &tol) {
            Ok(c) => c,
            Err(e) => {
                eprintln!("error: {}", e);
                return 3;
            }
        };
        conflict = ps_cert.is_extremal != ls.is_extremal;
        report.ps_certificate = Some((&ps_cert).into());
    }

    let (verdict, code) = if conflict {
        ("conflicting", 3)
    } else if ls.is_extremal {
        ("extremal", 0)
    } else {
        ("not_extremal", 1)
    };
    report.verdict = verdict.into();
    emit_certificate(&report, json);
    code
}

// ---------------------------------------------------------------------------
// search
// ---------------------------------------------------------------------------

fn isqrt(n: usize) -> usize {
    let mut m = (n as f64).sqrt() as usize;
    while m * m > n {
        m -= 1;
    }
    while (m + 1) * (m + 1) <= n {
        m += 1;
    }
    m
}

fn cmd_search(
    n: usize,
    trials: usize,
    seed: u64,
    strategy: Strategy,
    target_rank: Option<usize>,
    json: bool,
) -> u8 {
    if n < 2 || trials < 1 {
        eprintln!("error: search needs n >= 2 and trials >= 1");
        return 2;
    }
    let tol = match resolve_tolerances(None) {
        Ok(t) => t,
        Err(message) => {
            eprintln!("error: {}", message);
            return 2;
        }
    };

    // Deterministic candidate stream for the given seed.
    let mut rng = SplitMix64::new(seed);
    let mut deterministic: Vec<KrausSet> = Vec::new();
    if matches!(strategy, Strategy::Perturbation) {
        if n >= 3 {
            deterministic.push(constructions::construct_general(n).expect("n >= 3"));
        }
        for a in 1..=isqrt(n) {
            deterministic.push(constructions::diagonal_vandermonde(a, n).expect("a^2 <= n"));
        }
    }

    let mut extremal_hits = 0usize;
    let mut max_extremal_rank = 0usize;
    let mut best: Option<(CertificateDto, KrausFile)> = None;

    for trial in 0..trials {
        let candidate = if trial < deterministic.len() {
            deterministic[trial].clone()
        } else {
            match strategy {
                Strategy::Diagonal => {
                    let a_max = (isqrt(n) + 1).min(n);
                    let a = 1 + trial % a_max;
                    constructions::random_diagonal_ucpt(a, n, rng.next_u64())
                        .expect("a, n >= 1")
                }
                Strategy::Perturbation => {
                    let a = isqrt(n).max(1);
                    let extremal = constructions::diagonal_vandermonde(a, n)
                        .expect("a^2 <= n")
                        .operators()
                        .to_vec();
                    let base = constructions::random_diagonal_ucpt(a, n, rng.next_u64())
                        .expect("a, n >= 1")
                        .operators()
                        .to_vec();
                    let epsilon = [1e-1, 1e-2, 1e-3][trial % 3];
                    let spec = match constructions::PerturbationSpec::new(
                        base, extremal, epsilon, &tol,
                    ) {
                        Ok(s) => s,
                        Err(e) => {
                            eprintln!("error: {}", e);
                            return 3;
                        }
                    };
                    match constructions::perturb_diagonal(&spec, &tol) {
                        Ok(ks) => ks,
                        Err(e) => {
                            eprintln!("error: {}", e);
                            return 3;
                        }
                    }
                }
            }
        };

        let reduced = match reduce_to_independent(&candidate, &tol) {
            Ok(r) => r,
            Err(e) => {
                eprintln!("error: {}", e);
                return 3;
            }
        };
        let cert = match ls_bi_independence(&reduced, &tol) {
            Ok(c) => c,
            Err(e) => {
                eprintln!("error: {}", e);
                return 3;
            }
        };
        if cert.is_extremal {
            extremal_hits += 1;
            if cert.k_or_r > max_extremal_rank {
                max_extremal_rank = cert.k_or_r;
                best = Some(((&cert).into(), KrausFile::from_kraus(&reduced)));
            }
        }
    }

    let (best_certificate, best_channel) = match best {
        Some((c, k)) => (Some(c), Some(k)),
        None => (None, None),
    };
    let report = SearchReport {
        version: FORMAT_VERSION.into(),
        n,
        strategy: match strategy {
            Strategy::Diagonal => "diagonal".into(),
            Strategy::Perturbation => "perturbation".into(),
        },
        trials,
        seed,
        target_rank,
        target_reached: target_rank.map(|t| max_extremal_rank >= t),
        extremal_hits,
        max_extremal_rank,
        best_certificate,
        best_channel,
        tolerances: ToleranceDto::from(&tol),
    };
    if json {
        println!("{}", serde_json::to_string(&report).expect("serializable"));
    } else {
        println!(
            "searched {} trials on M{} ({} strategy, seed {})",
            report.trials, report.n, report.strategy, report.seed
        );
        println!(
            "extremal hits: {}, max extremal Kraus rank: {} (bound {})",
            report.extremal_hits,
            report.max_extremal_rank,
            rank_bound(n).expect("n >= 1")
        );
        if let Some(t) = target_rank {
            println!(
                "target rank {}: {}",
                t,
                if report.target_reached == Some(true) {
                    "reached"
                } else {
                    "not reached"
                }
            );
        }
    }
    0
}

// ---------------------------------------------------------------------------
// roundtrip
// ---------------------------------------------------------------------------

fn cmd_roundtrip(path: &PathBuf) -> u8 {
    let tol = Tolerances::default();
    let (input, _) = match read_input(path) {
        Ok(parsed) => parsed,
        Err((_, message)) => {
            eprintln!("error: {}", message);
            return 4;
        }
    };
    let residual = match &input {
        ParsedInput::Kraus(file) => {
            let ks = match file.to_kraus() {
                Ok(ks) => ks,
                Err(message) => {
                    eprintln!("error: {}", message);
                    return 4;
                }
            };
            let density = choi(&ks);
            let state = match MarginalState::new(ks.n(), density.clone(), &tol) {
                Ok(s) => s,
                Err(e) => {
                    eprintln!("error: {}", e);
                    return 4;
                }
            };
            let recovered = match kraus_from_state(&state, &tol) {
                Ok(ks) => ks,
                Err(e) => {
                    eprintln!("error: {}", e);
                    return 4;
                }
            };
            choi(&recovered).distance(&density)
        }
        ParsedInput::Density(file) => {
            let state = match file.to_state(&tol) {
                Ok(s) => s,
                Err(message) => {
                    eprintln!("error: {}", message);
                    return 4;
                }
            };
            let recovered = match kraus_from_state(&state, &tol) {
                Ok(ks) => ks,
                Err(e) => {
                    eprintln!("error: {}", e);
                    return 4;
                }
            };
            choi(&recovered).distance(state.density())
        }
    };
    println!("roundtrip residual: {:.6e}", residual);
    if residual < 1e-9 {
        0
    } else {
        1
    }
}

// ---------------------------------------------------------------------------
// bound
// ---------------------------------------------------------------------------

fn cmd_bound(n: usize) -> u8 {
    match rank_bound(n) {
        Ok(bound) => {
            println!("{}", bound);
            0
        }
        Err(e) => {
            eprintln!("error: {}", e);
            2
        }
    }
}
