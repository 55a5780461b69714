//! `twistlab`: command-line access to the verification chain.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use twistlab_core::complete_intersections::{
    parity_condition, smoothness_scan_with, Family, ScanOptions, DEFAULT_SIGMA_THRESHOLD,
};
use twistlab_core::linalg_paths::{canonical_pair, synth_commuting_path, CommutingPair, DEFAULT_GRID};
use twistlab_core::local_flows::{collar_commutator_loop, twist_profile};
use twistlab_core::pipeline::{run_verify_family, to_json_pretty, FamilySource, PipelineConfig, Verdict};
use twistlab_core::spin_lift::{generator_loops, lift_loop_detailed, SOLoop, DEFAULT_LOOP_GRID};
use twistlab_core::SquareMatrix;

#[derive(Parser, Debug)]
#[command(name = "twistlab", version, about = "Verify commuting-involution models of boundary Dehn twists")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct GlobalArgs {
    /// JSON configuration file (see docs/schema/config.schema.json).
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Print machine-readable JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Master RNG seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Monte Carlo sample count.
    #[arg(long, global = true)]
    samples: Option<usize>,
    /// Path or loop grid size.
    #[arg(long, global = true)]
    grid: Option<usize>,
    /// Also write the JSON output to this file.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Default)]
struct FamilyArgs {
    /// Catalog family: Xd, X2mn or qA.
    #[arg(long)]
    family: Option<String>,
    /// Family parameters, e.g. `4,3` for Xd(4, 3); for qA the degrees then n.
    #[arg(long, value_delimiter = ',')]
    params: Vec<u32>,
    /// Polynomial system file (one polynomial per line, `#` comments).
    #[arg(long, value_name = "PATH", conflicts_with = "family")]
    poly_file: Option<PathBuf>,
    /// Inline polynomial system; lines separated by `;`.
    #[arg(long, conflicts_with_all = ["family", "poly_file"])]
    poly: Option<String>,
    /// Projective factor dimensions for --poly/--poly-file, e.g. `1,1,1`.
    #[arg(long, value_delimiter = ',')]
    dims: Vec<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the full verification chain on a family member.
    VerifyFamily(FamilyArgs),
    /// Lift a loop in SO(n) to Spin(n) and report its class (±1).
    SpinClass {
        /// Use the commutator loop of the generator paths R_k, R_i.
        #[arg(long)]
        generator_commutator: bool,
        /// Use the constant loop at the identity.
        #[arg(long, conflicts_with = "generator_commutator")]
        constant: bool,
        /// JSON list of n×n matrices sampled uniformly on [0, 1]; first and last must agree.
        #[arg(long, value_name = "PATH", conflicts_with_all = ["generator_commutator", "constant"])]
        loop_file: Option<PathBuf>,
        #[arg(long, default_value_t = 3)]
        n: usize,
    },
    /// Synthesize commuting paths from a pair to its canonical form.
    PathSynth {
        /// Use the pair (I, I).
        #[arg(long)]
        identity: bool,
        /// Use the canonical pair with parity --nu.
        #[arg(long, conflicts_with = "identity")]
        canonical: bool,
        #[arg(long, default_value_t = 1)]
        nu: u8,
        /// JSON object {"a": [[..]], "c": [[..]]}.
        #[arg(long, value_name = "PATH", conflicts_with_all = ["identity", "canonical"])]
        pair_file: Option<PathBuf>,
        #[arg(long, default_value_t = 3)]
        n: usize,
    },
    /// Monte Carlo smoothness scan of a family member.
    ScanSmoothness {
        #[command(flatten)]
        family: FamilyArgs,
        /// σ_min below this flags a sample.
        #[arg(long)]
        threshold: Option<f64>,
        /// Re-measure in a random unitary chart frame with this seed.
        #[arg(long)]
        frame_seed: Option<u64>,
    },
    /// Print the collar commutator loop [ρ_k, ρ_i] and its class.
    TwistDemo {
        #[arg(long, default_value_t = 3)]
        n: usize,
        /// Number of evenly spaced loop samples to print.
        #[arg(long, default_value_t = 9)]
        show: usize,
    },
    /// Feasible factor indices of the multidegree parity condition.
    ParityCheck {
        /// Factor dimensions, e.g. `1,1,1`.
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<usize>,
        /// Degree matrix rows separated by `;`, entries by `,`, e.g. `2,2,2;3,1,1`.
        #[arg(long, required = true)]
        d: String,
    },
}

/// Rendered command output: text for humans, JSON for machines.
struct Output {
    text: String,
    json: Value,
    exit: u8,
}

fn matrix_json(m: &SquareMatrix) -> Value {
    json!(m.row_iter().map(|r| r.iter().copied().collect::<Vec<f64>>()).collect::<Vec<_>>())
}

fn matrix_from_json(v: &Value) -> Result<SquareMatrix> {
    let rows: Vec<Vec<f64>> = serde_json::from_value(v.clone()).context("matrix must be a list of rows")?;
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        bail!("matrix must be square and non-empty");
    }
    Ok(SquareMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

fn format_matrix(m: &SquareMatrix) -> String {
    m.row_iter()
        .map(|r| r.iter().map(|x| format!("{x:>9.5}")).collect::<Vec<_>>().join(" "))
        .collect::<Vec<_>>()
        .join("\n")
}

fn base_config(global: &GlobalArgs) -> Result<PipelineConfig> {
    let mut cfg = match &global.config {
        Some(p) => PipelineConfig::from_file(p)?,
        None => PipelineConfig::default(),
    };
    if let Some(s) = global.seed {
        cfg.seed = s;
    }
    if let Some(s) = global.samples {
        cfg.n_samples = s;
    }
    if let Some(g) = global.grid {
        cfg.grid = g;
    }
    Ok(cfg)
}

fn apply_family(cfg: &mut PipelineConfig, fam: &FamilyArgs) -> Result<()> {
    if let Some(name) = &fam.family {
        cfg.family = FamilySource::Catalog(Family::from_name(name, &fam.params)?);
    } else if let Some(path) = &fam.poly_file {
        if fam.dims.is_empty() {
            bail!("--poly-file needs --dims");
        }
        cfg.family = FamilySource::File { polynomial_file: path.clone(), factor_dims: fam.dims.clone() };
    } else if let Some(text) = &fam.poly {
        if fam.dims.is_empty() {
            bail!("--poly needs --dims");
        }
        cfg.family = FamilySource::Catalog(Family::Custom { factor_dims: fam.dims.clone(), text: text.replace(';', "\n") });
    } else if !fam.params.is_empty() {
        bail!("--params needs --family");
    }
    Ok(())
}

fn verify_family(global: &GlobalArgs, fam: &FamilyArgs) -> Result<Output> {
    let mut cfg = base_config(global)?;
    apply_family(&mut cfg, fam)?;
    let report = run_verify_family(&cfg);
    let mut text = String::new();
    if let Some(s) = &report.summary.system {
        text.push_str(&format!("system: {s}\n"));
    }
    for s in &report.substitutions {
        text.push_str(&format!("substitution: {s}\n"));
    }
    for st in &report.stages {
        let status = serde_json::to_value(st.status)?;
        let name = serde_json::to_value(st.stage)?;
        text.push_str(&format!("{:<18} {}", name.as_str().unwrap_or(""), status.as_str().unwrap_or("")));
        if let Some(m) = &st.message {
            text.push_str(&format!("  ({m})"));
        }
        text.push('\n');
    }
    let sm = &report.summary;
    if let Some(x) = sm.min_singular_value {
        text.push_str(&format!("min sigma: {x:.6e}\n"));
    }
    if let Some(nu) = sm.nu {
        text.push_str(&format!("nu: {nu}\n"));
    }
    if let Some(s) = sm.spin_sign {
        text.push_str(&format!("spin sign: {s}\n"));
    }
    if let Some(c) = sm.collar_class {
        text.push_str(&format!("collar class: {c}\n"));
    }
    text.push_str("unverified hypotheses:\n");
    for h in &report.unverified_hypotheses {
        text.push_str(&format!("  - {h}\n"));
    }
    let verdict = serde_json::to_value(report.verdict)?;
    text.push_str(&format!("verdict: {}", verdict.as_str().unwrap_or("")));
    let exit = match report.verdict {
        Verdict::Pass => 0,
        Verdict::Fail => 1,
        Verdict::Error => 2,
    };
    Ok(Output { text, json: serde_json::to_value(&report)?, exit })
}

fn read_json(path: &PathBuf) -> Result<Value> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn spin_class(global: &GlobalArgs, generator_commutator: bool, constant: bool, loop_file: Option<&PathBuf>, n: usize) -> Result<Output> {
    let grid = global.grid.unwrap_or(DEFAULT_LOOP_GRID);
    let (source, loop_) = if let Some(path) = loop_file {
        let v = read_json(path)?;
        let items = v.as_array().ok_or_else(|| anyhow!("loop file must hold a JSON list of matrices"))?;
        if items.len() < 2 {
            bail!("a loop needs at least two samples");
        }
        let last = (items.len() - 1) as f64;
        let samples = items
            .iter()
            .enumerate()
            .map(|(k, m)| Ok((k as f64 / last, matrix_from_json(m)?)))
            .collect::<Result<Vec<_>>>()?;
        (format!("file {}", path.display()), SOLoop::new(samples)?)
    } else if constant {
        ("constant".to_string(), SOLoop::constant(n, grid)?)
    } else if generator_commutator {
        ("generator commutator".to_string(), generator_loops(n, grid)?.commutator)
    } else {
        bail!("choose one of --generator-commutator, --constant or --loop-file");
    };
    let out = lift_loop_detailed(&loop_)?;
    Ok(Output {
        text: format!(
            "loop: {source} (n = {}, {} samples)\nclass: {}\nclosure residual: {:.3e}",
            loop_.dim(),
            loop_.samples().len(),
            out.sign,
            out.closure_residual
        ),
        json: json!({
            "command": "spin-class",
            "loop": source,
            "n": loop_.dim(),
            "samples": loop_.samples().len(),
            "class": out.sign,
            "scalar": out.scalar,
            "closure_residual": out.closure_residual,
        }),
        exit: 0,
    })
}

fn path_synth(global: &GlobalArgs, identity: bool, canonical: bool, nu: u8, pair_file: Option<&PathBuf>, n: usize) -> Result<Output> {
    let grid = global.grid.unwrap_or(DEFAULT_GRID);
    let pair = if let Some(path) = pair_file {
        let v = read_json(path)?;
        let a = matrix_from_json(v.get("a").ok_or_else(|| anyhow!("pair file needs key \"a\""))?)?;
        let c = matrix_from_json(v.get("c").ok_or_else(|| anyhow!("pair file needs key \"c\""))?)?;
        CommutingPair::with_relative_tol(a, c)?
    } else if canonical {
        canonical_pair(n, nu)?
    } else if identity {
        CommutingPair::new(SquareMatrix::identity(n, n), SquareMatrix::identity(n, n), 0.0)?
    } else {
        bail!("choose one of --identity, --canonical or --pair-file");
    };
    let paths = synth_commuting_path(&pair, grid)?;
    let constant = paths.alpha.samples().iter().all(|(_, m)| m == paths.alpha.start())
        && paths.gamma.samples().iter().all(|(_, m)| m == paths.gamma.start());
    Ok(Output {
        text: format!(
            "n = {}, nu = {}, grid = {grid}\nendpoint error: {:.3e}\ncommutator residual: {:.3e}\nmin det: {:.6e}\nconstant paths: {constant}\nbasis:\n{}",
            pair.n(),
            paths.nu,
            paths.endpoint_error,
            paths.max_commutator,
            paths.min_det,
            format_matrix(&paths.basis)
        ),
        json: json!({
            "command": "path-synth",
            "n": pair.n(),
            "grid": grid,
            "nu": paths.nu,
            "endpoint_error": paths.endpoint_error,
            "max_commutator": paths.max_commutator,
            "min_det": paths.min_det,
            "constant_paths": constant,
            "basis": matrix_json(&paths.basis),
            "stages": paths.alpha.stages().iter().map(|s| json!({"label": s.label.to_string(), "start": s.start, "end": s.end})).collect::<Vec<_>>(),
        }),
        exit: 0,
    })
}

fn scan_smoothness(global: &GlobalArgs, fam: &FamilyArgs, threshold: Option<f64>, frame_seed: Option<u64>) -> Result<Output> {
    let mut cfg = base_config(global)?;
    apply_family(&mut cfg, fam)?;
    let entry = cfg.build_system()?;
    let opts = ScanOptions {
        num_samples: cfg.n_samples,
        seed: cfg.seed,
        sigma_threshold: threshold.unwrap_or(if global.config.is_some() { cfg.tolerances.sigma_threshold } else { DEFAULT_SIGMA_THRESHOLD }),
        workers: cfg.workers,
        frame_seed,
        ..ScanOptions::default()
    };
    let rep = smoothness_scan_with(&entry.system, &opts)?;
    let mut text = format!(
        "system: {}\nsamples: {} tested, {} discarded\nmin sigma: {:.6e}\nfailures: {}\n",
        entry.system, rep.samples_tested, rep.samples_discarded, rep.min_singular_value, rep.failures.len()
    );
    for (label, r) in &rep.special_point_results {
        text.push_str(&format!(
            "{label}: {}{}\n",
            if r.on_zero_set { "on zero set" } else { "off zero set" },
            if r.singular { ", singular" } else { "" }
        ));
    }
    text.push_str(&format!("singular points detected: {}", rep.singular_detected()));
    Ok(Output {
        text,
        json: json!({
            "command": "scan-smoothness",
            "system": entry.system.to_string(),
            "substitutions": entry.substitutions,
            "singular_detected": rep.singular_detected(),
            "report": serde_json::to_value(&rep)?,
        }),
        exit: u8::from(rep.singular_detected()),
    })
}

fn twist_demo(global: &GlobalArgs, n: usize, show: usize) -> Result<Output> {
    let grid = global.grid.unwrap_or(DEFAULT_LOOP_GRID);
    let profile = twist_profile(n, DEFAULT_GRID)?;
    let loop_ = collar_commutator_loop(&profile, grid)?;
    let out = lift_loop_detailed(&loop_)?;
    let samples = loop_.samples();
    let show = show.clamp(2, samples.len());
    let picked: Vec<&(f64, SquareMatrix)> =
        (0..show).map(|k| &samples[k * (samples.len() - 1) / (show - 1)]).collect();
    let mut text = format!("collar commutator loop [rho_k, rho_i] in SO({n}), {} samples\n", samples.len());
    for (u, m) in &picked {
        let t = 1.0 + 3.0 * u;
        text.push_str(&format!("t = {t:.4}\n{}\n", format_matrix(m)));
    }
    text.push_str(&format!("class: {}", out.sign));
    Ok(Output {
        text,
        json: json!({
            "command": "twist-demo",
            "n": n,
            "grid": grid,
            "samples": picked.iter().map(|(u, m)| json!({"t": 1.0 + 3.0 * u, "matrix": matrix_json(m)})).collect::<Vec<_>>(),
            "class": out.sign,
            "closure_residual": out.closure_residual,
        }),
        exit: 0,
    })
}

fn parity_check(n: &[usize], d: &str) -> Result<Output> {
    let rows = d
        .split(';')
        .map(|row| {
            row.split(',')
                .map(|x| x.trim().parse::<u32>().with_context(|| format!("bad degree {x:?}")))
                .collect::<Result<Vec<u32>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let feasible = parity_condition(n, &rows)?;
    Ok(Output {
        text: format!("feasible indices: {feasible:?}"),
        json: json!({ "command": "parity-check", "n": n, "d": rows, "feasible": feasible }),
        exit: 0,
    })
}

fn run(cli: &Cli) -> Result<Output> {
    let g = &cli.global;
    match &cli.command {
        Command::VerifyFamily(f) => verify_family(g, f),
        Command::SpinClass { generator_commutator, constant, loop_file, n } => {
            spin_class(g, *generator_commutator, *constant, loop_file.as_ref(), *n)
        }
        Command::PathSynth { identity, canonical, nu, pair_file, n } => {
            path_synth(g, *identity, *canonical, *nu, pair_file.as_ref(), *n)
        }
        Command::ScanSmoothness { family, threshold, frame_seed } => scan_smoothness(g, family, *threshold, *frame_seed),
        Command::TwistDemo { n, show } => twist_demo(g, *n, *show),
        Command::ParityCheck { n, d } => parity_check(n, d),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            let rendered = match to_json_pretty(&out.json) {
                Ok(s) => s,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(2);
                }
            };
            if let Some(path) = &cli.global.out {
                if let Err(e) = std::fs::write(path, format!("{rendered}\n")) {
                    eprintln!("error: writing {}: {e}", path.display());
                    return ExitCode::from(2);
                }
            }
            let body = if cli.global.json { rendered } else { out.text };
            let mut stdout = std::io::stdout().lock();
            match writeln!(stdout, "{body}").and_then(|()| stdout.flush()) {
                // A closed downstream pipe (`| head`) is not an error of ours.
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => {
                    eprintln!("error: writing output: {e}");
                    ExitCode::from(2)
                }
                _ => ExitCode::from(out.exit),
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
