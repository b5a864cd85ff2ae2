//! avoidset: build, certify, probe, and render constructions of sets that
//! avoid an unbounded sequence of distances while keeping prescribed
//! density at the avoided scales.
//!
//! Exit codes: 0 success, 1 verification failed, 2 configuration error,
//! 3 budget exceeded.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use avoidset::certify::{certify_manifest, VerifyDepth};
use avoidset::exact::{format_rat, parse_rat, parse_scale};
use avoidset::manifest::{load_manifest, save_manifest, write_atomic};
use avoidset::norms::NormSpec;
use avoidset::oracle;
use avoidset::render::render;
use avoidset::spectrum::spectrum_window;
use avoidset::{build, Budgets, Error, FSpec, SamplerConfig};

#[derive(Parser)]
#[command(
    name = "avoidset",
    version,
    about = "Distance-avoiding set constructions with exact certification"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build a certified construction manifest.
    Construct {
        #[arg(long)]
        dim: usize,
        /// Norm: l1 | l2 | linf | lp:<p> | poly:[(a,b),(c,d),...]
        #[arg(long)]
        norm: String,
        /// Decay function: inv_poly:<alpha> | inv_log | step:<R>=<v>,...
        #[arg(long)]
        f: String,
        #[arg(long)]
        stages: usize,
        /// Max lattice points per enumeration.
        #[arg(long = "budget-enum", default_value_t = 200_000_000)]
        budget_enum: u64,
        /// Pollard-rho iteration cap per factorization attempt.
        #[arg(long = "budget-factor", default_value_t = 16_777_216)]
        budget_factor: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Re-verify a manifest; exits 1 if any check fails.
    Verify {
        manifest: PathBuf,
        /// Re-derive witnesses and constants instead of validating stored ones.
        #[arg(long)]
        deep: bool,
    },
    /// Enumerate the lattice distance spectrum on a window.
    Spectrum {
        #[arg(long)]
        norm: String,
        #[arg(long)]
        dim: usize,
        /// Window start (exact: "p/q" or "sqrt:p/q").
        #[arg(long)]
        from: String,
        /// Window end (exact).
        #[arg(long)]
        to: String,
        #[arg(long, default_value_t = 200_000_000)]
        budget: u64,
    },
    /// Sample points from a construction.
    Sample {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 10)]
        samples: u64,
        #[arg(long)]
        stage: Option<usize>,
    },
    /// Monte Carlo density estimate at an avoided scale.
    Density {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
        /// Stage index (defaults to the last stage).
        #[arg(long)]
        stage: Option<usize>,
    },
    /// Sampled lower bound on distance margins to every avoided radius.
    Margin {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 10_000)]
        samples: u64,
        #[arg(long)]
        stage: Option<usize>,
    },
    /// The thickened-lattice counterexample for polytope norms.
    Demo {
        /// l1 or linf.
        #[arg(long, default_value = "linf")]
        norm: String,
        #[arg(long, default_value_t = 2)]
        dim: usize,
        /// Thickening radius (exact rational, must be < 1/4).
        #[arg(long, default_value = "1/8")]
        thickening: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 10_000)]
        samples: u64,
    },
    /// Render a manifest (d <= 2) as SVG.
    Render {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        stage: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::BudgetExceeded(_) | Error::FactorBudget(_) | Error::RejectionBudget => {
                    ExitCode::from(3)
                }
                _ => ExitCode::from(2),
            }
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    match cli.cmd {
        Cmd::Construct { dim, norm, f, stages, budget_enum, budget_factor, out } => {
            let norm = NormSpec::parse(dim, &norm)?;
            let f = FSpec::parse(&f)?;
            let budgets = Budgets {
                enum_points: budget_enum,
                factor_iters: budget_factor,
                ..Budgets::default()
            };
            let m = build(&norm, &f, stages, &budgets)?;
            save_manifest(&m, &out)?;
            for st in &m.stages {
                println!(
                    "stage {}: R = {}, eps = {}, side = {}, balls = {}",
                    st.n,
                    st.r,
                    format_rat(&st.eps),
                    st.side,
                    st.ball_count
                );
            }
            println!("certified manifest written to {}", out.display());
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Verify { manifest, deep } => {
            let m = load_manifest(&manifest)?;
            let depth = if deep { VerifyDepth::Deep } else { VerifyDepth::Shallow };
            let report = certify_manifest(&m, depth, &Budgets::default())?;
            for c in &report.global {
                println!("[{}] {}: {}", pass_str(c.pass), c.name, c.detail);
            }
            for st in &report.stages {
                for c in &st.checks {
                    println!("[{}] stage {} {}: {}", pass_str(c.pass), st.n, c.name, c.detail);
                }
            }
            if report.certified() {
                println!("certified");
                Ok(ExitCode::SUCCESS)
            } else {
                println!("FAILED: {}", report.summary());
                Ok(ExitCode::from(1))
            }
        }
        Cmd::Spectrum { norm, dim, from, to, budget } => {
            let norm = NormSpec::parse(dim, &norm)?;
            let a = parse_scale(&from)?;
            let b = parse_scale(&to)?;
            let win = spectrum_window(&norm, &a, &b, budget)?;
            for v in &win.values {
                println!("{}", v.value);
            }
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Sample { manifest, seed, samples, stage } => {
            let m = load_manifest(&manifest)?;
            let cfg = SamplerConfig { seed, samples, stage };
            let mut rng = oracle::rng_for(&cfg);
            for i in 0..samples {
                let n = match stage {
                    Some(n) => n,
                    None => (i as usize % m.stages.len()) + 1,
                };
                let p = oracle::sample_point(&m, n, &mut rng)?;
                let coords: Vec<String> = p.iter().map(format_rat).collect();
                println!("{}", coords.join(","));
            }
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Density { manifest, seed, samples, stage } => {
            let m = load_manifest(&manifest)?;
            let n = stage.unwrap_or(m.stages.len());
            let cfg = SamplerConfig { seed, samples, stage: Some(n) };
            let est = oracle::mc_density(&m, n, &cfg)?;
            println!("stage {n}: estimate {:.6}", est.estimate);
            println!("std_error {:.6}", est.std_error);
            println!("analytic {:.6}", est.analytic);
            println!("f_bound {:.6}", est.bound_f);
            println!("samples {}", est.samples);
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Margin { manifest, seed, samples, stage } => {
            let m = load_manifest(&manifest)?;
            let cfg = SamplerConfig { seed, samples, stage };
            let rep = oracle::pair_margin(&m, &cfg)?;
            println!("min_margin {:.9e}", rep.min_margin);
            println!("pairs {}", rep.pairs);
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Demo { norm, dim, thickening, seed, samples } => {
            let norm = NormSpec::parse(dim, &norm)?;
            let t = parse_rat(&thickening)?;
            let cfg = SamplerConfig { seed, samples, stage: None };
            let rep = oracle::thickened_lattice_demo(&norm, &t, &cfg)?;
            println!(
                "min_half_integer_distance {} (~{:.6})",
                format_rat(&rep.min_half_distance),
                rep.min_half_distance_f64()
            );
            println!("all_within_2t_of_integers {}", rep.all_near_integers);
            println!("cell_density {}", format_rat(&rep.cell_density));
            println!("pairs {}", rep.pairs);
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Render { manifest, stage, out } => {
            let m = load_manifest(&manifest)?;
            let svg = render(&m, stage)?;
            write_atomic(&out, svg.as_bytes())?;
            println!("wrote {}", out.display());
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn pass_str(p: bool) -> &'static str {
    if p {
        "pass"
    } else {
        "FAIL"
    }
}
