use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nalgebra::{DMatrix, DVector};

use fmi::dist::{DistributionSpec, JointDistribution};
use fmi::error::Error;
use fmi::forcing::{assemble_block, delta_matrix, kernel_matrix};
use fmi::generators::{classify, default_tol, Registry};
use fmi::latent::{diagonal_value, FamilySpec, LatentFamily, PAPER_PRESET};
use fmi::search::{find_counterexample, SearchConfig};
use fmi::taylor::{coefficient_table, transfer, verify_transfer_positivity};
use fmi::{mi_matrix, psd_check};

/// f-divergence mutual-information matrices: computation, PSD testing, and
/// constructive verification of the characterization of PSD-generating
/// divergences.
#[derive(Parser)]
#[command(name = "fmi", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify a generator against the nonnegative-coefficient cone.
    Classify {
        /// Catalog name or inline JSON spec.
        #[arg(long)]
        generator: String,
        /// Highest Taylor order checked.
        #[arg(long, default_value_t = 12)]
        order: usize,
        /// Also report the three-point kernel coefficient table at this bias.
        #[arg(long, value_name = "A")]
        with_kernel: Option<f64>,
        #[arg(long)]
        json: bool,
    },
    /// Compute the f-MI matrix of a joint distribution.
    Matrix {
        /// JSON distribution file.
        #[arg(long)]
        dist: PathBuf,
        #[arg(long)]
        generator: String,
        /// Run the PSD check and report the spectrum.
        #[arg(long)]
        psd: bool,
    },
    /// Eigendecomposition and PSD verdict for a symmetric matrix file.
    PsdCheck {
        /// JSON file holding the matrix as an array of rows.
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Evaluate latent-family objects: kernel, diagonal correction, block.
    Latent(LatentArgs),
    /// Search for a certified counterexample for a generator.
    Counterexample {
        #[arg(long)]
        generator: String,
        #[arg(long, default_value_t = 8)]
        n_max: usize,
        #[arg(long, default_value_t = 64)]
        r_max: usize,
        #[arg(long, default_value_t = 8)]
        gamma_steps: usize,
        #[arg(long, default_value_t = 64)]
        random_tries: usize,
        /// Bound the family's dependence radius.
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long, default_value_t = 12)]
        order: usize,
        /// Defaults to the FMI_SEED environment variable, then 0.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run every check anchored to the worked four-variable example.
    VerifyPaper,
}

#[derive(Args)]
struct LatentArgs {
    /// JSON family file.
    #[arg(long, conflicts_with = "preset")]
    family: Option<PathBuf>,
    /// Built-in family name.
    #[arg(long)]
    preset: Option<String>,
    #[arg(long)]
    generator: String,
    #[arg(value_enum)]
    object: LatentObject,
    #[arg(long, default_value_t = 1)]
    replicas: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum LatentObject {
    Kernel,
    Delta,
    Block,
}

/// 12 significant digits.
fn sig(x: f64) -> String {
    format!("{x:.11e}")
}

fn exit_code_for(e: &Error) -> ExitCode {
    match e {
        Error::Domain(_)
        | Error::InfiniteDivergence(_)
        | Error::NotDifferentiable { .. }
        | Error::RadiusExceeded { .. }
        | Error::DeltaNotPsd { .. } => ExitCode::from(3),
        _ => ExitCode::from(2),
    }
}

fn load_family(args: &LatentArgs) -> Result<LatentFamily, Error> {
    match (&args.family, &args.preset) {
        (Some(path), None) => {
            let spec: FamilySpec = serde_json::from_str(&std::fs::read_to_string(path)?)?;
            LatentFamily::from_spec(&spec)
        }
        (None, Some(name)) if name == PAPER_PRESET => Ok(LatentFamily::paper_preset()),
        (None, Some(name)) => Err(Error::Domain(format!("unknown preset '{name}'"))),
        _ => Err(Error::Domain(
            "exactly one of --family and --preset is required".into(),
        )),
    }
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    let registry = Registry::standard();
    match cli.command {
        Command::Classify {
            generator,
            order,
            with_kernel,
            json,
        } => {
            let f = registry.build_from_str(&generator)?;
            let verdict = classify(f.as_ref(), order, default_tol(f.as_ref()));
            let kernel = with_kernel
                .map(|a| coefficient_table(f.as_ref(), a, order.min(12)))
                .transpose()?;
            if json {
                let payload = serde_json::json!({
                    "verdict": verdict,
                    "kernel_table": kernel,
                });
                println!("{}", serde_json::to_string_pretty(&payload)?);
            } else {
                println!(
                    "{}: {:?} (checked up to order {})",
                    f.name(),
                    verdict.kind,
                    verdict.checked_up_to
                );
                println!("  {}", verdict.detail);
                if let Some(table) = kernel {
                    println!("  kernel coefficients at a = {}", sig(table.a));
                    for m in 0..=table.m_max {
                        println!(
                            "    m={m}: T={} predicted={} empirical={} +/- {}",
                            sig(table.transfer[m]),
                            sig(table.predicted[m]),
                            sig(table.empirical[m]),
                            sig(table.empirical_errors[m])
                        );
                    }
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Matrix {
            dist,
            generator,
            psd,
        } => {
            let spec: DistributionSpec = serde_json::from_str(&std::fs::read_to_string(dist)?)?;
            let j = JointDistribution::from_spec(&spec)?;
            let f = registry.build_from_str(&generator)?;
            let m = mi_matrix(&j, f.as_ref())?;
            if psd {
                let report = psd_check(&m, None)?;
                println!("{}", serde_json::to_string_pretty(&report)?);
            } else {
                let rows = fmi::fmi::matrix_to_rows(&m);
                println!("{}", serde_json::to_string_pretty(&rows)?);
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::PsdCheck { matrix, tol } => {
            let rows: Vec<Vec<f64>> = serde_json::from_str(&std::fs::read_to_string(matrix)?)?;
            let m = fmi::fmi::rows_to_matrix(&rows)?;
            let report = psd_check(&m, tol)?;
            println!("{}", serde_json::to_string_pretty(&report)?);
            Ok(ExitCode::SUCCESS)
        }
        Command::Latent(args) => {
            let fam = load_family(&args)?;
            let f = registry.build_from_str(&args.generator)?;
            let report = match args.object {
                LatentObject::Kernel => psd_check(&kernel_matrix(f.as_ref(), &fam)?, None)?,
                LatentObject::Delta => {
                    let delta = delta_matrix(f.as_ref(), &fam)?;
                    psd_check(&DMatrix::from_diagonal(&delta), None)?
                }
                LatentObject::Block => {
                    let k = kernel_matrix(f.as_ref(), &fam)?;
                    let delta = delta_matrix(f.as_ref(), &fam)?;
                    psd_check(&assemble_block(&k, &delta, args.replicas)?, None)?
                }
            };
            println!("{}", serde_json::to_string_pretty(&report)?);
            Ok(ExitCode::SUCCESS)
        }
        Command::Counterexample {
            generator,
            n_max,
            r_max,
            gamma_steps,
            random_tries,
            delta,
            order,
            seed,
        } => {
            let f = registry.build_from_str(&generator)?;
            let seed = seed
                .or_else(|| std::env::var("FMI_SEED").ok()?.parse().ok())
                .unwrap_or(0);
            let cfg = SearchConfig {
                n_max,
                r_max,
                gamma_steps,
                random_tries,
                delta_bound: delta,
                seed,
                order,
                ..SearchConfig::default()
            };
            let outcome = find_counterexample(f.as_ref(), &cfg)?;
            println!("{}", serde_json::to_string_pretty(&outcome)?);
            Ok(ExitCode::SUCCESS)
        }
        Command::VerifyPaper => verify_paper(&registry),
    }
}

struct Table {
    rows: Vec<(String, String, String, f64, bool)>,
}

impl Table {
    fn new() -> Self {
        Self { rows: Vec::new() }
    }

    fn check(&mut self, name: &str, expected: f64, computed: f64, tol: f64) {
        let gap = (expected - computed).abs();
        self.rows
            .push((name.into(), sig(expected), sig(computed), gap, gap <= tol));
    }

    fn assert_true(&mut self, name: &str, computed: bool) {
        self.rows.push((
            name.into(),
            "true".into(),
            computed.to_string(),
            0.0,
            computed,
        ));
    }

    fn print_and_exit(self) -> ExitCode {
        let mut ok = true;
        for (name, expected, computed, gap, pass) in &self.rows {
            ok &= pass;
            println!(
                "{} {name}: expected {expected}, computed {computed}, gap {}",
                if *pass { "PASS" } else { "FAIL" },
                sig(*gap)
            );
        }
        if ok {
            println!("all {} checks passed", self.rows.len());
            ExitCode::SUCCESS
        } else {
            ExitCode::FAILURE
        }
    }
}

fn verify_paper(registry: &Registry) -> Result<ExitCode, Error> {
    let mut t = Table::new();
    let fam = LatentFamily::paper_preset();
    let tv = registry.build_from_str("tv")?;
    let relu = registry.build_from_str("relu")?;

    // kernel entries: (1/9) circulant(1, sqrt2/2, 0, sqrt2/2)
    let s = std::f64::consts::SQRT_2 / 2.0 / 9.0;
    let printed = DMatrix::from_row_slice(
        4,
        4,
        &[
            1.0 / 9.0,
            s,
            0.0,
            s,
            s,
            1.0 / 9.0,
            s,
            0.0,
            0.0,
            s,
            1.0 / 9.0,
            s,
            s,
            0.0,
            s,
            1.0 / 9.0,
        ],
    );
    let k_tv = kernel_matrix(tv.as_ref(), &fam)?;
    let k_relu = kernel_matrix(relu.as_ref(), &fam)?;
    let max_gap = (0..4)
        .flat_map(|i| (0..4).map(move |j| (i, j)))
        .map(|(i, j)| (k_tv[(i, j)] - printed[(i, j)]).abs())
        .fold(0.0f64, f64::max);
    t.check("kernel entries vs circulant form", 0.0, max_gap, 1e-12);
    let relu_gap = (&k_tv - &k_relu).abs().max();
    t.check("relu kernel equals tv kernel", 0.0, relu_gap, 1e-12);

    let report = psd_check(&k_tv, None)?;
    let sqrt2 = std::f64::consts::SQRT_2;
    let exact = [(1.0 - sqrt2) / 9.0, 1.0 / 9.0, 1.0 / 9.0, (1.0 + sqrt2) / 9.0];
    for (i, (&got, &want)) in report.eigenvalues.iter().zip(exact.iter()).enumerate() {
        t.check(&format!("kernel eigenvalue {i}"), want, got, 1e-12);
    }
    for (i, (&got, &rounded)) in report
        .eigenvalues
        .iter()
        .zip([-0.046, 0.111, 0.111, 0.268].iter())
        .enumerate()
    {
        t.check(&format!("kernel eigenvalue {i} (printed)"), rounded, got, 1e-3);
    }

    for f in [&tv, &relu] {
        t.check(
            &format!("diagonal value d for {}", f.name()),
            4.0 / 9.0,
            diagonal_value(f.as_ref(), fam.bias())?,
            1e-12,
        );
        let delta = delta_matrix(f.as_ref(), &fam)?;
        let gap = delta.iter().map(|d| (d - 1.0 / 3.0).abs()).fold(0.0, f64::max);
        t.check(&format!("Delta diagonal for {}", f.name()), 0.0, gap, 1e-12);
    }

    let delta = delta_matrix(tv.as_ref(), &fam)?;
    let res = fmi::min_replicas_for_indefiniteness(&k_tv, &delta, 64)?
        .ok_or_else(|| Error::Domain("preset kernel unexpectedly PSD".into()))?;
    t.check("minimal forcing replica count", 8.0, res.r_min as f64, 0.0);
    t.assert_true(
        "block PSD at R = 7",
        psd_check(&assemble_block(&k_tv, &delta, 7)?, None)?.psd,
    );
    t.assert_true(
        "block indefinite at R = 8",
        !psd_check(&assemble_block(&k_tv, &delta, 8)?, None)?.psd,
    );

    let kl = registry.build_from_str("kl")?;
    let js = registry.build_from_str("js")?;
    for (f, vals) in [
        (&kl, [0.5, -1.0 / 6.0, 1.0 / 12.0]),
        (&js, [1.0 / 8.0, -1.0 / 16.0, 7.0 / 192.0]),
    ] {
        for (m, &want) in (2..=4).zip(vals.iter()) {
            t.check(
                &format!("{} coefficient a_{m}", f.name()),
                want,
                f.taylor(m).unwrap(),
                1e-15,
            );
        }
    }

    t.check("transfer multiplier T_2(1/3)", 81.0 / 64.0, transfer(2, 1.0 / 3.0), 1e-12);
    t.check("transfer multiplier T_1", 0.0, transfer(1, 1.0 / 3.0), 1e-12);
    let grid: Vec<f64> = (1..=19).map(|i| 0.05 * i as f64).collect();
    t.assert_true(
        "T_m positive for m in [2,30]",
        verify_transfer_positivity(30, &grid).all_positive,
    );

    let linf = fam.loadings()[0]
        .iter()
        .fold(0.0f64, |acc, &x| acc.max(x.abs()));
    t.check("preset admissibility |a| + ||u||_inf", 1.0, fam.bias() + linf, 1e-12);
    t.assert_true("scaled preset (x1.01) inadmissible", fam.scaled(1.01).is_err());

    let witness = DVector::from_vec(res.witness.clone());
    let b = assemble_block(&k_tv, &delta, res.r_min)?;
    let quad = (witness.transpose() * &b * &witness)[(0, 0)];
    t.assert_true("witness quadratic form negative", quad < 0.0);

    Ok(t.print_and_exit())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code_for(&e)
        }
    }
}
