use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rayon::prelude::*;
use serde_json::Value;

use wecs_core::engine::{
    integrate, load_scenario_with_base, load_wind_spec, set_path, write_run, Scenario, Simulation,
};
use wecs_core::windfield::{format_report, generate, verify_series, WelchConfig, WindTolerances};
use wecs_core::{Error, WindSeries};

/// Wind energy conversion system simulator.
#[derive(Parser)]
#[command(name = "wecs", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate a scenario and write `<name>.csv` and `<name>_summary.txt`.
    Run {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Check a scenario without running it.
    Validate {
        #[arg(long)]
        scenario: PathBuf,
    },
    /// Run every combination of the varied keys in parallel.
    Sweep {
        #[arg(long)]
        scenario: PathBuf,
        /// `dotted.key=a,b,c`; repeat for a cartesian product.
        #[arg(long, required = true)]
        vary: Vec<String>,
        #[arg(long, default_value = "sweep_out")]
        out: PathBuf,
    },
    /// Synthesize a wind field and write it as CSV.
    Wind {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Compare a wind CSV against its specification.
    WindVerify {
        #[arg(long)]
        series: PathBuf,
        #[arg(long)]
        spec: PathBuf,
    },
}

/// `(run id, varied values, run name, outcome)`.
type RunStatus = (usize, Vec<String>, String, Result<(), Error>);

const EXIT_FAILURE: u8 = 1;
const EXIT_VALIDATION: u8 = 2;
const EXIT_ABORT: u8 = 3;

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Validation(_) | Error::Parse(_) | Error::Singular(_) => EXIT_VALIDATION,
        Error::NumericalAbort { .. } => EXIT_ABORT,
        Error::Domain(_) | Error::Io(_) => EXIT_FAILURE,
    }
}

fn fail(context: &str, e: Error) -> ExitCode {
    eprintln!("{context}: {e}");
    ExitCode::from(exit_code(&e))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run { scenario, out } => run(&scenario, &out),
        Command::Validate { scenario } => validate(&scenario),
        Command::Sweep { scenario, vary, out } => sweep(&scenario, &vary, &out),
        Command::Wind { spec, out } => wind(&spec, &out),
        Command::WindVerify { series, spec } => wind_verify(&series, &spec),
    }
}

fn run(path: &Path, out: &Path) -> ExitCode {
    let scenario = match Scenario::from_file(path) {
        Ok(s) => s,
        Err(e) => return fail(&path.display().to_string(), e),
    };
    let result = match integrate(&scenario) {
        Ok(r) => r,
        Err(e) => return fail(&scenario.name, e),
    };
    match write_run(out, &scenario.name, &scenario, &result) {
        Ok(w) => {
            println!("{}", w.csv.display());
            println!("{}", w.summary.display());
            ExitCode::SUCCESS
        }
        Err(e) => fail(&out.display().to_string(), e),
    }
}

fn validate(path: &Path) -> ExitCode {
    let scenario = match Scenario::from_file(path) {
        Ok(s) => s,
        Err(e) => return fail(&path.display().to_string(), e),
    };
    match Simulation::new(&scenario) {
        Ok(sim) => {
            println!(
                "{}: valid, {:?} mode, {} states, {} steps",
                scenario.name,
                scenario.mode,
                sim.layout().len(),
                scenario.integrator.n_steps()
            );
            ExitCode::SUCCESS
        }
        Err(e) => fail(&scenario.name, e),
    }
}

fn parse_vary(spec: &str) -> Result<(String, Vec<String>), Error> {
    let (key, values) = spec
        .split_once('=')
        .ok_or_else(|| Error::Parse(format!("--vary {spec:?}: expected key=a,b,c")))?;
    let values: Vec<String> = values.split(',').map(|v| v.trim().to_string()).collect();
    if key.is_empty() || values.iter().any(String::is_empty) {
        return Err(Error::Parse(format!("--vary {spec:?}: empty key or value")));
    }
    Ok((key.to_string(), values))
}

/// Every combination of the varied values, last key fastest.
fn combinations(axes: &[(String, Vec<String>)]) -> Vec<Vec<String>> {
    axes.iter().fold(vec![Vec::new()], |acc, (_, values)| {
        acc.iter()
            .flat_map(|prefix| {
                values.iter().map(move |v| {
                    let mut c = prefix.clone();
                    c.push(v.clone());
                    c
                })
            })
            .collect()
    })
}

fn sweep(path: &Path, vary: &[String], out: &Path) -> ExitCode {
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => return fail(&path.display().to_string(), e.into()),
    };
    let base: Value = match serde_json::from_str(&text) {
        Ok(v) => v,
        Err(e) => {
            return fail(
                &path.display().to_string(),
                Error::Parse(format!("scenario is not valid JSON: {e}")),
            )
        }
    };
    let axes: Vec<(String, Vec<String>)> = match vary.iter().map(|v| parse_vary(v)).collect() {
        Ok(a) => a,
        Err(e) => return fail("sweep", e),
    };

    // build and validate every variant before running any of them
    let mut scenarios = Vec::new();
    let mut invalid = false;
    for (k, combo) in combinations(&axes).into_iter().enumerate() {
        let mut doc = base.clone();
        let built = axes
            .iter()
            .zip(&combo)
            .try_for_each(|((key, _), value)| set_path(&mut doc, key, value))
            .and_then(|_| load_scenario_with_base(&doc.to_string(), path.parent()));
        match built {
            Ok(mut s) => {
                s.name = format!("{}_run{k:03}", s.name);
                scenarios.push((k, combo, s));
            }
            Err(e) => {
                eprintln!("run {k:03} ({}): {e}", combo.join(", "));
                invalid = true;
            }
        }
    }
    if invalid {
        return ExitCode::from(EXIT_VALIDATION);
    }

    let results: Vec<RunStatus> = scenarios
        .into_par_iter()
        .map(|(k, combo, s)| {
            let status = integrate(&s).and_then(|r| write_run(out, &s.name, &s, &r).map(|_| ()));
            (k, combo, s.name, status)
        })
        .collect();

    let mut index = String::from("run_id,name");
    for (key, _) in &axes {
        index.push(',');
        index.push_str(key);
    }
    index.push_str(",status\n");
    let mut worst = 0u8;
    for (k, combo, name, status) in &results {
        let label = match status {
            Ok(()) => "ok".to_string(),
            Err(e) => {
                eprintln!("run {k:03}: {e}");
                worst = worst.max(exit_code(e));
                match e {
                    Error::NumericalAbort { .. } => "numerical_abort".into(),
                    _ => "error".into(),
                }
            }
        };
        index.push_str(&format!("{k},{name},{},{label}\n", combo.join(",")));
    }
    let index_path = out.join("sweep_index.csv");
    if let Err(e) = std::fs::create_dir_all(out).and_then(|_| std::fs::write(&index_path, index)) {
        return fail(&index_path.display().to_string(), e.into());
    }
    println!("{} runs, index {}", results.len(), index_path.display());
    if worst == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(worst)
    }
}

fn read_spec(path: &Path) -> Result<wecs_core::WindFieldSpec, Error> {
    load_wind_spec(&std::fs::read_to_string(path)?)
}

fn wind(spec_path: &Path, out: &Path) -> ExitCode {
    let spec = match read_spec(spec_path) {
        Ok(s) => s,
        Err(e) => return fail(&spec_path.display().to_string(), e),
    };
    match generate(&spec).and_then(|series| series.save_csv(out).map(|_| series)) {
        Ok(series) => {
            println!(
                "{} points x {} samples -> {}",
                series.n_points(),
                series.n_steps(),
                out.display()
            );
            ExitCode::SUCCESS
        }
        Err(e) => fail("wind", e),
    }
}

fn wind_verify(series_path: &Path, spec_path: &Path) -> ExitCode {
    let spec = match read_spec(spec_path) {
        Ok(s) => s,
        Err(e) => return fail(&spec_path.display().to_string(), e),
    };
    let series = match File::open(series_path)
        .map_err(Error::from)
        .and_then(|f| WindSeries::read_csv(BufReader::new(f)))
    {
        Ok(s) => s,
        Err(e) => return fail(&series_path.display().to_string(), e),
    };
    match verify_series(
        &series,
        &spec,
        &WindTolerances::default(),
        &WelchConfig::default(),
    ) {
        Ok((report, checks)) => {
            print!("{}", format_report(&report));
            for c in &checks {
                println!("{c}");
            }
            let failed = checks.iter().filter(|c| !c.passed).count();
            println!("{} of {} checks passed", checks.len() - failed, checks.len());
            if failed == 0 {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_FAILURE)
            }
        }
        Err(e) => fail("wind-verify", e),
    }
}
