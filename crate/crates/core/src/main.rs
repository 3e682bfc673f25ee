use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use photonic_mesh::calibration::{calibrate_device, CalibrationOptions};
use photonic_mesh::experiment::{histogram, histogram_csv, run_haar_experiment};
use photonic_mesh::hardware::{
    ideal_model, measure_output, paper_model, HardwareModel, SimulatedDevice, DEFAULT_INPUT_POWER_W,
};
use photonic_mesh::linalg::haar_random_unitary;
use photonic_mesh::linalg::io::{unitary_from_json, unitary_to_json};
use photonic_mesh::mesh::{decompose, decompose_unchecked, reconstruct};
use photonic_mesh::{MeshSettings, Result};

/// Compile unitaries onto interferometer meshes and benchmark a simulated
/// photonic processor.
#[derive(Parser)]
#[command(name = "pmesh", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decompose a unitary into mesh settings.
    Compile {
        #[arg(short, long)]
        input: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        /// Accept matrices that fail the unitarity check.
        #[arg(long)]
        no_check: bool,
    },
    /// Multiply mesh settings back into a unitary.
    Reconstruct {
        #[arg(short, long)]
        input: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Print the detected output powers for light at one input.
    Simulate {
        #[arg(short, long)]
        model: PathBuf,
        #[arg(short, long)]
        settings: PathBuf,
        #[arg(long)]
        input: usize,
        /// Launched power, watts.
        #[arg(long, default_value_t = DEFAULT_INPUT_POWER_W)]
        power: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Characterise a simulated device and write the calibration store.
    Calibrate {
        #[arg(short, long)]
        model: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        /// Seed of the simulated device session.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Grid points per heater sweep.
        #[arg(long, default_value_t = CalibrationOptions::default().points)]
        points: usize,
    },
    /// Run the Haar-random fidelity benchmark.
    Experiment {
        #[arg(short, long)]
        model: PathBuf,
        #[arg(short = 'n', long = "count", default_value_t = 100)]
        count: usize,
        #[arg(long)]
        seed: u64,
        #[arg(short, long)]
        output: PathBuf,
        /// Also write a histogram CSV with this bin width.
        #[arg(long)]
        histogram: Option<f64>,
        /// Histogram path; defaults to the report path with a `.csv` extension.
        #[arg(long, requires = "histogram")]
        histogram_out: Option<PathBuf>,
    },
    /// Draw a Haar-random unitary.
    Haar {
        #[arg(short = 'n', long = "modes")]
        modes: usize,
        #[arg(long)]
        seed: u64,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Write a device model configuration.
    Model {
        #[arg(long, value_enum)]
        preset: Preset,
        /// Mode count of the ideal preset.
        #[arg(short = 'n', long = "modes", default_value_t = 12)]
        modes: usize,
        /// Seed of the imperfection draw of the reference preset.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Override the phase-setting noise, radians.
        #[arg(long)]
        phase_noise: Option<f64>,
        #[arg(short, long)]
        output: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Preset {
    Ideal,
    Reference,
}

#[derive(Serialize)]
struct SimulateOutput {
    input: usize,
    input_power: f64,
    output_powers: Vec<f64>,
}

fn read(path: &Path) -> Result<String> {
    Ok(fs::read_to_string(path)?)
}

fn write(path: &Path, text: &str) -> Result<()> {
    Ok(fs::write(path, text)?)
}

fn load_model(path: &Path) -> Result<HardwareModel> {
    HardwareModel::from_json(&read(path)?)
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Compile { input, output, no_check } => {
            let u = unitary_from_json::<f64>(&read(&input)?, !no_check)?;
            let settings = if no_check {
                decompose_unchecked(u.matrix())?
            } else {
                decompose(&u)?
            };
            write(&output, &settings.to_json()?)
        }
        Command::Reconstruct { input, output } => {
            let settings = MeshSettings::from_json(&read(&input)?)?;
            write(&output, &unitary_to_json(&reconstruct(&settings)?)?)
        }
        Command::Simulate {
            model,
            settings,
            input,
            power,
            seed,
        } => {
            let model = load_model(&model)?;
            let settings = MeshSettings::from_json(&read(&settings)?)?;
            let out = SimulateOutput {
                input,
                input_power: power,
                output_powers: measure_output(&model, &settings, input, power, seed)?,
            };
            writeln!(std::io::stdout(), "{}", serde_json::to_string_pretty(&out)?)?;
            Ok(())
        }
        Command::Calibrate {
            model,
            output,
            seed,
            points,
        } => {
            let mut device = SimulatedDevice::new(load_model(&model)?, seed)?;
            let options = CalibrationOptions {
                points,
                ..CalibrationOptions::default()
            };
            let store = calibrate_device(&mut device, options)?;
            eprintln!(
                "calibrated {} heaters ({} unobservable); mean insertion loss {:.3} dB, mean in-situ extinction {:.2} dB",
                store.heaters.len(),
                store.unobservable.len(),
                store.mean_insertion_loss_db(),
                store.mean_extinction_db()
            );
            write(&output, &store.to_json()?)
        }
        Command::Experiment {
            model,
            count,
            seed,
            output,
            histogram: width,
            histogram_out,
        } => {
            let model = load_model(&model)?;
            let report = run_haar_experiment(count, &model, seed)?;
            write(&output, &report.to_json()?)?;
            eprintln!("F = {:.4} ± {:.4} over {} matrices", report.mean, report.std, report.count);
            if let Some(w) = width {
                let path = histogram_out.unwrap_or_else(|| output.with_extension("csv"));
                write(&path, &histogram_csv(&histogram(&report, w)?)?)?;
            }
            Ok(())
        }
        Command::Haar { modes, seed, output } => write(&output, &unitary_to_json(&haar_random_unitary::<f64>(modes, seed)?)?),
        Command::Model {
            preset,
            modes,
            seed,
            phase_noise,
            output,
        } => {
            let mut model = match preset {
                Preset::Ideal => ideal_model(modes)?,
                Preset::Reference => paper_model(seed)?,
            };
            if let Some(sigma) = phase_noise {
                model = model.with_phase_noise(sigma)?;
            }
            write(&output, &model.to_json()?)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
