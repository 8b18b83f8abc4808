//! Command-line shell over the wavelet-analysis library.

use std::f64::consts::PI;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use riwave::config::Config;
use riwave::denoise::{connectivity_map, denoise_pipeline, Method};
use riwave::export::{export_counts, export_grid, export_map};
use riwave::reassign::{derivative_field, reassign, DERIVATIVE_FLOOR};
use riwave::signal::{
    add_white_noise, gen_harmonic, six_a_corpus, NoiseReference, Signal, STANDARD_RATE,
};
use riwave::wav::{read_wav, write_wav};
use riwave::{calibrate, CwtEngine, Error, WaveletParams, WindowSettings};

#[derive(Parser)]
#[command(
    name = "riwave",
    about = "Continuous wavelet analysis of acoustical signals with the Reimann wavelet family",
    version
)]
struct Cli {
    /// Key-value config file with wavelet parameters and window settings.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Seed for all random choices (noise, causal-neighbour draws).
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Worker threads; processing is deterministic regardless of the count.
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate test signals.
    Gen {
        #[command(subcommand)]
        what: GenCommand,
    },
    /// Synthesize one wavelet and emit it as delimited text for plotting
    /// (time, value) for the real kind, (time, re, im) for the holomorphic.
    Wavelet {
        #[arg(long, default_value_t = 1.0)]
        scale: f64,
        #[arg(long, default_value_t = 0.0)]
        shift: f64,
        #[arg(long, value_enum, default_value_t = KindArg::Holomorphic)]
        kind: KindArg,
        /// Sample rate of the emitted time grid.
        #[arg(long, default_value_t = STANDARD_RATE)]
        rate: f64,
        /// Half-width of the time grid in seconds; scales with the wavelet
        /// when omitted.
        #[arg(long)]
        half_span: Option<f64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Forward-transform one window and export the coefficient grid.
    Transform {
        #[command(flatten)]
        input: InputArgs,
        /// Window index (windows advance by the stride).
        #[arg(long, default_value_t = 0)]
        window: usize,
        /// Output grid file (tab-separated: ln_s, tau, re, im).
        #[arg(long)]
        out: PathBuf,
    },
    /// Analyse and resynthesize a WAV file; reports the quality.
    Reconstruct {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Reassign one window and export the weighted map.
    Reassign {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, default_value_t = 0)]
        window: usize,
        /// Output map file (tab-separated: ln_s, tau, |weight|).
        #[arg(long)]
        out: PathBuf,
    },
    /// Reconstruct through a masking method, optionally against a clean
    /// reference.
    Denoise {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, value_enum, default_value_t = MethodArg::Connectivity)]
        method: MethodArg,
        #[arg(long, default_value_t = 4)]
        min_neighbours: u8,
        /// Noise-free reference WAV for the primary quality metric.
        #[arg(long)]
        clean_ref: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        /// Also export the connectivity map of this window index.
        #[arg(long)]
        export_connectivity: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        window: usize,
    },
    /// Calibrate wavelet parameters on a corpus.
    Calibrate {
        /// Corpus WAV file; defaults to the generated six-A corpus.
        #[arg(long)]
        corpus: Option<PathBuf>,
        /// Config with the starting parameter vector.
        #[arg(long)]
        init: Option<PathBuf>,
        /// Config file receiving the calibrated vector.
        #[arg(long)]
        out: PathBuf,
        /// Trace file receiving one row per coordinate step.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Pearson correlation of two WAV files.
    Rho {
        a: PathBuf,
        b: PathBuf,
        /// Exclude this many samples at each end.
        #[arg(long, default_value_t = 0)]
        exclude_edges: usize,
    },
}

#[derive(Subcommand)]
enum GenCommand {
    /// A pure sine tone.
    Harmonic {
        #[arg(long)]
        freq: f64,
        #[arg(long, default_value_t = 5.0)]
        duration: f64,
        #[arg(long, default_value_t = STANDARD_RATE)]
        rate: f64,
        #[arg(long, default_value_t = 1.0)]
        amplitude: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// The six-A calibration corpus (A2..A7 patched at maxima).
    Corpus {
        #[arg(long, default_value_t = 5.0)]
        patch_duration: f64,
        #[arg(long, default_value_t = STANDARD_RATE)]
        rate: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Add seeded white noise to a WAV file.
    Noise {
        #[arg(long)]
        input: PathBuf,
        /// Noise sigma as a fraction of the reference amplitude.
        #[arg(long, default_value_t = 0.05)]
        level: f64,
        #[arg(long, value_enum, default_value_t = ReferenceArg::Peak)]
        reference: ReferenceArg,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct InputArgs {
    /// Input WAV file (16-bit PCM mono).
    #[arg(long)]
    input: PathBuf,
}

#[derive(Copy, Clone, ValueEnum)]
enum MethodArg {
    Plain,
    Reassign,
    Connectivity,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Plain => Method::Plain,
            MethodArg::Reassign => Method::Reassign,
            MethodArg::Connectivity => Method::Connectivity,
        }
    }
}

#[derive(Copy, Clone, ValueEnum)]
enum ReferenceArg {
    Peak,
    Rms,
}

#[derive(Copy, Clone, ValueEnum)]
enum KindArg {
    Real,
    Holomorphic,
}

impl From<KindArg> for riwave::WaveletKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Real => riwave::WaveletKind::RealWavelet,
            KindArg::Holomorphic => riwave::WaveletKind::Holomorphic,
        }
    }
}

fn load_config(cli: &Cli) -> riwave::Result<Config> {
    match &cli.config {
        Some(path) => Config::load(path),
        None => Ok(Config::default()),
    }
}

fn engine_for(cfg: &Config, sig: &Signal) -> riwave::Result<CwtEngine> {
    let params = cfg.wavelet_params()?;
    let mut ws = cfg.window_settings()?;
    // the signal's own rate wins over the configured one
    ws.dt = sig.dt();
    ws.validate()?;
    CwtEngine::new(params, ws)
}

fn window_origin(sig: &Signal, ws: &WindowSettings, index: usize) -> riwave::Result<i64> {
    let origin = index * ws.stride();
    if origin + ws.n_m > sig.len() {
        return Err(Error::Input(format!(
            "window {index} starts at sample {origin}, beyond the signal ({} samples)",
            sig.len()
        )));
    }
    Ok(origin as i64)
}

fn run(cli: &Cli) -> riwave::Result<()> {
    let cfg = load_config(cli)?;
    match &cli.command {
        Command::Gen { what } => match what {
            GenCommand::Harmonic { freq, duration, rate, amplitude, out } => {
                let sig = gen_harmonic(*freq, *duration, *rate, *amplitude)?;
                write_wav(out, &sig)?;
                println!("wrote {} samples at {} Hz to {}", sig.len(), rate, out.display());
            }
            GenCommand::Corpus { patch_duration, rate, out } => {
                let sig = six_a_corpus(*patch_duration, *rate)?;
                write_wav(out, &sig)?;
                println!("wrote {}-sample six-A corpus to {}", sig.len(), out.display());
            }
            GenCommand::Noise { input, level, reference, out } => {
                let sig = read_wav(input)?;
                let reference = match reference {
                    ReferenceArg::Peak => NoiseReference::Peak,
                    ReferenceArg::Rms => NoiseReference::Rms,
                };
                let noisy = add_white_noise(&sig, *level, cli.seed, reference);
                write_wav(out, &noisy)?;
                println!(
                    "added {}% noise (seed {}) to {}",
                    level * 100.0,
                    cli.seed,
                    out.display()
                );
            }
        },
        Command::Wavelet { scale, shift, kind, rate, half_span, out } => {
            let params = cfg.wavelet_params()?;
            let step = 1.0 / rate;
            // the packet sits at negative times and widens with the scale
            let span = half_span.unwrap_or(0.025 * scale.max(1.0));
            let half = (span * rate).ceil() as usize;
            let grid = riwave::synthesis::TimeGrid::symmetric(half, step);
            let kind = riwave::WaveletKind::from(*kind);
            let w = riwave::synthesis::synthesize(*scale, *shift, grid, &params, kind)?;
            let mut text = String::new();
            for (i, v) in w.values.iter().enumerate() {
                let t = grid.time(i);
                match kind {
                    riwave::WaveletKind::RealWavelet => {
                        text.push_str(&format!("{t:.9}\t{:.9e}\n", v.re));
                    }
                    riwave::WaveletKind::Holomorphic => {
                        text.push_str(&format!("{t:.9}\t{:.9e}\t{:.9e}\n", v.re, v.im));
                    }
                }
            }
            std::fs::write(out, text).map_err(|e| Error::Io { path: out.clone(), source: e })?;
            println!(
                "wrote {} samples of the s = {scale} wavelet to {}",
                w.values.len(),
                out.display()
            );
        }
        Command::Transform { input, window, out } => {
            let sig = read_wav(&input.input)?;
            let engine = engine_for(&cfg, &sig)?;
            let origin = window_origin(&sig, engine.settings(), *window)?;
            let grid = engine.forward(&sig.samples, 0, origin)?;
            export_grid(out, &grid)?;
            let (si, ti) = grid.argmax();
            println!(
                "wrote {}x{} grid to {}; modulus peak at s = {:.4}, tau = {:.5} s",
                grid.n_scales(),
                grid.n_shifts(),
                out.display(),
                grid.scales()[si],
                grid.shift_time(ti)
            );
        }
        Command::Reconstruct { input, out } => {
            let sig = read_wav(&input.input)?;
            let engine = engine_for(&cfg, &sig)?;
            let (rec, report) = engine.process_stream(&sig)?;
            write_wav(out, &rec)?;
            println!(
                "rho = {:.6} over samples [{}, {}), {} windows, gain {:.4}",
                report.rho, report.reconstructed.0, report.reconstructed.1, report.windows,
                report.gain
            );
        }
        Command::Reassign { input, window, out } => {
            let sig = read_wav(&input.input)?;
            let engine = engine_for(&cfg, &sig)?;
            let origin = window_origin(&sig, engine.settings(), *window)?;
            let grid = engine.forward(&sig.samples, 0, origin)?;
            let field = derivative_field(&grid, engine.params(), DERIVATIVE_FLOOR)?;
            let map = reassign(&grid, &field, engine.params())?;
            export_map(out, &map)?;
            let (si, _) = map.argmax();
            println!(
                "wrote reassigned map to {}; {} valid pixels, {} discarded; peak at s = {:.4}",
                out.display(),
                map.valid_pixels,
                map.discarded,
                map.scales()[si]
            );
        }
        Command::Denoise {
            input,
            method,
            min_neighbours,
            clean_ref,
            out,
            export_connectivity,
            window,
        } => {
            let sig = read_wav(&input.input)?;
            let engine = engine_for(&cfg, &sig)?;
            let clean = clean_ref.as_ref().map(read_wav).transpose()?;
            let (rec, report) =
                denoise_pipeline(&engine, &sig, (*method).into(), *min_neighbours, clean.as_ref())?;
            write_wav(out, &rec)?;
            match report.rho_vs_clean {
                Some(rho) => println!(
                    "rho vs clean = {rho:.6}, rho vs input = {:.6}",
                    report.stream.rho
                ),
                None => println!("rho vs input = {:.6}", report.stream.rho),
            }
            if let Some(path) = export_connectivity {
                let origin = window_origin(&sig, engine.settings(), *window)?;
                let grid = engine.forward(&sig.samples, 0, origin)?;
                let field = derivative_field(&grid, engine.params(), DERIVATIVE_FLOOR)?;
                let map = reassign(&grid, &field, engine.params())?;
                let bins = riwave::reassign::bin_importance(
                    &map,
                    riwave::reassign::IMPORTANCE_THRESHOLD,
                );
                export_counts(path, &connectivity_map(&bins))?;
                println!("wrote connectivity map of window {window} to {}", path.display());
            }
        }
        Command::Calibrate { corpus, init, out, trace } => {
            let corpus_sig = match corpus {
                Some(path) => read_wav(path)?,
                None => six_a_corpus(1.0, STANDARD_RATE)?,
            };
            let p0 = match init {
                Some(path) => Config::load(path)?.wavelet_params()?,
                None => WaveletParams::initial_guess(),
            };
            let mut ws = cfg.window_settings()?;
            ws.dt = corpus_sig.dt();
            ws.validate()?;
            let (p, tr) = calibrate::optimize(&p0, &corpus_sig, ws, cli.seed)?;
            let mut out_cfg = Config::default();
            out_cfg.set_wavelet_params(&p);
            out_cfg.save(out)?;
            if let Some(path) = trace {
                let mut text = String::from(
                    "pass\tstep\tcoordinate\talpha_over_pi\tbeta_over_pi\tphi_m_over_pi\tkappa\trho\n",
                );
                for e in &tr.entries {
                    text.push_str(&format!(
                        "{}\t{}\t{}\t{:.6}\t{:.6}\t{:.6}\t{:.6}\t{:.6}\n",
                        e.pass + 1,
                        e.step_fraction,
                        e.coordinate.name(),
                        e.params.alpha() / PI,
                        e.params.beta() / PI,
                        e.params.phi_m() / PI,
                        e.params.kappa(),
                        e.rho
                    ));
                }
                std::fs::write(path, text)
                    .map_err(|e| Error::Io { path: path.clone(), source: e })?;
            }
            println!(
                "rho {:.6} -> {:.6}; calibrated vector written to {}",
                tr.initial_rho,
                tr.entries.last().map_or(tr.initial_rho, |e| e.rho),
                out.display()
            );
        }
        Command::Rho { a, b, exclude_edges } => {
            let sa = read_wav(a)?;
            let sb = read_wav(b)?;
            if sa.len() != sb.len() {
                return Err(Error::Input(format!(
                    "lengths differ: {} vs {}",
                    sa.len(),
                    sb.len()
                )));
            }
            let lo = *exclude_edges;
            let hi = sa.len().saturating_sub(*exclude_edges);
            if lo >= hi {
                return Err(Error::Input("nothing left after edge exclusion".into()));
            }
            let rho = calibrate::pearson(&sa.samples[lo..hi], &sb.samples[lo..hi])?;
            println!("rho = {rho:.6}");
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.threads > 1 {
        eprintln!("note: processing is single-threaded; --threads is accepted for compatibility");
    }
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error[{}]: {e}", e.category());
            ExitCode::FAILURE
        }
    }
}
