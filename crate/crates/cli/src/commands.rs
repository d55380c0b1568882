//! The three subcommands, as library functions returning what they computed.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use xpol_dm::evaluation::{constellation_at, phase_deg, scrambling_report, write_pattern_csv};
use xpol_dm::io::{BankDocument, DesignDocument};
use xpol_dm::modulation::{build_targets, SymbolIndex};
use xpol_dm::synthesis::{assemble_matrices, stationarity_residual, synthesize_bank};
use xpol_dm::{DesignSpec, WeightSet};

use crate::config::RunConfig;
use crate::error::{io_err, CliError};

/// Bound the mainlobe constraint residual must stay under for a run to succeed.
pub const RESIDUAL_LIMIT: f64 = 1e-8;

/// Symbols whose patterns the demo exports.
pub const DEMO_SYMBOLS: [&str; 4] = ["00,00", "00,01", "00,11", "00,10"];

pub struct Synthesis {
    pub spec: DesignSpec,
    pub design: DesignDocument,
    pub bank: WeightSet,
    pub max_stationarity: f64,
}

impl Synthesis {
    pub fn max_constraint_residual(&self) -> f64 {
        self.bank.max_constraint_residual()
    }

    pub fn objective_table(&self) -> String {
        let order = self.bank.modulation_order;
        let mut out = String::from("symbol  label    objective               constraint_residual\n");
        for (i, s) in self.bank.symbols.iter().enumerate() {
            let _ = writeln!(
                out,
                "{:>6}  {:<7}  {:<22.15e}  {:.3e}",
                s.m,
                s.label(order),
                self.bank.objective_values[i],
                self.bank.constraint_residuals[i]
            );
        }
        out
    }
}

fn run_synthesis(config: &RunConfig, mut spec: DesignSpec, seed: Option<u64>) -> Result<Synthesis, CliError> {
    let mut design = config.design.clone();
    if let Some(seed) = seed {
        spec.seed = seed;
        design.seed = seed;
    }
    let bank = synthesize_bank(&spec)?;
    let matrices = assemble_matrices(&spec)?;
    let mut max_stationarity = 0.0_f64;
    for (s, w) in bank.symbols.iter().zip(&bank.weights) {
        let targets = build_targets(*s, &spec, spec.seed)?;
        max_stationarity = max_stationarity.max(stationarity_residual(w, &matrices, &targets)?);
    }
    Ok(Synthesis {
        spec,
        design,
        bank,
        max_stationarity,
    })
}

fn write_file(path: &Path, contents: &[u8]) -> Result<(), CliError> {
    fs::write(path, contents).map_err(io_err(path))
}

fn check_residual(s: &Synthesis) -> Result<(), CliError> {
    let residual = s.max_constraint_residual();
    if residual < RESIDUAL_LIMIT {
        Ok(())
    } else {
        Err(CliError::Residual {
            residual,
            limit: RESIDUAL_LIMIT,
        })
    }
}

/// `synthesize`: writes the weight bank. Fails after writing if the
/// constraint residual bound is missed.
pub fn synthesize(config_path: &Path, out: Option<&Path>, seed: Option<u64>) -> Result<Synthesis, CliError> {
    let (config, spec) = RunConfig::load(config_path)?;
    let out = out
        .map(Path::to_path_buf)
        .or_else(|| config.outputs.bank.clone())
        .ok_or(CliError::MissingOutput { key: "bank" })?;
    let result = run_synthesis(&config, spec, seed)?;
    let doc = BankDocument::new(&result.design, &result.bank);
    write_file(&out, doc.to_json().as_bytes())?;
    check_residual(&result)?;
    Ok(result)
}

pub fn load_bank(path: &Path) -> Result<WeightSet, CliError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    let doc = BankDocument::from_json(&text).map_err(|e| CliError::Bank {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    doc.to_weight_set().map_err(|e| CliError::Bank {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

fn check_bank_matches(bank: &WeightSet, spec: &DesignSpec, path: &Path) -> Result<(), CliError> {
    let mismatch = |message: String| CliError::Mismatch {
        path: path.to_path_buf(),
        message,
    };
    if bank.modulation_order != spec.modulation_order {
        return Err(mismatch(format!(
            "modulation order {} vs {}",
            bank.modulation_order, spec.modulation_order
        )));
    }
    if bank.element_count() != spec.element_count() {
        return Err(mismatch(format!(
            "{} elements vs {}",
            bank.element_count(),
            spec.element_count()
        )));
    }
    Ok(())
}

pub fn parse_symbols(tokens: &[String], order: usize) -> Result<Vec<SymbolIndex>, CliError> {
    tokens
        .iter()
        .map(|t| SymbolIndex::parse(t, order).map_err(CliError::from))
        .collect()
}

pub struct Evaluation {
    pub output: PathBuf,
    pub symbols: Vec<SymbolIndex>,
    pub rows: usize,
}

/// `evaluate`: pattern CSV for the selected symbols (all when `symbols` is empty).
pub fn evaluate(
    bank_path: &Path,
    config_path: &Path,
    step: Option<f64>,
    out: Option<&Path>,
    symbols: &[String],
) -> Result<Evaluation, CliError> {
    let (config, spec) = RunConfig::load(config_path)?;
    let bank = load_bank(bank_path)?;
    check_bank_matches(&bank, &spec, bank_path)?;
    let step = step.or(config.sweep_step_deg).unwrap_or(1.0);
    let out = out
        .map(Path::to_path_buf)
        .or_else(|| config.outputs.patterns.clone())
        .ok_or(CliError::MissingOutput { key: "patterns" })?;
    let selected = if symbols.is_empty() {
        bank.symbols.clone()
    } else {
        parse_symbols(symbols, spec.modulation_order)?
    };
    let mut buf = Vec::new();
    write_pattern_csv(&mut buf, &bank, &spec, &selected, step)?;
    let rows = buf.iter().filter(|&&b| b == b'\n').count() - 1;
    write_file(&out, &buf)?;
    Ok(Evaluation {
        output: out,
        symbols: selected,
        rows,
    })
}

pub struct Demo {
    pub synthesis: Synthesis,
    pub files: Vec<PathBuf>,
    pub summary: String,
}

/// File name of the demo pattern CSV for a composite label such as `00,11`.
pub fn demo_pattern_name(label: &str) -> String {
    format!("pattern_{}.csv", label.replace(',', "_"))
}

/// `demo`: built-in configuration, bank, four pattern CSVs and a summary.
pub fn demo(out_dir: &Path) -> Result<Demo, CliError> {
    fs::create_dir_all(out_dir).map_err(io_err(out_dir))?;
    let config = RunConfig::demo();
    let spec = config.design.to_spec()?;
    let result = run_synthesis(&config, spec, None)?;

    let mut files = Vec::new();
    let config_path = out_dir.join("config.json");
    write_file(&config_path, config.to_json().as_bytes())?;
    files.push(config_path);

    let bank_path = out_dir.join("bank.json");
    let doc = BankDocument::new(&result.design, &result.bank);
    write_file(&bank_path, doc.to_json().as_bytes())?;
    files.push(bank_path);

    let step = config.sweep_step_deg.unwrap_or(1.0);
    for label in DEMO_SYMBOLS {
        let sym = SymbolIndex::parse(label, result.spec.modulation_order)?;
        let mut buf = Vec::new();
        write_pattern_csv(&mut buf, &result.bank, &result.spec, &[sym], step)?;
        let path = out_dir.join(demo_pattern_name(label));
        write_file(&path, &buf)?;
        files.push(path);
    }

    let summary = summary_report(&result)?;
    let summary_path = out_dir.join("summary.txt");
    write_file(&summary_path, summary.as_bytes())?;
    files.push(summary_path);

    check_residual(&result)?;
    Ok(Demo {
        synthesis: result,
        files,
        summary,
    })
}

/// Plain-text digest of a synthesized design.
pub fn summary_report(s: &Synthesis) -> Result<String, CliError> {
    let spec = &s.spec;
    let bank = &s.bank;
    let order = bank.modulation_order;
    let matrices = assemble_matrices(spec)?;
    let mut out = String::new();
    let _ = writeln!(out, "crossed-dipole directional modulation design");
    let _ = writeln!(out, "elements: {}", spec.element_count());
    let _ = writeln!(
        out,
        "polarisation S1: gamma {} deg, eta {} deg",
        spec.pol1.gamma_deg(),
        spec.pol1.eta_deg()
    );
    let _ = writeln!(
        out,
        "polarisation S2: gamma {} deg, eta {} deg",
        spec.pol2.gamma_deg(),
        spec.pol2.eta_deg()
    );
    let _ = writeln!(out, "modulation order: {order} ({} composite symbols)", bank.len());
    let _ = writeln!(
        out,
        "directions: {} mainlobe, {} sidelobe",
        spec.mainlobe_dirs.len(),
        spec.sidelobe_dirs.len()
    );
    let _ = writeln!(out, "S_ML: {}x{}", matrices.mainlobe.rows(), matrices.mainlobe.cols());
    let _ = writeln!(out, "S_SL: {}x{}", matrices.sidelobe.rows(), matrices.sidelobe.cols());
    let _ = writeln!(out, "free dimensions: {}", bank.free_dimensions);
    let _ = writeln!(out, "seed: {}", bank.seed);
    let _ = writeln!(out, "max constraint residual: {:.3e}", s.max_constraint_residual());
    let _ = writeln!(out, "max projected gradient: {:.3e}", s.max_stationarity);
    out.push('\n');
    out.push_str(&s.objective_table());

    out.push_str("\nmainlobe constellation\n");
    out.push_str("symbol  label    S1_mag    S1_phase     S2_mag    S2_phase\n");
    for dir in &spec.mainlobe_dirs {
        let _ = writeln!(out, "direction theta {} phi {}", dir.theta_deg(), dir.phi_deg());
        for (sym, pair) in bank.symbols.iter().zip(constellation_at(bank, spec, dir)?) {
            let _ = writeln!(
                out,
                "{:>6}  {:<7}  {:.6}  {:>10.4}  {:.6}  {:>10.4}",
                sym.m,
                sym.label(order),
                pair[0].norm(),
                phase_deg(pair[0]),
                pair[1].norm(),
                phase_deg(pair[1])
            );
        }
    }

    let report = scrambling_report(bank, spec)?;
    let sidelobe: Vec<_> = report.iter().filter(|d| !d.mainlobe).collect();
    if !sidelobe.is_empty() {
        out.push_str("\nsidelobe phase scrambling (circular std over symbols, degrees)\n");
        for ch in 0..2 {
            let mut stds: Vec<f64> = sidelobe.iter().map(|d| d.channels[ch].circular_std_deg).collect();
            stds.sort_by(f64::total_cmp);
            let max_mag = sidelobe
                .iter()
                .map(|d| d.channels[ch].max_magnitude)
                .fold(0.0, f64::max);
            let _ = writeln!(
                out,
                "S{}: min {:.2}, median {:.2}, max {:.2}; peak sidelobe magnitude {:.4}",
                ch + 1,
                stds[0],
                stds[stds.len() / 2],
                stds[stds.len() - 1],
                max_mag
            );
        }
    }
    Ok(out)
}
