//! `stripsym`: build, check, decode, simulate and benchmark strip-symmetric
//! Z-detector models.
//!
//! Exit codes: 0 success, 1 a check failed, 2 usage or input error.

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use strip_core::families::{chain_stack_model, table1};
use strip_core::sim::{
    bench_csv_row, default_p_grid, format_g12, sim_csv_row, BENCH_CSV_HEADER, SIM_CSV_HEADER,
};
use strip_core::{
    build, deform_and_check, parse_detmodel, run_sim, write_detmodel, BenchReport, BitVector,
    DecoderKind, DetectorModel, DomainAssignment, FamilyId, Pauli, PauliString, SimConfig,
    SimPoint, SingleQubitClifford, StripSymmetryReport,
};

#[derive(Parser)]
#[command(
    name = "stripsym",
    version,
    about = "Strip-symmetric Z-detector models"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Strip statistics for code families.
    Stats(StatsArgs),
    /// Evaluate both strip-symmetry conditions.
    Check(CheckArgs),
    /// Decode one syndrome.
    Decode(DecodeArgs),
    /// Monte-Carlo logical error rates.
    Simulate(SimulateArgs),
    /// Monolithic versus strip-wise work ratio.
    Bench(BenchArgs),
    /// Domain-wise Clifford deformation of a parent detector family.
    Deform(DeformArgs),
    /// Write a model as DETMODEL, JSON or CSV.
    Export(ExportArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ExportFormat {
    Detmodel,
    Csv,
    Json,
}

#[derive(Args)]
struct Output {
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Write here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct Source {
    /// DETMODEL v1 file.
    #[arg(long, conflicts_with = "family")]
    file: Option<PathBuf>,
    #[arg(long, requires = "size")]
    family: Option<FamilyId>,
    /// Linear size.
    #[arg(long = "L", requires = "family")]
    size: Option<usize>,
}

struct Loaded {
    family: Option<FamilyId>,
    size: Option<usize>,
    model: DetectorModel,
    comments: Vec<String>,
}

impl Source {
    fn load(&self) -> Result<Loaded> {
        match (&self.file, self.family, self.size) {
            (Some(path), _, _) => {
                let text = fs::read_to_string(path)
                    .with_context(|| format!("cannot read {}", path.display()))?;
                let model =
                    parse_detmodel(&text).with_context(|| format!("in {}", path.display()))?;
                Ok(Loaded {
                    family: None,
                    size: None,
                    model,
                    comments: Vec::new(),
                })
            }
            (None, Some(family), Some(size)) => {
                let fam = build(family, size)?;
                Ok(Loaded {
                    family: Some(family),
                    size: Some(size),
                    comments: fam.header_comments(),
                    model: fam.model,
                })
            }
            _ => bail!("give either --file or --family with --L"),
        }
    }
}

impl Loaded {
    fn family_label(&self) -> String {
        self.family.map_or_else(|| "file".into(), |f| f.to_string())
    }

    fn size_label(&self) -> String {
        self.size.map_or_else(String::new, |s| s.to_string())
    }
}

#[derive(Args)]
struct StatsArgs {
    /// Comma-separated family names, or `all`.
    #[arg(long, value_delimiter = ',', default_value = "all")]
    families: Vec<String>,
    #[arg(long = "L", value_delimiter = ',', default_value = "3,4,5")]
    sizes: Vec<usize>,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct CheckArgs {
    #[command(flatten)]
    source: Source,
    /// Augment strip-local models with virtual boundary detectors first.
    #[arg(long)]
    virtual_boundaries: bool,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct DecodeArgs {
    #[command(flatten)]
    source: Source,
    /// Syndrome as a 0/1 string, detector 0 first.
    #[arg(long, conflicts_with = "defects")]
    syndrome: Option<String>,
    /// Comma-separated indices of flipped detectors.
    #[arg(long, value_delimiter = ',')]
    defects: Option<Vec<usize>>,
    #[arg(long, default_value = "stripwise")]
    decoder: DecoderKind,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    family: FamilyId,
    #[arg(long = "L")]
    size: usize,
    /// Comma-separated flip probabilities; defaults to 0.02, 0.04, ..., 0.48.
    #[arg(long = "p", value_delimiter = ',')]
    p_values: Option<Vec<f64>>,
    #[arg(long, default_value_t = 100_000)]
    shots: u64,
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value = "stripwise")]
    decoder: DecoderKind,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    source: Source,
    /// Open chains with these detector counts instead of a family or file.
    #[arg(long, value_delimiter = ',', conflicts_with_all = ["file", "family"])]
    chains: Option<Vec<usize>>,
    #[arg(long, default_value_t = 2.0)]
    alpha: f64,
    /// Timed repetitions of the synthetic workload; 0 skips timing.
    #[arg(long, default_value_t = 0)]
    repeats: usize,
    #[command(flatten)]
    output: Output,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Parent {
    /// `X X` links along each strip.
    XChain,
    /// `Z Z` links along each strip.
    ZChain,
}

#[derive(Args)]
struct DeformArgs {
    /// JSON file with `detectors`, `detector_strips`, `qubit_strips`,
    /// `cliffords` and optional `axes`.
    #[arg(long, conflicts_with = "parent")]
    input: Option<PathBuf>,
    #[arg(long, value_enum)]
    parent: Option<Parent>,
    /// Number of strips of a built-in parent.
    #[arg(long, default_value_t = 2)]
    strips: usize,
    /// Qubits per strip of a built-in parent.
    #[arg(long, default_value_t = 4)]
    length: usize,
    /// One Clifford per strip, or a single one for all strips.
    #[arg(long, value_delimiter = ',')]
    cliffords: Option<Vec<SingleQubitClifford>>,
    /// Dominant parent error per strip, or one for all strips. Defaults to the
    /// axis each strip's Clifford maps to Z.
    #[arg(long, value_delimiter = ',')]
    axes: Option<Vec<char>>,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct ExportArgs {
    #[command(flatten)]
    source: Source,
    #[arg(long, value_enum, default_value_t = ExportFormat::Detmodel)]
    format: ExportFormat,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// How a command ended when it did not fail outright.
enum Outcome {
    Ok,
    CheckFailed,
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => {
            fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

fn parse_families(names: &[String]) -> Result<Vec<FamilyId>> {
    if names.iter().any(|n| n.eq_ignore_ascii_case("all")) {
        if names.len() > 1 {
            bail!("`all` cannot be combined with other family names");
        }
        return Ok(FamilyId::ALL.to_vec());
    }
    names
        .iter()
        .map(|n| n.parse::<FamilyId>().map_err(anyhow::Error::from))
        .collect()
}

fn cmd_stats(args: &StatsArgs) -> Result<Outcome> {
    let families = parse_families(&args.families)?;
    let rows = table1(&families, &args.sizes)?;
    let text = match args.output.format {
        Format::Json => to_json(&rows)?,
        Format::Csv => {
            let mut s =
                String::from("family,L,m,min_dets,max_dets,off_block,non_local,n_det,n_fault\n");
            for r in &rows {
                let t = r.stats;
                let _ = writeln!(
                    s,
                    "{},{},{},{},{},{},{},{},{}",
                    r.family,
                    r.size,
                    t.m,
                    t.min_dets,
                    t.max_dets,
                    t.off_block,
                    t.non_local,
                    t.n_det,
                    t.n_fault
                );
            }
            s
        }
    };
    emit(&args.output.out, &text)?;
    Ok(Outcome::Ok)
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
struct CheckOutput {
    family: Option<FamilyId>,
    #[serde(rename = "L")]
    size: Option<usize>,
    virtual_boundaries: bool,
    #[serde(flatten)]
    report: StripSymmetryReport,
}

fn cmd_check(args: &CheckArgs) -> Result<Outcome> {
    let loaded = args.source.load()?;
    let report = loaded
        .model
        .check_strip_symmetric(args.virtual_boundaries)?;
    let ok = report.strip_symmetric;
    let text = match args.output.format {
        Format::Json => to_json(&CheckOutput {
            family: loaded.family,
            size: loaded.size,
            virtual_boundaries: args.virtual_boundaries,
            report,
        })?,
        Format::Csv => {
            let mut s = String::from("property,value\n");
            let r = &report;
            let rows: [(&str, String); 8] = [
                ("augmented", r.augmented.to_string()),
                ("virtual_detectors", r.virtual_detectors.to_string()),
                ("strip_local", r.strip_local.to_string()),
                ("block_diagonal", r.block_diagonal.to_string()),
                ("pair_creating", r.pair_creating.to_string()),
                ("condition_block", r.condition_block.to_string()),
                ("condition_one_form", r.condition_one_form.to_string()),
                ("strip_symmetric", r.strip_symmetric.to_string()),
            ];
            for (k, v) in rows {
                let _ = writeln!(s, "{k},{v}");
            }
            for (j, b) in r.one_form.iter().enumerate() {
                let _ = writeln!(s, "one_form_strip_{j},{b}");
            }
            s
        }
    };
    emit(&args.output.out, &text)?;
    Ok(if ok {
        Outcome::Ok
    } else {
        Outcome::CheckFailed
    })
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
struct DecodeOutput {
    decoder: DecoderKind,
    syndrome: String,
    correction: String,
    weight: usize,
    flipped_faults: Vec<usize>,
    per_strip_weights: Vec<usize>,
    strip_parities: Vec<bool>,
}

fn cmd_decode(args: &DecodeArgs) -> Result<Outcome> {
    let loaded = args.source.load()?;
    let n_det = loaded.model.n_det();
    let s = match (&args.syndrome, &args.defects) {
        (Some(bits), None) => BitVector::parse_bits(bits)
            .ok_or_else(|| anyhow::anyhow!("syndrome must be a string of 0 and 1"))?,
        (None, Some(defects)) => BitVector::from_indices(n_det, defects)?,
        (None, None) => BitVector::zeros(n_det),
        (Some(_), Some(_)) => unreachable!("clap rejects both"),
    };
    if s.len() != n_det {
        bail!(
            "syndrome has {} bits but the model has {n_det} detectors",
            s.len()
        );
    }
    let r = args.decoder.prepare(&loaded.model)?.decode(&s)?;
    let out = DecodeOutput {
        decoder: args.decoder,
        syndrome: s.to_string(),
        correction: r.correction.to_string(),
        weight: r.weight,
        flipped_faults: r.correction.ones().collect(),
        per_strip_weights: r.per_strip_weights,
        strip_parities: r.strip_parities,
    };
    let text = match args.output.format {
        Format::Json => to_json(&out)?,
        Format::Csv => {
            let join = |v: &[usize]| {
                v.iter()
                    .map(ToString::to_string)
                    .collect::<Vec<_>>()
                    .join(" ")
            };
            format!(
                "decoder,weight,correction,flipped_faults,per_strip_weights\n{},{},{},{},{}\n",
                decoder_name(out.decoder),
                out.weight,
                out.correction,
                join(&out.flipped_faults),
                join(&out.per_strip_weights)
            )
        }
    };
    emit(&args.output.out, &text)?;
    Ok(Outcome::Ok)
}

fn decoder_name(kind: DecoderKind) -> &'static str {
    match kind {
        DecoderKind::Monolithic => "monolithic",
        DecoderKind::Stripwise => "stripwise",
    }
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
struct SimulateOutput {
    config: SimConfig,
    points: Vec<SimPoint>,
}

fn cmd_simulate(args: &SimulateArgs) -> Result<Outcome> {
    let config = SimConfig {
        family: args.family,
        size: args.size,
        p_values: args.p_values.clone().unwrap_or_else(default_p_grid),
        shots: args.shots,
        seed: args.seed,
        decoder: args.decoder,
    };
    let points = run_sim(&config)?;
    let text = match args.output.format {
        Format::Json => to_json(&SimulateOutput { config, points })?,
        Format::Csv => {
            let mut s = format!("{SIM_CSV_HEADER}\n");
            for p in &points {
                s.push_str(&sim_csv_row(args.family.name(), args.size, p));
                s.push('\n');
            }
            s
        }
    };
    emit(&args.output.out, &text)?;
    Ok(Outcome::Ok)
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
struct BenchOutput {
    family: String,
    #[serde(rename = "L")]
    size: Option<usize>,
    #[serde(flatten)]
    report: BenchReport,
}

fn cmd_bench(args: &BenchArgs) -> Result<Outcome> {
    let (family, size, model) = match &args.chains {
        Some(dets) => {
            let qubits: Vec<usize> = dets.iter().map(|d| d + 1).collect();
            ("chains".to_string(), None, chain_stack_model(&qubits))
        }
        None => {
            let loaded = args.source.load()?;
            (loaded.family_label(), loaded.size, loaded.model)
        }
    };
    let report = strip_core::bench(&model, args.alpha, args.repeats)?;
    let text = match args.output.format {
        Format::Json => to_json(&BenchOutput {
            family,
            size,
            report,
        })?,
        Format::Csv => {
            let row = bench_csv_row(&family, size, &report);
            let mut s = format!("{BENCH_CSV_HEADER}\n{row}\n");
            if let Some(w) = &report.wall_times {
                let _ = writeln!(
                    s,
                    "# wall_seconds monolithic={} stripwise={}",
                    format_g12(w.monolithic_seconds),
                    format_g12(w.stripwise_seconds)
                );
            }
            s
        }
    };
    emit(&args.output.out, &text)?;
    Ok(Outcome::Ok)
}

/// Parent detector family read from JSON by `deform --input`.
#[derive(Debug, Serialize, Deserialize)]
struct DeformInput {
    detectors: Vec<PauliString>,
    detector_strips: Vec<usize>,
    qubit_strips: Vec<usize>,
    cliffords: Vec<SingleQubitClifford>,
    #[serde(default)]
    axes: Option<Vec<Pauli>>,
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
struct DeformOutput {
    incidence_preserved: bool,
    parent_strip_symmetric: bool,
    deformed_strip_symmetric: bool,
    strip_symmetric: bool,
    incidence_ones: usize,
    parent_detectors: Vec<PauliString>,
    deformed_detectors: Vec<PauliString>,
}

fn broadcast<T: Clone>(values: Vec<T>, n: usize, what: &str) -> Result<Vec<T>> {
    match values.len() {
        1 => Ok(vec![values[0].clone(); n]),
        k if k == n => Ok(values),
        k => bail!("expected 1 or {n} {what}, got {k}"),
    }
}

fn builtin_parent(parent: Parent, strips: usize, length: usize) -> Result<DeformInput> {
    if strips == 0 || length < 2 {
        bail!("a built-in parent needs at least one strip of two qubits");
    }
    let letter = match parent {
        Parent::XChain => Pauli::X,
        Parent::ZChain => Pauli::Z,
    };
    let n = strips * length;
    let mut detectors = Vec::new();
    let mut detector_strips = Vec::new();
    for s in 0..strips {
        for i in 0..length - 1 {
            detectors.push(PauliString::on(
                n,
                &[s * length + i, s * length + i + 1],
                letter,
            ));
            detector_strips.push(s);
        }
    }
    Ok(DeformInput {
        detectors,
        detector_strips,
        qubit_strips: (0..n).map(|q| q / length).collect(),
        cliffords: vec![SingleQubitClifford::H],
        axes: None,
    })
}

fn cmd_deform(args: &DeformArgs) -> Result<Outcome> {
    let mut input = match (&args.input, args.parent) {
        (Some(path), _) => {
            let text = fs::read_to_string(path)
                .with_context(|| format!("cannot read {}", path.display()))?;
            serde_json::from_str::<DeformInput>(&text)
                .with_context(|| format!("in {}", path.display()))?
        }
        (None, Some(parent)) => builtin_parent(parent, args.strips, args.length)?,
        (None, None) => bail!("give either --input or --parent"),
    };
    if let Some(c) = &args.cliffords {
        input.cliffords = c.clone();
    }
    let n_strips = input.qubit_strips.iter().max().map_or(0, |m| m + 1);
    let cliffords = broadcast(input.cliffords.clone(), n_strips, "cliffords")?;
    let axes = match (&args.axes, &input.axes) {
        (Some(chars), _) => {
            let letters = chars
                .iter()
                .map(|&c| Pauli::from_char(c))
                .collect::<Result<Vec<_>, _>>()?;
            broadcast(letters, n_strips, "axes")?
        }
        (None, Some(axes)) => broadcast(axes.clone(), n_strips, "axes")?,
        (None, None) => cliffords
            .iter()
            .map(|c| c.apply_inverse(Pauli::Z))
            .collect(),
    };
    let assignment = DomainAssignment::new(input.qubit_strips.clone(), cliffords)?;
    let report = deform_and_check(
        &input.detectors,
        input.detector_strips.clone(),
        &assignment,
        &axes,
    )?;
    let out = DeformOutput {
        incidence_preserved: report.incidence_preserved,
        parent_strip_symmetric: report.parent_symmetry.strip_symmetric,
        deformed_strip_symmetric: report.deformed_symmetry.strip_symmetric,
        strip_symmetric: report.strip_symmetric,
        incidence_ones: report.deformed_model.incidence_matrix().count_ones(),
        parent_detectors: input.detectors,
        deformed_detectors: report.deformed_detectors,
    };
    let text = match args.output.format {
        Format::Json => to_json(&out)?,
        Format::Csv => {
            let mut s = String::from("property,value\n");
            let _ = writeln!(s, "incidence_preserved,{}", out.incidence_preserved);
            let _ = writeln!(s, "parent_strip_symmetric,{}", out.parent_strip_symmetric);
            let _ = writeln!(
                s,
                "deformed_strip_symmetric,{}",
                out.deformed_strip_symmetric
            );
            let _ = writeln!(s, "strip_symmetric,{}", out.strip_symmetric);
            let _ = writeln!(s, "incidence_ones,{}", out.incidence_ones);
            for (i, d) in out.deformed_detectors.iter().enumerate() {
                let _ = writeln!(s, "detector_{i},{d}");
            }
            s
        }
    };
    emit(&args.output.out, &text)?;
    Ok(if out.strip_symmetric {
        Outcome::Ok
    } else {
        Outcome::CheckFailed
    })
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
struct ExportOutput {
    family: Option<FamilyId>,
    #[serde(rename = "L")]
    size: Option<usize>,
    model: DetectorModel,
}

fn cmd_export(args: &ExportArgs) -> Result<Outcome> {
    let loaded = args.source.load()?;
    let model = &loaded.model;
    let text = match args.format {
        ExportFormat::Detmodel => write_detmodel(model, &loaded.comments),
        ExportFormat::Json => to_json(&ExportOutput {
            family: loaded.family,
            size: loaded.size,
            model: model.clone(),
        })?,
        ExportFormat::Csv => {
            let mut s = String::from("family,L,fault,detector,strip\n");
            let (fam, size) = (loaded.family_label(), loaded.size_label());
            for (f, support) in model.fault_supports().iter().enumerate() {
                if support.is_empty() {
                    let _ = writeln!(s, "{fam},{size},{f},,");
                }
                for &d in support {
                    let _ = writeln!(s, "{fam},{size},{f},{d},{}", model.strip_of_detector()[d]);
                }
            }
            s
        }
    };
    emit(&args.out, &text)?;
    Ok(Outcome::Ok)
}

fn run(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::Stats(a) => cmd_stats(a),
        Command::Check(a) => cmd_check(a),
        Command::Decode(a) => cmd_decode(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Bench(a) => cmd_bench(a),
        Command::Deform(a) => cmd_deform(a),
        Command::Export(a) => cmd_export(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::CheckFailed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
