use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use gaplab::construction::{generate_n, PsiTable, SeqParams};
use gaplab::kernels::PeriodicFunction;
use gaplab::montecarlo::{run_lil_experiment, DEFAULT_MAX_ELEMENTS};
use gaplab::parameters::{solve_params, ConstantsReport, Mode};
use gaplab::statistics::{disc_report, trace_many, DiscReport, LilTrace};
use serde::Serialize;
use serde_json::json;
use sha2::{Digest, Sha256};

use crate::config::RunConfig;
use crate::output::{num, opt, unix_seconds, Csv, Outputs, RunManifest};
use crate::{Cli, CliError, Command, Format, SeqArgs, MAX_ELEMENTS_VAR};

pub fn run(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Solve(args) => solve(cli, args.lil, args.disc),
        Command::Generate(args) => generate(cli, args),
        Command::Signs(args) => signs(cli, args),
        Command::Trace(args) => trace(cli, &args.config),
        Command::Disc(args) => match (&args.config, &args.points) {
            (Some(config), _) => disc_config(cli, config),
            (None, Some(points)) => disc_points(cli, points),
            (None, None) => unreachable!("clap requires one source"),
        },
        Command::Mc(args) => mc(cli, &args.config),
    }
}

fn max_elements() -> Result<u64, CliError> {
    match std::env::var(MAX_ELEMENTS_VAR) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| CliError::Config(format!("{MAX_ELEMENTS_VAR}={v} is not a non-negative integer"))),
        Err(_) => Ok(DEFAULT_MAX_ELEMENTS),
    }
}

fn check_ceiling(requested: u128) -> Result<(), CliError> {
    let ceiling = max_elements()?;
    if requested > ceiling as u128 {
        return Err(gaplab::Error::ResourceCap { requested, ceiling }.into());
    }
    Ok(())
}

fn no_binary(cli: &Cli, what: &str) -> Result<(), CliError> {
    if cli.format == Format::Bin {
        return Err(CliError::Config(format!("--format bin applies to generate and signs, not {what}")));
    }
    Ok(())
}

fn solve(cli: &Cli, lil: Option<f64>, disc: Option<f64>) -> Result<(), CliError> {
    no_binary(cli, "solve")?;
    let (target, mode) = match (lil, disc) {
        (Some(t), _) => (t, Mode::Lil),
        (None, Some(t)) => (t, Mode::Discrepancy),
        (None, None) => unreachable!("clap requires one target"),
    };
    let c = solve_params(target, mode)?;
    let mut out = io::stdout().lock();
    let text = if cli.format == Format::Json {
        serde_json::to_string_pretty(&c).expect("report serializes") + "\n"
    } else {
        format!(
            "lambda = {}\np = {}\nlil_constant = {}\ndisc_constant = {}\ndensity = {}\nmax_lil_constant = {}\nat_feasibility_boundary = {}\n",
            c.lambda,
            num(c.p),
            num(c.lil_constant),
            num(c.disc_constant),
            num(c.density),
            num(c.max_lil_constant),
            c.at_feasibility_boundary
        )
    };
    out.write_all(text.as_bytes()).map_err(|e| CliError::io(Path::new("<stdout>"), e))
}

fn seq_params(cli: &Cli, args: &SeqArgs) -> Result<(SeqParams, ConstantsReport), CliError> {
    let constants = match (args.lil, args.p) {
        (Some(target), _) => solve_params(target, Mode::Lil)?,
        (None, Some(p)) => {
            let lambda = args.lambda.unwrap_or(1);
            SeqParams::new(lambda, p, 0, 0).validate()?;
            ConstantsReport::new(lambda, p)
        }
        (None, None) => unreachable!("clap requires p or lil"),
    };
    let params = SeqParams::new(constants.lambda, constants.p, cli.seed.unwrap_or(0), args.limit);
    params.validate()?;
    check_ceiling(args.limit as u128)?;
    Ok((params, constants))
}

/// Writes to a file or standard output while hashing the bytes.
struct Sink {
    inner: BufWriter<Box<dyn Write>>,
    hasher: Sha256,
    bytes: u64,
    path: PathBuf,
}

impl Sink {
    fn open(out: Option<&Path>) -> Result<Self, CliError> {
        let (inner, path): (Box<dyn Write>, PathBuf) = match out {
            Some(p) => (Box::new(File::create(p).map_err(|e| CliError::io(p, e))?), p.to_path_buf()),
            None => (Box::new(io::stdout()), PathBuf::from("<stdout>")),
        };
        Ok(Self {
            inner: BufWriter::with_capacity(1 << 16, inner),
            hasher: Sha256::new(),
            bytes: 0,
            path,
        })
    }

    fn put(&mut self, data: &[u8]) -> Result<(), CliError> {
        self.hasher.update(data);
        self.bytes += data.len() as u64;
        self.inner.write_all(data).map_err(|e| CliError::io(&self.path, e))
    }

    fn finish(mut self) -> Result<(String, u64), CliError> {
        self.inner.flush().map_err(|e| CliError::io(&self.path, e))?;
        Ok((hex::encode(self.hasher.finalize()), self.bytes))
    }
}

/// Streams values in the chosen format: decimal lines, a JSON array, or
/// little-endian fixed-width binary.
fn emit_stream<I, T>(cli: &Cli, sink: &mut Sink, values: I, to_bin: fn(T) -> Vec<u8>) -> Result<(), CliError>
where
    I: Iterator<Item = T>,
    T: std::fmt::Display + Copy,
{
    let mut line = String::new();
    if cli.format == Format::Json {
        sink.put(b"[")?;
    }
    for (i, v) in values.enumerate() {
        match cli.format {
            Format::Bin => sink.put(&to_bin(v))?,
            Format::Csv => {
                line.clear();
                use std::fmt::Write as _;
                let _ = writeln!(line, "{v}");
                sink.put(line.as_bytes())?;
            }
            Format::Json => {
                line.clear();
                use std::fmt::Write as _;
                let _ = write!(line, "{}{v}", if i == 0 { "" } else { "," });
                sink.put(line.as_bytes())?;
            }
        }
    }
    if cli.format == Format::Json {
        sink.put(b"]\n")?;
    }
    Ok(())
}

fn sequence_manifest(
    cli: &Cli,
    command: &str,
    params: &SeqParams,
    constants: &ConstantsReport,
    out: Option<&Path>,
    digest: (String, u64),
    started: f64,
) -> Result<(), CliError> {
    let Some(path) = out else { return Ok(()) };
    let mut outputs = Outputs::new(&cli.out_dir)?;
    outputs.files.push(crate::output::FileDigest {
        path: path.display().to_string(),
        sha256: digest.0,
        bytes: digest.1,
    });
    let config = json!({
        "lambda": params.lambda,
        "p": params.p,
        "seed": params.seed,
        "limit": params.limit,
        "format": format!("{:?}", cli.format).to_lowercase(),
    });
    RunManifest::write(command, config, json!({ "constants": constants }), started, outputs)
}

fn generate(cli: &Cli, args: &SeqArgs) -> Result<(), CliError> {
    let started = unix_seconds();
    let (params, constants) = seq_params(cli, args)?;
    let table = PsiTable::full();
    let mut sink = Sink::open(args.out.as_deref())?;
    let mut gaps: BTreeMap<u64, u64> = BTreeMap::new();
    let mut prev: Option<u64> = None;
    let values = generate_n(&params, &table)?.inspect(|&v| {
        if let Some(u) = prev {
            *gaps.entry(v - u).or_default() += 1;
        }
        prev = Some(v);
    });
    emit_stream(cli, &mut sink, values, |v: u64| v.to_le_bytes().to_vec())?;
    let digest = sink.finish()?;
    let histogram: Vec<String> = gaps.iter().map(|(g, c)| format!("{g}:{c}")).collect();
    eprintln!("gap histogram {}", if histogram.is_empty() { "(empty)".into() } else { histogram.join(" ") });
    sequence_manifest(cli, "generate", &params, &constants, args.out.as_deref(), digest, started)
}

fn signs(cli: &Cli, args: &SeqArgs) -> Result<(), CliError> {
    let started = unix_seconds();
    let (params, constants) = seq_params(cli, args)?;
    let signs = gaplab::statistics::littlewood_signs(&params, &PsiTable::full(), params.limit)?;
    let mut sink = Sink::open(args.out.as_deref())?;
    emit_stream(cli, &mut sink, signs.into_iter(), |a: i8| a.to_le_bytes().to_vec())?;
    let digest = sink.finish()?;
    sequence_manifest(cli, "signs", &params, &constants, args.out.as_deref(), digest, started)
}

struct Resolved {
    config: RunConfig,
    constants: ConstantsReport,
    functions: Vec<PeriodicFunction>,
}

fn load(cli: &Cli, path: &Path) -> Result<Resolved, CliError> {
    let mut config = RunConfig::load(path)?;
    if let Some(seed) = cli.seed {
        config.master_seed = seed;
    }
    let experiment = config.experiment(max_elements()?, cli.threads)?;
    let constants = experiment.target.resolve()?;
    let functions = experiment.functions;
    let config = config.resolved(constants.lambda, constants.p)?;
    Ok(Resolved {
        config,
        constants,
        functions,
    })
}

#[derive(Serialize)]
struct TraceOutput<'a> {
    label: String,
    theoretical: f64,
    trace: &'a LilTrace,
}

fn trace(cli: &Cli, path: &Path) -> Result<(), CliError> {
    no_binary(cli, "trace")?;
    let started = unix_seconds();
    let r = load(cli, path)?;
    if r.functions.is_empty() {
        return Err(CliError::Config("at `functions`: trace needs at least one function".into()));
    }
    check_ceiling(r.config.limit as u128)?;
    let experiment = r.config.experiment(max_elements()?, cli.threads)?;
    let x = experiment.point(0);
    let seed = experiment.sequence_seed(0);
    let params = SeqParams::new(r.constants.lambda, r.constants.p, seed, r.config.limit);
    let traces = trace_many(&r.functions, generate_n(&params, &PsiTable::full())?, x, &experiment.checkpoints)?;

    let mut outputs = Outputs::new(&cli.out_dir)?;
    let mut summary = Vec::new();
    for (i, (f, t)) in r.functions.iter().zip(&traces).enumerate() {
        let theoretical = r.constants.lil_constant * f.l2_norm();
        summary.push(TraceOutput {
            label: f.to_string(),
            theoretical,
            trace: t,
        });
        if cli.format == Format::Csv {
            let mut csv = Csv::new(&["N", "S_N", "ratio", "running_sup", "theoretical"]);
            for c in &t.checkpoints {
                csv.row(&[c.n.to_string(), num(c.partial_sum), opt(c.ratio), num(c.running_sup), num(theoretical)]);
            }
            if t.truncated {
                csv.mark_truncated();
            }
            outputs.write(&format!("trace_f{i}.csv"), &csv.into_bytes())?;
        }
        let last = t.last();
        println!(
            "{}: N = {}, S_N = {}, running sup = {}, Lambda*||f|| = {}{}",
            f,
            last.map_or(0, |c| c.n),
            num(last.map_or(0.0, |c| c.partial_sum)),
            num(t.running_sup),
            num(theoretical),
            if t.truncated { " (truncated)" } else { "" }
        );
    }
    if cli.format == Format::Json {
        outputs.write_json(
            "trace.json",
            &json!({
                "constants": r.constants,
                "x_bits": format!("{:032x}", x.bits()),
                "seed": seed,
                "functions": summary,
            }),
        )?;
    }
    write_manifest("trace", &r, &experiment, started, outputs)
}

fn write_manifest(
    command: &str,
    r: &Resolved,
    experiment: &gaplab::montecarlo::ExperimentConfig,
    started: f64,
    outputs: Outputs,
) -> Result<(), CliError> {
    let seeds: Vec<u64> = (0..experiment.num_seeds).map(|i| experiment.sequence_seed(i)).collect();
    let points: Vec<String> = (0..experiment.num_x)
        .map(|i| format!("{:032x}", experiment.point(i).bits()))
        .collect();
    let resolved = json!({ "constants": r.constants, "sequence_seeds": seeds, "x_bits": points });
    RunManifest::write(command, &r.config, resolved, started, outputs)
}

fn disc_rows(
    cli: &Cli,
    outputs: &mut Outputs,
    rows: &[DiscReport],
    theoretical: Option<f64>,
    truncated: bool,
) -> Result<(), CliError> {
    match cli.format {
        Format::Csv => {
            let mut csv = Csv::new(&["N", "d_star", "d_ext", "scaled", "theoretical"]);
            for r in rows {
                csv.row(&[r.n.to_string(), num(r.d_star), num(r.d_ext), opt(r.scaled), opt(theoretical)]);
            }
            if truncated {
                csv.mark_truncated();
            }
            outputs.write("disc.csv", &csv.into_bytes())
        }
        _ => outputs.write_json(
            "disc.json",
            &json!({ "rows": rows, "theoretical": theoretical, "truncated": truncated }),
        ),
    }
}

fn disc_config(cli: &Cli, path: &Path) -> Result<(), CliError> {
    no_binary(cli, "disc")?;
    let started = unix_seconds();
    let r = load(cli, path)?;
    check_ceiling(r.config.limit as u128)?;
    let experiment = r.config.experiment(max_elements()?, cli.threads)?;
    let x = experiment.point(0);
    let seed = experiment.sequence_seed(0);
    let params = SeqParams::new(r.constants.lambda, r.constants.p, seed, r.config.limit);
    let ys: Vec<f64> = generate_n(&params, &PsiTable::full())?.map(|n| x.times(n).to_f64()).collect();
    let checkpoints = &experiment.checkpoints;
    let rows = checkpoints
        .iter()
        .take_while(|&&n| n as usize <= ys.len())
        .map(|&n| disc_report(&ys[..n as usize]))
        .collect::<Result<Vec<_>, _>>()?;
    let truncated = rows.len() < checkpoints.len();
    let mut outputs = Outputs::new(&cli.out_dir)?;
    disc_rows(cli, &mut outputs, &rows, Some(r.constants.disc_constant), truncated)?;
    if let Some(last) = rows.last() {
        println!(
            "N = {}, d_star = {}, scaled = {}, disc constant = {}{}",
            last.n,
            num(last.d_star),
            opt(last.scaled),
            num(r.constants.disc_constant),
            if truncated { " (truncated)" } else { "" }
        );
    }
    write_manifest("disc", &r, &experiment, started, outputs)
}

fn disc_points(cli: &Cli, path: &Path) -> Result<(), CliError> {
    no_binary(cli, "disc")?;
    let started = unix_seconds();
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let mut points = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let y: f64 = line
            .parse()
            .map_err(|_| CliError::Config(format!("{}:{}: `{line}` is not a number", path.display(), i + 1)))?;
        if !(0.0..1.0).contains(&y) {
            return Err(CliError::Config(format!("{}:{}: {y} outside [0, 1)", path.display(), i + 1)));
        }
        points.push(y);
    }
    let report = disc_report(&points)?;
    let mut outputs = Outputs::new(&cli.out_dir)?;
    disc_rows(cli, &mut outputs, &[report], None, false)?;
    println!("N = {}, d_star = {}, d_ext = {}", report.n, num(report.d_star), num(report.d_ext));
    let mut input = Sha256::new();
    input.update(text.as_bytes());
    let config = json!({ "points": path.display().to_string() });
    let resolved = json!({ "points_sha256": hex::encode(input.finalize()) });
    RunManifest::write("disc", config, resolved, started, outputs)
}

fn mc(cli: &Cli, path: &Path) -> Result<(), CliError> {
    no_binary(cli, "mc")?;
    let started = unix_seconds();
    let r = load(cli, path)?;
    let experiment = r.config.experiment(max_elements()?, cli.threads)?;
    let report = run_lil_experiment(&experiment)?;

    let mut outputs = Outputs::new(&cli.out_dir)?;
    if cli.format == Format::Json {
        outputs.write_json("mc_report.json", &report)?;
    } else {
        for (i, f) in report.functions.iter().enumerate() {
            let mut csv = Csv::new(&["N", "q05", "q25", "q50", "q75", "q95", "samples", "theoretical"]);
            for row in &f.quantiles {
                let mut fields = vec![row.n.to_string()];
                fields.extend(row.running_sup.iter().map(|&v| num(v)));
                fields.push(row.samples.to_string());
                fields.push(num(f.theoretical));
                csv.row(&fields);
            }
            if report.truncated {
                csv.mark_truncated();
            }
            outputs.write(&format!("mc_quantiles_f{i}.csv"), &csv.into_bytes())?;
        }
        let mut header = vec!["x_index", "seed_index", "x", "x_bits", "seed", "count", "density", "expected_density"];
        let ratio_names: Vec<String> = (0..report.functions.len()).map(|i| format!("final_ratio_f{i}")).collect();
        header.extend(ratio_names.iter().map(String::as_str));
        let mut csv = Csv::new(&header);
        for (t, summary) in report.trajectories.iter().enumerate() {
            let mut fields = vec![
                summary.x_index.to_string(),
                summary.seed_index.to_string(),
                num(summary.x),
                summary.x_bits.clone(),
                summary.seed.to_string(),
                summary.count.to_string(),
                num(summary.density),
                num(report.expected_density),
            ];
            fields.extend(report.functions.iter().map(|f| opt(f.final_ratios[t])));
            csv.row(&fields);
        }
        if report.truncated {
            csv.mark_truncated();
        }
        outputs.write("mc_trajectories.csv", &csv.into_bytes())?;
    }
    println!(
        "lambda = {}, p = {}, {} trajectories to limit {}{}",
        r.constants.lambda,
        num(r.constants.p),
        report.trajectories.len(),
        report.limit,
        if report.truncated { " (truncated)" } else { "" }
    );
    for f in &report.functions {
        if let Some(row) = f.quantiles.last() {
            println!(
                "{}: N = {}, running sup median = {}, Lambda*||f|| = {}",
                f.label,
                row.n,
                num(row.running_sup[2]),
                num(f.theoretical)
            );
        }
    }
    write_manifest("mc", &r, &experiment, started, outputs)
}
