//! Command implementations. Each returns the text for stdout, a summary for
//! stderr and the exit code; files are written atomically on the way.

use std::path::Path;

use num_rational::BigRational;
use perron_core::decimal::parse_rational;
use perron_core::diophantine::find_in_e_at;
use perron_core::kakeya::{
    blow_ratio, construct_blow_family, hr_probe, union_area_montecarlo, ProbeParams, RectFamily,
    Scheme, SizeParams,
};
use perron_core::lacunary::{finitely_lacunary_cover, lacunary_order, LacunaritySpec};
use perron_core::slopes::{
    capacity_brute_force, capacity_upper_bound, perron_factor, perron_factor_with_table,
    IndexConvention, SlopeSet,
};
use perron_core::witness::{
    assemble, describe, omega_e_witness, omega_s_witness, record_for, validate_n_list, Trig,
};
use perron_core::Error;
use rayon::prelude::*;
use serde::Serialize;

use crate::cli::{
    CapacityArgs, CertificateArgs, Cli, Command, FindEArgs, KakeyaArgs, LacunaryArgs, PerronArgs,
    ProbeArgs, SetInput, SlopeChoice,
};
use crate::config::RunConfig;
use crate::dto::{
    dec, dec_f64, CapacityJson, CertificateJson, CoverJson, LacunarityJson, OrderJson, PerronJson,
    ProbeJson, SlopeSetJson, WitnessJson, WitnessListJson,
};
use crate::output::write_atomic;
use crate::render::{blow_csv, family_svg, BlowRow};
use crate::{CliError, EXIT_OK, EXIT_SEARCH_FAILURE};

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome {
            stdout,
            stderr: String::new(),
            code: EXIT_OK,
        }
    }
}

/// Resolves the configuration from flags and the environment, then runs.
pub fn run(cli: Cli) -> Result<Outcome, CliError> {
    let g = &cli.global;
    let config = RunConfig::from_env(g.precision, g.max_search, g.output_dir.clone(), g.seed)?;
    run_with(cli.command, &config)
}

pub fn run_with(command: Command, config: &RunConfig) -> Result<Outcome, CliError> {
    match command {
        Command::Perron(a) => perron(a, config),
        Command::Capacity(a) => capacity(a, config),
        Command::Theorem1(a) => certificate(a, Trig::Cos, config),
        Command::OmegaS(a) => certificate(a, Trig::Sin, config),
        Command::FindE(a) => find_e(a, config),
        Command::Lacunary(a) => lacunary(a, config),
        Command::Kakeya(a) => kakeya(a, config),
        Command::MaximalProbe(a) => maximal_probe(a, config),
    }
}

fn json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("documents serialize");
    s.push('\n');
    s
}

fn save(config: &RunConfig, name: &str, text: &str) -> Result<std::path::PathBuf, CliError> {
    let path = config.output_path(name);
    write_atomic(&path, text.as_bytes())?;
    Ok(path)
}

/// Prints `text` and also saves it when `out` is given.
fn emit(config: &RunConfig, out: Option<&str>, text: String) -> Result<Outcome, CliError> {
    if let Some(name) = out {
        save(config, name, &text)?;
    }
    Ok(Outcome::ok(text))
}

fn split_values(text: &str) -> Vec<String> {
    text.lines()
        .filter(|l| !l.trim_start().starts_with('#'))
        .flat_map(|l| l.split(|c: char| c == ',' || c.is_whitespace()))
        .filter(|s| !s.is_empty())
        .map(str::to_owned)
        .collect()
}

fn read_values_file(path: &Path) -> Result<Vec<String>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    if text.trim_start().starts_with('{') {
        let doc: SlopeSetJson = serde_json::from_str(&text)
            .map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
        Ok(doc.values)
    } else {
        Ok(split_values(&text))
    }
}

fn read_set(input: &SetInput) -> Result<SlopeSet, CliError> {
    let values = match &input.file {
        Some(p) => read_values_file(p)?,
        None => input.values.clone(),
    };
    if values.is_empty() {
        return Err(CliError::usage("no values given (use --values or --file)"));
    }
    Ok(SlopeSet::from_decimal_strs(&values)?)
}

fn convention(s: &str) -> Result<IndexConvention, CliError> {
    Ok(IndexConvention::parse(s)?)
}

fn perron(a: PerronArgs, config: &RunConfig) -> Result<Outcome, CliError> {
    let set = read_set(&a.input)?;
    let conv = convention(&a.convention)?;
    let report = if a.table {
        perron_factor_with_table(&set, conv)?
    } else {
        perron_factor(&set, conv)?
    };
    emit(
        config,
        a.out.as_deref(),
        json(&PerronJson::new(&report, &set, config)),
    )
}

fn capacity(a: CapacityArgs, config: &RunConfig) -> Result<Outcome, CliError> {
    let conv = convention(&a.convention)?;
    let doc = if a.omega_e {
        if !a.input.values.is_empty() || a.input.file.is_some() {
            return Err(CliError::usage(
                "--omega-e builds its own sets; drop --values/--file",
            ));
        }
        validate_n_list(&a.n)?;
        let witnesses =
            a.n.par_iter()
                .map(|&n| {
                    omega_e_witness(n, config.max_search, config.precision_bits)
                        .map(|w| (n, w.set.perturbed_values))
                })
                .collect::<Result<Vec<_>, Error>>()?;
        CapacityJson::from_estimate(&capacity_upper_bound(&witnesses, conv)?, config)
    } else {
        let [n] = a.n[..] else {
            return Err(CliError::usage("exhaustive search takes a single --n"));
        };
        let set = read_set(&a.input)?;
        let best = capacity_brute_force(&set, n, conv)?;
        CapacityJson {
            method: "brute_force".into(),
            upper_bounds: [(n, dec(&best.g))].into(),
            certified_bound: Some(crate::dto::dec_q(&best.g.upper())),
            subset: Some((&best.subset).into()),
            config: config.clone(),
        }
    };
    emit(config, a.out.as_deref(), json(&doc))
}

fn certificate(a: CertificateArgs, trig: Trig, config: &RunConfig) -> Result<Outcome, CliError> {
    validate_n_list(&a.n)?;
    let witness = match trig {
        Trig::Cos => omega_e_witness,
        Trig::Sin => omega_s_witness,
    };
    let records: Vec<_> =
        a.n.par_iter()
            .map(|&n| record_for(n, witness(n, config.max_search, config.precision_bits)))
            .collect();
    let cert = assemble(records);
    let default_name = match trig {
        Trig::Cos => "theorem1_certificate.json",
        Trig::Sin => "omega_s_certificate.json",
    };
    let path = save(
        config,
        a.out.as_deref().unwrap_or(default_name),
        &json(&CertificateJson::new(&cert, trig, config)),
    )?;

    let mut summary: String = cert.records.iter().map(|r| describe(r) + "\n").collect();
    match &cert.conclusion {
        Some(c) => summary.push_str(&format!(
            "conclusion: Perron capacity <= {}\n",
            crate::dto::dec_q(c)
        )),
        None => summary.push_str("conclusion: none (a record failed)\n"),
    }
    summary.push_str(&format!("certificate: {}\n", path.display()));
    let code = if cert.pass() {
        EXIT_OK
    } else {
        cert.first_failure()
            .map_or(EXIT_SEARCH_FAILURE, crate::exit_code)
    };
    Ok(Outcome {
        stdout: summary,
        stderr: String::new(),
        code,
    })
}

fn find_e(a: FindEArgs, config: &RunConfig) -> Result<Outcome, CliError> {
    let max_n = a.max_n.unwrap_or(config.max_search);
    let found = find_in_e_at(a.level, max_n, config.precision_bits)?;
    let doc = WitnessListJson {
        level: a.level,
        max_n,
        witnesses: found.iter().map(WitnessJson::from).collect(),
        config: config.clone(),
    };
    emit(config, a.out.as_deref(), json(&doc))
}

fn lacunary(a: LacunaryArgs, config: &RunConfig) -> Result<Outcome, CliError> {
    let set = read_set(&a.input)?;
    let ratio = parse_rational(&a.ratio)?;
    let spec = LacunaritySpec {
        ratio: ratio.clone(),
        max_order: a.max_order,
        max_cover: a.max_cover,
        budget: a.budget,
    };
    let x: Vec<BigRational> = set.rationals().expect("sets read from decimals are exact");
    let mut doc = match lacunary_order(&set, &spec) {
        Ok(report) => LacunarityJson::new(&report, &x, &ratio, &set, config),
        Err(Error::SearchBudgetExceeded { budget }) => LacunarityJson {
            order: OrderJson::Marker(format!("exceeds budget {budget}")),
            exact: false,
            work: budget,
            ratio: crate::dto::dec_q(&ratio),
            normalization: perron_core::lacunary::NORMALIZATION.into(),
            set: (&set).into(),
            witness_tree: None,
            cover: None,
            config: config.clone(),
        },
        Err(e) => return Err(e.into()),
    };
    if a.cover {
        doc.cover = match finitely_lacunary_cover(&set, &spec) {
            Ok(c) => Some(CoverJson::from(&c)),
            Err(Error::SearchBudgetExceeded { budget }) => Some(CoverJson {
                found: false,
                parts: Vec::new(),
                orders: Vec::new(),
                attempts: budget,
                budget: Some(budget),
            }),
            Err(e) => return Err(e.into()),
        };
    }
    emit(config, a.out.as_deref(), json(&doc))
}

/// `k / 2^n` for `k < 2^n`.
fn progression_slopes(n: u32) -> Result<SlopeSet, CliError> {
    if n > 16 {
        return Err(CliError::usage(format!(
            "N = {n} is too large for a slope family"
        )));
    }
    let den = 1i64 << n;
    Ok(SlopeSet::from_rationals(
        (0..den)
            .map(|k| BigRational::new(k.into(), den.into()))
            .collect(),
    )?)
}

fn parse_range(s: &str) -> Result<Vec<u32>, CliError> {
    let bad = || CliError::usage(format!("bad N range {s:?}; expected like 2..5 or 3"));
    let (lo, hi) = match s.split_once("..") {
        Some((a, b)) => (
            a.trim().parse().map_err(|_| bad())?,
            b.trim()
                .trim_start_matches('=')
                .parse()
                .map_err(|_| bad())?,
        ),
        None => {
            let n = s.trim().parse().map_err(|_| bad())?;
            (n, n)
        }
    };
    if lo > hi {
        return Err(bad());
    }
    Ok((lo..=hi).collect())
}

/// Labelled slope sets: `(N, set)`, with `N = log2 |set|` for explicit slopes.
fn slope_sets(c: &SlopeChoice) -> Result<Vec<(u32, SlopeSet)>, CliError> {
    match &c.ap {
        Some(r) => parse_range(r)?
            .into_iter()
            .map(|n| Ok((n, progression_slopes(n)?)))
            .collect(),
        None if c.slopes.is_empty() => Err(CliError::usage("give --slopes or --ap")),
        None => {
            let set = SlopeSet::from_decimal_strs(&c.slopes)?;
            Ok(vec![(set.len().trailing_zeros(), set)])
        }
    }
}

fn scheme(s: &str) -> Result<Scheme, CliError> {
    match Scheme::parse(s)? {
        Scheme::Custom => Err(CliError::usage(
            "custom families are not built from the command line",
        )),
        sc => Ok(sc),
    }
}

fn kakeya(a: KakeyaArgs, config: &RunConfig) -> Result<Outcome, CliError> {
    let sc = scheme(&a.scheme)?;
    let sets = slope_sets(&a.slopes)?;
    let results = sets
        .par_iter()
        .map(|(n, u)| {
            let f = construct_blow_family(u, sc, &SizeParams::default())?;
            let b = blow_ratio(&f.rects, a.factor, a.target)?;
            let mc = match a.montecarlo {
                Some(samples) => Some(union_area_montecarlo(&f.rects, samples, config.seed)?),
                None => None,
            };
            Ok((BlowRow::new(*n, &f, a.factor, &b), f, mc))
        })
        .collect::<Result<Vec<_>, Error>>()?;

    let rows: Vec<BlowRow> = results.iter().map(|r| r.0.clone()).collect();
    let csv = blow_csv(&rows, config, a.target)?;
    if let Some(name) = &a.csv {
        save(config, name, &csv)?;
    }
    if let Some(name) = &a.svg {
        let last: &RectFamily = &results.last().expect("at least one family").1;
        save(config, name, &family_svg(last, a.factor))?;
    }
    let mut stderr = String::new();
    for (row, _, mc) in &results {
        if let Some(m) = mc {
            stderr.push_str(&format!(
                "N={} montecarlo union area {} ± {} (raster {})\n",
                row.n,
                dec_f64(m.value),
                dec_f64(m.abs_error),
                row.union_area
            ));
        }
    }
    Ok(Outcome {
        stdout: csv,
        stderr,
        code: EXIT_OK,
    })
}

fn maximal_probe(a: ProbeArgs, config: &RunConfig) -> Result<Outcome, CliError> {
    let sc = scheme(&a.scheme)?;
    let sets = slope_sets(&a.slopes)?;
    let params = ProbeParams {
        cells: a.cells,
        ..ProbeParams::default()
    };
    let reports = sets
        .par_iter()
        .map(|(_, u)| hr_probe(u, a.alpha, sc, &params).map(|r| ProbeJson::new(&r, sc, config)))
        .collect::<Result<Vec<_>, Error>>()?;
    let text = match &reports[..] {
        [one] => json(one),
        many => json(&many),
    };
    emit(config, a.out.as_deref(), text)
}
