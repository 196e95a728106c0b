use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use serde_json::{json, Value};

use pencilcount::cache::Cache;
use pencilcount::scan::{self, Mode, ScanOptions};
use pencilcount::verify::{self, Suite, SuiteOptions};
use pencilcount::{enumerate_diagrams, par, Bidegree, Calculator, Convention, Error, Result};

#[derive(Parser, Debug)]
#[command(name = "pencilcount", version, about = "Exact real and complex counts of rational curves in the quadric and in 3-space")]
struct Cli {
    /// Worker threads (default: machine parallelism).
    #[arg(long, global = true, env = "PENCILCOUNT_JOBS", value_parser = clap::value_parser!(u32).range(1..))]
    jobs: Option<u32>,
    /// Result cache file.
    #[arg(long, global = true, default_value = "pencilcount-cache.jsonl")]
    cache: PathBuf,
    /// Do not read or write the cache file.
    #[arg(long, global = true)]
    no_cache: bool,
    /// Multiplicity convention id (default: the fitted one).
    #[arg(long, global = true)]
    convention: Option<String>,
    /// Evaluate the space sum even for even degrees.
    #[arg(long, global = true)]
    force_compute: bool,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Largest number of scan states kept at one position.
    #[arg(long, global = true)]
    max_states: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Complex count of rational degree-d curves in 3-space.
    Gw3 {
        #[arg(long)]
        d: u32,
    },
    /// Signed real count in 3-space with l conjugate pairs.
    W3 {
        #[arg(long)]
        d: u32,
        #[arg(long)]
        l: u32,
    },
    /// Complex count on the quadric.
    GwQuadric {
        #[arg(long)]
        a: u32,
        #[arg(long)]
        b: u32,
    },
    /// Signed real count on the quadric with l conjugate pairs.
    WQuadric {
        #[arg(long)]
        a: u32,
        #[arg(long)]
        b: u32,
        #[arg(long)]
        l: u32,
    },
    /// The real 3-space triangle for odd d <= dmax.
    Table {
        #[arg(long)]
        dmax: u32,
    },
    /// Run a verification suite.
    Verify {
        #[arg(long, default_value = "all")]
        suite: String,
        /// Include the d = 11 row.
        #[arg(long)]
        extended: bool,
    },
    /// Floor diagrams of a bidegree.
    Diagrams {
        #[arg(long)]
        a: u32,
        #[arg(long)]
        b: u32,
        #[arg(long, value_enum, default_value_t = Dump::Json)]
        dump: Dump,
    },
    /// Scan state-space statistics, without the invariant.
    StateReport {
        #[arg(long)]
        a: u32,
        #[arg(long)]
        b: u32,
        /// Scan every diagram when the generator walk stays within this many
        /// labelings; sample otherwise.
        #[arg(long, default_value_t = 2_000_000)]
        max_raw: u64,
        /// Diagrams per tree shape when sampling.
        #[arg(long, default_value_t = 4)]
        per_shape: usize,
    },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Dump {
    Json,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{}", e);
                return ExitCode::SUCCESS;
            }
            let msg = e.to_string();
            eprintln!("ERROR 2: {}", msg.trim_start_matches("error: ").trim_end());
            return ExitCode::from(2);
        }
    };
    let jobs = cli.jobs.map(|j| j as usize).unwrap_or_else(par::default_jobs);
    match par::with_jobs(jobs, || run(&cli)) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("ERROR {}: {}", e.exit_code(), e);
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn calculator(cli: &Cli) -> Result<Calculator> {
    let conv = match &cli.convention {
        Some(s) => s.parse::<Convention>()?,
        None => pencilcount::convention::FITTED,
    };
    let mut opts = ScanOptions::default();
    if let Some(m) = cli.max_states {
        opts.max_states = m;
    }
    let cache = if cli.no_cache { Cache::memory() } else { Cache::open(&cli.cache)? };
    Ok(Calculator::new(conv).with_options(opts).with_cache(Arc::new(cache)))
}

fn print_value(cli: &Cli, fields: Value, value: &BigInt) {
    match cli.format {
        Format::Text => println!("{}", value),
        Format::Csv => {
            let obj = fields.as_object().unwrap();
            let keys: Vec<&str> = obj.keys().map(String::as_str).collect();
            let vals: Vec<String> = obj.values().map(|v| v.to_string()).collect();
            println!("{},value", keys.join(","));
            println!("{},{}", vals.join(","), value);
        }
        Format::Json => {
            let mut obj = fields;
            obj["value"] = Value::String(value.to_string());
            println!("{}", obj);
        }
    }
}

fn run(cli: &Cli) -> Result<u8> {
    match &cli.cmd {
        Cmd::Gw3 { d } => {
            let v = calculator(cli)?.gw_cp3(*d)?;
            print_value(cli, json!({"d": d}), &v);
        }
        Cmd::W3 { d, l } => {
            let c = calculator(cli)?;
            let v = if cli.force_compute { c.w_rp3_sum(*d, *l)? } else { c.w_rp3(*d, *l)? };
            print_value(cli, json!({"d": d, "l": l}), &v);
        }
        Cmd::GwQuadric { a, b } => {
            let v = calculator(cli)?.gw_quadric(*a, *b)?;
            print_value(cli, json!({"a": a, "b": b}), &v);
        }
        Cmd::WQuadric { a, b, l } => {
            let v = calculator(cli)?.w_quadric(*a, *b, *l)?;
            print_value(cli, json!({"a": a, "b": b, "l": l}), &v);
        }
        Cmd::Table { dmax } => table(cli, *dmax)?,
        Cmd::Verify { suite, extended } => {
            let suite: Suite = suite.parse()?;
            let calc = calculator(cli)?;
            let report = verify::run_suite(suite, &SuiteOptions { extended: *extended, calculator: calc })?;
            match cli.format {
                Format::Json => println!("{}", report.to_json()),
                _ => print!("{}", report.render_text()),
            }
            if !report.pass {
                eprintln!("ERROR 1: suite {} failed {} checks", report.suite, report.failures().count());
                return Ok(1);
            }
        }
        Cmd::Diagrams { a, b, dump: Dump::Json } => diagrams(cli, *a, *b)?,
        Cmd::StateReport { a, b, max_raw, per_shape } => {
            let calc = calculator(cli)?;
            let report = scan::state_space_report(Bidegree::new(*a, *b)?, &calc.options, *max_raw, *per_shape)?;
            println!("{}", serde_json::to_string_pretty(&report).unwrap());
        }
    }
    Ok(0)
}

fn table(cli: &Cli, dmax: u32) -> Result<()> {
    let c = calculator(cli)?;
    let mut rows = Vec::new();
    for d in (1..=dmax).step_by(2) {
        let mut row = Vec::new();
        for l in 0..d {
            row.push(c.w_rp3(d, l)?);
        }
        rows.push((d, row));
    }
    match cli.format {
        Format::Text => {
            for (d, row) in &rows {
                let vals: Vec<String> = row.iter().map(|v| v.to_string()).collect();
                println!("{}: {}", d, vals.join(" "));
            }
        }
        Format::Csv => {
            println!("d,l,value");
            for (d, row) in &rows {
                for (l, v) in row.iter().enumerate() {
                    println!("{},{},{}", d, l, v);
                }
            }
        }
        Format::Json => {
            let cells: Vec<Value> = rows
                .iter()
                .flat_map(|(d, row)| row.iter().enumerate().map(move |(l, v)| json!({"d": d, "l": l, "value": v.to_string()})))
                .collect();
            println!("{}", Value::Array(cells));
        }
    }
    Ok(())
}

fn diagrams(cli: &Cli, a: u32, b: u32) -> Result<()> {
    let bd = Bidegree::new(a, b)?;
    let conv = calculator(cli)?.convention;
    let mut out = Vec::new();
    for d in enumerate_diagrams(bd) {
        let mut obj = json!({
            "floors": d.floors,
            "elevators": d.elevators.iter().map(|e| json!([e.src, e.dst, e.weight])).collect::<Vec<_>>(),
            "bottom": d.bottom_edges(),
            "top": d.top_edges(),
            "aut": d.automorphism_count(),
            "mu_complex": d.complex_multiplicity().to_string(),
        });
        for s in 0..=bd.max_pairs() {
            let v = scan::diagram_contribution(&d, &Mode::Real { layout_s: s, conv })?;
            obj[format!("contrib_s{}", s)] = Value::String(v.to_string());
        }
        out.push(obj);
    }
    if cli.format != Format::Json && cli.format != Format::Text {
        return Err(Error::input("diagram dump is JSON only"));
    }
    println!("{}", serde_json::to_string_pretty(&Value::Array(out)).unwrap());
    Ok(())
}
