use std::fs;
use std::io::Write;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use voazhu_core::bimodule::Convention;
use voazhu_core::formal::{int, verify_alternating_sum, verify_dlm52, verify_dlm53};
use voazhu_core::intertwiner::fusion_dim;
use voazhu_core::report::{algebra_of, run_suite, SuiteConfig};
use voazhu_core::zhu::{zhu_table, ZhuContext};
use voazhu_core::{GradedVector, Module, Voa};

#[derive(Parser)]
#[command(name = "voazhu", version, about = "Exact computations in higher-level Zhu algebras and bimodules")]
struct Cli {
    /// Emit a flat CSV table instead of JSON.
    #[arg(long, global = true)]
    csv: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the binomial summation identities up to a bound.
    VerifyIdentities {
        #[arg(long, default_value_t = 20)]
        max_n: u32,
    },
    /// Windowed dimensions of V/O_N(V).
    ZhuTable {
        #[arg(long)]
        algebra: String,
        #[arg(long, default_value_t = 0)]
        n: u32,
        #[arg(long, default_value_t = 6)]
        depth: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the verification suite.
    Axioms {
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, value_delimiter = ',', default_value = "0,1")]
        n: Vec<u32>,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        window_cap: Option<u32>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Upper bound for the dimension of the fusion space of type (W3; W1, W2).
    Fusion {
        #[arg(long)]
        w1: String,
        #[arg(long)]
        w2: String,
        #[arg(long)]
        w3: String,
        #[arg(long, default_value_t = 0)]
        n: u32,
        #[arg(long, value_delimiter = ',', default_value = "6,8")]
        window: Vec<u32>,
        #[arg(long, value_enum, default_value_t = ConventionArg::CircOnly)]
        convention: ConventionArg,
    },
    /// Reduce an element of V modulo O_N(V) inside a window.
    Reduce {
        #[arg(long)]
        algebra: String,
        #[arg(long, default_value_t = 0)]
        n: u32,
        /// Window depth; defaults to the element's depth + 2N + 2.
        #[arg(long)]
        depth: Option<u32>,
        /// JSON list of [monomial, coefficient] pairs.
        element: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ConventionArg {
    CircOnly,
    WeightShift,
}

impl From<ConventionArg> for Convention {
    fn from(c: ConventionArg) -> Self {
        match c {
            ConventionArg::CircOnly => Convention::CircOnly,
            ConventionArg::WeightShift => Convention::WeightShift,
        }
    }
}

/// What a subcommand produced: a JSON document and the same data as flat rows.
struct Output {
    json: Value,
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

fn csv_string(header: &[&str], rows: &[Vec<String>]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

fn to_json<T: Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("serializable")
}

fn read_element(path: &PathBuf) -> Result<GradedVector> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let raw: Vec<(String, Value)> = serde_json::from_str(&text).context("element file must be a JSON list of [monomial, coefficient]")?;
    let pairs: Vec<(String, String)> = raw
        .into_iter()
        .map(|(m, c)| match c {
            Value::String(s) => Ok((m, s)),
            Value::Number(n) => Ok((m, n.to_string())),
            other => bail!("coefficient {other} is neither a string nor a number"),
        })
        .collect::<Result<_>>()?;
    Ok(GradedVector::from_pairs(&pairs)?)
}

fn verify_identities(max_n: u32) -> Output {
    let mut rows = Vec::new();
    let mut items = Vec::new();
    let mut push = |id: &str, n: u32, i: Option<u32>, ok: bool| {
        rows.push(vec![id.to_string(), n.to_string(), i.map(|i| i.to_string()).unwrap_or_default(), ok.to_string()]);
        items.push(json!({"identity": id, "N": n, "i": i, "holds": ok}));
    };
    for n in 0..=max_n {
        push("binomial_sum_delta", n, None, verify_dlm52(n));
        push("binomial_sum_shift", n, None, verify_dlm53(n));
        for i in 0..=n {
            let want = if i == 0 { int(1) } else { int(0) };
            push("alternating_sum", n, Some(i), verify_alternating_sum(n, i) == want);
        }
    }
    let all = rows.iter().all(|r| r[3] == "true");
    Output { json: json!({"max_n": max_n, "all_hold": all, "checks": items}), header: vec!["identity", "N", "i", "holds"], rows }
}

fn run(cli: &Cli) -> Result<(Output, Option<PathBuf>)> {
    Ok(match &cli.command {
        Command::VerifyIdentities { max_n } => (verify_identities(*max_n), None),
        Command::ZhuTable { algebra, n, depth, out } => {
            let t = zhu_table(&Voa::parse(algebra)?, *n, *depth);
            let rows = (0..=*depth as usize)
                .map(|d| vec![d.to_string(), t.window_dims[d].to_string(), t.quotient_upper_bounds[d].to_string()])
                .collect();
            (Output { json: to_json(&t), header: vec!["depth", "window_dim", "quotient_upper_bound"], rows }, out.clone())
        }
        Command::Axioms { seed, n, samples, window_cap, out } => {
            let mut config = SuiteConfig { seed: *seed, n_range: n.clone(), ..SuiteConfig::default() };
            if let Some(s) = samples {
                config.samples = *s;
            }
            if let Some(c) = window_cap {
                config.window_cap = *c;
            }
            let report = run_suite(&config)?;
            let rows = report
                .entries
                .iter()
                .map(|e| {
                    vec![
                        e.module.clone(),
                        e.check_id.clone(),
                        e.instance.clone(),
                        e.n.map(|n| n.to_string()).unwrap_or_default(),
                        format!("{:?}", e.status),
                        e.window.map(|w| w.to_string()).unwrap_or_default(),
                        e.witness_size.to_string(),
                        e.input_hash.clone(),
                    ]
                })
                .collect();
            let header = vec!["module", "check_id", "instance", "N", "status", "window", "witness_size", "input_hash"];
            (Output { json: to_json(&report), header, rows }, out.clone())
        }
        Command::Fusion { w1, w2, w3, n, window, convention } => {
            let (m1, m2, m3) = (Module::parse(w1)?, Module::parse(w2)?, Module::parse(w3)?);
            let voa = algebra_of(&m1);
            let r = fusion_dim(&voa, &m1, &m2, &m3, *n, window, (*convention).into())?;
            let rows = r
                .windows
                .iter()
                .map(|w| vec![w.window.to_string(), w.unknowns.to_string(), w.constraints.to_string(), w.dim.to_string()])
                .collect();
            let doc = json!({
                "type": r.kind,
                "N": r.n,
                "window": window,
                "convention": r.convention,
                "fusion_dim_upper": r.fusion_dim_upper,
                "stabilized": r.stabilized,
                "checks": r.windows,
            });
            (Output { json: doc, header: vec!["window", "unknowns", "constraints", "dim"], rows }, None)
        }
        Command::Reduce { algebra, n, depth, element } => {
            let voa = Voa::parse(algebra)?;
            let x = read_element(element)?;
            let d = depth.unwrap_or(x.max_depth().unwrap_or(0) + 2 * n + 2);
            let ctx = ZhuContext::new(&voa, *n, d);
            let rem = ctx.reduce(&x)?;
            let cert = ctx.membership(&x);
            let rows = rem.to_pairs().into_iter().map(|(m, c)| vec![m, c]).collect();
            let doc = json!({
                "algebra": voa.id(),
                "N": n,
                "window": d,
                "input": x.to_pairs(),
                "remainder": rem.to_pairs(),
                "in_ideal": rem.is_zero(),
                "certificate": cert,
            });
            (Output { json: doc, header: vec!["monomial", "coefficient"], rows }, None)
        }
    })
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    let (out, path) = run(&cli)?;
    let text = if cli.csv { csv_string(&out.header, &out.rows)? } else { serde_json::to_string_pretty(&out.json)? + "\n" };
    match path {
        Some(p) => fs::write(&p, text).with_context(|| format!("writing {}", p.display()))?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}
