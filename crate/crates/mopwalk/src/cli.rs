//! Command-line front end. Every subcommand writes one JSON or CSV artifact.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rug::Float;
use serde_json::{json, Value};

use crate::arith::{fmt_rational, parse_rational};
use crate::band::{BandedOperator, Scalar};
use crate::error::Result;
use crate::jp::{asymptotic_coeffs, jacobi_band, recurrence_coeffs, type_i_normalized, type_ii_seq};
use crate::markov::{jp_stochastic_i, jp_stochastic_ii, left_eigen_residual, steady_candidate};
use crate::oracle::{build_moment_matrix, gauss_borel, oracle_jacobi, oracle_type_i, oracle_type_ii};
use crate::params::{positivity_region, JPParams};
use crate::spectral::{
    char_poly, classify, first_passage_curve_csv, ratio_asymptotics, ChainType, KmEngine, RatioKind,
};
use crate::walk::{first_passage_csv, first_passage_empirical, simulate, truncate, Boundary, SimConfig};

#[derive(Parser, Debug)]
#[command(name = "mopwalk", version, about = "Random walks from Jacobi–Piñeiro multiple orthogonal polynomials")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Exponent α of the first weight, as "num/den".
    #[arg(short = 'a', long, default_value = "-1/4", allow_hyphen_values = true, global = true)]
    pub alpha: String,
    /// Exponent β of the second weight.
    #[arg(short = 'b', long, default_value = "-1/2", allow_hyphen_values = true, global = true)]
    pub beta: String,
    /// Exponent γ of (1-x)^γ.
    #[arg(short = 'g', long, default_value = "-1/2", allow_hyphen_values = true, global = true)]
    pub gamma: String,
    /// Truncation size.
    #[arg(short = 'L', long = "size", global = true)]
    pub size: Option<usize>,
    /// Working precision in bits.
    #[arg(long, default_value_t = 256, global = true)]
    pub precision: u32,
    #[arg(long, default_value_t = 0, global = true)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    pub format: Format,
    /// Output file; standard output when absent.
    #[arg(short = 'o', long, global = true)]
    pub output: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChainArg {
    Ii,
    I,
}

impl From<ChainArg> for ChainType {
    fn from(c: ChainArg) -> Self {
        match c {
            ChainArg::Ii => ChainType::TypeII,
            ChainArg::I => ChainType::TypeI,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundaryArg {
    Absorb,
    Renormalize,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Recurrence coefficient streams b, c, d.
    Coeffs {
        #[arg(short = 'n', long, default_value_t = 10)]
        n_max: usize,
        /// Append the limiting values.
        #[arg(long)]
        limits: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Stochastic matrix of either chain.
    Stochastic {
        #[arg(long = "type", value_enum, default_value_t = ChainArg::Ii)]
        chain: ChainArg,
        #[command(flatten)]
        common: Common,
    },
    /// Monte Carlo trajectories of the truncated chain.
    Simulate {
        #[arg(long = "type", value_enum, default_value_t = ChainArg::Ii)]
        chain: ChainArg,
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        #[arg(long, default_value_t = 1_000)]
        horizon: usize,
        #[arg(long, value_delimiter = ',', default_value = "0")]
        start: Vec<usize>,
        #[arg(long, value_enum, default_value_t = BoundaryArg::Absorb)]
        boundary: BoundaryArg,
        #[command(flatten)]
        common: Common,
    },
    /// Recurrent or transient, with the refinement diagnostic.
    Classify {
        #[command(flatten)]
        common: Common,
    },
    /// r-step transition probability through the integral representation.
    Kmg {
        #[arg(short = 'n', long, default_value_t = 0)]
        n: usize,
        #[arg(short = 'm', long, default_value_t = 0)]
        m: usize,
        #[arg(short = 'r', long, default_value_t = 1)]
        r: usize,
        #[arg(long = "type", value_enum, default_value_t = ChainArg::Ii)]
        chain: ChainArg,
        /// Also report the generating function at this s, as "num/den".
        #[arg(long, allow_hyphen_values = true)]
        s: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Characteristic roots and ratio convergence tables.
    Spectrum {
        #[arg(long, default_value = "1")]
        lambda: String,
        #[command(flatten)]
        common: Common,
    },
    /// κ_n = B^(n)(1) Q^(n)(1) and partial sums.
    Steady {
        #[command(flatten)]
        common: Common,
    },
    /// Gauss–Borel oracle against the closed forms.
    Oracle {
        #[command(flatten)]
        common: Common,
    },
}

impl Command {
    fn common(&self) -> &Common {
        match self {
            Command::Coeffs { common, .. }
            | Command::Stochastic { common, .. }
            | Command::Simulate { common, .. }
            | Command::Classify { common }
            | Command::Kmg { common, .. }
            | Command::Spectrum { common, .. }
            | Command::Steady { common }
            | Command::Oracle { common } => common,
        }
    }

    fn name(&self) -> &'static str {
        match self {
            Command::Coeffs { .. } => "coeffs",
            Command::Stochastic { .. } => "stochastic",
            Command::Simulate { .. } => "simulate",
            Command::Classify { .. } => "classify",
            Command::Kmg { .. } => "kmg",
            Command::Spectrum { .. } => "spectrum",
            Command::Steady { .. } => "steady",
            Command::Oracle { .. } => "oracle",
        }
    }
}

fn header(cmd: &str, p: &JPParams, c: &Common, size: Option<usize>) -> Value {
    json!({
        "tool": "mopwalk",
        "version": env!("CARGO_PKG_VERSION"),
        "command": cmd,
        "params": {
            "alpha": fmt_rational(&p.alpha),
            "beta": fmt_rational(&p.beta),
            "gamma": fmt_rational(&p.gamma),
        },
        "precision": c.precision,
        "truncation": size,
        "seed": c.seed,
    })
}

fn csv_header(h: &Value) -> String {
    let mut out = String::new();
    if let Value::Object(m) = h {
        for (k, v) in m {
            let _ = writeln!(out, "# {k}: {v}");
        }
    }
    out
}

/// A finished artifact plus the exit code it implies.
pub struct Artifact {
    pub body: String,
    pub code: i32,
}

fn emit(fmt: Format, h: Value, json_body: Value, csv_body: impl FnOnce() -> String) -> String {
    match fmt {
        Format::Json => {
            let mut v = json!({ "header": h });
            if let (Value::Object(dst), Value::Object(src)) = (&mut v, json_body) {
                dst.extend(src);
            }
            serde_json::to_string_pretty(&v).expect("json") + "\n"
        }
        Format::Csv => csv_header(&h) + &csv_body(),
    }
}

fn digits(x: &Float) -> String {
    x.to_string_radix(10, Some(20))
}

fn max_row_defect<T: Scalar>(p: &BandedOperator<T>, rows: usize) -> f64 {
    (0..rows)
        .map(|i| {
            let s = p.row_sum(i);
            s.sub(&s.one_like()).abs_val().to_f64()
        })
        .fold(0.0, f64::max)
}

/// First `rows` rows with every band entry, so the last row keeps its superdiagonal.
fn leading_rows<T: Scalar>(p: &BandedOperator<T>, rows: usize) -> (Value, String) {
    let cols = (rows + p.upper_bw()).min(p.size());
    let mut csv = String::new();
    let json_rows: Vec<Value> = (0..rows)
        .map(|i| {
            let rec: Vec<String> = (0..cols).map(|j| p.get(i, j).render()).collect();
            let _ = writeln!(csv, "{}", rec.join(","));
            Value::Array(p.row_range(i).map(|j| json!({"j": j, "v": p.get(i, j).render()})).collect())
        })
        .collect();
    let j = json!({"rows": rows, "columns": cols, "lower_bw": p.lower_bw(), "upper_bw": p.upper_bw(), "mode": T::MODE, "entries": json_rows});
    (j, csv)
}

/// Runs one parsed command.
pub fn run(cli: &Cli) -> Result<Artifact> {
    let c = cli.command.common();
    let p = JPParams::parse(&c.alpha, &c.beta, &c.gamma)?;
    let (ok, why) = positivity_region(&p.alpha, &p.beta, &p.gamma);
    if !ok {
        eprintln!("warning: parameters outside the positivity region: {why}");
    }
    let prec = c.precision;
    let name = cli.command.name();
    let mut code = 0;
    let body = match &cli.command {
        Command::Coeffs { n_max, limits, .. } => {
            let rows: Vec<_> = (0..=*n_max).map(|n| recurrence_coeffs(n, &p)).collect::<Result<_>>()?;
            let (lb, lc, ld) = asymptotic_coeffs();
            let lim = [fmt_rational(&lb), fmt_rational(&lc), fmt_rational(&ld)];
            let mut j = json!({ "rows": rows.iter().map(|r| r.to_json()).collect::<Vec<_>>() });
            if *limits {
                j["limits"] = json!({"b": lim[0], "c": lim[1], "d": lim[2]});
            }
            emit(c.format, header(name, &p, c, Some(n_max + 1)), j, || {
                let mut s = String::from("n,b_nn,b_n1n,c_n1n1,c_n1n,d_n1n1,d_n2n1\n");
                for r in &rows {
                    let f: Vec<String> = r.streams().iter().map(|x| fmt_rational(x)).collect();
                    let _ = writeln!(s, "{},{}", r.n, f.join(","));
                }
                if *limits {
                    let _ = writeln!(s, "limit,{0},{0},{1},{1},{2},{2}", lim[0], lim[1], lim[2]);
                }
                s
            })
        }
        Command::Stochastic { chain, .. } => {
            let size = c.size.unwrap_or(6);
            let h = header(name, &p, c, Some(size));
            match chain {
                ChainArg::Ii => {
                    let full = jp_stochastic_ii(size + 3, &p)?;
                    let defect = max_row_defect(&full, size);
                    if defect != 0.0 {
                        code = 4;
                    }
                    let (mj, mc) = leading_rows(&full, size);
                    emit(c.format, h, json!({"matrix": mj, "row_sum_defect": defect}), || {
                        mc + &format!("# row_sum_defect: {defect}\n")
                    })
                }
                ChainArg::I => {
                    let full = jp_stochastic_i(size + 3, &p, prec)?;
                    let defect = max_row_defect(&full, size);
                    if defect > 1e-30 {
                        code = 4;
                    }
                    let (mj, mc) = leading_rows(&full, size);
                    emit(c.format, h, json!({"matrix": mj, "row_sum_defect": defect}), || {
                        mc + &format!("# row_sum_defect: {defect:e}\n")
                    })
                }
            }
        }
        Command::Simulate { chain, trials, horizon, start, boundary, .. } => {
            let size = c.size.unwrap_or(60);
            let cfg = SimConfig {
                truncation: size,
                boundary: match boundary {
                    BoundaryArg::Absorb => Boundary::Absorb,
                    BoundaryArg::Renormalize => Boundary::Renormalize,
                },
                trials: *trials,
                horizon: *horizon,
                seed: c.seed,
                starts: start.clone(),
                ..Default::default()
            };
            cfg.validate()?;
            let stats = match chain {
                ChainArg::Ii => simulate(&truncate(&jp_stochastic_ii(size + 3, &p)?, size, cfg.boundary)?, &cfg)?,
                ChainArg::I => simulate(&truncate(&jp_stochastic_i(size + 3, &p, prec)?, size, cfg.boundary)?, &cfg)?,
            };
            let s0 = cfg.starts[0];
            let curve = first_passage_empirical(&stats, s0, s0)?;
            emit(c.format, header(name, &p, c, Some(size)), json!({"config": cfg, "stats": stats.to_json()}), || {
                first_passage_csv(&curve)
            })
        }
        Command::Classify { .. } => {
            let r = classify(&p, prec)?;
            let csv = r
                .diagnostic
                .iter()
                .fold(String::from("nodes,value\n"), |mut s, (k, v)| {
                    let _ = writeln!(s, "{k},{}", digits(v));
                    s
                });
            emit(c.format, header(name, &p, c, None), r.to_json(), || {
                format!("# verdict: {}\n{csv}", r.verdict.as_str())
            })
        }
        Command::Kmg { n, m, r, chain, s, .. } => {
            let e = KmEngine::new(&p, (*n).max(*m), *r, prec)?;
            let v = e.transition((*chain).into(), *n, *m, *r);
            if v < -1e-12 || v > 1.0 + 1e-12 {
                code = 4;
            }
            let mut j = json!({"chain": format!("{chain:?}").to_lowercase(), "n": n, "m": m, "r": r, "probability": digits(&v)});
            let mut extra = String::new();
            if let Some(s) = s {
                let sv = Float::with_val(prec, &parse_rational(s)?);
                let g = crate::spectral::generating_fn((*chain).into(), *n, *m, &sv, &p, prec)?;
                let f = crate::spectral::first_passage_fn((*chain).into(), *n, *m, &sv, &p, prec)?;
                j["generating"] = json!({"s": s, "value": digits(&g.value), "nodes": g.nodes, "first_passage": digits(&f)});
                extra = format!("generating,{},{}\n", digits(&g.value), digits(&f));
            }
            emit(c.format, header(name, &p, c, None), j, || {
                format!("n,m,r,probability\n{n},{m},{r},{}\n{extra}", digits(&v))
            })
        }
        Command::Spectrum { lambda, .. } => {
            let lam = parse_rational(lambda)?;
            let size = c.size.unwrap_or(200);
            let cp = char_poly(&lam, prec)?;
            let rec = cp.reciprocal()?;
            let mut j = json!({"lambda": fmt_rational(&lam), "char_poly": cp.to_json(), "reciprocal": rec.to_json()});
            let mut csv = String::new();
            if lam == 1 {
                let b = ratio_asymptotics(RatioKind::B, size, &p, prec)?;
                let q = ratio_asymptotics(RatioKind::Q, size, &p, prec)?;
                j["ratios"] = json!([b.to_json(), q.to_json()]);
                csv = format!("# kind: B(1)\n{}# kind: Q(1)\n{}", b.to_csv(), q.to_csv());
                let f = first_passage_curve_csv(ChainType::TypeII, &[0.1, 0.3, 0.5, 0.7, 0.9], &p, prec);
                if let Ok(f) = f {
                    csv.push_str(&f);
                }
            }
            emit(c.format, header(name, &p, c, Some(size)), j, || csv)
        }
        Command::Steady { .. } => {
            let size = c.size.unwrap_or(200);
            let sc = steady_candidate(size, &p, prec)?;
            let pf = jp_stochastic_ii(size, &p)?.to_float(prec);
            let pi = jp_stochastic_i(size, &p, prec)?;
            let res = left_eigen_residual(&sc.kappa, &pf).max(&left_eigen_residual(&sc.kappa, &pi));
            let positive = sc.kappa.iter().all(|k| *k > 0);
            if !positive {
                code = 4;
            }
            let mut j = sc.to_json();
            j["left_eigen_residual"] = json!(res.to_f64());
            j["positive"] = json!(positive);
            emit(c.format, header(name, &p, c, Some(size)), j, || {
                let mut s = String::from("n,kappa,partial_sum\n");
                for (n, (k, ps)) in sc.kappa.iter().zip(&sc.partial_sums).enumerate() {
                    let _ = writeln!(s, "{n},{},{}", digits(k), digits(ps));
                }
                s
            })
        }
        Command::Oracle { .. } => {
            let size = c.size.unwrap_or(12);
            let report = oracle_report(size, &p)?;
            if report.0 > 0 {
                code = 4;
            }
            let summary = format!("{} mismatches", report.0);
            emit(c.format, header(name, &p, c, Some(size)), json!({"mismatches": report.0, "checked": report.1, "details": report.2, "summary": summary}), || {
                format!("check,index\n{}# {summary}\n", report.2.iter().map(|d| format!("{d}\n")).collect::<String>())
            })
        }
    };
    Ok(Artifact { body, code })
}

/// `(mismatches, checks, descriptions)` between oracle and closed forms.
fn oracle_report(size: usize, p: &JPParams) -> Result<(usize, usize, Vec<String>)> {
    let f = gauss_borel(&build_moment_matrix(size + 1, p))?;
    let j_oracle = oracle_jacobi(&f)?;
    let j_closed = jacobi_band(j_oracle.size(), p)?;
    let mut bad = Vec::new();
    let mut checked = 0;
    for l in 0..size {
        checked += 2;
        if type_ii_seq(l, p)? != oracle_type_ii(&f, l) {
            bad.push(format!("type_ii,{l}"));
        }
        if type_i_normalized(l, p)? != oracle_type_i(&f, l) {
            bad.push(format!("type_i,{l}"));
        }
    }
    for i in 0..j_oracle.valid_rows() {
        for k in j_oracle.row_range(i) {
            checked += 1;
            if j_oracle.get(i, k) != j_closed.get(i, k) {
                bad.push(format!("jacobi,{i}:{k}"));
            }
        }
    }
    Ok((bad.len(), checked, bad))
}

/// Parses `args`, runs, writes the artifact, returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(&cli) {
        Ok(a) => {
            let out = &cli.command.common().output;
            let written = match out {
                Some(path) => std::fs::write(path, &a.body).map_err(|e| e.to_string()),
                None => {
                    print!("{}", a.body);
                    Ok(())
                }
            };
            if let Err(e) = written {
                eprintln!("error: cannot write output: {e}");
                return 4;
            }
            if a.code != 0 {
                eprintln!("error: invariant violated, see the artifact");
            }
            a.code
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
