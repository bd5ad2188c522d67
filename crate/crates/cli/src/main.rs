mod listing;
mod output;
mod table;

use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rayon::prelude::*;
use siegel_core::verify::{factor_order, field, run_suite, Suite, VerifyConfig};

use output::{text_checks, text_table, CheckOut, CliError, Format, Output, RunConfig};

#[derive(Parser)]
#[command(name = "siegel", version, about = "Siegel-fixed vectors of depth zero supercuspidals of GSp(4)")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Dimensions and Atkin-Lehner signatures per sigma class.
    Table {
        #[arg(long)]
        q: u32,
        #[arg(long, default_value_t = 0)]
        n_min: u32,
        #[arg(long)]
        n_max: u32,
        /// One row per sigma label instead of per class.
        #[arg(long)]
        raw: bool,
        /// `all` or `k1,k2[,full|plus|minus[,u1]]`.
        #[arg(long, default_value = "all")]
        sigma: String,
        /// Sign of the extension to the normaliser; both when omitted.
        #[arg(long, allow_hyphen_values = true)]
        ext_sign: Option<i32>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Run a verification suite.
    Verify {
        #[arg(long)]
        suite: String,
        /// Field order; the suite's default orders when omitted.
        #[arg(long)]
        q: Option<u32>,
        #[arg(long)]
        n_max: Option<u32>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// p-adic working precision in digits.
        #[arg(long)]
        precision: Option<u32>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// List the support cosets at level n.
    Support {
        #[arg(long)]
        q: u32,
        #[arg(long)]
        n: u32,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

fn config(command: &str, q: Option<u32>, format: Format) -> Result<RunConfig, CliError> {
    let (p, f) = match q {
        Some(q) => {
            let (p, f) = factor_order(q)?;
            (Some(p), Some(f))
        }
        None => (None, None),
    };
    Ok(RunConfig {
        command: command.into(),
        q,
        p,
        f,
        n_min: None,
        n_max: None,
        sigma: None,
        ext_sign: None,
        raw: false,
        suite: None,
        precision: None,
        source: None,
        format,
    })
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map_or("-".into(), |x| x.to_string())
}

fn table_text(rows: &[table::TableRow]) -> String {
    let body: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            let ok = r.dim_match && r.al_match != Some(false);
            vec![
                r.class.clone(),
                r.sigma.clone(),
                r.members.to_string(),
                opt(r.ext_sign.map(|e| format!("{e:+}"))),
                r.n.to_string(),
                r.dim.to_string(),
                r.dim_closed.to_string(),
                r.al.to_string(),
                opt(r.al_closed),
                if ok { "yes" } else { "NO" }.into(),
            ]
        })
        .collect();
    text_table(&["class", "sigma", "members", "ext", "n", "dim", "closed", "al", "closed", "match"], &body)
}

fn support_text(rows: &[listing::SupportRow]) -> String {
    let body: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.coset.clone(),
                r.ctype.clone(),
                r.r_g.clone(),
                r.dim_contribution.to_string(),
                r.al_partner.clone(),
                opt(r.al_contribution.clone()),
            ]
        })
        .collect();
    text_table(&["coset", "type", "R_g", "dim", "AL partner", "fixed"], &body)
}

fn run(cli: Cli) -> Result<(String, bool), CliError> {
    match cli.command {
        Command::Table { q, n_min, n_max, raw, sigma, ext_sign, seed, format } => {
            if n_min > n_max {
                return Err(CliError::BadArgs(format!("n-min {n_min} exceeds n-max {n_max}")));
            }
            if ext_sign.is_some_and(|e| e.abs() != 1) {
                return Err(CliError::BadArgs("ext-sign must be 1 or -1".into()));
            }
            let mut cfg = config("table", Some(q), format)?;
            let ctx = field(q)?;
            let sigma_label = match sigma.as_str() {
                "all" => None,
                s => Some(table::parse_sigma(&ctx, s)?),
            };
            cfg.n_min = Some(n_min);
            cfg.n_max = Some(n_max);
            cfg.sigma = Some(sigma);
            cfg.ext_sign = ext_sign;
            cfg.raw = raw;
            cfg.source = Some(format!("{:?}", table::source_for(q)).to_lowercase());
            let req = table::TableRequest { n_min, n_max, raw, sigma: sigma_label, ext_sign };
            let (rows, checks) = table::run(&ctx, &req, seed)?;
            let out = Output::new(cfg, &rows, checks, seed)?;
            let text = match format {
                Format::Json => out.to_json()?,
                Format::Csv => out.to_csv()?,
                Format::Text => table_text(&rows) + &text_checks(&out.checks),
            };
            Ok((text, out.passed()))
        }
        Command::Verify { suite, q, n_max, seed, precision, format } => {
            let s: Suite = suite.parse()?;
            let mut cfg = config("verify", q, format)?;
            cfg.suite = Some(s.to_string());
            cfg.n_max = n_max;
            cfg.precision = precision;
            let orders: Vec<u32> = match q {
                Some(q) => vec![q],
                None => s.default_orders().to_vec(),
            };
            let reports = orders
                .par_iter()
                .map(|&q| {
                    let vc = VerifyConfig { orders: vec![q], n_max, seed, precision, trials: None };
                    run_suite(s, &vc)
                })
                .collect::<Result<Vec<_>, _>>()?;
            let checks: Vec<CheckOut> = reports
                .iter()
                .flat_map(|r| &r.checks)
                .map(|c| CheckOut {
                    name: c.name.clone(),
                    passed: c.passed,
                    informational: c.informational,
                    detail: c.detail.clone(),
                })
                .collect();
            let out = Output::new::<()>(cfg, &[], checks, seed)?;
            let text = match format {
                Format::Json => out.to_json()?,
                Format::Csv => out.to_csv()?,
                Format::Text => format!("suite {s}, seed {seed}\n") + &text_checks(&out.checks),
            };
            Ok((text, out.passed()))
        }
        Command::Support { q, n, format } => {
            let mut cfg = config("support", Some(q), format)?;
            field(q)?;
            cfg.n_min = Some(n);
            cfg.n_max = Some(n);
            let (rows, checks) = listing::run(q, n);
            let out = Output::new(cfg, &rows, checks, 0)?;
            let text = match format {
                Format::Json => out.to_json()?,
                Format::Csv => out.to_csv()?,
                Format::Text => support_text(&rows) + &text_checks(&out.checks),
            };
            Ok((text, out.passed()))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 4 } else { 0 });
        }
    };
    match run(cli) {
        Ok((text, passed)) => {
            print!("{text}");
            ExitCode::from(if passed { 0 } else { 2 })
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use siegel_core::models::ModelError;
    use siegel_core::verify::VerifyError;

    #[test]
    fn exit_code_contract() {
        assert_eq!(CliError::BadArgs("x".into()).exit_code(), 4);
        assert_eq!(CliError::Verify(VerifyError::BadOrder(6)).exit_code(), 4);
        assert_eq!(CliError::Verify(ModelError::TooLarge { q: 8 }.into()).exit_code(), 3);
        let failing = CheckOut { name: "x".into(), passed: false, informational: false, detail: String::new() };
        let info = CheckOut { informational: true, ..failing.clone() };
        let cfg = config("verify", Some(2), Format::Json).unwrap();
        assert!(!Output::new::<()>(cfg.clone(), &[], vec![failing], 0).unwrap().passed());
        assert!(Output::new::<()>(cfg, &[], vec![info], 0).unwrap().passed());
    }
}
