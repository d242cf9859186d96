//! Command line front end for the cohomology workbench.
//!
//! Subcommands either report data (degrees, qint) or carry a verdict
//! (betti, ring, restrict, scan, badroots, uct). The exit code encodes the
//! outcome: 0 when every verdict in the output is affirmative, 1 when at
//! least one check came back false, 2 when the invocation was rejected
//! before any verdict was reached.
//!
//! Output is plain text by default, a single JSON object with --json, or
//! tab separated rows with --tsv. All three are deterministic: the same
//! invocation produces byte-identical output. Unbounded integers appear as
//! decimal strings in JSON so nothing is rounded.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use liecoh::cecohomology::{
    build_gated_complex, charp_scan, cohomology_report, expected_betti, field_tag,
    ring_certificate, ComplexConfig,
};
use liecoh::linalg::{is_prime, Domain};
use liecoh::qarith::{
    denominator_set, factor_into_cyclotomics, quantum_integer, verify_s_characterization,
};
use liecoh::rootdata::{coxeter_threshold, generator_degrees, LieType};
use liecoh::uct::{integral_data, verify_uct_with_data};
use liecoh::weylinv::restrict_invariants;

/// Environment override for the complex size cutoff (dimension of g).
const MAX_DIM_VAR: &str = "LIECOH_MAX_DIM";

/// Primes checked by `uct` when no list is given.
const DEFAULT_UCT_PRIMES: [u64; 11] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31];

#[derive(Parser)]
#[command(name = "liecoh", version, about = "Exact cohomology of complex simple Lie algebras")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct OutputOpts {
    /// Emit a single JSON object instead of plain text.
    #[arg(long, conflicts_with = "tsv")]
    json: bool,

    /// Emit tab separated rows instead of plain text.
    #[arg(long)]
    tsv: bool,

    /// Write the output to a file instead of standard output.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Generator degrees of the rational cohomology ring.
    Degrees {
        /// Lie type, e.g. A2, D4, G2.
        lie_type: LieType,
        #[command(flatten)]
        output: OutputOpts,
    },

    /// Betti numbers of the Chevalley-Eilenberg complex over a chosen ring.
    Betti {
        lie_type: LieType,
        /// Coefficients: Q, Z, or Fp:<p>.
        #[arg(long, default_value = "Q")]
        field: FieldArg,
        /// Compute even when the complex exceeds the size cutoff.
        #[arg(long)]
        best_effort: bool,
        #[command(flatten)]
        output: OutputOpts,
    },

    /// Certify the exterior-algebra structure of the invariants over Q.
    Ring {
        lie_type: LieType,
        /// Compute even when the complex exceeds the size cutoff.
        #[arg(long)]
        best_effort: bool,
        #[command(flatten)]
        output: OutputOpts,
    },

    /// Restrict basic Weyl invariants to a corank-one subsystem.
    Restrict {
        /// Ambient type.
        e: LieType,
        /// Subsystem type.
        f: LieType,
        /// Index (1-based) of the removed simple root of the ambient type.
        #[arg(long)]
        remove: usize,
        #[command(flatten)]
        output: OutputOpts,
    },

    /// Compare mod-p Betti numbers against the characteristic-zero table.
    Scan {
        lie_type: LieType,
        /// Primes as a comma list "5,7" or a range "5..13".
        /// Default: primes p with h < p <= 3(h-1).
        #[arg(long)]
        primes: Option<String>,
        /// Compute even when the complex exceeds the size cutoff.
        #[arg(long)]
        best_effort: bool,
        #[command(flatten)]
        output: OutputOpts,
    },

    /// Orders of roots of unity excluded by the denominator set.
    Badroots {
        lie_type: LieType,
        #[command(flatten)]
        output: OutputOpts,
    },

    /// The quantum integer [n]_d, optionally factored into cyclotomics.
    Qint {
        #[arg(allow_negative_numbers = true)]
        n: i64,
        d: i64,
        /// Factor into a sign, a power of q, and cyclotomic polynomials.
        #[arg(long)]
        factor: bool,
        #[command(flatten)]
        output: OutputOpts,
    },

    /// Universal-coefficient dimension counts over F_p for each prime.
    Uct {
        lie_type: LieType,
        /// Primes as a comma list or a range. Default: all primes up to 31.
        #[arg(long)]
        primes: Option<String>,
        /// Compute even when the complex exceeds the size cutoff.
        #[arg(long)]
        best_effort: bool,
        #[command(flatten)]
        output: OutputOpts,
    },
}

/// Coefficient choice parsed from "Q", "Z", or "Fp:<p>".
#[derive(Clone, Copy, Debug)]
struct FieldArg(Domain);

impl FromStr for FieldArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "Q" => return Ok(FieldArg(Domain::Rational)),
            "Z" => return Ok(FieldArg(Domain::Integer)),
            _ => {}
        }
        if let Some(tail) = s.strip_prefix("Fp:") {
            let p: u64 = tail
                .parse()
                .map_err(|_| format!("bad prime in field tag {s:?}"))?;
            if !is_prime(p) {
                return Err(format!("{p} is not prime"));
            }
            return Ok(FieldArg(Domain::Prime(p)));
        }
        Err(format!("expected Q, Z, or Fp:<p>, got {s:?}"))
    }
}

type CliResult<T> = Result<T, Box<dyn std::error::Error>>;

/// One command's rendered output in all three formats plus its verdict.
struct Report {
    verdict: bool,
    text: String,
    tsv: String,
    json: Value,
}

fn main() {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(true) => {}
        Ok(false) => std::process::exit(1),
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(2);
        }
    }
}

fn run(command: Command) -> CliResult<bool> {
    let (report, output) = match command {
        Command::Degrees { lie_type, output } => (cmd_degrees(lie_type)?, output),
        Command::Betti {
            lie_type,
            field,
            best_effort,
            output,
        } => (cmd_betti(lie_type, field, best_effort)?, output),
        Command::Ring {
            lie_type,
            best_effort,
            output,
        } => (cmd_ring(lie_type, best_effort)?, output),
        Command::Restrict {
            e,
            f,
            remove,
            output,
        } => (cmd_restrict(e, f, remove)?, output),
        Command::Scan {
            lie_type,
            primes,
            best_effort,
            output,
        } => (cmd_scan(lie_type, primes.as_deref(), best_effort)?, output),
        Command::Badroots { lie_type, output } => (cmd_badroots(lie_type)?, output),
        Command::Qint {
            n,
            d,
            factor,
            output,
        } => (cmd_qint(n, d, factor)?, output),
        Command::Uct {
            lie_type,
            primes,
            best_effort,
            output,
        } => (cmd_uct(lie_type, primes.as_deref(), best_effort)?, output),
    };
    emit(&output, &report)?;
    Ok(report.verdict)
}

fn emit(opts: &OutputOpts, report: &Report) -> CliResult<()> {
    let mut payload = if opts.json {
        serde_json::to_string(&report.json)?
    } else if opts.tsv {
        report.tsv.clone()
    } else {
        report.text.clone()
    };
    if !payload.ends_with('\n') {
        payload.push('\n');
    }
    match &opts.out {
        Some(path) => fs::write(path, payload)?,
        None => print!("{payload}"),
    }
    Ok(())
}

fn complex_config(best_effort: bool) -> CliResult<ComplexConfig> {
    let mut config = ComplexConfig::default();
    if let Ok(raw) = std::env::var(MAX_DIM_VAR) {
        config.max_dim = raw
            .parse()
            .map_err(|_| format!("{MAX_DIM_VAR} must be a nonnegative integer, got {raw:?}"))?;
    }
    config.best_effort = best_effort;
    Ok(config)
}

/// "5,7,11" or "5..13" (inclusive, keeping only the primes in the range).
fn parse_primes(spec: &str) -> CliResult<Vec<u64>> {
    if let Some((lo, hi)) = spec.split_once("..") {
        let lo: u64 = lo
            .trim()
            .parse()
            .map_err(|_| format!("bad range start in {spec:?}"))?;
        let hi: u64 = hi
            .trim()
            .parse()
            .map_err(|_| format!("bad range end in {spec:?}"))?;
        if hi > 100_000 {
            return Err(format!("prime range end {hi} is unreasonably large").into());
        }
        let primes: Vec<u64> = (lo..=hi).filter(|&n| is_prime(n)).collect();
        if primes.is_empty() {
            return Err(format!("no primes in {lo}..{hi}").into());
        }
        Ok(primes)
    } else {
        spec.split(',')
            .map(|tok| {
                let tok = tok.trim();
                let p: u64 = tok.parse().map_err(|_| format!("bad prime {tok:?}"))?;
                if !is_prime(p) {
                    return Err(format!("{p} is not prime"));
                }
                Ok(p)
            })
            .collect::<Result<Vec<u64>, String>>()
            .map_err(Into::into)
    }
}

fn join<I>(items: I, sep: &str) -> String
where
    I: IntoIterator,
    I::Item: std::fmt::Display,
{
    items
        .into_iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(sep)
}

/// "x3", "x7", then "x7'" for a second generator in the same degree.
fn generator_labels(degrees: &[usize]) -> Vec<String> {
    let mut seen: HashMap<usize, usize> = HashMap::new();
    degrees
        .iter()
        .map(|&d| {
            let count = seen.entry(d).or_insert(0);
            let label = format!("x{d}{}", "'".repeat(*count));
            *count += 1;
            label
        })
        .collect()
}

fn cmd_degrees(t: LieType) -> CliResult<Report> {
    let degrees = generator_degrees(t);
    let text = join(&degrees, " ");
    let tsv = format!("type\tdegrees\n{t}\t{}", join(&degrees, ","));
    let json = json!({ "type": t, "degrees": degrees });
    Ok(Report {
        verdict: true,
        text,
        tsv,
        json,
    })
}

fn cmd_betti(t: LieType, field: FieldArg, best_effort: bool) -> CliResult<Report> {
    let config = complex_config(best_effort)?;
    let report = cohomology_report(t, field.0, config)?;

    let mut text = format!(
        "type: {t}\nfield: {}\nbetti: {}\n",
        field_tag(field.0),
        join(&report.betti, " ")
    );
    for (n, layer) in report.torsion.iter().enumerate() {
        if !layer.is_empty() {
            let _ = writeln!(text, "torsion[{n}]: {}", join(layer, " "));
        }
    }
    let _ = writeln!(
        text,
        "primitive degrees: {}",
        join(&report.primitive_degrees, " ")
    );
    let _ = write!(text, "exterior match: {}", report.exterior_match);

    let mut tsv = String::from("n\tbetti\ttorsion\n");
    for (n, b) in report.betti.iter().enumerate() {
        let torsion = if report.torsion[n].is_empty() {
            "-".to_string()
        } else {
            join(&report.torsion[n], ",")
        };
        let _ = writeln!(tsv, "{n}\t{b}\t{torsion}");
    }

    let verdict = report.exterior_match;
    let json = serde_json::to_value(&report)?;
    Ok(Report {
        verdict,
        text,
        tsv,
        json,
    })
}

fn cmd_ring(t: LieType, best_effort: bool) -> CliResult<Report> {
    let config = complex_config(best_effort)?;
    let cert = ring_certificate(t, config)?;

    let labels: Vec<&str> = cert.witnesses.iter().map(|w| w.label.as_str()).collect();
    let text = format!(
        "type: {t}\nfield: Q\nprimitive degrees: {}\nwitness basis: {}\nexterior match: {}",
        join(&cert.primitive_degrees, " "),
        labels.join(" "),
        cert.verdict
    );

    let mut tsv = String::from("degree\tlabel\n");
    for w in &cert.witnesses {
        let _ = writeln!(tsv, "{}\t{}", w.degree, w.label);
    }

    let json = json!({
        "type": t,
        "field": "Q",
        "verdict": cert.verdict,
        "primitive_degrees": cert.primitive_degrees,
        "witnesses": cert.witnesses,
    });
    Ok(Report {
        verdict: cert.verdict,
        text,
        tsv,
        json,
    })
}

fn cmd_restrict(e: LieType, f: LieType, remove: usize) -> CliResult<Report> {
    let pattern = restrict_invariants(e, f, remove)?;

    let mut text = format!(
        "case: {}\nE: {} (degrees {})\nF: {} (degrees {})\nremoved root: {}\n",
        pattern.case,
        pattern.e_type,
        join(&pattern.e_degrees, " "),
        pattern.f_type,
        join(&pattern.f_degrees, " "),
        pattern.removed_root
    );
    let labels = generator_labels(&pattern.e_degrees);
    for (row, label) in labels.iter().enumerate() {
        let _ = writeln!(text, "{label} -> {}", join(&pattern.coefficients[row], " "));
    }
    let _ = writeln!(text, "match: {}", pattern.matches_expected);
    let _ = write!(
        text,
        "independently computed: {}",
        pattern.independently_computed
    );

    let f_labels = generator_labels(&pattern.f_degrees);
    let mut tsv = format!("e_degree\t{}\n", f_labels.join("\t"));
    for (row, deg) in pattern.e_degrees.iter().enumerate() {
        let _ = writeln!(tsv, "{deg}\t{}", join(&pattern.coefficients[row], "\t"));
    }

    let json = serde_json::to_value(&pattern)?;
    Ok(Report {
        verdict: pattern.matches_expected,
        text,
        tsv,
        json,
    })
}

fn cmd_scan(t: LieType, primes: Option<&str>, best_effort: bool) -> CliResult<Report> {
    let config = complex_config(best_effort)?;
    let primes: Vec<u64> = match primes {
        Some(spec) => parse_primes(spec)?,
        None => {
            let (h, safe) = coxeter_threshold(t);
            (h as u64 + 1..=safe as u64).filter(|&n| is_prime(n)).collect()
        }
    };
    let rows = charp_scan(t, &primes, config)?;
    let all_match = rows.iter().all(|r| r.matches);

    let expected = expected_betti(t);
    let mut text = format!("type: {t}\nexpected: {}\n", join(&expected, " "));
    for row in &rows {
        let mut flags = String::new();
        if row.exceeds_coxeter {
            flags.push_str(" p>h");
        }
        if row.exceeds_safe_bound {
            flags.push_str(" p>3(h-1)");
        }
        let _ = writeln!(
            text,
            "p={}: {} match={}{}",
            row.p,
            join(&row.betti, " "),
            row.matches,
            flags
        );
    }
    let _ = write!(text, "all match: {all_match}");

    let mut tsv =
        String::from("p\tbetti\texpected\tmatches\texceeds_coxeter\texceeds_safe_bound\n");
    for row in &rows {
        let _ = writeln!(
            tsv,
            "{}\t{}\t{}\t{}\t{}\t{}",
            row.p,
            join(&row.betti, ","),
            join(&row.expected, ","),
            row.matches,
            row.exceeds_coxeter,
            row.exceeds_safe_bound
        );
    }

    let json = json!({ "type": t, "rows": rows, "all_match": all_match });
    Ok(Report {
        verdict: all_match,
        text,
        tsv,
        json,
    })
}

fn cmd_badroots(t: LieType) -> CliResult<Report> {
    let set = denominator_set(t);
    let characterization = verify_s_characterization(t);

    let indices = if set.indices.is_empty() {
        "none".to_string()
    } else {
        join(&set.indices, " ")
    };
    let mut text = format!(
        "type: {t}\nalways bad: {}\nindices: {indices}\n",
        join(set.always_bad_orders, " ")
    );
    for w in &characterization.witnesses {
        let _ = writeln!(
            text,
            "witness [{}]_{}: {}",
            w.n,
            w.d,
            join(&w.factor_indices, " ")
        );
    }
    let _ = write!(text, "match: {}", characterization.matches);

    let tsv = format!(
        "type\talways_bad\tindices\tmatches\n{t}\t{}\t{}\t{}",
        join(set.always_bad_orders, ","),
        join(&set.indices, ","),
        characterization.matches
    );

    let json = json!({
        "type": t,
        "always_bad_orders": set.always_bad_orders,
        "indices": set.indices,
        "computed": characterization.computed,
        "expected": characterization.expected,
        "match": characterization.matches,
        "witnesses": characterization.witnesses,
    });
    Ok(Report {
        verdict: characterization.matches,
        text,
        tsv,
        json,
    })
}

fn cmd_qint(n: i64, d: i64, factor: bool) -> CliResult<Report> {
    if d < 1 {
        return Err(format!("the subscript d must be at least 1, got {d}").into());
    }
    if n.unsigned_abs().saturating_mul(d.unsigned_abs()) > 1_000_000 {
        return Err(format!("[{n}]_{d} has too many terms to expand").into());
    }
    let value = quantum_integer(n, d);

    let mut json = json!({ "n": n, "d": d, "value": value });
    let mut text = value.to_string();
    let mut tsv = format!("n\td\tvalue\n{n}\t{d}\t{value}");
    if factor {
        if value.is_zero() {
            return Err("the zero polynomial has no cyclotomic factorization".into());
        }
        let factored = factor_into_cyclotomics(&value)?;
        text = factored.to_string();
        tsv = format!("n\td\tvalue\tfactored\n{n}\t{d}\t{value}\t{factored}");
        json["factored"] = Value::String(factored.to_string());
        json["factorization"] = serde_json::to_value(&factored)?;
    }

    Ok(Report {
        verdict: true,
        text,
        tsv,
        json,
    })
}

fn cmd_uct(t: LieType, primes: Option<&str>, best_effort: bool) -> CliResult<Report> {
    let config = complex_config(best_effort)?;
    let primes: Vec<u64> = match primes {
        Some(spec) => parse_primes(spec)?,
        None => DEFAULT_UCT_PRIMES.to_vec(),
    };

    let cx = build_gated_complex(t, Domain::Integer, config)?;
    let data = integral_data(cx.differentials())?;
    let mut results = Vec::with_capacity(primes.len());
    for &p in &primes {
        results.push(verify_uct_with_data(
            &data,
            cx.differentials(),
            Domain::Prime(p),
        )?);
    }
    let pass = results.iter().all(|v| v.pass);

    let mut text = format!("type: {t}\n");
    for v in &results {
        let triples = v
            .triples
            .iter()
            .map(|&(a, b, c)| format!("({a},{b},{c})"))
            .collect::<Vec<_>>()
            .join(" ");
        let _ = writeln!(text, "{}: {} pass={}", field_tag(v.coefficients), triples, v.pass);
    }
    let _ = write!(text, "pass: {pass}");

    let mut tsv = String::from("field\tn\tmodular\ttensor\ttor\n");
    for v in &results {
        for (degree, &(a, b, c)) in v.triples.iter().enumerate() {
            let _ = writeln!(tsv, "{}\t{degree}\t{a}\t{b}\t{c}", field_tag(v.coefficients));
        }
    }

    let json = json!({ "type": t, "results": results, "pass": pass });
    Ok(Report {
        verdict: pass,
        text,
        tsv,
        json,
    })
}
