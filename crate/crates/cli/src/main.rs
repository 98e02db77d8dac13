use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use superpot::catalog::{self, MinusOneCurves};
use superpot::superpot::BaseReport;
use superpot::{DivisorClass, Fan, ToricVariety};

#[derive(Parser)]
#[command(name = "superpot", version, about = "Superpotential divisors over toric and Fano threefold bases")]
struct Cli {
    /// Worker threads for per-record work; output order does not depend on it.
    #[arg(long, global = true)]
    parallel: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Analyze a fan file: extremal rays, candidate divisors, fibrations, χ(X).
    Analyze {
        fan: PathBuf,
        #[arg(long, conflicts_with = "tsv")]
        json: bool,
        #[arg(long)]
        tsv: bool,
    },
    /// Regenerate the tables from a catalog, optionally checking them against the engine.
    Tables {
        #[arg(long)]
        catalog: Option<PathBuf>,
        #[arg(long)]
        check: bool,
        /// Exit with status 2 on undocumented discrepancies.
        #[arg(long, requires = "check")]
        strict: bool,
        #[arg(long)]
        json: bool,
    },
    /// Emit the transition graph in DOT format.
    Graph {
        #[arg(long)]
        catalog: Option<PathBuf>,
        /// Output file; stdout when omitted.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Cohomology of a line bundle given by divisor coefficients.
    Cohomology {
        fan: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        divisor: String,
        #[arg(long)]
        json: bool,
    },
    /// (−1)-curves on P² blown up at r points.
    Delpezzo {
        #[arg(long)]
        points: usize,
        #[arg(long)]
        json: bool,
    },
    /// Print the fan of a built-in toric Fano threefold.
    Builtin { symbol: String },
}

enum Failure {
    Input(String),
    Strict(String),
}

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Input(e.to_string())
    }
}

type Outcome = Result<String, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let run = || run(cli.command);
    let result = match cli.parallel {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build() {
            Ok(pool) => pool.install(run),
            Err(e) => Err(Failure::Input(e.to_string())),
        },
        None => run(),
    };
    match result {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Strict(out)) => {
            print!("{out}");
            eprintln!("error: undocumented discrepancies between the tables and the engine");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> Outcome {
    match command {
        Command::Analyze { fan, json, tsv } => analyze(&fan, json, tsv),
        Command::Tables {
            catalog,
            check,
            strict,
            json,
        } => tables(catalog.as_deref(), check, strict, json),
        Command::Graph { catalog, dot } => graph(catalog.as_deref(), dot.as_deref()),
        Command::Cohomology { fan, divisor, json } => cohomology(&fan, &divisor, json),
        Command::Delpezzo { points, json } => delpezzo(points, json),
        Command::Builtin { symbol } => Ok(catalog::builtin_toric_fano(&symbol)?.to_json() + "\n"),
    }
}

fn read_variety(path: &Path) -> Result<ToricVariety, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    let fan = Fan::from_json(&text)?;
    Ok(ToricVariety::new(fan)?)
}

fn analyze(path: &Path, json: bool, tsv: bool) -> Outcome {
    let v = read_variety(path)?;
    let report = catalog::analyze_with_targets(&v)?;
    if json {
        return Ok(serde_json::to_string_pretty(&report)? + "\n");
    }
    if tsv {
        return Ok(analyze_tsv(&report));
    }
    Ok(analyze_text(&report))
}

fn target_text(d: &superpot::DivisorReport) -> String {
    d.target
        .as_ref()
        .map(|t| serde_json::to_value(t).ok().and_then(|v| v.as_str().map(str::to_string)).unwrap_or_default())
        .unwrap_or_else(|| "-".into())
}

fn analyze_tsv(r: &BaseReport) -> String {
    let mut s = String::from("ray\tviolating_ray\tchi\th_vector\tverdict\treason\ttype\ttarget\n");
    for d in &r.candidates {
        let _ = writeln!(
            s,
            "{}\t{:?}\t{}\t{:?}\t{:?}\t{:?}\t{}\t{}",
            d.ray,
            d.violating_ray.pairing,
            d.chi,
            d.h_vector,
            d.verdict,
            d.reason,
            d.div_type.map_or("-", |t| t.label()),
            target_text(d)
        );
    }
    s
}

fn analyze_text(r: &BaseReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "base: {}", r.name);
    let _ = writeln!(s, "b2: {}", r.b2);
    let _ = writeln!(s, "fano: {}", r.fano);
    let _ = writeln!(s, "minus_k_cubed: {}", r.minus_k_cubed);
    let _ = writeln!(s, "c1c2: {}", r.c1c2);
    let _ = writeln!(s, "extremal_rays: {}", r.extremal_rays.len());
    let _ = writeln!(s, "candidates: {}", r.candidates.len());
    for d in &r.candidates {
        let _ = writeln!(
            s,
            "  D{}: chi={} h={:?} {:?} ({:?}) type={} target={}",
            d.ray,
            d.chi,
            d.h_vector,
            d.verdict,
            d.reason,
            d.div_type.map_or("-", |t| t.label()),
            target_text(d)
        );
    }
    let _ = writeln!(s, "contributing: {}", r.contributing().count());
    for f in &r.fibrations {
        let _ = writeln!(s, "fibration: {:?} -> {}", f.kind, f.target);
    }
    let _ = writeln!(s, "chi_x: {}", r.chi_x);
    let _ = writeln!(s, "ell: {}", r.cy4.ell.map_or("-".into(), |l| l.to_string()));
    let _ = writeln!(s, "h11_x: {}", r.cy4.h11_x);
    let _ = writeln!(s, "weierstrass_smooth: {}", r.cy4.weierstrass_smooth);
    if r.cy4.formal_value {
        let _ = writeln!(s, "note: formal value, the Weierstrass model may be singular");
    }
    s
}

fn read_catalog(path: Option<&Path>, validate: bool) -> Result<Vec<catalog::FanoRecord>, Failure> {
    let records = match path {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| Failure::Input(format!("{}: {e}", p.display())))?;
            catalog::parse_records(&text)?
        }
        None => catalog::parse_records(catalog::SHIPPED_CATALOG)?,
    };
    if validate {
        catalog::validate_records(&records)?;
    }
    Ok(records)
}

fn tables(path: Option<&Path>, check: bool, strict: bool, json: bool) -> Outcome {
    // In check mode invariant violations are reported as diffs, not load errors.
    let records = read_catalog(path, !check)?;
    if !check {
        return Ok(if json {
            serde_json::to_string_pretty(&records)? + "\n"
        } else {
            catalog::tables_tsv(&records)
        });
    }
    let report = catalog::check_tables(&records)?;
    let out = if json {
        serde_json::to_string_pretty(&report)? + "\n"
    } else {
        catalog::diffs_tsv(&report)
    };
    if strict && !report.is_clean() {
        return Err(Failure::Strict(out));
    }
    Ok(out)
}

fn graph(path: Option<&Path>, dot: Option<&Path>) -> Outcome {
    let records = read_catalog(path, true)?;
    let g = catalog::transition_graph(&records)?;
    let text = g.to_dot();
    match dot {
        Some(p) => {
            std::fs::write(p, &text).map_err(|e| Failure::Input(format!("{}: {e}", p.display())))?;
            Ok(format!("wrote {} nodes and {} edges to {}\n", g.nodes.len(), g.edges.len(), p.display()))
        }
        None => Ok(text),
    }
}

fn cohomology(path: &Path, divisor: &str, json: bool) -> Outcome {
    let v = read_variety(path)?;
    let coeffs = divisor
        .split(',')
        .map(|x| x.trim().parse::<i64>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| Failure::Input(format!("divisor `{divisor}`: {e}")))?;
    if coeffs.len() != v.ray_count() {
        return Err(Failure::Input(format!(
            "divisor has {} coefficients but the fan has {} rays",
            coeffs.len(),
            v.ray_count()
        )));
    }
    let l = DivisorClass::new(coeffs);
    let h = v.line_bundle_cohomology(&l)?;
    let chi = v.riemann_roch(&l)?;
    if json {
        let value = serde_json::json!({ "h": h, "chi_riemann_roch": chi.to_string() });
        return Ok(serde_json::to_string(&value)? + "\n");
    }
    let hs: Vec<String> = h.iter().map(|x| x.to_string()).collect();
    Ok(format!("h = ({})\nchi_riemann_roch = {}\n", hs.join(","), chi))
}

fn delpezzo(points: usize, json: bool) -> Outcome {
    let curves = catalog::minus_one_curves(points)?;
    if json {
        return Ok(serde_json::to_string(&curves)? + "\n");
    }
    match curves {
        MinusOneCurves::Infinite => Ok(format!("points: {points}\ncount: infinite\n")),
        MinusOneCurves::Finite(list) => {
            let mut s = format!("points: {points}\ncount: {}\n", list.len());
            for c in list {
                let a: Vec<String> = c.a.iter().map(|x| x.to_string()).collect();
                let _ = writeln!(s, "({}; {})", c.d, a.join(","));
            }
            Ok(s)
        }
    }
}
