use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;
use spectra_core::eigen::{hausdorff, spectrum_approx, SpectrumApproximation};
use spectra_core::experiments::{format_float, run_experiment};
use spectra_core::graph::{
    build_comb, build_counterexample, build_regular_tree, build_sparse_tree_with_cycles, build_star, build_znxn,
    RootedGraph,
};
use spectra_core::operator::{Convention, PotentialRule, SchrodingerOperator};
use spectra_core::rlimit::{detect_rlimits, sample_paths, union_spectrum, PathStrategy};
use spectra_core::{Error, Result};

#[derive(Parser)]
#[command(name = "spectra", version, about = "Schrödinger operators on graphs: R-limits and essential spectra")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Tree,
    Znxn,
    Comb,
    Star,
    SparseCycles,
    Counterexample,
}

#[derive(Clone, Copy, ValueEnum)]
enum ConventionArg {
    Adj,
    Lap,
}

impl From<ConventionArg> for Convention {
    fn from(c: ConventionArg) -> Self {
        match c {
            ConventionArg::Adj => Convention::Adjacency,
            ConventionArg::Lap => Convention::Combinatorial,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Build a graph family and write its canonical JSON.
    Generate {
        #[arg(long, value_enum)]
        family: Family,
        #[arg(long, default_value_t = 3)]
        degree: usize,
        #[arg(long, default_value_t = 6)]
        depth: usize,
        /// Lattice dimension (znxn).
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 3)]
        levels: usize,
        #[arg(long, default_value_t = 10)]
        arm: usize,
        #[arg(long, default_value_t = 10)]
        spine: usize,
        /// Number of rays (star).
        #[arg(long, default_value_t = 3)]
        rays: usize,
        #[arg(long, default_value_t = 100)]
        ray: usize,
        #[arg(long, value_delimiter = ',', default_value = "2")]
        k_values: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_value = "3,8,16,28")]
        branch_levels: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_value = "5,12,22")]
        cycle_levels: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_value = "20,40,80")]
        blocks: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_value = "4,4,4")]
        girths: Vec<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Finite-section spectra on balls of increasing radius.
    Spectrum {
        #[arg(long)]
        graph: PathBuf,
        /// Potential rule as JSON (e.g. '{"rule":"constant","c":1}'), `@file`, or `free`.
        #[arg(long, default_value = "free")]
        potential: String,
        #[arg(long, value_enum, default_value = "adj")]
        convention: ConventionArg,
        #[arg(long, value_delimiter = ',')]
        radii: Vec<usize>,
        /// Ball center; defaults to the root.
        #[arg(long)]
        center: Option<usize>,
        #[arg(long)]
        gap: Option<f64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Detect recurring local patterns and report their spectra.
    Rlimits {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, default_value = "free")]
        potential: String,
        #[arg(long, value_enum, default_value = "adj")]
        convention: ConventionArg,
        #[arg(long)]
        rmax: usize,
        #[arg(long, default_value_t = 1e-9)]
        eps: f64,
        #[arg(long)]
        margin: usize,
        #[arg(long, default_value_t = 9)]
        model_radius: usize,
        #[arg(long, default_value_t = 0.05)]
        gap: f64,
        /// Sample this many random geodesics instead of all of them.
        #[arg(long)]
        random_paths: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a named experiment; exit status 0 iff every claim passes.
    Experiment {
        name: String,
        #[arg(long = "param", value_parser = parse_param)]
        params: Vec<(String, String)>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

fn parse_param(s: &str) -> std::result::Result<(String, String), String> {
    s.split_once('=').map(|(k, v)| (k.to_string(), v.to_string())).ok_or_else(|| format!("expected k=v, got {s}"))
}

fn read_graph(path: &Path) -> Result<RootedGraph> {
    RootedGraph::from_json(&std::fs::read_to_string(path)?)
}

fn read_potential(spec: &str) -> Result<Option<PotentialRule>> {
    if spec == "free" {
        return Ok(None);
    }
    let text = match spec.strip_prefix('@') {
        Some(path) => std::fs::read_to_string(path)?,
        None => spec.to_string(),
    };
    Ok(Some(serde_json::from_str(&text)?))
}

fn operator<'g>(g: &'g RootedGraph, potential: &str, convention: ConventionArg) -> Result<SchrodingerOperator<'g>> {
    match read_potential(potential)? {
        Some(rule) => SchrodingerOperator::from_rule(g, &rule, convention.into()),
        None => Ok(SchrodingerOperator::free(g, convention.into())),
    }
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Generate {
            family,
            degree,
            depth,
            n,
            levels,
            arm,
            spine,
            rays,
            ray,
            k_values,
            branch_levels,
            cycle_levels,
            blocks,
            girths,
            seed,
            out,
        } => {
            let g = match family {
                Family::Tree => build_regular_tree(degree, depth)?,
                Family::Znxn => build_znxn(n, levels)?,
                Family::Comb => build_comb(arm, spine)?,
                Family::Star => build_star(rays, ray)?,
                Family::SparseCycles => build_sparse_tree_with_cycles(&k_values, &branch_levels, &cycle_levels, depth)?,
                Family::Counterexample => build_counterexample(degree, &blocks, &girths, seed)?.graph,
            };
            std::fs::write(out, g.to_json())?;
            Ok(true)
        }
        Command::Spectrum { graph, potential, convention, radii, center, gap, out } => {
            let g = read_graph(&graph)?;
            let h = operator(&g, &potential, convention)?;
            let center = center.unwrap_or(g.root());
            let mut csv = String::from("radius,lower,upper,hausdorff_to_previous\n");
            let mut previous: Option<Vec<f64>> = None;
            for &r in &radii {
                let approx = spectrum_approx(&h, center, &[r], gap)?;
                let drift = previous.as_ref().map_or(f64::NAN, |p| hausdorff(p, &approx.eigenvalues));
                for (lo, hi) in &approx.intervals {
                    csv.push_str(&format!("{r},{},{},{}\n", format_float(*lo), format_float(*hi), format_float(drift)));
                }
                previous = Some(approx.eigenvalues);
            }
            std::fs::write(out, csv)?;
            Ok(true)
        }
        Command::Rlimits { graph, potential, convention, rmax, eps, margin, model_radius, gap, random_paths, seed, out } => {
            let g = read_graph(&graph)?;
            let h = operator(&g, &potential, convention)?;
            let strategy = match random_paths {
                Some(count) => PathStrategy::RandomGeodesic { seed, count },
                None => PathStrategy::AllDistanceMaximal,
            };
            let report = detect_rlimits(&h, &sample_paths(&g, strategy), rmax, eps, margin)?;
            for d in &report.diagnostics {
                eprintln!("{d}");
            }
            let models = if report.candidates.is_empty() {
                Vec::new()
            } else {
                union_spectrum(&h, &report.candidates, model_radius, gap, eps)?.1
            };
            let entries: Vec<_> = report
                .candidates
                .iter()
                .zip(&models)
                .map(|(c, m)| {
                    let approx = SpectrumApproximation::from_eigenvalues(m.eigenvalues.clone(), Some(gap), model_radius);
                    json!({
                        "radius": c.radius,
                        "witnesses": c.witnesses,
                        "canonical_hash": c.canonical_hash,
                        "spectrum": { "intervals": approx.intervals },
                    })
                })
                .collect();
            std::fs::write(out, serde_json::to_string_pretty(&entries)?)?;
            Ok(true)
        }
        Command::Experiment { name, params, seed, out } => {
            let params: BTreeMap<String, String> = params.into_iter().collect();
            let report = run_experiment(&name, &params, seed, Some(&out))?;
            for c in &report.claims {
                println!("{} {}", if c.pass { "PASS" } else { "FAIL" }, c.description);
            }
            Ok(report.passed())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            if matches!(e, Error::UnknownExperiment(_) | Error::Parameter(_)) {
                ExitCode::from(2)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}
