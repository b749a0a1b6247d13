//! Runs a slice of the experiment on the bundled fixture through the
//! library: load the manifest, extract, link, run the EM and best-known VSM
//! configurations, evaluate and print the ranking table.
//!
//! The full factorial run is `bugloc run -m crates/core/fixtures/minirepo/bugloc.toml`.

use std::path::Path;

use bugloc::cli::{
    execute, load_outcomes, run_experiment, Cli, ResultsDir, RunManifest, RunOptions, Workspace,
};
use bugloc::evaluation::{rank_all, EvalParams, RankBy};
use bugloc::models::{parse_config_id, IdfMode};
use clap::Parser;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let manifest_path = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/minirepo/bugloc.toml");
    let out = std::env::temp_dir().join("bugloc-end-to-end");
    let (m, o) = (manifest_path.to_str().unwrap(), out.to_str().unwrap());
    for cmd in ["extract", "link"] {
        execute(&Cli::parse_from(["bugloc", cmd, "-m", m, "--output", o]))?;
    }

    let mut manifest = RunManifest::load(&manifest_path)?;
    manifest.output = out.clone();
    let params = EvalParams {
        k: manifest.k,
        k_loc: manifest.k_loc,
        cap: manifest.cap,
    };
    let configs: Vec<_> = ["A1.B4.C5.D1.E1", "A3.B3.C7.D2.E1", "M1", "M2", "M3", "M4"]
        .into_iter()
        .map(parse_config_id)
        .collect::<Result<_, _>>()?;
    let workspace = Workspace::load(manifest)?;
    let results = ResultsDir::new(out.clone());
    let summary = run_experiment(
        &workspace,
        &results,
        &RunOptions {
            configs: configs.clone(),
            seed: 7,
            idf: IdfMode::Log,
            jobs: 0,
            force: true,
        },
    )?;
    println!(
        "{} configurations run, {} failed",
        summary.executed,
        summary.failed.len()
    );

    let outcomes = load_outcomes(&results, &configs, params)?;
    println!("rank  config            top-{}  median effort", params.k);
    for row in rank_all(&outcomes, RankBy::TopK) {
        println!(
            "{:>4}  {:<16}  {:>5.2}  {:>6}",
            row.rank, row.config, row.top_k, row.median_effort
        );
    }
    println!("outputs in {}", out.display());
    Ok(())
}
