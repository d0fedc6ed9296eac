mod args;

use std::fs;
use std::path::Path;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::Parser;
use serde::Serialize;
use serde_json::json;

use args::{Cli, Command, Format, RunArgs};
use steiner_laminar::driver::SolveReport;
use steiner_laminar::graph::{parse_stp, NodeId};
use steiner_laminar::laminar::enumerate_families;
use steiner_laminar::lp::{build_lp, export_lp};
use steiner_laminar::oracle::{brute_force_subset_mst, dreyfus_wagner};
use steiner_laminar::{solve_instance, Backend, Instance, SolveOptions};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(command: Command) -> anyhow::Result<ExitCode> {
    match command {
        Command::Solve { instance, run } => {
            let g = load(&instance)?;
            let report = solve_instance(&g, &options(&g, &run, run.backend.into())?)?;
            match run.format.unwrap_or(Format::Json) {
                Format::Json => println!("{}", serde_json::to_string_pretty(&report)?),
                Format::Table => print_report(&report),
            }
        }
        Command::Enumerate { b, format } => {
            let families: Vec<String> = enumerate_families(b)?.map(|l| l.encoding()).collect();
            match format {
                Format::Json => println!("{}", serde_json::to_string_pretty(&families)?),
                Format::Table => families.iter().for_each(|f| println!("{f}")),
            }
        }
        Command::ExportLp {
            instance,
            out,
            root,
        } => {
            let g = load(&instance)?;
            let root = resolve_root(&g, root)?;
            fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
            let view = g.bidirect();
            let stem = stem(&instance);
            let b = g.terminals().len() - 1;
            anyhow::ensure!(b >= 1, "instance has a single terminal; nothing to export");
            let mut written = 0;
            for family in enumerate_families(b)? {
                let lp = build_lp(&g, &view, root, &family)?;
                let path = out.join(format!("{stem}_{}_{}.lp", root + 1, family.id()));
                let text = format!("\\ family {}\n{}", family.encoding(), export_lp(&lp.model));
                fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
                written += 1;
            }
            eprintln!("wrote {written} files to {}", out.display());
        }
        Command::Verify { instance, run } => return verify(&instance, &run),
        Command::Bench { dir, run } => bench(&dir, &run)?,
    }
    Ok(ExitCode::SUCCESS)
}

fn stem(path: &Path) -> String {
    path.file_stem()
        .map_or_else(|| "instance".into(), |s| s.to_string_lossy().into_owned())
}

fn load(path: &Path) -> anyhow::Result<Instance> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let g = parse_stp(&text).with_context(|| format!("parsing {}", path.display()))?;
    Ok(match g.name() {
        Some(_) => g,
        None => g.with_name(stem(path)),
    })
}

fn resolve_root(g: &Instance, root: Option<usize>) -> anyhow::Result<NodeId> {
    match root {
        None => Ok(g.terminals()[0]),
        Some(r) if r == 0 || r > g.node_count() => {
            bail!(
                "--root {r} is not a node (nodes are 1..={})",
                g.node_count()
            )
        }
        Some(r) if !g.is_terminal(r - 1) => bail!("--root {r} is not a terminal"),
        Some(r) => Ok(r - 1),
    }
}

fn options(g: &Instance, run: &RunArgs, backend: Backend) -> anyhow::Result<SolveOptions> {
    Ok(SolveOptions {
        root: Some(resolve_root(g, run.root)?),
        backend,
        threads: run.threads,
        keep_all: run.keep_all,
        solver: run.solver()?,
    })
}

fn print_report(r: &SolveReport) {
    println!("instance        {}", r.instance);
    println!("root            {}", r.root);
    println!("backend         {}", r.backend);
    println!("terminals       {}", r.terminals);
    println!("families        {}", r.families_solved);
    println!("best family     {} {}", r.best_family, r.best_structure);
    println!("optimal cost    {}", r.optimal_cost);
    println!(
        "time            {:.3} s total, {:.4} s mean / {:.4} s max per family",
        r.total_time, r.per_family_time_stats.mean, r.per_family_time_stats.max
    );
    println!("tree edges      {}", r.tree_edges.len());
    for (u, v, c) in &r.tree_edges {
        println!("  {u:>6} {v:>6} {c:>10}");
    }
    if let Some(all) = &r.families {
        println!("per family");
        for f in all {
            println!(
                "  {:>8} {:<24} objective {:>10} image {:>10} tree {:>10}",
                f.family_id, f.family, f.objective, f.phi_cost, f.tree_cost
            );
        }
    }
}

fn same(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * (1.0 + a.abs().max(b.abs()))
}

fn verify(path: &Path, run: &RunArgs) -> anyhow::Result<ExitCode> {
    let g = load(path)?;
    let dp = solve_instance(&g, &options(&g, run, Backend::Dp)?)?;
    let lp = solve_instance(&g, &options(&g, run, Backend::Lp)?)?;
    let dw = dreyfus_wagner(&g, g.terminals());
    let bf = brute_force_subset_mst(&g, g.terminals());

    let names = ["dp", "lp", "dreyfus-wagner", "brute-force"];
    let costs: [Result<f64, String>; 4] = [
        Ok(dp.optimal_cost),
        Ok(lp.optimal_cost),
        dw.map(|r| r.cost).map_err(|e| e.to_string()),
        bf.map(|r| r.cost).map_err(|e| e.to_string()),
    ];
    let mut agree = true;
    for (i, a) in costs.iter().enumerate() {
        for b in &costs[i + 1..] {
            if let (Ok(a), Ok(b)) = (a, b) {
                agree &= same(*a, *b);
            }
        }
    }

    match run.format.unwrap_or(Format::Table) {
        Format::Json => {
            let entry = |c: &Result<f64, String>| match c {
                Ok(v) => json!({ "cost": v }),
                Err(e) => json!({ "skipped": e }),
            };
            let costs: serde_json::Map<_, _> = names
                .iter()
                .zip(&costs)
                .map(|(n, c)| (n.to_string(), entry(c)))
                .collect();
            let out = json!({
                "instance": dp.instance,
                "root": dp.root,
                "families_solved": dp.families_solved,
                "costs": costs,
                "agree": agree,
            });
            println!("{}", serde_json::to_string_pretty(&out)?);
        }
        Format::Table => {
            println!(
                "instance {}  root {}  families {}",
                dp.instance, dp.root, dp.families_solved
            );
            for (n, c) in names.iter().zip(&costs) {
                match c {
                    Ok(v) => println!("  {n:<16} {v}"),
                    Err(e) => println!("  {n:<16} skipped: {e}"),
                }
            }
            print!("\n  {:<16}", "");
            for n in &names {
                print!("{n:>16}");
            }
            println!();
            for (n, a) in names.iter().zip(&costs) {
                print!("  {n:<16}");
                for b in &costs {
                    let cell = match (a, b) {
                        (Ok(a), Ok(b)) if same(*a, *b) => "=",
                        (Ok(_), Ok(_)) => "MISMATCH",
                        _ => "-",
                    };
                    print!("{cell:>16}");
                }
                println!();
            }
            println!("\n{}", if agree { "all agree" } else { "MISMATCH" });
        }
    }
    Ok(if agree {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}

#[derive(Serialize)]
struct BenchRow {
    instance: String,
    nodes: usize,
    arcs: usize,
    terminals: usize,
    families: u64,
    optimal_cost: f64,
    mean_subproblem_time: f64,
    total_time: f64,
}

fn bench(dir: &Path, run: &RunArgs) -> anyhow::Result<()> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .with_context(|| format!("reading {}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x.eq_ignore_ascii_case("stp")))
        .collect();
    files.sort();
    anyhow::ensure!(!files.is_empty(), "no .stp files in {}", dir.display());

    let mut rows = Vec::new();
    for path in &files {
        let g = load(path)?;
        let report = solve_instance(&g, &options(&g, run, run.backend.into())?)?;
        rows.push(BenchRow {
            instance: stem(path),
            nodes: g.node_count(),
            arcs: 2 * g.edges().len(),
            terminals: g.terminals().len(),
            families: report.families_solved,
            optimal_cost: report.optimal_cost,
            mean_subproblem_time: report.per_family_time_stats.mean,
            total_time: report.total_time,
        });
    }
    match run.format.unwrap_or(Format::Table) {
        Format::Json => println!("{}", serde_json::to_string_pretty(&rows)?),
        Format::Table => {
            println!(
                "{:<16} {:>7} {:>8} {:>4} {:>10} {:>12} {:>12} {:>12}",
                "instance", "|V|", "|A|", "|R|", "|L_b|", "subproblem", "total", "cost"
            );
            for r in &rows {
                println!(
                    "{:<16} {:>7} {:>8} {:>4} {:>10} {:>10.3} s {:>10.3} s {:>12}",
                    r.instance,
                    r.nodes,
                    r.arcs,
                    r.terminals,
                    r.families,
                    r.mean_subproblem_time,
                    r.total_time,
                    r.optimal_cost,
                );
            }
        }
    }
    Ok(())
}
