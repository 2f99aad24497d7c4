//! `ccn-acct`: batch experiment runner for pInt-based accounting.
//!
//! Subcommands: `simulate` (scenario file in, metrics CSVs out),
//! `analytic` (closed-form message-count and overhead series),
//! `collision` (nonce-collision probability tables) and `topo check`.
//! Outputs are pure functions of the inputs and seeds; CSV layouts are
//! frozen in `docs/formats.md`.

use std::path::{Path, PathBuf};

use analytic_model::{
    content_wire_size, message_counts, overhead_ratio, pint_wire_size, total_extra_bytes,
    OverheadParams, Scheme,
};
use clap::{Parser, Subcommand};
use crsd_crypto::collision_probability;
use rayon::prelude::*;
use sim_harness::{build_fibs, run, MetricsReport, Scenario, Topology};

#[derive(Parser)]
#[command(name = "ccn-acct", version, about = "Accounting experiments for content-centric networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario: one metrics CSV per seed plus a summary.
    Simulate {
        /// Scenario file (key = value format).
        #[arg(long)]
        scenario: PathBuf,
        /// Override the scenario's seed list with a single seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory for CSV artifacts.
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Closed-form series from the analytic model.
    Analytic {
        #[command(subcommand)]
        what: AnalyticCmd,
    },
    /// Nonce-collision probability table (birthday bound).
    Collision {
        /// Nonce width in bits (1..=64 for the exact table).
        #[arg(long)]
        bits: u32,
        /// Largest draw count tabulated.
        #[arg(long)]
        max_draws: u64,
        #[arg(long, default_value_t = 1)]
        step: u64,
        /// Write CSV here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Topology file utilities.
    Topo {
        #[command(subcommand)]
        what: TopoCmd,
    },
}

#[derive(Subcommand)]
enum AnalyticCmd {
    /// Per-scheme message counts over a request sweep.
    Messages {
        /// ENCRYPTION, PINT or CACHELESS.
        #[arg(long)]
        scheme: String,
        #[arg(long, default_value_t = 1)]
        gamma_min: u64,
        #[arg(long)]
        gamma_max: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Per-link byte-overhead ratios for line topologies.
    Overhead {
        /// Content payload sizes in bytes.
        #[arg(long, value_delimiter = ',', default_value = "10,100,1000,10000,100000,1000000")]
        payloads: Vec<usize>,
        /// Link counts of the line topologies.
        #[arg(long, value_delimiter = ',', default_value = "2,3,4")]
        links: Vec<usize>,
        #[arg(long, default_value_t = 40)]
        name_bytes: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum TopoCmd {
    /// Parse and validate a topology file, printing a summary.
    Check {
        #[arg(long)]
        file: PathBuf,
    },
}

fn main() {
    let cli = Cli::parse();
    if let Err(msg) = dispatch(cli) {
        eprintln!("error: {msg}");
        std::process::exit(2);
    }
}

fn dispatch(cli: Cli) -> Result<(), String> {
    match cli.command {
        Command::Simulate {
            scenario,
            seed,
            out,
        } => cmd_simulate(&scenario, seed, &out),
        Command::Analytic { what } => match what {
            AnalyticCmd::Messages {
                scheme,
                gamma_min,
                gamma_max,
                out,
            } => cmd_analytic_messages(&scheme, gamma_min, gamma_max, out.as_deref()),
            AnalyticCmd::Overhead {
                payloads,
                links,
                name_bytes,
                out,
            } => cmd_analytic_overhead(&payloads, &links, name_bytes, out.as_deref()),
        },
        Command::Collision {
            bits,
            max_draws,
            step,
            out,
        } => cmd_collision(bits, max_draws, step, out.as_deref()),
        Command::Topo {
            what: TopoCmd::Check { file },
        } => cmd_topo_check(&file),
    }
}

fn cmd_simulate(scenario_path: &Path, seed: Option<u64>, out: &Path) -> Result<(), String> {
    let scenario = Scenario::from_file(scenario_path).map_err(|e| e.to_string())?;
    let seeds: Vec<u64> = match seed {
        Some(s) => vec![s],
        None => scenario.seeds.clone(),
    };
    std::fs::create_dir_all(out).map_err(|e| format!("cannot create {out:?}: {e}"))?;

    let reports: Vec<(u64, MetricsReport)> = seeds
        .par_iter()
        .map(|s| run(&scenario, *s).map(|r| (*s, r)))
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;

    for (seed, report) in &reports {
        let path = out.join(format!("seed_{seed}.csv"));
        write_atomic(&path, &report.to_csv())?;
        println!("wrote {}", path.display());
    }

    let mut summary = String::from(
        "seed,issued,satisfied,producer_interests,producer_pint_count,accepted,duplicates,rejected,router_cache_hits,adversary_emitted,conservation_gap\n",
    );
    let mut columns = vec![Vec::new(); 10];
    for (seed, r) in &reports {
        let (learned, issued) = r.conservation_sides();
        let row = [
            r.consumers.issued,
            r.consumers.satisfied,
            r.producer.stats.interests_received,
            r.producer.stats.pint_count_sum,
            r.producer.totals.accepted,
            r.producer.totals.duplicates,
            r.producer.totals.rejected,
            r.total_cache_hits(),
            r.adversary_emitted,
        ];
        let gap = learned as i64 - issued as i64;
        for (col, v) in columns.iter_mut().zip(row.iter().chain(std::iter::once(&(gap.unsigned_abs())))) {
            col.push(*v);
        }
        summary.push_str(&format!(
            "{seed},{},{},{},{},{},{},{},{},{},{gap}\n",
            row[0], row[1], row[2], row[3], row[4], row[5], row[6], row[7], row[8]
        ));
    }
    let means: Vec<String> = columns
        .iter()
        .map(|col| {
            let sum: u64 = col.iter().sum();
            format!("{:.6}", sum as f64 / col.len() as f64)
        })
        .collect();
    summary.push_str(&format!("mean,{}\n", means.join(",")));
    let path = out.join("summary.csv");
    write_atomic(&path, &summary)?;
    println!("wrote {}", path.display());
    Ok(())
}

fn cmd_analytic_messages(
    scheme: &str,
    gamma_min: u64,
    gamma_max: u64,
    out: Option<&Path>,
) -> Result<(), String> {
    let scheme = Scheme::parse(scheme).ok_or_else(|| format!("unknown scheme '{scheme}'"))?;
    if gamma_min > gamma_max {
        return Err("gamma range is empty".into());
    }
    let mut csv = String::from("scheme,gamma,p_l,p_r\n");
    for gamma in gamma_min..=gamma_max {
        let c = message_counts(scheme, gamma);
        csv.push_str(&format!("{},{gamma},{},{}\n", scheme.as_str(), c.p_l, c.p_r));
    }
    emit(out, &csv)
}

fn cmd_analytic_overhead(
    payloads: &[usize],
    links: &[usize],
    name_bytes: usize,
    out: Option<&Path>,
) -> Result<(), String> {
    if payloads.is_empty() || links.is_empty() {
        return Err("need at least one payload size and one link count".into());
    }
    if !(1..=255).contains(&name_bytes) {
        return Err("name_bytes must fit one component (1..=255)".into());
    }
    let mut csv = String::from(
        "total_links,link_index,payload_bytes,pint_bytes,content_bytes,ratio,total_extra_bytes\n",
    );
    for &total_links in links {
        if total_links < 2 {
            return Err("line topologies need at least 2 links".into());
        }
        for &payload in payloads {
            let params = OverheadParams {
                payload_bytes: payload,
                name_bytes,
                origin_bytes: 8,
                total_links,
                cache_link_index: 1,
            };
            let pint = pint_wire_size(name_bytes, params.origin_bytes);
            let content = content_wire_size(name_bytes, payload);
            let extra = total_extra_bytes(&params);
            for link in 1..=total_links {
                let ratio = overhead_ratio(&params, link);
                csv.push_str(&format!(
                    "{total_links},{link},{payload},{pint},{content},{ratio:.9},{extra}\n"
                ));
            }
        }
    }
    emit(out, &csv)
}

fn cmd_collision(bits: u32, max_draws: u64, step: u64, out: Option<&Path>) -> Result<(), String> {
    if !(1..=64).contains(&bits) {
        return Err("bits must be in 1..=64 for the exact table".into());
    }
    if step == 0 {
        return Err("step must be positive".into());
    }
    let mut csv = String::from("bits,draws,probability\n");
    let mut draws = 0;
    while draws <= max_draws {
        let p = collision_probability(bits, draws);
        csv.push_str(&format!("{bits},{draws},{p:.12}\n"));
        draws += step;
    }
    emit(out, &csv)
}

fn cmd_topo_check(file: &Path) -> Result<(), String> {
    let topo = Topology::from_file(file).map_err(|e| e.to_string())?;
    let summary = topo.validate().map_err(|e| e.to_string())?;
    let plan = build_fibs(&topo, &topo.prefixes).map_err(|e| e.to_string())?;
    let max_distance = plan.distance.values().max().copied().unwrap_or(0);
    println!(
        "ok: {} nodes ({} consumers, {} routers, {} producers), {} links, max hop distance {}",
        summary.consumers + summary.routers + summary.producers,
        summary.consumers,
        summary.routers,
        summary.producers,
        summary.links,
        max_distance
    );
    Ok(())
}

fn emit(out: Option<&Path>, csv: &str) -> Result<(), String> {
    match out {
        Some(path) => {
            write_atomic(path, csv)?;
            println!("wrote {}", path.display());
            Ok(())
        }
        None => {
            print!("{csv}");
            Ok(())
        }
    }
}

/// Writes through a temp file in the same directory so partial output is
/// never visible under the final name.
fn write_atomic(path: &Path, contents: &str) -> Result<(), String> {
    let tmp = path.with_extension("csv.tmp");
    std::fs::write(&tmp, contents).map_err(|e| format!("cannot write {tmp:?}: {e}"))?;
    std::fs::rename(&tmp, path).map_err(|e| format!("cannot rename into {path:?}: {e}"))?;
    Ok(())
}
