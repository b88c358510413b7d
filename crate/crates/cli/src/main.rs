use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use matint::bounds::{build_table, root_bound, table_bytes, BoundTable, INF};
use matint::generate::{generate_comb, generate_random, random_knapsack, GenParams};
use matint::io::{parse_file, serialize, ParseOptions};
use matint::oracle::{brute_force_blocker, brute_force_interdiction, DEFAULT_CAP};
use matint::search::{solve_blocker, solve_inclusion_interdiction, solve_interdiction};
use matint::{Instance, Mode, RawInstance, Solution, SolverConfig};

#[derive(Parser)]
#[command(name = "matint", version, about = "Matroid interdiction and minimum-cost blocker solver")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Global {
    /// Wall-clock limit in seconds; the best solution so far is reported.
    #[arg(long, global = true, value_name = "S")]
    time_limit: Option<f64>,
    #[arg(long, global = true, value_enum, default_value_t = ModeArg::Parallel)]
    mode: ModeArg,
    #[arg(long, global = true, value_name = "P", default_value_t = 16)]
    max_prefix_bits: usize,
    /// Largest bound table, in bytes.
    #[arg(long, global = true, value_name = "BYTES", default_value_t = 1 << 30)]
    mem_limit: u128,
    #[arg(long, global = true, value_name = "K", default_value_t = 1)]
    round_k: u64,
    #[arg(long, global = true)]
    no_greedy: bool,
    #[arg(long, global = true)]
    no_preprocess: bool,
    #[arg(long, global = true, value_name = "N", default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, value_name = "PATH")]
    stats_json: Option<PathBuf>,
    /// Read decimal weights, costs and capacity, multiplied by this factor.
    #[arg(long, global = true, value_name = "F")]
    scale: Option<f64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Parallel,
    Interleaved,
    BoundsFirst,
    NoBounds,
}

#[derive(Subcommand)]
enum Cmd {
    /// Maximize the follower's minimum basis weight within the budget.
    Solve { file: PathBuf },
    /// Cheapest interdiction raising the minimum basis weight to a target.
    Blocker {
        file: PathBuf,
        #[arg(long, conflicts_with = "gamma")]
        target: Option<i64>,
        /// Target `ceil((max basis - min basis) * G + min basis)`.
        #[arg(long)]
        gamma: Option<f64>,
    },
    /// Minimize the heaviest basis containing the interdicted set.
    Inclusion { file: PathBuf },
    /// Root bound from one table, optionally saved to or checked against a cache.
    Bound {
        file: PathBuf,
        #[arg(long, default_value_t = 0)]
        prefix_bits: usize,
        #[arg(long, value_name = "PATH")]
        save: Option<PathBuf>,
        #[arg(long, value_name = "PATH", conflicts_with = "save")]
        load: Option<PathBuf>,
    },
    /// Exhaustive reference solver.
    Oracle {
        file: PathBuf,
        #[arg(long)]
        target: Option<i64>,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: usize,
    },
    #[command(subcommand)]
    Generate(Gen),
    /// Solve every `.mi` file in a directory and print CSV.
    Bench { dir: PathBuf },
}

#[derive(Subcommand)]
enum Gen {
    Random {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1.0)]
        density: f64,
        #[arg(long, default_value_t = 1.0)]
        gamma: f64,
        #[arg(long, default_value_t = 100)]
        c_max: u64,
        #[arg(long, default_value_t = 10_000)]
        w_max: i64,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    Comb {
        #[arg(long)]
        k: usize,
        #[arg(long = "big", default_value_t = 100)]
        big: i64,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    Knapsack {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 20)]
        a_max: u64,
        #[arg(long, default_value_t = 30)]
        p_max: i64,
        #[arg(long)]
        capacity: u64,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
}

const EXIT_OPTIMAL: u8 = 0;
const EXIT_ERROR: u8 = 1;
const EXIT_TIME_LIMIT: u8 = 2;
const EXIT_RANK: u8 = 3;

impl Global {
    fn config(&self) -> SolverConfig {
        SolverConfig {
            time_limit: self.time_limit.map(Duration::from_secs_f64),
            mode: match self.mode {
                ModeArg::Parallel => Mode::Parallel,
                ModeArg::Interleaved => Mode::Interleaved,
                ModeArg::BoundsFirst => Mode::BoundsFirst,
                ModeArg::NoBounds => Mode::NoBounds,
            },
            max_prefix_bits: self.max_prefix_bits,
            memory_budget: self.mem_limit,
            round_k: self.round_k,
            greedy: !self.no_greedy,
            preprocess: !self.no_preprocess,
        }
    }

    fn read(&self, path: &Path) -> Result<RawInstance> {
        parse_file(path, ParseOptions { scale: self.scale }).with_context(|| format!("reading {}", path.display()))
    }

    fn write_stats(&self, sol: &Solution) -> Result<()> {
        if let Some(p) = &self.stats_json {
            fs::write(p, sol.stats.to_json() + "\n").with_context(|| format!("writing {}", p.display()))?;
        }
        Ok(())
    }
}

fn one_based(x: &[usize]) -> String {
    x.iter().map(|e| (e + 1).to_string()).collect::<Vec<_>>().join(",")
}

fn value_str(v: Option<i64>, unbounded: &str) -> String {
    v.map_or_else(|| unbounded.to_string(), |v| v.to_string())
}

fn report(sol: &Solution, unbounded: &str, extra: &str) -> u8 {
    println!(
        "value={} optimal={} X={}{extra}",
        value_str(sol.value, unbounded),
        u8::from(sol.proven_optimal),
        one_based(&sol.interdicted)
    );
    if !sol.proven_optimal {
        EXIT_TIME_LIMIT
    } else if sol.rank_reducible {
        EXIT_RANK
    } else {
        EXIT_OPTIMAL
    }
}

/// Minimum and maximum basis weights.
fn basis_range(raw: &RawInstance) -> Result<(i64, i64)> {
    let mut unit = raw.clone();
    unit.costs = vec![Some(1); raw.len()];
    let low = unit.normalize()?.value(&[]).context("no basis")?;
    unit.weights.iter_mut().for_each(|w| *w = -*w);
    let high = -unit.normalize()?.value(&[]).context("no basis")?;
    Ok((low, high))
}

fn emit(raw: &RawInstance, out: Option<&PathBuf>) -> Result<()> {
    let text = serialize(raw)?;
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display()))?,
        None => print!("{text}"),
    }
    Ok(())
}

fn bench(g: &Global, dir: &Path) -> Result<()> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .with_context(|| format!("listing {}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "mi"))
        .collect();
    files.sort();
    let cfg = g.config();
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    writeln!(out, "file,value,optimal,nodes,cpu_s,root_lb,root_ub")?;
    for f in files {
        let inst = g.read(&f)?.normalize()?;
        let sol = solve_interdiction(&inst, &cfg)?;
        let s = &sol.stats;
        let opt = |v: Option<i64>| v.map_or(String::new(), |v| v.to_string());
        writeln!(
            out,
            "{},{},{},{},{:.6},{},{}",
            f.file_name().unwrap().to_string_lossy(),
            value_str(sol.value, "inf"),
            u8::from(sol.proven_optimal),
            s.nodes,
            s.cpu_seconds,
            opt(s.root_lb),
            opt(s.root_ub)
        )?;
    }
    Ok(())
}

fn bound(g: &Global, file: &Path, p: usize, k: u64, save: Option<&PathBuf>, load: Option<&PathBuf>) -> Result<()> {
    let inst: Instance = g.read(file)?.normalize()?;
    let table = match load {
        Some(path) => BoundTable::load(path, &inst).with_context(|| format!("loading {}", path.display()))?,
        None => build_table(&inst, p, k, g.mem_limit)?,
    };
    if let Some(path) = save {
        table.save(path).with_context(|| format!("writing {}", path.display()))?;
    }
    let root = root_bound(&inst, &table);
    println!(
        "bound={} base={} p={} k={} bytes={}",
        if root == INF { "inf".to_string() } else { root.to_string() },
        value_str(inst.value(&[]), "inf"),
        table.prefix_bits(),
        table.rounding(),
        table_bytes(&inst, table.prefix_bits(), table.rounding())
    );
    Ok(())
}

fn run(cli: Cli) -> Result<u8> {
    let g = &cli.global;
    match &cli.cmd {
        Cmd::Solve { file } => {
            let inst = g.read(file)?.normalize()?;
            let sol = solve_interdiction(&inst, &g.config())?;
            g.write_stats(&sol)?;
            Ok(report(&sol, "inf", ""))
        }
        Cmd::Blocker { file, target, gamma } => {
            let raw = g.read(file)?;
            let r = match (target, gamma, raw.target) {
                (Some(r), _, _) => *r,
                (None, Some(gm), _) => {
                    let (low, high) = basis_range(&raw)?;
                    ((high - low) as f64 * gm + low as f64).ceil() as i64
                }
                (None, None, Some(r)) => r,
                (None, None, None) => bail!("blocker needs --target, --gamma or a `target` line in the file"),
            };
            let sol = solve_blocker(&raw.normalize()?, r, &g.config())?;
            g.write_stats(&sol)?;
            let code = report(&sol, "inf", &format!(" cost={} target={r}", sol.cost));
            Ok(if code == EXIT_RANK { EXIT_OPTIMAL } else { code })
        }
        Cmd::Inclusion { file } => {
            let raw = g.read(file)?;
            let sol = solve_inclusion_interdiction(&raw, &g.config())?;
            g.write_stats(&sol)?;
            Ok(report(&sol, "-inf", ""))
        }
        Cmd::Bound {
            file,
            prefix_bits,
            save,
            load,
        } => {
            bound(g, file, *prefix_bits, g.round_k, save.as_ref(), load.as_ref())?;
            Ok(EXIT_OPTIMAL)
        }
        Cmd::Oracle { file, target, cap } => {
            let raw = g.read(file)?;
            match target.or(raw.target) {
                Some(r) => {
                    let sol = brute_force_blocker(&raw, r, *cap)?;
                    report(&sol, "inf", &format!(" cost={} target={r}", sol.cost));
                    Ok(EXIT_OPTIMAL)
                }
                None => Ok(report(&brute_force_interdiction(&raw, *cap)?, "inf", "")),
            }
        }
        Cmd::Generate(gen) => {
            match gen {
                Gen::Random {
                    n,
                    density,
                    gamma,
                    c_max,
                    w_max,
                    out,
                } => {
                    let p = GenParams {
                        n: *n,
                        density: *density,
                        gamma: *gamma,
                        c_max: *c_max,
                        w_max: *w_max,
                        seed: g.seed,
                    };
                    emit(&generate_random(&p)?.raw, out.as_ref())?;
                }
                Gen::Comb { k, big, out } => {
                    if *k < 2 || *big < 2 {
                        bail!("comb needs k >= 2 and M >= 2");
                    }
                    emit(&generate_comb(*k, *big), out.as_ref())?;
                }
                Gen::Knapsack {
                    n,
                    a_max,
                    p_max,
                    capacity,
                    out,
                } => {
                    let (raw, _, _) = random_knapsack(*n, *a_max, *p_max, *capacity, g.seed);
                    emit(&raw, out.as_ref())?;
                }
            }
            Ok(EXIT_OPTIMAL)
        }
        Cmd::Bench { dir } => {
            bench(g, dir)?;
            Ok(EXIT_OPTIMAL)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_OPTIMAL };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}
