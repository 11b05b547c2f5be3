//! Command implementations and CSV reporting.
//!
//! Every CSV starts with a `#` comment echoing the full effective
//! configuration, so any artifact can be reproduced from its own header.
//! Nothing time- or host-dependent is ever written: repeated runs with the
//! same flags produce byte-identical files.

use std::fmt::Write as _;
use std::path::Path;

use anyhow::{bail, Context, Result};
use sha2::{Digest, Sha256};

use pimrl_core::eval::default_max_steps;
use pimrl_core::pim_sim::{Phase, PhaseBreakdown};
use pimrl_core::{
    collect_dataset, evaluate, greedy_policy, partition, read_dataset, run_multi_agent,
    run_training, write_dataset, BehaviorPolicy, Dataset, EnvKind, EnvSpec, Hyperparams, Mode,
    PimConfig, QTable,
};

use crate::qtable_io::{read_qtable, write_qtable};
use crate::{CollectArgs, EvalArgs, SweepArgs, TrainArgs};

/// `<prefix><suffix>` without `with_extension`'s dot-stripping, so dotted
/// prefixes like `runs/v1.2` stay intact.
fn with_suffix(prefix: &Path, suffix: &str) -> std::path::PathBuf {
    let mut s = prefix.as_os_str().to_os_string();
    s.push(suffix);
    std::path::PathBuf::from(s)
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)
                .with_context(|| format!("creating {}", parent.display()))?;
        }
    }
    std::fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

fn sha256_hex(path: &Path) -> Result<String> {
    let bytes = std::fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    let digest = Sha256::digest(&bytes);
    Ok(digest.iter().fold(String::new(), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    }))
}

pub fn collect(args: CollectArgs) -> Result<()> {
    let kind: EnvKind = args.env.into();
    let echo = format!(
        "pimrl collect --env {} --transitions {} --seed {} --out {}",
        kind.as_str(),
        args.transitions,
        args.seed,
        args.out.display()
    );
    println!("# {echo}");

    if args.transitions == 0 {
        bail!("--transitions must be >= 1");
    }
    let spec = EnvSpec::new(kind);
    let dataset = collect_dataset(
        spec,
        BehaviorPolicy::uniform_random(args.seed),
        args.transitions,
        args.seed,
    );
    if let Some(parent) = args.out.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    write_dataset(&dataset, &args.out)?;
    println!(
        "wrote {}: {} transitions, sha256 {}",
        args.out.display(),
        dataset.len(),
        sha256_hex(&args.out)?
    );
    Ok(())
}

struct TrainSetup {
    config: PimConfig,
    echo: String,
}

fn train_setup(args: &TrainArgs) -> TrainSetup {
    let mut echo = format!(
        "pimrl train{} --cores {} --dtype {} --sampling {} --stride {} --tau {} --episodes {} \
         --alpha {} --gamma {} --epsilon {} --scale-factor {} --algo {} --mode {} --seed {} --out {}",
        args.dataset.iter().map(|p| format!(" --dataset {}", p.display())).collect::<String>(),
        args.cores,
        match args.dtype {
            crate::DtypeArg::Fp32 => "fp32",
            crate::DtypeArg::Int32 => "int32",
        },
        args.sampling.to_strategy(args.stride).as_str(),
        args.stride,
        args.tau,
        args.episodes,
        args.alpha,
        args.gamma,
        args.epsilon,
        args.scale_factor,
        pimrl_core::Algo::from(args.algo).as_str(),
        Mode::from(args.mode).as_str(),
        args.seed,
        args.out.display(),
    );
    if args.no_broadcast {
        echo.push_str(" --no-broadcast");
    }
    if args.descale_every_update {
        echo.push_str(" --descale-every-update");
    }

    let config = PimConfig {
        n_cores: args.cores,
        dtype: args.dtype.into(),
        algo: args.algo.into(),
        strategy: args.sampling.to_strategy(args.stride),
        hyper: Hyperparams {
            alpha: args.alpha,
            gamma: args.gamma,
            episodes: args.episodes,
            scale_factor: args.scale_factor,
            epsilon: args.epsilon,
        },
        tau: args.tau,
        mode: args.mode.into(),
        seed: args.seed,
        broadcast_after_sync: !args.no_broadcast,
        descale_every_update: args.descale_every_update,
        ..PimConfig::default()
    };
    TrainSetup { config, echo }
}

const TRAIN_CSV_HEADER: &str =
    "phase,seconds,bytes,comm_rounds,cores,dtype,algo,sampling,episodes,tau,seed";

fn train_csv(echo: &str, config: &PimConfig, phases: &PhaseBreakdown, comm_rounds: u64) -> String {
    let mut csv = format!("# {echo}\n{TRAIN_CSV_HEADER}\n");
    let rows: [(&str, &Phase); 4] = [
        ("cpu_to_pim", &phases.cpu_to_pim),
        ("kernel", &phases.kernel),
        ("inter_core", &phases.inter_core),
        ("pim_to_cpu", &phases.pim_to_cpu),
    ];
    for (name, phase) in rows {
        let _ = writeln!(
            csv,
            "{name},{},{},{comm_rounds},{},{},{},{},{},{},{}",
            phase.seconds,
            phase.bytes,
            config.n_cores,
            config.dtype.as_str(),
            config.algo.as_str(),
            config.strategy.as_str(),
            config.hyper.episodes,
            config.tau,
            config.seed,
        );
    }
    csv
}

/// Split one dataset into `n` per-agent datasets along chunk boundaries.
fn split_per_agent(dataset: &Dataset, n: usize) -> Result<Vec<Dataset>> {
    let chunks = partition(dataset, n)?;
    chunks
        .into_iter()
        .map(|c| {
            Dataset::new(dataset.spec(), c.transitions.to_vec(), dataset.seed())
                .context("per-agent split produced an invalid dataset")
        })
        .collect()
}

pub fn train(args: TrainArgs) -> Result<()> {
    let TrainSetup { config, echo } = train_setup(&args);
    println!("# {echo}");

    let datasets: Vec<Dataset> = args
        .dataset
        .iter()
        .map(|p| read_dataset(p).map_err(anyhow::Error::from))
        .collect::<Result<_>>()?;

    let csv_path = with_suffix(&args.out, ".csv");
    let (phases, comm_rounds) = match config.mode {
        Mode::SingleTable => {
            if datasets.len() != 1 {
                bail!("single-table mode takes exactly one --dataset");
            }
            let out = run_training(&config, &datasets[0])?;
            let table_path = with_suffix(&args.out, ".qtable");
            write_qtable(&out.qtable, &table_path)?;
            println!("wrote {}", table_path.display());
            (out.report.phases, out.report.comm_rounds)
        }
        Mode::MultiAgent => {
            let per_agent = if datasets.len() == 1 {
                split_per_agent(&datasets[0], config.n_cores)?
            } else {
                datasets
            };
            let out = run_multi_agent(&config, &per_agent)?;
            for (k, table) in out.qtables.iter().enumerate() {
                let table_path = with_suffix(&args.out, &format!(".agent{k}.qtable"));
                write_qtable(table, &table_path)?;
            }
            println!("wrote {} agent tables", out.qtables.len());
            (out.report.phases, out.report.comm_rounds)
        }
    };

    write_file(&csv_path, &train_csv(&echo, &config, &phases, comm_rounds))?;
    println!("wrote {}", csv_path.display());
    println!(
        "simulated seconds: cpu_to_pim={} kernel={} inter_core={} pim_to_cpu={} total={} (comm_rounds={comm_rounds})",
        phases.cpu_to_pim.seconds,
        phases.kernel.seconds,
        phases.inter_core.seconds,
        phases.pim_to_cpu.seconds,
        phases.total_seconds(),
    );
    Ok(())
}

pub fn eval(args: EvalArgs) -> Result<()> {
    let kind: EnvKind = args.env.into();
    let spec = EnvSpec::new(kind);
    let max_steps = args.max_steps.unwrap_or_else(|| default_max_steps(kind));
    let echo = format!(
        "pimrl eval --qtable {} --env {} --episodes {} --max-steps {} --seed {} --out {}",
        args.qtable.display(),
        kind.as_str(),
        args.episodes,
        max_steps,
        args.seed,
        args.out.display(),
    );
    println!("# {echo}");

    if args.episodes == 0 {
        bail!("--episodes must be >= 1");
    }
    let table: QTable = read_qtable(&args.qtable)?;
    if table.n_states() != spec.n_states() as usize
        || table.n_actions() != spec.n_actions() as usize
    {
        bail!(
            "table shape {}x{} does not match {} ({}x{})",
            table.n_states(),
            table.n_actions(),
            kind.as_str(),
            spec.n_states(),
            spec.n_actions()
        );
    }
    let policy = greedy_policy(&table);
    let report = evaluate(&policy, spec, args.episodes, max_steps, args.seed);

    let csv = format!(
        "# {echo}\nenv,episodes,max_steps,seed,mean_reward,std_reward\n{},{},{},{},{},{}\n",
        kind.as_str(),
        args.episodes,
        max_steps,
        args.seed,
        report.mean_reward,
        report.std_dev,
    );
    write_file(&args.out, &csv)?;
    println!(
        "mean_reward {} (std {}) over {} episodes",
        report.mean_reward, report.std_dev, report.episodes
    );
    Ok(())
}

pub fn sweep(args: SweepArgs) -> Result<()> {
    let mut cores = args.cores.clone();
    cores.sort_unstable();
    cores.dedup();
    let echo = format!(
        "pimrl sweep --dataset {} --cores {} --dtype {} --sampling {} --stride {} --tau {} \
         --episodes {} --alpha {} --gamma {} --epsilon {} --scale-factor {} --algo {} --seed {} --out {}",
        args.dataset.display(),
        cores.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(","),
        match args.dtype {
            crate::DtypeArg::Fp32 => "fp32",
            crate::DtypeArg::Int32 => "int32",
        },
        args.sampling.to_strategy(args.stride).as_str(),
        args.stride,
        args.tau,
        args.episodes,
        args.alpha,
        args.gamma,
        args.epsilon,
        args.scale_factor,
        pimrl_core::Algo::from(args.algo).as_str(),
        args.seed,
        args.out.display(),
    );
    println!("# {echo}");

    let dataset = read_dataset(&args.dataset)?;
    let mut csv = format!(
        "# {echo}\ncores,cpu_to_pim_s,kernel_s,inter_core_s,pim_to_cpu_s,total_s,kernel_speedup,total_speedup,comm_rounds,dtype,algo,sampling,episodes,tau,seed\n"
    );
    let mut base: Option<(f64, f64)> = None;
    for &n_cores in &cores {
        let config = PimConfig {
            n_cores,
            dtype: args.dtype.into(),
            algo: args.algo.into(),
            strategy: args.sampling.to_strategy(args.stride),
            hyper: Hyperparams {
                alpha: args.alpha,
                gamma: args.gamma,
                episodes: args.episodes,
                scale_factor: args.scale_factor,
                epsilon: args.epsilon,
            },
            tau: args.tau,
            seed: args.seed,
            ..PimConfig::default()
        };
        let out = run_training(&config, &dataset)?;
        let phases = out.report.phases;
        let total = phases.total_seconds();
        let (base_kernel, base_total) = *base.get_or_insert((phases.kernel.seconds, total));
        let _ = writeln!(
            csv,
            "{n_cores},{},{},{},{},{total},{},{},{},{},{},{},{},{},{}",
            phases.cpu_to_pim.seconds,
            phases.kernel.seconds,
            phases.inter_core.seconds,
            phases.pim_to_cpu.seconds,
            base_kernel / phases.kernel.seconds,
            base_total / total,
            out.report.comm_rounds,
            config.dtype.as_str(),
            config.algo.as_str(),
            config.strategy.as_str(),
            config.hyper.episodes,
            config.tau,
            config.seed,
        );
        println!(
            "cores {n_cores}: kernel {}s, total {}s",
            phases.kernel.seconds, total
        );
    }
    write_file(&args.out, &csv)?;
    println!("wrote {}", args.out.display());
    Ok(())
}
