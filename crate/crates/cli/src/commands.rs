use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use rem_core::diagnostics::{adequacy_report, rank_ecdf, residual_histogram, surprise_events, SurpriseRule};
use rem_core::io::{read_actor_covariate, read_dyad_covariate, read_edgelist, write_edgelist, write_matrix};
use rem_core::summary::format_summary;
use rem_core::{
    aggregate_sociomatrix, simulate_history, validate_covariates, CovariateSet, EffectKind, EffectSpecification,
    EventHistory, FitOptions, FitResult, RemError, SimulationConfig, StopRule, Timing,
};
use serde::{Deserialize, Serialize};

use crate::config::{output_dir, split_effects, FileConfig};
use crate::{CliError, CompareArgs, DiagnoseArgs, FitArgs, ModelArgs, SimulateArgs};

/// Everything `diagnose` needs to reproduce a fit's context.
#[derive(Debug, Serialize, Deserialize)]
pub struct FitArtifact {
    pub history: EventHistory,
    pub spec: EffectSpecification,
    pub covariates: CovariateSet,
    pub fit: FitResult,
}

#[derive(Debug, Serialize)]
struct Provenance<'a> {
    n: usize,
    effects: Vec<String>,
    theta: &'a [f64],
    stop: StopRule,
    seed: u64,
    events: usize,
    version: &'static str,
}

type Res<T> = Result<T, CliError>;

fn at(path: &Path) -> impl Fn(RemError) -> CliError + '_ {
    move |e| match CliError::from(e) {
        CliError::Input(m) => CliError::Input(format!("{}: {m}", path.display())),
        other => other,
    }
}

fn create(dir: &Path, name: &str) -> Res<BufWriter<File>> {
    let path = dir.join(name);
    File::create(&path)
        .map(BufWriter::new)
        .map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Res<()> {
    let mut w = create(dir, name)?;
    serde_json::to_writer_pretty(&mut w, value).map_err(|e| CliError::input(e.to_string()))?;
    writeln!(w).and_then(|_| w.flush()).map_err(io_err)
}

fn io_err(e: std::io::Error) -> CliError {
    CliError::input(e.to_string())
}

fn prepare_out(dir: &Path) -> Res<()> {
    fs::create_dir_all(dir).map_err(|e| CliError::input(format!("{}: {e}", dir.display())))
}

/// Model inputs after merging the config file with flags.
struct Resolved {
    file: FileConfig,
    n: usize,
    spec: EffectSpecification,
    bindings: Vec<(String, PathBuf)>,
    out: PathBuf,
}

fn resolve_model(args: ModelArgs) -> Res<Resolved> {
    let file = match &args.config {
        Some(p) => FileConfig::load(p)?,
        None => FileConfig::default(),
    };
    let n = args.n.or(file.n).ok_or_else(|| CliError::input("--n is required"))?;
    let effects = if args.effects.is_empty() {
        file.effects.clone().unwrap_or_default()
    } else {
        split_effects(&args.effects)
    };
    if effects.is_empty() {
        return Err(CliError::input("--effects is required"));
    }
    let mut spec = EffectSpecification::parse(&effects)?;
    if let Some(g) = args.group_actor.or(file.group_actor) {
        if g == 0 || g > n {
            return Err(CliError::input(format!("--group-actor {g} outside 1..={n}")));
        }
        spec = spec.with_group_actor(g - 1);
    }
    let mut bindings: Vec<(String, PathBuf)> = file.covariates.clone().into_iter().collect();
    for (name, path) in args.covariates {
        bindings.retain(|(k, _)| *k != name);
        bindings.push((name, path));
    }
    let out = output_dir(args.out, file.out.clone());
    Ok(Resolved {
        file,
        n,
        spec,
        bindings,
        out,
    })
}

/// Reads each bound covariate file; entries used by `CovEvent` are dyadic.
fn load_covariates(spec: &EffectSpecification, n: usize, bindings: &[(String, PathBuf)]) -> Res<CovariateSet> {
    let mut set = CovariateSet::new();
    for (name, path) in bindings {
        let dyadic = spec
            .entries
            .iter()
            .any(|e| e.kind == EffectKind::CovEvent && e.binding_name() == *name);
        let cov = if dyadic {
            read_dyad_covariate(path, n)
        } else {
            read_actor_covariate(path)
        }
        .map_err(at(path))?;
        set.insert(name.clone(), cov);
    }
    Ok(set)
}

fn parse_timing(raw: Option<&str>) -> Res<Timing> {
    raw.unwrap_or("ordinal").parse::<Timing>().map_err(CliError::from)
}

pub fn fit(args: FitArgs) -> Res<()> {
    let r = resolve_model(args.model)?;
    let edgelist = args
        .edgelist
        .or(r.file.edgelist.clone())
        .ok_or_else(|| CliError::input("--edgelist is required"))?;
    let timing = parse_timing(args.timing.as_deref().or(r.file.timing.as_deref()))?;
    let history = read_edgelist(&edgelist, r.n, timing).map_err(at(&edgelist))?;
    let covariates = validate_covariates(load_covariates(&r.spec, r.n, &r.bindings)?, &history)?;
    let mut opts = FitOptions::new(timing);
    if let Some(m) = args.max_iter.or(r.file.max_iter) {
        opts.max_iter = m;
    }
    if let Some(t) = args.tol.or(r.file.tol) {
        opts.tolerance = t;
    }

    let (fit, failure) = match rem_core::fit(&history, &r.spec, &covariates, &opts) {
        Ok(f) => (f, None),
        Err(RemError::NotConverged(best)) => {
            let msg = RemError::NotConverged(best.clone()).to_string();
            (*best, Some(CliError::Numerical(msg)))
        }
        Err(e) => return Err(e.into()),
    };

    prepare_out(&r.out)?;
    let summary = format_summary(&fit);
    let mut w = create(&r.out, "summary.txt")?;
    w.write_all(summary.as_bytes()).and_then(|_| w.flush()).map_err(io_err)?;
    print!("{summary}");

    let mut w = create(&r.out, "residuals.csv")?;
    writeln!(w, "event,sender,receiver,residual").map_err(io_err)?;
    for (i, (e, d)) in history.events().iter().zip(&fit.residuals).enumerate() {
        writeln!(w, "{},{},{},{}", i + 1, e.sender + 1, e.receiver + 1, d).map_err(io_err)?;
    }
    w.flush().map_err(io_err)?;

    let mut w = create(&r.out, "ranks.csv")?;
    writeln!(w, "event,rank,sender_match,receiver_match,exact_match").map_err(io_err)?;
    for i in 0..fit.events {
        let [s, rc] = fit.predicted_match[i];
        writeln!(w, "{},{},{},{},{}", i + 1, fit.observed_ranks[i], s, rc, fit.exact_match[i]).map_err(io_err)?;
    }
    w.flush().map_err(io_err)?;

    write_json(
        &r.out,
        "fit.json",
        &FitArtifact {
            history,
            spec: r.spec,
            covariates,
            fit,
        },
    )?;
    failure.map_or(Ok(()), Err)
}

pub fn diagnose(args: DiagnoseArgs) -> Res<()> {
    let text =
        fs::read_to_string(&args.fit).map_err(|e| CliError::input(format!("{}: {e}", args.fit.display())))?;
    let art: FitArtifact =
        serde_json::from_str(&text).map_err(|e| CliError::input(format!("{}: {e}", args.fit.display())))?;
    let fit = &art.fit;
    let rule = match (args.rank_quantile, args.residual_threshold) {
        (Some(q), _) => SurpriseRule::Rank { quantile: q },
        (None, Some(t)) => SurpriseRule::Residual { threshold: Some(t) },
        (None, None) if fit.mode == Timing::Ordinal => SurpriseRule::Residual { threshold: None },
        (None, None) => SurpriseRule::Rank { quantile: 0.05 },
    };
    if let SurpriseRule::Rank { quantile } = rule {
        if !(quantile > 0.0 && quantile < 1.0) {
            return Err(CliError::input(format!("--rank-quantile {quantile} must lie in (0, 1)")));
        }
    }
    let out = output_dir(args.out, None);
    prepare_out(&out)?;

    let report = adequacy_report(fit);
    write_json(&out, "adequacy.json", &report)?;

    let mut w = create(&out, "residual_hist.csv")?;
    writeln!(w, "lower,upper,count").map_err(io_err)?;
    for b in residual_histogram(&fit.residuals) {
        writeln!(w, "{},{},{}", b.lower, b.upper, b.count).map_err(io_err)?;
    }
    w.flush().map_err(io_err)?;

    let mut w = create(&out, "rank_ecdf.csv")?;
    writeln!(w, "rank_fraction,ecdf").map_err(io_err)?;
    for (x, y) in rank_ecdf(&fit.observed_ranks, fit.actors) {
        writeln!(w, "{x},{y}").map_err(io_err)?;
    }
    w.flush().map_err(io_err)?;

    let surprising = surprise_events(&art.history, fit, rule)?;
    let mut w = create(&out, "surprise_edgelist.csv")?;
    write_edgelist(&surprising, &mut w)?;
    w.flush().map_err(io_err)?;
    let mut w = create(&out, "surprise_sociomatrix.csv")?;
    write_matrix(&aggregate_sociomatrix(&surprising), &mut w)?;
    w.flush().map_err(io_err)?;

    println!(
        "{} of {} events flagged; any-match {:.7}, all-match {:.7}",
        surprising.len(),
        fit.events,
        report.any_match,
        report.all_match
    );
    Ok(())
}

fn read_theta(path: &Path) -> Res<Vec<f64>> {
    let text = fs::read_to_string(path).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    if text.trim_start().starts_with('[') {
        return serde_json::from_str(&text).map_err(|e| CliError::input(format!("{}: {e}", path.display())));
    }
    text.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<f64>()
                .map_err(|_| CliError::input(format!("{}: `{s}` is not a number", path.display())))
        })
        .collect()
}

pub fn simulate(args: SimulateArgs) -> Res<()> {
    let r = resolve_model(args.model)?;
    let events = args.events.or(if args.horizon.is_none() { r.file.events } else { None });
    let horizon = args.horizon.or(if args.events.is_none() { r.file.horizon } else { None });
    let stop = match (events, horizon) {
        (Some(_), Some(_)) => return Err(CliError::input("give either an event count or a horizon, not both")),
        (Some(m), None) => StopRule::Events(m),
        (None, Some(t)) => StopRule::Horizon(t),
        (None, None) => return Err(CliError::input("one of --events or --horizon is required")),
    };
    let theta_path = args
        .theta
        .or(r.file.theta.clone())
        .ok_or_else(|| CliError::input("--theta is required"))?;
    let theta = read_theta(&theta_path)?;
    let seed = args.seed.or(r.file.seed).unwrap_or(0);
    let covariates = load_covariates(&r.spec, r.n, &r.bindings)?;
    let cfg = SimulationConfig {
        n: r.n,
        theta,
        spec: r.spec,
        covariates,
        stop,
        seed,
    };
    let history = simulate_history(&cfg)?;

    prepare_out(&r.out)?;
    let mut w = create(&r.out, "edgelist.csv")?;
    if history.is_empty() {
        writeln!(w, "t,s,r").map_err(io_err)?;
    } else {
        write_edgelist(&history, &mut w)?;
    }
    w.flush().map_err(io_err)?;
    write_json(
        &r.out,
        "provenance.json",
        &Provenance {
            n: cfg.n,
            effects: cfg.spec.names(),
            theta: &cfg.theta,
            stop,
            seed,
            events: history.len(),
            version: env!("CARGO_PKG_VERSION"),
        },
    )?;
    println!("simulated {} events", history.len());
    Ok(())
}

pub fn compare(args: CompareArgs) -> Res<()> {
    let load = |p: &Path| -> Res<FitResult> {
        let text = fs::read_to_string(p).map_err(|e| CliError::input(format!("{}: {e}", p.display())))?;
        let art: FitArtifact =
            serde_json::from_str(&text).map_err(|e| CliError::input(format!("{}: {e}", p.display())))?;
        Ok(art.fit)
    };
    let (a, b) = (load(&args.first)?, load(&args.second)?);
    let c = rem_core::compare(&a, &b)?;
    println!("BIC first {:.3}  second {:.3}  difference {:.3}  preferred {:?}", a.bic, b.bic, c.bic_difference, c.preferred);
    if let Some(dir) = args.out {
        prepare_out(&dir)?;
        write_json(&dir, "comparison.json", &c)?;
    }
    Ok(())
}
