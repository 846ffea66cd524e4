use std::path::PathBuf;

use lacelab::lace::{
    all_laces, check_recursion_identity, compatible_edges, enumerate_laces, j_weight_bruteforce, j_weight_lace, Path,
};
use lacelab::mc::{fill_standard_normal, sample_rng};
use lacelab::saw::{
    cross_check_recursion, estimate_cn_all, estimate_endpoint_density, estimate_pi_hat, estimate_pi_moments,
    gamma_domination, CrossCheckConfig, SawParams, PI_MAX_M,
};
use lacelab::sequence::solve;
use lacelab::solver::{profile_rows, run_recursion, BFamilySpec, RunSummary, SolverConfig};
use lacelab::spectral::{check_dimension, RadialGrid};
use lacelab::Exec;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{apply, CltConfig, FamilyConfig, FamilyKind, FileConfig, Format, LaceConfig, SawConfig, SeqConfig};
use crate::output::{Cell, Emitter};
use crate::{row, Cli, Command, FamilyArgs, Failure, LaceAction, SawAction};

/// Hard statistical failure threshold for the cross-check.
const Z_FAIL: f64 = 5.0;

struct Context {
    out: PathBuf,
    format: Format,
    seed: u64,
    threads: Option<usize>,
    dry_run: bool,
}

impl Context {
    fn manifest(&self, command: &str, params: &impl Serialize) -> Value {
        json!({
            "tool": "lacelab",
            "version": env!("CARGO_PKG_VERSION"),
            "command": command,
            "seed": self.seed,
            "format": self.format,
            "threads": self.threads,
            "params": params,
        })
    }

    /// Prints the manifest on a dry run, otherwise opens the output directory.
    fn emitter(&self, manifest: Value) -> Result<Option<Emitter>, Failure> {
        if self.dry_run {
            println!("{}", serde_json::to_string_pretty(&manifest).map_err(anyhow::Error::from)?);
            return Ok(None);
        }
        let mut e = Emitter::new(&self.out, self.format, manifest)?;
        e.manifest()?;
        Ok(Some(e))
    }
}

fn config_err(msg: impl Into<String>) -> Failure {
    Failure::Config(msg.into())
}

pub fn run(cli: Cli) -> Result<(), Failure> {
    let mut file = match &cli.common.config {
        Some(p) => FileConfig::load(p)?,
        None => FileConfig::default(),
    };
    let ctx = Context {
        out: cli.common.out.clone().or(file.out.take()).unwrap_or_else(|| PathBuf::from("out")),
        format: cli.common.format.or(file.format).unwrap_or(Format::Csv),
        seed: cli.common.seed.or(file.seed).unwrap_or(1),
        threads: cli.common.threads.or(file.threads),
        dry_run: cli.common.dry_run,
    };
    if let Some(t) = ctx.threads {
        if t == 0 {
            return Err(config_err("--threads must be >= 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| Failure::Other(e.into()))?;
    }
    let written = match cli.command {
        Command::Seq(a) => {
            let mut cfg = file.seq;
            apply!(cfg, a; d, lambda, n_max, horizon);
            cmd_seq(&ctx, family(file.family, &a.family), cfg)?
        }
        Command::VerifyClt(a) => {
            let mut cfg = file.clt;
            apply!(cfg, a; d, lambda, epsilon, n_max, n_list);
            cmd_verify_clt(&ctx, family(file.family, &a.family), cfg)?
        }
        Command::Lace { action } => {
            let (name, a) = match &action {
                LaceAction::Enumerate(a) => ("enumerate", a),
                LaceAction::Check(a) => ("check", a),
                LaceAction::Oracle(a) => ("oracle", a),
            };
            let mut cfg = file.lace;
            apply!(cfg, a; n_bonds, n, paths, d, lambdas, rho);
            cmd_lace(&ctx, name, cfg)?
        }
        Command::Saw { action } => {
            let (name, a) = match &action {
                SawAction::Cn(a) => ("cn", a),
                SawAction::Pi(a) => ("pi", a),
                SawAction::Density(a) => ("density", a),
                SawAction::Crosscheck(a) => ("crosscheck", a),
            };
            let mut cfg = file.saw;
            apply!(cfg, a; d, lambda, rho, n, n_samples, k_max, k_points, r_min, r_max, r_points, n_batches, fit_m, k_cut);
            if a.m_max.is_some() {
                cfg.m_max = a.m_max;
            }
            if a.bandwidth.is_some() {
                cfg.bandwidth = a.bandwidth;
            }
            cmd_saw(&ctx, name, cfg)?
        }
    };
    for p in written {
        println!("{}", p.display());
    }
    Ok(())
}

fn family(mut cfg: FamilyConfig, a: &FamilyArgs) -> FamilyConfig {
    if let Some(k) = a.kind {
        cfg.kind = k;
    }
    apply!(cfg, a; a, k);
    cfg
}

fn build_family(f: &FamilyConfig, d: usize) -> Result<BFamilySpec, Failure> {
    check_dimension(d)?;
    Ok(match f.kind {
        FamilyKind::PowerLaw => BFamilySpec::power_law_preset(f.a, d)?,
        FamilyKind::Saw => BFamilySpec::saw_preset(f.k, d)?,
    })
}

fn check_lambda(lambda: f64) -> Result<(), Failure> {
    if lambda.is_finite() && lambda >= 0.0 {
        Ok(())
    } else {
        Err(config_err(format!("lambda must be finite and >= 0, got {lambda}")))
    }
}

fn cmd_seq(ctx: &Context, fam: FamilyConfig, cfg: SeqConfig) -> Result<Vec<PathBuf>, Failure> {
    check_lambda(cfg.lambda)?;
    if cfg.n_max == 0 {
        return Err(config_err("n_max must be >= 1"));
    }
    let spec = build_family(&fam, cfg.d)?;
    let manifest = ctx.manifest("seq", &json!({ "family": fam, "seq": cfg }));
    let Some(mut out) = ctx.emitter(manifest)? else { return Ok(vec![]) };
    let scalars = spec.scalars(cfg.lambda, cfg.horizon.max(cfg.n_max))?;
    let sol = solve(&scalars)?;
    let rows: Vec<Vec<Cell>> = (0..=cfg.n_max).map(|n| row![n, sol.c[n], sol.a[n]]).collect();
    out.table("seq", &["n", "c_n", "a_n"], &rows)?;
    out.summary(
        "seq_summary",
        &json!({
            "mu": sol.mu,
            "alpha": sol.alpha,
            "delta": sol.delta,
            "residual_mu": sol.residual_mu,
            "mu_tail": sol.mu_tail,
            "delta_tail": sol.delta_tail,
            "iterations": sol.iterations,
            "smallness_ok": sol.smallness_ok,
            "horizon": sol.n_max(),
        }),
    )?;
    Ok(out.written().to_vec())
}

fn cmd_verify_clt(ctx: &Context, fam: FamilyConfig, cfg: CltConfig) -> Result<Vec<PathBuf>, Failure> {
    check_lambda(cfg.lambda)?;
    if cfg.n_list.is_empty() || cfg.n_list.iter().any(|&n| n == 0 || n > cfg.n_max) {
        return Err(config_err(format!("n_list entries must lie in 1..={}", cfg.n_max)));
    }
    let mut solver = SolverConfig::new(build_family(&fam, cfg.d)?, cfg.lambda, cfg.n_max);
    solver.epsilon = cfg.epsilon;
    solver.exec = Exec::default();
    solver.validate()?;
    let manifest = ctx.manifest("verify-clt", &json!({ "family": fam, "clt": cfg }));
    let Some(mut out) = ctx.emitter(manifest)? else { return Ok(vec![]) };
    let run = run_recursion(solver)?;
    let mut rows = Vec::new();
    for &n in &cfg.n_list {
        for r in profile_rows(&run, n)? {
            rows.push(row![r.n, r.radius, r.c_density, r.gauss_ref, r.error, r.bound, r.ratio]);
        }
    }
    out.table("clt_profiles", &["n", "radius", "c_density", "gauss_ref", "error", "bound", "ratio"], &rows)?;
    out.summary("clt_summary", &RunSummary::new(&run, &cfg.n_list)?)?;
    Ok(out.written().to_vec())
}

fn random_path(d: usize, n: usize, seed: u64, index: u64) -> Result<Path, Failure> {
    let mut rng = sample_rng(seed, index);
    let mut inc = vec![0.0; n * d];
    fill_standard_normal(&mut rng, &mut inc);
    Ok(Path::from_increments(d, &inc)?)
}

fn join<T: ToString>(xs: impl IntoIterator<Item = T>) -> String {
    xs.into_iter().map(|x| x.to_string()).collect::<Vec<_>>().join(";")
}

fn cmd_lace(ctx: &Context, action: &str, cfg: LaceConfig) -> Result<Vec<PathBuf>, Failure> {
    if cfg.n == 0 {
        return Err(config_err("n must be >= 1"));
    }
    let max_n = if action == "oracle" { 6 } else { 7 };
    if action != "enumerate" {
        if cfg.n > max_n {
            return Err(config_err(format!("lace {action} supports n <= {max_n}, got {}", cfg.n)));
        }
        if cfg.d == 0 || !(cfg.rho > 0.0) || cfg.lambdas.is_empty() || cfg.lambdas.iter().any(|l| !(0.0..=1.0).contains(l)) {
            return Err(config_err("need d >= 1, rho > 0 and lambdas in [0, 1]"));
        }
    } else if cfg.n > 20 {
        return Err(config_err("lace enumerate supports n <= 20"));
    }
    let manifest = ctx.manifest(&format!("lace {action}"), &cfg);
    let Some(mut out) = ctx.emitter(manifest)? else { return Ok(vec![]) };
    let n = cfg.n as u32;
    match action {
        "enumerate" => {
            let laces = if cfg.n_bonds == 0 { all_laces(n) } else { enumerate_laces(cfg.n_bonds, n) };
            let mut rows = Vec::new();
            for (i, l) in laces.iter().enumerate() {
                let compat = compatible_edges(&l.graph())?;
                let edges = join(l.edges().iter().map(|e| format!("{}-{}", e.s, e.t)));
                rows.push(row![i, l.n_bonds(), cfg.n, join(l.m()), edges, compat.len()]);
            }
            out.table("laces", &["index", "n_bonds", "n", "m", "edges", "compatible_edges"], &rows)?;
            out.summary("laces_summary", &json!({ "count": laces.len() }))?;
        }
        "check" => {
            let mut rows = Vec::new();
            let mut worst = 0.0f64;
            for &lambda in &cfg.lambdas {
                for i in 0..cfg.paths {
                    let p = random_path(cfg.d, cfg.n, ctx.seed, i)?;
                    let r = check_recursion_identity(&p, cfg.n, lambda, cfg.rho)?;
                    worst = worst.max(r);
                    rows.push(row![i, cfg.n, lambda, r]);
                }
            }
            out.table("recursion_check", &["path", "n", "lambda", "residual"], &rows)?;
            out.summary("recursion_check_summary", &json!({ "max_residual": worst }))?;
        }
        _ => {
            let mut rows = Vec::new();
            let mut worst = 0.0f64;
            for &lambda in &cfg.lambdas {
                for i in 0..cfg.paths {
                    let p = random_path(cfg.d, cfg.n, ctx.seed, i)?;
                    for m in 1..=cfg.n {
                        let brute = j_weight_bruteforce(&p, m, lambda, cfg.rho)?;
                        let laced = j_weight_lace(&p, m, lambda, cfg.rho, usize::MAX)?;
                        worst = worst.max((brute - laced).abs());
                        rows.push(row![i, m, lambda, brute, laced, (brute - laced).abs()]);
                    }
                }
            }
            out.table("j_oracle", &["path", "n", "lambda", "j_bruteforce", "j_lace", "abs_diff"], &rows)?;
            out.summary("j_oracle_summary", &json!({ "max_abs_diff": worst }))?;
        }
    }
    Ok(out.written().to_vec())
}

const SAW_COLUMNS: [&str; 7] = ["observable", "n_or_m", "k_or_radius", "mean", "stderr", "n_samples", "seed"];

fn uniform(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    (0..points).map(|i| lo + (hi - lo) * i as f64 / (points - 1) as f64).collect()
}

fn cmd_saw(ctx: &Context, action: &str, cfg: SawConfig) -> Result<Vec<PathBuf>, Failure> {
    let params =
        SawParams { d: cfg.d, lambda: cfg.lambda, rho: cfg.rho, n: cfg.n, seed: ctx.seed, n_samples: cfg.n_samples };
    params.validate()?;
    let m_max = cfg.m_max.unwrap_or(cfg.n.min(PI_MAX_M));
    match action {
        "pi" if m_max == 0 || m_max > PI_MAX_M => {
            return Err(config_err(format!("m_max must lie in 1..={PI_MAX_M}")));
        }
        "pi" | "crosscheck" if !(cfg.k_max > 0.0) || cfg.k_points < 2 => {
            return Err(config_err("need k_max > 0 and k_points >= 2"));
        }
        "density" if !(cfg.r_min > 0.0 && cfg.r_max > cfg.r_min) || cfg.r_points < 2 => {
            return Err(config_err("need 0 < r_min < r_max and r_points >= 2"));
        }
        "density" if cfg.bandwidth.is_some_and(|h| !(h > 0.0)) => {
            return Err(config_err("bandwidth must be > 0"));
        }
        "crosscheck" if cfg.n > PI_MAX_M || cfg.n_batches < 2 || cfg.n_batches as u64 > cfg.n_samples => {
            return Err(config_err(format!("crosscheck needs n <= {PI_MAX_M} and 2 <= n_batches <= n_samples")));
        }
        "crosscheck" if cfg.fit_m == 0 || cfg.fit_m > cfg.n || !(cfg.k_cut > 0.0) => {
            return Err(config_err("crosscheck needs 1 <= fit_m <= n and k_cut > 0"));
        }
        _ => {}
    }
    let manifest = ctx.manifest(&format!("saw {action}"), &cfg);
    let Some(mut out) = ctx.emitter(manifest)? else { return Ok(vec![]) };
    let exec = Exec::default();
    let (seed, ns) = (ctx.seed, cfg.n_samples);
    let est = |obs: &str, n: usize, k: Cell, e: &lacelab::mc::McEstimate| {
        vec![Cell::from(obs), Cell::from(n), k, Cell::from(e.mean), Cell::from(e.stderr), Cell::from(e.n_samples), Cell::from(seed)]
    };
    match action {
        "cn" => {
            let c = estimate_cn_all(&params, exec)?;
            let rows: Vec<_> = c.iter().enumerate().map(|(i, e)| est("c", i + 1, Cell::Empty, e)).collect();
            out.table("saw_cn", &SAW_COLUMNS, &rows)?;
        }
        "pi" => {
            let k_nodes = uniform(0.0, cfg.k_max, cfg.k_points);
            let mut rows = Vec::new();
            for m in 1..=m_max {
                let (pi, pi_bar) = estimate_pi_moments(&params, m, exec)?;
                rows.push(est("pi", m, Cell::Empty, &pi));
                rows.push(est("pi_bar", m, Cell::Empty, &pi_bar));
                for (k, e) in k_nodes.iter().zip(estimate_pi_hat(&params, m, &k_nodes, exec)?) {
                    rows.push(est("pi_hat", m, Cell::from(*k), &e));
                }
            }
            out.table("saw_pi", &SAW_COLUMNS, &rows)?;
        }
        "density" => {
            let radii = uniform(cfg.r_min, cfg.r_max, cfg.r_points);
            let d = estimate_endpoint_density(&params, &radii, cfg.bandwidth, exec)?;
            let rows: Vec<_> = d.radii.iter().zip(&d.values).map(|(r, e)| est("density", cfg.n, Cell::from(*r), e)).collect();
            out.table("saw_density", &SAW_COLUMNS, &rows)?;
            out.summary("saw_density_summary", &json!({ "bandwidth": d.bandwidth }))?;
        }
        _ => {
            let mut cc = CrossCheckConfig::new(cfg.n);
            cc.grid = RadialGrid::uniform(cfg.k_max, cfg.k_points)?.shared();
            cc.n_batches = cfg.n_batches;
            let r = cross_check_recursion(&params, &cc, exec)?;
            let mut rows = Vec::new();
            for n in 1..=cfg.n {
                rows.push(est("c_mc", n, Cell::Empty, &r.c_mc[n - 1]));
                rows.push(row!["c_solver", n, Cell::Empty, r.c_solver[n - 1], Cell::Empty, ns, seed]);
                rows.push(est("c_diff", n, Cell::Empty, &r.c_diff[n - 1]));
                rows.push(est("pi", n, Cell::Empty, &r.pi[n - 1]));
                rows.push(est("pi_bar", n, Cell::Empty, &r.pi_bar[n - 1]));
                for (k, e) in r.k_nodes.iter().zip(&r.b_hat[n - 1]) {
                    rows.push(est("b_hat", n, Cell::from(*k), e));
                }
            }
            for p in &r.profiles {
                rows.push(est("profile_mc", p.n, Cell::from(p.k), &p.mc));
                rows.push(row!["profile_solver", p.n, p.k, p.solver, Cell::Empty, ns, seed]);
            }
            out.table("saw_crosscheck", &SAW_COLUMNS, &rows)?;
            let dom = gamma_domination(&r, cfg.fit_m, cfg.k_cut)?;
            let (zc, zp) = (r.max_abs_z_c(), r.max_abs_z_profile());
            out.summary(
                "saw_zreport",
                &json!({
                    "z_c": r.z_c,
                    "max_abs_z_c": zc,
                    "max_abs_z_profile": zp,
                    "profile_z": r.profiles.iter().map(|p| json!({ "n": p.n, "k": p.k, "z": p.z })).collect::<Vec<_>>(),
                    "mu": r.mu,
                    "alpha": r.alpha,
                    "delta_hat": r.delta_hat,
                    "n_batches": r.n_batches,
                    "gamma_domination": dom,
                }),
            )?;
            if zc.max(zp) > Z_FAIL {
                for p in out.written() {
                    println!("{}", p.display());
                }
                return Err(Failure::Statistical(format!("max |z| = {:.3} > {Z_FAIL}", zc.max(zp))));
            }
        }
    }
    Ok(out.written().to_vec())
}
