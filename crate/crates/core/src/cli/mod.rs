//! Batch front-end: reads a JSON run configuration, dispatches to the library and
//! produces a structured report.

pub mod config;
pub mod report;

use std::path::PathBuf;
use std::sync::Arc;
use std::time::Instant;

use clap::Parser;
use num::complex::Complex64;
use num::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

pub use config::{Command, RunConfig, SCHEMA_VERSION};
pub use report::{emit, parse_report, Check, Format, RunReport, Status};

use crate::arrangements::{eta_top, os_rational, weight_rational, Arrangement};
use crate::connections::{ConnectionParams, KzSystem, RootPairOperators};
use crate::error::{KzError, Result};
use crate::free_kac_moody::{MultiDegree, Side};
use crate::hypergeometric::{params_to_f64, Hypergeometric};
use crate::linalg::{complex_det, condition_number};
use crate::rational::{fmt_q, q, q_to_f64, Q};
use crate::symmetrization::end_to_end;
use crate::weight_modules::{enumerate_basis, DeltaMethod, MuVector};
use config::{build_arrangement, build_mu, build_point, build_second_point, build_setup, check_tol, quadrature_settings, Setup};

#[derive(Debug, Parser)]
#[command(name = "kzd", version, about = "KZ and dynamical connections: exact checks and hypergeometric solutions")]
pub struct Args {
    #[arg(value_enum)]
    pub command: Command,
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    #[arg(long)]
    pub threads: Option<usize>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
}

/// Entry point of the `kzd` binary; returns the process exit code.
pub fn main_with(args: Args) -> i32 {
    let report = match std::fs::read_to_string(&args.config) {
        Err(e) => {
            let mut r = RunReport::new(args.command.name());
            r.fail_with(&KzError::schema("--config", format!("{}: {e}", args.config.display())));
            r
        }
        Ok(text) => match RunConfig::from_json(&text) {
            Err(e) => {
                let mut r = RunReport::new(args.command.name());
                r.fail_with(&e);
                r
            }
            Ok(mut cfg) => {
                cfg.command = Some(args.command);
                if let Some(t) = args.threads {
                    cfg.numeric.threads = Some(t);
                }
                if let Some(t) = args.tol {
                    cfg.numeric.tol = Some(config::Num::Float(t));
                }
                if let Some(s) = args.seed {
                    cfg.numeric.seed = Some(s);
                }
                run(&cfg)
            }
        },
    };
    let out = emit(&report, args.format);
    match &args.out {
        Some(p) => {
            if let Err(e) = std::fs::write(p, &out) {
                eprintln!("kzd: cannot write {}: {e}", p.display());
                return 2;
            }
        }
        None => print!("{out}"),
    }
    report.exit_code()
}

/// Runs the configured command. Errors are recorded in the report.
pub fn run(cfg: &RunConfig) -> RunReport {
    let start = Instant::now();
    let command = cfg.command.unwrap_or(Command::Flatness);
    let mut rep = RunReport::new(command.name());
    let threads = cfg.numeric.threads.unwrap_or(0);
    let result = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| KzError::Domain(format!("thread pool: {e}")))
        .and_then(|pool| pool.install(|| dispatch(command, cfg, &mut rep)));
    match result {
        Ok(()) => rep.finish(),
        Err(e) => rep.fail_with(&e),
    }
    rep.timing_ms = Some(start.elapsed().as_millis() as u64);
    rep
}

fn dispatch(command: Command, cfg: &RunConfig, rep: &mut RunReport) -> Result<()> {
    if command == Command::OsCheck {
        return os_check(cfg, rep);
    }
    let setup = build_setup(cfg)?;
    rep.insert("lambda", setup.lambda.0.clone());
    rep.insert("n", setup.n);
    match command {
        Command::Flatness => flatness(cfg, &setup, rep),
        Command::Solve => solve(cfg, &setup, rep),
        Command::Residuals => residuals(cfg, &setup, rep),
        Command::DetCheck => det_check(cfg, &setup, rep),
        Command::VerifyOperators => verify_operators(cfg, &setup, rep),
        Command::SymmetrizeCheck => symmetrize_check(cfg, &setup, rep),
        Command::OsCheck => unreachable!(),
    }
}

fn rng(cfg: &RunConfig) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(cfg.numeric.seed.unwrap_or(0))
}

fn random_q(r: &mut ChaCha8Rng) -> Q {
    loop {
        let p: i64 = r.gen_range(-23..=23);
        let d: i64 = r.gen_range(1..=13);
        if p != 0 {
            return q(p, d);
        }
    }
}

fn random_mu(setup: &Setup, r: &mut ChaCha8Rng) -> Result<MuVector<Q>> {
    match &setup.sln {
        Some(s) => s.mu_vector(&(0..setup.rank()).map(|_| random_q(r)).collect::<Vec<_>>()),
        None => Ok(MuVector::new(
            (0..setup.rank()).map(|_| random_q(r)).collect(),
            (0..setup.n).map(|_| random_q(r)).collect(),
        )),
    }
}

fn random_point(setup: &Setup, r: &mut ChaCha8Rng) -> Result<ConnectionParams<Q>> {
    let mut z: Vec<Q> = Vec::new();
    while z.len() < setup.n {
        let x = random_q(r);
        if !z.contains(&x) {
            z.push(x);
        }
    }
    Ok(ConnectionParams {
        z,
        mu: random_mu(setup, r)?,
        kappa: random_q(r),
    })
}

fn mu_to_f64(m: &MuVector<Q>) -> MuVector<f64> {
    MuVector::new(m.alpha.iter().map(q_to_f64).collect(), m.lam.iter().map(q_to_f64).collect())
}

fn system(setup: &Setup) -> Result<Arc<KzSystem>> {
    Ok(Arc::new(KzSystem::new(setup.tv.clone(), &setup.lambda, DeltaMethod::Quotient)?))
}

fn required_point(cfg: &RunConfig, setup: &Setup) -> Result<ConnectionParams<Q>> {
    build_point(cfg, setup)?.ok_or_else(|| KzError::schema("z", "missing"))
}

fn flatness(cfg: &RunConfig, setup: &Setup, rep: &mut RunReport) -> Result<()> {
    let sys = system(setup)?;
    let mut r = rng(cfg);
    let given = build_point(cfg, setup)?;
    let extra = cfg.random_points.unwrap_or(if given.is_some() { 0 } else { 20 });
    let dir = |m: &Option<config::MuConfig>, path: &str, r: &mut ChaCha8Rng| match m {
        Some(m) => build_mu(setup, m, path),
        None => random_mu(setup, r),
    };
    let mut points = Vec::new();
    if let Some(p) = given {
        let d1 = dir(&cfg.direction, "direction", &mut r)?;
        let d2 = dir(&cfg.direction2, "direction2", &mut r)?;
        points.push((p, d1, d2, true));
    }
    for _ in 0..extra {
        let p = random_point(setup, &mut r)?;
        let (d1, d2) = (random_mu(setup, &mut r)?, random_mu(setup, &mut r)?);
        points.push((p, d1, d2, false));
    }
    let (mut zz, mut zmu, mut mumu) = ((true, 0.0f64), (true, 0.0f64), (true, 0.0f64));
    let (mut checked, mut skipped) = (0usize, 0usize);
    for (p, d1, d2, configured) in &points {
        match sys.flatness_report(p, d1, d2) {
            Ok(f) => {
                checked += 1;
                for (acc, fam) in [(&mut zz, &f.zz), (&mut zmu, &f.zmu), (&mut mumu, &f.mumu)] {
                    acc.0 &= fam.exact_zero;
                    acc.1 = acc.1.max(fam.max_abs);
                }
            }
            Err(KzError::Resonance { .. }) if !configured => skipped += 1,
            Err(e) => return Err(e),
        }
    }
    rep.push(Check::exact("flatness.kz_kz", zz.0, Some(zz.1)));
    rep.push(Check::exact("flatness.kz_dynamical", zmu.0, Some(zmu.1)));
    rep.push(Check::exact("flatness.dynamical_dynamical", mumu.0, Some(mumu.1)));
    rep.insert("points_checked", checked);
    rep.insert("points_skipped_resonant", skipped);
    rep.insert("dim", sys.dim());
    Ok(())
}

fn complex_rows(m: &crate::linalg::CMatrix) -> Vec<Vec<[f64; 2]>> {
    m.to_rows()
        .iter()
        .map(|row| row.iter().map(|c| [c.re, c.im]).collect())
        .collect()
}

fn solve(cfg: &RunConfig, setup: &Setup, rep: &mut RunReport) -> Result<()> {
    let p = params_to_f64(&required_point(cfg, setup)?);
    let st = quadrature_settings(cfg)?;
    let hg = Hypergeometric::new(system(setup)?);
    let sol = hg.solution_matrix(&p, &st)?;
    let finite = sol.u.to_rows().iter().flatten().all(|c| c.re.is_finite() && c.im.is_finite());
    rep.push(Check::exact("solution.finite", finite, None));
    let cond = condition_number(&sol.u);
    rep.push(Check::below("solution.condition", cond, 1e12));
    let det: Complex64 = complex_det(&sol.u);
    rep.insert("dim", sol.u.nrows());
    rep.insert("det", [det.re, det.im]);
    rep.insert("quadrature_error", sol.error_estimate);
    rep.insert("cells", sol.cells.iter().map(|c| c.index.to_string()).collect::<Vec<_>>());
    rep.insert("columns", sol.columns.iter().map(|c| c.to_string()).collect::<Vec<_>>());
    rep.insert("schedules", &sol.schedules);
    if cfg.include_matrices {
        rep.insert("u", complex_rows(&sol.u));
    }
    Ok(())
}

fn residuals(cfg: &RunConfig, setup: &Setup, rep: &mut RunReport) -> Result<()> {
    let p = params_to_f64(&required_point(cfg, setup)?);
    let dir = build_mu(setup, cfg.direction.as_ref().ok_or_else(|| KzError::schema("direction", "missing"))?, "direction")?;
    let st = quadrature_settings(cfg)?;
    let thr = check_tol(cfg, 1e-6)?;
    let hg = Hypergeometric::new(system(setup)?);
    let res = hg.residuals(&p, &mu_to_f64(&dir), &st)?;
    for (i, v) in res.kz.iter().enumerate() {
        rep.push(Check::below(format!("residual.kz.{}", i + 1), *v, thr));
    }
    rep.push(Check::below("residual.dynamical", res.dynamical, thr));
    rep.insert("fd_step", res.fd_step);
    rep.insert("fd_order", st.fd_order);
    rep.insert("quadrature_error", res.quadrature_error);
    Ok(())
}

fn det_check(cfg: &RunConfig, setup: &Setup, rep: &mut RunReport) -> Result<()> {
    let p1q = required_point(cfg, setup)?;
    let p2q = build_second_point(cfg, setup, &p1q)?;
    let st = quadrature_settings(cfg)?;
    let thr = check_tol(cfg, 1e-6)?;
    let sys = system(setup)?;
    let hg = Hypergeometric::new(sys.clone());
    let d = hg.determinant_check(&params_to_f64(&p1q), &params_to_f64(&p2q), &st)?;
    rep.push(Check::below("det.log_increment", d.rel_error, thr));
    rep.push(Check::below("det.condition", d.condition.0.max(d.condition.1), 1e12));
    // δ_α = tr Δ_{+,α} vanishes unless α ≤ λ
    let lam = &setup.lambda;
    let outside: Vec<MultiDegree> = (0..lam.rank()).map(|i| lam.add(&MultiDegree::unit(i, lam.rank()))).collect();
    let structural = outside.iter().all(|a| sys.delta_trace(a).is_zero());
    rep.push(Check::exact("det.delta_outside_lambda_zero", structural, None));
    let traces: std::collections::BTreeMap<String, String> = lam
        .nonzero_below()
        .iter()
        .map(|a| (a.to_string(), fmt_q(&sys.delta_trace(a))))
        .collect();
    rep.insert("delta_traces", traces);
    rep.insert("log_increment_numeric", [d.numeric.0, d.numeric.1]);
    rep.insert("log_increment_closed_form", d.closed_form);
    rep.insert("condition", [d.condition.0, d.condition.1]);
    Ok(())
}

fn verify_operators(cfg: &RunConfig, setup: &Setup, rep: &mut RunReport) -> Result<()> {
    let tv = &setup.tv;
    let lam = &setup.lambda;
    let g = tv.shapovalov_gram(lam)?;
    let (mut methods, mut adjoint, mut degenerate) = (true, true, 0usize);
    for alpha in lam.nonzero_below() {
        let dual = tv.delta_plus(&alpha, lam, DeltaMethod::Dual)?;
        let quot = tv.delta_plus(&alpha, lam, DeltaMethod::Quotient)?;
        if dual.degenerate {
            degenerate += 1;
        } else {
            methods &= dual.matrix == quot.matrix;
        }
        let neg = tv.delta_minus(&alpha, lam)?;
        adjoint &= &g * &quot.matrix == &neg * &g;
    }
    rep.push(Check::exact("delta.dual_equals_quotient", methods, None));
    rep.push(Check::exact("delta.shapovalov_adjoint", adjoint, None));
    rep.insert("degenerate_dual_degrees", degenerate);

    let (mut cd, mut cd_count) = (true, 0usize);
    for x in enumerate_basis(lam, setup.n) {
        for a_deg in lam.nonzero_below() {
            let y_deg = lam.checked_sub(&a_deg).expect("a_deg ≤ λ");
            for k in 0..tv.km.lyndon_basis(&a_deg)?.len() {
                let a = tv.km.basis_element(Side::Minus, &a_deg, k)?;
                for y in enumerate_basis(&y_deg, setup.n) {
                    let (l, r) = tv.cd_lemma_sides(&x, &a, &y)?;
                    cd &= l == r;
                    cd_count += 1;
                }
            }
        }
    }
    rep.push(Check::exact("cd_lemma", cd, None).with_detail(format!("{cd_count} instances")));

    let mut k_routes = true;
    for alpha in lam.nonzero_below() {
        let len = tv.km.lyndon_basis(&alpha)?.len();
        for i in 0..len {
            for j in 0..len {
                let x = tv.km.basis_element(Side::Minus, &alpha, i)?;
                let y = tv.km.basis_element(Side::Plus, &alpha, j)?;
                k_routes &= tv.km.invariant_form_k(&x, &y)? == tv.km.invariant_form_k_via_minus(&x, &y)?;
            }
        }
    }
    rep.push(Check::exact("k_form.two_routes", k_routes, None));

    if let Some(s) = &setup.sln {
        let ops = RootPairOperators::new(tv, s, lam)?;
        let mut r = rng(cfg);
        let (mut ok, mut checked) = (true, 0usize);
        for _ in 0..cfg.random_points.unwrap_or(10) {
            let (mu, nu, nu2) = (random_mu(setup, &mut r)?, random_mu(setup, &mut r)?, random_mu(setup, &mut r)?);
            match (ops.t_operator(&nu, &mu), ops.t_operator(&nu2, &mu)) {
                (Ok(a), Ok(b)) => {
                    ok &= a.commutator(&b).is_zero();
                    checked += 1;
                }
                (Err(KzError::Resonance { .. }), _) | (_, Err(KzError::Resonance { .. })) => {}
                (Err(e), _) | (_, Err(e)) => return Err(e),
            }
        }
        rep.push(Check::exact("t_operators_commute", ok, None).with_detail(format!("{checked} points")));
    }
    Ok(())
}

fn os_check(cfg: &RunConfig, rep: &mut RunReport) -> Result<()> {
    let c = build_arrangement(cfg)?;
    let (n, m) = (c.n, c.m);
    let arr = Arrangement::new(c);
    let ch = arr.chain_check();
    rep.push(Check::exact("os.dimensions_agree", ch.dims.iter().all(|&(a, f, b)| a == f && a == b), None));
    rep.push(Check::exact("phi.annihilates_gap_relations", ch.phi_annihilates_relations, None));
    rep.push(Check::exact("phi.isomorphism", ch.phi_isomorphism, None));
    rep.push(Check::exact("flags.d_squared_zero", ch.d_flag_squared_zero, None));
    rep.push(Check::exact("os.d_squared_zero", ch.d_os_squared_zero, None));
    rep.push(Check::exact("s_form.well_defined", ch.s_well_defined, None));
    rep.push(Check::exact("s_form.symmetric", ch.s_symmetric, None));
    rep.push(Check::exact("s_form.matches_pairing", ch.s_matches_pairing, None));
    rep.push(Check::exact("s_form.chain_map", ch.s_chain_map, None));
    if m >= 2 {
        rep.push(
            Check::exact("s_form.negative_control", ch.negative_control_detected(), None)
                .with_detail("identity without the sign must fail"),
        );
    }
    let lambda = MultiDegree(vec![1; m]);
    let mut eta_ok = true;
    for idx in enumerate_basis(&lambda, n) {
        let lhs = os_rational(&arr, &eta_top(&arr, &lambda, &idx)?)?;
        eta_ok &= lhs.same_function(&weight_rational(&arr, &lambda, &idx)?, &arr.config);
    }
    rep.push(Check::exact("eta_top.weight_function", eta_ok, None));
    rep.insert("dims", json!(ch.dims.iter().map(|d| [d.0, d.1]).collect::<Vec<_>>()));
    rep.insert("hyperplanes", arr.config.hyperplanes.iter().map(|h| h.to_string()).collect::<Vec<_>>());
    Ok(())
}

fn symmetrize_check(cfg: &RunConfig, setup: &Setup, rep: &mut RunReport) -> Result<()> {
    let p = params_to_f64(&required_point(cfg, setup)?);
    let st = quadrature_settings(cfg)?;
    let thr = check_tol(cfg, 1e-6)?;
    let r = end_to_end(setup.tv.clone(), &setup.lambda, &p, &st)?;
    rep.push(Check::below("symmetrization.relative_difference", r.rel_diff, thr));
    rep.insert("dim", r.dim);
    rep.insert("lifted_dim", r.lifted_dim);
    rep.insert("max_abs_diff", r.max_abs_diff);
    Ok(())
}
