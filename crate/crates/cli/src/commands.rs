use std::path::Path;
use std::time::Instant;

use greenbound_core::bounds::{assemble, compute_d, compute_q, ArithmeticMode, BoundReport, GroupContext, ParamSet};
use greenbound_core::constants::*;
use greenbound_core::cusps::{admissible_eps, extend_bounds, CuspBoundReport, CuspCase, CuspGeometry};
use greenbound_core::geom::{Rectangle, UpperHalfPoint};
use greenbound_core::lattice::count_bound;
use greenbound_core::optimize::search;
use greenbound_core::selftest::run_all;
use serde::Serialize;

use crate::config::RunConfig;
use crate::record::{flat_record, write_json};
use crate::CliError;

fn emit<R: Serialize, C: Serialize>(json: Option<&Path>, command: &str, result: &R, echo: &C) -> Result<(), CliError> {
    if let Some(path) = json {
        write_json(path, &flat_record(command, result, echo)?)?;
    }
    Ok(())
}

#[derive(Serialize)]
struct CountEcho {
    region: Rectangle,
    #[serde(rename = "U")]
    u: f64,
    grid: (usize, usize),
}

pub fn count(cfg: &RunConfig, point: Option<(f64, f64)>, json: Option<&Path>) -> Result<(), CliError> {
    let u = cfg.u()?;
    let (region, grid) = match point {
        Some((x, y)) => {
            let z = UpperHalfPoint::new(x, y).map_err(|e| CliError::Config(format!("point: {e}")))?;
            (Rectangle::point(z), (1, 1))
        }
        None => (cfg.region()?, cfg.grid()?),
    };
    let start = Instant::now();
    let cert = count_bound(&region, u, grid);
    println!("region   [{}, {}] x [{}, {}]", region.x_min(), region.x_max(), region.y_min(), region.y_max());
    println!("U        {u}");
    println!("grid     {}x{}", grid.0, grid.1);
    println!("bound    {}", cert.bound);
    println!("time     {:.2}s", start.elapsed().as_secs_f64());
    emit(json, "count", &cert, &CountEcho { region, u, grid })
}

#[derive(Serialize)]
struct BoundsEcho {
    group: GroupContext,
    params: ParamSet,
    n_bar: f64,
    mode: ArithmeticMode,
}

fn print_report(r: &BoundReport) {
    println!("mode             {}", r.mode);
    println!("q+               {:.6}", r.q_plus);
    println!("q-               {:.6}", r.q_minus);
    println!("D+               {:.6}", r.d_plus);
    println!("D-               {:.6}", r.d_minus);
    println!("N_bar            {}", r.n_bar);
    println!("spectral factor  {:.6}", r.spectral_factor);
    println!("A                {:.3}", r.a);
    println!("B                {:.3}", r.b);
}

fn base_report(cfg: &RunConfig) -> Result<(BoundReport, BoundsEcho), CliError> {
    let group = cfg.group()?;
    let params = cfg.params()?;
    let n_bar = cfg.n_bar()?;
    let mode = cfg.mode();
    let report = assemble(&params, &group, n_bar, mode)?;
    Ok((report, BoundsEcho { group, params, n_bar, mode }))
}

pub fn bounds(cfg: &RunConfig, json: Option<&Path>) -> Result<(), CliError> {
    let (report, echo) = base_report(cfg)?;
    print_report(&report);
    emit(json, "bounds", &report, &echo)
}

#[derive(Clone, Debug, Serialize)]
pub struct ReproductionItem {
    pub name: &'static str,
    pub value: f64,
    pub expected: String,
    pub pass: bool,
}

#[derive(Serialize)]
struct Reproduction {
    items: Vec<ReproductionItem>,
    all_pass: bool,
    seconds: f64,
}

pub fn reproduce_paper(cfg: &RunConfig, json: Option<&Path>) -> Result<(), CliError> {
    let start = Instant::now();
    let group = cfg.group()?;
    let params = cfg.params()?;
    let mut items = Vec::new();
    let mut item = |name, value: f64, expected: String, pass: bool| {
        println!("{} {name:<28} {value:>14.6}   {expected}", if pass { "PASS" } else { "FAIL" });
        items.push(ReproductionItem { name, value, expected, pass });
    };

    let cert = count_bound(&Rectangle::y0(), COUNT_U, COUNT_GRID);
    let n = cert.bound as f64;
    item("count N(z,z,17) on Y0", n, "216, within [206, 227]".into(), (206.0..=227.0).contains(&n));

    let (qp, qm) = compute_q(&params, &group);
    item("q+", qp, "68.41 ± 0.02 and < 69.0".into(), (qp - 68.41).abs() <= 0.02 && qp < REFERENCE_Q_PLUS);
    item("q-", qm, "-215.84 ± 0.02 and > -216".into(), (qm + 215.84).abs() <= 0.02 && qm > REFERENCE_Q_MINUS);

    let d = compute_d(&params)?;
    item("D+", d.plus, format!("≤ {REFERENCE_D_PLUS}"), d.plus <= REFERENCE_D_PLUS);
    item("D-", d.minus, format!("≤ {REFERENCE_D_MINUS}"), d.minus <= REFERENCE_D_MINUS);

    let paper = assemble(&params, &group, REFERENCE_N_BOUND, ArithmeticMode::PaperArithmetic)?;
    item("A (paper arithmetic)", paper.a, "-28682 ± 100".into(), (paper.a + 28682.0).abs() <= 100.0);
    item("B (paper arithmetic)", paper.b, "15080 ± 100".into(), (paper.b - 15080.0).abs() <= 100.0);

    let exact = assemble(&params, &group, REFERENCE_N_BOUND, ArithmeticMode::TheoremExact)?;
    item("A (theorem exact)", exact.a, format!("≥ {REFERENCE_A}"), exact.a >= REFERENCE_A);
    item("B (theorem exact)", exact.b, format!("≤ {REFERENCE_B}"), exact.b <= REFERENCE_B);

    let all_pass = items.iter().all(|i| i.pass);
    let seconds = start.elapsed().as_secs_f64();
    println!("{} of {} items pass ({seconds:.1}s)", items.iter().filter(|i| i.pass).count(), items.len());
    let failed: Vec<&str> = items.iter().filter(|i| !i.pass).map(|i| i.name).collect();
    emit(json, "reproduce-paper", &Reproduction { items, all_pass, seconds }, &BoundsEcho {
        group,
        params,
        n_bar: REFERENCE_N_BOUND,
        mode: ArithmeticMode::TheoremExact,
    })?;
    if all_pass {
        Ok(())
    } else {
        Err(CliError::Mismatch(format!("failing items: {}", failed.join(", "))))
    }
}

#[derive(Serialize)]
struct CuspEcho {
    geometry: CuspGeometry,
    base: BoundsEcho,
}

pub fn cusp_extend(cfg: &RunConfig, json: Option<&Path>) -> Result<(), CliError> {
    let group = cfg.group()?;
    let params = cfg.params()?;
    let spec = cfg.cusp.clone().unwrap_or_default();
    let delta = params.trapezoid.delta();
    let (eps_prime_max, eps_max) = admissible_eps(delta, group.min_c)?;
    let eps_prime = spec.eps_prime.unwrap_or(eps_prime_max.min(0.2));
    let eps = spec.eps.unwrap_or(eps_max.min(0.05).min(0.5 * eps_prime));
    let case = spec.case.unwrap_or(CuspCase::C);
    let geometry = CuspGeometry::new(eps, eps_prime, delta, group.min_c, group.count_pm1())
        .map_err(|e| CliError::Config(format!("cusp: {e} (admissible: ε′ ≤ {eps_prime_max:.7}, ε ≤ ε′/{:.7})", eps_prime_max / eps_max)))?;
    let (base, echo) = base_report(cfg)?;
    let r: CuspBoundReport = extend_bounds(&base, &geometry, case)?;
    println!("case      {}", r.case);
    println!("eps       {eps}");
    println!("eps'      {eps_prime}");
    println!("base A    {:.3}", r.base_a);
    println!("base B    {:.3}", r.base_b);
    if let (Some(a), Some(b)) = (r.a_tilde, r.b_tilde) {
        println!("A~        {a:.3}");
        println!("B~        {b:.3}");
    }
    println!("bounded   {}", r.offset_terms);
    emit(json, "cusp-extend", &r, &CuspEcho { geometry, base: echo })
}

#[derive(Serialize)]
struct OptimizeEcho {
    group: GroupContext,
    search: greenbound_core::optimize::SearchConfig,
    n_bar: f64,
}

#[derive(Serialize)]
struct OptimizeRecord {
    #[serde(flatten)]
    report: BoundReport,
    params: ParamSet,
    objective: f64,
    seed_objective: f64,
    evaluations: usize,
}

pub fn optimize(cfg: &RunConfig, json: Option<&Path>) -> Result<(), CliError> {
    let group = cfg.group()?;
    let search_cfg = cfg.search()?;
    let n_bar = cfg.n_bar()?;
    let delta = search_cfg.seed_params.trapezoid.delta();
    let out = search(&search_cfg, &group, delta, n_bar)?;
    let t = out.params.trapezoid;
    println!("objective       {:?}", search_cfg.objective);
    println!("seed value      {:.3}", out.seed_objective);
    println!("best value      {:.3}", out.objective);
    println!("evaluations     {}", out.evaluations);
    println!("alpha+ beta+ sigma+   {:.6} {:.6} {:.6}", t.alpha_plus(), t.beta_plus(), out.params.sigma_plus);
    println!("alpha- beta- sigma-   {:.6} {:.6} {:.6}", t.alpha_minus(), t.beta_minus(), out.params.sigma_minus);
    print_report(&out.report);
    let rec = OptimizeRecord {
        report: out.report,
        params: out.params,
        objective: out.objective,
        seed_objective: out.seed_objective,
        evaluations: out.evaluations,
    };
    emit(json, "optimize", &rec, &OptimizeEcho { group, search: search_cfg, n_bar })
}

#[derive(Serialize)]
struct SelftestEcho {
    seed: u64,
}

pub fn selftest(seed: u64, json: Option<&Path>) -> Result<(), CliError> {
    let start = Instant::now();
    let results = run_all(seed);
    for r in &results {
        println!(
            "{} {:<28} {:>6} samples  {} violations",
            if r.passed() { "PASS" } else { "FAIL" },
            r.name,
            r.samples,
            r.violation_count
        );
        for v in &r.violations {
            println!("     {v}");
        }
    }
    println!("{:.1}s", start.elapsed().as_secs_f64());
    let failed: Vec<&str> = results.iter().filter(|r| !r.passed()).map(|r| r.name).collect();
    #[derive(Serialize)]
    struct Suites<'a> {
        suites: &'a [greenbound_core::selftest::SuiteResult],
    }
    emit(json, "selftest", &Suites { suites: &results }, &SelftestEcho { seed })?;
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Mismatch(format!("failing suites: {}", failed.join(", "))))
    }
}
