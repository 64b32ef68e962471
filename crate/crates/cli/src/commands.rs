use std::path::Path;

use serde::Serialize;
use serde_json::{json, Value};

use epsnet::bounds::{table1_bench, BoundsReport};
use epsnet::coverage::{estimate_dispersion, estimate_uncovered, make_template, table2_bench, template_convergence};
use epsnet::prm::{adversarial_ring, adversarial_shell, build_prm, shortest_path};
use epsnet::sampling::{build_net, ens, grid, replicate_template, EnsParams, GridSpec, NetInput, Template};
use epsnet::{Environment, SampleSet};

use crate::output::{emit_csv, emit_json, read_json, with_provenance, CliResult, Failure, Provenance};
use crate::*;

pub fn run(cmd: Command) -> CliResult<()> {
    match cmd {
        Command::Bounds(a) => bounds(&a),
        Command::BuildNet(a) => build_net_cmd(&a),
        Command::Ens(a) => ens_cmd(&a),
        Command::Grid(a) => grid_cmd(&a),
        Command::Template(a) => template_cmd(&a),
        Command::Replicate(a) => replicate(&a),
        Command::Prm(a) => prm(&a),
        Command::Adversary(a) => adversary(&a),
        Command::Coverage(a) => coverage(&a),
        Command::Bench(BenchCommand::Table1(a)) => table1(&a),
        Command::Bench(BenchCommand::Table2(a)) => table2(&a),
    }
}

/// Writes the artifact to `out`; with a file target, prints `summary` to stdout.
fn deliver(out: Option<&Path>, artifact: &Value, summary: Value) -> CliResult<()> {
    emit_json(out, artifact)?;
    if let Some(p) = out {
        let mut s = summary;
        if let Value::Object(m) = &mut s {
            m.insert("out".into(), json!(p.display().to_string()));
        }
        println!("{s}");
    }
    Ok(())
}

fn samples_summary(s: &SampleSet) -> Value {
    json!({ "generator": s.generator, "dim": s.dim, "n": s.len() })
}

fn bounds(a: &BoundsArgs) -> CliResult<()> {
    let r = BoundsReport::new(a.d, a.delta, a.eps)?;
    if a.json {
        return emit_json(None, &with_provenance(&r, &Provenance::new("bounds", a, None)));
    }
    println!("n_lb={}", r.n_necessary.floor());
    println!("n_ub={}", r.n_sufficient.ceil());
    println!("n_lb_raw={:e}", r.n_necessary);
    println!("n_ub_raw={:e}", r.n_sufficient);
    println!("r_lb={}", r.r_necessary);
    println!("r_ub={}", r.r_sufficient_stmt);
    println!("r_ub_derived={}", r.r_sufficient_proof);
    println!("grid={:e}", r.grid_size);
    println!("net_lower={:e}", r.net_lower);
    println!("net_upper={:e}", r.net_upper);
    match r.ratio_bound {
        Some(x) => println!("net_grid_ratio={x:e}"),
        None => println!("net_grid_ratio=none"),
    }
    Ok(())
}

fn build_net_cmd(a: &BuildNetArgs) -> CliResult<()> {
    let input = match (&a.input, a.d) {
        (Some(path), _) => NetInput::Points(read_json::<SampleSet>(path, "sample set")?.points),
        (None, Some(d)) => NetInput::Region { lo: vec![a.lo; d], hi: vec![a.hi; d], dense_n: a.dense },
        (None, None) => return Err(Failure::Usage("build-net needs --input or --d".into())),
    };
    let net = build_net(&input, a.eps, a.seed)?;
    let prov = Provenance::new("build-net", a, Some(a.seed));
    deliver(a.out.as_deref(), &with_provenance(&net, &prov), samples_summary(&net))
}

fn ens_cmd(a: &EnsArgs) -> CliResult<()> {
    let mut p = EnsParams::new(a.n, a.d, a.eps, a.delta, a.seed);
    p.net_radius = a.net_radius;
    p.dense_n = a.dense;
    let r = ens(&p)?;
    let prov = Provenance::new("ens", a, Some(a.seed));
    let summary = json!({
        "generator": r.samples.generator,
        "dim": r.samples.dim,
        "n": r.samples.len(),
        "radius": r.radius,
        "alpha": r.alpha,
        "n_delta": r.n_delta,
        "delta_min": r.delta_min,
        "net_radius": r.net_radius,
    });
    deliver(a.out.as_deref(), &with_provenance(&r.samples, &prov), summary)
}

fn grid_cmd(a: &GridArgs) -> CliResult<()> {
    let spec = match a.margin {
        Some(m) => GridSpec::inner_cube(a.d, a.w, m),
        None => GridSpec::unit_cube(a.d, a.w),
    };
    let g = grid(&spec)?;
    let prov = Provenance::new("grid", a, None);
    deliver(a.out.as_deref(), &with_provenance(&g, &prov), samples_summary(&g))
}

fn template_cmd(a: &TemplateArgs) -> CliResult<()> {
    let rep = make_template(a.d, a.k, a.dense, a.mc, a.seed)?;
    let convergence = if a.no_convergence_check {
        None
    } else {
        let c = template_convergence(a.d, a.k, a.dense, a.seed)?;
        if !c.converged {
            eprintln!(
                "warning: template size moved {:.1}% ({} -> {}) when --dense doubled; increase --dense",
                100.0 * c.relative_change,
                c.size,
                c.doubled_size
            );
        }
        Some(c)
    };
    let mut v = with_provenance(&rep.template, &Provenance::new("template", a, Some(a.seed)));
    if let Value::Object(m) = &mut v {
        m.insert("rho".into(), json!(rep.rho));
        m.insert("p_hat".into(), json!(rep.p_hat));
        m.insert("mc_samples".into(), json!(rep.mc_samples));
        m.insert("dense_n".into(), json!(rep.dense_n));
        m.insert("convergence".into(), json!(convergence));
    }
    let summary = json!({
        "dim": a.d,
        "k": a.k,
        "size": rep.template.len(),
        "rho": rep.rho,
        "p_hat": rep.p_hat,
        "converged": convergence.as_ref().map(|c| c.converged),
    });
    deliver(a.out.as_deref(), &v, summary)
}

fn replicate(a: &ReplicateArgs) -> CliResult<()> {
    let t: Template = read_json(&a.template, "template")?;
    let s = replicate_template(&t, a.m)?;
    let prov = Provenance::new("replicate", a, None);
    deliver(a.out.as_deref(), &with_provenance(&s, &prov), samples_summary(&s))
}

fn radius_from_params(s: &SampleSet) -> Option<f64> {
    s.params.get("radius").and_then(Value::as_f64)
}

#[derive(Serialize)]
struct PrmReport<'a> {
    path: &'a epsnet::prm::PathResult,
    radius: f64,
    vertices: usize,
    edges: usize,
    start_free: bool,
    goal_free: bool,
    provenance: Provenance,
}

fn prm(a: &PrmArgs) -> CliResult<()> {
    let env: Environment = read_json(&a.env, "environment")?;
    let samples: SampleSet = read_json(&a.samples, "sample set")?;
    let radius = match a.radius.or_else(|| radius_from_params(&samples)) {
        Some(r) => r,
        None => return Err(Failure::Usage("--radius is required unless the sample set records one".into())),
    };
    let g = build_prm(&env, &samples, radius, a.tol)?;
    let path = shortest_path(&g);
    if let Some(p) = &a.report {
        let report = PrmReport {
            path: &path,
            radius,
            vertices: g.vertices.len(),
            edges: g.edges.len(),
            start_free: g.start.is_some(),
            goal_free: g.goal.is_some(),
            provenance: Provenance::new("prm", a, None),
        };
        emit_json(Some(p), &serde_json::to_value(&report).expect("reports serialize"))?;
    }
    emit_json(None, &serde_json::to_value(&path).expect("paths serialize"))
}

fn adversary(a: &AdversaryArgs) -> CliResult<()> {
    let samples: SampleSet = read_json(&a.samples, "sample set")?;
    let found = match a.variant {
        VariantArg::Shell => adversarial_shell(&samples, a.delta, a.budget, a.seed)?,
        VariantArg::Ring => adversarial_ring(&samples, a.delta, a.budget, a.seed)?,
    };
    let Some(inst) = found else {
        return Err(Failure::NoResult(format!(
            "no {} witness found within a budget of {} evaluations",
            json!(a.variant).as_str().unwrap_or_default(),
            a.budget
        )));
    };
    let mut v = with_provenance(&inst.env, &Provenance::new("adversary", a, Some(a.seed)));
    if let Value::Object(m) = &mut v {
        m.insert(
            "adversary".into(),
            json!({
                "variant": inst.variant,
                "witness": inst.witness,
                "delta": inst.delta,
                "opt_delta": inst.opt_delta,
                "margin": inst.margin,
            }),
        );
    }
    let summary = json!({ "variant": inst.variant, "witness": inst.witness, "margin": inst.margin, "opt_delta": inst.opt_delta });
    deliver(a.out.as_deref(), &v, summary)
}

fn coverage(a: &CoverageArgs) -> CliResult<()> {
    let samples: SampleSet = read_json(&a.samples, "sample set")?;
    let est = estimate_uncovered(&samples, a.radius, a.mc, a.seed, a.periodic)?;
    let dispersion = if a.dispersion { Some(estimate_dispersion(&samples, a.mc, a.seed, a.periodic)?) } else { None };
    let mut v = with_provenance(&est, &Provenance::new("coverage", a, Some(a.seed)));
    if let Value::Object(m) = &mut v {
        m.insert("dispersion".into(), json!(dispersion));
    }
    let summary = json!({ "p_hat": est.p_hat, "dispersion": dispersion });
    deliver(a.out.as_deref(), &v, summary)
}

fn table1(a: &Table1Args) -> CliResult<()> {
    let t = table1_bench();
    let prov = Provenance::new("bench table1", a, None);
    if a.json {
        emit_json(a.out.as_deref(), &with_provenance(&t, &prov))?;
    } else {
        emit_csv(a.out.as_deref(), &t.to_csv(), &prov)?;
    }
    let cells = t.rows.len() * 4;
    let matched: usize = t.rows.iter().map(|r| r.matches.iter().filter(|&&m| m).count()).sum();
    eprintln!("table1: {matched}/{cells} cells match ({})", if t.all_match() { "PASS" } else { "FAIL" });
    Ok(())
}

fn table2(a: &Table2Args) -> CliResult<()> {
    if a.seeds.is_empty() {
        return Err(Failure::Usage("--seeds needs at least one seed".into()));
    }
    let t = table2_bench(a.dense, a.mc, &a.seeds)?;
    let prov = Provenance::new("bench table2", a, None);
    if a.json {
        emit_json(a.out.as_deref(), &with_provenance(&t, &prov))?;
    } else {
        emit_csv(a.out.as_deref(), &t.to_csv(), &prov)?;
    }
    let ok = t.cells.iter().filter(|c| c.rho_ok && c.p_hat_ok).count();
    eprintln!(
        "table2: {ok}/{} cells within tolerance, trend {} ({})",
        t.cells.len(),
        if t.trend_ok { "ok" } else { "violated" },
        if t.passed() { "PASS" } else { "FAIL" }
    );
    Ok(())
}
