use std::collections::BTreeSet;
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde_json::{json, Value};

use g2_core::eguchi_hanson::eh_report;
use g2_core::forms::{euclidean_volume, form_to_json, hodge_star, metric_from_three_form, standard_phi0, KForm, MetricTensor};
use g2_core::k3::{
    donaldson_match_with, find_isometry_with, integer_vector_from_json, k3_lattice, lattice_from_json, random_block_pairs,
    rank_one_example, HyperKahlerClasses, LatticeError, SearchConfig,
};
use g2_core::orbifold::{joyce_report, parse_group_file, OrbifoldGroup, OrbifoldReport};
use g2_core::tcs::{builtin_catalog, catalog_from_json, catalog_to_json, find_block, gluing_pullback_check, neck_form, tcs_report, CatalogEntry, NeckModel};
use g2_core::torsion::{default_grid, perturbed_structure, solve, Mode, SolverConfig, TorsionError, DEFAULT_ACTIVE};
use g2_core::{Rational, Scalar};

use crate::report::{Outcome, Status};
use crate::{Cli, Command, K3Command, SolveArgs, TcsCommand};

pub fn run(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::VerifyPhi0 => verify_phi0(),
        Command::Orbifold { group, delta_b2, delta_b3 } => orbifold(group, *delta_b2, *delta_b3),
        Command::EhCheck { s, samples } => eh_check(*s, *samples, cli.seed, cli.tolerance.unwrap_or(1e-10)),
        Command::K3(k) => k3(k, cli.seed),
        Command::Tcs(t) => tcs(t),
        Command::SolveTorsion(args) => solve_torsion(args, cli.seed, cli.tolerance),
    }
}

/// Reads and parses a JSON file; parse errors carry line and column.
fn read_json(path: &Path) -> Result<Value> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn matrix_json<T: Scalar>(m: &[Vec<T>]) -> Value {
    Value::Array(m.iter().map(|r| Value::Array(r.iter().map(Scalar::to_json).collect())).collect())
}

fn verify_phi0() -> Result<Outcome> {
    let phi = standard_phi0::<Rational>();
    let g = metric_from_three_form(&phi)?;
    let e = MetricTensor::<Rational>::euclidean();
    let dual = hodge_star(&e, &phi);
    let seven_vol = euclidean_volume::<Rational>().scale(&Rational::from_integer(7.into()));
    let double_star = (0..=7).all(|k| {
        let n = g2_core::forms::binomial7(k);
        let probe = KForm::from_coeffs(k, (1..=n as i64).map(|i| Rational::from_integer(i.into())).collect()).expect("sized");
        hodge_star(&e, &hodge_star(&e, &probe)) == probe
    });
    let checks = json!({
        "metric_is_identity": g.entries == g2_core::linalg::identity::<Rational>(7),
        "volume_is_one": g.volume == Rational::from_integer(1.into()),
        "wedge_with_dual_is_7_vol": phi.wedge(&dual)? == seven_vol,
        "double_star_is_identity": double_star,
    });
    let all = checks.as_object().expect("object").values().all(|v| v == &Value::Bool(true));
    let payload = json!({
        "phi0": form_to_json(&phi),
        "monomial_count": phi.support_len(),
        "metric": matrix_json(&g.entries),
        "volume": g.volume.to_json(),
        "hodge_dual": form_to_json(&dual),
        "checks": checks,
    });
    if !all {
        bail!("phi0 self-check failed: {payload}");
    }
    Ok(Outcome::ok(payload))
}

fn orbifold(group: &str, delta_b2: i64, delta_b3: i64) -> Result<Outcome> {
    let report = if group == "builtin:joyce" {
        joyce_report()?
    } else {
        let v = read_json(Path::new(group))?;
        let (gens, labels) = parse_group_file(&v)?;
        let g = OrbifoldGroup::generate(&gens, &labels, 4096)?;
        OrbifoldReport::build(&g)?
    };
    let (b2, b3) = report.resolution_betti(delta_b2, delta_b3);
    let mut payload = report.to_json();
    payload["resolution_deltas"] = json!([delta_b2, delta_b3]);
    payload["resolution_betti"] = json!({ "b2": b2, "b3": b3 });
    Ok(Outcome::ok(payload))
}

fn eh_check(s: f64, samples: usize, seed: u64, tol: f64) -> Result<Outcome> {
    let r = eh_report(s, samples, seed)?;
    let mut payload = serde_json::to_value(&r)?;
    payload["seed"] = json!(seed);
    payload["checks"] = json!({
        "det_within_tolerance": r.det_h_max_dev < tol,
        "ricci_below_1e-6": r.ricci_max < 1e-6,
        "single_scaling_winner": r.scaling_winner.is_some(),
    });
    Ok(Outcome::ok(payload))
}

fn lattice_outcome(err: LatticeError, context: Value) -> Result<Outcome> {
    let status = match err {
        LatticeError::NotFound { .. } => Status::NotFound,
        LatticeError::Infeasible(_) | LatticeError::SquareMismatch(..) | LatticeError::DivisorMismatch(..) => Status::Infeasible,
        other => return Err(other.into()),
    };
    let mut payload = context;
    payload["reason"] = json!(err.to_string());
    Ok(Outcome::negative(status, payload))
}

fn k3(cmd: &K3Command, seed: u64) -> Result<Outcome> {
    match cmd {
        K3Command::LatticeInvariants { input } => {
            let lat = match input {
                Some(p) => lattice_from_json(&read_json(p)?)?,
                None => k3_lattice(),
            };
            let (pos, neg) = lat.signature();
            Ok(Outcome::ok(json!({
                "rank": lat.rank(),
                "even": lat.is_even(),
                "unimodular": lat.is_unimodular(),
                "determinant": lat.determinant()?,
                "signature": [pos, neg],
            })))
        }
        K3Command::FindIsometry { input, search_budget } => {
            let (lat, v, w) = match input {
                Some(p) => {
                    let doc = read_json(p)?;
                    let vecs = doc.get("vectors").context("missing field vectors")?;
                    let get = |k: &str| -> Result<Vec<i64>> {
                        Ok(integer_vector_from_json(vecs.get(k).with_context(|| format!("missing field vectors.{k}"))?)
                            .with_context(|| format!("vectors.{k}"))?)
                    };
                    (lattice_from_json(&doc)?, get("v")?, get("w")?)
                }
                None => {
                    let (v, w) = random_block_pairs(1, 20, seed).pop().context("no random pair drawn")?;
                    (k3_lattice(), v, w)
                }
            };
            let context = json!({ "v": v, "w": w, "seed": seed, "search_budget": search_budget });
            match find_isometry_with(&lat, &v, &w, SearchConfig { budget: *search_budget, seed }) {
                Ok(m) => {
                    let mut payload = context;
                    payload["verified"] = json!(m.apply(&v)? == w);
                    payload["isometry"] = m.to_json();
                    Ok(Outcome::ok(payload))
                }
                Err(e) => lattice_outcome(e, context),
            }
        }
        K3Command::Match { input, square_half, search_budget } => {
            let (source, target) = match input {
                Some(p) => {
                    let doc = read_json(p)?;
                    let get = |k: &str| -> Result<HyperKahlerClasses> {
                        Ok(HyperKahlerClasses::from_json(doc.get(k).with_context(|| format!("missing field {k}"))?)
                            .with_context(|| format!("field {k}"))?)
                    };
                    (get("source")?, get("target")?)
                }
                None => (rank_one_example(*square_half), rank_one_example(*square_half)),
            };
            let context = json!({ "source": source.to_json(), "target": target.to_json(), "seed": seed });
            match donaldson_match_with(&target, &source, SearchConfig { budget: *search_budget, seed }) {
                Ok(w) => {
                    let mut payload = context;
                    payload["verified"] = json!(w.verified());
                    payload["witness"] = w.to_json();
                    Ok(Outcome::ok(payload))
                }
                Err(e) => lattice_outcome(e, context),
            }
        }
    }
}

/// Validated catalog; an empty file is an empty catalog and duplicate names are rejected.
pub fn ingest_catalog(path: &Path) -> Result<Vec<CatalogEntry>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    if text.trim().is_empty() {
        return Ok(Vec::new());
    }
    let v: Value = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    let records = v.as_array().context("catalog must be a JSON list")?;
    let mut entries = Vec::with_capacity(records.len());
    let mut names = BTreeSet::new();
    for (i, r) in records.iter().enumerate() {
        let label = r.get("name").and_then(Value::as_str).map(|n| format!("record {i} ({n})")).unwrap_or(format!("record {i}"));
        let entry = catalog_from_json(&Value::Array(vec![r.clone()])).with_context(|| label.clone())?.remove(0);
        if !names.insert(entry.name().to_string()) {
            bail!("{label}: duplicate name");
        }
        entries.push(entry);
    }
    Ok(entries)
}

fn tcs(cmd: &TcsCommand) -> Result<Outcome> {
    let load = |p: &Option<std::path::PathBuf>| match p {
        Some(p) => ingest_catalog(p),
        None => Ok(builtin_catalog()),
    };
    match cmd {
        TcsCommand::Betti { block1, block2, b2, catalog } => {
            let cat = load(catalog)?;
            let r = tcs_report(find_block(&cat, block1)?, find_block(&cat, block2)?, *b2)?;
            Ok(Outcome::ok(serde_json::to_value(r)?))
        }
        TcsCommand::NeckCheck { violate } => {
            let m = NeckModel::<Rational>::flat();
            let partner = if *violate { m.rotated_without_negation() } else { m.rotated() };
            let check = gluing_pullback_check(&m, &partner);
            let payload = json!({
                "violate": violate,
                "neck_form": form_to_json(&neck_form(&m)),
                "residual": form_to_json(&check.residual),
                "preserved": check.preserved,
                "max_coefficient": check.max_coefficient,
            });
            let status = if check.preserved { Status::Ok } else { Status::Infeasible };
            Ok(Outcome::negative(status, payload))
        }
        TcsCommand::Catalog { catalog } => {
            let cat = load(catalog)?;
            Ok(Outcome::ok(json!({ "count": cat.len(), "entries": catalog_to_json(&cat) })))
        }
    }
}

fn solve_torsion(args: &SolveArgs, seed: u64, global_tol: Option<f64>) -> Result<Outcome> {
    let cfg = SolverConfig {
        tolerance: args.tol.or(global_tol).unwrap_or(1e-8),
        max_iterations: args.max_iter,
        resolution: args.resolution,
        ..SolverConfig::default()
    };
    cfg.validate()?;
    let modes = Mode::parse_list(&args.modes, &DEFAULT_ACTIVE)?;
    let grid = default_grid(cfg.resolution);
    let context = json!({
        "epsilon": args.epsilon,
        "modes": args.modes,
        "seed": seed,
        "config": cfg,
    });
    let phi = match perturbed_structure(&grid, args.epsilon, &modes) {
        Ok(p) => p,
        Err(e @ TorsionError::PerturbationTooLarge { .. }) => {
            let mut payload = context;
            payload["reason"] = json!(e.to_string());
            return Ok(Outcome::negative(Status::Infeasible, payload));
        }
        Err(e) => return Err(e.into()),
    };
    let mut payload = context;
    match solve(&phi, &cfg) {
        Ok(out) => {
            let d_eta = out.d_eta();
            payload["converged"] = json!(out.converged);
            payload["iterations"] = json!(out.iterations());
            payload["final_residual"] = json!(out.final_residual);
            payload["d_eta"] = json!(d_eta);
            payload["closed"] = json!(out.phi.d().max_coefficient() == 0.0);
            payload["class_preserved"] = json!(out.phi.mean() == phi.mean());
            payload["trace"] = json!(out.trace.rows);
            let status = if out.converged { Status::Ok } else { Status::Diverged };
            Ok(Outcome::negative(status, payload))
        }
        Err(TorsionError::Diverged { trace }) => {
            payload["converged"] = json!(false);
            payload["reason"] = json!("residual increased after repeated damping");
            payload["trace"] = json!(trace.rows);
            Ok(Outcome::negative(Status::Diverged, payload))
        }
        Err(TorsionError::PositivityLost { iteration, node, trace }) => {
            payload["converged"] = json!(false);
            payload["reason"] = json!(format!("positivity lost at iteration {iteration}, grid node {node}"));
            payload["trace"] = json!(trace.rows);
            Ok(Outcome::negative(Status::Diverged, payload))
        }
        Err(e) => Err(e.into()),
    }
}
