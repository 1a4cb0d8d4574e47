//! Browser bindings. Every export takes plain numbers or strings and returns
//! a JSON string; failures come back as `{"error": "..."}`.

use g2_core::eguchi_hanson::{deviation_norm, kahler_potential};
use g2_core::forms::{is_positive, metric_from_three_form, parse_label, standard_phi0, KForm};
use g2_core::linalg;
use g2_core::torsion::{default_grid, perturbed_structure, solve, Mode, SolverConfig, TorsionError, DEFAULT_ACTIVE};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

fn render(r: Result<Value, String>) -> String {
    match r {
        Ok(v) => v.to_string(),
        Err(e) => json!({ "error": e }).to_string(),
    }
}

/// Kähler potential and metric decay `|h_s − I|`, `|∇h_s|` on log-spaced radii in `[s/4, 100 s]`.
#[wasm_bindgen]
pub fn eh_curves(s: f64, points: usize) -> String {
    render((|| {
        if !(s > 0.0) || points < 2 {
            return Err("need s > 0 and at least two points".to_string());
        }
        let (lo, hi) = ((s / 4.0).ln(), (100.0 * s).ln());
        let mut rows = Vec::with_capacity(points);
        for i in 0..points {
            let r = (lo + (hi - lo) * i as f64 / (points - 1) as f64).exp();
            rows.push(json!({
                "r": r,
                "potential": kahler_potential(s, r).map_err(|e| e.to_string())?,
                "deviation": deviation_norm(s, r, 0).map_err(|e| e.to_string())?,
                "gradient": deviation_norm(s, r, 1).map_err(|e| e.to_string())?,
            }));
        }
        Ok(json!({ "s": s, "rows": rows }))
    })())
}

/// Positivity of `φ0 + t dx^{abc}` over `t ∈ [t_min, t_max]`, with the metric volume and `det g` where defined.
#[wasm_bindgen]
pub fn positivity_scan(label: &str, t_min: f64, t_max: f64, points: usize) -> String {
    render((|| {
        let axes = parse_label(label).map_err(|e| e.to_string())?;
        if axes.len() != 3 || points < 2 {
            return Err("need a 3-index label such as \"1,2,3\" and at least two points".to_string());
        }
        let phi0 = standard_phi0::<f64>();
        let rows: Vec<Value> = (0..points)
            .map(|i| {
                let t = t_min + (t_max - t_min) * i as f64 / (points - 1) as f64;
                let bump = KForm::monomial(&axes, t).expect("valid axes");
                let phi = phi0.add(&bump).expect("same degree");
                let positive = is_positive(&phi);
                let metric = if positive { metric_from_three_form(&phi).ok() } else { None };
                let volume = metric.as_ref().map(|g| g.volume);
                let det = metric.as_ref().map(|g| linalg::det(&g.entries));
                json!({ "t": t, "positive": positive, "volume": volume, "metric_det": det })
            })
            .collect();
        Ok(json!({ "label": label, "rows": rows }))
    })())
}

/// Residual trace of the torsion-free solve for a perturbation of size `epsilon`.
#[wasm_bindgen]
pub fn solver_trace(epsilon: f64, modes: &str, resolution: usize) -> String {
    render((|| {
        let cfg = SolverConfig { resolution, ..SolverConfig::default() };
        cfg.validate().map_err(|e| e.to_string())?;
        let modes = Mode::parse_list(modes, &DEFAULT_ACTIVE).map_err(|e| e.to_string())?;
        let phi = perturbed_structure(&default_grid(resolution), epsilon, &modes).map_err(|e| e.to_string())?;
        match solve(&phi, &cfg) {
            Ok(out) => Ok(json!({
                "converged": out.converged,
                "final_residual": out.final_residual,
                "trace": out.trace.rows,
            })),
            Err(TorsionError::Diverged { trace }) | Err(TorsionError::PositivityLost { trace, .. }) => {
                Ok(json!({ "converged": false, "trace": trace.rows }))
            }
            Err(e) => Err(e.to_string()),
        }
    })())
}
