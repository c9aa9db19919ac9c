//! WebAssembly bindings for the static page in `www/`.
//!
//! Every export takes JSON text and returns JSON text of the form
//! `{"ok": true, "result": ...}` or `{"ok": false, "error": "..."}`, so the
//! same functions run unchanged in native tests.

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use tlseq::norms::{norm, CoefficientSequence, Method, NormConfig, SequenceDocument};
use tlseq::orbit::{classify_spaces, parse_space_json, ClassifyOptions};
use tlseq::witnesses::{verify_norm_law, LawTarget, WitnessManifest};
use tlseq::McConfig;

/// Sample ceiling for one call; keeps the page responsive.
pub const MAX_SAMPLES: u32 = 2_000_000;

fn reply(r: Result<Value, String>) -> String {
    match r {
        Ok(result) => json!({ "ok": true, "result": result }),
        Err(error) => json!({ "ok": false, "error": error }),
    }
    .to_string()
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn mc_config(method: &str, samples: u32, seed: u32) -> Result<NormConfig, String> {
    if samples == 0 || samples > MAX_SAMPLES {
        return Err(format!("samples must lie in 1..={MAX_SAMPLES}"));
    }
    let method: Method = method.parse().map_err(err)?;
    Ok(NormConfig {
        method,
        mc: McConfig {
            samples: samples.into(),
            seed: seed.into(),
        },
        ..Default::default()
    })
}

/// Whether two spaces coincide.
#[wasm_bindgen]
pub fn classify(space_a: &str, space_b: &str, m_max: u32) -> String {
    reply((|| {
        let sa = parse_space_json(space_a).map_err(err)?;
        let sb = parse_space_json(space_b).map_err(err)?;
        let opts = ClassifyOptions {
            m_max,
            ..Default::default()
        };
        let r = classify_spaces(&sa, &sb, &opts).map_err(err)?;
        serde_json::to_value(r).map_err(err)
    })())
}

/// Norm of an explicit sequence.
#[wasm_bindgen(js_name = "evaluateNorm")]
pub fn evaluate_norm(space: &str, sequence: &str, method: &str, samples: u32, seed: u32) -> String {
    reply((|| {
        let s = parse_space_json(space).map_err(err)?;
        let doc: SequenceDocument = serde_json::from_str(sequence).map_err(err)?;
        let c: CoefficientSequence = doc.to_sequence().map_err(err)?.into();
        let r = norm(&c, &s, &mc_config(method, samples, seed)?).map_err(err)?;
        serde_json::to_value(r).map_err(err)
    })())
}

/// Measured norms of a witness family across sizes, with the fitted slope.
/// Explicit families are evaluated exactly, implicit ones by Monte Carlo.
#[wasm_bindgen(js_name = "verifyLaw")]
pub fn verify_law(manifest: &str, sizes: &[i32], target: &str, samples: u32, seed: u32) -> String {
    reply((|| {
        let m = WitnessManifest::from_json(manifest).map_err(err)?;
        let target = match target {
            "a" => LawTarget::A,
            "b" => LawTarget::B,
            "ratio" => LawTarget::Ratio,
            other => return Err(format!("unknown target {other:?}")),
        };
        let sizes: Vec<i64> = sizes.iter().map(|&s| i64::from(s)).collect();
        let r = verify_norm_law(&m, &sizes, target, &mc_config("exact", samples, seed)?).map_err(err)?;
        serde_json::to_value(r).map_err(err)
    })())
}
