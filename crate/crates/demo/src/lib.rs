//! Browser bindings: JSON-string adapters over the core library for the
//! static page in `www/`. Compiled to WebAssembly with wasm-bindgen; the same
//! functions build natively so the adapters are tested like any other code.
//!
//! Every function returns a JSON string and never panics on bad input —
//! failures come back as `{"error": "..."}` so the page can render them.

use syndetic::witness::{check_witness, refute_two_syndetic, TranslateFamily};
use syndetic::{Limits, SetDescriptor};
use wasm_bindgen::prelude::*;

/// Demo-sized budgets: every interaction should settle in well under a
/// second, even on a slow machine, so the caps sit far below the CLI's.
fn limits() -> Limits {
    Limits {
        stream_budget: 1_000_000,
        max_window_bits: 1 << 22,
        max_translates: 10_000,
        max_ball: 100_000,
        solver_nodes: 5_000_000,
    }
}

const STRIP_SPAN_CAP: i64 = 4096;

fn err_json(e: impl std::fmt::Display) -> String {
    serde_json::json!({ "error": e.to_string() }).to_string()
}

fn parse_descriptor(desc_json: &str) -> Result<SetDescriptor, String> {
    serde_json::from_str(desc_json).map_err(|e| format!("bad descriptor: {e}"))
}

/// Membership strip of a descriptor over `[lo, hi]`, one 0/1 per position.
#[wasm_bindgen]
pub fn window_strip(desc_json: &str, lo: i64, hi: i64) -> String {
    let run = || -> Result<String, String> {
        if hi < lo || hi - lo + 1 > STRIP_SPAN_CAP {
            return Err(format!("window must span 1..={STRIP_SPAN_CAP} positions"));
        }
        let desc = parse_descriptor(desc_json)?;
        let eval = desc.compile(&limits()).map_err(|e| e.to_string())?;
        let w = eval.window(lo, hi).map_err(|e| e.to_string())?;
        let bits: Vec<u8> = (0..w.len()).map(|i| w.get_idx(i) as u8).collect();
        let count = w.count_members();
        Ok(serde_json::json!({ "lo": lo, "hi": hi, "bits": bits, "count": count }).to_string())
    };
    run().unwrap_or_else(err_json)
}

/// Witness check with an explicit comma-separated translate list.
#[wasm_bindgen]
pub fn witness_check_strip(desc_json: &str, n: u32, translates_csv: &str, lo: i64, hi: i64) -> String {
    let run = || -> Result<String, String> {
        let desc = parse_descriptor(desc_json)?;
        let eval = desc.compile(&limits()).map_err(|e| e.to_string())?;
        let translates: Vec<i64> = translates_csv
            .split(',')
            .map(|p| p.trim().parse().map_err(|e| format!("bad translate {p:?}: {e}")))
            .collect::<Result<_, _>>()?;
        let family = TranslateFamily::list(&translates).map_err(|e| e.to_string())?;
        let report = check_witness(&eval, n, &family, lo, hi).map_err(|e| e.to_string())?;
        serde_json::to_string(&report).map_err(|e| e.to_string())
    };
    run().unwrap_or_else(err_json)
}

/// The two-point obstruction at translate radius `r` for the built-in thick,
/// syndetic, not completely syndetic set.
#[wasm_bindgen]
pub fn refute_corb(r: u32) -> String {
    let run = || -> Result<String, String> {
        if r > 512 {
            return Err("keep r <= 512 in the demo".into());
        }
        let refutation = refute_two_syndetic(r as u64).map_err(|e| e.to_string())?;
        serde_json::to_string(&refutation).map_err(|e| e.to_string())
    };
    run().unwrap_or_else(err_json)
}
