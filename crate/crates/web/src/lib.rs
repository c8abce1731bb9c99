//! Browser demo. Each operation is a plain function returning JSON, with a
//! thin `wasm_bindgen` export on top; `www/index.html` drives them.

use serde::Serialize;
use wasm_bindgen::prelude::*;
use xfam::bounds::{f_gamma_curve, theorem_bound, BoundReport};
use xfam::compress::{left_compress, upset};
use xfam::genset::{decompose, extent, generating_family};
use xfam::oracle::{exhaustive_oracle, linitial_oracle, OracleConfig};
use xfam::set::parse_rank_list;
use xfam::{ElementSet, Instance, RankSet, SetFamily};

/// Demo pages run on the main thread; keep searches small.
const MAX_N: usize = 10;

#[derive(Serialize)]
struct Curve {
    gamma: usize,
    points: Vec<(usize, u128)>,
}

#[derive(Serialize)]
struct BoundView {
    report: BoundReport,
    curves: Vec<Curve>,
}

#[derive(Serialize)]
struct CellView {
    generator: ElementSet,
    sets: SetFamily,
}

#[derive(Serialize)]
struct CompressView {
    input: SetFamily,
    compressed: SetFamily,
    upset: SetFamily,
    extent: Option<usize>,
    cells: Vec<CellView>,
}

fn json<T: Serialize>(value: &T) -> Result<String, String> {
    serde_json::to_string(value).map_err(|e| e.to_string())
}

fn text<E: ToString>(e: E) -> String {
    e.to_string()
}

/// Bound report plus every `F_γ(l)` curve.
pub fn bound_view(n: usize, ranks: &str) -> Result<String, String> {
    let ranks = parse_rank_list(ranks).map_err(text)?;
    let report = theorem_bound(n, &ranks).map_err(text)?;
    let curves = (0..ranks.len())
        .map(|gamma| {
            Ok(Curve {
                gamma,
                points: f_gamma_curve(n, &ranks, gamma).map_err(text)?,
            })
        })
        .collect::<Result<_, String>>()?;
    json(&BoundView { report, curves })
}

/// Left-compresses a family file, closes it upwards within `ranks`, and
/// splits the result into cells.
pub fn compress_view(family: &str, ranks: &str) -> Result<String, String> {
    let input = SetFamily::parse(family).map_err(text)?;
    let ranks: RankSet = ranks.parse().map_err(text)?;
    input.check_ranks(&ranks).map_err(text)?;
    let compressed = left_compress(&input);
    let up = upset(&compressed, &ranks).map_err(text)?;
    let (extent, cells) = if up.is_empty() {
        (None, Vec::new())
    } else {
        let g = generating_family(&up, &ranks).map_err(text)?;
        let cells = decompose(&up, &ranks)
            .map_err(text)?
            .into_iter()
            .map(|c| CellView {
                generator: c.generator,
                sets: c.sets,
            })
            .collect();
        (extent(&g).ok(), cells)
    };
    json(&CompressView {
        input,
        compressed,
        upset: up,
        extent,
        cells,
    })
}

/// Exact maximum; `method` is `"linitial"` or `"exhaustive"`.
pub fn oracle_view(n: usize, ranks: &str, t: usize, method: &str) -> Result<String, String> {
    let ranks = parse_rank_list(ranks).map_err(text)?;
    let instance = Instance::new(n, t, ranks).map_err(text)?;
    let config = OracleConfig {
        max_n: MAX_N,
        ..OracleConfig::default()
    };
    let mut result = match method {
        "linitial" => linitial_oracle(&instance, &config),
        "exhaustive" => exhaustive_oracle(&instance, &config),
        other => return Err(format!("unknown method {other:?}")),
    }
    .map_err(text)?;
    result.stats.wall_ms = 0;
    json(&result)
}

#[wasm_bindgen]
pub fn bound(n: usize, ranks: &str) -> Result<String, JsValue> {
    bound_view(n, ranks).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn compress(family: &str, ranks: &str) -> Result<String, JsValue> {
    compress_view(family, ranks).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn oracle(n: usize, ranks: &str, t: usize, method: &str) -> Result<String, JsValue> {
    oracle_view(n, ranks, t, method).map_err(|e| JsValue::from_str(&e))
}
