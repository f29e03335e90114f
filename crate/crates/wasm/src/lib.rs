//! Browser surface: a handful of JSON-in/JSON-out operations behind
//! `wasm-bindgen`, driving the demo page under `www/`.
//!
//! Every function is total: failures come back as `{"ok": false, "error"}`
//! rather than unwinding across the FFI boundary.

use pwk_core::comm::{classify, count_messages, measure};
use pwk_core::model::{Machine, Side, Verdict};
use pwk_core::reverse::{backward_replay, certify_bounded, CertVerdict};
use pwk_core::{dsl, zoo};
use serde::Serialize;
use wasm_bindgen::prelude::*;

fn err_json(msg: &str) -> String {
    serde_json::to_string(&serde_json::json!({ "ok": false, "error": msg }))
        .expect("error document serializes")
}

fn ok_json<T: Serialize>(doc: &T) -> String {
    match serde_json::to_string(doc) {
        Ok(s) => s,
        Err(e) => err_json(&format!("serialization failed: {e}")),
    }
}

/// A `source` is either a catalog entry name or full `.pwk` text.
fn resolve(source: &str) -> Result<Machine, String> {
    if source.trim_start().starts_with("machine") {
        dsl::load_str(source).map_err(|e| e.to_string())
    } else {
        let entry = zoo::get(source.trim()).map_err(|e| e.to_string())?;
        let spec = entry
            .spec
            .ok_or_else(|| format!("'{}' is predicate-only", source.trim()))?;
        spec.compile().map_err(|r| r.to_string())
    }
}

#[derive(Serialize)]
struct CatalogEntry {
    name: &'static str,
    has_machine: bool,
    reversible: bool,
    comm_class: Option<&'static str>,
    provenance: &'static str,
    note: Option<&'static str>,
    dsl: Option<String>,
}

/// The whole catalog, including canonical `.pwk` text for each machine.
#[wasm_bindgen]
pub fn catalog() -> String {
    let entries: Vec<CatalogEntry> = zoo::list()
        .iter()
        .map(|e| CatalogEntry {
            name: e.name,
            has_machine: e.spec.is_some(),
            reversible: e.reversible,
            comm_class: e.claimed_comm_class.map(|c| c.label()),
            provenance: e.provenance,
            note: e.note,
            dsl: e.spec.as_ref().map(dsl::serialize),
        })
        .collect();
    ok_json(&serde_json::json!({ "ok": true, "entries": entries }))
}

#[derive(Serialize)]
struct HeadState {
    state: String,
    pos: usize,
}

#[derive(Serialize)]
struct ConfigDoc {
    upper: HeadState,
    lower: HeadState,
}

#[derive(Serialize)]
struct StepDoc {
    sent_upper: Option<String>,
    sent_lower: Option<String>,
    back_upper: Option<String>,
    back_lower: Option<String>,
}

#[derive(Serialize)]
struct TraceDoc {
    ok: bool,
    name: String,
    word: String,
    tape: Vec<String>,
    verdict: String,
    accepted: bool,
    reversible: bool,
    inverts: bool,
    configs: Vec<ConfigDoc>,
    steps: Vec<StepDoc>,
    forward_messages: u64,
    backward_messages: u64,
}

/// Run a word and return the full configuration sequence plus per-step
/// forward broadcasts and, when the machine is reversible and the run
/// inverts, the broadcasts of the backward replay.
#[wasm_bindgen]
pub fn trace_word(source: &str, word: &str) -> String {
    let m = match resolve(source) {
        Ok(m) => m,
        Err(e) => return err_json(&e),
    };
    let input = match m.input(word) {
        Ok(i) => i,
        Err(e) => return err_json(&e.to_string()),
    };
    let trace = m.run(&input, Some(100_000));
    let replay = if m.has_reverse() && trace.verdict != Verdict::Loop {
        backward_replay(&m, &input).ok()
    } else {
        None
    };
    let configs: Vec<ConfigDoc> = trace
        .configurations()
        .iter()
        .map(|c| ConfigDoc {
            upper: HeadState {
                state: m.state_name(Side::Upper, c.upper_state).to_string(),
                pos: c.upper_pos as usize,
            },
            lower: HeadState {
                state: m.state_name(Side::Lower, c.lower_state).to_string(),
                pos: c.lower_pos as usize,
            },
        })
        .collect();
    let steps: Vec<StepDoc> = trace
        .steps
        .iter()
        .enumerate()
        .map(|(i, rec)| {
            // Replay steps run newest-first; align step i with its inversion.
            let back = replay
                .as_ref()
                .and_then(|r| r.steps.get(r.steps.len() - 1 - i));
            StepDoc {
                sent_upper: m.message_token(rec.sent_upper).map(str::to_string),
                sent_lower: m.message_token(rec.sent_lower).map(str::to_string),
                back_upper: back.and_then(|b| m.message_token(b.sent_upper).map(str::to_string)),
                back_lower: back.and_then(|b| m.message_token(b.sent_lower).map(str::to_string)),
            }
        })
        .collect();
    let stats = count_messages(&trace, replay.as_ref()).unwrap_or_default();
    let tape = (0..input.len() + 2)
        .map(|p| m.sym_token(input.sym_at(p)))
        .collect();
    ok_json(&TraceDoc {
        ok: true,
        name: m.name().to_string(),
        word: word.to_string(),
        tape,
        verdict: trace.verdict.to_string(),
        accepted: trace.verdict == Verdict::Accepted,
        reversible: m.has_reverse(),
        inverts: replay.is_some(),
        configs,
        steps,
        forward_messages: stats.forward_total(),
        backward_messages: stats.backward_total(),
    })
}

/// Words that produce a well-spread measurement series for a catalog entry.
#[wasm_bindgen]
pub fn member_words(name: &str, count: u32) -> String {
    let count = count.clamp(1, 6) as usize;
    let words: Vec<String> = match name {
        "an_bn" => (0..count).map(|k| zoo::an_bn_word(1 << k)).collect(),
        "l_lin" => (1..=count)
            .map(|k| zoo::l_lin_word(&"01".repeat(k)[..k]))
            .collect(),
        "w_dollar" => (0..count)
            .map(|k| zoo::w_dollar_word(&"ab".repeat(1 << k)[..1 << k]))
            .collect(),
        "prefix_abb" => (0..count).map(|k| format!("{}bb", "a".repeat(2 * k))).collect(),
        "suffix_bba" => (0..count).map(|k| format!("bb{}", "a".repeat(2 * k))).collect(),
        "l_expo" => (1..=count.min(4)).map(zoo::l_expo_word).collect(),
        "l_expo_hat" => (1..=count.min(4))
            .map(|m| zoo::l_expo_hat_word(&vec![1u8; m]))
            .collect(),
        "l_poly_hat" => (1..=count)
            .map(|m| zoo::l_poly_hat_word(&vec![1u8; m]))
            .collect(),
        _ => return err_json(&format!("no member generator for '{name}'")),
    };
    ok_json(&serde_json::json!({ "ok": true, "words": words }))
}

#[derive(Serialize)]
struct SeriesPoint {
    n: usize,
    forward: u64,
    backward: u64,
}

/// Measure a list of words (JSON array of strings) and classify the
/// forward-count growth.
#[wasm_bindgen]
pub fn measure_series(source: &str, words_json: &str) -> String {
    let m = match resolve(source) {
        Ok(m) => m,
        Err(e) => return err_json(&e),
    };
    let words: Vec<String> = match serde_json::from_str(words_json) {
        Ok(w) => w,
        Err(e) => return err_json(&format!("bad word list: {e}")),
    };
    let out = measure(&m, &words);
    let series: Vec<SeriesPoint> = out
        .series
        .iter()
        .map(|(n, s)| SeriesPoint {
            n: *n,
            forward: s.forward_total(),
            backward: s.backward_total(),
        })
        .collect();
    let points: Vec<(usize, u64)> = series.iter().map(|p| (p.n, p.forward)).collect();
    let class = classify(&points).ok();
    ok_json(&serde_json::json!({
        "ok": true,
        "series": series,
        "rejected": out.rejected,
        "class": class.map(|c| c.kind.label()),
        "fit": class.map(|c| serde_json::json!({
            "basis": c.fit.basis.label(),
            "scale": c.fit.scale,
            "offset": c.fit.offset,
            "nrmse": c.fit.nrmse,
        })),
    }))
}

/// Bounded reversibility certification, with the witness when it fails.
#[wasm_bindgen]
pub fn certify(source: &str, max_len: u32) -> String {
    let m = match resolve(source) {
        Ok(m) => m,
        Err(e) => return err_json(&e),
    };
    let max_len = max_len.min(10) as usize;
    let report = match certify_bounded(&m, max_len) {
        Ok(r) => r,
        Err(e) => return err_json(&e.to_string()),
    };
    let (verdict, witness) = match &report.verdict {
        CertVerdict::CertifiedUpTo(l) => (format!("certified up to length {l}"), None),
        CertVerdict::Fails(w) => (
            "fails".to_string(),
            Some(serde_json::json!({
                "word": w.word,
                "failure": format!("{:?}", w.failure),
            })),
        ),
    };
    ok_json(&serde_json::json!({
        "ok": true,
        "certified": report.certified(),
        "verdict": verdict,
        "witness": witness,
        "words_checked": report.words_checked,
        "configurations_checked": report.configurations_checked,
    }))
}
