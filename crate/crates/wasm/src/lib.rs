//! Browser bindings for the demo page in `www/`.

use tmscheme::construct::upper_bound_scheme;
use tmscheme::measures::{report, ReportLimits};
use tmscheme::reduce::reduce_once;
use tmscheme::words::thue_morse_index;
use tmscheme::{thue_morse, MacroScheme, Word};
use wasm_bindgen::prelude::*;

/// Longest word `measure` accepts; there is no clock in the browser build.
pub const MAX_MEASURE_LEN: usize = 64;

type Res = Result<String, String>;

fn js(e: impl std::fmt::Display) -> String {
    e.to_string()
}

/// Text areas drop or double the final newline; the file formats want one.
fn file_text(s: &str) -> String {
    format!("{}\n", s.trim_end())
}

fn bind(r: Res) -> Result<String, JsError> {
    r.map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = word)]
pub fn word_js(n: u32) -> Result<String, JsError> {
    bind(word(n))
}

#[wasm_bindgen(js_name = construct)]
pub fn construct_js(n: u32) -> Result<String, JsError> {
    bind(construct(n))
}

#[wasm_bindgen(js_name = reduce)]
pub fn reduce_js(word: &str, scheme: &str) -> Result<String, JsError> {
    bind(reduce(word, scheme))
}

#[wasm_bindgen(js_name = measure)]
pub fn measure_js(word: &str) -> Result<String, JsError> {
    bind(measure(word))
}

/// t_n as a string.
pub fn word(n: u32) -> Res {
    if n > 16 {
        return Err(js("n must be at most 16"));
    }
    Ok(thue_morse(n).map_err(js)?.to_string())
}

/// The size-(n+2) scheme for t_n in the text file format.
pub fn construct(n: u32) -> Res {
    if n > 16 {
        return Err(js("n must be at most 16"));
    }
    Ok(upper_bound_scheme(n).map_err(js)?.serialize())
}

/// One reduction level. `word` must be a Thue-Morse word and `scheme` a
/// valid scheme for it; returns the trace, a summary and the new scheme.
pub fn reduce(word: &str, scheme: &str) -> Res {
    let w = Word::from_file_bytes(file_text(word).as_bytes()).map_err(js)?;
    let n = thue_morse_index(&w).ok_or_else(|| js("not a Thue-Morse word"))?;
    if n == 0 {
        return Err(js("t_0 cannot be reduced"));
    }
    let b = MacroScheme::parse(file_text(scheme).as_bytes()).map_err(js)?;
    if !b.is_valid_for(&w) {
        return Err(js("scheme is not valid for this word"));
    }
    let r = reduce_once(&b, n).map_err(js)?;
    let mut out = String::new();
    for event in &r.trace {
        out.push_str(&format!("{event}\n"));
    }
    out.push_str(&format!(
        "n={} size_in={} size_out={} size_bound={}\n\n",
        n,
        r.input_size,
        r.scheme.size(),
        r.size_bound()
    ));
    out.push_str(&r.scheme.serialize());
    Ok(out)
}

/// The measure report for a word as `key=value` lines.
pub fn measure(word: &str) -> Res {
    let w = Word::from_file_bytes(file_text(word).as_bytes()).map_err(js)?;
    if w.len() > MAX_MEASURE_LEN {
        return Err(js(format!("words longer than {MAX_MEASURE_LEN} are not measured here")));
    }
    let limits = ReportLimits { exact_limit: MAX_MEASURE_LEN, time_budget: None, workers: 1 };
    Ok(report(&w, &limits).map_err(js)?.to_key_values())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduce_round_trip() {
        let out = reduce(&word(6).unwrap(), &construct(6).unwrap()).unwrap();
        let scheme = out.split("\n\n").nth(1).unwrap();
        let b = MacroScheme::parse(file_text(scheme).as_bytes()).unwrap();
        assert!(b.is_valid_for(&thue_morse(5).unwrap()));
    }

    #[test]
    fn measure_t4() {
        let r = measure(&word(4).unwrap()).unwrap();
        assert!(r.contains("gamma=4\n"));
        assert!(r.contains("b_exact=6\n"));
    }
}
