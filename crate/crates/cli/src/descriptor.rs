//! Measure and cost descriptors: a preset name, inline JSON, or a path to a
//! JSON file.

use std::path::Path;

use otline::examples::example_by_name;
use otline::{CostFunction, Distribution1D, MonotoneMap};

pub const MEASURE_PRESETS: [&str; 7] = ["mu1", "gaussian", "cauchy", "staircase", "ceil-sqrt", "tbar", "section41"];

pub const COST_PRESETS: &str = "quadratic, beta2, maurey, power:<p>, alpha1:<h>, zero-power:<h>:<p>";

fn json_source(text: &str) -> Result<Option<String>, String> {
    let t = text.trim_start();
    if t.starts_with('{') {
        return Ok(Some(text.to_string()));
    }
    let p = Path::new(text);
    if p.is_file() {
        return std::fs::read_to_string(p)
            .map(Some)
            .map_err(|e| format!("cannot read {text}: {e}"));
    }
    Ok(None)
}

pub fn parse_measure(text: &str) -> Result<Distribution1D, String> {
    if let Some(json) = json_source(text)? {
        return serde_json::from_str(&json).map_err(|e| format!("invalid measure JSON: {e}"));
    }
    let mu1 = Distribution1D::two_sided_exponential;
    let out = match text {
        "mu1" => Ok(mu1()),
        "gaussian" => Distribution1D::gaussian(0.0, 1.0),
        "cauchy" => Distribution1D::cauchy(0.0, 1.0),
        "staircase" => Distribution1D::pushforward(mu1(), MonotoneMap::Staircase),
        "ceil-sqrt" => Distribution1D::pushforward(mu1(), MonotoneMap::CeilSqrt),
        "tbar" => Distribution1D::pushforward(mu1(), MonotoneMap::WaitStep),
        "section41" => example_by_name("section41").map(|b| b.measure),
        _ => {
            return Err(format!(
                "unknown measure {text:?}; expected JSON, a file path or one of {}",
                MEASURE_PRESETS.join(", ")
            ))
        }
    };
    out.map_err(|e| e.to_string())
}

fn number(field: &str, s: &str) -> Result<f64, String> {
    s.parse().map_err(|_| format!("{field}: {s:?} is not a number"))
}

pub fn parse_cost(text: &str) -> Result<CostFunction, String> {
    if let Some(json) = json_source(text)? {
        let c: CostFunction = serde_json::from_str(&json).map_err(|e| format!("invalid cost JSON: {e}"))?;
        c.validate().map_err(|e| e.to_string())?;
        return Ok(c);
    }
    let parts: Vec<&str> = text.split(':').collect();
    let c = match parts.as_slice() {
        ["quadratic"] => CostFunction::quadratic(),
        ["beta2"] => CostFunction::beta2(),
        ["maurey"] => CostFunction::maurey(),
        ["power", p] => CostFunction::power(number("p", p)?),
        ["alpha1", h] => CostFunction::alpha1(number("h", h)?),
        ["zero-power", h, p] => CostFunction::ZeroThenPower {
            h: number("h", h)?,
            p: number("p", p)?,
        },
        _ => return Err(format!("unknown cost {text:?}; expected JSON, a file path or one of {COST_PRESETS}")),
    };
    c.validate().map_err(|e| e.to_string())?;
    Ok(c)
}
