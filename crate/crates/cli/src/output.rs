//! Text renderings of profiles, sweep matrices and reports.
//!
//! Every real is written as `{:.16e}`: 17 significant digits, which round-trip
//! any `f64` and never depend on locale or on how the value was reached.

use std::fmt::Write as _;

use rotor_core::CrossSectionProfile;
use serde::{Serialize, Serializer};
use serde_json::value::RawValue;

pub fn real(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        // Not reachable from the engines, which reject non-finite σ.
        "NaN".into()
    }
}

/// serde helper writing an `f64` with [`real`]; non-finite values become null.
pub fn json_real<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
    raw(*v).serialize(s)
}

pub fn json_reals<S: Serializer>(v: &[f64], s: S) -> Result<S::Ok, S::Error> {
    v.iter().map(|x| raw(*x)).collect::<Vec<_>>().serialize(s)
}

fn raw(v: f64) -> Box<RawValue> {
    let text = if v.is_finite() { real(v) } else { "null".into() };
    RawValue::from_string(text).expect("formatted reals are valid JSON")
}

fn channel_label((l_in, l_out): (i32, i32)) -> String {
    format!("sigma_{l_in}_{l_out}")
}

pub fn profile_csv(profile: &CrossSectionProfile) -> String {
    let channels = profile.per_channel();
    let mut out = String::from("theta,sigma");
    if let Some(ch) = channels {
        for key in ch.keys() {
            out.push(',');
            out.push_str(&channel_label(*key));
        }
    }
    out.push('\n');
    for (i, (t, s)) in profile.thetas().iter().zip(profile.sigma()).enumerate() {
        let _ = write!(out, "{},{}", real(*t), real(*s));
        if let Some(ch) = channels {
            for series in ch.values() {
                let _ = write!(out, ",{}", real(series[i]));
            }
        }
        out.push('\n');
    }
    out
}

#[derive(Serialize)]
struct ChannelJson<'a> {
    l_in: i32,
    l_out: i32,
    #[serde(serialize_with = "json_reals")]
    sigma: &'a [f64],
}

#[derive(Serialize)]
struct ProfileJson<'a> {
    engine: &'a str,
    #[serde(serialize_with = "json_real")]
    k: f64,
    #[serde(serialize_with = "json_reals")]
    theta: &'a [f64],
    #[serde(serialize_with = "json_reals")]
    sigma: &'a [f64],
    #[serde(skip_serializing_if = "Vec::is_empty")]
    channels: Vec<ChannelJson<'a>>,
}

pub fn profile_json(profile: &CrossSectionProfile, engine: &str, k: f64) -> String {
    let channels = profile
        .per_channel()
        .map(|ch| {
            ch.iter().map(|(&(l_in, l_out), sigma)| ChannelJson { l_in, l_out, sigma }).collect()
        })
        .unwrap_or_default();
    let doc = ProfileJson { engine, k, theta: profile.thetas(), sigma: profile.sigma(), channels };
    to_json(&doc)
}

/// σ sampled on a θ × k grid; `sigma[j][i]` is at `thetas[i]`, `ks[j]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepMatrix {
    pub engine: String,
    pub thetas: Vec<f64>,
    pub ks: Vec<f64>,
    pub sigma: Vec<Vec<f64>>,
}

/// Rows are θ, columns are k; the header row lists the k values.
pub fn sweep_csv(m: &SweepMatrix) -> String {
    let mut out = String::from("theta");
    for k in &m.ks {
        let _ = write!(out, ",k={}", real(*k));
    }
    out.push('\n');
    for (i, t) in m.thetas.iter().enumerate() {
        out.push_str(&real(*t));
        for column in &m.sigma {
            let _ = write!(out, ",{}", real(column[i]));
        }
        out.push('\n');
    }
    out
}

#[derive(Serialize)]
struct SweepJson<'a> {
    engine: &'a str,
    #[serde(serialize_with = "json_reals")]
    theta: &'a [f64],
    #[serde(serialize_with = "json_reals")]
    k: &'a [f64],
    /// One σ(θ) series per k.
    sigma: Vec<Series<'a>>,
}

#[derive(Serialize)]
#[serde(transparent)]
struct Series<'a>(#[serde(serialize_with = "json_reals")] &'a [f64]);

pub fn sweep_json(m: &SweepMatrix) -> String {
    to_json(&SweepJson {
        engine: &m.engine,
        theta: &m.thetas,
        k: &m.ks,
        sigma: m.sigma.iter().map(|c| Series(c)).collect(),
    })
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

const SVG_W: f64 = 640.0;
const SVG_H: f64 = 400.0;
const MARGIN: f64 = 50.0;

/// Line plot of one or more σ(θ) series sharing a θ grid.
pub fn svg_plot(title: &str, thetas: &[f64], series: &[&[f64]]) -> String {
    let (t0, t1) = match (thetas.first(), thetas.last()) {
        (Some(a), Some(b)) if b > a => (*a, *b),
        _ => (0.0, 1.0),
    };
    let top = series.iter().flat_map(|s| s.iter()).fold(0.0_f64, |a, &b| a.max(b));
    let top = if top > 0.0 { top } else { 1.0 };
    let x = |t: f64| MARGIN + (t - t0) / (t1 - t0) * (SVG_W - 2.0 * MARGIN);
    let y = |s: f64| SVG_H - MARGIN - s / top * (SVG_H - 2.0 * MARGIN);
    let mut out = String::new();
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{SVG_W}\" height=\"{SVG_H}\" \
         viewBox=\"0 0 {SVG_W} {SVG_H}\">"
    );
    let _ = writeln!(out, "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>");
    let (x0, x1, y0, y1) = (MARGIN, SVG_W - MARGIN, SVG_H - MARGIN, MARGIN);
    let _ = writeln!(
        out,
        "<path d=\"M{x0} {y1} L{x0} {y0} L{x1} {y0}\" fill=\"none\" stroke=\"black\"/>"
    );
    let _ = writeln!(
        out,
        "<text x=\"{}\" y=\"{}\" font-size=\"14\">{}</text>",
        x0,
        y1 - 20.0,
        escape(title)
    );
    let _ = writeln!(
        out,
        "<text x=\"{}\" y=\"{}\" font-size=\"12\">theta [{:.4}, {:.4}]</text>",
        x0,
        y0 + 30.0,
        t0,
        t1
    );
    let _ = writeln!(
        out,
        "<text x=\"5\" y=\"{}\" font-size=\"12\">sigma (max {:.4e})</text>",
        y1 - 5.0,
        top
    );
    for s in series {
        let points: Vec<String> = thetas
            .iter()
            .zip(s.iter())
            .map(|(&t, &v)| format!("{:.2},{:.2}", x(t), y(v)))
            .collect();
        let _ = writeln!(
            out,
            "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"1\" points=\"{}\"/>",
            points.join(" ")
        );
    }
    out.push_str("</svg>\n");
    out
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reals_round_trip() {
        for v in [0.1, 1.0 / 3.0, 6.02e23, -2.5e-300, 0.0, f64::MIN_POSITIVE] {
            let text = real(v);
            assert_eq!(text.parse::<f64>().unwrap().to_bits(), v.to_bits(), "{text}");
        }
        assert_eq!(real(1.0), "1.0000000000000000e0");
    }

    #[test]
    fn profile_csv_layout() {
        let p = CrossSectionProfile::from_samples(vec![0.0, 0.5], vec![1.0, 2.0]).unwrap();
        assert_eq!(
            profile_csv(&p),
            "theta,sigma\n0.0000000000000000e0,1.0000000000000000e0\n\
             5.0000000000000000e-1,2.0000000000000000e0\n"
        );
    }

    #[test]
    fn json_numbers_are_raw() {
        let p = CrossSectionProfile::from_samples(vec![0.25], vec![3.0]).unwrap();
        let json = profile_json(&p, "structureless", 2.0);
        let back: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(back["sigma"][0], 3.0);
        assert!(json.contains("2.5000000000000000e-1"));
    }
}
