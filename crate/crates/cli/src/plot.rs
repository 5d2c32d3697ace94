//! Deterministic SVG plots of stored results: profile curves, the
//! Levi-Civita reference dashed, and the pointwise curvature norm scaled to
//! its own maximum. Output bytes depend only on the input document.

use anyhow::Result;
use std::fmt::Write as _;
use ymjoin::functional::JoinProblem;
use ymjoin::results::{ProblemDoc, ResultDoc, StoredProfile};

const W: f64 = 900.0;
const H: f64 = 560.0;
const ML: f64 = 60.0;
const MR: f64 = 20.0;
const MT: f64 = 24.0;
const MB: f64 = 44.0;

struct Frame {
    t_lo: f64,
    t_hi: f64,
    y_lo: f64,
    y_hi: f64,
}

impl Frame {
    fn x(&self, t: f64) -> f64 {
        ML + (t - self.t_lo) / (self.t_hi - self.t_lo) * (W - ML - MR)
    }

    fn y(&self, v: f64) -> f64 {
        H - MB - (v - self.y_lo) / (self.y_hi - self.y_lo) * (H - MT - MB)
    }
}

fn polyline(out: &mut String, frame: &Frame, ts: &[f64], vs: &[f64], style: &str) {
    let mut points = String::new();
    for (t, v) in ts.iter().zip(vs) {
        let _ = write!(points, "{:.4},{:.4} ", frame.x(*t), frame.y(*v));
    }
    let _ = writeln!(
        out,
        "<polyline fill=\"none\" {style} points=\"{}\"/>",
        points.trim_end()
    );
}

fn downsample(n: usize, keep: usize) -> Vec<usize> {
    if n <= keep {
        return (0..n).collect();
    }
    let mut idx: Vec<usize> = (0..keep)
        .map(|i| i * (n - 1) / (keep - 1))
        .collect();
    idx.dedup();
    idx
}

pub fn render(doc: &ResultDoc) -> Result<String> {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\">"
    );
    let _ = writeln!(out, "<rect width=\"{W}\" height=\"{H}\" fill=\"white\"/>");

    match (&doc.problem, &doc.profile) {
        (ProblemDoc::Join { eig1, eig2 }, StoredProfile::Join(f)) => {
            let p = JoinProblem::new(eig1.clone(), eig2.clone())
                .map_err(|e| anyhow::anyhow!("{e}"))?;
            let frame = Frame {
                t_lo: 0.0,
                t_hi: std::f64::consts::FRAC_PI_2,
                y_lo: -0.05,
                y_hi: 1.1,
            };
            axes(&mut out, &frame, "t", "alpha, beta");
            let idx = downsample(f.len(), 600);
            let ts: Vec<f64> = idx.iter().map(|&i| f.grid.nodes()[i]).collect();
            // Levi-Civita reference dashed
            let sins: Vec<f64> = ts.iter().map(|t| t.sin()).collect();
            let coss: Vec<f64> = ts.iter().map(|t| t.cos()).collect();
            polyline(&mut out, &frame, &ts, &sins, "stroke=\"#9f9f9f\" stroke-width=\"1\" stroke-dasharray=\"6 4\"");
            polyline(&mut out, &frame, &ts, &coss, "stroke=\"#9f9f9f\" stroke-width=\"1\" stroke-dasharray=\"6 4\"");
            let al: Vec<f64> = idx.iter().map(|&i| f.alpha[i]).collect();
            let be: Vec<f64> = idx.iter().map(|&i| f.beta[i]).collect();
            polyline(&mut out, &frame, &ts, &al, "stroke=\"#c0392b\" stroke-width=\"2\"");
            polyline(&mut out, &frame, &ts, &be, "stroke=\"#2471a3\" stroke-width=\"2\"");
            // curvature norm scaled to its own max
            let trace = ymjoin::geometry::f_norm_trace(&p, f);
            let fn2: Vec<f64> = idx.iter().map(|&i| trace[i]).collect();
            let fmax = fn2.iter().fold(1e-300f64, |m, v| m.max(*v));
            let scaled: Vec<f64> = fn2.iter().map(|v| v / fmax).collect();
            polyline(&mut out, &frame, &ts, &scaled, "stroke=\"#1e8449\" stroke-width=\"1.2\"");
            legend(
                &mut out,
                &[
                    ("#c0392b", "alpha"),
                    ("#2471a3", "beta"),
                    ("#9f9f9f", "sin, cos reference"),
                    ("#1e8449", &format!("|F|^2 / {fmax:.6e}")),
                ],
            );
        }
        (
            ProblemDoc::Suspension {
                m1, lambda1, mu1, ..
            },
            StoredProfile::Suspension(f),
        ) => {
            let frame = Frame {
                t_lo: -std::f64::consts::FRAC_PI_2,
                t_hi: std::f64::consts::FRAC_PI_2,
                y_lo: -1.1,
                y_hi: 1.1,
            };
            axes(&mut out, &frame, "t", "alpha");
            let idx = downsample(f.len(), 600);
            let ts: Vec<f64> = idx.iter().map(|&i| f.grid.nodes()[i]).collect();
            let sins: Vec<f64> = ts.iter().map(|t| t.sin()).collect();
            polyline(&mut out, &frame, &ts, &sins, "stroke=\"#9f9f9f\" stroke-width=\"1\" stroke-dasharray=\"6 4\"");
            let al: Vec<f64> = idx.iter().map(|&i| f.alpha[i]).collect();
            polyline(&mut out, &frame, &ts, &al, "stroke=\"#c0392b\" stroke-width=\"2\"");
            // |F|^2 = 4 l1 a'^2/cos^2 + 2 l1 m1 (a^2-1)^2/cos^4
            let (d1, _) = f.derivatives();
            let fn2: Vec<f64> = idx
                .iter()
                .map(|&i| {
                    let c = f.grid.cos(i);
                    let a = f.alpha[i];
                    4.0 * lambda1 * d1[i] * d1[i] / (c * c)
                        + 2.0 * lambda1 * mu1 * (a * a - 1.0).powi(2) / c.powi(4)
                })
                .collect();
            let fmax = fn2.iter().fold(1e-300f64, |m, v| m.max(*v));
            let scaled: Vec<f64> = fn2.iter().map(|v| 2.0 * v / fmax - 1.0).collect();
            polyline(&mut out, &frame, &ts, &scaled, "stroke=\"#1e8449\" stroke-width=\"1.2\"");
            legend(
                &mut out,
                &[
                    ("#c0392b", &format!("alpha (m1 = {m1})")),
                    ("#9f9f9f", "sin reference"),
                    ("#1e8449", &format!("|F|^2 / {fmax:.6e} (rescaled)")),
                ],
            );
        }
        _ => anyhow::bail!("result document mixes problem and profile kinds"),
    }
    let _ = writeln!(out, "</svg>");
    Ok(out)
}

fn axes(out: &mut String, frame: &Frame, xlabel: &str, ylabel: &str) {
    let x0 = frame.x(frame.t_lo);
    let x1 = frame.x(frame.t_hi);
    let y0 = frame.y(frame.y_lo);
    let y1 = frame.y(frame.y_hi);
    let _ = writeln!(
        out,
        "<rect x=\"{x0:.4}\" y=\"{y1:.4}\" width=\"{:.4}\" height=\"{:.4}\" fill=\"none\" stroke=\"#333\" stroke-width=\"1\"/>",
        x1 - x0,
        y0 - y1
    );
    let _ = writeln!(
        out,
        "<text x=\"{:.4}\" y=\"{:.4}\" font-family=\"monospace\" font-size=\"13\">{xlabel}</text>",
        (x0 + x1) / 2.0,
        H - 12.0
    );
    let _ = writeln!(
        out,
        "<text x=\"14\" y=\"{:.4}\" font-family=\"monospace\" font-size=\"13\" transform=\"rotate(-90 14 {:.4})\">{ylabel}</text>",
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0
    );
    // zero line if inside the frame
    if frame.y_lo < 0.0 && frame.y_hi > 0.0 {
        let yz = frame.y(0.0);
        let _ = writeln!(
            out,
            "<line x1=\"{x0:.4}\" y1=\"{yz:.4}\" x2=\"{x1:.4}\" y2=\"{yz:.4}\" stroke=\"#ddd\" stroke-width=\"1\"/>"
        );
    }
}

fn legend(out: &mut String, entries: &[(&str, &str)]) {
    let mut y = MT + 14.0;
    for (color, label) in entries {
        let _ = writeln!(
            out,
            "<line x1=\"{:.4}\" y1=\"{:.4}\" x2=\"{:.4}\" y2=\"{:.4}\" stroke=\"{color}\" stroke-width=\"2\"/>",
            ML + 12.0,
            y - 4.0,
            ML + 44.0,
            y - 4.0
        );
        let _ = writeln!(
            out,
            "<text x=\"{:.4}\" y=\"{:.4}\" font-family=\"monospace\" font-size=\"12\">{label}</text>",
            ML + 52.0,
            y
        );
        y += 16.0;
    }
}
