use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use super::run::{EventSource, RunReport};
use super::Measure;
use crate::Result;

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

/// `series.csv`: one row per grid time.
pub fn series_csv(r: &RunReport) -> String {
    let s = &r.scenario;
    let collective = r.series.iter().any(|x| x.s_branches.is_some());
    let mut head = vec!["t", "lambda1", "lambda2", "lambda3"];
    if s.wants(Measure::Geometric) {
        head.push("D_geo");
    }
    if s.wants(Measure::InfoNumeric) {
        head.push("D_info");
    }
    let closed = r.series.iter().any(|x| x.d_info_closed.is_some());
    if closed {
        head.push("D_info_closed");
    }
    if collective {
        head.extend(["s_zero", "s_plus", "s_minus"]);
    }
    let mut out = head.join(",");
    out.push('\n');
    for row in &r.series {
        let mut cells = vec![num(row.t)];
        cells.extend(row.lambda.iter().map(|v| num(*v)));
        if s.wants(Measure::Geometric) {
            cells.push(opt(row.d_geo));
        }
        if s.wants(Measure::InfoNumeric) {
            cells.push(opt(row.d_info));
        }
        if closed {
            cells.push(opt(row.d_info_closed));
        }
        if collective {
            let b = row.s_branches.map(|b| b.map(Some)).unwrap_or([None; 3]);
            cells.extend(b.iter().map(|v| opt(*v)));
        }
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

/// `events.csv`: every detected crossing and measurement switch.
pub fn events_csv(r: &RunReport) -> String {
    let mut out = String::from(
        "measure,t_star,branch_pair,lambda_at_crossing,kind,involves_max,sudden_change,left_slope,right_slope,jump,discontinuous\n",
    );
    for e in &r.events {
        let pair = e
            .branch_pair
            .map(|(m, n)| format!("{}-{}", m + 1, n + 1))
            .unwrap_or_default();
        let (l, rs, j, d) = match e.jump {
            Some(j) => (
                num(j.left_slope),
                num(j.right_slope),
                num(j.jump),
                j.discontinuous.to_string(),
            ),
            None => Default::default(),
        };
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{}",
            e.source.as_str(),
            num(e.t_star),
            pair,
            opt(e.lambda_at_crossing),
            e.kind,
            e.involves_max,
            e.sudden_change,
            l,
            rs,
            j,
            d
        );
    }
    out
}

fn list(v: &[f64]) -> String {
    if v.is_empty() {
        "none".into()
    } else {
        v.iter().map(|x| format!("{x:.6}")).collect::<Vec<_>>().join(", ")
    }
}

/// Human-readable summary.
pub fn report_text(r: &RunReport) -> String {
    let s = &r.scenario;
    let p = &r.provenance;
    let mut out = String::new();
    let _ = writeln!(out, "scenario: {} ({})", s.name, s.family.name());
    let _ = writeln!(out, "time axis: {}", p.time_axis);
    let _ = writeln!(
        out,
        "window: [{}, {}] with {} points (step {:.3e})",
        s.window.start, s.window.end, s.window.points, r.grid_step
    );
    let measures: Vec<&str> = s.measures.iter().map(|m| m.as_str()).collect();
    let _ = writeln!(out, "measures: {}", measures.join(", "));
    out.push('\n');

    let crossings = r.events.iter().filter(|e| e.source == EventSource::Geometric).count();
    let _ = writeln!(out, "eigenvalue crossings of A: {crossings} logged");
    let _ = writeln!(out, "geometric critical points: {}", list(&r.geometric_critical));
    if s.wants(Measure::InfoNumeric) {
        let _ = writeln!(
            out,
            "information critical points (numerical): {}",
            list(&r.info_numeric_critical)
        );
    }
    if r.series.iter().any(|x| x.d_info_closed.is_some()) {
        let _ = writeln!(
            out,
            "information critical points (closed form): {}",
            list(&r.info_closed_critical)
        );
    }
    if let Some(d) = r.closed_vs_numeric {
        let _ = writeln!(out, "max |closed form - numerical| information discord: {d:.3e}");
    }
    if let Some(t) = r.closed_form_term_defects {
        out.push_str("closed-form sub-term audit (largest gap over sampled rows):\n");
        let _ = writeln!(out, "  u+-, v+- vs spectrum of rho: {:.3e}", t.eigenvalues);
        let _ = writeln!(out, "  1 + H(R) vs S(rho_B): {:.3e}", t.marginal_entropy);
        let _ = writeln!(out, "  -sum(u log u + v log v) vs -S(rho): {:.3e}", t.joint_entropy);
        let _ = writeln!(
            out,
            "  min s vs numerical min conditional entropy: {:.3e}",
            t.conditional_entropy
        );
    }
    let both = s.wants(Measure::Geometric) && (s.wants(Measure::InfoNumeric) || !r.info_closed_critical.is_empty());
    if both {
        if r.critical_points_coincide() {
            let _ = writeln!(
                out,
                "geometric and information critical points coincide within grid resolution"
            );
        } else {
            let _ = writeln!(out, "geometric and information critical points do not coincide");
        }
    }
    out.push('\n');

    for e in r.events.iter().filter(|e| e.sudden_change) {
        let pair = e
            .branch_pair
            .map(|(m, n)| format!(" branches {}-{}", m + 1, n + 1))
            .unwrap_or_default();
        let verdict = match e.jump {
            Some(j) if j.discontinuous => format!("slope jump {:+.6e} (noise {:.1e})", j.jump, j.noise),
            Some(j) => format!("no resolvable slope jump ({:+.1e}, noise {:.1e})", j.jump, j.noise),
            None => "not tested".into(),
        };
        let _ = writeln!(
            out,
            "sudden change [{}] at {:.10}{}: {}",
            e.source.as_str(),
            e.t_star,
            pair,
            verdict
        );
    }

    if !p.reference_annotations.is_empty() {
        out.push_str("\nreference values from the figure captions:\n");
        for a in &p.reference_annotations {
            let _ = writeln!(out, "  - {a}");
        }
    }
    if !r.warnings.is_empty() {
        out.push_str("\nwarnings:\n");
        for w in &r.warnings {
            let _ = writeln!(out, "  - {w}");
        }
    }
    out
}

/// Writes `series.csv`, `events.csv`, `report.txt` and `params.json` into
/// `out_dir`, creating it if needed. Returns the written paths.
pub fn emit(r: &RunReport, out_dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(out_dir)?;
    let params = serde_json::to_string_pretty(&r.provenance).expect("provenance serialises") + "\n";
    let files = [
        ("series.csv", series_csv(r)),
        ("events.csv", events_csv(r)),
        ("report.txt", report_text(r)),
        ("params.json", params),
    ];
    let mut paths = Vec::new();
    for (name, body) in files {
        let path = out_dir.join(name);
        fs::write(&path, body)?;
        paths.push(path);
    }
    Ok(paths)
}
