use nalgebra::Vector3;
use rayon::prelude::*;
use serde::Serialize;

use super::{Family, Measure, Scenario};
use crate::channels::{
    amplitude_damping, apply_product_channel, evolve_bd_colored, evolve_bd_phase_bitflip, evolve_bd_phase_phase,
    markov_probability, ColoredNoiseParams,
};
use crate::collective::{collective_eigs_a, collective_state_with, CollectiveCoefficients, CollectiveParams};
use crate::discord::{
    axis_labeled_eigenvalues, bell_diagonal_info_discord, collective_term_defects, conditional_entropy,
    correlation_matrix, geometric_discord, info_discord_collective, info_discord_numeric, CollectiveTermDefects,
    MeasuredSubsystem, OptimizerOptions, DISCREPANCY_TOL,
};
use crate::qstate::{bell_diagonal, pauli_decompose, BellDiagonalParams, DensityMatrix};
use crate::witness::{
    default_h_schedule, derivative_jump, detect_crossings, match_branches, refine_crossing_with_tol, refine_events,
    CrossingEvent, DerivativeJump,
};
use crate::{Error, Result};

/// Grid used when the default one cannot separate the branches.
const REFINED_POINTS: usize = 8000;
/// Optimal measurement axes further apart than this between samples mark a switch.
const DIRECTION_JUMP: f64 = 0.3;
/// Conditional-entropy differences below this count as a flat objective.
const FLAT_OBJECTIVE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct RunOptions {
    /// Overrides the scenario's grid size.
    pub points: Option<usize>,
    /// Overrides the scenario's measures.
    pub measures: Option<Vec<Measure>>,
    /// Relative tolerance of crossing refinement.
    pub refine_tol: f64,
    /// Evaluate the numerical information discord at every K-th grid point.
    pub down_sample_info: usize,
    pub optimizer: OptimizerOptions,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            points: None,
            measures: None,
            refine_tol: 1e-12,
            down_sample_info: 1,
            optimizer: OptimizerOptions::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeriesRow {
    pub t: f64,
    /// Continuity-matched eigenvalue branches of `A`.
    pub lambda: [f64; 3],
    pub d_geo: Option<f64>,
    pub d_info: Option<f64>,
    pub d_info_closed: Option<f64>,
    /// `(s₀, s₊, s₋)` of the collective closed form.
    pub s_branches: Option<[f64; 3]>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EventSource {
    /// Eigenvalue branches of `A`.
    Geometric,
    /// Switch of the optimal measurement axis.
    InfoNumeric,
    /// Branches entering the closed-form minimum.
    InfoClosedForm,
}

impl EventSource {
    pub fn as_str(self) -> &'static str {
        match self {
            EventSource::Geometric => "geometric",
            EventSource::InfoNumeric => "info-numeric",
            EventSource::InfoClosedForm => "info-closed-form",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReportEvent {
    pub source: EventSource,
    pub t_star: f64,
    /// Zero-based branch identities; `None` for measurement-axis switches.
    pub branch_pair: Option<(usize, usize)>,
    pub lambda_at_crossing: Option<f64>,
    /// `crossing`, `osculation` or `direction-switch`.
    pub kind: &'static str,
    pub involves_max: bool,
    pub sudden_change: bool,
    pub refined: bool,
    /// Derivative test of the matching discord curve at `t_star`.
    pub jump: Option<DerivativeJump>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Provenance {
    pub tool: &'static str,
    pub version: &'static str,
    pub scenario: Scenario,
    pub time_axis: &'static str,
    pub points: usize,
    pub refine_tol: f64,
    pub down_sample_info: usize,
    pub optimizer_theta_points: usize,
    pub optimizer_phi_points: usize,
    pub optimizer_starts: usize,
    pub optimizer_tol: f64,
    pub derivative_steps: [f64; 3],
    pub reference_annotations: Vec<String>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub scenario: Scenario,
    pub series: Vec<SeriesRow>,
    pub events: Vec<ReportEvent>,
    pub geometric_critical: Vec<f64>,
    pub info_numeric_critical: Vec<f64>,
    pub info_closed_critical: Vec<f64>,
    /// Grid spacing of the run.
    pub grid_step: f64,
    /// Largest `|closed form − numeric|` over rows with both values.
    pub closed_vs_numeric: Option<f64>,
    /// Largest per-term gaps of the collective closed form over the sampled rows.
    pub closed_form_term_defects: Option<CollectiveTermDefects>,
    pub provenance: Provenance,
    pub warnings: Vec<String>,
}

impl RunReport {
    pub fn sudden_changes(&self, source: EventSource) -> impl Iterator<Item = &ReportEvent> {
        self.events
            .iter()
            .filter(move |e| e.source == source && e.sudden_change)
    }

    /// The information-theoretic critical points used for comparison:
    /// numerical when available, otherwise closed form.
    pub fn info_critical(&self) -> &[f64] {
        if self.scenario.wants(Measure::InfoNumeric) {
            &self.info_numeric_critical
        } else {
            &self.info_closed_critical
        }
    }

    /// Geometric and information critical points agree in number and each
    /// pair lies within two grid steps of the information sampling.
    pub fn critical_points_coincide(&self) -> bool {
        let tol = 2.0 * self.grid_step * self.provenance.down_sample_info.max(1) as f64;
        let g = &self.geometric_critical;
        let i = self.info_critical();
        g.len() == i.len() && g.iter().zip(i).all(|(a, b)| (a - b).abs() <= tol)
    }
}

enum Model {
    PhaseBitflip {
        c0: BellDiagonalParams,
        g: [f64; 2],
    },
    PhasePhase {
        c0: BellDiagonalParams,
        g: [f64; 2],
    },
    Colored {
        c0: BellDiagonalParams,
        pa: ColoredNoiseParams,
        pb: ColoredNoiseParams,
        two_tau: f64,
    },
    Amplitude {
        rho0: DensityMatrix,
        g: [f64; 2],
    },
    Collective {
        p: CollectiveParams,
        k: CollectiveCoefficients,
    },
}

impl Model {
    fn new(f: &Family) -> Result<Self> {
        Ok(match *f {
            Family::BellDiagonalPhaseBitflip(p) => Model::PhaseBitflip {
                c0: BellDiagonalParams::from_array(p.c0),
                g: p.gamma,
            },
            Family::BellDiagonalPhasePhase(p) => Model::PhasePhase {
                c0: BellDiagonalParams::from_array(p.c0),
                g: p.gamma,
            },
            Family::BellDiagonalColored(p) => Model::Colored {
                c0: BellDiagonalParams::from_array(p.c0),
                pa: ColoredNoiseParams::new(p.a[0], p.tau[0])?,
                pb: ColoredNoiseParams::new(p.a[1], p.tau[1])?,
                two_tau: 2.0 * p.tau[0],
            },
            Family::AmplitudeDamping(p) => Model::Amplitude {
                rho0: bell_diagonal(BellDiagonalParams::from_array(p.c0))?,
                g: p.gamma,
            },
            Family::Collective(p) => {
                let p = p.to_params()?;
                Model::Collective {
                    p,
                    k: CollectiveCoefficients::new(&p)?,
                }
            }
        })
    }

    /// Smallest admissible time, for keeping difference stencils in range.
    fn domain_start(&self) -> f64 {
        match self {
            Model::Amplitude { .. } | Model::Collective { .. } => 0.0,
            _ => f64::NEG_INFINITY,
        }
    }

    fn bd(&self, x: f64) -> Option<BellDiagonalParams> {
        match *self {
            Model::PhaseBitflip { c0, g } => Some(evolve_bd_phase_bitflip(c0, g[0], g[1], x)),
            Model::PhasePhase { c0, g } => Some(evolve_bd_phase_phase(c0, g[0], g[1], x)),
            Model::Colored { c0, pa, pb, two_tau } => Some(evolve_bd_colored(c0, pa, pb, x * two_tau)),
            _ => None,
        }
    }

    fn state(&self, x: f64) -> Result<DensityMatrix> {
        if let Some(c) = self.bd(x) {
            return bell_diagonal(c);
        }
        match self {
            Model::Amplitude { rho0, g } => {
                let a = amplitude_damping(markov_probability(g[0], x))?;
                let b = amplitude_damping(markov_probability(g[1], x))?;
                apply_product_channel(rho0, &a, &b)
            }
            Model::Collective { p, k } => {
                if !(x >= 0.0) {
                    return Err(Error::InvalidArgument(format!("upsilon = {x} must be >= 0")));
                }
                Ok(collective_state_with(p, k, x / p.gamma))
            }
            _ => unreachable!("Bell-diagonal families handled above"),
        }
    }

    /// Axis-labelled spectrum of `A`.
    fn branches(&self, x: f64) -> Result<[f64; 3]> {
        if let Some(c) = self.bd(x) {
            return Ok(c.as_array().map(|v| v * v));
        }
        let rho = self.state(x)?;
        match self {
            Model::Collective { .. } => Ok(collective_eigs_a(&rho)?.as_array()),
            _ => Ok(axis_labeled_eigenvalues(
                correlation_matrix(&pauli_decompose(&rho)).matrix(),
            )),
        }
    }

    fn has_closed_form(&self) -> bool {
        !matches!(self, Model::Amplitude { .. })
    }

    /// Closed-form information discord and the branches entering its
    /// minimum, arranged so the relevant branch is the largest.
    fn closed_form(&self, x: f64) -> Result<(f64, [f64; 3], Option<[f64; 3]>)> {
        if let Some(c) = self.bd(x) {
            let d = bell_diagonal_info_discord(&c)?;
            return Ok((d, c.as_array().map(f64::abs), None));
        }
        let rho = self.state(x)?;
        let (d, terms) = info_discord_collective(&rho)?;
        let s = terms.s_branches();
        Ok((d, s.map(|v| -v), Some(s)))
    }
}

struct Sample {
    row: SeriesRow,
    raw_lambda: [f64; 3],
    direction: Option<Vector3<f64>>,
    closed_branches: Option<[f64; 3]>,
    term_defects: Option<CollectiveTermDefects>,
}

/// Runs a scenario with default options.
pub fn run(s: &Scenario) -> Result<RunReport> {
    run_with(s, &RunOptions::default())
}

pub fn run_with(s: &Scenario, opts: &RunOptions) -> Result<RunReport> {
    let wrap = |e: Error| Error::Scenario {
        scenario: s.name.clone(),
        source: Box::new(e),
    };
    let mut scenario = s.clone();
    if let Some(n) = opts.points {
        scenario.window.points = n;
    }
    if let Some(m) = &opts.measures {
        scenario.measures = m.clone();
    }
    scenario.check().map_err(wrap)?;
    if opts.down_sample_info == 0 {
        return Err(wrap(Error::InvalidArgument("down-sample factor must be >= 1".into())));
    }
    match run_once(&scenario, opts, Vec::new()) {
        Err(Error::GridTooCoarse { t }) if scenario.window.points < REFINED_POINTS => {
            let warning = format!(
                "branch matching ambiguous near {t:.6} on {} points; rerun on {REFINED_POINTS} points",
                scenario.window.points
            );
            scenario.window.points = REFINED_POINTS;
            run_once(&scenario, opts, vec![warning]).map_err(wrap)
        }
        other => other.map_err(wrap),
    }
}

fn run_once(s: &Scenario, opts: &RunOptions, mut warnings: Vec<String>) -> Result<RunReport> {
    let model = Model::new(&s.family)?;
    warnings.extend(s.placeholder_warning());

    let mut closed = s.wants(Measure::InfoClosedForm);
    if closed && !model.has_closed_form() {
        warnings.push(format!(
            "info-closed-form is not available for the {} family; skipped",
            s.family.name()
        ));
        closed = false;
    }
    let numeric = s.wants(Measure::InfoNumeric);
    let geometric = s.wants(Measure::Geometric);

    let times = s.window.grid();
    let last = times.len() - 1;
    let k_info = opts.down_sample_info;
    let samples: Vec<Sample> = times
        .par_iter()
        .enumerate()
        .map(|(k, &x)| -> Result<Sample> {
            let rho = model.state(x)?;
            let raw_lambda = model.branches(x)?;
            let d_geo = geometric.then(|| geometric_discord(&rho));
            let info = if numeric && (k % k_info == 0 || k == last) {
                Some(info_discord_numeric(&rho, &opts.optimizer)?)
            } else {
                None
            };
            let term_defects = match (&model, info) {
                (Model::Collective { .. }, Some(i)) if closed && opts.optimizer.measured == MeasuredSubsystem::B => {
                    let (_, terms) = info_discord_collective(&rho)?;
                    Some(collective_term_defects(&rho, &terms, i.min_conditional_entropy)?)
                }
                _ => None,
            };
            let (d_info, direction) = (info.map(|i| i.value), info.map(|i| i.direction));
            let (d_info_closed, closed_branches, s_branches) = if closed {
                let (d, b, sb) = model.closed_form(x)?;
                (Some(d), Some(b), sb)
            } else {
                (None, None, None)
            };
            Ok(Sample {
                row: SeriesRow {
                    t: x,
                    lambda: raw_lambda,
                    d_geo,
                    d_info,
                    d_info_closed,
                    s_branches,
                },
                raw_lambda,
                direction,
                closed_branches,
                term_defects,
            })
        })
        .collect::<Result<_>>()?;

    let grid_step = s.window.length() / last as f64;
    let h_scale = s.window.length();
    let steps = default_h_schedule(h_scale);
    let stencil = |t: f64| -> Vec<f64> {
        // keep the widest stencil (3h) inside the model's domain
        let room = (t - model.domain_start()) / (3.0 * steps[0] / h_scale);
        let scale = h_scale.min(room);
        default_h_schedule(scale).to_vec()
    };
    let mut events = Vec::new();

    // geometric: eigenvalue branches of A
    let raw: Vec<[f64; 3]> = samples.iter().map(|x| x.raw_lambda).collect();
    let series = match_branches(&times, &raw)?;
    let found = detect_crossings(&series);
    let refined = refine_events(&series, &found, |x| model.branches(x), opts.refine_tol)?;
    let geo_fn = |x: f64| model.state(x).map(|r| geometric_discord(&r)).unwrap_or(f64::NAN);
    events.extend(refined.iter().map(|e| {
        let sudden = e.is_sudden_change();
        to_report(
            EventSource::Geometric,
            e,
            (sudden && geometric).then(|| derivative_jump(geo_fn, e.t_star, &stencil(e.t_star))),
        )
    }));

    let mut rows: Vec<SeriesRow> = samples.iter().map(|x| x.row).collect();
    for (k, row) in rows.iter_mut().enumerate() {
        row.lambda = series.values_at(k);
    }

    // closed-form information discord
    if closed {
        let raw: Vec<[f64; 3]> = samples
            .iter()
            .map(|x| x.closed_branches.expect("closed form sampled"))
            .collect();
        let cs = match_branches(&times, &raw)?;
        let found = detect_crossings(&cs);
        let branch_fn = |x: f64| model.closed_form(x).map(|c| c.1);
        let refined = refine_events(&cs, &found, branch_fn, opts.refine_tol)?;
        let d_fn = |x: f64| model.closed_form(x).map(|c| c.0).unwrap_or(f64::NAN);
        events.extend(refined.iter().map(|e| {
            let mut r = to_report(
                EventSource::InfoClosedForm,
                e,
                e.is_sudden_change()
                    .then(|| derivative_jump(d_fn, e.t_star, &stencil(e.t_star))),
            );
            // branches are stored negated for the collective family
            if let Some(l) = r.lambda_at_crossing.as_mut() {
                if matches!(model, Model::Collective { .. }) {
                    *l = -*l;
                }
            }
            r
        }));
    }

    // numerical information discord: optimal-axis switches
    if numeric {
        let side = opts.optimizer.measured;
        let sampled: Vec<(f64, Vector3<f64>)> = samples
            .iter()
            .filter_map(|x| x.direction.map(|d| (x.row.t, d)))
            .collect();
        let info_fn = |x: f64| {
            model
                .state(x)
                .and_then(|r| info_discord_numeric(&r, &opts.optimizer))
                .map(|r| r.value)
                .unwrap_or(f64::NAN)
        };
        for w in sampled.windows(2) {
            let ((t0, n0), (t1, n1)) = (w[0], w[1]);
            let angle = n0.dot(&n1).abs().min(1.0).acos();
            if angle <= DIRECTION_JUMP {
                continue;
            }
            let g = |x: f64| match model.state(x) {
                Ok(r) => conditional_entropy(&r, &n0, side) - conditional_entropy(&r, &n1, side),
                Err(_) => f64::NAN,
            };
            // both axes equally good at either end: a flat objective, not a switch
            if !(g(t0) < -FLAT_OBJECTIVE && g(t1) > FLAT_OBJECTIVE) {
                continue;
            }
            let (t_star, refined) = match refine_crossing_with_tol(g, (t0, t1), opts.refine_tol) {
                Ok(t) => (t, true),
                Err(_) => {
                    warnings.push(format!(
                        "optimal measurement axis switches within [{t0:.6}, {t1:.6}] without a clean crossing; midpoint reported"
                    ));
                    (0.5 * (t0 + t1), false)
                }
            };
            events.push(ReportEvent {
                source: EventSource::InfoNumeric,
                t_star,
                branch_pair: None,
                lambda_at_crossing: None,
                kind: "direction-switch",
                involves_max: true,
                sudden_change: true,
                refined,
                jump: Some(derivative_jump(info_fn, t_star, &stencil(t_star))),
            });
        }
    }

    events.sort_by(|a, b| {
        a.t_star
            .total_cmp(&b.t_star)
            .then((a.source as u8).cmp(&(b.source as u8)))
            .then(a.branch_pair.cmp(&b.branch_pair))
    });

    let critical = |src: EventSource| -> Vec<f64> {
        events
            .iter()
            .filter(|e| e.source == src && e.sudden_change)
            .map(|e| e.t_star)
            .collect()
    };
    let geometric_critical = if geometric {
        critical(EventSource::Geometric)
    } else {
        Vec::new()
    };
    let info_numeric_critical = critical(EventSource::InfoNumeric);
    let info_closed_critical = critical(EventSource::InfoClosedForm);

    for e in &events {
        if let Some(j) = e.jump {
            if !j.discontinuous {
                warnings.push(format!(
                    "{} event at {:.10} shows no resolvable slope jump (jump {:.3e}, noise {:.3e})",
                    e.source.as_str(),
                    e.t_star,
                    j.jump,
                    j.noise
                ));
            }
        }
    }

    let closed_vs_numeric = rows
        .iter()
        .filter_map(|r| Some((r.d_info_closed? - r.d_info?).abs()))
        .fold(None, |m: Option<f64>, d| Some(m.map_or(d, |m| m.max(d))));
    if let Some(d) = closed_vs_numeric {
        if d > DISCREPANCY_TOL {
            warnings.push(format!(
                "closed-form and numerical information discord differ by up to {d:.3e} (tolerance {DISCREPANCY_TOL:e})"
            ));
        }
    }

    let closed_form_term_defects = samples
        .iter()
        .filter_map(|x| x.term_defects)
        .reduce(CollectiveTermDefects::merge);

    let provenance = Provenance {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        scenario: s.clone(),
        time_axis: s.family.time_axis(),
        points: s.window.points,
        refine_tol: opts.refine_tol,
        down_sample_info: k_info,
        optimizer_theta_points: opts.optimizer.theta_points,
        optimizer_phi_points: opts.optimizer.phi_points,
        optimizer_starts: opts.optimizer.starts,
        optimizer_tol: opts.optimizer.tol,
        derivative_steps: steps,
        reference_annotations: s.reference_annotations(),
        warnings: warnings.clone(),
    };
    Ok(RunReport {
        scenario: s.clone(),
        series: rows,
        events,
        geometric_critical,
        info_numeric_critical,
        info_closed_critical,
        grid_step,
        closed_vs_numeric,
        closed_form_term_defects,
        provenance,
        warnings,
    })
}

fn to_report(source: EventSource, e: &CrossingEvent, jump: Option<DerivativeJump>) -> ReportEvent {
    ReportEvent {
        source,
        t_star: e.t_star,
        branch_pair: Some(e.branch_pair),
        lambda_at_crossing: Some(e.lambda_at_crossing),
        kind: match e.kind {
            crate::witness::CrossingKind::Crossing => "crossing",
            crate::witness::CrossingKind::Osculation => "osculation",
        },
        involves_max: e.involves_max,
        sudden_change: e.is_sudden_change(),
        refined: e.refined,
        jump,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::load_scenario;

    #[test]
    fn fig2_single_sudden_change() {
        let s = load_scenario("fig2").unwrap();
        let r = run(&s).unwrap();
        assert_eq!(r.series.len(), 2000);
        assert_eq!(r.geometric_critical.len(), 1);
        assert!((r.geometric_critical[0] - 1.25f64.ln() / 0.6).abs() < 1e-9);
        assert!(
            r.critical_points_coincide(),
            "{:?} vs {:?}",
            r.geometric_critical,
            r.info_numeric_critical
        );
    }

    #[test]
    fn override_points_and_measures() {
        let s = load_scenario("fig1").unwrap();
        let opts = RunOptions {
            points: Some(300),
            measures: Some(vec![Measure::Geometric]),
            ..Default::default()
        };
        let r = run_with(&s, &opts).unwrap();
        assert_eq!(r.series.len(), 300);
        assert!(r.series.iter().all(|x| x.d_info.is_none()));
        assert_eq!(r.geometric_critical.len(), 2);
    }

    #[test]
    fn amplitude_damping_skips_closed_form() {
        let s = load_scenario("fig3").unwrap();
        let opts = RunOptions {
            points: Some(200),
            measures: Some(vec![Measure::Geometric, Measure::InfoClosedForm]),
            ..Default::default()
        };
        let r = run_with(&s, &opts).unwrap();
        assert!(r.warnings.iter().any(|w| w.contains("not available")));
    }
}
