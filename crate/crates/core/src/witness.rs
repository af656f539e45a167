//! Sudden-change witness: a discord measure built on the maximal eigenvalue of
//! `A` loses smoothness exactly where another eigenvalue branch crosses the
//! maximal one.
//!
//! [`scan_branches`] follows the three branches along a grid,
//! [`detect_crossings`] finds sign changes of the pairwise differences,
//! [`refine_events`] pins them down with [`refine_crossing`], and
//! [`derivative_jump`] checks that the discord slope really jumps there.

use rayon::prelude::*;
use serde::Serialize;

use crate::qstate::BellDiagonalParams;
use crate::{Error, Result};

/// Costs closer than this, relative to the squared size of the exchanged
/// values, are considered tied.
const TIE_COST: f64 = 1e-14;
/// Tied assignments must agree this closely to be harmless.
const TIE_VALUE: f64 = 1e-12;
/// Relative size of a touching difference that still counts as zero.
const TOUCH_TOL: f64 = 1e-10;

const PERMUTATIONS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
const PAIRS: [(usize, usize); 3] = [(0, 1), (0, 2), (1, 2)];

/// Three continuity-matched eigenvalue branches on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenBranchSeries {
    pub times: Vec<f64>,
    /// `branches[i][k]` is branch `i` at `times[k]`.
    pub branches: [Vec<f64>; 3],
    /// Index of the largest branch at each time.
    pub max_index: Vec<usize>,
    /// `slots[k][i]`: position in the oracle output that branch `i` took at `times[k]`.
    pub slots: Vec<[usize; 3]>,
}

impl EigenBranchSeries {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn values_at(&self, k: usize) -> [f64; 3] {
        [self.branches[0][k], self.branches[1][k], self.branches[2][k]]
    }

    /// Grid intervals where some branch moves much faster than its
    /// neighbouring steps suggest, hinting at a mismatched assignment.
    pub fn continuity_violations(&self) -> Vec<usize> {
        let n = self.len();
        let mut out = Vec::new();
        for k in 1..n.saturating_sub(2) {
            for b in &self.branches {
                let step = (b[k + 1] - b[k]).abs();
                let before = (b[k] - b[k - 1]).abs();
                let after = (b[k + 2] - b[k + 1]).abs();
                let scale = b[k].abs().max(b[k + 1].abs()).max(1e-300);
                if step > 8.0 * before.max(after) + 1e-12 * scale.max(1.0) {
                    out.push(k);
                    break;
                }
            }
        }
        out
    }
}

fn argmax(v: [f64; 3], previous: Option<usize>) -> usize {
    let best = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if let Some(p) = previous {
        if best - v[p] <= TIE_VALUE * 1e-2 {
            return p;
        }
    }
    (0..3).find(|&i| v[i] == best).unwrap_or(0)
}

/// Evaluates `eig_fn` on `times` and matches branches between consecutive
/// points by the permutation of smallest squared displacement from the
/// branch values extrapolated through the previous three points.
///
/// Two permutations are tied when their costs differ by less than `1e-14`
/// times the squared magnitude of the values they exchange. Ties go to the
/// previous assignment, then to the first permutation in lexicographic
/// order; tied permutations that assign different values give
/// [`Error::GridTooCoarse`].
pub fn scan_branches<F>(eig_fn: F, times: &[f64]) -> Result<EigenBranchSeries>
where
    F: Fn(f64) -> Result<[f64; 3]> + Sync,
{
    if times.len() < 2 {
        return Err(Error::InvalidArgument(
            "branch scan needs at least two grid points".into(),
        ));
    }
    if times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidArgument("grid must be strictly increasing".into()));
    }
    let raw: Vec<[f64; 3]> = times.par_iter().map(|&t| eig_fn(t)).collect::<Result<_>>()?;
    match_branches(times, &raw)
}

/// Lagrange extrapolation of `b` to `times[len-1]` through up to three
/// previous points.
fn extrapolate(times: &[f64], b: &[f64]) -> f64 {
    let k = times.len() - 1;
    let t = times[k];
    let pts = k.min(3);
    let mut out = 0.0;
    for a in k - pts..k {
        let mut w = 1.0;
        for c in k - pts..k {
            if c != a {
                w *= (t - times[c]) / (times[a] - times[c]);
            }
        }
        out += w * b[a];
    }
    out
}

/// Branch matching on precomputed oracle values.
pub fn match_branches(times: &[f64], raw: &[[f64; 3]]) -> Result<EigenBranchSeries> {
    let n = times.len();
    let mut branches = [Vec::with_capacity(n), Vec::with_capacity(n), Vec::with_capacity(n)];
    let mut slots = Vec::with_capacity(n);
    let mut max_index = Vec::with_capacity(n);

    let mut current = [0usize, 1, 2];
    for k in 0..n {
        if k > 0 {
            let predicted: [f64; 3] = std::array::from_fn(|i| extrapolate(&times[..=k], &branches[i]));
            let v = raw[k];
            let cost = |perm: &[usize; 3]| -> f64 { (0..3).map(|i| (v[perm[i]] - predicted[i]).powi(2)).sum() };
            let costs: Vec<f64> = PERMUTATIONS.iter().map(cost).collect();
            let best_j = (0..6).fold(0, |b, j| if costs[j] < costs[b] { j } else { b });
            // cost gaps are judged against the size of the values being exchanged
            let exchanged = |j: usize| -> f64 {
                (0..3)
                    .filter(|&i| PERMUTATIONS[j][i] != PERMUTATIONS[best_j][i])
                    .map(|i| v[PERMUTATIONS[j][i]].abs() + predicted[i].abs())
                    .sum()
            };
            let tied: Vec<usize> = (0..6)
                .filter(|&j| costs[j] - costs[best_j] <= TIE_COST * exchanged(j).powi(2))
                .collect();
            let chosen = tied
                .iter()
                .copied()
                .find(|&j| PERMUTATIONS[j] == current)
                .unwrap_or(tied[0]);
            // the first step has no trend to break ties, so oracle order stands
            for &j in tied.iter().filter(|_| k >= 2) {
                let differs = (0..3).any(|i| (v[PERMUTATIONS[j][i]] - v[PERMUTATIONS[chosen][i]]).abs() > TIE_VALUE);
                if differs {
                    return Err(Error::GridTooCoarse { t: times[k] });
                }
            }
            current = PERMUTATIONS[chosen];
        }
        for i in 0..3 {
            branches[i].push(raw[k][current[i]]);
        }
        slots.push(current);
        let vals = [branches[0][k], branches[1][k], branches[2][k]];
        max_index.push(argmax(vals, max_index.last().copied()));
    }
    Ok(EigenBranchSeries {
        times: times.to_vec(),
        branches,
        max_index,
        slots,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CrossingKind {
    /// The two branches exchange order.
    Crossing,
    /// The two branches touch and separate without exchanging order.
    Osculation,
}

impl std::fmt::Display for CrossingKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            CrossingKind::Crossing => "crossing",
            CrossingKind::Osculation => "osculation",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CrossingEvent {
    pub t_star: f64,
    /// Branch identities `(m, n)`, `m < n`.
    pub branch_pair: (usize, usize),
    pub lambda_at_crossing: f64,
    /// The largest branch changes identity here: a sudden change.
    pub involves_max: bool,
    pub kind: CrossingKind,
    /// Grid indices bracketing the event.
    pub bracket: (usize, usize),
    /// Whether `t_star` came from root refinement rather than grid interpolation.
    pub refined: bool,
}

impl CrossingEvent {
    pub fn is_sudden_change(&self) -> bool {
        self.involves_max && self.kind == CrossingKind::Crossing
    }
}

fn sign(x: f64, zero: f64) -> i8 {
    if x > zero {
        1
    } else if x < -zero {
        -1
    } else {
        0
    }
}

fn series_scale(s: &EigenBranchSeries) -> f64 {
    s.branches
        .iter()
        .flat_map(|b| b.iter())
        .fold(0.0f64, |m, v| m.max(v.abs()))
}

/// One event per sign change of a pairwise branch difference, plus
/// osculation candidates at interior minima of `|λ_m − λ_n|` that come close
/// to zero. Times are linear interpolations on the grid.
pub fn detect_crossings(s: &EigenBranchSeries) -> Vec<CrossingEvent> {
    let n = s.len();
    let scale = series_scale(s).max(1e-300);
    let zero = 1e-14 * scale;
    let mut events = Vec::new();
    for &(m, q) in &PAIRS {
        let d: Vec<f64> = (0..n).map(|k| s.branches[m][k] - s.branches[q][k]).collect();
        // sign changes, skipping exact zeros
        let mut last: Option<usize> = None;
        for k in 0..n {
            let sk = sign(d[k], zero);
            if sk == 0 {
                continue;
            }
            if let Some(j) = last {
                if sign(d[j], zero) != sk {
                    let (t0, t1) = (s.times[j], s.times[k]);
                    let t = t0 - d[j] * (t1 - t0) / (d[k] - d[j]);
                    let w = (t - t0) / (t1 - t0);
                    let lam = (1.0 - w) * s.branches[m][j] + w * s.branches[m][k];
                    events.push(CrossingEvent {
                        t_star: t,
                        branch_pair: (m, q),
                        lambda_at_crossing: lam,
                        involves_max: max_switches(s, j, k, m, q),
                        kind: CrossingKind::Crossing,
                        bracket: (j, k),
                        refined: false,
                    });
                }
            }
            last = Some(k);
        }
        // touching without a sign change
        for k in 1..n.saturating_sub(1) {
            let (a, b, c) = (d[k - 1], d[k], d[k + 1]);
            let sa = sign(a, zero);
            if sa == 0 || sa != sign(c, zero) || (sign(b, zero) != 0 && sign(b, zero) != sa) {
                continue;
            }
            if !(b.abs() <= a.abs() && b.abs() < c.abs()) {
                continue;
            }
            // vertex of the parabola through the three samples
            let curv = a - 2.0 * b + c;
            let vertex = if curv.abs() > 0.0 {
                b - (c - a).powi(2) / (8.0 * curv)
            } else {
                b
            };
            let slack = TOUCH_TOL * scale.max(1.0) + curv.abs();
            if vertex.abs() <= slack {
                let h = 0.5 * (s.times[k + 1] - s.times[k - 1]);
                let off = if curv.abs() > 0.0 { -(c - a) / (2.0 * curv) } else { 0.0 };
                events.push(CrossingEvent {
                    t_star: s.times[k] + off.clamp(-1.0, 1.0) * h,
                    branch_pair: (m, q),
                    lambda_at_crossing: s.branches[m][k],
                    involves_max: false,
                    kind: CrossingKind::Osculation,
                    bracket: (k - 1, k + 1),
                    refined: false,
                });
            }
        }
    }
    events.sort_by(|x, y| x.t_star.total_cmp(&y.t_star).then(x.branch_pair.cmp(&y.branch_pair)));
    events
}

fn max_switches(s: &EigenBranchSeries, j: usize, k: usize, m: usize, q: usize) -> bool {
    let (a, b) = (s.max_index[j], s.max_index[k]);
    a != b && ((a == m && b == q) || (a == q && b == m))
}

/// Brent's bracketed root finder on `diff_fn`, stopping once the bracket
/// is below `rel_tol · max(1, |t|)`.
pub fn refine_crossing_with_tol<F: Fn(f64) -> f64>(diff_fn: F, bracket: (f64, f64), rel_tol: f64) -> Result<f64> {
    let (mut a, mut b) = bracket;
    let mut fa = diff_fn(a);
    let mut fb = diff_fn(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if !(fa * fb < 0.0) {
        return Err(Error::NoSignChange {
            lo: a,
            hi: b,
            f_lo: fa,
            f_hi: fb,
        });
    }
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;
    for _ in 0..200 {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol = 2.0 * f64::EPSILON * b.abs() + 0.5 * rel_tol * b.abs().max(1.0);
        let half = 0.5 * (c - b);
        if half.abs() <= tol || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * half * s;
                q = 1.0 - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * half * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * half * q - (tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = half;
                e = d;
            }
        } else {
            d = half;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol { d } else { tol.copysign(half) };
        fb = diff_fn(b);
    }
    Ok(b)
}

/// [`refine_crossing_with_tol`] at the default `1e-10` relative tolerance.
pub fn refine_crossing<F: Fn(f64) -> f64>(diff_fn: F, bracket: (f64, f64)) -> Result<f64> {
    refine_crossing_with_tol(diff_fn, bracket, 1e-10)
}

/// Golden-section minimisation of a unimodal `f` on `[lo, hi]`.
pub fn golden_minimize<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, rel_tol: f64) -> (f64, f64) {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let (mut a, mut b) = (lo, hi);
    let mut x1 = b - g * (b - a);
    let mut x2 = a + g * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..300 {
        if (b - a).abs() <= rel_tol * a.abs().max(b.abs()).max(1.0) {
            break;
        }
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Refines every event with the oracle used for the scan.
///
/// When both branches keep their oracle slot across the bracket the slot
/// difference is smooth and Brent's method applies. Otherwise the oracle is
/// sort-ordered there and the crossing is the minimum of the gap between
/// the two slots. Osculation candidates that do not reach
/// `1e-10 · max(1, scale)` are dropped.
pub fn refine_events<F>(
    s: &EigenBranchSeries,
    events: &[CrossingEvent],
    eig_fn: F,
    rel_tol: f64,
) -> Result<Vec<CrossingEvent>>
where
    F: Fn(f64) -> Result<[f64; 3]> + Sync,
{
    let scale = series_scale(s).max(1.0);
    let refined: Vec<Option<CrossingEvent>> = events
        .par_iter()
        .map(|ev| refine_one(s, ev, &eig_fn, rel_tol, scale))
        .collect::<Result<_>>()?;
    Ok(refined.into_iter().flatten().collect())
}

fn refine_one<F>(
    s: &EigenBranchSeries,
    ev: &CrossingEvent,
    eig_fn: &F,
    rel_tol: f64,
    scale: f64,
) -> Result<Option<CrossingEvent>>
where
    F: Fn(f64) -> Result<[f64; 3]> + Sync,
{
    let (j, k) = ev.bracket;
    let (m, q) = ev.branch_pair;
    let (t0, t1) = (s.times[j], s.times[k]);
    let (sm0, sq0) = (s.slots[j][m], s.slots[j][q]);
    let (sm1, sq1) = (s.slots[k][m], s.slots[k][q]);
    let first_err = std::sync::Mutex::new(None);
    let gap = |t: f64| -> f64 {
        match eig_fn(t) {
            Ok(v) => v[sm0] - v[sq0],
            Err(e) => {
                first_err.lock().unwrap().get_or_insert(e);
                f64::NAN
            }
        }
    };
    let stable = sm0 == sm1 && sq0 == sq1;
    let (t_star, residual) = match ev.kind {
        CrossingKind::Crossing if stable => {
            let t = refine_crossing_with_tol(gap, (t0, t1), rel_tol).or_else(|err| match err {
                // grid sign change lost at the oracle level: keep the grid estimate
                Error::NoSignChange { .. } => Ok(ev.t_star),
                other => Err(other),
            })?;
            (t, gap(t).abs())
        }
        _ => golden_minimize(|t| gap(t).abs(), t0, t1, rel_tol),
    };
    if let Some(e) = first_err.into_inner().unwrap() {
        return Err(e);
    }
    if ev.kind == CrossingKind::Osculation && !(residual <= TOUCH_TOL * scale) {
        return Ok(None);
    }
    let v = eig_fn(t_star)?;
    Ok(Some(CrossingEvent {
        t_star,
        lambda_at_crossing: 0.5 * (v[sm0] + v[sq0]),
        refined: true,
        ..*ev
    }))
}

/// Which product channel drives the Bell-diagonal coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BdLaw {
    /// `c₁ ∝ e^{−γ₁t}`, `c₂ ∝ e^{−(γ₁+γ₂)t}`, `c₃ ∝ e^{−γ₂t}`.
    PhaseBitflip,
    /// `c₁, c₂ ∝ e^{−(γ₁+γ₂)t}`, `c₃` constant.
    PhasePhase,
}

impl BdLaw {
    fn rates(self, g1: f64, g2: f64) -> [f64; 3] {
        match self {
            BdLaw::PhaseBitflip => [g1, g1 + g2, g2],
            BdLaw::PhasePhase => [g1 + g2, g1 + g2, 0.0],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyticCrossing {
    pub t_star: f64,
    /// Coefficient indices `(i, j)`, `i < j`, with `|c_i(t*)| = |c_j(t*)|`.
    pub pair: (usize, usize),
    pub changes_max: bool,
}

/// All `t > 0` with `|c_i(t)| = |c_j(t)|` for exponential laws
/// `c_i(t) = c_i0 e^{−r_i t}`: `t = ln|c_i0/c_j0| / (r_i − r_j)`.
pub fn analytic_crossings_bd(c0: BellDiagonalParams, gamma1: f64, gamma2: f64, law: BdLaw) -> Vec<AnalyticCrossing> {
    let c = c0.as_array().map(f64::abs);
    let r = law.rates(gamma1, gamma2);
    let mut out = Vec::new();
    for &(i, j) in &PAIRS {
        if c[i] == 0.0 || c[j] == 0.0 || r[i] == r[j] {
            continue;
        }
        let t = (c[i] / c[j]).ln() / (r[i] - r[j]);
        if !(t > 0.0) || !t.is_finite() {
            continue;
        }
        let k = 3 - i - j;
        let common = c[i] * (-r[i] * t).exp();
        let other = c[k] * (-r[k] * t).exp();
        out.push(AnalyticCrossing {
            t_star: t,
            pair: (i, j),
            changes_max: common > other,
        });
    }
    out.sort_by(|a, b| a.t_star.total_cmp(&b.t_star));
    out
}

/// One-sided slopes and their difference at a point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DerivativeJump {
    pub left_slope: f64,
    pub right_slope: f64,
    /// `right_slope − left_slope`
    pub jump: f64,
    /// Estimated error of the slopes.
    pub noise: f64,
    /// `|jump| > 10 · noise`
    pub discontinuous: bool,
}

/// Steps `(1e-3, 1e-4, 1e-5) · scale`.
pub fn default_h_schedule(scale: f64) -> [f64; 3] {
    [1e-3 * scale, 1e-4 * scale, 1e-5 * scale]
}

/// Compares one-sided derivatives of `f` at `t_star`.
///
/// Each side uses the second-order stencil `(∓3f₀ ± 4f₁ ∓ f₂)/2h`,
/// Richardson-extrapolated between consecutive steps of `h_schedule`. The
/// noise estimate adds the disagreement of the two extrapolations, the
/// third finite difference of `f` at the smallest step divided by that step,
/// and the rounding level of `f`.
pub fn derivative_jump<F: Fn(f64) -> f64>(f: F, t_star: f64, h_schedule: &[f64]) -> DerivativeJump {
    assert!(h_schedule.len() >= 2, "need at least two step sizes");
    let f0 = f(t_star);
    let mut noise_total = 0.0f64;
    let mut side = |dir: f64| -> f64 {
        let raw: Vec<(f64, f64)> = h_schedule
            .iter()
            .map(|&h| {
                let f1 = f(t_star + dir * h);
                let f2 = f(t_star + 2.0 * dir * h);
                (h, dir * (-3.0 * f0 + 4.0 * f1 - f2) / (2.0 * h))
            })
            .collect();
        let rich: Vec<f64> = raw
            .windows(2)
            .map(|w| {
                let ratio = (w[0].0 / w[1].0).powi(2);
                (ratio * w[1].1 - w[0].1) / (ratio - 1.0)
            })
            .collect();
        let best = *rich.last().unwrap();
        let spread = if rich.len() >= 2 {
            (rich[rich.len() - 2] - best).abs()
        } else {
            (raw[0].1 - raw[1].1).abs()
        };
        let h = *h_schedule.last().unwrap();
        let third =
            (f(t_star + 3.0 * dir * h) - 3.0 * f(t_star + 2.0 * dir * h) + 3.0 * f(t_star + dir * h) - f0).abs() / h;
        let rounding = 8.0 * f64::EPSILON * f0.abs().max(f64::MIN_POSITIVE) / h;
        noise_total = noise_total.max(spread + third + rounding);
        best
    };
    let left = side(-1.0);
    let right = side(1.0);
    let jump = right - left;
    DerivativeJump {
        left_slope: left,
        right_slope: right,
        jump,
        noise: noise_total,
        discontinuous: jump.abs() > 10.0 * noise_total,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{evolve_bd_phase_bitflip, evolve_bd_phase_phase};
    use approx::assert_abs_diff_eq;

    fn grid(a: f64, b: f64, n: usize) -> Vec<f64> {
        (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect()
    }

    fn sorted(mut v: [f64; 3]) -> [f64; 3] {
        v.sort_by(|a, b| b.total_cmp(a));
        v
    }

    fn fig1(t: f64) -> [f64; 3] {
        evolve_bd_phase_bitflip(BellDiagonalParams::new(0.12, 0.13, 0.08), 0.035, 0.015, t)
            .as_array()
            .map(|c| c * c)
    }

    #[test]
    fn constant_branches_have_no_crossings() {
        let s = scan_branches(|_| Ok([1.0, 2.0, 3.0]), &grid(0.0, 1.0, 50)).unwrap();
        assert!(s.branches[0].iter().all(|&v| v == 1.0));
        assert!(s.max_index.iter().all(|&i| i == 2));
        assert!(detect_crossings(&s).is_empty());
    }

    #[test]
    fn equal_constant_branches_have_no_crossings() {
        let s = scan_branches(|_| Ok([1.0, 1.0, 3.0]), &grid(0.0, 1.0, 50)).unwrap();
        assert!(detect_crossings(&s).is_empty());
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(scan_branches(|_| Ok([0.0; 3]), &[1.0]).is_err());
        assert!(scan_branches(|_| Ok([0.0; 3]), &[0.0, 1.0, 1.0]).is_err());
    }

    #[test]
    fn sorted_oracle_is_untangled() {
        // sort order hides the identities; matching must recover them
        let times = grid(0.0, 40.0, 2000);
        let s = scan_branches(|t| Ok(sorted(fig1(t))), &times).unwrap();
        let labeled = scan_branches(|t| Ok(fig1(t)), &times).unwrap();
        let ev_sorted: Vec<_> = detect_crossings(&s).into_iter().filter(|e| e.involves_max).collect();
        let ev_labeled: Vec<_> = detect_crossings(&labeled)
            .into_iter()
            .filter(|e| e.involves_max)
            .collect();
        assert_eq!(ev_sorted.len(), 2);
        assert_eq!(ev_labeled.len(), 2);
        let r = refine_events(&s, &ev_sorted, |t| Ok(sorted(fig1(t))), 1e-12).unwrap();
        assert_abs_diff_eq!(r[0].t_star, (13.0f64 / 12.0).ln() / 0.015, epsilon = 1e-8);
        assert_abs_diff_eq!(r[1].t_star, 1.5f64.ln() / 0.02, epsilon = 1e-8);
        for (k, t) in times.iter().enumerate() {
            let mut a = s.values_at(k);
            let b = sorted(fig1(*t));
            a.sort_by(|x, y| y.total_cmp(x));
            assert_eq!(a, b);
        }
    }

    #[test]
    fn fig1_refined_crossings() {
        let times = grid(0.0, 40.0, 2000);
        let s = scan_branches(|t| Ok(fig1(t)), &times).unwrap();
        let events = detect_crossings(&s);
        let r = refine_events(&s, &events, |t| Ok(fig1(t)), 1e-12).unwrap();
        let sudden: Vec<_> = r.iter().filter(|e| e.is_sudden_change()).collect();
        assert_eq!(sudden.len(), 2);
        assert_eq!(sudden[0].branch_pair, (0, 1));
        assert_eq!(sudden[1].branch_pair, (0, 2));
        assert_abs_diff_eq!(sudden[0].t_star, 5.336180511569095, epsilon = 1e-9);
        assert_abs_diff_eq!(sudden[1].t_star, 20.273255405408219, epsilon = 1e-9);
        for e in sudden {
            let v = fig1(e.t_star);
            let (m, n) = e.branch_pair;
            assert!((v[m] - v[n]).abs() <= 1e-10);
        }
    }

    #[test]
    fn no_max_change_when_c3_dominates() {
        let c0 = BellDiagonalParams::new(0.1, 0.2, 0.4);
        let f = |t: f64| Ok(evolve_bd_phase_phase(c0, 0.45, 0.15, t).as_array().map(|c| c * c));
        let s = scan_branches(f, &grid(0.0, 3.0, 2000)).unwrap();
        assert!(detect_crossings(&s).iter().all(|e| !e.involves_max));
    }

    #[test]
    fn osculation_is_classified() {
        let f = |t: f64| Ok([1.0 + (t - 1.0).powi(2), 1.0, 5.0]);
        let s = scan_branches(f, &grid(0.0, 2.0, 101)).unwrap();
        let events = detect_crossings(&s);
        let r = refine_events(&s, &events, f, 1e-12).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].kind, CrossingKind::Osculation);
        assert!(!r[0].is_sudden_change());
        assert_abs_diff_eq!(r[0].t_star, 1.0, epsilon = 1e-5);
    }

    #[test]
    fn near_miss_is_not_osculation() {
        let f = |t: f64| Ok([1.01 + (t - 1.0).powi(2), 1.0, 5.0]);
        let s = scan_branches(f, &grid(0.0, 2.0, 101)).unwrap();
        let events = detect_crossings(&s);
        assert!(refine_events(&s, &events, f, 1e-12).unwrap().is_empty());
    }

    #[test]
    fn refine_linear() {
        let t = refine_crossing(|t| t - 1.0, (0.0, 2.0)).unwrap();
        assert_abs_diff_eq!(t, 1.0, epsilon = 1e-12);
        assert!(matches!(
            refine_crossing(|t| t * t + 1.0, (0.0, 2.0)),
            Err(Error::NoSignChange { .. })
        ));
    }

    #[test]
    fn refine_fig1_pairs() {
        let d12 = |t: f64| {
            let v = fig1(t);
            v[0] - v[1]
        };
        let d13 = |t: f64| {
            let v = fig1(t);
            v[0] - v[2]
        };
        assert_abs_diff_eq!(
            refine_crossing(d12, (1.0, 10.0)).unwrap(),
            5.336180511569095,
            epsilon = 1e-9
        );
        assert_abs_diff_eq!(
            refine_crossing(d13, (10.0, 30.0)).unwrap(),
            20.273255405408219,
            epsilon = 2e-9
        );
    }

    #[test]
    fn analytic_fig1_and_fig2() {
        let a = analytic_crossings_bd(
            BellDiagonalParams::new(0.12, 0.13, 0.08),
            0.035,
            0.015,
            BdLaw::PhaseBitflip,
        );
        let max_changing: Vec<_> = a.iter().filter(|c| c.changes_max).collect();
        assert_eq!(max_changing.len(), 2);
        assert_abs_diff_eq!(max_changing[0].t_star, 5.336180511569095, epsilon = 1e-12);
        assert_eq!(max_changing[0].pair, (0, 1));
        assert_abs_diff_eq!(max_changing[1].t_star, 20.273255405408219, epsilon = 1e-12);
        assert_eq!(max_changing[1].pair, (0, 2));

        let b = analytic_crossings_bd(BellDiagonalParams::new(0.5, 0.3, 0.4), 0.45, 0.15, BdLaw::PhasePhase);
        assert_eq!(b.len(), 1);
        assert_abs_diff_eq!(b[0].t_star, 1.25f64.ln() / 0.6, epsilon = 1e-15);
        assert_eq!(b[0].pair, (0, 2));
        assert!(b[0].changes_max);
    }

    #[test]
    fn analytic_excludes_t_zero() {
        let a = analytic_crossings_bd(BellDiagonalParams::new(0.3, 0.3, 0.1), 0.2, 0.2, BdLaw::PhaseBitflip);
        assert!(a.iter().all(|c| c.pair != (0, 1)));
    }

    #[test]
    fn abs_has_unit_jump() {
        let j = derivative_jump(|t| (t - 1.0).abs(), 1.0, &default_h_schedule(1.0));
        assert_abs_diff_eq!(j.left_slope, -1.0, epsilon = 1e-9);
        assert_abs_diff_eq!(j.right_slope, 1.0, epsilon = 1e-9);
        assert_abs_diff_eq!(j.jump, 2.0, epsilon = 1e-9);
        assert!(j.discontinuous);
    }

    #[test]
    fn smooth_function_has_no_jump() {
        for t in [0.1, 0.7, 2.3] {
            let j = derivative_jump(|t: f64| (3.0 * t).sin() * t.exp(), t, &default_h_schedule(1.0));
            assert!(!j.discontinuous, "{t}: {j:?}");
        }
    }
}
