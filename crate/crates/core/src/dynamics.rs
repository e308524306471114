//! Local charts on the variety, canonical cotangent coordinates, Poisson
//! brackets, and Hamiltonian flows driven by components of the fibration.
//!
//! A chart fixes one affine coordinate to 1 and solves two coordinates from
//! the quadric equations; the remaining `n` coordinates and their conjugate
//! momenta are canonical coordinates on the cotangent bundle. Flows run in
//! real time through complex phase space, so conservation checks only need a
//! one-parameter subgroup.

use crate::error::{Error, Result};
use crate::fibration::s_value;
use crate::matrix::Mat;
use crate::rank::numeric_rank;
use crate::scalar::C64;
use crate::tol;
use crate::variety::{draw_complex, Covector, PencilConfig, Point};
use rand_chacha::ChaCha8Rng;

/// A coordinate chart: `anchor` is pinned to 1, the `solved` pair is
/// recovered from the two quadric equations with the recorded square-root
/// branches, and every other coordinate is free.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Chart {
    pub anchor: usize,
    pub solved: (usize, usize),
    pub branch: (bool, bool),
}

impl Default for Chart {
    fn default() -> Self {
        Chart {
            anchor: 0,
            solved: (1, 2),
            branch: (false, false),
        }
    }
}

impl Chart {
    pub fn validate(&self, cfg: &PencilConfig<C64>) -> Result<()> {
        let dim = cfg.ambient_dim();
        let (b, c) = self.solved;
        if self.anchor >= dim || b >= dim || c >= dim {
            return Err(Error::BadConfig("chart index out of range".into()));
        }
        if self.anchor == b || self.anchor == c || b == c {
            return Err(Error::BadConfig("chart indices must be distinct".into()));
        }
        Ok(())
    }

    /// Ambient indices of the free coordinates, in increasing order.
    pub fn free_indices(&self, cfg: &PencilConfig<C64>) -> Vec<usize> {
        let (b, c) = self.solved;
        (0..cfg.ambient_dim())
            .filter(|&i| i != self.anchor && i != b && i != c)
            .collect()
    }
}

/// Position and conjugate momentum in a chart.
#[derive(Debug, Clone, PartialEq)]
pub struct ChartState {
    pub u: Vec<C64>,
    pub p: Vec<C64>,
}

fn branch_sign(flip: bool) -> C64 {
    if flip {
        -C64::ONE
    } else {
        C64::ONE
    }
}

/// Solves the two quadric equations for the squares of the chart's solved
/// coordinates given the free values. Returns `(square_b, square_c, scale)`.
fn solved_squares(
    cfg: &PencilConfig<C64>,
    chart: &Chart,
    u: &[C64],
) -> Result<(C64, C64, f64)> {
    let n = cfg.n();
    if u.len() != n {
        return Err(Error::SizeMismatch {
            expected: n,
            got: u.len(),
        });
    }
    let mu = cfg.mu();
    let free = chart.free_indices(cfg);
    let mut r1 = -C64::ONE;
    let mut r2 = -mu[chart.anchor];
    for (value, &index) in u.iter().zip(&free) {
        let sq = value * value;
        r1 -= sq;
        r2 -= mu[index] * sq;
    }
    let (b, c) = chart.solved;
    let det = mu[c] - mu[b];
    let square_b = (mu[c] * r1 - r2) / det;
    let square_c = (r2 - mu[b] * r1) / det;
    let scale = 1.0 + r1.norm().max(r2.norm());
    Ok((square_b, square_c, scale))
}

fn assemble_point(
    cfg: &PencilConfig<C64>,
    chart: &Chart,
    u: &[C64],
    root_b: C64,
    root_c: C64,
) -> Point {
    let mut x = vec![C64::ZERO; cfg.ambient_dim()];
    x[chart.anchor] = C64::ONE;
    x[chart.solved.0] = root_b;
    x[chart.solved.1] = root_c;
    for (value, index) in u.iter().zip(chart.free_indices(cfg)) {
        x[index] = *value;
    }
    Point(x)
}

/// Embeds chart coordinates into the ambient variety using the chart's
/// recorded square-root branches.
pub fn chart_embed(cfg: &PencilConfig<C64>, chart: &Chart, u: &[C64]) -> Result<Point> {
    chart.validate(cfg)?;
    let (square_b, square_c, scale) = solved_squares(cfg, chart, u)?;
    let floor = tol::CHART_FLOOR * scale;
    if square_b.norm() < floor || square_c.norm() < floor {
        return Err(Error::BranchLocus);
    }
    let root_b = square_b.sqrt() * branch_sign(chart.branch.0);
    let root_c = square_c.sqrt() * branch_sign(chart.branch.1);
    Ok(assemble_point(cfg, chart, u, root_b, root_c))
}

/// Embeds chart coordinates choosing, for each solved coordinate, the
/// square root nearest the hint point — path continuation during flows and
/// finite differencing.
pub fn chart_embed_near(
    cfg: &PencilConfig<C64>,
    chart: &Chart,
    u: &[C64],
    hint: &Point,
) -> Result<Point> {
    chart.validate(cfg)?;
    let (square_b, square_c, scale) = solved_squares(cfg, chart, u)?;
    let floor = tol::CHART_FLOOR * scale;
    if square_b.norm() < floor || square_c.norm() < floor {
        return Err(Error::BranchLocus);
    }
    let pick = |square: C64, previous: C64| {
        let root = square.sqrt();
        if (root - previous).norm() <= (-root - previous).norm() {
            root
        } else {
            -root
        }
    };
    let root_b = pick(square_b, hint.0[chart.solved.0]);
    let root_c = pick(square_c, hint.0[chart.solved.1]);
    Ok(assemble_point(cfg, chart, u, root_b, root_c))
}

/// Reads chart coordinates off an ambient point after rescaling its anchor
/// coordinate to 1. Returns the free coordinates and the rescaled point.
pub fn extract_chart_coords(
    cfg: &PencilConfig<C64>,
    chart: &Chart,
    point: &Point,
) -> Result<(Vec<C64>, Point)> {
    chart.validate(cfg)?;
    let anchor_value = point.0[chart.anchor];
    let scale = point.0.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if anchor_value.norm() <= 1e-8 * scale {
        return Err(Error::BranchLocus);
    }
    let rescaled: Vec<C64> = point.0.iter().map(|z| z / anchor_value).collect();
    let u = chart
        .free_indices(cfg)
        .into_iter()
        .map(|i| rescaled[i])
        .collect();
    Ok((u, Point(rescaled)))
}

/// Analytic Jacobian of the embedding at an embedded point: ambient rows,
/// free-coordinate columns.
pub fn chart_jacobian(
    cfg: &PencilConfig<C64>,
    chart: &Chart,
    point: &Point,
) -> Result<Mat<C64>> {
    chart.validate(cfg)?;
    let mu = cfg.mu();
    let free = chart.free_indices(cfg);
    let (b, c) = chart.solved;
    let x_b = point.0[b];
    let x_c = point.0[c];
    if x_b.norm() < tol::CHART_FLOOR || x_c.norm() < tol::CHART_FLOOR {
        return Err(Error::BranchLocus);
    }
    let det = mu[c] - mu[b];
    let mut jac = Mat::zeros(cfg.ambient_dim(), free.len());
    for (k, &fk) in free.iter().enumerate() {
        let uk = point.0[fk];
        jac.set(fk, k, C64::ONE);
        jac.set(b, k, uk * (mu[fk] - mu[c]) / (det * x_b));
        jac.set(c, k, uk * (mu[b] - mu[fk]) / (det * x_c));
    }
    Ok(jac)
}

/// Minimum-norm ambient covector with prescribed pairings against the chart
/// directions and zero Euler pairing.
pub fn ambient_covector(
    cfg: &PencilConfig<C64>,
    chart: &Chart,
    point: &Point,
    p: &[C64],
) -> Result<Covector> {
    let n = cfg.n();
    if p.len() != n {
        return Err(Error::SizeMismatch {
            expected: n,
            got: p.len(),
        });
    }
    let jac = chart_jacobian(cfg, chart, point)?;
    let dim = cfg.ambient_dim();
    let mut system = Mat::zeros(n + 1, dim);
    for k in 0..n {
        for i in 0..dim {
            system.set(k, i, jac.at(i, k));
        }
    }
    for i in 0..dim {
        system.set(n, i, point.0[i]);
    }
    let mut rhs: Vec<C64> = p.to_vec();
    rhs.push(C64::ZERO);
    let adjoint = system.conj_transpose();
    let gram = system.mul(&adjoint)?;
    let weights = gram.solve(&rhs).map_err(|_| Error::RankDeficient)?;
    Ok(Covector(adjoint.mat_vec(&weights)?))
}

/// Value of one fibration component as a function on the chart's phase
/// space, embedding near the hint.
fn phi_component_near(
    cfg: &PencilConfig<C64>,
    chart: &Chart,
    state: &ChartState,
    index: usize,
    hint: &Point,
) -> Result<C64> {
    let point = chart_embed_near(cfg, chart, &state.u, hint)?;
    let covector = ambient_covector(cfg, chart, &point, &state.p)?;
    s_value(cfg, index, &point.0, &covector.0)
}

/// Fibration components at a chart state using the chart's static branches.
pub fn phi_chart(
    cfg: &PencilConfig<C64>,
    chart: &Chart,
    state: &ChartState,
    indices: &[usize],
) -> Result<Vec<C64>> {
    let point = chart_embed(cfg, chart, &state.u)?;
    let covector = ambient_covector(cfg, chart, &point, &state.p)?;
    indices
        .iter()
        .map(|&i| s_value(cfg, i, &point.0, &covector.0))
        .collect()
}

/// Central-difference derivative with one Richardson extrapolation step;
/// returns the improved value and the disagreement-based error estimate.
pub fn richardson_partial<F>(mut f: F, at: C64, step: f64) -> Result<(C64, f64)>
where
    F: FnMut(C64) -> Result<C64>,
{
    let h = C64::new(step, 0.0);
    let half = C64::new(step / 2.0, 0.0);
    let coarse = (f(at + h)? - f(at - h)?) / (2.0 * step);
    let fine = (f(at + half)? - f(at - half)?) / step;
    let value = (4.0 * fine - coarse) / 3.0;
    let estimate = (fine - coarse).norm() / 3.0;
    Ok((value, estimate))
}

/// Gradient of a phase-space function with respect to all positions and
/// momenta; the worst per-partial error estimate is gated.
fn state_gradient<F>(
    f: &F,
    state: &ChartState,
    step: f64,
) -> Result<(Vec<C64>, Vec<C64>)>
where
    F: Fn(&ChartState) -> Result<C64>,
{
    let n = state.u.len();
    let mut du = Vec::with_capacity(n);
    let mut dp = Vec::with_capacity(n);
    for k in 0..n {
        let (value, estimate) = richardson_partial(
            |z| {
                let mut moved = state.clone();
                moved.u[k] = z;
                f(&moved)
            },
            state.u[k],
            step,
        )?;
        if estimate > tol::DERIVATIVE_REL * (1.0 + value.norm()) {
            return Err(Error::StepTooLarge {
                disagreement: estimate,
            });
        }
        du.push(value);
    }
    for k in 0..n {
        let (value, estimate) = richardson_partial(
            |z| {
                let mut moved = state.clone();
                moved.p[k] = z;
                f(&moved)
            },
            state.p[k],
            step,
        )?;
        if estimate > tol::DERIVATIVE_REL * (1.0 + value.norm()) {
            return Err(Error::StepTooLarge {
                disagreement: estimate,
            });
        }
        dp.push(value);
    }
    Ok((du, dp))
}

/// Canonical Poisson bracket of two phase-space functions, with the scale
/// of the gradient products for relative comparisons.
pub fn bracket_of<F, G>(
    f: &F,
    g: &G,
    state: &ChartState,
    step: f64,
) -> Result<(C64, f64)>
where
    F: Fn(&ChartState) -> Result<C64>,
    G: Fn(&ChartState) -> Result<C64>,
{
    let (f_du, f_dp) = state_gradient(f, state, step)?;
    let (g_du, g_dp) = state_gradient(g, state, step)?;
    let mut bracket = C64::ZERO;
    let mut scale = 0.0;
    for k in 0..state.u.len() {
        bracket += f_du[k] * g_dp[k] - f_dp[k] * g_du[k];
        scale += f_du[k].norm() * g_dp[k].norm() + f_dp[k].norm() * g_du[k].norm();
    }
    Ok((bracket, scale))
}

/// Poisson bracket of two fibration components at a chart state, plus the
/// gradient-product scale.
pub fn poisson_bracket(
    cfg: &PencilConfig<C64>,
    chart: &Chart,
    f_index: usize,
    g_index: usize,
    state: &ChartState,
    step: f64,
) -> Result<(C64, f64)> {
    let hint = chart_embed(cfg, chart, &state.u)?;
    let f = |s: &ChartState| phi_component_near(cfg, chart, s, f_index, &hint);
    let g = |s: &ChartState| phi_component_near(cfg, chart, s, g_index, &hint);
    bracket_of(&f, &g, state, step)
}

/// One recorded flow sample.
#[derive(Debug, Clone)]
pub struct FlowRecord {
    pub time: f64,
    pub u: Vec<C64>,
    pub p: Vec<C64>,
    pub phi: Vec<C64>,
}

/// A trajectory, possibly cut short; `abort` carries the reason when the
/// integrator stopped before completing all steps.
#[derive(Debug, Clone)]
pub struct FlowRun {
    pub records: Vec<FlowRecord>,
    pub abort: Option<String>,
}

/// Integration controls. `reject_threshold: None` runs plain fixed steps —
/// required for clean order measurements; `Some(tol)` adds step-doubling
/// error control that aborts when exceeded.
#[derive(Debug, Clone, Copy)]
pub struct FlowOptions {
    pub dt: f64,
    pub steps: usize,
    pub reject_threshold: Option<f64>,
    pub record_every: usize,
}

#[derive(Clone)]
struct PhaseVector {
    u: Vec<C64>,
    p: Vec<C64>,
}

impl PhaseVector {
    fn axpy(&self, scale: f64, other: &PhaseVector) -> PhaseVector {
        PhaseVector {
            u: self
                .u
                .iter()
                .zip(&other.u)
                .map(|(a, b)| a + scale * b)
                .collect(),
            p: self
                .p
                .iter()
                .zip(&other.p)
                .map(|(a, b)| a + scale * b)
                .collect(),
        }
    }

    fn distance(&self, other: &PhaseVector) -> f64 {
        let mut acc = 0.0;
        for (a, b) in self.u.iter().zip(&other.u) {
            acc += (a - b).norm_sqr();
        }
        for (a, b) in self.p.iter().zip(&other.p) {
            acc += (a - b).norm_sqr();
        }
        acc.sqrt()
    }

    fn magnitude(&self) -> f64 {
        let mut acc = 0.0;
        for z in self.u.iter().chain(&self.p) {
            acc += z.norm_sqr();
        }
        acc.sqrt()
    }

    fn as_state(&self) -> ChartState {
        ChartState {
            u: self.u.clone(),
            p: self.p.clone(),
        }
    }
}

fn hamiltonian_field(
    cfg: &PencilConfig<C64>,
    chart: &Chart,
    h_index: usize,
    y: &PhaseVector,
    hint: &Point,
) -> Result<PhaseVector> {
    let state = y.as_state();
    let h = |s: &ChartState| phi_component_near(cfg, chart, s, h_index, hint);
    let (dh_du, dh_dp) = state_gradient(&h, &state, tol::FD_STEP)?;
    Ok(PhaseVector {
        u: dh_dp,
        p: dh_du.into_iter().map(|z| -z).collect(),
    })
}

fn rk4_step(
    cfg: &PencilConfig<C64>,
    chart: &Chart,
    h_index: usize,
    y: &PhaseVector,
    dt: f64,
    hint: &Point,
) -> Result<PhaseVector> {
    let k1 = hamiltonian_field(cfg, chart, h_index, y, hint)?;
    let k2 = hamiltonian_field(cfg, chart, h_index, &y.axpy(dt / 2.0, &k1), hint)?;
    let k3 = hamiltonian_field(cfg, chart, h_index, &y.axpy(dt / 2.0, &k2), hint)?;
    let k4 = hamiltonian_field(cfg, chart, h_index, &y.axpy(dt, &k3), hint)?;
    let mut next = y.clone();
    next = next.axpy(dt / 6.0, &k1);
    next = next.axpy(dt / 3.0, &k2);
    next = next.axpy(dt / 3.0, &k3);
    next = next.axpy(dt / 6.0, &k4);
    Ok(next)
}

/// Integrates the Hamiltonian flow of one fibration component, recording
/// positions, momenta, and all requested component values. Chart breakdowns
/// and rejected steps end the run early with the partial trajectory.
pub fn hamiltonian_flow(
    cfg: &PencilConfig<C64>,
    chart: &Chart,
    h_index: usize,
    initial: &ChartState,
    phi_indices: &[usize],
    options: FlowOptions,
) -> Result<FlowRun> {
    chart.validate(cfg)?;
    if initial.u.len() != cfg.n() || initial.p.len() != cfg.n() {
        return Err(Error::SizeMismatch {
            expected: cfg.n(),
            got: initial.u.len(),
        });
    }
    let every = options.record_every.max(1);
    let mut records = Vec::new();
    let mut abort = None;

    let mut y = PhaseVector {
        u: initial.u.clone(),
        p: initial.p.clone(),
    };
    let mut hint = chart_embed(cfg, chart, &y.u)?;
    let record =
        |records: &mut Vec<FlowRecord>, time: f64, y: &PhaseVector, hint: &Point| -> Result<()> {
            let state = y.as_state();
            let phi = phi_indices
                .iter()
                .map(|&i| phi_component_near(cfg, chart, &state, i, hint))
                .collect::<Result<Vec<C64>>>()?;
            records.push(FlowRecord {
                time,
                u: y.u.clone(),
                p: y.p.clone(),
                phi,
            });
            Ok(())
        };
    record(&mut records, 0.0, &y, &hint)?;

    for step_index in 0..options.steps {
        let time = (step_index + 1) as f64 * options.dt;
        let advanced = (|| -> Result<PhaseVector> {
            let full = rk4_step(cfg, chart, h_index, &y, options.dt, &hint)?;
            match options.reject_threshold {
                None => Ok(full),
                Some(threshold) => {
                    let half = rk4_step(cfg, chart, h_index, &y, options.dt / 2.0, &hint)?;
                    let refined = rk4_step(cfg, chart, h_index, &half, options.dt / 2.0, &hint)?;
                    let estimate = full.distance(&refined) / (1.0 + refined.magnitude());
                    if estimate > threshold {
                        return Err(Error::StepRejected { estimate });
                    }
                    Ok(refined)
                }
            }
        })();
        match advanced {
            Ok(next) => {
                y = next;
                match chart_embed_near(cfg, chart, &y.u, &hint) {
                    Ok(point) => hint = point,
                    Err(e) => {
                        abort = Some(e.to_string());
                        break;
                    }
                }
                if (step_index + 1) % every == 0 || step_index + 1 == options.steps {
                    if let Err(e) = record(&mut records, time, &y, &hint) {
                        abort = Some(e.to_string());
                        break;
                    }
                }
            }
            Err(e) => {
                abort = Some(e.to_string());
                break;
            }
        }
    }
    Ok(FlowRun { records, abort })
}

/// CSV rendering of a trajectory: time, then real/imaginary parts of each
/// position, each momentum, and each recorded component value.
pub fn flow_csv(run: &FlowRun) -> String {
    let mut out = String::new();
    if let Some(first) = run.records.first() {
        let mut header = vec!["s".to_string()];
        for k in 0..first.u.len() {
            header.push(format!("u{k}_re"));
            header.push(format!("u{k}_im"));
        }
        for k in 0..first.p.len() {
            header.push(format!("p{k}_re"));
            header.push(format!("p{k}_im"));
        }
        for j in 0..first.phi.len() {
            header.push(format!("phi{j}_re"));
            header.push(format!("phi{j}_im"));
        }
        out.push_str(&header.join(","));
        out.push('\n');
    }
    for record in &run.records {
        let mut row = vec![format!("{}", record.time)];
        for z in record.u.iter().chain(&record.p).chain(&record.phi) {
            row.push(format!("{}", z.re));
            row.push(format!("{}", z.im));
        }
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// Draws a random chart state whose embedding stays clear of the branch
/// locus and admits a covector solve.
pub fn sample_chart_state(
    cfg: &PencilConfig<C64>,
    chart: &Chart,
    rng: &mut ChaCha8Rng,
) -> Result<ChartState> {
    chart.validate(cfg)?;
    let n = cfg.n();
    for _ in 0..64 {
        let u: Vec<C64> = (0..n).map(|_| draw_complex(rng, 1.0)).collect();
        let p: Vec<C64> = (0..n).map(|_| draw_complex(rng, 1.0)).collect();
        let state = ChartState { u, p };
        let point = match chart_embed(cfg, chart, &state.u) {
            Ok(pt) => pt,
            Err(_) => continue,
        };
        if ambient_covector(cfg, chart, &point, &state.p).is_ok() {
            return Ok(state);
        }
    }
    Err(Error::Unlucky { attempts: 64 })
}

/// Numeric rank of the fibration's Jacobian with respect to all chart
/// coordinates — the independence count of the commuting components.
pub fn phi_jacobian_rank(
    cfg: &PencilConfig<C64>,
    chart: &Chart,
    state: &ChartState,
    indices: &[usize],
) -> Result<usize> {
    let hint = chart_embed(cfg, chart, &state.u)?;
    let n = state.u.len();
    let mut rows = Vec::with_capacity(indices.len());
    for &index in indices {
        let f = |s: &ChartState| phi_component_near(cfg, chart, s, index, &hint);
        let (du, dp) = state_gradient(&f, state, tol::FD_STEP)?;
        let mut row = Vec::with_capacity(2 * n);
        row.extend(du);
        row.extend(dp);
        rows.push(row);
    }
    Ok(numeric_rank(&Mat::from_rows(&rows)?, tol::RANK_REL))
}
