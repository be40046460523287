//! Multi-start maximization of GKP-Magic over parametrized states and
//! unitaries.
//!
//! The objective `log2 sum |...|` has kinks wherever a Pauli coefficient
//! changes sign, so the default local search is Nelder–Mead; a
//! finite-difference gradient ascent is available as a cross-check.

use std::cell::Cell;
use std::f64::consts::PI;

use argmin::core::{CostFunction, Error as ArgminError, Executor, Gradient, State};
use argmin::solver::gradientdescent::SteepestDescent;
use argmin::solver::linesearch::condition::ArmijoCondition;
use argmin::solver::linesearch::BacktrackingLineSearch;
use argmin::solver::neldermead::NelderMead;
use nalgebra::{DMatrix, Matrix4};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{MagicError, Result};
use crate::gates::{choi_state, GateUnitary};
use crate::measures::magic;
use crate::state::PureState;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    NelderMead,
    FiniteDiffGradientAscent,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerConfig {
    pub restarts: usize,
    /// Iteration cap for each local search.
    pub max_iters: u64,
    pub seed: u64,
    /// Convergence tolerance on the objective.
    pub tolerance: f64,
    pub method: Method,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            restarts: 64,
            max_iters: 2000,
            seed: 0,
            tolerance: 1e-10,
            method: Method::NelderMead,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 {
            return Err(MagicError::InvalidParameters(
                "restarts must be >= 1".into(),
            ));
        }
        if self.tolerance.is_nan() || self.tolerance <= 0.0 {
            return Err(MagicError::InvalidParameters(
                "tolerance must be > 0".into(),
            ));
        }
        if self.max_iters == 0 {
            return Err(MagicError::InvalidParameters(
                "max_iters must be >= 1".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimumReport {
    pub best_value: f64,
    pub best_params: Vec<f64>,
    /// The state whose magic is `best_value` (the Choi state for unitary searches).
    pub best_state: PureState,
    /// Restarts whose final value lies within `1e-6` of the best.
    pub restarts_hitting_best: usize,
    /// Final value of every restart, in restart order.
    pub history: Vec<f64>,
    /// Largest objective value evaluated during each restart.
    pub trajectory_max: Vec<f64>,
    pub seed: u64,
}

/// Agreement window used to count restarts that reach the best value.
pub const HIT_TOL: f64 = 1e-6;

#[derive(Clone, Copy)]
struct Objective<'a> {
    f: &'a (dyn Fn(&[f64]) -> f64 + Sync),
    max_seen: &'a Cell<f64>,
}

impl Objective<'_> {
    fn eval(&self, p: &[f64]) -> f64 {
        let v = (self.f)(p);
        if v > self.max_seen.get() {
            self.max_seen.set(v);
        }
        v
    }
}

impl CostFunction for Objective<'_> {
    type Param = Vec<f64>;
    type Output = f64;

    fn cost(&self, p: &Vec<f64>) -> std::result::Result<f64, ArgminError> {
        Ok(-self.eval(p))
    }
}

impl Gradient for Objective<'_> {
    type Param = Vec<f64>;
    type Gradient = Vec<f64>;

    fn gradient(&self, p: &Vec<f64>) -> std::result::Result<Vec<f64>, ArgminError> {
        const H: f64 = 1e-6;
        let mut x = p.clone();
        let mut g = Vec::with_capacity(p.len());
        for k in 0..p.len() {
            x[k] = p[k] + H;
            let up = (self.f)(&x);
            x[k] = p[k] - H;
            let down = (self.f)(&x);
            x[k] = p[k];
            g.push(-(up - down) / (2.0 * H));
        }
        Ok(g)
    }
}

fn local_search(
    objective: &Objective<'_>,
    start: Vec<f64>,
    step: f64,
    cfg: &OptimizerConfig,
) -> Result<(f64, Vec<f64>)> {
    let err = |e: ArgminError| MagicError::Optimizer(e.to_string());
    match cfg.method {
        Method::NelderMead => {
            let mut simplex = vec![start.clone()];
            for k in 0..start.len() {
                let mut p = start.clone();
                p[k] += step;
                simplex.push(p);
            }
            let solver = NelderMead::new(simplex)
                .with_sd_tolerance(cfg.tolerance)
                .map_err(err)?;
            let res = Executor::new(*objective, solver)
                .configure(|s| s.max_iters(cfg.max_iters))
                .run()
                .map_err(err)?;
            let state = res.state();
            let best = state
                .get_best_param()
                .cloned()
                .ok_or_else(|| MagicError::Optimizer("no best parameter".into()))?;
            Ok((-state.get_best_cost(), best))
        }
        Method::FiniteDiffGradientAscent => {
            let linesearch = BacktrackingLineSearch::new(ArmijoCondition::new(1e-4).map_err(err)?);
            let solver = SteepestDescent::new(linesearch);
            let res = Executor::new(*objective, solver)
                .configure(|s| {
                    s.param(start)
                        .max_iters(cfg.max_iters)
                        .target_cost(f64::NEG_INFINITY)
                })
                .run()
                .map_err(err)?;
            let state = res.state();
            let best = state
                .get_best_param()
                .cloned()
                .ok_or_else(|| MagicError::Optimizer("no best parameter".into()))?;
            Ok((-state.get_best_cost(), best))
        }
    }
}

/// Random kicks applied to each restart's incumbent after its first descent.
const HOPS: usize = 8;
const HOP_SCALE: f64 = 0.3;

/// Repeated Nelder–Mead runs from the incumbent with a shrinking simplex,
/// until a small simplex no longer improves.
fn polish(
    objective: &Objective<'_>,
    start: Vec<f64>,
    cfg: &OptimizerConfig,
) -> Result<(f64, Vec<f64>)> {
    let mut best_value = objective.eval(&start);
    let mut best_params = start;
    let mut step = 0.5;
    for _ in 0..6 {
        let (v, p) = local_search(objective, best_params.clone(), step, cfg)?;
        let improved = v > best_value + cfg.tolerance;
        if v > best_value {
            best_value = v;
            best_params = p;
        }
        if !improved && step < 0.05 {
            break;
        }
        step *= 0.3;
    }
    Ok((best_value, best_params))
}

struct RestartOutcome {
    value: f64,
    params: Vec<f64>,
    max_seen: f64,
}

/// Runs `cfg.restarts` independent local searches from `sample` and keeps
/// the best. Restarts run in parallel; each draws from its own ChaCha stream,
/// so the outcome depends only on `cfg`.
fn multistart(
    objective: &(dyn Fn(&[f64]) -> f64 + Sync),
    sample: &(dyn Fn(&mut ChaCha8Rng) -> Vec<f64> + Sync),
    cfg: &OptimizerConfig,
) -> Result<(Vec<f64>, Vec<RestartOutcome>)> {
    cfg.validate()?;
    let outcomes: Vec<RestartOutcome> = (0..cfg.restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(r as u64);
            let max_seen = Cell::new(f64::NEG_INFINITY);
            let obj = Objective {
                f: objective,
                max_seen: &max_seen,
            };
            let start = sample(&mut rng);
            let (mut best_value, mut best_params) = polish(&obj, start, cfg)?;
            for _ in 0..HOPS {
                let kicked: Vec<f64> = best_params
                    .iter()
                    .map(|x| x + HOP_SCALE * rng.sample::<f64, _>(StandardNormal))
                    .collect();
                let (v, p) = polish(&obj, kicked, cfg)?;
                if v > best_value {
                    best_value = v;
                    best_params = p;
                }
            }
            Ok(RestartOutcome {
                value: best_value,
                params: best_params,
                max_seen: max_seen.get(),
            })
        })
        .collect::<Result<_>>()?;
    let best = outcomes
        .iter()
        .enumerate()
        .max_by(|(i, a), (j, b)| a.value.total_cmp(&b.value).then(j.cmp(i)))
        .map(|(_, o)| o.params.clone())
        .expect("restarts >= 1");
    Ok((best, outcomes))
}

fn report(
    best_params: Vec<f64>,
    outcomes: &[RestartOutcome],
    state: PureState,
    seed: u64,
) -> OptimumReport {
    let best_value = magic(&state);
    let best_final = outcomes
        .iter()
        .map(|o| o.value)
        .fold(f64::NEG_INFINITY, f64::max);
    OptimumReport {
        best_value,
        best_params,
        best_state: state,
        restarts_hitting_best: outcomes
            .iter()
            .filter(|o| (o.value - best_final).abs() <= HIT_TOL)
            .count(),
        history: outcomes.iter().map(|o| o.value).collect(),
        trajectory_max: outcomes.iter().map(|o| o.max_seen).collect(),
        seed,
    }
}

fn random_angle(rng: &mut ChaCha8Rng) -> f64 {
    rng.random_range(-PI..PI)
}

/// Number of real parameters of an `n`-qubit state: `2^{n+1} - 2`.
pub fn state_param_count(n: usize) -> usize {
    (1usize << (n + 1)) - 2
}

/// Maps `2^{n+1} - 2` reals to a normalized state. The first `2^n - 1` are
/// log-weights of amplitudes `1..` (amplitude 0 has log-weight 0, the squared
/// magnitudes are their softmax); the rest are the phases of amplitudes `1..`
/// (amplitude 0 is real).
pub fn state_from_params(n: usize, params: &[f64]) -> Result<PureState> {
    let d = 1usize << n;
    if params.len() != state_param_count(n) {
        return Err(MagicError::InvalidParameters(format!(
            "expected {} parameters for {n} qubits, got {}",
            state_param_count(n),
            params.len()
        )));
    }
    let (logits, phases) = params.split_at(d - 1);
    let max = logits.iter().cloned().fold(0.0f64, f64::max);
    let mut weights = Vec::with_capacity(d);
    weights.push((-max).exp());
    weights.extend(logits.iter().map(|l| (l - max).exp()));
    let total: f64 = weights.iter().sum();
    let amps = weights
        .iter()
        .enumerate()
        .map(|(k, w)| {
            let phase = if k == 0 { 0.0 } else { phases[k - 1] };
            Complex64::from_polar((w / total).sqrt(), phase)
        })
        .collect();
    PureState::new(amps)
}

/// Most magic `n`-qubit state found by multi-start search.
pub fn most_magic_state(n: usize, cfg: &OptimizerConfig) -> Result<OptimumReport> {
    if n == 0 {
        return Err(MagicError::NotPowerOfTwo(1));
    }
    let d = 1usize << n;
    let objective =
        move |p: &[f64]| magic(&state_from_params(n, p).expect("parameter count is fixed"));
    let sample = move |rng: &mut ChaCha8Rng| {
        let mut p: Vec<f64> = (0..d - 1).map(|_| rng.sample(StandardNormal)).collect();
        p.extend((0..d - 1).map(|_| random_angle(rng)));
        p
    };
    let (best, outcomes) = multistart(&objective, &sample, cfg)?;
    let state = state_from_params(n, &best)?;
    Ok(report(best, &outcomes, state, cfg.seed))
}

/// Single-qubit closed form `log2((1 + |cos θ| + |sin θ cos φ| + |sin θ sin φ|)/2)`
/// for the Bloch state `cos(θ/2)|0> + e^{iφ} sin(θ/2)|1>`.
pub fn bloch_magic(theta: f64, phi: f64) -> f64 {
    let (s, c) = theta.sin_cos();
    ((1.0 + c.abs() + (s * phi.cos()).abs() + (s * phi.sin()).abs()) / 2.0).log2()
}

fn su2(phi1: f64, phi2: f64, alpha: f64) -> [[Complex64; 2]; 2] {
    let (s, c) = alpha.sin_cos();
    [
        [
            Complex64::from_polar(c, phi1),
            Complex64::from_polar(s, phi2),
        ],
        [
            -Complex64::from_polar(s, -phi2),
            Complex64::from_polar(c, -phi1),
        ],
    ]
}

/// `[[e^{i phi1} cos a, e^{i phi2} sin a], [-e^{-i phi2} sin a, e^{-i phi1} cos a]]`.
pub fn single_qubit_unitary(phi1: f64, phi2: f64, alpha: f64) -> GateUnitary {
    let m = su2(phi1, phi2, alpha);
    GateUnitary::from_matrix(DMatrix::from_row_slice(
        2,
        2,
        &[m[0][0], m[0][1], m[1][0], m[1][1]],
    ))
    .expect("SU(2) parametrization is unitary")
}

/// Recovers `(phi1, phi2, alpha)` of [`single_qubit_unitary`] from a 2x2
/// unitary, after removing the global phase that makes it special unitary.
/// `alpha` lands in `[0, pi/2]`; the phases are wrapped to `(-pi, pi]` and are
/// reported as 0 when their amplitude vanishes.
pub fn single_qubit_angles(u: &GateUnitary) -> Option<(f64, f64, f64)> {
    if u.n() != 1 {
        return None;
    }
    let m = u.matrix();
    let det = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
    let fix = Complex64::from_polar(1.0, -det.arg() / 2.0);
    let a = m[(0, 0)] * fix;
    let b = m[(0, 1)] * fix;
    let alpha = b.norm().atan2(a.norm());
    let phi1 = if a.norm() > 1e-12 { a.arg() } else { 0.0 };
    let phi2 = if b.norm() > 1e-12 { b.arg() } else { 0.0 };
    Some((phi1, phi2, alpha))
}

/// The 24 single-qubit Cliffords, each with its global phase fixed so the
/// first nonzero entry of the first column is real and positive.
pub fn single_qubit_cliffords() -> Vec<[[Complex64; 2]; 2]> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let c = |re: f64, im: f64| Complex64::new(re, im);
    let gens = [
        [[c(h, 0.0), c(h, 0.0)], [c(h, 0.0), c(-h, 0.0)]],
        [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(0.0, 1.0)]],
    ];
    let canon = |m: [[Complex64; 2]; 2]| {
        let lead = if m[0][0].norm() > 1e-9 {
            m[0][0]
        } else {
            m[1][0]
        };
        let f = lead.conj() / lead.norm();
        [[m[0][0] * f, m[0][1] * f], [m[1][0] * f, m[1][1] * f]]
    };
    let same = |a: &[[Complex64; 2]; 2], b: &[[Complex64; 2]; 2]| {
        (0..4).all(|k| (a[k >> 1][k & 1] - b[k >> 1][k & 1]).norm() < 1e-9)
    };
    let mut group = vec![canon([
        [c(1.0, 0.0), c(0.0, 0.0)],
        [c(0.0, 0.0), c(1.0, 0.0)],
    ])];
    let mut frontier = group.clone();
    while let Some(m) = frontier.pop() {
        for g in &gens {
            let p = canon(mul2(g, &m));
            if !group.iter().any(|q| same(q, &p)) {
                group.push(p);
                frontier.push(p);
            }
        }
    }
    group
}

fn mul2(a: &[[Complex64; 2]; 2], b: &[[Complex64; 2]; 2]) -> [[Complex64; 2]; 2] {
    let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
    for r in 0..2 {
        for c in 0..2 {
            out[r][c] = a[r][0] * b[0][c] + a[r][1] * b[1][c];
        }
    }
    out
}

fn angle_gap(a: f64, b: f64) -> f64 {
    crate::gates::wrap_angle(a - b).abs()
}

/// Smallest max-norm distance between `target` and the angles of any
/// `C1 U C2` or `C1 conj(U) C2` with single-qubit Cliffords `C1, C2`; all of
/// these share the Choi magic of `U`. Phase angles whose amplitude vanishes
/// are not compared.
pub fn clifford_angle_distance(u: &GateUnitary, target: (f64, f64, f64)) -> f64 {
    let m = u.matrix();
    let base = [[m[(0, 0)], m[(0, 1)]], [m[(1, 0)], m[(1, 1)]]];
    let conj = base.map(|row| row.map(|z| z.conj()));
    let cliffords = single_qubit_cliffords();
    let mut best = f64::INFINITY;
    for v in [base, conj] {
        for c1 in &cliffords {
            let left = mul2(c1, &v);
            for c2 in &cliffords {
                let w = mul2(&left, c2);
                let g = GateUnitary::from_matrix(DMatrix::from_row_slice(
                    2,
                    2,
                    &[w[0][0], w[0][1], w[1][0], w[1][1]],
                ))
                .expect("products of unitaries are unitary");
                let (p1, p2, a) = single_qubit_angles(&g).expect("single qubit");
                let mut d = (a - target.2).abs();
                if a.cos() > 1e-6 {
                    d = d.max(angle_gap(p1, target.0));
                }
                if a.sin() > 1e-6 {
                    d = d.max(angle_gap(p2, target.1));
                }
                best = best.min(d);
            }
        }
    }
    best
}

fn choi_magic(u: &GateUnitary) -> f64 {
    magic(&choi_state(u).expect("small gates fit the Choi cap"))
}

#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryOptimum {
    pub report: OptimumReport,
    /// Choi magic at `phi1 = 0, phi2 = pi/4, alpha = pi/4`; a local minimum
    /// along `alpha`, where the robustness of magic peaks instead.
    pub alpha_pi4_value: f64,
}

/// Maximizes the Choi-state magic over `SU(2)`; `best_params` is `(phi1, phi2, alpha)`.
/// The maximum, about 0.585, sits at `alpha = atan(1/sqrt 2) ≈ 0.6155` up to
/// Clifford symmetry (see [`clifford_angle_distance`]).
pub fn most_magic_single_qubit_unitary(cfg: &OptimizerConfig) -> Result<UnitaryOptimum> {
    let objective = |p: &[f64]| choi_magic(&single_qubit_unitary(p[0], p[1], p[2]));
    let sample = |rng: &mut ChaCha8Rng| {
        vec![
            random_angle(rng),
            random_angle(rng),
            rng.random_range(0.0..PI / 2.0),
        ]
    };
    let (best, outcomes) = multistart(&objective, &sample, cfg)?;
    let state = choi_state(&single_qubit_unitary(best[0], best[1], best[2]))?;
    let alpha_pi4_value = choi_magic(&single_qubit_unitary(0.0, PI / 4.0, PI / 4.0));
    Ok(UnitaryOptimum {
        report: report(best, &outcomes, state, cfg.seed),
        alpha_pi4_value,
    })
}

fn kron2(a: &[[Complex64; 2]; 2], b: &[[Complex64; 2]; 2]) -> Matrix4<Complex64> {
    Matrix4::from_fn(|r, c| a[r >> 1][c >> 1] * b[r & 1][c & 1])
}

/// `exp(i (x XX + y YY + z ZZ))`. The three terms commute, so this is the
/// product of `cos t + i sin t P` factors.
pub fn canonical_two_qubit(x: f64, y: f64, z: f64) -> Matrix4<Complex64> {
    let o = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    let px = [[o, one], [one, o]];
    let py = [[o, -i], [i, o]];
    let pz = [[one, o], [o, -one]];
    let factor = |t: f64, p: &[[Complex64; 2]; 2]| {
        Matrix4::identity() * Complex64::new(t.cos(), 0.0) + kron2(p, p) * (i * t.sin())
    };
    factor(x, &px) * factor(y, &py) * factor(z, &pz)
}

/// `(A ⊗ B) exp(i(x XX + y YY + z ZZ)) (C ⊗ D)` from 15 parameters: three
/// `(phi1, phi2, alpha)` triples each for A, B, C, D followed by `x, y, z`.
pub fn two_qubit_unitary(p: &[f64]) -> Result<GateUnitary> {
    if p.len() != 15 {
        return Err(MagicError::InvalidParameters(format!(
            "two-qubit parametrization takes 15 values, got {}",
            p.len()
        )));
    }
    let local = |k: usize| su2(p[3 * k], p[3 * k + 1], p[3 * k + 2]);
    let m = kron2(&local(0), &local(1))
        * canonical_two_qubit(p[12], p[13], p[14])
        * kron2(&local(2), &local(3));
    GateUnitary::from_matrix(DMatrix::from_iterator(4, 4, m.iter().cloned()))
}

/// Maximizes the four-qubit Choi-state magic over two-qubit unitaries.
pub fn most_magic_two_qubit_unitary(cfg: &OptimizerConfig) -> Result<OptimumReport> {
    let objective = |p: &[f64]| choi_magic(&two_qubit_unitary(p).expect("fixed parameter count"));
    let sample = |rng: &mut ChaCha8Rng| -> Vec<f64> {
        let mut p = Vec::with_capacity(15);
        for _ in 0..4 {
            p.push(random_angle(rng));
            p.push(random_angle(rng));
            p.push(rng.random_range(0.0..PI / 2.0));
        }
        for _ in 0..3 {
            p.push(rng.random_range(-PI / 4.0..PI / 4.0));
        }
        p
    };
    let (best, outcomes) = multistart(&objective, &sample, cfg)?;
    let state = choi_state(&two_qubit_unitary(&best)?)?;
    Ok(report(best, &outcomes, state, cfg.seed))
}
