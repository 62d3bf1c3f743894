//! Born-rule marginals for n-qubit pure states and scans over measurement axes.
//!
//! Basis index bit `p` is the computational state of party `p`, matching the
//! party-as-bit-`p` convention of the cell grid. Outcome `A` along axis `n̂`
//! is the eigenvalue `(−1)^A` of `n̂·σ`, i.e. the projector
//! `Π_A = (I + (−1)^A n̂·σ)/2`.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI};

use num::complex::Complex64;
use num::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::inequality::{correlation, hardy_base, LinearForm};
use crate::scalar::Scalar;
use crate::scenario::{Event, Scenario, SettingVector};
use crate::underlying::{MarginalSet, MarginalTable};

pub const STATE_NORM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    parties: usize,
    amps: Vec<Complex64>,
}

impl PureState {
    pub fn new(amps: Vec<Complex64>) -> Result<Self> {
        let len = amps.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::InvalidState(format!("amplitude count {len} is not 2^n with n ≥ 1")));
        }
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if !norm.is_finite() || (norm - 1.0).abs() > STATE_NORM_TOL {
            return Err(Error::InvalidState(format!("squared norm {norm} differs from 1")));
        }
        Ok(PureState { parties: len.trailing_zeros() as usize, amps })
    }

    /// Rescales to unit norm; fails only for the zero vector.
    pub fn normalized(amps: Vec<Complex64>) -> Result<Self> {
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm.is_nan() || norm <= 0.0 {
            return Err(Error::InvalidState("zero vector".into()));
        }
        Self::new(amps.into_iter().map(|a| a / norm).collect())
    }

    pub fn parties(&self) -> usize {
        self.parties
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    /// `|x⟩` with party `p` in state `(x >> p) & 1`.
    pub fn basis(parties: usize, x: usize) -> Result<Self> {
        let mut amps = vec![Complex64::zero(); 1 << parties];
        *amps.get_mut(x).ok_or_else(|| Error::InvalidState(format!("basis index {x} out of range")))? =
            Complex64::new(1.0, 0.0);
        Self::new(amps)
    }

    /// `(|01⟩ − |10⟩)/√2`, written party 0 first.
    pub fn singlet() -> Self {
        let r = FRAC_1_SQRT_2;
        let amps = vec![Complex64::zero(), Complex64::new(-r, 0.0), Complex64::new(r, 0.0), Complex64::zero()];
        PureState { parties: 2, amps }
    }

    /// `(|0…0⟩ + |1…1⟩)/√2`.
    pub fn ghz(parties: usize) -> Self {
        let mut amps = vec![Complex64::zero(); 1 << parties];
        amps[0] = Complex64::new(FRAC_1_SQRT_2, 0.0);
        amps[(1 << parties) - 1] = Complex64::new(FRAC_1_SQRT_2, 0.0);
        PureState { parties, amps }
    }

    /// `cos t |00⟩ + sin t |11⟩`.
    pub fn schmidt(t: f64) -> Self {
        let amps = vec![Complex64::new(t.cos(), 0.0), Complex64::zero(), Complex64::zero(), Complex64::new(t.sin(), 0.0)];
        PureState { parties: 2, amps }
    }

    pub fn preset(name: &str) -> Result<Self> {
        match name {
            "singlet" => Ok(Self::singlet()),
            "ghz" | "ghz3" => Ok(Self::ghz(3)),
            "zero2" => Self::basis(2, 0),
            "zero3" => Self::basis(3, 0),
            _ => Err(Error::InvalidState(format!("unknown preset {name:?} (singlet, ghz, zero2, zero3)"))),
        }
    }
}

/// Measurement direction on the Bloch sphere, polar angles in radians.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub theta: f64,
    pub phi: f64,
}

impl Axis {
    pub const Z: Axis = Axis { theta: 0.0, phi: 0.0 };
    pub const X: Axis = Axis { theta: FRAC_PI_2, phi: 0.0 };
    pub const Y: Axis = Axis { theta: FRAC_PI_2, phi: FRAC_PI_2 };
    pub const MINUS_X: Axis = Axis { theta: FRAC_PI_2, phi: PI };

    /// Requires `θ ∈ [0, π]` and `φ ∈ [0, 2π)`.
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !(0.0..=PI).contains(&theta) || !(0.0..2.0 * PI).contains(&phi) {
            return Err(Error::InvalidAxes(format!("angles out of range: theta={theta}, phi={phi}")));
        }
        Ok(Axis { theta, phi })
    }

    /// Maps arbitrary angles onto the same direction with canonical ranges.
    pub fn wrapped(theta: f64, phi: f64) -> Self {
        let mut theta = theta.rem_euclid(2.0 * PI);
        let mut phi = phi;
        if theta > PI {
            theta = 2.0 * PI - theta;
            phi += PI;
        }
        Axis { theta, phi: phi.rem_euclid(2.0 * PI) }
    }

    /// Direction in the x–z plane at angle `alpha` from +z towards +x.
    pub fn in_xz_plane(alpha: f64) -> Self {
        Self::wrapped(alpha, 0.0)
    }

    pub fn unit_vector(&self) -> [f64; 3] {
        [self.theta.sin() * self.phi.cos(), self.theta.sin() * self.phi.sin(), self.theta.cos()]
    }

    /// Eigenvector of `n̂·σ` for outcome `A` (eigenvalue `(−1)^A`).
    pub fn eigenvector(&self, outcome: u8) -> [Complex64; 2] {
        let (c, s) = ((self.theta / 2.0).cos(), (self.theta / 2.0).sin());
        let phase = Complex64::from_polar(1.0, self.phi);
        if outcome == 0 {
            [Complex64::new(c, 0.0), phase * s]
        } else {
            [Complex64::new(s, 0.0), -phase * c]
        }
    }

    /// Rows are `⟨A=0|` and `⟨A=1|`.
    fn bra_matrix(&self) -> [[Complex64; 2]; 2] {
        let up = self.eigenvector(0);
        let down = self.eigenvector(1);
        [[up[0].conj(), up[1].conj()], [down[0].conj(), down[1].conj()]]
    }
}

/// Axis per party and setting, `axes[p][k]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxisChoice {
    pub axes: Vec<Vec<Axis>>,
}

impl AxisChoice {
    pub fn new(axes: Vec<Vec<Axis>>) -> Result<Self> {
        let m = axes.first().map_or(0, Vec::len);
        if axes.is_empty() || m == 0 || axes.iter().any(|row| row.len() != m) {
            return Err(Error::InvalidAxes("need the same positive number of settings for every party".into()));
        }
        for a in axes.iter().flatten() {
            Axis::new(a.theta, a.phi)?;
        }
        Ok(AxisChoice { axes })
    }

    pub fn scenario(&self) -> Result<Scenario> {
        Scenario::new(self.axes.len(), self.axes[0].len())
    }

    fn slot(&self, slot: usize) -> Axis {
        let m = self.axes[0].len();
        self.axes[slot / m][slot % m]
    }

    fn slot_mut(&mut self, slot: usize) -> &mut Axis {
        let m = self.axes[0].len();
        &mut self.axes[slot / m][slot % m]
    }
}

fn check_pair(state: &PureState, axes: &AxisChoice) -> Result<Scenario> {
    let sc = axes.scenario()?;
    if sc.parties() != state.parties() {
        return Err(Error::InvalidAxes(format!(
            "axes for {} parties but the state has {}",
            sc.parties(),
            state.parties()
        )));
    }
    Ok(sc)
}

/// Outcome distribution for one setting vector, indexed by outcome index.
fn born_probs(state: &PureState, axes: &AxisChoice, s: &SettingVector) -> Vec<f64> {
    let mut amps = state.amps.clone();
    for (p, &k) in s.0.iter().enumerate() {
        let m = axes.axes[p][k].bra_matrix();
        let bit = 1 << p;
        for x in 0..amps.len() {
            if x & bit == 0 {
                let (a0, a1) = (amps[x], amps[x | bit]);
                amps[x] = m[0][0] * a0 + m[0][1] * a1;
                amps[x | bit] = m[1][0] * a0 + m[1][1] * a1;
            }
        }
    }
    amps.iter().map(|a| a.norm_sqr()).collect()
}

/// `P_s(o) = ⟨ψ| ⊗_p Π_{o_p}(axis_{p,s_p}) |ψ⟩` for every setting vector.
pub fn born_marginals(state: &PureState, axes: &AxisChoice) -> Result<MarginalSet<f64>> {
    let sc = check_pair(state, axes)?;
    let tables = sc
        .setting_vectors()
        .into_iter()
        .map(|s| {
            let probs = born_probs(state, axes, &s);
            MarginalTable::new(sc, s, probs)
        })
        .collect::<Result<Vec<_>>>()?;
    MarginalSet::new(sc, tables)
}

/// A form pre-lowered to float coefficients over the tables it touches.
struct CompiledForm {
    constant: f64,
    /// `(setting vector, [(outcome index, coefficient)])`
    tables: Vec<(SettingVector, Vec<(usize, f64)>)>,
}

impl CompiledForm {
    fn new(form: &LinearForm) -> Self {
        let mut tables: Vec<(SettingVector, Vec<(usize, f64)>)> = Vec::new();
        for t in form.terms() {
            let entry = (t.event.outcomes.index(), t.coef.to_f64());
            match tables.iter_mut().find(|(s, _)| *s == t.event.settings) {
                Some((_, v)) => v.push(entry),
                None => tables.push((t.event.settings.clone(), vec![entry])),
            }
        }
        CompiledForm { constant: form.constant().to_f64(), tables }
    }

    fn evaluate(&self, state: &PureState, axes: &AxisChoice) -> f64 {
        self.tables.iter().fold(self.constant, |acc, (s, terms)| {
            let probs = born_probs(state, axes, s);
            acc + terms.iter().map(|&(o, c)| c * probs[o]).sum::<f64>()
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanOptions {
    /// Uniform θ samples on `[0, π]`, endpoints included.
    pub grid_steps: usize,
    /// Sample φ uniformly on `[0, 2π)` instead of the principal planes `{0, π/2, π, 3π/2}`.
    pub full_sphere: bool,
    /// Above this many grid points, fall back to multi-start coordinate sweeps over the grid.
    pub max_grid_points: usize,
    /// Coordinate-descent refinement stops once the step falls below this.
    pub refine_tol: f64,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions { grid_steps: 8, full_sphere: false, max_grid_points: 2_000_000, refine_tol: 1e-6 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Refinement {
    pub converged: bool,
    pub iterations: usize,
    pub final_step: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanOutcome {
    pub best_value: f64,
    pub grid_value: f64,
    pub best_axes: AxisChoice,
    pub grid_points: usize,
    pub exhaustive_grid: bool,
    pub refinement: Refinement,
}

const MAX_REFINE_ITERATIONS: usize = 100_000;
const SWEEP_RESTARTS: usize = 32;
const SWEEP_SEED: u64 = 0x5EED;

fn grid_axes(opts: &ScanOptions) -> Vec<Axis> {
    let steps = opts.grid_steps.max(2);
    let phis: Vec<f64> = if opts.full_sphere {
        let k = 2 * (steps - 1);
        (0..k).map(|j| 2.0 * PI * j as f64 / k as f64).collect()
    } else {
        vec![0.0, FRAC_PI_2, PI, 3.0 * FRAC_PI_2]
    };
    let mut out = Vec::new();
    for i in 0..steps {
        let theta = PI * i as f64 / (steps - 1) as f64;
        if i == 0 || i == steps - 1 {
            out.push(Axis { theta, phi: 0.0 });
        } else {
            out.extend(phis.iter().map(|&phi| Axis { theta, phi }));
        }
    }
    out
}

/// Minimizes `objective` over axis choices for `n` parties and `m` settings:
/// a uniform grid per axis, then coordinate descent on every angle.
///
/// The grid is searched exhaustively when it has at most `max_grid_points`
/// points (ties keep the lexicographically first axis tuple); otherwise a
/// fixed set of starting points is improved by sweeping one axis at a time
/// over the grid. The whole procedure is deterministic.
pub fn minimize_over_axes(
    parties: usize,
    settings: usize,
    objective: impl Fn(&AxisChoice) -> f64,
    opts: &ScanOptions,
) -> Result<ScanOutcome> {
    if opts.grid_steps < 2 {
        return Err(Error::InvalidAxes("grid_steps must be at least 2".into()));
    }
    Scenario::new(parties, settings)?;
    let cands = grid_axes(opts);
    let slots = parties * settings;
    let build = |idx: &[usize]| AxisChoice {
        axes: (0..parties).map(|p| (0..settings).map(|k| cands[idx[p * settings + k]]).collect()).collect(),
    };
    let eval = |a: &AxisChoice| {
        let v = objective(a);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };

    let total = (cands.len() as f64).powi(slots as i32);
    let exhaustive = total <= opts.max_grid_points as f64;
    let mut best_idx = vec![0usize; slots];
    let mut best = f64::INFINITY;
    let mut grid_points = 0usize;
    if exhaustive {
        let mut idx = vec![0usize; slots];
        loop {
            let v = eval(&build(&idx));
            grid_points += 1;
            if v < best {
                best = v;
                best_idx.clone_from(&idx);
            }
            // odometer, last slot fastest
            let mut pos = slots;
            loop {
                if pos == 0 {
                    break;
                }
                pos -= 1;
                idx[pos] += 1;
                if idx[pos] < cands.len() {
                    break;
                }
                idx[pos] = 0;
            }
            if idx.iter().all(|&i| i == 0) {
                break;
            }
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(SWEEP_SEED);
        for _ in 0..SWEEP_RESTARTS {
            let mut idx: Vec<usize> = (0..slots).map(|_| rng.gen_range(0..cands.len())).collect();
            let mut cur = eval(&build(&idx));
            grid_points += 1;
            loop {
                let mut improved = false;
                for slot in 0..slots {
                    let mut keep = idx[slot];
                    for c in 0..cands.len() {
                        idx[slot] = c;
                        let v = eval(&build(&idx));
                        grid_points += 1;
                        if v < cur {
                            cur = v;
                            keep = c;
                            improved = true;
                        }
                    }
                    idx[slot] = keep;
                }
                if !improved {
                    break;
                }
            }
            if cur < best {
                best = cur;
                best_idx.clone_from(&idx);
            }
        }
    }

    let grid_value = best;
    let mut axes = build(&best_idx);
    let mut step = PI / (opts.grid_steps - 1) as f64;
    let mut iterations = 0;
    while step >= opts.refine_tol && iterations < MAX_REFINE_ITERATIONS {
        iterations += 1;
        let mut improved = false;
        for slot in 0..slots {
            for angle in 0..2 {
                for dir in [1.0, -1.0] {
                    let mut trial = axes.clone();
                    let a = trial.slot(slot);
                    *trial.slot_mut(slot) = if angle == 0 {
                        Axis::wrapped(a.theta + dir * step, a.phi)
                    } else {
                        Axis::wrapped(a.theta, a.phi + dir * step)
                    };
                    let v = eval(&trial);
                    if v < best {
                        best = v;
                        axes = trial;
                        improved = true;
                        break;
                    }
                }
            }
        }
        if !improved {
            step /= 2.0;
        }
    }
    Ok(ScanOutcome {
        best_value: best,
        grid_value,
        best_axes: axes,
        grid_points,
        exhaustive_grid: exhaustive,
        refinement: Refinement { converged: step < opts.refine_tol, iterations, final_step: step },
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ViolationReport {
    pub form: String,
    pub best_value: f64,
    pub best_axes: AxisChoice,
    pub grid_steps: usize,
    pub grid_points: usize,
    pub refinement: Refinement,
    /// Set when the best value is below `-VIOLATION_TOL`.
    pub violated: bool,
}

/// Values above this magnitude below zero count as violations.
pub const VIOLATION_TOL: f64 = 1e-9;

/// Minimizes a classically proven form over measurement axes for a fixed state.
pub fn violation_scan(form: &LinearForm, state: &PureState, grid_steps: usize) -> Result<ViolationReport> {
    violation_scan_with(form, state, &ScanOptions { grid_steps, ..ScanOptions::default() })
}

pub fn violation_scan_with(form: &LinearForm, state: &PureState, opts: &ScanOptions) -> Result<ViolationReport> {
    if !form.certify().is_proven() {
        return Err(Error::UnsupportedForm(format!("{form} is not a proven inequality")));
    }
    let sc = form.scenario();
    if sc.parties() != state.parties() {
        return Err(Error::InvalidState(format!("form has {} parties, state has {}", sc.parties(), state.parties())));
    }
    let compiled = CompiledForm::new(form);
    let out = minimize_over_axes(sc.parties(), sc.settings(), |a| compiled.evaluate(state, a), opts)?;
    Ok(ViolationReport {
        form: form.to_string(),
        best_value: out.best_value,
        best_axes: out.best_axes,
        grid_steps: opts.grid_steps,
        grid_points: out.grid_points,
        refinement: out.refinement,
        violated: out.best_value < -VIOLATION_TOL,
    })
}

/// Two-qubit state orthogonal to three product vectors, via the generalized cross product.
fn orthogonal_complement(rows: &[[Complex64; 4]; 3]) -> Option<[Complex64; 4]> {
    let det3 = |m: [[Complex64; 3]; 3]| {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    };
    let mut psi = [Complex64::zero(); 4];
    for (i, out) in psi.iter_mut().enumerate() {
        let mut minor = [[Complex64::zero(); 3]; 3];
        for (r, row) in rows.iter().enumerate() {
            let mut c = 0;
            for (j, v) in row.iter().enumerate() {
                if j != i {
                    minor[r][c] = *v;
                    c += 1;
                }
            }
        }
        let d = det3(minor);
        *out = if i % 2 == 0 { d } else { -d };
    }
    let norm = psi.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    if norm < 1e-9 {
        return None;
    }
    Some(psi.map(|a| a / norm))
}

/// `⟨e|` for a two-party event as a row of conjugated product amplitudes.
fn product_bra(axes: &AxisChoice, e: &Event) -> [Complex64; 4] {
    let a = axes.axes[0][e.settings.0[0]].eigenvector(e.outcomes.0[0]);
    let b = axes.axes[1][e.settings.0[1]].eigenvector(e.outcomes.0[1]);
    let mut row = [Complex64::zero(); 4];
    for (x, r) in row.iter_mut().enumerate() {
        *r = (a[x & 1] * b[x >> 1]).conj();
    }
    row
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HardyReport {
    /// Largest `P_00(0,0)` found with the three zero constraints enforced.
    pub probability: f64,
    pub axes: AxisChoice,
    /// Amplitudes `[re, im]` of the optimal state.
    pub state: Vec<[f64; 2]>,
    /// Largest of the three constrained probabilities at the optimum, recomputed by [`born_marginals`].
    pub zero_residual: f64,
    pub grid_points: usize,
    pub refinement: Refinement,
}

/// Maximizes the Hardy probability `P_00(0,0)` subject to
/// `P_10(0,0) = P_01(0,0) = P_11(1,1) = 0` over two-qubit pure states and axes.
///
/// For fixed axes the three zeros pin the state (up to phase) to the vector
/// orthogonal to three product states, so only the axes are scanned.
pub fn hardy_scan(opts: &ScanOptions) -> Result<HardyReport> {
    let base = hardy_base();
    let (pos, neg) = base.split_by_sign();
    let zeros: Vec<Event> = pos.iter().map(|t| t.event.clone()).collect();
    let target = neg[0].event.clone();
    let state_for = |axes: &AxisChoice| -> Option<[Complex64; 4]> {
        let rows = [product_bra(axes, &zeros[0]), product_bra(axes, &zeros[1]), product_bra(axes, &zeros[2])];
        orthogonal_complement(&rows)
    };
    let objective = |axes: &AxisChoice| -> f64 {
        match state_for(axes) {
            Some(psi) => {
                let bra = product_bra(axes, &target);
                -bra.iter().zip(&psi).map(|(b, a)| b * a).sum::<Complex64>().norm_sqr()
            }
            None => f64::INFINITY,
        }
    };
    let out = minimize_over_axes(2, 2, objective, opts)?;
    let psi = state_for(&out.best_axes).ok_or_else(|| Error::InvalidState("degenerate optimum".into()))?;
    let state = PureState::normalized(psi.to_vec())?;
    let ms = born_marginals(&state, &out.best_axes)?;
    let zero_residual = zeros.iter().map(|z| ms.prob(z).copied()).collect::<Result<Vec<f64>>>()?.into_iter().fold(0.0, f64::max);
    Ok(HardyReport {
        probability: *ms.prob(&target)?,
        axes: out.best_axes,
        state: state.amplitudes().iter().map(|a| [a.re, a.im]).collect(),
        zero_residual,
        grid_points: out.grid_points,
        refinement: out.refinement,
    })
}

/// Setting 0 is `+y` and setting 1 is `−x` for every party. With the GHZ state
/// `(|000⟩+|111⟩)/√2` this gives `C_001 = C_010 = C_100 = +1` and `C_111 = −1`.
pub fn ghz_axes() -> AxisChoice {
    AxisChoice { axes: vec![vec![Axis::Y, Axis::MINUS_X]; 3] }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GhzReport {
    pub c001: f64,
    pub c010: f64,
    pub c100: f64,
    pub c111: f64,
    /// `C_111 − C_001 − C_010 − C_100`.
    pub lhs: f64,
    pub bound: f64,
    pub violated: bool,
}

/// `C_111 − C_001 − C_010 − C_100` for any three-party two-setting marginal set.
pub fn zukowski_lhs<T: Scalar>(ms: &MarginalSet<T>) -> Result<(T, [T; 4])> {
    if ms.scenario() != Scenario::new(3, 2)? {
        return Err(Error::UnsupportedScenario(format!("expected n=3,m=2, got {}", ms.scenario())));
    }
    let c = |s: [usize; 3]| ms.table(&SettingVector::new(s)).map(correlation);
    let (c001, c010, c100, c111) = (c([0, 0, 1])?, c([0, 1, 0])?, c([1, 0, 0])?, c([1, 1, 1])?);
    let lhs = c111.clone() - c001.clone() - c010.clone() - c100.clone();
    Ok((lhs, [c001, c010, c100, c111]))
}

pub fn ghz_check() -> Result<GhzReport> {
    let ms = born_marginals(&PureState::ghz(3), &ghz_axes())?;
    let (lhs, [c001, c010, c100, c111]) = zukowski_lhs(&ms)?;
    Ok(GhzReport { c001, c010, c100, c111, lhs, bound: -2.0, violated: lhs < -2.0 - VIOLATION_TOL })
}

/// The CHSH-optimal singlet axes in the x–z plane: Alice `0, π/2`, Bob `π/4, 3π/4`.
pub fn chsh_optimal_axes() -> AxisChoice {
    use std::f64::consts::FRAC_PI_4;
    AxisChoice {
        axes: vec![
            vec![Axis::in_xz_plane(0.0), Axis::in_xz_plane(FRAC_PI_2)],
            vec![Axis::in_xz_plane(FRAC_PI_4), Axis::in_xz_plane(3.0 * FRAC_PI_4)],
        ],
    }
}
