//! Local-model membership: does a nonnegative `ρ` reproduce a marginal set?
//!
//! Decided by a dense two-phase simplex with Bland's rule, generic over the
//! arithmetic mode so rational inputs get exact verdicts.

use num::Zero;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::inequality::{chsh_catalog, standard_forms, LinearForm};
use crate::scalar::{int, Mode, Rational, Scalar};
use crate::scenario::{Outcomes, Scenario};
use crate::underlying::{check_factorization, FactorizationReport, MarginalSet, MarginalTable, UnderlyingDist};

/// Pivot-size threshold for float tableaus.
pub const FLOAT_PIVOT_EPS: f64 = 1e-11;
/// Default phase-one feasibility tolerance for float inputs.
pub const FLOAT_FEASIBILITY_TOL: f64 = 1e-8;

const MAX_PIVOTS: usize = 1_000_000;

fn pivot_eps<T: Scalar>() -> T {
    match T::MODE {
        Mode::Rational => T::zero(),
        Mode::Float => T::from_rational(&Rational::new(1.into(), 100_000_000_000i64.into())), // FLOAT_PIVOT_EPS
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum LpOutcome<T> {
    Optimal { x: Vec<T>, value: T },
    /// Carries the phase-one minimum of the artificial sum.
    Infeasible { phase_one: T },
    Unbounded,
}

/// `min c·x` subject to `A x = b`, `x ≥ 0`, with `b ≥ 0`.
#[derive(Debug, Clone)]
pub struct LinearProgram<T> {
    pub a: Vec<Vec<T>>,
    pub b: Vec<T>,
    pub c: Vec<T>,
}

struct Tableau<T> {
    rows: Vec<Vec<T>>,
    rhs: Vec<T>,
    cost: Vec<T>,
    /// Negated objective value.
    neg_value: T,
    basis: Vec<usize>,
    pivots: usize,
    eps: T,
}

impl<T: Scalar> Tableau<T> {
    fn pivot(&mut self, r: usize, col: usize) {
        let p = self.rows[r][col].clone();
        for v in self.rows[r].iter_mut() {
            if !v.is_zero() {
                *v = v.clone() / p.clone();
            }
        }
        self.rhs[r] = self.rhs[r].clone() / p;
        let nz: Vec<usize> = (0..self.rows[r].len()).filter(|&j| !self.rows[r][j].is_zero()).collect();
        let (pivot_row, pivot_rhs) = (self.rows[r].clone(), self.rhs[r].clone());
        let eliminate = |row: &mut Vec<T>, rhs: &mut T| {
            let f = row[col].clone();
            if f.is_zero() {
                return;
            }
            for &j in &nz {
                row[j] = row[j].clone() - f.clone() * pivot_row[j].clone();
            }
            row[col] = T::zero();
            *rhs = rhs.clone() - f * pivot_rhs.clone();
        };
        for i in 0..self.rows.len() {
            if i != r {
                let (row, rhs) = (&mut self.rows[i], &mut self.rhs[i]);
                eliminate(row, rhs);
            }
        }
        eliminate(&mut self.cost, &mut self.neg_value);
        self.basis[r] = col;
        self.pivots += 1;
    }

    /// Runs Bland's rule over columns `< allowed`. Returns `false` if unbounded.
    fn run(&mut self, allowed: usize) -> Result<bool> {
        let neg_eps = -self.eps.clone();
        loop {
            let Some(col) = (0..allowed).find(|&j| self.cost[j] < neg_eps) else {
                return Ok(true);
            };
            let mut best: Option<(usize, T)> = None;
            for i in 0..self.rows.len() {
                if self.rows[i][col] > self.eps {
                    let ratio = self.rhs[i].clone() / self.rows[i][col].clone();
                    let better = match &best {
                        None => true,
                        Some((bi, br)) => ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi]),
                    };
                    if better {
                        best = Some((i, ratio));
                    }
                }
            }
            let Some((r, _)) = best else {
                return Ok(false);
            };
            if self.pivots >= MAX_PIVOTS {
                return Err(Error::InvalidDistribution("simplex pivot limit reached".into()));
            }
            self.pivot(r, col);
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution<T> {
    pub outcome: LpOutcome<T>,
    pub pivots: usize,
}

impl<T: Scalar> LinearProgram<T> {
    /// Solves with feasibility tolerance `tol` on the phase-one optimum.
    pub fn solve(&self, tol: &T) -> Result<LpSolution<T>> {
        let m = self.a.len();
        let n = self.c.len();
        if self.b.len() != m || self.a.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidDistribution("linear program dimensions disagree".into()));
        }
        if self.b.iter().any(|v| v.is_negative()) {
            return Err(Error::InvalidDistribution("right-hand side must be nonnegative".into()));
        }
        // Columns: n structural, then m artificial.
        let rows: Vec<Vec<T>> = self
            .a
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let mut row = r.clone();
                row.extend((0..m).map(|k| if k == i { T::one() } else { T::zero() }));
                row
            })
            .collect();
        let mut cost = vec![T::zero(); n + m];
        for (j, c) in cost.iter_mut().enumerate().take(n) {
            *c = -self.a.iter().map(|r| r[j].clone()).sum::<T>();
        }
        let neg_value = -self.b.iter().cloned().sum::<T>();
        let mut t = Tableau {
            rows,
            rhs: self.b.clone(),
            cost,
            neg_value,
            basis: (n..n + m).collect(),
            pivots: 0,
            eps: pivot_eps(),
        };
        t.run(n)?;
        let phase_one = -t.neg_value.clone();
        if phase_one > *tol {
            return Ok(LpSolution { outcome: LpOutcome::Infeasible { phase_one }, pivots: t.pivots });
        }
        // Drive zero-level artificials out; rows with no structural entry are redundant.
        for r in 0..m {
            if t.basis[r] >= n {
                if let Some(col) = (0..n).find(|&j| t.rows[r][j].abs() > t.eps) {
                    t.pivot(r, col);
                }
            }
        }
        // Phase two over structural columns only.
        t.cost = vec![T::zero(); n + m];
        t.neg_value = T::zero();
        for j in 0..n {
            t.cost[j] = self.c[j].clone();
        }
        for r in 0..m {
            let bcol = t.basis[r];
            if bcol < n && !t.cost[bcol].is_zero() {
                let f = t.cost[bcol].clone();
                for j in 0..n + m {
                    t.cost[j] = t.cost[j].clone() - f.clone() * t.rows[r][j].clone();
                }
                t.neg_value = t.neg_value.clone() - f * t.rhs[r].clone();
            }
        }
        if !t.run(n)? {
            return Ok(LpSolution { outcome: LpOutcome::Unbounded, pivots: t.pivots });
        }
        let mut x = vec![T::zero(); n];
        for (r, &bcol) in t.basis.iter().enumerate() {
            if bcol < n {
                x[bcol] = t.rhs[r].clone();
            }
        }
        Ok(LpSolution { outcome: LpOutcome::Optimal { x, value: -t.neg_value }, pivots: t.pivots })
    }
}

/// The equality system for `ρ`: one row per `(s, o)` plus normalization.
#[derive(Debug, Clone)]
pub struct FeasibilityProblem<T> {
    pub scenario: Scenario,
    pub program: LinearProgram<T>,
}

impl<T: Scalar> FeasibilityProblem<T> {
    pub fn new(ms: &MarginalSet<T>) -> Self {
        let sc = ms.scenario();
        let cells = sc.cell_count();
        let mut a = Vec::with_capacity(sc.setting_vector_count() * sc.outcome_count() + 1);
        let mut b = Vec::with_capacity(a.capacity());
        for t in ms.tables() {
            for (o, p) in t.probs().iter().enumerate() {
                let mut row = vec![T::zero(); cells];
                let e = crate::scenario::Event { settings: t.settings().clone(), outcomes: Outcomes::from_index(sc.parties(), o) };
                for c in sc.support_cells(&e) {
                    row[c] = T::one();
                }
                a.push(row);
                b.push(p.clone());
            }
        }
        a.push(vec![T::one(); cells]);
        b.push(T::one());
        FeasibilityProblem { scenario: sc, program: LinearProgram { a, b, c: vec![T::zero(); cells] } }
    }
}

/// The most negative known form at an infeasible point.
#[derive(Debug, Clone, PartialEq)]
pub struct ViolatedForm<T> {
    pub form: LinearForm,
    pub value: T,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Membership<T> {
    Feasible { witness: UnderlyingDist<T> },
    Infeasible { hint: Option<ViolatedForm<T>>, phase_one: T },
}

#[derive(Debug, Clone, PartialEq)]
pub struct MembershipResult<T> {
    pub verdict: Membership<T>,
    /// Largest `|P_s(o) − Σ ρ|` of the witness; zero when infeasible.
    pub residual: f64,
    pub pivots: usize,
}

impl<T> MembershipResult<T> {
    pub fn is_feasible(&self) -> bool {
        matches!(self.verdict, Membership::Feasible { .. })
    }
}

/// Largest absolute difference between the marginals of `rho` and `ms`.
pub fn marginal_residual<T: Scalar>(rho: &UnderlyingDist<T>, ms: &MarginalSet<T>) -> f64 {
    let got = rho.marginalize_all();
    got.tables()
        .iter()
        .zip(ms.tables())
        .flat_map(|(g, t)| g.probs().iter().zip(t.probs()).map(|(x, y)| (x.clone() - y.clone()).abs().to_f64()))
        .fold(0.0, f64::max)
}

/// Decides whether some `ρ ≥ 0` reproduces every table of `ms`.
///
/// `tol` bounds the phase-one optimum; pass zero in rational mode for an
/// exact verdict and [`FLOAT_FEASIBILITY_TOL`] in float mode.
pub fn membership<T: Scalar>(ms: &MarginalSet<T>, tol: &T) -> Result<MembershipResult<T>> {
    if tol.is_negative() {
        return Err(Error::InvalidDistribution("tolerance must be nonnegative".into()));
    }
    let problem = FeasibilityProblem::new(ms);
    let sol = problem.program.solve(tol)?;
    match sol.outcome {
        LpOutcome::Optimal { x, .. } => {
            // Float pivots can leave entries at -1e-17; clamp them before validation.
            let x: Vec<T> = x.into_iter().map(|v| if v.is_negative() { T::zero() } else { v }).collect();
            let witness = UnderlyingDist::new(problem.scenario, x)?;
            let residual = marginal_residual(&witness, ms);
            Ok(MembershipResult { verdict: Membership::Feasible { witness }, residual, pivots: sol.pivots })
        }
        LpOutcome::Infeasible { phase_one } => Ok(MembershipResult {
            verdict: Membership::Infeasible { hint: most_violated(ms)?, phase_one },
            residual: 0.0,
            pivots: sol.pivots,
        }),
        LpOutcome::Unbounded => unreachable!("zero objective is bounded"),
    }
}

fn most_violated<T: Scalar>(ms: &MarginalSet<T>) -> Result<Option<ViolatedForm<T>>> {
    let mut best: Option<ViolatedForm<T>> = None;
    for form in standard_forms(ms.scenario()) {
        let value = form.evaluate(ms)?;
        if value < -T::zero_tol() && best.as_ref().is_none_or(|b| value < b.value) {
            best = Some(ViolatedForm { form, value });
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Agreement {
    Consistent,
    /// All supplied forms hold yet no `ρ` exists: the catalog misses a facet.
    CatalogIncomplete,
    /// A supplied form fails yet `ρ` exists: the form was not a valid inequality.
    SoundnessViolation,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrossValidation<T> {
    pub values: Vec<T>,
    pub forms_hold: bool,
    pub feasible: bool,
    pub agreement: Agreement,
}

/// Compares form nonnegativity with the membership verdict.
pub fn cross_validate<T: Scalar>(ms: &MarginalSet<T>, forms: &[LinearForm], tol: &T) -> Result<CrossValidation<T>> {
    let values = forms.iter().map(|f| f.evaluate(ms)).collect::<Result<Vec<T>>>()?;
    let neg_tol = -tol.clone();
    let forms_hold = values.iter().all(|v| *v >= neg_tol);
    let feasible = membership(ms, tol)?.is_feasible();
    let agreement = match (forms_hold, feasible) {
        (true, false) => Agreement::CatalogIncomplete,
        (false, true) => Agreement::SoundnessViolation,
        _ => Agreement::Consistent,
    };
    Ok(CrossValidation { values, forms_hold, feasible, agreement })
}

/// Marginals of the deterministic model sitting on one cell.
pub fn deterministic_box<T: Scalar>(scenario: Scenario, cell: usize) -> Result<MarginalSet<T>> {
    if cell >= scenario.cell_count() {
        return Err(Error::InvalidIndex(format!("cell {cell} out of range for {scenario}")));
    }
    Ok(UnderlyingDist::<T>::point_mass_flat(scenario, cell).marginalize_all())
}

/// Bipartite PR box: `P_ab(A,B) = 1/2` iff `A ⊕ B = ab ⊕ αa ⊕ βb ⊕ γ`.
pub fn pr_box<T: Scalar>(alpha: u8, beta: u8, gamma: u8) -> MarginalSet<T> {
    let sc = Scenario::bipartite();
    let half = T::from_rational(&Rational::new(1.into(), 2.into()));
    let tables = sc
        .setting_vectors()
        .into_iter()
        .map(|s| {
            let (a, b) = (s.0[0] as u8, s.0[1] as u8);
            let parity = (a & b) ^ (alpha & a) ^ (beta & b) ^ gamma;
            let probs = (0..4).map(|o| if ((o & 1) ^ (o >> 1)) as u8 == parity { half.clone() } else { T::zero() }).collect();
            MarginalTable::new(sc, s, probs).expect("PR box table")
        })
        .collect();
    MarginalSet::new(sc, tables).expect("PR box set")
}

/// The 24 vertices of the bipartite two-setting no-signaling polytope:
/// 16 deterministic boxes followed by 8 PR boxes.
pub fn no_signaling_vertices<T: Scalar>() -> Vec<MarginalSet<T>> {
    let sc = Scenario::bipartite();
    let mut out: Vec<MarginalSet<T>> = (0..16).map(|c| deterministic_box(sc, c).expect("cell in range")).collect();
    for v in 0..8u8 {
        out.push(pr_box(v & 1, (v >> 1) & 1, v >> 2));
    }
    out
}

/// Weighted average of marginal sets with nonnegative integer weights.
pub fn mix(sets: &[MarginalSet<Rational>], weights: &[u64]) -> Result<MarginalSet<Rational>> {
    let total: u64 = weights.iter().sum();
    let (Some(first), true) = (sets.first(), total > 0 && sets.len() == weights.len()) else {
        return Err(Error::InvalidDistribution("need matching sets and weights with positive total".into()));
    };
    let sc = first.scenario();
    let tables = (0..first.tables().len())
        .map(|i| {
            let probs = (0..sc.outcome_count())
                .map(|o| {
                    sets.iter().zip(weights).map(|(s, &w)| s.tables()[i].probs()[o].clone() * int(w as i64)).sum::<Rational>()
                        / int(total as i64)
                })
                .collect();
            MarginalTable::new(sc, first.tables()[i].settings().clone(), probs)
        })
        .collect::<Result<Vec<_>>>()?;
    MarginalSet::new(sc, tables)
}

/// A random point of the bipartite no-signaling polytope with small rational weights.
///
/// Half the samples mix in one PR box so both verdicts occur often.
pub fn sample_no_signaling<R: Rng>(rng: &mut R) -> MarginalSet<Rational> {
    let vertices = no_signaling_vertices::<Rational>();
    let mut sets = Vec::new();
    let mut weights = Vec::new();
    for _ in 0..rng.gen_range(1..=4) {
        sets.push(vertices[rng.gen_range(0..16)].clone());
        weights.push(rng.gen_range(1..=8));
    }
    if rng.gen_bool(0.5) {
        sets.push(vertices[16 + rng.gen_range(0..8)].clone());
        weights.push(rng.gen_range(1..=24));
    }
    mix(&sets, &weights).expect("valid mixture")
}

/// A random `ρ` with integer weights in `0..=max_weight` normalized, at least one positive.
pub fn sample_rational_dist<R: Rng>(scenario: Scenario, rng: &mut R, max_weight: u64) -> UnderlyingDist<Rational> {
    let mut w: Vec<u64> = (0..scenario.cell_count()).map(|_| rng.gen_range(0..=max_weight)).collect();
    if w.iter().all(|&v| v == 0) {
        let i = rng.gen_range(0..w.len());
        w[i] = 1;
    }
    let total = int(w.iter().sum::<u64>() as i64);
    UnderlyingDist::new(scenario, w.into_iter().map(|v| int(v as i64) / total.clone()).collect()).expect("normalized")
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FineReport {
    pub samples: usize,
    pub local: usize,
    pub disagreements: usize,
}

/// For each sample, membership must agree with "all eight CHSH branches are
/// nonnegative" (positivity holds by construction). Exact arithmetic.
pub fn fine_check<R: Rng>(samples: usize, rng: &mut R) -> Result<FineReport> {
    let chsh = chsh_catalog();
    let mut report = FineReport { samples, local: 0, disagreements: 0 };
    for _ in 0..samples {
        let ms = sample_no_signaling(rng);
        let cv = cross_validate(&ms, &chsh, &Rational::zero())?;
        report.local += usize::from(cv.feasible);
        report.disagreements += usize::from(cv.agreement != Agreement::Consistent);
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeparatingExample {
    pub rho: UnderlyingDist<Rational>,
    pub factorization: FactorizationReport<Rational>,
}

/// The first equal mixture of two cells (in flat order) whose marginals
/// violate statistical independence. Its marginals are local by construction.
pub fn separating_example(scenario: Scenario) -> Result<SeparatingExample> {
    let cells = scenario.cell_count();
    let half = Rational::new(1.into(), 2.into());
    for i in 0..cells {
        for j in i + 1..cells {
            let rho = UnderlyingDist::from_cells(
                scenario,
                [(scenario.grid_index(i), half.clone()), (scenario.grid_index(j), half.clone())],
            )?;
            let factorization = check_factorization(&rho.marginalize_all(), &Rational::zero());
            if !factorization.holds() {
                return Ok(SeparatingExample { rho, factorization });
            }
        }
    }
    Err(Error::UnsupportedScenario(format!("{scenario} has no two-cell example")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inequality::{catalog_hardy, chsh_form, zukowski_form};
    use crate::quantum::{born_marginals, chsh_optimal_axes, PureState};
    use crate::scalar::ratio;
    use crate::scenario::SettingVector;
    use num::Signed;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::time::Instant;

    fn r0() -> Rational {
        Rational::zero()
    }

    /// Oracle: enumerate every basis of a tiny LP by brute force.
    fn brute_force_min(lp: &LinearProgram<Rational>) -> Option<Rational> {
        let m = lp.a.len();
        let n = lp.c.len();
        let mut best: Option<Rational> = None;
        for mask in 0u32..1 << n {
            if mask.count_ones() as usize > m {
                continue;
            }
            let cols: Vec<usize> = (0..n).filter(|j| mask >> j & 1 == 1).collect();
            // Gaussian elimination on A[:, cols] x = b.
            let mut aug: Vec<Vec<Rational>> =
                (0..m).map(|i| cols.iter().map(|&j| lp.a[i][j].clone()).chain([lp.b[i].clone()]).collect()).collect();
            let k = cols.len();
            let mut row = 0;
            let mut pivot_cols = Vec::new();
            for c in 0..k {
                let Some(p) = (row..m).find(|&i| !aug[i][c].is_zero()) else { continue };
                aug.swap(row, p);
                let pv = aug[row][c].clone();
                for v in aug[row].iter_mut() {
                    *v = v.clone() / pv.clone();
                }
                let pivot = aug[row].clone();
                for (i, r) in aug.iter_mut().enumerate() {
                    if i != row && !r[c].is_zero() {
                        let f = r[c].clone();
                        for (x, p) in r.iter_mut().zip(&pivot).take(k + 1) {
                            *x = x.clone() - f.clone() * p.clone();
                        }
                    }
                }
                pivot_cols.push(c);
                row += 1;
            }
            if pivot_cols.len() != k || (row..m).any(|i| !aug[i][k].is_zero()) {
                continue;
            }
            let x: Vec<Rational> = (0..k).map(|i| aug[i][k].clone()).collect();
            if x.iter().any(|v| v.is_negative()) {
                continue;
            }
            let value: Rational = cols.iter().zip(&x).map(|(&j, v)| lp.c[j].clone() * v.clone()).sum();
            if best.as_ref().is_none_or(|b| value < *b) {
                best = Some(value);
            }
        }
        best
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn simplex_matches_vertex_enumeration(
            a in prop::collection::vec(prop::collection::vec(0i64..4, 5), 1..4),
            x0 in prop::collection::vec(0i64..3, 5),
            c in prop::collection::vec(0i64..5, 5),
            infeasible_shift in 0i64..2,
        ) {
            // b = A x0 (+ a shift that may break feasibility); c ≥ 0 keeps it bounded.
            let a: Vec<Vec<Rational>> = a.iter().map(|r| r.iter().map(|&v| int(v)).collect()).collect();
            let b: Vec<Rational> = a.iter().enumerate()
                .map(|(i, r)| r.iter().zip(&x0).map(|(v, &x)| v.clone() * int(x)).sum::<Rational>() + int(if i == 0 { infeasible_shift } else { 0 }))
                .collect();
            let lp = LinearProgram { a, b, c: c.iter().map(|&v| int(v)).collect() };
            let got = lp.solve(&r0()).unwrap().outcome;
            match (brute_force_min(&lp), got) {
                (Some(v), LpOutcome::Optimal { value, x }) => {
                    prop_assert_eq!(&value, &v);
                    for (row, b) in lp.a.iter().zip(&lp.b) {
                        prop_assert_eq!(row.iter().zip(&x).map(|(p, q)| p.clone() * q.clone()).sum::<Rational>(), b.clone());
                    }
                    prop_assert!(x.iter().all(|v| !v.is_negative()));
                }
                (None, LpOutcome::Infeasible { phase_one }) => prop_assert!(phase_one > r0()),
                (oracle, got) => prop_assert!(false, "oracle {:?} vs {:?}", oracle, got),
            }
        }

        #[test]
        fn witness_reproduces_marginals(seed in any::<u64>(), which in 0usize..3) {
            let sc = [Scenario::bipartite(), Scenario::new(3, 2).unwrap(), Scenario::new(2, 3).unwrap()][which];
            let rho = sample_rational_dist(sc, &mut ChaCha8Rng::seed_from_u64(seed), 3);
            let ms = rho.marginalize_all();
            let res = membership(&ms, &r0()).unwrap();
            let Membership::Feasible { witness } = res.verdict else { panic!("local marginals reported infeasible") };
            prop_assert_eq!(witness.marginalize_all(), ms);
            prop_assert_eq!(res.residual, 0.0);
        }

        #[test]
        fn soundness_against_standard_forms(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let ms = sample_no_signaling(&mut rng);
            let feasible = membership(&ms, &r0()).unwrap().is_feasible();
            if feasible {
                for f in standard_forms(Scenario::bipartite()) {
                    prop_assert!(!f.evaluate(&ms).unwrap().is_negative());
                }
            }
        }
    }

    #[test]
    fn uniform_is_feasible() {
        let sc = Scenario::bipartite();
        let res = membership(&MarginalSet::<Rational>::uniform(sc), &r0()).unwrap();
        let Membership::Feasible { witness } = res.verdict else { panic!() };
        assert_eq!(witness.marginalize_all(), MarginalSet::uniform(sc));
        let res = membership(&MarginalSet::<f64>::uniform(sc), &FLOAT_FEASIBILITY_TOL).unwrap();
        assert!(res.is_feasible() && res.residual < 1e-12);
    }

    #[test]
    fn singlet_at_chsh_angles_is_infeasible() {
        let ms = born_marginals(&PureState::singlet(), &chsh_optimal_axes()).unwrap();
        let res = membership(&ms, &FLOAT_FEASIBILITY_TOL).unwrap();
        let Membership::Infeasible { hint: Some(hint), phase_one } = res.verdict else { panic!("{:?}", res.verdict) };
        assert!(phase_one > 1e-3);
        let (_, lower) = chsh_form(&SettingVector::new([0, 1])).unwrap();
        assert_eq!(hint.form, lower);
        assert!((hint.value - (2.0 - 2.0 * 2f64.sqrt())).abs() < 1e-12);
        let cv = cross_validate(&ms, &chsh_catalog(), &FLOAT_FEASIBILITY_TOL).unwrap();
        assert!(!cv.forms_hold && !cv.feasible && cv.agreement == Agreement::Consistent);
    }

    #[test]
    fn pr_boxes_are_no_signaling_and_nonlocal() {
        for v in no_signaling_vertices::<Rational>().into_iter().skip(16) {
            assert_eq!(v.max_signaling(), 0.0);
            assert!(!membership(&v, &r0()).unwrap().is_feasible());
            let min = chsh_catalog().iter().map(|f| f.evaluate(&v).unwrap()).min().unwrap();
            assert_eq!(min, int(-2));
        }
    }

    #[test]
    fn fine_theorem_on_samples() {
        let rep = fine_check(500, &mut ChaCha8Rng::seed_from_u64(7)).unwrap();
        assert_eq!(rep.disagreements, 0);
        assert!(rep.local > 50 && rep.local < 450, "{rep:?}");
    }

    #[test]
    fn catalog_incompleteness_is_reported() {
        // Each PR box violates exactly one CHSH branch, so a single branch misses seven of them.
        let forms = vec![chsh_catalog()[0].clone()];
        let missed = no_signaling_vertices::<Rational>()
            .into_iter()
            .skip(16)
            .filter(|v| cross_validate(v, &forms, &r0()).unwrap().agreement == Agreement::CatalogIncomplete)
            .count();
        assert_eq!(missed, 7);
        // The full Hardy family covers every PR box.
        for v in no_signaling_vertices::<Rational>().into_iter().skip(16) {
            assert_eq!(cross_validate(&v, &catalog_hardy(), &r0()).unwrap().agreement, Agreement::Consistent);
        }
    }

    #[test]
    fn separating_example_is_local_but_correlated() {
        let ex = separating_example(Scenario::bipartite()).unwrap();
        assert!(!ex.factorization.holds());
        assert!(membership(&ex.rho.marginalize_all(), &r0()).unwrap().is_feasible());
        // Pairs (0,1) and (0,2) randomize one party only; cell 3 flips both outcomes under setting 0.
        let sc = Scenario::bipartite();
        assert_eq!(ex.rho.weights().iter().filter(|w| !w.is_zero()).count(), 2);
        assert_eq!(*ex.rho.weight(&sc.grid_index(0)).unwrap(), ratio(1, 2));
        assert_eq!(*ex.rho.weight(&sc.grid_index(3)).unwrap(), ratio(1, 2));
    }

    #[test]
    fn determinism() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let ms = sample_rational_dist(Scenario::new(3, 2).unwrap(), &mut rng, 5).marginalize_all();
        assert_eq!(membership(&ms, &r0()).unwrap(), membership(&ms, &r0()).unwrap());
        let f = ms.to_float();
        assert_eq!(membership(&f, &FLOAT_FEASIBILITY_TOL).unwrap(), membership(&f, &FLOAT_FEASIBILITY_TOL).unwrap());
    }

    #[test]
    fn scale() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for (sc, limit) in [((2, 2), 1.0), ((3, 2), 1.0), ((2, 3), 1.0), ((4, 2), 10.0)] {
            let sc = Scenario::new(sc.0, sc.1).unwrap();
            let ms = sample_rational_dist(sc, &mut rng, 9).marginalize_all().to_float();
            let start = Instant::now();
            let res = membership(&ms, &FLOAT_FEASIBILITY_TOL).unwrap();
            let secs = start.elapsed().as_secs_f64();
            assert!(res.is_feasible() && res.residual < 1e-8, "{sc}: {}", res.residual);
            assert!(secs < limit, "{sc}: {secs}s");
        }
    }

    #[test]
    fn three_party_nonlocal_hint() {
        let ms = born_marginals(&PureState::ghz(3), &crate::quantum::ghz_axes()).unwrap();
        let res = membership(&ms, &FLOAT_FEASIBILITY_TOL).unwrap();
        let Membership::Infeasible { hint: Some(hint), .. } = res.verdict else { panic!() };
        assert_eq!(hint.form, zukowski_form());
    }
}
