//! Linear forms over marginal probabilities and their cell-cover certificates.
//!
//! Every marginal `P_s(o)` is a partial sum of the underlying weights over
//! its support, and a constant `c` is `c·Σ_λ ρ(λ)`. A linear form therefore
//! expands to one rational coefficient per cell. If every coefficient is
//! nonnegative the form is nonnegative on every local model, which is the
//! whole proof; a negative coefficient names a deterministic counterexample.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num::traits::Signed;
use num::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::{int, Rational, Scalar};
use crate::scenario::{Event, GridIndex, Outcomes, Scenario, SettingVector};
use crate::underlying::{MarginalSet, MarginalTable, UnderlyingDist};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MarginalTerm {
    pub event: Event,
    pub coef: Rational,
}

/// `constant + Σ coef·P_s(o)`, read as the claim `form ≥ 0`.
///
/// Terms are kept merged, free of zero coefficients and sorted by event, so
/// structural equality is equality of forms.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LinearForm {
    scenario: Scenario,
    constant: Rational,
    terms: Vec<MarginalTerm>,
}

impl MarginalTerm {
    pub fn new(event: Event, coef: Rational) -> Self {
        MarginalTerm { event, coef }
    }
}

impl LinearForm {
    pub fn new(scenario: Scenario, constant: Rational, terms: impl IntoIterator<Item = MarginalTerm>) -> Result<Self> {
        let mut merged: BTreeMap<Event, Rational> = BTreeMap::new();
        for t in terms {
            scenario.validate_event(&t.event)?;
            *merged.entry(t.event).or_insert_with(Rational::zero) += t.coef;
        }
        Ok(Self::from_merged(scenario, constant, merged))
    }

    fn from_merged(scenario: Scenario, constant: Rational, merged: BTreeMap<Event, Rational>) -> Self {
        let terms = merged
            .into_iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|(event, coef)| MarginalTerm { event, coef })
            .collect();
        LinearForm { scenario, constant, terms }
    }

    pub fn zero(scenario: Scenario) -> Self {
        LinearForm { scenario, constant: Rational::zero(), terms: Vec::new() }
    }

    pub fn constant_form(scenario: Scenario, constant: Rational) -> Self {
        LinearForm { scenario, constant, terms: Vec::new() }
    }

    /// The single marginal `P_s(o)` with coefficient one.
    pub fn event(scenario: Scenario, event: Event) -> Result<Self> {
        Self::new(scenario, Rational::zero(), [MarginalTerm::new(event, Rational::one())])
    }

    /// Signed sum of unit terms; `plus` get `+1`, `minus` get `−1`.
    pub fn unit(scenario: Scenario, plus: &[Event], minus: &[Event]) -> Result<Self> {
        let terms = plus
            .iter()
            .map(|e| MarginalTerm::new(e.clone(), Rational::one()))
            .chain(minus.iter().map(|e| MarginalTerm::new(e.clone(), -Rational::one())));
        Self::new(scenario, Rational::zero(), terms)
    }

    /// Correlation `C_s = Σ_o (−1)^{parity(o)} P_s(o)` as a form.
    pub fn correlation(scenario: Scenario, s: &SettingVector) -> Result<Self> {
        scenario.validate_settings(s)?;
        let terms = scenario.outcomes().into_iter().map(|o| {
            let sign = if o.parity() == 0 { Rational::one() } else { -Rational::one() };
            MarginalTerm::new(Event { settings: s.clone(), outcomes: o }, sign)
        });
        Self::new(scenario, Rational::zero(), terms)
    }

    pub fn scenario(&self) -> Scenario {
        self.scenario
    }

    pub fn constant(&self) -> &Rational {
        &self.constant
    }

    pub fn terms(&self) -> &[MarginalTerm] {
        &self.terms
    }

    pub fn scale(&self, factor: &Rational) -> Self {
        if factor.is_zero() {
            return Self::zero(self.scenario);
        }
        LinearForm {
            scenario: self.scenario,
            constant: &self.constant * factor,
            terms: self.terms.iter().map(|t| MarginalTerm::new(t.event.clone(), &t.coef * factor)).collect(),
        }
    }

    /// Applies an event relabeling (a symmetry of the scenario) term by term.
    pub fn map_events(&self, f: impl Fn(&Event) -> Event) -> Result<Self> {
        Self::new(
            self.scenario,
            self.constant.clone(),
            self.terms.iter().map(|t| MarginalTerm::new(f(&t.event), t.coef.clone())),
        )
    }

    /// Coefficient of every cell: the constant plus the coefficients of all terms whose support contains it.
    pub fn expand(&self) -> CellCoefficients {
        let sc = self.scenario;
        let mut coefs = vec![self.constant.clone(); sc.cell_count()];
        for t in &self.terms {
            for c in sc.support_cells(&t.event) {
                coefs[c] += &t.coef;
            }
        }
        CellCoefficients { scenario: sc, coefs }
    }

    pub fn certify(&self) -> Certificate {
        certify_given_zeros(self, &[]).expect("form events are valid")
    }

    /// Substitutes observed marginals; exact when `T` is rational.
    pub fn evaluate<T: Scalar>(&self, ms: &MarginalSet<T>) -> Result<T> {
        if ms.scenario() != self.scenario {
            return Err(Error::IncompleteMarginals(format!(
                "form is over {} but marginals are over {}",
                self.scenario,
                ms.scenario()
            )));
        }
        let mut total = T::from_rational(&self.constant);
        for t in &self.terms {
            total = total + T::from_rational(&t.coef) * ms.prob(&t.event)?.clone();
        }
        Ok(total)
    }

    /// Sum of the negative coefficients plus the constant: no assignment of
    /// probabilities in `[0, 1]` can take the form lower.
    pub fn algebraic_minimum(&self) -> Rational {
        self.terms.iter().filter(|t| t.coef.is_negative()).fold(self.constant.clone(), |acc, t| acc + &t.coef)
    }

    /// Positive-coefficient events and negative-coefficient events.
    pub fn split_by_sign(&self) -> (Vec<&MarginalTerm>, Vec<&MarginalTerm>) {
        self.terms.iter().partition(|t| t.coef.is_positive())
    }
}

impl Add for LinearForm {
    type Output = LinearForm;

    /// Panics if the scenarios differ.
    fn add(self, rhs: LinearForm) -> LinearForm {
        assert_eq!(self.scenario, rhs.scenario, "adding forms over different scenarios");
        let mut merged: BTreeMap<Event, Rational> = BTreeMap::new();
        for t in self.terms.into_iter().chain(rhs.terms) {
            *merged.entry(t.event).or_insert_with(Rational::zero) += t.coef;
        }
        LinearForm::from_merged(self.scenario, self.constant + rhs.constant, merged)
    }
}

impl Neg for LinearForm {
    type Output = LinearForm;

    fn neg(self) -> LinearForm {
        self.scale(&-Rational::one())
    }
}

impl Sub for LinearForm {
    type Output = LinearForm;

    fn sub(self, rhs: LinearForm) -> LinearForm {
        self + (-rhs)
    }
}

impl Mul<&Rational> for LinearForm {
    type Output = LinearForm;

    fn mul(self, rhs: &Rational) -> LinearForm {
        self.scale(rhs)
    }
}

fn fmt_coef(c: &Rational) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

impl fmt::Display for LinearForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        let mut piece = |f: &mut fmt::Formatter<'_>, coef: &Rational, body: Option<&Event>| -> fmt::Result {
            let neg = coef.is_negative();
            let mag = coef.abs();
            match (first, neg) {
                (true, true) => f.write_str("-")?,
                (true, false) => {}
                (false, true) => f.write_str(" - ")?,
                (false, false) => f.write_str(" + ")?,
            }
            first = false;
            match body {
                Some(e) if mag.is_one() => write!(f, "{e}"),
                Some(e) => write!(f, "{} {e}", fmt_coef(&mag)),
                None => f.write_str(&fmt_coef(&mag)),
            }
        };
        let (pos, neg) = self.split_by_sign();
        for t in pos.into_iter().chain(neg) {
            piece(f, &t.coef, Some(&t.event))?;
        }
        if !self.constant.is_zero() || self.terms.is_empty() {
            piece(f, &self.constant, None)?;
        }
        f.write_str(" >= 0")
    }
}

/// Expansion of a form onto cells, indexed by flat cell.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CellCoefficients {
    scenario: Scenario,
    coefs: Vec<Rational>,
}

impl CellCoefficients {
    pub fn scenario(&self) -> Scenario {
        self.scenario
    }

    pub fn coefs(&self) -> &[Rational] {
        &self.coefs
    }

    pub fn get(&self, cell: &GridIndex) -> Result<&Rational> {
        Ok(&self.coefs[self.scenario.flat_index(cell)?])
    }

    pub fn is_nonnegative(&self) -> bool {
        self.coefs.iter().all(|c| !c.is_negative())
    }

    /// Cells with a positive coefficient.
    pub fn positive_support(&self) -> BTreeSet<usize> {
        (0..self.coefs.len()).filter(|&c| self.coefs[c].is_positive()).collect()
    }
}

impl Add for CellCoefficients {
    type Output = CellCoefficients;

    fn add(self, rhs: CellCoefficients) -> CellCoefficients {
        assert_eq!(self.scenario, rhs.scenario, "adding expansions over different scenarios");
        CellCoefficients { scenario: self.scenario, coefs: self.coefs.into_iter().zip(rhs.coefs).map(|(a, b)| a + b).collect() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Verdict {
    Proven,
    /// `witness` has the most negative coefficient (lowest flat index on ties); the point mass there violates the form.
    Refuted { witness: GridIndex, counterexample: UnderlyingDist<Rational> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Certificate {
    pub form: LinearForm,
    pub cells: CellCoefficients,
    /// Events assumed to vanish; their supports are excluded from the check.
    pub assumed_zero: Vec<Event>,
    pub verdict: Verdict,
}

impl Certificate {
    pub fn is_proven(&self) -> bool {
        matches!(self.verdict, Verdict::Proven)
    }
}

/// Certifies `form ≥ 0` on every local model in which all `zeros` vanish.
///
/// Such models put no weight on the supports of the zero events, so only the
/// remaining cells need nonnegative coefficients.
pub fn certify_given_zeros(form: &LinearForm, zeros: &[Event]) -> Result<Certificate> {
    let sc = form.scenario;
    let mut excluded = vec![false; sc.cell_count()];
    for z in zeros {
        sc.validate_event(z)?;
        for c in sc.support_cells(z) {
            excluded[c] = true;
        }
    }
    let cells = form.expand();
    let mut worst: Option<usize> = None;
    for (c, coef) in cells.coefs.iter().enumerate() {
        if excluded[c] || !coef.is_negative() {
            continue;
        }
        if worst.is_none_or(|w| coef < &cells.coefs[w]) {
            worst = Some(c);
        }
    }
    let verdict = match worst {
        None => Verdict::Proven,
        Some(c) => Verdict::Refuted { witness: sc.grid_index(c), counterexample: UnderlyingDist::point_mass_flat(sc, c) },
    };
    Ok(Certificate { form: form.clone(), cells, assumed_zero: zeros.to_vec(), verdict })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Deduction {
    Deducible,
    /// A cell in the target's support outside every zero support; its point mass keeps the zeros and makes the target one.
    NotDeducible { witness: GridIndex },
}

impl Deduction {
    pub fn is_deducible(&self) -> bool {
        matches!(self, Deduction::Deducible)
    }
}

/// Do the vanishing `zeros` force `target` to vanish in every local model?
///
/// True exactly when the target's support lies inside the union of the zero supports.
pub fn hardy_deduce(scenario: Scenario, zeros: &[Event], target: &Event) -> Result<Deduction> {
    scenario.validate_event(target)?;
    for z in zeros {
        scenario.validate_event(z)?;
    }
    let uncovered = scenario.support_cells(target).into_iter().find(|&c| !zeros.iter().any(|z| scenario.contains(z, c)));
    Ok(match uncovered {
        None => Deduction::Deducible,
        Some(c) => Deduction::NotDeducible { witness: scenario.grid_index(c) },
    })
}

/// `C = Σ_o (−1)^{parity(o)} P(o)`.
pub fn correlation<T: Scalar>(table: &MarginalTable<T>) -> T {
    let n = table.scenario().parties();
    table.probs().iter().enumerate().fold(T::zero(), |acc, (i, p)| {
        if Outcomes::from_index(n, i).parity() == 0 {
            acc + p.clone()
        } else {
            acc - p.clone()
        }
    })
}

/// The Hardy-type form with negative term on setting vector `leg`.
///
/// Built from `P_10(0,0) + P_01(0,0) + P_11(1,1) − P_00(0,0)` by relabeling
/// each party's settings so that `00` lands on `leg`, then flipping the
/// outcome of party `p` under setting `k` when `flips[2p + k]` is set
/// (order `A_0, A_1, B_0, B_1`, in relabeled settings).
pub fn hardy_form(leg: &SettingVector, flips: [bool; 4]) -> Result<LinearForm> {
    let sc = Scenario::bipartite();
    sc.validate_settings(leg)?;
    let (a, b) = (leg.0[0], leg.0[1]);
    let ev = |sa: usize, sb: usize, oa: u8, ob: u8| {
        let (sa, sb) = (sa ^ a, sb ^ b);
        let oa = oa ^ flips[sa] as u8;
        let ob = ob ^ flips[2 + sb] as u8;
        Event::new([sa, sb], [oa, ob])
    };
    LinearForm::unit(sc, &[ev(1, 0, 0, 0), ev(0, 1, 0, 0), ev(1, 1, 1, 1)], &[ev(0, 0, 0, 0)])
}

/// The base form `P_10(0,0) + P_01(0,0) + P_11(1,1) − P_00(0,0)`.
pub fn hardy_base() -> LinearForm {
    hardy_form(&SettingVector::new([0, 0]), [false; 4]).expect("valid leg")
}

fn swap_parties(e: &Event) -> Event {
    Event::new([e.settings.0[1], e.settings.0[0]], [e.outcomes.0[1], e.outcomes.0[0]])
}

/// Orbit of the base Hardy form under per-party setting relabeling, per-(party, setting)
/// outcome flips and the Alice↔Bob exchange, deduplicated. Ordered by leg, then flip pattern.
pub fn catalog_hardy() -> Vec<LinearForm> {
    let sc = Scenario::bipartite();
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for leg in sc.setting_vectors() {
        for pattern in 0..16u8 {
            let flips = [pattern & 1 != 0, pattern & 2 != 0, pattern & 4 != 0, pattern & 8 != 0];
            let form = hardy_form(&leg, flips).expect("valid leg");
            let swapped = form.map_events(swap_parties).expect("swap preserves validity");
            for f in [form, swapped] {
                if seen.insert(f.clone()) {
                    out.push(f);
                }
            }
        }
    }
    out
}

/// Leg of a Hardy-type form: the setting vector of its negative term.
pub fn leg_of(form: &LinearForm) -> Option<SettingVector> {
    let (_, neg) = form.split_by_sign();
    match neg.as_slice() {
        [t] => Some(t.event.settings.clone()),
        _ => None,
    }
}

/// `Σ_{s≠leg} C_s − C_leg`.
pub fn chsh_expression(leg: &SettingVector) -> Result<LinearForm> {
    let sc = Scenario::bipartite();
    sc.validate_settings(leg)?;
    let mut total = LinearForm::zero(sc);
    for s in sc.setting_vectors() {
        let c = LinearForm::correlation(sc, &s)?;
        total = if &s == leg { total - c } else { total + c };
    }
    Ok(total)
}

/// The two branches `2 − X ≥ 0` (upper) and `2 + X ≥ 0` (lower) of `|X| ≤ 2`,
/// with `X = Σ_{s≠leg} C_s − C_leg`.
pub fn chsh_form(leg: &SettingVector) -> Result<(LinearForm, LinearForm)> {
    let x = chsh_expression(leg)?;
    let two = LinearForm::constant_form(Scenario::bipartite(), int(2));
    Ok((two.clone() - x.clone(), two + x))
}

/// All eight CHSH branches, upper then lower per leg.
pub fn chsh_catalog() -> Vec<LinearForm> {
    Scenario::bipartite()
        .setting_vectors()
        .iter()
        .flat_map(|leg| {
            let (u, l) = chsh_form(leg).expect("valid leg");
            [u, l]
        })
        .collect()
}

/// The four same-leg Hardy forms behind one CHSH inequality, grouped by branch.
///
/// `lower` holds the identity and all-outcomes-flipped forms, `upper` the forms
/// with one party's outcomes flipped on both settings. On cells each branch
/// equals twice the sum of its pair; all four together sum to the constant 2.
#[derive(Debug, Clone, PartialEq)]
pub struct ChshDecomposition {
    pub upper: [LinearForm; 2],
    pub lower: [LinearForm; 2],
}

impl ChshDecomposition {
    /// Branch expansion rebuilt from four Hardy-form expansions (each pair member twice).
    pub fn expand_branch(pair: &[LinearForm; 2]) -> CellCoefficients {
        let (a, b) = (pair[0].expand(), pair[1].expand());
        a.clone() + b.clone() + a + b
    }
}

pub fn chsh_decomposition(leg: &SettingVector) -> Result<ChshDecomposition> {
    let f = |flips| hardy_form(leg, flips);
    Ok(ChshDecomposition {
        upper: [f([true, true, false, false])?, f([false, false, true, true])?],
        lower: [f([false; 4])?, f([true; 4])?],
    })
}

/// `Σ_p P_{e_p}(0,…,0) + P_{1…1}(1,…,1) − P_{0…0}(0,…,0)` over `n` parties with two settings.
pub fn n_party_hardy(n: usize) -> Result<LinearForm> {
    if n < 2 {
        return Err(Error::UnsupportedScenario(format!("n-party Hardy form needs n ≥ 2, got {n}")));
    }
    let sc = Scenario::new(n, 2)?;
    let mut plus: Vec<Event> = (0..n)
        .map(|p| Event::new((0..n).map(|q| usize::from(q == p)).collect::<Vec<_>>(), vec![0u8; n]))
        .collect();
    plus.push(Event::new(vec![1; n], vec![1u8; n]));
    LinearForm::unit(sc, &plus, &[Event::new(vec![0; n], vec![0u8; n])])
}

/// `C_111 − C_001 − C_010 − C_100 + 2 ≥ 0` lowered to marginals.
pub fn zukowski_form() -> LinearForm {
    let sc = Scenario::new(3, 2).expect("valid scenario");
    let c = |s: [usize; 3]| LinearForm::correlation(sc, &SettingVector::new(s)).expect("valid settings");
    LinearForm::constant_form(sc, int(2)) + c([1, 1, 1]) - c([0, 0, 1]) - c([0, 1, 0]) - c([1, 0, 0])
}

/// Result of the correlation-level corollary: `C_001 = C_010 = C_100 = 1` forces `C_111 = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct GhzCorollary {
    /// Odd-parity events of the three single-flip settings, which `C = 1` forces to vanish.
    pub zeros: Vec<Event>,
    /// One deduction per odd-parity outcome of `P_111`.
    pub deductions: Vec<(Event, Deduction)>,
}

impl GhzCorollary {
    pub fn holds(&self) -> bool {
        self.deductions.iter().all(|(_, d)| d.is_deducible())
    }
}

/// `C_s = 1` exactly when every odd-parity `P_s(o)` vanishes, so the corollary
/// reduces to support covers.
pub fn ghz_corollary() -> GhzCorollary {
    let sc = Scenario::new(3, 2).expect("valid scenario");
    let odd = |s: [usize; 3]| -> Vec<Event> {
        sc.outcomes().into_iter().filter(|o| o.parity() == 1).map(|o| Event { settings: SettingVector::new(s), outcomes: o }).collect()
    };
    let zeros: Vec<Event> = [[0, 0, 1], [0, 1, 0], [1, 0, 0]].into_iter().flat_map(odd).collect();
    let deductions = odd([1, 1, 1])
        .into_iter()
        .map(|t| {
            let d = hardy_deduce(sc, &zeros, &t).expect("valid events");
            (t, d)
        })
        .collect();
    GhzCorollary { zeros, deductions }
}

/// `P_00(1,1) + P_10(0,0) + P_02(0,0) − P_12(0,0)` on two parties with three settings.
pub fn three_axes_form() -> LinearForm {
    let sc = Scenario::new(2, 3).expect("valid scenario");
    let e = |t: &str| -> Event { t.parse().expect("valid event") };
    LinearForm::unit(sc, &[e("P_00(1,1)"), e("P_10(0,0)"), e("P_02(0,0)")], &[e("P_12(0,0)")]).expect("valid events")
}

/// The event assumed to vanish in the conditional three-axes inequality.
pub fn three_axes_condition() -> Event {
    "P_00(1,1)".parse().expect("valid event")
}

/// `P_10(0,0) + P_02(0,0) − P_12(0,0)`, valid whenever `P_00(1,1) = 0`.
pub fn original_bell_form() -> LinearForm {
    let sc = Scenario::new(2, 3).expect("valid scenario");
    let e = |t: &str| -> Event { t.parse().expect("valid event") };
    LinearForm::unit(sc, &[e("P_10(0,0)"), e("P_02(0,0)")], &[e("P_12(0,0)")]).expect("valid events")
}

/// Certificate of the conditional inequality: the reduced form on cells outside `P_00(1,1)`.
pub fn original_bell_certificate() -> Certificate {
    certify_given_zeros(&original_bell_form(), &[three_axes_condition()]).expect("valid events")
}

/// Evaluates the conditional inequality if the condition holds within `tol`.
pub fn original_bell_value<T: Scalar>(ms: &MarginalSet<T>, tol: f64) -> Result<Option<T>> {
    let cond = ms.prob(&three_axes_condition())?.to_f64();
    if cond.abs() > tol {
        return Ok(None);
    }
    original_bell_form().evaluate(ms).map(Some)
}

/// Named inequality families.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Hardy64,
    Chsh,
    NHardy(usize),
    Zukowski,
    ThreeAxes,
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hardy64" => Ok(Family::Hardy64),
            "chsh" => Ok(Family::Chsh),
            "zukowski" => Ok(Family::Zukowski),
            "threeaxes" => Ok(Family::ThreeAxes),
            _ => match s.strip_prefix("nhardy:").map(str::parse::<usize>) {
                Some(Ok(n)) => Ok(Family::NHardy(n)),
                _ => Err(Error::Parse(format!(
                    "unknown family {s:?} (expected hardy64, chsh, nhardy:N, zukowski or threeaxes)"
                ))),
            },
        }
    }
}

pub fn catalog(family: Family) -> Result<Vec<LinearForm>> {
    Ok(match family {
        Family::Hardy64 => catalog_hardy(),
        Family::Chsh => chsh_catalog(),
        Family::NHardy(n) => vec![n_party_hardy(n)?],
        Family::Zukowski => vec![zukowski_form()],
        Family::ThreeAxes => vec![three_axes_form()],
    })
}

/// Known proven forms for a scenario, used as violation hints.
pub fn standard_forms(scenario: Scenario) -> Vec<LinearForm> {
    match (scenario.parties(), scenario.settings()) {
        (2, 2) => chsh_catalog().into_iter().chain(catalog_hardy()).collect(),
        (3, 2) => vec![zukowski_form(), n_party_hardy(3).expect("n=3")],
        (2, 3) => vec![three_axes_form()],
        (n, 2) if n >= 2 => vec![n_party_hardy(n).expect("n ≥ 2")],
        _ => Vec::new(),
    }
}

/// Output of [`search_covers`].
#[derive(Debug, Clone, PartialEq)]
pub struct CoverSearch {
    pub forms: Vec<LinearForm>,
    /// Candidates examined.
    pub examined: usize,
    /// Set when `limit` stopped the enumeration early.
    pub truncated: bool,
}

/// Enumerates forms `P_{e_1} + … + P_{e_k} − P_target` with distinct unit terms
/// (lexicographic in canonical event order) and keeps the proven ones.
pub fn search_covers(scenario: Scenario, k: usize, target: &Event, limit: usize) -> Result<CoverSearch> {
    scenario.validate_event(target)?;
    let pool: Vec<Event> = scenario.events().into_iter().filter(|e| e != target).collect();
    let words = scenario.cell_count().div_ceil(64);
    let bits = |e: &Event| -> Vec<u64> {
        let mut b = vec![0u64; words];
        for c in scenario.support_cells(e) {
            b[c / 64] |= 1 << (c % 64);
        }
        b
    };
    let target_bits = bits(target);
    let pool_bits: Vec<Vec<u64>> = pool.iter().map(bits).collect();

    let mut forms = Vec::new();
    let mut examined = 0;
    let mut truncated = false;
    if k == 0 || k > pool.len() {
        return Ok(CoverSearch { forms, examined, truncated });
    }
    let mut idx: Vec<usize> = (0..k).collect();
    let mut union = vec![0u64; words];
    loop {
        if examined == limit {
            truncated = true;
            break;
        }
        examined += 1;
        union.iter_mut().for_each(|w| *w = 0);
        for &i in &idx {
            for (u, b) in union.iter_mut().zip(&pool_bits[i]) {
                *u |= b;
            }
        }
        if target_bits.iter().zip(&union).all(|(t, u)| t & !u == 0) {
            let plus: Vec<Event> = idx.iter().map(|&i| pool[i].clone()).collect();
            let form = LinearForm::unit(scenario, &plus, std::slice::from_ref(target))?;
            debug_assert!(form.certify().is_proven());
            forms.push(form);
        }
        // next combination
        let mut pos = k;
        while pos > 0 && idx[pos - 1] == pool.len() - k + pos - 1 {
            pos -= 1;
        }
        if pos == 0 {
            break;
        }
        idx[pos - 1] += 1;
        for j in pos..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
    Ok(CoverSearch { forms, examined, truncated })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ratio;
    use proptest::prelude::*;

    fn ev(t: &str) -> Event {
        t.parse().unwrap()
    }

    fn s22() -> Scenario {
        Scenario::bipartite()
    }

    #[test]
    fn expansion_of_hardy_lhs() {
        let sc = s22();
        let lhs = LinearForm::unit(sc, &[ev("P_10(0,0)"), ev("P_01(0,0)"), ev("P_11(1,1)")], &[]).unwrap();
        let cells = lhs.expand();
        let ones = [[0, 1], [0, 2], [0, 3], [1, 0], [1, 2], [1, 3], [2, 0], [2, 1], [2, 3], [3, 3]];
        for i in 0..4 {
            for j in 0..4 {
                let expected = if (i, j) == (0, 0) {
                    2
                } else if ones.contains(&[i, j]) {
                    1
                } else {
                    0
                };
                assert_eq!(*cells.get(&GridIndex::new([i, j])).unwrap(), int(expected), "cell ({i},{j})");
            }
        }
    }

    #[test]
    fn constant_and_cancellation() {
        let sc = s22();
        assert!(LinearForm::constant_form(sc, int(1)).expand().coefs().iter().all(|c| c.is_one()));
        let f = LinearForm::event(sc, ev("P_00(0,0)")).unwrap() - LinearForm::event(sc, ev("P_00(0,0)")).unwrap();
        assert!(f.terms().is_empty());
        assert!(f.expand().coefs().iter().all(|c| c.is_zero()));
    }

    #[test]
    fn certify_examples() {
        let sc = s22();
        assert!(hardy_base().certify().is_proven());
        assert!(LinearForm::zero(sc).certify().is_proven());
        let bad = LinearForm::unit(sc, &[ev("P_00(0,0)")], &[ev("P_11(0,0)")]).unwrap();
        match bad.certify().verdict {
            Verdict::Refuted { witness, counterexample } => {
                assert_eq!(witness, GridIndex::new([1, 0]));
                assert!(bad.evaluate(&counterexample.marginalize_all()).unwrap().is_negative());
            }
            Verdict::Proven => panic!("should be refuted"),
        }
    }

    #[test]
    fn evaluate_examples() {
        let uniform = MarginalSet::<Rational>::uniform(s22());
        assert_eq!(hardy_base().evaluate(&uniform).unwrap(), ratio(1, 2));
        let (upper, lower) = chsh_form(&SettingVector::new([0, 0])).unwrap();
        assert_eq!(upper.evaluate(&uniform).unwrap(), int(2));
        assert_eq!(lower.evaluate(&uniform).unwrap(), int(2));
        let wrong = MarginalSet::<Rational>::uniform(Scenario::new(3, 2).unwrap());
        assert!(hardy_base().evaluate(&wrong).is_err());
    }

    #[test]
    fn deduction_examples() {
        let sc = s22();
        let zeros = [ev("P_10(0,0)"), ev("P_01(0,0)"), ev("P_11(1,1)")];
        assert!(hardy_deduce(sc, &zeros, &ev("P_00(0,0)")).unwrap().is_deducible());
        match hardy_deduce(sc, &[ev("P_10(0,0)")], &ev("P_00(0,0)")).unwrap() {
            Deduction::NotDeducible { witness } => {
                let rho = UnderlyingDist::<Rational>::point_mass(sc, &witness).unwrap().marginalize_all();
                assert!(rho.prob(&ev("P_10(0,0)")).unwrap().is_zero());
                assert!(rho.prob(&ev("P_00(0,0)")).unwrap().is_one());
            }
            Deduction::Deducible => panic!("one ribbon cannot cover a row"),
        }
        let sc3 = Scenario::new(3, 2).unwrap();
        let zeros3 = [ev("P_100(0,0,0)"), ev("P_010(0,0,0)"), ev("P_001(0,0,0)"), ev("P_111(1,1,1)")];
        assert!(hardy_deduce(sc3, &zeros3, &ev("P_000(0,0,0)")).unwrap().is_deducible());
    }

    #[test]
    fn correlation_examples() {
        let sc = s22();
        let s = SettingVector::new([0, 0]);
        let t = |p: [f64; 4]| MarginalTable::new(sc, s.clone(), p.to_vec()).unwrap();
        assert_eq!(correlation(&t([0.25; 4])), 0.0);
        assert_eq!(correlation(&t([1.0, 0.0, 0.0, 0.0])), 1.0);
        // Outcomes (0,1) and (1,0) sit at indices 2 and 1.
        assert_eq!(correlation(&t([0.0, 0.5, 0.5, 0.0])), -1.0);
    }

    #[test]
    fn hardy_catalog_contents() {
        let cat = catalog_hardy();
        assert_eq!(cat.len(), 64);
        assert!(cat.iter().all(|f| f.certify().is_proven()));
        let sc = s22();
        let expect = |plus: [&str; 3], minus: &str| LinearForm::unit(sc, &plus.map(ev), &[ev(minus)]).unwrap();
        for f in [
            expect(["P_10(0,0)", "P_01(0,0)", "P_11(1,1)"], "P_00(0,0)"),
            expect(["P_10(1,1)", "P_01(1,1)", "P_11(0,0)"], "P_00(1,1)"),
            expect(["P_10(1,0)", "P_01(1,0)", "P_11(0,1)"], "P_00(1,0)"),
            expect(["P_10(0,1)", "P_01(0,1)", "P_11(1,0)"], "P_00(0,1)"),
        ] {
            assert!(cat.contains(&f), "missing {f}");
        }
        for f in &cat {
            assert!(cat.contains(&f.map_events(swap_parties).unwrap()));
        }
        for leg in sc.setting_vectors() {
            assert_eq!(cat.iter().filter(|f| leg_of(f).as_ref() == Some(&leg)).count(), 16);
        }
    }

    #[test]
    fn chsh_branches_decompose() {
        for leg in s22().setting_vectors() {
            let (upper, lower) = chsh_form(&leg).unwrap();
            assert!(upper.certify().is_proven() && lower.certify().is_proven());
            let d = chsh_decomposition(&leg).unwrap();
            assert_eq!(upper.expand(), ChshDecomposition::expand_branch(&d.upper));
            assert_eq!(lower.expand(), ChshDecomposition::expand_branch(&d.lower));
            let quartet = d.upper[0].expand() + d.upper[1].expand() + d.lower[0].expand() + d.lower[1].expand();
            assert_eq!(quartet, LinearForm::constant_form(s22(), int(2)).expand());
            let cat = catalog_hardy();
            for f in d.upper.iter().chain(&d.lower) {
                assert!(cat.contains(f));
                assert_eq!(leg_of(f).as_ref(), Some(&leg));
            }
        }
    }

    #[test]
    fn n_party_family() {
        assert_eq!(n_party_hardy(2).unwrap(), hardy_base());
        let three = n_party_hardy(3).unwrap();
        let sc3 = Scenario::new(3, 2).unwrap();
        let expected = LinearForm::unit(
            sc3,
            &[ev("P_100(0,0,0)"), ev("P_010(0,0,0)"), ev("P_001(0,0,0)"), ev("P_111(1,1,1)")],
            &[ev("P_000(0,0,0)")],
        )
        .unwrap();
        assert_eq!(three, expected);
        for n in 2..=4 {
            assert!(n_party_hardy(n).unwrap().certify().is_proven());
        }
        assert!(n_party_hardy(1).is_err());
    }

    #[test]
    fn zukowski_and_corollary() {
        let z = zukowski_form();
        assert!(z.certify().is_proven());
        assert_eq!(z.evaluate(&MarginalSet::<Rational>::uniform(z.scenario())).unwrap(), int(2));
        // Expansion is 0 or 4 on every deterministic cell.
        assert!(z.expand().coefs().iter().all(|c| c.is_zero() || *c == int(4)));
        let cor = ghz_corollary();
        assert_eq!(cor.zeros.len(), 12);
        assert!(cor.holds());
    }

    #[test]
    fn three_axes() {
        let f = three_axes_form();
        assert!(f.certify().is_proven());
        assert_eq!(f.expand().coefs().len(), 64);
        assert_eq!(f.evaluate(&MarginalSet::<Rational>::uniform(f.scenario())).unwrap(), ratio(1, 2));
        assert!(original_bell_certificate().is_proven());
        // Without the condition the reduced form is not a valid inequality.
        assert!(!original_bell_form().certify().is_proven());
    }

    #[test]
    fn search_examples() {
        let sc = s22();
        let target = ev("P_00(0,0)");
        let res = search_covers(sc, 3, &target, usize::MAX).unwrap();
        assert!(!res.truncated);
        assert_eq!(res.examined, 455);
        assert!(res.forms.contains(&hardy_base()));
        assert!(res.forms.iter().all(|f| f.certify().is_proven()));
        assert!(search_covers(sc, 1, &target, usize::MAX).unwrap().forms.is_empty());
        let partial = search_covers(sc, 3, &target, 10).unwrap();
        assert!(partial.truncated);
        assert_eq!(partial.examined, 10);
    }

    #[test]
    fn search_three_parties_finds_extended_hardy() {
        let sc3 = Scenario::new(3, 2).unwrap();
        let res = search_covers(sc3, 4, &ev("P_000(0,0,0)"), usize::MAX).unwrap();
        assert!(res.forms.contains(&n_party_hardy(3).unwrap()));
    }

    #[test]
    fn search_matches_certify_exhaustively() {
        let sc = s22();
        let target = ev("P_11(0,1)");
        let found: BTreeSet<LinearForm> = search_covers(sc, 2, &target, usize::MAX).unwrap().forms.into_iter().collect();
        let pool: Vec<Event> = sc.events().into_iter().filter(|e| *e != target).collect();
        for i in 0..pool.len() {
            for j in i + 1..pool.len() {
                let f = LinearForm::unit(sc, &[pool[i].clone(), pool[j].clone()], std::slice::from_ref(&target)).unwrap();
                assert_eq!(found.contains(&f), f.certify().is_proven());
            }
        }
    }

    #[test]
    fn family_names() {
        assert_eq!("nhardy:4".parse::<Family>().unwrap(), Family::NHardy(4));
        assert!("nhardy:x".parse::<Family>().is_err());
        assert!("bogus".parse::<Family>().is_err());
        assert_eq!(catalog(Family::Chsh).unwrap().len(), 8);
    }

    #[test]
    fn display() {
        assert_eq!(hardy_base().to_string(), "P_01(0,0) + P_10(0,0) + P_11(1,1) - P_00(0,0) >= 0");
        let sc = s22();
        assert_eq!(LinearForm::zero(sc).to_string(), "0 >= 0");
        let f = LinearForm::new(sc, ratio(-3, 2), [MarginalTerm::new(ev("P_00(0,0)"), int(2))]).unwrap();
        assert_eq!(f.to_string(), "2 P_00(0,0) - 3/2 >= 0");
    }

    fn arb_form() -> impl Strategy<Value = LinearForm> {
        (-3i64..=3, prop::collection::vec((0usize..16, -4i64..=4, 1i64..=3), 0..6)).prop_map(|(c, terms)| {
            let sc = s22();
            let events = sc.events();
            LinearForm::new(sc, int(c), terms.into_iter().map(|(e, n, d)| MarginalTerm::new(events[e].clone(), ratio(n, d))))
                .unwrap()
        })
    }

    proptest! {
        #[test]
        fn expand_is_linear(f in arb_form(), g in arb_form(), a in -3i64..=3, b in -3i64..=3) {
            let (a, b) = (int(a), int(b));
            let lhs = (f.scale(&a) + g.scale(&b)).expand();
            let fe = f.expand();
            let ge = g.expand();
            let rhs: Vec<Rational> = fe.coefs().iter().zip(ge.coefs()).map(|(x, y)| &a * x + &b * y).collect();
            prop_assert_eq!(lhs.coefs(), rhs.as_slice());
        }

        #[test]
        fn refutation_witness_violates(f in arb_form()) {
            if let Verdict::Refuted { counterexample, .. } = f.certify().verdict {
                prop_assert!(f.evaluate(&counterexample.marginalize_all()).unwrap().is_negative());
            }
        }

        #[test]
        fn proven_forms_are_sound(raw in prop::collection::vec(0i64..20, 16), which in 0usize..72) {
            let sc = s22();
            let mut raw = raw;
            raw[0] += 1;
            let total: i64 = raw.iter().sum();
            let rho = UnderlyingDist::new(sc, raw.iter().map(|&x| ratio(x, total)).collect()).unwrap();
            let forms: Vec<LinearForm> = catalog_hardy().into_iter().chain(chsh_catalog()).collect();
            prop_assert!(!forms[which].evaluate(&rho.marginalize_all()).unwrap().is_negative());
        }
    }
}
