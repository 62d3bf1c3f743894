//! Underlying distributions over cells, marginal tables, and the
//! hidden-variable constructions built on them.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::scalar::{is_unit_total, Scalar};
use crate::scenario::{Event, GridIndex, Outcomes, Scenario, SettingVector};

/// Joint distribution `ρ(λ)` over all cells of a scenario, indexed by flat cell.
#[derive(Debug, Clone, PartialEq)]
pub struct UnderlyingDist<T> {
    scenario: Scenario,
    weights: Vec<T>,
}

/// Observable distribution `P_s(o)` for one setting vector, indexed by [`Outcomes::index`].
#[derive(Debug, Clone, PartialEq)]
pub struct MarginalTable<T> {
    scenario: Scenario,
    settings: SettingVector,
    probs: Vec<T>,
}

/// One table per setting vector, ordered by [`Scenario::setting_index`].
#[derive(Debug, Clone, PartialEq)]
pub struct MarginalSet<T> {
    scenario: Scenario,
    tables: Vec<MarginalTable<T>>,
}

/// Single-party probabilities `P_{p,k}(A)`, stored at `p·m + k`.
#[derive(Debug, Clone, PartialEq)]
pub struct SingleSiteSet<T> {
    scenario: Scenario,
    probs: Vec<[T; 2]>,
}

fn check_weights<T: Scalar>(weights: &[T], what: &str) -> Result<()> {
    if let Some((i, w)) = weights.iter().enumerate().find(|(_, w)| w.is_negative() || w.to_f64().is_nan()) {
        return Err(Error::InvalidDistribution(format!("{what} entry {i} is negative or NaN ({w})")));
    }
    let total: T = weights.iter().cloned().sum();
    if !is_unit_total(&total) {
        return Err(Error::Unnormalized { total: total.to_string() });
    }
    Ok(())
}

impl<T: Scalar> UnderlyingDist<T> {
    pub fn new(scenario: Scenario, weights: Vec<T>) -> Result<Self> {
        if weights.len() != scenario.cell_count() {
            return Err(Error::InvalidDistribution(format!(
                "expected {} weights, got {}",
                scenario.cell_count(),
                weights.len()
            )));
        }
        check_weights(&weights, "weight")?;
        Ok(UnderlyingDist { scenario, weights })
    }

    /// Builds from sparse `(cell, weight)` entries; omitted cells get weight zero.
    pub fn from_cells(scenario: Scenario, entries: impl IntoIterator<Item = (GridIndex, T)>) -> Result<Self> {
        let mut weights = vec![T::zero(); scenario.cell_count()];
        let mut seen = BTreeSet::new();
        for (g, w) in entries {
            let c = scenario.flat_index(&g)?;
            if !seen.insert(c) {
                return Err(Error::InvalidDistribution(format!("cell {:?} listed twice", g.coords)));
            }
            weights[c] = w;
        }
        Self::new(scenario, weights)
    }

    pub fn uniform(scenario: Scenario) -> Self {
        let w = T::one() / T::from_int(scenario.cell_count() as i64);
        UnderlyingDist { scenario, weights: vec![w; scenario.cell_count()] }
    }

    pub fn point_mass(scenario: Scenario, cell: &GridIndex) -> Result<Self> {
        let c = scenario.flat_index(cell)?;
        Ok(Self::point_mass_flat(scenario, c))
    }

    pub(crate) fn point_mass_flat(scenario: Scenario, cell: usize) -> Self {
        let mut weights = vec![T::zero(); scenario.cell_count()];
        weights[cell] = T::one();
        UnderlyingDist { scenario, weights }
    }

    pub fn scenario(&self) -> Scenario {
        self.scenario
    }

    /// Weights indexed by flat cell.
    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn weight(&self, cell: &GridIndex) -> Result<&T> {
        Ok(&self.weights[self.scenario.flat_index(cell)?])
    }

    /// Partial sum of `ρ` over each marginal support for settings `s`.
    pub fn marginalize(&self, s: &SettingVector) -> Result<MarginalTable<T>> {
        self.scenario.validate_settings(s)?;
        let mut probs = vec![T::zero(); self.scenario.outcome_count()];
        for (c, w) in self.weights.iter().enumerate() {
            if !w.is_zero() {
                let o = self.scenario.outcome_index(c, s);
                probs[o] = probs[o].clone() + w.clone();
            }
        }
        Ok(MarginalTable { scenario: self.scenario, settings: s.clone(), probs })
    }

    pub fn marginalize_all(&self) -> MarginalSet<T> {
        let tables = self
            .scenario
            .setting_vectors()
            .iter()
            .map(|s| self.marginalize(s).expect("enumerated settings are valid"))
            .collect();
        MarginalSet { scenario: self.scenario, tables }
    }
}

impl<T: Scalar> MarginalTable<T> {
    pub fn new(scenario: Scenario, settings: SettingVector, probs: Vec<T>) -> Result<Self> {
        scenario.validate_settings(&settings)?;
        if probs.len() != scenario.outcome_count() {
            return Err(Error::InvalidDistribution(format!(
                "table {:?}: expected {} probabilities, got {}",
                settings.0,
                scenario.outcome_count(),
                probs.len()
            )));
        }
        check_weights(&probs, "probability")?;
        Ok(MarginalTable { scenario, settings, probs })
    }

    pub fn scenario(&self) -> Scenario {
        self.scenario
    }

    pub fn settings(&self) -> &SettingVector {
        &self.settings
    }

    /// Probabilities indexed by [`Outcomes::index`].
    pub fn probs(&self) -> &[T] {
        &self.probs
    }

    pub fn prob(&self, o: &Outcomes) -> Result<&T> {
        self.scenario.validate_outcomes(o)?;
        Ok(&self.probs[o.index()])
    }
}

impl<T: Scalar> MarginalSet<T> {
    /// Requires exactly one table per setting vector, in any order.
    pub fn new(scenario: Scenario, tables: Vec<MarginalTable<T>>) -> Result<Self> {
        let mut slots: Vec<Option<MarginalTable<T>>> = vec![None; scenario.setting_vector_count()];
        for t in tables {
            if t.scenario != scenario {
                return Err(Error::IncompleteMarginals(format!("table for {} in a {} set", t.scenario, scenario)));
            }
            let i = scenario.setting_index(&t.settings);
            if slots[i].is_some() {
                return Err(Error::IncompleteMarginals(format!("duplicate table for settings {:?}", t.settings.0)));
            }
            slots[i] = Some(t);
        }
        let mut out = Vec::with_capacity(slots.len());
        for (i, slot) in slots.into_iter().enumerate() {
            match slot {
                Some(t) => out.push(t),
                None => {
                    let missing = &scenario.setting_vectors()[i];
                    return Err(Error::IncompleteMarginals(format!("missing table for settings {:?}", missing.0)));
                }
            }
        }
        Ok(MarginalSet { scenario, tables: out })
    }

    pub fn uniform(scenario: Scenario) -> Self {
        UnderlyingDist::<T>::uniform(scenario).marginalize_all()
    }

    pub fn scenario(&self) -> Scenario {
        self.scenario
    }

    pub fn tables(&self) -> &[MarginalTable<T>] {
        &self.tables
    }

    pub fn table(&self, s: &SettingVector) -> Result<&MarginalTable<T>> {
        self.scenario.validate_settings(s)?;
        Ok(&self.tables[self.scenario.setting_index(s)])
    }

    pub fn prob(&self, e: &Event) -> Result<&T> {
        self.table(&e.settings)?.prob(&e.outcomes)
    }

    /// Largest violation of no-signaling: the marginal of any party subset
    /// must not depend on the settings of the parties outside it.
    pub fn max_signaling(&self) -> f64 {
        let n = self.scenario.parties();
        let full = (1usize << n) - 1;
        let mut worst = 0.0f64;
        for subset in 1..full {
            for t in &self.tables {
                for u in &self.tables {
                    let same_inside = (0..n).all(|p| subset >> p & 1 == 0 || t.settings.0[p] == u.settings.0[p]);
                    if !same_inside || t.settings >= u.settings {
                        continue;
                    }
                    let mut a = vec![0.0; 1 << n];
                    let mut b = vec![0.0; 1 << n];
                    for (o, (pt, pu)) in t.probs.iter().zip(&u.probs).enumerate() {
                        a[o & subset] += pt.to_f64();
                        b[o & subset] += pu.to_f64();
                    }
                    for (x, y) in a.iter().zip(&b) {
                        worst = worst.max((x - y).abs());
                    }
                }
            }
        }
        worst
    }

    pub fn to_float(&self) -> MarginalSet<f64> {
        MarginalSet {
            scenario: self.scenario,
            tables: self
                .tables
                .iter()
                .map(|t| MarginalTable {
                    scenario: t.scenario,
                    settings: t.settings.clone(),
                    probs: t.probs.iter().map(Scalar::to_f64).collect(),
                })
                .collect(),
        }
    }
}

impl<T: Scalar> SingleSiteSet<T> {
    /// `probs[p][k] = [P_{p,k}(0), P_{p,k}(1)]`.
    pub fn new(scenario: Scenario, probs: Vec<Vec<[T; 2]>>) -> Result<Self> {
        if probs.len() != scenario.parties() || probs.iter().any(|row| row.len() != scenario.settings()) {
            return Err(Error::InvalidDistribution(format!(
                "expected {} parties × {} settings of single-site probabilities",
                scenario.parties(),
                scenario.settings()
            )));
        }
        let flat: Vec<[T; 2]> = probs.into_iter().flatten().collect();
        for pair in &flat {
            check_weights(pair, "single-site probability")?;
        }
        Ok(SingleSiteSet { scenario, probs: flat })
    }

    pub fn uniform(scenario: Scenario) -> Self {
        let half = T::one() / T::from_int(2);
        SingleSiteSet { scenario, probs: vec![[half.clone(), half]; scenario.parties() * scenario.settings()] }
    }

    pub fn scenario(&self) -> Scenario {
        self.scenario
    }

    pub fn prob(&self, party: usize, setting: usize, outcome: u8) -> &T {
        &self.probs[party * self.scenario.settings() + setting][outcome as usize]
    }

    /// `ρ(λ) = Π_{p,k} P_{p,k}(A_{p,k})`.
    pub fn product_dist(&self) -> UnderlyingDist<T> {
        let sc = self.scenario;
        let weights = (0..sc.cell_count())
            .map(|c| {
                let mut w = T::one();
                for p in 0..sc.parties() {
                    for k in 0..sc.settings() {
                        w = w * self.prob(p, k, sc.bit(c, p, k)).clone();
                    }
                }
                w
            })
            .collect();
        UnderlyingDist { scenario: sc, weights }
    }
}

/// One instance of `P_s(o)·P_s'(o') = P_t(u)·P_t'(u')`, where `(t,u),(t',u')`
/// exchange the setting/outcome pairs of some parties between the two factors.
#[derive(Debug, Clone, PartialEq)]
pub struct FactorizationInstance<T> {
    pub lhs: (Event, Event),
    pub rhs: (Event, Event),
    pub residual: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FactorizationReport<T> {
    pub checked: usize,
    pub max_residual: T,
    pub violations: Vec<FactorizationInstance<T>>,
}

impl<T> FactorizationReport<T> {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks every cross-factorization identity implied by statistical independence.
///
/// Instances whose residual `|LHS − RHS|` exceeds `tol` are reported; pass zero
/// in rational mode for an exact check. Cost grows as `(m^n·2^n)²·2^n`.
pub fn check_factorization<T: Scalar>(ms: &MarginalSet<T>, tol: &T) -> FactorizationReport<T> {
    let sc = ms.scenario();
    let n = sc.parties();
    let events = sc.events();
    let index_of = |e: &Event| -> usize { sc.setting_index(&e.settings) * sc.outcome_count() + e.outcomes.index() };
    let mut by_index = vec![0usize; events.len()];
    for (i, e) in events.iter().enumerate() {
        by_index[index_of(e)] = i;
    }
    let value = |e: &Event| ms.tables[sc.setting_index(&e.settings)].probs[e.outcomes.index()].clone();

    let mut seen = BTreeSet::new();
    let mut checked = 0;
    let mut max_residual = T::zero();
    let mut violations = Vec::new();
    for x in 0..events.len() {
        for y in x..events.len() {
            let (ex, ey) = (&events[x], &events[y]);
            // Swapping a party set or its complement gives the same pair; keep party 0 fixed.
            for swap in 1..(1usize << n) {
                if swap & 1 == 1 {
                    continue;
                }
                let (mut t, mut u) = (ex.clone(), ey.clone());
                for p in (0..n).filter(|p| swap >> p & 1 == 1) {
                    t.settings.0[p] = ey.settings.0[p];
                    t.outcomes.0[p] = ey.outcomes.0[p];
                    u.settings.0[p] = ex.settings.0[p];
                    u.outcomes.0[p] = ex.outcomes.0[p];
                }
                let (i, j) = {
                    let (a, b) = (by_index[index_of(&t)], by_index[index_of(&u)]);
                    (a.min(b), a.max(b))
                };
                if (i, j) == (x, y) {
                    continue;
                }
                let key = if (x, y) < (i, j) { ((x, y), (i, j)) } else { ((i, j), (x, y)) };
                if !seen.insert(key) {
                    continue;
                }
                checked += 1;
                let residual = (value(ex) * value(ey) - value(&t) * value(&u)).abs();
                if residual > max_residual {
                    max_residual = residual.clone();
                }
                if residual > *tol {
                    violations.push(FactorizationInstance {
                        lhs: (ex.clone(), ey.clone()),
                        rhs: (events[i].clone(), events[j].clone()),
                        residual,
                    });
                }
            }
        }
    }
    FactorizationReport { checked, max_residual, violations }
}

/// Distribution `W(Λ)` over the 256 byte values of the bipartite two-setting
/// scenario, before locality is imposed.
///
/// Byte layout: the pair `q_ab = A_ab + 2·B_ab` occupies bits `2(a+2b)` and
/// `2(a+2b)+1`, so the byte reads `{A_00,B_00,A_10,B_10,A_01,B_01,A_11,B_11}`
/// from bit 0 upward.
#[derive(Debug, Clone, PartialEq)]
pub struct FullHiddenVariableDist<T> {
    weights: Vec<T>,
}

pub const FULL_BYTE_COUNT: usize = 256;

/// Bit position of `A_ab` (party 0) or `B_ab` (party 1) in a byte `Λ`.
#[inline]
pub fn byte_bit(alice_setting: usize, bob_setting: usize, party: usize) -> usize {
    2 * (alice_setting + 2 * bob_setting) + party
}

/// The byte a locally realistic cell replicates into: `A_ab = A_a`, `B_ab = B_b`.
pub fn local_byte(cell: usize) -> usize {
    let sc = Scenario::bipartite();
    let mut byte = 0;
    for a in 0..2 {
        for b in 0..2 {
            byte |= (sc.bit(cell, 0, a) as usize) << byte_bit(a, b, 0);
            byte |= (sc.bit(cell, 1, b) as usize) << byte_bit(a, b, 1);
        }
    }
    byte
}

fn is_local_byte(byte: usize) -> bool {
    let bit = |a, b, p| (byte >> byte_bit(a, b, p)) & 1;
    bit(0, 0, 0) == bit(0, 1, 0) && bit(1, 0, 0) == bit(1, 1, 0) && bit(0, 0, 1) == bit(1, 0, 1) && bit(0, 1, 1) == bit(1, 1, 1)
}

/// Outcome of [`reduce_local`].
#[derive(Debug, Clone, PartialEq)]
pub enum LocalReduction<T> {
    Local(UnderlyingDist<T>),
    /// `W` puts this much mass on bytes where some outcome depends on the remote setting.
    NotLocal { off_subspace_mass: T },
}

impl<T: Scalar> FullHiddenVariableDist<T> {
    pub fn new(weights: Vec<T>) -> Result<Self> {
        if weights.len() != FULL_BYTE_COUNT {
            return Err(Error::InvalidDistribution(format!(
                "expected {FULL_BYTE_COUNT} byte weights, got {}",
                weights.len()
            )));
        }
        check_weights(&weights, "byte weight")?;
        Ok(FullHiddenVariableDist { weights })
    }

    pub fn uniform() -> Self {
        let w = T::one() / T::from_int(FULL_BYTE_COUNT as i64);
        FullHiddenVariableDist { weights: vec![w; FULL_BYTE_COUNT] }
    }

    pub fn point_mass(byte: u8) -> Self {
        let mut weights = vec![T::zero(); FULL_BYTE_COUNT];
        weights[byte as usize] = T::one();
        FullHiddenVariableDist { weights }
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }
}

fn require_bipartite(sc: Scenario) -> Result<()> {
    if sc != Scenario::bipartite() {
        return Err(Error::UnsupportedScenario(format!(
            "the full hidden-variable byte is defined only for n=2,m=2 (got {sc})"
        )));
    }
    Ok(())
}

/// `W(Λ) = ρ(λ)` on locality-consistent bytes, zero elsewhere.
pub fn embed_local<T: Scalar>(rho: &UnderlyingDist<T>) -> Result<FullHiddenVariableDist<T>> {
    require_bipartite(rho.scenario())?;
    let mut weights = vec![T::zero(); FULL_BYTE_COUNT];
    for (c, w) in rho.weights().iter().enumerate() {
        weights[local_byte(c)] = w.clone();
    }
    Ok(FullHiddenVariableDist { weights })
}

/// Recovers `ρ(A_0,B_0;A_1,B_1) = W(A_0,B_0;A_1,B_0;A_0,B_1;A_1,B_1)` when all of
/// `W`'s mass lies on locality-consistent bytes.
pub fn reduce_local<T: Scalar>(w: &FullHiddenVariableDist<T>) -> LocalReduction<T> {
    let off: T = w
        .weights
        .iter()
        .enumerate()
        .filter(|&(b, _)| !is_local_byte(b))
        .map(|(_, x)| x.clone())
        .sum();
    if !off.is_negligible() {
        return LocalReduction::NotLocal { off_subspace_mass: off };
    }
    let sc = Scenario::bipartite();
    let weights = (0..sc.cell_count()).map(|c| w.weights[local_byte(c)].clone()).collect();
    LocalReduction::Local(UnderlyingDist { scenario: sc, weights })
}

/// `P_ab(A,B) = Σ W(Λ)` over bytes with `A_ab = A` and `B_ab = B`.
pub fn full_marginals<T: Scalar>(w: &FullHiddenVariableDist<T>) -> MarginalSet<T> {
    let sc = Scenario::bipartite();
    let tables = sc
        .setting_vectors()
        .into_iter()
        .map(|s| {
            let (a, b) = (s.0[0], s.0[1]);
            let mut probs = vec![T::zero(); 4];
            for (byte, x) in w.weights.iter().enumerate() {
                let o = (byte >> byte_bit(a, b, 0) & 1) | (byte >> byte_bit(a, b, 1) & 1) << 1;
                probs[o] = probs[o].clone() + x.clone();
            }
            MarginalTable { scenario: sc, settings: s, probs }
        })
        .collect();
    MarginalSet { scenario: sc, tables }
}
