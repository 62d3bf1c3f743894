//! Measurement scenarios and the cell encodings.
//!
//! A cell is one joint assignment of an outcome `A_{p,k}` to every party `p`
//! and setting `k`. Cells are laid out on a grid with one axis per setting;
//! the coordinate along setting `k` packs the parties as binary digits,
//! `coords[k] = Σ_p A_{p,k}·2^p` (Alice is bit 0, Bob bit 1, Chris bit 2).
//! The flat cell index reads `coords` as a mixed-radix number with
//! `coords[0]` least significant, so bit `k·n + p` of a flat index is
//! `A_{p,k}`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported `n·m`; keeps cell tables addressable in memory.
pub const MAX_CELL_BITS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "ScenarioWire", into = "ScenarioWire")]
pub struct Scenario {
    parties: usize,
    settings: usize,
}

#[derive(Serialize, Deserialize)]
struct ScenarioWire {
    parties: usize,
    settings: usize,
}

impl TryFrom<ScenarioWire> for Scenario {
    type Error = Error;

    fn try_from(w: ScenarioWire) -> Result<Self> {
        Scenario::new(w.parties, w.settings)
    }
}

impl From<Scenario> for ScenarioWire {
    fn from(s: Scenario) -> Self {
        ScenarioWire { parties: s.parties, settings: s.settings }
    }
}

/// One outcome bit per (party, setting); index `k·n + p`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OutcomeAssignment {
    pub bits: Vec<u8>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GridIndex {
    pub coords: Vec<usize>,
}

/// Setting chosen by each party, `s[p] ∈ [0, m)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SettingVector(pub Vec<usize>);

/// Outcome bit observed by each party.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Outcomes(pub Vec<u8>);

/// A single marginal probability `P_s(o)`, without a value.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Event {
    pub settings: SettingVector,
    pub outcomes: Outcomes,
}

impl GridIndex {
    pub fn new(coords: impl Into<Vec<usize>>) -> Self {
        GridIndex { coords: coords.into() }
    }
}

impl OutcomeAssignment {
    pub fn new(bits: impl Into<Vec<u8>>) -> Self {
        OutcomeAssignment { bits: bits.into() }
    }
}

impl SettingVector {
    pub fn new(s: impl Into<Vec<usize>>) -> Self {
        SettingVector(s.into())
    }
}

impl Outcomes {
    pub fn new(o: impl Into<Vec<u8>>) -> Self {
        Outcomes(o.into())
    }

    /// Packs the outcome bits with party `p` as bit `p`.
    pub fn index(&self) -> usize {
        self.0.iter().enumerate().map(|(p, &b)| (b as usize) << p).sum()
    }

    pub fn from_index(n: usize, index: usize) -> Self {
        Outcomes((0..n).map(|p| ((index >> p) & 1) as u8).collect())
    }

    /// Party order, left to right: `"01"` means party 0 saw 0, party 1 saw 1.
    pub fn bitstring(&self) -> String {
        self.0.iter().map(|&b| if b == 0 { '0' } else { '1' }).collect()
    }

    pub fn parity(&self) -> u8 {
        self.0.iter().fold(0, |acc, &b| acc ^ b)
    }
}

impl Event {
    pub fn new(settings: impl Into<Vec<usize>>, outcomes: impl Into<Vec<u8>>) -> Self {
        Event { settings: SettingVector::new(settings), outcomes: Outcomes::new(outcomes) }
    }

    pub fn parties(&self) -> usize {
        self.settings.0.len()
    }
}

impl fmt::Display for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sep = if self.settings.0.iter().all(|&s| s < 10) { "" } else { "," };
        let settings: Vec<String> = self.settings.0.iter().map(|s| s.to_string()).collect();
        let outcomes: Vec<String> = self.outcomes.0.iter().map(|o| o.to_string()).collect();
        write!(f, "P_{}({})", settings.join(sep), outcomes.join(","))
    }
}

impl FromStr for Event {
    type Err = Error;

    /// Parses `P_10(0,0)`; settings with more than one digit are comma separated, `P_1,10(0,1)`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("expected an event like P_10(0,0), got {s:?}"));
        let rest = s.trim().strip_prefix("P_").ok_or_else(bad)?;
        let (settings, rest) = rest.split_once('(').ok_or_else(bad)?;
        let outcomes = rest.strip_suffix(')').ok_or_else(bad)?;
        let settings: Vec<usize> = if settings.contains(',') {
            settings.split(',').map(|t| t.trim().parse().map_err(|_| bad())).collect::<Result<_>>()?
        } else {
            settings.chars().map(|c| c.to_digit(10).map(|d| d as usize).ok_or_else(bad)).collect::<Result<_>>()?
        };
        let outcomes: Vec<u8> = outcomes
            .split(',')
            .map(|t| match t.trim() {
                "0" => Ok(0),
                "1" => Ok(1),
                _ => Err(bad()),
            })
            .collect::<Result<_>>()?;
        if settings.is_empty() || settings.len() != outcomes.len() {
            return Err(bad());
        }
        Ok(Event::new(settings, outcomes))
    }
}

impl Scenario {
    pub fn new(parties: usize, settings: usize) -> Result<Self> {
        if parties == 0 || settings == 0 {
            return Err(Error::InvalidScenario(format!(
                "parties and settings must be positive (got n={parties}, m={settings})"
            )));
        }
        if parties.saturating_mul(settings) > MAX_CELL_BITS {
            return Err(Error::InvalidScenario(format!(
                "n·m = {} exceeds the supported maximum {MAX_CELL_BITS}",
                parties * settings
            )));
        }
        Ok(Scenario { parties, settings })
    }

    /// Two parties, two settings each: the CHSH/Hardy scenario.
    pub fn bipartite() -> Self {
        Scenario { parties: 2, settings: 2 }
    }

    pub fn parties(&self) -> usize {
        self.parties
    }

    pub fn settings(&self) -> usize {
        self.settings
    }

    pub fn cell_bits(&self) -> usize {
        self.parties * self.settings
    }

    pub fn cell_count(&self) -> usize {
        1 << self.cell_bits()
    }

    /// Extent of each grid axis, `2^n`.
    pub fn grid_size(&self) -> usize {
        1 << self.parties
    }

    pub fn outcome_count(&self) -> usize {
        1 << self.parties
    }

    pub fn setting_vector_count(&self) -> usize {
        self.settings.pow(self.parties as u32)
    }

    /// Number of cells in every marginal support, `2^(n(m-1))`.
    pub fn support_size(&self) -> usize {
        1 << (self.parties * (self.settings - 1))
    }

    /// All setting vectors, lexicographic with party 0 most significant.
    pub fn setting_vectors(&self) -> Vec<SettingVector> {
        (0..self.setting_vector_count())
            .map(|mut idx| {
                let mut s = vec![0; self.parties];
                for p in (0..self.parties).rev() {
                    s[p] = idx % self.settings;
                    idx /= self.settings;
                }
                SettingVector(s)
            })
            .collect()
    }

    /// Position of `s` in [`Scenario::setting_vectors`].
    pub fn setting_index(&self, s: &SettingVector) -> usize {
        s.0.iter().fold(0, |acc, &k| acc * self.settings + k)
    }

    pub fn outcomes(&self) -> Vec<Outcomes> {
        let mut all: Vec<Outcomes> =
            (0..self.outcome_count()).map(|i| Outcomes::from_index(self.parties, i)).collect();
        all.sort();
        all
    }

    /// Every event `(s, o)` in canonical order.
    pub fn events(&self) -> Vec<Event> {
        let outcomes = self.outcomes();
        self.setting_vectors()
            .into_iter()
            .flat_map(|s| outcomes.iter().map(move |o| Event { settings: s.clone(), outcomes: o.clone() }))
            .collect()
    }

    pub fn validate_settings(&self, s: &SettingVector) -> Result<()> {
        if s.0.len() != self.parties {
            return Err(Error::InvalidSettings(format!(
                "expected {} entries, got {}",
                self.parties,
                s.0.len()
            )));
        }
        if let Some(&k) = s.0.iter().find(|&&k| k >= self.settings) {
            return Err(Error::InvalidSettings(format!("setting {k} out of range [0, {})", self.settings)));
        }
        Ok(())
    }

    pub fn validate_outcomes(&self, o: &Outcomes) -> Result<()> {
        if o.0.len() != self.parties {
            return Err(Error::InvalidOutcomes(format!(
                "expected {} entries, got {}",
                self.parties,
                o.0.len()
            )));
        }
        if o.0.iter().any(|&b| b > 1) {
            return Err(Error::InvalidOutcomes("outcomes must be 0 or 1".into()));
        }
        Ok(())
    }

    pub fn validate_event(&self, e: &Event) -> Result<()> {
        self.validate_settings(&e.settings)?;
        self.validate_outcomes(&e.outcomes)
    }

    pub fn encode_cell(&self, assignment: &OutcomeAssignment) -> Result<GridIndex> {
        if assignment.bits.len() != self.cell_bits() {
            return Err(Error::InvalidAssignment(format!(
                "expected {} bits, got {}",
                self.cell_bits(),
                assignment.bits.len()
            )));
        }
        if assignment.bits.iter().any(|&b| b > 1) {
            return Err(Error::InvalidAssignment("bits must be 0 or 1".into()));
        }
        let n = self.parties;
        let coords = assignment
            .bits
            .chunks(n)
            .map(|chunk| chunk.iter().enumerate().map(|(p, &b)| (b as usize) << p).sum())
            .collect();
        Ok(GridIndex { coords })
    }

    pub fn decode_cell(&self, grid: &GridIndex) -> Result<OutcomeAssignment> {
        self.validate_grid(grid)?;
        let n = self.parties;
        let bits = grid
            .coords
            .iter()
            .flat_map(|&c| (0..n).map(move |p| ((c >> p) & 1) as u8))
            .collect();
        Ok(OutcomeAssignment { bits })
    }

    pub fn validate_grid(&self, grid: &GridIndex) -> Result<()> {
        if grid.coords.len() != self.settings {
            return Err(Error::InvalidIndex(format!(
                "expected {} coordinates, got {}",
                self.settings,
                grid.coords.len()
            )));
        }
        if let Some(&c) = grid.coords.iter().find(|&&c| c >= self.grid_size()) {
            return Err(Error::InvalidIndex(format!("coordinate {c} out of range [0, {})", self.grid_size())));
        }
        Ok(())
    }

    pub fn flat_index(&self, grid: &GridIndex) -> Result<usize> {
        self.validate_grid(grid)?;
        Ok(grid.coords.iter().enumerate().map(|(k, &c)| c << (k * self.parties)).sum())
    }

    pub fn grid_index(&self, cell: usize) -> GridIndex {
        debug_assert!(cell < self.cell_count());
        let mask = self.grid_size() - 1;
        GridIndex { coords: (0..self.settings).map(|k| (cell >> (k * self.parties)) & mask).collect() }
    }

    /// `A_{p,k}` of a flat cell.
    #[inline]
    pub fn bit(&self, cell: usize, party: usize, setting: usize) -> u8 {
        ((cell >> (setting * self.parties + party)) & 1) as u8
    }

    /// Outcome index (party `p` as bit `p`) that `cell` produces under settings `s`.
    #[inline]
    pub fn outcome_index(&self, cell: usize, s: &SettingVector) -> usize {
        s.0.iter().enumerate().map(|(p, &k)| (self.bit(cell, p, k) as usize) << p).sum()
    }

    /// Bit mask and required value selecting the support of an event.
    pub(crate) fn event_mask(&self, e: &Event) -> (usize, usize) {
        let n = self.parties;
        e.settings.0.iter().zip(&e.outcomes.0).enumerate().fold((0, 0), |(mask, value), (p, (&k, &o))| {
            let bit = 1 << (k * n + p);
            (mask | bit, if o == 1 { value | bit } else { value })
        })
    }

    /// Flat indices of the cells summed by `P_s(o)`, ascending. The event must be valid.
    pub(crate) fn support_cells(&self, e: &Event) -> Vec<usize> {
        let (mask, value) = self.event_mask(e);
        (0..self.cell_count()).filter(|&c| c & mask == value).collect()
    }

    /// Cells `λ` with `A_{p, s[p]} = o[p]` for every party: the line or ribbon summed by `P_s(o)`.
    pub fn marginal_support(&self, e: &Event) -> Result<Vec<GridIndex>> {
        self.validate_event(e)?;
        Ok(self.support_cells(e).into_iter().map(|c| self.grid_index(c)).collect())
    }

    pub fn contains(&self, e: &Event, cell: usize) -> bool {
        let (mask, value) = self.event_mask(e);
        cell & mask == value
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n={},m={}", self.parties, self.settings)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    fn s22() -> Scenario {
        Scenario::new(2, 2).unwrap()
    }

    fn grid(coords: &[usize]) -> GridIndex {
        GridIndex::new(coords.to_vec())
    }

    /// Independent support oracle: decode every cell and compare bits.
    fn brute_support(sc: &Scenario, e: &Event) -> BTreeSet<GridIndex> {
        let n = sc.parties();
        let mut out = BTreeSet::new();
        for c in 0..sc.cell_count() {
            let g = sc.grid_index(c);
            let a = sc.decode_cell(&g).unwrap();
            if (0..n).all(|p| a.bits[e.settings.0[p] * n + p] == e.outcomes.0[p]) {
                out.insert(g);
            }
        }
        out
    }

    #[test]
    fn rejects_degenerate_scenarios() {
        assert!(Scenario::new(0, 2).is_err());
        assert!(Scenario::new(2, 0).is_err());
        assert!(Scenario::new(11, 2).is_err());
    }

    #[test]
    fn encode_examples() {
        let sc = s22();
        // A_0=1, B_0=0, A_1=0, B_1=1
        assert_eq!(sc.encode_cell(&OutcomeAssignment::new([1, 0, 0, 1])).unwrap(), grid(&[1, 2]));
        assert_eq!(sc.encode_cell(&OutcomeAssignment::new([0, 0, 0, 0])).unwrap(), grid(&[0, 0]));
        let sc3 = Scenario::new(3, 2).unwrap();
        assert_eq!(sc3.encode_cell(&OutcomeAssignment::new([1, 1, 1, 0, 0, 0])).unwrap(), grid(&[7, 0]));
    }

    #[test]
    fn encode_rejects_wrong_length() {
        let err = s22().encode_cell(&OutcomeAssignment::new([1, 0, 0])).unwrap_err();
        assert!(matches!(err, Error::InvalidAssignment(_)));
        assert!(s22().encode_cell(&OutcomeAssignment::new([2, 0, 0, 0])).is_err());
    }

    #[test]
    fn decode_examples() {
        let sc = s22();
        assert_eq!(sc.decode_cell(&grid(&[3, 0])).unwrap().bits, vec![1, 1, 0, 0]);
        assert_eq!(sc.decode_cell(&grid(&[0, 0])).unwrap().bits, vec![0, 0, 0, 0]);
        let sc23 = Scenario::new(2, 3).unwrap();
        assert_eq!(sc23.decode_cell(&grid(&[1, 2, 3])).unwrap().bits, vec![1, 0, 0, 1, 1, 1]);
    }

    #[test]
    fn decode_rejects_out_of_range() {
        assert!(matches!(s22().decode_cell(&grid(&[4, 0])), Err(Error::InvalidIndex(_))));
        assert!(matches!(s22().decode_cell(&grid(&[0])), Err(Error::InvalidIndex(_))));
    }

    #[test]
    fn encode_decode_exhaustive() {
        for (n, m) in [(1, 1), (2, 2), (3, 2), (2, 3), (4, 2), (2, 4), (1, 5), (4, 4)] {
            let sc = Scenario::new(n, m).unwrap();
            for c in 0..sc.cell_count() {
                let g = sc.grid_index(c);
                assert_eq!(sc.flat_index(&g).unwrap(), c);
                let a = sc.decode_cell(&g).unwrap();
                assert_eq!(sc.encode_cell(&a).unwrap(), g);
                for k in 0..m {
                    for p in 0..n {
                        assert_eq!(a.bits[k * n + p], sc.bit(c, p, k));
                    }
                }
            }
        }
    }

    #[test]
    fn support_examples() {
        let sc = s22();
        let supp = |e: &str| sc.marginal_support(&e.parse().unwrap()).unwrap();
        assert_eq!(supp("P_00(0,0)"), vec![grid(&[0, 0]), grid(&[0, 1]), grid(&[0, 2]), grid(&[0, 3])]);
        let col: BTreeSet<_> = supp("P_11(1,1)").into_iter().collect();
        assert_eq!(col, [[0, 3], [1, 3], [2, 3], [3, 3]].iter().map(|c| grid(c)).collect());
        let ribbon: BTreeSet<_> = supp("P_10(0,0)").into_iter().collect();
        assert_eq!(ribbon, [[0, 0], [1, 0], [0, 2], [1, 2]].iter().map(|c| grid(c)).collect());
    }

    #[test]
    fn supports_partition_and_match_brute_force() {
        for (n, m) in [(2, 2), (3, 2), (2, 3), (1, 3)] {
            let sc = Scenario::new(n, m).unwrap();
            for s in sc.setting_vectors() {
                let mut seen = vec![0u32; sc.cell_count()];
                for o in sc.outcomes() {
                    let e = Event { settings: s.clone(), outcomes: o };
                    let supp = sc.marginal_support(&e).unwrap();
                    assert_eq!(supp.len(), sc.support_size());
                    assert_eq!(supp.iter().cloned().collect::<BTreeSet<_>>(), brute_support(&sc, &e));
                    for g in supp {
                        seen[sc.flat_index(&g).unwrap()] += 1;
                    }
                }
                assert!(seen.iter().all(|&c| c == 1));
            }
        }
    }

    #[test]
    fn p00_rows_p11_columns() {
        let sc = s22();
        for o in sc.outcomes() {
            let row = sc.marginal_support(&Event { settings: SettingVector::new([0, 0]), outcomes: o.clone() }).unwrap();
            assert!(row.iter().all(|g| g.coords[0] == o.index()));
            let col = sc.marginal_support(&Event { settings: SettingVector::new([1, 1]), outcomes: o.clone() }).unwrap();
            assert!(col.iter().all(|g| g.coords[1] == o.index()));
        }
    }

    #[test]
    fn support_rejects_invalid_event() {
        let sc = s22();
        assert!(sc.marginal_support(&Event::new([0, 2], [0, 0])).is_err());
        assert!(sc.marginal_support(&Event::new([0, 0], [0, 2])).is_err());
        assert!(sc.marginal_support(&Event::new([0], [0])).is_err());
    }

    #[test]
    fn event_text_roundtrip() {
        for text in ["P_10(0,0)", "P_111(1,1,1)", "P_02(0,1)"] {
            let e: Event = text.parse().unwrap();
            assert_eq!(e.to_string(), text);
        }
        let wide: Event = "P_1,10(0,1)".parse().unwrap();
        assert_eq!(wide.settings.0, vec![1, 10]);
        assert!("P_10(0)".parse::<Event>().is_err());
        assert!("Q_10(0,0)".parse::<Event>().is_err());
    }

    #[test]
    fn setting_vector_order() {
        let sc = s22();
        let all = sc.setting_vectors();
        assert_eq!(all.iter().map(|s| s.0.clone()).collect::<Vec<_>>(), vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]);
        for (i, s) in all.iter().enumerate() {
            assert_eq!(sc.setting_index(s), i);
        }
    }

    #[test]
    fn scenario_json() {
        let sc = Scenario::new(3, 2).unwrap();
        let text = serde_json::to_string(&sc).unwrap();
        assert_eq!(text, r#"{"parties":3,"settings":2}"#);
        assert_eq!(serde_json::from_str::<Scenario>(&text).unwrap(), sc);
        assert!(serde_json::from_str::<Scenario>(r#"{"parties":0,"settings":2}"#).is_err());
    }
}
