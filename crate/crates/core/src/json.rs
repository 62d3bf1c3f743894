//! JSON wire formats.
//!
//! Exact values are written as strings (`"1/4"`, `"0"`); `{"num": .., "den": ..}`
//! objects and JSON integers are also accepted. Float values are JSON numbers.
//! A document whose values are all JSON numbers with at least one fraction is
//! float; one with any string or object value is rational; mixing a fraction
//! with exact values is rejected.

use std::str::FromStr;

use num::{BigInt, Signed, Zero};
use serde::Deserialize;
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::inequality::{Certificate, LinearForm, MarginalTerm, Verdict};
use crate::polytope::{Membership, MembershipResult};
use crate::quantum::{AxisChoice, PureState};
use crate::scalar::{Mode, Rational, Scalar};
use crate::scenario::{Event, GridIndex, Outcomes, Scenario, SettingVector};
use crate::underlying::{MarginalSet, MarginalTable, UnderlyingDist};

fn parse_err(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

/// Scalars with a JSON encoding.
pub trait WireScalar: Scalar {
    fn to_wire(&self) -> Value;
    fn from_wire(v: &Value) -> Result<Self>;
}

fn bigint_from(v: &Value) -> Result<BigInt> {
    match v {
        Value::Number(n) if n.is_i64() || n.is_u64() => Ok(BigInt::from_str(&n.to_string()).expect("integer literal")),
        Value::String(s) => BigInt::from_str(s.trim()).map_err(|_| parse_err(format!("bad integer {s:?}"))),
        _ => Err(parse_err(format!("expected an integer, got {v}"))),
    }
}

impl WireScalar for Rational {
    fn to_wire(&self) -> Value {
        Value::String(self.to_string())
    }

    fn from_wire(v: &Value) -> Result<Self> {
        match v {
            Value::Number(n) if n.is_i64() || n.is_u64() => Ok(Rational::from_integer(bigint_from(v)?)),
            Value::Number(n) => Err(parse_err(format!("fractional number {n} in exact data; write it as \"p/q\""))),
            Value::String(s) => Rational::from_str(s.trim()).map_err(|_| parse_err(format!("bad rational {s:?}"))),
            Value::Object(o) => {
                let num = bigint_from(o.get("num").ok_or_else(|| parse_err("missing \"num\""))?)?;
                let den = bigint_from(o.get("den").ok_or_else(|| parse_err("missing \"den\""))?)?;
                if den.is_zero() {
                    return Err(parse_err("zero denominator"));
                }
                Ok(Rational::new(num, den))
            }
            _ => Err(parse_err(format!("expected a rational value, got {v}"))),
        }
    }
}

impl WireScalar for f64 {
    fn to_wire(&self) -> Value {
        json!(self)
    }

    fn from_wire(v: &Value) -> Result<Self> {
        match v {
            Value::Number(n) => n.as_f64().ok_or_else(|| parse_err(format!("bad number {n}"))),
            _ => Err(parse_err(format!("expected a number in float data, got {v}"))),
        }
    }
}

/// Mode of a set of values per the rules in the module docs.
pub fn infer_mode<'a>(values: impl IntoIterator<Item = &'a Value>) -> Result<Mode> {
    let (mut exact, mut fractional) = (false, false);
    for v in values {
        match v {
            Value::Number(n) if n.is_i64() || n.is_u64() => {}
            Value::Number(_) => fractional = true,
            Value::String(_) | Value::Object(_) => exact = true,
            _ => return Err(parse_err(format!("expected a probability value, got {v}"))),
        }
    }
    match (exact, fractional) {
        (true, true) => Err(parse_err("mixed exact and float values")),
        (true, false) => Ok(Mode::Rational),
        _ => Ok(Mode::Float),
    }
}

fn declared_mode(doc: &Value) -> Result<Option<Mode>> {
    match doc.get("mode") {
        None | Some(Value::Null) => Ok(None),
        Some(m) => Ok(Some(Mode::deserialize(m).map_err(|_| parse_err(format!("mode must be \"rational\" or \"float\", got {m}")))?)),
    }
}

fn resolve_mode<'a>(doc: &Value, values: impl IntoIterator<Item = &'a Value>) -> Result<Mode> {
    let inferred = infer_mode(values)?;
    match declared_mode(doc)? {
        // Integer-only data is valid in either mode.
        Some(Mode::Float) if inferred == Mode::Rational => Err(parse_err("exact values in a float document")),
        Some(m) => Ok(m),
        None => Ok(inferred),
    }
}

fn scenario_of(doc: &Value) -> Result<Option<Scenario>> {
    match doc.get("scenario") {
        None | Some(Value::Null) => Ok(None),
        Some(v) => Ok(Some(Scenario::deserialize(v).map_err(|e| parse_err(format!("scenario: {e}")))?)),
    }
}

fn need<'a>(doc: &'a Value, key: &str) -> Result<&'a Value> {
    doc.get(key).ok_or_else(|| parse_err(format!("missing {key:?}")))
}

fn array<'a>(v: &'a Value, what: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| parse_err(format!("{what} must be an array")))
}

/// A value of either mode, as chosen by the document.
#[derive(Debug, Clone, PartialEq)]
pub enum Either<R, F> {
    Rational(R),
    Float(F),
}

// ---- underlying distributions ----

/// `{"scenario", "mode", "weights": [{"cell": [..], "p": ..}]}`, zero cells omitted.
pub fn dist_to_json<T: WireScalar>(rho: &UnderlyingDist<T>) -> Value {
    let sc = rho.scenario();
    let weights: Vec<Value> = rho
        .weights()
        .iter()
        .enumerate()
        .filter(|(_, w)| !w.is_zero())
        .map(|(c, w)| json!({"cell": sc.grid_index(c).coords, "p": w.to_wire()}))
        .collect();
    json!({"scenario": sc, "mode": T::MODE, "weights": weights})
}

pub fn dist_from_json<T: WireScalar>(doc: &Value) -> Result<UnderlyingDist<T>> {
    let sc = scenario_of(doc)?.ok_or_else(|| parse_err("distribution needs a scenario"))?;
    let entries = array(need(doc, "weights")?, "weights")?
        .iter()
        .map(|e| {
            let cell: Vec<usize> = serde_json::from_value(need(e, "cell")?.clone()).map_err(|e| parse_err(format!("cell: {e}")))?;
            Ok((GridIndex::new(cell), T::from_wire(need(e, "p")?)?))
        })
        .collect::<Result<Vec<_>>>()?;
    UnderlyingDist::from_cells(sc, entries)
}

pub fn parse_dist(doc: &Value) -> Result<Either<UnderlyingDist<Rational>, UnderlyingDist<f64>>> {
    let weights = array(need(doc, "weights")?, "weights")?;
    let values: Vec<&Value> = weights.iter().filter_map(|w| w.get("p")).collect();
    Ok(match resolve_mode(doc, values)? {
        Mode::Rational => Either::Rational(dist_from_json(doc)?),
        Mode::Float => Either::Float(dist_from_json(doc)?),
    })
}

// ---- marginal sets ----

/// `{"scenario", "mode", "tables": [{"settings": [..], "probs": {"00": .., ...}}]}`.
pub fn marginals_to_json<T: WireScalar>(ms: &MarginalSet<T>) -> Value {
    let n = ms.scenario().parties();
    let tables: Vec<Value> = ms
        .tables()
        .iter()
        .map(|t| {
            let probs: Map<String, Value> =
                t.probs().iter().enumerate().map(|(o, p)| (Outcomes::from_index(n, o).bitstring(), p.to_wire())).collect();
            json!({"settings": t.settings(), "probs": probs})
        })
        .collect();
    json!({"scenario": ms.scenario(), "mode": T::MODE, "tables": tables})
}

fn table_values(doc: &Value) -> Result<Vec<&Value>> {
    let mut out = Vec::new();
    for t in array(need(doc, "tables")?, "tables")? {
        let probs = need(t, "probs")?.as_object().ok_or_else(|| parse_err("probs must be an object keyed by outcome bits"))?;
        out.extend(probs.values());
    }
    Ok(out)
}

/// Parties from the settings length, settings from the table count `m^n`.
fn infer_marginal_scenario(doc: &Value) -> Result<Scenario> {
    let tables = array(need(doc, "tables")?, "tables")?;
    let first = tables.first().ok_or_else(|| parse_err("no tables"))?;
    let n = array(need(first, "settings")?, "settings")?.len();
    let count = tables.len();
    let m = (1..=count).find(|m| m.checked_pow(n as u32) == Some(count)).ok_or_else(|| {
        Error::IncompleteMarginals(format!("{count} tables is not m^{n} for any m; give the scenario explicitly"))
    })?;
    Scenario::new(n, m)
}

pub fn marginals_from_json<T: WireScalar>(doc: &Value) -> Result<MarginalSet<T>> {
    let sc = match scenario_of(doc)? {
        Some(sc) => sc,
        None => infer_marginal_scenario(doc)?,
    };
    let n = sc.parties();
    let tables = array(need(doc, "tables")?, "tables")?
        .iter()
        .map(|t| {
            let settings: SettingVector =
                serde_json::from_value(need(t, "settings")?.clone()).map_err(|e| parse_err(format!("settings: {e}")))?;
            let probs_obj = need(t, "probs")?.as_object().ok_or_else(|| parse_err("probs must be an object"))?;
            if probs_obj.len() != sc.outcome_count() {
                return Err(Error::IncompleteMarginals(format!(
                    "table {:?} has {} outcomes, expected {}",
                    settings.0,
                    probs_obj.len(),
                    sc.outcome_count()
                )));
            }
            let probs = (0..sc.outcome_count())
                .map(|o| {
                    let key = Outcomes::from_index(n, o).bitstring();
                    let v = probs_obj
                        .get(&key)
                        .ok_or_else(|| Error::IncompleteMarginals(format!("table {:?} lacks outcome {key}", settings.0)))?;
                    T::from_wire(v)
                })
                .collect::<Result<Vec<T>>>()?;
            MarginalTable::new(sc, settings, probs)
        })
        .collect::<Result<Vec<_>>>()?;
    MarginalSet::new(sc, tables)
}

pub fn parse_marginals(doc: &Value) -> Result<Either<MarginalSet<Rational>, MarginalSet<f64>>> {
    Ok(match resolve_mode(doc, table_values(doc)?)? {
        Mode::Rational => Either::Rational(marginals_from_json(doc)?),
        Mode::Float => Either::Float(marginals_from_json(doc)?),
    })
}

// ---- linear forms ----

/// `{"scenario", "constant", "terms": [{"event": "P_10(0,0)", "coef": "1"}], "text"}`.
pub fn form_to_json(form: &LinearForm) -> Value {
    let terms: Vec<Value> =
        form.terms().iter().map(|t| json!({"event": t.event.to_string(), "coef": t.coef.to_wire()})).collect();
    json!({
        "scenario": form.scenario(),
        "constant": form.constant().to_wire(),
        "terms": terms,
        "text": form.to_string(),
    })
}

/// Reads `terms` if present, otherwise the `text` field.
pub fn form_from_json(doc: &Value) -> Result<LinearForm> {
    let sc = scenario_of(doc)?.ok_or_else(|| parse_err("form needs a scenario"))?;
    if let Some(terms) = doc.get("terms") {
        let constant = match doc.get("constant") {
            None | Some(Value::Null) => Rational::zero(),
            Some(v) => Rational::from_wire(v)?,
        };
        let terms = array(terms, "terms")?
            .iter()
            .map(|t| {
                let event: Event = need(t, "event")?.as_str().ok_or_else(|| parse_err("event must be a string"))?.parse()?;
                let coef = match t.get("coef") {
                    None => Rational::from_integer(1.into()),
                    Some(v) => Rational::from_wire(v)?,
                };
                Ok(MarginalTerm::new(event, coef))
            })
            .collect::<Result<Vec<_>>>()?;
        return LinearForm::new(sc, constant, terms);
    }
    let text = need(doc, "text")?.as_str().ok_or_else(|| parse_err("text must be a string"))?;
    parse_form_text(sc, text)
}

/// Parses sums like `P_10(0,0) + 2 P_01(0,0) - 1/2*P_11(1,1) + 1 >= 0`.
pub fn parse_form_text(scenario: Scenario, text: &str) -> Result<LinearForm> {
    let body = text.trim();
    let body = match body.split_once(">=").or_else(|| body.split_once('≥')) {
        Some((lhs, rhs)) if rhs.trim() == "0" => lhs,
        Some(_) => return Err(parse_err("only `>= 0` is supported on the right-hand side")),
        None => body,
    };
    let body = body.replace('−', "-");
    let mut constant = Rational::zero();
    let mut terms = Vec::new();
    let mut sign = 1;
    let mut chunk = String::new();
    let mut flush = |chunk: &str, sign: i32| -> Result<()> {
        let c = chunk.trim();
        if c.is_empty() {
            return Err(parse_err(format!("empty term in {text:?}")));
        }
        let signed = |r: Rational| if sign < 0 { -r } else { r };
        match c.find("P_") {
            Some(at) => {
                let coef_txt = c[..at].trim().trim_end_matches('*').trim();
                let coef = if coef_txt.is_empty() {
                    Rational::from_integer(1.into())
                } else {
                    Rational::from_str(coef_txt).map_err(|_| parse_err(format!("bad coefficient {coef_txt:?}")))?
                };
                terms.push(MarginalTerm::new(c[at..].parse()?, signed(coef)));
            }
            None => {
                constant += signed(Rational::from_str(c).map_err(|_| parse_err(format!("bad term {c:?}")))?);
            }
        }
        Ok(())
    };
    let mut depth = 0;
    for ch in body.chars() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            _ => {}
        }
        if depth == 0 && (ch == '+' || ch == '-') {
            if !chunk.trim().is_empty() {
                flush(&chunk, sign)?;
                sign = 1;
            }
            chunk.clear();
            if ch == '-' {
                sign = -sign;
            }
        } else {
            chunk.push(ch);
        }
    }
    flush(&chunk, sign)?;
    LinearForm::new(scenario, constant, terms)
}

// ---- certificates and membership ----

pub fn certificate_to_json(cert: &Certificate) -> Value {
    let sc = cert.form.scenario();
    let cells: Vec<Value> =
        cert.cells.coefs().iter().enumerate().map(|(c, v)| json!({"cell": sc.grid_index(c).coords, "coef": v.to_wire()})).collect();
    let (verdict, witness, counterexample) = match &cert.verdict {
        Verdict::Proven => ("proven", Value::Null, Value::Null),
        Verdict::Refuted { witness, counterexample } => {
            ("refuted", json!(witness.coords), dist_to_json(counterexample))
        }
    };
    json!({
        "form": form_to_json(&cert.form),
        "verdict": verdict,
        "witness": witness,
        "counterexample": counterexample,
        "assumed_zero": cert.assumed_zero.iter().map(Event::to_string).collect::<Vec<_>>(),
        "cells": cells,
    })
}

pub fn membership_to_json<T: WireScalar>(res: &MembershipResult<T>) -> Value {
    match &res.verdict {
        Membership::Feasible { witness } => json!({
            "verdict": "feasible",
            "witness": dist_to_json(witness),
            "residual": res.residual,
            "pivots": res.pivots,
        }),
        Membership::Infeasible { hint, phase_one } => json!({
            "verdict": "infeasible",
            "phase_one": phase_one.to_wire(),
            "hint": hint.as_ref().map(|h| json!({"form": h.form.to_string(), "value": h.value.to_wire()})),
            "residual": res.residual,
            "pivots": res.pivots,
        }),
    }
}

// ---- quantum inputs ----

/// `{"axes": [[{"theta", "phi"}, ...per setting], ...per party]}`, validated.
pub fn parse_axes(doc: &Value) -> Result<AxisChoice> {
    let raw: AxisChoice = serde_json::from_value(doc.clone()).map_err(|e| Error::InvalidAxes(e.to_string()))?;
    AxisChoice::new(raw.axes)
}

pub fn axes_to_json(axes: &AxisChoice) -> Value {
    serde_json::to_value(axes).expect("plain data")
}

/// `[[re, im], ...]` with basis index bit `p` for party `p`.
pub fn parse_state(doc: &Value) -> Result<PureState> {
    let pairs: Vec<[f64; 2]> = serde_json::from_value(doc.clone()).map_err(|e| Error::InvalidState(e.to_string()))?;
    PureState::new(pairs.into_iter().map(|[re, im]| num::complex::Complex64::new(re, im)).collect())
}

pub fn state_to_json(state: &PureState) -> Value {
    json!(state.amplitudes().iter().map(|a| [a.re, a.im]).collect::<Vec<_>>())
}

/// Sign of a rational as `-1`, `0` or `1`, for compact summaries.
pub fn sign_of(r: &Rational) -> i8 {
    if r.is_positive() {
        1
    } else if r.is_negative() {
        -1
    } else {
        0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inequality::{catalog_hardy, chsh_catalog, hardy_base, zukowski_form};
    use crate::polytope::{membership, sample_rational_dist, FLOAT_FEASIBILITY_TOL};
    use crate::quantum::{born_marginals, chsh_optimal_axes};
    use crate::scalar::ratio;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn scenarios() -> [Scenario; 3] {
        [Scenario::bipartite(), Scenario::new(3, 2).unwrap(), Scenario::new(2, 3).unwrap()]
    }

    proptest! {
        #[test]
        fn rational_round_trips(seed in any::<u64>(), which in 0usize..3) {
            let rho = sample_rational_dist(scenarios()[which], &mut ChaCha8Rng::seed_from_u64(seed), 4);
            let doc = dist_to_json(&rho);
            prop_assert_eq!(&dist_from_json::<Rational>(&doc).unwrap(), &rho);
            let text = serde_json::to_string(&doc).unwrap();
            prop_assert_eq!(parse_dist(&serde_json::from_str(&text).unwrap()).unwrap(), Either::Rational(rho.clone()));
            let ms = rho.marginalize_all();
            prop_assert_eq!(parse_marginals(&marginals_to_json(&ms)).unwrap(), Either::Rational(ms.clone()));
            let f = ms.to_float();
            let text = serde_json::to_string(&marginals_to_json(&f)).unwrap();
            match parse_marginals(&serde_json::from_str(&text).unwrap()).unwrap() {
                Either::Float(g) => prop_assert_eq!(g, f),
                Either::Rational(_) => {
                    // Float data with only integer values (point masses) reads as exact.
                    prop_assert!(f.tables().iter().all(|t| t.probs().iter().all(|p| p.fract() == 0.0)));
                }
            }
        }
    }

    #[test]
    fn forms_round_trip() {
        for f in catalog_hardy().into_iter().chain(chsh_catalog()).chain([zukowski_form()]) {
            let doc = form_to_json(&f);
            assert_eq!(form_from_json(&doc).unwrap(), f);
            let text_only = json!({"scenario": f.scenario(), "text": f.to_string()});
            assert_eq!(form_from_json(&text_only).unwrap(), f);
        }
    }

    #[test]
    fn form_text_syntax() {
        let sc = Scenario::bipartite();
        let f = parse_form_text(sc, "P_10(0,0) + P_01(0,0) + P_11(1,1) − P_00(0,0) ≥ 0").unwrap();
        assert_eq!(f, hardy_base());
        let g = parse_form_text(sc, "1/2*P_00(0,0) - 2 P_11(1,1) + 3/4").unwrap();
        assert_eq!(g.constant(), &ratio(3, 4));
        assert_eq!(g.terms()[1].coef, ratio(-2, 1));
        assert!(parse_form_text(sc, "P_00(0,0) >= 1").is_err());
        assert!(parse_form_text(sc, "P_00(0,0) + ").is_err());
        assert!(parse_form_text(sc, "P_00(0,2)").is_err());
    }

    #[test]
    fn value_encodings() {
        let doc = json!({"tables": [
            {"settings": [0, 0], "probs": {"00": "1/2", "01": {"num": 1, "den": 4}, "10": {"num": "1", "den": "4"}, "11": 0}},
            {"settings": [0, 1], "probs": {"00": "1/4", "01": "1/4", "10": "1/4", "11": "1/4"}},
            {"settings": [1, 0], "probs": {"00": "1/4", "01": "1/4", "10": "1/4", "11": "1/4"}},
            {"settings": [1, 1], "probs": {"00": 1, "01": 0, "10": 0, "11": 0}}
        ]});
        let Either::Rational(ms) = parse_marginals(&doc).unwrap() else { panic!() };
        assert_eq!(ms.scenario(), Scenario::bipartite());
        // outcome "01" is party 0 → 0, party 1 → 1, outcome index 2
        assert_eq!(ms.tables()[0].probs()[2], ratio(1, 4));
        let mixed = json!({"tables": [{"settings": [0], "probs": {"0": "1/2", "1": 0.5}}]});
        assert!(matches!(parse_marginals(&mixed), Err(Error::Parse(_))));
        let floats = json!({"scenario": {"parties": 1, "settings": 1}, "tables": [{"settings": [0], "probs": {"0": 0.25, "1": 0.75}}]});
        assert!(matches!(parse_marginals(&floats).unwrap(), Either::Float(_)));
        let declared = json!({"mode": "float", "scenario": {"parties": 1, "settings": 1}, "tables": [{"settings": [0], "probs": {"0": 1, "1": 0}}]});
        assert!(matches!(parse_marginals(&declared).unwrap(), Either::Float(_)));
    }

    #[test]
    fn incomplete_and_unnormalized() {
        let missing = json!({"scenario": {"parties": 1, "settings": 2}, "tables": [{"settings": [0], "probs": {"0": "1/2", "1": "1/2"}}]});
        assert!(matches!(parse_marginals(&missing), Err(Error::IncompleteMarginals(_))));
        let short = json!({"tables": [{"settings": [0], "probs": {"0": "1"}}]});
        assert!(matches!(parse_marginals(&short), Err(Error::IncompleteMarginals(_))));
        let heavy = json!({"tables": [{"settings": [0], "probs": {"0": "1", "1": "1/2"}}]});
        assert!(matches!(parse_marginals(&heavy), Err(Error::Unnormalized { .. })));
        let bad = json!({"scenario": {"parties": 2, "settings": 2}, "weights": [{"cell": [0, 0], "p": "1/0"}]});
        assert!(parse_dist(&bad).is_err());
    }

    #[test]
    fn certificate_json() {
        let cert = hardy_base().certify();
        let doc = certificate_to_json(&cert);
        assert_eq!(doc["verdict"], "proven");
        assert_eq!(doc["cells"].as_array().unwrap().len(), 16);
        assert_eq!(doc["cells"][0]["coef"], "1");
        let bad = parse_form_text(Scenario::bipartite(), "P_00(0,0) - P_11(0,0)").unwrap().certify();
        let doc = certificate_to_json(&bad);
        assert_eq!(doc["verdict"], "refuted");
        assert!(doc["witness"].is_array());
        let rho = dist_from_json::<Rational>(&doc["counterexample"]).unwrap();
        assert!(bad.form.evaluate(&rho.marginalize_all()).unwrap().is_negative());
    }

    #[test]
    fn membership_json() {
        let ms = born_marginals(&PureState::singlet(), &chsh_optimal_axes()).unwrap();
        let doc = membership_to_json(&membership(&ms, &FLOAT_FEASIBILITY_TOL).unwrap());
        assert_eq!(doc["verdict"], "infeasible");
        assert!(doc["hint"]["value"].as_f64().unwrap() < -0.8);
        let uni = MarginalSet::<Rational>::uniform(Scenario::bipartite());
        let doc = membership_to_json(&membership(&uni, &Rational::zero()).unwrap());
        assert_eq!(doc["verdict"], "feasible");
        assert_eq!(dist_from_json::<Rational>(&doc["witness"]).unwrap().marginalize_all(), uni);
    }

    #[test]
    fn quantum_inputs() {
        let axes = chsh_optimal_axes();
        assert_eq!(parse_axes(&axes_to_json(&axes)).unwrap(), axes);
        assert!(parse_axes(&json!({"axes": [[{"theta": 4.0, "phi": 0.0}]]})).is_err());
        let s = PureState::singlet();
        assert_eq!(parse_state(&state_to_json(&s)).unwrap(), s);
        assert!(matches!(parse_state(&json!([[1.0, 0.0], [1.0, 0.0]])), Err(Error::InvalidState(_))));
    }
}
