//! Instances, solutions, objective vectors and the dominance relation.
//!
//! Weight is minimized, every profit is maximized. Weights are exact
//! rationals; profits are `f64`.

use std::cmp::Ordering;
use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::rational::Rational;

/// Total weight and `d` total profits of a solution.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveVector {
    pub weight: Rational,
    pub profits: Vec<f64>,
}

impl ObjectiveVector {
    pub fn new(weight: Rational, profits: Vec<f64>) -> Result<Self> {
        if profits.is_empty() {
            return Err(Error::InvalidInput("objective vector needs d >= 1 profits".into()));
        }
        if let Some(p) = profits.iter().find(|p| !p.is_finite()) {
            return Err(Error::InvalidInput(format!("non-finite profit {p}")));
        }
        Ok(ObjectiveVector { weight, profits })
    }

    pub fn dim(&self) -> usize {
        self.profits.len()
    }
}

/// Closed interval `[lo, hi]` with rational bounds.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interval {
    pub lo: Rational,
    pub hi: Rational,
}

impl Interval {
    pub fn new(lo: Rational, hi: Rational) -> Result<Self> {
        if lo > hi {
            return Err(Error::InvalidInput(format!("interval [{lo}, {hi}] has lo > hi")));
        }
        Ok(Interval { lo, hi })
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    /// Exact membership test for a float.
    pub fn contains(&self, x: f64) -> bool {
        match Rational::from_f64(x) {
            Ok(x) => self.lo <= x && x <= self.hi,
            Err(_) => false,
        }
    }

    pub fn within_unit(&self) -> bool {
        self.lo >= Rational::zero() && self.hi <= Rational::one()
    }
}

impl Serialize for Interval {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        (&self.lo, &self.hi).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Interval {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let (lo, hi) = <(Rational, Rational)>::deserialize(deserializer)?;
        Interval::new(lo, hi).map_err(serde::de::Error::custom)
    }
}

/// Axis-aligned box of per-dimension sampling intervals.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ProfitBox {
    intervals: Vec<Interval>,
}

impl ProfitBox {
    pub fn new(intervals: Vec<Interval>) -> Result<Self> {
        if intervals.is_empty() {
            return Err(Error::InvalidInput("profit box needs at least one dimension".into()));
        }
        Ok(ProfitBox { intervals })
    }

    /// `[lo, hi]` in every one of `d` dimensions.
    pub fn cube(d: usize, lo: Rational, hi: Rational) -> Result<Self> {
        let iv = Interval::new(lo, hi)?;
        ProfitBox::new(vec![iv; d])
    }

    /// Degenerate box holding exactly the given point.
    pub fn point(values: &[f64]) -> Result<Self> {
        values
            .iter()
            .map(|&v| {
                let r = Rational::from_f64(v)?;
                Interval::new(r.clone(), r)
            })
            .collect::<Result<Vec<_>>>()
            .and_then(ProfitBox::new)
    }

    pub fn dim(&self) -> usize {
        self.intervals.len()
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn contains(&self, point: &[f64]) -> bool {
        point.len() == self.dim() && self.intervals.iter().zip(point).all(|(iv, &x)| iv.contains(x))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KnapsackObject {
    weight: Rational,
    #[serde(rename = "box")]
    profit_box: ProfitBox,
    profits: Option<Vec<f64>>,
}

impl KnapsackObject {
    pub fn new(weight: Rational, profit_box: ProfitBox) -> Result<Self> {
        let obj = KnapsackObject {
            weight,
            profit_box,
            profits: None,
        };
        obj.validate()?;
        Ok(obj)
    }

    fn validate(&self) -> Result<()> {
        if !self.weight.is_positive() {
            return Err(Error::InvalidInput(format!(
                "object weight must be positive, got {}",
                self.weight
            )));
        }
        if let Some(p) = &self.profits {
            if p.len() != self.profit_box.dim() {
                return Err(Error::DimensionMismatch {
                    expected: self.profit_box.dim(),
                    got: p.len(),
                });
            }
            if let Some(x) = p.iter().find(|x| !x.is_finite()) {
                return Err(Error::InvalidInput(format!("non-finite realized profit {x}")));
            }
        }
        Ok(())
    }

    pub fn weight(&self) -> &Rational {
        &self.weight
    }

    pub fn profit_box(&self) -> &ProfitBox {
        &self.profit_box
    }

    pub fn realized_profits(&self) -> Option<&[f64]> {
        self.profits.as_deref()
    }

    pub fn with_profits(mut self, profits: Vec<f64>) -> Result<Self> {
        self.profits = Some(profits);
        self.validate()?;
        Ok(self)
    }
}

/// A 0-1 selection over a group's objects. Text form is a bitstring whose
/// first character is the group's first object.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Selection(Vec<bool>);

impl Selection {
    pub fn new(bits: Vec<bool>) -> Self {
        Selection(bits)
    }

    pub fn zeros(len: usize) -> Self {
        Selection(vec![false; len])
    }

    pub fn ones(len: usize) -> Self {
        Selection(vec![true; len])
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn count_ones(&self) -> usize {
        self.0.iter().filter(|&&b| b).count()
    }
}

impl fmt::Display for Selection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for Selection {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::InvalidInput(format!("bad bit {other:?} in {s:?}"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(Selection)
    }
}

impl Serialize for Selection {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Selection {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(deserializer)?
            .parse()
            .map_err(serde::de::Error::custom)
    }
}

/// Objects that are decided together: a solution picks exactly one of the
/// allowed `choices`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Group {
    objects: Vec<KnapsackObject>,
    choices: Vec<Selection>,
}

impl Group {
    pub fn new(objects: Vec<KnapsackObject>, choices: Vec<Selection>) -> Result<Self> {
        let g = Group { objects, choices };
        g.validate()?;
        Ok(g)
    }

    /// One object that may be taken or not.
    pub fn singleton(object: KnapsackObject) -> Self {
        Group {
            objects: vec![object],
            choices: vec![Selection::zeros(1), Selection::ones(1)],
        }
    }

    /// Objects that are taken all together or not at all.
    pub fn all_or_none(objects: Vec<KnapsackObject>) -> Self {
        let n = objects.len();
        Group {
            objects,
            choices: vec![Selection::zeros(n), Selection::ones(n)],
        }
    }

    fn validate(&self) -> Result<()> {
        if self.choices.is_empty() {
            return Err(Error::InvalidInput("group has no choices".into()));
        }
        let mut seen = HashSet::new();
        for c in &self.choices {
            if c.len() != self.objects.len() {
                return Err(Error::InvalidInput(format!(
                    "choice {c} has length {} but group has {} objects",
                    c.len(),
                    self.objects.len()
                )));
            }
            if !seen.insert(c) {
                return Err(Error::InvalidInput(format!("duplicate choice {c}")));
            }
        }
        for o in &self.objects {
            o.validate()?;
        }
        Ok(())
    }

    pub fn objects(&self) -> &[KnapsackObject] {
        &self.objects
    }

    pub fn choices(&self) -> &[Selection] {
        &self.choices
    }

    pub fn len(&self) -> usize {
        self.objects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.objects.is_empty()
    }

    pub(crate) fn map_objects(
        &self,
        f: impl FnMut((usize, &KnapsackObject)) -> Result<KnapsackObject>,
    ) -> Result<Group> {
        let objects = self.objects.iter().enumerate().map(f).collect::<Result<_>>()?;
        Ok(Group {
            objects,
            choices: self.choices.clone(),
        })
    }

    /// Exact weight and float profit total of one choice. Profits are summed
    /// in object order starting from zero.
    pub fn choice_value(&self, choice: usize, d: usize) -> Result<(Rational, Vec<f64>)> {
        let sel = self
            .choices
            .get(choice)
            .ok_or_else(|| Error::InvalidInput(format!("choice index {choice} out of range")))?;
        let mut weight = Rational::zero();
        let mut profits = vec![0.0; d];
        for (obj, _) in self.objects.iter().zip(sel.bits()).filter(|(_, &b)| b) {
            weight = weight + obj.weight();
            let p = obj.realized_profits().ok_or(Error::NotSampled)?;
            for (acc, x) in profits.iter_mut().zip(p) {
                *acc += x;
            }
        }
        Ok((weight, profits))
    }
}

/// Multi-profit knapsack instance with groups; the feasible set is the
/// product of the groups' choice sets.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KnapsackInstance {
    d: usize,
    phi: Rational,
    groups: Vec<Group>,
}

impl KnapsackInstance {
    pub fn new(d: usize, phi: Rational, groups: Vec<Group>) -> Result<Self> {
        let inst = KnapsackInstance { d, phi, groups };
        inst.validate()?;
        Ok(inst)
    }

    fn validate(&self) -> Result<()> {
        if self.d == 0 {
            return Err(Error::InvalidInput("d must be >= 1".into()));
        }
        if self.phi < Rational::one() {
            return Err(Error::InvalidInput(format!("phi must be >= 1, got {}", self.phi)));
        }
        for g in &self.groups {
            g.validate()?;
            for o in g.objects() {
                if o.profit_box().dim() != self.d {
                    return Err(Error::DimensionMismatch {
                        expected: self.d,
                        got: o.profit_box().dim(),
                    });
                }
            }
        }
        Ok(())
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let inst: KnapsackInstance = serde_json::from_str(s)?;
        inst.validate()?;
        Ok(inst)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn phi(&self) -> &Rational {
        &self.phi
    }

    pub fn groups(&self) -> &[Group] {
        &self.groups
    }

    pub fn object_count(&self) -> usize {
        self.groups.iter().map(Group::len).sum()
    }

    pub fn objects(&self) -> impl Iterator<Item = &KnapsackObject> {
        self.groups.iter().flat_map(|g| g.objects())
    }

    pub fn is_sampled(&self) -> bool {
        self.objects().all(|o| o.realized_profits().is_some())
    }

    /// Number of feasible solutions, `prod |choices_i|`, saturating.
    pub fn solution_count(&self) -> u128 {
        self.groups
            .iter()
            .fold(1u128, |acc, g| acc.saturating_mul(g.choices().len() as u128))
    }

    /// Instance made of the first `count` groups.
    pub fn prefix(&self, count: usize) -> KnapsackInstance {
        KnapsackInstance {
            d: self.d,
            phi: self.phi.clone(),
            groups: self.groups[..count.min(self.groups.len())].to_vec(),
        }
    }

    pub(crate) fn with_groups(&self, groups: Vec<Group>) -> Result<KnapsackInstance> {
        KnapsackInstance::new(self.d, self.phi.clone(), groups)
    }
}

/// One choice index per group.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Solution(pub Vec<usize>);

impl Solution {
    pub fn choices(&self) -> &[usize] {
        &self.0
    }

    /// Bitstrings of the chosen selections, one per group.
    pub fn bitstrings(&self, instance: &KnapsackInstance) -> Vec<String> {
        self.0
            .iter()
            .zip(instance.groups())
            .map(|(&c, g)| g.choices()[c].to_string())
            .collect()
    }
}

pub fn solution_value(instance: &KnapsackInstance, s: &Solution) -> Result<ObjectiveVector> {
    if s.0.len() != instance.groups().len() {
        return Err(Error::InvalidInput(format!(
            "solution has {} choices for {} groups",
            s.0.len(),
            instance.groups().len()
        )));
    }
    if !instance.is_sampled() {
        return Err(Error::NotSampled);
    }
    let d = instance.d();
    let mut weight = Rational::zero();
    let mut profits = vec![0.0; d];
    for (g, &c) in instance.groups().iter().zip(&s.0) {
        let (w, p) = g.choice_value(c, d)?;
        weight = weight + w;
        for (acc, x) in profits.iter_mut().zip(&p) {
            *acc += x;
        }
    }
    Ok(ObjectiveVector { weight, profits })
}

/// `x` dominates `y`: no heavier, no less profitable anywhere, and strictly
/// better in at least one of the `d + 1` objectives.
pub fn dominates(x: &ObjectiveVector, y: &ObjectiveVector) -> Result<bool> {
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch {
            expected: x.dim(),
            got: y.dim(),
        });
    }
    Ok(dominates_raw(&x.weight, &x.profits, &y.weight, &y.profits))
}

pub(crate) fn dominates_raw<W: Ord>(wx: &W, px: &[f64], wy: &W, py: &[f64]) -> bool {
    let mut strict = match wx.cmp(wy) {
        Ordering::Greater => return false,
        Ordering::Less => true,
        Ordering::Equal => false,
    };
    for (a, b) in px.iter().zip(py) {
        if a < b {
            return false;
        }
        strict |= a > b;
    }
    strict
}

/// Keeps the entries whose vector no other entry dominates, in input order.
/// Entries with identical vectors are all kept.
pub fn pareto_filter(
    points: Vec<(Solution, ObjectiveVector)>,
) -> Result<Vec<(Solution, ObjectiveVector)>> {
    let Some(d) = points.first().map(|(_, v)| v.dim()) else {
        return Ok(points);
    };
    if let Some((_, v)) = points.iter().find(|(_, v)| v.dim() != d) {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: v.dim(),
        });
    }
    let weights: Vec<&Rational> = points.iter().map(|(_, v)| &v.weight).collect();
    let profits: Vec<f64> = points.iter().flat_map(|(_, v)| v.profits.iter().copied()).collect();
    let keep = nondominated_indices(&weights, &profits, d);
    let mut keep = keep.into_iter().peekable();
    Ok(points
        .into_iter()
        .enumerate()
        .filter_map(|(i, p)| (keep.next_if_eq(&i).is_some()).then_some(p))
        .collect())
}

/// Indices (ascending) of the non-dominated rows. `profits` is row-major
/// with `d` columns.
///
/// Rows are visited by ascending weight, then descending profit sum, then
/// descending profits lexicographically; in that order a dominator always
/// precedes what it dominates, so each row is only checked against the rows
/// already kept.
pub(crate) fn nondominated_indices<W: Ord>(weights: &[W], profits: &[f64], d: usize) -> Vec<usize> {
    let n = weights.len();
    debug_assert_eq!(profits.len(), n * d);
    let row = |i: usize| &profits[i * d..(i + 1) * d];
    let sums: Vec<f64> = (0..n).map(|i| row(i).iter().sum()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        weights[a]
            .cmp(&weights[b])
            .then_with(|| sums[b].total_cmp(&sums[a]))
            .then_with(|| {
                row(b)
                    .iter()
                    .zip(row(a))
                    .map(|(x, y)| x.total_cmp(y))
                    .find(|o| o.is_ne())
                    .unwrap_or(Ordering::Equal)
            })
    });

    let mut kept = Vec::new();
    if d == 1 {
        // (profit, weight) of the first row reaching the running maximum profit
        let mut best: Option<(f64, &W)> = None;
        for i in order {
            let p = profits[i];
            let keep = match best {
                None => true,
                Some((bp, _)) if p > bp => true,
                Some((bp, bw)) => p == bp && *bw == weights[i],
            };
            if keep {
                kept.push(i);
                if best.is_none_or(|(bp, _)| p > bp) {
                    best = Some((p, &weights[i]));
                }
            }
        }
    } else {
        for i in order {
            let dominated = kept
                .iter()
                .any(|&k| dominates_raw(&weights[k], row(k), &weights[i], row(i)));
            if !dominated {
                kept.push(i);
            }
        }
    }
    kept.sort_unstable();
    kept
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ov(w: i64, p: &[f64]) -> ObjectiveVector {
        ObjectiveVector::new(Rational::from(w), p.to_vec()).unwrap()
    }

    fn sampled_group(weights: &[i64], profits: &[f64], choices: &[&str]) -> Group {
        let objects = weights
            .iter()
            .zip(profits)
            .map(|(&w, &p)| {
                KnapsackObject::new(
                    Rational::from(w),
                    ProfitBox::cube(1, Rational::zero(), Rational::one()).unwrap(),
                )
                .unwrap()
                .with_profits(vec![p])
                .unwrap()
            })
            .collect();
        let choices = choices.iter().map(|c| c.parse().unwrap()).collect();
        Group::new(objects, choices).unwrap()
    }

    #[test]
    fn empty_selection_is_zero() {
        let g = sampled_group(&[2, 4], &[0.3, 0.5], &["00", "11"]);
        let inst = KnapsackInstance::new(1, Rational::one(), vec![g]).unwrap();
        let v = solution_value(&inst, &Solution(vec![0])).unwrap();
        assert!(v.weight.is_zero());
        assert_eq!(v.profits, vec![0.0]);
    }

    #[test]
    fn two_object_sum() {
        let g = sampled_group(&[2, 4], &[0.3, 0.5], &["00", "11"]);
        let inst = KnapsackInstance::new(1, Rational::one(), vec![g]).unwrap();
        let v = solution_value(&inst, &Solution(vec![1])).unwrap();
        assert_eq!(v.weight, Rational::from(6));
        assert_eq!(v.profits, vec![0.8]);
    }

    #[test]
    fn unsampled_instance_is_an_error() {
        let obj = KnapsackObject::new(
            Rational::one(),
            ProfitBox::cube(1, Rational::zero(), Rational::one()).unwrap(),
        )
        .unwrap();
        let inst = KnapsackInstance::new(1, Rational::one(), vec![Group::singleton(obj)]).unwrap();
        assert!(matches!(
            solution_value(&inst, &Solution(vec![1])),
            Err(Error::NotSampled)
        ));
    }

    #[test]
    fn dominance_cases() {
        assert!(dominates(&ov(1, &[5.0]), &ov(3, &[4.0])).unwrap());
        assert!(!dominates(&ov(1, &[5.0]), &ov(1, &[5.0])).unwrap());
        assert!(!dominates(&ov(1, &[5.0]), &ov(2, &[6.0])).unwrap());
        assert!(!dominates(&ov(2, &[6.0]), &ov(1, &[5.0])).unwrap());
        // strict in weight only
        assert!(dominates(&ov(1, &[5.0, 2.0]), &ov(2, &[5.0, 2.0])).unwrap());
        assert!(dominates(&ov(1, &[5.0]), &ov(1, &[5.0, 1.0])).is_err());
    }

    #[test]
    fn filter_examples() {
        let pts = |v: &[(i64, f64)]| -> Vec<(Solution, ObjectiveVector)> {
            v.iter()
                .enumerate()
                .map(|(i, &(w, p))| (Solution(vec![i]), ov(w, &[p])))
                .collect()
        };
        let single = pareto_filter(pts(&[(1, 5.0)])).unwrap();
        assert_eq!(single.len(), 1);

        let out = pareto_filter(pts(&[(1, 5.0), (2, 6.0), (3, 4.0)])).unwrap();
        let ids: Vec<_> = out.iter().map(|(s, _)| s.0[0]).collect();
        assert_eq!(ids, vec![0, 1]);

        let out = pareto_filter(pts(&[(2, 3.0), (2, 3.0)])).unwrap();
        assert_eq!(out.len(), 2);

        // equal weight, lower profit is dominated even after a duplicate pair
        let out = pareto_filter(pts(&[(1, 3.0), (1, 3.0), (1, 2.0), (2, 3.0)])).unwrap();
        let ids: Vec<_> = out.iter().map(|(s, _)| s.0[0]).collect();
        assert_eq!(ids, vec![0, 1]);

        assert!(pareto_filter(vec![]).unwrap().is_empty());
    }

    #[test]
    fn filter_rejects_mixed_dimensions() {
        let pts = vec![
            (Solution(vec![0]), ov(1, &[1.0])),
            (Solution(vec![1]), ov(1, &[1.0, 2.0])),
        ];
        assert!(matches!(pareto_filter(pts), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn group_validation() {
        let obj = KnapsackObject::new(
            Rational::one(),
            ProfitBox::cube(1, Rational::zero(), Rational::one()).unwrap(),
        )
        .unwrap();
        assert!(Group::new(vec![obj.clone()], vec!["1".parse().unwrap(), "1".parse().unwrap()]).is_err());
        assert!(Group::new(vec![obj.clone()], vec!["10".parse().unwrap()]).is_err());
        assert!(Group::new(vec![obj], vec![]).is_err());
        assert!(KnapsackObject::new(
            Rational::zero(),
            ProfitBox::cube(1, Rational::zero(), Rational::one()).unwrap()
        )
        .is_err());
    }

    #[test]
    fn instance_json_schema() {
        let g = sampled_group(&[2, 4], &[0.3, 0.5], &["00", "10", "11"]);
        let inst = KnapsackInstance::new(1, Rational::from(3), vec![g]).unwrap();
        let json: serde_json::Value = serde_json::from_str(&inst.to_json().unwrap()).unwrap();
        assert_eq!(json["d"], 1);
        assert_eq!(json["phi"], "3/1");
        let group = &json["groups"][0];
        assert_eq!(group["choices"], serde_json::json!(["00", "10", "11"]));
        assert_eq!(group["objects"][0]["weight"], "2/1");
        assert_eq!(group["objects"][0]["box"], serde_json::json!([["0/1", "1/1"]]));
        assert_eq!(group["objects"][1]["profits"], serde_json::json!([0.5]));
        let back = KnapsackInstance::from_json(&inst.to_json().unwrap()).unwrap();
        assert_eq!(back, inst);
    }

    #[test]
    fn json_validation_rejects_bad_dimension() {
        let bad = r#"{"d": 2, "phi": "1/1", "groups": [{"objects": [{"weight": "1/1", "box": [["0/1","1/1"]], "profits": null}], "choices": ["0","1"]}]}"#;
        assert!(KnapsackInstance::from_json(bad).is_err());
        let bad_bits = r#"{"d": 1, "phi": "1/1", "groups": [{"objects": [{"weight": "1/1", "box": [["0/1","1/1"]], "profits": null}], "choices": ["2"]}]}"#;
        assert!(KnapsackInstance::from_json(bad_bits).is_err());
    }
}
