//! Exact Pareto sets over the product solution space.
//!
//! Two independent routes: [`brute_force_pareto`] evaluates every solution
//! and filters once, [`merge_pareto`] folds groups in left to right and
//! discards dominated partial solutions after each fold. Both keep every
//! solution whose vector is non-dominated, duplicates included.
//!
//! Internally weights are scaled to integers over the common denominator of
//! all object weights, so dominance stays exact while comparisons are cheap.
//! Profits of a solution are always accumulated group by group in instance
//! order, identically in both routes.

use std::ops::Add;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::model::{nondominated_indices, KnapsackInstance, ObjectiveVector, Solution};
use crate::rational::Rational;

pub const DEFAULT_SOLUTION_CAP: u128 = 1 << 26;
pub const DEFAULT_FRONT_CAP: usize = 1 << 26;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EngineConfig {
    /// Largest solution space [`brute_force_pareto`] will enumerate.
    pub solution_cap: u128,
    /// Largest candidate set a single merge step may produce.
    pub front_cap: usize,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            solution_cap: DEFAULT_SOLUTION_CAP,
            front_cap: DEFAULT_FRONT_CAP,
        }
    }
}

/// Pareto-optimal solutions in lexicographic order of their choice indices,
/// with their objective vectors.
#[derive(Clone, Debug, PartialEq)]
pub struct ParetoSet {
    pub entries: Vec<(Solution, ObjectiveVector)>,
}

impl ParetoSet {
    pub fn count(&self) -> usize {
        self.entries.len()
    }

    pub fn solutions(&self) -> impl Iterator<Item = &Solution> {
        self.entries.iter().map(|(s, _)| s)
    }

    pub fn same_solutions(&self, other: &ParetoSet) -> bool {
        self.solutions().eq(other.solutions())
    }
}

/// Lexicographic odometer over per-group choice indices.
pub struct SolutionIter {
    radices: Vec<usize>,
    next: Option<Vec<usize>>,
}

impl Iterator for SolutionIter {
    type Item = Solution;

    fn next(&mut self) -> Option<Solution> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        let mut pos = succ.len();
        loop {
            if pos == 0 {
                break;
            }
            pos -= 1;
            succ[pos] += 1;
            if succ[pos] < self.radices[pos] {
                self.next = Some(succ);
                break;
            }
            succ[pos] = 0;
        }
        Some(Solution(current))
    }
}

/// Every feasible solution, lexicographic over group choice indices.
pub fn enumerate_solutions(instance: &KnapsackInstance, cap: u128) -> Result<SolutionIter> {
    let size = instance.solution_count();
    if size > cap {
        return Err(Error::SolutionCapExceeded { size, cap });
    }
    let radices: Vec<usize> = instance.groups().iter().map(|g| g.choices().len()).collect();
    Ok(SolutionIter {
        next: Some(vec![0; radices.len()]),
        radices,
    })
}

trait ScaledWeight: Clone + Ord + Zero + Add<Output = Self> + Send + Sync {
    fn from_big(v: &BigInt) -> Option<Self>;
    fn to_big(&self) -> BigInt;
}

impl ScaledWeight for i128 {
    fn from_big(v: &BigInt) -> Option<Self> {
        v.to_i128()
    }
    fn to_big(&self) -> BigInt {
        BigInt::from(*self)
    }
}

impl ScaledWeight for BigInt {
    fn from_big(v: &BigInt) -> Option<Self> {
        Some(v.clone())
    }
    fn to_big(&self) -> BigInt {
        self.clone()
    }
}

/// Per-group choice totals with weights scaled by `denom`.
struct Prepared<W> {
    d: usize,
    denom: BigInt,
    /// `groups[g][c]` = (scaled weight, profit totals) of choice `c`.
    groups: Vec<Vec<(W, Vec<f64>)>>,
}

impl<W: ScaledWeight> Prepared<W> {
    fn value(&self, weight: &W, profits: &[f64]) -> ObjectiveVector {
        ObjectiveVector {
            weight: Rational::new(weight.to_big(), self.denom.clone())
                .expect("common denominator is positive"),
            profits: profits.to_vec(),
        }
    }
}

enum AnyPrepared {
    Small(Prepared<i128>),
    Big(Prepared<BigInt>),
}

fn prepare(instance: &KnapsackInstance) -> Result<AnyPrepared> {
    if !instance.is_sampled() {
        return Err(Error::NotSampled);
    }
    let d = instance.d();
    let denom = Rational::lcm_denom(instance.objects().map(|o| o.weight()));
    let scale = Rational::from_integer(denom.clone());
    let mut groups = Vec::with_capacity(instance.groups().len());
    let mut max_total = BigInt::zero();
    for g in instance.groups() {
        let mut choices = Vec::with_capacity(g.choices().len());
        for c in 0..g.choices().len() {
            let (w, p) = g.choice_value(c, d)?;
            let scaled = (w * &scale).numer().clone();
            choices.push((scaled, p));
        }
        max_total += choices.iter().map(|(w, _)| w).max().cloned().unwrap_or_default();
        groups.push(choices);
    }
    let convert = |groups: Vec<Vec<(BigInt, Vec<f64>)>>| -> Option<Vec<Vec<(i128, Vec<f64>)>>> {
        groups
            .into_iter()
            .map(|g| g.into_iter().map(|(w, p)| Some((i128::from_big(&w)?, p))).collect())
            .collect()
    };
    if max_total.to_i128().is_some() {
        if let Some(small) = convert(groups.clone()) {
            return Ok(AnyPrepared::Small(Prepared {
                d,
                denom,
                groups: small,
            }));
        }
    }
    Ok(AnyPrepared::Big(Prepared { d, denom, groups }))
}

pub fn brute_force_pareto(instance: &KnapsackInstance) -> Result<ParetoSet> {
    brute_force_pareto_with(instance, &EngineConfig::default())
}

pub fn brute_force_pareto_with(instance: &KnapsackInstance, config: &EngineConfig) -> Result<ParetoSet> {
    let solutions: Vec<Solution> = enumerate_solutions(instance, config.solution_cap)?.collect();
    match prepare(instance)? {
        AnyPrepared::Small(p) => brute_force_prepared(&p, solutions),
        AnyPrepared::Big(p) => brute_force_prepared(&p, solutions),
    }
}

fn brute_force_prepared<W: ScaledWeight>(p: &Prepared<W>, solutions: Vec<Solution>) -> Result<ParetoSet> {
    let mut weights = Vec::with_capacity(solutions.len());
    let mut profits = Vec::with_capacity(solutions.len() * p.d);
    for s in &solutions {
        let mut w = W::zero();
        let mut acc = vec![0.0; p.d];
        for (g, &c) in p.groups.iter().zip(s.choices()) {
            let (cw, cp) = &g[c];
            w = w + cw.clone();
            for (a, x) in acc.iter_mut().zip(cp) {
                *a += x;
            }
        }
        weights.push(w);
        profits.extend_from_slice(&acc);
    }
    let keep = nondominated_indices(&weights, &profits, p.d);
    let entries = keep
        .into_iter()
        .map(|i| {
            let v = p.value(&weights[i], &profits[i * p.d..(i + 1) * p.d]);
            (solutions[i].clone(), v)
        })
        .collect();
    Ok(ParetoSet { entries })
}

pub fn merge_pareto(instance: &KnapsackInstance) -> Result<ParetoSet> {
    merge_pareto_with(instance, &EngineConfig::default())
}

pub fn merge_pareto_with(instance: &KnapsackInstance, config: &EngineConfig) -> Result<ParetoSet> {
    match prepare(instance)? {
        AnyPrepared::Small(p) => merge_prepared(&p, config),
        AnyPrepared::Big(p) => merge_prepared(&p, config),
    }
}

/// Sizes of the front after each fold, for inspection.
pub fn merge_front_sizes(instance: &KnapsackInstance) -> Result<Vec<usize>> {
    let mut sizes = Vec::new();
    let config = EngineConfig::default();
    match prepare(instance)? {
        AnyPrepared::Small(p) => {
            merge_core(&p, &config, |n| sizes.push(n))?;
        }
        AnyPrepared::Big(p) => {
            merge_core(&p, &config, |n| sizes.push(n))?;
        }
    }
    Ok(sizes)
}

fn merge_prepared<W: ScaledWeight>(p: &Prepared<W>, config: &EngineConfig) -> Result<ParetoSet> {
    let (layers, weights, profits) = merge_core(p, config, |_| {})?;
    let d = p.d;
    let mut entries: Vec<(Solution, ObjectiveVector)> = (0..weights.len())
        .map(|i| {
            let mut choices = vec![0; layers.len()];
            let mut idx = i;
            for (g, layer) in layers.iter().enumerate().rev() {
                let (parent, choice) = layer[idx];
                choices[g] = choice;
                idx = parent;
            }
            (Solution(choices), p.value(&weights[i], &profits[i * d..(i + 1) * d]))
        })
        .collect();
    entries.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(ParetoSet { entries })
}

type Layers = Vec<Vec<(usize, usize)>>;

/// Runs the fold; `layers[g][i]` is (index into front before group `g`,
/// choice in group `g`) for entry `i` of the front after group `g`.
fn merge_core<W: ScaledWeight>(
    p: &Prepared<W>,
    config: &EngineConfig,
    mut on_front: impl FnMut(usize),
) -> Result<(Layers, Vec<W>, Vec<f64>)> {
    let d = p.d;
    let mut weights = vec![W::zero()];
    let mut profits = vec![0.0; d];
    let mut layers = Vec::with_capacity(p.groups.len());
    for group in &p.groups {
        let size = weights.len().saturating_mul(group.len());
        if size > config.front_cap {
            return Err(Error::FrontCapExceeded {
                size,
                cap: config.front_cap,
            });
        }
        let mut cand_w = Vec::with_capacity(size);
        let mut cand_p = Vec::with_capacity(size * d);
        let mut origin = Vec::with_capacity(size);
        for (i, w) in weights.iter().enumerate() {
            let base = &profits[i * d..(i + 1) * d];
            for (c, (cw, cp)) in group.iter().enumerate() {
                cand_w.push(w.clone() + cw.clone());
                cand_p.extend(base.iter().zip(cp).map(|(a, b)| a + b));
                origin.push((i, c));
            }
        }
        let keep = nondominated_indices(&cand_w, &cand_p, d);
        let mut next_p = Vec::with_capacity(keep.len() * d);
        for &k in &keep {
            next_p.extend_from_slice(&cand_p[k * d..(k + 1) * d]);
        }
        layers.push(keep.iter().map(|&k| origin[k]).collect());
        weights = keep.iter().map(|&k| cand_w[k].clone()).collect();
        profits = next_p;
        on_front(weights.len());
    }
    Ok((layers, weights, profits))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Group, KnapsackObject, ProfitBox};

    fn sampled(weights: &[i64], profits: &[f64]) -> KnapsackInstance {
        let groups = weights
            .iter()
            .zip(profits)
            .map(|(&w, &p)| {
                Group::singleton(
                    KnapsackObject::new(Rational::from(w), ProfitBox::point(&[p]).unwrap())
                        .unwrap()
                        .with_profits(vec![p])
                        .unwrap(),
                )
            })
            .collect();
        KnapsackInstance::new(1, Rational::one(), groups).unwrap()
    }

    #[test]
    fn odometer_order_and_count() {
        let inst = sampled(&[2, 4], &[0.1, 0.2]);
        let all: Vec<_> = enumerate_solutions(&inst, 1 << 26).unwrap().collect();
        assert_eq!(
            all,
            vec![Solution(vec![0, 0]), Solution(vec![0, 1]), Solution(vec![1, 0]), Solution(vec![1, 1])]
        );
        assert!(matches!(
            enumerate_solutions(&inst, 3),
            Err(Error::SolutionCapExceeded { size: 4, cap: 3 })
        ));
    }

    #[test]
    fn empty_instance_has_one_solution() {
        let inst = KnapsackInstance::new(1, Rational::one(), vec![]).unwrap();
        assert_eq!(enumerate_solutions(&inst, 1).unwrap().count(), 1);
        assert_eq!(brute_force_pareto(&inst).unwrap().count(), 1);
        assert_eq!(merge_pareto(&inst).unwrap().count(), 1);
    }

    #[test]
    fn single_object() {
        let inst = sampled(&[2], &[0.4]);
        assert_eq!(brute_force_pareto(&inst).unwrap().count(), 2);
        assert_eq!(merge_pareto(&inst).unwrap().count(), 2);
    }

    #[test]
    fn two_objects_both_orders() {
        // {a2} is Pareto iff p2 > p1
        let inst = sampled(&[2, 4], &[0.3, 0.6]);
        assert_eq!(brute_force_pareto(&inst).unwrap().count(), 4);
        let inst = sampled(&[2, 4], &[0.6, 0.3]);
        let set = brute_force_pareto(&inst).unwrap();
        assert_eq!(set.count(), 3);
        assert!(set.same_solutions(&merge_pareto(&inst).unwrap()));
    }

    #[test]
    fn values_carry_exact_weights() {
        let inst = sampled(&[2, 4], &[0.3, 0.6]);
        let set = merge_pareto(&inst).unwrap();
        let (s, v) = set.entries.last().unwrap();
        assert_eq!(s, &Solution(vec![1, 1]));
        assert_eq!(v.weight, Rational::from(6));
        assert_eq!(v.profits, vec![0.3 + 0.6]);
    }

    #[test]
    fn unsampled_is_rejected() {
        let inst = crate::construction::build_uniform_baseline(3).unwrap();
        assert!(matches!(merge_pareto(&inst), Err(Error::NotSampled)));
        assert!(matches!(brute_force_pareto(&inst), Err(Error::NotSampled)));
    }

    #[test]
    fn front_cap() {
        let inst = sampled(&[2, 4, 8], &[0.1, 0.2, 0.3]);
        let config = EngineConfig {
            solution_cap: 1 << 26,
            front_cap: 3,
        };
        assert!(matches!(
            merge_pareto_with(&inst, &config),
            Err(Error::FrontCapExceeded { .. })
        ));
    }

    #[test]
    fn huge_weights_use_big_path() {
        let groups = (0..4)
            .map(|i| {
                let w = Rational::pow2(125 + i);
                Group::singleton(
                    KnapsackObject::new(w, ProfitBox::point(&[0.25 * (i + 1) as f64]).unwrap())
                        .unwrap()
                        .with_profits(vec![0.25 * (i + 1) as f64])
                        .unwrap(),
                )
            })
            .collect();
        let inst = KnapsackInstance::new(1, Rational::one(), groups).unwrap();
        assert!(matches!(prepare(&inst).unwrap(), AnyPrepared::Big(_)));
        let a = brute_force_pareto(&inst).unwrap();
        assert!(a.count() >= 5);
        assert!(a.same_solutions(&merge_pareto(&inst).unwrap()));
    }
}
