//! Checks of the structural facts the constructions rely on, run against
//! built or realized instances.

use crate::construction::{build, build_multicriteria, m_explicit_multi, m_sequence_multi, ConstructionPlan, Family};
use crate::engine::{brute_force_pareto, merge_pareto};
use crate::error::{Error, Result};
use crate::model::{Group, KnapsackInstance, KnapsackObject, ProfitBox};
use crate::rational::Rational;
use crate::sampler::{sample_instance, SampleSeed};

/// Float slack allowed when comparing sums of realized profits.
pub const PROFIT_SLACK: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DoublingOutcome {
    /// Counts without and with the heavy object.
    Counted { without: usize, with: usize },
    /// The heavy object's profit does not exceed the sum of the others, so
    /// there is nothing to check.
    PremiseViolated,
}

impl DoublingOutcome {
    pub fn holds(&self) -> bool {
        matches!(self, DoublingOutcome::Counted { without, with } if *with == 2 * without)
    }
}

/// Copy step on `n_p` free objects (weights `2^i`, profits uniform on
/// `[0, 1/phi]`) plus one object of weight `2^(n_p + 1)` whose fixed profit
/// is the realized profit sum plus `q_offset`.
pub fn doubling_counts(n_p: u64, phi: &Rational, seed: SampleSeed, q_offset: f64) -> Result<DoublingOutcome> {
    if n_p < 1 {
        return Err(Error::Precondition("doubling check needs n_p >= 1".into()));
    }
    if *phi < Rational::one() {
        return Err(Error::Precondition(format!("phi must be >= 1, got {phi}")));
    }
    let small = ProfitBox::cube(1, Rational::zero(), phi.recip()?)?;
    let groups = (1..=n_p)
        .map(|i| Ok(Group::singleton(KnapsackObject::new(pow2(i)?, small.clone())?)))
        .collect::<Result<Vec<_>>>()?;
    let base = sample_instance(&KnapsackInstance::new(1, phi.clone(), groups)?, seed)?;

    let total: f64 = base.objects().filter_map(|o| o.realized_profits()).map(|p| p[0]).sum();
    let q = total + q_offset;
    if !(q > total) {
        return Ok(DoublingOutcome::PremiseViolated);
    }
    let heavy = KnapsackObject::new(pow2(n_p + 1)?, ProfitBox::point(&[q])?)?.with_profits(vec![q])?;
    let mut groups = base.groups().to_vec();
    groups.push(Group::singleton(heavy));
    let extended = KnapsackInstance::new(1, phi.clone(), groups)?;

    let without = brute_force_pareto(&base)?.count();
    let with = brute_force_pareto(&extended)?.count();
    Ok(DoublingOutcome::Counted { without, with })
}

/// True iff the heavy object exactly doubles the Pareto count.
pub fn verify_doubling(n_p: u64, phi: &Rational, seed: SampleSeed) -> Result<bool> {
    Ok(doubling_counts(n_p, phi, seed, 1.0)?.holds())
}

fn pow2(exp: u64) -> Result<Rational> {
    u32::try_from(exp)
        .map(Rational::pow2)
        .map_err(|_| Error::InvalidInput(format!("2^{exp} is too large")))
}

/// `1 + C(d, ceil(d/2))`, the size of the Hamming choice set.
pub fn hamming_set_size(d: u64) -> u64 {
    let k = d.div_ceil(2);
    1 + (0..k).fold(1u64, |acc, i| acc * (d - i) / (i + 1))
}

/// Builds, realizes and enumerates a multi-criteria plan by brute force.
/// Returns the Pareto count.
pub fn multi_pareto_count(plan: &ConstructionPlan, seed: SampleSeed) -> Result<usize> {
    let inst = sample_instance(&build_multicriteria(plan)?, seed)?;
    Ok(brute_force_pareto(&inst)?.count())
}

/// True iff every solution is Pareto optimal, i.e. the count equals
/// `(1 + C(d, ceil(d/2)))^n_q`.
pub fn verify_all_pareto_multi(plan: &ConstructionPlan, seed: SampleSeed) -> Result<bool> {
    let inst = sample_instance(&build_multicriteria(plan)?, seed)?;
    let count = brute_force_pareto(&inst)?.count() as u128;
    let expected = (hamming_set_size(plan.d) as u128).checked_pow(plan.n_q as u32);
    Ok(Some(count) == expected && count == inst.solution_count())
}

/// Per-realization copy identity for a bi-criteria plan: returns
/// `(full count, count of the n_p free objects alone)`; the first should be
/// `2^n_q` times the second.
pub fn bicriteria_copy_counts(plan: &ConstructionPlan, seed: SampleSeed) -> Result<(usize, usize)> {
    plan_kind(plan, Family::Bicriteria)?;
    let n_p = plan.n_p.unwrap_or(0) as usize;
    let inst = sample_instance(&build(plan)?, seed)?;
    let full = merge_pareto(&inst)?.count();
    let base = merge_pareto(&inst.prefix(n_p))?.count();
    Ok((full, base))
}

fn plan_kind(plan: &ConstructionPlan, kind: Family) -> Result<()> {
    if plan.kind != kind {
        return Err(Error::WrongPlanKind {
            expected: kind.to_string(),
            got: plan.kind.to_string(),
        });
    }
    Ok(())
}

/// For a realized bi-criteria instance: each copy group's profit total
/// exceeds all free profits plus all earlier copy groups' totals (up to
/// [`PROFIT_SLACK`]), and the same holds exactly for the rational interval
/// bounds.
pub fn check_interval_separation(plan: &ConstructionPlan, realized: &KnapsackInstance) -> Result<bool> {
    plan_kind(plan, Family::Bicriteria)?;
    let n_p = plan.n_p.unwrap_or(0) as usize;
    let width = plan.phi_eff.recip()?;
    let groups = realized.groups();

    let mut float_before: f64 = 0.0;
    for g in &groups[..n_p] {
        float_before += group_total(g, 0)?;
    }
    let mut exact_before = Rational::from(n_p as u64) * &width;
    for (i, g) in groups[n_p..].iter().enumerate() {
        let q = group_total(g, 0)?;
        if !(q > float_before - PROFIT_SLACK) {
            return Ok(false);
        }
        let (m, k) = (&plan.m[i], plan.k[i]);
        let q_lo = m - &(Rational::from(k) * &width);
        if q_lo < exact_before {
            return Ok(false);
        }
        float_before += q;
        exact_before = exact_before + m;
    }
    Ok(true)
}

/// Sum of coordinate `dim` over all objects of a group.
fn group_total(g: &Group, dim: usize) -> Result<f64> {
    g.objects()
        .iter()
        .map(|o| o.realized_profits().map(|p| p[dim]).ok_or(Error::NotSampled))
        .sum()
}

/// For a realized multi-criteria instance: in every group and every
/// non-zero choice, each selected virtual object's large coordinate totals
/// more than `m_i - k_i/phi` and each unselected coordinate totals at most
/// `d_hat * k_i / phi` (both up to [`PROFIT_SLACK`]).
pub fn check_multi_group_bounds(plan: &ConstructionPlan, realized: &KnapsackInstance) -> Result<bool> {
    plan_kind(plan, Family::Multicriteria)?;
    let d = plan.d as usize;
    let width = plan.phi_eff.recip()?;
    let d_hat = plan.d_hat.unwrap_or(1);
    for (i, g) in realized.groups().iter().enumerate() {
        let k = plan.k[i];
        let large_lo = (&plan.m[i] - &(Rational::from(k) * &width)).to_f64();
        let small_hi = (Rational::from(d_hat * k) * &width).to_f64();
        for c in 0..g.choices().len() {
            let sel = &g.choices()[c];
            if sel.count_ones() == 0 {
                continue;
            }
            let (_, totals) = g.choice_value(c, d)?;
            for (j, total) in totals.iter().enumerate() {
                let virtual_selected = sel.bits()[j * k as usize];
                if virtual_selected {
                    // the large coordinate alone, from the k copies of virtual object j
                    let own: f64 = g.objects()[j * k as usize..(j + 1) * k as usize]
                        .iter()
                        .map(|o| o.realized_profits().map(|p| p[j]).ok_or(Error::NotSampled))
                        .sum::<Result<f64>>()?;
                    if !(own > large_lo - PROFIT_SLACK) {
                        return Ok(false);
                    }
                } else if *total > small_hi + PROFIT_SLACK {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Every non-empty choice of every group is strictly heavier than the
/// heaviest choices of all earlier groups together (exact).
pub fn check_weight_separation(instance: &KnapsackInstance) -> bool {
    let mut before = Rational::zero();
    for g in instance.groups() {
        let weights: Vec<Rational> = g
            .choices()
            .iter()
            .map(|sel| {
                g.objects()
                    .iter()
                    .zip(sel.bits())
                    .filter(|(_, &b)| b)
                    .map(|(o, _)| o.weight())
                    .sum()
            })
            .collect();
        let lightest_nonzero = g
            .choices()
            .iter()
            .zip(&weights)
            .filter(|(sel, _)| sel.count_ones() > 0)
            .map(|(_, w)| w)
            .min();
        if let Some(w) = lightest_nonzero {
            if *w <= before {
                return false;
            }
        }
        before = before + weights.into_iter().max().unwrap_or_default();
    }
    true
}

/// Every box side has width exactly `1/phi` and lies in `[0, 1]`.
pub fn check_density(instance: &KnapsackInstance, phi: &Rational) -> Result<bool> {
    let width = phi.recip()?;
    Ok(instance.objects().all(|o| {
        o.profit_box()
            .intervals()
            .iter()
            .all(|iv| iv.width() == width && iv.within_unit())
    }))
}

/// `N <= n` and `N` matches the objects the builder actually produces.
pub fn check_budget(plan: &ConstructionPlan) -> Result<bool> {
    let built = build(plan)?.object_count() as u64;
    Ok(built == plan.total_objects && plan.total_objects <= plan.n)
}

/// Recurrence and closed form for the multi-criteria scales agree exactly
/// for `i = 0..=max_i`.
pub fn check_m_formula(d: u64, phi: &Rational, max_i: u32) -> Result<bool> {
    let seq = m_sequence_multi(d, phi, max_i as u64)?;
    if !m_explicit_multi(d, phi, 0)?.is_zero() {
        return Ok(false);
    }
    for (i, m) in (1..).zip(&seq) {
        if *m != m_explicit_multi(d, phi, i)? {
            return Ok(false);
        }
    }
    Ok(true)
}
