use crate::construction::{ConstructionPlan, Family};
use crate::error::{Error, Result};
use crate::model::{Group, Interval, KnapsackInstance, KnapsackObject, ProfitBox, Selection};
use crate::rational::Rational;

/// `n` free objects with weights `2^1..2^n` and profits uniform on `[0, 1]`.
pub fn build_uniform_baseline(n: u64) -> Result<KnapsackInstance> {
    if n < 1 {
        return Err(Error::Precondition("baseline needs n >= 1".into()));
    }
    let unit = ProfitBox::cube(1, Rational::zero(), Rational::one())?;
    let groups = (1..=n)
        .map(|i| Ok(Group::singleton(KnapsackObject::new(pow2(i)?, unit.clone())?)))
        .collect::<Result<Vec<_>>>()?;
    KnapsackInstance::new(1, Rational::one(), groups)
}

fn pow2(exp: u64) -> Result<Rational> {
    u32::try_from(exp)
        .map(Rational::pow2)
        .map_err(|_| Error::InvalidInput(format!("2^{exp} is too large")))
}

/// Split interval `(m/k - 1/phi, m/k]`, sampled as closed.
fn split_interval(m: &Rational, k: u64, width: &Rational) -> Result<Interval> {
    let hi = m / &Rational::from(k);
    Interval::new(&hi - width, hi)
}

/// Copy/split construction with one profit: `n_p` free objects with profits
/// in `[0, 1/phi]`, then for each copy step `i` a group of `k_i` objects
/// that are taken all together or not at all.
pub fn build_bicriteria(plan: &ConstructionPlan) -> Result<KnapsackInstance> {
    plan.expect(Family::Bicriteria)?;
    let n_p = plan
        .n_p
        .ok_or_else(|| Error::InvalidInput("bi-criteria plan without n_p".into()))?;
    let width = plan.phi_eff.recip()?;
    let small = ProfitBox::cube(1, Rational::zero(), width.clone())?;

    let mut groups = Vec::with_capacity((n_p + plan.n_q) as usize);
    for i in 1..=n_p {
        groups.push(Group::singleton(KnapsackObject::new(pow2(i)?, small.clone())?));
    }
    for (i, (m, &k)) in (1..).zip(plan.m.iter().zip(&plan.k)) {
        let weight = pow2(n_p + i)? / Rational::from(k);
        let b = ProfitBox::new(vec![split_interval(m, k, &width)?])?;
        let objects = (0..k)
            .map(|_| KnapsackObject::new(weight.clone(), b.clone()))
            .collect::<Result<Vec<_>>>()?;
        groups.push(Group::all_or_none(objects));
    }
    KnapsackInstance::new(1, plan.phi_eff.clone(), groups)
}

/// All `x` in `{0,1}^d` with Hamming weight 0 or `d_hat`: the zero vector
/// first, then the `d_hat`-subsets in lexicographic order of their indices.
pub fn hamming_choices(d: usize, d_hat: usize) -> Vec<Selection> {
    let mut out = vec![Selection::zeros(d)];
    if d_hat == 0 || d_hat > d {
        return out;
    }
    let mut idx: Vec<usize> = (0..d_hat).collect();
    loop {
        let mut bits = vec![false; d];
        for &i in &idx {
            bits[i] = true;
        }
        out.push(Selection::new(bits));
        // next combination
        let Some(pos) = (0..d_hat).rev().find(|&p| idx[p] < d - d_hat + p) else {
            return out;
        };
        idx[pos] += 1;
        for p in pos + 1..d_hat {
            idx[p] = idx[p - 1] + 1;
        }
    }
}

/// Multi-criteria construction: group `i` holds `d * k_i` objects, `k_i`
/// all-or-none copies for each of `d` virtual objects. Virtual object `j`
/// is large in profit `j` and small elsewhere. Choices are the Hamming
/// vectors, each virtual object expanded to its `k_i` copies.
pub fn build_multicriteria(plan: &ConstructionPlan) -> Result<KnapsackInstance> {
    plan.expect(Family::Multicriteria)?;
    let d = plan.d as usize;
    let d_hat = plan
        .d_hat
        .ok_or_else(|| Error::InvalidInput("multi-criteria plan without d_hat".into()))?;
    let width = plan.phi_eff.recip()?;
    let small = Interval::new(Rational::zero(), width.clone())?;
    let virtual_choices = hamming_choices(d, d_hat as usize);

    let mut groups = Vec::with_capacity(plan.n_q as usize);
    for (i, (m, &k)) in (1..).zip(plan.m.iter().zip(&plan.k)) {
        let weight = pow2(i)? / Rational::from(k * d_hat);
        let large = split_interval(m, k, &width)?;
        let mut objects = Vec::with_capacity(d * k as usize);
        for j in 0..d {
            let mut intervals = vec![small.clone(); d];
            intervals[j] = large.clone();
            let b = ProfitBox::new(intervals)?;
            for _ in 0..k {
                objects.push(KnapsackObject::new(weight.clone(), b.clone())?);
            }
        }
        let choices = virtual_choices
            .iter()
            .map(|x| {
                Selection::new(
                    x.bits()
                        .iter()
                        .flat_map(|&b| std::iter::repeat_n(b, k as usize))
                        .collect(),
                )
            })
            .collect();
        groups.push(Group::new(objects, choices)?);
    }
    KnapsackInstance::new(d, plan.phi_eff.clone(), groups)
}

pub fn build(plan: &ConstructionPlan) -> Result<KnapsackInstance> {
    match plan.kind {
        Family::Baseline => build_uniform_baseline(plan.n),
        Family::Bicriteria => build_bicriteria(plan),
        Family::Multicriteria => build_multicriteria(plan),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construction::{plan_bicriteria, plan_multicriteria};

    fn r(s: &str) -> Rational {
        s.parse().unwrap()
    }

    #[test]
    fn baseline_weights() {
        let inst = build_uniform_baseline(1).unwrap();
        assert_eq!(inst.object_count(), 1);
        assert_eq!(*inst.objects().next().unwrap().weight(), r("2"));
        let inst = build_uniform_baseline(3).unwrap();
        let w: Vec<_> = inst.objects().map(|o| o.weight().clone()).collect();
        assert_eq!(w, vec![r("2"), r("4"), r("8")]);
        assert!(inst
            .objects()
            .all(|o| o.profit_box().intervals()[0] == Interval::new(r("0"), r("1")).unwrap()));
        assert!(build_uniform_baseline(0).is_err());
    }

    #[test]
    fn bicriteria_10_3() {
        let plan = plan_bicriteria(10, &r("3")).unwrap();
        let inst = build_bicriteria(&plan).unwrap();
        assert_eq!(inst.groups().len(), 4);
        let split = &inst.groups()[3];
        assert_eq!(split.len(), 2);
        for o in split.objects() {
            assert_eq!(*o.weight(), r("8"));
            assert_eq!(o.profit_box().intervals()[0], Interval::new(r("2/3"), r("1")).unwrap());
        }
        assert_eq!(split.choices().len(), 2);
        assert_eq!(inst.solution_count(), 16);
        assert!(build_multicriteria(&plan).is_err());
    }

    #[test]
    fn hamming_sets() {
        let s: Vec<String> = hamming_choices(2, 1).iter().map(|s| s.to_string()).collect();
        assert_eq!(s, vec!["00", "10", "01"]);
        let s: Vec<String> = hamming_choices(4, 2).iter().map(|s| s.to_string()).collect();
        assert_eq!(s, vec!["0000", "1100", "1010", "1001", "0110", "0101", "0011"]);
        assert_eq!(hamming_choices(3, 2).len(), 4);
        assert_eq!(hamming_choices(5, 3).len(), 11);
    }

    #[test]
    fn multicriteria_32_2_4() {
        let plan = plan_multicriteria(32, 2, &r("4")).unwrap();
        let inst = build_multicriteria(&plan).unwrap();
        assert_eq!(inst.groups().len(), 1);
        let g = &inst.groups()[0];
        assert_eq!(g.len(), 2);
        assert_eq!(*g.objects()[0].weight(), r("2"));
        let b0 = g.objects()[0].profit_box().intervals();
        let b1 = g.objects()[1].profit_box().intervals();
        assert_eq!(b0[0], Interval::new(r("3/4"), r("1")).unwrap());
        assert_eq!(b0[1], Interval::new(r("0"), r("1/4")).unwrap());
        assert_eq!(b1[0], Interval::new(r("0"), r("1/4")).unwrap());
        assert_eq!(b1[1], Interval::new(r("3/4"), r("1")).unwrap());
        assert_eq!(inst.solution_count(), 3);
        assert!(build_bicriteria(&plan).is_err());
    }

    #[test]
    fn multicriteria_split_choices_expand() {
        let plan = ConstructionPlan::multicriteria_fixed(2, &r("4"), 2).unwrap();
        assert_eq!(plan.m, vec![r("1"), r("5")]);
        assert_eq!(plan.k, vec![1, 5]);
        let inst = build_multicriteria(&plan).unwrap();
        let g = &inst.groups()[1];
        assert_eq!(g.len(), 10);
        let s: Vec<String> = g.choices().iter().map(|s| s.to_string()).collect();
        assert_eq!(s, vec!["0000000000", "1111100000", "0000011111"]);
        // weight 2^2 / (5 * 1)
        assert_eq!(*g.objects()[0].weight(), r("4/5"));
    }
}
