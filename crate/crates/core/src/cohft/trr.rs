//! Genus-zero descendants from the primary potential.
//!
//! Each correlator with some `d > 0` is expanded with
//!
//! `⟨τ_{d₁}(α₁)τ_{d₂}(α₂)τ_{d₃}(α₃)D⟩₀ =
//!   Σ_{D'⊔D''=D} ⟨τ_{d₁−1}(α₁)τ₀(λ)D'⟩₀ η^{λσ} ⟨τ₀(σ)τ_{d₂}(α₂)τ_{d₃}(α₃)D''⟩₀`
//!
//! taking the first descendant insertion as `τ_{d₁}` and the first two other
//! insertions as companions. Each step lowers `Σd` by one, so the memoised
//! recursion terminates at primary correlators, which are Taylor
//! coefficients of `F`.

use std::collections::HashMap;

use num_traits::Zero;

use super::potential::FrobeniusPotential;
use super::table::{dilaton_reduce, dual, is_tame, CorrelatorTable, Insertion, TableCaps};
use crate::error::{Error, Result};
use crate::rational::Rational;

struct Reconstructor<'a> {
    f: &'a FrobeniusPotential,
    memo: HashMap<Vec<Insertion>, Rational>,
}

impl Reconstructor<'_> {
    fn value(&mut self, ins: &[Insertion]) -> Result<Rational> {
        let k = ins.len();
        if k < 3 || !is_tame(0, ins) {
            return Ok(Rational::zero());
        }
        if let Some(v) = self.memo.get(ins) {
            return Ok(v.clone());
        }
        let v = match ins.iter().position(|i| i.d > 0) {
            None => {
                let mus: Vec<u32> = ins.iter().map(|i| i.mu).collect();
                self.f.correlator(&mus)?
            }
            Some(i) => {
                let others: Vec<usize> = (0..k).filter(|&x| x != i).collect();
                self.split(ins, i, others[0], others[1])?
            }
        };
        self.memo.insert(ins.to_vec(), v.clone());
        Ok(v)
    }

    fn split(&mut self, ins: &[Insertion], i: usize, j: usize, l: usize) -> Result<Rational> {
        let n = self.f.dimension();
        let head = Insertion::new(ins[i].d - 1, ins[i].mu);
        let rest: Vec<Insertion> = (0..ins.len())
            .filter(|&x| x != i && x != j && x != l)
            .map(|x| ins[x])
            .collect();
        let mut total = Rational::zero();
        for mask in 0u32..(1 << rest.len()) {
            let mut left = vec![head];
            let mut right = vec![ins[j], ins[l]];
            for (b, &r) in rest.iter().enumerate() {
                if mask & (1 << b) != 0 {
                    left.push(r);
                } else {
                    right.push(r);
                }
            }
            if left.len() + 1 < 3 {
                continue;
            }
            for lambda in 1..=n {
                let mut a = left.clone();
                a.push(Insertion::new(0, lambda));
                a.sort_unstable();
                let va = self.value(&a)?;
                if va.is_zero() {
                    continue;
                }
                let mut b = right.clone();
                b.push(Insertion::new(0, dual(n, lambda)));
                b.sort_unstable();
                total += va * self.value(&b)?;
            }
        }
        Ok(total)
    }
}

/// Every sorted multiset of `k` insertions in dimension `n` with `Σd ≤ max_level`.
pub fn insertion_multisets(n: u32, k: usize, max_level: u32) -> Vec<Vec<Insertion>> {
    let mut types = Vec::new();
    for d in 0..=max_level {
        for mu in 1..=n {
            types.push(Insertion::new(d, mu));
        }
    }
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(
        types: &[Insertion],
        start: usize,
        k: usize,
        budget: u32,
        cur: &mut Vec<Insertion>,
        out: &mut Vec<Vec<Insertion>>,
    ) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for t in start..types.len() {
            if types[t].d > budget {
                break;
            }
            cur.push(types[t]);
            rec(types, t, k, budget - types[t].d, cur, out);
            cur.pop();
        }
    }
    rec(&types, 0, k, max_level, &mut cur, &mut out);
    out
}

/// Genus-zero table of every tame correlator within `caps` (the genus cap is
/// forced to 0: higher genera are never reconstructed).
pub fn reconstruct_descendants(f: &FrobeniusPotential, caps: TableCaps) -> Result<CorrelatorTable> {
    if caps.max_points > f.order() {
        return Err(Error::CapInsufficient(format!(
            "{}-point correlators need the potential to order {} but it is known to order {}",
            caps.max_points,
            caps.max_points,
            f.order()
        )));
    }
    let caps = TableCaps {
        max_genus: 0,
        ..caps
    };
    let mut table = CorrelatorTable::new(f.dimension(), caps);
    let mut rec = Reconstructor {
        f,
        memo: HashMap::new(),
    };
    for k in 3..=caps.max_points as usize {
        let level = caps.max_level.min(k as u32 - 3);
        for ins in insertion_multisets(f.dimension(), k, level) {
            let v = rec.value(&ins)?;
            if !v.is_zero() {
                table.insert(0, ins, v)?;
            }
        }
    }
    Ok(table)
}

/// Right-hand side of the genus-zero TRR evaluated from table lookups, with
/// `ins[i]` the descendant being lowered and `ins[j]`, `ins[l]` the companions.
pub fn trr_rhs(
    table: &CorrelatorTable,
    ins: &[Insertion],
    i: usize,
    j: usize,
    l: usize,
) -> Result<Rational> {
    let n = table.dimension();
    if ins[i].d == 0 || i == j || i == l || j == l {
        return Err(Error::InvalidArgument("bad TRR choice".into()));
    }
    let head = Insertion::new(ins[i].d - 1, ins[i].mu);
    let rest: Vec<Insertion> = (0..ins.len())
        .filter(|&x| x != i && x != j && x != l)
        .map(|x| ins[x])
        .collect();
    let mut total = Rational::zero();
    for mask in 0u32..(1 << rest.len()) {
        let mut left = vec![head];
        let mut right = vec![ins[j], ins[l]];
        for (b, &r) in rest.iter().enumerate() {
            if mask & (1 << b) != 0 {
                left.push(r);
            } else {
                right.push(r);
            }
        }
        for lambda in 1..=n {
            let mut a = left.clone();
            a.push(Insertion::new(0, lambda));
            let mut b = right.clone();
            b.push(Insertion::new(0, dual(n, lambda)));
            total += table.get(0, &a)? * table.get(0, &b)?;
        }
    }
    Ok(total)
}

/// A correlator at which an invariant fails.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub insertions: Vec<Insertion>,
    pub choice: Option<(usize, usize, usize)>,
    pub expected: Rational,
    pub found: Rational,
}

/// Check TRR for every genus-0 tame key within the table caps and every
/// choice of lowered insertion and (unordered) companion pair.
pub fn check_trr(table: &CorrelatorTable) -> Result<Vec<Violation>> {
    let caps = table.caps();
    let mut bad = Vec::new();
    for k in 3..=caps.max_points as usize {
        for ins in insertion_multisets(table.dimension(), k, caps.max_level.min(k as u32 - 3)) {
            let lhs = table.get_sorted(0, &ins)?;
            for i in 0..k {
                if ins[i].d == 0 || (i > 0 && ins[i] == ins[i - 1]) {
                    continue;
                }
                for j in 0..k {
                    for l in j + 1..k {
                        if j == i || l == i {
                            continue;
                        }
                        let rhs = trr_rhs(table, &ins, i, j, l)?;
                        if rhs != lhs {
                            bad.push(Violation {
                                insertions: ins.clone(),
                                choice: Some((i, j, l)),
                                expected: lhs.clone(),
                                found: rhs,
                            });
                        }
                    }
                }
            }
        }
    }
    Ok(bad)
}

/// Check `⟨τ₁(1)X⟩_g = (2g−2+k)⟨X⟩_g` on every key containing `τ₁(1)`.
pub fn check_dilaton(table: &CorrelatorTable) -> Result<Vec<Violation>> {
    let caps = table.caps();
    let mut bad = Vec::new();
    for g in 0..=caps.max_genus {
        let min_k = if g == 0 { 3 } else { 1 };
        for k in min_k..=caps.max_points as usize {
            for ins in insertion_multisets(table.dimension(), k, caps.max_level) {
                if !ins.contains(&Insertion::new(1, 1)) || !is_tame(g, &ins) {
                    continue;
                }
                let (factor, rest) = dilaton_reduce(g, &ins)?;
                let lhs = table.get_sorted(g, &ins)?;
                let rhs = factor * table.get(g, &rest)?;
                if lhs != rhs {
                    bad.push(Violation {
                        insertions: ins,
                        choice: None,
                        expected: rhs,
                        found: lhs,
                    });
                }
            }
        }
    }
    Ok(bad)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn fixture() -> FrobeniusPotential {
        FrobeniusPotential::two_dimensional(&[rat(2, 3), rat(-5, 7), rat(11, 2), rat(1, 9)])
            .unwrap()
    }

    #[test]
    fn primaries_are_taylor_coefficients() {
        let f = fixture();
        let t = reconstruct_descendants(
            &f,
            TableCaps {
                max_genus: 0,
                max_points: 6,
                max_level: 3,
            },
        )
        .unwrap();
        let p =
            |v: &[u32]| -> Vec<Insertion> { v.iter().map(|&mu| Insertion::new(0, mu)).collect() };
        assert_eq!(t.get(0, &p(&[1, 1, 2])).unwrap(), int(1));
        assert_eq!(t.get(0, &p(&[2; 6])).unwrap(), rat(1, 9));
        // ⟨τ₁(1)τ₀(2)³⟩ = ⟨τ₀(2)³⟩ by the dilaton equation
        let mut ins = p(&[2, 2, 2]);
        ins.push(Insertion::new(1, 1));
        assert_eq!(t.get(0, &ins).unwrap(), rat(2, 3));
        assert!(check_trr(&t).unwrap().is_empty());
        assert!(check_dilaton(&t).unwrap().is_empty());
    }

    #[test]
    fn caps_beyond_jet_order_are_reported() {
        let f = fixture();
        let caps = TableCaps {
            max_genus: 0,
            max_points: 7,
            max_level: 1,
        };
        assert!(matches!(
            reconstruct_descendants(&f, caps),
            Err(Error::CapInsufficient(_))
        ));
    }

    #[test]
    fn multiset_enumeration_counts() {
        // n = 2, k = 3, level 0: multisets of size 3 from 2 types = 4
        assert_eq!(insertion_multisets(2, 3, 0).len(), 4);
        // level ≤ 1 adds τ₁(1), τ₁(2) once: 4 + 2·3 = 10
        assert_eq!(insertion_multisets(2, 3, 1).len(), 10);
    }
}
