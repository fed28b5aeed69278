use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::rational::{int, Rational};
use crate::series::{Caps, Monomial, TruncatedSeries, Var};

/// `τ_d(e_μ)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Insertion {
    pub d: u32,
    pub mu: u32,
}

impl Insertion {
    pub const fn new(d: u32, mu: u32) -> Self {
        Insertion { d, mu }
    }

    pub fn var(self) -> Var {
        Var::new(self.d, self.mu)
    }
}

impl fmt::Display for Insertion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "tau_{}({})", self.d, self.mu)
    }
}

/// Limits of what a table knows. Lookups beyond them are errors rather
/// than silent zeros; lookups of unstable or non-tame correlators are zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TableCaps {
    pub max_genus: u32,
    pub max_points: u32,
    /// Bound on `Σd` across the insertions.
    pub max_level: u32,
}

/// Correlators `⟨τ_{d₁}(μ₁)⋯τ_{d_k}(μ_k)⟩_g` over the anti-diagonal metric
/// `η_{αβ} = δ_{α+β,n+1}` with unit `e₁`. Keys are sorted insertion lists.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorrelatorTable {
    n: u32,
    caps: TableCaps,
    entries: BTreeMap<(u32, Vec<Insertion>), Rational>,
}

/// `η_{αβ}` (equivalently `η^{αβ}`; the anti-diagonal is its own inverse).
pub fn eta(n: u32, a: u32, b: u32) -> Rational {
    if a + b == n + 1 {
        Rational::one()
    } else {
        Rational::zero()
    }
}

/// The partner index `n + 1 − μ`.
pub fn dual(n: u32, mu: u32) -> u32 {
    n + 1 - mu
}

pub(crate) fn is_stable(g: u32, k: usize) -> bool {
    2 * g as i64 - 2 + k as i64 > 0
}

pub(crate) fn is_tame(g: u32, ins: &[Insertion]) -> bool {
    let level: i64 = ins.iter().map(|i| i.d as i64).sum();
    level <= 3 * g as i64 - 3 + ins.len() as i64
}

impl CorrelatorTable {
    pub fn new(n: u32, caps: TableCaps) -> Self {
        CorrelatorTable {
            n,
            caps,
            entries: BTreeMap::new(),
        }
    }

    pub fn dimension(&self) -> u32 {
        self.n
    }

    pub fn caps(&self) -> TableCaps {
        self.caps
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Nonzero entries in key order.
    pub fn entries(&self) -> impl Iterator<Item = (u32, &[Insertion], &Rational)> {
        self.entries.iter().map(|((g, k), v)| (*g, k.as_slice(), v))
    }

    fn validate(&self, g: u32, ins: &[Insertion]) -> Result<()> {
        for i in ins {
            if i.mu < 1 || i.mu > self.n {
                return Err(Error::InvalidVariable {
                    d: i.d,
                    mu: i.mu,
                    n: self.n,
                });
            }
        }
        let level: u32 = ins.iter().map(|i| i.d).sum();
        let c = self.caps;
        if g > c.max_genus || ins.len() as u32 > c.max_points || level > c.max_level {
            return Err(Error::CapInsufficient(format!(
                "correlator genus {g} with {} insertions and level {level} exceeds table caps {c:?}",
                ins.len()
            )));
        }
        Ok(())
    }

    /// Store a value. Unstable or non-tame keys are rejected; zero values
    /// remove the entry.
    pub fn insert(&mut self, g: u32, mut ins: Vec<Insertion>, value: Rational) -> Result<()> {
        ins.sort_unstable();
        self.validate(g, &ins)?;
        if !is_stable(g, ins.len()) {
            return Err(Error::InvalidArgument(format!(
                "unstable correlator: genus {g}, {} insertions",
                ins.len()
            )));
        }
        if !is_tame(g, &ins) {
            return Err(Error::InvalidArgument(format!(
                "non-tame correlator: genus {g}, insertions {ins:?}"
            )));
        }
        if value.is_zero() {
            self.entries.remove(&(g, ins));
        } else {
            self.entries.insert((g, ins), value);
        }
        Ok(())
    }

    pub fn get(&self, g: u32, ins: &[Insertion]) -> Result<Rational> {
        let mut sorted = ins.to_vec();
        sorted.sort_unstable();
        self.get_sorted(g, &sorted)
    }

    /// Lookup for an already sorted insertion list.
    pub fn get_sorted(&self, g: u32, ins: &[Insertion]) -> Result<Rational> {
        if !is_stable(g, ins.len()) || !is_tame(g, ins) {
            return Ok(Rational::zero());
        }
        self.validate(g, ins)?;
        Ok(self
            .entries
            .get(&(g, ins.to_vec()))
            .cloned()
            .unwrap_or_else(Rational::zero))
    }

    /// `Σ_g ħ^{g−1} 𝓕_g` with `𝓕_g = Σ ⟨…⟩_g / |Aut| · Π t^{d_i,μ_i}`.
    pub fn to_log_series(&self, caps: Caps) -> Result<TruncatedSeries> {
        let mut s = TruncatedSeries::zero(self.n, caps);
        for ((g, ins), v) in &self.entries {
            let m = Monomial::from_vars(*g as i32 - 1, ins.iter().map(|i| i.var()));
            let aut = Rational::from_integer(m.aut());
            s.add_term(m, v / aut);
        }
        Ok(s)
    }

    /// Read a table back from a log-partition-function series.
    pub fn from_log_series(f: &TruncatedSeries, caps: TableCaps) -> Result<Self> {
        let mut t = CorrelatorTable::new(f.dimension(), caps);
        for (m, c) in f.terms() {
            if m.hbar_power() < -1 {
                return Err(Error::NotTame(format!("term {m} has hbar power below -1")));
            }
            let g = (m.hbar_power() + 1) as u32;
            let ins: Vec<Insertion> = m.vars().iter().map(|v| Insertion::new(v.d, v.mu)).collect();
            t.insert(g, ins, c * Rational::from_integer(m.aut()))?;
        }
        Ok(t)
    }
}

/// `Z = exp(Σ ħ^{g−1} 𝓕_g)`.
pub fn table_to_partition_function(table: &CorrelatorTable, caps: Caps) -> Result<TruncatedSeries> {
    table.to_log_series(caps)?.exp()
}

/// Inverse of [`table_to_partition_function`].
pub fn partition_function_to_table(
    z: &TruncatedSeries,
    caps: TableCaps,
) -> Result<CorrelatorTable> {
    CorrelatorTable::from_log_series(&z.log()?, caps)
}

/// `𝓥_g[k](e_{μ₁}z^{d₁}⊗…) = ⟨τ_{d₁}(μ₁)⋯⟩_g`; inputs are `(μ, d)` pairs.
pub fn vertex_tensor(table: &CorrelatorTable, g: u32, inputs: &[(u32, u32)]) -> Result<Rational> {
    let ins: Vec<Insertion> = inputs
        .iter()
        .map(|&(mu, d)| Insertion::new(d, mu))
        .collect();
    table.get(g, &ins)
}

/// All genera at once, as the `ħ^{g−1}`-graded family `g ↦ 𝓥_g[k](…)`.
pub fn vertex_tensor_all(
    table: &CorrelatorTable,
    inputs: &[(u32, u32)],
) -> Result<BTreeMap<u32, Rational>> {
    let mut out = BTreeMap::new();
    for g in 0..=table.caps().max_genus {
        let v = vertex_tensor(table, g, inputs)?;
        if !v.is_zero() {
            out.insert(g, v);
        }
    }
    Ok(out)
}

/// `⟨τ₁(1) X⟩_g = (2g − 2 + k)⟨X⟩_g`, `k = |X|`: returns the factor and `X`.
pub fn dilaton_reduce(g: u32, ins: &[Insertion]) -> Result<(Rational, Vec<Insertion>)> {
    let pos = ins
        .iter()
        .position(|&i| i == Insertion::new(1, 1))
        .ok_or_else(|| Error::InvalidArgument("no tau_1(1) insertion".into()))?;
    let mut rest = ins.to_vec();
    rest.remove(pos);
    let k = rest.len() as i64;
    Ok((int(2 * g as i64 - 2 + k), rest))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn caps() -> TableCaps {
        TableCaps {
            max_genus: 1,
            max_points: 5,
            max_level: 2,
        }
    }

    #[test]
    fn aut_factor_in_log_series() {
        let mut t = CorrelatorTable::new(2, caps());
        t.insert(
            0,
            vec![
                Insertion::new(0, 2),
                Insertion::new(0, 1),
                Insertion::new(0, 1),
            ],
            int(1),
        )
        .unwrap();
        let f = t.to_log_series(Caps::new(5, 2)).unwrap();
        let m = Monomial::from_factors(-1, &[(Var::primary(1), 2), (Var::primary(2), 1)]);
        assert_eq!(f.get(&m), rat(1, 2));
        assert_eq!(CorrelatorTable::from_log_series(&f, caps()).unwrap(), t);
    }

    #[test]
    fn empty_table_gives_one() {
        let t = CorrelatorTable::new(2, caps());
        let z = table_to_partition_function(&t, Caps::new(4, 2)).unwrap();
        assert_eq!(z, TruncatedSeries::one(2, Caps::new(4, 2)));
    }

    #[test]
    fn lookups() {
        let mut t = CorrelatorTable::new(2, caps());
        t.insert(1, vec![Insertion::new(1, 1)], rat(1, 24)).unwrap();
        assert_eq!(t.get(1, &[Insertion::new(1, 1)]).unwrap(), rat(1, 24));
        // unstable and non-tame keys are structurally zero
        assert!(t.get(0, &[Insertion::new(0, 1)]).unwrap().is_zero());
        assert!(t.get(1, &[Insertion::new(2, 1)]).unwrap().is_zero());
        assert!(t
            .get(2, &[Insertion::new(0, 1), Insertion::new(0, 1)])
            .is_err());
        assert!(t.insert(0, vec![Insertion::new(0, 1); 2], int(1)).is_err());
    }

    #[test]
    fn dilaton_factors() {
        let a = Insertion::new(0, 2);
        let (f, rest) = dilaton_reduce(0, &[Insertion::new(1, 1), a, a, a]).unwrap();
        assert_eq!((f, rest), (int(1), vec![a, a, a]));
        assert_eq!(
            dilaton_reduce(1, &[Insertion::new(1, 1), a]).unwrap().0,
            int(1)
        );
        assert_eq!(
            dilaton_reduce(0, &[Insertion::new(1, 1), a, a, a, a, a])
                .unwrap()
                .0,
            int(3)
        );
        assert!(dilaton_reduce(0, &[a, a, a]).is_err());
    }
}
