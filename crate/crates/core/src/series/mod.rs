//! Truncated multivariate power series in `t^{d,μ}` and `ħ` over ℚ.
//!
//! A [`TruncatedSeries`] is a finite map from [`Monomial`] to [`Rational`]
//! together with the [`Caps`] that say which monomials are *reliable*.
//!
//! Two truncation regimes are supported:
//!
//! * **box** — keep `ħ^e t^{d₁,μ₁}⋯t^{d_k,μ_k}` iff the total `t`-power
//!   `k ≤ degree_cap` and `e ≤ genus_cap − 1`. This is the user-facing regime.
//! * **stable** — keep monomials by their tameness excess
//!   `δ = 3e + k − Σd` and Euler characteristic `χ = 2e + k`:
//!   `δ ≤ Δ` and `χ + w·δ ≤ X`. Products of tame factors never leave this
//!   region and every term of a Givental operator raises `δ`, so operator
//!   exponentials computed here are exact. `Δ` and `X` are derived from the
//!   box caps of the eventual output.
//!
//! Invariants:
//! - no stored zero coefficients;
//! - every stored monomial satisfies [`Caps::contains`];
//! - monomial factors are kept sorted, so equal series have equal maps.

mod arith;
pub(crate) mod text;

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::rational::{factorial, Rational};

pub use arith::{add, coefficient, exp, is_tame, log, mul, partial};

/// The formal variable `t^{d,μ}`: descendant level `d`, primary index `μ`
/// (1-based).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var {
    pub d: u32,
    pub mu: u32,
}

impl Var {
    pub const fn new(d: u32, mu: u32) -> Self {
        Var { d, mu }
    }

    /// Primary (descendant-free) variable `t^{0,μ}`.
    pub const fn primary(mu: u32) -> Self {
        Var { d: 0, mu }
    }

    pub fn check(self, n: u32) -> Result<Self> {
        if self.mu >= 1 && self.mu <= n {
            Ok(self)
        } else {
            Err(Error::InvalidVariable {
                d: self.d,
                mu: self.mu,
                n,
            })
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "t[{},{}]", self.d, self.mu)
    }
}

/// Any variable a series can mention. `ħ` has weight 0; `t^{d,μ}` has weight `d`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum VariableId {
    T(Var),
    Hbar,
}

impl VariableId {
    pub fn weight(self) -> u32 {
        match self {
            VariableId::T(v) => v.d,
            VariableId::Hbar => 0,
        }
    }
}

/// `ħ^e · Π t^{d,μ}`, with the `t`-part stored as a sorted multiset.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Monomial {
    hbar: i32,
    vars: SmallVec<[Var; 8]>,
}

impl Monomial {
    pub fn one() -> Self {
        Monomial::default()
    }

    pub fn from_vars(hbar: i32, vars: impl IntoIterator<Item = Var>) -> Self {
        let mut vars: SmallVec<[Var; 8]> = vars.into_iter().collect();
        vars.sort_unstable();
        Monomial { hbar, vars }
    }

    /// From `(variable, power)` pairs; zero powers are ignored.
    pub fn from_factors(hbar: i32, factors: &[(Var, u32)]) -> Self {
        Self::from_vars(
            hbar,
            factors
                .iter()
                .flat_map(|&(v, p)| std::iter::repeat(v).take(p as usize)),
        )
    }

    pub fn hbar_power(&self) -> i32 {
        self.hbar
    }

    pub fn with_hbar(mut self, hbar: i32) -> Self {
        self.hbar = hbar;
        self
    }

    /// Total `t`-power `k`.
    pub fn degree(&self) -> u32 {
        self.vars.len() as u32
    }

    /// `Σ d_i · power_i`.
    pub fn weighted_degree(&self) -> u32 {
        self.vars.iter().map(|v| v.d).sum()
    }

    /// The `t`-part as a sorted multiset (each variable repeated by its power).
    pub fn vars(&self) -> &[Var] {
        &self.vars
    }

    /// `(variable, power)` pairs in canonical order.
    pub fn factors(&self) -> Vec<(Var, u32)> {
        let mut out: Vec<(Var, u32)> = Vec::new();
        for &v in &self.vars {
            match out.last_mut() {
                Some((w, p)) if *w == v => *p += 1,
                _ => out.push((v, 1)),
            }
        }
        out
    }

    pub fn power_of(&self, v: Var) -> u32 {
        self.vars.iter().filter(|&&w| w == v).count() as u32
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut vars = SmallVec::with_capacity(self.vars.len() + other.vars.len());
        let (mut i, mut j) = (0, 0);
        while i < self.vars.len() && j < other.vars.len() {
            if self.vars[i] <= other.vars[j] {
                vars.push(self.vars[i]);
                i += 1;
            } else {
                vars.push(other.vars[j]);
                j += 1;
            }
        }
        vars.extend_from_slice(&self.vars[i..]);
        vars.extend_from_slice(&other.vars[j..]);
        Monomial {
            hbar: self.hbar + other.hbar,
            vars,
        }
    }

    /// Remove one copy of `v`, if present.
    pub fn without(&self, v: Var) -> Option<Monomial> {
        let pos = self.vars.iter().position(|&w| w == v)?;
        let mut vars = self.vars.clone();
        vars.remove(pos);
        Some(Monomial {
            hbar: self.hbar,
            vars,
        })
    }

    pub fn with(&self, v: Var) -> Monomial {
        let mut vars = self.vars.clone();
        let pos = vars.partition_point(|&w| w <= v);
        vars.insert(pos, v);
        Monomial {
            hbar: self.hbar,
            vars,
        }
    }

    /// Tameness excess `δ = 3e + k − Σd`; a term `ħ^{g−1}⟨…⟩_g` is tame iff `δ ≥ 0`.
    pub fn delta(&self) -> i64 {
        3 * self.hbar as i64 + self.degree() as i64 - self.weighted_degree() as i64
    }

    /// `χ = 2e + k`, which is `2g − 2 + k` for a genus-`g` term.
    pub fn chi(&self) -> i64 {
        2 * self.hbar as i64 + self.degree() as i64
    }

    /// `Π power!` — the order of the symmetry group of the insertion multiset.
    pub fn aut(&self) -> BigInt {
        self.factors()
            .iter()
            .fold(BigInt::one(), |acc, &(_, p)| acc * factorial(p))
    }

    pub fn is_one(&self) -> bool {
        self.hbar == 0 && self.vars.is_empty()
    }

    pub(crate) fn check(&self, n: u32) -> Result<()> {
        for v in &self.vars {
            v.check(n)?;
        }
        Ok(())
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Ordered by `ħ`-power, then total degree, then the sorted factor list.
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.hbar
            .cmp(&other.hbar)
            .then(self.vars.len().cmp(&other.vars.len()))
            .then_with(|| self.vars.cmp(&other.vars))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        if self.hbar != 0 {
            parts.push(format!("hbar^{}", self.hbar));
        }
        for (v, p) in self.factors() {
            if p == 1 {
                parts.push(v.to_string());
            } else {
                parts.push(format!("{v}^{p}"));
            }
        }
        if parts.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", parts.join(" * "))
        }
    }
}

/// Parameters of the stable region `δ ≤ delta`, `χ + w·δ ≤ chi` (`w = 1`
/// iff `dilaton`).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StableBound {
    pub delta: i64,
    pub chi: i64,
    pub dilaton: bool,
}

/// Which monomials a series is reliable on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Caps {
    degree: i64,
    genus: i64,
    stable: Option<StableBound>,
}

impl Caps {
    /// Box truncation: `k ≤ degree_cap`, `ħ`-power `≤ genus_cap − 1`.
    pub fn new(degree_cap: u32, genus_cap: u32) -> Self {
        Caps {
            degree: degree_cap as i64,
            genus: genus_cap as i64,
            stable: None,
        }
    }

    /// Stable region large enough that anything computed from tame input and
    /// then restricted to `Caps::new(degree_cap, genus_cap)` is exact.
    /// `dilaton` must be set when the operators involved have a dilaton shift.
    pub fn stable(degree_cap: u32, genus_cap: u32, dilaton: bool) -> Self {
        let (d, g) = (degree_cap as i64, genus_cap as i64);
        let delta = (3 * g - 3 + d).max(0);
        let chi = (2 * g - 2 + d).max(0) + if dilaton { delta } else { 0 };
        Caps {
            degree: d,
            genus: g,
            stable: Some(StableBound {
                delta,
                chi,
                dilaton,
            }),
        }
    }

    pub fn degree_cap(&self) -> i64 {
        self.degree
    }

    pub fn genus_cap(&self) -> i64 {
        self.genus
    }

    pub fn stable_bound(&self) -> Option<StableBound> {
        self.stable
    }

    pub fn is_stable(&self) -> bool {
        self.stable.is_some()
    }

    /// The box these caps eventually report on.
    pub fn boxed(&self) -> Caps {
        Caps {
            stable: None,
            ..*self
        }
    }

    pub fn in_box(&self, m: &Monomial) -> bool {
        (m.degree() as i64) <= self.degree && (m.hbar as i64) < self.genus
    }

    pub fn contains(&self, m: &Monomial) -> bool {
        match self.stable {
            None => self.in_box(m),
            Some(s) => {
                let delta = m.delta();
                delta <= s.delta && m.chi() + if s.dilaton { delta } else { 0 } <= s.chi
            }
        }
    }

    /// Componentwise minimum; mixing box and stable regions is refused.
    pub fn meet(&self, other: &Caps) -> Result<Caps> {
        let stable = match (self.stable, other.stable) {
            (None, None) => None,
            (Some(a), Some(b)) if a.dilaton == b.dilaton => Some(StableBound {
                delta: a.delta.min(b.delta),
                chi: a.chi.min(b.chi),
                dilaton: a.dilaton,
            }),
            _ => {
                return Err(Error::CapsMismatch(format!("{self:?} vs {other:?}")));
            }
        };
        Ok(Caps {
            degree: self.degree.min(other.degree),
            genus: self.genus.min(other.genus),
            stable,
        })
    }

    /// Reliable region after one partial derivative (the watermark drops).
    pub fn after_partial(&self) -> Caps {
        Caps {
            degree: self.degree - 1,
            genus: self.genus,
            stable: self.stable.map(|s| StableBound {
                delta: s.delta - 1,
                chi: s.chi - 1 - i64::from(s.dilaton),
                dilaton: s.dilaton,
            }),
        }
    }
}

/// A truncated series; see the module docs for the invariants.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncatedSeries {
    n: u32,
    caps: Caps,
    terms: BTreeMap<Monomial, Rational>,
}

impl TruncatedSeries {
    pub fn zero(n: u32, caps: Caps) -> Self {
        TruncatedSeries {
            n,
            caps,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(n: u32, caps: Caps) -> Self {
        Self::constant(n, caps, Rational::one())
    }

    pub fn constant(n: u32, caps: Caps, c: Rational) -> Self {
        let mut s = Self::zero(n, caps);
        s.insert(Monomial::one(), c);
        s
    }

    pub fn variable(n: u32, caps: Caps, v: Var) -> Result<Self> {
        Self::from_terms(n, caps, [(Monomial::from_vars(0, [v]), Rational::one())])
    }

    /// Collect terms, summing duplicates and silently dropping anything
    /// outside `caps`.
    pub fn from_terms(
        n: u32,
        caps: Caps,
        terms: impl IntoIterator<Item = (Monomial, Rational)>,
    ) -> Result<Self> {
        let mut s = Self::zero(n, caps);
        for (m, c) in terms {
            m.check(n)?;
            s.add_term(m, c);
        }
        Ok(s)
    }

    pub fn dimension(&self) -> u32 {
        self.n
    }

    pub fn caps(&self) -> Caps {
        self.caps
    }

    pub fn degree_cap(&self) -> i64 {
        self.caps.degree
    }

    pub fn genus_cap(&self) -> i64 {
        self.caps.genus
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    /// Raw lookup without the cap check of [`coefficient`].
    pub fn get(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    /// Accumulate `c·m`, respecting the caps and dropping zeros.
    pub fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() || !self.caps.contains(&m) {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    fn insert(&mut self, m: Monomial, c: Rational) {
        if !c.is_zero() && self.caps.contains(&m) {
            self.terms.insert(m, c);
        }
    }

    /// Re-filter onto `caps`. The caller vouches that the stored data is
    /// reliable there (typically `caps` is smaller).
    pub fn retruncate(&self, caps: Caps) -> Self {
        TruncatedSeries {
            n: self.n,
            caps,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| caps.contains(m))
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Drop the stable region and keep only the output box.
    pub fn restrict_to_box(&self) -> Self {
        self.retruncate(self.caps.boxed())
    }

    /// Terms satisfying `keep`, same caps.
    pub fn filter(&self, keep: impl Fn(&Monomial) -> bool) -> Self {
        TruncatedSeries {
            n: self.n,
            caps: self.caps,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| keep(m))
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Terms whose `ħ`-power is `e`.
    pub fn hbar_part(&self, e: i32) -> Self {
        self.filter(|m| m.hbar_power() == e)
    }

    /// Drop every term of total `t`-degree `≤ d` (the "order ≤ 2" normalisation
    /// uses `d = 2`).
    pub fn drop_degree_at_most(&self, d: u32) -> Self {
        self.filter(|m| m.degree() > d)
    }

    pub(crate) fn from_map(n: u32, caps: Caps, terms: BTreeMap<Monomial, Rational>) -> Self {
        TruncatedSeries { n, caps, terms }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn monomial_basics() {
        let a = Var::new(0, 1);
        let b = Var::new(1, 2);
        let m = Monomial::from_factors(-1, &[(b, 1), (a, 2)]);
        assert_eq!(m.vars(), &[a, a, b]);
        assert_eq!(m.factors(), vec![(a, 2), (b, 1)]);
        assert_eq!(m.degree(), 3);
        assert_eq!(m.weighted_degree(), 1);
        assert_eq!(m.delta(), -1);
        assert_eq!(m.chi(), 1);
        assert_eq!(m.aut(), BigInt::from(2));
        assert_eq!(m.without(a).unwrap().with(a), m);
        assert!(m.without(Var::new(3, 1)).is_none());
        assert_eq!(m.to_string(), "hbar^-1 * t[0,1]^2 * t[1,2]");
    }

    #[test]
    fn stable_caps_are_sane() {
        let c = Caps::stable(5, 0, false);
        let s = c.stable_bound().unwrap();
        assert_eq!((s.delta, s.chi), (2, 3));
        assert!(c.contains(&Monomial::one()));
        let c = Caps::stable(1, 0, true);
        assert!(c.contains(&Monomial::one()));
    }
}
