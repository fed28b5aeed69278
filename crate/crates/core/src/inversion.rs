//! The inversion symmetry of Frobenius potentials, computed two ways:
//! directly in coordinates, and as the Givental action of `r₁ = E_{1n}`.
//!
//! Both sides are compared as jets in the variables `(t̂¹, …, t̂^{n−1}, ε)`
//! with `t̂ⁿ = −1 + ε`. On the Givental side the source expansion point is
//! `(0, …, 0, 1)`, so its `tⁿ` variable plays the role of `ε`.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::cohft::{
    dual, eta_part, insertion_multisets, reconstruct_descendants, CorrelatorTable,
    FrobeniusPotential,
};
use crate::error::{Error, Result};
use crate::givental::{required_table_caps, transform_table, RMatrix};
use crate::graphs::GraphContext;
use crate::rational::{binomial, factorial_r, format_rational, int, rat, Rational};
use crate::series::{Caps, Monomial, TruncatedSeries, Var};

/// The data of the inversion in dimension `n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InversionData {
    n: u32,
    r: RMatrix,
}

impl InversionData {
    pub fn new(n: u32) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidArgument(
                "inversion needs dimension at least 2".into(),
            ));
        }
        Ok(InversionData {
            n,
            r: RMatrix::inversion(n),
        })
    }

    pub fn dimension(&self) -> u32 {
        self.n
    }

    pub fn r(&self) -> &RMatrix {
        &self.r
    }

    /// `(0, …, 0, 1)`.
    pub fn source_point(&self) -> Vec<Rational> {
        let mut p = vec![Rational::zero(); self.n as usize];
        p[self.n as usize - 1] = Rational::one();
        p
    }

    /// `(0, …, 0, −1)`.
    pub fn target_point(&self) -> Vec<Rational> {
        let mut p = vec![Rational::zero(); self.n as usize];
        p[self.n as usize - 1] = -Rational::one();
        p
    }

    /// The variable standing for `ε = t̂ⁿ + 1`.
    pub fn epsilon(&self) -> Var {
        Var::primary(self.n)
    }
}

/// `t_σ t^σ = Σ η_{αβ} t^α t^β`.
fn square_norm(t: &[Rational]) -> Rational {
    let n = t.len();
    (0..n).map(|a| &t[a] * &t[n - 1 - a]).sum()
}

/// `t ↦ t̂`: `t̂¹ = ½ t_σt^σ / tⁿ`, `t̂^α = t^α / tⁿ`, `t̂ⁿ = −1/tⁿ`.
pub fn invert_coordinates(t: &[Rational]) -> Result<Vec<Rational>> {
    let n = t.len();
    if n < 2 {
        return Err(Error::InvalidArgument(
            "need at least two coordinates".into(),
        ));
    }
    let tn = &t[n - 1];
    if tn.is_zero() {
        return Err(Error::Singular("t^n = 0".into()));
    }
    let mut out: Vec<Rational> = t.iter().map(|x| x / tn).collect();
    out[0] = rat(1, 2) * square_norm(t) / tn;
    out[n - 1] = -Rational::one() / tn;
    Ok(out)
}

/// `t̂ ↦ t`: `t¹ = ½ t̂_σt̂^σ / t̂ⁿ`, `t^α = −t̂^α / t̂ⁿ`, `tⁿ = −1/t̂ⁿ`.
pub fn uninvert_coordinates(t: &[Rational]) -> Result<Vec<Rational>> {
    let n = t.len();
    if n < 2 {
        return Err(Error::InvalidArgument(
            "need at least two coordinates".into(),
        ));
    }
    let tn = &t[n - 1];
    if tn.is_zero() {
        return Err(Error::Singular("t^n = 0".into()));
    }
    let mut out: Vec<Rational> = t.iter().map(|x| -x / tn).collect();
    out[0] = rat(1, 2) * square_norm(t) / tn;
    out[n - 1] = -Rational::one() / tn;
    Ok(out)
}

/// `|Aut₂(α, β)|`: 1, 2 or 8 according to the coincidences among
/// `α, β, ᾱ, β̄`.
pub fn aut2_order(alpha: u32, beta: u32, n: u32) -> Result<u32> {
    if n < 3 || !(2..n).contains(&alpha) || !(2..n).contains(&beta) {
        return Err(Error::InvalidArgument(format!(
            "indices ({alpha}, {beta}) must lie in 2..={} for n = {n}",
            n.saturating_sub(1)
        )));
    }
    let mut v = [alpha, beta, dual(n, alpha), dual(n, beta)];
    v.sort_unstable();
    let distinct = v.windows(2).filter(|w| w[0] != w[1]).count() + 1;
    Ok(match distinct {
        4 => 1,
        1 => 8,
        _ => 2,
    })
}

fn primary_monomials(n: u32, hbar: i32, degrees: std::ops::RangeInclusive<u32>) -> Vec<Monomial> {
    degrees
        .flat_map(|k| insertion_multisets(n, k as usize, 0))
        .map(|ins| Monomial::from_vars(hbar, ins.iter().map(|i| i.var())))
        .collect()
}

/// The coordinate side: `F̂` expanded at `(0, …, 0, −1)` to total degree
/// `cap`, in `(t̂¹, …, t̂^{n−1}, ε)`. Needs the jet of `F` to order `cap`.
pub fn invert_potential(f: &FrobeniusPotential, cap: u32) -> Result<FrobeniusPotential> {
    let n = f.dimension();
    if cap > f.order() {
        return Err(Error::CapInsufficient(format!(
            "inverting to order {cap} needs the potential to order {cap}, have {}",
            f.order()
        )));
    }
    let caps = Caps::new(cap, 1);
    let eps = Var::primary(n);
    let mut out = eta_part(n, caps);
    // (1/(8t̂ⁿ)) (Σ t̂^α t̂^ᾱ)², with 1/t̂ⁿ = −Σ_k ε^k
    let mut s = TruncatedSeries::zero(n, caps);
    for alpha in 2..n {
        s.add_term(
            Monomial::from_vars(0, [Var::primary(alpha), Var::primary(dual(n, alpha))]),
            Rational::one(),
        );
    }
    for (m, c) in s.mul(&s)?.terms() {
        for k in 0..=cap.saturating_sub(4) {
            out.add_term(
                m.mul(&Monomial::from_factors(0, &[(eps, k)])),
                -c * rat(1, 8),
            );
        }
    }
    // (t̂ⁿ)² H(−t̂^α/t̂ⁿ, −1/t̂ⁿ) = (1−ε)² H̃(t̂^α/(1−ε), ε/(1−ε)), H̃ centred at (0, …, 0, 1)
    for (m, c) in f.h().terms() {
        let d = m.degree() as i64;
        for k in 0..=(cap as i64 - d).max(-1) {
            let k = k as u32;
            out.add_term(
                m.mul(&Monomial::from_factors(0, &[(eps, k)])),
                c * binomial(d - 3 + k as i64, k as i64),
            );
        }
    }
    let data = InversionData::new(n)?;
    Ok(FrobeniusPotential::new(n, cap, out)?.with_expansion_point(data.target_point()))
}

/// `⟨τ̂₀(α₁)⋯τ̂₀(α_N)(τ̂₀(n))^q⟩_H` from derivatives of `H` at `(0, …, 0, 1)`,
/// `2 ≤ α_i ≤ n−1`.
pub fn h_correlator(f: &FrobeniusPotential, alphas: &[u32], q: u32) -> Result<Rational> {
    let n = f.dimension();
    let big_n = alphas.len() as i64;
    let mut total = Rational::zero();
    for p in 0..=q {
        let k = (q - p) as i64;
        if big_n + (p as i64) < 3 {
            continue;
        }
        let mut mus = alphas.to_vec();
        mus.extend(std::iter::repeat(n).take(p as usize));
        let h = f.correlator(&mus)?;
        total += factorial_r(q) / factorial_r(p) * binomial(big_n + k + p as i64 - 3, k) * h;
    }
    Ok(total)
}

/// `⟨τ̂₀(α)τ̂₀(ᾱ)τ̂₀(β)τ̂₀(β̄)(τ̂₀(n))^k⟩_Q = −k!|Aut((α,β,ᾱ,β̄))|/|Aut₂(α,β)|`;
/// zero for four indices not of that form.
pub fn q_correlator(n: u32, four: [u32; 4], k: u32) -> Result<Rational> {
    let mut v = four;
    v.sort_unstable();
    if v[0] < 2 || v[3] > n - 1 || v[0] + v[3] != n + 1 || v[1] + v[2] != n + 1 {
        return Ok(Rational::zero());
    }
    let mut counts: BTreeMap<u32, u32> = BTreeMap::new();
    for x in v {
        *counts.entry(x).or_default() += 1;
    }
    let aut: Rational = counts.values().map(|&c| factorial_r(c)).product();
    Ok(-factorial_r(k) * aut / int(aut2_order(v[0], v[1], n)? as i64))
}

/// Which implementation of the action computes the Givental side.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum GiventalRoute {
    #[default]
    Graphs,
    Operator,
}

/// Genus-zero table of `F` (centred at `(0, …, 0, 1)`) large enough for the
/// Givental side up to total degree `cap`.
pub fn inversion_table(f: &FrobeniusPotential, cap: u32) -> Result<CorrelatorTable> {
    let data = InversionData::new(f.dimension())?;
    let caps = required_table_caps(data.r(), Caps::new(cap, 0), 0);
    reconstruct_descendants(f, caps)
}

/// Genus-zero, descendant-free part of `log(R̂ Z)` for the inversion `r`,
/// degrees `3..=cap`, returned with `ħ⁰` like a potential.
pub fn givental_inverse(
    table: &CorrelatorTable,
    cap: u32,
    route: GiventalRoute,
) -> Result<TruncatedSeries> {
    let n = table.dimension();
    let data = InversionData::new(n)?;
    let monos = primary_monomials(n, -1, 3..=cap);
    let coeffs: Vec<Rational> = match route {
        GiventalRoute::Graphs => {
            let zcap = monos.iter().map(GraphContext::zcap_for).max().unwrap_or(0);
            let ctx = GraphContext::new(table, data.r(), zcap)?;
            monos
                .par_iter()
                .map(|m| ctx.coefficient(m))
                .collect::<Result<_>>()?
        }
        GiventalRoute::Operator => {
            let out = transform_table(data.r(), table, Caps::new(cap, 0))?;
            monos.iter().map(|m| out.get(m)).collect()
        }
    };
    TruncatedSeries::from_terms(
        n,
        Caps::new(cap, 1),
        monos
            .into_iter()
            .zip(coeffs)
            .filter(|(_, c)| !c.is_zero())
            .map(|(m, c)| (m.with_hbar(0), c)),
    )
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoefficientEntry {
    pub monomial: Monomial,
    pub coordinate: Rational,
    pub givental: Rational,
    pub equal: bool,
}

/// Every primary monomial of degree `3..=cap`, with both sides' values.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoefficientReport {
    pub dimension: u32,
    pub cap: u32,
    pub entries: Vec<CoefficientEntry>,
}

impl CoefficientReport {
    pub fn all_equal(&self) -> bool {
        self.entries.iter().all(|e| e.equal)
    }

    pub fn mismatches(&self) -> impl Iterator<Item = &CoefficientEntry> {
        self.entries.iter().filter(|e| !e.equal)
    }
}

impl fmt::Display for CoefficientReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let bad = self.mismatches().count();
        writeln!(
            f,
            "inversion check n={} cap={}: {} monomials, {} mismatches",
            self.dimension,
            self.cap,
            self.entries.len(),
            bad
        )?;
        for e in self.mismatches() {
            writeln!(
                f,
                "  MISMATCH {}: coordinate {} givental {}",
                e.monomial,
                format_rational(&e.coordinate),
                format_rational(&e.givental)
            )?;
        }
        Ok(())
    }
}

/// Compare two potentials coefficientwise on degrees `3..=cap`; lower
/// degrees are ignored.
pub fn compare_potentials(
    coordinate: &TruncatedSeries,
    givental: &TruncatedSeries,
    cap: u32,
) -> CoefficientReport {
    let n = coordinate.dimension();
    let entries = primary_monomials(n, 0, 3..=cap)
        .into_iter()
        .map(|m| {
            let a = coordinate.get(&m);
            let b = givental.get(&m);
            CoefficientEntry {
                equal: a == b,
                monomial: m,
                coordinate: a,
                givental: b,
            }
        })
        .collect();
    CoefficientReport {
        dimension: n,
        cap,
        entries,
    }
}

/// Both routes on `F` (centred at `(0, …, 0, 1)`) up to degree `cap`.
pub fn verify_inversion_theorem(
    f: &FrobeniusPotential,
    cap: u32,
    route: GiventalRoute,
) -> Result<CoefficientReport> {
    let table = inversion_table(f, cap)?;
    verify_with_table(f, &table, cap, route)
}

/// As [`verify_inversion_theorem`], with the Givental side read from a
/// given table (for instance a deliberately perturbed one).
pub fn verify_with_table(
    f: &FrobeniusPotential,
    table: &CorrelatorTable,
    cap: u32,
    route: GiventalRoute,
) -> Result<CoefficientReport> {
    let coordinate = invert_potential(f, cap)?;
    let givental = givental_inverse(table, cap, route)?;
    Ok(compare_potentials(coordinate.series(), &givental, cap))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coordinates_at_the_expansion_points() {
        let p = InversionData::new(3).unwrap();
        assert_eq!(
            invert_coordinates(&p.source_point()).unwrap(),
            p.target_point()
        );
        assert_eq!(
            uninvert_coordinates(&p.target_point()).unwrap(),
            p.source_point()
        );
        assert_eq!(
            invert_coordinates(&[int(0), int(1)]).unwrap(),
            vec![int(0), int(-1)]
        );
        assert!(matches!(
            invert_coordinates(&[int(1), int(0)]),
            Err(Error::Singular(_))
        ));
    }

    #[test]
    fn aut2_examples() {
        assert_eq!(aut2_order(2, 3, 7).unwrap(), 1);
        assert_eq!(aut2_order(3, 3, 5).unwrap(), 8);
        assert_eq!(aut2_order(2, 5, 6).unwrap(), 2);
        assert_eq!(aut2_order(2, 2, 5).unwrap(), 2);
        assert!(aut2_order(1, 2, 5).is_err());
    }

    #[test]
    fn q_sector_in_three_dimensions() {
        // (1/(8t̂ⁿ))(t̂²)⁴ → −(t̂²)⁴ ε^k / 8, correlator −3·k!
        assert_eq!(q_correlator(3, [2, 2, 2, 2], 2).unwrap(), int(-6));
        assert_eq!(q_correlator(4, [2, 2, 2, 3], 0).unwrap(), int(0));
    }
}
