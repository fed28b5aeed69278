//! Hamiltonian densities `θ_{α,p} = Ω_{α,p;1,0}` of the principal hierarchy
//! and their behaviour under the inversion.
//!
//! All densities are series in the flat coordinates `v^μ` (stored as the
//! primary variables `t^{0,μ}`), centred at the expansion point: on the
//! source side `vⁿ` stands for `vⁿ − 1`, on the target side for
//! `ε = v̂ⁿ + 1`. Unstable correlators are zero, so densities carry no
//! constant terms and spans are compared modulo constants.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::cohft::{
    insertion_multisets, reconstruct_descendants, table_to_partition_function, CorrelatorTable,
    FrobeniusPotential, Insertion, TableCaps,
};
use crate::error::{Error, Result};
use crate::givental::apply_infinitesimal;
use crate::inversion::InversionData;
use crate::rational::{format_rational, int, rat, Rational};
use crate::series::{Caps, Monomial, TruncatedSeries, Var};

/// `θ_{α,p}` as a series in `v`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HamiltonianDensity {
    pub alpha: u32,
    pub p: u32,
    pub value: TruncatedSeries,
}

fn v_caps(cap: u32) -> Caps {
    Caps::new(cap, 1)
}

fn check_index(n: u32, alpha: u32) -> Result<()> {
    if alpha == 0 || alpha > n {
        return Err(Error::InvalidArgument(format!(
            "index {alpha} out of range 1..={n}"
        )));
    }
    Ok(())
}

/// What the table has to know for densities up to level `pmax + 1`, the
/// operator deformation, and `v`-degree `cap`.
pub fn hierarchy_table_caps(pmax: u32, cap: u32) -> TableCaps {
    TableCaps {
        max_genus: 0,
        max_points: cap + 2,
        max_level: (pmax + 2).max(cap.saturating_sub(1)),
    }
}

pub fn hierarchy_table(f: &FrobeniusPotential, pmax: u32, cap: u32) -> Result<CorrelatorTable> {
    reconstruct_descendants(f, hierarchy_table_caps(pmax, cap))
}

/// `θ_{α,p}(v) = Σ ⟨τ_p(α) τ₀(1) τ₀(μ₁)⋯τ₀(μ_j)⟩₀ v^{μ₁}⋯v^{μ_j} / |Aut|`
/// for `j ≤ cap`.
pub fn theta(table: &CorrelatorTable, alpha: u32, p: u32, cap: u32) -> Result<HamiltonianDensity> {
    let n = table.dimension();
    check_index(n, alpha)?;
    let mut value = TruncatedSeries::zero(n, v_caps(cap));
    for j in 0..=cap as usize {
        for rest in insertion_multisets(n, j, 0) {
            let mut ins = vec![Insertion::new(p, alpha), Insertion::new(0, 1)];
            ins.extend_from_slice(&rest);
            let c = table.get(0, &ins)?;
            if c.is_zero() {
                continue;
            }
            let m = Monomial::from_vars(0, rest.iter().map(|i| i.var()));
            let aut = Rational::from_integer(m.aut());
            value.add_term(m, c / aut);
        }
    }
    Ok(HamiltonianDensity { alpha, p, value })
}

/// Every `θ_{α,p}` with `p ≤ pmax`, ordered by `(p, α)`.
pub fn theta_family(
    table: &CorrelatorTable,
    pmax: u32,
    cap: u32,
) -> Result<Vec<HamiltonianDensity>> {
    let n = table.dimension();
    let labels: Vec<(u32, u32)> = (0..=pmax)
        .flat_map(|p| (1..=n).map(move |a| (a, p)))
        .collect();
    labels
        .par_iter()
        .map(|&(a, p)| theta(table, a, p, cap))
        .collect()
}

/// `U f = −vⁿf − ½ Σ_γ v^γ v^{n+1−γ} ∂f/∂v¹ + vⁿ Σ_γ v^γ ∂f/∂v^γ`.
pub fn u_operator(f: &TruncatedSeries) -> TruncatedSeries {
    let n = f.dimension();
    let vn = Var::primary(n);
    let v1 = Var::primary(1);
    let mut out = TruncatedSeries::zero(n, f.caps());
    for (m, c) in f.terms() {
        // −vⁿ·f and the Euler term combine to (deg − 1)·vⁿ·f
        let euler = c * int(m.degree() as i64 - 1);
        out.add_term(m.with(vn), euler);
        let p1 = m.power_of(v1);
        if p1 > 0 {
            let rest = m.without(v1).expect("power > 0");
            let half = c * rat(-(p1 as i64), 2);
            for g in 1..=n {
                out.add_term(
                    rest.with(Var::primary(g)).with(Var::primary(n + 1 - g)),
                    half.clone(),
                );
            }
        }
    }
    out
}

/// `exp(U) f` as the sum of `Uᵏf/k!`. `U` raises the degree, so the terms
/// must vanish once `k` exceeds the degree cap; that is checked.
pub fn exp_u(f: &TruncatedSeries) -> Result<(TruncatedSeries, usize)> {
    let limit = f.degree_cap().max(0) as usize + 1;
    let mut sum = f.clone();
    let mut term = f.clone();
    for k in 1..=limit + 1 {
        if term.is_zero() {
            return Ok((sum, k - 1));
        }
        term = u_operator(&term).scale(&Rational::new(1.into(), (k as i64).into()));
        sum = sum.add(&term)?;
    }
    Err(Error::NonTerminating(limit))
}

/// `1/(1 − x)` truncated to the caps of the target series.
fn geometric(n: u32, caps: Caps, x: Var) -> Result<TruncatedSeries> {
    let cap = caps.degree_cap().max(0) as u32;
    TruncatedSeries::from_terms(
        n,
        caps,
        (0..=cap).map(|k| (Monomial::from_factors(0, &[(x, k)]), Rational::one())),
    )
}

/// `exp(U)` in closed form: `(1 − vⁿ)·f(v¹ − ½Σ'v^γv^{n+1−γ}/(1 − vⁿ),
/// v^α/(1 − vⁿ), vⁿ/(1 − vⁿ))`, with `Σ'` over `2 ≤ γ ≤ n−1`.
pub fn exp_u_closed_form(f: &TruncatedSeries) -> Result<TruncatedSeries> {
    let n = f.dimension();
    let caps = f.caps();
    let vn = Var::primary(n);
    let inv = geometric(n, caps, vn)?;
    let var = |mu| TruncatedSeries::variable(n, caps, Var::primary(mu));
    let mut images = BTreeMap::new();
    let mut mid = TruncatedSeries::zero(n, caps);
    for g in 2..n {
        mid = mid.add(&var(g)?.mul(&var(n + 1 - g)?)?)?;
    }
    images.insert(
        Var::primary(1),
        var(1)?.sub(&mid.mul(&inv)?.scale(&rat(1, 2)))?,
    );
    for mu in 2..=n {
        images.insert(Var::primary(mu), var(mu)?.mul(&inv)?);
    }
    let prefactor = TruncatedSeries::one(n, caps).sub(&var(n)?)?;
    prefactor.mul(&f.compose(&images, n, caps)?)
}

/// `θ̂_{α,p} = exp(U)θ_{α,p} + δⁿ_α exp(U)θ_{1,p+1}`.
pub fn transform_hamiltonian(
    table: &CorrelatorTable,
    alpha: u32,
    p: u32,
    cap: u32,
) -> Result<HamiltonianDensity> {
    let n = table.dimension();
    let mut arg = theta(table, alpha, p, cap)?.value;
    if alpha == n {
        arg = arg.add(&theta(table, 1, p + 1, cap)?.value)?;
    }
    let (value, _) = exp_u(&arg)?;
    Ok(HamiltonianDensity { alpha, p, value })
}

/// `g(v)/vⁿ` re-expressed in `v̂` through the inverse inversion map
/// `v¹ = ½ v̂_σv̂^σ / v̂ⁿ`, `v^α = −v̂^α/v̂ⁿ`, `vⁿ = −1/v̂ⁿ`, expanded at
/// `v̂ⁿ = −1 + ε`. `g` is centred at the source point.
fn lxz_substitute(g: &TruncatedSeries) -> Result<TruncatedSeries> {
    let n = g.dimension();
    let caps = g.caps();
    let data = InversionData::new(n)?;
    let eps = TruncatedSeries::variable(n, caps, data.epsilon())?;
    let var = |mu| TruncatedSeries::variable(n, caps, Var::primary(mu));
    let one = TruncatedSeries::one(n, caps);
    // v̂ⁿ and 1/v̂ⁿ = −1/(1 − ε)
    let hat_n = eps.sub(&one)?;
    let inv_hat_n = geometric(n, caps, data.epsilon())?.neg();
    let mut norm = TruncatedSeries::zero(n, caps);
    for g in 1..=n {
        let a = if g == n { hat_n.clone() } else { var(g)? };
        let b = if g == 1 {
            hat_n.clone()
        } else {
            var(n + 1 - g)?
        };
        norm = norm.add(&a.mul(&b)?)?;
    }
    let mut images = BTreeMap::new();
    images.insert(Var::primary(1), norm.mul(&inv_hat_n)?.scale(&rat(1, 2)));
    for mu in 2..n {
        images.insert(Var::primary(mu), var(mu)?.mul(&inv_hat_n)?.neg());
    }
    // centred vⁿ − 1 = −1/v̂ⁿ − 1
    images.insert(Var::primary(n), inv_hat_n.neg().sub(&one)?);
    let inv_vn = hat_n.neg();
    inv_vn.mul(&g.compose(&images, n, caps)?)
}

/// The displayed LXZ densities `θ̂^{LXZ}_{α,p}` as series in `v̂` at the
/// target point (`v̂ⁿ` carrying `ε`).
pub fn lxz_hamiltonian(
    table: &CorrelatorTable,
    alpha: u32,
    p: u32,
    cap: u32,
) -> Result<HamiltonianDensity> {
    let n = table.dimension();
    check_index(n, alpha)?;
    let value = if alpha == 1 && p == 0 {
        // −1/vⁿ = v̂ⁿ
        let caps = v_caps(cap);
        TruncatedSeries::variable(n, caps, Var::primary(n))?.sub(&TruncatedSeries::one(n, caps))?
    } else if alpha == 1 {
        lxz_substitute(&theta(table, n, p - 1, cap)?.value)?.neg()
    } else if alpha == n {
        lxz_substitute(&theta(table, 1, p + 1, cap)?.value)?
    } else {
        lxz_substitute(&theta(table, alpha, p, cap)?.value)?
    };
    Ok(HamiltonianDensity { alpha, p, value })
}

/// One density written in terms of a family, or the evidence that it is not
/// in the span.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SpanRow {
    /// `(label, coefficient)` pairs with nonzero coefficients.
    Combination(Vec<((u32, u32), Rational)>),
    /// The density minus its projection: nonzero and supported only on
    /// monomials where the family's reduced basis has no pivot.
    Outside(Vec<(Monomial, Rational)>),
}

/// Each density of one family expressed through another, modulo constants.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpanComparison {
    pub rows: Vec<((u32, u32), SpanRow)>,
}

impl SpanComparison {
    pub fn contained(&self) -> bool {
        self.rows
            .iter()
            .all(|(_, r)| matches!(r, SpanRow::Combination(_)))
    }

    pub fn failures(&self) -> impl Iterator<Item = &((u32, u32), SpanRow)> {
        self.rows
            .iter()
            .filter(|(_, r)| matches!(r, SpanRow::Outside(_)))
    }
}

type Sparse = BTreeMap<Monomial, Rational>;

fn sparse(f: &TruncatedSeries) -> Sparse {
    f.terms()
        .filter(|(m, _)| !m.is_one())
        .map(|(m, c)| (m.clone(), c.clone()))
        .collect()
}

fn axpy(y: &mut Sparse, a: &Rational, x: &Sparse) {
    for (m, c) in x {
        let e = y.entry(m.clone()).or_insert_with(Rational::zero);
        *e -= a * c;
        if e.is_zero() {
            y.remove(m);
        }
    }
}

fn combo_axpy(y: &mut BTreeMap<usize, Rational>, a: &Rational, x: &BTreeMap<usize, Rational>) {
    for (i, c) in x {
        let e = y.entry(*i).or_insert_with(Rational::zero);
        *e -= a * c;
        if e.is_zero() {
            y.remove(i);
        }
    }
}

/// Exact Gaussian elimination: every member of `a` is written in the span
/// of `b` (modulo constants), or an out-of-span residual is returned.
pub fn compare_spans(a: &[HamiltonianDensity], b: &[HamiltonianDensity]) -> SpanComparison {
    // echelon rows: (pivot, row with 1 at pivot, combination of b producing it)
    let mut basis: Vec<(Monomial, Sparse, BTreeMap<usize, Rational>)> = Vec::new();
    let reduce = |basis: &[(Monomial, Sparse, BTreeMap<usize, Rational>)],
                  mut v: Sparse,
                  mut combo: BTreeMap<usize, Rational>| {
        for (pivot, row, rc) in basis {
            if let Some(c) = v.get(pivot).cloned() {
                axpy(&mut v, &c, row);
                combo_axpy(&mut combo, &c, rc);
            }
        }
        (v, combo)
    };
    for (j, d) in b.iter().enumerate() {
        let (v, combo) = reduce(
            &basis,
            sparse(&d.value),
            BTreeMap::from([(j, Rational::one())]),
        );
        if let Some((pivot, c)) = v.iter().next().map(|(m, c)| (m.clone(), c.clone())) {
            let inv = c.recip();
            let row = v.into_iter().map(|(m, x)| (m, x * &inv)).collect();
            let rc = combo.into_iter().map(|(i, x)| (i, x * &inv)).collect();
            basis.push((pivot, row, rc));
        }
    }
    let rows = a
        .iter()
        .map(|d| {
            let (v, combo) = reduce(&basis, sparse(&d.value), BTreeMap::new());
            let row = if v.is_empty() {
                // v − Σ combo·b = 0, so the density is −combo
                SpanRow::Combination(
                    combo
                        .into_iter()
                        .map(|(i, c)| ((b[i].alpha, b[i].p), -c))
                        .collect(),
                )
            } else {
                SpanRow::Outside(v.into_iter().collect())
            };
            ((d.alpha, d.p), row)
        })
        .collect();
    SpanComparison { rows }
}

/// Genus-zero first-order change `δF₀ = [(r₁z)^ Z / Z]_{ħ⁻¹}` of the
/// descendant potential under the inversion `r₁`, on the region the
/// densities of `v`-degree `≤ cap` need.
pub fn first_order_potential(table: &CorrelatorTable, cap: u32) -> Result<TruncatedSeries> {
    let n = table.dimension();
    let data = InversionData::new(n)?;
    let r1 = data.r().level(1).expect("inversion has level 1");
    let caps = Caps::stable(cap + 2, 0, false);
    let z = table_to_partition_function(table, caps)?;
    let f = table.to_log_series(caps)?;
    let dz = apply_infinitesimal(r1, 1, &z)?;
    Ok(dz.mul(&f.neg().exp()?)?.hbar_part(-1))
}

/// `∂²/∂t^{p,α}∂t^{0,1}` of a genus-zero potential, restricted to the small
/// phase space.
pub fn omega_restricted(
    f0: &TruncatedSeries,
    alpha: u32,
    p: u32,
    cap: u32,
) -> Result<TruncatedSeries> {
    let n = f0.dimension();
    check_index(n, alpha)?;
    let mut out = TruncatedSeries::zero(n, v_caps(cap));
    let (a, b) = (Var::new(p, alpha), Var::primary(1));
    for (m, c) in f0.terms() {
        let Some(after_a) = m.without(a) else {
            continue;
        };
        let Some(rest) = after_a.without(b) else {
            continue;
        };
        if rest.vars().iter().any(|v| v.d > 0) {
            continue;
        }
        let mult = int(m.power_of(a) as i64) * int(after_a.power_of(b) as i64);
        out.add_term(rest.with_hbar(0), c * mult);
    }
    Ok(out)
}

/// First-order change of `θ_{α,p}` under `ε·(r₁z)^`, computed with the
/// quantized operator on the partition function.
pub fn first_order_deformation(
    table: &CorrelatorTable,
    alpha: u32,
    p: u32,
    cap: u32,
) -> Result<TruncatedSeries> {
    omega_restricted(&first_order_potential(table, cap)?, alpha, p, cap)
}

/// `Uθ_{α,p} + δⁿ_α θ_{1,p+1}`.
pub fn first_order_prediction(
    table: &CorrelatorTable,
    alpha: u32,
    p: u32,
    cap: u32,
) -> Result<TruncatedSeries> {
    let n = table.dimension();
    let mut out = u_operator(&theta(table, alpha, p, cap)?.value);
    if alpha == n {
        out = out.add(&theta(table, 1, p + 1, cap)?.value)?;
    }
    Ok(out)
}

/// Outcome of the full hierarchy check at levels `≤ pmax`, `v`-degree `≤ cap`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HierarchyReport {
    pub dimension: u32,
    pub pmax: u32,
    pub cap: u32,
    /// `(α, p, θ̂ = θ̂^{LXZ})` for `2 ≤ α ≤ n−1`.
    pub middle: Vec<(u32, u32, bool)>,
    /// `θ̂` at levels `≤ pmax` inside the LXZ span at levels `≤ pmax + 1`.
    pub forward: SpanComparison,
    /// LXZ at levels `≤ pmax` inside the `θ̂` span at levels `≤ pmax + 1`.
    pub backward: SpanComparison,
    /// `(α, p, operator deformation = Uθ + δⁿ_α θ_{1,p+1})`.
    pub first_order: Vec<(u32, u32, bool)>,
    /// `(α, p, exp(U) series = closed form)`.
    pub closed_form: Vec<(u32, u32, bool)>,
}

impl HierarchyReport {
    pub fn passed(&self) -> bool {
        self.middle.iter().all(|x| x.2)
            && self.forward.contained()
            && self.backward.contained()
            && self.first_order.iter().all(|x| x.2)
            && self.closed_form.iter().all(|x| x.2)
    }
}

pub fn verify_hierarchy(f: &FrobeniusPotential, pmax: u32, cap: u32) -> Result<HierarchyReport> {
    let table = hierarchy_table(f, pmax, cap)?;
    verify_hierarchy_with_table(&table, pmax, cap)
}

pub fn verify_hierarchy_with_table(
    table: &CorrelatorTable,
    pmax: u32,
    cap: u32,
) -> Result<HierarchyReport> {
    let n = table.dimension();
    let labels = |top: u32| -> Vec<(u32, u32)> {
        (0..=top)
            .flat_map(|p| (1..=n).map(move |a| (a, p)))
            .collect()
    };
    let hats: Vec<HamiltonianDensity> = labels(pmax + 1)
        .par_iter()
        .map(|&(a, p)| transform_hamiltonian(table, a, p, cap))
        .collect::<Result<_>>()?;
    let lxz: Vec<HamiltonianDensity> = labels(pmax + 1)
        .par_iter()
        .map(|&(a, p)| lxz_hamiltonian(table, a, p, cap))
        .collect::<Result<_>>()?;
    let low = |fam: &[HamiltonianDensity]| -> Vec<HamiltonianDensity> {
        fam.iter().filter(|d| d.p <= pmax).cloned().collect()
    };
    let middle = hats
        .iter()
        .zip(&lxz)
        .filter(|(h, _)| h.p <= pmax && h.alpha > 1 && h.alpha < n)
        .map(|(h, l)| (h.alpha, h.p, h.value == l.value))
        .collect();
    let forward = compare_spans(&low(&hats), &lxz);
    let backward = compare_spans(&low(&lxz), &hats);
    let df = first_order_potential(table, cap)?;
    let first_order = labels(pmax)
        .par_iter()
        .map(|&(a, p)| {
            let lhs = omega_restricted(&df, a, p, cap)?;
            let rhs = first_order_prediction(table, a, p, cap)?;
            Ok((a, p, lhs == rhs))
        })
        .collect::<Result<_>>()?;
    let closed_form = labels(pmax)
        .par_iter()
        .map(|&(a, p)| {
            let th = theta(table, a, p, cap)?.value;
            Ok((a, p, exp_u(&th)?.0 == exp_u_closed_form(&th)?))
        })
        .collect::<Result<_>>()?;
    Ok(HierarchyReport {
        dimension: n,
        pmax,
        cap,
        middle,
        forward,
        backward,
        first_order,
        closed_form,
    })
}

fn label(l: (u32, u32)) -> String {
    format!("theta[{},{}]", l.0, l.1)
}

fn write_span(f: &mut fmt::Formatter<'_>, name: &str, s: &SpanComparison) -> fmt::Result {
    for (l, row) in &s.rows {
        match row {
            SpanRow::Combination(c) => {
                let terms: Vec<String> = c
                    .iter()
                    .map(|(b, x)| format!("{}*{}", format_rational(x), label(*b)))
                    .collect();
                let rhs = if terms.is_empty() {
                    "0".to_string()
                } else {
                    terms.join(" + ")
                };
                writeln!(f, "{name} {} = {rhs}", label(*l))?;
            }
            SpanRow::Outside(v) => {
                let (m, c) = &v[0];
                writeln!(
                    f,
                    "{name} {} OUTSIDE residual {} at {m} ({} terms)",
                    label(*l),
                    format_rational(c),
                    v.len()
                )?;
            }
        }
    }
    Ok(())
}

impl fmt::Display for HierarchyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "hierarchy n={} pmax={} cap={}",
            self.dimension, self.pmax, self.cap
        )?;
        let flag = |b: bool| if b { "ok" } else { "FAIL" };
        for (a, p, ok) in &self.middle {
            writeln!(f, "equal {} {}", label((*a, *p)), flag(*ok))?;
        }
        for (a, p, ok) in &self.first_order {
            writeln!(f, "first-order {} {}", label((*a, *p)), flag(*ok))?;
        }
        for (a, p, ok) in &self.closed_form {
            writeln!(f, "exp-closed-form {} {}", label((*a, *p)), flag(*ok))?;
        }
        write_span(f, "forward", &self.forward)?;
        write_span(f, "backward", &self.backward)?;
        writeln!(f, "status {}", if self.passed() { "ok" } else { "FAIL" })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series(n: u32, terms: &[(&[(u32, u32)], Rational)]) -> TruncatedSeries {
        TruncatedSeries::from_terms(
            n,
            v_caps(4),
            terms.iter().map(|(f, c)| {
                let f: Vec<(Var, u32)> = f.iter().map(|&(mu, k)| (Var::primary(mu), k)).collect();
                (Monomial::from_factors(0, &f), c.clone())
            }),
        )
        .unwrap()
    }

    #[test]
    fn u_on_small_inputs() {
        let n = 3;
        assert_eq!(
            u_operator(&series(n, &[(&[], int(1))])),
            series(n, &[(&[(3, 1)], int(-1))])
        );
        // U(v¹) = −½ Σ_γ v^γ v^{n+1−γ} = −v¹v³ − ½(v²)²
        assert_eq!(
            u_operator(&series(n, &[(&[(1, 1)], int(1))])),
            series(n, &[(&[(1, 1), (3, 1)], int(-1)), (&[(2, 2)], rat(-1, 2))])
        );
        assert!(u_operator(&series(n, &[(&[(3, 1)], int(1))])).is_zero());
    }

    #[test]
    fn exp_u_terminates_and_matches_closed_form() {
        let n = 3;
        let f = series(
            n,
            &[
                (&[(1, 1)], int(2)),
                (&[(2, 2)], rat(1, 3)),
                (&[(1, 1), (3, 2)], int(-5)),
                (&[(2, 1), (3, 1)], rat(7, 4)),
            ],
        );
        let (e, steps) = exp_u(&f).unwrap();
        assert!(steps <= 4);
        assert_eq!(e, exp_u_closed_form(&f).unwrap());
    }

    #[test]
    fn spans_and_certificates() {
        let n = 2;
        let d = |a, p, s: TruncatedSeries| HamiltonianDensity {
            alpha: a,
            p,
            value: s,
        };
        let x = series(n, &[(&[(1, 1)], int(1)), (&[(2, 2)], int(3))]);
        let y = series(n, &[(&[(2, 1)], int(1)), (&[], int(4))]);
        let z = x.scale(&int(2)).sub(&y).unwrap();
        let fam = vec![d(1, 0, x.clone()), d(2, 0, y.clone())];
        let s = compare_spans(&[d(1, 1, z)], &fam);
        assert_eq!(
            s.rows[0].1,
            SpanRow::Combination(vec![((1, 0), int(2)), ((2, 0), int(-1))])
        );
        let w = series(n, &[(&[(1, 2)], int(1))]);
        let s = compare_spans(&[d(1, 1, w)], &fam);
        assert!(!s.contained());
    }
}
