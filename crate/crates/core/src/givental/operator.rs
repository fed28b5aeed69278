//! The quantized operators `(r_l z^l)^` and their exponential.

use std::collections::{BTreeMap, HashMap};

use num_traits::Zero;

use super::rmatrix::RMatrix;
use crate::cohft::{CorrelatorTable, TableCaps};
use crate::error::{Error, Result};
use crate::matrix::Mat;
use crate::rational::{int, rat, Rational};
use crate::series::{Caps, Monomial, TruncatedSeries, Var};

/// A differential operator of order `≤ 2` with constant, linear and `ħ`
/// quadratic parts:
///
/// `Σ c_v ∂_v + Σ_l Σ_d t^{d,ν} (M_l)^μ_ν ∂_{d+l,μ} + ħ Σ B_{ab}^{μν} ∂_{a,μ}∂_{b,ν}`.
#[derive(Clone, Debug, Default)]
pub(crate) struct DiffOp {
    pub shift: BTreeMap<Var, Rational>,
    pub linear: BTreeMap<u32, Mat>,
    pub quadratic: BTreeMap<(u32, u32), Mat>,
}

impl DiffOp {
    pub fn is_zero(&self) -> bool {
        self.shift.is_empty() && self.linear.is_empty() && self.quadratic.is_empty()
    }

    pub fn add_shift(&mut self, v: Var, c: Rational) {
        if c.is_zero() {
            return;
        }
        let e = self.shift.entry(v).or_insert_with(Rational::zero);
        *e += c;
        if e.is_zero() {
            self.shift.remove(&v);
        }
    }

    pub fn add_linear(&mut self, l: u32, m: &Mat) {
        if m.is_zero() {
            return;
        }
        let e = self.linear.entry(l).or_insert_with(|| Mat::zero(m.dim()));
        *e = e.add(m);
    }

    pub fn add_quadratic(&mut self, a: u32, b: u32, m: &Mat) {
        if m.is_zero() {
            return;
        }
        let e = self
            .quadratic
            .entry((a, b))
            .or_insert_with(|| Mat::zero(m.dim()));
        *e = e.add(m);
    }

    fn raises_by(&self) -> (bool, bool) {
        (!self.shift.is_empty(), !self.quadratic.is_empty())
    }

    /// Apply term by term; output keeps the input caps (the caller decides
    /// whether those are still exact).
    pub fn apply_raw(&self, z: &TruncatedSeries) -> TruncatedSeries {
        let mut acc: HashMap<Monomial, Rational> = HashMap::new();
        let mut push = |m: Monomial, c: Rational| {
            let e = acc.entry(m).or_insert_with(Rational::zero);
            *e += c;
        };
        for (m, c) in z.terms() {
            let factors = m.factors();
            for (v, k) in &self.shift {
                let p = m.power_of(*v);
                if p > 0 {
                    push(m.without(*v).unwrap(), c * k * int(p as i64));
                }
            }
            for &(x, p) in &factors {
                let rest = m.without(x).unwrap();
                for (&l, mat) in &self.linear {
                    if x.d < l {
                        continue;
                    }
                    for nu in 1..=mat.dim() {
                        let a = mat.get(x.mu, nu);
                        if !a.is_zero() {
                            push(rest.with(Var::new(x.d - l, nu)), c * a * int(p as i64));
                        }
                    }
                }
            }
            for (&(a, b), bv) in &self.quadratic {
                for &(x, px) in factors.iter().filter(|(x, _)| x.d == a) {
                    let after_x = m.without(x).unwrap();
                    for &(y, py) in factors.iter().filter(|(y, _)| y.d == b) {
                        let w = bv.get(x.mu, y.mu);
                        if w.is_zero() {
                            continue;
                        }
                        let mult = if x == y {
                            if px < 2 {
                                continue;
                            }
                            px as i64 * (px as i64 - 1)
                        } else {
                            px as i64 * py as i64
                        };
                        let out = after_x.without(y).unwrap();
                        let out = out.clone().with_hbar(out.hbar_power() + 1);
                        push(out, c * w * int(mult));
                    }
                }
            }
        }
        let mut out = TruncatedSeries::zero(z.dimension(), z.caps());
        for (m, c) in acc {
            out.add_term(m, c);
        }
        out
    }

    /// Apply with the reliable region adjusted: in the stable regime the
    /// region is preserved (every term raises `δ`), in the box regime each
    /// derivative lowers the degree watermark.
    pub fn apply(&self, z: &TruncatedSeries) -> Result<TruncatedSeries> {
        let (shift, quad) = self.raises_by();
        let caps = z.caps();
        let out_caps = match caps.stable_bound() {
            Some(s) => {
                if shift && !s.dilaton {
                    return Err(Error::CapInsufficient(
                        "operator has a dilaton shift but the stable region was built without one"
                            .into(),
                    ));
                }
                caps
            }
            None => {
                if quad {
                    caps.after_partial().after_partial()
                } else if shift {
                    caps.after_partial()
                } else {
                    caps
                }
            }
        };
        Ok(self.apply_raw(z).retruncate(out_caps))
    }

    /// `Σ_k Aᵏ Z / k!` on a stable-region series. Every term raises `δ` by at
    /// least one and `δ ≤ Δ` on the region, so at most `Δ + 1` steps are
    /// nonzero.
    pub fn exponentiate(&self, z: &TruncatedSeries) -> Result<TruncatedSeries> {
        let s = z.caps().stable_bound().ok_or_else(|| {
            Error::CapsMismatch("operator exponentials need a stable truncation".into())
        })?;
        if self.is_zero() {
            return Ok(z.clone());
        }
        let bound = (s.delta.max(0) + 2) as usize;
        let mut total = z.clone();
        let mut term = z.clone();
        for k in 1..=bound + 1 {
            term = self.apply(&term)?.scale(&rat(1, k as i64));
            if term.is_zero() {
                return Ok(total);
            }
            total = total.add(&term)?;
        }
        Err(Error::NonTerminating(bound))
    }
}

/// `(r_l z^l)^` as a [`DiffOp`].
pub(crate) fn quantize(r: &Mat, l: u32) -> DiffOp {
    let n = r.dim();
    let mut op = DiffOp::default();
    for mu in 1..=n {
        op.add_shift(Var::new(l + 1, mu), -r.get(mu, 1).clone());
    }
    op.add_linear(l, r);
    // (ħ/2) Σ_i (−1)^{l+i} r^{μν} ∂_{i,μ}∂_{l−1−i,ν}. For odd l this is the
    // familiar (−1)^{i+1}; for even l the sign is the one that makes
    // r ↦ (r z^l)^ an anti-homomorphism once odd and even levels mix.
    let raised = r.raise();
    for i in 0..l {
        let sign = if (l + i) % 2 == 0 {
            rat(1, 2)
        } else {
            rat(-1, 2)
        };
        op.add_quadratic(i, l - 1 - i, &raised.scale(&sign));
    }
    op
}

pub(crate) fn quantize_all(r: &RMatrix) -> DiffOp {
    let mut op = DiffOp::default();
    for (&l, m) in r.levels() {
        let q = quantize(m, l);
        for (v, c) in q.shift {
            op.add_shift(v, c);
        }
        for (l, m) in &q.linear {
            op.add_linear(*l, m);
        }
        for ((a, b), m) in &q.quadratic {
            op.add_quadratic(*a, *b, m);
        }
    }
    op
}

fn level_matrix(n: u32, r: &Mat, l: u32) -> Result<()> {
    if l == 0 {
        return Err(Error::InvalidArgument("levels start at 1".into()));
    }
    if r.dim() != n {
        return Err(Error::DimensionMismatch(r.dim(), n));
    }
    Ok(())
}

/// `(r_l z^l)^ Z`: dilaton, linear and quadratic terms.
pub fn apply_infinitesimal(r: &Mat, l: u32, z: &TruncatedSeries) -> Result<TruncatedSeries> {
    level_matrix(z.dimension(), r, l)?;
    quantize(r, l).apply(z)
}

/// `R̂ Z = exp(Σ_l (r_l z^l)^) Z`. `Z` must carry stable caps (with the
/// dilaton weight whenever `r` has a dilaton shift); the result is exact on
/// the same region.
pub fn exponentiate_action(r: &RMatrix, z: &TruncatedSeries) -> Result<TruncatedSeries> {
    if r.dimension() != z.dimension() {
        return Err(Error::DimensionMismatch(r.dimension(), z.dimension()));
    }
    quantize_all(r).exponentiate(z)
}

/// The stable caps used to compute the box `caps` of `log(R̂ Z)` exactly.
pub fn working_caps(r: &RMatrix, caps: Caps) -> Caps {
    Caps::stable(
        caps.degree_cap().max(0) as u32,
        caps.genus_cap().max(0) as u32,
        r.has_dilaton(),
    )
}

/// What a table must know (in each genus it covers) for the operator route
/// to be exact on the box `caps`.
pub fn required_table_caps(r: &RMatrix, caps: Caps, max_genus: u32) -> TableCaps {
    let s = working_caps(r, caps).stable_bound().expect("stable");
    // genus-g terms of the region satisfy 2g − 2 + k ≤ X and Σd ≤ 3g − 3 + k
    TableCaps {
        max_genus,
        max_points: (s.chi + 2).max(0) as u32,
        max_level: (s.chi + max_genus as i64 - 1).max(0) as u32,
    }
}

/// `log(R̂ exp(F))` on box `caps`, with `F` read from `table`. Genera above
/// the table's genus cap count as absent.
pub fn transform_table(
    r: &RMatrix,
    table: &CorrelatorTable,
    caps: Caps,
) -> Result<TruncatedSeries> {
    let caps = caps.boxed();
    let need = required_table_caps(r, caps, table.caps().max_genus);
    let have = table.caps();
    if have.max_points < need.max_points || have.max_level < need.max_level {
        return Err(Error::CapInsufficient(format!(
            "operator route needs tables with {} points and level {}, have {have:?}",
            need.max_points, need.max_level
        )));
    }
    let work = working_caps(r, caps);
    let f = table.to_log_series(work)?;
    let z = f.exp()?;
    let out = exponentiate_action(r, &z)?;
    Ok(out.log()?.restrict_to_box())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    #[test]
    fn zero_matrix_is_zero_operator() {
        let z = TruncatedSeries::from_terms(
            2,
            Caps::new(4, 1),
            [(Monomial::from_vars(-1, [Var::primary(2); 3]), int(1))],
        )
        .unwrap();
        assert!(apply_infinitesimal(&Mat::zero(2), 1, &z).unwrap().is_zero());
    }

    #[test]
    fn inversion_quadratic_term() {
        // only (r₁)^{11} = 1: the operator on (t^{0,1})² is −ħ/2 · 2 = −ħ
        let r = RMatrix::inversion(2);
        let m = Monomial::from_factors(-1, &[(Var::primary(1), 2)]);
        let z = TruncatedSeries::from_terms(2, Caps::stable(4, 1, false), [(m, int(1))]).unwrap();
        let out = apply_infinitesimal(r.level(1).unwrap(), 1, &z).unwrap();
        // linear part: t^{0,2}... has no t^{1,·} factor, so only the quadratic term survives
        assert_eq!(out.get(&Monomial::one()), int(-1));
        assert_eq!(out.len(), 1);
    }

    #[test]
    fn dilaton_needs_weighted_region() {
        let r = RMatrix::new(2, [(1, Mat::identity(2))]).unwrap();
        let z = TruncatedSeries::one(2, Caps::stable(3, 0, false));
        assert!(exponentiate_action(&r, &z).is_err());
        let z = TruncatedSeries::one(2, Caps::stable(3, 0, true));
        assert_eq!(exponentiate_action(&r, &z).unwrap(), z);
    }
}
