//! `R̂ = exp(linear + dilaton) · exp(quadratic)` with closed-form kernels:
//!
//! `(z+w) Σ V_{k,l} z^k w^l = −(ħ/2)(exp(r(z)) exp(−r(−w)) − I)` and
//! `Σ W_l z^l = −z(exp(r(z)) − I) e₁`.
//!
//! The linear-plus-dilaton exponential is the substitution
//! `q ↦ exp(r(z)) q + W(z)` in the dilaton-shifted coordinates, applied as a
//! constant shift by `W` followed by the linear flow.

use std::collections::BTreeMap;

use super::operator::DiffOp;
use super::rmatrix::RMatrix;
use crate::error::{Error, Result};
use crate::matrix::{divide_by_z_plus_w, Mat, MatSeries2};
use crate::rational::{rat, Rational};
use crate::series::{TruncatedSeries, Var};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactorizedAction {
    n: u32,
    zcap: u32,
    /// The `t^{d,ν}∂_{d+l,μ}` coefficients: the `r_l` themselves.
    pub linear: RMatrix,
    /// Raised bivectors `V_{k,l}^{μν}` (paired with `∂_{k,μ}∂_{l,ν}`) with
    /// the factor `ħ` stripped, for `k, l ≤ zcap`.
    pub v: MatSeries2,
    /// `W_l e₁` for `2 ≤ l ≤ zcap` (`W₁ = 0` always), indexed by `μ − 1`.
    pub w: BTreeMap<u32, Vec<Rational>>,
}

/// `Q(z,w) = (exp(r(z)) exp(−r(−w)) − I)/(z + w)`, all terms of total
/// degree `≤ cap`. Raised, `Q_{k,l}^{μν}` pairs `μ` with `z^k` and `ν` with
/// `w^l`. For `r` of a single parity the factors commute and the order is
/// immaterial; with mixed parities this order is the one compatible with
/// [`apply_infinitesimal`](super::apply_infinitesimal).
pub fn edge_kernel(r: &RMatrix, cap: u32) -> Result<MatSeries2> {
    let n = r.dimension();
    let e = r.exp_series(cap + 1);
    let a = r.exp_series_reflected(cap + 1);
    let mut p: MatSeries2 = BTreeMap::new();
    for (i, ei) in e.iter().enumerate() {
        for (j, aj) in a.iter().enumerate() {
            if i + j > cap as usize + 1 {
                break;
            }
            let mut m = ei.mul(aj);
            if i == 0 && j == 0 {
                m = m.sub(&Mat::identity(n));
            }
            if !m.is_zero() {
                p.insert((i as u32, j as u32), m);
            }
        }
    }
    divide_by_z_plus_w(n, &p, cap + 1)
}

/// Kernels of the factorised action, valid for series whose variables have
/// descendant level `≤ zcap`.
pub fn factorize(r: &RMatrix, zcap: u32) -> Result<FactorizedAction> {
    let n = r.dimension();
    let q = edge_kernel(r, 2 * zcap)?;
    let half = rat(-1, 2);
    let v = q
        .into_iter()
        .filter(|((k, l), _)| *k <= zcap && *l <= zcap)
        .map(|(kl, m)| (kl, m.raise().scale(&half)))
        .collect();
    let e = r.exp_series(zcap);
    let mut w = BTreeMap::new();
    for l in 2..=zcap {
        let col: Vec<Rational> = (1..=n)
            .map(|mu| -e[l as usize - 1].get(mu, 1).clone())
            .collect();
        if col.iter().any(|c| !num_traits::Zero::is_zero(c)) {
            w.insert(l, col);
        }
    }
    Ok(FactorizedAction {
        n,
        zcap,
        linear: r.clone(),
        v,
        w,
    })
}

impl FactorizedAction {
    pub fn dimension(&self) -> u32 {
        self.n
    }

    pub fn zcap(&self) -> u32 {
        self.zcap
    }

    fn quadratic_op(&self) -> DiffOp {
        let mut op = DiffOp::default();
        for (&(k, l), m) in &self.v {
            op.add_quadratic(k, l, m);
        }
        op
    }

    fn shift_op(&self) -> DiffOp {
        let mut op = DiffOp::default();
        for (&l, col) in &self.w {
            for (i, c) in col.iter().enumerate() {
                op.add_shift(Var::new(l, i as u32 + 1), c.clone());
            }
        }
        op
    }

    fn linear_op(&self) -> DiffOp {
        let mut op = DiffOp::default();
        for (&l, m) in self.linear.levels() {
            op.add_linear(l, m);
        }
        op
    }
}

/// `exp(X) exp(T_W) exp(ħV) Z`; must agree with
/// [`exponentiate_action`](super::exponentiate_action). None of the three
/// steps raises a descendant level, so `zcap` only has to cover `Z`.
pub fn apply_factorized(f: &FactorizedAction, z: &TruncatedSeries) -> Result<TruncatedSeries> {
    if f.n != z.dimension() {
        return Err(Error::DimensionMismatch(f.n, z.dimension()));
    }
    let top = z
        .terms()
        .flat_map(|(m, _)| m.vars().iter().map(|v| v.d))
        .max()
        .unwrap_or(0);
    if top > f.zcap {
        return Err(Error::CapInsufficient(format!(
            "series has descendant level {top} but the kernels stop at {}",
            f.zcap
        )));
    }
    let z = f.quadratic_op().exponentiate(z)?;
    let z = f.shift_op().exponentiate(&z)?;
    f.linear_op().exponentiate(&z)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_order_kernel() {
        let r = RMatrix::inversion(2);
        let f = factorize(&r, 3).unwrap();
        assert_eq!(f.v.len(), 1);
        assert_eq!(f.v[&(0, 0)], Mat::unit(2, 1, 1).scale(&rat(-1, 2)));
        assert!(f.w.is_empty());
        let zero = factorize(&RMatrix::zero(2), 3).unwrap();
        assert!(zero.v.is_empty() && zero.w.is_empty());
    }

    #[test]
    fn identity_level_one_dilaton_kernel() {
        let r = RMatrix::new(2, [(1, Mat::identity(2))]).unwrap();
        let f = factorize(&r, 3).unwrap();
        // −z(e^z − 1)e₁ = −z² e₁ − z³/2 e₁ − …
        assert_eq!(f.w[&2], vec![rat(-1, 1), rat(0, 1)]);
        assert_eq!(f.w[&3], vec![rat(-1, 2), rat(0, 1)]);
    }
}
