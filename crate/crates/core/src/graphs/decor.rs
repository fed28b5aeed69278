use std::collections::BTreeMap;

use num_traits::Zero;

use crate::error::Result;
use crate::givental::{edge_kernel, RMatrix};
use crate::matrix::MatSeries2;
use crate::rational::Rational;
use crate::series::Var;

/// `Σ e_μ z^j ⊗ (linear form in t)`, keyed by `(μ, j)`.
pub type VectorSeries = BTreeMap<(u32, u32), BTreeMap<Var, Rational>>;

/// `𝓛 = exp(r(z)) Σ e_μ t^{d,μ} z^d` for `d ≤ max_level`, up to `z^zcap`.
pub fn leaf_vector(r: &RMatrix, max_level: u32, zcap: u32) -> VectorSeries {
    let n = r.dimension();
    let e = r.exp_series(zcap);
    let mut out: VectorSeries = BTreeMap::new();
    for d in 0..=max_level.min(zcap) {
        for (j, ej) in e.iter().enumerate().take((zcap - d) as usize + 1) {
            for (mu, nu, c) in ej.entries() {
                out.entry((mu, d + j as u32))
                    .or_default()
                    .insert(Var::new(d, nu), c.clone());
            }
        }
    }
    debug_assert!(out.keys().all(|&(mu, _)| mu <= n));
    out
}

/// `𝓛₀ = −z(exp(r(z)) − I)e₁`, keyed by `(μ, j)`, up to `z^zcap`.
pub fn dilaton_leaf_vector(r: &RMatrix, zcap: u32) -> BTreeMap<(u32, u32), Rational> {
    let n = r.dimension();
    let e = r.exp_series(zcap);
    let mut out = BTreeMap::new();
    for j in 2..=zcap {
        for mu in 1..=n {
            let c = e[j as usize - 1].get(mu, 1);
            if !c.is_zero() {
                out.insert((mu, j), -c.clone());
            }
        }
    }
    out
}

/// `𝓔 / ħ` as raised bivectors: entry `(a, b)` is the matrix of
/// `e_μ z^a ⊗ e_ν w^b` coefficients, for `a, b ≤ zcap`. Swapping the ends
/// (`a ↔ b`, `μ ↔ ν`) leaves it unchanged.
pub fn edge_bivector(r: &RMatrix, zcap: u32) -> Result<MatSeries2> {
    let minus = Rational::from_integer((-1).into());
    Ok(edge_kernel(r, 2 * zcap)?
        .into_iter()
        .filter(|((a, b), _)| *a <= zcap && *b <= zcap)
        .map(|(ab, m)| (ab, m.raise().scale(&minus)))
        .filter(|(_, m)| !m.is_zero())
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::Mat;
    use crate::rational::int;

    #[test]
    fn inversion_decorations() {
        let n = 3;
        let r = RMatrix::inversion(n);
        let l = leaf_vector(&r, 0, 2);
        // 𝓛 = z e₁ tⁿ + Σ e_μ t^μ
        assert_eq!(l[&(1, 1)], BTreeMap::from([(Var::primary(n), int(1))]));
        for mu in 1..=n {
            assert_eq!(l[&(mu, 0)], BTreeMap::from([(Var::primary(mu), int(1))]));
        }
        assert_eq!(l.len(), n as usize + 1);
        assert!(dilaton_leaf_vector(&r, 4).is_empty());
        let e = edge_bivector(&r, 3).unwrap();
        assert_eq!(e.len(), 1);
        assert_eq!(e[&(0, 0)], Mat::unit(n, 1, 1).scale(&int(-1)));
    }

    #[test]
    fn trivial_decorations() {
        let r = RMatrix::zero(2);
        assert!(edge_bivector(&r, 3).unwrap().is_empty());
        assert!(dilaton_leaf_vector(&r, 3).is_empty());
        assert_eq!(leaf_vector(&r, 1, 3).len(), 4);
    }

    #[test]
    fn edge_is_orientation_symmetric() {
        let r = RMatrix::from_bivectors(
            2,
            [
                (1, Mat::identity(2)),
                (2, Mat::unit(2, 1, 2).sub(&Mat::unit(2, 2, 1))),
            ],
        )
        .unwrap();
        let e = edge_bivector(&r, 4).unwrap();
        for (&(a, b), m) in &e {
            assert_eq!(e.get(&(b, a)), Some(&m.transpose()), "at {a},{b}");
        }
    }
}
