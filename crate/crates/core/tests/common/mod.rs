#![allow(dead_code)]

use givental_core::cohft::{
    insertion_multisets, reconstruct_descendants, CorrelatorTable, FrobeniusPotential, TableCaps,
};
use givental_core::givental::RMatrix;
use givental_core::matrix::Mat;
use givental_core::rational::{int, rat, Rational};
use givental_core::series::{Caps, Monomial, TruncatedSeries, Var};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn small_rational(r: &mut ChaCha8Rng) -> Rational {
    let p: i64 = r.random_range(-9..=9);
    let q: i64 = r.random_range(1..=5);
    rat(p, q)
}

pub fn nonzero_rational(r: &mut ChaCha8Rng) -> Rational {
    loop {
        let x = small_rational(r);
        if x != int(0) {
            return x;
        }
    }
}

/// Random bivectors with the right parity, lowered into an `RMatrix`.
pub fn random_rmatrix(r: &mut ChaCha8Rng, n: u32, levels: &[u32]) -> RMatrix {
    let mut out = Vec::new();
    for &l in levels {
        let mut b = Mat::zero(n);
        for mu in 1..=n {
            for nu in mu..=n {
                let x = small_rational(r);
                if l % 2 == 1 {
                    b.set(mu, nu, x.clone());
                    b.set(nu, mu, x);
                } else if mu != nu {
                    b.set(mu, nu, x.clone());
                    b.set(nu, mu, -x);
                }
            }
        }
        out.push((l, b));
    }
    RMatrix::from_bivectors(n, out).unwrap()
}

/// Every tame stable monomial `ħ^{g−1}Π t` with `χ ≥ 1` inside `caps`.
pub fn tame_monomials(n: u32, caps: Caps, max_genus: u32) -> Vec<Monomial> {
    let s = caps.stable_bound().expect("stable caps");
    let mut out = Vec::new();
    for g in 0..=max_genus {
        let e = g as i64 - 1;
        let kmax = s.chi - 2 * e;
        for k in 0..=kmax.max(0) {
            let level = 3 * e + k;
            if 2 * e + k < 1 || level < 0 {
                continue;
            }
            for ins in insertion_multisets(n, k as usize, level as u32) {
                let m = Monomial::from_vars(e as i32, ins.iter().map(|i| i.var()));
                if caps.contains(&m) {
                    out.push(m);
                }
            }
        }
    }
    out
}

/// Sparse random tame log-series on stable caps.
pub fn random_tame_log(
    r: &mut ChaCha8Rng,
    n: u32,
    caps: Caps,
    max_genus: u32,
    density: f64,
) -> TruncatedSeries {
    let mut f = TruncatedSeries::zero(n, caps);
    for m in tame_monomials(n, caps, max_genus) {
        if r.random_bool(density) {
            f.add_term(m, nonzero_rational(r));
        }
    }
    f
}

pub fn two_dim_sigmas(r: &mut ChaCha8Rng, count: usize) -> Vec<Rational> {
    (0..count).map(|_| nonzero_rational(r)).collect()
}

pub fn genus_zero_table(f: &FrobeniusPotential, points: u32, level: u32) -> CorrelatorTable {
    reconstruct_descendants(
        f,
        TableCaps {
            max_genus: 0,
            max_points: points,
            max_level: level,
        },
    )
    .unwrap()
}

/// Random `n = 2` potential `(t¹)²t²/2 + Σ σ_k (t²)^k/k!` (WDVV is automatic).
pub fn random_two_dim(r: &mut ChaCha8Rng, order: u32) -> FrobeniusPotential {
    FrobeniusPotential::two_dimensional(&two_dim_sigmas(r, order as usize - 2)).unwrap()
}

/// Random `n = 3` potential satisfying WDVV to the given order.
///
/// With `F = ½(t¹)²t³ + ½t¹(t²)² + H(t², t³)` WDVV reduces to
/// `H₃₃₃ = H₂₂₃² − H₂₂₂H₂₃₃`. The coefficients of `(t²)^a` and `(t²)^a t³`
/// are free; every coefficient with `t³`-power `≥ 3` is solved for degree by
/// degree from lower ones, and those with `t³`-power 2 are free as well.
pub fn random_three_dim(r: &mut ChaCha8Rng, order: u32) -> FrobeniusPotential {
    let t2 = Var::primary(2);
    let t3 = Var::primary(3);
    let caps = Caps::new(order, 1);
    let mut h = TruncatedSeries::zero(3, caps);
    for deg in 3..=order {
        for b in 0..=deg.min(2) {
            let m = Monomial::from_factors(0, &[(t2, deg - b), (t3, b)]);
            h.add_term(m, small_rational(r));
        }
        // solve for the t³-power ≥ 3 part of degree `deg` from the identity in degree deg − 3
        for b in 3..=deg {
            let a = deg - b;
            let lhs_target = {
                let d = |s: &TruncatedSeries, v: Var| s.partial(v).unwrap();
                let h223 = d(&d(&d(&h, t2), t2), t3);
                let h222 = d(&d(&d(&h, t2), t2), t2);
                let h233 = d(&d(&d(&h, t2), t3), t3);
                let rhs = h223
                    .mul(&h223)
                    .unwrap()
                    .sub(&h222.mul(&h233).unwrap())
                    .unwrap();
                // coefficient of (t²)^a (t³)^{b−3} in the right-hand side
                rhs.get(&Monomial::from_factors(0, &[(t2, a), (t3, b - 3)]))
            };
            // H₃₃₃ coefficient there is c · b(b−1)(b−2)
            let c = lhs_target / int((b * (b - 1) * (b - 2)) as i64);
            h.add_term(Monomial::from_factors(0, &[(t2, a), (t3, b)]), c);
        }
    }
    let f = FrobeniusPotential::from_h(3, order, &h).unwrap();
    assert!(f.satisfies_wdvv().unwrap());
    f
}
