use std::collections::BTreeMap;

use num_traits::Zero;

use super::table::{dual, eta};
use crate::error::{Error, Result};
use crate::rational::{rat, Rational};
use crate::series::{Caps, Monomial, TruncatedSeries, Var};

/// Genus-zero primary potential in normal form
///
/// `F = ½(t¹)²tⁿ + ½t¹ Σ_{σ=2}^{n−1} t^σ t^{n+1−σ} + H(t², …, tⁿ)`,
///
/// stored as its jet (all coefficients of total degree `3..=order`) at the
/// expansion point, in coordinates centred there. Terms of degree `≤ 2` are
/// never stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrobeniusPotential {
    n: u32,
    order: u32,
    f: TruncatedSeries,
    expansion_point: Vec<Rational>,
}

/// The `t¹`-part of the normal form, fixed by the metric.
pub fn eta_part(n: u32, caps: Caps) -> TruncatedSeries {
    let t = Var::primary;
    let mut s = TruncatedSeries::zero(n, caps);
    s.add_term(
        Monomial::from_factors(0, &[(t(1), 2), (t(n), 1)]),
        rat(1, 2),
    );
    for sigma in 2..n {
        let partner = dual(n, sigma);
        if sigma < partner {
            s.add_term(
                Monomial::from_vars(0, [t(1), t(sigma), t(partner)]),
                rat(1, 1),
            );
        } else if sigma == partner {
            s.add_term(
                Monomial::from_vars(0, [t(1), t(sigma), t(sigma)]),
                rat(1, 2),
            );
        }
    }
    s
}

impl FrobeniusPotential {
    /// Validate and normalise a full potential (degree-`≤ 2` terms dropped).
    pub fn new(n: u32, order: u32, f: TruncatedSeries) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidPotential(
                "dimension must be at least 2".into(),
            ));
        }
        if order < 3 {
            return Err(Error::InvalidPotential(
                "jet order must be at least 3".into(),
            ));
        }
        if f.dimension() != n {
            return Err(Error::DimensionMismatch(f.dimension(), n));
        }
        let caps = Caps::new(order, 1);
        let mut terms = TruncatedSeries::zero(n, caps);
        for (m, c) in f.terms() {
            if m.hbar_power() != 0 || m.vars().iter().any(|v| v.d != 0) {
                return Err(Error::InvalidPotential(format!(
                    "{m}: only primary variables and no hbar allowed"
                )));
            }
            if m.degree() > order {
                return Err(Error::InvalidPotential(format!(
                    "{m} exceeds the declared jet order {order}"
                )));
            }
            if m.degree() >= 3 {
                terms.add_term(m.clone(), c.clone());
            }
        }
        let with_unit = terms.filter(|m| m.power_of(Var::primary(1)) > 0);
        let expected = eta_part(n, caps);
        if with_unit != expected {
            return Err(Error::InvalidPotential(
                "terms containing t^1 must be exactly the metric part \
                 1/2 (t1)^2 tn + 1/2 t1 sum t^s t^(n+1-s)"
                    .into(),
            ));
        }
        let mut point = vec![Rational::zero(); n as usize];
        point[n as usize - 1] = rat(1, 1);
        Ok(FrobeniusPotential {
            n,
            order,
            f: terms,
            expansion_point: point,
        })
    }

    /// `F = η-part + H`; `H` must not involve `t¹`.
    pub fn from_h(n: u32, order: u32, h: &TruncatedSeries) -> Result<Self> {
        let caps = Caps::new(order, 1);
        let f = eta_part(n, caps).add(&h.retruncate(caps))?;
        Self::new(n, order, f)
    }

    /// The 2D family `(t¹)²t²/2 + Σ_k σ_k (t²)^k / k!`, `sigmas[i] = σ_{i+3}`.
    pub fn two_dimensional(sigmas: &[Rational]) -> Result<Self> {
        let order = sigmas.len() as u32 + 2;
        let caps = Caps::new(order, 1);
        let mut h = TruncatedSeries::zero(2, caps);
        for (i, s) in sigmas.iter().enumerate() {
            let k = i as u32 + 3;
            let m = Monomial::from_factors(0, &[(Var::primary(2), k)]);
            h.add_term(m, s / crate::rational::factorial_r(k));
        }
        Self::from_h(2, order, &h)
    }

    pub fn dimension(&self) -> u32 {
        self.n
    }

    /// Highest total degree whose coefficients are known.
    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn series(&self) -> &TruncatedSeries {
        &self.f
    }

    /// A label only: the point the stored jet is centred at.
    pub fn expansion_point(&self) -> &[Rational] {
        &self.expansion_point
    }

    pub fn with_expansion_point(mut self, point: Vec<Rational>) -> Self {
        self.expansion_point = point;
        self
    }

    /// `H = F − η-part`.
    pub fn h(&self) -> TruncatedSeries {
        self.f.filter(|m| m.power_of(Var::primary(1)) == 0)
    }

    /// `⟨τ₀(μ₁)⋯τ₀(μ_k)⟩₀ = ∂^k F(0)`.
    pub fn correlator(&self, mus: &[u32]) -> Result<Rational> {
        if mus.len() as u32 > self.order {
            return Err(Error::CapInsufficient(format!(
                "{}-point correlator requested from a jet of order {}",
                mus.len(),
                self.order
            )));
        }
        let m = Monomial::from_vars(0, mus.iter().map(|&mu| Var::primary(mu)));
        Ok(self.f.get(&m) * Rational::from_integer(m.aut()))
    }

    /// `∂_a∂_b∂_c F` as a polynomial of degree `≤ order − 3`.
    pub fn third_derivative(&self, a: u32, b: u32, c: u32) -> Result<TruncatedSeries> {
        let t = Var::primary;
        self.f.partial(t(a))?.partial(t(b))?.partial(t(c))
    }

    /// Largest violation of WDVV:
    /// `Σ_λ F_{αβλ} η^{λσ} F_{σγδ}` must be symmetric under `β ↔ γ`.
    /// Returns every `(α, β, γ, δ)` with a nonzero defect, with the defect.
    pub fn wdvv_defects(&self) -> Result<Vec<((u32, u32, u32, u32), TruncatedSeries)>> {
        let n = self.n;
        let mut third: BTreeMap<(u32, u32, u32), TruncatedSeries> = BTreeMap::new();
        for a in 1..=n {
            for b in a..=n {
                for c in b..=n {
                    third.insert((a, b, c), self.third_derivative(a, b, c)?);
                }
            }
        }
        let get = |a: u32, b: u32, c: u32| {
            let mut k = [a, b, c];
            k.sort_unstable();
            &third[&(k[0], k[1], k[2])]
        };
        let contract = |a: u32, b: u32, c: u32, d: u32| -> Result<TruncatedSeries> {
            let mut acc = TruncatedSeries::zero(n, get(1, 1, 1).caps());
            for lambda in 1..=n {
                let sigma = dual(n, lambda);
                let term = get(a, b, lambda)
                    .mul(get(sigma, c, d))?
                    .scale(&eta(n, lambda, sigma));
                acc = acc.add(&term)?;
            }
            Ok(acc)
        };
        let mut out = Vec::new();
        for a in 1..=n {
            for b in 1..=n {
                for c in 1..=n {
                    for d in 1..=n {
                        let defect = contract(a, b, c, d)?.sub(&contract(a, c, b, d)?)?;
                        if !defect.is_zero() {
                            out.push(((a, b, c, d), defect));
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn satisfies_wdvv(&self) -> Result<bool> {
        Ok(self.wdvv_defects()?.is_empty())
    }
}
