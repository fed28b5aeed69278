use std::collections::hash_map::Entry;
use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::{Caps, Monomial, TruncatedSeries, Var};
use crate::error::{Error, Result};
use crate::rational::{int, Rational};

type Terms = BTreeMap<Monomial, Rational>;

fn collect(acc: HashMap<Monomial, Rational>) -> Terms {
    acc.into_iter().filter(|(_, c)| !c.is_zero()).collect()
}

/// Convolution of two term maps, keeping only products accepted by `keep`.
fn mul_terms(a: &Terms, b: &Terms, keep: &dyn Fn(&Monomial) -> bool) -> Terms {
    let mut acc: HashMap<Monomial, Rational> = HashMap::new();
    for (ma, ca) in a {
        for (mb, cb) in b {
            let m = ma.mul(mb);
            if !keep(&m) {
                continue;
            }
            let c = ca * cb;
            match acc.get_mut(&m) {
                Some(x) => *x += c,
                None => {
                    acc.insert(m, c);
                }
            }
        }
    }
    collect(acc)
}

fn add_into(acc: &mut Terms, other: &Terms, scale: &Rational) {
    for (m, c) in other {
        let c = c * scale;
        match acc.get_mut(m) {
            Some(x) => {
                *x += c;
                if x.is_zero() {
                    acc.remove(m);
                }
            }
            None => {
                if !c.is_zero() {
                    acc.insert(m.clone(), c);
                }
            }
        }
    }
}

/// Split by `χ`; every key is at least 1 (checked by the caller).
fn by_chi(t: &Terms) -> BTreeMap<i64, Terms> {
    let mut out: BTreeMap<i64, Terms> = BTreeMap::new();
    for (m, c) in t {
        out.entry(m.chi()).or_default().insert(m.clone(), c.clone());
    }
    out
}

/// `exp` on the stable region through the Euler-operator recursion
/// `c·Z_c = Σ_j j·F_j·Z_{c−j}` (grading by `χ ≥ 1`). The region is closed
/// under taking tame factors, so each truncated product is exact.
fn exp_graded(f: &Terms, caps: Caps, top: i64) -> Terms {
    let fj = by_chi(f);
    let mut z: Vec<Terms> = vec![Terms::new(); top.max(0) as usize + 1];
    z[0].insert(Monomial::one(), Rational::one());
    let keep = |m: &Monomial| caps.contains(m);
    for c in 1..=top {
        let mut acc = Terms::new();
        for (&j, part) in fj.range(1..=c) {
            let prev = &z[(c - j) as usize];
            if prev.is_empty() {
                continue;
            }
            add_into(&mut acc, &mul_terms(part, prev, &keep), &int(j));
        }
        let inv = Rational::new(BigInt::one(), BigInt::from(c));
        z[c as usize] = acc.into_iter().map(|(m, x)| (m, x * &inv)).collect();
    }
    z.into_iter().flatten().collect()
}

/// Inverse of [`exp_graded`]: `c·F_c = c·Z_c − Σ_{j<c} j·F_j·Z_{c−j}`.
fn log_graded(zt: &Terms, caps: Caps, top: i64) -> Terms {
    let zc = by_chi(zt);
    let keep = |m: &Monomial| caps.contains(m);
    let mut f: BTreeMap<i64, Terms> = BTreeMap::new();
    for c in 1..=top {
        let mut acc = zc.get(&c).cloned().unwrap_or_default();
        let mut corr = Terms::new();
        for (&j, part) in f.range(1..c) {
            if let Some(prev) = zc.get(&(c - j)) {
                add_into(&mut corr, &mul_terms(part, prev, &keep), &int(j));
            }
        }
        add_into(
            &mut acc,
            &corr,
            &Rational::new(BigInt::from(-1), BigInt::from(c)),
        );
        if !acc.is_empty() {
            f.insert(c, acc);
        }
    }
    f.into_values().flatten().collect()
}

impl TruncatedSeries {
    fn check_dims(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch(self.n, other.n));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_dims(other)?;
        let caps = self.caps.meet(&other.caps)?;
        let mut terms: Terms = self
            .terms
            .iter()
            .filter(|(m, _)| caps.contains(m))
            .map(|(m, c)| (m.clone(), c.clone()))
            .collect();
        let other = other.retruncate(caps);
        add_into(&mut terms, &other.terms, &Rational::one());
        Ok(TruncatedSeries::from_map(self.n, caps, terms))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.scale(&-Rational::one())
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return TruncatedSeries::zero(self.n, self.caps);
        }
        TruncatedSeries::from_map(
            self.n,
            self.caps,
            self.terms.iter().map(|(m, x)| (m.clone(), x * c)).collect(),
        )
    }

    /// Multiply every monomial by `m` (e.g. a power of `ħ`), re-truncating.
    pub fn shift(&self, m: &Monomial) -> Self {
        let mut out = TruncatedSeries::zero(self.n, self.caps);
        for (k, c) in &self.terms {
            out.add_term(k.mul(m), c.clone());
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_dims(other)?;
        let caps = self.caps.meet(&other.caps)?;
        let terms = mul_terms(&self.terms, &other.terms, &|m| caps.contains(m));
        Ok(TruncatedSeries::from_map(self.n, caps, terms))
    }

    /// Smallest power-closed region containing the reliable box, in which
    /// powers of `b` can be computed without losing terms that later return
    /// to the caps. See the module docs for the stable case.
    fn power_region(&self, b: &Terms) -> Result<(Box<dyn Fn(&Monomial) -> bool>, usize)> {
        let caps = self.caps;
        if let Some(s) = caps.stable_bound() {
            for m in b.keys() {
                if m.delta() < 0 || m.chi() < 1 {
                    return Err(Error::NotTame(format!(
                        "term {m} has delta {} and chi {}",
                        m.delta(),
                        m.chi()
                    )));
                }
            }
            let bound = s.chi.max(0) as usize + 2;
            return Ok((Box::new(move |m: &Monomial| caps.contains(m)), bound));
        }
        // Box: a term with e > G−1 can only come back under the cap by
        // multiplying with negative-ħ terms, each of which costs t-degree.
        // ρ = max(−e/k) over such terms bounds how far back it can come.
        let mut rho = Rational::zero();
        for m in b.keys() {
            let e = m.hbar_power() as i64;
            let k = m.degree() as i64;
            if k == 0 && e <= 0 {
                return Err(Error::NonzeroConstant(format!("hbar^{e}")));
            }
            if e < 0 {
                rho = rho.max(int(-e) / int(k));
            }
        }
        let (d, g) = (caps.degree_cap(), caps.genus_cap());
        let p = rho.numer().clone();
        let q = rho.denom().clone();
        let extra = (&rho * int(d.max(0))).ceil().to_integer();
        let bound =
            (d.max(0) + g.max(0) + 2) as usize + usize::try_from(extra).unwrap_or(usize::MAX / 2);
        let keep = move |m: &Monomial| {
            let k = m.degree() as i64;
            let e = m.hbar_power() as i64;
            k <= d && &q * BigInt::from(e - (g - 1)) <= &p * BigInt::from(d - k)
        };
        Ok((Box::new(keep), bound))
    }

    /// `Σ a^k/k!`. The constant term must vanish at `ħ⁰`; negative powers of
    /// `ħ` are fine as long as they come with `t`'s.
    pub fn exp(&self) -> Result<Self> {
        let c0 = self.get(&Monomial::one());
        if !c0.is_zero() {
            return Err(Error::NonzeroConstant(crate::rational::format_rational(
                &c0,
            )));
        }
        let (keep, bound) = self.power_region(&self.terms)?;
        if let Some(s) = self.caps.stable_bound() {
            let top = s.chi;
            return Ok(TruncatedSeries::from_map(
                self.n,
                self.caps,
                exp_graded(&self.terms, self.caps, top),
            ));
        }
        let mut total: Terms = BTreeMap::new();
        total.insert(Monomial::one(), Rational::one());
        let mut power = self.terms.clone();
        let mut k = 1usize;
        while !power.is_empty() {
            add_into(&mut total, &power, &Rational::one());
            k += 1;
            if k > bound + 1 {
                return Err(Error::NonTerminating(bound));
            }
            let next = mul_terms(&power, &self.terms, &keep);
            let inv = Rational::new(BigInt::one(), BigInt::from(k));
            power = next.into_iter().map(|(m, c)| (m, c * &inv)).collect();
        }
        let caps = self.caps;
        total.retain(|m, _| caps.contains(m));
        Ok(TruncatedSeries::from_map(self.n, self.caps, total))
    }

    /// Inverse of [`exp`](Self::exp); the constant term must be exactly 1.
    pub fn log(&self) -> Result<Self> {
        let c0 = self.get(&Monomial::one());
        if !c0.is_one() {
            return Err(Error::LogConstant(crate::rational::format_rational(&c0)));
        }
        let mut b = self.terms.clone();
        b.remove(&Monomial::one());
        let (keep, bound) = self.power_region(&b)?;
        if let Some(s) = self.caps.stable_bound() {
            let top = s.chi;
            return Ok(TruncatedSeries::from_map(
                self.n,
                self.caps,
                log_graded(&b, self.caps, top),
            ));
        }
        let mut total: Terms = BTreeMap::new();
        let mut power = b.clone();
        let mut k = 1i64;
        while !power.is_empty() {
            let coef = Rational::new(
                BigInt::from(if k % 2 == 1 { 1 } else { -1 }),
                BigInt::from(k),
            );
            add_into(&mut total, &power, &coef);
            k += 1;
            if k as usize > bound + 1 {
                return Err(Error::NonTerminating(bound));
            }
            power = mul_terms(&power, &b, &keep);
        }
        let caps = self.caps;
        total.retain(|m, _| caps.contains(m));
        Ok(TruncatedSeries::from_map(self.n, self.caps, total))
    }

    /// `∂/∂v`. The reliable region shrinks accordingly.
    pub fn partial(&self, v: Var) -> Result<Self> {
        v.check(self.n)?;
        let caps = self.caps.after_partial();
        let mut out = TruncatedSeries::zero(self.n, caps);
        for (m, c) in &self.terms {
            let p = m.power_of(v);
            if p == 0 {
                continue;
            }
            let m = m.without(v).expect("power > 0");
            out.add_term(m, c * int(p as i64));
        }
        Ok(out)
    }

    /// Checked coefficient read: refuses monomials the caps do not vouch for.
    pub fn coefficient(&self, m: &Monomial) -> Result<Rational> {
        m.check(self.n)?;
        if !self.caps.contains(m) {
            return Err(Error::OutsideCaps(m.to_string()));
        }
        Ok(self.get(m))
    }

    /// Every stored `ħ^{g−1} t^{d₁}⋯t^{d_k}` satisfies `Σd ≤ 3g − 3 + k`.
    pub fn is_tame(&self) -> bool {
        self.terms.keys().all(|m| m.delta() >= 0)
    }

    /// Substitute series for the variables. Every variable occurring must
    /// have an image, and images must have no constant term so that the
    /// result is exact on `caps`.
    pub fn compose(
        &self,
        images: &BTreeMap<Var, TruncatedSeries>,
        n: u32,
        caps: Caps,
    ) -> Result<Self> {
        for img in images.values() {
            if img.dimension() != n {
                return Err(Error::DimensionMismatch(img.dimension(), n));
            }
            if !img.get(&Monomial::one()).is_zero() {
                return Err(Error::InvalidArgument(
                    "substituted series must have zero constant term".into(),
                ));
            }
        }
        let mut powers: HashMap<(Var, u32), TruncatedSeries> = HashMap::new();
        let mut out = TruncatedSeries::zero(n, caps);
        for (m, c) in &self.terms {
            let mut term = TruncatedSeries::constant(n, caps, c.clone())
                .shift(&Monomial::one().with_hbar(m.hbar_power()));
            for (v, p) in m.factors() {
                let img = images
                    .get(&v)
                    .ok_or_else(|| Error::InvalidArgument(format!("no image for {v}")))?;
                let power = match powers.entry((v, p)) {
                    Entry::Occupied(e) => e.into_mut(),
                    Entry::Vacant(e) => {
                        let mut acc = TruncatedSeries::one(n, caps);
                        for _ in 0..p {
                            acc = acc.mul(&img.retruncate(caps))?;
                        }
                        e.insert(acc)
                    }
                };
                term = term.mul(power)?;
                if term.is_zero() {
                    break;
                }
            }
            out = out.add(&term)?;
        }
        Ok(out)
    }

    /// Largest absolute numerator among the coefficients (diagnostics only).
    pub fn max_height(&self) -> BigInt {
        self.terms
            .values()
            .map(|c| c.numer().abs().max(c.denom().clone()))
            .max()
            .unwrap_or_else(BigInt::zero)
    }
}

pub fn add(a: &TruncatedSeries, b: &TruncatedSeries) -> Result<TruncatedSeries> {
    a.add(b)
}

pub fn mul(a: &TruncatedSeries, b: &TruncatedSeries) -> Result<TruncatedSeries> {
    a.mul(b)
}

pub fn exp(a: &TruncatedSeries) -> Result<TruncatedSeries> {
    a.exp()
}

pub fn log(a: &TruncatedSeries) -> Result<TruncatedSeries> {
    a.log()
}

pub fn partial(a: &TruncatedSeries, v: Var) -> Result<TruncatedSeries> {
    a.partial(v)
}

pub fn coefficient(a: &TruncatedSeries, m: &Monomial) -> Result<Rational> {
    a.coefficient(m)
}

pub fn is_tame(a: &TruncatedSeries) -> bool {
    a.is_tame()
}
