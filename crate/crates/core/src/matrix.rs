//! Small dense rational matrices and matrix-valued power series in one or
//! two formal variables. Indices in the public API are 1-based, matching
//! the Greek indices of the formulas.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::rational::{factorial_r, format_rational, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Mat {
    n: usize,
    a: Vec<Rational>,
}

impl Mat {
    pub fn zero(n: u32) -> Self {
        let n = n as usize;
        Mat {
            n,
            a: vec![Rational::zero(); n * n],
        }
    }

    pub fn identity(n: u32) -> Self {
        let mut m = Mat::zero(n);
        for i in 1..=n {
            m.set(i, i, Rational::one());
        }
        m
    }

    /// Row-major, `rows[μ−1][ν−1] = m^μ_ν`.
    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidArgument(
                "matrix must be square and nonempty".into(),
            ));
        }
        Ok(Mat {
            n,
            a: rows.into_iter().flatten().collect(),
        })
    }

    /// Single-entry matrix `E_{μν}`.
    pub fn unit(n: u32, mu: u32, nu: u32) -> Self {
        let mut m = Mat::zero(n);
        m.set(mu, nu, Rational::one());
        m
    }

    pub fn dim(&self) -> u32 {
        self.n as u32
    }

    pub fn get(&self, mu: u32, nu: u32) -> &Rational {
        &self.a[(mu as usize - 1) * self.n + nu as usize - 1]
    }

    pub fn set(&mut self, mu: u32, nu: u32, v: Rational) {
        self.a[(mu as usize - 1) * self.n + nu as usize - 1] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.a.iter().all(Zero::is_zero)
    }

    pub fn add(&self, o: &Mat) -> Mat {
        Mat {
            n: self.n,
            a: self.a.iter().zip(&o.a).map(|(x, y)| x + y).collect(),
        }
    }

    pub fn sub(&self, o: &Mat) -> Mat {
        Mat {
            n: self.n,
            a: self.a.iter().zip(&o.a).map(|(x, y)| x - y).collect(),
        }
    }

    pub fn scale(&self, c: &Rational) -> Mat {
        Mat {
            n: self.n,
            a: self.a.iter().map(|x| x * c).collect(),
        }
    }

    pub fn mul(&self, o: &Mat) -> Mat {
        let n = self.n;
        let mut out = vec![Rational::zero(); n * n];
        for i in 0..n {
            for k in 0..n {
                let x = &self.a[i * n + k];
                if x.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let y = &o.a[k * n + j];
                    if !y.is_zero() {
                        out[i * n + j] += x * y;
                    }
                }
            }
        }
        Mat { n, a: out }
    }

    pub fn transpose(&self) -> Mat {
        let n = self.n as u32;
        let mut out = Mat::zero(n);
        for i in 1..=n {
            for j in 1..=n {
                out.set(j, i, self.get(i, j).clone());
            }
        }
        out
    }

    /// `m^{μν} = m^μ_ρ η^{ρν}`; with the anti-diagonal metric this reverses
    /// the columns. The single place where index raising happens.
    pub fn raise(&self) -> Mat {
        let n = self.n as u32;
        let mut out = Mat::zero(n);
        for i in 1..=n {
            for j in 1..=n {
                out.set(i, j, self.get(i, n + 1 - j).clone());
            }
        }
        out
    }

    /// Inverse of [`raise`](Self::raise) (the metric is an involution).
    pub fn lower(&self) -> Mat {
        self.raise()
    }

    pub fn is_symmetric(&self) -> bool {
        *self == self.transpose()
    }

    /// Nonzero entries as `(μ, ν, value)`.
    pub fn entries(&self) -> impl Iterator<Item = (u32, u32, &Rational)> {
        let n = self.n;
        self.a
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_zero())
            .map(move |(i, v)| ((i / n) as u32 + 1, (i % n) as u32 + 1, v))
    }

    pub fn rows_text(&self) -> Vec<Vec<String>> {
        let n = self.n as u32;
        (1..=n)
            .map(|i| (1..=n).map(|j| format_rational(self.get(i, j))).collect())
            .collect()
    }
}

/// `Σ_j M_j z^j`, stored densely up to the cap.
pub type MatSeries = Vec<Mat>;

/// `Σ M_{a,b} z^a w^b`, sparse.
pub type MatSeries2 = BTreeMap<(u32, u32), Mat>;

/// `exp(Σ_{l≥1} r_l z^l)` up to `z^cap`.
pub fn mat_exp(n: u32, r: &BTreeMap<u32, Mat>, cap: u32) -> MatSeries {
    let cap = cap as usize;
    let mut gen = vec![Mat::zero(n); cap + 1];
    for (&l, m) in r {
        if (l as usize) <= cap {
            gen[l as usize] = m.clone();
        }
    }
    let mut total = vec![Mat::zero(n); cap + 1];
    total[0] = Mat::identity(n);
    let mut power = total.clone();
    for k in 1..=cap as u32 {
        let mut next = vec![Mat::zero(n); cap + 1];
        for (i, p) in power.iter().enumerate() {
            if p.is_zero() {
                continue;
            }
            for (j, g) in gen.iter().enumerate().skip(1) {
                if i + j > cap {
                    break;
                }
                if !g.is_zero() {
                    next[i + j] = next[i + j].add(&p.mul(g));
                }
            }
        }
        if next.iter().all(Mat::is_zero) {
            break;
        }
        let inv = Rational::one() / factorial_r(k);
        for (t, p) in total.iter_mut().zip(&next) {
            *t = t.add(&p.scale(&inv));
        }
        // keep the un-normalised power r(z)^k so the factorial stays exact
        power = next;
    }
    total
}

/// Long division of `P(z,w)` by `(z + w)`, by total degree. `P` must have
/// no constant term; any remainder is reported.
pub fn divide_by_z_plus_w(n: u32, p: &MatSeries2, cap: u32) -> Result<MatSeries2> {
    let zero = Mat::zero(n);
    let at = |a: u32, b: u32| p.get(&(a, b)).unwrap_or(&zero);
    if !at(0, 0).is_zero() {
        return Err(Error::DivisionRemainder("constant term".into()));
    }
    let mut q: MatSeries2 = BTreeMap::new();
    for s in 1..=cap {
        // Q_{s−1−i,i} = P_{s−i,i} − Q_{s−i,i−1}
        let mut prev = Mat::zero(n);
        for i in 0..s {
            let coeff = at(s - i, i).sub(&prev);
            if !coeff.is_zero() {
                q.insert((s - 1 - i, i), coeff.clone());
            }
            prev = coeff;
        }
        if *at(0, s) != prev {
            return Err(Error::DivisionRemainder(format!("total degree {s}")));
        }
    }
    Ok(q)
}
