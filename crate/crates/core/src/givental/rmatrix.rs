use std::collections::BTreeMap;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::matrix::{mat_exp, Mat, MatSeries};

/// `r(z) = Σ_{l≥1} r_l z^l`, finitely supported. Each raised bivector
/// `r_l^{μν}` is symmetric for odd `l` and skew for even `l`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RMatrix {
    n: u32,
    levels: BTreeMap<u32, Mat>,
}

impl RMatrix {
    pub fn zero(n: u32) -> Self {
        RMatrix {
            n,
            levels: BTreeMap::new(),
        }
    }

    /// Validating constructor; zero levels are dropped.
    pub fn new(n: u32, levels: impl IntoIterator<Item = (u32, Mat)>) -> Result<Self> {
        let mut out = RMatrix::zero(n);
        for (l, m) in levels {
            if l == 0 {
                return Err(Error::InvalidArgument("levels start at 1".into()));
            }
            if m.dim() != n {
                return Err(Error::DimensionMismatch(m.dim(), n));
            }
            check_symmetry(l, &m)?;
            if out.levels.contains_key(&l) {
                return Err(Error::InvalidArgument(format!("level {l} given twice")));
            }
            if !m.is_zero() {
                out.levels.insert(l, m);
            }
        }
        Ok(out)
    }

    /// Build from raised bivectors `r_l^{μν}` instead of `r_l^μ_ν`.
    pub fn from_bivectors(n: u32, levels: impl IntoIterator<Item = (u32, Mat)>) -> Result<Self> {
        Self::new(n, levels.into_iter().map(|(l, b)| (l, b.lower())))
    }

    /// The single-entry `r₁ = E_{1n}` realising the inversion symmetry.
    pub fn inversion(n: u32) -> Self {
        Self::new(n, [(1, Mat::unit(n, 1, n))]).expect("E_1n raises to E_11")
    }

    pub fn dimension(&self) -> u32 {
        self.n
    }

    pub fn level(&self, l: u32) -> Option<&Mat> {
        self.levels.get(&l)
    }

    pub fn levels(&self) -> &BTreeMap<u32, Mat> {
        &self.levels
    }

    pub fn max_level(&self) -> u32 {
        self.levels.keys().next_back().copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.levels.is_empty()
    }

    /// Whether some `r_l e₁ ≠ 0`, i.e. the action has a dilaton shift.
    pub fn has_dilaton(&self) -> bool {
        self.levels
            .values()
            .any(|m| (1..=self.n).any(|mu| !m.get(mu, 1).is_zero()))
    }

    /// `exp(r(z))` up to `z^cap`.
    pub fn exp_series(&self, cap: u32) -> MatSeries {
        mat_exp(self.n, &self.levels, cap)
    }

    /// `exp(−r(−z))` up to `z^cap`.
    pub fn exp_series_reflected(&self, cap: u32) -> MatSeries {
        let flipped: BTreeMap<u32, Mat> = self
            .levels
            .iter()
            .map(|(&l, m)| {
                let sign = if l % 2 == 0 { -1 } else { 1 };
                (l, m.scale(&crate::rational::int(sign)))
            })
            .collect();
        mat_exp(self.n, &flipped, cap)
    }
}

fn check_symmetry(l: u32, m: &Mat) -> Result<()> {
    let b = m.raise();
    let n = m.dim();
    let odd = l % 2 == 1;
    for mu in 1..=n {
        for nu in mu..=n {
            let (x, y) = (b.get(mu, nu), b.get(nu, mu));
            let ok = if odd { x == y } else { *x == -y.clone() };
            if !ok {
                return Err(Error::Symmetry {
                    level: l,
                    mu,
                    nu,
                    kind: if odd { "symmetric" } else { "skew-symmetric" },
                });
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    #[test]
    fn symmetry_is_enforced() {
        // raised E_12 in n = 2 is E_11: symmetric, fine at odd level only
        assert!(RMatrix::new(2, [(1, Mat::unit(2, 1, 2))]).is_ok());
        assert!(RMatrix::new(2, [(2, Mat::unit(2, 1, 2))]).is_err());
        // raised E_11 is E_12: not symmetric
        match RMatrix::new(2, [(1, Mat::unit(2, 1, 1))]) {
            Err(Error::Symmetry { level, mu, nu, .. }) => assert_eq!((level, mu, nu), (1, 1, 2)),
            other => panic!("{other:?}"),
        }
        let skew = Mat::unit(2, 1, 2).sub(&Mat::unit(2, 2, 1));
        assert!(RMatrix::from_bivectors(2, [(2, skew.clone())]).is_ok());
        assert!(RMatrix::from_bivectors(2, [(1, skew)]).is_err());
    }

    #[test]
    fn inversion_data() {
        let r = RMatrix::inversion(3);
        assert_eq!(r.level(1).unwrap().raise(), Mat::unit(3, 1, 1));
        assert!(!r.has_dilaton());
        let id = RMatrix::new(2, [(1, Mat::identity(2))]);
        // identity raises to the anti-diagonal, which is symmetric
        assert!(id.unwrap().has_dilaton());
        let e = RMatrix::inversion(2).exp_series_reflected(3);
        assert_eq!(e[1], Mat::unit(2, 1, 2));
        let two =
            RMatrix::from_bivectors(2, [(2, Mat::unit(2, 1, 2).sub(&Mat::unit(2, 2, 1)))]).unwrap();
        assert_eq!(
            two.exp_series_reflected(2)[2],
            two.level(2).unwrap().scale(&int(-1))
        );
    }
}
