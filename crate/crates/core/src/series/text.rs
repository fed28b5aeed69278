//! Line-oriented text form:
//!
//! ```text
//! # series n=2 degree_cap=5 genus_cap=1
//! 1/2 * hbar^-1 * t[0,1]^2 * t[0,2]
//! ```
//!
//! One term per line in canonical monomial order, coefficient always `p/q`,
//! `hbar^e` only when `e ≠ 0`, `^p` only when `p > 1`.

use super::{Caps, Monomial, StableBound, TruncatedSeries, Var};
use crate::error::{Error, Result};
use crate::rational::{format_rational, parse_rational};

impl TruncatedSeries {
    pub fn to_text(&self) -> String {
        let caps = self.caps();
        let mut out = format!(
            "# series n={} degree_cap={} genus_cap={}",
            self.dimension(),
            caps.degree_cap(),
            caps.genus_cap()
        );
        if let Some(s) = caps.stable_bound() {
            out += &format!(
                " stable delta={} chi={} dilaton={}",
                s.delta, s.chi, s.dilaton
            );
        }
        out.push('\n');
        for (m, c) in self.terms() {
            out += &format_term(m, c);
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines.next().ok_or_else(|| Error::parse(1, "empty input"))?;
        let (n, caps) = parse_header(header)?;
        let mut s = TruncatedSeries::zero(n, caps);
        for (i, line) in lines {
            let (m, c) = parse_term(line).map_err(|e| relocate(e, i + 1))?;
            m.check(n).map_err(|e| Error::parse(i + 1, e.to_string()))?;
            if !caps.contains(&m) {
                return Err(Error::parse(i + 1, format!("{m} outside caps")));
            }
            s.add_term(m, c);
        }
        Ok(s)
    }
}

fn relocate(e: Error, line: usize) -> Error {
    match e {
        Error::Parse { msg, .. } => Error::Parse { line, msg },
        other => other,
    }
}

pub(crate) fn format_term(m: &Monomial, c: &crate::rational::Rational) -> String {
    if m.is_one() {
        format_rational(c)
    } else {
        format!("{} * {}", format_rational(c), m)
    }
}

fn parse_header(line: &str) -> Result<(u32, Caps)> {
    let bad = |msg: &str| Error::parse(1, msg.to_string());
    let rest = line
        .trim()
        .strip_prefix("# series")
        .ok_or_else(|| bad("expected '# series' header"))?;
    let mut n = None;
    let mut degree = None;
    let mut genus = None;
    let mut stable = false;
    let (mut delta, mut chi, mut dilaton) = (None, None, None);
    for tok in rest.split_whitespace() {
        if tok == "stable" {
            stable = true;
            continue;
        }
        let (k, v) = tok
            .split_once('=')
            .ok_or_else(|| bad("malformed header field"))?;
        let int = || v.parse::<i64>().map_err(|_| bad("bad integer in header"));
        match k {
            "n" => n = Some(int()?),
            "degree_cap" => degree = Some(int()?),
            "genus_cap" => genus = Some(int()?),
            "delta" => delta = Some(int()?),
            "chi" => chi = Some(int()?),
            "dilaton" => dilaton = Some(v == "true"),
            _ => return Err(bad("unknown header field")),
        }
    }
    let n = n.ok_or_else(|| bad("missing n"))?;
    let degree = degree.ok_or_else(|| bad("missing degree_cap"))?;
    let genus = genus.ok_or_else(|| bad("missing genus_cap"))?;
    if n < 1 {
        return Err(bad("n must be positive"));
    }
    let mut caps = Caps {
        degree,
        genus,
        stable: None,
    };
    if stable {
        caps.stable = Some(StableBound {
            delta: delta.ok_or_else(|| bad("missing delta"))?,
            chi: chi.ok_or_else(|| bad("missing chi"))?,
            dilaton: dilaton.unwrap_or(false),
        });
    }
    Ok((n as u32, caps))
}

/// Parse `c * hbar^e * t[d,mu]^p * …`.
pub(crate) fn parse_term(line: &str) -> Result<(Monomial, crate::rational::Rational)> {
    let mut parts = line.split('*').map(str::trim);
    let c = parse_rational(parts.next().unwrap_or(""))?;
    let mut hbar = 0i32;
    let mut vars: Vec<Var> = Vec::new();
    for p in parts {
        if let Some(e) = p.strip_prefix("hbar") {
            let e = e.trim();
            hbar += if e.is_empty() {
                1
            } else {
                e.strip_prefix('^')
                    .and_then(|x| x.trim().parse::<i32>().ok())
                    .ok_or_else(|| Error::parse(0, format!("bad hbar factor {p:?}")))?
            };
            continue;
        }
        let (v, pow) = parse_var_power(p)?;
        vars.extend(std::iter::repeat(v).take(pow as usize));
    }
    Ok((Monomial::from_vars(hbar, vars), c))
}

fn parse_var_power(p: &str) -> Result<(Var, u32)> {
    let bad = || Error::parse(0, format!("bad factor {p:?}"));
    let body = p.strip_prefix("t[").ok_or_else(bad)?;
    let (inside, rest) = body.split_once(']').ok_or_else(bad)?;
    let (d, mu) = inside.split_once(',').ok_or_else(bad)?;
    let d: u32 = d.trim().parse().map_err(|_| bad())?;
    let mu: u32 = mu.trim().parse().map_err(|_| bad())?;
    let rest = rest.trim();
    let pow = if rest.is_empty() {
        1
    } else {
        rest.strip_prefix('^')
            .and_then(|x| x.trim().parse::<u32>().ok())
            .filter(|&x| x > 0)
            .ok_or_else(bad)?
    };
    Ok((Var::new(d, mu), pow))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn text_round_trip() {
        let caps = Caps::stable(5, 1, true);
        let s = TruncatedSeries::from_terms(
            2,
            caps,
            [
                (Monomial::one(), rat(1, 1)),
                (
                    Monomial::from_factors(-1, &[(Var::new(0, 1), 2), (Var::new(0, 2), 1)]),
                    rat(1, 2),
                ),
                (Monomial::from_vars(0, [Var::new(1, 2)]), rat(-3, 4)),
            ],
        )
        .unwrap();
        let text = s.to_text();
        assert!(text.contains("1/2 * hbar^-1 * t[0,1]^2 * t[0,2]\n"));
        assert_eq!(TruncatedSeries::from_text(&text).unwrap(), s);
    }

    #[test]
    fn text_errors_carry_line_numbers() {
        let text = "# series n=2 degree_cap=3 genus_cap=1\n1/1 * t[0,1]\n2/x * t[0,2]\n";
        match TruncatedSeries::from_text(text) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        let text = "# series n=2 degree_cap=3 genus_cap=1\n1/1 * t[0,3]\n";
        assert!(TruncatedSeries::from_text(text).is_err());
    }
}
