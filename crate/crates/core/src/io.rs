//! TOML file formats for potentials and R-matrices.
//!
//! ```toml
//! dimension = 2
//! order = 5
//! terms = ["1/2 * t[0,1]^2 * t[0,2]", "1/6 * t[0,2]^3"]
//!
//! [[correlators]]          # optional, genus ≥ 1
//! genus = 1
//! insertions = ["tau_1(1)"]
//! value = "1/24"
//! ```
//!
//! ```toml
//! dimension = 2
//! [[levels]]
//! level = 1
//! matrix = [["0/1", "1/1"], ["0/1", "0/1"]]   # r_l^μ_ν, row μ
//! ```
//!
//! Rationals are always written `p/q`, so writing what was read gives the
//! same bytes back.

use serde::{Deserialize, Serialize};

use crate::cohft::{
    reconstruct_descendants, CorrelatorTable, FrobeniusPotential, Insertion, TableCaps,
};
use crate::error::{Error, Result};
use crate::givental::RMatrix;
use crate::matrix::Mat;
use crate::rational::{format_rational, parse_rational, Rational};
use crate::series::text::{format_term, parse_term};
use crate::series::{Caps, TruncatedSeries};

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PotentialToml {
    dimension: u32,
    order: u32,
    terms: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    correlators: Vec<CorrelatorToml>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CorrelatorToml {
    genus: u32,
    insertions: Vec<String>,
    value: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RMatrixToml {
    dimension: u32,
    #[serde(default)]
    levels: Vec<LevelToml>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LevelToml {
    level: u32,
    matrix: Vec<Vec<String>>,
}

/// A potential plus any user-supplied higher-genus correlators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PotentialInput {
    pub potential: FrobeniusPotential,
    pub correlators: Vec<(u32, Vec<Insertion>, Rational)>,
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

fn toml_error(text: &str, e: toml::de::Error) -> Error {
    let line = e.span().map(|s| line_of(text, s.start)).unwrap_or(0);
    Error::parse(line, e.message().to_string())
}

fn at(line: usize, e: Error) -> Error {
    match e {
        Error::Parse { msg, .. } => Error::Parse { line, msg },
        other => Error::parse(line, other.to_string()),
    }
}

/// Line of the first occurrence of `needle`, for pointing at a bad value.
fn find_line(text: &str, needle: &str) -> usize {
    text.find(needle).map(|o| line_of(text, o)).unwrap_or(0)
}

fn parse_insertion(s: &str) -> Result<Insertion> {
    let bad = || Error::parse(0, format!("bad insertion {s:?}, expected tau_d(mu)"));
    let rest = s.trim().strip_prefix("tau_").ok_or_else(bad)?;
    let (d, mu) = rest.split_once('(').ok_or_else(bad)?;
    let mu = mu.strip_suffix(')').ok_or_else(bad)?;
    Ok(Insertion::new(
        d.trim().parse().map_err(|_| bad())?,
        mu.trim().parse().map_err(|_| bad())?,
    ))
}

pub fn parse_potential(text: &str) -> Result<PotentialInput> {
    let raw: PotentialToml = toml::from_str(text).map_err(|e| toml_error(text, e))?;
    let n = raw.dimension;
    let mut f = TruncatedSeries::zero(n, Caps::new(raw.order, 1));
    for t in &raw.terms {
        let line = find_line(text, t);
        let (m, c) = parse_term(t).map_err(|e| at(line, e))?;
        m.check(n).map_err(|e| at(line, e))?;
        if m.hbar_power() != 0 || m.vars().iter().any(|v| v.d > 0) {
            return Err(Error::parse(line, format!("{m} is not a primary monomial")));
        }
        if m.degree() > raw.order {
            return Err(Error::parse(
                line,
                format!("{m} exceeds order {}", raw.order),
            ));
        }
        f.add_term(m, c);
    }
    let potential = FrobeniusPotential::new(n, raw.order, f)?;
    let mut correlators = Vec::new();
    for c in &raw.correlators {
        let line = find_line(text, &c.value);
        if c.genus == 0 {
            return Err(Error::parse(
                line,
                "genus-0 correlators come from the potential",
            ));
        }
        let mut ins = c
            .insertions
            .iter()
            .map(|s| parse_insertion(s).and_then(|i| i.var().check(n).map(|_| i)))
            .collect::<Result<Vec<_>>>()
            .map_err(|e| at(line, e))?;
        ins.sort_unstable();
        correlators.push((
            c.genus,
            ins,
            parse_rational(&c.value).map_err(|e| at(line, e))?,
        ));
    }
    Ok(PotentialInput {
        potential,
        correlators,
    })
}

impl PotentialInput {
    /// Genus-zero correlators reconstructed from the potential, plus the
    /// supplied higher-genus ones that fall inside `caps`.
    pub fn table(&self, caps: TableCaps) -> Result<CorrelatorTable> {
        let g0 = reconstruct_descendants(&self.potential, caps)?;
        let mut table = CorrelatorTable::new(g0.dimension(), caps);
        for (g, ins, v) in g0.entries() {
            table.insert(g, ins.to_vec(), v.clone())?;
        }
        for (g, ins, v) in &self.correlators {
            let level: u32 = ins.iter().map(|i| i.d).sum();
            if *g <= caps.max_genus
                && ins.len() as u32 <= caps.max_points
                && level <= caps.max_level
            {
                table.insert(*g, ins.clone(), v.clone())?;
            }
        }
        Ok(table)
    }
}

pub fn write_potential(input: &PotentialInput) -> String {
    let f = &input.potential;
    let raw = PotentialToml {
        dimension: f.dimension(),
        order: f.order(),
        terms: f.series().terms().map(|(m, c)| format_term(m, c)).collect(),
        correlators: input
            .correlators
            .iter()
            .map(|(g, ins, v)| CorrelatorToml {
                genus: *g,
                insertions: ins.iter().map(ToString::to_string).collect(),
                value: format_rational(v),
            })
            .collect(),
    };
    toml::to_string(&raw).expect("plain data serializes")
}

pub fn parse_rmatrix(text: &str) -> Result<RMatrix> {
    let raw: RMatrixToml = toml::from_str(text).map_err(|e| toml_error(text, e))?;
    let n = raw.dimension;
    let mut levels = Vec::new();
    for l in &raw.levels {
        let line = find_line(text, &format!("level = {}", l.level));
        let rows = l
            .matrix
            .iter()
            .map(|row| {
                row.iter()
                    .map(|s| parse_rational(s))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()
            .map_err(|e| at(line, e))?;
        let m = Mat::from_rows(rows).map_err(|e| at(line, e))?;
        levels.push((l.level, m));
    }
    // symmetry violations keep their own (l, μ, ν) diagnostic
    RMatrix::new(n, levels)
}

pub fn write_rmatrix(r: &RMatrix) -> String {
    let raw = RMatrixToml {
        dimension: r.dimension(),
        levels: r
            .levels()
            .iter()
            .map(|(l, m)| LevelToml {
                level: *l,
                matrix: m.rows_text(),
            })
            .collect(),
    };
    toml::to_string(&raw).expect("plain data serializes")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    const TWO_DIM: &str = r#"
dimension = 2
order = 5
terms = [
  "1/2 * t[0,1]^2 * t[0,2]",
  "3/1 * t[0,2]^3",
  "-1/7 * t[0,2]^5",
]

[[correlators]]
genus = 1
insertions = ["tau_1(1)"]
value = "1/24"
"#;

    #[test]
    fn potential_round_trip() {
        let p = parse_potential(TWO_DIM).unwrap();
        assert_eq!(p.potential.dimension(), 2);
        assert_eq!(
            p.correlators,
            vec![(
                1,
                vec![Insertion::new(1, 1)],
                Rational::new(1.into(), 24.into())
            )]
        );
        let text = write_potential(&p);
        assert_eq!(parse_potential(&text).unwrap(), p);
        assert_eq!(write_potential(&parse_potential(&text).unwrap()), text);
    }

    #[test]
    fn parse_errors_carry_lines() {
        let bad = TWO_DIM.replace("3/1 * t[0,2]^3", "3/0 * t[0,2]^3");
        match parse_potential(&bad) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 6),
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            parse_potential("dimension = 2\norder = \"x\"\nterms = []"),
            Err(Error::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn rmatrix_round_trip_and_symmetry() {
        let r = RMatrix::inversion(3);
        let text = write_rmatrix(&r);
        assert_eq!(parse_rmatrix(&text).unwrap(), r);
        let bad =
            "dimension = 2\n[[levels]]\nlevel = 2\nmatrix = [[\"1\", \"0\"], [\"0\", \"0\"]]\n";
        assert!(matches!(
            parse_rmatrix(bad),
            Err(Error::Symmetry { level: 2, .. })
        ));
        let m = Mat::from_rows(vec![vec![int(0), int(1)], vec![int(0), int(0)]]).unwrap();
        assert_eq!(
            parse_rmatrix(&write_rmatrix(&RMatrix::new(2, [(1, m)]).unwrap()))
                .unwrap()
                .dimension(),
            2
        );
    }
}
