//! Function-description files.
//!
//! ```text
//! n=3
//! kind=table            # 2^n lines follow: `<bitstring> <+1|-1>`
//! kind=anf              # one line: `z1*z3 + z2 + 1`
//! kind=family           # one line: `family=<name> params=<comma list>`
//! ```
//!
//! Family catalog (v1):
//!
//! | name         | params        | TRUE when            |
//! |--------------|---------------|----------------------|
//! | `parity`     | `i,j,...`     | odd number of `z_i` set, i in S |
//! | `and`        | none          | all bits set          |
//! | `equality`   | none          | `z = 0^n`             |
//! | `hamming_le` | `d`           | `|z| <= d`            |
//!
//! The inline forms `parity({1,2,3})`, `and_2`, `equality_2` and
//! `hamming_le(6,1)` are accepted by [`Family::parse_inline`]. TRUE maps to
//! `-1` throughout.

use std::fmt;

use crate::bits::{BitVector, MAX_ARITY};
use crate::boolean::BooleanFunction;
use crate::error::{Error, Result};

/// Named function families.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Family {
    /// Character `chi_S`; variables are 1-based.
    Parity(Vec<usize>),
    And,
    Equality,
    HammingLe(usize),
}

impl Family {
    pub fn build(&self, n: usize) -> Result<BooleanFunction> {
        if n > MAX_ARITY {
            return Err(Error::ArityTooLarge(n));
        }
        match self {
            Family::Parity(vars) => {
                if let Some(&bad) = vars.iter().find(|&&i| i == 0 || i > n) {
                    return Err(Error::Parse(format!("parity variable z{bad} outside 1..={n}")));
                }
                BooleanFunction::from_fn(n, |z| {
                    let odd = vars.iter().filter(|&&i| z.var(i)).count() % 2 == 1;
                    if odd {
                        -1
                    } else {
                        1
                    }
                })
            }
            Family::And => BooleanFunction::from_fn(n, |z| if z.weight() as usize == n { -1 } else { 1 }),
            Family::Equality => BooleanFunction::from_fn(n, |z| if z.is_zero() { -1 } else { 1 }),
            Family::HammingLe(d) => {
                BooleanFunction::from_fn(n, |z| if z.weight() as usize <= *d { -1 } else { 1 })
            }
        }
    }

    fn from_name_params(name: &str, params: &[usize]) -> Result<Self> {
        match (name, params) {
            ("parity", vars) => Ok(Family::Parity(vars.to_vec())),
            ("and", []) => Ok(Family::And),
            ("equality", []) => Ok(Family::Equality),
            ("hamming_le", [d]) => Ok(Family::HammingLe(*d)),
            _ => Err(Error::Parse(format!("unknown family {name} with params {params:?}"))),
        }
    }

    /// Parses `parity({1,2,3})`, `and_2`, `equality_2`, `hamming_le(6,1)`.
    /// Returns the family together with its arity when the form carries one.
    pub fn parse_inline(s: &str) -> Result<(Self, Option<usize>)> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if let Some(rest) = s.strip_prefix("parity(") {
            let inner = rest
                .strip_suffix(')')
                .ok_or_else(|| Error::Parse(format!("unterminated {s}")))?;
            let inner = inner.trim_start_matches('{').trim_end_matches('}');
            return Ok((Family::Parity(parse_list(inner)?), None));
        }
        if let Some(rest) = s.strip_prefix("hamming_le(") {
            let inner = rest
                .strip_suffix(')')
                .ok_or_else(|| Error::Parse(format!("unterminated {s}")))?;
            return match parse_list(inner)?.as_slice() {
                [n, d] => Ok((Family::HammingLe(*d), Some(*n))),
                _ => Err(Error::Parse(format!("hamming_le expects (n,d): {s}"))),
            };
        }
        for (prefix, family) in [("and_", Family::And), ("equality_", Family::Equality)] {
            if let Some(n) = s.strip_prefix(prefix) {
                let n = n
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad arity in {s}")))?;
                return Ok((family, Some(n)));
            }
        }
        Err(Error::Parse(format!("unknown family {s}")))
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Parity(vars) => {
                let vars: Vec<_> = vars.iter().map(|v| v.to_string()).collect();
                write!(f, "parity({{{}}})", vars.join(","))
            }
            Family::And => f.write_str("and"),
            Family::Equality => f.write_str("equality"),
            Family::HammingLe(d) => write!(f, "hamming_le(d={d})"),
        }
    }
}

fn parse_list(s: &str) -> Result<Vec<usize>> {
    s.split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| p.parse().map_err(|_| Error::Parse(format!("bad integer {p:?}"))))
        .collect()
}

/// A monomial is a bitmask over variables, `z1` at the most significant bit.
fn parse_anf(n: usize, text: &str) -> Result<Vec<u32>> {
    let mut monomials = Vec::new();
    for term in text.split('+').map(str::trim) {
        match term {
            "" => return Err(Error::Parse(format!("empty ANF term in {text:?}"))),
            "0" => continue,
            "1" => monomials.push(0),
            _ => {
                let mut mask = 0u32;
                for factor in term.split('*').map(str::trim) {
                    let i: usize = factor
                        .strip_prefix('z')
                        .and_then(|i| i.parse().ok())
                        .ok_or_else(|| Error::Parse(format!("bad ANF factor {factor:?}")))?;
                    if i == 0 || i > n {
                        return Err(Error::ArityMismatch { expected: n, found: i });
                    }
                    mask |= 1 << (n - i);
                }
                monomials.push(mask);
            }
        }
    }
    Ok(monomials)
}

/// A parsed description, before evaluation into a truth table.
#[derive(Clone, Debug, PartialEq)]
pub enum FunctionDescription {
    Table { n: usize, values: Vec<i8> },
    Anf { n: usize, monomials: Vec<u32> },
    Family { n: usize, family: Family },
}

impl FunctionDescription {
    pub fn arity(&self) -> usize {
        match self {
            Self::Table { n, .. } | Self::Anf { n, .. } | Self::Family { n, .. } => *n,
        }
    }

    pub fn build(&self) -> Result<BooleanFunction> {
        match self {
            Self::Table { n, values } => BooleanFunction::from_signs(*n, values.clone()),
            Self::Anf { n, monomials } => BooleanFunction::from_fn(*n, |z| {
                let bits = z.bits();
                let odd = monomials.iter().filter(|&&m| bits & m == m).count() % 2 == 1;
                if odd {
                    -1
                } else {
                    1
                }
            }),
            Self::Family { n, family } => family.build(*n),
        }
    }

    /// Short human-readable label.
    pub fn label(&self) -> String {
        match self {
            Self::Table { n, .. } => format!("table(n={n})"),
            Self::Anf { n, .. } => format!("anf(n={n})"),
            Self::Family { n, family } => format!("{family} n={n}"),
        }
    }
}

/// Parses the text of a function-description file.
pub fn parse_description(text: &str) -> Result<FunctionDescription> {
    let mut lines = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty());

    let n: usize = lines
        .next()
        .and_then(|l| l.strip_prefix("n="))
        .ok_or_else(|| Error::Parse("first line must be n=<int>".into()))?
        .trim()
        .parse()
        .map_err(|_| Error::Parse("n is not an integer".into()))?;
    if n > MAX_ARITY {
        return Err(Error::ArityTooLarge(n));
    }
    let kind = lines
        .next()
        .and_then(|l| l.strip_prefix("kind="))
        .ok_or_else(|| Error::Parse("second line must be kind=table|anf|family".into()))?
        .trim();

    match kind {
        "table" => {
            let mut values = vec![0i8; 1 << n];
            let mut seen = 0usize;
            for line in lines {
                let mut parts = line.split_whitespace();
                let (Some(bits), Some(value), None) = (parts.next(), parts.next(), parts.next()) else {
                    return Err(Error::Parse(format!("bad table line {line:?}")));
                };
                let z: BitVector = bits.parse()?;
                if z.arity() != n {
                    return Err(Error::ArityMismatch { expected: n, found: z.arity() });
                }
                let v: i64 = value
                    .trim_start_matches('+')
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad value {value:?}")))?;
                if v != 1 && v != -1 {
                    return Err(Error::NotSign(v));
                }
                if values[z.index()] != 0 {
                    return Err(Error::Parse(format!("duplicate row {bits}")));
                }
                values[z.index()] = v as i8;
                seen += 1;
            }
            if seen != 1 << n {
                return Err(Error::TableLength {
                    expected: 1 << n,
                    found: seen,
                });
            }
            Ok(FunctionDescription::Table { n, values })
        }
        "anf" => {
            let body: Vec<&str> = lines.collect();
            if body.is_empty() {
                return Err(Error::Parse("missing ANF line".into()));
            }
            let monomials = parse_anf(n, &body.join(" + "))?;
            Ok(FunctionDescription::Anf { n, monomials })
        }
        "family" => {
            let line = lines
                .next()
                .ok_or_else(|| Error::Parse("missing family line".into()))?;
            let mut name = None;
            let mut params = Vec::new();
            for field in line.split_whitespace() {
                if let Some(v) = field.strip_prefix("family=") {
                    name = Some(v);
                } else if let Some(v) = field.strip_prefix("params=") {
                    params = parse_list(v)?;
                } else {
                    return Err(Error::Parse(format!("unexpected field {field:?}")));
                }
            }
            let name = name.ok_or_else(|| Error::Parse("missing family=<name>".into()))?;
            let family = match Family::from_name_params(name, &params) {
                Ok(f) => f,
                Err(_) => match Family::parse_inline(name)? {
                    (_, Some(m)) if m != n => {
                        return Err(Error::ArityMismatch { expected: n, found: m })
                    }
                    (family, _) => family,
                },
            };
            Ok(FunctionDescription::Family { n, family })
        }
        other => Err(Error::Parse(format!("unknown kind {other:?}"))),
    }
}

/// Parses a description file straight into its truth table.
pub fn parse_function(text: &str) -> Result<BooleanFunction> {
    parse_description(text)?.build()
}

/// Writes a function as a `kind=table` description.
pub fn to_table_text(f: &BooleanFunction) -> String {
    let mut out = format!("n={}\nkind=table\n", f.arity());
    for z in BitVector::all(f.arity()) {
        out.push_str(&format!("{z} {:+}\n", f.value(z)));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn anf_and() {
        let f = parse_function("n=2\nkind=anf\nz1*z2\n").unwrap();
        assert_eq!(f.values(), &[1, 1, 1, -1]);
    }

    #[test]
    fn anf_mixed_terms() {
        // z1*z3 + z2 + 1 at z = 101: 1 + 0 + 1 = 0 -> +1
        let f = parse_function("n=3\nkind=anf\nz1*z3 + z2 + 1").unwrap();
        assert_eq!(f.value("101".parse().unwrap()), 1);
        assert_eq!(f.value("000".parse().unwrap()), -1);
    }

    #[test]
    fn parity_family() {
        let f = parse_function("n=3\nkind=family\nfamily=parity params=1,2,3").unwrap();
        for z in BitVector::all(3) {
            let expected = if z.weight() % 2 == 1 { -1 } else { 1 };
            assert_eq!(f.value(z), expected);
        }
        let (fam, n) = Family::parse_inline("parity({1,2,3})").unwrap();
        assert_eq!(n, None);
        assert_eq!(fam.build(3).unwrap(), f);
    }

    #[test]
    fn equality_and_hamming() {
        let (fam, n) = Family::parse_inline("equality_2").unwrap();
        assert_eq!(fam.build(n.unwrap()).unwrap().values(), &[-1, 1, 1, 1]);
        let (fam, n) = Family::parse_inline("hamming_le(3,1)").unwrap();
        let f = fam.build(n.unwrap()).unwrap();
        assert_eq!(f.values(), &[-1, -1, -1, 1, -1, 1, 1, 1]);
        let g = parse_function("n=3\nkind=family\nfamily=hamming_le params=1").unwrap();
        assert_eq!(f, g);
    }

    #[test]
    fn table_round_trip() {
        let f = parse_function("n=2\nkind=anf\nz1 + z2*z1").unwrap();
        assert_eq!(parse_function(&to_table_text(&f)).unwrap(), f);
    }

    #[test]
    fn errors() {
        assert!(matches!(
            parse_function("n=2\nkind=table\n00 1\n01 1\n10 -1\n"),
            Err(Error::TableLength { expected: 4, found: 3 })
        ));
        assert!(matches!(
            parse_function("n=2\nkind=table\n000 1\n"),
            Err(Error::ArityMismatch { .. })
        ));
        assert!(matches!(
            parse_function("n=2\nkind=anf\nz3"),
            Err(Error::ArityMismatch { expected: 2, found: 3 })
        ));
        assert!(parse_function("kind=anf\nz1").is_err());
        assert!(parse_function("n=2\nkind=blob\n").is_err());
        assert!(parse_function("n=2\nkind=table\n00 2\n01 1\n10 1\n11 1").is_err());
        assert!(parse_function("n=3\nkind=family\nfamily=equality_2").is_err());
        assert!(parse_function("n=3\nkind=family\nfamily=parity params=4").is_err());
    }
}
