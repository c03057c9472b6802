use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use qxor_core::description::{parse_description, Family, FunctionDescription};
use qxor_core::BitVector;

use crate::UsageError;

/// Reads a description file, or falls back to an inline family such as
/// `and_2` or `hamming_le(6,1)` when no file of that name exists.
pub fn load_description(spec: &str) -> Result<FunctionDescription> {
    let path = Path::new(spec);
    if path.exists() {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        return parse_description(&text).with_context(|| format!("parsing {}", path.display()));
    }
    match Family::parse_inline(spec) {
        Ok((family, Some(n))) => Ok(FunctionDescription::Family { n, family }),
        // `parity({1,2,3})` defaults to the largest listed variable.
        Ok((Family::Parity(vars), None)) if !vars.is_empty() => Ok(FunctionDescription::Family {
            n: *vars.iter().max().unwrap(),
            family: Family::Parity(vars),
        }),
        Ok((_, None)) => bail!(UsageError(format!("inline family {spec:?} needs an arity, e.g. parity_3"))),
        Err(_) => bail!(UsageError(format!("{spec:?} is neither a file nor an inline family"))),
    }
}

pub fn parse_bits(name: &str, text: &str, n: usize) -> Result<BitVector> {
    let v: BitVector = text
        .parse()
        .map_err(|e| UsageError(format!("--{name} {text:?}: {e}")))?;
    if v.arity() != n {
        bail!(UsageError(format!(
            "--{name} has {} bits but the function has n = {n}",
            v.arity()
        )));
    }
    Ok(v)
}
