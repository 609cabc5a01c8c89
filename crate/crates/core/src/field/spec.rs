use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{FieldCtx, FieldError, MAX_ORDER};

/// Modulus choice for field construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ModulusSpec {
    /// Lexicographically smallest monic irreducible of the requested degree.
    Auto,
    /// Coefficients, constant term first.
    Coeffs(Vec<u32>),
}

impl ModulusSpec {
    /// Decodes a packed modulus code (little-endian base-`p` digits).
    pub fn from_code(p: u32, mut code: u64) -> Self {
        let mut c = Vec::new();
        while code > 0 {
            c.push((code % p as u64) as u32);
            code /= p as u64;
        }
        ModulusSpec::Coeffs(c)
    }
}

/// Textual field description `p^m/MODHEX[/q=Q]`.
///
/// `MODHEX` is the modulus packed as an integer in hexadecimal, so `2^4/13`
/// is GF(16) modulo `x^4 + x + 1`. `auto` selects the smallest irreducible.
/// The optional `q=Q` (or `q=p^s`) names the base field for traces and
/// linearized polynomials; it defaults to the prime field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldSpec {
    pub p: u32,
    pub m_abs: u32,
    pub modulus: ModulusSpec,
    pub q: Option<u32>,
}

impl FieldSpec {
    pub fn sub_exp(&self) -> Result<u32, FieldError> {
        let Some(q) = self.q else { return Ok(1) };
        let mut s = 0;
        let mut v = 1u64;
        while v < q as u64 {
            v *= self.p as u64;
            s += 1;
        }
        if v != q as u64 || s == 0 {
            return Err(FieldError::Parse {
                spec: self.to_string(),
                reason: format!("q={q} is not a positive power of {}", self.p),
            });
        }
        Ok(s)
    }

    pub fn build(&self) -> Result<FieldCtx, FieldError> {
        self.build_with_cap(MAX_ORDER)
    }

    pub fn build_with_cap(&self, cap: u64) -> Result<FieldCtx, FieldError> {
        FieldCtx::with_cap(self.p, self.m_abs, self.modulus.clone(), self.sub_exp()?, cap)
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}^{}/", self.p, self.m_abs)?;
        match &self.modulus {
            ModulusSpec::Auto => write!(f, "auto")?,
            ModulusSpec::Coeffs(c) => {
                let code = c.iter().rev().fold(0u64, |acc, &d| acc * self.p as u64 + d as u64);
                write!(f, "{code:x}")?;
            }
        }
        if let Some(q) = self.q {
            write!(f, "/q={q}")?;
        }
        Ok(())
    }
}

impl FromStr for FieldSpec {
    type Err = FieldError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = |reason: &str| FieldError::Parse { spec: s.to_string(), reason: reason.to_string() };
        let mut parts = s.trim().split('/');
        let head = parts.next().ok_or_else(|| bad("empty"))?;
        let (p, m) = head.split_once('^').ok_or_else(|| bad("expected p^m"))?;
        let p: u32 = p.trim().parse().map_err(|_| bad("bad characteristic"))?;
        let m_abs: u32 = m.trim().parse().map_err(|_| bad("bad degree"))?;
        if p < 2 {
            return Err(bad("bad characteristic"));
        }
        let modulus = match parts.next() {
            None => return Err(bad("missing modulus (use `auto`)")),
            Some(t) if t.eq_ignore_ascii_case("auto") => ModulusSpec::Auto,
            Some(t) => {
                let t = t.trim_start_matches("0x");
                let code = u64::from_str_radix(t, 16).map_err(|_| bad("modulus is not hex"))?;
                ModulusSpec::from_code(p, code)
            }
        };
        let q = match parts.next() {
            None => None,
            Some(t) => {
                let v = t.strip_prefix("q=").ok_or_else(|| bad("expected q=..."))?;
                let q = match v.split_once('^') {
                    Some((b, e)) => {
                        let b: u32 = b.parse().map_err(|_| bad("bad q"))?;
                        let e: u32 = e.parse().map_err(|_| bad("bad q"))?;
                        b.checked_pow(e).ok_or_else(|| bad("q overflows"))?
                    }
                    None => v.parse().map_err(|_| bad("bad q"))?,
                };
                Some(q)
            }
        };
        if parts.next().is_some() {
            return Err(bad("trailing components"));
        }
        Ok(FieldSpec { p, m_abs, modulus, q })
    }
}

impl Serialize for FieldSpec {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for FieldSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
