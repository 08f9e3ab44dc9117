//! Scenario files: the TOML (and mirrored JSON) description of a cover over a
//! base field, plus optional golden fragments.
//!
//! Rationals are always `"num/den"` strings and coefficients are series
//! strings like `"pi^2 + 3*pi^(1/2)"` or `"g^2*pi^(-1)"`, where `g` is the
//! fixed generator of `F_q`. No floats anywhere.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use conductor_core::covers::CoverSpec;
use conductor_core::error::{CoreError, CoreResult};
use conductor_core::field::FieldElem;
use conductor_core::fq::{Fq, FqElem};
use conductor_core::laurent::LaurentPoly;
use conductor_core::rat::Rat;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Scenario {
    pub id: String,
    pub q: u64,
    #[serde(default)]
    pub p: Option<u64>,
    #[serde(default = "default_e")]
    pub e: i64,
    /// Precision cap in exponent units of pi^(1/e); default 64 * e.
    #[serde(default)]
    pub precision: Option<i64>,
    pub interval: (String, String),
    pub cover: CoverDoc,
    /// "all" or explicit character indices.
    #[serde(default)]
    pub characters: CharacterSelector,
    #[serde(default)]
    pub expected: Option<Expected>,
}

fn default_e() -> i64 {
    1
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum CoverDoc {
    Kummer {
        m: u64,
        u: BTreeMap<String, String>,
    },
    ArtinSchreier {
        g: BTreeMap<String, String>,
    },
    Compositum {
        m: u64,
        u: BTreeMap<String, String>,
        g: BTreeMap<String, String>,
    },
    Monic {
        coeffs: Vec<BTreeMap<String, String>>,
    },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CharacterSelector {
    All(String),
    Indices(Vec<usize>),
}

impl Default for CharacterSelector {
    fn default() -> Self {
        CharacterSelector::All("all".into())
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Expected {
    /// Byte-exact JSON of the Swan function of the first selected nontrivial
    /// character.
    #[serde(default)]
    pub sw_json: Option<String>,
    /// Byte-exact JSON of the discriminant function.
    #[serde(default)]
    pub discriminant_json: Option<String>,
}

impl Scenario {
    pub fn from_toml_str(text: &str) -> CoreResult<Self> {
        toml::from_str(text).map_err(|e| CoreError::Scenario(format!("bad scenario TOML: {e}")))
    }

    pub fn from_json_str(text: &str) -> CoreResult<Self> {
        serde_json::from_str(text)
            .map_err(|e| CoreError::Scenario(format!("bad scenario JSON: {e}")))
    }

    pub fn load(path: &Path) -> CoreResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CoreError::Scenario(format!("cannot read {}: {e}", path.display())))?;
        let scenario = match path.extension().and_then(|s| s.to_str()) {
            Some("json") => Self::from_json_str(&text)?,
            _ => Self::from_toml_str(&text)?,
        };
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn validate(&self) -> CoreResult<()> {
        if self.id.is_empty() {
            return Err(CoreError::Scenario("empty scenario id".into()));
        }
        let fq = Fq::new(self.q)?;
        if let Some(p) = self.p {
            if p != fq.p() {
                return Err(CoreError::Scenario(format!(
                    "declared p = {p} but q = {} has characteristic {}",
                    self.q,
                    fq.p()
                )));
            }
        }
        if self.e < 1 {
            return Err(CoreError::Scenario("e must be >= 1".into()));
        }
        Ok(())
    }

    pub fn precision_units(&self) -> i64 {
        self.precision.unwrap_or(64 * self.e)
    }

    pub fn interval_rats(&self) -> CoreResult<(Rat, Rat)> {
        let a: Rat = self
            .interval
            .0
            .parse()
            .map_err(|e| CoreError::Scenario(format!("bad interval start: {e}")))?;
        let b: Rat = self
            .interval
            .1
            .parse()
            .map_err(|e| CoreError::Scenario(format!("bad interval end: {e}")))?;
        Ok((a, b))
    }

    /// Builds the cover, optionally overriding the precision cap.
    pub fn build_cover(&self, precision_override: Option<i64>) -> CoreResult<CoverSpec> {
        let fq = Fq::new(self.q)?;
        let interval = self.interval_rats()?;
        let precision = precision_override.unwrap_or_else(|| self.precision_units());
        match &self.cover {
            CoverDoc::Kummer { m, u } => {
                CoverSpec::kummer(&fq, *m, parse_poly(&fq, u)?, interval, precision)
            }
            CoverDoc::ArtinSchreier { g } => {
                CoverSpec::artin_schreier(&fq, parse_poly(&fq, g)?, interval, precision)
            }
            CoverDoc::Compositum { m, u, g } => CoverSpec::compositum(
                &fq,
                *m,
                parse_poly(&fq, u)?,
                parse_poly(&fq, g)?,
                interval,
                precision,
            ),
            CoverDoc::Monic { coeffs } => {
                let cs = coeffs
                    .iter()
                    .map(|c| parse_poly(&fq, c))
                    .collect::<CoreResult<Vec<_>>>()?;
                CoverSpec::monic(&fq, cs, interval, precision)
            }
        }
    }

    /// Indices of the characters to run, always sorted.
    pub fn character_indices(&self, group_order: usize) -> CoreResult<Vec<usize>> {
        match &self.characters {
            CharacterSelector::All(s) if s == "all" => Ok((0..group_order).collect()),
            CharacterSelector::All(s) => Err(CoreError::Scenario(format!(
                "bad character selector `{s}` (use \"all\" or a list of indices)"
            ))),
            CharacterSelector::Indices(v) => {
                let mut out = v.clone();
                out.sort_unstable();
                out.dedup();
                if out.iter().any(|&i| i >= group_order) {
                    return Err(CoreError::Scenario(format!(
                        "character index out of range (group order {group_order})"
                    )));
                }
                Ok(out)
            }
        }
    }
}

/// Parses an `exponent -> series` map into a Laurent polynomial.
pub fn parse_poly(fq: &Arc<Fq>, doc: &BTreeMap<String, String>) -> CoreResult<LaurentPoly> {
    let mut out = LaurentPoly::zero(fq);
    for (exp_str, series) in doc {
        let exp: i64 = exp_str
            .trim()
            .parse()
            .map_err(|_| CoreError::Scenario(format!("bad xi exponent `{exp_str}`")))?;
        let coeff = parse_series(fq, series)?;
        out.add_term(exp, coeff);
    }
    Ok(out)
}

/// Parses a series string: signed terms `c*pi^(a/b)` with integer or
/// generator-power coefficients.
pub fn parse_series(fq: &Arc<Fq>, text: &str) -> CoreResult<FieldElem> {
    let mut acc = FieldElem::zero(fq);
    for (sign, term) in split_terms(text)? {
        let t = parse_term(fq, term.trim())?;
        acc = if sign { acc.add(&t) } else { acc.sub(&t) };
    }
    Ok(acc)
}

fn split_terms(text: &str) -> CoreResult<Vec<(bool, &str)>> {
    let mut out = Vec::new();
    let mut depth = 0usize;
    let mut start = 0usize;
    let mut sign = true;
    let bytes = text.as_bytes();
    for (i, &b) in bytes.iter().enumerate() {
        match b {
            b'(' | b'{' => depth += 1,
            b')' | b'}' => {
                depth = depth
                    .checked_sub(1)
                    .ok_or_else(|| CoreError::Scenario(format!("unbalanced parens in `{text}`")))?
            }
            b'+' | b'-' if depth == 0 && i > start => {
                // a sign after '^' or inside an exponent belongs to the term
                let prev = text[start..i].trim_end().as_bytes().last().copied();
                if prev != Some(b'^') && prev != Some(b'*') {
                    out.push((sign, &text[start..i]));
                    sign = b == b'+';
                    start = i + 1;
                }
            }
            b'-' if depth == 0 && i == start => {
                sign = false;
                start = i + 1;
            }
            b'+' if depth == 0 && i == start => {
                start = i + 1;
            }
            _ => {}
        }
    }
    if start < text.len() {
        out.push((sign, &text[start..]));
    }
    if out.is_empty() {
        out.push((true, "0"));
    }
    Ok(out)
}

fn parse_term(fq: &Arc<Fq>, term: &str) -> CoreResult<FieldElem> {
    if term.is_empty() {
        return Err(CoreError::Scenario("empty term".into()));
    }
    let mut coeff = FqElem::one(fq);
    let mut exp = Rat::zero();
    for factor in term.split('*') {
        let f = factor.trim();
        if f.is_empty() {
            return Err(CoreError::Scenario(format!("empty factor in `{term}`")));
        }
        if let Some(rest) = f.strip_prefix("pi") {
            let rest = rest.trim();
            if rest.is_empty() {
                exp = &exp + &Rat::one();
            } else if let Some(e) = rest.strip_prefix('^') {
                exp = &exp + &parse_exponent(e.trim())?;
            } else {
                return Err(CoreError::Scenario(format!("bad pi factor `{f}`")));
            }
        } else if let Some(rest) = f.strip_prefix('g') {
            let power: u64 = if rest.is_empty() {
                1
            } else if let Some(e) = rest.strip_prefix('^') {
                e.trim()
                    .parse()
                    .map_err(|_| CoreError::Scenario(format!("bad generator power `{f}`")))?
            } else {
                return Err(CoreError::Scenario(format!("bad generator factor `{f}`")));
            };
            coeff = coeff.mul(&FqElem::generator(fq).pow(power));
        } else {
            let n: i64 = f
                .parse()
                .map_err(|_| CoreError::Scenario(format!("bad integer factor `{f}`")))?;
            coeff = coeff.mul(&FqElem::from_int(fq, n));
        }
    }
    Ok(FieldElem::monomial(fq, coeff, exp))
}

fn parse_exponent(text: &str) -> CoreResult<Rat> {
    let t = text
        .trim()
        .trim_start_matches(['(', '{'])
        .trim_end_matches([')', '}']);
    t.parse()
        .map_err(|e| CoreError::Scenario(format!("bad exponent `{text}`: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn series_grammar() {
        let fq = Fq::new(9).unwrap();
        let x = parse_series(&fq, "pi^2 + 3*pi^3").unwrap();
        assert_eq!(x.valuation().known().unwrap(), Rat::int(2));
        let y = parse_series(&fq, "g^2*pi^(-1) - pi^(1/2)").unwrap();
        assert_eq!(y.valuation().known().unwrap(), Rat::int(-1));
        let z = parse_series(&fq, "-pi").unwrap();
        assert_eq!(z.valuation().known().unwrap(), Rat::int(1));
        let w = parse_series(&fq, "0").unwrap();
        assert!(w.is_exact_zero());
        assert!(parse_series(&fq, "pi^").is_err());
    }

    #[test]
    fn scenario_round_trip() {
        let text = r#"
id = "as-demo"
q = 2
e = 1
interval = ["1/10", "3"]

[cover]
kind = "artin-schreier"
g = { "-3" = "1" }
"#;
        let s = Scenario::from_toml_str(text).unwrap();
        s.validate().unwrap();
        let cover = s.build_cover(None).unwrap();
        assert_eq!(cover.degree(), 2);
        assert_eq!(s.precision_units(), 64);
        let json = serde_json::to_string(&s).unwrap();
        let s2 = Scenario::from_json_str(&json).unwrap();
        assert_eq!(s2.id, "as-demo");
    }

    #[test]
    fn character_selection() {
        let text = r#"
id = "k"
q = 7
interval = ["0", "2"]
characters = [2, 1, 1]

[cover]
kind = "kummer"
m = 3
u = { "1" = "1" }
"#;
        let s = Scenario::from_toml_str(text).unwrap();
        assert_eq!(s.character_indices(3).unwrap(), vec![1, 2]);
        assert!(s.character_indices(2).is_err());
    }
}
