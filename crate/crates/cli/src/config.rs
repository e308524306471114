//! Flag parsing helpers: exact rational parameter lists, seed resolution,
//! and the paired exact/float configurations the suites run on.

use num_rational::BigRational;
use pencil_lab::scalar::{Rat, C64};
use pencil_lab::seed::child_rng;
use pencil_lab::variety::PencilConfig;

pub const SEED_ENV: &str = "PENCIL_LAB_SEED";
pub const DEFAULT_SEED: u64 = 2024;

/// Resolves the master seed: explicit flag, then the environment variable,
/// then a fixed default.
pub fn resolve_seed(flag: Option<u64>) -> Result<u64, String> {
    if let Some(seed) = flag {
        return Ok(seed);
    }
    match std::env::var(SEED_ENV) {
        Ok(text) => text
            .trim()
            .parse::<u64>()
            .map_err(|_| format!("{SEED_ENV} must be an unsigned integer, got {text:?}")),
        Err(_) => Ok(DEFAULT_SEED),
    }
}

/// Parses one decimal or fractional literal into an exact rational:
/// `-3`, `2.5`, `7/4`.
pub fn parse_rational(text: &str) -> Result<Rat, String> {
    let t = text.trim();
    if t.is_empty() {
        return Err("empty parameter entry".into());
    }
    if let Some((numer, denom)) = t.split_once('/') {
        let n: num_bigint::BigInt = numer
            .trim()
            .parse()
            .map_err(|_| format!("bad fraction numerator in {t:?}"))?;
        let d: num_bigint::BigInt = denom
            .trim()
            .parse()
            .map_err(|_| format!("bad fraction denominator in {t:?}"))?;
        if d == 0.into() {
            return Err(format!("zero denominator in {t:?}"));
        }
        return Ok(BigRational::new(n, d));
    }
    let (sign, body) = match t.strip_prefix('-') {
        Some(rest) => (-1i64, rest),
        None => (1, t.strip_prefix('+').unwrap_or(t)),
    };
    let (int_part, frac_part) = match body.split_once('.') {
        Some((i, f)) => (i, f),
        None => (body, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(format!("unparsable number {t:?}"));
    }
    let digits = format!("{int_part}{frac_part}");
    if !digits.chars().all(|c| c.is_ascii_digit()) {
        return Err(format!("unparsable number {t:?}"));
    }
    let numer: num_bigint::BigInt = digits
        .parse()
        .map_err(|_| format!("unparsable number {t:?}"))?;
    let denom = num_bigint::BigInt::from(10u32).pow(frac_part.len() as u32);
    Ok(BigRational::new(numer * sign, denom))
}

/// The exact and float views of one parameter choice.
pub struct ConfigPair {
    pub exact: PencilConfig<Rat>,
    pub float: PencilConfig<C64>,
    /// Exact parameters rendered for the certificate echo.
    pub exact_text: Vec<String>,
}

/// Builds the configuration from `--n` and `--mu` (a comma list or the word
/// `random`). Random parameters are drawn from a dedicated child stream so
/// the rest of the run is unaffected.
pub fn build_config(n: usize, mu_flag: &str, seed: u64) -> Result<ConfigPair, String> {
    if n < 2 {
        return Err("n must be at least 2".into());
    }
    let exact = if mu_flag.trim().eq_ignore_ascii_case("random") {
        let mut rng = child_rng(seed, 0xC0FF);
        PencilConfig::random_rational(n, &mut rng)
    } else {
        let entries: Vec<&str> = mu_flag.split(',').collect();
        if entries.len() != n + 3 {
            return Err(format!(
                "mu needs exactly n + 3 = {} entries, got {}",
                n + 3,
                entries.len()
            ));
        }
        let mu = entries
            .iter()
            .map(|e| parse_rational(e))
            .collect::<Result<Vec<Rat>, String>>()?;
        PencilConfig::new(n, mu).map_err(|e| format!("mu not usable: {e}"))?
    };
    let float = exact.to_float();
    let exact_text = exact.mu().iter().map(|m| m.to_string()).collect();
    Ok(ConfigPair {
        exact,
        float,
        exact_text,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use pencil_lab::scalar::rat;

    #[test]
    fn decimal_literals_become_exact_fractions() {
        assert_eq!(parse_rational("2.5").unwrap(), rat(5, 2));
        assert_eq!(parse_rational("-0.125").unwrap(), rat(-1, 8));
        assert_eq!(parse_rational("7").unwrap(), rat(7, 1));
        assert_eq!(parse_rational("3/4").unwrap(), rat(3, 4));
        assert_eq!(parse_rational("-9/6").unwrap(), rat(-3, 2));
    }

    #[test]
    fn malformed_literals_are_rejected() {
        assert!(parse_rational("").is_err());
        assert!(parse_rational("1.2.3").is_err());
        assert!(parse_rational("a").is_err());
        assert!(parse_rational("1/0").is_err());
    }

    #[test]
    fn config_requires_matching_count_and_distinctness() {
        assert!(build_config(2, "0,1,2,3", 1).is_err());
        assert!(build_config(2, "0,0,2,3,4", 1).is_err());
        let pair = build_config(2, "0,1,2,3,4", 1).unwrap();
        assert_eq!(pair.float.n(), 2);
        assert_eq!(pair.exact_text.len(), 5);
    }

    #[test]
    fn random_config_is_seed_deterministic() {
        let a = build_config(3, "random", 99).unwrap();
        let b = build_config(3, "random", 99).unwrap();
        assert_eq!(a.exact_text, b.exact_text);
    }
}
