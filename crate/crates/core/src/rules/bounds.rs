use num_bigint::BigInt;

use super::RuleError;
use crate::rational::Rational;

/// d(d-1)⋯(d-k+1).
pub fn falling_factorial(d: u64, k: u64) -> BigInt {
    (0..k).fold(BigInt::from(1), |acc, i| acc * (d - i))
}

/// Manipulability bound for the d-ary bracket against coalitions of size
/// `k`: 1 − 2·(d)_k / d^(k+1). Requires 2 ≤ k ≤ d.
pub fn alpha_bound(d: u64, k: u64) -> Result<Rational, RuleError> {
    if k < 2 || k > d {
        return Err(RuleError::Domain(format!(
            "alpha bound needs 2 <= k <= d, got d={d}, k={k}"
        )));
    }
    let numer = falling_factorial(d, k) * 2;
    let denom = BigInt::from(d).pow(k as u32 + 1);
    Ok(Rational::one() - Rational::from_big(numer, denom))
}

/// Bound for the extension of a k-SNM-α rule on `n` teams:
/// α(1 − (k−1)²/n) + (k−1)²/n.
pub fn ext_alpha_bound(alpha: &Rational, k: u64, n: u64) -> Result<Rational, RuleError> {
    if alpha.is_negative() || alpha > &Rational::one() {
        return Err(RuleError::Domain(format!("alpha {alpha} outside [0, 1]")));
    }
    if n == 0 || k < 2 {
        return Err(RuleError::Domain(format!(
            "need n >= 1 and k >= 2, got n={n}, k={k}"
        )));
    }
    let spill = Rational::from_big(BigInt::from((k - 1) * (k - 1)), BigInt::from(n));
    Ok(alpha * &(Rational::one() - &spill) + spill)
}
