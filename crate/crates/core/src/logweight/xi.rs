use std::cell::RefCell;
use std::collections::HashMap;

use astro_float::{BigFloat, Sign as FloatSign};

use super::{with_consts, LogScalar, Sign, MIN_FRACTION_BITS, RM};
use crate::error::{Error, Result};
use crate::multiindex::{BigNat, MultiIndex};

thread_local! {
    static LN_FACT: RefCell<HashMap<(u32, usize), BigFloat>> = RefCell::new(HashMap::new());
    static XI: RefCell<HashMap<(MultiIndex, usize), LogScalar>> = RefCell::new(HashMap::new());
}

fn guard(p: usize) -> usize {
    p + 64
}

/// `ln(n!) = Σ_{j≤n} ln j`, summed at the working precision plus guard bits.
pub fn ln_factorial(n: u32, precision: usize) -> BigFloat {
    if let Some(v) = LN_FACT.with(|c| c.borrow().get(&(n, precision)).cloned()) {
        return v;
    }
    let wp = guard(precision);
    // Extend from the largest cached prefix.
    let (start, mut acc) = LN_FACT.with(|c| {
        let c = c.borrow();
        (0..n)
            .rev()
            .find_map(|j| c.get(&(j, precision)).map(|v| (j + 1, v.clone())))
            .unwrap_or((1, BigFloat::from_word(0, wp)))
    });
    with_consts(|cc| {
        for j in start.max(2)..=n {
            let lj = BigFloat::from_u64(j as u64, 64).ln(wp, RM, cc);
            acc = acc.add(&lj, wp, RM);
            LN_FACT.with(|c| c.borrow_mut().insert((j, precision), acc.clone()));
        }
    });
    LN_FACT.with(|c| c.borrow_mut().insert((n, precision), acc.clone()));
    acc
}

fn bignat_to_bigfloat(n: &BigNat) -> BigFloat {
    let v = n.as_biguint();
    let bits = v.bits();
    let len = v.to_u64_digits().len() as u64;
    let normalized = v << (64 * len - bits) as usize;
    BigFloat::from_words(&normalized.to_u64_digits(), FloatSign::Pos, bits as i32)
}

/// Errors when a log-magnitude keeps fewer than [`MIN_FRACTION_BITS`]
/// fraction bits at `precision`.
pub fn check_log_precision(log: &BigFloat, precision: usize) -> Result<()> {
    if log.is_zero() {
        return Ok(());
    }
    let e = log.exponent().map(|e| e as i64).unwrap_or(i64::MAX);
    if precision as i64 - e < MIN_FRACTION_BITS {
        return Err(Error::PrecisionExhausted {
            precision,
            integer_bits: e.max(0),
            required: MIN_FRACTION_BITS,
        });
    }
    Ok(())
}

/// `ξ_α = 1/(|α|!)^{α!}` as `exp(−α!·ln(|α|!))`, with `α!` exact.
pub fn xi(alpha: &MultiIndex, precision: usize) -> Result<LogScalar> {
    let key = (alpha.clone(), precision);
    if let Some(v) = XI.with(|c| c.borrow().get(&key).cloned()) {
        return Ok(v);
    }
    let d = alpha.degree();
    let value = if d <= 1 {
        LogScalar::one(precision)
    } else {
        let mult = bignat_to_bigfloat(&alpha.factorial());
        let lf = ln_factorial(d, precision);
        let log = mult.mul(&lf, precision, RM).neg();
        check_log_precision(&log, precision)?;
        LogScalar::from_log(Sign::Positive, log, precision)
    };
    XI.with(|c| c.borrow_mut().insert(key, value.clone()));
    Ok(value)
}

/// `ξ_num / ξ_den`, as a difference of log-magnitudes.
pub fn xi_ratio(num: &MultiIndex, den: &MultiIndex, precision: usize) -> Result<LogScalar> {
    if num.dim() != den.dim() {
        return Err(Error::DimensionMismatch(format!(
            "ratio of {num} and {den}"
        )));
    }
    if num == den {
        return Ok(LogScalar::one(precision));
    }
    Ok(xi(num, precision)?.div(&xi(den, precision)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logweight::{bigfloat_to_f64, DEFAULT_PRECISION as P};

    fn mi(v: &[u32]) -> MultiIndex {
        MultiIndex::new(v.to_vec()).unwrap()
    }

    #[test]
    fn small_values() {
        assert_eq!(xi(&mi(&[0, 0]), P).unwrap(), LogScalar::one(P));
        let h = xi(&mi(&[1, 1]), P).unwrap();
        assert!((h.ln_f64() + 2f64.ln()).abs() < 1e-15);
        let t = xi(&mi(&[2, 1]), P).unwrap();
        assert!((t.ln_f64() + 2.0 * 6f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn ln_factorial_is_cached_consistently() {
        let a = ln_factorial(30, 128);
        let b = ln_factorial(10, 128);
        let c = ln_factorial(30, 128);
        assert_eq!(a.cmp(&c), Some(0));
        assert!((bigfloat_to_f64(&b) - 3628800f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn exact_big_factorial_conversion() {
        let n = BigNat::factorial(40);
        let f = bignat_to_bigfloat(&n);
        assert!((bigfloat_to_f64(&f) / 8.159152832478977e47 - 1.0).abs() < 1e-15);
    }

    #[test]
    fn ratio_of_identical_indices_is_one() {
        assert_eq!(xi_ratio(&mi(&[3, 4]), &mi(&[3, 4]), P).unwrap(), LogScalar::one(P));
    }

    #[test]
    fn precision_exhaustion() {
        // (40,40)! · ln 80! is far beyond 2^(64−32).
        assert!(matches!(
            xi(&mi(&[40, 40]), 64),
            Err(Error::PrecisionExhausted { .. })
        ));
        assert!(xi(&mi(&[40, 40]), 512).is_ok());
    }
}
