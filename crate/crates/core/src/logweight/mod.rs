//! Signed reals stored as `sign · exp(L)` with `L` an extended-precision
//! float, plus the weights `ξ_α = 1/(|α|!)^{α!}` built on top of them.

mod naive;
mod xi;

use std::cell::RefCell;
use std::cmp::Ordering;
use std::fmt;

use astro_float::{BigFloat, Consts, RoundingMode};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

pub use naive::{xi_naive, NaiveXi};
pub use xi::{check_log_precision, ln_factorial, xi, xi_ratio};

pub const DEFAULT_PRECISION: usize = 256;
/// Fraction bits that must survive in a log-magnitude.
pub const MIN_FRACTION_BITS: i64 = 32;

pub(crate) const RM: RoundingMode = RoundingMode::ToEven;
const LN2: f64 = std::f64::consts::LN_2;

thread_local! {
    static CONSTS: RefCell<Consts> =
        RefCell::new(Consts::new().expect("allocate astro-float constant cache"));
}

pub(crate) fn with_consts<R>(f: impl FnOnce(&mut Consts) -> R) -> R {
    CONSTS.with(|c| f(&mut c.borrow_mut()))
}

/// Nearest `f64` to a `BigFloat`, with `±∞`/`0` outside the double range.
pub fn bigfloat_to_f64(x: &BigFloat) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x.is_inf_pos() {
        return f64::INFINITY;
    }
    if x.is_inf_neg() {
        return f64::NEG_INFINITY;
    }
    if x.is_zero() {
        return 0.0;
    }
    let Some((words, _, sign, e, _)) = x.as_raw_parts() else {
        return f64::NAN;
    };
    let n = words.len();
    let mut frac = words[n - 1] as f64 / 2f64.powi(64);
    if n >= 2 {
        frac += words[n - 2] as f64 / 2f64.powi(128);
    }
    let e = e as i64;
    let mag = if e > 1100 {
        f64::INFINITY
    } else if e < -1200 {
        0.0
    } else {
        let h = (e / 2) as i32;
        frac * 2f64.powi(h) * 2f64.powi(e as i32 - h)
    };
    if sign.is_negative() {
        -mag
    } else {
        mag
    }
}

pub(crate) fn bigfloat_from_f64(x: f64, p: usize) -> BigFloat {
    BigFloat::from_f64(x, p)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

impl Sign {
    pub fn as_i8(self) -> i8 {
        match self {
            Sign::Negative => -1,
            Sign::Zero => 0,
            Sign::Positive => 1,
        }
    }

    pub fn from_i64(v: i64) -> Self {
        match v.cmp(&0) {
            Ordering::Less => Sign::Negative,
            Ordering::Equal => Sign::Zero,
            Ordering::Greater => Sign::Positive,
        }
    }

    pub fn mul(self, other: Sign) -> Sign {
        Sign::from_i64(self.as_i8() as i64 * other.as_i8() as i64)
    }

    pub fn neg(self) -> Sign {
        Sign::from_i64(-(self.as_i8() as i64))
    }
}

/// How a conversion to `f64` left the representable range.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Saturation {
    None,
    Underflow,
    Overflow,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FloatValue {
    pub value: f64,
    pub saturation: Saturation,
}

/// `sign · exp(log_magnitude)`.
#[derive(Clone)]
pub struct LogScalar {
    sign: Sign,
    log: BigFloat,
    precision: usize,
}

impl LogScalar {
    pub fn zero(precision: usize) -> Self {
        Self {
            sign: Sign::Zero,
            log: BigFloat::from_word(0, precision),
            precision,
        }
    }

    pub fn one(precision: usize) -> Self {
        Self {
            sign: Sign::Positive,
            log: BigFloat::from_word(0, precision),
            precision,
        }
    }

    /// `sign · exp(log)`.
    pub fn from_log(sign: Sign, log: BigFloat, precision: usize) -> Self {
        if sign == Sign::Zero {
            return Self::zero(precision);
        }
        Self {
            sign,
            log,
            precision,
        }
    }

    pub fn from_ln_f64(sign: Sign, ln: f64, precision: usize) -> Self {
        Self::from_log(sign, bigfloat_from_f64(ln, precision), precision)
    }

    pub fn from_f64(x: f64, precision: usize) -> Self {
        if x == 0.0 {
            return Self::zero(precision);
        }
        let sign = if x < 0.0 { Sign::Negative } else { Sign::Positive };
        let log = with_consts(|cc| {
            bigfloat_from_f64(x.abs(), precision).ln(precision, RM, cc)
        });
        Self {
            sign,
            log,
            precision,
        }
    }

    pub fn sign(&self) -> Sign {
        self.sign
    }

    pub fn is_zero(&self) -> bool {
        self.sign == Sign::Zero
    }

    pub fn precision(&self) -> usize {
        self.precision
    }

    /// Natural-log magnitude; meaningless for zero.
    pub fn log_magnitude(&self) -> &BigFloat {
        &self.log
    }

    /// `ln|x|` as a double, `−∞` for zero.
    pub fn ln_f64(&self) -> f64 {
        if self.is_zero() {
            f64::NEG_INFINITY
        } else {
            bigfloat_to_f64(&self.log)
        }
    }

    pub fn log10_f64(&self) -> f64 {
        self.ln_f64() / std::f64::consts::LN_10
    }

    pub fn neg(&self) -> Self {
        Self {
            sign: self.sign.neg(),
            ..self.clone()
        }
    }

    pub fn abs(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        Self {
            sign: Sign::Positive,
            ..self.clone()
        }
    }

    fn joint_precision(&self, other: &Self) -> usize {
        self.precision.max(other.precision)
    }

    pub fn mul(&self, other: &Self) -> Self {
        let p = self.joint_precision(other);
        if self.is_zero() || other.is_zero() {
            return Self::zero(p);
        }
        Self {
            sign: self.sign.mul(other.sign),
            log: self.log.add(&other.log, p, RM),
            precision: p,
        }
    }

    /// Panics when `other` is zero.
    pub fn div(&self, other: &Self) -> Self {
        assert!(!other.is_zero(), "LogScalar division by zero");
        let p = self.joint_precision(other);
        if self.is_zero() {
            return Self::zero(p);
        }
        Self {
            sign: self.sign.mul(other.sign),
            log: self.log.sub(&other.log, p, RM),
            precision: p,
        }
    }

    pub fn recip(&self) -> Self {
        Self::one(self.precision).div(self)
    }

    /// Multiplies by a double, sign included.
    pub fn mul_f64(&self, x: f64) -> Self {
        self.mul(&Self::from_f64(x, self.precision))
    }

    /// Orders by `|x|`, zero smallest.
    pub fn cmp_magnitude(&self, other: &Self) -> Ordering {
        match (self.is_zero(), other.is_zero()) {
            (true, true) => Ordering::Equal,
            (true, false) => Ordering::Less,
            (false, true) => Ordering::Greater,
            (false, false) => cmp_big(&self.log, &other.log),
        }
    }

    /// Orders by signed value.
    pub fn cmp_value(&self, other: &Self) -> Ordering {
        let s = self.sign.cmp(&other.sign);
        if s != Ordering::Equal {
            return s;
        }
        match self.sign {
            Sign::Zero => Ordering::Equal,
            Sign::Positive => cmp_big(&self.log, &other.log),
            Sign::Negative => cmp_big(&other.log, &self.log),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let p = self.joint_precision(other);
        if other.is_zero() {
            return self.with_precision(p);
        }
        if self.is_zero() {
            return other.with_precision(p);
        }
        let (big, small) = if cmp_big(&self.log, &other.log) == Ordering::Less {
            (other, self)
        } else {
            (self, other)
        };
        let d = small.log.sub(&big.log, p, RM);
        if bigfloat_to_f64(&d) < -((p as f64 + 16.0) * LN2) {
            return big.with_precision(p);
        }
        let same = big.sign == small.sign;
        if !same && d.is_zero() {
            return Self::zero(p);
        }
        let wp = if same { p + 64 } else { 2 * p + 64 };
        let log = with_consts(|cc| {
            let e = d.exp(wp, RM, cc);
            let one = BigFloat::from_word(1, wp);
            let t = if same {
                one.add(&e, wp, RM)
            } else {
                one.sub(&e, wp, RM)
            };
            let lt = t.ln(wp, RM, cc);
            big.log.add(&lt, p, RM)
        });
        Self {
            sign: big.sign,
            log,
            precision: p,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    fn with_precision(&self, p: usize) -> Self {
        Self {
            precision: p,
            ..self.clone()
        }
    }

    /// Nearest double, flagging underflow (zero or subnormal result) and
    /// overflow (`±∞`).
    pub fn to_f64(&self) -> FloatValue {
        if self.is_zero() {
            return FloatValue {
                value: 0.0,
                saturation: Saturation::None,
            };
        }
        let l = bigfloat_to_f64(&self.log);
        let s = self.sign.as_i8() as f64;
        if l > f64::MAX.ln() {
            return FloatValue {
                value: s * f64::INFINITY,
                saturation: Saturation::Overflow,
            };
        }
        let v = l.exp();
        let saturation = if v < f64::MIN_POSITIVE {
            Saturation::Underflow
        } else {
            Saturation::None
        };
        FloatValue {
            value: s * v,
            saturation,
        }
    }
}

pub(crate) fn cmp_big(a: &BigFloat, b: &BigFloat) -> Ordering {
    match a.cmp(b) {
        Some(c) if c < 0 => Ordering::Less,
        Some(c) if c > 0 => Ordering::Greater,
        _ => Ordering::Equal,
    }
}

impl PartialEq for LogScalar {
    /// Bitwise equality of sign and log-magnitude.
    fn eq(&self, other: &Self) -> bool {
        self.sign == other.sign
            && (self.sign == Sign::Zero || cmp_big(&self.log, &other.log) == Ordering::Equal)
    }
}

impl fmt::Debug for LogScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.sign {
            Sign::Zero => write!(f, "0"),
            s => write!(
                f,
                "{}exp({:.6})",
                if s == Sign::Negative { "-" } else { "" },
                self.ln_f64()
            ),
        }
    }
}

impl fmt::Display for LogScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let l10 = self.log10_f64();
        let e = l10.floor();
        let mant = 10f64.powf(l10 - e);
        let sign = if self.sign == Sign::Negative { "-" } else { "" };
        write!(f, "{sign}{mant:.6}e{e}")
    }
}

impl Serialize for LogScalar {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("LogScalar", 2)?;
        st.serialize_field("sign", &self.sign.as_i8())?;
        let l10 = if self.is_zero() {
            None
        } else {
            Some(self.log10_f64())
        };
        st.serialize_field("log10_magnitude", &l10)?;
        st.end()
    }
}

/// Sum with exact cancellation: terms of bitwise-equal magnitude are merged
/// by their net sign count before anything is rounded, then the rest is
/// accumulated largest first until the remainder cannot move the result.
pub fn sum_exact<I>(terms: I, precision: usize) -> LogScalar
where
    I: IntoIterator<Item = LogScalar>,
{
    let mut v: Vec<LogScalar> = terms.into_iter().filter(|t| !t.is_zero()).collect();
    if v.is_empty() {
        return LogScalar::zero(precision);
    }
    if v.len() == 1 {
        let t = v.pop().unwrap();
        let p = t.precision.max(precision);
        return t.with_precision(p);
    }
    v.sort_by(|a, b| cmp_big(&b.log, &a.log));

    let mut merged: Vec<LogScalar> = Vec::with_capacity(v.len());
    let mut i = 0;
    while i < v.len() {
        let mut j = i + 1;
        let mut net = v[i].sign.as_i8() as i64;
        while j < v.len() && cmp_big(&v[j].log, &v[i].log) == Ordering::Equal {
            net += v[j].sign.as_i8() as i64;
            j += 1;
        }
        if net != 0 {
            let mut t = v[i].clone();
            t.sign = Sign::from_i64(net);
            if net.abs() > 1 {
                let p = t.precision;
                t.log = with_consts(|cc| {
                    let ln = BigFloat::from_u64(net.unsigned_abs(), 64).ln(p, RM, cc);
                    t.log.add(&ln, p, RM)
                });
            }
            merged.push(t);
        }
        i = j;
    }
    if merged.is_empty() {
        return LogScalar::zero(precision);
    }
    merged.sort_by(|a, b| cmp_big(&b.log, &a.log));

    let n = merged.len();
    let mut iter = merged.into_iter();
    let mut acc = iter.next().unwrap();
    for (idx, t) in iter.enumerate() {
        if !acc.is_zero() {
            let remaining = (n - 1 - idx) as f64;
            let gap = bigfloat_to_f64(&t.log) - bigfloat_to_f64(&acc.log);
            let p = acc.precision.max(t.precision) as f64;
            if gap < -((p + 8.0 + remaining.log2()) * LN2) {
                break;
            }
        }
        acc = acc.add(&t);
    }
    acc.with_precision(acc.precision.max(precision))
}

/// `Σ |t|`, anchored at the largest term; zeros are skipped.
pub fn log_sum_magnitudes<'a, I>(terms: I, precision: usize) -> LogScalar
where
    I: IntoIterator<Item = &'a LogScalar>,
{
    sum_exact(terms.into_iter().map(LogScalar::abs), precision)
}

#[cfg(test)]
mod tests {
    use super::*;

    const P: usize = DEFAULT_PRECISION;

    fn ln(x: f64) -> LogScalar {
        LogScalar::from_ln_f64(Sign::Positive, x, P)
    }

    #[test]
    fn zero_absorbs() {
        let s = log_sum_magnitudes(&[LogScalar::one(P), LogScalar::zero(P)], P);
        assert_eq!(s, LogScalar::one(P));
    }

    #[test]
    fn equal_halves_sum_to_one() {
        let h = LogScalar::from_f64(0.5, P);
        let s = log_sum_magnitudes(&[h.clone(), h], P);
        assert!(s.ln_f64().abs() < 1e-70);
    }

    #[test]
    fn far_apart_terms() {
        let s = log_sum_magnitudes(&[ln(-50.0), ln(-60.0)], P);
        let expect = -50.0 + (1.0 + (-10f64).exp()).ln();
        assert!((s.ln_f64() - expect).abs() < 1e-13);
    }

    #[test]
    fn exact_cancellation() {
        let a = ln(-4000.0);
        let s = sum_exact([a.clone(), a.neg(), ln(-9000.0)], P);
        assert!((s.ln_f64() + 9000.0).abs() < 1e-9);
        assert_eq!(sum_exact([a.clone(), a.neg()], P), LogScalar::zero(P));
    }

    #[test]
    fn negligible_tail_leaves_bits_untouched() {
        let a = ln(3.25);
        let s = sum_exact([a.clone(), ln(-500.0)], P);
        assert_eq!(s, a);
    }

    #[test]
    fn signed_addition() {
        let a = LogScalar::from_f64(3.0, P);
        let b = LogScalar::from_f64(-5.0, P);
        let c = a.add(&b);
        assert_eq!(c.sign(), Sign::Negative);
        assert!((c.to_f64().value + 2.0).abs() < 1e-14);
    }

    #[test]
    fn saturation_is_flagged() {
        let tiny = ln(-800.0).to_f64();
        assert_eq!(tiny.saturation, Saturation::Underflow);
        let huge = ln(800.0).to_f64();
        assert_eq!(huge.saturation, Saturation::Overflow);
        assert!(huge.value.is_infinite());
        assert_eq!(LogScalar::from_f64(2.5, P).to_f64().value, 2.5);
    }

    #[test]
    fn bigfloat_round_trip() {
        for x in [1.0, -3.5, 1e-300, 6.02e23, 0.1] {
            assert_eq!(bigfloat_to_f64(&bigfloat_from_f64(x, 128)), x);
        }
    }

    #[test]
    fn serializes_log10() {
        let v = serde_json::to_value(LogScalar::from_f64(-100.0, P)).unwrap();
        assert_eq!(v["sign"], -1);
        assert!((v["log10_magnitude"].as_f64().unwrap() - 2.0).abs() < 1e-14);
        let z = serde_json::to_value(LogScalar::zero(P)).unwrap();
        assert!(z["log10_magnitude"].is_null());
    }
}
