//! Tagged scalar values.
//!
//! Fluent ranges are always drawn from `Bool`, `Int` and `Sym`. `Rat` and
//! `Float` only appear as intermediate results (weights, likelihoods and
//! arithmetic inside axiom bodies).

use alloc::string::{String, ToString};
use core::cmp::Ordering;
use core::fmt;
use core::hash::{Hash, Hasher};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

/// Exact rational, always in lowest terms with a positive denominator.
pub type Rational = BigRational;

/// Index into a theory's symbol table.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SymbolId(pub u32);

#[derive(Clone, Debug)]
pub enum Value {
    Bool(bool),
    Int(i64),
    /// Never integral: integral rationals that fit in `i64` are stored as `Int`.
    Rat(Rational),
    Float(f64),
    Sym(SymbolId),
}

/// The three kinds that may be compared with each other.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Bool,
    Number,
    Symbol,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kind::Bool => "bool",
            Kind::Number => "number",
            Kind::Symbol => "symbol",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ValueError {
    #[error("type mismatch: `{op}` applied to {left} and {right}")]
    Mismatch {
        op: &'static str,
        left: Kind,
        right: Kind,
    },
    #[error("type mismatch: `{op}` expects {expected}, found {found}")]
    Expected {
        op: &'static str,
        expected: Kind,
        found: Kind,
    },
    #[error("division by zero")]
    DivisionByZero,
}

#[derive(Clone, Copy)]
enum Arith {
    Add,
    Sub,
    Mul,
    Div,
}

impl Arith {
    fn symbol(self) -> &'static str {
        match self {
            Arith::Add => "+",
            Arith::Sub => "-",
            Arith::Mul => "*",
            Arith::Div => "/",
        }
    }
}

impl Value {
    /// Builds a value from a rational, collapsing integral results to `Int`.
    pub fn from_rational(r: Rational) -> Value {
        if r.is_integer() {
            if let Some(i) = r.to_integer().to_i64() {
                return Value::Int(i);
            }
        }
        Value::Rat(r)
    }

    pub fn kind(&self) -> Kind {
        match self {
            Value::Bool(_) => Kind::Bool,
            Value::Int(_) | Value::Rat(_) | Value::Float(_) => Kind::Number,
            Value::Sym(_) => Kind::Symbol,
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Value::Bool(b) => Some(*b),
            _ => None,
        }
    }

    /// Exact rational view of a non-float number.
    pub fn to_rational(&self) -> Option<Rational> {
        match self {
            Value::Int(i) => Some(Rational::from_integer(BigInt::from(*i))),
            Value::Rat(r) => Some(r.clone()),
            _ => None,
        }
    }

    pub fn to_f64(&self) -> Option<f64> {
        match self {
            Value::Int(i) => Some(*i as f64),
            Value::Rat(r) => Some(rational_to_f64(r)),
            Value::Float(x) => Some(*x),
            _ => None,
        }
    }

    pub fn is_float(&self) -> bool {
        matches!(self, Value::Float(_))
    }

    fn arith(&self, other: &Value, op: Arith) -> Result<Value, ValueError> {
        if self.kind() != Kind::Number || other.kind() != Kind::Number {
            return Err(ValueError::Mismatch {
                op: op.symbol(),
                left: self.kind(),
                right: other.kind(),
            });
        }
        if self.is_float() || other.is_float() {
            let (a, b) = (self.to_f64().unwrap(), other.to_f64().unwrap());
            let r = match op {
                Arith::Add => a + b,
                Arith::Sub => a - b,
                Arith::Mul => a * b,
                Arith::Div => {
                    if b == 0.0 {
                        return Err(ValueError::DivisionByZero);
                    }
                    a / b
                }
            };
            return Ok(Value::Float(r));
        }
        if let (Value::Int(a), Value::Int(b)) = (self, other) {
            let fast = match op {
                Arith::Add => a.checked_add(*b),
                Arith::Sub => a.checked_sub(*b),
                Arith::Mul => a.checked_mul(*b),
                Arith::Div => None,
            };
            if let Some(v) = fast {
                return Ok(Value::Int(v));
            }
        }
        let (a, b) = (self.to_rational().unwrap(), other.to_rational().unwrap());
        let r = match op {
            Arith::Add => a + b,
            Arith::Sub => a - b,
            Arith::Mul => a * b,
            Arith::Div => {
                if b.is_zero() {
                    return Err(ValueError::DivisionByZero);
                }
                a / b
            }
        };
        Ok(Value::from_rational(r))
    }

    pub fn add(&self, other: &Value) -> Result<Value, ValueError> {
        self.arith(other, Arith::Add)
    }

    pub fn sub(&self, other: &Value) -> Result<Value, ValueError> {
        self.arith(other, Arith::Sub)
    }

    pub fn mul(&self, other: &Value) -> Result<Value, ValueError> {
        self.arith(other, Arith::Mul)
    }

    pub fn div(&self, other: &Value) -> Result<Value, ValueError> {
        self.arith(other, Arith::Div)
    }

    pub fn neg(&self) -> Result<Value, ValueError> {
        match self {
            Value::Int(i) => Ok(i
                .checked_neg()
                .map(Value::Int)
                .unwrap_or_else(|| Value::from_rational(-self.to_rational().unwrap()))),
            Value::Rat(r) => Ok(Value::Rat(-r.clone())),
            Value::Float(x) => Ok(Value::Float(-x)),
            other => Err(ValueError::Expected {
                op: "-",
                expected: Kind::Number,
                found: other.kind(),
            }),
        }
    }

    pub fn abs(&self) -> Result<Value, ValueError> {
        match self {
            Value::Int(i) if *i < 0 => self.neg(),
            Value::Int(_) => Ok(self.clone()),
            Value::Rat(r) => Ok(Value::Rat(r.abs())),
            Value::Float(x) => Ok(Value::Float(x.abs())),
            other => Err(ValueError::Expected {
                op: "abs",
                expected: Kind::Number,
                found: other.kind(),
            }),
        }
    }

    /// Numeric ordering across `Int`, `Rat` and `Float`.
    pub fn num_cmp(&self, other: &Value) -> Result<Ordering, ValueError> {
        if self.kind() != Kind::Number || other.kind() != Kind::Number {
            return Err(ValueError::Mismatch {
                op: "<",
                left: self.kind(),
                right: other.kind(),
            });
        }
        if self.is_float() || other.is_float() {
            let (a, b) = (self.to_f64().unwrap(), other.to_f64().unwrap());
            return Ok(a.partial_cmp(&b).unwrap_or(Ordering::Equal));
        }
        match (self, other) {
            (Value::Int(a), Value::Int(b)) => Ok(a.cmp(b)),
            _ => Ok(self
                .to_rational()
                .unwrap()
                .cmp(&other.to_rational().unwrap())),
        }
    }

    /// Semantic equality; values of different kinds are a type error.
    pub fn sem_eq(&self, other: &Value) -> Result<bool, ValueError> {
        match (self, other) {
            (Value::Bool(a), Value::Bool(b)) => Ok(a == b),
            (Value::Sym(a), Value::Sym(b)) => Ok(a == b),
            _ if self.kind() == Kind::Number && other.kind() == Kind::Number => {
                Ok(self.num_cmp(other)? == Ordering::Equal)
            }
            _ => Err(ValueError::Mismatch {
                op: "=",
                left: self.kind(),
                right: other.kind(),
            }),
        }
    }

    fn rank(&self) -> u8 {
        match self {
            Value::Bool(_) => 0,
            Value::Int(_) | Value::Rat(_) => 1,
            Value::Float(_) => 2,
            Value::Sym(_) => 3,
        }
    }
}

/// Structural equality: `Int(2) == Rat(..)` can never hold because integral
/// rationals are normalized to `Int`. Floats compare by bit pattern.
impl PartialEq for Value {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Value::Bool(a), Value::Bool(b)) => a == b,
            (Value::Int(a), Value::Int(b)) => a == b,
            (Value::Rat(a), Value::Rat(b)) => a == b,
            (Value::Float(a), Value::Float(b)) => a.to_bits() == b.to_bits(),
            (Value::Sym(a), Value::Sym(b)) => a == b,
            _ => false,
        }
    }
}

impl Eq for Value {}

impl Hash for Value {
    fn hash<H: Hasher>(&self, state: &mut H) {
        core::mem::discriminant(self).hash(state);
        match self {
            Value::Bool(b) => b.hash(state),
            Value::Int(i) => i.hash(state),
            Value::Rat(r) => r.hash(state),
            Value::Float(x) => x.to_bits().hash(state),
            Value::Sym(s) => s.hash(state),
        }
    }
}

impl PartialOrd for Value {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Total order used for deterministic enumeration: booleans, then exact
/// numbers by magnitude, then floats, then symbols by declaration order.
impl Ord for Value {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Value::Bool(a), Value::Bool(b)) => a.cmp(b),
            (Value::Float(a), Value::Float(b)) => a.total_cmp(b),
            (Value::Sym(a), Value::Sym(b)) => a.cmp(b),
            (Value::Int(a), Value::Int(b)) => a.cmp(b),
            _ if self.rank() == 1 && other.rank() == 1 => self
                .to_rational()
                .unwrap()
                .cmp(&other.to_rational().unwrap()),
            _ => self.rank().cmp(&other.rank()),
        }
    }
}

impl From<bool> for Value {
    fn from(b: bool) -> Self {
        Value::Bool(b)
    }
}

impl From<i64> for Value {
    fn from(i: i64) -> Self {
        Value::Int(i)
    }
}

impl From<Rational> for Value {
    fn from(r: Rational) -> Self {
        Value::from_rational(r)
    }
}

/// Formats a rational as `num/den` (always with a denominator).
pub fn format_rational(r: &Rational) -> String {
    alloc::format!("{}/{}", r.numer(), r.denom())
}

/// Nearest `f64` to `r`, robust for numerators and denominators that
/// exceed the `f64` range individually.
pub fn rational_to_f64(r: &Rational) -> f64 {
    if let (Some(n), Some(d)) = (r.numer().to_f64(), r.denom().to_f64()) {
        if n.is_finite() && d.is_finite() {
            return n / d;
        }
    }
    let bits = r.numer().bits().max(r.denom().bits()) as i64;
    let shift = bits - 60;
    let two = BigInt::from(2u8);
    let (n, d) = if shift > 0 {
        let scale = num_traits::pow(two, shift as usize);
        (r.numer() / &scale, r.denom() / &scale)
    } else {
        (r.numer().clone(), r.denom().clone())
    };
    match (n.to_f64(), d.to_f64()) {
        (Some(n), Some(d)) if d != 0.0 => n / d,
        _ => 0.0,
    }
}

/// Parses `12`, `-3`, `0.25`, `1e-3`, `2.5E2` into an exact rational.
pub fn parse_decimal(text: &str) -> Option<Rational> {
    let (mantissa, exponent) = match text.find(['e', 'E']) {
        Some(i) => (&text[..i], text[i + 1..].parse::<i32>().ok()?),
        None => (text, 0),
    };
    let (negative, mantissa) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa),
    };
    let (whole, frac) = match mantissa.split_once('.') {
        Some((w, f)) => (w, f),
        None => (mantissa, ""),
    };
    if whole.is_empty() && frac.is_empty() {
        return None;
    }
    if !whole
        .chars()
        .chain(frac.chars())
        .all(|c| c.is_ascii_digit())
    {
        return None;
    }
    let mut digits = String::from(whole);
    digits.push_str(frac);
    let numer: BigInt = digits.parse().ok()?;
    let scale = exponent - frac.len() as i32;
    let ten = BigInt::from(10u8);
    let mut r = if scale >= 0 {
        Rational::from_integer(numer * num_traits::pow(ten, scale as usize))
    } else {
        Rational::new(numer, num_traits::pow(ten, (-scale) as usize))
    };
    if negative {
        r = -r;
    }
    Some(r)
}

/// Parses `a/b` or a decimal literal.
pub fn parse_rational(text: &str) -> Option<Rational> {
    match text.split_once('/') {
        Some((n, d)) => {
            let n = parse_decimal(n.trim())?;
            let d = parse_decimal(d.trim())?;
            if d.is_zero() {
                None
            } else {
                Some(n / d)
            }
        }
        None => parse_decimal(text.trim()),
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Bool(b) => write!(f, "{b}"),
            Value::Int(i) => write!(f, "{i}"),
            Value::Rat(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            Value::Float(x) => write!(f, "{}", FloatLit(*x)),
            Value::Sym(s) => write!(f, "#{}", s.0),
        }
    }
}

/// Float formatting that survives a parse round trip.
pub(crate) struct FloatLit(pub f64);

impl fmt::Display for FloatLit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = self.0.to_string();
        if s.contains(['.', 'e', 'E', 'i', 'N']) {
            f.write_str(&s)
        } else {
            write!(f, "{s}.0")
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn rationals_stay_in_lowest_terms() {
        let v = Value::Int(6).div(&Value::Int(-4)).unwrap();
        assert_eq!(v, Value::Rat(q(-3, 2)));
        if let Value::Rat(r) = &v {
            assert!(r.denom() > &BigInt::from(0));
        }
        assert_eq!(Value::Int(6).div(&Value::Int(3)).unwrap(), Value::Int(2));
    }

    #[test]
    fn mixed_kinds_are_errors() {
        assert!(Value::Bool(true).add(&Value::Int(1)).is_err());
        assert!(Value::Bool(true).sem_eq(&Value::Int(1)).is_err());
        assert!(Value::Sym(SymbolId(0)).num_cmp(&Value::Int(1)).is_err());
        assert_eq!(
            Value::Int(1).div(&Value::Int(0)),
            Err(ValueError::DivisionByZero)
        );
    }

    #[test]
    fn overflow_promotes_to_rational() {
        let big = Value::Int(i64::MAX).add(&Value::Int(1)).unwrap();
        assert!(matches!(big, Value::Rat(_)));
        assert_eq!(big.sub(&Value::Int(1)).unwrap(), Value::Int(i64::MAX));
    }

    #[test]
    fn decimals_parse_exactly() {
        assert_eq!(parse_decimal("0.25"), Some(q(1, 4)));
        assert_eq!(parse_decimal("-0.8"), Some(q(-4, 5)));
        assert_eq!(parse_decimal("14.25"), Some(q(57, 4)));
        assert_eq!(parse_decimal("1e-3"), Some(q(1, 1000)));
        assert_eq!(parse_rational("57/235"), Some(q(57, 235)));
        assert_eq!(parse_rational("14.25/52"), Some(q(57, 208)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_decimal("abc"), None);
    }

    #[test]
    fn numeric_equality_crosses_representations() {
        assert!(Value::Int(1).sem_eq(&Value::Float(1.0)).unwrap());
        assert_eq!(
            Value::Rat(q(1, 2)).num_cmp(&Value::Float(0.75)).unwrap(),
            Ordering::Less
        );
    }

    #[test]
    fn huge_rationals_convert_to_f64() {
        let n = num_traits::pow(BigInt::from(3), 800);
        let d = num_traits::pow(BigInt::from(3), 800) * BigInt::from(4) + BigInt::from(1);
        assert!((rational_to_f64(&Rational::new(n, d)) - 0.25).abs() < 1e-12);
    }
}
