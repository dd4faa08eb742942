//! Exact rational coefficients.

use num::{BigInt, BigRational, One, Signed, Zero};

/// Ground-field element: an arbitrary-precision rational in lowest terms.
pub type Scalar = BigRational;

pub fn int(n: i64) -> Scalar {
    BigRational::from_integer(BigInt::from(n))
}

pub fn frac(num: i64, den: i64) -> Scalar {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn one() -> Scalar {
    Scalar::one()
}

pub fn zero() -> Scalar {
    Scalar::zero()
}

/// `(-1)^k` as a scalar multiplier applied in place.
pub fn negate_if(c: &mut Scalar, odd: bool) {
    if odd {
        *c = -std::mem::take(c);
    }
}

/// Renders `c` in the grammar's literal syntax (`a` or `a/b`).
pub fn render(c: &Scalar) -> String {
    if c.denom().is_one() {
        format!("{}", c.numer())
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

pub fn is_negative(c: &Scalar) -> bool {
    c.is_negative()
}
