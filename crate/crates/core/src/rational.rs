//! Checked exact rational arithmetic over `i128`.

use crate::inert::InertForm;

/// A reduced fraction with positive denominator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Q {
    n: i128,
    d: i128,
}

fn gcd(mut a: i128, mut b: i128) -> i128 {
    a = a.abs();
    b = b.abs();
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

impl Q {
    pub const ZERO: Q = Q { n: 0, d: 1 };
    pub const ONE: Q = Q { n: 1, d: 1 };

    /// Panics when `d` is zero.
    pub fn new(n: i128, d: i128) -> Q {
        Q::checked_new(n, d).expect("nonzero denominator within range")
    }

    pub fn checked_new(n: i128, d: i128) -> Option<Q> {
        if d == 0 {
            return None;
        }
        let g = gcd(n, d).max(1);
        let (mut n, mut d) = (n / g, d / g);
        if d < 0 {
            n = n.checked_neg()?;
            d = d.checked_neg()?;
        }
        Some(Q { n, d })
    }

    pub fn from_int(v: i128) -> Q {
        Q { n: v, d: 1 }
    }

    pub fn numer(self) -> i128 {
        self.n
    }

    pub fn denom(self) -> i128 {
        self.d
    }

    pub fn is_integer(self) -> bool {
        self.d == 1
    }

    pub fn is_zero(self) -> bool {
        self.n == 0
    }

    pub fn is_one(self) -> bool {
        self == Q::ONE
    }

    pub fn is_negative(self) -> bool {
        self.n < 0
    }

    pub fn checked_add(self, o: Q) -> Option<Q> {
        let n = self.n.checked_mul(o.d)?.checked_add(o.n.checked_mul(self.d)?)?;
        Q::checked_new(n, self.d.checked_mul(o.d)?)
    }

    pub fn checked_mul(self, o: Q) -> Option<Q> {
        Q::checked_new(self.n.checked_mul(o.n)?, self.d.checked_mul(o.d)?)
    }

    pub fn checked_neg(self) -> Option<Q> {
        Some(Q {
            n: self.n.checked_neg()?,
            d: self.d,
        })
    }

    pub fn checked_recip(self) -> Option<Q> {
        Q::checked_new(self.d, self.n)
    }

    /// Integer power; `None` on overflow or a zero base with negative exponent.
    pub fn checked_powi(self, e: i128) -> Option<Q> {
        let base = if e < 0 { self.checked_recip()? } else { self };
        let e = u32::try_from(e.unsigned_abs()).ok()?;
        Q::checked_new(base.n.checked_pow(e)?, base.d.checked_pow(e)?)
    }

    pub fn to_f64(self) -> f64 {
        self.n as f64 / self.d as f64
    }

    /// INTPOS/INTNEG when integral, RATIONAL otherwise.
    pub fn to_inert(self) -> InertForm {
        if self.d == 1 {
            InertForm::int(self.n)
        } else {
            InertForm::rational(self.n, self.d)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduces_and_normalizes_sign() {
        assert_eq!(Q::new(2, -4), Q::new(-1, 2));
        assert_eq!(Q::new(0, -5), Q::ZERO);
    }

    #[test]
    fn arithmetic() {
        let a = Q::new(1, 2);
        let b = Q::new(1, 3);
        assert_eq!(a.checked_add(b), Some(Q::new(5, 6)));
        assert_eq!(a.checked_mul(b), Some(Q::new(1, 6)));
        assert_eq!(Q::from_int(2).checked_powi(-3), Some(Q::new(1, 8)));
        assert_eq!(Q::ZERO.checked_powi(-1), None);
        assert_eq!(Q::from_int(i128::MAX).checked_add(Q::ONE), None);
    }
}
