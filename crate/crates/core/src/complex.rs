//! Rectangular complex interval boxes.

use serde::{Deserialize, Serialize};

use crate::dyadic::Dyadic;
use crate::interval::{DecimalInterval, Interval};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComplexInterval {
    pub re: Interval,
    pub im: Interval,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecimalComplex {
    pub re: DecimalInterval,
    pub im: DecimalInterval,
}

impl ComplexInterval {
    pub fn new(re: Interval, im: Interval) -> Self {
        ComplexInterval { re, im }
    }

    pub fn real(re: Interval) -> Self {
        ComplexInterval { re, im: Interval::zero() }
    }

    pub fn zero() -> Self {
        ComplexInterval::real(Interval::zero())
    }

    pub fn one() -> Self {
        ComplexInterval::real(Interval::one())
    }

    pub fn point(re: Dyadic, im: Dyadic) -> Self {
        ComplexInterval { re: Interval::point(re), im: Interval::point(im) }
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn add(&self, o: &ComplexInterval) -> ComplexInterval {
        ComplexInterval { re: self.re.add(&o.re), im: self.im.add(&o.im) }
    }

    pub fn sub(&self, o: &ComplexInterval) -> ComplexInterval {
        ComplexInterval { re: self.re.sub(&o.re), im: self.im.sub(&o.im) }
    }

    pub fn neg(&self) -> ComplexInterval {
        ComplexInterval { re: self.re.neg(), im: self.im.neg() }
    }

    pub fn mul(&self, o: &ComplexInterval, prec: u32) -> ComplexInterval {
        if self.is_real() && o.is_real() {
            return ComplexInterval::real(self.re.mul_r(&o.re, prec));
        }
        let re = self.re.mul(&o.re).sub(&self.im.mul(&o.im)).round(prec);
        let im = self.re.mul(&o.im).add(&self.im.mul(&o.re)).round(prec);
        ComplexInterval { re, im }
    }

    pub fn scale(&self, k: &Interval, prec: u32) -> ComplexInterval {
        ComplexInterval { re: self.re.mul_r(k, prec), im: self.im.mul_r(k, prec) }
    }

    pub fn add_real(&self, k: &Interval) -> ComplexInterval {
        ComplexInterval { re: self.re.add(k), im: self.im.clone() }
    }

    /// Enclosure of `|z|^2`.
    pub fn norm_sqr(&self, prec: u32) -> Interval {
        self.re.square(prec).add(&self.im.square(prec))
    }

    /// Enclosure of `|z|`.
    pub fn abs(&self, prec: u32) -> Interval {
        if self.is_real() {
            return self.re.abs();
        }
        self.norm_sqr(prec).sqrt(prec)
    }

    pub fn contains(&self, re: &Dyadic, im: &Dyadic) -> bool {
        self.re.contains(re) && self.im.contains(im)
    }

    pub fn intersects(&self, o: &ComplexInterval) -> bool {
        self.re.intersects(&o.re) && self.im.intersects(&o.im)
    }

    /// Larger of the real and imaginary widths.
    pub fn width(&self) -> Dyadic {
        self.re.width().max(self.im.width())
    }

    pub fn round(&self, prec: u32) -> ComplexInterval {
        ComplexInterval { re: self.re.round(prec), im: self.im.round(prec) }
    }

    pub fn to_decimal(&self) -> DecimalComplex {
        DecimalComplex { re: self.re.to_decimal(), im: self.im.to_decimal() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_of_conjugates_is_real_norm() {
        let z = ComplexInterval::new(Interval::from_int(3), Interval::from_int(4));
        let zc = ComplexInterval::new(Interval::from_int(3), Interval::from_int(-4));
        let p = z.mul(&zc, 64);
        assert_eq!(p.re, Interval::from_int(25));
        assert_eq!(p.im, Interval::zero());
        assert!(z.abs(64).contains(&Dyadic::from_int(5)));
    }
}
