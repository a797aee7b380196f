//! Certified isolation of all complex roots of a squarefree monic polynomial.

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use crate::complex::ComplexInterval;
use crate::dyadic::{Dyadic, Round};
use crate::interval::Interval;
use crate::poly::{self, MonicIntPolynomial, Sturm};
use crate::{Error, Result};

/// Starting working precision in bits.
pub const BASE_PRECISION: u32 = 128;
/// Default number of precision doublings before giving up.
pub const DEFAULT_DOUBLINGS: u32 = 8;

/// An inclusion disc holding exactly one root.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootDisc {
    pub re: Dyadic,
    pub im: Dyadic,
    pub radius: Dyadic,
}

impl RootDisc {
    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    /// Bounding box of the disc; real roots get a degenerate imaginary part.
    pub fn to_box(&self) -> ComplexInterval {
        let re = Interval::new(self.re.sub(&self.radius), self.re.add(&self.radius));
        let im = if self.is_real() {
            Interval::zero()
        } else {
            Interval::new(self.im.sub(&self.radius), self.im.add(&self.radius))
        };
        ComplexInterval::new(re, im)
    }
}

#[derive(Clone, Copy, Debug)]
struct C64 {
    re: f64,
    im: f64,
}

impl C64 {
    fn add(self, o: C64) -> C64 {
        C64 { re: self.re + o.re, im: self.im + o.im }
    }
    fn sub(self, o: C64) -> C64 {
        C64 { re: self.re - o.re, im: self.im - o.im }
    }
    fn mul(self, o: C64) -> C64 {
        C64 { re: self.re * o.re - self.im * o.im, im: self.re * o.im + self.im * o.re }
    }
    fn div(self, o: C64) -> C64 {
        let d = o.re * o.re + o.im * o.im;
        C64 { re: (self.re * o.re + self.im * o.im) / d, im: (self.im * o.re - self.re * o.im) / d }
    }
    fn abs(self) -> f64 {
        self.re.hypot(self.im)
    }
}

/// Simultaneous Aberth iteration in double precision.
fn aberth_seeds(coeffs: &[f64]) -> Vec<C64> {
    let d = coeffs.len() - 1;
    let bound = (0..d)
        .map(|i| coeffs[i].abs().powf(1.0 / (d - i) as f64))
        .fold(0.0f64, f64::max)
        * 2.0
        + 1e-3;
    let mut z: Vec<C64> = (0..d)
        .map(|k| {
            let t = std::f64::consts::TAU * k as f64 / d as f64 + 0.4;
            C64 { re: bound * t.cos(), im: bound * t.sin() }
        })
        .collect();
    let eval = |x: C64| {
        let mut p = C64 { re: 0.0, im: 0.0 };
        let mut dp = C64 { re: 0.0, im: 0.0 };
        for c in coeffs.iter().rev() {
            dp = dp.mul(x).add(p);
            p = p.mul(x).add(C64 { re: *c, im: 0.0 });
        }
        (p, dp)
    };
    for _ in 0..500 {
        let mut moved = 0.0f64;
        for i in 0..d {
            let (p, dp) = eval(z[i]);
            if p.abs() == 0.0 {
                continue;
            }
            let ratio = p.div(dp);
            let mut s = C64 { re: 0.0, im: 0.0 };
            for j in 0..d {
                if j != i {
                    s = s.add(C64 { re: 1.0, im: 0.0 }.div(z[i].sub(z[j])));
                }
            }
            let denom = C64 { re: 1.0, im: 0.0 }.sub(ratio.mul(s));
            let w = ratio.div(denom);
            if w.re.is_finite() && w.im.is_finite() {
                z[i] = z[i].sub(w);
                moved = moved.max(w.abs() / z[i].abs().max(1.0));
            }
        }
        if moved < 1e-15 {
            break;
        }
    }
    z
}

fn point(re: &Dyadic, im: &Dyadic) -> ComplexInterval {
    ComplexInterval::point(re.clone(), im.clone())
}

/// One Newton step at `prec` bits; returns the new centre and the step size.
fn newton_step(
    p: &[BigInt],
    dp: &[BigInt],
    re: &Dyadic,
    im: &Dyadic,
    prec: u32,
) -> Option<(Dyadic, Dyadic, Dyadic)> {
    let z = point(re, im);
    let v = poly::eval_complex(p, &z, prec);
    let dv = poly::eval_complex(dp, &z, prec);
    let (vr, vi) = (v.re.mid(), v.im.mid());
    let (dr, di) = (dv.re.mid(), dv.im.mid());
    let den = dr.mul(&dr).add(&di.mul(&di));
    if den.is_zero() {
        return None;
    }
    let sr = vr.mul(&dr).add(&vi.mul(&di)).div(&den, prec, Round::Down);
    let si = vi.mul(&dr).sub(&vr.mul(&di)).div(&den, prec, Round::Down);
    let nr = re.sub(&sr).round(prec, Round::Down);
    let ni = if im.is_zero() { Dyadic::zero() } else { im.sub(&si).round(prec, Round::Down) };
    let size = sr.abs().max(si.abs());
    Some((nr, ni, size))
}

/// Certified inclusion radius `d |p(z_i)| / prod |z_i - z_j|` for every centre.
fn inclusion_radii(p: &[BigInt], centres: &[(Dyadic, Dyadic)], prec: u32) -> Option<Vec<Dyadic>> {
    let d = centres.len();
    let mut radii = Vec::with_capacity(d);
    for (i, (re, im)) in centres.iter().enumerate() {
        let zi = point(re, im);
        let num = poly::eval_complex(p, &zi, prec).abs(prec).hi().clone();
        let mut den = Dyadic::one();
        for (j, (rj, ij)) in centres.iter().enumerate() {
            if j == i {
                continue;
            }
            let diff = zi.sub(&point(rj, ij));
            let lo = diff.abs(prec).lo().clone();
            if !lo.is_positive() {
                return None;
            }
            den = den.mul(&lo).round(prec, Round::Down);
        }
        let r = num.mul(&Dyadic::from_int(d as i64)).div(&den, prec, Round::Up);
        radii.push(r);
    }
    Some(radii)
}

fn separated(discs: &[RootDisc], prec: u32) -> bool {
    let boxes: Vec<ComplexInterval> = discs.iter().map(RootDisc::to_box).collect();
    for i in 0..discs.len() {
        for j in i + 1..discs.len() {
            if boxes[i].intersects(&boxes[j]) {
                return false;
            }
            let gap = point(&discs[i].re, &discs[i].im)
                .sub(&point(&discs[j].re, &discs[j].im))
                .abs(prec);
            if gap.lo() <= &discs[i].radius.add(&discs[j].radius) {
                return false;
            }
        }
    }
    true
}

/// Isolates every root in a disc of radius at most `2^-(target_bits+1)`.
/// Real roots (counted exactly by Sturm) get real centres.
pub fn isolate_roots(p: &MonicIntPolynomial, target_bits: u32, max_doublings: u32) -> Result<Vec<RootDisc>> {
    let coeffs = p.coeffs();
    let d = p.degree();
    if d == 1 {
        return Ok(vec![RootDisc {
            re: Dyadic::from_bigint(-coeffs[0].clone()),
            im: Dyadic::zero(),
            radius: Dyadic::zero(),
        }]);
    }
    let real_count = Sturm::new(coeffs).count_all();
    let fc: Vec<f64> = coeffs.iter().map(|c| c.to_f64().unwrap_or(f64::MAX)).collect();
    let mut seeds = aberth_seeds(&fc);
    seeds.sort_by(|a, b| a.im.abs().total_cmp(&b.im.abs()));
    let mut centres: Vec<(Dyadic, Dyadic)> = seeds
        .iter()
        .enumerate()
        .map(|(k, z)| {
            let im = if k < real_count { Dyadic::zero() } else { Dyadic::from_f64(z.im) };
            (Dyadic::from_f64(z.re), im)
        })
        .collect();
    let dp = p.derivative();
    let target = Dyadic::pow2(-(target_bits as i64) - 1);
    let mut work = BASE_PRECISION.max(target_bits + 32);
    for _ in 0..=max_doublings {
        let max_steps = 2 * (32 - work.leading_zeros()) + 12;
        for c in centres.iter_mut() {
            for _ in 0..max_steps {
                let Some((nr, ni, size)) = newton_step(coeffs, &dp, &c.0, &c.1, work) else { break };
                *c = (nr, ni);
                let scale = c.0.abs().max(c.1.abs()).max(Dyadic::one());
                if size.is_zero() || size.magnitude() - scale.magnitude() < -(work as i64) + 8 {
                    break;
                }
            }
        }
        if let Some(radii) = inclusion_radii(coeffs, &centres, work) {
            let discs: Vec<RootDisc> = centres
                .iter()
                .zip(radii)
                .map(|((re, im), radius)| RootDisc { re: re.clone(), im: im.clone(), radius })
                .collect();
            if discs.iter().all(|disc| disc.radius <= target) && separated(&discs, work) {
                return Ok(order(discs));
            }
        }
        work *= 2;
    }
    Err(Error::RefinementBudgetExceeded(format!("isolating the roots of {p}")))
}

/// Real roots in decreasing order, then complex roots by decreasing real
/// and imaginary part.
fn order(mut discs: Vec<RootDisc>) -> Vec<RootDisc> {
    discs.sort_by(|a, b| {
        b.is_real()
            .cmp(&a.is_real())
            .then_with(|| b.re.cmp(&a.re))
            .then_with(|| b.im.cmp(&a.im))
    });
    discs
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(c: &[i64]) -> MonicIntPolynomial {
        MonicIntPolynomial::from_i64(c).unwrap()
    }

    fn dec(s: &str) -> num_rational::BigRational {
        Dyadic::parse_decimal(s).unwrap()
    }

    #[test]
    fn silver_ratio_roots() {
        let discs = isolate_roots(&poly(&[-1, -2, 1]), 100, DEFAULT_DOUBLINGS).unwrap();
        assert_eq!(discs.len(), 2);
        assert!(discs.iter().all(RootDisc::is_real));
        // 1 + sqrt 2 = 2.41421356237309504880..., 1 - sqrt 2 = -0.41421356...
        let b0 = discs[0].to_box();
        let b1 = discs[1].to_box();
        assert!(b0.re.lo().to_rational() > dec("2.414213562373095048801"));
        assert!(b0.re.hi().to_rational() < dec("2.414213562373095048802"));
        assert!(b1.re.hi() < &Dyadic::zero());
        assert!(b0.re.width_at_most_pow2(100));
    }

    #[test]
    fn complex_roots_of_cyclotomic() {
        // x^4 + x^3 + x^2 + x + 1, all roots on the unit circle
        let discs = isolate_roots(&poly(&[1, 1, 1, 1, 1]), 64, DEFAULT_DOUBLINGS).unwrap();
        assert_eq!(discs.len(), 4);
        for disc in &discs {
            assert!(!disc.is_real());
            let m = disc.to_box().abs(128);
            assert!(m.contains(&Dyadic::one()));
        }
    }

    #[test]
    fn lehmer_has_two_real_roots() {
        let p = poly(&[1, 1, 0, -1, -1, -1, -1, -1, 0, 1, 1]);
        let discs = isolate_roots(&p, 64, DEFAULT_DOUBLINGS).unwrap();
        assert_eq!(discs.iter().filter(|d| d.is_real()).count(), 2);
        // largest root 1.17628081825991750654...
        let b = discs[0].to_box();
        assert!(b.re.lo().to_rational() > dec("1.176280818259917"));
        assert!(b.re.hi().to_rational() < dec("1.176280818259918"));
    }
}
