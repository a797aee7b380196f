//! The number field `Q(q)` generated by a Pisot or Salem base, with exact
//! element arithmetic in `Z[q]` and certified embeddings.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::complex::ComplexInterval;
use crate::dyadic::Dyadic;
use crate::interval::Interval;
use crate::poly::{self, Bound, Irreducibility, MonicIntPolynomial, Sturm};
use crate::roots::{self, RootDisc};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BaseKind {
    Pisot,
    Salem,
    NeitherPisotNorSalem,
    Undecided,
}

impl fmt::Display for BaseKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            BaseKind::Pisot => "Pisot",
            BaseKind::Salem => "Salem",
            BaseKind::NeitherPisotNorSalem => "NeitherPisotNorSalem",
            BaseKind::Undecided => "Undecided",
        };
        f.write_str(s)
    }
}

/// Kind of base plus the certified gap between conjugate moduli and 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BaseClassification {
    pub kind: BaseKind,
    pub margin: Option<Interval>,
}

#[derive(Clone, Copy, Debug)]
pub struct FieldOptions {
    /// Bits of accuracy of the stored root boxes.
    pub precision: u32,
    pub max_doublings: u32,
    /// Accept a polynomial whose irreducibility the screen cannot certify.
    pub acknowledge_irreducible: bool,
}

impl Default for FieldOptions {
    fn default() -> Self {
        FieldOptions {
            precision: roots::BASE_PRECISION,
            max_doublings: roots::DEFAULT_DOUBLINGS,
            acknowledge_irreducible: false,
        }
    }
}

pub struct AlgebraicField {
    minpoly: MonicIntPolynomial,
    discs: Vec<RootDisc>,
    principal_index: usize,
    classification: BaseClassification,
    irreducibility: String,
    options: FieldOptions,
    refined: Mutex<BTreeMap<u32, Arc<Vec<RootDisc>>>>,
}

impl fmt::Debug for AlgebraicField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AlgebraicField")
            .field("minpoly", &self.minpoly.to_expression())
            .field("principal_index", &self.principal_index)
            .field("kind", &self.classification.kind)
            .finish()
    }
}

impl PartialEq for AlgebraicField {
    fn eq(&self, other: &Self) -> bool {
        self.minpoly == other.minpoly
    }
}

/// Element of `Z[q]` in the power basis `1, q, ..., q^(d-1)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldElement {
    coords: Vec<BigInt>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
}

impl FieldElement {
    pub fn coords(&self) -> &[BigInt] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }

    /// The rational integer this element equals, if it lies in `Z`.
    pub fn as_integer(&self) -> Option<&BigInt> {
        self.coords[1..].iter().all(Zero::is_zero).then(|| &self.coords[0])
    }

    pub fn is_nonnegative_integer(&self) -> bool {
        self.as_integer().is_some_and(|c| !c.is_negative())
    }
}

/// Builds `Q(q)` from the minimal polynomial of `q`.
pub fn build_field(minpoly: MonicIntPolynomial, options: FieldOptions) -> Result<AlgebraicField> {
    let above_one = Sturm::new(minpoly.coeffs()).count(&Bound::At(One::one()), &Bound::PosInf);
    if above_one == 0 {
        return Err(Error::NoRealRootAboveOne);
    }
    let irreducibility = match poly::irreducibility_screen(&minpoly)? {
        Irreducibility::Certified(reason) => reason,
        Irreducibility::Reducible(reason) => return Err(Error::ReducibleRejected(reason)),
        Irreducibility::Unconfirmed if options.acknowledge_irreducible => {
            "acknowledged by the caller".to_string()
        }
        Irreducibility::Unconfirmed => {
            return Err(Error::IrreducibilityUnconfirmed { degree: minpoly.degree() })
        }
    };
    let mut bits = options.precision;
    let mut discs = None;
    for _ in 0..=options.max_doublings {
        let d = roots::isolate_roots(&minpoly, bits, options.max_doublings)?;
        if d[0].is_real() && d[0].to_box().re.lo() > &Dyadic::one() {
            discs = Some(d);
            break;
        }
        bits *= 2;
    }
    let discs = discs
        .ok_or_else(|| Error::RefinementBudgetExceeded("separating the principal root from 1".into()))?;
    let mut field = AlgebraicField {
        minpoly,
        discs,
        principal_index: 0,
        classification: BaseClassification { kind: BaseKind::Undecided, margin: None },
        irreducibility,
        options,
        refined: Mutex::new(BTreeMap::new()),
    };
    field.classification = field.classify()?;
    Ok(field)
}

/// Shorthand for the degree-1 field `Q` with base `t`.
pub fn rational_field(t: i64) -> Result<AlgebraicField> {
    if t < 2 {
        return Err(Error::InvalidInput(format!("rational base must be at least 2, got {t}")));
    }
    build_field(MonicIntPolynomial::from_i64(&[-t, 1])?, FieldOptions::default())
}

pub fn classify_base(field: &AlgebraicField) -> BaseClassification {
    field.classification.clone()
}

impl AlgebraicField {
    pub fn minpoly(&self) -> &MonicIntPolynomial {
        &self.minpoly
    }

    pub fn degree(&self) -> usize {
        self.minpoly.degree()
    }

    pub fn principal_index(&self) -> usize {
        self.principal_index
    }

    pub fn classification(&self) -> &BaseClassification {
        &self.classification
    }

    pub fn irreducibility_note(&self) -> &str {
        &self.irreducibility
    }

    pub fn precision(&self) -> u32 {
        self.options.precision
    }

    /// Root boxes at the build precision, principal root first.
    pub fn root_boxes(&self) -> Vec<ComplexInterval> {
        self.discs.iter().map(RootDisc::to_box).collect()
    }

    /// The base as an integer when the field is `Q`.
    pub fn rational_base(&self) -> Option<BigInt> {
        (self.degree() == 1).then(|| -self.minpoly.coeffs()[0].clone())
    }

    /// Root discs with radius at most `2^-(bits+1)`, in the build order.
    pub fn roots_at(&self, bits: u32) -> Result<Arc<Vec<RootDisc>>> {
        if bits <= self.options.precision {
            return Ok(Arc::new(self.discs.clone()));
        }
        if let Some(r) = self.refined.lock().unwrap().range(bits..).next() {
            return Ok(r.1.clone());
        }
        let fresh = roots::isolate_roots(&self.minpoly, bits, self.options.max_doublings)?;
        // match each refined disc to the stored disc containing the same root
        let mut ordered = Vec::with_capacity(fresh.len());
        for old in &self.discs {
            let (ore, oim) = (old.re.to_f64(), old.im.to_f64());
            let best = fresh
                .iter()
                .min_by(|a, b| {
                    let da = (a.re.to_f64() - ore).hypot(a.im.to_f64() - oim);
                    let db = (b.re.to_f64() - ore).hypot(b.im.to_f64() - oim);
                    da.total_cmp(&db)
                })
                .unwrap();
            ordered.push(best.clone());
        }
        let ordered = Arc::new(ordered);
        self.refined.lock().unwrap().insert(bits, ordered.clone());
        Ok(ordered)
    }

    /// Enclosure of the real number `q`.
    pub fn q_interval(&self, bits: u32) -> Result<Interval> {
        if let Some(t) = self.rational_base() {
            return Ok(Interval::from_bigint(&t));
        }
        Ok(self.roots_at(bits)?[self.principal_index].to_box().re)
    }

    fn classify(&self) -> Result<BaseClassification> {
        let d = self.degree();
        if d == 1 {
            return Ok(BaseClassification { kind: BaseKind::Pisot, margin: Some(Interval::one()) });
        }
        let one = Interval::one();
        if d >= 4 {
            if let Some(t) = self.minpoly.trace_polynomial() {
                let s = Sturm::new(&t);
                let two = Bound::At(BigInt::from(2).into());
                let neg_two = Bound::At(BigInt::from(-2).into());
                let above = s.count(&two, &Bound::PosInf);
                let at_or_below = s.count(&Bound::NegInf, &neg_two);
                let inside = s.count(&neg_two, &two) - usize::from(poly::horner(&t, &BigInt::from(2)).is_zero());
                let m = d / 2;
                if above == 1 && at_or_below == 0 && inside == m - 1 {
                    return Ok(BaseClassification { kind: BaseKind::Salem, margin: Some(Interval::zero()) });
                }
                let max = self.max_conjugate_modulus(self.options.precision)?;
                return Ok(BaseClassification {
                    kind: BaseKind::NeitherPisotNorSalem,
                    margin: Some(max.sub(&one)),
                });
            }
        }
        let mut bits = self.options.precision;
        for _ in 0..=self.options.max_doublings {
            let max = self.max_conjugate_modulus(bits)?;
            if max.certainly_lt(&one) {
                return Ok(BaseClassification { kind: BaseKind::Pisot, margin: Some(one.sub(&max)) });
            }
            if max.certainly_gt(&one) {
                return Ok(BaseClassification {
                    kind: BaseKind::NeitherPisotNorSalem,
                    margin: Some(max.sub(&one)),
                });
            }
            bits *= 2;
        }
        Ok(BaseClassification { kind: BaseKind::Undecided, margin: None })
    }

    /// Largest modulus over the non-principal conjugates of `q`.
    pub fn max_conjugate_modulus(&self, bits: u32) -> Result<Interval> {
        let discs = self.roots_at(bits)?;
        let prec = bits + 16;
        let mut best: Option<Interval> = None;
        for (i, disc) in discs.iter().enumerate() {
            if i == self.principal_index {
                continue;
            }
            let m = disc.to_box().abs(prec);
            best = Some(match best {
                None => m,
                Some(b) => b.max(&m),
            });
        }
        Ok(best.unwrap_or_else(Interval::zero))
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement { coords: vec![BigInt::zero(); self.degree()] }
    }

    pub fn one(&self) -> FieldElement {
        self.from_int(BigInt::one())
    }

    pub fn from_int(&self, v: impl Into<BigInt>) -> FieldElement {
        let mut e = self.zero();
        e.coords[0] = v.into();
        e
    }

    /// The generator `q` itself.
    pub fn generator(&self) -> FieldElement {
        if self.degree() == 1 {
            return self.from_int(self.rational_base().unwrap());
        }
        let mut e = self.zero();
        e.coords[1] = BigInt::one();
        e
    }

    /// Element from power-basis coordinates; shorter vectors are zero padded.
    pub fn element(&self, coords: Vec<BigInt>) -> Result<FieldElement> {
        let d = self.degree();
        if coords.len() > d {
            return Err(Error::InvalidInput(format!(
                "element has {} coordinates, field degree is {d}",
                coords.len()
            )));
        }
        let mut coords = coords;
        coords.resize(d, BigInt::zero());
        Ok(FieldElement { coords })
    }

    pub fn element_i64(&self, coords: &[i64]) -> Result<FieldElement> {
        self.element(coords.iter().map(|&c| BigInt::from(c)).collect())
    }

    fn check(&self, x: &FieldElement) {
        assert_eq!(x.coords.len(), self.degree(), "element does not belong to this field");
    }

    pub fn add(&self, x: &FieldElement, y: &FieldElement) -> FieldElement {
        self.check(x);
        self.check(y);
        FieldElement { coords: x.coords.iter().zip(&y.coords).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, x: &FieldElement, y: &FieldElement) -> FieldElement {
        self.check(x);
        self.check(y);
        FieldElement { coords: x.coords.iter().zip(&y.coords).map(|(a, b)| a - b).collect() }
    }

    pub fn neg(&self, x: &FieldElement) -> FieldElement {
        FieldElement { coords: x.coords.iter().map(|a| -a).collect() }
    }

    pub fn scale(&self, x: &FieldElement, k: &BigInt) -> FieldElement {
        FieldElement { coords: x.coords.iter().map(|a| a * k).collect() }
    }

    pub fn mul(&self, x: &FieldElement, y: &FieldElement) -> FieldElement {
        self.check(x);
        self.check(y);
        let d = self.degree();
        if d == 1 {
            return FieldElement { coords: vec![&x.coords[0] * &y.coords[0]] };
        }
        let mut prod = vec![BigInt::zero(); 2 * d - 1];
        for (i, a) in x.coords.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in y.coords.iter().enumerate() {
                prod[i + j] += a * b;
            }
        }
        let m = self.minpoly.coeffs();
        for k in (d..2 * d - 1).rev() {
            let c = std::mem::take(&mut prod[k]);
            if c.is_zero() {
                continue;
            }
            for i in 0..d {
                prod[k - d + i] -= &c * &m[i];
            }
        }
        prod.truncate(d);
        FieldElement { coords: prod }
    }

    pub fn pow(&self, x: &FieldElement, mut n: u64) -> FieldElement {
        let mut result = self.one();
        let mut base = x.clone();
        while n > 0 {
            if n & 1 == 1 {
                result = self.mul(&result, &base);
            }
            n >>= 1;
            if n > 0 {
                base = self.mul(&base, &base);
            }
        }
        result
    }

    /// Image of `x` under the embedding sending `q` to root `index`,
    /// with box width at most `2^-bits`.
    pub fn embed(&self, x: &FieldElement, index: usize, bits: u32) -> Result<ComplexInterval> {
        self.check(x);
        if index >= self.degree() {
            return Err(Error::InvalidInput(format!(
                "conjugate index {index} out of range for degree {}",
                self.degree()
            )));
        }
        if let Some(c) = x.as_integer() {
            return Ok(ComplexInterval::real(Interval::from_bigint(c)));
        }
        let target = Dyadic::pow2(-(bits as i64));
        let coef_bits: u64 = x.coords.iter().map(|c| c.bits()).max().unwrap_or(0);
        let mut root_bits = bits + 16 + coef_bits as u32 + 4 * self.degree() as u32;
        for _ in 0..=self.options.max_doublings {
            let disc = &self.roots_at(root_bits)?[index];
            let z = disc.to_box();
            let v = poly::eval_complex(&x.coords, &z, root_bits + 32);
            if v.width() <= target {
                return Ok(v);
            }
            root_bits *= 2;
        }
        Err(Error::RefinementBudgetExceeded(format!("embedding an element at {bits} bits")))
    }

    /// Maximum modulus over all conjugates of `x`.
    pub fn house(&self, x: &FieldElement, bits: u32) -> Result<Interval> {
        self.check(x);
        if let Some(c) = x.as_integer() {
            return Ok(Interval::from_bigint(&c.abs()));
        }
        let target = Dyadic::pow2(-(bits as i64));
        let mut work = bits + 8;
        for _ in 0..=self.options.max_doublings {
            let mut best: Option<Interval> = None;
            for i in 0..self.degree() {
                let m = self.embed(x, i, work)?.abs(work + 16);
                best = Some(match best {
                    None => m,
                    Some(b) => b.max(&m),
                });
            }
            let h = best.unwrap();
            if h.width() <= target {
                return Ok(h);
            }
            work *= 2;
        }
        Err(Error::RefinementBudgetExceeded(format!("computing a house at {bits} bits")))
    }

    /// Value of `x` under the embedding sending `q` to the real base.
    pub fn principal_value(&self, x: &FieldElement, bits: u32) -> Result<Interval> {
        if let Some(c) = x.as_integer() {
            return Ok(Interval::from_bigint(c));
        }
        Ok(self.embed(x, self.principal_index, bits)?.re)
    }

    /// Exact norm `N_{K/Q}(x)` as the resultant of the minimal polynomial and
    /// the coordinate polynomial.
    pub fn norm(&self, x: &FieldElement) -> BigInt {
        self.check(x);
        if let Some(c) = x.as_integer() {
            return num_traits::pow(c.clone(), self.degree());
        }
        poly::resultant(self.minpoly.coeffs(), &x.coords)
    }
}

pub fn element_arith(field: &AlgebraicField, op: ArithOp, x: &FieldElement, y: &FieldElement) -> FieldElement {
    match op {
        ArithOp::Add => field.add(x, y),
        ArithOp::Sub => field.sub(x, y),
        ArithOp::Mul => field.mul(x, y),
    }
}

pub fn house(field: &AlgebraicField, x: &FieldElement, bits: u32) -> Result<Interval> {
    field.house(x, bits)
}

pub fn field_norm(field: &AlgebraicField, x: &FieldElement) -> BigInt {
    field.norm(x)
}

pub fn embed(field: &AlgebraicField, x: &FieldElement, index: usize, bits: u32) -> Result<ComplexInterval> {
    field.embed(x, index, bits)
}
