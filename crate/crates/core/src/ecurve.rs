//! Elliptic curves `Y² = X³ + αX + β` over `F_q` with `char F_q ∉ {2, 3}`.
//!
//! Points render as `(x,y)` using the field's element rendering, and the
//! point at infinity renders as `O`.

use std::collections::HashMap;
use std::fmt;

use rand::Rng;
use serde::Serialize;

use crate::error::{check_bound, invalid, Error, Result};
use crate::ffield::{FieldElement, FieldSpec, FIELD_ENUMERATION_LIMIT};
use crate::shor::{dlog_bruteforce, dlog_quantum, CyclicGroup, DlogInstance, GroupEncoding};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Point {
    Affine(FieldElement, FieldElement),
    Infinity,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Curve {
    field: FieldSpec,
    alpha: FieldElement,
    beta: FieldElement,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EcdlpMode {
    Bruteforce,
    Quantum,
}

impl Curve {
    pub fn new(field: FieldSpec, alpha: FieldElement, beta: FieldElement) -> Result<Self> {
        let p = field.characteristic();
        if p == 2 || p == 3 {
            return invalid(format!("characteristic {p} is not supported by the Weierstrass form"));
        }
        let f = &field;
        let disc = f.add(
            &f.scale(4, &f.pow(&alpha, 3)),
            &f.scale(27, &f.square(&beta)),
        );
        if f.is_zero(&disc) {
            return invalid("singular curve: 4α³ + 27β² = 0");
        }
        Ok(Curve { field, alpha, beta })
    }

    /// Curve over the prime field `F_p` with integer coefficients.
    pub fn over_prime(p: u64, alpha: i64, beta: i64) -> Result<Self> {
        let field = FieldSpec::prime(p)?;
        let (a, b) = (field.from_int(alpha), field.from_int(beta));
        Self::new(field, a, b)
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn alpha(&self) -> &FieldElement {
        &self.alpha
    }

    pub fn beta(&self) -> &FieldElement {
        &self.beta
    }

    fn rhs(&self, x: &FieldElement) -> FieldElement {
        let f = &self.field;
        let x3 = f.pow(x, 3);
        f.add(&f.add(&x3, &f.mul(&self.alpha, x)), &self.beta)
    }

    /// Affine point from prime-field integers.
    pub fn point(&self, x: i64, y: i64) -> Result<Point> {
        let pt = Point::Affine(self.field.from_int(x), self.field.from_int(y));
        if !self.is_on_curve(&pt) {
            return invalid(format!("{} is not on the curve", self.render(&pt)));
        }
        Ok(pt)
    }

    pub fn is_on_curve(&self, pt: &Point) -> bool {
        match pt {
            Point::Infinity => true,
            Point::Affine(x, y) => self.field.square(y) == self.rhs(x),
        }
    }

    pub fn neg(&self, pt: &Point) -> Point {
        match pt {
            Point::Infinity => Point::Infinity,
            Point::Affine(x, y) => Point::Affine(x.clone(), self.field.neg(y)),
        }
    }

    pub fn add(&self, p: &Point, q: &Point) -> Point {
        let f = &self.field;
        let (xp, yp, xq, yq) = match (p, q) {
            (Point::Infinity, _) => return q.clone(),
            (_, Point::Infinity) => return p.clone(),
            (Point::Affine(xp, yp), Point::Affine(xq, yq)) => (xp, yp, xq, yq),
        };
        let lambda = if xp != xq {
            f.div(&f.sub(yq, yp), &f.sub(xq, xp)).expect("distinct x")
        } else if yp == yq && !f.is_zero(yp) {
            let num = f.add(&f.scale(3, &f.square(xp)), &self.alpha);
            f.div(&num, &f.scale(2, yp)).expect("nonzero y")
        } else {
            // Q = -P, including doubling a point with y = 0.
            return Point::Infinity;
        };
        let x = f.sub(&f.sub(&f.square(&lambda), xp), xq);
        let y = f.sub(&f.mul(&lambda, &f.sub(xp, &x)), yp);
        Point::Affine(x, y)
    }

    /// `r·P` by double-and-add.
    pub fn scalar_mul(&self, mut r: u64, pt: &Point) -> Point {
        let mut acc = Point::Infinity;
        let mut base = pt.clone();
        while r > 0 {
            if r & 1 == 1 {
                acc = self.add(&acc, &base);
            }
            base = self.add(&base, &base);
            r >>= 1;
        }
        acc
    }

    /// All points: affine solutions by `(x, y)` index, then `O`.
    pub fn enumerate_points(&self) -> Result<Vec<Point>> {
        let f = &self.field;
        check_bound("field size", f.size() as u128, FIELD_ENUMERATION_LIMIT as u128)?;
        let elems = f.enumerate()?;
        let mut roots: HashMap<FieldElement, Vec<FieldElement>> = HashMap::new();
        for y in &elems {
            roots.entry(f.square(y)).or_default().push(y.clone());
        }
        let mut out = Vec::new();
        for x in &elems {
            if let Some(ys) = roots.get(&self.rhs(x)) {
                for y in ys {
                    out.push(Point::Affine(x.clone(), y.clone()));
                }
            }
        }
        out.push(Point::Infinity);
        Ok(out)
    }

    /// Order of `P`, by repeated addition.
    pub fn point_order(&self, pt: &Point) -> Result<u64> {
        let limit = 2 * FIELD_ENUMERATION_LIMIT;
        let mut x = pt.clone();
        for k in 1..=limit {
            if x == Point::Infinity {
                return Ok(k);
            }
            x = self.add(&x, pt);
        }
        Err(Error::BoundExceeded {
            what: "point order",
            size: limit as u128 + 1,
            limit: limit as u128,
        })
    }

    /// Smallest `r >= 0` with `r·P = Q`.
    pub fn ecdlp<R: Rng + ?Sized>(&self, p: &Point, q: &Point, mode: EcdlpMode, rng: &mut R) -> Result<u64> {
        for pt in [p, q] {
            if !self.is_on_curve(pt) {
                return invalid(format!("{} is not on the curve", self.render(pt)));
            }
        }
        let order = self.point_order(p)?;
        let inst = DlogInstance::with_order(self.clone(), p.clone(), q.clone(), order)?;
        let r = match mode {
            EcdlpMode::Bruteforce => dlog_bruteforce(&inst)?,
            EcdlpMode::Quantum => dlog_quantum(&inst, rng)?.log,
        };
        Ok(r)
    }

    pub fn render(&self, pt: &Point) -> String {
        match pt {
            Point::Infinity => "O".into(),
            Point::Affine(x, y) => format!("({},{})", self.field.render(x), self.field.render(y)),
        }
    }
}

impl fmt::Display for Curve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Y^2 = X^3 + ({})X + ({}) over {}",
            self.field.render(&self.alpha),
            self.field.render(&self.beta),
            self.field
        )
    }
}

impl CyclicGroup for Curve {
    type Elem = Point;

    fn identity(&self) -> Point {
        Point::Infinity
    }

    fn op(&self, a: &Point, b: &Point) -> Point {
        self.add(a, b)
    }

    fn pow(&self, a: &Point, e: u64) -> Point {
        self.scalar_mul(e, a)
    }
}

impl GroupEncoding for Curve {
    type Code = Point;

    fn identity(&self) -> Point {
        Point::Infinity
    }

    fn add(&self, a: &Point, b: &Point) -> Point {
        Curve::add(self, a, b)
    }

    fn neg(&self, a: &Point) -> Point {
        Curve::neg(self, a)
    }
}
