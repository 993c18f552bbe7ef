use crate::nfield::{ElementF, ElementK};

/// Exact field arithmetic needed for the chord-tangent law.
pub trait Scalar: Clone + PartialEq + core::fmt::Debug {
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn inv(&self) -> Option<Self>;
    fn is_zero(&self) -> bool;
    /// Embeds a base-field element next to `self`.
    fn lift(&self, a: &ElementF) -> Self;
}

impl Scalar for ElementF {
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn inv(&self) -> Option<Self> {
        ElementF::inv(self)
    }
    fn is_zero(&self) -> bool {
        ElementF::is_zero(self)
    }
    fn lift(&self, a: &ElementF) -> Self {
        a.clone()
    }
}

impl Scalar for ElementK {
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn inv(&self) -> Option<Self> {
        ElementK::inv(self)
    }
    fn is_zero(&self) -> bool {
        ElementK::is_zero(self)
    }
    fn lift(&self, a: &ElementF) -> Self {
        ElementK::from_base(a, self.delta())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Point<T> {
    Infinity,
    Affine(T, T),
}

impl<T: Scalar> Point<T> {
    pub fn is_infinity(&self) -> bool {
        matches!(self, Point::Infinity)
    }

    pub fn x(&self) -> Option<&T> {
        match self {
            Point::Affine(x, _) => Some(x),
            Point::Infinity => None,
        }
    }

    pub fn y(&self) -> Option<&T> {
        match self {
            Point::Affine(_, y) => Some(y),
            Point::Infinity => None,
        }
    }
}

/// Weierstrass coefficients lifted to the scalar type.
#[derive(Clone, Debug)]
pub struct Model<T> {
    pub a1: T,
    pub a2: T,
    pub a3: T,
    pub a4: T,
    pub a6: T,
}

impl<T: Scalar> Model<T> {
    pub fn from_base(like: &T, a: &[ElementF; 5]) -> Model<T> {
        Model { a1: like.lift(&a[0]), a2: like.lift(&a[1]), a3: like.lift(&a[2]), a4: like.lift(&a[3]), a6: like.lift(&a[4]) }
    }

    pub fn contains(&self, p: &Point<T>) -> bool {
        match p {
            Point::Infinity => true,
            Point::Affine(x, y) => {
                let lhs = y.mul(y).add(&self.a1.mul(x).mul(y)).add(&self.a3.mul(y));
                let x2 = x.mul(x);
                let rhs = x2.mul(x).add(&self.a2.mul(&x2)).add(&self.a4.mul(x)).add(&self.a6);
                lhs == rhs
            }
        }
    }

    pub fn neg(&self, p: &Point<T>) -> Point<T> {
        match p {
            Point::Infinity => Point::Infinity,
            Point::Affine(x, y) => Point::Affine(x.clone(), y.neg().sub(&self.a1.mul(x)).sub(&self.a3)),
        }
    }

    pub fn add(&self, p: &Point<T>, q: &Point<T>) -> Point<T> {
        let (x1, y1, x2, y2) = match (p, q) {
            (Point::Infinity, _) => return q.clone(),
            (_, Point::Infinity) => return p.clone(),
            (Point::Affine(x1, y1), Point::Affine(x2, y2)) => (x1, y1, x2, y2),
        };
        let lambda = if x1 == x2 {
            if self.neg(p) == *q {
                return Point::Infinity;
            }
            let denom = y1.add(y1).add(&self.a1.mul(x1)).add(&self.a3);
            let x1sq = x1.mul(x1);
            let two_a2x = self.a2.mul(x1).add(&self.a2.mul(x1));
            let num = x1sq.add(&x1sq).add(&x1sq).add(&two_a2x).add(&self.a4).sub(&self.a1.mul(y1));
            num.mul(&denom.inv().expect("not 2-torsion"))
        } else {
            y2.sub(y1).mul(&x2.sub(x1).inv().expect("distinct x"))
        };
        let nu = y1.sub(&lambda.mul(x1));
        let x3 = lambda.mul(&lambda).add(&self.a1.mul(&lambda)).sub(&self.a2).sub(x1).sub(x2);
        let y3 = lambda.add(&self.a1).mul(&x3).neg().sub(&nu).sub(&self.a3);
        Point::Affine(x3, y3)
    }

    pub fn sub(&self, p: &Point<T>, q: &Point<T>) -> Point<T> {
        self.add(p, &self.neg(q))
    }

    pub fn mul(&self, p: &Point<T>, n: i64) -> Point<T> {
        let base = if n < 0 { self.neg(p) } else { p.clone() };
        let mut k = n.unsigned_abs();
        let mut acc = Point::Infinity;
        let mut cur = base;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.add(&acc, &cur);
            }
            k >>= 1;
            if k > 0 {
                cur = self.add(&cur, &cur);
            }
        }
        acc
    }

    /// Order of `p` if it is at most `bound`.
    pub fn torsion_order(&self, p: &Point<T>, bound: u32) -> Option<u32> {
        let mut q = p.clone();
        for n in 1..=bound {
            if q.is_infinity() {
                return Some(n);
            }
            q = self.add(&q, p);
        }
        None
    }
}
