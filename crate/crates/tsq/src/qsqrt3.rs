//! Exact arithmetic in the quadratic field Q[sqrt(3)].
//!
//! Every vertex coordinate produced by the flat generators lives in
//! Q[sqrt(3)] x Q[sqrt(3)], so all geometric predicates (edge lengths,
//! sector membership, rotations) are decided exactly, with no floating
//! point anywhere.

use num_rational::Rational64;
use num_traits::{Signed, Zero};
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// An element `p + q*sqrt(3)` with rational `p`, `q`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct QSqrt3 {
    pub p: Rational64,
    pub q: Rational64,
}

impl QSqrt3 {
    pub const fn new(p: Rational64, q: Rational64) -> Self {
        QSqrt3 { p, q }
    }

    pub fn from_int(n: i64) -> Self {
        QSqrt3::new(Rational64::from_integer(n), Rational64::zero())
    }

    /// `a/b`, the rational part only.
    pub fn ratio(a: i64, b: i64) -> Self {
        QSqrt3::new(Rational64::new(a, b), Rational64::zero())
    }

    /// `(a/b)*sqrt(3)`.
    pub fn sqrt3_ratio(a: i64, b: i64) -> Self {
        QSqrt3::new(Rational64::zero(), Rational64::new(a, b))
    }

    pub fn zero() -> Self {
        QSqrt3::from_int(0)
    }

    pub fn one() -> Self {
        QSqrt3::from_int(1)
    }

    pub fn is_zero(&self) -> bool {
        self.p.is_zero() && self.q.is_zero()
    }

    /// Sign of `p + q*sqrt(3)`: -1, 0 or 1, decided exactly.
    ///
    /// When `p` and `q` disagree in sign the comparison reduces to
    /// `p^2` versus `3 q^2`, which is rational.
    pub fn signum(&self) -> i32 {
        let sp = sign_of(self.p);
        let sq = sign_of(self.q);
        match (sp, sq) {
            (0, 0) => 0,
            (s, 0) => s,
            (0, s) => s,
            (1, 1) => 1,
            (-1, -1) => -1,
            (1, -1) => {
                // p > 0 > q*sqrt(3): positive iff p^2 > 3 q^2.
                cmp_sq(self.p, self.q)
            }
            (-1, 1) => -cmp_sq(self.p, self.q),
            _ => unreachable!(),
        }
    }

    pub fn scale(&self, r: Rational64) -> Self {
        QSqrt3::new(self.p * r, self.q * r)
    }

    pub fn half(&self) -> Self {
        self.scale(Rational64::new(1, 2))
    }

    /// Multiplicative inverse; panics on zero.
    pub fn inv(&self) -> Self {
        // 1/(p + q s3) = (p - q s3) / (p^2 - 3 q^2)
        let d = self.p * self.p - Rational64::from_integer(3) * self.q * self.q;
        assert!(!d.is_zero(), "inverse of zero in Q[sqrt(3)]");
        QSqrt3::new(self.p / d, -self.q / d)
    }

    /// Returns `Some(n)` when the value is the integer `n`.
    pub fn as_integer(&self) -> Option<i64> {
        if self.q.is_zero() && self.p.is_integer() {
            Some(self.p.to_integer())
        } else {
            None
        }
    }

    /// Raw parts `((p_num, p_den), (q_num, q_den))`, both reduced.
    pub fn parts(&self) -> ((i64, i64), (i64, i64)) {
        ((*self.p.numer(), *self.p.denom()), (*self.q.numer(), *self.q.denom()))
    }
}

fn sign_of(r: Rational64) -> i32 {
    if r.is_zero() {
        0
    } else if r.is_positive() {
        1
    } else {
        -1
    }
}

/// Sign of `p^2 - 3 q^2` as an i32.
fn cmp_sq(p: Rational64, q: Rational64) -> i32 {
    let lhs = p * p;
    let rhs = Rational64::from_integer(3) * q * q;
    match lhs.cmp(&rhs) {
        Ordering::Less => -1,
        Ordering::Equal => 0,
        Ordering::Greater => 1,
    }
}

impl Add for QSqrt3 {
    type Output = QSqrt3;
    fn add(self, rhs: QSqrt3) -> QSqrt3 {
        QSqrt3::new(self.p + rhs.p, self.q + rhs.q)
    }
}

impl Sub for QSqrt3 {
    type Output = QSqrt3;
    fn sub(self, rhs: QSqrt3) -> QSqrt3 {
        QSqrt3::new(self.p - rhs.p, self.q - rhs.q)
    }
}

impl Neg for QSqrt3 {
    type Output = QSqrt3;
    fn neg(self) -> QSqrt3 {
        QSqrt3::new(-self.p, -self.q)
    }
}

impl Mul for QSqrt3 {
    type Output = QSqrt3;
    fn mul(self, rhs: QSqrt3) -> QSqrt3 {
        // (a + b s)(c + d s) = ac + 3bd + (ad + bc) s
        QSqrt3::new(
            self.p * rhs.p + Rational64::from_integer(3) * self.q * rhs.q,
            self.p * rhs.q + self.q * rhs.p,
        )
    }
}

impl PartialOrd for QSqrt3 {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for QSqrt3 {
    fn cmp(&self, other: &Self) -> Ordering {
        match (*self - *other).signum() {
            -1 => Ordering::Less,
            0 => Ordering::Equal,
            _ => Ordering::Greater,
        }
    }
}

impl fmt::Display for QSqrt3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.q.is_zero() {
            write!(f, "{}", self.p)
        } else if self.p.is_zero() {
            write!(f, "{}r3", self.q)
        } else {
            write!(f, "{}+{}r3", self.p, self.q)
        }
    }
}

impl fmt::Debug for QSqrt3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A point of the plane with coordinates in Q[sqrt(3)].
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Pt {
    pub x: QSqrt3,
    pub y: QSqrt3,
}

impl Pt {
    pub const fn new(x: QSqrt3, y: QSqrt3) -> Self {
        Pt { x, y }
    }

    pub fn origin() -> Self {
        Pt::new(QSqrt3::zero(), QSqrt3::zero())
    }

    pub fn norm2(&self) -> QSqrt3 {
        self.x * self.x + self.y * self.y
    }

    pub fn cross(&self, other: &Pt) -> QSqrt3 {
        self.x * other.y - self.y * other.x
    }

    pub fn scale(&self, r: Rational64) -> Pt {
        Pt::new(self.x.scale(r), self.y.scale(r))
    }

    pub fn midpoint(&self, other: &Pt) -> Pt {
        (*self + *other).scale(Rational64::new(1, 2))
    }

    /// Counterclockwise rotation by `k * 60` degrees about the origin.
    pub fn rot60(&self, k: i32) -> Pt {
        let k = k.rem_euclid(6);
        // cos(60k), sin(60k) for k = 0..5, in halves and sqrt(3)-halves.
        let (c, s) = match k {
            0 => (QSqrt3::from_int(1), QSqrt3::zero()),
            1 => (QSqrt3::ratio(1, 2), QSqrt3::sqrt3_ratio(1, 2)),
            2 => (QSqrt3::ratio(-1, 2), QSqrt3::sqrt3_ratio(1, 2)),
            3 => (QSqrt3::from_int(-1), QSqrt3::zero()),
            4 => (QSqrt3::ratio(-1, 2), QSqrt3::sqrt3_ratio(-1, 2)),
            5 => (QSqrt3::ratio(1, 2), QSqrt3::sqrt3_ratio(-1, 2)),
            _ => unreachable!(),
        };
        Pt::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }

    /// Unit vector at angle `60j` degrees (the hexagon corner directions).
    pub fn hex_corner_dir(j: i32) -> Pt {
        Pt::new(QSqrt3::one(), QSqrt3::zero()).rot60(j)
    }

    /// Unit vector at angle `60j - 30` degrees (the cut-ray directions).
    pub fn ray_dir(j: i32) -> Pt {
        Pt::new(QSqrt3::sqrt3_ratio(1, 2), QSqrt3::ratio(-1, 2)).rot60(j)
    }
}

impl Add for Pt {
    type Output = Pt;
    fn add(self, rhs: Pt) -> Pt {
        Pt::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Pt {
    type Output = Pt;
    fn sub(self, rhs: Pt) -> Pt {
        Pt::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Neg for Pt {
    type Output = Pt;
    fn neg(self) -> Pt {
        Pt::new(-self.x, -self.y)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(a: i64, b: i64) -> Rational64 {
        Rational64::new(a, b)
    }

    #[test]
    fn sign_mixed_terms() {
        // 2 - sqrt(3) > 0, 1 - sqrt(3) < 0, sqrt(3) - 3/2 > 0
        assert_eq!(QSqrt3::new(r(2, 1), r(-1, 1)).signum(), 1);
        assert_eq!(QSqrt3::new(r(1, 1), r(-1, 1)).signum(), -1);
        assert_eq!(QSqrt3::new(r(-3, 2), r(1, 1)).signum(), 1);
        assert_eq!(QSqrt3::zero().signum(), 0);
    }

    #[test]
    fn mul_and_inv() {
        let x = QSqrt3::new(r(2, 3), r(-1, 2));
        let y = x * x.inv();
        assert_eq!(y, QSqrt3::one());
        // (1 + s3)^2 = 4 + 2 s3
        let z = QSqrt3::new(r(1, 1), r(1, 1));
        assert_eq!(z * z, QSqrt3::new(r(4, 1), r(2, 1)));
    }

    #[test]
    fn rotation_has_order_six_and_preserves_norm() {
        let p = Pt::new(QSqrt3::new(r(3, 2), r(1, 3)), QSqrt3::new(r(-1, 1), r(2, 5)));
        let mut q = p;
        for _ in 0..6 {
            q = q.rot60(1);
            assert_eq!(q.norm2(), p.norm2());
        }
        assert_eq!(q, p);
        assert_eq!(p.rot60(2), p.rot60(1).rot60(1));
    }

    #[test]
    fn frame_directions_are_unit() {
        for j in 0..6 {
            assert_eq!(Pt::hex_corner_dir(j).norm2(), QSqrt3::one());
            assert_eq!(Pt::ray_dir(j).norm2(), QSqrt3::one());
        }
        // Ray j bisects the corner directions j-1 and j.
        for j in 0..6 {
            let sum = Pt::hex_corner_dir(j - 1) + Pt::hex_corner_dir(j);
            // sum is sqrt(3) times the ray direction.
            let scaled = Pt::new(
                QSqrt3::sqrt3_ratio(1, 1) * Pt::ray_dir(j).x,
                QSqrt3::sqrt3_ratio(1, 1) * Pt::ray_dir(j).y,
            );
            assert_eq!(sum, scaled);
        }
    }
}
