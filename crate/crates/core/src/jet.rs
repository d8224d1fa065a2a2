//! Truncated bivariate Taylor arithmetic.
//!
//! A [`Jet2`] of order `N` stores the normalized Taylor coefficients
//! `c[i][j] = (∂^{i+j} g / ∂u^i ∂v^j) / (i! j!)` of a scalar function at a
//! base point, for `i + j <= N`. Products are truncated Cauchy convolutions,
//! so every partial derivative of a composed expression up to order `N` is
//! exact up to floating point.
//!
//! The checked `try_*` methods reject operands of different order. The
//! operator impls instead truncate to the smaller order, which is what the
//! derived-quantity pipelines want: differentiating a jet loses one order and
//! the result is still a valid (shorter) expansion.

use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// Default truncation order.
pub const DEFAULT_ORDER: usize = 5;

#[inline]
fn tri(d: usize) -> usize {
    d * (d + 1) / 2
}

#[inline]
fn idx(i: usize, j: usize) -> usize {
    tri(i + j) + j
}

/// Number of coefficients of a jet of order `n`.
pub fn coeff_count(order: usize) -> usize {
    (order + 1) * (order + 2) / 2
}

/// Truncated Taylor expansion of a scalar function of `(u, v)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Jet2 {
    order: usize,
    coeffs: Vec<f64>,
}

impl Jet2 {
    pub fn zero(order: usize) -> Self {
        Self {
            order,
            coeffs: vec![0.0; coeff_count(order)],
        }
    }

    pub fn constant(value: f64, order: usize) -> Self {
        let mut j = Self::zero(order);
        j.coeffs[0] = value;
        j
    }

    /// `u0 + Δu`.
    pub fn var_u(u0: f64, order: usize) -> Self {
        let mut j = Self::constant(u0, order);
        if order >= 1 {
            j.coeffs[idx(1, 0)] = 1.0;
        }
        j
    }

    /// `v0 + Δv`.
    pub fn var_v(v0: f64, order: usize) -> Self {
        let mut j = Self::constant(v0, order);
        if order >= 1 {
            j.coeffs[idx(0, 1)] = 1.0;
        }
        j
    }

    /// Builds a jet from a coefficient function `(i, j) -> c_ij`.
    pub fn from_fn(order: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut j = Self::zero(order);
        for d in 0..=order {
            for b in 0..=d {
                j.coeffs[idx(d - b, b)] = f(d - b, b);
            }
        }
        j
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Normalized Taylor coefficient `c_ij`; zero above the truncation order.
    pub fn coeff(&self, i: usize, j: usize) -> f64 {
        if i + j > self.order {
            0.0
        } else {
            self.coeffs[idx(i, j)]
        }
    }

    pub fn set_coeff(&mut self, i: usize, j: usize, value: f64) {
        assert!(i + j <= self.order, "coefficient ({i},{j}) above order {}", self.order);
        self.coeffs[idx(i, j)] = value;
    }

    /// Value at the base point.
    pub fn value(&self) -> f64 {
        self.coeffs[0]
    }

    /// Mixed partial `∂^{i+j}/∂u^i∂v^j` at the base point.
    pub fn partial(&self, i: usize, j: usize) -> Result<f64> {
        if i + j > self.order {
            return Err(Error::OutOfOrder {
                i,
                j,
                order: self.order,
            });
        }
        Ok(factorial(i) * factorial(j) * self.coeffs[idx(i, j)])
    }

    /// Gradient `(∂_u, ∂_v)` at the base point (zero for order 0).
    pub fn gradient(&self) -> [f64; 2] {
        [self.coeff(1, 0), self.coeff(0, 1)]
    }

    /// Hessian at the base point.
    pub fn hessian(&self) -> [[f64; 2]; 2] {
        let uv = self.coeff(1, 1);
        [
            [2.0 * self.coeff(2, 0), uv],
            [uv, 2.0 * self.coeff(0, 2)],
        ]
    }

    pub fn truncate(&self, order: usize) -> Self {
        if order >= self.order {
            return self.clone();
        }
        Self {
            order,
            coeffs: self.coeffs[..coeff_count(order)].to_vec(),
        }
    }

    /// Jet of `∂g/∂u`, one order lower.
    pub fn d_du(&self) -> Self {
        let n = self.order.saturating_sub(1);
        Self::from_fn(n, |i, j| (i + 1) as f64 * self.coeff(i + 1, j))
    }

    /// Jet of `∂g/∂v`, one order lower.
    pub fn d_dv(&self) -> Self {
        let n = self.order.saturating_sub(1);
        Self::from_fn(n, |i, j| (j + 1) as f64 * self.coeff(i, j + 1))
    }

    /// Directional derivative `a ∂_u g + b ∂_v g` with field components given as jets.
    pub fn directional(&self, a: &Jet2, b: &Jet2) -> Self {
        a * &self.d_du() + b * &self.d_dv()
    }

    /// Evaluates the truncated polynomial at an offset `(du, dv)` from the base point.
    pub fn eval_offset(&self, du: f64, dv: f64) -> f64 {
        let mut acc = 0.0;
        for d in (0..=self.order).rev() {
            for b in 0..=d {
                let a = d - b;
                acc += self.coeffs[idx(a, b)] * du.powi(a as i32) * dv.powi(b as i32);
            }
        }
        acc
    }

    /// Treats `self` as a polynomial in `(Δu, Δv)` and substitutes the jets
    /// `a`, `b` for `Δu`, `Δv`. When `a` and `b` have zero constant term this
    /// is Taylor composition; otherwise it is exact polynomial re-expansion.
    pub fn substitute(&self, a: &Jet2, b: &Jet2) -> Jet2 {
        let n = a.order.min(b.order);
        let mut acc = Jet2::zero(n);
        for i in (0..=self.order).rev() {
            let mut inner = Jet2::constant(self.coeff(i, self.order - i), n);
            for j in (0..self.order - i).rev() {
                inner = &inner * b;
                inner.coeffs[0] += self.coeff(i, j);
            }
            acc = &(&acc * a) + &inner;
        }
        acc
    }

    fn check_order(&self, other: &Jet2) -> Result<()> {
        if self.order != other.order {
            return Err(Error::InvalidArgument(format!(
                "jet order mismatch: {} vs {}",
                self.order, other.order
            )));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Jet2) -> Result<Jet2> {
        self.check_order(other)?;
        Ok(self + other)
    }

    /// Truncated Cauchy product.
    pub fn try_mul(&self, other: &Jet2) -> Result<Jet2> {
        self.check_order(other)?;
        Ok(self * other)
    }

    /// Truncated power-series quotient; `b` must have a nonzero constant term.
    pub fn try_div(&self, other: &Jet2) -> Result<Jet2> {
        self.check_order(other)?;
        if other.value() == 0.0 {
            return Err(Error::SingularDivision);
        }
        Ok(self.div_series(other))
    }

    /// Reciprocal `1/g`.
    pub fn recip(&self) -> Result<Jet2> {
        if self.value() == 0.0 {
            return Err(Error::SingularDivision);
        }
        Ok(Jet2::constant(1.0, self.order).div_series(self))
    }

    /// Exact division by the monomial `Δv`.
    ///
    /// Requires every pure-`Δu` coefficient `c_{i0}` to vanish within `tol`
    /// (relative to the largest coefficient). The result has order `N - 1`.
    pub fn div_exact_dv(&self, tol: f64) -> Result<Jet2> {
        let scale = self.coeffs.iter().fold(1.0_f64, |m, c| m.max(c.abs()));
        for i in 0..=self.order {
            let c = self.coeff(i, 0);
            if c.abs() > tol * scale {
                return Err(Error::NotExactlyDivisible { index: i, value: c });
            }
        }
        let n = self.order.saturating_sub(1);
        Ok(Jet2::from_fn(n, |i, j| self.coeff(i, j + 1)))
    }

    fn div_series(&self, b: &Jet2) -> Jet2 {
        // c = a / b  <=>  c_k = (a_k - sum_{m<k} b_{k-m} c_m) / b_0, in graded order.
        let n = self.order.min(b.order);
        let inv = 1.0 / b.value();
        let mut c = Jet2::zero(n);
        for d in 0..=n {
            for q in 0..=d {
                let p = d - q;
                let mut s = self.coeff(p, q);
                for i in 0..=p {
                    for j in 0..=q {
                        if i == 0 && j == 0 {
                            continue;
                        }
                        s -= b.coeff(i, j) * c.coeffs[idx(p - i, q - j)];
                    }
                }
                c.coeffs[idx(p, q)] = s * inv;
            }
        }
        c
    }

    /// `Σ d_k (g - g0)^k` with `d_k` the Taylor coefficients of a univariate
    /// function at `g0`.
    fn compose_series(&self, taylor: &[f64]) -> Jet2 {
        let mut x = self.clone();
        x.coeffs[0] = 0.0;
        let mut acc = Jet2::constant(taylor[self.order], self.order);
        for k in (0..self.order).rev() {
            acc = &acc * &x;
            acc.coeffs[0] += taylor[k];
        }
        acc
    }

    pub fn sin(&self) -> Jet2 {
        let (s, c) = self.value().sin_cos();
        let t = trig_series(s, c, self.order);
        self.compose_series(&t)
    }

    pub fn cos(&self) -> Jet2 {
        let (s, c) = self.value().sin_cos();
        // cos(a + x) = cos a cos x - sin a sin x
        let t = trig_series(c, -s, self.order);
        self.compose_series(&t)
    }

    pub fn exp(&self) -> Jet2 {
        let e = self.value().exp();
        let t: Vec<f64> = (0..=self.order).map(|k| e / factorial(k)).collect();
        self.compose_series(&t)
    }

    pub fn ln(&self) -> Result<Jet2> {
        let a = self.value();
        if a <= 0.0 || !a.is_finite() {
            return Err(Error::Domain {
                primitive: "log",
                value: a,
            });
        }
        let mut t = vec![a.ln()];
        for k in 1..=self.order {
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            t.push(sign / (k as f64 * a.powi(k as i32)));
        }
        Ok(self.compose_series(&t))
    }

    pub fn sqrt(&self) -> Result<Jet2> {
        let a = self.value();
        if a <= 0.0 || !a.is_finite() {
            return Err(Error::Domain {
                primitive: "sqrt",
                value: a,
            });
        }
        Ok(self.compose_series(&binomial_series(a, 0.5, self.order)))
    }

    /// Real power with positive constant term.
    pub fn powf(&self, r: f64) -> Result<Jet2> {
        let a = self.value();
        if a <= 0.0 || !a.is_finite() {
            return Err(Error::Domain {
                primitive: "pow",
                value: a,
            });
        }
        Ok(self.compose_series(&binomial_series(a, r, self.order)))
    }

    /// Integer power. Negative exponents need a nonzero constant term.
    pub fn powi(&self, n: i32) -> Result<Jet2> {
        if n < 0 {
            return self.recip()?.powi(-n);
        }
        let mut result = Jet2::constant(1.0, self.order);
        let mut base = self.clone();
        let mut e = n as u32;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        Ok(result)
    }

    pub fn scale(&self, s: f64) -> Jet2 {
        Jet2 {
            order: self.order,
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    pub fn max_abs_diff(&self, other: &Jet2) -> f64 {
        let n = self.order.max(other.order);
        let mut m = 0.0_f64;
        for d in 0..=n {
            for b in 0..=d {
                m = m.max((self.coeff(d - b, b) - other.coeff(d - b, b)).abs());
            }
        }
        m
    }
}

fn trig_series(f0: f64, f1: f64, order: usize) -> Vec<f64> {
    // derivatives cycle f0, f1, -f0, -f1
    (0..=order)
        .map(|k| {
            let d = match k % 4 {
                0 => f0,
                1 => f1,
                2 => -f0,
                _ => -f1,
            };
            d / factorial(k)
        })
        .collect()
}

fn binomial_series(a: f64, r: f64, order: usize) -> Vec<f64> {
    // (a + x)^r = a^r Σ C(r,k) (x/a)^k
    let mut out = Vec::with_capacity(order + 1);
    let mut binom = 1.0;
    let ar = a.powf(r);
    for k in 0..=order {
        if k > 0 {
            binom *= (r - (k as f64 - 1.0)) / k as f64;
        }
        out.push(ar * binom / a.powi(k as i32));
    }
    out
}

pub(crate) fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

impl Add for &Jet2 {
    type Output = Jet2;
    fn add(self, rhs: &Jet2) -> Jet2 {
        let n = self.order.min(rhs.order);
        let m = coeff_count(n);
        Jet2 {
            order: n,
            coeffs: (0..m).map(|k| self.coeffs[k] + rhs.coeffs[k]).collect(),
        }
    }
}

impl Sub for &Jet2 {
    type Output = Jet2;
    fn sub(self, rhs: &Jet2) -> Jet2 {
        let n = self.order.min(rhs.order);
        let m = coeff_count(n);
        Jet2 {
            order: n,
            coeffs: (0..m).map(|k| self.coeffs[k] - rhs.coeffs[k]).collect(),
        }
    }
}

impl Mul for &Jet2 {
    type Output = Jet2;
    fn mul(self, rhs: &Jet2) -> Jet2 {
        let n = self.order.min(rhs.order);
        let mut out = Jet2::zero(n);
        for d1 in 0..=n {
            for b1 in 0..=d1 {
                let x = self.coeffs[idx(d1 - b1, b1)];
                if x == 0.0 {
                    continue;
                }
                for d2 in 0..=(n - d1) {
                    for b2 in 0..=d2 {
                        let y = rhs.coeffs[idx(d2 - b2, b2)];
                        out.coeffs[idx(d1 - b1 + d2 - b2, b1 + b2)] += x * y;
                    }
                }
            }
        }
        out
    }
}

impl Div for &Jet2 {
    type Output = Jet2;
    /// Panics-free series division; a zero constant term in the divisor
    /// yields non-finite coefficients. Use [`Jet2::try_div`] for a checked quotient.
    fn div(self, rhs: &Jet2) -> Jet2 {
        self.div_series(rhs)
    }
}

impl Neg for &Jet2 {
    type Output = Jet2;
    fn neg(self) -> Jet2 {
        self.scale(-1.0)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<Jet2> for Jet2 {
            type Output = Jet2;
            fn $m(self, rhs: Jet2) -> Jet2 {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&Jet2> for Jet2 {
            type Output = Jet2;
            fn $m(self, rhs: &Jet2) -> Jet2 {
                (&self).$m(rhs)
            }
        }
        impl $tr<Jet2> for &Jet2 {
            type Output = Jet2;
            fn $m(self, rhs: Jet2) -> Jet2 {
                self.$m(&rhs)
            }
        }
        impl $tr<f64> for &Jet2 {
            type Output = Jet2;
            fn $m(self, rhs: f64) -> Jet2 {
                self.$m(&Jet2::constant(rhs, self.order))
            }
        }
        impl $tr<f64> for Jet2 {
            type Output = Jet2;
            fn $m(self, rhs: f64) -> Jet2 {
                (&self).$m(&Jet2::constant(rhs, self.order))
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl Neg for Jet2 {
    type Output = Jet2;
    fn neg(self) -> Jet2 {
        self.scale(-1.0)
    }
}

/// Triple of jets with a shared base point, e.g. a map `U -> R^3`.
#[derive(Clone, Debug, PartialEq)]
pub struct Vec3Jet {
    pub x: Jet2,
    pub y: Jet2,
    pub z: Jet2,
}

impl Vec3Jet {
    pub fn new(x: Jet2, y: Jet2, z: Jet2) -> Self {
        Self { x, y, z }
    }

    pub fn constant(v: [f64; 3], order: usize) -> Self {
        Self::new(
            Jet2::constant(v[0], order),
            Jet2::constant(v[1], order),
            Jet2::constant(v[2], order),
        )
    }

    pub fn order(&self) -> usize {
        self.x.order().min(self.y.order()).min(self.z.order())
    }

    pub fn value(&self) -> [f64; 3] {
        [self.x.value(), self.y.value(), self.z.value()]
    }

    pub fn map(&self, f: impl Fn(&Jet2) -> Jet2) -> Self {
        Self::new(f(&self.x), f(&self.y), f(&self.z))
    }

    pub fn try_map(&self, f: impl Fn(&Jet2) -> Result<Jet2>) -> Result<Self> {
        Ok(Self::new(f(&self.x)?, f(&self.y)?, f(&self.z)?))
    }

    pub fn d_du(&self) -> Self {
        self.map(Jet2::d_du)
    }

    pub fn d_dv(&self) -> Self {
        self.map(Jet2::d_dv)
    }

    pub fn truncate(&self, order: usize) -> Self {
        self.map(|j| j.truncate(order))
    }

    /// Partial derivative of each component.
    pub fn partial(&self, i: usize, j: usize) -> Result<[f64; 3]> {
        Ok([
            self.x.partial(i, j)?,
            self.y.partial(i, j)?,
            self.z.partial(i, j)?,
        ])
    }

    pub fn substitute(&self, a: &Jet2, b: &Jet2) -> Self {
        self.map(|c| c.substitute(a, b))
    }

    pub fn add(&self, o: &Vec3Jet) -> Self {
        Self::new(&self.x + &o.x, &self.y + &o.y, &self.z + &o.z)
    }

    pub fn sub(&self, o: &Vec3Jet) -> Self {
        Self::new(&self.x - &o.x, &self.y - &o.y, &self.z - &o.z)
    }

    pub fn scale(&self, s: &Jet2) -> Self {
        Self::new(&self.x * s, &self.y * s, &self.z * s)
    }

    pub fn scale_f(&self, s: f64) -> Self {
        self.map(|j| j.scale(s))
    }

    pub fn dot(&self, o: &Vec3Jet) -> Jet2 {
        &(&self.x * &o.x + &self.y * &o.y) + &(&self.z * &o.z)
    }

    pub fn cross(&self, o: &Vec3Jet) -> Self {
        Self::new(
            &self.y * &o.z - &self.z * &o.y,
            &self.z * &o.x - &self.x * &o.z,
            &self.x * &o.y - &self.y * &o.x,
        )
    }

    pub fn norm(&self) -> Result<Jet2> {
        self.dot(self).sqrt()
    }

    pub fn normalize(&self) -> Result<Self> {
        let n = self.norm()?;
        let inv = n.recip()?;
        Ok(self.scale(&inv))
    }

    /// Exact componentwise division by `Δv`.
    pub fn div_exact_dv(&self, tol: f64) -> Result<Self> {
        self.try_map(|j| j.div_exact_dv(tol))
    }
}

/// `det(a, b, c) = ⟨a, b × c⟩` over jets.
pub fn det3(a: &Vec3Jet, b: &Vec3Jet, c: &Vec3Jet) -> Jet2 {
    a.dot(&b.cross(c))
}
