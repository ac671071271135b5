//! Coefficient rings for matrix entries: exact rationals, and polynomials in
//! two commuting variables `t` and `s` with rational coefficients.

use std::collections::BTreeMap;
use std::fmt;

use crate::rational::Rational;

/// A commutative unital ring containing the rationals.
pub trait Ring: Clone + PartialEq + fmt::Debug + Send + Sync + 'static {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    fn neg(&self) -> Self;
    fn from_rational(value: &Rational) -> Self;

    fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    fn scale(&self, by: &Rational) -> Self {
        self.mul(&Self::from_rational(by))
    }
}

impl Ring for Rational {
    fn zero() -> Self {
        Rational::zero()
    }
    fn one() -> Self {
        Rational::one()
    }
    fn is_zero(&self) -> bool {
        Rational::is_zero(self)
    }
    #[inline]
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    #[inline]
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn neg(&self) -> Self {
        -self
    }
    fn from_rational(value: &Rational) -> Self {
        value.clone()
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn scale(&self, by: &Rational) -> Self {
        self * by
    }
}

/// The two polynomial variables.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Var {
    T,
    S,
}

impl Var {
    fn slot(self) -> usize {
        match self {
            Var::T => 0,
            Var::S => 1,
        }
    }
}

/// Exponents of `(t, s)`.
pub type Monomial = [u32; 2];

/// A polynomial in `t` and `s` over the rationals. Zero coefficients are never
/// stored, so equality is coefficient-wise equality.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    terms: BTreeMap<Monomial, Rational>,
}

impl Poly {
    pub fn constant(c: Rational) -> Self {
        let mut p = Poly::default();
        if !c.is_zero() {
            p.terms.insert([0, 0], c);
        }
        p
    }

    pub fn var(v: Var) -> Self {
        Self::monomial(Rational::one(), v, 1)
    }

    /// `coef * v^exp`.
    pub fn monomial(coef: Rational, v: Var, exp: u32) -> Self {
        let mut m = [0, 0];
        m[v.slot()] = exp;
        Self::from_terms([(m, coef)])
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Monomial, Rational)>) -> Self {
        let mut p = Poly::default();
        for (m, c) in terms {
            p.add_term(m, &c);
        }
        p
    }

    /// Univariate polynomial in `v` from coefficients in ascending powers.
    pub fn from_coeffs(v: Var, coeffs: &[Rational]) -> Self {
        Self::from_terms(coeffs.iter().enumerate().map(|(k, c)| {
            let mut m = [0, 0];
            m[v.slot()] = k as u32;
            (m, c.clone())
        }))
    }

    fn add_term(&mut self, m: Monomial, c: &Rational) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(m).or_insert_with(Rational::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: Monomial) -> Rational {
        self.terms.get(&m).cloned().unwrap_or_else(Rational::zero)
    }

    /// Coefficient of `t^k` in a polynomial free of `s`.
    pub fn coeff_t(&self, k: u32) -> Rational {
        self.coeff([k, 0])
    }

    pub fn degree_in(&self, v: Var) -> Option<u32> {
        self.terms.keys().map(|m| m[v.slot()]).max()
    }

    pub fn derivative(&self, v: Var) -> Poly {
        let i = v.slot();
        Poly::from_terms(self.terms.iter().filter(|(m, _)| m[i] > 0).map(|(m, c)| {
            let mut m2 = *m;
            m2[i] -= 1;
            (m2, c * &Rational::from(m[i] as u64))
        }))
    }

    pub fn eval(&self, t: &Rational, s: &Rational) -> Rational {
        self.terms.iter().map(|(m, c)| c * &t.pow(m[0]) * s.pow(m[1])).sum()
    }

    /// Substitutes `t -> t + s` (the variable `s` must not occur).
    pub fn shift_t_by_s(&self) -> Poly {
        let mut out = Poly::default();
        for (m, c) in &self.terms {
            debug_assert_eq!(m[1], 0, "shift_t_by_s on a polynomial containing s");
            let k = m[0];
            let mut binom = Rational::one();
            for j in 0..=k {
                // binom = C(k, j)
                out.add_term([k - j, j + m[1]], &(c * &binom));
                binom = &binom * &Rational::new((k - j) as i64, (j + 1) as i64);
            }
        }
        out
    }

    /// Renames `t` to `s` (the variable `s` must not occur).
    pub fn t_as_s(&self) -> Poly {
        Poly::from_terms(self.terms.iter().map(|(m, c)| ([m[1], m[0]], c.clone())))
    }
}

impl Ring for Poly {
    fn zero() -> Self {
        Poly::default()
    }
    fn one() -> Self {
        Poly::constant(Rational::one())
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    fn add(&self, rhs: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(*m, c);
        }
        out
    }
    fn mul(&self, rhs: &Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return Poly::default();
        }
        let mut out = Poly::default();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                out.add_term([m1[0] + m2[0], m1[1] + m2[1]], &(c1 * c2));
            }
        }
        out
    }
    fn neg(&self) -> Self {
        Poly { terms: self.terms.iter().map(|(m, c)| (*m, -c)).collect() }
    }
    fn from_rational(value: &Rational) -> Self {
        Poly::constant(value.clone())
    }
    fn scale(&self, by: &Rational) -> Self {
        if by.is_zero() {
            return Poly::default();
        }
        Poly { terms: self.terms.iter().map(|(m, c)| (*m, c * by)).collect() }
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (k, (m, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "{c}")?;
            for (name, e) in [("t", m[0]), ("s", m[1])] {
                match e {
                    0 => {}
                    1 => write!(f, "*{name}")?,
                    _ => write!(f, "*{name}^{e}")?,
                }
            }
        }
        Ok(())
    }
}
