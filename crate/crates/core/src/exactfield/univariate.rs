//! Polynomials in one distinguished symbol with multivariate coefficients,
//! and their pseudo-remainder gcd over the fraction field of the others.

use super::{Monomial, Polynomial, Symbol};

#[derive(Clone, Debug, PartialEq)]
pub struct UniPoly {
    var: Symbol,
    /// `coeffs[k]` multiplies `var^k`; the last entry is nonzero unless empty.
    coeffs: Vec<Polynomial>,
}

impl UniPoly {
    pub fn new(p: &Polynomial, var: Symbol) -> Self {
        let coeffs = if p.is_zero() { Vec::new() } else { p.coefficients_in(var) };
        UniPoly { var, coeffs }.trimmed()
    }

    fn trimmed(mut self) -> Self {
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
        self
    }

    pub fn var(&self) -> Symbol {
        self.var
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree in the distinguished symbol; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[Polynomial] {
        &self.coeffs
    }

    pub fn leading(&self) -> Option<&Polynomial> {
        self.coeffs.last()
    }

    pub fn to_poly(&self) -> Polynomial {
        let mut acc = Polynomial::zero();
        for (k, c) in self.coeffs.iter().enumerate() {
            let m = Monomial::var_pow(self.var, k as u32);
            acc = &acc + &c.mul_monomial(&m, &super::GaussianRational::one());
        }
        acc
    }

    /// Drops the factor `var^k` and any monomial or numeric content common to
    /// all coefficients. Roots other than `var = 0` are unchanged.
    pub fn normalized(&self) -> UniPoly {
        let Some(first) = self.coeffs.iter().position(|c| !c.is_zero()) else {
            return self.clone();
        };
        let mut coeffs: Vec<Polynomial> = self.coeffs[first..].to_vec();
        let mut content: Option<Monomial> = None;
        for c in coeffs.iter().filter(|c| !c.is_zero()) {
            let m = c.monomial_content();
            content = Some(match content {
                None => m,
                Some(g) => g.gcd(&m),
            });
        }
        if let Some(g) = content.filter(|g| !g.is_one()) {
            coeffs = coeffs.iter().map(|c| c.div_monomial(&g).expect("content divides")).collect();
        }
        if let Some((_, lc)) = coeffs.last().and_then(|c| c.leading()) {
            let inv = lc.inv().expect("nonzero leading coefficient");
            coeffs = coeffs.iter().map(|c| c.scale(&inv)).collect();
        }
        UniPoly { var: self.var, coeffs }.trimmed()
    }

    /// Pseudo-remainder: `lc(b)^k · self = Q·b + R` with `deg R < deg b`.
    pub fn prem(&self, b: &UniPoly) -> UniPoly {
        let (Some(db), Some(lb)) = (b.degree(), b.leading()) else {
            panic!("pseudo-division by zero");
        };
        let mut r = self.clone();
        while let Some(dr) = r.degree() {
            if dr < db {
                break;
            }
            let lr = r.coeffs[dr].clone();
            let shift = dr - db;
            let mut next: Vec<Polynomial> = r.coeffs.iter().map(|c| c * lb).collect();
            for (k, bc) in b.coeffs.iter().enumerate() {
                next[k + shift] = &next[k + shift] - &(bc * &lr);
            }
            debug_assert!(next[dr].is_zero());
            r = UniPoly { var: r.var, coeffs: next }.trimmed();
        }
        r
    }

    /// Greatest common divisor over the field of fractions of the other
    /// symbols, up to a factor free of `var`.
    pub fn gcd(&self, other: &UniPoly) -> UniPoly {
        let (mut a, mut b) = (self.normalized(), other.normalized());
        if a.degree() < b.degree() {
            std::mem::swap(&mut a, &mut b);
        }
        while !b.is_zero() {
            let r = a.prem(&b).normalized();
            a = b;
            b = r;
        }
        a
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactfield::RationalExpr;

    fn poly(e: RationalExpr) -> Polynomial {
        e.numerator().clone()
    }

    #[test]
    fn gcd_finds_the_shared_linear_factor() {
        let v = RationalExpr::var;
        let (y, a, b, c) = (v("y"), v("a"), v("b"), v("c"));
        let shared = &(&a * &y) - &b;
        let p = poly(&(&shared * &(&y + &c)) * &y);
        let q = poly(&shared * &(&(&y * &y) - &a));
        let g = UniPoly::new(&p, Symbol::new("y")).gcd(&UniPoly::new(&q, Symbol::new("y")));
        assert_eq!(g.degree(), Some(1));
        let root = RationalExpr::from_poly(-&g.coeffs()[0]).checked_div(&RationalExpr::from_poly(g.coeffs()[1].clone()));
        assert_eq!(root.unwrap(), b.checked_div(&a).unwrap());
    }

    #[test]
    fn coprime_inputs_have_constant_gcd() {
        let v = RationalExpr::var;
        let (y, a) = (v("y"), v("a"));
        let p = poly(&y - &a);
        let q = poly(&y + &a);
        let g = UniPoly::new(&p, Symbol::new("y")).gcd(&UniPoly::new(&q, Symbol::new("y")));
        assert_eq!(g.degree(), Some(0));
    }
}
