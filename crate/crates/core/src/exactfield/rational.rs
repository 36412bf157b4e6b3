//! Multivariate rational functions with factored denominators.
//!
//! The numerator is an expanded [`Polynomial`]. The denominator is a product
//! of normalized factors `f^k`, each either a single symbol or a monic
//! polynomial without monomial content, and any constant is folded into the
//! numerator. Sums take the least common multiple of the factor lists, which
//! keeps denominators from squaring at every addition. Factors that divide
//! the numerator exactly are cancelled when cheaply detectable; equality never
//! depends on that, since it is decided by cross-multiplication.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};


use super::{Field, FieldError, GaussianRational, Monomial, Polynomial, Symbol};

#[derive(Clone, Debug)]
pub struct RationalExpr {
    num: Polynomial,
    den: Vec<(Polynomial, u32)>,
}

impl RationalExpr {
    pub fn zero() -> Self {
        RationalExpr::from_poly(Polynomial::zero())
    }

    pub fn one() -> Self {
        RationalExpr::from_poly(Polynomial::one())
    }

    pub fn i() -> Self {
        RationalExpr::constant(GaussianRational::i())
    }

    pub fn constant(c: GaussianRational) -> Self {
        RationalExpr::from_poly(Polynomial::constant(c))
    }

    pub fn int(n: i64) -> Self {
        RationalExpr::constant(GaussianRational::from_integer(n))
    }

    pub fn ratio(n: i64, d: i64) -> Self {
        RationalExpr::constant(GaussianRational::from_ratio(n, d))
    }

    pub fn symbol(s: Symbol) -> Self {
        RationalExpr::from_poly(Polynomial::var(s))
    }

    /// Shorthand for `RationalExpr::symbol(Symbol::new(name))`.
    pub fn var(name: &str) -> Self {
        RationalExpr::symbol(Symbol::new(name))
    }

    pub fn from_poly(p: Polynomial) -> Self {
        RationalExpr { num: p, den: Vec::new() }
    }

    /// `num / den`; fails when `den` is the zero polynomial.
    pub fn from_fraction(num: Polynomial, den: &Polynomial) -> Result<Self, FieldError> {
        if den.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        let mut out = RationalExpr::from_poly(num);
        out.push_factor(den, 1);
        out.cancel_all();
        Ok(out)
    }

    pub fn numerator(&self) -> &Polynomial {
        &self.num
    }

    pub fn denominator_factors(&self) -> &[(Polynomial, u32)] {
        &self.den
    }

    /// The denominator as one expanded polynomial.
    pub fn denominator(&self) -> Polynomial {
        self.den
            .iter()
            .fold(Polynomial::one(), |acc, (f, k)| &acc * &f.pow(*k))
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn as_constant(&self) -> Option<GaussianRational> {
        if self.den.is_empty() {
            self.num.as_constant()
        } else if self.num.is_zero() {
            Some(GaussianRational::zero())
        } else {
            None
        }
    }

    pub fn is_constant(&self) -> bool {
        self.as_constant().is_some()
    }

    pub fn contains(&self, s: Symbol) -> bool {
        self.num.contains(s) || self.den.iter().any(|(f, _)| f.contains(s))
    }

    pub fn symbols(&self) -> Vec<Symbol> {
        let mut out = self.num.symbols();
        for (f, _) in &self.den {
            out.extend(f.symbols());
        }
        out.sort();
        out.dedup();
        out
    }

    /// Normalizes `p^exp` into the factor list, moving constants to the numerator.
    fn push_factor(&mut self, p: &Polynomial, exp: u32) {
        debug_assert!(!p.is_zero());
        if exp == 0 {
            return;
        }
        let content = p.monomial_content();
        for (s, e) in content.iter() {
            self.insert_factor(Polynomial::var(s), e * exp);
        }
        let rest = if content.is_one() {
            p.clone()
        } else {
            p.div_monomial(&content).expect("content divides every term")
        };
        let (_, lc) = rest.leading().expect("nonzero polynomial").clone();
        let lc_inv = lc.inv().expect("nonzero leading coefficient");
        self.num = self.num.scale(&lc_inv.pow(exp));
        if rest.as_constant().is_none() {
            let monic = rest.scale(&lc_inv);
            self.insert_factor(monic, exp);
        }
    }

    fn insert_factor(&mut self, f: Polynomial, exp: u32) {
        if let Some(slot) = self.den.iter_mut().find(|(g, _)| *g == f) {
            slot.1 += exp;
        } else {
            self.den.push((f, exp));
        }
    }

    /// Cancels symbol factors against the numerator's monomial content, then
    /// tries exact division for the remaining factors.
    fn cancel_all(&mut self) {
        self.cancel_symbols();
        if self.num.is_zero() {
            self.den.clear();
            return;
        }
        for idx in 0..self.den.len() {
            if self.den[idx].0.as_symbol().is_some() {
                continue;
            }
            while self.den[idx].1 > 0 {
                match self.num.div_exact(&self.den[idx].0) {
                    Some(q) => {
                        self.num = q;
                        self.den[idx].1 -= 1;
                    }
                    None => break,
                }
            }
        }
        self.den.retain(|(_, k)| *k > 0);
    }

    fn cancel_symbols(&mut self) {
        if self.num.is_zero() {
            self.den.clear();
            return;
        }
        let content = self.num.monomial_content();
        if content.is_one() {
            return;
        }
        let mut divisor = Monomial::one();
        for (f, k) in self.den.iter_mut() {
            if let Some(s) = f.as_symbol() {
                let c = content.degree_in(s).min(*k);
                if c > 0 {
                    *k -= c;
                    divisor = divisor.mul(&Monomial::var_pow(s, c));
                }
            }
        }
        if !divisor.is_one() {
            self.num = self.num.div_monomial(&divisor).expect("content divides numerator");
            self.den.retain(|(_, k)| *k > 0);
        }
    }

    fn combine_sum(&self, rhs: &RationalExpr, negate: bool) -> RationalExpr {
        if rhs.num.is_zero() {
            return self.clone();
        }
        if self.num.is_zero() {
            return if negate { -rhs } else { rhs.clone() };
        }
        let mut lcm: Vec<(Polynomial, u32)> = self.den.clone();
        for (f, k) in &rhs.den {
            match lcm.iter_mut().find(|(g, _)| g == f) {
                Some(slot) => slot.1 = slot.1.max(*k),
                None => lcm.push((f.clone(), *k)),
            }
        }
        let cofactor = |den: &[(Polynomial, u32)]| {
            lcm.iter().fold(Polynomial::one(), |acc, (f, k)| {
                let have = den.iter().find(|(g, _)| g == f).map_or(0, |(_, e)| *e);
                if *k > have {
                    &acc * &f.pow(k - have)
                } else {
                    acc
                }
            })
        };
        let left = &self.num * &cofactor(&self.den);
        let right = &rhs.num * &cofactor(&rhs.den);
        let num = if negate { &left - &right } else { &left + &right };
        let mut out = RationalExpr { num, den: lcm };
        out.cancel_all();
        out
    }

    fn product(&self, rhs: &RationalExpr) -> RationalExpr {
        if self.num.is_zero() || rhs.num.is_zero() {
            return RationalExpr::zero();
        }
        let mut den = self.den.clone();
        for (f, k) in &rhs.den {
            match den.iter_mut().find(|(g, _)| g == f) {
                Some(slot) => slot.1 += *k,
                None => den.push((f.clone(), *k)),
            }
        }
        let mut out = RationalExpr {
            num: &self.num * &rhs.num,
            den,
        };
        if !self.den.is_empty() || !rhs.den.is_empty() {
            out.cancel_all();
        }
        out
    }

    pub fn inv(&self) -> Result<RationalExpr, FieldError> {
        if self.num.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        let mut out = RationalExpr::from_poly(self.denominator());
        out.push_factor(&self.num, 1);
        out.cancel_all();
        Ok(out)
    }

    pub fn checked_div(&self, rhs: &RationalExpr) -> Result<RationalExpr, FieldError> {
        Ok(self.product(&rhs.inv()?))
    }

    pub fn pow(&self, exp: u32) -> RationalExpr {
        RationalExpr {
            num: self.num.pow(exp),
            den: self.den.iter().map(|(f, k)| (f.clone(), k * exp)).collect(),
        }
    }

    pub fn scale(&self, c: &GaussianRational) -> RationalExpr {
        let mut out = self.clone();
        out.num = out.num.scale(c);
        if out.num.is_zero() {
            out.den.clear();
        }
        out
    }

    /// Simultaneous substitution of symbols by rational expressions.
    pub fn substitute(&self, bindings: &[(Symbol, RationalExpr)]) -> Result<RationalExpr, FieldError> {
        let relevant: Vec<&(Symbol, RationalExpr)> =
            bindings.iter().filter(|(s, _)| self.contains(*s)).collect();
        if relevant.is_empty() {
            return Ok(self.clone());
        }
        let num = substitute_poly(&self.num, &relevant);
        let mut den = RationalExpr::one();
        for (f, k) in &self.den {
            den = den.product(&substitute_poly(f, &relevant).pow(*k));
        }
        if den.is_zero() {
            return Err(FieldError::SubstitutionSingular);
        }
        num.checked_div(&den)
    }

    /// Convenience wrapper binding symbols by name.
    pub fn subs(&self, bindings: &[(&str, RationalExpr)]) -> Result<RationalExpr, FieldError> {
        let owned: Vec<(Symbol, RationalExpr)> =
            bindings.iter().map(|(n, v)| (Symbol::new(n), v.clone())).collect();
        self.substitute(&owned)
    }

    /// `c_0..c_d` with `self = Σ c_k s^k`; requires a denominator free of `s`.
    pub fn coefficients_in(&self, s: Symbol) -> Result<Vec<RationalExpr>, FieldError> {
        if self.den.iter().any(|(f, _)| f.contains(s)) {
            return Err(FieldError::DenominatorContainsSymbol(s.name().to_owned()));
        }
        if self.num.is_zero() {
            return Ok(vec![RationalExpr::zero()]);
        }
        Ok(self
            .num
            .coefficients_in(s)
            .into_iter()
            .map(|c| {
                let mut out = RationalExpr { num: c, den: self.den.clone() };
                out.cancel_all();
                out
            })
            .collect())
    }

    pub fn degree_in(&self, s: Symbol) -> u32 {
        self.num.degree_in(s)
    }

    /// Evaluates at a point given by `value`, in any field.
    pub fn eval<F: Field>(&self, value: &mut impl FnMut(Symbol) -> F) -> Result<F, FieldError> {
        let n = self.num.eval(value);
        let mut d = F::one();
        for (f, k) in &self.den {
            d = d * f.eval(value).pow(*k);
        }
        if d.is_zero() {
            return Err(FieldError::SubstitutionSingular);
        }
        n.try_div(&d)
    }

    /// Evaluates at exact numeric values for every symbol present.
    pub fn eval_at(&self, point: &HashMap<Symbol, GaussianRational>) -> Result<GaussianRational, FieldError> {
        let missing = self.symbols().into_iter().find(|s| !point.contains_key(s));
        if let Some(s) = missing {
            return Err(FieldError::UnboundSymbol(s.name().to_owned()));
        }
        self.eval(&mut |s| point[&s].clone())
    }
}

/// Substitutes into a polynomial by grouping terms on the exponents of the
/// bound symbols and bringing every group over one common denominator.
fn substitute_poly(p: &Polynomial, bindings: &[&(Symbol, RationalExpr)]) -> RationalExpr {
    let bound: Vec<Symbol> = bindings.iter().map(|(s, _)| *s).collect();
    let maxdeg: Vec<u32> = bound.iter().map(|&s| p.degree_in(s)).collect();

    let mut groups: HashMap<Vec<u32>, Vec<(Monomial, GaussianRational)>> = HashMap::new();
    for (m, c) in p.terms() {
        let mut key = vec![0u32; bound.len()];
        let mut rest = Monomial::one();
        for (s, e) in m.iter() {
            match bound.iter().position(|&b| b == s) {
                Some(idx) => key[idx] = e,
                None => rest = rest.mul(&Monomial::var_pow(s, e)),
            }
        }
        groups.entry(key).or_default().push((rest, c.clone()));
    }

    let nums: Vec<&Polynomial> = bindings.iter().map(|(_, v)| &v.num).collect();
    let dens: Vec<Polynomial> = bindings.iter().map(|(_, v)| v.denominator()).collect();
    let mut num_pows: Vec<Vec<Polynomial>> = nums.iter().map(|n| vec![Polynomial::one(), (*n).clone()]).collect();
    let mut den_pows: Vec<Vec<Polynomial>> = dens.iter().map(|d| vec![Polynomial::one(), d.clone()]).collect();
    fn power(table: &mut Vec<Polynomial>, e: u32) -> Polynomial {
        while table.len() <= e as usize {
            let next = &table[table.len() - 1] * &table[1];
            table.push(next);
        }
        table[e as usize].clone()
    }

    let mut keys: Vec<&Vec<u32>> = groups.keys().collect();
    keys.sort();
    let mut total = Polynomial::zero();
    for key in keys {
        let mut term = Polynomial::from_terms(groups[key].iter().cloned());
        for (idx, &e) in key.iter().enumerate() {
            if e > 0 {
                term = &term * &power(&mut num_pows[idx], e);
            }
            if maxdeg[idx] > e {
                term = &term * &power(&mut den_pows[idx], maxdeg[idx] - e);
            }
        }
        total = &total + &term;
    }

    let mut out = RationalExpr::from_poly(total);
    for (idx, (_, v)) in bindings.iter().enumerate() {
        for (f, k) in &v.den {
            if maxdeg[idx] > 0 {
                out.insert_factor(f.clone(), k * maxdeg[idx]);
            }
        }
    }
    out.cancel_all();
    out
}

impl PartialEq for RationalExpr {
    fn eq(&self, other: &Self) -> bool {
        if self.den == other.den {
            return self.num == other.num;
        }
        (self - other).is_zero()
    }
}

impl<'a> Add<&'a RationalExpr> for &'a RationalExpr {
    type Output = RationalExpr;
    fn add(self, rhs: &RationalExpr) -> RationalExpr {
        self.combine_sum(rhs, false)
    }
}

impl<'a> Sub<&'a RationalExpr> for &'a RationalExpr {
    type Output = RationalExpr;
    fn sub(self, rhs: &RationalExpr) -> RationalExpr {
        self.combine_sum(rhs, true)
    }
}

impl<'a> Mul<&'a RationalExpr> for &'a RationalExpr {
    type Output = RationalExpr;
    fn mul(self, rhs: &RationalExpr) -> RationalExpr {
        self.product(rhs)
    }
}

impl<'a> Div<&'a RationalExpr> for &'a RationalExpr {
    type Output = RationalExpr;
    /// Panics on a zero divisor; use [`RationalExpr::checked_div`] otherwise.
    fn div(self, rhs: &RationalExpr) -> RationalExpr {
        self.checked_div(rhs).expect("division by the zero rational function")
    }
}

impl Neg for &RationalExpr {
    type Output = RationalExpr;
    fn neg(self) -> RationalExpr {
        RationalExpr {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for RationalExpr {
            type Output = RationalExpr;
            fn $m(self, rhs: RationalExpr) -> RationalExpr {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&RationalExpr> for RationalExpr {
            type Output = RationalExpr;
            fn $m(self, rhs: &RationalExpr) -> RationalExpr {
                (&self).$m(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl Neg for RationalExpr {
    type Output = RationalExpr;
    fn neg(self) -> RationalExpr {
        -&self
    }
}

impl From<i64> for RationalExpr {
    fn from(n: i64) -> Self {
        RationalExpr::int(n)
    }
}

impl From<GaussianRational> for RationalExpr {
    fn from(c: GaussianRational) -> Self {
        RationalExpr::constant(c)
    }
}

impl From<Polynomial> for RationalExpr {
    fn from(p: Polynomial) -> Self {
        RationalExpr::from_poly(p)
    }
}

impl Field for RationalExpr {
    fn zero() -> Self {
        RationalExpr::zero()
    }
    fn one() -> Self {
        RationalExpr::one()
    }
    fn from_gaussian(c: &GaussianRational) -> Self {
        RationalExpr::constant(c.clone())
    }
    fn is_zero(&self) -> bool {
        RationalExpr::is_zero(self)
    }
    fn try_div(&self, rhs: &Self) -> Result<Self, FieldError> {
        self.checked_div(rhs)
    }
    fn pow(&self, exp: u32) -> Self {
        RationalExpr::pow(self, exp)
    }
    fn named(name: &str) -> Option<Self> {
        Some(RationalExpr::var(name))
    }
}

impl fmt::Display for RationalExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_empty() || self.num.is_zero() {
            return write!(f, "{}", self.num);
        }
        let mut parts: Vec<String> = self
            .den
            .iter()
            .map(|(p, k)| if *k == 1 { format!("({p})") } else { format!("({p})^{k}") })
            .collect();
        parts.sort();
        write!(f, "({})/({})", self.num, parts.join("*"))
    }
}
