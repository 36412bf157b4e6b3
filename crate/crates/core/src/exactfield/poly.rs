//! Sparse multivariate polynomials over the Gaussian rationals.
//!
//! Terms are kept sorted in descending lexicographic order (smaller symbol
//! id is more significant) with no zero coefficients, so structural equality
//! is polynomial equality.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use smallvec::SmallVec;

use super::{Field, GaussianRational, Symbol};

/// Power product of symbols, stored sparsely as sorted `(symbol, exponent)` pairs.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Monomial(SmallVec<[(Symbol, u32); 4]>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(SmallVec::new())
    }

    pub fn var(s: Symbol) -> Self {
        Monomial::var_pow(s, 1)
    }

    pub fn var_pow(s: Symbol, e: u32) -> Self {
        let mut v = SmallVec::new();
        if e > 0 {
            v.push((s, e));
        }
        Monomial(v)
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Symbol, u32)> + '_ {
        self.0.iter().copied()
    }

    pub fn degree_in(&self, s: Symbol) -> u32 {
        self.0.iter().find(|(t, _)| *t == s).map_or(0, |&(_, e)| e)
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().map(|&(_, e)| e).sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let (a, b) = (&self.0, &other.0);
        let mut out = SmallVec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((a[i].0, a[i].1 + b[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Monomial(out)
    }

    /// `self / other` if `other` divides `self`.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        let mut out = SmallVec::with_capacity(self.0.len());
        let mut j = 0;
        let b = &other.0;
        for &(s, e) in self.0.iter() {
            if j < b.len() && b[j].0 < s {
                return None;
            }
            if j < b.len() && b[j].0 == s {
                match e.cmp(&b[j].1) {
                    Ordering::Less => return None,
                    Ordering::Equal => {}
                    Ordering::Greater => out.push((s, e - b[j].1)),
                }
                j += 1;
            } else {
                out.push((s, e));
            }
        }
        if j < b.len() {
            return None;
        }
        Some(Monomial(out))
    }

    pub fn gcd(&self, other: &Monomial) -> Monomial {
        let mut out = SmallVec::new();
        for &(s, e) in self.0.iter() {
            let f = other.degree_in(s);
            if f > 0 {
                out.push((s, e.min(f)));
            }
        }
        Monomial(out)
    }

    /// Splits off the power of `s`: returns (exponent of `s`, remaining monomial).
    pub fn split(&self, s: Symbol) -> (u32, Monomial) {
        let mut rest = SmallVec::with_capacity(self.0.len());
        let mut e = 0;
        for &(t, k) in self.0.iter() {
            if t == s {
                e = k;
            } else {
                rest.push((t, k));
            }
        }
        (e, Monomial(rest))
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        let (a, b) = (&self.0, &other.0);
        let (mut i, mut j) = (0, 0);
        loop {
            match (a.get(i), b.get(j)) {
                (None, None) => return Ordering::Equal,
                (Some(_), None) => return Ordering::Greater,
                (None, Some(_)) => return Ordering::Less,
                (Some(&(sa, ea)), Some(&(sb, eb))) => match sa.cmp(&sb) {
                    Ordering::Less => return Ordering::Greater,
                    Ordering::Greater => return Ordering::Less,
                    Ordering::Equal => {
                        if ea != eb {
                            return ea.cmp(&eb);
                        }
                        i += 1;
                        j += 1;
                    }
                },
            }
        }
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<(Symbol, u32)> = self.0.to_vec();
        parts.sort_by_key(|(s, _)| s.name());
        for (idx, (s, e)) in parts.into_iter().enumerate() {
            if idx > 0 {
                f.write_str("*")?;
            }
            if e == 1 {
                write!(f, "{s}")?;
            } else {
                write!(f, "{s}^{e}")?;
            }
        }
        Ok(())
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Polynomial {
    terms: Vec<(Monomial, GaussianRational)>,
}

impl Polynomial {
    pub fn zero() -> Self {
        Polynomial { terms: Vec::new() }
    }

    pub fn one() -> Self {
        Polynomial::constant(GaussianRational::one())
    }

    pub fn constant(c: GaussianRational) -> Self {
        Polynomial::monomial(Monomial::one(), c)
    }

    pub fn monomial(m: Monomial, c: GaussianRational) -> Self {
        if c.is_zero() {
            return Polynomial::zero();
        }
        Polynomial { terms: vec![(m, c)] }
    }

    pub fn var(s: Symbol) -> Self {
        Polynomial::monomial(Monomial::var(s), GaussianRational::one())
    }

    /// Builds a polynomial from arbitrary terms, merging duplicates.
    pub fn from_terms(terms: impl IntoIterator<Item = (Monomial, GaussianRational)>) -> Self {
        let mut acc: HashMap<Monomial, GaussianRational> = HashMap::new();
        for (m, c) in terms {
            *acc.entry(m).or_insert_with(GaussianRational::zero) += &c;
        }
        Polynomial::from_map(acc)
    }

    fn from_map(acc: HashMap<Monomial, GaussianRational>) -> Self {
        let mut terms: Vec<_> = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        terms.sort_unstable_by(|a, b| b.0.cmp(&a.0));
        Polynomial { terms }
    }

    pub fn terms(&self) -> &[(Monomial, GaussianRational)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn as_constant(&self) -> Option<GaussianRational> {
        match self.terms.as_slice() {
            [] => Some(GaussianRational::zero()),
            [(m, c)] if m.is_one() => Some(c.clone()),
            _ => None,
        }
    }

    /// The single symbol if this is exactly `s`.
    pub fn as_symbol(&self) -> Option<Symbol> {
        match self.terms.as_slice() {
            [(m, c)] if c.is_one() => {
                let mut it = m.iter();
                match (it.next(), it.next()) {
                    (Some((s, 1)), None) => Some(s),
                    _ => None,
                }
            }
            _ => None,
        }
    }

    pub fn leading(&self) -> Option<&(Monomial, GaussianRational)> {
        self.terms.first()
    }

    pub fn scale(&self, c: &GaussianRational) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero();
        }
        Polynomial {
            terms: self.terms.iter().map(|(m, k)| (m.clone(), k * c)).collect(),
        }
    }

    pub fn mul_monomial(&self, m: &Monomial, c: &GaussianRational) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero();
        }
        Polynomial {
            terms: self.terms.iter().map(|(t, k)| (t.mul(m), k * c)).collect(),
        }
    }

    /// Exact quotient by a monomial; `None` unless every term is divisible.
    pub fn div_monomial(&self, m: &Monomial) -> Option<Polynomial> {
        let terms = self
            .terms
            .iter()
            .map(|(t, k)| t.div(m).map(|q| (q, k.clone())))
            .collect::<Option<Vec<_>>>()?;
        Some(Polynomial { terms })
    }

    /// Greatest common monomial divisor of all terms (1 for the zero polynomial).
    pub fn monomial_content(&self) -> Monomial {
        let mut it = self.terms.iter();
        let Some((first, _)) = it.next() else {
            return Monomial::one();
        };
        let mut g = first.clone();
        for (m, _) in it {
            if g.is_one() {
                break;
            }
            g = g.gcd(m);
        }
        g
    }

    pub fn pow(&self, exp: u32) -> Polynomial {
        let mut acc = Polynomial::one();
        let mut base = self.clone();
        let mut e = exp;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn degree_in(&self, s: Symbol) -> u32 {
        self.terms.iter().map(|(m, _)| m.degree_in(s)).max().unwrap_or(0)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.iter().map(|(m, _)| m.total_degree()).max().unwrap_or(0)
    }

    pub fn contains(&self, s: Symbol) -> bool {
        self.terms.iter().any(|(m, _)| m.degree_in(s) > 0)
    }

    pub fn symbols(&self) -> Vec<Symbol> {
        let mut out: Vec<Symbol> = self.terms.iter().flat_map(|(m, _)| m.iter().map(|(s, _)| s)).collect();
        out.sort();
        out.dedup();
        out
    }

    /// Coefficients `c_0..c_d` with `self = Σ c_k s^k`.
    pub fn coefficients_in(&self, s: Symbol) -> Vec<Polynomial> {
        let d = self.degree_in(s) as usize;
        let mut buckets: Vec<Vec<(Monomial, GaussianRational)>> = vec![Vec::new(); d + 1];
        for (m, c) in &self.terms {
            let (e, rest) = m.split(s);
            buckets[e as usize].push((rest, c.clone()));
        }
        // removing a symbol keeps the relative lex order of the remaining terms
        buckets.into_iter().map(|terms| Polynomial { terms }).collect()
    }

    /// Evaluates with every symbol mapped through `value`.
    pub fn eval<F: Field>(&self, value: &mut impl FnMut(Symbol) -> F) -> F {
        let mut powers: HashMap<Symbol, Vec<F>> = HashMap::new();
        let mut acc = F::zero();
        for (m, c) in &self.terms {
            let mut t = F::from_gaussian(c);
            for (s, e) in m.iter() {
                let table = powers.entry(s).or_insert_with(|| vec![F::one(), value(s)]);
                while table.len() <= e as usize {
                    let next = table[table.len() - 1].clone() * table[1].clone();
                    table.push(next);
                }
                t = t * table[e as usize].clone();
            }
            acc = acc + t;
        }
        acc
    }

    /// Exact division; `None` when `d` does not divide `self`.
    pub fn div_exact(&self, d: &Polynomial) -> Option<Polynomial> {
        let (lm, lc) = d.leading()?;
        if let Some(c) = d.as_constant() {
            return Some(self.scale(&c.inv().ok()?));
        }
        if self.is_zero() {
            return Some(Polynomial::zero());
        }
        // cheap necessary conditions before running the division loop
        for s in d.symbols() {
            if d.degree_in(s) > self.degree_in(s) {
                return None;
            }
        }
        let lc_inv = lc.inv().ok()?;
        let mut rem = self.clone();
        let mut quot = Vec::new();
        while let Some((rm, rc)) = rem.leading() {
            let qm = rm.div(lm)?;
            let qc = rc * &lc_inv;
            rem = &rem - &d.mul_monomial(&qm, &qc);
            quot.push((qm, qc));
        }
        Some(Polynomial { terms: quot })
    }

    fn merge(&self, other: &Polynomial, negate: bool) -> Polynomial {
        let (a, b) = (&self.terms, &other.terms);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Greater => {
                    out.push(a[i].clone());
                    i += 1;
                }
                Ordering::Less => {
                    let c = if negate { -&b[j].1 } else { b[j].1.clone() };
                    out.push((b[j].0.clone(), c));
                    j += 1;
                }
                Ordering::Equal => {
                    let c = if negate { &a[i].1 - &b[j].1 } else { &a[i].1 + &b[j].1 };
                    if !c.is_zero() {
                        out.push((a[i].0.clone(), c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend(a[i..].iter().cloned());
        out.extend(b[j..].iter().map(|(m, c)| (m.clone(), if negate { -c } else { c.clone() })));
        Polynomial { terms: out }
    }
}

impl<'a> Add<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        self.merge(rhs, false)
    }
}

impl<'a> Sub<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self.merge(rhs, true)
    }
}

impl<'a> Mul<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        if self.is_zero() || rhs.is_zero() {
            return Polynomial::zero();
        }
        let (small, big) = if self.len() <= rhs.len() { (self, rhs) } else { (rhs, self) };
        if small.len() == 1 {
            let (m, c) = &small.terms[0];
            return big.mul_monomial(m, c);
        }
        let mut acc: HashMap<Monomial, GaussianRational> = HashMap::with_capacity(big.len() * 2);
        for (ma, ca) in &small.terms {
            for (mb, cb) in &big.terms {
                let m = ma.mul(mb);
                let c = ca * cb;
                match acc.get_mut(&m) {
                    Some(slot) => *slot += &c,
                    None => {
                        acc.insert(m, c);
                    }
                }
            }
        }
        Polynomial::from_map(acc)
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let mut rendered: Vec<String> = self
            .terms
            .iter()
            .map(|(m, c)| {
                if m.is_one() {
                    format!("({c})")
                } else if c.is_one() {
                    m.to_string()
                } else {
                    format!("({c})*{m}")
                }
            })
            .collect();
        rendered.sort();
        f.write_str(&rendered.join(" + "))
    }
}
