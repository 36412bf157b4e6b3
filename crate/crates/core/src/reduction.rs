//! Geometric reduction of the Z^4 system: the gauge cocycle, the
//! (1,1,1)-periodic ω-lattice, its six reduced equations, and the parameter
//! actions of the hatted translations.

use std::collections::BTreeMap;
use std::time::Instant;

use serde::Serialize;
use thiserror::Error;

use crate::exactfield::{ExactSampler, Field, FieldError, GaussianRational, RationalExpr};
use crate::lattice4d::{
    face_equation, step_equation, LatticeBox, LatticeError, LatticePatch, LatticePoint, Pair, ParameterBase,
    ParameterSequences, PatchKind, SingularEvent, PAIRS,
};
use crate::painleve::{step, MapId, PainleveConfig, StepOptions};
use crate::parallel::{map_range, Execution};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ReductionError {
    #[error("singular step: the reduced {pair} equation at {point} cannot be solved")]
    SingularStep { point: LatticePoint, pair: Pair },
    #[error("the level {0} closure around ε1+ε2+ε3 is singular")]
    ClosureSingular(i64),
    #[error("periodicity violated at {0}")]
    PeriodicityViolation(LatticePoint),
    #[error("ω vanishes at {0}")]
    ZeroOmega(&'static str),
    #[error("no ω value at {0}")]
    MissingValue(LatticePoint),
    #[error("the patch does not carry reduced parameter sequences")]
    NotReduced,
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// `α̂, β̂, γ̂, λ, q` with `a0 = qα̂/γ̂`, `a1 = β̂/α̂`, `a2 = γ̂/β̂`.
#[derive(Clone, Debug, PartialEq)]
pub struct ReducedParameters<F> {
    pub alpha: F,
    pub beta: F,
    pub gamma: F,
    pub lambda: F,
    pub q: F,
}

impl<F: Field> ReducedParameters<F> {
    pub fn a0(&self) -> Result<F, FieldError> {
        (self.q.clone() * self.alpha.clone()).try_div(&self.gamma)
    }

    pub fn a1(&self) -> Result<F, FieldError> {
        self.beta.try_div(&self.alpha)
    }

    pub fn a2(&self) -> Result<F, FieldError> {
        self.gamma.try_div(&self.beta)
    }

    /// Applies a hatted translation (or `R̂1`) to the parameters.
    pub fn act(&self, action: HatAction, inverse: bool) -> Result<Self, FieldError> {
        let mut p = self.clone();
        let q = self.q.clone();
        let up = |v: &F| v.clone() * q.clone();
        let down = |v: &F| v.try_div(&q);
        match (action, inverse) {
            (HatAction::T1, false) => p.alpha = up(&p.alpha),
            (HatAction::T1, true) => p.alpha = down(&p.alpha)?,
            (HatAction::T2, false) => p.beta = up(&p.beta),
            (HatAction::T2, true) => p.beta = down(&p.beta)?,
            (HatAction::T3, false) => p.gamma = up(&p.gamma),
            (HatAction::T3, true) => p.gamma = down(&p.gamma)?,
            (HatAction::T4, false) => p.lambda = up(&p.lambda),
            (HatAction::T4, true) => p.lambda = down(&p.lambda)?,
            // (β̂, γ̂) ↦ (γ̂/q, β̂)
            (HatAction::R1, false) => {
                p.beta = down(&self.gamma)?;
                p.gamma = self.beta.clone();
            }
            (HatAction::R1, true) => {
                p.beta = self.gamma.clone();
                p.gamma = up(&self.beta);
            }
        }
        Ok(p)
    }
}

impl<F: Field> ReducedParameters<F> {
    /// The parameter sequences `α_l = q^l α̂`, ..., `K_l = (q^{2l+1}λ²−1)/(q^l λ)`.
    pub fn sequences(&self) -> ParameterSequences<F> {
        ParameterSequences::reduced(
            self.alpha.clone(),
            self.beta.clone(),
            self.gamma.clone(),
            self.lambda.clone(),
            self.q.clone(),
        )
    }

    pub fn of_sequences(p: &ParameterSequences<F>) -> Result<Self, ReductionError> {
        match &p.base {
            ParameterBase::Reduced { alpha_hat, beta_hat, gamma_hat, lambda, q }
                if p.slots() == ParameterSequences::<F>::reduced(F::one(), F::one(), F::one(), F::one(), F::one()).slots() =>
            {
                Ok(ReducedParameters {
                    alpha: alpha_hat.clone(),
                    beta: beta_hat.clone(),
                    gamma: gamma_hat.clone(),
                    lambda: lambda.clone(),
                    q: q.clone(),
                })
            }
            _ => Err(ReductionError::NotReduced),
        }
    }
}

impl ReducedParameters<RationalExpr> {
    pub fn symbolic() -> Self {
        let v = RationalExpr::var;
        ReducedParameters { alpha: v("alpha"), beta: v("beta"), gamma: v("gamma"), lambda: v("lambda"), q: v("q") }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum HatAction {
    T1,
    T2,
    T3,
    T4,
    R1,
}

impl HatAction {
    pub const ALL: [HatAction; 5] = [HatAction::T1, HatAction::T2, HatAction::T3, HatAction::T4, HatAction::R1];
}

/// Acts on an expression in the symbols `a0, a1, lambda, q, x` (with `a2`
/// eliminated and `x = μ/α̂`) by transforming its parameters.
pub fn act_on_expr(action: HatAction, inverse: bool, e: &RationalExpr) -> Result<RationalExpr, FieldError> {
    let v = RationalExpr::var;
    let (a0, a1, lambda, q, x) = (v("a0"), v("a1"), v("lambda"), v("q"), v("x"));
    let bindings: Vec<(&str, RationalExpr)> = match (action, inverse) {
        (HatAction::T1, false) => vec![("a0", &q * &a0), ("a1", a1.checked_div(&q)?), ("x", x.checked_div(&q)?)],
        (HatAction::T1, true) => vec![("a0", a0.checked_div(&q)?), ("a1", &q * &a1), ("x", &q * &x)],
        (HatAction::T2, false) => vec![("a1", &q * &a1)],
        (HatAction::T2, true) => vec![("a1", a1.checked_div(&q)?)],
        (HatAction::T3, false) => vec![("a0", a0.checked_div(&q)?)],
        (HatAction::T3, true) => vec![("a0", &q * &a0)],
        (HatAction::T4, false) => vec![("lambda", &q * &lambda)],
        (HatAction::T4, true) => vec![("lambda", lambda.checked_div(&q)?)],
        // (a0, a1) ↦ (a0 a2, a1 a2/q) = (q/a1, 1/a0)
        (HatAction::R1, false) => vec![("a0", q.checked_div(&a1)?), ("a1", a0.inv()?)],
        (HatAction::R1, true) => vec![("a0", a1.inv()?), ("a1", q.checked_div(&a0)?)],
    };
    e.subs(&bindings)
}

/// Applies a word right to left: `[A, B]` means `A∘B`, so `B` acts first.
pub fn act_word(word: &[(HatAction, bool)], e: &RationalExpr) -> Result<RationalExpr, FieldError> {
    word.iter().rev().try_fold(e.clone(), |acc, &(a, inv)| act_on_expr(a, inv, &acc))
}

/// One-step ratio `h(l+ε_i)/h(l)` of the gauge: `i` for directions 1 and 3,
/// `i q^{l4} λ` for direction 2, `i q^{l2} β̂` for direction 4.
pub fn gauge_ratio<F: Field>(dir: usize, l: &LatticePoint, rp: &ReducedParameters<F>) -> Result<F, FieldError> {
    let i = F::imag_unit();
    Ok(match dir {
        2 => i * rp.q.powi(l.coord(4) as i32)? * rp.lambda.clone(),
        4 => i * rp.q.powi(l.coord(2) as i32)? * rp.beta.clone(),
        _ => i,
    })
}

/// `h(l)` normalized by `h(0) = 1`, as a product of one-step ratios along
/// directions 4, 1, 2, 3 in turn.
pub fn gauge<F: Field>(l: &LatticePoint, rp: &ReducedParameters<F>) -> Result<F, FieldError> {
    let mut cur = LatticePoint::ORIGIN;
    let mut h = F::one();
    for dir in [4, 1, 2, 3] {
        while cur.coord(dir) < l.coord(dir) {
            h = h * gauge_ratio(dir, &cur, rp)?;
            cur = cur.shifted(dir, 1);
        }
        while cur.coord(dir) > l.coord(dir) {
            cur = cur.shifted(dir, -1);
            h = h.try_div(&gauge_ratio(dir, &cur, rp)?)?;
        }
    }
    Ok(h)
}

/// `ρ_i(l+ε_j) ρ_j(l) = ρ_j(l+ε_i) ρ_i(l)` for all pairs and every `l` in
/// `{-1, 0, 1, 2}^4`.
pub fn cocycle_holds<F: Field + PartialEq>(rp: &ReducedParameters<F>) -> Result<bool, FieldError> {
    let grid = LatticeBox::new(LatticePoint::new(-1, -1, -1, -1), [4; 4]);
    for l in grid.points() {
        for i in 1..=4 {
            for j in (i + 1)..=4 {
                let lhs = gauge_ratio(i, &l.shifted(j, 1), rp)? * gauge_ratio(j, &l, rp)?;
                let rhs = gauge_ratio(j, &l.shifted(i, 1), rp)? * gauge_ratio(i, &l, rp)?;
                if lhs != rhs {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// The reduced equation of `pair` at `l` in polynomial form, evaluated at
/// `[ω(l), ω(l+ε_i), ω(l+ε_j), ω(l+ε_i+ε_j)]`. Multi-affine in the four
/// values; the coefficients depend on `l` only modulo `ε1+ε2+ε3`.
pub fn reduced_residual<F: Field>(
    pair: Pair,
    w: &[F; 4],
    l: &LatticePoint,
    rp: &ReducedParameters<F>,
) -> Result<F, FieldError> {
    let [w0, wi, wj, wij] = w.clone();
    let (l1, l2, l3, l4) = (l.coord(1) as i32, l.coord(2) as i32, l.coord(3) as i32, l.coord(4) as i32);
    let q = |n: i32| rp.q.powi(n);
    let (a0, a1, a2) = (rp.a0()?, rp.a1()?, rp.a2()?);
    let ql = q(l4)? * rp.lambda.clone();
    let big_l = q(2 * l4 + 1)? * rp.lambda.clone() * rp.lambda.clone();
    Ok(match (pair.i, pair.j) {
        (1, 2) => {
            let c = q(l2 - l1)? * a1;
            wij * ql.clone() * (ql.clone() * wj.clone() - c.clone() * wi.clone()) - w0 * (wi - c * ql * wj)
        }
        (2, 3) => {
            let c = q(l3 - l2)? * a2;
            wij * ql.clone() * (wj.clone() - c.clone() * ql.clone() * wi.clone()) - w0 * (ql * wi - c * wj)
        }
        (3, 1) => {
            let c = q(l1 - l3 - 1)? * a0;
            wij * (wj.clone() - c.clone() * wi.clone()) - w0 * (wi - c * wj)
        }
        (1, 4) => {
            let c = (big_l - F::one()).try_div(&(q(l2 - l1 + l4)? * a1 * rp.lambda.clone()))?;
            wij * wi.clone() - w0.clone() * wj - c * w0 * wi
        }
        (2, 4) => {
            let s = big_l.inv()?;
            let c = (big_l.clone() - F::one()).try_div(&big_l)?;
            wij * wi.clone() - s * w0.clone() * wj - c * w0 * wi
        }
        _ => {
            let c = q(l3 - l2)? * a2 * (big_l - F::one()).try_div(&ql)?;
            wij * wi.clone() - w0.clone() * wj - c * w0 * wi
        }
    })
}

/// Solves the reduced equation for the one missing value among
/// `[ω(l), ω(l+ε_i), ω(l+ε_j), ω(l+ε_i+ε_j)]`.
pub fn solve_reduced<F: Field>(
    pair: Pair,
    w: &[Option<F>; 4],
    l: &LatticePoint,
    rp: &ReducedParameters<F>,
) -> Result<F, ReductionError> {
    let target = w.iter().position(Option::is_none).ok_or(ReductionError::MissingValue(*l))?;
    let mut at: [F; 4] = std::array::from_fn(|k| w[k].clone().unwrap_or_else(F::zero));
    let b = reduced_residual(pair, &at, l, rp)?;
    at[target] = F::one();
    let a = reduced_residual(pair, &at, l, rp)? - b.clone();
    if a.is_zero() {
        return Err(ReductionError::SingularStep { point: *l, pair });
    }
    Ok((-b).try_div(&a)?)
}

/// `ω(l+ε_i+ε_j)` from `[ω(l), ω(l+ε_i), ω(l+ε_j)]`.
pub fn reduced_step<F: Field>(
    pair: Pair,
    w: &[F; 3],
    l: &LatticePoint,
    rp: &ReducedParameters<F>,
) -> Result<F, ReductionError> {
    let [a, b, c] = w.clone();
    solve_reduced(pair, &[Some(a), Some(b), Some(c), None], l, rp)
}

/// `f0 = ω(ε1)/ω(ε1+ε2)`, `f1 = λ ω(ε1+ε2)/ω(0)`, `f2 = λ ω(0)/ω(ε1)`.
pub fn f_from_omega<F: Field>(w0: &F, w1: &F, w12: &F, lambda: &F) -> Result<(F, F, F), ReductionError> {
    for (w, name) in [(w0, "ω(0)"), (w1, "ω(ε1)"), (w12, "ω(ε1+ε2)")] {
        if w.is_zero() {
            return Err(ReductionError::ZeroOmega(name));
        }
    }
    Ok((w1.try_div(w12)?, (lambda.clone() * w12.clone()).try_div(w0)?, (lambda.clone() * w0.clone()).try_div(w1)?))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairEquivalence {
    pub pair: Pair,
    /// Base points `l ∈ {0,1}^4` at which the lifted step and the reduced
    /// step agree.
    pub agreeing_points: usize,
    pub checked_points: usize,
    /// The reduced step at `l` and at `l + ε1+ε2+ε3` agree.
    pub periodic: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EquivalenceReport {
    pub pairs: Vec<PairEquivalence>,
    pub cocycle: bool,
    /// Solving the lifted `(1,4)` equation for `K_{l4}` returns the reduced
    /// closed form.
    pub k_forced: bool,
    pub elapsed_ms: u128,
}

impl EquivalenceReport {
    pub fn verified(&self) -> bool {
        self.cocycle
            && self.k_forced
            && self.pairs.iter().all(|p| p.periodic && p.checked_points > 0 && p.agreeing_points == p.checked_points)
    }
}

fn omega_symbols() -> [RationalExpr; 3] {
    ["w", "wi", "wj"].map(RationalExpr::var)
}

/// `u(l+ε_i+ε_j)/h(l+ε_i+ε_j)` with `u = hω` at the three known corners.
fn lifted_step<F: Field>(
    pair: Pair,
    w: &[F; 3],
    l: &LatticePoint,
    rp: &ReducedParameters<F>,
    params: &ParameterSequences<F>,
) -> Result<F, ReductionError> {
    let corners = [*l, l.shifted(pair.i, 1), l.shifted(pair.j, 1)];
    let mut u: [F; 3] = std::array::from_fn(|_| F::zero());
    for k in 0..3 {
        u[k] = gauge(&corners[k], rp)? * w[k].clone();
    }
    let top = l.shifted(pair.i, 1).shifted(pair.j, 1);
    Ok(step_equation(pair, &u, l, params)?.try_div(&gauge(&top, rp)?)?)
}

/// Symbolic check that the lifted equations with the reduced parameters,
/// the gauge and periodicity are equivalent to the reduced equations, for
/// every pair at every `l ∈ {0,1}^4`.
pub fn reduction_equivalence(exec: Execution) -> Result<EquivalenceReport, ReductionError> {
    let start = Instant::now();
    let rp = ReducedParameters::symbolic();
    let params = rp.sequences();
    let cell = LatticeBox::at_origin([2; 4]).points();
    let w = omega_symbols();
    let period = LatticePoint::new(1, 1, 1, 0);
    let pairs = map_range(exec, PAIRS.len(), |k| -> Result<PairEquivalence, ReductionError> {
        let pair = PAIRS[k];
        let mut agreeing = 0;
        let mut periodic = true;
        for l in &cell {
            let reduced = reduced_step(pair, &w, l, &rp)?;
            if lifted_step(pair, &w, l, &rp, &params)? == reduced {
                agreeing += 1;
            }
            periodic &= reduced_step(pair, &w, &l.plus(&period), &rp)? == reduced;
        }
        Ok(PairEquivalence { pair, agreeing_points: agreeing, checked_points: cell.len(), periodic })
    })
    .into_iter()
    .collect::<Result<Vec<_>, _>>()?;
    Ok(EquivalenceReport {
        pairs,
        cocycle: cocycle_holds(&rp)?,
        k_forced: k_is_forced(&rp)?,
        elapsed_ms: start.elapsed().as_millis(),
    })
}

/// Replaces `K_{l4}` by a free symbol in the lifted `(1,4)` equation and
/// solves for it against the reduced step, at `l4 ∈ {0, 1}`.
fn k_is_forced(rp: &ReducedParameters<RationalExpr>) -> Result<bool, ReductionError> {
    let w = omega_symbols();
    let pair = Pair { i: 1, j: 4 };
    let kfree = crate::exactfield::Symbol::new("Kfree");
    for l4 in [0, 1] {
        let l = LatticePoint::new(0, 0, 0, l4);
        let mut tables: [BTreeMap<i64, RationalExpr>; 4] = Default::default();
        let seq = rp.sequences();
        tables[0].insert(0, seq.alpha(0)?);
        tables[3].insert(l4, RationalExpr::symbol(kfree));
        let free = ParameterSequences::table(tables);
        let lifted = lifted_step(pair, &w, &l, rp, &free)?;
        let reduced = reduced_step(pair, &w, &l, rp)?;
        let diff = &lifted - &reduced;
        let c = diff.coefficients_in(kfree)?;
        let [c0, c1] = c.as_slice() else { return Ok(false) };
        let solved = -(c0.checked_div(c1)?);
        if solved != seq.k(l4)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Audit of a reduced ω evolution: faces with all four values known must
/// satisfy their equation.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OmegaAudit {
    pub filled: usize,
    pub faces_checked: usize,
    pub disagreements: usize,
    pub singular_steps: Vec<SingularEvent>,
    pub consistent: bool,
}

/// The reduced ω-lattice on the quotient by `ε1+ε2+ε3`: values are stored
/// at representatives with `l1 = 0`, in the window `|l2|, |l3| ≤ radius`,
/// `0 ≤ l4 < levels`.
#[derive(Clone, Debug)]
pub struct OmegaLattice<F> {
    pub rp: ReducedParameters<F>,
    pub patch: LatticePatch<F>,
    pub radius: i64,
    pub levels: i64,
}

fn e(v: [i64; 4]) -> LatticePoint {
    LatticePoint(v)
}

impl<F: Field + PartialEq> OmegaLattice<F> {
    fn in_window(&self, l: &LatticePoint) -> bool {
        let r = l.periodic_representative();
        r.coord(2).abs() <= self.radius && r.coord(3).abs() <= self.radius && (0..self.levels).contains(&r.coord(4))
    }

    fn get(&self, l: &LatticePoint) -> Option<F> {
        self.patch.get(l).cloned()
    }

    /// Evolves from `ω(0), ω(ε1), ω(ε1+ε2)` at level 0. Each new level is
    /// seeded by the value `ω(ε4)` that closes the chain of `(1,4)`,
    /// `(2,4)`, `(3,4)` faces around `ε1+ε2+ε3`; all other values come from
    /// single-unknown solves of the six reduced equations.
    pub fn evolve(
        rp: ReducedParameters<F>,
        init: [F; 3],
        levels: usize,
        radius: i64,
    ) -> Result<(Self, OmegaAudit), ReductionError> {
        let mut patch = LatticePatch::new(PatchKind::ReducedOmega, rp.sequences());
        let [w0, w1, w12] = init;
        patch.insert(LatticePoint::ORIGIN, w0);
        patch.insert(e([1, 0, 0, 0]), w1);
        patch.insert(e([1, 1, 0, 0]), w12);
        let mut lat = OmegaLattice { rp, patch, radius, levels: levels as i64 };
        let mut audit =
            OmegaAudit { filled: 3, faces_checked: 0, disagreements: 0, singular_steps: Vec::new(), consistent: true };
        for n in 0..lat.levels {
            if n > 0 {
                let seed = lat.closure(n - 1)?;
                lat.patch.insert(e([0, 0, 0, n]), seed);
                audit.filled += 1;
            }
            lat.saturate(&mut audit)?;
        }
        audit.consistent = audit.disagreements == 0;
        Ok((lat, audit))
    }

    fn faces(&self) -> Vec<(Pair, LatticePoint)> {
        let mut out = Vec::new();
        for l4 in 0..self.levels {
            for l2 in -self.radius..=self.radius {
                for l3 in -self.radius..=self.radius {
                    let l = e([0, l2, l3, l4]);
                    for pair in PAIRS {
                        let corners = [l, l.shifted(pair.i, 1), l.shifted(pair.j, 1), l.shifted(pair.i, 1).shifted(pair.j, 1)];
                        if corners.iter().all(|c| self.in_window(c)) {
                            out.push((pair, l));
                        }
                    }
                }
            }
        }
        out
    }

    fn saturate(&mut self, audit: &mut OmegaAudit) -> Result<(), ReductionError> {
        let faces = self.faces();
        let mut done = vec![false; faces.len()];
        loop {
            let mut progress = false;
            for (k, (pair, l)) in faces.iter().enumerate() {
                if done[k] {
                    continue;
                }
                let corners = [*l, l.shifted(pair.i, 1), l.shifted(pair.j, 1), l.shifted(pair.i, 1).shifted(pair.j, 1)];
                let w = corners.map(|c| self.get(&c));
                match w.iter().filter(|v| v.is_none()).count() {
                    0 => {
                        let vals = w.map(|v| v.unwrap_or_else(F::zero));
                        audit.faces_checked += 1;
                        if !reduced_residual(*pair, &vals, l, &self.rp)?.is_zero() {
                            audit.disagreements += 1;
                        }
                        done[k] = true;
                    }
                    1 => {
                        let target = w.iter().position(Option::is_none).unwrap_or(0);
                        match solve_reduced(*pair, &w, l, &self.rp) {
                            Ok(v) => {
                                self.patch.insert(corners[target], v);
                                audit.filled += 1;
                                progress = true;
                            }
                            Err(ReductionError::SingularStep { point, pair }) => {
                                audit.singular_steps.push(SingularEvent { point, pair });
                                done[k] = true;
                            }
                            Err(other) => return Err(other),
                        }
                    }
                    _ => {}
                }
            }
            if !progress {
                return Ok(());
            }
        }
    }

    /// `ω(ε4)` at level `n+1` from `ω(0), ω(ε1), ω(ε1+ε2)` at level `n`.
    fn closure(&self, n: i64) -> Result<F, ReductionError> {
        let at = |v: [i64; 4]| -> Result<F, ReductionError> {
            let l = e([v[0], v[1], v[2], v[3] + n]);
            self.get(&l).ok_or(ReductionError::MissingValue(l))
        };
        let (w0, w1, w12) = (at([0, 0, 0, 0])?, at([1, 0, 0, 0])?, at([1, 1, 0, 0])?);
        let chain = |x: F| -> Result<F, ReductionError> {
            let p = |i, j| Pair { i, j };
            let a = reduced_step(p(1, 4), &[w0.clone(), w1.clone(), x], &e([0, 0, 0, n]), &self.rp)?;
            let b = reduced_step(p(2, 4), &[w1.clone(), w12.clone(), a], &e([1, 0, 0, n]), &self.rp)?;
            reduced_step(p(3, 4), &[w12.clone(), w0.clone(), b], &e([1, 1, 0, n]), &self.rp)
        };
        // the chain is affine in the seed
        let b = chain(F::zero())?;
        let a = chain(F::one())? - b.clone();
        let den = F::one() - a;
        if den.is_zero() {
            return Err(ReductionError::ClosureSingular(n + 1));
        }
        Ok(b.try_div(&den)?)
    }

    /// `(f0, f1, f2)` at level `n`, with `λ → q^n λ`.
    pub fn f_at_level(&self, n: i64) -> Result<(F, F, F), ReductionError> {
        let at = |v: [i64; 4]| {
            let l = e([v[0], v[1], v[2], n]);
            self.get(&l).ok_or(ReductionError::MissingValue(l))
        };
        let lambda = self.rp.q.powi(n as i32)? * self.rp.lambda.clone();
        f_from_omega(&at([0, 0, 0, 0])?, &at([1, 0, 0, 0])?, &at([1, 1, 0, 0])?, &lambda)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LiftReport {
    pub faces_checked: usize,
    pub failures: Vec<SingularEvent>,
    pub missing: usize,
    pub consistent: bool,
}

/// Lifts `u = hω` on `bx` and checks every face of the Z^4 system whose four
/// corners lie in the box, with the reduced parameter sequences.
pub fn lift_check<F: Field + PartialEq>(omega: &LatticePatch<F>, bx: &LatticeBox) -> Result<LiftReport, ReductionError> {
    omega.check_periodicity().map_err(|err| match err {
        LatticeError::PeriodicityViolation(l) => ReductionError::PeriodicityViolation(l),
        other => other.into(),
    })?;
    let rp = ReducedParameters::of_sequences(&omega.params)?;
    let params = rp.sequences();
    let mut u = LatticePatch::new(PatchKind::UnreducedU, params.clone());
    let mut missing = 0;
    for l in bx.points() {
        match omega.get(&l) {
            Some(w) => u.insert(l, gauge(&l, &rp)? * w.clone()),
            None => missing += 1,
        }
    }
    let mut report = LiftReport { faces_checked: 0, failures: Vec::new(), missing, consistent: true };
    for l in bx.points() {
        for pair in PAIRS {
            let top = l.shifted(pair.i, 1).shifted(pair.j, 1);
            if !bx.contains(&top) {
                continue;
            }
            let face = face_equation(pair, &l, &params, None)?;
            match face.residual(&u) {
                Ok(r) => {
                    report.faces_checked += 1;
                    if !r.is_zero() {
                        report.failures.push(SingularEvent { point: l, pair });
                    }
                }
                Err(LatticeError::MissingValue(_)) => {}
                Err(other) => return Err(other.into()),
            }
        }
    }
    report.consistent = report.failures.is_empty() && report.missing == 0;
    Ok(report)
}

/// Random exact reduced parameters and level-0 data.
pub fn random_reduced_instance(seed: u64, index: u64) -> (ReducedParameters<GaussianRational>, [GaussianRational; 3]) {
    let mut s = ExactSampler::stream(seed, index);
    let rp = ReducedParameters {
        alpha: s.nonzero_rational(),
        beta: s.nonzero_rational(),
        gamma: s.nonzero_rational(),
        lambda: s.nonzero_rational(),
        q: s.nonzero_rational(),
    };
    (rp, [s.nonzero_rational(), s.nonzero_rational(), s.nonzero_rational()])
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LiftSummary {
    pub instances: usize,
    pub lifted: usize,
    pub evolution_consistent: usize,
    pub faces_checked: usize,
    /// One stored value moved off its periodic class is rejected.
    pub broken_periodicity_rejected: bool,
}

impl LiftSummary {
    pub fn verified(&self) -> bool {
        self.instances > 0
            && self.lifted == self.instances
            && self.evolution_consistent == self.instances
            && self.broken_periodicity_rejected
    }
}

/// Evolves `n` random ω-patches, lifts each on the box `{0,1}^3 × {0,1}`
/// (stored through the periodic representatives) and checks the Z^4 system.
pub fn lift_random(n: usize, seed: u64, exec: Execution) -> Result<LiftSummary, ReductionError> {
    let bx = LatticeBox::at_origin([2; 4]);
    let results = map_range(exec, n, |k| -> Result<(bool, bool, usize), ReductionError> {
        let (rp, init) = random_reduced_instance(seed, k as u64);
        let (lat, audit) = OmegaLattice::evolve(rp, init, 2, 2)?;
        let lift = lift_check(&lat.patch, &bx)?;
        Ok((lift.consistent, audit.consistent, lift.faces_checked))
    });
    let mut summary =
        LiftSummary { instances: n, lifted: 0, evolution_consistent: 0, faces_checked: 0, broken_periodicity_rejected: false };
    for r in results {
        let (lifted, consistent, faces) = r?;
        summary.lifted += usize::from(lifted);
        summary.evolution_consistent += usize::from(consistent);
        summary.faces_checked += faces;
    }
    let (rp, init) = random_reduced_instance(seed, 0);
    let (lat, _) = OmegaLattice::evolve(rp, init, 2, 2)?;
    let mut broken = lat.patch.clone();
    let v = broken.require(&LatticePoint::ORIGIN)?.clone();
    broken.insert_raw(LatticePoint::new(1, 1, 1, 0), v + GaussianRational::one());
    summary.broken_periodicity_rejected = matches!(lift_check(&broken, &bx), Err(ReductionError::PeriodicityViolation(_)));
    Ok(summary)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BridgeReport {
    pub instances: usize,
    pub steps: usize,
    /// Instances whose every level matches one IV step of the previous one.
    pub matching_instances: usize,
    pub base_point_instances: usize,
}

impl BridgeReport {
    pub fn verified(&self) -> bool {
        self.instances > 0 && self.matching_instances == self.instances
    }
}

/// Evolves ω in the ε4 direction and compares `f` at consecutive levels with
/// the IV map.
pub fn bridge_instance<F: Field + PartialEq>(
    rp: ReducedParameters<F>,
    init: [F; 3],
    steps: usize,
) -> Result<Vec<bool>, ReductionError> {
    let (lat, _) = OmegaLattice::evolve(rp.clone(), init, steps + 1, 1)?;
    let (a0, a1) = (rp.a0()?, rp.a1()?);
    let mut out = Vec::with_capacity(steps);
    for n in 0..steps as i64 {
        let (f0, f1, _) = lat.f_at_level(n)?;
        let lambda = rp.q.powi(n as i32)? * rp.lambda.clone();
        let c = PainleveConfig::new(f0, f1, a0.clone(), a1.clone(), lambda, rp.q.clone())?;
        let (g0, g1, g2) = lat.f_at_level(n + 1)?;
        out.push(match step(MapId::IV, &c, &StepOptions::default()) {
            Ok(next) => next.f0 == g0 && next.f1 == g1 && next.f2 == g2,
            Err(_) => false,
        });
    }
    Ok(out)
}

pub fn bridge_random(n: usize, steps: usize, seed: u64, exec: Execution) -> Result<BridgeReport, ReductionError> {
    let results = map_range(exec, n, |k| {
        let (rp, init) = random_reduced_instance(seed, k as u64);
        bridge_instance(rp, init, steps)
    });
    let mut report = BridgeReport { instances: n, steps, matching_instances: 0, base_point_instances: 0 };
    for r in results {
        match r {
            Ok(v) => report.matching_instances += usize::from(v.len() == steps && v.iter().all(|&b| b)),
            Err(ReductionError::SingularStep { .. } | ReductionError::ClosureSingular(_) | ReductionError::ZeroOmega(_)) => {
                report.base_point_instances += 1
            }
            Err(other) => return Err(other),
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(n: i64) -> GaussianRational {
        GaussianRational::from_integer(n)
    }

    #[test]
    fn gauge_ratio_examples() {
        let rp = ReducedParameters { alpha: g(2), beta: g(3), gamma: g(5), lambda: g(7), q: g(11) };
        let i = GaussianRational::i();
        let l = LatticePoint::new(4, 0, -2, 0);
        assert_eq!(gauge_ratio(1, &l, &rp).unwrap(), i);
        assert_eq!(gauge_ratio(2, &l, &rp).unwrap(), &i * &g(7));
        assert_eq!(gauge_ratio(4, &l, &rp).unwrap(), &i * &g(3));
    }

    #[test]
    fn f_from_omega_examples() {
        let (f0, f1, f2) = f_from_omega(&g(1), &g(1), &g(1), &g(1)).unwrap();
        assert_eq!((f0, f1, f2), (g(1), g(1), g(1)));
        let (f0, f1, f2) = f_from_omega(&g(1), &g(2), &g(4), &g(1)).unwrap();
        assert_eq!((f0.clone(), f1.clone(), f2.clone()), (GaussianRational::from_ratio(1, 2), g(4), GaussianRational::from_ratio(1, 2)));
        assert_eq!(&(&f0 * &f1) * &f2, g(1));
        assert_eq!(f_from_omega(&g(0), &g(1), &g(1), &g(1)).unwrap_err(), ReductionError::ZeroOmega("ω(0)"));
    }

    #[test]
    fn omega_one_satisfies_the_31_equation() {
        // a0 = q when α̂ = γ̂
        let rp = ReducedParameters { alpha: g(2), beta: g(3), gamma: g(2), lambda: g(5), q: g(7) };
        let pair = Pair { i: 3, j: 1 };
        let ones = [g(1), g(1), g(1), g(1)];
        assert!(reduced_residual(pair, &ones, &LatticePoint::ORIGIN, &rp).unwrap().is_zero());
        let err = reduced_step(pair, &[g(1), g(1), g(1)], &LatticePoint::ORIGIN, &rp).unwrap_err();
        assert!(matches!(err, ReductionError::SingularStep { .. }));
    }
}
