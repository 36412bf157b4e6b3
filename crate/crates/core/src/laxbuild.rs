//! The fifth-direction extension of the Z^4 system: Riccati updates, the
//! per-direction 2×2 Lax matrices and their compatibility residuals.
//!
//! Steps act on the left, `T_i(Ψ) = δ_i L_i Ψ`, and the residual of a pair is
//! `T_i(δ_j L_j) δ_i L_i − T_j(δ_i L_i) δ_j L_j`.

use std::time::Instant;

use serde::Serialize;
use thiserror::Error;

use crate::exactfield::{Field, FieldError, RationalExpr, Symbol};
use crate::lattice4d::{step_equation, LatticeError, LatticePatch, LatticePoint, Pair, ParameterSequences, PatchKind, PAIRS};
use crate::matrix::Matrix2;
use crate::parallel::{map_range, Execution};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LaxBuildError {
    #[error("zero denominator in {0}")]
    ZeroDenominator(&'static str),
    #[error("no decoupling rule of this kind for direction {0}")]
    InvalidDelta(usize),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

pub const MU: &str = "mu";

fn nonzero<F: Field>(v: F, what: &'static str) -> Result<F, LaxBuildError> {
    if v.is_zero() {
        Err(LaxBuildError::ZeroDenominator(what))
    } else {
        Ok(v)
    }
}

/// The δ-free matrix of direction `dir` at `l`:
/// `[[μ/p, −u_i], [1/u, −(μ/p) u_i/u]]` for `dir ≤ 3` with `p` the direction
/// parameter, and `[[−μK, −u_4], [1/u, 0]]` for `dir = 4`.
pub fn direction_matrix<F: Field>(
    dir: usize,
    l: &LatticePoint,
    patch: &LatticePatch<F>,
    mu: &F,
) -> Result<Matrix2<F>, LaxBuildError> {
    let u = nonzero(patch.require(l)?.clone(), "u(l)")?;
    let ui = patch.require(&l.shifted(dir, 1))?.clone();
    let inv_u = u.inv()?;
    if dir == 4 {
        let k = patch.params.k(l.coord(4))?;
        return Ok(Matrix2::new(-(mu.clone() * k), -ui, inv_u, F::zero()));
    }
    let p = nonzero(patch.params.at(dir, l)?, "direction parameter")?;
    let m = mu.try_div(&p)?;
    Ok(Matrix2::new(m.clone(), -ui.clone(), inv_u.clone(), -(m * ui * inv_u)))
}

/// How a decoupling factor depends on the lattice point.
#[derive(Clone, Debug, PartialEq)]
pub enum DeltaRule<F> {
    One,
    /// `1/(1 − μ²/p²)` with `p` the direction parameter at `l`.
    Spectral,
    /// The spectral factor (or 1 in direction 4) times `ratio^{l_along}`.
    Tilted { along: usize, ratio: F },
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecouplingFactors<F> {
    pub rules: [DeltaRule<F>; 4],
}

impl<F: Field> DecouplingFactors<F> {
    /// `δ_1, δ_2, δ_3` spectral, `δ_4 = 1`.
    pub fn standard() -> Self {
        DecouplingFactors { rules: [DeltaRule::Spectral, DeltaRule::Spectral, DeltaRule::Spectral, DeltaRule::One] }
    }

    pub fn trivial() -> Self {
        DecouplingFactors { rules: [DeltaRule::One, DeltaRule::One, DeltaRule::One, DeltaRule::One] }
    }

    fn spectral(dir: usize, l: &LatticePoint, params: &ParameterSequences<F>, mu: &F) -> Result<F, LaxBuildError> {
        if dir == 4 {
            return Err(LaxBuildError::InvalidDelta(dir));
        }
        let m = mu.try_div(&nonzero(params.at(dir, l)?, "direction parameter")?)?;
        let d = nonzero(F::one() - m.clone() * m, "spectral decoupling factor")?;
        Ok(d.inv()?)
    }

    pub fn delta(&self, dir: usize, l: &LatticePoint, params: &ParameterSequences<F>, mu: &F) -> Result<F, LaxBuildError> {
        match &self.rules[dir - 1] {
            DeltaRule::One => Ok(F::one()),
            DeltaRule::Spectral => Self::spectral(dir, l, params, mu),
            DeltaRule::Tilted { along, ratio } => {
                let base = if dir == 4 { F::one() } else { Self::spectral(dir, l, params, mu)? };
                Ok(base * ratio.powi(l.coord(*along) as i32)?)
            }
        }
    }

    /// `T_i(δ_j) δ_i − T_j(δ_i) δ_j` at `l`.
    pub fn constraint(&self, i: usize, j: usize, l: &LatticePoint, params: &ParameterSequences<F>, mu: &F) -> Result<F, LaxBuildError> {
        let lhs = self.delta(j, &l.shifted(i, 1), params, mu)? * self.delta(i, l, params, mu)?;
        let rhs = self.delta(i, &l.shifted(j, 1), params, mu)? * self.delta(j, l, params, mu)?;
        Ok(lhs - rhs)
    }
}

/// `T_i(δ_j L_j) δ_i L_i − T_j(δ_i L_i) δ_j L_j` at `l`.
pub fn lax_residual_4d<F: Field>(
    i: usize,
    j: usize,
    l: &LatticePoint,
    patch: &LatticePatch<F>,
    mu: &F,
    delta: &DecouplingFactors<F>,
) -> Result<Matrix2<F>, LaxBuildError> {
    let (li, lj) = (l.shifted(i, 1), l.shifted(j, 1));
    let p = &patch.params;
    let left = direction_matrix(j, &li, patch, mu)?.mul(&direction_matrix(i, l, patch, mu)?);
    let right = direction_matrix(i, &lj, patch, mu)?.mul(&direction_matrix(j, l, patch, mu)?);
    let dl = delta.delta(j, &li, p, mu)? * delta.delta(i, l, p, mu)?;
    let dr = delta.delta(i, &lj, p, mu)? * delta.delta(j, l, p, mu)?;
    Ok(left.scale(&dl).sub(&right.scale(&dr)))
}

/// The Riccati update of `ū` in direction `dir`:
/// `ū(l+ε_i) = −u (p u_i − μ ū)/(p ū − μ u_i)` for `dir ≤ 3`, and
/// `ū(l+ε_4) = −u (μ K ū + u_4)/ū`.
pub fn riccati_update<F: Field>(
    dir: usize,
    l: &LatticePoint,
    patch: &LatticePatch<F>,
    mu: &F,
    ubar: &F,
) -> Result<F, LaxBuildError> {
    let u = patch.require(l)?.clone();
    let ui = patch.require(&l.shifted(dir, 1))?.clone();
    if dir == 4 {
        let k = patch.params.k(l.coord(4))?;
        let num = mu.clone() * k * ubar.clone() + ui;
        return Ok(-(u * num.try_div(ubar)?));
    }
    let p = patch.params.at(dir, l)?;
    let num = p.clone() * ui.clone() - mu.clone() * ubar.clone();
    let den = nonzero(p * ubar.clone() - mu.clone() * ui, "Riccati denominator")?;
    Ok(-(u * num.try_div(&den)?))
}

/// `(m11 ū + m12)/(m21 ū + m22)`.
pub fn projective_action<F: Field>(m: &Matrix2<F>, ubar: &F) -> Result<F, LaxBuildError> {
    let [num, den] = m.apply(&[ubar.clone(), F::one()]);
    Ok(num.try_div(&nonzero(den, "projective action")?)?)
}

/// `Ψ = (F, G)` with `ū = F/G`.
#[derive(Clone, Debug, PartialEq)]
pub struct WaveVector<F> {
    pub f: F,
    pub g: F,
}

impl<F: Field> WaveVector<F> {
    pub fn ratio(&self) -> Result<F, LaxBuildError> {
        Ok(self.f.try_div(&nonzero(self.g.clone(), "wave vector G")?)?)
    }

    /// `δ L Ψ`.
    pub fn step(&self, delta: &F, m: &Matrix2<F>) -> Self {
        let [f, g] = m.scale(delta).apply(&[self.f.clone(), self.g.clone()]);
        WaveVector { f, g }
    }
}

/// Vertex symbols of the unit cell: `u` at `l`, `u1..u4` at `l + ε_k`.
pub fn cell_symbols() -> [RationalExpr; 5] {
    ["u", "u1", "u2", "u3", "u4"].map(RationalExpr::var)
}

/// The unit cell at `l` with free values at `l` and `l + ε_k`, and each
/// `u(l + ε_i + ε_j)` solved from its equation. With `free_corner = Some(p)`,
/// the corner of pair `p` is left as the symbol `w`.
pub fn symbolic_cell(
    l: &LatticePoint,
    params: &ParameterSequences<RationalExpr>,
    free_corner: Option<Pair>,
) -> Result<LatticePatch<RationalExpr>, LaxBuildError> {
    let [u, u1, u2, u3, u4] = cell_symbols();
    let mut patch = LatticePatch::new(PatchKind::UnreducedU, params.clone());
    patch.insert(*l, u);
    for (k, v) in [u1, u2, u3, u4].into_iter().enumerate() {
        patch.insert(l.shifted(k + 1, 1), v);
    }
    for pair in PAIRS {
        let corner = l.shifted(pair.i, 1).shifted(pair.j, 1);
        let v = if free_corner == Some(pair) {
            RationalExpr::var("w")
        } else {
            let known = [*l, l.shifted(pair.i, 1), l.shifted(pair.j, 1)].map(|p| patch.require(&p).cloned());
            let [a, b, c] = known;
            step_equation(pair, &[a?, b?, c?], l, params)?
        };
        patch.insert(corner, v);
    }
    Ok(patch)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairCheck {
    pub pair: Pair,
    pub residual_zero: bool,
    pub delta_constraint: bool,
    /// Solving the residual for a free corner reproduces the equation.
    pub free_solve_matches: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DirectionCheck {
    pub direction: usize,
    pub mu_degree: u32,
    pub leading_diagonal: bool,
    pub constant_antidiagonal: bool,
    pub leading_invertible: bool,
    pub constant_invertible: bool,
    pub riccati_matches: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Lax4dReport {
    pub pairs: Vec<PairCheck>,
    pub directions: Vec<DirectionCheck>,
    /// With `δ_1` depending on `l_2`, the constraint and the `(1,2)` residual
    /// are nonzero.
    pub perturbed_rejected: bool,
    /// The standard factors at `l = 0` under `α_l = q^l α̂, …`, `μ = α̂ x`
    /// equal `1/(1−x²)`, `1/(1−q⁻²a₀²a₂²x²)`, `1/(1−q⁻²a₀²x²)`, `1`.
    pub reduced_defaults_match: bool,
    pub elapsed_ms: u128,
}

impl Lax4dReport {
    /// The leading matrix of direction 4 is `diag(−K, 0)`, so its
    /// invertibility is reported but not required.
    pub fn verified(&self) -> bool {
        self.pairs.iter().all(|p| p.residual_zero && p.delta_constraint && p.free_solve_matches)
            && self.directions.iter().all(|d| {
                d.mu_degree <= 1
                    && d.leading_diagonal
                    && d.constant_antidiagonal
                    && d.constant_invertible
                    && d.riccati_matches
                    && (d.direction == 4 || d.leading_invertible)
            })
            && self.perturbed_rejected
            && self.reduced_defaults_match
    }
}

fn solve_linear(e: &RationalExpr, s: Symbol) -> Result<Option<RationalExpr>, FieldError> {
    let c = e.coefficients_in(s)?;
    match c.as_slice() {
        [c0, c1] if !c1.is_zero() => Ok(Some(-(c0.checked_div(c1)?))),
        _ => Ok(None),
    }
}

fn check_pair(pair: Pair, l: &LatticePoint, params: &ParameterSequences<RationalExpr>) -> Result<PairCheck, LaxBuildError> {
    let mu = RationalExpr::var(MU);
    let delta = DecouplingFactors::standard();
    let cell = symbolic_cell(l, params, None)?;
    let residual = lax_residual_4d(pair.i, pair.j, l, &cell, &mu, &delta)?;
    let constraint = delta.constraint(pair.i, pair.j, l, params, &mu)?;

    let open = symbolic_cell(l, params, Some(pair))?;
    let free = lax_residual_4d(pair.i, pair.j, l, &open, &mu, &DecouplingFactors::trivial())?;
    let corner = l.shifted(pair.i, 1).shifted(pair.j, 1);
    let expected = cell.require(&corner)?;
    let w = Symbol::new("w");
    let mut solved = 0;
    let mut agree = true;
    for (_, _, e) in free.entries() {
        if let Some(v) = solve_linear(e, w)? {
            solved += 1;
            agree &= &v == expected;
        }
    }
    Ok(PairCheck {
        pair,
        residual_zero: residual.is_zero(),
        delta_constraint: constraint.is_zero(),
        free_solve_matches: solved > 0 && agree,
    })
}

fn check_direction(dir: usize, l: &LatticePoint, params: &ParameterSequences<RationalExpr>) -> Result<DirectionCheck, LaxBuildError> {
    let mu_sym = Symbol::new(MU);
    let mu = RationalExpr::symbol(mu_sym);
    let cell = symbolic_cell(l, params, None)?;
    let m = direction_matrix(dir, l, &cell, &mu)?;
    let coeff = |k: usize| -> Result<Matrix2<RationalExpr>, FieldError> {
        m.try_map(|e| Ok(e.coefficients_in(mu_sym)?.get(k).cloned().unwrap_or_else(RationalExpr::zero)))
    };
    let mu_degree = m.entries().map(|(_, _, e)| e.degree_in(mu_sym)).max().unwrap_or(0);
    let (c0, c1) = (coeff(0)?, coeff(1)?);
    let ubar = RationalExpr::var("ubar");
    let riccati = riccati_update(dir, l, &cell, &mu, &ubar)?;
    Ok(DirectionCheck {
        direction: dir,
        mu_degree,
        leading_diagonal: c1.is_diagonal(),
        constant_antidiagonal: c0.e[0][0].is_zero() && c0.e[1][1].is_zero(),
        leading_invertible: !c1.det().is_zero(),
        constant_invertible: !c0.det().is_zero(),
        riccati_matches: projective_action(&m, &ubar)? == riccati,
    })
}

fn perturbed_rejected(l: &LatticePoint, params: &ParameterSequences<RationalExpr>) -> Result<bool, LaxBuildError> {
    let mu = RationalExpr::var(MU);
    let mut delta = DecouplingFactors::standard();
    delta.rules[0] = DeltaRule::Tilted { along: 2, ratio: RationalExpr::int(2) };
    let cell = symbolic_cell(l, params, None)?;
    let residual = lax_residual_4d(1, 2, l, &cell, &mu, &delta)?;
    let constraint = delta.constraint(1, 2, l, params, &mu)?;
    Ok(!residual.is_zero() && !constraint.is_zero())
}

fn reduced_defaults_match() -> Result<bool, LaxBuildError> {
    let [ah, bh, gh, lambda, q, x] = ["alpha_hat", "beta_hat", "gamma_hat", "lambda", "q", "x"].map(RationalExpr::var);
    let params = ParameterSequences::reduced(ah.clone(), bh.clone(), gh.clone(), lambda, q.clone());
    let mu = &ah * &x;
    let a0 = (&q * &ah).checked_div(&gh)?;
    let a2 = gh.checked_div(&bh)?;
    let one = RationalExpr::one();
    let x2 = &x * &x;
    let q2 = &q * &q;
    let expected = [
        (&one - &x2).inv()?,
        (&one - &(&(&(&a0 * &a0) * &(&a2 * &a2)) * &x2).checked_div(&q2)?).inv()?,
        (&one - &(&(&a0 * &a0) * &x2).checked_div(&q2)?).inv()?,
        one.clone(),
    ];
    let delta = DecouplingFactors::standard();
    for (k, want) in expected.iter().enumerate() {
        if &delta.delta(k + 1, &LatticePoint::ORIGIN, &params, &mu)? != want {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Symbolic 4D Lax verification on the unit cell at `l` with free parameter
/// sequences.
pub fn verify_lax4d(l: &LatticePoint, exec: Execution) -> Result<Lax4dReport, LaxBuildError> {
    let start = Instant::now();
    let params = ParameterSequences::free();
    let pairs = map_range(exec, PAIRS.len(), |k| check_pair(PAIRS[k], l, &params)).into_iter().collect::<Result<Vec<_>, _>>()?;
    let directions =
        map_range(exec, 4, |k| check_direction(k + 1, l, &params)).into_iter().collect::<Result<Vec<_>, _>>()?;
    Ok(Lax4dReport {
        pairs,
        directions,
        perturbed_rejected: perturbed_rejected(l, &params)?,
        reduced_defaults_match: reduced_defaults_match()?,
        elapsed_ms: start.elapsed().as_millis(),
    })
}
