//! The coupled H3/D4 system on Z^4, its translations and the staircase map
//! `R1`, and finite-patch evolution with fill-order audits.
//!
//! Directions are numbered 1..=4 throughout. A patch stores values on a finite
//! set of lattice points; evolution fills a box from data on the four
//! coordinate axes through its lower corner.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize, Serializer};
use thiserror::Error;

use crate::exactfield::{ExactSampler, Field, FieldError, GaussianRational, RationalExpr};
use crate::laxverify::VerifyMode;
use crate::parallel::{map_range, Execution};
use crate::quadcat::{check_cube_consistency, solve_vertex, ConsistencyReport, CubeAssignment, Face, QuadError, QuadKind, Vertex};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LatticeError {
    #[error("singular step: the {pair} equation at {point} has a vanishing denominator")]
    SingularStep { point: LatticePoint, pair: Pair },
    #[error("missing value at {0}")]
    MissingValue(LatticePoint),
    #[error("missing parameter {seq}[{index}]")]
    MissingParameter { seq: Seq, index: i64 },
    #[error("R1 is only defined on the region R, not at {0}")]
    OutOfDomain(LatticePoint),
    #[error("periodicity violated at {0}")]
    PeriodicityViolation(LatticePoint),
    #[error("invalid direction pair ({0}, {1})")]
    InvalidPair(usize, usize),
    #[error("invalid initial data: {0}")]
    InitialData(String),
    #[error("cannot parse {what}: {input:?}")]
    Parse { what: &'static str, input: String },
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Quad(#[from] QuadError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct LatticePoint(pub [i64; 4]);

impl LatticePoint {
    pub const ORIGIN: LatticePoint = LatticePoint([0; 4]);

    pub fn new(l1: i64, l2: i64, l3: i64, l4: i64) -> Self {
        LatticePoint([l1, l2, l3, l4])
    }

    /// The unit vector `ε_dir`. Panics unless `dir ∈ 1..=4`.
    pub fn unit(dir: usize) -> Self {
        LatticePoint::ORIGIN.shifted(dir, 1)
    }

    pub fn coord(&self, dir: usize) -> i64 {
        self.0[dir - 1]
    }

    pub fn shifted(&self, dir: usize, n: i64) -> Self {
        let mut l = *self;
        l.0[dir - 1] += n;
        l
    }

    pub fn plus(&self, other: &LatticePoint) -> Self {
        LatticePoint(std::array::from_fn(|k| self.0[k] + other.0[k]))
    }

    pub fn minus(&self, other: &LatticePoint) -> Self {
        LatticePoint(std::array::from_fn(|k| self.0[k] - other.0[k]))
    }

    pub fn in_r1(&self) -> bool {
        self.0[2] == self.0[1] - 1
    }

    pub fn in_r2(&self) -> bool {
        self.0[2] == self.0[1]
    }

    pub fn in_region(&self) -> bool {
        self.in_r1() || self.in_r2()
    }

    /// Representative of `l` modulo `Z(ε1+ε2+ε3)`, the one with `l1 = 0`.
    pub fn periodic_representative(&self) -> Self {
        let [l1, l2, l3, l4] = self.0;
        LatticePoint([0, l2 - l1, l3 - l1, l4])
    }
}

impl fmt::Display for LatticePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = self.0;
        write!(f, "{a},{b},{c},{d}")
    }
}

impl FromStr for LatticePoint {
    type Err = LatticeError;
    fn from_str(s: &str) -> Result<Self, LatticeError> {
        let bad = || LatticeError::Parse { what: "lattice point", input: s.to_owned() };
        let parts: Vec<i64> =
            s.split(',').map(|p| p.trim().parse::<i64>()).collect::<Result<_, _>>().map_err(|_| bad())?;
        let coords: [i64; 4] = parts.try_into().map_err(|_| bad())?;
        Ok(LatticePoint(coords))
    }
}

impl Serialize for LatticePoint {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// One of the six direction pairs of the system, in its listed orientation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Pair {
    pub i: usize,
    pub j: usize,
}

pub const PAIRS: [Pair; 6] = [
    Pair { i: 1, j: 2 },
    Pair { i: 2, j: 3 },
    Pair { i: 3, j: 1 },
    Pair { i: 1, j: 4 },
    Pair { i: 2, j: 4 },
    Pair { i: 3, j: 4 },
];

impl Pair {
    /// The listed pair on directions `{a, b}`, in either order.
    pub fn new(a: usize, b: usize) -> Result<Pair, LatticeError> {
        PAIRS
            .iter()
            .copied()
            .find(|p| (p.i, p.j) == (a, b) || (p.j, p.i) == (a, b))
            .ok_or(LatticeError::InvalidPair(a, b))
    }

    pub fn is_d4(&self) -> bool {
        self.j == 4
    }

    pub fn contains(&self, dir: usize) -> bool {
        self.i == dir || self.j == dir
    }
}

impl fmt::Display for Pair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.i, self.j)
    }
}

impl FromStr for Pair {
    type Err = LatticeError;
    fn from_str(s: &str) -> Result<Self, LatticeError> {
        let bad = || LatticeError::Parse { what: "direction pair", input: s.to_owned() };
        let t = s.trim().trim_start_matches('(').trim_end_matches(')');
        let (a, b) = t.split_once(',').ok_or_else(bad)?;
        let a = a.trim().parse().map_err(|_| bad())?;
        let b = b.trim().parse().map_err(|_| bad())?;
        Pair::new(a, b)
    }
}

impl Serialize for Pair {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Seq {
    Alpha,
    Beta,
    Gamma,
    K,
}

impl Seq {
    pub const ALL: [Seq; 4] = [Seq::Alpha, Seq::Beta, Seq::Gamma, Seq::K];

    /// The sequence attached to direction `dir`.
    pub fn of_direction(dir: usize) -> Seq {
        Seq::ALL[dir - 1]
    }

    fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        ["alpha", "beta", "gamma", "K"][self.index()]
    }
}

impl fmt::Display for Seq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Base values of the four parameter sequences.
#[derive(Clone, Debug, PartialEq)]
pub enum ParameterBase<F> {
    /// One free symbol `alpha[l]`, `beta[l]`, ... per index.
    Free,
    /// `α_l = q^l α̂`, `β_l = q^l β̂`, `γ_l = q^l γ̂`,
    /// `K_l = (q^{2l+1}λ² − 1)/(q^l λ)`.
    Reduced { alpha_hat: F, beta_hat: F, gamma_hat: F, lambda: F, q: F },
    /// Explicit values on finitely many indices.
    Table([BTreeMap<i64, F>; 4]),
}

impl<F: Field> ParameterBase<F> {
    fn value(&self, seq: Seq, l: i64) -> Result<F, LatticeError> {
        let missing = || LatticeError::MissingParameter { seq, index: l };
        match self {
            ParameterBase::Free => F::named(&format!("{}[{l}]", seq.name())).ok_or_else(missing),
            ParameterBase::Reduced { alpha_hat, beta_hat, gamma_hat, lambda, q } => {
                let ql = q.powi(l as i32)?;
                Ok(match seq {
                    Seq::Alpha => ql * alpha_hat.clone(),
                    Seq::Beta => ql * beta_hat.clone(),
                    Seq::Gamma => ql * gamma_hat.clone(),
                    Seq::K => {
                        let num = ql.clone() * ql.clone() * q.clone() * lambda.clone() * lambda.clone() - F::one();
                        num.try_div(&(ql * lambda.clone()))?
                    }
                })
            }
            ParameterBase::Table(t) => t[seq.index()].get(&l).cloned().ok_or_else(missing),
        }
    }
}

/// The parameter sequences seen through a transformation word: sequence
/// `s` at index `l` reads base sequence `slots[s].0` at `l + slots[s].1`.
#[derive(Clone, Debug, PartialEq)]
pub struct ParameterSequences<F> {
    pub base: ParameterBase<F>,
    slots: [(Seq, i64); 4],
}

const IDENTITY_SLOTS: [(Seq, i64); 4] = [(Seq::Alpha, 0), (Seq::Beta, 0), (Seq::Gamma, 0), (Seq::K, 0)];

impl<F: Field> ParameterSequences<F> {
    pub fn new(base: ParameterBase<F>) -> Self {
        ParameterSequences { base, slots: IDENTITY_SLOTS }
    }

    pub fn reduced(alpha_hat: F, beta_hat: F, gamma_hat: F, lambda: F, q: F) -> Self {
        Self::new(ParameterBase::Reduced { alpha_hat, beta_hat, gamma_hat, lambda, q })
    }

    pub fn table(t: [BTreeMap<i64, F>; 4]) -> Self {
        Self::new(ParameterBase::Table(t))
    }

    pub fn slots(&self) -> [(Seq, i64); 4] {
        self.slots
    }

    pub fn value(&self, seq: Seq, l: i64) -> Result<F, LatticeError> {
        let (s, o) = self.slots[seq.index()];
        self.base.value(s, l + o)
    }

    pub fn alpha(&self, l: i64) -> Result<F, LatticeError> {
        self.value(Seq::Alpha, l)
    }
    pub fn beta(&self, l: i64) -> Result<F, LatticeError> {
        self.value(Seq::Beta, l)
    }
    pub fn gamma(&self, l: i64) -> Result<F, LatticeError> {
        self.value(Seq::Gamma, l)
    }
    pub fn k(&self, l: i64) -> Result<F, LatticeError> {
        self.value(Seq::K, l)
    }

    /// The parameter of direction `dir` at the point `l`, read at `l_dir`.
    pub fn at(&self, dir: usize, l: &LatticePoint) -> Result<F, LatticeError> {
        self.value(Seq::of_direction(dir), l.coord(dir))
    }
}

impl ParameterSequences<RationalExpr> {
    pub fn free() -> Self {
        Self::new(ParameterBase::Free)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Generator {
    T1,
    T2,
    T3,
    T4,
    R1,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Letter {
    pub gen: Generator,
    pub inverse: bool,
}

impl Letter {
    pub fn new(gen: Generator) -> Self {
        Letter { gen, inverse: false }
    }

    pub fn inv(self) -> Self {
        Letter { gen: self.gen, inverse: !self.inverse }
    }

    fn direction(self) -> Option<usize> {
        match self.gen {
            Generator::T1 => Some(1),
            Generator::T2 => Some(2),
            Generator::T3 => Some(3),
            Generator::T4 => Some(4),
            Generator::R1 => None,
        }
    }

    fn sign(self) -> i64 {
        if self.inverse {
            -1
        } else {
            1
        }
    }

    pub fn apply_point(self, l: &LatticePoint) -> Result<LatticePoint, LatticeError> {
        if let Some(d) = self.direction() {
            return Ok(l.shifted(d, self.sign()));
        }
        match (self.inverse, l.in_r1(), l.in_r2()) {
            (false, true, _) => Ok(l.shifted(2, -1)),
            (false, _, true) => Ok(l.shifted(3, -1)),
            (true, true, _) => Ok(l.shifted(3, 1)),
            (true, _, true) => Ok(l.shifted(2, 1)),
            _ => Err(LatticeError::OutOfDomain(*l)),
        }
    }

    /// Image of the base generator `seq_m`, as `(sequence, index offset)`.
    fn apply_seq(self, seq: Seq) -> (Seq, i64) {
        if let Some(d) = self.direction() {
            let o = if Seq::of_direction(d) == seq { self.sign() } else { 0 };
            return (seq, o);
        }
        match (seq, self.inverse) {
            (Seq::Beta, false) => (Seq::Gamma, -1),
            (Seq::Gamma, false) => (Seq::Beta, 0),
            (Seq::Beta, true) => (Seq::Gamma, 0),
            (Seq::Gamma, true) => (Seq::Beta, 1),
            (s, _) => (s, 0),
        }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self.gen {
            Generator::T1 => "T1",
            Generator::T2 => "T2",
            Generator::T3 => "T3",
            Generator::T4 => "T4",
            Generator::R1 => "R1",
        };
        if self.inverse {
            write!(f, "{name}^-1")
        } else {
            f.write_str(name)
        }
    }
}

impl FromStr for Letter {
    type Err = LatticeError;
    fn from_str(s: &str) -> Result<Self, LatticeError> {
        let (name, inverse) = match s.strip_suffix("^-1") {
            Some(n) => (n, true),
            None => (s, false),
        };
        let gen = match name {
            "T1" => Generator::T1,
            "T2" => Generator::T2,
            "T3" => Generator::T3,
            "T4" => Generator::T4,
            "R1" => Generator::R1,
            _ => return Err(LatticeError::Parse { what: "transformation", input: s.to_owned() }),
        };
        Ok(Letter { gen, inverse })
    }
}

/// A word in `T1..T4, R1` and inverses. Composition is right to left:
/// the word `[w, w']` acts as `w ∘ w'`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct TransformWord(pub Vec<Letter>);

impl TransformWord {
    pub fn identity() -> Self {
        TransformWord(Vec::new())
    }

    pub fn letter(gen: Generator) -> Self {
        TransformWord(vec![Letter::new(gen)])
    }

    /// Parses whitespace-separated letters such as `"T1 T2^-1 R1"`.
    pub fn parse(s: &str) -> Result<Self, LatticeError> {
        s.split_whitespace().filter(|t| *t != "id").map(str::parse).collect::<Result<Vec<_>, _>>().map(TransformWord)
    }

    pub fn inverse(&self) -> Self {
        TransformWord(self.0.iter().rev().map(|l| l.inv()).collect())
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &TransformWord) -> Self {
        TransformWord(self.0.iter().chain(other.0.iter()).copied().collect())
    }

    pub fn apply_point(&self, l: &LatticePoint) -> Result<LatticePoint, LatticeError> {
        self.0.iter().rev().try_fold(*l, |acc, letter| letter.apply_point(&acc))
    }

    pub fn apply_params<F: Field>(&self, p: &ParameterSequences<F>) -> ParameterSequences<F> {
        let mut slots = p.slots;
        for letter in self.0.iter().rev() {
            for slot in slots.iter_mut() {
                let (s, o) = letter.apply_seq(slot.0);
                *slot = (s, slot.1 + o);
            }
        }
        ParameterSequences { base: p.base.clone(), slots }
    }

    /// The transformed field `u ↦ u∘w`: the new patch holds `u(w(l))` at `l`.
    /// Stored values whose preimage leaves the domain of `R1` are dropped.
    pub fn apply_patch<F: Field>(&self, patch: &LatticePatch<F>) -> LatticePatch<F> {
        let inv = self.inverse();
        let mut out = LatticePatch::new(patch.kind, self.apply_params(&patch.params));
        for (k, v) in &patch.values {
            if let Ok(l) = inv.apply_point(k) {
                out.values.insert(l, v.clone());
            }
        }
        out
    }
}

impl fmt::Display for TransformWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("id");
        }
        let parts: Vec<String> = self.0.iter().map(|l| l.to_string()).collect();
        f.write_str(&parts.join(" "))
    }
}

/// Targets of [`apply_transform`].
pub trait Transformable: Sized {
    fn transformed(&self, w: &TransformWord) -> Result<Self, LatticeError>;
}

impl Transformable for LatticePoint {
    fn transformed(&self, w: &TransformWord) -> Result<Self, LatticeError> {
        w.apply_point(self)
    }
}

impl<F: Field> Transformable for ParameterSequences<F> {
    fn transformed(&self, w: &TransformWord) -> Result<Self, LatticeError> {
        Ok(w.apply_params(self))
    }
}

impl<F: Field> Transformable for LatticePatch<F> {
    fn transformed(&self, w: &TransformWord) -> Result<Self, LatticeError> {
        Ok(w.apply_patch(self))
    }
}

pub fn apply_transform<T: Transformable>(w: &TransformWord, target: &T) -> Result<T, LatticeError> {
    target.transformed(w)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PatchKind {
    UnreducedU,
    ReducedOmega,
}

/// Values on finitely many lattice points plus the parameter sequences.
///
/// For [`PatchKind::ReducedOmega`] a lookup falls back to the periodic
/// representative, so values need only be stored once per class.
#[derive(Clone, Debug, PartialEq)]
pub struct LatticePatch<F> {
    pub kind: PatchKind,
    pub params: ParameterSequences<F>,
    values: BTreeMap<LatticePoint, F>,
}

impl<F: Field> LatticePatch<F> {
    pub fn new(kind: PatchKind, params: ParameterSequences<F>) -> Self {
        LatticePatch { kind, params, values: BTreeMap::new() }
    }

    pub fn values(&self) -> &BTreeMap<LatticePoint, F> {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, l: &LatticePoint) -> Option<&F> {
        match self.kind {
            PatchKind::UnreducedU => self.values.get(l),
            PatchKind::ReducedOmega => self.values.get(l).or_else(|| self.values.get(&l.periodic_representative())),
        }
    }

    pub fn require(&self, l: &LatticePoint) -> Result<&F, LatticeError> {
        self.get(l).ok_or(LatticeError::MissingValue(*l))
    }

    /// Stores `v` at `l`, or at its periodic representative for reduced
    /// patches.
    pub fn insert(&mut self, l: LatticePoint, v: F) {
        let key = match self.kind {
            PatchKind::UnreducedU => l,
            PatchKind::ReducedOmega => l.periodic_representative(),
        };
        self.values.insert(key, v);
    }

    /// Stores `v` at exactly `l`, bypassing the periodic representative.
    pub fn insert_raw(&mut self, l: LatticePoint, v: F) {
        self.values.insert(l, v);
    }

    pub fn remove(&mut self, l: &LatticePoint) -> Option<F> {
        self.values.remove(l)
    }

    pub fn map_values<G: Field>(
        &self,
        params: ParameterSequences<G>,
        mut f: impl FnMut(&F) -> Result<G, FieldError>,
    ) -> Result<LatticePatch<G>, FieldError> {
        let mut values = BTreeMap::new();
        for (k, v) in &self.values {
            values.insert(*k, f(v)?);
        }
        Ok(LatticePatch { kind: self.kind, params, values })
    }
}

impl<F: Field + PartialEq> LatticePatch<F> {
    /// Stored points whose value differs from another stored point of the same
    /// class modulo `ε1+ε2+ε3`.
    pub fn periodicity_violations(&self) -> Vec<LatticePoint> {
        let mut first: BTreeMap<LatticePoint, &F> = BTreeMap::new();
        let mut bad = Vec::new();
        for (k, v) in &self.values {
            let rep = k.periodic_representative();
            match first.get(&rep) {
                Some(w) if *w != v => bad.push(*k),
                Some(_) => {}
                None => {
                    first.insert(rep, v);
                }
            }
        }
        bad
    }

    pub fn check_periodicity(&self) -> Result<(), LatticeError> {
        match self.periodicity_violations().first() {
            Some(l) => Err(LatticeError::PeriodicityViolation(*l)),
            None => Ok(()),
        }
    }
}

/// A face of the system: a quad polynomial and the four lattice points bound
/// to its arguments.
#[derive(Clone, Debug, PartialEq)]
pub struct LatticeFace<F> {
    pub pair: Pair,
    pub kind: QuadKind<F>,
    pub points: [LatticePoint; 4],
    /// Argument position of `l + ε_i + ε_j`.
    pub target: usize,
}

impl<F: Field> LatticeFace<F> {
    pub fn residual(&self, patch: &LatticePatch<F>) -> Result<F, LatticeError> {
        let x = [0, 1, 2, 3].map(|k| patch.require(&self.points[k]).cloned());
        let [a, b, c, d] = x;
        Ok(self.kind.eval(&[a?, b?, c?, d?])?)
    }
}

/// The `(i, j)` equation at base point `l`:
///
/// - `(i, j)` with `j ≤ 3`: `H3_{δ=0}(u, u_j, u_ij, u_i; p_j, p_i)`, i.e.
///   `p_j(u u_j + u_i u_ij) − p_i(u u_i + u_j u_ij) = 0`;
/// - `(i, 4)`: `D4(u_i, u_4, u_i4, u; p_i K, 0, 0)`, i.e.
///   `u_i u_i4 + u u_4 + p_i K u u_i = 0`.
///
/// `shift` is added to `p_i` (H3) or to `K` (D4) in this face only.
pub fn face_equation<F: Field>(
    pair: Pair,
    l: &LatticePoint,
    params: &ParameterSequences<F>,
    shift: Option<&F>,
) -> Result<LatticeFace<F>, LatticeError> {
    let (i, j) = (pair.i, pair.j);
    let ui = l.shifted(i, 1);
    let uj = l.shifted(j, 1);
    let uij = ui.shifted(j, 1);
    let bump = |v: F| match shift {
        Some(s) => v + s.clone(),
        None => v,
    };
    let pi = params.at(i, l)?;
    if pair.is_d4() {
        let k = bump(params.k(l.coord(4))?);
        let kind = QuadKind::D4 { d1: pi * k, d2: F::zero(), d3: F::zero() };
        Ok(LatticeFace { pair, kind, points: [ui, uj, uij, *l], target: 2 })
    } else {
        let pj = params.at(j, l)?;
        let kind = QuadKind::H3 { alpha1: pj, alpha2: bump(pi), delta: false, eps: false };
        Ok(LatticeFace { pair, kind, points: [*l, uj, uij, ui], target: 2 })
    }
}

/// Solves the `pair` equation at `l` for `u(l+ε_i+ε_j)` from
/// `[u(l), u(l+ε_i), u(l+ε_j)]`.
pub fn step_equation<F: Field>(
    pair: Pair,
    u: &[F; 3],
    l: &LatticePoint,
    params: &ParameterSequences<F>,
) -> Result<F, LatticeError> {
    solve_face(&face_equation(pair, l, params, None)?, u, l)
}

fn solve_face<F: Field>(face: &LatticeFace<F>, u: &[F; 3], l: &LatticePoint) -> Result<F, LatticeError> {
    let [u0, ui, uj] = u.clone();
    let x = if face.pair.is_d4() { [ui, uj, F::zero(), u0] } else { [u0, uj, F::zero(), ui] };
    solve_vertex(&face.kind, &x, face.target).map_err(|e| match e {
        QuadError::SingularSolve { .. } => LatticeError::SingularStep { point: *l, pair: face.pair },
        other => other.into(),
    })
}

/// A rule producing `u(l+ε_i+ε_j)` from `[u(l), u(l+ε_i), u(l+ε_j)]`.
pub trait StepRule<F>: Sync {
    fn step(&self, pair: Pair, l: &LatticePoint, u: &[F; 3]) -> Result<F, LatticeError>;
}

/// A parameter change confined to the single face `pair` at `base`.
#[derive(Clone, Debug, PartialEq)]
pub struct Corruption<F> {
    pub base: LatticePoint,
    pub pair: Pair,
    pub shift: F,
}

/// The H3/D4 system with given parameter sequences.
#[derive(Clone, Debug)]
pub struct Z4System<F> {
    pub params: ParameterSequences<F>,
    pub corruption: Option<Corruption<F>>,
}

impl<F: Field> Z4System<F> {
    pub fn new(params: ParameterSequences<F>) -> Self {
        Z4System { params, corruption: None }
    }

    pub fn face(&self, pair: Pair, l: &LatticePoint) -> Result<LatticeFace<F>, LatticeError> {
        let shift = self.corruption.as_ref().filter(|c| c.pair == pair && c.base == *l).map(|c| &c.shift);
        face_equation(pair, l, &self.params, shift)
    }
}

impl<F: Field> StepRule<F> for Z4System<F> {
    fn step(&self, pair: Pair, l: &LatticePoint, u: &[F; 3]) -> Result<F, LatticeError> {
        solve_face(&self.face(pair, l)?, u, l)
    }
}

/// The unit 3-cube at `l` spanned by directions `dirs` (increasing), as a
/// cube of quad-equations with `x1, x2, x3` along `dirs[0], dirs[1], dirs[2]`.
pub fn cube_at<F: Field>(
    system: &Z4System<F>,
    l: &LatticePoint,
    dirs: [usize; 3],
) -> Result<CubeAssignment<F>, LatticeError> {
    let [a, b, c] = dirs;
    let vertex = |p: &LatticePoint| -> Result<Vertex, LatticeError> {
        let d = p.minus(l);
        let bits = (d.coord(a), d.coord(b), d.coord(c));
        let others = (1..=4).filter(|k| !dirs.contains(k)).all(|k| d.coord(k) == 0);
        Ok(match (bits, others) {
            ((0, 0, 0), true) => Vertex::X0,
            ((1, 0, 0), true) => Vertex::X1,
            ((0, 1, 0), true) => Vertex::X2,
            ((0, 0, 1), true) => Vertex::X3,
            ((1, 1, 0), true) => Vertex::X12,
            ((0, 1, 1), true) => Vertex::X23,
            ((1, 0, 1), true) => Vertex::X31,
            ((1, 1, 1), true) => Vertex::X123,
            _ => return Err(LatticeError::MissingValue(*p)),
        })
    };
    let spec = [
        ((a, b), *l),
        ((b, c), *l),
        ((c, a), *l),
        ((a, b), l.shifted(c, 1)),
        ((b, c), l.shifted(a, 1)),
        ((c, a), l.shifted(b, 1)),
    ];
    let mut faces = Vec::with_capacity(6);
    for ((x, y), base) in spec {
        let face = system.face(Pair::new(x, y)?, &base)?;
        let args = [0, 1, 2, 3].map(|k| vertex(&face.points[k]));
        let [p, q, r, s] = args;
        faces.push(Face::new(face.kind, [p?, q?, r?, s?]));
    }
    let faces: [Face<F>; 6] = faces.try_into().unwrap_or_else(|_| unreachable!());
    Ok(CubeAssignment::new(faces)?)
}

/// The four direction triples of Z^4.
pub const TRIPLES: [[usize; 3]; 4] = [[1, 2, 3], [1, 2, 4], [1, 3, 4], [2, 3, 4]];

/// 3D consistency and tetrahedron checks of every unit 3-cube at `l`.
pub fn check_cubes(
    system: &Z4System<RationalExpr>,
    l: &LatticePoint,
    mode: &VerifyMode,
    exec: Execution,
) -> Result<Vec<([usize; 3], ConsistencyReport)>, LatticeError> {
    let mut out = Vec::new();
    for dirs in TRIPLES {
        let cube = cube_at(system, l, dirs)?;
        out.push((dirs, check_cube_consistency(&cube, mode, exec)?));
    }
    Ok(out)
}

/// A box `lo + [0, extent)` in Z^4.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct LatticeBox {
    pub lo: LatticePoint,
    pub extent: [u32; 4],
}

impl LatticeBox {
    pub fn new(lo: LatticePoint, extent: [u32; 4]) -> Self {
        LatticeBox { lo, extent }
    }

    pub fn at_origin(extent: [u32; 4]) -> Self {
        LatticeBox { lo: LatticePoint::ORIGIN, extent }
    }

    pub fn contains(&self, l: &LatticePoint) -> bool {
        (0..4).all(|k| l.0[k] >= self.lo.0[k] && l.0[k] < self.lo.0[k] + self.extent[k] as i64)
    }

    /// Directions along which `l` is above the lower corner.
    pub fn support(&self, l: &LatticePoint) -> Vec<usize> {
        (1..=4).filter(|&d| l.coord(d) > self.lo.coord(d)).collect()
    }

    /// Points on the coordinate axes through the lower corner.
    pub fn on_axes(&self, l: &LatticePoint) -> bool {
        self.contains(l) && self.support(l).len() <= 1
    }

    /// All points, ordered by height above the lower corner.
    pub fn points(&self) -> Vec<LatticePoint> {
        let mut out = Vec::new();
        for a in 0..self.extent[0] as i64 {
            for b in 0..self.extent[1] as i64 {
                for c in 0..self.extent[2] as i64 {
                    for d in 0..self.extent[3] as i64 {
                        out.push(self.lo.plus(&LatticePoint([a, b, c, d])));
                    }
                }
            }
        }
        out.sort_by_key(|l| (l.minus(&self.lo).0.iter().sum::<i64>(), *l));
        out
    }

    /// Initial data on the axes through the lower corner.
    pub fn axes_initial<F: Field>(
        &self,
        kind: PatchKind,
        params: ParameterSequences<F>,
        mut value: impl FnMut(&LatticePoint) -> F,
    ) -> LatticePatch<F> {
        let mut patch = LatticePatch::new(kind, params);
        for l in self.points().into_iter().filter(|l| self.on_axes(l)) {
            patch.insert_raw(l, value(&l));
        }
        patch
    }

    /// Checks that `patch` holds exactly the axes data of this box.
    pub fn validate_initial<F: Field>(&self, patch: &LatticePatch<F>) -> Result<(), LatticeError> {
        for l in self.points() {
            let on = self.on_axes(&l);
            let stored = patch.values.contains_key(&l);
            if on && !stored {
                return Err(LatticeError::InitialData(format!("axis point {l} has no value")));
            }
            if !on && stored {
                return Err(LatticeError::InitialData(format!("{l} is off the axes and would overdetermine the box")));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AuditEntry {
    pub point: LatticePoint,
    /// Pairs whose face produced a value at `point`.
    pub routes: Vec<Pair>,
    pub agree: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SingularEvent {
    pub point: LatticePoint,
    pub pair: Pair,
}

/// Outcome of an evolution: every point with two or more fill routes and
/// whether they agree.
///
/// The routes into a point `p` through pairs `(i,j)`, `(j,k)`, `(k,i)` are
/// the three routes to the top vertex of the unit 3-cube below `p`, so this
/// covers every shortest fill order of every unit 3-cube in the box.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AuditReport {
    pub filled: usize,
    pub undefined: Vec<LatticePoint>,
    pub singular_steps: Vec<SingularEvent>,
    pub entries: Vec<AuditEntry>,
    pub disagreements: usize,
    pub consistent: bool,
}

/// Fills `bx` from the axes data in `init`. Points whose every route is
/// singular or depends on an undefined point are left undefined; evolution
/// continues elsewhere.
pub fn evolve_patch<F, S>(
    init: &LatticePatch<F>,
    bx: &LatticeBox,
    rule: &S,
) -> Result<(LatticePatch<F>, AuditReport), LatticeError>
where
    F: Field + PartialEq,
    S: StepRule<F>,
{
    bx.validate_initial(init)?;
    let mut patch = init.clone();
    let mut report = AuditReport {
        filled: 0,
        undefined: Vec::new(),
        singular_steps: Vec::new(),
        entries: Vec::new(),
        disagreements: 0,
        consistent: true,
    };
    for p in bx.points() {
        let support = bx.support(&p);
        if support.len() < 2 {
            continue;
        }
        let mut results: Vec<(Pair, F)> = Vec::new();
        for pair in PAIRS.iter().filter(|q| support.contains(&q.i) && support.contains(&q.j)) {
            let base = p.shifted(pair.i, -1).shifted(pair.j, -1);
            let known = [base, base.shifted(pair.i, 1), base.shifted(pair.j, 1)].map(|l| patch.get(&l).cloned());
            let [Some(u0), Some(ui), Some(uj)] = known else { continue };
            match rule.step(*pair, &base, &[u0, ui, uj]) {
                Ok(v) => results.push((*pair, v)),
                Err(LatticeError::SingularStep { point, pair }) => {
                    report.singular_steps.push(SingularEvent { point, pair })
                }
                Err(e) => return Err(e),
            }
        }
        let Some((_, first)) = results.first().cloned() else {
            report.undefined.push(p);
            continue;
        };
        if results.len() >= 2 {
            let agree = results.iter().all(|(_, v)| *v == first);
            if !agree {
                report.disagreements += 1;
            }
            report.entries.push(AuditEntry { point: p, routes: results.iter().map(|(q, _)| *q).collect(), agree });
        }
        patch.insert_raw(p, first);
        report.filled += 1;
    }
    report.consistent = report.disagreements == 0;
    Ok((patch, report))
}

/// Random exact axes data and parameter tables for `bx`, reproducible from
/// `(seed, index)`.
pub fn random_instance(seed: u64, index: u64, bx: &LatticeBox) -> LatticePatch<GaussianRational> {
    let mut s = ExactSampler::stream(seed, index);
    let mut tables: [BTreeMap<i64, GaussianRational>; 4] = Default::default();
    for (k, table) in tables.iter_mut().enumerate() {
        for n in 0..bx.extent[k] as i64 {
            table.insert(bx.lo.0[k] + n, s.nonzero_rational());
        }
    }
    bx.axes_initial(PatchKind::UnreducedU, ParameterSequences::table(tables), |_| s.nonzero_rational())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AuditSummary {
    pub instances: usize,
    pub consistent_instances: usize,
    pub compared_points: usize,
    pub singular_instances: usize,
    /// Audit of the same first instance with one face's parameter shifted.
    pub corrupted_detected: bool,
}

impl AuditSummary {
    pub fn verified(&self) -> bool {
        self.instances > 0 && self.consistent_instances == self.instances && self.corrupted_detected
    }
}

/// Evolves `n` random instances on `bx` and audits each; also runs the
/// single-face corruption control (`K → K + 1` on the `(1,4)` face at the
/// lower corner).
pub fn audit_random_instances(
    n: usize,
    seed: u64,
    bx: &LatticeBox,
    exec: Execution,
) -> Result<AuditSummary, LatticeError> {
    let reports = map_range(exec, n, |k| {
        let init = random_instance(seed, k as u64, bx);
        let system = Z4System::new(init.params.clone());
        evolve_patch(&init, bx, &system).map(|(_, r)| r)
    });
    let mut summary = AuditSummary {
        instances: n,
        consistent_instances: 0,
        compared_points: 0,
        singular_instances: 0,
        corrupted_detected: false,
    };
    for r in reports {
        let r = r?;
        summary.consistent_instances += usize::from(r.consistent);
        summary.compared_points += r.entries.len();
        summary.singular_instances += usize::from(!r.singular_steps.is_empty());
    }
    let init = random_instance(seed, 0, bx);
    let mut system = Z4System::new(init.params.clone());
    system.corruption = Some(Corruption { base: bx.lo, pair: Pair { i: 1, j: 4 }, shift: GaussianRational::one() });
    let (_, r) = evolve_patch(&init, bx, &system)?;
    summary.corrupted_detected = !r.consistent;
    Ok(summary)
}

/// JSON form of a patch: values keyed by `"l1,l2,l3,l4"` with exact literals.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PatchFile {
    pub kind: PatchKind,
    pub params: ParamsFile,
    pub values: BTreeMap<String, String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum ParamsFile {
    Free,
    Reduced { alpha_hat: String, beta_hat: String, gamma_hat: String, lambda: String, q: String },
    Table {
        alpha: BTreeMap<String, String>,
        beta: BTreeMap<String, String>,
        gamma: BTreeMap<String, String>,
        #[serde(rename = "K")]
        k: BTreeMap<String, String>,
    },
}

impl<F: Field + fmt::Display> LatticePatch<F> {
    /// Serializable form. Parameter views produced by a transformation word
    /// are written through to their base values.
    pub fn to_file(&self) -> PatchFile {
        let params = match &self.params.base {
            ParameterBase::Free => ParamsFile::Free,
            ParameterBase::Reduced { alpha_hat, beta_hat, gamma_hat, lambda, q } => ParamsFile::Reduced {
                alpha_hat: alpha_hat.to_string(),
                beta_hat: beta_hat.to_string(),
                gamma_hat: gamma_hat.to_string(),
                lambda: lambda.to_string(),
                q: q.to_string(),
            },
            ParameterBase::Table(t) => {
                let view = |seq: Seq| -> BTreeMap<String, String> {
                    let (s, o) = self.params.slots[seq.index()];
                    t[s.index()].iter().map(|(l, v)| ((l - o).to_string(), v.to_string())).collect()
                };
                ParamsFile::Table { alpha: view(Seq::Alpha), beta: view(Seq::Beta), gamma: view(Seq::Gamma), k: view(Seq::K) }
            }
        };
        PatchFile {
            kind: self.kind,
            params,
            values: self.values.iter().map(|(l, v)| (l.to_string(), v.to_string())).collect(),
        }
    }
}

fn parse_exact(s: &str) -> Result<GaussianRational, LatticeError> {
    s.parse().map_err(|_| LatticeError::Parse { what: "exact value", input: s.to_owned() })
}

impl LatticePatch<GaussianRational> {
    pub fn from_file(file: &PatchFile) -> Result<Self, LatticeError> {
        let table = |m: &BTreeMap<String, String>| -> Result<BTreeMap<i64, GaussianRational>, LatticeError> {
            m.iter()
                .map(|(l, v)| {
                    let index = l.trim().parse().map_err(|_| LatticeError::Parse { what: "index", input: l.clone() })?;
                    Ok((index, parse_exact(v)?))
                })
                .collect()
        };
        let base = match &file.params {
            ParamsFile::Free => ParameterBase::Free,
            ParamsFile::Reduced { alpha_hat, beta_hat, gamma_hat, lambda, q } => ParameterBase::Reduced {
                alpha_hat: parse_exact(alpha_hat)?,
                beta_hat: parse_exact(beta_hat)?,
                gamma_hat: parse_exact(gamma_hat)?,
                lambda: parse_exact(lambda)?,
                q: parse_exact(q)?,
            },
            ParamsFile::Table { alpha, beta, gamma, k } => {
                ParameterBase::Table([table(alpha)?, table(beta)?, table(gamma)?, table(k)?])
            }
        };
        let mut patch = LatticePatch::new(file.kind, ParameterSequences::new(base));
        for (k, v) in &file.values {
            patch.insert_raw(k.parse()?, parse_exact(v)?);
        }
        Ok(patch)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(n: i64) -> GaussianRational {
        GaussianRational::from_integer(n)
    }

    fn table_params(alpha: i64, beta: i64, gamma: i64, k: i64) -> ParameterSequences<GaussianRational> {
        let one = |v: i64| BTreeMap::from([(0, g(v))]);
        ParameterSequences::table([one(alpha), one(beta), one(gamma), one(k)])
    }

    #[test]
    fn h3_step_example() {
        let p = table_params(1, 2, 1, 1);
        let v = step_equation(Pair { i: 1, j: 2 }, &[g(1), g(2), g(3)], &LatticePoint::ORIGIN, &p).unwrap();
        assert_eq!(v, g(-4));
    }

    #[test]
    fn d4_step_example() {
        let p = table_params(1, 1, 1, 1);
        let v = step_equation(Pair { i: 1, j: 4 }, &[g(1), g(2), g(4)], &LatticePoint::ORIGIN, &p).unwrap();
        assert_eq!(v, g(-3));
    }

    #[test]
    fn singular_step_is_reported() {
        // β/α = 1 and u1 = u2 make both numerator and denominator vanish
        let p = table_params(1, 1, 1, 1);
        let err = step_equation(Pair { i: 1, j: 2 }, &[g(1), g(2), g(2)], &LatticePoint::ORIGIN, &p).unwrap_err();
        assert!(matches!(err, LatticeError::SingularStep { .. }));
    }

    #[test]
    fn pair_orientation() {
        assert_eq!(Pair::new(1, 3).unwrap(), Pair { i: 3, j: 1 });
        assert_eq!(Pair::new(4, 2).unwrap(), Pair { i: 2, j: 4 });
        assert!(Pair::new(4, 4).is_err());
        assert_eq!("(3,1)".parse::<Pair>().unwrap(), Pair { i: 3, j: 1 });
    }

    #[test]
    fn r1_examples() {
        let r1 = TransformWord::letter(Generator::R1);
        assert_eq!(r1.apply_point(&LatticePoint::new(0, 1, 1, 0)).unwrap(), LatticePoint::new(0, 1, 0, 0));
        assert_eq!(r1.apply_point(&LatticePoint::new(0, 1, 0, 0)).unwrap(), LatticePoint::new(0, 0, 0, 0));
        assert!(matches!(r1.apply_point(&LatticePoint::new(0, 0, 2, 0)), Err(LatticeError::OutOfDomain(_))));
    }

    #[test]
    fn word_round_trip() {
        let w = TransformWord::parse("T1 T2^-1 R1").unwrap();
        assert_eq!(w.to_string(), "T1 T2^-1 R1");
        assert_eq!(TransformWord::parse("id").unwrap(), TransformWord::identity());
        assert!(TransformWord::parse("T5").is_err());
    }

    #[test]
    fn point_keys_round_trip() {
        let l = LatticePoint::new(-1, 2, 0, 7);
        assert_eq!(l.to_string().parse::<LatticePoint>().unwrap(), l);
        assert!("1,2,3".parse::<LatticePoint>().is_err());
    }

    #[test]
    fn initial_data_is_validated() {
        let bx = LatticeBox::at_origin([2, 2, 1, 1]);
        let mut init = bx.axes_initial(PatchKind::UnreducedU, table_params(1, 2, 3, 1), |_| g(1));
        assert!(bx.validate_initial(&init).is_ok());
        init.insert_raw(LatticePoint::new(1, 1, 0, 0), g(5));
        assert!(matches!(bx.validate_initial(&init), Err(LatticeError::InitialData(_))));
    }

    #[test]
    fn reduced_lookup_wraps() {
        let mut p = LatticePatch::new(PatchKind::ReducedOmega, table_params(1, 1, 1, 1));
        p.insert(LatticePoint::new(1, 1, 1, 0), g(3));
        assert_eq!(p.get(&LatticePoint::new(2, 2, 2, 0)), Some(&g(3)));
        assert_eq!(p.get(&LatticePoint::ORIGIN), Some(&g(3)));
        p.insert_raw(LatticePoint::new(1, 1, 1, 0), g(4));
        assert_eq!(p.periodicity_violations(), vec![LatticePoint::new(1, 1, 1, 0)]);
    }
}
