//! Quad-equations of ABS type (Q1, H3, H1, D4), vertex solving, and the
//! 3D-consistency / tetrahedron checks on a cube.

use serde::Serialize;
use thiserror::Error;

use crate::exactfield::{ExactSampler, Field, FieldError, GaussianRational, RationalExpr, Symbol};
use crate::laxverify::VerifyMode;
use crate::matrix::nullspace;
use crate::parallel::{map_range, Execution};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadError {
    #[error("singular solve on face {route}: the target coefficient vanishes")]
    SingularSolve { route: &'static str },
    #[error("face {0} does not reference the vertices of its cube face")]
    FaceMismatch(&'static str),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// An ABS polynomial in four vertex variables.
///
/// Catalog entries use `ε, δ, δ_k ∈ {0, 1}`; the D4 coefficients are field
/// values so that faces with a general coefficient (such as `αK` in the Z^4
/// system) can be expressed as well.
#[derive(Clone, Debug, PartialEq)]
pub enum QuadKind<F> {
    Q1 { alpha1: F, alpha2: F, eps: bool },
    H3 { alpha1: F, alpha2: F, delta: bool, eps: bool },
    H1 { alpha1: F, alpha2: F, eps: bool },
    D4 { d1: F, d2: F, d3: F },
}

fn flag<F: Field>(b: bool) -> F {
    if b {
        F::one()
    } else {
        F::zero()
    }
}

impl<F: Field> QuadKind<F> {
    pub fn tag(&self) -> &'static str {
        match self {
            QuadKind::Q1 { .. } => "Q1",
            QuadKind::H3 { .. } => "H3",
            QuadKind::H1 { .. } => "H1",
            QuadKind::D4 { .. } => "D4",
        }
    }

    pub fn eval(&self, x: &[F; 4]) -> Result<F, FieldError> {
        let [x1, x2, x3, x4] = x.clone();
        Ok(match self {
            QuadKind::Q1 { alpha1: a1, alpha2: a2, eps } => {
                let d = a1.clone() - a2.clone();
                a1.clone() * (x1.clone() * x2.clone() + x3.clone() * x4.clone())
                    - a2.clone() * (x1.clone() * x4.clone() + x2.clone() * x3.clone())
                    - d.clone() * (x1 * x3 + x2 * x4)
                    + flag::<F>(*eps) * a1.clone() * a2.clone() * d
            }
            QuadKind::H3 { alpha1: a1, alpha2: a2, delta, eps } => {
                let tail = if *eps {
                    flag::<F>(*delta) + (x2.clone() * x4.clone()).try_div(&(a1.clone() * a2.clone()))?
                } else {
                    flag::<F>(*delta)
                };
                a1.clone() * (x1.clone() * x2.clone() + x3.clone() * x4.clone())
                    - a2.clone() * (x1 * x4 + x2 * x3)
                    + (a1.clone() * a1.clone() - a2.clone() * a2.clone()) * tail
            }
            QuadKind::H1 { alpha1: a1, alpha2: a2, eps } => {
                (x1 - x3) * (x2.clone() - x4.clone())
                    + (a2.clone() - a1.clone()) * (F::one() - flag::<F>(*eps) * x2 * x4)
            }
            QuadKind::D4 { d1, d2, d3 } => {
                x1.clone() * x3.clone() + x2 * x4.clone() + d1.clone() * x1 * x4.clone() + d2.clone() * x3 * x4 + d3.clone()
            }
        })
    }

    pub fn try_map<G: Field>(&self, mut f: impl FnMut(&F) -> Result<G, FieldError>) -> Result<QuadKind<G>, FieldError> {
        Ok(match self {
            QuadKind::Q1 { alpha1, alpha2, eps } => QuadKind::Q1 { alpha1: f(alpha1)?, alpha2: f(alpha2)?, eps: *eps },
            QuadKind::H3 { alpha1, alpha2, delta, eps } => {
                QuadKind::H3 { alpha1: f(alpha1)?, alpha2: f(alpha2)?, delta: *delta, eps: *eps }
            }
            QuadKind::H1 { alpha1, alpha2, eps } => QuadKind::H1 { alpha1: f(alpha1)?, alpha2: f(alpha2)?, eps: *eps },
            QuadKind::D4 { d1, d2, d3 } => QuadKind::D4 { d1: f(d1)?, d2: f(d2)?, d3: f(d3)? },
        })
    }

    fn params(&self) -> Vec<&F> {
        match self {
            QuadKind::Q1 { alpha1, alpha2, .. } | QuadKind::H3 { alpha1, alpha2, .. } | QuadKind::H1 { alpha1, alpha2, .. } => {
                vec![alpha1, alpha2]
            }
            QuadKind::D4 { d1, d2, d3 } => vec![d1, d2, d3],
        }
    }
}

/// The polynomial's value at `(x1, x2, x3, x4)`.
pub fn eval_quad<F: Field>(k: &QuadKind<F>, x1: &F, x2: &F, x3: &F, x4: &F) -> Result<F, FieldError> {
    k.eval(&[x1.clone(), x2.clone(), x3.clone(), x4.clone()])
}

/// Solves `k(x) = 0` for `x[target]`; the entry at `target` is ignored.
///
/// Multi-affinity gives `k = a·x_t + b` with `b = k|_{x_t=0}` and
/// `a = k|_{x_t=1} − b`.
pub fn solve_vertex<F: Field>(k: &QuadKind<F>, x: &[F; 4], target: usize) -> Result<F, QuadError> {
    solve_on(k, x, target, "face")
}

fn solve_on<F: Field>(k: &QuadKind<F>, x: &[F; 4], target: usize, route: &'static str) -> Result<F, QuadError> {
    let mut at = x.clone();
    at[target] = F::zero();
    let b = k.eval(&at)?;
    at[target] = F::one();
    let a = k.eval(&at)? - b.clone();
    if a.is_zero() {
        return Err(QuadError::SingularSolve { route });
    }
    Ok((-b).try_div(&a)?)
}

fn vertex_symbols() -> [Symbol; 4] {
    [Symbol::new("v1"), Symbol::new("v2"), Symbol::new("v3"), Symbol::new("v4")]
}

/// True iff `e` has degree at most one in each of `vars` and no denominator
/// involves them.
pub fn is_multiaffine(e: &RationalExpr, vars: &[Symbol]) -> bool {
    vars.iter().all(|&s| e.degree_in(s) <= 1 && !e.denominator().contains(s))
}

/// Multi-affinity of a catalog polynomial, tested symbolically.
pub fn check_multiaffine(k: &QuadKind<RationalExpr>) -> bool {
    let vars = vertex_symbols();
    let x = vars.map(RationalExpr::symbol);
    match k.eval(&x) {
        Ok(e) => is_multiaffine(&e, &vars),
        Err(_) => false,
    }
}

/// The catalog with symbolic `α`'s and every admissible flag combination.
pub fn catalog() -> Vec<QuadKind<RationalExpr>> {
    let v = RationalExpr::var;
    let (a1, a2) = (v("alpha1"), v("alpha2"));
    let mut out = Vec::new();
    for eps in [false, true] {
        out.push(QuadKind::Q1 { alpha1: a1.clone(), alpha2: a2.clone(), eps });
        out.push(QuadKind::H1 { alpha1: a1.clone(), alpha2: a2.clone(), eps });
        for delta in [false, true] {
            out.push(QuadKind::H3 { alpha1: a1.clone(), alpha2: a2.clone(), delta, eps });
        }
    }
    for bits in 0..8u8 {
        let b = |k: u8| if bits & (1 << k) != 0 { RationalExpr::one() } else { RationalExpr::zero() };
        out.push(QuadKind::D4 { d1: b(0), d2: b(1), d3: b(2) });
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Vertex {
    X0,
    X1,
    X2,
    X3,
    X12,
    X23,
    X31,
    X123,
}

impl Vertex {
    fn index(self) -> usize {
        self as usize
    }
}

use Vertex::{X0, X1, X12, X123, X2, X23, X3, X31};

/// Face names and vertex sets, in the order `P, P(1), …, P(5)`.
pub const FACE_NAMES: [&str; 6] = ["P", "P1", "P2", "P3", "P4", "P5"];
const FACE_SETS: [[Vertex; 4]; 6] = [
    [X0, X1, X2, X12],
    [X0, X2, X3, X23],
    [X0, X3, X1, X31],
    [X3, X31, X23, X123],
    [X1, X12, X31, X123],
    [X2, X23, X12, X123],
];
/// Vertex sets of the two tetrahedron relations `P(6)`, `P(7)`.
pub const TETRAHEDRA: [[Vertex; 4]; 2] = [[X0, X12, X23, X31], [X1, X2, X3, X123]];

/// A quad polynomial with its arguments bound to cube vertices, in the
/// order they are passed to the polynomial.
#[derive(Clone, Debug, PartialEq)]
pub struct Face<F> {
    pub kind: QuadKind<F>,
    pub args: [Vertex; 4],
}

impl<F: Field> Face<F> {
    pub fn new(kind: QuadKind<F>, args: [Vertex; 4]) -> Self {
        Face { kind, args }
    }

    fn solve(&self, values: &[Option<F>; 8], target: Vertex, route: &'static str) -> Result<F, QuadError> {
        let pos = self.args.iter().position(|&v| v == target).ok_or(QuadError::FaceMismatch(route))?;
        let mut x: [F; 4] = std::array::from_fn(|_| F::zero());
        for (k, v) in self.args.iter().enumerate() {
            if k != pos {
                x[k] = values[v.index()].clone().ok_or(QuadError::FaceMismatch(route))?;
            }
        }
        solve_on(&self.kind, &x, pos, route)
    }
}

/// Six faces of a cube, `P` on `(x0, x1, x2, x12)` through `P(5)` on
/// `(x2, x23, x12, x123)`.
#[derive(Clone, Debug, PartialEq)]
pub struct CubeAssignment<F> {
    faces: [Face<F>; 6],
}

impl<F: Field> CubeAssignment<F> {
    pub fn new(faces: [Face<F>; 6]) -> Result<Self, QuadError> {
        for (k, face) in faces.iter().enumerate() {
            let mut got = face.args.to_vec();
            let mut want = FACE_SETS[k].to_vec();
            got.sort_by_key(|v| v.index());
            want.sort_by_key(|v| v.index());
            if got != want {
                return Err(QuadError::FaceMismatch(FACE_NAMES[k]));
            }
        }
        Ok(CubeAssignment { faces })
    }

    pub fn faces(&self) -> &[Face<F>; 6] {
        &self.faces
    }

    pub fn face_mut(&mut self, k: usize) -> &mut Face<F> {
        &mut self.faces[k]
    }

    pub fn try_map<G: Field>(&self, mut f: impl FnMut(&F) -> Result<G, FieldError>) -> Result<CubeAssignment<G>, FieldError> {
        let mut out = Vec::with_capacity(6);
        for face in &self.faces {
            out.push(Face { kind: face.kind.try_map(&mut f)?, args: face.args });
        }
        Ok(CubeAssignment { faces: out.try_into().unwrap_or_else(|_| unreachable!()) })
    }

    /// From `x0..x3`, fills the three middle vertices and the three routes to
    /// `x123` (through `P3`, `P4`, `P5`).
    pub fn fill(&self, init: &[F; 4]) -> Result<FilledCube<F>, QuadError> {
        let mut values: [Option<F>; 8] = std::array::from_fn(|_| None);
        for (k, v) in init.iter().enumerate() {
            values[k] = Some(v.clone());
        }
        let x12 = self.faces[0].solve(&values, X12, "P")?;
        let x23 = self.faces[1].solve(&values, X23, "P1")?;
        let x31 = self.faces[2].solve(&values, X31, "P2")?;
        values[X12.index()] = Some(x12);
        values[X23.index()] = Some(x23);
        values[X31.index()] = Some(x31);
        let routes = [
            self.faces[3].solve(&values, X123, "P3")?,
            self.faces[4].solve(&values, X123, "P4")?,
            self.faces[5].solve(&values, X123, "P5")?,
        ];
        let vertices = std::array::from_fn(|k| values[k].clone().unwrap_or_else(|| routes[0].clone()));
        Ok(FilledCube { vertices, routes })
    }
}

#[derive(Clone, Debug)]
pub struct FilledCube<F> {
    /// Indexed by [`Vertex`]; `x123` is taken from the first route.
    pub vertices: [F; 8],
    pub routes: [F; 3],
}

impl<F: Field + PartialEq> FilledCube<F> {
    /// `[P3 = P4, P3 = P5, P4 = P5]`.
    pub fn pairwise(&self) -> [bool; 3] {
        let r = &self.routes;
        [r[0] == r[1], r[0] == r[2], r[1] == r[2]]
    }

    fn at(&self, set: &[Vertex; 4]) -> [F; 4] {
        set.map(|v| self.vertices[v.index()].clone())
    }
}

/// The 16 multi-affine monomials `Π_{k ∈ mask} x_k`.
fn monomials<F: Field>(x: &[F; 4]) -> Vec<F> {
    (0..16u32)
        .map(|mask| {
            (0..4).filter(|k| mask & (1 << k) != 0).fold(F::one(), |acc, k| acc * x[k].clone())
        })
        .collect()
}

fn apply_relation<F: Field>(coeffs: &[F], x: &[F; 4]) -> F {
    coeffs.iter().zip(monomials(x)).fold(F::zero(), |acc, (c, m)| acc + c.clone() * m)
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct TetraVerdict {
    /// Dimension of the space of multi-affine relations fitted to the samples.
    pub nullity: usize,
    /// The fitted relation vanished on every validation point.
    pub holds: bool,
    /// Coefficients of the fitted relation indexed by monomial bitmask.
    pub relation: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConsistencyReport {
    pub mode: VerifyMode,
    /// The three `x123` routes (symbolic mode) or those of the first sample.
    pub routes: [String; 3],
    /// `[P3 = P4, P3 = P5, P4 = P5]`, over all samples.
    pub pairwise: [bool; 3],
    pub consistent: bool,
    pub tetrahedron: [TetraVerdict; 2],
    /// Symbolic mode: the parameter point at which the tetrahedron relations
    /// were fitted.
    pub tetrahedron_parameters: Vec<(String, String)>,
    pub samples_checked: usize,
    /// Samples at which the tetrahedron relations were fitted and validated.
    pub tetrahedron_samples: usize,
    /// Draws discarded because a route was singular at the sampled point.
    pub redraws: usize,
}

impl ConsistencyReport {
    pub fn verified(&self) -> bool {
        self.consistent && self.tetrahedron.iter().all(|t| t.holds)
    }
}

const FIT_POINTS: usize = 24;
const TETRA_SEED: u64 = 0x7e7a;
const MAX_REDRAWS: usize = 1000;
/// Sampled mode fits the tetrahedron relations at this many samples only;
/// consistency is checked at all of them.
pub const TETRA_SAMPLES: usize = 10;

fn draw_init(s: &mut ExactSampler) -> [GaussianRational; 4] {
    std::array::from_fn(|_| s.nonzero_rational())
}

/// Fills the cube at fresh random initial points, skipping singular draws.
fn fill_points<F: Field>(
    cube: &CubeAssignment<F>,
    s: &mut ExactSampler,
    n: usize,
    redraws: &mut usize,
) -> Result<Vec<FilledCube<F>>, QuadError> {
    let mut out = Vec::with_capacity(n);
    let mut last_err = None;
    while out.len() < n {
        if *redraws > MAX_REDRAWS {
            return Err(last_err.unwrap_or(QuadError::SingularSolve { route: "P" }));
        }
        let init = draw_init(s).map(|g| F::from_gaussian(&g));
        match cube.fill(&init) {
            Ok(f) if f.vertices.iter().all(|v| !v.is_zero()) => out.push(f),
            Ok(_) => *redraws += 1,
            Err(e) => {
                *redraws += 1;
                last_err = Some(e);
            }
        }
    }
    Ok(out)
}

/// Fits a multi-affine relation on `set` over exact numbers and validates
/// it on other fills, numeric or symbolic.
fn tetra<F: Field + PartialEq>(
    fit: &[FilledCube<GaussianRational>],
    validate: &[FilledCube<F>],
    set: &[Vertex; 4],
) -> Result<TetraVerdict, QuadError> {
    let rows: Vec<Vec<GaussianRational>> = fit.iter().map(|f| monomials(&f.at(set))).collect();
    let basis = nullspace(rows, 16)?;
    let nullity = basis.len();
    let Some(rel) = basis.into_iter().next() else {
        return Ok(TetraVerdict { nullity, holds: false, relation: Vec::new() });
    };
    let lifted: Vec<F> = rel.iter().map(F::from_gaussian).collect();
    let holds = nullity < 16 && validate.iter().all(|f| apply_relation(&lifted, &f.at(set)).is_zero());
    Ok(TetraVerdict { nullity, holds, relation: rel.iter().map(|c| c.to_string()).collect() })
}

fn parameter_symbols(cube: &CubeAssignment<RationalExpr>) -> Vec<Symbol> {
    let mut symbols: Vec<Symbol> =
        cube.faces.iter().flat_map(|f| f.kind.params().into_iter().flat_map(|p| p.symbols())).collect();
    symbols.sort();
    symbols.dedup();
    symbols
}

/// 3D consistency and tetrahedron property of `cube`.
///
/// Symbolic mode keeps `x0..x3` as symbols (and any symbolic face parameters
/// as they are); the tetrahedron relations are fitted on numeric vertex draws
/// and validated on the symbolic fill. Sampled mode instantiates every free
/// symbol at exact random points per sample.
pub fn check_cube_consistency(
    cube: &CubeAssignment<RationalExpr>,
    mode: &VerifyMode,
    exec: Execution,
) -> Result<ConsistencyReport, QuadError> {
    match mode {
        VerifyMode::Symbolic => {
            let init = ["x0", "x1", "x2", "x3"].map(RationalExpr::var);
            let filled = cube.fill(&init)?;
            let pairwise = filled.pairwise();
            // the relations are fitted at one exact parameter point and
            // validated on the fill that is symbolic in x0..x3
            let mut s = ExactSampler::new(TETRA_SEED);
            let point = s.point(&parameter_symbols(cube));
            let numeric = cube.try_map(|p| p.eval_at(&point))?;
            let specialised = numeric.try_map(|p| Ok(RationalExpr::constant(p.clone())))?;
            let validate = [specialised.fill(&init)?];
            let mut redraws = 0;
            let fit = fill_points(&numeric, &mut s, FIT_POINTS, &mut redraws)?;
            let mut parameter_point: Vec<(String, String)> =
                point.iter().map(|(k, v)| (k.name().to_owned(), v.to_string())).collect();
            parameter_point.sort();
            Ok(ConsistencyReport {
                mode: mode.clone(),
                routes: filled.routes.clone().map(|r| r.to_string()),
                pairwise,
                consistent: pairwise.iter().all(|&b| b),
                tetrahedron: [tetra(&fit, &validate, &TETRAHEDRA[0])?, tetra(&fit, &validate, &TETRAHEDRA[1])?],
                tetrahedron_parameters: parameter_point,
                samples_checked: 1,
                tetrahedron_samples: 1,
                redraws,
            })
        }
        VerifyMode::Sampled { samples, seed } => {
            let symbols = parameter_symbols(cube);
            let per_sample = map_range(exec, *samples, |k| -> Result<_, QuadError> {
                let mut s = ExactSampler::stream(*seed, k as u64);
                let point = s.point(&symbols);
                let numeric = cube.try_map(|p| p.eval_at(&point))?;
                let mut redraws = 0;
                let main = fill_points(&numeric, &mut s, 1, &mut redraws)?.remove(0);
                if k >= TETRA_SAMPLES {
                    return Ok((main, None, redraws));
                }
                let fit = fill_points(&numeric, &mut s, FIT_POINTS, &mut redraws)?;
                let validate = fill_points(&numeric, &mut s, 4, &mut redraws)?;
                let t = [tetra(&fit, &validate, &TETRAHEDRA[0])?, tetra(&fit, &validate, &TETRAHEDRA[1])?];
                Ok((main, Some(t), redraws))
            });
            let mut report = ConsistencyReport {
                mode: mode.clone(),
                routes: Default::default(),
                pairwise: [true; 3],
                consistent: true,
                tetrahedron: [
                    TetraVerdict { nullity: 0, holds: true, relation: Vec::new() },
                    TetraVerdict { nullity: 0, holds: true, relation: Vec::new() },
                ],
                tetrahedron_parameters: Vec::new(),
                samples_checked: 0,
                tetrahedron_samples: 0,
                redraws: 0,
            };
            for (k, res) in per_sample.into_iter().enumerate() {
                let (main, t, redraws) = res?;
                if k == 0 {
                    report.routes = main.routes.clone().map(|r| r.to_string());
                }
                for (acc, b) in report.pairwise.iter_mut().zip(main.pairwise()) {
                    *acc &= b;
                }
                if let Some(t) = t {
                    for (dst, src) in report.tetrahedron.iter_mut().zip(t.iter()) {
                        if k == 0 {
                            dst.relation = src.relation.clone();
                        }
                        dst.holds &= src.holds;
                        dst.nullity = dst.nullity.max(src.nullity);
                    }
                    report.tetrahedron_samples += 1;
                }
                report.samples_checked += 1;
                report.redraws += redraws;
            }
            report.consistent = report.samples_checked > 0 && report.pairwise.iter().all(|&b| b);
            for t in report.tetrahedron.iter_mut() {
                t.holds &= report.tetrahedron_samples > 0;
            }
            Ok(report)
        }
    }
}

/// The standard cube of `kind` with the same polynomial on opposite faces:
/// `x0 → x1` carries `α1`, `x0 → x2` carries `α2`, `x0 → x3` carries `α3`.
pub fn standard_cube(
    make: impl Fn(RationalExpr, RationalExpr) -> QuadKind<RationalExpr>,
    alphas: [RationalExpr; 3],
) -> Result<CubeAssignment<RationalExpr>, QuadError> {
    let [a1, a2, a3] = alphas;
    CubeAssignment::new([
        Face::new(make(a1.clone(), a2.clone()), [X0, X1, X12, X2]),
        Face::new(make(a2.clone(), a3.clone()), [X0, X2, X23, X3]),
        Face::new(make(a3.clone(), a1.clone()), [X0, X3, X31, X1]),
        Face::new(make(a1.clone(), a2.clone()), [X3, X31, X123, X23]),
        Face::new(make(a2.clone(), a3.clone()), [X1, X12, X123, X31]),
        Face::new(make(a3, a1), [X2, X23, X123, X12]),
    ])
}

#[derive(Clone, Debug, Serialize)]
pub struct NamedEquation {
    pub name: &'static str,
    pub holds: bool,
}

/// The four named lattice equations, each obtained by solving the catalog
/// polynomial for `Û̄` and comparing with the displayed form.
pub fn named_equations() -> Result<Vec<NamedEquation>, QuadError> {
    let v = RationalExpr::var;
    let (u, ub, uh, a, b) = (v("U"), v("Ub"), v("Uh"), v("alpha"), v("beta"));
    let z = RationalExpr::zero();
    let one = RationalExpr::one();
    let mut out = Vec::new();

    // Q1(U, Ū, Û̄, Û; α, β; 0) = 0 and the cross-ratio equals α/β
    let q1 = QuadKind::Q1 { alpha1: a.clone(), alpha2: b.clone(), eps: false };
    let w = solve_vertex(&q1, &[u.clone(), ub.clone(), z.clone(), uh.clone()], 2)?;
    let cross = (&(&u - &ub) * &(&uh - &w)).checked_div(&(&(&u - &uh) * &(&ub - &w)))?;
    out.push(NamedEquation { name: "discrete Schwarzian KdV", holds: cross == a.checked_div(&b)? });

    // H3(U, Ū, −Û̄, Û; α, β; 0; 0) = 0 and Û̄/U = (αŪ − βÛ)/(αÛ − βŪ)
    let h3 = QuadKind::H3 { alpha1: a.clone(), alpha2: b.clone(), delta: false, eps: false };
    let w = -solve_vertex(&h3, &[u.clone(), ub.clone(), z.clone(), uh.clone()], 2)?;
    let rhs = (&(&a * &ub) - &(&b * &uh)).checked_div(&(&(&a * &uh) - &(&b * &ub)))?;
    out.push(NamedEquation { name: "lattice modified KdV", holds: w.checked_div(&u)? == rhs });

    // H1(U, Ū, Û̄, Û; α, β; 0) = 0 and (U − Û̄)(Ū − Û) = α − β
    let h1 = QuadKind::H1 { alpha1: a.clone(), alpha2: b.clone(), eps: false };
    let w = solve_vertex(&h1, &[u.clone(), ub.clone(), z.clone(), uh.clone()], 2)?;
    out.push(NamedEquation { name: "lattice potential KdV", holds: &(&u - &w) * &(&ub - &uh) == &a - &b });

    // D4(1 − cU, Û, Ū, −1 + cÛ̄; 0, 0, 0) = 0 with c = β/α − 1, and
    // Û/Ū = ((β − α)U − α)/((β − α)Û̄ − α)
    let c = &b.checked_div(&a)? - &one;
    let d4 = QuadKind::D4 { d1: z.clone(), d2: z.clone(), d3: z.clone() };
    let y = solve_vertex(&d4, &[&one - &(&c * &u), uh.clone(), ub.clone(), z.clone()], 3)?;
    let w = (&y + &one).checked_div(&c)?;
    let bma = &b - &a;
    let rhs = (&(&bma * &u) - &a).checked_div(&(&(&bma * &w) - &a))?;
    out.push(NamedEquation { name: "discrete Volterra-Kac-van Moerbeke", holds: uh.checked_div(&ub)? == rhs });
    Ok(out)
}
