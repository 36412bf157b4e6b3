use std::fmt;
use std::path::Path;

use anyhow::{anyhow, Context};
use qlax_core::exactfield::{GaussianRational, RationalExpr};
use qlax_core::lattice4d::{
    audit_random_instances, cube_at, evolve_patch, random_instance, LatticeBox, LatticeError, LatticePatch,
    LatticePoint, ParameterSequences, PatchFile, Z4System, TRIPLES,
};
use qlax_core::laxbuild::verify_lax4d;
use qlax_core::laxverify::{converse, regularity_report, verify_theorem, SampleParameters, VerifyMode};
use qlax_core::painleve::{orbit, projective_reduction_compare, OrbitRecord, StepOptions};
use qlax_core::parallel::Execution;
use qlax_core::quadcat::check_cube_consistency;
use qlax_core::reduction::{bridge_random, lift_random, reduction_equivalence};
use qlax_core::{MapId, PainleveConfig};
use serde_json::{json, Value};

use crate::output::{emit, report_bytes};
use crate::params::ParamsFile;
use crate::{
    Backend, CaseArg, Command, Compare, ConsistencyArgs, Evolve, LatticeArgs, Lax4dArgs, ModeArg, Outcome,
    PainleveArgs, ProjectiveArgs, ReductionArgs, RegularityArgs, TheoremArgs, Verify,
};

#[derive(Debug)]
pub enum RunError {
    /// Bad arguments or input files.
    Usage(anyhow::Error),
    /// A computation failed outright.
    Internal(anyhow::Error),
}

impl RunError {
    pub fn exit_code(&self) -> u8 {
        match self {
            RunError::Usage(_) => 2,
            RunError::Internal(_) => 1,
        }
    }
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunError::Usage(e) | RunError::Internal(e) => write!(f, "{e:#}"),
        }
    }
}

fn usage(e: impl Into<anyhow::Error>) -> RunError {
    RunError::Usage(e.into())
}

fn internal(e: impl Into<anyhow::Error>) -> RunError {
    RunError::Internal(e.into())
}

type Run = Result<Outcome, RunError>;

pub fn run(command: &Command, exec: Execution, timing: bool) -> Run {
    match command {
        Command::Verify(Verify::Theorem(a)) => theorem(a, exec, timing),
        Command::Verify(Verify::Regularity(a)) => regularity(a, timing),
        Command::Verify(Verify::Consistency(a)) => consistency(a, exec, timing),
        Command::Verify(Verify::Lax4d(a)) => lax4d(a, exec, timing),
        Command::Verify(Verify::Reduction(a)) => reduction(a, exec, timing),
        Command::Evolve(Evolve::Painleve(a)) => painleve(a),
        Command::Evolve(Evolve::Lattice(a)) => lattice(a, timing),
        Command::Compare(Compare::Projective(a)) => projective(a, timing),
    }
}

fn verdict(ok: bool) -> Outcome {
    if ok {
        Outcome::Verified
    } else {
        Outcome::Failed
    }
}

fn write_report(path: Option<&Path>, v: Value, timing: bool) -> Result<(), RunError> {
    emit(path, &report_bytes(v, timing).map_err(internal)?).map_err(internal)
}

fn to_value(v: impl serde::Serialize) -> Result<Value, RunError> {
    serde_json::to_value(v).map_err(internal)
}

fn cases(c: CaseArg) -> Vec<MapId> {
    match c {
        CaseArg::Iv => vec![MapId::IV],
        CaseArg::Iii => vec![MapId::III],
        CaseArg::Siii => vec![MapId::SIII],
        CaseArg::All => MapId::ALL.to_vec(),
    }
}

fn theorem(a: &TheoremArgs, exec: Execution, timing: bool) -> Run {
    let mode = match a.mode {
        ModeArg::Symbolic => VerifyMode::Symbolic,
        ModeArg::Sampled => VerifyMode::Sampled { samples: a.samples, seed: a.seed },
    };
    let mut reports = Vec::new();
    let mut ok = true;
    for map in cases(a.case) {
        let r = verify_theorem(map, &mode, exec).map_err(internal)?;
        ok &= r.verified && r.negative_control;
        let mut v = to_value(&r)?;
        if a.converse {
            let c = converse(map).map_err(internal)?;
            ok &= c.verified();
            v["converse"] = to_value(&c)?;
            v["converse"]["verified"] = Value::from(c.verified());
        }
        reports.push(v);
    }
    let v = if reports.len() == 1 { reports.remove(0) } else { Value::from(reports) };
    write_report(a.out.as_deref(), v, timing)?;
    Ok(verdict(ok))
}

fn load_config(path: &Path) -> Result<PainleveConfig<GaussianRational>, RunError> {
    ParamsFile::load(path).and_then(|p| p.config()).map_err(usage)
}

/// The configuration as exact literals, after `a2` and `f2` are derived.
fn literals(c: &PainleveConfig<GaussianRational>) -> Value {
    json!({
        "a0": c.a0.to_string(),
        "a1": c.a1.to_string(),
        "a2": c.a2.to_string(),
        "lambda": c.lambda.to_string(),
        "q": c.q.to_string(),
        "f0": c.f0.to_string(),
        "f1": c.f1.to_string(),
        "f2": c.f2.to_string(),
    })
}

fn regularity(a: &RegularityArgs, timing: bool) -> Run {
    let (c, parameters) = match &a.params {
        Some(path) => {
            let c = load_config(path)?;
            (c.map_values(|g| RationalExpr::constant(g.clone())), literals(&c))
        }
        None => {
            let c = PainleveConfig::<RationalExpr>::symbolic();
            let p = to_value(SampleParameters::of(&c))?;
            (c, p)
        }
    };
    let r = regularity_report(&c).map_err(internal)?;
    let mut v = to_value(&r)?;
    v["parameters"] = parameters;
    v["spectral_verified"] = Value::from(r.spectral_verified());
    v["factorization_verified"] = Value::from(r.factorization_verified());
    v["verified"] = Value::from(r.verified());
    write_report(a.out.as_deref(), v, timing)?;
    Ok(verdict(r.verified()))
}

fn consistency(a: &ConsistencyArgs, exec: Execution, timing: bool) -> Run {
    let mode = if a.symbolic { VerifyMode::Symbolic } else { VerifyMode::Sampled { samples: a.samples, seed: a.seed } };
    let system = Z4System::<RationalExpr>::new(ParameterSequences::free());
    let mut cubes = Vec::new();
    let mut ok = true;
    for dirs in TRIPLES {
        let cube = cube_at(&system, &LatticePoint::ORIGIN, dirs).map_err(internal)?;
        let r = check_cube_consistency(&cube, &mode, exec).map_err(internal)?;
        ok &= r.verified();
        cubes.push(json!({ "directions": dirs, "verified": r.verified(), "report": to_value(&r)? }));
    }
    let mut v = json!({ "seed": a.seed, "cubes": cubes });
    if a.instances > 0 {
        let bx = LatticeBox::at_origin([3, 3, 3, 2]);
        let s = audit_random_instances(a.instances, a.seed, &bx, exec).map_err(internal)?;
        ok &= s.verified();
        v["lattice"] = json!({ "box": bx, "verified": s.verified(), "summary": to_value(&s)? });
    }
    v["verified"] = Value::from(ok);
    write_report(a.out.as_deref(), v, timing)?;
    Ok(verdict(ok))
}

fn lax4d(a: &Lax4dArgs, exec: Execution, timing: bool) -> Run {
    let l: LatticePoint = a.at.parse().map_err(usage)?;
    let r = verify_lax4d(&l, exec).map_err(internal)?;
    let mut v = to_value(&r)?;
    v["at"] = Value::from(l.to_string());
    v["verified"] = Value::from(r.verified());
    write_report(a.out.as_deref(), v, timing)?;
    Ok(verdict(r.verified()))
}

fn reduction(a: &ReductionArgs, exec: Execution, timing: bool) -> Run {
    let eq = reduction_equivalence(exec).map_err(internal)?;
    let lift = lift_random(a.patches, a.seed, exec).map_err(internal)?;
    let bridge = bridge_random(a.instances, a.steps, a.seed, exec).map_err(internal)?;
    let ok = eq.verified() && lift.verified() && bridge.verified();
    let v = json!({
        "seed": a.seed,
        "equivalence": { "verified": eq.verified(), "report": to_value(&eq)? },
        "lift": { "verified": lift.verified(), "report": to_value(&lift)? },
        "bridge": { "verified": bridge.verified(), "report": to_value(&bridge)? },
        "verified": ok,
    });
    write_report(a.out.as_deref(), v, timing)?;
    Ok(verdict(ok))
}

fn csv<F: qlax_core::Field>(map: MapId, records: &[OrbitRecord<F>], fmt: impl Fn(&F) -> String) -> String {
    let mut out = String::from("n,lambda_or_t,f0,f1,f2,singular\n");
    for r in records {
        let c = &r.config;
        let singular = r.singular.as_ref().map_or("", |h| h.factor);
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.n,
            fmt(c.time(map)),
            fmt(&c.f0),
            fmt(&c.f1),
            fmt(&c.f2),
            quote(singular)
        ));
    }
    out
}

fn quote(s: &str) -> String {
    if s.contains(',') || s.contains('"') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_owned()
    }
}

fn painleve(a: &PainleveArgs) -> Run {
    let map = match cases(a.case).as_slice() {
        [m] => *m,
        _ => return Err(usage(anyhow!("`evolve painleve` takes a single case"))),
    };
    let c = load_config(&a.params)?;
    let opts = StepOptions { singular_guard: a.guard };
    let (text, singular) = match a.backend {
        Backend::Exact => {
            let recs = orbit(map, &c, a.steps, &opts);
            (csv(map, &recs, |v| v.to_string()), recs.iter().any(|r| r.singular.is_some()))
        }
        Backend::Float => {
            let recs = orbit(map, &c.to_float(), a.steps, &opts);
            (csv(map, &recs, |v| format!("{}:{}", v.re, v.im)), recs.iter().any(|r| r.singular.is_some()))
        }
    };
    emit(a.out.as_deref(), text.as_bytes()).map_err(internal)?;
    Ok(if singular { Outcome::Singular } else { Outcome::Verified })
}

fn parse_extent(s: &str) -> Result<[u32; 4], RunError> {
    let parts: Vec<u32> = s
        .split(',')
        .map(|p| p.trim().parse::<u32>())
        .collect::<Result<_, _>>()
        .with_context(|| format!("box extent `{s}`"))
        .map_err(usage)?;
    <[u32; 4]>::try_from(parts).map_err(|_| usage(anyhow!("box extent `{s}` needs four entries")))
}

fn lattice(a: &LatticeArgs, timing: bool) -> Run {
    let lo: LatticePoint = a.lo.parse().map_err(usage)?;
    let bx = LatticeBox::new(lo, parse_extent(&a.extent)?);
    let (init, seed) = match &a.init {
        Some(path) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display())).map_err(usage)?;
            let file: PatchFile = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display())).map_err(usage)?;
            (LatticePatch::<GaussianRational>::from_file(&file).map_err(usage)?, None)
        }
        None => (random_instance(a.seed, 0, &bx), Some(a.seed)),
    };
    let system = Z4System::new(init.params.clone());
    let (patch, audit) = match evolve_patch(&init, &bx, &system) {
        Ok(v) => v,
        Err(e @ (LatticeError::InitialData(_) | LatticeError::MissingParameter { .. } | LatticeError::OutOfDomain(_))) => {
            return Err(usage(e))
        }
        Err(e) => return Err(internal(e)),
    };
    if let Some(out) = &a.out {
        let mut bytes = serde_json::to_vec_pretty(&patch.to_file()).map_err(internal)?;
        bytes.push(b'\n');
        emit(Some(out), &bytes).map_err(internal)?;
    }
    let v = json!({ "box": bx, "seed": seed, "audit": to_value(&audit)? });
    write_report(a.report.as_deref(), v, timing)?;
    Ok(if !audit.singular_steps.is_empty() {
        Outcome::Singular
    } else {
        verdict(audit.consistent && audit.undefined.is_empty())
    })
}

fn projective(a: &ProjectiveArgs, timing: bool) -> Run {
    let file = ParamsFile::load(&a.params).map_err(usage)?;
    if file.p.is_none() {
        return Err(usage(anyhow!("projective mode needs `p` in the parameter file")));
    }
    let c = file.config().map_err(usage)?;
    let r = projective_reduction_compare(&c, a.steps);
    let mut v = to_value(&r)?;
    v["parameters"] = literals(&c);
    v["verified"] = Value::from(r.verified());
    write_report(a.out.as_deref(), v, timing)?;
    Ok(if r.base_point.is_some() { Outcome::Singular } else { verdict(r.verified()) })
}
