use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use simmap::fixtures;
use simmap::io::{read_obj, write_obj, write_textured_obj, ObjMesh, SignatureSpec, TexturedMesh};
use simmap::layout::{SeamlessReport, SEAMLESS_TOLERANCE};
use simmap::mesh::{DualCycle, HalfedgeMesh};
use simmap::solver::{default_loops, solve as run_solver, SolveOptions};
use simmap::{CornerMetric, EdgeMetric, Error, HolonomySignature};

use crate::report::{BasisDescription, Cone, RunReport, SeamlessSummary, Status, Timing};
use crate::{BasisArgs, FixtureArgs, FixtureKind, SolveArgs, VerifyArgs};

const EXIT_OK: u8 = 0;
const EXIT_VALIDATION: u8 = 1;
const EXIT_NOT_CONVERGED: u8 = 2;
const EXIT_IO: u8 = 3;

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Io(_) => EXIT_IO,
        Error::MaxIterations(_)
        | Error::LineSearchStalled(_)
        | Error::InfiniteFlipSuspected(_)
        | Error::SingularSystem { .. }
        | Error::FlipBlocked(_)
        | Error::ZeroLengthDiagonal(_)
        | Error::LoopThroughDegenerateQuad { .. }
        | Error::LoopCurvatureChanged { .. } => EXIT_NOT_CONVERGED,
        _ => EXIT_VALIDATION,
    }
}

/// Prefixes I/O errors with the path involved.
fn at(path: &Path) -> impl Fn(Error) -> Error + '_ {
    move |e| match e {
        Error::Io(m) => Error::Io(format!("{}: {m}", path.display())),
        other => other,
    }
}

fn fail(e: &Error) -> u8 {
    eprintln!("error: {e}");
    exit_code(e)
}

fn write_file(path: &Path, contents: &str) -> Result<(), Error> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, contents).map_err(|e| at(path)(e.into()))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), Error> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Error::Io(e.to_string()))?;
    text.push('\n');
    write_file(path, &text)
}

/// Loops from `# loop` comments when present, otherwise a tree–cotree basis.
fn loops_of(obj: &ObjMesh, mesh: &HalfedgeMesh) -> Result<Vec<DualCycle>, Error> {
    if obj.loops.is_empty() {
        return default_loops(mesh);
    }
    obj.loop_faces().iter().map(|faces| DualCycle::from_faces(mesh, faces)).collect()
}

fn read_spec(path: Option<&PathBuf>) -> Result<SignatureSpec, Error> {
    path.map_or_else(|| Ok(SignatureSpec::default()), |p| SignatureSpec::read(p).map_err(at(p)))
}

fn cones(sig: &HolonomySignature) -> Vec<Cone> {
    sig.vertex_k
        .iter()
        .enumerate()
        .filter(|(_, &k)| k != 4)
        .map(|(vertex, &k)| Cone { vertex, k })
        .collect()
}

struct Prepared {
    obj: ObjMesh,
    mesh: HalfedgeMesh,
    metric: EdgeMetric,
    loops: Vec<DualCycle>,
    spec: SignatureSpec,
}

fn prepare(args: &SolveArgs) -> Result<Prepared, Error> {
    let obj = read_obj(&args.mesh).map_err(at(&args.mesh))?;
    let mut spec = read_spec(args.signature.as_ref())?;
    if args.excluded_vertex.is_some() {
        spec.excluded_vertex = args.excluded_vertex;
    }
    let mesh = obj.build()?;
    let metric = EdgeMetric::from_positions(&mesh, &obj.positions)?;
    let loops = loops_of(&obj, &mesh)?;
    Ok(Prepared {
        obj,
        mesh,
        metric,
        loops,
        spec,
    })
}

pub fn solve(args: &SolveArgs) -> u8 {
    let start = Instant::now();
    let trace_path = args
        .trace
        .clone()
        .unwrap_or_else(|| args.report.with_file_name("trace.csv"));
    let p = match prepare(args) {
        Ok(p) => p,
        Err(e) => return fail(&e),
    };
    let genus = match p.mesh.genus() {
        Ok(g) => g,
        Err(e) => return fail(&e),
    };
    let mut report = RunReport {
        status: Status::InfeasibleSignature,
        error: None,
        iterations: 0,
        flips: 0,
        residual_inf: None,
        energy: None,
        cones: vec![],
        basis: None,
        seamless: None,
        timing: Timing { seconds: 0.0 },
    };
    let finish = |mut report: RunReport, code: u8| -> u8 {
        report.timing.seconds = start.elapsed().as_secs_f64();
        if let Err(e) = write_json(&args.report, &report) {
            return fail(&e);
        }
        code
    };

    let initial = CornerMetric::from_edge_metric(&p.mesh, &p.metric);
    let sig = match p.spec.resolve(&initial, &p.loops) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            report.status = Status::of_error(&e);
            report.error = Some(e.to_string());
            return finish(report, exit_code(&e));
        }
    };
    report.cones = cones(&sig);
    report.basis = Some(BasisDescription::new(genus, sig.excluded, &p.loops, Some(&sig.loop_k)));

    let options = SolveOptions {
        tolerance: args.tol,
        max_iterations: args.max_iters,
        flip_budget: args.flip_budget,
        ..SolveOptions::default()
    };
    let sol = match run_solver(&p.mesh, &p.metric, p.loops.clone(), &sig, &options) {
        Ok(sol) => sol,
        Err(failure) => {
            eprintln!("error: {}", failure.error);
            report.status = Status::of_error(&failure.error);
            report.error = Some(failure.error.to_string());
            if let Some(state) = &failure.state {
                report.iterations = state.iterations;
                report.flips = state.flips;
            }
            if let Some(last) = failure.trace.records.last() {
                report.residual_inf = Some(last.residual_inf);
                report.energy = Some(last.energy);
            }
            if let Err(e) = write_file(&trace_path, &failure.trace.to_csv()) {
                return fail(&e);
            }
            return finish(report, exit_code(&failure.error));
        }
    };
    report.status = Status::Converged;
    report.iterations = sol.iterations;
    report.flips = sol.flips;
    report.residual_inf = Some(sol.residual_inf);
    report.energy = Some(sol.energy);
    report.basis = Some(BasisDescription::new(genus, sig.excluded, &sol.loops, Some(&sig.loop_k)));
    if let Err(e) = write_file(&trace_path, &sol.trace.to_csv()) {
        return fail(&e);
    }

    let param = match sol.parametrize() {
        Ok(param) => param,
        Err(e) => {
            eprintln!("error: layout failed: {e}");
            report.error = Some(e.to_string());
            return finish(report, EXIT_NOT_CONVERGED);
        }
    };
    let obj_text = write_textured_obj(&p.obj.positions, &param.cut, &param.layout.vertices, &sol.loops);
    if let Err(e) = write_file(&args.out, &obj_text) {
        return fail(&e);
    }
    let summary = SeamlessSummary::new(&param.report, SEAMLESS_TOLERANCE);
    let code = if summary.passes { EXIT_OK } else { EXIT_NOT_CONVERGED };
    report.seamless = Some(summary);
    finish(report, code)
}

#[derive(Serialize)]
struct VerifyOutput<'a> {
    passes: bool,
    tolerance: f64,
    #[serde(flatten)]
    report: &'a SeamlessReport,
}

pub fn verify(args: &VerifyArgs) -> u8 {
    let result = (|| {
        let obj = read_obj(&args.mesh).map_err(at(&args.mesh))?;
        let spec = read_spec(args.signature.as_ref())?;
        TexturedMesh::from_obj(&obj)?.verify(&spec)
    })();
    let report = match result {
        Ok(r) => r,
        Err(e) => return fail(&e),
    };
    let passes = report.passes(args.tol);
    let out = VerifyOutput {
        passes,
        tolerance: args.tol,
        report: &report,
    };
    match &args.report {
        Some(path) => {
            if let Err(e) = write_json(path, &out) {
                return fail(&e);
            }
        }
        None => println!("{}", serde_json::to_string_pretty(&out).expect("report serializes")),
    }
    eprintln!(
        "{}: quarter-turn residual {:.3e}, cycle residual {:.3e}, signature {}",
        if passes { "seamless" } else { "NOT seamless" },
        report.max_quarter_turn_residual,
        report.max_cycle_residual,
        if report.signature_matches { "matches" } else { "differs" }
    );
    if passes {
        EXIT_OK
    } else {
        EXIT_NOT_CONVERGED
    }
}

pub fn basis(args: &BasisArgs) -> u8 {
    let result = (|| {
        let obj = read_obj(&args.mesh).map_err(at(&args.mesh))?;
        let mesh = obj.build()?;
        let genus = mesh.genus()?;
        let loops = loops_of(&obj, &mesh)?;
        let excluded = args.excluded_vertex.unwrap_or(mesh.vertex_count() - 1);
        if excluded >= mesh.vertex_count() {
            return Err(Error::InfeasibleSignature(format!("excluded vertex {excluded} out of range")));
        }
        Ok(BasisDescription::new(genus, excluded, &loops, None))
    })();
    match result {
        Ok(b) => {
            println!("genus {}", b.genus);
            println!("excluded_vertex {}", b.excluded_vertex);
            println!("loops {}", b.loops.len());
            for l in &b.loops {
                let faces: Vec<String> = l.faces.iter().map(|f| f.to_string()).collect();
                println!("loop {} {}", l.index, faces.join(" "));
            }
            EXIT_OK
        }
        Err(e) => fail(&e),
    }
}

pub fn fixture(args: &FixtureArgs) -> u8 {
    let mut f = match args.kind {
        FixtureKind::Tetrahedron => fixtures::tetrahedron(),
        FixtureKind::Torus => fixtures::torus_grid(args.size.max(3), args.size.max(3)),
        FixtureKind::Icosphere => fixtures::icosphere(args.size.min(6)),
        FixtureKind::Pillow => fixtures::pillow(0.1),
        FixtureKind::GenusTwo => fixtures::genus_two(),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    if args.jitter > 0.0 {
        for p in &mut f.positions {
            for x in p.iter_mut() {
                *x += rng.random_range(-args.jitter..args.jitter);
            }
        }
    }
    let loops = match default_loops(&f.mesh) {
        Ok(l) => l,
        Err(e) => return fail(&e),
    };
    match write_file(&args.out, &write_obj(&f.positions, &f.mesh, &loops)) {
        Ok(()) => EXIT_OK,
        Err(e) => fail(&e),
    }
}
