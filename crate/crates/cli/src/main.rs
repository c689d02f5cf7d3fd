//! `gaussmap`: classification, `f(w) = w̄` solving, surface generation and validation.

mod parse;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gaussmap::bianalytic::{bounds_of, solve_ef, BianalyticError, BoundsReport, EfResult, RationalFn};
use gaussmap::conjsim::{conj_canonical, e_set, Circline, ConjClass, EFixSet};
use gaussmap::hyperplanes::{
    classify_a_tol, hyperplane_total_area, mobius_from_a, symmetry_algebra, AreaResult, Exhaustion, HyperplaneCase,
    HyperplaneClass,
};
use gaussmap::weierstrass::{
    catalog, dual_immersion, family_elliptic, family_hyperbolic, family_parabolic, integrate_surface,
    phi_from_wdata, total_curvature, wdata_validate, DualChecks, Domain, Expr, GridSpec, Loop, SurfaceMesh,
    TotalCurvature, ValidationReport, WData,
};
use gaussmap::{MobiusMat, ProjPoint};
use num_complex::Complex64;
use serde::Serialize;

#[derive(Parser)]
#[command(name = "gaussmap", version, about = "Space-like stationary surfaces in R^{3,1}: classification, solving and surface export")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Tolerance override: determinant check for classify-matrix, orbit test for classify-hyperplane.
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Output file; stdout when omitted (required for gen-surface).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Obj,
}

#[derive(Subcommand)]
enum Command {
    /// Conjugate-similarity class of S in SL(2, C) and its set E_S.
    ClassifyMatrix {
        /// Entries a b c d, separately or as one quoted string.
        #[arg(required = true, num_args = 1..=4, allow_hyphen_values = true)]
        entries: Vec<String>,
    },
    /// Orbit type of the hyperplane defined by [A] in CP^3.
    ClassifyHyperplane {
        /// Components A1 A2 A3 A4, separately or as one quoted string.
        #[arg(required = true, num_args = 1..=4, allow_hyphen_values = true)]
        entries: Vec<String>,
    },
    /// Certified solutions of f(w) = conj(w) for f = P/Q.
    SolveEf {
        /// Numerator, a polynomial in w.
        #[arg(long, allow_hyphen_values = true)]
        p: String,
        /// Denominator, a polynomial in w.
        #[arg(long, allow_hyphen_values = true)]
        q: String,
    },
    /// Integrate a surface on a grid and write the mesh plus a report sidecar.
    GenSurface {
        #[command(subcommand)]
        source: Source,
    },
    /// Check W-data: gap zeros, zero/pole orders and periods on test loops.
    ValidateWdata {
        /// JSON file holding W-data; otherwise use --psi1, --psi2 and --f.
        input: Option<PathBuf>,
        #[command(flatten)]
        data: DataArgs,
    },
    /// Area of a representative hyperplane by exhaustion.
    HyperplaneArea {
        #[arg(value_enum)]
        case: Case,
        #[arg(long, value_parser = parse_real)]
        u: Option<f64>,
        #[arg(long, value_parser = parse_real)]
        alpha: Option<f64>,
        /// Maximum number of exhaustion levels.
        #[arg(long)]
        exhaustion: Option<usize>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
#[value(rename_all = "UPPER")]
enum Case {
    I,
    Ii,
    Iii,
    Iv,
    V,
}

#[derive(Subcommand)]
enum Source {
    /// A catalog entry, e.g. `elliptic-graph --param n=3`.
    Catalog {
        name: String,
        /// Parameter override `key=value`; repeatable.
        #[arg(long = "param")]
        params: Vec<String>,
        #[command(flatten)]
        mesh: MeshArgs,
    },
    /// A one-parameter family built from a holomorphic psi.
    Family {
        #[arg(value_enum)]
        kind: FamilyKind,
        #[arg(long, allow_hyphen_values = true)]
        psi: String,
        /// dh = f dz (hyperbolic and parabolic).
        #[arg(long, allow_hyphen_values = true)]
        f: Option<String>,
        /// omega = g dz (elliptic).
        #[arg(long, allow_hyphen_values = true)]
        g: Option<String>,
        #[arg(long, value_parser = parse_real)]
        u: Option<f64>,
        #[arg(long, value_parser = parse_real)]
        alpha: Option<f64>,
        /// Punctures of the plane, comma separated.
        #[arg(long, allow_hyphen_values = true)]
        punctures: Option<String>,
        #[command(flatten)]
        mesh: MeshArgs,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyKind {
    Hyperbolic,
    Elliptic,
    Parabolic,
}

#[derive(Args)]
struct MeshArgs {
    /// Vertex counts NxM (radial x angular on annuli).
    #[arg(long, default_value = "32x32")]
    grid: String,
    /// Polar grid between two radii.
    #[arg(long, num_args = 2, value_parser = parse_real, allow_hyphen_values = true, conflicts_with = "rect")]
    annulus: Option<Vec<f64>>,
    /// Center of the polar grid.
    #[arg(long, allow_hyphen_values = true)]
    center: Option<String>,
    /// Rectangular grid x0 x1 y0 y1.
    #[arg(long, num_args = 4, value_parser = parse_real, allow_hyphen_values = true)]
    rect: Option<Vec<f64>>,
    /// Extra test loops `center:radius`, separated by ';'.
    #[arg(long, allow_hyphen_values = true)]
    loops: Option<String>,
    /// Also compute the total curvature of the whole surface.
    #[arg(long)]
    total_curvature: bool,
    /// Maximum number of exhaustion levels for the total curvature.
    #[arg(long)]
    exhaustion: Option<usize>,
    /// Also write the dual minimal surface in R^4 next to the mesh.
    #[arg(long)]
    dual: bool,
}

#[derive(Args)]
struct DataArgs {
    #[arg(long, allow_hyphen_values = true)]
    psi1: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    psi2: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    f: Option<String>,
    /// Punctures of the plane, comma separated.
    #[arg(long, allow_hyphen_values = true)]
    punctures: Option<String>,
    /// Extra test loops `center:radius`, separated by ';'.
    #[arg(long, allow_hyphen_values = true)]
    loops: Option<String>,
}

fn parse_real(s: &str) -> Result<f64, String> {
    let z = parse::complex(s)?;
    if z.im != 0.0 {
        return Err(format!("'{s}' is not real"));
    }
    Ok(z.re)
}

/// Failure classes and their exit codes.
#[derive(Debug)]
enum Failure {
    /// The computation finished but its checks failed; the report was written.
    Validation,
    /// Bad input or configuration.
    Config(String),
    /// A numerical routine gave up.
    Compute(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Validation => 2,
            Failure::Config(_) => 3,
            Failure::Compute(_) => 1,
        }
    }
}

fn config<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Config(e.to_string())
}

type Outcome = Result<(), Failure>;

fn json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("reports serialize");
    s.push('\n');
    s
}

fn emit(out: Option<&Path>, text: &str) -> Outcome {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| config(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn require_format(given: Option<Format>, allowed: &[Format], default: Format, cmd: &str) -> Result<Format, Failure> {
    let f = given.unwrap_or(default);
    if allowed.contains(&f) {
        Ok(f)
    } else {
        Err(Failure::Config(format!("format not supported by {cmd}")))
    }
}

fn no_tol(tol: Option<f64>, cmd: &str) -> Outcome {
    match tol {
        Some(_) => Err(Failure::Config(format!("--tol does not apply to {cmd}"))),
        None => Ok(()),
    }
}

fn entries<const N: usize>(raw: &[String]) -> Result<[Complex64; N], Failure> {
    let v = parse::complex_list(&raw.join(" ")).map_err(Failure::Config)?;
    v.try_into().map_err(|v: Vec<Complex64>| Failure::Config(format!("expected {N} entries, got {}", v.len())))
}

#[derive(Serialize)]
struct MatrixReport {
    /// The input normalized to determinant one.
    matrix: MobiusMat,
    notice: Option<String>,
    class: ConjClass,
    e_set: EFixSet,
    /// Real dimension of the symmetry algebra `{X : X̄S = SX}`.
    symmetry_dimension: usize,
}

fn classify_matrix(raw: &[String], tol: Option<f64>) -> Outcome {
    let tol = tol.unwrap_or(1e-6);
    let [a, b, c, d] = entries::<4>(raw)?;
    let det = a * d - b * c;
    let s = MobiusMat::new(a, b, c, d).map_err(|e| Failure::Config(format!("degenerate input: {e}")))?;
    let notice = ((det - Complex64::new(1.0, 0.0)).norm() > tol).then(|| format!("det = {det} renormalized to 1"));
    if let Some(n) = &notice {
        eprintln!("notice: {n}");
    }
    let report = MatrixReport {
        class: conj_canonical(&s),
        e_set: e_set(&s),
        symmetry_dimension: symmetry_algebra(&s).dimension,
        matrix: s,
        notice,
    };
    emit(None, &json(&report))
}

#[derive(Serialize)]
struct HyperplaneReport {
    a: [Complex64; 4],
    class: HyperplaneClass,
    /// `S` with `H_A` the graph of `M_S`, when `[A]` is off the quadric.
    mobius: Option<MobiusMat>,
}

fn classify_hyperplane(raw: &[String], tol: Option<f64>) -> Outcome {
    let tol = tol.unwrap_or(1e-9);
    let a = entries::<4>(raw)?;
    let p = ProjPoint::from_components(a).map_err(config)?;
    let report = HyperplaneReport { a, class: classify_a_tol(&p, tol), mobius: mobius_from_a(&p).ok() };
    emit(None, &json(&report))
}

#[derive(Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum SolveReport {
    Discrete { f: RationalFn, result: EfResult, bounds: BoundsReport },
    /// `m ≤ 1` with `f` a reflection: `E_f` is a whole circline.
    Circline { f: RationalFn, circline: Circline },
}

fn solve(p: &str, q: &str, format: Format, out: Option<&Path>) -> Outcome {
    let p = parse::polynomial(p).map_err(Failure::Config)?;
    let q = parse::polynomial(q).map_err(Failure::Config)?;
    let f = RationalFn::new(p, q).map_err(config)?;
    let report = match solve_ef(&f) {
        Ok(result) => SolveReport::Discrete { bounds: bounds_of(&result), f, result },
        Err(BianalyticError::DegenerateNondiscrete(circline)) => SolveReport::Circline { f, circline },
        Err(e) => return Err(Failure::Compute(e.to_string())),
    };
    let text = match format {
        Format::Csv => {
            let mut s = String::from("re,im,index,winding,residual,low_confidence\n");
            if let SolveReport::Discrete { result, .. } = &report {
                for r in &result.roots {
                    s += &format!("{},{},{},{},{},{}\n", r.root.re, r.root.im, r.index, r.winding, r.residual, r.low_confidence);
                }
                if let Some(k) = result.infinity_index.filter(|_| result.infinity_member) {
                    s += &format!("inf,inf,{k},,,false\n");
                }
            }
            s
        }
        _ => json(&report),
    };
    emit(out, &text)
}

fn parse_loops(s: &str) -> Result<Vec<Loop>, Failure> {
    s.split(';')
        .filter(|t| !t.trim().is_empty())
        .map(|t| {
            let (c, r) = t.split_once(':').ok_or_else(|| Failure::Config(format!("loop '{t}' is not center:radius")))?;
            let radius = parse_real(r).map_err(Failure::Config)?;
            Ok(Loop { center: parse::complex(c).map_err(Failure::Config)?, radius })
        })
        .collect()
}

fn expr(s: &str) -> Result<Expr, Failure> {
    s.parse().map_err(|e| Failure::Config(format!("'{s}': {e}")))
}

fn domain_from(punctures: Option<&str>, loops: Option<&str>) -> Result<Domain, Failure> {
    let punctures = match punctures {
        Some(p) => parse::complex_list(p).map_err(Failure::Config)?,
        None => Vec::new(),
    };
    let mut d = Domain::punctured_plane(punctures);
    if let Some(l) = loops {
        d.loops.extend(parse_loops(l)?);
    }
    d.validate().map_err(config)?;
    Ok(d)
}

fn validate(input: Option<&Path>, data: &DataArgs, out: Option<&Path>) -> Outcome {
    let mut w: WData = match input {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| config(format!("cannot read {}: {e}", path.display())))?;
            serde_json::from_str(&text).map_err(config)?
        }
        None => {
            let need = |v: &Option<String>, name: &str| v.clone().ok_or_else(|| Failure::Config(format!("--{name} is required without an input file")));
            WData {
                name: None,
                psi1: expr(&need(&data.psi1, "psi1")?)?,
                psi2: expr(&need(&data.psi2, "psi2")?)?,
                f: expr(&need(&data.f, "f")?)?,
                domain: domain_from(data.punctures.as_deref(), None)?,
            }
        }
    };
    if let Some(l) = &data.loops {
        w.domain.loops.extend(parse_loops(l)?);
    }
    w.domain.validate().map_err(config)?;
    let report = wdata_validate(&w);
    emit(out, &json(&report))?;
    if report.ok() {
        Ok(())
    } else {
        Err(Failure::Validation)
    }
}

fn area(case: Case, u: Option<f64>, alpha: Option<f64>, exhaustion: Option<usize>, out: Option<&Path>) -> Outcome {
    let need = |v: Option<f64>, name: &str| v.ok_or_else(|| Failure::Config(format!("--{name} is required for this case")));
    let case = match case {
        Case::I => HyperplaneCase::I,
        Case::Ii => HyperplaneCase::II,
        Case::Iii => HyperplaneCase::III { u: need(u, "u")? },
        Case::Iv => HyperplaneCase::IV { alpha: need(alpha, "alpha")? },
        Case::V => HyperplaneCase::V,
    };
    let schedule = schedule(exhaustion)?;
    let result = hyperplane_total_area(case, &schedule).map_err(config)?;
    #[derive(Serialize)]
    struct AreaReport {
        case: HyperplaneCase,
        result: AreaResult,
    }
    emit(out, &json(&AreaReport { case, result }))
}

fn schedule(levels: Option<usize>) -> Result<Exhaustion, Failure> {
    let mut s = Exhaustion::default();
    if let Some(k) = levels {
        if k < 2 {
            return Err(Failure::Config("--exhaustion needs at least 2 levels".into()));
        }
        s.max_levels = k;
        s.divergence_level = s.divergence_level.min(k);
    }
    Ok(s)
}

#[derive(Serialize)]
struct CurvatureStats {
    min: f64,
    max: f64,
    mean: f64,
    /// Vertices where the metric degenerates.
    undefined: usize,
}

#[derive(Serialize)]
struct SurfaceReport {
    source: String,
    wdata: WData,
    grid: Option<GridSpec>,
    vertices: usize,
    faces: usize,
    path_discrepancy: Option<f64>,
    diameter: Option<f64>,
    /// `max |Σ φₖ²| / Σ |φₖ|²` over the grid.
    null_residual: Option<f64>,
    curvature: Option<CurvatureStats>,
    validation: ValidationReport,
    expected_total_curvature: Option<f64>,
    total_curvature: Option<TotalCurvature>,
    dual: Option<DualChecks>,
    error: Option<String>,
}

fn grid_for(args: &MeshArgs, domain: &Domain) -> Result<GridSpec, Failure> {
    let (n, m) = parse::grid(&args.grid).map_err(Failure::Config)?;
    if let Some(r) = &args.rect {
        return Ok(GridSpec::Rect { re: [r[0], r[1]], im: [r[2], r[3]], n, m });
    }
    let center = match &args.center {
        Some(c) => Some(parse::complex(c).map_err(Failure::Config)?),
        None => None,
    };
    if let Some(r) = &args.annulus {
        let center = center.or_else(|| domain.punctures.first().copied()).unwrap_or_default();
        return Ok(GridSpec::Polar { center, radii: [r[0], r[1]], n_r: n, n_theta: m });
    }
    match (domain.region, domain.punctures.as_slice()) {
        (gaussmap::weierstrass::Region::Rectangle { re, im }, _) => Ok(GridSpec::Rect { re, im, n, m }),
        (_, []) => Ok(GridSpec::Rect { re: [-1.0, 1.0], im: [-1.0, 1.0], n, m }),
        (_, [p]) => Ok(GridSpec::Polar { center: center.unwrap_or(*p), radii: [0.5, 2.0], n_r: n, n_theta: m }),
        _ => Err(Failure::Config("the domain has several punctures; pass --annulus or --rect".into())),
    }
}

fn stats(mesh: &SurfaceMesh) -> CurvatureStats {
    let finite: Vec<f64> = mesh.curvature.iter().copied().filter(|k| k.is_finite()).collect();
    let mean = if finite.is_empty() { f64::NAN } else { finite.iter().sum::<f64>() / finite.len() as f64 };
    CurvatureStats {
        min: finite.iter().copied().fold(f64::INFINITY, f64::min),
        max: finite.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        mean,
        undefined: mesh.curvature.len() - finite.len(),
    }
}

fn mesh_text(mesh: &SurfaceMesh, format: Format) -> String {
    match format {
        Format::Obj => mesh.to_obj(),
        Format::Csv => mesh.to_csv(),
        Format::Json => json(mesh),
    }
}

/// `surface.obj` → `surface.<tag>.<ext>`.
fn sibling(out: &Path, tag: &str) -> PathBuf {
    let ext = out.extension().and_then(|e| e.to_str()).unwrap_or("out");
    out.with_extension(format!("{tag}.{ext}"))
}

fn gen_surface(source: &Source, format: Format, out: Option<&Path>) -> Outcome {
    let out = out.ok_or_else(|| Failure::Config("gen-surface needs --out".into()))?;
    let (w, label, expected, args) = match source {
        Source::Catalog { name, params, mesh } => {
            let full = if params.is_empty() {
                name.clone()
            } else if name.contains('(') {
                return Err(Failure::Config("give parameters in the name or with --param, not both".into()));
            } else {
                format!("{name}({})", params.join(","))
            };
            let mut entry = catalog(&full).map_err(config)?;
            if let Some(l) = &mesh.loops {
                entry.wdata.domain.loops.extend(parse_loops(l)?);
            }
            (entry.wdata, entry.name, entry.expected.total_curvature, mesh)
        }
        Source::Family { kind, psi, f, g, u, alpha, punctures, mesh } => {
            let domain = domain_from(punctures.as_deref(), mesh.loops.as_deref())?;
            let psi_e = expr(psi)?;
            let need = |v: &Option<String>, name: &str| -> Result<Expr, Failure> {
                expr(v.as_deref().ok_or_else(|| Failure::Config(format!("--{name} is required for this family")))?)
            };
            let needf = |v: Option<f64>, name: &str| v.ok_or_else(|| Failure::Config(format!("--{name} is required for this family")));
            let w = match kind {
                FamilyKind::Hyperbolic => family_hyperbolic(psi_e, need(f, "f")?, needf(*u, "u")?, domain),
                FamilyKind::Elliptic => family_elliptic(psi_e, need(g, "g")?, needf(*alpha, "alpha")?, domain),
                FamilyKind::Parabolic => family_parabolic(psi_e, need(f, "f")?, domain),
            }
            .map_err(config)?;
            (w, format!("family {}", kind.to_possible_value().expect("named").get_name()), None, mesh)
        }
    };
    let grid = grid_for(args, &w.domain)?;
    let base = grid.point(0, 0);
    let validation = wdata_validate(&w);
    let mut report = SurfaceReport {
        source: label,
        wdata: w.clone(),
        grid: Some(grid),
        vertices: 0,
        faces: 0,
        path_discrepancy: None,
        diameter: None,
        null_residual: None,
        curvature: None,
        validation,
        expected_total_curvature: expected,
        total_curvature: None,
        dual: None,
        error: None,
    };
    match integrate_surface(&w, grid, base) {
        Ok(mesh) => {
            report.vertices = mesh.positions.len();
            report.faces = mesh.faces.len();
            report.path_discrepancy = Some(mesh.path_discrepancy);
            report.diameter = Some(mesh.diameter);
            report.curvature = Some(stats(&mesh));
            report.null_residual = Some(mesh.params.iter().filter_map(|&z| phi_from_wdata(&w, z).ok()).fold(0.0, |m, phi| {
                m.max(phi.bilinear(&phi).norm() / phi.norm().powi(2).max(f64::MIN_POSITIVE))
            }));
            emit(Some(out), &mesh_text(&mesh, format))?;
        }
        Err(e) => report.error = Some(e.to_string()),
    }
    if args.dual && report.error.is_none() {
        match dual_immersion(&w, grid, base) {
            Ok(d) => {
                report.dual = Some(d.checks);
                emit(Some(&sibling(out, "dual")), &mesh_text(&d.mesh, format))?;
            }
            Err(e) => report.error = Some(format!("dual: {e}")),
        }
    }
    if args.total_curvature {
        match total_curvature(&w, &schedule(args.exhaustion)?) {
            Ok(t) => report.total_curvature = Some(t),
            Err(e) => report.error = Some(format!("total curvature: {e}")),
        }
    }
    emit(Some(&out.with_extension("report.json")), &json(&report))?;
    if report.error.is_some() || !report.validation.ok() {
        return Err(Failure::Validation);
    }
    Ok(())
}

fn run(cli: Cli) -> Outcome {
    if cli.tol.is_some_and(|t| !(t > 0.0 && t.is_finite())) {
        return Err(Failure::Config("--tol must be positive".into()));
    }
    let out = cli.out.as_deref();
    match &cli.command {
        Command::ClassifyMatrix { entries } => {
            require_format(cli.format, &[Format::Json], Format::Json, "classify-matrix")?;
            if out.is_some() {
                return Err(Failure::Config("classify-matrix prints to stdout".into()));
            }
            classify_matrix(entries, cli.tol)
        }
        Command::ClassifyHyperplane { entries } => {
            require_format(cli.format, &[Format::Json], Format::Json, "classify-hyperplane")?;
            if out.is_some() {
                return Err(Failure::Config("classify-hyperplane prints to stdout".into()));
            }
            classify_hyperplane(entries, cli.tol)
        }
        Command::SolveEf { p, q } => {
            no_tol(cli.tol, "solve-ef")?;
            let format = require_format(cli.format, &[Format::Json, Format::Csv], Format::Json, "solve-ef")?;
            solve(p, q, format, out)
        }
        Command::GenSurface { source } => {
            no_tol(cli.tol, "gen-surface")?;
            let format = require_format(cli.format, &[Format::Obj, Format::Csv, Format::Json], Format::Obj, "gen-surface")?;
            gen_surface(source, format, out)
        }
        Command::ValidateWdata { input, data } => {
            no_tol(cli.tol, "validate-wdata")?;
            require_format(cli.format, &[Format::Json], Format::Json, "validate-wdata")?;
            validate(input.as_deref(), data, out)
        }
        Command::HyperplaneArea { case, u, alpha, exhaustion } => {
            no_tol(cli.tol, "hyperplane-area")?;
            require_format(cli.format, &[Format::Json], Format::Json, "hyperplane-area")?;
            area(*case, *u, *alpha, *exhaustion, out)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(3);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Validation => eprintln!("validation failed; see the report"),
                Failure::Config(m) => eprintln!("error: {m}"),
                Failure::Compute(m) => eprintln!("computation failed: {m}"),
            }
            ExitCode::from(f.code())
        }
    }
}
