//! Subcommand bodies.

use std::fs;
use std::path::Path;
use std::time::Instant;

use dscatter::cauchy::{conj_cauchy_transform, cauchy_transform, dbar, fractional_integral, partial};
use dscatter::fourier::{forward_transform, inverse_transform};
use dscatter::grids::{read_grid, write_csv, write_grid, GridError};
use dscatter::matroid::{verify_lemma_geom, FamilyKind, MatroidError};
use dscatter::scattering::{
    inverse_scatter, plancherel_defect, roundtrip_error, scatter_grid, Method, MethodUsed, ScatterError, ScatterGrid,
    SolverOptions,
};
use dscatter::series::{default_probes, dbar_k_residual, expand, SeriesError};
use dscatter::sobolev::{embedding_report, sobolev_norm, NormError, SobolevParams};
use dscatter::{make_grid, Grid, Spec};
use num_complex::Complex;
use serde_json::json;

use crate::config::{load_config, Config};
use crate::manifest::RunManifest;
use crate::{
    CauchyArgs, CauchyOp, CheckArgs, CheckCommand, Cli, CliError, Command, ExpandArgs, FamilyArg, GenArgs, InverseArgs,
    LatticeArgs, MatroidArgs, MethodArg, NormsArgs, PotentialKind, ScatterArgs, SolverArgs, TransformArgs,
};

const DEFAULT_N: usize = 128;
const DEFAULT_L: f64 = 8.0;
const DEFAULT_KN: usize = 32;
const DEFAULT_KL: f64 = 4.0;
const DEFAULT_TOL: f64 = 1e-10;
const DEFAULT_MAX_ITER: usize = 200;
const PLANCHEREL_LIMIT: f64 = 1e-3;
const ROUNDTRIP_LIMIT: f64 = 1e-2;
const DBAR_K_LIMIT: f64 = 5e-2;

/// Shared state for one invocation.
struct Run {
    config: Config,
    threads: usize,
    manifest: RunManifest,
}

impl From<GridError> for CliError {
    fn from(e: GridError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<ScatterError> for CliError {
    fn from(e: ScatterError) -> Self {
        match e {
            ScatterError::InvalidOptions(_) | ScatterError::Grid(_) => CliError::Usage(e.to_string()),
            _ => CliError::Numeric(e.to_string()),
        }
    }
}

impl From<SeriesError> for CliError {
    fn from(e: SeriesError) -> Self {
        match e {
            SeriesError::Scatter(s) => s.into(),
            SeriesError::IdentityViolated { .. } => CliError::Numeric(e.to_string()),
            SeriesError::Grid(_) | SeriesError::ProbeOffGrid(_) | SeriesError::LatticeTooSmall(_) => {
                CliError::Usage(e.to_string())
            }
        }
    }
}

impl From<MatroidError> for CliError {
    fn from(e: MatroidError) -> Self {
        match e {
            MatroidError::OrderTooSmall { .. } | MatroidError::OrderTooLarge { .. } => CliError::Usage(e.to_string()),
            _ => CliError::Numeric(e.to_string()),
        }
    }
}

impl From<NormError> for CliError {
    fn from(e: NormError) -> Self {
        CliError::Usage(e.to_string())
    }
}

fn subcommand_name(c: &Command) -> &'static str {
    match c {
        Command::Gen(_) => "gen",
        Command::Fft(_) => "fft",
        Command::Cauchy(_) => "cauchy",
        Command::Scatter(_) => "scatter",
        Command::Inverse(_) => "inverse",
        Command::Expand(_) => "expand",
        Command::Check(CheckCommand::Plancherel(_)) => "check plancherel",
        Command::Check(CheckCommand::Roundtrip(_)) => "check roundtrip",
        Command::Check(CheckCommand::DbarK(_)) => "check dbar-k",
        Command::Matroid(_) => "matroid",
        Command::Norms(_) => "norms",
    }
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    let start = Instant::now();
    let config = match &cli.config {
        Some(path) => load_config(path)?,
        None => Config::default(),
    };
    let fallback = std::thread::available_parallelism().map_or(1, |n| n.get());
    let threads = config.resolve(cli.threads, "threads", fallback)?;
    if threads == 0 {
        return Err(CliError::Usage("--threads must be at least 1".into()));
    }
    let mut run = Run { config, threads, manifest: RunManifest::new(subcommand_name(&cli.command)) };
    run.manifest.param("threads", threads);

    let outcome = match &cli.command {
        Command::Gen(a) => run.gen(a),
        Command::Fft(a) => run.fft(a),
        Command::Cauchy(a) => run.cauchy(a),
        Command::Scatter(a) => run.scatter(a),
        Command::Inverse(a) => run.inverse(a),
        Command::Expand(a) => run.expand(a),
        Command::Check(CheckCommand::Plancherel(a)) => run.check_plancherel(a),
        Command::Check(CheckCommand::Roundtrip(a)) => run.check_roundtrip(a),
        Command::Check(CheckCommand::DbarK(a)) => run.check_dbar_k(a),
        Command::Matroid(a) => run.matroid(a),
        Command::Norms(a) => run.norms(a),
    };
    let mut manifest = run.manifest;
    manifest.wall_time_s = start.elapsed().as_secs_f64();
    if let Err(e) = &outcome {
        manifest.report = json!({ "error": e.to_string() });
    }
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes") + "\n";
    match &cli.manifest {
        Some(path) => write_bytes(path, text.as_bytes())?,
        None => print!("{text}"),
    }
    outcome?;
    if !manifest.passed() {
        let failed: Vec<_> = manifest.checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
        return Err(CliError::CheckFailed(failed.join(", ")));
    }
    Ok(())
}

fn write_bytes(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    fs::write(path, bytes).map_err(|source| CliError::Io { path: path.display().to_string(), source })
}

fn method_of(m: MethodArg) -> Method {
    match m {
        MethodArg::NeumannThenKrylov => Method::NeumannThenKrylov,
        MethodArg::NeumannOnly => Method::NeumannOnly,
        MethodArg::KrylovOnly => Method::KrylovOnly,
    }
}

impl Run {
    fn read(&mut self, path: &Path) -> Result<Grid, CliError> {
        let shown = path.display().to_string();
        let bytes = fs::read(path).map_err(|source| CliError::Io { path: shown.clone(), source })?;
        self.manifest.input(&shown, &bytes);
        read_grid(&bytes).map_err(|source| CliError::Format { path: shown, source })
    }

    fn write(&mut self, path: &Path, grid: &Grid, csv: Option<&Path>) -> Result<(), CliError> {
        write_bytes(path, &write_grid(grid))?;
        self.manifest.outputs.push(path.display().to_string());
        if let Some(csv) = csv {
            let mut buf = Vec::new();
            write_csv(grid, &mut buf).map_err(|source| CliError::Io { path: csv.display().to_string(), source })?;
            write_bytes(csv, &buf)?;
            self.manifest.outputs.push(csv.display().to_string());
        }
        Ok(())
    }

    fn solver(&mut self, a: &SolverArgs) -> Result<SolverOptions, CliError> {
        let tol = self.config.resolve(a.tol, "tol", DEFAULT_TOL)?;
        let max_iter = self.config.resolve(a.max_iter, "max_iter", DEFAULT_MAX_ITER)?;
        let method = method_of(self.config.resolve(a.method, "method", MethodArg::NeumannThenKrylov)?);
        self.manifest.param("tol", tol);
        self.manifest.param("max_iter", max_iter);
        self.manifest.param("method", method);
        Ok(SolverOptions::new(max_iter, tol, method)?)
    }

    fn lattice(&mut self, a: &LatticeArgs) -> Result<Spec, CliError> {
        let kn = self.config.resolve(a.kn, "kn", DEFAULT_KN)?;
        let kl = self.config.resolve(a.k_half_width, "kL", DEFAULT_KL)?;
        self.manifest.param("kn", kn);
        self.manifest.param("kL", kl);
        Ok(Spec::new(kn, kl)?)
    }

    fn x_grid(&mut self, n: Option<usize>, l: Option<f64>) -> Result<Spec, CliError> {
        let n = self.config.resolve(n, "n", DEFAULT_N)?;
        let l = self.config.resolve(l, "L", DEFAULT_L)?;
        self.manifest.param("n", n);
        self.manifest.param("L", l);
        Ok(Spec::new(n, l)?)
    }

    fn sweep_summary(&mut self, sweep: &ScatterGrid<f64>) {
        let krylov = sweep.reports.iter().filter(|r| r.method_used == MethodUsed::Krylov).count();
        let iterations = sweep.reports.iter().map(|r| r.iterations).max().unwrap_or(0);
        let residual = sweep.reports.iter().filter(|r| r.converged).map(|r| r.final_residual).fold(0.0, f64::max);
        self.manifest.report = json!({
            "k_points": sweep.reports.len(),
            "failed_points": sweep.failed.len(),
            "krylov_points": krylov,
            "max_iterations": iterations,
            "max_final_residual": residual,
        });
    }

    fn gen(&mut self, a: &GenArgs) -> Result<(), CliError> {
        let spec = self.x_grid(a.n, a.half_width)?;
        let amp = self.config.resolve(a.amp, "amp", 1.0)?;
        self.manifest.param("kind", format!("{:?}", a.kind).to_lowercase());
        self.manifest.param("amp", amp);
        let grid = match a.kind {
            PotentialKind::Gaussian => make_grid(spec, |x: f64, y: f64| Complex::new(amp * (-(x * x + y * y)).exp(), 0.0))?,
            PotentialKind::Zero => Grid::zeros(spec),
        };
        self.manifest.report = json!({ "l2_norm": grid.l2_norm() });
        self.write(&a.out, &grid, a.csv.as_deref())
    }

    fn fft(&mut self, a: &TransformArgs) -> Result<(), CliError> {
        let f = self.read(&a.input)?;
        self.manifest.param("inverse", a.inverse);
        let out = if a.inverse { inverse_transform(&f) } else { forward_transform(&f) };
        self.manifest.report = json!({
            "n": out.spec().n(),
            "half_width": out.spec().half_width(),
            "l2_norm_in": f.l2_norm(),
            "l2_norm_out": out.l2_norm(),
        });
        self.write(&a.out, &out, a.csv.as_deref())
    }

    fn cauchy(&mut self, a: &CauchyArgs) -> Result<(), CliError> {
        let f = self.read(&a.input)?;
        self.manifest.param("op", format!("{:?}", a.op).to_lowercase());
        let out = match a.op {
            CauchyOp::Cauchy => cauchy_transform(&f),
            CauchyOp::ConjCauchy => conj_cauchy_transform(&f),
            CauchyOp::Riesz => fractional_integral(&f),
            CauchyOp::Dbar => dbar(&f),
            CauchyOp::Partial => partial(&f),
        };
        self.manifest.report = json!({ "max_abs": out.max_abs(), "l2_norm": out.l2_norm() });
        self.write(&a.out, &out, a.csv.as_deref())
    }

    fn scatter(&mut self, a: &ScatterArgs) -> Result<(), CliError> {
        let q = self.read(&a.q)?;
        let kspec = self.lattice(&a.lattice)?;
        let opts = self.solver(&a.solver)?;
        let sweep = scatter_grid(&q, kspec, opts, self.threads)?;
        self.sweep_summary(&sweep);
        self.write(&a.out, &sweep.values, a.csv.as_deref())
    }

    fn inverse(&mut self, a: &InverseArgs) -> Result<(), CliError> {
        let r = self.read(&a.r)?;
        let xspec = self.x_grid(a.n, a.half_width)?;
        let opts = self.solver(&a.solver)?;
        let sweep = inverse_scatter(&r, xspec, opts, self.threads)?;
        self.sweep_summary(&sweep);
        self.write(&a.out, &sweep.values, a.csv.as_deref())
    }

    fn expand(&mut self, a: &ExpandArgs) -> Result<(), CliError> {
        if a.order == 0 {
            return Err(CliError::Usage("--N must be at least 1".into()));
        }
        let q = self.read(&a.q)?;
        let kspec = self.lattice(&a.lattice)?;
        let opts = self.solver(&a.solver)?;
        self.manifest.param("N", a.order);
        let ex = expand(&q, kspec, a.order, opts, self.threads)?;
        let mut norms = Vec::new();
        for (j, term) in ex.terms.iter().enumerate() {
            norms.push(term.l2_norm());
            self.write(Path::new(&format!("{}{j}.cgrd", a.out_prefix)), term, None)?;
        }
        self.write(Path::new(&format!("{}remainder.cgrd", a.out_prefix)), &ex.remainder, None)?;
        self.manifest.report = json!({
            "term_l2_norms": norms,
            "remainder_l2_norm": ex.remainder.l2_norm(),
            "scattering_l2_norm": ex.scattering.l2_norm(),
            "identity_defect": ex.identity_defect,
        });
        self.manifest.check_at_most("partial-sum identity", ex.identity_defect, 10.0 * opts.residual_tolerance());
        Ok(())
    }

    fn check_plancherel(&mut self, a: &CheckArgs) -> Result<(), CliError> {
        let q = self.read(&a.q)?;
        let kspec = self.lattice(&a.lattice)?;
        let opts = self.solver(&a.solver)?;
        let limit = a.limit.unwrap_or(PLANCHEREL_LIMIT);
        let sweep = scatter_grid(&q, kspec, opts, self.threads)?;
        let report = plancherel_defect(&q, &sweep);
        self.manifest.report = json!({
            "defect": report.defect,
            "q_norm_sqr": report.q_norm_sqr,
            "r_norm_sqr": report.r_norm_sqr,
            "failed_points": report.failed_points,
        });
        self.manifest.check_at_most("plancherel defect", report.defect, limit);
        Ok(())
    }

    fn check_roundtrip(&mut self, a: &CheckArgs) -> Result<(), CliError> {
        let q = self.read(&a.q)?;
        let kspec = self.lattice(&a.lattice)?;
        let opts = self.solver(&a.solver)?;
        let limit = a.limit.unwrap_or(ROUNDTRIP_LIMIT);
        let forward = scatter_grid(&q, kspec, opts, self.threads)?;
        let back = inverse_scatter(&forward.values, *q.spec(), opts, self.threads)?;
        let error = roundtrip_error(&q, &back.values)?;
        self.manifest.report = json!({
            "relative_error": error,
            "failed_points": forward.failed.len() + back.failed.len(),
        });
        self.manifest.check_at_most("roundtrip relative error", error, limit);
        Ok(())
    }

    fn check_dbar_k(&mut self, a: &CheckArgs) -> Result<(), CliError> {
        let q = self.read(&a.q)?;
        let kspec = self.lattice(&a.lattice)?;
        let opts = self.solver(&a.solver)?;
        let limit = a.limit.unwrap_or(DBAR_K_LIMIT);
        let report = dbar_k_residual(&q, kspec, &default_probes(), opts, self.threads)?;
        self.manifest.report = serde_json::to_value(&report).expect("report serializes");
        self.manifest.check_at_most("dbar-k residual", report.residual, limit);
        Ok(())
    }

    fn matroid(&mut self, a: &MatroidArgs) -> Result<(), CliError> {
        let kind = match a.family {
            FamilyArg::E1 => FamilyKind::E1,
            FamilyArg::E2 => FamilyKind::E2,
        };
        self.manifest.param("family", kind);
        self.manifest.param("N", a.order);
        let report = verify_lemma_geom(kind, a.order)?;
        for p in &report.pairs {
            let status = p.failure.map_or("pass".to_string(), |f| format!("FAIL ({f})"));
            eprintln!("{:>8} {:>8}  B1={:?} B2={:?}  {status}", p.v.to_string(), p.w.to_string(), p.pair.b1, p.pair.b2);
        }
        let failed = report.failed_pairs().count();
        eprintln!(
            "{kind} N={}: {} pairs, {failed} failed; average = 1/2: {}; certificate valid: {} ({} vertices, min weight {}); span rank {}/{}",
            a.order,
            report.pairs.len(),
            report.average_is_half,
            report.certificate_valid,
            report.vertices,
            report.min_weight,
            report.span_rank,
            report.required_rank
        );
        let flag = |b: bool| if b { 0.0 } else { 1.0 };
        self.manifest.check_at_most("failed pairs", failed as f64, 0.0);
        self.manifest.check_at_most("phi points invalid", flag(report.phi_points_valid), 0.0);
        self.manifest.check_at_most("average differs from 1/2", flag(report.average_is_half), 0.0);
        self.manifest.check_at_most("certificate invalid", flag(report.certificate_valid), 0.0);
        self.manifest.check_at_most("rank deficit", (report.required_rank - report.span_rank.min(report.required_rank)) as f64, 0.0);
        self.manifest.report = if a.json {
            serde_json::to_value(&report).expect("report serializes")
        } else {
            json!({
                "pairs": report.pairs.len(),
                "failed_pairs": failed,
                "vertices": report.vertices,
                "min_weight": report.min_weight,
                "span_rank": report.span_rank,
                "required_rank": report.required_rank,
            })
        };
        Ok(())
    }

    fn norms(&mut self, a: &NormsArgs) -> Result<(), CliError> {
        let f = self.read(&a.input)?;
        let params = SobolevParams::new(a.alpha, a.beta)?;
        self.manifest.param("alpha", a.alpha);
        self.manifest.param("beta", a.beta);
        self.manifest.report = json!({
            "l2_norm": f.l2_norm(),
            "sobolev_norm": sobolev_norm(&f, params),
            "swapped_sobolev_norm": sobolev_norm(&f, params.swapped()),
            "embedding": embedding_report(&f, params),
        });
        Ok(())
    }
}
