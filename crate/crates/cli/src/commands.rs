//! Subcommand implementations. Each command resolves its input, records the
//! resolved form for the digest and returns a JSON payload or a [`Failure`].

use crate::envelope::{digest_of, error_result, Envelope};
use crate::{Cli, Command, Format, TupleInput};
use serde::Serialize;
use serde_json::{json, Value};
use spt_z2::hamiltonian::{self, Boundary, ChainSpec};
use spt_z2::io::{self, ScanSpecFile, TupleFile, VectorFile};
use spt_z2::linalg::{self, ComplexMatrix};
use spt_z2::modular::{self, BipartiteVector};
use spt_z2::mps::{self, RawTuple};
use spt_z2::reflection::{self, IndexReport, ReflectionError, SiteMap};
use spt_z2::scan::{self, FamilySpec};
use spt_z2::status::{HasStatus, Status};
use spt_z2::{zoo, Config};
use std::io::Write as _;
use std::path::{Path, PathBuf};

/// A failed command: status plus the error payload.
pub struct Failure {
    result: Value,
    status: Status,
}

impl<E: HasStatus + std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        let (result, status) = error_result(&e, None);
        Self { result, status }
    }
}

fn input_error(msg: impl Into<String>) -> Failure {
    Failure {
        result: json!({ "error": msg.into(), "kind": Status::InputError.as_str() }),
        status: Status::InputError,
    }
}

/// Attach the certificate or evidence carried by a reflection error.
fn reflection_failure(e: ReflectionError) -> Failure {
    let details = match &e {
        ReflectionError::NotPrimitive(cert) => Some(to_value(cert)),
        ReflectionError::NotReflectionInvariant(ev) | ReflectionError::Inconclusive(ev) => Some(to_value(ev)),
        _ => None,
    };
    let (result, status) = error_result(&e, details);
    Failure { result, status }
}

fn to_value<T: Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("reports serialize")
}

/// Per-invocation state: effective config and the resolved input for the digest.
struct Ctx {
    cfg: Config,
    validate_only: bool,
    jobs: usize,
    input: Value,
}

/// Parse, run and print; returns the process exit code.
pub fn run(cli: Cli, env_config: Option<PathBuf>) -> u8 {
    let command = match &cli.command {
        Command::Index { .. } => "index",
        Command::Check { .. } => "check",
        Command::Modular { .. } => "modular",
        Command::ParentHam { .. } => "parent-ham",
        Command::Scan { .. } => "scan",
        Command::Models => "models",
    };
    let format = cli.global.format;
    let validate_only = cli.global.validate_only;
    let (cfg, outcome) = match load_config(env_config.as_deref(), cli.global.config.as_deref()) {
        Ok(mut cfg) => {
            cli.global.overrides.apply(&mut cfg);
            let mut ctx =
                Ctx { cfg: cfg.clone(), validate_only, jobs: cli.global.jobs.max(1), input: Value::Null };
            let outcome = dispatch(&cli.command, &mut ctx);
            (cfg, (ctx.input, outcome))
        }
        Err(f) => (Config::default(), (Value::Null, Err(f))),
    };
    let (input, outcome) = outcome;
    let (result, status) = match outcome {
        Ok(r) => (r, Status::Ok),
        Err(f) => (f.result, f.status),
    };
    let envelope = Envelope::new(command, digest_of(&input), cfg, result, status);
    let text = match format {
        Format::Json => envelope.to_json() + "\n",
        Format::Table => {
            let scan_report = (command == "scan" && status == Status::Ok && !validate_only)
                .then(|| serde_json::from_value::<scan::ScanReport>(envelope.result.clone()).ok())
                .flatten();
            match scan_report {
                Some(report) => scan::render_table(&report),
                None => envelope.to_table(),
            }
        }
    };
    // a closed pipe is not an error worth a panic
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
    envelope.exit_code()
}

fn dispatch(command: &Command, ctx: &mut Ctx) -> Result<Value, Failure> {
    match command {
        Command::Index { input, block } => cmd_index(input, *block, ctx),
        Command::Check { input, block } => cmd_check(input, *block, ctx),
        Command::Modular { vector, from_index } => cmd_modular(vector.as_deref(), from_index.as_deref(), ctx),
        Command::ParentHam { input, m, n, boundary } => cmd_parent_ham(input, *m, *n, *boundary, ctx),
        Command::Scan { spec, family } => cmd_scan(spec.as_deref(), family.as_deref(), ctx),
        Command::Models => Ok(cmd_models(ctx)),
    }
}

/// Defaults, then the `SPT_Z2_CONFIG` file, then `--config`; later layers
/// override individual keys.
fn load_config(env: Option<&Path>, explicit: Option<&Path>) -> Result<Config, Failure> {
    let mut merged = to_value(&Config::default());
    for path in [env, explicit].into_iter().flatten() {
        let layer: Value = io::read_json(path)?;
        let Value::Object(map) = layer else {
            return Err(input_error(format!("config file {} is not a JSON object", path.display())));
        };
        for (k, v) in map {
            merged[k] = v;
        }
    }
    serde_json::from_value(merged).map_err(|e| input_error(format!("invalid config: {e}")))
}

fn load_tuple(input: &TupleInput, ctx: &mut Ctx) -> Result<(RawTuple, TupleFile), Failure> {
    match (&input.path, &input.model) {
        (Some(path), None) => {
            ctx.input = json!({ "path": path.display().to_string() });
            let file: TupleFile = io::read_json(path)?;
            let raw = file.to_raw()?;
            ctx.input = json!({ "tuple": to_value(&file) });
            Ok((raw, file))
        }
        (None, Some(name)) => {
            ctx.input = json!({ "model": name });
            let raw = zoo::model(name)?;
            let file = TupleFile::from_raw(&raw);
            ctx.input = json!({ "tuple": to_value(&file) });
            Ok((raw, file))
        }
        _ => Err(input_error("give exactly one of a tuple file and --model")),
    }
}

/// Normalize and group `b` sites; the reflection of the blocked chain
/// carries the digit-reversing site map.
fn blocked(raw: RawTuple, b: usize, cfg: &Config) -> Result<(RawTuple, SiteMap), Failure> {
    if b == 0 {
        return Err(input_error("--block must be at least 1"));
    }
    if b == 1 {
        let map = SiteMap::identity(raw.d());
        return Ok((raw, map));
    }
    let v = mps::normalize(&raw, cfg)?;
    let w = mps::block(&v, b, cfg.window_cap)?;
    let out = RawTuple::new(w.mats().to_vec())?;
    Ok((out, SiteMap::blocked(raw.d(), b)))
}

fn cmd_index(input: &TupleInput, block: usize, ctx: &mut Ctx) -> Result<Value, Failure> {
    let (raw, file) = load_tuple(input, ctx)?;
    ctx.input["block"] = json!(block);
    if ctx.validate_only {
        return Ok(to_value(&file));
    }
    let (raw, map) = blocked(raw, block, &ctx.cfg)?;
    let run = reflection::z2_index_run_with(&raw, &map, &ctx.cfg).map_err(reflection_failure)?;
    Ok(to_value(&run.report))
}

fn cmd_check(input: &TupleInput, block: usize, ctx: &mut Ctx) -> Result<Value, Failure> {
    let (raw, file) = load_tuple(input, ctx)?;
    ctx.input["block"] = json!(block);
    if ctx.validate_only {
        return Ok(to_value(&file));
    }
    let cfg = &ctx.cfg;
    let (raw, map) = blocked(raw, block, cfg)?;
    let input_residual = mps::normalization_residual(raw.mats());
    let v = mps::normalize(&raw, cfg)?;
    let cert = mps::primitivity(&v, cfg)?;
    let mut result = json!({
        "block": block,
        "normalization": {
            "input_residual": input_residual,
            "normalized_residual": v.normalization_residual(),
        },
        "primitivity": to_value(&cert),
        "primitive": cert.is_primitive,
        "reflection": Value::Null,
        "reflection_invariant": Value::Null,
    });
    if cert.is_primitive {
        let ev = reflection::reflection_invariant_with(&v, &map, cfg).map_err(reflection_failure)?;
        result["reflection_invariant"] = json!(ev.invariant);
        result["reflection"] = to_value(&ev);
    }
    Ok(result)
}

/// `ρ` rebuilt from the eigen-decomposition stored in a report.
fn rho_from_report(report: &IndexReport) -> ComplexMatrix {
    let q = &report.basis;
    let mut scaled = q.clone();
    for (j, &w) in report.rho_diag.iter().enumerate() {
        scaled.column_mut(j).scale_mut(w);
    }
    linalg::hermitian_part(&(scaled * q.adjoint()))
}

/// Bond vector and index from `--from-index SRC`.
fn bond_source(src: &str, ctx: &mut Ctx) -> Result<(BipartiteVector, i8, Value), Failure> {
    let path = Path::new(src);
    let (report, rho, echo) = if path.is_file() {
        let value: Value = io::read_json(path)?;
        if value.get("schema_version").is_some() {
            if value.get("command").and_then(Value::as_str) != Some("index") {
                return Err(input_error("--from-index expects a report of the `index` command"));
            }
            if value.get("status").and_then(Value::as_str) != Some("ok") {
                return Err(input_error("--from-index report does not carry an index"));
            }
            let report: IndexReport = serde_json::from_value(value["result"].clone())
                .map_err(|e| input_error(format!("malformed index report: {e}")))?;
            let rho = rho_from_report(&report);
            (report, rho, value["result"].clone())
        } else {
            let file: TupleFile =
                serde_json::from_value(value).map_err(|e| input_error(format!("invalid tuple file: {e}")))?;
            let raw = file.to_raw()?;
            let echo = to_value(&file);
            if ctx.validate_only {
                return Ok((BipartiteVector::normalized(linalg::identity(1))?, 0, echo));
            }
            let run = reflection::z2_index_run(&raw, &ctx.cfg).map_err(reflection_failure)?;
            (run.report, run.rho.rho, echo)
        }
    } else {
        let raw = zoo::model(src)?;
        let echo = to_value(&TupleFile::from_raw(&raw));
        if ctx.validate_only {
            return Ok((BipartiteVector::normalized(linalg::identity(1))?, 0, echo));
        }
        let run = reflection::z2_index_run(&raw, &ctx.cfg).map_err(reflection_failure)?;
        (run.report, run.rho.rho, echo)
    };
    let omega = modular::bond_vector(&report, &rho)?;
    Ok((omega, report.zeta, echo))
}

#[derive(Serialize)]
struct ModularOut {
    #[serde(flatten)]
    report: modular::ModularReport,
    /// Index of the source tuple when the vector is its bond vector.
    #[serde(skip_serializing_if = "Option::is_none")]
    zeta: Option<i8>,
    #[serde(skip_serializing_if = "Option::is_none")]
    kappa_equals_zeta: Option<bool>,
}

fn cmd_modular(vector: Option<&Path>, from_index: Option<&str>, ctx: &mut Ctx) -> Result<Value, Failure> {
    let (omega, zeta) = match (vector, from_index) {
        (Some(path), None) => {
            ctx.input = json!({ "path": path.display().to_string() });
            let file: VectorFile = io::read_json(path)?;
            let entries = file.components()?;
            ctx.input = json!({ "vector": to_value(&file) });
            if ctx.validate_only {
                return Ok(to_value(&file));
            }
            (BipartiteVector::from_entries(file.m, &entries)?, None)
        }
        (None, Some(src)) => {
            ctx.input = json!({ "source": src });
            let (omega, zeta, echo) = bond_source(src, ctx)?;
            if ctx.validate_only {
                return Ok(echo);
            }
            ctx.input = json!({ "vector": to_value(&VectorFile::from_vector(&omega)) });
            (omega, Some(zeta))
        }
        _ => return Err(input_error("give exactly one of --vector and --from-index")),
    };
    let report = modular::modular_data(&omega, &ctx.cfg)?;
    let kappa_equals_zeta = zeta.map(|z| report.kappa == Some(z));
    Ok(to_value(&ModularOut { report, zeta, kappa_equals_zeta }))
}

fn cmd_parent_ham(
    input: &TupleInput,
    m: Option<usize>,
    n: Option<usize>,
    boundary: Boundary,
    ctx: &mut Ctx,
) -> Result<Value, Failure> {
    let (raw, file) = load_tuple(input, ctx)?;
    if ctx.validate_only {
        return Ok(to_value(&file));
    }
    let cfg = &ctx.cfg;
    let v = mps::normalize(&raw, cfg)?;
    let m = match m {
        Some(m) => m,
        None => {
            let cert = mps::primitivity(&v, cfg)?;
            if !cert.is_primitive {
                let e = mps::MpsError::NotPrimitive { peripheral_count: cert.peripheral_count };
                let (result, status) = error_result(&e, Some(to_value(&cert)));
                return Err(Failure { result, status });
            }
            cert.injectivity_length.unwrap_or(1) + 1
        }
    };
    let n = n.unwrap_or(m);
    ctx.input["m"] = json!(m);
    ctx.input["n"] = json!(n);
    ctx.input["boundary"] = to_value(&boundary);
    let hint = hamiltonian::parent_interaction(&v, m, cfg)?;
    let spec = ChainSpec { n, boundary };
    let h = hamiltonian::chain_hamiltonian(&hint, spec, cfg.ed_cap)?;
    let ed = hamiltonian::ed_report(&h, cfg.kernel_tol_rel, cfg.ed_cap)?;
    Ok(json!({
        "m": m,
        "n": n,
        "boundary": to_value(&boundary),
        "interaction": to_value(&hint),
        "reflection_residual": hamiltonian::reflection_check(&hint),
        "ed": to_value(&ed),
    }))
}

fn cmd_scan(spec: Option<&Path>, family: Option<&str>, ctx: &mut Ctx) -> Result<Value, Failure> {
    let (file, fam) = match (spec, family) {
        (Some(path), None) => {
            ctx.input = json!({ "path": path.display().to_string() });
            let file: ScanSpecFile = io::read_json(path)?;
            let fam = file.to_family()?;
            (file, fam)
        }
        (None, Some(name)) => {
            ctx.input = json!({ "family_name": name });
            let file = ScanSpecFile {
                name: None,
                family: Some(name.to_string()),
                range: None,
                grid: None,
                points: None,
            };
            let fam = FamilySpec::builtin(name)?;
            (file, fam)
        }
        _ => return Err(input_error("give exactly one of a scan spec and --family")),
    };
    ctx.input = json!({ "family": to_value(&fam) });
    if ctx.validate_only {
        return Ok(to_value(&file));
    }
    let report = scan::scan(&fam, &ctx.cfg, ctx.jobs)?;
    Ok(to_value(&report))
}

fn cmd_models(ctx: &mut Ctx) -> Value {
    ctx.input = json!({});
    let models: Vec<Value> =
        zoo::MODELS.iter().map(|(name, about)| json!({ "name": name, "description": about })).collect();
    let families: Vec<Value> = zoo::FAMILIES
        .iter()
        .map(|(name, s0, s1, grid)| json!({ "name": name, "s0": s0, "s1": s1, "grid": grid }))
        .collect();
    json!({ "models": models, "families": families })
}
