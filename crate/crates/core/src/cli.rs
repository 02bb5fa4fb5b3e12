//! The `subspace-forge` command line.
//!
//! Every command prints one JSON object: the command's payload plus a `manifest` key
//! describing the run. Exit codes: 0 success, 2 invalid parameters, 3 malformed input,
//! 4 size guard or work limit exceeded. `SUBSPACE_FORGE_GUARD` overrides the field-order and
//! enumeration guards.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::{Read, Write};
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::batch::{verify_batch, BatchCode, BatchError, VerifyMode};
use crate::constructions::{
    bounds_table, build_code_based_family, build_random_family, build_rs_family, vandermonde,
    ConstructionError, RandomParams,
};
use crate::family::{
    check_relations, verify_family, Family, FamilyError, FamilyJson, VerifyOptions,
    DEFAULT_ENUMERATION_GUARD,
};
use crate::gf::{is_prime, Field, GfError, DEFAULT_FIELD_GUARD};
use crate::matgf::{Matrix, MatrixJson};
use crate::search::{run_search, SearchConfig, SearchError, SearchMode, DEFAULT_NODE_BUDGET};

pub const GUARD_ENV: &str = "SUBSPACE_FORGE_GUARD";

pub const EXIT_OK: i32 = 0;
pub const EXIT_PARAMS: i32 = 2;
pub const EXIT_PARSE: i32 = 3;
pub const EXIT_GUARD: i32 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "subspace-forge",
    version,
    about = "AAD and AS subspace families over finite fields"
)]
pub struct Cli {
    /// Human-readable output instead of JSON.
    #[arg(long, global = true)]
    pub pretty: bool,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Write output to this file instead of stdout.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a family and emit it as Family JSON.
    #[command(subcommand)]
    Construct(Construct),
    /// Compute the exact parameters of a family file.
    Verify(VerifyArgs),
    /// Closed-form bounds for every combination of the given L and q values.
    Bounds(BoundsArgs),
    /// Search for a maximum AAD family.
    Search(SearchArgs),
    /// Lay out and check the batch code of a family file.
    Batch(BatchArgs),
}

#[derive(Debug, Subcommand)]
pub enum Construct {
    /// Reed-Solomon based explicit construction (needs q >= nk).
    Rs(RsArgs),
    /// Randomized almost-sparse construction.
    Random(RandomArgs),
    /// One member per k consecutive columns of a parity-check matrix.
    CodeBased(CodeBasedArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct RsArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub k: usize,
    #[arg(long)]
    pub q: u64,
}

#[derive(Debug, Args, Serialize)]
pub struct RandomArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub k: usize,
    #[arg(long = "L")]
    #[serde(rename = "L")]
    pub l: usize,
    #[arg(long)]
    pub q: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1_000_000)]
    pub max_rounds: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct CodeBasedArgs {
    #[arg(long)]
    pub k: usize,
    #[arg(long)]
    pub q: u64,
    /// Rows of the Vandermonde matrix over all field elements.
    #[arg(long, default_value_t = 3, conflicts_with = "matrix")]
    pub rows: usize,
    /// Parity-check matrix as JSON `{"rows", "cols", "entries"}` over GF(q).
    #[arg(long)]
    pub matrix: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Property {
    Spread,
    Aad,
    As,
    Thm1,
    Relations,
}

#[derive(Debug, Args, Serialize)]
pub struct VerifyArgs {
    /// Family JSON file, or `-` for stdin.
    pub family: PathBuf,
    #[arg(long, value_delimiter = ',', default_value = "spread,aad,thm1")]
    pub properties: Vec<Property>,
}

#[derive(Debug, Args, Serialize)]
pub struct BoundsArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub k: usize,
    #[arg(long = "L", value_delimiter = ',', required = true)]
    #[serde(rename = "L")]
    pub l: Vec<usize>,
    #[arg(long, value_delimiter = ',', required = true)]
    pub q: Vec<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SearchModeArg {
    Exhaustive,
    Greedy,
}

#[derive(Debug, Args, Serialize)]
pub struct SearchArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub k: usize,
    #[arg(long = "L")]
    #[serde(rename = "L")]
    pub l: usize,
    #[arg(long)]
    pub q: u64,
    #[arg(long, value_enum, default_value = "exhaustive")]
    pub mode: SearchModeArg,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
    pub node_budget: u64,
    /// Search without fixing the first member.
    #[arg(long)]
    pub no_symmetry_break: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BatchModeArg {
    Exhaustive,
    Sampled,
}

#[derive(Debug, Args, Serialize)]
pub struct BatchArgs {
    /// Family JSON file, or `-` for stdin.
    pub family: PathBuf,
    /// Request multiset size (default: floor(|F| / L)).
    #[arg(long)]
    pub s: Option<usize>,
    #[arg(long, value_enum, default_value = "exhaustive")]
    pub mode: BatchModeArg,
    #[arg(long, default_value_t = 1000)]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Include the position layout in the output.
    #[arg(long)]
    pub layout: bool,
}

/// Provenance attached to every output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub parameters: Value,
    pub seed: Option<u64>,
    pub version: String,
    pub wall_time_ms: u64,
    /// SHA-256 of the payload's canonical JSON (the output without `manifest`).
    pub output_digest: String,
}

#[derive(Debug)]
pub enum CliError {
    Params(String),
    Parse(String),
    Guard(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Params(_) => EXIT_PARAMS,
            CliError::Parse(_) => EXIT_PARSE,
            CliError::Guard(_) => EXIT_GUARD,
            CliError::Io(_) => 1,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Params(m) | CliError::Parse(m) | CliError::Guard(m) | CliError::Io(m) => m,
        }
    }
}

impl From<GfError> for CliError {
    fn from(e: GfError) -> CliError {
        match e {
            GfError::TooLarge { .. } => CliError::Guard(e.to_string()),
            _ => CliError::Params(e.to_string()),
        }
    }
}

impl From<FamilyError> for CliError {
    fn from(e: FamilyError) -> CliError {
        match e {
            FamilyError::GuardExceeded { .. } => CliError::Guard(e.to_string()),
            FamilyError::Gf(g) => g.into(),
            _ => CliError::Params(e.to_string()),
        }
    }
}

impl From<ConstructionError> for CliError {
    fn from(e: ConstructionError) -> CliError {
        match e {
            ConstructionError::TooLarge { .. } | ConstructionError::PruningExhausted { .. } => {
                CliError::Guard(e.to_string())
            }
            ConstructionError::Family(f) => f.into(),
            _ => CliError::Params(e.to_string()),
        }
    }
}

impl From<SearchError> for CliError {
    fn from(e: SearchError) -> CliError {
        match e {
            SearchError::TooManySubspaces { .. } => CliError::Guard(e.to_string()),
            SearchError::Family(f) => f.into(),
            _ => CliError::Params(e.to_string()),
        }
    }
}

impl From<BatchError> for CliError {
    fn from(e: BatchError) -> CliError {
        match e {
            BatchError::TooLarge { .. } => CliError::Guard(e.to_string()),
            BatchError::Family(f) => f.into(),
            _ => CliError::Params(e.to_string()),
        }
    }
}

/// Size guards in effect for one run.
#[derive(Debug, Clone, Copy)]
pub struct Guards {
    pub field: u64,
    pub enumeration: u128,
}

impl Guards {
    /// Defaults, or both guards set to the value of `SUBSPACE_FORGE_GUARD`.
    pub fn from_env() -> Result<Guards, CliError> {
        match std::env::var(GUARD_ENV) {
            Ok(v) => {
                let g: u128 = v.trim().parse().map_err(|_| {
                    CliError::Params(format!("{GUARD_ENV}={v:?} is not a non-negative integer"))
                })?;
                Ok(Guards {
                    field: u64::try_from(g).unwrap_or(u64::MAX),
                    enumeration: g,
                })
            }
            Err(_) => Ok(Guards {
                field: DEFAULT_FIELD_GUARD,
                enumeration: DEFAULT_ENUMERATION_GUARD,
            }),
        }
    }
}

/// Writes `p` and `m` with `q = p^m`, or `None` if `q` is not a prime power.
pub fn prime_power(q: u64) -> Option<(u64, u32)> {
    let p = (2..=q).find(|d| q.is_multiple_of(*d))?;
    let mut rest = q;
    let mut m = 0;
    while rest.is_multiple_of(p) {
        rest /= p;
        m += 1;
    }
    (rest == 1 && is_prime(p)).then_some((p, m))
}

fn field_of_order(q: u64, guards: &Guards) -> Result<Field, CliError> {
    let (p, m) =
        prime_power(q).ok_or_else(|| CliError::Params(format!("q = {q} is not a prime power")))?;
    Ok(Field::with_guard(p, m, guards.field)?)
}

fn read_input(path: &PathBuf) -> Result<String, CliError> {
    let mut s = String::new();
    if path.as_os_str() == "-" {
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| CliError::Parse(format!("stdin: {e}")))?;
    } else {
        s = std::fs::read_to_string(path)
            .map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
    }
    Ok(s)
}

fn read_family(path: &PathBuf, guards: &Guards) -> Result<Family, CliError> {
    let text = read_input(path)?;
    let json: FamilyJson = serde_json::from_str(&text)
        .map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
    let field = Field::from_spec_with_guard(&json.field, guards.field).map_err(|e| match e {
        GfError::TooLarge { .. } => CliError::Guard(e.to_string()),
        _ => CliError::Parse(e.to_string()),
    })?;
    Family::from_json_with_field(&field, &json).map_err(|e| CliError::Parse(e.to_string()))
}

/// Payload of one command: JSON to emit and the seed that drove it, if any.
struct Outcome {
    payload: Value,
    seed: Option<u64>,
}

fn family_payload(family: &Family, extra: Value) -> Value {
    let mut v = serde_json::to_value(family.to_json()).expect("family JSON serializes");
    if let (Value::Object(map), Value::Object(more)) = (&mut v, extra) {
        map.extend(more);
    }
    v
}

fn construct(cmd: &Construct, guards: &Guards) -> Result<Outcome, CliError> {
    match cmd {
        Construct::Rs(a) => {
            let field = field_of_order(a.q, guards)?;
            let family = build_rs_family(&field, a.n, a.k)?;
            Ok(Outcome {
                payload: family_payload(&family, json!({})),
                seed: None,
            })
        }
        Construct::Random(a) => {
            let field = field_of_order(a.q, guards)?;
            let params = RandomParams {
                n: a.n,
                k: a.k,
                l: a.l,
                seed: a.seed,
                max_rounds: a.max_rounds,
            };
            let r = build_random_family(&field, &params)?;
            let stats = json!({
                "construction": {
                    "sampled": r.sampled,
                    "removed_intersecting": r.removed_intersecting,
                    "pruned": r.pruned,
                    "L_as": r.l_as,
                }
            });
            Ok(Outcome {
                payload: family_payload(&r.family, stats),
                seed: Some(a.seed),
            })
        }
        Construct::CodeBased(a) => {
            let field = field_of_order(a.q, guards)?;
            let h = match &a.matrix {
                Some(path) => {
                    let text = read_input(path)?;
                    let mj: MatrixJson = serde_json::from_str(&text)
                        .map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
                    Matrix::from_json(&field, &mj).map_err(|e| CliError::Parse(e.to_string()))?
                }
                None => vandermonde(&field, a.rows, &field.elements().collect::<Vec<_>>()),
            };
            let family = build_code_based_family(&h, a.k)?;
            Ok(Outcome {
                payload: family_payload(&family, json!({})),
                seed: None,
            })
        }
    }
}

fn verify(a: &VerifyArgs, guards: &Guards) -> Result<Outcome, CliError> {
    let family = read_family(&a.family, guards)?;
    let want = |p: Property| a.properties.contains(&p);
    let opts = VerifyOptions {
        aad: want(Property::Aad) || want(Property::Thm1) || want(Property::Relations),
        almost_sparse: want(Property::As) || want(Property::Relations),
        enumeration_guard: guards.enumeration,
    };
    let report = verify_family(&family, &opts)?;
    let mut out = serde_json::to_value(&report).expect("report serializes");
    let map = out.as_object_mut().expect("report is an object");
    if !want(Property::Thm1) {
        map.remove("bound_thm1");
        map.remove("bound_satisfied");
    }
    if !want(Property::Aad) && !want(Property::Thm1) {
        map.remove("l_aad");
    }
    if !want(Property::As) {
        map.remove("l_as");
    }
    if want(Property::Relations) {
        let rel = match (&report.l_aad, &report.l_as) {
            (Some(aad), Some(las)) => {
                serde_json::to_value(check_relations(&family, aad.value, las.value))
                    .expect("relation check serializes")
            }
            _ => Value::Null,
        };
        map.insert("relations".into(), rel);
    }
    Ok(Outcome {
        payload: out,
        seed: None,
    })
}

fn bounds(a: &BoundsArgs) -> Result<Outcome, CliError> {
    let mut rows = Vec::new();
    for &q in &a.q {
        if prime_power(q).is_none() {
            return Err(CliError::Params(format!("q = {q} is not a prime power")));
        }
        for &l in &a.l {
            rows.push(bounds_table(a.n, a.k, l, q)?);
        }
    }
    Ok(Outcome {
        payload: json!({ "rows": rows }),
        seed: None,
    })
}

fn search(a: &SearchArgs, guards: &Guards) -> Result<Outcome, CliError> {
    let field = field_of_order(a.q, guards)?;
    let mut cfg = SearchConfig::new(&field, a.n, a.k, a.l);
    cfg.mode = match a.mode {
        SearchModeArg::Exhaustive => SearchMode::Exhaustive,
        SearchModeArg::Greedy => SearchMode::Greedy,
    };
    cfg.node_budget = a.node_budget;
    cfg.symmetry_break = !a.no_symmetry_break;
    let outcome = run_search(&cfg, a.seed)?;
    let seed = (cfg.mode == SearchMode::Greedy).then_some(a.seed);
    Ok(Outcome {
        payload: serde_json::to_value(outcome.certificate(&cfg)).expect("certificate serializes"),
        seed,
    })
}

fn batch(a: &BatchArgs, guards: &Guards) -> Result<Outcome, CliError> {
    let family = read_family(&a.family, guards)?;
    let code = BatchCode::new(&family)?;
    let s = a.s.unwrap_or_else(|| code.batch_size());
    let (mode, seed) = match a.mode {
        BatchModeArg::Exhaustive => (VerifyMode::Exhaustive, None),
        BatchModeArg::Sampled => (
            VerifyMode::Sampled {
                trials: a.trials,
                seed: a.seed,
            },
            Some(a.seed),
        ),
    };
    let check = verify_batch(&code, s, mode)?;
    let mut out = json!({
        "K": code.info_len(),
        "N": code.len(),
        "L": code.l_aad(),
        "size": family.len(),
        "verification": check,
    });
    if a.layout {
        out["layout"] = serde_json::to_value(code.layout()).expect("layout serializes");
    }
    Ok(Outcome { payload: out, seed })
}

fn command_name(cmd: &Command) -> &'static str {
    match cmd {
        Command::Construct(Construct::Rs(_)) => "construct rs",
        Command::Construct(Construct::Random(_)) => "construct random",
        Command::Construct(Construct::CodeBased(_)) => "construct code-based",
        Command::Verify(_) => "verify",
        Command::Bounds(_) => "bounds",
        Command::Search(_) => "search",
        Command::Batch(_) => "batch",
    }
}

fn parameters(cmd: &Command) -> Value {
    let v = match cmd {
        Command::Construct(Construct::Rs(a)) => serde_json::to_value(a),
        Command::Construct(Construct::Random(a)) => serde_json::to_value(a),
        Command::Construct(Construct::CodeBased(a)) => serde_json::to_value(a),
        Command::Verify(a) => serde_json::to_value(a),
        Command::Bounds(a) => serde_json::to_value(a),
        Command::Search(a) => serde_json::to_value(a),
        Command::Batch(a) => serde_json::to_value(a),
    };
    v.expect("arguments serialize")
}

/// SHA-256 of the compact JSON encoding; object keys are emitted in sorted order.
pub fn digest(payload: &Value) -> String {
    let bytes = serde_json::to_vec(payload).expect("values serialize");
    hex::encode(Sha256::digest(&bytes))
}

/// Runs one parsed command and returns the payload with its manifest attached.
pub fn execute(cli: &Cli) -> Result<Value, CliError> {
    let guards = Guards::from_env()?;
    let start = Instant::now();
    let outcome = match &cli.command {
        Command::Construct(c) => construct(c, &guards)?,
        Command::Verify(a) => verify(a, &guards)?,
        Command::Bounds(a) => bounds(a)?,
        Command::Search(a) => search(a, &guards)?,
        Command::Batch(a) => batch(a, &guards)?,
    };
    let manifest = RunManifest {
        command: command_name(&cli.command).to_string(),
        parameters: parameters(&cli.command),
        seed: outcome.seed,
        version: env!("CARGO_PKG_VERSION").to_string(),
        wall_time_ms: start.elapsed().as_millis() as u64,
        output_digest: digest(&outcome.payload),
    };
    let mut out = outcome.payload;
    out.as_object_mut().expect("payloads are objects").insert(
        "manifest".into(),
        serde_json::to_value(manifest).expect("manifest serializes"),
    );
    Ok(out)
}

/// The output with its `manifest` removed, the part that is reproducible byte for byte.
pub fn strip_manifest(output: &Value) -> Value {
    let mut v = output.clone();
    if let Some(map) = v.as_object_mut() {
        map.remove("manifest");
    }
    v
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => "-".into(),
        Value::Array(a) => format!("[{} entries]", a.len()),
        other => other.to_string(),
    }
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    match v {
        Value::Object(map) => {
            for (k, val) in map {
                let key = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}.{k}")
                };
                flatten(&key, val, out);
            }
        }
        Value::Array(a) if a.len() <= 8 && a.iter().all(|x| !x.is_object() && !x.is_array()) => {
            let items: Vec<String> = a.iter().map(scalar).collect();
            out.push((prefix.to_string(), format!("[{}]", items.join(", "))));
        }
        other => out.push((prefix.to_string(), scalar(other))),
    }
}

fn table(rows: &[Value]) -> String {
    let cols: Vec<String> = match rows.first() {
        Some(Value::Object(m)) => m.keys().cloned().collect(),
        _ => return String::new(),
    };
    let cells: Vec<Vec<String>> = rows
        .iter()
        .map(|r| cols.iter().map(|c| scalar(&r[c])).collect())
        .collect();
    let widths: Vec<usize> = (0..cols.len())
        .map(|i| {
            cells
                .iter()
                .map(|r| r[i].len())
                .chain([cols[i].len()])
                .max()
                .unwrap_or(0)
        })
        .collect();
    let mut s = String::new();
    let line = |s: &mut String, row: &[String]| {
        let parts: Vec<String> = row
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:>w$}"))
            .collect();
        let _ = writeln!(s, "{}", parts.join("  "));
    };
    line(&mut s, &cols);
    for r in &cells {
        line(&mut s, r);
    }
    s
}

/// Human-readable rendering: a column table for `rows`, `key  value` lines otherwise.
pub fn render_pretty(output: &Value) -> String {
    let mut s = String::new();
    let mut body = output.clone();
    let manifest = body.as_object_mut().and_then(|m| m.remove("manifest"));
    if let Some(Value::Array(rows)) = body.as_object_mut().and_then(|m| m.remove("rows")) {
        s.push_str(&table(&rows));
    }
    let mut pairs = Vec::new();
    flatten("", &body, &mut pairs);
    if let Some(m) = manifest {
        flatten("manifest", &m, &mut pairs);
    }
    let width = pairs.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    for (k, v) in pairs.iter().filter(|(k, _)| !k.is_empty()) {
        let _ = writeln!(s, "{k:<width$}  {v}");
    }
    s
}

fn emit(cli: &Cli, output: &Value, stdout: &mut dyn Write) -> Result<(), CliError> {
    let text = if cli.pretty {
        render_pretty(output)
    } else {
        let mut t = serde_json::to_string(output).expect("values serialize");
        t.push('\n');
        t
    };
    match &cli.output {
        Some(path) => {
            std::fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
        }
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Io(e.to_string())),
    }
}

/// Parses `args` (including the program name), runs the command and returns the exit code.
pub fn run_with<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_PARAMS } else { EXIT_OK };
            let _ = if e.use_stderr() {
                write!(stderr, "{}", e.render())
            } else {
                write!(stdout, "{}", e.render())
            };
            return code;
        }
    };
    let result = (|| {
        if let Some(t) = cli.threads {
            if t == 0 {
                return Err(CliError::Params("--threads must be at least 1".into()));
            }
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build()
                .map_err(|e| CliError::Params(e.to_string()))?;
            return pool.install(|| execute(&cli));
        }
        execute(&cli)
    })()
    .and_then(|out| emit(&cli, &out, stdout));
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(stderr, "error: {}", e.message());
            e.exit_code()
        }
    }
}

pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_with(
        args,
        &mut std::io::stdout().lock(),
        &mut std::io::stderr().lock(),
    )
}
