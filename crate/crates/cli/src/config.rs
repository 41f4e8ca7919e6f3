//! Run configuration (JSON, schema 1) and the instance it describes.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::Deserialize;
use sheafcode::ccz::{triorthogonal_check, CczCode, CodeSpaces, TrilinearForm, TriorthogonalReport};
use sheafcode::chain::{ChainComplex, CssCode, DistanceBudget};
use sheafcode::complex::{CellComplex, CubicalSpec};
use sheafcode::cup::{cubical_trilinear_stencil, simplicial_stencil};
use sheafcode::fixtures;
use sheafcode::gf::{Field, FieldSpec, FVec, SpMat};
use sheafcode::localcode::{CodeFile, LinCode};
use sheafcode::sheaf::{LocalCodeAssignment, Sheaf};

pub const SCHEMA: u32 = 1;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema: u32,
    #[serde(default)]
    pub field: FieldConfig,
    pub source: SourceConfig,
    #[serde(default = "default_level")]
    pub level: usize,
    #[serde(default)]
    pub ccz: Option<CczConfig>,
    pub seed: Option<u64>,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub caps: Caps,
    pub out: Option<PathBuf>,
}

fn default_level() -> usize {
    1
}

fn default_trials() -> usize {
    200
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldConfig {
    pub r: u32,
    pub modulus: Option<u32>,
}

impl Default for FieldConfig {
    fn default() -> Self {
        FieldConfig { r: 1, modulus: None }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Caps {
    /// Exhaustive distance search when q^{dim Z} is at most this.
    #[serde(default = "default_distance_cap")]
    pub distance: u64,
    #[serde(default = "default_trials")]
    pub distance_trials: usize,
    #[serde(default = "default_restarts")]
    pub subrank_restarts: usize,
}

fn default_distance_cap() -> u64 {
    1 << 22
}

fn default_restarts() -> usize {
    64
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            distance: default_distance_cap(),
            distance_trials: default_trials(),
            subrank_restarts: default_restarts(),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum SourceConfig {
    /// A complex plus a sheaf on it.
    Sheaf { complex: ComplexConfig, codes: CodesConfig },
    /// A triorthogonal matrix: stabilizer rows and logical rows over F_2.
    Triorthogonal {
        stabilizers: Vec<Vec<u16>>,
        logicals: Vec<Vec<u16>>,
    },
    /// The 15-qubit punctured Reed-Muller triorthogonal matrix.
    ReedMuller15,
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ComplexConfig {
    Cubical(CubicalSpec),
    /// V = Z_n with every A_i = {x -> x + s}.
    Shifts { n: usize, t: usize, shifts: Vec<usize> },
    /// Facets as vertex lists.
    Simplicial(Vec<Vec<u32>>),
    /// JSON file holding a cubical spec.
    CubicalFile(PathBuf),
    /// JSON file holding a facet list.
    SimplicialFile(PathBuf),
    /// Named fixture: single_cube:t, doubled_cube:t, cycle, square_toric,
    /// toric, rs, s3_cayley, torus7, torus3, tetrahedron, rp3.
    Builtin(String),
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum CodesConfig {
    /// The constant sheaf: repetition codes everywhere.
    Constant,
    /// The same code on every (t-1)-cell.
    Uniform(CodeEntry),
    /// Cubical only: one code per direction.
    PerDirection(Vec<CodeEntry>),
    /// One code per (t-1)-cell in canonical cell order.
    PerCell(Vec<CodeEntry>),
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum CodeEntry {
    /// Built-in name: rep, full, zero, parity, rs:k, dual:<name>.
    Name(String),
    Generator { generator: Vec<Vec<u16>>, length: Option<usize> },
    File { file: PathBuf },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CczConfig {
    /// Cochain degrees of the three legs; they must sum to t.
    pub levels: [usize; 3],
}

/// A configuration error: the message goes to stderr and the exit code is 2.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<sheafcode::Error> for ConfigError {
    fn from(e: sheafcode::Error) -> Self {
        ConfigError(e.to_string())
    }
}

type Result<T> = std::result::Result<T, ConfigError>;

fn err<T>(msg: impl Into<String>) -> Result<T> {
    Err(ConfigError(msg.into()))
}

/// Reads and parses a config; relative paths resolve against its directory.
pub fn load(path: &Path) -> Result<(RunConfig, PathBuf)> {
    let text = fs::read_to_string(path).map_err(|e| ConfigError(format!("{}: {e}", path.display())))?;
    let cfg: RunConfig =
        serde_json::from_str(&text).map_err(|e| ConfigError(format!("{}: {e}", path.display())))?;
    if cfg.schema != SCHEMA {
        return err(format!("unsupported schema {} (expected {SCHEMA})", cfg.schema));
    }
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    Ok((cfg, base))
}

fn read_json<T: serde::de::DeserializeOwned>(base: &Path, p: &Path) -> Result<T> {
    let full = base.join(p);
    let text = fs::read_to_string(&full).map_err(|e| ConfigError(format!("{}: {e}", full.display())))?;
    serde_json::from_str(&text).map_err(|e| ConfigError(format!("{}: {e}", full.display())))
}

pub enum Instance {
    Sheaf(SheafInstance),
    Triorthogonal(TriInstance),
}

pub struct SheafInstance {
    pub sheaf: Sheaf,
    pub chain: ChainComplex,
    pub level: usize,
    pub ccz_levels: Option<[usize; 3]>,
}

pub struct TriInstance {
    pub field: Field,
    pub stabilizers: Vec<FVec>,
    pub logicals: Vec<FVec>,
}

impl Instance {
    pub fn field(&self) -> &Field {
        match self {
            Instance::Sheaf(s) => s.sheaf.field(),
            Instance::Triorthogonal(t) => &t.field,
        }
    }

    /// The CSS code whose parameters are reported.
    pub fn css(&self) -> Result<CssCode> {
        match self {
            Instance::Sheaf(s) => Ok(CssCode::from_complex(&s.chain, s.level)?),
            Instance::Triorthogonal(t) => t.css(),
        }
    }

    /// The CCZ code, or None when no trilinear form applies. For
    /// triorthogonal sources the matrix report is returned alongside.
    pub fn ccz(&self) -> Result<(Option<CczCode>, Option<TriorthogonalReport>)> {
        match self {
            Instance::Sheaf(s) => Ok((s.ccz()?, None)),
            Instance::Triorthogonal(t) => {
                let (rep, code) = triorthogonal_check(&t.stabilizers, &t.logicals)?;
                Ok((code, Some(rep)))
            }
        }
    }
}

impl SheafInstance {
    fn ccz(&self) -> Result<Option<CczCode>> {
        let Some(levels) = self.ccz_levels else {
            return Ok(None);
        };
        let s = &self.sheaf;
        let cx = s.complex();
        let stencil = if cx.is_cubical() {
            if cx.t() != 3 || levels != [1, 1, 1] {
                return err("cubical trilinear forms need t = 3 and levels [1, 1, 1]");
            }
            cubical_trilinear_stencil(cx)?
        } else {
            simplicial_stencil(cx, &levels)?
        };
        let form = TrilinearForm::from_stencil(&stencil, [s, s, s])?;
        let spaces = levels
            .iter()
            .map(|&l| CodeSpaces::from_chain(&self.chain, l))
            .collect::<sheafcode::Result<Vec<_>>>()?;
        let [a, b, c]: [CodeSpaces; 3] = spaces.try_into().expect("three legs");
        Ok(Some(CczCode::new([a, b, c], form)?))
    }
}

impl TriInstance {
    /// X checks are the stabilizer rows; Z checks span the dual of all rows.
    fn css(&self) -> Result<CssCode> {
        let f = &self.field;
        let n = self.stabilizers.first().or(self.logicals.first()).map_or(0, Vec::len);
        let hx = SpMat::from_dense(f, &self.stabilizers, n);
        let all: Vec<FVec> = self.stabilizers.iter().chain(&self.logicals).cloned().collect();
        let hz_rows = SpMat::from_dense(f, &all, n).kernel_basis();
        let hz = SpMat::from_dense(f, &hz_rows, n);
        let k = n - hx.rank() - hz.rank();
        Ok(CssCode {
            level: 0,
            n,
            k,
            hx,
            hz,
        })
    }
}

fn builtin_complex(name: &str) -> Result<Arc<CellComplex>> {
    let dim_suffix = |prefix: &str| -> Option<usize> { name.strip_prefix(prefix).and_then(|t| t.parse().ok()) };
    let cx = if let Some(t) = dim_suffix("single_cube:") {
        fixtures::cubical(fixtures::single_cube_spec(t))?
    } else if let Some(t) = dim_suffix("doubled_cube:") {
        fixtures::cubical(fixtures::doubled_cube_spec(t))?
    } else {
        match name {
            "cycle" => fixtures::cubical(fixtures::cycle_spec())?,
            "square_toric" => fixtures::cubical(fixtures::square_toric_spec())?,
            "toric" => fixtures::cubical(fixtures::toric_spec())?,
            "rs" => fixtures::cubical(fixtures::rs_spec())?,
            "s3_cayley" => fixtures::cubical(fixtures::s3_cayley_spec())?,
            "torus7" => fixtures::simplicial(&fixtures::torus7())?,
            "torus3" => fixtures::simplicial(&fixtures::torus3())?,
            "tetrahedron" => fixtures::simplicial(&fixtures::tetrahedron_boundary())?,
            "rp3" => fixtures::simplicial(&fixtures::rp3())?,
            _ => return err(format!("unknown built-in complex {name:?}")),
        }
    };
    Ok(cx)
}

fn build_complex(cfg: &ComplexConfig, base: &Path) -> Result<Arc<CellComplex>> {
    match cfg {
        ComplexConfig::Cubical(spec) => Ok(fixtures::cubical(spec.clone())?),
        ComplexConfig::Shifts { n, t, shifts } => Ok(fixtures::cubical(CubicalSpec::shifts(*n, *t, shifts))?),
        ComplexConfig::Simplicial(facets) => Ok(fixtures::simplicial(facets)?),
        ComplexConfig::CubicalFile(p) => Ok(fixtures::cubical(read_json(base, p)?)?),
        ComplexConfig::SimplicialFile(p) => {
            let facets: Vec<Vec<u32>> = read_json(base, p)?;
            Ok(fixtures::simplicial(&facets)?)
        }
        ComplexConfig::Builtin(name) => builtin_complex(name),
    }
}

fn elems(field: &Field, rows: &[Vec<u16>]) -> Result<Vec<FVec>> {
    rows.iter()
        .map(|r| r.iter().map(|&x| field.elem(x as u64)).collect::<sheafcode::Result<FVec>>())
        .collect::<sheafcode::Result<Vec<_>>>()
        .map_err(Into::into)
}

fn build_code(entry: &CodeEntry, field: &Field, len: usize, base: &Path) -> Result<LinCode> {
    match entry {
        CodeEntry::Name(name) => Ok(LinCode::named(field, name, len)?),
        CodeEntry::Generator { generator, length } => {
            let n = length.unwrap_or(len);
            if n != len {
                return err(format!("code length {n} given for a cell with {len} top cells"));
            }
            Ok(LinCode::new(field, n, elems(field, generator)?)?)
        }
        CodeEntry::File { file } => {
            let cf: CodeFile = read_json(base, file)?;
            if cf.spec != field.spec() {
                return err(format!("{}: field differs from the config field", file.display()));
            }
            Ok(LinCode::from_file(&cf)?)
        }
    }
}

fn build_sheaf(cx: &Arc<CellComplex>, field: &Field, codes: &CodesConfig, base: &Path) -> Result<Sheaf> {
    let t = cx.t();
    let assignment = match codes {
        CodesConfig::Constant => return Ok(Sheaf::constant(cx, field)?),
        CodesConfig::Uniform(entry) => {
            LocalCodeAssignment::uniform(cx, |n| build_code(entry, field, n, base).map_err(|e| sheafcode::Error::Code(e.0)))?
        }
        CodesConfig::PerDirection(entries) => {
            if !cx.is_cubical() {
                return err("per_direction codes need a cubical complex");
            }
            let delta = cx.cubical_spec().map_or(0, |s| s.delta());
            let codes = entries
                .iter()
                .map(|e| build_code(e, field, delta, base))
                .collect::<Result<Vec<_>>>()?;
            LocalCodeAssignment::per_direction(cx, &codes)?
        }
        CodesConfig::PerCell(entries) => {
            if entries.len() != cx.count(t - 1) {
                return err(format!("{} per-cell codes for {} cells of dimension {}", entries.len(), cx.count(t - 1), t - 1));
            }
            let codes = entries
                .iter()
                .enumerate()
                .map(|(i, e)| build_code(e, field, cx.top_coords(sheafcode::complex::CellId::new(t - 1, i)).len(), base))
                .collect::<Result<Vec<_>>>()?;
            LocalCodeAssignment::new(cx, codes)?
        }
    };
    Ok(Sheaf::from_local_codes(cx, field, assignment)?)
}

/// Default CCZ levels: [1,1,1] when t = 3, none otherwise.
fn default_ccz(t: usize) -> Option<[usize; 3]> {
    (t == 3).then_some([1, 1, 1])
}

pub fn build(cfg: &RunConfig, base: &Path) -> Result<Instance> {
    let spec = match cfg.field.modulus {
        Some(m) => FieldSpec::with_modulus(cfg.field.r, m)?,
        None => FieldSpec::new(cfg.field.r)?,
    };
    let field = Field::new(spec)?;
    match &cfg.source {
        SourceConfig::Sheaf { complex, codes } => {
            let cx = build_complex(complex, base)?;
            let sheaf = build_sheaf(&cx, &field, codes, base)?;
            let chain = ChainComplex::from_sheaf(&sheaf)?;
            let t = cx.t();
            if cfg.level == 0 || cfg.level >= t {
                return err(format!("level {} outside 1..={}", cfg.level, t.saturating_sub(1)));
            }
            let ccz_levels = match &cfg.ccz {
                Some(c) => {
                    if c.levels.iter().sum::<usize>() != t {
                        return err(format!("ccz levels {:?} do not sum to t = {t}", c.levels));
                    }
                    Some(c.levels)
                }
                None => default_ccz(t),
            };
            Ok(Instance::Sheaf(SheafInstance {
                sheaf,
                chain,
                level: cfg.level,
                ccz_levels,
            }))
        }
        SourceConfig::Triorthogonal { stabilizers, logicals } => {
            if field.q() != 2 {
                return err("triorthogonal matrices are binary");
            }
            let n = stabilizers.iter().chain(logicals).map(Vec::len).max().unwrap_or(0);
            if stabilizers.iter().chain(logicals).any(|r| r.len() != n) {
                return err("triorthogonal rows have unequal lengths");
            }
            Ok(Instance::Triorthogonal(TriInstance {
                stabilizers: elems(&field, stabilizers)?,
                logicals: elems(&field, logicals)?,
                field,
            }))
        }
        SourceConfig::ReedMuller15 => {
            if field.q() != 2 {
                return err("triorthogonal matrices are binary");
            }
            let (stabilizers, logicals) = sheafcode::ccz::punctured_reed_muller();
            Ok(Instance::Triorthogonal(TriInstance {
                field,
                stabilizers,
                logicals,
            }))
        }
    }
}

/// Seed from the flag, else from the config; randomized steps need one.
pub fn resolve_seed(cfg: &RunConfig, flag: Option<u64>) -> Result<u64> {
    match flag.or(cfg.seed) {
        Some(s) => Ok(s),
        None => err("no seed: set \"seed\" in the config or pass --seed"),
    }
}

pub fn distance_budget(cfg: &RunConfig, seed: u64) -> DistanceBudget {
    DistanceBudget {
        cap: cfg.caps.distance,
        trials: cfg.caps.distance_trials,
        seed,
    }
}
