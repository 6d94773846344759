//! End-to-end census: enumerate, realize, measure, check bounds, and emit the
//! tables and plot data as CSV.
//!
//! Output is deterministic: members are sorted by `(V, canonical code)`, each
//! realization is seeded from its canonical code, and volumes are printed
//! with six decimals (Rust's formatter rounds exact ties to even).

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bounds::{
    applicable_bounds, best_upper_bound, compact_bounds_atkinson, compact_upper_improved, ideal_bounds_atkinson,
    ideal_upper_improved, BoundError, BoundKind, BoundValue,
};
use crate::combinatorics::exchange::{read_planar_code, read_text, ParseError, PLANAR_CODE_HEADER};
use crate::combinatorics::{
    canonical_code, check_compact_identity, check_ideal_identity, CanonicalCode, Class, CombError, CombPolyhedron,
    FaceVector,
};
use crate::enumeration::{enumerate_candidates, EnumerationBudget, EnumerationError};
use crate::realization::{
    compact_obstruction, realize_polyhedron, validate, MinkowskiVec, RealizeError, RealizedPolyhedron,
};
use crate::volume::{volume, VolumeError};

/// Stored in every cache record; bump when solver output may change.
pub const SOLVER_VERSION: u32 = 1;

/// Slack for non-strict bounds and equality flags.
pub const BOUND_TOL: f64 = 1e-9;

/// Two rounded volumes closer than this count as one distinct volume.
pub const DISTINCT_VOLUME_TOL: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Enumeration(#[from] EnumerationError),
    #[error("realization of {code} failed: {source}")]
    Realization { code: String, source: RealizeError },
    #[error("volume of {code} failed: {source}")]
    Volume { code: String, source: VolumeError },
    #[error(transparent)]
    Bound(#[from] BoundError),
    #[error("vertex range {0}..={1} is empty")]
    EmptyRange(usize, usize),
    #[error("thread pool: {0}")]
    ThreadPool(String),
    #[error("cache {path}: {source}")]
    Cache { path: PathBuf, source: std::io::Error },
}

/// Formats a volume for CSV output.
pub fn format_volume(x: f64) -> String {
    format!("{x:.6}")
}

/// One cached realization, with a fixed field order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CacheRecord {
    pub canonical_code: String,
    pub class: Class,
    pub normals: Vec<MinkowskiVec>,
    pub vertices: Vec<MinkowskiVec>,
    pub residual: f64,
    pub volume: f64,
    pub solver_version: u32,
}

/// Directory of realization records keyed by canonical code.
#[derive(Clone, Debug)]
pub struct Cache {
    dir: PathBuf,
}

impl Cache {
    pub fn open(dir: impl Into<PathBuf>) -> Result<Self, PipelineError> {
        let dir = dir.into();
        fs::create_dir_all(&dir).map_err(|source| PipelineError::Cache { path: dir.clone(), source })?;
        Ok(Cache { dir })
    }

    fn path(&self, code: &CanonicalCode) -> PathBuf {
        self.dir.join(format!("v{}-{:016x}.json", code.vertex_count(), code.digest()))
    }

    /// The stored record, if present, readable, current and for this code.
    pub fn load(&self, code: &CanonicalCode) -> Option<CacheRecord> {
        let text = fs::read_to_string(self.path(code)).ok()?;
        let rec: CacheRecord = serde_json::from_str(&text).ok()?;
        (rec.solver_version == SOLVER_VERSION && rec.canonical_code == code.to_hex()).then_some(rec)
    }

    /// Writes the record through a temporary file so readers never see a
    /// partial record.
    pub fn store(&self, code: &CanonicalCode, rec: &CacheRecord) -> Result<(), PipelineError> {
        let path = self.path(code);
        let err = |source| PipelineError::Cache { path: path.clone(), source };
        let mut tmp = tempfile::NamedTempFile::new_in(&self.dir).map_err(err)?;
        let json = serde_json::to_string_pretty(rec).expect("records serialize");
        tmp.write_all(json.as_bytes()).map_err(err)?;
        tmp.write_all(b"\n").map_err(err)?;
        tmp.persist(&path).map_err(|e| err(e.error))?;
        Ok(())
    }
}

/// A realized census member.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Member {
    pub vertices: usize,
    pub canonical_code: String,
    pub volume: f64,
    pub residual: f64,
    pub best_upper: BoundValue,
    /// Applicable bounds the volume fails.
    pub violations: Vec<BoundKind>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CensusRow {
    pub vertices: usize,
    pub polyhedra_count: usize,
    pub distinct_volume_count: usize,
    pub min_volume: Option<f64>,
    pub max_volume: Option<f64>,
}

/// Members of one row sharing a volume.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VolumeMatch {
    pub vertices: usize,
    pub volume: f64,
    pub canonical_codes: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Census {
    pub klass: Class,
    pub members: Vec<Member>,
    pub rows: Vec<CensusRow>,
    /// Combinatorially distinct members with the same volume. Canonical
    /// codes identify mirror images, so these are never isometric.
    pub volume_matches: Vec<VolumeMatch>,
}

impl Census {
    pub fn violations(&self) -> impl Iterator<Item = &Member> {
        self.members.iter().filter(|m| !m.violations.is_empty())
    }
}

#[derive(Clone, Debug)]
pub struct CensusOptions {
    pub klass: Class,
    /// Smallest vertex count reported; earlier rows are enumerated but not
    /// realized, which lets long runs be split into ranges.
    pub min_vertices: usize,
    pub max_vertices: usize,
    /// Worker threads; 0 uses the global pool.
    pub parallelism: usize,
    pub cache: Option<Cache>,
}

impl CensusOptions {
    pub fn new(klass: Class, max_vertices: usize) -> Self {
        let min_vertices = match klass {
            Class::Ideal => 6,
            Class::Compact => 20,
        };
        CensusOptions { klass, min_vertices, max_vertices, parallelism: 0, cache: None }
    }
}

/// Realizes `p` (or takes it from the cache) and returns the realization and
/// its volume.
pub fn realize_and_measure(
    p: &CombPolyhedron,
    code: &CanonicalCode,
    cache: Option<&Cache>,
) -> Result<(RealizedPolyhedron, f64), PipelineError> {
    let hex = || code.to_hex();
    if let Some(rec) = cache.and_then(|c| c.load(code)) {
        let r = RealizedPolyhedron { comb: p.clone(), normals: rec.normals, vertices: rec.vertices, residual: rec.residual };
        if r.klass() == rec.class && validate(&r).is_valid() {
            return Ok((r, rec.volume));
        }
    }
    let r = realize_polyhedron(p).map_err(|source| PipelineError::Realization { code: hex(), source })?;
    let vol = volume(&r).map_err(|source| PipelineError::Volume { code: hex(), source })?;
    if let Some(c) = cache {
        let rec = CacheRecord {
            canonical_code: hex(),
            class: r.klass(),
            normals: r.normals.clone(),
            vertices: r.vertices.clone(),
            residual: r.residual,
            volume: vol,
            solver_version: SOLVER_VERSION,
        };
        c.store(code, &rec)?;
    }
    Ok((r, vol))
}

fn bound_violations(p: &CombPolyhedron, vol: f64) -> Result<Vec<BoundKind>, PipelineError> {
    Ok(applicable_bounds(p)?.into_iter().filter(|b| !b.admits(vol, BOUND_TOL)).map(|b| b.kind).collect())
}

fn with_pool<T: Send>(parallelism: usize, f: impl FnOnce() -> T + Send) -> Result<T, PipelineError> {
    if parallelism == 0 {
        return Ok(f());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(parallelism)
        .build()
        .map_err(|e| PipelineError::ThreadPool(e.to_string()))?;
    Ok(pool.install(f))
}

/// Counts volumes after rounding to six decimals, merging neighbors closer
/// than [`DISTINCT_VOLUME_TOL`].
pub fn distinct_volume_count(volumes: &[f64]) -> usize {
    let mut rounded: Vec<f64> = volumes.iter().map(|v| format_volume(*v).parse().expect("formatted float")).collect();
    rounded.sort_by(f64::total_cmp);
    let mut count = 0;
    let mut last = f64::NEG_INFINITY;
    for v in rounded {
        // half a unit of slack absorbs decimal-to-binary noise
        if v - last > DISTINCT_VOLUME_TOL + 0.5e-6 {
            count += 1;
        }
        last = v;
    }
    count
}

fn volume_matches(members: &[Member]) -> Vec<VolumeMatch> {
    let mut out: Vec<VolumeMatch> = Vec::new();
    let mut sorted: Vec<&Member> = members.iter().collect();
    sorted.sort_by(|a, b| (a.vertices, a.volume).partial_cmp(&(b.vertices, b.volume)).expect("finite volumes"));
    for m in sorted {
        match out.last_mut() {
            Some(g) if g.vertices == m.vertices && (g.volume - m.volume).abs() <= DISTINCT_VOLUME_TOL => {
                g.canonical_codes.push(m.canonical_code.clone());
            }
            _ => out.push(VolumeMatch { vertices: m.vertices, volume: m.volume, canonical_codes: vec![m.canonical_code.clone()] }),
        }
    }
    out.retain(|g| g.canonical_codes.len() > 1);
    for g in out.iter_mut() {
        g.canonical_codes.sort();
    }
    out
}

pub fn run_census(opts: &CensusOptions) -> Result<Census, PipelineError> {
    if opts.min_vertices > opts.max_vertices {
        return Err(PipelineError::EmptyRange(opts.min_vertices, opts.max_vertices));
    }
    let budget = EnumerationBudget::new(opts.klass, opts.max_vertices, opts.parallelism)?;
    let candidates: Vec<_> = enumerate_candidates(&budget)?
        .into_iter()
        .filter(|c| c.polyhedron.vertex_count() >= opts.min_vertices)
        .collect();
    let cache = opts.cache.as_ref();
    let members = with_pool(opts.parallelism, || {
        candidates
            .par_iter()
            .map(|c| {
                let (r, vol) = realize_and_measure(&c.polyhedron, &c.code, cache)?;
                Ok(Member {
                    vertices: c.polyhedron.vertex_count(),
                    canonical_code: c.code.to_hex(),
                    volume: vol,
                    residual: r.residual,
                    best_upper: best_upper_bound(&c.polyhedron).expect("census members are in range"),
                    violations: bound_violations(&c.polyhedron, vol)?,
                })
            })
            .collect::<Result<Vec<Member>, PipelineError>>()
    })??;
    let step = if opts.klass == Class::Compact { 2 } else { 1 };
    let first = match opts.klass {
        Class::Compact => opts.min_vertices + opts.min_vertices % 2,
        Class::Ideal => opts.min_vertices,
    };
    let rows = (first..=opts.max_vertices)
        .step_by(step)
        .map(|v| {
            let vols: Vec<f64> = members.iter().filter(|m| m.vertices == v).map(|m| m.volume).collect();
            CensusRow {
                vertices: v,
                polyhedra_count: vols.len(),
                distinct_volume_count: distinct_volume_count(&vols),
                min_volume: vols.iter().copied().reduce(f64::min),
                max_volume: vols.iter().copied().reduce(f64::max),
            }
        })
        .collect();
    Ok(Census { klass: opts.klass, volume_matches: volume_matches(&members), members, rows })
}

fn opt_volume(x: Option<f64>) -> String {
    x.map(format_volume).unwrap_or_default()
}

/// `vertices,polyhedra,volumes,min_volume,max_volume`; empty rows leave the
/// volume columns blank.
pub fn census_csv(census: &Census) -> String {
    let mut out = String::from("vertices,polyhedra,volumes,min_volume,max_volume\n");
    for r in &census.rows {
        out += &format!(
            "{},{},{},{},{}\n",
            r.vertices,
            r.polyhedra_count,
            r.distinct_volume_count,
            opt_volume(r.min_volume),
            opt_volume(r.max_volume)
        );
    }
    out
}

/// One line per member: `vertices,canonical_code,volume,best_upper_kind,best_upper`.
pub fn members_csv(census: &Census) -> String {
    let mut out = String::from("vertices,canonical_code,volume,best_upper_kind,best_upper\n");
    for m in &census.members {
        out += &format!(
            "{},{},{},{},{}\n",
            m.vertices,
            m.canonical_code,
            format_volume(m.volume),
            m.best_upper.kind,
            format_volume(m.best_upper.value)
        );
    }
    out
}

/// Volumes of the census as dots, with the class's lower bound and improved
/// upper bound as lines over the vertex range.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FigureData {
    pub klass: Class,
    pub dots: Vec<(usize, f64)>,
    pub lines: Vec<(BoundKind, usize, f64)>,
}

pub fn figure_data(census: &Census) -> Result<FigureData, PipelineError> {
    let dots = census.members.iter().map(|m| (m.vertices, m.volume)).collect();
    let (Some(lo), Some(hi)) = (census.rows.first(), census.rows.last()) else {
        return Ok(FigureData { klass: census.klass, dots, lines: vec![] });
    };
    let mut lines = Vec::new();
    for v in lo.vertices..=hi.vertices {
        let (lower, improved) = match census.klass {
            Class::Ideal => (Some(ideal_bounds_atkinson(v)?.0), ideal_upper_improved(v).ok()),
            Class::Compact => {
                if v % 2 == 1 {
                    continue;
                }
                (compact_bounds_atkinson(v).ok().map(|b| b.0), compact_upper_improved(v).ok())
            }
        };
        for b in [lower, improved].into_iter().flatten() {
            lines.push((b.kind, v, b.value));
        }
    }
    Ok(FigureData { klass: census.klass, dots, lines })
}

/// `series,vertices,value`, where `series` is `volume` for dots and the
/// bound kind for lines.
pub fn figure_csv(fig: &FigureData) -> String {
    let mut out = String::from("series,vertices,value\n");
    for (v, vol) in &fig.dots {
        out += &format!("volume,{v},{}\n", format_volume(*vol));
    }
    for (kind, v, value) in &fig.lines {
        out += &format!("{kind},{v},{}\n", format_volume(*value));
    }
    out
}

/// A bound evaluated against a measured volume.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckedBound {
    #[serde(flatten)]
    pub bound: BoundValue,
    pub satisfied: bool,
    /// The volume meets the bound to within [`BOUND_TOL`].
    pub equality: bool,
}

/// Everything known about one polyhedron.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundReport {
    pub vertices: usize,
    pub class: Class,
    pub canonical_code: String,
    pub face_vector: FaceVector,
    pub identities_hold: bool,
    /// Why the polyhedron cannot be realized, when that is known up front.
    pub obstruction: Option<String>,
    pub realized: bool,
    pub realization_error: Option<String>,
    pub residual: Option<f64>,
    pub volume: Option<f64>,
    pub bounds: Vec<CheckedBound>,
    pub best_upper: Option<BoundValue>,
    /// All bounds hold; `None` without a volume.
    pub sandwich_ok: Option<bool>,
}

impl BoundReport {
    pub fn has_violation(&self) -> bool {
        self.sandwich_ok == Some(false)
    }
}

pub fn check_polyhedron(p: &CombPolyhedron, cache: Option<&Cache>) -> Result<BoundReport, PipelineError> {
    let code = canonical_code(p);
    let identities_hold = match p.klass() {
        Class::Ideal => check_ideal_identity(p),
        Class::Compact => check_compact_identity(p),
    }
    .unwrap_or(false);
    let obstruction = match p.klass() {
        Class::Compact => compact_obstruction(p),
        Class::Ideal => None,
    };
    // realize the canonical form so results match the census and cache
    let canonical = CombPolyhedron::with_class(p.skeleton().canonical_form(), p.klass())
        .expect("relabeling preserves the class");
    let measured = realize_and_measure(&canonical, &code, cache);
    let (residual, vol, realization_error) = match &measured {
        Ok((r, v)) => (Some(r.residual), Some(*v), None),
        Err(e) => (None, None, Some(e.to_string())),
    };
    // outside the bounds' vertex range there is simply nothing to check
    let bounds = applicable_bounds(p)
        .unwrap_or_default()
        .into_iter()
        .map(|b| {
            let satisfied = vol.is_none_or(|v| b.admits(v, BOUND_TOL));
            let equality = vol.is_some_and(|v| (v - b.value).abs() <= BOUND_TOL);
            CheckedBound { bound: b, satisfied, equality }
        })
        .collect::<Vec<_>>();
    Ok(BoundReport {
        vertices: p.vertex_count(),
        class: p.klass(),
        canonical_code: code.to_hex(),
        face_vector: p.face_vector().clone(),
        identities_hold,
        obstruction,
        realized: measured.is_ok(),
        realization_error,
        residual,
        volume: vol,
        sandwich_ok: vol.map(|_| bounds.iter().all(|b| b.satisfied)),
        best_upper: best_upper_bound(p),
        bounds,
    })
}

#[derive(Debug, Error)]
pub enum ReadError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}: {source}")]
    Parse { path: String, source: ParseError },
    #[error("{path}: record {index}: {source}")]
    Polyhedron { path: String, index: usize, source: CombError },
}

/// Reads every record of a file in the text exchange format, or in planar
/// code when it starts with the planar-code header.
pub fn read_polyhedra(path: &Path) -> Result<Vec<CombPolyhedron>, ReadError> {
    let name = path.display().to_string();
    let bytes = fs::read(path).map_err(|source| ReadError::Io { path: name.clone(), source })?;
    let maps = if bytes.starts_with(PLANAR_CODE_HEADER) {
        read_planar_code(&bytes)
    } else {
        read_text(&String::from_utf8_lossy(&bytes))
    }
    .map_err(|source| ReadError::Parse { path: name.clone(), source })?;
    maps.into_iter()
        .enumerate()
        .map(|(index, m)| CombPolyhedron::new(m).map_err(|source| ReadError::Polyhedron { path: name.clone(), index, source }))
        .collect()
}
