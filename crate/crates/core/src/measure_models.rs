//! Discretized measure models of commuting coordinate multiplication operators,
//! spectral-cube projections and their commutator bounds.

use std::collections::BTreeMap;
use std::sync::Arc;

use faer::c64;
use serde::{Deserialize, Serialize};

use crate::error::{input, Error, Result};
use crate::linalg::{self, CMat, RMat};
use crate::norms::NormingFunction;
use crate::tuples::{HybridProfile, OperatorTuple};

/// Largest model dimension for which dense tuples and projection matrices are built.
pub const MAX_DENSE_DIM: usize = 4096;

/// Cubes narrower than this many grid cells per axis are treated as unresolved
/// by the default filtration.
pub const MIN_CELLS_PER_CUBE: usize = 3;

/// Piecewise-constant multiplicity function on a uniform table over `[-1,1]^m`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityTable {
    /// Table cells per axis.
    pub resolution: usize,
    /// Row-major values (last axis fastest), `resolution^m` entries, all `>= 0`.
    pub values: Vec<f64>,
}

impl DensityTable {
    pub fn constant(value: f64) -> Self {
        DensityTable { resolution: 1, values: vec![value] }
    }

    fn validate(&self, m: usize) -> Result<()> {
        let expected = self.resolution.checked_pow(m as u32).unwrap_or(usize::MAX);
        if self.resolution == 0 || self.values.len() != expected {
            return Err(Error::Config(format!(
                "density table needs resolution^m = {expected} values, got {}",
                self.values.len()
            )));
        }
        if self.values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::Config("density values must be finite and non-negative".into()));
        }
        Ok(())
    }

    fn at(&self, x: &[f64]) -> f64 {
        let r = self.resolution;
        let mut idx = 0;
        for &xj in x {
            let k = (((xj + 1.0) / 2.0 * r as f64).floor() as isize).clamp(0, r as isize - 1) as usize;
            idx = idx * r + k;
        }
        self.values[idx]
    }

    fn integral(&self, m: usize) -> f64 {
        let cell = (2.0 / self.resolution as f64).powi(m as i32);
        self.values.iter().sum::<f64>() * cell
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MeasureKind {
    Lebesgue,
    /// Product of one-dimensional Cantor-type constructions on `[-1,1]`: each interval
    /// keeps two end pieces of relative length `ratio`. The model measure is the
    /// normalized uniform measure on the depth-`depth` approximant.
    CantorProduct { depth: u32, ratio: f64 },
    AcDensity { density: DensityTable },
}

/// Serializable model descriptor.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    #[serde(flatten)]
    pub kind: MeasureKind,
    pub m: usize,
    pub n: usize,
}

impl ModelSpec {
    pub fn build(&self) -> Result<GridModel> {
        GridModel::new(self.kind.clone(), self.m, self.n)
    }
}

/// A weighted uniform grid of cell centers in an axis-aligned box (initially `[-1,1]^m`).
#[derive(Clone, Debug)]
pub struct GridModel {
    m: usize,
    n: usize,
    kind: MeasureKind,
    points: Vec<f64>,
    weights: Vec<f64>,
    cells: Vec<u32>,
    domain: Vec<(f64, f64)>,
    mass_scale: f64,
    lookup: Option<Vec<u32>>,
}

fn cantor_intervals(depth: u32, ratio: f64) -> Vec<(f64, f64)> {
    let mut iv = vec![(-1.0, 1.0)];
    for _ in 0..depth {
        iv = iv
            .iter()
            .flat_map(|&(a, b)| {
                let len = ratio * (b - a);
                [(a, a + len), (b - len, b)]
            })
            .collect();
    }
    iv
}

/// Mass of each of the `n` cells of `[-1,1]` under the normalized uniform measure on `intervals`.
fn axis_masses(n: usize, intervals: &[(f64, f64)]) -> Vec<f64> {
    let h = 2.0 / n as f64;
    let total: f64 = intervals.iter().map(|(a, b)| b - a).sum();
    let mut out = vec![0.0; n];
    for &(a, b) in intervals {
        let first = (((a + 1.0) / h).floor() as isize).clamp(0, n as isize - 1) as usize;
        let last = (((b + 1.0) / h).ceil() as isize).clamp(1, n as isize) as usize;
        for (i, o) in out.iter_mut().enumerate().take(last).skip(first) {
            let lo = -1.0 + i as f64 * h;
            let hi = lo + h;
            let ov = b.min(hi) - a.max(lo);
            if ov > 0.0 {
                *o += ov / total;
            }
        }
    }
    let top = out.iter().cloned().fold(0.0, f64::max);
    for v in &mut out {
        if *v < 1e-12 * top {
            *v = 0.0;
        }
    }
    out
}

impl GridModel {
    pub fn new(kind: MeasureKind, m: usize, n: usize) -> Result<Self> {
        if m == 0 || n < 2 {
            return Err(input(format!("grid model needs m >= 1 and N >= 2, got m={m}, N={n}")));
        }
        let total = n.checked_pow(m as u32).filter(|&t| t <= u32::MAX as usize).ok_or_else(|| input("grid too large"))?;
        let h = 2.0 / n as f64;
        let vol = h.powi(m as i32);
        let axis: Option<Vec<f64>> = match &kind {
            MeasureKind::Lebesgue => None,
            MeasureKind::CantorProduct { depth, ratio } => {
                if !(*ratio > 0.0 && *ratio < 0.5) || *depth > 24 {
                    return Err(Error::Config(format!("cantor construction needs 0 < ratio < 1/2 and depth <= 24, got ({depth}, {ratio})")));
                }
                Some(axis_masses(n, &cantor_intervals(*depth, *ratio)))
            }
            MeasureKind::AcDensity { density } => {
                density.validate(m)?;
                None
            }
        };
        let mut points = Vec::new();
        let mut weights = Vec::new();
        let mut cells = Vec::new();
        let mut idx = vec![0usize; m];
        let mut x = vec![0.0; m];
        for lin in 0..total {
            let mut r = lin;
            for j in (0..m).rev() {
                idx[j] = r % n;
                r /= n;
            }
            for j in 0..m {
                x[j] = -1.0 + (idx[j] as f64 + 0.5) * h;
            }
            let w = match &kind {
                MeasureKind::Lebesgue => vol,
                MeasureKind::CantorProduct { .. } => {
                    let am = axis.as_ref().unwrap();
                    idx.iter().map(|&i| am[i]).product()
                }
                MeasureKind::AcDensity { density } => density.at(&x) * vol,
            };
            if w > 0.0 {
                points.extend_from_slice(&x);
                weights.push(w);
                cells.extend(idx.iter().map(|&i| i as u32));
            }
        }
        if weights.is_empty() {
            return Err(Error::Degenerate("model measure has no mass on the grid".into()));
        }
        let lookup = if total <= 1 << 26 {
            let mut lk = vec![u32::MAX; total];
            for a in 0..weights.len() {
                let mut lin = 0usize;
                for j in 0..m {
                    lin = lin * n + cells[a * m + j] as usize;
                }
                lk[lin] = a as u32;
            }
            Some(lk)
        } else {
            None
        };
        Ok(GridModel { m, n, kind, points, weights, cells, domain: vec![(-1.0, 1.0); m], mass_scale: 1.0, lookup })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n_per_axis(&self) -> usize {
        self.n
    }

    pub fn kind(&self) -> &MeasureKind {
        &self.kind
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn point(&self, a: usize) -> &[f64] {
        &self.points[a * self.m..(a + 1) * self.m]
    }

    pub fn coord(&self, a: usize, j: usize) -> f64 {
        self.points[a * self.m + j]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn cell(&self, a: usize) -> &[u32] {
        &self.cells[a * self.m..(a + 1) * self.m]
    }

    /// The box tiled by the grid.
    pub fn domain(&self) -> &[(f64, f64)] {
        &self.domain
    }

    /// Grid spacing along axis `j`.
    pub fn spacing(&self, j: usize) -> f64 {
        (self.domain[j].1 - self.domain[j].0) / self.n as f64
    }

    /// Point index of a grid cell, if the cell carries mass.
    pub fn index_of(&self, cell: &[usize]) -> Option<usize> {
        let mut lin = 0usize;
        for &c in cell {
            if c >= self.n {
                return None;
            }
            lin = lin * self.n + c;
        }
        match &self.lookup {
            Some(lk) => match lk[lin] {
                u32::MAX => None,
                a => Some(a as usize),
            },
            None => (0..self.dim()).find(|&a| self.cell(a).iter().zip(cell).all(|(&x, &y)| x as usize == y)),
        }
    }

    pub fn total_mass(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// The diagonal coordinate tuple `(D_1, …, D_m)`, tagged with this model.
    pub fn tuple(self: &Arc<Self>) -> Result<OperatorTuple> {
        let d = self.dim();
        if d > MAX_DENSE_DIM {
            return Err(Error::Config(format!("model dimension {d} exceeds the dense limit {MAX_DENSE_DIM}")));
        }
        let mats = (0..self.m)
            .map(|j| linalg::diag_real(&(0..d).map(|a| self.coord(a, j)).collect::<Vec<_>>()))
            .collect();
        Ok(OperatorTuple::new(mats)?.with_grid(self.clone()))
    }

    /// Points and box translated by `-c`.
    pub fn translated(&self, c: &[f64]) -> GridModel {
        let mut out = self.clone();
        for a in 0..out.dim() {
            for j in 0..self.m {
                out.points[a * self.m + j] -= c[j];
            }
        }
        for (j, d) in out.domain.iter_mut().enumerate() {
            *d = (d.0 - c[j], d.1 - c[j]);
        }
        out
    }

    /// Isotropic dilation `x ↦ t x`; masses scale by `t^m`.
    pub fn dilated(&self, t: f64) -> Result<GridModel> {
        self.scaled(&vec![t; self.m], t.powi(self.m as i32), t)
    }

    /// Mixed-homogeneity dilation `x_j ↦ t^{1/p_j} x_j`; masses scale by `t`.
    pub fn gauge_dilated(&self, t: f64, p: &[f64]) -> Result<GridModel> {
        if p.len() != self.m {
            return Err(input("exponent vector length differs from model arity"));
        }
        let f: Vec<f64> = p.iter().map(|pj| t.powf(1.0 / pj)).collect();
        self.scaled(&f, t, t)
    }

    fn scaled(&self, f: &[f64], mass: f64, t: f64) -> Result<GridModel> {
        if !(t > 0.0) || !t.is_finite() {
            return Err(input(format!("dilation factor must be positive, got {t}")));
        }
        let mut out = self.clone();
        for a in 0..out.dim() {
            for j in 0..self.m {
                out.points[a * self.m + j] *= f[j];
            }
        }
        for (j, d) in out.domain.iter_mut().enumerate() {
            *d = (d.0 * f[j], d.1 * f[j]);
        }
        out.weights.iter_mut().for_each(|w| *w *= mass);
        out.mass_scale *= mass;
        Ok(out)
    }

    /// Affine map of the domain box onto `[0,1]^m`; grid points land in `(0,1)^m`.
    pub fn to_unit(&self, x: &[f64]) -> Vec<f64> {
        x.iter().zip(&self.domain).map(|(v, (lo, hi))| (v - lo) / (hi - lo)).collect()
    }

    /// Inverse of [`GridModel::to_unit`].
    pub fn from_unit(&self, u: &[f64]) -> Vec<f64> {
        u.iter().zip(&self.domain).map(|(v, (lo, hi))| lo + v * (hi - lo)).collect()
    }

    pub fn unit_coord(&self, a: usize, j: usize) -> f64 {
        let (lo, hi) = self.domain[j];
        (self.coord(a, j) - lo) / (hi - lo)
    }

    /// Default cyclic vector: square roots of the weights.
    pub fn default_cyclic(&self) -> Vec<f64> {
        self.weights.iter().map(|w| w.sqrt()).collect()
    }
}

/// `build_model`: the grid model and its diagonal coordinate tuple.
pub fn build_model(kind: MeasureKind, m: usize, n: usize) -> Result<(Arc<GridModel>, OperatorTuple)> {
    let model = Arc::new(GridModel::new(kind, m, n)?);
    let tuple = model.tuple()?;
    Ok((model, tuple))
}

/// Absolutely continuous (with multiplicity) and singular masses of the model measure.
pub fn lebesgue_decompose(model: &GridModel) -> (f64, f64) {
    let m = model.m;
    match &model.kind {
        MeasureKind::Lebesgue => (2f64.powi(m as i32) * model.mass_scale, 0.0),
        MeasureKind::AcDensity { density } => (density.integral(m) * model.mass_scale, 0.0),
        MeasureKind::CantorProduct { .. } => (0.0, model.mass_scale),
    }
}

/// Cube counts `N_k = floor(φ(k)(1^{m_param}))`, clamped below at 1.
pub fn cube_counts(phi: &HybridProfile, m_param: usize) -> (Vec<usize>, bool) {
    let mut clamped = false;
    let counts = phi
        .funcs
        .iter()
        .map(|f| {
            let v = (f.on_ones(m_param) + 1e-9).floor();
            if v < 1.0 {
                clamped = true;
                1
            } else {
                v as usize
            }
        })
        .collect();
    (counts, clamped)
}

/// One occupied spectral cube.
#[derive(Clone, Debug, PartialEq)]
pub struct Cube {
    /// Zero-based cube multi-index `(k_1 − 1, …, k_n − 1)`.
    pub index: Vec<usize>,
    pub members: Vec<usize>,
    /// `‖E ξ‖²`.
    pub norm2: f64,
}

/// Orthogonal projection onto the span of the cube restrictions of a cyclic vector.
#[derive(Clone, Debug)]
pub struct CubeProjection {
    pub cube_counts: Vec<usize>,
    pub cyclic_vector: Vec<f64>,
    pub cubes: Vec<Cube>,
    /// True when some count floor fell below 1 and was clamped.
    pub clamped: bool,
    dim: usize,
}

fn cube_of(model: &GridModel, a: usize, counts: &[usize]) -> Vec<usize> {
    (0..model.m)
        .map(|j| ((model.unit_coord(a, j) * counts[j] as f64).floor() as usize).min(counts[j] - 1))
        .collect()
}

pub fn cube_projection(model: &GridModel, phi: &HybridProfile, m_param: usize, cyclic: Option<&[f64]>) -> Result<CubeProjection> {
    if phi.arity() != model.m {
        return Err(input("profile arity differs from model arity"));
    }
    if m_param == 0 {
        return Err(input("m_param must be positive"));
    }
    let (counts, clamped) = cube_counts(phi, m_param);
    let xi: Vec<f64> = match cyclic {
        Some(c) if c.len() != model.dim() => return Err(input("cyclic vector length differs from model dimension")),
        Some(c) => c.to_vec(),
        None => model.default_cyclic(),
    };
    let mut map: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
    for a in 0..model.dim() {
        map.entry(cube_of(model, a, &counts)).or_default().push(a);
    }
    if map.is_empty() {
        return Err(Error::Degenerate("no occupied spectral cubes".into()));
    }
    let mut cubes = Vec::with_capacity(map.len());
    for (index, members) in map {
        let norm2: f64 = members.iter().map(|&a| xi[a] * xi[a]).sum();
        if !(norm2 > 0.0) {
            return Err(Error::Degenerate(format!("cyclic vector vanishes on cube {index:?}")));
        }
        cubes.push(Cube { index, members, norm2 });
    }
    Ok(CubeProjection { cube_counts: counts, cyclic_vector: xi, cubes, clamped, dim: model.dim() })
}

impl CubeProjection {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.cubes.len()
    }

    /// Dense projection matrix.
    pub fn matrix(&self) -> Result<CMat> {
        if self.dim > MAX_DENSE_DIM {
            return Err(Error::Config(format!("projection dimension {} exceeds the dense limit", self.dim)));
        }
        let mut p = CMat::zeros(self.dim, self.dim);
        for c in &self.cubes {
            for &a in &c.members {
                for &b in &c.members {
                    p[(a, b)] = c64::new(self.cyclic_vector[a] * self.cyclic_vector[b] / c.norm2, 0.0);
                }
            }
        }
        Ok(p)
    }

    /// Dense spectral projection `E` of one cube.
    pub fn cube_spectral_projection(&self, c: usize) -> CMat {
        let mut e = CMat::zeros(self.dim, self.dim);
        for &a in &self.cubes[c].members {
            e[(a, a)] = c64::new(1.0, 0.0);
        }
        e
    }

    /// Singular values of `[diag(x), P]` assembled cube by cube; each cube contributes the
    /// weighted standard deviation of `x` over the cube twice.
    pub fn commutator_svals(&self, x: impl Fn(usize) -> f64) -> Vec<f64> {
        let mut out = Vec::with_capacity(2 * self.cubes.len());
        for c in &self.cubes {
            let mean = c.members.iter().map(|&a| self.cyclic_vector[a].powi(2) * x(a)).sum::<f64>() / c.norm2;
            let var = c.members.iter().map(|&a| self.cyclic_vector[a].powi(2) * (x(a) - mean).powi(2)).sum::<f64>() / c.norm2;
            let s = var.max(0.0).sqrt();
            if s > 0.0 {
                out.push(s);
                out.push(s);
            }
        }
        out.sort_by(|a, b| b.total_cmp(a));
        out
    }

    /// Dense real block `E_c [diag(x), P] E_c` restricted to the cube members.
    pub fn cube_commutator_block(&self, c: usize, x: impl Fn(usize) -> f64) -> RMat {
        let cube = &self.cubes[c];
        let xi = &self.cyclic_vector;
        RMat::from_fn(cube.members.len(), cube.members.len(), |i, k| {
            let (a, b) = (cube.members[i], cube.members[k]);
            (x(a) - x(b)) * xi[a] * xi[b] / cube.norm2
        })
    }
}

/// Cube commutator singular values of every coordinate operator, plus the number of
/// occupied cubes (the rank of the projection).
#[derive(Clone, Debug, PartialEq)]
pub struct CubeValues {
    pub per_component: Vec<Vec<f64>>,
    pub occupied: usize,
}

/// Per-component cube commutator singular values for the model coordinates, computed by
/// single-pass accumulation relative to each cube corner. Used for large models where
/// membership lists are not needed.
pub fn cube_commutator_values(model: &GridModel, counts: &[usize], cyclic: Option<&[f64]>) -> CubeValues {
    let m = model.m;
    let occupied = counts.iter().try_fold(1usize, |acc, &c| acc.checked_mul(c)).filter(|&t| t <= 1 << 24);
    // per cube: weight, then (Σ w dx, Σ w dx²) per axis
    let stride = 1 + 2 * m;
    let mut dense: Vec<f64>;
    let mut sparse: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
    let use_dense = occupied.is_some();
    dense = if use_dense { vec![0.0; occupied.unwrap() * stride] } else { Vec::new() };
    let widths: Vec<f64> = (0..m).map(|j| (model.domain[j].1 - model.domain[j].0) / counts[j] as f64).collect();
    for a in 0..model.dim() {
        let w = match cyclic {
            Some(c) => c[a] * c[a],
            None => model.weights[a],
        };
        let idx = cube_of(model, a, counts);
        let mut lin = 0usize;
        for j in 0..m {
            lin = lin * counts[j] + idx[j];
        }
        let acc: &mut [f64] = if use_dense {
            &mut dense[lin * stride..(lin + 1) * stride]
        } else {
            sparse.entry(lin).or_insert_with(|| vec![0.0; stride])
        };
        acc[0] += w;
        for j in 0..m {
            let dx = model.coord(a, j) - (model.domain[j].0 + idx[j] as f64 * widths[j]);
            acc[1 + 2 * j] += w * dx;
            acc[2 + 2 * j] += w * dx * dx;
        }
    }
    let mut out = vec![Vec::new(); m];
    let mut occupied = 0;
    let mut push = |acc: &[f64]| {
        if acc[0] > 0.0 {
            occupied += 1;
            for j in 0..m {
                let mean = acc[1 + 2 * j] / acc[0];
                let var = acc[2 + 2 * j] / acc[0] - mean * mean;
                let s = var.max(0.0).sqrt();
                if s > 0.0 {
                    out[j].push(s);
                    out[j].push(s);
                }
            }
        }
    };
    if use_dense {
        dense.chunks(stride).for_each(&mut push);
    } else {
        sparse.values().for_each(|v| push(v));
    }
    for v in &mut out {
        v.sort_by(|a, b| b.total_cmp(a));
    }
    CubeValues { per_component: out, occupied }
}

/// Distinct cube-count vectors reachable by `m_param`, restricted to cubes at least
/// [`MIN_CELLS_PER_CUBE`] grid cells wide. Returns the smallest `m_param` for each.
pub fn cube_ladder(model: &GridModel, phi: &HybridProfile) -> Vec<usize> {
    let limit = (model.n / MIN_CELLS_PER_CUBE).max(1);
    let mut ladder = Vec::new();
    let mut last: Option<Vec<usize>> = None;
    let mut sums = vec![0.0f64; phi.arity()];
    const M_CAP: usize = 10_000_000;
    for mp in 1..=M_CAP {
        let mut counts = Vec::with_capacity(phi.arity());
        for (k, f) in phi.funcs.iter().enumerate() {
            let v = match f {
                NormingFunction::Schatten { p } => (mp as f64).powf(1.0 / p),
                NormingFunction::LorentzMinus { p } => {
                    sums[k] += (mp as f64).powf(-1.0 + 1.0 / p);
                    sums[k]
                }
                NormingFunction::LorentzPlus { p } => {
                    sums[k] += (mp as f64).powf(-1.0 / p);
                    mp as f64 / sums[k]
                }
                NormingFunction::Pi { seq } => {
                    sums[k] += seq.term(mp);
                    sums[k]
                }
                NormingFunction::PiStar { seq } => {
                    sums[k] += seq.term(mp);
                    mp as f64 / sums[k]
                }
            };
            counts.push(((v + 1e-9).floor() as usize).max(1));
        }
        if counts.iter().any(|&c| c > limit) {
            break;
        }
        if last.as_ref() != Some(&counts) {
            ladder.push(mp);
            last = Some(counts);
        }
    }
    ladder
}

/// Empirical value of `lim m^{-1} Π_k N_k(m)`.
#[derive(Clone, Debug, PartialEq)]
pub struct BLimit {
    pub samples: Vec<(usize, f64)>,
    pub value: f64,
    /// False when the last two samples differ by more than 2%; the bound is then not interpretable.
    pub stable: bool,
}

pub fn b_limit(phi: &HybridProfile) -> BLimit {
    let samples: Vec<(usize, f64)> = [10_000usize, 100_000, 1_000_000]
        .iter()
        .map(|&m| {
            let prod: f64 = phi.funcs.iter().map(|f| f.on_ones(m)).product();
            (m, prod / m as f64)
        })
        .collect();
    let (a, b) = (samples[1].1, samples[2].1);
    let stable = b.is_finite() && b > 0.0 && ((a - b) / b).abs() < 0.02;
    BLimit { value: b, samples, stable }
}

/// Per-component outcome of [`commutator_bound_check`].
#[derive(Clone, Debug, PartialEq)]
pub struct ComponentBound {
    pub count: usize,
    pub max_block_rank: usize,
    pub max_block_norm: f64,
    /// `2 / N_j`.
    pub block_norm_bound: f64,
    /// `|[T_j, P]|_{φ(j)}` from the cube-by-cube singular values.
    pub measured: f64,
    /// The same quantity from one dense SVD of the full commutator, when affordable.
    pub measured_dense: Option<f64>,
    /// `4 N_j^{-1} φ(j)(1^{N_1⋯N_n})`.
    pub bound: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CommutatorBoundReport {
    pub components: Vec<ComponentBound>,
    pub b: BLimit,
    pub all_pass: bool,
}

/// Checks the cube-projection commutator bounds for the rescaled coordinates `T_j`.
pub fn commutator_bound_check(model: &GridModel, proj: &CubeProjection, phi: &HybridProfile) -> Result<CommutatorBoundReport> {
    if phi.arity() != model.m || proj.dim() != model.dim() {
        return Err(input("projection, profile and model do not match"));
    }
    let total: usize = proj.cube_counts.iter().product();
    let mut components = Vec::with_capacity(model.m);
    for (j, f) in phi.funcs.iter().enumerate() {
        let nj = proj.cube_counts[j];
        let x = |a: usize| model.unit_coord(a, j);
        let mut max_rank = 0;
        let mut max_norm = 0.0f64;
        for c in 0..proj.cubes.len() {
            if proj.cubes[c].members.len() > MAX_DENSE_DIM {
                return Err(Error::Config("cube too large for a dense block check".into()));
            }
            let block = proj.cube_commutator_block(c, x);
            let s = linalg::singular_values_real(&block)?;
            max_rank = max_rank.max(linalg::numerical_rank(&s));
            max_norm = max_norm.max(s.first().copied().unwrap_or(0.0));
        }
        let svals = proj.commutator_svals(x);
        let measured = f.evaluate_sorted(&svals).value;
        let measured_dense = if model.dim() <= 2048 {
            let p = proj.matrix()?;
            let full = RMat::from_fn(model.dim(), model.dim(), |a, b| (x(a) - x(b)) * p[(a, b)].re);
            let s = linalg::singular_values_real(&full)?;
            Some(f.evaluate_sorted(&s).value)
        } else {
            None
        };
        let bound = 4.0 / nj as f64 * f.on_ones(total);
        let block_norm_bound = 2.0 / nj as f64;
        let pass = max_rank <= 2 && max_norm <= block_norm_bound && measured <= bound;
        components.push(ComponentBound {
            count: nj,
            max_block_rank: max_rank,
            max_block_norm: max_norm,
            block_norm_bound,
            measured,
            measured_dense,
            bound,
            pass,
        });
    }
    let all_pass = components.iter().all(|c| c.pass);
    Ok(CommutatorBoundReport { components, b: b_limit(phi), all_pass })
}
