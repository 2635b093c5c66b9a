//! Dyadic and lattice-localized block decomposition of a discretized kernel
//! operator, and numerical checks of the block-orthogonality hypotheses.

use std::collections::BTreeMap;

use faer::Side;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::cutoff::{phi_of_gauge, theta_axis, BUMP_RADIUS, PHI0_INNER, PHI0_OUTER, THETA_PITCH};
use super::{conjugate_exponents, gauge, KernelSpec};
use crate::error::{input, Error, Result};
use crate::linalg::{self, RMat};
use crate::measure_models::{GridModel, MAX_DENSE_DIM};

/// Lattice indices in one residue class differ by multiples of this.
pub const CLASS_MODULUS: i64 = 1000;
/// Tolerance factor for the block orthogonality products.
pub const ORTHO_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CutoffParams {
    pub phi0_inner: f64,
    pub phi0_outer: f64,
    pub theta_pitch: f64,
    pub bump_radius: f64,
    pub class_modulus: i64,
    pub residue: Vec<i64>,
}

impl CutoffParams {
    pub fn for_class(residue: Vec<i64>) -> Self {
        CutoffParams {
            phi0_inner: PHI0_INNER,
            phi0_outer: PHI0_OUTER,
            theta_pitch: THETA_PITCH,
            bump_radius: BUMP_RADIUS,
            class_modulus: CLASS_MODULUS,
            residue,
        }
    }
}

/// One localized piece `S_{n,l}`, stored on its row and column supports.
#[derive(Clone, Debug)]
pub struct Block {
    pub n: i32,
    pub l: Vec<i64>,
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
    pub data: RMat,
}

impl Block {
    pub fn new(n: i32, l: Vec<i64>, rows: Vec<usize>, cols: Vec<usize>, data: RMat) -> Result<Self> {
        if data.nrows() != rows.len() || data.ncols() != cols.len() {
            return Err(input("block data shape differs from its supports"));
        }
        if !rows.windows(2).all(|w| w[0] < w[1]) || !cols.windows(2).all(|w| w[0] < w[1]) {
            return Err(input("block supports must be strictly increasing"));
        }
        Ok(Block { n, l, rows, cols, data })
    }

    /// Singular values, from the Gram matrix on the smaller side.
    pub fn singular_values(&self) -> Result<Vec<f64>> {
        if self.rows.is_empty() || self.cols.is_empty() {
            return Ok(Vec::new());
        }
        let g = if self.rows.len() <= self.cols.len() {
            &self.data * self.data.transpose()
        } else {
            self.data.transpose() * &self.data
        };
        let mut e: Vec<f64> = g
            .self_adjoint_eigenvalues(Side::Lower)
            .map_err(|e| Error::Numerical(format!("eigensolver failed: {e:?}")))?
            .iter()
            .map(|v| v.max(0.0).sqrt())
            .collect();
        e.sort_by(|a, b| b.total_cmp(a));
        Ok(e)
    }

    pub fn trace_norm(&self) -> Result<f64> {
        Ok(self.singular_values()?.iter().sum())
    }

    pub fn op_norm(&self) -> Result<f64> {
        Ok(self.singular_values()?.first().copied().unwrap_or(0.0))
    }
}

/// Positions of the common entries of two increasing index lists.
fn intersect(a: &[usize], b: &[usize]) -> (Vec<usize>, Vec<usize>) {
    let (mut i, mut j) = (0, 0);
    let (mut ia, mut ib) = (Vec::new(), Vec::new());
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                ia.push(i);
                ib.push(j);
                i += 1;
                j += 1;
            }
        }
    }
    (ia, ib)
}

/// Frobenius norm of `Σ_k x(r, pos_x[k]) · y(pos_y[k], c)` over all `r, c`.
fn contracted_norm(x: &RMat, pos_x: &[usize], x_by_col: bool, y: &RMat, pos_y: &[usize], y_by_row: bool) -> f64 {
    if pos_x.is_empty() {
        return 0.0;
    }
    let k = pos_x.len();
    let xr = if x_by_col { x.nrows() } else { x.ncols() };
    let yc = if y_by_row { y.ncols() } else { y.nrows() };
    let xs = RMat::from_fn(xr, k, |r, t| if x_by_col { x[(r, pos_x[t])] } else { x[(pos_x[t], r)] });
    let ys = RMat::from_fn(k, yc, |t, c| if y_by_row { y[(pos_y[t], c)] } else { y[(c, pos_y[t])] });
    (&xs * &ys).norm_l2()
}

/// The three products `T_i T_j`, `T_i* T_j`, `T_i T_j*` (Frobenius norms, which bound the operator norms).
pub fn block_products(a: &Block, b: &Block) -> [f64; 3] {
    let (p1, q1) = intersect(&a.cols, &b.rows);
    let ab = contracted_norm(&a.data, &p1, true, &b.data, &q1, true);
    let (p2, q2) = intersect(&a.rows, &b.rows);
    let atb = contracted_norm(&a.data, &p2, false, &b.data, &q2, true);
    let (p3, q3) = intersect(&a.cols, &b.cols);
    let abt = contracted_norm(&a.data, &p3, true, &b.data, &q3, false);
    [ab, atb, abt]
}

#[derive(Clone, Debug)]
pub struct BlockSet {
    pub spec: KernelSpec,
    pub blocks: Vec<Block>,
    pub cutoff_params: CutoffParams,
    /// Levels actually built.
    pub levels: (i32, i32),
    pub requested: (i32, i32),
    pub warnings: Vec<String>,
    /// `max |Σ_n φ(σ(2^n)u) − 1|` over sample points inside the covered gauge shell.
    pub partition_residual: Option<f64>,
    /// Levels below `n_0 − 2` and the largest cutoff value they can take on the model support.
    pub zero_levels: Vec<(i32, f64)>,
}

impl BlockSet {
    pub fn at_level(&self, n: i32) -> impl Iterator<Item = &Block> {
        self.blocks.iter().filter(move |b| b.n == n)
    }

    pub fn count_at(&self, n: i32) -> usize {
        self.at_level(n).count()
    }

    pub fn report_rows(&self) -> Result<Vec<BlockRow>> {
        let mut out = Vec::with_capacity(self.blocks.len());
        for b in &self.blocks {
            let s = b.singular_values()?;
            out.push(BlockRow {
                level: b.n,
                l: b.l.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" "),
                trace_norm: s.iter().sum(),
                op_norm: s.first().copied().unwrap_or(0.0),
                active_count: self.count_at(b.n),
            });
        }
        Ok(out)
    }
}

/// CSV-ready summary of one block.
#[derive(Clone, Debug, Serialize)]
pub struct BlockRow {
    pub level: i32,
    pub l: String,
    pub trace_norm: f64,
    pub op_norm: f64,
    pub active_count: usize,
}

fn level_resolved(model: &GridModel, spec: &KernelSpec, n: i32) -> bool {
    (0..model.m()).all(|j| {
        let h = model.spacing(j);
        let p = spec.p[j];
        2.0 * BUMP_RADIUS * 2f64.powf(-n as f64 / p) >= h && 2f64.powf((1 - n) as f64 / p) >= 2.0 * h
    })
}

/// Groups model points by the lattice index `l` of their localization bump at level `n`.
fn bucket_rows(model: &GridModel, spec: &KernelSpec, n: i32, residue: &[i64]) -> BTreeMap<Vec<i64>, Vec<usize>> {
    let m = model.m();
    let sc: Vec<f64> = spec.p.iter().map(|p| 2f64.powf(n as f64 / p)).collect();
    let mut out: BTreeMap<Vec<i64>, Vec<usize>> = BTreeMap::new();
    'pts: for a in 0..model.dim() {
        let mut l = vec![0i64; m];
        for j in 0..m {
            let s = sc[j] * model.coord(a, j);
            let k = ((s / THETA_PITCH - residue[j] as f64) / CLASS_MODULUS as f64).round() as i64;
            let lj = residue[j] + CLASS_MODULUS * k;
            if theta_axis(s - THETA_PITCH * lj as f64) == 0.0 {
                continue 'pts;
            }
            l[j] = lj;
        }
        out.entry(l).or_default().push(a);
    }
    out
}

/// Active lattice indices per level for one residue class (no blocks are formed).
pub fn active_block_counts(model: &GridModel, spec: &KernelSpec, levels: (i32, i32), residue: &[i64]) -> Result<Vec<(i32, usize)>> {
    spec.validate()?;
    check_residue(model, residue)?;
    Ok((levels.0..=levels.1).map(|n| (n, bucket_rows(model, spec, n, residue).len())).collect())
}

/// `|I(n)| ≤ C·2^n` holds for `n ≥ 0` with this `C` on any grid in `[-1,1]^m`:
/// per axis at most `0.2·2^{n/p_j} + 1.02` lattice centers of one class meet the dilated cube.
pub fn geometric_count_bound(m: usize) -> f64 {
    1.22f64.powi(m as i32)
}

fn check_residue(model: &GridModel, residue: &[i64]) -> Result<()> {
    if residue.len() != model.m() || residue.iter().any(|&g| !(0..CLASS_MODULUS).contains(&g)) {
        return Err(input(format!("residue class must have {} entries in [0, {CLASS_MODULUS})", model.m())));
    }
    Ok(())
}

/// Builds `S_{n,l}` for one `l` on the given row set.
fn build_block(model: &GridModel, spec: &KernelSpec, n: i32, l: &[i64], rows: &[usize]) -> Result<Block> {
    let m = model.m();
    let sc: Vec<f64> = spec.p.iter().map(|p| 2f64.powf(n as f64 / p)).collect();
    let two_n = 2f64.powi(n);
    let sw: Vec<f64> = model.weights().iter().map(|w| w.sqrt()).collect();
    let row_factor: Vec<f64> = rows
        .iter()
        .map(|&a| sw[a] * (0..m).map(|j| theta_axis(sc[j] * model.coord(a, j) - THETA_PITCH * l[j] as f64)).product::<f64>())
        .collect();
    // column candidates: the row bounding box widened by the cutoff reach
    let mut lo = vec![0usize; m];
    let mut hi = vec![0usize; m];
    let nn = model.n_per_axis();
    for j in 0..m {
        let reach = 2f64.powf((1 - n) as f64 / spec.p[j]);
        let (dlo, _) = model.domain()[j];
        let h = model.spacing(j);
        let xmin = rows.iter().map(|&a| model.coord(a, j)).fold(f64::INFINITY, f64::min);
        let xmax = rows.iter().map(|&a| model.coord(a, j)).fold(f64::NEG_INFINITY, f64::max);
        lo[j] = ((xmin - reach - dlo) / h).floor().max(0.0) as usize;
        hi[j] = (((xmax + reach - dlo) / h).ceil().max(0.0) as usize).min(nn - 1);
    }
    let mut cols = Vec::new();
    let mut idx = lo.clone();
    loop {
        if let Some(b) = model.index_of(&idx) {
            cols.push(b);
        }
        let mut j = m;
        loop {
            if j == 0 {
                break;
            }
            j -= 1;
            if idx[j] < hi[j] {
                idx[j] += 1;
                for t in idx.iter_mut().skip(j + 1).zip(lo.iter().skip(j + 1)) {
                    *t.0 = *t.1;
                }
                j = usize::MAX;
                break;
            }
        }
        if j != usize::MAX {
            break;
        }
    }
    cols.sort_unstable();
    let mut kept_cols = Vec::new();
    let mut values: Vec<f64> = Vec::new();
    let mut u = vec![0.0; m];
    let mut col = vec![0.0; rows.len()];
    for &b in &cols {
        let mut any = false;
        for (r, &a) in rows.iter().enumerate() {
            col[r] = 0.0;
            if a == b || row_factor[r] == 0.0 {
                continue;
            }
            for j in 0..m {
                u[j] = model.coord(a, j) - model.coord(b, j);
            }
            let f = phi_of_gauge(two_n * gauge(&u, &spec.p));
            if f == 0.0 {
                continue;
            }
            let v = row_factor[r] * spec.eval(&u) * f * sw[b];
            if v != 0.0 {
                col[r] = v;
                any = true;
            }
        }
        if any {
            kept_cols.push(b);
            values.extend_from_slice(&col);
        }
    }
    let nr = rows.len();
    let data = RMat::from_fn(nr, kept_cols.len(), |r, c| values[c * nr + r]);
    Block::new(n, l.to_vec(), rows.to_vec(), kept_cols, data)
}

fn zero_level_sup(model: &GridModel, spec: &KernelSpec, n: i32) -> f64 {
    let m = model.m();
    let mut dmax: f64 = 0.0;
    for j in 0..m {
        let (mn, mx) = (0..model.dim()).fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), k| {
            let x = model.coord(k, j);
            (a.min(x), b.max(x))
        });
        dmax = dmax.max((mx - mn).powf(spec.p[j]));
    }
    let gmax = 2f64.powi(n) * dmax;
    (0..=2000).map(|i| phi_of_gauge(gmax * i as f64 / 2000.0).abs()).fold(0.0, f64::max)
}

/// Samples `u` with `δ(u)` inside the shell where levels `lo..=hi` telescope to 1.
fn partition_residual(spec: &KernelSpec, lo: i32, hi: i32) -> Option<f64> {
    let gmin = 2f64.powi(-hi);
    let gmax = 2f64.powi(-lo - 1);
    if !(gmin < gmax) {
        return None;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let m = spec.m();
    let mut worst: f64 = 0.0;
    for _ in 0..2000 {
        let v: Vec<f64> = (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let dv = gauge(&v, &spec.p);
        if dv == 0.0 {
            continue;
        }
        let target = (gmin.ln() + rng.gen::<f64>() * (gmax.ln() - gmin.ln())).exp();
        let u: Vec<f64> = v.iter().zip(&spec.p).map(|(x, p)| x * (target / dv).powf(1.0 / p)).collect();
        let g = gauge(&u, &spec.p);
        let s: f64 = (lo..=hi).map(|n| phi_of_gauge(2f64.powi(n) * g)).sum();
        worst = worst.max((s - 1.0).abs());
    }
    Some(worst)
}

/// `dyadic_decompose` for the residue class of 0.
pub fn dyadic_decompose(model: &GridModel, spec: &KernelSpec, n_range: (i32, i32)) -> Result<BlockSet> {
    dyadic_decompose_class(model, spec, n_range, &vec![0; model.m()])
}

/// Localized blocks `S_{n,l}` for `l` in one residue class modulo [`CLASS_MODULUS`].
/// Levels below `n_0 − 2` are skipped (and verified to vanish); levels too fine for the grid
/// are dropped with a warning.
pub fn dyadic_decompose_class(model: &GridModel, spec: &KernelSpec, n_range: (i32, i32), residue: &[i64]) -> Result<BlockSet> {
    spec.validate()?;
    if model.m() != spec.m() {
        return Err(input("model arity differs from kernel arity"));
    }
    check_residue(model, residue)?;
    if n_range.0 > n_range.1 {
        return Err(input(format!("empty level range {n_range:?}")));
    }
    let mut warnings = Vec::new();
    let floor = spec.n0() - 2;
    let zero_levels: Vec<(i32, f64)> = (n_range.0.min(floor - 1)..floor).map(|n| (n, zero_level_sup(model, spec, n))).collect();
    let lo = n_range.0.max(floor);
    let mut hi = n_range.1;
    while hi >= lo && !level_resolved(model, spec, hi) {
        hi -= 1;
    }
    if hi < n_range.1 {
        warnings.push(format!("levels {}..={} are not resolved by the grid; range truncated to {lo}..={hi}", hi + 1, n_range.1));
    }
    let mut blocks = Vec::new();
    for n in lo..=hi {
        for (l, rows) in bucket_rows(model, spec, n, residue) {
            let b = build_block(model, spec, n, &l, &rows)?;
            if !b.cols.is_empty() {
                blocks.push(b);
            }
        }
    }
    Ok(BlockSet {
        spec: spec.clone(),
        blocks,
        cutoff_params: CutoffParams::for_class(residue.to_vec()),
        levels: (lo, hi),
        requested: n_range,
        warnings,
        partition_residual: partition_residual(spec, lo, hi),
        zero_levels,
    })
}

/// Level range that reaches every pair of grid points: from `n_0 − 2` up to the
/// level whose annulus contains the closest pairs.
pub fn covering_range(model: &GridModel, spec: &KernelSpec) -> (i32, i32) {
    let dmin = (0..model.m()).map(|j| model.spacing(j).powf(spec.p[j])).fold(f64::INFINITY, f64::min);
    (spec.n0() - 2, (2.0 / dmin).log2().ceil() as i32)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReassemblyReport {
    pub n_range: (i32, i32),
    pub op_norm: f64,
    pub residual: f64,
    pub relative: f64,
}

/// `‖T − Σ_{n,l} S_{n,l}‖ / ‖T‖` with the sum over all lattice indices and the given levels,
/// assembled entrywise.
pub fn reassembly_residual(model: &GridModel, spec: &KernelSpec, n_range: (i32, i32)) -> Result<ReassemblyReport> {
    spec.validate()?;
    let d = model.dim();
    if d > MAX_DENSE_DIM {
        return Err(Error::Config(format!("model dimension {d} exceeds the dense limit {MAX_DENSE_DIM}")));
    }
    let t = super::build_operator_real(model, spec)?;
    let m = model.m();
    let levels: Vec<(i32, f64, Vec<f64>)> = (n_range.0..=n_range.1)
        .map(|n| (n, 2f64.powi(n), spec.p.iter().map(|p| 2f64.powf(n as f64 / p)).collect()))
        .collect();
    // Σ_l θ(σ(2^n)x − 10^{-2} l) per row and level, summed over every l explicitly
    let theta_sum: Vec<Vec<f64>> = levels
        .iter()
        .map(|(_, _, sc)| {
            (0..d)
                .map(|a| {
                    (0..m)
                        .map(|j| {
                            let s = sc[j] * model.coord(a, j);
                            let k0 = ((s - BUMP_RADIUS) / THETA_PITCH).ceil() as i64;
                            let k1 = ((s + BUMP_RADIUS) / THETA_PITCH).floor() as i64;
                            (k0..=k1).map(|k| theta_axis(s - THETA_PITCH * k as f64)).sum::<f64>()
                        })
                        .product()
                })
                .collect()
        })
        .collect();
    let mut e = RMat::zeros(d, d);
    let mut u = vec![0.0; m];
    for b in 0..d {
        for a in 0..d {
            if a == b {
                continue;
            }
            for j in 0..m {
                u[j] = model.coord(a, j) - model.coord(b, j);
            }
            let g = gauge(&u, &spec.p);
            let f: f64 = levels.iter().zip(&theta_sum).map(|((_, tn, _), ts)| phi_of_gauge(tn * g) * ts[a]).sum();
            e[(a, b)] = t[(a, b)] * (1.0 - f);
        }
    }
    let norm = |x: &RMat| {
        linalg::power_norm(
            d,
            |v| {
                let c = faer::ColRef::from_slice(v);
                let y = x * c;
                y.iter().copied().collect()
            },
            |v| {
                let c = faer::ColRef::from_slice(v);
                let y = x.transpose() * c;
                y.iter().copied().collect()
            },
            200,
        )
    };
    let op = norm(&t);
    let res = norm(&e);
    Ok(ReassemblyReport { n_range, op_norm: op, residual: res, relative: if op > 0.0 { res / op } else { 0.0 } })
}

/// Per-level summary inside a [`HypothesisReport`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LevelSummary {
    pub n: i32,
    pub count: usize,
    pub max_trace_norm: f64,
    pub max_op_norm: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HypothesisReport {
    pub levels: Vec<LevelSummary>,
    pub pairs_checked: usize,
    pub ortho_max: f64,
    pub scale: f64,
    pub ortho_pass: bool,
    /// `max_n |I(n)| / 2^n` over levels `n ≥ 0`.
    pub c1: f64,
    pub c1_geometric: f64,
    /// `max_n max_l |S_{n,l}|_1 · 2^{n/q_1}`.
    pub c2: f64,
    pub q1: f64,
    /// Smallest constants for `γ_{n+1} ≤ Cγ_n`, `Σ_{k>n} β_k ≤ Cβ_n`,
    /// `Σ_{k≤n} β_kγ_k ≤ Cβ_nγ_n`, `β_n ≤ Cπ_{γ_n}`.
    pub c_gamma_growth: f64,
    pub c_beta_tail: f64,
    pub c_beta_gamma_head: f64,
    pub c_beta_pi: f64,
    pub c_min: f64,
    pub c_given: f64,
    pub pass: bool,
}

/// Horizon for the sequence conditions.
const SEQ_LEVELS: i32 = 64;

/// Checks the block hypotheses on one residue class: pairwise orthogonality at each
/// level, the count bound `|I(n)| ≤ C_1 2^n`, the trace-norm bound `|S_{n,l}|_1 ≤ C_2 2^{−n/q_1}`
/// and the conditions on `β_n = C_2 2^{−n/q_1}`, `γ_n = C_1 2^n`, `π_j = j^{−1/q_1}`.
pub fn block_hypothesis_verify(blocks: &BlockSet, p1: f64, c: f64) -> Result<HypothesisReport> {
    if !(p1 > 1.0) {
        return Err(input(format!("p1 must exceed 1, got {p1}")));
    }
    let q1 = conjugate_exponents(&[p1])[0];
    let mut levels = Vec::new();
    let mut scale: f64 = 0.0;
    let mut c1: f64 = 0.0;
    let mut c2: f64 = 0.0;
    let mut norms: Vec<(f64, f64)> = Vec::with_capacity(blocks.blocks.len());
    for b in &blocks.blocks {
        let s = b.singular_values()?;
        norms.push((s.iter().sum(), s.first().copied().unwrap_or(0.0)));
    }
    for n in blocks.levels.0..=blocks.levels.1 {
        let idx: Vec<usize> = (0..blocks.blocks.len()).filter(|&i| blocks.blocks[i].n == n).collect();
        let tr = idx.iter().map(|&i| norms[i].0).fold(0.0, f64::max);
        let op = idx.iter().map(|&i| norms[i].1).fold(0.0, f64::max);
        scale = scale.max(op * op);
        if n >= 0 {
            c1 = c1.max(idx.len() as f64 / 2f64.powi(n));
            c2 = c2.max(tr * 2f64.powf(n as f64 / q1));
        }
        levels.push(LevelSummary { n, count: idx.len(), max_trace_norm: tr, max_op_norm: op });
    }
    let mut ortho_max: f64 = 0.0;
    let mut pairs = 0;
    for (i, a) in blocks.blocks.iter().enumerate() {
        for b in blocks.blocks.iter().skip(i + 1).filter(|b| b.n == a.n) {
            for pr in [block_products(a, b), block_products(b, a)] {
                ortho_max = ortho_max.max(pr.iter().cloned().fold(0.0, f64::max));
            }
            pairs += 1;
        }
    }
    let ortho_pass = ortho_max <= ORTHO_TOL * scale.max(f64::MIN_POSITIVE);
    let c1_geometric = geometric_count_bound(blocks.spec.m());
    let seq = sequence_constants(c1.max(f64::MIN_POSITIVE), c2.max(f64::MIN_POSITIVE), q1);
    let c_min = seq.iter().cloned().fold(1.0, f64::max);
    let pass = ortho_pass && c1 <= c1_geometric && c >= c_min;
    Ok(HypothesisReport {
        levels,
        pairs_checked: pairs,
        ortho_max,
        scale,
        ortho_pass,
        c1,
        c1_geometric,
        c2,
        q1,
        c_gamma_growth: seq[0],
        c_beta_tail: seq[1],
        c_beta_gamma_head: seq[2],
        c_beta_pi: seq[3],
        c_min,
        c_given: c,
        pass,
    })
}

/// Needed constants for the four sequence conditions, by direct summation over `0..=SEQ_LEVELS`.
pub fn sequence_constants(c1: f64, c2: f64, q1: f64) -> [f64; 4] {
    let beta = |k: i32| c2 * 2f64.powf(-k as f64 / q1);
    let gamma = |k: i32| c1 * 2f64.powi(k);
    let pi = |j: f64| j.powf(-1.0 / q1);
    let mut out = [0.0f64; 4];
    for n in 0..=SEQ_LEVELS {
        out[0] = out[0].max(gamma(n + 1) / gamma(n));
        let mut tail = 0.0;
        let mut k = n + 1;
        loop {
            let t = beta(k);
            tail += t;
            if t < 1e-17 * tail || k > n + 100_000 {
                break;
            }
            k += 1;
        }
        out[1] = out[1].max(tail / beta(n));
        let head: f64 = (0..=n).map(|k| beta(k) * gamma(k)).sum();
        out[2] = out[2].max(head / (beta(n) * gamma(n)));
        out[3] = out[3].max(beta(n) / pi(gamma(n).ceil().max(1.0)));
    }
    out
}
