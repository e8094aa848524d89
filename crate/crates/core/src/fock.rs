//! Brute-force verification in a truncated Fock basis.
//!
//! Operators live on one or two modes, each truncated to `cutoff` photon
//! numbers. Two-mode basis index is `n0 * cutoff + n1`.
//!
//! A density operator is stored as `ρ = X X†`, split into blocks: the support
//! is partitioned into groups of basis states that the operator couples, and
//! each group keeps its own factor columns. Phase-covariant states such as a
//! lossy two-mode squeezed vacuum split into many blocks of size at most `d`,
//! which keeps spectral work cheap at cutoffs where a dense `d² × d²` matrix
//! would not be.
//!
//! Working with factors rather than with `ρ` itself matters for accuracy.
//! Eigenvalues come out as squared singular values of `X`, so they are
//! resolved far below machine epsilon, and structural zeros never appear.
//! Powers `λ^s` at small `s` would otherwise blow rounding noise of order
//! 1e-17 up to order 1e-4.

use std::collections::HashMap;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex;

use crate::channel::MemoryCell;
use crate::error::{domain_err, Error, Result};
use crate::scalar::{from_usize, lit, to_f64, Real};

/// Hermiticity tolerance for operators built from explicit matrix entries.
pub const HERMITIAN_TOL: f64 = 1e-10;

/// Eigenvalues of explicit input operators above `-EIGEN_CLIP` are clipped to
/// zero; below it the operator is rejected as not positive.
pub const EIGEN_CLIP: f64 = 1e-10;

/// Singular values below this fraction of a block's largest one are dropped.
pub const SINGULAR_FLOOR: f64 = 1e-15;

/// Default bound on the probability mass lost to truncation.
pub const TAIL_TOL: f64 = 1e-9;

/// Tail target for states whose fractional powers enter `Tr(ρ^s σ^{1−s})`.
/// Truncation error in such overlaps decays only like a fractional power of
/// the discarded mass, so these cutoffs are taken half again as large as
/// with a 1e-10 target.
pub const OVERLAP_TAIL: f64 = 1e-15;

/// Smallest cutoff the tail rule ever returns.
pub const MIN_CUTOFF: usize = 12;

type C<T> = Complex<T>;

fn zero<T: Real>() -> C<T> {
    C::new(T::zero(), T::zero())
}

fn is_zero<T: Real>(z: &C<T>) -> bool {
    z.re == T::zero() && z.im == T::zero()
}

/// Cutoff `d` such that a thermal distribution with any of the given means
/// has tail mass `(n̄/(1+n̄))^d` below `tail`.
pub fn cutoff_for_tail<T: Real>(n_means: &[T], tail: T) -> usize {
    let mut d = MIN_CUTOFF;
    for &n in n_means {
        if n <= T::zero() {
            continue;
        }
        let ratio = n / (T::one() + n);
        let need = (tail.ln() / ratio.ln()).ceil();
        d = d.max(need.to_usize().unwrap_or(usize::MAX));
    }
    d
}

fn check_cutoff(cutoff: usize) -> Result<()> {
    if cutoff < 2 {
        return Err(Error::InvalidDimension(format!("cutoff {cutoff} < 2")));
    }
    Ok(())
}

fn check_modes(n_modes: usize) -> Result<()> {
    if n_modes == 1 || n_modes == 2 {
        Ok(())
    } else {
        Err(Error::InvalidDimension(format!(
            "Fock oracle supports one or two modes, got {n_modes}"
        )))
    }
}

fn dim_of(n_modes: usize, cutoff: usize) -> usize {
    cutoff.pow(n_modes as u32)
}

fn decode(idx: usize, n_modes: usize, cutoff: usize) -> [usize; 2] {
    if n_modes == 1 {
        [idx, 0]
    } else {
        [idx / cutoff, idx % cutoff]
    }
}

fn encode(occ: [usize; 2], n_modes: usize, cutoff: usize) -> usize {
    if n_modes == 1 {
        occ[0]
    } else {
        occ[0] * cutoff + occ[1]
    }
}

/// A state vector in the truncated basis.
#[derive(Debug, Clone, PartialEq)]
pub struct FockVector<T: Real> {
    n_modes: usize,
    cutoff: usize,
    amps: Vec<C<T>>,
}

impl<T: Real> FockVector<T> {
    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn amplitudes(&self) -> &[C<T>] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> T {
        self.amps
            .iter()
            .fold(T::zero(), |acc, a| acc + a.norm_sqr())
    }
}

/// Truncated two-mode squeezed vacuum `(cosh ξ)⁻¹ Σ (tanh ξ)^n |n⟩|n⟩` with
/// `sinh² ξ = n_s`. The vector is not renormalized; its missing norm
/// `(tanh² ξ)^d` must not exceed `tail_tol`.
pub fn tmsv_fock<T: Real>(n_s: T, cutoff: usize, tail_tol: T) -> Result<FockVector<T>> {
    check_cutoff(cutoff)?;
    if !(n_s >= T::zero()) {
        return Err(domain_err("N_S", to_f64(n_s), "[0, ∞)"));
    }
    let lambda = n_s / (T::one() + n_s); // tanh² ξ
    let tail = lambda.powi(cutoff as i32);
    if tail > tail_tol {
        return Err(Error::TailMass {
            cutoff,
            mass: to_f64(tail),
            tol: to_f64(tail_tol),
        });
    }
    let norm = (T::one() - lambda).sqrt(); // 1/cosh ξ
    let ratio = lambda.sqrt(); // tanh ξ
    let mut amps = vec![C::new(T::zero(), T::zero()); cutoff * cutoff];
    let mut c = norm;
    for n in 0..cutoff {
        amps[n * cutoff + n] = C::new(c, T::zero());
        c *= ratio;
    }
    Ok(FockVector {
        n_modes: 2,
        cutoff,
        amps,
    })
}

/// Truncated coherent state `e^{−|α|²/2} Σ α^n/√n! |n⟩`.
pub fn coherent_fock<T: Real>(alpha: C<T>, cutoff: usize, tail_tol: T) -> Result<FockVector<T>> {
    check_cutoff(cutoff)?;
    let mut amps = Vec::with_capacity(cutoff);
    let mut c = C::new((-alpha.norm_sqr() * lit(0.5)).exp(), T::zero());
    for n in 0..cutoff {
        amps.push(c);
        c = c * alpha / from_usize::<T>(n + 1).sqrt();
    }
    let v = FockVector {
        n_modes: 1,
        cutoff,
        amps,
    };
    let tail = (T::one() - v.norm_sqr()).max(T::zero());
    if tail > tail_tol {
        return Err(Error::TailMass {
            cutoff,
            mass: to_f64(tail),
            tol: to_f64(tail_tol),
        });
    }
    Ok(v)
}

/// A sparse column `(basis index, amplitude)`.
type Column<T> = Vec<(usize, C<T>)>;

#[derive(Debug, Clone, PartialEq)]
struct Block<T: Real> {
    support: Vec<usize>,
    factor: DMatrix<C<T>>,
}

impl<T: Real> Block<T> {
    fn matrix(&self) -> DMatrix<C<T>> {
        &self.factor * self.factor.adjoint()
    }
}

/// A positive operator `X X†` on a truncated one- or two-mode Fock space,
/// stored block by block.
#[derive(Debug, Clone, PartialEq)]
pub struct FockOperator<T: Real> {
    n_modes: usize,
    cutoff: usize,
    blocks: Vec<Block<T>>,
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Partition of the indices touched by a family of sets into connected
/// groups. `group_of[x]` gives `(group, position within group)`.
struct Partition {
    groups: Vec<Vec<usize>>,
    group_of: Vec<(usize, usize)>,
}

impl Partition {
    fn new<'a>(dim: usize, sets: impl Iterator<Item = &'a [usize]>) -> Self {
        let mut uf = UnionFind::new(dim);
        let mut touched = vec![false; dim];
        for set in sets {
            for &x in set {
                touched[x] = true;
                uf.union(set[0], x);
            }
        }
        let mut by_root: HashMap<usize, Vec<usize>> = HashMap::new();
        for x in (0..dim).filter(|&x| touched[x]) {
            by_root.entry(uf.find(x)).or_default().push(x);
        }
        let mut groups: Vec<Vec<usize>> = by_root.into_values().collect();
        groups.sort_by_key(|g| g[0]);
        let mut group_of = vec![(usize::MAX, 0); dim];
        for (g, members) in groups.iter().enumerate() {
            for (i, &x) in members.iter().enumerate() {
                group_of[x] = (g, i);
            }
        }
        Self { groups, group_of }
    }
}

/// Replaces a factor with more columns than rows by the equivalent thin
/// factor `U Σ` from its SVD, so `X X†` is unchanged but the width is capped
/// at the block size.
fn compress<T: Real>(x: DMatrix<C<T>>) -> DMatrix<C<T>> {
    if x.ncols() <= x.nrows() {
        return x;
    }
    let svd = x.svd(true, false);
    let u = svd.u.expect("left singular vectors requested");
    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&k| svd.singular_values[k] > T::zero())
        .collect();
    let mut thin = u.select_columns(&keep);
    for (c, &k) in keep.iter().enumerate() {
        thin.column_mut(c).scale_mut(svd.singular_values[k]);
    }
    thin
}

impl<T: Real> FockOperator<T> {
    /// `Σ_c |x_c⟩⟨x_c|` from sparse columns.
    fn from_columns(n_modes: usize, cutoff: usize, columns: Vec<Column<T>>) -> Self {
        let columns: Vec<Column<T>> = columns
            .into_iter()
            .map(|c| {
                c.into_iter()
                    .filter(|(_, v)| !is_zero(v))
                    .collect::<Column<T>>()
            })
            .filter(|c| !c.is_empty())
            .collect();
        let supports: Vec<Vec<usize>> = columns
            .iter()
            .map(|c| c.iter().map(|(i, _)| *i).collect())
            .collect();
        let part = Partition::new(
            dim_of(n_modes, cutoff),
            supports.iter().map(|s| s.as_slice()),
        );
        let mut per_group: Vec<Vec<&Column<T>>> = vec![Vec::new(); part.groups.len()];
        for c in &columns {
            per_group[part.group_of[c[0].0].0].push(c);
        }
        let blocks = part
            .groups
            .into_iter()
            .zip(per_group)
            .map(|(support, cols)| {
                let mut factor = DMatrix::zeros(support.len(), cols.len());
                for (k, col) in cols.iter().enumerate() {
                    for &(x, v) in col.iter() {
                        factor[(part.group_of[x].1, k)] += v;
                    }
                }
                Block {
                    support,
                    factor: compress(factor),
                }
            })
            .collect();
        Self {
            n_modes,
            cutoff,
            blocks,
        }
    }

    /// Builds a positive operator from explicit matrix entries. The entries
    /// must form a Hermitian, positive semidefinite matrix.
    pub fn from_entries(
        n_modes: usize,
        cutoff: usize,
        entries: impl IntoIterator<Item = ((usize, usize), C<T>)>,
    ) -> Result<Self> {
        check_modes(n_modes)?;
        check_cutoff(cutoff)?;
        let dim = dim_of(n_modes, cutoff);
        let entries: Vec<((usize, usize), C<T>)> =
            entries.into_iter().filter(|(_, v)| !is_zero(v)).collect();
        if let Some(((x, y), _)) = entries.iter().find(|((x, y), _)| *x >= dim || *y >= dim) {
            return Err(Error::InvalidDimension(format!(
                "entry ({x}, {y}) outside dimension {dim}"
            )));
        }
        let pairs: Vec<[usize; 2]> = entries.iter().map(|((x, y), _)| [*x, *y]).collect();
        let part = Partition::new(dim, pairs.iter().map(|p| p.as_slice()));
        let mut mats: Vec<DMatrix<C<T>>> = part
            .groups
            .iter()
            .map(|g| DMatrix::zeros(g.len(), g.len()))
            .collect();
        for ((x, y), v) in entries {
            let (g, i) = part.group_of[x];
            let (_, j) = part.group_of[y];
            mats[g][(i, j)] += v;
        }
        let clip = lit::<T>(EIGEN_CLIP);
        let mut columns = Vec::new();
        for (support, m) in part.groups.iter().zip(mats) {
            let dev = (&m - m.adjoint())
                .iter()
                .fold(T::zero(), |a, z| a.max(z.norm_sqr().sqrt()));
            if dev > lit(HERMITIAN_TOL) {
                return Err(Error::NotHermitian(to_f64(dev)));
            }
            let eig = SymmetricEigen::new((&m + m.adjoint()) * C::new(lit(0.5), T::zero()));
            for (k, &l) in eig.eigenvalues.iter().enumerate() {
                if l < -clip {
                    return Err(Error::NotPositive(to_f64(l)));
                }
                if l <= T::zero() {
                    continue;
                }
                let w = l.sqrt();
                columns.push(
                    support
                        .iter()
                        .enumerate()
                        .map(|(i, &x)| (x, eig.eigenvectors[(i, k)] * w))
                        .collect(),
                );
            }
        }
        Ok(Self::from_columns(n_modes, cutoff, columns))
    }

    /// Dense input; still split into blocks by its sparsity pattern.
    pub fn from_dense(n_modes: usize, cutoff: usize, matrix: &DMatrix<C<T>>) -> Result<Self> {
        check_modes(n_modes)?;
        let dim = dim_of(n_modes, cutoff);
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::InvalidDimension(format!(
                "expected {dim}×{dim}, got {}×{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let entries: Vec<_> = (0..dim)
            .flat_map(|i| (0..dim).map(move |j| ((i, j), matrix[(i, j)])))
            .collect();
        Self::from_entries(n_modes, cutoff, entries)
    }

    /// The projector `|ψ⟩⟨ψ|` (unnormalized if `ψ` is truncated).
    pub fn from_pure(psi: &FockVector<T>) -> Self {
        Self::from_mixture(std::slice::from_ref(psi), &[T::one()])
            .expect("a single vector is always consistent")
    }

    /// `Σ w_i |ψ_i⟩⟨ψ_i|` with nonnegative weights.
    pub fn from_mixture(states: &[FockVector<T>], weights: &[T]) -> Result<Self> {
        let first = states
            .first()
            .ok_or_else(|| Error::InvalidDimension("empty mixture".into()))?;
        if states.len() != weights.len() {
            return Err(Error::Mismatch(format!(
                "{} states but {} weights",
                states.len(),
                weights.len()
            )));
        }
        let mut columns = Vec::with_capacity(states.len());
        for (psi, &w) in states.iter().zip(weights) {
            if psi.n_modes != first.n_modes || psi.cutoff != first.cutoff {
                return Err(Error::Mismatch(
                    "mixture components live on different spaces".into(),
                ));
            }
            if !(w >= T::zero()) {
                return Err(domain_err("weight", to_f64(w), "[0, ∞)"));
            }
            let w = w.sqrt();
            columns.push(
                psi.amps
                    .iter()
                    .enumerate()
                    .map(|(i, &a)| (i, a * w))
                    .collect(),
            );
        }
        Ok(Self::from_columns(first.n_modes, first.cutoff, columns))
    }

    /// Single-mode thermal state `Σ n̄^n/(1+n̄)^{n+1} |n⟩⟨n|`, truncated.
    pub fn thermal(n_mean: T, cutoff: usize) -> Result<Self> {
        check_cutoff(cutoff)?;
        if !(n_mean >= T::zero()) {
            return Err(domain_err("n_mean", to_f64(n_mean), "[0, ∞)"));
        }
        let columns = thermal_probs(n_mean, cutoff)
            .into_iter()
            .enumerate()
            .map(|(n, p)| vec![(n, C::new(p.sqrt(), T::zero()))])
            .collect();
        Ok(Self::from_columns(1, cutoff, columns))
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn dim(&self) -> usize {
        dim_of(self.n_modes, self.cutoff)
    }

    /// Number of blocks and the size of the largest one.
    pub fn block_shape(&self) -> (usize, usize) {
        (
            self.blocks.len(),
            self.blocks
                .iter()
                .map(|b| b.support.len())
                .max()
                .unwrap_or(0),
        )
    }

    /// All nonzero-block entries `(row, col, value)` of `ρ`.
    pub fn entries(&self) -> Vec<(usize, usize, C<T>)> {
        let mut out = Vec::new();
        for b in &self.blocks {
            let m = b.matrix();
            for (i, &x) in b.support.iter().enumerate() {
                for (j, &y) in b.support.iter().enumerate() {
                    out.push((x, y, m[(i, j)]));
                }
            }
        }
        out
    }

    pub fn to_dense(&self) -> DMatrix<C<T>> {
        let dim = self.dim();
        let mut m = DMatrix::zeros(dim, dim);
        for (x, y, v) in self.entries() {
            m[(x, y)] = v;
        }
        m
    }

    pub fn trace(&self) -> T {
        self.blocks.iter().fold(T::zero(), |acc, b| {
            acc + b.factor.iter().fold(T::zero(), |s, z| s + z.norm_sqr())
        })
    }

    /// `⟨ψ|ρ|ψ⟩`.
    pub fn expectation_in(&self, psi: &FockVector<T>) -> Result<T> {
        if psi.n_modes != self.n_modes || psi.cutoff != self.cutoff {
            return Err(Error::Mismatch("vector and operator spaces differ".into()));
        }
        let mut acc = T::zero();
        for b in &self.blocks {
            for col in b.factor.column_iter() {
                let mut amp = zero::<T>();
                for (i, &x) in b.support.iter().enumerate() {
                    amp += psi.amps[x].conj() * col[i];
                }
                acc += amp.norm_sqr();
            }
        }
        Ok(acc)
    }

    /// Reduced state of one mode of a two-mode operator.
    pub fn reduced(&self, keep: usize) -> Result<Self> {
        if self.n_modes != 2 || keep > 1 {
            return Err(Error::ModeOutOfRange {
                index: keep,
                n_modes: self.n_modes,
            });
        }
        let d = self.cutoff;
        let other = 1 - keep;
        // Each factor column splits into one column per occupation of the
        // traced-out mode.
        let mut columns = Vec::new();
        for b in &self.blocks {
            for col in b.factor.column_iter() {
                let mut split: HashMap<usize, Column<T>> = HashMap::new();
                for (i, &x) in b.support.iter().enumerate() {
                    let occ = decode(x, 2, d);
                    split
                        .entry(occ[other])
                        .or_default()
                        .push((occ[keep], col[i]));
                }
                columns.extend(split.into_values());
            }
        }
        Ok(Self::from_columns(1, d, columns))
    }

    /// `Tr(ρ O)` for a product of ladder operators `O = o_1 o_2 … o_k`, each
    /// given as `(mode, is_creation)`.
    pub fn ladder_expectation(&self, ops: &[(usize, bool)]) -> C<T> {
        let d = self.cutoff;
        let mut acc = zero::<T>();
        for (x, y, v) in self.entries() {
            // Tr(ρ O) = Σ ρ_xy ⟨y|O|x⟩
            let mut occ = decode(x, self.n_modes, d);
            let mut coef = T::one();
            let mut alive = true;
            for &(mode, create) in ops.iter().rev() {
                if create {
                    occ[mode] += 1;
                    if occ[mode] >= d {
                        alive = false;
                        break;
                    }
                    coef *= from_usize::<T>(occ[mode]).sqrt();
                } else {
                    if occ[mode] == 0 {
                        alive = false;
                        break;
                    }
                    coef *= from_usize::<T>(occ[mode]).sqrt();
                    occ[mode] -= 1;
                }
            }
            if alive && encode(occ, self.n_modes, d) == y {
                acc += v * coef;
            }
        }
        acc
    }

    /// Quadrature mean and covariance (vacuum = identity, `q = a + a†`).
    pub fn gaussian_moments(&self) -> (Vec<T>, DMatrix<T>) {
        let n = self.n_modes;
        let two = lit::<T>(2.0);
        let trace = self.trace();
        let mut mean = vec![T::zero(); 2 * n];
        let mut second = DMatrix::zeros(2 * n, 2 * n);
        for k in 0..n {
            let a = self.ladder_expectation(&[(k, false)]);
            mean[2 * k] = two * a.re;
            mean[2 * k + 1] = two * a.im;
            let nk = self.ladder_expectation(&[(k, true), (k, false)]).re;
            let aa = self.ladder_expectation(&[(k, false), (k, false)]);
            second[(2 * k, 2 * k)] = two * aa.re + two * nk + trace;
            second[(2 * k + 1, 2 * k + 1)] = -two * aa.re + two * nk + trace;
            second[(2 * k, 2 * k + 1)] = two * aa.im;
            second[(2 * k + 1, 2 * k)] = two * aa.im;
        }
        if n == 2 {
            let x = self.ladder_expectation(&[(0, false), (1, false)]);
            let y = self.ladder_expectation(&[(0, false), (1, true)]);
            let qq = two * (x.re + y.re);
            let pp = two * (y.re - x.re);
            let qp = two * (x.im - y.im);
            let pq = two * (x.im + y.im);
            for (i, j, v) in [(0, 2, qq), (1, 3, pp), (0, 3, qp), (1, 2, pq)] {
                second[(i, j)] = v;
                second[(j, i)] = v;
            }
        }
        let mut cov = second;
        for i in 0..2 * n {
            for j in 0..2 * n {
                cov[(i, j)] -= mean[i] * mean[j];
            }
        }
        (mean, cov)
    }
}

fn thermal_probs<T: Real>(n_mean: T, cutoff: usize) -> Vec<T> {
    let ratio = n_mean / (T::one() + n_mean);
    let mut p = T::one() / (T::one() + n_mean);
    (0..cutoff)
        .map(|_| {
            let cur = p;
            p *= ratio;
            cur
        })
        .collect()
}

/// Beam-splitter amplitudes `⟨k, N−k| U |n, N−n⟩` for every total photon
/// number `N ≤ max_total`, indexed `[N][k][n]`.
///
/// `U = exp(θ(a†b − ab†))` with `cos θ = √r`, so that `a → √r a + √(1−r) b`
/// in the Heisenberg picture. On the `N`-photon subspace the generator is a
/// real antisymmetric tridiagonal matrix `G` with subdiagonal
/// `g_k = √((k+1)(N−k))`. With `D = diag(i^k)` we have `iG = D J D†` for the
/// real symmetric tridiagonal `J` with off-diagonals `g_k`, hence
/// `U_kl = Re[i^{k−l} Σ_m W_km W_lm e^{−iθλ_m}]` from the eigenpairs of `J`.
/// Unlike ladder-operator recurrences, whose rounding error grows
/// exponentially in `N`, this stays accurate to a few ulps times `N`.
fn beam_splitter_table<T: Real>(r: T, max_total: usize) -> Vec<DMatrix<T>> {
    let t = r.sqrt();
    let rho = (T::one() - r).max(T::zero()).sqrt();
    let theta = rho.atan2(t);
    // Exact permutations at the endpoints: rounding crumbs in place of exact
    // zeros would become spurious eigenvalues that small powers amplify.
    if r == T::one() || r == T::zero() {
        return (0..=max_total)
            .map(|total| {
                DMatrix::from_fn(total + 1, total + 1, |k, n| {
                    if r == T::one() {
                        if k == n {
                            T::one()
                        } else {
                            T::zero()
                        }
                    } else if k == total - n {
                        // U|n, m⟩ = (−1)^n |m, n⟩
                        if n % 2 == 0 {
                            T::one()
                        } else {
                            -T::one()
                        }
                    } else {
                        T::zero()
                    }
                })
            })
            .collect();
    }
    (0..=max_total)
        .map(|total| {
            let size = total + 1;
            let mut j = DMatrix::<T>::zeros(size, size);
            for k in 0..total {
                let g = from_usize::<T>((k + 1) * (total - k)).sqrt();
                j[(k, k + 1)] = g;
                j[(k + 1, k)] = g;
            }
            let eig = SymmetricEigen::new(j);
            let w = eig.eigenvectors;
            let phase: Vec<(T, T)> = eig
                .eigenvalues
                .iter()
                .map(|&l| ((theta * l).cos(), -(theta * l).sin()))
                .collect();
            DMatrix::from_fn(size, size, |k, l| {
                let (mut re, mut im) = (T::zero(), T::zero());
                for (m, &(c, s)) in phase.iter().enumerate() {
                    let ww = w[(k, m)] * w[(l, m)];
                    re += ww * c;
                    im += ww * s;
                }
                // multiply by i^{k−l} and keep the real part
                match (k + 4 * size - l) % 4 {
                    0 => re,
                    1 => -im,
                    2 => -re,
                    _ => im,
                }
            })
        })
        .collect()
}

/// Lossy thermal channel on one mode, realized by mixing that mode with a
/// thermal ancilla of `n_b` photons on a beam splitter of transmissivity `r`
/// and tracing the ancilla out.
///
/// Each factor column `x` of the input yields the Kraus outputs
/// `√p_j ⟨a|_anc U |x⟩|j⟩_anc`, one column per ancilla input `j` and output
/// `a`. The output lives on a space with the given `cutoff` (at least the
/// input's). The ancilla runs up to the larger of that cutoff and the point
/// where its tail drops below `tail_tol / 10`, and is renormalized. Cutting it
/// shorter leaves out small eigenvalues of the output that still matter to
/// `Tr(ρ^s σ^{1−s})` when `s` or `1 − s` is small. Probability mass pushed above the output
/// cutoff must stay below `tail_tol`.
pub fn lossy_channel_fock<T: Real>(
    rho: &FockOperator<T>,
    mode: usize,
    r: T,
    n_b: T,
    cutoff: usize,
    tail_tol: T,
) -> Result<FockOperator<T>> {
    if !(r >= T::zero() && r <= T::one()) {
        return Err(domain_err("r", to_f64(r), "[0, 1]"));
    }
    if !(n_b >= T::zero()) {
        return Err(domain_err("N_B", to_f64(n_b), "[0, ∞)"));
    }
    if mode >= rho.n_modes {
        return Err(Error::ModeOutOfRange {
            index: mode,
            n_modes: rho.n_modes,
        });
    }
    if cutoff < rho.cutoff {
        return Err(Error::InvalidDimension(format!(
            "output cutoff {cutoff} below input cutoff {}",
            rho.cutoff
        )));
    }
    let n_modes = rho.n_modes;
    let d_in = rho.cutoff;

    let d_anc = if n_b == T::zero() {
        1
    } else {
        cutoff_for_tail(&[n_b], tail_tol * lit(0.1)).max(cutoff)
    };
    let mut p_anc = thermal_probs(n_b, d_anc);
    let kept = p_anc.iter().fold(T::zero(), |a, &p| a + p);
    for p in &mut p_anc {
        *p = (*p / kept).sqrt();
    }
    let table = beam_splitter_table(r, d_in + d_anc);

    let mut columns: Vec<Column<T>> = Vec::new();
    for b in &rho.blocks {
        let occs: Vec<[usize; 2]> = b
            .support
            .iter()
            .map(|&x| decode(x, n_modes, d_in))
            .collect();
        for col in b.factor.column_iter() {
            for (j, &sp) in p_anc.iter().enumerate() {
                let mut by_a: HashMap<usize, Column<T>> = HashMap::new();
                for (i, occ) in occs.iter().enumerate() {
                    let v = col[i];
                    if is_zero(&v) {
                        continue;
                    }
                    let n = occ[mode];
                    let total = n + j;
                    let amps = &table[total];
                    for a in 0..=total {
                        let k = total - a;
                        if k >= cutoff {
                            continue;
                        }
                        let w = sp * amps[(k, n)];
                        if w == T::zero() {
                            continue;
                        }
                        let mut out = *occ;
                        out[mode] = k;
                        by_a.entry(a)
                            .or_default()
                            .push((encode(out, n_modes, cutoff), v * w));
                    }
                }
                columns.extend(by_a.into_values());
            }
        }
    }
    let result = FockOperator::from_columns(n_modes, cutoff, columns);
    let lost = rho.trace() - result.trace();
    if lost > tail_tol {
        return Err(Error::TailMass {
            cutoff,
            mass: to_f64(lost),
            tol: to_f64(tail_tol),
        });
    }
    Ok(result)
}

type FactorPair<T> = (DMatrix<C<T>>, DMatrix<C<T>>);

/// Factor pairs `(X_A, X_B)` over the common coarsening of both block
/// partitions; rows index the members of each group.
fn joint_factors<T: Real>(a: &FockOperator<T>, b: &FockOperator<T>) -> Result<Vec<FactorPair<T>>> {
    if a.n_modes != b.n_modes || a.cutoff != b.cutoff {
        return Err(Error::Mismatch(format!(
            "{}-mode cutoff {} vs {}-mode cutoff {}",
            a.n_modes, a.cutoff, b.n_modes, b.cutoff
        )));
    }
    let part = Partition::new(
        a.dim(),
        a.blocks
            .iter()
            .chain(&b.blocks)
            .map(|blk| blk.support.as_slice()),
    );
    let gather = |op: &FockOperator<T>| -> Vec<DMatrix<C<T>>> {
        let mut cols = vec![0usize; part.groups.len()];
        for blk in &op.blocks {
            cols[part.group_of[blk.support[0]].0] += blk.factor.ncols();
        }
        let mut out: Vec<DMatrix<C<T>>> = part
            .groups
            .iter()
            .zip(&cols)
            .map(|(g, &c)| DMatrix::zeros(g.len(), c))
            .collect();
        let mut next = vec![0usize; part.groups.len()];
        for blk in &op.blocks {
            let g = part.group_of[blk.support[0]].0;
            for col in blk.factor.column_iter() {
                for (i, &x) in blk.support.iter().enumerate() {
                    out[g][(part.group_of[x].1, next[g])] = col[i];
                }
                next[g] += 1;
            }
        }
        out
    };
    Ok(gather(a).into_iter().zip(gather(b)).collect())
}

/// Eigenvalues and eigenvectors of `X X†` from the thin SVD of `X`, keeping
/// only the numerically nonzero part of the spectrum.
fn factor_spectrum<T: Real>(x: &DMatrix<C<T>>) -> (Vec<T>, DMatrix<C<T>>) {
    if x.ncols() == 0 || x.nrows() == 0 {
        return (Vec::new(), DMatrix::zeros(x.nrows(), 0));
    }
    let svd = x.clone().svd(true, false);
    let u = svd.u.expect("left singular vectors requested");
    let top = svd.singular_values.iter().fold(T::zero(), |m, &s| m.max(s));
    let floor = top * lit(SINGULAR_FLOOR);
    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&k| svd.singular_values[k] > floor)
        .collect();
    let values = keep
        .iter()
        .map(|&k| svd.singular_values[k] * svd.singular_values[k])
        .collect();
    let vectors = u.select_columns(&keep);
    (values, vectors)
}

/// Precomputed spectral data of an operator pair, reusable across `s`.
pub struct ChernoffSpectra<T: Real> {
    groups: Vec<(Vec<T>, Vec<T>, DMatrix<T>)>,
}

impl<T: Real> ChernoffSpectra<T> {
    pub fn new(rho0: &FockOperator<T>, rho1: &FockOperator<T>) -> Result<Self> {
        let mut groups = Vec::new();
        for (a, b) in joint_factors(rho0, rho1)? {
            let (la, ua) = factor_spectrum(&a);
            let (lb, ub) = factor_spectrum(&b);
            if la.is_empty() || lb.is_empty() {
                continue;
            }
            let w2 = (ua.adjoint() * ub).map(|z| z.norm_sqr());
            groups.push((la, lb, w2));
        }
        Ok(Self { groups })
    }

    /// `Tr(ρ0^s ρ1^{1−s}) = Σ λ_i^s μ_j^{1−s} |⟨a_i|b_j⟩|²`.
    pub fn overlap(&self, s: T) -> Result<T> {
        if !(s > T::zero() && s < T::one()) {
            return Err(domain_err("s", to_f64(s), "(0, 1)"));
        }
        let t = T::one() - s;
        let mut total = T::zero();
        for (la, lb, w2) in &self.groups {
            let pb: Vec<T> = lb.iter().map(|&x| x.powf(t)).collect();
            for (i, &a) in la.iter().enumerate() {
                let ai = a.powf(s);
                for (j, &bj) in pb.iter().enumerate() {
                    total += ai * bj * w2[(i, j)];
                }
            }
        }
        Ok(total)
    }
}

/// `Tr(ρ0^s ρ1^{1−s})` by spectral decomposition.
pub fn s_overlap_fock<T: Real>(rho0: &FockOperator<T>, rho1: &FockOperator<T>, s: T) -> Result<T> {
    ChernoffSpectra::new(rho0, rho1)?.overlap(s)
}

/// Squared-convention Uhlmann fidelity `(Tr |√ρ0 √ρ1|)²`, computed as the
/// squared nuclear norm of `X0† X1`.
pub fn uhlmann_fidelity_fock<T: Real>(rho0: &FockOperator<T>, rho1: &FockOperator<T>) -> Result<T> {
    let mut root_sum = T::zero();
    for (a, b) in joint_factors(rho0, rho1)? {
        if a.ncols() == 0 || b.ncols() == 0 {
            continue;
        }
        let cross = a.adjoint() * b;
        root_sum += cross
            .singular_values()
            .iter()
            .fold(T::zero(), |acc, &x| acc + x);
    }
    Ok((root_sum * root_sum).min(T::one()))
}

/// Trace norm `‖ρ0 − ρ1‖₁`.
pub fn trace_norm_fock<T: Real>(rho0: &FockOperator<T>, rho1: &FockOperator<T>) -> Result<T> {
    let mut norm = T::zero();
    for (a, b) in joint_factors(rho0, rho1)? {
        let diff = &a * a.adjoint() - &b * b.adjoint();
        let eig = SymmetricEigen::new(diff);
        norm += eig
            .eigenvalues
            .iter()
            .fold(T::zero(), |acc, &x| acc + x.abs());
    }
    Ok(norm)
}

/// Minimum error probability for equiprobable hypotheses,
/// `[1 − ½ ‖ρ0 − ρ1‖₁] / 2`.
pub fn helstrom_error_fock<T: Real>(rho0: &FockOperator<T>, rho1: &FockOperator<T>) -> Result<T> {
    let half = lit::<T>(0.5);
    let norm = trace_norm_fock(rho0, rho1)?;
    Ok(((T::one() - half * norm) * half).max(T::zero()).min(half))
}

/// Cutoff for oracle runs on a cell at signal energy `n_s`: the tail rule
/// over every thermal occupation that appears (signal, bath, and for
/// coherent probes their sum).
pub fn oracle_cutoff<T: Real>(n_s: T, n_b: T, tail: T) -> usize {
    cutoff_for_tail(&[n_s, n_b, n_s + n_b], tail)
}

/// The receiver states `(θ0, θ1)` in the Fock basis: a truncated TMSV whose
/// signal mode passes through the two conditional channels of `cell`.
pub fn theta_states_fock<T: Real>(
    cell: &MemoryCell<T>,
    n_s: T,
    cutoff: usize,
    tail_tol: T,
) -> Result<(FockOperator<T>, FockOperator<T>)> {
    let input = FockOperator::from_pure(&tmsv_fock(n_s, cutoff, tail_tol)?);
    Ok((
        lossy_channel_fock(&input, 0, cell.r0(), cell.n_b(), cutoff, tail_tol)?,
        lossy_channel_fock(&input, 0, cell.r1(), cell.n_b(), cutoff, tail_tol)?,
    ))
}

/// Outputs of the two channels for the coherent probe `|√n_s⟩`.
pub fn coherent_outputs_fock<T: Real>(
    cell: &MemoryCell<T>,
    n_s: T,
    cutoff: usize,
    tail_tol: T,
) -> Result<(FockOperator<T>, FockOperator<T>)> {
    let alpha = C::new(n_s.sqrt(), T::zero());
    let input = FockOperator::from_pure(&coherent_fock(alpha, cutoff, tail_tol)?);
    Ok((
        lossy_channel_fock(&input, 0, cell.r0(), cell.n_b(), cutoff, tail_tol)?,
        lossy_channel_fock(&input, 0, cell.r1(), cell.n_b(), cutoff, tail_tol)?,
    ))
}
