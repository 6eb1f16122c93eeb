//! The colored space of a cyclic subgroup: symmetric matrices constant on the pair orbits
//! of `⟨σ⟩`, the orbit-averaging projection onto it, and the orthogonal basis that
//! block-diagonalises it.
//!
//! The basis is built per cycle from Fourier-type vectors. Cycle `c` of length `p_c` with
//! representative `i_c` (its smallest element) contributes, with `t` the offset along the
//! cycle from `i_c`:
//!
//! * `k = 1`: constant `√(1/p_c)`;
//! * `k = 2β, 2β+1` for `1 ≤ β < p_c/2`: `√(2/p_c)·cos(2πβt/p_c)` and `√(2/p_c)·sin(2πβt/p_c)`;
//! * `k = p_c` when `p_c` is even: `√(1/p_c)·(−1)^t`.
//!
//! Columns are sorted by the exact rational `⌊k/2⌋/p_c`, then by cycle, then even `k`
//! before odd `k`. Each distinct frequency `f` then owns a contiguous run of `r·d`
//! columns, where `r` counts the cycles whose length is a multiple of the denominator
//! of `f`, and `d = 1` for `f ∈ {0, 1/2}`, `d = 2` otherwise.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{conjugate, Matrix, OrthoMatrix, SymMatrix};
use crate::perm::{canonical_generator, gcd, CycleDecomposition, CyclicSubgroup, Permutation};

/// Relative tolerance on off-block mass in [`block_decompose`].
pub const LEAKAGE_RTOL: f64 = 1e-8;

/// Block multiplicities `r` and division degrees `d`, one entry per block, in increasing
/// frequency order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructureConstants {
    pub r: Vec<usize>,
    pub d: Vec<usize>,
}

impl StructureConstants {
    /// Number of blocks `L`.
    pub fn len(&self) -> usize {
        self.r.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r.is_empty()
    }

    pub fn block_sizes(&self) -> Vec<usize> {
        self.r.iter().zip(&self.d).map(|(r, d)| r * d).collect()
    }

    /// `Σ r(r+1)/2` over `d = 1` blocks plus `Σ r²` over `d = 2` blocks.
    pub fn block_dimension(&self) -> usize {
        self.r
            .iter()
            .zip(&self.d)
            .map(|(&r, &d)| if d == 1 { r * (r + 1) / 2 } else { r * r })
            .sum()
    }
}

/// `π_⟨σ⟩(S)`: every pair orbit of entries is replaced by its mean.
///
/// The mean of an orbit is computed once and written to all of its entries, so orbit
/// equality holds bitwise.
pub fn project(s: &SymMatrix, sigma: &Permutation) -> Result<SymMatrix> {
    let p = sigma.dim();
    s.check_dim(p)?;
    let mut out = SymMatrix::zeros(p);
    let mut visited = vec![false; p * p];
    let mut orbit: Vec<(usize, usize)> = Vec::new();
    for i in 0..p {
        for j in 0..=i {
            if visited[i * p + j] {
                continue;
            }
            orbit.clear();
            let (mut a, mut b) = (i, j);
            loop {
                orbit.push((a, b));
                visited[a * p + b] = true;
                visited[b * p + a] = true;
                a = sigma.apply(a);
                b = sigma.apply(b);
                if (a, b) == (i, j) {
                    break;
                }
            }
            let mean = orbit.iter().map(|&(a, b)| s.get(a, b)).sum::<f64>() / orbit.len() as f64;
            for &(a, b) in &orbit {
                out.set(a, b, mean);
            }
        }
    }
    Ok(out)
}

/// Dimension of the colored space: the number of unordered pair orbits,
/// `Σ_c (1 + ⌊p_c/2⌋) + Σ_{c<c'} gcd(p_c, p_c')`.
pub fn dimension(sigma: &Permutation) -> usize {
    let lengths = sigma.cycles().lengths();
    let mut dim = 0;
    for (a, &la) in lengths.iter().enumerate() {
        dim += 1 + la / 2;
        for &lb in &lengths[a + 1..] {
            dim += gcd(la, lb);
        }
    }
    dim
}

/// Number of unordered pair orbits counted by walking the action; `O(p²)`.
pub fn orbit_count(sigma: &Permutation) -> usize {
    let p = sigma.dim();
    let mut visited = vec![false; p * p];
    let mut count = 0;
    for i in 0..p {
        for j in 0..=i {
            if visited[i * p + j] {
                continue;
            }
            count += 1;
            let (mut a, mut b) = (i, j);
            loop {
                visited[a * p + b] = true;
                visited[b * p + a] = true;
                a = sigma.apply(a);
                b = sigma.apply(b);
                if (a, b) == (i, j) {
                    break;
                }
            }
        }
    }
    count
}

/// MLE existence threshold `n₀ = C_σ`, the number of cycles including fixed points.
pub fn n0(sigma: &Permutation) -> usize {
    sigma.cycles().count()
}

/// One column of the block-diagonalising basis.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct BasisColumn {
    cycle: usize,
    /// 1-based family index within the cycle.
    k: usize,
    len: usize,
}

impl BasisColumn {
    fn half_k(&self) -> usize {
        self.k / 2
    }

    fn cmp_key(&self, other: &Self) -> Ordering {
        // ⌊k/2⌋/p_c compared by cross-multiplication
        (self.half_k() * other.len)
            .cmp(&(other.half_k() * self.len))
            .then(self.cycle.cmp(&other.cycle))
            .then((self.k % 2).cmp(&(other.k % 2)))
    }

    fn value(&self, t: usize) -> f64 {
        let len = self.len as f64;
        let t_f = t as f64;
        if self.k == 1 {
            (1.0 / len).sqrt()
        } else if self.len % 2 == 0 && self.k == self.len {
            let sign = if t % 2 == 0 { 1.0 } else { -1.0 };
            sign * (1.0 / len).sqrt()
        } else {
            let beta = (self.k / 2) as f64;
            let angle = 2.0 * std::f64::consts::PI * beta * t_f / len;
            let scale = (2.0 / len).sqrt();
            if self.k % 2 == 0 {
                scale * angle.cos()
            } else {
                scale * angle.sin()
            }
        }
    }
}

fn sorted_columns(cycles: &CycleDecomposition) -> Vec<BasisColumn> {
    let mut columns = Vec::new();
    for (cycle, members) in cycles.cycles().iter().enumerate() {
        let len = members.len();
        for k in 1..=len {
            columns.push(BasisColumn { cycle, k, len });
        }
    }
    columns.sort_by(BasisColumn::cmp_key);
    columns
}

/// The orthogonal matrix `U` whose conjugation `UᵀXU` block-diagonalises every `X` in the
/// colored space of `⟨σ⟩`.
pub fn build_basis(sigma: &Permutation) -> OrthoMatrix {
    let p = sigma.dim();
    let cycles = sigma.cycles();
    let mut u = Matrix::zeros(p, p);
    for (col, spec) in sorted_columns(&cycles).iter().enumerate() {
        for (t, &x) in cycles.cycles()[spec.cycle].iter().enumerate() {
            u[(x, col)] = spec.value(t);
        }
    }
    OrthoMatrix::new(u).expect("Fourier basis is orthogonal by construction")
}

/// Structure constants computed from the distinct frequencies `j/p_c`, `0 ≤ j ≤ p_c/2`,
/// without materialising the group order.
pub fn structure_constants(sigma: &Permutation) -> StructureConstants {
    let lengths = sigma.cycles().lengths();
    // reduced fractions (num, den)
    let mut freqs: Vec<(usize, usize)> = Vec::new();
    for &len in &lengths {
        for j in 0..=len / 2 {
            let g = gcd(j, len);
            freqs.push((j / g, len / g));
        }
    }
    freqs.sort_by(|a, b| (a.0 * b.1).cmp(&(b.0 * a.1)));
    freqs.dedup();
    let mut r = Vec::with_capacity(freqs.len());
    let mut d = Vec::with_capacity(freqs.len());
    for &(num, den) in &freqs {
        r.push(lengths.iter().filter(|&&len| len % den == 0).count());
        d.push(if num == 0 || (num, den) == (1, 2) { 1 } else { 2 });
    }
    StructureConstants { r, d }
}

/// Diagonal blocks of `UᵀπΓ(S)U`.
#[derive(Clone, Debug)]
pub struct BlockDecomposition {
    pub blocks: Vec<SymMatrix>,
    pub basis: OrthoMatrix,
    pub constants: StructureConstants,
    /// Largest absolute off-block entry observed.
    pub leakage: f64,
}

/// Projects `S` onto the colored space, conjugates by the basis and splits into blocks.
pub fn block_decompose(s: &SymMatrix, sigma: &Permutation) -> Result<BlockDecomposition> {
    ColoredSpace::new(sigma).block_decompose(s)
}

/// Everything about `⟨σ⟩`'s colored space that does not depend on a matrix. Build once
/// and reuse across evaluations.
#[derive(Clone, Debug)]
pub struct ColoredSpace {
    sigma: Permutation,
    subgroup: CyclicSubgroup,
    basis: OrthoMatrix,
    constants: StructureConstants,
    dimension: usize,
    n0: usize,
}

impl ColoredSpace {
    pub fn new(sigma: &Permutation) -> Self {
        Self {
            sigma: sigma.clone(),
            subgroup: canonical_generator(sigma),
            basis: build_basis(sigma),
            constants: structure_constants(sigma),
            dimension: dimension(sigma),
            n0: n0(sigma),
        }
    }

    pub fn permutation(&self) -> &Permutation {
        &self.sigma
    }

    pub fn subgroup(&self) -> &CyclicSubgroup {
        &self.subgroup
    }

    pub fn basis(&self) -> &OrthoMatrix {
        &self.basis
    }

    pub fn constants(&self) -> &StructureConstants {
        &self.constants
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn n0(&self) -> usize {
        self.n0
    }

    pub fn project(&self, s: &SymMatrix) -> Result<SymMatrix> {
        project(s, &self.sigma)
    }

    pub fn block_decompose(&self, s: &SymMatrix) -> Result<BlockDecomposition> {
        let projected = self.project(s)?;
        let conj = conjugate(&self.basis, &projected)?;
        let sizes = self.constants.block_sizes();

        let mut owner = Vec::with_capacity(conj.dim());
        for (b, &size) in sizes.iter().enumerate() {
            owner.extend(std::iter::repeat_n(b, size));
        }
        let mut leakage = 0.0f64;
        for i in 0..conj.dim() {
            for j in 0..i {
                if owner[i] != owner[j] {
                    leakage = leakage.max(conj.get(i, j).abs());
                }
            }
        }
        let tol = LEAKAGE_RTOL * s.frobenius_norm();
        if leakage > tol {
            return Err(Error::BlockLeakage { leak: leakage, tol });
        }

        let mut blocks = Vec::with_capacity(sizes.len());
        let mut start = 0;
        for &size in &sizes {
            blocks.push(conj.block(start, size));
            start += size;
        }
        Ok(BlockDecomposition {
            blocks,
            basis: self.basis.clone(),
            constants: self.constants.clone(),
            leakage,
        })
    }
}
