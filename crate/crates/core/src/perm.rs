//! Permutations of `{0, .., p-1}` and the cyclic subgroups they generate.
//!
//! Indices are 0-based in the Rust API. The cycle-notation text accepted by
//! [`parse_permutation`] and produced by `Display` is 1-based, e.g. `(1,2)(3,4)`.
//!
//! Composition follows `(a ∘ b)(i) = a(b(i))`. Permutations are ordered by their
//! one-line image `(σ(1), .., σ(p))` compared left to right, and a cyclic subgroup is
//! keyed by its smallest generator under that order.

use std::collections::HashSet;
use std::fmt;

use crate::error::{Error, Result};

/// Largest `p` for which [`enumerate_cyclic_subgroups`] runs without an explicit override.
pub const DEFAULT_ENUMERATION_LIMIT: usize = 9;

/// A bijection of `{0, .., p-1}` stored as its one-line image.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    image: Vec<usize>,
}

impl Permutation {
    pub fn identity(p: usize) -> Self {
        Self {
            image: (0..p).collect(),
        }
    }

    /// Builds a permutation from `image[i] = σ(i)`.
    pub fn from_image(image: Vec<usize>) -> Result<Self> {
        let p = image.len();
        let mut seen = vec![false; p];
        for &x in &image {
            if x >= p {
                return Err(Error::IndexOutOfRange { index: x, dim: p });
            }
            if seen[x] {
                return Err(Error::DuplicateIndex { index: x });
            }
            seen[x] = true;
        }
        Ok(Self { image })
    }

    /// Builds a permutation on `p` points from 0-based cycles. Points not listed are fixed.
    pub fn from_cycles(p: usize, cycles: &[Vec<usize>]) -> Result<Self> {
        let mut image: Vec<usize> = (0..p).collect();
        let mut seen = vec![false; p];
        for cycle in cycles {
            for (k, &x) in cycle.iter().enumerate() {
                if x >= p {
                    return Err(Error::IndexOutOfRange { index: x, dim: p });
                }
                if seen[x] {
                    return Err(Error::DuplicateIndex { index: x });
                }
                seen[x] = true;
                image[x] = cycle[(k + 1) % cycle.len()];
            }
        }
        Ok(Self { image })
    }

    /// Parses 1-based cycle notation; see [`parse_permutation`].
    pub fn parse(text: &str, p: usize) -> Result<Self> {
        parse_permutation(text, p)
    }

    /// Ambient dimension `p`.
    pub fn dim(&self) -> usize {
        self.image.len()
    }

    pub fn image(&self) -> &[usize] {
        &self.image
    }

    #[inline]
    pub fn apply(&self, i: usize) -> usize {
        self.image[i]
    }

    pub fn is_identity(&self) -> bool {
        self.image.iter().enumerate().all(|(i, &x)| i == x)
    }

    /// `self ∘ other`, i.e. apply `other` first.
    pub fn compose(&self, other: &Permutation) -> Result<Permutation> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(Permutation {
            image: other.image.iter().map(|&x| self.image[x]).collect(),
        })
    }

    pub fn inverse(&self) -> Permutation {
        let mut image = vec![0; self.dim()];
        for (i, &x) in self.image.iter().enumerate() {
            image[x] = i;
        }
        Permutation { image }
    }

    /// `σ^k`, computed cycle by cycle.
    pub fn pow(&self, k: u128) -> Permutation {
        let mut image = vec![0; self.dim()];
        for cycle in self.cycles().cycles() {
            let len = cycle.len();
            let shift = (k % len as u128) as usize;
            for (t, &x) in cycle.iter().enumerate() {
                image[x] = cycle[(t + shift) % len];
            }
        }
        Permutation { image }
    }

    pub fn cycles(&self) -> CycleDecomposition {
        cycle_decomposition(self)
    }

    /// Order of `⟨σ⟩`: the lcm of the cycle lengths.
    ///
    /// Panics if the order does not fit in a `u128`, which needs p well above 1000.
    pub fn order(&self) -> u128 {
        self.cycles()
            .lengths()
            .into_iter()
            .fold(1u128, |acc, len| lcm_u128(acc, len as u128))
    }

    /// `σ ∘ (i j)`.
    pub fn compose_with_transposition(&self, i: usize, j: usize) -> Result<Permutation> {
        compose_with_transposition(self, i, j)
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut any = false;
        for cycle in self.cycles().cycles() {
            if cycle.len() < 2 {
                continue;
            }
            any = true;
            write!(f, "(")?;
            for (k, x) in cycle.iter().enumerate() {
                if k > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{}", x + 1)?;
            }
            write!(f, ")")?;
        }
        if !any {
            write!(f, "()")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Permutation[p={}]{}", self.dim(), self)
    }
}

/// Cycles of a permutation, fixed points included.
///
/// Each cycle starts at its smallest element and cycles are sorted by that element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycleDecomposition {
    cycles: Vec<Vec<usize>>,
}

impl CycleDecomposition {
    pub fn cycles(&self) -> &[Vec<usize>] {
        &self.cycles
    }

    /// `C_σ`, counting length-1 cycles.
    pub fn count(&self) -> usize {
        self.cycles.len()
    }

    pub fn lengths(&self) -> Vec<usize> {
        self.cycles.iter().map(Vec::len).collect()
    }
}

pub fn cycle_decomposition(sigma: &Permutation) -> CycleDecomposition {
    let p = sigma.dim();
    let mut seen = vec![false; p];
    let mut cycles = Vec::new();
    for start in 0..p {
        if seen[start] {
            continue;
        }
        let mut cycle = Vec::new();
        let mut x = start;
        while !seen[x] {
            seen[x] = true;
            cycle.push(x);
            x = sigma.apply(x);
        }
        cycles.push(cycle);
    }
    CycleDecomposition { cycles }
}

/// Parses 1-based cycle notation on `p` points.
///
/// Accepts `()` (identity), `(1,2)(3,4)`, and the compact digit form `(12345)` when
/// `p <= 9`. For `p > 9` a cycle without commas is read as a single index. Empty input
/// is the identity.
pub fn parse_permutation(text: &str, p: usize) -> Result<Permutation> {
    let malformed = |reason: &str| Error::MalformedPermutation {
        text: text.to_string(),
        reason: reason.to_string(),
    };
    let mut cycles: Vec<Vec<usize>> = Vec::new();
    let mut rest = text.trim();
    while !rest.is_empty() {
        let body_start = rest
            .strip_prefix('(')
            .ok_or_else(|| malformed("expected '('"))?;
        let close = body_start
            .find(')')
            .ok_or_else(|| malformed("missing ')'"))?;
        let body = &body_start[..close];
        if body.contains('(') {
            return Err(malformed("nested '('"));
        }
        rest = body_start[close + 1..].trim_start();

        let body = body.trim();
        if body.is_empty() {
            continue;
        }
        let mut cycle = Vec::new();
        if body.contains(',') {
            for item in body.split(',') {
                let item = item.trim();
                let value: usize = item
                    .parse()
                    .map_err(|_| malformed(&format!("{item:?} is not an index")))?;
                cycle.push(value);
            }
        } else if p <= 9 {
            for ch in body.chars().filter(|c| !c.is_whitespace()) {
                let value = ch
                    .to_digit(10)
                    .ok_or_else(|| malformed(&format!("{ch:?} is not a digit")))?;
                cycle.push(value as usize);
            }
        } else {
            let value: usize = body
                .parse()
                .map_err(|_| malformed(&format!("{body:?} is not an index")))?;
            cycle.push(value);
        }
        for value in cycle.iter_mut() {
            if *value == 0 || *value > p {
                return Err(Error::IndexOutOfRange {
                    index: *value,
                    dim: p,
                });
            }
            *value -= 1;
        }
        cycles.push(cycle);
    }
    Permutation::from_cycles(p, &cycles).map_err(|e| match e {
        Error::DuplicateIndex { index } => Error::DuplicateIndex { index: index + 1 },
        other => other,
    })
}

pub fn subgroup_order(sigma: &Permutation) -> u128 {
    sigma.order()
}

/// `σ ∘ (i j)` with 0-based `i != j`.
pub fn compose_with_transposition(sigma: &Permutation, i: usize, j: usize) -> Result<Permutation> {
    let p = sigma.dim();
    for idx in [i, j] {
        if idx >= p {
            return Err(Error::IndexOutOfRange { index: idx, dim: p });
        }
    }
    if i == j {
        return Err(Error::DegenerateTransposition(i));
    }
    let mut image = sigma.image.clone();
    image.swap(i, j);
    Ok(Permutation { image })
}

/// A cyclic subgroup `⟨σ⟩`, represented by its canonical (lexicographically smallest)
/// generator.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct CyclicSubgroup {
    generator: Permutation,
    order: u128,
}

impl CyclicSubgroup {
    pub fn new(sigma: &Permutation) -> Self {
        canonical_generator(sigma)
    }

    pub fn trivial(p: usize) -> Self {
        Self {
            generator: Permutation::identity(p),
            order: 1,
        }
    }

    pub fn generator(&self) -> &Permutation {
        &self.generator
    }

    pub fn order(&self) -> u128 {
        self.order
    }

    pub fn dim(&self) -> usize {
        self.generator.dim()
    }

    /// Number of distinct generators of the group, `Φ(N)`.
    pub fn generator_count(&self) -> u128 {
        totient_of_lcm(&self.generator.cycles().lengths())
    }
}

impl fmt::Display for CyclicSubgroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.generator.fmt(f)
    }
}

/// Finds the smallest generator of `⟨σ⟩`.
///
/// The generators are the powers `σ^k` with `gcd(k, N) = 1`. On a cycle of length `L`,
/// `σ^k` only depends on `k mod L`, and a family of residues `k ≡ r_c (mod L_c)` extends
/// to a unit mod `N` iff each `r_c` is a unit mod `L_c` and the residues agree modulo
/// every `gcd(L_c, L_c')`. Walking positions `0, 1, ..` and fixing the residue of each
/// newly reached cycle to minimise the image at that position yields the lexicographic
/// minimum without ever materialising `N`.
pub fn canonical_generator(sigma: &Permutation) -> CyclicSubgroup {
    let decomposition = sigma.cycles();
    let cycles = decomposition.cycles();
    let p = sigma.dim();

    let mut cycle_of = vec![0usize; p];
    for (c, cycle) in cycles.iter().enumerate() {
        for &x in cycle {
            cycle_of[x] = c;
        }
    }

    // (cycle length, chosen residue) for each distinct length fixed so far.
    let mut fixed: Vec<(usize, usize)> = Vec::new();
    let mut residue: Vec<Option<usize>> = vec![None; cycles.len()];
    for i in 0..p {
        let c = cycle_of[i];
        if residue[c].is_some() {
            continue;
        }
        // `i` is the first element of its cycle reached in increasing order, hence its head.
        let cycle = &cycles[c];
        let len = cycle.len();
        if let Some(&(_, r)) = fixed.iter().find(|(l, _)| *l == len) {
            residue[c] = Some(r);
            continue;
        }
        let best = (0..len)
            .filter(|&x| gcd(x, len) == 1)
            .filter(|&x| {
                fixed.iter().all(|&(l, r)| {
                    let g = gcd(len, l);
                    x % g == r % g
                })
            })
            .min_by_key(|&x| cycle[x])
            .expect("residue 1 is always admissible");
        fixed.push((len, best));
        residue[c] = Some(best);
    }

    let mut image = vec![0; p];
    for (c, cycle) in cycles.iter().enumerate() {
        let len = cycle.len();
        let shift = residue[c].unwrap_or(0);
        for (t, &x) in cycle.iter().enumerate() {
            image[x] = cycle[(t + shift) % len];
        }
    }
    let order = decomposition
        .lengths()
        .into_iter()
        .fold(1u128, |acc, len| lcm_u128(acc, len as u128));
    CyclicSubgroup {
        generator: Permutation { image },
        order,
    }
}

/// All cyclic subgroups of the symmetric group on `p` points, sorted by canonical
/// generator (identity first). Refuses `p > DEFAULT_ENUMERATION_LIMIT`.
pub fn enumerate_cyclic_subgroups(p: usize) -> Result<Vec<CyclicSubgroup>> {
    enumerate_cyclic_subgroups_with_limit(p, DEFAULT_ENUMERATION_LIMIT)
}

pub fn enumerate_cyclic_subgroups_with_limit(
    p: usize,
    limit: usize,
) -> Result<Vec<CyclicSubgroup>> {
    if p == 0 {
        return Err(Error::InvalidArgument("p must be at least 1".into()));
    }
    if p > limit {
        return Err(Error::EnumerationLimit { p, limit });
    }
    let mut seen: HashSet<CyclicSubgroup> = HashSet::new();
    for sigma in AllPermutations::new(p) {
        seen.insert(canonical_generator(&sigma));
    }
    let mut out: Vec<CyclicSubgroup> = seen.into_iter().collect();
    out.sort();
    Ok(out)
}

/// Number of cyclic subgroups of the symmetric group on `p` points, counted through cycle
/// types: a type with `c` permutations and order `N` contributes `c / Φ(N)` subgroups.
/// Returns `None` when the count overflows `u128` (p > 33 or so).
pub fn count_cyclic_subgroups(p: usize) -> Option<u128> {
    let mut factorial = [1u128; 64];
    for k in 1..64 {
        factorial[k] = factorial[k - 1].checked_mul(k as u128).unwrap_or(u128::MAX);
    }
    if p >= 64 || factorial[p] == u128::MAX {
        return None;
    }
    let mut total: u128 = 0;
    let mut parts = Vec::new();
    let mut ok = true;
    for_each_partition(p, p, &mut parts, &mut |parts: &[usize]| {
        // multiplicities of each part
        let mut denom: u128 = 1;
        let mut k = 0;
        while k < parts.len() {
            let len = parts[k];
            let mut m = 0;
            while k < parts.len() && parts[k] == len {
                m += 1;
                k += 1;
            }
            let pow = (len as u128).checked_pow(m as u32);
            denom = match pow.and_then(|x| x.checked_mul(factorial[m])) {
                Some(x) => match denom.checked_mul(x) {
                    Some(d) => d,
                    None => {
                        ok = false;
                        return;
                    }
                },
                None => {
                    ok = false;
                    return;
                }
            };
        }
        let perms = factorial[p] / denom;
        total += perms / totient_of_lcm(parts);
    });
    ok.then_some(total)
}

fn for_each_partition(
    remaining: usize,
    max_part: usize,
    parts: &mut Vec<usize>,
    visit: &mut dyn FnMut(&[usize]),
) {
    if remaining == 0 {
        visit(parts);
        return;
    }
    for part in (1..=max_part.min(remaining)).rev() {
        parts.push(part);
        for_each_partition(remaining - part, part, parts, visit);
        parts.pop();
    }
}

/// Euler's totient: the count of `k` in `1..=n` coprime with `n`.
pub fn euler_totient(n: u64) -> u64 {
    assert!(n >= 1, "totient is defined for n >= 1");
    let mut result = n;
    let mut m = n;
    let mut q = 2u64;
    while q * q <= m {
        if m % q == 0 {
            while m % q == 0 {
                m /= q;
            }
            result -= result / q;
        }
        q += 1;
    }
    if m > 1 {
        result -= result / m;
    }
    result
}

/// `Φ(lcm(lengths))` from the prime factorisations of the lengths.
fn totient_of_lcm(lengths: &[usize]) -> u128 {
    // prime -> max exponent
    let mut primes: Vec<(usize, u32)> = Vec::new();
    for &len in lengths {
        let mut m = len;
        let mut q = 2;
        while q * q <= m {
            let mut e = 0;
            while m % q == 0 {
                m /= q;
                e += 1;
            }
            if e > 0 {
                bump(&mut primes, q, e);
            }
            q += 1;
        }
        if m > 1 {
            bump(&mut primes, m, 1);
        }
    }
    primes
        .into_iter()
        .map(|(q, e)| (q as u128).pow(e - 1) * (q as u128 - 1))
        .product()
}

fn bump(primes: &mut Vec<(usize, u32)>, q: usize, e: u32) {
    match primes.iter_mut().find(|(r, _)| *r == q) {
        Some(entry) => entry.1 = entry.1.max(e),
        None => primes.push((q, e)),
    }
}

/// The orbit of the unordered pair `{i, j}` under `⟨σ⟩`, as sorted `(min, max)` pairs.
pub fn pair_orbit(sigma: &Permutation, i: usize, j: usize) -> Result<Vec<(usize, usize)>> {
    let p = sigma.dim();
    for idx in [i, j] {
        if idx >= p {
            return Err(Error::IndexOutOfRange { index: idx, dim: p });
        }
    }
    let mut orbit = Vec::new();
    let (mut a, mut b) = (i, j);
    loop {
        orbit.push((a.min(b), a.max(b)));
        a = sigma.apply(a);
        b = sigma.apply(b);
        if (a, b) == (i, j) {
            break;
        }
    }
    orbit.sort_unstable();
    orbit.dedup();
    Ok(orbit)
}

pub fn gcd(mut a: usize, mut b: usize) -> usize {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn gcd_u128(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn lcm_u128(a: u128, b: u128) -> u128 {
    (a / gcd_u128(a, b))
        .checked_mul(b)
        .expect("subgroup order overflows u128")
}

/// Iterator over all permutations of `p` points in lexicographic order of one-line image.
pub struct AllPermutations {
    next: Option<Vec<usize>>,
}

impl AllPermutations {
    pub fn new(p: usize) -> Self {
        Self {
            next: Some((0..p).collect()),
        }
    }
}

impl Iterator for AllPermutations {
    type Item = Permutation;

    fn next(&mut self) -> Option<Permutation> {
        let current = self.next.take()?;
        let mut following = current.clone();
        if next_lexicographic(&mut following) {
            self.next = Some(following);
        }
        Some(Permutation { image: current })
    }
}

fn next_lexicographic(v: &mut [usize]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}
