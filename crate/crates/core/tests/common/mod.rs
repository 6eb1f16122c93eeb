//! Shared helpers for integration tests: fixture loading, an R-compatible normal
//! generator, adaptive quadrature and independent reference formulas.
#![allow(dead_code)]

use std::path::PathBuf;

use permsym::io::read_table;
use permsym::linalg::{sample_covariance, Matrix, SymMatrix};
use permsym::posterior::{GipsModel, SampleSize};

pub mod rrng;

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

pub fn fixture_data(name: &str) -> Matrix {
    read_table(&fixture(name)).unwrap().values
}

/// Default-hyperparameter model on a data fixture, mean estimated.
pub fn fixture_model(name: &str) -> GipsModel {
    let z = fixture_data(name);
    let (s, _) = sample_covariance(&z, false).unwrap();
    GipsModel::with_defaults(s, SampleSize::new(z.rows(), true)).unwrap()
}

/// Small deterministic generator for randomised trials (SplitMix64).
pub struct Trial(u64);

impl Trial {
    pub fn new(seed: u64) -> Self {
        Trial(seed)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    pub fn below(&mut self, n: usize) -> usize {
        (self.next_u64() % n as u64) as usize
    }

    /// Uniform permutation image by Fisher–Yates.
    pub fn permutation(&mut self, p: usize) -> Vec<usize> {
        let mut v: Vec<usize> = (0..p).collect();
        for i in (1..p).rev() {
            v.swap(i, self.below(i + 1));
        }
        v
    }

    /// `AᵀA/m + ridge·I` with uniform(−1, 1) entries in `A` (m × p).
    pub fn pd_matrix(&mut self, p: usize, m: usize, ridge: f64) -> SymMatrix {
        let a: Vec<f64> = (0..m * p).map(|_| 2.0 * self.uniform() - 1.0).collect();
        SymMatrix::from_fn(p, |i, j| {
            let dot: f64 = (0..m).map(|k| a[k * p + i] * a[k * p + j]).sum();
            dot / m as f64 + if i == j { ridge } else { 0.0 }
        })
    }

    pub fn sym_matrix(&mut self, p: usize) -> SymMatrix {
        SymMatrix::from_fn(p, |_, _| 2.0 * self.uniform() - 1.0)
    }
}

// 7-point Gauss / 15-point Kronrod nodes and weights on [-1, 1].
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_728_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15(f: &mut dyn FnMut(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for k in 0..7 {
        let x = h * XGK[k];
        let (f1, f2) = (f(c - x), f(c + x));
        kronrod += WGK[k] * (f1 + f2);
        if k % 2 == 1 {
            gauss += WG[k / 2] * (f1 + f2);
        }
    }
    (kronrod * h, ((kronrod - gauss) * h).abs())
}

/// Adaptive Gauss–Kronrod on `[a, b]`, refined until the estimated error is below
/// `rel_tol` times the coarse estimate of the whole integral.
pub fn integrate(f: &mut dyn FnMut(f64) -> f64, a: f64, b: f64, rel_tol: f64) -> f64 {
    fn recurse(f: &mut dyn FnMut(f64) -> f64, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
        let (value, err) = gk15(f, a, b);
        if err <= tol || depth == 0 {
            return value;
        }
        let m = 0.5 * (a + b);
        recurse(f, a, m, tol / 2.0, depth - 1) + recurse(f, m, b, tol / 2.0, depth - 1)
    }
    let (whole, _) = gk15(f, a, b);
    let tol = (rel_tol * whole.abs()).max(f64::MIN_POSITIVE);
    recurse(f, a, b, tol, 30)
}

/// `ln Γ(x)` for positive integers and half-integers, from factorials.
pub fn ln_gamma_half_integer(x: f64) -> f64 {
    let twice = (2.0 * x).round();
    assert!((2.0 * x - twice).abs() < 1e-12 && twice >= 1.0, "{x} is not a positive half-integer");
    let twice = twice as u64;
    if twice % 2 == 0 {
        // Γ(n) = (n−1)!
        (1..twice / 2).map(|k| (k as f64).ln()).sum()
    } else {
        // Γ(n + ½) = (2n)! √π / (4ⁿ n!)
        let n = (twice - 1) / 2;
        let ln_fact = |m: u64| (1..=m).map(|k| (k as f64).ln()).sum::<f64>();
        ln_fact(2 * n) + 0.5 * std::f64::consts::PI.ln() - n as f64 * 4f64.ln() - ln_fact(n)
    }
}

/// Classical Wishart integral `∫ det(k)^{(δ−2)/2} e^{−tr(Dk)/2} ∏_{i≤j} dk_ij` for
/// `D = c·I_p`, half-integer arguments only.
pub fn log_wishart_classical(p: usize, delta: f64, c: f64) -> f64 {
    let a = (delta + p as f64 - 1.0) / 2.0;
    let pf = p as f64;
    let log_mvgamma = pf * (pf - 1.0) / 4.0 * std::f64::consts::PI.ln()
        + (1..=p)
            .map(|j| ln_gamma_half_integer(a - (j as f64 - 1.0) / 2.0))
            .sum::<f64>();
    pf * a * 2f64.ln() + log_mvgamma - a * pf * c.ln()
}

/// `ln Γ(x)` to 20 significant digits, computed with arbitrary-precision arithmetic.
pub const LN_GAMMA_TABLE: [(f64, f64); 20] = [
    (0.001, 6.907_178_885_383_853_661_7),
    (0.1, 2.252_712_651_734_205_902),
    (0.5, 0.572_364_942_924_700_087_07),
    (0.75, 0.203_280_951_431_295_371_48),
    (1.5, -0.120_782_237_635_245_222_35),
    (2.5, 0.284_682_870_472_919_159_63),
    (3.3, 0.987_098_577_894_734_404_06),
    (7.0, 6.579_251_212_010_100_995_1),
    (10.5, 13.940_625_219_403_763_633),
    (17.25, 31.374_622_313_677_686_48),
    (25.0, 54.784_729_398_112_319_19),
    (50.5, 146.519_255_490_720_627_22),
    (99.9, 358.674_239_451_977_563_76),
    (150.0, 600.009_470_555_327_428_11),
    (333.3, 1600.868_694_070_529_580_7),
    (777.0, 4391.868_477_843_784_239_1),
    (1234.5, 7550.550_901_077_894_895_7),
    (2500.25, 17059.077_950_003_304_236),
    (5000.0, 37582.626_315_685_350_332),
    (10000.0, 82099.717_496_442_377_273),
];

/// Upper cut-off for the radial variable: the integrands carry `e^{-c·a}` with `c ≥ 1/2`.
fn radial_cutoff(rate: f64) -> f64 {
    120.0 / rate
}

/// `log ∫ det(k)^{(δ−2)/2} e^{−tr(Dk)/2} dk` over `{[[a,b],[b,a]] : a > |b|}` with the
/// Frobenius (orthonormal-coordinate) measure, which is `2·da·db`.
///
/// Uses `b = a·t`, so the inner integral is over `t ∈ (−1, 1)`.
pub fn quad_pair_cone(delta: f64, d: &SymMatrix) -> f64 {
    let e = (delta - 2.0) / 2.0;
    let tr = d.get(0, 0) + d.get(1, 1);
    let off = d.get(0, 1);
    let upper = radial_cutoff((tr - 2.0 * off.abs()) / 2.0);
    let mut outer = |a: f64| {
        if a <= 0.0 {
            return 0.0;
        }
        let mut inner = |t: f64| (1.0 - t * t).max(0.0).powf(e) * (-a * off * t).exp();
        let inner_value = integrate(&mut inner, -1.0, 1.0, 1e-10);
        a.powf(2.0 * e + 1.0) * (-a * tr / 2.0).exp() * inner_value
    };
    (2.0 * integrate(&mut outer, 0.0, upper, 1e-10)).ln()
}

/// Same integral over `{aI + b(J−I)}` at `p = 3` with `D = c·I`, the colored space of a
/// 3-cycle. The Frobenius measure is `3√2·da·db`. In the eigen-coordinates
/// `λ₁ = a+2b`, `λ₂ = a−b` the Jacobian is `1/3`, `det = λ₁λ₂²`, `tr k = λ₁ + 2λ₂`.
pub fn quad_three_cycle(delta: f64, c: f64) -> f64 {
    let e = (delta - 2.0) / 2.0;
    let upper = radial_cutoff(c / 2.0);
    let mut outer = |l1: f64| {
        if l1 <= 0.0 {
            return 0.0;
        }
        let mut inner = |l2: f64| {
            if l2 <= 0.0 {
                0.0
            } else {
                l2.powf(2.0 * e) * (-c * l2).exp()
            }
        };
        l1.powf(e) * (-c * l1 / 2.0).exp() * integrate(&mut inner, 0.0, upper, 1e-10)
    };
    (3.0 * 2f64.sqrt() / 3.0 * integrate(&mut outer, 0.0, upper, 1e-10)).ln()
}
