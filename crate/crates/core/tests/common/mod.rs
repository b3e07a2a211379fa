//! Independent oracles shared by the integration and acceptance tests.
#![allow(dead_code)]

use pdolab::bell::Mat3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type V3 = [f64; 3];

fn norm(v: &V3) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn unit(v: V3) -> V3 {
    let n = norm(&v);
    if n < 1e-300 {
        [0.0, 0.0, 1.0]
    } else {
        [v[0] / n, v[1] / n, v[2] / n]
    }
}

fn apply(t: &Mat3, v: &V3) -> V3 {
    [0, 1, 2].map(|i| (0..3).map(|j| t[i][j] * v[j]).sum())
}

fn apply_t(t: &Mat3, v: &V3) -> V3 {
    [0, 1, 2].map(|j| (0..3).map(|i| t[i][j] * v[i]).sum())
}

fn add(a: &V3, b: &V3, s: f64) -> V3 {
    [a[0] + s * b[0], a[1] + s * b[1], a[2] + s * b[2]]
}

fn dot(a: &V3, b: &V3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Near-uniform points on the unit sphere.
pub fn fibonacci_sphere(n: usize) -> Vec<V3> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|k| {
            let z = 1.0 - 2.0 * (k as f64 + 0.5) / n as f64;
            let r = (1.0 - z * z).sqrt();
            let phi = golden * k as f64;
            [r * phi.cos(), r * phi.sin(), z]
        })
        .collect()
}

/// CHSH value of explicit settings, straight from the definition.
pub fn chsh_direct(t: &Mat3, a1: &V3, a2: &V3, b1: &V3, b2: &V3) -> f64 {
    let e = |a: &V3, b: &V3| dot(a, &apply(t, b));
    e(a1, b1) + e(a1, b2) + e(a2, b1) - e(a2, b2)
}

/// Maximal CHSH by brute force: a dense sphere grid over `(b1, b2)` with the
/// side-1 directions chosen in closed form, then alternating (see-saw)
/// refinement of both sides from the best grid point.
pub fn grid_search_chsh(t: &Mat3, grid: usize) -> f64 {
    let pts = fibonacci_sphere(grid);
    let score = |b1: &V3, b2: &V3| norm(&apply(t, &add(b1, b2, 1.0))) + norm(&apply(t, &add(b1, b2, -1.0)));
    let mut best = (f64::NEG_INFINITY, pts[0], pts[0]);
    for b1 in &pts {
        for b2 in &pts {
            let s = score(b1, b2);
            if s > best.0 {
                best = (s, *b1, *b2);
            }
        }
    }
    let (_, mut b1, mut b2) = best;
    let mut value = best.0;
    for _ in 0..2000 {
        let a1 = unit(apply(t, &add(&b1, &b2, 1.0)));
        let a2 = unit(apply(t, &add(&b1, &b2, -1.0)));
        b1 = unit(apply_t(t, &add(&a1, &a2, 1.0)));
        b2 = unit(apply_t(t, &add(&a1, &a2, -1.0)));
        let next = chsh_direct(t, &a1, &a2, &b1, &b2).max(score(&b1, &b2));
        if (next - value).abs() < 1e-14 {
            value = value.max(next);
            break;
        }
        value = value.max(next);
    }
    value
}

/// Rotation matrix from a random unit quaternion.
pub fn random_rotation(rng: &mut impl Rng) -> Mat3 {
    let q: [f64; 4] = loop {
        let q = [0; 4].map(|_| rng.random_range(-1.0..1.0));
        let n: f64 = q.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-3 && n <= 1.0 {
            break q.map(|x| x / n);
        }
    };
    let [w, x, y, z] = q;
    [
        [1.0 - 2.0 * (y * y + z * z), 2.0 * (x * y - z * w), 2.0 * (x * z + y * w)],
        [2.0 * (x * y + z * w), 1.0 - 2.0 * (x * x + z * z), 2.0 * (y * z - x * w)],
        [2.0 * (x * z - y * w), 2.0 * (y * z + x * w), 1.0 - 2.0 * (x * x + y * y)],
    ]
}

fn matmul(a: &Mat3, b: &Mat3) -> Mat3 {
    let mut m = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            m[i][j] = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    m
}

/// `R1 · diag(s) · R2` with singular values in `[0, 1]` and random signs.
pub fn random_correlation_matrix(rng: &mut impl Rng) -> Mat3 {
    let r1 = random_rotation(rng);
    let r2 = random_rotation(rng);
    let mut d = [[0.0; 3]; 3];
    for (i, row) in d.iter_mut().enumerate() {
        let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        row[i] = sign * rng.random_range(0.0..1.0);
    }
    matmul(&matmul(&r1, &d), &r2)
}

pub fn random_unit(rng: &mut impl Rng) -> V3 {
    loop {
        let v = [0; 3].map(|_| rng.random_range(-1.0..1.0));
        let n = norm(&v);
        if n > 1e-3 && n <= 1.0 {
            return unit(v);
        }
    }
}

/// Correlation matrix of a random mixture of product states,
/// `T = Σ p_k r_k s_kᵀ` with Bloch vectors of length at most one.
pub fn random_separable_matrix(rng: &mut impl Rng) -> Mat3 {
    let terms = rng.random_range(1..=6);
    let weights: Vec<f64> = (0..terms).map(|_| rng.random_range(0.01..1.0)).collect();
    let total: f64 = weights.iter().sum();
    let mut t = [[0.0; 3]; 3];
    for w in weights {
        let r = random_unit(rng).map(|x| x * rng.random_range(0.0..=1.0));
        let s = random_unit(rng).map(|x| x * rng.random_range(0.0..=1.0));
        for i in 0..3 {
            for j in 0..3 {
                t[i][j] += w / total * r[i] * s[j];
            }
        }
    }
    t
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        0.5 * (xs[n / 2 - 1] + xs[n / 2])
    }
}
