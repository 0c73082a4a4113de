//! Polytope utilities over H-representations: exact vertex enumeration by
//! row-subset brute force, relative-interior points, an affine-independence
//! simplex test, and hit-and-run uniform sampling.

use crate::error::{Error, Result};
use crate::linalg::{dot, linf_distance, solve_square, Matrix};
use crate::model::{Scenario, UncertaintySet};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const DEDUP_TOL: f64 = 1e-7;
const MAX_DIM: usize = 12;
const MAX_SUBSETS: u128 = 1_000_000;

#[derive(Clone, Debug)]
pub struct VertexList {
    pub vertices: Vec<Scenario>,
    pub dedup_tol: f64,
}

impl VertexList {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Scenario> {
        self.vertices.iter()
    }
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul((n - i) as u128) / (i as u128 + 1);
    }
    acc
}

/// Enumerate the vertex set of `{z : H z <= h}` by solving every square
/// subsystem of `L` rows and keeping the feasible, deduplicated solutions.
/// Output is sorted lexicographically.
pub fn enumerate_vertices(u: &UncertaintySet) -> Result<VertexList> {
    if let Some(cached) = &u.vertices {
        let mut vertices = cached.clone();
        sort_scenarios(&mut vertices);
        return Ok(VertexList {
            vertices,
            dedup_tol: DEDUP_TOL,
        });
    }
    let l = u.dim();
    let k = u.n_rows();
    if l > MAX_DIM {
        return Err(Error::EnumerationGuard(format!(
            "dimension {l} exceeds {MAX_DIM}"
        )));
    }
    if binomial(k, l) > MAX_SUBSETS {
        return Err(Error::EnumerationGuard(format!(
            "choose({k}, {l}) exceeds {MAX_SUBSETS}"
        )));
    }
    if k < l {
        return Err(Error::UnboundedSet { coordinate: 0 });
    }
    for coord in 0..l {
        let mut dir = vec![0.0; l];
        for sign in [1.0, -1.0] {
            dir[coord] = sign;
            u.support(&dir)?; // errors on unbounded or empty sets
        }
    }

    let mut vertices: Vec<Scenario> = Vec::new();
    let mut subset: Vec<usize> = (0..l).collect();
    loop {
        let a = Matrix::from_fn(l, l, |i, j| u.h_mat[(subset[i], j)]);
        let b: Vec<f64> = subset.iter().map(|&i| u.h_vec[i]).collect();
        if let Some(z) = solve_square(&a, &b, 1e-10) {
            if u.contains(&z, 1e-7)
                && !vertices.iter().any(|v| linf_distance(&v.z, &z) <= DEDUP_TOL)
            {
                vertices.push(Scenario::new(z));
            }
        }
        // next L-subset of 0..k in lexicographic order
        let mut advanced = false;
        let mut idx = l;
        while idx > 0 {
            idx -= 1;
            if subset[idx] < idx + k - l {
                subset[idx] += 1;
                for j in idx + 1..l {
                    subset[j] = subset[j - 1] + 1;
                }
                advanced = true;
                break;
            }
        }
        if !advanced {
            break;
        }
    }
    if vertices.is_empty() {
        return Err(Error::EmptySet);
    }
    sort_scenarios(&mut vertices);
    Ok(VertexList {
        vertices,
        dedup_tol: DEDUP_TOL,
    })
}

fn sort_scenarios(vertices: &mut [Scenario]) {
    vertices.sort_by(|a, b| {
        a.z.iter()
            .zip(&b.z)
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| *o != std::cmp::Ordering::Equal)
            .unwrap_or(std::cmp::Ordering::Equal)
    });
}

/// Vertex centroid with its slack certificate `h - H z`.
#[derive(Clone, Debug)]
pub struct InteriorPoint {
    pub point: Scenario,
    pub slacks: Vec<f64>,
}

pub fn interior_point(u: &UncertaintySet) -> Result<InteriorPoint> {
    let vertices = enumerate_vertices(u)?;
    let l = u.dim();
    let mut centroid = vec![0.0; l];
    for v in vertices.iter() {
        for (c, &zi) in centroid.iter_mut().zip(&v.z) {
            *c += zi;
        }
    }
    let n = vertices.len() as f64;
    for c in &mut centroid {
        *c /= n;
    }
    let slacks = u.slacks(&centroid);
    Ok(InteriorPoint {
        point: Scenario::new(centroid),
        slacks,
    })
}

#[derive(Clone, Debug)]
pub struct SimplexWitness {
    pub is_simplex: bool,
    pub vertex_count: usize,
    /// Rank of the vertex difference vectors (tolerance 1e-9).
    pub rank: usize,
}

/// A set is a simplex when it has exactly `L + 1` vertices and their
/// difference vectors span the full dimension.
pub fn is_simplex(u: &UncertaintySet) -> Result<SimplexWitness> {
    let vertices = enumerate_vertices(u)?;
    let l = u.dim();
    let count = vertices.len();
    let rank = if count < 2 {
        0
    } else {
        let base = &vertices.vertices[0].z;
        let diffs: Vec<Vec<f64>> = vertices
            .iter()
            .skip(1)
            .map(|v| v.z.iter().zip(base).map(|(a, b)| a - b).collect())
            .collect();
        Matrix::from_rows(diffs).rank(1e-9)
    };
    Ok(SimplexWitness {
        is_simplex: count == l + 1 && rank == l,
        vertex_count: count,
        rank,
    })
}

const BURN_IN: usize = 100;
const THINNING: usize = 10;

/// Hit-and-run sampler: uniform directions on the sphere, chord bounds by
/// ray-polytope intersection, seeded and deterministic.
pub fn sample_uniform(u: &UncertaintySet, count: usize, seed: u64) -> Result<Vec<Scenario>> {
    let start = interior_point(u)?;
    let l = u.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut current = start.point.z;
    let mut samples = Vec::with_capacity(count);
    let total_steps = BURN_IN + THINNING * count;
    for step in 0..total_steps {
        let dir = random_direction(&mut rng, l);
        let (lo, hi) = chord(u, &current, &dir);
        if hi - lo > 1e-12 {
            // stay strictly inside the chord to keep numerical feasibility
            let margin = 1e-9 * (hi - lo);
            let t = rng.gen_range(lo + margin..hi - margin);
            for (c, &d) in current.iter_mut().zip(&dir) {
                *c += t * d;
            }
        }
        if step >= BURN_IN && (step - BURN_IN) % THINNING == THINNING - 1 {
            samples.push(Scenario::new(current.clone()));
        }
    }
    Ok(samples)
}

fn random_direction(rng: &mut ChaCha8Rng, l: usize) -> Vec<f64> {
    loop {
        // Box-Muller pairs give an isotropic Gaussian; normalize to the sphere.
        let mut dir = Vec::with_capacity(l);
        while dir.len() < l {
            let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
            let u2: f64 = rng.gen_range(0.0..1.0);
            let radius = (-2.0 * u1.ln()).sqrt();
            let angle = 2.0 * std::f64::consts::PI * u2;
            dir.push(radius * angle.cos());
            if dir.len() < l {
                dir.push(radius * angle.sin());
            }
        }
        let norm = dot(&dir, &dir).sqrt();
        if norm > 1e-12 {
            for d in &mut dir {
                *d /= norm;
            }
            return dir;
        }
    }
}

fn chord(u: &UncertaintySet, x: &[f64], dir: &[f64]) -> (f64, f64) {
    let mut lo = f64::NEG_INFINITY;
    let mut hi = f64::INFINITY;
    let slacks = u.slacks(x);
    for (i, row) in u.h_mat.iter_rows().enumerate() {
        let a = dot(row, dir);
        if a > 1e-12 {
            hi = hi.min(slacks[i] / a);
        } else if a < -1e-12 {
            lo = lo.max(slacks[i] / a);
        }
    }
    if !lo.is_finite() || !hi.is_finite() {
        // bounded sets always yield a finite chord; degenerate fallback
        (0.0, 0.0)
    } else {
        (lo, hi)
    }
}
