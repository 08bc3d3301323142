//! Reference implementations used as test oracles.
//!
//! Nothing here calls into the library's Gaussian helpers or update
//! formulas. The normal CDF comes from `statrs`, tilted moments come from
//! adaptive quadrature, and projections, refits and risks are rebuilt with
//! plain dense linear algebra.
#![allow(dead_code)]

use rand::Rng;
use rand_distr::StandardNormal;
use statrs::distribution::{Continuous, ContinuousCDF, Normal};
use voi_learn::{Label, LabeledPoint, Matrix, RiskMatrix, Vector};

pub fn unit_normal() -> Normal {
    Normal::new(0.0, 1.0).unwrap()
}

pub fn cdf(z: f64) -> f64 {
    unit_normal().cdf(z)
}

pub fn pdf(z: f64) -> f64 {
    unit_normal().pdf(z)
}

pub fn vector(xs: &[f64]) -> Vector {
    Vector::from_column_slice(xs)
}

pub fn max_abs_diff(a: &Matrix, b: &Matrix) -> f64 {
    (a - b).abs().max()
}

pub fn max_abs_diff_vec(a: &Vector, b: &Vector) -> f64 {
    (a - b).abs().max()
}

// ---------------------------------------------------------------------------
// quadrature

fn simpson(fa: f64, fm: f64, fb: f64, a: f64, b: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn adaptive_step(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    eps: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(fa, flm, fm, a, m);
    let right = simpson(fm, frm, fb, m, b);
    let diff = left + right - whole;
    if depth == 0 || diff.abs() <= 15.0 * eps {
        return left + right + diff / 15.0;
    }
    adaptive_step(f, a, m, fa, flm, fm, left, 0.5 * eps, depth - 1)
        + adaptive_step(f, m, b, fm, frm, fb, right, 0.5 * eps, depth - 1)
}

/// Adaptive Simpson over `[a, b]`, started from `pieces` equal panels.
pub fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64, eps: f64) -> f64 {
    let pieces = 16;
    let h = (b - a) / pieces as f64;
    (0..pieces)
        .map(|i| {
            let lo = a + h * i as f64;
            let hi = lo + h;
            let (flo, fmid, fhi) = (f(lo), f(0.5 * (lo + hi)), f(hi));
            let whole = simpson(flo, fmid, fhi, lo, hi);
            adaptive_step(f, lo, hi, flo, fmid, fhi, whole, eps / pieces as f64, 40)
        })
        .sum()
}

/// Normaliser, mean and variance of `N(u; mu, var) Ψ(t u)`.
#[derive(Debug, Clone, Copy)]
pub struct TiltedMoments {
    pub z: f64,
    pub mean: f64,
    pub var: f64,
}

pub fn tilted_moments(mu: f64, var: f64, label: Label) -> TiltedMoments {
    let t = label.sign();
    let sd = var.sqrt();
    // Work in y = (u - mu) / sd; the tilted mass sits well inside |y| < 16.
    let weight = |y: f64| pdf(y) * cdf(t * (mu + sd * y));
    // The probit step sits at y = -mu/sd with width 1/sd; pin panel edges
    // around it so the refinement cannot step over it.
    let step = -mu / sd;
    let mut breaks = vec![-16.0, 16.0];
    for k in [-8.0, -2.0, -0.5, 0.0, 0.5, 2.0, 8.0] {
        breaks.push(step + k / sd);
    }
    breaks.retain(|b| (-16.0..=16.0).contains(b));
    breaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let over =
        |f: &dyn Fn(f64) -> f64, eps: f64| -> f64 { breaks.windows(2).map(|w| integrate(f, w[0], w[1], eps)).sum() };
    let coarse = over(&weight, 1e-6);
    let eps = 1e-13 * coarse.abs().max(1e-300);
    let z = over(&weight, eps);
    let m1 = over(&|y| y * weight(y), eps) / z;
    let m2 = over(&|y| (y - m1) * (y - m1) * weight(y), eps) / z;
    TiltedMoments {
        z,
        mean: mu + sd * m1,
        var: var * m2,
    }
}

// ---------------------------------------------------------------------------
// Gaussian posteriors in plain form

#[derive(Debug, Clone)]
pub struct Gaussian {
    pub mean: Vector,
    pub cov: Matrix,
}

impl Gaussian {
    pub fn prior(dim: usize) -> Gaussian {
        Gaussian {
            mean: Vector::zeros(dim),
            cov: Matrix::identity(dim, dim),
        }
    }

    /// Projects `N(mean, cov) Ψ(t wᵀx)` back onto a Gaussian by matching the
    /// moments of the scalar `wᵀx` found by quadrature.
    pub fn project(&self, x: &Vector, label: Label) -> Gaussian {
        let cov_x = &self.cov * x;
        let mu = self.mean.dot(x);
        let var = x.dot(&cov_x);
        let tilted = tilted_moments(mu, var, label);
        let mean = &self.mean + &cov_x * ((tilted.mean - mu) / var);
        let cov = &self.cov - &cov_x * cov_x.transpose() * ((var - tilted.var) / (var * var));
        Gaussian { mean, cov }
    }

    pub fn predictive(&self, x: &Vector) -> f64 {
        let var = x.dot(&(&self.cov * x));
        cdf(self.mean.dot(x) / (1.0 + var).sqrt())
    }
}

/// Risk on `buffer` with the Bayes-point classifier; ties go to the positive class.
pub fn risk(post: &Gaussian, buffer: &[Vector], r: &RiskMatrix) -> f64 {
    buffer
        .iter()
        .map(|b| {
            let p = post.predictive(b);
            if post.mean.dot(b) >= 0.0 {
                r.r21 * (1.0 - p)
            } else {
                r.r12 * p
            }
        })
        .sum()
}

/// EP written directly in natural parameters with a dense inverse per update.
pub fn ep_refit(points: &[LabeledPoint], dim: usize) -> Gaussian {
    let mut sorted: Vec<&LabeledPoint> = points.iter().collect();
    sorted.sort_by_key(|p| p.id);
    let n = sorted.len();
    let mut tau = vec![0.0; n];
    let mut nu = vec![0.0; n];
    let assemble = |tau: &[f64], nu: &[f64]| {
        let mut precision = Matrix::identity(dim, dim);
        let mut shift = Vector::zeros(dim);
        for (i, p) in sorted.iter().enumerate() {
            precision += &p.x * p.x.transpose() * tau[i];
            shift += &p.x * nu[i];
        }
        let cov = precision.try_inverse().expect("precision is invertible");
        let mean = &cov * shift;
        Gaussian { mean, cov }
    };
    let mut post = assemble(&tau, &nu);
    for _ in 0..200 {
        let mut change: f64 = 0.0;
        for i in 0..n {
            let x = &sorted[i].x;
            let var = x.dot(&(&post.cov * x));
            let mu = post.mean.dot(x);
            let cav_tau = 1.0 / var - tau[i];
            let cav_nu = mu / var - nu[i];
            let tilted = tilted_moments(cav_nu / cav_tau, 1.0 / cav_tau, sorted[i].label);
            let new_tau = 1.0 / tilted.var - cav_tau;
            let new_nu = tilted.mean / tilted.var - cav_nu;
            change = change.max((new_tau - tau[i]).abs()).max((new_nu - nu[i]).abs());
            tau[i] = new_tau;
            nu[i] = new_nu;
            post = assemble(&tau, &nu);
        }
        if change < 1e-10 {
            break;
        }
    }
    post
}

/// Posterior moments of `N(0, I) Π Ψ(t wᵀx)` over a square grid in 2-D.
pub fn grid_posterior(points: &[(Vector, Label)], half_width: f64, n: usize) -> Gaussian {
    let h = 2.0 * half_width / (n - 1) as f64;
    let mut mass = 0.0;
    let mut first = Vector::zeros(2);
    let mut second = Matrix::zeros(2, 2);
    for i in 0..n {
        let a = -half_width + h * i as f64;
        for j in 0..n {
            let b = -half_width + h * j as f64;
            let mut w = (-0.5 * (a * a + b * b)).exp();
            for (x, label) in points {
                w *= cdf(label.sign() * (a * x[0] + b * x[1]));
            }
            mass += w;
            first[0] += w * a;
            first[1] += w * b;
            second[(0, 0)] += w * a * a;
            second[(0, 1)] += w * a * b;
            second[(1, 1)] += w * b * b;
        }
    }
    let mean = first / mass;
    second[(1, 0)] = second[(0, 1)];
    let cov = second / mass - &mean * mean.transpose();
    Gaussian { mean, cov }
}

/// `P(wᵀx + ε > 0)` by sampling `w ~ N(mean, cov)` and `ε ~ N(0, 1)`.
pub fn monte_carlo_predictive<R: Rng>(post: &Gaussian, x: &Vector, samples: usize, rng: &mut R) -> f64 {
    let dim = post.mean.len();
    let chol = post.cov.clone().cholesky().expect("covariance is positive definite");
    let l = chol.l();
    let lt_x = l.transpose() * x;
    let mean_margin = post.mean.dot(x);
    let mut hits = 0usize;
    let mut z = vec![0.0; dim];
    for _ in 0..samples {
        for zi in z.iter_mut() {
            *zi = rng.sample(StandardNormal);
        }
        let noise: f64 = rng.sample(StandardNormal);
        let margin = mean_margin + lt_x.iter().zip(&z).map(|(a, b)| a * b).sum::<f64>();
        if margin + noise > 0.0 {
            hits += 1;
        }
    }
    hits as f64 / samples as f64
}

// ---------------------------------------------------------------------------
// value of information, recomputed from scratch

pub struct VoiCase {
    pub post: Gaussian,
    pub buffer: Vec<Vector>,
    pub risk: RiskMatrix,
}

impl VoiCase {
    pub fn j(&self, post: &Gaussian) -> f64 {
        risk(post, &self.buffer, &self.risk)
    }

    pub fn vop(&self, x: &Vector, k_horiz: f64, cost_pos: f64, cost_neg: f64) -> f64 {
        let p = self.post.predictive(x);
        let j = self.j(&self.post);
        let j_pos = self.j(&self.post.project(x, Label::Positive));
        let j_neg = self.j(&self.post.project(x, Label::Negative));
        let delta = (j - (p * j_pos + (1.0 - p) * j_neg)) / self.buffer.len() as f64;
        k_horiz * delta - (p * cost_pos + (1.0 - p) * cost_neg)
    }

    pub fn vor(&self, point: &LabeledPoint) -> f64 {
        self.j(&self.post) - self.j(&self.post.project(&point.x, point.label))
    }
}

/// `J(all active) - J(active without point id)`, both by full refit.
pub fn vof_by_refit(active: &[LabeledPoint], id: u64, buffer: &[Vector], r: &RiskMatrix, dim: usize) -> f64 {
    let full = ep_refit(active, dim);
    let rest: Vec<LabeledPoint> = active.iter().filter(|p| p.id != id).cloned().collect();
    let without = ep_refit(&rest, dim);
    risk(&full, buffer, r) - risk(&without, buffer, r)
}

// ---------------------------------------------------------------------------
// random inputs

pub fn random_vector<R: Rng>(rng: &mut R, dim: usize, scale: f64) -> Vector {
    Vector::from_fn(dim, |_, _| scale * rng.sample::<f64, _>(StandardNormal))
}

/// Feature vector with a trailing bias coordinate of 1.
pub fn random_augmented<R: Rng>(rng: &mut R, features: usize, scale: f64) -> Vector {
    let mut x = random_vector(rng, features + 1, scale);
    x[features] = 1.0;
    x
}

pub fn random_label<R: Rng>(rng: &mut R) -> Label {
    if rng.random_bool(0.5) {
        Label::Positive
    } else {
        Label::Negative
    }
}

/// Labels follow a hidden linear rule with occasional flips, so posteriors
/// look like the ones a stream produces.
pub fn random_points<R: Rng>(rng: &mut R, n: usize, first_id: u64, features: usize) -> Vec<LabeledPoint> {
    let truth = random_vector(rng, features + 1, 1.0);
    (0..n)
        .map(|i| {
            let x = random_augmented(rng, features, 1.5);
            let mut label = Label::from_sign(truth.dot(&x));
            if rng.random_bool(0.15) {
                label = if label == Label::Positive {
                    Label::Negative
                } else {
                    Label::Positive
                };
            }
            LabeledPoint::new(first_id + i as u64, x, label)
        })
        .collect()
}
