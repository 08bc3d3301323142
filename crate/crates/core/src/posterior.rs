//! Gaussian posterior over linear classifier weights.
//!
//! The prior is `N(0, I)` and each labeled point contributes a probit
//! likelihood `Ψ(t wᵀx)`. Every likelihood is approximated by a Gaussian site
//! along its projection `u = wᵀx`,
//!
//! ```text
//! q(w) = s · exp(-(t·wᵀx - m)² / (2v))
//! ```
//!
//! so the posterior is always `prior × Π sites`. Adding a point is one
//! moment-matching projection (ADF); removing a point divides its site back
//! out, which yields the leave-one-out (cavity) posterior without refitting.
//! [`fit_ep`] iterates the same remove/project/replace step over all points
//! until the sites stop moving.

use std::collections::BTreeMap;

use crate::gaussian::probit_moments;
use crate::{Error, Label, Matrix, PointId, Result, Vector};

/// Cavities with `|v - xᵀΣx|` below this are treated as singular.
const CAVITY_EPS: f64 = 1e-12;
const JITTER: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledPoint {
    pub id: PointId,
    pub x: Vector,
    pub label: Label,
}

impl LabeledPoint {
    pub fn new(id: PointId, x: Vector, label: Label) -> Self {
        LabeledPoint { id, x, label }
    }
}

/// Parameters `(s, m, v)` of one Gaussian site.
///
/// An uninitialized site has infinite variance and contributes nothing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SiteParams {
    /// `ln s`.
    pub log_scale: f64,
    pub m: f64,
    pub v: f64,
}

impl SiteParams {
    pub const UNINITIALIZED: SiteParams = SiteParams {
        log_scale: 0.0,
        m: 0.0,
        v: f64::INFINITY,
    };

    pub fn is_initialized(&self) -> bool {
        self.v.is_finite()
    }

    pub fn scale(&self) -> f64 {
        self.log_scale.exp()
    }

    /// Site precision along the projection, `1/v`.
    pub fn precision(&self) -> f64 {
        if self.is_initialized() {
            1.0 / self.v
        } else {
            0.0
        }
    }

    /// Site mean of `u = wᵀx` (not of `t·u`).
    fn projection_mean(&self, label: Label) -> f64 {
        label.sign() * self.m
    }

    fn from_natural(precision: f64, shift: f64, log_scale: f64, label: Label) -> SiteParams {
        if precision > 0.0 {
            SiteParams {
                log_scale,
                m: label.sign() * shift / precision,
                v: 1.0 / precision,
            }
        } else {
            SiteParams::UNINITIALIZED
        }
    }
}

/// A site together with the point it approximates.
#[derive(Debug, Clone, PartialEq)]
pub struct Site {
    pub point: LabeledPoint,
    pub params: SiteParams,
}

/// `N(mean, cov)` over the weights, plus the sites that produced it.
///
/// Values are immutable snapshots; every update returns a new posterior.
#[derive(Debug, Clone, PartialEq)]
pub struct Posterior {
    mean: Vector,
    cov: Matrix,
    sites: BTreeMap<PointId, Site>,
}

impl Posterior {
    /// The spherical prior `N(0, I)`.
    pub fn prior(dim: usize) -> Result<Posterior> {
        if dim < 1 {
            return Err(Error::InvalidDimension(dim));
        }
        Ok(Posterior {
            mean: Vector::zeros(dim),
            cov: Matrix::identity(dim, dim),
            sites: BTreeMap::new(),
        })
    }

    /// Rebuilds `prior × Π sites` in precision form.
    pub fn from_sites(dim: usize, sites: impl IntoIterator<Item = Site>) -> Result<Posterior> {
        let mut prior = Posterior::prior(dim)?;
        let mut precision = Matrix::identity(dim, dim);
        let mut shift = Vector::zeros(dim);
        for site in sites {
            check_dim(dim, &site.point.x)?;
            if prior.sites.contains_key(&site.point.id) {
                return Err(Error::DuplicatePoint(site.point.id));
            }
            let tau = site.params.precision();
            if tau > 0.0 {
                let x = &site.point.x;
                precision.ger(tau, x, x, 1.0);
                shift.axpy(tau * site.params.projection_mean(site.point.label), x, 1.0);
            }
            prior.sites.insert(site.point.id, site);
        }
        let chol = nalgebra::Cholesky::new(precision)
            .ok_or_else(|| Error::InvalidConfig("site precision is not positive definite".into()))?;
        prior.cov = stabilize(chol.inverse());
        prior.mean = &prior.cov * shift;
        Ok(prior)
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn mean(&self) -> &Vector {
        &self.mean
    }

    pub fn cov(&self) -> &Matrix {
        &self.cov
    }

    pub fn sites(&self) -> &BTreeMap<PointId, Site> {
        &self.sites
    }

    pub fn site(&self, id: PointId) -> Option<&Site> {
        self.sites.get(&id)
    }

    /// Mean and variance of `u = wᵀx`.
    pub fn project(&self, x: &Vector) -> Result<(f64, f64)> {
        check_dim(self.dim(), x)?;
        Ok((self.mean.dot(x), (&self.cov * x).dot(x)))
    }

    /// `w̄ᵀx`.
    pub fn margin(&self, x: &Vector) -> Result<f64> {
        check_dim(self.dim(), x)?;
        Ok(self.mean.dot(x))
    }

    /// `p(+1 | x) = Ψ(w̄ᵀx / sqrt(xᵀΣx + 1))`.
    pub fn predictive_prob(&self, x: &Vector) -> Result<f64> {
        let (mu, var) = self.project(x)?;
        Ok(crate::gaussian::std_normal_cdf(mu / (var + 1.0).sqrt()))
    }

    /// Bayes-point classification `sign(w̄ᵀx)`; a zero margin classifies as +1.
    pub fn classify(&self, x: &Vector) -> Result<Label> {
        Ok(Label::from_sign(self.margin(x)?))
    }

    /// Projects `self × Ψ(t wᵀx)` back to a Gaussian and records the site.
    pub fn adf_update(&self, point: &LabeledPoint) -> Result<Posterior> {
        check_dim(self.dim(), &point.x)?;
        if self.sites.contains_key(&point.id) {
            return Err(Error::DuplicatePoint(point.id));
        }
        let cov_x = &self.cov * &point.x;
        let mu = self.mean.dot(&point.x);
        let var = cov_x.dot(&point.x);
        let moments = probit_moments(mu, var, point.label)?;

        let mut mean = self.mean.clone();
        mean.axpy(moments.alpha, &cov_x, 1.0);
        let mut cov = self.cov.clone();
        cov.ger(-moments.beta, &cov_x, &cov_x, 1.0);

        let params = if moments.beta > 0.0 {
            // Quotient of the matched Gaussian by the old projection:
            // v = 1/beta - var, site mean = mu + alpha/beta.
            let v = (1.0 / moments.beta - var).max(f64::MIN_POSITIVE);
            let site_mean = mu + moments.alpha / moments.beta;
            let log_scale =
                moments.log_partition + 0.5 * ((v + var) / v).ln() + (mu - site_mean).powi(2) / (2.0 * (v + var));
            SiteParams {
                log_scale,
                m: point.label.sign() * site_mean,
                v,
            }
        } else {
            SiteParams::UNINITIALIZED
        };

        let mut sites = self.sites.clone();
        sites.insert(
            point.id,
            Site {
                point: point.clone(),
                params,
            },
        );
        Ok(Posterior {
            mean,
            cov: stabilize(cov),
            sites,
        })
    }

    /// Divides site `id` out of the posterior, returning the cavity and the removed site.
    pub fn downdate_site(&self, id: PointId) -> Result<(Posterior, Site)> {
        let site = self.sites.get(&id).ok_or(Error::UnknownSite(id))?;
        let (mean, cov) = divide_site(&self.mean, &self.cov, site).ok_or(Error::NearSingularCavity(id))?;
        let mut sites = self.sites.clone();
        let removed = sites.remove(&id).expect("site present");
        Ok((Posterior { mean, cov, sites }, removed))
    }

    /// Multiplies a previously removed site back in.
    pub fn restore_site(&self, site: Site) -> Result<Posterior> {
        check_dim(self.dim(), &site.point.x)?;
        if self.sites.contains_key(&site.point.id) {
            return Err(Error::DuplicatePoint(site.point.id));
        }
        let (mean, cov) = multiply_site(
            &self.mean,
            &self.cov,
            &site.point.x,
            site.params.precision(),
            site.params.precision() * site.params.projection_mean(site.point.label),
        );
        let mut sites = self.sites.clone();
        sites.insert(site.point.id, site);
        Ok(Posterior { mean, cov, sites })
    }
}

fn check_dim(dim: usize, x: &Vector) -> Result<()> {
    if x.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: x.len(),
        });
    }
    Ok(())
}

/// Symmetrizes and, if Cholesky fails, adds diagonal jitter until it succeeds.
fn stabilize(cov: Matrix) -> Matrix {
    let mut cov = (&cov + cov.transpose()) * 0.5;
    let mut jitter = JITTER;
    for _ in 0..12 {
        if nalgebra::Cholesky::new(cov.clone()).is_some() {
            break;
        }
        for i in 0..cov.nrows() {
            cov[(i, i)] += jitter;
        }
        jitter *= 10.0;
    }
    cov
}

/// Leave-one-out moments:
/// `Σ' = Σ + (Σx)(v - xᵀΣx)⁻¹(Σx)ᵀ`, `w̄' = w̄ + (Σ'x) v⁻¹ (w̄ᵀx - t·m)`.
fn divide_site(mean: &Vector, cov: &Matrix, site: &Site) -> Option<(Vector, Matrix)> {
    if !site.params.is_initialized() {
        return Some((mean.clone(), cov.clone()));
    }
    let x = &site.point.x;
    let v = site.params.v;
    let cov_x = cov * x;
    let denom = v - cov_x.dot(x);
    if denom.abs() < CAVITY_EPS {
        return None;
    }
    let mut cavity_cov = cov.clone();
    cavity_cov.ger(1.0 / denom, &cov_x, &cov_x, 1.0);
    let cavity_cov = stabilize(cavity_cov);
    let residual = mean.dot(x) - site.params.projection_mean(site.point.label);
    let mut cavity_mean = mean.clone();
    cavity_mean.axpy(residual / v, &(&cavity_cov * x), 1.0);
    Some((cavity_mean, cavity_cov))
}

/// Multiplies in a site with projection precision `tau` and precision-mean `nu`.
fn multiply_site(mean: &Vector, cov: &Matrix, x: &Vector, tau: f64, nu: f64) -> (Vector, Matrix) {
    if tau <= 0.0 {
        return (mean.clone(), cov.clone());
    }
    let cov_x = cov * x;
    let var = cov_x.dot(x);
    let mu = mean.dot(x);
    let denom = 1.0 + tau * var;
    let mut new_mean = mean.clone();
    new_mean.axpy((nu - tau * mu) / denom, &cov_x, 1.0);
    let mut new_cov = cov.clone();
    new_cov.ger(-tau / denom, &cov_x, &cov_x, 1.0);
    (new_mean, stabilize(new_cov))
}

/// Settings for [`fit_ep`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpOptions {
    /// Largest site change (in natural parameters) accepted as converged.
    pub tolerance: f64,
    pub max_sweeps: usize,
    /// Step size in `(0, 1]`; `1.0` means no damping.
    pub damping: f64,
}

impl Default for EpOptions {
    fn default() -> Self {
        EpOptions {
            tolerance: 1e-6,
            max_sweeps: 50,
            damping: 1.0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct EpFit {
    pub posterior: Posterior,
    pub converged: bool,
    pub sweeps: usize,
}

/// Expectation propagation over `points`, swept in ascending id order.
///
/// Hitting the sweep cap is not an error; check [`EpFit::converged`].
pub fn fit_ep(points: &[LabeledPoint], dim: usize, options: &EpOptions) -> Result<EpFit> {
    let prior = Posterior::prior(dim)?;
    if !(options.damping > 0.0 && options.damping <= 1.0) {
        return Err(Error::InvalidConfig(format!(
            "damping must lie in (0, 1], got {}",
            options.damping
        )));
    }
    let mut sorted: Vec<&LabeledPoint> = points.iter().collect();
    sorted.sort_by_key(|p| p.id);
    for pair in sorted.windows(2) {
        if pair[0].id == pair[1].id {
            return Err(Error::DuplicatePoint(pair[0].id));
        }
    }
    for p in &sorted {
        check_dim(dim, &p.x)?;
    }
    if sorted.is_empty() {
        return Ok(EpFit {
            posterior: prior,
            converged: true,
            sweeps: 0,
        });
    }

    let n = sorted.len();
    let mut tau = vec![0.0; n];
    let mut nu = vec![0.0; n];
    let mut log_scale = vec![0.0; n];
    let mut mean = prior.mean.clone();
    let mut cov = prior.cov.clone();
    let mut converged = false;
    let mut sweeps = 0;

    while sweeps < options.max_sweeps {
        sweeps += 1;
        let mut max_change: f64 = 0.0;
        for (i, point) in sorted.iter().enumerate() {
            let x = &point.x;
            let (cav_mean, cav_cov) = if tau[i] > 0.0 {
                let site = Site {
                    point: (*point).clone(),
                    params: SiteParams::from_natural(tau[i], nu[i], log_scale[i], point.label),
                };
                match divide_site(&mean, &cov, &site) {
                    Some(cavity) => cavity,
                    None => continue,
                }
            } else {
                (mean.clone(), cov.clone())
            };
            let cov_x = &cav_cov * x;
            let mu = cav_mean.dot(x);
            let var = cov_x.dot(x);
            let moments = probit_moments(mu, var, point.label)?;

            let (tau_new, nu_new, ls_new) = if moments.beta > 0.0 {
                let v = (1.0 / moments.beta - var).max(f64::MIN_POSITIVE);
                let site_mean = mu + moments.alpha / moments.beta;
                let ls =
                    moments.log_partition + 0.5 * ((v + var) / v).ln() + (mu - site_mean).powi(2) / (2.0 * (v + var));
                (1.0 / v, site_mean / v, ls)
            } else {
                (0.0, 0.0, 0.0)
            };
            let d = options.damping;
            let tau_d = d * tau_new + (1.0 - d) * tau[i];
            let nu_d = d * nu_new + (1.0 - d) * nu[i];
            max_change = max_change.max((tau_d - tau[i]).abs()).max((nu_d - nu[i]).abs());
            tau[i] = tau_d;
            nu[i] = nu_d;
            log_scale[i] = ls_new;
            (mean, cov) = multiply_site(&cav_mean, &cav_cov, x, tau_d, nu_d);
        }

        let rebuilt = Posterior::from_sites(dim, site_list(&sorted, &tau, &nu, &log_scale))?;
        mean = rebuilt.mean;
        cov = rebuilt.cov;
        if max_change < options.tolerance {
            converged = true;
            break;
        }
    }

    Ok(EpFit {
        posterior: Posterior::from_sites(dim, site_list(&sorted, &tau, &nu, &log_scale))?,
        converged,
        sweeps,
    })
}

fn site_list(points: &[&LabeledPoint], tau: &[f64], nu: &[f64], log_scale: &[f64]) -> Vec<Site> {
    points
        .iter()
        .enumerate()
        .map(|(i, p)| Site {
            point: (*p).clone(),
            params: SiteParams::from_natural(tau[i], nu[i], log_scale[i], p.label),
        })
        .collect()
}
