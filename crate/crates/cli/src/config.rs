//! Run configuration: a JSON document, overridden field by field by flags,
//! echoed next to every output.

use std::path::Path;

use anyhow::Context;
use lens_torsion::geometry::{make_perturbed_domain, make_symmetric_cap, DomainSpec, PerturbationProfile};
use lens_torsion::identities::CertificateOptions;
use lens_torsion::stability::{SweepConfig, Theorem, TheoremParams};
use lens_torsion::GeometryError;
use serde::{Deserialize, Serialize};

/// Polygonal fixtures available to the geometry command besides lenses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Fixture {
    Lens,
    Slit,
    Dumbbell,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub dimension: usize,
    pub radius: f64,
    /// Horizontal offset z' of the cap center; empty means zero.
    pub azimuth: Vec<f64>,
    /// Bump amplitude ε of the solved domain.
    pub amplitude: f64,
    pub cone_theta: Option<f64>,
    pub cone_a: Option<f64>,
    pub inner_radius: Option<f64>,
    /// A complete domain, taking precedence over the cap parameters.
    pub domain: Option<DomainSpec>,
    pub fixture: Fixture,
    /// Mesh size; each command has its own default when unset.
    pub h: Option<f64>,
    pub refine: usize,
    pub eps: Vec<f64>,
    pub tol: f64,
    pub eta: f64,
    pub theorems: Vec<Theorem>,
    pub require_cone: bool,
    pub certificate: CertificateOptions,
}

impl Default for RunConfig {
    fn default() -> Self {
        let sweep = SweepConfig::default();
        RunConfig {
            dimension: 2,
            radius: 1.0,
            azimuth: Vec::new(),
            amplitude: 0.0,
            cone_theta: None,
            cone_a: None,
            inner_radius: None,
            domain: None,
            fixture: Fixture::Lens,
            h: None,
            refine: sweep.refinements,
            eps: sweep.eps,
            tol: 1e-8,
            eta: TheoremParams::default().eta,
            theorems: Theorem::ALL.to_vec(),
            require_cone: false,
            certificate: CertificateOptions::default(),
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }

    pub fn z_prime(&self) -> Vec<f64> {
        if self.azimuth.is_empty() {
            vec![0.0; self.dimension.saturating_sub(1)]
        } else {
            self.azimuth.clone()
        }
    }

    pub fn h_or(&self, default: f64) -> f64 {
        self.h.unwrap_or(default)
    }

    /// The unperturbed cap, or the configured domain with its perturbation removed.
    pub fn base_domain(&self) -> Result<DomainSpec, GeometryError> {
        let mut spec = match &self.domain {
            Some(d) => {
                let mut d = d.clone();
                d.perturbation = PerturbationProfile::identity();
                d
            }
            None => make_symmetric_cap(self.dimension, self.radius, &self.z_prime())?,
        };
        if let Some(t) = self.cone_theta {
            spec.cone_theta = t;
        }
        if let Some(a) = self.cone_a {
            spec.cone_a = a;
        }
        if self.inner_radius.is_some() {
            spec.inner_radius = self.inner_radius;
        }
        spec.validate()?;
        Ok(spec)
    }

    /// Perturbation shape of sweeps: the configured one, else a bump over Σ.
    pub fn profile(&self, base: &DomainSpec) -> PerturbationProfile {
        match &self.domain {
            Some(d) if d.perturbation.shape != lens_torsion::geometry::ProfileShape::Identity => d.perturbation,
            _ => PerturbationProfile::bump(base.sigma_window()),
        }
    }

    /// The domain to solve: the configured one verbatim, else the cap bumped by `amplitude`.
    pub fn domain_spec(&self) -> Result<DomainSpec, GeometryError> {
        if let (Some(d), None, None, None) = (&self.domain, self.cone_theta, self.cone_a, self.inner_radius) {
            d.validate()?;
            return Ok(d.clone());
        }
        let base = self.base_domain()?;
        let mut spec = if self.amplitude == 0.0 {
            base.clone()
        } else {
            make_perturbed_domain(&base, self.amplitude, &self.profile(&base))?
        };
        if let Some(d) = &self.domain {
            if self.amplitude == 0.0 && !d.perturbation.is_identity() {
                spec = make_perturbed_domain(&base, d.perturbation.amplitude, &d.perturbation)?;
            }
        }
        Ok(spec)
    }

    pub fn sweep_config(&self, h_default: f64) -> SweepConfig {
        SweepConfig {
            h_target: self.h_or(h_default),
            refinements: self.refine,
            eps: self.eps.clone(),
            certificate: self.certificate.clone(),
        }
    }

    pub fn theorem_params(&self) -> TheoremParams {
        TheoremParams {
            dimension: self.dimension,
            eta: self.eta,
        }
    }
}

/// Parses a comma-separated list of reals; the empty string is the empty list.
pub fn parse_list(s: &str) -> anyhow::Result<Vec<f64>> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<f64>().with_context(|| format!("not a number: {t:?}")))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use lens_torsion::stability::log_spaced;

    #[test]
    fn lists_parse() {
        assert_eq!(parse_list("0.1, 0.2,0.3").unwrap(), vec![0.1, 0.2, 0.3]);
        assert!(parse_list("").unwrap().is_empty());
        assert!(parse_list("0.1,x").is_err());
    }

    #[test]
    fn config_round_trip_and_defaults() {
        let c = RunConfig::default();
        assert_eq!(c.eps, log_spaced(0.005, 0.16, 6));
        let back: RunConfig = serde_json::from_str(&serde_json::to_string(&c).unwrap()).unwrap();
        assert_eq!(back, c);
        let partial: RunConfig = serde_json::from_str(r#"{"radius": 0.5}"#).unwrap();
        assert_eq!(partial.radius, 0.5);
        assert_eq!(partial.dimension, 2);
        assert!(serde_json::from_str::<RunConfig>(r#"{"radious": 0.5}"#).is_err());
    }

    #[test]
    fn domains_from_parameters() {
        let mut c = RunConfig::default();
        let base = c.domain_spec().unwrap();
        assert!((base.cap_center[1] - 2f64.sqrt()).abs() < 1e-15);
        c.amplitude = 0.1;
        let p = c.domain_spec().unwrap();
        assert_eq!(p.perturbation.amplitude, 0.1);
        let mut inline = RunConfig { domain: Some(p.clone()), ..RunConfig::default() };
        assert_eq!(inline.domain_spec().unwrap(), p);
        assert!(inline.base_domain().unwrap().perturbation.is_identity());
        inline.cone_a = Some(0.05);
        let q = inline.domain_spec().unwrap();
        assert_eq!((q.cone_a, q.perturbation.amplitude), (0.05, 0.1));
        c.radius = -1.0;
        assert!(c.domain_spec().is_err());
    }
}
