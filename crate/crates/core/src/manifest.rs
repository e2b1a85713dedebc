//! Experiment manifests: what to run, on which grids, from which datum.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::asymptotics::TimeDirection;
use crate::error::{Error, Result};
use crate::experiments::{Datum, Perturbation};
use crate::flow::Convention;
use crate::integrator::IntegratorConfig;
use crate::io::load_field;
use crate::types::{RealGrid, SolitonParams};
use crate::C64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    Scatter,
    Reconstruct,
    Roundtrip,
    BacklundPipeline,
    AsymptoticStability,
    RadiationDecay,
    ValidateAll,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grids {
    /// Grid on which the datum is sampled and scattered.
    pub x: RealGrid,
    pub z: RealGrid,
    /// Grid of split-step runs; defaults to `x`.
    #[serde(default)]
    pub pde: Option<RealGrid>,
}

impl Grids {
    pub fn pde(&self) -> RealGrid {
        self.pde.unwrap_or(self.x)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PerturbationSpec {
    Bump(Perturbation),
    /// A bump with shape drawn from the manifest seed.
    Random { epsilon: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum InitialDatum {
    Sech {
        amplitude: f64,
        #[serde(default)]
        frequency: f64,
    },
    Soliton {
        omega: f64,
        #[serde(default)]
        gamma: f64,
        #[serde(default)]
        v: f64,
        #[serde(default)]
        x0: f64,
        #[serde(default)]
        perturbation: Option<PerturbationSpec>,
    },
    /// Samples in a field file (binary or `.csv`), relative to the manifest.
    File { path: PathBuf },
}

/// Tolerance names accepted in a manifest, with their defaults.
pub const TOLERANCES: [(&str, f64); 9] = [
    ("eigenvalue", 1e-6),
    ("reflection_sup", 1e-5),
    ("roundtrip_linf", 1e-4),
    ("pipeline_linf", 5e-3),
    ("slope_halfwidth", 0.1),
    ("unitarity", 1e-7),
    ("mass_drift", 1e-10),
    ("sup_variation", 0.2),
    ("radiation_exponent", -0.6),
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentManifest {
    pub kind: ExperimentKind,
    pub grids: Grids,
    pub initial_datum: InitialDatum,
    #[serde(default)]
    pub times: Vec<f64>,
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
    #[serde(default)]
    pub integrator: IntegratorConfig,
    pub output_dir: PathBuf,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub convention: Convention,
    #[serde(default = "forward")]
    pub direction: TimeDirection,
    /// Comparison window in `x`; defaults to `[-10, 10]`.
    #[serde(default)]
    pub window: Option<(f64, f64)>,
    /// Spectral data file used instead of scattering the datum.
    #[serde(default)]
    pub spectral: Option<PathBuf>,
}

fn forward() -> TimeDirection {
    TimeDirection::Forward
}

impl ExperimentManifest {
    /// Parse and check a manifest; relative paths are resolved against `base`.
    pub fn from_json(text: &str, base: &Path) -> Result<Self> {
        let mut m: Self = serde_json::from_str(text).map_err(|e| Error::Manifest(e.to_string()))?;
        let resolve = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        resolve(&mut m.output_dir);
        if let InitialDatum::File { path } = &mut m.initial_datum {
            resolve(path);
        }
        if let Some(p) = m.spectral.as_mut() {
            resolve(p);
        }
        m.validate()?;
        Ok(m)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::Manifest(format!("{}: {e}", path.display())))?;
        Self::from_json(&text, path.parent().unwrap_or(Path::new(".")))
    }

    pub fn validate(&self) -> Result<()> {
        for name in self.tolerances.keys() {
            if !TOLERANCES.iter().any(|(n, _)| n == name) {
                let known: Vec<&str> = TOLERANCES.iter().map(|t| t.0).collect();
                return Err(Error::Manifest(format!("unknown tolerance {name:?}; known: {}", known.join(", "))));
            }
        }
        if let Some((name, v)) = self.tolerances.iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::Manifest(format!("tolerance {name} = {v} is not finite")));
        }
        for p in [self.file_path(), self.spectral.as_deref()].into_iter().flatten() {
            if !p.exists() {
                return Err(Error::Manifest(format!("referenced file {} does not exist", p.display())));
            }
        }
        if self.times.iter().any(|t| !t.is_finite()) {
            return Err(Error::Manifest("times must be finite".into()));
        }
        if let Some((a, b)) = self.window {
            if !(a < b) {
                return Err(Error::Manifest(format!("window [{a}, {b}] is empty")));
            }
        }
        self.integrator.validate().map_err(|e| Error::Manifest(format!("integrator: {e}")))?;
        Ok(())
    }

    fn file_path(&self) -> Option<&Path> {
        match &self.initial_datum {
            InitialDatum::File { path } => Some(path),
            _ => None,
        }
    }

    pub fn tolerance(&self, name: &str) -> f64 {
        self.tolerances
            .get(name)
            .copied()
            .or_else(|| TOLERANCES.iter().find(|(n, _)| *n == name).map(|t| t.1))
            .unwrap_or_else(|| panic!("tolerance {name} is not registered"))
    }

    pub fn window(&self) -> (f64, f64) {
        self.window.unwrap_or((-10.0, 10.0))
    }

    pub fn datum(&self) -> Result<Datum> {
        Ok(match &self.initial_datum {
            InitialDatum::Sech { amplitude, frequency } => Datum::Sech { amplitude: *amplitude, frequency: *frequency },
            InitialDatum::Soliton { omega, gamma, v, x0, perturbation } => Datum::Soliton {
                params: SolitonParams::new(*omega, *gamma, *v, *x0)?,
                perturbation: perturbation.as_ref().map(|p| match p {
                    PerturbationSpec::Bump(b) => *b,
                    PerturbationSpec::Random { epsilon } => Perturbation::random(*epsilon, self.seed),
                }),
            },
            InitialDatum::File { path } => Datum::Samples(load_field(path)?),
        })
    }

    /// The eigenvalue of an unperturbed soliton datum.
    pub fn exact_eigenvalue(&self) -> Option<C64> {
        match &self.initial_datum {
            InitialDatum::Soliton { omega, v, perturbation: None, .. } => Some(C64::new(-v / 2.0, omega / 2.0)),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TEXT: &str = r#"{
        "kind": "scatter",
        "grids": {"x": {"x_min": -30, "x_max": 30, "n_points": 1025}, "z": {"x_min": -4, "x_max": 4, "n_points": 81}},
        "initial_datum": {"type": "soliton", "omega": 1.0, "perturbation": {"kind": "random", "epsilon": 0.02}},
        "output_dir": "out",
        "seed": 11
    }"#;

    #[test]
    fn parses_with_defaults() {
        let m = ExperimentManifest::from_json(TEXT, Path::new("/tmp/base")).unwrap();
        assert_eq!(m.output_dir, PathBuf::from("/tmp/base/out"));
        assert_eq!(m.tolerance("eigenvalue"), 1e-6);
        assert_eq!(m.convention, Convention::PaperR);
        assert_eq!(m.window(), (-10.0, 10.0));
        let Datum::Soliton { perturbation: Some(p), .. } = m.datum().unwrap() else { panic!() };
        assert_eq!(p, Perturbation::random(0.02, 11));
    }

    #[test]
    fn unknown_tolerance_is_rejected() {
        let text = TEXT.replace("\"seed\": 11", "\"seed\": 11, \"tolerances\": {\"wobble\": 1.0}");
        assert!(matches!(ExperimentManifest::from_json(&text, Path::new(".")), Err(Error::Manifest(_))));
    }

    #[test]
    fn missing_file_is_rejected() {
        let text = TEXT.replace(
            r#"{"type": "soliton", "omega": 1.0, "perturbation": {"kind": "random", "epsilon": 0.02}}"#,
            r#"{"type": "file", "path": "nowhere.bin"}"#,
        );
        assert!(matches!(ExperimentManifest::from_json(&text, Path::new("/nonexistent")), Err(Error::Manifest(_))));
    }

    #[test]
    fn bad_grid_is_rejected() {
        let text = TEXT.replace("\"n_points\": 81", "\"n_points\": 1");
        assert!(ExperimentManifest::from_json(&text, Path::new(".")).is_err());
    }
}
