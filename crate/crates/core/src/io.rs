//! JSON documents for design descriptions and weight banks.
//!
//! Weights are stored as `[re, im]` pairs in stacked order (x dipoles, then
//! y dipoles). Floats are written with the shortest decimal form that parses
//! back to the identical `f64`, so a bank survives a save/load cycle bit for
//! bit.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::modulation::SymbolIndex;
use crate::steering::{element_count_for_aperture, phi_cut, ArrayGeometry, Direction, PolarizationState};
use crate::synthesis::{DesignSpec, WeightSet};
use crate::Complex64;

/// Seed of the built-in demonstration design.
pub const DEMO_SEED: u64 = 20_170_905;

/// Format tag written into every bank file.
pub const BANK_FORMAT: &str = "xpol-dm-bank/1";

/// Array layout. Either explicit positions, or a uniform spacing with an
/// element count and/or an aperture (count wins when both are present).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct ArrayDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub positions_wavelengths: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spacing_wavelengths: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub aperture_wavelengths: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub element_count: Option<usize>,
}

impl ArrayDocument {
    pub fn to_geometry(&self) -> Result<ArrayGeometry<f64>> {
        if let Some(p) = &self.positions_wavelengths {
            if self.spacing_wavelengths.is_some() || self.aperture_wavelengths.is_some() {
                return Err(Error::invalid(
                    "positions_wavelengths",
                    "give either explicit positions or a uniform spacing, not both",
                ));
            }
            if let Some(n) = self.element_count {
                if n != p.len() {
                    return Err(Error::invalid(
                        "element_count",
                        format!("{n} disagrees with {} explicit positions", p.len()),
                    ));
                }
            }
            return ArrayGeometry::new(p.clone()).map_err(|e| rename(e, "positions_wavelengths"));
        }
        let spacing = self.spacing_wavelengths.ok_or_else(|| {
            Error::invalid("spacing_wavelengths", "required unless positions_wavelengths is given")
        })?;
        let count = match (self.element_count, self.aperture_wavelengths) {
            (Some(n), _) => n,
            (None, Some(a)) => element_count_for_aperture(a, spacing)?,
            (None, None) => {
                return Err(Error::invalid(
                    "element_count",
                    "give element_count or aperture_wavelengths",
                ))
            }
        };
        ArrayGeometry::uniform(count, spacing)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolarizationDocument {
    pub gamma_deg: f64,
    pub eta_deg: f64,
}

impl PolarizationDocument {
    fn to_state(self, field: &str) -> Result<PolarizationState<f64>> {
        PolarizationState::new(self.gamma_deg, self.eta_deg).map_err(|e| rename(e, field))
    }
}

/// One grid entry: a fixed-azimuth θ cut or a single direction.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum GridDocument {
    Cut {
        phi_deg: f64,
        theta_start_deg: f64,
        theta_stop_deg: f64,
        theta_step_deg: f64,
    },
    Point {
        theta_deg: f64,
        phi_deg: f64,
    },
}

fn expand_grid(entries: &[GridDocument], field: &str) -> Result<Vec<Direction<f64>>> {
    let mut out = Vec::new();
    for (i, g) in entries.iter().enumerate() {
        let at = format!("{field}[{i}]");
        match *g {
            GridDocument::Cut {
                phi_deg,
                theta_start_deg,
                theta_stop_deg,
                theta_step_deg,
            } => out.extend(
                phi_cut(phi_deg, theta_start_deg, theta_stop_deg, theta_step_deg)
                    .map_err(|e| rename(e, &at))?,
            ),
            GridDocument::Point { theta_deg, phi_deg } => {
                out.push(Direction::new(theta_deg, phi_deg).map_err(|e| rename(e, &at))?)
            }
        }
    }
    Ok(out)
}

fn rename(e: Error, prefix: &str) -> Error {
    match e {
        Error::InvalidInput { field, reason } => Error::InvalidInput {
            field: format!("{prefix}.{field}"),
            reason,
        },
        other => other,
    }
}

fn default_magnitude() -> f64 {
    1.0
}

/// Serializable description of a [`DesignSpec`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DesignDocument {
    pub array: ArrayDocument,
    pub pol1: PolarizationDocument,
    pub pol2: PolarizationDocument,
    pub mainlobe: Vec<GridDocument>,
    #[serde(default)]
    pub sidelobe: Vec<GridDocument>,
    pub modulation_order: usize,
    #[serde(default = "default_magnitude")]
    pub constellation_magnitude: f64,
    pub sidelobe_magnitude: f64,
    pub seed: u64,
    #[serde(default)]
    pub diagonal_loading: f64,
}

impl DesignDocument {
    /// 9λ-aperture half-wave ULA (19 crossed dipoles), horizontal/vertical
    /// polarisation pair, QPSK, mainlobe at θ = 0° (φ = 90°), sidelobes
    /// θ ∈ [5°, 90°] every 1° on both φ = ±90° cuts, sidelobe magnitude 0.1.
    pub fn demo() -> Self {
        let cut = |phi_deg| GridDocument::Cut {
            phi_deg,
            theta_start_deg: 5.0,
            theta_stop_deg: 90.0,
            theta_step_deg: 1.0,
        };
        Self {
            array: ArrayDocument {
                spacing_wavelengths: Some(0.5),
                aperture_wavelengths: Some(9.0),
                ..Default::default()
            },
            pol1: PolarizationDocument {
                gamma_deg: 0.0,
                eta_deg: 0.0,
            },
            pol2: PolarizationDocument {
                gamma_deg: 90.0,
                eta_deg: 0.0,
            },
            mainlobe: vec![GridDocument::Point {
                theta_deg: 0.0,
                phi_deg: 90.0,
            }],
            sidelobe: vec![cut(90.0), cut(-90.0)],
            modulation_order: 4,
            constellation_magnitude: 1.0,
            sidelobe_magnitude: 0.1,
            seed: DEMO_SEED,
            diagonal_loading: 0.0,
        }
    }

    /// Expands grids and checks every design invariant.
    pub fn to_spec(&self) -> Result<DesignSpec<f64>> {
        let spec = DesignSpec {
            geometry: self.array.to_geometry().map_err(|e| rename(e, "array"))?,
            pol1: self.pol1.to_state("pol1")?,
            pol2: self.pol2.to_state("pol2")?,
            mainlobe_dirs: expand_grid(&self.mainlobe, "mainlobe")?,
            sidelobe_dirs: expand_grid(&self.sidelobe, "sidelobe")?,
            constellation_magnitude: self.constellation_magnitude,
            sidelobe_magnitude: self.sidelobe_magnitude,
            modulation_order: self.modulation_order,
            seed: self.seed,
            diagonal_loading: self.diagonal_loading,
        };
        spec.validate()?;
        Ok(spec)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SymbolWeights {
    pub index: usize,
    pub label: String,
    pub weights: Vec<[f64; 2]>,
    pub objective: f64,
    pub constraint_residual: f64,
}

/// On-disk weight bank.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BankDocument {
    pub format: String,
    pub design: DesignDocument,
    pub seed: u64,
    pub element_count: usize,
    pub modulation_order: usize,
    pub free_dimensions: usize,
    pub symbols: Vec<SymbolWeights>,
}

impl BankDocument {
    pub fn new(design: &DesignDocument, bank: &WeightSet<f64>) -> Self {
        let order = bank.modulation_order;
        let symbols = bank
            .symbols
            .iter()
            .enumerate()
            .map(|(i, s)| SymbolWeights {
                index: s.m,
                label: s.label(order),
                weights: bank.weights[i].iter().map(|z| [z.re, z.im]).collect(),
                objective: bank.objective_values[i],
                constraint_residual: bank.constraint_residuals[i],
            })
            .collect();
        let mut design = design.clone();
        design.seed = bank.seed;
        Self {
            format: BANK_FORMAT.to_string(),
            design,
            seed: bank.seed,
            element_count: bank.element_count(),
            modulation_order: order,
            free_dimensions: bank.free_dimensions,
            symbols,
        }
    }

    pub fn to_weight_set(&self) -> Result<WeightSet<f64>> {
        if self.format != BANK_FORMAT {
            return Err(Error::invalid("format", format!("unsupported bank format {:?}", self.format)));
        }
        let order = self.modulation_order;
        let expected = order * order;
        if self.symbols.len() != expected {
            return Err(Error::DimensionMismatch {
                what: "bank symbols",
                expected,
                actual: self.symbols.len(),
            });
        }
        let mut out = WeightSet {
            modulation_order: order,
            seed: self.seed,
            symbols: Vec::with_capacity(expected),
            weights: Vec::with_capacity(expected),
            objective_values: Vec::with_capacity(expected),
            constraint_residuals: Vec::with_capacity(expected),
            free_dimensions: self.free_dimensions,
        };
        for (i, s) in self.symbols.iter().enumerate() {
            if s.index != i {
                return Err(Error::invalid("symbols", format!("entry {i} has index {}", s.index)));
            }
            if s.weights.len() != 2 * self.element_count {
                return Err(Error::DimensionMismatch {
                    what: "bank weight vector length",
                    expected: 2 * self.element_count,
                    actual: s.weights.len(),
                });
            }
            out.symbols.push(SymbolIndex::new(i, order)?);
            out.weights
                .push(s.weights.iter().map(|&[re, im]| Complex64::new(re, im)).collect());
            out.objective_values.push(s.objective);
            out.constraint_residuals.push(s.constraint_residual);
        }
        Ok(out)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("bank serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> std::result::Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synthesis::synthesize_bank;
    use proptest::prelude::*;

    #[test]
    fn demo_document_expands_to_reference_grid() {
        let spec = DesignDocument::demo().to_spec().unwrap();
        assert_eq!(spec.element_count(), 19);
        assert_eq!(spec.mainlobe_dirs.len(), 1);
        assert_eq!(spec.sidelobe_dirs.len(), 172);
        assert_eq!(spec.sidelobe_dirs[86].phi_deg(), 270.0);
        assert_eq!(spec.sample_count(), 173);
    }

    #[test]
    fn design_document_round_trips() {
        let doc = DesignDocument::demo();
        let text = serde_json::to_string_pretty(&doc).unwrap();
        let back: DesignDocument = serde_json::from_str(&text).unwrap();
        assert_eq!(doc, back);
    }

    #[test]
    fn geometry_variants() {
        let explicit = ArrayDocument {
            positions_wavelengths: Some(vec![0.0, 0.4, 1.1]),
            ..Default::default()
        };
        assert_eq!(explicit.to_geometry().unwrap().positions(), &[0.0, 0.4, 1.1]);
        let counted = ArrayDocument {
            spacing_wavelengths: Some(0.5),
            aperture_wavelengths: Some(9.0),
            element_count: Some(7),
            ..Default::default()
        };
        assert_eq!(counted.to_geometry().unwrap().len(), 7);
        let missing = ArrayDocument {
            spacing_wavelengths: Some(0.5),
            ..Default::default()
        };
        assert!(missing.to_geometry().is_err());
        let both = ArrayDocument {
            positions_wavelengths: Some(vec![0.0]),
            spacing_wavelengths: Some(0.5),
            ..Default::default()
        };
        assert!(both.to_geometry().is_err());
    }

    #[test]
    fn overlapping_grids_rejected() {
        let mut doc = DesignDocument::demo();
        doc.sidelobe.push(GridDocument::Point {
            theta_deg: 0.0,
            phi_deg: 270.0,
        });
        match doc.to_spec() {
            Err(Error::InvalidInput { field, .. }) => assert_eq!(field, "sidelobe"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn field_paths_in_errors() {
        let mut doc = DesignDocument::demo();
        doc.sidelobe[1] = GridDocument::Cut {
            phi_deg: 90.0,
            theta_start_deg: 5.0,
            theta_stop_deg: 190.0,
            theta_step_deg: 1.0,
        };
        match doc.to_spec() {
            Err(Error::InvalidInput { field, .. }) => assert_eq!(field, "sidelobe[1].theta_deg"),
            other => panic!("unexpected {other:?}"),
        }
        let mut doc = DesignDocument::demo();
        doc.pol2.gamma_deg = 120.0;
        match doc.to_spec() {
            Err(Error::InvalidInput { field, .. }) => assert_eq!(field, "pol2.gamma_deg"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn bank_round_trip_is_bit_exact() {
        let mut doc = DesignDocument::demo();
        doc.array.aperture_wavelengths = Some(2.0);
        doc.sidelobe = vec![GridDocument::Cut {
            phi_deg: 90.0,
            theta_start_deg: 10.0,
            theta_stop_deg: 90.0,
            theta_step_deg: 4.0,
        }];
        let spec = doc.to_spec().unwrap();
        let bank = synthesize_bank(&spec).unwrap();
        let file = BankDocument::new(&doc, &bank);
        let text = file.to_json();
        let back = BankDocument::from_json(&text).unwrap();
        assert_eq!(back, file);
        let restored = back.to_weight_set().unwrap();
        for (a, b) in restored.weights.iter().flatten().zip(bank.weights.iter().flatten()) {
            assert_eq!(a.re.to_bits(), b.re.to_bits());
            assert_eq!(a.im.to_bits(), b.im.to_bits());
        }
        assert_eq!(restored, bank);
        assert_eq!(back.to_json(), text);
    }

    #[test]
    fn malformed_bank_rejected() {
        let spec = DesignDocument::demo().to_spec().unwrap();
        let bank = WeightSet::zeros(&spec).unwrap();
        let mut file = BankDocument::new(&DesignDocument::demo(), &bank);
        file.symbols.pop();
        assert!(file.to_weight_set().is_err());
        let mut file = BankDocument::new(&DesignDocument::demo(), &bank);
        file.symbols[3].weights.pop();
        assert!(file.to_weight_set().is_err());
        let mut file = BankDocument::new(&DesignDocument::demo(), &bank);
        file.format = "other".into();
        assert!(file.to_weight_set().is_err());
    }

    proptest! {
        #[test]
        fn weights_survive_json(re in proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL | proptest::num::f64::ZERO,
                                im in proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL | proptest::num::f64::ZERO) {
            let sw = SymbolWeights {
                index: 0,
                label: "00,00".into(),
                weights: vec![[re, im]],
                objective: re.abs(),
                constraint_residual: im.abs(),
            };
            let text = serde_json::to_string(&sw).unwrap();
            let back: SymbolWeights = serde_json::from_str(&text).unwrap();
            prop_assert_eq!(back.weights[0][0].to_bits(), re.to_bits());
            prop_assert_eq!(back.weights[0][1].to_bits(), im.to_bits());
        }
    }
}
