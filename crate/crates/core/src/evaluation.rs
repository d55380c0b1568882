//! Beam and phase patterns, mainlobe constellations, and sidelobe scrambling
//! statistics for a synthesized weight bank.
//!
//! Patterns are reported on a signed plot axis in `[-90, 90]` degrees: a
//! nonnegative angle `a` is the direction `(θ = a, φ = 90°)` and a negative
//! one is `(θ = -a, φ = 270°)`, i.e. the two azimuth cuts of the y-z plane.

use std::io::{self, Write};

use num_complex::Complex;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::linalg::dot_conj;
use crate::modulation::SymbolIndex;
use crate::num::{wrap_degrees, Real};
use crate::steering::{full_steering, ArrayGeometry, Direction, PolarizationState};
use crate::synthesis::{DesignSpec, WeightSet};

/// Header of the pattern CSV.
pub const CSV_HEADER: &str = "plot_angle_deg,symbol,channel,mag_db,phase_deg,composite_db";

/// Beam response `wᴴ s(θ, φ, γ, η)`.
pub fn response<T: Real>(
    w: &[Complex<T>],
    geometry: &ArrayGeometry<T>,
    dir: &Direction<T>,
    pol: &PolarizationState<T>,
) -> Result<Complex<T>> {
    if w.len() != 2 * geometry.len() {
        return Err(Error::DimensionMismatch {
            what: "weight vector length",
            expected: 2 * geometry.len(),
            actual: w.len(),
        });
    }
    Ok(dot_conj(w, full_steering(geometry, dir, pol).as_slice()))
}

/// Direction addressed by a signed plot angle.
pub fn plot_direction<T: Real>(plot_angle: T) -> Result<Direction<T>> {
    if plot_angle < T::zero() {
        Direction::new(-plot_angle, T::lit(270.0))
    } else {
        Direction::new(plot_angle, T::lit(90.0))
    }
}

/// `20·log10|z|`; `-inf` for an exact zero.
pub fn magnitude_db<T: Real>(z: Complex<T>) -> T {
    T::lit(20.0) * z.norm().log10()
}

/// Phase of `z` in degrees, in `[-180, 180)`.
pub fn phase_deg<T: Real>(z: Complex<T>) -> T {
    wrap_degrees(z.arg().to_degrees())
}

/// Both polarisation channels evaluated at one plot angle.
#[derive(Clone, Debug, PartialEq)]
pub struct PatternSample<T> {
    pub plot_angle: T,
    pub responses: [Complex<T>; 2],
    pub magnitudes_db: [T; 2],
    pub phases_deg: [T; 2],
    /// `20·log10 √(|p₁|² + |p₂|²)`
    pub composite_db: T,
}

impl<T: Real> PatternSample<T> {
    pub fn from_responses(plot_angle: T, responses: [Complex<T>; 2]) -> Self {
        let power = responses[0].norm_sqr() + responses[1].norm_sqr();
        Self {
            plot_angle,
            responses,
            magnitudes_db: responses.map(magnitude_db),
            phases_deg: responses.map(phase_deg),
            composite_db: T::lit(10.0) * power.log10(),
        }
    }
}

/// Plot angles from -90 to 90 inclusive at `step` degrees.
pub fn plot_angles<T: Real>(step: T) -> Result<Vec<T>> {
    if !(step > T::zero()) || !step.is_finite() {
        return Err(Error::invalid("step", "sweep step must be positive"));
    }
    let span = T::lit(180.0);
    let count = (span / step + T::lit(1e-9)).floor().to_f64_lossless() as usize + 1;
    Ok((0..count)
        .map(|k| T::lit(-90.0) + step * T::lit(k as f64))
        .collect())
}

pub fn pattern_sweep<T: Real>(
    w: &[Complex<T>],
    spec: &DesignSpec<T>,
    step: T,
) -> Result<Vec<PatternSample<T>>> {
    plot_angles(step)?
        .into_iter()
        .map(|a| {
            let dir = plot_direction(a)?;
            let r1 = response(w, &spec.geometry, &dir, &spec.pol1)?;
            let r2 = response(w, &spec.geometry, &dir, &spec.pol2)?;
            Ok(PatternSample::from_responses(a, [r1, r2]))
        })
        .collect()
}

fn check_bank<T: Real>(bank: &WeightSet<T>, spec: &DesignSpec<T>) -> Result<()> {
    let expected = spec.modulation_order * spec.modulation_order;
    if bank.len() != expected {
        return Err(Error::DimensionMismatch {
            what: "weight bank symbols",
            expected,
            actual: bank.len(),
        });
    }
    Ok(())
}

/// Responses `(S₁, S₂)` of every symbol toward `dir`.
pub fn constellation_at<T: Real>(
    bank: &WeightSet<T>,
    spec: &DesignSpec<T>,
    dir: &Direction<T>,
) -> Result<Vec<[Complex<T>; 2]>> {
    check_bank(bank, spec)?;
    let s1 = full_steering(&spec.geometry, dir, &spec.pol1);
    let s2 = full_steering(&spec.geometry, dir, &spec.pol2);
    bank.weights
        .iter()
        .map(|w| {
            if w.len() != s1.as_slice().len() {
                return Err(Error::DimensionMismatch {
                    what: "weight vector length",
                    expected: s1.as_slice().len(),
                    actual: w.len(),
                });
            }
            Ok([dot_conj(w, s1.as_slice()), dot_conj(w, s2.as_slice())])
        })
        .collect()
}

/// Dispersion of one channel's M² phases at one direction.
#[derive(Clone, Debug, PartialEq)]
pub struct ChannelScrambling<T> {
    pub phases_deg: Vec<T>,
    /// `|mean(e^{jψ})|`, 1 for identical phases and 0 for balanced ones.
    pub mean_resultant_length: T,
    /// `√(-2 ln R)` in degrees; `+inf` when R vanishes to rounding.
    pub circular_std_deg: T,
    pub max_magnitude: T,
}

impl<T: Real> ChannelScrambling<T> {
    pub fn from_responses(responses: impl IntoIterator<Item = Complex<T>>) -> Self {
        let mut phases = Vec::new();
        let mut max_magnitude = T::zero();
        for r in responses {
            phases.push(phase_deg(r));
            max_magnitude = max_magnitude.max(r.norm());
        }
        let (mean_resultant_length, circular_std_deg) = circular_statistics(&phases);
        Self {
            phases_deg: phases,
            mean_resultant_length,
            circular_std_deg,
            max_magnitude,
        }
    }
}

/// Mean resultant length and circular standard deviation (degrees) of a set of angles in degrees.
pub fn circular_statistics<T: Real>(phases_deg: &[T]) -> (T, T) {
    if phases_deg.is_empty() {
        return (T::zero(), T::infinity());
    }
    let sum = phases_deg.iter().fold(Complex::<T>::zero(), |acc, p| {
        acc + Complex::from_polar(T::one(), p.to_radians())
    });
    let r = (sum.norm() / T::lit(phases_deg.len() as f64)).min(T::one());
    let floor = T::epsilon() * T::lit(1e4);
    let std = if r <= floor {
        T::infinity()
    } else {
        (-T::lit(2.0) * r.ln()).sqrt().to_degrees()
    };
    (r, std)
}

#[derive(Clone, Debug, PartialEq)]
pub struct DirectionScrambling<T> {
    pub direction: Direction<T>,
    pub mainlobe: bool,
    pub channels: [ChannelScrambling<T>; 2],
}

/// Per-direction phase dispersion across all symbols: mainlobe directions first, then every sidelobe direction.
pub fn scrambling_report<T: Real>(
    bank: &WeightSet<T>,
    spec: &DesignSpec<T>,
) -> Result<Vec<DirectionScrambling<T>>> {
    let tagged = spec
        .mainlobe_dirs
        .iter()
        .map(|d| (d, true))
        .chain(spec.sidelobe_dirs.iter().map(|d| (d, false)));
    tagged
        .map(|(dir, mainlobe)| {
            let pairs = constellation_at(bank, spec, dir)?;
            Ok(DirectionScrambling {
                direction: *dir,
                mainlobe,
                channels: [
                    ChannelScrambling::from_responses(pairs.iter().map(|p| p[0])),
                    ChannelScrambling::from_responses(pairs.iter().map(|p| p[1])),
                ],
            })
        })
        .collect()
}

/// Writes pattern rows for the selected symbols, sorted by angle, symbol, channel.
///
/// `symbol` is the composite index; `channel` is `1` or `2`.
pub fn write_pattern_csv<T: Real, W: Write>(
    out: &mut W,
    bank: &WeightSet<T>,
    spec: &DesignSpec<T>,
    symbols: &[SymbolIndex],
    step: T,
) -> Result<()> {
    check_bank(bank, spec)?;
    let mut selected: Vec<SymbolIndex> = symbols.to_vec();
    selected.sort_by_key(|s| s.m);
    selected.dedup();
    let sweeps = selected
        .iter()
        .map(|s| pattern_sweep(&bank.weights[s.m], spec, step))
        .collect::<Result<Vec<_>>>()?;
    write_rows(out, &selected, &sweeps).map_err(|e| Error::invalid("csv output", e.to_string()))
}

fn write_rows<T: Real, W: Write>(
    out: &mut W,
    symbols: &[SymbolIndex],
    sweeps: &[Vec<PatternSample<T>>],
) -> io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    let n_angles = sweeps.first().map_or(0, Vec::len);
    for k in 0..n_angles {
        for (s, sweep) in symbols.iter().zip(sweeps) {
            let sample = &sweep[k];
            for ch in 0..2 {
                writeln!(
                    out,
                    "{:.6},{},{},{:.6},{:.6},{:.6}",
                    sample.plot_angle,
                    s.m,
                    ch + 1,
                    sample.magnitudes_db[ch],
                    sample.phases_deg[ch],
                    sample.composite_db
                )?;
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::steering::phi_cut;
    use crate::synthesis::synthesize_bank;
    use proptest::prelude::*;

    type C = Complex<f64>;

    fn spec() -> DesignSpec<f64> {
        DesignSpec {
            geometry: ArrayGeometry::uniform(5, 0.5).unwrap(),
            pol1: PolarizationState::horizontal(),
            pol2: PolarizationState::vertical(),
            mainlobe_dirs: vec![Direction::new(0.0, 90.0).unwrap()],
            sidelobe_dirs: {
                let mut v = phi_cut(90.0, 10.0, 90.0, 10.0).unwrap();
                v.extend(phi_cut(270.0, 10.0, 90.0, 10.0).unwrap());
                v
            },
            constellation_magnitude: 1.0,
            sidelobe_magnitude: 0.1,
            modulation_order: 4,
            seed: 3,
            diagonal_loading: 0.0,
        }
    }

    #[test]
    fn matched_filter_and_zero_weights() {
        let g = ArrayGeometry::uniform(4, 0.5).unwrap();
        let d = Direction::new(33.0, 270.0).unwrap();
        let p = PolarizationState::new(20.0, 70.0).unwrap();
        let s = full_steering(&g, &d, &p);
        let e: f64 = s.as_slice().iter().map(|z| z.norm_sqr()).sum();
        let w: Vec<C> = s.as_slice().iter().map(|z| z / e).collect();
        assert!((response(&w, &g, &d, &p).unwrap() - C::new(1.0, 0.0)).norm() < 1e-12);
        assert_eq!(response(&vec![C::zero(); 8], &g, &d, &p).unwrap(), C::zero());
        assert!(response(&vec![C::zero(); 7], &g, &d, &p).is_err());
    }

    #[test]
    fn sweep_counts_and_axis() {
        let sp = spec();
        let w = vec![C::new(0.1, 0.0); 10];
        let sweep = pattern_sweep(&w, &sp, 1.0).unwrap();
        assert_eq!(sweep.len(), 181);
        assert_eq!(sweep[0].plot_angle, -90.0);
        assert_eq!(sweep[180].plot_angle, 90.0);
        assert_eq!(plot_angles(0.5).unwrap().len(), 361);
        assert_eq!(plot_angles(7.0).unwrap().len(), 26);
        assert!(plot_angles(0.0).is_err());
        assert_eq!(plot_direction(-30.0).unwrap(), Direction::new(30.0, 270.0).unwrap());
    }

    #[test]
    fn phases_and_db() {
        assert_eq!(phase_deg(C::new(-1.0, 0.0)), -180.0);
        assert_eq!(phase_deg(C::new(-1.0, -0.0)), -180.0);
        assert!((phase_deg(C::new(0.0, -1.0)) + 90.0).abs() < 1e-12);
        assert_eq!(magnitude_db(C::new(0.1, 0.0)), -20.0);
        assert_eq!(magnitude_db(C::zero()), f64::NEG_INFINITY);
        let s = PatternSample::from_responses(0.0, [C::new(1.0, 0.0), C::new(0.0, 1.0)]);
        assert!((s.composite_db - 10.0 * 2f64.log10()).abs() < 1e-12);
    }

    #[test]
    fn mainlobe_of_bank_matches_targets() {
        let sp = spec();
        let bank = synthesize_bank(&sp).unwrap();
        let pairs = constellation_at(&bank, &sp, &sp.mainlobe_dirs[0]).unwrap();
        for (s, pair) in bank.symbols.iter().zip(&pairs) {
            let e1 = Complex::from_polar(1.0, crate::modulation::constellation_phase_deg::<f64>(4, s.m1).to_radians());
            let e2 = Complex::from_polar(1.0, crate::modulation::constellation_phase_deg::<f64>(4, s.m2).to_radians());
            assert!((pair[0] - e1).norm() < 1e-8);
            assert!((pair[1] - e2).norm() < 1e-8);
        }
        let sweep = pattern_sweep(&bank.weights[0], &sp, 1.0).unwrap();
        let main = &sweep[90];
        assert_eq!(main.plot_angle, 0.0);
        assert!((main.composite_db - 10.0 * 2f64.log10()).abs() < 1e-3);
        assert!(main.magnitudes_db.iter().all(|m| m.abs() < 1e-3));
    }

    #[test]
    fn zero_bank_gives_zero_pairs() {
        let sp = spec();
        let bank = WeightSet::zeros(&sp).unwrap();
        let pairs = constellation_at(&bank, &sp, &sp.sidelobe_dirs[3]).unwrap();
        assert_eq!(pairs.len(), 16);
        assert!(pairs.iter().all(|p| p[0].is_zero() && p[1].is_zero()));
    }

    #[test]
    fn scrambling_report_mainlobe_matches_ideal_grid() {
        let sp = spec();
        let bank = synthesize_bank(&sp).unwrap();
        let report = scrambling_report(&bank, &sp).unwrap();
        assert_eq!(report.len(), 1 + sp.sidelobe_dirs.len());
        assert!(report[0].mainlobe && !report[1].mainlobe);
        let grid: Vec<f64> = bank
            .symbols
            .iter()
            .map(|s| crate::modulation::constellation_phase_deg::<f64>(4, s.m1))
            .collect();
        let (r_ideal, std_ideal) = circular_statistics(&grid);
        let ch = &report[0].channels[0];
        assert!((ch.mean_resultant_length - r_ideal).abs() < 1e-9);
        assert_eq!(ch.circular_std_deg, std_ideal);
        assert_eq!(report, scrambling_report(&bank, &sp).unwrap());

        let mut other = sp.clone();
        other.seed = 4;
        let other_report = scrambling_report(&synthesize_bank(&other).unwrap(), &other).unwrap();
        assert_ne!(report, other_report);
    }

    #[test]
    fn circular_statistics_limits() {
        let (r, s) = circular_statistics::<f64>(&[10.0, 10.0, 10.0]);
        assert!((r - 1.0).abs() < 1e-12 && s.abs() < 1e-4);
        let (r, s) = circular_statistics::<f64>(&[0.0, 90.0, -180.0, -90.0]);
        assert!(r < 1e-12 && s.is_infinite());
    }

    #[test]
    fn csv_layout() {
        let sp = spec();
        let bank = synthesize_bank(&sp).unwrap();
        let syms = [SymbolIndex::new(3, 4).unwrap(), SymbolIndex::new(0, 4).unwrap()];
        let mut buf = Vec::new();
        write_pattern_csv(&mut buf, &bank, &sp, &syms, 1.0).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], CSV_HEADER);
        assert_eq!(lines.len(), 1 + 181 * 2 * 2);
        assert!(lines[1].starts_with("-90.000000,0,1,"));
        assert!(lines[2].starts_with("-90.000000,0,2,"));
        assert!(lines[3].starts_with("-90.000000,3,1,"));
        let main: Vec<&str> = lines[1 + 90 * 4].split(',').collect();
        assert_eq!(main[0], "0.000000");
        assert_eq!(main[4], "45.000000");
        assert_eq!(main[5], "3.010300");
    }

    proptest! {
        #[test]
        fn response_is_conjugate_linear(
            re in proptest::collection::vec(-1.0..1.0f64, 12),
            im in proptest::collection::vec(-1.0..1.0f64, 12),
            ar in -2.0..2.0f64, ai in -2.0..2.0f64,
            theta in 0.0..=180.0f64, phi in 0.0..360.0f64,
            gamma in 0.0..=90.0f64, eta in -180.0..180.0f64,
        ) {
            let g = ArrayGeometry::uniform(3, 0.5).unwrap();
            let d = Direction::new(theta, phi).unwrap();
            let p = PolarizationState::new(gamma, eta).unwrap();
            let w1: Vec<C> = (0..6).map(|i| C::new(re[i], im[i])).collect();
            let w2: Vec<C> = (6..12).map(|i| C::new(re[i], im[i])).collect();
            let sum: Vec<C> = w1.iter().zip(&w2).map(|(a, b)| a + b).collect();
            let r1 = response(&w1, &g, &d, &p).unwrap();
            let r2 = response(&w2, &g, &d, &p).unwrap();
            prop_assert!((response(&sum, &g, &d, &p).unwrap() - r1 - r2).norm() < 1e-12);
            let alpha = C::new(ar, ai);
            let scaled: Vec<C> = w1.iter().map(|z| alpha * z).collect();
            prop_assert!((response(&scaled, &g, &d, &p).unwrap() - alpha.conj() * r1).norm() < 1e-12);
        }

        #[test]
        fn composite_dominates_channels(a in -3.0..3.0f64, b in -3.0..3.0f64, c in -3.0..3.0f64, d in -3.0..3.0f64) {
            let s = PatternSample::from_responses(0.0, [C::new(a, b), C::new(c, d)]);
            prop_assert!(s.composite_db >= s.magnitudes_db[0] && s.composite_db >= s.magnitudes_db[1]);
            prop_assert!(s.phases_deg.iter().all(|p| (-180.0..180.0).contains(p)));
        }
    }
}
