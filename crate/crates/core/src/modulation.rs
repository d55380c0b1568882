//! Composite symbols for the two polarisation channels and the desired
//! responses they induce at mainlobe and sidelobe directions.
//!
//! With M-ary signalling on each channel there are M² composite symbols;
//! composite index `m` splits row-major into `(m1, m2) = (m / M, m % M)`.
//! For M = 4 the constituent symbols follow the Gray-ordered QPSK table
//! `00 → 45°, 01 → 135°, 11 → -45°, 10 → -135°`.

use num_complex::Complex;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::error::{Error, Result};
use crate::num::Real;
use crate::synthesis::DesignSpec;

const QPSK_TABLE: [(&str, f64); 4] = [("00", 45.0), ("01", 135.0), ("11", -45.0), ("10", -135.0)];

/// Phase in degrees of a two-bit QPSK label.
pub fn qpsk_phase<T: Real>(label: &str) -> Result<T> {
    QPSK_TABLE
        .iter()
        .find(|(l, _)| *l == label)
        .map(|&(_, p)| T::lit(p))
        .ok_or_else(|| Error::invalid("qpsk label", format!("{label:?} is not one of 00, 01, 11, 10")))
}

/// Phase in degrees of constituent symbol `k` of an M-ary PSK alphabet.
///
/// M = 4 uses the QPSK table; other orders use `360·k/M + 180/M`.
pub fn constellation_phase_deg<T: Real>(order: usize, k: usize) -> T {
    assert!(k < order, "symbol {k} outside alphabet of size {order}");
    if order == 4 {
        return T::lit(QPSK_TABLE[k].1);
    }
    T::lit(360.0 * k as f64 / order as f64 + 180.0 / order as f64)
}

/// Text label of constituent symbol `k`.
///
/// Bit strings for power-of-two orders (the Gray-ordered table for M = 4,
/// plain binary otherwise); decimal for any other order.
pub fn symbol_label(order: usize, k: usize) -> String {
    if order == 4 {
        return QPSK_TABLE[k].0.to_string();
    }
    if order.is_power_of_two() {
        let width = order.trailing_zeros() as usize;
        return format!("{k:0width$b}");
    }
    k.to_string()
}

/// Inverse of [`symbol_label`].
pub fn parse_symbol_label(order: usize, label: &str) -> Result<usize> {
    (0..order)
        .find(|&k| symbol_label(order, k) == label)
        .ok_or_else(|| {
            Error::invalid(
                "symbol",
                format!("{label:?} is not a symbol label for modulation order {order}"),
            )
        })
}

/// Composite symbol `m` with its per-channel constituents.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SymbolIndex {
    pub m: usize,
    pub m1: usize,
    pub m2: usize,
}

impl SymbolIndex {
    pub fn new(m: usize, order: usize) -> Result<Self> {
        check_order(order)?;
        if m >= order * order {
            return Err(Error::invalid(
                "symbol",
                format!("composite index {m} outside [0, {}]", order * order - 1),
            ));
        }
        Ok(Self {
            m,
            m1: m / order,
            m2: m % order,
        })
    }

    pub fn from_pair(m1: usize, m2: usize, order: usize) -> Result<Self> {
        check_order(order)?;
        if m1 >= order || m2 >= order {
            return Err(Error::invalid(
                "symbol",
                format!("pair ({m1}, {m2}) outside alphabet of size {order}"),
            ));
        }
        Ok(Self {
            m: m1 * order + m2,
            m1,
            m2,
        })
    }

    /// `"l1,l2"`, e.g. `"00,11"` for QPSK.
    pub fn label(&self, order: usize) -> String {
        format!("{},{}", symbol_label(order, self.m1), symbol_label(order, self.m2))
    }

    /// Accepts a composite label `"l1,l2"` or a bare composite index.
    pub fn parse(text: &str, order: usize) -> Result<Self> {
        let text = text.trim();
        match text.split_once(',') {
            Some((a, b)) => Self::from_pair(
                parse_symbol_label(order, a.trim())?,
                parse_symbol_label(order, b.trim())?,
                order,
            ),
            None => {
                let m = text.parse::<usize>().map_err(|_| {
                    Error::invalid("symbol", format!("{text:?} is neither \"l1,l2\" nor an index"))
                })?;
                Self::new(m, order)
            }
        }
    }
}

fn check_order(order: usize) -> Result<()> {
    if order < 2 {
        return Err(Error::invalid("modulation_order", format!("{order} < 2")));
    }
    Ok(())
}

/// All M² composite symbols in row-major `(m1, m2)` order.
pub fn enumerate_symbols(order: usize) -> Result<Vec<SymbolIndex>> {
    check_order(order)?;
    (0..order * order).map(|m| SymbolIndex::new(m, order)).collect()
}

/// Uniform phase in `[0, 2π)` for one sidelobe target.
///
/// Each `(seed, symbol, direction, polarisation)` tuple addresses its own
/// position in a ChaCha20 keystream (stream = symbol, word offset from the
/// interleaved direction/polarisation index), so any subset of targets can
/// be regenerated independently and in any order.
pub fn sidelobe_phase(seed: u64, symbol: usize, direction: usize, polarisation: usize) -> f64 {
    debug_assert!(polarisation < 2);
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(symbol as u64);
    let slot = 2 * direction as u128 + polarisation as u128;
    rng.set_word_pos(2 * slot);
    let bits = rng.next_u64() >> 11;
    std::f64::consts::TAU * (bits as f64) * (1.0 / (1u64 << 53) as f64)
}

/// Desired responses for one composite symbol.
///
/// Both vectors hold the S₁ block (all directions, first polarisation)
/// followed by the S₂ block, matching the steering-matrix column order.
#[derive(Clone, Debug, PartialEq)]
pub struct TargetSet<T> {
    pub mainlobe: Vec<Complex<T>>,
    pub sidelobe: Vec<Complex<T>>,
    pub seed: u64,
}

pub fn build_targets<T: Real>(
    symbol: SymbolIndex,
    spec: &DesignSpec<T>,
    seed: u64,
) -> Result<TargetSet<T>> {
    let order = spec.modulation_order;
    check_order(order)?;
    if symbol.m1 >= order || symbol.m2 >= order {
        return Err(Error::invalid("symbol", format!("{symbol:?} outside order {order}")));
    }
    if spec.mainlobe_dirs.is_empty() {
        return Err(Error::invalid("mainlobe", "mainlobe grid is empty"));
    }
    let r = spec.mainlobe_dirs.len();
    let point = |k: usize| {
        Complex::from_polar(
            spec.constellation_magnitude,
            constellation_phase_deg::<T>(order, k).to_radians(),
        )
    };
    let mut mainlobe = vec![point(symbol.m1); r];
    mainlobe.extend(std::iter::repeat_n(point(symbol.m2), r));

    let n_sl = spec.sidelobe_dirs.len();
    let sidelobe = (0..2)
        .flat_map(|pol| (0..n_sl).map(move |d| (pol, d)))
        .map(|(pol, d)| {
            let psi = T::lit(sidelobe_phase(seed, symbol.m, d, pol));
            Complex::from_polar(spec.sidelobe_magnitude, psi)
        })
        .collect();

    Ok(TargetSet {
        mainlobe,
        sidelobe,
        seed,
    })
}
