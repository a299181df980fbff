//! Decoders driven by exact power-law potentials.
//!
//! Instead of relaxing a local field, these decoders place the potential
//!
//! ```text
//! Phi(r) = r^-alpha      (alpha > 0)
//! Phi(r) = -ln r         (alpha = 0)
//! Phi(r) = -r^-alpha     (alpha < 0)
//! ```
//!
//! around every anyon and recompute the total exactly before each anyon
//! update. An anyon never feels its own potential. A neighbor cell occupied
//! by another anyon gets that anyon's contribution at contact, `Phi(r0)`
//! with the contact radius `r0` of [`IdealConfig`]. The default `r0 = 1/2`
//! is the distance from a cell center to the shared edge. `r0 = 0` selects
//! the limit `r -> 0`: `+inf` for `alpha >= 0` and `0` for `alpha < 0`.
//!
//! Exact potentials are symmetric, so a diagonal pair or a 2x2 square of
//! anyons ties between two targets forever. [`IdealConfig`] therefore
//! defaults to [`TieBreak::Uniform`].

use rand::Rng;

use crate::automaton::{
    self, apply_hops, decide_hops_with, pick_target, unique_argmax, DecodeOutcome, ScalarField,
    TieBreak,
};
use crate::error::{Error, Result};
use crate::toric::{self, ChargeField, Direction, ErrorConfig};
use crate::Real;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerLawPotential {
    pub alpha: f64,
}

impl PowerLawPotential {
    pub fn new(alpha: f64) -> Self {
        Self { alpha }
    }

    pub fn value(&self, r: f64) -> Result<f64> {
        potential(self.alpha, r)
    }

    /// Value used at zero distance, see [`IdealConfig::contact_radius`].
    pub fn contact(&self, radius: f64) -> f64 {
        contact_value(self.alpha, radius)
    }
}

pub fn potential(alpha: f64, r: f64) -> Result<f64> {
    if !(r >= 1.0) {
        return Err(Error::DistanceBelowOne(r));
    }
    Ok(potential_unchecked(alpha, r))
}

#[inline]
fn potential_unchecked(alpha: f64, r: f64) -> f64 {
    if alpha > 0.0 {
        r.powf(-alpha)
    } else if alpha == 0.0 {
        -r.ln()
    } else {
        -r.powf(-alpha)
    }
}

fn contact_value(alpha: f64, radius: f64) -> f64 {
    if radius > 0.0 {
        potential_unchecked(alpha, radius)
    } else if alpha < 0.0 {
        0.0
    } else {
        f64::INFINITY
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IdealConfig {
    pub alpha: f64,
    pub hop_probability: f64,
    pub abort_sequences: usize,
    pub ties: TieBreak,
    /// Distance at which an anyon's potential is evaluated on its own cell,
    /// as seen by a neighboring anyon. Zero means the `r -> 0` limit.
    pub contact_radius: f64,
}

impl IdealConfig {
    pub const DEFAULT_CONTACT_RADIUS: f64 = 0.5;

    /// Hop probability 1/2, abort after `10 L` sequences, uniform ties,
    /// contact radius 1/2.
    pub fn new(alpha: f64, size: usize) -> Self {
        Self {
            alpha,
            hop_probability: 0.5,
            abort_sequences: 10 * size,
            ties: TieBreak::Uniform,
            contact_radius: Self::DEFAULT_CONTACT_RADIUS,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.hop_probability) {
            return Err(Error::InvalidProbability(self.hop_probability));
        }
        if !(self.contact_radius >= 0.0 && self.contact_radius.is_finite()) {
            return Err(Error::InvalidContactRadius(self.contact_radius));
        }
        Ok(())
    }
}

/// Potential of a charge at each offset, tabulated over the torus. The zero
/// offset holds the contact value.
#[derive(Debug, Clone)]
struct PotentialTable<T> {
    size: usize,
    values: Vec<T>,
}

impl<T: Real> PotentialTable<T> {
    fn new(size: usize, dim: usize, alpha: f64, contact_radius: f64) -> Self {
        let n = size.pow(dim as u32);
        let values = (0..n)
            .map(|i| {
                let mut rem = i;
                let mut r2 = 0usize;
                for _ in 0..dim {
                    let d = rem % size;
                    rem /= size;
                    let m = d.min(size - d);
                    r2 += m * m;
                }
                if r2 == 0 {
                    T::of(contact_value(alpha, contact_radius))
                } else {
                    T::of(potential_unchecked(alpha, (r2 as f64).sqrt()))
                }
            })
            .collect();
        Self { size, values }
    }

    #[inline]
    fn at_2d(&self, from: usize, to: usize) -> T {
        let l = self.size;
        let dx = (from % l + l - to % l) % l;
        let dy = (from / l + l - to / l) % l;
        self.values[dx + l * dy]
    }

    #[inline]
    fn at_1d(&self, from: usize, to: usize) -> T {
        self.values[(from + self.size - to) % self.size]
    }
}

/// Total potential of all anyons on every cell, excluding an anyon's
/// contribution to its own cell. The decoders see the same values on empty
/// cells; on an occupied cell they add the occupant's contact value.
pub fn ideal_field<T: Real>(anyons: &ChargeField, alpha: f64) -> Result<ScalarField<T>> {
    let cells = anyons.anyons();
    if cells.is_empty() {
        return Err(Error::NoAnyons);
    }
    let l = anyons.size();
    let table = PotentialTable::<T>::new(l, 2, alpha, 0.0);
    let values = (0..l * l)
        .map(|x| {
            cells
                .iter()
                .filter(|&&a| a != x)
                .fold(T::zero(), |acc, &a| acc + table.at_2d(x, a))
        })
        .collect();
    ScalarField::from_values(l, 2, values)
}

/// Value anyon `a` sees on cell `n`: the potential of every other anyon.
#[inline]
fn seen_by<T: Real>(
    table: &PotentialTable<T>,
    anyons: &[usize],
    a: usize,
    n: usize,
    at: fn(&PotentialTable<T>, usize, usize) -> T,
) -> T {
    let mut s = T::zero();
    for &b in anyons {
        if b != a {
            s += at(table, n, b);
        }
    }
    s
}

/// Decodes a toric-code error by alternating exact potential evaluation with
/// the anyon hop rule. Each sequence counts as two elementary updates.
pub fn ideal_decode<R: Rng + ?Sized>(
    e: &ErrorConfig,
    cfg: &IdealConfig,
    rng: &mut R,
) -> Result<(DecodeOutcome, ErrorConfig)> {
    cfg.validate()?;
    let l = e.size();
    let table = PotentialTable::<f64>::new(l, 2, cfg.alpha, cfg.contact_radius);
    let mut recovery = ErrorConfig::empty(l);
    let mut q = e.syndrome();
    let mut anyons = q.anyons();
    let mut hops = Vec::new();
    let mut tau = 0;
    while !anyons.is_empty() && tau < cfg.abort_sequences {
        decide_hops_with(
            l,
            &anyons,
            cfg.hop_probability,
            cfg.ties,
            rng,
            |a, n| seen_by(&table, &anyons, a, n, PotentialTable::at_2d),
            &mut hops,
        );
        apply_hops(&hops, &mut recovery, &mut q);
        q.anyons_into(&mut anyons);
        tau += 1;
    }
    let outcome = automaton::classify(e, &recovery, anyons.len(), tau, 2 * tau as u64)?;
    Ok((outcome, recovery))
}

/// Bit flips on a ring of `L` links; link `i` joins vertices `i` and `i+1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RepetitionCodeState {
    flips: Vec<bool>,
}

impl RepetitionCodeState {
    pub fn new(flips: Vec<bool>) -> Result<Self> {
        if flips.len() < 3 {
            return Err(Error::LatticeTooSmall(flips.len()));
        }
        Ok(Self { flips })
    }

    pub fn empty(size: usize) -> Result<Self> {
        Self::new(vec![false; size])
    }

    pub fn sample<R: Rng + ?Sized>(size: usize, p: f64, rng: &mut R) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidProbability(p));
        }
        Self::new((0..size).map(|_| rng.gen_bool(p)).collect())
    }

    pub fn size(&self) -> usize {
        self.flips.len()
    }

    pub fn flips(&self) -> &[bool] {
        &self.flips
    }

    pub fn toggle(&mut self, link: usize) {
        self.flips[link] ^= true;
    }

    /// Domain-wall indicator on the vertices.
    pub fn walls(&self) -> Vec<bool> {
        let l = self.size();
        (0..l)
            .map(|i| self.flips[(i + l - 1) % l] ^ self.flips[i])
            .collect()
    }

    pub fn xor(&self, other: &Self) -> Self {
        Self {
            flips: self
                .flips
                .iter()
                .zip(&other.flips)
                .map(|(a, b)| a ^ b)
                .collect(),
        }
    }

    /// A wall-free ring fails when every link is flipped.
    pub fn logical_failure(&self) -> Result<bool> {
        let walls = self.walls().iter().filter(|&&w| w).count();
        if walls != 0 {
            return Err(Error::NonzeroSyndrome(walls));
        }
        Ok(self.flips[0])
    }
}

/// Decodes a repetition-code ring with the 1D potential.
pub fn repetition_decode<R: Rng + ?Sized>(
    state: &RepetitionCodeState,
    cfg: &IdealConfig,
    rng: &mut R,
) -> Result<(DecodeOutcome, RepetitionCodeState)> {
    cfg.validate()?;
    let l = state.size();
    let table = PotentialTable::<f64>::new(l, 1, cfg.alpha, cfg.contact_radius);
    let mut recovery = RepetitionCodeState::empty(l)?;
    let mut walls = state.walls();
    let mut anyons: Vec<usize> = (0..l).filter(|&i| walls[i]).collect();
    let mut hops: Vec<(usize, bool)> = Vec::new();
    let mut tau = 0;
    while !anyons.is_empty() && tau < cfg.abort_sequences {
        hops.clear();
        for &a in &anyons {
            let plus = (a + 1) % l;
            let minus = (a + l - 1) % l;
            let vals = [plus, minus].map(|n| seen_by(&table, &anyons, a, n, PotentialTable::at_1d));
            // with two candidates a tie is a flat neighborhood under either policy
            if let Some(best) = pick_target(&vals, cfg.ties, rng) {
                if rng.gen_bool(cfg.hop_probability) {
                    hops.push((a, best == 0));
                }
            }
        }
        for &(a, forward) in &hops {
            let (link, other) = if forward {
                (a, (a + 1) % l)
            } else {
                ((a + l - 1) % l, (a + l - 1) % l)
            };
            recovery.toggle(link);
            walls[a] ^= true;
            walls[other] ^= true;
        }
        anyons.clear();
        anyons.extend((0..l).filter(|&i| walls[i]));
        tau += 1;
    }

    let status = if !anyons.is_empty() {
        automaton::DecodeStatus::Abort
    } else if state.xor(&recovery).logical_failure()? {
        automaton::DecodeStatus::LogicalFailure
    } else {
        automaton::DecodeStatus::Success
    };
    Ok((
        DecodeOutcome {
            status,
            sequences_used: tau,
            elementary_updates: 2 * tau as u64,
            residual_anyons: anyons.len(),
        },
        recovery,
    ))
}

/// Hop direction each anyon of `q` would take under the exact potential,
/// ignoring the coin flip. Used to compare potentials.
pub fn preferred_directions(q: &ChargeField, alpha: f64) -> Vec<(usize, Option<Direction>)> {
    let l = q.size();
    let table = PotentialTable::<f64>::new(l, 2, alpha, IdealConfig::DEFAULT_CONTACT_RADIUS);
    let anyons = q.anyons();
    anyons
        .iter()
        .map(|&a| {
            let vals = Direction::ALL.map(|d| {
                seen_by(
                    &table,
                    &anyons,
                    a,
                    toric::step(l, a, d),
                    PotentialTable::at_2d,
                )
            });
            (a, unique_argmax(&vals).map(Direction::from_slot))
        })
        .collect()
}
