//! The field automaton decoder.
//!
//! A decode alternates sequences of `c` synchronous field updates
//!
//! ```text
//! phi'(x) = (1 - eta) phi(x) + eta/(2D) * sum_{y ~ x} phi(y) + q(x)
//! ```
//!
//! with one parallel anyon update, in which every anyon looks at the field on
//! its four in-plane neighbors and, when one of them is a strict unique
//! maximum, hops onto it with probability `hop_probability`. The auxiliary
//! lattice is either the `L x L` syndrome torus itself or an `L x L x L` torus
//! whose `x2 = 0` plane holds the anyons.

use log::debug;
use rand::Rng;

use crate::error::{Error, Result};
use crate::lattice::Lattice;
use crate::toric::{self, ChargeField, Direction, ErrorConfig};
use crate::Real;

/// Largest field magnitude tolerated before the field is shifted down.
pub const FIELD_GUARD: f64 = 1e12;

/// Double-buffered real field over an `L^D` torus.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField<T> {
    size: usize,
    dim: usize,
    front: Vec<T>,
    back: Vec<T>,
}

impl<T: Real> ScalarField<T> {
    pub fn zeros(size: usize, dim: usize) -> Result<Self> {
        let lattice_cells = Lattice::new(size, dim).map(|l| l.cells())?;
        Ok(Self {
            size,
            dim,
            front: vec![T::zero(); lattice_cells],
            back: vec![T::zero(); lattice_cells],
        })
    }

    pub fn from_values(size: usize, dim: usize, values: Vec<T>) -> Result<Self> {
        let mut out = Self::zeros(size, dim)?;
        if values.len() != out.front.len() {
            return Err(Error::LatticeMismatch(size, dim, values.len(), 0));
        }
        out.front = values;
        Ok(out)
    }

    #[inline]
    pub fn size(&self) -> usize {
        self.size
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn values(&self) -> &[T] {
        &self.front
    }

    #[inline]
    pub fn values_mut(&mut self) -> &mut [T] {
        &mut self.front
    }

    pub fn into_values(self) -> Vec<T> {
        self.front
    }

    pub fn sum(&self) -> T {
        self.front.iter().fold(T::zero(), |acc, &v| acc + v)
    }

    pub fn fill(&mut self, v: T) {
        self.front.iter_mut().for_each(|x| *x = v);
    }

    /// Adds `k` to every cell.
    pub fn shift(&mut self, k: T) {
        self.front.iter_mut().for_each(|x| *x += k);
    }

    pub fn max_abs(&self) -> T {
        self.front.iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.front.iter().all(|v| v.is_finite())
    }

    /// One synchronous update with unit charges at the given cells of the
    /// `x2 = 0` plane (plain flat indices for 2D).
    pub fn update(&mut self, charges: &[usize], eta: T) {
        let w_nb = eta / T::of((2 * self.dim) as f64);
        stencil(
            &self.front,
            &mut self.back,
            self.size,
            self.dim,
            T::one() - eta,
            w_nb,
        );
        for &c in charges {
            self.back[c] += T::one();
        }
        std::mem::swap(&mut self.front, &mut self.back);
    }

    /// Same update as [`ScalarField::update`] with an arbitrary source
    /// density over the whole lattice, walking the precomputed neighbor
    /// table of `lattice`. Serves as the reference for the row stencil.
    pub fn update_with_table(&mut self, lattice: &Lattice, source: &[T], eta: T) {
        assert_eq!(lattice.cells(), self.front.len());
        assert_eq!(source.len(), self.front.len());
        let w_self = T::one() - eta;
        let w_nb = eta / T::of(lattice.degree() as f64);
        for (i, out) in self.back.iter_mut().enumerate() {
            let nb = lattice.neighbor_table(i);
            let mut s = self.front[nb[0] as usize] + self.front[nb[1] as usize];
            for &j in &nb[2..] {
                s += self.front[j as usize];
            }
            *out = w_self * self.front[i] + w_nb * s + source[i];
        }
        std::mem::swap(&mut self.front, &mut self.back);
    }

    /// Shifts the field down by its minimum when its magnitude exceeds
    /// [`FIELD_GUARD`]. Returns whether a shift happened.
    pub fn guard(&mut self) -> bool {
        if self.max_abs() <= T::of(FIELD_GUARD) {
            return false;
        }
        let min = self.front.iter().fold(T::infinity(), |m, &v| m.min(v));
        debug!("field magnitude above guard, shifting by {min}");
        self.shift(-min);
        true
    }
}

/// Writes `w_self * src[x] + w_nb * sum_{y ~ x} src[y]` into `dst`.
///
/// Works row by row along axis 0. The neighbor sum is accumulated in the
/// fixed order `+e0, -e0, +e1, -e1, +e2, -e2`, matching the neighbor table.
fn stencil<T: Real>(src: &[T], dst: &mut [T], l: usize, dim: usize, w_self: T, w_nb: T) {
    let rows = src.len() / l;
    for r in 0..rows {
        let base = r * l;
        let cur = &src[base..base + l];
        let out = &mut dst[base..base + l];

        out[0] = cur[1] + cur[l - 1];
        out[l - 1] = cur[0] + cur[l - 2];
        for ((o, &right), &left) in out[1..l - 1].iter_mut().zip(&cur[2..]).zip(&cur[..l - 2]) {
            *o = right + left;
        }

        let mut rem = r;
        let mut row_stride = 1;
        for _axis in 1..dim {
            let c = rem % l;
            rem /= l;
            let plus = base + ((c + 1) % l) * row_stride * l - c * row_stride * l;
            let minus = base + ((c + l - 1) % l) * row_stride * l - c * row_stride * l;
            for nb in [plus, minus] {
                for (o, &v) in out.iter_mut().zip(&src[nb..nb + l]) {
                    *o += v;
                }
            }
            row_stride *= l;
        }

        for (o, &v) in out.iter_mut().zip(cur) {
            *o = w_self * v + w_nb * *o;
        }
    }
}

/// Pure form of a single field update with the charges of `q`.
pub fn field_update<T: Real>(phi: &ScalarField<T>, q: &ChargeField, eta: T) -> ScalarField<T> {
    assert_eq!(
        phi.size,
        q.size(),
        "field and charges on different lattices"
    );
    let mut out = phi.clone();
    out.update(&q.anyons(), eta);
    out
}

/// How the number of field updates per sequence is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum VelocitySchedule {
    /// Fixed `c` for every sequence.
    Constant(u32),
    /// `c = round(offset + slope * tau)`, growing with the sequence index.
    Growing { slope: f64, offset: f64 },
    /// `c = round(prefactor * log_base(L)^2)`, fixed per lattice size.
    LogSquared { prefactor: f64, log_base: f64 },
}

impl VelocitySchedule {
    /// Growing schedule `1 + 0.2 tau`.
    pub const TWO_D_STAR: VelocitySchedule = VelocitySchedule::Growing {
        slope: 0.2,
        offset: 1.0,
    };
    /// `10 ln(L)^2`.
    pub const THREE_D: VelocitySchedule = VelocitySchedule::LogSquared {
        prefactor: 10.0,
        log_base: std::f64::consts::E,
    };

    /// Field velocity of sequence `tau` (counted from 0). Never below 1.
    pub fn resolve(&self, tau: usize, size: usize) -> u32 {
        let raw = match *self {
            VelocitySchedule::Constant(c) => return c.max(1),
            VelocitySchedule::Growing { slope, offset } => offset + slope * tau as f64,
            VelocitySchedule::LogSquared {
                prefactor,
                log_base,
            } => {
                let lg = (size as f64).ln() / log_base.ln();
                prefactor * lg * lg
            }
        };
        raw.round().max(1.0) as u32
    }

    /// Short label used in benchmark output.
    pub fn describe(&self, size: usize) -> String {
        match *self {
            VelocitySchedule::Constant(c) => c.to_string(),
            VelocitySchedule::Growing { slope, offset } => format!("{offset}+{slope}*tau"),
            VelocitySchedule::LogSquared { .. } => self.resolve(0, size).to_string(),
        }
    }
}

pub fn resolve_velocity(schedule: &VelocitySchedule, tau: usize, size: usize) -> u32 {
    schedule.resolve(tau, size)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecoderConfig<T> {
    pub eta: T,
    pub schedule: VelocitySchedule,
    /// Dimension of the auxiliary field lattice, 2 or 3.
    pub aux_dim: usize,
    pub abort_sequences: usize,
    pub hop_probability: f64,
}

impl<T: Real> DecoderConfig<T> {
    /// Constant-velocity 2D automaton, aborting after `10 L` sequences.
    pub fn two_d(c: u32, size: usize) -> Self {
        Self {
            eta: T::of(0.5),
            schedule: VelocitySchedule::Constant(c),
            aux_dim: 2,
            abort_sequences: 10 * size,
            hop_probability: 0.5,
        }
    }

    /// 2D automaton with `c = 1 + 0.2 tau`, aborting after `10 L` sequences.
    pub fn two_d_star(size: usize) -> Self {
        Self {
            schedule: VelocitySchedule::TWO_D_STAR,
            ..Self::two_d(1, size)
        }
    }

    /// 3D automaton with `c = 10 ln(L)^2`, aborting after `L` sequences.
    pub fn three_d(size: usize) -> Self {
        Self {
            eta: T::of(0.5),
            schedule: VelocitySchedule::THREE_D,
            aux_dim: 3,
            abort_sequences: size,
            hop_probability: 0.5,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let eta = self.eta.to_f64_lossy();
        if !(eta > 0.0 && eta <= 0.5) {
            return Err(Error::InvalidEta(eta));
        }
        if !(2..=3).contains(&self.aux_dim) {
            return Err(Error::UnsupportedDimension(self.aux_dim));
        }
        if !(0.0..=1.0).contains(&self.hop_probability) {
            return Err(Error::InvalidProbability(self.hop_probability));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DecodeStatus {
    Success,
    LogicalFailure,
    Abort,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DecodeOutcome {
    pub status: DecodeStatus,
    pub sequences_used: usize,
    /// Field updates plus anyon updates performed.
    pub elementary_updates: u64,
    pub residual_anyons: usize,
}

impl DecodeOutcome {
    pub fn failed(&self) -> bool {
        self.status != DecodeStatus::Success
    }
}

/// Index of the strict unique maximum, if there is one.
#[inline]
pub fn unique_argmax<T: PartialOrd + Copy>(values: &[T]) -> Option<usize> {
    let mut best = 0;
    let mut tied = false;
    for (i, v) in values.iter().enumerate().skip(1) {
        if *v > values[best] {
            best = i;
            tied = false;
        } else if *v == values[best] {
            tied = true;
        }
    }
    (!tied).then_some(best)
}

/// What an anyon does when its best neighbor value is shared.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum TieBreak {
    /// Only a strict unique maximum is a hop target.
    #[default]
    Stay,
    /// Tied maxima are chosen between uniformly. A flat neighborhood, where
    /// every candidate holds the maximum, still never moves.
    Uniform,
}

/// Candidate slot to hop to under `ties`, drawing from `rng` only when a
/// choice between tied maxima is needed. `None` means stay.
#[inline]
pub fn pick_target<T, R>(values: &[T], ties: TieBreak, rng: &mut R) -> Option<usize>
where
    T: PartialOrd + Copy,
    R: Rng + ?Sized,
{
    match ties {
        TieBreak::Stay => unique_argmax(values),
        TieBreak::Uniform => {
            let mut best = values[0];
            for &v in &values[1..] {
                if v > best {
                    best = v;
                }
            }
            let tied = values.iter().filter(|&&v| v == best).count();
            if tied == values.len() {
                None
            } else if tied == 1 {
                values.iter().position(|&v| v == best)
            } else {
                let k = rng.gen_range(0..tied);
                values
                    .iter()
                    .enumerate()
                    .filter(|(_, &v)| v == best)
                    .nth(k)
                    .map(|(i, _)| i)
            }
        }
    }
}

/// Decides the hops of all anyons from a frozen snapshot.
///
/// `score(anyon, neighbor)` returns the value an anyon sees on a neighbor
/// cell. Anyons are visited in ascending cell order and a coin is drawn only
/// for anyons that have a unique best neighbor.
pub fn decide_hops<T, R, F>(
    size: usize,
    anyons: &[usize],
    hop_probability: f64,
    rng: &mut R,
    score: F,
    out: &mut Vec<(usize, Direction)>,
) where
    T: PartialOrd + Copy,
    R: Rng + ?Sized,
    F: FnMut(usize, usize) -> T,
{
    decide_hops_with(
        size,
        anyons,
        hop_probability,
        TieBreak::Stay,
        rng,
        score,
        out,
    )
}

/// [`decide_hops`] with an explicit tie policy. Under [`TieBreak::Uniform`]
/// the hop coin is drawn first and the tied target afterwards.
pub fn decide_hops_with<T, R, F>(
    size: usize,
    anyons: &[usize],
    hop_probability: f64,
    ties: TieBreak,
    rng: &mut R,
    mut score: F,
    out: &mut Vec<(usize, Direction)>,
) where
    T: PartialOrd + Copy,
    R: Rng + ?Sized,
    F: FnMut(usize, usize) -> T,
{
    out.clear();
    for &a in anyons {
        let vals = Direction::ALL.map(|d| score(a, toric::step(size, a, d)));
        match ties {
            TieBreak::Stay => {
                if let Some(best) = unique_argmax(&vals) {
                    if rng.gen_bool(hop_probability) {
                        out.push((a, Direction::from_slot(best)));
                    }
                }
            }
            TieBreak::Uniform => {
                if vals.iter().all(|v| *v == vals[0]) {
                    continue;
                }
                if rng.gen_bool(hop_probability) {
                    if let Some(best) = pick_target(&vals, ties, rng) {
                        out.push((a, Direction::from_slot(best)));
                    }
                }
            }
        }
    }
}

/// Applies hops as link flips. The charge field is updated by toggling both
/// ends of every flipped link, which equals recomputing the syndrome.
pub fn apply_hops(
    hops: &[(usize, Direction)],
    recovery: &mut ErrorConfig,
    charges: &mut ChargeField,
) {
    let size = charges.size();
    for &(cell, dir) in hops {
        recovery.toggle_link(cell, dir);
        charges.toggle(cell);
        charges.toggle(toric::step(size, cell, dir));
    }
}

/// Plane values of a field: the whole field for 2D, the `x2 = 0` slice for 3D.
#[inline]
fn plane<T>(phi: &ScalarField<T>) -> &[T] {
    &phi.front[..phi.size * phi.size]
}

/// One parallel anyon update. Returns the new error configuration and its
/// syndrome.
pub fn anyon_update<T: Real, R: Rng + ?Sized>(
    phi: &ScalarField<T>,
    e: &ErrorConfig,
    q: &ChargeField,
    hop_probability: f64,
    rng: &mut R,
) -> Result<(ErrorConfig, ChargeField)> {
    if e.syndrome() != *q {
        return Err(Error::SyndromeMismatch);
    }
    if phi.size != e.size() {
        return Err(Error::LatticeMismatch(phi.size, phi.dim, e.size(), 2));
    }
    let values = plane(phi);
    let mut hops = Vec::new();
    decide_hops(
        e.size(),
        &q.anyons(),
        hop_probability,
        rng,
        |_, n| values[n],
        &mut hops,
    );
    let mut e_next = e.clone();
    let mut scratch = q.clone();
    apply_hops(&hops, &mut e_next, &mut scratch);
    let q_next = e_next.syndrome();
    debug_assert_eq!(q_next, scratch);
    Ok((e_next, q_next))
}

/// Reusable decoder state for one lattice size and configuration.
#[derive(Debug, Clone)]
pub struct Decoder<T> {
    cfg: DecoderConfig<T>,
    size: usize,
    field: ScalarField<T>,
    anyons: Vec<usize>,
    hops: Vec<(usize, Direction)>,
}

impl<T: Real> Decoder<T> {
    pub fn new(size: usize, cfg: DecoderConfig<T>) -> Result<Self> {
        cfg.validate()?;
        Ok(Self {
            field: ScalarField::zeros(size, cfg.aux_dim)?,
            cfg,
            size,
            anyons: Vec::new(),
            hops: Vec::new(),
        })
    }

    pub fn config(&self) -> &DecoderConfig<T> {
        &self.cfg
    }

    pub fn field(&self) -> &ScalarField<T> {
        &self.field
    }

    /// Decodes `e`, returning the outcome and the accumulated recovery.
    pub fn run<R: Rng + ?Sized>(
        &mut self,
        e: &ErrorConfig,
        rng: &mut R,
    ) -> Result<(DecodeOutcome, ErrorConfig)> {
        if e.size() != self.size {
            return Err(Error::LatticeMismatch(self.size, 2, e.size(), 2));
        }
        let mut recovery = ErrorConfig::empty(self.size);
        let mut q = e.syndrome();
        q.anyons_into(&mut self.anyons);
        self.field.fill(T::zero());

        let mut tau = 0;
        let mut updates = 0u64;
        while !self.anyons.is_empty() && tau < self.cfg.abort_sequences {
            let c = self.cfg.schedule.resolve(tau, self.size);
            for _ in 0..c {
                self.field.update(&self.anyons, self.cfg.eta);
            }
            let values = plane(&self.field);
            decide_hops(
                self.size,
                &self.anyons,
                self.cfg.hop_probability,
                rng,
                |_, n| values[n],
                &mut self.hops,
            );
            apply_hops(&self.hops, &mut recovery, &mut q);
            q.anyons_into(&mut self.anyons);
            self.field.guard();
            tau += 1;
            updates += u64::from(c) + 1;
        }

        let outcome = classify(e, &recovery, self.anyons.len(), tau, updates)?;
        Ok((outcome, recovery))
    }
}

pub(crate) fn classify(
    e: &ErrorConfig,
    recovery: &ErrorConfig,
    residual: usize,
    sequences: usize,
    updates: u64,
) -> Result<DecodeOutcome> {
    let status = if residual > 0 {
        DecodeStatus::Abort
    } else if e.xor(recovery)?.logical_failure()? {
        DecodeStatus::LogicalFailure
    } else {
        DecodeStatus::Success
    };
    Ok(DecodeOutcome {
        status,
        sequences_used: sequences,
        elementary_updates: updates,
        residual_anyons: residual,
    })
}

/// Runs a full decode of `e` from a zero field.
pub fn decode<T: Real, R: Rng + ?Sized>(
    e: &ErrorConfig,
    cfg: &DecoderConfig<T>,
    rng: &mut R,
) -> Result<(DecodeOutcome, ErrorConfig)> {
    Decoder::new(e.size(), cfg.clone())?.run(e, rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::TorusIndex;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn tie_policies() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let flat = [1.0, 1.0, 1.0, 1.0];
        assert_eq!(pick_target(&flat, TieBreak::Stay, &mut rng), None);
        assert_eq!(pick_target(&flat, TieBreak::Uniform, &mut rng), None);
        let unique = [0.0, 2.0, 1.0, 2.5];
        assert_eq!(pick_target(&unique, TieBreak::Stay, &mut rng), Some(3));
        assert_eq!(pick_target(&unique, TieBreak::Uniform, &mut rng), Some(3));
        let tied = [3.0, 1.0, 3.0, 0.0];
        assert_eq!(pick_target(&tied, TieBreak::Stay, &mut rng), None);
        let mut seen = [0usize; 4];
        for _ in 0..400 {
            seen[pick_target(&tied, TieBreak::Uniform, &mut rng).unwrap()] += 1;
        }
        assert_eq!(seen[1] + seen[3], 0);
        assert!(seen[0] > 150 && seen[2] > 150, "{seen:?}");
    }

    #[test]
    fn first_two_updates_by_hand() {
        let q = ChargeField::from_cells(3, &[0]);
        let phi0 = ScalarField::<f64>::zeros(3, 2).unwrap();
        let phi1 = field_update(&phi0, &q, 0.5);
        let mut want = vec![0.0; 9];
        want[0] = 1.0;
        assert_eq!(phi1.values(), want.as_slice());

        let phi2 = field_update(&phi1, &q, 0.5);
        want[0] = 1.5;
        // on L=3 the +x and -x neighbors of (0,0) are distinct cells
        for n in [1, 2, 3, 6] {
            want[n] = 0.125;
        }
        assert_eq!(phi2.values(), want.as_slice());
    }

    #[test]
    fn uniform_field_is_fixed_without_charges() {
        for dim in [1, 2, 3] {
            let mut phi = ScalarField::<f64>::zeros(4, dim).unwrap();
            phi.fill(3.25);
            phi.update(&[], 0.5);
            assert!(phi.values().iter().all(|&v| v == 3.25));
        }
    }

    #[test]
    fn stencil_matches_table() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for (l, d) in [(3, 1), (5, 1), (3, 2), (7, 2), (3, 3), (5, 3)] {
            let lattice = Lattice::new(l, d).unwrap();
            let vals: Vec<f64> = (0..lattice.cells())
                .map(|_| rng.gen_range(-2.0..2.0))
                .collect();
            let charges: Vec<usize> = (0..lattice.cells().min(l * l))
                .filter(|i| i % 3 == 1)
                .collect();
            let mut source = vec![0.0; lattice.cells()];
            for &c in &charges {
                source[c] = 1.0;
            }
            let mut fast = ScalarField::from_values(l, d, vals.clone()).unwrap();
            let mut slow = ScalarField::from_values(l, d, vals).unwrap();
            for _ in 0..3 {
                fast.update(&charges, 0.3);
                slow.update_with_table(&lattice, &source, 0.3);
            }
            assert_eq!(fast.values(), slow.values(), "L={l} D={d}");
        }
    }

    #[test]
    fn velocity_schedules() {
        assert_eq!(VelocitySchedule::Constant(12).resolve(0, 8), 12);
        assert_eq!(VelocitySchedule::Constant(12).resolve(999, 64), 12);
        assert_eq!(VelocitySchedule::TWO_D_STAR.resolve(0, 8), 1);
        assert_eq!(VelocitySchedule::TWO_D_STAR.resolve(2, 8), 1);
        assert_eq!(VelocitySchedule::TWO_D_STAR.resolve(3, 8), 2);
        assert_eq!(VelocitySchedule::TWO_D_STAR.resolve(10, 8), 3);
        assert_eq!(VelocitySchedule::THREE_D.resolve(0, 20), 90);
        assert_eq!(VelocitySchedule::THREE_D.resolve(7, 3), 12);
        let base2 = VelocitySchedule::LogSquared {
            prefactor: 10.0,
            log_base: 2.0,
        };
        assert_eq!(base2.resolve(0, 16), 160);
        assert_eq!(VelocitySchedule::Constant(0).resolve(0, 8), 1);
        let shrinking = VelocitySchedule::Growing {
            slope: -1.0,
            offset: 1.0,
        };
        assert_eq!(shrinking.resolve(5, 8), 1);
    }

    #[test]
    fn argmax_ties() {
        assert_eq!(unique_argmax(&[1.0, 2.0, 0.0, 2.0]), None);
        assert_eq!(unique_argmax(&[1.0, 2.0, 0.0, 1.5]), Some(1));
        assert_eq!(unique_argmax(&[3.0, 2.0, 3.0, 4.0]), Some(3));
        assert_eq!(unique_argmax(&[0.0, 0.0, 0.0, 0.0]), None);
        assert_eq!(unique_argmax(&[5.0, 0.0, 0.0, 0.0]), Some(0));
    }

    #[test]
    fn flat_field_freezes_anyons() {
        let mut e = ErrorConfig::empty(6);
        e.toggle_link(7, Direction::PlusX);
        e.toggle_link(20, Direction::PlusY);
        let q = e.syndrome();
        let mut phi = ScalarField::<f64>::zeros(6, 2).unwrap();
        phi.fill(1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let (e2, q2) = anyon_update(&phi, &e, &q, 1.0, &mut rng).unwrap();
        assert_eq!(e2, e);
        assert_eq!(q2, q);
    }

    #[test]
    fn swapping_neighbors_cancel() {
        // anyons at (0,0) and (1,0), each seeing the other as the best cell
        let e = ErrorConfig::empty(6)
            .flip_edge(
                &TorusIndex::from_coords(&[0, 0], 6).unwrap(),
                Direction::PlusX,
            )
            .unwrap();
        let q = e.syndrome();
        let mut vals = vec![0.0; 36];
        vals[0] = 5.0;
        vals[1] = 5.0;
        let phi = ScalarField::from_values(6, 2, vals).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let (e2, q2) = anyon_update(&phi, &e, &q, 1.0, &mut rng).unwrap();
        assert_eq!(e2, e);
        assert_eq!(q2, q);
    }

    #[test]
    fn inconsistent_syndrome_is_rejected() {
        let e = ErrorConfig::empty(5);
        let q = ChargeField::from_cells(5, &[0, 1]);
        let phi = ScalarField::<f64>::zeros(5, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(
            anyon_update(&phi, &e, &q, 0.5, &mut rng),
            Err(Error::SyndromeMismatch)
        );
    }

    #[test]
    fn empty_error_needs_no_sequences() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let (out, r) = decode(
            &ErrorConfig::empty(8),
            &DecoderConfig::<f64>::three_d(8),
            &mut rng,
        )
        .unwrap();
        assert_eq!(out.status, DecodeStatus::Success);
        assert_eq!(out.sequences_used, 0);
        assert_eq!(out.elementary_updates, 0);
        assert!(r.is_empty());
    }

    #[test]
    fn config_validation() {
        let mut cfg = DecoderConfig::<f64>::two_d(5, 8);
        assert!(cfg.validate().is_ok());
        cfg.eta = 0.6;
        assert_eq!(cfg.validate(), Err(Error::InvalidEta(0.6)));
        cfg.eta = 0.0;
        assert!(cfg.validate().is_err());
        let mut cfg = DecoderConfig::<f64>::two_d(5, 8);
        cfg.aux_dim = 1;
        assert!(Decoder::new(8, cfg).is_err());
    }

    #[test]
    fn guard_shifts_large_fields() {
        let mut phi = ScalarField::<f64>::from_values(3, 2, vec![2e12; 9]).unwrap();
        phi.values_mut()[4] = 2e12 + 8.0;
        assert!(phi.guard());
        assert_eq!(phi.values()[4], 8.0);
        assert_eq!(phi.values()[0], 0.0);
        assert!(!phi.guard());
    }
}
