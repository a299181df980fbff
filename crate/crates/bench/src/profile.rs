//! Field-profile tables: the stationary kernel, equilibration against its
//! bound, and measured self-interaction times.

use std::io::{self, Write};
use std::str::FromStr;

use toric_ca::analysis::{self, rescale};
use toric_ca::{ChargeField, ScalarField, SpectralModel, TorusIndex};

use crate::output::format_g;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProfileTable {
    Kernel,
    Equilibration,
    SelfInteraction,
}

impl FromStr for ProfileTable {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "kernel" => Ok(ProfileTable::Kernel),
            "equilibration" => Ok(ProfileTable::Equilibration),
            "self-interaction" => Ok(ProfileTable::SelfInteraction),
            _ => Err(format!(
                "unknown table {s:?}, expected kernel, equilibration or self-interaction"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn write_csv<W: Write + ?Sized>(&self, out: &mut W) -> io::Result<()> {
        writeln!(out, "{}", self.header.join(","))?;
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|&v| format_g(v, 9)).collect();
            writeln!(out, "{}", cells.join(","))?;
        }
        Ok(())
    }
}

/// Rescaled stationary field of a unit charge at the origin along `+e0`,
/// and the pull `phi(e0 - y) - phi(-y)` towards a charge at `y = r e0` felt
/// at the origin.
pub fn kernel_table(model: &SpectralModel) -> toric_ca::Result<Table> {
    let kernel = model.kernel();
    let l = model.size() as i64;
    let mut coords = vec![0i64; model.dim()];
    let mut rows = Vec::new();
    for r in 1..=l / 2 {
        coords[0] = r;
        let y = TorusIndex::new(&coords, model.size())?;
        let phi = kernel.values()[model.lattice().flat(&y)];
        let pull = -model.stationary_gradient_at_origin(&y)?[0];
        rows.push(vec![r as f64, phi, pull]);
    }
    Ok(Table {
        header: vec!["r", "phi", "pull"],
        rows,
    })
}

/// Relative distance to the stationary field of a unit charge, starting from
/// a zero field, every `every` updates up to `steps`.
pub fn equilibration_table(
    model: &SpectralModel,
    steps: usize,
    every: usize,
) -> toric_ca::Result<Table> {
    let q = ChargeField::from_cells(model.size(), &[0]);
    let target = model.stationary_field(&q)?;
    let mut phi = ScalarField::zeros(model.size(), model.dim())?;
    let initial = target.norm();
    let every = every.max(1);
    let mut rows = vec![vec![0.0, 1.0, 1.0]];
    for t in 1..=steps {
        phi.update(&[0], model.eta());
        if t % every == 0 {
            let ratio = rescale(&phi).distance(&target) / initial;
            rows.push(vec![t as f64, model.equilibration_bound(t), ratio]);
        }
    }
    Ok(Table {
        header: vec!["t", "bound", "ratio"],
        rows,
    })
}

/// Last update count at which `|phi_t(0) - phi_inf(0)| > eps` after a charge
/// in equilibrium at the origin hops to `-e0`, within `horizon` updates.
/// Zero means the gap never exceeded `eps`.
pub fn measured_self_interaction_time(
    model: &SpectralModel,
    eps: f64,
    horizon: usize,
) -> toric_ca::Result<usize> {
    let l = model.size();
    let mut coords = vec![0i64; model.dim()];
    coords[0] = -1;
    let minus = model.lattice().flat(&TorusIndex::new(&coords, l)?);
    let before = model.kernel();
    let after = model.stationary_field(&ChargeField::from_cells(l, &[minus]))?;
    let mut phi = ScalarField::from_values(l, model.dim(), before.values().to_vec())?;
    let mut last = 0;
    for t in 1..=horizon {
        phi.update(&[minus], model.eta());
        if (rescale(&phi).values()[0] - after.values()[0]).abs() > eps {
            last = t;
        }
    }
    Ok(last)
}

pub fn self_interaction_table(model: &SpectralModel, epsilons: &[f64]) -> toric_ca::Result<Table> {
    let origin = TorusIndex::origin(model.size(), model.dim())?;
    let (d, eta) = (model.dim(), model.eta());
    let mut rows = Vec::new();
    for &eps in epsilons {
        let t_min = analysis::self_interaction_time(d, eta, &origin, eps)?;
        let horizon = (4.0 * t_min).ceil().max(200.0) as usize;
        let measured = measured_self_interaction_time(model, eps, horizon)?;
        rows.push(vec![
            eps,
            analysis::chi(d, eta, &origin)?,
            analysis::chi_prime(d, eta, &origin)?,
            t_min,
            measured as f64,
        ]);
    }
    Ok(Table {
        header: vec!["eps", "chi", "chi_prime", "t_min", "t_measured"],
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_decays() {
        let t = kernel_table(&SpectralModel::new(12, 3, 0.5).unwrap()).unwrap();
        assert_eq!(t.rows.len(), 6);
        for w in t.rows.windows(2) {
            assert!(w[1][1] < w[0][1]);
            assert!(w[1][2] < w[0][2] && w[1][2] > 0.0);
        }
    }

    #[test]
    fn equilibration_stays_under_bound() {
        let t = equilibration_table(&SpectralModel::new(8, 2, 0.5).unwrap(), 200, 10).unwrap();
        assert_eq!(t.rows.len(), 21);
        for row in &t.rows[1..] {
            assert!(row[2] <= row[1] + 1e-12, "{row:?}");
        }
    }

    #[test]
    fn self_interaction_within_bound() {
        let t = self_interaction_table(&SpectralModel::new(8, 3, 0.5).unwrap(), &[0.1]).unwrap();
        let row = &t.rows[0];
        assert!(row[4] <= row[3], "{row:?}");
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        assert!(String::from_utf8(buf)
            .unwrap()
            .starts_with("eps,chi,chi_prime,t_min,t_measured\n"));
    }
}
