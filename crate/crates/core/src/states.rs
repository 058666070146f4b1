//! Named states: the Néel state, scar/thermal superpositions and projected rotated states.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::hilbert::{translate, ConstrainedBasis, Inversion, Momentum, SectorBasis};
use crate::{Error, Result, C64};

/// The space a state lives in.
#[derive(Debug, Clone)]
pub enum Space {
    Chain(Arc<ConstrainedBasis>),
    Sector(Arc<SectorBasis>),
}

impl Space {
    pub fn dim(&self) -> usize {
        match self {
            Space::Chain(b) => b.dim(),
            Space::Sector(s) => s.dim(),
        }
    }
}

/// Unit-norm complex amplitudes over a basis.
#[derive(Debug, Clone)]
pub struct StateVector {
    space: Space,
    amps: Vec<C64>,
}

pub fn norm(v: &[C64]) -> f64 {
    v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
}

/// `<a|b>`
pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

impl StateVector {
    /// Normalizes `amps`; a zero vector or a length mismatch is an error.
    pub fn new(space: Space, mut amps: Vec<C64>) -> Result<Self> {
        if amps.len() != space.dim() {
            return Err(Error::DimensionMismatch {
                expected: space.dim(),
                got: amps.len(),
            });
        }
        let n = norm(&amps);
        if !(n > 1e-300) || !n.is_finite() {
            return Err(Error::InvalidArgument("cannot normalize a zero vector".into()));
        }
        amps.iter_mut().for_each(|a| *a /= n);
        Ok(Self { space, amps })
    }

    pub fn from_real(space: Space, amps: &[f64]) -> Result<Self> {
        Self::new(space, amps.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn on_chain(basis: &Arc<ConstrainedBasis>, amps: Vec<C64>) -> Result<Self> {
        Self::new(Space::Chain(basis.clone()), amps)
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn amps(&self) -> &[C64] {
        &self.amps
    }

    pub fn into_amps(self) -> Vec<C64> {
        self.amps
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    /// The chain basis, if the state is not a sector state.
    pub fn chain_basis(&self) -> Option<&Arc<ConstrainedBasis>> {
        match &self.space {
            Space::Chain(b) => Some(b),
            Space::Sector(_) => None,
        }
    }

    pub fn overlap(&self, other: &StateVector) -> C64 {
        inner(&self.amps, &other.amps)
    }
}

/// Unit amplitude on the configuration with 1s on all odd sites.
pub fn z2_state(basis: &Arc<ConstrainedBasis>) -> Result<StateVector> {
    if !basis.length().is_multiple_of(2) {
        return Err(Error::InvalidArgument("Neel state needs even length".into()));
    }
    let mut amps = vec![C64::new(0.0, 0.0); basis.dim()];
    amps[basis.state_index(basis.z2_config())?] = C64::new(1.0, 0.0);
    StateVector::on_chain(basis, amps)
}

/// `scar_weight * scar + (1 - scar_weight) * thermal`, normalized.
pub fn interpolate(scar: &StateVector, thermal: &StateVector, scar_weight: f64) -> Result<StateVector> {
    if !(0.0..=1.0).contains(&scar_weight) {
        return Err(Error::InvalidArgument(format!(
            "interpolation weight {scar_weight} outside [0, 1]"
        )));
    }
    if scar.dim() != thermal.dim() {
        return Err(Error::DimensionMismatch {
            expected: scar.dim(),
            got: thermal.dim(),
        });
    }
    let amps = scar
        .amps
        .iter()
        .zip(&thermal.amps)
        .map(|(s, t)| s * scar_weight + t * (1.0 - scar_weight))
        .collect();
    StateVector::new(scar.space.clone(), amps)
}

/// Rotation angle of the single-site rotation `exp(-i theta Y / 2)`, in `[0, pi]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct RotationAngle(f64);

impl RotationAngle {
    pub fn new(theta: f64) -> Result<Self> {
        if !(0.0..=PI).contains(&theta) {
            return Err(Error::InvalidArgument(format!(
                "rotation angle {theta} outside [0, pi]"
            )));
        }
        Ok(Self(theta))
    }

    pub fn radians(self) -> f64 {
        self.0
    }

    /// Representative in `[0, pi/2]`; `theta` and `pi - theta` are related by a global flip.
    pub fn canonical(self) -> Self {
        if self.0 > PI / 2.0 {
            Self(PI - self.0)
        } else {
            self
        }
    }
}

/// Which sublattice carries the excitations of the unrotated product state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Anchor {
    /// 1s on odd sites (bits 0, 2, ...).
    OddSites,
    /// 1s on even sites (bits 1, 3, ...).
    EvenSites,
}

/// Amplitude of the rotated product state on one configuration, before projection.
///
/// Each site rotated away from its anchor value contributes `sin(theta/2)`,
/// each site left in place `cos(theta/2)`, and every emptied excitation a
/// minus sign.
pub fn rotated_amplitude(config: u64, length: usize, theta: f64, anchor: Anchor) -> f64 {
    let (s, c) = (theta / 2.0).sin_cos();
    let occupied_parity = match anchor {
        Anchor::OddSites => 0,
        Anchor::EvenSites => 1,
    };
    let mut emptied = 0;
    let mut flipped = 0;
    for b in 0..length {
        let bit = (config >> b) & 1;
        if b % 2 == occupied_parity {
            if bit == 0 {
                emptied += 1;
            }
        } else if bit == 1 {
            flipped += 1;
        }
    }
    let k = emptied + flipped;
    let sign = if emptied % 2 == 0 { 1.0 } else { -1.0 };
    sign * s.powi(k) * c.powi(length as i32 - k)
}

/// Projected rotated Néel state and its survival weight `<phi|P|phi>`.
pub fn rotated_state(basis: &Arc<ConstrainedBasis>, theta: RotationAngle) -> Result<(StateVector, f64)> {
    let length = basis.length();
    if !length.is_multiple_of(2) {
        return Err(Error::InvalidArgument("rotated state needs even length".into()));
    }
    let amps: Vec<C64> = basis
        .configs()
        .iter()
        .map(|&c| C64::new(rotated_amplitude(c, length, theta.radians(), Anchor::OddSites), 0.0))
        .collect();
    let survival = norm(&amps).powi(2);
    Ok((StateVector::on_chain(basis, amps)?, survival))
}

/// Rotated state in the zero-momentum, inversion-even sector.
///
/// The translation-symmetrized rotated state has sector amplitude proportional
/// to `(psi(r) + psi(T r)) / w(r)` on representative `r`, where `w(r)` is the
/// representative's weight in its sector vector.
pub fn rotated_state_sector(sector: &Arc<SectorBasis>, theta: RotationAngle) -> Result<StateVector> {
    if sector.momentum() != Momentum::Zero || sector.inversion() != Inversion::Even {
        return Err(Error::InvalidArgument(
            "rotated states are built in the k = 0, I = +1 sector".into(),
        ));
    }
    let length = sector.parent().length();
    let th = theta.radians();
    let amps = sector
        .representatives()
        .iter()
        .zip(sector.norms())
        .map(|(&r, &w)| {
            let a = rotated_amplitude(r, length, th, Anchor::OddSites);
            let b = rotated_amplitude(translate(r, length), length, th, Anchor::OddSites);
            C64::new((a + b) / w, 0.0)
        })
        .collect();
    StateVector::new(Space::Sector(sector.clone()), amps)
}

/// Embeds a sector state into its parent chain basis.
pub fn expand_sector_state(v: &StateVector) -> Result<StateVector> {
    let Space::Sector(sector) = v.space() else {
        return Err(Error::InvalidArgument("state is not a sector state".into()));
    };
    let amps = expand_amplitudes(sector, v.amps())?;
    StateVector::on_chain(sector.parent_arc(), amps)
}

/// Parent-space amplitudes of sector coefficients `v`.
pub fn expand_amplitudes(sector: &SectorBasis, v: &[C64]) -> Result<Vec<C64>> {
    if v.len() != sector.dim() {
        return Err(Error::DimensionMismatch {
            expected: sector.dim(),
            got: v.len(),
        });
    }
    Ok((0..sector.parent().dim())
        .map(|i| match sector.member(i) {
            Some((a, w)) => v[a] * w,
            None => C64::new(0.0, 0.0),
        })
        .collect())
}

/// Sector coefficients `<a|psi>` of a parent-space vector (not renormalized).
pub fn project_to_sector(sector: &SectorBasis, psi: &[C64]) -> Result<Vec<C64>> {
    if psi.len() != sector.parent().dim() {
        return Err(Error::DimensionMismatch {
            expected: sector.parent().dim(),
            got: psi.len(),
        });
    }
    let mut out = vec![C64::new(0.0, 0.0); sector.dim()];
    for (i, amp) in psi.iter().enumerate() {
        if let Some((a, w)) = sector.member(i) {
            out[a] += amp * w;
        }
    }
    Ok(out)
}

/// Normalized `psi + T psi` on a periodic chain.
pub fn translation_symmetrized(state: &StateVector) -> Result<StateVector> {
    let basis = state
        .chain_basis()
        .ok_or_else(|| Error::InvalidArgument("state is not on a chain basis".into()))?;
    let t = basis.translation_map()?;
    let mut amps = state.amps().to_vec();
    for (i, &j) in t.iter().enumerate() {
        amps[j] += state.amps()[i];
    }
    StateVector::on_chain(basis, amps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{build_chain_basis, build_symmetric_sector, Boundary};
    use crate::operators::{pxp_hamiltonian, staggered_z};

    fn chain(l: usize) -> Arc<ConstrainedBasis> {
        Arc::new(build_chain_basis(l, Boundary::Periodic))
    }

    #[test]
    fn neel_state_l4() {
        let b = chain(4);
        let z2 = z2_state(&b).unwrap();
        assert_eq!(z2.amps()[b.index_of(0b0101).unwrap()], C64::new(1.0, 0.0));
        let h = pxp_hamiltonian(&b).unwrap();
        assert_eq!(h.expectation(z2.amps()).unwrap(), 0.0);
        assert_eq!(staggered_z(&b).expectation(z2.amps()).unwrap(), -4.0);
    }

    #[test]
    fn interpolation_endpoints() {
        let b = chain(4);
        let s = StateVector::from_real(Space::Chain(b.clone()), &[1., 0., 0., 0., 0., 0., 0.]).unwrap();
        let t = StateVector::from_real(Space::Chain(b.clone()), &[0., 1., 0., 0., 0., 0., 0.]).unwrap();
        assert_eq!(interpolate(&s, &t, 1.0).unwrap().amps(), s.amps());
        assert_eq!(interpolate(&s, &t, 0.0).unwrap().amps(), t.amps());
        let half = interpolate(&s, &t, 0.5).unwrap();
        assert!((half.amps()[0].re - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((half.amps()[1].re - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        assert!(interpolate(&s, &t, 1.5).is_err());
    }

    #[test]
    fn rotation_at_zero_is_neel() {
        let b = chain(8);
        let (psi, survival) = rotated_state(&b, RotationAngle::new(0.0).unwrap()).unwrap();
        assert_eq!(survival, 1.0);
        assert_eq!(psi.amps()[b.index_of(b.z2_config()).unwrap()].re, 1.0);
        let (_, s) = rotated_state(&b, RotationAngle::new(0.7).unwrap()).unwrap();
        assert!(s < 1.0);
        assert!(RotationAngle::new(-0.1).is_err());
        assert_eq!(RotationAngle::new(2.5).unwrap().canonical().radians(), PI - 2.5);
    }

    #[test]
    fn anchors_differ_by_one_translation() {
        let l = 10;
        let b = chain(l);
        for &c in b.configs() {
            let a = rotated_amplitude(c, l, 0.9, Anchor::OddSites);
            let e = rotated_amplitude(translate(c, l), l, 0.9, Anchor::EvenSites);
            assert_eq!(a, e);
        }
    }

    #[test]
    fn sector_rotation_at_zero() {
        let sec = Arc::new(build_symmetric_sector(8, Momentum::Zero, Inversion::Even).unwrap());
        let v = rotated_state_sector(&sec, RotationAngle::new(0.0).unwrap()).unwrap();
        let full = expand_sector_state(&v).unwrap();
        let b = sec.parent();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        for (i, &c) in b.configs().iter().enumerate() {
            let want = if c == 0b0101_0101 || c == 0b1010_1010 { h } else { 0.0 };
            assert!((full.amps()[i].re - want).abs() < 1e-14);
        }
        let back = project_to_sector(&sec, full.amps()).unwrap();
        for (x, y) in back.iter().zip(v.amps()) {
            assert!((x - y).norm() < 1e-14);
        }
    }
}
