//! Blockade-constrained configuration spaces.
//!
//! A configuration is a bitmask where bit `i` is the occupation of site `i + 1`
//! (sites are 1-indexed in all parity statements, so bit 0 is an *odd* site).
//! Two occupied sites may never be nearest neighbours; on a periodic chain the
//! first and last sites are neighbours as well.

use std::sync::Arc;

use crate::{Error, Result};

/// Boundary condition of a chain segment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Boundary {
    Periodic,
    Open,
}

#[inline]
fn site_mask(length: usize) -> u64 {
    if length >= 64 {
        u64::MAX
    } else {
        (1u64 << length) - 1
    }
}

/// Whether `config` satisfies the blockade rule on `length` sites.
pub fn is_legal(config: u64, length: usize, boundary: Boundary) -> bool {
    if config & !site_mask(length) != 0 {
        return false;
    }
    if config & (config >> 1) != 0 {
        return false;
    }
    // L = 1 has no neighbour, L = 2 already checked the single bond above.
    if boundary == Boundary::Periodic && length >= 3 {
        let first = config & 1;
        let last = (config >> (length - 1)) & 1;
        if first & last == 1 {
            return false;
        }
    }
    true
}

/// Cyclic translation by one site (site `i` moves to site `i + 1`).
#[inline]
pub fn translate(config: u64, length: usize) -> u64 {
    if length <= 1 {
        return config;
    }
    ((config << 1) | (config >> (length - 1))) & site_mask(length)
}

/// Spatial inversion `i -> L - i + 1`.
#[inline]
pub fn invert(config: u64, length: usize) -> u64 {
    if length == 0 {
        return config;
    }
    config.reverse_bits() >> (64 - length)
}

/// Ordered set of blockade-legal configurations of a chain segment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstrainedBasis {
    length: usize,
    boundary: Boundary,
    configs: Vec<u64>,
}

impl ConstrainedBasis {
    /// Enumerates all legal configurations in ascending bitmask order.
    pub fn new(length: usize, boundary: Boundary) -> Self {
        assert!((1..64).contains(&length), "site count must be in 1..64");
        let mut configs = Vec::new();
        enumerate_open(length, 0, false, &mut configs);
        if boundary == Boundary::Periodic {
            configs.retain(|&c| is_legal(c, length, boundary));
        }
        Self {
            length,
            boundary,
            configs,
        }
    }

    pub fn length(&self) -> usize {
        self.length
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    pub fn dim(&self) -> usize {
        self.configs.len()
    }

    pub fn configs(&self) -> &[u64] {
        &self.configs
    }

    pub fn config(&self, index: usize) -> u64 {
        self.configs[index]
    }

    /// Ordinal of `config`, or `None` when it is not in the basis.
    #[inline]
    pub fn index_of(&self, config: u64) -> Option<usize> {
        self.configs.binary_search(&config).ok()
    }

    /// Ordinal of `config`, distinguishing out-of-range bits from blockade violations.
    pub fn state_index(&self, config: u64) -> Result<usize> {
        if config & !site_mask(self.length) != 0 {
            return Err(Error::ConfigOutOfRange {
                config,
                length: self.length,
            });
        }
        self.index_of(config).ok_or(Error::IllegalConfig {
            config,
            length: self.length,
        })
    }

    /// The Néel configuration with 1s on odd (1-indexed) sites, i.e. bits 0, 2, 4, ...
    pub fn z2_config(&self) -> u64 {
        (0..self.length).step_by(2).fold(0u64, |acc, b| acc | (1 << b))
    }

    /// Index map `i -> index_of(f(config(i)))` of a symmetry acting on configurations.
    pub fn permutation(&self, f: impl Fn(u64) -> u64) -> Result<Vec<usize>> {
        self.configs.iter().map(|&c| self.state_index(f(c))).collect()
    }

    /// Index map of one-site translation (periodic chains only).
    pub fn translation_map(&self) -> Result<Vec<usize>> {
        self.permutation(|c| translate(c, self.length))
    }

    /// Index map of spatial inversion.
    pub fn inversion_map(&self) -> Result<Vec<usize>> {
        self.permutation(|c| invert(c, self.length))
    }
}

// Depth-first enumeration from the most significant bit; zeros are explored
// first so the output is already sorted.
fn enumerate_open(remaining: usize, acc: u64, upper_set: bool, out: &mut Vec<u64>) {
    if remaining == 0 {
        out.push(acc);
        return;
    }
    let bit = remaining - 1;
    enumerate_open(bit, acc, false, out);
    if !upper_set {
        enumerate_open(bit, acc | (1 << bit), true, out);
    }
}

/// Builds the constrained basis of an `length`-site chain.
pub fn build_chain_basis(length: usize, boundary: Boundary) -> ConstrainedBasis {
    ConstrainedBasis::new(length, boundary)
}

/// Ordinal of `config` in `basis`.
pub fn state_index(basis: &ConstrainedBasis, config: u64) -> Result<usize> {
    basis.state_index(config)
}

/// Lattice momentum of a symmetry sector. Only the translation characters
/// reachable by rotated Néel states are supported.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Momentum {
    Zero,
    Pi,
}

impl Momentum {
    /// Parses a momentum given in radians; anything other than 0 or π is rejected.
    pub fn from_radians(k: f64) -> Result<Self> {
        let wrapped = k.rem_euclid(2.0 * std::f64::consts::PI);
        if wrapped.abs() < 1e-12 || (2.0 * std::f64::consts::PI - wrapped).abs() < 1e-12 {
            Ok(Momentum::Zero)
        } else if (wrapped - std::f64::consts::PI).abs() < 1e-12 {
            Ok(Momentum::Pi)
        } else {
            Err(Error::InvalidArgument(format!(
                "momentum {k} is not 0 or pi"
            )))
        }
    }

    fn character(self) -> f64 {
        match self {
            Momentum::Zero => 1.0,
            Momentum::Pi => -1.0,
        }
    }
}

/// Eigenvalue of the inversion operator, `+1` or `-1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Inversion {
    Even,
    Odd,
}

impl Inversion {
    pub fn from_sign(sign: i32) -> Result<Self> {
        match sign {
            1 => Ok(Inversion::Even),
            -1 => Ok(Inversion::Odd),
            _ => Err(Error::InvalidArgument(format!(
                "inversion eigenvalue must be +1 or -1, got {sign}"
            ))),
        }
    }

    fn character(self) -> f64 {
        match self {
            Inversion::Even => 1.0,
            Inversion::Odd => -1.0,
        }
    }
}

/// Symmetry-adapted basis of a (momentum, inversion) sector of a periodic chain.
///
/// Each sector state is the normalized character-weighted sum over the
/// dihedral orbit of its representative, which is the smallest bitmask in the
/// orbit. `norms[a]` is the amplitude of representative `a` inside its own
/// normalized sector vector.
#[derive(Debug, Clone)]
pub struct SectorBasis {
    parent: Arc<ConstrainedBasis>,
    momentum: Momentum,
    inversion: Inversion,
    representatives: Vec<u64>,
    norms: Vec<f64>,
    // parent index -> (sector index, amplitude); None if the config's orbit is
    // annihilated by the sector projector.
    members: Vec<Option<(u32, f64)>>,
}

impl SectorBasis {
    pub fn new(
        parent: Arc<ConstrainedBasis>,
        momentum: Momentum,
        inversion: Inversion,
    ) -> Result<Self> {
        let length = parent.length();
        if parent.boundary() != Boundary::Periodic {
            return Err(Error::InvalidArgument(
                "symmetry sectors need a periodic parent basis".into(),
            ));
        }
        if !length.is_multiple_of(2) {
            return Err(Error::InvalidArgument(format!(
                "symmetry sectors need an even site count, got {length}"
            )));
        }
        let chi_t = momentum.character();
        let chi_i = inversion.character();
        let dim = parent.dim();
        let mut visited = vec![false; dim];
        let mut members = vec![None; dim];
        let mut representatives = Vec::new();
        let mut norms = Vec::new();
        let mut orbit: Vec<(u64, f64)> = Vec::with_capacity(2 * length);

        for start in 0..dim {
            if visited[start] {
                continue;
            }
            let rep = parent.config(start);
            orbit.clear();
            let mut shifted = rep;
            let mut chi = 1.0;
            for _ in 0..length {
                accumulate(&mut orbit, shifted, chi);
                accumulate(&mut orbit, invert(shifted, length), chi * chi_i);
                shifted = translate(shifted, length);
                chi *= chi_t;
            }
            let norm_sq: f64 = orbit.iter().map(|(_, w)| w * w).sum();
            for &(c, _) in &orbit {
                let idx = parent.index_of(c).expect("symmetry images stay legal");
                visited[idx] = true;
            }
            if norm_sq < 1e-20 {
                continue;
            }
            let norm = norm_sq.sqrt();
            let sector_index = representatives.len() as u32;
            let mut rep_amp = 0.0;
            for &(c, w) in &orbit {
                let idx = parent.index_of(c).expect("symmetry images stay legal");
                members[idx] = Some((sector_index, w / norm));
                if c == rep {
                    rep_amp = w / norm;
                }
            }
            representatives.push(rep);
            norms.push(rep_amp);
        }

        Ok(Self {
            parent,
            momentum,
            inversion,
            representatives,
            norms,
            members,
        })
    }

    pub fn parent(&self) -> &ConstrainedBasis {
        &self.parent
    }

    pub fn parent_arc(&self) -> &Arc<ConstrainedBasis> {
        &self.parent
    }

    pub fn momentum(&self) -> Momentum {
        self.momentum
    }

    pub fn inversion(&self) -> Inversion {
        self.inversion
    }

    pub fn dim(&self) -> usize {
        self.representatives.len()
    }

    pub fn representatives(&self) -> &[u64] {
        &self.representatives
    }

    pub fn norms(&self) -> &[f64] {
        &self.norms
    }

    /// Sector index and amplitude of a parent basis state, if it belongs to a
    /// non-vanishing orbit.
    #[inline]
    pub fn member(&self, parent_index: usize) -> Option<(usize, f64)> {
        self.members[parent_index].map(|(a, w)| (a as usize, w))
    }

    /// Parent-space components `(parent index, amplitude)` of sector state `a`.
    pub fn vector(&self, a: usize) -> Vec<(usize, f64)> {
        self.members
            .iter()
            .enumerate()
            .filter_map(|(i, m)| match m {
                Some((s, w)) if *s as usize == a => Some((i, *w)),
                _ => None,
            })
            .collect()
    }
}

fn accumulate(orbit: &mut Vec<(u64, f64)>, config: u64, weight: f64) {
    if let Some(entry) = orbit.iter_mut().find(|(c, _)| *c == config) {
        entry.1 += weight;
    } else {
        orbit.push((config, weight));
    }
}

/// Builds the (momentum, inversion) sector of the periodic `length`-site chain.
pub fn build_symmetric_sector(
    length: usize,
    momentum: Momentum,
    inversion: Inversion,
) -> Result<SectorBasis> {
    if !length.is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!(
            "symmetry sectors need an even site count, got {length}"
        )));
    }
    let parent = Arc::new(ConstrainedBasis::new(length, Boundary::Periodic));
    SectorBasis::new(parent, momentum, inversion)
}

/// A run of consecutive sites on the ring, possibly wrapping past site `L`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Interval {
    pub start: usize,
    pub len: usize,
}

impl Interval {
    pub fn new(start: usize, len: usize) -> Self {
        Self { start, len }
    }

    /// Extracts the bits of this interval, first site in bit 0.
    #[inline]
    pub fn extract(&self, config: u64, length: usize) -> u64 {
        let rotated = if self.start == 0 {
            config
        } else {
            ((config >> self.start) | (config << (length - self.start))) & site_mask(length)
        };
        rotated & site_mask(self.len)
    }

    /// Places interval bits back onto the ring.
    #[inline]
    pub fn deposit(&self, bits: u64, length: usize) -> u64 {
        let bits = bits & site_mask(self.len);
        if self.start == 0 {
            bits
        } else {
            ((bits << self.start) | (bits >> (length - self.start))) & site_mask(length)
        }
    }

    fn sites(&self, length: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).map(move |k| (self.start + k) % length)
    }
}

/// A region of a periodic chain given as disjoint intervals; the complement is derived.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CutGeometry {
    length: usize,
    region: Vec<Interval>,
    complement: Vec<Interval>,
}

impl CutGeometry {
    /// Validates the intervals, merges touching ones and derives the complement.
    pub fn new(length: usize, intervals: &[Interval]) -> Result<Self> {
        if intervals.is_empty() {
            return Err(Error::BadGeometry("region has no intervals".into()));
        }
        let mut inside = vec![false; length];
        for iv in intervals {
            if iv.len == 0 || iv.start >= length || iv.len > length {
                return Err(Error::BadGeometry(format!(
                    "interval {iv:?} does not fit on {length} sites"
                )));
            }
            for s in iv.sites(length) {
                if inside[s] {
                    return Err(Error::BadGeometry(format!("site {s} covered twice")));
                }
                inside[s] = true;
            }
        }
        if inside.iter().all(|&x| x) {
            return Err(Error::BadGeometry(
                "region must leave a nonempty complement".into(),
            ));
        }
        let region = runs(&inside, true);
        let complement = runs(&inside, false);
        Ok(Self {
            length,
            region,
            complement,
        })
    }

    /// Sites `[0, L/2)` against `[L/2, L)`.
    pub fn half_chain(length: usize) -> Self {
        Self::new(length, &[Interval::new(0, length / 2)]).expect("half chain is valid")
    }

    pub fn length(&self) -> usize {
        self.length
    }

    pub fn region(&self) -> &[Interval] {
        &self.region
    }

    pub fn complement(&self) -> &[Interval] {
        &self.complement
    }

    /// Number of sites in the region.
    pub fn region_sites(&self) -> usize {
        self.region.iter().map(|iv| iv.len).sum()
    }

    /// Splits a parent configuration into concatenated region and complement bits.
    pub fn split(&self, config: u64) -> (u64, u64) {
        (
            concat(&self.region, config, self.length),
            concat(&self.complement, config, self.length),
        )
    }

    /// Reassembles a parent configuration from concatenated region and complement bits.
    pub fn merge(&self, region_bits: u64, complement_bits: u64) -> u64 {
        scatter(&self.region, region_bits, self.length)
            | scatter(&self.complement, complement_bits, self.length)
    }
}

/// Splits `config` across the cuts of `geometry`.
///
/// Returns the concatenated region bits, the concatenated complement bits, and
/// whether the pair is compatible: every interval is open-chain legal and no
/// occupied pair straddles a cut (including the periodic wrap).
pub fn split_and_check(config: u64, geometry: &CutGeometry) -> (u64, u64, bool) {
    let (region, complement) = geometry.split(config);
    let compatible = pair_compatible(geometry, region, complement);
    (region, complement, compatible)
}

/// Whether region and complement bits can be merged into a legal parent configuration.
pub fn pair_compatible(geometry: &CutGeometry, region_bits: u64, complement_bits: u64) -> bool {
    let length = geometry.length;
    let segments_legal = |ivs: &[Interval], bits: u64| {
        let mut offset = 0;
        ivs.iter().all(|iv| {
            let seg = (bits >> offset) & site_mask(iv.len);
            offset += iv.len;
            is_legal(seg, iv.len, Boundary::Open)
        })
    };
    if !segments_legal(&geometry.region, region_bits)
        || !segments_legal(&geometry.complement, complement_bits)
    {
        return false;
    }
    let merged = geometry.merge(region_bits, complement_bits);
    is_legal(merged, length, Boundary::Periodic)
}

fn runs(inside: &[bool], want: bool) -> Vec<Interval> {
    let length = inside.len();
    let mut out = Vec::new();
    if inside.iter().all(|&x| x == want) {
        out.push(Interval::new(0, length));
        return out;
    }
    // Start scanning right after a site of the opposite kind so wrapped runs stay whole.
    let anchor = (0..length).find(|&s| inside[s] != want).expect("mixed ring");
    let mut k = 1;
    while k <= length {
        let s = (anchor + k) % length;
        if inside[s] == want {
            let start = s;
            let mut len = 0;
            while k <= length && inside[(anchor + k) % length] == want {
                len += 1;
                k += 1;
            }
            out.push(Interval::new(start, len));
        } else {
            k += 1;
        }
    }
    out.sort_by_key(|iv| iv.start);
    out
}

fn concat(ivs: &[Interval], config: u64, length: usize) -> u64 {
    let mut out = 0;
    let mut offset = 0;
    for iv in ivs {
        out |= iv.extract(config, length) << offset;
        offset += iv.len;
    }
    out
}

fn scatter(ivs: &[Interval], bits: u64, length: usize) -> u64 {
    let mut out = 0;
    let mut offset = 0;
    for iv in ivs {
        out |= iv.deposit(bits >> offset, length);
        offset += iv.len;
    }
    out
}

/// Four consecutive quarters of the ring, with boundaries at `floor(kL/4)`.
pub fn quarters(length: usize) -> [Interval; 4] {
    let b = |k: usize| k * length / 4;
    [
        Interval::new(b(0), b(1) - b(0)),
        Interval::new(b(1), b(2) - b(1)),
        Interval::new(b(2), b(3) - b(2)),
        Interval::new(b(3), b(4) - b(3)),
    ]
}
