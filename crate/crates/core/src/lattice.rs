//! Optical-lattice execution model.
//!
//! Walk state `|j,k>` is stored in key site `((j-1) l, (k-1) l)` of a square
//! grid; the sites in between are buffers that stay empty. Every site has
//! two internal levels, `|0>` (resting) and `|1>` (transported). A pairwise
//! rotation `u` on `(a_p, a_q)` runs in five steps:
//!
//! 1. flip `|0> <-> |1>` at site `p`,
//! 2. shift every `|1>` packet by `(q - p) l` sites, so both packets sit at `q`,
//! 3. apply `u` at `q` on the basis `(|1>, |0>) = (visitor, host)`,
//! 4. shift back,
//! 5. flip at `p` again.
//!
//! Because the shift moves every `|1>` packet on the grid at once, all
//! rotations of a compiled stage (same interval on every row or column) run
//! with a single transport.
//!
//! Rotations are ideal and instantaneous and transport is an exact integer
//! shift, unless a [`NoiseModel`] is set.

use serde::Serialize;
use thiserror::Error;

use crate::csd::Stage;
use crate::linalg::{C2, C64, ZERO};
use crate::state::{NodeDistribution, StateSpace};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LatticeError {
    #[error("invalid lattice configuration: {0}")]
    InvalidConfig(String),
    #[error("site ({x}, {y}) is outside the {extent}x{extent} grid")]
    SiteOutOfRange { x: usize, y: usize, extent: usize },
    #[error("key index {index} is outside 1..={n}")]
    KeyOutOfRange { index: usize, n: usize },
    #[error("transport by {shift} would move |1> amplitude at ({x}, {y}) off the grid")]
    TransportOutOfRange { x: usize, y: usize, shift: isize },
    #[error("pair interaction needs two distinct sites, got {0} twice")]
    SamePair(usize),
    #[error("stage mixes pairing intervals {expected} and {found}")]
    IntervalMismatch { expected: usize, found: usize },
    #[error("line {line} uses key index {index} in more than one rotation")]
    IndexCollision { line: usize, index: usize },
}

/// Default laser wavelength in nm, used only to report polarization angles.
pub const DEFAULT_WAVELENGTH: f64 = 785.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LatticeConfig {
    /// Walk dimension `N`.
    pub n: usize,
    /// Key sites sit on every `spacing`-th site.
    pub spacing: usize,
    pub wavelength: f64,
}

impl LatticeConfig {
    pub fn new(n: usize, spacing: usize) -> Result<Self, LatticeError> {
        if n == 0 {
            return Err(LatticeError::InvalidConfig(
                "walk dimension must be positive".into(),
            ));
        }
        if spacing == 0 {
            return Err(LatticeError::InvalidConfig(
                "spacing must be at least 1".into(),
            ));
        }
        Ok(Self {
            n,
            spacing,
            wavelength: DEFAULT_WAVELENGTH,
        })
    }

    /// Sites per axis: `(N - 1) l + 1`.
    pub fn extent(&self) -> usize {
        (self.n - 1) * self.spacing + 1
    }

    /// Grid coordinate of 1-based key index `i`.
    pub fn key_coord(&self, i: usize) -> usize {
        (i - 1) * self.spacing
    }

    /// Nearest key index (1-based) of a coordinate, ties to the lower index.
    pub fn nearest_key(&self, x: usize) -> usize {
        ((x + (self.spacing - 1) / 2) / self.spacing).min(self.n - 1) + 1
    }

    pub fn is_key_coord(&self, x: usize) -> bool {
        x.is_multiple_of(self.spacing)
    }

    /// Polarization angle producing a shift of `shift` sites.
    pub fn polarization_angle(&self, shift: isize) -> f64 {
        2.0 * std::f64::consts::PI * shift as f64 / self.wavelength
    }
}

/// Imperfections; zero by default.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct NoiseModel {
    /// Relative over-rotation of the flips: the flip becomes
    /// `[[sin a, cos a], [cos a, -sin a]]` with `a = rotation_error * pi / 2`.
    pub rotation_error: f64,
    /// Fraction of each moving packet's probability left one site short of
    /// its destination.
    pub transport_leakage: f64,
}

/// Lines of the grid addressed by a stage.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Axis {
    /// Along row `j`: sites `((j-1) l, y)`, transport moves `y`.
    Row,
    /// Along column `j`: sites `(x, (j-1) l)`, transport moves `x`.
    Column,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LatticeState {
    cfg: LatticeConfig,
    /// `sites[x * extent + y] = [a0, a1]` for levels `|0>` and `|1>`.
    sites: Vec<[C64; 2]>,
    noise: NoiseModel,
}

/// Snapshots after each of the five steps of one pair interaction.
#[derive(Debug, Clone, PartialEq)]
pub struct PairProtocolTrace {
    pub steps: Vec<LatticeState>,
    /// Polarization angle of the forward transport.
    pub theta: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LatticeReadout {
    /// `|0>` amplitudes at the key sites.
    pub state: StateSpace,
    /// `probs[(j-1) * N + (k-1)]`: population integrated over the cell of
    /// sites nearest to key site `(j, k)`, both levels.
    pub state_probs: Vec<f64>,
    pub distribution: NodeDistribution,
}

fn flip_matrix(eps: f64) -> C2 {
    let (s, c) = (eps * std::f64::consts::FRAC_PI_2).sin_cos();
    C2::new(
        C64::new(s, 0.0),
        C64::new(c, 0.0),
        C64::new(c, 0.0),
        C64::new(-s, 0.0),
    )
}

impl LatticeState {
    pub fn empty(cfg: &LatticeConfig) -> Self {
        let e = cfg.extent();
        Self {
            cfg: *cfg,
            sites: vec![[ZERO, ZERO]; e * e],
            noise: NoiseModel::default(),
        }
    }

    /// Places `A[j][k]` in level `|0>` of key site `(j, k)`.
    pub fn load(s: &StateSpace, cfg: &LatticeConfig) -> Self {
        assert_eq!(s.dim(), cfg.n, "state and lattice dimensions differ");
        let mut ls = Self::empty(cfg);
        for j in 1..=cfg.n {
            for k in 1..=cfg.n {
                let idx = ls.index(cfg.key_coord(j), cfg.key_coord(k));
                ls.sites[idx][0] = s.amp(j, k);
            }
        }
        ls
    }

    pub fn config(&self) -> &LatticeConfig {
        &self.cfg
    }

    pub fn set_noise(&mut self, noise: NoiseModel) {
        self.noise = noise;
    }

    fn index(&self, x: usize, y: usize) -> usize {
        x * self.cfg.extent() + y
    }

    fn check_site(&self, x: usize, y: usize) -> Result<usize, LatticeError> {
        let e = self.cfg.extent();
        if x >= e || y >= e {
            return Err(LatticeError::SiteOutOfRange { x, y, extent: e });
        }
        Ok(self.index(x, y))
    }

    /// Amplitude of level `spin` (0 or 1) at site `(x, y)`.
    pub fn amplitude(&self, x: usize, y: usize, spin: usize) -> Result<C64, LatticeError> {
        Ok(self.sites[self.check_site(x, y)?][spin])
    }

    pub fn set_amplitude(
        &mut self,
        x: usize,
        y: usize,
        spin: usize,
        v: C64,
    ) -> Result<(), LatticeError> {
        let i = self.check_site(x, y)?;
        self.sites[i][spin] = v;
        Ok(())
    }

    /// All sites with their two amplitudes, `(x, y, [a0, a1])`.
    pub fn iter_sites(&self) -> impl Iterator<Item = (usize, usize, [C64; 2])> + '_ {
        let e = self.cfg.extent();
        self.sites
            .iter()
            .enumerate()
            .map(move |(i, a)| (i / e, i % e, *a))
    }

    pub fn norm_sqr(&self) -> f64 {
        self.sites
            .iter()
            .map(|a| a[0].norm_sqr() + a[1].norm_sqr())
            .sum()
    }

    pub fn spin_one_population(&self) -> f64 {
        self.sites.iter().map(|a| a[1].norm_sqr()).sum()
    }

    /// Population (both levels) outside the key sites.
    pub fn intermediate_population(&self) -> f64 {
        self.iter_sites()
            .filter(|&(x, y, _)| !(self.cfg.is_key_coord(x) && self.cfg.is_key_coord(y)))
            .map(|(_, _, a)| a[0].norm_sqr() + a[1].norm_sqr())
            .sum()
    }

    /// Applies `u` to `(a1, a0)` at each listed site.
    pub fn stirap_rotate(&mut self, sites: &[(usize, usize)], u: &C2) -> Result<(), LatticeError> {
        let idx = sites
            .iter()
            .map(|&(x, y)| self.check_site(x, y))
            .collect::<Result<Vec<_>, _>>()?;
        for i in idx {
            self.rotate_at(i, u);
        }
        Ok(())
    }

    fn rotate_at(&mut self, i: usize, u: &C2) {
        let [a0, a1] = self.sites[i];
        self.sites[i] = [
            u[(1, 0)] * a1 + u[(1, 1)] * a0,
            u[(0, 0)] * a1 + u[(0, 1)] * a0,
        ];
    }

    /// Exchanges `|0>` and `|1>` at each listed site.
    pub fn flip(&mut self, sites: &[(usize, usize)]) -> Result<(), LatticeError> {
        let f = flip_matrix(self.noise.rotation_error);
        self.stirap_rotate(sites, &f)
    }

    /// Moves every `|1>` amplitude by `shift` sites along `axis`; `|0>` stays.
    /// Returns the polarization angle of the move. Without noise, amplitude
    /// that would leave the grid is an error; with noise it is lost.
    pub fn transport(&mut self, axis: Axis, shift: isize) -> Result<f64, LatticeError> {
        let e = self.cfg.extent();
        let theta = self.cfg.polarization_angle(shift);
        if shift == 0 {
            return Ok(theta);
        }
        let target = |c: usize| -> Option<usize> {
            let t = c as isize + shift;
            (t >= 0 && (t as usize) < e).then_some(t as usize)
        };
        let noisy = self.noise != NoiseModel::default();
        if !noisy {
            for (x, y, a) in self.iter_sites() {
                if a[1] != ZERO {
                    let moving = match axis {
                        Axis::Row => y,
                        Axis::Column => x,
                    };
                    if target(moving).is_none() {
                        return Err(LatticeError::TransportOutOfRange { x, y, shift });
                    }
                }
            }
        }
        let mut lost = 0.0;
        let leak = self.noise.transport_leakage;
        let (keep, spill) = (
            C64::new((1.0 - leak).sqrt(), 0.0),
            C64::new(leak.sqrt(), 0.0),
        );
        let mut moved = vec![ZERO; e * e];
        for x in 0..e {
            for y in 0..e {
                let a = self.sites[self.index(x, y)][1];
                if a == ZERO {
                    continue;
                }
                let (tx, ty) = match axis {
                    Axis::Row => target(y).map(|t| (x, t)),
                    Axis::Column => target(x).map(|t| (t, y)),
                }
                .unwrap_or((e, e));
                if tx == e {
                    // stray amplitude carried off the grid by a noisy run
                    lost += a.norm_sqr();
                    continue;
                }
                if leak == 0.0 {
                    moved[self.index(tx, ty)] += a;
                    continue;
                }
                moved[self.index(tx, ty)] += keep * a;
                let back = -shift.signum();
                let (sx, sy) = match axis {
                    Axis::Row => (tx, (ty as isize + back) as usize),
                    Axis::Column => ((tx as isize + back) as usize, ty),
                };
                moved[self.index(sx, sy)] += spill * a;
            }
        }
        for (site, a) in self.sites.iter_mut().zip(moved) {
            site[1] = a;
        }
        if lost > 0.0 {
            log::debug!("transport lost {lost:.3e} probability off the grid");
        }
        log::debug!("transport {axis:?} by {shift} sites, theta = {theta:.6e} rad");
        Ok(theta)
    }

    fn line_site(
        &self,
        axis: Axis,
        line: usize,
        key: usize,
    ) -> Result<(usize, usize), LatticeError> {
        let n = self.cfg.n;
        for index in [line, key] {
            if index == 0 || index > n {
                return Err(LatticeError::KeyOutOfRange { index, n });
            }
        }
        let (a, b) = (self.cfg.key_coord(line), self.cfg.key_coord(key));
        Ok(match axis {
            Axis::Row => (a, b),
            Axis::Column => (b, a),
        })
    }

    /// Applies `u` to the pair `(a_p, a_q)` of key indices `p`, `q` on one
    /// row or column using the five-step protocol.
    pub fn pair_interact(
        &mut self,
        axis: Axis,
        line: usize,
        p: usize,
        q: usize,
        u: &C2,
    ) -> Result<(), LatticeError> {
        self.pair_protocol(axis, line, p, q, u, None).map(|_| ())
    }

    /// As [`pair_interact`](Self::pair_interact), recording every step.
    pub fn pair_interact_traced(
        &mut self,
        axis: Axis,
        line: usize,
        p: usize,
        q: usize,
        u: &C2,
    ) -> Result<PairProtocolTrace, LatticeError> {
        let mut steps = Vec::with_capacity(5);
        let theta = self.pair_protocol(axis, line, p, q, u, Some(&mut steps))?;
        Ok(PairProtocolTrace { steps, theta })
    }

    fn pair_protocol(
        &mut self,
        axis: Axis,
        line: usize,
        p: usize,
        q: usize,
        u: &C2,
        mut trace: Option<&mut Vec<LatticeState>>,
    ) -> Result<f64, LatticeError> {
        if p == q {
            return Err(LatticeError::SamePair(p));
        }
        let visitor = self.line_site(axis, line, p)?;
        let host = self.line_site(axis, line, q)?;
        let shift = (q as isize - p as isize) * self.cfg.spacing as isize;
        let mut record = |s: &Self| {
            if let Some(t) = trace.as_deref_mut() {
                t.push(s.clone());
            }
        };
        self.flip(&[visitor])?;
        record(self);
        let theta = match self.transport(axis, shift) {
            Ok(t) => t,
            Err(e) => {
                self.flip(&[visitor])?;
                return Err(e);
            }
        };
        record(self);
        self.stirap_rotate(&[host], u)?;
        record(self);
        self.transport(axis, -shift)?;
        record(self);
        self.flip(&[visitor])?;
        record(self);
        Ok(theta)
    }

    /// Runs one compiled stage on many rows (or columns) at once: all flips,
    /// one shared transport, per-site rotations, the reverse transport and
    /// the flips back. `lines` pairs a 1-based line index with that line's
    /// stage. Every rotation must pair `p` with `p + interval`.
    pub fn execute_stage(
        &mut self,
        axis: Axis,
        lines: &[(usize, &Stage)],
    ) -> Result<(), LatticeError> {
        let mut interval = None;
        let mut visitors = Vec::new();
        let mut hosts = Vec::new();
        for &(line, stage) in lines {
            let mut used = std::collections::BTreeSet::new();
            for r in &stage.rotations {
                let found = r.q.saturating_sub(r.p);
                match interval {
                    None if found > 0 => interval = Some(found),
                    Some(i) if i == found => {}
                    _ => {
                        return Err(LatticeError::IntervalMismatch {
                            expected: interval.unwrap_or(stage.interval),
                            found,
                        })
                    }
                }
                for index in [r.p, r.q] {
                    if !used.insert(index) {
                        return Err(LatticeError::IndexCollision { line, index });
                    }
                }
                visitors.push(self.line_site(axis, line, r.p)?);
                hosts.push((self.line_site(axis, line, r.q)?, r.u));
            }
        }
        let Some(interval) = interval else {
            return Ok(());
        };
        let shift = interval as isize * self.cfg.spacing as isize;
        self.flip(&visitors)?;
        self.transport(axis, shift)?;
        for ((x, y), u) in &hosts {
            let i = self.index(*x, *y);
            self.rotate_at(i, u);
        }
        self.transport(axis, -shift)?;
        self.flip(&visitors)?;
        Ok(())
    }

    /// Key-site amplitudes and area-integrated populations.
    pub fn read_out(&self) -> LatticeReadout {
        let n = self.cfg.n;
        let mut state = StateSpace::zeros(n);
        for j in 1..=n {
            for k in 1..=n {
                let a = self.sites[self.index(self.cfg.key_coord(j), self.cfg.key_coord(k))][0];
                state.set_amp(j, k, a);
            }
        }
        let mut probs = vec![0.0; n * n];
        for (x, y, a) in self.iter_sites() {
            let (j, k) = (self.cfg.nearest_key(x), self.cfg.nearest_key(y));
            probs[(j - 1) * n + (k - 1)] += a[0].norm_sqr() + a[1].norm_sqr();
        }
        let distribution = NodeDistribution {
            probs: (0..n)
                .map(|j| probs[j * n..(j + 1) * n].iter().sum())
                .collect(),
        };
        LatticeReadout {
            state,
            state_probs: probs,
            distribution,
        }
    }
}
