//! Ternary gate library: TX, TH, TZ, the six shift gates, rotations,
//! GCX, TKCX, TKCNOT, the Feynman (TSUM) gate and the (N−1)-controlled rotation.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::{digits, index_of, pow3, CMat, C64, ONE};

/// Unordered pair of distinct qutrit levels. The discriminant is the
/// single-digit alias used by keys: `0 ↔ (0,1)`, `1 ↔ (0,2)`, `2 ↔ (1,2)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LevelPair {
    P01 = 0,
    P02 = 1,
    P12 = 2,
}

impl LevelPair {
    pub const ALL: [LevelPair; 3] = [LevelPair::P01, LevelPair::P02, LevelPair::P12];

    pub fn from_index(index: u8) -> Option<Self> {
        Self::ALL.get(index as usize).copied()
    }

    /// Accepts either order; rejects equal or out-of-range levels.
    pub fn from_levels(a: u8, b: u8) -> Option<Self> {
        match (a.min(b), a.max(b)) {
            (0, 1) => Some(LevelPair::P01),
            (0, 2) => Some(LevelPair::P02),
            (1, 2) => Some(LevelPair::P12),
            _ => None,
        }
    }

    pub fn index(self) -> u8 {
        self as u8
    }

    pub fn levels(self) -> (usize, usize) {
        match self {
            LevelPair::P01 => (0, 1),
            LevelPair::P02 => (0, 2),
            LevelPair::P12 => (1, 2),
        }
    }

    /// Image of level `k` under the swap of this pair.
    pub fn swap(self, k: u8) -> u8 {
        let (i, j) = self.levels();
        match k as usize {
            x if x == i => j as u8,
            x if x == j => i as u8,
            _ => k,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            LevelPair::P01 => "01",
            LevelPair::P02 => "02",
            LevelPair::P12 => "12",
        }
    }
}

impl std::str::FromStr for LevelPair {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let b = s.as_bytes();
        if b.len() != 2 || !b.iter().all(u8::is_ascii_digit) {
            return Err(Error::invalid(format!("bad level pair `{s}`")));
        }
        LevelPair::from_levels(b[0] - b'0', b[1] - b'0')
            .ok_or_else(|| Error::invalid(format!("bad level pair `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub fn label(self) -> char {
        match self {
            Axis::X => 'x',
            Axis::Y => 'y',
            Axis::Z => 'z',
        }
    }
}

impl std::str::FromStr for Axis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "x" | "X" => Ok(Axis::X),
            "y" | "Y" => Ok(Axis::Y),
            "z" | "Z" => Ok(Axis::Z),
            _ => Err(Error::invalid(format!("bad axis `{s}`"))),
        }
    }
}

/// The six affine level permutations `x ↦ a·x + b (mod 3)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ShiftKind {
    Buffer,
    SingleShift,
    DualShift,
    SelfShift,
    SelfSingleShift,
    SelfDualShift,
}

impl ShiftKind {
    pub const ALL: [ShiftKind; 6] = [
        ShiftKind::Buffer,
        ShiftKind::SingleShift,
        ShiftKind::DualShift,
        ShiftKind::SelfShift,
        ShiftKind::SelfSingleShift,
        ShiftKind::SelfDualShift,
    ];

    /// `(a, b)` of `f(x) = a·x + b`.
    pub fn affine(self) -> (u8, u8) {
        match self {
            ShiftKind::Buffer => (1, 0),
            ShiftKind::SingleShift => (1, 1),
            ShiftKind::DualShift => (1, 2),
            ShiftKind::SelfShift => (2, 0),
            ShiftKind::SelfSingleShift => (2, 1),
            ShiftKind::SelfDualShift => (2, 2),
        }
    }

    pub fn from_affine(a: u8, b: u8) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.affine() == (a % 3, b % 3))
    }

    pub fn apply(self, x: u8) -> u8 {
        let (a, b) = self.affine();
        (a * x + b) % 3
    }

    /// Equivalent product of TX gates, written as a matrix product
    /// (rightmost factor acts first).
    pub fn x_product(self) -> &'static [LevelPair] {
        match self {
            ShiftKind::Buffer => &[],
            ShiftKind::SingleShift => &[LevelPair::P01, LevelPair::P12],
            ShiftKind::DualShift => &[LevelPair::P12, LevelPair::P01],
            ShiftKind::SelfShift => &[LevelPair::P12],
            ShiftKind::SelfSingleShift => &[LevelPair::P01],
            ShiftKind::SelfDualShift => &[LevelPair::P02],
        }
    }

    pub fn mnemonic(self) -> &'static str {
        match self {
            ShiftKind::Buffer => "BUF",
            ShiftKind::SingleShift => "SHIFT+1",
            ShiftKind::DualShift => "SHIFT+2",
            ShiftKind::SelfShift => "SHIFT*2",
            ShiftKind::SelfSingleShift => "SHIFT*2+1",
            ShiftKind::SelfDualShift => "SHIFT*2+2",
        }
    }

    pub fn from_mnemonic(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.mnemonic() == s)
    }
}

/// Two-level subspace rotated by [`ncr`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NcrSubspace {
    S01,
    S12,
}

impl NcrSubspace {
    pub fn label(self) -> &'static str {
        match self {
            NcrSubspace::S01 => "01",
            NcrSubspace::S12 => "12",
        }
    }
}

/// Symbolic gate description.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GateSpec {
    Tx(LevelPair),
    Th(LevelPair),
    Tz(u8),
    Shift(ShiftKind),
    Rot(Axis, LevelPair, f64),
    Gcx {
        control_value: u8,
        pair: LevelPair,
    },
    Tkcx {
        controls: usize,
        pair: LevelPair,
    },
    Tkcnot {
        controls: usize,
    },
    Feynman,
    Ncr {
        n: usize,
        subspace: NcrSubspace,
        theta: f64,
    },
}

impl GateSpec {
    /// Number of qutrits the gate acts on.
    pub fn arity(&self) -> usize {
        match *self {
            GateSpec::Tx(_)
            | GateSpec::Th(_)
            | GateSpec::Tz(_)
            | GateSpec::Shift(_)
            | GateSpec::Rot(..) => 1,
            GateSpec::Gcx { .. } | GateSpec::Feynman => 2,
            GateSpec::Tkcx { controls, .. } | GateSpec::Tkcnot { controls } => controls + 1,
            GateSpec::Ncr { n, .. } => n,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            GateSpec::Tz(l) if l > 2 => {
                Err(Error::invalid(format!("TZ level {l} not in {{0,1,2}}")))
            }
            GateSpec::Gcx { control_value, .. } if control_value > 2 => Err(Error::invalid(
                format!("GCX control value {control_value} not in {{0,1,2}}"),
            )),
            GateSpec::Tkcx { controls: 0, .. } | GateSpec::Tkcnot { controls: 0 } => {
                Err(Error::invalid("controlled gates need at least one control"))
            }
            GateSpec::Ncr { n, .. } if n < 2 => Err(Error::invalid(
                "(N-1)-controlled rotation needs at least two qutrits",
            )),
            GateSpec::Rot(_, _, t) | GateSpec::Ncr { theta: t, .. } if !t.is_finite() => {
                Err(Error::invalid("rotation angle must be finite"))
            }
            _ => Ok(()),
        }
    }

    /// Dense `3^arity × 3^arity` unitary.
    pub fn matrix(&self) -> Result<CMat> {
        self.validate()?;
        Ok(match *self {
            GateSpec::Tx(p) => tx(p),
            GateSpec::Th(p) => th(p),
            GateSpec::Tz(l) => tz(l),
            GateSpec::Shift(k) => shift(k),
            GateSpec::Rot(axis, pair, theta) => rotation(axis, pair, theta),
            GateSpec::Gcx {
                control_value,
                pair,
            } => gcx(control_value, pair),
            GateSpec::Tkcx { controls, pair } => tkcx(controls, pair)?,
            GateSpec::Tkcnot { controls } => tkcnot(controls)?,
            GateSpec::Feynman => feynman(),
            GateSpec::Ncr { n, subspace, theta } => ncr(n, subspace, theta)?,
        })
    }

    /// Gate with its parameters as written in circuit files (wires excluded).
    pub fn mnemonic(&self) -> String {
        match *self {
            GateSpec::Tx(p) => format!("TX{}", p.label()),
            GateSpec::Th(p) => format!("TH{}", p.label()),
            GateSpec::Tz(l) => format!("TZ{l}"),
            GateSpec::Shift(k) => k.mnemonic().to_string(),
            GateSpec::Rot(a, p, _) => format!("ROT{}{}", a.label(), p.label()),
            GateSpec::Gcx {
                control_value,
                pair,
            } => format!("GCX {control_value} {}", pair.label()),
            GateSpec::Tkcx { controls, pair } => format!("TKCX {controls} {}", pair.label()),
            GateSpec::Tkcnot { controls } => format!("TKCNOT {controls}"),
            GateSpec::Feynman => "TSUM".to_string(),
            GateSpec::Ncr { subspace, .. } => format!("NCR{}", subspace.label()),
        }
    }

    pub fn angle(&self) -> Option<f64> {
        match *self {
            GateSpec::Rot(_, _, t) | GateSpec::Ncr { theta: t, .. } => Some(t),
            _ => None,
        }
    }
}

impl fmt::Display for GateSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.mnemonic())?;
        if let Some(t) = self.angle() {
            write!(f, " {t}")?;
        }
        Ok(())
    }
}

/// `X^(ij) = |i⟩⟨j| + |j⟩⟨i| + Σ_{k≠i,j} |k⟩⟨k|`.
pub fn tx(pair: LevelPair) -> CMat {
    let images: Vec<usize> = (0..3u8).map(|k| pair.swap(k) as usize).collect();
    CMat::permutation(&images)
}

/// Ternary Hadamard on the `(i, j)` subspace; real symmetric and involutory.
pub fn th(pair: LevelPair) -> CMat {
    let (i, j) = pair.levels();
    let h = C64::new(FRAC_1_SQRT_2, 0.0);
    let mut m = CMat::zeros(3, 3);
    m[(i, i)] = h;
    m[(i, j)] = h;
    m[(j, i)] = h;
    m[(j, j)] = -h;
    let k = 3 - i - j;
    m[(k, k)] = ONE;
    m
}

/// Diagonal with `−1` at `level`. Panics if `level > 2`.
pub fn tz(level: u8) -> CMat {
    assert!(level <= 2, "TZ level must be 0, 1 or 2");
    let mut d = [ONE; 3];
    d[level as usize] = -ONE;
    CMat::diag(&d)
}

/// Permutation matrix of the shift gate's truth table.
pub fn shift(kind: ShiftKind) -> CMat {
    let images: Vec<usize> = (0..3u8).map(|x| kind.apply(x) as usize).collect();
    CMat::permutation(&images)
}

/// Pauli-like generator `σ_∂^(ij)` embedded in the 3-level space.
pub fn generator(axis: Axis, pair: LevelPair) -> CMat {
    let (i, j) = pair.levels();
    let mut m = CMat::zeros(3, 3);
    match axis {
        Axis::X => {
            m[(i, j)] = ONE;
            m[(j, i)] = ONE;
        }
        Axis::Y => {
            m[(i, j)] = C64::new(0.0, -1.0);
            m[(j, i)] = C64::new(0.0, 1.0);
        }
        Axis::Z => {
            m[(i, i)] = ONE;
            m[(j, j)] = -ONE;
        }
    }
    m
}

/// `R_∂^(ij)(θ) = exp(−i σ_∂^(ij) θ/2)`, identity on the remaining level.
///
/// Because `σ²` is the projector onto the `(i, j)` subspace, the exponential is
/// `cos(θ/2)` on that subspace minus `i·sin(θ/2)·σ`.
pub fn rotation(axis: Axis, pair: LevelPair, theta: f64) -> CMat {
    let (i, j) = pair.levels();
    let (s, c) = (theta / 2.0).sin_cos();
    let sigma = generator(axis, pair);
    let mut m = sigma.scale(C64::new(0.0, -s));
    m[(i, i)] += c;
    m[(j, j)] += c;
    let k = 3 - i - j;
    m[(k, k)] = ONE;
    m
}

/// Permutation of an `n`-qutrit register given as a map on digit strings.
fn digit_permutation(n: usize, f: impl Fn(&mut [u8])) -> CMat {
    let images: Vec<usize> = (0..pow3(n))
        .map(|idx| {
            let mut d = digits(idx, n);
            f(&mut d);
            index_of(&d)
        })
        .collect();
    CMat::permutation(&images)
}

/// `Σ_m |m⟩⟨m| ⊗ (X^(ij) if m = m′ else I)`; control is the first qutrit.
/// Panics if `control_value > 2`.
pub fn gcx(control_value: u8, pair: LevelPair) -> CMat {
    assert!(control_value <= 2, "GCX control value must be 0, 1 or 2");
    digit_permutation(2, |d| {
        if d[0] == control_value {
            d[1] = pair.swap(d[1]);
        }
    })
}

/// `k`-controlled TX: swaps `pair` on the last qutrit when all `k` controls read 2.
pub fn tkcx(controls: usize, pair: LevelPair) -> Result<CMat> {
    if controls == 0 {
        return Err(Error::invalid("TKCX needs at least one control"));
    }
    Ok(digit_permutation(controls + 1, |d| {
        if d[..controls].iter().all(|&c| c == 2) {
            d[controls] = pair.swap(d[controls]);
        }
    }))
}

/// `k`-controlled NOT: adds 1 (mod 3) to the last qutrit when all `k` controls read 2.
pub fn tkcnot(controls: usize) -> Result<CMat> {
    if controls == 0 {
        return Err(Error::invalid("TKCNOT needs at least one control"));
    }
    Ok(digit_permutation(controls + 1, |d| {
        if d[..controls].iter().all(|&c| c == 2) {
            d[controls] = (d[controls] + 1) % 3;
        }
    }))
}

/// Feynman / TSUM gate `|A, B⟩ ↦ |A, A ⊕₃ B⟩`.
pub fn feynman() -> CMat {
    digit_permutation(2, |d| d[1] = (d[0] + d[1]) % 3)
}

/// The real rotation block applied by [`ncr`] (full angle, not half angle).
pub fn ncr_block(subspace: NcrSubspace, theta: f64) -> CMat {
    let (s, c) = theta.sin_cos();
    let (i, j) = match subspace {
        NcrSubspace::S01 => (0, 1),
        NcrSubspace::S12 => (1, 2),
    };
    let mut m = CMat::identity(3);
    m[(i, i)] = C64::new(c, 0.0);
    m[(i, j)] = C64::new(-s, 0.0);
    m[(j, i)] = C64::new(s, 0.0);
    m[(j, j)] = C64::new(c, 0.0);
    m
}

/// `(N−1)`-controlled rotation on `n` qutrits: the block from [`ncr_block`]
/// acts on the last qutrit when the first `n − 1` all read 2.
pub fn ncr(n: usize, subspace: NcrSubspace, theta: f64) -> Result<CMat> {
    if n < 2 {
        return Err(Error::invalid("(N-1)-controlled rotation needs n >= 2"));
    }
    let block = ncr_block(subspace, theta);
    let dim = pow3(n);
    let mut m = CMat::identity(dim);
    // All controls at 2 is the last block of three basis states.
    let base = dim - 3;
    for a in 0..3 {
        for b in 0..3 {
            m[(base + a, base + b)] = block[(a, b)];
        }
    }
    Ok(m)
}
