//! Gate placement on qutrit wires, full-register unitaries, and the
//! line-oriented circuit text format.
//!
//! Circuits list gates in time order (first applied first). The unitary of a
//! circuit is therefore the reversed product, last gate leftmost.

use std::fmt;

use crate::error::{Error, Result};
use crate::gates::{Axis, GateSpec, LevelPair, NcrSubspace, ShiftKind};
use crate::linalg::{digits, pow3, CMat, QState, C64, ZERO};

/// A gate on an ordered list of wires: controls first, target last.
#[derive(Debug, Clone, PartialEq)]
pub struct GateInstance {
    pub spec: GateSpec,
    pub wires: Vec<usize>,
}

impl GateInstance {
    pub fn new(spec: GateSpec, wires: Vec<usize>) -> Result<Self> {
        spec.validate()?;
        if wires.len() != spec.arity() {
            return Err(Error::Arity {
                gate: spec.mnemonic(),
                expected: spec.arity(),
                found: wires.len(),
            });
        }
        for (i, w) in wires.iter().enumerate() {
            if wires[..i].contains(w) {
                return Err(Error::DuplicateWire(*w));
            }
        }
        Ok(GateInstance { spec, wires })
    }

    pub fn check_width(&self, n: usize) -> Result<()> {
        match self.wires.iter().find(|&&w| w >= n) {
            Some(&wire) => Err(Error::WireOutOfRange { wire, width: n }),
            None => Ok(()),
        }
    }

    /// Gates whose product undoes this one, in time order.
    pub fn inverse(&self) -> Vec<GateInstance> {
        let inv = |spec| GateInstance {
            spec,
            wires: self.wires.clone(),
        };
        match self.spec {
            GateSpec::Shift(k) => {
                let (a, b) = k.affine();
                // a⁻¹ = a (mod 3); f⁻¹(x) = a·x − a·b.
                let back = ShiftKind::from_affine(a, (3 - (a * b) % 3) % 3)
                    .expect("affine maps are closed under inversion");
                vec![inv(GateSpec::Shift(back))]
            }
            GateSpec::Rot(axis, pair, t) => vec![inv(GateSpec::Rot(axis, pair, -t))],
            GateSpec::Ncr { n, subspace, theta } => vec![inv(GateSpec::Ncr {
                n,
                subspace,
                theta: -theta,
            })],
            // +1 undone by +2.
            GateSpec::Tkcnot { .. } | GateSpec::Feynman => vec![self.clone(), self.clone()],
            _ => vec![self.clone()],
        }
    }
}

/// Index bookkeeping for a gate on a subset of wires: `full[rest][local]` is
/// the register index whose gate-wire digits encode `local` and whose other
/// digits encode `rest`.
struct Placement {
    full: Vec<Vec<usize>>,
}

impl Placement {
    fn new(wires: &[usize], n: usize) -> Self {
        let k = wires.len();
        let mut full = vec![vec![0usize; pow3(k)]; pow3(n - k)];
        let others: Vec<usize> = (0..n).filter(|q| !wires.contains(q)).collect();
        for idx in 0..pow3(n) {
            let d = digits(idx, n);
            let local = wires.iter().fold(0, |acc, &w| acc * 3 + d[w] as usize);
            let rest = others.iter().fold(0, |acc, &w| acc * 3 + d[w] as usize);
            full[rest][local] = idx;
        }
        Placement { full }
    }
}

/// Full `3^n × 3^n` unitary of `g` acting on its wires, identity elsewhere.
pub fn embed(g: &GateInstance, n: usize) -> Result<CMat> {
    g.check_width(n)?;
    let local = g.spec.matrix()?;
    let place = Placement::new(&g.wires, n);
    let mut out = CMat::zeros(pow3(n), pow3(n));
    for block in &place.full {
        for (lr, &r) in block.iter().enumerate() {
            for (lc, &c) in block.iter().enumerate() {
                out[(r, c)] = local[(lr, lc)];
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    n: usize,
    gates: Vec<GateInstance>,
}

impl Circuit {
    pub fn new(n: usize) -> Self {
        Circuit {
            n,
            gates: Vec::new(),
        }
    }

    pub fn from_gates(n: usize, gates: Vec<GateInstance>) -> Result<Self> {
        let mut c = Circuit::new(n);
        for g in gates {
            c.push(g)?;
        }
        Ok(c)
    }

    pub fn push(&mut self, g: GateInstance) -> Result<()> {
        g.check_width(self.n)?;
        self.gates.push(g);
        Ok(())
    }

    /// Builds and appends a gate in one step.
    pub fn add(&mut self, spec: GateSpec, wires: &[usize]) -> Result<&mut Self> {
        self.push(GateInstance::new(spec, wires.to_vec())?)?;
        Ok(self)
    }

    pub fn width(&self) -> usize {
        self.n
    }

    pub fn gates(&self) -> &[GateInstance] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// Circuit implementing the adjoint: inverted gates in reverse order.
    pub fn inverse(&self) -> Circuit {
        Circuit {
            n: self.n,
            gates: self.gates.iter().rev().flat_map(|g| g.inverse()).collect(),
        }
    }

    /// Appends all gates of `other` after this circuit's gates.
    pub fn then(mut self, other: &Circuit) -> Result<Circuit> {
        if other.n != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: other.n,
            });
        }
        self.gates.extend(other.gates.iter().cloned());
        Ok(self)
    }
}

/// `U_last ⋯ U_first`; identity for an empty circuit.
pub fn circuit_unitary(c: &Circuit) -> Result<CMat> {
    let mut acc = CMat::identity(pow3(c.n));
    for g in &c.gates {
        acc = &embed(g, c.n)? * &acc;
    }
    Ok(acc)
}

/// Gate-by-gate application without forming the full product.
pub fn apply_circuit(c: &Circuit, s: &QState) -> Result<QState> {
    if s.n() != c.n {
        return Err(Error::DimensionMismatch {
            expected: c.n,
            found: s.n(),
        });
    }
    let mut amps = s.clone().into_amplitudes();
    let mut local_in = Vec::new();
    for g in &c.gates {
        let m = g.spec.matrix()?;
        let place = Placement::new(&g.wires, c.n);
        for block in &place.full {
            local_in.clear();
            local_in.extend(block.iter().map(|&i| amps[i]));
            for (lr, &r) in block.iter().enumerate() {
                let mut acc: C64 = ZERO;
                for (lc, &x) in local_in.iter().enumerate() {
                    acc += m[(lr, lc)] * x;
                }
                amps[r] = acc;
            }
        }
    }
    Ok(QState::from_raw(c.n, amps))
}

fn parse_wire(tok: &str, line: usize) -> Result<usize> {
    tok.parse()
        .map_err(|_| Error::parse(line, format!("bad wire `{tok}`")))
}

fn parse_angle(tok: Option<&&str>, line: usize) -> Result<f64> {
    let tok = tok.ok_or_else(|| Error::parse(line, "missing angle"))?;
    let v = angle_value(tok).ok_or_else(|| Error::parse(line, format!("bad angle `{tok}`")))?;
    if !v.is_finite() {
        return Err(Error::parse(line, "angle must be finite"));
    }
    Ok(v)
}

/// Reads a real number or a multiple of π such as `pi`, `-pi/2`, `3*pi/4`, `2pi`.
pub(crate) fn angle_value(tok: &str) -> Option<f64> {
    if let Ok(v) = tok.parse::<f64>() {
        return Some(v);
    }
    let lower = tok.to_ascii_lowercase();
    let (sign, body) = match lower.strip_prefix('-') {
        Some(rest) => (-1.0, rest),
        None => (1.0, lower.strip_prefix('+').unwrap_or(&lower)),
    };
    let (coef, rest) = body.split_once("pi")?;
    let coef = match coef.trim_end_matches('*') {
        "" => 1.0,
        c => c.parse::<f64>().ok()?,
    };
    let denom = match rest {
        "" => 1.0,
        r => r.strip_prefix('/')?.parse::<f64>().ok()?,
    };
    Some(sign * coef * std::f64::consts::PI / denom)
}

fn parse_level(tok: Option<&&str>, line: usize) -> Result<u8> {
    match tok.and_then(|t| t.parse::<u8>().ok()) {
        Some(l) if l <= 2 => Ok(l),
        _ => Err(Error::parse(line, "expected a level in {0,1,2}")),
    }
}

fn parse_pair(tok: Option<&&str>, line: usize) -> Result<LevelPair> {
    tok.ok_or_else(|| Error::parse(line, "missing level pair"))?
        .parse()
        .map_err(|e: Error| Error::parse(line, e.to_string()))
}

fn parse_count(tok: Option<&&str>, line: usize) -> Result<usize> {
    tok.and_then(|t| t.parse().ok())
        .ok_or_else(|| Error::parse(line, "expected a count"))
}

/// Parses one gate line (without comment) into an instance.
pub fn parse_gate_line(text: &str, line: usize) -> Result<GateInstance> {
    let toks: Vec<&str> = text.split_whitespace().collect();
    let (&head, rest) = toks
        .split_first()
        .ok_or_else(|| Error::parse(line, "empty gate line"))?;
    let wires_of =
        |ts: &[&str]| -> Result<Vec<usize>> { ts.iter().map(|t| parse_wire(t, line)).collect() };

    let (spec, wires) = if let Some(p) = head.strip_prefix("TX") {
        (GateSpec::Tx(parse_pair(Some(&p), line)?), wires_of(rest)?)
    } else if let Some(p) = head.strip_prefix("TH") {
        (GateSpec::Th(parse_pair(Some(&p), line)?), wires_of(rest)?)
    } else if let Some(l) = head.strip_prefix("TZ") {
        (GateSpec::Tz(parse_level(Some(&l), line)?), wires_of(rest)?)
    } else if let Some(k) = ShiftKind::from_mnemonic(head) {
        (GateSpec::Shift(k), wires_of(rest)?)
    } else if let Some(ap) = head.strip_prefix("ROT") {
        let axis: Axis = ap
            .get(..1)
            .ok_or_else(|| Error::parse(line, "missing axis"))?
            .parse()
            .map_err(|e: Error| Error::parse(line, e.to_string()))?;
        let pair = parse_pair(ap.get(1..).as_ref(), line)?;
        let (angle, ws) = rest
            .split_last()
            .ok_or_else(|| Error::parse(line, "missing wire and angle"))?;
        (
            GateSpec::Rot(axis, pair, parse_angle(Some(angle), line)?),
            wires_of(ws)?,
        )
    } else if head == "GCX" {
        let control_value = parse_level(rest.first(), line)?;
        let pair = parse_pair(rest.get(1), line)?;
        (
            GateSpec::Gcx {
                control_value,
                pair,
            },
            wires_of(rest.get(2..).unwrap_or_default())?,
        )
    } else if head == "TKCX" {
        let controls = parse_count(rest.first(), line)?;
        let pair = parse_pair(rest.get(1), line)?;
        (
            GateSpec::Tkcx { controls, pair },
            wires_of(rest.get(2..).unwrap_or_default())?,
        )
    } else if head == "TSUM" {
        (GateSpec::Feynman, wires_of(rest)?)
    } else if head == "TKCNOT" {
        let controls = parse_count(rest.first(), line)?;
        (
            GateSpec::Tkcnot { controls },
            wires_of(rest.get(1..).unwrap_or_default())?,
        )
    } else if let Some(sub) = head.strip_prefix("NCR") {
        let subspace = match sub {
            "01" => NcrSubspace::S01,
            "12" => NcrSubspace::S12,
            _ => return Err(Error::parse(line, format!("bad NCR subspace `{sub}`"))),
        };
        let (angle, ws) = rest
            .split_last()
            .ok_or_else(|| Error::parse(line, "missing wires and angle"))?;
        let wires = wires_of(ws)?;
        (
            GateSpec::Ncr {
                n: wires.len(),
                subspace,
                theta: parse_angle(Some(angle), line)?,
            },
            wires,
        )
    } else {
        return Err(Error::parse(line, format!("unknown gate `{head}`")));
    };
    GateInstance::new(spec, wires).map_err(|e| Error::parse(line, e.to_string()))
}

pub(crate) fn strip_comment(line: &str) -> &str {
    line.split('#').next().unwrap_or("").trim()
}

/// Parses the circuit text format: a `qutrits: n` header, then one gate per
/// line as `<mnemonic> <wire...> [<angle>]`; `#` starts a comment.
pub fn parse_circuit(text: &str) -> Result<Circuit> {
    let mut circuit: Option<Circuit> = None;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = strip_comment(raw);
        if body.is_empty() {
            continue;
        }
        match circuit.as_mut() {
            None => {
                let n = parse_header(body, line)?;
                circuit = Some(Circuit::new(n));
            }
            Some(c) => {
                let g = parse_gate_line(body, line)?;
                c.push(g).map_err(|e| Error::parse(line, e.to_string()))?;
            }
        }
    }
    circuit.ok_or_else(|| Error::parse(0, "missing `qutrits: n` header"))
}

/// Parses a `qutrits: n` header line.
pub(crate) fn parse_header(body: &str, line: usize) -> Result<usize> {
    let value = body
        .strip_prefix("qutrits:")
        .ok_or_else(|| Error::parse(line, "expected `qutrits: n` header"))?;
    match value.trim().parse::<usize>() {
        Ok(n) if n >= 1 => Ok(n),
        _ => Err(Error::parse(
            line,
            "qutrit count must be a positive integer",
        )),
    }
}

impl fmt::Display for GateInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.spec.mnemonic())?;
        for w in &self.wires {
            write!(f, " {w}")?;
        }
        if let Some(t) = self.spec.angle() {
            write!(f, " {t:?}")?;
        }
        Ok(())
    }
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "qutrits: {}", self.n)?;
        for g in &self.gates {
            writeln!(f, "{g}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gates::{feynman, gcx, tx, tz};
    use crate::linalg::{apply, kron};
    use crate::sampling::{random_circuit, random_state, seeded};
    use rand::Rng;

    fn gate(spec: GateSpec, wires: &[usize]) -> GateInstance {
        GateInstance::new(spec, wires.to_vec()).unwrap()
    }

    fn tsum_circuit() -> Circuit {
        let mut c = Circuit::new(2);
        for (m, p) in [
            (1, LevelPair::P12),
            (1, LevelPair::P01),
            (2, LevelPair::P01),
            (2, LevelPair::P12),
        ] {
            c.add(
                GateSpec::Gcx {
                    control_value: m,
                    pair: p,
                },
                &[0, 1],
            )
            .unwrap();
        }
        c
    }

    #[test]
    fn embed_first_wire() {
        let u = embed(&gate(GateSpec::Tx(LevelPair::P01), &[0]), 2).unwrap();
        for a in 0..3 {
            let out = apply(&u, &QState::basis(&[0, a]).unwrap()).unwrap();
            assert_eq!(out, QState::basis(&[1, a]).unwrap());
        }
    }

    #[test]
    fn embed_contiguous_is_kron() {
        let u = embed(&gate(GateSpec::Tx(LevelPair::P01), &[1]), 2).unwrap();
        assert_eq!(u, kron(&CMat::identity(3), &tx(LevelPair::P01)));
        let g = GateSpec::Gcx {
            control_value: 0,
            pair: LevelPair::P02,
        };
        let u3 = embed(&gate(g, &[1, 2]), 3).unwrap();
        assert_eq!(u3, kron(&CMat::identity(3), &gcx(0, LevelPair::P02)));
    }

    #[test]
    fn embed_gcx_matches_block() {
        let g = GateSpec::Gcx {
            control_value: 0,
            pair: LevelPair::P02,
        };
        let u = embed(&gate(g, &[0, 1]), 2).unwrap();
        let full = kron(&CMat::identity(3), &tx(LevelPair::P02));
        for r in 0..9 {
            for c in 0..9 {
                let want = if r / 3 == 0 && c / 3 == 0 {
                    full[(r, c)]
                } else if r == c {
                    crate::linalg::ONE
                } else {
                    ZERO
                };
                assert_eq!(u[(r, c)], want);
            }
        }
    }

    #[test]
    fn embed_reversed_wires() {
        // Control on the second wire: swap levels of the first when it reads 1.
        let g = GateSpec::Gcx {
            control_value: 1,
            pair: LevelPair::P01,
        };
        let u = embed(&gate(g, &[1, 0]), 2).unwrap();
        let out = apply(&u, &QState::basis(&[0, 1]).unwrap()).unwrap();
        assert_eq!(out, QState::basis(&[1, 1]).unwrap());
        let out = apply(&u, &QState::basis(&[0, 2]).unwrap()).unwrap();
        assert_eq!(out, QState::basis(&[0, 2]).unwrap());
    }

    #[test]
    fn embed_errors() {
        let g = gate(GateSpec::Tz(0), &[2]);
        assert!(matches!(embed(&g, 2), Err(Error::WireOutOfRange { .. })));
        let dup = GateInstance::new(
            GateSpec::Gcx {
                control_value: 0,
                pair: LevelPair::P01,
            },
            vec![1, 1],
        );
        assert!(matches!(dup, Err(Error::DuplicateWire(1))));
    }

    #[test]
    fn circuit_unitary_cases() {
        assert_eq!(
            circuit_unitary(&Circuit::new(2)).unwrap(),
            CMat::identity(9)
        );
        assert_eq!(circuit_unitary(&tsum_circuit()).unwrap(), feynman());
        let mut c = Circuit::new(1);
        c.add(GateSpec::Tz(1), &[0]).unwrap();
        assert_eq!(circuit_unitary(&c).unwrap(), tz(1));
    }

    #[test]
    fn apply_circuit_cases() {
        let out = apply_circuit(&tsum_circuit(), &QState::basis(&[1, 1]).unwrap()).unwrap();
        assert_eq!(out, QState::basis(&[1, 2]).unwrap());
        let s = random_state(2, &mut seeded(1));
        assert_eq!(apply_circuit(&Circuit::new(2), &s).unwrap(), s);
        let mut c = Circuit::new(2);
        c.add(
            GateSpec::Gcx {
                control_value: 0,
                pair: LevelPair::P02,
            },
            &[0, 1],
        )
        .unwrap();
        let out = apply_circuit(&c, &QState::basis(&[0, 2]).unwrap()).unwrap();
        assert_eq!(out, QState::basis(&[0, 0]).unwrap());
        assert!(apply_circuit(&c, &random_state(1, &mut seeded(2))).is_err());
    }

    #[test]
    fn apply_circuit_agrees_with_unitary() {
        let mut rng = seeded(11);
        for _ in 0..200 {
            let n = rng.random_range(1..=3);
            let len = rng.random_range(0..=8);
            let c = random_circuit(n, len, &mut rng);
            let s = random_state(n, &mut rng);
            let direct = apply_circuit(&c, &s).unwrap();
            let via = apply(&circuit_unitary(&c).unwrap(), &s).unwrap();
            assert!(direct.max_abs_diff(&via) < 1e-10);
        }
    }

    #[test]
    fn circuit_then_inverse_is_identity() {
        let mut rng = seeded(12);
        for _ in 0..50 {
            let n = rng.random_range(1..=3);
            let c = random_circuit(n, 8, &mut rng);
            let both = c.clone().then(&c.inverse()).unwrap();
            let u = circuit_unitary(&both).unwrap();
            assert!(u.max_abs_diff(&CMat::identity(pow3(n))) < 1e-9);
        }
    }

    #[test]
    fn text_round_trip() {
        let mut rng = seeded(13);
        let c = random_circuit(3, 12, &mut rng);
        let text = c.to_string();
        assert_eq!(parse_circuit(&text).unwrap(), c);
    }

    #[test]
    fn parse_examples() {
        let text = "# TSUM\nqutrits: 2\nGCX 1 12 0 1\nGCX 1 01 0 1  # second\nGCX 2 01 0 1\nGCX 2 12 0 1\n";
        assert_eq!(parse_circuit(text).unwrap(), tsum_circuit());
        let c =
            parse_circuit("qutrits: 3\nROTy02 1 3.5\nNCR12 0 1 2 0.25\nTKCX 2 01 0 1 2\n").unwrap();
        assert_eq!(c.len(), 3);
        assert!(parse_circuit("GCX 1 12 0 1").is_err());
        assert!(parse_circuit("qutrits: 2\nTX01 2\n").is_err());
        assert!(parse_circuit("qutrits: 2\nFOO 0\n").is_err());
        assert!(parse_circuit("qutrits: 0\n").is_err());
    }

    #[test]
    fn angle_notation() {
        use std::f64::consts::PI;
        assert_eq!(angle_value("0.5"), Some(0.5));
        assert_eq!(angle_value("pi"), Some(PI));
        assert_eq!(angle_value("-pi/2"), Some(-PI / 2.0));
        assert_eq!(angle_value("3*pi/4"), Some(3.0 * PI / 4.0));
        assert_eq!(angle_value("2pi"), Some(2.0 * PI));
        assert_eq!(angle_value("pie"), None);
        assert_eq!(angle_value("x"), None);
    }
}
