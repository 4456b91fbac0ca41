//! Plain-text key, state, matrix and job files.
//!
//! All formats are line based; blank lines and `#` comments are ignored.
//!
//! ```text
//! # key: one line per qutrit        # state
//! 2 0 1                             qutrits: 1
//!                                   7.0710678118654757e-1 0.0000000000000000e0
//! # job                             0.0000000000000000e0 0.0000000000000000e0
//! scheme1 y 02 pi                   7.0710678118654757e-1 0.0000000000000000e0
//! ```
//!
//! Job lines:
//! - `scheme1 <y|z> <01|02> <theta>`
//! - `scheme2 <18 reals>`: row-major entries as `re im` pairs
//! - `scheme2 params <9 reals>`: phase and the eight Cartan angles
//! - `scheme3 <m′> <ij> <m|full>`
//! - `scheme4 <circuit file>`: resolved by the caller

use std::fmt::Write as _;
use std::path::PathBuf;

use crate::cartan::{compose, CartanParams};
use crate::circuit::{angle_value, parse_header, strip_comment, Circuit};
use crate::error::{Error, Result};
use crate::gates::{Axis, LevelPair};
use crate::linalg::{pow3, CMat, QState, C64};
use crate::otp::{Key, KeyTriple};
use crate::qhe::EvalJob;

/// Drift tolerated (and silently fixed) when loading a state.
pub const SILENT_RENORM_TOL: f64 = 1e-10;
/// Largest drift accepted when loading a state.
pub const MAX_RENORM_TOL: f64 = 1e-6;

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, strip_comment(l)))
        .filter(|(_, l)| !l.is_empty())
}

fn parse_f64(tok: &str, line: usize) -> Result<f64> {
    match tok.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(Error::parse(line, format!("bad number `{tok}`"))),
    }
}

fn parse_digit(tok: &str, line: usize) -> Result<u8> {
    match tok.parse::<u8>() {
        Ok(d) if d <= 2 => Ok(d),
        _ => Err(Error::parse(
            line,
            format!("expected a digit in 0..=2, got `{tok}`"),
        )),
    }
}

pub fn parse_key(text: &str) -> Result<Key> {
    let mut triples = Vec::new();
    for (line, body) in content_lines(text) {
        let toks: Vec<&str> = body.split_whitespace().collect();
        if toks.len() != 3 {
            return Err(Error::parse(line, "expected `alpha beta delta`"));
        }
        triples.push(KeyTriple {
            alpha: parse_digit(toks[0], line)?,
            beta: parse_digit(toks[1], line)?,
            delta: parse_digit(toks[2], line)?,
        });
    }
    Key::new(triples).map_err(|_| Error::parse(0, "key file has no key lines"))
}

pub fn write_key(k: &Key) -> String {
    k.to_string()
}

/// A loaded state and, if it needed renormalizing by more than
/// [`SILENT_RENORM_TOL`], a message saying so.
#[derive(Debug, Clone)]
pub struct LoadedState {
    pub state: QState,
    pub warning: Option<String>,
}

pub fn parse_state(text: &str) -> Result<LoadedState> {
    let mut lines = content_lines(text);
    let (hline, header) = lines
        .next()
        .ok_or_else(|| Error::parse(0, "missing `qutrits: n` header"))?;
    let n = parse_header(header, hline)?;
    let dim = pow3(n);
    let mut amps = Vec::with_capacity(dim);
    for (line, body) in lines {
        let toks: Vec<&str> = body.split_whitespace().collect();
        if toks.len() != 2 {
            return Err(Error::parse(line, "expected `re im`"));
        }
        amps.push(C64::new(
            parse_f64(toks[0], line)?,
            parse_f64(toks[1], line)?,
        ));
    }
    if amps.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: amps.len(),
        });
    }
    let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    let drift = (norm - 1.0).abs();
    if drift > MAX_RENORM_TOL {
        return Err(Error::invalid(format!(
            "state norm {norm} is not 1 (drift {drift:.3e})"
        )));
    }
    let warning = (drift > SILENT_RENORM_TOL)
        .then(|| format!("state renormalized on load (norm drift {drift:.3e})"));
    Ok(LoadedState {
        state: QState::normalized(n, amps)?,
        warning,
    })
}

pub fn write_state(s: &QState) -> String {
    let mut out = format!("qutrits: {}\n", s.n());
    for a in s.amplitudes() {
        writeln!(out, "{:.16e} {:.16e}", a.re, a.im).expect("writing to a String");
    }
    out
}

/// Square complex matrix: one row per line, entries as `re im` pairs.
pub fn parse_matrix(text: &str) -> Result<CMat> {
    let mut rows: Vec<Vec<C64>> = Vec::new();
    for (line, body) in content_lines(text) {
        let vals = body
            .split_whitespace()
            .map(|t| parse_f64(t, line))
            .collect::<Result<Vec<_>>>()?;
        if vals.len() % 2 != 0 {
            return Err(Error::parse(line, "entries must be `re im` pairs"));
        }
        rows.push(vals.chunks(2).map(|p| C64::new(p[0], p[1])).collect());
    }
    let d = rows.len();
    if d == 0 {
        return Err(Error::parse(0, "empty matrix file"));
    }
    if let Some(bad) = rows.iter().find(|r| r.len() != d) {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: bad.len(),
        });
    }
    Ok(CMat::from_vec(d, d, rows.concat()))
}

pub fn write_matrix(m: &CMat) -> String {
    let mut out = String::new();
    for r in 0..m.rows() {
        let row: Vec<String> = (0..m.cols())
            .map(|c| format!("{:.16e} {:.16e}", m[(r, c)].re, m[(r, c)].im))
            .collect();
        writeln!(out, "{}", row.join("  ")).expect("writing to a String");
    }
    out
}

/// A parsed job line, not yet bound to a key.
#[derive(Debug, Clone, PartialEq)]
pub enum JobSpec {
    Scheme1 {
        axis: Axis,
        pair: LevelPair,
        theta: f64,
    },
    Scheme2 {
        target: CMat,
    },
    Scheme3 {
        m_prime: u8,
        pair: LevelPair,
        m: Option<u8>,
    },
    Scheme4 {
        circuit_path: PathBuf,
    },
}

impl JobSpec {
    /// Attaches a key; `load` resolves the circuit path of a scheme-4 job.
    pub fn bind(
        self,
        key: Key,
        load: impl FnOnce(&std::path::Path) -> Result<Circuit>,
    ) -> Result<EvalJob> {
        let job = match self {
            JobSpec::Scheme1 { axis, pair, theta } => EvalJob::Scheme1 {
                key,
                axis,
                pair,
                theta,
            },
            JobSpec::Scheme2 { target } => EvalJob::Scheme2 { key, target },
            JobSpec::Scheme3 { m_prime, pair, m } => EvalJob::Scheme3 {
                key,
                m_prime,
                pair,
                m,
            },
            JobSpec::Scheme4 { circuit_path } => EvalJob::Scheme4 {
                key,
                circuit: load(&circuit_path)?,
            },
        };
        job.validate()?;
        Ok(job)
    }
}

pub fn parse_job(text: &str) -> Result<JobSpec> {
    let mut lines = content_lines(text);
    let (line, body) = lines
        .next()
        .ok_or_else(|| Error::parse(0, "empty job file"))?;
    if let Some((extra, _)) = lines.next() {
        return Err(Error::parse(extra, "a job file holds exactly one job line"));
    }
    let toks: Vec<&str> = body.split_whitespace().collect();
    let pair = |t: &str| {
        t.parse::<LevelPair>()
            .map_err(|_| Error::parse(line, format!("bad level pair `{t}`")))
    };
    let argc = |k: usize| {
        if toks.len() != k + 1 {
            Err(Error::parse(
                line,
                format!(
                    "`{}` expects {k} arguments, got {}",
                    toks[0],
                    toks.len() - 1
                ),
            ))
        } else {
            Ok(())
        }
    };
    match toks[0].to_ascii_lowercase().as_str() {
        "scheme1" => {
            argc(3)?;
            let axis = toks[1]
                .parse::<Axis>()
                .map_err(|_| Error::parse(line, format!("bad axis `{}`", toks[1])))?;
            let theta = angle_value(toks[3])
                .filter(|t| t.is_finite())
                .ok_or_else(|| Error::parse(line, format!("bad angle `{}`", toks[3])))?;
            Ok(JobSpec::Scheme1 {
                axis,
                pair: pair(toks[2])?,
                theta,
            })
        }
        "scheme2" if toks.get(1) == Some(&"params") => {
            if toks.len() != 11 {
                return Err(Error::parse(line, "`scheme2 params` expects 9 numbers"));
            }
            let vals = toks[2..]
                .iter()
                .map(|t| {
                    angle_value(t).ok_or_else(|| Error::parse(line, format!("bad number `{t}`")))
                })
                .collect::<Result<Vec<_>>>()?;
            let p =
                CartanParams::from_slice(&vals).map_err(|e| Error::parse(line, e.to_string()))?;
            Ok(JobSpec::Scheme2 {
                target: compose(&p),
            })
        }
        "scheme2" => {
            argc(18)?;
            let vals = toks[1..]
                .iter()
                .map(|t| parse_f64(t, line))
                .collect::<Result<Vec<_>>>()?;
            let entries = vals.chunks(2).map(|p| C64::new(p[0], p[1])).collect();
            Ok(JobSpec::Scheme2 {
                target: CMat::from_vec(3, 3, entries),
            })
        }
        "scheme3" => {
            argc(3)?;
            let m = match toks[3] {
                "full" => None,
                t => Some(parse_digit(t, line)?),
            };
            Ok(JobSpec::Scheme3 {
                m_prime: parse_digit(toks[1], line)?,
                pair: pair(toks[2])?,
                m,
            })
        }
        "scheme4" => {
            argc(1)?;
            Ok(JobSpec::Scheme4 {
                circuit_path: PathBuf::from(toks[1]),
            })
        }
        other => Err(Error::parse(line, format!("unknown job kind `{other}`"))),
    }
}
