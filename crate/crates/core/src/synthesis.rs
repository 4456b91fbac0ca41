//! Exact search for GCX-gate sequences realizing two-qutrit permutation gates.
//!
//! Every GCX gate permutes the nine basis states `|q0 q1⟩`, so sequences are
//! searched as products of [`PermTable`]s with exact integer arithmetic. The
//! alphabet holds 18 symbols: control wire × control value × level pair,
//! indexed `9·wire + 3·value + pair`. Among all sequences of a given length the
//! search returns the lexicographically first in that index order.
//!
//! Lengths up to [`EXHAUSTIVE_MAX`] are enumerated depth-first; longer ones use
//! a meet-in-the-middle table keyed by the Lehmer rank of the suffix permutation.

use std::fmt;

use crate::circuit::{Circuit, GateInstance};
use crate::error::{Error, Result};
use crate::gates::{feynman, gcx, tkcnot, GateSpec, LevelPair};
use crate::linalg::CMat;

pub const ALPHABET: usize = 18;
pub const EXHAUSTIVE_MAX: usize = 5;
/// Longest length accepted by [`search_exact`].
pub const SEARCH_MAX: usize = 9;
/// Longest length tried by [`synthesize_named`]; every permutation of the nine
/// basis states is reachable within it.
pub const ESCALATION_MAX: usize = 12;

const FACTORIALS: [usize; 10] = [1, 1, 2, 6, 24, 120, 720, 5040, 40320, 362880];
const PERM_COUNT: usize = 362_880;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Wire {
    First = 0,
    Second = 1,
}

/// One GCX gate on the two-qutrit register.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GcxSymbol {
    pub control: Wire,
    pub value: u8,
    pub pair: LevelPair,
}

impl GcxSymbol {
    pub fn from_index(index: usize) -> Self {
        assert!(index < ALPHABET, "GCX symbol index out of range");
        GcxSymbol {
            control: if index < 9 { Wire::First } else { Wire::Second },
            value: ((index / 3) % 3) as u8,
            pair: LevelPair::from_index((index % 3) as u8).expect("index < 3"),
        }
    }

    pub fn index(&self) -> usize {
        9 * self.control as usize + 3 * self.value as usize + self.pair.index() as usize
    }

    pub fn all() -> impl Iterator<Item = GcxSymbol> {
        (0..ALPHABET).map(GcxSymbol::from_index)
    }

    pub fn gate(&self) -> GateInstance {
        let wires = match self.control {
            Wire::First => vec![0, 1],
            Wire::Second => vec![1, 0],
        };
        GateInstance::new(
            GateSpec::Gcx {
                control_value: self.value,
                pair: self.pair,
            },
            wires,
        )
        .expect("GCX symbols are always valid gates")
    }
}

/// Basis-state permutation of a two-qutrit register: `map[k]` is the image of `|k⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PermTable(pub [u8; 9]);

impl PermTable {
    pub fn identity() -> Self {
        PermTable([0, 1, 2, 3, 4, 5, 6, 7, 8])
    }

    pub fn new(map: [u8; 9]) -> Result<Self> {
        let mut seen = [false; 9];
        for &x in &map {
            if x > 8 || seen[x as usize] {
                return Err(Error::invalid(format!(
                    "{map:?} is not a permutation of 0..9"
                )));
            }
            seen[x as usize] = true;
        }
        Ok(PermTable(map))
    }

    /// Table of `|a, b⟩ ↦ f(a, b)`.
    pub fn from_fn(f: impl Fn(u8, u8) -> (u8, u8)) -> Result<Self> {
        let mut map = [0u8; 9];
        for a in 0..3 {
            for b in 0..3 {
                let (x, y) = f(a, b);
                map[(3 * a + b) as usize] = 3 * x + y;
            }
        }
        PermTable::new(map)
    }

    /// Reads an exact 9×9 permutation matrix.
    pub fn from_matrix(m: &CMat) -> Option<Self> {
        let images = m.as_permutation()?;
        if images.len() != 9 {
            return None;
        }
        let mut map = [0u8; 9];
        for (k, &i) in images.iter().enumerate() {
            map[k] = i as u8;
        }
        Some(PermTable(map))
    }

    pub fn to_matrix(&self) -> CMat {
        let images: Vec<usize> = self.0.iter().map(|&x| x as usize).collect();
        CMat::permutation(&images)
    }

    /// `next ∘ self`: apply `self`, then `next`.
    pub fn then(&self, next: &PermTable) -> PermTable {
        PermTable(self.0.map(|k| next.0[k as usize]))
    }

    pub fn inverse(&self) -> PermTable {
        let mut inv = [0u8; 9];
        for (k, &img) in self.0.iter().enumerate() {
            inv[img as usize] = k as u8;
        }
        PermTable(inv)
    }

    /// Lehmer-code rank in `0..9!`, a perfect hash over all permutations.
    pub fn rank(&self) -> usize {
        let p = &self.0;
        let mut r = 0;
        for i in 0..9 {
            let smaller = p[i + 1..].iter().filter(|&&x| x < p[i]).count();
            r += smaller * FACTORIALS[8 - i];
        }
        r
    }
}

/// Permutation induced by one symbol: swap levels `i, j` on the target wire
/// whenever the control wire reads the control value.
pub fn symbol_perm(s: &GcxSymbol) -> PermTable {
    let (c, t) = match s.control {
        Wire::First => (0, 1),
        Wire::Second => (1, 0),
    };
    let mut map = [0u8; 9];
    for k in 0..9u8 {
        let mut q = [k / 3, k % 3];
        if q[c] == s.value {
            q[t] = s.pair.swap(q[t]);
        }
        map[k as usize] = 3 * q[0] + q[1];
    }
    PermTable(map)
}

/// Symbols in time order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GcxSeq {
    pub symbols: Vec<GcxSymbol>,
}

impl GcxSeq {
    pub fn from_indices(indices: &[usize]) -> Self {
        GcxSeq {
            symbols: indices.iter().map(|&i| GcxSymbol::from_index(i)).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn indices(&self) -> Vec<usize> {
        self.symbols.iter().map(GcxSymbol::index).collect()
    }

    /// Composition of the symbol permutations in time order.
    pub fn perm(&self) -> PermTable {
        self.symbols
            .iter()
            .fold(PermTable::identity(), |acc, s| acc.then(&symbol_perm(s)))
    }

    pub fn to_circuit(&self) -> Circuit {
        Circuit::from_gates(2, self.symbols.iter().map(GcxSymbol::gate).collect())
            .expect("two-wire GCX gates fit a two-qutrit circuit")
    }
}

impl fmt::Display for GcxSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_circuit())
    }
}

struct SymbolTables {
    perms: [PermTable; ALPHABET],
}

impl SymbolTables {
    fn new() -> Self {
        SymbolTables {
            perms: std::array::from_fn(|i| symbol_perm(&GcxSymbol::from_index(i))),
        }
    }
}

/// Depth-first lexicographic enumeration; `visit` returns `true` to stop.
fn enumerate(
    tables: &SymbolTables,
    len: usize,
    current: PermTable,
    path: &mut Vec<u8>,
    visit: &mut impl FnMut(&PermTable, &[u8]) -> bool,
) -> bool {
    if path.len() == len {
        return visit(&current, path);
    }
    for s in 0..ALPHABET {
        path.push(s as u8);
        let next = current.then(&tables.perms[s]);
        if enumerate(tables, len, next, path, visit) {
            return true;
        }
        path.pop();
    }
    false
}

fn search_exhaustive(tables: &SymbolTables, target: &PermTable, len: usize) -> Option<Vec<u8>> {
    let mut found = None;
    let mut path = Vec::with_capacity(len);
    enumerate(
        tables,
        len,
        PermTable::identity(),
        &mut path,
        &mut |p, seq| {
            if p == target {
                found = Some(seq.to_vec());
                true
            } else {
                false
            }
        },
    );
    found
}

fn encode(seq: &[u8]) -> u32 {
    seq.iter()
        .fold(0u32, |acc, &s| acc * ALPHABET as u32 + s as u32)
}

fn decode(mut code: u32, len: usize) -> Vec<u8> {
    let mut out = vec![0u8; len];
    for slot in out.iter_mut().rev() {
        *slot = (code % ALPHABET as u32) as u8;
        code /= ALPHABET as u32;
    }
    out
}

fn search_mitm(tables: &SymbolTables, target: &PermTable, len: usize) -> Option<Vec<u8>> {
    let prefix_len = len / 2;
    let suffix_len = len - prefix_len;

    // First (lexicographically smallest) suffix realizing each permutation.
    const EMPTY: u32 = u32::MAX;
    let mut suffixes = vec![EMPTY; PERM_COUNT];
    let mut path = Vec::with_capacity(suffix_len);
    enumerate(
        tables,
        suffix_len,
        PermTable::identity(),
        &mut path,
        &mut |p, seq| {
            let slot = &mut suffixes[p.rank()];
            if *slot == EMPTY {
                *slot = encode(seq);
            }
            false
        },
    );

    // target = suffix ∘ prefix, so the needed suffix is target ∘ prefix⁻¹.
    let mut found = None;
    let mut path = Vec::with_capacity(prefix_len);
    enumerate(
        tables,
        prefix_len,
        PermTable::identity(),
        &mut path,
        &mut |p, seq| {
            let needed = p.inverse().then(target);
            let code = suffixes[needed.rank()];
            if code != EMPTY {
                let mut full = seq.to_vec();
                full.extend(decode(code, suffix_len));
                found = Some(full);
                true
            } else {
                false
            }
        },
    );
    found
}

fn search_any_length(target: &PermTable, len: usize) -> Option<GcxSeq> {
    let tables = SymbolTables::new();
    let seq = if len <= EXHAUSTIVE_MAX {
        search_exhaustive(&tables, target, len)
    } else {
        search_mitm(&tables, target, len)
    }?;
    let seq = GcxSeq::from_indices(&seq.iter().map(|&s| s as usize).collect::<Vec<_>>());
    debug_assert_eq!(seq.perm(), *target);
    Some(seq)
}

/// Lexicographically first sequence of exactly `length` GCX symbols whose
/// product is `target`, or `None` when no such sequence exists.
pub fn search_exact(target: &PermTable, length: usize) -> Result<Option<GcxSeq>> {
    if length > SEARCH_MAX {
        return Err(Error::SearchBudget(length));
    }
    Ok(search_any_length(target, length))
}

/// Named two-qutrit targets with gate counts claimed for their GCX circuits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NamedTarget {
    /// `|A, B⟩ ↦ |A, A ⊕₃ B⟩`.
    Tsum,
    /// `|A, B⟩ ↦ |B, A⟩`.
    Tswap,
    /// 1-controlled NOT: `+1` on the second qutrit when the first reads 2.
    Cnot1,
    /// `+1` on the second qutrit when the first reads 0 (see [`unconditional_single_shift`]).
    SingleShiftTarget,
}

impl NamedTarget {
    pub const ALL: [NamedTarget; 4] = [
        NamedTarget::Tsum,
        NamedTarget::Tswap,
        NamedTarget::Cnot1,
        NamedTarget::SingleShiftTarget,
    ];

    pub fn name(self) -> &'static str {
        match self {
            NamedTarget::Tsum => "TSUM",
            NamedTarget::Tswap => "TSWAP",
            NamedTarget::Cnot1 => "CNOT1",
            NamedTarget::SingleShiftTarget => "SINGLESHIFT_TARGET",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL
            .into_iter()
            .find(|t| t.name().eq_ignore_ascii_case(s))
    }

    pub fn claimed_count(self) -> usize {
        match self {
            NamedTarget::Tsum => 4,
            NamedTarget::Tswap => 9,
            NamedTarget::Cnot1 | NamedTarget::SingleShiftTarget => 2,
        }
    }

    pub fn table(self) -> PermTable {
        let f: fn(u8, u8) -> (u8, u8) = match self {
            NamedTarget::Tsum => |a, b| (a, (a + b) % 3),
            NamedTarget::Tswap => |a, b| (b, a),
            NamedTarget::Cnot1 => |a, b| (a, if a == 2 { (b + 1) % 3 } else { b }),
            NamedTarget::SingleShiftTarget => |a, b| (a, if a == 0 { (b + 1) % 3 } else { b }),
        };
        PermTable::from_fn(f).expect("named targets are permutations")
    }

    /// Gate-library matrix for targets the library defines.
    pub fn library_matrix(self) -> Option<CMat> {
        match self {
            NamedTarget::Tsum => Some(feynman()),
            NamedTarget::Cnot1 => Some(tkcnot(1).expect("one control")),
            NamedTarget::SingleShiftTarget => {
                Some(&gcx(0, LevelPair::P01) * &gcx(0, LevelPair::P12))
            }
            NamedTarget::Tswap => None,
        }
    }
}

/// `I ⊗ SingleShift`: the unconditional shift of the second qutrit.
pub fn unconditional_single_shift() -> PermTable {
    PermTable::from_fn(|a, b| (a, (b + 1) % 3)).expect("permutation")
}

#[derive(Debug, Clone)]
pub struct SynthesisReport {
    pub target: String,
    pub claimed: Option<usize>,
    pub achieved: usize,
    pub sequence: GcxSeq,
    pub note: Option<String>,
}

impl SynthesisReport {
    pub fn matches_claim(&self) -> bool {
        self.claimed == Some(self.achieved)
    }
}

/// Shortest-first search from `start` up to [`ESCALATION_MAX`].
fn escalate(target: &PermTable, start: usize) -> Option<GcxSeq> {
    (start..=ESCALATION_MAX).find_map(|len| search_any_length(target, len))
}

/// Searches at the claimed count first, then escalates the length up to
/// [`ESCALATION_MAX`], reporting the achieved count against the claim.
pub fn synthesize_named(name: NamedTarget) -> Result<SynthesisReport> {
    let target = name.table();
    let claimed = name.claimed_count();
    let sequence = search_any_length(&target, claimed)
        .or_else(|| escalate(&target, claimed + 1))
        .ok_or_else(|| Error::SynthesisFailed {
            target: name.name().into(),
            max_len: ESCALATION_MAX,
        })?;
    let note = match name {
        NamedTarget::SingleShiftTarget => {
            let shortest = escalate(&unconditional_single_shift(), 0).map(|s| s.len());
            Some(format!(
                "conditional variant (control reads 0); the unconditional I⊗SingleShift needs {} GCX gates",
                shortest.map_or("more than 12".to_string(), |n| n.to_string())
            ))
        }
        _ => None,
    };
    Ok(SynthesisReport {
        target: name.name().into(),
        claimed: Some(claimed),
        achieved: sequence.len(),
        sequence,
        note,
    })
}

/// Shortest realization of a user-supplied table.
pub fn synthesize_table(target: &PermTable) -> Result<SynthesisReport> {
    let sequence = escalate(target, 0).ok_or_else(|| Error::SynthesisFailed {
        target: format!("{:?}", target.0),
        max_len: ESCALATION_MAX,
    })?;
    Ok(SynthesisReport {
        target: format!("{:?}", target.0),
        claimed: None,
        achieved: sequence.len(),
        sequence,
        note: None,
    })
}

/// Parses nine whitespace-separated basis images (`#` comments allowed).
pub fn parse_perm_table(text: &str) -> Result<PermTable> {
    let mut vals = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let body = raw.split('#').next().unwrap_or("");
        for tok in body.split_whitespace() {
            let v: u8 = tok
                .parse()
                .map_err(|_| Error::parse(i + 1, format!("bad basis index `{tok}`")))?;
            vals.push(v);
        }
    }
    let map: [u8; 9] = vals
        .try_into()
        .map_err(|v: Vec<u8>| Error::parse(0, format!("expected 9 entries, got {}", v.len())))?;
    PermTable::new(map)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::circuit_unitary;

    fn sym(control: Wire, value: u8, pair: LevelPair) -> GcxSymbol {
        GcxSymbol {
            control,
            value,
            pair,
        }
    }

    #[test]
    fn alphabet_indexing() {
        let all: Vec<_> = GcxSymbol::all().collect();
        assert_eq!(all.len(), 18);
        for (i, s) in all.iter().enumerate() {
            assert_eq!(s.index(), i);
        }
    }

    #[test]
    fn symbol_perm_examples() {
        let p = symbol_perm(&sym(Wire::First, 0, LevelPair::P02));
        assert_eq!(p.0, [2, 1, 0, 3, 4, 5, 6, 7, 8]);
        // control on the second wire reading 1 swaps first-wire levels 0 and 1
        let p = symbol_perm(&sym(Wire::Second, 1, LevelPair::P01));
        assert_eq!(p.0, [0, 4, 2, 3, 1, 5, 6, 7, 8]);
        for s in GcxSymbol::all() {
            let p = symbol_perm(&s);
            assert_eq!(p.then(&p), PermTable::identity());
        }
    }

    #[test]
    fn symbol_perm_matches_embedded_matrix() {
        for s in GcxSymbol::all() {
            let mut c = Circuit::new(2);
            c.push(s.gate()).unwrap();
            let m = circuit_unitary(&c).unwrap();
            assert_eq!(PermTable::from_matrix(&m), Some(symbol_perm(&s)));
        }
    }

    #[test]
    fn rank_is_a_bijection_on_samples() {
        assert_eq!(PermTable::identity().rank(), 0);
        assert_eq!(
            PermTable([8, 7, 6, 5, 4, 3, 2, 1, 0]).rank(),
            PERM_COUNT - 1
        );
        let mut seen = std::collections::HashSet::new();
        let tables = SymbolTables::new();
        let mut path = Vec::new();
        enumerate(&tables, 3, PermTable::identity(), &mut path, &mut |p, _| {
            seen.insert((p.rank(), *p));
            false
        });
        let ranks: std::collections::HashSet<_> = seen.iter().map(|x| x.0).collect();
        assert_eq!(ranks.len(), seen.len());
    }

    #[test]
    fn tsum_in_four() {
        let seq = search_exact(&NamedTarget::Tsum.table(), 4)
            .unwrap()
            .unwrap();
        assert_eq!(seq.len(), 4);
        assert_eq!(seq.perm(), NamedTarget::Tsum.table());
        assert_eq!(circuit_unitary(&seq.to_circuit()).unwrap(), feynman());
        assert!(search_exact(&NamedTarget::Tsum.table(), 3)
            .unwrap()
            .is_none());
    }

    #[test]
    fn hand_derived_tsum_sequence_is_valid() {
        let seq = GcxSeq {
            symbols: vec![
                sym(Wire::First, 1, LevelPair::P12),
                sym(Wire::First, 1, LevelPair::P01),
                sym(Wire::First, 2, LevelPair::P01),
                sym(Wire::First, 2, LevelPair::P12),
            ],
        };
        assert_eq!(seq.perm(), NamedTarget::Tsum.table());
    }

    #[test]
    fn identity_in_two_is_first_symbol_twice() {
        let seq = search_exact(&PermTable::identity(), 2).unwrap().unwrap();
        assert_eq!(seq.indices(), vec![0, 0]);
        assert_eq!(
            search_exact(&PermTable::identity(), 0)
                .unwrap()
                .unwrap()
                .len(),
            0
        );
        // Each symbol is a single transposition, so odd lengths never give the identity.
        assert!(search_exact(&PermTable::identity(), 3).unwrap().is_none());
    }

    #[test]
    fn cnot1_in_two() {
        let seq = search_exact(&NamedTarget::Cnot1.table(), 2)
            .unwrap()
            .unwrap();
        assert_eq!(
            seq.symbols,
            vec![
                sym(Wire::First, 2, LevelPair::P01),
                sym(Wire::First, 2, LevelPair::P02)
            ]
        );
        assert_eq!(
            circuit_unitary(&seq.to_circuit()).unwrap(),
            tkcnot(1).unwrap()
        );
        let other = GcxSeq {
            symbols: vec![
                sym(Wire::First, 2, LevelPair::P12),
                sym(Wire::First, 2, LevelPair::P01),
            ],
        };
        assert_eq!(other.perm(), NamedTarget::Cnot1.table());
    }

    #[test]
    fn budget_is_enforced() {
        assert!(matches!(
            search_exact(&PermTable::identity(), 10),
            Err(Error::SearchBudget(10))
        ));
    }

    /// Brute-force oracle: lexicographically first sequence by full enumeration.
    fn brute_first(target: &PermTable, len: usize) -> Option<Vec<usize>> {
        let total = ALPHABET.pow(len as u32);
        (0..total).find_map(|code| {
            let seq = decode(code as u32, len);
            let idx: Vec<usize> = seq.iter().map(|&s| s as usize).collect();
            (GcxSeq::from_indices(&idx).perm() == *target).then_some(idx)
        })
    }

    #[test]
    fn lexicographic_first_audit() {
        let targets = [
            NamedTarget::Cnot1.table(),
            NamedTarget::SingleShiftTarget.table(),
            PermTable::identity(),
            GcxSeq::from_indices(&[17, 4, 9]).perm(),
            GcxSeq::from_indices(&[3, 3, 12]).perm(),
        ];
        for t in &targets {
            for len in 0..=3 {
                let got = search_exact(t, len).unwrap().map(|s| s.indices());
                assert_eq!(got, brute_first(t, len), "len {len}");
            }
        }
    }

    #[test]
    fn mitm_agrees_with_exhaustive_order() {
        let tables = SymbolTables::new();
        for code in [
            &[1usize, 5, 9, 2, 14, 7][..],
            &[0, 0, 3, 3, 17, 17],
            &[16, 2, 11, 4, 8, 1],
        ] {
            let target = GcxSeq::from_indices(code).perm();
            let a = search_exhaustive(&tables, &target, 6);
            let b = search_mitm(&tables, &target, 6);
            assert_eq!(a, b);
        }
    }

    #[test]
    fn named_synthesis() {
        let r = synthesize_named(NamedTarget::Tsum).unwrap();
        assert!(r.matches_claim());
        let r = synthesize_named(NamedTarget::Cnot1).unwrap();
        assert_eq!(r.achieved, 2);
        let r = synthesize_named(NamedTarget::SingleShiftTarget).unwrap();
        assert_eq!(r.achieved, 2);
        assert!(r.note.unwrap().contains("needs 6 GCX"));
        let m = NamedTarget::SingleShiftTarget.library_matrix().unwrap();
        assert_eq!(circuit_unitary(&r.sequence.to_circuit()).unwrap(), m);
    }

    #[test]
    fn unconditional_shift_needs_more_than_two() {
        assert!(search_exact(&unconditional_single_shift(), 2)
            .unwrap()
            .is_none());
    }

    #[test]
    fn parse_tables() {
        let t = parse_perm_table("0 1 2\n3 4 5 # row\n6 8 7\n").unwrap();
        assert_eq!(t.0, [0, 1, 2, 3, 4, 5, 6, 8, 7]);
        assert!(parse_perm_table("0 1 2").is_err());
        assert!(parse_perm_table("0 0 2 3 4 5 6 7 8").is_err());
    }
}
