//! Relation saturation: starting from an ideal of coefficient-ring
//! relations, repeatedly harvest new relations forced by the power
//! operation. At an even level n with shift m = n/2, any v with
//! v M(m) = 0 mod I forces v . pbar(x) into the saturated ideal for every
//! x in I; the engine applies this rule to the current generators until a
//! fixpoint (or the unit ideal) is reached, recording a replayable trace.

use crate::howell::{canonical_tagged_rows, kernel_mod, HowellBasis};
use crate::powerops::{is_syzygy, pbar_coeffs, ExecMode};
use crate::rings::{CoeffElem, CoeffRingSpec, ETheoryPresentation, WindowMatrix};
use serde::Serialize;

/// A finitely generated ideal of the coefficient ring, tracked as its named
/// generators plus the Howell basis of its additive span {a^j g}.
#[derive(Clone, Debug)]
pub struct Ideal {
    spec: CoeffRingSpec,
    generators: Vec<CoeffElem>,
    basis: HowellBasis,
}

impl Ideal {
    pub fn new(spec: CoeffRingSpec) -> Self {
        let basis = HowellBasis::from_rows(spec.chain_ring(), spec.truncation(), Vec::new());
        Ideal { spec, generators: Vec::new(), basis }
    }

    pub fn with_generators(spec: CoeffRingSpec, gens: &[CoeffElem]) -> Self {
        let mut ideal = Ideal::new(spec);
        for g in gens {
            if !g.is_zero() {
                ideal.add_generator(g.clone());
            }
        }
        ideal
    }

    pub fn spec(&self) -> CoeffRingSpec {
        self.spec
    }

    /// Add a generator and close the additive span under multiplication
    /// by a (multiplication by scalars is the module structure itself).
    pub fn add_generator(&mut self, g: CoeffElem) {
        assert_eq!(g.spec(), self.spec, "generator from a different ring");
        let k = self.spec.truncation();
        let mut rows = Vec::with_capacity(k);
        let mut cur = g.clone();
        for _ in 0..k {
            if cur.is_zero() {
                break;
            }
            rows.push(cur.residues().to_vec());
            cur = cur.mul_by_a();
        }
        self.basis = self.basis.extended(rows);
        self.generators.push(g);
    }

    pub fn contains(&self, x: &CoeffElem) -> bool {
        self.basis.contains(x.residues())
    }

    /// Canonical coset representative mod the ideal.
    pub fn canonical(&self, x: &CoeffElem) -> CoeffElem {
        CoeffElem::from_residues(self.spec, self.basis.reduce(x.residues()))
    }

    pub fn is_trivial(&self) -> bool {
        self.contains(&CoeffElem::one(self.spec))
    }

    pub fn generators(&self) -> &[CoeffElem] {
        &self.generators
    }

    pub fn basis(&self) -> &HowellBasis {
        &self.basis
    }
}

/// One emitted consequence of the saturation rule: the syzygy vector v
/// (v M = 0 mod the snapshot ideal) and the forced element v . pbar(x).
#[derive(Clone, Debug)]
pub struct RuleConsequence {
    pub syzygy: Vec<CoeffElem>,
    pub raw: CoeffElem,
}

fn flatten_vec(v: &[CoeffElem]) -> Vec<u64> {
    v.iter().flat_map(|c| c.residues().iter().copied()).collect()
}

fn unflatten(spec: CoeffRingSpec, flat: &[u64]) -> Vec<CoeffElem> {
    flat.chunks(spec.truncation())
        .map(|ch| CoeffElem::from_residues(spec, ch.to_vec()))
        .collect()
}

/// Generators (as a Z/p^N-module, which suffices: the set is closed under
/// multiplication by a) of {v : v M = 0 mod I^r}, via the kernel of the
/// flattened matrix over the chain ring relative to the ideal's span.
pub fn syzygies(
    pres: &ETheoryPresentation,
    ideal: &Ideal,
    m: &WindowMatrix,
) -> Vec<Vec<CoeffElem>> {
    let spec = pres.spec();
    let k = spec.truncation();
    let r = m.size();
    let ring = spec.chain_ring();
    let width = r * k;

    // Row (i, j) is the image of the basis vector a^j e_i under v -> v M.
    let mut a_rows = Vec::with_capacity(width);
    for i in 0..r {
        for j in 0..k {
            let aj = CoeffElem::a_power(spec, j);
            let row: Vec<u64> = (0..r)
                .flat_map(|t| aj.mul(m.entry(i, t)).residues().to_vec())
                .collect();
            a_rows.push(row);
        }
    }
    // The target is (E0/I)^r: quotient by the ideal span in every slot.
    let mut s_rows = Vec::with_capacity(r * ideal.basis().row_count());
    for t in 0..r {
        for b in ideal.basis().rows() {
            let mut row = vec![0u64; width];
            row[t * k..(t + 1) * k].copy_from_slice(b);
            s_rows.push(row);
        }
    }
    kernel_mod(ring, width, &a_rows, &s_rows)
        .into_iter()
        .map(|flat| unflatten(spec, &flat))
        .collect()
}

/// Apply the level rule for window matrix `m` to a single ideal element x,
/// against a fixed snapshot ideal. Two emission passes:
///
/// 1. unit syzygies: when row i of M lies entrywise in the ideal, e_i is a
///    syzygy and the window coefficient pbar(x)_i is emitted literally
///    (no normalization), preserving the human-readable witness;
/// 2. the full syzygy module, with the consequence module canonicalized as
///    tagged Howell rows (row = consequence, tag = its syzygy), emitted in
///    pivot order.
///
/// Consequences already inside the snapshot are skipped. Every emission is
/// certified on the spot: the tag is a genuine syzygy and reproduces the
/// emitted value.
pub fn apply_rule(
    pres: &ETheoryPresentation,
    ideal: &Ideal,
    m: &WindowMatrix,
    x: &CoeffElem,
) -> Vec<RuleConsequence> {
    let spec = pres.spec();
    let ring = spec.chain_ring();
    let k = spec.truncation();
    let r = m.size();
    let pbar = pbar_coeffs(pres, x);
    let mut out = Vec::new();

    for i in 0..r {
        if (0..r).all(|t| ideal.contains(m.entry(i, t))) {
            let raw = pbar[i].clone();
            if !ideal.contains(&raw) {
                let mut v = vec![CoeffElem::zero(spec); r];
                v[i] = CoeffElem::one(spec);
                out.push(RuleConsequence { syzygy: v, raw });
            }
        }
    }

    let vs = syzygies(pres, ideal, m);
    let pairs: Vec<(Vec<u64>, Vec<u64>)> = vs
        .iter()
        .map(|v| {
            let mut cons = CoeffElem::zero(spec);
            for (vi, pi) in v.iter().zip(pbar.iter()) {
                cons = cons.add(&vi.mul(pi));
            }
            (cons.residues().to_vec(), flatten_vec(v))
        })
        .collect();
    for (row, tag) in canonical_tagged_rows(ring, k, pairs) {
        let raw = CoeffElem::from_residues(spec, row);
        if ideal.contains(&raw) {
            continue;
        }
        out.push(RuleConsequence { syzygy: unflatten(spec, &tag), raw });
    }

    for c in &out {
        assert!(
            is_syzygy(m, &c.syzygy, |e| ideal.contains(e)),
            "emitted vector is not a syzygy at shift {}",
            m.shift
        );
        let mut recomputed = CoeffElem::zero(spec);
        for (vi, pi) in c.syzygy.iter().zip(pbar.iter()) {
            recomputed = recomputed.add(&vi.mul(pi));
        }
        assert_eq!(recomputed, c.raw, "consequence does not match its syzygy");
    }
    out
}

/// Hard caps so a runaway configuration terminates with a clear verdict.
#[derive(Clone, Copy, Debug)]
pub struct SaturationLimits {
    pub max_passes: u32,
    pub max_generators: usize,
}

impl Default for SaturationLimits {
    fn default() -> Self {
        SaturationLimits { max_passes: 64, max_generators: 4096 }
    }
}

/// One trace line: at (pass, level), applying the rule to `source` with
/// `syzygy` forced `raw`, inserted as the new generator `reduced`
/// (its canonical form mod the ideal at insertion time).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceEntry {
    pub pass: u32,
    pub level: u32,
    pub source: CoeffElem,
    pub syzygy: Vec<CoeffElem>,
    pub raw: CoeffElem,
    pub reduced: CoeffElem,
}

/// Full saturation result; serializable for the CLI's JSON output.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SaturationReport {
    pub prime: u64,
    pub precision: u32,
    pub truncation: usize,
    pub height: u32,
    pub loop_level: u32,
    pub exhaustive: bool,
    pub initial_generators: Vec<CoeffElem>,
    pub passes: u32,
    pub trace: Vec<TraceEntry>,
    pub final_generators: Vec<CoeffElem>,
    pub trivial: bool,
    pub fixpoint_reached: bool,
    pub basis_rows: usize,
}

/// Deterministic minimal generating set: sort by (a-degree, coefficients)
/// and keep greedily whatever the kept ones do not already generate. Over
/// this local ring the greedy set is a genuine minimal generating set.
pub fn minimal_generators(spec: CoeffRingSpec, gens: &[CoeffElem]) -> Vec<CoeffElem> {
    if Ideal::with_generators(spec, gens).is_trivial() {
        return vec![CoeffElem::one(spec)];
    }
    let mut sorted: Vec<CoeffElem> = gens.iter().filter(|g| !g.is_zero()).cloned().collect();
    sorted.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
    sorted.dedup();
    let mut kept = Ideal::new(spec);
    let mut out = Vec::new();
    for g in sorted {
        if kept.contains(&g) {
            continue;
        }
        out.push(g.clone());
        kept.add_generator(g);
    }
    out
}

/// Source elements for one level's rule applications. The base policy uses
/// the snapshot's generators; the exhaustive policy widens to a-multiples
/// and pairwise products (the rule is not linear in x, so the wider sweep
/// is a genuine check, not a no-op).
fn source_list(snapshot: &Ideal, exhaustive: bool) -> Vec<CoeffElem> {
    let gens = snapshot.generators().to_vec();
    if !exhaustive {
        return gens;
    }
    let mut seen = std::collections::BTreeSet::new();
    let mut out = Vec::new();
    let mut push = |e: CoeffElem, out: &mut Vec<CoeffElem>| {
        if !e.is_zero() && seen.insert(e.residues().to_vec()) {
            out.push(e);
        }
    };
    for g in &gens {
        push(g.clone(), &mut out);
        let mut cur = g.clone();
        for _ in 1..snapshot.spec().truncation() {
            cur = cur.mul_by_a();
            push(cur.clone(), &mut out);
        }
    }
    for (i, g) in gens.iter().enumerate() {
        for h in &gens[i..] {
            push(g.mul(h), &mut out);
        }
    }
    out.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
    out
}

fn map_batches(
    pres: &ETheoryPresentation,
    snapshot: &Ideal,
    m: &WindowMatrix,
    sources: &[CoeffElem],
    mode: ExecMode,
) -> Vec<Vec<RuleConsequence>> {
    #[cfg(feature = "parallel")]
    {
        if mode == ExecMode::Parallel {
            use rayon::prelude::*;
            return sources
                .par_iter()
                .map(|x| apply_rule(pres, snapshot, m, x))
                .collect();
        }
    }
    let _ = mode;
    sources.iter().map(|x| apply_rule(pres, snapshot, m, x)).collect()
}

/// Saturate the ideal generated by `initial` under the level rules
/// 2, 4, ..., loop_level, ascending within each pass, until a fixpoint.
///
/// Within a level, consequences are computed against a snapshot of the
/// ideal (so serial and parallel execution are bit-identical) and inserted
/// sequentially, each re-reduced mod the live ideal and skipped if already
/// contained. Reaching the unit ideal stops immediately (it is a fixpoint).
pub fn saturate(
    pres: &ETheoryPresentation,
    initial: &[CoeffElem],
    loop_level: u32,
    limits: SaturationLimits,
    mode: ExecMode,
    exhaustive: bool,
) -> SaturationReport {
    let spec = pres.spec();
    let mut ideal = Ideal::with_generators(spec, initial);
    let mut trace: Vec<TraceEntry> = Vec::new();
    let mut passes = 0;
    let mut fixpoint_reached = false;

    'outer: while passes < limits.max_passes {
        if ideal.is_trivial() {
            fixpoint_reached = true;
            break;
        }
        passes += 1;
        let mut changed = false;
        let mut level = 2;
        while level <= loop_level {
            if ideal.is_trivial() {
                fixpoint_reached = true;
                break 'outer;
            }
            let m = pres.window_matrix(level / 2);
            let snapshot = ideal.clone();
            let sources = source_list(&snapshot, exhaustive);
            let batches = map_batches(pres, &snapshot, &m, &sources, mode);
            for (x, batch) in sources.iter().zip(batches) {
                for c in batch {
                    let reduced = ideal.canonical(&c.raw);
                    if reduced.is_zero() {
                        continue;
                    }
                    ideal.add_generator(reduced.clone());
                    trace.push(TraceEntry {
                        pass: passes,
                        level,
                        source: x.clone(),
                        syzygy: c.syzygy,
                        raw: c.raw,
                        reduced,
                    });
                    changed = true;
                    if ideal.is_trivial() {
                        fixpoint_reached = true;
                        break 'outer;
                    }
                }
            }
            if ideal.generators().len() > limits.max_generators {
                break 'outer;
            }
            level += 2;
        }
        if !changed {
            fixpoint_reached = true;
            break;
        }
    }

    let trivial = ideal.is_trivial();
    let final_generators = minimal_generators(spec, ideal.generators());
    SaturationReport {
        prime: spec.prime(),
        precision: spec.precision(),
        truncation: spec.truncation(),
        height: pres.height(),
        loop_level,
        exhaustive,
        initial_generators: initial.to_vec(),
        passes,
        trace,
        final_generators,
        trivial,
        fixpoint_reached,
        basis_rows: ideal.basis().row_count(),
    }
}

/// Independent fixpoint audit: rebuild the ideal from `gens` and run one
/// full sweep of every level rule; saturated means nothing new is emitted.
pub fn verify_fixpoint(pres: &ETheoryPresentation, gens: &[CoeffElem], loop_level: u32) -> bool {
    let ideal = Ideal::with_generators(pres.spec(), gens);
    if ideal.is_trivial() {
        return true;
    }
    let sources = ideal.generators().to_vec();
    let mut level = 2;
    while level <= loop_level {
        let m = pres.window_matrix(level / 2);
        for x in &sources {
            if !apply_rule(pres, &ideal, &m, x).is_empty() {
                return false;
            }
        }
        level += 2;
    }
    true
}
