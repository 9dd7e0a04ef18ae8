//! Explicit finite stream-automaton laboratory: reversibility and
//! path-independence predicates, kernels by exhaustive exploration, terminal
//! classes of the zero-frequency graph, finite reversibilization, and
//! quotienting to a path-independent sketch automaton.
//!
//! Kernels and class structures are computed inside a frequency box of radius
//! `m`; results are statements "at radius m". Generators or zero-frequency
//! excursions that would leave the box are not seen, and no passage to the
//! infinite limit is attempted.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{box_point_count, EnumBudget, Submodule};
use crate::sketch::{KernelSpec, SketchState, StreamRecord};

/// Predecessor links of a `(config, freq)` search: parent pair plus the
/// letter that was taken.
type ParentMap = HashMap<(usize, Vec<i32>), (usize, Vec<i32>, Letter)>;

/// A stream letter: `+i` inserts item `i`, `-i` deletes it (1-based `i`).
pub type Letter = i32;

pub fn letters(n: usize) -> impl Iterator<Item = Letter> {
    (1..=n as i32).flat_map(|i| [i, -i])
}

fn slot(letter: Letter) -> usize {
    let i = letter.unsigned_abs() as usize - 1;
    2 * i + usize::from(letter < 0)
}

/// Deterministic finite-configuration stream automaton: a total transition
/// table over the letters `{±1, ..., ±n}`, an initial configuration, and an
/// integer output vector per configuration. Configuration ids are opaque.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExplicitAutomaton {
    n: usize,
    ids: Vec<String>,
    initial: usize,
    /// `delta[config][slot(letter)]`
    delta: Vec<Vec<usize>>,
    output: Vec<Vec<BigInt>>,
}

impl ExplicitAutomaton {
    pub fn new(
        n: usize,
        ids: Vec<String>,
        initial: &str,
        delta: &BTreeMap<String, BTreeMap<String, String>>,
        output: &BTreeMap<String, Vec<BigInt>>,
    ) -> Result<Self> {
        if ids.is_empty() {
            return Err(Error::Malformed("automaton has no configurations".into()));
        }
        let mut index = HashMap::new();
        for (i, id) in ids.iter().enumerate() {
            if index.insert(id.clone(), i).is_some() {
                return Err(Error::Malformed(format!("duplicate config id {id:?}")));
            }
        }
        let initial = *index
            .get(initial)
            .ok_or_else(|| Error::Malformed(format!("initial config {initial:?} not listed")))?;
        let mut table = vec![vec![0usize; 2 * n]; ids.len()];
        for (i, id) in ids.iter().enumerate() {
            let row = delta
                .get(id)
                .ok_or_else(|| Error::Malformed(format!("missing transitions for {id:?}")))?;
            for letter in letters(n) {
                let key = format!("{letter:+}");
                let target = row.get(&key).ok_or_else(|| {
                    Error::Malformed(format!("missing transition {key} for {id:?}"))
                })?;
                table[i][slot(letter)] = *index.get(target).ok_or_else(|| {
                    Error::Malformed(format!("transition target {target:?} not listed"))
                })?;
            }
        }
        let mut outs = Vec::with_capacity(ids.len());
        let mut out_dim = None;
        for id in &ids {
            let v = output
                .get(id)
                .ok_or_else(|| Error::Malformed(format!("missing output for {id:?}")))?;
            match out_dim {
                None => out_dim = Some(v.len()),
                Some(d) if d == v.len() => {}
                Some(d) => {
                    return Err(Error::Malformed(format!(
                        "output for {id:?} has length {}, expected {d}",
                        v.len()
                    )))
                }
            }
            outs.push(v.clone());
        }
        Ok(ExplicitAutomaton {
            n,
            ids,
            initial,
            delta: table,
            output: outs,
        })
    }

    pub fn domain_size(&self) -> usize {
        self.n
    }

    pub fn num_configs(&self) -> usize {
        self.ids.len()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn id(&self, config: usize) -> &str {
        &self.ids[config]
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn step(&self, config: usize, letter: Letter) -> usize {
        self.delta[config][slot(letter)]
    }

    pub fn apply(&self, config: usize, stream: &[Letter]) -> usize {
        stream.iter().fold(config, |c, &l| self.step(c, l))
    }

    pub fn output(&self, config: usize) -> &[BigInt] {
        &self.output[config]
    }

    pub fn with_output(&self, config: usize, new_output: Vec<BigInt>) -> ExplicitAutomaton {
        let mut out = self.clone();
        out.output[config] = new_output;
        out
    }

    /// Single-letter cancellation check at every configuration. A one-letter
    /// excursion that cancels everywhere cancels for every stream, since an
    /// inverse stream unwinds letter by letter.
    pub fn is_path_reversible(&self) -> bool {
        self.reversibility_witness().is_none()
    }

    /// A `(config, letter)` pair violating cancellation, if any.
    pub fn reversibility_witness(&self) -> Option<(usize, Letter)> {
        for c in 0..self.num_configs() {
            for l in letters(self.n) {
                if self.step(self.step(c, l), -l) != c {
                    return Some((c, l));
                }
            }
        }
        None
    }

    // --- fixture constructors ---

    /// `n = 1` counter modulo `q`; outputs the residue.
    pub fn mod_counter(q: u64) -> ExplicitAutomaton {
        assert!(q > 0);
        let ids: Vec<String> = (0..q).map(|c| c.to_string()).collect();
        let delta = (0..q)
            .map(|c| {
                vec![
                    ((c + 1) % q) as usize, // +1
                    ((c + q - 1) % q) as usize, // -1
                ]
            })
            .collect();
        let output = (0..q).map(|c| vec![BigInt::from(c)]).collect();
        ExplicitAutomaton {
            n: 1,
            ids,
            initial: 0,
            delta,
            output,
        }
    }

    /// `n = 1` counter modulo `q` reporting centered residues, so that inside
    /// a frequency box of radius `< q/2` it reports frequencies exactly.
    pub fn cyclic_counter(q: u64) -> ExplicitAutomaton {
        let mut a = ExplicitAutomaton::mod_counter(q);
        for c in 0..q {
            let centered = if c <= q / 2 {
                c as i64
            } else {
                c as i64 - q as i64
            };
            a.output[c as usize] = vec![BigInt::from(centered)];
        }
        a
    }

    /// Product of per-coordinate modular counters; letter `±i` moves
    /// coordinate `i`. Outputs the residue vector.
    pub fn product_mod_counters(moduli: &[u64]) -> ExplicitAutomaton {
        assert!(!moduli.is_empty() && moduli.iter().all(|&q| q > 0));
        let n = moduli.len();
        let total: u64 = moduli.iter().product();
        let decode = |mut code: u64| -> Vec<u64> {
            let mut v = Vec::with_capacity(n);
            for &q in moduli {
                v.push(code % q);
                code /= q;
            }
            v
        };
        let encode = |v: &[u64]| -> u64 {
            let mut code = 0u64;
            let mut mult = 1u64;
            for (x, &q) in v.iter().zip(moduli) {
                code += x * mult;
                mult *= q;
            }
            code
        };
        let ids: Vec<String> = (0..total)
            .map(|code| {
                decode(code)
                    .iter()
                    .map(|r| r.to_string())
                    .collect::<Vec<_>>()
                    .join(".")
            })
            .collect();
        let mut delta = vec![vec![0usize; 2 * n]; total as usize];
        let mut output = Vec::with_capacity(total as usize);
        for code in 0..total {
            let v = decode(code);
            for i in 0..n {
                let q = moduli[i];
                let mut up = v.clone();
                up[i] = (v[i] + 1) % q;
                let mut down = v.clone();
                down[i] = (v[i] + q - 1) % q;
                delta[code as usize][slot((i + 1) as Letter)] = encode(&up) as usize;
                delta[code as usize][slot(-((i + 1) as Letter))] = encode(&down) as usize;
            }
            output.push(v.iter().map(|&r| BigInt::from(r)).collect());
        }
        ExplicitAutomaton {
            n,
            ids,
            initial: 0,
            delta,
            output,
        }
    }

    /// `n = 1` counter over `{0, ..., max}` that saturates at both ends;
    /// deliberately not path reversible. Outputs the counter value.
    pub fn clamped_counter(max: u64) -> ExplicitAutomaton {
        let ids: Vec<String> = (0..=max).map(|c| c.to_string()).collect();
        let delta = (0..=max)
            .map(|c| {
                vec![
                    (c + 1).min(max) as usize,
                    c.saturating_sub(1) as usize,
                ]
            })
            .collect();
        let output = (0..=max).map(|c| vec![BigInt::from(c)]).collect();
        ExplicitAutomaton {
            n: 1,
            ids,
            initial: 0,
            delta,
            output,
        }
    }
}

// --- file format -------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct AutomatonFile {
    n: usize,
    configs: Vec<String>,
    initial: String,
    delta: BTreeMap<String, BTreeMap<String, String>>,
    output: BTreeMap<String, Vec<i64>>,
}

pub fn automaton_from_json(text: &str) -> Result<ExplicitAutomaton> {
    let file: AutomatonFile =
        serde_json::from_str(text).map_err(|e| Error::Malformed(format!("automaton file: {e}")))?;
    let output: BTreeMap<String, Vec<BigInt>> = file
        .output
        .iter()
        .map(|(k, v)| (k.clone(), v.iter().map(|&x| BigInt::from(x)).collect()))
        .collect();
    ExplicitAutomaton::new(file.n, file.configs, &file.initial, &file.delta, &output)
}

pub fn automaton_to_json(a: &ExplicitAutomaton) -> Result<String> {
    let mut delta = BTreeMap::new();
    let mut output = BTreeMap::new();
    for c in 0..a.num_configs() {
        let mut row = BTreeMap::new();
        for l in letters(a.domain_size()) {
            row.insert(format!("{l:+}"), a.id(a.step(c, l)).to_string());
        }
        delta.insert(a.id(c).to_string(), row);
        let out: Result<Vec<i64>> = a
            .output(c)
            .iter()
            .map(|v| {
                v.to_i64()
                    .ok_or_else(|| Error::Malformed(format!("output value {v} exceeds file range")))
            })
            .collect();
        output.insert(a.id(c).to_string(), out?);
    }
    let file = AutomatonFile {
        n: a.domain_size(),
        configs: a.ids().to_vec(),
        initial: a.id(a.initial()).to_string(),
        delta,
        output,
    };
    serde_json::to_string_pretty(&file).map_err(|e| Error::Malformed(e.to_string()))
}

pub fn read_automaton_file(path: &std::path::Path) -> Result<ExplicitAutomaton> {
    automaton_from_json(&std::fs::read_to_string(path)?)
}

pub fn write_automaton_file(path: &std::path::Path, a: &ExplicitAutomaton) -> Result<()> {
    std::fs::write(path, automaton_to_json(a)? + "\n")?;
    Ok(())
}

// --- exploration ---------------------------------------------------------------

/// Reachability of `(configuration, frequency)` pairs from the initial
/// configuration, with every prefix frequency inside the box of radius `m`.
pub struct FreqExploration {
    pub radius: u32,
    /// configs reached per frequency vector
    pub per_freq: BTreeMap<Vec<i32>, BTreeSet<usize>>,
    /// all configs reachable in-box (`C_m`)
    pub configs: BTreeSet<usize>,
    parents: ParentMap,
    initial: usize,
}

impl FreqExploration {
    /// Reconstructs a stream from the initial configuration to `(config, freq)`.
    pub fn witness(&self, config: usize, freq: &[i32]) -> Option<Vec<Letter>> {
        let mut cur = (config, freq.to_vec());
        if cur.0 == self.initial && freq.iter().all(|&v| v == 0) {
            return Some(Vec::new());
        }
        self.parents.get(&cur)?;
        let mut rev = Vec::new();
        while let Some((pc, pf, l)) = self.parents.get(&cur) {
            rev.push(*l);
            cur = (*pc, pf.clone());
        }
        rev.reverse();
        Some(rev)
    }
}

/// Breadth-first closure of `(config, freq)` pairs inside the frequency box.
pub fn explore(
    a: &ExplicitAutomaton,
    radius: u32,
    budget: &EnumBudget,
) -> Result<FreqExploration> {
    let n = a.domain_size();
    let state_bound =
        box_point_count(n, radius).and_then(|b| b.checked_mul(a.num_configs() as u128));
    budget.check(state_bound)?;
    let m = radius as i32;
    let start = (a.initial(), vec![0i32; n]);
    let mut seen: HashSet<(usize, Vec<i32>)> = HashSet::new();
    let mut parents = HashMap::new();
    let mut per_freq: BTreeMap<Vec<i32>, BTreeSet<usize>> = BTreeMap::new();
    let mut configs = BTreeSet::new();
    let mut queue = VecDeque::new();
    seen.insert(start.clone());
    per_freq.entry(start.1.clone()).or_default().insert(start.0);
    configs.insert(start.0);
    queue.push_back(start);
    while let Some((c, f)) = queue.pop_front() {
        for l in letters(n) {
            let idx = l.unsigned_abs() as usize - 1;
            let nf_coord = f[idx] + l.signum();
            if nf_coord.abs() > m {
                continue;
            }
            let mut nf = f.clone();
            nf[idx] = nf_coord;
            let nc = a.step(c, l);
            let key = (nc, nf);
            if seen.insert(key.clone()) {
                parents.insert(key.clone(), (c, f.clone(), l));
                per_freq.entry(key.1.clone()).or_default().insert(nc);
                configs.insert(nc);
                queue.push_back(key);
            }
        }
    }
    Ok(FreqExploration {
        radius,
        per_freq,
        configs,
        parents,
        initial: a.initial(),
    })
}

/// Does every in-box frequency vector reach exactly one configuration from
/// the initial one?
pub fn is_path_independent(
    a: &ExplicitAutomaton,
    radius: u32,
    budget: &EnumBudget,
) -> Result<bool> {
    let exp = explore(a, radius, budget)?;
    Ok(exp.per_freq.values().all(|s| s.len() == 1))
}

/// Frequency vectors in the box whose streams can return the initial
/// configuration to itself. These generate the boxed kernel.
pub fn zero_return_freqs(
    a: &ExplicitAutomaton,
    radius: u32,
    budget: &EnumBudget,
) -> Result<Vec<Vec<i64>>> {
    let exp = explore(a, radius, budget)?;
    let initial = a.initial();
    Ok(exp
        .per_freq
        .iter()
        .filter(|(_, configs)| configs.contains(&initial))
        .map(|(f, _)| f.iter().map(|&v| v as i64).collect())
        .collect())
}

/// The submodule generated by all in-box frequencies that return the initial
/// configuration to itself. This is the box-truncated kernel: generators
/// outside the box are missed, and `kernel_of(A, m)` only grows with `m`.
pub fn kernel_of(a: &ExplicitAutomaton, radius: u32, budget: &EnumBudget) -> Result<Submodule> {
    if let Some((c, l)) = a.reversibility_witness() {
        return Err(Error::NotPathReversible(format!(
            "config {} breaks cancellation on letter {l:+}",
            a.id(c)
        )));
    }
    let gens = zero_return_freqs(a, radius, budget)?;
    let rows: Vec<Vec<BigInt>> = gens
        .iter()
        .map(|f| f.iter().map(|&v| BigInt::from(v)).collect())
        .collect();
    Submodule::from_generator_rows(a.domain_size(), rows)
}

// --- zero-frequency graph ------------------------------------------------------

/// Configurations reachable from `source` by a stream of frequency zero whose
/// prefix frequencies stay inside the box.
fn zero_freq_reach(
    a: &ExplicitAutomaton,
    source: usize,
    radius: u32,
    with_parents: bool,
) -> (BTreeSet<usize>, ParentMap) {
    let n = a.domain_size();
    let m = radius as i32;
    let start = (source, vec![0i32; n]);
    let mut seen: HashSet<(usize, Vec<i32>)> = HashSet::new();
    let mut parents = HashMap::new();
    let mut reach = BTreeSet::new();
    let mut queue = VecDeque::new();
    seen.insert(start.clone());
    reach.insert(source);
    queue.push_back(start);
    while let Some((c, f)) = queue.pop_front() {
        for l in letters(n) {
            let idx = l.unsigned_abs() as usize - 1;
            let nf_coord = f[idx] + l.signum();
            if nf_coord.abs() > m {
                continue;
            }
            let mut nf = f.clone();
            nf[idx] = nf_coord;
            let nc = a.step(c, l);
            let key = (nc, nf);
            if seen.insert(key.clone()) {
                if with_parents {
                    parents.insert(key.clone(), (c, f.clone(), l));
                }
                if key.1.iter().all(|&v| v == 0) {
                    reach.insert(nc);
                }
                queue.push_back(key);
            }
        }
    }
    (reach, parents)
}

/// A zero-frequency stream from `source` to `target` staying inside the box,
/// if one exists.
pub fn zero_freq_witness(
    a: &ExplicitAutomaton,
    source: usize,
    target: usize,
    radius: u32,
    budget: &EnumBudget,
) -> Result<Option<Vec<Letter>>> {
    budget.check(budget_for_zero_freq(a, radius, 1))?;
    Ok(zero_freq_witness_inner(a, source, target, radius))
}

fn zero_freq_witness_inner(
    a: &ExplicitAutomaton,
    source: usize,
    target: usize,
    radius: u32,
) -> Option<Vec<Letter>> {
    if source == target {
        return Some(Vec::new());
    }
    let (reach, parents) = zero_freq_reach(a, source, radius, true);
    if !reach.contains(&target) {
        return None;
    }
    let n = a.domain_size();
    let mut cur = (target, vec![0i32; n]);
    let mut rev = Vec::new();
    while !(cur.0 == source && cur.1.iter().all(|&v| v == 0)) {
        let (pc, pf, l) = parents.get(&cur)?;
        rev.push(*l);
        cur = (*pc, pf.clone());
    }
    rev.reverse();
    Some(rev)
}

fn budget_for_zero_freq(a: &ExplicitAutomaton, radius: u32, sources: usize) -> Option<u128> {
    box_point_count(a.domain_size(), radius)
        .and_then(|b| b.checked_mul(a.num_configs() as u128))
        .and_then(|b| b.checked_mul(sources as u128))
}

struct ZeroFreqGraph {
    /// zero-frequency reach set per config (full config set)
    reach: Vec<BTreeSet<usize>>,
    /// class index per config
    class_of: Vec<usize>,
    /// members of each class, ascending config index
    classes: Vec<Vec<usize>>,
    /// closed under zero-frequency moves
    terminal: Vec<bool>,
}

/// Mutual zero-frequency reachability classes over the full configuration
/// set, with terminal flags.
fn zero_freq_graph(a: &ExplicitAutomaton, radius: u32, budget: &EnumBudget) -> Result<ZeroFreqGraph> {
    budget.check(budget_for_zero_freq(a, radius, a.num_configs()))?;
    let nc = a.num_configs();
    let reach: Vec<BTreeSet<usize>> = (0..nc)
        .map(|s| zero_freq_reach(a, s, radius, false).0)
        .collect();
    let mut class_of = vec![usize::MAX; nc];
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for s in 0..nc {
        if class_of[s] != usize::MAX {
            continue;
        }
        let idx = classes.len();
        let mut members = Vec::new();
        for t in s..nc {
            if class_of[t] == usize::MAX && reach[s].contains(&t) && reach[t].contains(&s) {
                class_of[t] = idx;
                members.push(t);
            }
        }
        classes.push(members);
    }
    let terminal = classes
        .iter()
        .map(|members| {
            members
                .iter()
                .all(|&s| reach[s].iter().all(|t| class_of[*t] == class_of[s]))
        })
        .collect();
    Ok(ZeroFreqGraph {
        reach,
        class_of,
        classes,
        terminal,
    })
}

/// Partition of the in-box reachable configurations (`C_m`) under mutual
/// zero-frequency reachability, with terminal flags. A class is terminal when
/// no zero-frequency move from it lands outside the class (within `C_m`).
pub struct ZeroFreqClasses {
    /// member config indices per class, each ascending; classes ordered by
    /// their smallest member
    pub classes: Vec<Vec<usize>>,
    pub terminal: Vec<bool>,
    /// class index per config; `None` for configs not reachable in-box
    pub class_of: Vec<Option<usize>>,
}

pub fn zero_freq_classes(
    a: &ExplicitAutomaton,
    radius: u32,
    budget: &EnumBudget,
) -> Result<ZeroFreqClasses> {
    let scope = explore(a, radius, budget)?.configs;
    let graph = zero_freq_graph(a, radius, budget)?;
    let mut classes = Vec::new();
    let mut terminal = Vec::new();
    let mut class_of = vec![None; a.num_configs()];
    for (idx, members) in graph.classes.iter().enumerate() {
        let in_scope: Vec<usize> = members.iter().copied().filter(|s| scope.contains(s)).collect();
        if in_scope.is_empty() {
            continue;
        }
        let new_idx = classes.len();
        for &s in &in_scope {
            class_of[s] = Some(new_idx);
        }
        // closed within C_m: every zero-frequency move landing in scope stays
        // in the class
        let closed = in_scope.iter().all(|&s| {
            graph.reach[s]
                .iter()
                .filter(|t| scope.contains(t))
                .all(|&t| graph.class_of[t] == idx)
        });
        classes.push(in_scope);
        terminal.push(closed);
    }
    // every config can reach at least one terminal class
    for &s in &scope {
        let ok = graph.reach[s].iter().any(|&t| {
            class_of[t].map(|k| terminal[k]).unwrap_or(false)
                || graph.terminal[graph.class_of[t]]
        });
        if !ok {
            return Err(Error::SelfTestFailed(format!(
                "config {} reaches no terminal class",
                a.id(s)
            )));
        }
    }
    Ok(ZeroFreqClasses {
        classes,
        terminal,
        class_of,
    })
}

// --- reversibilization ----------------------------------------------------------

/// Result of collapsing an automaton onto terminal-class representatives.
pub struct Reversibilization {
    pub automaton: ExplicitAutomaton,
    /// representative (original config index) per original config
    pub alpha: Vec<usize>,
    /// zero-frequency witness stream from each config to its representative
    pub witnesses: Vec<Vec<Letter>>,
    /// map from original config index to the index in the new automaton, for
    /// configs that are representatives
    pub image_index: BTreeMap<usize, usize>,
}

/// Maps every configuration to the lexicographically least member of the
/// terminal classes it can reach by zero-frequency streams, and rebuilds the
/// automaton over these representatives with transitions
/// `rep ⊕' v = alpha(rep ⊕ v)`.
///
/// The radius must be large enough that the zero-frequency excursions of
/// interest fit in the box; the cancellation identities are then checked by
/// [`ExplicitAutomaton::is_path_reversible`] on the result.
pub fn reversibilize(
    a: &ExplicitAutomaton,
    radius: u32,
    budget: &EnumBudget,
) -> Result<Reversibilization> {
    let graph = zero_freq_graph(a, radius, budget)?;
    let nc = a.num_configs();
    let mut alpha = vec![usize::MAX; nc];
    for s in 0..nc {
        let mut best: Option<usize> = None;
        for &t in &graph.reach[s] {
            if !graph.terminal[graph.class_of[t]] {
                continue;
            }
            for &u in &graph.classes[graph.class_of[t]] {
                if best.is_none_or(|b| a.id(u) < a.id(b)) {
                    best = Some(u);
                }
            }
        }
        alpha[s] = best.ok_or_else(|| {
            Error::SelfTestFailed(format!("config {} reaches no terminal class", a.id(s)))
        })?;
    }
    let mut witnesses = Vec::with_capacity(nc);
    for s in 0..nc {
        let w = zero_freq_witness_inner(a, s, alpha[s], radius).ok_or_else(|| {
            Error::SelfTestFailed(format!(
                "no zero-frequency witness from {} to {}",
                a.id(s),
                a.id(alpha[s])
            ))
        })?;
        witnesses.push(w);
    }

    let mut image: Vec<usize> = alpha.clone();
    image.sort_unstable();
    image.dedup();
    image.sort_by(|&x, &y| a.id(x).cmp(a.id(y)));
    let image_index: BTreeMap<usize, usize> =
        image.iter().enumerate().map(|(i, &c)| (c, i)).collect();
    let ids: Vec<String> = image.iter().map(|&c| a.id(c).to_string()).collect();
    let mut delta = vec![vec![0usize; 2 * a.domain_size()]; image.len()];
    let mut output = Vec::with_capacity(image.len());
    for (new_idx, &rep) in image.iter().enumerate() {
        for l in letters(a.domain_size()) {
            let succ = alpha[a.step(rep, l)];
            delta[new_idx][slot(l)] = image_index[&succ];
        }
        output.push(a.output(rep).to_vec());
    }
    let automaton = ExplicitAutomaton {
        n: a.domain_size(),
        ids,
        initial: image_index[&alpha[a.initial()]],
        delta,
        output,
    };
    Ok(Reversibilization {
        automaton,
        alpha,
        witnesses,
        image_index,
    })
}

// --- quotient --------------------------------------------------------------------

/// Output table of a quotient automaton: deterministic choice (the
/// lexicographically least candidate) of the underlying automaton's outputs
/// per coset state.
pub type CosetOutputs = HashMap<SketchState, Vec<BigInt>>;

/// Collapses a path-reversible automaton to its boxed kernel's sketch: the
/// compiled kernel plus a per-coset output table.
pub fn quotient_path_independent(
    a: &ExplicitAutomaton,
    radius: u32,
    budget: &EnumBudget,
) -> Result<(KernelSpec, CosetOutputs)> {
    if let Some((c, l)) = a.reversibility_witness() {
        return Err(Error::NotPathReversible(format!(
            "config {} breaks cancellation on letter {l:+}; reversibilize first",
            a.id(c)
        )));
    }
    let kernel = kernel_of(a, radius, budget)?;
    let spec = KernelSpec::compile(&kernel)?;
    let exp = explore(a, radius, budget)?;
    let mut candidates: HashMap<SketchState, BTreeSet<Vec<BigInt>>> = HashMap::new();
    for (freq, configs) in &exp.per_freq {
        let f64v: Vec<i64> = freq.iter().map(|&v| v as i64).collect();
        let state = spec.residue_i64(&f64v);
        let entry = candidates.entry(state).or_default();
        for &c in configs {
            entry.insert(a.output(c).to_vec());
        }
    }
    let outputs = candidates
        .into_iter()
        .map(|(state, cands)| {
            let chosen = cands.into_iter().next().expect("nonempty candidate set");
            (state, chosen)
        })
        .collect();
    Ok((spec, outputs))
}

fn state_key(state: &SketchState) -> String {
    let t: Vec<String> = state.torsion_residues.iter().map(|v| v.to_string()).collect();
    let f: Vec<String> = state.free_coords.iter().map(|v| v.to_string()).collect();
    format!("t[{}]f[{}]", t.join(","), f.join(","))
}

/// Materializes the quotient sketch as an explicit automaton over the coset
/// states reachable inside the box, plus a sink for out-of-box moves. The
/// sink is never visited by in-box exploration; it only keeps the transition
/// table total.
pub fn quotient_automaton(
    spec: &KernelSpec,
    outputs: &CosetOutputs,
    radius: u32,
    budget: &EnumBudget,
) -> Result<ExplicitAutomaton> {
    let n = spec.ambient_dim();
    budget.check(box_point_count(n, radius))?;
    let mut states: BTreeMap<String, SketchState> = BTreeMap::new();
    for p in crate::lattice::box_iter(n, radius) {
        let s = spec.residue_i64(&p);
        states.insert(state_key(&s), s);
    }
    let out_dim = outputs
        .values()
        .next()
        .map(|v| v.len())
        .unwrap_or(n);
    let sink_id = "__out__".to_string();
    let mut ids: Vec<String> = states.keys().cloned().collect();
    ids.push(sink_id.clone());
    let index: HashMap<String, usize> = ids
        .iter()
        .enumerate()
        .map(|(i, k)| (k.clone(), i))
        .collect();
    let sink = index[&sink_id];
    let mut delta = vec![vec![sink; 2 * n]; ids.len()];
    let mut output = vec![vec![BigInt::from(0); out_dim]; ids.len()];
    for (key, state) in &states {
        let i = index[key];
        for l in letters(n) {
            let rec = StreamRecord {
                index: l.unsigned_abs() as usize,
                delta: l.signum() as i8,
            };
            let succ = spec.update(state, rec)?;
            let succ_key = state_key(&succ);
            delta[i][slot(l)] = index.get(&succ_key).copied().unwrap_or(sink);
        }
        if let Some(out) = outputs.get(state) {
            output[i] = out.clone();
        }
    }
    let initial = index[&state_key(&spec.init())];
    Ok(ExplicitAutomaton {
        n,
        ids,
        initial,
        delta,
        output,
    })
}

// --- output restriction -----------------------------------------------------------

/// Verdict of the output-restriction check, with a failing stream when the
/// answer is no.
pub struct RestrictionCheck {
    pub ok: bool,
    pub witness: Option<Vec<Letter>>,
}

/// Does every stream of length at most `len_bound` through `b` have a
/// matching stream through `a` — equal frequency, equal output — of length at
/// most `slack * len_bound`?
pub fn is_output_restriction(
    b: &ExplicitAutomaton,
    a: &ExplicitAutomaton,
    len_bound: usize,
    slack: usize,
    budget: &EnumBudget,
) -> Result<RestrictionCheck> {
    if b.domain_size() != a.domain_size() {
        return Err(Error::DimensionMismatch {
            expected: a.domain_size(),
            got: b.domain_size(),
        });
    }
    let n = a.domain_size();
    let la = len_bound * slack;
    let bound = box_point_count(n, la as u32)
        .and_then(|c| c.checked_mul((a.num_configs() + b.num_configs()) as u128));
    budget.check(bound)?;

    // outputs of a reachable per frequency within length la
    let mut outputs_a: HashMap<Vec<i32>, HashSet<Vec<BigInt>>> = HashMap::new();
    {
        let mut seen: HashSet<(usize, Vec<i32>)> = HashSet::new();
        let mut frontier = vec![(a.initial(), vec![0i32; n])];
        seen.insert(frontier[0].clone());
        outputs_a
            .entry(vec![0; n])
            .or_default()
            .insert(a.output(a.initial()).to_vec());
        for _ in 0..la {
            let mut next = Vec::new();
            for (c, f) in &frontier {
                for l in letters(n) {
                    let idx = l.unsigned_abs() as usize - 1;
                    let mut nf = f.clone();
                    nf[idx] += l.signum();
                    let nc = a.step(*c, l);
                    let key = (nc, nf);
                    if seen.insert(key.clone()) {
                        outputs_a
                            .entry(key.1.clone())
                            .or_default()
                            .insert(a.output(nc).to_vec());
                        next.push(key);
                    }
                }
            }
            frontier = next;
        }
    }

    // walk b exhaustively to len_bound and demand a matching output
    let mut seen: HashSet<(usize, Vec<i32>)> = HashSet::new();
    let mut parents: ParentMap = HashMap::new();
    let start = (b.initial(), vec![0i32; n]);
    let check = |c: usize, f: &Vec<i32>| -> bool {
        outputs_a
            .get(f)
            .map(|outs| outs.contains(b.output(c)))
            .unwrap_or(false)
    };
    if !check(start.0, &start.1) {
        return Ok(RestrictionCheck {
            ok: false,
            witness: Some(Vec::new()),
        });
    }
    seen.insert(start.clone());
    let mut frontier = vec![start.clone()];
    for _ in 0..len_bound {
        let mut next = Vec::new();
        for (c, f) in &frontier {
            for l in letters(n) {
                let idx = l.unsigned_abs() as usize - 1;
                let mut nf = f.clone();
                nf[idx] += l.signum();
                let nc = b.step(*c, l);
                let key = (nc, nf);
                if seen.insert(key.clone()) {
                    parents.insert(key.clone(), (*c, f.clone(), l));
                    if !check(nc, &key.1) {
                        // reconstruct the failing stream
                        let mut rev = Vec::new();
                        let mut cur = key;
                        while let Some((pc, pf, l)) = parents.get(&cur) {
                            rev.push(*l);
                            cur = (*pc, pf.clone());
                        }
                        rev.reverse();
                        return Ok(RestrictionCheck {
                            ok: false,
                            witness: Some(rev),
                        });
                    }
                    next.push(key);
                }
            }
        }
        frontier = next;
    }
    Ok(RestrictionCheck {
        ok: true,
        witness: None,
    })
}
