//! Exhaustive generation of small distributive lattices and their modal
//! expansions, up to isomorphism.
//!
//! Lattices come from posets of join-irreducibles (down-set lattices), grown
//! one maximal point at a time. Operators are generated from their values
//! on meet- resp. join-irreducibles, which determine them, and deduplicated
//! against the lattice's automorphism group.

use std::collections::{BTreeMap, HashSet};
use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{AlgebraData, Elem, FiniteAlgebra, Kind};
use crate::congruence::{is_fsi, is_si};
use crate::constructions::{canonical_form, identify, CanonicalForm};
use crate::syntax::{holds_eq, Equation};
use crate::{Error, Result};

/// Sizes beyond this are refused: the operator spaces explode.
pub const MAX_ENUMERATION_SIZE: usize = 10;

/// A finite poset; `leq[i][j]` is `i <= j`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Poset {
    pub leq: Vec<Vec<bool>>,
}

impl Poset {
    pub fn len(&self) -> usize {
        self.leq.len()
    }

    pub fn is_empty(&self) -> bool {
        self.leq.is_empty()
    }

    fn from_preds(preds: &[u32]) -> Self {
        let k = preds.len();
        Poset {
            leq: (0..k)
                .map(|i| (0..k).map(|j| i == j || preds[j] >> i & 1 == 1).collect())
                .collect(),
        }
    }

    /// Down-sets as masks, by size and then value.
    fn downsets(&self) -> Vec<u32> {
        let k = self.len();
        let mut out: Vec<u32> = (0..1u32 << k)
            .filter(|&m| {
                (0..k)
                    .all(|j| m >> j & 1 == 0 || (0..k).all(|i| !self.leq[i][j] || m >> i & 1 == 1))
            })
            .collect();
        out.sort_by_key(|m| (m.count_ones(), *m));
        out
    }

    /// The lattice of down-sets, with identity operators.
    pub fn downset_lattice(&self) -> FiniteAlgebra {
        mask_lattice(&self.downsets())
    }

    fn automorphisms(&self) -> Vec<Vec<usize>> {
        let k = self.len();
        let mut out = Vec::new();
        let mut perm = vec![usize::MAX; k];
        let mut used = vec![false; k];
        fn go(
            p: &Poset,
            i: usize,
            perm: &mut Vec<usize>,
            used: &mut Vec<bool>,
            out: &mut Vec<Vec<usize>>,
        ) {
            let k = p.len();
            if i == k {
                out.push(perm.clone());
                return;
            }
            for t in 0..k {
                if used[t] {
                    continue;
                }
                let ok = (0..i)
                    .all(|j| p.leq[i][j] == p.leq[t][perm[j]] && p.leq[j][i] == p.leq[perm[j]][t]);
                if ok {
                    perm[i] = t;
                    used[t] = true;
                    go(p, i + 1, perm, used, out);
                    used[t] = false;
                }
            }
            perm[i] = usize::MAX;
        }
        go(self, 0, &mut perm, &mut used, &mut out);
        out
    }
}

fn mask_lattice(masks: &[u32]) -> FiniteAlgebra {
    let n = masks.len();
    let index: std::collections::HashMap<u32, usize> =
        masks.iter().enumerate().map(|(i, &m)| (m, i)).collect();
    let mut leq = vec![false; n * n];
    let mut meet = vec![0u32; n * n];
    let mut join = vec![0u32; n * n];
    for (i, &x) in masks.iter().enumerate() {
        for (j, &y) in masks.iter().enumerate() {
            leq[i * n + j] = x & !y == 0;
            meet[i * n + j] = index[&(x & y)] as u32;
            join[i * n + j] = index[&(x | y)] as u32;
        }
    }
    let id: Vec<u32> = (0..n as u32).collect();
    FiniteAlgebra::from_tables_unchecked(n, leq, meet, join, id.clone(), id)
}

/// Posets grown in linear-extension order, deduplicated through their
/// down-set lattices; `keep` prunes a poset and all its extensions.
fn poset_levels(max_points: usize, keep: &(dyn Fn(&Poset) -> bool + Sync)) -> Vec<Vec<Vec<u32>>> {
    let mut levels: Vec<Vec<Vec<u32>>> = vec![vec![vec![]]];
    for _ in 0..max_points {
        let last = levels.last().unwrap();
        let candidates: Vec<(CanonicalForm, Vec<u32>)> = last
            .par_iter()
            .flat_map_iter(|preds| {
                let p = Poset::from_preds(preds);
                p.downsets()
                    .into_iter()
                    .map(|d| {
                        let mut next = preds.clone();
                        next.push(d);
                        next
                    })
                    .collect::<Vec<_>>()
            })
            .filter_map(|preds| {
                let p = Poset::from_preds(&preds);
                keep(&p).then(|| (canonical_form(&p.downset_lattice()), preds))
            })
            .collect();
        let mut seen: BTreeMap<CanonicalForm, Vec<u32>> = BTreeMap::new();
        for (cf, preds) in candidates {
            seen.entry(cf).or_insert(preds);
        }
        if seen.is_empty() {
            break;
        }
        levels.push(seen.into_values().collect());
    }
    levels
}

/// All posets with exactly `k` points, up to isomorphism.
pub fn enum_posets(k: usize) -> Result<Vec<Poset>> {
    if k > 8 {
        return Err(Error::budget("poset points", 8, k));
    }
    let levels = poset_levels(k, &|_| true);
    Ok(levels
        .get(k)
        .map(|l| l.iter().map(|p| Poset::from_preds(p)).collect())
        .unwrap_or_default())
}

fn check_size(n: usize) -> Result<()> {
    if n > MAX_ENUMERATION_SIZE {
        Err(Error::budget("enumeration size", MAX_ENUMERATION_SIZE, n))
    } else {
        Ok(())
    }
}

/// Skeletons with at most `max` elements, keyed by lattice size.
fn skeletons(max: usize) -> Vec<Poset> {
    let levels = poset_levels(max.saturating_sub(1), &|p| p.downsets().len() <= max);
    levels
        .into_iter()
        .flatten()
        .map(|p| Poset::from_preds(&p))
        .collect()
}

fn sorted_by_form(v: Vec<FiniteAlgebra>) -> Vec<FiniteAlgebra> {
    let mut keyed: Vec<(usize, CanonicalForm, FiniteAlgebra)> = v
        .into_par_iter()
        .map(|a| (a.size(), canonical_form(&a), a))
        .collect();
    keyed.sort_by(|x, y| (x.0, &x.1).cmp(&(y.0, &y.1)));
    keyed.dedup_by(|x, y| x.1 == y.1);
    keyed.into_iter().map(|(_, _, a)| a).collect()
}

/// Every bounded distributive lattice with at most `max` elements, once
/// each, as algebras with identity operators.
pub fn enum_bdl(max: usize) -> Result<Vec<FiniteAlgebra>> {
    check_size(max)?;
    if max == 0 {
        return Ok(vec![]);
    }
    Ok(sorted_by_form(
        skeletons(max).iter().map(Poset::downset_lattice).collect(),
    ))
}

/// Independent check of [`enum_bdl`]: every order matrix on `n <= max`
/// points with `0` least and `n - 1` greatest and indices a linear
/// extension, filtered to distributive lattices and deduplicated.
pub fn enum_bdl_oracle(max: usize) -> Vec<FiniteAlgebra> {
    let mut found = vec![crate::corpus::trivial()];
    for n in 2..=max.min(8) {
        let mid: Vec<(usize, usize)> = (1..n - 1)
            .flat_map(|i| (i + 1..n - 1).map(move |j| (i, j)))
            .collect();
        for bits in 0u64..1 << mid.len() {
            let mut le = vec![vec![false; n]; n];
            for i in 0..n {
                le[i][i] = true;
                le[0][i] = true;
                le[i][n - 1] = true;
            }
            for (t, &(i, j)) in mid.iter().enumerate() {
                le[i][j] = bits >> t & 1 == 1;
            }
            let transitive =
                (0..n).all(|i| (0..n).all(|j| !le[i][j] || (0..n).all(|k| !le[j][k] || le[i][k])));
            if !transitive {
                continue;
            }
            let id: Vec<Elem> = (0..n).collect();
            let data = AlgebraData {
                size: n,
                leq: le
                    .iter()
                    .map(|r| r.iter().map(|&b| u8::from(b)).collect())
                    .collect(),
                box_table: id.clone(),
                diamond: id,
                name: None,
            };
            if let Ok(a) = FiniteAlgebra::from_data(&data) {
                found.push(a);
            }
        }
    }
    sorted_by_form(found)
}

/// What to enumerate. Sizes are inclusive; filters apply after generation.
#[derive(Debug, Clone)]
pub struct EnumerationTask {
    pub min_size: usize,
    pub max_size: usize,
    pub kind: Kind,
    pub si_only: bool,
    pub fsi_only: bool,
    pub equations: Vec<Equation>,
}

impl EnumerationTask {
    pub fn new(max_size: usize, kind: Kind) -> Self {
        EnumerationTask {
            min_size: 1,
            max_size,
            kind,
            si_only: false,
            fsi_only: false,
            equations: Vec::new(),
        }
    }

    pub fn exact(size: usize, kind: Kind) -> Self {
        EnumerationTask {
            min_size: size,
            ..Self::new(size, kind)
        }
    }

    pub fn si(mut self) -> Self {
        self.si_only = true;
        self
    }

    pub fn fsi(mut self) -> Self {
        self.fsi_only = true;
        self
    }

    pub fn satisfying(mut self, eqs: Vec<Equation>) -> Self {
        self.equations = eqs;
        self
    }

    fn accepts(&self, a: &FiniteAlgebra) -> bool {
        (!self.si_only || is_si(a))
            && (!self.fsi_only || is_fsi(a))
            && self.equations.iter().all(|e| holds_eq(a, e).holds())
    }
}

/// Monotone maps from `dom` into the lattice, optionally bounded pointwise.
fn monotone_maps(
    l: &FiniteAlgebra,
    dom: &[Elem],
    allowed: &dyn Fn(Elem, Elem) -> bool,
) -> Vec<Vec<Elem>> {
    let mut out = Vec::new();
    let mut cur: Vec<Elem> = Vec::with_capacity(dom.len());
    fn go(
        l: &FiniteAlgebra,
        dom: &[Elem],
        allowed: &dyn Fn(Elem, Elem) -> bool,
        cur: &mut Vec<Elem>,
        out: &mut Vec<Vec<Elem>>,
    ) {
        let i = cur.len();
        if i == dom.len() {
            out.push(cur.clone());
            return;
        }
        for v in l.elements() {
            let ok = allowed(dom[i], v)
                && (0..i).all(|j| {
                    (!l.leq(dom[j], dom[i]) || l.leq(cur[j], v))
                        && (!l.leq(dom[i], dom[j]) || l.leq(v, cur[j]))
                });
            if ok {
                cur.push(v);
                go(l, dom, allowed, cur, out);
                cur.pop();
            }
        }
    }
    go(l, dom, allowed, &mut cur, &mut out);
    out
}

fn meet_irreducibles(l: &FiniteAlgebra) -> Vec<Elem> {
    l.elements()
        .filter(|&x| {
            x != l.top()
                && l.elements()
                    .filter(|&y| l.lt(x, y) && !l.elements().any(|z| l.lt(x, z) && l.lt(z, y)))
                    .count()
                    == 1
        })
        .collect()
}

/// Box tables on `l` admissible for `kind` on their own.
fn box_candidates(l: &FiniteAlgebra, kind: Kind) -> Vec<Vec<Elem>> {
    let m = meet_irreducibles(l);
    let s4 = kind == Kind::Ps4;
    monotone_maps(l, &m, &|x, v| !s4 || l.leq(v, x))
        .into_iter()
        .map(|f| {
            l.elements()
                .map(|a| {
                    l.meet_all(
                        m.iter()
                            .zip(&f)
                            .filter(|(&mi, _)| l.leq(a, mi))
                            .map(|(_, &v)| v),
                    )
                })
                .collect::<Vec<Elem>>()
        })
        .filter(|b| match kind {
            Kind::Pma => true,
            Kind::Pk4 => l.elements().all(|a| l.leq(b[a], b[b[a]])),
            Kind::Ps4 => l.elements().all(|a| b[b[a]] == b[a]),
        })
        .collect()
}

fn dia_candidates(l: &FiniteAlgebra, kind: Kind) -> Vec<Vec<Elem>> {
    let j = l.join_irreducibles();
    let s4 = kind == Kind::Ps4;
    monotone_maps(l, &j, &|x, v| !s4 || l.leq(x, v))
        .into_iter()
        .map(|f| {
            l.elements()
                .map(|a| {
                    l.join_all(
                        j.iter()
                            .zip(&f)
                            .filter(|(&ji, _)| l.leq(ji, a))
                            .map(|(_, &v)| v),
                    )
                })
                .collect::<Vec<Elem>>()
        })
        .filter(|d| match kind {
            Kind::Pma => true,
            Kind::Pk4 => l.elements().all(|a| l.leq(d[d[a]], d[a])),
            Kind::Ps4 => l.elements().all(|a| d[d[a]] == d[a]),
        })
        .collect()
}

fn interacts(l: &FiniteAlgebra, b: &[Elem], d: &[Elem]) -> bool {
    l.elements().all(|x| {
        l.elements().all(|y| {
            l.leq(b[l.join(x, y)], l.join(b[x], d[y])) && l.leq(l.meet(b[x], d[y]), d[l.meet(x, y)])
        })
    })
}

/// Algebras on one skeleton, one per automorphism orbit of operator pairs.
fn expansions(p: &Poset, kind: Kind) -> Vec<FiniteAlgebra> {
    let masks = p.downsets();
    let l = mask_lattice(&masks);
    let index: std::collections::HashMap<u32, usize> =
        masks.iter().enumerate().map(|(i, &m)| (m, i)).collect();
    let auts: Vec<Vec<Elem>> = p
        .automorphisms()
        .into_iter()
        .filter(|s| s.iter().enumerate().any(|(i, &t)| i != t))
        .map(|s| {
            masks
                .iter()
                .map(|&m| {
                    let img = (0..p.len())
                        .filter(|&i| m >> i & 1 == 1)
                        .fold(0u32, |acc, i| acc | 1 << s[i]);
                    index[&img]
                })
                .collect()
        })
        .collect();
    let boxes = box_candidates(&l, kind);
    let dias = dia_candidates(&l, kind);
    let mut out = Vec::new();
    for b in &boxes {
        for d in &dias {
            if !interacts(&l, b, d) {
                continue;
            }
            let minimal = auts.iter().all(|s| {
                let mut tb = vec![0; b.len()];
                let mut td = vec![0; d.len()];
                for x in l.elements() {
                    tb[s[x]] = s[b[x]];
                    td[s[x]] = s[d[x]];
                }
                (b, d) <= (&tb, &td)
            });
            if minimal {
                out.push(l.with_operators(b, d));
            }
        }
    }
    out
}

fn named(a: FiniteAlgebra) -> FiniteAlgebra {
    match identify(&a) {
        Some(n) => a.with_name(n),
        None => a,
    }
}

/// All algebras of `kind` with exactly `size` elements, sorted by canonical
/// form.
pub fn enumerate_size(size: usize, kind: Kind) -> Result<Vec<FiniteAlgebra>> {
    check_size(size)?;
    if size == 0 {
        return Ok(vec![]);
    }
    let skel: Vec<Poset> = skeletons(size)
        .into_iter()
        .filter(|p| p.downsets().len() == size)
        .collect();
    let found: Vec<FiniteAlgebra> = skel
        .par_iter()
        .flat_map_iter(|p| expansions(p, kind))
        .collect();
    Ok(sorted_by_form(found).into_iter().map(named).collect())
}

/// Algebras of the task's kind and sizes passing its filters, by size and
/// then canonical form.
pub fn enum_algebras(task: &EnumerationTask) -> Result<Vec<FiniteAlgebra>> {
    enum_algebras_cached(task, None, false)
}

fn cache_file(dir: &Path, size: usize, kind: Kind) -> PathBuf {
    dir.join(format!("{kind}-{size}.jsonl"))
}

pub fn save_jsonl(path: &Path, algebras: &[FiniteAlgebra]) -> Result<()> {
    let io = |e: std::io::Error| Error::Io(format!("{}: {e}", path.display()));
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent).map_err(io)?;
    }
    let mut f = std::io::BufWriter::new(std::fs::File::create(path).map_err(io)?);
    for a in algebras {
        writeln!(f, "{}", a.to_json()).map_err(io)?;
    }
    f.flush().map_err(io)
}

pub fn load_jsonl(path: &Path) -> Result<Vec<FiniteAlgebra>> {
    let io = |e: std::io::Error| Error::Io(format!("{}: {e}", path.display()));
    let f = std::fs::File::open(path).map_err(io)?;
    std::io::BufReader::new(f)
        .lines()
        .filter(|l| l.as_ref().map_or(true, |s| !s.trim().is_empty()))
        .map(|l| FiniteAlgebra::from_json(&l.map_err(io)?))
        .collect()
}

/// As [`enum_algebras`], reading per-size files from `cache` when `resume`
/// is set and writing any it had to compute.
pub fn enum_algebras_cached(
    task: &EnumerationTask,
    cache: Option<&Path>,
    resume: bool,
) -> Result<Vec<FiniteAlgebra>> {
    if task.max_size == 0 {
        return Err(Error::ParameterOutOfRange {
            name: "max_size".into(),
            value: 0,
            range: ">= 1",
        });
    }
    check_size(task.max_size)?;
    let mut out = Vec::new();
    for size in task.min_size.max(1)..=task.max_size {
        let batch = match cache {
            Some(dir) if resume && cache_file(dir, size, task.kind).exists() => {
                load_jsonl(&cache_file(dir, size, task.kind))?
            }
            Some(dir) => {
                let b = enumerate_size(size, task.kind)?;
                save_jsonl(&cache_file(dir, size, task.kind), &b)?;
                b
            }
            None => enumerate_size(size, task.kind)?,
        };
        let kept: Vec<FiniteAlgebra> = batch.into_par_iter().filter(|a| task.accepts(a)).collect();
        out.extend(kept);
    }
    Ok(out)
}

/// Reference enumeration for small sizes: every operator table pair on
/// every oracle lattice, filtered by the full axiom check and deduplicated
/// by canonical form.
pub fn enum_algebras_naive(max: usize, kind: Kind) -> Vec<FiniteAlgebra> {
    let mut found: Vec<FiniteAlgebra> = Vec::new();
    for l in enum_bdl_oracle(max) {
        let n = l.size();
        let tables: Vec<Vec<Elem>> = crate::syntax::assignments(n, n).collect();
        let boxes: Vec<&Vec<Elem>> = tables
            .iter()
            .filter(|b| {
                b[l.top()] == l.top()
                    && l.elements()
                        .all(|x| l.elements().all(|y| b[l.meet(x, y)] == l.meet(b[x], b[y])))
            })
            .collect();
        let dias: Vec<&Vec<Elem>> = tables
            .iter()
            .filter(|d| {
                d[l.bottom()] == l.bottom()
                    && l.elements()
                        .all(|x| l.elements().all(|y| d[l.join(x, y)] == l.join(d[x], d[y])))
            })
            .collect();
        for b in &boxes {
            for d in &dias {
                let a = l.with_operators(b, d);
                if a.validate().satisfies(kind) {
                    found.push(a);
                }
            }
        }
    }
    let mut seen = HashSet::new();
    let unique: Vec<FiniteAlgebra> = found
        .into_iter()
        .filter(|a| seen.insert(canonical_form(a)))
        .collect();
    sorted_by_form(unique)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::is_iso;
    use crate::corpus::corpus;

    #[test]
    fn poset_counts() {
        let counts: Vec<usize> = (0..=5).map(|k| enum_posets(k).unwrap().len()).collect();
        assert_eq!(counts, vec![1, 1, 2, 5, 16, 63]);
    }

    #[test]
    fn lattice_counts_match_the_oracle() {
        let all = enum_bdl(8).unwrap();
        let by_size: Vec<usize> = (1..=8)
            .map(|n| all.iter().filter(|a| a.size() == n).count())
            .collect();
        assert_eq!(by_size, vec![1, 1, 1, 2, 3, 5, 8, 15]);
        let oracle = enum_bdl_oracle(7);
        let ours: Vec<_> = all
            .iter()
            .filter(|a| a.size() <= 7)
            .map(canonical_form)
            .collect();
        let theirs: Vec<_> = oracle.iter().map(canonical_form).collect();
        assert_eq!(ours, theirs);
    }

    #[test]
    fn four_element_lattices() {
        let four: Vec<_> = enum_bdl(4)
            .unwrap()
            .into_iter()
            .filter(|a| a.size() == 4)
            .collect();
        assert_eq!(four.len(), 2);
        assert_eq!(four.iter().filter(|a| a.is_chain()).count(), 1);
    }

    #[test]
    fn tiny_ps4() {
        let v = enum_algebras(&EnumerationTask::new(2, Kind::Ps4)).unwrap();
        assert_eq!(v.len(), 2);
        assert!(v[0].is_trivial());
        assert_eq!(v[1].name(), Some("C2"));
        let three = enum_algebras(&EnumerationTask::exact(3, Kind::Ps4)).unwrap();
        for n in ["D3", "C3a", "C3b", "EX44III"] {
            assert!(
                three.iter().any(|a| is_iso(a, &corpus(n, None).unwrap())),
                "{n}"
            );
        }
        assert_eq!(three.len(), 4);
    }

    #[test]
    fn agrees_with_naive_enumeration() {
        for kind in [Kind::Pma, Kind::Pk4, Kind::Ps4] {
            let ours = enum_algebras(&EnumerationTask::new(4, kind)).unwrap();
            let naive = enum_algebras_naive(4, kind);
            let a: Vec<_> = ours.iter().map(canonical_form).collect();
            let b: Vec<_> = naive.iter().map(canonical_form).collect();
            assert_eq!(a, b, "{kind}");
            assert!(ours.iter().all(|x| x.satisfies(kind)));
        }
    }

    #[test]
    fn jsonl_round_trip() {
        let dir = std::env::temp_dir().join(format!("poma-enum-{}", std::process::id()));
        let task = EnumerationTask::new(4, Kind::Ps4);
        let first = enum_algebras_cached(&task, Some(&dir), false).unwrap();
        let second = enum_algebras_cached(&task, Some(&dir), true).unwrap();
        assert_eq!(first, second);
        std::fs::remove_dir_all(&dir).ok();
    }
}
