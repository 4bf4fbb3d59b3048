//! Pretorsion theories on a finite category: the axioms, the canonical torsion
//! assignment, hereditarity, rectangularity and exhaustive enumeration.

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::cat::{FinCategory, FinFunctor, MorId, ObjId};
use crate::exactness::{
    canonical_cokernel, canonical_kernel, is_cokernel_of, is_kernel_of, short_exact_sequences, ShortExactSeq,
};
use crate::ideal::{ideal_from_objects, is_closed, Factorization, NullCategory};
use crate::ses::{ses_cached, SesCategory, SesError};

/// A candidate pair of object classes together with the ideal generated by
/// their intersection.
#[derive(Debug, Clone)]
pub struct PretorsionTheory {
    pub torsion: Vec<ObjId>,
    pub free: Vec<ObjId>,
    pub trivial: Vec<ObjId>,
    pub null: Arc<NullCategory>,
}

impl PretorsionTheory {
    pub fn new(cat: Arc<FinCategory>, torsion: &[ObjId], free: &[ObjId]) -> Self {
        let torsion: Vec<ObjId> = sorted(torsion);
        let free: Vec<ObjId> = sorted(free);
        let trivial: Vec<ObjId> = torsion.iter().copied().filter(|o| free.contains(o)).collect();
        let ideal = ideal_from_objects(&cat, &trivial).expect("objects of the category");
        Self {
            torsion,
            free,
            trivial,
            null: Arc::new(NullCategory::new(cat, ideal)),
        }
    }

    pub fn cat(&self) -> &FinCategory {
        self.null.cat()
    }

    pub fn in_torsion(&self, o: ObjId) -> bool {
        self.torsion.binary_search(&o).is_ok()
    }

    pub fn in_free(&self, o: ObjId) -> bool {
        self.free.binary_search(&o).is_ok()
    }
}

fn sorted(objs: &[ObjId]) -> Vec<ObjId> {
    let set: BTreeSet<ObjId> = objs.iter().copied().collect();
    set.into_iter().collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct T1Witness {
    pub morphism: String,
    pub factorization: Option<(String, String)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[allow(non_snake_case)]
pub struct PretorsionReport {
    pub T: Vec<String>,
    pub F: Vec<String>,
    pub iso_closed: bool,
    pub ideal_closed: bool,
    pub t1: bool,
    /// First morphism from a torsion to a torsion-free object that is not null.
    pub t1_counterexample: Option<String>,
    pub t2: bool,
    /// Objects with no short exact sequence of the required shape.
    pub t2_missing: Vec<String>,
    pub pass: bool,
}

fn is_iso_closed(c: &FinCategory, set: &[ObjId]) -> bool {
    set.iter()
        .all(|&a| c.objects().all(|b| !c.are_isomorphic(a, b) || set.contains(&b)))
}

fn t1_failure(th: &PretorsionTheory) -> Option<MorId> {
    let c = th.cat();
    th.torsion.iter().find_map(|&a| {
        th.free
            .iter()
            .find_map(|&b| c.hom(a, b).iter().copied().find(|&h| !th.null.is_null(h)))
    })
}

/// For each object, the minimal short exact sequence `T_X → X → F_X` with
/// `T_X ∈ T` and `F_X ∈ F`, if any.
fn chosen_sequences(th: &PretorsionTheory) -> Vec<Option<ShortExactSeq>> {
    let c = th.cat();
    let mut by_middle: Vec<Option<ShortExactSeq>> = vec![None; c.num_objects()];
    for s in short_exact_sequences(&th.null) {
        let mid = c.cod(s.f);
        if by_middle[mid.index()].is_none() && th.in_torsion(c.dom(s.f)) && th.in_free(c.cod(s.g)) {
            by_middle[mid.index()] = Some(s);
        }
    }
    by_middle
}

pub fn check_theory(th: &PretorsionTheory) -> PretorsionReport {
    let c = th.cat();
    let names = |v: &[ObjId]| v.iter().map(|&o| c.obj_name(o).to_string()).collect::<Vec<_>>();
    let iso_closed = is_iso_closed(c, &th.torsion) && is_iso_closed(c, &th.free);
    let ideal_closed = is_closed(c, th.null.ideal()).closed;
    let t1_bad = t1_failure(th);
    let chosen = chosen_sequences(th);
    let t2_missing: Vec<String> = c
        .objects()
        .filter(|o| chosen[o.index()].is_none())
        .map(|o| c.obj_name(o).to_string())
        .collect();
    let t1 = t1_bad.is_none();
    let t2 = t2_missing.is_empty();
    PretorsionReport {
        T: names(&th.torsion),
        F: names(&th.free),
        iso_closed,
        ideal_closed,
        t1,
        t1_counterexample: t1_bad.map(|m| c.mor_name(m).to_string()),
        t2,
        t2_missing,
        pass: iso_closed && ideal_closed && t1 && t2,
    }
}

pub fn check_pretorsion(c: &Arc<FinCategory>, torsion: &[ObjId], free: &[ObjId]) -> PretorsionReport {
    check_theory(&PretorsionTheory::new(c.clone(), torsion, free))
}

/// Factorizations through the trivial class of every morphism from a torsion
/// object to a torsion-free object.
pub fn t1_witnesses(th: &PretorsionTheory) -> Vec<T1Witness> {
    let c = th.cat();
    let mut out = Vec::new();
    for &a in &th.torsion {
        for &b in &th.free {
            for &h in c.hom(a, b) {
                let fact = th.trivial.iter().find_map(|&z| {
                    c.hom(a, z).iter().find_map(|&first| {
                        c.hom(z, b)
                            .iter()
                            .find(|&&second| c.compose(second, first) == h)
                            .map(|&second| Factorization { first, second })
                    })
                });
                out.push(T1Witness {
                    morphism: c.mor_name(h).into(),
                    factorization: fact.map(|f| (c.mor_name(f.first).to_string(), c.mor_name(f.second).to_string())),
                });
            }
        }
    }
    out
}

/// The chosen sequence of every object and the torsion and torsion-free parts
/// of every morphism.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TorsionAssignment {
    pub sequences: Vec<ShortExactSeq>,
    /// `(h_T, h_F)` per morphism.
    pub parts: Vec<(MorId, MorId)>,
}

impl TorsionAssignment {
    pub fn seq(&self, o: ObjId) -> ShortExactSeq {
        self.sequences[o.index()]
    }

    pub fn torsion_part(&self, h: MorId) -> MorId {
        self.parts[h.index()].0
    }

    pub fn free_part(&self, h: MorId) -> MorId {
        self.parts[h.index()].1
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AssignmentError {
    #[error("not a pretorsion theory")]
    NotPretorsion(Box<PretorsionReport>),
    #[error("morphism `{0}` has no torsion part")]
    NoTorsionPart(String),
    #[error("morphism `{0}` has no torsion-free part")]
    NoFreePart(String),
}

pub fn torsion_assignment(th: &PretorsionTheory) -> Result<TorsionAssignment, AssignmentError> {
    let report = check_theory(th);
    if !report.pass {
        return Err(AssignmentError::NotPretorsion(Box::new(report)));
    }
    let c = th.cat();
    let sequences: Vec<ShortExactSeq> = chosen_sequences(th).into_iter().map(|s| s.unwrap()).collect();
    let mut parts = Vec::with_capacity(c.num_morphisms());
    for h in c.morphisms() {
        let sx = sequences[c.dom(h).index()];
        let sy = sequences[c.cod(h).index()];
        let ht = c
            .unique_lift(sy.f, c.compose(h, sx.f))
            .ok_or_else(|| AssignmentError::NoTorsionPart(c.mor_name(h).into()))?;
        let hf = c
            .unique_colift(sx.g, c.compose(sy.g, h))
            .ok_or_else(|| AssignmentError::NoFreePart(c.mor_name(h).into()))?;
        parts.push((ht, hf));
    }
    Ok(TorsionAssignment { sequences, parts })
}

/// Failures of `(h∘k)_T = h_T∘k_T`, `id_T = id` and the dual equations.
pub fn functoriality_failures(c: &FinCategory, ta: &TorsionAssignment) -> Vec<String> {
    let mut out = Vec::new();
    for o in c.objects() {
        let s = ta.seq(o);
        let id = c.identity(o);
        if ta.torsion_part(id) != c.identity(c.dom(s.f)) || ta.free_part(id) != c.identity(c.cod(s.g)) {
            out.push(format!("identity of {}", c.obj_name(o)));
        }
    }
    for b in c.objects() {
        for &k in c.incoming(b) {
            for &h in c.outgoing(b) {
                let hk = c.compose(h, k);
                if ta.torsion_part(hk) != c.compose(ta.torsion_part(h), ta.torsion_part(k))
                    || ta.free_part(hk) != c.compose(ta.free_part(h), ta.free_part(k))
                {
                    out.push(format!("{} . {}", c.mor_name(h), c.mor_name(k)));
                }
            }
        }
    }
    out
}

/// The torsion assignment as a functor `C → Ses(C)`.
pub fn assignment_functor(
    th: &PretorsionTheory,
    ta: &TorsionAssignment,
    s: &Arc<SesCategory>,
) -> Result<FinFunctor, SesError> {
    let c = th.cat();
    let mut obj_map = Vec::with_capacity(c.num_objects());
    for o in c.objects() {
        let seq = ta.seq(o);
        obj_map.push(s.require_object(seq.f, seq.g)?);
    }
    let mut mor_map = Vec::with_capacity(c.num_morphisms());
    for h in c.morphisms() {
        let (u, w) = ta.parts[h.index()];
        mor_map.push(s.require_morphism(
            obj_map[c.dom(h).index()],
            obj_map[c.cod(h).index()],
            crate::ses::SesMorphism { u, v: h, w },
        )?);
    }
    Ok(FinFunctor {
        source: th.null.cat_arc().clone(),
        target: s.cat_arc(),
        obj_map,
        mor_map,
    })
}

pub fn ses_for(th: &PretorsionTheory) -> Result<Arc<SesCategory>, SesError> {
    ses_cached(&th.null)
}

pub fn is_hereditary(th: &PretorsionTheory, ta: &TorsionAssignment) -> bool {
    let nc = &th.null;
    nc.cat().morphisms().all(|g| match canonical_kernel(nc, g) {
        Some(k) => is_kernel_of(nc, ta.torsion_part(k), ta.torsion_part(g)),
        None => true,
    })
}

pub fn is_cohereditary(th: &PretorsionTheory, ta: &TorsionAssignment) -> bool {
    let nc = &th.null;
    nc.cat().morphisms().all(|g| match canonical_cokernel(nc, g) {
        Some(q) => is_cokernel_of(nc, ta.free_part(q), ta.free_part(g)),
        None => true,
    })
}

pub fn is_bihereditary(th: &PretorsionTheory, ta: &TorsionAssignment) -> bool {
    is_hereditary(th, ta) && is_cohereditary(th, ta)
}

/// Whether `X ↦ (T_X, F_X)` is an equivalence onto the product of the full
/// subcategories on `T` and `F`.
pub fn is_rectangular(th: &PretorsionTheory, ta: &TorsionAssignment) -> bool {
    let c = th.cat();
    let surjective = th.torsion.iter().all(|&a| {
        th.free.iter().all(|&b| {
            c.objects().any(|x| {
                let s = ta.seq(x);
                c.are_isomorphic(c.dom(s.f), a) && c.are_isomorphic(c.cod(s.g), b)
            })
        })
    });
    if !surjective {
        return false;
    }
    c.objects().all(|x| {
        c.objects().all(|y| {
            let (sx, sy) = (ta.seq(x), ta.seq(y));
            let expected = c.hom(c.dom(sx.f), c.dom(sy.f)).len() * c.hom(c.cod(sx.g), c.cod(sy.g)).len();
            let images: BTreeSet<(MorId, MorId)> = c.hom(x, y).iter().map(|&h| ta.parts[h.index()]).collect();
            images.len() == c.hom(x, y).len() && images.len() == expected
        })
    })
}

/// Every pretorsion theory on `c` whose classes are unions of isomorphism
/// classes, sorted by `(T, F)`.
pub fn enumerate_pretorsion(c: &Arc<FinCategory>) -> Vec<(Vec<ObjId>, Vec<ObjId>)> {
    let classes = c.iso_classes();
    let k = classes.len();
    assert!(k < 20, "enumeration beyond 19 isomorphism classes");
    let expand = |mask: u32| -> Vec<ObjId> {
        let mut v: Vec<ObjId> = (0..k)
            .filter(|i| mask >> i & 1 == 1)
            .flat_map(|i| classes[i].iter().copied())
            .collect();
        v.sort();
        v
    };
    // Null categories keyed by the trivial class, shared between candidates.
    let mut by_trivial: HashMap<u32, Arc<NullCategory>> = HashMap::new();
    let pairs: Vec<(u32, u32)> = (0..1u32 << k)
        .flat_map(|t| (0..1u32 << k).map(move |f| (t, f)))
        .collect();
    for &(t, f) in &pairs {
        by_trivial.entry(t & f).or_insert_with(|| {
            let z = expand(t & f);
            Arc::new(NullCategory::new(c.clone(), ideal_from_objects(c, &z).unwrap()))
        });
    }
    let mut found: Vec<(Vec<ObjId>, Vec<ObjId>)> = pairs
        .par_iter()
        .filter_map(|&(t, f)| {
            let th = PretorsionTheory {
                torsion: expand(t),
                free: expand(f),
                trivial: expand(t & f),
                null: by_trivial[&(t & f)].clone(),
            };
            if t1_failure(&th).is_some() {
                return None;
            }
            chosen_sequences(&th)
                .iter()
                .all(Option::is_some)
                .then_some((th.torsion, th.free))
        })
        .collect();
    found.sort();
    found
}

/// Pairs `(T, F)` of subsets of `{1..n}` with `T ∪ F` everything, `1 ∈ T`,
/// `n ∈ F`, and `i ∈ T ∧ i+1 ∈ F ⇒ i ∈ F ∨ i+1 ∈ T`. Labels are 1-based.
pub fn chain_characterization(n: usize) -> Vec<(Vec<usize>, Vec<usize>)> {
    assert!((1..=20).contains(&n), "chain length out of range");
    let mut out = Vec::new();
    for t in 0..1u32 << n {
        for f in 0..1u32 << n {
            let has = |mask: u32, i: usize| mask >> (i - 1) & 1 == 1;
            if (t | f) != (1 << n) - 1 || !has(t, 1) || !has(f, n) {
                continue;
            }
            let ok = (1..n).all(|i| !(has(t, i) && has(f, i + 1)) || has(f, i) || has(t, i + 1));
            if ok {
                let labels = |mask: u32| (1..=n).filter(|&i| has(mask, i)).collect::<Vec<_>>();
                out.push((labels(t), labels(f)));
            }
        }
    }
    out.sort();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cat::{build_chain, build_pointed_sets};

    fn objs(c: &FinCategory, names: &[&str]) -> Vec<ObjId> {
        names.iter().map(|n| c.find_obj(n).unwrap()).collect()
    }

    #[test]
    fn ps2_checks() {
        let c = Arc::new(build_pointed_sets(2).unwrap());
        assert!(check_pretorsion(&c, &objs(&c, &["P1", "P2"]), &objs(&c, &["P1"])).pass);
        let r = check_pretorsion(&c, &objs(&c, &["P2"]), &objs(&c, &["P1", "P2"]));
        assert!(!r.pass);
        assert!(r.t2_missing.contains(&"P1".to_string()));
    }

    #[test]
    fn chain3_example_passes() {
        let c = Arc::new(build_chain(3).unwrap());
        assert!(check_pretorsion(&c, &objs(&c, &["1", "2"]), &objs(&c, &["2", "3"])).pass);
    }

    #[test]
    fn ps2_assignment_shape() {
        let c = Arc::new(build_pointed_sets(2).unwrap());
        let th = PretorsionTheory::new(c.clone(), &objs(&c, &["P1", "P2"]), &objs(&c, &["P1"]));
        let ta = torsion_assignment(&th).unwrap();
        for o in c.objects() {
            let s = ta.seq(o);
            assert_eq!(s.f, c.identity(o));
            assert!(th.null.is_null_object(c.cod(s.g)));
        }
        assert!(functoriality_failures(&c, &ta).is_empty());
    }

    #[test]
    fn z1_assignment_is_identity() {
        let c = Arc::new(build_pointed_sets(1).unwrap());
        let th = PretorsionTheory::new(c.clone(), &[ObjId(0)], &[ObjId(0)]);
        let ta = torsion_assignment(&th).unwrap();
        assert_eq!(
            ta.seq(ObjId(0)),
            ShortExactSeq {
                f: MorId(0),
                g: MorId(0)
            }
        );
        assert!(is_rectangular(&th, &ta));
    }

    #[test]
    fn enumeration_counts() {
        let ps2 = Arc::new(build_pointed_sets(2).unwrap());
        let found = enumerate_pretorsion(&ps2);
        let p1 = ObjId(0);
        let p2 = ObjId(1);
        assert_eq!(
            found,
            vec![
                (vec![p1], vec![p1, p2]),
                (vec![p1, p2], vec![p1]),
                (vec![p1, p2], vec![p1, p2]),
            ]
        );
        assert_eq!(enumerate_pretorsion(&Arc::new(build_chain(2).unwrap())).len(), 3);
        assert_eq!(enumerate_pretorsion(&Arc::new(build_chain(3).unwrap())).len(), 8);
    }

    #[test]
    fn chain_characterization_small() {
        assert_eq!(chain_characterization(1), vec![(vec![1], vec![1])]);
        assert_eq!(
            chain_characterization(2),
            vec![(vec![1], vec![1, 2]), (vec![1, 2], vec![1, 2]), (vec![1, 2], vec![2])]
        );
        assert_eq!(chain_characterization(3).len(), 8);
    }
}
