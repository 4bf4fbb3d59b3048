//! Ideals of null morphisms, closedness, null objects and the
//! reflects/coreflects-null predicates.

use std::sync::{Arc, OnceLock};

use bitvec::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::cat::{FinCategory, MorId, ObjId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IdealError {
    #[error("morphism index {0} does not exist")]
    UnknownMorphism(u32),
    #[error("object index {0} does not exist")]
    UnknownObject(u32),
}

/// `member = second ∘ first`, where `cod(first)` is a null object.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Factorization {
    pub first: MorId,
    pub second: MorId,
}

/// A set of morphisms of one category, stored as a bitset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ideal {
    members: BitVec,
}

impl Ideal {
    pub fn empty(c: &FinCategory) -> Self {
        Self {
            members: bitvec![0; c.num_morphisms()],
        }
    }

    pub fn all(c: &FinCategory) -> Self {
        Self {
            members: bitvec![1; c.num_morphisms()],
        }
    }

    pub fn from_members(c: &FinCategory, members: impl IntoIterator<Item = MorId>) -> Result<Self, IdealError> {
        let mut ideal = Self::empty(c);
        for m in members {
            if m.index() >= c.num_morphisms() {
                return Err(IdealError::UnknownMorphism(m.0));
            }
            ideal.members.set(m.index(), true);
        }
        Ok(ideal)
    }

    #[inline]
    pub fn contains(&self, m: MorId) -> bool {
        self.members[m.index()]
    }

    pub fn members(&self) -> impl Iterator<Item = MorId> + '_ {
        self.members.iter_ones().map(|i| MorId(i as u32))
    }

    pub fn len(&self) -> usize {
        self.members.count_ones()
    }

    pub fn is_empty(&self) -> bool {
        self.members.not_any()
    }
}

/// A composite `outer ∘ inner` with one null factor that escapes the set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct AbsorptionWitness {
    pub outer: MorId,
    pub inner: MorId,
    pub composite: MorId,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IdealCheck {
    pub is_ideal: bool,
    pub counterexample: Option<AbsorptionWitness>,
}

fn absorption_failure(c: &FinCategory, n: &Ideal) -> Option<AbsorptionWitness> {
    for m in n.members() {
        for &g in c.outgoing(c.cod(m)) {
            let gm = c.compose(g, m);
            if !n.contains(gm) {
                return Some(AbsorptionWitness {
                    outer: g,
                    inner: m,
                    composite: gm,
                });
            }
        }
        for &f in c.incoming(c.dom(m)) {
            let mf = c.compose(m, f);
            if !n.contains(mf) {
                return Some(AbsorptionWitness {
                    outer: m,
                    inner: f,
                    composite: mf,
                });
            }
        }
    }
    None
}

/// Two-sided absorption. Checking single-sided composites suffices because
/// `g∘n∘f` is reached in two steps.
pub fn is_ideal(c: &FinCategory, members: &[MorId]) -> Result<IdealCheck, IdealError> {
    let n = Ideal::from_members(c, members.iter().copied())?;
    Ok(check_ideal(c, &n))
}

pub fn check_ideal(c: &FinCategory, n: &Ideal) -> IdealCheck {
    let counterexample = absorption_failure(c, n);
    IdealCheck {
        is_ideal: counterexample.is_none(),
        counterexample,
    }
}

pub fn null_objects(c: &FinCategory, n: &Ideal) -> Vec<ObjId> {
    c.objects().filter(|&o| n.contains(c.identity(o))).collect()
}

fn factor_through(c: &FinCategory, m: MorId, zs: &[ObjId]) -> Option<Factorization> {
    let (a, b) = (c.dom(m), c.cod(m));
    zs.iter().find_map(|&z| {
        c.hom(a, z).iter().find_map(|&first| {
            c.hom(z, b)
                .iter()
                .find(|&&second| c.compose(second, first) == m)
                .map(|&second| Factorization { first, second })
        })
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClosedCheck {
    pub closed: bool,
    /// One entry per member, in index order.
    pub witnesses: Vec<(MorId, Option<Factorization>)>,
}

pub fn is_closed(c: &FinCategory, n: &Ideal) -> ClosedCheck {
    let zs = null_objects(c, n);
    let witnesses: Vec<_> = n.members().map(|m| (m, factor_through(c, m, &zs))).collect();
    ClosedCheck {
        closed: witnesses.iter().all(|(_, w)| w.is_some()),
        witnesses,
    }
}

/// All morphisms factoring through some object of `zs`.
pub fn ideal_from_objects(c: &FinCategory, zs: &[ObjId]) -> Result<Ideal, IdealError> {
    if let Some(z) = zs.iter().find(|z| z.index() >= c.num_objects()) {
        return Err(IdealError::UnknownObject(z.0));
    }
    let mut ideal = Ideal::empty(c);
    for &z in zs {
        for &f in c.incoming(z) {
            for &g in c.outgoing(z) {
                ideal.members.set(c.compose(g, f).index(), true);
            }
        }
    }
    Ok(ideal)
}

/// `ξ ∘ a ∈ N ⇒ a ∈ N` for every `a` into `dom ξ`.
pub fn reflects_null(c: &FinCategory, n: &Ideal, xi: MorId) -> bool {
    c.incoming(c.dom(xi))
        .iter()
        .all(|&a| !n.contains(c.compose(xi, a)) || n.contains(a))
}

/// `a ∘ ξ ∈ N ⇒ a ∈ N` for every `a` out of `cod ξ`.
pub fn coreflects_null(c: &FinCategory, n: &Ideal, xi: MorId) -> bool {
    c.outgoing(c.cod(xi))
        .iter()
        .all(|&a| !n.contains(c.compose(a, xi)) || n.contains(a))
}

/// A category paired with an ideal, with per-morphism kernel and cokernel caches.
#[derive(Debug)]
pub struct NullCategory {
    cat: Arc<FinCategory>,
    ideal: Ideal,
    null_object: BitVec,
    pub(crate) kernels: Vec<OnceLock<Option<MorId>>>,
    pub(crate) cokernels: Vec<OnceLock<Option<MorId>>>,
}

impl NullCategory {
    pub fn new(cat: Arc<FinCategory>, ideal: Ideal) -> Self {
        let mut null_object = bitvec![0; cat.num_objects()];
        for o in null_objects(&cat, &ideal) {
            null_object.set(o.index(), true);
        }
        let n = cat.num_morphisms();
        Self {
            cat,
            ideal,
            null_object,
            kernels: (0..n).map(|_| OnceLock::new()).collect(),
            cokernels: (0..n).map(|_| OnceLock::new()).collect(),
        }
    }

    /// The ideal of morphisms factoring through `zs`.
    pub fn through_objects(cat: Arc<FinCategory>, zs: &[ObjId]) -> Result<Self, IdealError> {
        let ideal = ideal_from_objects(&cat, zs)?;
        Ok(Self::new(cat, ideal))
    }

    #[inline]
    pub fn cat(&self) -> &FinCategory {
        &self.cat
    }

    pub fn cat_arc(&self) -> &Arc<FinCategory> {
        &self.cat
    }

    pub fn ideal(&self) -> &Ideal {
        &self.ideal
    }

    #[inline]
    pub fn is_null(&self, m: MorId) -> bool {
        self.ideal.contains(m)
    }

    #[inline]
    pub fn is_null_object(&self, o: ObjId) -> bool {
        self.null_object[o.index()]
    }

    pub fn null_objects(&self) -> Vec<ObjId> {
        self.null_object.iter_ones().map(|i| ObjId(i as u32)).collect()
    }

    pub fn reflects_null(&self, xi: MorId) -> bool {
        reflects_null(&self.cat, &self.ideal, xi)
    }

    pub fn coreflects_null(&self, xi: MorId) -> bool {
        coreflects_null(&self.cat, &self.ideal, xi)
    }
}
