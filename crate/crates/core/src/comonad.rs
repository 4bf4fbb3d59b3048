//! The Ses comonad: Ω on functors and natural transformations (pointwise or
//! through short exact replacement), the counit ε, the comultiplication δ, the
//! structure cells δ_G, the coassociator Ξ, the compositor of Ω^ex and the
//! adjoint string around ε.
//!
//! Objects and morphisms one level above the last materialized Ses category
//! are kept as pairs and triples of morphisms of that category and composed
//! componentwise.

use std::sync::{Arc, OnceLock};

use serde::Serialize;
use thiserror::Error;

use crate::cat::{FinCategory, FinFunctor, MorId, NatTrans, ObjId};
use crate::exactness::{
    canonical_cokernel, canonical_kernel, is_cokernel_of, is_exact, is_kernel_of, is_short_exact, replacement,
    short_exact_sequences, ExactSeq, ShortExactSeq,
};
use crate::ideal::NullCategory;
use crate::ses::{SesCategory, SesError, SesMorphism};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ComonadError {
    #[error("mode violation: {0}")]
    ModeViolation(String),
    #[error("construction failed: {0}")]
    Construction(String),
    #[error(transparent)]
    Ses(#[from] SesError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Mode {
    Strict,
    Exact,
}

/// Anything that acts like a functor on identifiers, possibly failing.
pub trait FunctorMap: Sync {
    fn obj(&self, o: ObjId) -> Result<ObjId, ComonadError>;
    fn mor(&self, m: MorId) -> Result<MorId, ComonadError>;
}

impl FunctorMap for FinFunctor {
    fn obj(&self, o: ObjId) -> Result<ObjId, ComonadError> {
        Ok(FinFunctor::obj(self, o))
    }

    fn mor(&self, m: MorId) -> Result<MorId, ComonadError> {
        Ok(FinFunctor::mor(self, m))
    }
}

/// `second ∘ first`.
pub struct Then<'a>(pub &'a dyn FunctorMap, pub &'a dyn FunctorMap);

impl FunctorMap for Then<'_> {
    fn obj(&self, o: ObjId) -> Result<ObjId, ComonadError> {
        self.1.obj(self.0.obj(o)?)
    }

    fn mor(&self, m: MorId) -> Result<MorId, ComonadError> {
        self.1.mor(self.0.mor(m)?)
    }
}

// ---------------------------------------------------------------------------
// Componentwise algebra on triples.

pub fn identity3(d: &FinCategory, pair: (MorId, MorId)) -> SesMorphism {
    SesMorphism {
        u: d.identity(d.dom(pair.0)),
        v: d.identity(d.cod(pair.0)),
        w: d.identity(d.cod(pair.1)),
    }
}

/// `second ∘ first`, componentwise.
pub fn then3(d: &FinCategory, first: SesMorphism, second: SesMorphism) -> SesMorphism {
    SesMorphism {
        u: d.compose(second.u, first.u),
        v: d.compose(second.v, first.v),
        w: d.compose(second.w, first.w),
    }
}

pub fn chain3(d: &FinCategory, steps: &[SesMorphism]) -> SesMorphism {
    steps[1..].iter().fold(steps[0], |acc, &s| then3(d, acc, s))
}

pub fn inverse3(d: &FinCategory, m: SesMorphism) -> Option<SesMorphism> {
    Some(SesMorphism {
        u: d.inverse(m.u)?,
        v: d.inverse(m.v)?,
        w: d.inverse(m.w)?,
    })
}

pub fn is_identity3(d: &FinCategory, m: SesMorphism) -> bool {
    d.is_identity(m.u) && d.is_identity(m.v) && d.is_identity(m.w)
}

/// Every triple `(u, v, w)` of morphisms of `d` from the pair `src` to the pair
/// `tgt` making both squares commute, with `allow(position, morphism)`
/// filtering each component. Sorted with identities preferred.
pub fn commuting_triples(
    d: &FinCategory,
    src: (MorId, MorId),
    tgt: (MorId, MorId),
    allow: impl Fn(usize, MorId) -> bool,
) -> Vec<SesMorphism> {
    let (f, g) = src;
    let (f2, g2) = tgt;
    let (x, y, z) = (d.dom(f), d.cod(f), d.cod(g));
    let (x2, y2, z2) = (d.dom(f2), d.cod(f2), d.cod(g2));
    let mut out = Vec::new();
    for &v in d.hom(y, y2) {
        if !allow(1, v) {
            continue;
        }
        let vf = d.compose(v, f);
        let gv = d.compose(g2, v);
        let us: Vec<MorId> = d
            .hom(x, x2)
            .iter()
            .copied()
            .filter(|&u| allow(0, u) && d.compose(f2, u) == vf)
            .collect();
        if us.is_empty() {
            continue;
        }
        let ws: Vec<MorId> = d
            .hom(z, z2)
            .iter()
            .copied()
            .filter(|&w| allow(2, w) && d.compose(w, g) == gv)
            .collect();
        for &u in &us {
            for &w in &ws {
                out.push(SesMorphism { u, v, w });
            }
        }
    }
    out.sort_by_key(|m| {
        let non_id = [m.u, m.v, m.w].iter().filter(|&&x| !d.is_identity(x)).count();
        (non_id, *m)
    });
    out
}

// ---------------------------------------------------------------------------
// Classification of functors.

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ModeReport {
    pub modes: Vec<Mode>,
    pub preserves_null_objects: bool,
    pub preserves_short_exact: bool,
    pub preserves_reflecting: bool,
    pub preserves_coreflecting: bool,
    /// Consequences that a classified functor is supposed to have but does not.
    pub inconsistencies: Vec<String>,
}

impl ModeReport {
    pub fn is(&self, mode: Mode) -> bool {
        self.modes.contains(&mode)
    }
}

fn preserves_kernels(g: &FinFunctor, src: &NullCategory, tgt: &NullCategory) -> bool {
    src.cat().morphisms().all(|f| {
        let k_ok = canonical_kernel(src, f).is_none_or(|k| is_kernel_of(tgt, g.mor(k), g.mor(f)));
        let q_ok = canonical_cokernel(src, f).is_none_or(|q| is_cokernel_of(tgt, g.mor(q), g.mor(f)));
        k_ok && q_ok
    })
}

fn null_composite_pairs(c: &NullCategory) -> Vec<(MorId, MorId)> {
    let cat = c.cat();
    let mut out = Vec::new();
    for b in cat.objects() {
        for &f in cat.incoming(b) {
            for &g in cat.outgoing(b) {
                if c.is_null(cat.compose(g, f)) {
                    out.push((f, g));
                }
            }
        }
    }
    out
}

fn preserves_exact(g: &FinFunctor, src: &NullCategory, tgt: &NullCategory) -> bool {
    null_composite_pairs(src)
        .into_iter()
        .all(|(f, h)| !is_exact(src, f, h) || is_exact(tgt, g.mor(f), g.mor(h)))
}

/// Decides STRICT and EXACT by exhaustive predicate checks, and verifies the
/// properties such functors automatically have.
pub fn classify_morphism(g: &FinFunctor, src: &NullCategory, tgt: &NullCategory) -> ModeReport {
    let strict = preserves_kernels(g, src, tgt);
    let exact = preserves_exact(g, src, tgt);
    let sc = src.cat();
    let preserves_null_objects = sc
        .objects()
        .filter(|&o| src.is_null_object(o))
        .all(|o| tgt.is_null_object(g.obj(o)));
    let preserves_short_exact = short_exact_sequences(src)
        .iter()
        .all(|s| is_short_exact(tgt, g.mor(s.f), g.mor(s.g)));
    let preserves_reflecting = sc
        .morphisms()
        .filter(|&x| src.reflects_null(x))
        .all(|x| tgt.reflects_null(g.mor(x)));
    let preserves_coreflecting = sc
        .morphisms()
        .filter(|&x| src.coreflects_null(x))
        .all(|x| tgt.coreflects_null(g.mor(x)));
    let mut inconsistencies = Vec::new();
    if strict && !exact {
        inconsistencies.push("STRICT functor does not preserve exact sequences".into());
    }
    if strict && !preserves_null_objects {
        inconsistencies.push("STRICT functor does not preserve null objects".into());
    }
    if strict && !preserves_short_exact {
        inconsistencies.push("STRICT functor does not preserve short exact sequences".into());
    }
    if exact && !preserves_null_objects {
        inconsistencies.push("EXACT functor does not preserve null objects".into());
    }
    if exact && !(preserves_reflecting && preserves_coreflecting) {
        inconsistencies.push("EXACT functor does not preserve null-reflecting morphisms".into());
    }
    let mut modes = Vec::new();
    if strict {
        modes.push(Mode::Strict);
    }
    if exact {
        modes.push(Mode::Exact);
    }
    ModeReport {
        modes,
        preserves_null_objects,
        preserves_short_exact,
        preserves_reflecting,
        preserves_coreflecting,
        inconsistencies,
    }
}

// ---------------------------------------------------------------------------
// Ω on functors and transformations.

/// The image of a short exact sequence under Ω(G): the pair itself in STRICT
/// mode, its short exact replacement in EXACT mode.
pub fn omega_object(
    mode: Mode,
    g: &dyn FunctorMap,
    src: &SesCategory,
    d: &NullCategory,
    e: ObjId,
) -> Result<ExactSeq, ComonadError> {
    let s = src.object(e);
    let (gf, gg) = (g.mor(s.f)?, g.mor(s.g)?);
    let dc = d.cat();
    match mode {
        Mode::Strict => {
            if !is_short_exact(d, gf, gg) {
                return Err(ComonadError::ModeViolation(format!(
                    "image ({}, {}) is not short exact",
                    dc.mor_name(gf),
                    dc.mor_name(gg)
                )));
            }
            Ok(ExactSeq {
                f: gf,
                g: gg,
                xi1: dc.identity(dc.dom(gf)),
                xi2: dc.identity(dc.cod(gg)),
                replacement: ShortExactSeq { f: gf, g: gg },
            })
        }
        Mode::Exact => replacement(d, gf, gg).map_err(|e| ComonadError::ModeViolation(e.to_string())),
    }
}

pub fn omega_morphism(
    mode: Mode,
    g: &dyn FunctorMap,
    src: &SesCategory,
    d: &NullCategory,
    m: MorId,
) -> Result<SesMorphism, ComonadError> {
    let t = src.morphism(m);
    let dc = d.cat();
    match mode {
        Mode::Strict => Ok(SesMorphism {
            u: g.mor(t.u)?,
            v: g.mor(t.v)?,
            w: g.mor(t.w)?,
        }),
        Mode::Exact => {
            let rs = omega_object(mode, g, src, d, src.cat().dom(m))?.replacement;
            let rt = omega_object(mode, g, src, d, src.cat().cod(m))?.replacement;
            let gv = g.mor(t.v)?;
            let missing = || ComonadError::Construction("induced filler of [G] missing".into());
            let u = dc.unique_lift(rt.f, dc.compose(gv, rs.f)).ok_or_else(missing)?;
            let w = dc.unique_colift(rs.g, dc.compose(rt.g, gv)).ok_or_else(missing)?;
            Ok(SesMorphism { u, v: gv, w })
        }
    }
}

/// Component of Ω(α) at `e`, for `α: G ⇒ H` given by its components.
pub fn omega_nat_component(
    mode: Mode,
    g: &dyn FunctorMap,
    h: &dyn FunctorMap,
    alpha: &dyn Fn(ObjId) -> Result<MorId, ComonadError>,
    src: &SesCategory,
    d: &NullCategory,
    e: ObjId,
) -> Result<SesMorphism, ComonadError> {
    let base = src.base_cat();
    let s = src.object(e);
    let dc = d.cat();
    match mode {
        Mode::Strict => Ok(SesMorphism {
            u: alpha(base.dom(s.f))?,
            v: alpha(base.cod(s.f))?,
            w: alpha(base.cod(s.g))?,
        }),
        Mode::Exact => {
            let rg = omega_object(mode, g, src, d, e)?.replacement;
            let rh = omega_object(mode, h, src, d, e)?.replacement;
            let ay = alpha(base.cod(s.f))?;
            let missing = || ComonadError::Construction("induced filler of [α] missing".into());
            let u = dc.unique_lift(rh.f, dc.compose(ay, rg.f)).ok_or_else(missing)?;
            let w = dc.unique_colift(rg.g, dc.compose(rh.g, ay)).ok_or_else(missing)?;
            Ok(SesMorphism { u, v: ay, w })
        }
    }
}

/// Ω(G) into a materialized Ses(D), evaluated lazily and memoized.
pub struct OmegaMap<'a> {
    pub mode: Mode,
    pub g: &'a dyn FunctorMap,
    pub src: &'a SesCategory,
    pub tgt: &'a SesCategory,
    objs: Vec<OnceLock<Result<ObjId, ComonadError>>>,
    mors: Vec<OnceLock<Result<MorId, ComonadError>>>,
}

impl<'a> OmegaMap<'a> {
    pub fn new(mode: Mode, g: &'a dyn FunctorMap, src: &'a SesCategory, tgt: &'a SesCategory) -> Self {
        Self {
            mode,
            g,
            src,
            tgt,
            objs: (0..src.cat().num_objects()).map(|_| OnceLock::new()).collect(),
            mors: (0..src.cat().num_morphisms()).map(|_| OnceLock::new()).collect(),
        }
    }

    /// Evaluates everything; fails on the first object or morphism that has no image.
    pub fn to_functor(&self) -> Result<FinFunctor, ComonadError> {
        tabulate(self, self.src.cat_arc(), self.tgt.cat_arc())
    }
}

impl FunctorMap for OmegaMap<'_> {
    fn obj(&self, o: ObjId) -> Result<ObjId, ComonadError> {
        self.objs[o.index()]
            .get_or_init(|| {
                let r = omega_object(self.mode, self.g, self.src, self.tgt.base(), o)?.replacement;
                Ok(self.tgt.require_object(r.f, r.g)?)
            })
            .clone()
    }

    fn mor(&self, m: MorId) -> Result<MorId, ComonadError> {
        self.mors[m.index()]
            .get_or_init(|| {
                let t = omega_morphism(self.mode, self.g, self.src, self.tgt.base(), m)?;
                let sc = self.src.cat();
                let (a, b) = (self.obj(sc.dom(m))?, self.obj(sc.cod(m))?);
                Ok(self.tgt.require_morphism(a, b, t)?)
            })
            .clone()
    }
}

pub fn omega_on_functor(
    g: &FinFunctor,
    src: &SesCategory,
    tgt: &SesCategory,
    mode: Mode,
) -> Result<FinFunctor, ComonadError> {
    OmegaMap::new(mode, g, src, tgt).to_functor()
}

pub fn omega_on_nat(
    alpha: &NatTrans,
    src: &SesCategory,
    tgt: &SesCategory,
    mode: Mode,
) -> Result<NatTrans, ComonadError> {
    let og = omega_on_functor(&alpha.source, src, tgt, mode)?;
    let oh = omega_on_functor(&alpha.target, src, tgt, mode)?;
    let comp = |o: ObjId| Ok(alpha.at(o));
    let mut components = Vec::with_capacity(src.cat().num_objects());
    for e in src.cat().objects() {
        let t = omega_nat_component(mode, &alpha.source, &alpha.target, &comp, src, tgt.base(), e)?;
        components.push(tgt.require_morphism(og.obj(e), oh.obj(e), t)?);
    }
    Ok(NatTrans {
        source: og,
        target: oh,
        components,
    })
}

// ---------------------------------------------------------------------------
// Counit and comultiplication.

/// ε: the middle projection Ses(C) → C.
pub fn counit(s: &SesCategory) -> FinFunctor {
    let sc = s.cat();
    FinFunctor {
        source: s.cat_arc(),
        target: s.base().cat_arc().clone(),
        obj_map: sc.objects().map(|o| s.middle(o)).collect(),
        mor_map: sc.morphisms().map(|m| s.morphism(m).v).collect(),
    }
}

/// Outer projections Ses(C) → C: `(X, Z)` of every sequence.
pub fn outer_projections(s: &SesCategory) -> (FinFunctor, FinFunctor) {
    let sc = s.cat();
    let base = s.base().cat_arc().clone();
    let first = FinFunctor {
        source: s.cat_arc(),
        target: base.clone(),
        obj_map: sc.objects().map(|o| s.triple_of(o).0).collect(),
        mor_map: sc.morphisms().map(|m| s.morphism(m).u).collect(),
    };
    let third = FinFunctor {
        source: s.cat_arc(),
        target: base,
        obj_map: sc.objects().map(|o| s.triple_of(o).2).collect(),
        mor_map: sc.morphisms().map(|m| s.morphism(m).w).collect(),
    };
    (first, third)
}

fn need(x: Option<MorId>, what: &str) -> Result<MorId, ComonadError> {
    x.ok_or_else(|| ComonadError::Construction(what.into()))
}

/// The 3×3 grid of `e`: the pair of Ses-morphisms
/// `(id_X, coker id_X) → e → (ker id_Z, id_Z)`.
pub fn delta_object(s: &SesCategory, e: ObjId) -> Result<(MorId, MorId), ComonadError> {
    let c = s.base_cat();
    let base = s.base();
    let seq = s.object(e);
    let (x, _, z) = s.triple_of(e);
    let qx = need(canonical_cokernel(base, c.identity(x)), "cokernel of an identity")?;
    let kz = need(canonical_kernel(base, c.identity(z)), "kernel of an identity")?;
    let gf = c.compose(seq.g, seq.f);
    let w = need(c.unique_colift(qx, gf), "top-right filler")?;
    let u = need(c.unique_lift(kz, gf), "bottom-left filler")?;
    let r1 = s.require_object(c.identity(x), qx)?;
    let r3 = s.require_object(kz, c.identity(z))?;
    let a1 = s.require_morphism(
        r1,
        e,
        SesMorphism {
            u: c.identity(x),
            v: seq.f,
            w,
        },
    )?;
    let a2 = s.require_morphism(
        e,
        r3,
        SesMorphism {
            u,
            v: seq.g,
            w: c.identity(z),
        },
    )?;
    Ok((a1, a2))
}

/// δ on a morphism `(a, b, c)`: rows `(a, a, induced)`, `(a, b, c)`, `(induced, c, c)`.
pub fn delta_morphism(s: &SesCategory, m: MorId) -> Result<SesMorphism, ComonadError> {
    let c = s.base_cat();
    let base = s.base();
    let sc = s.cat();
    let t = s.morphism(m);
    let (e, e2) = (sc.dom(m), sc.cod(m));
    let (x, _, z) = s.triple_of(e);
    let (x2, _, z2) = s.triple_of(e2);
    let qx = need(canonical_cokernel(base, c.identity(x)), "cokernel of an identity")?;
    let qx2 = need(canonical_cokernel(base, c.identity(x2)), "cokernel of an identity")?;
    let kz = need(canonical_kernel(base, c.identity(z)), "kernel of an identity")?;
    let kz2 = need(canonical_kernel(base, c.identity(z2)), "kernel of an identity")?;
    let top_w = need(c.unique_colift(qx, c.compose(qx2, t.u)), "top filler")?;
    let bot_u = need(c.unique_lift(kz2, c.compose(t.w, kz)), "bottom filler")?;
    let (a1, _) = delta_object(s, e)?;
    let (a1b, _) = delta_object(s, e2)?;
    let (_, a2) = delta_object(s, e)?;
    let (_, a2b) = delta_object(s, e2)?;
    let top = s.require_morphism(
        sc.dom(a1),
        sc.dom(a1b),
        SesMorphism {
            u: t.u,
            v: t.u,
            w: top_w,
        },
    )?;
    let bottom = s.require_morphism(
        sc.cod(a2),
        sc.cod(a2b),
        SesMorphism {
            u: bot_u,
            v: t.w,
            w: t.w,
        },
    )?;
    Ok(SesMorphism {
        u: top,
        v: m,
        w: bottom,
    })
}

/// δ_C into a materialized Ses(Ses(C)), evaluated lazily; `ss` must be Ses of `s`.
pub struct DeltaMap<'a> {
    pub s: &'a SesCategory,
    pub ss: &'a SesCategory,
    objs: Vec<OnceLock<Result<ObjId, ComonadError>>>,
    mors: Vec<OnceLock<Result<MorId, ComonadError>>>,
}

impl<'a> DeltaMap<'a> {
    pub fn new(s: &'a SesCategory, ss: &'a SesCategory) -> Self {
        Self {
            s,
            ss,
            objs: (0..s.cat().num_objects()).map(|_| OnceLock::new()).collect(),
            mors: (0..s.cat().num_morphisms()).map(|_| OnceLock::new()).collect(),
        }
    }
}

impl FunctorMap for DeltaMap<'_> {
    fn obj(&self, e: ObjId) -> Result<ObjId, ComonadError> {
        self.objs[e.index()]
            .get_or_init(|| {
                let (a1, a2) = delta_object(self.s, e)?;
                Ok(self.ss.require_object(a1, a2)?)
            })
            .clone()
    }

    fn mor(&self, m: MorId) -> Result<MorId, ComonadError> {
        self.mors[m.index()]
            .get_or_init(|| {
                let t = delta_morphism(self.s, m)?;
                let sc = self.s.cat();
                Ok(self
                    .ss
                    .require_morphism(self.obj(sc.dom(m))?, self.obj(sc.cod(m))?, t)?)
            })
            .clone()
    }
}

/// Evaluates a lazy map on every object and morphism of `source`.
pub fn tabulate(
    map: &dyn FunctorMap,
    source: Arc<FinCategory>,
    target: Arc<FinCategory>,
) -> Result<FinFunctor, ComonadError> {
    Ok(FinFunctor {
        obj_map: source.objects().map(|o| map.obj(o)).collect::<Result<_, _>>()?,
        mor_map: source.morphisms().map(|m| map.mor(m)).collect::<Result<_, _>>()?,
        source,
        target,
    })
}

/// δ_C as a functor Ses(C) → Ses(Ses(C)); `ss` must be Ses of `s`.
pub fn comultiplication(s: &SesCategory, ss: &SesCategory) -> Result<FinFunctor, ComonadError> {
    tabulate(&DeltaMap::new(s, ss), s.cat_arc(), ss.cat_arc())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TriangleReport {
    /// ε_{Ses C} ∘ δ_C = Id on the nose.
    pub counit_after_delta: bool,
    /// Ω(ε_C) ∘ δ_C = Id on the nose.
    pub omega_counit_after_delta: bool,
}

impl TriangleReport {
    pub fn holds(&self) -> bool {
        self.counit_after_delta && self.omega_counit_after_delta
    }
}

pub fn check_counit_triangles(s: &SesCategory, ss: &SesCategory) -> Result<TriangleReport, ComonadError> {
    let delta = comultiplication(s, ss)?;
    let eps_ses = counit(ss);
    let eps = counit(s);
    let omega_eps = omega_on_functor(&eps, ss, s, Mode::Strict)?;
    let id = FinFunctor::identity(&s.cat_arc());
    Ok(TriangleReport {
        counit_after_delta: delta.then(&eps_ses).same_tables(&id),
        omega_counit_after_delta: delta.then(&omega_eps).same_tables(&id),
    })
}

// ---------------------------------------------------------------------------
// The coassociator Ξ.

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct XiComponent {
    pub object: String,
    /// Components in Ses(Ses(C)) for the three rows.
    pub rows: [MorId; 3],
    /// Number of admissible invertible fillers (1 means the choice is forced).
    pub solutions: usize,
    /// 1-based (row, column, entry) positions holding a non-identity base morphism.
    pub non_identity_positions: Vec<[u8; 3]>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct CoassociatorReport {
    pub components: Vec<XiComponent>,
    pub endpoints_short_exact: bool,
    pub all_iso: bool,
    pub natural: bool,
    pub counit_coherent: bool,
    pub failures: Vec<String>,
}

impl CoassociatorReport {
    pub fn holds(&self) -> bool {
        self.failures.is_empty() && self.endpoints_short_exact && self.all_iso && self.natural && self.counit_coherent
    }
}

/// Base components of a morphism of Ses(Ses(Ses(C))) given by its three rows.
pub fn flatten3(s: &SesCategory, ss: &SesCategory, rows: SesMorphism) -> [[[MorId; 3]; 3]; 3] {
    [rows.u, rows.v, rows.w].map(|r| {
        let t = ss.morphism(r);
        [t.u, t.v, t.w].map(|x| {
            let b = s.morphism(x);
            [b.u, b.v, b.w]
        })
    })
}

/// A composable pair `(f, g)` read as an object one level up.
type MorPair = (MorId, MorId);

/// The source `Ω(δ)(δ e)` and target `δ_{Ses C}(δ e)` of `Ξ_e`.
fn xi_endpoints(ss: &SesCategory, delta: &dyn FunctorMap, e: ObjId) -> Result<(MorPair, MorPair), ComonadError> {
    let de = delta.obj(e)?;
    let (a1, a2) = {
        let o = ss.object(de);
        (o.f, o.g)
    };
    let src = (delta.mor(a1)?, delta.mor(a2)?);
    let tgt = delta_object(ss, de)?;
    Ok((src, tgt))
}

pub fn xi_component(
    s: &SesCategory,
    ss: &SesCategory,
    delta: &dyn FunctorMap,
    e: ObjId,
) -> Result<(SesMorphism, usize), ComonadError> {
    let (src, tgt) = xi_endpoints(ss, delta, e)?;
    let ssc = ss.cat();
    let sols = commuting_triples(ssc, src, tgt, |_, m| ssc.is_iso(m));
    let first = *sols
        .first()
        .ok_or_else(|| ComonadError::Construction(format!("no invertible Ξ at {}", s.cat().obj_name(e))))?;
    Ok((first, sols.len()))
}

pub fn coassociator(s: &SesCategory, ss: &SesCategory) -> Result<CoassociatorReport, ComonadError> {
    let delta = comultiplication(s, ss)?;
    let sc = s.cat();
    let ssc = ss.cat();
    let c = s.base_cat();
    let mut report = CoassociatorReport {
        endpoints_short_exact: true,
        all_iso: true,
        natural: true,
        counit_coherent: true,
        ..Default::default()
    };
    let mut xi = Vec::with_capacity(sc.num_objects());
    for e in sc.objects() {
        let (src, tgt) = xi_endpoints(ss, &delta, e)?;
        if !is_short_exact(ss.null_cat(), src.0, src.1) || !is_short_exact(ss.null_cat(), tgt.0, tgt.1) {
            report.endpoints_short_exact = false;
            report
                .failures
                .push(format!("Ξ endpoints at {} are not short exact", sc.obj_name(e)));
        }
        let (x, solutions) = match xi_component(s, ss, &delta, e) {
            Ok(v) => v,
            Err(err) => {
                report.all_iso = false;
                report.failures.push(err.to_string());
                continue;
            }
        };
        // Projecting by the counit at any of the three levels gives identities.
        let mid_row = ss.morphism(x.v);
        let mid_cols = [x.u, x.v, x.w].map(|r| ss.morphism(r).v);
        let cube = flatten3(s, ss, x);
        let coherent = ssc.is_identity(x.v)
            && is_identity3(sc, mid_row)
            && mid_cols.iter().all(|&m| sc.is_identity(m))
            && cube.iter().all(|row| row.iter().all(|col| c.is_identity(col[1])));
        if !coherent {
            report.counit_coherent = false;
            report
                .failures
                .push(format!("Ξ at {} is not counit-coherent", sc.obj_name(e)));
        }
        let mut non_identity_positions = Vec::new();
        for (i, row) in cube.iter().enumerate() {
            for (j, col) in row.iter().enumerate() {
                for (k, &m) in col.iter().enumerate() {
                    if !c.is_identity(m) {
                        non_identity_positions.push([i as u8 + 1, j as u8 + 1, k as u8 + 1]);
                    }
                }
            }
        }
        report.components.push(XiComponent {
            object: sc.obj_name(e).into(),
            rows: [x.u, x.v, x.w],
            solutions,
            non_identity_positions,
        });
        xi.push((e, x));
    }
    if xi.len() == sc.num_objects() {
        for m in sc.morphisms() {
            let (e, e2) = (sc.dom(m), sc.cod(m));
            let xe = xi[e.index()].1;
            let xe2 = xi[e2.index()].1;
            let dm = ss.morphism(delta.mor(m));
            let omega_delta = SesMorphism {
                u: delta.mor(dm.u),
                v: delta.mor(dm.v),
                w: delta.mor(dm.w),
            };
            let delta_delta = delta_morphism(ss, delta.mor(m))?;
            if then3(ssc, omega_delta, xe2) != then3(ssc, xe, delta_delta) {
                report.natural = false;
                report.failures.push(format!("Ξ is not natural at {}", sc.mor_name(m)));
            }
        }
    }
    Ok(report)
}

// ---------------------------------------------------------------------------
// Structure cells of δ and the compositor of Ω^ex.

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct CellReport {
    /// Per object: the chosen component and how many admissible ones exist.
    pub components: Vec<(String, usize)>,
    pub natural: bool,
    pub failures: Vec<String>,
}

impl CellReport {
    pub fn holds(&self) -> bool {
        self.failures.is_empty() && self.natural && self.components.iter().all(|(_, n)| *n >= 1)
    }
}

/// Component at `e` of the structure cell `Ω(Ω G) ∘ δ_C ⇒ δ_D ∘ Ω G`, as a
/// triple of morphisms of Ses(D). The middle row is forced to be the identity.
pub fn delta_cell_component(
    mode: Mode,
    g: &dyn FunctorMap,
    s_c: &SesCategory,
    ss_c: &SesCategory,
    delta_c: &dyn FunctorMap,
    s_d: &SesCategory,
    e: ObjId,
) -> Result<(SesMorphism, usize), ComonadError> {
    let omega_g = OmegaMap::new(mode, g, s_c, s_d);
    let de = delta_c.obj(e)?;
    let src = omega_object(mode, &omega_g, ss_c, s_d.null_cat(), de)?.replacement;
    let tgt = delta_object(s_d, omega_g.obj(e)?)?;
    let sdc = s_d.cat();
    let sols = commuting_triples(sdc, (src.f, src.g), (tgt.0, tgt.1), |pos, m| {
        sdc.is_iso(m) && (pos != 1 || sdc.is_identity(m))
    });
    let first = *sols
        .first()
        .ok_or_else(|| ComonadError::Construction(format!("no structure cell of δ at {}", s_c.cat().obj_name(e))))?;
    Ok((first, sols.len()))
}

/// Builds δ_G for a functor `G: C → D` and checks its pseudo-naturality square
/// `δ_G(e') ∘ ΩΩG(δ m) = δ_D(ΩG m) ∘ δ_G(e)` for every morphism `m: e → e'`.
pub fn delta_structure_cell(
    g: &FinFunctor,
    s_c: &SesCategory,
    ss_c: &SesCategory,
    s_d: &SesCategory,
) -> Result<CellReport, ComonadError> {
    let mode = Mode::Strict;
    let delta_c = comultiplication(s_c, ss_c)?;
    let omega_g = OmegaMap::new(mode, g, s_c, s_d);
    let sc = s_c.cat();
    let sdc = s_d.cat();
    let mut report = CellReport {
        natural: true,
        ..Default::default()
    };
    let mut cells = Vec::new();
    for e in sc.objects() {
        let (x, n) = delta_cell_component(mode, g, s_c, ss_c, &delta_c, s_d, e)?;
        report.components.push((sc.obj_name(e).into(), n));
        cells.push(x);
    }
    for m in sc.morphisms() {
        let dm = ss_c.morphism(delta_c.mor(m));
        let lhs_first = SesMorphism {
            u: omega_g.mor(dm.u)?,
            v: omega_g.mor(dm.v)?,
            w: omega_g.mor(dm.w)?,
        };
        let lhs = then3(sdc, lhs_first, cells[sc.cod(m).index()]);
        let rhs = then3(sdc, cells[sc.dom(m).index()], delta_morphism(s_d, omega_g.mor(m)?)?);
        if lhs != rhs {
            report.natural = false;
            report.failures.push(format!("δ_G square fails at {}", sc.mor_name(m)));
        }
    }
    Ok(report)
}

/// Component at `e` of the compositor `[H] ∘ [G] ⇒ [H ∘ G]`, as a triple of
/// morphisms of E. `s_d` must be Ses(D) so that `[G] e` can be fed to `[H]`.
#[allow(clippy::too_many_arguments)]
pub fn compositor_component(
    mode: Mode,
    g: &dyn FunctorMap,
    h: &dyn FunctorMap,
    s_c: &SesCategory,
    s_d: &SesCategory,
    e_cat: &NullCategory,
    e: ObjId,
) -> Result<(SesMorphism, usize), ComonadError> {
    let omega_g = OmegaMap::new(mode, g, s_c, s_d);
    let ge = omega_g.obj(e)?;
    let src = omega_object(mode, h, s_d, e_cat, ge)?.replacement;
    let hg = Then(g, h);
    let tgt = omega_object(mode, &hg, s_c, e_cat, e)?.replacement;
    let ec = e_cat.cat();
    let sols = commuting_triples(ec, (src.f, src.g), (tgt.f, tgt.g), |pos, m| {
        ec.is_iso(m) && (pos != 1 || ec.is_identity(m))
    });
    let first = *sols
        .first()
        .ok_or_else(|| ComonadError::Construction("no compositor component".into()))?;
    Ok((first, sols.len()))
}

/// Builds the compositor for `G: C → D`, `H: D → E` and checks naturality.
pub fn compositor(
    g: &FinFunctor,
    h: &FinFunctor,
    s_c: &SesCategory,
    s_d: &SesCategory,
    s_e: &SesCategory,
    mode: Mode,
) -> Result<CellReport, ComonadError> {
    let e_cat = s_e.base();
    let ec = e_cat.cat();
    let sc = s_c.cat();
    let omega_g = OmegaMap::new(mode, g, s_c, s_d);
    let hg = g.then(h);
    let mut report = CellReport {
        natural: true,
        ..Default::default()
    };
    let mut cells = Vec::new();
    for e in sc.objects() {
        let (x, n) = compositor_component(mode, g, h, s_c, s_d, e_cat, e)?;
        report.components.push((sc.obj_name(e).into(), n));
        cells.push(x);
    }
    for m in sc.morphisms() {
        let hgm = omega_g.mor(m).and_then(|gm| omega_morphism(mode, h, s_d, e_cat, gm));
        let first = match hgm {
            Ok(t) => t,
            Err(err) => {
                report.failures.push(err.to_string());
                continue;
            }
        };
        let direct = omega_morphism(mode, &hg, s_c, e_cat, m)?;
        let lhs = then3(ec, first, cells[sc.cod(m).index()]);
        let rhs = then3(ec, cells[sc.dom(m).index()], direct);
        if lhs != rhs {
            report.natural = false;
            report
                .failures
                .push(format!("compositor square fails at {}", sc.mor_name(m)));
        }
    }
    Ok(report)
}

// ---------------------------------------------------------------------------
// The adjoint string π3 ⊣ L ⊣ ε ⊣ R ⊣ π1.

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct AdjunctionOutcome {
    pub name: String,
    pub bijective: bool,
    pub natural: bool,
    pub pairs_checked: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct AdjointReport {
    pub functors_valid: bool,
    pub adjunctions: Vec<AdjunctionOutcome>,
}

impl AdjointReport {
    pub fn holds(&self) -> bool {
        self.functors_valid && self.adjunctions.iter().all(|a| a.bijective && a.natural)
    }
}

/// `L X = (ker id_X, id_X)` and `R X = (id_X, coker id_X)`.
pub fn side_adjoints(s: &SesCategory) -> Result<(FinFunctor, FinFunctor), ComonadError> {
    let c = s.base_cat();
    let base = s.base();
    let mut l_obj = Vec::new();
    let mut r_obj = Vec::new();
    for x in c.objects() {
        let id = c.identity(x);
        let k = need(canonical_kernel(base, id), "kernel of an identity")?;
        let q = need(canonical_cokernel(base, id), "cokernel of an identity")?;
        l_obj.push(s.require_object(k, id)?);
        r_obj.push(s.require_object(id, q)?);
    }
    let mut l_mor = Vec::new();
    let mut r_mor = Vec::new();
    for h in c.morphisms() {
        let (a, b) = (c.dom(h), c.cod(h));
        let (la, lb) = (s.object(l_obj[a.index()]), s.object(l_obj[b.index()]));
        let u = need(c.unique_lift(lb.f, c.compose(h, la.f)), "kernel filler")?;
        l_mor.push(s.require_morphism(l_obj[a.index()], l_obj[b.index()], SesMorphism { u, v: h, w: h })?);
        let (ra, rb) = (s.object(r_obj[a.index()]), s.object(r_obj[b.index()]));
        let w = need(c.unique_colift(ra.g, c.compose(rb.g, h)), "cokernel filler")?;
        r_mor.push(s.require_morphism(r_obj[a.index()], r_obj[b.index()], SesMorphism { u: h, v: h, w })?);
    }
    let mk = |obj_map, mor_map| FinFunctor {
        source: s.base().cat_arc().clone(),
        target: s.cat_arc(),
        obj_map,
        mor_map,
    };
    Ok((mk(l_obj, l_mor), mk(r_obj, r_mor)))
}

/// Checks that `φ ↦ proj(φ)` is a bijection `hom_S(S, T(X)) → hom_C(P(S), X)`
/// (or its mirror) natural in both variables.
#[allow(clippy::too_many_arguments)]
fn check_adjunction(
    name: &str,
    s: &SesCategory,
    // Functor C → Ses(C) on the Ses side of the hom-set.
    t: &FinFunctor,
    // Functor Ses(C) → C on the base side.
    p: &FinFunctor,
    // Which component of a Ses-morphism is the transposed map.
    proj: fn(SesMorphism) -> MorId,
    // true: hom_S(S, t X) ≅ hom_C(p S, X); false: hom_S(t X, S) ≅ hom_C(X, p S).
    right: bool,
) -> AdjunctionOutcome {
    let c = s.base_cat();
    let sc = s.cat();
    let mut out = AdjunctionOutcome {
        name: name.into(),
        bijective: true,
        natural: true,
        pairs_checked: 0,
    };
    for e in sc.objects() {
        for x in c.objects() {
            out.pairs_checked += 1;
            let (ses_hom, base_hom) = if right {
                (sc.hom(e, t.obj(x)), c.hom(p.obj(e), x))
            } else {
                (sc.hom(t.obj(x), e), c.hom(x, p.obj(e)))
            };
            let images: std::collections::BTreeSet<MorId> = ses_hom.iter().map(|&phi| proj(s.morphism(phi))).collect();
            if images.len() != ses_hom.len() || images.len() != base_hom.len() {
                out.bijective = false;
            }
            for &phi in ses_hom {
                let tp = proj(s.morphism(phi));
                // Naturality in the Ses variable.
                let ses_side: &[MorId] = if right { sc.incoming(e) } else { sc.outgoing(e) };
                for &a in ses_side {
                    let (lhs, rhs) = if right {
                        (proj(s.morphism(sc.compose(phi, a))), c.compose(tp, p.mor(a)))
                    } else {
                        (proj(s.morphism(sc.compose(a, phi))), c.compose(p.mor(a), tp))
                    };
                    if lhs != rhs {
                        out.natural = false;
                    }
                }
                // Naturality in the base variable.
                let base_side: &[MorId] = if right { c.outgoing(x) } else { c.incoming(x) };
                for &b in base_side {
                    let (lhs, rhs) = if right {
                        (proj(s.morphism(sc.compose(t.mor(b), phi))), c.compose(b, tp))
                    } else {
                        (proj(s.morphism(sc.compose(phi, t.mor(b)))), c.compose(tp, b))
                    };
                    if lhs != rhs {
                        out.natural = false;
                    }
                }
            }
        }
    }
    out
}

pub fn check_adjoint_quintuple(s: &SesCategory) -> Result<AdjointReport, ComonadError> {
    let (l, r) = side_adjoints(s)?;
    let (p1, p3) = outer_projections(s);
    let eps = counit(s);
    let functors_valid = [&l, &r, &p1, &p3, &eps]
        .iter()
        .all(|f| crate::cat::validate_functor(f).is_empty());
    let adjunctions = vec![
        // π3 ⊣ L: hom_S(S, L X) ≅ hom_C(π3 S, X)
        check_adjunction("pi3 -| L", s, &l, &p3, |m| m.w, true),
        // L ⊣ ε: hom_S(L X, S) ≅ hom_C(X, ε S)
        check_adjunction("L -| eps", s, &l, &eps, |m| m.v, false),
        // ε ⊣ R: hom_S(S, R X) ≅ hom_C(ε S, X)
        check_adjunction("eps -| R", s, &r, &eps, |m| m.v, true),
        // R ⊣ π1: hom_S(R X, S) ≅ hom_C(X, π1 S)
        check_adjunction("R -| pi1", s, &r, &p1, |m| m.u, false),
    ];
    Ok(AdjointReport {
        functors_valid,
        adjunctions,
    })
}

/// All three levels of the tower needed by the comonad checks.
pub struct Tower {
    pub s: Arc<SesCategory>,
    pub ss: Arc<SesCategory>,
}

impl Tower {
    pub fn new(base: &Arc<NullCategory>) -> Result<Self, ComonadError> {
        let s = crate::ses::ses_cached(base)?;
        let ss = crate::ses::ses_cached(s.null_cat())?;
        Ok(Self { s, ss })
    }
}
