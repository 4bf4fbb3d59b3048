//! The category Ses(C) of short exact sequences with its ideal [N], the
//! structural kernel/cokernel constructions and the canonical pretorsion
//! theory on it.

use std::collections::HashMap;
use std::hash::{Hash, Hasher};
use std::sync::{Arc, OnceLock, RwLock};

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::cat::{CategoryBuilder, CategoryError, FinCategory, MorId, ObjId};
use crate::exactness::{
    canonical_cokernel, canonical_kernel, is_cokernel_of, is_kernel_of, is_semiexact, short_exact_sequences,
    SemiexactReport, ShortExactSeq,
};
use crate::ideal::{Ideal, NullCategory};

pub type SesObject = ShortExactSeq;

/// Above this many composable pairs, composites are computed on demand.
const TABLE_LIMIT: usize = 4_000_000;

/// A commuting triple between short exact sequences.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct SesMorphism {
    pub u: MorId,
    pub v: MorId,
    pub w: MorId,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SesError {
    #[error("base category is not semiexact ({} kernels, {} cokernels missing)", .0.missing_kernels.len(), .0.missing_cokernels.len())]
    NotSemiexact(SemiexactReport),
    #[error("no kernel for `{0}` in the base category")]
    NoKernel(String),
    #[error("no cokernel for `{0}` in the base category")]
    NoCokernel(String),
    #[error("induced pair ({f}, {g}) is not short exact")]
    NotAnObject { f: String, g: String },
    #[error("induced triple is not a morphism of Ses")]
    NotAMorphism,
    #[error(transparent)]
    Category(#[from] CategoryError),
}

/// Ses(C) as a finite category with ideal, plus provenance back to C.
#[derive(Debug)]
pub struct SesCategory {
    base: Arc<NullCategory>,
    ses: Arc<NullCategory>,
    objects: Vec<SesObject>,
    morphisms: Vec<SesMorphism>,
    obj_lookup: HashMap<SesObject, ObjId>,
    mor_lookup: Arc<HashMap<(ObjId, ObjId, SesMorphism), MorId>>,
}

/// Builds Ses(C), refusing non-semiexact bases.
pub fn build_ses(base: Arc<NullCategory>) -> Result<SesCategory, SesError> {
    let report = is_semiexact(&base);
    if !report.semiexact {
        return Err(SesError::NotSemiexact(report));
    }
    build_ses_unchecked(base)
}

/// Builds Ses(C) from whatever short exact sequences exist, without
/// requiring every kernel and cokernel of C.
pub fn build_ses_unchecked(base: Arc<NullCategory>) -> Result<SesCategory, SesError> {
    let c = base.cat();
    let objects = short_exact_sequences(&base);
    let obj_lookup: HashMap<SesObject, ObjId> =
        objects.iter().enumerate().map(|(i, &s)| (s, ObjId(i as u32))).collect();

    let pairs: Vec<(usize, usize)> = (0..objects.len())
        .flat_map(|s| (0..objects.len()).map(move |t| (s, t)))
        .collect();
    let mut found: Vec<(SesMorphism, ObjId, ObjId)> = pairs
        .par_iter()
        .flat_map_iter(|&(s, t)| {
            let (a, b) = (objects[s], objects[t]);
            let (x, y, z) = (c.dom(a.f), c.cod(a.f), c.cod(a.g));
            let (x2, y2, z2) = (c.dom(b.f), c.cod(b.f), c.cod(b.g));
            let mut out = Vec::new();
            for &v in c.hom(y, y2) {
                let vf = c.compose(v, a.f);
                let gv = c.compose(b.g, v);
                for &u in c.hom(x, x2) {
                    if c.compose(b.f, u) != vf {
                        continue;
                    }
                    for &w in c.hom(z, z2) {
                        if c.compose(w, a.g) == gv {
                            out.push((SesMorphism { u, v, w }, ObjId(s as u32), ObjId(t as u32)));
                        }
                    }
                }
            }
            out
        })
        .collect();
    found.sort();

    let mut triple_count: HashMap<SesMorphism, u32> = HashMap::new();
    for (m, _, _) in &found {
        *triple_count.entry(*m).or_default() += 1;
    }
    let obj_name = |s: &SesObject| format!("({},{})", c.mor_name(s.f), c.mor_name(s.g));

    let mut b = CategoryBuilder::new(format!("Ses({})", c.name()));
    for s in &objects {
        b.add_object(obj_name(s))?;
    }
    let mut morphisms = Vec::with_capacity(found.len());
    let mut mor_lookup = HashMap::with_capacity(found.len());
    for &(m, s, t) in &found {
        let mut name = format!("({},{},{})", c.mor_name(m.u), c.mor_name(m.v), c.mor_name(m.w));
        if triple_count[&m] > 1 {
            name = format!(
                "{name}:{}>{}",
                obj_name(&objects[s.index()]),
                obj_name(&objects[t.index()])
            );
        }
        let id = b.add_morphism(name, s, t)?;
        mor_lookup.insert((s, t, m), id);
        morphisms.push(m);
    }
    for (i, s) in objects.iter().enumerate() {
        let o = ObjId(i as u32);
        let idt = SesMorphism {
            u: c.identity(c.dom(s.f)),
            v: c.identity(c.cod(s.f)),
            w: c.identity(c.cod(s.g)),
        };
        b.set_identity(o, mor_lookup[&(o, o, idt)])?;
    }
    // Composites, grouped by the middle object.
    let mut incoming: Vec<Vec<usize>> = vec![Vec::new(); objects.len()];
    let mut outgoing: Vec<Vec<usize>> = vec![Vec::new(); objects.len()];
    for (i, &(_, s, t)) in found.iter().enumerate() {
        outgoing[s.index()].push(i);
        incoming[t.index()].push(i);
    }
    let pairs: usize = (0..objects.len()).map(|o| incoming[o].len() * outgoing[o].len()).sum();
    let mor_lookup = Arc::new(mor_lookup);
    let cat = if pairs > TABLE_LIMIT {
        let base_cat = base.cat_arc().clone();
        let found = Arc::new(found);
        let lookup = mor_lookup.clone();
        b.build_with_rule(Arc::new(move |g: MorId, f: MorId| {
            let (fm, fs, ft) = found[f.index()];
            let (gm, gs, gt) = found[g.index()];
            if ft != gs {
                return None;
            }
            let gf = SesMorphism {
                u: base_cat.try_compose(gm.u, fm.u)?,
                v: base_cat.try_compose(gm.v, fm.v)?,
                w: base_cat.try_compose(gm.w, fm.w)?,
            };
            lookup.get(&(fs, gt, gf)).copied()
        }))?
    } else {
        let composites: Vec<(usize, usize, MorId)> = (0..objects.len())
            .into_par_iter()
            .flat_map_iter(|mid| {
                let mut out = Vec::new();
                for &fi in &incoming[mid] {
                    let (f, fs, _) = found[fi];
                    for &gi in &outgoing[mid] {
                        let (g, _, gt) = found[gi];
                        let gf = SesMorphism {
                            u: c.compose(g.u, f.u),
                            v: c.compose(g.v, f.v),
                            w: c.compose(g.w, f.w),
                        };
                        out.push((gi, fi, mor_lookup[&(fs, gt, gf)]));
                    }
                }
                out
            })
            .collect();
        for (gi, fi, gf) in composites {
            b.set_composite(MorId(gi as u32), MorId(fi as u32), gf)?;
        }
        b.build()?
    };
    let cat = Arc::new(cat);

    // A morphism factors through an iso-iso sequence exactly when its middle
    // component is null: every null object W carries the sequence (id_W, id_W).
    let ideal = Ideal::from_members(
        &cat,
        morphisms
            .iter()
            .enumerate()
            .filter_map(|(i, m)| base.is_null(m.v).then_some(MorId(i as u32))),
    )
    .expect("morphisms exist");
    let ses = Arc::new(NullCategory::new(cat, ideal));
    Ok(SesCategory {
        base,
        ses,
        objects,
        morphisms,
        obj_lookup,
        mor_lookup,
    })
}

type CacheKey = (u64, u64);

fn cache() -> &'static RwLock<HashMap<CacheKey, Arc<SesCategory>>> {
    static CACHE: OnceLock<RwLock<HashMap<CacheKey, Arc<SesCategory>>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

fn cache_key(nc: &NullCategory) -> CacheKey {
    let mut h = std::collections::hash_map::DefaultHasher::new();
    nc.ideal().members().for_each(|m| m.hash(&mut h));
    (nc.cat().fingerprint(), h.finish())
}

/// [`build_ses_unchecked`] behind a process-wide cache keyed by the table
/// fingerprint and the ideal.
pub fn ses_cached(base: &Arc<NullCategory>) -> Result<Arc<SesCategory>, SesError> {
    let key = cache_key(base);
    if let Some(s) = cache().read().expect("ses cache").get(&key) {
        return Ok(s.clone());
    }
    let built = Arc::new(build_ses_unchecked(base.clone())?);
    Ok(cache().write().expect("ses cache").entry(key).or_insert(built).clone())
}

impl SesCategory {
    pub fn base(&self) -> &Arc<NullCategory> {
        &self.base
    }

    pub fn base_cat(&self) -> &FinCategory {
        self.base.cat()
    }

    /// Ses(C) together with [N].
    pub fn null_cat(&self) -> &Arc<NullCategory> {
        &self.ses
    }

    pub fn cat(&self) -> &FinCategory {
        self.ses.cat()
    }

    pub fn cat_arc(&self) -> Arc<FinCategory> {
        self.ses.cat_arc().clone()
    }

    pub fn num_objects(&self) -> usize {
        self.objects.len()
    }

    pub fn object(&self, o: ObjId) -> SesObject {
        self.objects[o.index()]
    }

    pub fn morphism(&self, m: MorId) -> SesMorphism {
        self.morphisms[m.index()]
    }

    pub fn find_object(&self, s: SesObject) -> Option<ObjId> {
        self.obj_lookup.get(&s).copied()
    }

    pub fn find_morphism(&self, src: ObjId, tgt: ObjId, m: SesMorphism) -> Option<MorId> {
        self.mor_lookup.get(&(src, tgt, m)).copied()
    }

    /// `(X, Y, Z)` of an object.
    pub fn triple_of(&self, o: ObjId) -> (ObjId, ObjId, ObjId) {
        let s = self.objects[o.index()];
        let c = self.base.cat();
        (c.dom(s.f), c.cod(s.f), c.cod(s.g))
    }

    pub fn middle(&self, o: ObjId) -> ObjId {
        self.base.cat().cod(self.objects[o.index()].f)
    }

    /// Objects with both legs invertible.
    pub fn iso_iso_objects(&self) -> Vec<ObjId> {
        let c = self.base.cat();
        self.cat()
            .objects()
            .filter(|&o| {
                let s = self.object(o);
                c.is_iso(s.f) && c.is_iso(s.g)
            })
            .collect()
    }

    /// Objects whose three base objects are null.
    pub fn null_triple_objects(&self) -> Vec<ObjId> {
        self.cat()
            .objects()
            .filter(|&o| {
                let (x, y, z) = self.triple_of(o);
                [x, y, z].iter().all(|&a| self.base.is_null_object(a))
            })
            .collect()
    }

    /// Looks up the object `(f, g)`, failing if it is not short exact.
    pub fn require_object(&self, f: MorId, g: MorId) -> Result<ObjId, SesError> {
        self.find_object(ShortExactSeq { f, g })
            .ok_or_else(|| SesError::NotAnObject {
                f: self.base.cat().mor_name(f).into(),
                g: self.base.cat().mor_name(g).into(),
            })
    }

    pub fn require_morphism(&self, src: ObjId, tgt: ObjId, m: SesMorphism) -> Result<MorId, SesError> {
        self.find_morphism(src, tgt, m).ok_or(SesError::NotAMorphism)
    }

    fn base_kernel(&self, f: MorId) -> Result<MorId, SesError> {
        canonical_kernel(&self.base, f).ok_or_else(|| SesError::NoKernel(self.base.cat().mor_name(f).into()))
    }

    fn base_cokernel(&self, f: MorId) -> Result<MorId, SesError> {
        canonical_cokernel(&self.base, f).ok_or_else(|| SesError::NoCokernel(self.base.cat().mor_name(f).into()))
    }

    /// The kernel of `m = (u', v', w')` assembled from `ker u'` and `ker v'`.
    pub fn kernel_fast(&self, m: MorId) -> Result<MorId, SesError> {
        let c = self.base.cat();
        let SesMorphism { u, v, .. } = self.morphism(m);
        let src = self.cat().dom(m);
        let e = self.object(src);
        let ku = self.base_kernel(u)?;
        let kv = self.base_kernel(v)?;
        let f_bar = c.unique_lift(kv, c.compose(e.f, ku)).ok_or(SesError::NotAMorphism)?;
        let g_bar = self.base_cokernel(f_bar)?;
        let w_bar = c
            .unique_colift(g_bar, c.compose(e.g, kv))
            .ok_or(SesError::NotAMorphism)?;
        let k_obj = self.require_object(f_bar, g_bar)?;
        self.require_morphism(k_obj, src, SesMorphism { u: ku, v: kv, w: w_bar })
    }

    /// The cokernel of `m = (u, v, w)` assembled from `coker v` and `coker w`.
    pub fn cokernel_fast(&self, m: MorId) -> Result<MorId, SesError> {
        let c = self.base.cat();
        let SesMorphism { v, w, .. } = self.morphism(m);
        let tgt = self.cat().cod(m);
        let e = self.object(tgt);
        let qv = self.base_cokernel(v)?;
        let qw = self.base_cokernel(w)?;
        let g_bar = c.unique_colift(qv, c.compose(qw, e.g)).ok_or(SesError::NotAMorphism)?;
        let f_bar = self.base_kernel(g_bar)?;
        let u_bar = c.unique_lift(f_bar, c.compose(qv, e.f)).ok_or(SesError::NotAMorphism)?;
        let q_obj = self.require_object(f_bar, g_bar)?;
        self.require_morphism(tgt, q_obj, SesMorphism { u: u_bar, v: qv, w: qw })
    }

    /// `T` = left leg invertible, `F` = right leg invertible.
    pub fn canonical_pretorsion(&self) -> (Vec<ObjId>, Vec<ObjId>) {
        let c = self.base.cat();
        let t = self.cat().objects().filter(|&o| c.is_iso(self.object(o).f)).collect();
        let f = self.cat().objects().filter(|&o| c.is_iso(self.object(o).g)).collect();
        (t, f)
    }
}

/// Outcome of comparing a structural kernel or cokernel with the generic search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FastPathOutcome {
    pub morphism: MorId,
    pub fast: MorId,
    pub generic: Option<MorId>,
    /// The fast result satisfies the universal property inside Ses(C).
    pub universal: bool,
    /// The fast result equals the canonical generic choice.
    pub identical: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct FastPathReport {
    pub kernels: Vec<FastPathOutcome>,
    pub cokernels: Vec<FastPathOutcome>,
    pub failures: Vec<String>,
}

impl FastPathReport {
    pub fn agrees(&self) -> bool {
        self.failures.is_empty()
            && self
                .kernels
                .iter()
                .chain(&self.cokernels)
                .all(|o| o.universal && o.generic.is_some())
    }
}

pub fn compare_fast_paths(s: &SesCategory) -> FastPathReport {
    let ns = s.null_cat();
    let sc = s.cat();
    let ms: Vec<MorId> = sc.morphisms().collect();
    let results: Vec<Result<(FastPathOutcome, FastPathOutcome), String>> = ms
        .par_iter()
        .map(|&m| {
            let fk = s
                .kernel_fast(m)
                .map_err(|e| format!("kernel of {}: {e}", sc.mor_name(m)))?;
            let fq = s
                .cokernel_fast(m)
                .map_err(|e| format!("cokernel of {}: {e}", sc.mor_name(m)))?;
            let gk = canonical_kernel(ns, m);
            let gq = canonical_cokernel(ns, m);
            Ok((
                FastPathOutcome {
                    morphism: m,
                    fast: fk,
                    generic: gk,
                    universal: is_kernel_of(ns, fk, m),
                    identical: gk == Some(fk),
                },
                FastPathOutcome {
                    morphism: m,
                    fast: fq,
                    generic: gq,
                    universal: is_cokernel_of(ns, fq, m),
                    identical: gq == Some(fq),
                },
            ))
        })
        .collect();
    let mut report = FastPathReport::default();
    for r in results {
        match r {
            Ok((k, q)) => {
                report.kernels.push(k);
                report.cokernels.push(q);
            }
            Err(e) => report.failures.push(e),
        }
    }
    report
}

/// Componentwise characterization of kernels and cokernels in Ses(C),
/// checked over every composable pair.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct CharacterizationReport {
    pub pairs_checked: usize,
    pub kernel_instances: usize,
    pub cokernel_instances: usize,
    pub kernel_mismatches: Vec<(MorId, MorId)>,
    pub cokernel_mismatches: Vec<(MorId, MorId)>,
}

impl CharacterizationReport {
    pub fn holds(&self) -> bool {
        self.kernel_mismatches.is_empty() && self.cokernel_mismatches.is_empty()
    }
}

pub fn check_characterization(s: &SesCategory) -> CharacterizationReport {
    let ns = s.null_cat();
    let sc = s.cat();
    let base = s.base();
    let rows: Vec<CharacterizationReport> = sc
        .objects()
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|mid| {
            let mut r = CharacterizationReport::default();
            for &a in sc.incoming(mid) {
                let ta = s.morphism(a);
                for &b in sc.outgoing(mid) {
                    let tb = s.morphism(b);
                    r.pairs_checked += 1;
                    let ker_ses = is_kernel_of(ns, a, b);
                    let ker_parts = is_kernel_of(base, ta.u, tb.u) && is_kernel_of(base, ta.v, tb.v);
                    r.kernel_instances += ker_ses as usize;
                    if ker_ses != ker_parts {
                        r.kernel_mismatches.push((a, b));
                    }
                    let coker_ses = is_cokernel_of(ns, b, a);
                    let coker_parts = is_cokernel_of(base, tb.v, ta.v) && is_cokernel_of(base, tb.w, ta.w);
                    r.cokernel_instances += coker_ses as usize;
                    if coker_ses != coker_parts {
                        r.cokernel_mismatches.push((b, a));
                    }
                }
            }
            r
        })
        .collect();
    let mut total = CharacterizationReport::default();
    for r in rows {
        total.pairs_checked += r.pairs_checked;
        total.kernel_instances += r.kernel_instances;
        total.cokernel_instances += r.cokernel_instances;
        total.kernel_mismatches.extend(r.kernel_mismatches);
        total.cokernel_mismatches.extend(r.cokernel_mismatches);
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cat::build_pointed_sets;
    use crate::ideal::is_closed;

    fn ses_of_ps(k: usize) -> SesCategory {
        let c = Arc::new(build_pointed_sets(k).unwrap());
        let nc = Arc::new(NullCategory::through_objects(c, &[ObjId(0)]).unwrap());
        build_ses(nc).unwrap()
    }

    fn obj(s: &SesCategory, name: &str) -> ObjId {
        s.cat().find_obj(name).unwrap()
    }

    #[test]
    fn ses_of_ps2_shape() {
        let s = ses_of_ps(2);
        let names: Vec<&str> = s.cat().objects().map(|o| s.cat().obj_name(o)).collect();
        assert_eq!(names, ["(id1,id1)", "(i,id2)", "(id2,r)"]);
        assert_eq!(s.cat().num_morphisms(), 12);
        assert!(crate::cat::validate_category(s.cat()).is_empty());
        assert!(is_closed(s.cat(), s.null_cat().ideal()).closed);

        let (ez, ef, et) = (obj(&s, "(id1,id1)"), obj(&s, "(i,id2)"), obj(&s, "(id2,r)"));
        let hom = s.cat().hom(et, ef);
        assert_eq!(hom.len(), 1);
        assert_eq!(s.cat().mor_name(hom[0]), "(r,c,i)");
        assert!(s.null_cat().is_null(hom[0]));
        assert_eq!(s.iso_iso_objects(), vec![ez]);
        assert_eq!(s.null_triple_objects(), vec![ez]);
        assert_eq!(s.canonical_pretorsion(), (vec![ez, et], vec![ez, ef]));
    }

    #[test]
    fn ses_of_z1() {
        let s = ses_of_ps(1);
        assert_eq!((s.cat().num_objects(), s.cat().num_morphisms()), (1, 1));
        assert_eq!(s.canonical_pretorsion(), (vec![ObjId(0)], vec![ObjId(0)]));
    }

    #[test]
    fn ses_of_ps2_is_semiexact() {
        let s = ses_of_ps(2);
        assert!(is_semiexact(s.null_cat()).semiexact);
    }

    #[test]
    fn identity_on_null_object_has_identity_kernel() {
        let s = ses_of_ps(2);
        let ez = obj(&s, "(id1,id1)");
        let id = s.cat().identity(ez);
        assert_eq!(s.kernel_fast(id).unwrap(), id);
        assert_eq!(s.cokernel_fast(id).unwrap(), id);
    }

    #[test]
    fn fast_paths_on_ps2() {
        let s = ses_of_ps(2);
        let report = compare_fast_paths(&s);
        assert!(report.agrees(), "{report:?}");
        assert_eq!(report.kernels.len(), 12);
    }

    #[test]
    fn characterization_on_ps2() {
        let r = check_characterization(&ses_of_ps(2));
        assert!(r.holds(), "{r:?}");
        assert!(r.kernel_instances > 0 && r.cokernel_instances > 0);
    }

    #[test]
    fn middle_null_ideal_matches_generated_ideal() {
        for k in [2, 3] {
            let c = Arc::new(build_pointed_sets(k).unwrap());
            let nc = Arc::new(NullCategory::through_objects(c, &[ObjId(0)]).unwrap());
            let s = build_ses(nc).unwrap();
            let oracle = crate::ideal::ideal_from_objects(s.cat(), &s.iso_iso_objects()).unwrap();
            assert_eq!(s.null_cat().ideal(), &oracle);
            if k == 2 {
                let ss = build_ses(s.null_cat().clone()).unwrap();
                let oracle = crate::ideal::ideal_from_objects(ss.cat(), &ss.iso_iso_objects()).unwrap();
                assert_eq!(ss.null_cat().ideal(), &oracle);
            }
        }
    }
}
