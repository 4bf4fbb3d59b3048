//! Finite categories, functors and natural transformations stored as explicit
//! tables, together with exhaustive law validation and the built-in fixtures.
//!
//! Identifiers are dense indices into the owning category. Their order is the
//! declaration order, and every "canonical" choice elsewhere in the crate is
//! the minimum with respect to that order.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

/// Index of an object inside its [`FinCategory`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct ObjId(pub u32);

/// Index of a morphism inside its [`FinCategory`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct MorId(pub u32);

impl ObjId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl MorId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for ObjId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "o{}", self.0)
    }
}

impl fmt::Display for MorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "m{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CategoryError {
    #[error("duplicate object `{0}`")]
    DuplicateObject(String),
    #[error("duplicate morphism `{0}`")]
    DuplicateMorphism(String),
    #[error("unknown object `{0}`")]
    UnknownObject(String),
    #[error("unknown morphism `{0}`")]
    UnknownMorphism(String),
    #[error("identity of `{0}` declared twice")]
    DuplicateIdentity(String),
    #[error("object `{0}` has no identity")]
    MissingIdentity(String),
    #[error("`{g} . {f}` is not a composable pair")]
    NotComposable { g: String, f: String },
    #[error("composite `{g} . {f}` declared twice")]
    DuplicateComposite { g: String, f: String },
    #[error("composite `{g} . {f}` is missing")]
    MissingComposite { g: String, f: String },
    #[error("no category declared")]
    Empty,
    #[error("{0} must be at least 1")]
    ZeroSize(&'static str),
    #[error("pointed-set fixture size {0} is outside 1..=4")]
    SizeOutOfRange(usize),
}

#[derive(Debug, Clone)]
struct MorphismData {
    name: String,
    dom: ObjId,
    cod: ObjId,
}

/// Where composites come from: a table, or a rule for categories too large to
/// tabulate (composition is then computed on demand).
#[derive(Clone)]
enum Composition {
    // One table per middle object b: entry [out_pos(g) * |in(b)| + in_pos(f)].
    Table(Vec<Vec<Option<MorId>>>),
    Rule(CompositionRule),
}

pub type CompositionRule = Arc<dyn Fn(MorId, MorId) -> Option<MorId> + Send + Sync>;

impl std::fmt::Debug for Composition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Composition::Table(t) => write!(f, "Table({} blocks)", t.len()),
            Composition::Rule(_) => write!(f, "Rule"),
        }
    }
}

/// A finite category with a composition table.
///
/// The table may be partial or wrong (that is what [`validate_category`] is
/// for), but composites are only ever recorded for composable pairs.
#[derive(Debug, Clone)]
pub struct FinCategory {
    name: String,
    objects: Vec<String>,
    morphisms: Vec<MorphismData>,
    identity: Vec<MorId>,
    incoming: Vec<Vec<MorId>>,
    outgoing: Vec<Vec<MorId>>,
    in_pos: Vec<u32>,
    out_pos: Vec<u32>,
    comp: Composition,
    homs: HashMap<(ObjId, ObjId), Vec<MorId>>,
    obj_index: HashMap<String, ObjId>,
    mor_index: HashMap<String, MorId>,
}

impl FinCategory {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn num_objects(&self) -> usize {
        self.objects.len()
    }

    pub fn num_morphisms(&self) -> usize {
        self.morphisms.len()
    }

    pub fn objects(&self) -> impl ExactSizeIterator<Item = ObjId> + Clone {
        (0..self.objects.len() as u32).map(ObjId)
    }

    pub fn morphisms(&self) -> impl ExactSizeIterator<Item = MorId> + Clone {
        (0..self.morphisms.len() as u32).map(MorId)
    }

    pub fn obj_name(&self, o: ObjId) -> &str {
        &self.objects[o.index()]
    }

    pub fn mor_name(&self, m: MorId) -> &str {
        &self.morphisms[m.index()].name
    }

    pub fn find_obj(&self, name: &str) -> Option<ObjId> {
        self.obj_index.get(name).copied()
    }

    pub fn find_mor(&self, name: &str) -> Option<MorId> {
        self.mor_index.get(name).copied()
    }

    #[inline]
    pub fn dom(&self, m: MorId) -> ObjId {
        self.morphisms[m.index()].dom
    }

    #[inline]
    pub fn cod(&self, m: MorId) -> ObjId {
        self.morphisms[m.index()].cod
    }

    #[inline]
    pub fn identity(&self, o: ObjId) -> MorId {
        self.identity[o.index()]
    }

    pub fn is_identity(&self, m: MorId) -> bool {
        self.dom(m) == self.cod(m) && self.identity(self.dom(m)) == m
    }

    /// Morphisms with codomain `o`, in index order.
    #[inline]
    pub fn incoming(&self, o: ObjId) -> &[MorId] {
        &self.incoming[o.index()]
    }

    /// Morphisms with domain `o`, in index order.
    #[inline]
    pub fn outgoing(&self, o: ObjId) -> &[MorId] {
        &self.outgoing[o.index()]
    }

    /// Position of `m` in `incoming(cod m)`.
    #[inline]
    pub fn in_position(&self, m: MorId) -> usize {
        self.in_pos[m.index()] as usize
    }

    /// Position of `m` in `outgoing(dom m)`.
    #[inline]
    pub fn out_position(&self, m: MorId) -> usize {
        self.out_pos[m.index()] as usize
    }

    pub fn hom(&self, a: ObjId, b: ObjId) -> &[MorId] {
        self.homs.get(&(a, b)).map(Vec::as_slice).unwrap_or(&[])
    }

    /// `g ∘ f`, or `None` when the pair is not composable or the table lacks it.
    #[inline]
    pub fn try_compose(&self, g: MorId, f: MorId) -> Option<MorId> {
        let b = self.cod(f);
        if self.dom(g) != b {
            return None;
        }
        match &self.comp {
            Composition::Table(t) => {
                let width = self.incoming[b.index()].len();
                t[b.index()][self.out_pos[g.index()] as usize * width + self.in_pos[f.index()] as usize]
            }
            Composition::Rule(rule) => rule(g, f),
        }
    }

    /// `g ∘ f`. Panics on a non-composable pair or a missing table entry, so
    /// only call it on validated categories.
    #[inline]
    pub fn compose(&self, g: MorId, f: MorId) -> MorId {
        self.try_compose(g, f).unwrap_or_else(|| {
            panic!(
                "composite {} . {} undefined in `{}`",
                self.mor_name(g),
                self.mor_name(f),
                self.name
            )
        })
    }

    /// Composes a path given in diagrammatic-reverse order: `chain(&[h, g, f]) = h∘g∘f`.
    pub fn chain(&self, path: &[MorId]) -> MorId {
        let (last, rest) = path.split_last().expect("empty path");
        rest.iter().rev().fold(*last, |acc, &m| self.compose(m, acc))
    }

    pub fn inverse(&self, m: MorId) -> Option<MorId> {
        let (a, b) = (self.dom(m), self.cod(m));
        self.hom(b, a).iter().copied().find(|&n| {
            self.try_compose(n, m) == Some(self.identity(a)) && self.try_compose(m, n) == Some(self.identity(b))
        })
    }

    pub fn is_iso(&self, m: MorId) -> bool {
        self.inverse(m).is_some()
    }

    pub fn are_isomorphic(&self, a: ObjId, b: ObjId) -> bool {
        a == b || self.hom(a, b).iter().any(|&m| self.is_iso(m))
    }

    /// Isomorphism classes of objects, each sorted, listed by smallest member.
    pub fn iso_classes(&self) -> Vec<Vec<ObjId>> {
        let mut class_of: Vec<Option<usize>> = vec![None; self.num_objects()];
        let mut classes: Vec<Vec<ObjId>> = Vec::new();
        for a in self.objects() {
            if class_of[a.index()].is_some() {
                continue;
            }
            let id = classes.len();
            let mut class = vec![a];
            class_of[a.index()] = Some(id);
            for b in self.objects().skip(a.index() + 1) {
                if class_of[b.index()].is_none() && self.are_isomorphic(a, b) {
                    class_of[b.index()] = Some(id);
                    class.push(b);
                }
            }
            classes.push(class);
        }
        classes
    }

    /// Every `d` with `k ∘ d = l`.
    pub fn factorizations_through(&self, k: MorId, l: MorId) -> impl Iterator<Item = MorId> + '_ {
        self.hom(self.dom(l), self.dom(k))
            .iter()
            .copied()
            .filter(move |&d| self.try_compose(k, d) == Some(l))
    }

    /// The unique `d` with `k ∘ d = l`, if there is exactly one.
    pub fn unique_lift(&self, k: MorId, l: MorId) -> Option<MorId> {
        if self.cod(k) != self.cod(l) {
            return None;
        }
        let mut it = self.factorizations_through(k, l);
        let first = it.next()?;
        it.next().is_none().then_some(first)
    }

    /// The unique `e` with `e ∘ q = l`, if there is exactly one.
    pub fn unique_colift(&self, q: MorId, l: MorId) -> Option<MorId> {
        if self.dom(q) != self.dom(l) {
            return None;
        }
        let mut it = self
            .hom(self.cod(q), self.cod(l))
            .iter()
            .copied()
            .filter(|&e| self.try_compose(e, q) == Some(l));
        let first = it.next()?;
        it.next().is_none().then_some(first)
    }

    /// A stable digest of the full table, used as a cache key.
    pub fn fingerprint(&self) -> u64 {
        use std::hash::{Hash, Hasher};
        let mut h = std::collections::hash_map::DefaultHasher::new();
        self.objects.hash(&mut h);
        for m in &self.morphisms {
            (&m.name, m.dom, m.cod).hash(&mut h);
        }
        self.identity.hash(&mut h);
        match &self.comp {
            Composition::Table(t) => t.hash(&mut h),
            // Rule-based categories are determined by their morphism list.
            Composition::Rule(_) => "rule".hash(&mut h),
        }
        h.finish()
    }
}

/// Incremental constructor for [`FinCategory`].
#[derive(Debug, Clone, Default)]
pub struct CategoryBuilder {
    name: String,
    objects: Vec<String>,
    obj_index: HashMap<String, ObjId>,
    morphisms: Vec<MorphismData>,
    mor_index: HashMap<String, MorId>,
    identity: Vec<Option<MorId>>,
    comp: HashMap<(MorId, MorId), MorId>,
}

impl CategoryBuilder {
    pub fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            ..Self::default()
        }
    }

    pub fn add_object(&mut self, name: impl Into<String>) -> Result<ObjId, CategoryError> {
        let name = name.into();
        if self.obj_index.contains_key(&name) {
            return Err(CategoryError::DuplicateObject(name));
        }
        let id = ObjId(self.objects.len() as u32);
        self.obj_index.insert(name.clone(), id);
        self.objects.push(name);
        self.identity.push(None);
        Ok(id)
    }

    pub fn add_morphism(&mut self, name: impl Into<String>, dom: ObjId, cod: ObjId) -> Result<MorId, CategoryError> {
        let name = name.into();
        if self.mor_index.contains_key(&name) {
            return Err(CategoryError::DuplicateMorphism(name));
        }
        let id = MorId(self.morphisms.len() as u32);
        self.mor_index.insert(name.clone(), id);
        self.morphisms.push(MorphismData { name, dom, cod });
        Ok(id)
    }

    pub fn set_identity(&mut self, o: ObjId, m: MorId) -> Result<(), CategoryError> {
        let slot = &mut self.identity[o.index()];
        if slot.is_some() {
            return Err(CategoryError::DuplicateIdentity(self.objects[o.index()].clone()));
        }
        *slot = Some(m);
        Ok(())
    }

    /// Records `g ∘ f = gf`.
    pub fn set_composite(&mut self, g: MorId, f: MorId, gf: MorId) -> Result<(), CategoryError> {
        if self.morphisms[f.index()].cod != self.morphisms[g.index()].dom {
            return Err(CategoryError::NotComposable {
                g: self.morphisms[g.index()].name.clone(),
                f: self.morphisms[f.index()].name.clone(),
            });
        }
        if self.comp.insert((g, f), gf).is_some() {
            return Err(CategoryError::DuplicateComposite {
                g: self.morphisms[g.index()].name.clone(),
                f: self.morphisms[f.index()].name.clone(),
            });
        }
        Ok(())
    }

    pub fn object_id(&self, name: &str) -> Option<ObjId> {
        self.obj_index.get(name).copied()
    }

    pub fn morphism_id(&self, name: &str) -> Option<MorId> {
        self.mor_index.get(name).copied()
    }

    pub fn morphism_ends(&self, m: MorId) -> (ObjId, ObjId) {
        let d = &self.morphisms[m.index()];
        (d.dom, d.cod)
    }

    pub fn build(self) -> Result<FinCategory, CategoryError> {
        self.finish(None)
    }

    /// Builds a category whose composites come from `rule` instead of a
    /// table; declared composites are ignored.
    pub fn build_with_rule(self, rule: CompositionRule) -> Result<FinCategory, CategoryError> {
        self.finish(Some(rule))
    }

    fn finish(self, rule: Option<CompositionRule>) -> Result<FinCategory, CategoryError> {
        let n = self.objects.len();
        let mut identity = Vec::with_capacity(n);
        for (o, id) in self.identity.iter().enumerate() {
            identity.push(id.ok_or_else(|| CategoryError::MissingIdentity(self.objects[o].clone()))?);
        }
        let mut incoming = vec![Vec::new(); n];
        let mut outgoing = vec![Vec::new(); n];
        let mut in_pos = vec![0u32; self.morphisms.len()];
        let mut out_pos = vec![0u32; self.morphisms.len()];
        let mut homs: HashMap<(ObjId, ObjId), Vec<MorId>> = HashMap::new();
        for (i, m) in self.morphisms.iter().enumerate() {
            let id = MorId(i as u32);
            in_pos[i] = incoming[m.cod.index()].len() as u32;
            incoming[m.cod.index()].push(id);
            out_pos[i] = outgoing[m.dom.index()].len() as u32;
            outgoing[m.dom.index()].push(id);
            homs.entry((m.dom, m.cod)).or_default().push(id);
        }
        let comp = match rule {
            Some(rule) => Composition::Rule(rule),
            None => {
                let mut table: Vec<Vec<Option<MorId>>> = (0..n)
                    .map(|b| vec![None; incoming[b].len() * outgoing[b].len()])
                    .collect();
                for (&(g, f), &gf) in &self.comp {
                    let b = self.morphisms[f.index()].cod.index();
                    let width = incoming[b].len();
                    table[b][out_pos[g.index()] as usize * width + in_pos[f.index()] as usize] = Some(gf);
                }
                Composition::Table(table)
            }
        };
        Ok(FinCategory {
            name: self.name,
            objects: self.objects,
            morphisms: self.morphisms,
            identity,
            incoming,
            outgoing,
            in_pos,
            out_pos,
            comp,
            homs,
            obj_index: self.obj_index,
            mor_index: self.mor_index,
        })
    }
}

/// One violated law, named by the identifiers that witness it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "law", rename_all = "snake_case")]
pub enum Violation {
    IdentityShape {
        object: String,
        identity: String,
    },
    MissingComposite {
        g: String,
        f: String,
    },
    CompositeShape {
        g: String,
        f: String,
        composite: String,
    },
    LeftUnit {
        morphism: String,
        identity: String,
        got: String,
    },
    RightUnit {
        morphism: String,
        identity: String,
        got: String,
    },
    Associativity {
        h: String,
        g: String,
        f: String,
        left: String,
        right: String,
    },
    FunctorShape {
        morphism: String,
        image: String,
    },
    FunctorIdentity {
        object: String,
        image: String,
    },
    FunctorComposite {
        g: String,
        f: String,
        image_of_composite: String,
        composite_of_images: String,
    },
    ComponentShape {
        object: String,
        component: String,
    },
    Naturality {
        morphism: String,
        left: String,
        right: String,
    },
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn validate_category(c: &FinCategory) -> ValidationReport {
    let mut v = Vec::new();
    let name = |m: MorId| c.mor_name(m).to_string();
    for o in c.objects() {
        let id = c.identity(o);
        if c.dom(id) != o || c.cod(id) != o {
            v.push(Violation::IdentityShape {
                object: c.obj_name(o).into(),
                identity: name(id),
            });
        }
    }
    for b in c.objects() {
        for &f in c.incoming(b) {
            for &g in c.outgoing(b) {
                match c.try_compose(g, f) {
                    None => v.push(Violation::MissingComposite { g: name(g), f: name(f) }),
                    Some(gf) if c.dom(gf) != c.dom(f) || c.cod(gf) != c.cod(g) => v.push(Violation::CompositeShape {
                        g: name(g),
                        f: name(f),
                        composite: name(gf),
                    }),
                    Some(_) => {}
                }
            }
        }
    }
    for f in c.morphisms() {
        let right = c.identity(c.dom(f));
        if c.dom(right) == c.dom(f) && c.cod(right) == c.dom(f) {
            match c.try_compose(f, right) {
                Some(x) if x == f => {}
                other => v.push(Violation::RightUnit {
                    morphism: name(f),
                    identity: name(right),
                    got: other.map(name).unwrap_or_default(),
                }),
            }
        }
        let left = c.identity(c.cod(f));
        if c.dom(left) == c.cod(f) && c.cod(left) == c.cod(f) {
            match c.try_compose(left, f) {
                Some(x) if x == f => {}
                other => v.push(Violation::LeftUnit {
                    morphism: name(f),
                    identity: name(left),
                    got: other.map(name).unwrap_or_default(),
                }),
            }
        }
    }
    for g in c.morphisms() {
        for &f in c.incoming(c.dom(g)) {
            let Some(gf) = c.try_compose(g, f) else { continue };
            for &h in c.outgoing(c.cod(g)) {
                let (Some(hg), Some(l)) = (c.try_compose(h, g), c.try_compose(h, gf)) else {
                    continue;
                };
                match c.try_compose(hg, f) {
                    Some(r) if r == l => {}
                    other => v.push(Violation::Associativity {
                        h: name(h),
                        g: name(g),
                        f: name(f),
                        left: name(l),
                        right: other.map(name).unwrap_or_default(),
                    }),
                }
            }
        }
    }
    ValidationReport { violations: v }
}

/// A functor between finite categories given by its object and morphism tables.
#[derive(Debug, Clone)]
pub struct FinFunctor {
    pub source: Arc<FinCategory>,
    pub target: Arc<FinCategory>,
    pub obj_map: Vec<ObjId>,
    pub mor_map: Vec<MorId>,
}

impl FinFunctor {
    pub fn identity(c: &Arc<FinCategory>) -> Self {
        Self {
            source: c.clone(),
            target: c.clone(),
            obj_map: c.objects().collect(),
            mor_map: c.morphisms().collect(),
        }
    }

    /// Sends everything to `obj` and its identity.
    pub fn constant(source: &Arc<FinCategory>, target: &Arc<FinCategory>, obj: ObjId) -> Self {
        Self {
            source: source.clone(),
            target: target.clone(),
            obj_map: vec![obj; source.num_objects()],
            mor_map: vec![target.identity(obj); source.num_morphisms()],
        }
    }

    #[inline]
    pub fn obj(&self, o: ObjId) -> ObjId {
        self.obj_map[o.index()]
    }

    #[inline]
    pub fn mor(&self, m: MorId) -> MorId {
        self.mor_map[m.index()]
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &FinFunctor) -> FinFunctor {
        FinFunctor {
            source: self.source.clone(),
            target: other.target.clone(),
            obj_map: self.obj_map.iter().map(|&o| other.obj(o)).collect(),
            mor_map: self.mor_map.iter().map(|&m| other.mor(m)).collect(),
        }
    }

    /// On-the-nose equality of tables (same source and target shapes assumed).
    pub fn same_tables(&self, other: &FinFunctor) -> bool {
        self.obj_map == other.obj_map && self.mor_map == other.mor_map
    }
}

/// Every functor `source → target`, in lexicographic order of tables.
pub fn enumerate_functors(source: &Arc<FinCategory>, target: &Arc<FinCategory>) -> Vec<FinFunctor> {
    let candidates = vec![target.objects().collect::<Vec<_>>(); source.num_objects()];
    enumerate_functors_with(source, target, &candidates, |_, _| true)
}

/// Functors whose object images come from `obj_candidates[o]` and whose
/// morphism images satisfy `allowed(source_morphism, image)`.
pub fn enumerate_functors_with(
    source: &Arc<FinCategory>,
    target: &Arc<FinCategory>,
    obj_candidates: &[Vec<ObjId>],
    allowed: impl Fn(MorId, MorId) -> bool,
) -> Vec<FinFunctor> {
    let (s, t) = (&**source, &**target);
    // Composition constraints, keyed by the largest index they mention.
    let mut checks: Vec<Vec<(MorId, MorId, MorId)>> = vec![Vec::new(); s.num_morphisms()];
    for b in s.objects() {
        for &f in s.incoming(b) {
            for &g in s.outgoing(b) {
                let gf = s.compose(g, f);
                let last = f.max(g).max(gf);
                checks[last.index()].push((g, f, gf));
            }
        }
    }
    let mut out = Vec::new();
    let mut obj_map = vec![ObjId(0); s.num_objects()];
    let mut mor_map = vec![MorId(0); s.num_morphisms()];

    #[allow(clippy::too_many_arguments)]
    fn assign_mor(
        s: &FinCategory,
        t: &FinCategory,
        i: usize,
        obj_map: &[ObjId],
        mor_map: &mut Vec<MorId>,
        checks: &[Vec<(MorId, MorId, MorId)>],
        allowed: &dyn Fn(MorId, MorId) -> bool,
        out: &mut Vec<Vec<MorId>>,
    ) {
        if i == s.num_morphisms() {
            out.push(mor_map.clone());
            return;
        }
        let m = MorId(i as u32);
        let (a, b) = (obj_map[s.dom(m).index()], obj_map[s.cod(m).index()]);
        let forced = s.is_identity(m).then(|| t.identity(a));
        for &im in t.hom(a, b) {
            if forced.is_some_and(|id| id != im) || !allowed(m, im) {
                continue;
            }
            mor_map[i] = im;
            let ok = checks[i]
                .iter()
                .all(|&(g, f, gf)| t.compose(mor_map[g.index()], mor_map[f.index()]) == mor_map[gf.index()]);
            if ok {
                assign_mor(s, t, i + 1, obj_map, mor_map, checks, allowed, out);
            }
        }
    }

    fn assign_obj(i: usize, obj_map: &mut Vec<ObjId>, candidates: &[Vec<ObjId>], visit: &mut dyn FnMut(&[ObjId])) {
        if i == obj_map.len() {
            visit(obj_map);
            return;
        }
        for &o in &candidates[i] {
            obj_map[i] = o;
            assign_obj(i + 1, obj_map, candidates, visit);
        }
    }

    assign_obj(0, &mut obj_map, obj_candidates, &mut |objs| {
        let mut found = Vec::new();
        assign_mor(s, t, 0, objs, &mut mor_map, &checks, &allowed, &mut found);
        out.extend(found.into_iter().map(|mors| FinFunctor {
            source: source.clone(),
            target: target.clone(),
            obj_map: objs.to_vec(),
            mor_map: mors,
        }));
    });
    out
}

pub fn validate_functor(fun: &FinFunctor) -> ValidationReport {
    let (s, t) = (&*fun.source, &*fun.target);
    let mut v = Vec::new();
    for m in s.morphisms() {
        let im = fun.mor(m);
        if t.dom(im) != fun.obj(s.dom(m)) || t.cod(im) != fun.obj(s.cod(m)) {
            v.push(Violation::FunctorShape {
                morphism: s.mor_name(m).into(),
                image: t.mor_name(im).into(),
            });
        }
    }
    for o in s.objects() {
        let im = fun.mor(s.identity(o));
        if im != t.identity(fun.obj(o)) {
            v.push(Violation::FunctorIdentity {
                object: s.obj_name(o).into(),
                image: t.mor_name(im).into(),
            });
        }
    }
    if !v.is_empty() {
        return ValidationReport { violations: v };
    }
    for b in s.objects() {
        for &f in s.incoming(b) {
            for &g in s.outgoing(b) {
                let Some(gf) = s.try_compose(g, f) else { continue };
                let lhs = fun.mor(gf);
                let rhs = t.try_compose(fun.mor(g), fun.mor(f));
                if rhs != Some(lhs) {
                    v.push(Violation::FunctorComposite {
                        g: s.mor_name(g).into(),
                        f: s.mor_name(f).into(),
                        image_of_composite: t.mor_name(lhs).into(),
                        composite_of_images: rhs.map(|m| t.mor_name(m).to_string()).unwrap_or_default(),
                    });
                }
            }
        }
    }
    ValidationReport { violations: v }
}

/// A natural transformation `source ⇒ target` between parallel functors.
#[derive(Debug, Clone)]
pub struct NatTrans {
    pub source: FinFunctor,
    pub target: FinFunctor,
    pub components: Vec<MorId>,
}

impl NatTrans {
    pub fn identity(fun: &FinFunctor) -> Self {
        let components = fun.source.objects().map(|o| fun.target.identity(fun.obj(o))).collect();
        Self {
            source: fun.clone(),
            target: fun.clone(),
            components,
        }
    }

    #[inline]
    pub fn at(&self, o: ObjId) -> MorId {
        self.components[o.index()]
    }
}

pub fn validate_nat(a: &NatTrans) -> ValidationReport {
    let s = &*a.source.source;
    let t = &*a.source.target;
    let mut v = Vec::new();
    for o in s.objects() {
        let c = a.at(o);
        if t.dom(c) != a.source.obj(o) || t.cod(c) != a.target.obj(o) {
            v.push(Violation::ComponentShape {
                object: s.obj_name(o).into(),
                component: t.mor_name(c).into(),
            });
        }
    }
    if !v.is_empty() {
        return ValidationReport { violations: v };
    }
    for h in s.morphisms() {
        let left = t.try_compose(a.target.mor(h), a.at(s.dom(h)));
        let right = t.try_compose(a.at(s.cod(h)), a.source.mor(h));
        if left.is_none() || left != right {
            let show = |m: Option<MorId>| m.map(|m| t.mor_name(m).to_string()).unwrap_or_default();
            v.push(Violation::Naturality {
                morphism: s.mor_name(h).into(),
                left: show(left),
                right: show(right),
            });
        }
    }
    ValidationReport { violations: v }
}

/// The chain `1 ≤ 2 ≤ … ≤ n` as a thin category.
pub fn build_chain(n: usize) -> Result<FinCategory, CategoryError> {
    if n == 0 {
        return Err(CategoryError::ZeroSize("chain length"));
    }
    let mut b = CategoryBuilder::new(format!("CH{n}"));
    let objs: Vec<ObjId> = (1..=n).map(|i| b.add_object(i.to_string())).collect::<Result<_, _>>()?;
    let mut mor = HashMap::new();
    for i in 1..=n {
        for j in i..=n {
            let name = if i == j { format!("id{i}") } else { format!("m{i}_{j}") };
            let m = b.add_morphism(name, objs[i - 1], objs[j - 1])?;
            mor.insert((i, j), m);
        }
    }
    for i in 1..=n {
        b.set_identity(objs[i - 1], mor[&(i, i)])?;
        for j in i..=n {
            for k in j..=n {
                b.set_composite(mor[&(j, k)], mor[&(i, j)], mor[&(i, k)])?;
            }
        }
    }
    b.build()
}

fn pointed_map_name(a: usize, b: usize, values: &[usize]) -> String {
    match (a, b, values) {
        (1, 2, _) => "i".into(),
        (2, 1, _) => "r".into(),
        (2, 2, [0]) => "c".into(),
        _ if a == b && values.iter().enumerate().all(|(k, &x)| x == k + 1) => format!("id{a}"),
        (1, _, _) => format!("m1{b}"),
        _ => {
            let vals: String = values.iter().map(|x| x.to_string()).collect();
            format!("m{a}{b}_{vals}")
        }
    }
}

/// Skeleton of pointed finite sets `P1 … Pk` (`Pa` has `a` points, basepoint 0)
/// with basepoint-preserving maps.
pub fn build_pointed_sets(max_size: usize) -> Result<FinCategory, CategoryError> {
    if !(1..=4).contains(&max_size) {
        return Err(CategoryError::SizeOutOfRange(max_size));
    }
    let mut b = CategoryBuilder::new(format!("PS{max_size}"));
    let objs: Vec<ObjId> = (1..=max_size)
        .map(|a| b.add_object(format!("P{a}")))
        .collect::<Result<_, _>>()?;
    // Each map Pa -> Pb is the tuple of images of the points 1..a-1.
    let mut maps: Vec<(usize, usize, Vec<usize>)> = Vec::new();
    let mut lookup: HashMap<(usize, usize, Vec<usize>), MorId> = HashMap::new();
    for a in 1..=max_size {
        for bb in 1..=max_size {
            let count = bb.pow((a - 1) as u32);
            for code in 0..count {
                let mut values = vec![0; a - 1];
                let mut rest = code;
                for slot in values.iter_mut().rev() {
                    *slot = rest % bb;
                    rest /= bb;
                }
                let m = b.add_morphism(pointed_map_name(a, bb, &values), objs[a - 1], objs[bb - 1])?;
                lookup.insert((a, bb, values.clone()), m);
                maps.push((a, bb, values));
            }
        }
    }
    for a in 1..=max_size {
        let id: Vec<usize> = (1..a).collect();
        b.set_identity(objs[a - 1], lookup[&(a, a, id)])?;
    }
    let apply = |values: &[usize], x: usize| if x == 0 { 0 } else { values[x - 1] };
    for (i, (a, mid, fv)) in maps.iter().enumerate() {
        for (j, (mid2, c, gv)) in maps.iter().enumerate() {
            if mid != mid2 {
                continue;
            }
            let composite: Vec<usize> = (1..*a).map(|x| apply(gv, apply(fv, x))).collect();
            b.set_composite(MorId(j as u32), MorId(i as u32), lookup[&(*a, *c, composite)])?;
        }
    }
    b.build()
}
