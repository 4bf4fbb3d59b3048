//! Coalgebras for Ω and Ω^ex: building one from a pretorsion theory, checking
//! the axioms, reading the theory back, classifying, and morphisms and 2-cells
//! between coalgebras.

use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::cat::{enumerate_functors_with, FinCategory, FinFunctor, MorId, NatTrans, ObjId};
use crate::comonad::{
    chain3, classify_morphism, commuting_triples, compositor_component, delta_cell_component, delta_morphism,
    delta_object, inverse3, is_identity3, omega_morphism, omega_nat_component, omega_object, then3, xi_component,
    ComonadError, DeltaMap, FunctorMap, Mode, OmegaMap, Then,
};
use crate::exactness::is_short_exact;
use crate::ideal::NullCategory;
use crate::pretorsion::{assignment_functor, is_bihereditary, torsion_assignment, AssignmentError, PretorsionTheory};
use crate::ses::{ses_cached, SesCategory, SesError, SesMorphism};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CoalgebraError {
    #[error("the theory is not bihereditary, which STRICT mode requires")]
    NotBihereditary,
    #[error(transparent)]
    Assignment(#[from] AssignmentError),
    #[error(transparent)]
    Ses(#[from] SesError),
    #[error(transparent)]
    Comonad(#[from] ComonadError),
}

/// A structure functor `λ: C → Ses(C)` with its comparison `λ_δ`.
#[derive(Debug, Clone)]
pub struct CoalgebraStructure {
    pub base: Arc<NullCategory>,
    pub s: Arc<SesCategory>,
    pub ss: Arc<SesCategory>,
    pub mode: Mode,
    pub lambda: FinFunctor,
    /// Per object `X`, a morphism of Ses(Ses(C)) from `[λ](λX)` to `δ(λX)`.
    pub lambda_delta: Vec<MorId>,
}

impl CoalgebraStructure {
    pub fn cat(&self) -> &FinCategory {
        self.base.cat()
    }

    /// `λ_δ` at `x` as a 3×3 grid of base morphisms, rows first.
    pub fn grid(&self, x: ObjId) -> [[MorId; 3]; 3] {
        let t = self.ss.morphism(self.lambda_delta[x.index()]);
        [t.u, t.v, t.w].map(|r| {
            let m = self.s.morphism(r);
            [m.u, m.v, m.w]
        })
    }
}

fn towers(base: &Arc<NullCategory>) -> Result<(Arc<SesCategory>, Arc<SesCategory>), SesError> {
    let s = ses_cached(base)?;
    let ss = ses_cached(s.null_cat())?;
    Ok((s, ss))
}

/// `λ_δ` at `x` from identities and the induced fillers of the outer rows.
fn assemble_lambda_delta(
    s: &SesCategory,
    ss: &SesCategory,
    lambda: &FinFunctor,
    mode: Mode,
    x: ObjId,
) -> Result<MorId, ComonadError> {
    let c = s.base_cat();
    let sc = s.cat();
    let e = lambda.obj(x);
    let src = omega_object(mode, lambda, s, s.null_cat(), e)?.replacement;
    let (a1, a2) = delta_object(s, e)?;
    let missing = |what: &str| ComonadError::Construction(format!("{what} at {}", c.obj_name(x)));

    let (r1s, r1t) = (sc.dom(src.f), sc.dom(a1));
    let (s1, t1) = (s.object(r1s), s.object(r1t));
    let row1 = SesMorphism {
        u: s1.f,
        v: c.identity(c.cod(s1.f)),
        w: c.unique_colift(s1.g, t1.g)
            .ok_or_else(|| missing("top-right comparison"))?,
    };
    let (r3s, r3t) = (sc.cod(src.g), sc.cod(a2));
    let (s3, t3) = (s.object(r3s), s.object(r3t));
    let mid3 = c.cod(s3.f);
    let row3 = SesMorphism {
        u: c.unique_lift(t3.f, s3.f)
            .ok_or_else(|| missing("bottom-left comparison"))?,
        v: c.identity(mid3),
        w: c.unique_colift(s3.g, c.identity(mid3))
            .ok_or_else(|| missing("bottom-right comparison"))?,
    };
    let rows = SesMorphism {
        u: s.require_morphism(r1s, r1t, row1)?,
        v: sc.identity(e),
        w: s.require_morphism(r3s, r3t, row3)?,
    };
    let from = ss.require_object(src.f, src.g)?;
    let to = ss.require_object(a1, a2)?;
    Ok(ss.require_morphism(from, to, rows)?)
}

/// Γ: the coalgebra of a pretorsion theory.
pub fn build_coalgebra(
    c: &Arc<FinCategory>,
    torsion: &[ObjId],
    free: &[ObjId],
    mode: Mode,
) -> Result<CoalgebraStructure, CoalgebraError> {
    let th = PretorsionTheory::new(c.clone(), torsion, free);
    let ta = torsion_assignment(&th)?;
    if mode == Mode::Strict && !is_bihereditary(&th, &ta) {
        return Err(CoalgebraError::NotBihereditary);
    }
    let (s, ss) = towers(&th.null)?;
    let lambda = assignment_functor(&th, &ta, &s)?;
    let lambda_delta = c
        .objects()
        .map(|x| assemble_lambda_delta(&s, &ss, &lambda, mode, x))
        .collect::<Result<_, _>>()?;
    Ok(CoalgebraStructure {
        base: th.null.clone(),
        s,
        ss,
        mode,
        lambda,
        lambda_delta,
    })
}

/// The cofree coalgebra on Ses(C): the canonical pretorsion theory of Ses(C).
pub fn cofree_coalgebra(s: &SesCategory, mode: Mode) -> Result<CoalgebraStructure, CoalgebraError> {
    let (t, f) = s.canonical_pretorsion();
    build_coalgebra(&s.cat_arc(), &t, &f, mode)
}

// ---------------------------------------------------------------------------
// Checking.

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DiagramFailure {
    pub diagram: String,
    pub at: String,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DiagramTally {
    pub diagram: String,
    pub checked: usize,
    pub failed: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct LawReport {
    pub diagrams: Vec<DiagramTally>,
    pub failures: Vec<DiagramFailure>,
}

impl LawReport {
    pub fn pass(&self) -> bool {
        self.failures.is_empty()
    }

    fn record(&mut self, diagram: &str, at: impl Into<String>, outcome: Result<(), String>) {
        let idx = match self.diagrams.iter().position(|d| d.diagram == diagram) {
            Some(i) => i,
            None => {
                self.diagrams.push(DiagramTally {
                    diagram: diagram.into(),
                    checked: 0,
                    failed: 0,
                });
                self.diagrams.len() - 1
            }
        };
        self.diagrams[idx].checked += 1;
        if let Err(detail) = outcome {
            self.diagrams[idx].failed += 1;
            self.failures.push(DiagramFailure {
                diagram: diagram.into(),
                at: at.into(),
                detail,
            });
        }
    }

    pub fn failed_diagrams(&self) -> Vec<&str> {
        self.diagrams
            .iter()
            .filter(|d| d.failed > 0)
            .map(|d| d.diagram.as_str())
            .collect()
    }
}

fn names3(c: &FinCategory, t: SesMorphism) -> String {
    format!("({},{},{})", c.mor_name(t.u), c.mor_name(t.v), c.mor_name(t.w))
}

fn ensure(cond: bool, detail: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(detail())
    }
}

fn equal_paths(
    c: &FinCategory,
    lhs: Result<SesMorphism, ComonadError>,
    rhs: Result<SesMorphism, ComonadError>,
) -> Result<(), String> {
    match (lhs, rhs) {
        (Ok(l), Ok(r)) if l == r => Ok(()),
        (Ok(l), Ok(r)) => Err(format!("{} != {}", names3(c, l), names3(c, r))),
        (Err(e), _) | (_, Err(e)) => Err(e.to_string()),
    }
}

/// The two sides of the coassociativity diagram at `x`, as triples in Ses(Ses(C)).
fn coassociativity_paths(
    cs: &CoalgebraStructure,
    mode: Mode,
    lam: &OmegaMap<'_>,
    delta: &DeltaMap<'_>,
    x: ObjId,
) -> (Result<SesMorphism, ComonadError>, Result<SesMorphism, ComonadError>) {
    let (s, ss) = (&*cs.s, &*cs.ss);
    let ssn = ss.null_cat();
    let ssc = ss.cat();
    let e = cs.lambda.obj(x);
    let ld = cs.lambda_delta[x.index()];
    let left = (|| {
        let l1 = omega_morphism(mode, lam, ss, ssn, ld)?;
        let (l2, _) = delta_cell_component(mode, &cs.lambda, s, ss, delta, ss, e)?;
        let l3 = delta_morphism(ss, ld)?;
        Ok(chain3(ssc, &[l1, l2, l3]))
    })();
    let right = (|| {
        let (r1, _) = compositor_component(mode, &cs.lambda, lam, s, ss, ssn, e)?;
        let lam_after = Then(&cs.lambda, lam);
        let delta_after = Then(&cs.lambda, delta);
        let component = |y: ObjId| Ok(cs.lambda_delta[y.index()]);
        let r2 = omega_nat_component(mode, &lam_after, &delta_after, &component, s, ssn, e)?;
        let (b2, _) = compositor_component(mode, &cs.lambda, delta, s, ss, ssn, e)?;
        let r3 = inverse3(ssc, b2).ok_or_else(|| ComonadError::Construction("compositor not invertible".into()))?;
        let r4 = omega_morphism(mode, delta, ss, ssn, ld)?;
        let (r5, _) = xi_component(s, ss, delta, e)?;
        Ok(chain3(ssc, &[r1, r2, r3, r4, r5]))
    })();
    (left, right)
}

pub fn check_coalgebra(cs: &CoalgebraStructure, mode: Mode) -> LawReport {
    let mut r = LawReport::default();
    let c = cs.cat();
    let (s, ss) = (&*cs.s, &*cs.ss);
    let (sc, ssc) = (s.cat(), ss.cat());
    let lambda = &cs.lambda;

    let counit_ok =
        c.objects().all(|x| s.middle(lambda.obj(x)) == x) && c.morphisms().all(|h| s.morphism(lambda.mor(h)).v == h);
    r.record(
        "counit",
        "all",
        ensure(counit_ok, || "ε∘λ differs from the identity".into()),
    );

    let modes = classify_morphism(lambda, &cs.base, s.null_cat());
    r.record(
        "mode",
        "λ",
        ensure(modes.is(mode), || format!("λ is classified {:?}", modes.modes)),
    );

    let lam = OmegaMap::new(mode, lambda, s, ss);
    let delta = DeltaMap::new(s, ss);
    let mut shapes_ok = true;
    for x in c.objects() {
        let at = c.obj_name(x).to_string();
        let ld = cs.lambda_delta[x.index()];
        let e = lambda.obj(x);
        let shape = (|| {
            let from = lam.obj(e).map_err(|e| e.to_string())?;
            let to = delta.obj(e).map_err(|e| e.to_string())?;
            ensure(ssc.dom(ld) == from && ssc.cod(ld) == to, || {
                format!(
                    "{} goes {} -> {}, expected {} -> {}",
                    ssc.mor_name(ld),
                    ssc.obj_name(ssc.dom(ld)),
                    ssc.obj_name(ssc.cod(ld)),
                    ssc.obj_name(from),
                    ssc.obj_name(to)
                )
            })
        })();
        shapes_ok &= shape.is_ok();
        r.record("lambda_delta_shape", at.clone(), shape);
        let rows = ss.morphism(ld);
        r.record(
            "lambda_delta_iso",
            at.clone(),
            ensure(ssc.is_iso(ld), || format!("{} is not invertible", ssc.mor_name(ld))),
        );
        let cols = [rows.u, rows.v, rows.w].map(|m| s.morphism(m).v);
        r.record(
            "lambda_delta_counit",
            at.clone(),
            ensure(sc.is_identity(rows.v) && cols.iter().all(|&m| c.is_identity(m)), || {
                format!(
                    "middle row {} or middle column {}",
                    sc.mor_name(rows.v),
                    names3(
                        c,
                        SesMorphism {
                            u: cols[0],
                            v: cols[1],
                            w: cols[2]
                        }
                    )
                )
            }),
        );
        let grid = cs.grid(x);
        let lx = s.object(e);
        let tx = c.dom(lx.f);
        let fx = c.cod(lx.g);
        let lt = s.object(lambda.obj(tx));
        let lf = s.object(lambda.obj(fx));
        r.record(
            "torsion_idempotent",
            at.clone(),
            ensure(c.is_iso(grid[0][0]) && cs.base.is_null_object(c.cod(lt.g)), || {
                format!(
                    "position (1,1) {} or free part of the torsion part",
                    c.mor_name(grid[0][0])
                )
            }),
        );
        r.record(
            "free_idempotent",
            at,
            ensure(c.is_iso(grid[2][2]) && cs.base.is_null_object(c.dom(lf.f)), || {
                format!(
                    "position (3,3) {} or torsion part of the free part",
                    c.mor_name(grid[2][2])
                )
            }),
        );
    }

    if shapes_ok {
        for h in c.morphisms() {
            let (x, y) = (c.dom(h), c.cod(h));
            let lhs = lam
                .mor(lambda.mor(h))
                .map(|m| ssc.compose(cs.lambda_delta[y.index()], m));
            let rhs = delta
                .mor(lambda.mor(h))
                .map(|m| ssc.compose(m, cs.lambda_delta[x.index()]));
            let outcome = match (lhs, rhs) {
                (Ok(l), Ok(r)) => ensure(l == r, || format!("{} != {}", ssc.mor_name(l), ssc.mor_name(r))),
                (Err(e), _) | (_, Err(e)) => Err(e.to_string()),
            };
            r.record("lambda_delta_natural", c.mor_name(h), outcome);
        }
        for x in c.objects() {
            let (left, right) = coassociativity_paths(cs, mode, &lam, &delta, x);
            r.record("coassociativity", c.obj_name(x), equal_paths(ssc, left, right));
        }
    }

    let (t, f) = extract_pretorsion(cs);
    for &x in &t {
        for &y in &f {
            for &h in c.hom(x, y) {
                r.record(
                    "torsion_to_free_null",
                    c.mor_name(h),
                    ensure(cs.base.is_null(h), || format!("{} is not null", c.mor_name(h))),
                );
            }
        }
    }
    r
}

/// Θ: objects whose sequence has an invertible left leg, and those with an
/// invertible right leg.
pub fn extract_pretorsion(cs: &CoalgebraStructure) -> (Vec<ObjId>, Vec<ObjId>) {
    let c = cs.cat();
    let seq = |x: ObjId| cs.s.object(cs.lambda.obj(x));
    let t = c.objects().filter(|&x| c.is_iso(seq(x).f)).collect();
    let f = c.objects().filter(|&x| c.is_iso(seq(x).g)).collect();
    (t, f)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum CoalgebraKind {
    Pretorsion,
    Generalized,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ObjectEvidence {
    pub object: String,
    pub left_free_part_null: bool,
    pub right_torsion_part_null: bool,
    pub image_short_exact: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Classification {
    pub kind: CoalgebraKind,
    pub evidence: Vec<ObjectEvidence>,
}

pub fn classify_coalgebra(cs: &CoalgebraStructure) -> Classification {
    let c = cs.cat();
    let s = &cs.s;
    let evidence: Vec<ObjectEvidence> = c
        .objects()
        .map(|x| {
            let seq = s.object(cs.lambda.obj(x));
            let (ll, lr) = (cs.lambda.mor(seq.f), cs.lambda.mor(seq.g));
            ObjectEvidence {
                object: c.obj_name(x).into(),
                left_free_part_null: cs.base.is_null(s.morphism(ll).w),
                right_torsion_part_null: cs.base.is_null(s.morphism(lr).u),
                image_short_exact: is_short_exact(s.null_cat(), ll, lr),
            }
        })
        .collect();
    let kind = if evidence.iter().all(|e| e.image_short_exact) {
        CoalgebraKind::Pretorsion
    } else {
        CoalgebraKind::Generalized
    };
    Classification { kind, evidence }
}

// ---------------------------------------------------------------------------
// Search for coalgebras that are not pretorsion theories.

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct GeneralizedSearch {
    pub null_objects: Vec<String>,
    /// Functors `λ: C → Ses(C)` with `ε∘λ = Id`.
    pub candidates: usize,
    pub exact_candidates: usize,
    pub coalgebras: usize,
    pub pretorsion: usize,
    pub generalized: usize,
    /// `λX` per object of the first GENERALIZED coalgebra found.
    pub witness: Option<Vec<String>>,
}

/// `λ_δ` found by search: the invertible filler with identity middle row.
fn search_lambda_delta(
    s: &SesCategory,
    ss: &SesCategory,
    lambda: &FinFunctor,
    mode: Mode,
    x: ObjId,
) -> Result<MorId, ComonadError> {
    let e = lambda.obj(x);
    let src = omega_object(mode, lambda, s, s.null_cat(), e)?.replacement;
    let tgt = delta_object(s, e)?;
    let sc = s.cat();
    let sol = commuting_triples(sc, (src.f, src.g), tgt, |pos, m| {
        sc.is_iso(m) && (pos != 1 || sc.is_identity(m))
    });
    let rows = *sol
        .first()
        .ok_or_else(|| ComonadError::Construction(format!("no comparison at {}", s.base_cat().obj_name(x))))?;
    let from = ss.require_object(src.f, src.g)?;
    let to = ss.require_object(tgt.0, tgt.1)?;
    Ok(ss.require_morphism(from, to, rows)?)
}

/// Coalgebra structure on an arbitrary candidate `λ`, if the comparison exists.
pub fn coalgebra_from_functor(
    base: &Arc<NullCategory>,
    lambda: FinFunctor,
    mode: Mode,
) -> Result<CoalgebraStructure, CoalgebraError> {
    let (s, ss) = towers(base)?;
    let lambda_delta = base
        .cat()
        .objects()
        .map(|x| search_lambda_delta(&s, &ss, &lambda, mode, x))
        .collect::<Result<_, _>>()?;
    Ok(CoalgebraStructure {
        base: base.clone(),
        s,
        ss,
        mode,
        lambda,
        lambda_delta,
    })
}

/// Exhausts every `λ` with `ε∘λ = Id` and sorts the EXACT coalgebras among
/// them into pretorsion theories and generalized ones.
pub fn search_generalized(base: &Arc<NullCategory>) -> Result<GeneralizedSearch, CoalgebraError> {
    let (s, _) = towers(base)?;
    let c = base.cat_arc();
    let sc = s.cat_arc();
    let obj_candidates: Vec<Vec<ObjId>> = c
        .objects()
        .map(|x| sc.objects().filter(|&e| s.middle(e) == x).collect())
        .collect();
    let candidates = enumerate_functors_with(c, &sc, &obj_candidates, |h, im| s.morphism(im).v == h);
    let mut out = GeneralizedSearch {
        null_objects: base.null_objects().iter().map(|&o| c.obj_name(o).to_string()).collect(),
        candidates: candidates.len(),
        ..Default::default()
    };
    for lambda in candidates {
        if !classify_morphism(&lambda, base, s.null_cat()).is(Mode::Exact) {
            continue;
        }
        out.exact_candidates += 1;
        let Ok(cs) = coalgebra_from_functor(base, lambda, Mode::Exact) else {
            continue;
        };
        if !check_coalgebra(&cs, Mode::Exact).pass() {
            continue;
        }
        out.coalgebras += 1;
        match classify_coalgebra(&cs).kind {
            CoalgebraKind::Pretorsion => out.pretorsion += 1,
            CoalgebraKind::Generalized => {
                out.generalized += 1;
                if out.witness.is_none() {
                    out.witness = Some(
                        c.objects()
                            .map(|x| cs.s.cat().obj_name(cs.lambda.obj(x)).to_string())
                            .collect(),
                    );
                }
            }
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Morphisms and 2-cells of coalgebras.

/// A functor `G` with the comparison `Ḡ_X: μ(GX) → ΩG(λX)`, one morphism of
/// Ses(D) per object of C.
#[derive(Debug, Clone)]
pub struct CoalgebraMorphism {
    pub functor: FinFunctor,
    pub gbar: Vec<MorId>,
}

impl CoalgebraMorphism {
    pub fn identity(cs: &CoalgebraStructure) -> Self {
        let c = cs.base.cat_arc();
        Self {
            functor: FinFunctor::identity(c),
            gbar: c.objects().map(|x| cs.s.cat().identity(cs.lambda.obj(x))).collect(),
        }
    }
}

/// The comparison forced by `G`, with the number of admissible choices per
/// object. `None` when some object has none.
pub fn induced_morphism(
    src: &CoalgebraStructure,
    tgt: &CoalgebraStructure,
    g: &FinFunctor,
) -> Result<Option<(CoalgebraMorphism, Vec<usize>)>, CoalgebraError> {
    let d = tgt.cat();
    let sd = &tgt.s;
    let mut gbar = Vec::new();
    let mut counts = Vec::new();
    for x in src.cat().objects() {
        let mu = tgt.lambda.obj(g.obj(x));
        let seq = src.s.object(src.lambda.obj(x));
        let image = (g.mor(seq.f), g.mor(seq.g));
        let Some(to) = sd.find_object(crate::exactness::ShortExactSeq { f: image.0, g: image.1 }) else {
            return Ok(None);
        };
        let m = sd.object(mu);
        let sols = commuting_triples(d, (m.f, m.g), image, |pos, k| {
            d.is_iso(k) && (pos != 1 || d.is_identity(k))
        });
        let Some(&first) = sols.first() else {
            return Ok(None);
        };
        counts.push(sols.len());
        gbar.push(sd.require_morphism(mu, to, first)?);
    }
    Ok(Some((
        CoalgebraMorphism {
            functor: g.clone(),
            gbar,
        },
        counts,
    )))
}

/// Checks a pseudo-morphism of STRICT coalgebras.
pub fn check_coalgebra_morphism(
    src: &CoalgebraStructure,
    tgt: &CoalgebraStructure,
    m: &CoalgebraMorphism,
) -> LawReport {
    let mut r = LawReport::default();
    let g = &m.functor;
    let c = src.cat();
    let d = tgt.cat();
    let (s_c, ss_c, s_d) = (&*src.s, &*src.ss, &*tgt.s);
    let sdc = s_d.cat();
    let modes = classify_morphism(g, &src.base, &tgt.base);
    r.record(
        "mode",
        "G",
        ensure(modes.is(Mode::Strict), || format!("G is classified {:?}", modes.modes)),
    );
    if !r.pass() {
        return r;
    }
    let omega_g = OmegaMap::new(Mode::Strict, g, s_c, s_d);
    let mu = &tgt.lambda;
    let mut shapes_ok = true;
    for x in c.objects() {
        let at = c.obj_name(x).to_string();
        let gb = m.gbar[x.index()];
        let shape = match omega_g.obj(src.lambda.obj(x)) {
            Ok(to) => ensure(sdc.dom(gb) == mu.obj(g.obj(x)) && sdc.cod(gb) == to, || {
                format!("{} has the wrong ends", sdc.mor_name(gb))
            }),
            Err(e) => Err(e.to_string()),
        };
        shapes_ok &= shape.is_ok();
        r.record("gbar_shape", at.clone(), shape);
        r.record(
            "gbar_iso",
            at.clone(),
            ensure(sdc.is_iso(gb), || format!("{} is not invertible", sdc.mor_name(gb))),
        );
        let t = s_d.morphism(gb);
        r.record(
            "gbar_normal",
            at,
            ensure(d.is_identity(t.v), || format!("middle component {}", d.mor_name(t.v))),
        );
    }
    if !shapes_ok {
        return r;
    }
    for h in c.morphisms() {
        let (x, y) = (c.dom(h), c.cod(h));
        let lhs = sdc.compose(m.gbar[y.index()], mu.mor(g.mor(h)));
        let rhs = omega_g
            .mor(src.lambda.mor(h))
            .map(|k| sdc.compose(k, m.gbar[x.index()]));
        let outcome = match rhs {
            Ok(rhs) => ensure(lhs == rhs, || format!("{} != {}", sdc.mor_name(lhs), sdc.mor_name(rhs))),
            Err(e) => Err(e.to_string()),
        };
        r.record("gbar_natural", c.mor_name(h), outcome);
    }
    let delta_c = DeltaMap::new(s_c, ss_c);
    for x in c.objects() {
        let lx = src.lambda.obj(x);
        let gb = m.gbar[x.index()];
        let path_a = (|| {
            let mu_delta = tgt.ss.morphism(tgt.lambda_delta[g.obj(x).index()]);
            let dg = delta_morphism(s_d, gb)?;
            let (cell, _) = delta_cell_component(Mode::Strict, g, s_c, ss_c, &delta_c, s_d, lx)?;
            let cell_inv =
                inverse3(sdc, cell).ok_or_else(|| ComonadError::Construction("δ_G not invertible".into()))?;
            Ok(chain3(sdc, &[mu_delta, dg, cell_inv]))
        })();
        let path_b = (|| {
            let t = s_d.morphism(gb);
            let omega_mu = SesMorphism {
                u: mu.mor(t.u),
                v: mu.mor(t.v),
                w: mu.mor(t.w),
            };
            let seq = s_c.object(lx);
            let (tx, fx) = (c.dom(seq.f), c.cod(seq.g));
            let omega_gbar = SesMorphism {
                u: m.gbar[tx.index()],
                v: gb,
                w: m.gbar[fx.index()],
            };
            let ld = src.ss.morphism(src.lambda_delta[x.index()]);
            let omega_omega_g = SesMorphism {
                u: omega_g.mor(ld.u)?,
                v: omega_g.mor(ld.v)?,
                w: omega_g.mor(ld.w)?,
            };
            Ok(chain3(sdc, &[omega_mu, omega_gbar, omega_omega_g]))
        })();
        r.record("comultiplication", c.obj_name(x), equal_paths(sdc, path_a, path_b));
    }
    r
}

/// The 2-cell axiom `Ω(α)_{λX} ∘ Ḡ_X = H̄_X ∘ μ(α_X)` at every object.
pub fn check_coalgebra_2cell(
    src: &CoalgebraStructure,
    tgt: &CoalgebraStructure,
    gm: &CoalgebraMorphism,
    hm: &CoalgebraMorphism,
    alpha: &NatTrans,
) -> LawReport {
    let mut r = LawReport::default();
    let c = src.cat();
    let d = tgt.cat();
    let s_d = &tgt.s;
    for x in c.objects() {
        let seq = src.s.object(src.lambda.obj(x));
        let omega_alpha = SesMorphism {
            u: alpha.at(c.dom(seq.f)),
            v: alpha.at(x),
            w: alpha.at(c.cod(seq.g)),
        };
        let gb = s_d.morphism(gm.gbar[x.index()]);
        let hb = s_d.morphism(hm.gbar[x.index()]);
        let mu_alpha = s_d.morphism(tgt.lambda.mor(alpha.at(x)));
        let lhs = then3(d, gb, omega_alpha);
        let rhs = then3(d, mu_alpha, hb);
        r.record(
            "two_cell",
            c.obj_name(x),
            ensure(lhs == rhs, || format!("{} != {}", names3(d, lhs), names3(d, rhs))),
        );
    }
    r
}

/// Whether every component of `λ_δ` is an identity.
pub fn is_trivial(cs: &CoalgebraStructure) -> bool {
    cs.lambda_delta.iter().all(|&m| {
        let t = cs.ss.morphism(m);
        [t.u, t.v, t.w]
            .iter()
            .all(|&r| is_identity3(cs.base.cat(), cs.s.morphism(r)))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cat::build_pointed_sets;
    use crate::ses::build_ses;

    fn ps(k: usize) -> Arc<FinCategory> {
        Arc::new(build_pointed_sets(k).unwrap())
    }

    fn objs(c: &FinCategory, names: &[&str]) -> Vec<ObjId> {
        names.iter().map(|n| c.find_obj(n).unwrap()).collect()
    }

    #[test]
    fn ps2_standard_theory_round_trip() {
        let c = ps(2);
        let (t, f) = (objs(&c, &["P1", "P2"]), objs(&c, &["P1"]));
        for mode in [Mode::Strict, Mode::Exact] {
            let cs = build_coalgebra(&c, &t, &f, mode).unwrap();
            let rep = check_coalgebra(&cs, mode);
            assert!(rep.pass(), "{:?}", rep.failures);
            assert_eq!(extract_pretorsion(&cs), (t.clone(), f.clone()));
            assert_eq!(classify_coalgebra(&cs).kind, CoalgebraKind::Pretorsion);
        }
    }

    #[test]
    fn z1_is_trivial() {
        let c = ps(1);
        let all = objs(&c, &["P1"]);
        let cs = build_coalgebra(&c, &all, &all, Mode::Strict).unwrap();
        assert!(check_coalgebra(&cs, Mode::Strict).pass());
        assert!(is_trivial(&cs));
        assert_eq!(extract_pretorsion(&cs), (all.clone(), all));
    }

    #[test]
    fn cofree_on_ses_ps2() {
        let c = ps(2);
        let nc = Arc::new(NullCategory::through_objects(c, &[ObjId(0)]).unwrap());
        let s = build_ses(nc).unwrap();
        let cs = cofree_coalgebra(&s, Mode::Strict).unwrap();
        let rep = check_coalgebra(&cs, Mode::Strict);
        assert!(rep.pass(), "{:?}", rep.failures);
        let (t, f) = extract_pretorsion(&cs);
        let names = |v: &[ObjId]| v.iter().map(|&o| s.cat().obj_name(o).to_string()).collect::<Vec<_>>();
        assert_eq!(names(&t), ["(id1,id1)", "(id2,r)"]);
        assert_eq!(names(&f), ["(id1,id1)", "(i,id2)"]);
    }

    #[test]
    fn corrupted_comparison_fails() {
        let c = ps(2);
        let cs = build_coalgebra(&c, &objs(&c, &["P1", "P2"]), &objs(&c, &["P1"]), Mode::Strict).unwrap();
        let mut bad = cs.clone();
        let p2 = c.find_obj("P2").unwrap();
        let ld = bad.lambda_delta[p2.index()];
        let ssc = bad.ss.cat();
        // Replace with any other morphism out of the same object.
        let other = *ssc
            .outgoing(ssc.dom(ld))
            .iter()
            .find(|&&m| m != ld)
            .expect("another morphism");
        bad.lambda_delta[p2.index()] = other;
        let rep = check_coalgebra(&bad, Mode::Strict);
        assert!(!rep.pass());
        assert!(!rep.failed_diagrams().is_empty());
    }

    #[test]
    fn identity_morphism_passes() {
        let c = ps(2);
        let cs = build_coalgebra(&c, &objs(&c, &["P1", "P2"]), &objs(&c, &["P1"]), Mode::Strict).unwrap();
        let id = CoalgebraMorphism::identity(&cs);
        assert!(check_coalgebra_morphism(&cs, &cs, &id).pass());
        let (found, counts) = induced_morphism(&cs, &cs, &id.functor).unwrap().unwrap();
        assert_eq!(found.gbar, id.gbar);
        assert!(counts.iter().all(|&n| n == 1));
        let nat = NatTrans::identity(&id.functor);
        assert!(check_coalgebra_2cell(&cs, &cs, &id, &id, &nat).pass());
    }
}
